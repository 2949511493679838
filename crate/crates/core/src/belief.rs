//! Beta–Bernoulli beliefs and the Thompson-sampling policy they induce.
//!
//! The TS policy `π_TS(a) = P(μ̂_a is the largest)` is available three ways:
//! a Monte Carlo estimate ([`ts_policy_mc`]), a deterministic quadrature over
//! every arm ([`ts_policy_quadrature`]), and an adaptive-quadrature reference
//! for two arms ([`ts_policy_exact_2arm`]) built on the regularized incomplete
//! beta function, which the other two are tested against.

use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{invalid_param, Result, SblError};
use crate::policy::PolicyVector;
use crate::rng::RandomStream;

/// Beta(α, β) belief over a Bernoulli mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPosterior {
    alpha: f64,
    beta: f64,
}

impl BetaPosterior {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid_param("alpha", format!("must be positive, got {alpha}"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return invalid_param("beta", format!("must be positive, got {beta}"));
        }
        Ok(Self { alpha, beta })
    }

    /// Beta(1, 1).
    pub fn uniform() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn std_dev(&self) -> f64 {
        let s = self.alpha + self.beta;
        (self.alpha * self.beta / (s * s * (s + 1.0))).sqrt()
    }

    /// Conjugate update with a binary reward.
    pub fn bayes_update(&self, reward: u8) -> Result<Self> {
        match reward {
            0 => Ok(Self {
                alpha: self.alpha,
                beta: self.beta + 1.0,
            }),
            1 => Ok(Self {
                alpha: self.alpha + 1.0,
                beta: self.beta,
            }),
            r => Err(SblError::InvalidInput(format!(
                "reward must be 0 or 1, got {r}"
            ))),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let la = xlogy(self.alpha - 1.0, x);
        let lb = xlogy(self.beta - 1.0, 1.0 - x);
        (la + lb - ln_beta(self.alpha, self.beta)).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            beta_reg(self.alpha, self.beta, x)
        }
    }
}

/// `a · ln(x)` with `0 · ln 0 = 0`.
#[inline]
fn xlogy(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * x.ln()
    }
}

/// One posterior per action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    posteriors: Vec<BetaPosterior>,
}

impl BeliefState {
    /// Every arm starts at Beta(1, 1).
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return invalid_param("K", format!("need at least 2 actions, got {k}"));
        }
        Ok(Self {
            posteriors: vec![BetaPosterior::uniform(); k],
        })
    }

    pub fn from_posteriors(posteriors: Vec<BetaPosterior>) -> Result<Self> {
        if posteriors.len() < 2 {
            return invalid_param("K", "need at least 2 posteriors");
        }
        Ok(Self { posteriors })
    }

    pub fn len(&self) -> usize {
        self.posteriors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posteriors.is_empty()
    }

    pub fn posteriors(&self) -> &[BetaPosterior] {
        &self.posteriors
    }

    pub fn update(&mut self, action: usize, reward: u8) -> Result<()> {
        let k = self.posteriors.len();
        let post = self.posteriors.get_mut(action).ok_or_else(|| {
            SblError::InvalidInput(format!("action {action} out of range for {k} arms"))
        })?;
        *post = post.bayes_update(reward)?;
        Ok(())
    }
}

/// How a learner turns its beliefs into a TS policy vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TsEstimator {
    /// Count argmax winners over `samples` joint posterior draws.
    MonteCarlo { samples: usize },
    /// Deterministic quadrature with `points` nodes per arm.
    Quadrature { points: usize },
}

impl TsEstimator {
    pub const DEFAULT_SAMPLES: usize = 2048;
    pub const DEFAULT_POINTS: usize = 16;

    pub fn policy(&self, belief: &BeliefState, rng: &mut RandomStream) -> Result<PolicyVector> {
        match *self {
            TsEstimator::MonteCarlo { samples } => ts_policy_mc(belief, samples, rng),
            TsEstimator::Quadrature { points } => ts_policy_quadrature(belief, points),
        }
    }
}

impl Default for TsEstimator {
    fn default() -> Self {
        TsEstimator::Quadrature {
            points: Self::DEFAULT_POINTS,
        }
    }
}

/// Monte Carlo TS policy: the fraction of `samples` joint draws won by each
/// arm. Ties among the sampled values are broken uniformly at random.
pub fn ts_policy_mc(
    belief: &BeliefState,
    samples: usize,
    rng: &mut RandomStream,
) -> Result<PolicyVector> {
    if samples == 0 {
        return invalid_param("ts_samples", "must be at least 1");
    }
    let dists = belief
        .posteriors
        .iter()
        .map(|p| {
            Beta::new(p.alpha, p.beta)
                .map_err(|e| SblError::InvalidState(format!("beta posterior: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut wins = vec![0u64; dists.len()];
    for _ in 0..samples {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        let mut ties = 0usize;
        for (i, d) in dists.iter().enumerate() {
            let x = d.sample(rng);
            if x > best_val {
                best = i;
                best_val = x;
                ties = 1;
            } else if x == best_val {
                // reservoir choice among equal maxima
                ties += 1;
                if rng.below(ties) == 0 {
                    best = i;
                }
            }
        }
        wins[best] += 1;
    }
    let n = samples as f64;
    PolicyVector::new(wins.into_iter().map(|w| w as f64 / n).collect())
}

/// TS policy by quadrature of `∫ p_a(x) Π_{j≠a} F_j(x) dx`.
///
/// Nodes are placed densely around every posterior (`points` per arm over
/// `mean ± 10 sd`) and merged. On every grid interval the densities are also
/// evaluated at the midpoint; CDFs are accumulated from the piecewise
/// quadratic interpolant of the density and the outer integral uses
/// composite Simpson on the same points.
pub fn ts_policy_quadrature(belief: &BeliefState, points: usize) -> Result<PolicyVector> {
    if points < 2 {
        return invalid_param("ts_points", "need at least 2 nodes per arm");
    }
    let posts = &belief.posteriors;
    let k = posts.len();

    let mut nodes = Vec::with_capacity(k * (points + 1) + 2);
    nodes.push(0.0);
    nodes.push(1.0);
    for p in posts {
        let (m, s) = (p.mean(), p.std_dev());
        let lo = (m - 10.0 * s).max(0.0);
        let hi = (m + 10.0 * s).min(1.0);
        let step = (hi - lo) / points as f64;
        nodes.extend((0..=points).map(|i| lo + step * i as f64));
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    // Interleave interval midpoints: even slots are nodes, odd slots midpoints.
    let mut ys = Vec::with_capacity(2 * nodes.len() - 1);
    for w in nodes.windows(2) {
        ys.push(w[0]);
        ys.push(0.5 * (w[0] + w[1]));
    }
    ys.push(1.0);
    let n = ys.len();
    let ln_y: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let ln_1my: Vec<f64> = ys.iter().map(|y| (1.0 - y).ln()).collect();

    // pdf[j * n + i] = density of arm j at ys[i], cdf[j * n + i] = F_j(ys[i]).
    // Outside mean ± 12 sd a density is treated as zero, so only a window of
    // slots is evaluated per arm; below it the CDF is 0 and above it 1.
    let mut pdf = vec![0.0; k * n];
    let mut cdf = vec![0.0; k * n];
    let mut starts = Vec::with_capacity(k);
    for (j, p) in posts.iter().enumerate() {
        let (m, sd) = (p.mean(), p.std_dev());
        let lo = ys.partition_point(|&y| y < m - 12.0 * sd) & !1;
        let hi = (ys.partition_point(|&y| y <= m + 12.0 * sd) | 1).min(n - 1);
        let hi = if (hi - lo) % 2 == 1 { hi + 1 } else { hi }.min(n - 1);
        starts.push(lo);

        let (a1, b1) = (p.alpha - 1.0, p.beta - 1.0);
        let f = &mut pdf[j * n..(j + 1) * n];
        let mut peak = f64::NEG_INFINITY;
        for i in lo..=hi {
            let lp = xlogy_cached(a1, ln_y[i]) + xlogy_cached(b1, ln_1my[i]);
            f[i] = lp;
            peak = peak.max(lp);
        }
        f[lo..=hi].iter_mut().for_each(|v| *v = (*v - peak).exp());

        let c = &mut cdf[j * n..(j + 1) * n];
        let mut acc = 0.0;
        for s in (lo..hi).step_by(2) {
            let h = ys[s + 2] - ys[s];
            let (fa, fm, fb) = (f[s], f[s + 1], f[s + 2]);
            c[s + 1] = acc + h * (5.0 * fa + 8.0 * fm - fb) / 24.0;
            acc += h * (fa + 4.0 * fm + fb) / 6.0;
            c[s + 2] = acc;
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(SblError::NumericFailure(format!(
                "posterior {j} has no mass on the quadrature grid"
            )));
        }
        f[lo..=hi].iter_mut().for_each(|v| *v /= acc);
        c[lo..=hi]
            .iter_mut()
            .for_each(|v| *v = (*v / acc).clamp(0.0, 1.0));
        c[hi + 1..].iter_mut().for_each(|v| *v = 1.0);
    }

    // Below the second-highest window start at least two CDFs vanish, so every
    // integrand is zero there.
    let mut sorted = starts.clone();
    sorted.sort_unstable();
    let first = sorted[k - 2];

    // g[j] at one point: f_j(y) · Π_{i≠j} F_i(y)
    let mut prefix = vec![0.0; k + 1];
    let mut integrand = |i: usize, out: &mut [f64]| {
        prefix[0] = 1.0;
        for j in 0..k {
            prefix[j + 1] = prefix[j] * cdf[j * n + i];
        }
        let mut suffix = 1.0;
        for j in (0..k).rev() {
            out[j] = pdf[j * n + i] * prefix[j] * suffix;
            suffix *= cdf[j * n + i];
        }
    };

    let mut mass = vec![0.0; k];
    let (mut ga, mut gm, mut gb) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    integrand(first, &mut ga);
    for s in (first..n - 1).step_by(2) {
        let h = ys[s + 2] - ys[s];
        integrand(s + 1, &mut gm);
        integrand(s + 2, &mut gb);
        for j in 0..k {
            mass[j] += h * (ga[j] + 4.0 * gm[j] + gb[j]) / 6.0;
        }
        std::mem::swap(&mut ga, &mut gb);
    }
    mass.iter_mut().for_each(|m| *m = m.max(0.0));
    PolicyVector::from_weights(mass)
}

#[inline]
fn xlogy_cached(a: f64, ln_x: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * ln_x
    }
}

/// `P(X > Y)` for `X ~ a`, `Y ~ b`: adaptive Simpson quadrature of
/// `∫ p_a(x) F_b(x) dx` with absolute error target 1e-9.
pub fn ts_policy_exact_2arm(a: &BetaPosterior, b: &BetaPosterior) -> Result<f64> {
    let f = |x: f64| a.pdf(x) * b.cdf(x);

    let mut breaks = vec![0.0, 1.0];
    for p in [a, b] {
        let (m, s) = (p.mean(), p.std_dev());
        for k in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            breaks.push(m - k * s);
            breaks.push(m + k * s);
        }
    }
    breaks.retain(|x| (0.0..=1.0).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let tol = 1e-9 / breaks.len() as f64;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let flo = f(lo);
        let fhi = f(hi);
        let fm = f(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += simpson(&f, lo, hi, flo, fm, fhi, whole, tol, 60)?;
    }
    if !total.is_finite() {
        return Err(SblError::NumericFailure(
            "two-arm quadrature produced a non-finite value".into(),
        ));
    }
    Ok(total.clamp(0.0, 1.0))
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    flo: f64,
    fm: f64,
    fhi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (lo + hi);
    let lm = 0.5 * (lo + m);
    let rm = 0.5 * (m + hi);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - lo) / 6.0 * (flo + 4.0 * flm + fm);
    let right = (hi - m) / 6.0 * (fm + 4.0 * frm + fhi);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(SblError::NumericFailure(format!(
            "adaptive quadrature did not converge on [{lo}, {hi}]"
        )));
    }
    Ok(simpson(f, lo, m, flo, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson(f, m, hi, fm, frm, fhi, right, tol / 2.0, depth - 1)?)
}
