//! Arithmetic on points of the probability simplex.
//!
//! All logarithms are natural; entropies and divergences are in nats and use
//! the `0 · log 0 = 0` convention.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result, SblError};
use crate::rng::RandomStream;

/// Inputs whose sum is within this distance of 1 are renormalized; beyond it
/// they are rejected.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

/// A probability distribution over `K ≥ 2` actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolicyVector(Vec<f64>);

impl PolicyVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(SblError::InvalidInput(format!(
                "policy needs at least 2 actions, got {}",
                probs.len()
            )));
        }
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(SblError::InvalidInput(format!(
                    "policy entry {i} is {p}, expected a probability"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(SblError::InvalidInput(format!(
                "policy sums to {sum}, expected 1"
            )));
        }
        let mut probs = probs;
        if sum != 1.0 {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self(probs))
    }

    /// Builds a policy from non-negative weights with a positive total.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(SblError::InvalidState(format!(
                "cannot normalize weights with total {total}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(SblError::InvalidInput(format!(
                "policy needs at least 2 actions, got {k}"
            )));
        }
        Ok(Self(vec![1.0 / k as f64; k]))
    }

    pub fn one_hot(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(SblError::InvalidInput(format!(
                "one-hot index {index} out of range for {k} actions"
            )));
        }
        let mut v = vec![0.0; k];
        v[index] = 1.0;
        Self::new(v)
    }

    pub(crate) fn from_normalized_unchecked(probs: Vec<f64>) -> Self {
        debug_assert!(probs.len() >= 2);
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOLERANCE);
        Self(probs)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, a: usize) -> f64 {
        self.0[a]
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for PolicyVector {
    type Error = SblError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolicyVector> for Vec<f64> {
    fn from(p: PolicyVector) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for PolicyVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Shannon entropy `−Σ p log p`.
pub fn entropy(p: &PolicyVector) -> f64 {
    -p.probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// `KL(p ‖ q) = Σ p log(p/q)`.
pub fn kl(p: &PolicyVector, q: &PolicyVector) -> Result<f64> {
    check_same_len(p, q)?;
    let mut d = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(SblError::DivergenceUndefined { index: i });
        }
        d += pi * (pi / qi).ln();
    }
    Ok(d.max(0.0))
}

/// Adds `xi` to every entry and renormalizes: `(p + ξ) / (1 + Kξ)`.
///
/// Every output entry lies in `[ξ/(1+Kξ), (1+ξ)/(1+Kξ)]`.
pub fn regularize(p: &PolicyVector, xi: f64) -> Result<PolicyVector> {
    if !(xi > 0.0) || !xi.is_finite() {
        return invalid_param("xi", format!("must be positive and finite, got {xi}"));
    }
    let denom = 1.0 + p.len() as f64 * xi;
    Ok(PolicyVector::from_normalized_unchecked(
        p.probs().iter().map(|&x| (x + xi) / denom).collect(),
    ))
}

/// The lower bound `ξ/(1+Kξ)` that [`regularize`] guarantees.
pub fn regularization_floor(k: usize, xi: f64) -> f64 {
    xi / (1.0 + k as f64 * xi)
}

/// `(1 − w)·p + w·uniform`.
pub fn mix_uniform(p: &PolicyVector, w: f64) -> Result<PolicyVector> {
    if !(0.0..=1.0).contains(&w) {
        return invalid_param("smoothing_w", format!("must lie in [0, 1], got {w}"));
    }
    let u = w / p.len() as f64;
    Ok(PolicyVector::from_normalized_unchecked(
        p.probs().iter().map(|&x| (1.0 - w) * x + u).collect(),
    ))
}

/// Draws an index with probability `p(a)` using one uniform from `rng`.
pub fn sample_action(p: &PolicyVector, rng: &mut RandomStream) -> usize {
    let u = rng.unit();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &x) in p.probs().iter().enumerate() {
        if x > 0.0 {
            acc += x;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // Rounding left `acc` slightly below 1.
    last_positive
}

fn check_same_len(p: &PolicyVector, q: &PolicyVector) -> Result<()> {
    if p.len() != q.len() {
        return Err(SblError::InvalidInput(format!(
            "policy lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> PolicyVector {
        PolicyVector::new(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn entropy_examples() {
        close(
            entropy(&PolicyVector::uniform(4).unwrap()),
            4f64.ln(),
            1e-12,
        );
        close(entropy(&pv(&[1.0, 0.0, 0.0])), 0.0, 0.0);
        // -(0.8 ln 0.8 + 0.2 ln 0.2)
        close(entropy(&pv(&[0.8, 0.2])), 0.500402, 1e-6);
    }

    #[test]
    fn invalid_simplices_rejected() {
        assert!(PolicyVector::new(vec![]).is_err());
        assert!(PolicyVector::new(vec![1.0]).is_err());
        assert!(PolicyVector::new(vec![0.5, 0.6]).is_err());
        assert!(PolicyVector::new(vec![1.5, -0.5]).is_err());
        assert!(PolicyVector::new(vec![f64::NAN, 1.0]).is_err());
        // drift inside tolerance is absorbed
        let p = PolicyVector::new(vec![0.5 + 4e-7, 0.5]).unwrap();
        close(p.probs().iter().sum(), 1.0, 1e-15);
    }

    #[test]
    fn kl_examples() {
        let u3 = PolicyVector::uniform(3).unwrap();
        close(kl(&u3, &u3).unwrap(), 0.0, 0.0);
        let u2 = PolicyVector::uniform(2).unwrap();
        close(kl(&pv(&[1.0, 0.0]), &u2).unwrap(), 2f64.ln(), 1e-12);
        close(kl(&pv(&[0.8, 0.2]), &u2).unwrap(), 0.192745, 1e-6);
    }

    #[test]
    fn kl_zero_support_is_an_error() {
        let err = kl(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, SblError::DivergenceUndefined { index: 1 });
        assert!(kl(&pv(&[0.5, 0.5]), &PolicyVector::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn regularize_examples() {
        let p = pv(&[0.3, 0.7]);
        let r = regularize(&p, 1e-12).unwrap();
        for (a, b) in r.probs().iter().zip(p.probs()) {
            close(*a, *b, 1e-10);
        }
        let r = regularize(&pv(&[1.0, 0.0]), 0.01).unwrap();
        close(r.get(0), 1.01 / 1.02, 1e-15);
        close(r.get(1), 0.01 / 1.02, 1e-15);
        close(r.get(1), regularization_floor(2, 0.01), 1e-15);
        let u5 = PolicyVector::uniform(5).unwrap();
        let r = regularize(&u5, 0.3).unwrap();
        for x in r.probs() {
            close(*x, 0.2, 1e-15);
        }
        assert!(regularize(&u5, 0.0).is_err());
        assert!(regularize(&u5, -1.0).is_err());
    }

    #[test]
    fn mix_uniform_examples() {
        let p = pv(&[0.1, 0.2, 0.7]);
        assert_eq!(mix_uniform(&p, 0.0).unwrap(), p);
        for x in mix_uniform(&p, 1.0).unwrap().probs() {
            close(*x, 1.0 / 3.0, 1e-15);
        }
        let m = mix_uniform(&PolicyVector::one_hot(10, 0).unwrap(), 0.15).unwrap();
        close(m.get(0), 0.865, 1e-12);
        for x in &m.probs()[1..] {
            close(*x, 0.015, 1e-12);
        }
        assert!(mix_uniform(&p, 1.2).is_err());
        assert!(mix_uniform(&p, -0.1).is_err());
    }

    #[test]
    fn sample_action_examples() {
        let mut rng = RandomStream::from_seed(11);
        let hot = PolicyVector::one_hot(5, 3).unwrap();
        for _ in 0..1000 {
            assert_eq!(sample_action(&hot, &mut rng), 3);
        }

        let u2 = PolicyVector::uniform(2).unwrap();
        let n = 100_000;
        let zeros = (0..n).filter(|_| sample_action(&u2, &mut rng) == 0).count();
        let freq = zeros as f64 / n as f64;
        assert!((0.49..=0.51).contains(&freq), "{freq}");

        let p = pv(&[0.3, 0.7]);
        let mut a = RandomStream::from_seed(5);
        let mut b = RandomStream::from_seed(5);
        let xs: Vec<_> = (0..500).map(|_| sample_action(&p, &mut a)).collect();
        let ys: Vec<_> = (0..500).map(|_| sample_action(&p, &mut b)).collect();
        assert_eq!(xs, ys);
    }

    fn simplex(k: std::ops::Range<usize>) -> impl Strategy<Value = PolicyVector> {
        prop::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", |w| {
            let w: Vec<f64> = w.into_iter().map(|x| x * x).collect();
            PolicyVector::from_weights(w).ok()
        })
    }

    proptest! {
        #[test]
        fn entropy_bounded(p in simplex(2..12)) {
            let h = entropy(&p);
            prop_assert!(h >= -1e-15);
            prop_assert!(h <= (p.len() as f64).ln() + 1e-12);
        }

        #[test]
        fn smoothing_never_lowers_entropy(p in simplex(2..12), w in 0.0f64..=1.0) {
            let m = mix_uniform(&p, w).unwrap();
            prop_assert!(entropy(&m) >= entropy(&p) - 1e-12);
        }

        #[test]
        fn kl_self_is_zero_and_positive_otherwise(p in simplex(2..8), q in simplex(2..8)) {
            let q = regularize(&q, 1e-3).unwrap();
            prop_assert!(kl(&q, &q).unwrap().abs() <= 1e-12);
            if p.len() == q.len() {
                let d = kl(&p, &q).unwrap();
                prop_assert!(d >= 0.0);
                let max_gap = p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if max_gap > 1e-3 {
                    prop_assert!(d > 0.0);
                }
            }
        }

        #[test]
        fn regularize_keeps_order_and_floor(p in simplex(2..12), xi in 1e-9f64..1.0) {
            let r = regularize(&p, xi).unwrap();
            let k = p.len();
            let floor = regularization_floor(k, xi);
            let ceil = (1.0 + xi) / (1.0 + k as f64 * xi);
            prop_assert_eq!(r.argmax(), p.argmax());
            for &x in r.probs() {
                prop_assert!(x >= floor * (1.0 - 1e-12) && x <= ceil * (1.0 + 1e-12));
            }
            if p.min() == 0.0 {
                prop_assert!((r.min() - floor).abs() <= 1e-15);
            }
        }
    }
}
