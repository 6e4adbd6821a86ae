//! The weighted word norm that contracts under one step of the recursion.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::word::{formal_recursion, pre_reduce, Letter, Word};

/// Real root of `X³ + X² + X − 2` by bisection on `[0, 1]`.
pub fn contraction_eta() -> f64 {
    real_root(|x| x * x * x + x * x + x - 2.0)
}

/// Real root of `X³ + X² + X − 1`, the other polynomial that appears in the
/// literature for this constant. Kept for comparison only.
pub fn alternative_eta() -> f64 {
    real_root(|x| x * x * x + x * x + x - 1.0)
}

fn real_root(p: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(p(lo) < 0.0 && p(hi) > 0.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `log 2 / log(2/η)`
pub fn alpha0(eta: f64) -> f64 {
    2f64.ln() / (2.0 / eta).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormWeights {
    pub wa: f64,
    pub wb: f64,
    pub wc: f64,
    pub wd: f64,
    pub eta: f64,
    pub c: f64,
}

impl NormWeights {
    /// Weights solving
    /// `wa+wc = η(wb+wa)`, `wa+wd = η(wc+wa)`, `wb = η(wd+wa)` with `wa = 1`.
    pub fn solve(eta: f64) -> NormWeights {
        let wa = 1.0;
        let e2 = eta * eta;
        let e3 = e2 * eta;
        let wd = (e3 + e2 - 1.0) / (1.0 - e3);
        let wb = eta * (wd + wa);
        let wc = eta * (wb + wa) - wa;
        NormWeights { wa, wb, wc, wd, eta, c: eta * wa }
    }

    pub fn weight(&self, l: Letter) -> f64 {
        match l {
            Letter::A => self.wa,
            Letter::B => self.wb,
            Letter::C => self.wc,
            Letter::D => self.wd,
            _ => 0.0,
        }
    }

    /// Largest defect of the three syllable equalities.
    pub fn residual(&self) -> f64 {
        let (wa, wb, wc, wd, e) = (self.wa, self.wb, self.wc, self.wd, self.eta);
        [
            wa + wc - e * (wb + wa),
            wa + wd - e * (wc + wa),
            wb - e * (wd + wa),
        ]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

pub fn solve_norm_weights() -> NormWeights {
    NormWeights::solve(contraction_eta())
}

pub fn weighted_norm(w: &Word, nw: &NormWeights) -> f64 {
    w.letters().iter().map(|&l| nw.weight(l)).sum()
}

/// `(‖w₀'‖ + ‖w₁'‖, η‖w‖ + C)` with `wᵢ'` the pre-reduced sections.
pub fn contraction_sides(w: &Word, nw: &NormWeights) -> Result<(f64, f64)> {
    let r = formal_recursion(w)?;
    let lhs = weighted_norm(&pre_reduce(&r.w0)?, nw) + weighted_norm(&pre_reduce(&r.w1)?, nw);
    Ok((lhs, nw.eta * weighted_norm(w, nw) + nw.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eta_value_and_lambda_polynomial() {
        let eta = contraction_eta();
        assert!((eta - 0.8105357138).abs() < 1e-9);
        let lam = 2.0 / eta;
        assert!((lam.powi(3) - lam.powi(2) - 2.0 * lam - 4.0).abs() < 1e-9);
        assert!((alpha0(eta) - 0.7674).abs() < 1e-3);
    }

    #[test]
    fn weights_positive_and_exact() {
        let nw = solve_norm_weights();
        assert_eq!(nw.wa, 1.0);
        assert!(nw.wb > 0.0 && nw.wc > 0.0 && nw.wd > 0.0);
        assert!(nw.residual() < 1e-12);
        assert!((nw.c - nw.eta).abs() < 1e-15);
    }

    #[test]
    fn alternative_root_gives_negative_weight() {
        let nw = NormWeights::solve(alternative_eta());
        assert!(nw.wd < 0.0);
    }

    #[test]
    fn norm_basics() {
        let nw = solve_norm_weights();
        assert_eq!(weighted_norm(&Word::empty(), &nw), 0.0);
        assert_eq!(weighted_norm(&"a".parse().unwrap(), &nw), nw.wa);
    }

    #[test]
    fn contraction_on_samples() {
        let nw = solve_norm_weights();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in 0..40 {
            for _ in 0..50 {
                let w = crate::word::random_pre_reduced(&mut rng, len);
                let (l, r) = contraction_sides(&w, &nw).unwrap();
                assert!(l <= r + 1e-9, "{w}: {l} > {r}");
            }
        }
    }
}
