use libm::{cbrt, log, sqrt};

use crate::error::{invalid, Result};
use crate::stability::StabilityProfile;

use super::{BoundInputs, BoundReport};

const DKW: &str = "dkw_term";
const STABILITY: &str = "stability_term";

/// `sqrt(log(2/δ) / (2n))`: the DKW deviation at failure probability `δ`.
fn dkw_term(n: usize, delta: f64) -> f64 {
    sqrt(log(2.0 / delta) / (2.0 * n as f64))
}

/// `1/κ₁ + sqrt(n/(2κ₁²) · log(2p/ε))`.
fn concentration_factor(n: usize, eps: f64, profile: &StabilityProfile) -> f64 {
    let k1 = profile.kappa1;
    1.0 / k1 + sqrt(n as f64 / (2.0 * k1 * k1) * log(2.0 * profile.p as f64 / eps))
}

/// Jackknife+:
/// `t = α + sqrt(log(2/δ)/(2n)) + 2 L κ₂ c_{n-1} (1/κ₁ + sqrt(n/(2κ₁²) log(2p/ε)))`,
/// `q = ε + δ`.
pub fn jackknife_plus_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let n = inputs.n;
    if n < 2 {
        return Err(invalid("n", "jackknife+ bound needs n >= 2"));
    }
    let pr = &inputs.profile;
    let l = pr.density()?;
    let stab = 2.0 * l * pr.kappa2 * pr.c(n - 1) * concentration_factor(n, inputs.eps, pr);
    Ok(BoundReport::assemble(
        "jackknife_plus",
        inputs,
        alloc::vec![(DKW, dkw_term(n, inputs.delta)), (STABILITY, stab)],
        inputs.eps + inputs.delta,
    ))
}

/// Full conformal:
/// `t = α + sqrt(log(2/δ)/(2n)) + L (c_{n+1} + sqrt(2n log(2p/ε)) κ₂ c_n / κ₁)`,
/// `q = ε + δ`.
pub fn full_conformal_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let n = inputs.n;
    if n < 1 {
        return Err(invalid("n", "must be positive"));
    }
    let pr = &inputs.profile;
    let l = pr.density()?;
    let root = sqrt(2.0 * n as f64 * log(2.0 * pr.p as f64 / inputs.eps));
    let stab = l * (pr.c(n + 1) + root * pr.kappa2 * pr.c(n) / pr.kappa1);
    Ok(BoundReport::assemble(
        "full_conformal",
        inputs,
        alloc::vec![(DKW, dkw_term(n, inputs.delta)), (STABILITY, stab)],
        inputs.eps + inputs.delta,
    ))
}

/// CV+ with folds of size `m`:
/// `t = α + sqrt(log(2/δ)/(2n)) + 2 m L κ₂ c_{n-m} (1/κ₁ + sqrt(n/(2κ₁²) log(2p/ε)))`,
/// `q = ε + δ`.
pub fn cv_plus_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let n = inputs.n;
    let m = inputs.fold_size()?;
    if m < 1 || m >= n {
        return Err(invalid("m", "fold size must satisfy 1 <= m < n"));
    }
    let pr = &inputs.profile;
    let l = pr.density()?;
    let stab = 2.0 * m as f64 * l * pr.kappa2 * pr.c(n - m) * concentration_factor(n, inputs.eps, pr);
    Ok(BoundReport::assemble(
        "cv_plus",
        inputs,
        alloc::vec![(DKW, dkw_term(n, inputs.delta)), (STABILITY, stab)],
        inputs.eps + inputs.delta,
    ))
}

/// Distribution-free K-fold CV+ threshold `2α + sqrt(2 log(K/δ) / m)`,
/// holding with failure probability `δ`.
pub fn bian_barber_cv_bound(alpha: f64, k: usize, m: usize, delta: f64) -> Result<f64> {
    crate::error::check_alpha(alpha)?;
    if k == 0 || m == 0 {
        return Err(invalid("K", "fold count and fold size must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    Ok(2.0 * alpha + sqrt(2.0 * log(k as f64 / delta) / m as f64))
}

/// Upper bound on the out-of-sample (m, n)-stability obtained by chaining
/// single-point removals: `Σ_{k=n}^{n+m-1} c_{k+1} / 2`. `m = 0` gives 0.
pub fn psi_out_upper(m: usize, n: usize, profile: &StabilityProfile) -> f64 {
    (n..n + m).map(|k| profile.c(k + 1) / 2.0).sum()
}

/// Which stability parameter enters the (m, n)-stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LiangBarberVariant {
    /// γ-inflated jackknife+, using `psi_out(m, n - 1)`.
    JackknifePlus,
    /// γ-inflated full conformal, using `psi_in(m - 1, n + 1)`, bounded by
    /// the same chaining.
    FullConformal,
}

/// (m, n)-stability bound for the γ-inflated method:
/// `t = α + 3 sqrt(log(1/δ)/min(m, n)) + 2 (ψ/γ)^(1/3)`,
/// `q = 3δ + (ψ/γ)^(1/3)`, with `ψ` the chained stability bound.
pub fn liang_barber_bound(inputs: &BoundInputs, variant: LiangBarberVariant) -> Result<BoundReport> {
    inputs.validate()?;
    let n = inputs.n;
    let m = inputs.m.ok_or_else(|| invalid("m", "augmentation size is required"))?;
    let gamma = inputs
        .gamma
        .ok_or_else(|| invalid("gamma", "inflation is required"))?;
    if m < 1 {
        return Err(invalid("m", "must be at least 1"));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma", "must be positive"));
    }
    if n < 2 {
        return Err(invalid("n", "needs n >= 2"));
    }
    let psi = match variant {
        LiangBarberVariant::JackknifePlus => psi_out_upper(m, n - 1, &inputs.profile),
        LiangBarberVariant::FullConformal => psi_out_upper(m - 1, n + 1, &inputs.profile),
    };
    let root = cbrt(psi / gamma);
    let conc = 3.0 * sqrt(log(1.0 / inputs.delta) / m.min(n) as f64);
    let name = match variant {
        LiangBarberVariant::JackknifePlus => "liang_barber_jackknife_plus",
        LiangBarberVariant::FullConformal => "liang_barber_full_conformal",
    };
    Ok(BoundReport::assemble(
        name,
        inputs,
        alloc::vec![("concentration_term", conc), (STABILITY, 2.0 * root)],
        3.0 * inputs.delta + root,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ridge::{stability_constants, Parameterization};
    use std::vec::Vec;

    fn unit(p: usize) -> StabilityProfile {
        stability_constants(p, 1.0, 1.0, 1.0, Parameterization::PerSample)
            .unwrap()
            .with_density_bound(1.0)
    }

    #[test]
    fn theorem_one_reference_point() {
        let r = jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 1000, unit(2))).unwrap();
        // independent evaluation with std floats
        let dkw = (40f64.ln() / 2000.0).sqrt();
        let stab = 2.0 * 2f64.sqrt() * (16.0 / 999.0) * (1.0 + (500.0 * 80f64.ln()).sqrt());
        assert!((r.term("dkw_term").unwrap() - dkw).abs() < 1e-14);
        assert!((r.term("stability_term").unwrap() - stab).abs() < 1e-12);
        assert!((dkw - 0.0429).abs() < 5e-5);
        assert!((stab - 2.17).abs() < 5e-3, "{stab}");
        assert!(r.vacuous);
        assert_eq!(r.failure_prob, 0.1);
        assert!(r.certified);
    }

    #[test]
    fn zero_stability_limit() {
        let mut pr = unit(2);
        pr.c_scale = 1e-300;
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 500, pr);
        for r in [jackknife_plus_bound(&inputs).unwrap(), full_conformal_bound(&inputs).unwrap()] {
            assert!(r.term("stability_term").unwrap() < 1e-290);
            assert_eq!(r.threshold, 0.1 + r.term("dkw_term").unwrap() + r.term("stability_term").unwrap());
        }
    }

    #[test]
    fn doubling_n_shrinks_both_terms() {
        for n in [50, 1000, 20_000] {
            let a = jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, n, unit(3))).unwrap();
            let b = jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 2 * n, unit(3))).unwrap();
            assert!(b.term("dkw_term").unwrap() < a.term("dkw_term").unwrap());
            assert!(b.term("stability_term").unwrap() < a.term("stability_term").unwrap());
        }
    }

    #[test]
    fn full_conformal_close_to_jackknife_plus_at_large_n() {
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 1_000_000, unit(2));
        let j = jackknife_plus_bound(&inputs).unwrap().term("stability_term").unwrap();
        let f = full_conformal_bound(&inputs).unwrap().term("stability_term").unwrap();
        assert!(f / j > 0.5 && f / j < 2.0, "{f} {j}");
        // direct evaluation
        let n = 1e6f64;
        let expect = 16.0 / (n + 1.0) + (2.0 * n * 80f64.ln()).sqrt() * 2f64.sqrt() * 16.0 / n;
        assert!((f - expect).abs() < 1e-12);
    }

    #[test]
    fn missing_density_is_an_error() {
        let pr = stability_constants(2, 1.0, 1.0, 1.0, Parameterization::PerSample).unwrap();
        assert!(jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 100, pr)).is_err());
        let mut bad = unit(2);
        bad.kappa2 = 0.5;
        assert!(jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 100, bad)).is_err());
    }

    #[test]
    fn cv_plus_reduces_to_jackknife_plus_at_m_one() {
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 300, unit(2));
        let cv = cv_plus_bound(&inputs.with_m(1)).unwrap();
        let jp = jackknife_plus_bound(&inputs).unwrap();
        assert!((cv.threshold - jp.threshold).abs() < 1e-15);
    }

    #[test]
    fn cv_plus_stability_term_linear_in_m() {
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 10_000, unit(2));
        let s1 = cv_plus_bound(&inputs.with_m(1)).unwrap().term("stability_term").unwrap();
        let s2 = cv_plus_bound(&inputs.with_m(2)).unwrap().term("stability_term").unwrap();
        let ratio = s2 / s1;
        assert!((1.9..=2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn cv_plus_fold_size_from_k() {
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 100, unit(2)).with_folds(10);
        assert_eq!(inputs.fold_size().unwrap(), 10);
        let r = cv_plus_bound(&inputs).unwrap();
        let direct = cv_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 100, unit(2)).with_m(10)).unwrap();
        assert_eq!(r.threshold, direct.threshold);
        assert!(BoundInputs::new(0.1, 0.05, 0.05, 100, unit(2)).with_folds(7).fold_size().is_err());
        assert!(cv_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 10, unit(2)).with_m(10)).is_err());
    }

    #[test]
    fn bian_barber_examples() {
        let t = bian_barber_cv_bound(0.1, 5, 20, 0.05).unwrap();
        assert!((t - (0.2 + (2.0 * 100f64.ln() / 20.0).sqrt())).abs() < 1e-14);
        assert!((t - 0.8786).abs() < 5e-5);
        let far = bian_barber_cv_bound(0.1, 5, 1_000_000_000, 0.05).unwrap();
        assert!((far - 0.2).abs() < 1e-3);
        assert!(bian_barber_cv_bound(0.1, 5, 40, 0.05).unwrap() < t);
        assert!(bian_barber_cv_bound(0.1, 10, 20, 0.05).unwrap() > t);
        assert!(bian_barber_cv_bound(0.1, 0, 20, 0.05).is_err());
    }

    #[test]
    fn psi_chaining() {
        let pr = StabilityProfile::uncertified(1, 1.0, 1.0, 1.0).unwrap();
        let n = 10;
        assert_eq!(psi_out_upper(1, n, &pr), pr.c(n + 1) / 2.0);
        let two = psi_out_upper(2, n, &pr);
        assert!((two - (1.0 / 11.0 + 1.0 / 12.0) / 2.0).abs() < 1e-16);
        for (m1, m2) in [(1, 1), (2, 3), (5, 7)] {
            let whole = psi_out_upper(m1 + m2, n, &pr);
            let parts = psi_out_upper(m1, n, &pr) + psi_out_upper(m2, n + m1, &pr);
            assert!((whole - parts).abs() < 1e-15);
        }
        assert_eq!(psi_out_upper(0, n, &pr), 0.0);
    }

    #[test]
    fn liang_barber_reference_point() {
        let ridge = unit(2);
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 10_000, ridge).with_m(40).with_gamma(0.1);
        let r = liang_barber_bound(&inputs, LiangBarberVariant::JackknifePlus).unwrap();
        let psi: f64 = (9999..10039).map(|k| 16.0 / (k as f64 + 1.0) / 2.0).sum();
        let root = (psi / 0.1).cbrt();
        let t = 0.1 + 3.0 * (20f64.ln() / 40.0).sqrt() + 2.0 * root;
        assert!((r.threshold - t).abs() < 1e-13);
        assert!((r.failure_prob - (0.15 + root)).abs() < 1e-13);
    }

    #[test]
    fn liang_barber_gamma_limit() {
        let inputs = BoundInputs::new(0.1, 0.05, 0.05, 1000, unit(2)).with_m(16);
        let r = liang_barber_bound(&inputs.with_gamma(1e300), LiangBarberVariant::JackknifePlus).unwrap();
        let limit = 0.1 + 3.0 * (20f64.ln() / 16.0).sqrt();
        assert!((r.threshold - limit).abs() < 1e-9);
        assert!((r.failure_prob - 0.15).abs() < 1e-9);
        let fc = liang_barber_bound(&inputs.with_gamma(0.1), LiangBarberVariant::FullConformal).unwrap();
        let psi_in = psi_out_upper(15, 1001, &inputs.profile);
        assert!((fc.failure_prob - (0.15 + (psi_in / 0.1).cbrt())).abs() < 1e-14);
        assert!(liang_barber_bound(&inputs, LiangBarberVariant::JackknifePlus).is_err());
    }

    #[test]
    fn additivity_is_exact() {
        let pr = unit(3);
        let mut reports: Vec<BoundReport> = Vec::new();
        for n in [10, 100, 1000] {
            let i = BoundInputs::new(0.07, 0.02, 0.03, n, pr);
            reports.push(jackknife_plus_bound(&i).unwrap());
            reports.push(full_conformal_bound(&i).unwrap());
            reports.push(cv_plus_bound(&i.with_m(2)).unwrap());
            reports.push(liang_barber_bound(&i.with_m(3).with_gamma(0.2), LiangBarberVariant::JackknifePlus).unwrap());
        }
        for r in reports {
            let folded = r.terms.iter().fold(r.inputs.alpha, |a, t| a + t.value);
            assert_eq!(r.threshold, folded);
            assert!(((r.threshold - r.inputs.alpha) - r.slack()).abs() <= 4.0 * f64::EPSILON * r.threshold);
        }
    }

    #[test]
    fn uncertified_profile_is_flagged() {
        let pr = StabilityProfile::uncertified(2, 1.0, 1.0, 2.0).unwrap().with_density_bound(1.0);
        let r = jackknife_plus_bound(&BoundInputs::new(0.1, 0.05, 0.05, 100, pr)).unwrap();
        assert!(!r.certified);
    }
}
