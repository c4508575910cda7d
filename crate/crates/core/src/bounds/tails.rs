use libm::exp;

use crate::stability::StabilityProfile;

/// A tail probability bound; values `>= 1` are kept and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tail {
    pub value: f64,
    pub vacuous: bool,
}

impl Tail {
    fn raw(value: f64) -> Self {
        Self {
            value,
            vacuous: !(value < 1.0),
        }
    }
}

/// Parameter concentration `P(|β̂_n - Eβ̂_n|_inf >= ε) <= 2p exp(-2κ₁²ε² / (n c_n²))`.
pub fn mcdiarmid_tail(eps: f64, n: usize, profile: &StabilityProfile) -> Tail {
    let c = profile.c(n);
    let k1 = profile.kappa1;
    Tail::raw(2.0 * profile.p as f64 * exp(-2.0 * k1 * k1 * eps * eps / (n as f64 * c * c)))
}

/// Leave-one-out model concentration
/// `P(max_i |mu_{β̂₋ᵢ} - mu_{β̄₋₁}|_inf >= ε)
///   <= 2p exp(-(2κ₁²/n) (ε/(κ₂ c_{n-1}) - 1/κ₁)²)`.
///
/// The bound only applies beyond the kink `ε > κ₂ c_{n-1} / κ₁`; at or below
/// it the trivial value `2p` is returned, flagged vacuous.
pub fn loo_concentration_tail(eps: f64, n: usize, profile: &StabilityProfile) -> Tail {
    let two_p = 2.0 * profile.p as f64;
    let c = profile.c(n - 1);
    let (k1, k2) = (profile.kappa1, profile.kappa2);
    let gap = eps / (k2 * c) - 1.0 / k1;
    if !(gap > 0.0) {
        return Tail {
            value: two_p,
            vacuous: true,
        };
    }
    Tail::raw(two_p * exp(-2.0 * k1 * k1 / n as f64 * gap * gap))
}

/// Full-data model concentration
/// `P(|mu_{β̂_n} - mu_{β̄_n}|_inf >= ε) <= 2p exp(-2κ₁²ε² / (n κ₂² c_n²))`.
pub fn full_model_concentration_tail(eps: f64, n: usize, profile: &StabilityProfile) -> Tail {
    let c = profile.c(n);
    let (k1, k2) = (profile.kappa1, profile.kappa2);
    Tail::raw(
        2.0 * profile.p as f64 * exp(-2.0 * k1 * k1 * eps * eps / (n as f64 * k2 * k2 * c * c)),
    )
}

/// Dvoretzky–Kiefer–Wolfowitz: `P(sup |F̂_n - F| > dev) <= 2 exp(-2 n dev²)`.
pub fn dkw_tail(n: usize, dev: f64) -> Tail {
    Tail::raw(2.0 * exp(-2.0 * n as f64 * dev * dev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ridge::{stability_constants, Parameterization};

    fn custom(p: usize, c_scale: f64, k1: f64, k2: f64) -> StabilityProfile {
        StabilityProfile::uncertified(p, c_scale, k1, k2).unwrap()
    }

    #[test]
    fn mcdiarmid_examples() {
        let pr = custom(1, 4.0, 1.0, 1.0); // c_4 = 1
        let t = mcdiarmid_tail(0.0, 4, &pr);
        assert_eq!(t.value, 2.0);
        assert!(t.vacuous);
        let t = mcdiarmid_tail(1.0, 4, &pr);
        assert!((t.value - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((t.value - 1.213).abs() < 1e-3);
        assert!(t.vacuous);
        let ridge = stability_constants(2, 1.0, 1.0, 1.0, Parameterization::PerSample).unwrap();
        for n in 1..2000 {
            assert!(mcdiarmid_tail(0.3, 2 * n, &ridge).value < mcdiarmid_tail(0.3, n, &ridge).value);
        }
    }

    #[test]
    fn loo_tail_examples() {
        // c_{n-1} = 0.01 at n = 100
        let pr = custom(2, 0.99, 1.0, 2f64.sqrt());
        let kink = pr.kappa2 * pr.c(99) / pr.kappa1;
        let at = loo_concentration_tail(kink, 100, &pr);
        assert_eq!(at.value, 4.0);
        assert!(at.vacuous);
        let t = loo_concentration_tail(0.1, 100, &pr);
        let gap = 0.1 / (2f64.sqrt() * 0.01) - 1.0;
        let expect = 4.0 * (-2.0 / 100.0 * gap * gap).exp();
        assert!((t.value - expect).abs() < 1e-14);
        assert!((t.value - 1.913888571).abs() < 1e-8, "{}", t.value);
        assert!(t.vacuous);
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let v = loo_concentration_tail(kink * (1.0 + i as f64 * 0.1), 100, &pr).value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn full_model_tail_examples() {
        let pr = custom(3, 8.0, 1.0, 2.0); // c_8 = 1
        assert_eq!(full_model_concentration_tail(0.0, 8, &pr).value, 6.0);
        let v = full_model_concentration_tail(4.0, 8, &pr).value;
        assert!((v - 6.0 * (-2.0f64 * 16.0 / (8.0 * 4.0)).exp()).abs() < 1e-14);
        assert!(full_model_concentration_tail(5.0, 8, &pr).value < v);
    }

    #[test]
    fn dkw_examples() {
        assert!((dkw_tail(100, 0.1).value - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((dkw_tail(100, 0.1).value - 0.2707).abs() < 1e-4);
        assert_eq!(dkw_tail(100, 0.0).value, 2.0);
        assert!(dkw_tail(100, 0.0).vacuous);
        assert_eq!(dkw_tail(400, 0.05).value, dkw_tail(100, 0.1).value);
    }
}
