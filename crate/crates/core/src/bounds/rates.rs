use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::stability::StabilityProfile;

use super::{full_conformal_bound, jackknife_plus_bound, liang_barber_bound, BoundInputs, LiangBarberVariant};

/// `ceil(n^(2/5))`, computed exactly as the least `m` with `m⁵ >= n²`.
pub fn balanced_m(n: usize) -> usize {
    let target = (n as u128) * (n as u128);
    let mut m = libm::ceil(libm::pow(n as f64, 0.4)) as u128;
    while m > 1 && (m - 1).pow(5) >= target {
        m -= 1;
    }
    while m.pow(5) < target {
        m += 1;
    }
    m as usize
}

/// One sample size of the rate comparison. Slack columns are `t - α`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateRow {
    pub n: usize,
    pub ours_jplus: f64,
    pub ours_fc: f64,
    pub lb_slack: f64,
    pub lb_q: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    /// First tabulated `n` from which the jackknife+ slack stays below the
    /// (m, n)-stability slack for every later row.
    pub crossover: Option<usize>,
}

impl RateTable {
    pub const CSV_HEADER: &'static str = "n,ours_jplus,ours_fc,lb_slack,lb_q";
}

fn row(n: usize, profile: &StabilityProfile, alpha: f64, eps: f64, delta: f64, gamma: f64) -> Result<RateRow> {
    let inputs = BoundInputs::new(alpha, eps, delta, n, *profile);
    let m = balanced_m(n);
    let jp = jackknife_plus_bound(&inputs)?;
    let fc = full_conformal_bound(&inputs)?;
    let lb = liang_barber_bound(&inputs.with_m(m).with_gamma(gamma), LiangBarberVariant::JackknifePlus)?;
    Ok(RateRow {
        n,
        ours_jplus: jp.slack(),
        ours_fc: fc.slack(),
        lb_slack: lb.slack(),
        lb_q: lb.failure_prob,
        m,
    })
}

/// Slack of both stability bounds against the (m, n)-stability bound with
/// `m = ceil(n^(2/5))`, for each `n` in `n_list` (strictly increasing).
pub fn rate_comparison_table(
    n_list: &[usize],
    profile: &StabilityProfile,
    alpha: f64,
    eps: f64,
    delta: f64,
    gamma: f64,
) -> Result<RateTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n_list", "must be non-empty and strictly increasing"));
    }
    let rows = n_list
        .iter()
        .map(|&n| row(n, profile, alpha, eps, delta, gamma))
        .collect::<Result<Vec<_>>>()?;
    let mut crossover = None;
    for r in rows.iter().rev() {
        if r.ours_jplus < r.lb_slack {
            crossover = Some(r.n);
        } else {
            break;
        }
    }
    Ok(RateTable { rows, crossover })
}

/// Smallest `n` in `[2, n_max]` beyond which the jackknife+ slack stays below
/// the (m, n)-stability slack, located by a geometric scan (64 points per
/// decade) refined by bisection over integers.
pub fn locate_crossover(
    profile: &StabilityProfile,
    alpha: f64,
    eps: f64,
    delta: f64,
    gamma: f64,
    n_max: usize,
) -> Result<Option<usize>> {
    let ours_wins = |n: usize| -> Result<bool> {
        let r = row(n, profile, alpha, eps, delta, gamma)?;
        Ok(r.ours_jplus < r.lb_slack)
    };
    let mut grid: Vec<usize> = Vec::new();
    let mut x = 2.0f64;
    while (x as usize) < n_max {
        let n = x as usize;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        x *= libm::pow(10.0, 1.0 / 64.0);
    }
    grid.push(n_max);
    let mut last_loss: Option<usize> = None;
    for (i, &n) in grid.iter().enumerate() {
        if !ours_wins(n)? {
            last_loss = Some(i);
        }
    }
    let start = match last_loss {
        None => return Ok(Some(grid[0])),
        Some(i) if i + 1 == grid.len() => return Ok(None),
        Some(i) => i,
    };
    // ours loses at grid[start] and wins at grid[start + 1]
    let (mut lo, mut hi) = (grid[start], grid[start + 1]);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ours_wins(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ridge::{stability_constants, Parameterization};

    #[test]
    fn balanced_m_is_exact() {
        assert_eq!(balanced_m(1), 1);
        assert_eq!(balanced_m(32), 4); // 32^(2/5) = 4 exactly
        assert_eq!(balanced_m(33), 5);
        assert_eq!(balanced_m(100_000), 100);
        assert_eq!(balanced_m(100_001), 101);
        for n in 1..5000usize {
            let m = balanced_m(n) as u128;
            assert!(m.pow(5) >= (n as u128).pow(2));
            assert!((m - 1).pow(5) < (n as u128).pow(2));
        }
    }

    #[test]
    fn table_is_monotone_and_rejects_unsorted() {
        let pr = stability_constants(2, 1.0, 1.0, 1.0, Parameterization::PerSample)
            .unwrap()
            .with_density_bound(1.0);
        let ns = [1000, 3000, 10_000, 30_000, 100_000];
        let t = rate_comparison_table(&ns, &pr, 0.1, 0.05, 0.05, 0.1).unwrap();
        for w in t.rows.windows(2) {
            assert!(w[1].ours_jplus < w[0].ours_jplus);
            assert!(w[1].ours_fc < w[0].ours_fc);
            assert!(w[1].lb_slack < w[0].lb_slack);
        }
        assert!(rate_comparison_table(&[10, 10], &pr, 0.1, 0.05, 0.05, 0.1).is_err());
        assert!(rate_comparison_table(&[], &pr, 0.1, 0.05, 0.05, 0.1).is_err());
    }
}
