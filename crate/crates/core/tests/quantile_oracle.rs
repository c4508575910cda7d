//! Exhaustive comparison of the quantile operators with a sort-and-index
//! oracle that works in integer arithmetic (alpha = k / 20).

use stabconf_core::quantile::{
    empirical_cdf, empirical_quantile_threshold, lower_quantile_minus, upper_quantile_plus,
    ScoreSet,
};

const INF: f64 = f64::INFINITY;

/// All multisets of size `1..=max_len` drawn from `atoms`, as sorted vectors.
fn multisets(atoms: &[f64], max_len: usize) -> Vec<Vec<f64>> {
    fn rec(atoms: &[f64], start: usize, left: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in start..atoms.len() {
            cur.push(atoms[i]);
            rec(atoms, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(atoms, 0, max_len, &mut Vec::new(), &mut out);
    out
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

struct Oracle<'a> {
    sorted: &'a [f64],
}

impl Oracle<'_> {
    fn nth(&self, k: usize) -> f64 {
        self.sorted[k - 1]
    }

    fn q_plus(&self, k20: usize) -> f64 {
        let n = self.sorted.len();
        let rank = ceil_div((20 - k20) * (n + 1), 20);
        if rank > n {
            INF
        } else {
            self.nth(rank)
        }
    }

    fn q_minus(&self, k20: usize) -> f64 {
        let n = self.sorted.len();
        let rank = k20 * (n + 1) / 20;
        if rank == 0 {
            -INF
        } else {
            self.nth(rank)
        }
    }

    fn plain(&self, k20: usize) -> f64 {
        let n = self.sorted.len();
        self.nth(ceil_div((20 - k20) * n, 20).max(1))
    }
}

fn rotate(v: &[f64]) -> Vec<f64> {
    // feed the operators an unsorted copy
    let mut u = v.to_vec();
    u.reverse();
    u.rotate_left(v.len() / 2);
    u
}

fn check_all(atoms: &[f64]) -> usize {
    let mut checked = 0;
    for set in multisets(atoms, 8) {
        let s = ScoreSet::new(rotate(&set)).unwrap();
        let oracle = Oracle { sorted: &set };
        for k20 in 1..20 {
            let alpha = k20 as f64 * 0.05;
            assert_eq!(upper_quantile_plus(&s, alpha).unwrap(), oracle.q_plus(k20), "{set:?} a={alpha}");
            assert_eq!(lower_quantile_minus(&s, alpha).unwrap(), oracle.q_minus(k20), "{set:?} a={alpha}");
            assert_eq!(
                empirical_quantile_threshold(&s, alpha, true).unwrap(),
                oracle.q_plus(k20),
                "{set:?} a={alpha}"
            );
            assert_eq!(
                empirical_quantile_threshold(&s, alpha, false).unwrap(),
                oracle.plain(k20),
                "{set:?} a={alpha}"
            );
            checked += 1;
        }
        if !set.contains(&INF) {
            for t in [-1.0, 0.0, 0.5, 1.0, 2.0, 2.5, 3.0, 4.0] {
                let count = set.iter().filter(|v| **v <= t).count();
                assert_eq!(empirical_cdf(&s, t).unwrap(), count as f64 / set.len() as f64);
            }
        }
    }
    checked
}

#[test]
fn finite_multisets_match_sort_oracle() {
    // C(12, 8) - 1 multisets of size 1..=8 over four atoms, 19 levels each
    assert_eq!(check_all(&[0.0, 1.0, 2.0, 3.0]), 494 * 19);
}

#[test]
fn multisets_with_infinite_scores_match_sort_oracle() {
    check_all(&[0.0, 1.0, 2.0, 3.0, INF]);
}

#[test]
fn infinity_conventions_at_the_edges() {
    let s = ScoreSet::from_slice(&[0.0, 1.0, 2.0]).unwrap();
    // alpha < 1/(n+1) = 0.25
    assert_eq!(upper_quantile_plus(&s, 0.2).unwrap(), INF);
    assert_eq!(lower_quantile_minus(&s, 0.2).unwrap(), -INF);
    assert_eq!(upper_quantile_plus(&s, 0.25).unwrap(), 2.0);
    assert_eq!(lower_quantile_minus(&s, 0.25).unwrap(), 0.0);
}
