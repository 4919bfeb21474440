//! Hungarian algorithm over exact costs.
//!
//! Dense O(n^2 m) shortest-augmenting-path formulation with row and column
//! potentials. Rows must not outnumber columns. Works for any exactly
//! ordered additive cost type: `Rational`, or plain integers when the
//! caller has scaled rationals to a common denominator.

use std::ops::{Add, Sub};

/// Minimum-cost assignment of every row to a distinct column.
/// Returns `assignment[row] = column`.
pub fn min_cost_assignment<T>(costs: &[Vec<T>]) -> Vec<usize>
where
    T: Clone + Ord + Default,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T>,
{
    let n = costs.len();
    if n == 0 {
        return Vec::new();
    }
    let m = costs[0].len();
    assert!(n <= m, "assignment needs at least as many columns as rows");
    debug_assert!(costs.iter().all(|row| row.len() == m));

    // 1-based indexing with column 0 as the virtual root
    let mut u = vec![T::default(); n + 1];
    let mut v = vec![T::default(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    let mut minv: Vec<Option<T>> = vec![None; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.fill(None);
        used.fill(false);

        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0usize;

            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = &(&costs[i0 - 1][j - 1] - &u[i0]) - &v[j];
                if minv[j].as_ref().is_none_or(|mv| cur < *mv) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }

            let delta = delta.expect("an unused column always exists");
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = &u[p[j]] + &delta;
                    v[j] = &v[j] - &delta;
                } else if let Some(mv) = minv[j].as_mut() {
                    *mv = &*mv - &delta;
                }
            }

            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn brute(costs: &[Vec<i64>]) -> i64 {
        fn go(costs: &[Vec<i64>], row: usize, used: &mut Vec<bool>) -> i64 {
            if row == costs.len() {
                return 0;
            }
            let mut best = i64::MAX;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(costs[row][j] + go(costs, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(costs, 0, &mut vec![false; costs[0].len()])
    }

    fn total(costs: &[Vec<i64>], a: &[usize]) -> i64 {
        a.iter().enumerate().map(|(i, &j)| costs[i][j]).sum()
    }

    fn to_q(costs: &[Vec<i64>]) -> Vec<Vec<Rational>> {
        costs.iter().map(|r| r.iter().map(|&c| Rational::from(c)).collect()).collect()
    }

    #[test]
    fn square() {
        let costs = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = min_cost_assignment(&to_q(&costs));
        assert_eq!(total(&costs, &a), 5);
    }

    #[test]
    fn rectangular_matches_brute_force() {
        let cases = vec![
            vec![vec![-3, 0, -1, 0], vec![-3, -3, 0, 0]],
            vec![vec![0, -5], vec![-5, -4], vec![-1, -1]].into_iter().map(|mut r| { r.push(0); r }).collect(),
            vec![vec![7, -2, 4, 1, 0]],
        ];
        for costs in cases {
            let a = min_cost_assignment(&to_q(&costs));
            let mut cols = a.clone();
            cols.sort();
            cols.dedup();
            assert_eq!(cols.len(), a.len(), "columns must be distinct");
            assert_eq!(total(&costs, &a), brute(&costs));
        }
    }

    #[test]
    fn fractional_costs() {
        let costs = vec![
            vec![Rational::new(-1, 3), Rational::new(-1, 2)],
            vec![Rational::new(-1, 2), Rational::new(-2, 3)],
        ];
        let a = min_cost_assignment(&costs);
        let t: Rational = a.iter().enumerate().map(|(i, &j)| costs[i][j].clone()).sum();
        // -1/3 - 2/3 = -1 beats -1/2 - 1/2 = -1 (tie); either is optimal
        assert_eq!(t, Rational::from(-1));
    }

    #[test]
    fn empty() {
        assert!(min_cost_assignment::<i64>(&[]).is_empty());
    }
}
