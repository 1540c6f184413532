//! Exact feasibility of `A x = b, x ≥ 0` over the rationals: phase one of
//! the simplex method with Bland's rule.

use num_traits::{Signed, Zero};

use crate::rational::Weight;

/// A feasible point, or `None` if the system has no non-negative solution.
pub fn feasible(a: &[Vec<Weight>], b: &[Weight]) -> Option<Vec<Weight>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);
    if m == 0 {
        return Some(vec![Weight::zero(); n]);
    }

    // Columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut rows: Vec<Vec<Weight>> = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut t = Vec::with_capacity(width);
        t.extend(row.iter().map(|v| if flip { -v } else { v.clone() }));
        t.extend((0..m).map(|k| if k == i { Weight::from_integer(1.into()) } else { Weight::zero() }));
        t.push(if flip { -rhs } else { rhs.clone() });
        rows.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for minimizing the sum of artificials.
    let mut z = vec![Weight::zero(); width];
    for row in &rows {
        for j in 0..n {
            z[j] -= &row[j];
        }
        z[width - 1] -= &row[width - 1];
    }

    while let Some(s) = (0..n + m).find(|&j| z[j].is_negative()) {
        let mut leave: Option<(usize, Weight)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[s].is_positive() {
                let ratio = &row[width - 1] / &row[s];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry.
        let (r, _) = leave.expect("phase one objective is bounded");
        pivot(&mut rows, &mut z, r, s);
        basis[r] = s;
    }

    if !z[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Weight::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = rows[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(rows: &mut [Vec<Weight>], z: &mut [Weight], r: usize, s: usize) {
    let p = rows[r][s].clone();
    for v in rows[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r || row[s].is_zero() {
            continue;
        }
        let f = row[s].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    if !z[s].is_zero() {
        let f = z[s].clone();
        for (v, pv) in z.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn w(n: i64) -> Weight {
        ratio(n, 1)
    }

    fn check(a: &[Vec<Weight>], b: &[Weight], x: &[Weight]) {
        assert!(x.iter().all(|v| !v.is_negative()));
        for (row, rhs) in a.iter().zip(b) {
            let lhs: Weight = row.iter().zip(x).map(|(c, v)| c * v).sum();
            assert_eq!(&lhs, rhs);
        }
    }

    #[test]
    fn simple_feasible() {
        let a = vec![vec![w(1), w(1)], vec![w(1), w(-1)]];
        let b = vec![w(2), ratio(1, 2)];
        let x = feasible(&a, &b).unwrap();
        check(&a, &b, &x);
        assert_eq!(x, vec![ratio(5, 4), ratio(3, 4)]);
    }

    #[test]
    fn infeasible_sign() {
        // x + y = -1 has no non-negative solution.
        assert!(feasible(&[vec![w(1), w(1)]], &[w(-1)]).is_none());
        // x = 1, x = 2
        assert!(feasible(&[vec![w(1)], vec![w(1)]], &[w(1), w(2)]).is_none());
    }

    #[test]
    fn redundant_rows() {
        let a = vec![vec![w(1), w(1), w(0)], vec![w(2), w(2), w(0)], vec![w(0), w(1), w(1)]];
        let b = vec![w(1), w(2), ratio(1, 3)];
        let x = feasible(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn degenerate_zero_rhs() {
        let a = vec![vec![w(1), w(-1), w(0)], vec![w(0), w(1), w(-1)], vec![w(1), w(1), w(1)]];
        let b = vec![w(0), w(0), w(3)];
        let x = feasible(&a, &b).unwrap();
        assert_eq!(x, vec![w(1), w(1), w(1)]);
    }
}
