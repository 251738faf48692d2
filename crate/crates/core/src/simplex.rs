//! Phase-one simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::linalg::{Rational, RationalMatrix};

/// Find `y >= 0` with `A y = b`, or `None` if the system is infeasible.
pub fn feasible_point(a: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a.get(i, j).clone() } else { a.get(i, j).clone() };
        }
        row[n + i] = Rational::one();
        row[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &best {
                None => true,
                Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry.
        let r = leave.expect("phase-one simplex cannot be unbounded");
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }

    let residual: Rational = (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][width - 1].clone())
        .fold(Rational::zero(), |acc, x| acc + x);
    if !residual.is_zero() {
        return None;
    }
    let mut y = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[i][width - 1].clone();
        }
    }
    Some(y)
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        *x = &*x * &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            *x -= &f * p;
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (x, p) in cost.iter_mut().zip(&prow) {
            *x -= &f * p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn simple_feasible() {
        let a = RationalMatrix::from_i64_rows(3, &[vec![1, 1, 1], vec![1, -1, 0]]);
        let b = vec![rat(4), rat(1)];
        let y = feasible_point(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&y), b);
        assert!(y.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn infeasible() {
        let a = RationalMatrix::from_i64_rows(2, &[vec![1, 1]]);
        assert!(feasible_point(&a, &[rat(-1)]).is_none());
    }

    #[test]
    fn redundant_rows() {
        let a = RationalMatrix::from_i64_rows(2, &[vec![1, 2], vec![2, 4]]);
        let y = feasible_point(&a, &[rat(3), rat(6)]).unwrap();
        assert_eq!(a.mul_vec(&y), vec![rat(3), rat(6)]);
    }
}
