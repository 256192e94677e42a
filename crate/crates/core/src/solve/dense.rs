//! Dense LU with row pivoting over either scalar mode.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct LuFactor<T> {
    m: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> LuFactor<T> {
    /// Factors a row-major `m × m` matrix in place.
    pub(crate) fn factor(mut a: Vec<T>, m: usize) -> Result<Self> {
        debug_assert_eq!(a.len(), m * m);
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let (best, key) = (k..m)
                .map(|r| (r, a[r * m + k].pivot_key()))
                .fold((k, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if key == 0.0 {
                return Err(Error::Domain(format!("singular matrix at column {k}")));
            }
            if best != k {
                for j in 0..m {
                    a.swap(k * m + j, best * m + j);
                }
                perm.swap(k, best);
            }
            let pivot = a[k * m + k].clone();
            let (upper, lower) = a.split_at_mut((k + 1) * m);
            let pivot_row = &upper[k * m..];
            for row in lower.chunks_mut(m) {
                if row[k].is_zero() {
                    continue;
                }
                let l = row[k].clone() / pivot.clone();
                for j in k + 1..m {
                    if !pivot_row[j].is_zero() {
                        let t = l.clone() * pivot_row[j].clone();
                        row[j] -= &t;
                    }
                }
                row[k] = l;
            }
        }
        Ok(LuFactor { m, lu: a, perm })
    }

    pub(crate) fn solve(&self, b: &[T]) -> Vec<T> {
        let m = self.m;
        let mut y: Vec<T> = self.perm.iter().map(|&r| b[r].clone()).collect();
        for i in 0..m {
            let row = &self.lu[i * m..(i + 1) * m];
            let mut acc = y[i].clone();
            for j in 0..i {
                if !row[j].is_zero() {
                    acc -= &(row[j].clone() * y[j].clone());
                }
            }
            y[i] = acc;
        }
        for i in (0..m).rev() {
            let row = &self.lu[i * m..(i + 1) * m];
            let mut acc = y[i].clone();
            for j in i + 1..m {
                if !row[j].is_zero() {
                    acc -= &(row[j].clone() * y[j].clone());
                }
            }
            y[i] = acc / row[i].clone();
        }
        y
    }
}
