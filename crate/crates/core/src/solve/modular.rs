//! Exact solution of nonsingular sparse rational systems by p-adic lifting.
//!
//! The matrix is scaled to integers and factored once modulo a word-size
//! prime `p`. Each right-hand side is then solved digit by digit in base `p`
//! (`A x_k ≡ r_k`, `r_{k+1} = (r_k − A x_k) / p`), and the rational solution is
//! recovered from its `p`-adic expansion by rational reconstruction. Every
//! candidate is checked against the integer system before it is returned, so
//! the result is exact regardless of how many digits were lifted.
//!
//! The residuals stay bounded by `‖A‖·m`, so all heavy work runs on machine
//! integers; big integers appear only in the accumulated solution.

use crate::error::{Error, Result};
use crate::scalar::Rational;
use num::integer::Integer;
use num::{BigInt, One, Signed, ToPrimitive, Zero};

const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

// Integer entries are capped so sparse row products fit comfortably in i128.
const MAX_ENTRY_BITS: u64 = 40;

#[derive(Debug, Clone)]
pub(crate) struct ModularFactor {
    m: usize,
    rows: Vec<Vec<(usize, i64)>>,
    scale: BigInt,
    prime: usize,
    lu: Vec<u64>,
    perm: Vec<usize>,
    log2_hadamard: f64,
}

impl ModularFactor {
    /// `None` when the scaled entries are too large or the matrix is singular
    /// modulo every candidate prime.
    pub(crate) fn new(m: usize, sparse_rows: &[Vec<(usize, Rational)>]) -> Option<Self> {
        let scale = sparse_rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
        let mut rows = Vec::with_capacity(m);
        let mut log2_hadamard = 0.0;
        for row in sparse_rows {
            let mut out = Vec::with_capacity(row.len());
            let mut norm2 = 0.0f64;
            for (j, q) in row {
                let scaled = q.numer() * (&scale / q.denom());
                if scaled.bits() > MAX_ENTRY_BITS {
                    return None;
                }
                let a = scaled.to_i64()?;
                norm2 += (a as f64) * (a as f64);
                if a != 0 {
                    out.push((*j, a));
                }
            }
            log2_hadamard += 0.5 * norm2.max(1.0).log2();
            rows.push(out);
        }
        for prime in 0..PRIMES.len() {
            let mut dense = vec![0u64; m * m];
            for (i, row) in rows.iter().enumerate() {
                for &(j, a) in row {
                    dense[i * m + j] = a.rem_euclid(PRIMES[prime] as i64) as u64;
                }
            }
            let factored = match prime {
                0 => lu_mod::<{ PRIMES[0] }>(&mut dense, m),
                1 => lu_mod::<{ PRIMES[1] }>(&mut dense, m),
                _ => lu_mod::<{ PRIMES[2] }>(&mut dense, m),
            };
            if let Some(perm) = factored {
                return Some(ModularFactor {
                    m,
                    rows,
                    scale,
                    prime,
                    lu: dense,
                    perm,
                    log2_hadamard,
                });
            }
        }
        None
    }

    fn solve_digit(&self, rhs: &[u64]) -> Vec<u64> {
        match self.prime {
            0 => solve_mod::<{ PRIMES[0] }>(&self.lu, &self.perm, rhs, self.m),
            1 => solve_mod::<{ PRIMES[1] }>(&self.lu, &self.perm, rhs, self.m),
            _ => solve_mod::<{ PRIMES[2] }>(&self.lu, &self.perm, rhs, self.m),
        }
    }

    /// Solves `A x = b` exactly.
    pub(crate) fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let m = self.m;
        let p = PRIMES[self.prime];
        let big_p = BigInt::from(p);
        // A_int = scale·A, so A_int x = scale·b = B / t with B integral.
        let scaled: Vec<Rational> = b.iter().map(|q| q * Rational::from_integer(self.scale.clone())).collect();
        let t = scaled.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let target: Vec<BigInt> = scaled.iter().map(|q| q.numer() * (&t / q.denom())).collect();
        if target.iter().all(Zero::is_zero) {
            return Ok(vec![Rational::zero(); m]);
        }
        let log2_b = target
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::MAX).powi(2))
            .sum::<f64>()
            .sqrt()
            .log2();
        let bits_needed = 2.0 * self.log2_hadamard + log2_b.max(0.0) + 4.0;
        let max_digits = (bits_needed / (p as f64).log2()).ceil() as usize + 2;

        let mut residual = target.clone();
        let mut acc = vec![BigInt::zero(); m];
        let mut power = BigInt::one();
        let mut next_attempt = 1;
        for k in 1..=max_digits {
            let r_mod: Vec<u64> = residual
                .iter()
                .map(|r| r.mod_floor(&big_p).to_u64().expect("reduced below p"))
                .collect();
            let digit = self.solve_digit(&r_mod);
            for (i, row) in self.rows.iter().enumerate() {
                let ax: i128 = row.iter().map(|&(j, a)| a as i128 * digit[j] as i128).sum();
                let diff = &residual[i] - BigInt::from(ax);
                debug_assert!((&diff % &big_p).is_zero());
                residual[i] = diff / &big_p;
            }
            for (x, &dg) in acc.iter_mut().zip(&digit) {
                if dg != 0 {
                    *x += &power * dg;
                }
            }
            power *= &big_p;

            if residual.iter().all(Zero::is_zero) {
                // the lifted digits terminated: the solution is an integer vector
                return Ok(acc
                    .iter()
                    .map(|x| Rational::new(x.clone(), t.clone()))
                    .collect());
            }
            if k == next_attempt || k == max_digits {
                next_attempt *= 2;
                if let Some(y) = reconstruct_all(&acc, &power) {
                    if self.verify(&y, &target) {
                        let t = Rational::from_integer(t);
                        return Ok(y.into_iter().map(|q| q / &t).collect());
                    }
                }
            }
        }
        Err(Error::Domain(
            "exact lifting failed to converge within the Hadamard bound".into(),
        ))
    }

    fn verify(&self, y: &[Rational], target: &[BigInt]) -> bool {
        let d = y.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let z: Vec<BigInt> = y.iter().map(|q| q.numer() * (&d / q.denom())).collect();
        self.rows.iter().zip(target).all(|(row, b)| {
            let lhs: BigInt = row.iter().map(|&(j, a)| &z[j] * a).sum();
            lhs == b * &d
        })
    }
}

fn reconstruct_all(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<Rational>> {
    let bound = (modulus >> 1u32).sqrt();
    residues
        .iter()
        .map(|u| rational_reconstruction(u, modulus, &bound))
        .collect()
}

/// Finds `a/b ≡ u (mod modulus)` with `|a|, b ≤ bound`, if one exists.
pub(crate) fn rational_reconstruction(u: &BigInt, modulus: &BigInt, bound: &BigInt) -> Option<Rational> {
    let (mut r0, mut r1) = (modulus.clone(), u.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

#[inline]
fn pow_mod<const P: u64>(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= P;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        exp >>= 1;
    }
    acc
}

/// In-place LU modulo `P`; stores multipliers below the diagonal and
/// inverted pivots on it. Returns the row permutation, or `None` if singular.
fn lu_mod<const P: u64>(a: &mut [u64], m: usize) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..m).collect();
    for k in 0..m {
        let pivot_row = (k..m).find(|&r| a[r * m + k] != 0)?;
        if pivot_row != k {
            for j in 0..m {
                a.swap(k * m + j, pivot_row * m + j);
            }
            perm.swap(k, pivot_row);
        }
        let inv = pow_mod::<P>(a[k * m + k], P - 2);
        a[k * m + k] = inv;
        let (upper, lower) = a.split_at_mut((k + 1) * m);
        let prow = &upper[k * m..];
        for row in lower.chunks_mut(m) {
            if row[k] == 0 {
                continue;
            }
            let l = row[k] * inv % P;
            row[k] = l;
            for j in k + 1..m {
                let t = l * prow[j] % P;
                let x = row[j];
                row[j] = if x >= t { x - t } else { x + P - t };
            }
        }
    }
    Some(perm)
}

fn solve_mod<const P: u64>(lu: &[u64], perm: &[usize], b: &[u64], m: usize) -> Vec<u64> {
    let mut y: Vec<u64> = perm.iter().map(|&r| b[r] % P).collect();
    for i in 0..m {
        let row = &lu[i * m..(i + 1) * m];
        let mut acc = y[i];
        for j in 0..i {
            if row[j] != 0 {
                let t = row[j] * y[j] % P;
                acc = if acc >= t { acc - t } else { acc + P - t };
            }
        }
        y[i] = acc;
    }
    for i in (0..m).rev() {
        let row = &lu[i * m..(i + 1) * m];
        let mut acc = y[i];
        for j in i + 1..m {
            if row[j] != 0 {
                let t = row[j] * y[j] % P;
                acc = if acc >= t { acc - t } else { acc + P - t };
            }
        }
        y[i] = acc * row[i] % P;
    }
    y
}
