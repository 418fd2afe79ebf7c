//! Evaluation of the trinomial forms and exact discriminants.
//!
//! `g_k(X) = (X − 1) f_k(X) = X^{k+1} − 2X^k + 1` and its reversal
//! `h_k(X) = X^{k+1} − 2X + 1` are sparse, so evaluation uses binary powering
//! instead of Horner on the dense coefficients of `f_k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, PrimInt, Signed, Zero};

use crate::ball::ComplexBall;
use crate::family::{Error, FamilyIndex};
use crate::real::Real;

/// Largest `k` accepted by [`discriminant_resultant_oracle`].
pub const ORACLE_CAP: u32 = 24;

fn finite<R: Real>(b: ComplexBall<R>, what: &str) -> Result<ComplexBall<R>, Error> {
    if b.is_finite() {
        Ok(b)
    } else {
        Err(Error::PrecisionExhausted(format!("{what}: ball radius overflowed")))
    }
}

/// `g_k(z) = z^k (z − 2) + 1`.
pub fn eval_g<R: Real>(k: FamilyIndex, z: &ComplexBall<R>, prec: u32) -> Result<ComplexBall<R>, Error> {
    let zk = z.pow_u(k.get(), prec);
    let v = zk.mul(&z.add_i64(-2, prec), prec).add_i64(1, prec);
    finite(v, "g_k")
}

/// `g_k'(z) = z^{k−1} ((k+1) z − 2k)`.
pub fn eval_g_prime<R: Real>(k: FamilyIndex, z: &ComplexBall<R>, prec: u32) -> Result<ComplexBall<R>, Error> {
    let k = k.get() as i64;
    let lin = z.mul_i64(k + 1, prec).add_i64(-2 * k, prec);
    let v = z.pow_u((k - 1) as u32, prec).mul(&lin, prec);
    finite(v, "g_k'")
}

/// `h_k'(y) = (k+1) y^k − 2`.
pub fn eval_h_prime<R: Real>(k: FamilyIndex, y: &ComplexBall<R>, prec: u32) -> Result<ComplexBall<R>, Error> {
    let v = y.pow_u(k.get(), prec).mul_i64(k.get() as i64 + 1, prec).add_i64(-2, prec);
    finite(v, "h_k'")
}

/// `2^{k+1} k^k − (k+1)^{k+1}`, the absolute discriminant of `g_k` and `h_k`.
pub fn discriminant_closed_form(k: FamilyIndex) -> BigInt {
    let k = k.get();
    let kb = BigInt::from(k);
    (BigInt::one() << (k as usize + 1)) * num_traits::pow(kb.clone(), k as usize)
        - num_traits::pow(kb + 1, k as usize + 1)
}

/// The closed form in a fixed-width integer type; `None` on overflow.
pub fn discriminant_closed_form_checked<T: PrimInt + CheckedMul + CheckedSub>(k: FamilyIndex) -> Option<T> {
    let k = k.get();
    let kt = T::from(k)?;
    let pow = |b: T, e: u32| (0..e).try_fold(T::one(), |acc, _| acc.checked_mul(&b));
    let two = T::from(2)?;
    pow(two, k + 1)?.checked_mul(&pow(kt, k)?)?.checked_sub(&pow(kt + T::one(), k + 1)?)
}

/// `|disc(g_k)|` from the resultant `Res(g_k, g_k')`, computed as an exact
/// Sylvester determinant. Independent of the closed form.
pub fn discriminant_resultant_oracle(k: FamilyIndex) -> Result<BigInt, Error> {
    discriminant_resultant_oracle_capped(k, ORACLE_CAP)
}

pub fn discriminant_resultant_oracle_capped(k: FamilyIndex, cap: u32) -> Result<BigInt, Error> {
    if k.get() > cap {
        return Err(Error::OracleCap { k: k.get(), cap });
    }
    let n = k.get() as usize + 1;
    // Coefficients from the highest degree down.
    let mut g = vec![BigInt::zero(); n + 1];
    g[0] = BigInt::one();
    g[1] = BigInt::from(-2);
    g[n] = BigInt::one();
    let dg: Vec<BigInt> = (0..n).map(|i| &g[i] * BigInt::from(n - i)).collect();
    // g is monic, so disc = ±Res(g, g').
    Ok(determinant(sylvester(&g, &dg)).abs())
}

fn sylvester(p: &[BigInt], q: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        row[i..i + p.len()].clone_from_slice(p);
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        row[i..i + q.len()].clone_from_slice(q);
        rows.push(row);
    }
    rows
}

/// Fraction-free Bareiss elimination.
fn determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..n {
            for j in c + 1..n {
                let v = &a[r][j] * &a[c][c] - &a[r][c] * &a[c][j];
                a[r][j] = v.div_floor(&prev);
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `|disc(f_k)| = |disc(g_k)| / (k − 1)^2`; the division must be exact.
pub fn disc_f_from_disc_g(k: FamilyIndex) -> Result<BigInt, Error> {
    let d = discriminant_closed_form(k);
    let m = BigInt::from(k.get() - 1).pow(2);
    let (q, r) = d.div_rem(&m);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::InexactDivision(k.get()))
    }
}
