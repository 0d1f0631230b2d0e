//! Sums over distinct indices.
//!
//! For vectors `a`, `b`, `c` of length `n`:
//!
//! ```text
//! S(a)       = Σ_j a_j
//! S(a, b)    = Σ_{j≠k} a_j b_k
//! S(a, b, c) = Σ_{j,k,l distinct} a_j b_k c_l
//! ```
//!
//! The two- and three-index sums are evaluated in O(n) from power sums
//! `A_j = Σ a^j`, `B_j = Σ b^j`, `C_j = Σ a b^j`:
//!
//! ```text
//! S(a, b)    = A1 B1 - C1
//! S(a, b, b) = A1 (B1² - B2) - 2 C1 B1 + 2 C2
//! S(a, a, a) = A1³ - 3 A2 A1 + 2 A3
//! ```
//!
//! These subtract large, nearly equal quantities, so every power sum and the
//! final combination are carried in double-double arithmetic (error-free
//! transformations on `f64`). The O(n²)/O(n³) brute-force sums are kept in the
//! library as oracles behind a size guard.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest `n` accepted by the cubic brute-force oracle.
pub const BRUTE_FORCE_LIMIT: usize = 2000;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`; about 106 bits of
/// significand.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }

    fn mul_f64(self, x: f64) -> Self {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        DoubleDouble { hi, lo }
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, rhs: DoubleDouble) -> DoubleDouble {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, rhs: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, rhs: f64) -> DoubleDouble {
        self.mul_f64(rhs)
    }
}

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator(DoubleDouble);

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        self.0 = self.0.add_f64(x);
    }

    pub fn add_dd(&mut self, x: DoubleDouble) {
        self.0 = self.0 + x;
    }

    pub fn value(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn dd(&self) -> DoubleDouble {
        self.0
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut acc = Accumulator::default();
    xs.iter().for_each(|&x| acc.add(x));
    acc.value()
}

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `S(a) = Σ a_j`.
pub fn s1(a: &[f64]) -> f64 {
    compensated_sum(a)
}

/// `S(a, b)`: sum of `a_j b_k` over ordered pairs with `j ≠ k`.
pub fn s2(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    let (mut a1, mut b1, mut c1) = (
        Accumulator::default(),
        Accumulator::default(),
        Accumulator::default(),
    );
    for (&x, &y) in a.iter().zip(b) {
        a1.add(x);
        b1.add(y);
        c1.add_dd(DoubleDouble::product(x, y));
    }
    Ok((a1.dd() * b1.dd() - c1.dd()).to_f64())
}

/// `S(a, b, b)`: sum of `a_u b_v b_w` over ordered triples of distinct indices.
pub fn s3_abb(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    let mut a1 = Accumulator::default();
    let mut b1 = Accumulator::default();
    let mut b2 = Accumulator::default();
    let mut c1 = Accumulator::default();
    let mut c2 = Accumulator::default();
    for (&x, &y) in a.iter().zip(b) {
        let yy = DoubleDouble::product(y, y);
        a1.add(x);
        b1.add(y);
        b2.add_dd(yy);
        c1.add_dd(DoubleDouble::product(x, y));
        c2.add_dd(yy * x);
    }
    let (a1, b1, b2, c1, c2) = (a1.dd(), b1.dd(), b2.dd(), c1.dd(), c2.dd());
    let two = DoubleDouble::from_f64(2.0);
    Ok((a1 * (b1 * b1 - b2) - two * c1 * b1 + two * c2).to_f64())
}

/// `S(a, a, a)`: sum of `a_u a_v a_w` over ordered triples of distinct indices.
pub fn s3_aaa(a: &[f64]) -> f64 {
    let mut a1 = Accumulator::default();
    let mut a2 = Accumulator::default();
    let mut a3 = Accumulator::default();
    for &x in a {
        let xx = DoubleDouble::product(x, x);
        a1.add(x);
        a2.add_dd(xx);
        a3.add_dd(xx * x);
    }
    let (a1, a2, a3) = (a1.dd(), a2.dd(), a3.dd());
    (a1 * a1 * a1 - DoubleDouble::from_f64(3.0) * a2 * a1 + DoubleDouble::from_f64(2.0) * a3)
        .to_f64()
}

/// Literal double loop over distinct ordered pairs. Oracle for [`s2`].
pub fn s2_brute(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    guard(a.len())?;
    let mut acc = Accumulator::default();
    for (j, &x) in a.iter().enumerate() {
        for (k, &y) in b.iter().enumerate() {
            if j != k {
                acc.add_dd(DoubleDouble::product(x, y));
            }
        }
    }
    Ok(acc.value())
}

/// Literal triple loop over distinct ordered triples. Oracle for the
/// three-index formulas; O(n³) and guarded at [`BRUTE_FORCE_LIMIT`].
#[allow(clippy::needless_range_loop)]
pub fn s3_brute(a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    check_len(a, c)?;
    guard(a.len())?;
    let n = a.len();
    let mut acc = Accumulator::default();
    for u in 0..n {
        for v in 0..n {
            if v == u {
                continue;
            }
            let ab = DoubleDouble::product(a[u], b[v]);
            for w in 0..n {
                if w != u && w != v {
                    acc.add_dd(ab * c[w]);
                }
            }
        }
    }
    Ok(acc.value())
}

fn guard(n: usize) -> Result<()> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard {
            what: "brute-force length",
            value: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}
