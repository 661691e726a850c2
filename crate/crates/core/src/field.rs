//! Arithmetic in the prime field F_p together with the additive character
//! `psi(t) = exp(2 pi i t / p)` and the Legendre symbol.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_PRIME: u32 = 5;
pub const MAX_PRIME: u32 = 499;

/// An element of F_p. The modulus travels with the value so that the
/// arithmetic operators can reduce without a context argument.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    value: u32,
    modulus: u32,
}

impl Scalar {
    pub fn new(value: i64, modulus: u32) -> Self {
        let m = i64::from(modulus);
        Self {
            value: value.rem_euclid(m) as u32,
            modulus,
        }
    }

    pub fn zero(modulus: u32) -> Self {
        Self { value: 0, modulus }
    }

    pub fn one(modulus: u32) -> Self {
        Self { value: 1, modulus }
    }

    /// The element `(p + 1) / 2`, i.e. the inverse of 2.
    pub fn half(modulus: u32) -> Self {
        Self {
            value: modulus.div_ceil(2),
            modulus,
        }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn index(self) -> usize {
        self.value as usize
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let m = u64::from(self.modulus);
        let mut base = u64::from(self.value);
        let mut acc = 1u64 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        Self {
            value: acc as u32,
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(u64::from(self.modulus) - 2))
        }
    }

    /// Signed representative in `(-p/2, p/2]`.
    pub fn centered(self) -> i64 {
        let v = i64::from(self.value);
        let m = i64::from(self.modulus);
        if 2 * v > m {
            v - m
        } else {
            v
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    #[inline]
    fn add(self, rhs: Scalar) -> Scalar {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value + rhs.value;
        Scalar {
            value: if s >= self.modulus { s - self.modulus } else { s },
            modulus: self.modulus,
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    #[inline]
    fn sub(self, rhs: Scalar) -> Scalar {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value + self.modulus - rhs.value;
        Scalar {
            value: if s >= self.modulus { s - self.modulus } else { s },
            modulus: self.modulus,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    #[inline]
    fn mul(self, rhs: Scalar) -> Scalar {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Scalar {
            value: ((u64::from(self.value) * u64::from(rhs.value)) % u64::from(self.modulus))
                as u32,
            modulus: self.modulus,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    #[inline]
    fn neg(self) -> Scalar {
        Scalar {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = *self + rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = *self - rhs;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = *self * rhs;
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// The prime `p` with its character tables. Immutable once built.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u32,
    psi_table: Vec<Complex64>,
    legendre_table: Vec<i8>,
    half: Scalar,
}

impl PrimeContext {
    pub fn new(p: u32) -> Result<Self> {
        if !(MIN_PRIME..=MAX_PRIME).contains(&p) || !is_prime(u64::from(p)) {
            return Err(Error::UnsupportedPrime(u64::from(p)));
        }
        let psi_table = (0..p)
            .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * f64::from(t) / f64::from(p)))
            .collect();
        let mut legendre_table = vec![-1i8; p as usize];
        legendre_table[0] = 0;
        for t in 1..u64::from(p) {
            legendre_table[(t * t % u64::from(p)) as usize] = 1;
        }
        Ok(Self {
            p,
            psi_table,
            legendre_table,
            half: Scalar::half(p),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn half(&self) -> Scalar {
        self.half
    }

    pub fn psi_table(&self) -> &[Complex64] {
        &self.psi_table
    }

    pub fn legendre_table(&self) -> &[i8] {
        &self.legendre_table
    }

    #[inline]
    pub fn scalar(&self, value: i64) -> Scalar {
        Scalar::new(value, self.p)
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero(self.p)
    }

    pub fn one(&self) -> Scalar {
        Scalar::one(self.p)
    }

    /// Iterates over every element of F_p in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = Scalar> + '_ {
        (0..self.p).map(move |v| Scalar::new(i64::from(v), self.p))
    }

    pub fn units(&self) -> impl Iterator<Item = Scalar> + '_ {
        (1..self.p).map(move |v| Scalar::new(i64::from(v), self.p))
    }

    /// Legendre symbol, with `sigma(0) = 0`.
    #[inline]
    pub fn legendre(&self, t: Scalar) -> i32 {
        i32::from(self.legendre_table[t.index()])
    }

    #[inline]
    pub fn additive_character(&self, t: Scalar) -> Complex64 {
        self.psi_table[t.index()]
    }

    /// Shorthand for [`PrimeContext::additive_character`].
    #[inline]
    pub fn psi(&self, t: Scalar) -> Complex64 {
        self.psi_table[t.index()]
    }

    /// `(1/p) sum_t psi(b t / 2) sigma(t)`, the coefficient in front of the
    /// big-cell kernel. Its modulus is `p^{-1/2}`.
    pub fn big_cell_normalizer(&self, b: Scalar) -> Result<Complex64> {
        if b.is_zero() {
            return Err(Error::ZeroParameter);
        }
        let step = self.half * b;
        let sum: Complex64 = self
            .units()
            .map(|t| self.psi(step * t) * f64::from(self.legendre(t)))
            .sum();
        Ok(sum / f64::from(self.p))
    }

    /// Smallest generator of the cyclic group F_p^*.
    pub fn primitive_root(&self) -> Scalar {
        let order = u64::from(self.p - 1);
        let factors = prime_factors(order);
        self.units()
            .skip(1)
            .find(|g| factors.iter().all(|q| g.pow(order / q).value() != 1))
            .expect("F_p^* is cyclic")
    }

    /// Some `r` with `r^2 = t`, if `t` is a square.
    pub fn sqrt(&self, t: Scalar) -> Option<Scalar> {
        self.elements().find(|r| *r * *r == t)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            out.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 3, 4, 9, 15, 503, 1000] {
            assert!(PrimeContext::new(p).is_err(), "{p}");
        }
        assert!(PrimeContext::new(5).is_ok());
        assert!(PrimeContext::new(499).is_ok());
    }

    #[test]
    fn legendre_examples() {
        let c = ctx(7);
        assert_eq!(c.legendre(c.scalar(1)), 1);
        assert_eq!(c.legendre(c.scalar(0)), 0);
        // squares mod 7 are {1, 2, 4}
        let squares: Vec<u32> = (1..7u32).map(|t| t * t % 7).collect();
        assert!(!squares.contains(&3));
        assert_eq!(c.legendre(c.scalar(3)), -1);
    }

    #[test]
    fn legendre_table_invariants() {
        for p in [5, 7, 11, 13, 97, 499] {
            let c = ctx(p);
            assert_eq!(c.legendre(c.zero()), 0);
            for t in c.units() {
                assert_eq!(c.legendre(t * t), 1);
            }
            let plus = c.legendre_table().iter().filter(|&&s| s == 1).count();
            assert_eq!(plus as u32, (p - 1) / 2);
            assert_eq!((c.half() + c.half()).value(), 1);
        }
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in [5u32, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            let c = ctx(p);
            for s in c.units() {
                for t in c.units() {
                    assert_eq!(c.legendre(s * t), c.legendre(s) * c.legendre(t));
                }
            }
        }
    }

    #[test]
    fn psi_is_a_character() {
        for p in [5, 7, 13, 101] {
            let c = ctx(p);
            assert_eq!(c.psi(c.zero()), Complex64::new(1.0, 0.0));
            for s in c.elements() {
                assert!((c.psi(s) * c.psi(-s) - 1.0).norm() < 1e-12);
                for t in c.elements() {
                    assert!((c.psi(s) * c.psi(t) - c.psi(s + t)).norm() < 1e-12);
                }
            }
            let total: Complex64 = c.elements().map(|t| c.additive_character(t)).sum();
            assert!(total.norm() < 1e-10);
        }
    }

    #[test]
    fn normalizer_modulus_and_scaling() {
        let c = ctx(5);
        let a = c.big_cell_normalizer(c.scalar(2)).unwrap();
        assert!((a.norm() - 5f64.powf(-0.5)).abs() < 1e-10);
        assert_eq!(c.big_cell_normalizer(c.zero()), Err(Error::ZeroParameter));

        let c = ctx(7);
        let a1 = c.big_cell_normalizer(c.scalar(1)).unwrap();
        let a3 = c.big_cell_normalizer(c.scalar(3)).unwrap();
        assert!((a3 - a1 * f64::from(c.legendre(c.scalar(3)))).norm() < 1e-12);

        for p in [5, 7, 11, 97, 499] {
            let c = ctx(p);
            for b in c.units() {
                let a = c.big_cell_normalizer(b).unwrap();
                assert!((a.norm_sqr() - 1.0 / f64::from(p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scalar_arithmetic() {
        let a = Scalar::new(-3, 7);
        assert_eq!(a.value(), 4);
        assert_eq!((a + Scalar::new(5, 7)).value(), 2);
        assert_eq!((a - Scalar::new(5, 7)).value(), 6);
        assert_eq!((a * Scalar::new(5, 7)).value(), 6);
        assert_eq!((-a).value(), 3);
        assert_eq!(a.inv().unwrap().value(), 2);
        assert!(Scalar::zero(7).inv().is_none());
        assert_eq!(Scalar::new(6, 7).centered(), -1);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(ctx(7).primitive_root().value(), 3);
        assert_eq!(ctx(11).primitive_root().value(), 2);
        assert_eq!(ctx(13).primitive_root().value(), 2);
        let c = ctx(11);
        assert_eq!(c.sqrt(c.scalar(5)).map(|r| (r * r).value()), Some(5));
        assert!(c.sqrt(c.scalar(2)).is_none());
    }
}
