//! Brute-force arithmetic over Z/p written without the library, used as an
//! independent reference.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn pow_mod(base: i64, mut e: i64, p: i64) -> i64 {
    let mut b = base.rem_euclid(p);
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: i64, p: i64) -> i64 {
    pow_mod(a, p - 2, p)
}

/// Euler's criterion.
pub fn legendre(a: i64, p: i64) -> f64 {
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0.0,
        1 => 1.0,
        _ => -1.0,
    }
}

pub fn psi(x: i64, p: i64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * x.rem_euclid(p) as f64 / p as f64)
}

pub fn half(p: i64) -> i64 {
    (p + 1) / 2
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn primes_in(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Smallest generator of (Z/p)^*.
pub fn primitive_root(p: i64) -> i64 {
    (2..p)
        .find(|&g| (1..p - 1).all(|k| (p - 1) % k != 0 || pow_mod(g, k, p) != 1))
        .expect("p prime")
}
