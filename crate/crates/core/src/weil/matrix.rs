use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) < tol
    }

    /// Deviation of `self self^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `self other - other self`, as its largest entry.
    pub fn commutator_defect(&self, other: &Self) -> f64 {
        (self * other).max_abs_diff(&(other * self))
    }

    /// Spectral radius of a Hermitian matrix.
    pub fn hermitian_spectral_radius(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        m.symmetric_eigenvalues()
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let row = &mut out.entries[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&rhs.entries[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, Complex64::new(1.0, 0.0));
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, Complex64::new(-1.0, 0.0));
        out
    }
}

/// A matrix with exactly one nonzero entry per row: row `x` holds
/// `phase[x]` in column `column[x]`. Heisenberg operators and the
/// lower-triangular Weil operators have this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMatrix {
    pub column: Vec<usize>,
    pub phase: Vec<Complex64>,
}

impl MonomialMatrix {
    pub fn dim(&self) -> usize {
        self.column.len()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (x, (&y, &z)) in self.column.iter().zip(&self.phase).enumerate() {
            m[(x, y)] = z;
        }
        m
    }

    /// `dense * self`.
    pub fn right_mul(&self, dense: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        for x in 0..n {
            for z in 0..n {
                out[(x, self.column[z])] = dense[(x, z)] * self.phase[z];
            }
        }
        out
    }

    /// `self * dense`.
    pub fn left_mul(&self, dense: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |x, y| self.phase[x] * dense[(self.column[x], y)])
    }

    pub fn trace(&self) -> Complex64 {
        self.column
            .iter()
            .zip(&self.phase)
            .enumerate()
            .filter(|(x, (y, _))| x == *y)
            .map(|(_, (_, z))| *z)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |i, j| {
            Complex64::new((seed + i as f64 * 1.3 - j as f64).sin(), (seed * j as f64 + i as f64).cos())
        })
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample(5, 0.7);
        let i = ComplexMatrix::identity(5);
        assert!((&a * &i).approx_eq(&a, 1e-15));
        assert!((&i * &a).approx_eq(&a, 1e-15));
        assert_eq!(i.trace(), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn monomial_products_match_dense() {
        let m = MonomialMatrix {
            column: vec![2, 0, 3, 1],
            phase: (0..4).map(|k| Complex64::from_polar(1.0, k as f64)).collect(),
        };
        let d = sample(4, 0.3);
        let md = m.to_dense();
        assert!(m.right_mul(&d).approx_eq(&(&d * &md), 1e-14));
        assert!(m.left_mul(&d).approx_eq(&(&md * &d), 1e-14));
        assert!((m.trace() - md.trace()).norm() < 1e-15);
    }

    #[test]
    fn adjoint_and_spectral_radius() {
        let a = sample(6, 1.1);
        let h = &a + &a.adjoint();
        assert!(h.hermitian_defect() < 1e-14);
        let d = ComplexMatrix::from_fn(3, |i, j| {
            if i == j {
                Complex64::new([-3.0, 1.0, 2.0][i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!((d.hermitian_spectral_radius() - 3.0).abs() < 1e-12);
    }
}
