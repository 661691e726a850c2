//! Kernel descriptions of the Weil and Heisenberg operators on functions
//! on F_p. An operator with kernel `K` acts by `(K f)(x) = sum_y K(x, y) f(y)`.

use num_complex::Complex64;

use crate::field::{PrimeContext, Scalar};
use crate::group::{bruhat_classify, BruhatCell, HeisenbergElement, SL2Element};

/// Where a kernel is allowed to be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Plane,
    /// The affine line `y = slope * x + offset`.
    Line { slope: Scalar, offset: Scalar },
}

/// A phase `Q(x, y) = xx x^2 + xy x y + yy y^2 + x_lin x + constant`
/// restricted to a support set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelPhase {
    pub xx: Scalar,
    pub xy: Scalar,
    pub yy: Scalar,
    pub x_lin: Scalar,
    pub constant: Scalar,
    pub support: Support,
}

impl KernelPhase {
    pub fn evaluate(&self, x: Scalar, y: Scalar) -> Scalar {
        self.xx * x * x + self.xy * x * y + self.yy * y * y + self.x_lin * x + self.constant
    }

    pub fn supports(&self, x: Scalar, y: Scalar) -> bool {
        match self.support {
            Support::Plane => true,
            Support::Line { slope, offset } => y == slope * x + offset,
        }
    }
}

/// `coefficient * psi(phase(x, y))` on the support of `phase`, zero off it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub coefficient: Complex64,
    pub phase: KernelPhase,
}

impl Kernel {
    pub fn entry(&self, ctx: &PrimeContext, x: Scalar, y: Scalar) -> Complex64 {
        if self.phase.supports(x, y) {
            self.coefficient * ctx.psi(self.phase.evaluate(x, y))
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Kernel of `rho(g)` read off the opposite Bruhat decomposition.
///
/// Big cell (`b != 0`):
/// `a_g psi(-(d/b)/2 x^2 + (1/b - c + a d/b)/2 x y - (a/b)/2 y^2)`.
/// Lower triangular `(a, 0; r, 1/a)`: `sigma(a) psi(-(r/a)/2 x^2)` on `y = x/a`.
pub fn rho_kernel(ctx: &PrimeContext, g: &SL2Element) -> Kernel {
    let half = ctx.half();
    let zero = ctx.zero();
    match bruhat_classify(g) {
        BruhatCell::BigCell { a, b, c, d } => {
            let bi = b.inv().expect("big cell has b != 0");
            Kernel {
                coefficient: ctx.big_cell_normalizer(b).expect("b != 0"),
                phase: KernelPhase {
                    xx: -(bi * d) * half,
                    xy: (bi - c + a * bi * d) * half,
                    yy: -(a * bi) * half,
                    x_lin: zero,
                    constant: zero,
                    support: Support::Plane,
                },
            }
        }
        BruhatCell::LowerTriangular { a, r } => {
            let ai = a.inv().expect("diagonal entry of SL2 is a unit");
            Kernel {
                coefficient: Complex64::new(f64::from(ctx.legendre(a)), 0.0),
                phase: KernelPhase {
                    xx: -(r * ai) * half,
                    xy: zero,
                    yy: zero,
                    x_lin: zero,
                    constant: zero,
                    support: Support::Line {
                        slope: ai,
                        offset: zero,
                    },
                },
            }
        }
    }
}

/// Kernel of `pi(h)` for `h = (q', p', lambda)`:
/// `psi(p' q'/2 + p' x + lambda)` on `y = x + q'`.
pub fn pi_kernel(ctx: &PrimeContext, h: &HeisenbergElement) -> Kernel {
    let q = h.position();
    let mom = h.momentum();
    Kernel {
        coefficient: Complex64::new(1.0, 0.0),
        phase: KernelPhase {
            xx: ctx.zero(),
            xy: ctx.zero(),
            yy: ctx.zero(),
            x_lin: mom,
            constant: mom * q * ctx.half() + h.z,
            support: Support::Line {
                slope: ctx.one(),
                offset: q,
            },
        },
    }
}

/// Kernel of `rho(g) pi(h)`: since `pi(h)` is supported on `y = z + q'`,
/// `K(x, y) = K_rho(x, y - q') K_pi(y - q', y)`.
pub fn jacobi_kernel_entry(
    ctx: &PrimeContext,
    g: &SL2Element,
    h: &HeisenbergElement,
    x: Scalar,
    y: Scalar,
) -> Complex64 {
    let z = y - h.position();
    rho_kernel(ctx, g).entry(ctx, x, z) * pi_kernel(ctx, h).entry(ctx, z, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PlaneVector;

    #[test]
    fn weyl_kernel_phase_is_xy() {
        let ctx = PrimeContext::new(5).unwrap();
        let k = rho_kernel(&ctx, &SL2Element::weyl(5));
        for x in ctx.elements() {
            for y in ctx.elements() {
                assert_eq!(k.phase.evaluate(x, y), x * y);
                assert!((k.entry(&ctx, x, y).norm() - 5f64.powf(-0.5)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_kernel_support() {
        let ctx = PrimeContext::new(7).unwrap();
        let h = HeisenbergElement::new(PlaneVector::from_ints(2, 3, 7), ctx.scalar(1));
        let k = pi_kernel(&ctx, &h);
        for x in ctx.elements() {
            for y in ctx.elements() {
                let nonzero = k.entry(&ctx, x, y).norm() > 0.5;
                assert_eq!(nonzero, y == x + ctx.scalar(2));
            }
        }
    }
}
