//! The Heisenberg representation `pi` and the Weil representation `rho` on
//! functions on F_p, realized as explicit `p x p` matrices, together with
//! the trace function `F(B, xi) = Tr(rho(B) pi(xi))` and its closed forms.

pub mod kernel;
pub mod matrix;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Scalar};
use crate::group::{symplectic_form, HeisenbergElement, PlaneVector, SL2Element};
use crate::report::{IdentityReport, Sampling};

pub use kernel::{jacobi_kernel_entry, pi_kernel, rho_kernel, Kernel, KernelPhase, Support};
pub use matrix::{ComplexMatrix, MonomialMatrix};

pub const DEFAULT_MATRIX_TOLERANCE: f64 = 1e-8;

/// Absolute tolerance for traces, `1e-6 sqrt(p)`.
pub fn trace_tolerance(ctx: &PrimeContext) -> f64 {
    1e-6 * f64::from(ctx.p()).sqrt()
}

pub fn rho_operator(ctx: &PrimeContext, g: &SL2Element) -> ComplexMatrix {
    let k = rho_kernel(ctx, g);
    let xs: Vec<Scalar> = ctx.elements().collect();
    ComplexMatrix::from_fn(xs.len(), |i, j| k.entry(ctx, xs[i], xs[j]))
}

/// `pi(h)` in monomial form; row `x` has its entry in column `x + q'`.
pub fn pi_monomial(ctx: &PrimeContext, h: &HeisenbergElement) -> MonomialMatrix {
    let k = pi_kernel(ctx, h);
    let (column, phase) = ctx
        .elements()
        .map(|x| {
            let y = x + h.position();
            (y.index(), ctx.psi(k.phase.evaluate(x, y)))
        })
        .unzip();
    MonomialMatrix { column, phase }
}

pub fn pi_operator(ctx: &PrimeContext, h: &HeisenbergElement) -> ComplexMatrix {
    pi_monomial(ctx, h).to_dense()
}

/// `pi(s(xi))` for a symbol `xi` in `V`.
pub fn pi_of_vector(ctx: &PrimeContext, xi: &PlaneVector) -> ComplexMatrix {
    pi_operator(ctx, &HeisenbergElement::section(*xi))
}

/// `F(B, xi) = Tr(rho(B) pi(s(xi)))`, summed along the support line of
/// `pi(s(xi))` in `O(p)`.
pub fn trace_f(ctx: &PrimeContext, b: &SL2Element, xi: &PlaneVector) -> Complex64 {
    let kr = rho_kernel(ctx, b);
    let kp = pi_kernel(ctx, &HeisenbergElement::section(*xi));
    let q = xi.lambda;
    ctx.elements()
        .map(|y| {
            let x = y + q;
            kr.entry(ctx, x, y) * kp.entry(ctx, y, x)
        })
        .sum()
}

/// `sigma(a) psi((a + 1)/(a - 1) lambda mu / 2)`, the value of `F` at
/// `(diag(a, 1/a), (lambda, mu))`.
pub fn torus_closed_form(
    ctx: &PrimeContext,
    a: Scalar,
    lambda: Scalar,
    mu: Scalar,
) -> Result<Complex64> {
    let shift = (a - ctx.one()).inv().ok_or(Error::DegenerateTorusPoint)?;
    if a.is_zero() {
        return Err(Error::DegenerateTorusPoint);
    }
    let arg = ctx.half() * (a + ctx.one()) * shift * lambda * mu;
    Ok(ctx.psi(arg) * f64::from(ctx.legendre(a)))
}

/// `psi(omega(C v, v) / 4) sigma(tr g - 2)` with `C = (g + I)(g - I)^{-1}`,
/// valid whenever `g - I` is invertible.
pub fn invariant_closed_form(ctx: &PrimeContext, g: &SL2Element, v: &PlaneVector) -> Result<Complex64> {
    let one = ctx.one();
    let (a1, d1) = (g.a - one, g.d - one);
    let det = a1 * d1 - g.b * g.c;
    let di = det.inv().ok_or(Error::SingularShift)?;
    // (g - I)^{-1} = adj(g - I) / det
    let inv = [[d1 * di, -g.b * di], [-g.c * di, a1 * di]];
    let plus = [[g.a + one, g.b], [g.c, g.d + one]];
    let cayley = |i: usize, j: usize| plus[i][0] * inv[0][j] + plus[i][1] * inv[1][j];
    let cv = PlaneVector::new(
        cayley(0, 0) * v.lambda + cayley(0, 1) * v.mu,
        cayley(1, 0) * v.lambda + cayley(1, 1) * v.mu,
    );
    let quarter = ctx.half() * ctx.half();
    let sign = ctx.legendre(g.trace() - ctx.scalar(2));
    Ok(ctx.psi(quarter * symplectic_form(&cv, v)) * f64::from(sign))
}

fn random_nonzero_vector(ctx: &PrimeContext, rng: &mut impl Rng) -> PlaneVector {
    loop {
        let v = PlaneVector::from_ints(
            rng.gen_range(0..i64::from(ctx.p())),
            rng.gen_range(0..i64::from(ctx.p())),
            ctx.p(),
        );
        if !v.is_zero() {
            return v;
        }
    }
}

/// Deviation of `rho(B) pi(s(xi)) = pi(s(B xi)) rho(B)`, the Egorov
/// identity multiplied through by `rho(B)`.
fn egorov_deviation(ctx: &PrimeContext, rho_b: &ComplexMatrix, b: &SL2Element, xi: &PlaneVector) -> f64 {
    let lhs = pi_monomial(ctx, &HeisenbergElement::section(*xi)).right_mul(rho_b);
    let rhs = pi_monomial(ctx, &HeisenbergElement::section(b.apply(xi))).left_mul(rho_b);
    lhs.max_abs_diff(&rhs)
}

/// Sweeps `rho(B) pi(s(xi)) rho(B)^{-1} = pi(s(B xi))` over all `B` and all
/// nonzero `xi`, or over random pairs.
pub fn check_egorov(ctx: &PrimeContext, sampling: Sampling, tolerance: f64) -> IdentityReport {
    let mut report = IdentityReport::new("egorov", ctx.p(), tolerance);
    match sampling {
        Sampling::Exhaustive => {
            let vectors: Vec<PlaneVector> = PlaneVector::nonzero(ctx.p()).collect();
            let parts: Vec<IdentityReport> = SL2Element::enumerate(ctx)
                .par_iter()
                .map(|b| {
                    let rho_b = rho_operator(ctx, b);
                    let mut part = IdentityReport::new("egorov", ctx.p(), tolerance);
                    for xi in &vectors {
                        part.record(egorov_deviation(ctx, &rho_b, b, xi), || format!("B={b:?} xi={xi:?}"));
                    }
                    part
                })
                .collect();
            parts.into_iter().for_each(|r| report.merge(r));
        }
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let b = SL2Element::random(ctx, &mut rng);
                let xi = random_nonzero_vector(ctx, &mut rng);
                let rho_b = rho_operator(ctx, &b);
                report.record(egorov_deviation(ctx, &rho_b, &b, &xi), || format!("B={b:?} xi={xi:?}"));
            }
        }
    }
    report
}

/// Sweeps `rho(g1) rho(g2) = rho(g1 g2)` with no projective correction.
pub fn check_homomorphism(ctx: &PrimeContext, sampling: Sampling, tolerance: f64) -> IdentityReport {
    let mut report = IdentityReport::new("homomorphism", ctx.p(), tolerance);
    match sampling {
        Sampling::Exhaustive => {
            let group = SL2Element::enumerate(ctx);
            let ops: std::collections::HashMap<SL2Element, ComplexMatrix> =
                group.par_iter().map(|g| (*g, rho_operator(ctx, g))).collect();
            let parts: Vec<IdentityReport> = group
                .par_iter()
                .map(|g1| {
                    let mut part = IdentityReport::new("homomorphism", ctx.p(), tolerance);
                    let r1 = &ops[g1];
                    for g2 in &group {
                        let dev = (r1 * &ops[g2]).max_abs_diff(&ops[&(*g1 * *g2)]);
                        part.record(dev, || format!("g1={g1:?} g2={g2:?}"));
                    }
                    part
                })
                .collect();
            parts.into_iter().for_each(|r| report.merge(r));
        }
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let g1 = SL2Element::random(ctx, &mut rng);
                let g2 = SL2Element::random(ctx, &mut rng);
                let dev = (&rho_operator(ctx, &g1) * &rho_operator(ctx, &g2))
                    .max_abs_diff(&rho_operator(ctx, &(g1 * g2)));
                report.record(dev, || format!("g1={g1:?} g2={g2:?}"));
            }
        }
    }
    report
}

/// Sweeps `rho(g) rho(g)^dagger = I`.
pub fn check_unitarity(ctx: &PrimeContext, sampling: Sampling, tolerance: f64) -> IdentityReport {
    let elements = match sampling {
        Sampling::Exhaustive => SL2Element::enumerate(ctx),
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| SL2Element::random(ctx, &mut rng)).collect()
        }
    };
    let parts: Vec<IdentityReport> = elements
        .par_iter()
        .map(|g| {
            let mut part = IdentityReport::new("unitarity", ctx.p(), tolerance);
            part.record(rho_operator(ctx, g).unitarity_defect(), || format!("g={g:?}"));
            part
        })
        .collect();
    let mut report = IdentityReport::new("unitarity", ctx.p(), tolerance);
    parts.into_iter().for_each(|r| report.merge(r));
    report
}

/// Compares `trace_f` at `(diag(a, 1/a), (lambda, mu))` with
/// [`torus_closed_form`] for every `a` outside `{0, 1}` and every vector.
pub fn check_torus_closed_form(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let scalars: Vec<Scalar> = ctx.units().filter(|a| a.value() != 1).collect();
    let parts: Vec<IdentityReport> = scalars
        .par_iter()
        .map(|&a| {
            let mut part = IdentityReport::new("torus-closed-form", ctx.p(), tolerance);
            let b = SL2Element::diagonal(a).expect("unit");
            for v in PlaneVector::all(ctx.p()) {
                let closed = torus_closed_form(ctx, a, v.lambda, v.mu).expect("a outside {0, 1}");
                part.record((trace_f(ctx, &b, &v) - closed).norm(), || format!("a={a} v={v:?}"));
            }
            part
        })
        .collect();
    let mut report = IdentityReport::new("torus-closed-form", ctx.p(), tolerance);
    parts.into_iter().for_each(|r| report.merge(r));
    report
}

/// Compares `trace_f(g, v)` with [`invariant_closed_form`] over pairs with
/// `g - I` invertible.
pub fn check_invariant_closed_form(ctx: &PrimeContext, sampling: Sampling, tolerance: f64) -> IdentityReport {
    let name = "invariant-closed-form";
    let mut report = IdentityReport::new(name, ctx.p(), tolerance);
    let compare = |report: &mut IdentityReport, g: &SL2Element, v: &PlaneVector| {
        if let Ok(closed) = invariant_closed_form(ctx, g, v) {
            report.record((trace_f(ctx, g, v) - closed).norm(), || format!("g={g:?} v={v:?}"));
        }
    };
    match sampling {
        Sampling::Exhaustive => {
            let vectors: Vec<PlaneVector> = PlaneVector::all(ctx.p()).collect();
            for g in SL2Element::enumerate(ctx) {
                for v in &vectors {
                    compare(&mut report, &g, v);
                }
            }
        }
        Sampling::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut taken = 0;
            while taken < count {
                let g = SL2Element::random(ctx, &mut rng);
                if g.trace() == ctx.scalar(2) {
                    continue;
                }
                let v = PlaneVector::from_ints(
                    rng.gen_range(0..i64::from(ctx.p())),
                    rng.gen_range(0..i64::from(ctx.p())),
                    ctx.p(),
                );
                compare(&mut report, &g, &v);
                taken += 1;
            }
        }
    }
    report
}

/// The two closed forms on the punctured diagonal torus.
pub fn check_closed_forms_agree(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let mut report = IdentityReport::new("closed-forms-agree", ctx.p(), tolerance);
    for a in ctx.units().filter(|a| a.value() != 1) {
        let b = SL2Element::diagonal(a).expect("unit");
        for v in PlaneVector::all(ctx.p()) {
            let torus = torus_closed_form(ctx, a, v.lambda, v.mu).expect("a outside {0, 1}");
            let inv = invariant_closed_form(ctx, &b, &v).expect("diag(a, 1/a) - I invertible");
            report.record((torus - inv).norm(), || format!("a={a} v={v:?}"));
        }
    }
    report
}


/// Result of [`heisenberg_relation_sign`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub sign: i32,
    pub report: IdentityReport,
}

/// Finds the `eps` in `{+1, -1}` with
/// `pi(s(u)) pi(s(v)) = psi(eps omega(u, v) / 2) pi(s(u + v))` for all `u, v`.
pub fn heisenberg_relation_sign(ctx: &PrimeContext, tolerance: f64) -> Result<SignReport> {
    let p = ctx.p();
    let vectors: Vec<PlaneVector> = PlaneVector::all(p).collect();
    let ops: Vec<ComplexMatrix> = vectors.iter().map(|v| pi_of_vector(ctx, v)).collect();
    for sign in [1i32, -1] {
        let mut report = IdentityReport::new("heisenberg-relation", p, tolerance);
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate() {
                let prod = &ops[i] * &ops[j];
                let phase = ctx.psi(ctx.scalar(i64::from(sign)) * ctx.half() * symplectic_form(u, v));
                let rhs = pi_of_vector(ctx, &u.add(v)).scale(phase);
                report.record(prod.max_abs_diff(&rhs), || format!("u={u:?} v={v:?}"));
            }
        }
        if report.passed() {
            return Ok(SignReport { sign, report });
        }
    }
    Err(Error::NoConsistentSign)
}
