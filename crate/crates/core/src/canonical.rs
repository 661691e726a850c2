//! Canonical Hilbert space: induced models of the Heisenberg representation
//! attached to oriented Lagrangian lines, the normalized intertwiners
//! between them, and the Weil representation obtained by transporting
//! functions along the symplectic action.
//!
//! A vector of the model attached to `L` is a function `f` on `H` with
//! `f(z h) = psi(lambda_z) f(h)` for `z` in the preimage of `L`. It is
//! stored by its values on a transversal `{(t m, 0)}` with `m` off `L`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Scalar};
use crate::group::{symplectic_form, HeisenbergElement, PlaneVector, SL2Element};
use crate::report::IdentityReport;
use crate::weil::{rho_operator, ComplexMatrix};

/// A Lagrangian line together with an orientation
/// `rho_L(t l0) = sign sigma(t)` relative to its normalized basepoint `l0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedLagrangian {
    direction: PlaneVector,
    sign: i32,
}

impl OrientedLagrangian {
    /// Normalizes `direction` so that its first nonzero coordinate is 1,
    /// keeping the orientation function unchanged.
    pub fn new(ctx: &PrimeContext, direction: PlaneVector, sign: i32) -> Result<Self> {
        let lead = if direction.lambda.is_zero() {
            direction.mu
        } else {
            direction.lambda
        };
        let inv = lead.inv().ok_or(Error::ZeroParameter)?;
        let sign = if sign >= 0 { 1 } else { -1 };
        // rho(l) = sign sigma(1) at the old basepoint, and the new basepoint
        // is inv * old, so the stored sign picks up sigma(inv)
        Ok(Self {
            direction: direction.scale(inv),
            sign: sign * ctx.legendre(inv),
        })
    }

    /// The vertical line `span(0, 1)` with positive orientation.
    pub fn vertical(p: u32) -> Self {
        Self {
            direction: PlaneVector::from_ints(0, 1, p),
            sign: 1,
        }
    }

    pub fn horizontal(p: u32) -> Self {
        Self {
            direction: PlaneVector::from_ints(1, 0, p),
            sign: 1,
        }
    }

    pub fn direction(&self) -> PlaneVector {
        self.direction
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn opposite(&self) -> Self {
        Self {
            direction: self.direction,
            sign: -self.sign,
        }
    }

    pub fn same_line(&self, other: &Self) -> bool {
        self.direction == other.direction
    }

    pub fn contains(&self, v: &PlaneVector) -> bool {
        symplectic_form(&self.direction, v).is_zero()
    }

    /// `t` with `v = t l0`, if `v` lies on the line.
    pub fn coordinate(&self, v: &PlaneVector) -> Option<Scalar> {
        if !self.contains(v) {
            return None;
        }
        Some(if self.direction.lambda.is_zero() {
            v.mu
        } else {
            v.lambda
        })
    }

    pub fn point(&self, t: Scalar) -> PlaneVector {
        self.direction.scale(t)
    }

    /// `rho_L(v)`, with `rho_L(0) = 0`. Points off the line also give 0.
    pub fn orientation(&self, ctx: &PrimeContext, v: &PlaneVector) -> i32 {
        self.coordinate(v)
            .map_or(0, |t| self.sign * ctx.legendre(t))
    }

    /// Complement direction spanning the transversal: `(0, 1)` unless the
    /// line is vertical, then `(1, 0)`.
    pub fn transversal_direction(&self) -> PlaneVector {
        let p = self.direction.lambda.modulus();
        if self.direction.lambda.is_zero() {
            PlaneVector::from_ints(1, 0, p)
        } else {
            PlaneVector::from_ints(0, 1, p)
        }
    }

    pub fn transversal_element(&self, t: Scalar) -> HeisenbergElement {
        HeisenbergElement::section(self.transversal_direction().scale(t))
    }

    /// `g L` with orientation `l -> rho_L(g^{-1} l)`.
    pub fn transform(&self, ctx: &PrimeContext, g: &SL2Element) -> Self {
        let image = g.apply(&self.direction);
        // rho_{gL}(g l0) = rho_L(l0) = sign
        Self::new(ctx, image, self.sign).expect("g is invertible")
    }
}

/// All `2 (p + 1)` oriented Lagrangians: directions `(1, k)` for each `k`,
/// then `(0, 1)`, each with sign `+1` then `-1`.
pub fn enumerate_oriented_lagrangians(ctx: &PrimeContext) -> Vec<OrientedLagrangian> {
    let p = ctx.p();
    let directions = ctx
        .elements()
        .map(|k| PlaneVector::new(ctx.one(), k))
        .chain(std::iter::once(PlaneVector::from_ints(0, 1, p)));
    directions
        .flat_map(|d| {
            [1, -1].map(|sign| OrientedLagrangian { direction: d, sign })
        })
        .collect()
}

/// Writes `h = z r` with `z` over `L` and `r = (t m, 0)` on the
/// transversal; returns `(psi(lambda_z), t)`.
pub fn coset_reduce(
    ctx: &PrimeContext,
    lagrangian: &OrientedLagrangian,
    h: &HeisenbergElement,
) -> (Complex64, usize) {
    let d = lagrangian.direction;
    let m = lagrangian.transversal_direction();
    let dm_inv = symplectic_form(&d, &m).inv().expect("m is off the line");
    let s = symplectic_form(&h.v, &m) * dm_inv;
    let t = symplectic_form(&d, &h.v) * dm_inv;
    let central = h.z - ctx.half() * symplectic_form(&d.scale(s), &m.scale(t));
    (ctx.psi(central), t.index())
}

/// A vector of the induced model of `lagrangian`, by transversal values.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalVector {
    pub lagrangian: OrientedLagrangian,
    pub values: Vec<Complex64>,
}

impl CanonicalVector {
    pub fn new(lagrangian: OrientedLagrangian, values: Vec<Complex64>) -> Self {
        Self { lagrangian, values }
    }

    /// The value at an arbitrary element of `H`.
    pub fn evaluate(&self, ctx: &PrimeContext, h: &HeisenbergElement) -> Complex64 {
        let (phase, t) = coset_reduce(ctx, &self.lagrangian, h);
        phase * self.values[t]
    }

    pub fn apply(&self, op: &ComplexMatrix, target: OrientedLagrangian) -> Self {
        let values = (0..op.dim())
            .map(|i| op.row(i).iter().zip(&self.values).map(|(a, b)| a * b).sum())
            .collect();
        Self::new(target, values)
    }
}

/// Right translation `f -> f(. h)` on transversal coordinates.
pub fn heisenberg_action(
    ctx: &PrimeContext,
    lagrangian: &OrientedLagrangian,
    h: &HeisenbergElement,
) -> ComplexMatrix {
    let n = ctx.p() as usize;
    let mut m = ComplexMatrix::zeros(n);
    for t in ctx.elements() {
        let r = lagrangian.transversal_element(t) * *h;
        let (phase, u) = coset_reduce(ctx, lagrangian, &r);
        m[(t.index(), u)] += phase;
    }
    m
}

/// The unnormalized averaging operator `f -> sum_{l in L2} f(s(l) h)`
/// from the model of `from` to the model of `to`.
pub fn averaging_operator(
    ctx: &PrimeContext,
    from: &OrientedLagrangian,
    to: &OrientedLagrangian,
) -> ComplexMatrix {
    let n = ctx.p() as usize;
    let mut m = ComplexMatrix::zeros(n);
    for t in ctx.elements() {
        let r = to.transversal_element(t);
        for s in ctx.elements() {
            let h = HeisenbergElement::section(to.point(s)) * r;
            let (phase, u) = coset_reduce(ctx, from, &h);
            m[(t.index(), u)] += phase;
        }
    }
    m
}

/// `a_{L1,L2} = (1/p) sum_{l in L1} psi(omega(l, xi)/2) rho_1(l) rho_2(xi)`
/// for a nonzero `xi` on `L2`.
pub fn intertwiner_normalization(
    ctx: &PrimeContext,
    from: &OrientedLagrangian,
    to: &OrientedLagrangian,
    xi: &PlaneVector,
) -> Result<Complex64> {
    if from.same_line(to) {
        return Err(Error::NotGeneralPosition);
    }
    if xi.is_zero() || !to.contains(xi) {
        return Err(Error::ZeroParameter);
    }
    let sum: Complex64 = ctx
        .units()
        .map(|s| {
            let l = from.point(s);
            ctx.psi(ctx.half() * symplectic_form(&l, xi)) * f64::from(from.orientation(ctx, &l))
        })
        .sum();
    Ok(sum * f64::from(to.orientation(ctx, xi)) / f64::from(ctx.p()))
}

/// The canonical intertwiner `theta_{from -> to}`: `+-I` on a common line
/// according to orientation, else the normalized averaging operator.
pub fn intertwiner(ctx: &PrimeContext, from: &OrientedLagrangian, to: &OrientedLagrangian) -> ComplexMatrix {
    let n = ctx.p() as usize;
    if from.same_line(to) {
        let s = if from.sign == to.sign { 1.0 } else { -1.0 };
        return ComplexMatrix::identity(n).scale(Complex64::new(s, 0.0));
    }
    let a = intertwiner_normalization(ctx, from, to, &to.direction).expect("distinct lines");
    averaging_operator(ctx, from, to).scale(a)
}

/// The unique `l3` on `l3_line` with `l2 + l3` on `l1_line`.
fn graph_map(
    l1_line: &OrientedLagrangian,
    l3_line: &OrientedLagrangian,
    l2: &PlaneVector,
) -> PlaneVector {
    // omega(d1, l2 + s d3) = 0
    let d1 = l1_line.direction;
    let d3 = l3_line.direction;
    let s = -symplectic_form(&d1, l2) * symplectic_form(&d1, &d3).inv().expect("distinct lines");
    d3.scale(s)
}

/// The constants with `theta~_{23} theta~_{12} = C theta~_{13}` and
/// `a_{23} a_{12} = D a_{13}`:
/// `C = sum_{l2} psi(omega(l2, r(l2))/2)`,
/// `D = (1/p) sum_{l2} psi(-omega(l2, r(xi))/2) rho_2(l2) rho_2(xi)`,
/// where `r(l2)` is the point of `L3` with `l2 + r(l2)` on `L1`.
pub fn cocycle_constants(
    ctx: &PrimeContext,
    l1: &OrientedLagrangian,
    l2: &OrientedLagrangian,
    l3: &OrientedLagrangian,
) -> Result<(Complex64, Complex64)> {
    if l1.same_line(l2) || l2.same_line(l3) || l1.same_line(l3) {
        return Err(Error::NotGeneralPosition);
    }
    let xi = l2.direction;
    let r_xi = graph_map(l1, l3, &xi);
    let mut c = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for s in ctx.elements() {
        let v = l2.point(s);
        c += ctx.psi(ctx.half() * symplectic_form(&v, &graph_map(l1, l3, &v)));
        let orient = l2.orientation(ctx, &v) * l2.orientation(ctx, &xi);
        d += ctx.psi(-(ctx.half() * symplectic_form(&v, &r_xi))) * f64::from(orient);
    }
    Ok((c, d / f64::from(ctx.p())))
}

/// The isomorphism `f -> f^g`, `f^g(h) = f(g^{-1} h)`, from the model of `L`
/// to the model of `g L`.
pub fn transport_operator(ctx: &PrimeContext, lagrangian: &OrientedLagrangian, g: &SL2Element) -> ComplexMatrix {
    let image = lagrangian.transform(ctx, g);
    let gi = g.inverse();
    let n = ctx.p() as usize;
    let mut m = ComplexMatrix::zeros(n);
    for t in ctx.elements() {
        let h = image.transversal_element(t).transform(&gi);
        let (phase, u) = coset_reduce(ctx, lagrangian, &h);
        m[(t.index(), u)] += phase;
    }
    m
}

/// `rho(g) f = theta_{g V2 -> V2}(f^g)` on the model of the positively
/// oriented vertical line, whose transversal coordinates are functions on
/// the horizontal line.
pub fn canonical_weil_operator(ctx: &PrimeContext, g: &SL2Element) -> ComplexMatrix {
    let v2 = OrientedLagrangian::vertical(ctx.p());
    let moved = v2.transform(ctx, g);
    &intertwiner(ctx, &moved, &v2) * &transport_operator(ctx, &v2, g)
}

/// Sweeps `theta_{2->3} theta_{1->2} = theta_{1->3}` over every ordered
/// triple of oriented Lagrangians.
pub fn check_associativity(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let lags = enumerate_oriented_lagrangians(ctx);
    let n = lags.len();
    let thetas: Vec<ComplexMatrix> = (0..n * n)
        .into_par_iter()
        .map(|k| intertwiner(ctx, &lags[k / n], &lags[k % n]))
        .collect();
    let parts: Vec<IdentityReport> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut part = IdentityReport::new("associativity", ctx.p(), tolerance);
            for j in 0..n {
                for k in 0..n {
                    let composed = &thetas[j * n + k] * &thetas[i * n + j];
                    let dev = composed.max_abs_diff(&thetas[i * n + k]);
                    part.record(dev, || format!("{:?} {:?} {:?}", lags[i], lags[j], lags[k]));
                }
            }
            part
        })
        .collect();
    let mut report = IdentityReport::new("associativity", ctx.p(), tolerance);
    parts.into_iter().for_each(|r| report.merge(r));
    report
}

/// Sweeps `theta_{2->1} theta_{1->2} = I` and, for the opposite
/// orientation on the first line, `-I`.
pub fn check_inverse_pairs(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let lags = enumerate_oriented_lagrangians(ctx);
    let id = ComplexMatrix::identity(ctx.p() as usize);
    let minus = id.scale(Complex64::new(-1.0, 0.0));
    let mut report = IdentityReport::new("intertwiner-inverse", ctx.p(), tolerance);
    for a in &lags {
        for b in &lags {
            let forward = intertwiner(ctx, a, b);
            let back = &intertwiner(ctx, b, a) * &forward;
            report.record(back.max_abs_diff(&id), || format!("{a:?} {b:?}"));
            let flipped = &intertwiner(ctx, b, &a.opposite()) * &forward;
            report.record(flipped.max_abs_diff(&minus), || format!("{a:?} {b:?} opposite"));
        }
    }
    report
}

/// Sweeps `C D = 1` and `|C|^2 = p` over all general-position triples.
pub fn check_cocycle_constants(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let lags = enumerate_oriented_lagrangians(ctx);
    let mut report = IdentityReport::new("cocycle-constants", ctx.p(), tolerance);
    let p = f64::from(ctx.p());
    for a in &lags {
        for b in &lags {
            for c in &lags {
                if let Ok((cc, dd)) = cocycle_constants(ctx, a, b, c) {
                    report.record((cc * dd - 1.0).norm(), || format!("CD {a:?} {b:?} {c:?}"));
                    report.record((cc.norm_sqr() - p).abs(), || format!("|C|^2 {a:?} {b:?} {c:?}"));
                }
            }
        }
    }
    report
}

/// Sweeps `theta_{1->2} pi_1(h) = pi_2(h) theta_{1->2}` over all pairs and
/// the generators `s(1,0)`, `s(0,1)`, `(0, 1)` of `H`.
pub fn check_intertwining(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let p = ctx.p();
    let generators = [
        HeisenbergElement::section(PlaneVector::from_ints(1, 0, p)),
        HeisenbergElement::section(PlaneVector::from_ints(0, 1, p)),
        HeisenbergElement::central(ctx.one()),
    ];
    let lags = enumerate_oriented_lagrangians(ctx);
    let mut report = IdentityReport::new("intertwining", p, tolerance);
    for a in &lags {
        for b in &lags {
            let theta = intertwiner(ctx, a, b);
            for h in &generators {
                let lhs = &theta * &heisenberg_action(ctx, a, h);
                let rhs = &heisenberg_action(ctx, b, h) * &theta;
                report.record(lhs.max_abs_diff(&rhs), || format!("{a:?} {b:?} {h:?}"));
            }
        }
    }
    report
}

/// Sweeps the square `transport_{L2} theta_{1->2} = theta_{g1->g2} transport_{L1}`.
pub fn check_equivariance(ctx: &PrimeContext, elements: &[SL2Element], tolerance: f64) -> IdentityReport {
    let lags = enumerate_oriented_lagrangians(ctx);
    let mut report = IdentityReport::new("equivariance", ctx.p(), tolerance);
    for g in elements {
        for a in &lags {
            for b in &lags {
                let lhs = &transport_operator(ctx, b, g) * &intertwiner(ctx, a, b);
                let ga = a.transform(ctx, g);
                let gb = b.transform(ctx, g);
                let rhs = &intertwiner(ctx, &ga, &gb) * &transport_operator(ctx, a, g);
                report.record(lhs.max_abs_diff(&rhs), || format!("g={g:?} {a:?} {b:?}"));
            }
        }
    }
    report
}

/// Sweeps `rho(g1) rho(g2) = rho(g1 g2)` for the canonical construction.
pub fn check_canonical_homomorphism(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let group = SL2Element::enumerate(ctx);
    let ops: std::collections::HashMap<SL2Element, ComplexMatrix> = group
        .par_iter()
        .map(|g| (*g, canonical_weil_operator(ctx, g)))
        .collect();
    let parts: Vec<IdentityReport> = group
        .par_iter()
        .map(|g1| {
            let mut part = IdentityReport::new("canonical-homomorphism", ctx.p(), tolerance);
            for g2 in &group {
                let dev = (&ops[g1] * &ops[g2]).max_abs_diff(&ops[&(*g1 * *g2)]);
                part.record(dev, || format!("g1={g1:?} g2={g2:?}"));
            }
            part
        })
        .collect();
    let mut report = IdentityReport::new("canonical-homomorphism", ctx.p(), tolerance);
    parts.into_iter().for_each(|r| report.merge(r));
    report
}

/// Measured constant `c` with `canonical rho(g) = c rho(g)` from the kernel
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionalityReport {
    pub constant: Complex64,
    /// Largest `|canonical(g) - c_g kernel(g)|` using each `g`'s own ratio.
    pub max_deviation: f64,
    /// Largest `|c_g - c|` across the group.
    pub constant_spread: f64,
    pub checked: usize,
}

impl ProportionalityReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.checked > 0
            && self.max_deviation < tolerance
            && self.constant_spread < tolerance
            && (self.constant.norm() - 1.0).abs() < tolerance
    }
}

pub fn compare_with_kernel(ctx: &PrimeContext) -> ProportionalityReport {
    let group = SL2Element::enumerate(ctx);
    let per_element: Vec<(Complex64, f64)> = group
        .par_iter()
        .map(|g| {
            let canon = canonical_weil_operator(ctx, g);
            let kernel = rho_operator(ctx, g);
            let (idx, _) = kernel
                .entries()
                .iter()
                .enumerate()
                .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
            let c = canon.entries()[idx] / kernel.entries()[idx];
            (c, canon.max_abs_diff(&kernel.scale(c)))
        })
        .collect();
    let constant = per_element[0].0;
    ProportionalityReport {
        constant,
        max_deviation: per_element.iter().map(|x| x.1).fold(0.0, f64::max),
        constant_spread: per_element.iter().map(|x| (x.0 - constant).norm()).fold(0.0, f64::max),
        checked: per_element.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil::pi_operator;

    fn ctx(p: u32) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn counts_and_signs() {
        assert_eq!(enumerate_oriented_lagrangians(&ctx(5)).len(), 12);
        let lags = enumerate_oriented_lagrangians(&ctx(7));
        assert_eq!(lags.len(), 16);
        for l in &lags {
            assert!(lags.contains(&l.opposite()));
        }
        let set: std::collections::HashSet<_> = lags.iter().collect();
        assert_eq!(set.len(), 16);
    }

    #[test]
    fn orientation_is_equivariant() {
        let c = ctx(7);
        for l in enumerate_oriented_lagrangians(&c) {
            assert_eq!(l.orientation(&c, &PlaneVector::zero(7)), 0);
            for s in c.units() {
                for t in c.units() {
                    let v = l.point(s);
                    assert_eq!(l.orientation(&c, &v.scale(t)), c.legendre(t) * l.orientation(&c, &v));
                }
            }
        }
    }

    #[test]
    fn normalization_keeps_orientation() {
        let c = ctx(7);
        let raw = PlaneVector::from_ints(3, 6, 7);
        let l = OrientedLagrangian::new(&c, raw, 1).unwrap();
        assert_eq!(l.direction(), PlaneVector::from_ints(1, 2, 7));
        assert_eq!(l.orientation(&c, &raw), 1);
        assert!(OrientedLagrangian::new(&c, PlaneVector::zero(7), 1).is_err());
    }

    #[test]
    fn coset_reduce_examples() {
        let c = ctx(5);
        for l in enumerate_oriented_lagrangians(&c) {
            for t in c.elements() {
                let r = l.transversal_element(t);
                let (phase, idx) = coset_reduce(&c, &l, &r);
                assert!((phase - 1.0).norm() < 1e-15);
                assert_eq!(idx, t.index());
                for z in c.elements() {
                    let h = HeisenbergElement::central(z) * r;
                    let (phase, idx) = coset_reduce(&c, &l, &h);
                    assert!((phase - c.psi(z)).norm() < 1e-15);
                    assert_eq!(idx, t.index());
                }
            }
        }
    }

    #[test]
    fn coset_reduction_is_consistent_on_all_of_h() {
        // f(z h) = psi(z) f(h) for every z over L and every h
        let c = ctx(5);
        for l in enumerate_oriented_lagrangians(&c) {
            let f = CanonicalVector::new(
                l,
                (0..5).map(|k| Complex64::new(k as f64 + 0.5, 1.0 - k as f64)).collect(),
            );
            for h in HeisenbergElement::all(5) {
                for s in c.elements() {
                    for lam in c.elements() {
                        let z = HeisenbergElement::new(l.point(s), lam);
                        let lhs = f.evaluate(&c, &(z * h));
                        assert!((lhs - c.psi(lam) * f.evaluate(&c, &h)).norm() < 1e-12);
                    }
                }
            }
            let rebuilt: Vec<Complex64> = c
                .elements()
                .map(|t| f.evaluate(&c, &l.transversal_element(t)))
                .collect();
            assert_eq!(rebuilt, f.values);
        }
    }

    #[test]
    fn vertical_model_is_the_schrodinger_model() {
        let c = ctx(7);
        let v2 = OrientedLagrangian::vertical(7);
        for h in HeisenbergElement::all(7).step_by(5) {
            assert!(heisenberg_action(&c, &v2, &h).approx_eq(&pi_operator(&c, &h), 1e-12));
        }
    }

    #[test]
    fn intertwiner_examples() {
        let c = ctx(5);
        let lags = enumerate_oriented_lagrangians(&c);
        for l in &lags {
            assert!(intertwiner(&c, l, l).approx_eq(&ComplexMatrix::identity(5), 1e-15));
        }
        assert!(check_inverse_pairs(&c, 1e-9).passed());
        for a in &lags {
            for b in lags.iter().filter(|b| !b.same_line(a)) {
                let first = intertwiner_normalization(&c, a, b, &b.direction()).unwrap();
                for s in c.units().skip(1) {
                    let other = intertwiner_normalization(&c, a, b, &b.point(s)).unwrap();
                    assert!((first - other).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let c = ctx(5);
        let rep = check_cocycle_constants(&c, 1e-8);
        assert!(rep.passed(), "{rep}");
        // 6 lines, ordered distinct triples, 8 orientation choices, 2 checks each
        assert_eq!(rep.checked, 6 * 5 * 4 * 8 * 2);
        let lags = enumerate_oriented_lagrangians(&c);
        assert_eq!(
            cocycle_constants(&c, &lags[0], &lags[1], &lags[2]),
            Err(Error::NotGeneralPosition)
        );
    }

    #[test]
    fn averaging_operators_compose_by_c() {
        let c = ctx(7);
        let lags = enumerate_oriented_lagrangians(&c);
        let (l1, l2, l3) = (lags[0], lags[4], lags[14]);
        let (cc, dd) = cocycle_constants(&c, &l1, &l2, &l3).unwrap();
        let lhs = &averaging_operator(&c, &l2, &l3) * &averaging_operator(&c, &l1, &l2);
        assert!(lhs.approx_eq(&averaging_operator(&c, &l1, &l3).scale(cc), 1e-9));
        let a = |x, y| intertwiner_normalization(&c, x, y, &y.direction()).unwrap();
        assert!((a(&l2, &l3) * a(&l1, &l2) - dd * a(&l1, &l3)).norm() < 1e-12);
    }

    #[test]
    fn small_sweeps() {
        let c = ctx(5);
        assert!(check_associativity(&c, 1e-8).passed());
        assert!(check_intertwining(&c, 1e-9).passed());
        let some: Vec<SL2Element> = SL2Element::enumerate(&c).into_iter().step_by(7).collect();
        assert!(check_equivariance(&c, &some, 1e-9).passed());
    }

    #[test]
    fn canonical_identity() {
        let c = ctx(5);
        let op = canonical_weil_operator(&c, &SL2Element::identity(5));
        assert!(op.approx_eq(&ComplexMatrix::identity(5), 1e-15));
    }

    #[test]
    fn canonical_matches_kernel() {
        let c = ctx(5);
        let rep = compare_with_kernel(&c);
        assert!(rep.passed(1e-8), "{rep:?}");
        assert!((rep.constant - 1.0).norm() < 1e-8);
        assert!(check_canonical_homomorphism(&c, 1e-8).passed());
    }
}
