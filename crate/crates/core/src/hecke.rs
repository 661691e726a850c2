//! Spectral decomposition of the Weil representation restricted to the
//! Hecke torus, and the twisted trace sums that control Hecke eigenstates.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::group::{
    hecke_torus, HeisenbergElement, IntegralSL2, LatticeVector, PlaneVector, TorusCharacter,
    TorusDescriptor,
};
use crate::weil::{pi_monomial, rho_operator, trace_f, ComplexMatrix};

pub const RATE_TOLERANCE: f64 = 1e-6;
const RANK_GUARD: f64 = 1e-6;

/// `P_chi = (1/|T|) sum_B conj(chi(B)) rho(B)`.
pub fn projector(ctx: &PrimeContext, torus: &TorusDescriptor, chi: &TorusCharacter) -> ComplexMatrix {
    let n = ctx.p() as usize;
    let mut acc = ComplexMatrix::zeros(n);
    for (j, b) in torus.elements.iter().enumerate() {
        acc.add_scaled(&rho_operator(ctx, b), chi.value_at_exponent(j).conj());
    }
    acc.scale(Complex64::new(1.0 / torus.order as f64, 0.0))
}

/// `Tr rho(g)`, read off the kernel diagonal.
pub fn rho_trace(ctx: &PrimeContext, g: &crate::group::SL2Element) -> Complex64 {
    trace_f(ctx, g, &PlaneVector::zero(ctx.p()))
}

/// `(chi index, dim H_chi)` for every character, from
/// `Tr P_chi = (1/|T|) sum_B conj(chi(B)) Tr rho(B)`.
pub fn eigenspace_dimensions(ctx: &PrimeContext, torus: &TorusDescriptor) -> Result<Vec<(usize, usize)>> {
    let traces: Vec<Complex64> = torus.elements.iter().map(|b| rho_trace(ctx, b)).collect();
    torus
        .characters()
        .map(|chi| {
            let tr: Complex64 = traces
                .iter()
                .enumerate()
                .map(|(j, t)| t * chi.value_at_exponent(j).conj())
                .sum::<Complex64>()
                / torus.order as f64;
            let rounded = tr.re.round();
            if (tr - rounded).norm() >= RANK_GUARD || rounded < 0.0 {
                return Err(Error::NonIntegralTrace(tr.re));
            }
            Ok((chi.index, rounded as usize))
        })
        .collect()
}

fn screen(torus: &TorusDescriptor, xi: &PlaneVector) -> Result<()> {
    if xi.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    if torus.is_eigenvector(xi) {
        return Err(Error::EigenvectorInput);
    }
    Ok(())
}

/// `sum_{B in T} F(B, xi) chi(B)`.
pub fn hecke_sum(
    ctx: &PrimeContext,
    torus: &TorusDescriptor,
    chi: &TorusCharacter,
    xi: &PlaneVector,
) -> Result<Complex64> {
    screen(torus, xi)?;
    Ok(torus
        .elements
        .iter()
        .enumerate()
        .map(|(j, b)| trace_f(ctx, b, xi) * chi.value_at_exponent(j))
        .sum())
}

/// [`hecke_sum`] for every character at once: the trace values are
/// computed once and transformed over the cyclic group.
pub fn hecke_sums(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector) -> Result<Vec<Complex64>> {
    screen(torus, xi)?;
    let values: Vec<Complex64> = torus.elements.iter().map(|b| trace_f(ctx, b, xi)).collect();
    Ok(cyclic_transform(&values))
}

/// `out[k] = sum_j values[j] exp(2 pi i j k / n)`.
pub(crate) fn cyclic_transform(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * roots[(j * k) % n])
                .sum()
        })
        .collect()
}

/// `<Psi | pi(xi) Psi> = Tr(P_chi pi(s(xi)))` for the unit eigenstate of a
/// one-dimensional eigenspace.
pub fn wigner_value(
    ctx: &PrimeContext,
    torus: &TorusDescriptor,
    chi: &TorusCharacter,
    xi: &PlaneVector,
) -> Result<Complex64> {
    let rank = eigenspace_dimensions(ctx, torus)?[chi.index].1;
    if rank != 1 {
        return Err(Error::NotOneDimensional(rank));
    }
    let proj = projector(ctx, torus, chi);
    Ok(pi_monomial(ctx, &HeisenbergElement::section(*xi))
        .right_mul(&proj)
        .trace())
}

/// One line of the rate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerRecord {
    pub p: u32,
    pub a: IntegralSL2,
    pub chi_index: usize,
    pub xi: LatticeVector,
    pub xi_mod_p: PlaneVector,
    pub sum_value: Complex64,
    pub normalized: Complex64,
    pub bound: f64,
    pub pass: bool,
    pub split: bool,
    pub quadratic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateItem {
    Record(WignerRecord),
    /// An inadmissible prime (`xi = None`) or frequency.
    Skipped {
        p: u32,
        xi: Option<LatticeVector>,
        reason: Error,
    },
}

impl RateItem {
    pub fn p(&self) -> u32 {
        match self {
            RateItem::Record(r) => r.p,
            RateItem::Skipped { p, .. } => *p,
        }
    }
}

fn rate_for_prime(a: &IntegralSL2, xis: &[LatticeVector], p: u32, tolerance: f64) -> Vec<RateItem> {
    let ctx = match PrimeContext::new(p) {
        Ok(c) => c,
        Err(reason) => return vec![RateItem::Skipped { p, xi: None, reason }],
    };
    let torus = match hecke_torus(&ctx, a) {
        Ok(t) => t,
        Err(reason) => return vec![RateItem::Skipped { p, xi: None, reason }],
    };
    let bound = 2.0 * f64::from(p).sqrt();
    let mut sums = Vec::new();
    let mut skipped = Vec::new();
    for (i, xi) in xis.iter().enumerate() {
        let reduced = xi.reduce(p);
        match hecke_sums(&ctx, &torus, &reduced) {
            Ok(values) => sums.push((i, reduced, values)),
            Err(reason) => skipped.push(RateItem::Skipped { p, xi: Some(*xi), reason }),
        }
    }
    let mut out = Vec::with_capacity(torus.order * sums.len() + skipped.len());
    for chi in torus.characters() {
        for (i, reduced, values) in &sums {
            let value = values[chi.index];
            out.push(RateItem::Record(WignerRecord {
                p,
                a: *a,
                chi_index: chi.index,
                xi: xis[*i],
                xi_mod_p: *reduced,
                sum_value: value,
                normalized: value / f64::from(p).sqrt(),
                bound,
                pass: value.norm() <= bound + tolerance,
                split: torus.split,
                quadratic: chi.is_quadratic(),
            }));
        }
    }
    out.extend(skipped);
    out
}

/// Checks `|sum_B F(B, xi) chi(B)| <= 2 sqrt(p)` for every prime, character
/// and frequency. Output is ordered by prime, then character, then the
/// position of `xi` in `xis`; skipped frequencies follow their prime.
pub fn rate_check(a: &IntegralSL2, xis: &[LatticeVector], primes: &[u32], tolerance: f64) -> Vec<RateItem> {
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    primes
        .par_iter()
        .map(|&p| rate_for_prime(a, xis, p, tolerance))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil::pi_of_vector;

    fn setup(p: u32) -> (PrimeContext, TorusDescriptor) {
        let ctx = PrimeContext::new(p).unwrap();
        let t = hecke_torus(&ctx, &IntegralSL2::cat_map()).unwrap();
        (ctx, t)
    }

    #[test]
    fn projectors_are_orthogonal_idempotents() {
        let (ctx, t) = setup(7);
        let projs: Vec<ComplexMatrix> = t.characters().map(|chi| projector(&ctx, &t, &chi)).collect();
        let mut total = ComplexMatrix::zeros(7);
        for (i, pi) in projs.iter().enumerate() {
            assert!((pi * pi).approx_eq(pi, 1e-8));
            assert!(pi.hermitian_defect() < 1e-8);
            for (j, pj) in projs.iter().enumerate() {
                if i != j {
                    assert!((pi * pj).max_abs() < 1e-8);
                }
            }
            total = &total + pi;
        }
        assert!(total.approx_eq(&ComplexMatrix::identity(7), 1e-8));
    }

    #[test]
    fn dimension_examples() {
        let (ctx, t) = setup(11);
        let dims = eigenspace_dimensions(&ctx, &t).unwrap();
        assert_eq!(dims.len(), 10);
        for (k, r) in &dims {
            assert_eq!(*r, if *k == 5 { 2 } else { 1 });
        }
        let (ctx, t) = setup(7);
        let dims = eigenspace_dimensions(&ctx, &t).unwrap();
        for (k, r) in &dims {
            assert_eq!(*r, if *k == 4 { 0 } else { 1 });
        }
        assert_eq!(dims.iter().map(|d| d.1).sum::<usize>(), 7);
    }

    #[test]
    fn dimensions_match_projector_traces() {
        let (ctx, t) = setup(13);
        let dims = eigenspace_dimensions(&ctx, &t).unwrap();
        for chi in t.characters() {
            let tr = projector(&ctx, &t, &chi).trace();
            assert!((tr.re - dims[chi.index].1 as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn hecke_sum_is_a_projector_trace() {
        let (ctx, t) = setup(7);
        let xi = PlaneVector::from_ints(1, 0, 7);
        let pi = pi_of_vector(&ctx, &xi);
        let all = hecke_sums(&ctx, &t, &xi).unwrap();
        for chi in t.characters() {
            let direct = hecke_sum(&ctx, &t, &chi, &xi).unwrap();
            let via = (&projector(&ctx, &t, &chi.inverse()) * &pi).trace() * t.order as f64;
            assert!((direct - via).norm() < 1e-8);
            assert!((direct - all[chi.index]).norm() < 1e-9);
        }
    }

    #[test]
    fn hecke_sum_errors() {
        let (ctx, t) = setup(11);
        let chi = TorusCharacter::trivial(t.order);
        assert_eq!(
            hecke_sum(&ctx, &t, &chi, &PlaneVector::zero(11)),
            Err(Error::ZeroFrequency)
        );
        let (s, _) = crate::group::split_diagonalizer(&ctx, &t.center).unwrap();
        let eig = s.inverse().apply(&PlaneVector::from_ints(0, 1, 11));
        assert_eq!(hecke_sum(&ctx, &t, &chi, &eig), Err(Error::EigenvectorInput));
    }

    #[test]
    fn split_prime_eleven_meets_the_bound() {
        let (ctx, t) = setup(11);
        let xi = PlaneVector::from_ints(1, 0, 11);
        let max = hecke_sums(&ctx, &t, &xi)
            .unwrap()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(max <= 2.0 * 11f64.sqrt() + RATE_TOLERANCE, "{max}");
    }

    #[test]
    fn wigner_values() {
        let (ctx, t) = setup(7);
        let xi = PlaneVector::from_ints(1, 1, 7);
        let sums = hecke_sums(&ctx, &t, &xi).unwrap();
        for chi in t.characters().filter(|c| !c.is_quadratic()) {
            let w = wigner_value(&ctx, &t, &chi, &xi).unwrap();
            assert!((w - sums[chi.inverse().index] / t.order as f64).norm() < 1e-9);
            assert!(w.norm() * 7f64.sqrt() <= 2.0 + 1e-9);
        }
        let quad = TorusCharacter::new(4, 8);
        assert_eq!(wigner_value(&ctx, &t, &quad, &xi), Err(Error::NotOneDimensional(0)));

        let (ctx, t) = setup(11);
        let quad = TorusCharacter::new(5, 10);
        let xi = PlaneVector::from_ints(1, 0, 11);
        assert_eq!(wigner_value(&ctx, &t, &quad, &xi), Err(Error::NotOneDimensional(2)));
    }

    #[test]
    fn rate_check_examples() {
        let a = IntegralSL2::cat_map();
        let xis = [LatticeVector::new(1, 0), LatticeVector::new(0, 1), LatticeVector::new(1, 1)];
        let items = rate_check(&a, &xis, &[13, 7, 11], RATE_TOLERANCE);
        let records: Vec<&WignerRecord> = items
            .iter()
            .filter_map(|i| match i {
                RateItem::Record(r) => Some(r),
                _ => None,
            })
            .collect();
        assert_eq!(records.len(), 3 * (8 + 10 + 14));
        assert!(records.iter().all(|r| r.pass));
        assert!(records.windows(2).all(|w| (w[0].p, w[0].chi_index) <= (w[1].p, w[1].chi_index)));

        let items = rate_check(&a, &[LatticeVector::new(0, 0)], &[5, 7], RATE_TOLERANCE);
        assert_eq!(
            items[0],
            RateItem::Skipped { p: 5, xi: None, reason: Error::RamifiedPrime { p: 5 } }
        );
        assert_eq!(
            items[1],
            RateItem::Skipped { p: 7, xi: Some(LatticeVector::new(0, 0)), reason: Error::ZeroFrequency }
        );
    }
}
