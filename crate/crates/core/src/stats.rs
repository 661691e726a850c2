//! Exponential-sum identities and the Sato-Tate diagnostics built on top of
//! the Hecke torus sums.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Scalar};
use crate::group::{
    hecke_torus, split_diagonalizer, symplectic_form, IntegralSL2, PlaneVector, SL2Element,
    TorusDescriptor,
};
use crate::hecke::{cyclic_transform, hecke_sums};
use crate::report::IdentityReport;
use crate::weil::{invariant_closed_form, pi_of_vector, rho_operator, ComplexMatrix};

/// Tuple enumeration limit for the sum side of the L_N identity.
pub const LNORM_ENUMERATION_LIMIT: u64 = 10_000_000;

/// Discrete logarithm on F_p^* relative to the smallest primitive root.
fn unit_dlog(ctx: &PrimeContext) -> (Scalar, Vec<usize>) {
    let g = ctx.primitive_root();
    let mut table = vec![0usize; ctx.p() as usize];
    let mut cur = ctx.one();
    for j in 0..(ctx.p() - 1) as usize {
        table[cur.index()] = j;
        cur *= g;
    }
    (g, table)
}

/// `sum_{a != 0, 1} sigma(a) psi((a + 1)/(a - 1) lambda mu / 2) chi(a)` with
/// `chi(g^j) = exp(2 pi i j k / (p - 1))` for the smallest primitive root `g`.
pub fn split_closed_sum(ctx: &PrimeContext, chi_index: usize, lambda: Scalar, mu: Scalar) -> Result<Complex64> {
    let prod = lambda * mu;
    if prod.is_zero() {
        return Err(Error::ZeroProduct);
    }
    let (_, dlog) = unit_dlog(ctx);
    let n = (ctx.p() - 1) as usize;
    Ok(ctx
        .units()
        .filter(|a| a.value() != 1)
        .map(|a| {
            let shift = (a - ctx.one()).inv().expect("a != 1");
            let arg = ctx.half() * (a + ctx.one()) * shift * prod;
            let chi = Complex64::from_polar(
                1.0,
                std::f64::consts::TAU * ((dlog[a.index()] * chi_index) % n) as f64 / n as f64,
            );
            ctx.psi(arg) * f64::from(ctx.legendre(a)) * chi
        })
        .sum())
}

/// For a split torus, the diagonalizing `S` and, for each torus character
/// index `k`, the index of `a -> chi_k(S^{-1} diag(a, 1/a) S)` on F_p^*.
pub fn split_character_map(ctx: &PrimeContext, torus: &TorusDescriptor) -> Option<(SL2Element, Vec<usize>)> {
    let (s, _) = split_diagonalizer(ctx, &torus.center)?;
    let (g, _) = unit_dlog(ctx);
    let pulled = s.inverse() * SL2Element::diagonal(g).ok()? * s;
    let m = *torus.dlog.get(&pulled)?;
    let n = torus.order;
    Some((s, (0..n).map(|k| (k * m) % n).collect()))
}

/// `Av = (1/|T|) sum_B rho(B) pi(s(xi)) rho(B)^{-1}`.
pub fn averaged_operator(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector) -> Result<ComplexMatrix> {
    if torus.is_eigenvector(xi) {
        return Err(Error::EigenvectorInput);
    }
    let pi = pi_of_vector(ctx, xi);
    let mut acc = ComplexMatrix::zeros(ctx.p() as usize);
    for b in &torus.elements {
        let conj = &(&rho_operator(ctx, b) * &pi) * &rho_operator(ctx, &b.inverse());
        acc.add_scaled(&conj, Complex64::new(1.0, 0.0));
    }
    Ok(acc.scale(Complex64::new(1.0 / torus.order as f64, 0.0)))
}

/// `(1/|T|) sum_{eta in T xi} pi(s(eta))`, the orbit form of [`averaged_operator`].
pub fn orbit_average(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector) -> Result<ComplexMatrix> {
    let orbit = torus.torus_orbit(xi)?;
    let mut acc = ComplexMatrix::zeros(ctx.p() as usize);
    for eta in &orbit {
        acc.add_scaled(&pi_of_vector(ctx, eta), Complex64::new(1.0, 0.0));
    }
    Ok(acc.scale(Complex64::new(1.0 / torus.order as f64, 0.0)))
}

fn check_depth(n: u32) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::Usage(format!("L_N depth must be 1, 2 or 3, got {n}")))
    }
}

/// `Tr((Av^dagger Av)^N)`.
pub fn lnorm_operator_side(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector, n: u32) -> Result<f64> {
    check_depth(n)?;
    let av = averaged_operator(ctx, torus, xi)?;
    let gram = &av.adjoint() * &av;
    let mut power = gram.clone();
    for _ in 1..n {
        power = &power * &gram;
    }
    Ok(power.trace().re)
}

/// Histogram of the exponents `sum_{i<j} omega(x_i, x_j)` over zero-sum
/// `2N`-tuples from the orbit of `xi`.
fn orbit_tuple_phases(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector, n: u32) -> Result<Vec<u64>> {
    check_depth(n)?;
    let orbit: Vec<PlaneVector> = torus.torus_orbit(xi)?.into_iter().collect();
    let len = 2 * n as usize;
    let work = (orbit.len() as u64).saturating_pow(len as u32 - 1);
    if work > LNORM_ENUMERATION_LIMIT {
        return Err(Error::TooLarge(work));
    }
    let members: HashSet<PlaneVector> = orbit.iter().copied().collect();
    let p = ctx.p();
    let mut counts = vec![0u64; p as usize];
    let mut idx = vec![0usize; len - 1];
    loop {
        let mut tuple: Vec<PlaneVector> = idx.iter().map(|&i| orbit[i]).collect();
        let partial = tuple.iter().fold(PlaneVector::zero(p), |acc, v| acc.add(v));
        let last = partial.neg();
        if members.contains(&last) {
            tuple.push(last);
            let mut exponent = ctx.zero();
            let mut prefix = PlaneVector::zero(p);
            // sum_{i<j} omega(x_i, x_j) = sum_j omega(x_1 + ... + x_{j-1}, x_j)
            for v in &tuple {
                exponent += symplectic_form(&prefix, v);
                prefix = prefix.add(v);
            }
            counts[exponent.index()] += 1;
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(counts);
            }
            idx[k] += 1;
            if idx[k] < orbit.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `(p / |T|^{2N}) sum_X psi(sum_{i<j} omega(x_i, x_j) / 2)` over zero-sum
/// tuples `X` drawn from the orbit of `xi`.
pub fn lnorm_sum_side(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector, n: u32) -> Result<Complex64> {
    let counts = orbit_tuple_phases(ctx, torus, xi, n)?;
    let total: Complex64 = counts
        .iter()
        .enumerate()
        .map(|(e, &c)| ctx.psi(ctx.half() * ctx.scalar(e as i64)) * c as f64)
        .sum();
    Ok(total * f64::from(ctx.p()) / (torus.order as f64).powi(2 * n as i32))
}

/// The same tuple sum with prefactor `1/|T|^{2N}` and no halving of the
/// phase, kept for comparison with the operator side.
pub fn lnorm_printed_form(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector, n: u32) -> Result<Complex64> {
    let counts = orbit_tuple_phases(ctx, torus, xi, n)?;
    let total: Complex64 = counts
        .iter()
        .enumerate()
        .map(|(e, &c)| ctx.psi(ctx.scalar(e as i64)) * c as f64)
        .sum();
    Ok(total / (torus.order as f64).powi(2 * n as i32))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LnormReport {
    pub p: u32,
    pub n: u32,
    pub operator_side: f64,
    pub sum_side: Complex64,
    pub printed_form: Complex64,
    pub matched: bool,
}

pub fn lnorm_report(
    ctx: &PrimeContext,
    torus: &TorusDescriptor,
    xi: &PlaneVector,
    n: u32,
    tolerance: f64,
) -> Result<LnormReport> {
    let operator_side = lnorm_operator_side(ctx, torus, xi, n)?;
    let sum_side = lnorm_sum_side(ctx, torus, xi, n)?;
    let printed_form = lnorm_printed_form(ctx, torus, xi, n)?;
    Ok(LnormReport {
        p: ctx.p(),
        n,
        operator_side,
        sum_side,
        printed_form,
        matched: (operator_side - sum_side.re).abs() < tolerance && sum_side.im.abs() < tolerance,
    })
}

/// Checks `sum_z psi(s z / 2) sigma(z) = sum_z psi(s z^2 / 2)` for every
/// `s != 0`, and that both sides have modulus `sqrt(p)`.
pub fn gauss_identity_check(ctx: &PrimeContext, tolerance: f64) -> IdentityReport {
    let mut report = IdentityReport::new("gauss-identity", ctx.p(), tolerance);
    let root = f64::from(ctx.p()).sqrt();
    for s in ctx.units() {
        let step = ctx.half() * s;
        let linear: Complex64 = ctx
            .elements()
            .map(|z| ctx.psi(step * z) * f64::from(ctx.legendre(z)))
            .sum();
        let quadratic: Complex64 = ctx.elements().map(|z| ctx.psi(step * z * z)).sum();
        report.record((linear - quadratic).norm(), || format!("s={s}"));
        report.record((linear.norm() - root).abs(), || format!("|linear| s={s}"));
        report.record((quadratic.norm() - root).abs(), || format!("|quadratic| s={s}"));
    }
    report
}

/// Semicircle law `(1/2 pi) sqrt(4 - x^2)` on `[-2, 2]`, cumulative.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI) + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and `cdf`.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// `sum_B F(B, xi) chi(B) / sqrt(p)` for every character, with `F` taken
/// from the invariant closed form off the identity. `O(|T|^2)`, no matrices.
pub fn normalized_hecke_values(ctx: &PrimeContext, torus: &TorusDescriptor, xi: &PlaneVector) -> Result<Vec<Complex64>> {
    if xi.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    if torus.is_eigenvector(xi) {
        return Err(Error::EigenvectorInput);
    }
    let values = torus
        .elements
        .iter()
        .map(|b| {
            if b.is_identity() {
                // Tr pi(s(xi)) = 0 for xi != 0
                Ok(Complex64::new(0.0, 0.0))
            } else {
                invariant_closed_form(ctx, b, xi)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let root = f64::from(ctx.p()).sqrt();
    Ok(cyclic_transform(&values).into_iter().map(|z| z / root).collect())
}

/// Matrix-route counterpart of [`normalized_hecke_values`].
pub fn normalized_hecke_values_operator(
    ctx: &PrimeContext,
    torus: &TorusDescriptor,
    xi: &PlaneVector,
) -> Result<Vec<Complex64>> {
    let root = f64::from(ctx.p()).sqrt();
    Ok(hecke_sums(ctx, torus, xi)?.into_iter().map(|z| z / root).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRecord {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub density: f64,
}

/// Equal-width bins over `[-2 - delta, 2 + delta]`; values beyond the edges
/// land in the outermost bins.
pub fn histogram(values: &[f64], bins: usize, delta: f64) -> Vec<HistogramRecord> {
    let lo = -2.0 - delta;
    let width = (4.0 + 2.0 * delta) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let k = ((x - lo) / width).floor();
        let k = if k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
        counts[k] += 1;
    }
    let total = values.len().max(1) as f64;
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramRecord {
            bin_left: lo + k as f64 * width,
            bin_right: if k + 1 == bins { 2.0 + delta } else { lo + (k + 1) as f64 * width },
            count,
            density: count as f64 / (total * width),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SatoTateReport {
    pub primes_used: Vec<u32>,
    pub skipped: Vec<(u32, Error)>,
    pub value_count: usize,
    pub histogram: Vec<HistogramRecord>,
    pub ks_distance: f64,
    pub max_abs_imag: f64,
    pub max_modulus: f64,
}

/// Pools the normalized Hecke sums over all characters and all admissible
/// primes, then bins their real parts.
pub fn sato_tate_histogram(
    primes: &[u32],
    a: &IntegralSL2,
    xi: &crate::group::LatticeVector,
    bins: usize,
    delta: f64,
) -> SatoTateReport {
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut values = Vec::new();
    for &p in primes {
        let result = PrimeContext::new(p).and_then(|ctx| {
            let torus = hecke_torus(&ctx, a)?;
            normalized_hecke_values(&ctx, &torus, &xi.reduce(p))
        });
        match result {
            Ok(v) => {
                used.push(p);
                values.extend(v);
            }
            Err(e) => skipped.push((p, e)),
        }
    }
    let reals: Vec<f64> = values.iter().map(|z| z.re).collect();
    SatoTateReport {
        primes_used: used,
        skipped,
        value_count: values.len(),
        histogram: histogram(&reals, bins, delta),
        ks_distance: if reals.is_empty() { f64::NAN } else { ks_distance(&reals, semicircle_cdf) },
        max_abs_imag: values.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        max_modulus: values.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{LatticeVector, TorusCharacter};
    use crate::hecke::hecke_sum;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn setup(p: u32, a: IntegralSL2) -> (PrimeContext, TorusDescriptor) {
        let ctx = PrimeContext::new(p).unwrap();
        let t = hecke_torus(&ctx, &a).unwrap();
        (ctx, t)
    }

    #[test]
    fn split_sum_obeys_weil_bound() {
        let ctx = PrimeContext::new(13).unwrap();
        for k in 0..12 {
            let v = split_closed_sum(&ctx, k, ctx.one(), ctx.one()).unwrap();
            assert!(v.norm() <= 2.0 * 13f64.sqrt());
        }
        assert_eq!(split_closed_sum(&ctx, 0, ctx.zero(), ctx.one()), Err(Error::ZeroProduct));
    }

    #[test]
    fn split_sum_matches_operator_sum() {
        let (ctx, t) = setup(11, IntegralSL2::cat_map());
        let (s, map) = split_character_map(&ctx, &t).unwrap();
        let xi = PlaneVector::from_ints(1, 0, 11);
        let eta = s.apply(&xi);
        for chi in t.characters() {
            let lhs = hecke_sum(&ctx, &t, &chi, &xi).unwrap();
            let rhs = split_closed_sum(&ctx, map[chi.index], eta.lambda, eta.mu).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "chi={chi:?}");
        }
    }

    #[test]
    fn conjugated_torus_gives_the_same_sums() {
        let (ctx, t) = setup(13, IntegralSL2::cat_map());
        let s = SL2Element::from_ints(1, 2, 3, 7, 13).unwrap();
        let moved = t.conjugate(&s);
        let xi = PlaneVector::from_ints(1, 1, 13);
        for k in 0..t.order {
            let chi = TorusCharacter::new(k, t.order);
            let a = hecke_sum(&ctx, &t, &chi, &xi).unwrap();
            let b = hecke_sum(&ctx, &moved, &chi, &s.apply(&xi)).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn averaged_operator_properties() {
        let (ctx, t) = setup(7, IntegralSL2::cat_map());
        let xi = PlaneVector::from_ints(1, 0, 7);
        let av = averaged_operator(&ctx, &t, &xi).unwrap();
        for b in &t.elements {
            assert!(av.commutator_defect(&rho_operator(&ctx, b)) < 1e-8);
        }
        assert!(av.approx_eq(&orbit_average(&ctx, &t, &xi).unwrap(), 1e-9));
        for p in [7u32, 11, 13] {
            let (ctx, t) = setup(p, IntegralSL2::cat_map());
            let av = averaged_operator(&ctx, &t, &PlaneVector::from_ints(1, 0, p)).unwrap();
            assert!(av.hermitian_spectral_radius() <= 2.0 / f64::from(p).sqrt() + 1e-6);
        }
    }

    #[test]
    fn lnorm_first_moment() {
        for (p, order) in [(7u32, 8.0), (11, 10.0)] {
            let (ctx, t) = setup(p, IntegralSL2::cat_map());
            let xi = PlaneVector::from_ints(1, 0, p);
            // Tr(pi(s(u))^dagger pi(s(v))) = p [u = v], and the orbit has |T| points
            let expected = f64::from(p) / order;
            assert!((lnorm_operator_side(&ctx, &t, &xi, 1).unwrap() - expected).abs() < 1e-9);
            let s = lnorm_sum_side(&ctx, &t, &xi, 1).unwrap();
            assert!((s - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn lnorm_second_moment() {
        for p in [7u32, 11] {
            let (ctx, t) = setup(p, IntegralSL2::cat_map());
            let xi = PlaneVector::from_ints(1, 0, p);
            let op = lnorm_operator_side(&ctx, &t, &xi, 2).unwrap();
            let sum = lnorm_sum_side(&ctx, &t, &xi, 2).unwrap();
            assert!(op >= 0.0);
            assert!((op - sum.re).abs() < 1e-7 && sum.im.abs() < 1e-7);
        }
        let (ctx, t) = setup(5, IntegralSL2::new(3, 1, 2, 1).unwrap());
        let rep = lnorm_report(&ctx, &t, &PlaneVector::from_ints(1, 0, 5), 2, 1e-7).unwrap();
        assert!(rep.matched, "{rep:?}");
    }

    #[test]
    fn lnorm_guards() {
        let (ctx, t) = setup(7, IntegralSL2::cat_map());
        let xi = PlaneVector::from_ints(1, 0, 7);
        assert!(matches!(lnorm_sum_side(&ctx, &t, &xi, 4), Err(Error::Usage(_))));
        let (ctx, t) = setup(499, IntegralSL2::cat_map());
        let xi = PlaneVector::from_ints(1, 0, 499);
        assert!(matches!(lnorm_sum_side(&ctx, &t, &xi, 3), Err(Error::TooLarge(_))));
    }

    #[test]
    fn gauss_identity_small_primes() {
        for p in [5u32, 97] {
            let ctx = PrimeContext::new(p).unwrap();
            let rep = gauss_identity_check(&ctx, 1e-9);
            assert!(rep.passed(), "{rep}");
            assert_eq!(rep.checked, 3 * (p as usize - 1));
        }
    }

    #[test]
    fn semicircle_cdf_against_su2_traces() {
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        // Haar measure on SU(2) is uniform on S^3; the trace is twice a coordinate
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let normal = |rng: &mut rand_chacha::ChaCha8Rng| {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            let v: f64 = rng.gen();
            (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        };
        let traces: Vec<f64> = (0..40_000)
            .map(|_| {
                let q: [f64; 4] = [normal(&mut rng), normal(&mut rng), normal(&mut rng), normal(&mut rng)];
                let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
                2.0 * q[0] / r
            })
            .collect();
        assert!(ks_distance(&traces, semicircle_cdf) < 0.012);
    }

    #[test]
    fn closed_form_values_match_operator_values() {
        for p in [7u32, 11, 13, 29] {
            let (ctx, t) = setup(p, IntegralSL2::cat_map());
            for xi in [(1, 0), (0, 1), (1, 1), (2, 3)] {
                let xi = PlaneVector::from_ints(xi.0, xi.1, p);
                let Ok(fast) = normalized_hecke_values(&ctx, &t, &xi) else { continue };
                let slow = normalized_hecke_values_operator(&ctx, &t, &xi).unwrap();
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn histogram_invariants() {
        let values = [-2.0, -1.0, 0.0, 0.5, 1.9999, 2.0];
        let h = histogram(&values, 8, 1e-6);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), values.len());
        let integral: f64 = h.iter().map(|b| b.density * (b.bin_right - b.bin_left)).sum();
        assert!((integral - 1.0).abs() < 1e-12);
        assert_eq!(h[0].bin_left, -2.0 - 1e-6);
        assert_eq!(h[7].bin_right, 2.0 + 1e-6);
    }

    #[test]
    fn sato_tate_small_range() {
        let rep = sato_tate_histogram(&[5, 7, 11, 13], &IntegralSL2::cat_map(), &LatticeVector::new(1, 0), 10, 1e-6);
        assert_eq!(rep.primes_used, vec![7, 11, 13]);
        assert_eq!(rep.skipped, vec![(5, Error::RamifiedPrime { p: 5 })]);
        assert_eq!(rep.value_count, 8 + 10 + 14);
        assert!(rep.max_modulus <= 2.0 + 1e-6);
        assert_eq!(rep.histogram.iter().map(|b| b.count).sum::<usize>(), rep.value_count);
    }
}
