//! SL2 over F_p, the Heisenberg group `V x F_p`, the integral cat map `A`
//! and its Hecke torus.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PrimeContext, Scalar};

/// An integral unimodular matrix `(a, b; c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntegralSL2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegralSL2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::NotUnimodular { a, b, c, d });
        }
        Ok(Self { a, b, c, d })
    }

    /// The standard cat map `(2, 1; 1, 1)`.
    pub fn cat_map() -> Self {
        Self { a: 2, b: 1, c: 1, d: 1 }
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn discriminant(&self) -> i64 {
        self.trace() * self.trace() - 4
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_hyperbolic(&self) -> Result<bool> {
        if self.a * self.d - self.b * self.c != 1 {
            return Err(Error::NotUnimodular {
                a: self.a,
                b: self.b,
                c: self.c,
                d: self.d,
            });
        }
        Ok(self.trace().abs() > 2)
    }

    pub fn reduce(&self, p: u32) -> SL2Element {
        SL2Element::from_raw(
            Scalar::new(self.a, p),
            Scalar::new(self.b, p),
            Scalar::new(self.c, p),
            Scalar::new(self.d, p),
        )
    }
}

impl fmt::Display for IntegralSL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub l: i64,
    pub m: i64,
}

impl LatticeVector {
    pub fn new(l: i64, m: i64) -> Self {
        Self { l, m }
    }

    pub fn reduce(&self, p: u32) -> PlaneVector {
        PlaneVector::new(Scalar::new(self.l, p), Scalar::new(self.m, p))
    }
}

/// A vector `(lambda, mu)` of the symplectic plane `V = F_p^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneVector {
    pub lambda: Scalar,
    pub mu: Scalar,
}

impl PlaneVector {
    pub fn new(lambda: Scalar, mu: Scalar) -> Self {
        Self { lambda, mu }
    }

    pub fn from_ints(lambda: i64, mu: i64, p: u32) -> Self {
        Self::new(Scalar::new(lambda, p), Scalar::new(mu, p))
    }

    pub fn zero(p: u32) -> Self {
        Self::new(Scalar::zero(p), Scalar::zero(p))
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.mu.is_zero()
    }

    pub fn scale(&self, t: Scalar) -> Self {
        Self::new(self.lambda * t, self.mu * t)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.lambda, -self.mu)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.lambda + other.lambda, self.mu + other.mu)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.lambda - other.lambda, self.mu - other.mu)
    }

    /// All `p^2` vectors, lexicographic.
    pub fn all(p: u32) -> impl Iterator<Item = PlaneVector> {
        (0..p).flat_map(move |l| (0..p).map(move |m| PlaneVector::from_ints(l.into(), m.into(), p)))
    }

    pub fn nonzero(p: u32) -> impl Iterator<Item = PlaneVector> {
        Self::all(p).filter(|v| !v.is_zero())
    }
}

/// `omega(u, v) = u.lambda * v.mu - u.mu * v.lambda`, so that
/// `omega((1,0),(0,1)) = 1`.
pub fn symplectic_form(u: &PlaneVector, v: &PlaneVector) -> Scalar {
    u.lambda * v.mu - u.mu * v.lambda
}

/// An element of SL2(F_p), acting on column vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SL2Element {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl fmt::Debug for SL2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

impl SL2Element {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        let g = Self::from_raw(a, b, c, d);
        if g.det().value() != 1 {
            return Err(Error::NotUnimodular {
                a: a.value().into(),
                b: b.value().into(),
                c: c.value().into(),
                d: d.value().into(),
            });
        }
        Ok(g)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, p: u32) -> Result<Self> {
        Self::new(
            Scalar::new(a, p),
            Scalar::new(b, p),
            Scalar::new(c, p),
            Scalar::new(d, p),
        )
    }

    pub(crate) fn from_raw(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity(p: u32) -> Self {
        let (o, z) = (Scalar::one(p), Scalar::zero(p));
        Self::from_raw(o, z, z, o)
    }

    pub fn minus_identity(p: u32) -> Self {
        let (o, z) = (Scalar::one(p), Scalar::zero(p));
        Self::from_raw(-o, z, z, -o)
    }

    /// The Weyl element `(0, 1; -1, 0)`.
    pub fn weyl(p: u32) -> Self {
        let (o, z) = (Scalar::one(p), Scalar::zero(p));
        Self::from_raw(z, o, -o, z)
    }

    /// `diag(a, a^{-1})`.
    pub fn diagonal(a: Scalar) -> Result<Self> {
        let ai = a.inv().ok_or(Error::ZeroParameter)?;
        let z = Scalar::zero(a.modulus());
        Ok(Self::from_raw(a, z, z, ai))
    }

    pub fn modulus(&self) -> u32 {
        self.a.modulus()
    }

    pub fn det(&self) -> Scalar {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Scalar {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self::from_raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Self::from_raw(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn apply(&self, v: &PlaneVector) -> PlaneVector {
        PlaneVector::new(
            self.a * v.lambda + self.b * v.mu,
            self.c * v.lambda + self.d * v.mu,
        )
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus())
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        *self * *other == *other * *self
    }

    /// Every element of SL2(F_p), lexicographic in `(a, b, c, d)`.
    /// There are `p (p^2 - 1)` of them.
    pub fn enumerate(ctx: &PrimeContext) -> Vec<SL2Element> {
        let p = ctx.p();
        let mut out = Vec::with_capacity((p * (p * p - 1)) as usize);
        for a in ctx.elements() {
            for b in ctx.elements() {
                for c in ctx.elements() {
                    if let Some(ai) = a.inv() {
                        // d fixed by ad - bc = 1
                        let d = (ctx.one() + b * c) * ai;
                        out.push(Self::from_raw(a, b, c, d));
                    } else if b * c == -ctx.one() {
                        // a = 0 forces bc = -1, d free
                        for d in ctx.elements() {
                            out.push(Self::from_raw(a, b, c, d));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Uniformly random element.
    pub fn random<R: rand::Rng + ?Sized>(ctx: &PrimeContext, rng: &mut R) -> Self {
        loop {
            let a = ctx.scalar(rng.gen_range(0..i64::from(ctx.p())));
            let b = ctx.scalar(rng.gen_range(0..i64::from(ctx.p())));
            let c = ctx.scalar(rng.gen_range(0..i64::from(ctx.p())));
            let d = ctx.scalar(rng.gen_range(0..i64::from(ctx.p())));
            if let Ok(g) = Self::new(a, b, c, d) {
                return g;
            }
        }
    }
}

impl Mul for SL2Element {
    type Output = SL2Element;
    fn mul(self, r: SL2Element) -> SL2Element {
        SL2Element::from_raw(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

/// Position of an element in the opposite Bruhat decomposition
/// `SL2 = B w B  u  B` with `B` lower triangular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruhatCell {
    BigCell {
        a: Scalar,
        b: Scalar,
        c: Scalar,
        d: Scalar,
    },
    LowerTriangular {
        a: Scalar,
        r: Scalar,
    },
}

pub fn bruhat_classify(g: &SL2Element) -> BruhatCell {
    if g.b.is_zero() {
        BruhatCell::LowerTriangular { a: g.a, r: g.c }
    } else {
        BruhatCell::BigCell {
            a: g.a,
            b: g.b,
            c: g.c,
            d: g.d,
        }
    }
}

/// `(v, lambda)` in `H = V x F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisenbergElement {
    pub v: PlaneVector,
    pub z: Scalar,
}

impl HeisenbergElement {
    pub fn new(v: PlaneVector, z: Scalar) -> Self {
        Self { v, z }
    }

    /// The section `s(v) = (v, 0)`.
    pub fn section(v: PlaneVector) -> Self {
        Self::new(v, Scalar::zero(v.lambda.modulus()))
    }

    pub fn central(z: Scalar) -> Self {
        Self::new(PlaneVector::zero(z.modulus()), z)
    }

    pub fn identity(p: u32) -> Self {
        Self::central(Scalar::zero(p))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.v.neg(), -self.z)
    }

    /// Position coordinate `q'`.
    pub fn position(&self) -> Scalar {
        self.v.lambda
    }

    /// Momentum coordinate `p'`.
    pub fn momentum(&self) -> Scalar {
        self.v.mu
    }

    /// Symplectic action `g (v, lambda) = (g v, lambda)`.
    pub fn transform(&self, g: &SL2Element) -> Self {
        Self::new(g.apply(&self.v), self.z)
    }

    pub fn all(p: u32) -> impl Iterator<Item = HeisenbergElement> {
        PlaneVector::all(p)
            .flat_map(move |v| (0..p).map(move |z| HeisenbergElement::new(v, Scalar::new(z.into(), p))))
    }
}

/// `(v, l)(v', l') = (v + v', l + l' + omega(v, v') / 2)`.
pub fn heisenberg_mul(h1: &HeisenbergElement, h2: &HeisenbergElement) -> HeisenbergElement {
    let half = Scalar::half(h1.z.modulus());
    HeisenbergElement::new(
        h1.v.add(&h2.v),
        h1.z + h2.z + half * symplectic_form(&h1.v, &h2.v),
    )
}

impl Mul for HeisenbergElement {
    type Output = HeisenbergElement;
    fn mul(self, rhs: HeisenbergElement) -> HeisenbergElement {
        heisenberg_mul(&self, &rhs)
    }
}

/// A character `chi_k(generator^j) = exp(2 pi i j k / order)` of a cyclic torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusCharacter {
    pub index: usize,
    pub order: usize,
}

impl TorusCharacter {
    pub fn new(index: usize, order: usize) -> Self {
        Self {
            index: index % order,
            order,
        }
    }

    pub fn trivial(order: usize) -> Self {
        Self::new(0, order)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.order - self.index, self.order)
    }

    pub fn is_quadratic(&self) -> bool {
        self.order.is_multiple_of(2) && self.index == self.order / 2
    }

    /// Value on `generator^exponent`.
    pub fn value_at_exponent(&self, exponent: usize) -> Complex64 {
        let k = (self.index * exponent) % self.order;
        Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / self.order as f64)
    }
}

/// The centralizer of `A mod p` in SL2(F_p), stored in generator-power order
/// so that `elements[j] = generator^j`.
#[derive(Debug, Clone)]
pub struct TorusDescriptor {
    pub elements: Vec<SL2Element>,
    pub order: usize,
    pub split: bool,
    pub generator: SL2Element,
    pub dlog: HashMap<SL2Element, usize>,
    /// The regular element whose centralizer this is.
    pub center: SL2Element,
}

/// Builds the Hecke torus `T_A = { x I + y A : det = 1 }` of `A` modulo `p`.
pub fn hecke_torus(ctx: &PrimeContext, a: &IntegralSL2) -> Result<TorusDescriptor> {
    if !a.is_hyperbolic()? {
        return Err(Error::NotHyperbolic);
    }
    if a.discriminant().rem_euclid(i64::from(ctx.p())) == 0 {
        return Err(Error::RamifiedPrime { p: ctx.p() });
    }
    TorusDescriptor::centralizer(ctx, &a.reduce(ctx.p()))
}

impl TorusDescriptor {
    /// Centralizer of a regular element (`tr^2 - 4` nonzero mod p); no
    /// hyperbolicity requirement.
    pub fn centralizer(ctx: &PrimeContext, center: &SL2Element) -> Result<Self> {
        let tr = center.trace();
        let disc = tr * tr - ctx.scalar(4);
        if disc.is_zero() {
            return Err(Error::RamifiedPrime { p: ctx.p() });
        }
        let split = ctx.legendre(disc) == 1;
        let identity = SL2Element::identity(ctx.p());

        // x^2 + x y tr + y^2 = 1 enumerates det(x I + y A) = 1.
        let mut members = Vec::new();
        for x in ctx.elements() {
            for y in ctx.elements() {
                if x * x + x * y * tr + y * y == ctx.one() {
                    members.push(SL2Element::from_raw(
                        x + y * center.a,
                        y * center.b,
                        y * center.c,
                        x + y * center.d,
                    ));
                }
            }
        }
        let order = members.len();
        let expected = if split { ctx.p() - 1 } else { ctx.p() + 1 } as usize;
        debug_assert_eq!(order, expected);

        let element_order = |g: &SL2Element| {
            let mut cur = *g;
            let mut n = 1;
            while cur != identity {
                cur = cur * *g;
                n += 1;
            }
            n
        };
        // members is in lexicographic (x, y) order already
        let generator = *members
            .iter()
            .find(|g| element_order(g) == order)
            .expect("torus is cyclic");

        let mut elements = Vec::with_capacity(order);
        let mut dlog = HashMap::with_capacity(order);
        let mut cur = identity;
        for j in 0..order {
            elements.push(cur);
            dlog.insert(cur, j);
            cur = cur * generator;
        }
        Ok(Self {
            elements,
            order,
            split,
            generator,
            dlog,
            center: *center,
        })
    }

    pub fn characters(&self) -> impl Iterator<Item = TorusCharacter> + '_ {
        (0..self.order).map(|k| TorusCharacter::new(k, self.order))
    }

    pub fn contains(&self, b: &SL2Element) -> bool {
        self.dlog.contains_key(b)
    }

    pub fn character_value(&self, chi: &TorusCharacter, b: &SL2Element) -> Result<Complex64> {
        let j = self.dlog.get(b).ok_or(Error::NotInTorus)?;
        Ok(chi.value_at_exponent(*j))
    }

    /// True when `xi` is zero or `A xi` is proportional to `xi` mod p.
    pub fn is_eigenvector(&self, xi: &PlaneVector) -> bool {
        xi.is_zero() || symplectic_form(&self.center.apply(xi), xi).is_zero()
    }

    pub fn torus_orbit(&self, xi: &PlaneVector) -> Result<BTreeSet<PlaneVector>> {
        if self.is_eigenvector(xi) {
            return Err(Error::EigenvectorInput);
        }
        Ok(self.elements.iter().map(|b| b.apply(xi)).collect())
    }

    /// The torus `S T S^{-1}`, with generator `S g S^{-1}`, so character
    /// indices transport unchanged.
    pub fn conjugate(&self, s: &SL2Element) -> Self {
        let si = s.inverse();
        let conj = |b: &SL2Element| *s * *b * si;
        let elements: Vec<SL2Element> = self.elements.iter().map(conj).collect();
        let dlog = elements.iter().enumerate().map(|(j, b)| (*b, j)).collect();
        Self {
            generator: conj(&self.generator),
            center: conj(&self.center),
            elements,
            dlog,
            order: self.order,
            split: self.split,
        }
    }
}

/// For a split regular element, some `S` in SL2(F_p) with
/// `S A S^{-1} = diag(alpha, alpha^{-1})`. Returns `(S, alpha)`.
pub fn split_diagonalizer(ctx: &PrimeContext, a: &SL2Element) -> Option<(SL2Element, Scalar)> {
    let tr = a.trace();
    let disc = tr * tr - ctx.scalar(4);
    if ctx.legendre(disc) != 1 {
        return None;
    }
    let root = ctx.sqrt(disc)?;
    let alpha = (tr + root) * ctx.half();
    let beta = (tr - root) * ctx.half();
    let eigenvector = |e: Scalar| {
        // rows of A - e I annihilate the eigenvector
        let (r0, r1) = (a.a - e, a.b);
        let v = if r0.is_zero() && r1.is_zero() {
            PlaneVector::new(a.d - e, -a.c)
        } else {
            PlaneVector::new(r1, -r0)
        };
        debug_assert!(!v.is_zero());
        v
    };
    let e1 = eigenvector(alpha);
    let e2 = eigenvector(beta);
    // M = [e1 | e2 / det] has det 1 and M^{-1} A M = diag(alpha, beta)
    let det = symplectic_form(&e1, &e2);
    let e2 = e2.scale(det.inv()?);
    let m = SL2Element::new(e1.lambda, e2.lambda, e1.mu, e2.mu).ok()?;
    Some((m.inverse(), alpha))
}
