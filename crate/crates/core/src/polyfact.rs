//! Dense univariate polynomials over any [`Field`], complete factorization
//! into irreducibles (squarefree / distinct-degree / equal-degree), Rabin
//! irreducibility testing and cyclotomic polynomials.
//!
//! Everything here is exact. Polynomials are coefficient vectors, low order
//! first, with no trailing zeros; the zero polynomial has an empty vector.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::gf::{Field, FieldTower, KField};
use crate::rng::SplitMix64;

const KARATSUBA_THRESHOLD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    DivideByZeroPoly,
    BothZero,
    ZeroPoly,
    ConstantPoly,
    NotIrreducible,
    NotCoprimeToCharacteristic,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            PolyError::DivideByZeroPoly => "division by the zero polynomial",
            PolyError::BothZero => "gcd of two zero polynomials",
            PolyError::ZeroPoly => "operation undefined for the zero polynomial",
            PolyError::ConstantPoly => "operation undefined for constant polynomials",
            PolyError::NotIrreducible => "input must be irreducible",
            PolyError::NotCoprimeToCharacteristic => {
                "index must be coprime to the field characteristic"
            }
        };
        f.write_str(msg)
    }
}

/// Dense univariate polynomial; the owning field is passed to every
/// operation rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<F: Field> {
    coeffs: Vec<F::Elt>,
}

impl<F: Field> Poly<F> {
    pub fn from_coeffs(fld: &F, mut coeffs: Vec<F::Elt>) -> Self {
        while coeffs.last().map_or(false, |c| fld.is_zero(c)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one(fld: &F) -> Self {
        Self {
            coeffs: vec![fld.one()],
        }
    }

    pub fn constant(fld: &F, c: F::Elt) -> Self {
        Self::from_coeffs(fld, vec![c])
    }

    /// The indeterminate.
    pub fn x(fld: &F) -> Self {
        Self {
            coeffs: vec![fld.zero(), fld.one()],
        }
    }

    /// `x - r`.
    pub fn x_minus(fld: &F, r: &F::Elt) -> Self {
        Self {
            coeffs: vec![fld.neg(r), fld.one()],
        }
    }

    /// `x^n + c`.
    pub fn x_pow_plus(fld: &F, n: usize, c: F::Elt) -> Self {
        let mut coeffs = vec![fld.zero(); n + 1];
        coeffs[0] = c;
        coeffs[n] = fld.one();
        Self::from_coeffs(fld, coeffs)
    }

    pub fn coeffs(&self) -> &[F::Elt] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize, fld: &F) -> F::Elt {
        self.coeffs.get(i).cloned().unwrap_or_else(|| fld.zero())
    }

    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self, fld: &F) -> bool {
        self.coeffs.len() == 1 && fld.is_one(&self.coeffs[0])
    }

    pub fn leading(&self) -> Option<&F::Elt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self, fld: &F) -> bool {
        self.leading().map_or(false, |c| fld.is_one(c))
    }

    pub fn add(&self, other: &Self, fld: &F) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(fld.add(&self.coeff(i, fld), &other.coeff(i, fld)));
        }
        Self::from_coeffs(fld, out)
    }

    pub fn sub(&self, other: &Self, fld: &F) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(fld.sub(&self.coeff(i, fld), &other.coeff(i, fld)));
        }
        Self::from_coeffs(fld, out)
    }

    pub fn neg(&self, fld: &F) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| fld.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elt, fld: &F) -> Self {
        Self::from_coeffs(fld, self.coeffs.iter().map(|a| fld.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, fld: &F) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let out = if self.coeffs.len().min(other.coeffs.len()) > KARATSUBA_THRESHOLD {
            karatsuba(&self.coeffs, &other.coeffs, fld)
        } else {
            schoolbook(&self.coeffs, &other.coeffs, fld)
        };
        Self::from_coeffs(fld, out)
    }

    pub fn pow(&self, mut e: usize, fld: &F) -> Self {
        let mut acc = Self::one(fld);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, fld);
            }
            base = base.mul(&base, fld);
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder: `self = q * rhs + r` with `deg r < deg rhs`.
    pub fn divmod(&self, rhs: &Self, fld: &F) -> Result<(Self, Self), PolyError> {
        let d = rhs.deg().ok_or(PolyError::DivideByZeroPoly)?;
        let lead_inv = fld.inv(rhs.leading().unwrap()).expect("leading is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() < d + 1 {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![fld.zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = fld.mul(&rem[i], &lead_inv);
            if fld.is_zero(&c) {
                continue;
            }
            quot[i - d] = c.clone();
            for j in 0..=d {
                let t = fld.mul(&c, &rhs.coeffs[j]);
                rem[i - d + j] = fld.sub(&rem[i - d + j], &t);
            }
        }
        Ok((
            Self::from_coeffs(fld, quot),
            Self::from_coeffs(fld, rem),
        ))
    }

    pub fn rem(&self, rhs: &Self, fld: &F) -> Result<Self, PolyError> {
        Ok(self.divmod(rhs, fld)?.1)
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, rhs: &Self, fld: &F) -> Self {
        let (q, r) = self.divmod(rhs, fld).expect("nonzero divisor");
        assert!(r.is_zero(), "division was not exact");
        q
    }

    pub fn divides(&self, other: &Self, fld: &F) -> bool {
        match other.divmod(self, fld) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Monic greatest common divisor; `gcd(a, 0) = monic(a)`.
    pub fn gcd(&self, other: &Self, fld: &F) -> Result<Self, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, fld).unwrap();
            a = b;
            b = r;
        }
        Ok(a.monic(fld))
    }

    pub fn lcm(&self, other: &Self, fld: &F) -> Result<Self, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let g = self.gcd(other, fld)?;
        Ok(self.mul(other, fld).div_exact(&g, fld).monic(fld))
    }

    pub fn monic(&self, fld: &F) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(c) if fld.is_one(c) => self.clone(),
            Some(c) => self.scale(&fld.inv(c).unwrap(), fld),
        }
    }

    pub fn eval(&self, x: &F::Elt, fld: &F) -> F::Elt {
        let mut acc = fld.zero();
        for c in self.coeffs.iter().rev() {
            acc = fld.add(&fld.mul(&acc, x), c);
        }
        acc
    }

    pub fn derivative(&self, fld: &F) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut k = fld.zero();
            let one = fld.one();
            // i * c in the prime field: repeated addition is fine, but take
            // i mod p first so the loop stays short.
            let imodp = (i as u64) % fld.characteristic();
            for _ in 0..imodp {
                k = fld.add(&k, &one);
            }
            out.push(fld.mul(&k, c));
        }
        Self::from_coeffs(fld, out)
    }

    /// Canonical total order: by degree, then coefficient vectors
    /// lexicographically from the constant term up.
    pub fn cmp_canonical(&self, other: &Self, fld: &F) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            match fld.cmp_elts(a, b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

fn schoolbook<F: Field>(a: &[F::Elt], b: &[F::Elt], fld: &F) -> Vec<F::Elt> {
    let mut out = vec![fld.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if fld.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = fld.mul(x, y);
            out[i + j] = fld.add(&out[i + j], &t);
        }
    }
    out
}

fn karatsuba<F: Field>(a: &[F::Elt], b: &[F::Elt], fld: &F) -> Vec<F::Elt> {
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        return schoolbook(a, b, fld);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let z0 = karatsuba(a0, b0, fld);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        karatsuba(a1, b1, fld)
    };
    let asum = add_slices(a0, a1, fld);
    let bsum = add_slices(b0, b1, fld);
    let z1 = karatsuba(&asum, &bsum, fld);

    let mut out = vec![fld.zero(); a.len() + b.len() - 1];
    for (i, c) in z0.iter().enumerate() {
        out[i] = fld.add(&out[i], c);
    }
    for (i, c) in z1.iter().enumerate() {
        out[half + i] = fld.add(&out[half + i], c);
    }
    for (i, c) in z0.iter().enumerate() {
        out[half + i] = fld.sub(&out[half + i], c);
    }
    for (i, c) in z2.iter().enumerate() {
        out[half + i] = fld.sub(&out[half + i], c);
        out[2 * half + i] = fld.add(&out[2 * half + i], c);
    }
    out
}

fn add_slices<F: Field>(a: &[F::Elt], b: &[F::Elt], fld: &F) -> Vec<F::Elt> {
    let n = a.len().max(b.len()).max(1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| fld.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| fld.zero());
        out.push(fld.add(&x, &y));
    }
    out
}

/// Extended Euclid: returns monic `g = gcd(a, b)` and `(s, t)` with
/// `s*a + t*b = g`. At least one input must be nonzero.
pub fn ext_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>, fld: &F) -> (Poly<F>, Poly<F>, Poly<F>) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = Poly::one(fld);
    let mut s1 = Poly::zero();
    let mut t0 = Poly::zero();
    let mut t1 = Poly::one(fld);
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1, fld).unwrap();
        r0 = r1;
        r1 = r;
        let ns = s0.sub(&q.mul(&s1, fld), fld);
        s0 = s1;
        s1 = ns;
        let nt = t0.sub(&q.mul(&t1, fld), fld);
        t0 = t1;
        t1 = nt;
    }
    let lead = r0.leading().expect("not both zero").clone();
    let li = fld.inv(&lead).unwrap();
    (r0.scale(&li, fld), s0.scale(&li, fld), t0.scale(&li, fld))
}

/// `base^e mod modulus` with an arbitrary-precision exponent.
pub fn pow_mod<F: Field>(base: &Poly<F>, e: &BigUint, modulus: &Poly<F>, fld: &F) -> Poly<F> {
    let mut acc = Poly::one(fld).rem(modulus, fld).unwrap();
    let mut b = base.rem(modulus, fld).unwrap();
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = acc.mul(&b, fld).rem(modulus, fld).unwrap();
        }
        b = b.mul(&b, fld).rem(modulus, fld).unwrap();
    }
    acc
}

/// A complete factorization `unit * prod factors[i].0 ^ factors[i].1`.
/// Factors are monic irreducible, pairwise distinct, sorted canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<F: Field> {
    pub unit: F::Elt,
    pub factors: Vec<(Poly<F>, usize)>,
}

impl<F: Field> Factorization<F> {
    /// Reassemble the factored polynomial.
    pub fn value(&self, fld: &F) -> Poly<F> {
        let mut out = Poly::constant(fld, self.unit.clone());
        for (p, m) in &self.factors {
            out = out.mul(&p.pow(*m, fld), fld);
        }
        out
    }

    /// Number of monic divisors, `prod (m_i + 1)`.
    pub fn divisor_count(&self) -> BigUint {
        let mut n = BigUint::one();
        for (_, m) in &self.factors {
            n *= BigUint::from(*m as u64 + 1);
        }
        n
    }
}

/// All monic divisors, enumerated by exponent vector in lexicographic order
/// (the first factor's exponent varies slowest).
pub fn monic_divisors<F: Field>(fact: &Factorization<F>, fld: &F) -> Vec<Poly<F>> {
    let mut out = Vec::new();
    let s = fact.factors.len();
    let mut exps = vec![0usize; s];
    loop {
        let mut d = Poly::one(fld);
        for (i, (p, _)) in fact.factors.iter().enumerate() {
            if exps[i] > 0 {
                d = d.mul(&p.pow(exps[i], fld), fld);
            }
        }
        out.push(d);
        // Odometer with the last factor fastest.
        let mut i = s;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if exps[i] < fact.factors[i].1 {
                exps[i] += 1;
                for e in exps.iter_mut().skip(i + 1) {
                    *e = 0;
                }
                break;
            }
        }
    }
}

/// Squarefree decomposition over a finite field: pairwise coprime squarefree
/// monic parts with multiplicities whose product is `monic(f)`. Handles the
/// vanishing-derivative case by p-th root extraction.
pub fn squarefree_decomposition<F: Field>(
    f: &Poly<F>,
    fld: &F,
) -> Result<Vec<(Poly<F>, usize)>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPoly);
    }
    Ok(sqfree_inner(&f.monic(fld), fld))
}

fn sqfree_inner<F: Field>(f: &Poly<F>, fld: &F) -> Vec<(Poly<F>, usize)> {
    let mut out = Vec::new();
    if f.deg() == Some(0) {
        return out;
    }
    let p = fld.characteristic() as usize;
    let fd = f.derivative(fld);
    if fd.is_zero() {
        // f = g(x^p); recurse on the p-th root.
        let g = pth_root(f, fld);
        for (h, e) in sqfree_inner(&g, fld) {
            out.push((h, e * p));
        }
        return out;
    }
    let mut c = f.gcd(&fd, fld).unwrap();
    let mut w = f.div_exact(&c, fld);
    let mut i = 1usize;
    while !w.is_one(fld) {
        let y = w.gcd(&c, fld).unwrap();
        let z = w.div_exact(&y, fld);
        if !z.is_one(fld) {
            out.push((z, i));
        }
        w = y;
        c = c.div_exact(&w, fld);
        i += 1;
    }
    if !c.is_one(fld) {
        let g = pth_root(&c, fld);
        for (h, e) in sqfree_inner(&g, fld) {
            out.push((h, e * p));
        }
    }
    out
}

/// For `f = g(x^p)`, recover `g`: keep every p-th coefficient and take its
/// p-th root (`c^(|F|/p)` in a finite field of order `|F|`).
fn pth_root<F: Field>(f: &Poly<F>, fld: &F) -> Poly<F> {
    let p = fld.characteristic() as usize;
    let root_exp = BigUint::from(fld.order()) / BigUint::from(p);
    let mut out = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % p == 0 {
            out.push(fld.pow_big(c, &root_exp));
        } else {
            debug_assert!(fld.is_zero(c), "input is not a p-th power");
        }
    }
    Poly::from_coeffs(fld, out)
}

/// Complete factorization into monic irreducibles: squarefree decomposition,
/// then distinct-degree, then Cantor-Zassenhaus equal-degree splitting.
/// Deterministic for a given seed; the factor list is canonically sorted
/// either way.
pub fn factor<F: Field>(f: &Poly<F>, fld: &F, seed: u64) -> Result<Factorization<F>, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPoly);
    }
    let unit = f.leading().unwrap().clone();
    let mut rng = SplitMix64::new(seed);
    let mut factors: Vec<(Poly<F>, usize)> = Vec::new();
    for (part, mult) in squarefree_decomposition(f, fld)? {
        for (prod, d) in distinct_degree(&part, fld) {
            for irr in equal_degree(&prod, d, fld, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp_canonical(&b.0, fld));
    debug_assert!(factors.windows(2).all(|w| w[0].0 != w[1].0));
    Ok(Factorization { unit, factors })
}

/// Split a squarefree monic polynomial into products of irreducibles of the
/// same degree; returns `(product, degree)` pairs.
fn distinct_degree<F: Field>(f: &Poly<F>, fld: &F) -> Vec<(Poly<F>, usize)> {
    let mut out = Vec::new();
    let q = BigUint::from(fld.order());
    let mut rest = f.clone();
    let mut h = Poly::x(fld).rem(&rest, fld).unwrap();
    let x = Poly::x(fld);
    let mut d = 1usize;
    while rest.deg().map_or(false, |r| r >= 2 * d) {
        h = pow_mod(&h, &q, &rest, fld);
        let g = h.sub(&x, fld).gcd(&rest, fld).unwrap();
        if !g.is_one(fld) {
            out.push((g.clone(), d));
            rest = rest.div_exact(&g, fld);
            h = h.rem(&rest, fld).unwrap();
        }
        d += 1;
    }
    if rest.deg().map_or(false, |r| r >= 1) {
        let r = rest.deg().unwrap();
        out.push((rest, r));
    }
    out
}

/// Cantor-Zassenhaus splitting of a product of distinct irreducibles of known
/// degree `d`. Odd characteristic uses the `(q^d - 1)/2` power probe, and
/// characteristic 2 the trace-polynomial variant.
fn equal_degree<F: Field>(f: &Poly<F>, d: usize, fld: &F, rng: &mut SplitMix64) -> Vec<Poly<F>> {
    let deg = f.deg().unwrap();
    if deg == d {
        return vec![f.clone()];
    }
    let q = BigUint::from(fld.order());
    let split = loop {
        let mut coeffs: Vec<F::Elt> = (0..deg).map(|_| fld.random(rng)).collect();
        coeffs.push(fld.one());
        let b = Poly::from_coeffs(fld, coeffs);
        let probe = if fld.characteristic() == 2 {
            // Absolute trace to F_2 of the residue fields F_(2^(k*d)).
            let k = q.bits() - 1; // q = 2^k
            let steps = k * d as u64;
            let mut acc = b.rem(f, fld).unwrap();
            let mut term = b.rem(f, fld).unwrap();
            for _ in 1..steps {
                term = term.mul(&term, fld).rem(f, fld).unwrap();
                acc = acc.add(&term, fld);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let p = pow_mod(&b, &e, f, fld);
            p.sub(&Poly::one(fld), fld)
        };
        if probe.is_zero() {
            continue;
        }
        let g = probe.gcd(f, fld).unwrap();
        if !g.is_one(fld) && g.deg() < f.deg() {
            break g;
        }
    };
    let mut out = equal_degree(&split, d, fld, rng);
    out.extend(equal_degree(&f.div_exact(&split, fld), d, fld, rng));
    out
}

/// Rabin irreducibility test. Independent of [`factor`], so the two
/// cross-check each other.
pub fn is_irreducible<F: Field>(f: &Poly<F>, fld: &F) -> Result<bool, PolyError> {
    let d = match f.deg() {
        None | Some(0) => return Err(PolyError::ConstantPoly),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(true);
    }
    let q = BigUint::from(fld.order());
    let x = Poly::x(fld);
    // x^(q^e) mod f
    let frob_pow = |e: usize| -> Poly<F> {
        let mut acc = x.rem(f, fld).unwrap();
        for _ in 0..e {
            acc = pow_mod(&acc, &q, f, fld);
        }
        acc
    };
    if !frob_pow(d).sub(&x, fld).rem(f, fld).unwrap().is_zero() {
        return Ok(false);
    }
    for t in prime_divisors(d) {
        let g = frob_pow(d / t).sub(&x, fld).gcd(f, fld).unwrap();
        if !g.is_one(fld) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The n-th cyclotomic polynomial over `fld`, by the divisor recursion
/// `Phi_n = (x^n - 1) / prod_(d | n, d < n) Phi_d`. Requires `n` coprime to
/// the characteristic; the degree is `phi(n)`.
pub fn cyclotomic<F: Field>(n: u64, fld: &F) -> Result<Poly<F>, PolyError> {
    assert!(n >= 1);
    if n % fld.characteristic() == 0 {
        return Err(PolyError::NotCoprimeToCharacteristic);
    }
    let mut memo: Vec<(u64, Poly<F>)> = Vec::new();
    let mut divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    divs.sort_unstable();
    for d in divs {
        let mut num = Poly::x_pow_plus(fld, d as usize, fld.neg(&fld.one()));
        for (dd, phi) in &memo {
            if d % dd == 0 && *dd < d {
                num = num.div_exact(phi, fld);
            }
        }
        memo.push((d, num));
    }
    Ok(memo.pop().unwrap().1)
}

/// Number of irreducible divisors of `fi` over `L`, for `fi` irreducible
/// over `K`. Over finite fields this is `gcd(m, deg fi)`; debug builds check
/// the fast path against an actual factorization over `L`.
pub fn num_factors_over_l(fi: &Poly<KField>, t: &FieldTower) -> Result<usize, PolyError> {
    if !is_irreducible(fi, t.k())? {
        return Err(PolyError::NotIrreducible);
    }
    let d = fi.deg().unwrap();
    let fast = gcd_usize(t.m(), d);
    #[cfg(debug_assertions)]
    {
        let lifted = crate::gf::lift_to_l(t, fi);
        let fact = factor(&lifted, t.l(), 0).unwrap();
        let total: usize = fact.factors.iter().map(|(_, m)| m).sum();
        debug_assert_eq!(total, fast);
        debug_assert!(fact
            .factors
            .iter()
            .all(|(p, _)| p.deg() == Some(d / fast)));
    }
    Ok(fast)
}

fn gcd_usize(a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Ext, Fp};
    use proptest::prelude::*;

    fn kf(p: u64) -> KField {
        Ext::new(Fp::new(p), Poly::from_coeffs(&Fp::new(p), vec![0, 1]))
    }

    fn kpoly(p: u64, coeffs: &[i64]) -> Poly<KField> {
        let k = kf(p);
        Poly::from_coeffs(
            &k,
            coeffs
                .iter()
                .map(|&c| {
                    let r = c.rem_euclid(p as i64) as u64;
                    k.from_u64(r)
                })
                .collect(),
        )
    }

    #[test]
    fn divmod_self_and_eval_root() {
        let k = kf(7);
        let f = kpoly(7, &[-1, 0, 0, 0, 1]); // x^4 - 1
        let (q, r) = f.divmod(&f, &k).unwrap();
        assert!(q.is_one(&k));
        assert!(r.is_zero());
        assert!(k.is_zero(&f.eval(&k.one(), &k)));
        assert!(matches!(
            f.divmod(&Poly::zero(), &k),
            Err(PolyError::DivideByZeroPoly)
        ));
    }

    /// Naive convolution, independent of `Poly::mul`.
    fn naive_mul(a: &Poly<KField>, b: &Poly<KField>, k: &KField) -> Poly<KField> {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![k.zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for i in 0..a.coeffs().len() {
            for j in 0..b.coeffs().len() {
                let t = k.mul(&a.coeffs()[i], &b.coeffs()[j]);
                out[i + j] = k.add(&out[i + j], &t);
            }
        }
        Poly::from_coeffs(k, out)
    }

    #[test]
    fn expansion_matches_naive_oracle() {
        let k = kf(3);
        // (x^2+1)^2 (x+1)^3 (x-1)^2 over F_3
        let f1 = kpoly(3, &[1, 0, 1]);
        let f2 = kpoly(3, &[1, 1]);
        let f3 = kpoly(3, &[-1, 1]);
        let f = f1.pow(2, &k).mul(&f2.pow(3, &k), &k).mul(&f3.pow(2, &k), &k);
        let mut oracle = Poly::one(&k);
        for p in [&f1, &f1, &f2, &f2, &f2, &f3, &f3] {
            oracle = naive_mul(&oracle, p, &k);
        }
        assert_eq!(f, oracle);
        assert_eq!(f.deg(), Some(9));
        assert!(f.is_monic(&k));
        assert_eq!(f.eval(&k.from_u64(0), &k), k.from_u64(1));
    }

    #[test]
    fn gcd_examples() {
        let k = kf(5);
        let a = kpoly(5, &[-1, 1]).pow(2, &k).mul(&kpoly(5, &[1, 1]), &k);
        let b = kpoly(5, &[-1, 1]).mul(&kpoly(5, &[1, 1]).pow(2, &k), &k);
        // Factor-wise min oracle: gcd = (x-1)(x+1).
        let expected = kpoly(5, &[-1, 1]).mul(&kpoly(5, &[1, 1]), &k);
        assert_eq!(a.gcd(&b, &k).unwrap(), expected.monic(&k));
        // gcd(a, a) = monic(a); gcd(a, 0) = monic(a).
        let c = a.scale(&k.from_u64(3), &k);
        assert_eq!(c.gcd(&c, &k).unwrap(), a.monic(&k));
        assert_eq!(c.gcd(&Poly::zero(), &k).unwrap(), a.monic(&k));
        assert!(matches!(
            Poly::<KField>::zero().gcd(&Poly::zero(), &k),
            Err(PolyError::BothZero)
        ));
    }

    #[test]
    fn squarefree_examples() {
        let k = kf(3);
        // Squarefree input comes back unchanged with multiplicity 1.
        let f = kpoly(3, &[1, 0, 1]).mul(&kpoly(3, &[1, 1]), &k);
        let parts = squarefree_decomposition(&f, &k).unwrap();
        assert_eq!(parts, vec![(f.monic(&k), 1)]);

        // (x^2+1)^2 (x+1)^3 (x-1)^2: parts of multiplicity 2 and 3.
        let f = kpoly(3, &[1, 0, 1])
            .pow(2, &k)
            .mul(&kpoly(3, &[1, 1]).pow(3, &k), &k)
            .mul(&kpoly(3, &[-1, 1]).pow(2, &k), &k);
        let parts = squarefree_decomposition(&f, &k).unwrap();
        let mut mults: Vec<usize> = parts.iter().map(|(_, m)| *m).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![2, 3]);
        let mut prod = Poly::one(&k);
        for (p, m) in &parts {
            prod = prod.mul(&p.pow(*m, &k), &k);
        }
        assert_eq!(prod, f.monic(&k));
    }

    #[test]
    fn squarefree_pth_power() {
        let k = kf(5);
        // x^5 - 2 = (x - 2)^5 over F_5; Frobenius-root oracle: expand back.
        let f = kpoly(5, &[-2, 0, 0, 0, 0, 1]);
        let parts = squarefree_decomposition(&f, &k).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 5);
        assert_eq!(parts[0].0, kpoly(5, &[-2, 1]));
        assert_eq!(parts[0].0.pow(5, &k), f);
    }

    #[test]
    fn factor_x4_minus_1_over_f7() {
        let k = kf(7);
        let f = kpoly(7, &[-1, 0, 0, 0, 1]);
        let fact = factor(&f, &k, 0).unwrap();
        assert_eq!(fact.value(&k), f);
        let degs: Vec<usize> = fact.factors.iter().map(|(p, _)| p.deg().unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 2]);
        assert!(fact.factors.iter().all(|(_, m)| *m == 1));
        assert!(fact.factors.iter().any(|(p, _)| *p == kpoly(7, &[1, 0, 1])));
        // Deterministic across seeds thanks to canonical ordering.
        assert_eq!(factor(&f, &k, 12345).unwrap(), fact);
    }

    #[test]
    fn factor_irreducible_is_identity() {
        let k = kf(3);
        let f = kpoly(3, &[1, 0, 1]);
        let fact = factor(&f, &k, 7).unwrap();
        assert_eq!(fact.factors, vec![(f.clone(), 1)]);
    }

    #[test]
    fn factor_splits_cube_roots_in_big_extension() {
        // x^2 + x + 1 splits as (x - j)(x - j^2) over F_5^18.
        let t = FieldTower::new(5, 1, 18, None, 0).unwrap();
        let l = t.l();
        let f = Poly::from_coeffs(l, vec![l.one(), l.one(), l.one()]);
        let fact = factor(&f, l, 0).unwrap();
        assert_eq!(fact.factors.len(), 2);
        assert!(fact.factors.iter().all(|(p, _)| p.deg() == Some(1)));
        // Re-expansion oracle.
        assert_eq!(fact.value(l), f);
        let j = l.neg(&fact.factors[0].0.coeffs()[0]);
        let j2 = l.neg(&fact.factors[1].0.coeffs()[0]);
        assert_eq!(l.mul(&j, &j), j2);
    }

    #[test]
    fn irreducibility_cases() {
        let k3 = kf(3);
        assert!(is_irreducible(&kpoly(3, &[1, 0, 1]), &k3).unwrap());
        assert!(is_irreducible(&kpoly(3, &[2, 1]), &k3).unwrap());
        // x^2 + 2 = (x-1)(x+1) over F_3
        assert!(!is_irreducible(&kpoly(3, &[2, 0, 1]), &k3).unwrap());
        assert!(matches!(
            is_irreducible(&Poly::one(&k3), &k3),
            Err(PolyError::ConstantPoly)
        ));
        // x^2 + 1 over a field containing F_49 has roots (7^2 = 1 mod 4).
        let t = FieldTower::new(7, 1, 4, None, 0).unwrap();
        let l = t.l();
        let f = Poly::from_coeffs(l, vec![l.one(), l.zero(), l.one()]);
        assert!(!is_irreducible(&f, l).unwrap());
    }

    #[test]
    fn cyclotomic_basics() {
        let k = kf(7);
        assert_eq!(cyclotomic(1, &k).unwrap(), kpoly(7, &[-1, 1]));
        // Phi_4 over F_7 = (x^4-1)/((x-1)(x+1)) = x^2+1, computed by oracle division.
        let oracle = kpoly(7, &[-1, 0, 0, 0, 1])
            .div_exact(&kpoly(7, &[-1, 1]), &k)
            .div_exact(&kpoly(7, &[1, 1]), &k);
        assert_eq!(cyclotomic(4, &k).unwrap(), oracle);
        assert_eq!(oracle, kpoly(7, &[1, 0, 1]));
        // Product over d | 12 of Phi_d = x^12 - 1 over F_5.
        let k5 = kf(5);
        let mut prod = Poly::one(&k5);
        for d in [1u64, 2, 3, 4, 6, 12] {
            prod = prod.mul(&cyclotomic(d, &k5).unwrap(), &k5);
        }
        assert_eq!(prod, kpoly(5, &[-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
        assert!(matches!(
            cyclotomic(10, &k5),
            Err(PolyError::NotCoprimeToCharacteristic)
        ));
    }

    #[test]
    fn cyclotomic_factor_shape() {
        // Phi_n over F_q factors into phi(n)/o_n(q) irreducibles of degree o_n(q).
        for (n, q) in [(5u64, 2u64), (8, 3), (12, 7), (9, 2)] {
            let k = kf(q);
            let phi = cyclotomic(n, &k).unwrap();
            let fact = factor(&phi, &k, 0).unwrap();
            let o = crate::gf::mult_order(q as u128, n).unwrap() as usize;
            let tot = crate::gf::euler_phi(n) as usize;
            assert_eq!(fact.factors.len(), tot / o);
            assert!(fact.factors.iter().all(|(p, m)| p.deg() == Some(o) && *m == 1));
        }
    }

    #[test]
    fn l_factor_counts() {
        // deg fi = 2, m = 18: splits into 2 over L.
        let t = FieldTower::new(5, 1, 18, None, 0).unwrap();
        let f = kpoly(5, &[-2, 0, 1]); // x^2 - 2, irreducible over F_5
        assert_eq!(num_factors_over_l(&f, &t).unwrap(), 2);
        // deg 1 stays 1.
        assert_eq!(num_factors_over_l(&kpoly(5, &[1, 1]), &t).unwrap(), 1);
        // deg 2 with m = 3 stays irreducible.
        let t3 = FieldTower::new(5, 1, 3, None, 0).unwrap();
        assert_eq!(num_factors_over_l(&f, &t3).unwrap(), 1);
        // Reducible input is rejected.
        assert!(matches!(
            num_factors_over_l(&kpoly(5, &[-1, 0, 1]), &t3),
            Err(PolyError::NotIrreducible)
        ));
    }

    #[test]
    fn divisor_enumeration() {
        let k = kf(7);
        let f = kpoly(7, &[-1, 0, 0, 0, 1]);
        let fact = factor(&f, &k, 0).unwrap();
        let divs = monic_divisors(&fact, &k);
        assert_eq!(divs.len(), 8); // 2*2*2
        assert_eq!(BigUint::from(divs.len() as u64), fact.divisor_count());
        // All distinct, all divide f.
        for (i, d) in divs.iter().enumerate() {
            assert!(d.divides(&f, &k));
            for d2 in &divs[i + 1..] {
                assert_ne!(d, d2);
            }
        }
    }

    #[test]
    fn gcd_with_l_coefficients() {
        // gcd(g, x+1) = 1 for g = (x-1)(x-(4w^2-2)) over F_7^4 with w^4 = w^2+1.
        let k = kf(7);
        let lmod = Poly::from_coeffs(&k, vec![vec![6], vec![0], vec![6], vec![0], vec![1]]);
        let t = FieldTower::new(7, 1, 4, Some(lmod), 0).unwrap();
        let l = t.l();
        let w = l.generator();
        let alpha = l.add(
            &l.mul(&l.from_u64(4), &l.mul(&w, &w)),
            &l.from_u64(5), // -2 = 5 mod 7
        );
        let g = Poly::x_minus(l, &l.one()).mul(&Poly::x_minus(l, &alpha), l);
        let xp1 = Poly::from_coeffs(l, vec![l.one(), l.one()]);
        assert!(g.gcd(&xp1, l).unwrap().is_one(l));
    }

    #[test]
    fn gcd_invariant_under_scalar_extension() {
        let t = FieldTower::new(3, 1, 4, None, 11).unwrap();
        let k = t.k();
        let mut rng = SplitMix64::new(23);
        for _ in 0..20 {
            let a = Poly::from_coeffs(k, (0..6).map(|_| k.random(&mut rng)).collect::<Vec<_>>());
            let b = Poly::from_coeffs(k, (0..5).map(|_| k.random(&mut rng)).collect::<Vec<_>>());
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let g_k = a.gcd(&b, k).unwrap();
            let g_l = crate::gf::lift_to_l(&t, &a)
                .gcd(&crate::gf::lift_to_l(&t, &b), t.l())
                .unwrap();
            assert_eq!(crate::gf::lift_to_l(&t, &g_k), g_l);
        }
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let k = kf(2);
        let mut rng = SplitMix64::new(99);
        for _ in 0..5 {
            let a = Poly::from_coeffs(&k, (0..150).map(|_| k.random(&mut rng)).collect::<Vec<_>>());
            let b = Poly::from_coeffs(&k, (0..130).map(|_| k.random(&mut rng)).collect::<Vec<_>>());
            let fast = a.mul(&b, &k);
            let slow = Poly::from_coeffs(&k, schoolbook(a.coeffs(), b.coeffs(), &k));
            assert_eq!(fast, slow);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn factor_round_trip_f3(coeffs in proptest::collection::vec(0u64..3, 1..12), seed in 0u64..100) {
            let k = kf(3);
            let f = Poly::from_coeffs(&k, coeffs.iter().map(|&c| k.from_u64(c)).collect::<Vec<_>>());
            prop_assume!(!f.is_zero());
            let fact = factor(&f, &k, seed).unwrap();
            prop_assert_eq!(fact.value(&k), f);
            for (p, _) in &fact.factors {
                prop_assert!(p.is_monic(&k));
                prop_assert!(is_irreducible(p, &k).unwrap());
            }
        }

        #[test]
        fn factor_round_trip_f4(idx in proptest::collection::vec(0u64..4, 1..10), seed in 0u64..100) {
            let t = FieldTower::new(2, 1, 2, None, 1).unwrap();
            let l = t.l();
            let f = Poly::from_coeffs(l, idx.iter().map(|&c| l.from_index(c as u128)).collect::<Vec<_>>());
            prop_assume!(!f.is_zero());
            let fact = factor(&f, l, seed).unwrap();
            prop_assert_eq!(fact.value(l), f);
            for (p, _) in &fact.factors {
                prop_assert!(is_irreducible(p, l).unwrap());
            }
        }

        #[test]
        fn divmod_invariant(a in proptest::collection::vec(0u64..5, 0..10),
                            b in proptest::collection::vec(0u64..5, 1..8)) {
            let k = kf(5);
            let pa = Poly::from_coeffs(&k, a.iter().map(|&c| k.from_u64(c)).collect::<Vec<_>>());
            let pb = Poly::from_coeffs(&k, b.iter().map(|&c| k.from_u64(c)).collect::<Vec<_>>());
            prop_assume!(!pb.is_zero());
            let (q, r) = pa.divmod(&pb, &k).unwrap();
            prop_assert_eq!(q.mul(&pb, &k).add(&r, &k), pa);
            if let (Some(rd), Some(bd)) = (r.deg(), pb.deg()) {
                prop_assert!(rd < bd);
            }
        }
    }
}
