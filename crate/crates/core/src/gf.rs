//! The field tower `F_p ⊆ K = F_q ⊆ L = F_{q^m}` and its arithmetic.
//!
//! Every field is a context object: elements are plain data (`u64` for prime
//! fields, coefficient vectors for extensions) and all operations go through
//! the owning [`Field`]. Extension elements are kept in canonical form: the
//! coefficient vector always has length exactly equal to the extension degree
//! and is fully reduced modulo the defining polynomial, so equality is
//! coefficient-wise.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;

use crate::polyfact::{self, Poly};
use crate::rng::SplitMix64;

/// Exact arithmetic in a finite field, with enough introspection to
/// enumerate and order elements deterministically.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elt: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elt;
    fn one(&self) -> Self::Elt;
    /// Image of an integer under `Z -> F` (through the prime subfield).
    fn from_u64(&self, n: u64) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elt) -> Option<Self::Elt>;
    fn characteristic(&self) -> u64;
    /// Number of elements. Panics if it does not fit in `u128`; every scale
    /// this crate targets fits comfortably.
    fn order(&self) -> u128;
    /// Position of `a` in the mixed-radix enumeration of the field.
    fn index_of(&self, a: &Self::Elt) -> u128;
    /// Inverse of [`Field::index_of`].
    fn from_index(&self, idx: u128) -> Self::Elt;
    /// Lexicographic order on coefficient vectors, constant coefficient first.
    fn cmp_elts(&self, a: &Self::Elt, b: &Self::Elt) -> Ordering;

    fn is_one(&self, a: &Self::Elt) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elt, b: &Self::Elt) -> Option<Self::Elt> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elt, mut e: u128) -> Self::Elt {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn pow_big(&self, a: &Self::Elt, e: &BigUint) -> Self::Elt {
        let mut acc = self.one();
        let mut base = a.clone();
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
        }
        acc
    }

    fn random(&self, rng: &mut SplitMix64) -> Self::Elt {
        self.from_index(rng.below(self.order()))
    }
}

/// The prime field `F_p`. Elements are integers in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Callers are expected to have checked primality (see [`is_prime_u64`]).
    pub fn new(p: u64) -> Self {
        debug_assert!(p >= 2);
        Self { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for Fp {
    type Elt = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn from_u64(&self, n: u64) -> u64 {
        n % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = (*a as u128) + (*b as u128);
        (s % self.p as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            // Fermat: a^(p-2). Avoids signed-overflow pitfalls of ext-gcd.
            Some(self.pow(a, (self.p - 2) as u128))
        }
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn order(&self) -> u128 {
        self.p as u128
    }

    fn index_of(&self, a: &u64) -> u128 {
        *a as u128
    }

    fn from_index(&self, idx: u128) -> u64 {
        debug_assert!(idx < self.p as u128);
        idx as u64
    }

    fn cmp_elts(&self, a: &u64, b: &u64) -> Ordering {
        a.cmp(b)
    }
}

/// The extension `B[t]/(modulus)`. Elements are coefficient vectors of
/// length exactly `deg(modulus)`, reduced, low-order coefficient first.
///
/// Field semantics require `modulus` to be irreducible over `B`;
/// [`FieldTower::new`] is the verified entry point.
#[derive(Debug, Clone, PartialEq)]
pub struct Ext<B: Field> {
    base: B,
    modulus: Vec<B::Elt>,
}

impl<B: Field> Ext<B> {
    pub fn new(base: B, modulus: Poly<B>) -> Self {
        let coeffs = modulus.coeffs().to_vec();
        debug_assert!(coeffs.len() >= 2, "extension degree must be >= 1");
        debug_assert!(base.is_one(coeffs.last().unwrap()), "modulus must be monic");
        Self {
            base,
            modulus: coeffs,
        }
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> Poly<B> {
        Poly::from_coeffs(&self.base, self.modulus.clone())
    }

    /// The residue class of the indeterminate (the power-basis generator).
    /// For degree-1 extensions this is `-modulus[0]`, a base element.
    pub fn generator(&self) -> Vec<B::Elt> {
        let d = self.degree();
        if d == 1 {
            vec![self.base.neg(&self.modulus[0])]
        } else {
            let mut g = vec![self.base.zero(); d];
            g[1] = self.base.one();
            g
        }
    }

    pub fn embed(&self, a: &B::Elt) -> Vec<B::Elt> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = a.clone();
        v
    }

    /// Inverse of [`Ext::embed`] when the element lies in the base field.
    pub fn retract(&self, a: &Vec<B::Elt>) -> Option<B::Elt> {
        if a[1..].iter().all(|c| self.base.is_zero(c)) {
            Some(a[0].clone())
        } else {
            None
        }
    }

    fn reduce(&self, mut work: Vec<B::Elt>) -> Vec<B::Elt> {
        let d = self.degree();
        // work has degree <= 2d-2; peel leading terms with the monic modulus.
        for i in (d..work.len()).rev() {
            let c = work[i].clone();
            if self.base.is_zero(&c) {
                continue;
            }
            for j in 0..d {
                let t = self.base.mul(&c, &self.modulus[j]);
                work[i - d + j] = self.base.sub(&work[i - d + j], &t);
            }
        }
        work.truncate(d);
        while work.len() < d {
            work.push(self.base.zero());
        }
        work
    }
}

impl<B: Field> Field for Ext<B> {
    type Elt = Vec<B::Elt>;

    fn zero(&self) -> Self::Elt {
        vec![self.base.zero(); self.degree()]
    }

    fn one(&self) -> Self::Elt {
        self.embed(&self.base.one())
    }

    fn from_u64(&self, n: u64) -> Self::Elt {
        self.embed(&self.base.from_u64(n))
    }

    fn is_zero(&self, a: &Self::Elt) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }

    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elt) -> Self::Elt {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt {
        let d = self.degree();
        let mut work = vec![self.base.zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.base.mul(x, y);
                work[i + j] = self.base.add(&work[i + j], &t);
            }
        }
        self.reduce(work)
    }

    fn inv(&self, a: &Self::Elt) -> Option<Self::Elt> {
        if self.is_zero(a) {
            return None;
        }
        let pa = Poly::from_coeffs(&self.base, a.clone());
        let pm = self.modulus();
        let (g, s, _) = polyfact::ext_gcd(&pa, &pm, &self.base);
        // g is a nonzero constant because the modulus is irreducible.
        debug_assert_eq!(g.deg(), Some(0));
        let ginv = self.base.inv(&g.coeffs()[0]).expect("gcd is nonzero");
        let mut out = self.zero();
        for (i, c) in s.coeffs().iter().enumerate() {
            out[i] = self.base.mul(c, &ginv);
        }
        Some(out)
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn order(&self) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..self.degree() {
            acc = acc
                .checked_mul(self.base.order())
                .expect("field too large to enumerate");
        }
        acc
    }

    fn index_of(&self, a: &Self::Elt) -> u128 {
        let radix = self.base.order();
        let mut idx: u128 = 0;
        for c in a.iter().rev() {
            idx = idx * radix + self.base.index_of(c);
        }
        idx
    }

    fn from_index(&self, mut idx: u128) -> Self::Elt {
        let radix = self.base.order();
        let mut out = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            out.push(self.base.from_index(idx % radix));
            idx /= radix;
        }
        out
    }

    fn cmp_elts(&self, a: &Self::Elt, b: &Self::Elt) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match self.base.cmp_elts(x, y) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// `K = F_q` realized as `F_p[y]/(kmod)` (with `kmod = y` when `q` is prime).
pub type KField = Ext<Fp>;
/// `L = F_{q^m}` realized as `K[w]/(lmod)`.
pub type LField = Ext<KField>;
/// Element of `K`: coefficient vector over `F_p` of length `e`.
pub type KElt = Vec<u64>;
/// Element of `L`: coefficient vector over `K` of length `m`.
pub type LElt = Vec<KElt>;

#[derive(Debug, Clone, PartialEq)]
pub enum TowerError {
    NotPrime(u64),
    /// The supplied modulus is reducible; carries a proper factor as witness.
    ReducibleModulus(Poly<KField>),
    DegreeMismatch {
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for TowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerError::NotPrime(p) => write!(f, "{p} is not prime"),
            TowerError::ReducibleModulus(w) => {
                write!(f, "modulus is reducible (witness factor {:?})", w)
            }
            TowerError::DegreeMismatch { expected, got } => {
                write!(f, "expected degree {expected}, got {got}")
            }
        }
    }
}

/// The tower `F_p ⊆ K = F_{p^e} ⊆ L = F_{q^m}` with `q = p^e`, fixed moduli
/// and the power basis `(1, w, ..., w^{m-1})` of `L` over `K`.
///
/// All values are immutable after construction and every operation is a pure
/// function, so a tower can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct FieldTower {
    p: u64,
    e: usize,
    m: usize,
    q: u128,
    k: KField,
    l: LField,
}

impl FieldTower {
    /// Build a verified tower. When `lmod` is absent, a deterministic
    /// pseudo-random irreducible of degree `m` over `K` is derived from
    /// `seed` (same for the inner modulus when `e > 1`).
    pub fn new(
        p: u64,
        e: usize,
        m: usize,
        lmod: Option<Poly<KField>>,
        seed: u64,
    ) -> Result<Self, TowerError> {
        if !is_prime_u64(p) {
            return Err(TowerError::NotPrime(p));
        }
        if e == 0 {
            return Err(TowerError::DegreeMismatch {
                expected: 1,
                got: 0,
            });
        }
        if m == 0 {
            return Err(TowerError::DegreeMismatch {
                expected: 1,
                got: 0,
            });
        }
        let prime = Fp::new(p);
        let mut rng = SplitMix64::new(seed);
        let kmod = if e == 1 {
            Poly::from_coeffs(&prime, vec![0, 1])
        } else {
            random_irreducible(&prime, e, &mut rng.fork(0x6b6d))
        };
        let k = Ext::new(prime, kmod);
        let q = k.order();

        let lmod = match lmod {
            Some(f) => {
                let deg = f.deg().unwrap_or(0);
                if deg != m || !f.is_monic(&k) {
                    return Err(TowerError::DegreeMismatch {
                        expected: m,
                        got: deg,
                    });
                }
                if m > 1 {
                    let fact = polyfact::factor(&f, &k, seed).expect("nonzero modulus");
                    if fact.factors.len() != 1 || fact.factors[0].1 != 1 {
                        return Err(TowerError::ReducibleModulus(fact.factors[0].0.clone()));
                    }
                }
                f
            }
            None => random_irreducible(&k, m, &mut rng.fork(0x6c6d)),
        };
        let l = Ext::new(k.clone(), lmod);
        Ok(Self { p, e, m, q, k, l })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Extension degree `[L : K]`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `q = p^e`, the size of `K`.
    pub fn q(&self) -> u128 {
        self.q
    }

    pub fn k(&self) -> &KField {
        &self.k
    }

    pub fn l(&self) -> &LField {
        &self.l
    }

    /// Most statements about rank weights assume `m >= n`; callers of the
    /// code-level operations should surface a warning when this fails.
    pub fn meets_length_convention(&self, n: usize) -> bool {
        self.m >= n
    }

    pub fn embed(&self, a: &KElt) -> LElt {
        self.l.embed(a)
    }

    /// `x^(q^i)`, the `i`-fold `q`-power Frobenius. Indices are taken mod `m`
    /// since the Galois orbit closes after `m` steps.
    pub fn frobenius(&self, x: &LElt, i: usize) -> LElt {
        let mut out = x.clone();
        for _ in 0..(i % self.m) {
            out = self.l.pow(&out, self.q);
        }
        out
    }

    /// A root of `h` in `L` when one exists. Deterministic: of all roots, the
    /// one with the lexicographically smallest coefficient vector is chosen.
    pub fn find_root(&self, h: &Poly<KField>) -> Option<LElt> {
        assert!(h.deg().map_or(false, |d| d >= 1), "find_root needs a nonconstant input");
        let hl = lift_to_l(self, h);
        let fact = polyfact::factor(&hl, &self.l, 0).expect("nonzero input");
        let mut best: Option<LElt> = None;
        for (p, _) in &fact.factors {
            if p.deg() == Some(1) {
                let root = self.l.neg(&p.coeffs()[0]);
                best = match best {
                    None => Some(root),
                    Some(b) => {
                        if self.l.cmp_elts(&root, &b) == Ordering::Less {
                            Some(root)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        best
    }
}

/// Coefficient-wise embedding `K[x] -> L[x]`.
pub fn lift_to_l(t: &FieldTower, f: &Poly<KField>) -> Poly<LField> {
    Poly::from_coeffs(
        t.l(),
        f.coeffs().iter().map(|c| t.embed(c)).collect::<Vec<_>>(),
    )
}

/// Entry-wise embedding of a `K`-matrix into `L`.
pub fn lift_matrix_to_l(
    t: &FieldTower,
    m: &crate::matmod::Matrix<KField>,
) -> crate::matmod::Matrix<LField> {
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            data.push(t.embed(m.at(i, j)));
        }
    }
    crate::matmod::Matrix::new(m.rows(), m.cols(), data)
}

fn random_irreducible<F: Field>(fld: &F, d: usize, rng: &mut SplitMix64) -> Poly<F> {
    loop {
        let mut coeffs: Vec<F::Elt> = (0..d).map(|_| fld.random(rng)).collect();
        coeffs.push(fld.one());
        let cand = Poly::from_coeffs(fld, coeffs);
        if polyfact::is_irreducible(&cand, fld).expect("nonconstant candidate") {
            return cand;
        }
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow_mod = |b: u64, mut e: u64| -> u64 {
        let m = n as u128;
        let mut acc: u128 = 1;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        acc as u64
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumError {
    NotCoprime { q: u128, d: u64 },
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::NotCoprime { q, d } => write!(f, "{q} and {d} are not coprime"),
        }
    }
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n >= 1);
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

/// Least `t >= 1` with `q^t = 1 (mod d)`; requires `gcd(q, d) = 1`.
pub fn mult_order(q: u128, d: u64) -> Result<u64, NumError> {
    assert!(d >= 1);
    if d == 1 {
        return Ok(1);
    }
    let qd = (q % d as u128) as u64;
    if gcd_u64(qd, d) != 1 {
        return Err(NumError::NotCoprime { q, d });
    }
    let mut acc = qd % d;
    let mut t = 1u64;
    while acc != 1 {
        acc = ((acc as u128 * qd as u128) % d as u128) as u64;
        t += 1;
    }
    Ok(t)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
