//! Closed-form proportions of generator-polynomial codes whose first rank
//! weight differs from 1, their extremal characterizations, the cyclic and
//! odd-length negacyclic specializations via cyclotomic data, and an
//! exhaustive enumerator that validates the formulas.
//!
//! Every proportion is an exact rational; the acceptance criteria are
//! equalities, not tolerances.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::gf::{
    euler_phi, is_prime_u64, lift_to_l, mult_order, Field, FieldTower, KField,
};
use crate::matmod::companion;
use crate::mcode::{first_weight_is_one, McodeError, MCyclicCode};
use crate::polyfact::{self, Poly};

#[derive(Debug, Clone, PartialEq)]
pub enum CensusError {
    /// The divisor lattice has this many entries, above the cap.
    TooLarge(BigUint),
    NotCoprime,
    /// Only odd lengths have the clean cyclotomic description.
    EvenN,
    NotPrimePower,
}

impl fmt::Display for CensusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CensusError::TooLarge(n) => {
                write!(f, "divisor lattice of size {n} exceeds the cap")
            }
            CensusError::NotCoprime => f.write_str("length must be coprime to the field size"),
            CensusError::EvenN => f.write_str("only odd lengths are supported here"),
            CensusError::NotPrimePower => f.write_str("q must be a prime power"),
        }
    }
}

/// Exact nonnegative rational, always reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rational {
    num: BigUint,
    den: BigUint,
}

impl Rational {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero());
        let g = num.gcd(&den);
        Self {
            num: &num / &g,
            den: &den / &g,
        }
    }

    pub fn from_ints(num: u64, den: u64) -> Self {
        Self::new(BigUint::from(num), BigUint::from(den))
    }

    pub fn one() -> Self {
        Self {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    /// `1 - self`; requires `self <= 1`.
    pub fn one_minus(&self) -> Self {
        assert!(self.num <= self.den);
        Self::new(&self.den - &self.num, self.den.clone())
    }

    pub fn pow(&self, e: usize) -> Self {
        Self {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        }
    }

    /// Approximate value for display purposes only.
    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / self.den.to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Census of the divisor lattice of one minimal polynomial: how many of the
/// stable codes have first rank weight different from 1, with the proportion
/// and its extremal bounds as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    /// Number of monic divisors of `f` over `L`.
    pub total: BigUint,
    /// Divisors whose code has first weight different from 1 (the zero code
    /// counts here).
    pub count_not_one: BigUint,
    pub proportion: Rational,
    pub lower: Rational,
    pub upper: Rational,
    /// Lower bound attained iff every `f_i` stays irreducible over `L`.
    pub lower_attained: bool,
    /// Upper bound attained iff `f` splits completely over `L`.
    pub upper_attained: bool,
}

/// Per-irreducible-factor census data: multiplicity in `f`, degree, and the
/// number of irreducible factors over `L`.
struct FactorData {
    mi: usize,
    deg: usize,
    delta: usize,
}

fn report_from_factors(data: &[FactorData]) -> CensusReport {
    let mut total = BigUint::one();
    let mut count = BigUint::one();
    let mut proportion = Rational::one();
    let mut lower = Rational::one();
    let mut upper = Rational::one();
    for d in data {
        let mi = d.mi as u64;
        let div_count = BigUint::from(mi + 1).pow(d.delta as u32);
        let not_one = &div_count - BigUint::from(mi).pow(d.delta as u32);
        total *= &div_count;
        count *= &not_one;
        proportion = proportion.mul(&Rational::from_ints(mi, mi + 1).pow(d.delta).one_minus());
        lower = lower.mul(&Rational::from_ints(1, mi + 1));
        upper = upper.mul(&Rational::from_ints(mi, mi + 1).pow(d.deg).one_minus());
    }
    // Two routes to the proportion must agree exactly.
    assert_eq!(proportion, Rational::new(count.clone(), total.clone()));
    assert!(lower <= proportion && proportion <= upper);
    CensusReport {
        total,
        count_not_one: count,
        proportion,
        lower,
        upper,
        lower_attained: data.iter().all(|d| d.delta == 1),
        upper_attained: data.iter().all(|d| d.delta == d.deg),
    }
}

/// Census by actually factoring each `f_i` over `L`.
pub fn proportion(f: &Poly<KField>, t: &FieldTower, seed: u64) -> CensusReport {
    let fact = polyfact::factor(f, t.k(), seed).expect("nonzero input");
    let data: Vec<FactorData> = fact
        .factors
        .iter()
        .map(|(fi, mi)| {
            let over_l = polyfact::factor(&lift_to_l(t, fi), t.l(), seed).unwrap();
            FactorData {
                mi: *mi,
                deg: fi.deg().unwrap(),
                delta: over_l.factors.len(),
            }
        })
        .collect();
    report_from_factors(&data)
}

/// Census via `delta = gcd(m, deg f_i)`, with no factoring over `L` at all.
pub fn proportion_fq(f: &Poly<KField>, k: &KField, m: usize, seed: u64) -> CensusReport {
    let fact = polyfact::factor(f, k, seed).expect("nonzero input");
    let data: Vec<FactorData> = fact
        .factors
        .iter()
        .map(|(fi, mi)| {
            let deg = fi.deg().unwrap();
            FactorData {
                mi: *mi,
                deg,
                delta: gcd_usize(m, deg),
            }
        })
        .collect();
    report_from_factors(&data)
}

/// Order data of one cyclotomic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicEntry {
    pub d: u64,
    /// Multiplicative order of `q` mod `d`.
    pub o_d_q: u64,
    /// Number of irreducible factors of the `d`-th cyclotomic polynomial
    /// over `F_q`, `phi(d) / o_d(q)`.
    pub t_d_q: u64,
    /// Factors each of those picks up over `F_(q^m)`, `o_d(q) / o_d(q^m)`.
    pub n_d_q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicProfile {
    pub entries: Vec<CyclotomicEntry>,
    /// Total number of irreducible factors over `F_q`.
    pub s: u64,
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

fn cyclotomic_entry(d: u64, q: u64, m: usize) -> Result<CyclotomicEntry, CensusError> {
    let o = mult_order(q as u128, d).map_err(|_| CensusError::NotCoprime)?;
    let qm = pow_mod_u64(q, m as u64, d);
    let o_qm = mult_order(qm as u128, d).map_err(|_| CensusError::NotCoprime)?;
    let entry = CyclotomicEntry {
        d,
        o_d_q: o,
        t_d_q: euler_phi(d) / o,
        n_d_q: o / o_qm,
    };
    // The two expressions for the per-factor split count agree.
    debug_assert_eq!(entry.n_d_q, gcd_u64(m as u64, o));
    Ok(entry)
}

/// Census of cyclic codes of length `n` over `F_(q^m)/F_q` from cyclotomic
/// data alone; requires `gcd(n, q) = 1` and `q` a prime power.
pub fn cyclic_census(
    n: u64,
    q: u64,
    m: usize,
) -> Result<(CensusReport, CyclotomicProfile), CensusError> {
    check_prime_power(q)?;
    if gcd_u64(n, q) != 1 {
        return Err(CensusError::NotCoprime);
    }
    let entries: Vec<CyclotomicEntry> = divisors(n)
        .into_iter()
        .map(|d| cyclotomic_entry(d, q, m))
        .collect::<Result<_, _>>()?;
    let s: u64 = entries.iter().map(|e| e.t_d_q).sum();
    // Degrees must fill the length: sum over d of t_d * o_d = n.
    assert_eq!(entries.iter().map(|e| e.t_d_q * e.o_d_q).sum::<u64>(), n);

    let mut total = BigUint::one();
    let mut count = BigUint::one();
    let mut proportion = Rational::one();
    let mut upper = Rational::one();
    for e in &entries {
        let per_factor = BigUint::from(2u32).pow(e.n_d_q as u32);
        total *= per_factor.pow(e.t_d_q as u32);
        count *= (&BigUint::from(2u32).pow(e.n_d_q as u32) - BigUint::one()).pow(e.t_d_q as u32);
        proportion = proportion.mul(
            &Rational::new(BigUint::one(), BigUint::from(2u32).pow(e.n_d_q as u32))
                .one_minus()
                .pow(e.t_d_q as usize),
        );
        upper = upper.mul(
            &Rational::new(BigUint::one(), BigUint::from(2u32).pow(e.o_d_q as u32))
                .one_minus()
                .pow(e.t_d_q as usize),
        );
    }
    let lower = Rational::new(BigUint::one(), BigUint::from(2u32).pow(s as u32));
    assert_eq!(proportion, Rational::new(count.clone(), total.clone()));
    let o_n = mult_order(q as u128, n).unwrap();
    let report = CensusReport {
        total,
        count_not_one: count,
        proportion,
        lower,
        upper,
        lower_attained: gcd_u64(m as u64, o_n) == 1,
        upper_attained: m as u64 % o_n == 0,
    };
    Ok((report, CyclotomicProfile { entries, s }))
}

/// Census of negacyclic codes of odd length `n`: `x^n + 1` factors through
/// the `2d`-th cyclotomic layers for `d | n`. The result is checked against
/// the generic census of the expanded `x^n + 1`.
pub fn negacyclic_census(
    n: u64,
    q: u64,
    m: usize,
) -> Result<(CensusReport, CyclotomicProfile), CensusError> {
    check_prime_power(q)?;
    if n % 2 == 0 {
        return Err(CensusError::EvenN);
    }
    if gcd_u64(2 * n, q) != 1 {
        return Err(CensusError::NotCoprime);
    }
    let entries: Vec<CyclotomicEntry> = divisors(n)
        .into_iter()
        .map(|d| cyclotomic_entry(2 * d, q, m))
        .collect::<Result<_, _>>()?;
    let s: u64 = entries.iter().map(|e| e.t_d_q).sum();
    assert_eq!(entries.iter().map(|e| e.t_d_q * e.o_d_q).sum::<u64>(), n);

    let mut total = BigUint::one();
    let mut count = BigUint::one();
    let mut proportion = Rational::one();
    let mut upper = Rational::one();
    for e in &entries {
        total *= BigUint::from(2u32).pow((e.n_d_q * e.t_d_q) as u32);
        count *= (&BigUint::from(2u32).pow(e.n_d_q as u32) - BigUint::one()).pow(e.t_d_q as u32);
        proportion = proportion.mul(
            &Rational::new(BigUint::one(), BigUint::from(2u32).pow(e.n_d_q as u32))
                .one_minus()
                .pow(e.t_d_q as usize),
        );
        upper = upper.mul(
            &Rational::new(BigUint::one(), BigUint::from(2u32).pow(e.o_d_q as u32))
                .one_minus()
                .pow(e.t_d_q as usize),
        );
    }
    let lower = Rational::new(BigUint::one(), BigUint::from(2u32).pow(s as u32));
    assert_eq!(proportion, Rational::new(count.clone(), total.clone()));
    let o_2n = mult_order(q as u128, 2 * n).unwrap();
    let report = CensusReport {
        total,
        count_not_one: count,
        proportion,
        lower,
        upper,
        lower_attained: gcd_u64(m as u64, o_2n) == 1,
        upper_attained: m as u64 % o_2n == 0,
    };
    // Cross-check against the generic path on the expanded x^n + 1.
    {
        let (p, e) = prime_power_parts(q).unwrap();
        let tower =
            FieldTower::new(p, e, 1, None, 0).expect("prime power base field");
        let k = tower.k();
        let f = Poly::x_pow_plus(k, n as usize, k.one());
        let generic = proportion_fq(&f, k, m, 0);
        assert_eq!(generic.proportion, report.proportion);
        assert_eq!(generic.total, report.total);
    }
    Ok((report, CyclotomicProfile { entries, s }))
}

/// Exhaustive validator: enumerate every monic divisor `g` of `f` over `L`,
/// build the code, and count those whose first rank weight differs from 1
/// (the zero code `g = f` counts). Returns `(total, count_not_one)`.
pub fn exhaustive_census(
    f: &Poly<KField>,
    t: &FieldTower,
    cap: u64,
    seed: u64,
) -> Result<(BigUint, BigUint), CensusError> {
    let fl = lift_to_l(t, f);
    let fact = polyfact::factor(&fl, t.l(), seed).expect("nonzero input");
    let total = fact.divisor_count();
    if total > BigUint::from(cap) {
        return Err(CensusError::TooLarge(total));
    }
    let m = companion(&f.monic(t.k()), t.k()).expect("monic by construction");
    let mut count = BigUint::zero();
    for g in polyfact::monic_divisors(&fact, t.l()) {
        let code = MCyclicCode::from_generator(t, &m, &g).expect("divisor of f");
        let not_one = match first_weight_is_one(t, &code) {
            Ok(one) => !one,
            Err(McodeError::ZeroCode) => true,
            Err(e) => panic!("unexpected error: {e:?}"),
        };
        if not_one {
            count += BigUint::one();
        }
    }
    Ok((total, count))
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    crate::gf::gcd_u64(a, b)
}

fn gcd_usize(a: usize, b: usize) -> usize {
    crate::gf::gcd_u64(a as u64, b as u64) as usize
}

fn pow_mod_u64(b: u64, mut e: u64, modulus: u64) -> u64 {
    let md = modulus as u128;
    let mut acc: u128 = 1 % md;
    let mut bb = b as u128 % md;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % md;
        }
        bb = bb * bb % md;
        e >>= 1;
    }
    acc as u64
}

fn prime_power_parts(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            return if rest == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

fn check_prime_power(q: u64) -> Result<(), CensusError> {
    match prime_power_parts(q) {
        Some((p, _)) if is_prime_u64(p) => Ok(()),
        _ => Err(CensusError::NotPrimePower),
    }
}
