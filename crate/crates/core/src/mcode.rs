//! Codes stable under a base-field matrix and, when the matrix is cyclic,
//! their description by generator polynomials: construction and recovery,
//! duals, the closed-form first/last rank weights, the MRD necessary
//! condition, and the decomposition-based hierarchy formulas.

use alloc::vec::Vec;
use core::fmt;

use crate::gf::{lift_matrix_to_l, lift_to_l, Field, FieldTower, KElt, KField, LField};
use crate::matmod::{
    self, apply_poly_row, cyclic_decomposition, eval_poly_at, is_cyclic, krylov, min_poly,
    row_space_intersection, CyclicComponent, DecompositionMode, Matrix,
};
use crate::polyfact::{self, Poly};
use crate::rankmetric::LinearCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McodeError {
    NotCyclic,
    NotADivisor,
    NotAnMCode,
    ZeroCode,
    SizeMismatch,
    DecompositionMismatch,
    HypothesisFailed,
    /// A component gcd had the wrong degree for the degree-one shortcut.
    PreconditionDegree { component: usize, degree: usize },
}

impl fmt::Display for McodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McodeError::NotCyclic => f.write_str("matrix is not cyclic"),
            McodeError::NotADivisor => {
                f.write_str("generator must be a monic divisor of the minimal polynomial")
            }
            McodeError::NotAnMCode => f.write_str("code is not stable under the matrix"),
            McodeError::ZeroCode => f.write_str("operation undefined for the zero code"),
            McodeError::SizeMismatch => f.write_str("dimension mismatch"),
            McodeError::DecompositionMismatch => {
                f.write_str("supplied decomposition does not split the space")
            }
            McodeError::HypothesisFailed => {
                f.write_str("code does not decompose along the supplied subspaces")
            }
            McodeError::PreconditionDegree { component, degree } => write!(
                f,
                "component {component} has gcd degree {degree}, expected 1"
            ),
        }
    }
}

/// Whether `C` is stable under `c -> c M^t`.
pub fn is_m_code(
    t: &FieldTower,
    code: &LinearCode,
    m: &Matrix<KField>,
) -> Result<bool, McodeError> {
    if m.rows() != m.cols() || m.rows() != code.n() {
        return Err(McodeError::SizeMismatch);
    }
    let ml = lift_matrix_to_l(t, m);
    for i in 0..code.gen().rows() {
        let shifted = ml.row_mul_mt(code.gen().row(i), t.l());
        if !code.contains(t, &shifted) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An `M`-cyclic code `C_g`: cyclic matrix `M`, cyclic vector `v`, minimal
/// polynomial `f` of degree `n`, monic divisor `g` of `f` over `L`, plus the
/// primary splitting data consumed by the closed forms.
#[derive(Debug, Clone)]
pub struct MCyclicCode {
    m: Matrix<KField>,
    v: Vec<KElt>,
    f: Poly<KField>,
    g: Poly<LField>,
    /// `(f_i, m_i)` in canonical factor order.
    fprimary: Vec<(Poly<KField>, usize)>,
    /// `g_i = gcd(g, f_i^(m_i))` over `L`, aligned with `fprimary`.
    gsplit: Vec<Poly<LField>>,
    code: LinearCode,
}

impl MCyclicCode {
    /// Build `C_g` from a cyclic matrix and a monic divisor of its minimal
    /// polynomial over `L`.
    pub fn from_generator(
        t: &FieldTower,
        m: &Matrix<KField>,
        g: &Poly<LField>,
    ) -> Result<Self, McodeError> {
        if m.rows() != m.cols() {
            return Err(McodeError::SizeMismatch);
        }
        let v = is_cyclic(m, t.k())
            .map_err(|_| McodeError::SizeMismatch)?
            .ok_or(McodeError::NotCyclic)?;
        Self::with_cyclic_vector(t, m, &v, g)
    }

    /// Same as [`MCyclicCode::from_generator`] with a caller-chosen cyclic
    /// vector; the resulting code does not depend on the choice.
    pub fn with_cyclic_vector(
        t: &FieldTower,
        m: &Matrix<KField>,
        v: &[KElt],
        g: &Poly<LField>,
    ) -> Result<Self, McodeError> {
        let n = m.rows();
        let f = min_poly(m, t.k()).map_err(|_| McodeError::SizeMismatch)?;
        if f.deg() != Some(n) {
            return Err(McodeError::NotCyclic);
        }
        let fl = lift_to_l(t, &f);
        if !g.is_monic(t.l()) || !g.divides(&fl, t.l()) {
            return Err(McodeError::NotADivisor);
        }
        let k = n - g.deg().unwrap_or(0);
        let ml = lift_matrix_to_l(t, m);
        let vl: Vec<_> = v.iter().map(|c| t.embed(c)).collect();
        let base = apply_poly_row(&vl, g, &ml, t.l());
        let mut rows = Vec::with_capacity(k);
        let mut cur = base;
        for _ in 0..k {
            rows.push(cur.clone());
            cur = ml.row_mul_mt(&cur, t.l());
        }
        let code = LinearCode::from_rows(t, n, rows);
        assert_eq!(code.k(), k, "dim C_g = n - deg g");
        let fact = polyfact::factor(&f, t.k(), 0).expect("minimal polynomial is nonzero");
        let mut gsplit = Vec::with_capacity(fact.factors.len());
        let mut check = Poly::one(t.l());
        for (fi, mi) in &fact.factors {
            let gi = g
                .gcd(&lift_to_l(t, &fi.pow(*mi, t.k())), t.l())
                .expect("inputs nonzero");
            check = check.mul(&gi, t.l());
            gsplit.push(gi);
        }
        assert_eq!(check, g.monic(t.l()), "primary parts reassemble g");
        Ok(Self {
            m: m.clone(),
            v: v.to_vec(),
            f,
            g: g.clone(),
            fprimary: fact.factors,
            gsplit,
            code,
        })
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn matrix(&self) -> &Matrix<KField> {
        &self.m
    }

    pub fn cyclic_vector(&self) -> &[KElt] {
        &self.v
    }

    pub fn min_polynomial(&self) -> &Poly<KField> {
        &self.f
    }

    pub fn generator(&self) -> &Poly<LField> {
        &self.g
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn primary_parts(&self) -> &[(Poly<KField>, usize)] {
        &self.fprimary
    }

    pub fn generator_parts(&self) -> &[Poly<LField>] {
        &self.gsplit
    }
}

/// Recover the unique monic divisor `g` of `f` with `C = C_g`: the monic
/// generator of the polynomial ideal pulled back through the cyclic-vector
/// evaluation, i.e. the gcd of `f` with the polynomial coordinates of the
/// basis rows.
pub fn generator_of(
    t: &FieldTower,
    code: &LinearCode,
    m: &Matrix<KField>,
) -> Result<Poly<LField>, McodeError> {
    if m.rows() != m.cols() || m.rows() != code.n() {
        return Err(McodeError::SizeMismatch);
    }
    let v = is_cyclic(m, t.k())
        .map_err(|_| McodeError::SizeMismatch)?
        .ok_or(McodeError::NotCyclic)?;
    let n = m.rows();
    let f = min_poly(m, t.k()).unwrap();
    let ml = lift_matrix_to_l(t, m);
    let vl: Vec<_> = v.iter().map(|c| t.embed(c)).collect();
    let kry = krylov(&vl, &ml, n, t.l());
    let mut g = lift_to_l(t, &f);
    for i in 0..code.gen().rows() {
        let coeffs = kry
            .solve_row(code.gen().row(i), t.l())
            .expect("cyclic Krylov basis spans L^n");
        let p = Poly::from_coeffs(t.l(), coeffs);
        g = g.gcd(&p, t.l()).expect("f is nonzero");
    }
    // The recovered divisor reproduces the code exactly iff C was an M-code.
    let rebuilt = MCyclicCode::with_cyclic_vector(t, m, &v, &g)?;
    if rebuilt.code() == code {
        Ok(g)
    } else {
        Err(McodeError::NotAnMCode)
    }
}

/// Generator polynomial of the dual code: `h = f / g`. The dual of `C_g` is
/// the `M^t`-cyclic code `C_h`.
pub fn dual_generator(t: &FieldTower, code: &MCyclicCode) -> Poly<LField> {
    let fl = lift_to_l(t, &code.f);
    fl.div_exact(&code.g, t.l())
}

/// The dual code realized as an `M^t`-cyclic code with generator `f/g`.
pub fn dual_code(t: &FieldTower, code: &MCyclicCode) -> Result<MCyclicCode, McodeError> {
    let h = dual_generator(t, code);
    MCyclicCode::from_generator(t, &code.m.transpose(), &h)
}

/// Per-primary-component exponents: `ell` is the least `l` with
/// `g_i | f_i^l` (0 when `g_i = 1`), `ell_prime` the least `l'` with
/// `f_i^(m_i - l') | g_i` (0 when `g_i = f_i^(m_i)`).
#[derive(Debug, Clone, PartialEq)]
pub struct EllProfile {
    pub entries: Vec<EllEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllEntry {
    pub fi_deg: usize,
    pub mi: usize,
    pub ell: usize,
    pub ell_prime: usize,
}

pub fn ell_profile(t: &FieldTower, code: &MCyclicCode) -> EllProfile {
    let l = t.l();
    let entries = code
        .fprimary
        .iter()
        .zip(&code.gsplit)
        .map(|((fi, mi), gi)| {
            let fil = lift_to_l(t, fi);
            let ell = if gi.is_one(l) {
                0
            } else {
                (1..=*mi)
                    .find(|&e| gi.divides(&fil.pow(e, l), l))
                    .expect("g_i divides f_i^(m_i)")
            };
            let full = fil.pow(*mi, l);
            let ell_prime = if *gi == full {
                0
            } else {
                (1..=*mi)
                    .find(|&e| fil.pow(mi - e, l).divides(gi, l))
                    .expect("f_i^0 divides everything")
            };
            EllEntry {
                fi_deg: fi.deg().unwrap(),
                mi: *mi,
                ell,
                ell_prime,
            }
        })
        .collect();
    EllProfile { entries }
}

/// `M_1(C_g) = 1` iff some `g_i` divides `f_i^(m_i - 1)`.
pub fn first_weight_is_one(t: &FieldTower, code: &MCyclicCode) -> Result<bool, McodeError> {
    if code.k() == 0 {
        return Err(McodeError::ZeroCode);
    }
    let profile = ell_profile(t, code);
    let result = profile.entries.iter().any(|e| e.ell + 1 <= e.mi);
    // Squarefree fast path must agree: some g_i coprime to f_i.
    if code.fprimary.iter().all(|(_, mi)| *mi == 1) {
        let sq = code
            .fprimary
            .iter()
            .map(|(fi, _)| lift_to_l(t, fi))
            .zip(&code.gsplit)
            .any(|(fil, gi)| fil.gcd(gi, t.l()).unwrap().is_one(t.l()));
        debug_assert_eq!(sq, result);
    }
    Ok(result)
}

/// Closed form `dim_K(C_g ∩ K^n) = sum (m_i - l_i) deg(f_i)`.
pub fn dim_base_intersection(t: &FieldTower, code: &MCyclicCode) -> usize {
    ell_profile(t, code)
        .entries
        .iter()
        .map(|e| (e.mi - e.ell) * e.fi_deg)
        .sum()
}

/// Closed-form last weights: `M_k(C_g) = sum l'_i deg(f_i)` (absent for the
/// zero code) and `M_(n-k)(C_g^perp) = sum l_i deg(f_i)` (absent when the
/// dual is zero, i.e. `g = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LastWeights {
    pub mk: Option<usize>,
    pub dual_mnk: Option<usize>,
}

pub fn last_weight_closed(t: &FieldTower, code: &MCyclicCode) -> LastWeights {
    let profile = ell_profile(t, code);
    let mk = if code.k() == 0 {
        None
    } else {
        Some(profile.entries.iter().map(|e| e.ell_prime * e.fi_deg).sum())
    };
    let dual_mnk = if code.g.is_one(t.l()) {
        None
    } else {
        Some(profile.entries.iter().map(|e| e.ell * e.fi_deg).sum())
    };
    LastWeights { mk, dual_mnk }
}

/// Necessary condition for an MRD `M`-code other than the full space: the
/// minimal polynomial must be a power of a single irreducible. Not
/// sufficient (the identity matrix passes yet admits none).
pub fn mrd_possible(fld: &KField, m: &Matrix<KField>, seed: u64) -> Result<bool, McodeError> {
    if m.rows() != m.cols() {
        return Err(McodeError::SizeMismatch);
    }
    let mu = min_poly(m, fld).map_err(|_| McodeError::SizeMismatch)?;
    let fact = polyfact::factor(&mu, fld, seed).expect("minimal polynomial is nonzero");
    Ok(fact.factors.len() == 1)
}

/// One factor of a split code: the length-`d_i` code carried by a stable
/// subspace, in the coordinates of its basis.
#[derive(Debug, Clone)]
pub struct SplitComponent {
    pub code: LinearCode,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct ComponentSplit {
    pub components: Vec<SplitComponent>,
    /// Whether `C` equals the direct sum of its intersections with the
    /// extended subspaces (dimension audit). Always true for the primary
    /// decomposition of an `M`-code and for kernel codes.
    pub hypothesis_holds: bool,
}

/// Split `C` along a decomposition of `K^n` into stable subspaces, given by
/// their basis matrices: `C_i = {c : c P_i ∈ C ∩ (V_i)_L}`.
pub fn component_split(
    t: &FieldTower,
    code: &LinearCode,
    parts: &[Matrix<KField>],
) -> Result<ComponentSplit, McodeError> {
    let n = code.n();
    let total: usize = parts.iter().map(|p| p.rows()).sum();
    if total != n || parts.iter().any(|p| p.cols() != n) {
        return Err(McodeError::DecompositionMismatch);
    }
    let mut stacked: Option<Matrix<KField>> = None;
    for p in parts {
        stacked = Some(match stacked {
            None => p.clone(),
            Some(s) => s.stack(p),
        });
    }
    if stacked.unwrap().inverse(t.k()).is_none() {
        return Err(McodeError::DecompositionMismatch);
    }
    let l = t.l();
    let mut components = Vec::with_capacity(parts.len());
    let mut ksum = 0;
    for p in parts {
        let pl = lift_matrix_to_l(t, p);
        let inter = row_space_intersection(code.gen(), &pl, l);
        let ki = inter.rows();
        let mut rows = Vec::with_capacity(ki);
        for i in 0..ki {
            let coords = pl
                .solve_row(inter.row(i), l)
                .expect("intersection lies in the subspace");
            rows.push(coords);
        }
        ksum += ki;
        components.push(SplitComponent {
            code: LinearCode::from_rows(t, p.rows(), rows),
            d: p.rows(),
            k: ki,
        });
    }
    Ok(ComponentSplit {
        components,
        hypothesis_holds: ksum == code.k(),
    })
}

/// What is known about one component's hierarchy when combining.
#[derive(Debug, Clone)]
pub struct ComponentHierarchy {
    pub d: usize,
    pub k: usize,
    /// `exact[r]` = `M_r` for `r = 0..=k` (`exact[0] = 0`); `None` leaves
    /// only the per-component Singleton bound `d - k + r`.
    pub exact: Option<Vec<usize>>,
}

/// A combined value for one `r`: exact when every contribution was exact or
/// the unconditional lower bound `M_r >= r` pins it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RBound {
    pub value: usize,
    pub exact: bool,
}

/// Combine per-component hierarchies into the code's hierarchy:
/// `M_r = min over (r_i) with sum r_i = r of sum M_(r_i)(C_i)`, using the
/// per-component Singleton bound where no exact hierarchy is available.
/// Components with `k_i = 0` never contribute and may be omitted.
pub fn combine_hierarchy(
    comps: &[ComponentHierarchy],
    hypothesis_holds: bool,
) -> Result<Vec<RBound>, McodeError> {
    if !hypothesis_holds {
        return Err(McodeError::HypothesisFailed);
    }
    let active: Vec<&ComponentHierarchy> = comps.iter().filter(|c| c.k > 0).collect();
    let total_k: usize = active.iter().map(|c| c.k).sum();
    let all_exact = active.iter().all(|c| c.exact.is_some());
    // Larger components first tightens the pruning.
    let mut order: Vec<&ComponentHierarchy> = active.clone();
    order.sort_by(|a, b| b.k.cmp(&a.k));
    let value_of = |c: &ComponentHierarchy, r: usize| -> usize {
        if r == 0 {
            return 0;
        }
        match &c.exact {
            Some(h) => h[r],
            None => c.d - c.k + r,
        }
    };
    fn rec(
        comps: &[&ComponentHierarchy],
        idx: usize,
        remaining: usize,
        acc: usize,
        best: &mut usize,
        value_of: &dyn Fn(&ComponentHierarchy, usize) -> usize,
    ) {
        if acc >= *best {
            return;
        }
        if idx == comps.len() {
            if remaining == 0 {
                *best = acc;
            }
            return;
        }
        let cap_rest: usize = comps[idx + 1..].iter().map(|c| c.k).sum();
        let lo = remaining.saturating_sub(cap_rest);
        let hi = remaining.min(comps[idx].k);
        for ri in lo..=hi {
            rec(
                comps,
                idx + 1,
                remaining - ri,
                acc + value_of(comps[idx], ri),
                best,
                value_of,
            );
        }
    }
    let mut out = Vec::with_capacity(total_k);
    for r in 1..=total_k {
        let mut best = usize::MAX;
        rec(&order, 0, r, 0, &mut best, &value_of);
        out.push(RBound {
            value: best,
            exact: all_exact || best == r,
        });
    }
    Ok(out)
}

/// Result of the degree-one shortcut: when every nontrivial
/// `gcd(P, Theta_i)` is linear, each component code is a line spanned by the
/// coefficient vector `w_i` of `Theta_i / gcd(P, Theta_i)` and the whole
/// hierarchy is read off the rank weights of the `w_i`.
#[derive(Debug, Clone)]
pub struct DegreeOneHierarchy {
    /// Indices (into the decomposition) of the contributing components.
    pub lambda: Vec<usize>,
    /// Coefficient vectors `w_i`, aligned with `lambda`.
    pub w_vectors: Vec<Vec<crate::gf::LElt>>,
    /// Rank weights of the `w_i`, aligned with `lambda`.
    pub weights: Vec<usize>,
    /// `M_r` for `r = 1..=|lambda|`: minimum over `r`-subsets, i.e. the sum
    /// of the `r` smallest weights.
    pub hierarchy: Vec<usize>,
}

pub fn degree_one_hierarchy(
    t: &FieldTower,
    p: &Poly<LField>,
    decomp: &[CyclicComponent<KField>],
) -> Result<DegreeOneHierarchy, McodeError> {
    let l = t.l();
    let mut lambda = Vec::new();
    let mut w_vectors = Vec::new();
    let mut weights = Vec::new();
    for (i, comp) in decomp.iter().enumerate() {
        let theta_l = lift_to_l(t, &comp.theta);
        let d = theta_l.gcd(p, l).expect("theta is nonzero");
        if d.is_one(l) {
            continue;
        }
        if d.deg() != Some(1) {
            return Err(McodeError::PreconditionDegree {
                component: i,
                degree: d.deg().unwrap_or(0),
            });
        }
        let w = theta_l.div_exact(&d, l);
        let mut coeffs = w.coeffs().to_vec();
        coeffs.resize(comp.theta.deg().unwrap(), l.zero());
        let weight = crate::rankmetric::rank_weight(t, &coeffs);
        lambda.push(i);
        w_vectors.push(coeffs);
        weights.push(weight);
    }
    let mut sorted = weights.clone();
    sorted.sort_unstable();
    let hierarchy: Vec<usize> = sorted
        .iter()
        .scan(0usize, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    Ok(DegreeOneHierarchy {
        lambda,
        w_vectors,
        weights,
        hierarchy,
    })
}

/// Per-component report for a kernel code `ker(P(M))`.
#[derive(Debug, Clone)]
pub struct KernelComponent {
    pub theta: Poly<KField>,
    pub gcd: Poly<LField>,
    /// Generator polynomial `Theta_i / gcd(P, Theta_i)` of the component code.
    pub generator: Poly<LField>,
    pub k_i: usize,
}

#[derive(Debug, Clone)]
pub struct KernelCode {
    pub code: LinearCode,
    pub components: Vec<KernelComponent>,
    pub decomposition: Vec<CyclicComponent<KField>>,
}

/// The code `ker(P(M))` with its per-cyclic-component generator data;
/// `dim C = sum deg gcd(P, Theta_i)` is asserted. The decomposition used is
/// the elementary-divisor one.
pub fn kernel_code(
    t: &FieldTower,
    m: &Matrix<KField>,
    p: &Poly<LField>,
    seed: u64,
) -> Result<KernelCode, McodeError> {
    if m.rows() != m.cols() {
        return Err(McodeError::SizeMismatch);
    }
    let l = t.l();
    let ml = lift_matrix_to_l(t, m);
    let pm = eval_poly_at(p, &ml, l);
    let ker = pm.kernel(l);
    let code = LinearCode::from_rows(t, m.rows(), ker.row_vecs());
    let decomp = cyclic_decomposition(m, DecompositionMode::PrimaryCyclic, t.k(), seed)
        .map_err(|_| McodeError::SizeMismatch)?;
    let mut components = Vec::with_capacity(decomp.len());
    let mut ksum = 0;
    for comp in &decomp {
        let theta_l = lift_to_l(t, &comp.theta);
        let d = theta_l.gcd(p, l).expect("theta is nonzero");
        let generator = theta_l.div_exact(&d, l);
        let k_i = d.deg().unwrap_or(0);
        ksum += k_i;
        components.push(KernelComponent {
            theta: comp.theta.clone(),
            gcd: d,
            generator,
            k_i,
        });
    }
    assert_eq!(code.k(), ksum, "dim ker(P(M)) = sum deg gcd(P, Theta_i)");
    Ok(KernelCode {
        code,
        components,
        decomposition: decomp,
    })
}

/// `C_(x^n - 1)^ell`, the matrix whose stable codes are the quasi-cyclic
/// codes of index `ell`; requires `ell | n`.
pub fn quasi_cyclic_matrix(fld: &KField, n: usize, ell: usize) -> Matrix<KField> {
    assert!(ell >= 1 && n % ell == 0);
    let f = Poly::x_pow_plus(fld, n, fld.neg(&fld.one()));
    let c = matmod::companion(&f, fld).unwrap();
    let mut acc = Matrix::identity(fld, n);
    for _ in 0..ell {
        acc = acc.mul(&c, fld);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::LElt;
    use crate::matmod::companion;
    use crate::rankmetric::{self, dual, grw_oracle, intersect_base, DEFAULT_ORACLE_CAP};
    use crate::rng::SplitMix64;

    fn f4() -> FieldTower {
        FieldTower::new(2, 1, 2, None, 1).unwrap()
    }

    fn kpoly(t: &FieldTower, coeffs: &[i64]) -> Poly<KField> {
        let k = t.k();
        let p = t.p() as i64;
        Poly::from_coeffs(
            k,
            coeffs
                .iter()
                .map(|&c| k.from_u64(c.rem_euclid(p) as u64))
                .collect(),
        )
    }

    #[test]
    fn m_code_stability() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]); // x^3 - 1
        let m = companion(&f, t.k()).unwrap();
        assert!(is_m_code(&t, &LinearCode::full(&t, 3), &m).unwrap());
        // span{(1, w, 0)} is not stable under the cyclic shift.
        let c = LinearCode::from_rows(&t, 3, vec![vec![l.one(), l.generator(), l.zero()]]);
        assert!(!is_m_code(&t, &c, &m).unwrap());
        // Size mismatch is reported.
        let small = Matrix::identity(t.k(), 2);
        assert!(matches!(
            is_m_code(&t, &c, &small),
            Err(McodeError::SizeMismatch)
        ));
    }

    #[test]
    fn from_generator_extremes() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let c1 = MCyclicCode::from_generator(&t, &m, &Poly::one(l)).unwrap();
        assert_eq!(c1.code(), &LinearCode::full(&t, 3));
        let cf = MCyclicCode::from_generator(&t, &m, &lift_to_l(&t, &f)).unwrap();
        assert_eq!(cf.k(), 0);
        // Non-divisors (x does not divide x^3 - 1) and non-monic inputs are
        // rejected, as are non-cyclic matrices.
        assert!(matches!(
            MCyclicCode::from_generator(&t, &m, &Poly::x(l)),
            Err(McodeError::NotADivisor)
        ));
        let nonmonic = Poly::from_coeffs(l, vec![l.generator()]);
        assert!(matches!(
            MCyclicCode::from_generator(&t, &m, &nonmonic),
            Err(McodeError::NotADivisor)
        ));
        let id = Matrix::identity(t.k(), 3);
        assert!(matches!(
            MCyclicCode::from_generator(&t, &id, &Poly::one(l)),
            Err(McodeError::NotCyclic)
        ));
    }

    #[test]
    fn built_codes_are_m_codes_of_right_dimension() {
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            assert_eq!(code.k(), 3 - g.deg().unwrap_or(0));
            assert!(is_m_code(&t, code.code(), &m).unwrap());
        }
    }

    #[test]
    fn code_independent_of_cyclic_vector() {
        let t = f4();
        let k = t.k();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, k).unwrap();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        // A second cyclic vector: v R(M)^t for R coprime to f.
        let e1 = is_cyclic(&m, k).unwrap().unwrap();
        let r = kpoly(&t, &[0, 1]); // gcd(x, x^3 - 1) = 1
        assert!(r.gcd(&f, k).unwrap().is_one(k));
        let v2 = apply_poly_row(&e1, &r, &m, k);
        assert_eq!(matmod::order_poly(&v2, &m, k).deg(), Some(3));
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let a = MCyclicCode::with_cyclic_vector(&t, &m, &e1, &g).unwrap();
            let b = MCyclicCode::with_cyclic_vector(&t, &m, &v2, &g).unwrap();
            assert_eq!(a.code(), b.code());
        }
    }

    #[test]
    fn generator_round_trip_and_recovery() {
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        assert!(generator_of(&t, &LinearCode::full(&t, 3), &m)
            .unwrap()
            .is_one(t.l()));
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            assert_eq!(generator_of(&t, code.code(), &m).unwrap(), g);
        }
        // A non-M-code is rejected.
        let l = t.l();
        let c = LinearCode::from_rows(&t, 3, vec![vec![l.one(), l.generator(), l.zero()]]);
        assert!(matches!(
            generator_of(&t, &c, &m),
            Err(McodeError::NotAnMCode)
        ));
    }

    #[test]
    fn dual_generator_matches_dual_code() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            let h = dual_generator(&t, &code);
            assert_eq!(h.mul(&g, l), fl);
            if g.is_one(l) {
                assert_eq!(h, fl);
            }
            let dual_direct = dual(&t, code.code());
            let dual_cyclic = dual_code(&t, &code).unwrap();
            assert_eq!(&dual_direct, dual_cyclic.code());
        }
    }

    #[test]
    fn ell_profile_extremes() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let c1 = MCyclicCode::from_generator(&t, &m, &Poly::one(l)).unwrap();
        assert!(ell_profile(&t, &c1).entries.iter().all(|e| e.ell == 0));
        assert!(ell_profile(&t, &c1)
            .entries
            .iter()
            .all(|e| e.ell_prime == e.mi));
        let cf = MCyclicCode::from_generator(&t, &m, &lift_to_l(&t, &f)).unwrap();
        assert!(ell_profile(&t, &cf)
            .entries
            .iter()
            .all(|e| e.ell == e.mi && e.ell_prime == 0));
    }

    #[test]
    fn first_weight_criterion_with_oracle() {
        // f = x^2+x+1 over F_2, L = F_4: f splits, and picking one linear
        // factor as g forces M_1 = 2.
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[1, 1, 1]);
        let m = companion(&f, t.k()).unwrap();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        assert_eq!(fact.factors.len(), 2);
        let g = fact.factors[0].0.clone();
        let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
        assert!(!first_weight_is_one(&t, &code).unwrap());
        assert_eq!(
            grw_oracle(&t, code.code(), 1, DEFAULT_ORACLE_CAP).unwrap(),
            2
        );
        // g = 1 gives the full space, which meets K^n.
        let c1 = MCyclicCode::from_generator(&t, &m, &Poly::one(l)).unwrap();
        assert!(first_weight_is_one(&t, &c1).unwrap());
        // Zero code is refused.
        let cf = MCyclicCode::from_generator(&t, &m, &fl).unwrap();
        assert!(matches!(
            first_weight_is_one(&t, &cf),
            Err(McodeError::ZeroCode)
        ));
    }

    #[test]
    fn all_codes_first_weight_one_iff_factors_stay_irreducible() {
        // Over F_8/F_2 (m = 3), both x^2+x+1 and x+1 stay irreducible, so
        // every nonzero code has first weight one; over F_4 (m = 2) the
        // quadratic splits and a witness divisor fails.
        let t8 = FieldTower::new(2, 1, 3, None, 1).unwrap();
        let f = kpoly(&t8, &[1, 1, 1]).mul(&kpoly(&t8, &[1, 1]), t8.k());
        let m = companion(&f, t8.k()).unwrap();
        let fl = lift_to_l(&t8, &f);
        let fact = polyfact::factor(&fl, t8.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t8.l()) {
            if g == fl {
                continue;
            }
            let code = MCyclicCode::from_generator(&t8, &m, &g).unwrap();
            assert!(first_weight_is_one(&t8, &code).unwrap());
            assert_eq!(
                grw_oracle(&t8, code.code(), 1, DEFAULT_ORACLE_CAP).unwrap(),
                1
            );
        }

        let t4 = f4();
        let f = kpoly(&t4, &[1, 1, 1]).mul(&kpoly(&t4, &[1, 1]), t4.k());
        let m = companion(&f, t4.k()).unwrap();
        // Witness: one proper L-factor of the quadratic, full power of the rest.
        let quad = lift_to_l(&t4, &kpoly(&t4, &[1, 1, 1]));
        let p1 = polyfact::factor(&quad, t4.l(), 0).unwrap().factors[0]
            .0
            .clone();
        let g = p1.mul(&lift_to_l(&t4, &kpoly(&t4, &[1, 1])), t4.l());
        let code = MCyclicCode::from_generator(&t4, &m, &g).unwrap();
        assert!(!first_weight_is_one(&t4, &code).unwrap());
        assert!(grw_oracle(&t4, code.code(), 1, DEFAULT_ORACLE_CAP).unwrap() > 1);
    }

    #[test]
    fn base_intersection_closed_form_extremes() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let c1 = MCyclicCode::from_generator(&t, &m, &Poly::one(l)).unwrap();
        assert_eq!(dim_base_intersection(&t, &c1), 3);
        let cf = MCyclicCode::from_generator(&t, &m, &lift_to_l(&t, &f)).unwrap();
        assert_eq!(dim_base_intersection(&t, &cf), 0);
        // Closed form equals the direct computation on every divisor.
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            assert_eq!(
                dim_base_intersection(&t, &code),
                intersect_base(&t, code.code()).rows()
            );
        }
    }

    #[test]
    fn last_weight_closed_extremes() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let c1 = MCyclicCode::from_generator(&t, &m, &Poly::one(l)).unwrap();
        let lw = last_weight_closed(&t, &c1);
        assert_eq!(lw.mk, Some(3));
        assert_eq!(lw.dual_mnk, None);
        let cf = MCyclicCode::from_generator(&t, &m, &lift_to_l(&t, &f)).unwrap();
        let lw = last_weight_closed(&t, &cf);
        assert_eq!(lw.mk, None);
        assert_eq!(lw.dual_mnk, Some(3));
    }

    #[test]
    fn squarefree_last_weight_specialization_agrees() {
        // For squarefree f: M_k = sum of deg f_i over the f_i not dividing g.
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]); // (x+1)(x^2+x+1), squarefree
        let m = companion(&f, t.k()).unwrap();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        let kfact = polyfact::factor(&f, t.k(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            if g == fl {
                continue;
            }
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            let closed = last_weight_closed(&t, &code).mk.unwrap();
            let special: usize = kfact
                .factors
                .iter()
                .filter(|(fi, _)| !lift_to_l(&t, fi).divides(&g, l))
                .map(|(fi, _)| fi.deg().unwrap())
                .sum();
            assert_eq!(closed, special);
        }
    }

    #[test]
    fn mrd_condition() {
        let t = f4();
        let k = t.k();
        // Cyclic shift with n >= 2 coprime to the characteristic: never MRD.
        let m = companion(&kpoly(&t, &[-1, 0, 0, 1]), k).unwrap();
        assert!(!mrd_possible(k, &m, 0).unwrap());
        // Identity passes the necessary condition (mu = x - 1)...
        assert!(mrd_possible(k, &Matrix::identity(k, 3), 0).unwrap());
        // ...as does a power of a single irreducible.
        let m = companion(&kpoly(&t, &[1, 1, 1]).pow(2, k), k).unwrap();
        assert!(mrd_possible(k, &m, 0).unwrap());
    }

    #[test]
    fn mrd_exhaustive_small_case() {
        // mu_M not a prime power: no divisor g with 1 <= k < n attains the
        // Singleton bound M_1 = n - k + 1.
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        assert!(!mrd_possible(t.k(), &m, 0).unwrap());
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            let k = code.k();
            if k == 0 || k == 3 {
                continue;
            }
            let m1 = grw_oracle(&t, code.code(), 1, DEFAULT_ORACLE_CAP).unwrap();
            assert!(m1 < 3 - k + 1);
        }
    }

    #[test]
    fn component_split_full_space() {
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let comps = matmod::primary_components(&m, t.k(), 0).unwrap();
        let parts: Vec<Matrix<KField>> = comps.iter().map(|c| c.basis.clone()).collect();
        let split = component_split(&t, &LinearCode::full(&t, 3), &parts).unwrap();
        assert!(split.hypothesis_holds);
        for c in &split.components {
            assert_eq!(c.k, c.d);
            assert_eq!(c.code, LinearCode::full(&t, c.d));
        }
    }

    #[test]
    fn component_split_random_m_codes() {
        let t = f4();
        let k = t.k();
        let l = t.l();
        let mut rng = SplitMix64::new(13);
        let mut tested = 0;
        while tested < 10 {
            let m = Matrix::new(
                3,
                3,
                (0..9).map(|_| k.random(&mut rng)).collect::<Vec<_>>(),
            );
            // Close a random codeword under the action to get an M-code.
            let seedrow: Vec<LElt> = (0..3).map(|_| l.random(&mut rng)).collect();
            let ml = lift_matrix_to_l(&t, &m);
            let mut rows = vec![seedrow];
            for _ in 0..2 {
                let last = rows.last().unwrap().clone();
                rows.push(ml.row_mul_mt(&last, l));
            }
            let code = LinearCode::from_rows(&t, 3, rows);
            if !is_m_code(&t, &code, &m).unwrap() {
                continue;
            }
            let comps = matmod::primary_components(&m, k, 0).unwrap();
            let parts: Vec<Matrix<KField>> = comps.iter().map(|c| c.basis.clone()).collect();
            let split = component_split(&t, &code, &parts).unwrap();
            assert!(split.hypothesis_holds, "primary split of an M-code");
            let ksum: usize = split.components.iter().map(|c| c.k).sum();
            assert_eq!(ksum, code.k());
            tested += 1;
        }
    }

    #[test]
    fn hypothesis_flag_can_fail_for_non_stable_codes() {
        let t = f4();
        let l = t.l();
        // A line through (1, w) is not compatible with the coordinate split
        // V_1 = <e_1>, V_2 = <e_2>.
        let code = LinearCode::from_rows(&t, 2, vec![vec![l.one(), l.generator()]]);
        let k = t.k();
        let parts = vec![
            Matrix::from_rows(k, vec![vec![k.one(), k.zero()]]),
            Matrix::from_rows(k, vec![vec![k.zero(), k.one()]]),
        ];
        let split = component_split(&t, &code, &parts).unwrap();
        assert!(!split.hypothesis_holds);
        let comps: Vec<ComponentHierarchy> = split
            .components
            .iter()
            .map(|c| ComponentHierarchy {
                d: c.d,
                k: c.k,
                exact: None,
            })
            .collect();
        assert!(matches!(
            combine_hierarchy(&comps, split.hypothesis_holds),
            Err(McodeError::HypothesisFailed)
        ));
    }

    #[test]
    fn combine_single_component_is_pass_through() {
        let comps = vec![ComponentHierarchy {
            d: 5,
            k: 3,
            exact: Some(vec![0, 2, 3, 5]),
        }];
        let out = combine_hierarchy(&comps, true).unwrap();
        assert_eq!(
            out,
            vec![
                RBound {
                    value: 2,
                    exact: true
                },
                RBound {
                    value: 3,
                    exact: true
                },
                RBound {
                    value: 5,
                    exact: true
                }
            ]
        );
        // Bound-only single component degrades to the Singleton bound.
        let comps = vec![ComponentHierarchy {
            d: 5,
            k: 3,
            exact: None,
        }];
        let out = combine_hierarchy(&comps, true).unwrap();
        assert_eq!(
            out[0],
            RBound {
                value: 3,
                exact: false
            }
        );
        assert_eq!(
            out[2],
            RBound {
                value: 5,
                exact: false
            }
        );
    }

    #[test]
    fn combine_matches_oracle_on_split_codes() {
        // For M-cyclic codes over F_4 with f = x^3 - 1, combine the exact
        // component hierarchies and compare against the direct oracle.
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let comps = matmod::primary_components(&m, t.k(), 0).unwrap();
        let parts: Vec<Matrix<KField>> = comps.iter().map(|c| c.basis.clone()).collect();
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            if code.k() == 0 {
                continue;
            }
            let split = component_split(&t, code.code(), &parts).unwrap();
            assert!(split.hypothesis_holds);
            let hier: Vec<ComponentHierarchy> = split
                .components
                .iter()
                .map(|c| {
                    let mut exact = vec![0usize];
                    exact.extend(
                        rankmetric::grw_hierarchy_oracle(&t, &c.code, DEFAULT_ORACLE_CAP)
                            .unwrap(),
                    );
                    ComponentHierarchy {
                        d: c.d,
                        k: c.k,
                        exact: Some(exact),
                    }
                })
                .collect();
            let combined = combine_hierarchy(&hier, true).unwrap();
            let direct =
                rankmetric::grw_hierarchy_oracle(&t, code.code(), DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(combined.len(), direct.len());
            for (c, d) in combined.iter().zip(&direct) {
                assert!(c.exact);
                assert_eq!(c.value, *d);
            }
        }
    }

    #[test]
    fn degree_one_single_component() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[1, 1, 1]); // x^2+x+1 splits over F_4
        let m = companion(&f, t.k()).unwrap();
        let decomp =
            cyclic_decomposition(&m, DecompositionMode::PrimaryCyclic, t.k(), 0).unwrap();
        assert_eq!(decomp.len(), 1);
        let fl = lift_to_l(&t, &f);
        let root = polyfact::factor(&fl, l, 0).unwrap().factors[0].0.clone();
        let result = degree_one_hierarchy(&t, &root, &decomp).unwrap();
        assert_eq!(result.lambda, vec![0]);
        assert_eq!(result.hierarchy.len(), 1);
        assert_eq!(result.hierarchy[0], result.weights[0]);
        // M_1 = wt_R(w_1), confirmed by the oracle on ker(root(M)).
        let kc = kernel_code(&t, &m, &root, 0).unwrap();
        assert_eq!(kc.code.k(), 1);
        assert_eq!(
            grw_oracle(&t, &kc.code, 1, DEFAULT_ORACLE_CAP).unwrap(),
            result.hierarchy[0]
        );
    }

    #[test]
    fn degree_one_rejects_bigger_gcds() {
        let t = f4();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let decomp =
            cyclic_decomposition(&m, DecompositionMode::PrimaryCyclic, t.k(), 0).unwrap();
        let p = lift_to_l(&t, &f); // gcd with some component has degree 2
        let err = degree_one_hierarchy(&t, &p, &decomp).unwrap_err();
        assert!(matches!(err, McodeError::PreconditionDegree { .. }));
    }

    #[test]
    fn kernel_code_extremes() {
        let t = f4();
        let l = t.l();
        let f = kpoly(&t, &[-1, 0, 0, 1]);
        let m = companion(&f, t.k()).unwrap();
        let full = kernel_code(&t, &m, &lift_to_l(&t, &f), 0).unwrap();
        assert_eq!(full.code, LinearCode::full(&t, 3));
        let zero = kernel_code(&t, &m, &Poly::one(l), 0).unwrap();
        assert_eq!(zero.code.k(), 0);
        // C_g = ker(h(M)) with h = f/g.
        let fl = lift_to_l(&t, &f);
        let fact = polyfact::factor(&fl, t.l(), 0).unwrap();
        for g in polyfact::monic_divisors(&fact, t.l()) {
            let code = MCyclicCode::from_generator(&t, &m, &g).unwrap();
            let h = dual_generator(&t, &code);
            let kc = kernel_code(&t, &m, &h, 0).unwrap();
            assert_eq!(&kc.code, code.code());
        }
    }

    #[test]
    fn quasi_cyclic_first_weight_bound() {
        // M = C_(x^6-1)^2 over F_5: the shift-by-two has minimal polynomial
        // x^3 - 1, and kernel codes meeting the (x-1)-primary component obey
        // M_1 <= ell = 2.
        let t = FieldTower::new(5, 1, 2, None, 1).unwrap();
        let k = t.k();
        let m = quasi_cyclic_matrix(k, 6, 2);
        let mu = min_poly(&m, k).unwrap();
        assert_eq!(mu, kpoly(&t, &[-1, 0, 0, 1]));
        let xm1 = lift_to_l(&t, &kpoly(&t, &[-1, 1]));
        let kc = kernel_code(&t, &m, &xm1, 0).unwrap();
        assert!(kc.code.k() >= 1);
        let m1 = grw_oracle(&t, &kc.code, 1, DEFAULT_ORACLE_CAP).unwrap();
        assert!(m1 <= 2);
    }
}
