//! Rank supports, generalized rank weights, Galois closures, duals and the
//! exhaustive brute-force oracle.
//!
//! The oracle enumerates every `r`-dimensional subspace of a code through
//! canonical reduced-echelon coefficient matrices, so each subspace is
//! visited exactly once and runs are deterministic. It is the ground truth
//! that every closed-form formula in [`crate::mcode`] and [`crate::census`]
//! is tested against.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::gf::{Field, FieldTower, KField, LElt};
use crate::matmod::Matrix;

/// Enumeration guard for the oracle: subspace counts above the cap are
/// refused rather than attempted.
pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum RankError {
    /// The enumeration would visit this many subspaces, above the cap.
    TooLarge(BigUint),
    ZeroCode,
    Singular,
}

impl fmt::Display for RankError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankError::TooLarge(n) => write!(f, "enumeration of {n} subspaces exceeds the cap"),
            RankError::ZeroCode => f.write_str("operation undefined for the zero code"),
            RankError::Singular => f.write_str("transform matrix is singular"),
        }
    }
}

/// An `L`-linear subspace of `L^n`, stored as a full-rank generator matrix in
/// reduced row echelon form (rows are basis codewords). Two codes are equal
/// iff their generator matrices are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCode {
    n: usize,
    gen: Matrix<crate::gf::LField>,
}

impl LinearCode {
    pub fn from_rows(t: &FieldTower, n: usize, rows: Vec<Vec<LElt>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == n));
        let m = Matrix::from_rows(t.l(), rows);
        let gen = if m.rows() == 0 {
            Matrix::zeros(t.l(), 0, n)
        } else {
            m.rref(t.l()).0
        };
        Self { n, gen }
    }

    pub fn zero(t: &FieldTower, n: usize) -> Self {
        Self {
            n,
            gen: Matrix::zeros(t.l(), 0, n),
        }
    }

    /// The full space `L^n`.
    pub fn full(t: &FieldTower, n: usize) -> Self {
        Self {
            n,
            gen: Matrix::identity(t.l(), n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn gen(&self) -> &Matrix<crate::gf::LField> {
        &self.gen
    }

    pub fn contains(&self, t: &FieldTower, v: &[LElt]) -> bool {
        self.gen.row_space_contains(v, t.l())
    }
}

/// Coordinate expansion `M_B(c)`: the `m x n` matrix over `K` whose column
/// `j` holds the coordinates of `c_j` in the power basis.
pub fn expand(t: &FieldTower, c: &[LElt]) -> Matrix<KField> {
    let m = t.m();
    let k = t.k();
    let mut out = Matrix::zeros(k, m, c.len());
    for (j, cj) in c.iter().enumerate() {
        for (b, coord) in cj.iter().enumerate() {
            *out.at_mut(b, j) = coord.clone();
        }
    }
    out
}

/// Rank weight of a codeword: the rank of its coordinate expansion,
/// equivalently the `K`-dimension of the span of its coordinates.
pub fn rank_weight(t: &FieldTower, c: &[LElt]) -> usize {
    expand(t, c).rank(t.k())
}

/// Canonical basis of the rank support (the `K`-row space of the expansion).
pub fn rank_support(t: &FieldTower, c: &[LElt]) -> Matrix<KField> {
    expand(t, c).rref(t.k()).0
}

/// Smallest Frobenius-stable subspace containing the code: the span of all
/// `q^i`-power images of its basis rows.
pub fn galois_closure(t: &FieldTower, code: &LinearCode) -> LinearCode {
    let mut rows = Vec::new();
    for i in 0..code.gen.rows() {
        let row = code.gen.row(i);
        for f in 0..t.m() {
            rows.push(row.iter().map(|x| t.frobenius(x, f)).collect::<Vec<_>>());
        }
    }
    LinearCode::from_rows(t, code.n, rows)
}

/// Joint rank support dimension of a subspace: stack the expansions of all
/// basis rows and take the rank over `K`. Equals the dimension of the Galois
/// closure, which debug builds verify.
pub fn subspace_weight(t: &FieldTower, code: &LinearCode) -> usize {
    let w = joint_support_rank(t, &code.gen.row_vecs());
    debug_assert_eq!(w, galois_closure(t, code).k());
    w
}

fn joint_support_rank(t: &FieldTower, rows: &[Vec<LElt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut stacked: Option<Matrix<KField>> = None;
    for r in rows {
        let e = expand(t, r);
        stacked = Some(match stacked {
            None => e,
            Some(s) => s.stack(&e),
        });
    }
    stacked.unwrap().rank(t.k())
}

/// Dual code under the standard inner product.
pub fn dual(t: &FieldTower, code: &LinearCode) -> LinearCode {
    if code.k() == 0 {
        return LinearCode::full(t, code.n);
    }
    let ker = code.gen.kernel(t.l());
    LinearCode {
        n: code.n,
        gen: ker,
    }
}

/// `K`-basis of `C ∩ K^n`: expand a parity-check matrix of `C` over the
/// power basis into an `m(n-k) x n` matrix over `K` and take its kernel.
pub fn intersect_base(t: &FieldTower, code: &LinearCode) -> Matrix<KField> {
    let k = t.k();
    let parity = dual(t, code);
    let mut rows: Vec<Vec<crate::gf::KElt>> = Vec::new();
    for j in 0..parity.gen.rows() {
        let h = parity.gen.row(j);
        for b in 0..t.m() {
            rows.push(h.iter().map(|hi| hi[b].clone()).collect());
        }
    }
    if rows.is_empty() {
        return Matrix::identity(k, code.n);
    }
    Matrix::from_rows(k, rows).kernel(k)
}

/// Last generalized rank weight, `M_k = n - dim_K(dual(C) ∩ K^n)`.
/// No subspace enumeration involved.
pub fn last_weight(t: &FieldTower, code: &LinearCode) -> Result<usize, RankError> {
    if code.k() == 0 {
        return Err(RankError::ZeroCode);
    }
    let d = dual(t, code);
    Ok(code.n - intersect_base(t, &d).rows())
}

/// The code `C * P` for `P` invertible over `K`.
pub fn transform(
    t: &FieldTower,
    code: &LinearCode,
    p: &Matrix<KField>,
) -> Result<LinearCode, RankError> {
    if p.rows() != p.cols() || p.inverse(t.k()).is_none() {
        return Err(RankError::Singular);
    }
    let pl = Matrix::new(
        p.rows(),
        p.cols(),
        (0..p.rows() * p.cols())
            .map(|i| t.embed(p.at(i / p.cols(), i % p.cols())))
            .collect::<Vec<_>>(),
    );
    let rows = (0..code.gen.rows())
        .map(|i| pl.transpose().row_mul_mt(code.gen.row(i), t.l()))
        .collect();
    Ok(LinearCode::from_rows(t, code.n, rows))
}

/// Gaussian binomial: number of `r`-dimensional subspaces of a
/// `k`-dimensional space over a field with `q` elements.
pub fn gaussian_binomial(q: u128, k: usize, r: usize) -> BigUint {
    if r > k {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow((k - i) as u32) - BigUint::one();
        den *= q.pow((i + 1) as u32) - BigUint::one();
    }
    num / den
}

/// Exact `M_r` by exhaustive enumeration of all `r`-dimensional subspaces,
/// minimizing the joint support dimension. `M_0 = 0` by convention. Errors
/// with the subspace count when it exceeds `cap`.
pub fn grw_oracle(
    t: &FieldTower,
    code: &LinearCode,
    r: usize,
    cap: u64,
) -> Result<usize, RankError> {
    if r == 0 {
        return Ok(0);
    }
    assert!(r <= code.k(), "subspace dimension exceeds the code dimension");
    let count = gaussian_binomial(t.l().order(), code.k(), r);
    if count > BigUint::from(cap) {
        return Err(RankError::TooLarge(count));
    }
    let gen_rows = code.gen.row_vecs();
    let mut best = usize::MAX;
    enumerate_subspaces(t, &gen_rows, r, &mut |rows| {
        let w = joint_support_rank(t, rows);
        if w < best {
            best = w;
        }
        best > r // continue while the trivial lower bound is unattained
    });
    Ok(best)
}

/// The whole hierarchy `M_1..M_k` by the oracle.
pub fn grw_hierarchy_oracle(
    t: &FieldTower,
    code: &LinearCode,
    cap: u64,
) -> Result<Vec<usize>, RankError> {
    (1..=code.k())
        .map(|r| grw_oracle(t, code, r, cap))
        .collect()
}

/// Largest rank weight of a codeword, enumerating one representative per
/// projective point (scaling leaves the rank weight unchanged). Agrees with
/// [`last_weight`]; kept as a second, independent route for `r = k`.
pub fn max_weight_oracle(
    t: &FieldTower,
    code: &LinearCode,
    cap: u64,
) -> Result<usize, RankError> {
    if code.k() == 0 {
        return Err(RankError::ZeroCode);
    }
    let count = gaussian_binomial(t.l().order(), code.k(), 1);
    if count > BigUint::from(cap) {
        return Err(RankError::TooLarge(count));
    }
    let gen_rows = code.gen.row_vecs();
    let mut best = 0;
    enumerate_subspaces(t, &gen_rows, 1, &mut |rows| {
        let w = joint_support_rank(t, rows);
        if w > best {
            best = w;
        }
        true
    });
    Ok(best)
}

/// Visit every `r`-dimensional subspace of the row space exactly once, as the
/// rows `A * gen` for each `r x k` matrix `A` in reduced echelon form. Pivot
/// profiles are enumerated in colex order, free entries by field index. The
/// visitor returns `false` to stop early.
fn enumerate_subspaces(
    t: &FieldTower,
    gen_rows: &[Vec<LElt>],
    r: usize,
    visit: &mut dyn FnMut(&[Vec<LElt>]) -> bool,
) {
    let l = t.l();
    let k = gen_rows.len();
    let n = gen_rows.first().map_or(0, |x| x.len());
    let order = l.order();
    let mut profiles = combinations(k, r);
    profiles.sort_by(|a, b| {
        let ra: Vec<usize> = a.iter().rev().cloned().collect();
        let rb: Vec<usize> = b.iter().rev().cloned().collect();
        ra.cmp(&rb)
    });
    for pivots in profiles {
        // Free coefficient slots of the echelon pattern.
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in (p + 1)..k {
                if !pivots.contains(&j) {
                    free.push((i, j));
                }
            }
        }
        let mut counter = vec![0u128; free.len()];
        loop {
            // Coefficient matrix rows in L^k.
            let mut coeff = vec![vec![l.zero(); k]; r];
            for (i, &p) in pivots.iter().enumerate() {
                coeff[i][p] = l.one();
            }
            for (slot, &(i, j)) in free.iter().enumerate() {
                coeff[i][j] = l.from_index(counter[slot]);
            }
            // Subspace basis rows in L^n.
            let mut rows = vec![vec![l.zero(); n]; r];
            for i in 0..r {
                for j in 0..k {
                    if l.is_zero(&coeff[i][j]) {
                        continue;
                    }
                    for c in 0..n {
                        let prod = l.mul(&coeff[i][j], &gen_rows[j][c]);
                        rows[i][c] = l.add(&rows[i][c], &prod);
                    }
                }
            }
            if !visit(&rows) {
                return;
            }
            // Odometer over free slots.
            let mut s = 0;
            loop {
                if s == counter.len() {
                    break;
                }
                counter[s] += 1;
                if counter[s] < order {
                    break;
                }
                counter[s] = 0;
                s += 1;
            }
            if s == counter.len() {
                break;
            }
        }
    }
}

fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    rec(0, k, r, &mut cur, &mut out);
    out
}

/// Number of subspaces the oracle would enumerate, for feasibility checks.
pub fn oracle_cost(t: &FieldTower, k: usize, r: usize) -> Option<u64> {
    gaussian_binomial(t.l().order(), k, r).to_u64()
}
