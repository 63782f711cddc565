//! Exact matrices over a [`Field`] with the row-vector convention: codewords
//! are rows and the matrix `M` acts by `c -> c * M^t`. Provides reduced
//! echelon forms, kernels, companion matrices, minimal and characteristic
//! polynomials, and the `K[x]`-module decompositions of `K^n` (primary
//! components and cyclic decompositions).
//!
//! Every subspace is returned as a full-rank matrix in reduced row echelon
//! form, so subspace equality is matrix equality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gf::Field;
use crate::polyfact::{self, Poly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatError {
    NotSquare,
    NotMonic,
    SizeMismatch,
    Singular,
}

impl fmt::Display for MatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            MatError::NotSquare => "matrix is not square",
            MatError::NotMonic => "polynomial is not monic",
            MatError::SizeMismatch => "dimension mismatch",
            MatError::Singular => "matrix is singular",
        };
        f.write_str(msg)
    }
}

/// Dense row-major matrix with exact entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F::Elt>,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F::Elt>) -> Self {
        assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(fld: &F, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![fld.zero(); rows * cols],
        }
    }

    pub fn identity(fld: &F, n: usize) -> Self {
        let mut m = Self::zeros(fld, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = fld.one();
        }
        m
    }

    pub fn from_rows(fld: &F, rows: Vec<Vec<F::Elt>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols));
        let _ = fld;
        Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F::Elt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[F::Elt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, rhs: &Self, fld: &F) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(fld, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if fld.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = fld.mul(a, rhs.at(k, j));
                    let cur = out.at(i, j).clone();
                    *out.at_mut(i, j) = fld.add(&cur, &t);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self, fld: &F) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| fld.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &F::Elt, fld: &F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| fld.mul(a, c)).collect(),
        }
    }

    pub fn is_zero(&self, fld: &F) -> bool {
        self.data.iter().all(|a| fld.is_zero(a))
    }

    /// Stack `self` on top of `other`.
    pub fn stack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// The image of a row vector under right multiplication by `self^t`,
    /// i.e. the paper's endomorphism `c -> c M^t`.
    pub fn row_mul_mt(&self, v: &[F::Elt], fld: &F) -> Vec<F::Elt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| dot(self.row(i), v, fld))
            .collect()
    }

    /// `v * self` for a row vector `v`.
    pub fn row_mul(&self, v: &[F::Elt], fld: &F) -> Vec<F::Elt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![fld.zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if fld.is_zero(c) {
                continue;
            }
            for j in 0..self.cols {
                let t = fld.mul(c, self.at(i, j));
                out[j] = fld.add(&out[j], &t);
            }
        }
        out
    }

    /// Reduced row echelon form with zero rows dropped; returns the canonical
    /// basis matrix of the row space and the pivot columns.
    pub fn rref(&self, fld: &F) -> (Self, Vec<usize>) {
        let mut rows = self.row_vecs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| !fld.is_zero(&rows[i][c])) else {
                continue;
            };
            rows.swap(r, p);
            let inv = fld.inv(&rows[r][c]).unwrap();
            for x in rows[r].iter_mut() {
                *x = fld.mul(x, &inv);
            }
            for i in 0..rows.len() {
                if i != r && !fld.is_zero(&rows[i][c]) {
                    let f = rows[i][c].clone();
                    for j in 0..self.cols {
                        let t = fld.mul(&f, &rows[r][j]);
                        rows[i][j] = fld.sub(&rows[i][j], &t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        (Self::from_rows(fld, rows), pivots)
    }

    pub fn rank(&self, fld: &F) -> usize {
        self.rref(fld).1.len()
    }

    /// Canonical basis of the nullspace `{c : c * self^t = 0}`.
    pub fn kernel(&self, fld: &F) -> Self {
        let (r, pivots) = self.rref(fld);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![fld.zero(); self.cols];
            v[fc] = fld.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = fld.neg(r.at(i, fc));
            }
            rows.push(v);
        }
        let m = Self::from_rows(fld, rows);
        if m.rows == 0 {
            return Self::zeros(fld, 0, self.cols);
        }
        m.rref(fld).0
    }

    /// Solve `x * self = b`; `None` when inconsistent. Unique when the rows
    /// of `self` are independent.
    pub fn solve_row(&self, b: &[F::Elt], fld: &F) -> Option<Vec<F::Elt>> {
        assert_eq!(b.len(), self.cols);
        // x * self = b  <=>  self^t * x^t = b^t: eliminate on [self^t | b^t].
        let mut aug = self.transpose();
        let extra: Vec<F::Elt> = b.to_vec();
        let mut aug_rows = aug.row_vecs();
        for (i, row) in aug_rows.iter_mut().enumerate() {
            row.push(extra[i].clone());
        }
        aug = Self::from_rows(fld, aug_rows);
        let (r, pivots) = aug.rref(fld);
        let mut x = vec![fld.zero(); self.rows];
        for (i, &pc) in pivots.iter().enumerate() {
            if pc == self.rows {
                return None; // pivot in the augmented column
            }
            x[pc] = r.at(i, self.rows).clone();
        }
        // Verify (free variables are set to zero).
        let check = self.row_mul(&x, fld);
        if check
            .iter()
            .zip(b)
            .all(|(u, v)| u == v)
        {
            Some(x)
        } else {
            None
        }
    }

    pub fn inverse(&self, fld: &F) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut rows = self.row_vecs();
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                row.push(if i == j { fld.one() } else { fld.zero() });
            }
        }
        let aug = Self {
            rows: n,
            cols: 2 * n,
            data: rows.into_iter().flatten().collect(),
        };
        let (r, pivots) = aug.rref(fld);
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut out = Self::zeros(fld, n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = r.at(i, n + j).clone();
            }
        }
        Some(out)
    }

    /// Whether `v` lies in the row space. `self` must already be in RREF.
    pub fn row_space_contains(&self, v: &[F::Elt], fld: &F) -> bool {
        reduce_against(self, v, fld).iter().all(|c| fld.is_zero(c))
    }
}

fn dot<F: Field>(a: &[F::Elt], b: &[F::Elt], fld: &F) -> F::Elt {
    let mut acc = fld.zero();
    for (x, y) in a.iter().zip(b) {
        acc = fld.add(&acc, &fld.mul(x, y));
    }
    acc
}

fn reduce_against<F: Field>(rref: &Matrix<F>, v: &[F::Elt], fld: &F) -> Vec<F::Elt> {
    let mut w = v.to_vec();
    for i in 0..rref.rows() {
        let pivot = (0..rref.cols()).find(|&j| !fld.is_zero(rref.at(i, j)));
        if let Some(p) = pivot {
            if !fld.is_zero(&w[p]) {
                let c = w[p].clone();
                for j in 0..rref.cols() {
                    let t = fld.mul(&c, rref.at(i, j));
                    w[j] = fld.sub(&w[j], &t);
                }
            }
        }
    }
    w
}

/// Intersection of two row spaces (Zassenhaus): rows of the reduced
/// `[A | A; B | 0]` whose left half vanished carry the intersection in the
/// right half.
pub fn row_space_intersection<F: Field>(a: &Matrix<F>, b: &Matrix<F>, fld: &F) -> Matrix<F> {
    assert_eq!(a.cols(), b.cols());
    let n = a.cols();
    let mut rows = Vec::new();
    for i in 0..a.rows() {
        let mut r = a.row(i).to_vec();
        r.extend(a.row(i).iter().cloned());
        rows.push(r);
    }
    for i in 0..b.rows() {
        let mut r = b.row(i).to_vec();
        r.extend(core::iter::repeat(fld.zero()).take(n));
        rows.push(r);
    }
    let big = Matrix::new(rows.len(), 2 * n, rows.into_iter().flatten().collect());
    let (r, _) = big.rref(fld);
    let mut inter = Vec::new();
    for i in 0..r.rows() {
        if (0..n).all(|j| fld.is_zero(r.at(i, j))) {
            inter.push(r.row(i)[n..].to_vec());
        }
    }
    let m = Matrix::from_rows(fld, inter);
    if m.rows() == 0 {
        Matrix::zeros(fld, 0, n)
    } else {
        m.rref(fld).0
    }
}

/// Companion matrix of a monic polynomial, with sub-diagonal ones and the
/// negated coefficients in the last column.
pub fn companion<F: Field>(p: &Poly<F>, fld: &F) -> Result<Matrix<F>, MatError> {
    if !p.is_monic(fld) {
        return Err(MatError::NotMonic);
    }
    let d = p.deg().unwrap();
    assert!(d >= 1);
    let mut m = Matrix::zeros(fld, d, d);
    for i in 1..d {
        *m.at_mut(i, i - 1) = fld.one();
    }
    for i in 0..d {
        *m.at_mut(i, d - 1) = fld.neg(&p.coeff(i, fld));
    }
    Ok(m)
}

/// Block-diagonal assembly.
pub fn block_diag<F: Field>(fld: &F, blocks: &[Matrix<F>]) -> Matrix<F> {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = Matrix::zeros(fld, n, n);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.rows(), b.cols());
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                *out.at_mut(off + i, off + j) = b.at(i, j).clone();
            }
        }
        off += b.rows();
    }
    out
}

/// Evaluate a polynomial at a square matrix (Horner).
pub fn eval_poly_at<F: Field>(p: &Poly<F>, m: &Matrix<F>, fld: &F) -> Matrix<F> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut acc = Matrix::zeros(fld, n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(m, fld);
        for i in 0..n {
            let cur = acc.at(i, i).clone();
            *acc.at_mut(i, i) = fld.add(&cur, c);
        }
    }
    acc
}

/// `v * P(M)^t`, evaluated without forming `P(M)` (Horner on rows).
pub fn apply_poly_row<F: Field>(v: &[F::Elt], p: &Poly<F>, m: &Matrix<F>, fld: &F) -> Vec<F::Elt> {
    let mut acc = vec![fld.zero(); v.len()];
    for c in p.coeffs().iter().rev() {
        acc = m.row_mul_mt(&acc, fld);
        for (a, x) in acc.iter_mut().zip(v) {
            let t = fld.mul(c, x);
            *a = fld.add(a, &t);
        }
    }
    acc
}

/// Rows `v, vM^t, ..., v(M^t)^(d-1)`.
pub fn krylov<F: Field>(v: &[F::Elt], m: &Matrix<F>, d: usize, fld: &F) -> Matrix<F> {
    let mut rows = Vec::with_capacity(d);
    let mut cur = v.to_vec();
    for _ in 0..d {
        rows.push(cur.clone());
        cur = m.row_mul_mt(&cur, fld);
    }
    Matrix::from_rows(fld, rows)
}

/// Minimal monic polynomial `P` with `v * P(M)^t = 0`: incremental echelon
/// reduction of the Krylov sequence, with the combination history giving the
/// relation the moment dependence appears.
pub fn order_poly<F: Field>(v: &[F::Elt], m: &Matrix<F>, fld: &F) -> Poly<F> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    // (echelon vector with unit pivot, pivot column, history polynomial)
    let mut basis: Vec<(Vec<F::Elt>, usize, Poly<F>)> = Vec::new();
    let mut cur = v.to_vec();
    for j in 0..=n {
        let mut w = cur.clone();
        let mut hist = Poly::x(fld).pow(j, fld);
        for (bv, bp, bh) in &basis {
            if !fld.is_zero(&w[*bp]) {
                let c = w[*bp].clone();
                for (wi, bi) in w.iter_mut().zip(bv) {
                    let t = fld.mul(&c, bi);
                    *wi = fld.sub(wi, &t);
                }
                hist = hist.sub(&bh.scale(&c, fld), fld);
            }
        }
        match (0..n).find(|&i| !fld.is_zero(&w[i])) {
            None => return hist, // monic of degree j by construction
            Some(p) => {
                let inv = fld.inv(&w[p]).unwrap();
                for wi in w.iter_mut() {
                    *wi = fld.mul(wi, &inv);
                }
                hist = hist.scale(&inv, fld);
                basis.push((w, p, hist));
            }
        }
        cur = m.row_mul_mt(&cur, fld);
    }
    unreachable!("a relation must appear within n+1 Krylov vectors");
}

/// Minimal polynomial of a square matrix: lcm of the order polynomials of
/// the standard basis vectors, with early exit at full degree.
pub fn min_poly<F: Field>(m: &Matrix<F>, fld: &F) -> Result<Poly<F>, MatError> {
    if m.rows() != m.cols() {
        return Err(MatError::NotSquare);
    }
    let n = m.rows();
    assert!(n >= 1);
    let mut acc = Poly::one(fld);
    for i in 0..n {
        let mut e = vec![fld.zero(); n];
        e[i] = fld.one();
        let op = order_poly(&e, m, fld);
        acc = acc.lcm(&op, fld).unwrap();
        if acc.deg() == Some(n) {
            break;
        }
    }
    Ok(acc)
}

/// Characteristic polynomial via Hessenberg reduction (exact, any field).
/// `min_poly | char_poly` is checked on the way out.
pub fn char_poly<F: Field>(m: &Matrix<F>, fld: &F) -> Result<Poly<F>, MatError> {
    if m.rows() != m.cols() {
        return Err(MatError::NotSquare);
    }
    let n = m.rows();
    let mut h = m.clone();
    // Similarity reduction to upper Hessenberg form.
    for c in 0..n.saturating_sub(2) {
        let Some(p) = ((c + 1)..n).find(|&r| !fld.is_zero(h.at(r, c))) else {
            continue;
        };
        if p != c + 1 {
            for j in 0..n {
                let a = h.at(c + 1, j).clone();
                let b = h.at(p, j).clone();
                *h.at_mut(c + 1, j) = b;
                *h.at_mut(p, j) = a;
            }
            for i in 0..n {
                let a = h.at(i, c + 1).clone();
                let b = h.at(i, p).clone();
                *h.at_mut(i, c + 1) = b;
                *h.at_mut(i, p) = a;
            }
        }
        let pinv = fld.inv(h.at(c + 1, c)).unwrap();
        for r in (c + 2)..n {
            if fld.is_zero(h.at(r, c)) {
                continue;
            }
            let f = fld.mul(h.at(r, c), &pinv);
            for j in 0..n {
                let t = fld.mul(&f, h.at(c + 1, j));
                let cur = h.at(r, j).clone();
                *h.at_mut(r, j) = fld.sub(&cur, &t);
            }
            for i in 0..n {
                let t = fld.mul(&f, h.at(i, r));
                let cur = h.at(i, c + 1).clone();
                *h.at_mut(i, c + 1) = fld.add(&cur, &t);
            }
        }
    }
    // Leading-principal-minor recurrence for det(xI - H).
    let x = Poly::x(fld);
    let mut p: Vec<Poly<F>> = Vec::with_capacity(n + 1);
    p.push(Poly::one(fld));
    for i in 1..=n {
        let mut term = x
            .sub(&Poly::constant(fld, h.at(i - 1, i - 1).clone()), fld)
            .mul(&p[i - 1], fld);
        let mut subprod = fld.one();
        for k in 1..i {
            subprod = fld.mul(&subprod, h.at(i - k, i - k - 1));
            let coeff = fld.mul(h.at(i - 1 - k, i - 1), &subprod);
            term = term.sub(&p[i - 1 - k].scale(&coeff, fld), fld);
        }
        p.push(term);
    }
    let chi = p.pop().unwrap();
    let mu = min_poly(m, fld)?;
    assert!(
        mu.divides(&chi, fld),
        "minimal polynomial must divide the characteristic polynomial"
    );
    Ok(chi)
}

/// One `f_i`-primary piece of `K^n`: the kernel of `f_i^(m_i)(M)` together
/// with the matrix of the endomorphism induced on it.
#[derive(Debug, Clone)]
pub struct PrimaryComponent<F: Field> {
    /// Monic irreducible divisor of the minimal polynomial.
    pub f: Poly<F>,
    /// Multiplicity in the minimal polynomial.
    pub m_mult: usize,
    /// Multiplicity in the characteristic polynomial.
    pub n_mult: usize,
    /// `dim = n_mult * deg(f)`.
    pub dim: usize,
    /// RREF basis (rows) of `ker(f^m_mult(M))`.
    pub basis: Matrix<F>,
    /// Matrix `M_i` with `(c * basis) M^t = (c M_i^t) * basis`.
    pub induced: Matrix<F>,
}

/// Primary decomposition `K^n = ker(f_1^(m_1)(M)) ⊕ ... ⊕ ker(f_s^(m_s)(M))`,
/// one component per irreducible divisor of the minimal polynomial, in
/// canonical factor order.
pub fn primary_components<F: Field>(
    m: &Matrix<F>,
    fld: &F,
    seed: u64,
) -> Result<Vec<PrimaryComponent<F>>, MatError> {
    if m.rows() != m.cols() {
        return Err(MatError::NotSquare);
    }
    let n = m.rows();
    let mu = min_poly(m, fld)?;
    let chi = char_poly(m, fld)?;
    let fact = polyfact::factor(&mu, fld, seed).expect("minimal polynomial is nonzero");
    let mut out = Vec::new();
    let mut total = 0;
    for (fi, mi) in &fact.factors {
        let power = fi.pow(*mi, fld);
        let ker = eval_poly_at(&power, m, fld).kernel(fld);
        let dim = ker.rows();
        let mut n_mult = 0;
        let mut rest = chi.clone();
        while fi.divides(&rest, fld) {
            rest = rest.div_exact(fi, fld);
            n_mult += 1;
        }
        assert_eq!(dim, n_mult * fi.deg().unwrap());
        // Induced matrix: y_j solves row_j(P) M^t = y_j P; then M_i = Y^t.
        let mut yrows = Vec::with_capacity(dim);
        for j in 0..dim {
            let img = m.row_mul_mt(ker.row(j), fld);
            let y = ker
                .solve_row(&img, fld)
                .expect("primary component is M-stable");
            yrows.push(y);
        }
        let induced = Matrix::from_rows(fld, yrows).transpose();
        total += dim;
        out.push(PrimaryComponent {
            f: fi.clone(),
            m_mult: *mi,
            n_mult,
            dim,
            basis: ker,
            induced,
        });
    }
    assert_eq!(total, n, "primary components must fill the space");
    Ok(out)
}

/// A cyclic piece: the subspace spanned by the Krylov rows of its cyclic
/// vector, on which `M` acts as the companion matrix of `theta`.
#[derive(Debug, Clone)]
pub struct CyclicComponent<F: Field> {
    pub theta: Poly<F>,
    pub cyclic_vector: Vec<F::Elt>,
    /// `deg(theta) x n`; row `k` is `v (M^t)^(k-1)`.
    pub basis: Matrix<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionMode {
    /// Chain `theta_1 | theta_2 | ... | theta_t = min_poly`.
    InvariantFactors,
    /// Every `theta` a prime power (elementary divisors).
    PrimaryCyclic,
}

/// Decompose `K^n` into `M`-cyclic subspaces by iterated maximal-order-vector
/// extraction; `sum deg(theta_i) = n` and `prod theta_i = char_poly`.
pub fn cyclic_decomposition<F: Field>(
    m: &Matrix<F>,
    mode: DecompositionMode,
    fld: &F,
    seed: u64,
) -> Result<Vec<CyclicComponent<F>>, MatError> {
    if m.rows() != m.cols() {
        return Err(MatError::NotSquare);
    }
    let mut chain = invariant_chain(m, fld, seed);
    chain.reverse(); // ascending divisibility
    debug_assert!(chain
        .windows(2)
        .all(|w| w[0].0.divides(&w[1].0, fld)));
    let pieces: Vec<(Poly<F>, Vec<F::Elt>)> = match mode {
        DecompositionMode::InvariantFactors => chain,
        DecompositionMode::PrimaryCyclic => {
            let mut out = Vec::new();
            for (theta, v) in chain {
                let fact = polyfact::factor(&theta, fld, seed).unwrap();
                for (fj, ej) in &fact.factors {
                    let power = fj.pow(*ej, fld);
                    let co = theta.div_exact(&power, fld);
                    let vj = apply_poly_row(&v, &co, m, fld);
                    debug_assert_eq!(order_poly(&vj, m, fld), power);
                    out.push((power, vj));
                }
            }
            out.sort_by(|a, b| a.0.cmp_canonical(&b.0, fld));
            out
        }
    };
    Ok(pieces
        .into_iter()
        .map(|(theta, v)| {
            let d = theta.deg().unwrap();
            let basis = krylov(&v, m, d, fld);
            CyclicComponent {
                theta,
                cyclic_vector: v,
                basis,
            }
        })
        .collect())
}

/// A vector whose order polynomial is the full minimal polynomial. Standard
/// basis vectors are tried first (so a companion matrix yields `e_1`), then
/// the guaranteed sum of per-primary-component rows of maximal order.
pub fn max_order_vector<F: Field>(m: &Matrix<F>, fld: &F, seed: u64) -> Vec<F::Elt> {
    let n = m.rows();
    let mu_deg = min_poly(m, fld).expect("square input").deg();
    for i in 0..n {
        let mut e = vec![fld.zero(); n];
        e[i] = fld.one();
        if order_poly(&e, m, fld).deg() == mu_deg {
            return e;
        }
    }
    let comps = primary_components(m, fld, seed).expect("square input");
    let mut v = vec![fld.zero(); n];
    for comp in &comps {
        let target = comp.f.pow(comp.m_mult, fld);
        let row = (0..comp.basis.rows())
            .map(|j| comp.basis.row(j))
            .find(|row| order_poly(row, m, fld) == target)
            .expect("some spanning vector attains the maximal order");
        for (vi, ri) in v.iter_mut().zip(row) {
            *vi = fld.add(vi, ri);
        }
    }
    v
}

/// Cyclic vector of `M` when one exists (`deg min_poly = n`). Standard basis
/// vectors are tried first, then the constructive component-sum vector.
pub fn is_cyclic<F: Field>(m: &Matrix<F>, fld: &F) -> Result<Option<Vec<F::Elt>>, MatError> {
    if m.rows() != m.cols() {
        return Err(MatError::NotSquare);
    }
    let n = m.rows();
    let mu = min_poly(m, fld)?;
    if mu.deg() != Some(n) {
        return Ok(None);
    }
    for i in 0..n {
        let mut e = vec![fld.zero(); n];
        e[i] = fld.one();
        if order_poly(&e, m, fld).deg() == Some(n) {
            return Ok(Some(e));
        }
    }
    let v = max_order_vector(m, fld, 0);
    debug_assert_eq!(order_poly(&v, m, fld).deg(), Some(n));
    Ok(Some(v))
}

/// Invariant factors with their cyclic vectors, in descending divisibility
/// order (the first entry has order `min_poly`). Recursive extraction: take a
/// maximal-order vector, pass to the quotient module, decompose it, and lift
/// the quotient generators back without changing their order.
fn invariant_chain<F: Field>(m: &Matrix<F>, fld: &F, seed: u64) -> Vec<(Poly<F>, Vec<F::Elt>)> {
    let n = m.rows();
    if n == 0 {
        return Vec::new();
    }
    let v = max_order_vector(m, fld, seed);
    let mu = order_poly(&v, m, fld);
    let z = mu.deg().unwrap();
    if z == n {
        return vec![(mu, v)];
    }
    let zbasis = krylov(&v, m, z, fld);
    let t = complete_basis(&zbasis, fld);
    let tinv = t.inverse(fld).expect("basis completion is invertible");
    // In the new coordinates y (with c = y T), the operator is y -> y B
    // where B = T M^t T^(-1). Stability of the cyclic subspace makes the
    // top-right z x (n-z) block of B vanish.
    let b = t.mul(&m.transpose(), fld).mul(&tinv, fld);
    for i in 0..z {
        for j in z..n {
            assert!(fld.is_zero(b.at(i, j)), "cyclic subspace must be stable");
        }
    }
    let mut quot_t = Matrix::zeros(fld, n - z, n - z);
    for i in z..n {
        for j in z..n {
            *quot_t.at_mut(i - z, j - z) = b.at(i, j).clone();
        }
    }
    // quot_t acts on quotient coordinates as y -> y quot_t, i.e. it is the
    // transpose of the quotient operator matrix in our convention.
    let quot = quot_t.transpose();
    let sub = invariant_chain(&quot, fld, seed);
    let mut out = vec![(mu.clone(), v.clone())];
    for (theta, wq) in sub {
        // Any preimage of the quotient generator...
        let mut coords = vec![fld.zero(); n];
        coords[z..].clone_from_slice(&wq);
        let w0 = t.row_mul(&coords, fld);
        // ...corrected so that theta still annihilates it: theta(rho)(w0)
        // lands in the cyclic subspace as v * S(M)^t with theta | S.
        let u = apply_poly_row(&w0, &theta, m, fld);
        let s = zbasis
            .solve_row(&u, fld)
            .expect("theta image lies in the extracted cyclic subspace");
        let spoly = Poly::from_coeffs(fld, s);
        let (q, r) = spoly.divmod(&theta, fld).unwrap();
        assert!(r.is_zero(), "maximal-order extraction admits a lift");
        let corr = apply_poly_row(&v, &q, m, fld);
        let w: Vec<F::Elt> = w0
            .iter()
            .zip(&corr)
            .map(|(a, b)| fld.sub(a, b))
            .collect();
        debug_assert_eq!(order_poly(&w, m, fld), theta);
        out.push((theta, w));
    }
    out
}

/// Extend the (independent) rows of `partial` to a basis of the full space
/// by greedily appending standard basis vectors.
fn complete_basis<F: Field>(partial: &Matrix<F>, fld: &F) -> Matrix<F> {
    let n = partial.cols();
    let mut rows = partial.row_vecs();
    let mut current = partial.clone();
    let mut rank = current.rank(fld);
    assert_eq!(rank, partial.rows(), "rows must be independent");
    for i in 0..n {
        if rank == n {
            break;
        }
        let mut e = vec![fld.zero(); n];
        e[i] = fld.one();
        let cand = current.stack(&Matrix::from_rows(fld, vec![e.clone()]));
        let r = cand.rank(fld);
        if r > rank {
            rows.push(e);
            current = cand;
            rank = r;
        }
    }
    assert_eq!(rank, n);
    Matrix::from_rows(fld, rows)
}
