//! Canonical text rendering of elements, polynomials and matrices. Every
//! printed form re-parses to an equal value through [`crate::parse`].

use mcodes_core::gf::{Field, FieldTower, KElt, KField, LElt, LField};
use mcodes_core::polyfact::Poly;
use mcodes_core::Matrix;

/// Element of `K` as an integer (`e = 1`) or a `y`-polynomial.
pub fn fmt_kelt(t: &FieldTower, a: &KElt) -> String {
    if t.e() == 1 {
        return a[0].to_string();
    }
    let terms = monomials(a.iter().map(|c| (*c != 0).then(|| c.to_string())), "y");
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Whether a K element prints as a bare factor (no '+' inside).
fn kelt_is_simple(t: &FieldTower, a: &KElt) -> bool {
    t.e() == 1 || a.iter().filter(|c| **c != 0).count() <= 1
}

/// Element of `L` as a `w`-polynomial with `K` coefficients, e.g. `4*w^2+5`.
pub fn fmt_lelt(t: &FieldTower, a: &LElt) -> String {
    let k = t.k();
    let terms = monomials(
        a.iter().map(|c| {
            if k.is_zero(c) {
                None
            } else if kelt_is_simple(t, c) {
                Some(fmt_kelt(t, c))
            } else {
                Some(format!("({})", fmt_kelt(t, c)))
            }
        }),
        "w",
    );
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

fn lelt_is_simple(t: &FieldTower, a: &LElt) -> bool {
    let k = t.k();
    let nonzero: Vec<&KElt> = a.iter().filter(|c| !k.is_zero(c)).collect();
    match nonzero.as_slice() {
        [] => true,
        [c] => kelt_is_simple(t, c),
        _ => false,
    }
}

/// Descending monomial strings: `coeff * var^i`, with unit coefficients and
/// the exponents 0 and 1 abbreviated.
fn monomials<I: Iterator<Item = Option<String>>>(coeffs: I, var: &str) -> Vec<String> {
    let collected: Vec<Option<String>> = coeffs.collect();
    let mut out = Vec::new();
    for (i, c) in collected.iter().enumerate().rev() {
        let Some(c) = c else { continue };
        let body = match i {
            0 => return_coeff(c),
            1 => join_coeff(c, var.to_string()),
            _ => join_coeff(c, format!("{var}^{i}")),
        };
        out.push(body);
    }
    out
}

fn return_coeff(c: &str) -> String {
    c.to_string()
}

fn join_coeff(c: &str, var: String) -> String {
    if c == "1" {
        var
    } else {
        format!("{c}*{var}")
    }
}

/// Polynomial over `L` in `x`, descending powers, composite coefficients in
/// parentheses: `(4*w^2+5)*x+1`.
pub fn fmt_lpoly(t: &FieldTower, p: &Poly<LField>) -> String {
    let l = t.l();
    let terms = monomials(
        p.coeffs().iter().map(|c| {
            if l.is_zero(c) {
                None
            } else if lelt_is_simple(t, c) {
                Some(fmt_lelt(t, c))
            } else {
                Some(format!("({})", fmt_lelt(t, c)))
            }
        }),
        "x",
    );
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Polynomial over `K` in the given variable (`x` for code polynomials,
/// `y` for moduli).
pub fn fmt_kpoly_var(t: &FieldTower, p: &Poly<KField>, var: &str) -> String {
    let k = t.k();
    let terms = monomials(
        p.coeffs().iter().map(|c| {
            if k.is_zero(c) {
                None
            } else if kelt_is_simple(t, c) {
                Some(fmt_kelt(t, c))
            } else {
                Some(format!("({})", fmt_kelt(t, c)))
            }
        }),
        var,
    );
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

pub fn fmt_kpoly(t: &FieldTower, p: &Poly<KField>) -> String {
    fmt_kpoly_var(t, p, "x")
}

/// Matrix over `L`: rows joined by `;`, entries by `,`.
pub fn fmt_lmatrix(t: &FieldTower, m: &Matrix<LField>) -> String {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| fmt_lelt(t, m.at(i, j)))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn fmt_kmatrix(t: &FieldTower, m: &Matrix<KField>) -> String {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| fmt_kelt(t, m.at(i, j)))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}
