//! Checkers for bilinear decompositions and for the basis multiplication
//! table. None of them trust the derivation: each evaluates both sides of
//! an identity and compares exactly.
//!
//! The primary certificate is [`verify_bilinear_identity`]. Both sides of
//! `XY = Σ u_k(X)·v_k(Y)·W_k` are bilinear in `(X, Y)`, so agreement on the
//! sixteen pairs of standard matrix units proves agreement everywhere.

use std::fmt;

use rayon::prelude::*;
use serde_json::json;

use crate::construction::{BilinearDecomposition, StrassenBasis};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{flatten, rank, Mat2};

/// Default limit on the number of `(X, Y)` pairs for [`verify_exhaustive_gf`].
pub const DEFAULT_PAIR_BUDGET: u128 = 10_000_000;

/// A value that failed to match.
#[derive(Clone, Debug, PartialEq)]
pub enum Observed {
    Matrix(Mat2),
    Scalar(Scalar),
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Matrix(m) => m.fmt(f),
            Observed::Scalar(s) => s.fmt(f),
        }
    }
}

/// First counterexample found, in the checker's iteration order.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub description: String,
    pub x_index: usize,
    pub y_index: usize,
    pub z_index: Option<usize>,
    pub expected: Observed,
    pub actual: Observed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub name: &'static str,
    pub checks_run: u64,
    pub first_failure: Option<Failure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let failure = self.first_failure.as_ref().map(|f| {
            json!({
                "description": f.description,
                "x_index": f.x_index,
                "y_index": f.y_index,
                "z_index": f.z_index,
                "expected": f.expected.to_string(),
                "actual": f.actual.to_string(),
            })
        });
        json!({
            "check": self.name,
            "passed": self.passed(),
            "checks_run": self.checks_run,
            "first_failure": failure,
        })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = match self.name {
            "exhaustive" => "pairs",
            "trilinear" => "triples",
            "bilinear" => "pairs",
            "table" => "cells",
            _ => "checks",
        };
        match &self.first_failure {
            None => write!(f, "{}: {} {} checked, passed", self.name, self.checks_run, unit),
            Some(fail) => {
                write!(
                    f,
                    "{}: FAILED after {} {} at {} (X #{}, Y #{}",
                    self.name, self.checks_run, unit, fail.description, fail.x_index, fail.y_index
                )?;
                if let Some(z) = fail.z_index {
                    write!(f, ", Z #{z}")?;
                }
                write!(f, "): expected {}, got {}", fail.expected, fail.actual)
            }
        }
    }
}

const UNIT_NAMES: [&str; 4] = ["e11", "e12", "e21", "e22"];

/// Checks the bilinear identity on all 16 pairs of standard matrix units.
pub fn verify_bilinear_identity(dec: &BilinearDecomposition) -> Result<VerificationReport> {
    let field = dec.field();
    field.require_exact()?;
    let mut checks = 0;
    for a in 0..4 {
        for b in 0..4 {
            checks += 1;
            let x = Mat2::unit(field, a);
            let y = Mat2::unit(field, b);
            let expected = &x * &y;
            let actual = dec.evaluate(&x, &y)?;
            if expected != actual {
                return Ok(VerificationReport {
                    name: "bilinear",
                    checks_run: checks,
                    first_failure: Some(Failure {
                        description: format!("X = {}, Y = {}", UNIT_NAMES[a], UNIT_NAMES[b]),
                        x_index: a,
                        y_index: b,
                        z_index: None,
                        expected: Observed::Matrix(expected),
                        actual: Observed::Matrix(actual),
                    }),
                });
            }
        }
    }
    Ok(VerificationReport {
        name: "bilinear",
        checks_run: checks,
        first_failure: None,
    })
}

/// Matrix number `idx` over GF(p): base-p digits of `idx`, `a11` most significant.
pub fn enumerate_matrix(field: Field, idx: usize) -> Mat2 {
    let p = field.modulus().expect("prime field") as usize;
    let mut digits = [0i64; 4];
    let mut rest = idx;
    for d in digits.iter_mut().rev() {
        *d = (rest % p) as i64;
        rest /= p;
    }
    Mat2::from_i64(field, digits)
}

/// Brute force over every pair of 2×2 matrices over GF(p), without relying
/// on bilinearity. Work is split across threads by `X`; the reported
/// failure is the first in `(X, Y)` lexicographic order.
pub fn verify_exhaustive_gf(dec: &BilinearDecomposition) -> Result<VerificationReport> {
    verify_exhaustive_gf_with_budget(dec, DEFAULT_PAIR_BUDGET)
}

pub fn verify_exhaustive_gf_with_budget(
    dec: &BilinearDecomposition,
    budget: u128,
) -> Result<VerificationReport> {
    let field = dec.field();
    field.require_exact()?;
    let p = field.modulus().ok_or(Error::NotPrimeField(field))? as u128;
    let count = p.pow(4);
    let pairs = count * count;
    if pairs > budget {
        return Err(Error::FieldTooLarge { pairs, budget });
    }
    let count = count as usize;
    let mats: Vec<Mat2> = (0..count).map(|i| enumerate_matrix(field, i)).collect();
    let eval_all = |left: bool| -> Result<Vec<Vec<Scalar>>> {
        mats.iter()
            .map(|m| {
                dec.terms()
                    .iter()
                    .map(|t| if left { t.u.eval(m) } else { t.v.eval(m) })
                    .collect()
            })
            .collect()
    };
    let u_vals = eval_all(true)?;
    let v_vals = eval_all(false)?;

    let failure = (0..count).into_par_iter().find_map_first(|xi| {
        (0..count).find_map(|yi| {
            let expected = &mats[xi] * &mats[yi];
            let mut actual = Mat2::zero(field);
            for (k, t) in dec.terms().iter().enumerate() {
                let s = &u_vals[xi][k] * &v_vals[yi][k];
                if !s.is_zero() {
                    actual = &actual + &t.w.scaled(&s);
                }
            }
            (expected != actual).then(|| Failure {
                description: format!("X = {}, Y = {}", mats[xi], mats[yi]),
                x_index: xi,
                y_index: yi,
                z_index: None,
                expected: Observed::Matrix(expected),
                actual: Observed::Matrix(actual),
            })
        })
    });
    let checks_run = match &failure {
        None => pairs as u64,
        Some(f) => (f.x_index * count + f.y_index + 1) as u64,
    };
    Ok(VerificationReport {
        name: "exhaustive",
        checks_run,
        first_failure: failure,
    })
}

/// Checks `tr(XYZ) = Σ u_k(X)·v_k(Y)·tr(W_k·Z)` on all 64 unit triples.
pub fn verify_trilinear(dec: &BilinearDecomposition) -> Result<VerificationReport> {
    let field = dec.field();
    field.require_exact()?;
    let mut checks = 0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                checks += 1;
                let (x, y, z) = (
                    Mat2::unit(field, a),
                    Mat2::unit(field, b),
                    Mat2::unit(field, c),
                );
                let expected = (&(&x * &y) * &z).trace();
                let mut actual = Scalar::zero(field);
                for t in dec.terms() {
                    let w_z = (&t.w * &z).trace();
                    actual = actual + &(&t.u.eval(&x)? * &t.v.eval(&y)?) * &w_z;
                }
                if expected != actual {
                    return Ok(VerificationReport {
                        name: "trilinear",
                        checks_run: checks,
                        first_failure: Some(Failure {
                            description: format!(
                                "X = {}, Y = {}, Z = {}",
                                UNIT_NAMES[a], UNIT_NAMES[b], UNIT_NAMES[c]
                            ),
                            x_index: a,
                            y_index: b,
                            z_index: Some(c),
                            expected: Observed::Scalar(expected),
                            actual: Observed::Scalar(actual),
                        }),
                    });
                }
            }
        }
    }
    Ok(VerificationReport {
        name: "trilinear",
        checks_run: checks,
        first_failure: None,
    })
}

/// True iff there are exactly seven `W_k` and no two are linearly
/// dependent (in particular none is zero or a multiple of another).
pub fn count_seven_distinct(dec: &BilinearDecomposition) -> bool {
    let ws: Vec<&Mat2> = dec.terms().iter().map(|t| &t.w).collect();
    if ws.len() != 7 {
        return false;
    }
    (0..7).all(|i| (i + 1..7).all(|j| rank(&flatten(&[ws[i], ws[j]])) == 2))
}

/// Row labels (basis X) and column labels (basis Y) of the table.
pub const TABLE_ROWS: [&str; 4] = ["D", "M", "D⁻¹MD", "DMD⁻¹"];
pub const TABLE_COLS: [&str; 4] = ["D⁻¹", "M", "D⁻¹MD", "DMD⁻¹"];

/// Simplified cell forms as (sign, index into the seven product matrices);
/// `None` is the zero matrix.
const TABLE_SHAPE: [[Option<(i64, usize)>; 4]; 4] = [
    [Some((1, 0)), Some((1, 4)), Some((1, 5)), Some((1, 6))],
    [Some((1, 1)), None, Some((-1, 5)), Some((1, 1))],
    [Some((1, 2)), Some((1, 2)), None, Some((-1, 6))],
    [Some((1, 3)), Some((-1, 4)), Some((1, 3)), None],
];

/// One cell of the basis multiplication table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub row: usize,
    pub col: usize,
    /// Simplified form, e.g. `-MD`.
    pub simplified: String,
    pub product: Mat2,
    pub expected: Mat2,
}

impl TableEntry {
    pub fn holds(&self) -> bool {
        self.product == self.expected
    }
}

/// All sixteen products `basis_x[i] · basis_y[j]` next to their simplified
/// forms.
pub fn multiplication_table(basis: &StrassenBasis) -> Vec<TableEntry> {
    let field = basis.field();
    let xs = basis.basis_x();
    let ys = basis.basis_y();
    let products = basis.product_matrices();
    let mut out = Vec::with_capacity(16);
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let (simplified, expected) = match TABLE_SHAPE[i][j] {
                None => ("0".to_string(), Mat2::zero(field)),
                Some((sign, k)) => {
                    let label = crate::construction::PRODUCT_LABELS[k];
                    if sign < 0 {
                        (format!("-{label}"), -&products[k])
                    } else {
                        (label.to_string(), products[k].clone())
                    }
                }
            };
            out.push(TableEntry {
                row: i,
                col: j,
                simplified,
                product: x * y,
                expected,
            });
        }
    }
    out
}

pub fn verify_multiplication_table(basis: &StrassenBasis) -> VerificationReport {
    let mut checks = 0;
    for entry in multiplication_table(basis) {
        checks += 1;
        if !entry.holds() {
            return VerificationReport {
                name: "table",
                checks_run: checks,
                first_failure: Some(Failure {
                    description: format!(
                        "{} · {} = {}",
                        TABLE_ROWS[entry.row], TABLE_COLS[entry.col], entry.simplified
                    ),
                    x_index: entry.row,
                    y_index: entry.col,
                    z_index: None,
                    expected: Observed::Matrix(entry.expected),
                    actual: Observed::Matrix(entry.product),
                }),
            };
        }
    }
    VerificationReport {
        name: "table",
        checks_run: checks,
        first_failure: None,
    }
}
