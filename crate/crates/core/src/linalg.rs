//! Exact 2×2 linear algebra and a small dense solver.
//!
//! Entries are flattened row-major everywhere: `(a11, a12, a21, a22)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

fn uniform_field<'a>(mut it: impl Iterator<Item = &'a Scalar>) -> Result<Field> {
    let first = it.next().expect("nonempty").field();
    for s in it {
        if s.field() != first {
            return Err(Error::DescriptorMismatch(first, s.field()));
        }
    }
    Ok(first)
}

fn check_same(a: Field, b: Field) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DescriptorMismatch(a, b))
    }
}

/// A 2×2 matrix over a single field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    e: [Scalar; 4],
}

impl Mat2 {
    /// Row-major entries; all must share one field.
    pub fn new(entries: [Scalar; 4]) -> Result<Self> {
        uniform_field(entries.iter())?;
        Ok(Mat2 { e: entries })
    }

    pub fn from_i64(field: Field, entries: [i64; 4]) -> Self {
        Mat2 {
            e: entries.map(|v| Scalar::from_i64(field, v)),
        }
    }

    pub fn identity(field: Field) -> Self {
        Self::from_i64(field, [1, 0, 0, 1])
    }

    pub fn zero(field: Field) -> Self {
        Self::from_i64(field, [0; 4])
    }

    /// Standard matrix unit `e_ij` for flat index `idx = 2i + j`.
    pub fn unit(field: Field, idx: usize) -> Self {
        let mut v = [0; 4];
        v[idx] = 1;
        Self::from_i64(field, v)
    }

    pub fn field(&self) -> Field {
        self.e[0].field()
    }

    pub fn entries(&self) -> &[Scalar; 4] {
        &self.e
    }

    pub fn into_entries(self) -> [Scalar; 4] {
        self.e
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.e[2 * row + col]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Scalar::is_zero)
    }

    pub fn checked_mul(&self, other: &Mat2) -> Result<Mat2> {
        check_same(self.field(), other.field())?;
        Ok(self * other)
    }

    pub fn checked_add(&self, other: &Mat2) -> Result<Mat2> {
        check_same(self.field(), other.field())?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Mat2) -> Result<Mat2> {
        check_same(self.field(), other.field())?;
        Ok(self - other)
    }

    pub fn scale(&self, s: &Scalar) -> Result<Mat2> {
        check_same(self.field(), s.field())?;
        Ok(self.scaled(s))
    }

    pub(crate) fn scaled(&self, s: &Scalar) -> Mat2 {
        Mat2 {
            e: std::array::from_fn(|i| &self.e[i] * s),
        }
    }

    pub fn trace(&self) -> Scalar {
        &self.e[0] + &self.e[3]
    }

    pub fn det(&self) -> Scalar {
        &self.e[0] * &self.e[3] - &self.e[1] * &self.e[2]
    }

    /// Inverse via the adjugate; the result is checked against `A·A⁻¹ = id`.
    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let d = det.inv()?;
        let [a, b, c, e] = &self.e;
        let inv = Mat2 {
            e: [e * &d, -(b * &d), -(c * &d), a * &d],
        };
        if self.field().is_exact() && self * &inv != Mat2::identity(self.field()) {
            return Err(Error::invariant("adjugate inverse does not invert"));
        }
        Ok(inv)
    }

    /// `P⁻¹·A·P`.
    pub fn conjugate(&self, p: &Mat2) -> Result<Mat2> {
        check_same(self.field(), p.field())?;
        Ok(&(&p.inverse()? * self) * p)
    }

    /// Nonnegative integer power.
    pub fn pow(&self, e: u32) -> Mat2 {
        (0..e).fold(Mat2::identity(self.field()), |acc, _| &acc * self)
    }

    pub fn is_scalar(&self) -> bool {
        self.e[1].is_zero() && self.e[2].is_zero() && self.e[0] == self.e[3]
    }

    pub fn mul_col(&self, v: &ColVec2) -> Result<ColVec2> {
        check_same(self.field(), v.field())?;
        Ok(ColVec2([
            &self.e[0] * &v.0[0] + &self.e[1] * &v.0[1],
            &self.e[2] * &v.0[0] + &self.e[3] * &v.0[1],
        ]))
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        Mat2 {
            e: [a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s],
        }
    }
}

impl Add for &Mat2 {
    type Output = Mat2;
    fn add(self, o: &Mat2) -> Mat2 {
        Mat2 {
            e: std::array::from_fn(|i| &self.e[i] + &o.e[i]),
        }
    }
}

impl Sub for &Mat2 {
    type Output = Mat2;
    fn sub(self, o: &Mat2) -> Mat2 {
        Mat2 {
            e: std::array::from_fn(|i| &self.e[i] - &o.e[i]),
        }
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2 {
            e: std::array::from_fn(|i| -&self.e[i]),
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

/// Column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ColVec2(pub(crate) [Scalar; 2]);

/// Row vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RowVec2(pub(crate) [Scalar; 2]);

impl ColVec2 {
    pub fn new(a: Scalar, b: Scalar) -> Result<Self> {
        check_same(a.field(), b.field())?;
        Ok(ColVec2([a, b]))
    }

    pub fn from_i64(field: Field, v: [i64; 2]) -> Self {
        ColVec2(v.map(|x| Scalar::from_i64(field, x)))
    }

    pub fn field(&self) -> Field {
        self.0[0].field()
    }

    pub fn entries(&self) -> &[Scalar; 2] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    /// Outer product `u·r`.
    pub fn outer(&self, r: &RowVec2) -> Result<Mat2> {
        check_same(self.field(), r.field())?;
        let [a, b] = &self.0;
        let [p, q] = &r.0;
        Ok(Mat2 {
            e: [a * p, a * q, b * p, b * q],
        })
    }
}

impl RowVec2 {
    pub fn new(a: Scalar, b: Scalar) -> Result<Self> {
        check_same(a.field(), b.field())?;
        Ok(RowVec2([a, b]))
    }

    pub fn from_i64(field: Field, v: [i64; 2]) -> Self {
        RowVec2(v.map(|x| Scalar::from_i64(field, x)))
    }

    pub fn field(&self) -> Field {
        self.0[0].field()
    }

    pub fn entries(&self) -> &[Scalar; 2] {
        &self.0
    }

    /// `r·v`.
    pub fn dot(&self, v: &ColVec2) -> Result<Scalar> {
        check_same(self.field(), v.field())?;
        Ok(&self.0[0] * &v.0[0] + &self.0[1] * &v.0[1])
    }

    /// `r·A`.
    pub fn mul_mat(&self, a: &Mat2) -> Result<RowVec2> {
        check_same(self.field(), a.field())?;
        let [x, y] = &self.0;
        Ok(RowVec2([
            x * a.get(0, 0) + y * a.get(1, 0),
            x * a.get(0, 1) + y * a.get(1, 1),
        ]))
    }
}

impl fmt::Display for ColVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})ᵀ", self.0[0], self.0[1])
    }
}

impl fmt::Display for RowVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// `A·x = b` with square `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareSystem {
    matrix: Vec<Vec<Scalar>>,
    rhs: Vec<Scalar>,
}

impl SquareSystem {
    pub fn new(matrix: Vec<Vec<Scalar>>, rhs: Vec<Scalar>) -> Result<Self> {
        let n = rhs.len();
        if n == 0 || matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::BadSystemShape);
        }
        uniform_field(matrix.iter().flatten().chain(rhs.iter()))?;
        Ok(SquareSystem { matrix, rhs })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn field(&self) -> Field {
        self.rhs[0].field()
    }

    /// Exact Gauss–Jordan elimination taking the first nonzero pivot in
    /// each column. Exact fields only.
    pub fn solve(&self) -> Result<Vec<Scalar>> {
        self.field().require_exact()?;
        let n = self.dim();
        let mut aug: Vec<Vec<Scalar>> = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !aug[r][col].is_zero())
                .ok_or(Error::SingularSystem)?;
            aug.swap(col, pivot);
            let inv = aug[col][col].inv()?;
            for v in aug[col].iter_mut() {
                *v = &*v * &inv;
            }
            for r in 0..n {
                if r == col || aug[r][col].is_zero() {
                    continue;
                }
                let factor = aug[r][col].clone();
                for c in col..=n {
                    let t = &factor * &aug[col][c];
                    aug[r][c] = &aug[r][c] - &t;
                }
            }
        }
        let x: Vec<Scalar> = aug.into_iter().map(|mut row| row.pop().unwrap()).collect();
        for (row, b) in self.matrix.iter().zip(&self.rhs) {
            let lhs = row
                .iter()
                .zip(&x)
                .fold(Scalar::zero(self.field()), |acc, (a, xi)| acc + a * xi);
            if &lhs != b {
                return Err(Error::invariant("solution does not satisfy the system"));
            }
        }
        Ok(x)
    }
}

/// Rank of a list of equal-length vectors over an exact field.
pub fn rank(vectors: &[Vec<Scalar>]) -> usize {
    let mut rows: Vec<Vec<Scalar>> = vectors.to_vec();
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] * &inv;
            for c in col..width {
                let t = &factor * &rows[r][c];
                rows[i][c] = &rows[i][c] - &t;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Flattened matrices as rows, for [`rank`].
pub fn flatten(mats: &[&Mat2]) -> Vec<Vec<Scalar>> {
    mats.iter().map(|m| m.entries().to_vec()).collect()
}
