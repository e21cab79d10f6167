//! Derivation of the seven-term bilinear algorithm from a rotation `D`
//! (trace −1, determinant 1, not scalar) and a vector `u` that is not an
//! eigenvector of `D`.
//!
//! The pipeline is [`Rotation`] → [`PerpPair`] → [`StrassenBasis`] →
//! [`BilinearDecomposition`]. Every stage re-checks the identities it relies
//! on and reports [`Error::InternalInvariantViolation`] if one fails, which
//! for valid inputs can only mean a broken arithmetic backend.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{flatten, rank, ColVec2, Mat2, RowVec2, SquareSystem};

fn ensure(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invariant(what))
    }
}

/// A 2×2 matrix with characteristic polynomial `λ² + λ + 1` that is not a
/// multiple of the identity. Such a matrix has order three.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    d: Mat2,
    d_inv: Mat2,
}

impl Rotation {
    /// The companion matrix `[[0, −1], [1, −1]]` over `field`.
    pub fn standard(field: Field) -> Result<Self> {
        field.require_exact()?;
        Self::new(Mat2::from_i64(field, [0, -1, 1, -1]))
    }

    /// Validates `d` and caches its inverse.
    pub fn new(d: Mat2) -> Result<Self> {
        let field = d.field();
        field.require_exact()?;
        let minus_one = Scalar::from_i64(field, -1);
        let tr = d.trace();
        if tr != minus_one {
            return Err(Error::BadTrace(tr.to_string()));
        }
        let det = d.det();
        if !det.is_one() {
            return Err(Error::BadDeterminant(det.to_string()));
        }
        // Over characteristic 3 the identity itself has trace −1 and det 1.
        if d.is_scalar() {
            return Err(Error::ScalarMatrix);
        }
        let d_inv = d.inverse()?;
        let id = Mat2::identity(field);
        ensure(d.pow(3) == id, "D^3 = id")?;
        ensure(d_inv == d.pow(2), "D^-1 = D^2")?;
        ensure((&(&id + &d) + &d_inv).is_zero(), "id + D + D^-1 = 0")?;
        ensure(d_inv.trace() == minus_one, "tr(D^-1) = -1")?;
        Ok(Rotation { d, d_inv })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.d
    }

    pub fn inverse(&self) -> &Mat2 {
        &self.d_inv
    }

    pub fn field(&self) -> Field {
        self.d.field()
    }
}

/// A column vector `u` with the row vector `u⊥` determined by
/// `u⊥·u = 0` and `u⊥·D·u = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerpPair {
    u: ColVec2,
    u_perp: RowVec2,
}

impl PerpPair {
    /// Solves for `u⊥`. Fails when `u` is zero or an eigenvector of `D`,
    /// i.e. when `u` and `D·u` are linearly dependent.
    pub fn new(rot: &Rotation, u: ColVec2) -> Result<Self> {
        if u.field() != rot.field() {
            return Err(Error::DescriptorMismatch(rot.field(), u.field()));
        }
        if u.is_zero() {
            return Err(Error::ZeroVector);
        }
        let field = rot.field();
        let du = rot.matrix().mul_col(&u)?;
        let system = SquareSystem::new(
            vec![u.entries().to_vec(), du.entries().to_vec()],
            vec![Scalar::zero(field), Scalar::one(field)],
        )?;
        let sol = match system.solve() {
            Ok(sol) => sol,
            Err(Error::SingularSystem) => return Err(Error::EigenvectorInput),
            Err(e) => return Err(e),
        };
        let [a, b]: [Scalar; 2] = sol.try_into().expect("two unknowns");
        let u_perp = RowVec2::new(a, b)?;
        ensure(u_perp.dot(&u)?.is_zero(), "u_perp u = 0")?;
        ensure(u_perp.dot(&du)?.is_one(), "u_perp D u = 1")?;
        let back = rot.inverse().mul_col(&u)?;
        ensure(u_perp.dot(&back)?.is_minus_one(), "u_perp D^-1 u = -1")?;
        Ok(PerpPair { u, u_perp })
    }

    /// `e1` unless it is an eigenvector of `D`, in which case `e2`.
    pub fn standard(rot: &Rotation) -> Result<Self> {
        let field = rot.field();
        match Self::new(rot, ColVec2::from_i64(field, [1, 0])) {
            Err(Error::EigenvectorInput) => Self::new(rot, ColVec2::from_i64(field, [0, 1])),
            other => other,
        }
    }

    pub fn u(&self) -> &ColVec2 {
        &self.u
    }

    pub fn u_perp(&self) -> &RowVec2 {
        &self.u_perp
    }
}

/// `M = u·u⊥` with its two conjugates and the two bases
/// `X = (D, M, D⁻¹MD, DMD⁻¹)` and `Y = (D⁻¹, M, D⁻¹MD, DMD⁻¹)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrassenBasis {
    d: Mat2,
    d_inv: Mat2,
    m: Mat2,
    m1: Mat2,
    m2: Mat2,
}

impl StrassenBasis {
    pub fn build(rot: &Rotation, pp: &PerpPair) -> Result<Self> {
        if pp.u.field() != rot.field() {
            return Err(Error::DescriptorMismatch(rot.field(), pp.u.field()));
        }
        let field = rot.field();
        let d = rot.matrix().clone();
        let d_inv = rot.inverse().clone();
        let m = pp.u.outer(&pp.u_perp)?;
        let m1 = &(&d_inv * &m) * &d;
        let m2 = &(&d * &m) * &d_inv;
        let id = Mat2::identity(field);

        ensure(m.trace().is_zero(), "tr(M) = 0")?;
        ensure(m1.trace().is_zero(), "tr(D^-1 M D) = 0")?;
        ensure(m2.trace().is_zero(), "tr(D M D^-1) = 0")?;
        ensure((&m * &m).is_zero(), "M^2 = 0")?;
        ensure(&(&m * &d) * &m == m, "M D M = M")?;
        ensure(&(&m * &d_inv) * &m == -&m, "M D^-1 M = -M")?;
        ensure(
            &(&(&id + &d) * &m) * &(&id + &d_inv) == m1,
            "(id + D) M (id + D^-1) = D^-1 M D",
        )?;
        ensure(rank(&flatten(&[&m, &m1, &m2])) == 3, "M and its conjugates are independent")?;

        let basis = StrassenBasis { d, d_inv, m, m1, m2 };
        ensure(rank(&flatten(&basis.basis_x().each_ref())) == 4, "basis X spans")?;
        ensure(rank(&flatten(&basis.basis_y().each_ref())) == 4, "basis Y spans")?;
        Ok(basis)
    }

    pub fn field(&self) -> Field {
        self.d.field()
    }

    pub fn d(&self) -> &Mat2 {
        &self.d
    }

    pub fn d_inv(&self) -> &Mat2 {
        &self.d_inv
    }

    /// `M = u·u⊥`.
    pub fn m(&self) -> &Mat2 {
        &self.m
    }

    /// `D⁻¹MD`.
    pub fn m1(&self) -> &Mat2 {
        &self.m1
    }

    /// `DMD⁻¹`.
    pub fn m2(&self) -> &Mat2 {
        &self.m2
    }

    pub fn basis_x(&self) -> [Mat2; 4] {
        [self.d.clone(), self.m.clone(), self.m1.clone(), self.m2.clone()]
    }

    pub fn basis_y(&self) -> [Mat2; 4] {
        [self.d_inv.clone(), self.m.clone(), self.m1.clone(), self.m2.clone()]
    }

    /// The seven product matrices in derivation order:
    /// `id, MD⁻¹, D⁻¹M, DMD, DM, MD, D⁻¹MD⁻¹`.
    pub fn product_matrices(&self) -> [Mat2; 7] {
        let (d, di, m) = (&self.d, &self.d_inv, &self.m);
        [
            Mat2::identity(self.field()),
            m * di,
            di * m,
            &(d * m) * d,
            d * m,
            m * d,
            &(di * m) * di,
        ]
    }
}

/// Symbolic names of [`StrassenBasis::product_matrices`].
pub const PRODUCT_LABELS: [&str; 7] = ["id", "MD⁻¹", "D⁻¹M", "DMD", "DM", "MD", "D⁻¹MD⁻¹"];

/// Coefficients of `x` in a basis of the 2×2 matrices, from one 4×4 solve
/// over the flattened matrices.
pub fn coordinates(basis: &[Mat2; 4], x: &Mat2) -> Result<[Scalar; 4]> {
    let field = x.field();
    for b in basis {
        if b.field() != field {
            return Err(Error::DescriptorMismatch(b.field(), field));
        }
    }
    // Column j of the system is the flattened basis[j].
    let matrix = (0..4)
        .map(|row| basis.iter().map(|b| b.entries()[row].clone()).collect())
        .collect();
    let sol = SquareSystem::new(matrix, x.entries().to_vec())?.solve()?;
    Ok(sol.try_into().expect("four unknowns"))
}

/// A linear form on 2×2 matrices, stored as its coefficients on
/// `(x11, x12, x21, x22)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    coeffs: [Scalar; 4],
}

impl LinearForm {
    pub fn new(coeffs: [Scalar; 4]) -> Result<Self> {
        Mat2::new(coeffs.clone())?;
        Ok(LinearForm { coeffs })
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    pub fn coeffs(&self) -> &[Scalar; 4] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Mat2) -> Result<Scalar> {
        if x.field() != self.field() {
            return Err(Error::DescriptorMismatch(self.field(), x.field()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(x.entries())
            .fold(Scalar::zero(self.field()), |acc, (c, e)| acc + c * e))
    }

    fn combine(&self, other: &LinearForm, sign: i64) -> LinearForm {
        let s = Scalar::from_i64(self.field(), sign);
        LinearForm {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &(&s * &other.coeffs[i])),
        }
    }
}

/// One summand `u(X)·v(Y)·W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub u: LinearForm,
    pub v: LinearForm,
    pub w: Mat2,
}

impl Term {
    pub fn field(&self) -> Field {
        self.w.field()
    }
}

/// The `(D, u)` a decomposition was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub d: Mat2,
    pub u: ColVec2,
}

/// `XY = Σ_k u_k(X)·v_k(Y)·W_k`, as data. Construction does not check the
/// identity; that is the job of [`crate::verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearDecomposition {
    field: Field,
    terms: Vec<Term>,
    provenance: Option<Provenance>,
}

impl BilinearDecomposition {
    pub fn new(field: Field, terms: Vec<Term>, provenance: Option<Provenance>) -> Result<Self> {
        for t in &terms {
            for f in [t.u.field(), t.v.field(), t.w.field()] {
                if f != field {
                    return Err(Error::DescriptorMismatch(field, f));
                }
            }
        }
        if let Some(p) = &provenance {
            for f in [p.d.field(), p.u.field()] {
                if f != field {
                    return Err(Error::DescriptorMismatch(field, f));
                }
            }
        }
        Ok(BilinearDecomposition {
            field,
            terms,
            provenance,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Right-hand side `Σ_k u_k(X)·v_k(Y)·W_k` for 2×2 inputs.
    pub fn evaluate(&self, x: &Mat2, y: &Mat2) -> Result<Mat2> {
        let mut acc = Mat2::zero(self.field);
        for t in &self.terms {
            let s = &t.u.eval(x)? * &t.v.eval(y)?;
            if !s.is_zero() {
                acc = &acc + &t.w.scaled(&s);
            }
        }
        Ok(acc)
    }

    /// Same terms with one entry replaced; used for mutation tests.
    pub fn with_terms(&self, terms: Vec<Term>) -> Result<Self> {
        Self::new(self.field, terms, self.provenance.clone())
    }

    /// Converts rational coefficients to doubles for float timing runs.
    pub fn to_float(&self) -> Result<Self> {
        if self.field != Field::Rational {
            return Err(Error::DescriptorMismatch(Field::Rational, self.field));
        }
        let conv = |s: &Scalar| Scalar::from_f64(s.to_f64());
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                u: LinearForm {
                    coeffs: t.u.coeffs.each_ref().map(conv),
                },
                v: LinearForm {
                    coeffs: t.v.coeffs.each_ref().map(conv),
                },
                w: Mat2::new(t.w.entries().each_ref().map(conv)).expect("uniform"),
            })
            .collect();
        Ok(BilinearDecomposition {
            field: Field::Float64,
            terms,
            provenance: None,
        })
    }
}

impl fmt::Display for BilinearDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {} decomposition over {}", self.rank(), self.field)?;
        for (k, t) in self.terms.iter().enumerate() {
            let c = |lf: &LinearForm| {
                lf.coeffs
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            writeln!(f, "  {}: u=({}) v=({}) W={}", k + 1, c(&t.u), c(&t.v), t.w)?;
        }
        Ok(())
    }
}

/// Coordinate forms of a basis: entry `i` is the linear form sending a
/// matrix to its `i`-th coordinate. Obtained by expanding the four standard
/// units and transposing.
pub fn coordinate_forms(basis: &[Mat2; 4]) -> Result<[LinearForm; 4]> {
    let field = basis[0].field();
    let cols: Vec<[Scalar; 4]> = (0..4)
        .map(|a| coordinates(basis, &Mat2::unit(field, a)))
        .collect::<Result<_>>()?;
    Ok(std::array::from_fn(|i| LinearForm {
        coeffs: std::array::from_fn(|a| cols[a][i].clone()),
    }))
}

/// Groups the sixteen basis products into seven terms:
///
/// | k | u_k     | v_k     | W_k       |
/// |---|---------|---------|-----------|
/// | 1 | x1      | y1      | id        |
/// | 2 | x2      | y1 + y4 | MD⁻¹      |
/// | 3 | x3      | y1 + y2 | D⁻¹M      |
/// | 4 | x4      | y1 + y3 | DMD       |
/// | 5 | x1 − x4 | y2      | DM        |
/// | 6 | x1 − x2 | y3      | MD        |
/// | 7 | x1 − x3 | y4      | D⁻¹MD⁻¹   |
///
/// where `x_i` are the coordinates of `X` in basis X and `y_j` those of `Y`
/// in basis Y.
pub fn derive_decomposition(rot: &Rotation, pp: &PerpPair) -> Result<BilinearDecomposition> {
    let basis = StrassenBasis::build(rot, pp)?;
    let [x1, x2, x3, x4] = coordinate_forms(&basis.basis_x())?;
    let [y1, y2, y3, y4] = coordinate_forms(&basis.basis_y())?;
    let [w1, w2, w3, w4, w5, w6, w7] = basis.product_matrices();
    let terms = vec![
        Term { u: x1.clone(), v: y1.clone(), w: w1 },
        Term { u: x2.clone(), v: y1.combine(&y4, 1), w: w2 },
        Term { u: x3.clone(), v: y1.combine(&y2, 1), w: w3 },
        Term { u: x4.clone(), v: y1.combine(&y3, 1), w: w4 },
        Term { u: x1.combine(&x4, -1), v: y2, w: w5 },
        Term { u: x1.combine(&x2, -1), v: y3, w: w6 },
        Term { u: x1.combine(&x3, -1), v: y4, w: w7 },
    ];
    BilinearDecomposition::new(
        rot.field(),
        terms,
        Some(Provenance {
            d: rot.matrix().clone(),
            u: pp.u.clone(),
        }),
    )
}

/// Standard rotation and default `u` over `field`.
pub fn derive_standard(field: Field) -> Result<BilinearDecomposition> {
    let rot = Rotation::standard(field)?;
    let pp = PerpPair::standard(&rot)?;
    derive_decomposition(&rot, &pp)
}
