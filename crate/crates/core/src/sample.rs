//! Seeded random inputs: scalars, matrices, rotations and perp pairs.
//!
//! Random rotations are conjugates `P⁻¹·C·P` of the companion matrix `C` by
//! a random invertible `P`. Trace and determinant are conjugation invariant,
//! and every valid rotation is similar to `C`, so this covers all of them.

use rand::Rng;

use crate::construction::{PerpPair, Rotation};
use crate::engine::MatN;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{ColVec2, Mat2};

/// Small random element: residues uniformly, rationals `a/b` with
/// `|a| ≤ 9`, `1 ≤ b ≤ 4`, doubles uniform in `[-1, 1)`.
pub fn scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Scalar {
    match field {
        Field::Rational => {
            let num = rng.gen_range(-9..=9);
            let den = rng.gen_range(1..=4);
            Scalar::from_ratio(field, num, den).expect("nonzero denominator")
        }
        Field::Prime(p) => Scalar::from_i64(field, rng.gen_range(0..p.get()) as i64),
        Field::Float64 => Scalar::from_f64(rng.gen_range(-1.0..1.0)),
    }
}

pub fn nonzero_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Scalar {
    loop {
        let s = scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn mat2<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Mat2 {
    Mat2::new(std::array::from_fn(|_| scalar(field, rng))).expect("uniform field")
}

pub fn invertible_mat2<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Mat2 {
    loop {
        let p = mat2(field, rng);
        if !p.det().is_zero() {
            return p;
        }
    }
}

/// Uniformly drawn conjugate of the companion matrix.
pub fn rotation<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Result<Rotation> {
    field.require_exact()?;
    let c = Mat2::from_i64(field, [0, -1, 1, -1]);
    let p = invertible_mat2(field, rng);
    Rotation::new(c.conjugate(&p)?)
}

/// Random nonzero `u` that is not an eigenvector of `rot`.
pub fn perp_pair<R: Rng + ?Sized>(rot: &Rotation, rng: &mut R) -> Result<PerpPair> {
    let field = rot.field();
    for _ in 0..10_000 {
        let u = ColVec2::new(scalar(field, rng), scalar(field, rng))?;
        match PerpPair::new(rot, u) {
            Err(Error::ZeroVector | Error::EigenvectorInput) => continue,
            other => return other,
        }
    }
    Err(Error::invariant("no admissible vector found"))
}

pub fn matn<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> MatN {
    MatN::new(n, (0..n * n).map(|_| scalar(field, rng)).collect()).expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotations_are_valid_over_small_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [Field::Rational, Field::gf(2).unwrap(), Field::gf(3).unwrap()] {
            for _ in 0..20 {
                let rot = rotation(field, &mut rng).unwrap();
                perp_pair(&rot, &mut rng).unwrap();
            }
        }
    }
}
