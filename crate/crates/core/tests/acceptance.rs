//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strassen_core::cli::{cli_main, EXIT_OK};
use strassen_core::construction::{
    coordinates, derive_decomposition, derive_standard, BilinearDecomposition, LinearForm, PerpPair,
    Rotation, StrassenBasis, Term,
};
use strassen_core::engine::{classical_multiply, strassen_multiply, EngineConfig, OpCounter};
use strassen_core::field::{Field, Scalar};
use strassen_core::format;
use strassen_core::linalg::{flatten, rank, ColVec2, Mat2};
use strassen_core::sample;
use strassen_core::verify::{
    multiplication_table, verify_bilinear_identity, verify_exhaustive_gf, verify_multiplication_table,
    verify_trilinear,
};
use strassen_core::Error;

const Q: Field = Field::Rational;

fn gf(p: u64) -> Field {
    Field::gf(p).unwrap()
}

fn exact_fields() -> [Field; 5] {
    [Q, gf(2), gf(3), gf(5), gf(7)]
}

fn random_pair(field: Field, rng: &mut ChaCha8Rng) -> (Rotation, PerpPair) {
    let rot = sample::rotation(field, rng).unwrap();
    let pp = sample::perp_pair(&rot, rng).unwrap();
    (rot, pp)
}

fn within(start: Instant, limit: Duration, what: &str) -> String {
    let took = start.elapsed();
    assert!(took < limit, "{what} took {took:?}, limit {limit:?}");
    format!("{took:.2?} < {limit:?}")
}

/// 1. Derivation over the rationals from the example rotation and u = e1.
fn theorem_reproduction() -> String {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let path = path.to_str().unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli_main(
        ["strassen", "derive", "--field", "rational", "--d", "0,-1,1,-1", "--u", "1,0", "--out", path],
        &mut out,
        &mut err,
    );
    assert_eq!(code, EXIT_OK);
    let dec = format::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(dec.rank(), 7);
    let prov = dec.provenance().unwrap();
    assert_eq!(prov.d, Mat2::from_i64(Q, [0, -1, 1, -1]));
    assert_eq!(prov.u, ColVec2::from_i64(Q, [1, 0]));
    let report = verify_bilinear_identity(&dec).unwrap();
    assert!(report.passed());
    assert_eq!(report.checks_run, 16);
    format!("7 terms, 16/16 unit pairs, {}", within(start, Duration::from_secs(1), "derive"))
}

/// 2. The seven W matrices, recomputed here from D and M.
fn w_matrices() -> String {
    let dec = derive_standard(Q).unwrap();
    let d = Mat2::from_i64(Q, [0, -1, 1, -1]);
    let di = Mat2::from_i64(Q, [-1, 1, -1, 0]);
    let m = Mat2::from_i64(Q, [0, 1, 0, 0]);
    let expected = [
        Mat2::identity(Q),
        &m * &di,
        &di * &m,
        &(&d * &m) * &d,
        &d * &m,
        &m * &d,
        &(&di * &m) * &di,
    ];
    let got: Vec<&Mat2> = dec.terms().iter().map(|t| &t.w).collect();
    assert_eq!(got.len(), 7);
    for (k, (g, e)) in got.iter().zip(&expected).enumerate() {
        assert_eq!(*g, e, "W_{}", k + 1);
    }
    assert_eq!(got[0], &Mat2::identity(Q));
    assert_eq!(got[1], &Mat2::from_i64(Q, [-1, 0, 0, 0]));
    "W = (id, MD⁻¹, D⁻¹M, DMD, DM, MD, D⁻¹MD⁻¹), MD⁻¹ = [[-1,0],[0,0]]".into()
}

fn check_claims(rot: &Rotation, pp: &PerpPair, rng: &mut ChaCha8Rng) {
    let field = rot.field();
    let id = Mat2::identity(field);
    let minus_one = Scalar::from_i64(field, -1);
    let d = rot.matrix();
    let di = rot.inverse();
    // rotation: order 3, trace -1, det 1
    assert_eq!(d.pow(3), id);
    assert!((&(&id + d) + di).is_zero());
    assert_eq!(di.trace(), minus_one);
    assert_eq!(d.trace(), minus_one);
    assert!(d.det().is_one());
    // u⊥D⁻¹ satisfies the defining conditions of (Du)⊥
    let u = pp.u();
    let du = d.mul_col(u).unwrap();
    let candidate = pp.u_perp().mul_mat(di).unwrap();
    assert!(candidate.dot(&du).unwrap().is_zero());
    assert!(candidate.dot(&d.mul_col(&du).unwrap()).unwrap().is_one());
    assert_eq!(&candidate, PerpPair::new(rot, du).unwrap().u_perp());
    // u⊥ against D⁻¹u
    assert_eq!(pp.u_perp().dot(&di.mul_col(u).unwrap()).unwrap(), minus_one);
    // M squares to zero, MDM = M, MD⁻¹M = -M
    let m = u.outer(pp.u_perp()).unwrap();
    assert!((&m * &m).is_zero());
    assert_eq!(&(&m * d) * &m, m);
    assert_eq!(&(&m * di) * &m, -&m);
    // conjugates of M: traceless, independent
    let m1 = &(di * &m) * d;
    let m2 = &(d * &m) * di;
    for x in [&m, &m1, &m2] {
        assert!(x.trace().is_zero());
    }
    assert_eq!(rank(&flatten(&[&m, &m1, &m2])), 3);
    let four = [&m, &(&m * di), &(d * &m), &m2];
    assert_eq!(rank(&flatten(&four)), 4);
    let sum = four.iter().fold(Mat2::zero(field), |acc, x| &acc + *x);
    assert_eq!(sum, &(&(&id + d) * &m) * &(&id + di));
    assert_eq!(sum, m1);
    // both bases span
    let basis = StrassenBasis::build(rot, pp).unwrap();
    assert_eq!(basis.m(), &m);
    assert_eq!(rank(&flatten(&basis.basis_x().each_ref())), 4);
    assert_eq!(rank(&flatten(&basis.basis_y().each_ref())), 4);
    // Remark: x1 = -tr(X), y1 = -tr(Y)
    for _ in 0..3 {
        let x = sample::mat2(field, rng);
        assert_eq!(coordinates(&basis.basis_x(), &x).unwrap()[0], -x.trace());
        assert_eq!(coordinates(&basis.basis_y(), &x).unwrap()[0], -x.trace());
    }
    let dec = derive_decomposition(rot, pp).unwrap();
    let x = sample::mat2(field, rng);
    assert_eq!(dec.terms()[0].u.eval(&x).unwrap(), -x.trace());
    assert_eq!(dec.terms()[0].v.eval(&x).unwrap(), -x.trace());
}

/// 3. Claims 1–5 and the trace remark on random (D, u) over every field.
fn claim_suite() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let per_field = 100;
    for field in exact_fields() {
        for _ in 0..per_field {
            let (rot, pp) = random_pair(field, &mut rng);
            check_claims(&rot, &pp, &mut rng);
        }
    }
    // characteristic 3: every scalar matrix c·id with trace -1 and det 1 is id itself
    let f3 = gf(3);
    let mut rejected = 0;
    for c in f3.elements().unwrap() {
        let m = Mat2::identity(f3).scale(&c).unwrap();
        match Rotation::new(m) {
            Err(Error::ScalarMatrix) => rejected += 1,
            Err(Error::BadTrace(_) | Error::BadDeterminant(_)) => {}
            other => panic!("scalar matrix accepted: {other:?}"),
        }
    }
    assert_eq!(rejected, 1);
    // outside characteristic 3 no scalar matrix has trace -1 and det 1
    for field in [gf(2), gf(5), gf(7)] {
        for c in field.elements().unwrap() {
            let m = Mat2::identity(field).scale(&c).unwrap();
            assert!(!matches!(Rotation::new(m), Ok(_) | Err(Error::ScalarMatrix)));
        }
    }
    format!(
        "{per_field} pairs x 5 fields, char-3 scalar rejected, {}",
        within(start, Duration::from_secs(10), "claim suite")
    )
}

/// 4. The sixteen table cells, including sign flips and the zero diagonal.
fn table() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bases = vec![{
        let rot = Rotation::standard(Q).unwrap();
        let pp = PerpPair::standard(&rot).unwrap();
        StrassenBasis::build(&rot, &pp).unwrap()
    }];
    for field in exact_fields() {
        for _ in 0..10 {
            let (rot, pp) = random_pair(field, &mut rng);
            bases.push(StrassenBasis::build(&rot, &pp).unwrap());
        }
    }
    for basis in &bases {
        let report = verify_multiplication_table(basis);
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks_run, 16);
        let (d, di, m) = (basis.d(), basis.d_inv(), basis.m());
        let cell = |r: usize, c: usize| &basis.basis_x()[r] * &basis.basis_y()[c];
        assert_eq!(cell(1, 2), -&(m * d));
        assert_eq!(cell(3, 1), -&(d * m));
        assert_eq!(cell(2, 3), -&(&(di * m) * di));
        for i in 1..4 {
            assert!(cell(i, i).is_zero());
        }
        assert_eq!(cell(0, 0), Mat2::identity(basis.field()));
        assert_eq!(cell(3, 2), &(d * m) * d);
        assert!(multiplication_table(basis).iter().all(|e| e.holds()));
    }
    format!("16/16 cells on {} bases", bases.len())
}

/// 5. Brute force over all matrix pairs for GF(2) and GF(3).
fn exhaustive() -> String {
    let start = Instant::now();
    let r2 = verify_exhaustive_gf(&derive_standard(gf(2)).unwrap()).unwrap();
    assert!(r2.passed());
    assert_eq!(r2.checks_run, 256);
    let r3 = verify_exhaustive_gf(&derive_standard(gf(3)).unwrap()).unwrap();
    assert!(r3.passed());
    assert_eq!(r3.checks_run, 6561);
    format!("256/256 over GF(2), 6561/6561 over GF(3), {}", within(start, Duration::from_secs(5), "exhaustive"))
}

/// 6. Trace form on all 64 unit triples.
fn trilinear() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut count = 0;
    for field in exact_fields() {
        let mut decs = vec![derive_standard(field).unwrap()];
        for _ in 0..20 {
            let (rot, pp) = random_pair(field, &mut rng);
            decs.push(derive_decomposition(&rot, &pp).unwrap());
        }
        for dec in &decs {
            let r = verify_trilinear(dec).unwrap();
            assert!(r.passed(), "{r}");
            assert_eq!(r.checks_run, 64);
            count += 1;
        }
    }
    format!("64/64 triples on {count} decompositions")
}

/// 7. Multiplication counts with cutoff 1.
fn recursion_law() -> String {
    let start = Instant::now();
    let f = gf(5);
    let dec = derive_standard(f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let expected_fast = [7u64, 49, 343, 2401, 16807];
    let expected_classical = [8u64, 64, 512, 4096, 32768];
    for (i, n) in [2usize, 4, 8, 16, 32].into_iter().enumerate() {
        let a = sample::matn(f, n, &mut rng);
        let b = sample::matn(f, n, &mut rng);
        let (c, counter) = strassen_multiply(&dec, &a, &b, &EngineConfig::default()).unwrap();
        let mut classical = OpCounter::default();
        assert_eq!(c, classical_multiply(&a, &b, &mut classical).unwrap());
        assert_eq!(counter.scalar_mults, expected_fast[i], "n = {n}");
        assert_eq!(classical.scalar_mults, expected_classical[i], "n = {n}");
    }
    format!(
        "7, 49, 343, 2401, 16807 vs 8 .. 32768, {}",
        within(start, Duration::from_secs(30), "recursion law")
    )
}

/// 8. Engine equals the triple loop on random inputs.
fn oracle_equivalence() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sizes: Vec<usize> = (1..=16).chain([32, 64]).collect();
    let mut pairs = 0;
    for field in [gf(5), Q] {
        let (rot, pp) = random_pair(field, &mut rng);
        let decs = [derive_standard(field).unwrap(), derive_decomposition(&rot, &pp).unwrap()];
        for &n in sizes.iter().filter(|&&n| field != Q || n <= 16) {
            for i in 0..50 {
                let dec = &decs[i % 2];
                let a = sample::matn(field, n, &mut rng);
                let b = sample::matn(field, n, &mut rng);
                let expected = classical_multiply(&a, &b, &mut OpCounter::default()).unwrap();
                let (got, _) = strassen_multiply(dec, &a, &b, &EngineConfig::default()).unwrap();
                assert_eq!(got, expected, "{field} n = {n}");
                pairs += 1;
            }
        }
    }
    format!("{pairs} random pairs, {}", within(start, Duration::from_secs(60), "oracle equivalence"))
}

fn perturb(dec: &BilinearDecomposition, rng: &mut ChaCha8Rng) -> BilinearDecomposition {
    let field = dec.field();
    let mut terms: Vec<Term> = dec.terms().to_vec();
    let k = rng.gen_range(0..terms.len());
    let slot = rng.gen_range(0..3);
    let i = rng.gen_range(0..4);
    let delta = sample::nonzero_scalar(field, rng);
    let bump = |v: &[Scalar; 4]| -> [Scalar; 4] {
        let mut v = v.clone();
        v[i] = &v[i] + &delta;
        v
    };
    let t = &mut terms[k];
    match slot {
        0 => t.u = LinearForm::new(bump(t.u.coeffs())).unwrap(),
        1 => t.v = LinearForm::new(bump(t.v.coeffs())).unwrap(),
        _ => t.w = Mat2::new(bump(t.w.entries())).unwrap(),
    }
    dec.with_terms(terms).unwrap()
}

/// 9. Single-scalar mutations are always caught.
fn mutation_sensitivity() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let fields = exact_fields();
    for i in 0..20 {
        let field = fields[i % fields.len()];
        let (rot, pp) = random_pair(field, &mut rng);
        let dec = derive_decomposition(&rot, &pp).unwrap();
        assert!(verify_bilinear_identity(&dec).unwrap().passed());
        let bad = perturb(&dec, &mut rng);
        let report = verify_bilinear_identity(&bad).unwrap();
        let fail = report.first_failure.expect("mutation not detected");
        let (x, y) = (Mat2::unit(field, fail.x_index), Mat2::unit(field, fail.y_index));
        assert_ne!(&x * &y, bad.evaluate(&x, &y).unwrap());
    }
    "20/20 mutations caught with a unit-pair counterexample".into()
}

/// 10. Decomposition files round-trip.
fn round_trip() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fields = exact_fields();
    for i in 0..50 {
        let field = fields[i % fields.len()];
        let (rot, pp) = random_pair(field, &mut rng);
        let dec = derive_decomposition(&rot, &pp).unwrap();
        let text = format::serialize(&dec).unwrap();
        let back = format::parse(&text).unwrap();
        assert_eq!(back, dec);
        assert_eq!(format::serialize(&back).unwrap(), text);
    }
    "50/50 decompositions".into()
}

fn main() {
    let criteria: [(&str, fn() -> String); 10] = [
        ("1 seven-term derivation over Q", theorem_reproduction),
        ("2 W-matrix spot checks", w_matrices),
        ("3 claim suite", claim_suite),
        ("4 multiplication table", table),
        ("5 exhaustive finite-field proof", exhaustive),
        ("6 trilinear identity", trilinear),
        ("7 recursion law", recursion_law),
        ("8 oracle equivalence", oracle_equivalence),
        ("9 mutation sensitivity", mutation_sensitivity),
        ("10 round-trip", round_trip),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
