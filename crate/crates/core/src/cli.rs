//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 input error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construction::{derive_decomposition, BilinearDecomposition, PerpPair, Rotation, StrassenBasis};
use crate::engine::{bench, bench_csv, bench_text, classical_multiply, strassen_multiply, EngineConfig, OpCounter};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::format;
use crate::linalg::{ColVec2, Mat2};
use crate::verify::{
    count_seven_distinct, multiplication_table, verify_bilinear_identity, verify_exhaustive_gf,
    verify_multiplication_table, verify_trilinear, VerificationReport, TABLE_COLS, TABLE_ROWS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "strassen", version, about = "Derive, verify and apply a seven-multiplication 2x2 matrix product")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConstructionArgs {
    /// `rational` or `gf(p)`
    #[arg(long)]
    field: String,
    /// Rotation matrix entries a11,a12,a21,a22 (default: companion of λ²+λ+1)
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Vector u1,u2 (default: first standard vector that is not an eigenvector)
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive a decomposition, verify it, and write it to a file
    Derive {
        #[command(flatten)]
        construction: ConstructionArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a decomposition file
    Verify {
        path: PathBuf,
        /// Also check every pair of matrices (prime fields only)
        #[arg(long)]
        exhaustive: bool,
        /// Print machine-readable JSON reports
        #[arg(long)]
        json: bool,
    },
    /// Print the basis multiplication table
    Table {
        #[command(flatten)]
        construction: ConstructionArgs,
    },
    /// Multiply two matrices with a decomposition file
    Multiply {
        path: PathBuf,
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        /// Dimension of random operands when --a/--b are absent
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        cutoff: usize,
    },
    /// Operation counts (and timings with --float) for a list of sizes
    Bench {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Default 1, or 64 with --float
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        float: bool,
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_INPUT_ERROR, e.to_string())
    }
}

type CliResult = Result<i32, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))
}

fn scalar_list(field: Field, text: &str, len: usize, what: &str) -> Result<Vec<Scalar>, Failure> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.len() != len {
        return Err(Failure(
            EXIT_INPUT_ERROR,
            format!("--{what} needs {len} comma-separated scalars"),
        ));
    }
    Ok(items
        .iter()
        .map(|s| Scalar::parse(field, s))
        .collect::<Result<_, _>>()?)
}

fn build(args: &ConstructionArgs) -> Result<(Rotation, PerpPair), Failure> {
    let field: Field = args.field.parse()?;
    field.require_exact()?;
    let rot = match &args.d {
        None => Rotation::standard(field)?,
        Some(text) => {
            let v = scalar_list(field, text, 4, "d")?;
            Rotation::new(Mat2::new(v.try_into().unwrap_or_else(|_| unreachable!()))?)?
        }
    };
    let pp = match &args.u {
        None => PerpPair::standard(&rot)?,
        Some(text) => {
            let mut v = scalar_list(field, text, 2, "u")?;
            let b = v.pop().unwrap();
            let a = v.pop().unwrap();
            PerpPair::new(&rot, ColVec2::new(a, b)?)?
        }
    };
    Ok((rot, pp))
}

fn load(path: &PathBuf) -> Result<BilinearDecomposition, Failure> {
    Ok(format::parse(&read(path)?)?)
}

fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    let mut text = String::new();
    let code = match cli.command {
        Command::Derive { construction, out: path } => {
            let (rot, pp) = build(&construction)?;
            let dec = derive_decomposition(&rot, &pp)?;
            let report = verify_bilinear_identity(&dec)?;
            let _ = writeln!(text, "D = {}, u = {}, u⊥ = {}", rot.matrix(), pp.u(), pp.u_perp());
            let _ = write!(text, "{dec}");
            let _ = writeln!(text, "{report}");
            if report.passed() {
                std::fs::write(&path, format::serialize(&dec)?)
                    .map_err(|e| Failure(EXIT_INPUT_ERROR, format!("{}: {e}", path.display())))?;
                let _ = writeln!(text, "wrote {}", path.display());
                EXIT_OK
            } else {
                EXIT_VERIFICATION_FAILED
            }
        }
        Command::Verify { path, exhaustive, json } => {
            let dec = load(&path)?;
            let mut reports: Vec<VerificationReport> = vec![verify_bilinear_identity(&dec)?];
            let mut notes = Vec::new();
            if exhaustive {
                if dec.field().modulus().is_some() {
                    reports.push(verify_exhaustive_gf(&dec)?);
                } else {
                    notes.push(format!("exhaustive check skipped: {} is not a prime field", dec.field()));
                }
            }
            reports.push(verify_trilinear(&dec)?);
            if !format::is_rank_seven(&dec) {
                notes.push(format!("warning: rank {} is not 7; the engine will reject this file", dec.rank()));
            }
            let passed = reports.iter().all(VerificationReport::passed);
            if json {
                let record = serde_json::json!({
                    "field": dec.field().to_string(),
                    "rank": dec.rank(),
                    "seven_distinct": count_seven_distinct(&dec),
                    "passed": passed,
                    "reports": reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
                    "notes": notes,
                });
                let _ = writeln!(text, "{}", serde_json::to_string_pretty(&record).unwrap());
            } else {
                let _ = writeln!(text, "rank {} over {}", dec.rank(), dec.field());
                for r in &reports {
                    let _ = writeln!(text, "{r}");
                }
                for n in &notes {
                    let _ = writeln!(text, "{n}");
                }
                let _ = writeln!(
                    text,
                    "pairwise independent W: {}",
                    if count_seven_distinct(&dec) { "yes" } else { "no" }
                );
                let _ = writeln!(text, "{}", if passed { "PASSED" } else { "FAILED" });
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_VERIFICATION_FAILED
            }
        }
        Command::Table { construction } => {
            let (rot, pp) = build(&construction)?;
            let basis = StrassenBasis::build(&rot, &pp)?;
            let _ = writeln!(text, "D = {}, M = {}", basis.d(), basis.m());
            for e in multiplication_table(&basis) {
                let _ = writeln!(
                    text,
                    "{:>6} · {:<6} = {:<9} {}  [{}]",
                    TABLE_ROWS[e.row],
                    TABLE_COLS[e.col],
                    e.simplified,
                    e.product,
                    if e.holds() { "ok" } else { "MISMATCH" }
                );
            }
            let report = verify_multiplication_table(&basis);
            let _ = writeln!(text, "{report}");
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION_FAILED
            }
        }
        Command::Multiply { path, a, b, n, seed, cutoff } => {
            let dec = load(&path)?;
            let cfg = EngineConfig::with_cutoff(cutoff)?;
            let (a, b) = match (a, b, n) {
                (Some(a), Some(b), _) => (format::parse_matrix(&read(&a)?)?, format::parse_matrix(&read(&b)?)?),
                (None, None, Some(n)) if n > 0 => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (
                        crate::sample::matn(dec.field(), n, &mut rng),
                        crate::sample::matn(dec.field(), n, &mut rng),
                    )
                }
                _ => {
                    return Err(Failure(
                        EXIT_INPUT_ERROR,
                        "give both --a and --b, or a positive --n for seeded random operands".into(),
                    ))
                }
            };
            let (c, counter) = strassen_multiply(&dec, &a, &b, &cfg)?;
            let mut classical = OpCounter::default();
            let expected = classical_multiply(&a, &b, &mut classical)?;
            let _ = write!(text, "{}", format::format_matrix(&c));
            let _ = writeln!(
                text,
                "scalar_mults {} scalar_adds {} scalar_scalings {} (classical: {} mults)",
                counter.scalar_mults, counter.scalar_adds, counter.scalar_scalings, classical.scalar_mults
            );
            if c.field().is_exact() {
                let agree = c == expected;
                let _ = writeln!(text, "matches classical: {}", if agree { "yes" } else { "no" });
                if agree {
                    EXIT_OK
                } else {
                    EXIT_VERIFICATION_FAILED
                }
            } else {
                let _ = writeln!(text, "max abs deviation from classical: {:e}", c.max_abs_diff(&expected));
                EXIT_OK
            }
        }
        Command::Bench { path, sizes, cutoff, float, csv, seed } => {
            let dec = load(&path)?;
            let cfg = match cutoff {
                Some(c) => EngineConfig::with_cutoff(c)?,
                None if float => EngineConfig::float_bench(),
                None => EngineConfig::default(),
            };
            let rows = bench(&dec, &sizes, &cfg, float, seed)?;
            text = if csv { bench_csv(&rows) } else { bench_text(&rows) };
            EXIT_OK
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(EXIT_INPUT_ERROR, e.to_string()))?;
    Ok(code)
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
