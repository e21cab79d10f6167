//! Recursive n×n multiplication driven by any rank-7 decomposition of the
//! 2×2 product, with a classical oracle and operation counters.
//!
//! Inputs are zero-padded to the next power of two, split into 2×2 blocks
//! and multiplied with seven recursive block products per level until the
//! block size reaches the cutoff. With cutoff 1 and `n = 2^k` this performs
//! exactly `7^k` scalar multiplications.

use std::fmt::Write as _;
use std::ops::{Add, AddAssign};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construction::BilinearDecomposition;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatN {
    n: usize,
    data: Vec<Scalar>,
}

impl MatN {
    pub fn new(n: usize, data: Vec<Scalar>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        let field = data[0].field();
        if let Some(s) = data.iter().find(|s| s.field() != field) {
            return Err(Error::DescriptorMismatch(field, s.field()));
        }
        Ok(MatN { n, data })
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        MatN {
            n,
            data: vec![Scalar::zero(field); n * n],
        }
    }

    pub fn from_i64(field: Field, n: usize, entries: &[i64]) -> Result<Self> {
        Self::new(n, entries.iter().map(|&v| Scalar::from_i64(field, v)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.data[0].field()
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.data[row * self.n + col]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    fn padded(&self, m: usize) -> MatN {
        if m == self.n {
            return self.clone();
        }
        let mut out = MatN::zeros(self.field(), m);
        for r in 0..self.n {
            out.data[r * m..r * m + self.n].clone_from_slice(&self.data[r * self.n..(r + 1) * self.n]);
        }
        out
    }

    fn top_left(&self, n: usize) -> MatN {
        if n == self.n {
            return self.clone();
        }
        MatN {
            n,
            data: (0..n)
                .flat_map(|r| self.data[r * self.n..r * self.n + n].iter().cloned())
                .collect(),
        }
    }

    /// Four `n/2` blocks in row-major order (`11, 12, 21, 22`). `n` must be even.
    fn split(&self) -> [MatN; 4] {
        let h = self.n / 2;
        std::array::from_fn(|b| {
            let (r0, c0) = ((b / 2) * h, (b % 2) * h);
            MatN {
                n: h,
                data: (0..h)
                    .flat_map(|r| {
                        let start = (r0 + r) * self.n + c0;
                        self.data[start..start + h].iter().cloned()
                    })
                    .collect(),
            }
        })
    }

    fn join(blocks: [MatN; 4]) -> MatN {
        let h = blocks[0].n;
        let n = 2 * h;
        let mut data = Vec::with_capacity(n * n);
        for half in [&blocks[..2], &blocks[2..]] {
            for r in 0..h {
                for b in half {
                    data.extend_from_slice(&b.data[r * h..(r + 1) * h]);
                }
            }
        }
        MatN { n, data }
    }

    /// Max absolute entrywise difference, for float comparisons.
    pub fn max_abs_diff(&self, other: &MatN) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max)
    }
}

/// Scalar operation counts. Multiplications by the constant coefficients of
/// the linear forms and `W_k` are tallied separately as `scalar_scalings`;
/// negations are free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub scalar_mults: u64,
    pub scalar_adds: u64,
    pub scalar_scalings: u64,
}

impl Add for OpCounter {
    type Output = OpCounter;
    fn add(self, o: OpCounter) -> OpCounter {
        OpCounter {
            scalar_mults: self.scalar_mults + o.scalar_mults,
            scalar_adds: self.scalar_adds + o.scalar_adds,
            scalar_scalings: self.scalar_scalings + o.scalar_scalings,
        }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: OpCounter) {
        *self = *self + o;
    }
}

/// Zero padding up to the next power of two; the only strategy offered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Padding {
    #[default]
    PowerOfTwo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Blocks of this dimension or smaller are multiplied classically.
    pub cutoff: usize,
    pub padding: Padding,
    /// Run the seven block products of a level on the rayon pool when the
    /// blocks are at least this large. `None` keeps everything on one thread.
    pub parallel_min_block: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            cutoff: 1,
            padding: Padding::PowerOfTwo,
            parallel_min_block: None,
        }
    }
}

impl EngineConfig {
    pub fn with_cutoff(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidConfig("cutoff must be at least 1".into()));
        }
        Ok(EngineConfig {
            cutoff,
            ..Default::default()
        })
    }

    /// Timing defaults for the float backend.
    pub fn float_bench() -> Self {
        EngineConfig {
            cutoff: 64,
            padding: Padding::PowerOfTwo,
            parallel_min_block: None,
        }
    }
}

fn check_operands(a: &MatN, b: &MatN) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", a.n, a.n, b.n, b.n)));
    }
    if a.field() != b.field() {
        return Err(Error::DescriptorMismatch(a.field(), b.field()));
    }
    Ok(())
}

/// Triple-loop product: `n³` multiplications, `n²(n−1)` additions.
pub fn classical_multiply(a: &MatN, b: &MatN, counter: &mut OpCounter) -> Result<MatN> {
    check_operands(a, b)?;
    Ok(classical_unchecked(a, b, counter))
}

fn classical_unchecked(a: &MatN, b: &MatN, counter: &mut OpCounter) -> MatN {
    let n = a.n;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = a.get(i, 0) * b.get(0, j);
            for k in 1..n {
                acc = acc + a.get(i, k) * b.get(k, j);
            }
            data.push(acc);
        }
    }
    let n = n as u64;
    counter.scalar_mults += n * n * n;
    counter.scalar_adds += n * n * (n - 1);
    MatN { n: a.n, data }
}

fn scale_block(m: &MatN, c: &Scalar, counter: &mut OpCounter) -> MatN {
    if c.is_one() {
        return m.clone();
    }
    if c.is_minus_one() {
        return MatN {
            n: m.n,
            data: m.data.iter().map(|x| -x).collect(),
        };
    }
    counter.scalar_scalings += (m.n * m.n) as u64;
    MatN {
        n: m.n,
        data: m.data.iter().map(|x| x * c).collect(),
    }
}

/// `Σ coeffs[i]·blocks[i]`, skipping zero coefficients.
fn linear_combination<'a>(
    terms: impl Iterator<Item = (&'a Scalar, &'a MatN)>,
    field: Field,
    n: usize,
    counter: &mut OpCounter,
) -> MatN {
    let mut acc: Option<MatN> = None;
    for (c, m) in terms.filter(|(c, _)| !c.is_zero()) {
        acc = Some(match acc {
            None => scale_block(m, c, counter),
            Some(mut acc) => {
                counter.scalar_adds += (n * n) as u64;
                if c.is_one() {
                    for (a, x) in acc.data.iter_mut().zip(&m.data) {
                        *a = &*a + x;
                    }
                } else if c.is_minus_one() {
                    for (a, x) in acc.data.iter_mut().zip(&m.data) {
                        *a = &*a - x;
                    }
                } else {
                    counter.scalar_scalings += (n * n) as u64;
                    for (a, x) in acc.data.iter_mut().zip(&m.data) {
                        *a = &*a + &(x * c);
                    }
                }
                acc
            }
        });
    }
    acc.unwrap_or_else(|| MatN::zeros(field, n))
}

fn block_operands(
    dec: &BilinearDecomposition,
    x: &[MatN; 4],
    y: &[MatN; 4],
    counter: &mut OpCounter,
) -> Vec<(MatN, MatN)> {
    let (field, n) = (x[0].field(), x[0].n);
    dec.terms()
        .iter()
        .map(|t| {
            let l = linear_combination(t.u.coeffs().iter().zip(x), field, n, counter);
            let r = linear_combination(t.v.coeffs().iter().zip(y), field, n, counter);
            (l, r)
        })
        .collect()
}

fn combine_products(
    dec: &BilinearDecomposition,
    products: &[MatN],
    counter: &mut OpCounter,
) -> [MatN; 4] {
    let (field, n) = (products[0].field(), products[0].n);
    std::array::from_fn(|i| {
        linear_combination(
            dec.terms().iter().map(|t| &t.w.entries()[i]).zip(products),
            field,
            n,
            counter,
        )
    })
}

fn check_blocks(x: &[MatN; 4], y: &[MatN; 4], field: Field) -> Result<()> {
    let n = x[0].n;
    for b in x.iter().chain(y) {
        if b.n != n {
            return Err(Error::DimensionMismatch("blocks must have equal size".into()));
        }
        if b.field() != field {
            return Err(Error::DescriptorMismatch(field, b.field()));
        }
    }
    Ok(())
}

/// One level of the block algorithm: forms `u_k(X)` and `v_k(Y)` from the
/// four blocks of each operand, issues exactly one call to `multiply` per
/// term, and assembles the four output blocks from `Σ_k W_k[i]·P_k`.
pub fn apply_decomposition_2x2<F>(
    dec: &BilinearDecomposition,
    x: &[MatN; 4],
    y: &[MatN; 4],
    mut multiply: F,
    counter: &mut OpCounter,
) -> Result<[MatN; 4]>
where
    F: FnMut(&MatN, &MatN, &mut OpCounter) -> Result<MatN>,
{
    check_blocks(x, y, dec.field())?;
    let operands = block_operands(dec, x, y, counter);
    let products = operands
        .iter()
        .map(|(l, r)| multiply(l, r, counter))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_products(dec, &products, counter))
}

fn recurse(dec: &BilinearDecomposition, a: &MatN, b: &MatN, cfg: &EngineConfig) -> (MatN, OpCounter) {
    let mut counter = OpCounter::default();
    if a.n <= cfg.cutoff {
        let c = classical_unchecked(a, b, &mut counter);
        return (c, counter);
    }
    let (x, y) = (a.split(), b.split());
    let operands = block_operands(dec, &x, &y, &mut counter);
    let parallel = cfg.parallel_min_block.is_some_and(|min| x[0].n >= min);
    let results: Vec<(MatN, OpCounter)> = if parallel {
        operands.par_iter().map(|(l, r)| recurse(dec, l, r, cfg)).collect()
    } else {
        operands.iter().map(|(l, r)| recurse(dec, l, r, cfg)).collect()
    };
    let mut products = Vec::with_capacity(results.len());
    for (p, c) in results {
        counter += c;
        products.push(p);
    }
    let blocks = combine_products(dec, &products, &mut counter);
    (MatN::join(blocks), counter)
}

/// `A·B` by recursive application of `dec`. A rational decomposition is
/// converted to doubles when the operands are float matrices.
pub fn strassen_multiply(
    dec: &BilinearDecomposition,
    a: &MatN,
    b: &MatN,
    cfg: &EngineConfig,
) -> Result<(MatN, OpCounter)> {
    if dec.rank() != 7 {
        return Err(Error::BadRank(dec.rank()));
    }
    if cfg.cutoff == 0 {
        return Err(Error::InvalidConfig("cutoff must be at least 1".into()));
    }
    check_operands(a, b)?;
    let converted;
    let dec = if a.field() == Field::Float64 && dec.field() == Field::Rational {
        converted = dec.to_float()?;
        &converted
    } else {
        dec
    };
    if dec.field() != a.field() {
        return Err(Error::DescriptorMismatch(dec.field(), a.field()));
    }
    let n = a.n;
    if n <= cfg.cutoff {
        let mut counter = OpCounter::default();
        return Ok((classical_unchecked(a, b, &mut counter), counter));
    }
    let m = n.next_power_of_two();
    let (c, counter) = recurse(dec, &a.padded(m), &b.padded(m), cfg);
    Ok((c.top_left(n), counter))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub strassen_mults: u64,
    pub classical_mults: u64,
    /// Wall-clock times; only measured on the float backend.
    pub strassen_ms: Option<f64>,
    pub classical_ms: Option<f64>,
}

/// Multiplies seeded random matrices of each size both ways. Exact
/// decompositions give counts only, and the two results are checked for
/// equality; `float` runs on doubles and records timings.
pub fn bench(
    dec: &BilinearDecomposition,
    sizes: &[usize],
    cfg: &EngineConfig,
    float: bool,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    let field = if float { Field::Float64 } else { dec.field() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::DimensionMismatch("sizes must be at least 1".into()));
            }
            let a = crate::sample::matn(field, n, &mut rng);
            let b = crate::sample::matn(field, n, &mut rng);
            let t0 = Instant::now();
            let (fast, counts) = strassen_multiply(dec, &a, &b, cfg)?;
            let strassen_ms = t0.elapsed().as_secs_f64() * 1e3;
            let mut classical_counts = OpCounter::default();
            let t1 = Instant::now();
            let slow = classical_multiply(&a, &b, &mut classical_counts)?;
            let classical_ms = t1.elapsed().as_secs_f64() * 1e3;
            if field.is_exact() && fast != slow {
                return Err(Error::invariant(format!("engine disagrees with classical at n = {n}")));
            }
            Ok(BenchRow {
                n,
                strassen_mults: counts.scalar_mults,
                classical_mults: classical_counts.scalar_mults,
                strassen_ms: float.then_some(strassen_ms),
                classical_ms: float.then_some(classical_ms),
            })
        })
        .collect()
}

pub const BENCH_COLUMNS: [&str; 5] = ["n", "strassen_mults", "classical_mults", "strassen_ms", "classical_ms"];

fn ms(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = BENCH_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.strassen_mults,
            r.classical_mults,
            ms(r.strassen_ms),
            ms(r.classical_ms)
        );
    }
    out
}

pub fn bench_text(rows: &[BenchRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            let t = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
            [
                r.n.to_string(),
                r.strassen_mults.to_string(),
                r.classical_mults.to_string(),
                t(r.strassen_ms),
                t(r.classical_ms),
            ]
        })
        .collect();
    let widths: [usize; 5] = std::array::from_fn(|i| {
        cells
            .iter()
            .map(|c| c[i].len())
            .chain([BENCH_COLUMNS[i].len()])
            .max()
            .unwrap()
    });
    let mut out = String::new();
    let line = |out: &mut String, row: [&str; 5]| {
        let parts: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  "));
    };
    line(&mut out, BENCH_COLUMNS);
    for c in &cells {
        line(&mut out, c.each_ref().map(String::as_str));
    }
    out
}
