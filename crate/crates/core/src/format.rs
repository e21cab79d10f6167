//! Text formats: the JSON decomposition file and the plain matrix file.
//!
//! Decomposition file (`format_version` `"1"`):
//!
//! ```json
//! {
//!   "format_version": "1",
//!   "field": "rational",
//!   "rank": 7,
//!   "terms": [ { "u": ["1", "0", "0", "-1"], "v": [...], "W": [...] }, ... ],
//!   "provenance": { "D": ["0", "-1", "1", "-1"], "u_vector": ["1", "0"] }
//! }
//! ```
//!
//! All scalars are strings in canonical form (see [`Scalar::parse`]); every
//! 4-vector is row-major. `provenance` is optional.
//!
//! Matrix file: a header line `n <dim> field <descriptor>` followed by `dim`
//! lines of `dim` space-separated scalars.

use serde::{Deserialize, Serialize};

use crate::construction::{BilinearDecomposition, LinearForm, Provenance, Term};
use crate::engine::MatN;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{ColVec2, Mat2};

pub const FORMAT_VERSION: &str = "1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionFile {
    format_version: String,
    field: String,
    rank: usize,
    terms: Vec<TermRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<ProvenanceRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    u: [String; 4],
    v: [String; 4],
    #[serde(rename = "W")]
    w: [String; 4],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceRecord {
    #[serde(rename = "D")]
    d: [String; 4],
    u_vector: [String; 2],
}

fn strings<const N: usize>(s: &[Scalar; N]) -> [String; N] {
    s.each_ref().map(Scalar::to_string)
}

fn scalars<const N: usize>(field: Field, s: &[String; N]) -> Result<[Scalar; N]> {
    let v = s
        .iter()
        .map(|t| Scalar::parse(field, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
}

/// Canonical JSON text for `dec`. Exact fields only.
pub fn serialize(dec: &BilinearDecomposition) -> Result<String> {
    dec.field().require_exact()?;
    let file = DecompositionFile {
        format_version: FORMAT_VERSION.to_string(),
        field: dec.field().to_string(),
        rank: dec.rank(),
        terms: dec
            .terms()
            .iter()
            .map(|t| TermRecord {
                u: strings(t.u.coeffs()),
                v: strings(t.v.coeffs()),
                w: strings(t.w.entries()),
            })
            .collect(),
        provenance: dec.provenance().map(|p| ProvenanceRecord {
            d: strings(p.d.entries()),
            u_vector: strings(p.u.entries()),
        }),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("plain data serializes");
    text.push('\n');
    Ok(text)
}

/// Parses and validates structure. The bilinear identity is not checked,
/// and decompositions of rank other than 7 are accepted (the engine rejects
/// them; see [`is_rank_seven`]).
pub fn parse(text: &str) -> Result<BilinearDecomposition> {
    let file: DecompositionFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedFile(e.to_string()))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::MalformedFile(format!(
            "unsupported format_version {:?}",
            file.format_version
        )));
    }
    let field: Field = file
        .field
        .parse()
        .map_err(|e: Error| Error::MalformedFile(e.to_string()))?;
    field.require_exact()?;
    if file.rank != file.terms.len() {
        return Err(Error::MalformedFile(format!(
            "rank {} but {} terms",
            file.rank,
            file.terms.len()
        )));
    }
    let terms = file
        .terms
        .iter()
        .map(|t| {
            Ok(Term {
                u: LinearForm::new(scalars(field, &t.u)?)?,
                v: LinearForm::new(scalars(field, &t.v)?)?,
                w: Mat2::new(scalars(field, &t.w)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = file
        .provenance
        .as_ref()
        .map(|p| {
            let [u1, u2] = scalars(field, &p.u_vector)?;
            Ok::<_, Error>(Provenance {
                d: Mat2::new(scalars(field, &p.d)?)?,
                u: ColVec2::new(u1, u2)?,
            })
        })
        .transpose()?;
    BilinearDecomposition::new(field, terms, provenance)
}

pub fn is_rank_seven(dec: &BilinearDecomposition) -> bool {
    dec.rank() == 7
}

pub fn format_matrix(m: &MatN) -> String {
    let n = m.n();
    let mut out = format!("n {} field {}\n", n, m.field());
    for r in 0..n {
        let row: Vec<String> = (0..n).map(|c| m.get(r, c).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<MatN> {
    let malformed = |msg: String| Error::MalformedFile(msg);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| malformed("empty matrix file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (n, field) = match parts.as_slice() {
        ["n", dim, "field", desc] => {
            let n: usize = dim
                .parse()
                .map_err(|_| malformed(format!("bad dimension {dim:?}")))?;
            let field: Field = desc
                .parse()
                .map_err(|e: Error| malformed(e.to_string()))?;
            (n, field)
        }
        _ => return Err(malformed(format!("bad header {header:?}"))),
    };
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| malformed(format!("expected {n} rows, got {r}")))?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != n {
            return Err(malformed(format!("row {} has {} entries, expected {n}", r + 1, row.len())));
        }
        for tok in row {
            data.push(Scalar::parse(field, tok)?);
        }
    }
    if lines.next().is_some() {
        return Err(malformed("trailing rows after matrix".into()));
    }
    MatN::new(n, data)
}
