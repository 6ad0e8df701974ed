//! Stable JSON and CSV encodings for grids, laws, and sample files.
//!
//! JSON carries exact rationals as `"p/q"` strings and round-trips without
//! loss; CSV carries decimals for plotting. Encodings are byte-deterministic
//! for a given value, which the CLI's reproducibility contract relies on.

use serde::{Deserialize, Serialize};

use crate::analytic::FieldLaw;
use crate::copula::{DiscreteCopula, GridF64};
use crate::error::{Error, Result};
use crate::rational::{format_rational, from_f64_exact, parse_rational, to_f64, Rat};

#[derive(Serialize, Deserialize)]
struct GridJson {
    k: u32,
    values: Vec<Vec<String>>,
}

/// Grid JSON: `{"k": <int>, "values": [["p/q", ...], ...]}` with row index
/// `i` outer, `values[i][j] = C(i/k, j/k)`.
pub fn grid_to_json(c: &DiscreteCopula) -> String {
    let values = c
        .rows()
        .iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect();
    serde_json::to_string(&GridJson { k: c.k(), values }).expect("grid serializes")
}

/// Same schema for a double-precision grid; every double is encoded as its
/// exact (dyadic) rational, so the round-trip is lossless.
pub fn grid_f64_to_json(g: &GridF64) -> String {
    let k = g.k();
    let values = (0..=k)
        .map(|i| {
            (0..=k)
                .map(|j| format_rational(&from_f64_exact(g.value(i, j)).expect("finite value")))
                .collect()
        })
        .collect();
    serde_json::to_string(&GridJson { k, values }).expect("grid serializes")
}

pub fn grid_from_json(text: &str) -> Result<DiscreteCopula> {
    let raw: GridJson = serde_json::from_str(text)?;
    let rows: Vec<Vec<Rat>> = raw
        .values
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteCopula::from_values(raw.k, rows)
}

/// Grid CSV: a `# k=<int>` comment line, then `k+1` rows of `k+1` decimal
/// values.
pub fn grid_to_csv(c: &DiscreteCopula) -> String {
    let mut out = format!("# k={}\n", c.k());
    for row in c.rows() {
        let cells: Vec<String> = row.iter().map(|r| to_f64(r).to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn grid_f64_to_csv(g: &GridF64) -> String {
    let k = g.k();
    let mut out = format!("# k={k}\n");
    for i in 0..=k {
        let cells: Vec<String> = (0..=k).map(|j| g.value(i, j).to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    value: String,
    prob: String,
}

#[derive(Serialize, Deserialize)]
struct LawJson {
    atoms: Vec<AtomJson>,
}

/// Law JSON: `{"atoms": [{"value": "p/q", "prob": "p/q"}, ...]}`.
pub fn law_to_json(law: &FieldLaw) -> String {
    let atoms = law
        .atoms()
        .iter()
        .map(|(v, p)| AtomJson {
            value: format_rational(v),
            prob: format_rational(p),
        })
        .collect();
    serde_json::to_string(&LawJson { atoms }).expect("law serializes")
}

pub fn law_from_json(text: &str) -> Result<FieldLaw> {
    let raw: LawJson = serde_json::from_str(text)?;
    let atoms = raw
        .atoms
        .iter()
        .map(|a| Ok((parse_rational(&a.value)?, parse_rational(&a.prob)?)))
        .collect::<Result<Vec<_>>>()?;
    FieldLaw::from_atoms(atoms)
}

/// Law CSV: decimal `value,prob` columns plus the exact probability.
pub fn law_to_csv(law: &FieldLaw) -> String {
    let mut out = String::from("value,prob,prob_exact\n");
    for (v, p) in law.atoms() {
        out.push_str(&format!(
            "{},{},{}\n",
            to_f64(v),
            to_f64(p),
            format_rational(p)
        ));
    }
    out
}

/// Pairs CSV: `u,v` header and 17-significant-digit decimals.
pub fn pairs_to_csv(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("u,v\n");
    for (u, v) in pairs {
        out.push_str(&format!("{u:.16e},{v:.16e}\n"));
    }
    out
}

pub fn pairs_from_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "u,v" {
            continue;
        }
        let (u, v) = line.split_once(',').ok_or_else(|| {
            Error::Format(format!(
                "line {}: expected two comma-separated values",
                lineno + 1
            ))
        })?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))
        };
        pairs.push((parse(u)?, parse(v)?));
    }
    Ok(pairs)
}

/// Pairs JSON: an array of `[u, v]` arrays.
pub fn pairs_to_json(pairs: &[(f64, f64)]) -> String {
    let rows: Vec<[f64; 2]> = pairs.iter().map(|&(u, v)| [u, v]).collect();
    serde_json::to_string(&rows).expect("pairs serialize")
}

pub fn pairs_from_json(text: &str) -> Result<Vec<(f64, f64)>> {
    let rows: Vec<[f64; 2]> = serde_json::from_str(text)?;
    Ok(rows.into_iter().map(|[u, v]| (u, v)).collect())
}
