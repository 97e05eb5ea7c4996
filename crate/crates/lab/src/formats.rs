//! File formats: weight CSV, bitile text, decomposition JSON.

use std::fmt::Write as _;
use std::path::Path;

use carleson_core::decomposition::{Certificate, DecompositionResult, SelectedTree, TopData, TreeRole};
use carleson_core::phaseplane::{AdmissibleConstants, Bitile, DensityEvaluator, Lattice, Linearization, SizeEvaluator, TileCollection};
use carleson_core::weights::DyadicInterval;
use carleson_core::{Signal, Weight};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::report::num;

#[derive(Debug, Serialize, Deserialize)]
struct WeightRow {
    x: f64,
    w: f64,
}

/// Weight samples as CSV with header `x,w`, one row per grid point `x = i/N`.
pub fn write_weight_csv(path: &Path, w: &Weight) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    let n = w.len() as f64;
    for (i, &v) in w.samples().iter().enumerate() {
        out.serialize(WeightRow { x: i as f64 / n, w: v })?;
    }
    out.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

pub fn read_weight_csv(path: &Path) -> Result<Weight> {
    let rows: Vec<WeightRow> = csv::Reader::from_path(path)?.deserialize().collect::<std::result::Result<_, _>>()?;
    let n = rows.len() as f64;
    for (i, row) in rows.iter().enumerate() {
        if (row.x - i as f64 / n).abs() > 1e-9 {
            return Err(LabError::format("weight csv", format!("row {i} has x = {}, expected {}", row.x, i as f64 / n)));
        }
    }
    Ok(Weight::new(rows.into_iter().map(|r| r.w).collect())?)
}

const TILE_HEADER: &str = "# carleson-tiles 1";

/// Line-oriented bitile format: header, `log2_len`, constants, then `level position freq` per line.
pub fn tiles_to_string(coll: &TileCollection) -> String {
    let c = coll.consts();
    let mut s = String::new();
    writeln!(s, "{TILE_HEADER}").unwrap();
    writeln!(s, "log2_len {}", coll.lattice().log2_len()).unwrap();
    writeln!(
        s,
        "constants c2 {} c3 {} c21 {} c22 {} c1 {} k0 {} d {}",
        num(c.c2),
        num(c.c3),
        num(c.c21),
        num(c.c22),
        num(c.c1),
        num(c.k0),
        num(c.d)
    )
    .unwrap();
    for b in coll.tiles() {
        writeln!(s, "{} {} {}", b.level, b.position, b.freq).unwrap();
    }
    s
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| LabError::format("tile file", format!("line {line}: bad {what}")))
}

pub fn tiles_from_str(text: &str) -> Result<TileCollection> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == TILE_HEADER => {}
        _ => return Err(LabError::format("tile file", "missing header")),
    }
    let (ln, l) = lines.next().ok_or_else(|| LabError::format("tile file", "missing log2_len"))?;
    let mut it = l.split_whitespace();
    if it.next() != Some("log2_len") {
        return Err(LabError::format("tile file", format!("line {}: expected log2_len", ln + 1)));
    }
    let log2: u32 = parse_field(it.next(), "log2_len", ln + 1)?;
    let (ln, l) = lines.next().ok_or_else(|| LabError::format("tile file", "missing constants"))?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    let names = ["c2", "c3", "c21", "c22", "c1", "k0", "d"];
    if toks.len() != 1 + 2 * names.len() || toks[0] != "constants" {
        return Err(LabError::format("tile file", format!("line {}: malformed constants", ln + 1)));
    }
    let mut vals = [0.0; 7];
    for (k, name) in names.iter().enumerate() {
        if toks[1 + 2 * k] != *name {
            return Err(LabError::format("tile file", format!("line {}: expected {name}", ln + 1)));
        }
        vals[k] = parse_field(Some(toks[2 + 2 * k]), name, ln + 1)?;
    }
    let consts = AdmissibleConstants {
        c2: vals[0],
        c3: vals[1],
        c21: vals[2],
        c22: vals[3],
        c1: vals[4],
        k0: vals[5],
        d: vals[6],
    };
    let lattice = Lattice::new(log2, consts)?;
    let mut tiles = Vec::new();
    for (ln, l) in lines {
        let mut it = l.split_whitespace();
        let b = Bitile {
            level: parse_field(it.next(), "level", ln + 1)?,
            position: parse_field(it.next(), "position", ln + 1)?,
            freq: parse_field(it.next(), "freq", ln + 1)?,
        };
        if it.next().is_some() {
            return Err(LabError::format("tile file", format!("line {}: trailing fields", ln + 1)));
        }
        tiles.push(b);
    }
    Ok(TileCollection::new(lattice, tiles)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CertificateRecord {
    Size { alpha: String, top_mass: String, energy: String },
    Density { alpha: String, r_conj: String, top_mass: String, integral: String },
    Companion { parent: usize },
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeRecord {
    level: u32,
    index: u64,
    xi: String,
    role: String,
    members: Vec<usize>,
    witness: Vec<usize>,
    certificate: CertificateRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DecompositionFile {
    format: String,
    collection: String,
    trees: Vec<TreeRecord>,
    remainder: Vec<usize>,
}

const DECOMPOSITION_FORMAT: &str = "carleson-decomposition/1";

fn dec(s: &str) -> Result<f64> {
    s.parse().map_err(|_| LabError::format("decomposition", format!("bad number {s:?}")))
}

fn role_name(r: TreeRole) -> &'static str {
    match r {
        TreeRole::Selected => "selected",
        TreeRole::Plus => "plus",
        TreeRole::Minus => "minus",
    }
}

pub fn decomposition_to_json(coll: &TileCollection, result: &DecompositionResult) -> Result<String> {
    let trees = result
        .trees
        .iter()
        .map(|t| TreeRecord {
            level: t.top.interval.level,
            index: t.top.interval.index,
            xi: num(t.top.xi),
            role: role_name(t.role).into(),
            members: t.members.clone(),
            witness: t.witness.clone(),
            certificate: match t.certificate {
                Certificate::Size { alpha, top_mass, energy } => {
                    CertificateRecord::Size { alpha: num(alpha), top_mass: num(top_mass), energy: num(energy) }
                }
                Certificate::Density { alpha, r_conj, top_mass, integral } => CertificateRecord::Density {
                    alpha: num(alpha),
                    r_conj: num(r_conj),
                    top_mass: num(top_mass),
                    integral: num(integral),
                },
                Certificate::Companion { parent } => CertificateRecord::Companion { parent },
                Certificate::Residual => CertificateRecord::Residual,
            },
        })
        .collect();
    let file = DecompositionFile {
        format: DECOMPOSITION_FORMAT.into(),
        collection: tiles_to_string(coll),
        trees,
        remainder: result.remainder.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Loads a decomposition and re-verifies the partition and every stored certificate.
pub fn decomposition_from_json(text: &str) -> Result<(TileCollection, DecompositionResult)> {
    let file: DecompositionFile = serde_json::from_str(text)?;
    if file.format != DECOMPOSITION_FORMAT {
        return Err(LabError::format("decomposition", format!("unknown format {:?}", file.format)));
    }
    let coll = tiles_from_str(&file.collection)?;
    let mut trees = Vec::with_capacity(file.trees.len());
    for t in file.trees {
        let interval = DyadicInterval::new(t.level, t.index)
            .ok_or_else(|| LabError::format("decomposition", "top interval out of range"))?;
        let role = match t.role.as_str() {
            "selected" => TreeRole::Selected,
            "plus" => TreeRole::Plus,
            "minus" => TreeRole::Minus,
            other => return Err(LabError::format("decomposition", format!("unknown role {other:?}"))),
        };
        let certificate = match &t.certificate {
            CertificateRecord::Size { alpha, top_mass, energy } => {
                Certificate::Size { alpha: dec(alpha)?, top_mass: dec(top_mass)?, energy: dec(energy)? }
            }
            CertificateRecord::Density { alpha, r_conj, top_mass, integral } => Certificate::Density {
                alpha: dec(alpha)?,
                r_conj: dec(r_conj)?,
                top_mass: dec(top_mass)?,
                integral: dec(integral)?,
            },
            CertificateRecord::Companion { parent } => Certificate::Companion { parent: *parent },
            CertificateRecord::Residual => Certificate::Residual,
        };
        trees.push(SelectedTree {
            top: TopData { interval, xi: dec(&t.xi)? },
            role,
            members: t.members,
            witness: t.witness,
            certificate,
        });
    }
    let result = DecompositionResult { input_len: coll.len(), trees, remainder: file.remainder };
    if !result.is_partition() {
        return Err(LabError::Replay("trees and remainder do not partition the collection".into()));
    }
    if let Some(i) = result.trees.iter().position(|t| !t.certificate.holds()) {
        return Err(LabError::Replay(format!("certificate of tree {i} does not hold")));
    }
    Ok((coll, result))
}

/// Recomputes every size certificate from `f` and `w` and demands bit equality.
pub fn recheck_size_certificates(
    coll: &TileCollection,
    result: &DecompositionResult,
    f: &Signal,
    w: &Weight,
) -> Result<()> {
    let eval = SizeEvaluator::new(coll, f, w)?;
    for (i, t) in result.trees.iter().enumerate() {
        if let Certificate::Size { top_mass, energy, .. } = t.certificate {
            let e: f64 = t.witness.iter().map(|&j| eval.energy(j)).sum();
            if e != energy || w.dyadic_mass(t.top.interval) != top_mass {
                return Err(LabError::Replay(format!("size certificate of tree {i} does not reproduce")));
            }
        }
    }
    Ok(())
}

/// Recomputes every density certificate from `g`, `w` and `lin` and demands bit equality.
pub fn recheck_density_certificates(
    coll: &TileCollection,
    result: &DecompositionResult,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
) -> Result<()> {
    let eval = DensityEvaluator::new(g, w, lin, coll.consts().d)?;
    for (i, t) in result.trees.iter().enumerate() {
        if let Certificate::Density { top_mass, integral, .. } = t.certificate {
            let got = eval.integral(&t.top.interval, &t.top.omega());
            if got != integral || w.dyadic_mass(t.top.interval) != top_mass {
                return Err(LabError::Replay(format!("density certificate of tree {i} does not reproduce")));
            }
        }
    }
    Ok(())
}
