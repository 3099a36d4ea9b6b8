//! Bundled phase tables and H2 Hamiltonian coefficients.
//!
//! Angles in the phase-table file are either plain numbers or short
//! symbolic expressions such as `"-pi/4"`, `"3*pi/8"` or `"atan(1/sqrt(2))"`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{PhaseVector, Stage};

pub const PHASE_TABLES_JSON: &str = include_str!("../data/phase_tables.json");
pub const H2_TABLE_JSON: &str = include_str!("../data/h2_sto3g.json");

/// An angle as written in the data file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Number(f64),
    Expr(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Number(x) => Ok(*x),
            Angle::Expr(s) => parse_angle(s),
        }
    }
}

/// Evaluates `[-]term` where term is a number, `pi`, `k*pi`, `pi/m`,
/// `k*pi/m`, `atan(sqrt(2))` or `atan(1/sqrt(2))`.
pub fn parse_angle(expr: &str) -> Result<f64> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.as_str()),
    };
    let bad = || Error::Data(format!("cannot parse angle expression {expr:?}"));
    let value = match body {
        "atan(sqrt(2))" => 2f64.sqrt().atan(),
        "atan(1/sqrt(2))" => (1.0 / 2f64.sqrt()).atan(),
        _ if body.contains("pi") => {
            let (num, den) = match body.split_once('/') {
                Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
                None => (body, 1.0),
            };
            let k = match num {
                "pi" => 1.0,
                _ => num
                    .strip_suffix("*pi")
                    .ok_or_else(bad)?
                    .parse::<f64>()
                    .map_err(|_| bad())?,
            };
            k * std::f64::consts::PI / den
        }
        _ => body.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(if neg { -value } else { value })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub label: String,
    pub theta: [Angle; 3],
    pub phi: [Angle; 4],
}

impl PhaseRow {
    pub fn phase_vector(&self, stage: Stage) -> Result<PhaseVector> {
        let t = [self.theta[0].radians()?, self.theta[1].radians()?, self.theta[2].radians()?];
        let p = [
            self.phi[0].radians()?,
            self.phi[1].radians()?,
            self.phi[2].radians()?,
            self.phi[3].radians()?,
        ];
        PhaseVector::new(t, p, stage)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTable {
    pub table_id: String,
    #[serde(default)]
    pub description: String,
    pub rows: Vec<PhaseRow>,
}

impl PhaseTable {
    pub fn row(&self, label: &str) -> Result<&PhaseRow> {
        self.rows
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::Lookup(format!("table {} has no row {label:?}", self.table_id)))
    }

    pub fn phases(&self, label: &str, stage: Stage) -> Result<PhaseVector> {
        self.row(label)?.phase_vector(stage)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTableFile {
    pub version: u32,
    pub tables: Vec<PhaseTable>,
}

/// Parsed bundled phase tables.
pub fn phase_tables() -> &'static PhaseTableFile {
    static CELL: OnceLock<PhaseTableFile> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(PHASE_TABLES_JSON).expect("bundled phase tables are valid JSON"))
}

pub fn phase_table(id: &str) -> Result<&'static PhaseTable> {
    phase_tables()
        .tables
        .iter()
        .find(|t| t.table_id == id)
        .ok_or_else(|| Error::Lookup(format!("no phase table {id:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianRow {
    /// Bond length in Å (H2 rows).
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Number to factor (VQF rows).
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub coeffs: Vec<f64>,
}

/// Hamiltonian coefficient table in the shared schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTable {
    pub system: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub operators: Vec<String>,
    pub rows: Vec<HamiltonianRow>,
}

pub fn h2_table() -> &'static HamiltonianTable {
    static CELL: OnceLock<HamiltonianTable> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(H2_TABLE_JSON).expect("bundled H2 table is valid JSON"))
}

/// Bond lengths (Å) available in the bundled H2 table, ascending.
pub fn h2_grid() -> Vec<f64> {
    let mut g: Vec<f64> = h2_table().rows.iter().filter_map(|r| r.r).collect();
    g.sort_by(|a, b| a.total_cmp(b));
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_expressions() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!((parse_angle("atan(sqrt(2))").unwrap().tan() - 2f64.sqrt()).abs() < 1e-15);
        assert!((parse_angle("-atan(1/sqrt(2))").unwrap().tan() + 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("2pi").is_err());
    }

    #[test]
    fn bundled_tables_parse() {
        for id in ["single-source", "entangled-prep", "dimcert-settings", "interference", "h2-settings", "vqf-projectors"] {
            let t = phase_table(id).unwrap();
            for row in &t.rows {
                row.phase_vector(Stage::Idler).unwrap();
            }
        }
        assert_eq!(phase_table("vqf-projectors").unwrap().rows.len(), 32);
        assert_eq!(phase_table("entangled-prep").unwrap().rows.len(), 7);
        assert!(phase_table("missing").is_err());
    }

    #[test]
    fn h2_table_shape() {
        let t = h2_table();
        assert_eq!(t.system, "H2-STO3G");
        assert_eq!(t.operators.len(), 15);
        assert_eq!(t.rows.len(), 31);
        assert!(t.rows.iter().all(|r| r.coeffs.len() == 15));
        let g = h2_grid();
        assert_eq!(g.first(), Some(&0.1));
        assert_eq!(g.last(), Some(&3.0));
        assert!(g.contains(&0.736));
    }
}
