//! Level sweeps across solvers and their table, CSV and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{energy_closed_form, energy_nonrel};
use crate::error::{Result, SpectrumError};
use crate::model::{AnyonParams, EnergyResult, Method, PhysicalConstants, QuantumNumbers};
use crate::oracle::{energy_oracle_with, OracleSettings};
use crate::quadrature::QuadSettings;
use crate::wkb::{energy_wkb_full_with, energy_wkb_split_with, WkbSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(SpectrumError::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute and relative target of the action quadrature.
    pub quadrature: f64,
    /// Relative tolerance on the binding energy in the WKB root searches.
    pub root: f64,
    /// Local relative error target of the shooting integrator.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-13,
            root: 1e-14,
            oracle: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn wkb(&self) -> WkbSettings {
        WkbSettings {
            quadrature: QuadSettings {
                abs_tol: self.quadrature,
                rel_tol: self.quadrature,
                ..QuadSettings::default()
            },
            max_quadrature_error: (1e3 * self.quadrature).max(1e-10),
            root_rel_tol: self.root,
        }
    }

    pub fn oracle(&self) -> OracleSettings {
        OracleSettings {
            rtol: self.oracle,
            ..OracleSettings::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: AnyonParams,
    pub constants: PhysicalConstants,
    pub n_max: u32,
    pub l_max: u32,
    /// Explicit levels; when set the `n_max` x `l_max` sweep is skipped.
    pub levels: Option<Vec<QuantumNumbers>>,
    pub methods: Vec<Method>,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        let constants = PhysicalConstants::default();
        Self {
            params: AnyonParams::reference(&constants),
            constants,
            n_max: 2,
            l_max: 2,
            levels: None,
            methods: vec![Method::ClosedForm, Method::Oracle],
            format: OutputFormat::Table,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validated()?;
        if self.methods.is_empty() {
            return Err(SpectrumError::Config("select at least one method".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("quadrature", t.quadrature),
            ("root", t.root),
            ("oracle", t.oracle),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SpectrumError::Config(format!(
                    "{name} tolerance must be positive"
                )));
            }
        }
        for qn in self.level_list() {
            qn.check(&self.params)
                .map_err(|e| SpectrumError::Config(format!("{qn}: {e}")))?;
        }
        Ok(())
    }

    /// Requested levels ordered by `(n_r, l)`.
    pub fn level_list(&self) -> Vec<QuantumNumbers> {
        let mut levels = match &self.levels {
            Some(list) => list.clone(),
            None => (0..=self.n_max)
                .flat_map(|n_r| (1..=self.l_max).map(move |l| QuantumNumbers { n_r, l }))
                .collect(),
        };
        levels.sort();
        levels.dedup();
        levels
    }
}

pub fn solve(
    method: Method,
    params: &AnyonParams,
    qn: QuantumNumbers,
    tolerances: &Tolerances,
) -> Result<EnergyResult> {
    match method {
        Method::ClosedForm => energy_closed_form(params, qn),
        Method::NonRelativistic => energy_nonrel(params, qn),
        Method::WkbFull => energy_wkb_full_with(params, qn, &tolerances.wkb()),
        Method::WkbSplit => energy_wkb_split_with(params, qn, &tolerances.wkb()),
        Method::Oracle => energy_oracle_with(params, qn, &tolerances.oracle()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub kinetic_ev: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n_r: u32,
    pub l: u32,
    /// One cell per requested method, in request order.
    pub cells: Vec<Cell>,
}

impl SpectrumRow {
    pub fn value(&self, method: Method) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.method == method)
            .and_then(|c| c.kinetic_ev)
    }

    /// `E'_method - E'_oracle` in eV for every other method with a value.
    pub fn deltas_vs_oracle(&self) -> Vec<(Method, f64)> {
        let Some(reference) = self.value(Method::Oracle) else {
            return Vec::new();
        };
        self.cells
            .iter()
            .filter(|c| c.method != Method::Oracle)
            .filter_map(|c| c.kinetic_ev.map(|v| (c.method, v - reference)))
            .collect()
    }

    pub fn has_error(&self) -> bool {
        self.cells.iter().any(|c| c.error.is_some())
    }
}

/// Solves every (level, method) cell; cells run in parallel, rows come back
/// in level order.
pub fn compute(config: &RunConfig) -> Vec<SpectrumRow> {
    let levels = config.level_list();
    let cells: Vec<(QuantumNumbers, Method)> = levels
        .iter()
        .flat_map(|qn| config.methods.iter().map(move |m| (*qn, *m)))
        .collect();
    let solved: Vec<Cell> = cells
        .par_iter()
        .map(
            |(qn, method)| match solve(*method, &config.params, *qn, &config.tolerances) {
                Ok(e) => Cell {
                    method: *method,
                    kinetic_ev: Some(e.kinetic_ev),
                    error: None,
                },
                Err(err) => Cell {
                    method: *method,
                    kinetic_ev: None,
                    error: Some(err.to_string()),
                },
            },
        )
        .collect();
    let per_row = config.methods.len();
    levels
        .iter()
        .zip(solved.chunks(per_row))
        .map(|(qn, chunk)| SpectrumRow {
            n_r: qn.n_r,
            l: qn.l,
            cells: chunk.to_vec(),
        })
        .collect()
}

const ERROR_MARK: &str = "ERR";

/// Renders rows. The table prints eV to four decimals (ties to even, as
/// `std::fmt` does on the exact binary value); CSV and JSON carry the
/// shortest decimal that round-trips.
pub fn render(rows: &[SpectrumRow], config: &RunConfig, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => render_table(rows, &config.methods),
        OutputFormat::Csv => render_csv(rows, &config.methods),
        OutputFormat::Json => render_json(rows, config),
    }
}

fn render_table(rows: &[SpectrumRow], methods: &[Method]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<4}{:<4}", "n'", "l");
    for m in methods {
        let _ = write!(out, "{:>18}", format!("E'_{m}, eV"));
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{:<4}{:<4}", row.n_r, row.l);
        for cell in &row.cells {
            let text = match cell.kinetic_ev {
                Some(v) => format!("{v:.4}"),
                None => ERROR_MARK.to_string(),
            };
            let _ = write!(out, "{text:>18}");
        }
        out.push('\n');
    }
    out
}

fn render_csv(rows: &[SpectrumRow], methods: &[Method]) -> String {
    let mut out = String::from("n_r,l");
    for m in methods {
        out.push(',');
        out.push_str(m.as_str());
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{}", row.n_r, row.l);
        for cell in &row.cells {
            out.push(',');
            match cell.kinetic_ev {
                Some(v) => {
                    let _ = write!(out, "{v}");
                }
                None => out.push_str(ERROR_MARK),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonMeta {
    pub spin: f64,
    pub xi: f64,
    pub charge: f64,
    pub mass_ev: f64,
    pub alpha: f64,
    pub n_max: u32,
    pub l_max: u32,
    pub methods: Vec<Method>,
    pub tolerances: Tolerances,
    pub units: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonRow {
    pub n_r: u32,
    pub l: u32,
    pub energies_ev: BTreeMap<String, Option<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub deltas_vs_oracle_ev: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonReport {
    pub meta: JsonMeta,
    pub rows: Vec<JsonRow>,
}

pub fn json_report(rows: &[SpectrumRow], config: &RunConfig) -> JsonReport {
    let p = &config.params;
    JsonReport {
        meta: JsonMeta {
            spin: p.spin,
            xi: p.xi,
            charge: p.charge,
            mass_ev: p.mass_ev,
            alpha: config.constants.alpha,
            n_max: config.n_max,
            l_max: config.l_max,
            methods: config.methods.clone(),
            tolerances: config.tolerances,
            units: "kinetic energy E - m in eV".into(),
        },
        rows: rows
            .iter()
            .map(|row| JsonRow {
                n_r: row.n_r,
                l: row.l,
                energies_ev: row
                    .cells
                    .iter()
                    .map(|c| (c.method.to_string(), c.kinetic_ev))
                    .collect(),
                errors: row
                    .cells
                    .iter()
                    .filter_map(|c| c.error.clone().map(|e| (c.method.to_string(), e)))
                    .collect(),
                deltas_vs_oracle_ev: row
                    .deltas_vs_oracle()
                    .into_iter()
                    .map(|(m, d)| (m.to_string(), d))
                    .collect(),
            })
            .collect(),
    }
}

fn render_json(rows: &[SpectrumRow], config: &RunConfig) -> String {
    let mut text = serde_json::to_string_pretty(&json_report(rows, config))
        .expect("report contains only finite numbers and strings");
    text.push('\n');
    text
}
