//! Command-line front end.
//!
//! Every flag may also come from a `key=value` file given with `--config`;
//! keys are the long flag names without the leading dashes. Flags on the
//! command line win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::closed_form::energy_closed_form;
use crate::error::{Result, SpectrumError};
use crate::model::{AnyonParams, Method, PhysicalConstants, QuantumNumbers};
use crate::oracle::{effective_term, RadialProblem};
use crate::spectrum::{compute, render, OutputFormat, RunConfig, Tolerances};
use crate::wkb::quantization_residual;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

const DUMP_POINTS: usize = 2000;
const PHASE_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Alpha,
    Value(f64),
}

impl FromStr for Coupling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("alpha") {
            return Ok(Self::Alpha);
        }
        s.parse().map(Self::Value).map_err(|e| format!("{e}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelList(pub Vec<QuantumNumbers>);

impl FromStr for LevelList {
    type Err = String;

    /// `"0,1"` or several levels separated by `;`, e.g. `"0,1;1,2"`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(';')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                let (n, l) = part
                    .split_once(',')
                    .ok_or_else(|| format!("expected N,L in '{part}'"))?;
                let n_r = n.trim().parse().map_err(|e| format!("n': {e}"))?;
                let l = l.trim().parse().map_err(|e| format!("l: {e}"))?;
                QuantumNumbers::new(n_r, l).map_err(|e| e.to_string())
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(LevelList)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodList(pub Vec<Method>);

impl FromStr for MethodList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut methods = Vec::new();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            let m: Method = name.parse().map_err(|e: SpectrumError| e.to_string())?;
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        Ok(MethodList(methods))
    }
}

/// Energy spectrum of a fractional-spin particle in a planar Coulomb field.
///
/// With no arguments prints the reference six-level comparison
/// (S = 1/2, xi = alpha, Z = 1, electron mass).
#[derive(Debug, Default, Parser)]
#[command(name = "anyon-spectrum", version, allow_negative_numbers = true)]
pub struct Args {
    /// key=value file supplying any of the options below
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fractional spin S
    #[arg(long)]
    pub spin: Option<f64>,
    /// Coupling xi = e q; a number or "alpha"
    #[arg(long)]
    pub xi: Option<Coupling>,
    /// Nuclear charge number Z
    #[arg(long)]
    pub charge: Option<f64>,
    /// Rest energy of the particle in eV
    #[arg(long = "mass-ev")]
    pub mass_ev: Option<f64>,
    #[arg(long = "n-max")]
    pub n_max: Option<u32>,
    #[arg(long = "l-max")]
    pub l_max: Option<u32>,
    /// Explicit levels "N,L[;N,L...]"; replaces the n-max/l-max sweep
    #[arg(long)]
    pub level: Option<LevelList>,
    /// Comma list of closed, wkb-full, wkb-split, oracle, nonrel
    #[arg(long)]
    pub methods: Option<MethodList>,
    /// table, csv or json
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Fine-structure constant used for xi = alpha
    #[arg(long = "alpha-override")]
    pub alpha_override: Option<f64>,
    #[arg(long = "tolerance-quadrature")]
    pub tolerance_quadrature: Option<f64>,
    #[arg(long = "tolerance-root")]
    pub tolerance_root: Option<f64>,
    #[arg(long = "tolerance-oracle")]
    pub tolerance_oracle: Option<f64>,
    /// Write (r, effective term) for the first level as CSV
    #[arg(long = "dump-potential")]
    pub dump_potential: Option<PathBuf>,
    /// Write (E/m, phase residual) for the first level as CSV
    #[arg(long = "dump-phase")]
    pub dump_phase: Option<PathBuf>,
}

macro_rules! prefer {
    ($cli:ident, $file:ident, $($field:ident),+) => {
        Args { $($field: $cli.$field.or($file.$field)),+ }
    };
}

impl Args {
    /// Fills options missing on the command line from `file`.
    pub fn merged_with(self, file: Args) -> Args {
        let cli = self;
        prefer!(
            cli,
            file,
            config,
            spin,
            xi,
            charge,
            mass_ev,
            n_max,
            l_max,
            level,
            methods,
            format,
            alpha_override,
            tolerance_quadrature,
            tolerance_root,
            tolerance_oracle,
            dump_potential,
            dump_phase
        )
    }

    pub fn to_config(&self) -> Result<RunConfig> {
        let defaults = RunConfig::default();
        let mut constants = PhysicalConstants::default();
        if let Some(alpha) = self.alpha_override {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(SpectrumError::Config(format!(
                    "alpha must be positive, got {alpha}"
                )));
            }
            constants.alpha = alpha;
        }
        if let Some(mass_ev) = self.mass_ev {
            constants.electron_mass_ev = mass_ev;
        }
        let mut params = AnyonParams::reference(&constants);
        params.spin = self.spin.unwrap_or(params.spin);
        params.charge = self.charge.unwrap_or(params.charge);
        params.xi = match self.xi {
            None | Some(Coupling::Alpha) => constants.alpha,
            Some(Coupling::Value(v)) => v,
        };
        let params = params
            .validated()
            .map_err(|e| SpectrumError::Config(e.to_string()))?;

        let base = Tolerances::default();
        let config = RunConfig {
            params,
            constants,
            n_max: self.n_max.unwrap_or(defaults.n_max),
            l_max: self.l_max.unwrap_or(defaults.l_max),
            levels: self.level.clone().map(|l| l.0),
            methods: self.methods.clone().map_or(defaults.methods, |m| m.0),
            format: self.format.unwrap_or(defaults.format),
            tolerances: Tolerances {
                quadrature: self.tolerance_quadrature.unwrap_or(base.quadrature),
                root: self.tolerance_root.unwrap_or(base.root),
                oracle: self.tolerance_oracle.unwrap_or(base.oracle),
            },
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses `key=value` lines into the same options as the command line.
pub fn parse_config_text(text: &str) -> Result<Args> {
    let mut argv = vec![OsString::from("anyon-spectrum")];
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            SpectrumError::Config(format!("line {}: expected key=value", index + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(SpectrumError::Config(format!(
                "line {}: nested config files are not supported",
                index + 1
            )));
        }
        argv.push(format!("--{key}={}", value.trim()).into());
    }
    Args::try_parse_from(argv).map_err(|e| SpectrumError::Config(e.to_string()))
}

pub fn read_config_file(path: &Path) -> Result<Args> {
    let text = fs::read_to_string(path)
        .map_err(|e| SpectrumError::Config(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Resolves command line and config file into a run configuration.
pub fn resolve(args: Args) -> Result<(RunConfig, Args)> {
    let args = match &args.config {
        Some(path) => {
            let file = read_config_file(path)?;
            args.merged_with(file)
        }
        None => args,
    };
    let config = args.to_config()?;
    Ok((config, args))
}

pub fn potential_series(config: &RunConfig, qn: QuantumNumbers) -> Result<String> {
    let e = energy_closed_form(&config.params, qn)?.e_total;
    let problem = RadialProblem::for_level(&config.params, qn, &config.tolerances.oracle())?;
    let mut out = String::from("r,effective_term\n");
    let ratio = (problem.r_max / problem.r_min).ln() / (DUMP_POINTS - 1) as f64;
    for i in 0..DUMP_POINTS {
        let r = problem.r_min * (ratio * i as f64).exp();
        let _ = writeln!(out, "{r},{}", effective_term(&problem, e, r)?);
    }
    Ok(out)
}

/// Phase residual on a geometric grid of binding fractions spanning a factor
/// of four either side of the closed-form level. Energies with no classically
/// allowed region are skipped.
pub fn phase_series(config: &RunConfig, qn: QuantumNumbers) -> Result<String> {
    let params = &config.params;
    let centre = energy_closed_form(params, qn)?.binding(params);
    let mut out = String::from("e_over_m,phase_residual\n");
    for i in 0..PHASE_POINTS {
        let t = i as f64 / (PHASE_POINTS - 1) as f64;
        let binding = centre * 4f64.powf(2.0 * t - 1.0);
        if binding >= 1.0 {
            continue;
        }
        let e = params.mass * (1.0 - binding);
        match quantization_residual(params, qn, e) {
            Ok(q) => {
                let _ = writeln!(out, "{},{}", e / params.mass, q.residual);
            }
            Err(SpectrumError::NoClassicalRegion(_)) => {}
            Err(other) => return Err(other),
        }
    }
    Ok(out)
}

fn write_dump(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| SpectrumError::Config(format!("{}: {e}", path.display())))
}

/// Runs the program on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let (config, args) = match resolve(args) {
        Ok(resolved) => resolved,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };

    let rows = compute(&config);
    let text = render(&rows, &config, config.format);
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_SOLVER;
    }

    let mut code = EXIT_OK;
    for row in &rows {
        for cell in &row.cells {
            if let Some(err) = &cell.error {
                let _ = writeln!(
                    stderr,
                    "error: (n'={}, l={}) {}: {err}",
                    row.n_r, row.l, cell.method
                );
                code = EXIT_SOLVER;
            }
        }
    }

    let first = config.level_list().first().copied();
    let dumps = [
        (
            args.dump_potential.as_deref(),
            potential_series as fn(&RunConfig, QuantumNumbers) -> Result<String>,
        ),
        (args.dump_phase.as_deref(), phase_series),
    ];
    for (path, series) in dumps {
        let Some(path) = path else { continue };
        let result = first
            .ok_or_else(|| SpectrumError::Config("no level to dump".into()))
            .and_then(|qn| series(&config, qn))
            .and_then(|text| write_dump(path, &text));
        if let Err(e) = result {
            let _ = writeln!(stderr, "error: {e}");
            code = EXIT_SOLVER;
        }
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("anyon-spectrum").chain(list.iter().copied())).unwrap()
    }

    #[test]
    fn zero_arguments_give_reference_config() {
        let (config, _) = resolve(args(&[])).unwrap();
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn xi_accepts_alpha_token_and_override() {
        let (config, _) = resolve(args(&["--xi", "alpha", "--alpha-override", "0.01"])).unwrap();
        assert_eq!(config.params.xi, 0.01);
        let (config, _) = resolve(args(&["--xi", "0.02"])).unwrap();
        assert_eq!(config.params.xi, 0.02);
    }

    #[test]
    fn config_file_fills_and_command_line_wins() {
        let file = parse_config_text(
            "# sweep\nspin = 0.25\nmethods=closed,nonrel  # trailing\nn_max=1\n\nformat=csv\n",
        )
        .unwrap();
        let cli = args(&["--spin", "0.75"]);
        let (config, _) = resolve(cli.merged_with(file)).unwrap();
        assert_eq!(config.params.spin, 0.75);
        assert_eq!(
            config.methods,
            vec![Method::ClosedForm, Method::NonRelativistic]
        );
        assert_eq!(config.n_max, 1);
        assert_eq!(config.format, OutputFormat::Csv);
    }

    #[test]
    fn config_errors() {
        assert!(parse_config_text("spin 0.5").is_err());
        assert!(parse_config_text("colour=blue").is_err());
        assert!(resolve(args(&["--xi", "1.5"])).is_err());
        assert!(resolve(args(&["--methods", ""])).is_err());
        assert!(resolve(args(&["--tolerance-oracle", "-1"])).is_err());
        assert!("0,0".parse::<LevelList>().is_err());
    }

    #[test]
    fn level_list_parses_several() {
        let LevelList(levels) = "0,1; 2,3".parse().unwrap();
        assert_eq!(
            levels,
            vec![
                QuantumNumbers { n_r: 0, l: 1 },
                QuantumNumbers { n_r: 2, l: 3 }
            ]
        );
    }

    #[test]
    fn exit_codes() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run(["x", "--methods", "closed"], &mut out, &mut err),
            EXIT_OK
        );
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 7);

        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["x", "--bogus"], &mut out, &mut err), EXIT_CONFIG);
        assert!(out.is_empty());

        // The shooting solver does not handle negative spin.
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            [
                "x",
                "--spin",
                "-0.5",
                "--methods",
                "closed,oracle",
                "--n-max",
                "0",
                "--l-max",
                "1",
            ],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_SOLVER);
        assert!(String::from_utf8(out).unwrap().contains("ERR"));
    }

    #[test]
    fn phase_series_changes_sign_once() {
        let config = RunConfig::default();
        let text = phase_series(&config, QuantumNumbers { n_r: 0, l: 1 }).unwrap();
        let values: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(values.len() > 100);
        let flips = values
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        assert_eq!(flips, 1);
    }
}
