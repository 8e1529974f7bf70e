use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use anyon_spectrum::spectrum::JsonReport;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anyon-spectrum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("anyon-spectrum-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn default_table_matches_reference_digits() {
    let out = bin(&["--methods", "closed"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = [
        ("0", "1", "-6.0466"),
        ("0", "2", "-2.1769"),
        ("1", "1", "-2.1768"),
        ("1", "2", "-1.1107"),
        ("2", "1", "-1.1106"),
        ("2", "2", "-0.6719"),
    ];
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for (row, (n, l, e)) in rows.iter().zip(expected) {
        assert_eq!(row, &vec![n, l, e]);
    }
}

#[test]
fn csv_header_and_shape() {
    let out = bin(&["--format", "csv", "--methods", "closed,nonrel,wkb-split"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n_r,l,closed,nonrel,wkb-split");
    assert_eq!(lines.len(), 7);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        for v in &cols[2..] {
            let x: f64 = v.parse().unwrap();
            assert!(x < 0.0 && x.is_finite());
            // Shortest round-trip rendering.
            assert_eq!(format!("{x}"), *v);
        }
    }
}

#[test]
fn json_is_parseable_and_echoes_config() {
    let out = bin(&[
        "--format",
        "json",
        "--methods",
        "closed,wkb-full",
        "--n-max",
        "1",
        "--l-max",
        "3",
        "--spin",
        "0.25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: JsonReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.meta.spin, 0.25);
    assert_eq!(report.meta.n_max, 1);
    assert_eq!(report.rows.len(), 6);
    let order: Vec<(u32, u32)> = report.rows.iter().map(|r| (r.n_r, r.l)).collect();
    assert_eq!(order, vec![(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3)]);
    for row in &report.rows {
        assert!(row.errors.is_empty());
        assert!(row.deltas_vs_oracle_ev.is_empty());
        assert_eq!(row.energies_ev.len(), 2);
    }
}

#[test]
fn zero_coupling_gives_zero_energies() {
    let out = bin(&["--xi", "0", "--methods", "closed", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        assert!(line.ends_with(",0"), "{line}");
    }
}

#[test]
fn config_file_and_override() {
    let path = scratch("sweep.conf");
    fs::write(
        &path,
        "# reference sweep with a heavier nucleus\ncharge = 2\nmethods = closed\nformat = csv\nn_max = 0\nl_max = 1\n",
    )
    .unwrap();
    let from_file = bin(&["--config", path.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    let text = stdout(&from_file);
    assert_eq!(text.lines().count(), 2);
    let e: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    // Z = 2 scales the ground state by about Z^2.
    assert!((e / -6.0466 - 4.0).abs() < 0.01, "{e}");

    let overridden = bin(&["--config", path.to_str().unwrap(), "--charge", "1"]);
    let e1: f64 = stdout(&overridden)
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((e1 + 6.0466).abs() < 1e-3);
}

#[test]
fn bad_config_exits_two_before_computing() {
    for args in [
        vec!["--xi", "2"],
        vec!["--methods", "magic"],
        vec!["--format", "xml"],
        vec!["--tolerance-root", "0"],
        vec!["--level", "0,0"],
        vec!["--config", "/nonexistent/anyon.conf"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn solver_failure_exits_three_and_keeps_other_cells() {
    let out = bin(&[
        "--spin",
        "-0.5",
        "--methods",
        "closed,oracle",
        "--level",
        "0,1",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("0,1,-"));
    assert!(row.ends_with(",ERR"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle"));
}

#[test]
fn dumps_write_csv_series() {
    let potential = scratch("potential.csv");
    let phase = scratch("phase.csv");
    let out = bin(&[
        "--methods",
        "closed",
        "--level",
        "1,1",
        "--dump-potential",
        potential.to_str().unwrap(),
        "--dump-phase",
        phase.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let potential = fs::read_to_string(potential).unwrap();
    let mut lines = potential.lines();
    assert_eq!(lines.next(), Some("r,effective_term"));
    let points: Vec<(f64, f64)> = lines
        .map(|l| {
            let (r, q) = l.split_once(',').unwrap();
            (r.parse().unwrap(), q.parse().unwrap())
        })
        .collect();
    assert_eq!(points.len(), 2000);
    assert!(points.windows(2).all(|w| w[1].0 > w[0].0));
    // Forbidden at both ends, allowed in between.
    assert!(points[0].1 < 0.0 && points[points.len() - 1].1 < 0.0);
    assert!(points.iter().any(|p| p.1 > 0.0));

    let phase = fs::read_to_string(phase).unwrap();
    assert!(phase.starts_with("e_over_m,phase_residual\n"));
    assert!(phase.lines().count() > 100);
}

#[test]
fn help_exits_zero() {
    let out = bin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("--dump-potential"));
}
