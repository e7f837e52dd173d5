use std::process::{Command, Output};

use spdc_ng_cli::Report;

fn spdc_ng(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdc-ng")).args(args).env_remove("SPDC_NG_THREADS").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = spdc_ng(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header and rows of a CSV document, checking the version line.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# spdc-ng v1"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["figure", "9z"][..],
        &["sweep", "--quantity", "epr", "--p-min", "3", "--p-max", "1"],
        &["sweep", "--quantity", "epr", "--p-max", "1"],
        &["sweep", "--quantity", "epr", "--p-min", "0.1", "--p-max", "1", "--steps", "1"],
        &["report", "--p", "1", "--sigma", "0.5"],
        &["report", "--p", "-1"],
        &["report", "--p", "1", "--threads", "0"],
        &["report", "--p", "1", "--abs-tol", "0"],
        &["report"],
    ] {
        assert_eq!(spdc_ng(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(spdc_ng(&["--help"]).status.code(), Some(0));
}

#[test]
fn report_json_round_trips() {
    let text = stdout(&["report", "--p", "1", "--format", "json"]);
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    assert!((report.ng.ng_total - 0.37).abs() < 0.01);
    assert!((report.delta_b - 1.08).abs() < 0.01);
    assert!((report.mancini - 1.684).abs() < 0.005);
    assert_eq!(report.units.negentropy, "bits");
    assert_eq!(report.units.delta_b, "nats");

    let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["n_ff_joint", "ng_total", "ng_cond", "ng_marg", "epr", "delta_b", "purity", "units"] {
        assert!(raw.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn report_csv_is_one_row() {
    let (header, rows) = csv(&stdout(&["report", "--p", "0.1"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(header.len(), rows[0].len());
    let product = column(&header, &rows, "epr_product")[0];
    assert!(product < 0.25);
    assert_eq!(rows[0][header.iter().position(|h| h == "epr_entangled").unwrap()], "true");
}

#[test]
fn constants_output() {
    let (header, rows) = csv(&stdout(&["constants"]));
    let get = |name: &str| column(&header, &rows, name)[0];
    assert!((get("shape_a1") - 1.4008).abs() < 1e-3);
    assert!((get("marginal_limit_ff") - 0.154).abs() < 2e-3);
    assert!((get("marginal_limit_nf") - 0.224).abs() < 3e-3);
    assert!((get("nu_minus") - (3.0 * get("shape_a2") / get("shape_a1")).sqrt()).abs() < 1e-12);
    assert!((get("alpha_1_over_e") - 0.45).abs() < 0.01 && (get("alpha_1_over_e2") - 0.72).abs() < 0.01);
}

#[test]
fn sweep_writes_ordered_rows_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("epr.csv");
    let out = spdc_ng(&[
        "sweep",
        "--quantity",
        "epr",
        "--p-min",
        "0.1",
        "--p-max",
        "5",
        "--steps",
        "9",
        "--alpha",
        "0.45",
        "--alpha",
        "0.72",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let (header, rows) = csv(&text);
    assert_eq!(header, ["p", "epr", "epr_err", "epr_alpha_0.45", "epr_alpha_0.72", "error"]);
    let p = column(&header, &rows, "p");
    assert_eq!(p.len(), 9);
    assert!(p.windows(2).all(|w| w[0] < w[1]) && p[0] == 0.1 && p[8] == 5.0);
    assert!(rows.iter().all(|r| r.last().unwrap().is_empty()));
}

#[test]
fn momentum_variance_is_gaussian_only_at_small_p() {
    let run = |p: &str| {
        let text = stdout(&[
            "sweep",
            "--quantity",
            "var_q_norm",
            "--p-min",
            p,
            "--p-max",
            "10",
            "--steps",
            "2",
            "--alpha",
            "0.72",
        ]);
        let (header, rows) = csv(&text);
        (column(&header, &rows, "var_q_norm")[0], column(&header, &rows, "var_q_norm_alpha_0.72")[0])
    };
    let (s, g) = run("0.1");
    assert!((s / g - 1.0).abs() < 0.05, "{s} {g}");
    let (s, g) = run("2");
    assert!((s / g - 1.0).abs() > 0.2, "{s} {g}");
}

#[test]
fn figure_cross_section_matches_gaussian_at_small_p() {
    let (header, rows) = csv(&stdout(&["figure", "1a"]));
    assert_eq!(header, ["q", "spdc", "alpha_0.45", "alpha_0.72", "error"]);
    let spdc = column(&header, &rows, "spdc");
    let gauss = column(&header, &rows, "alpha_0.72");
    let peak = spdc.iter().cloned().fold(0.0, f64::max);
    let worst = spdc.iter().zip(&gauss).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 0.05 * peak, "{worst} vs peak {peak}");
}

#[test]
fn figure_two_peaks_between_the_crossings() {
    let (header, rows) = csv(&stdout(&["figure", "2"]));
    let p = column(&header, &rows, "p");
    let epr = column(&header, &rows, "epr");
    let i = (0..epr.len()).max_by(|&a, &b| epr[a].total_cmp(&epr[b])).unwrap();
    assert!(p[i] > 0.56 && p[i] < 2.58 && epr[i] > 0.25);
    for alpha in ["0.45", "0.72", "1"] {
        assert!(column(&header, &rows, &format!("epr_alpha_{alpha}")).iter().all(|&v| v <= 0.25));
    }
}

#[test]
fn marginal_non_gaussianity_has_an_interior_minimum() {
    let (header, rows) = csv(&stdout(&["figure", "3d", "--steps", "24"]));
    let ng = column(&header, &rows, "ng_marg");
    let i = (0..ng.len()).min_by(|&a, &b| ng[a].total_cmp(&ng[b])).unwrap();
    assert!(i > 0 && i < ng.len() - 1, "{ng:?}");
}

#[test]
fn json_sweep_has_units() {
    let text = stdout(&[
        "sweep",
        "--quantity",
        "delta_b",
        "--quantity",
        "ng_total",
        "--p-min",
        "0.5",
        "--p-max",
        "1",
        "--steps",
        "2",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["units"]["delta_b"], "nats");
    assert_eq!(doc["units"]["ng_total"], "bits");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert!(doc["rows"][0]["error"].is_null());
}
