use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use unbias_core::BigRational;

fn unbias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unbias")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn coeffs_order_two_is_a_single_row() {
    let o = unbias(&["coeffs", "--p", "2", "--k", "1", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "table,order,sub,partition,coefficient\nd,1,,2,-1/2\n");
}

#[test]
fn coeffs_order_three_rows() {
    let o = unbias(&["coeffs", "--p", "3", "--format", "csv"]);
    let body = stdout(&o);
    let rows: Vec<&str> = body.lines().skip(1).collect();
    assert_eq!(rows, ["d,1,,2,-1/2", "d,2,,3,1/3", "d,2,,2^2,1/8"]);
}

#[test]
fn coeffs_json_and_csv_carry_the_same_numbers() {
    let csv = stdout(&unbias(&["coeffs", "--p", "5", "--format", "csv"]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&unbias(&["coeffs", "--p", "5", "--format", "json"]))).unwrap();
    let from_csv: Vec<(String, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[3].to_string(), f[4].to_string())
        })
        .collect();
    let from_json: Vec<(String, String)> = json["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["partition"].as_str().unwrap().to_string(), r["coefficient"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(from_csv, from_json);
    assert!(json["notes"][0].as_str().unwrap().contains("15 terms"));
}

#[test]
fn coeffs_beyond_checked_orders_warn_but_emit() {
    let o = unbias(&["coeffs", "--p", "7"]);
    assert!(o.status.success());
    assert!(stderr(&o).starts_with("warning:"));
    assert!(stdout(&o).contains("d6 (2^6) = 1/46080"));
}

#[test]
fn coeffs_for_v_and_t() {
    let v = stdout(&unbias(&["coeffs", "--p", "3", "--kind", "v", "--format", "csv"]));
    assert!(v.contains("c,4,,2^2,3\n") && v.contains("c,4,,4,-6\n") && v.contains("c,2,,2,-1\n"));
    let t = stdout(&unbias(&["coeffs", "--p", "2", "--kind", "t", "--format", "csv"]));
    assert!(t.contains("D,0,0,,1\n"));
}

#[test]
fn estimate_reports_corrections() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", "x\n1\n2\n4\n8\n3\n");
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "central-moment", "--moment-order", "2", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 7.3).abs() < 1e-12);
    assert!((v["plug_in"].as_f64().unwrap() - 5.84).abs() < 1e-12);
    assert_eq!(v["kind"], "S");
    assert_eq!(v["sizes"], serde_json::json!([5]));
    assert_eq!(v["corrections"][0]["order"], 1);

    let text = stdout(&unbias(&["estimate", "--input", s(&x), "--functional", "stddev", "--kind", "t"]));
    assert!(text.contains("estimator: T (p = 2)") && text.contains("plug-in:"));
    let csv = stdout(&unbias(&["estimate", "--input", s(&x), "--functional", "stddev", "--format", "csv"]));
    assert!(csv.starts_with("functional,kind,p,sizes,plug_in,value,corrections,term_count,terms_evaluated\nstddev,S,2,5,"));
}

#[test]
fn constant_column_is_a_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", "x\n3\n3\n3\n3\n");
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "stddev"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[degenerate]:"), "{err}");
}

#[test]
fn ratio_of_means_rejects_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "x\n1\n2\n3\n");
    let b = write(dir.path(), "b.csv", "y\n1\n2\n3\n");
    let o = unbias(&["estimate", "--input", s(&a), "--input", s(&b), "--functional", "ratio-of-means"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error[arity]:"), "{}", stderr(&o));
}

#[test]
fn bad_inputs_are_single_line_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "x\n1\nfoo\n");
    let o = unbias(&["estimate", "--input", s(&bad), "--functional", "stddev"]);
    assert!(stderr(&o).starts_with("error[parse]:") && stderr(&o).contains("row 3"));
    let o = unbias(&["estimate", "--input", "/nonexistent/x.csv", "--functional", "stddev"]);
    assert!(!o.status.success() && stderr(&o).starts_with("error["));
    let x = write(dir.path(), "x.csv", "x\n1\n2\n");
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "power-of-mean"]);
    assert!(stderr(&o).starts_with("error[usage]:"));
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "stddev", "--p", "3"]);
    assert!(stderr(&o).starts_with("error[insufficient-sample]:"), "{}", stderr(&o));
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "no-such"]);
    assert!(stderr(&o).starts_with("error[usage]:"));
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn exact_fourth_power_matches_the_u_statistic() {
    let xs = [3i64, -1, 4, 1, 5, 9, 2];
    let dir = tempfile::tempdir().unwrap();
    let body: String = std::iter::once("x".to_string()).chain(xs.iter().map(|v| v.to_string())).collect::<Vec<_>>().join("\n");
    let x = write(dir.path(), "x.csv", &body);
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "power-of-mean", "--q", "4", "--p", "4", "--exact", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got: BigRational = v["value"].as_str().unwrap().parse().unwrap();

    // average of x_i x_j x_k x_l over ordered distinct index tuples
    let n = xs.len();
    let (mut sum, mut count) = (q(0), 0i64);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            for k in (0..n).filter(|&k| k != i && k != j) {
                for l in (0..n).filter(|&l| l != i && l != j && l != k) {
                    sum += q(xs[i] * xs[j] * xs[k] * xs[l]);
                    count += 1;
                }
            }
        }
    }
    assert_eq!(got, sum / q(count));
    assert_eq!(v["exact"], true);
}

#[test]
fn exact_mode_keeps_decimals_exact() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", "x\n0.1\n0.2\n0.4\n");
    let o = unbias(&["estimate", "--input", s(&x), "--functional", "central-moment", "--moment-order", "2", "--exact", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    // unbiased variance of {0.1, 0.2, 0.4} is 7/300
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",7/300,"));
}

#[test]
fn linear_comb_power_one_and_k_samples() {
    let dir = tempfile::tempdir().unwrap();
    let xy = write(dir.path(), "xy.csv", "x,y\n1,2\n2,3\n4,1\n3,3\n");
    let o = unbias(&["estimate", "--input", s(&xy), "--functional", "linear-comb-power", "--q", "2", "--alpha", "0.5,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a = write(dir.path(), "a.csv", "x\n1\n2\n4\n3\n");
    let b = write(dir.path(), "b.csv", "y\n2\n3\n1\n3\n5\n");
    let o = unbias(&[
        "estimate", "--input", s(&a), "--input", s(&b), "--functional", "linear-comb-power", "--q", "2", "--alpha", "1,1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = unbias(&["estimate", "--input", s(&a), "--input", s(&b), "--functional", "harmonic-product"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn bench_is_deterministic_and_summarised() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = unbias(&[
            "bench", "--experiment", "sigma-exp", "--n", "40", "--reps", "30", "--seed", "7", "--bootstrap-replicates", "50",
            "--out", s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (std::fs::read(out).unwrap(), stdout(&o))
    };
    let (a, summary) = run("a.csv");
    let (b, _) = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("experiment,grid_param,estimator,n,reps,seed,mean_estimate,avg_abs_bias,mse,not_applicable\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 9);
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.contains("lowest |bias|"));
}

#[test]
fn bench_marks_inapplicable_comparators() {
    let o = unbias(&["bench", "--experiment", "ratio-exp", "--n", "20", "--reps", "5", "--grid", "1", "--estimators", "plug-in,sen"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let body = stdout(&o);
    assert!(body.contains("ratio-exp,1.0,sen,20,5,0,,,,true\n"), "{body}");
}

#[test]
fn bench_rejects_bad_requests() {
    let o = unbias(&["bench", "--experiment", "nope"]);
    assert!(!o.status.success());
    let o = unbias(&["bench", "--experiment", "sigma-exp", "--reps", "0"]);
    assert!(stderr(&o).starts_with("error[usage]:"));
    let o = unbias(&["bench", "--experiment", "sigma-exp", "--reps", "2", "--out", "/nonexistent/dir/out.csv"]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error[usage]: cannot write"), "{}", stderr(&o));
}

#[test]
fn discrepancies_render_in_every_format() {
    let json: serde_json::Value = serde_json::from_str(&stdout(&unbias(&["discrepancies", "--format", "json"]))).unwrap();
    let list = json.as_array().unwrap();
    assert!(list.iter().any(|d| d["topic"] == "s-table"));
    let csv = stdout(&unbias(&["discrepancies", "--format", "csv"]));
    assert!(csv.starts_with("topic,item,printed,derived,resolution\n"));
    assert_eq!(stdout(&unbias(&["discrepancies"])).lines().count(), list.len());
}
