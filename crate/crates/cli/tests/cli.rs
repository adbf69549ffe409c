use std::process::{Command, Output};

use walg::dsred::{KValue, Reduction};
use walg::hamflow::kdv_pair;
use walg::liealg::{make_sl, Nilpotent};
use walg::{q, DiffPoly};

fn walg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.starts_with("PASS") && !l.starts_with("FAIL"))
        .map(|l| {
            let (a, b) = l.split_once(" = ").unwrap();
            (a.to_string(), b.to_string())
        })
        .collect()
}

#[test]
fn virasoro_passes() {
    let o = walg(&["verify-pva", "--preset", "virasoro"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn fractional_pencil_passes() {
    let o = walg(&["verify-pva", "--preset", "fractional", "--algebra", "sl2", "--m", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS compatibility("));
}

#[test]
fn broken_presentation_exits_one() {
    let dir = std::env::temp_dir().join(format!("walg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "even u\n{u, u} = u\n").unwrap();
    let o = walg(&["verify-pva", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL skewsymmetry"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(walg(&["verify-pva", "--preset", "bogus"]).status.code(), Some(2));
    assert_eq!(walg(&["verify-pva"]).status.code(), Some(2));
    assert_eq!(walg(&["generators", "--algebra", "so5"]).status.code(), Some(2));
    assert_eq!(walg(&["generators", "--k", "one"]).status.code(), Some(2));
    assert_eq!(walg(&["kdv", "--depth", "0"]).status.code(), Some(2));
}

#[test]
fn generators_match_the_reference_table_and_reparse() {
    let o = walg(&["generators", "--algebra", "sl2", "--m", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let red = Reduction::new(&make_sl(2, Nilpotent::Principal).unwrap(), 2, KValue::Value(q(1))).unwrap();
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/golden/sl2_m2_generators.txt")).unwrap();
    let expected: Vec<(String, DiffPoly)> = golden
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (a, b) = l.split_once('=').unwrap();
            (a.trim().to_string(), DiffPoly::parse(red.algebra(), b).unwrap())
        })
        .collect();
    let got: Vec<(String, DiffPoly)> = values(&stdout(&o))
        .into_iter()
        .map(|(a, b)| (a, DiffPoly::parse(red.algebra(), &b).unwrap()))
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn kdv_densities_reparse() {
    let o = walg(&["hierarchy", "--preset", "kdv", "--c", "1", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (ph, _) = kdv_pair(&q(1)).unwrap();
    let vals = values(&stdout(&o));
    let names: Vec<&str> = vals.iter().map(|v| v.0.as_str()).collect();
    assert_eq!(names, ["h0", "h1", "h2", "h3"]);
    for (_, v) in &vals {
        let p = DiffPoly::parse(ph.algebra(), v).unwrap();
        assert_eq!(&p.to_string(), v);
    }
    assert_eq!(vals[2].1, "1/2*u*u'' + 1/2*u^3");
}

#[test]
fn kdv_from_sl2_prints_the_equation() {
    let o = walg(&["kdv-from-sl2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("equation = g_e_ttt = 3*g_e*g_e_t + 1/2*k*g_e_x"));
}

#[test]
fn brst_check_passes() {
    for alg in [["--algebra", "sl2", "--nilpotent", "principal"], ["--algebra", "sl3", "--nilpotent", "minimal"]] {
        let mut args = vec!["brst-check"];
        args.extend(alg);
        let o = walg(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("PASS energy-momentum-virasoro"));
    }
}

#[test]
fn json_report_shape_and_determinism() {
    let args = ["--format", "json", "bracket-table", "--algebra", "sl2", "--m", "1", "--which", "1"];
    let a = walg(&args);
    let b = walg(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "bracket-table");
    assert_eq!(v["config"]["which"], 1);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 16);
    assert!(results.iter().all(|r| r["pass"] == true && r["name"].is_string()));
}
