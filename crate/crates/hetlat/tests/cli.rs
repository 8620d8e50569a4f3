mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{parse_binary, repo_file};

fn hetlat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetlat")).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_writes_stl_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "cube.json", r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1"}"#);
    let o = hetlat(&["generate", "--spec", &spec, "--threads", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let stl = std::fs::read(dir.path().join("cube.stl")).unwrap();
    let tris = parse_binary(&stl).unwrap();
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("cube.stl.report.json")).unwrap()).unwrap();
    assert_eq!(report["mesh"]["genus"], 5);
    assert_eq!(report["mesh"]["watertight"], true);
    assert_eq!(report["mesh"]["triangles"], tris.len());
    assert_eq!(report["mesh"]["duplicate_vertices"], 0);
    for phase in ["field_eval", "polygonize", "weld", "export", "total"] {
        assert!(report["timings"][phase].as_f64().unwrap() >= 0.0, "{phase}");
    }
}

#[test]
fn generate_honours_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "g.json", r#"{"topology": "gyroid", "u": 20, "N": [1, 1, 1], "thickness": 2}"#);
    let out = dir.path().join("g.stl");
    let rep = dir.path().join("r.json");
    let o = hetlat(
        &[
            "generate", "--spec", &spec, "--out", out.to_str().unwrap(), "--format", "ascii",
            "--resolution", "16", "--report", rep.to_str().unwrap(), "--mode", "continuous",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("solid g\n"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(report["resolution"], 16);
    assert_eq!(report["mode"], "continuous");
    assert_eq!(report["format"], "ascii");
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        (r#"{"topology": "gyroid", "u": 20, "N": [1, 1, 1], "thickness": "0"}"#, 5, "thickness"),
        (r#"{"topology": "octet", "u": 20, "N": [1, 1, 1], "beam_diameter": "1"}"#, 3, "schwarz_d"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1+q"}"#, 4, "`q`"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "(1"}"#, 4, "offset 2"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "log(x)"}"#, 4, "log"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1", "thickness": "1"}"#, 3, "thickness"),
        (r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "#, 3, ""),
    ];
    for (i, (text, code, needle)) in cases.into_iter().enumerate() {
        let spec = write(d, &format!("s{i}.json"), text);
        for cmd in ["validate", "generate"] {
            let o = hetlat(&[cmd, "--spec", &spec], d);
            assert_eq!(o.status.code(), Some(code), "{cmd} {text}: {}", stderr(&o));
            assert!(stderr(&o).contains(needle), "{text}: {}", stderr(&o));
        }
        assert!(!d.join(format!("s{i}.stl")).exists());
    }
    let o = hetlat(&["generate", "--spec", "missing.json"], d);
    assert_eq!(o.status.code(), Some(7));
    let spec = write(d, "ok.json", r#"{"topology": "cubic", "u": 10, "N": [1, 1, 1], "beam_diameter": "1"}"#);
    let o = hetlat(&["generate", "--spec", &spec, "--out", "/nonexistent/dir/x.stl"], d);
    assert_eq!(o.status.code(), Some(7), "{}", stderr(&o));
    let o = hetlat(&["generate", "--spec", &spec, "--threads", "0"], d);
    assert_eq!(o.status.code(), Some(2));
    let o = hetlat(&["generate", "--spec", &spec, "--format", "obj"], d);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_reports_ranges_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "v.json",
        r#"{"topology": "bcc", "u": 10, "N": [20, 1, 1], "beam_diameter": "-4*6*(x-0.5)^2 + 6 + 1", "node_scale": 0.8}"#,
    );
    let o = hetlat(&["validate", "--spec", &spec], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    let d = v["parameters"].as_array().unwrap().iter().find(|p| p["key"] == "beam_diameter").unwrap();
    assert_eq!(d["min"], 1.0);
    assert!(d["max"].as_f64().unwrap() < 7.0);
    assert!(!dir.path().join("v.stl").exists());
}

#[test]
fn info_prints_graph_statistics() {
    let o = hetlat(&["info", "--spec", repo_file("specs/cubic.json").to_str().unwrap()], Path::new("."));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("8 vertices, 12 edges, cycle rank 5"), "{text}");
    assert!(text.contains("\"resolution\": 48"), "{text}");
}

#[test]
fn bench_emits_csv_and_caps_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetlat(&["bench", "--resolution", "12", "--sizes", "1,2", "--repeats", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap().iter().next(), Some("topology"));
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[1][1], "8");
    let o = hetlat(&["bench", "--sizes", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--allow-large"));
}
