use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn qns(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_qns")).args(args).arg("--out").arg(out).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into(), String::from_utf8_lossy(&o.stderr).into())
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("c.toml");
    fs::write(&p, body).unwrap();
    p
}

fn files(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn strip_timestamp(s: &str) -> String {
    s.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn zero_field_norms_are_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 5\n[grid]\nresolution = 16\n[corpus]\nfields = [\"zero=bump:a=0\"]\nalphas = [0.5]\n",
    );
    let (code, out, err) = qns(&["--config", cfg.to_str().unwrap(), "norms"], tmp.path());
    assert_eq!(code, 0, "{err}");
    let dir = PathBuf::from(out.trim());
    let (_, csv) = files(&dir).into_iter().find(|(n, _)| n.starts_with("norms") && n.ends_with(".csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    for l in &lines[1..] {
        let value: f64 = l.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(value, 0.0, "{l}");
    }
}

#[test]
fn reruns_are_identical_and_checkable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "seed = 9\n[grid]\nresolution = 16\n[corpus]\nalphas = [0.25, 0.5]\n");
    let c = cfg.to_str().unwrap();
    let (code, a, _) = qns(&["--config", c, "inclusions"], tmp.path());
    assert_eq!(code, 0);
    let (_, b, _) = qns(&["--config", c, "inclusions"], tmp.path());
    let (a, b) = (PathBuf::from(a.trim()), PathBuf::from(b.trim()));
    assert_ne!(a, b);
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), fb.len());
    for ((na, ca), (nb, cb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        assert_eq!(strip_timestamp(ca), strip_timestamp(cb), "{na}");
    }
    let manifest = qns::manifest_of(&a).unwrap();
    let (code, out, err) = qns(&["--check", manifest.to_str().unwrap()], tmp.path());
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("check passed"));
    let csv = a.join(&fa.iter().find(|(n, _)| n.starts_with("besov")).unwrap().0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
    let v: f64 = cells[1].parse().unwrap();
    cells[1] = format!("{:.16e}", v * (1.0 + 1e-9));
    let tampered = std::iter::once(lines[0].to_string())
        .chain(std::iter::once(cells.join(",")))
        .chain(lines[2..].iter().map(|s| s.to_string()))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    fs::write(&csv, tampered).unwrap();
    let (code, _, _) = qns(&["--check", manifest.to_str().unwrap()], tmp.path());
    assert_eq!(code, 3);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "seed = 1\n[grid]\nresolutoin = 16\n");
    assert_eq!(qns(&["--config", bad.to_str().unwrap(), "norms"], tmp.path()).0, 2);
    assert_eq!(qns(&["norms"], tmp.path()).0, 2);
    assert_eq!(qns(&["--seed", "1", "--resolution", "17", "norms"], tmp.path()).0, 2);
    assert_eq!(qns(&["--seed", "1", "--alpha", "1.5", "norms"], tmp.path()).0, 2);
}

#[test]
fn missing_manifest_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let m = tmp.path().join("none.json");
    assert_eq!(qns(&["--check", m.to_str().unwrap()], tmp.path()).0, 4);
}

#[test]
fn gen_writes_readable_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, _) = qns(&["--seed", "1", "--resolution", "16", "gen", "tg", "s=bump:w=0.02"], tmp.path());
    assert_eq!(code, 0);
    let dir = PathBuf::from(out.trim());
    let fs_ = files(&dir);
    let tg = &fs_.iter().find(|(n, _)| n.starts_with("field_tg-")).unwrap().1;
    let f = qspace::io::read_field(tg.as_bytes()).unwrap();
    assert!(f.is_vector());
    let s = &fs_.iter().find(|(n, _)| n.starts_with("field_s-")).unwrap().1;
    assert!(!qspace::io::read_field(s.as_bytes()).unwrap().is_vector());
}

#[test]
fn schur_table_is_bounded() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = qns(&["--seed", "1", "--resolution", "16", "lemmas", "--schur"], tmp.path());
    assert_eq!(code, 0, "{err}");
    let dir = PathBuf::from(out.trim());
    let (_, csv) = files(&dir).into_iter().find(|(n, _)| n.starts_with("schur-")).unwrap();
    for l in csv.lines().skip(1) {
        for c in l.split(',').skip(3) {
            assert!(c.parse::<f64>().unwrap() <= 1.0 + 1e-6);
        }
    }
}

#[test]
fn large_data_solve_is_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 1\n[grid]\nresolution = 16\n[solver]\ninitial = \"tg2:a=120\"\nmesh_levels = 24\npicard_iterations = 6\n",
    );
    let (code, out, err) = qns(&["--config", cfg.to_str().unwrap(), "solve"], tmp.path());
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("warning"));
    let dir = PathBuf::from(out.trim());
    let fs_ = files(&dir);
    let diag = &fs_.iter().find(|(n, _)| n.starts_with("diagnostics")).unwrap().1;
    assert!(diag.lines().skip(1).all(|l| l.ends_with(",false")));
    assert!(fs_.iter().any(|(n, _)| n.starts_with("warnings")));
}
