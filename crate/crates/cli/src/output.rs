use anyhow::Context;
use qspace::io::fmt_num;
use qspace::spaces::NormEstimate;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;

/// One output file, held in memory until the run is committed.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub stem: String,
    pub ext: &'static str,
    pub content: String,
}

impl Artifact {
    pub fn file_name(&self, hash: &str) -> String {
        format!("{}-{hash}.{}", self.stem, self.ext)
    }
}

/// Column-ordered CSV built from already formatted cells.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn artifact(&self, stem: &str) -> Artifact {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        Artifact { stem: stem.into(), ext: "csv", content: s }
    }
}

pub fn num(v: f64) -> String {
    fmt_num(v)
}

pub fn json_artifact(stem: &str, value: &impl Serialize) -> Artifact {
    let mut content = serde_json::to_string_pretty(value).expect("serializable");
    content.push('\n');
    Artifact { stem: stem.into(), ext: "json", content }
}

/// Alpha column of a report record.
#[derive(Clone, Copy, Debug)]
pub enum AlphaLabel {
    Value(f64),
    /// The Morrey column reached as `α → 1`.
    Limit,
    None,
}

impl AlphaLabel {
    fn cell(self) -> String {
        match self {
            AlphaLabel::Value(a) => num(a),
            AlphaLabel::Limit => "1(limit)".into(),
            AlphaLabel::None => String::new(),
        }
    }

    fn json(self) -> Value {
        match self {
            AlphaLabel::Value(a) => Value::from(a),
            AlphaLabel::Limit => Value::from("1(limit)"),
            AlphaLabel::None => Value::Null,
        }
    }
}

/// Norm report rows with a leading `field` column.
pub struct Report {
    n_dims: usize,
    resolution: usize,
    seed: u64,
    rows: Vec<Vec<(String, String, Value)>>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self { n_dims: config.grid.n_dims, resolution: config.grid.resolution, seed: config.seed, rows: Vec::new() }
    }

    fn keys(&self) -> Vec<&'static str> {
        let mut k = vec!["field", "norm_kind", "alpha", "T", "value", "max_ball_cx", "max_ball_cy"];
        if self.n_dims == 3 {
            k.push("max_ball_cz");
        }
        k.extend(["max_ball_r", "n_balls", "n_time_levels", "resolution", "seed"]);
        k
    }

    pub fn push(&mut self, field: &str, kind: &str, alpha: AlphaLabel, t: Option<f64>, est: &NormEstimate) {
        let opt = |v: Option<f64>| match v {
            Some(x) => (num(x), Value::from(x)),
            None => (String::new(), Value::Null),
        };
        let ball = est.maximizing_ball;
        let mut cells = vec![
            ("field", (field.to_string(), Value::from(field))),
            ("norm_kind", (kind.to_string(), Value::from(kind))),
            ("alpha", (alpha.cell(), alpha.json())),
            ("T", opt(t)),
            ("value", (num(est.value), Value::from(est.value))),
            ("max_ball_cx", opt(ball.map(|b| b.center[0]))),
            ("max_ball_cy", opt(ball.map(|b| b.center[1]))),
        ];
        if self.n_dims == 3 {
            cells.push(("max_ball_cz", opt(ball.map(|b| b.center[2]))));
        }
        let n_balls = est.family.as_ref().map(|f| f.n_balls);
        let levels = est.mesh.as_ref().map(|m| m.levels);
        let int = |v: Option<usize>| match v {
            Some(x) => (x.to_string(), Value::from(x)),
            None => (String::new(), Value::Null),
        };
        cells.extend([
            ("max_ball_r", opt(ball.map(|b| b.radius))),
            ("n_balls", int(n_balls)),
            ("n_time_levels", int(levels)),
            ("resolution", (self.resolution.to_string(), Value::from(self.resolution))),
            ("seed", (self.seed.to_string(), Value::from(self.seed))),
        ]);
        self.rows.push(cells.into_iter().map(|(k, (c, j))| (k.to_string(), c, j)).collect());
    }

    /// CSV and JSON mirror.
    pub fn artifacts(&self, stem: &str) -> Vec<Artifact> {
        let mut t = Table::new(&self.keys());
        for r in &self.rows {
            t.push(r.iter().map(|c| c.1.clone()).collect());
        }
        let records: Vec<serde_json::Map<String, Value>> =
            self.rows.iter().map(|r| r.iter().map(|(k, _, j)| (k.clone(), j.clone())).collect()).collect();
        vec![t.artifact(stem), json_artifact(stem, &records)]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub library_version: String,
    pub subcommand: String,
    pub flags: Vec<String>,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
    pub timestamp: String,
}

/// Output root: `--out`, then `[output].root`, then `QNS_OUT`, then `qns-out`.
pub fn output_root(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(r) = &config.output.root {
        return PathBuf::from(r);
    }
    std::env::var_os("QNS_OUT").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("qns-out"))
}

/// Writes the artifacts and the manifest into a fresh
/// `<root>/<subcommand>-<timestamp>-<hash>` directory.
pub fn commit(
    root: &Path,
    subcommand: &str,
    flags: Vec<String>,
    config: &ExperimentConfig,
    artifacts: &[Artifact],
    warnings: Vec<String>,
) -> anyhow::Result<PathBuf> {
    let hash = config.hash();
    let now = chrono::Utc::now();
    let stamp = now.format("%Y%m%dT%H%M%SZ").to_string();
    fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    let base = root.join(format!("{subcommand}-{stamp}-{hash}"));
    let mut dir = base.clone();
    let mut k = 1;
    while dir.exists() {
        dir = PathBuf::from(format!("{}-{k}", base.display()));
        k += 1;
    }
    fs::create_dir(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    for a in artifacts {
        let name = a.file_name(&hash);
        fs::write(dir.join(&name), &a.content).with_context(|| format!("writing {name}"))?;
        files.push(FileEntry { name, sha256: hex::encode(Sha256::digest(a.content.as_bytes())) });
    }
    let manifest = Manifest {
        tool: "qns".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        library_version: qspace_version().into(),
        subcommand: subcommand.into(),
        flags,
        config_hash: hash.clone(),
        config: config.clone(),
        warnings,
        files,
        timestamp: now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let m = json_artifact("manifest", &manifest);
    fs::write(dir.join(m.file_name(&hash)), &m.content).context("writing manifest")?;
    Ok(dir)
}

fn qspace_version() -> &'static str {
    // the library shares the workspace version
    env!("CARGO_PKG_VERSION")
}

pub fn manifest_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("manifest-{hash}.json"))
}

/// Token-wise comparison: numbers agree to `rel` relative, everything else
/// exactly. Returns a description of the first difference.
pub fn compare_text(a: &str, b: &str, rel: f64) -> Option<String> {
    let split = |s: &str| -> Vec<String> {
        s.split(|c: char| c.is_whitespace() || c == ',' || c == ':' || c == '[' || c == ']' || c == '{' || c == '}')
            .filter(|t| !t.is_empty())
            .map(|t| t.to_string())
            .collect()
    };
    let (ta, tb) = (split(a), split(b));
    if ta.len() != tb.len() {
        return Some(format!("token count {} vs {}", ta.len(), tb.len()));
    }
    for (i, (x, y)) in ta.iter().zip(&tb).enumerate() {
        if x == y {
            continue;
        }
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(p), Ok(q)) if (p - q).abs() <= rel * p.abs().max(q.abs()) => {}
            _ => return Some(format!("token {i}: {x} vs {y}")),
        }
    }
    None
}
