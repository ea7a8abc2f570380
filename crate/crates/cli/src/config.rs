use anyhow::{bail, Context};
use qspace::fields::{corpus_specs, FieldSpec};
use qspace::solver::SolverConfig;
use qspace::spaces::{BallFamily, TimeMesh};
use qspace::Grid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;

/// Experiment configuration. Every optional key is filled in by
/// [`ExperimentConfig::materialize`] so the manifest records the values
/// actually used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub balls: BallSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub corpus: CorpusSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_dims: usize,
    pub resolution: usize,
    pub box_length: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n_dims: 2, resolution: 64, box_length: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallSection {
    pub dyadic_radii: usize,
    pub stride_factor: f64,
}

impl Default for BallSection {
    fn default() -> Self {
        Self { dyadic_radii: 4, stride_factor: 0.5 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    /// Carleson mesh; `None` takes the grid default (`(L/8)²`, `2^{-1/2}`, 24).
    pub carleson_cap: Option<f64>,
    pub carleson_ratio: Option<f64>,
    pub carleson_levels: Option<usize>,
    /// Tent mesh; `None` takes the grid default (`L/8`, `2^{-1/2}`, 48).
    pub tent_cap: Option<f64>,
    pub tent_ratio: Option<f64>,
    pub tent_levels: Option<usize>,
    /// Truncation `T` of the `Q_α^{-1}` norms; defaults to the Carleson cap.
    pub horizon: Option<f64>,
    /// Decreasing `T` list of `vanish`; defaults to the cap times `4^{-j}`.
    pub vanish_horizons: Option<Vec<f64>>,
    /// Levels of the trajectory mesh used by `lemmas` (cap 1).
    pub lemma_levels: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Divergence-free initial data as a field spec string.
    pub initial: Option<String>,
    pub alpha: Option<f64>,
    pub horizon: Option<f64>,
    pub picard_iterations: Option<usize>,
    pub mesh_ratio: Option<f64>,
    pub mesh_levels: Option<usize>,
    pub smallness_threshold: Option<f64>,
    pub substeps: Option<usize>,
    /// Probe times of the mild residual; defaults to every eighth sample.
    pub probes: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    /// Entries `name=spec` or bare specs; `None` is the six-field corpus.
    pub fields: Option<Vec<String>>,
    pub alphas: Option<Vec<f64>>,
    /// Number of seeded trajectories of `lemmas`.
    pub trajectories: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output root; `--out`, then `QNS_OUT`, then `qns-out`.
    pub root: Option<String>,
}

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub alphas: Option<Vec<f64>>,
}

pub const DEFAULT_ALPHAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).context("invalid configuration")
    }

    /// Minimal configuration with every default.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            grid: GridSection::default(),
            balls: BallSection::default(),
            time: TimeSection::default(),
            solver: SolverSection::default(),
            corpus: CorpusSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = o.resolution {
            self.grid.resolution = r;
        }
        if let Some(a) = &o.alphas {
            self.corpus.alphas = Some(a.clone());
        }
    }

    /// Fills every default and validates the result. The output root is
    /// left untouched: it does not influence any computed value.
    pub fn materialize(mut self) -> anyhow::Result<Self> {
        let grid = self.grid()?;
        let l = grid.box_length();
        let cm = TimeMesh::carleson_default(&grid);
        let tm = TimeMesh::tent_default(&grid);
        let t = &mut self.time;
        t.carleson_cap.get_or_insert(cm.t_cap());
        t.carleson_ratio.get_or_insert(cm.ratio());
        t.carleson_levels.get_or_insert(cm.levels());
        t.tent_cap.get_or_insert(tm.t_cap());
        t.tent_ratio.get_or_insert(tm.ratio());
        t.tent_levels.get_or_insert(tm.levels());
        let cap = t.carleson_cap.unwrap();
        t.horizon.get_or_insert(cap);
        t.vanish_horizons.get_or_insert_with(|| (0..6).map(|j| cap * 0.25f64.powi(j)).collect());
        t.lemma_levels.get_or_insert(40);
        let c = &mut self.corpus;
        c.fields.get_or_insert_with(|| corpus_specs().into_iter().map(|(n, s)| format!("{n}={s}")).collect());
        c.alphas.get_or_insert_with(|| DEFAULT_ALPHAS.to_vec());
        c.trajectories.get_or_insert(10);
        let horizon = self.solver.horizon.unwrap_or(0.1 * l * l / (4.0 * PI * PI));
        let d = SolverConfig::defaults(&grid, horizon);
        let s = &mut self.solver;
        s.initial.get_or_insert_with(|| "tg2:a=10".into());
        s.alpha.get_or_insert(d.alpha);
        s.horizon.get_or_insert(horizon);
        s.picard_iterations.get_or_insert(d.picard_iterations);
        s.mesh_ratio.get_or_insert(d.mesh_ratio);
        s.mesh_levels.get_or_insert(d.mesh_levels);
        s.smallness_threshold.get_or_insert(d.smallness_threshold);
        s.substeps.get_or_insert(d.substeps);
        if s.probes.is_none() {
            let mesh = self.solver_config()?.mesh()?;
            self.solver.probes = Some(mesh.samples().into_iter().step_by(8).collect());
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> anyhow::Result<()> {
        self.family()?;
        self.carleson_mesh()?;
        self.tent_mesh()?;
        let sc = self.solver_config()?;
        sc.validate()?;
        if let Some(p) = &self.solver.probes {
            if p.is_empty() || p.iter().any(|t| !(*t > 0.0 && *t <= sc.horizon)) {
                bail!("solver.probes must be non-empty and lie in (0, horizon]");
            }
        }
        self.initial()?;
        self.fields()?;
        let alphas = self.alphas();
        if alphas.is_empty() || alphas.iter().any(|a| !(0.0..1.0).contains(a)) {
            bail!("alphas must be a non-empty list in [0,1), got {alphas:?}");
        }
        let h = self.time.vanish_horizons.as_deref().unwrap_or_default();
        if h.is_empty() || h.iter().any(|t| !(*t > 0.0)) || h.windows(2).any(|w| w[1] >= w[0]) {
            bail!("vanish_horizons must be positive and strictly decreasing");
        }
        if !(self.time.horizon.unwrap_or(1.0) > 0.0) {
            bail!("time.horizon must be positive");
        }
        let lv = self.time.lemma_levels.unwrap_or(40);
        if lv < 12 {
            bail!("lemma_levels must be at least 12");
        }
        if self.corpus.trajectories == Some(0) {
            bail!("corpus.trajectories must be positive");
        }
        Ok(())
    }

    pub fn grid(&self) -> anyhow::Result<Grid> {
        Ok(Grid::new(self.grid.n_dims, self.grid.resolution, self.grid.box_length)?)
    }

    pub fn family(&self) -> anyhow::Result<BallFamily> {
        Ok(BallFamily::new(&self.grid()?, self.balls.dyadic_radii, self.balls.stride_factor)?)
    }

    pub fn carleson_mesh(&self) -> anyhow::Result<TimeMesh> {
        let d = TimeMesh::carleson_default(&self.grid()?);
        let t = &self.time;
        Ok(TimeMesh::new(
            t.carleson_cap.unwrap_or(d.t_cap()),
            t.carleson_ratio.unwrap_or(d.ratio()),
            t.carleson_levels.unwrap_or(d.levels()),
        )?)
    }

    pub fn tent_mesh(&self) -> anyhow::Result<TimeMesh> {
        let d = TimeMesh::tent_default(&self.grid()?);
        let t = &self.time;
        Ok(TimeMesh::new(
            t.tent_cap.unwrap_or(d.t_cap()),
            t.tent_ratio.unwrap_or(d.ratio()),
            t.tent_levels.unwrap_or(d.levels()),
        )?)
    }

    pub fn lemma_mesh(&self) -> anyhow::Result<TimeMesh> {
        Ok(TimeMesh::new(1.0, std::f64::consts::FRAC_1_SQRT_2, self.time.lemma_levels.unwrap_or(40))?)
    }

    pub fn horizon(&self) -> f64 {
        self.time.horizon.expect("materialized")
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.corpus.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec())
    }

    /// Named corpus entries.
    pub fn fields(&self) -> anyhow::Result<Vec<(String, FieldSpec)>> {
        let list = match &self.corpus.fields {
            Some(l) => l.clone(),
            None => corpus_specs().into_iter().map(|(n, s)| format!("{n}={s}")).collect(),
        };
        let mut out: Vec<(String, FieldSpec)> = Vec::new();
        for entry in list {
            let (name, spec) = match entry.split_once('=') {
                Some((n, s)) if !n.contains(':') => (n.trim().to_string(), s.trim()),
                _ => (entry.trim().to_string(), entry.trim()),
            };
            let spec: FieldSpec = spec.parse().with_context(|| format!("corpus entry {entry:?}"))?;
            if out.iter().any(|(n, _)| *n == name) {
                bail!("duplicate corpus name {name:?}");
            }
            out.push((name, spec));
        }
        Ok(out)
    }

    pub fn solver_config(&self) -> anyhow::Result<SolverConfig> {
        let grid = self.grid()?;
        let l = grid.box_length();
        let s = &self.solver;
        let d = SolverConfig::defaults(&grid, s.horizon.unwrap_or(0.1 * l * l / (4.0 * PI * PI)));
        Ok(SolverConfig {
            alpha: s.alpha.unwrap_or(d.alpha),
            picard_iterations: s.picard_iterations.unwrap_or(d.picard_iterations),
            mesh_ratio: s.mesh_ratio.unwrap_or(d.mesh_ratio),
            mesh_levels: s.mesh_levels.unwrap_or(d.mesh_levels),
            smallness_threshold: s.smallness_threshold.unwrap_or(d.smallness_threshold),
            substeps: s.substeps.unwrap_or(d.substeps),
            seed: self.seed,
            ..d
        })
    }

    pub fn initial(&self) -> anyhow::Result<FieldSpec> {
        let s = self.solver.initial.as_deref().unwrap_or("tg2:a=10");
        let spec: FieldSpec = s.parse().context("solver.initial")?;
        if !spec.is_vector() {
            bail!("solver.initial must be a vector field spec, got {s:?}");
        }
        Ok(spec)
    }

    /// Canonical JSON of the configuration without the output root.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        serde_json::to_string(&c).expect("config serializes")
    }

    /// First 12 hex digits of the SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        hex::encode(digest)[..12].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory_and_unknown_keys_fail() {
        assert!(ExperimentConfig::parse("[grid]\nresolution = 32\n").is_err());
        assert!(ExperimentConfig::parse("seed = 1\n[grid]\nresolutoin = 32\n").is_err());
        assert!(ExperimentConfig::parse("seed = 1\ncolour = 2\n").is_err());
        let c = ExperimentConfig::parse("seed = 3\n[grid]\nresolution = 32\n").unwrap();
        assert_eq!(c.grid.resolution, 32);
    }

    #[test]
    fn materialized_defaults_are_stable() {
        let a = ExperimentConfig::with_seed(1).materialize().unwrap();
        let b = a.clone().materialize().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.fields().unwrap().len(), 6);
        let mut c = a.clone();
        c.output.root = Some("/elsewhere".into());
        assert_eq!(c.hash(), a.hash());
        c.seed = 2;
        assert_ne!(c.hash(), a.hash());
    }

    #[test]
    fn corpus_entries_parse() {
        let mut c = ExperimentConfig::with_seed(1);
        c.corpus.fields = Some(vec!["b=bump:w=0.02".into(), "mode:kx=2".into()]);
        let f = c.fields().unwrap();
        assert_eq!(f[0].0, "b");
        assert_eq!(f[1].0, "mode:kx=2");
        c.corpus.fields = Some(vec!["nope".into()]);
        assert!(c.materialize().is_err());
    }
}
