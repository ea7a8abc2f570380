use anyhow::Context;
use qspace::duhamel::{lemma23_check, lemma24_check, schur_kernel_integrals};
use qspace::fields::generate;
use qspace::io::{field_to_string, write_trajectory};
use qspace::solver::{cross_check_against, div_representation, mild_residual, picard_solve};
use qspace::spaces::{
    besov_norm, bmo_seminorm, campanato_seminorm, morrey_norm, q_alpha_seminorm, q_inverse_norm,
    tent_characterization, vanishing_profile,
};
use qspace::spectral::TentChoice;
use qspace::{Frame, ScalarField, Trajectory};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{json_artifact, num, AlphaLabel, Artifact, Report, Table};

/// Schur table grid: the kernel bound is checked on these.
pub const SCHUR_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.95];
pub const SCHUR_ZETAS: [f64; 4] = [1.0, 4.0, 16.0, 64.0];
pub const SCHUR_TIMES: [f64; 4] = [1e-4, 1e-2, 1.0, 1e2];
pub const SCHUR_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Gen,
    Norms,
    Equiv,
    Inclusions,
    Lemmas { schur: bool },
    Divrep,
    Solve,
    Vanish,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Norms => "norms",
            Command::Equiv => "equiv",
            Command::Inclusions => "inclusions",
            Command::Lemmas { .. } => "lemmas",
            Command::Divrep => "divrep",
            Command::Solve => "solve",
            Command::Vanish => "vanish",
        }
    }

    pub fn flags(self) -> Vec<String> {
        match self {
            Command::Lemmas { schur: true } => vec!["--schur".into()],
            _ => Vec::new(),
        }
    }

    pub fn parse(name: &str, flags: &[String]) -> anyhow::Result<Self> {
        Ok(match name {
            "gen" => Command::Gen,
            "norms" => Command::Norms,
            "equiv" => Command::Equiv,
            "inclusions" => Command::Inclusions,
            "lemmas" => Command::Lemmas { schur: flags.iter().any(|f| f == "--schur") },
            "divrep" => Command::Divrep,
            "solve" => Command::Solve,
            "vanish" => Command::Vanish,
            other => anyhow::bail!("unknown subcommand {other:?}"),
        })
    }
}

#[derive(Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

pub fn execute(cmd: Command, config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Gen => gen(config),
        Command::Norms => norms(config),
        Command::Equiv => equiv(config),
        Command::Inclusions => inclusions(config),
        Command::Lemmas { schur } => lemmas(config, schur),
        Command::Divrep => divrep(config),
        Command::Solve => solve(config),
        Command::Vanish => vanish(config),
    }
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

/// Corpus as scalar fields; vector entries contribute their first component.
fn scalar_corpus(config: &ExperimentConfig) -> anyhow::Result<Vec<(String, ScalarField)>> {
    let grid = config.grid()?;
    config
        .fields()?
        .into_iter()
        .map(|(name, spec)| {
            let f = match generate(&spec, &grid).with_context(|| format!("generating {name}"))? {
                Frame::Scalar(f) => f,
                Frame::Vector(v) => v.into_components().swap_remove(0),
            };
            Ok((name, f))
        })
        .collect()
}

fn gen(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let grid = config.grid()?;
    let mut out = Outcome::default();
    for (name, spec) in config.fields()? {
        let frame = generate(&spec, &grid).with_context(|| format!("generating {name}"))?;
        out.artifacts.push(Artifact {
            stem: format!("field_{}", file_stem(&name)),
            ext: "qnsf",
            content: field_to_string(&frame),
        });
    }
    Ok(out)
}

fn norms(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mesh = config.carleson_mesh()?;
    let t = config.horizon();
    let mut report = Report::new(config);
    for (name, f) in scalar_corpus(config)? {
        for &a in &config.alphas() {
            report.push(&name, "q_inverse", AlphaLabel::Value(a), Some(t), &q_inverse_norm(&f, a, t, &family, &mesh)?);
            report.push(&name, "q_alpha", AlphaLabel::Value(a), None, &q_alpha_seminorm(&f, a, &family)?);
            report.push(&name, "campanato", AlphaLabel::Value(a), None, &campanato_seminorm(&f, a, &family)?);
        }
        report.push(&name, "bmo", AlphaLabel::Value(0.0), None, &bmo_seminorm(&f, &family)?);
        report.push(&name, "morrey2", AlphaLabel::Limit, None, &morrey_norm(&f, 2, &family)?);
        report.push(&name, "besov", AlphaLabel::None, None, &besov_norm(&f, &mesh)?);
    }
    Ok(Outcome { artifacts: report.artifacts("norms"), warnings: Vec::new() })
}

/// `(min, max)` of the pairwise ratios, `None` if any entry vanishes.
fn ratio_spread(values: &[f64]) -> Option<(f64, f64)> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(0.0, f64::max);
    (lo > 0.0).then(|| (lo / hi, hi / lo))
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn equiv(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mesh = config.tent_mesh()?;
    let mut report = Report::new(config);
    let mut table = Table::new(&["field", "alpha", "tent_1a", "tent_1b", "tent_2a", "tent_2b", "min_ratio", "max_ratio"]);
    for (name, f) in scalar_corpus(config)? {
        for &a in &config.alphas() {
            let mut row = vec![name.clone(), num(a)];
            let mut vals = Vec::new();
            for choice in TentChoice::ALL {
                let e = tent_characterization(&f, a, choice, &family, &mesh)?;
                report.push(&name, &format!("tent_{}", choice.label()), AlphaLabel::Value(a), None, &e);
                row.push(num(e.value));
                vals.push(e.value);
            }
            let spread = ratio_spread(&vals);
            row.push(opt_cell(spread.map(|s| s.0)));
            row.push(opt_cell(spread.map(|s| s.1)));
            table.push(row);
        }
    }
    let mut artifacts = vec![table.artifact("equiv")];
    artifacts.extend(report.artifacts("tent_norms"));
    Ok(Outcome { artifacts, warnings: Vec::new() })
}

fn inclusions(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mesh = config.carleson_mesh()?;
    let t = config.horizon();
    let alphas = config.alphas();
    let mut header = vec!["field".to_string(), "quantity".to_string()];
    header.extend(alphas.iter().map(|a| format!("alpha={a}")));
    header.push("alpha=1(limit)".into());
    let mut wide = Table::with_header(header);
    let mut ordering = Table::new(&["field", "alpha1", "alpha2", "ratio"]);
    let mut besov = Table::new(&["field", "besov", "morrey2", "besov_over_morrey2"]);
    let mut report = Report::new(config);
    for (name, f) in scalar_corpus(config)? {
        let m = morrey_norm(&f, 2, &family)?;
        let qs = alphas
            .iter()
            .map(|&a| q_inverse_norm(&f, a, t, &family, &mesh))
            .collect::<qspace::Result<Vec<_>>>()?;
        let ratio = |x: f64, y: f64| if y > 0.0 { Some(x / y) } else { None };
        let mut values = vec![name.clone(), "q_inverse".into()];
        values.extend(qs.iter().map(|q| num(q.value)));
        values.push(num(m.value));
        wide.push(values);
        let mut ratios = vec![name.clone(), "q_inverse_over_morrey2".into()];
        ratios.extend(qs.iter().map(|q| opt_cell(ratio(q.value, m.value))));
        ratios.push(opt_cell(ratio(m.value, m.value)));
        wide.push(ratios);
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let (lo, hi) = if alphas[i] < alphas[j] { (i, j) } else { (j, i) };
                ordering.push(vec![
                    name.clone(),
                    num(alphas[lo]),
                    num(alphas[hi]),
                    opt_cell(ratio(qs[lo].value, qs[hi].value)),
                ]);
            }
        }
        let b = besov_norm(&f, &mesh)?;
        besov.push(vec![name.clone(), num(b.value), num(m.value), opt_cell(ratio(b.value, m.value))]);
        for (a, q) in alphas.iter().zip(&qs) {
            report.push(&name, "q_inverse", AlphaLabel::Value(*a), Some(t), q);
        }
        report.push(&name, "morrey2", AlphaLabel::Limit, None, &m);
        report.push(&name, "besov", AlphaLabel::None, None, &b);
    }
    let mut artifacts = vec![wide.artifact("inclusions"), ordering.artifact("alpha_ordering"), besov.artifact("besov")];
    artifacts.extend(report.artifacts("inclusion_norms"));
    Ok(Outcome { artifacts, warnings: Vec::new() })
}

/// Seeded lemma corpus: heat flows of mean-zero random fields on a mesh
/// with cap 1.
pub fn lemma_trajectories(config: &ExperimentConfig) -> anyhow::Result<Vec<(String, Trajectory)>> {
    let grid = config.grid()?;
    let mesh = config.lemma_mesh()?;
    let n = config.corpus.trajectories.unwrap_or(10);
    (0..n)
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let decay = 2.0 + (i % 3) as f64;
            let spec = qspace::fields::FieldSpec::RandomSmooth { seed, decay };
            let f = qspace::fields::generate_scalar(&spec, &grid)?;
            Ok((format!("heat_{spec}"), Trajectory::heat_flow(&f, &mesh)?))
        })
        .collect()
}

#[derive(Serialize)]
struct SchurSummary {
    sup_row: f64,
    sup_column: f64,
    tolerance: f64,
    bounded: bool,
}

fn lemmas(config: &ExperimentConfig, schur: bool) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mut l23 = Table::new(&["trajectory", "alpha", "lhs", "rhs", "ratio"]);
    let mut l24 = Table::new(&["trajectory", "alpha", "lhs", "j", "l1_part", "ratio"]);
    for (name, f) in lemma_trajectories(config)? {
        for &a in &config.alphas() {
            let r = lemma23_check(&f, a, f.mesh().t_cap())?;
            l23.push(vec![name.clone(), num(a), num(r.lhs), num(r.rhs), num(r.ratio)]);
            let r = lemma24_check(&f, a, &family)?;
            l24.push(vec![name.clone(), num(a), num(r.lhs), num(r.j), num(r.l1_part), num(r.ratio)]);
        }
    }
    let mut out = Outcome { artifacts: vec![l23.artifact("lemma23"), l24.artifact("lemma24")], warnings: Vec::new() };
    if schur {
        let mut table = Table::new(&["alpha", "zeta", "t", "row_mass", "column_mass"]);
        let (mut sup_row, mut sup_column) = (0.0f64, 0.0f64);
        for &a in &SCHUR_ALPHAS {
            let s = schur_kernel_integrals(a, &SCHUR_ZETAS, &SCHUR_TIMES)?;
            for e in &s.entries {
                table.push(vec![num(e.alpha), num(e.zeta), num(e.t), num(e.row_mass), num(e.column_mass)]);
            }
            sup_row = sup_row.max(s.sup_row);
            sup_column = sup_column.max(s.sup_column);
        }
        let bounded = sup_row <= 1.0 + SCHUR_TOL && sup_column <= 1.0 + SCHUR_TOL;
        if !bounded {
            out.warnings.push(format!("Schur masses exceed 1 + {SCHUR_TOL:e}: row {sup_row}, column {sup_column}"));
        }
        out.artifacts.push(table.artifact("schur"));
        out.artifacts.push(json_artifact("schur_summary", &SchurSummary { sup_row, sup_column, tolerance: SCHUR_TOL, bounded }));
    }
    Ok(out)
}

fn divrep(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mesh = config.carleson_mesh()?;
    let t = config.horizon();
    let n = config.grid.n_dims;
    let mut header = vec!["field", "alpha", "residual"];
    let comps = ["q_alpha_f1", "q_alpha_f2", "q_alpha_f3"];
    header.extend(&comps[..n]);
    header.extend(["q_inverse", "max_ratio"]);
    let mut table = Table::new(&header);
    for (name, f) in scalar_corpus(config)? {
        // the representation needs mean-zero data
        let f = f.add_constant(-f.mean());
        for &a in &config.alphas() {
            let rep = div_representation(&f, a, &family)?;
            let q = q_inverse_norm(&f, a, t, &family, &mesh)?.value;
            let mut row = vec![name.clone(), num(a), num(rep.reconstruction_residual)];
            row.extend(rep.component_estimates.iter().map(|e| num(e.value)));
            row.push(num(q));
            let worst = rep.component_estimates.iter().map(|e| e.value).fold(0.0, f64::max);
            row.push(opt_cell((q > 0.0).then(|| worst / q)));
            table.push(row);
        }
    }
    Ok(Outcome { artifacts: vec![table.artifact("divrep")], warnings: Vec::new() })
}

#[derive(Serialize)]
struct SolveSummary {
    initial: String,
    gate_passed: bool,
    data_morrey: f64,
    smallness_threshold: f64,
    contracts: bool,
    mild_residual: f64,
    cross_check: f64,
    probes: Vec<f64>,
}

fn solve(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let grid = config.grid()?;
    let spec = config.initial()?;
    let Frame::Vector(a) = generate(&spec, &grid)? else { anyhow::bail!("solver.initial must be a vector field") };
    let sc = config.solver_config()?;
    let (u, d) = picard_solve(&a, &sc)?;
    let mut diag = Table::new(&["iter", "X_alpha", "X_2n2", "X_42", "d_j", "contraction_flag"]);
    for j in 0..d.difference_decay.len() {
        diag.push(vec![
            j.to_string(),
            num(d.x_alpha[j]),
            num(d.x_2n2[j]),
            num(d.x_42[j]),
            num(d.difference_decay[j]),
            d.contraction_flags[j].to_string(),
        ]);
    }
    let probes = config.solver.probes.clone().expect("materialized");
    let residual = mild_residual(&u, &a, &probes)?;
    let cross = cross_check_against(&u, &a, sc.substeps)?;
    let contracts = d.contracts_from(2);
    let mut warnings = Vec::new();
    if !d.gate_passed {
        warnings.push(format!(
            "data Morrey norm {} exceeds the smallness threshold {}; no convergence claim",
            d.data_morrey, sc.smallness_threshold
        ));
    }
    if !contracts {
        warnings.push("difference decay did not contract by 1/2 from j = 2 on".into());
    }
    let mut traj = Vec::new();
    write_trajectory(&mut traj, &u)?;
    let summary = SolveSummary {
        initial: spec.to_string(),
        gate_passed: d.gate_passed,
        data_morrey: d.data_morrey,
        smallness_threshold: sc.smallness_threshold,
        contracts,
        mild_residual: residual,
        cross_check: cross,
        probes,
    };
    let mut artifacts = vec![
        diag.artifact("diagnostics"),
        json_artifact("solve_summary", &summary),
        Artifact { stem: "trajectory".into(), ext: "qnst", content: String::from_utf8(traj).expect("ascii") },
    ];
    if !warnings.is_empty() {
        artifacts.push(json_artifact("warnings", &warnings));
    }
    Ok(Outcome { artifacts, warnings })
}

fn vanish(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let family = config.family()?;
    let mesh = config.carleson_mesh()?;
    let horizons = config.time.vanish_horizons.clone().expect("materialized");
    let mut report = Report::new(config);
    for (name, f) in scalar_corpus(config)? {
        for &a in &config.alphas() {
            for (t, e) in vanishing_profile(&f, a, &horizons, &family, &mesh)? {
                report.push(&name, "q_inverse", AlphaLabel::Value(a), Some(t), &e);
            }
        }
    }
    Ok(Outcome { artifacts: report.artifacts("vanish"), warnings: Vec::new() })
}
