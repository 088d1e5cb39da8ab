use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use jfilter::cartan::{AnsatzFile, DecomposeOptions};
use jfilter::pauli::{build_j_squared, complexity_histogram, one_body_pauli, Axis, ComplexityHistogram, PauliSum};
use jfilter::projection::{run_projection, weight_at, weights_csv, ProjectionSetup, Target};
use jfilter::resources::{t_count, trotter_step_cnots, GateBudget, ResourceReport};
use jfilter::spmodel::{DeformedBasis, ModelSpace, Species};
use serde::Serialize;
use serde_json::json;

use crate::config::{DeformationSource, LoadedConfig, RunConfig};

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, text)
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Serialize)]
struct SpeciesAnsatz {
    species: Species,
    ansatz: AnsatzFile,
}

#[derive(Serialize)]
struct ShellAnsatz {
    species: Species,
    j: f64,
    ansatz: AnsatzFile,
}

fn decompose_options(config: &RunConfig) -> DecomposeOptions {
    let mut opts = DecomposeOptions::new::<f64>(config.seed);
    opts.residual_tol = config.tolerances.residual;
    opts
}

fn setup(loaded: &LoadedConfig, space: &ModelSpace, basis: &DeformedBasis<f64>) -> Result<ProjectionSetup<f64>> {
    let config = &loaded.config;
    Ok(ProjectionSetup::new(space, basis, &decompose_options(config))?
        .with_backend(config.backend.resolve())
        .with_mode(config.mode)
        .with_oracle(loaded.oracle_fits(space, basis)))
}

fn jz_files(space: &ModelSpace, setup: &ProjectionSetup<f64>) -> Vec<SpeciesAnsatz> {
    space.blocks().iter().zip(&setup.jz_ansatz).map(|(b, a)| SpeciesAnsatz { species: b.species, ansatz: a.to_file() }).collect()
}

fn summary_base(loaded: &LoadedConfig) -> serde_json::Value {
    let source = loaded.source.as_ref().and_then(|(_, text)| serde_json::from_str::<serde_json::Value>(text).ok());
    json!({
        "version": jfilter::VERSION,
        "config": loaded.config,
        "config_source": source,
    })
}

/// Runs the projection; `Ok(true)` iff the final `<J^2>` meets the
/// configured threshold.
pub fn project(loaded: &LoadedConfig) -> Result<bool> {
    let config = &loaded.config;
    let space = loaded.space()?;
    let basis = loaded.basis(&space)?;
    let schedule = loaded.schedule(&basis)?;
    let setup = setup(loaded, &space, &basis)?;
    let rec = run_projection(&setup, &schedule, config.return_deformed)?;
    let dir = &config.output_dir;
    prepare(dir)?;
    write(dir, "record.csv", rec.to_csv())?;
    match &rec.final_weights {
        Some(w) => write(dir, "weights.csv", weights_csv(w))?,
        None => write(dir, "weights.csv", "J,M,weight\n")?,
    }
    write_json(dir, "ansatz_jz.json", &jz_files(&space, &setup))?;

    let reference = match schedule.target {
        Target::J0 => 0.0,
        Target::Jhalf { .. } => 0.75,
    };
    let deviation = (rec.final_j2() - reference).abs();
    let converged = rec.succeeded() && deviation <= config.tolerances.j2_threshold;
    let mut summary = summary_base(loaded);
    let initial_target = rec.initial_weights.as_ref().map(|w| match schedule.target {
        Target::J0 => weight_at(w, 0.0, 0.0),
        Target::Jhalf { .. } => weight_at(w, 0.5, 0.5) + weight_at(w, 0.5, -0.5),
    });
    let extra = json!({
        "measurements": rec.rows.len(),
        "initial_j2": rec.initial_j2,
        "final_j2": rec.final_j2(),
        "final_jz": rec.final_jz(),
        "cumulative_probability": rec.cumulative_probability(),
        "initial_target_weight": initial_target,
        "converged_after": rec.converged_after(config.tolerances.j2_threshold + reference),
        "failed_at": rec.failed_at,
        "j2_threshold": config.tolerances.j2_threshold,
        "converged": converged,
        "residuals": {
            "jz": setup.jz_ansatz.iter().map(|a| a.residual).collect::<Vec<_>>(),
            "jx": setup.jx_ansatz.iter().map(|a| a.residual).collect::<Vec<_>>(),
        },
        "backend": setup.backend,
        "oracle": setup.oracle,
    });
    if let (Some(obj), Some(add)) = (summary.as_object_mut(), extra.as_object()) {
        obj.extend(add.clone());
    }
    write_json(dir, "summary.json", &summary)?;
    Ok(converged)
}

fn load_operator(loaded: &LoadedConfig, path: &Path) -> Result<PauliSum<f64>> {
    let base = loaded.source.as_ref().and_then(|(p, _)| p.parent().map(Path::to_path_buf)).unwrap_or_default();
    let full = base.join(path);
    let text = fs::read_to_string(&full).with_context(|| format!("reading operator {}", full.display()))?;
    Ok(PauliSum::from_text(&text).with_context(|| format!("parsing operator {}", full.display()))?)
}

pub fn resources(loaded: &LoadedConfig) -> Result<()> {
    let config = &loaded.config;
    let rc = &config.resources;
    let space = loaded.space()?;
    let trotter = match (&rc.operator_file, &config.deformation) {
        (Some(path), _) => Some(trotter_step_cnots(&load_operator(loaded, path)?)),
        (None, DeformationSource::Spherical) => None,
        (None, _) => {
            let basis = loaded.basis(&space)?;
            Some(trotter_step_cnots(&build_j_squared(&space, Some(&basis))?))
        }
    };
    let epsilon = *rc.epsilons.first().ok_or_else(|| loaded.at("epsilons", "at least one epsilon is required"))?;
    let mut reports = Vec::new();
    for &(p, i) in &rc.partitions {
        let mut budget = GateBudget::for_space(&space, p, i).map_err(|e| loaded.at("model_space", e))?;
        budget.include_final_deformed_return = rc.include_final_deformed_return;
        budget.trial_in_spherical_basis = rc.trial_in_spherical_basis;
        reports.push(ResourceReport::new(budget, epsilon, trotter).map_err(|e| loaded.at("resources", e))?);
    }
    let mut sweep = Vec::new();
    for &eps in &rc.epsilons {
        let counts = reports
            .iter()
            .map(|r| t_count(r.single_qubit.rz_theta, eps))
            .collect::<jfilter::Result<Vec<_>>>()
            .map_err(|e| loaded.at("epsilons", e))?;
        sweep.push(json!({ "epsilon": eps, "t_count": counts }));
    }
    let dir = &config.output_dir;
    prepare(dir)?;
    write(dir, "table.csv", jfilter::resources::table_csv(&reports))?;
    let mut out = summary_base(loaded);
    if let Some(obj) = out.as_object_mut() {
        obj.insert("reports".into(), serde_json::to_value(&reports)?);
        obj.insert("t_sweep".into(), serde_json::Value::Array(sweep));
    }
    write_json(dir, "resources.json", &out)
}

#[derive(Serialize)]
struct OperatorCounts {
    terms: usize,
    max_complexity: usize,
    histogram: ComplexityHistogram,
}

pub fn analyze(loaded: &LoadedConfig) -> Result<()> {
    let config = &loaded.config;
    let space = loaded.space()?;
    let basis = loaded.basis(&space)?;
    let mut ops: Vec<(&str, PauliSum<f64>)> = Vec::new();
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let name = match axis {
            Axis::X => "Jx",
            Axis::Y => "Jy",
            Axis::Z => "Jz",
        };
        ops.push((name, one_body_pauli(&space, Some(&basis), axis)?));
    }
    ops.push(("J2", build_j_squared(&space, Some(&basis))?));
    let mut csv = String::from("operator,complexity,count,percent\n");
    let mut counts = serde_json::Map::new();
    for (name, op) in &ops {
        let hist = complexity_histogram(op);
        let total: usize = hist.values().sum();
        for (&nc, &c) in &hist {
            csv.push_str(&format!("{name},{nc},{c},{:.6}\n", 100.0 * c as f64 / total.max(1) as f64));
        }
        let entry = OperatorCounts { terms: total, max_complexity: hist.keys().max().copied().unwrap_or(0), histogram: hist };
        counts.insert(name.to_string(), serde_json::to_value(entry)?);
    }
    let dir = &config.output_dir;
    prepare(dir)?;
    write(dir, "histogram.csv", csv)?;
    let mut out = summary_base(loaded);
    if let Some(obj) = out.as_object_mut() {
        obj.insert("operators".into(), serde_json::Value::Object(counts));
    }
    write_json(dir, "counts.json", &out)
}

pub fn decompose(loaded: &LoadedConfig) -> Result<()> {
    let config = &loaded.config;
    let space = loaded.space()?;
    let basis = loaded.basis(&space)?;
    let setup = ProjectionSetup::new(&space, &basis, &decompose_options(config))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut jx = Vec::new();
    for (shell, a) in space.shells().iter().zip(&setup.jx_ansatz) {
        if seen.insert(shell.two_j) {
            let mut file = a.to_file();
            file.offset = 0;
            jx.push(ShellAnsatz { species: shell.species, j: shell.j(), ansatz: file });
        }
    }
    let dir = &config.output_dir;
    prepare(dir)?;
    write_json(dir, "ansatz_jz.json", &jz_files(&space, &setup))?;
    write_json(dir, "ansatz_jx.json", &jx)?;
    let mut out = summary_base(loaded);
    if let Some(obj) = out.as_object_mut() {
        obj.insert("jz_residuals".into(), json!(setup.jz_ansatz.iter().map(|a| a.residual).collect::<Vec<_>>()));
        obj.insert("jx_residuals".into(), json!(jx.iter().map(|s| (s.j, s.ansatz.residual)).collect::<Vec<_>>()));
    }
    write_json(dir, "decomposition.json", &out)
}
