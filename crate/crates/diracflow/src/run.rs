//! Run orchestration: execute a validated scenario, write its artifacts
//! and collect the per-invariant checklist of the modules it exercises.

use crate::causal::{
    build_functional_basis, field_equivariance_test, integrate_field, sector_effectivities,
    CausalPipeline, ConfigGrid, FieldStatus,
};
use crate::error::{Error, Result};
use crate::export::{sha256_file, status_label, trajectory_table, write_json, CsvTable};
use crate::gamma::GammaSet;
use crate::multiwave::FockWave;
use crate::scenario::{resolve, EnsembleSpace, GridSpec, Resolved, RunSpec, Scenario};
use crate::trajectory::{equivariance_test, integrate, node_epsilon, JointConfig};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One named invariant with its measured value; `value <= threshold`
/// must hold for the check to pass (binary checks use value in {0, 1}
/// against threshold 0).
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InvariantCheck {
    fn residual(name: &str, value: f64, threshold: f64) -> Self {
        InvariantCheck {
            name: name.into(),
            value,
            threshold,
            passed: value.is_finite() && value <= threshold,
            note: None,
        }
    }

    fn flag(name: &str, ok: bool, note: Option<String>) -> Self {
        InvariantCheck {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            passed: ok,
            note,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub invariants: Vec<InvariantCheck>,
    pub artifacts: Vec<ArtifactEntry>,
    /// wall-clock only; excluded from the determinism contract
    pub elapsed_ms: f64,
    pub passed: bool,
}

struct RunContext<'a> {
    out_dir: &'a Path,
    invariants: Vec<InvariantCheck>,
    artifacts: Vec<ArtifactEntry>,
}

impl RunContext<'_> {
    fn record_artifact(&mut self, name: &str) -> Result<()> {
        let sha256 = sha256_file(&self.out_dir.join(name))?;
        self.artifacts.push(ArtifactEntry { file: name.into(), sha256 });
        Ok(())
    }

    fn write_csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        table.write(&self.out_dir.join(name))?;
        self.record_artifact(name)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json(&self.out_dir.join(name), value)?;
        self.record_artifact(name)
    }
}

/// Execute the scenario, writing artifacts and `report.json` into
/// `out_dir`. Identical (scenario, seed) inputs produce byte-identical
/// numeric artifacts; only the report's timing field varies.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunReport> {
    let started = Instant::now();
    let resolved = resolve(scenario)?;
    std::fs::create_dir_all(out_dir)?;
    let mut ctx = RunContext { out_dir, invariants: Vec::new(), artifacts: Vec::new() };

    match &scenario.run {
        RunSpec::DiracTrajectories { time, starts } | RunSpec::Multiparticle { time, starts } => {
            run_corpuscles(&resolved, time.t0, time.t1, time.dt, starts, &mut ctx)?
        }
        RunSpec::FockEvolve { time } => {
            run_fock_evolve(scenario, &resolved, time.t0, time.t1, time.dt, &mut ctx)?
        }
        RunSpec::CausalField { grid, time, phi0 } => {
            run_causal_field(&resolved, grid, time.t0, time.t1, time.dt, phi0, false, &mut ctx)?
        }
        RunSpec::Effectivity { grid, time, phi0 } => {
            run_causal_field(&resolved, grid, time.t0, time.t1, time.dt, phi0, true, &mut ctx)?
        }
        RunSpec::Equivariance { space, time, m, grid, axis } => {
            let seed = scenario.seed.expect("validated: sampling runs carry a seed");
            match space {
                EnsembleSpace::Corpuscle => run_corpuscle_equivariance(
                    &resolved, *m, time.t0, time.t1, time.dt, seed, &mut ctx,
                )?,
                EnsembleSpace::Field => {
                    let grid = grid.as_ref().expect("validated: field equivariance has a grid");
                    run_field_equivariance(
                        &resolved, grid, *m, time.t0, time.t1, time.dt, seed, *axis, &mut ctx,
                    )?
                }
            }
        }
    }

    let passed = ctx.invariants.iter().all(|c| c.passed);
    let report = RunReport {
        scenario: scenario.clone(),
        invariants: ctx.invariants,
        artifacts: ctx.artifacts,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        passed,
    };
    write_json(&out_dir.join("report.json"), &report)?;
    Ok(report)
}

fn unitarity_check(resolved: &Resolved, t1: f64) -> InvariantCheck {
    let propagator = crate::fock::Propagator::new(&resolved.hamiltonian);
    let drift = (propagator.coefficients_at(&resolved.c0, t1).norm() - resolved.c0.norm()).abs();
    InvariantCheck::residual("unitarity: norm drift over the run window", drift, 1e-12)
}

fn run_corpuscles(
    resolved: &Resolved,
    t0: f64,
    t1: f64,
    dt: f64,
    starts: &crate::scenario::StartsSpec,
    ctx: &mut RunContext,
) -> Result<()> {
    let gammas = GammaSet::dirac_pauli();
    let n_p = starts.particles.len();
    let n_a = starts.antiparticles.len();
    let wave = FockWave::new(
        &resolved.fock,
        &resolved.modes,
        resolved.c0.clone(),
        &resolved.hamiltonian,
        n_p,
        n_a,
    )?;
    let initial = JointConfig {
        particles: starts.particles.clone(),
        antiparticles: starts.antiparticles.clone(),
    };
    let eps = node_epsilon(&wave, t0, &gammas)?;
    let trajectory = integrate(&wave, &initial, t0, t1, dt, &gammas, eps)?;

    ctx.write_csv("trajectory.csv", &trajectory_table(&trajectory))?;
    ctx.invariants.push(unitarity_check(resolved, t1));
    ctx.invariants.push(InvariantCheck::flag(
        "trajectory: reached t1 without node or step-size aborts",
        trajectory.completed(),
        Some(status_label(&trajectory.status)),
    ));
    // the guidance density must stay clear of the node threshold on
    // every recorded step (aborts report their own flag above)
    let min_j0 = trajectory
        .steps
        .iter()
        .flat_map(|s| s.j0.iter())
        .fold(f64::INFINITY, |acc, &v| acc.min(v.abs()));
    ctx.invariants.push(InvariantCheck::flag(
        "guidance: |j0| above the node threshold along the path",
        min_j0 > eps,
        Some(format!("min |j0| = {min_j0:e}, threshold = {eps:e}")),
    ));
    Ok(())
}

fn run_fock_evolve(
    scenario: &Scenario,
    resolved: &Resolved,
    t0: f64,
    t1: f64,
    dt: f64,
    ctx: &mut RunContext,
) -> Result<()> {
    let propagator = crate::fock::Propagator::new(&resolved.hamiltonian);
    let dim = resolved.fock.dim();
    let mut columns: Vec<String> = vec!["t".into(), "norm".into()];
    columns.extend((0..dim).map(|k| format!("p{k}")));
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = CsvTable::new(&column_refs);

    let steps = ((t1 - t0) / dt).round() as usize;
    let mut norm_drift = 0.0f64;
    let mut modulus_drift = 0.0f64;
    let moduli0: Vec<f64> = resolved.c0.iter().map(|c| c.norm()).collect();
    for i in 0..=steps {
        let t = t0 + i as f64 * dt;
        let c = propagator.coefficients_at(&resolved.c0, t);
        let mut row = vec![t, c.norm()];
        row.extend(c.iter().map(|z| z.norm_sqr()));
        table.push(row);
        norm_drift = norm_drift.max((c.norm() - resolved.c0.norm()).abs());
        if matches!(scenario.hamiltonian, crate::scenario::HamiltonianSpec::Free) {
            for (z, m0) in c.iter().zip(&moduli0) {
                modulus_drift = modulus_drift.max((z.norm() - m0).abs());
            }
        }
    }
    ctx.write_csv("populations.csv", &table)?;
    ctx.invariants.push(InvariantCheck::residual(
        "unitarity: max norm drift over sampled times",
        norm_drift,
        1e-12,
    ));
    if matches!(scenario.hamiltonian, crate::scenario::HamiltonianSpec::Free) {
        ctx.invariants.push(InvariantCheck::residual(
            "free evolution: max |c_K| modulus drift",
            modulus_drift,
            1e-12,
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_causal_field(
    resolved: &Resolved,
    grid: &GridSpec,
    t0: f64,
    t1: f64,
    dt: f64,
    phi0: &[f64],
    with_effectivity: bool,
    ctx: &mut RunContext,
) -> Result<()> {
    let grid = ConfigGrid::new(grid.n, grid.lambda, grid.g);
    let basis = build_functional_basis(&resolved.fock, &grid)?;
    let pipeline = CausalPipeline::new(&basis, &resolved.hamiltonian, resolved.c0.clone());

    // pipeline invariants, measured at the midpoint of the run window
    // (t0 with real coefficients can make J vanish identically)
    let t_mid = 0.5 * (t0 + t1);
    let state = pipeline.state_at(t_mid)?;
    ctx.invariants.push(InvariantCheck::residual(
        "projected basis: Gram matrix deviation from identity",
        basis.gram_residual(),
        1e-8,
    ));
    ctx.invariants.push(InvariantCheck::residual(
        "normalization: |quadrature of rho - 1|",
        (state.rho_quadrature(&grid) - 1.0).abs(),
        1e-6,
    ));
    ctx.invariants.push(InvariantCheck::residual(
        "source solvability: |quadrature of J|",
        state.j_quadrature.abs(),
        1e-6,
    ));
    let j_max = state.source_j.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    ctx.invariants.push(InvariantCheck::residual(
        "Poisson solve: relative residual",
        if state.j_is_zero { 0.0 } else { state.poisson_residual / j_max },
        1e-8,
    ));
    let corr_max = state
        .correction_quadrature(&grid)
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    ctx.invariants.push(InvariantCheck::residual(
        "correction field: max |quadrature of (e + E)| per axis",
        corr_max,
        1e-10,
    ));
    ctx.invariants.push(InvariantCheck::residual(
        "continuity: max |d rho/dt + div(rho v)|",
        state.continuity_residual(&grid),
        1e-6,
    ));
    let mean_v = state.mean_velocity(&grid);
    let mean_v_oracle = pipeline.mean_velocity_from_coefficients(t_mid);
    let mean_v_err = mean_v
        .iter()
        .zip(&mean_v_oracle)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    ctx.invariants.push(InvariantCheck::residual(
        "mean velocity: quadrature of rho v vs coefficient dynamics",
        mean_v_err,
        1e-6,
    ));

    let trajectory = integrate_field(&pipeline, phi0, t0, t1, dt)?;
    let mut columns: Vec<String> = vec!["t".into()];
    columns.extend((0..grid.n).map(|a| format!("phi{a}")));
    columns.push("rho".into());
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let mut table = CsvTable::new(&column_refs);
    for step in &trajectory.steps {
        let mut row = vec![step.t];
        row.extend(step.phi.iter().copied());
        row.push(step.rho);
        table.push(row);
    }
    ctx.write_csv("field_trajectory.csv", &table)?;
    let status_note = match &trajectory.status {
        FieldStatus::Completed => "completed".to_string(),
        FieldStatus::GridExit { t } => format!("grid-exit at t={t}"),
        FieldStatus::NodeRegion { t } => format!("node-region at t={t}"),
    };
    ctx.invariants.push(InvariantCheck::flag(
        "field trajectory: reached t1 inside the grid and off nodes",
        trajectory.status == FieldStatus::Completed,
        Some(status_note),
    ));

    if with_effectivity {
        let sectors = {
            let mut s = basis.sectors.clone();
            s.sort_unstable();
            s.dedup();
            s
        };
        let mut columns: Vec<String> = vec!["t".into()];
        columns.extend(sectors.iter().map(|(p, a)| format!("e_{p}_{a}")));
        columns.push("sum".into());
        let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
        let mut table = CsvTable::new(&column_refs);
        let mut sum_residual = 0.0f64;
        for step in &trajectory.steps {
            let coeffs = pipeline.coefficients_at(step.t);
            let eff = sector_effectivities(&basis, &coeffs, &step.phi)?;
            let mut row = vec![step.t];
            let sum: f64 = eff.iter().map(|e| e.weight).sum();
            row.extend(eff.iter().map(|e| e.weight));
            row.push(sum);
            sum_residual = sum_residual.max((sum - 1.0).abs());
            table.push(row);
        }
        ctx.write_csv("effectivity.csv", &table)?;
        ctx.invariants.push(InvariantCheck::residual(
            "effectivity: max |sum over sectors - 1| along the path",
            sum_residual,
            1e-12,
        ));
    }
    Ok(())
}

fn run_corpuscle_equivariance(
    resolved: &Resolved,
    m: usize,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
    ctx: &mut RunContext,
) -> Result<()> {
    let gammas = GammaSet::dirac_pauli();
    // the validated initial state populates exactly one single-corpuscle
    // sector; pick whichever carries the weight
    let pop_particle = resolved
        .fock
        .sector_indices(1, 0)
        .iter()
        .map(|&k| resolved.c0[k].norm_sqr())
        .sum::<f64>();
    let (n_p, n_a) = if pop_particle > 0.5 { (1, 0) } else { (0, 1) };
    let wave = FockWave::new(
        &resolved.fock,
        &resolved.modes,
        resolved.c0.clone(),
        &resolved.hamiltonian,
        n_p,
        n_a,
    )?;
    let report = equivariance_test(&wave, m, t0, t1, dt, seed, &gammas)?;
    finish_equivariance(ctx, report, resolved, t1)
}

#[allow(clippy::too_many_arguments)]
fn run_field_equivariance(
    resolved: &Resolved,
    grid: &GridSpec,
    m: usize,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
    axis: usize,
    ctx: &mut RunContext,
) -> Result<()> {
    let grid = ConfigGrid::new(grid.n, grid.lambda, grid.g);
    let basis = build_functional_basis(&resolved.fock, &grid)?;
    let pipeline = CausalPipeline::new(&basis, &resolved.hamiltonian, resolved.c0.clone());
    let report = field_equivariance_test(&pipeline, m, t0, t1, dt, seed, axis)?;
    finish_equivariance(ctx, report, resolved, t1)
}

fn finish_equivariance(
    ctx: &mut RunContext,
    report: crate::trajectory::EquivarianceReport,
    resolved: &Resolved,
    t1: f64,
) -> Result<()> {
    let mut table = CsvTable::new(&["index", "position"]);
    for (i, &x) in report.final_positions.iter().enumerate() {
        table.push(vec![i as f64, x]);
    }
    ctx.write_csv("final_positions.csv", &table)?;
    ctx.write_json("equivariance.json", &report)?;
    ctx.invariants.push(unitarity_check(resolved, t1));
    ctx.invariants.push(InvariantCheck::residual(
        "equivariance: KS statistic vs the 1% critical value",
        report.ks,
        report.ks_critical,
    ));
    ctx.invariants.push(InvariantCheck::residual(
        "equivariance: excluded-trajectory fraction",
        report.excluded_fraction,
        0.01,
    ));
    Ok(())
}

/// Scenario files shipped with the crate, embedded so `presets list`
/// and the test suite can reach them from any working directory.
pub const SHIPPED_SCENARIOS: &[(&str, &str)] = &[
    ("one_positron_trajectory", include_str!("../scenarios/one_positron_trajectory.json")),
    ("pair_trajectories", include_str!("../scenarios/pair_trajectories.json")),
    ("fock_rabi", include_str!("../scenarios/fock_rabi.json")),
    ("causal_mixing", include_str!("../scenarios/causal_mixing.json")),
    ("effectivity_tail", include_str!("../scenarios/effectivity_tail.json")),
    ("equivariance_particles", include_str!("../scenarios/equivariance_particles.json")),
    ("equivariance_field", include_str!("../scenarios/equivariance_field.json")),
];

pub fn shipped_scenario(name: &str) -> Option<Scenario> {
    SHIPPED_SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .and_then(|(_, text)| Scenario::from_json(text).ok())
}

/// Run a scenario through an optional rayon pool of the requested size;
/// results are schedule-independent, so the pool only affects speed.
pub fn run_scenario_with_threads(
    scenario: &Scenario,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<RunReport> {
    match threads {
        None => run_scenario(scenario, out_dir),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidScenario(vec![format!("--threads: {e}")]))?;
            pool.install(|| run_scenario(scenario, out_dir))
        }
    }
}

/// Default artifact directory for a scenario: `<base>/<scenario name>`.
pub fn artifact_dir(base: &Path, scenario: &Scenario) -> PathBuf {
    base.join(&scenario.name)
}
