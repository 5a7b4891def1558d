//! Field trajectories: integral curves of the equivariant velocity v on
//! the configuration grid, advanced in lockstep so one set of grid
//! fields per RK4 stage serves the whole ensemble.

use crate::causal::grid::ConfigGrid;
use crate::causal::pipeline::{CausalFieldState, CausalPipeline};
use crate::error::Result;
use crate::stats::{ks_critical, ks_statistic, TabulatedCdf};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldStatus {
    Completed,
    GridExit { t: f64 },
    NodeRegion { t: f64 },
}

#[derive(Debug, Clone)]
pub struct FieldStep {
    pub t: f64,
    pub phi: Vec<f64>,
    /// interpolated density along the path
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub struct FieldTrajectory {
    pub steps: Vec<FieldStep>,
    pub status: FieldStatus,
}

impl FieldTrajectory {
    pub fn completed(&self) -> bool {
        self.status == FieldStatus::Completed
    }
}

/// Multilinear interpolation of a grid field at a continuous point.
/// Corner indices wrap periodically; the fields of interest decay to
/// roundoff well before the box edge.
fn interpolate(field: &ndarray::ArrayD<f64>, grid: &ConfigGrid, point: &[f64]) -> f64 {
    let d = grid.spacing();
    let g = grid.g;
    let n = grid.n;
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0f64; n];
    for a in 0..n {
        let s = (point[a] + grid.lambda) / d;
        let i = s.floor();
        base[a] = (i as isize).rem_euclid(g as isize) as usize;
        frac[a] = s - i;
    }
    let mut value = 0.0;
    for corner in 0..(1usize << n) {
        let mut weight = 1.0;
        let mut idx = vec![0usize; n];
        for a in 0..n {
            if corner & (1 << a) != 0 {
                idx[a] = (base[a] + 1) % g;
                weight *= frac[a];
            } else {
                idx[a] = base[a];
                weight *= 1.0 - frac[a];
            }
        }
        value += weight * field[idx.as_slice()];
    }
    value
}

/// Lockstep velocity: drift flux and density are evaluated analytically
/// from the basis functions (cheap per point), and only the small
/// Poisson correction field is grid-interpolated. Interpolation error
/// therefore touches only the correction term, and the J=0 short
/// circuit keeps v = u exactly. Returns None inside a node region.
fn velocity_at(
    pipeline: &CausalPipeline,
    state: &CausalFieldState,
    grid: &ConfigGrid,
    point: &[f64],
) -> Option<Vec<f64>> {
    let (rho, flux) = pipeline.density_and_drift_flux(state, point);
    if rho <= state.eps_node {
        return None;
    }
    Some(
        flux.iter()
            .enumerate()
            .map(|(a, f)| {
                let correction = if state.j_is_zero {
                    0.0
                } else {
                    interpolate(&state.e_field[a], grid, point) + state.e_offset[a]
                };
                (f + correction) / rho
            })
            .collect(),
    )
}

enum MemberState {
    Live(Vec<f64>),
    Done(FieldStatus, Vec<f64>),
}

/// Advance an ensemble of field configurations from t0 to t1 in
/// lockstep. The per-member path is reported to `on_step`; aborted
/// members carry their flag and final position.
fn run_ensemble(
    pipeline: &CausalPipeline,
    starts: &[Vec<f64>],
    t0: f64,
    t1: f64,
    dt: f64,
    mut on_step: impl FnMut(usize, f64, &[f64], f64),
) -> Result<Vec<(FieldStatus, Vec<f64>)>> {
    assert!(dt > 0.0 && t1 > t0);
    let grid = &pipeline.basis.grid;
    let mut members: Vec<MemberState> = Vec::with_capacity(starts.len());
    let state0 = pipeline.state_at(t0)?;
    for (i, phi) in starts.iter().enumerate() {
        assert_eq!(phi.len(), grid.n);
        if !grid.contains(phi) {
            members.push(MemberState::Done(FieldStatus::GridExit { t: t0 }, phi.clone()));
        } else if velocity_at(pipeline, &state0, grid, phi).is_none() {
            members.push(MemberState::Done(FieldStatus::NodeRegion { t: t0 }, phi.clone()));
        } else {
            on_step(i, t0, phi, interpolate(&state0.rho, grid, phi));
            members.push(MemberState::Live(phi.clone()));
        }
    }

    let mut t = t0;
    let mut state_a = state0;
    while t1 - t > 1e-12 * (t1 - t0) {
        let h = dt.min(t1 - t);
        let state_b = pipeline.state_at(t + 0.5 * h)?;
        let state_c = pipeline.state_at(t + h)?;
        for i in 0..members.len() {
            let phi = match &members[i] {
                MemberState::Live(p) => p.clone(),
                MemberState::Done(..) => continue,
            };
            let mut abort = |status: FieldStatus, at: &Vec<f64>| {
                members[i] = MemberState::Done(status, at.clone());
            };
            let shift = |p: &[f64], v: &[f64], s: f64| -> Vec<f64> {
                p.iter().zip(v).map(|(x, dv)| x + dv * s).collect()
            };
            // RK4 with the three shared stage fields
            let stage = |state: &CausalFieldState, p: &Vec<f64>| -> std::result::Result<Vec<f64>, FieldStatus> {
                if !grid.contains(p) {
                    return Err(FieldStatus::GridExit { t });
                }
                velocity_at(pipeline, state, grid, p).ok_or(FieldStatus::NodeRegion { t })
            };
            let result = (|| -> std::result::Result<Vec<f64>, (FieldStatus, Vec<f64>)> {
                let k1 = stage(&state_a, &phi).map_err(|s| (s, phi.clone()))?;
                let p2 = shift(&phi, &k1, 0.5 * h);
                let k2 = stage(&state_b, &p2).map_err(|s| (s, p2.clone()))?;
                let p3 = shift(&phi, &k2, 0.5 * h);
                let k3 = stage(&state_b, &p3).map_err(|s| (s, p3.clone()))?;
                let p4 = shift(&phi, &k3, h);
                let k4 = stage(&state_c, &p4).map_err(|s| (s, p4.clone()))?;
                let v: Vec<f64> = (0..grid.n)
                    .map(|a| (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]) / 6.0)
                    .collect();
                let next = shift(&phi, &v, h);
                if !grid.contains(&next) {
                    return Err((FieldStatus::GridExit { t: t + h }, next));
                }
                if velocity_at(pipeline, &state_c, grid, &next).is_none() {
                    return Err((FieldStatus::NodeRegion { t: t + h }, next));
                }
                Ok(next)
            })();
            match result {
                Ok(next) => {
                    on_step(i, t + h, &next, interpolate(&state_c.rho, grid, &next));
                    members[i] = MemberState::Live(next);
                }
                Err((status, at)) => abort(status, &at),
            }
        }
        t += h;
        state_a = state_c;
    }

    Ok(members
        .into_iter()
        .map(|m| match m {
            MemberState::Live(p) => (FieldStatus::Completed, p),
            MemberState::Done(s, p) => (s, p),
        })
        .collect())
}

/// Integrate a single field trajectory, recording the full path with
/// the density along it. The velocity is evaluated continuously (basis
/// functions plus the trigonometric interpolant of the potential), so
/// the RK4 steps converge at their nominal fourth order.
pub fn integrate_field(
    pipeline: &CausalPipeline,
    phi0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<FieldTrajectory> {
    assert!(dt > 0.0 && t1 > t0);
    let grid = &pipeline.basis.grid;
    assert_eq!(phi0.len(), grid.n);
    let mut steps = Vec::new();
    let state0 = pipeline.state_at(t0)?;
    if !grid.contains(phi0) {
        return Ok(FieldTrajectory { steps, status: FieldStatus::GridExit { t: t0 } });
    }
    if pipeline.velocity_continuous(&state0, phi0).is_none() {
        return Ok(FieldTrajectory { steps, status: FieldStatus::NodeRegion { t: t0 } });
    }
    steps.push(FieldStep {
        t: t0,
        phi: phi0.to_vec(),
        rho: pipeline.rho_continuous(&state0, phi0),
    });

    let mut t = t0;
    let mut phi = phi0.to_vec();
    let mut state_a = state0;
    while t1 - t > 1e-12 * (t1 - t0) {
        let h = dt.min(t1 - t);
        let state_b = pipeline.state_at(t + 0.5 * h)?;
        let state_c = pipeline.state_at(t + h)?;
        let shift = |p: &[f64], v: &[f64], s: f64| -> Vec<f64> {
            p.iter().zip(v).map(|(x, dv)| x + dv * s).collect()
        };
        let stage = |state: &CausalFieldState, p: &[f64]| -> std::result::Result<Vec<f64>, FieldStatus> {
            if !grid.contains(p) {
                return Err(FieldStatus::GridExit { t });
            }
            pipeline.velocity_continuous(state, p).ok_or(FieldStatus::NodeRegion { t })
        };
        let outcome = (|| -> std::result::Result<Vec<f64>, FieldStatus> {
            let k1 = stage(&state_a, &phi)?;
            let k2 = stage(&state_b, &shift(&phi, &k1, 0.5 * h))?;
            let k3 = stage(&state_b, &shift(&phi, &k2, 0.5 * h))?;
            let k4 = stage(&state_c, &shift(&phi, &k3, h))?;
            let v: Vec<f64> = (0..grid.n)
                .map(|a| (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]) / 6.0)
                .collect();
            let next = shift(&phi, &v, h);
            if !grid.contains(&next) {
                return Err(FieldStatus::GridExit { t: t + h });
            }
            if pipeline.velocity_continuous(&state_c, &next).is_none() {
                return Err(FieldStatus::NodeRegion { t: t + h });
            }
            Ok(next)
        })();
        match outcome {
            Ok(next) => {
                t += h;
                steps.push(FieldStep {
                    t,
                    phi: next.clone(),
                    rho: pipeline.rho_continuous(&state_c, &next),
                });
                phi = next;
                state_a = state_c;
            }
            Err(status) => return Ok(FieldTrajectory { steps, status }),
        }
    }
    Ok(FieldTrajectory { steps, status: FieldStatus::Completed })
}

/// Advance many trajectories in lockstep, reporting only endpoints.
pub fn integrate_field_ensemble(
    pipeline: &CausalPipeline,
    starts: &[Vec<f64>],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<(FieldStatus, Vec<f64>)>> {
    run_ensemble(pipeline, starts, t0, t1, dt, |_, _, _, _| {})
}

/// rho marginal density along one axis by grid quadrature.
pub fn marginal_density(state: &CausalFieldState, grid: &ConfigGrid, axis: usize) -> Vec<f64> {
    let weight = grid.spacing().powi(grid.n as i32 - 1);
    let mut marg = vec![0.0; grid.g];
    for (idx, &r) in state.rho.indexed_iter() {
        marg[idx[axis]] += r * weight;
    }
    marg
}

/// Equivariance for field trajectories: sample M configurations from
/// rho(t0) (cell-weighted with intra-cell jitter, one counter-based
/// stream per index), advance them to t1, and KS-compare the requested
/// marginal with the grid marginal of rho(t1). Aborted members count as
/// exclusions; more than 1% fails.
pub fn field_equivariance_test(
    pipeline: &CausalPipeline,
    m: usize,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
    axis: usize,
) -> Result<crate::trajectory::EquivarianceReport> {
    assert!(m >= 1000);
    let grid = &pipeline.basis.grid;
    assert!(axis < grid.n);
    let state0 = pipeline.state_at(t0)?;

    // Sample from the multilinear interpolant of rho(t0): cells are
    // drawn with corner-averaged weights (the integral of the
    // interpolant over the cell) and filled by rejection against the
    // in-cell interpolant. The axis marginals of that density are
    // exactly the trapezoid-accumulated grid marginals used by the
    // comparison CDF, so no sampling registration bias enters the KS
    // statistic.
    let shape = grid.shape();
    let d = grid.spacing();
    let n_corners = 1usize << grid.n;
    let corner_values = |idx: &[usize]| -> Vec<f64> {
        (0..n_corners)
            .map(|corner| {
                let wrapped: Vec<usize> = (0..grid.n)
                    .map(|a| {
                        if corner & (1 << a) != 0 { (idx[a] + 1) % shape[a] } else { idx[a] }
                    })
                    .collect();
                state0.rho[wrapped.as_slice()].max(0.0)
            })
            .collect()
    };
    let unflatten = |cell: usize| -> Vec<usize> {
        let mut rem = cell;
        let mut idx = vec![0usize; grid.n];
        for a in (0..grid.n).rev() {
            idx[a] = rem % shape[a];
            rem /= shape[a];
        }
        idx
    };
    let num_cells = grid.num_points();
    let mut cumulative = Vec::with_capacity(num_cells + 1);
    let mut acc = 0.0;
    cumulative.push(0.0);
    for cell in 0..num_cells {
        let corners = corner_values(&unflatten(cell));
        acc += corners.iter().sum::<f64>() / n_corners as f64;
        cumulative.push(acc);
    }
    let total = acc;

    let starts: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u = rng.gen::<f64>() * total;
            let cell = match cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                Ok(k) => k.min(num_cells - 1),
                Err(k) => k.saturating_sub(1).min(num_cells - 1),
            };
            let idx = unflatten(cell);
            let corners = corner_values(&idx);
            let bound = corners.iter().fold(0.0f64, |a, &b| a.max(b));
            // rejection against the in-cell multilinear density
            let mut frac = vec![0.5f64; grid.n];
            loop {
                for f in frac.iter_mut() {
                    *f = rng.gen::<f64>();
                }
                let mut value = 0.0;
                for (corner, &c) in corners.iter().enumerate() {
                    let mut w = 1.0;
                    for (a, f) in frac.iter().enumerate() {
                        w *= if corner & (1 << a) != 0 { *f } else { 1.0 - *f };
                    }
                    value += w * c;
                }
                if bound <= 0.0 || rng.gen::<f64>() * bound <= value {
                    break;
                }
            }
            idx.iter()
                .zip(&frac)
                .map(|(&i, &f)| -grid.lambda + (i as f64 + f) * d)
                .collect()
        })
        .collect();

    let outcomes = integrate_field_ensemble(pipeline, &starts, t0, t1, dt)?;
    let mut finals = Vec::with_capacity(m);
    let mut excluded = 0usize;
    for (status, phi) in outcomes {
        if status == FieldStatus::Completed {
            finals.push(phi[axis]);
        } else {
            excluded += 1;
        }
    }
    let excluded_fraction = excluded as f64 / m as f64;

    let state1 = pipeline.state_at(t1)?;
    let marg1 = marginal_density(&state1, grid, axis);
    let cdf1 = TabulatedCdf::from_density(-grid.lambda, d, &marg1);
    let ks = ks_statistic(&finals, |x| cdf1.evaluate(x));
    let crit = ks_critical(finals.len());
    Ok(crate::trajectory::EquivarianceReport {
        m,
        seed,
        t0,
        t1,
        ks,
        ks_critical: crit,
        excluded_fraction,
        passed: ks < crit && excluded_fraction < 0.01,
        final_positions: finals,
    })
}
