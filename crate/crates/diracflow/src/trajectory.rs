//! Corpuscle trajectories: guidance velocities from the per-slot
//! currents, joint-configuration Runge-Kutta integration, and the
//! equivariance ensemble check.

use crate::error::{Error, Result};
use crate::gamma::GammaSet;
use crate::multiwave::{corpuscle_currents, MultiWave};
use crate::stats::{ks_critical, ks_statistic, TabulatedCdf};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Joint configuration of all corpuscles guided by one wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig {
    pub particles: Vec<[f64; 3]>,
    pub antiparticles: Vec<[f64; 3]>,
}

impl JointConfig {
    pub fn single_particle(x: [f64; 3]) -> Self {
        JointConfig { particles: vec![x], antiparticles: vec![] }
    }

    pub fn single_antiparticle(y: [f64; 3]) -> Self {
        JointConfig { particles: vec![], antiparticles: vec![y] }
    }

    pub fn n_slots(&self) -> usize {
        self.particles.len() + self.antiparticles.len()
    }

    pub fn slot(&self, i: usize) -> [f64; 3] {
        if i < self.particles.len() {
            self.particles[i]
        } else {
            self.antiparticles[i - self.particles.len()]
        }
    }

    fn advance(&self, velocities: &[[f64; 3]], dt: f64) -> JointConfig {
        let shift = |xs: &[[f64; 3]], off: usize| {
            xs.iter()
                .enumerate()
                .map(|(i, x)| {
                    let v = velocities[off + i];
                    [x[0] + v[0] * dt, x[1] + v[1] * dt, x[2] + v[2] * dt]
                })
                .collect()
        };
        JointConfig {
            particles: shift(&self.particles, 0),
            antiparticles: shift(&self.antiparticles, self.particles.len()),
        }
    }

    fn wrapped(&self, lattice: &crate::lattice::Lattice) -> JointConfig {
        JointConfig {
            particles: self.particles.iter().map(|&x| lattice.wrap(x)).collect(),
            antiparticles: self.antiparticles.iter().map(|&x| lattice.wrap(x)).collect(),
        }
    }
}

/// The real 4-current of one corpuscle slot at a joint configuration.
pub fn corpuscle_current(
    wave: &dyn MultiWave,
    slot: usize,
    config: &JointConfig,
    t: f64,
    gammas: &GammaSet,
) -> Result<[f64; 4]> {
    assert!(slot < wave.n_slots());
    let psi = wave.evaluate(&config.particles, &config.antiparticles, t)?;
    let cur = corpuscle_currents(&psi, gammas, wave.n_particles(), wave.n_antiparticles())?;
    let j = cur.j[slot];
    Ok([cur.j0[slot], j[0], j[1], j[2]])
}

/// Guidance velocities of every slot, plus the per-slot densities, at
/// one joint configuration. Fails with NodeRegion when any |j0| falls
/// at or below the node threshold.
pub fn bohm_velocities(
    wave: &dyn MultiWave,
    config: &JointConfig,
    t: f64,
    gammas: &GammaSet,
    eps_node: f64,
) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let psi = wave.evaluate(&config.particles, &config.antiparticles, t)?;
    let cur = corpuscle_currents(&psi, gammas, wave.n_particles(), wave.n_antiparticles())?;
    let mut v = Vec::with_capacity(cur.j0.len());
    for (slot, &j0) in cur.j0.iter().enumerate() {
        if j0.abs() <= eps_node {
            return Err(Error::NodeRegion { j0, eps: eps_node });
        }
        let j = cur.j[slot];
        v.push([j[0] / j0, j[1] / j0, j[2] / j0]);
    }
    Ok((v, cur.j0))
}

/// Guidance velocity of a single slot (see `bohm_velocities`).
pub fn bohm_velocity(
    wave: &dyn MultiWave,
    slot: usize,
    config: &JointConfig,
    t: f64,
    gammas: &GammaSet,
    eps_node: f64,
) -> Result<[f64; 3]> {
    let (v, _) = bohm_velocities(wave, config, t, gammas, eps_node)?;
    Ok(v[slot])
}

/// Node threshold 1e-12 x (box-average |j0|), estimated by averaging the
/// slot densities over joint configurations on the (strided) lattice.
pub fn node_epsilon(wave: &dyn MultiWave, t: f64, gammas: &GammaSet) -> Result<f64> {
    let lattice = wave.lattice();
    let n = lattice.num_points();
    let slots = wave.n_slots();
    // keep the joint grid at desk scale
    let budget: usize = 4096;
    let mut stride = 1usize;
    while (n / stride).max(1).pow(slots as u32) > budget {
        stride *= 2;
    }
    let points: Vec<[f64; 3]> =
        lattice.iter_coords().step_by(stride).map(|(_, x)| x).collect();
    let m = points.len();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut index = vec![0usize; slots];
    loop {
        let config = JointConfig {
            particles: (0..wave.n_particles()).map(|i| points[index[i]]).collect(),
            antiparticles: (wave.n_particles()..slots).map(|i| points[index[i]]).collect(),
        };
        let psi = wave.evaluate(&config.particles, &config.antiparticles, t)?;
        let cur = corpuscle_currents(&psi, gammas, wave.n_particles(), wave.n_antiparticles())?;
        total += cur.j0.iter().map(|j| j.abs()).sum::<f64>() / slots as f64;
        count += 1;
        // odometer over the joint grid
        let mut axis = 0;
        loop {
            if axis == slots {
                return Ok(1e-12 * total / count as f64);
            }
            index[axis] += 1;
            if index[axis] < m {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// the configuration itself entered a node neighborhood
    NodeRegion { t: f64, j0: f64, eps: f64 },
    /// step halving against a mid-step node hit the minimum step size
    StepUnderflow { t: f64 },
}

#[derive(Debug, Clone)]
pub struct TrajectoryStep {
    pub t: f64,
    pub config: JointConfig,
    /// per-slot guidance density at this configuration
    pub j0: Vec<f64>,
    /// step size used to reach this configuration (0 for the initial one)
    pub dt_used: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    pub fn last(&self) -> &TrajectoryStep {
        self.steps.last().expect("trajectories record at least the initial step")
    }
}

/// Classic fixed-step RK4 on the coupled guidance system of all slots,
/// with periodic wrapping. A node hit at the current configuration
/// aborts with a NodeRegion flag; a node hit inside a step triggers step
/// halving, down to `dt / 2^30`, after which the trajectory aborts with
/// a StepUnderflow flag. The partial trajectory is always returned.
pub fn integrate(
    wave: &dyn MultiWave,
    initial: &JointConfig,
    t0: f64,
    t1: f64,
    dt: f64,
    gammas: &GammaSet,
    eps_node: f64,
) -> Result<Trajectory> {
    assert!(dt > 0.0 && t1 > t0);
    assert_eq!(initial.n_slots(), wave.n_slots());
    let lattice = wave.lattice();
    let dt_min = dt / (1u64 << 30) as f64;

    let mut config = initial.wrapped(lattice);
    let mut t = t0;
    let mut steps = Vec::new();

    let record = |steps: &mut Vec<TrajectoryStep>, t, config: &JointConfig, j0: Vec<f64>, dt_used| {
        steps.push(TrajectoryStep { t, config: config.clone(), j0, dt_used });
    };

    loop {
        // velocity at the current configuration; a failure here is a
        // genuine node encounter
        let (v1, j0) = match bohm_velocities(wave, &config, t, gammas, eps_node) {
            Ok(r) => r,
            Err(Error::NodeRegion { j0, eps }) => {
                return Ok(Trajectory { steps, status: TrajectoryStatus::NodeRegion { t, j0, eps } });
            }
            Err(e) => return Err(e),
        };
        if steps.is_empty() {
            record(&mut steps, t, &config, j0.clone(), 0.0);
        }
        if t1 - t <= dt_min {
            return Ok(Trajectory { steps, status: TrajectoryStatus::Completed });
        }

        let mut h = dt.min(t1 - t);
        loop {
            if h < dt_min {
                return Ok(Trajectory { steps, status: TrajectoryStatus::StepUnderflow { t } });
            }
            let stage = |cfg: &JointConfig, ts: f64| bohm_velocities(wave, cfg, ts, gammas, eps_node);
            let attempt = (|| -> Result<(JointConfig, Vec<f64>)> {
                let k2 = stage(&config.advance(&v1, 0.5 * h), t + 0.5 * h)?.0;
                let k3 = stage(&config.advance(&k2, 0.5 * h), t + 0.5 * h)?.0;
                let k4 = stage(&config.advance(&k3, h), t + h)?.0;
                let mut combined = Vec::with_capacity(v1.len());
                for s in 0..v1.len() {
                    let mut c = [0.0; 3];
                    for a in 0..3 {
                        c[a] = (v1[s][a] + 2.0 * k2[s][a] + 2.0 * k3[s][a] + k4[s][a]) / 6.0;
                    }
                    combined.push(c);
                }
                let next = config.advance(&combined, h).wrapped(lattice);
                // density at the landing point, for the diagnostics
                let (_, j0_next) = bohm_velocities(wave, &next, t + h, gammas, eps_node)?;
                Ok((next, j0_next))
            })();
            match attempt {
                Ok((next, j0_next)) => {
                    t += h;
                    config = next;
                    record(&mut steps, t, &config, j0_next, h);
                    break;
                }
                Err(Error::NodeRegion { .. }) => h *= 0.5,
                Err(e) => return Err(e),
            }
        }
    }
}

/// Outcome of the equivariance ensemble check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EquivarianceReport {
    pub m: usize,
    pub seed: u64,
    pub t0: f64,
    pub t1: f64,
    pub ks: f64,
    pub ks_critical: f64,
    pub excluded_fraction: f64,
    pub passed: bool,
    /// active-axis final positions of the included trajectories
    pub final_positions: Vec<f64>,
}

fn active_axis(lattice: &crate::lattice::Lattice) -> usize {
    let active: Vec<usize> =
        (0..3).filter(|&a| lattice.active[a]).collect();
    assert_eq!(active.len(), 1, "equivariance sampling needs exactly one active axis");
    active[0]
}

/// Density profile j0 along the active axis at time t, on the lattice
/// grid, for a single-slot wave.
pub fn density_profile(wave: &dyn MultiWave, t: f64, gammas: &GammaSet) -> Result<Vec<f64>> {
    assert_eq!(wave.n_slots(), 1);
    let lattice = wave.lattice();
    let mut out = Vec::with_capacity(lattice.num_points());
    for (_, x) in lattice.iter_coords() {
        let config = if wave.n_particles() == 1 {
            JointConfig::single_particle(x)
        } else {
            JointConfig::single_antiparticle(x)
        };
        let j = corpuscle_current(wave, 0, &config, t, gammas)?;
        // single-slot guidance densities are nonnegative up to roundoff
        out.push(j[0].max(0.0));
    }
    Ok(out)
}

/// Samples M initial positions from the j0-weighted density at t0
/// (inverse CDF on the lattice grid), integrates each trajectory to t1,
/// and compares the empirical distribution with the analytic
/// j0(., t1)/integral via the Kolmogorov-Smirnov statistic. Node aborts
/// become excluded samples; an exclusion fraction above 1% fails.
///
/// Sampling uses one counter-based stream per trajectory index, so the
/// result does not depend on the parallel schedule.
pub fn equivariance_test(
    wave: &dyn MultiWave,
    m: usize,
    t0: f64,
    t1: f64,
    dt: f64,
    seed: u64,
    gammas: &GammaSet,
) -> Result<EquivarianceReport> {
    assert!(m >= 1000, "ensemble too small for the KS threshold");
    assert_eq!(wave.n_slots(), 1, "ensemble sampling implemented for single-slot waves");
    let lattice = wave.lattice();
    let axis = active_axis(lattice);
    let dx = lattice.spacing(axis);

    let rho0 = density_profile(wave, t0, gammas)?;
    let rho1 = density_profile(wave, t1, gammas)?;
    let cdf0 = TabulatedCdf::from_density(0.0, dx, &rho0);
    let cdf1 = TabulatedCdf::from_density(0.0, dx, &rho1);
    let eps = 1e-12 * rho0.iter().sum::<f64>() / rho0.len() as f64;

    let outcomes: Vec<Result<Option<f64>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x0 = cdf0.inverse(rng.gen::<f64>());
            let mut point = [0.0; 3];
            point[axis] = x0;
            let config = if wave.n_particles() == 1 {
                JointConfig::single_particle(point)
            } else {
                JointConfig::single_antiparticle(point)
            };
            let traj = integrate(wave, &config, t0, t1, dt, gammas, eps)?;
            if traj.completed() {
                Ok(Some(traj.last().config.slot(0)[axis]))
            } else {
                Ok(None)
            }
        })
        .collect();

    let mut finals = Vec::with_capacity(m);
    let mut excluded = 0usize;
    for o in outcomes {
        match o? {
            Some(x) => finals.push(x),
            None => excluded += 1,
        }
    }
    let excluded_fraction = excluded as f64 / m as f64;
    let ks = ks_statistic(&finals, |x| cdf1.evaluate(x));
    let crit = ks_critical(finals.len());
    Ok(EquivarianceReport {
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
