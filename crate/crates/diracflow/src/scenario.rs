//! Scenario files: a versioned JSON schema describing a lattice, a mode
//! basis, a Fock/Hamiltonian setup, an initial state and a run kind,
//! plus schema- and cross-reference validation that can run without
//! executing anything.

use crate::error::{Error, Result};
use crate::fock::{
    build_fock_basis, build_free_hamiltonian, build_mixing_hamiltonian, FockBasis,
    HamiltonianMatrix, OccState, PairTerm,
};
use crate::lattice::Lattice;
use crate::modes::{build_mode_basis, ModeBasis, Spin};
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

type C = Complex64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub lattice: LatticeSpec,
    pub mass: f64,
    pub k_cut: i32,
    pub fock: FockSpec,
    pub hamiltonian: HamiltonianSpec,
    pub initial_state: InitialStateSpec,
    pub run: RunSpec,
    /// required whenever the run kind samples an ensemble
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub length: f64,
    /// points along the single active axis
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub n: [i32; 3],
    pub spin: Spin,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpec {
    pub particle_modes: Vec<ModeSpec>,
    pub antiparticle_modes: Vec<ModeSpec>,
    pub cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Free,
    PairMixing { terms: Vec<PairTermSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairTermSpec {
    /// index into fock.particle_modes
    pub particle_mode: usize,
    /// index into fock.antiparticle_modes
    pub antiparticle_mode: usize,
    /// coupling as [re, im]
    pub lambda: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum InitialStateSpec {
    Preset { preset: Preset },
    /// explicit coefficients over the Fock basis, as [re, im] pairs in
    /// basis order
    Coefficients { coefficients: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Vacuum,
    OneParticle,
    OnePositron,
    PairSuperposition,
}

impl Preset {
    pub const ALL: [Preset; 4] =
        [Preset::Vacuum, Preset::OneParticle, Preset::OnePositron, Preset::PairSuperposition];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Vacuum => "vacuum",
            Preset::OneParticle => "one-particle",
            Preset::OnePositron => "one-positron",
            Preset::PairSuperposition => "pair-superposition",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Vacuum => "the empty Fock vacuum",
            Preset::OneParticle => "first particle mode singly occupied",
            Preset::OnePositron => "first antiparticle mode singly occupied",
            Preset::PairSuperposition => {
                "(|0> + b^dag d^dag |0>)/sqrt(2) over the first modes of each kind"
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub lambda: f64,
    pub g: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartsSpec {
    #[serde(default)]
    pub particles: Vec<[f64; 3]>,
    #[serde(default)]
    pub antiparticles: Vec<[f64; 3]>,
}

impl StartsSpec {
    pub fn n_slots(&self) -> usize {
        self.particles.len() + self.antiparticles.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleSpace {
    Corpuscle,
    Field,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunSpec {
    DiracTrajectories {
        time: TimeSpec,
        starts: StartsSpec,
    },
    Multiparticle {
        time: TimeSpec,
        starts: StartsSpec,
    },
    FockEvolve {
        time: TimeSpec,
    },
    CausalField {
        grid: GridSpec,
        time: TimeSpec,
        phi0: Vec<f64>,
    },
    Effectivity {
        grid: GridSpec,
        time: TimeSpec,
        phi0: Vec<f64>,
    },
    Equivariance {
        space: EnsembleSpace,
        time: TimeSpec,
        m: usize,
        #[serde(default)]
        grid: Option<GridSpec>,
        /// marginal axis compared in the field case
        #[serde(default)]
        axis: usize,
    },
}

impl RunSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RunSpec::DiracTrajectories { .. } => "dirac-trajectories",
            RunSpec::Multiparticle { .. } => "multiparticle",
            RunSpec::FockEvolve { .. } => "fock-evolve",
            RunSpec::CausalField { .. } => "causal-field",
            RunSpec::Effectivity { .. } => "effectivity",
            RunSpec::Equivariance { .. } => "equivariance",
        }
    }

    pub fn time(&self) -> &TimeSpec {
        match self {
            RunSpec::DiracTrajectories { time, .. }
            | RunSpec::Multiparticle { time, .. }
            | RunSpec::FockEvolve { time }
            | RunSpec::CausalField { time, .. }
            | RunSpec::Effectivity { time, .. }
            | RunSpec::Equivariance { time, .. } => time,
        }
    }

    pub fn samples(&self) -> bool {
        matches!(self, RunSpec::Equivariance { .. })
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    /// Schema and cross-reference diagnostics, without executing the
    /// run. An empty list means the scenario is well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut diag = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            diag.push(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            ));
        }
        if !(self.mass > 0.0) {
            diag.push(format!("mass: must be positive, got {}", self.mass));
        }
        if !(self.lattice.length > 0.0) {
            diag.push(format!("lattice.length: must be positive, got {}", self.lattice.length));
        }
        if self.k_cut < 0 {
            diag.push(format!("k_cut: must be non-negative, got {}", self.k_cut));
        }
        // dealiasing: products of two band-limited factors need
        // N >= 2 (2 k_cut + 1) grid points to stay alias-free
        let required = 2 * (2 * self.k_cut.max(0) as usize + 1);
        if self.lattice.points < required {
            diag.push(format!(
                "lattice.points: dealiasing rule N >= 2(2 k_cut + 1) requires {} points for k_cut = {}, got {}",
                required, self.k_cut, self.lattice.points
            ));
        }
        let time = self.run.time();
        if !(time.dt > 0.0) {
            diag.push(format!("run.time.dt: must be positive, got {}", time.dt));
        }
        if !(time.t1 > time.t0) {
            diag.push(format!("run.time: t1 = {} must exceed t0 = {}", time.t1, time.t0));
        }
        if self.run.samples() && self.seed.is_none() {
            diag.push("seed: required for sampling run kinds (equivariance)".into());
        }

        for (label, specs) in
            [("particle_modes", &self.fock.particle_modes), ("antiparticle_modes", &self.fock.antiparticle_modes)]
        {
            for (i, m) in specs.iter().enumerate() {
                if m.n.iter().any(|&ni| ni.abs() > self.k_cut) {
                    diag.push(format!(
                        "fock.{label}[{i}]: mode labels {:?} exceed k_cut = {}",
                        m.n, self.k_cut
                    ));
                }
                if m.n[1] != 0 || m.n[2] != 0 {
                    // shipped lattices have one active axis
                    diag.push(format!(
                        "fock.{label}[{i}]: inactive-axis labels must be zero, got {:?}",
                        m.n
                    ));
                }
            }
        }
        if self.fock.cap == 0 {
            diag.push("fock.cap: must allow at least one corpuscle".into());
        }

        if let HamiltonianSpec::PairMixing { terms } = &self.hamiltonian {
            for (i, term) in terms.iter().enumerate() {
                if term.particle_mode >= self.fock.particle_modes.len() {
                    diag.push(format!(
                        "hamiltonian.terms[{i}].particle_mode: index {} out of range ({} particle modes)",
                        term.particle_mode,
                        self.fock.particle_modes.len()
                    ));
                }
                if term.antiparticle_mode >= self.fock.antiparticle_modes.len() {
                    diag.push(format!(
                        "hamiltonian.terms[{i}].antiparticle_mode: index {} out of range ({} antiparticle modes)",
                        term.antiparticle_mode,
                        self.fock.antiparticle_modes.len()
                    ));
                }
                if !term.lambda.iter().all(|v| v.is_finite()) {
                    diag.push(format!("hamiltonian.terms[{i}].lambda: must be finite"));
                }
            }
        }

        match &self.initial_state {
            InitialStateSpec::Preset { preset } => {
                let needs_p = matches!(preset, Preset::OneParticle | Preset::PairSuperposition);
                let needs_a = matches!(preset, Preset::OnePositron | Preset::PairSuperposition);
                if needs_p && self.fock.particle_modes.is_empty() {
                    diag.push(format!(
                        "initial_state.preset: {} requires a particle mode",
                        preset.name()
                    ));
                }
                if needs_a && self.fock.antiparticle_modes.is_empty() {
                    diag.push(format!(
                        "initial_state.preset: {} requires an antiparticle mode",
                        preset.name()
                    ));
                }
                if *preset == Preset::PairSuperposition && self.fock.cap < 2 {
                    diag.push("initial_state.preset: pair-superposition needs fock.cap >= 2".into());
                }
            }
            InitialStateSpec::Coefficients { coefficients } => {
                let norm_sq: f64 =
                    coefficients.iter().map(|[re, im]| re * re + im * im).sum();
                if (norm_sq - 1.0).abs() > 1e-8 {
                    diag.push(format!(
                        "initial_state.coefficients: norm {} deviates from 1",
                        norm_sq.sqrt()
                    ));
                }
            }
        }

        let n_modes = self.fock.particle_modes.len() + self.fock.antiparticle_modes.len();
        let check_grid = |grid: &GridSpec, diag: &mut Vec<String>| {
            if grid.n != n_modes {
                diag.push(format!(
                    "run.grid.n: one field variable per Fock mode, expected {n_modes}, got {}",
                    grid.n
                ));
            }
            if grid.n == 0 || grid.n > 4 {
                diag.push(format!("run.grid.n: supported range is 1..=4, got {}", grid.n));
            }
            if grid.g < 16 {
                diag.push(format!("run.grid.g: at least 16 points per axis, got {}", grid.g));
            }
            if grid.lambda < 6.0 {
                diag.push(format!(
                    "run.grid.lambda: at least 6 oscillator lengths, got {}",
                    grid.lambda
                ));
            }
        };

        match &self.run {
            RunSpec::DiracTrajectories { starts, .. } | RunSpec::Multiparticle { starts, .. } => {
                if starts.n_slots() == 0 {
                    diag.push("run.starts: at least one corpuscle start position".into());
                }
                if starts.particles.len() > self.fock.particle_modes.len() {
                    diag.push(format!(
                        "run.starts.particles: {} slots exceed the {} particle modes",
                        starts.particles.len(),
                        self.fock.particle_modes.len()
                    ));
                }
                if starts.antiparticles.len() > self.fock.antiparticle_modes.len() {
                    diag.push(format!(
                        "run.starts.antiparticles: {} slots exceed the {} antiparticle modes",
                        starts.antiparticles.len(),
                        self.fock.antiparticle_modes.len()
                    ));
                }
            }
            RunSpec::CausalField { grid, phi0, .. } | RunSpec::Effectivity { grid, phi0, .. } => {
                check_grid(grid, &mut diag);
                if phi0.len() != grid.n {
                    diag.push(format!(
                        "run.phi0: {} components for an n = {} grid",
                        phi0.len(),
                        grid.n
                    ));
                }
                if phi0.iter().any(|v| v.abs() >= grid.lambda) {
                    diag.push("run.phi0: start must lie in the grid interior".into());
                }
            }
            RunSpec::Equivariance { space, m, grid, axis, .. } => {
                if *m < 1000 {
                    diag.push(format!(
                        "run.m: the KS threshold needs at least 1000 members, got {m}"
                    ));
                }
                match space {
                    EnsembleSpace::Corpuscle => {
                        if matches!(
                            self.initial_state,
                            InitialStateSpec::Preset {
                                preset: Preset::Vacuum | Preset::PairSuperposition
                            }
                        ) {
                            diag.push(
                                "run.space: corpuscle equivariance needs a single-corpuscle state"
                                    .into(),
                            );
                        }
                    }
                    EnsembleSpace::Field => match grid {
                        None => diag.push("run.grid: required for field equivariance".into()),
                        Some(g) => {
                            check_grid(g, &mut diag);
                            if *axis >= g.n {
                                diag.push(format!(
                                    "run.axis: {} out of range for an n = {} grid",
                                    axis, g.n
                                ));
                            }
                        }
                    },
                }
            }
            RunSpec::FockEvolve { .. } => {}
        }

        diag
    }

}

/// The scenario resolved into live objects, ready to execute.
pub struct Resolved {
    pub lattice: Lattice,
    pub modes: ModeBasis,
    pub fock: FockBasis,
    pub hamiltonian: HamiltonianMatrix,
    pub c0: DVector<C>,
}

pub fn resolve(scenario: &Scenario) -> Result<Resolved> {
    let diagnostics = scenario.validate();
    if !diagnostics.is_empty() {
        return Err(Error::InvalidScenario(diagnostics));
    }
    let lattice = Lattice::line(scenario.lattice.length, scenario.lattice.points);
    let modes = build_mode_basis(&lattice, scenario.mass, scenario.k_cut)?;
    let lookup = |spec: &ModeSpec| -> Result<usize> {
        modes
            .find(spec.n, spec.spin)
            .ok_or_else(|| Error::UnknownMode(format!("{:?} {:?}", spec.n, spec.spin)))
    };
    let particle_modes: Vec<usize> =
        scenario.fock.particle_modes.iter().map(lookup).collect::<Result<_>>()?;
    let antiparticle_modes: Vec<usize> =
        scenario.fock.antiparticle_modes.iter().map(lookup).collect::<Result<_>>()?;
    let fock = build_fock_basis(particle_modes, antiparticle_modes, scenario.fock.cap)?;

    let hamiltonian = match &scenario.hamiltonian {
        HamiltonianSpec::Free => build_free_hamiltonian(&fock, &modes),
        HamiltonianSpec::PairMixing { terms } => {
            let terms: Vec<PairTerm> = terms
                .iter()
                .map(|t| PairTerm {
                    particle_mode: t.particle_mode,
                    antiparticle_mode: t.antiparticle_mode,
                    lambda: C::new(t.lambda[0], t.lambda[1]),
                })
                .collect();
            build_mixing_hamiltonian(&fock, &modes, &terms)
        }
    };

    let c0 = initial_coefficients(&scenario.initial_state, &fock)?;
    Ok(Resolved { lattice, modes, fock, hamiltonian, c0 })
}

fn initial_coefficients(spec: &InitialStateSpec, fock: &FockBasis) -> Result<DVector<C>> {
    let occupation = |n_p: u64, n_a: u64| -> Result<usize> {
        fock.position(OccState { particles: n_p, antiparticles: n_a }).ok_or_else(|| {
            Error::UnknownMode(format!("occupation ({n_p:b}, {n_a:b}) not in the Fock basis"))
        })
    };
    match spec {
        InitialStateSpec::Preset { preset } => {
            let mut c = DVector::zeros(fock.dim());
            match preset {
                Preset::Vacuum => c[fock.vacuum_index()] = C::new(1.0, 0.0),
                Preset::OneParticle => c[occupation(1, 0)?] = C::new(1.0, 0.0),
                Preset::OnePositron => c[occupation(0, 1)?] = C::new(1.0, 0.0),
                Preset::PairSuperposition => {
                    let amp = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                    c[fock.vacuum_index()] = amp;
                    c[occupation(1, 1)?] = amp;
                }
            }
            Ok(c)
        }
        InitialStateSpec::Coefficients { coefficients } => {
            if coefficients.len() != fock.dim() {
                return Err(Error::InvalidScenario(vec![format!(
                    "initial_state.coefficients: {} entries for a Fock dimension of {}",
                    coefficients.len(),
                    fock.dim()
                )]));
            }
            Ok(DVector::from_iterator(
                coefficients.len(),
                coefficients.iter().map(|[re, im]| C::new(*re, *im)),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json(run: &str, seed: &str) -> String {
        format!(
            r#"{{
              "schema_version": 1,
              "name": "test",
              "lattice": {{ "length": 6.283185307179586, "points": 16 }},
              "mass": 1.0,
              "k_cut": 1,
              "fock": {{
                "particle_modes": [{{ "n": [0, 0, 0], "spin": "Up" }}],
                "antiparticle_modes": [{{ "n": [0, 0, 0], "spin": "Up" }}],
                "cap": 2
              }},
              "hamiltonian": {{ "kind": "free" }},
              "initial_state": {{ "preset": "one-positron" }},
              "run": {run}{seed}
            }}"#
        )
    }

    #[test]
    fn well_formed_scenario_has_no_diagnostics() {
        let json = minimal_json(
            r#"{ "kind": "dirac-trajectories",
                 "time": { "t0": 0.0, "t1": 1.0, "dt": 0.01 },
                 "starts": { "antiparticles": [[1.0, 0.0, 0.0]] } }"#,
            "",
        );
        let s = Scenario::from_json(&json).unwrap();
        assert!(s.validate().is_empty(), "{:?}", s.validate());
        let r = resolve(&s).unwrap();
        assert_eq!(r.fock.dim(), 4);
        assert!((r.c0.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_seed_on_sampling_run_is_named() {
        let json = minimal_json(
            r#"{ "kind": "equivariance", "space": "corpuscle",
                 "time": { "t0": 0.0, "t1": 1.0, "dt": 0.01 }, "m": 2000 }"#,
            "",
        );
        let s = Scenario::from_json(&json).unwrap();
        let diag = s.validate();
        assert!(diag.iter().any(|d| d.starts_with("seed:")), "{diag:?}");
    }

    #[test]
    fn dealiasing_rule_is_cited() {
        let mut json = minimal_json(
            r#"{ "kind": "fock-evolve", "time": { "t0": 0.0, "t1": 1.0, "dt": 0.01 } }"#,
            "",
        );
        json = json.replace(r#""points": 16"#, r#""points": 4"#);
        let s = Scenario::from_json(&json).unwrap();
        let diag = s.validate();
        assert!(diag.iter().any(|d| d.contains("N >= 2(2 k_cut + 1)")), "{diag:?}");
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let json = minimal_json(
            r#"{ "kind": "fock-evolve", "time": { "t0": 0.0, "t1": 1.0, "dt": 0.01 } }"#,
            r#", "seeed": 1"#,
        );
        let err = Scenario::from_json(&json).unwrap_err();
        assert!(err.to_string().contains("seeed"), "{err}");
    }

    #[test]
    fn grid_cross_checks_fire() {
        let json = minimal_json(
            r#"{ "kind": "causal-field",
                 "grid": { "n": 3, "lambda": 5.0, "g": 8 },
                 "time": { "t0": 0.0, "t1": 1.0, "dt": 0.01 },
                 "phi0": [0.0, 0.0, 0.0] }"#,
            "",
        );
        let s = Scenario::from_json(&json).unwrap();
        let diag = s.validate();
        assert!(diag.iter().any(|d| d.contains("run.grid.n")), "{diag:?}");
        assert!(diag.iter().any(|d| d.contains("run.grid.g")), "{diag:?}");
        assert!(diag.iter().any(|d| d.contains("run.grid.lambda")), "{diag:?}");
    }
}
