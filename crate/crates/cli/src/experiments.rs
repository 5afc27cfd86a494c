//! Parameter sets and drivers for the four experiments. Every driver
//! validates its parameters completely before computing anything.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use spinbus_core::dynamics::{
    analytic_packet_fidelity_with_frequency, log_grid, packet_transfer_trace, scan_field_scale,
    transfer_fidelity, uniform_times, ScanOptions, WavepacketSpec,
};
use spinbus_core::format::fmt12;
use spinbus_core::ladder_effective::{
    exact_spin_gap, lowest_reduced_states, perturbative_jeff, power_law_fit, EXACT_MAX_SITES,
    PERTURBATIVE_MAX_LADDER_SITES,
};
use spinbus_core::memory::{
    analytic_storage_fidelity, decay_rate, default_broadening, exact_ring_validation, mode_couplings,
    mode_table_csv, simulate_inhomogeneous, simulate_storage_map, DensityMatrix, EXACT_RING_MAX,
};
use spinbus_core::models::{engineered_couplings, xy_chain_single_excitation};
use spinbus_core::spectral::{analyze_spectrum, evolution_is_mirror, SpmcVerdict};
use spinbus_core::{Complex64, Connection, FidelityTrace, LadderSpec, MemoryParams, SpinError};

use crate::config::ExperimentKind;
use crate::error::CliError;

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub body: Vec<u8>,
}

impl Artifact {
    fn text(name: &str, body: String) -> Self {
        Self {
            name: name.to_string(),
            body: body.into_bytes(),
        }
    }

    fn json(name: &str, value: &impl Serialize) -> Result<Self, CliError> {
        let mut body = serde_json::to_vec_pretty(value)?;
        body.push(b'\n');
        Ok(Self {
            name: name.to_string(),
            body,
        })
    }
}

fn parse<T: for<'de> Deserialize<'de>>(params: &Value) -> Result<T, CliError> {
    serde_json::from_value(params.clone()).map_err(|e| CliError::Validation(e.to_string()))
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Parameters checked and ready to run.
pub enum Prepared {
    Pst(PstParams),
    Wavepacket(WavepacketParams),
    Ladder(LadderParams, Vec<LadderSpec>),
    Memory(MemoryConfig, MemoryParams),
}

pub fn prepare(kind: ExperimentKind, params: &Value) -> Result<Prepared, CliError> {
    match kind {
        ExperimentKind::Pst => {
            let p: PstParams = parse(params)?;
            p.validate()?;
            Ok(Prepared::Pst(p))
        }
        ExperimentKind::Wavepacket => {
            let p: WavepacketParams = parse(params)?;
            p.validate()?;
            Ok(Prepared::Wavepacket(p))
        }
        ExperimentKind::Ladder => {
            let p: LadderParams = parse(params)?;
            let specs = p.validate()?;
            Ok(Prepared::Ladder(p, specs))
        }
        ExperimentKind::Memory => {
            let p: MemoryConfig = parse(params)?;
            let mp = p.validate()?;
            Ok(Prepared::Memory(p, mp))
        }
    }
}

pub fn execute(prepared: &Prepared) -> Result<Vec<Artifact>, CliError> {
    match prepared {
        Prepared::Pst(p) => run_pst(p),
        Prepared::Wavepacket(p) => run_wavepacket(p),
        Prepared::Ladder(p, specs) => run_ladder(p, specs),
        Prepared::Memory(p, mp) => run_memory(p, mp),
    }
}

fn default_samples() -> usize {
    401
}

// ---------------------------------------------------------------- pst

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PstParams {
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    /// Defaults to site 1.
    #[serde(default)]
    pub source: Option<usize>,
    /// Defaults to site `n`.
    #[serde(default)]
    pub target: Option<usize>,
    /// Defaults to `pi`, one full period of the engineered chains.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl PstParams {
    fn validate(&self) -> Result<(), CliError> {
        engineered_couplings(self.n, self.k)?;
        for site in [self.source(), self.target()] {
            if site == 0 || site > self.n {
                return Err(invalid(format!("site {site} outside 1..={}", self.n)));
            }
        }
        if !(self.t_max() > 0.0) || !self.t_max().is_finite() {
            return Err(invalid("t_max must be positive"));
        }
        if self.samples < 2 {
            return Err(invalid("samples must be at least 2"));
        }
        Ok(())
    }

    fn source(&self) -> usize {
        self.source.unwrap_or(1)
    }

    fn target(&self) -> usize {
        self.target.unwrap_or(self.n)
    }

    fn t_max(&self) -> f64 {
        self.t_max.unwrap_or(PI)
    }
}

fn run_pst(p: &PstParams) -> Result<Vec<Artifact>, CliError> {
    let profile = engineered_couplings(p.n, p.k)?;
    let h = xy_chain_single_excitation(&profile);
    let mirror: Vec<usize> = (0..p.n).rev().collect();
    let report = analyze_spectrum(&h, &mirror)?;
    let deviation = match (report.spmc_verdict, report.e0) {
        (SpmcVerdict::Holds, Some(e0)) => Some(evolution_is_mirror(&h, e0, &mirror)?),
        _ => None,
    };
    let trace = transfer_fidelity(&h, p.source(), p.target(), &uniform_times(p.t_max(), p.samples))?;
    let peak = trace.peak();

    let mut couplings = String::from("bond,coupling\n");
    for (i, c) in profile.couplings.iter().enumerate() {
        couplings.push_str(&format!("{},{}\n", i + 1, fmt12(*c)));
    }
    let summary = json!({
        "n": p.n,
        "k": p.k,
        "source": p.source(),
        "target": p.target(),
        "spectrum": report,
        "evolution_mirror_deviation": deviation,
        "peak": peak.map(|(t, f)| json!({"t": t, "fidelity": f})),
    });
    Ok(vec![
        Artifact::text("couplings.csv", couplings),
        Artifact::text("fidelity.csv", trace.to_csv()),
        Artifact::json("spectrum.json", &summary)?,
    ])
}

// ---------------------------------------------------------- wavepacket

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavepacketParams {
    /// Transfer distance `L`; the packet starts `L/2` left of the centre.
    pub distance: usize,
    pub delta: f64,
    #[serde(default)]
    pub n_sites: Option<usize>,
    /// Fixed field scale; when absent the scale is scanned.
    #[serde(default)]
    pub lambda_scale: Option<f64>,
    #[serde(default = "WavepacketParams::default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "WavepacketParams::default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "WavepacketParams::default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "WavepacketParams::default_horizon_periods")]
    pub horizon_periods: f64,
    #[serde(default = "WavepacketParams::default_trace_samples")]
    pub samples: usize,
}

impl WavepacketParams {
    fn default_lambda_min() -> f64 {
        1e-6
    }
    fn default_lambda_max() -> f64 {
        1e-1
    }
    fn default_grid_points() -> usize {
        26
    }
    fn default_horizon_periods() -> f64 {
        1.5
    }
    fn default_trace_samples() -> usize {
        801
    }

    fn n_sites(&self) -> usize {
        self.n_sites.unwrap_or_else(|| spinbus_core::dynamics::default_scan_sites(self.distance))
    }

    fn spec(&self, lambda_scale: f64) -> WavepacketSpec {
        WavepacketSpec {
            n_sites: self.n_sites(),
            n_a: -((self.distance / 2) as i64),
            delta: self.delta,
            lambda_scale,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.distance == 0 || self.distance % 2 == 1 {
            return Err(invalid(format!("distance {} must be even and positive", self.distance)));
        }
        self.spec(self.lambda_scale.unwrap_or(1.0)).validate()?;
        if self.lambda_scale.is_none() {
            if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min) {
                return Err(invalid("need 0 < lambda_min < lambda_max"));
            }
            if self.grid_points < 2 {
                return Err(invalid("grid_points must be at least 2"));
            }
        }
        if !(self.horizon_periods > 0.0) {
            return Err(invalid("horizon_periods must be positive"));
        }
        if self.samples < 2 {
            return Err(invalid("samples must be at least 2"));
        }
        Ok(())
    }
}

fn analytic_csv(times: &[f64], f: impl Fn(f64) -> f64) -> String {
    let values = times.iter().map(|&t| f(t)).collect();
    FidelityTrace {
        times: times.to_vec(),
        values,
        params: String::new(),
    }
    .to_csv()
}

fn run_wavepacket(p: &WavepacketParams) -> Result<Vec<Artifact>, CliError> {
    let j = 1.0;
    let mut out = Vec::new();
    let lambda = match p.lambda_scale {
        Some(l) => l,
        None => {
            let opts = ScanOptions {
                n_sites: Some(p.n_sites()),
                horizon_periods: p.horizon_periods,
                ..Default::default()
            };
            let grid = log_grid(p.lambda_min, p.lambda_max, p.grid_points);
            let scan = scan_field_scale(p.distance, p.delta, &grid, &opts)?;
            let mut table = String::from("lambda_scale,f_max,t_peak\n");
            for g in &scan.grid {
                table.push_str(&format!("{},{},{}\n", fmt12(g.lambda_scale), fmt12(g.f_max), fmt12(g.t_peak)));
            }
            out.push(Artifact::text("scan.csv", table));
            out.push(Artifact::json("scan.json", &scan)?);
            scan.best_lambda_scale
        }
    };
    let spec = p.spec(lambda);
    let h = spec.chain(j)?;
    let horizon = p.horizon_periods * spec.expected_period(j);
    let times = uniform_times(horizon, p.samples);
    let trace = packet_transfer_trace(&h, &spec, &times)?;
    let omega = spec.harmonic_frequency(j);
    let analytic = analytic_csv(&times, |t| {
        analytic_packet_fidelity_with_frequency(t, spec.alpha2(), spec.n_a as f64, omega)
    });
    out.push(Artifact::text("fidelity.csv", trace.to_csv()));
    out.push(Artifact::text("analytic.csv", analytic));
    out.push(Artifact::json(
        "packet.json",
        &json!({
            "spec": spec,
            "alpha2": spec.alpha2(),
            "b0": spec.b0(),
            "expected_period": spec.expected_period(j),
            "peak": trace.peak().map(|(t, f)| json!({"t": t, "fidelity": f})),
        }),
    )?);
    Ok(out)
}

// -------------------------------------------------------------- ladder

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderParams {
    /// Qubit separations `L = N + 1`.
    pub distances: Vec<usize>,
    pub j: f64,
    pub j0: f64,
    pub connection: Connection,
}

impl LadderParams {
    fn validate(&self) -> Result<Vec<LadderSpec>, CliError> {
        if self.distances.is_empty() {
            return Err(invalid("distances is empty"));
        }
        let mut specs = Vec::new();
        for &l in &self.distances {
            if l < 2 {
                return Err(invalid(format!("distance {l} must be at least 2")));
            }
            let spec = LadderSpec::new(l - 1, self.j, self.j0, self.connection)?;
            if spec.total_sites() > EXACT_MAX_SITES {
                return Err(SpinError::Capacity {
                    what: "ladder plus qubit sites",
                    requested: spec.total_sites(),
                    cap: EXACT_MAX_SITES,
                }
                .into());
            }
            specs.push(spec);
        }
        Ok(specs)
    }
}

fn run_ladder(p: &LadderParams, specs: &[LadderSpec]) -> Result<Vec<Artifact>, CliError> {
    let mut csv = String::from("L,J,J0,gap,jeff_perturbative\n");
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for spec in specs {
        let exact = exact_spin_gap(spec)?;
        let pert = if spec.ladder_sites() <= PERTURBATIVE_MAX_LADDER_SITES {
            Some(perturbative_jeff(spec)?)
        } else {
            None
        };
        let states = lowest_reduced_states(spec, 2)?;
        let gap = exact.j_eff.abs();
        gaps.push(gap);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            spec.distance(),
            fmt12(spec.j),
            fmt12(spec.j0),
            fmt12(gap),
            pert.as_ref().map(|r| fmt12(r.j_eff)).unwrap_or_default()
        ));
        points.push(json!({
            "L": spec.distance(),
            "exact": exact,
            "perturbative": pert,
            "predicted_ground_spin": spec.predicted_ground_spin(),
            "lowest_states": states,
        }));
    }
    let xs: Vec<f64> = specs.iter().map(|s| s.distance() as f64).collect();
    let fit = if xs.len() >= 3 && gaps.iter().all(|g| *g > 0.0) {
        let (exponent, prefactor, r_squared) = power_law_fit(&xs, &gaps)?;
        Some(json!({"exponent": exponent, "prefactor": prefactor, "r_squared": r_squared}))
    } else {
        None
    };
    Ok(vec![
        Artifact::text("scaling.csv", csv),
        Artifact::json(
            "ladder.json",
            &json!({"connection": p.connection, "points": points, "fit": fit}),
        )?,
    ])
}

// -------------------------------------------------------------- memory

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryConfig {
    pub n: usize,
    pub j: f64,
    pub lambda: f64,
    #[serde(default = "MemoryConfig::default_s")]
    pub s: f64,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub b0: f64,
    #[serde(default)]
    pub gn_mun: f64,
    #[serde(default)]
    pub ge_mub: f64,
    /// Lorentzian half width for the decay rate; defaults to the mode
    /// spacing at resonance.
    #[serde(default)]
    pub broadening: Option<f64>,
    /// Defaults to `pi / g`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

/// Largest ring simulated in the mode picture (dense solve of `N + 1`).
pub const MEMORY_MAX_N: usize = 4095;

impl MemoryConfig {
    fn default_s() -> f64 {
        0.5
    }

    fn validate(&self) -> Result<MemoryParams, CliError> {
        let mp = MemoryParams {
            n: self.n,
            j: self.j,
            b0: self.b0,
            gn_mun: self.gn_mun,
            ge_mub: self.ge_mub,
            lambda: self.lambda,
            s: self.s,
            sigma: self.sigma,
        };
        mp.validate()?;
        if self.n > MEMORY_MAX_N {
            return Err(SpinError::Capacity {
                what: "ring size",
                requested: self.n,
                cap: MEMORY_MAX_N,
            }
            .into());
        }
        if let Some(b) = self.broadening {
            if !(b > 0.0) {
                return Err(invalid("broadening must be positive"));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) || !t.is_finite() {
                return Err(invalid("t_max must be positive"));
            }
        }
        if self.samples < 2 {
            return Err(invalid("samples must be at least 2"));
        }
        Ok(mp)
    }
}

fn run_memory(p: &MemoryConfig, mp: &MemoryParams) -> Result<Vec<Artifact>, CliError> {
    let modes = mode_couplings(mp)?;
    let g = mp.g();
    let broadening = match p.broadening {
        Some(b) => b,
        None => default_broadening(mp)?,
    };
    let gamma = decay_rate(mp, &modes, broadening)?;
    let t_max = p.t_max.unwrap_or(PI / g);
    let times = uniform_times(t_max, p.samples);
    let trace = simulate_inhomogeneous(mp, &modes, &times)?;

    let mut out = vec![
        Artifact::text("modes.csv", mode_table_csv(mp, &modes)?),
        Artifact::text("fidelity.csv", trace.to_csv()),
    ];
    if gamma < g {
        out.push(Artifact::text(
            "analytic.csv",
            analytic_csv(&times, |t| analytic_storage_fidelity(t, gamma, g).unwrap_or(f64::NAN)),
        ));
    }
    let storage = if mp.sigma.is_none() && mp.b0 == 0.0 {
        let h = 0.5;
        let plus = DensityMatrix::new(
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
        );
        Some(simulate_storage_map(mp, &plus)?)
    } else {
        None
    };
    let ring = if mp.n <= EXACT_RING_MAX && (mp.s - 0.5).abs() < 1e-12 {
        Some(exact_ring_validation(mp)?)
    } else {
        None
    };
    out.push(Artifact::json(
        "memory.json",
        &json!({
            "params": mp,
            "g": g,
            "storage_time": mp.storage_time(),
            "broadening": broadening,
            "gamma": gamma,
            "gamma_over_g": gamma / g,
            "chi_weight": modes.total_weight(),
            "storage_map": storage,
            "ring_validation": ring,
        }),
    )?);
    Ok(out)
}
