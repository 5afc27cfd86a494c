//! Unitary evolution by spectral decomposition, transfer fidelities and the
//! Gaussian wavepacket experiments on the parabolic-field chain.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::format::fmt12;
use crate::matrix::HamiltonianMatrix;
use crate::models::{parabolic_chain_single_excitation, FieldProfile};
use crate::spectral::{dense_spectrum, tridiagonal_projections, Eigendecomposition};

/// Sampled fidelity curve with a free-form provenance string.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub params: String,
}

impl FidelityTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, params: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(SpinError::domain("times and values differ in length"));
        }
        Ok(Self {
            times,
            values,
            params: params.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t,fidelity` table at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,fidelity\n");
        for (t, f) in self.times.iter().zip(&self.values) {
            out.push_str(&fmt12(*t));
            out.push(',');
            out.push_str(&fmt12(*f));
            out.push('\n');
        }
        out
    }

    /// Largest sample, refined by a parabola through it and its neighbours
    /// when the grid is locally uniform.
    pub fn peak(&self) -> Option<(f64, f64)> {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        let (t, v) = (&self.times, &self.values);
        if i == 0 || i + 1 == v.len() {
            return Some((t[i], v[i]));
        }
        let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        if (h0 - h1).abs() > 1e-9 * h0.abs().max(h1.abs()) {
            return Some((t[i], v[i]));
        }
        let denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
        if denom >= 0.0 {
            return Some((t[i], v[i]));
        }
        let x = 0.5 * (v[i - 1] - v[i + 1]) / denom;
        Some((t[i] + x * h0, v[i] - 0.25 * (v[i - 1] - v[i + 1]) * x))
    }
}

/// `n` equally spaced times from `0` to `t_end` inclusive.
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `exp(-i H t) psi0` from a full eigendecomposition of `H`.
pub fn evolve_state(eig: &Eigendecomposition, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    let n = eig.dim();
    if psi0.len() != n {
        return Err(SpinError::domain(format!(
            "state has dimension {}, Hamiltonian {n}",
            psi0.len()
        )));
    }
    let v = &eig.vectors;
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            let c: Complex64 = v.column(k).iter().zip(psi0).map(|(a, b)| b * *a).sum();
            c * Complex64::from_polar(1.0, -eig.values[k] * t)
        })
        .collect();
    Ok((0..n)
        .map(|r| (0..n).map(|k| coeffs[k] * v[(r, k)]).sum())
        .collect())
}

/// `<target| exp(-i H t) |source>` for real vectors, held as a sum of
/// `dim` phases so that each time point costs `O(dim)`.
#[derive(Debug, Clone)]
pub struct TransitionAmplitude {
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl TransitionAmplitude {
    /// Tridiagonal operators use implicit QL with projections only; anything
    /// else goes through the dense solver.
    pub fn new(h: &HamiltonianMatrix, source: &[f64], target: &[f64]) -> Result<Self> {
        let n = h.dim();
        if source.len() != n || target.len() != n {
            return Err(SpinError::domain(format!(
                "vectors of length {} and {} for a {n}-dimensional Hamiltonian",
                source.len(),
                target.len()
            )));
        }
        let (energies, weights) = match h.as_tridiagonal() {
            Some((d, e)) => {
                let (vals, rows) = tridiagonal_projections(&d, &e, &[source, target])?;
                let w = rows[0].iter().zip(&rows[1]).map(|(a, b)| a * b).collect();
                (vals, w)
            }
            None => {
                let eig = dense_spectrum(h)?;
                let ps = eig.project(source);
                let pt = eig.project(target);
                (eig.values, ps.iter().zip(&pt).map(|(a, b)| a * b).collect())
            }
        };
        Ok(Self { energies, weights })
    }

    pub fn at(&self, t: f64) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (e, w) in self.energies.iter().zip(&self.weights) {
            let (s, c) = (e * t).sin_cos();
            re += w * c;
            im -= w * s;
        }
        Complex64::new(re, im)
    }

    pub fn fidelity(&self, t: f64) -> f64 {
        self.at(t).norm()
    }

    pub fn trace(&self, times: &[f64], params: impl Into<String>) -> FidelityTrace {
        let values = times.par_iter().map(|&t| self.fidelity(t)).collect();
        FidelityTrace {
            times: times.to_vec(),
            values,
            params: params.into(),
        }
    }

    /// Local maxima of the fidelity on `[0, horizon]`, located on a grid of
    /// step `dt` and polished by golden-section search. Sorted by time.
    pub fn peaks(&self, horizon: f64, dt: f64) -> Vec<(f64, f64)> {
        let n = (horizon / dt).ceil().max(2.0) as usize;
        let step = horizon / n as f64;
        let f: Vec<f64> = (0..=n).into_par_iter().map(|i| self.fidelity(i as f64 * step)).collect();
        let mut out = Vec::new();
        for i in 0..=n {
            let left = if i == 0 { f64::NEG_INFINITY } else { f[i - 1] };
            let right = if i == n { f64::NEG_INFINITY } else { f[i + 1] };
            if f[i] >= left && f[i] > right {
                let lo = (i as f64 - 1.0).max(0.0) * step;
                let hi = ((i + 1).min(n)) as f64 * step;
                let (t, v) = golden_max(|t| self.fidelity(t), lo, hi, 1e-10 * horizon.max(1.0));
                out.push(if v >= f[i] { (t, v) } else { (i as f64 * step, f[i]) });
            }
        }
        out
    }
}

/// Maximum of a unimodal function on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

fn site_vector(n: usize, site: usize) -> Result<Vec<f64>> {
    if site == 0 || site > n {
        return Err(SpinError::domain(format!("site {site} outside 1..={n}")));
    }
    let mut v = vec![0.0; n];
    v[site - 1] = 1.0;
    Ok(v)
}

/// `|<target| exp(-i H t) |source>|` for a single-excitation model. Sites are
/// numbered from 1.
pub fn transfer_fidelity(h: &HamiltonianMatrix, source: usize, target: usize, times: &[f64]) -> Result<FidelityTrace> {
    let n = h.dim();
    let src = site_vector(n, source)?;
    let tgt = site_vector(n, target)?;
    let amp = TransitionAmplitude::new(h, &src, &tgt)?;
    Ok(amp.trace(times, format!("{} source={source} target={target}", h.model_tag())))
}

/// A Gaussian packet on a `2N + 1` site chain in the parabolic field tuned
/// to its width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavepacketSpec {
    pub n_sites: usize,
    /// Packet centre, as a signed offset from the chain centre.
    pub n_a: i64,
    /// Full width at half maximum of the probability, in sites.
    pub delta: f64,
    pub lambda_scale: f64,
}

impl WavepacketSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 3 || self.n_sites % 2 == 0 {
            return Err(SpinError::domain(format!(
                "packet chain needs an odd length >= 3, got {}",
                self.n_sites
            )));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(SpinError::domain(format!("width {} must be > 0", self.delta)));
        }
        if !(self.lambda_scale > 0.0) || !self.lambda_scale.is_finite() {
            return Err(SpinError::domain(format!("field scale {} must be > 0", self.lambda_scale)));
        }
        if self.n_a.unsigned_abs() as usize > self.half_length() {
            return Err(SpinError::domain(format!(
                "centre offset {} lies outside a chain of half length {}",
                self.n_a,
                self.half_length()
            )));
        }
        Ok(())
    }

    pub fn half_length(&self) -> usize {
        (self.n_sites - 1) / 2
    }

    /// `alpha^2 = 4 ln 2 / Delta^2`.
    pub fn alpha2(&self) -> f64 {
        4.0 * LN_2 / (self.delta * self.delta)
    }

    /// `B0 = 8 (ln 2 / Delta^2)^2 lambda`.
    pub fn b0(&self) -> f64 {
        let a = LN_2 / (self.delta * self.delta);
        8.0 * a * a * self.lambda_scale
    }

    /// Small-amplitude oscillation frequency `alpha^2 sqrt(lambda J)` of a
    /// packet in the field.
    pub fn harmonic_frequency(&self, j: f64) -> f64 {
        self.alpha2() * (self.lambda_scale * j).sqrt()
    }

    /// Revival period `2 pi / omega`; the mirror image is reached after half
    /// of it.
    pub fn expected_period(&self, j: f64) -> f64 {
        2.0 * PI / self.harmonic_frequency(j)
    }

    /// Parabolic chain with exchange `j` matching this packet.
    pub fn chain(&self, j: f64) -> Result<HamiltonianMatrix> {
        self.validate()?;
        let field = FieldProfile::parabolic(self.n_sites, self.b0())?;
        parabolic_chain_single_excitation(self.n_sites, j, &field)
    }
}

/// Normalized amplitudes `exp(-alpha^2 (i - N_A - 1 - N)^2 / 2)`, `i = 1..2N+1`.
pub fn gaussian_packet(spec: &WavepacketSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let a2 = spec.alpha2();
    let centre = spec.n_a as f64 + spec.half_length() as f64 + 1.0;
    let mut v: Vec<f64> = (1..=spec.n_sites)
        .map(|i| (-0.5 * a2 * (i as f64 - centre).powi(2)).exp())
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

/// Harmonic-limit fidelity between a packet released at `N_A` and its mirror
/// image, `exp[-alpha^2 N_A^2 (1 + cos(omega t)) / 2]`.
pub fn analytic_packet_fidelity_with_frequency(t: f64, alpha2: f64, n_a: f64, omega: f64) -> f64 {
    (-0.5 * alpha2 * n_a * n_a * (1.0 + (omega * t).cos())).exp()
}

/// Harmonic-limit fidelity for `J = lambda = 1`, where `omega = alpha^2`:
/// period `2 pi / alpha^2`, maximum 1 at `t = pi / alpha^2`.
pub fn analytic_packet_fidelity(t: f64, alpha2: f64, n_a: f64) -> f64 {
    analytic_packet_fidelity_with_frequency(t, alpha2, n_a, alpha2)
}

fn packet_amplitude(h: &HamiltonianMatrix, spec: &WavepacketSpec) -> Result<TransitionAmplitude> {
    if h.dim() != spec.n_sites {
        return Err(SpinError::domain(format!(
            "Hamiltonian has dimension {}, packet chain {} sites",
            h.dim(),
            spec.n_sites
        )));
    }
    let src = gaussian_packet(spec)?;
    let tgt: Vec<f64> = src.iter().rev().copied().collect();
    TransitionAmplitude::new(h, &src, &tgt)
}

/// Fidelity of the evolved packet against its site-reflected image.
pub fn packet_transfer_trace(h: &HamiltonianMatrix, spec: &WavepacketSpec, times: &[f64]) -> Result<FidelityTrace> {
    let amp = packet_amplitude(h, spec)?;
    Ok(amp.trace(
        times,
        format!(
            "{} n_a={} delta={} lambda_scale={}",
            h.model_tag(),
            spec.n_a,
            spec.delta,
            spec.lambda_scale
        ),
    ))
}

/// Spacing of the first two mirror arrivals found on `[0, horizon]`.
pub fn revival_period(h: &HamiltonianMatrix, spec: &WavepacketSpec, horizon: f64, dt: f64, j: f64) -> Result<Option<f64>> {
    let amp = packet_amplitude(h, spec)?;
    Ok(arrival_spacing(&amp.peaks(horizon, dt), 0.25 * spec.expected_period(j)))
}

/// Local maxima closer than `min_gap` are merged into one arrival (the
/// fringes of a dispersed packet); arrivals below half the best one are
/// ignored.
fn arrival_spacing(peaks: &[(f64, f64)], min_gap: f64) -> Option<f64> {
    let mut arrivals: Vec<(f64, f64)> = Vec::new();
    for &(t, f) in peaks {
        match arrivals.last_mut() {
            Some(last) if t - last.0 < min_gap => {
                if f > last.1 {
                    *last = (t, f);
                }
            }
            _ => arrivals.push((t, f)),
        }
    }
    let best = arrivals.iter().map(|p| p.1).fold(0.0, f64::max);
    let times: Vec<f64> = arrivals.iter().filter(|p| p.1 >= 0.5 * best).map(|p| p.0).collect();
    (times.len() >= 2).then(|| times[1] - times[0])
}

/// Settings of [`scan_field_scale`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    /// Chain length; `None` picks [`default_scan_sites`].
    pub n_sites: Option<usize>,
    pub j: f64,
    /// Absolute time horizon; `None` means `horizon_periods` revival periods
    /// of each trial field.
    pub horizon: Option<f64>,
    pub horizon_periods: f64,
    pub samples_per_period: usize,
    /// Relative tolerance of the refinement in the field scale.
    pub rel_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            n_sites: None,
            j: 1.0,
            horizon: None,
            horizon_periods: 1.5,
            samples_per_period: 400,
            rel_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda_scale: f64,
    pub f_max: f64,
    pub t_peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub distance: usize,
    pub delta: f64,
    pub n_sites: usize,
    pub best_lambda_scale: f64,
    pub f_max: f64,
    pub t_peak: f64,
    pub period_estimate: Option<f64>,
    pub grid: Vec<ScanPoint>,
}

/// Chain length used when a scan does not fix it: the packets sit
/// `DEFAULT_SCAN_MARGIN` sites in from the ends.
pub const DEFAULT_SCAN_MARGIN: usize = 100;

pub fn default_scan_sites(distance: usize) -> usize {
    distance + 2 * DEFAULT_SCAN_MARGIN + 1
}

#[derive(Clone, Copy)]
struct PeakEval {
    f_max: f64,
    t_peak: f64,
    period: Option<f64>,
}

fn evaluate_scale(distance: usize, delta: f64, lambda_scale: f64, n_sites: usize, opts: &ScanOptions) -> Result<PeakEval> {
    let spec = WavepacketSpec {
        n_sites,
        n_a: -((distance / 2) as i64),
        delta,
        lambda_scale,
    };
    let h = spec.chain(opts.j)?;
    let amp = packet_amplitude(&h, &spec)?;
    let period = spec.expected_period(opts.j);
    let horizon = opts.horizon.unwrap_or(opts.horizon_periods * period);
    // resolve both the revival period and the passage of a packet of width
    // 1/alpha at the largest group velocity J
    let dt = (period / opts.samples_per_period.max(1) as f64).min(0.25 / (spec.alpha2().sqrt() * opts.j));
    let peaks = amp.peaks(horizon, dt);
    let (t_peak, f_max) = peaks
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0.0, amp.fidelity(0.0)));
    Ok(PeakEval {
        f_max,
        t_peak,
        period: arrival_spacing(&peaks, 0.25 * period),
    })
}

/// Best mirror-transfer fidelity over the field scale for packets `L`
/// sites apart: grid search, then golden-section refinement in `log lambda`
/// between the neighbours of the grid optimum.
pub fn scan_field_scale(distance: usize, delta: f64, grid: &[f64], opts: &ScanOptions) -> Result<ScanResult> {
    if grid.is_empty() {
        return Err(SpinError::domain("field-scale grid is empty"));
    }
    if distance == 0 || distance % 2 == 1 {
        return Err(SpinError::domain(format!("distance {distance} must be even and positive")));
    }
    if let Some(&bad) = grid.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(SpinError::domain(format!("field scale {bad} must be > 0")));
    }
    if let Some(h) = opts.horizon {
        if !(h > 0.0) {
            return Err(SpinError::domain(format!("horizon {h} must be > 0")));
        }
    }
    let n_sites = opts.n_sites.unwrap_or_else(|| default_scan_sites(distance));
    if n_sites < distance + 1 {
        return Err(SpinError::domain(format!(
            "chain of {n_sites} sites is shorter than the transfer distance {distance}"
        )));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let evals: Vec<PeakEval> = sorted
        .par_iter()
        .map(|&l| evaluate_scale(distance, delta, l, n_sites, opts))
        .collect::<Result<_>>()?;
    let points: Vec<ScanPoint> = sorted
        .iter()
        .zip(&evals)
        .map(|(&l, e)| ScanPoint {
            lambda_scale: l,
            f_max: e.f_max,
            t_peak: e.t_peak,
        })
        .collect();
    let (ib, _) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.f_max.total_cmp(&b.1.f_max))
        .unwrap();

    let mut best_lambda = sorted[ib];
    let mut best = evals[ib];
    if sorted.len() >= 2 {
        let lo = sorted[ib.saturating_sub(1)].ln();
        let hi = sorted[(ib + 1).min(sorted.len() - 1)].ln();
        let tol = (1.0 + opts.rel_tol).ln();
        let objective = |x: f64| {
            evaluate_scale(distance, delta, x.exp(), n_sites, opts)
                .map(|e| e.f_max)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let (x, _) = golden_max(objective, lo, hi, tol);
        let refined = evaluate_scale(distance, delta, x.exp(), n_sites, opts)?;
        if refined.f_max > best.f_max {
            best_lambda = x.exp();
            best = refined;
        }
    }
    Ok(ScanResult {
        distance,
        delta,
        n_sites,
        best_lambda_scale: best_lambda,
        f_max: best.f_max,
        t_peak: best.t_peak,
        period_estimate: best.period,
        grid: points,
    })
}

/// `n` logarithmically spaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{engineered_couplings, xy_chain_single_excitation};
    use std::f64::consts::FRAC_PI_2;

    fn engineered(n: usize, k: usize) -> HamiltonianMatrix {
        xy_chain_single_excitation(&engineered_couplings(n, k).unwrap())
    }

    #[test]
    fn evolve_trivial_cases() {
        let h = engineered(5, 0);
        let eig = dense_spectrum(&h).unwrap();
        let psi0: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let norm = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi0: Vec<Complex64> = psi0.iter().map(|c| c / norm).collect();
        let same = evolve_state(&eig, &psi0, 0.0).unwrap();
        for (a, b) in same.iter().zip(&psi0) {
            assert!((a - b).norm() < 1e-12);
        }
        let later = evolve_state(&eig, &psi0, 3.7).unwrap();
        let n2: f64 = later.iter().map(|c| c.norm_sqr()).sum();
        assert!((n2 - 1.0).abs() < 1e-12);

        let phi: Vec<Complex64> = eig.vectors.column(2).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let out = evolve_state(&eig, &phi, 1.3).unwrap();
        let phase = Complex64::from_polar(1.0, -eig.values[2] * 1.3);
        for (a, b) in out.iter().zip(&phi) {
            assert!((a - b * phase).norm() < 1e-12);
        }
        assert!(evolve_state(&eig, &phi[..4], 1.0).is_err());
    }

    #[test]
    fn two_level_rabi() {
        let h = HamiltonianMatrix::tridiagonal(&[0.0, 0.0], &[0.7], "dimer");
        let times = uniform_times(5.0, 11);
        let tr = transfer_fidelity(&h, 1, 2, &times).unwrap();
        for (t, f) in tr.times.iter().zip(&tr.values) {
            assert!((f - (0.7 * t).sin().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_transfer_engineered() {
        let tr = transfer_fidelity(&engineered(2, 0), 1, 2, &[FRAC_PI_2]).unwrap();
        assert!((tr.values[0] - 1.0).abs() < 1e-12);
        let tr = transfer_fidelity(&engineered(6, 0), 1, 6, &[0.0, FRAC_PI_2]).unwrap();
        assert!(tr.values[0].abs() < 1e-15);
        assert!((tr.values[1] - 1.0).abs() < 1e-8);
        assert!(transfer_fidelity(&engineered(6, 0), 0, 6, &[0.0]).is_err());
        assert!(transfer_fidelity(&engineered(6, 0), 1, 7, &[0.0]).is_err());
    }

    #[test]
    fn dense_and_tridiagonal_paths_agree() {
        let h = engineered(7, 0);
        let src = site_vector(7, 2).unwrap();
        let tgt = site_vector(7, 5).unwrap();
        let fast = TransitionAmplitude::new(&h, &src, &tgt).unwrap();
        let mut t = h.entries();
        t.push((0, 6, 1e-30));
        t.push((6, 0, 1e-30));
        let general = HamiltonianMatrix::from_triplets(7, t, "x");
        assert!(general.as_tridiagonal().is_none());
        let slow = TransitionAmplitude::new(&general, &src, &tgt).unwrap();
        for t in [0.1, 0.9, 2.4] {
            assert!((fast.at(t) - slow.at(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn csv_format() {
        let tr = FidelityTrace::new(vec![0.0, 0.5], vec![1.0, 1.0 / 3.0], "x").unwrap();
        assert_eq!(tr.to_csv(), "t,fidelity\n0,1\n0.5,0.333333333333\n");
        assert!(FidelityTrace::new(vec![0.0], vec![], "x").is_err());
    }

    #[test]
    fn quadratic_peak_refinement() {
        let times = uniform_times(2.0, 21);
        let values: Vec<f64> = times.iter().map(|t| 1.0 - (t - 1.03f64).powi(2)).collect();
        let tr = FidelityTrace::new(times, values, "").unwrap();
        let (t, v) = tr.peak().unwrap();
        assert!((t - 1.03).abs() < 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packet_basics() {
        let spec = WavepacketSpec {
            n_sites: 41,
            n_a: -7,
            delta: 4.0,
            lambda_scale: 1.0,
        };
        assert!((spec.alpha2() - LN_2 / 4.0).abs() < 1e-15);
        let p = gaussian_packet(&spec).unwrap();
        let norm: f64 = p.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        let imax = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(imax + 1, 21 - 7);
        assert!(gaussian_packet(&WavepacketSpec { n_a: 21, ..spec }).is_err());
        assert!(gaussian_packet(&WavepacketSpec { delta: 0.0, ..spec }).is_err());
        assert!(gaussian_packet(&WavepacketSpec { n_sites: 40, ..spec }).is_err());
    }

    #[test]
    fn analytic_form() {
        let a2 = 0.3;
        assert!((analytic_packet_fidelity(PI / a2, a2, 4.0) - 1.0).abs() < 1e-15);
        assert!((analytic_packet_fidelity(0.0, a2, 4.0) - (-a2 * 16.0f64).exp()).abs() < 1e-15);
        for t in [0.3, 2.0, 7.7] {
            let p = 2.0 * PI / a2;
            assert!((analytic_packet_fidelity(t, a2, 4.0) - analytic_packet_fidelity(t + p, a2, 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn packet_initial_overlap_is_gaussian() {
        let spec = WavepacketSpec {
            n_sites: 81,
            n_a: -5,
            delta: 10.0,
            lambda_scale: 1.0,
        };
        let h = spec.chain(1.0).unwrap();
        let tr = packet_transfer_trace(&h, &spec, &[0.0]).unwrap();
        let p = gaussian_packet(&spec).unwrap();
        let direct: f64 = p.iter().zip(p.iter().rev()).map(|(a, b)| a * b).sum();
        assert!((tr.values[0] - direct).abs() < 1e-12);
        assert!((tr.values[0] - (-spec.alpha2() * 25.0).exp()).abs() < 1e-3);
        let wrong = WavepacketSpec { n_sites: 79, ..spec }.chain(1.0).unwrap();
        assert!(packet_transfer_trace(&wrong, &spec, &[0.0]).is_err());
    }

    #[test]
    fn harmonic_regime_matches_analytic() {
        let spec = WavepacketSpec {
            n_sites: 101,
            n_a: 5,
            delta: 10.0,
            lambda_scale: 1.0,
        };
        let h = spec.chain(1.0).unwrap();
        let period = spec.expected_period(1.0);
        let times = uniform_times(period, 801);
        let tr = packet_transfer_trace(&h, &spec, &times).unwrap();
        let sup = tr
            .times
            .iter()
            .zip(&tr.values)
            .map(|(&t, &f)| (f - analytic_packet_fidelity(t, spec.alpha2(), 5.0)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-2, "sup {sup}");
        let measured = revival_period(&h, &spec, 2.5 * period, period / 400.0, 1.0).unwrap().unwrap();
        assert!((measured / period - 1.0).abs() < 0.05);
    }

    #[test]
    fn scan_rejects_bad_input() {
        let o = ScanOptions::default();
        assert!(scan_field_scale(20, 2.0, &[], &o).is_err());
        assert!(scan_field_scale(21, 2.0, &[1.0], &o).is_err());
        assert!(scan_field_scale(20, 2.0, &[-1.0], &o).is_err());
    }

    #[test]
    fn small_scan_finds_interior_optimum() {
        let o = ScanOptions {
            n_sites: Some(61),
            ..Default::default()
        };
        let r = scan_field_scale(20, 4.0, &log_grid(1e-3, 10.0, 9), &o).unwrap();
        assert!(r.f_max <= 1.0 + 1e-12);
        assert!(r.grid.iter().all(|p| p.f_max <= r.f_max + 1e-12));
        assert!(r.f_max > 0.9, "{r:?}");
    }
}
