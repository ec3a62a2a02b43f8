//! Time evolution for `i u_t + Δu + λ|u|^{2κ} u = 0` on the periodic grid.
//!
//! The free group is `S(t) = e^{itΔ}`, acting on the lattice as multiplication
//! by `e^{-it|ξ|^2}`. The integrator is Strang splitting with the exact
//! nonlinear phase rotation, so both substeps are L²-isometries.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::DecompositionSymbols;
use crate::error::{BlowupCause, Error, Result};
use crate::grid::{neumaier, same_grid, Field, GridSpec, SpectralField};
use crate::norms::{modulation_norm, Variant};
use crate::quadrature::{composite, gauss_legendre, integration_matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub lambda: f64,
    pub kappa: u32,
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule truncation after every nonlinear substep.
    pub dealias: bool,
    /// Record a snapshot every `snapshot_stride` steps; 0 keeps only the endpoints.
    pub snapshot_stride: usize,
    /// Cap on `|λ| max|u|^{2κ} dt`; shrinks the step when set.
    #[serde(default)]
    pub max_phase_per_step: Option<f64>,
    /// Keep diagnostics at every record but fields only for the initial and latest one.
    #[serde(default)]
    pub diagnostics_only: bool,
    /// Stop once `||∇u||_2 > resolution_fraction * xi_max * ||u||_2`.
    #[serde(default = "default_resolution_fraction")]
    pub resolution_fraction: f64,
}

fn default_resolution_fraction() -> f64 {
    0.5
}

impl EvolutionConfig {
    pub fn new(lambda: f64, kappa: u32, dt: f64, t_end: f64) -> Self {
        Self {
            lambda,
            kappa,
            dt,
            t_end,
            dealias: false,
            snapshot_stride: 1,
            max_phase_per_step: None,
            diagnostics_only: false,
            resolution_fraction: default_resolution_fraction(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {}", self.lambda)));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidParameter("kappa must be >= 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end = {}", self.t_end)));
        }
        if !(self.resolution_fraction > 0.0) {
            return Err(Error::InvalidParameter(format!("resolution fraction {}", self.resolution_fraction)));
        }
        if let Some(p) = self.max_phase_per_step {
            if !(p > 0.0) {
                return Err(Error::InvalidParameter(format!("max phase per step {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub grad_norm: f64,
    /// `Im ∫ x_a ū ∂_a u`, absent when the field is not decayed at the boundary.
    pub virial: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: EvolutionConfig,
    pub snapshots: Vec<(f64, Field)>,
    pub diagnostics: Vec<Diagnostics>,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &Field {
        &self.snapshots.last().expect("trajectory holds the initial state").1
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.0)
    }

    /// `max_t |M(t) - M(0)| / M(0)`.
    pub fn mass_drift(&self) -> f64 {
        relative_drift(self.diagnostics.iter().map(|d| d.mass))
    }

    /// `max_t |E(t) - E(0)| / max(|E(0)|, ||∇u_0||^2)`.
    pub fn energy_drift(&self) -> f64 {
        let Some(first) = self.diagnostics.first() else {
            return 0.0;
        };
        let scale = first.energy.abs().max(first.grad_norm.powi(2));
        if scale == 0.0 {
            return 0.0;
        }
        self.diagnostics.iter().map(|d| (d.energy - first.energy).abs() / scale).fold(0.0, f64::max)
    }

    fn record(&mut self, t: f64, u: Field) {
        self.diagnostics.push(diagnostics(t, &u, &self.config));
        if self.config.diagnostics_only && self.snapshots.len() >= 2 {
            self.snapshots.pop();
        }
        self.snapshots.push((t, u));
    }
}

fn relative_drift(values: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst = 0.0_f64;
    for v in values {
        let f = *first.get_or_insert(v);
        if f != 0.0 {
            worst = worst.max(((v - f) / f).abs());
        } else {
            worst = worst.max(v.abs());
        }
    }
    worst
}

fn diagnostics(t: f64, u: &Field, cfg: &EvolutionConfig) -> Diagnostics {
    let spec = u.to_spectral();
    Diagnostics {
        t,
        mass: mass(u),
        energy: energy_with_spectrum(u, &spec, cfg.lambda, cfg.kappa),
        grad_norm: grad_norm(&spec),
        virial: virial_momentum(u).ok(),
    }
}

/// Multiply by `e^{-it|ξ|^2}`.
pub fn free_propagate(f: &SpectralField, t: f64) -> SpectralField {
    let xi2 = f.grid.frequency_sq();
    propagate_with(f, &xi2, t)
}

fn propagate_with(f: &SpectralField, xi2: &[f64], t: f64) -> SpectralField {
    let coefficients =
        f.coefficients.par_iter().zip(xi2.par_iter()).map(|(z, r2)| z * Complex64::from_polar(1.0, -t * r2)).collect();
    SpectralField { grid: f.grid, coefficients }
}

/// `u ↦ u exp(iλ|u|^{2κ} dt)`, the exact flow of `i u_t = -λ|u|^{2κ} u`.
pub fn nonlinear_phase_step(u: &Field, dt: f64, lambda: f64, kappa: u32) -> Field {
    let mut out = u.clone();
    apply_phase(&mut out.values, dt, lambda, kappa);
    out
}

fn apply_phase(values: &mut [Complex64], dt: f64, lambda: f64, kappa: u32) {
    if lambda == 0.0 {
        return;
    }
    values.par_iter_mut().for_each(|z| {
        let rho = z.norm_sqr().powi(kappa as i32);
        *z *= Complex64::from_polar(1.0, lambda * rho * dt);
    });
}

/// Precomputed multipliers for repeated steps on one grid.
struct Stepper {
    xi2: Vec<f64>,
    keep: Option<Vec<bool>>,
    lambda: f64,
    kappa: u32,
}

impl Stepper {
    fn new(grid: &GridSpec, cfg: &EvolutionConfig) -> Self {
        let keep = cfg.dealias.then(|| {
            let cut = 2.0 * grid.xi_max / 3.0;
            (0..grid.len()).map(|i| grid.frequency(i)[..grid.d].iter().all(|x| x.abs() <= cut)).collect()
        });
        Self { xi2: grid.frequency_sq(), keep, lambda: cfg.lambda, kappa: cfg.kappa }
    }

    fn step(&self, u: &SpectralField, dt: f64) -> SpectralField {
        let half = propagate_with(u, &self.xi2, 0.5 * dt);
        let mut phys = half.to_physical();
        apply_phase(&mut phys.values, dt, self.lambda, self.kappa);
        let mut spec = phys.to_spectral();
        if let Some(keep) = &self.keep {
            for (z, k) in spec.coefficients.iter_mut().zip(keep) {
                if !k {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
        propagate_with(&spec, &self.xi2, 0.5 * dt)
    }
}

/// One Strang step of size `cfg.dt`.
pub fn strang_step(u: &Field, cfg: &EvolutionConfig) -> Result<Field> {
    cfg.validate()?;
    let stepper = Stepper::new(&u.grid, cfg);
    Ok(stepper.step(&u.to_spectral(), cfg.dt).to_physical())
}

/// Integrate from `t = 0` to `cfg.t_end`.
///
/// Stops with [`Error::BlowupDetected`] when a value turns non-finite or when
/// `||∇u||_2 > xi_max ||u||_2 / 2`; the error carries everything recorded so far.
pub fn evolve(u0: &Field, cfg: &EvolutionConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data"));
    }
    let grid = u0.grid;
    let stepper = Stepper::new(&grid, cfg);
    let mut traj = Trajectory { config: *cfg, snapshots: Vec::new(), diagnostics: Vec::new(), steps: 0 };
    traj.record(0.0, u0.clone());
    let mut u = u0.to_spectral();
    let mut peak = u0.peak();
    let mut t = 0.0;
    let end_tol = 1e-12 * cfg.t_end.max(cfg.dt);
    let mut last_recorded = 0usize;
    while cfg.t_end - t > end_tol {
        let mut h = cfg.dt.min(cfg.t_end - t);
        if let Some(cap) = cfg.max_phase_per_step {
            let rate = cfg.lambda.abs() * peak.powi(2 * cfg.kappa as i32);
            if rate > 0.0 {
                h = h.min(cap / rate);
            }
        }
        let stop = |traj: Trajectory, t: f64, cause| Error::BlowupDetected {
            last_valid_time: t,
            cause,
            partial: Box::new(traj),
        };
        if h < 1e-14 * cfg.dt.max(1.0) {
            return Err(stop(traj, t, BlowupCause::ResolutionExhausted));
        }
        let next = stepper.step(&u, h);
        let phys = next.to_physical();
        if !phys.is_finite() {
            if last_recorded != traj.steps {
                traj.record(t, u.to_physical());
            }
            return Err(stop(traj, t, BlowupCause::NonFinite));
        }
        let steps = traj.steps + 1;
        t += h;
        u = next;
        peak = phys.peak();
        traj.steps = steps;
        let exhausted = grad_norm(&u) > cfg.resolution_fraction * grid.xi_max * phys.l2_norm();
        let finished = cfg.t_end - t <= end_tol;
        if exhausted || finished || (cfg.snapshot_stride > 0 && steps.is_multiple_of(cfg.snapshot_stride)) {
            traj.record(t, phys);
            last_recorded = steps;
        }
        if exhausted {
            return Err(stop(traj, t, BlowupCause::ResolutionExhausted));
        }
    }
    Ok(traj)
}

/// `||u||_2^2`.
pub fn mass(u: &Field) -> f64 {
    u.l2_norm().powi(2)
}

/// `||∇u||_2` from the spectrum.
pub fn grad_norm(spec: &SpectralField) -> f64 {
    let xi2 = spec.grid.frequency_sq();
    (neumaier(spec.coefficients.iter().zip(&xi2).map(|(z, r2)| r2 * z.norm_sqr())) * spec.grid.spectral_weight()).sqrt()
}

/// `E(u) = ||∇u||_2^2 - (λ/(κ+1)) ||u||_{2κ+2}^{2κ+2}`, the quantity conserved by
/// `i u_t + Δu + λ|u|^{2κ}u = 0`.
pub fn energy(u: &Field, lambda: f64, kappa: u32) -> f64 {
    energy_with_spectrum(u, &u.to_spectral(), lambda, kappa)
}

fn energy_with_spectrum(u: &Field, spec: &SpectralField, lambda: f64, kappa: u32) -> f64 {
    let kinetic = grad_norm(spec).powi(2);
    if lambda == 0.0 {
        return kinetic;
    }
    let potential = neumaier(u.values.iter().map(|z| z.norm_sqr().powi(kappa as i32 + 1))) * u.grid.cell_volume();
    kinetic - lambda / (kappa as f64 + 1.0) * potential
}

/// `Im ∫ x_a ū ∂_a u dx` for each axis `a`.
pub fn virial_momentum(u: &Field) -> Result<Vec<f64>> {
    let ratio = u.boundary_ratio();
    if ratio > 1e-6 {
        return Err(Error::BoundaryWarning { ratio });
    }
    let g = u.grid;
    let spec = u.to_spectral();
    (0..g.d)
        .map(|a| {
            let mut deriv = spec.clone();
            for (i, z) in deriv.coefficients.iter_mut().enumerate() {
                *z *= Complex64::new(0.0, g.frequency(i)[a]);
            }
            let du = deriv.to_physical();
            let terms =
                u.values.iter().zip(&du.values).enumerate().map(|(i, (v, dv))| g.position(i)[a] * (v.conj() * dv).im);
            Ok(neumaier(terms) * g.cell_volume())
        })
        .collect()
}

/// Result of an adaptive Duhamel quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct DuhamelValue {
    pub value: SpectralField,
    pub nodes: usize,
    pub last_change: f64,
}

/// `∫_0^t S(t-τ) f(τ) dτ` by composite Gauss–Legendre in `τ` (16 nodes per panel,
/// starting from 2 panels), doubling the panel count until successive values
/// agree to `1e-10` relative.
pub fn duhamel<F>(grid: &GridSpec, forcing: F, t: f64) -> Result<DuhamelValue>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    duhamel_with(grid, forcing, t, 1e-10, 10)
}

pub fn duhamel_with<F>(grid: &GridSpec, forcing: F, t: f64, tol: f64, max_doublings: usize) -> Result<DuhamelValue>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("Duhamel time t = {t}")));
    }
    if t == 0.0 {
        return Ok(DuhamelValue { value: SpectralField::zeros(*grid), nodes: 0, last_change: 0.0 });
    }
    let xi2 = grid.frequency_sq();
    let mut previous = duhamel_fixed(grid, &forcing, &xi2, t, 2)?;
    let mut panels = 2;
    let mut change = f64::INFINITY;
    for _ in 0..max_doublings {
        panels *= 2;
        let next = duhamel_fixed(grid, &forcing, &xi2, t, panels)?;
        let scale = next.l2_norm();
        let diff = next.sub(&previous)?.l2_norm();
        change = if scale > 0.0 { diff / scale } else { diff };
        previous = next;
        if change < tol || (scale == 0.0 && diff == 0.0) {
            return Ok(DuhamelValue {
                value: propagate_with(&previous, &xi2, t),
                nodes: panels * 16,
                last_change: change,
            });
        }
    }
    Err(Error::NonConvergent { what: "Duhamel quadrature", attempts: max_doublings, last_change: change })
}

/// `∫_0^t S(-τ) f(τ) dτ` with a fixed rule (interaction picture).
fn duhamel_fixed<F>(grid: &GridSpec, forcing: &F, xi2: &[f64], t: f64, panels: usize) -> Result<SpectralField>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    let (nodes, weights) = composite(0.0, t, panels, 16);
    let terms: Vec<SpectralField> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&tau, &w)| {
            let f = forcing(tau)?;
            same_grid(&f.grid, grid)?;
            if !f.coefficients.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite("Duhamel forcing"));
            }
            Ok(propagate_with(&f, xi2, -tau).scaled(Complex64::new(w, 0.0)))
        })
        .collect::<Result<_>>()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    // fixed node order keeps the sum deterministic under any thread count
    for term in &terms {
        for (a, z) in acc.iter_mut().zip(&term.coefficients) {
            *a += z;
        }
    }
    SpectralField::new(*grid, acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Time panels on `[0, t_end]`.
    pub panels: usize,
    /// Gauss–Legendre collocation nodes per panel.
    pub order: usize,
    pub max_iter: usize,
    /// Stop once the latest difference is below `tol` times the first.
    pub tol: f64,
    /// Advisory smallness threshold on `||u_0||_{M^{s,α}_{2,1}}`.
    pub smallness: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { panels: 4, order: 8, max_iter: 12, tol: 1e-12, smallness: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardOutcome {
    /// Final iterate at `t = 0` and at every collocation node.
    pub trajectory: Trajectory,
    /// `sup_t ||u_{n} - u_{n-1}||_{M^{s,α}_{2,1}}`, starting from `u_{-1} = 0`.
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub contraction: bool,
    pub data_norm: f64,
    pub small_data: bool,
}

/// `N(v + δ) - N(v)` for `N(u) = |u|^{2κ} u`, computed from `δ` directly so that
/// tiny differences keep full relative precision.
fn nonlinearity_difference(v: Complex64, delta: Complex64, kappa: u32) -> Complex64 {
    let u = v + delta;
    let au = u.norm_sqr();
    let av = v.norm_sqr();
    let d = 2.0 * (v.conj() * delta).re + delta.norm_sqr();
    let mut sum = 0.0;
    for j in 0..kappa {
        sum += au.powi(j as i32) * av.powi((kappa - 1 - j) as i32);
    }
    delta * au.powi(kappa as i32) + v * (d * sum)
}

/// Picard iteration `u ↦ S(t)u_0 + iλ ∫_0^t S(t-τ)|u|^{2κ}u dτ` on `[0, cfg.t_end]`,
/// discretized by Gauss–Legendre collocation on time panels.
pub fn picard_solve(
    u0: &Field,
    cfg: &EvolutionConfig,
    s: f64,
    symbols: &DecompositionSymbols,
    pc: &PicardConfig,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    let crate::decomp::SymbolKind::Alpha { alpha, .. } = symbols.kind else {
        return Err(Error::InvalidParameter("Picard norm needs alpha symbols".into()));
    };
    let g = u0.grid;
    same_grid(&symbols.grid, &g)?;
    let s_kappa = g.d as f64 * alpha / 2.0 - alpha / cfg.kappa as f64;
    if !(s > s_kappa) {
        return Err(Error::InvalidParameter(format!("s = {s} must exceed s_kappa = {s_kappa}")));
    }
    if pc.panels == 0 || pc.order == 0 || pc.max_iter == 0 {
        return Err(Error::InvalidParameter("Picard discretization is empty".into()));
    }
    let norm = |f: &SpectralField| modulation_norm(f, s, alpha, Variant::Smooth(symbols)).map(|m| m.value);
    let spec0 = u0.to_spectral();
    let data_norm = norm(&spec0)?;
    let xi2 = g.frequency_sq();

    let (x, w) = gauss_legendre(pc.order);
    let smat = integration_matrix(pc.order);
    let h = cfg.t_end / pc.panels as f64;
    let times: Vec<f64> =
        (0..pc.panels).flat_map(|p| x.iter().map(move |xi| (p as f64 + 0.5 * (xi + 1.0)) * h)).collect();

    // previous iterate v and latest increment δ, physical values at every node
    let mut prev: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); g.len()]; times.len()];
    let mut delta: Vec<Vec<Complex64>> =
        times.par_iter().map(|&t| propagate_with(&spec0, &xi2, t).to_physical().values).collect();
    let sup_norm = |fields: &[Vec<Complex64>]| -> Result<f64> {
        let vals: Vec<f64> = fields
            .par_iter()
            .map(|vals| norm(&Field { grid: g, values: vals.clone() }.to_spectral()))
            .collect::<Result<_>>()?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Ok(f64::INFINITY);
        }
        Ok(vals.into_iter().fold(0.0, f64::max))
    };
    let mut differences = vec![sup_norm(&delta)?];
    let mut ratios = Vec::new();
    let mut converged = differences[0] == 0.0;
    let mut iterations = if converged { 1 } else { 0 };
    while !converged && iterations < pc.max_iter {
        // S(-τ) F[λ (N(v + δ) - N(v))] at every node
        let integrand: Vec<Vec<Complex64>> = prev
            .par_iter()
            .zip(delta.par_iter())
            .zip(times.par_iter())
            .map(|((v, dl), &t)| {
                let diff: Vec<Complex64> =
                    v.iter().zip(dl).map(|(a, b)| cfg.lambda * nonlinearity_difference(*a, *b, cfg.kappa)).collect();
                let f = Field { grid: g, values: diff }.to_spectral();
                propagate_with(&f, &xi2, -t).coefficients
            })
            .collect();
        let mut cumulative = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut integrals = Vec::with_capacity(times.len());
        for p in 0..pc.panels {
            let block = &integrand[p * pc.order..(p + 1) * pc.order];
            for row in &smat {
                let mut acc = cumulative.clone();
                for (sij, gj) in row.iter().zip(block) {
                    let c = 0.5 * h * sij;
                    for (a, z) in acc.iter_mut().zip(gj) {
                        *a += c * z;
                    }
                }
                integrals.push(acc);
            }
            for (wj, gj) in w.iter().zip(block) {
                let c = 0.5 * h * wj;
                for (a, z) in cumulative.iter_mut().zip(gj) {
                    *a += c * z;
                }
            }
        }
        let next: Vec<Vec<Complex64>> = integrals
            .into_par_iter()
            .zip(times.par_iter())
            .map(|(coeffs, &t)| {
                let f = SpectralField { grid: g, coefficients: coeffs };
                propagate_with(&f, &xi2, t).scaled(Complex64::new(0.0, 1.0)).to_physical().values
            })
            .collect();
        for (v, dl) in prev.iter_mut().zip(&delta) {
            for (a, b) in v.iter_mut().zip(dl) {
                *a += b;
            }
        }
        delta = next;
        iterations += 1;
        let dn = sup_norm(&delta)?;
        let last = *differences.last().unwrap();
        if !dn.is_finite() || delta.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            differences.push(f64::INFINITY);
            return Err(Error::ContractionFailure { ratios, differences });
        }
        ratios.push(if last > 0.0 { dn / last } else { 0.0 });
        differences.push(dn);
        converged = dn == 0.0 || (iterations >= 2 && dn <= pc.tol * differences[0]);
    }
    if !converged {
        return Err(Error::ContractionFailure { ratios, differences });
    }
    let mut traj = Trajectory { config: *cfg, snapshots: Vec::new(), diagnostics: Vec::new(), steps: iterations };
    traj.record(0.0, u0.clone());
    for ((v, dl), &t) in prev.iter().zip(&delta).zip(&times) {
        let values = v.iter().zip(dl).map(|(a, b)| a + b).collect();
        traj.record(t, Field { grid: g, values });
    }
    Ok(PicardOutcome {
        trajectory: traj,
        contraction: ratios.iter().all(|r| *r < 1.0),
        differences,
        ratios,
        iterations,
        data_norm,
        small_data: data_norm <= pc.smallness,
    })
}

/// How [`scaling_transform`] places `σ^{1/κ} u(σ x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleTarget {
    /// Same grid: decimation for `σ > 1`, spectral subsampling for `σ < 1`.
    SameGrid,
    /// Same samples on `[-L/σ, L/σ)^d`; exact.
    Rescaled,
}

fn power_of_two_exponent(sigma: f64) -> Result<i32> {
    if sigma > 0.0 && sigma.is_finite() {
        let e = sigma.log2().round() as i32;
        if 2f64.powi(e) == sigma {
            return Ok(e);
        }
    }
    Err(Error::InvalidParameter(format!("scaling factor {sigma} is not a power of two")))
}

/// `u_σ(x) = σ^{1/κ} u(σ x)`.
pub fn scaling_transform(u: &Field, sigma: f64, kappa: u32, target: ScaleTarget) -> Result<Field> {
    let e = power_of_two_exponent(sigma)?;
    if kappa < 1 {
        return Err(Error::InvalidParameter("kappa must be >= 1".into()));
    }
    let amp = sigma.powf(1.0 / kappa as f64);
    let g = u.grid;
    match target {
        ScaleTarget::Rescaled => {
            Ok(Field { grid: g.rescaled(sigma)?, values: u.values.iter().map(|z| z * amp).collect() })
        }
        ScaleTarget::SameGrid if e == 0 => Ok(u.clone()),
        ScaleTarget::SameGrid if e > 0 => {
            let step = 1usize << e;
            if step > g.n {
                return Err(Error::InvalidParameter(format!("sigma = {sigma} exceeds the grid")));
            }
            let reach = u.to_spectral().support_reach(1e-12);
            if reach * sigma >= g.xi_max {
                return Err(Error::Aliasing { reach: reach * sigma, xi_max: g.xi_max });
            }
            let offset = (step - 1) * g.n / 2;
            let mut values = vec![Complex64::new(0.0, 0.0); g.len()];
            for (j, v) in values.iter_mut().enumerate() {
                let m = g.unravel(j);
                let mut src = [0usize; crate::grid::MAX_DIM];
                let mut inside = true;
                for a in 0..g.d {
                    let i = (step * m[a]) as i64 - offset as i64;
                    if i < 0 || i >= g.n as i64 {
                        inside = false;
                        break;
                    }
                    src[a] = i as usize;
                }
                if inside {
                    *v = u.values[g.ravel(&src)] * amp;
                }
            }
            // samples outside [-L/σ, L/σ)^d are dropped and must be negligible
            let peak = u.peak();
            let lost = u
                .values
                .iter()
                .enumerate()
                .filter(|(i, _)| {
                    let m = g.unravel(*i);
                    (0..g.d).any(|a| m[a] < g.n / 2 - g.n / (2 * step) || m[a] >= g.n / 2 + g.n / (2 * step))
                })
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            if peak > 0.0 && lost > 1e-8 * peak {
                return Err(Error::BoundaryWarning { ratio: lost / peak });
            }
            Field::new(g, values)
        }
        ScaleTarget::SameGrid => {
            let step = 1usize << (-e);
            let spec = u.to_spectral();
            let top = spec.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let factor = amp * sigma.powi(-(g.d as i32));
            let half = (g.n / 2) as i64;
            let mut used = vec![false; g.len()];
            let mut coefficients = vec![Complex64::new(0.0, 0.0); g.len()];
            for (j, c) in coefficients.iter_mut().enumerate() {
                let m = g.unravel(j);
                let mut src = [0usize; crate::grid::MAX_DIM];
                let mut inside = true;
                for a in 0..g.d {
                    let i = (m[a] as i64 - half) * step as i64 + half;
                    if i < 0 || i >= g.n as i64 {
                        inside = false;
                        break;
                    }
                    src[a] = i as usize;
                }
                if inside {
                    let k = g.ravel(&src);
                    used[k] = true;
                    *c = spec.coefficients[k] * factor;
                }
            }
            let lost = spec.coefficients.iter().zip(&used).filter(|(z, k)| !**k && z.norm() > 1e-10 * top).count();
            let reach = spec.support_reach(1e-10);
            if lost > 0 && reach >= g.xi_max / step as f64 {
                return Err(Error::Aliasing { reach: reach * step as f64, xi_max: g.xi_max });
            }
            Ok(SpectralField::new(g, coefficients)?.to_physical())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlasseyConfig {
    /// Data `A exp(-x^2/2 + iγx^2)` on a 1D grid.
    pub amplitude: f64,
    pub chirp: f64,
    pub n: usize,
    pub half_length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub max_phase_per_step: f64,
    /// Controlled stop at `||∇u||_2 > resolution_fraction * xi_max * ||u||_2`.
    pub resolution_fraction: f64,
}

impl Default for GlasseyConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.6,
            chirp: -0.5,
            n: 2048,
            half_length: 8.0 * std::f64::consts::PI,
            dt: 1e-3,
            t_end: 2.0,
            max_phase_per_step: 0.05,
            resolution_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlasseyRun {
    pub lambda: f64,
    /// `(t, ||∇u||_2)` at every step.
    pub grad_series: Vec<(f64, f64)>,
    pub stop: Option<BlowupCause>,
    pub final_time: f64,
    pub mass_drift: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlasseyReport {
    pub config: GlasseyConfig,
    pub energy: f64,
    pub virial: f64,
    pub focusing: GlasseyRun,
    pub defocusing: GlasseyRun,
    /// `max ||∇u|| / ||∇u_0||` in the focusing run.
    pub growth: f64,
    /// Whether the focusing gradient norm never decreased between steps.
    pub monotone: bool,
    /// `max ||∇u|| / ||∇u_0||` in the defocusing run.
    pub defocusing_ratio: f64,
}

/// Focusing septic NLS (`κ = 3`, `λ = 1`) from chirped Gaussian data with
/// negative energy and virial momentum, next to its defocusing twin.
pub fn glassey_demo(gc: &GlasseyConfig) -> Result<GlasseyReport> {
    let grid = GridSpec::new(1, gc.n, gc.half_length)?;
    let (a, gamma) = (gc.amplitude, gc.chirp);
    let u0 = Field::from_fn(grid, |x| Complex64::from_polar(a * (-0.5 * x[0] * x[0]).exp(), gamma * x[0] * x[0]))?;
    let run = |lambda: f64| -> Result<GlasseyRun> {
        let mut cfg = EvolutionConfig::new(lambda, 3, gc.dt, gc.t_end);
        cfg.max_phase_per_step = Some(gc.max_phase_per_step);
        cfg.diagnostics_only = true;
        cfg.resolution_fraction = gc.resolution_fraction;
        let (traj, stop) = match evolve(&u0, &cfg) {
            Ok(t) => (t, None),
            Err(Error::BlowupDetected { partial, cause, .. }) => (*partial, Some(cause)),
            Err(e) => return Err(e),
        };
        Ok(GlasseyRun {
            lambda,
            grad_series: traj.diagnostics.iter().map(|d| (d.t, d.grad_norm)).collect(),
            stop,
            final_time: traj.final_time(),
            mass_drift: traj.mass_drift(),
            steps: traj.steps,
        })
    };
    let focusing = run(1.0)?;
    let defocusing = run(-1.0)?;
    let g0 = focusing.grad_series[0].1;
    let growth = focusing.grad_series.iter().map(|p| p.1).fold(0.0, f64::max) / g0;
    let monotone = focusing.grad_series.windows(2).all(|w| w[1].1 >= w[0].1);
    let defocusing_ratio = defocusing.grad_series.iter().map(|p| p.1).fold(0.0, f64::max) / g0;
    Ok(GlasseyReport {
        config: *gc,
        energy: energy(&u0, 1.0, 3),
        virial: virial_momentum(&u0)?[0],
        focusing,
        defocusing,
        growth,
        monotone,
        defocusing_ratio,
    })
}
