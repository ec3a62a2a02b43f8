//! Frequency decompositions: the smooth radial bump, the dyadic (Littlewood-Paley)
//! family and the alpha-covering family, sampled as sparse multipliers on a
//! grid's frequency lattice.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{same_grid, GridSpec, SpectralField, MAX_DIM};

/// Explicit C-infinity radial profile: 1 on `|xi| <= 1`, 0 on `|xi| >= 2`.
///
/// `phi(xi) = psi(|xi| - 1)`, `psi(t) = g(1-t) / (g(1-t) + g(t))`,
/// `g(t) = exp(-1/t)` for `t > 0` and 0 otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BumpProfile;

fn smooth_step_kernel(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

impl BumpProfile {
    /// Transition `psi`: 1 for `t <= 0`, 0 for `t >= 1`.
    pub fn transition(t: f64) -> f64 {
        if t <= 0.0 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            let a = smooth_step_kernel(1.0 - t);
            a / (a + smooth_step_kernel(t))
        }
    }

    /// Profile value at radius `r = |xi|`.
    pub fn radial(&self, r: f64) -> f64 {
        Self::transition(r - 1.0)
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.radial(xi.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

pub fn make_bump() -> BumpProfile {
    BumpProfile
}

/// Japanese bracket `<k> = (1 + |k|^2)^{1/2}`.
pub fn japanese_bracket(k: &[i64]) -> f64 {
    (1.0 + k.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt()
}

/// One piece of the alpha covering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaIndex {
    pub k: [i64; MAX_DIM],
    pub alpha: f64,
    pub bracket: f64,
    /// `<k>^{alpha/(1-alpha)} k`
    pub center: [f64; MAX_DIM],
    /// `C <k>^{alpha/(1-alpha)}`
    pub radius: f64,
}

impl AlphaIndex {
    pub fn new(k: &[i64], alpha: f64, c: f64) -> Self {
        let mut kk = [0i64; MAX_DIM];
        kk[..k.len()].copy_from_slice(k);
        let bracket = japanese_bracket(k);
        let scale = bracket.powf(alpha / (1.0 - alpha));
        let mut center = [0.0; MAX_DIM];
        for (a, &v) in k.iter().enumerate() {
            center[a] = scale * v as f64;
        }
        Self { k: kk, alpha, bracket, center, radius: c * scale }
    }

    /// `<k>^{alpha/(1-alpha)}`
    pub fn scale(&self) -> f64 {
        self.bracket.powf(self.alpha / (1.0 - self.alpha))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PieceIndex {
    Dyadic(u32),
    Alpha(AlphaIndex),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SymbolKind {
    Dyadic,
    Alpha { alpha: f64, c: f64 },
}

/// A multiplier restricted to its support: `(centered flat index, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub index: PieceIndex,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct DecompositionSymbols {
    pub grid: GridSpec,
    pub kind: SymbolKind,
    pub pieces: Vec<Piece>,
    /// Minimum over the lattice of the raw sum of profiles before normalization
    /// (exactly 1 for the dyadic family).
    pub coverage_floor: f64,
}

impl DecompositionSymbols {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Largest `<k>` among represented alpha pieces, or largest `j` for dyadic.
    pub fn largest_index(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match p.index {
                PieceIndex::Dyadic(j) => j as f64,
                PieceIndex::Alpha(a) => a.bracket,
            })
            .fold(0.0, f64::max)
    }

    /// Dense copy of one multiplier.
    pub fn dense(&self, piece: usize) -> Result<Vec<f64>> {
        let p = self.pieces.get(piece).ok_or(Error::UnknownIndex(piece))?;
        let mut out = vec![0.0; self.grid.len()];
        for &(i, v) in &p.entries {
            out[i] = v;
        }
        Ok(out)
    }

    /// Pointwise sum of all multipliers, accumulated in piece order.
    pub fn total(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for p in &self.pieces {
            for &(i, v) in &p.entries {
                out[i] += v;
            }
        }
        out
    }
}

/// Littlewood-Paley family `phi_0 = phi`, `phi_j = phi(2^-j .) - phi(2^{1-j} .)`
/// for `j = 0..=J`, `J` minimal with `2^J` at least the largest lattice `|xi|`.
pub fn dyadic_symbols(grid: &GridSpec) -> DecompositionSymbols {
    let bump = BumpProfile;
    let top = grid.max_frequency_norm();
    let mut levels = 0u32;
    while 2f64.powi(levels as i32) < top {
        levels += 1;
    }
    let radius: Vec<f64> = grid.frequency_sq().iter().map(|r2| r2.sqrt()).collect();
    let pieces = (0..=levels)
        .into_par_iter()
        .map(|j| {
            let s = 2f64.powi(-(j as i32));
            let entries = radius
                .iter()
                .enumerate()
                .filter_map(|(i, &r)| {
                    let v = if j == 0 { bump.radial(r) } else { bump.radial(r * s) - bump.radial(2.0 * r * s) };
                    (v != 0.0).then_some((i, v))
                })
                .collect();
            Piece { index: PieceIndex::Dyadic(j), entries }
        })
        .collect();
    DecompositionSymbols { grid: *grid, kind: SymbolKind::Dyadic, pieces, coverage_floor: 1.0 }
}

/// Distance from a point to the closed box `[-b, b]^d`.
fn distance_to_box(p: &[f64], b: f64) -> f64 {
    p.iter().map(|v| (v.abs() - b).max(0.0).powi(2)).sum::<f64>().sqrt()
}

/// Every alpha index whose `reach * radius` neighbourhood meets the box `[-b, b]^d`.
/// `reach` is 2 for the smooth pieces (ball) and 1 for the sharp boxes, in
/// which case the test uses the sup-distance.
pub fn alpha_indices(d: usize, b: f64, alpha: f64, c: f64, sharp: bool) -> Vec<AlphaIndex> {
    let beta = alpha / (1.0 - alpha);
    let reach = if sharp { 1.0 } else { 2.0 };
    // radial bound: <rho>^beta (rho - reach C) < sqrt(d) b
    let bound = (d as f64).sqrt() * b;
    let mut rho_max = 0i64;
    loop {
        let r = rho_max as f64;
        if (1.0 + r * r).powf(beta / 2.0) * (r - reach * c * (d as f64).sqrt()) >= bound {
            break;
        }
        rho_max += 1;
    }
    let span = 2 * rho_max + 1;
    let total = (span as usize).pow(d as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut k = [0i64; MAX_DIM];
        let mut rest = flat;
        for slot in k.iter_mut().take(d).rev() {
            *slot = (rest % span as usize) as i64 - rho_max;
            rest /= span as usize;
        }
        let idx = AlphaIndex::new(&k[..d], alpha, c);
        let hit = if sharp {
            idx.center[..d].iter().all(|v| v.abs() - idx.radius <= b)
        } else {
            distance_to_box(&idx.center[..d], b) < reach * idx.radius
        };
        if hit {
            out.push(idx);
        }
    }
    out
}

/// Sparse samples of `phi((xi - center) / radius)` on the lattice.
fn profile_entries(grid: &GridSpec, center: &[f64], radius: f64) -> Vec<(usize, f64)> {
    let bump = BumpProfile;
    let d = grid.d;
    let mut ranges = [(0usize, 0usize); MAX_DIM];
    for a in 0..d {
        match grid.axis_range(center[a] - 2.0 * radius, center[a] + 2.0 * radius) {
            Some(r) => ranges[a] = r,
            None => return Vec::new(),
        }
    }
    let half = (grid.n / 2) as f64;
    let mut out = Vec::new();
    let mut m = [0usize; MAX_DIM];
    let counts: Vec<usize> = (0..d).map(|a| ranges[a].1 - ranges[a].0 + 1).collect();
    let total: usize = counts.iter().product();
    for flat in 0..total {
        let mut rest = flat;
        let mut r2 = 0.0;
        for a in (0..d).rev() {
            m[a] = ranges[a].0 + rest % counts[a];
            rest /= counts[a];
            let xi = (m[a] as f64 - half) * grid.dxi;
            r2 += (xi - center[a]).powi(2);
        }
        let v = bump.radial(r2.sqrt() / radius);
        if v > 0.0 {
            out.push((grid.ravel(&m), v));
        }
    }
    out
}

/// Smallest `C` on the ladder `1, 1.25, 1.5, ...` whose covering sum stays at
/// least 0.5 on a dense scan of the grid band.
pub fn calibrate_c(grid: &GridSpec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    // refine the lattice until the scan has at least 10^4 points
    let mut refine = 1usize;
    while (grid.n * refine).pow(grid.d as u32) < 10_000 {
        refine *= 2;
    }
    let scan = GridSpec::new(grid.d, grid.n * refine, grid.half_length * refine as f64)?;
    // scan.dxi = grid.dxi / refine and scan.xi_max = grid.xi_max
    let b = grid.xi_max;
    let mut c = 1.0;
    while c <= 64.0 {
        let (floor, _) = coverage(&scan, alpha, c, Some(b));
        if floor >= 0.5 {
            return Ok(c);
        }
        c += 0.25;
    }
    Err(Error::InvalidParameter(format!("no covering constant up to 64 reaches floor 0.5 for alpha = {alpha}")))
}

/// Raw covering sum on `grid`, restricted to `|xi_a| <= band` when given.
/// Returns `(floor, index of the minimum)`.
fn coverage(grid: &GridSpec, alpha: f64, c: f64, band: Option<f64>) -> (f64, usize) {
    let b = grid.xi_max;
    let idx = alpha_indices(grid.d, b, alpha, c, false);
    let parts: Vec<Vec<(usize, f64)>> =
        idx.par_iter().map(|k| profile_entries(grid, &k.center[..grid.d], k.radius)).collect();
    let mut sum = vec![0.0; grid.len()];
    for part in &parts {
        for &(i, v) in part {
            sum[i] += v;
        }
    }
    let mut floor = f64::INFINITY;
    let mut arg = 0;
    for (i, &v) in sum.iter().enumerate() {
        if let Some(band) = band {
            if grid.frequency(i)[..grid.d].iter().any(|x| x.abs() > band) {
                continue;
            }
        }
        if v < floor {
            floor = v;
            arg = i;
        }
    }
    (floor, arg)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} not in [0, 1)")));
    }
    Ok(())
}

/// Normalized alpha family `eta_k = phi_k / sum_l phi_l` over every piece whose
/// support meets the lattice.
pub fn alpha_symbols(grid: &GridSpec, alpha: f64, c: f64) -> Result<DecompositionSymbols> {
    check_alpha(alpha)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("covering constant C = {c}")));
    }
    let idx = alpha_indices(grid.d, grid.xi_max, alpha, c, false);
    let raw: Vec<(AlphaIndex, Vec<(usize, f64)>)> = idx
        .into_par_iter()
        .map(|k| {
            let e = profile_entries(grid, &k.center[..grid.d], k.radius);
            (k, e)
        })
        .filter(|(_, e)| !e.is_empty())
        .collect();
    let mut sum = vec![0.0; grid.len()];
    for (_, entries) in &raw {
        for &(i, v) in entries {
            sum[i] += v;
        }
    }
    let (floor, arg) =
        sum.iter().enumerate().fold((f64::INFINITY, 0), |(m, a), (i, &v)| if v < m { (v, i) } else { (m, a) });
    if floor <= 0.0 {
        let suggested_c = calibrate_c(grid, alpha).unwrap_or(2.0 * c);
        return Err(Error::Coverage {
            xi: grid.frequency(arg)[..grid.d].to_vec(),
            floor,
            suggested_c: suggested_c.max(c + 0.25),
        });
    }
    let pieces = raw
        .into_iter()
        .map(|(k, entries)| Piece {
            index: PieceIndex::Alpha(k),
            entries: entries.into_iter().map(|(i, v)| (i, v / sum[i])).collect(),
        })
        .collect();
    Ok(DecompositionSymbols { grid: *grid, kind: SymbolKind::Alpha { alpha, c }, pieces, coverage_floor: floor })
}

/// Alpha symbols with the calibrated covering constant.
pub fn alpha_symbols_calibrated(grid: &GridSpec, alpha: f64) -> Result<DecompositionSymbols> {
    let c = calibrate_c(grid, alpha)?;
    alpha_symbols(grid, alpha, c)
}

/// Multiply by multiplier `piece`.
pub fn apply_projector(f: &SpectralField, symbols: &DecompositionSymbols, piece: usize) -> Result<SpectralField> {
    same_grid(&f.grid, &symbols.grid)?;
    let p = symbols.pieces.get(piece).ok_or(Error::UnknownIndex(piece))?;
    let mut out = SpectralField::zeros(f.grid);
    for &(i, v) in &p.entries {
        out.coefficients[i] = f.coefficients[i] * v;
    }
    Ok(out)
}

/// `||eta f^||` in the normalized spectral L^2 measure, without materializing
/// the projected field.
pub fn projected_norm(f: &SpectralField, piece: &Piece) -> f64 {
    let s: f64 = piece.entries.iter().map(|&(i, v)| (f.coefficients[i] * v).norm_sqr()).sum();
    (s * f.grid.spectral_weight()).sqrt()
}

/// Max over the lattice of `|sum of multipliers - 1|`.
pub fn partition_residual(symbols: &DecompositionSymbols) -> f64 {
    symbols.total().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
}

/// Sum of all projections of `f`, for reconstruction checks.
pub fn reconstruct(f: &SpectralField, symbols: &DecompositionSymbols) -> Result<SpectralField> {
    same_grid(&f.grid, &symbols.grid)?;
    let total = symbols.total();
    Ok(SpectralField {
        grid: f.grid,
        coefficients: f.coefficients.iter().zip(&total).map(|(z, w)| z * Complex64::new(*w, 0.0)).collect(),
    })
}
