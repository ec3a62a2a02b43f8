//! Periodic sampling grids on `[-L, L)^d` and the physical/spectral transform pair.
//!
//! Transform convention (used by every norm, oracle and propagator in the crate):
//!
//! ```text
//! forward   f^(xi_m) = dx^d  * sum_j f(x_j) exp(-i x_j . xi_m)
//! inverse   f(x_j)   = (dxi / 2pi)^d * sum_m f^(xi_m) exp(+i x_j . xi_m)
//! ```
//!
//! with `x_j = -L + j dx` and `xi_m = m dxi`, `m in [-n/2, n/2)`. The forward
//! transform is the rectangle-rule approximation of the continuum Fourier
//! integral `int f(x) e^{-ix.xi} dx`, so the discrete Plancherel identity reads
//! `sum |f|^2 dx^d = sum |f^|^2 (dxi/2pi)^d`. Spectral arrays are stored in
//! centered order: axis index `i` holds lattice coordinate `m = i - n/2`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::decomp::BumpProfile;
use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Uniform periodic grid on `[-L, L)^d` with `n` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub half_length: f64,
    pub dx: f64,
    pub dxi: f64,
    pub xi_max: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, half_length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 1..=3")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("samples per axis must be a power of two >= 16, got {n}")));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!("half box length must be positive, got {half_length}")));
        }
        let dx = 2.0 * half_length / n as f64;
        let dxi = PI / half_length;
        Ok(Self { d, n, half_length, dx, dxi, xi_max: n as f64 * dxi / 2.0 })
    }

    /// Smallest power-of-two grid on `[-L, L)^d` whose Nyquist frequency is at
    /// least `xi_needed`.
    pub fn covering(d: usize, half_length: f64, xi_needed: f64) -> Result<Self> {
        let want = (2.0 * half_length * xi_needed / PI).ceil().max(16.0) as usize;
        Self::new(d, want.next_power_of_two(), half_length)
    }

    /// Total number of samples, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `dx^d` of one physical sample.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.d as i32)
    }

    /// Weight `(dxi / 2pi)^d` that turns spectral sums into physical L^2 mass.
    pub fn spectral_weight(&self) -> f64 {
        (self.dxi / (2.0 * PI)).powi(self.d as i32)
    }

    /// Largest `|xi|` present on the lattice.
    pub fn max_frequency_norm(&self) -> f64 {
        self.xi_max * (self.d as f64).sqrt()
    }

    /// Row-major multi-index of a flat index (unused trailing axes are zero).
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for a in (0..self.d).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi[..self.d].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinates of sample `idx`.
    pub fn position(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.unravel(idx);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.d {
            x[a] = -self.half_length + m[a] as f64 * self.dx;
        }
        x
    }

    /// Lattice frequency of centered spectral index `idx`.
    pub fn frequency(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.unravel(idx);
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.d {
            xi[a] = (m[a] as f64 - (self.n / 2) as f64) * self.dxi;
        }
        xi
    }

    /// `|xi|^2` for every centered spectral index.
    pub fn frequency_sq(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.frequency(i)[..self.d].iter().map(|v| v * v).sum()).collect()
    }

    /// Centered index range `[lo, hi]` along one axis covering `[a, b]` (clamped).
    pub fn axis_range(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        let half = (self.n / 2) as f64;
        let lo = ((a / self.dxi).ceil() + half).max(0.0);
        let hi = ((b / self.dxi).floor() + half).min(self.n as f64 - 1.0);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// Grid describing `[-L/sigma, L/sigma)^d` with the same sample count.
    pub fn rescaled(&self, sigma: f64) -> Result<Self> {
        Self::new(self.d, self.n, self.half_length / sigma)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::ShapeMismatch(format!("grid holds {} samples, array has {len}", self.len())));
        }
        Ok(())
    }
}

/// Complex samples of a function on the physical grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

/// Fourier coefficients on the centered frequency lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coefficients: Vec<Complex64>,
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if !all_finite(&values) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Result<Self> {
        let values: Vec<Complex64> = (0..grid.len()).into_par_iter().map(|i| f(&grid.position(i)[..grid.d])).collect();
        Self::new(grid, values)
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.values)
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField { grid: self.grid, coefficients: forward(&self.grid, &self.values) }
    }

    /// Discrete L^2 norm with quadrature weight `dx^d` (compensated sum).
    pub fn l2_norm(&self) -> f64 {
        (neumaier(self.values.iter().map(|z| z.norm_sqr())) * self.grid.cell_volume()).sqrt()
    }

    /// Largest sample modulus.
    pub fn peak(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus on the box faces divided by the peak (0 for the zero field).
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let g = self.grid;
        let edge = (0..g.len())
            .filter(|&i| g.unravel(i)[..g.d].iter().any(|&m| m == 0 || m == g.n - 1))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// Circular shift by whole samples along each axis: `g(x) = f(x - shift * dx)`.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        let g = self.grid;
        let n = g.n as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let m = g.unravel(i);
            let mut src = [0usize; MAX_DIM];
            for a in 0..g.d {
                src[a] = (m[a] as i64 - shift[a]).rem_euclid(n) as usize;
            }
            *slot = self.values[g.ravel(&src)];
        }
        Self { grid: g, values: out }
    }
}

impl SpectralField {
    pub fn new(grid: GridSpec, coefficients: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coefficients.len())?;
        if !all_finite(&coefficients) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(Self { grid, coefficients })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coefficients: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Result<Self> {
        let coefficients: Vec<Complex64> =
            (0..grid.len()).into_par_iter().map(|i| f(&grid.frequency(i)[..grid.d])).collect();
        Self::new(grid, coefficients)
    }

    pub fn to_physical(&self) -> Field {
        Field { grid: self.grid, values: inverse(&self.grid, &self.coefficients) }
    }

    /// Physical L^2 norm computed on the spectral side (Plancherel).
    pub fn l2_norm(&self) -> f64 {
        (neumaier(self.coefficients.iter().map(|z| z.norm_sqr())) * self.grid.spectral_weight()).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { grid: self.grid, coefficients: self.coefficients.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid,
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect(),
        })
    }

    /// Zero every coefficient with some `|xi_a| > cutoff`.
    pub fn band_limited(&self, cutoff: f64) -> Self {
        let g = self.grid;
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let xi = g.frequency(i);
                if xi[..g.d].iter().any(|v| v.abs() > cutoff) {
                    Complex64::new(0.0, 0.0)
                } else {
                    z
                }
            })
            .collect();
        Self { grid: g, coefficients }
    }

    /// Largest per-axis `|xi_a|` carrying a coefficient above `rel_tol * max|c|`.
    pub fn support_reach(&self, rel_tol: f64) -> f64 {
        let g = self.grid;
        let top = self.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > rel_tol * top)
            .map(|(i, _)| g.frequency(i)[..g.d].iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Neumaier-compensated sum in fixed iteration order.
pub fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Unnormalized d-dimensional FFT in place over a row-major `n^d` array.
fn fft_nd(data: &mut [Complex64], n: usize, d: usize, inverse: bool) {
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| {
                let fft = plan(n, inverse);
                fft.process(line);
            });
        } else {
            // lines along a strided axis: gather, transform, scatter per outer block
            let block = stride * n;
            data.par_chunks_mut(block).for_each(|chunk| {
                let fft = plan(n, inverse);
                let mut line = vec![Complex64::new(0.0, 0.0); n];
                for offset in 0..stride {
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = chunk[offset + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        chunk[offset + k * stride] = *v;
                    }
                }
            });
        }
    }
}

/// Standard-order index <-> centered index are related by a half-period roll
/// on every axis; the roll is an involution because n is even.
fn roll_half(grid: &GridSpec, src: &[Complex64], sign_weight: f64) -> Vec<Complex64> {
    let n = grid.n;
    let half = n / 2;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let m = grid.unravel(i);
            let mut s = [0usize; MAX_DIM];
            let mut parity = 0usize;
            for a in 0..grid.d {
                s[a] = (m[a] + half) % n;
                parity += s[a];
            }
            let sign = if parity.is_multiple_of(2) { sign_weight } else { -sign_weight };
            src[grid.ravel(&s)] * sign
        })
        .collect()
}

fn forward(grid: &GridSpec, values: &[Complex64]) -> Vec<Complex64> {
    let mut work = values.to_vec();
    fft_nd(&mut work, grid.n, grid.d, false);
    roll_half(grid, &work, grid.cell_volume())
}

fn inverse(grid: &GridSpec, coefficients: &[Complex64]) -> Vec<Complex64> {
    let mut work = roll_half(grid, coefficients, grid.spectral_weight());
    fft_nd(&mut work, grid.n, grid.d, true);
    work
}

/// Pointwise field definition for [`FieldSpec::Explicit`].
pub type PointFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Analytic test fields.
#[derive(Clone)]
pub enum FieldSpec {
    /// `exp(-|x - center|^2 / (2 width^2)) exp(i frequency . x)`
    Gaussian {
        center: Vec<f64>,
        width: f64,
        frequency: Vec<f64>,
    },
    /// Spectral bump `amplitude * phi((xi - center) / width)`, support radius `2 width`.
    FourierBump {
        center: Vec<f64>,
        width: f64,
        amplitude: Complex64,
    },
    SumOfBumps(Vec<FieldSpec>),
    /// `exp(i frequency . x)`
    PlaneWave {
        frequency: Vec<f64>,
    },
    Explicit(PointFn),
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { center, width, frequency } => f
                .debug_struct("Gaussian")
                .field("center", center)
                .field("width", width)
                .field("frequency", frequency)
                .finish(),
            Self::FourierBump { center, width, amplitude } => f
                .debug_struct("FourierBump")
                .field("center", center)
                .field("width", width)
                .field("amplitude", amplitude)
                .finish(),
            Self::SumOfBumps(parts) => f.debug_tuple("SumOfBumps").field(parts).finish(),
            Self::PlaneWave { frequency } => f.debug_struct("PlaneWave").field("frequency", frequency).finish(),
            Self::Explicit(_) => f.write_str("Explicit(..)"),
        }
    }
}

fn check_vec(grid: &GridSpec, v: &[f64], what: &str) -> Result<()> {
    if v.len() != grid.d {
        return Err(Error::InvalidParameter(format!(
            "{what} has {} components on a {}-dimensional grid",
            v.len(),
            grid.d
        )));
    }
    Ok(())
}

fn check_in_band(grid: &GridSpec, reach: f64) -> Result<()> {
    if reach >= grid.xi_max {
        return Err(Error::Aliasing { reach, xi_max: grid.xi_max });
    }
    Ok(())
}

impl FieldSpec {
    /// Unit-amplitude spectral bump.
    pub fn bump(center: Vec<f64>, width: f64) -> Self {
        Self::FourierBump { center, width, amplitude: Complex64::new(1.0, 0.0) }
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Self::Gaussian { center, width, frequency } => {
                check_vec(grid, center, "center")?;
                check_vec(grid, frequency, "frequency")?;
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter(format!("Gaussian width {width}")));
                }
                check_in_band(grid, frequency.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            }
            Self::FourierBump { center, width, .. } => {
                check_vec(grid, center, "center")?;
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter(format!("bump width {width}")));
                }
                let reach = center.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + 2.0 * width;
                check_in_band(grid, reach)
            }
            Self::SumOfBumps(parts) => parts.iter().try_for_each(|p| p.validate(grid)),
            Self::PlaneWave { frequency } => {
                check_vec(grid, frequency, "frequency")?;
                check_in_band(grid, frequency.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            }
            Self::Explicit(_) => Ok(()),
        }
    }
}

/// Evaluate a [`FieldSpec`] on the grid. Fourier bumps are built on the
/// spectral lattice and inverse-transformed.
pub fn sample(grid: &GridSpec, spec: &FieldSpec) -> Result<Field> {
    spec.validate(grid)?;
    match spec {
        FieldSpec::Gaussian { center, width, frequency } => Field::from_fn(*grid, |x| {
            let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
            let phase: f64 = x.iter().zip(frequency).map(|(a, b)| a * b).sum();
            Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), phase)
        }),
        FieldSpec::FourierBump { .. } => Ok(sample_spectral(grid, spec)?.to_physical()),
        FieldSpec::SumOfBumps(parts) => {
            let mut acc = Field::zeros(*grid);
            for p in parts {
                acc = acc.add(&sample(grid, p)?)?;
            }
            Ok(acc)
        }
        FieldSpec::PlaneWave { frequency } => Field::from_fn(*grid, |x| {
            let phase: f64 = x.iter().zip(frequency).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, phase)
        }),
        FieldSpec::Explicit(f) => Field::from_fn(*grid, |x| f(x)),
    }
}

/// Spectral samples of a [`FieldSpec`]; Fourier bumps are exact on the lattice,
/// everything else goes through the forward transform.
pub fn sample_spectral(grid: &GridSpec, spec: &FieldSpec) -> Result<SpectralField> {
    spec.validate(grid)?;
    match spec {
        FieldSpec::FourierBump { center, width, amplitude } => {
            let bump = BumpProfile;
            SpectralField::from_fn(*grid, |xi| {
                let r2: f64 = xi.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum();
                amplitude * bump.radial(r2.sqrt() / width)
            })
        }
        FieldSpec::SumOfBumps(parts) => {
            let mut acc = SpectralField::zeros(*grid);
            for p in parts {
                acc = acc.add(&sample_spectral(grid, p)?)?;
            }
            Ok(acc)
        }
        other => Ok(sample(grid, other)?.to_spectral()),
    }
}
