//! Space norms evaluated on the frequency lattice.
//!
//! Spectral L^2 pieces use the Plancherel-normalized measure `(dxi/2pi)^d`, so
//! `||f^||_{L^2(A)}` below always means the physical L^2 mass carried by the
//! frequency set `A`. Every infinite sum over pieces is truncated to the pieces
//! the grid represents; the truncation is reported alongside the value.

use serde::{Deserialize, Serialize};

use crate::decomp::{alpha_indices, dyadic_symbols, projected_norm, DecompositionSymbols, PieceIndex, SymbolKind};
use crate::error::{Error, Result};
use crate::grid::{neumaier, Field, GridSpec, SpectralField, MAX_DIM};

/// Which form of the alpha-modulation norm to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum Variant<'a> {
    /// Sharp boxes `<k>^{alpha/(1-alpha)} (k + [-C, C]^d)`, overlaps counted with multiplicity.
    Sharp { c: f64 },
    /// Smooth partition `eta_k^alpha` from precomputed symbols.
    Smooth(&'a DecompositionSymbols),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationValue {
    pub value: f64,
    /// Largest `<k>` among the pieces the grid represents.
    pub max_bracket: f64,
    /// `(<k>, running sum)` with pieces ordered by increasing `<k>`.
    pub partial_sums: Vec<(f64, f64)>,
}

fn weight(bracket: f64, s: f64, alpha: f64) -> f64 {
    bracket.powf(s / (1.0 - alpha))
}

fn partial_sums(mut terms: Vec<(f64, f64)>) -> (f64, Vec<(f64, f64)>) {
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut running = Vec::with_capacity(terms.len());
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (b, t) in terms {
        // Neumaier step, kept inline so the running values are compensated too
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
        running.push((b, sum + comp));
    }
    (sum + comp, running)
}

/// Sum of `|f^|^2` over lattice points inside an axis-aligned box.
fn box_mass(f: &SpectralField, center: &[f64], half_width: f64) -> f64 {
    let g = &f.grid;
    let d = g.d;
    let mut ranges = [(0usize, 0usize); MAX_DIM];
    for a in 0..d {
        match g.axis_range(center[a] - half_width, center[a] + half_width) {
            Some(r) => ranges[a] = r,
            None => return 0.0,
        }
    }
    let counts: Vec<usize> = (0..d).map(|a| ranges[a].1 - ranges[a].0 + 1).collect();
    let total: usize = counts.iter().product();
    let mut m = [0usize; MAX_DIM];
    neumaier((0..total).map(|flat| {
        let mut rest = flat;
        for a in (0..d).rev() {
            m[a] = ranges[a].0 + rest % counts[a];
            rest /= counts[a];
        }
        f.coefficients[g.ravel(&m)].norm_sqr()
    }))
}

/// `sum_k <k>^{s/(1-alpha)} ||f^||_{L^2(piece k)}`, truncated to represented `k`.
pub fn modulation_norm(f: &SpectralField, s: f64, alpha: f64, variant: Variant<'_>) -> Result<ModulationValue> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} not in [0, 1)")));
    }
    let g = &f.grid;
    let terms: Vec<(f64, f64)> = match variant {
        Variant::Sharp { c } => {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("covering constant C = {c}")));
            }
            let w = g.spectral_weight();
            alpha_indices(g.d, g.xi_max, alpha, c, true)
                .iter()
                .map(|k| {
                    let mass = box_mass(f, &k.center[..g.d], k.radius) * w;
                    (k.bracket, weight(k.bracket, s, alpha) * mass.sqrt())
                })
                .collect()
        }
        Variant::Smooth(symbols) => {
            if symbols.grid != *g {
                return Err(Error::ShapeMismatch("symbols built for another grid".into()));
            }
            match symbols.kind {
                SymbolKind::Alpha { alpha: a, .. } if (a - alpha).abs() < 1e-15 => {}
                other => {
                    return Err(Error::InvalidParameter(format!("symbols {other:?} do not match alpha = {alpha}")))
                }
            }
            symbols
                .pieces
                .iter()
                .map(|p| {
                    let PieceIndex::Alpha(k) = p.index else { unreachable!("alpha symbols hold alpha pieces") };
                    (k.bracket, weight(k.bracket, s, alpha) * projected_norm(f, p))
                })
                .collect()
        }
    };
    let max_bracket = terms.iter().map(|t| t.0).fold(0.0, f64::max);
    let (value, partial_sums) = partial_sums(terms);
    Ok(ModulationValue { value, max_bracket, partial_sums })
}

/// Exponent `q` of a sequence norm, `None` meaning `q = infinity`.
pub type SeqExponent = Option<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovValue {
    pub value: f64,
    /// `(j, 2^{js} ||f^||_{L^2(R_j)})` for `j = 0..=J`.
    pub terms: Vec<(u32, f64)>,
}

/// Annulus index of a frequency: `R_0 = {|xi| <= 1}`, `R_j = {2^{j-1} <= |xi| < 2^j}`.
pub fn annulus_index(r: f64) -> u32 {
    if r <= 1.0 {
        0
    } else {
        // smallest j with r < 2^j
        let mut j = r.log2().floor() as i64 + 1;
        while j > 1 && r < 2f64.powi(j as i32 - 1) {
            j -= 1;
        }
        while r >= 2f64.powi(j as i32) {
            j += 1;
        }
        j as u32
    }
}

/// `(sum_j 2^{jsq} ||f^||^q_{L^2(R_j)})^{1/q}` on sharp dyadic annuli.
pub fn besov_norm(f: &SpectralField, s: f64, q: SeqExponent) -> Result<BesovValue> {
    if let Some(q) = q {
        if !(q >= 1.0) {
            return Err(Error::InvalidParameter(format!("q = {q} < 1")));
        }
    }
    let g = &f.grid;
    let levels = annulus_index(g.max_frequency_norm()) as usize;
    let mut mass: Vec<Vec<f64>> = vec![Vec::new(); levels + 1];
    for (r2, z) in g.frequency_sq().iter().zip(&f.coefficients) {
        mass[annulus_index(r2.sqrt()) as usize].push(z.norm_sqr());
    }
    let w = g.spectral_weight();
    let terms: Vec<(u32, f64)> = mass
        .into_iter()
        .enumerate()
        .map(|(j, m)| (j as u32, 2f64.powf(j as f64 * s) * (neumaier(m) * w).sqrt()))
        .collect();
    let value = match q {
        None => terms.iter().map(|t| t.1).fold(0.0, f64::max),
        Some(q) => neumaier(terms.iter().map(|t| t.1.powf(q))).powf(1.0 / q),
    };
    Ok(BesovValue { value, terms })
}

/// `||(1+|xi|^2)^{s/2} f^||` or, when `homogeneous`, `|| |xi|^s f^ ||`.
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    let g = &f.grid;
    let top = f.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let zero = g.len() / 2 + if g.d > 1 { zero_offset(g) } else { 0 };
    if homogeneous && s < 0.0 && f.coefficients[zero].norm() > 1e-14 * top {
        return Err(Error::ZeroMode { s });
    }
    let terms = g.frequency_sq().into_iter().zip(&f.coefficients).map(|(r2, z)| {
        let w = if homogeneous {
            if r2 == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                r2.powf(s)
            }
        } else {
            (1.0 + r2).powf(s)
        };
        w * z.norm_sqr()
    });
    Ok((neumaier(terms) * g.spectral_weight()).sqrt())
}

/// Flat index of `xi = 0` minus `len/2` (nonzero only for `d > 1`).
fn zero_offset(g: &GridSpec) -> usize {
    let centre = [g.n / 2; MAX_DIM];
    g.ravel(&centre) - g.len() / 2
}

/// Grid L^p norm with weight `dx^d`; `None` gives the grid maximum.
pub fn lp_norm(f: &Field, p: SeqExponent) -> Result<f64> {
    match p {
        None => Ok(f.peak()),
        Some(p) if p >= 1.0 => {
            Ok((neumaier(f.values.iter().map(|z| z.norm().powf(p))) * f.grid.cell_volume()).powf(1.0 / p))
        }
        Some(p) => Err(Error::InvalidParameter(format!("p = {p} < 1"))),
    }
}

/// Discrete p-variation: the supremum over sub-partitions of the sample times of
/// `(sum ||v(t_k) - v(t_{k-1})||^p)^{1/p}`, by dynamic programming over the last
/// breakpoint. `dist` must be a metric.
pub fn p_variation<T>(series: &[T], p: f64, dist: impl Fn(&T, &T) -> f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} < 1")));
    }
    if series.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: series.len(), what: "p-variation snapshots" });
    }
    let n = series.len();
    // best[j]: largest sum of p-th powers over chains from index 0 ending at j
    let mut best = vec![0.0_f64; n];
    for j in 1..n {
        let mut top = f64::NEG_INFINITY;
        for i in 0..j {
            let v = best[i] + dist(&series[i], &series[j]).powf(p);
            if v > top {
                top = v;
            }
        }
        best[j] = top;
    }
    Ok(best[n - 1].powf(1.0 / p))
}

/// p-variation of a time-ordered series of fields under the L^2 distance.
pub fn p_variation_fields(series: &[(f64, Field)], p: f64) -> Result<f64> {
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParameter("snapshot times must increase".into()));
    }
    p_variation(series, p, |a, b| a.1.sub(&b.1).map(|d| d.l2_norm()).unwrap_or(f64::NAN))
}

/// All norms of one field with the parameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub label: String,
    pub alpha: f64,
    pub s: f64,
    pub q: SeqExponent,
    pub p: SeqExponent,
    pub covering_c: f64,
    pub modulation_sharp: f64,
    pub modulation_smooth: f64,
    pub besov: f64,
    pub sobolev: f64,
    /// `None` when the homogeneous norm is undefined (zero mode with `s < 0`).
    pub sobolev_homogeneous: Option<f64>,
    pub l2: f64,
    pub linf: f64,
    pub lp: f64,
    pub max_bracket: f64,
    pub max_dyadic_level: u32,
    /// smooth / sharp, `None` for the zero field
    pub smooth_to_sharp: Option<f64>,
    pub partial_sums: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub alpha: f64,
    pub s: f64,
    pub q: SeqExponent,
    pub p: SeqExponent,
}

pub fn norm_report(
    label: &str,
    field: &Field,
    params: NormParams,
    symbols: &DecompositionSymbols,
) -> Result<NormReport> {
    let SymbolKind::Alpha { c, .. } = symbols.kind else {
        return Err(Error::InvalidParameter("norm report needs alpha symbols".into()));
    };
    let spec = field.to_spectral();
    let sharp = modulation_norm(&spec, params.s, params.alpha, Variant::Sharp { c })?;
    let smooth = modulation_norm(&spec, params.s, params.alpha, Variant::Smooth(symbols))?;
    let besov = besov_norm(&spec, params.s, params.q)?;
    let homogeneous = match sobolev_norm(&spec, params.s, true) {
        Ok(v) => Some(v),
        Err(Error::ZeroMode { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(NormReport {
        label: label.to_string(),
        alpha: params.alpha,
        s: params.s,
        q: params.q,
        p: params.p,
        covering_c: c,
        modulation_sharp: sharp.value,
        modulation_smooth: smooth.value,
        besov: besov.value,
        sobolev: sobolev_norm(&spec, params.s, false)?,
        sobolev_homogeneous: homogeneous,
        l2: field.l2_norm(),
        linf: field.peak(),
        lp: lp_norm(field, params.p)?,
        max_bracket: smooth.max_bracket,
        max_dyadic_level: besov.terms.len().saturating_sub(1) as u32,
        smooth_to_sharp: (sharp.value > 0.0).then(|| smooth.value / sharp.value),
        partial_sums: smooth.partial_sums,
    })
}

/// Empirical embedding constants over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub s1: f64,
    pub s2: f64,
    pub alpha: f64,
    /// `||f||_{B^{s2}_{2,1}} / ||f||_{M^{s1,alpha}_{2,1}}` per field
    pub besov_over_modulation: Vec<f64>,
    /// `||f||_{M^{s2,alpha}_{2,1}} / ||f||_{B^{s1}_{2,1}}` per field
    pub modulation_over_besov: Vec<f64>,
    pub max_besov_over_modulation: f64,
    pub max_modulation_over_besov: f64,
}

pub fn embedding_report(
    corpus: &[SpectralField],
    s1: f64,
    s2: f64,
    symbols: &DecompositionSymbols,
) -> Result<EmbeddingReport> {
    let SymbolKind::Alpha { alpha, .. } = symbols.kind else {
        return Err(Error::InvalidParameter("embedding report needs alpha symbols".into()));
    };
    let mut first = Vec::with_capacity(corpus.len());
    let mut second = Vec::with_capacity(corpus.len());
    for f in corpus {
        let m1 = modulation_norm(f, s1, alpha, Variant::Smooth(symbols))?.value;
        let m2 = modulation_norm(f, s2, alpha, Variant::Smooth(symbols))?.value;
        let b1 = besov_norm(f, s1, Some(1.0))?.value;
        let b2 = besov_norm(f, s2, Some(1.0))?.value;
        if m1 > 0.0 && b1 > 0.0 {
            first.push(b2 / m1);
            second.push(m2 / b1);
        }
    }
    Ok(EmbeddingReport {
        s1,
        s2,
        alpha,
        max_besov_over_modulation: first.iter().copied().fold(0.0, f64::max),
        max_modulation_over_besov: second.iter().copied().fold(0.0, f64::max),
        besov_over_modulation: first,
        modulation_over_besov: second,
    })
}

/// Number of dyadic levels the grid represents.
pub fn dyadic_levels(grid: &GridSpec) -> usize {
    dyadic_symbols(grid).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{alpha_symbols, alpha_symbols_calibrated, make_bump, AlphaIndex};
    use crate::grid::{sample, sample_spectral, FieldSpec};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid1() -> GridSpec {
        GridSpec::new(1, 1024, 16.0 * PI).unwrap() // dxi = 1/16, xi_max = 32
    }

    fn unit_bump(g: &GridSpec, center: f64, width: f64) -> SpectralField {
        let f = sample_spectral(g, &FieldSpec::bump(vec![center], width)).unwrap();
        let n = f.l2_norm();
        f.scaled(Complex64::new(1.0 / n, 0.0))
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = grid1();
        let sym = alpha_symbols(&g, 0.5, 1.5).unwrap();
        let r =
            norm_report("zero", &Field::zeros(g), NormParams { alpha: 0.5, s: 0.3, q: Some(2.0), p: Some(4.0) }, &sym)
                .unwrap();
        for v in [r.modulation_sharp, r.modulation_smooth, r.besov, r.sobolev, r.l2, r.linf, r.lp] {
            assert_eq!(v, 0.0);
        }
        assert_eq!(r.sobolev_homogeneous, Some(0.0));
        assert_eq!(r.smooth_to_sharp, None);
    }

    #[test]
    fn sharp_single_bump_matches_box_by_box_integration() {
        let g = grid1();
        let c = 1.0;
        let f = unit_bump(&g, 5.0, 0.25);
        let m = modulation_norm(&f, 0.0, 0.0, Variant::Sharp { c }).unwrap().value;
        // brute force: for every integer k, integrate |f^|^2 over [k-1, k+1] with
        // a fine midpoint rule on the continuum bump, independent of the lattice
        let b = make_bump();
        let amp = 1.0 / {
            let h = 1e-4;
            let s: f64 = (0..20_000)
                .map(|i| {
                    let xi = 4.5 + (i as f64 + 0.5) * h;
                    b.radial((xi - 5.0).abs() / 0.25).powi(2)
                })
                .sum();
            (s * h / (2.0 * PI)).sqrt()
        };
        let mut oracle = 0.0;
        for k in -40i64..=40 {
            let (lo, hi) = (k as f64 - c, k as f64 + c);
            let h = 1e-4;
            let steps = ((hi - lo) / h) as usize;
            let s: f64 = (0..steps)
                .map(|i| {
                    let xi = lo + (i as f64 + 0.5) * h;
                    (amp * b.radial((xi - 5.0).abs() / 0.25)).powi(2)
                })
                .sum();
            oracle += (s * h / (2.0 * PI)).sqrt();
        }
        assert!((m / oracle - 1.0).abs() < 0.05, "sharp {m} oracle {oracle}");
        // the bump sits on the shared edge of boxes 4, 5, 6: 1 + 2 * (1/sqrt 2)
        assert_relative_eq!(oracle, 1.0 + 2f64.sqrt(), max_relative = 0.02);
    }

    #[test]
    fn two_unit_bumps_give_two() {
        let g = grid1();
        let sym = alpha_symbols_calibrated(&g, 0.0).unwrap();
        let f = unit_bump(&g, 0.0, 0.1).add(&unit_bump(&g, 5.0, 0.1)).unwrap();
        let m = modulation_norm(&f, 0.0, 0.0, Variant::Smooth(&sym)).unwrap().value;
        assert_relative_eq!(m, 2.0, max_relative = 1e-3);
    }

    #[test]
    fn besov_plane_wave_single_annulus() {
        let g = GridSpec::new(1, 256, PI).unwrap(); // dxi = 1
        let f = sample(&g, &FieldSpec::PlaneWave { frequency: vec![3.0] }).unwrap();
        let spec = f.to_spectral();
        let s = 0.7;
        let b = besov_norm(&spec, s, Some(2.0)).unwrap();
        let nonzero: Vec<_> = b.terms.iter().filter(|t| t.1 > 1e-12).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].0, 2);
        assert_relative_eq!(b.value, 4f64.powf(s) * f.l2_norm(), max_relative = 1e-12);
        let binf = besov_norm(&spec, s, None).unwrap();
        assert_relative_eq!(binf.value, b.value, max_relative = 1e-12);
    }

    #[test]
    fn annulus_boundaries() {
        assert_eq!(annulus_index(0.0), 0);
        assert_eq!(annulus_index(1.0), 0);
        assert_eq!(annulus_index(1.0000001), 1);
        assert_eq!(annulus_index(2.0), 2);
        assert_eq!(annulus_index(3.0), 2);
        assert_eq!(annulus_index(4.0), 3);
        assert_eq!(annulus_index(1023.9), 10);
        assert_eq!(annulus_index(1024.0), 11);
    }

    #[test]
    fn sobolev_zero_is_l2_and_zero_mode_guard() {
        let g = grid1();
        let f = sample(&g, &FieldSpec::Gaussian { center: vec![0.5], width: 2.0, frequency: vec![1.0] }).unwrap();
        let spec = f.to_spectral();
        assert_relative_eq!(sobolev_norm(&spec, 0.0, false).unwrap(), f.l2_norm(), max_relative = 1e-12);
        assert_relative_eq!(sobolev_norm(&spec, 0.0, true).unwrap(), f.l2_norm(), max_relative = 1e-12);
        assert!(matches!(sobolev_norm(&spec, -0.5, true), Err(Error::ZeroMode { .. })));
        let bump = unit_bump(&g, 10.0, 1.0);
        assert!(sobolev_norm(&bump, -0.5, true).is_ok());
    }

    #[test]
    fn zero_mode_index_in_two_dimensions() {
        let g = GridSpec::new(2, 16, PI).unwrap();
        let z = g.len() / 2 + zero_offset(&g);
        assert_eq!(g.frequency(z)[..2], [0.0, 0.0]);
    }

    #[test]
    fn gaussian_sup_norm_and_l2() {
        let g = GridSpec::new(1, 512, 20.0).unwrap();
        let f = sample(&g, &FieldSpec::Gaussian { center: vec![0.0], width: 1.0, frequency: vec![0.0] }).unwrap();
        assert_relative_eq!(lp_norm(&f, None).unwrap(), 1.0, max_relative = 1e-15);
        // int exp(-x^2) dx = sqrt(pi)
        assert_relative_eq!(f.l2_norm(), PI.powf(0.25), max_relative = 1e-10);
        assert_relative_eq!(lp_norm(&f, Some(2.0)).unwrap(), f.l2_norm(), max_relative = 1e-12);
    }

    #[test]
    fn modulation_dominates_l2_at_s_zero() {
        let g = grid1();
        for alpha in [0.0, 0.5] {
            let sym = alpha_symbols_calibrated(&g, alpha).unwrap();
            let f = unit_bump(&g, 3.0, 4.0).add(&unit_bump(&g, -12.0, 2.0)).unwrap();
            let m = modulation_norm(&f, 0.0, alpha, Variant::Smooth(&sym)).unwrap().value;
            assert!(m >= f.l2_norm() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn modulation_truncation_is_reported() {
        let g = grid1();
        let sym = alpha_symbols_calibrated(&g, 0.5).unwrap();
        let f = unit_bump(&g, 3.0, 1.0);
        let m = modulation_norm(&f, 0.2, 0.5, Variant::Smooth(&sym)).unwrap();
        assert!(m.max_bracket > 1.0);
        assert!(m.partial_sums.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].0 >= w[0].0));
        assert_relative_eq!(m.partial_sums.last().unwrap().1, m.value, max_relative = 1e-14);
        let sharp = modulation_norm(&f, 0.2, 0.5, Variant::Sharp { c: 1.5 }).unwrap();
        assert!(sharp.max_bracket >= AlphaIndex::new(&[1], 0.5, 1.5).bracket);
    }

    #[test]
    fn p_variation_basics() {
        let constant = vec![1.5; 7];
        assert_eq!(p_variation(&constant, 2.0, |a: &f64, b| (a - b).abs()).unwrap(), 0.0);
        let monotone = [0.0, 0.5, 0.7, 2.0, 2.1];
        assert_relative_eq!(
            p_variation(&monotone, 1.0, |a: &f64, b| (a - b).abs()).unwrap(),
            2.1,
            max_relative = 1e-15
        );
        assert!(matches!(p_variation(&[1.0], 1.0, |a: &f64, b| (a - b).abs()), Err(Error::InsufficientData { .. })));
        assert!(p_variation(&monotone, 0.5, |a: &f64, b| (a - b).abs()).is_err());
    }

    #[test]
    fn p_variation_picks_the_excursion() {
        // 0 -> 1 -> 0: for p = 2 the chain through the peak gives sqrt(2), skipping gives 0
        let v = [0.0, 1.0, 0.0];
        assert_relative_eq!(
            p_variation(&v, 2.0, |a: &f64, b| (a - b).abs()).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-15
        );
        // 0 -> 1 -> 2 with p = 2: one jump of 2 beats two jumps of 1
        let w = [0.0, 1.0, 2.0];
        assert_relative_eq!(p_variation(&w, 2.0, |a: &f64, b| (a - b).abs()).unwrap(), 2.0);
    }

    #[test]
    fn p_variation_of_field_series() {
        let g = GridSpec::new(1, 64, 5.0).unwrap();
        let a = sample(&g, &FieldSpec::Gaussian { center: vec![0.0], width: 1.0, frequency: vec![0.0] }).unwrap();
        let series = vec![(0.0, a.clone()), (0.5, a.scaled(Complex64::new(2.0, 0.0))), (1.0, a.clone())];
        let v = p_variation_fields(&series, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 * a.l2_norm(), max_relative = 1e-12);
        let bad = vec![(0.0, a.clone()), (0.0, a)];
        assert!(p_variation_fields(&bad, 1.0).is_err());
    }

    #[test]
    fn embedding_single_bump_ratios_finite() {
        let g = grid1();
        let sym = alpha_symbols_calibrated(&g, 0.0).unwrap();
        let f = unit_bump(&g, 6.0, 1.0);
        let r = embedding_report(&[f], 0.5, 0.5, &sym).unwrap();
        assert_eq!(r.besov_over_modulation.len(), 1);
        assert!(r.max_besov_over_modulation.is_finite() && r.max_besov_over_modulation > 0.0);
        assert!(r.max_modulation_over_besov.is_finite() && r.max_modulation_over_besov > 0.0);
    }
}
