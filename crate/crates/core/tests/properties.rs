use alphamod::construct::choose_kj;
use alphamod::decomp::{
    alpha_symbols, alpha_symbols_calibrated, dyadic_symbols, partition_residual, reconstruct, PieceIndex,
};
use alphamod::evolve::{free_propagate, scaling_transform, strang_step, EvolutionConfig, ScaleTarget};
use alphamod::grid::{sample, FieldSpec};
use alphamod::norms::{besov_norm, lp_norm, modulation_norm, p_variation, sobolev_norm, Variant};
use alphamod::{Field, GridSpec, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_values(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn random_field(grid: GridSpec, seed: u64) -> Field {
    Field::new(grid, random_values(grid.len(), seed)).unwrap()
}

/// Random coefficients confined to `|ξ_a| <= band`.
fn random_band_limited(grid: GridSpec, seed: u64, band: f64) -> SpectralField {
    SpectralField::new(grid, random_values(grid.len(), seed)).unwrap().band_limited(band)
}

fn grids() -> Vec<GridSpec> {
    vec![GridSpec::new(1, 64, 5.0).unwrap(), GridSpec::new(1, 256, 20.0).unwrap(), GridSpec::new(2, 32, 4.0).unwrap()]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trip_and_plancherel(seed in any::<u64>(), which in 0usize..3) {
        let g = grids()[which];
        let f = random_field(g, seed);
        let spec = f.to_spectral();
        let back = spec.to_physical();
        let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
        prop_assert!(err <= 1e-12, "round trip {err}");
        prop_assert!(rel(spec.l2_norm(), f.l2_norm()) <= 1e-12);
    }

    #[test]
    fn translation_is_a_phase(seed in any::<u64>(), shift in -20i64..20) {
        let g = GridSpec::new(1, 64, 5.0).unwrap();
        let f = random_field(g, seed);
        let moved = f.shifted(&[shift]).to_spectral();
        let phased = SpectralField::from_fn(g, |_| Complex64::new(0.0, 0.0)).unwrap();
        let spec = f.to_spectral();
        let mut expected = phased.coefficients.clone();
        for (i, z) in expected.iter_mut().enumerate() {
            let xi = g.frequency(i)[0];
            *z = spec.coefficients[i] * Complex64::from_polar(1.0, -xi * shift as f64 * g.dx);
        }
        let diff = moved.coefficients.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let top = expected.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12 * top);
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0, alpha in 0.0f64..0.8) {
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = random_band_limited(g, seed, 0.8 * g.xi_max);
        let c = Complex64::new(re, im);
        let cf = f.scaled(c);
        let symbols = alpha_symbols_calibrated(&g, alpha).unwrap();
        let pairs = [
            (modulation_norm(&f, 0.3, alpha, Variant::Sharp { c: 1.0 }).unwrap().value,
             modulation_norm(&cf, 0.3, alpha, Variant::Sharp { c: 1.0 }).unwrap().value),
            (modulation_norm(&f, -0.2, alpha, Variant::Smooth(&symbols)).unwrap().value,
             modulation_norm(&cf, -0.2, alpha, Variant::Smooth(&symbols)).unwrap().value),
            (besov_norm(&f, 0.5, Some(2.0)).unwrap().value, besov_norm(&cf, 0.5, Some(2.0)).unwrap().value),
            (besov_norm(&f, 0.5, None).unwrap().value, besov_norm(&cf, 0.5, None).unwrap().value),
            (sobolev_norm(&f, 1.0, false).unwrap(), sobolev_norm(&cf, 1.0, false).unwrap()),
            (lp_norm(&f.to_physical(), Some(3.0)).unwrap(), lp_norm(&cf.to_physical(), Some(3.0)).unwrap()),
            (lp_norm(&f.to_physical(), None).unwrap(), lp_norm(&cf.to_physical(), None).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(rel(b, c.norm() * a) <= 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), alpha in 0.0f64..0.8) {
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = random_band_limited(g, s1, 0.8 * g.xi_max);
        let h = random_band_limited(g, s2, 0.8 * g.xi_max);
        let sum = f.add(&h).unwrap();
        let symbols = alpha_symbols_calibrated(&g, alpha).unwrap();
        let norms = |x: &SpectralField| {
            vec![
                modulation_norm(x, 0.4, alpha, Variant::Sharp { c: 1.0 }).unwrap().value,
                modulation_norm(x, 0.4, alpha, Variant::Smooth(&symbols)).unwrap().value,
                besov_norm(x, 0.4, Some(1.0)).unwrap().value,
                besov_norm(x, 0.4, None).unwrap().value,
                sobolev_norm(x, 0.4, false).unwrap(),
                lp_norm(&x.to_physical(), Some(4.0)).unwrap(),
            ]
        };
        let (a, b, c) = (norms(&f), norms(&h), norms(&sum));
        for i in 0..a.len() {
            prop_assert!(c[i] <= (a[i] + b[i]) * (1.0 + 1e-10), "norm {i}: {} > {} + {}", c[i], a[i], b[i]);
        }
    }

    #[test]
    fn monotone_in_regularity(seed in any::<u64>(), s in -1.0f64..1.0, ds in 0.0f64..1.0, alpha in 0.0f64..0.8) {
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = random_band_limited(g, seed, 0.8 * g.xi_max);
        let symbols = alpha_symbols_calibrated(&g, alpha).unwrap();
        let t = s + ds;
        let sharp = Variant::Sharp { c: 1.0 };
        let pairs = [
            (modulation_norm(&f, s, alpha, sharp).unwrap().value, modulation_norm(&f, t, alpha, sharp).unwrap().value),
            (modulation_norm(&f, s, alpha, Variant::Smooth(&symbols)).unwrap().value,
             modulation_norm(&f, t, alpha, Variant::Smooth(&symbols)).unwrap().value),
            (besov_norm(&f, s, Some(2.0)).unwrap().value, besov_norm(&f, t, Some(2.0)).unwrap().value),
            (sobolev_norm(&f, s, false).unwrap(), sobolev_norm(&f, t, false).unwrap()),
        ];
        for (lo, hi) in pairs {
            prop_assert!(lo <= hi * (1.0 + 1e-12), "{lo} > {hi}");
        }
    }

    #[test]
    fn modulation_dominates_l2(seed in any::<u64>(), alpha in 0.0f64..0.8) {
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = random_band_limited(g, seed, 0.8 * g.xi_max);
        let symbols = alpha_symbols_calibrated(&g, alpha).unwrap();
        let m = modulation_norm(&f, 0.0, alpha, Variant::Smooth(&symbols)).unwrap().value;
        prop_assert!(m >= f.l2_norm() * (1.0 - 1e-12));
        let sharp = modulation_norm(&f, 0.0, alpha, Variant::Sharp { c: 1.0 }).unwrap().value;
        prop_assert!(sharp >= f.l2_norm() * (1.0 - 1e-12));
    }

    #[test]
    fn propagator_group_law(seed in any::<u64>(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let g = GridSpec::new(1, 128, 10.0).unwrap();
        let f = random_field(g, seed).to_spectral();
        let a = free_propagate(&free_propagate(&f, t1), t2);
        let b = free_propagate(&f, t1 + t2);
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-13 * f.l2_norm() * 10.0);
        prop_assert!(rel(a.l2_norm(), f.l2_norm()) <= 1e-13);
    }

    #[test]
    fn gauge_covariance(seed in any::<u64>(), theta in 0.0f64..6.3, kappa in 1u32..4) {
        let g = GridSpec::new(1, 64, 8.0).unwrap();
        let u = random_band_limited(g, seed, 0.5 * g.xi_max).to_physical();
        let cfg = EvolutionConfig::new(1.0, kappa, 1e-3, 1e-3);
        let rot = Complex64::from_polar(1.0, theta);
        let a = strang_step(&u.scaled(rot), &cfg).unwrap();
        let b = strang_step(&u, &cfg).unwrap().scaled(rot);
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-13 * u.l2_norm());
    }

    #[test]
    fn choose_kj_window(alpha in 0.0f64..0.95, j in 0u32..40) {
        match choose_kj(alpha, j) {
            Ok(k) => {
                let v = (1.0 + (k as f64).powi(2)).sqrt().powf(alpha / (1.0 - alpha)) * k as f64;
                prop_assert!(v >= 2f64.powf(j as f64 + 0.25) && v < 2f64.powf(j as f64 + 0.5));
                if k > 1 {
                    let km = (k - 1) as f64;
                    let w = (1.0 + km * km).sqrt().powf(alpha / (1.0 - alpha)) * km;
                    prop_assert!(w < 2f64.powf(j as f64 + 0.25));
                }
            }
            Err(alphamod::Error::WindowEmpty { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn critical_sobolev_scaling(width in 0.7f64..1.5, center in -1.0f64..1.0, freq in 6.0f64..10.0, sign in prop::bool::ANY, kappa in 2u32..5) {
        // ||σ^{1/κ} u(σ·)||_{Ḣ^{s(κ)}} = ||u||_{Ḣ^{s(κ)}} with s(κ) = d/2 - 1/κ; the carrier
        // frequency keeps mass away from the non-smooth weight at ξ = 0
        let g = GridSpec::new(1, 2048, 40.0).unwrap();
        let freq = if sign { freq } else { -freq };
        let u = sample(&g, &FieldSpec::Gaussian { center: vec![center], width, frequency: vec![freq] }).unwrap();
        let s = 0.5 - 1.0 / kappa as f64;
        let v = scaling_transform(&u, 2.0, kappa, ScaleTarget::SameGrid).unwrap();
        let a = sobolev_norm(&u.to_spectral(), s, true).unwrap();
        let b = sobolev_norm(&v.to_spectral(), s, true).unwrap();
        prop_assert!(rel(a, b) <= 1e-6, "{a} {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn p_variation_matches_enumeration(values in prop::collection::vec(-50i64..50, 2..=12), p in 1u32..4) {
        // integer samples keep every partial sum exact
        let series: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let dist = |a: &f64, b: &f64| (a - b).abs();
        let dp = p_variation(&series, p as f64, dist).unwrap();
        let n = series.len();
        let mut best = 0.0_f64;
        // every subset of the interior indices, endpoints always included
        for mask in 0u32..(1 << (n - 2)) {
            let mut idx = vec![0];
            idx.extend((1..n - 1).filter(|i| mask & (1 << (i - 1)) != 0));
            idx.push(n - 1);
            let sum: f64 = idx.windows(2).map(|w| dist(&series[w[0]], &series[w[1]]).powi(p as i32)).sum();
            best = best.max(sum);
        }
        prop_assert_eq!(dp, best.powf(1.0 / p as f64));
    }
}

#[test]
fn partition_of_unity_all_alphas() {
    for d in [1, 2] {
        let g = if d == 1 { GridSpec::new(1, 256, 10.0).unwrap() } else { GridSpec::new(2, 64, 5.0).unwrap() };
        assert!(partition_residual(&dyadic_symbols(&g)) <= 1e-14);
        for alpha in [0.0, 0.3, 0.5, 0.8] {
            let symbols = alpha_symbols_calibrated(&g, alpha).unwrap();
            assert!(partition_residual(&symbols) <= 1e-12, "alpha {alpha} d {d}");
            let f = random_band_limited(g, 7, g.xi_max);
            let r = reconstruct(&f, &symbols).unwrap();
            assert!(r.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
        }
    }
}

#[test]
fn symbols_respect_their_supports() {
    let g = GridSpec::new(1, 512, 20.0).unwrap();
    for p in &dyadic_symbols(&g).pieces {
        let PieceIndex::Dyadic(j) = p.index else { unreachable!() };
        for &(i, _) in &p.entries {
            let r = g.frequency(i)[0].abs();
            assert!(r <= 2f64.powi(j as i32 + 1) && (j == 0 || r >= 2f64.powi(j as i32 - 1)));
        }
    }
    let symbols = alpha_symbols(&g, 0.5, 1.0).unwrap();
    for p in &symbols.pieces {
        let PieceIndex::Alpha(k) = p.index else { unreachable!() };
        for &(i, _) in &p.entries {
            assert!((g.frequency(i)[0] - k.center[0]).abs() <= 2.0 * k.radius);
        }
    }
}

#[test]
fn alpha_zero_symbols_are_translates() {
    let g = GridSpec::new(1, 256, 8.0 * std::f64::consts::PI).unwrap();
    // dxi = 1/8, so unit translates land on the lattice
    let symbols = alpha_symbols(&g, 0.0, 1.0).unwrap();
    let profile = |k: i64| -> Vec<(i64, f64)> {
        let p = symbols.pieces.iter().find(|p| matches!(p.index, PieceIndex::Alpha(a) if a.k[0] == k)).unwrap();
        p.entries.iter().map(|&(i, v)| (i as i64 - 8 * k, v)).collect()
    };
    let base = profile(0);
    for k in [-3, 2, 5] {
        let other = profile(k);
        assert_eq!(other.len(), base.len());
        for (a, b) in base.iter().zip(&other) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() <= 1e-14);
        }
    }
}
