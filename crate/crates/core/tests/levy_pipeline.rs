use quasiopt::levy::{
    backward_transform, cutoff_density_estimate, empirical_transform, l2_error, price_curve, true_density, GridSpec,
    MertonModel, ObservationSet, SpectralGrid,
};

fn default_grid() -> SpectralGrid {
    SpectralGrid::new(GridSpec::default()).unwrap()
}

#[test]
fn doubling_the_grid_leaves_the_price_curve_unchanged() {
    let m = MertonModel::default();
    let coarse = default_grid();
    let fine = SpectralGrid::new(GridSpec {
        size: 8192,
        v_max: 60.0,
    })
    .unwrap();
    let a = price_curve(&m, &coarse, 1e-3).unwrap();
    let b = price_curve(&m, &fine, 1e-3).unwrap();
    let worst = coarse
        .positions()
        .iter()
        .zip(a.values())
        .filter(|(x, _)| x.abs() <= 20.0)
        .map(|(&x, &o)| (o - b.value_at(x).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "sup difference {worst:e}");
}

#[test]
fn noiseless_round_trip_recovers_the_jump_density() {
    let m = MertonModel::default();
    let g = default_grid();
    let curve = price_curve(&m, &g, 1e-3).unwrap();
    let obs = ObservationSet::new(g.positions().to_vec(), curve.values().to_vec()).unwrap();
    let fo = empirical_transform(&obs, &g).unwrap();
    assert!(g.hermitian_defect(&fo) < 1e-12);
    let fmu = backward_transform(&fo, &m, &g).unwrap();
    let est = cutoff_density_estimate(&fmu, g.v_max(), &g).unwrap();
    assert!(est.imaginary_residue < 1e-6);
    let err = l2_error(&est.values, &true_density(&m, &g), &g, 8.0);
    assert!(err < 1e-4, "L2 error {err:e}");
}

#[test]
fn zero_intensity_has_brownian_drift() {
    let m = MertonModel {
        intensity: 0.0,
        ..MertonModel::default()
    };
    assert!((m.martingale_drift() + 0.005).abs() < 1e-15);
    let twice = MertonModel {
        intensity: 10.0,
        ..MertonModel::default()
    };
    let one = MertonModel::default();
    let step = -5.0 * (0.5f64.exp() - 1.0);
    assert!((twice.martingale_drift() - (one.martingale_drift() + step)).abs() < 1e-12);
}

#[test]
fn drift_solves_the_martingale_condition_by_quadrature() {
    // E e^{L_1} = e^{γ + σ²/2} E e^{Σ J} with Σ J a compound Poisson sum;
    // the series is evaluated term by term with the Gaussian jump MGF
    // replaced by a quadrature of e^x φ(x).
    let m = MertonModel::default();
    let h = 1e-3;
    let mgf: f64 = (-12_000..=12_000)
        .map(|i| {
            let x = i as f64 * h;
            x.exp() * (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt() * h
        })
        .sum();
    let compound = (m.intensity * (mgf - 1.0)).exp();
    let value = (m.martingale_drift() + 0.5 * m.volatility.powi(2)).exp() * compound;
    assert!((value - 1.0).abs() < 1e-12, "{value}");
}
