use nfcrb::signalsim::{mimo_chain_demo, phased_chain_demo, WaveformConfig, WaveformFamily};
use nfcrb::{ArrayGeometry, Carrier, NoiseAndPowerConfig, TargetLocation};
use num_complex::Complex64;

const TRIALS: u64 = 4000;

fn setup() -> (Carrier, TargetLocation, NoiseAndPowerConfig) {
    let c = Carrier::from_frequency(2.37e9).unwrap();
    let t = TargetLocation::new(4.0, -0.2).unwrap();
    let cfg = NoiseAndPowerConfig::from_raw(1.5, Complex64::new(0.3, 0.9), 0.8, 2e6, 3e-6).unwrap();
    (c, t, cfg)
}

// Sample covariance of y − y_noiseless over independent trials.
fn noise_covariance(sample: impl Fn(u64) -> Vec<Complex64>, clean: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = clean.len();
    let mut cov = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for s in 0..TRIALS {
        let e: Vec<Complex64> = sample(s).iter().zip(clean).map(|(y, c)| y - c).collect();
        for i in 0..n {
            for j in 0..n {
                cov[i][j] += e[i] * e[j].conj();
            }
        }
    }
    for row in &mut cov {
        for v in row.iter_mut() {
            *v /= TRIALS as f64;
        }
    }
    cov
}

fn assert_white(cov: &[Vec<Complex64>], n0: f64) {
    // 4000 trials: sd of a diagonal estimate is n0/√4000 ≈ 1.6%
    for (i, row) in cov.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i == j {
                assert!((v.re - n0).abs() < 0.08 * n0, "var[{i}] = {v}");
            } else {
                assert!(v.norm() < 0.08 * n0, "cov[{i}][{j}] = {v}");
            }
        }
    }
}

#[test]
fn mimo_filtered_noise_is_white_with_psd_variance() {
    let (c, t, cfg) = setup();
    let g = ArrayGeometry::new(3, 2, 0.0628, 0.0628, 20.0).unwrap();
    let wf = WaveformConfig::matching(&cfg, 6, WaveformFamily::OrthogonalCodes).unwrap();
    let clean = mimo_chain_demo(&g, &t, &c, &wf, &cfg.noiseless(), 0).unwrap().y;
    let cov = noise_covariance(|s| mimo_chain_demo(&g, &t, &c, &wf, &cfg, 77 + s).unwrap().y, &clean);
    assert_white(&cov, cfg.noise_psd());
}

#[test]
fn phased_filtered_noise_is_white_with_psd_variance() {
    let (c, t, cfg) = setup();
    let g = ArrayGeometry::monostatic(5, 0.0628).unwrap();
    let wf = WaveformConfig::matching(&cfg, 4, WaveformFamily::SinglePulse).unwrap();
    let clean = phased_chain_demo(&g, &t, &c, &wf, &cfg.noiseless(), &t, 0).unwrap().y;
    let cov = noise_covariance(|s| phased_chain_demo(&g, &t, &c, &wf, &cfg, &t, 5 + s).unwrap().y, &clean);
    assert_white(&cov, cfg.noise_psd());
}

#[test]
fn too_few_samples_for_orthogonal_codes_is_a_config_error() {
    let (c, t, cfg) = setup();
    let g = ArrayGeometry::monostatic(7, 0.0628).unwrap();
    let wf = WaveformConfig::matching(&cfg, 4, WaveformFamily::OrthogonalCodes).unwrap();
    assert!(matches!(mimo_chain_demo(&g, &t, &c, &wf, &cfg, 1), Err(nfcrb::Error::Config(_))));
}
