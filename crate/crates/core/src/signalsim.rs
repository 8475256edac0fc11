//! Synthetic post-matched-filter data and small waveform-level chains that
//! reduce to the same model.
//!
//! Randomness comes from ChaCha20 streams: a master seed selects the key and
//! the trial index selects the stream, so trial `k` draws the same numbers no
//! matter which thread runs it.

use crate::error::{Error, Result};
use crate::fim::NoiseAndPowerConfig;
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{Mode, Topology};
use crate::steering::{build_observation, tx_values, ObservationVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Generator for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Circularly-symmetric complex Gaussian with `E|z|² = variance`.
pub fn complex_gaussian(rng: &mut ChaCha20Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// One observation `y = ρ g + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub y: Vec<Complex64>,
    pub true_params: TargetLocation,
    pub seed: u64,
}

/// Draws `y = ρ g + n` with i.i.d. noise of variance `N₀` per entry.
pub fn synth_snapshot(obs: &ObservationVector, cfg: &NoiseAndPowerConfig, seed: u64) -> Snapshot {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let y = synth_with(&obs.g, cfg.rho(obs.mode, obs.num_tx), cfg.noise_psd(), &mut rng);
    Snapshot { y, true_params: obs.target, seed }
}

/// As [`synth_snapshot`] but drawing from a caller-provided stream.
pub fn synth_with(g: &[Complex64], rho: Complex64, noise_psd: f64, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    g.iter()
        .map(|&gi| {
            let n = if noise_psd > 0.0 { complex_gaussian(rng, noise_psd) } else { Complex64::new(0.0, 0.0) };
            rho * gi + n
        })
        .collect()
}

/// Waveform family of the chain demos.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveformFamily {
    /// `s_m[k] = exp(j2π m k / K)`: exactly orthogonal for `K >= M`.
    OrthogonalCodes,
    /// A single constant-envelope pulse.
    SinglePulse,
}

/// Discrete-time waveform parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformConfig {
    pub num_samples_per_cpi: usize,
    /// `T_p` in seconds.
    pub cpi_duration: f64,
    /// `B` in Hz.
    pub bandwidth: f64,
    pub family: WaveformFamily,
}

impl WaveformConfig {
    pub fn new(num_samples_per_cpi: usize, cpi_duration: f64, bandwidth: f64, family: WaveformFamily) -> Result<Self> {
        if num_samples_per_cpi == 0 {
            return Err(Error::Config("at least one sample per CPI is required".into()));
        }
        if !(cpi_duration > 0.0 && bandwidth > 0.0) || bandwidth * cpi_duration < 1.0 {
            return Err(Error::Config("waveform needs T_p, B > 0 and B·T_p >= 1".into()));
        }
        Ok(Self { num_samples_per_cpi, cpi_duration, bandwidth, family })
    }

    /// Waveform whose `T_p` and `B` match a noise/power configuration.
    pub fn matching(cfg: &NoiseAndPowerConfig, num_samples_per_cpi: usize, family: WaveformFamily) -> Result<Self> {
        Self::new(num_samples_per_cpi, cfg.cpi_duration(), cfg.bandwidth(), family)
    }

    fn check_against(&self, cfg: &NoiseAndPowerConfig) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        if !close(self.cpi_duration, cfg.cpi_duration()) || !close(self.bandwidth, cfg.bandwidth()) {
            return Err(Error::Config("waveform T_p/B disagree with the power configuration".into()));
        }
        Ok(())
    }

    fn dt(&self) -> f64 {
        self.cpi_duration / self.num_samples_per_cpi as f64
    }

    /// Sample `k` of code `m`.
    fn code(&self, m: usize, k: usize) -> Complex64 {
        let ns = self.num_samples_per_cpi;
        Complex64::from_polar(1.0, 2.0 * PI * ((m * k) % ns) as f64 / ns as f64)
    }

    fn codes(&self, count: usize) -> Result<Vec<Vec<Complex64>>> {
        match self.family {
            WaveformFamily::OrthogonalCodes if count > self.num_samples_per_cpi => Err(Error::Config(format!(
                "{count} orthogonal codes need at least {count} samples per CPI, got {}",
                self.num_samples_per_cpi
            ))),
            WaveformFamily::SinglePulse if count > 1 => Err(Error::Config(
                "a single pulse cannot provide orthogonal per-element waveforms".into(),
            )),
            _ => Ok((0..count)
                .map(|m| (0..self.num_samples_per_cpi).map(|k| self.code(m, k)).collect())
                .collect()),
        }
    }
}

/// Where the matched filter looks relative to the echo, in samples.
/// Offsets of at least one CPI see no overlap with the echo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChainOptions {
    pub filter_offset_samples: usize,
}

// Receive window: echo occupies [0, K); the filter reads [offset, offset + K).
struct Window {
    len: usize,
}

fn window(wf: &WaveformConfig, opts: &ChainOptions) -> Window {
    Window { len: wf.num_samples_per_cpi + opts.filter_offset_samples }
}

// Received samples on each receive element: Σ_m amp[n][m] s_m[k] + noise.
fn receive(
    wf: &WaveformConfig,
    codes: &[Vec<Complex64>],
    amp: &[Vec<Complex64>],
    noise_psd: f64,
    win: &Window,
    rng: &mut ChaCha20Rng,
) -> Vec<Vec<Complex64>> {
    let ns = wf.num_samples_per_cpi;
    let noise_var = noise_psd / wf.dt();
    amp.iter()
        .map(|row| {
            (0..win.len)
                .map(|k| {
                    let mut v = Complex64::new(0.0, 0.0);
                    if k < ns {
                        for (c, a) in codes.iter().zip(row) {
                            v += a * c[k];
                        }
                    }
                    if noise_psd > 0.0 {
                        v += complex_gaussian(rng, noise_var);
                    }
                    v
                })
                .collect()
        })
        .collect()
}

// (1/√T_p) Σ_k r[offset + k] s*[k] dt
fn matched_filter(wf: &WaveformConfig, rx: &[Complex64], code: &[Complex64], offset: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, s) in code.iter().enumerate() {
        acc += rx[offset + k] * s.conj();
    }
    acc * wf.dt() / wf.cpi_duration.sqrt()
}

fn receive_vector(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<Vec<Complex64>> {
    if geom.is_monostatic() {
        tx_values(geom, tgt, carrier)
    } else {
        Ok(build_observation(geom, tgt, carrier, Mode::Phased, Topology::BistaticNearFarTx)?.g)
    }
}

/// MIMO chain: orthogonal codes scaled by `√(P/M)`, propagation through
/// `b aᵀ`, white noise of PSD `N₀`, and a bank of matched filters.
/// Output entry `n·M + m` is filter `m` on receive element `n`.
pub fn mimo_chain_demo(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    waveforms: &WaveformConfig,
    cfg: &NoiseAndPowerConfig,
    seed: u64,
) -> Result<Snapshot> {
    mimo_chain(geom, tgt, carrier, waveforms, cfg, ChainOptions::default(), seed)
}

/// [`mimo_chain_demo`] with an adjustable filter delay.
pub fn mimo_chain(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    waveforms: &WaveformConfig,
    cfg: &NoiseAndPowerConfig,
    opts: ChainOptions,
    seed: u64,
) -> Result<Snapshot> {
    waveforms.check_against(cfg)?;
    let m = geom.num_tx();
    let codes = waveforms.codes(m)?;
    let a = tx_values(geom, tgt, carrier)?;
    let b = receive_vector(geom, tgt, carrier)?;
    let scale = cfg.kappa() * (cfg.total_power() / m as f64).sqrt();
    let amp: Vec<Vec<Complex64>> = b.iter().map(|bn| a.iter().map(|am| scale * bn * am).collect()).collect();
    let win = window(waveforms, &opts);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rx = receive(waveforms, &codes, &amp, cfg.noise_psd(), &win, &mut rng);
    let mut y = Vec::with_capacity(b.len() * m);
    for row in &rx {
        for code in &codes {
            y.push(matched_filter(waveforms, row, code, opts.filter_offset_samples));
        }
    }
    Ok(Snapshot { y, true_params: *tgt, seed })
}

/// Phased-array chain: one waveform beamformed with `a*(r′, θ′)/‖a‖`.
///
/// With matched steering the output is `κ√(T_p P M) b + n`; mismatched
/// steering scales the signal by `aᵀ(r,θ) a*(r′,θ′) / M`.
pub fn phased_chain_demo(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    waveforms: &WaveformConfig,
    cfg: &NoiseAndPowerConfig,
    steer_at: &TargetLocation,
    seed: u64,
) -> Result<Snapshot> {
    phased_chain(geom, tgt, carrier, waveforms, cfg, steer_at, ChainOptions::default(), seed)
}

/// [`phased_chain_demo`] with an adjustable filter delay.
#[allow(clippy::too_many_arguments)]
pub fn phased_chain(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    waveforms: &WaveformConfig,
    cfg: &NoiseAndPowerConfig,
    steer_at: &TargetLocation,
    opts: ChainOptions,
    seed: u64,
) -> Result<Snapshot> {
    waveforms.check_against(cfg)?;
    let codes = waveforms.codes(1)?;
    let a = tx_values(geom, tgt, carrier)?;
    let w = tx_values(geom, steer_at, carrier)?;
    let norm = (geom.num_tx() as f64).sqrt();
    let gain: Complex64 = a.iter().zip(&w).map(|(ai, wi)| ai * wi.conj()).sum::<Complex64>() / norm;
    let b = receive_vector(geom, tgt, carrier)?;
    let scale = cfg.kappa() * cfg.total_power().sqrt() * gain;
    let amp: Vec<Vec<Complex64>> = b.iter().map(|bn| vec![scale * bn]).collect();
    let win = window(waveforms, &opts);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rx = receive(waveforms, &codes, &amp, cfg.noise_psd(), &win, &mut rng);
    let y = rx
        .iter()
        .map(|row| matched_filter(waveforms, row, &codes[0], opts.filter_offset_samples))
        .collect();
    Ok(Snapshot { y, true_params: *tgt, seed })
}

/// `|aᵀ(r,θ) a*(r′,θ′)| / M`: the beamforming loss of mismatched steering.
pub fn steering_gain(geom: &ArrayGeometry, tgt: &TargetLocation, steer_at: &TargetLocation, carrier: &Carrier) -> Result<f64> {
    let a = tx_values(geom, tgt, carrier)?;
    let w = tx_values(geom, steer_at, carrier)?;
    let s: Complex64 = a.iter().zip(&w).map(|(ai, wi)| ai * wi.conj()).sum();
    Ok(s.norm() / geom.num_tx() as f64)
}
