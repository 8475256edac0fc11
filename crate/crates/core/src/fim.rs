//! Fisher information over `(θ, r, κ_r, κ_i)`, nuisance elimination, and the
//! exact-summation path.

use crate::closedform::{self, IntermediateParams, RxParams};
use crate::error::{Error, Result};
use crate::geometry::{
    sin_phi_derivatives, tx_range_with_derivatives, ArrayGeometry, Carrier, TargetLocation,
};
use crate::scenario::{check_topology, model_warnings, Mode, Topology};
use crate::steering::ObservationVector;
use crate::warning::Warning;
use num_complex::Complex64;
use std::fmt;

/// Relative determinant threshold below which a 2×2 information block is
/// declared singular.
pub const IDENTIFIABILITY_TOL: f64 = 1e-12;

/// Transmit power, reflection coefficient and noise level.
///
/// Either built from physical quantities ([`from_raw`](Self::from_raw)) or
/// from `γ` and `L` directly ([`from_snr`](Self::from_snr)), in which case the
/// representatives are `|κ| = 1`, `P = γ`, `N₀ = 1`, `B = 1`, `T_p = L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseAndPowerConfig {
    kappa: Complex64,
    total_power: f64,
    noise_psd: f64,
    bandwidth: f64,
    cpi_duration: f64,
}

impl NoiseAndPowerConfig {
    pub fn from_snr(snr_linear: f64, time_bandwidth: f64) -> Result<Self> {
        if !(snr_linear > 0.0 && snr_linear.is_finite()) {
            return Err(Error::Domain(format!("SNR must be positive, got {snr_linear}")));
        }
        if !(time_bandwidth >= 1.0 && time_bandwidth.is_finite()) {
            return Err(Error::Domain(format!("L = B·T_p must be >= 1, got {time_bandwidth}")));
        }
        Ok(Self {
            kappa: Complex64::new(1.0, 0.0),
            total_power: snr_linear,
            noise_psd: 1.0,
            bandwidth: 1.0,
            cpi_duration: time_bandwidth,
        })
    }

    pub fn from_snr_db(snr_db: f64, time_bandwidth: f64) -> Result<Self> {
        Self::from_snr(10f64.powf(snr_db / 10.0), time_bandwidth)
    }

    pub fn from_raw(
        total_power: f64,
        kappa: Complex64,
        noise_psd: f64,
        bandwidth: f64,
        cpi_duration: f64,
    ) -> Result<Self> {
        if !(total_power > 0.0 && total_power.is_finite()) {
            return Err(Error::Domain(format!("P must be positive, got {total_power}")));
        }
        if !(kappa.norm() > 0.0 && kappa.norm().is_finite()) {
            return Err(Error::Domain("κ must be non-zero".into()));
        }
        if !(noise_psd > 0.0 && noise_psd.is_finite()) {
            return Err(Error::Domain(format!("N0 must be positive, got {noise_psd}")));
        }
        if !(bandwidth > 0.0 && cpi_duration > 0.0) {
            return Err(Error::Domain("B and T_p must be positive".into()));
        }
        let cfg = Self { kappa, total_power, noise_psd, bandwidth, cpi_duration };
        if cfg.time_bandwidth() < 1.0 {
            return Err(Error::Domain(format!(
                "L = B·T_p must be >= 1, got {}",
                cfg.time_bandwidth()
            )));
        }
        Ok(cfg)
    }

    /// Same signal with the noise switched off (for simulation only).
    pub fn noiseless(&self) -> Self {
        Self { noise_psd: 0.0, ..*self }
    }

    /// `γ = P|κ|² / (N₀ B)`.
    pub fn snr_linear(&self) -> f64 {
        self.total_power * self.kappa.norm_sqr() / (self.noise_psd * self.bandwidth)
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr_linear().log10()
    }

    /// `L = B T_p`.
    pub fn time_bandwidth(&self) -> f64 {
        self.bandwidth * self.cpi_duration
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn noise_psd(&self) -> f64 {
        self.noise_psd
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn cpi_duration(&self) -> f64 {
        self.cpi_duration
    }

    /// Amplitude `ρ`: `κ√(T_p P/M)` for MIMO, `κ√(T_p P M)` for phased.
    pub fn rho(&self, mode: Mode, num_tx: usize) -> Complex64 {
        let m = num_tx as f64;
        let power = match mode {
            Mode::Mimo => self.cpi_duration * self.total_power / m,
            Mode::Phased => self.cpi_duration * self.total_power * m,
        };
        self.kappa * power.sqrt()
    }

    /// `1 / (2γL)`.
    pub fn crb_prefactor(&self) -> f64 {
        1.0 / (2.0 * self.snr_linear() * self.time_bandwidth())
    }
}

/// Which formula produced a [`CrbResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    NumericalFim,
    ExactSumQ,
    ClosedForm,
    Asymptotic,
    Taylor,
    FarFieldUpw,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ClosedForm,
        Method::ExactSumQ,
        Method::NumericalFim,
        Method::Asymptotic,
        Method::Taylor,
        Method::FarFieldUpw,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::NumericalFim => "numerical_fim",
            Method::ExactSumQ => "exact_sum",
            Method::ClosedForm => "closed_form",
            Method::Asymptotic => "asymptotic",
            Method::Taylor => "taylor",
            Method::FarFieldUpw => "far_field_upw",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Angle and range bounds.
///
/// `identifiable == false` means the range (and possibly the angle) cannot
/// be estimated; infinite entries are `f64::INFINITY`. Far-field and
/// small-aperture references report a finite angle bound next to an
/// infinite range bound and are flagged unidentifiable.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbResult {
    /// rad²
    pub crb_theta: f64,
    /// m²
    pub crb_range: f64,
    pub identifiable: bool,
    pub method: Method,
    pub warnings: Vec<Warning>,
}

impl CrbResult {
    pub fn new(crb_theta: f64, crb_range: f64, method: Method) -> Self {
        Self { crb_theta, crb_range, identifiable: true, method, warnings: Vec::new() }
    }

    pub fn unidentifiable(method: Method) -> Self {
        Self {
            crb_theta: f64::INFINITY,
            crb_range: f64::INFINITY,
            identifiable: false,
            method,
            warnings: Vec::new(),
        }
    }

    /// Finite angle bound without range information.
    pub fn angle_only(crb_theta: f64, method: Method) -> Self {
        Self {
            crb_theta,
            crb_range: f64::INFINITY,
            identifiable: false,
            method,
            warnings: Vec::new(),
        }
    }

    pub fn with_warnings(mut self, warnings: Vec<Warning>) -> Self {
        self.warnings.extend(warnings);
        self
    }
}

/// Diagonal of the inverse of `[[q11, q12], [q12, q22]]`, or `None` when
/// `det <= IDENTIFIABILITY_TOL * scale`.
pub(crate) fn inverse_diag_2x2(q11: f64, q12: f64, q22: f64, scale: f64) -> Option<(f64, f64)> {
    let det = q11 * q22 - q12 * q12;
    if !(q11 > 0.0 && q22 > 0.0) || !det.is_finite() || det <= IDENTIFIABILITY_TOL * scale {
        return None;
    }
    Some((q22 / det, q11 / det))
}

/// 4×4 Fisher information, parameter order `(θ, r, κ_r, κ_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimMatrix {
    pub entries: [[f64; 4]; 4],
}

impl FimMatrix {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Largest `|F_ij - F_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.entries.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i]).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// `Π₁₁ - Π₁₂ Π₂₂⁻¹ Π₁₂ᵀ`, or `None` when `Π₂₂` is singular.
    pub fn schur_complement(&self) -> Option<[[f64; 2]; 2]> {
        let f = &self.entries;
        let (p11, p12, p22) = (f[2][2], f[2][3], f[3][3]);
        let det = p11 * p22 - p12 * p12;
        let tr = p11 + p22;
        if !(det > IDENTIFIABILITY_TOL * tr * tr / 4.0) {
            return None;
        }
        let inv = [[p22 / det, -p12 / det], [-p12 / det, p11 / det]];
        let mut q = [[0.0; 2]; 2];
        for (i, row) in q.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                let mut corr = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        corr += f[i][2 + k] * inv[k][l] * f[j][2 + l];
                    }
                }
                *out = f[i][j] - corr;
            }
        }
        Some(q)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `F = (2/N₀) Re{∂wᴴ ∂w}` with `w = ρ g`, by direct summation over `g`.
pub fn fim_numeric(obs: &ObservationVector, cfg: &NoiseAndPowerConfig) -> FimMatrix {
    let rho = cfg.rho(obs.mode, obs.num_tx);
    let unit = rho / cfg.kappa();
    let j = Complex64::new(0.0, 1.0);
    // compensated sums: the range entry loses up to ten digits to the
    // phase nuisance in the Schur complement
    let mut acc = [[Neumaier::default(); 4]; 4];
    for i in 0..obs.g.len() {
        let d = [rho * obs.g_theta[i], rho * obs.g_range[i], unit * obs.g[i], j * unit * obs.g[i]];
        for a in 0..4 {
            for b in a..4 {
                acc[a][b].add((d[a].conj() * d[b]).re);
            }
        }
    }
    let scale = 2.0 / cfg.noise_psd();
    let mut entries = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            entries[a][b] = scale * acc[a][b].total();
            entries[b][a] = entries[a][b];
        }
    }
    FimMatrix { entries }
}

/// Bounds from a Fisher matrix via the Schur complement.
pub fn crb_from_fim(fim: &FimMatrix) -> CrbResult {
    let Some(q) = fim.schur_complement() else {
        return CrbResult::unidentifiable(Method::NumericalFim);
    };
    let tr = q[0][0] + q[1][1];
    match inverse_diag_2x2(q[0][0], q[0][1], q[1][1], tr * tr / 4.0) {
        Some((t, r)) => CrbResult::new(t, r, Method::NumericalFim),
        None => CrbResult::unidentifiable(Method::NumericalFim),
    }
}

// Σ f(m) over the symmetric index set, pairing ±m so odd summands cancel exactly.
fn symmetric_sum(h: i64, f: impl Fn(f64) -> f64) -> f64 {
    let mut s = f(0.0);
    for m in 1..=h {
        s += f(m as f64) + f(-(m as f64));
    }
    s
}

/// Transmit intermediates `a, c, e, p, q` by summation over the elements.
pub fn intermediates_exact_sum(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
) -> Result<IntermediateParams> {
    tgt.check_eps_tx(geom)?;
    let k = carrier.wavenumber();
    let h = geom.max_tx_index();
    let d = |m: f64| tx_range_with_derivatives(geom, tgt, m);
    let a = k * k * symmetric_sum(h, |m| d(m).1.powi(2));
    let c = k * symmetric_sum(h, |m| d(m).1);
    let e = k * k * symmetric_sum(h, |m| d(m).1 * d(m).2);
    let p = k * k * symmetric_sum(h, |m| d(m).2.powi(2));
    let q = k * symmetric_sum(h, |m| d(m).2);
    let rx = if geom.is_monostatic() { None } else { Some(rx_exact_sum(geom, tgt, carrier)?) };
    Ok(IntermediateParams {
        a,
        c: Complex64::new(0.0, c),
        e,
        p,
        q: Complex64::new(0.0, q),
        rx,
    })
}

/// Far-field receive intermediates by summation over the receive offsets.
pub fn rx_exact_sum(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<RxParams> {
    let (gt, gr) = sin_phi_derivatives(geom, tgt)?;
    let k = carrier.wavenumber();
    let u = k * geom.rx_spacing();
    let (mut s1, mut s2) = (0.0, 0.0);
    for n in geom.rx_offsets() {
        s1 += n;
        s2 += n * n;
    }
    // (∂b/∂θ)ᴴ b = -j u Γθ Σn
    Ok(RxParams {
        i: u * u * gt * gt * s2,
        s: u * u * gr * gr * s2,
        k: u * u * gt * gr * s2,
        f: Complex64::new(0.0, -u * gt * s1),
        h: Complex64::new(0.0, -u * gr * s1),
    })
}

/// Bounds from exactly summed intermediates pushed through the closed-form
/// algebra of the mode/topology.
pub fn crb_exact_sum(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
    topology: Topology,
) -> Result<CrbResult> {
    check_topology(geom, topology)?;
    let ip = intermediates_exact_sum(geom, tgt, carrier)?;
    let res = closedform::crb_from_intermediates(&ip, geom, cfg, mode, topology, Method::ExactSumQ)?;
    Ok(res.with_warnings(model_warnings(geom, tgt)))
}
