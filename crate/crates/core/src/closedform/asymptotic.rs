use crate::error::{Error, Result};
use crate::fim::{CrbResult, Method, NoiseAndPowerConfig};
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{check_topology, Mode, Topology};
use crate::warning::Warning;
use std::f64::consts::PI;

/// Aperture-to-range regime of an asymptotic bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `D_T / r ≫ 1`.
    LargeAperture,
    /// `D_T / (r cos θ) → ∞`.
    InfiniteAperture,
    /// `D_T / r ≪ 1`.
    SmallAperture,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::LargeAperture => "large_aperture",
            Regime::InfiniteAperture => "infinite_aperture",
            Regime::SmallAperture => "small_aperture",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        [Regime::LargeAperture, Regime::InfiniteAperture, Regime::SmallAperture]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

/// `Ξ(θ) = (6 sin²θ + cos²θ cos 2θ) / (9 sin²θ + cos⁶θ)`.
pub fn xi_correction(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    (6.0 * s2 + c2 * (2.0 * theta).cos()) / (9.0 * s2 + c2 * c2 * c2)
}

fn regime_warning(regime: Regime, ratio: f64) -> Option<Warning> {
    let off = match regime {
        Regime::LargeAperture => ratio < 10.0,
        Regime::InfiniteAperture => ratio < 100.0,
        Regime::SmallAperture => ratio > 0.1,
    };
    off.then_some(Warning::RegimeMismatch { aperture_ratio: ratio })
}

/// Evaluates the asymptotic bound of a regime.
///
/// Bistatic forms exist for MIMO at `θ = 0` only (infinite and small
/// aperture); they report an infinite range bound. Small-aperture monostatic
/// forms give the angle bound only. A `sin²θ` numerator evaluated at `θ = 0`
/// returns exactly zero with a [`Warning::RegimeDegenerate`] tag.
pub fn crb_asymptotic(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    regime: Regime,
    mode: Mode,
    topology: Topology,
) -> Result<CrbResult> {
    check_topology(geom, topology)?;
    let co = tgt.check_not_endfire()?;
    let ratio = geom.tx_aperture() / tgt.range();
    let mut res = match topology {
        Topology::Monostatic => monostatic(geom, tgt, carrier, cfg, regime, mode, co)?,
        Topology::BistaticNearFarTx => bistatic(geom, tgt, carrier, cfg, regime, mode)?,
    };
    if let Some(w) = regime_warning(regime, ratio) {
        res.warnings.push(w);
    }
    Ok(res)
}

fn monostatic(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    regime: Regime,
    mode: Mode,
    co: f64,
) -> Result<CrbResult> {
    let pre = cfg.crb_prefactor();
    let lam2 = carrier.wavelength().powi(2);
    let m = geom.num_tx() as f64;
    let d = geom.tx_spacing();
    let r = tgt.range();
    let th = tgt.angle();
    let s = th.sin();
    // MIMO carries an extra factor M/2 relative to phased.
    let mode_scale = match mode {
        Mode::Mimo => 1.0,
        Mode::Phased => 2.0 / m,
    };
    match regime {
        Regime::LargeAperture => {
            let dr = geom.tx_aperture() / r;
            let big_x = dr / co;
            let lx = big_x.ln();
            let den = PI * big_x - 4.0 * lx * lx;
            let num_t = (dr * s).powi(2) + PI * dr * co * (2.0 * th).cos()
                - 4.0 * (co * co * lx + s * s).powi(2);
            let num_r = dr * dr + PI * dr * (2.0 * th).cos() / co - 4.0 * (lx - 1.0).powi(2) * s * s;
            if !(den > 0.0 && num_t > 0.0 && num_r > 0.0) {
                return Err(Error::Domain(format!(
                    "large-aperture expansion is not positive at D_T/r = {dr:.3e}"
                )));
            }
            let t = pre * lam2 * num_t / (8.0 * PI * PI * r * r * m * den * co * co) * mode_scale;
            let rr = pre * lam2 * num_r / (8.0 * PI * PI * m * den) * mode_scale;
            Ok(CrbResult::new(t, rr, Method::Asymptotic))
        }
        Regime::InfiniteAperture => {
            let pi3 = PI * PI * PI;
            let t = if th == 0.0 {
                0.0
            } else {
                pre * lam2 * d * s * s / (8.0 * pi3 * r.powi(3) * co) * mode_scale
            };
            let rr = pre * lam2 * d * co / (8.0 * pi3 * r) * mode_scale;
            let mut res = CrbResult::new(t, rr, Method::Asymptotic);
            if th == 0.0 {
                res.warnings.push(Warning::RegimeDegenerate);
            }
            Ok(res)
        }
        Regime::SmallAperture => {
            if geom.num_tx() == 1 {
                return Ok(CrbResult::unidentifiable(Method::Asymptotic));
            }
            let t = pre * 3.0 * lam2 * xi_correction(th) / (2.0 * PI * PI * d * d * m.powi(3) * co * co)
                * mode_scale;
            Ok(CrbResult::angle_only(t, Method::Asymptotic))
        }
    }
}

fn bistatic(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    regime: Regime,
    mode: Mode,
) -> Result<CrbResult> {
    if mode == Mode::Phased {
        return Ok(CrbResult::unidentifiable(Method::Asymptotic));
    }
    if tgt.angle() != 0.0 {
        return Err(Error::Domain("bistatic asymptotic bounds are defined at θ = 0 only".into()));
    }
    let pre = cfg.crb_prefactor();
    let lam2 = carrier.wavelength().powi(2);
    let n = geom.num_rx() as f64;
    let m = geom.num_tx() as f64;
    let r = tgt.range();
    let big_r = geom.separation();
    let dr2 = geom.rx_spacing().powi(2);
    match regime {
        Regime::LargeAperture => Err(Error::Domain(
            "no large-aperture bistatic expression; use infinite_aperture".into(),
        )),
        Regime::InfiniteAperture => {
            let t = pre * lam2
                / (PI * PI * r * r * n * (dr2 * (n * n - 1.0) / (3.0 * (big_r - r).powi(2)) + 4.0));
            Ok(CrbResult::angle_only(t, Method::Asymptotic))
        }
        Regime::SmallAperture => {
            let ratio = r / (big_r - r);
            let t = pre * 3.0 * lam2
                / (PI * PI * n * (dr2 * ratio * ratio * (n * n - 1.0) + geom.tx_spacing().powi(2) * m * m));
            Ok(CrbResult::angle_only(t, Method::Asymptotic))
        }
    }
}
