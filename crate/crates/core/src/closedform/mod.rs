//! Closed-form, asymptotic, Taylor and far-field reference bounds.
//!
//! All aperture-dependent expressions use `D_T = M d_T`.

mod asymptotic;
mod broadside;
mod reference;

pub use asymptotic::{crb_asymptotic, xi_correction, Regime};
pub use broadside::{
    bistatic_range_crb_minimizer, crb_bistatic_broadside, range_crb_shape, range_crb_vs_ratio,
};
pub use reference::{crb_farfield_upw, crb_taylor};

use crate::error::{Error, Result};
use crate::fim::{inverse_diag_2x2, CrbResult, Method, NoiseAndPowerConfig};
use crate::geometry::{angular_span_raw, sin_phi_derivatives, ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{check_topology, model_warnings, Mode, Topology};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Far-field receive-side intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxParams {
    pub i: f64,
    pub s: f64,
    pub k: f64,
    pub f: Complex64,
    pub h: Complex64,
}

/// Transmit-side intermediates `a, c, e, p, q`, plus the receive side for
/// bistatic geometries.
///
/// `c` and `q` are purely imaginary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateParams {
    pub a: f64,
    pub c: Complex64,
    pub e: f64,
    pub p: f64,
    pub q: Complex64,
    pub rx: Option<RxParams>,
}

/// Integral approximations of the transmit intermediates, and the receive
/// side when `R > 0`.
pub fn intermediates_closed(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
) -> Result<IntermediateParams> {
    let co = tgt.check_not_endfire()?;
    let eps = tgt.check_eps_tx(geom)?;
    let k = carrier.wavenumber();
    let r = tgt.range();
    let th = tgt.angle();
    let s = th.sin();
    let x = geom.tx_aperture() / r;

    let a_plus = x * x / 4.0 - s * x + 1.0;
    let a_minus = x * x / 4.0 + s * x + 1.0;
    let g3 = (-2.0 * x * s / a_minus).ln_1p();
    let span = angular_span_raw(x, th, co);
    let p1 = (-x / 2.0 - s) / co;
    let p2 = (x / 2.0 - s) / co;
    let psi = p2.asinh() - p1.asinh();
    let sqrt_diff = -2.0 * x * s / (a_plus.sqrt() + a_minus.sqrt());
    let cos2 = (2.0 * th).cos();
    let sin2 = (2.0 * th).sin();

    let a = k * k * r * r * co * co / eps * (x + s * g3 - cos2 / co * span);
    let c = -k * r * co / eps * (sqrt_diff + psi * s);
    let e = k * k * r * co / eps * (x * s - cos2 / 2.0 * g3 - span * sin2);
    let p = k * k / eps * (s * s * x - g3 * co * co * s + span * co * cos2);
    let q = k / eps * (psi * co * co - s * sqrt_diff);

    let rx = if geom.is_monostatic() { None } else { Some(rx_closed(geom, tgt, carrier)?) };
    Ok(IntermediateParams {
        a,
        c: Complex64::new(0.0, c),
        e,
        p,
        q: Complex64::new(0.0, q),
        rx,
    })
}

/// Receive-side intermediates of the far-field bistatic model.
pub fn rx_closed(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<RxParams> {
    let (gt, gr) = sin_phi_derivatives(geom, tgt)?;
    let n = geom.num_rx() as f64;
    let lam = carrier.wavelength();
    let base = PI * PI * geom.rx_spacing().powi(2) / (3.0 * lam * lam) * n * (n * n - 1.0);
    Ok(RxParams {
        i: base * gt * gt,
        s: base * gr * gr,
        k: base * gt * gr,
        f: Complex64::new(0.0, 0.0),
        h: Complex64::new(0.0, 0.0),
    })
}

fn mono_terms(ip: &IntermediateParams, m: f64) -> (f64, f64, f64) {
    let fa = m * ip.a - ip.c.norm_sqr();
    let fp = m * ip.p - ip.q.norm_sqr();
    let x = m * ip.e - (ip.c.conj() * ip.q).re;
    (fa, fp, x)
}

fn mono_bound(ip: &IntermediateParams, num_tx: usize, cfg: &NoiseAndPowerConfig, mode: Mode, method: Method) -> CrbResult {
    if num_tx == 1 {
        return CrbResult::unidentifiable(method);
    }
    let m = num_tx as f64;
    let (fa, fp, x) = mono_terms(ip, m);
    let det = fa * fp - x * x;
    if !(fa > 0.0 && fp > 0.0) || det <= crate::fim::IDENTIFIABILITY_TOL * fa * fp {
        return CrbResult::unidentifiable(method);
    }
    let pre = cfg.crb_prefactor();
    match mode {
        Mode::Mimo => CrbResult::new(pre * m * fp / (2.0 * det), pre * m * fa / (2.0 * det), method),
        Mode::Phased => CrbResult::new(pre * fp / det, pre * fa / det, method),
    }
}

fn bistatic_mimo_bound(ip: &IntermediateParams, rx: &RxParams, num_tx: usize, num_rx: usize, cfg: &NoiseAndPowerConfig, method: Method) -> CrbResult {
    if num_tx == 1 {
        return CrbResult::unidentifiable(method);
    }
    let m = num_tx as f64;
    let n = num_rx as f64;
    let big_a = m * rx.i + n * ip.a - n / m * ip.c.norm_sqr();
    let big_b = m * rx.s + n * ip.p - n / m * ip.q.norm_sqr();
    let big_c = m * rx.k + n * ip.e - n / m * (ip.c.conj() * ip.q).re;
    let det = big_a * big_b - big_c * big_c;
    if !(big_a > 0.0 && big_b > 0.0) || det <= crate::fim::IDENTIFIABILITY_TOL * big_a * big_b {
        return CrbResult::unidentifiable(method);
    }
    let pre = cfg.crb_prefactor();
    CrbResult::new(pre * m * big_b / det, pre * m * big_a / det, method)
}

fn bistatic_phased_q(rx: &RxParams, num_rx: usize, cfg: &NoiseAndPowerConfig, num_tx: usize, method: Method) -> CrbResult {
    let n = num_rx as f64;
    let q11 = rx.i - rx.f.norm_sqr() / n;
    let q22 = rx.s - rx.h.norm_sqr() / n;
    let q12 = rx.k - (rx.f * rx.h.conj()).re / n;
    match inverse_diag_2x2(q11, q12, q22, q11 * q22) {
        Some((t, r)) => {
            let pre = cfg.crb_prefactor() / num_tx as f64;
            CrbResult::new(pre * t, pre * r, method)
        }
        None => CrbResult::unidentifiable(method),
    }
}

/// Applies the mode/topology algebra to a set of intermediates.
pub fn crb_from_intermediates(
    ip: &IntermediateParams,
    geom: &ArrayGeometry,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
    topology: Topology,
    method: Method,
) -> Result<CrbResult> {
    match topology {
        Topology::Monostatic => Ok(mono_bound(ip, geom.num_tx(), cfg, mode, method)),
        Topology::BistaticNearFarTx => {
            let rx = ip.rx.as_ref().ok_or_else(|| {
                Error::Config("bistatic bound requested without receive-side intermediates".into())
            })?;
            Ok(match mode {
                Mode::Mimo => bistatic_mimo_bound(ip, rx, geom.num_tx(), geom.num_rx(), cfg, method),
                Mode::Phased => bistatic_phased_q(rx, geom.num_rx(), cfg, geom.num_tx(), method),
            })
        }
    }
}

fn closed(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
    topology: Topology,
) -> Result<CrbResult> {
    check_topology(geom, topology)?;
    let ip = intermediates_closed(geom, tgt, carrier)?;
    let res = crb_from_intermediates(&ip, geom, cfg, mode, topology, Method::ClosedForm)?;
    Ok(res.with_warnings(model_warnings(geom, tgt)))
}

/// Monostatic MIMO bounds.
pub fn crb_mono_mimo(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier, cfg: &NoiseAndPowerConfig) -> Result<CrbResult> {
    closed(geom, tgt, carrier, cfg, Mode::Mimo, Topology::Monostatic)
}

/// Monostatic phased-array bounds; `2/M` times the MIMO ones.
pub fn crb_mono_phased(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier, cfg: &NoiseAndPowerConfig) -> Result<CrbResult> {
    closed(geom, tgt, carrier, cfg, Mode::Phased, Topology::Monostatic)
}

/// Bistatic MIMO bounds (near-field transmit, far-field receive).
pub fn crb_bistatic_mimo(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier, cfg: &NoiseAndPowerConfig) -> Result<CrbResult> {
    closed(geom, tgt, carrier, cfg, Mode::Mimo, Topology::BistaticNearFarTx)
}

/// Bistatic phased array with a far-field receiver: only the receive-side
/// angle is observable, so neither `θ` nor `r` can be estimated.
pub fn crb_bistatic_phased(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier, cfg: &NoiseAndPowerConfig) -> Result<CrbResult> {
    check_topology(geom, Topology::BistaticNearFarTx)?;
    let _ = cfg;
    rx_closed(geom, tgt, carrier)?;
    Ok(CrbResult::unidentifiable(Method::ClosedForm).with_warnings(model_warnings(geom, tgt)))
}

/// Dispatches to the closed form for a mode/topology pair.
pub fn crb_closed_form(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
    topology: Topology,
) -> Result<CrbResult> {
    match (mode, topology) {
        (Mode::Phased, Topology::BistaticNearFarTx) => crb_bistatic_phased(geom, tgt, carrier, cfg),
        _ => closed(geom, tgt, carrier, cfg, mode, topology),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fim::{crb_from_fim, fim_numeric, intermediates_exact_sum};
    use crate::steering::build_observation;
    use std::f64::consts::{FRAC_PI_6, FRAC_PI_8};

    fn carrier() -> Carrier {
        Carrier::from_frequency(2.37e9).unwrap()
    }

    fn cfg() -> NoiseAndPowerConfig {
        NoiseAndPowerConfig::from_snr(1.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn broadside_intermediates() {
        let g = ArrayGeometry::monostatic(257, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.0).unwrap();
        let c = carrier();
        let ip = intermediates_closed(&g, &t, &c).unwrap();
        assert_eq!(ip.c.im, 0.0);
        let lam = c.wavelength();
        let eps = 0.0628 / 10.0;
        let want = 4.0 * PI * PI / (lam * lam * eps) * 2.0 * (g.tx_aperture() / 20.0).atan();
        assert!(rel(ip.p, want) < 1e-13);
    }

    #[test]
    fn closed_intermediates_track_sums() {
        let g = ArrayGeometry::monostatic(257, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let c = carrier();
        let cl = intermediates_closed(&g, &t, &c).unwrap();
        let ex = intermediates_exact_sum(&g, &t, &c).unwrap();
        assert!(rel(cl.a, ex.a) < 1e-2);
        assert!(rel(cl.c.im, ex.c.im) < 1e-2);
        assert!(rel(cl.e, ex.e) < 1e-2);
        assert!(rel(cl.p, ex.p) < 1e-2);
        assert!(rel(cl.q.im, ex.q.im) < 1e-2);
    }

    #[test]
    fn endfire_and_large_eps_rejected() {
        let g = ArrayGeometry::monostatic(5, 0.0628).unwrap();
        let c = carrier();
        let t = TargetLocation::new(10.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(matches!(intermediates_closed(&g, &t, &c), Err(Error::SingularGeometry(_))));
        let t = TargetLocation::new(0.05, 0.1).unwrap();
        assert!(matches!(intermediates_closed(&g, &t, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn single_element_unidentifiable() {
        let g = ArrayGeometry::monostatic(1, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.3).unwrap();
        assert!(!crb_mono_mimo(&g, &t, &carrier(), &cfg()).unwrap().identifiable);
        assert!(!crb_mono_phased(&g, &t, &carrier(), &cfg()).unwrap().identifiable);
    }

    #[test]
    fn mono_mimo_matches_oracle_large_array() {
        let g = ArrayGeometry::monostatic(1025, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let cf = crb_mono_mimo(&g, &t, &carrier(), &cfg()).unwrap();
        let o = build_observation(&g, &t, &carrier(), Mode::Mimo, Topology::Monostatic).unwrap();
        let nf = crb_from_fim(&fim_numeric(&o, &cfg()));
        assert!(rel(cf.crb_theta, nf.crb_theta) < 1e-2);
        assert!(rel(cf.crb_range, nf.crb_range) < 1e-2);
    }

    #[test]
    fn mono_phased_matches_oracle() {
        let g = ArrayGeometry::monostatic(513, 0.0628).unwrap();
        let t = TargetLocation::new(12.0, FRAC_PI_8).unwrap();
        let cf = crb_mono_phased(&g, &t, &carrier(), &cfg()).unwrap();
        let o = build_observation(&g, &t, &carrier(), Mode::Phased, Topology::Monostatic).unwrap();
        let nf = crb_from_fim(&fim_numeric(&o, &cfg()));
        assert!(rel(cf.crb_theta, nf.crb_theta) < 1e-2);
        assert!(rel(cf.crb_range, nf.crb_range) < 1e-2);
    }

    #[test]
    fn phased_is_two_over_m_of_mimo() {
        let g = ArrayGeometry::monostatic(301, 0.0628).unwrap();
        let t = TargetLocation::new(7.0, -0.4).unwrap();
        let a = crb_mono_mimo(&g, &t, &carrier(), &cfg()).unwrap();
        let b = crb_mono_phased(&g, &t, &carrier(), &cfg()).unwrap();
        assert!(rel(b.crb_theta / a.crb_theta, 2.0 / 301.0) < 1e-10);
        assert!(rel(b.crb_range / a.crb_range, 2.0 / 301.0) < 1e-10);
    }

    #[test]
    fn bistatic_mimo_matches_oracle() {
        let g = ArrayGeometry::new(1025, 8, 0.0628, 0.0628, 35.0).unwrap();
        let t = TargetLocation::new(18.0, 0.0).unwrap();
        let cf = crb_bistatic_mimo(&g, &t, &carrier(), &cfg()).unwrap();
        let o = build_observation(&g, &t, &carrier(), Mode::Mimo, Topology::BistaticNearFarTx).unwrap();
        let nf = crb_from_fim(&fim_numeric(&o, &cfg()));
        assert!(rel(cf.crb_theta, nf.crb_theta) < 1e-2);
        assert!(rel(cf.crb_range, nf.crb_range) < 1e-2);
    }

    #[test]
    fn bistatic_single_receiver_uses_transmit_terms() {
        let g = ArrayGeometry::new(65, 1, 0.0628, 0.0628, 35.0).unwrap();
        let t = TargetLocation::new(18.0, 0.0).unwrap();
        let ip = intermediates_closed(&g, &t, &carrier()).unwrap();
        assert_eq!(ip.rx.unwrap().i, 0.0);
        let res = crb_bistatic_mimo(&g, &t, &carrier(), &cfg()).unwrap();
        assert!(res.identifiable && res.crb_range.is_finite());
        let m = 65.0;
        assert!(rel(res.crb_theta, 0.5 * m / ip.a) < 1e-12);
    }

    #[test]
    fn bistatic_phased_unidentifiable_on_both_paths() {
        let g = ArrayGeometry::new(65, 8, 0.0628, 0.0628, 35.0).unwrap();
        let t = TargetLocation::new(18.0, 0.2).unwrap();
        assert!(!crb_bistatic_phased(&g, &t, &carrier(), &cfg()).unwrap().identifiable);
        let o = build_observation(&g, &t, &carrier(), Mode::Phased, Topology::BistaticNearFarTx).unwrap();
        assert!(!crb_from_fim(&fim_numeric(&o, &cfg())).identifiable);
        let ip = intermediates_closed(&g, &t, &carrier()).unwrap();
        let r = crb_from_intermediates(&ip, &g, &cfg(), Mode::Phased, Topology::BistaticNearFarTx, Method::ClosedForm).unwrap();
        assert!(!r.identifiable);
    }
}
