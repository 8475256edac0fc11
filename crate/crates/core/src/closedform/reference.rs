use crate::error::{Error, Result};
use crate::fim::{CrbResult, Method, NoiseAndPowerConfig};
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{check_topology, Mode, Topology};
use std::f64::consts::PI;

/// Bounds of the monostatic model with second-order (Fresnel) phases.
pub fn crb_taylor(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
) -> Result<CrbResult> {
    check_topology(geom, Topology::Monostatic)?;
    let co = tgt.check_not_endfire()?;
    if geom.num_tx() < 3 {
        return Ok(CrbResult::unidentifiable(Method::Taylor));
    }
    let pre = cfg.crb_prefactor();
    let lam2 = carrier.wavelength().powi(2);
    let m = geom.num_tx() as f64;
    let d = geom.tx_spacing();
    let r = tgt.range();
    let s = tgt.angle().sin();
    let m21 = m * m - 1.0;
    let m24 = m * m - 4.0;
    let range_num = r * r * (15.0 * r * r + (d * s).powi(2) * m24);
    let range_den = (PI * d * d * co * co).powi(2) * m21 * m24;
    let (t, rr) = match mode {
        Mode::Mimo => (
            pre * 3.0 * lam2 / (2.0 * PI * PI * d * d * m * m21 * co * co),
            pre * 6.0 * lam2 * range_num / (range_den * m),
        ),
        Mode::Phased => (
            pre * 3.0 * lam2 / (PI * PI * d * d * m * m * m21 * co * co),
            pre * 12.0 * lam2 * range_num / (range_den * m * m),
        ),
    };
    Ok(CrbResult::new(t, rr, Method::Taylor))
}

/// Plane-wave angle bound; the range bound is infinite.
///
/// Available for monostatic MIMO, monostatic phased and bistatic MIMO.
pub fn crb_farfield_upw(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
    mode: Mode,
    topology: Topology,
) -> Result<CrbResult> {
    check_topology(geom, topology)?;
    let co = tgt.check_not_endfire()?;
    let pre = cfg.crb_prefactor();
    let lam2 = carrier.wavelength().powi(2);
    let m = geom.num_tx() as f64;
    let dt2 = geom.tx_spacing().powi(2);
    let c2 = co * co;
    let t = match (mode, topology) {
        (Mode::Mimo, Topology::Monostatic) => {
            pre * 3.0 * lam2 / (2.0 * PI * PI * dt2 * m * (m * m - 1.0) * c2)
        }
        (Mode::Phased, Topology::Monostatic) => {
            pre * 3.0 * lam2 / (PI * PI * dt2 * m * m * (m * m - 1.0) * c2)
        }
        (Mode::Mimo, Topology::BistaticNearFarTx) => {
            let n = geom.num_rx() as f64;
            let dr2 = geom.rx_spacing().powi(2);
            pre * 3.0 * lam2 / (PI * PI * n * (dr2 * (n * n - 1.0) + dt2 * (m * m - 1.0)) * c2)
        }
        (Mode::Phased, Topology::BistaticNearFarTx) => {
            return Err(Error::Domain(
                "no plane-wave reference for the bistatic phased configuration".into(),
            ))
        }
    };
    if !t.is_finite() {
        return Ok(CrbResult::unidentifiable(Method::FarFieldUpw));
    }
    Ok(CrbResult::angle_only(t, Method::FarFieldUpw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_6;

    fn carrier() -> Carrier {
        Carrier::from_frequency(2.37e9).unwrap()
    }

    fn cfg() -> NoiseAndPowerConfig {
        NoiseAndPowerConfig::from_snr(1.0, 1.0).unwrap()
    }

    #[test]
    fn taylor_angle_equals_upw() {
        for m in [3usize, 9, 65, 1025] {
            for th in [-1.0, 0.0, 0.3, 1.2] {
                let g = ArrayGeometry::monostatic(m, 0.0628).unwrap();
                let t = TargetLocation::new(10.0, th).unwrap();
                let a = crb_taylor(&g, &t, &carrier(), &cfg(), Mode::Mimo).unwrap();
                let b = crb_farfield_upw(&g, &t, &carrier(), &cfg(), Mode::Mimo, Topology::Monostatic).unwrap();
                assert!(((a.crb_theta - b.crb_theta) / b.crb_theta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn taylor_smallest_array() {
        let g = ArrayGeometry::monostatic(3, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.2).unwrap();
        let r = crb_taylor(&g, &t, &carrier(), &cfg(), Mode::Mimo).unwrap();
        assert!(r.identifiable && r.crb_range.is_finite());
        let g = ArrayGeometry::monostatic(1, 0.0628).unwrap();
        assert!(!crb_taylor(&g, &t, &carrier(), &cfg(), Mode::Mimo).unwrap().identifiable);
    }

    #[test]
    fn upw_monostatic_mimo_value() {
        let g = ArrayGeometry::monostatic(1025, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let c = carrier();
        let r = crb_farfield_upw(&g, &t, &c, &cfg(), Mode::Mimo, Topology::Monostatic).unwrap();
        let m = 1025.0f64;
        let lam = c.wavelength();
        let want = 3.0 * lam * lam
            / (2.0 * 2.0 * PI * PI * 0.0628f64.powi(2) * m * (m * m - 1.0) * FRAC_PI_6.cos().powi(2));
        assert!(((r.crb_theta - want) / want).abs() < 1e-14);
        assert!(r.crb_range.is_infinite());
    }

    #[test]
    fn taylor_phased_ratio() {
        let g = ArrayGeometry::monostatic(129, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.5).unwrap();
        let a = crb_taylor(&g, &t, &carrier(), &cfg(), Mode::Mimo).unwrap();
        let b = crb_taylor(&g, &t, &carrier(), &cfg(), Mode::Phased).unwrap();
        assert!((b.crb_range / a.crb_range * 129.0 / 2.0 - 1.0).abs() < 1e-12);
    }
}
