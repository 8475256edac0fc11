use crate::error::{Error, Result};
use crate::fim::{CrbResult, Method, NoiseAndPowerConfig};
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{check_topology, model_warnings, Topology};
use std::f64::consts::PI;

const SEARCH_LO: f64 = 1e-3;
const SEARCH_HI: f64 = 100.0;
const SEARCH_TOL: f64 = 1e-6;

/// `h(x) = atan(x)/x − asinh²(x)/x²`, the range-information shape at
/// broadside as a function of `x = D_T / (2r)`.
pub fn range_crb_shape(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        let x4 = x2 * x2;
        x4 * (1.0 / 45.0 + x2 * (-1.0 / 35.0 + x2 * (47.0 / 1575.0 - x2 * 61.0 / 2079.0)))
    } else {
        let a = x.asinh() / x;
        x.atan() / x - a * a
    }
}

/// Broadside bistatic MIMO range bound as a function of `x = D_T / (2r)`.
pub fn range_crb_vs_ratio(x: f64, num_rx: usize, carrier: &Carrier, cfg: &NoiseAndPowerConfig) -> f64 {
    let lam = carrier.wavelength();
    cfg.crb_prefactor() * lam * lam / (4.0 * PI * PI * num_rx as f64 * range_crb_shape(x))
}

fn check_broadside(geom: &ArrayGeometry, tgt: &TargetLocation) -> Result<()> {
    check_topology(geom, Topology::BistaticNearFarTx)?;
    if tgt.angle() != 0.0 {
        return Err(Error::Domain(format!(
            "broadside bistatic expressions need θ = 0, got {}",
            tgt.angle()
        )));
    }
    Ok(())
}

/// Bistatic MIMO bounds specialised to `θ = 0`.
pub fn crb_bistatic_broadside(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
) -> Result<CrbResult> {
    check_broadside(geom, tgt)?;
    let eps = tgt.check_eps_tx(geom)?;
    if geom.num_tx() == 1 {
        return Ok(CrbResult::unidentifiable(Method::ClosedForm));
    }
    let lam2 = carrier.wavelength().powi(2);
    let m = geom.num_tx() as f64;
    let n = geom.num_rx() as f64;
    let r = tgt.range();
    let big_r = geom.separation();
    let dr = geom.tx_aperture() / r;
    let i = PI * PI * geom.rx_spacing().powi(2) * r * r * n * (n * n - 1.0)
        / (3.0 * lam2 * (big_r - r).powi(2));
    let a = 4.0 * PI * PI * r * r / (lam2 * eps) * (dr - 2.0 * (dr / 2.0).atan());
    let t = cfg.crb_prefactor() * m / (m * i + n * a);
    let rr = range_crb_vs_ratio(dr / 2.0, geom.num_rx(), carrier, cfg);
    Ok(CrbResult::new(t, rr, Method::ClosedForm).with_warnings(model_warnings(geom, tgt)))
}

/// Minimises the broadside range bound over `x = D_T/(2r)` by golden-section
/// search on `[1e-3, 100]`. Returns `(x*, CRB_r(x*))`.
pub fn bistatic_range_crb_minimizer(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    cfg: &NoiseAndPowerConfig,
) -> Result<(f64, f64)> {
    check_broadside(geom, tgt)?;
    let x = golden_section_max(range_crb_shape, SEARCH_LO, SEARCH_HI, SEARCH_TOL);
    Ok((x, range_crb_vs_ratio(x, geom.num_rx(), carrier, cfg)))
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::crb_bistatic_mimo;

    fn carrier() -> Carrier {
        Carrier::from_frequency(2.37e9).unwrap()
    }

    #[test]
    fn shape_matches_high_precision_values() {
        // 40-digit evaluations of atan(x)/x - asinh(x)^2/x^2
        let refs = [
            (0.005, 1.388844247197392e-11),
            (0.009, 1.457_848_172_558_951e-10),
            (0.02, 3.5537277477631554e-9),
            (0.5, 0.0010359356928346624),
            (6.0, 0.061_803_307_284_292_21),
        ];
        for (x, want) in refs {
            let got = range_crb_shape(x);
            assert!(((got - want) / want).abs() < 1e-7, "{x}");
        }
        assert!((range_crb_shape(0.0099999) / range_crb_shape(0.0100001) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn matches_general_form_at_broadside() {
        let cfg = NoiseAndPowerConfig::from_snr(1.0, 1.0).unwrap();
        for m in [65usize, 257, 1025] {
            let g = ArrayGeometry::new(m, 8, 0.0628, 0.0628, 35.0).unwrap();
            let t = TargetLocation::new(18.0, 0.0).unwrap();
            let a = crb_bistatic_broadside(&g, &t, &carrier(), &cfg).unwrap();
            let b = crb_bistatic_mimo(&g, &t, &carrier(), &cfg).unwrap();
            assert!(((a.crb_theta - b.crb_theta) / b.crb_theta).abs() < 1e-10);
            assert!(((a.crb_range - b.crb_range) / b.crb_range).abs() < 1e-9, "{m}");
        }
    }

    #[test]
    fn range_bound_dips_then_rises() {
        let cfg = NoiseAndPowerConfig::from_snr(1.0, 1.0).unwrap();
        let c = carrier();
        let at = |x| range_crb_vs_ratio(x, 8, &c, &cfg);
        assert!(at(6.0) < at(1.0));
        assert!(at(6.0) < at(60.0));
    }

    #[test]
    fn minimizer_is_independent_of_receivers_and_snr() {
        let t = TargetLocation::new(18.0, 0.0).unwrap();
        let mut xs = Vec::new();
        for (n, snr) in [(1usize, 1.0), (8, 1.0), (64, 10.0)] {
            let g = ArrayGeometry::new(65, n, 0.0628, 0.0628, 35.0).unwrap();
            let cfg = NoiseAndPowerConfig::from_snr(snr, 1.0).unwrap();
            xs.push(bistatic_range_crb_minimizer(&g, &t, &carrier(), &cfg).unwrap().0);
        }
        assert!(xs.iter().all(|x| (x - xs[0]).abs() < 1e-9));
        let g = ArrayGeometry::new(65, 8, 0.0628, 0.0628, 35.0).unwrap();
        let off = TargetLocation::new(18.0, 0.1).unwrap();
        assert!(bistatic_range_crb_minimizer(&g, &off, &carrier(), &NoiseAndPowerConfig::from_snr(1.0, 1.0).unwrap()).is_err());
    }
}
