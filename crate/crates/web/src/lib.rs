//! Browser bindings for the `nfcrb` demo page.
//!
//! Every export returns a flat `Float64Array` of rows; the row stride is
//! given in each doc comment. The plain-Rust functions in [`curves`] carry
//! the logic and are what the native tests exercise.

// comparisons are written `!(a < b)` so that NaN falls on the error side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

pub mod curves {
    use nfcrb::closedform::{bistatic_range_crb_minimizer, crb_closed_form, crb_farfield_upw, range_crb_vs_ratio};
    use nfcrb::fim::{crb_from_fim, fim_numeric};
    use nfcrb::steering::build_observation;
    use nfcrb::{ArrayGeometry, Carrier, Mode, NoiseAndPowerConfig, TargetLocation, Topology};

    pub const SPACING: f64 = 0.0628;
    pub const FREQUENCY: f64 = 2.37e9;
    /// Largest `M` for which the brute-force FIM column is filled in.
    pub const NUMERIC_LIMIT: usize = 257;

    type Out = Result<Vec<f64>, String>;

    fn mode(name: &str) -> Result<Mode, String> {
        match name {
            "mimo" => Ok(Mode::Mimo),
            "phased" => Ok(Mode::Phased),
            other => Err(format!("unknown mode '{other}'")),
        }
    }

    fn carrier() -> Carrier {
        Carrier::from_frequency(FREQUENCY).expect("valid carrier")
    }

    fn err(e: nfcrb::Error) -> String {
        e.to_string()
    }

    /// Stride 5: `M, CRB_θ, CRB_r, CRB_θ (FIM), CRB_r (FIM)` for
    /// `M = 2^k + 1 ≤ m_max`; the FIM columns are NaN above
    /// [`NUMERIC_LIMIT`].
    pub fn crb_vs_m(mode_name: &str, range_m: f64, theta_deg: f64, snr_db: f64, m_max: usize) -> Out {
        let mode = mode(mode_name)?;
        let c = carrier();
        let cfg = NoiseAndPowerConfig::from_snr_db(snr_db, 1.0).map_err(err)?;
        let t = TargetLocation::new(range_m, theta_deg.to_radians()).map_err(err)?;
        let mut out = Vec::new();
        let mut m = 3;
        while m <= m_max {
            let g = ArrayGeometry::monostatic(m, SPACING).map_err(err)?;
            let cf = crb_closed_form(&g, &t, &c, &cfg, mode, Topology::Monostatic).map_err(err)?;
            let (nt, nr) = if m <= NUMERIC_LIMIT {
                let obs = build_observation(&g, &t, &c, mode, Topology::Monostatic).map_err(err)?;
                let n = crb_from_fim(&fim_numeric(&obs, &cfg));
                (n.crb_theta, n.crb_range)
            } else {
                (f64::NAN, f64::NAN)
            };
            out.extend([m as f64, cf.crb_theta, cf.crb_range, nt, nr]);
            m = 2 * m - 1;
        }
        Ok(out)
    }

    /// Stride 4: `θ (deg), CRB_θ, CRB_r, CRB_θ (plane wave)` for θ from
    /// −80° to 80°.
    pub fn crb_vs_theta(mode_name: &str, num_tx: usize, range_m: f64, snr_db: f64, step_deg: f64) -> Out {
        let mode = mode(mode_name)?;
        if !(step_deg > 0.0) {
            return Err("step must be positive".into());
        }
        let c = carrier();
        let cfg = NoiseAndPowerConfig::from_snr_db(snr_db, 1.0).map_err(err)?;
        let g = ArrayGeometry::monostatic(num_tx | 1, SPACING).map_err(err)?;
        let mut out = Vec::new();
        let count = (160.0 / step_deg).floor() as usize;
        for i in 0..=count {
            let deg = -80.0 + i as f64 * step_deg;
            let t = TargetLocation::new(range_m, deg.to_radians()).map_err(err)?;
            let cf = crb_closed_form(&g, &t, &c, &cfg, mode, Topology::Monostatic).map_err(err)?;
            let upw = crb_farfield_upw(&g, &t, &c, &cfg, mode, Topology::Monostatic).map_err(err)?;
            out.extend([deg, cf.crb_theta, cf.crb_range, upw.crb_theta]);
        }
        Ok(out)
    }

    /// Stride 3 after a 2-value head `x*, CRB_r(x*)`: rows
    /// `x = D_T/(2r), M, CRB_r` for a broadside target, `x` log-spaced.
    pub fn bistatic_range_curve(num_rx: usize, range_m: f64, separation_m: f64, snr_db: f64) -> Out {
        let c = carrier();
        let cfg = NoiseAndPowerConfig::from_snr_db(snr_db, 1.0).map_err(err)?;
        let t = TargetLocation::new(range_m, 0.0).map_err(err)?;
        let g = ArrayGeometry::new(3, num_rx, SPACING, SPACING, separation_m).map_err(err)?;
        let (x_star, best) = bistatic_range_crb_minimizer(&g, &t, &c, &cfg).map_err(err)?;
        let mut out = vec![x_star, best];
        for i in 0..=120 {
            let x = 0.05 * 10f64.powf(i as f64 * 3.0 / 120.0);
            let m = 2.0 * x * range_m / SPACING;
            out.extend([x, m, range_crb_vs_ratio(x, num_rx, &c, &cfg)]);
        }
        Ok(out)
    }
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// CRB versus transmit element count for a monostatic array.
#[wasm_bindgen(js_name = crbVsM)]
pub fn crb_vs_m(mode: &str, range_m: f64, theta_deg: f64, snr_db: f64, m_max: usize) -> Result<Vec<f64>, JsError> {
    js(curves::crb_vs_m(mode, range_m, theta_deg, snr_db, m_max))
}

/// CRB versus target angle, with the plane-wave angle bound alongside.
#[wasm_bindgen(js_name = crbVsTheta)]
pub fn crb_vs_theta(mode: &str, num_tx: usize, range_m: f64, snr_db: f64, step_deg: f64) -> Result<Vec<f64>, JsError> {
    js(curves::crb_vs_theta(mode, num_tx, range_m, snr_db, step_deg))
}

/// Broadside bistatic range bound versus aperture, with its minimiser.
#[wasm_bindgen(js_name = bistaticRangeCurve)]
pub fn bistatic_range_curve(num_rx: usize, range_m: f64, separation_m: f64, snr_db: f64) -> Result<Vec<f64>, JsError> {
    js(curves::bistatic_range_curve(num_rx, range_m, separation_m, snr_db))
}
