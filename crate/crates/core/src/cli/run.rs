use super::config::{EstimatorKind, ExperimentConfig, GridKind, MonteCarloConfig, PowerSpec, SweepAxis};
use super::csv::{ResultRow, RmseColumns};
use crate::closedform::{crb_asymptotic, crb_closed_form, crb_farfield_upw, crb_taylor};
use crate::error::{Error, Result};
use crate::estimator::{monte_carlo_rmse, Estimator, GridSpec};
use crate::fim::{crb_exact_sum, crb_from_fim, fim_numeric, CrbResult, Method, NoiseAndPowerConfig};
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{SensingScenario, Topology};
use crate::steering::build_observation;
use crate::warning::Warning;
use num_complex::Complex64;
use rayon::prelude::*;

/// One evaluated sweep point, before it is split into rows.
#[derive(Debug, Clone)]
struct Point {
    geometry: ArrayGeometry,
    target: TargetLocation,
    power: NoiseAndPowerConfig,
    rounding: Option<Warning>,
}

/// Resolved parameters of every sweep point, in sweep order.
fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<Point>> {
    cfg.sweep
        .values
        .points()
        .into_iter()
        .map(|v| {
            let at = |what: &str, e: Error| Error::Config(format!("sweep {} = {v}: {what}: {e}", cfg.sweep.axis.as_str()));
            let mut num_tx = cfg.num_tx;
            let mut theta_deg = cfg.theta_deg;
            let mut range = cfg.range_m;
            let mut power = cfg.power;
            match cfg.sweep.axis {
                SweepAxis::NumTx => {
                    if v.fract() != 0.0 || v < 1.0 {
                        return Err(Error::Config(format!("sweep M = {v}: element counts must be positive integers")));
                    }
                    num_tx = v as usize;
                }
                SweepAxis::ThetaDeg => theta_deg = v,
                SweepAxis::RangeM => range = v,
                SweepAxis::SnrDb => {
                    if let PowerSpec::Normalized { time_bandwidth, .. } = power {
                        power = PowerSpec::Normalized { snr_db: v, time_bandwidth };
                    }
                }
            }
            let rounding = num_tx.is_multiple_of(2).then(|| Warning::EvenCountRounded { requested: num_tx, used: num_tx + 1 });
            if rounding.is_some() {
                num_tx += 1;
            }
            if theta_deg.abs() >= 90.0 {
                return Err(Error::Config(format!("sweep point theta_deg = {theta_deg}: must lie in (-90, 90)")));
            }
            let geometry = match cfg.topology {
                Topology::Monostatic => ArrayGeometry::monostatic(num_tx, cfg.tx_spacing_m),
                Topology::BistaticNearFarTx => ArrayGeometry::new(
                    num_tx,
                    cfg.num_rx.unwrap_or(1),
                    cfg.tx_spacing_m,
                    cfg.rx_spacing_m.unwrap_or(cfg.tx_spacing_m),
                    cfg.separation_m.unwrap_or(0.0),
                ),
            }
            .map_err(|e| at("geometry", e))?;
            let target = TargetLocation::new(range, theta_deg.to_radians()).map_err(|e| at("target", e))?;
            target.check_eps_tx(&geometry).map_err(|e| at("target", e))?;
            let power = match power {
                PowerSpec::Normalized { snr_db, time_bandwidth } => NoiseAndPowerConfig::from_snr_db(snr_db, time_bandwidth),
                PowerSpec::Raw { total_power_w, kappa_re, kappa_im, noise_psd, bandwidth_hz, cpi_s } => {
                    NoiseAndPowerConfig::from_raw(total_power_w, Complex64::new(kappa_re, kappa_im), noise_psd, bandwidth_hz, cpi_s)
                }
            }
            .map_err(|e| at("power", e))?;
            Ok(Point { geometry, target, power, rounding })
        })
        .collect()
}

/// Evaluates one method at one point.
pub fn evaluate_method(
    method: Method,
    sc: &SensingScenario,
    cfg: &NoiseAndPowerConfig,
    regime: crate::closedform::Regime,
) -> Result<CrbResult> {
    let (g, t, c) = (&sc.geometry, &sc.target, &sc.carrier);
    match method {
        Method::ClosedForm => crb_closed_form(g, t, c, cfg, sc.mode, sc.topology),
        Method::ExactSumQ => crb_exact_sum(g, t, c, cfg, sc.mode, sc.topology),
        Method::NumericalFim => {
            let obs = build_observation(g, t, c, sc.mode, sc.topology)?;
            Ok(crb_from_fim(&fim_numeric(&obs, cfg)).with_warnings(sc.warnings()))
        }
        Method::Asymptotic => crb_asymptotic(g, t, c, cfg, regime, sc.mode, sc.topology),
        Method::Taylor => crb_taylor(g, t, c, cfg, sc.mode),
        Method::FarFieldUpw => crb_farfield_upw(g, t, c, cfg, sc.mode, sc.topology),
    }
}

fn grid_for(mc: &MonteCarloConfig, sc: &SensingScenario, crb: &CrbResult) -> Result<GridSpec> {
    let t = &sc.target;
    match mc.grid {
        GridKind::Window => {
            let ht = mc.theta_halfwidth_deg.to_radians();
            let hr = mc.range_halfwidth_frac * t.range();
            GridSpec::new(
                (t.angle() - ht, t.angle() + ht),
                mc.theta_points,
                (t.range() - hr, t.range() + hr),
                mc.range_points,
                mc.refine_levels,
            )
        }
        GridKind::BoundScaled => {
            let hi = match sc.topology {
                Topology::Monostatic => f64::INFINITY,
                Topology::BistaticNearFarTx => sc.geometry.separation(),
            };
            GridSpec::around_bound(t, crb, mc.width_sd, mc.points, mc.refine_levels, (sc.geometry.tx_spacing(), hi))
        }
    }
}

fn run_monte_carlo(mc: &MonteCarloConfig, sc: &SensingScenario, cfg: &NoiseAndPowerConfig, seed: u64) -> Result<RmseColumns> {
    let crb = crb_closed_form(&sc.geometry, &sc.target, &sc.carrier, cfg, sc.mode, sc.topology)?;
    if !crb.identifiable {
        return Ok(RmseColumns { rmse_theta: f64::NAN, rmse_range: f64::NAN, trials: 0 });
    }
    let grid = grid_for(mc, sc, &crb)?;
    let est = match mc.estimator {
        EstimatorKind::MatchedFieldMl => Estimator::MatchedFieldMl,
        EstimatorKind::Capon => Estimator::Capon { snapshots: mc.capon_snapshots, loading: mc.capon_loading },
    };
    let rep = monte_carlo_rmse(sc, cfg, est, &grid, mc.trials, seed)?;
    Ok(RmseColumns { rmse_theta: rep.rmse_theta, rmse_range: rep.rmse_range, trials: rep.trials })
}

/// Rows in sweep order: for each point, each mode, each method.
///
/// Monte-Carlo point `i` draws from master seed `seed + i`; the RMSE
/// columns repeat on every method row of the same point and mode.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let carrier = Carrier::from_frequency(cfg.frequency_hz)?;
    let points = sweep_points(cfg)?;
    let per_point: Vec<Result<Vec<ResultRow>>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rows = Vec::new();
            for &mode in &cfg.modes {
                let sc = SensingScenario::new(p.geometry, p.target, carrier, mode, cfg.topology)?;
                let rmse = match &cfg.monte_carlo {
                    Some(mc) => Some(run_monte_carlo(mc, &sc, &p.power, mc.seed.wrapping_add(i as u64))?),
                    None => None,
                };
                for &method in &cfg.methods {
                    let res = evaluate_method(method, &sc, &p.power, cfg.asymptotic_regime)?;
                    let mut warnings: Vec<String> = p.rounding.iter().map(|w| w.tag()).collect();
                    for w in &res.warnings {
                        let tag = w.tag();
                        if !warnings.contains(&tag) {
                            warnings.push(tag);
                        }
                    }
                    rows.push(ResultRow::new(&sc, &p.power, &res, warnings, rmse));
                }
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_point {
        out.extend(r?);
    }
    Ok(out)
}

/// Header comment lines describing units and the sweep.
pub fn header_comments(cfg: &ExperimentConfig, name: Option<&str>, db: bool) -> Vec<String> {
    let mut out = vec![format!("nfcrb {}", env!("CARGO_PKG_VERSION"))];
    if let Some(n) = name {
        out.push(format!("preset: {n}"));
    }
    out.push(if db {
        "units: theta in rad; r in m; crb_*_db = 10*log10(CRB in rad^2 or m^2); mse_*_db = 10*log10(RMSE^2)".into()
    } else {
        "units: theta in rad; r in m; crb_theta in rad^2; crb_r in m^2; rmse_theta in rad; rmse_r in m".into()
    });
    let pts: Vec<String> = cfg.sweep.values.points().iter().map(|v| v.to_string()).collect();
    out.push(format!("sweep: {} = [{}]", cfg.sweep.axis.as_str(), pts.join(" ")));
    if cfg.methods.contains(&Method::Asymptotic) {
        out.push(format!("asymptotic regime: {}", cfg.asymptotic_regime.as_str()));
    }
    if let Some(mc) = &cfg.monte_carlo {
        let grid = match mc.grid {
            GridKind::BoundScaled => format!("bound_scaled +-{} sd, {}x{}", mc.width_sd, mc.points, mc.points),
            GridKind::Window => format!(
                "window +-{} deg x +-{} r, {}x{}",
                mc.theta_halfwidth_deg, mc.range_halfwidth_frac, mc.theta_points, mc.range_points
            ),
        };
        out.push(format!(
            "monte carlo: {} K={} seed={} (point i uses seed+i) grid={} refine={}",
            mc.estimator.as_str(),
            mc.trials,
            mc.seed,
            grid,
            mc.refine_levels
        ));
    }
    out.extend(cfg.notes.iter().cloned());
    out
}

