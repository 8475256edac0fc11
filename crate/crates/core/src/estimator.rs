//! Grid-search estimators and Monte-Carlo RMSE against the bounds.

use crate::closedform::crb_closed_form;
use crate::error::{Error, Result};
use crate::fim::{CrbResult, NoiseAndPowerConfig};
use crate::geometry::{ArrayGeometry, Carrier, TargetLocation};
use crate::scenario::{check_topology, Mode, SensingScenario, Topology};
use crate::signalsim::{synth_with, trial_rng, Snapshot};
use crate::steering::{rx_far_values, tx_values};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Rectangular `(θ, r)` search grid with local refinement.
///
/// Each refinement level re-centres a 5×5 grid on the current best point,
/// spanning one previous step either side, so the step halves per level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub theta_range: (f64, f64),
    pub theta_points: usize,
    pub range_range: (f64, f64),
    pub range_points: usize,
    pub refine_levels: usize,
}

impl GridSpec {
    pub fn new(
        theta_range: (f64, f64),
        theta_points: usize,
        range_range: (f64, f64),
        range_points: usize,
        refine_levels: usize,
    ) -> Result<Self> {
        if !(theta_range.0 < theta_range.1) || !(range_range.0 < range_range.1) {
            return Err(Error::Config("grid bounds must be increasing".into()));
        }
        if theta_points < 2 || range_points < 2 {
            return Err(Error::Config("grid needs at least 2 points per axis".into()));
        }
        if range_range.0 <= 0.0 {
            return Err(Error::Config("grid ranges must be positive".into()));
        }
        Ok(Self { theta_range, theta_points, range_range, range_points, refine_levels })
    }

    /// `[θ ± 5°] × [r ± 20%]`, 181×121 points, 3 refinement levels.
    pub fn default_around(truth: &TargetLocation) -> Result<Self> {
        let dt = 5f64.to_radians();
        let (t, r) = (truth.angle(), truth.range());
        Self::new((t - dt, t + dt), 181, (0.8 * r, 1.2 * r), 121, 3)
    }

    /// Grid spanning `±width` standard deviations of a bound around the
    /// truth, clipped to `range_limits`.
    pub fn around_bound(
        truth: &TargetLocation,
        crb: &CrbResult,
        width: f64,
        points: usize,
        refine_levels: usize,
        range_limits: (f64, f64),
    ) -> Result<Self> {
        if !(crb.crb_theta.is_finite() && crb.crb_range.is_finite()) {
            return Err(Error::Config("bound-scaled grid needs finite bounds".into()));
        }
        let ht = width * crb.crb_theta.sqrt();
        let hr = width * crb.crb_range.sqrt();
        let (t, r) = (truth.angle(), truth.range());
        let lo = (r - hr).max(range_limits.0);
        let hi = (r + hr).min(range_limits.1);
        Self::new((t - ht, t + ht), points, (lo, hi), points, refine_levels)
    }

    pub fn theta_step(&self) -> f64 {
        (self.theta_range.1 - self.theta_range.0) / (self.theta_points - 1) as f64
    }

    pub fn range_step(&self) -> f64 {
        (self.range_range.1 - self.range_range.0) / (self.range_points - 1) as f64
    }

    pub fn theta_at(&self, i: usize) -> f64 {
        self.theta_range.0 + i as f64 * self.theta_step()
    }

    pub fn range_at(&self, j: usize) -> f64 {
        self.range_range.0 + j as f64 * self.range_step()
    }

    /// Whether `(θ, r)` lies strictly inside the grid.
    pub fn contains_strictly(&self, tgt: &TargetLocation) -> bool {
        let (t, r) = (tgt.angle(), tgt.range());
        t > self.theta_range.0 && t < self.theta_range.1 && r > self.range_range.0 && r < self.range_range.1
    }
}

/// Evaluates `g(θ', r')` and the matched-field statistic for one
/// mode/topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationModel {
    pub geometry: ArrayGeometry,
    pub carrier: Carrier,
    pub mode: Mode,
    pub topology: Topology,
}

impl ObservationModel {
    pub fn new(geometry: ArrayGeometry, carrier: Carrier, mode: Mode, topology: Topology) -> Result<Self> {
        check_topology(&geometry, topology)?;
        Ok(Self { geometry, carrier, mode, topology })
    }

    pub fn from_scenario(s: &SensingScenario) -> Self {
        Self { geometry: s.geometry, carrier: s.carrier, mode: s.mode, topology: s.topology }
    }

    /// Length of `g`.
    pub fn dim(&self) -> usize {
        let (m, n) = (self.geometry.num_tx(), self.geometry.num_rx());
        match (self.mode, self.topology) {
            (Mode::Mimo, _) => m * n,
            (Mode::Phased, Topology::Monostatic) => m,
            (Mode::Phased, Topology::BistaticNearFarTx) => n,
        }
    }

    // (outer, inner) factors with g = outer ⊗ inner; inner is None for
    // single-factor observations.
    fn factors(&self, tgt: &TargetLocation) -> Result<Factors> {
        let g = &self.geometry;
        let c = &self.carrier;
        Ok(match (self.mode, self.topology) {
            (Mode::Mimo, Topology::Monostatic) => {
                let a = tx_values(g, tgt, c)?;
                (a.clone(), Some(a))
            }
            (Mode::Phased, Topology::Monostatic) => (tx_values(g, tgt, c)?, None),
            (Mode::Mimo, Topology::BistaticNearFarTx) => (rx_far_values(g, tgt, c)?, Some(tx_values(g, tgt, c)?)),
            (Mode::Phased, Topology::BistaticNearFarTx) => (rx_far_values(g, tgt, c)?, None),
        })
    }

    /// `g(θ', r')`.
    pub fn values(&self, tgt: &TargetLocation) -> Result<Vec<Complex64>> {
        let (outer, inner) = self.factors(tgt)?;
        Ok(match inner {
            None => outer,
            Some(inner) => outer.iter().flat_map(|o| inner.iter().map(move |i| o * i)).collect(),
        })
    }

    /// `|gᴴ y|² / ‖g‖²`.
    pub fn statistic(&self, y: &[Complex64], tgt: &TargetLocation) -> Result<f64> {
        Ok(self.statistic_of(y, &self.factors(tgt)?))
    }

    fn statistic_of(&self, y: &[Complex64], (outer, inner): &Factors) -> f64 {
        let z: Complex64 = match inner {
            None => outer.iter().zip(y).map(|(g, y)| g.conj() * y).sum(),
            Some(inner) => {
                let m = inner.len();
                outer
                    .iter()
                    .enumerate()
                    .map(|(n, o)| {
                        let row = &y[n * m..(n + 1) * m];
                        o.conj() * inner.iter().zip(row).map(|(a, y)| a.conj() * y).sum::<Complex64>()
                    })
                    .sum()
            }
        };
        z.norm_sqr() / self.dim() as f64
    }

    // Factors at every coarse grid point, row-major in θ; None when the
    // table would exceed CACHE_BUDGET complex entries.
    fn coarse_factors(&self, grid: &GridSpec) -> Option<Vec<Option<Factors>>> {
        let per_point = self.geometry.num_tx() + self.geometry.num_rx();
        if grid.theta_points * grid.range_points * per_point > CACHE_BUDGET {
            return None;
        }
        let table = (0..grid.theta_points)
            .flat_map(|i| (0..grid.range_points).map(move |j| (i, j)))
            .map(|(i, j)| {
                TargetLocation::new(grid.range_at(j), grid.theta_at(i))
                    .ok()
                    .and_then(|t| self.factors(&t).ok())
            })
            .collect();
        Some(table)
    }
}

/// Result of a grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEstimate {
    pub theta: f64,
    pub range: f64,
    pub value: f64,
    /// A point more than one cell away from the maximiser reaches the
    /// maximum to within 1e-9 relative on the coarse grid.
    pub ambiguous: bool,
}

const TIE_TOL: f64 = 1e-9;
const CACHE_BUDGET: usize = 1 << 23;

type Factors = (Vec<Complex64>, Option<Vec<Complex64>>);
type PointFn<'a> = &'a dyn Fn(usize, usize, &TargetLocation) -> Option<f64>;

// Scans a grid in θ-major, r-minor order; strict improvement keeps the
// smallest (θ, r) among equal values. Points where the model is undefined
// are skipped.
fn scan(grid: &GridSpec, f: PointFn) -> Option<(usize, usize, f64, Vec<f64>)> {
    let mut vals = vec![f64::NEG_INFINITY; grid.theta_points * grid.range_points];
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..grid.theta_points {
        for j in 0..grid.range_points {
            let Ok(t) = TargetLocation::new(grid.range_at(j), grid.theta_at(i)) else { continue };
            let Some(v) = f(i, j, &t) else { continue };
            vals[i * grid.range_points + j] = v;
            if best.is_none_or(|b| v > b.2) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, v)| (i, j, v, vals))
}

fn search(grid: &GridSpec, f: &dyn Fn(&TargetLocation) -> Option<f64>) -> Result<GridEstimate> {
    search_with(grid, &|_, _, t| f(t), f)
}

// `coarse` sees the coarse-grid indices so callers can reuse cached work.
fn search_with(grid: &GridSpec, coarse: PointFn, f: &dyn Fn(&TargetLocation) -> Option<f64>) -> Result<GridEstimate> {
    let (bi, bj, mut best, vals) =
        scan(grid, coarse).ok_or_else(|| Error::Numerical("no grid point admits a valid model".into()))?;
    let mut ambiguous = false;
    for i in 0..grid.theta_points {
        for j in 0..grid.range_points {
            let far = i.abs_diff(bi) > 1 || j.abs_diff(bj) > 1;
            if far && vals[i * grid.range_points + j] >= best * (1.0 - TIE_TOL) {
                ambiguous = true;
            }
        }
    }
    let (mut theta, mut range) = (grid.theta_at(bi), grid.range_at(bj));
    let (mut st, mut sr) = (grid.theta_step(), grid.range_step());
    for _ in 0..grid.refine_levels {
        let local = GridSpec {
            theta_range: (theta - st, theta + st),
            theta_points: 5,
            range_range: (range - sr, range + sr),
            range_points: 5,
            refine_levels: 0,
        };
        if let Some((i, j, v, _)) = scan(&local, &|_, _, t| f(t)) {
            if v > best {
                best = v;
                theta = local.theta_at(i);
                range = local.range_at(j);
            }
        }
        st /= 2.0;
        sr /= 2.0;
    }
    Ok(GridEstimate { theta, range, value: best, ambiguous })
}

/// Single-snapshot matched-field maximum likelihood over the grid.
pub fn matched_field_ml(y: &Snapshot, model: &ObservationModel, grid: &GridSpec) -> Result<GridEstimate> {
    matched_field_ml_raw(&y.y, model, grid)
}

pub(crate) fn matched_field_ml_raw(y: &[Complex64], model: &ObservationModel, grid: &GridSpec) -> Result<GridEstimate> {
    if y.len() != model.dim() {
        return Err(Error::Config(format!("snapshot length {} != model length {}", y.len(), model.dim())));
    }
    search(grid, &|t| model.statistic(y, t).ok())
}

fn matched_field_ml_cached(
    y: &[Complex64],
    model: &ObservationModel,
    grid: &GridSpec,
    cache: &[Option<Factors>],
) -> Result<GridEstimate> {
    search_with(
        grid,
        &|i, j, _| cache[i * grid.range_points + j].as_ref().map(|f| model.statistic_of(y, f)),
        &|t| model.statistic(y, t).ok(),
    )
}

/// Capon spectrum on the coarse grid plus the refined peak.
#[derive(Debug, Clone, PartialEq)]
pub struct CaponResult {
    /// `spectrum[i][j]` at `(theta_at(i), range_at(j))`; `NaN` where the
    /// model is undefined.
    pub spectrum: Vec<Vec<f64>>,
    pub estimate: GridEstimate,
}

/// `P(θ', r') = 1 / (gᴴ R̂⁻¹ g)` with diagonally loaded sample covariance.
pub fn capon_spectrum(
    snapshots: &[Snapshot],
    model: &ObservationModel,
    grid: &GridSpec,
    loading: f64,
) -> Result<CaponResult> {
    let ys: Vec<&[Complex64]> = snapshots.iter().map(|s| s.y.as_slice()).collect();
    capon_raw(&ys, model, grid, loading)
}

pub(crate) fn capon_raw(ys: &[&[Complex64]], model: &ObservationModel, grid: &GridSpec, loading: f64) -> Result<CaponResult> {
    let dim = model.dim();
    if ys.len() < 2 {
        return Err(Error::Config("Capon needs at least 2 snapshots".into()));
    }
    if loading < 0.0 {
        return Err(Error::Config("diagonal loading must be non-negative".into()));
    }
    if ys.iter().any(|y| y.len() != dim) {
        return Err(Error::Config("snapshot length does not match the model".into()));
    }
    if loading == 0.0 && ys.len() < dim {
        return Err(Error::Numerical(format!(
            "sample covariance is rank deficient ({} snapshots < dimension {dim}); increase loading",
            ys.len()
        )));
    }
    let s = ys.len() as f64;
    let mut cov = DMatrix::<Complex64>::zeros(dim, dim);
    for y in ys {
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] += y[i] * y[j].conj() / s;
            }
        }
    }
    let tr: f64 = (0..dim).map(|i| cov[(i, i)].re).sum();
    for i in 0..dim {
        cov[(i, i)] += Complex64::new(loading * tr / dim as f64, 0.0);
    }
    let chol = cov.cholesky().ok_or_else(|| {
        Error::Numerical("covariance is not positive definite; increase loading".into())
    })?;
    let power = |t: &TargetLocation| -> Option<f64> {
        let g = nalgebra::DVector::from_vec(model.values(t).ok()?);
        let x = chol.solve(&g);
        let q = g.dotc(&x).re;
        (q > 0.0).then(|| 1.0 / q)
    };
    let spectrum = (0..grid.theta_points)
        .map(|i| {
            (0..grid.range_points)
                .map(|j| {
                    TargetLocation::new(grid.range_at(j), grid.theta_at(i))
                        .ok()
                        .and_then(|t| power(&t))
                        .unwrap_or(f64::NAN)
                })
                .collect()
        })
        .collect();
    let estimate = search(grid, &power)?;
    Ok(CaponResult { spectrum, estimate })
}

/// Estimator used by [`monte_carlo_rmse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    MatchedFieldMl,
    /// `snapshots` independent noise draws per trial, relative loading.
    Capon { snapshots: usize, loading: f64 },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::MatchedFieldMl => "matched_field_ml",
            Estimator::Capon { .. } => "capon",
        }
    }
}

/// Monte-Carlo RMSE next to the closed-form bound of the same scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    pub rmse_theta: f64,
    pub rmse_range: f64,
    pub trials: usize,
    pub snr_db: f64,
    pub crb_theta: f64,
    pub crb_range: f64,
    pub estimator: Estimator,
    pub master_seed: u64,
    /// Trials whose coarse-grid maximum was ambiguous.
    pub ambiguous_trials: usize,
}

/// Runs `trials` independent estimates; trial `k` draws from stream `k` of
/// `master_seed`, so the report does not depend on scheduling.
pub fn monte_carlo_rmse(
    scenario: &SensingScenario,
    cfg: &NoiseAndPowerConfig,
    estimator: Estimator,
    grid: &GridSpec,
    trials: usize,
    master_seed: u64,
) -> Result<RmseReport> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    if !grid.contains_strictly(&scenario.target) {
        return Err(Error::Config("true parameters must lie strictly inside the grid".into()));
    }
    let model = ObservationModel::from_scenario(scenario);
    let truth = scenario.target;
    let g = model.values(&truth)?;
    let rho = cfg.rho(scenario.mode, scenario.geometry.num_tx());
    let n0 = cfg.noise_psd();
    let crb = crb_closed_form(
        &scenario.geometry,
        &truth,
        &scenario.carrier,
        cfg,
        scenario.mode,
        scenario.topology,
    )?;
    let cache = match estimator {
        Estimator::MatchedFieldMl => model.coarse_factors(grid),
        Estimator::Capon { .. } => None,
    };
    let estimates: Vec<Result<GridEstimate>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(master_seed, k as u64);
            match estimator {
                Estimator::MatchedFieldMl => {
                    let y = synth_with(&g, rho, n0, &mut rng);
                    match &cache {
                        Some(c) => matched_field_ml_cached(&y, &model, grid, c),
                        None => matched_field_ml_raw(&y, &model, grid),
                    }
                }
                Estimator::Capon { snapshots, loading } => {
                    let ys: Vec<Vec<Complex64>> = (0..snapshots).map(|_| synth_with(&g, rho, n0, &mut rng)).collect();
                    let refs: Vec<&[Complex64]> = ys.iter().map(|y| y.as_slice()).collect();
                    capon_raw(&refs, &model, grid, loading).map(|c| c.estimate)
                }
            }
        })
        .collect();
    let (mut st, mut sr, mut amb) = (0.0, 0.0, 0);
    for e in estimates {
        let e = e?;
        st += (e.theta - truth.angle()).powi(2);
        sr += (e.range - truth.range()).powi(2);
        amb += e.ambiguous as usize;
    }
    let k = trials as f64;
    Ok(RmseReport {
        rmse_theta: (st / k).sqrt(),
        rmse_range: (sr / k).sqrt(),
        trials,
        snr_db: cfg.snr_db(),
        crb_theta: crb.crb_theta,
        crb_range: crb.crb_range,
        estimator,
        master_seed,
        ambiguous_trials: amb,
    })
}
