//! CSV rows: one per (sweep point, mode, method).

use crate::error::{Error, Result};
use crate::fim::{CrbResult, NoiseAndPowerConfig};
use crate::scenario::SensingScenario;
use std::fmt::Write as _;

pub const BASE_COLUMNS: [&str; 16] = [
    "method",
    "mode",
    "topology",
    "M",
    "N",
    "d_tx_m",
    "d_rx_m",
    "R_m",
    "theta_rad",
    "r_m",
    "snr_db",
    "L",
    "crb_theta_rad2",
    "crb_r_m2",
    "identifiable",
    "warnings",
];

pub const RMSE_COLUMNS: [&str; 3] = ["rmse_theta_rad", "rmse_r_m", "mc_trials"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmseColumns {
    pub rmse_theta: f64,
    pub rmse_range: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub mode: String,
    pub topology: String,
    pub num_tx: usize,
    pub num_rx: usize,
    pub d_tx_m: f64,
    pub d_rx_m: f64,
    pub separation_m: f64,
    pub theta_rad: f64,
    pub range_m: f64,
    pub snr_db: f64,
    pub time_bandwidth: f64,
    pub crb_theta: f64,
    pub crb_range: f64,
    pub identifiable: bool,
    pub warnings: Vec<String>,
    pub rmse: Option<RmseColumns>,
}

impl ResultRow {
    pub fn new(
        sc: &SensingScenario,
        cfg: &NoiseAndPowerConfig,
        res: &CrbResult,
        warnings: Vec<String>,
        rmse: Option<RmseColumns>,
    ) -> Self {
        let g = &sc.geometry;
        Self {
            method: res.method.as_str().to_string(),
            mode: sc.mode.as_str().to_string(),
            topology: sc.topology.as_str().to_string(),
            num_tx: g.num_tx(),
            num_rx: g.num_rx(),
            d_tx_m: g.tx_spacing(),
            d_rx_m: g.rx_spacing(),
            separation_m: g.separation(),
            theta_rad: sc.target.angle(),
            range_m: sc.target.range(),
            snr_db: cfg.snr_db(),
            time_bandwidth: cfg.time_bandwidth(),
            crb_theta: res.crb_theta,
            crb_range: res.crb_range,
            identifiable: res.identifiable,
            warnings,
            rmse,
        }
    }
}

/// 17 significant digits; `inf`, `-inf`, `nan` literals.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Renders comments, header and rows. With `db`, bounds are `10·log10`
/// and RMSEs become `10·log10(RMSE²)`.
pub fn write_csv(comments: &[String], rows: &[ResultRow], with_rmse: bool, db: bool) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
    if db {
        header[12] = "crb_theta_db";
        header[13] = "crb_r_db";
    }
    if with_rmse {
        if db {
            header.extend(["mse_theta_db", "mse_r_db", "mc_trials"]);
        } else {
            header.extend(RMSE_COLUMNS);
        }
    }
    s.push_str(&header.join(","));
    s.push('\n');
    let bound = |x: f64| if db { fmt_f64(to_db(x)) } else { fmt_f64(x) };
    for r in rows {
        let mut cells = vec![
            r.method.clone(),
            r.mode.clone(),
            r.topology.clone(),
            r.num_tx.to_string(),
            r.num_rx.to_string(),
            fmt_f64(r.d_tx_m),
            fmt_f64(r.d_rx_m),
            fmt_f64(r.separation_m),
            fmt_f64(r.theta_rad),
            fmt_f64(r.range_m),
            fmt_f64(r.snr_db),
            fmt_f64(r.time_bandwidth),
            bound(r.crb_theta),
            bound(r.crb_range),
            r.identifiable.to_string(),
            r.warnings.join("|"),
        ];
        if with_rmse {
            let m = r.rmse.unwrap_or(RmseColumns { rmse_theta: f64::NAN, rmse_range: f64::NAN, trials: 0 });
            if db {
                cells.push(fmt_f64(to_db(m.rmse_theta * m.rmse_theta)));
                cells.push(fmt_f64(to_db(m.rmse_range * m.rmse_range)));
            } else {
                cells.push(fmt_f64(m.rmse_theta));
                cells.push(fmt_f64(m.rmse_range));
            }
            cells.push(m.trials.to_string());
        }
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Parsed CSV. Values in dB files stay in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub db: bool,
    pub rows: Vec<ResultRow>,
}

impl CsvTable {
    pub fn has_rmse(&self) -> bool {
        self.rows.iter().any(|r| r.rmse.is_some())
    }
}

fn num<T: std::str::FromStr>(cell: &str, col: &str, line: usize) -> Result<T> {
    cell.parse().map_err(|_| Error::Config(format!("csv line {line}: column {col}: cannot parse '{cell}'")))
}

/// Reads text produced by [`write_csv`].
pub fn read_csv(text: &str) -> Result<CsvTable> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(c) = line.strip_prefix("# ") {
            comments.push(c.to_string());
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let Some(h) = &header else {
            header = Some(cells.iter().map(|c| c.to_string()).collect());
            continue;
        };
        if cells.len() != h.len() {
            return Err(Error::Config(format!("csv line {lineno}: {} cells, header has {}", cells.len(), h.len())));
        }
        let f = |k: usize| num::<f64>(cells[k], &h[k], lineno);
        let rmse = if h.len() > BASE_COLUMNS.len() {
            Some(RmseColumns { rmse_theta: f(16)?, rmse_range: f(17)?, trials: num(cells[18], &h[18], lineno)? })
        } else {
            None
        };
        rows.push(ResultRow {
            method: cells[0].to_string(),
            mode: cells[1].to_string(),
            topology: cells[2].to_string(),
            num_tx: num(cells[3], "M", lineno)?,
            num_rx: num(cells[4], "N", lineno)?,
            d_tx_m: f(5)?,
            d_rx_m: f(6)?,
            separation_m: f(7)?,
            theta_rad: f(8)?,
            range_m: f(9)?,
            snr_db: f(10)?,
            time_bandwidth: f(11)?,
            crb_theta: f(12)?,
            crb_range: f(13)?,
            identifiable: num(cells[14], "identifiable", lineno)?,
            warnings: if cells[15].is_empty() { Vec::new() } else { cells[15].split('|').map(str::to_string).collect() },
            rmse,
        });
    }
    let header = header.ok_or_else(|| Error::Config("csv: missing header row".into()))?;
    Ok(CsvTable { comments, db: header.get(12).is_some_and(|c| c == "crb_theta_db"), rows })
}
