//! Figure presets. Sweep endpoints and steps are choices of this crate and
//! are copied into the CSV header through `[meta]` notes.

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

const MONO_M: &str = "\
[meta]
note = {TITLE}
note = M doubles from 9 to 1025 (odd counts 2^k + 1)

[scenario]
mode = mimo, phased
topology = monostatic
range_m = 10
theta_deg = 30

[sweep]
axis = M
values = 9, 17, 33, 65, 129, 257, 513, 1025

[methods]
list = closed_form, exact_sum, numerical_fim, asymptotic, taylor, far_field_upw
asymptotic_regime = infinite_aperture
";

const MONO_THETA: &str = "\
[meta]
note = {TITLE}
note = theta from -75 to 75 deg in 5 deg steps; M = 1024 runs as 1025

[scenario]
mode = mimo, phased
topology = monostatic
num_tx = 1024
range_m = 10

[sweep]
axis = theta_deg
start = -75
stop = 75
step = 5

[methods]
list = closed_form, exact_sum, numerical_fim, taylor, far_field_upw
";

const MONO_RANGE: &str = "\
[meta]
note = {TITLE}
note = r from 1 m to 1000 m in factors of 1.5; M = 1024 runs as 1025

[scenario]
mode = mimo, phased
topology = monostatic
num_tx = 1024
theta_deg = 30

[sweep]
axis = r_m
start = 1
stop = 1000
factor = 1.5

[methods]
list = closed_form, exact_sum, numerical_fim, taylor, far_field_upw
";

const BISTATIC_M: &str = "\
[meta]
note = {TITLE}
note = M doubles from 17 to 1025; rmse columns from the matched-field ML estimator

[scenario]
mode = mimo
topology = bistatic
num_rx = 8
separation_m = 35
range_m = 18
theta_deg = 0

[sweep]
axis = M
values = 17, 33, 65, 129, 257, 513, 1025

[methods]
list = closed_form, exact_sum, numerical_fim, asymptotic, far_field_upw
asymptotic_regime = infinite_aperture

[monte_carlo]
estimator = matched_field_ml
trials = 500
seed = 20240601
grid = bound_scaled
width_sd = 6
points = 31
refine_levels = 3
";

const PRESETS: [(&str, &str, &str); 8] = [
    ("fig2", MONO_M, "fig2: angle CRB versus M, monostatic"),
    ("fig3", MONO_M, "fig3: range CRB versus M, monostatic"),
    ("fig4", MONO_THETA, "fig4: angle CRB versus theta, monostatic"),
    ("fig5", MONO_THETA, "fig5: range CRB versus theta, monostatic"),
    ("fig6", MONO_RANGE, "fig6: angle CRB versus r, monostatic"),
    ("fig7", MONO_RANGE, "fig7: range CRB versus r, monostatic"),
    ("fig8", BISTATIC_M, "fig8: angle CRB and RMSE versus M, bistatic"),
    ("fig9", BISTATIC_M, "fig9: range CRB and RMSE versus M, bistatic"),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

/// Config text of a preset, suitable for editing and `run --config`.
pub fn preset_text(name: &str) -> Result<String> {
    PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1.replace("{TITLE}", p.2))
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'; known: {}", preset_names().join(", "))))
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&preset_text(name)?)
}

/// All presets in order.
pub fn presets() -> Vec<(&'static str, ExperimentConfig)> {
    PRESETS
        .iter()
        .map(|p| (p.0, preset(p.0).expect("built-in presets parse")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{SweepAxis, SweepValues};
    use crate::scenario::Topology;

    #[test]
    fn eight_presets_parse_and_round_trip() {
        let all = presets();
        assert_eq!(preset_names(), vec!["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"]);
        for (name, cfg) in &all {
            assert_eq!(&ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg, "{name}");
        }
        assert!(preset("fig10").is_err());
    }

    #[test]
    fn preset_parameters() {
        let f2 = preset("fig2").unwrap();
        assert_eq!((f2.range_m, f2.theta_deg, f2.sweep.axis), (10.0, 30.0, SweepAxis::NumTx));
        let f4 = preset("fig4").unwrap();
        assert_eq!(f4.sweep.values, SweepValues::Linear { start: -75.0, stop: 75.0, step: 5.0 });
        assert_eq!((f4.num_tx, f4.range_m), (1024, 10.0));
        let f6 = preset("fig6").unwrap();
        assert_eq!((f6.num_tx, f6.theta_deg, f6.sweep.axis), (1024, 30.0, SweepAxis::RangeM));
        let f8 = preset("fig8").unwrap();
        assert_eq!(f8.topology, Topology::BistaticNearFarTx);
        assert_eq!((f8.num_rx, f8.theta_deg, f8.range_m, f8.separation_m), (Some(8), 0.0, 18.0, Some(35.0)));
        assert_eq!(f8.monte_carlo.as_ref().unwrap().trials, 500);
    }
}
