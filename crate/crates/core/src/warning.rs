use std::fmt;

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `d_T / r` is large enough that the sum-to-integral step behind the
    /// closed forms loses accuracy.
    ClosedFormAccuracyDegraded { eps_tx: f64 },
    /// `r <= 1.2 D_T`: per-element amplitude variation is no longer negligible.
    AmplitudeModelInvalid { range: f64, aperture: f64 },
    /// An asymptotic expression was evaluated outside its regime.
    RegimeMismatch { aperture_ratio: f64 },
    /// A formula with a `sin(theta)` numerator evaluated exactly at broadside.
    RegimeDegenerate,
    /// An even element count was rounded up to the next odd count.
    EvenCountRounded { requested: usize, used: usize },
}

impl Warning {
    /// Short machine-friendly tag used in CSV output.
    pub fn tag(&self) -> String {
        match self {
            Warning::ClosedFormAccuracyDegraded { eps_tx } => {
                format!("closed_form_accuracy_degraded(eps_tx={eps_tx:.3e})")
            }
            Warning::AmplitudeModelInvalid { range, aperture } => {
                format!("amplitude_model_invalid(r={range:.3e};D_T={aperture:.3e})")
            }
            Warning::RegimeMismatch { aperture_ratio } => {
                format!("regime_mismatch(D_T/r={aperture_ratio:.3e})")
            }
            Warning::RegimeDegenerate => "regime_degenerate".to_string(),
            Warning::EvenCountRounded { requested, used } => {
                format!("even_count_rounded({requested}->{used})")
            }
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}
