//! The single input record shared by every computation.

use crate::error::{Error, Result};
use crate::geometry::{amplitude_model_valid, ArrayGeometry, Carrier, TargetLocation};
use crate::warning::Warning;
use std::fmt;

/// Transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Orthogonal waveform per transmit element.
    Mimo,
    /// One coherent beam steered towards the target.
    Phased,
}

/// Array placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Co-located transmit and receive arrays.
    Monostatic,
    /// Target in the near field of the transmitter and the far field of a
    /// receiver placed `R` metres away.
    BistaticNearFarTx,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Mimo => "mimo",
            Mode::Phased => "phased",
        }
    }
}

impl Topology {
    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::Monostatic => "monostatic",
            Topology::BistaticNearFarTx => "bistatic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks that the geometry fits the topology.
///
/// Monostatic needs `R = 0` with identical transmit and receive arrays;
/// bistatic needs `R > 0`.
pub fn check_topology(geom: &ArrayGeometry, topology: Topology) -> Result<()> {
    match topology {
        Topology::Monostatic => {
            if !geom.is_monostatic() {
                return Err(Error::Config("monostatic topology requires R = 0".into()));
            }
            if geom.num_rx() != geom.num_tx() || geom.rx_spacing() != geom.tx_spacing() {
                return Err(Error::Config(
                    "monostatic topology requires N = M and d_R = d_T".into(),
                ));
            }
        }
        Topology::BistaticNearFarTx => {
            if geom.is_monostatic() {
                return Err(Error::Config("bistatic topology requires R > 0".into()));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingScenario {
    pub geometry: ArrayGeometry,
    pub target: TargetLocation,
    pub carrier: Carrier,
    pub mode: Mode,
    pub topology: Topology,
}

impl SensingScenario {
    pub fn new(
        geometry: ArrayGeometry,
        target: TargetLocation,
        carrier: Carrier,
        mode: Mode,
        topology: Topology,
    ) -> Result<Self> {
        check_topology(&geometry, topology)?;
        Ok(Self { geometry, target, carrier, mode, topology })
    }

    /// Same scenario at another target position.
    pub fn at(&self, target: TargetLocation) -> Self {
        Self { target, ..*self }
    }

    /// Non-fatal validity conditions of the closed-form model.
    pub fn warnings(&self) -> Vec<Warning> {
        model_warnings(&self.geometry, &self.target)
    }
}

/// `ε_T >= 0.1` and amplitude-model checks.
pub fn model_warnings(geom: &ArrayGeometry, tgt: &TargetLocation) -> Vec<Warning> {
    let mut out = Vec::new();
    let eps = tgt.eps_tx(geom);
    if eps >= 0.1 {
        out.push(Warning::ClosedFormAccuracyDegraded { eps_tx: eps });
    }
    if !amplitude_model_valid(geom, tgt) {
        out.push(Warning::AmplitudeModelInvalid { range: tgt.range(), aperture: geom.tx_aperture() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_consistency() {
        let mono = ArrayGeometry::monostatic(5, 0.0628).unwrap();
        let bi = ArrayGeometry::new(5, 8, 0.0628, 0.0628, 35.0).unwrap();
        assert!(check_topology(&mono, Topology::Monostatic).is_ok());
        assert!(check_topology(&mono, Topology::BistaticNearFarTx).is_err());
        assert!(check_topology(&bi, Topology::Monostatic).is_err());
        assert!(check_topology(&bi, Topology::BistaticNearFarTx).is_ok());
    }

    #[test]
    fn warnings_flag_large_eps() {
        let g = ArrayGeometry::monostatic(5, 0.5).unwrap();
        let t = TargetLocation::new(2.2, 0.0).unwrap();
        let w = model_warnings(&g, &t);
        assert!(matches!(w[0], Warning::ClosedFormAccuracyDegraded { .. }));
        assert!(matches!(w[1], Warning::AmplitudeModelInvalid { .. }));
    }
}
