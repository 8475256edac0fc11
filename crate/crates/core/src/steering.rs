//! Steering vectors with analytic derivatives and the stacked observation `g`.

use crate::error::Result;
use crate::geometry::{
    bistatic_transform, rx_range_with_derivatives, sin_phi_derivatives, tx_range_with_derivatives,
    ArrayGeometry, Carrier, TargetLocation,
};
use crate::scenario::{check_topology, Mode, Topology};
use num_complex::Complex64;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Unit-modulus response plus its partials in `θ` and `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub values: Vec<Complex64>,
    pub d_theta: Vec<Complex64>,
    pub d_range: Vec<Complex64>,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn with_capacity(n: usize) -> Self {
        Self {
            values: Vec::with_capacity(n),
            d_theta: Vec::with_capacity(n),
            d_range: Vec::with_capacity(n),
        }
    }

    // exp(-jk d) and its derivatives for a distance d with partials (dd_t, dd_r).
    fn push_spherical(&mut self, k: f64, dist: f64, dd_theta: f64, dd_range: f64) {
        let v = Complex64::from_polar(1.0, -k * dist);
        self.values.push(v);
        self.d_theta.push(-J * k * dd_theta * v);
        self.d_range.push(-J * k * dd_range * v);
    }
}

/// Transmit response `a_m = exp(-j2π r_m/λ)` over the exact element distances.
pub fn tx_steering(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<SteeringVector> {
    tgt.check_eps_tx(geom)?;
    let k = carrier.wavenumber();
    let mut out = SteeringVector::with_capacity(geom.num_tx());
    for m in geom.tx_indices() {
        let (rm, dt, dr) = tx_range_with_derivatives(geom, tgt, m as f64);
        out.push_spherical(k, rm, dt, dr);
    }
    Ok(out)
}

/// Transmit response without derivatives; used by grid searches.
pub fn tx_values(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<Vec<Complex64>> {
    tgt.check_eps_tx(geom)?;
    let k = carrier.wavenumber();
    Ok(geom
        .tx_indices()
        .map(|m| {
            let rm = crate::geometry::tx_range_unchecked(geom, tgt, m as f64);
            Complex64::from_polar(1.0, -k * rm)
        })
        .collect())
}

/// Receive response with spherical wavefronts over the exact distances `l_n`.
pub fn rx_steering_near(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<SteeringVector> {
    crate::geometry::rx_centre_distance(geom, tgt)?;
    let k = carrier.wavenumber();
    let mut out = SteeringVector::with_capacity(geom.num_rx());
    for n in geom.rx_offsets() {
        let (ln, dt, dr) = rx_range_with_derivatives(geom, tgt, n);
        out.push_spherical(k, ln, dt, dr);
    }
    Ok(out)
}

/// Far-field receive response `b_n = exp(+j2π n d_R sin φ / λ)`.
///
/// The common phase `exp(-j2π l/λ)` is dropped; it is absorbed into the
/// reflection coefficient.
pub fn rx_steering_far(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<SteeringVector> {
    let (_, phi) = bistatic_transform(geom, tgt)?;
    let (gamma_theta, gamma_range) = sin_phi_derivatives(geom, tgt)?;
    let k = carrier.wavenumber();
    let sin_phi = phi.sin();
    let mut out = SteeringVector::with_capacity(geom.num_rx());
    for n in geom.rx_offsets() {
        let u = k * n * geom.rx_spacing();
        let v = Complex64::from_polar(1.0, u * sin_phi);
        out.values.push(v);
        out.d_theta.push(J * u * gamma_theta * v);
        out.d_range.push(J * u * gamma_range * v);
    }
    Ok(out)
}

/// Far-field receive response without derivatives.
pub fn rx_far_values(geom: &ArrayGeometry, tgt: &TargetLocation, carrier: &Carrier) -> Result<Vec<Complex64>> {
    let (_, phi) = bistatic_transform(geom, tgt)?;
    let k = carrier.wavenumber();
    let sin_phi = phi.sin();
    Ok(geom
        .rx_offsets()
        .map(|n| Complex64::from_polar(1.0, k * n * geom.rx_spacing() * sin_phi))
        .collect())
}

/// The vector `g` of the post-matched-filter model `y = ρ g + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationVector {
    pub g: Vec<Complex64>,
    pub g_theta: Vec<Complex64>,
    pub g_range: Vec<Complex64>,
    pub mode: Mode,
    pub topology: Topology,
    /// Transmit element count; sets the power split in `ρ`.
    pub num_tx: usize,
    pub target: TargetLocation,
}

impl ObservationVector {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// `b ⊗ a` with the product rule applied to both partials. Entry `n·M + m`
/// holds `b_n a_m`.
pub fn kron(b: &SteeringVector, a: &SteeringVector) -> SteeringVector {
    let len = b.len() * a.len();
    let mut out = SteeringVector::with_capacity(len);
    for n in 0..b.len() {
        for m in 0..a.len() {
            out.values.push(b.values[n] * a.values[m]);
            out.d_theta.push(b.d_theta[n] * a.values[m] + b.values[n] * a.d_theta[m]);
            out.d_range.push(b.d_range[n] * a.values[m] + b.values[n] * a.d_range[m]);
        }
    }
    out
}

/// Assembles `g`, `∂g/∂θ`, `∂g/∂r` for a mode/topology pair.
///
/// Monostatic reuses the transmit response on receive. Bistatic uses the
/// far-field receive response.
pub fn build_observation(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    carrier: &Carrier,
    mode: Mode,
    topology: Topology,
) -> Result<ObservationVector> {
    check_topology(geom, topology)?;
    let sv = match (mode, topology) {
        (Mode::Mimo, Topology::Monostatic) => {
            let a = tx_steering(geom, tgt, carrier)?;
            kron(&a, &a)
        }
        (Mode::Phased, Topology::Monostatic) => tx_steering(geom, tgt, carrier)?,
        (Mode::Mimo, Topology::BistaticNearFarTx) => {
            let a = tx_steering(geom, tgt, carrier)?;
            let b = rx_steering_far(geom, tgt, carrier)?;
            kron(&b, &a)
        }
        (Mode::Phased, Topology::BistaticNearFarTx) => rx_steering_far(geom, tgt, carrier)?,
    };
    Ok(ObservationVector {
        g: sv.values,
        g_theta: sv.d_theta,
        g_range: sv.d_range,
        mode,
        topology,
        num_tx: geom.num_tx(),
        target: *tgt,
    })
}
