//! Array placement, target-to-element distances and the bistatic transform.
//!
//! The transmit ULA lies on the y-axis centred at the origin, element `m` at
//! `(0, m d_T)`. The receive ULA is parallel to it at `x = R`, element `n` at
//! `(R, n d_R)`. The target sits at `(r cos θ, r sin θ)`. Angles are radians.

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Cosine magnitude below which `1/cos θ` is treated as singular.
const COS_SINGULAR: f64 = 1e-12;

/// Transmit and receive uniform linear arrays.
///
/// The transmit count must be odd so that the index set is
/// `{-(M-1)/2, ..., (M-1)/2}`. The receive count may be even; its element
/// offsets are then half-integers, still symmetric about the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_tx: usize,
    num_rx: usize,
    tx_spacing: f64,
    rx_spacing: f64,
    separation: f64,
}

impl ArrayGeometry {
    pub fn new(
        num_tx: usize,
        num_rx: usize,
        tx_spacing: f64,
        rx_spacing: f64,
        separation: f64,
    ) -> Result<Self> {
        if num_tx == 0 || num_tx.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "transmit element count M must be odd and positive, got {num_tx}"
            )));
        }
        if num_rx == 0 {
            return Err(Error::Domain("receive element count N must be positive".into()));
        }
        if !(tx_spacing > 0.0 && tx_spacing.is_finite()) {
            return Err(Error::Domain(format!("d_T must be positive, got {tx_spacing}")));
        }
        if !(rx_spacing > 0.0 && rx_spacing.is_finite()) {
            return Err(Error::Domain(format!("d_R must be positive, got {rx_spacing}")));
        }
        if !(separation >= 0.0 && separation.is_finite()) {
            return Err(Error::Domain(format!("R must be non-negative, got {separation}")));
        }
        Ok(Self { num_tx, num_rx, tx_spacing, rx_spacing, separation })
    }

    /// Co-located arrays: `N = M`, `d_R = d_T`, `R = 0`.
    pub fn monostatic(num_tx: usize, spacing: f64) -> Result<Self> {
        Self::new(num_tx, num_tx, spacing, spacing, 0.0)
    }

    pub fn num_tx(&self) -> usize {
        self.num_tx
    }

    pub fn num_rx(&self) -> usize {
        self.num_rx
    }

    pub fn tx_spacing(&self) -> f64 {
        self.tx_spacing
    }

    pub fn rx_spacing(&self) -> f64 {
        self.rx_spacing
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// `D_T = M d_T`.
    pub fn tx_aperture(&self) -> f64 {
        self.num_tx as f64 * self.tx_spacing
    }

    /// `D_R = N d_R`.
    pub fn rx_aperture(&self) -> f64 {
        self.num_rx as f64 * self.rx_spacing
    }

    pub fn is_monostatic(&self) -> bool {
        self.separation == 0.0
    }

    /// Largest transmit index `(M-1)/2`.
    pub fn max_tx_index(&self) -> i64 {
        (self.num_tx as i64 - 1) / 2
    }

    /// Transmit indices in storage order, `-(M-1)/2 ..= (M-1)/2`.
    pub fn tx_indices(&self) -> impl Iterator<Item = i64> + Clone {
        let h = self.max_tx_index();
        -h..=h
    }

    /// Receive element offsets (in units of `d_R`) in storage order.
    pub fn rx_offsets(&self) -> impl Iterator<Item = f64> + Clone {
        let centre = (self.num_rx as f64 - 1.0) / 2.0;
        (0..self.num_rx).map(move |k| k as f64 - centre)
    }

    fn check_tx_index(&self, m: i64) -> Result<()> {
        if m.abs() > self.max_tx_index() {
            return Err(Error::Domain(format!(
                "transmit index {m} outside ±{}",
                self.max_tx_index()
            )));
        }
        Ok(())
    }

    fn check_rx_offset(&self, n: f64) -> Result<()> {
        let k = n + (self.num_rx as f64 - 1.0) / 2.0;
        if k < 0.0 || k > (self.num_rx - 1) as f64 || k.fract() != 0.0 {
            return Err(Error::Domain(format!(
                "receive offset {n} is not an element of an N={} array",
                self.num_rx
            )));
        }
        Ok(())
    }

    /// Same arrays with a different transmit count (receive side follows
    /// for monostatic geometries).
    pub fn with_num_tx(&self, num_tx: usize) -> Result<Self> {
        let num_rx = if self.is_monostatic() { num_tx } else { self.num_rx };
        Self::new(num_tx, num_rx, self.tx_spacing, self.rx_spacing, self.separation)
    }
}

/// Target position relative to the transmit array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetLocation {
    range: f64,
    angle: f64,
}

impl TargetLocation {
    pub fn new(range: f64, angle: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::Domain(format!("range must be positive, got {range}")));
        }
        if !(angle.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Domain(format!("angle must lie in [-π/2, π/2], got {angle}")));
        }
        Ok(Self { range, angle })
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Cartesian position `(r cos θ, r sin θ)`.
    pub fn position(&self) -> (f64, f64) {
        (self.range * self.angle.cos(), self.range * self.angle.sin())
    }

    /// `ε_T = d_T / r`.
    pub fn eps_tx(&self, geom: &ArrayGeometry) -> f64 {
        geom.tx_spacing / self.range
    }

    /// Rejects `ε_T >= 1`, the limit of the spherical-wave closed forms.
    pub fn check_eps_tx(&self, geom: &ArrayGeometry) -> Result<f64> {
        let eps = self.eps_tx(geom);
        if eps >= 1.0 {
            return Err(Error::Domain(format!("ε_T = d_T/r = {eps} must be < 1")));
        }
        Ok(eps)
    }

    /// Errors when `cos θ` is numerically zero.
    pub fn check_not_endfire(&self) -> Result<f64> {
        let c = self.angle.cos();
        if c.abs() <= COS_SINGULAR {
            return Err(Error::SingularGeometry(format!(
                "cos θ vanishes at θ = {}",
                self.angle
            )));
        }
        Ok(c)
    }
}

/// Carrier; the wavelength is always derived from the frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    frequency: f64,
}

impl Carrier {
    pub fn from_frequency(frequency: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::Domain(format!("carrier frequency must be positive, got {frequency}")));
        }
        Ok(Self { frequency })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }

    /// `2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength()
    }
}

/// Distance from transmit element `m` to the target.
pub fn exact_tx_range(geom: &ArrayGeometry, tgt: &TargetLocation, m: i64) -> Result<f64> {
    geom.check_tx_index(m)?;
    Ok(tx_range_unchecked(geom, tgt, m as f64))
}

// r·sqrt(1 - 2mε sinθ + m²ε²) written as r·|(1 - mε sinθ, mε cosθ)|, which
// cannot go negative under the root.
pub(crate) fn tx_range_unchecked(geom: &ArrayGeometry, tgt: &TargetLocation, m: f64) -> f64 {
    let me = m * geom.tx_spacing / tgt.range;
    let (s, c) = tgt.angle.sin_cos();
    tgt.range * (1.0 - me * s).hypot(me * c)
}

/// `(r_m, ∂r_m/∂θ, ∂r_m/∂r)` for transmit element `m`.
pub(crate) fn tx_range_with_derivatives(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    m: f64,
) -> (f64, f64, f64) {
    let r = tgt.range;
    let md = m * geom.tx_spacing;
    let (s, c) = tgt.angle.sin_cos();
    let rm = tx_range_unchecked(geom, tgt, m);
    // ∂r_m/∂θ = -m d cosθ / sqrt(..), ∂r_m/∂r = (1 - mε sinθ) / sqrt(..); sqrt(..) = r_m / r
    let d_theta = -md * c * r / rm;
    let d_range = (r - md * s) / rm;
    (rm, d_theta, d_range)
}

/// Receive-side range and angle `(l, φ)` expressed through `(r, θ)`.
pub fn bistatic_transform(geom: &ArrayGeometry, tgt: &TargetLocation) -> Result<(f64, f64)> {
    if geom.separation <= 0.0 {
        return Err(Error::Domain("bistatic transform requires R > 0".into()));
    }
    let l = rx_centre_distance(geom, tgt)?;
    let (s, _) = tgt.angle.sin_cos();
    let ratio = (tgt.range * s / l).clamp(-1.0, 1.0);
    Ok((l, ratio.asin()))
}

pub(crate) fn rx_centre_distance(geom: &ArrayGeometry, tgt: &TargetLocation) -> Result<f64> {
    let (x, y) = tgt.position();
    let l = (geom.separation - x).hypot(y);
    if l <= 1e-12 * geom.separation.max(tgt.range) {
        return Err(Error::DegenerateGeometry(
            "target coincides with the receive-array centre (l = 0)".into(),
        ));
    }
    Ok(l)
}

/// Distance from receive element at offset `n` (units of `d_R`) to the target.
///
/// Works for `R = 0` as well, where it mirrors [`exact_tx_range`].
pub fn exact_rx_range(geom: &ArrayGeometry, tgt: &TargetLocation, n: f64) -> Result<f64> {
    geom.check_rx_offset(n)?;
    rx_centre_distance(geom, tgt)?;
    Ok(rx_range_with_derivatives(geom, tgt, n).0)
}

/// `(l_n, ∂l_n/∂θ, ∂l_n/∂r)` for the receive element at offset `n`.
pub(crate) fn rx_range_with_derivatives(
    geom: &ArrayGeometry,
    tgt: &TargetLocation,
    n: f64,
) -> (f64, f64, f64) {
    let r = tgt.range;
    let big_r = geom.separation;
    let nd = n * geom.rx_spacing;
    let (s, c) = tgt.angle.sin_cos();
    let ln = (big_r - r * c).hypot(nd - r * s);
    let d_theta = r * (big_r * s - nd * c) / ln;
    let d_range = (r - big_r * c - nd * s) / ln;
    (ln, d_theta, d_range)
}

/// `(Γ_θ, Γ_r)`: partial derivatives of the receive-side `sin φ` with
/// respect to `θ` and `r`. Identical for every receive element.
pub fn sin_phi_derivatives(geom: &ArrayGeometry, tgt: &TargetLocation) -> Result<(f64, f64)> {
    let (l, _) = bistatic_transform(geom, tgt)?;
    let r = tgt.range;
    let big_r = geom.separation;
    let (s, c) = tgt.angle.sin_cos();
    let l3 = l * l * l;
    let gamma_theta = (r * c * (big_r * big_r + r * r - big_r * r * c) - big_r * r * r) / l3;
    let gamma_range = big_r * s * (big_r - r * c) / l3;
    Ok((gamma_theta, gamma_range))
}

/// Second-order (Fresnel) approximation of the transmit distance.
pub fn taylor_tx_range(geom: &ArrayGeometry, tgt: &TargetLocation, m: i64) -> Result<f64> {
    geom.check_tx_index(m)?;
    let md = m as f64 * geom.tx_spacing;
    let (s, c) = tgt.angle.sin_cos();
    Ok(tgt.range + md * md * c * c / (2.0 * tgt.range) - md * s)
}

/// Angle subtended by the transmit aperture at the target.
pub fn angular_span(geom: &ArrayGeometry, tgt: &TargetLocation) -> Result<f64> {
    let c = tgt.check_not_endfire()?;
    Ok(angular_span_raw(geom.tx_aperture() / tgt.range, tgt.angle, c))
}

pub(crate) fn angular_span_raw(aperture_ratio: f64, angle: f64, cos_angle: f64) -> f64 {
    let u = aperture_ratio / (2.0 * cos_angle);
    let t = angle.tan();
    (u - t).atan() + (u + t).atan()
}

/// Whether the constant-amplitude steering model holds (`r > 1.2 D_T`).
pub fn amplitude_model_valid(geom: &ArrayGeometry, tgt: &TargetLocation) -> bool {
    tgt.range > 1.2 * geom.tx_aperture()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn rejects_even_tx_count() {
        assert!(matches!(ArrayGeometry::new(2, 3, 0.1, 0.1, 0.0), Err(Error::Domain(_))));
        assert!(ArrayGeometry::new(3, 8, 0.1, 0.1, 35.0).is_ok());
    }

    #[test]
    fn centre_element_sees_range() {
        let g = ArrayGeometry::monostatic(101, 0.0628).unwrap();
        let t = TargetLocation::new(7.5, 0.3).unwrap();
        assert_eq!(exact_tx_range(&g, &t, 0).unwrap(), 7.5);
    }

    #[test]
    fn coincident_endfire_element_is_at_zero_distance() {
        let g = ArrayGeometry::monostatic(201, 0.0628).unwrap();
        let t = TargetLocation::new(100.0 * 0.0628, FRAC_PI_2).unwrap();
        let d = exact_tx_range(&g, &t, 100).unwrap();
        assert!(d.abs() < 1e-12, "{d}");
    }

    #[test]
    fn tx_range_matches_coordinates() {
        let g = ArrayGeometry::monostatic(201, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let want = ((10.0 * FRAC_PI_6.cos()).powi(2) + (10.0 * FRAC_PI_6.sin() - 100.0 * 0.0628).powi(2)).sqrt();
        assert!(close(exact_tx_range(&g, &t, 100).unwrap(), want, 1e-14));
        assert!(exact_tx_range(&g, &t, 101).is_err());
    }

    #[test]
    fn bistatic_collinear_and_isoceles() {
        let g = ArrayGeometry::new(3, 3, 0.0628, 0.0628, 35.0).unwrap();
        let (l, phi) = bistatic_transform(&g, &TargetLocation::new(18.0, 0.0).unwrap()).unwrap();
        assert!(close(l, 17.0, 1e-15));
        assert_eq!(phi, 0.0);
        let th = 0.7;
        let (l, _) = bistatic_transform(&g, &TargetLocation::new(35.0, th).unwrap()).unwrap();
        assert!(close(l, 70.0 * (th / 2.0).sin(), 1e-13));
    }

    #[test]
    fn bistatic_degenerate_and_monostatic_rejected() {
        let g = ArrayGeometry::new(3, 3, 0.0628, 0.0628, 35.0).unwrap();
        let t = TargetLocation::new(35.0, 0.0).unwrap();
        assert!(matches!(bistatic_transform(&g, &t), Err(Error::DegenerateGeometry(_))));
        let mono = ArrayGeometry::monostatic(3, 0.0628).unwrap();
        assert!(bistatic_transform(&mono, &TargetLocation::new(5.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn rx_range_cases() {
        let g = ArrayGeometry::new(3, 7, 0.0628, 0.0628, 35.0).unwrap();
        let t = TargetLocation::new(18.0, PI / 12.0).unwrap();
        let (l, _) = bistatic_transform(&g, &t).unwrap();
        assert!(close(exact_rx_range(&g, &t, 0.0).unwrap(), l, 1e-14));
        let (x, y) = t.position();
        let want = (35.0 - x).hypot(3.0 * 0.0628 - y);
        assert!(close(exact_rx_range(&g, &t, 3.0).unwrap(), want, 1e-14));
        let t0 = TargetLocation::new(18.0, 0.0).unwrap();
        let want0 = (17.0f64.powi(2) + (2.0 * 0.0628f64).powi(2)).sqrt();
        assert!(close(exact_rx_range(&g, &t0, -2.0).unwrap(), want0, 1e-14));
        assert!(exact_rx_range(&g, &t, 0.5).is_err());
    }

    #[test]
    fn even_rx_offsets_are_half_integers() {
        let g = ArrayGeometry::new(3, 8, 0.0628, 0.0628, 35.0).unwrap();
        let offs: Vec<f64> = g.rx_offsets().collect();
        assert_eq!(offs.first(), Some(&-3.5));
        assert_eq!(offs.iter().sum::<f64>(), 0.0);
        assert!(exact_rx_range(&g, &TargetLocation::new(18.0, 0.1).unwrap(), 3.5).is_ok());
    }

    #[test]
    fn taylor_range_cases() {
        let g = ArrayGeometry::monostatic(101, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.0).unwrap();
        assert_eq!(taylor_tx_range(&g, &t, 0).unwrap(), 10.0);
        let md: f64 = 30.0 * 0.0628;
        assert!(close(taylor_tx_range(&g, &t, 30).unwrap(), 10.0 + md * md / 20.0, 1e-15));
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let err = (taylor_tx_range(&g, &t, 50).unwrap() - exact_tx_range(&g, &t, 50).unwrap()).abs();
        let ratio: f64 = 50.0 * 0.0628 / 10.0;
        assert!(err < 10.0 * ratio.powi(3), "{err}");
    }

    #[test]
    fn angular_span_cases() {
        let g = ArrayGeometry::monostatic(101, 0.0628).unwrap();
        let t = TargetLocation::new(10.0, 0.0).unwrap();
        let span = angular_span(&g, &t).unwrap();
        assert!(close(span, 2.0 * (g.tx_aperture() / 20.0).atan(), 1e-14));
        let huge = ArrayGeometry::monostatic(1_000_001, 0.0628).unwrap();
        let span = angular_span(&huge, &TargetLocation::new(1.0, 0.4).unwrap()).unwrap();
        assert!((span - PI).abs() < 1e-4);
        let endfire = TargetLocation::new(10.0, FRAC_PI_2).unwrap();
        assert!(matches!(angular_span(&g, &endfire), Err(Error::SingularGeometry(_))));
    }

    #[test]
    fn angular_span_matches_subtended_angle() {
        // D_T = 1 m via M=25, d=0.04.
        let g = ArrayGeometry::monostatic(25, 0.04).unwrap();
        let t = TargetLocation::new(10.0, FRAC_PI_6).unwrap();
        let (x, y) = t.position();
        let (ux, uy) = (0.0 - x, 0.5 - y);
        let (vx, vy) = (0.0 - x, -0.5 - y);
        let want = (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy);
        assert!(close(angular_span(&g, &t).unwrap(), want, 1e-12));
    }

    #[test]
    fn amplitude_validity_boundary() {
        let t = TargetLocation::new(10.0, 0.0).unwrap();
        assert!(amplitude_model_valid(&ArrayGeometry::monostatic(25, 0.04).unwrap(), &t));
        assert!(!amplitude_model_valid(&ArrayGeometry::monostatic(25, 0.4).unwrap(), &t));
        let t = TargetLocation::new(12.1, 0.0).unwrap();
        assert!(amplitude_model_valid(&ArrayGeometry::monostatic(25, 0.4).unwrap(), &t));
    }

    #[test]
    fn sin_phi_derivatives_at_broadside() {
        let g = ArrayGeometry::new(3, 8, 0.0628, 0.0628, 35.0).unwrap();
        let (gt, gr) = sin_phi_derivatives(&g, &TargetLocation::new(18.0, 0.0).unwrap()).unwrap();
        assert!(close(gt, 18.0 / 17.0, 1e-14));
        assert_eq!(gr, 0.0);
    }

    #[test]
    fn carrier_wavelength() {
        let c = Carrier::from_frequency(2.37e9).unwrap();
        assert!(close(c.wavelength(), 0.126_494_708_016_877_65, 1e-12));
        assert!(Carrier::from_frequency(0.0).is_err());
    }
}
