//! Coordinate-space oracle: element positions, Euclidean distances and
//! chain-rule derivatives, a brute-force 4×4 Fisher matrix over
//! `(θ, r, Re κ, Im κ)` and its Schur complement.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use num_complex::Complex64;

pub const C: f64 = 299_792_458.0;
pub const F: f64 = 2.37e9;
pub const D: f64 = 0.0628;

pub fn wavenumber() -> f64 {
    2.0 * std::f64::consts::PI * F / C
}

#[derive(Clone, Copy, Debug)]
pub enum Sys {
    MonoMimo,
    MonoPhased,
    /// `(N, R)`; far-field receive array centred at `(R, 0)`.
    BiMimo(usize, f64),
    BiPhased(usize, f64),
}

#[derive(Clone, Copy, Debug)]
pub struct Target {
    pub r: f64,
    pub theta: f64,
}

impl Target {
    fn q(&self) -> (f64, f64) {
        (self.r * self.theta.cos(), self.r * self.theta.sin())
    }
    fn dq_dtheta(&self) -> (f64, f64) {
        (-self.r * self.theta.sin(), self.r * self.theta.cos())
    }
    fn dq_dr(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }
}

/// `y` coordinates of `count` elements spaced `d`, centred at 0.
pub fn offsets(count: usize, d: f64) -> Vec<f64> {
    let c = (count as f64 - 1.0) / 2.0;
    (0..count).map(|i| (i as f64 - c) * d).collect()
}

/// Distance from `(0, y)` to the target and its `(θ, r)` derivatives.
pub fn tx_distance(y: f64, t: &Target) -> (f64, f64, f64) {
    let (qx, qy) = t.q();
    let (dx, dy) = (qx, qy - y);
    let l = dx.hypot(dy);
    let (tx, ty) = t.dq_dtheta();
    let (rx, ry) = t.dq_dr();
    (l, (dx * tx + dy * ty) / l, (dx * rx + dy * ry) / l)
}

/// `sin φ` seen from `(R, 0)` and its `(θ, r)` derivatives.
pub fn sin_phi(big_r: f64, t: &Target) -> (f64, f64, f64) {
    let (qx, qy) = t.q();
    let (dx, dy) = (qx - big_r, qy);
    let l = dx.hypot(dy);
    let s = dy / l;
    let deriv = |(px, py): (f64, f64)| {
        let dl = (dx * px + dy * py) / l;
        (py * l - dy * dl) / (l * l)
    };
    (s, deriv(t.dq_dtheta()), deriv(t.dq_dr()))
}

/// Transmit factor and its derivatives.
pub fn tx_factor(m: usize, t: &Target) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let k = wavenumber();
    let j = Complex64::new(0.0, 1.0);
    let mut v = Vec::new();
    let mut vt = Vec::new();
    let mut vr = Vec::new();
    for y in offsets(m, D) {
        let (l, lt, lr) = tx_distance(y, t);
        let a = Complex64::from_polar(1.0, -k * l);
        v.push(a);
        vt.push(-j * k * lt * a);
        vr.push(-j * k * lr * a);
    }
    (v, vt, vr)
}

/// Far-field receive factor and its derivatives.
pub fn rx_factor(n: usize, big_r: f64, t: &Target) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let k = wavenumber();
    let j = Complex64::new(0.0, 1.0);
    let (s, st, sr) = sin_phi(big_r, t);
    let mut v = Vec::new();
    let mut vt = Vec::new();
    let mut vr = Vec::new();
    for y in offsets(n, D) {
        let b = Complex64::from_polar(1.0, k * y * s);
        v.push(b);
        vt.push(j * k * y * st * b);
        vr.push(j * k * y * sr * b);
    }
    (v, vt, vr)
}

/// Gram matrix `Re(Dᴴ D)` of the columns `[g_θ, g_r, g, j g]` (times the
/// amplitude where it applies) for `g = outer ⊗ inner`.
fn gram_kron(
    outer: &(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>),
    inner: &(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>),
) -> [[Complex64; 3]; 3] {
    // columns: g, g_θ, g_r
    let mut h = [[Complex64::new(0.0, 0.0); 3]; 3];
    for n in 0..outer.0.len() {
        let (b, bt, br) = (outer.0[n], outer.1[n], outer.2[n]);
        for m in 0..inner.0.len() {
            let (a, at, ar) = (inner.0[m], inner.1[m], inner.2[m]);
            let cols = [b * a, bt * a + b * at, br * a + b * ar];
            for i in 0..3 {
                for k in 0..3 {
                    h[i][k] += cols[i].conj() * cols[k];
                }
            }
        }
    }
    h
}

fn gram_single(f: &(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)) -> [[Complex64; 3]; 3] {
    let one = (vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 0.0)]);
    gram_kron(&one, f)
}

/// Oracle bound: `(CRB_θ, CRB_r, identifiable)` at `γ`, `L`, `κ = 1`, `N₀ = 1`.
pub fn oracle_crb(sys: Sys, m: usize, t: &Target, snr: f64, l: f64) -> (f64, f64, bool) {
    let tx = tx_factor(m, t);
    let (h, rho2) = match sys {
        Sys::MonoMimo => (gram_kron(&tx, &tx), snr * l / m as f64),
        Sys::MonoPhased => (gram_single(&tx), snr * l * m as f64),
        Sys::BiMimo(n, big_r) => (gram_kron(&rx_factor(n, big_r, t), &tx), snr * l / m as f64),
        Sys::BiPhased(n, big_r) => (gram_single(&rx_factor(n, big_r, t)), snr * l * m as f64),
    };
    // parameters (θ, r, κr, κi); μ = κ ρ g with κ = 1
    let j = Complex64::new(0.0, 1.0);
    let rho = rho2.sqrt();
    let col = |i: usize| -> (usize, Complex64) {
        match i {
            0 => (1, Complex64::new(rho, 0.0)),
            1 => (2, Complex64::new(rho, 0.0)),
            2 => (0, Complex64::new(rho, 0.0)),
            _ => (0, j * rho),
        }
    };
    let mut fim = [[0.0; 4]; 4];
    for (a, row) in fim.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let (ia, sa) = col(a);
            let (ib, sb) = col(b);
            *v = 2.0 * (sa.conj() * sb * h[ia][ib]).re;
        }
    }
    // Schur complement of the nuisance block
    let (n11, n12, n22) = (fim[2][2], fim[2][3], fim[3][3]);
    let nd = n11 * n22 - n12 * n12;
    let inv = [[n22 / nd, -n12 / nd], [-n12 / nd, n11 / nd]];
    let mut s = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = fim[a][b];
            for x in 0..2 {
                for y in 0..2 {
                    acc -= fim[a][2 + x] * inv[x][y] * fim[2 + y][b];
                }
            }
            s[a][b] = acc;
        }
    }
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let tr = s[0][0] + s[1][1];
    if !(det > 1e-12 * (tr / 2.0).powi(2)) {
        return (f64::INFINITY, f64::INFINITY, false);
    }
    (s[1][1] / det, s[0][0] / det, true)
}

/// Transmit intermediates `(a, Im c, e, p, Im q)` by direct summation.
pub fn oracle_intermediates(m: usize, t: &Target) -> [f64; 5] {
    let k = wavenumber();
    let mut out = [0.0; 5];
    for y in offsets(m, D) {
        let (_, lt, lr) = tx_distance(y, t);
        out[0] += k * k * lt * lt;
        out[1] += k * lt;
        out[2] += k * k * lt * lr;
        out[3] += k * k * lr * lr;
        out[4] += k * lr;
    }
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `n` odd counts log-spaced from `lo` to `hi`; even roundings move up.
pub fn log_spaced_odd(lo: usize, hi: usize, n: usize) -> Vec<usize> {
    let q = (hi as f64 / lo as f64).powf(1.0 / (n - 1) as f64);
    (0..n)
        .map(|i| {
            let v = (lo as f64 * q.powi(i as i32)).round() as usize;
            if v.is_multiple_of(2) {
                v + 1
            } else {
                v
            }
        })
        .collect()
}
