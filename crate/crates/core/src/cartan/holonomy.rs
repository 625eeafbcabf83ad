//! Numeric parallel transport around small coordinate squares, as a cross-check of
//! symbolic curvature.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::connections::{curvature_tm, TMConnection};
use crate::error::{Error, Result};
use crate::symcore::{eval, Chart, Expr};

#[derive(Clone, Debug)]
pub struct HolonomyOptions {
    /// RK4 steps per side.
    pub steps: usize,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        HolonomyOptions { steps: 64 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyResult {
    /// `H` with `sigma_end = H sigma_start` on component columns.
    pub holonomy: Vec<Vec<f64>>,
    pub log_holonomy: Vec<Vec<f64>>,
    /// `R(d_i, d_j)` at the base point, acting on component columns.
    pub curvature: Vec<Vec<f64>>,
    /// `log H + h^2 R(d_i, d_j)`.
    pub defect: Vec<Vec<f64>>,
    pub defect_norm: f64,
    /// `|defect| / (h^2 |R|)`, or the absolute defect when `R` vanishes.
    pub relative_error: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

struct Coefficients<'a> {
    conn: &'a TMConnection,
}

impl Coefficients<'_> {
    /// `M` with `d sigma/dt = -M sigma` along a coordinate direction `i` travelled with speed `s`.
    fn rhs(&self, i: usize, speed: f64, p: &[f64]) -> Result<DMatrix<f64>> {
        let r = self.conn.rank();
        let mut m = DMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                let e = self.conn.g(i, a, b);
                if !e.is_literal_zero() {
                    m[(b, a)] = speed * eval(e, p).map_err(|err| Error::Integration(err.to_string()))?;
                }
            }
        }
        Ok(m)
    }
}

/// Transport the identity along a straight coordinate segment of length `h` (signed) in direction `i`.
fn transport_segment(c: &Coefficients<'_>, start: &[f64], i: usize, h: f64, steps: usize, u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let dt = 1.0 / steps as f64;
    let mut y = u.clone();
    let at = |t: f64| {
        let mut p = start.to_vec();
        p[i] += h * t;
        p
    };
    for s in 0..steps {
        let t = s as f64 * dt;
        let k1 = -c.rhs(i, h, &at(t))? * &y;
        let k2 = -c.rhs(i, h, &at(t + dt / 2.0))? * (&y + &k1 * (dt / 2.0));
        let k3 = -c.rhs(i, h, &at(t + dt / 2.0))? * (&y + &k2 * (dt / 2.0));
        let k4 = -c.rhs(i, h, &at(t + dt))? * (&y + &k3 * dt);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration("non-finite transport".into()));
        }
    }
    Ok(y)
}

/// Matrix logarithm of a matrix near the identity, by the Mercator series.
fn log_near_identity(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = h.nrows();
    let x = h - DMatrix::identity(n, n);
    if x.norm() >= 0.5 {
        return Err(Error::Integration("holonomy too far from the identity for the series logarithm".into()));
    }
    let mut out = DMatrix::zeros(n, n);
    let mut power = x.clone();
    for k in 1..60 {
        let term = &power / k as f64;
        if k % 2 == 1 {
            out += &term;
        } else {
            out -= &term;
        }
        if term.norm() < 1e-18 {
            break;
        }
        power = &power * &x;
    }
    Ok(out)
}

/// Holonomy of the square loop `+i, +j, -i, -j` of side `h` at `p`, compared with
/// `-h^2 R(d_i, d_j)`.
pub fn holonomy_check(chart: &Chart, conn: &TMConnection, p: &[f64], plane: (usize, usize), h: f64, opts: &HolonomyOptions) -> Result<HolonomyResult> {
    let n = chart.dim();
    let (i, j) = plane;
    if p.len() != n || i >= n || j >= n || i == j || conn.dim() != n {
        return Err(Error::Shape("holonomy needs a point on the chart and two distinct coordinate directions".into()));
    }
    if opts.steps == 0 {
        return Err(Error::Integration("at least one step per side is required".into()));
    }
    let corners = [(0.0, 0.0), (h, 0.0), (h, h), (0.0, h)];
    for (di, dj) in corners {
        let mut q = p.to_vec();
        q[i] += di;
        q[j] += dj;
        if !chart.contains(&q) {
            return Err(Error::LoopOutsideBox);
        }
    }
    let r = conn.rank();
    let c = Coefficients { conn };
    let mut u = DMatrix::identity(r, r);
    let mut q = p.to_vec();
    for (dir, len) in [(i, h), (j, h), (i, -h), (j, -h)] {
        u = transport_segment(&c, &q, dir, len, opts.steps, &u)?;
        q[dir] += len;
    }
    let log = log_near_identity(&u)?;

    let curv = curvature_tm(conn);
    let mut rm = DMatrix::zeros(r, r);
    for a in 0..r {
        for b in 0..r {
            let e: &Expr = curv.get(&[i, j, a, b]);
            rm[(b, a)] = eval(e, p).map_err(|err| Error::Integration(err.to_string()))?;
        }
    }
    let defect = &log + &rm * (h * h);
    let defect_norm = defect.norm();
    let scale = h * h * rm.norm();
    let relative_error = if scale > 0.0 { defect_norm / scale } else { defect_norm };
    Ok(HolonomyResult {
        holonomy: rows(&u),
        log_holonomy: rows(&log),
        curvature: rows(&rm),
        defect: rows(&defect),
        defect_norm,
        relative_error,
    })
}
