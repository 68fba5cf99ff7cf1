//! Construction and verification of the exponential predictor-corrector
//! weights.
//!
//! The weights make the k-step stencil exact, to a tolerance, for solutions
//! e^{λt} with λ·T anywhere in the semidisk S = {z : |z| ≤ ρ, Re z ≤ 0},
//! where T = k·dt is the span of the history window. Working in normalized
//! per-step units (dt = 1, so the per-step design region is |λ| ≤ ρ/k), the
//! exactness condition at a sample point λ reads
//!
//!   e^{λk} = Σ_{i=0..k-1} [ w_i e^{λi} + w_{k+i} λ e^{λi} ]
//!
//! for the predictor, with the corrector adding a weight on λe^{λk} (the
//! derivative at the new point). Sampling the semidisk densely and splitting
//! real and imaginary parts gives an overdetermined real system, solved by
//! a truncated SVD pseudo-inverse (minimum-norm least squares). Exactness
//! for polynomial solutions of degree < [`CONSISTENCY_ORDER`] is enforced
//! as hard constraints (eliminated before the least-squares solve) so that
//! constants and slow drifts are reproduced to round-off, not merely to the
//! fit tolerance.

use nalgebra::DMatrix;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Polynomial degrees 0..CONSISTENCY_ORDER-1 are reproduced exactly.
pub const CONSISTENCY_ORDER: usize = 3;

/// Identifies the semidisk sampling layout; bump when the rule changes.
pub const SAMPLING_RULE_VERSION: u32 = 1;

/// Residual above which a construction is rejected outright.
pub const ILL_CONDITIONED_LIMIT: f64 = 1e-8;

/// Weight vectors of the exponential predictor-corrector stencil, plus the
/// construction metadata needed to rebuild and verify them.
///
/// Weight ordering: historical weights run oldest-first, i.e. index j weighs
/// the sample j steps after the oldest history entry. `corrector_deriv_w`
/// has k+1 entries and its index 0 weighs the derivative at the *new* point;
/// indices 1..=k are the historical derivative weights, oldest-first.
/// Derivative weights are normalized for dt = 1 and must be scaled by dt at
/// application time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPcCoefficients {
    pub k: usize,
    pub rho: f64,
    pub rank: usize,
    pub svd_tol: f64,
    pub sampling_rule_version: u32,
    pub consistency_order: usize,
    pub m_samples: usize,
    pub predictor_value_w: Vec<f64>,
    pub predictor_deriv_w: Vec<f64>,
    pub corrector_value_w: Vec<f64>,
    pub corrector_deriv_w: Vec<f64>,
    /// Singular directions actually retained (predictor, corrector).
    pub retained: (usize, usize),
    /// Max one-step residual measured on the held-out verification grid.
    pub max_residual: f64,
}

impl ExpPcCoefficients {
    /// Per-step design radius ρ/k: the stencil is accurate for |λ·dt| below
    /// this value.
    pub fn step_radius(&self) -> f64 {
        self.rho / self.k as f64
    }

    /// Predictor applied to scalar history: values y_j and dt-scaled
    /// derivatives (dt·y'_j), both oldest-first with length k.
    pub fn predict_scalar(&self, values: &[f64], scaled_derivs: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.k);
        let mut acc = 0.0;
        for j in 0..self.k {
            acc += self.predictor_value_w[j] * values[j]
                + self.predictor_deriv_w[j] * scaled_derivs[j];
        }
        acc
    }

    /// Corrector applied to scalar history plus the dt-scaled derivative at
    /// the new point.
    pub fn correct_scalar(
        &self,
        values: &[f64],
        scaled_derivs: &[f64],
        scaled_new_deriv: f64,
    ) -> f64 {
        debug_assert_eq!(values.len(), self.k);
        let mut acc = self.corrector_deriv_w[0] * scaled_new_deriv;
        for j in 0..self.k {
            acc += self.corrector_value_w[j] * values[j]
                + self.corrector_deriv_w[j + 1] * scaled_derivs[j];
        }
        acc
    }
}

/// Construction-grid sample points on the semidisk of radius `rho_step`
/// (per-step units): 2k on the arc, 2k on the imaginary-axis diameter, and
/// the remainder of `m` on an interior polar grid.
fn construction_samples(k: usize, rho_step: f64, m: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(m);
    let n_arc = 2 * k;
    for j in 0..n_arc {
        let theta =
            std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (j as f64 + 0.5) / n_arc as f64;
        pts.push(Complex64::from_polar(rho_step, theta));
    }
    let n_diam = 2 * k;
    for j in 0..n_diam {
        let s = -1.0 + 2.0 * (j as f64 + 0.5) / n_diam as f64;
        pts.push(Complex64::new(0.0, rho_step * s));
    }
    let n_interior = m - 4 * k;
    let n_radii = 6;
    let n_theta = n_interior.div_ceil(n_radii);
    let mut placed = 0;
    'outer: for a in 0..n_radii {
        let r = rho_step * (a as f64 + 0.5) / n_radii as f64;
        for b in 0..n_theta {
            if placed >= n_interior {
                break 'outer;
            }
            let theta = std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (b as f64 + 0.5) / n_theta as f64;
            pts.push(Complex64::from_polar(r, theta));
            placed += 1;
        }
    }
    pts
}

/// Held-out verification grid: polar layout with fractional offsets so no
/// point coincides with the construction samples.
fn verification_samples(rho_step: f64, n: usize) -> Vec<Complex64> {
    let m = (n as f64).sqrt().ceil() as usize;
    let mut pts = Vec::with_capacity(n);
    'outer: for a in 0..m {
        let r = rho_step * (a as f64 + 0.37) / m as f64;
        for b in 0..m {
            if pts.len() >= n {
                break 'outer;
            }
            let theta =
                std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (b as f64 + 0.61) / m as f64;
            pts.push(Complex64::from_polar(r, theta));
        }
    }
    pts
}

/// One-step exactness residual of a weight vector at sample λ.
/// `w` is laid out [value_w; deriv_w; (new_deriv_w)] as in the solve.
fn stencil_residual(k: usize, w: &[f64], lam: Complex64, corrector: bool) -> f64 {
    let target = (lam * k as f64).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..k {
        let e = (lam * i as f64).exp();
        acc += w[i] * e + w[k + i] * lam * e;
    }
    if corrector {
        acc += w[2 * k] * lam * target;
    }
    (acc - target).norm()
}

/// Householder QR of the transpose of the p×n constraint matrix, giving the
/// minimum-norm particular solution of C w = d and an orthonormal basis Z of
/// the nullspace of C.
fn constraint_elimination(c_rows: &[Vec<f64>], d: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let p = c_rows.len();
    let n = c_rows[0].len();
    // Ct = n x p
    let mut ct = DMatrix::zeros(n, p);
    for (i, row) in c_rows.iter().enumerate() {
        for j in 0..n {
            ct[(j, i)] = row[j];
        }
    }
    // Householder vectors stored per column; R upper-triangular p x p
    let mut hh: Vec<DVector<f64>> = Vec::with_capacity(p);
    let mut r = DMatrix::zeros(p, p);
    for col in 0..p {
        let mut v = DVector::zeros(n);
        for i in col..n {
            v[i] = ct[(i, col)];
        }
        let alpha = -v[col].signum() * v.norm();
        v[col] -= alpha;
        let vnorm = v.norm();
        if vnorm > 0.0 {
            v /= vnorm;
        }
        // apply reflector to remaining columns of ct
        for j in col..p {
            let mut dot = 0.0;
            for i in col..n {
                dot += v[i] * ct[(i, j)];
            }
            for i in col..n {
                ct[(i, j)] -= 2.0 * dot * v[i];
            }
        }
        for i in 0..=col {
            r[(i, col)] = ct[(i, col)];
        }
        hh.push(v);
    }
    // particular solution: w0 = Q [R^{-T} d; 0]
    let mut y = DVector::zeros(p);
    for i in 0..p {
        let mut acc = d[i];
        for j in 0..i {
            acc -= r[(j, i)] * y[j];
        }
        y[i] = acc / r[(i, i)];
    }
    let mut w0 = DVector::zeros(n);
    for i in 0..p {
        w0[i] = y[i];
    }
    for col in (0..p).rev() {
        let v = &hh[col];
        let dot: f64 = v.dot(&w0);
        w0.axpy(-2.0 * dot, v, 1.0);
    }
    // nullspace basis: columns p..n of Q
    let mut z = DMatrix::zeros(n, n - p);
    for jz in 0..(n - p) {
        let mut col = DVector::zeros(n);
        col[p + jz] = 1.0;
        for c in (0..p).rev() {
            let v = &hh[c];
            let dot: f64 = v.dot(&col);
            col.axpy(-2.0 * dot, v, 1.0);
        }
        z.set_column(jz, &col);
    }
    (w0, z)
}

/// Truncated-SVD minimum-norm least squares: keep directions with
/// σ ≥ tol·σ_max, at most `rank` of them. Returns (solution, kept).
fn tsvd_solve(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64, rank: usize) -> (DVector<f64>, usize) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let vt = svd.v_t.as_ref().expect("svd with v_t");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());
    let smax = sv[order[0]];
    let mut x = DVector::zeros(a.ncols());
    let mut kept = 0;
    for &idx in &order {
        if kept >= rank || sv[idx] < tol * smax {
            break;
        }
        let ui = u.column(idx);
        let coef = ui.dot(b) / sv[idx];
        x.axpy(coef, &vt.row(idx).transpose(), 1.0);
        kept += 1;
    }
    (x, kept)
}

/// Rows enforcing exactness for t^j, j = 0..order-1, scaled by k^-j so the
/// elimination stays well conditioned.
fn consistency_rows(
    k: usize,
    n_unknowns: usize,
    corrector: bool,
    order: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rows = Vec::with_capacity(order);
    let mut d = Vec::with_capacity(order);
    let kf = k as f64;
    for j in 0..order {
        let mut row = vec![0.0; n_unknowns];
        let scale = kf.powi(j as i32).max(1.0);
        for (i, slot) in row.iter_mut().enumerate().take(k) {
            let base = (i as f64).powi(j as i32);
            *slot = if i == 0 && j == 0 { 1.0 } else { base } / scale;
        }
        if j >= 1 {
            for i in 0..k {
                let base = if i == 0 && j == 1 {
                    1.0
                } else {
                    (i as f64).powi(j as i32 - 1)
                };
                row[k + i] = j as f64 * base / scale;
            }
            if corrector {
                row[2 * k] = j as f64 * kf.powi(j as i32 - 1) / scale;
            }
        }
        rows.push(row);
        d.push(kf.powi(j as i32) / scale);
    }
    (rows, d)
}

fn solve_one(
    k: usize,
    lams: &[Complex64],
    rank: usize,
    svd_tol: f64,
    corrector: bool,
) -> (Vec<f64>, usize) {
    let n = 2 * k + usize::from(corrector);
    let rows = 2 * lams.len();
    let mut a = DMatrix::zeros(rows, n);
    let mut b = DVector::zeros(rows);
    for (j, &lam) in lams.iter().enumerate() {
        let target = (lam * k as f64).exp();
        for i in 0..k {
            let e = (lam * i as f64).exp();
            let de = lam * e;
            a[(2 * j, i)] = e.re;
            a[(2 * j + 1, i)] = e.im;
            a[(2 * j, k + i)] = de.re;
            a[(2 * j + 1, k + i)] = de.im;
        }
        if corrector {
            let dt = lam * target;
            a[(2 * j, 2 * k)] = dt.re;
            a[(2 * j + 1, 2 * k)] = dt.im;
        }
        b[2 * j] = target.re;
        b[2 * j + 1] = target.im;
    }
    let (c_rows, d) = consistency_rows(k, n, corrector, CONSISTENCY_ORDER);
    let (w0, z) = constraint_elimination(&c_rows, &d);
    let a_reduced = &a * &z;
    let b_reduced = &b - &a * &w0;
    let (y, kept) = tsvd_solve(&a_reduced, &b_reduced, svd_tol, rank);
    let w = w0 + z * y;
    (w.iter().copied().collect(), kept)
}

/// Build the predictor and corrector weights for a k-step stencil fitted to
/// exponentials over the semidisk of radius `rho` (in λ·k·dt units) with a
/// truncated-SVD least squares at tolerance `svd_tol`, keeping at most
/// `rank` singular directions.
///
/// Fails with [`Error::IllConditioned`] when the held-out residual exceeds
/// [`ILL_CONDITIONED_LIMIT`], which signals an incompatible (k, rho, rank).
pub fn build_exp_pc_coefficients(
    k: usize,
    rho: f64,
    rank: usize,
    svd_tol: f64,
) -> Result<ExpPcCoefficients> {
    if k < 2 {
        return Err(Error::InvalidConfig(
            "exponential stencil needs k >= 2".into(),
        ));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidConfig(
            "semidisk radius must be positive".into(),
        ));
    }
    if rank == 0 || rank > 2 * k {
        return Err(Error::InvalidConfig("rank must be in 1..=2k".into()));
    }
    if !(svd_tol.is_finite() && svd_tol > 0.0) {
        return Err(Error::InvalidConfig(
            "svd tolerance must be positive".into(),
        ));
    }
    let m = 10 * k;
    let rho_step = rho / k as f64;
    let lams = construction_samples(k, rho_step, m);
    let (wp, kept_p) = solve_one(k, &lams, rank, svd_tol, false);
    let (wc, kept_c) = solve_one(k, &lams, rank, svd_tol, true);
    let mut coeffs = ExpPcCoefficients {
        k,
        rho,
        rank,
        svd_tol,
        sampling_rule_version: SAMPLING_RULE_VERSION,
        consistency_order: CONSISTENCY_ORDER,
        m_samples: m,
        predictor_value_w: wp[..k].to_vec(),
        predictor_deriv_w: wp[k..2 * k].to_vec(),
        corrector_value_w: wc[..k].to_vec(),
        corrector_deriv_w: {
            // stored order: [new-point weight, historical oldest-first]
            let mut v = Vec::with_capacity(k + 1);
            v.push(wc[2 * k]);
            v.extend_from_slice(&wc[k..2 * k]);
            v
        },
        retained: (kept_p, kept_c),
        max_residual: 0.0,
    };
    let residual = verify_stencil_on_semidisk(&coeffs, 500);
    coeffs.max_residual = residual;
    if residual > ILL_CONDITIONED_LIMIT {
        return Err(Error::IllConditioned {
            residual,
            limit: ILL_CONDITIONED_LIMIT,
            k,
            rho,
            rank,
        });
    }
    Ok(coeffs)
}

/// Default construction: k = 22, ρ = 3.15, rank 18, SVD tolerance 1e-12.
pub fn default_coefficients() -> Result<ExpPcCoefficients> {
    build_exp_pc_coefficients(22, 3.15, 18, 1e-12)
}

/// Max one-step exactness residual of predictor and corrector over a fresh
/// semidisk grid of at least `grid_size` points (distinct from the
/// construction samples).
pub fn verify_stencil_on_semidisk(c: &ExpPcCoefficients, grid_size: usize) -> f64 {
    let rho_step = c.rho / c.k as f64;
    verify_on_radius(c, grid_size, rho_step)
}

/// Same verification on a grid of arbitrary radius (out-of-design checks).
pub fn verify_on_radius(c: &ExpPcCoefficients, grid_size: usize, rho_step: f64) -> f64 {
    let k = c.k;
    let mut wp = Vec::with_capacity(2 * k);
    wp.extend_from_slice(&c.predictor_value_w);
    wp.extend_from_slice(&c.predictor_deriv_w);
    let mut wc = Vec::with_capacity(2 * k + 1);
    wc.extend_from_slice(&c.corrector_value_w);
    wc.extend_from_slice(&c.corrector_deriv_w[1..]);
    wc.push(c.corrector_deriv_w[0]);
    let mut worst: f64 = 0.0;
    for lam in verification_samples(rho_step, grid_size) {
        worst = worst
            .max(stencil_residual(k, &wp, lam, false))
            .max(stencil_residual(k, &wc, lam, true));
    }
    worst
}

/// Serialize coefficients to the JSON document format.
pub fn save_coefficients(c: &ExpPcCoefficients, path: &Path) -> Result<()> {
    let doc =
        serde_json::to_string_pretty(c).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    std::fs::write(path, doc).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load a coefficient document, re-verify the stencil, and reject documents
/// whose recorded residual disagrees with the recomputed one.
pub fn load_coefficients(path: &Path) -> Result<ExpPcCoefficients> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let c: ExpPcCoefficients =
        serde_json::from_str(&text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    if c.predictor_value_w.len() != c.k
        || c.predictor_deriv_w.len() != c.k
        || c.corrector_value_w.len() != c.k
        || c.corrector_deriv_w.len() != c.k + 1
    {
        return Err(Error::MalformedDocument(
            "weight array lengths inconsistent with k".into(),
        ));
    }
    let recomputed = verify_stencil_on_semidisk(&c, 500);
    if (recomputed - c.max_residual).abs() > 1e-12 {
        return Err(Error::VerificationMismatch {
            recorded: c.max_residual,
            recomputed,
        });
    }
    Ok(c)
}
