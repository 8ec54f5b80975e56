//! Central-cut ellipsoid geometry.
//!
//! An [`EllipsoidState`] is `{theta : (theta - c)^T Q^{-1} (theta - c) <= 1}`.
//! A central cut keeps the half `{g^T (theta - c) >= 0}` and replaces the
//! ellipsoid by the minimum-volume ellipsoid enclosing that half, which shrinks
//! the volume by at least `exp(-1 / (2(d + 1)))`.

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack on the containment test.
pub const CONTAINS_TOL: f64 = 1e-9;
/// Cut directions with a smaller Euclidean norm carry no information.
pub const CUT_DEGENERACY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidState {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    log_det: f64,
    log_volume_offset: f64,
}

/// One applied cut, as written to run logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRecord {
    pub round: usize,
    pub cut_vector: Vec<f64>,
    pub center: Vec<f64>,
    pub log_volume: f64,
}

/// `ln` of the volume of the unit Euclidean ball in `d` dimensions.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    // ln Gamma(d/2 + 1) by the recurrence from Gamma(1) or Gamma(1/2)
    let half_pi_ln = 0.5 * std::f64::consts::PI.ln();
    let mut ln_gamma = if d.is_multiple_of(2) { 0.0 } else { half_pi_ln };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    let target = d as f64 / 2.0 + 1.0;
    while x < target - 0.25 {
        ln_gamma += x.ln();
        x += 1.0;
    }
    d as f64 * half_pi_ln - ln_gamma
}

fn factor(shape: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(shape.clone()).ok_or(Error::NotPositiveDefinite)
}

fn log_det_of(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
}

impl EllipsoidState {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if d < 2 {
            return Err(Error::InvalidInput(format!(
                "ellipsoid dimension must be >= 2, got {d}"
            )));
        }
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::InvalidInput("shape matrix size mismatch".into()));
        }
        if (&shape - shape.transpose()).amax() > 1e-10 * shape.amax().max(1.0) {
            return Err(Error::InvalidInput("shape matrix is not symmetric".into()));
        }
        let log_det = log_det_of(&factor(&shape)?);
        Ok(EllipsoidState {
            center: DVector::from_vec(center),
            shape,
            log_det,
            log_volume_offset: 0.0,
        })
    }

    /// Minimum-volume ellipsoid around `[-1, 1]^d`: the ball of radius `sqrt(d)`.
    pub fn init_box(d: usize) -> Result<Self> {
        EllipsoidState::new(vec![0.0; d], DMatrix::identity(d, d) * d as f64)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        self.center.as_slice()
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `ln det Q`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `ln vol`.
    pub fn log_volume(&self) -> f64 {
        ln_unit_ball_volume(self.dim()) + 0.5 * self.log_det
    }

    /// Log-volume change accumulated over all cuts (non-positive).
    pub fn log_volume_offset(&self) -> f64 {
        self.log_volume_offset
    }

    /// `(theta - c)^T Q^{-1} (theta - c)`.
    pub fn mahalanobis_sq(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.dim() {
            return Err(Error::InvalidInput("point dimension mismatch".into()));
        }
        let diff = DVector::from_column_slice(theta) - &self.center;
        let chol = factor(&self.shape)?;
        Ok(diff.dot(&chol.solve(&diff)))
    }

    pub fn contains(&self, theta: &[f64]) -> Result<bool> {
        Ok(self.mahalanobis_sq(theta)? <= 1.0 + CONTAINS_TOL)
    }

    /// Minimum-volume ellipsoid of `{theta in E : g^T (theta - c) >= 0}`.
    pub fn central_cut(&self, g: &[f64]) -> Result<EllipsoidState> {
        let d = self.dim();
        if g.len() != d {
            return Err(Error::InvalidInput("cut dimension mismatch".into()));
        }
        let g = DVector::from_column_slice(g);
        let norm = g.norm();
        if !(norm > CUT_DEGENERACY_FLOOR) {
            return Err(Error::DegenerateCut { norm });
        }
        let g = g / norm;
        let qg = &self.shape * &g;
        let gqg = g.dot(&qg);
        if !(gqg > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let b = qg / gqg.sqrt();
        let df = d as f64;
        let center = &self.center + &b * (1.0 / (df + 1.0));
        let mut shape = (&self.shape - (&b * b.transpose()) * (2.0 / (df + 1.0)))
            * (df * df / (df * df - 1.0));
        shape = (&shape + shape.transpose()) * 0.5;
        let log_det = log_det_of(&factor(&shape)?);
        Ok(EllipsoidState {
            center,
            shape,
            log_volume_offset: self.log_volume_offset + 0.5 * (log_det - self.log_det),
            log_det,
        })
    }

    /// One clamping cut: if the center leaves `[-1, 1]^d`, cuts along the
    /// coordinate farthest outside, keeping the side that contains the box.
    pub fn clamp_step(&self) -> Result<Option<EllipsoidState>> {
        let (j, cj) = self
            .center
            .iter()
            .cloned()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1.abs() { (i, v) } else { acc });
        if cj.abs() <= 1.0 {
            return Ok(None);
        }
        let mut g = vec![0.0; self.dim()];
        g[j] = -cj.signum();
        self.central_cut(&g).map(Some)
    }

    /// Applies [`EllipsoidState::clamp_step`] until the center is in the box.
    /// Returns the new state and the number of cuts made.
    pub fn clamp_center(&self, epsilon: f64) -> Result<(EllipsoidState, usize)> {
        let (state, drops) = self.clamp_center_logged(epsilon)?;
        Ok((state, drops.len()))
    }

    /// As [`EllipsoidState::clamp_center`], returning each cut's log-volume drop.
    pub fn clamp_center_logged(&self, epsilon: f64) -> Result<(EllipsoidState, Vec<f64>)> {
        let d = self.dim() as f64;
        let cap = (10.0 * d * (1.0 / epsilon.min(0.5)).ln()).ceil() as usize;
        let mut state = self.clone();
        let mut drops = Vec::new();
        while let Some(next) = state.clamp_step()? {
            if drops.len() >= cap {
                return Err(Error::Numerical(format!(
                    "center clamping exceeded {cap} cuts"
                )));
            }
            drops.push(state.log_volume() - next.log_volume());
            state = next;
        }
        Ok((state, drops))
    }

    /// Uniform sample from the ellipsoid's interior.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let d = self.dim();
        let chol = factor(&self.shape)?;
        // direction from rejection in the cube, radius by inverse CDF
        let u = loop {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if n2 > 1e-12 && n2 <= 1.0 {
                let r = rng.random::<f64>().powf(1.0 / d as f64) / n2.sqrt();
                break DVector::from_vec(v) * r;
            }
        };
        Ok((&self.center + chol.l() * u).iter().cloned().collect())
    }
}

/// Applies a cut, logging and skipping it when the direction is degenerate.
/// Returns `None` when skipped.
pub fn cut_or_skip(state: &EllipsoidState, g: &[f64]) -> Result<Option<EllipsoidState>> {
    match state.central_cut(g) {
        Ok(next) => Ok(Some(next)),
        Err(Error::DegenerateCut { norm }) => {
            warn!("skipping degenerate cut with norm {norm:e}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}
