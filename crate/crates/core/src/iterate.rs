//! Iterative computation of the canonical tight window.
//!
//! The scaled Newton iteration works on windows:
//! `g_{k+1} = (alpha_k g_k + beta_k gamma_k) / 2` with `gamma_k` the canonical
//! dual of `(g_k, a, b)`. Every iterate is `phi_k(S) g` for a positive `phi_k`,
//! so every iterate has the same canonical tight window, and the frame bound
//! ratio `A_k / B_k` climbs to 1 quadratically.
//!
//! Sherif's and Lakic's iterations instead compute `S^{-1/2}` as a matrix.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::canonical::{canonical_dual, Backend};
use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::linalg::{self, CMatrix};
use crate::operator::{self, FrameBounds, HermitianOperator};
use crate::signal::Signal;
use crate::zak;
use crate::C64;

/// Choice of `(alpha_k, beta_k)` in the Newton step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingRule {
    /// `alpha = beta = 1`.
    Unscaled,
    /// `alpha = 1 / ||g_k||`, `beta = 1 / ||gamma_k||`.
    Norm,
    /// `alpha = sqrt(||gamma_k|| / ||g_k||)`, `beta = 1 / alpha`; minimizes
    /// `||alpha g - gamma / alpha||`.
    Frobenius,
    /// `alpha = 1 / beta = (A_k B_k)^{-1/4}`; needs the frame bounds each step.
    Optimal,
}

impl ScalingRule {
    pub const ALL: [ScalingRule; 4] = [
        ScalingRule::Unscaled,
        ScalingRule::Norm,
        ScalingRule::Frobenius,
        ScalingRule::Optimal,
    ];
}

/// `(alpha, beta)` for one Newton step.
pub fn scaling_parameters(
    norm_g: f64,
    norm_dual: f64,
    bounds: Option<FrameBounds>,
    rule: ScalingRule,
) -> Result<(f64, f64)> {
    if !(norm_g > 0.0 && norm_dual > 0.0) {
        return Err(Error::ZeroNorm);
    }
    match rule {
        ScalingRule::Unscaled => Ok((1.0, 1.0)),
        ScalingRule::Norm => Ok((1.0 / norm_g, 1.0 / norm_dual)),
        ScalingRule::Frobenius => {
            let alpha = (norm_dual / norm_g).sqrt();
            Ok((alpha, 1.0 / alpha))
        }
        ScalingRule::Optimal => {
            let fb = bounds.ok_or(Error::InvalidArgument(
                "optimal scaling needs the frame bounds",
            ))?;
            if !(fb.lower > 0.0) {
                return Err(Error::NotAFrame {
                    lower: fb.lower,
                    upper: fb.upper,
                });
            }
            let alpha = (fb.lower * fb.upper).powf(-0.25);
            Ok((alpha, 1.0 / alpha))
        }
    }
}

/// How the iteration decides it is done.
#[derive(Debug, Clone, PartialEq)]
pub enum Stopping {
    /// Normalized error against a precomputed canonical tight window.
    Reference(Signal),
    /// Distance between successive normalized iterates.
    Successive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    pub rule: ScalingRule,
    pub tol: f64,
    pub max_iter: usize,
    /// Representation used for the dual window in each step.
    pub backend: Backend,
    pub stopping: Stopping,
    /// Compute `A_k, B_k` for every iterate (always done for `Optimal`).
    pub record_bounds: bool,
}

impl NewtonOptions {
    pub fn new(rule: ScalingRule) -> Self {
        NewtonOptions {
            rule,
            tol: 1e-12,
            max_iter: 50,
            backend: Backend::Zz,
            stopping: Stopping::Successive,
            record_bounds: true,
        }
    }
}

/// One row of an iteration trace. Missing quantities are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub error: f64,
    pub norm_g: f64,
    pub norm_dual: f64,
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    records: Vec<IterationRecord>,
    status: Status,
}

impl IterationTrace {
    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Number of steps taken (rows minus the initial one).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.error).collect()
    }

    pub fn final_error(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.error)
    }

    pub fn convergence_order(&self) -> Result<f64> {
        convergence_order(&self.errors())
    }

    /// Rows under [`TRACE_CSV_HEADER`], shortest round-trip scientific
    /// notation, one line each.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.iter, r.error, r.norm_g, r.norm_dual, r.lower, r.upper, r.ratio
            );
        }
        out
    }
}

pub const TRACE_CSV_HEADER: &str = "iter,error,norm_g,norm_dual,A_k,B_k,ratio";

/// Output of [`newton_tight`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonRun {
    /// Last iterate, a positive multiple of the canonical tight window.
    pub limit: Signal,
    /// The last iterate rescaled to `||h0||^2 = 1 / R`.
    pub tight: Signal,
    pub trace: IterationTrace,
}

impl NewtonRun {
    pub fn into_converged(self) -> Result<NewtonRun> {
        match self.trace.status {
            Status::Converged => Ok(self),
            Status::MaxIterations => Err(Error::NoConvergence {
                iterations: self.trace.iterations(),
                residual: self.trace.final_error(),
            }),
        }
    }
}

/// Runs the scaled Newton iteration until the stopping rule reports an error
/// below `tol`, or `max_iter` steps have been taken. The latter is not an
/// error here: the run comes back with [`Status::MaxIterations`].
pub fn newton_tight(sys: &GaborSystem, opts: &NewtonOptions) -> Result<NewtonRun> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let reference = match &opts.stopping {
        Stopping::Reference(h) => {
            sys.check_len(h)?;
            Some(h.normalized()?)
        }
        Stopping::Successive => None,
    };
    let need_bounds = opts.record_bounds || opts.rule == ScalingRule::Optimal;
    let mut records = Vec::new();
    let mut g = sys.window().clone();
    let mut previous: Option<Signal> = None;
    let mut status = Status::MaxIterations;
    for k in 0..=opts.max_iter {
        let current = sys.with_window(g.clone())?;
        let dual = canonical_dual(&current, opts.backend)?;
        let bounds = if need_bounds {
            Some(zak::zz_frame_bounds(&current).require_frame()?)
        } else {
            None
        };
        let unit = g.normalized()?;
        let error = match (&reference, &previous) {
            (Some(h), _) => unit.distance(h),
            (None, Some(prev)) => unit.distance(prev),
            (None, None) => f64::INFINITY,
        };
        let (norm_g, norm_dual) = (g.norm(), dual.norm());
        let (lower, upper) = bounds.map_or((f64::NAN, f64::NAN), |b| (b.lower, b.upper));
        records.push(IterationRecord {
            iter: k,
            error,
            norm_g,
            norm_dual,
            lower,
            upper,
            ratio: lower / upper,
        });
        if error <= opts.tol {
            status = Status::Converged;
            break;
        }
        if k == opts.max_iter {
            break;
        }
        let (alpha, beta) = scaling_parameters(norm_g, norm_dual, bounds, opts.rule)?;
        g = g.combine(0.5 * alpha, &dual, 0.5 * beta);
        previous = Some(unit);
    }
    let target = sys.lattice().inverse_redundancy().sqrt();
    let tight = g.scale_real(target / g.norm());
    Ok(NewtonRun {
        limit: g,
        tight,
        trace: IterationTrace { records, status },
    })
}

/// A single scaled Newton step `(alpha g + beta gamma) / 2`, duals and bounds
/// computed densely.
pub fn newton_step(sys: &GaborSystem, rule: ScalingRule) -> Result<Signal> {
    let dual = canonical_dual(sys, Backend::Dense)?;
    let bounds = match rule {
        ScalingRule::Optimal => Some(operator::frame_bounds_dense(sys)?),
        _ => None,
    };
    let g = sys.window();
    let (alpha, beta) = scaling_parameters(g.norm(), dual.norm(), bounds, rule)?;
    Ok(g.combine(0.5 * alpha, &dual, 0.5 * beta))
}

/// Matrix iterations for `M^{-1/2}` started at `M_0 = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvSqrtMethod {
    /// `M_{k+1} = 2 M_k (I + M M_k^2)^{-1}`, quadratic.
    Sherif,
    /// `M_{k+1} = M_k (I + 8 (I + 3 M M_k^2)^{-1}) / 3`, cubic.
    Lakic,
}

/// Result of an inverse square root iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct InvSqrtRun {
    pub matrix: HermitianOperator,
    /// `||X_k M X_k - I||_2` for `k = 0, 1, ...`.
    pub residuals: Vec<f64>,
}

impl InvSqrtRun {
    pub fn iterations(&self) -> usize {
        self.residuals.len().saturating_sub(1)
    }
}

fn hermitian_part(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// One step in coupled form: `Y_k = M X_k^2` is carried along and updated
/// through its own rational recursion, so `X_k` and `Y_k` stay functions of
/// `M` in floating point.
fn inv_sqrt_step(x: &CMatrix, y: &CMatrix, method: InvSqrtMethod) -> Result<(CMatrix, CMatrix)> {
    let n = x.nrows();
    let id = CMatrix::identity(n, n);
    let inner = match method {
        InvSqrtMethod::Sherif => &id + y,
        InvSqrtMethod::Lakic => &id + y * C64::new(3.0, 0.0),
    };
    let inv = hermitian_part(inner)
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::InvalidArgument("iteration left the positive cone"))?;
    let factor = match method {
        InvSqrtMethod::Sherif => inv * C64::new(2.0, 0.0),
        InvSqrtMethod::Lakic => (&id + inv * C64::new(8.0, 0.0)) * C64::new(1.0 / 3.0, 0.0),
    };
    let factor = hermitian_part(factor);
    let next_x = hermitian_part(x * &factor);
    let next_y = hermitian_part(&factor * y * &factor);
    Ok((next_x, next_y))
}

fn inv_sqrt_residual(m: &CMatrix, x: &CMatrix) -> f64 {
    let n = m.nrows();
    linalg::hermitian_spectral_norm(&(x * m * x - CMatrix::identity(n, n)))
}

fn inv_sqrt_with<F>(
    m: &HermitianOperator,
    method: InvSqrtMethod,
    tol: f64,
    max_iter: usize,
    mut observe: F,
) -> Result<InvSqrtRun>
where
    F: FnMut(&CMatrix) -> Result<bool>,
{
    let mat = m.matrix();
    let n = m.dim();
    let mut x = CMatrix::identity(n, n);
    let mut y = mat.clone();
    let mut residuals = Vec::new();
    for k in 0..=max_iter {
        let residual = inv_sqrt_residual(mat, &x);
        residuals.push(residual);
        let done = observe(&x)?;
        if done || residual <= tol {
            return Ok(InvSqrtRun {
                matrix: HermitianOperator::from_raw(x),
                residuals,
            });
        }
        if k == max_iter || !residual.is_finite() {
            return Err(Error::NoConvergence {
                iterations: k,
                residual,
            });
        }
        (x, y) = inv_sqrt_step(&x, &y, method)?;
    }
    unreachable!()
}

/// `M^{-1/2}` by Sherif's iteration; stops when `||X M X - I||_2 <= tol`.
pub fn sherif_inv_sqrt(m: &HermitianOperator, tol: f64, max_iter: usize) -> Result<InvSqrtRun> {
    inv_sqrt_with(m, InvSqrtMethod::Sherif, tol, max_iter, |_| Ok(false))
}

/// `M^{-1/2}` by Lakic's iteration; stops when `||X M X - I||_2 <= tol`.
pub fn lakic_inv_sqrt(m: &HermitianOperator, tol: f64, max_iter: usize) -> Result<InvSqrtRun> {
    inv_sqrt_with(m, InvSqrtMethod::Lakic, tol, max_iter, |_| Ok(false))
}

/// Canonical tight window `X g` from an iterated `X = S^{-1/2}`, together with
/// a trace in the same format as the Newton trace.
#[derive(Debug, Clone, PartialEq)]
pub struct InvSqrtTight {
    pub tight: Signal,
    pub trace: IterationTrace,
}

/// Computes `h0 = S^{-1/2} g` with Sherif's or Lakic's iteration applied to
/// `S / c`, `c = (A + B) / 2`, and rescales by `c^{-1/2}` at the end.
///
/// With [`Stopping::Reference`] the iteration stops on the normalized error of
/// the window iterate, otherwise on the matrix residual `||X M X - I||_2`.
pub fn tight_via_inv_sqrt(
    sys: &GaborSystem,
    method: InvSqrtMethod,
    tol: f64,
    max_iter: usize,
    stopping: &Stopping,
) -> Result<InvSqrtTight> {
    let s = operator::dense(sys);
    let (lower, upper) = s.spectral_bounds();
    FrameBounds { lower, upper }.require_frame()?;
    let c = 0.5 * (lower + upper);
    let scaled = HermitianOperator::from_raw(s.matrix() * C64::new(1.0 / c, 0.0));
    let g = linalg::to_vector(sys.window());
    let reference = match stopping {
        Stopping::Reference(h) => Some(h.normalized()?),
        Stopping::Successive => None,
    };
    let mut records = Vec::new();
    let mut previous: Option<Signal> = None;
    let run = inv_sqrt_with(&scaled, method, f64::MIN_POSITIVE, max_iter, |x| {
        let h = linalg::to_signal(&(x * &g)).scale_real(1.0 / c.sqrt());
        // frame operator of (X g, a, b) is X S X / c
        let sk = x * s.matrix() * x * C64::new(1.0 / c, 0.0);
        let e = linalg::hermitian_eigen(&sk);
        let dual = e.apply(|v| 1.0 / v, &linalg::to_vector(&h))?;
        let unit = h.normalized()?;
        let error = match (&reference, &previous) {
            (Some(r), _) => unit.distance(r),
            (None, Some(p)) => unit.distance(p),
            (None, None) => f64::INFINITY,
        };
        records.push(IterationRecord {
            iter: records.len(),
            error,
            norm_g: h.norm(),
            norm_dual: dual.norm(),
            lower: e.min(),
            upper: e.max(),
            ratio: e.min() / e.max(),
        });
        previous = Some(unit);
        let done = match reference {
            Some(_) => error <= tol,
            None => inv_sqrt_residual(scaled.matrix(), x) <= tol,
        };
        Ok(done)
    })?;
    let tight = linalg::to_signal(&(run.matrix.matrix() * &g)).scale_real(1.0 / c.sqrt());
    Ok(InvSqrtTight {
        tight,
        trace: IterationTrace {
            records,
            status: Status::Converged,
        },
    })
}

/// Lower edge of the window used by [`convergence_order`].
pub const ORDER_WINDOW_LOW: f64 = 1e-13;
/// Upper edge of the window used by [`convergence_order`].
pub const ORDER_WINDOW_HIGH: f64 = 1e-1;

/// Least-squares slope of `ln e_{k+1}` against `ln e_k`, over the pairs whose
/// later error lies in `(1e-13, 1e-1)`. At least two pairs are required.
pub fn convergence_order(errors: &[f64]) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = errors
        .windows(2)
        .filter(|w| {
            let (x, y) = (w[0], w[1]);
            x.is_finite() && x > 0.0 && y > ORDER_WINDOW_LOW && y < ORDER_WINDOW_HIGH
        })
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::TooFewPoints {
            found: pairs.len(),
            needed: 2,
        });
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("degenerate error sequence"));
    }
    Ok(sxy / sxx)
}

/// `C_k` from `C_j = 4 C_{j-1} / (1 + C_{j-1})^2`; with `C_0 = A / B` it is a
/// lower bound for `A_k / B_k` under norm scaling.
pub fn ratio_recursion(c0: f64, k: usize) -> Result<f64> {
    if !(c0 > 0.0 && c0 <= 1.0) {
        return Err(Error::InvalidArgument("C_0 must lie in (0, 1]"));
    }
    let mut c = c0;
    for _ in 0..k {
        c = (4.0 * c / ((1.0 + c) * (1.0 + c))).min(1.0);
    }
    Ok(c)
}

/// Envelope for the frame bounds after one norm-scaled step.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionBounds {
    /// `R 2 sqrt(AB) / (A + B)`.
    pub a1_lower: f64,
    /// `R (A + B)^2 / (4 A B)`.
    pub b1_upper: f64,
    /// `C_0 = A / B, C_1, ...` until the sequence stops increasing in double
    /// precision (at most 64 terms).
    pub ratio_sequence: Vec<f64>,
}

pub fn bound_recursion_envelope(lower: f64, upper: f64, redundancy: f64) -> Result<RecursionBounds> {
    if !(lower > 0.0 && lower <= upper) {
        return Err(Error::InvalidArgument("need 0 < A <= B"));
    }
    let (a, b) = (lower, upper);
    let mut seq = Vec::new();
    let mut c = a / b;
    seq.push(c);
    while c < 1.0 && seq.len() < 64 {
        let next = (4.0 * c / ((1.0 + c) * (1.0 + c))).min(1.0);
        if next <= c {
            break;
        }
        c = next;
        seq.push(c);
    }
    Ok(RecursionBounds {
        a1_lower: redundancy * 2.0 * (a * b).sqrt() / (a + b),
        b1_upper: redundancy * (a + b) * (a + b) / (4.0 * a * b),
        ratio_sequence: seq,
    })
}
