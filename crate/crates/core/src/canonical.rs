//! Canonical dual window `S^{-1} g`, canonical tight window `S^{-1/2} g`, and
//! the nearest (not necessarily normalized) tight window.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::cg;
use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::iterate::{self, NewtonOptions, ScalingRule, Stopping};
use crate::lattice::Lattice;
use crate::linalg;
use crate::operator::{self, FrameBounds};
use crate::signal::Signal;
use crate::zak;

/// How the frame operator is represented when computing canonical windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Dense `L x L` eigendecomposition.
    Dense,
    /// Zibulski-Zeevi `p x p` blocks.
    Zz,
    /// Matrix-free: conjugate gradients on the Janssen representation for
    /// duals, and the norm-scaled Newton iteration on top of those for tight
    /// windows. No matrix is ever formed.
    ConjugateGradientFree,
}

impl Backend {
    /// Dense up to `L = 512`, blocks above.
    pub fn auto(lat: &Lattice) -> Backend {
        if lat.len() <= 512 {
            Backend::Dense
        } else {
            Backend::Zz
        }
    }
}

const CG_TOL: f64 = 1e-14;

fn dense_eigen(sys: &GaborSystem) -> Result<linalg::Eigen> {
    let e = linalg::hermitian_eigen(operator::dense(sys).matrix());
    FrameBounds {
        lower: e.min(),
        upper: e.max(),
    }
    .require_frame()?;
    Ok(e)
}

fn spectral<F: Fn(f64) -> f64>(sys: &GaborSystem, backend: Backend, phi: F) -> Result<Signal> {
    let g = sys.window();
    match backend {
        Backend::Dense => {
            let e = dense_eigen(sys)?;
            Ok(linalg::to_signal(&e.apply(phi, &linalg::to_vector(g))?))
        }
        Backend::Zz => {
            zak::zz_frame_bounds(sys).require_frame()?;
            zak::zz_apply_phi(sys, g, phi)
        }
        Backend::ConjugateGradientFree => unreachable!("handled by caller"),
    }
}

/// `gamma0 = S^{-1} g`.
pub fn canonical_dual(sys: &GaborSystem, backend: Backend) -> Result<Signal> {
    match backend {
        Backend::ConjugateGradientFree => {
            let g = sys.window();
            if g.norm() == 0.0 {
                return Err(Error::NotAFrame {
                    lower: 0.0,
                    upper: 0.0,
                });
            }
            let coeffs = operator::janssen_coefficients(sys);
            cg::solve(
                |x| operator::apply_janssen(sys, &coeffs, x),
                g,
                CG_TOL,
                10 * sys.lattice().len(),
            )
        }
        _ => spectral(sys, backend, |s| 1.0 / s),
    }
}

/// `h0 = S^{-1/2} g`; `(h0, a, b)` is a normalized tight frame.
pub fn canonical_tight(sys: &GaborSystem, backend: Backend) -> Result<Signal> {
    match backend {
        Backend::ConjugateGradientFree => {
            let opts = NewtonOptions {
                rule: ScalingRule::Norm,
                tol: 1e-13,
                max_iter: 50,
                backend: Backend::ConjugateGradientFree,
                stopping: Stopping::Successive,
                record_bounds: false,
            };
            let run = iterate::newton_tight(sys, &opts)?;
            run.into_converged().map(|r| r.tight)
        }
        _ => spectral(sys, backend, |s| 1.0 / s.sqrt()),
    }
}

/// `(<h0, g> / <h0, h0>) h0`: the closest window to `g` among all tight
/// windows of any frame bound.
pub fn nearest_tight_scaled(sys: &GaborSystem) -> Result<Signal> {
    let h0 = canonical_tight(sys, Backend::auto(sys.lattice()))?;
    let c = h0.inner(sys.window()) / h0.norm_sqr();
    Ok(h0.scale(c))
}

/// The three quantities that coincide for every frame:
/// `<g, S^{-1} g> = ||h0||^2 = 1 / R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIdentity {
    pub dual_pairing: f64,
    pub tight_norm_sqr: f64,
    pub inverse_redundancy: f64,
}

impl NormIdentity {
    /// Largest pairwise discrepancy of the three values.
    pub fn defect(&self) -> f64 {
        let NormIdentity {
            dual_pairing: x,
            tight_norm_sqr: y,
            inverse_redundancy: z,
        } = *self;
        (x - y).abs().max((x - z).abs()).max((y - z).abs())
    }
}

pub fn norm_identity(sys: &GaborSystem) -> Result<NormIdentity> {
    let e = dense_eigen(sys)?;
    let g = linalg::to_vector(sys.window());
    let dual = e.apply(|s| 1.0 / s, &g)?;
    let tight = e.apply(|s| 1.0 / s.sqrt(), &g)?;
    Ok(NormIdentity {
        dual_pairing: g.dotc(&dual).re,
        tight_norm_sqr: tight.norm_squared(),
        inverse_redundancy: sys.lattice().inverse_redundancy(),
    })
}
