//! Matrix-free conjugate gradients for Hermitian positive definite operators.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Solves `A x = rhs` for Hermitian positive definite `A` given as a closure.
///
/// Stops when `||r|| <= tol ||rhs||`. Returns [`Error::NotAFrame`] when a
/// search direction has non-positive curvature.
pub(crate) fn solve<F>(apply: F, rhs: &Signal, tol: f64, max_iter: usize) -> Result<Signal>
where
    F: Fn(&Signal) -> Result<Signal>,
{
    let b_norm = rhs.norm();
    let mut x = Signal::zeros(rhs.len());
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.norm_sqr();
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let ap = apply(&p)?;
        let curvature = p.inner(&ap).re;
        if !(curvature > 0.0) {
            return Err(Error::NotAFrame {
                lower: curvature / p.norm_sqr(),
                upper: f64::NAN,
            });
        }
        let alpha = rr / curvature;
        x = x.combine(1.0, &p, alpha);
        r = r.combine(1.0, &ap, -alpha);
        let rr_next = r.norm_sqr();
        p = r.combine(1.0, &p, rr_next / rr);
        rr = rr_next;
    }
    // stagnation near round-off still counts as a solution
    let residual = rr.sqrt() / b_norm;
    if residual <= 1e3 * tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual,
        })
    }
}
