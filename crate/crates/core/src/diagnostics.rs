//! Numerical witnesses: tightness residuals, the nearest/farthest tight window
//! inequality, the Kantorovich inequality, finite sections of banded
//! operators and the two-valued Zak windows that make the one-step frame
//! bound estimates sharp.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{canonical_tight, Backend};
use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::iterate::{self, ScalingRule};
use crate::lattice::Lattice;
use crate::linalg;
use crate::operator::{self, HermitianOperator};
use crate::signal::Signal;
use crate::zak::{self, ZakArray};
use crate::C64;

/// Slack allowed in the three-distance comparison.
pub const MINIMALITY_SLACK: f64 = 1e-10;
/// Largest `||S_h - I||_2` accepted for a competitor.
pub const COMPETITOR_TIGHTNESS: f64 = 1e-8;

/// `||S_h - I||_2`, with `S_h` built densely.
pub fn tightness_residual(h: &Signal, lat: &Lattice) -> Result<f64> {
    let sys = GaborSystem::new(h.clone(), *lat)?;
    let s = operator::dense(&sys);
    Ok(s.sub(&HermitianOperator::identity(lat.len())).spectral_norm())
}

/// Distances from `g` to its canonical tight window, to a competitor and to
/// the negated canonical tight window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalityReport {
    pub d_lower: f64,
    pub d_competitor: f64,
    pub d_upper: f64,
    pub pass: bool,
}

impl MinimalityReport {
    pub fn new(d_lower: f64, d_competitor: f64, d_upper: f64) -> Self {
        MinimalityReport {
            d_lower,
            d_competitor,
            d_upper,
            pass: d_lower <= d_competitor + MINIMALITY_SLACK
                && d_competitor <= d_upper + MINIMALITY_SLACK,
        }
    }
}

/// Compares `||g - h0||`, `||g - h||` and `||g + h0||` for a normalized tight
/// competitor `h`.
pub fn minimality_gap(g: &Signal, h: &Signal, lat: &Lattice) -> Result<MinimalityReport> {
    let sys = GaborSystem::new(g.clone(), *lat)?;
    let h0 = canonical_tight(&sys, Backend::Dense)?;
    minimality_gap_with(g, &h0, h, lat)
}

/// [`minimality_gap`] with a precomputed canonical tight window.
pub fn minimality_gap_with(
    g: &Signal,
    h0: &Signal,
    h: &Signal,
    lat: &Lattice,
) -> Result<MinimalityReport> {
    let residual = tightness_residual(h, lat)?;
    if !(residual <= COMPETITOR_TIGHTNESS) {
        return Err(Error::NotTight { residual });
    }
    let minus = h0.scale_real(-1.0);
    Ok(MinimalityReport::new(
        g.distance(h0),
        g.distance(h),
        g.distance(&minus),
    ))
}

/// A normalized tight window on `lat`: the canonical tight window of a
/// seeded random window.
pub fn random_tight_competitor(lat: &Lattice, seed: u64) -> Result<Signal> {
    let sys = GaborSystem::new(Signal::random(lat, seed), *lat)?;
    canonical_tight(&sys, Backend::Zz)
}

/// `(lhs, rhs)` with `lhs = <M^{-1} f, f> / (||f|| ||M^{-1} f||)` and
/// `rhs = 2 sqrt(AB) / (A + B)`.
pub fn kantorovich_check(
    m: &HermitianOperator,
    f: &Signal,
    lower: f64,
    upper: f64,
) -> Result<(f64, f64)> {
    if f.len() != m.dim() {
        return Err(Error::LengthMismatch {
            expected: m.dim(),
            found: f.len(),
        });
    }
    if f.norm() == 0.0 {
        return Err(Error::ZeroNorm);
    }
    if !(lower > 0.0 && lower <= upper) {
        return Err(Error::InvalidArgument("need 0 < A <= B"));
    }
    let inv = m.apply_function(|s| 1.0 / s, f)?;
    let lhs = inv.inner(f).re / (f.norm() * inv.norm());
    let rhs = 2.0 * (lower * upper).sqrt() / (lower + upper);
    Ok((lhs, rhs))
}

/// Errors `||T_N^{-1/2} x_N - (T^{-1/2} x)_N||` of the central sections of
/// size `2N + 1` for each `N` in `sizes`.
pub fn finite_section_convergence(
    t: &HermitianOperator,
    sizes: &[usize],
    probe: &Signal,
) -> Result<Vec<f64>> {
    let dim = t.dim();
    if probe.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: probe.len(),
        });
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("section sizes must increase"));
    }
    let center = dim / 2;
    let full = t.apply_function(|s| 1.0 / s.sqrt(), probe)?;
    sizes
        .iter()
        .map(|&n| {
            if n > center || center + n >= dim {
                return Err(Error::InvalidArgument("section larger than the operator"));
            }
            let start = center - n;
            let size = 2 * n + 1;
            let section = t.section(start, size);
            let local = Signal::new(probe.as_slice()[start..start + size].to_vec());
            let approx = section.apply_function(|s| 1.0 / s.sqrt(), &local)?;
            let exact = Signal::new(full.as_slice()[start..start + size].to_vec());
            Ok(approx.distance(&exact))
        })
        .collect()
}

/// Tridiagonal Toeplitz operator with constant `diag` and `off` bands.
pub fn tridiagonal_toeplitz(dim: usize, diag: f64, off: f64) -> HermitianOperator {
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(diag, 0.0)
        } else if i.abs_diff(j) == 1 {
            C64::new(off, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    HermitianOperator::from_raw(m)
}

/// Window on a critically sampled lattice whose Zak transform (with
/// `lambda = a`) is `sqrt(B / L)` on the first `round(t L)` grid cells in
/// raster order and `sqrt(A / L)` on the rest. Its frame operator has
/// eigenvalue `B` on the first set and `A` on the second.
pub fn two_valued_zak_window(lower: f64, upper: f64, t_frac: f64, lat: &Lattice) -> Result<Signal> {
    if !lat.is_critical() {
        return Err(Error::NotCriticallySampled {
            p: lat.p(),
            q: lat.q(),
        });
    }
    if !(lower > 0.0 && lower <= upper) {
        return Err(Error::InvalidArgument("need 0 < A <= B"));
    }
    if !(0.0..=1.0).contains(&t_frac) {
        return Err(Error::InvalidArgument("fraction must lie in [0, 1]"));
    }
    let len = lat.len();
    let cells = (t_frac * len as f64 + 0.5) as usize;
    let hi = C64::new((upper / len as f64).sqrt(), 0.0);
    let lo = C64::new((lower / len as f64).sqrt(), 0.0);
    let values = (0..len).map(|i| if i < cells { hi } else { lo }).collect();
    let z = ZakArray::from_values(lat.a(), len / lat.a(), values)?;
    Ok(zak::zak_inverse(&z))
}

/// Difference of the two Zak values of the norm-scaled first iterate of a
/// two-valued window, in the scaling where the Zak modulus of the window is
/// `sqrt(A)` or `sqrt(B)`. Returns `(measured, second order prediction)`.
pub fn two_valued_step_difference(
    lower: f64,
    upper: f64,
    t_frac: f64,
    lat: &Lattice,
) -> Result<(f64, f64)> {
    let g = two_valued_zak_window(lower, upper, t_frac, lat)?;
    let sys = GaborSystem::new(g, *lat)?;
    let g1 = iterate::newton_step(&sys, ScalingRule::Norm)?;
    let z = zak::zak_forward(&g1, lat.a())?;
    let len = lat.len();
    let cells = (t_frac * len as f64 + 0.5) as usize;
    if cells == 0 || cells == len {
        return Err(Error::InvalidArgument("fraction leaves one value class empty"));
    }
    let scale = (len as f64).sqrt();
    let measured = scale * (z.as_slice()[0].norm() - z.as_slice()[len - 1].norm());
    let t = cells as f64 / len as f64;
    let predicted =
        (1.0 - 2.0 * t) * (upper.sqrt() - lower.sqrt()).powi(2) / (2.0 * (lower * upper).sqrt());
    Ok((measured, predicted))
}

/// Random positive definite matrix with spectrum in `[lower, upper]`; both
/// endpoints are eigenvalues when `dim >= 2`.
pub fn random_spd(dim: usize, lower: f64, upper: f64, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let q = raw.qr().q();
    let values: Vec<f64> = (0..dim)
        .map(|i| match i {
            0 => lower,
            1 => upper,
            _ => rng.gen_range(lower..=upper),
        })
        .collect();
    let mut scaled = q.clone();
    for (c, v) in values.iter().enumerate() {
        for r in 0..dim {
            scaled[(r, c)] *= *v;
        }
    }
    let m = &scaled * q.adjoint();
    HermitianOperator::from_raw((&m + m.adjoint()) * C64::new(0.5, 0.0))
}

/// Replaces `g` by `psi(S) g` so that the new frame operator `S psi(S)^2` has
/// the geometric mean of its extreme eigenvalues in its spectrum. The
/// canonical tight window is unchanged. The median eigenvalue is kept and
/// everything above it is stretched by a power law.
pub fn with_geometric_mean_in_spectrum(sys: &GaborSystem) -> Result<GaborSystem> {
    let s = operator::dense(sys);
    let values = s.eigenvalues();
    let (min, max) = (values[0], values[values.len() - 1]);
    operator::FrameBounds {
        lower: min,
        upper: max,
    }
    .require_frame()?;
    let pivot = values[values.len() / 2];
    if !(pivot > min && pivot < max) {
        return Err(Error::InvalidArgument("spectrum has no interior eigenvalue"));
    }
    let gamma = (pivot / min).ln() / (max / pivot).ln();
    let target = move |x: f64| {
        if x <= pivot {
            x
        } else {
            pivot * (x / pivot).powf(gamma)
        }
    };
    let g = s.apply_function(|x| (target(x) / x).sqrt(), sys.window())?;
    sys.with_window(g)
}

/// Unit-normalized distance between two windows.
pub fn normalized_distance(x: &Signal, y: &Signal) -> Result<f64> {
    Ok(x.normalized()?.distance(&y.normalized()?))
}

/// Eigen-oracle for `phi(S) g` against the block route; relative error.
pub fn functional_calculus_defect<F: Fn(f64) -> f64 + Copy>(
    sys: &GaborSystem,
    phi: F,
) -> Result<f64> {
    let dense = operator::apply_phi(sys, sys.window(), phi)?;
    let blocks = zak::zz_apply_phi(sys, sys.window(), phi)?;
    Ok(blocks.distance(&dense) / dense.norm())
}

/// `(min, max)` of `s phi(s)^2` over the spectrum of `S`, next to the frame
/// bounds of `(phi(S) g, a, b)` computed from scratch.
pub fn frame_bound_image<F: Fn(f64) -> f64 + Copy>(
    sys: &GaborSystem,
    phi: F,
) -> Result<((f64, f64), (f64, f64))> {
    let values = linalg::hermitian_eigen(operator::dense(sys).matrix()).values;
    let image: Vec<f64> = values.iter().map(|&s| s * phi(s) * phi(s)).collect();
    let lo = image.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = image.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mapped = sys.with_window(operator::apply_phi(sys, sys.window(), phi)?)?;
    let fb = operator::frame_bounds_dense(&mapped)?;
    Ok(((lo, hi), (fb.lower, fb.upper)))
}
