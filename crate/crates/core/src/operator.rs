//! The Gabor frame operator `S f = sum_{n,m} <f, g_{n,m}> g_{n,m}`.
//!
//! Three independent routes are provided: the naive synthesis-of-analysis
//! product, the dense Walnut matrix, and the Janssen representation over the
//! adjoint lattice. The eigendecomposition of the dense matrix is the
//! reference functional calculus for everything else in the crate.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::lattice::Lattice;
use crate::linalg::{self, CMatrix};
use crate::signal::Signal;
use crate::C64;

/// Relative threshold below which the lower frame bound counts as zero.
pub const NOT_A_FRAME_THRESHOLD: f64 = 1e-12;

/// A dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Wraps `matrix`, rejecting non-square input or a Hermitian defect
    /// above `1e-12` relative to the largest entry.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidArgument("matrix is not square"));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if linalg::hermitian_defect(&matrix) > 1e-12 * scale {
            return Err(Error::InvalidArgument("matrix is not Hermitian"));
        }
        Ok(HermitianOperator { matrix })
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        HermitianOperator { matrix }
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator {
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        HermitianOperator {
            matrix: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(values[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, f: &Signal) -> Signal {
        linalg::to_signal(&(&self.matrix * linalg::to_vector(f)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).values
    }

    /// Smallest and largest eigenvalue.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let e = linalg::hermitian_eigen(&self.matrix);
        (e.min(), e.max())
    }

    /// `max |lambda|`.
    pub fn spectral_norm(&self) -> f64 {
        linalg::hermitian_spectral_norm(&self.matrix)
    }

    /// `phi(self)` through the eigendecomposition.
    pub fn map_spectrum<F: Fn(f64) -> f64>(&self, phi: F) -> Result<HermitianOperator> {
        let e = linalg::hermitian_eigen(&self.matrix);
        Ok(HermitianOperator {
            matrix: e.map(phi)?,
        })
    }

    /// `phi(self) f` through the eigendecomposition.
    pub fn apply_function<F: Fn(f64) -> f64>(&self, phi: F, f: &Signal) -> Result<Signal> {
        let e = linalg::hermitian_eigen(&self.matrix);
        Ok(linalg::to_signal(&e.apply(phi, &linalg::to_vector(f))?))
    }

    /// `self - other`.
    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// Principal submatrix on indices `start..start + size`.
    pub fn section(&self, start: usize, size: usize) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix.view((start, start), (size, size)).into_owned(),
        }
    }
}

/// Optimal frame bounds `A <= B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// `A / B`, or 0 for the zero operator.
    pub fn ratio(&self) -> f64 {
        if self.upper > 0.0 {
            self.lower / self.upper
        } else {
            0.0
        }
    }

    /// `A > 0` at working precision.
    pub fn is_frame(&self) -> bool {
        self.upper > 0.0 && self.lower > NOT_A_FRAME_THRESHOLD * self.upper
    }

    pub(crate) fn require_frame(self) -> Result<Self> {
        if self.is_frame() {
            Ok(self)
        } else {
            Err(Error::NotAFrame {
                lower: self.lower,
                upper: self.upper,
            })
        }
    }
}

/// `S f` as synthesis of analysis.
pub fn apply_naive(sys: &GaborSystem, f: &Signal) -> Result<Signal> {
    sys.synthesis(&sys.analysis(f)?)
}

/// The `L x L` matrix of `S`, assembled from the Walnut form
/// `S[t, t'] = M sum_n g[t - na] conj(g[t' - na])` for `t = t' mod M`, zero
/// otherwise.
pub fn dense(sys: &GaborSystem) -> HermitianOperator {
    let lat = sys.lattice();
    let (len, a) = (lat.len(), lat.a());
    let (nn, mm) = (lat.time_shifts(), lat.modulations());
    let g = sys.window().as_slice();
    let mut s = CMatrix::zeros(len, len);
    for t in 0..len {
        for j in 0..lat.b() {
            let u = (t + j * mm) % len;
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..nn {
                let shift = n * a;
                acc += g[(t + len - shift) % len] * g[(u + len - shift) % len].conj();
            }
            s[(t, u)] = acc * mm as f64;
        }
    }
    HermitianOperator::from_raw(s)
}

/// Extreme eigenvalues of the dense frame operator.
///
/// Fails with [`Error::NotAFrame`] when `A < 1e-12 B`.
pub fn frame_bounds_dense(sys: &GaborSystem) -> Result<FrameBounds> {
    let (lower, upper) = dense(sys).spectral_bounds();
    FrameBounds { lower, upper }.require_frame()
}

/// `phi(S) f` with the dense eigendecomposition. Reference oracle for every
/// other functional-calculus route.
pub fn apply_phi<F: Fn(f64) -> f64>(sys: &GaborSystem, f: &Signal, phi: F) -> Result<Signal> {
    sys.check_len(f)?;
    dense(sys).apply_function(phi, f)
}

/// Correlations of the window with its shifts along the adjoint lattice.
///
/// The adjoint lattice has time step `L / b = M` and frequency step
/// `L / a = N`; entry `(k, l)` is `<g, pi(kM, lN) g>` with
/// `pi(x, w) f[t] = exp(2 pi i w t / L) f[t - x]`, `k < b`, `l < a`.
#[derive(Debug, Clone, PartialEq)]
pub struct JanssenCoefficients {
    lattice: Lattice,
    data: Vec<C64>,
}

impl JanssenCoefficients {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.data[k * self.lattice.a() + l]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

pub fn janssen_coefficients(sys: &GaborSystem) -> JanssenCoefficients {
    let lat = *sys.lattice();
    let g = sys.window();
    let mut data = Vec::with_capacity(lat.a() * lat.b());
    for k in 0..lat.b() {
        for l in 0..lat.a() {
            let shifted = g.shift_raw(k * lat.modulations(), l * lat.time_shifts());
            data.push(g.inner(&shifted));
        }
    }
    JanssenCoefficients { lattice: lat, data }
}

/// `S f = R sum_{k,l} c[k][l] pi(kM, lN) f`.
pub fn apply_janssen(
    sys: &GaborSystem,
    coeffs: &JanssenCoefficients,
    f: &Signal,
) -> Result<Signal> {
    sys.check_len(f)?;
    let lat = sys.lattice();
    if coeffs.lattice != *lat {
        return Err(Error::InvalidArgument(
            "Janssen coefficients belong to another lattice",
        ));
    }
    let len = lat.len();
    let roots = crate::signal::unit_roots(len);
    let mut out = alloc::vec![C64::new(0.0, 0.0); len];
    for k in 0..lat.b() {
        let shift = k * lat.modulations();
        for l in 0..lat.a() {
            let c = coeffs.get(k, l);
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let freq = l * lat.time_shifts();
            for (t, o) in out.iter_mut().enumerate() {
                *o += c * roots[(freq * t) % len] * f[(t + len - shift) % len];
            }
        }
    }
    let r = lat.redundancy();
    Ok(Signal::new(out.into_iter().map(|z| z * r).collect()))
}

/// `sum_{k,l} |<g, pi(kM, lN) g>|`, the finite-dimensional version of
/// Tolimieri and Orr's condition A.
pub fn condition_a_sum(sys: &GaborSystem) -> f64 {
    janssen_coefficients(sys)
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .sum()
}

/// `S^alpha f` from the binomial series
/// `((A+B)/2)^alpha sum_n binom(alpha, n) (-v)^n f` with
/// `v = I - 2 S / (A + B)`, truncated after `terms` terms.
pub fn power_series_apply(
    sys: &GaborSystem,
    f: &Signal,
    alpha: f64,
    bounds: FrameBounds,
    terms: usize,
) -> Result<Signal> {
    sys.check_len(f)?;
    let s = dense(sys);
    let mid = 0.5 * (bounds.lower + bounds.upper);
    if !(mid > 0.0) {
        return Err(Error::InvalidArgument("frame bounds must be positive"));
    }
    let mut term = f.clone();
    let mut coeff = 1.0;
    let mut acc = f.clone();
    for n in 1..terms {
        // (-v) x = S x / mid - x
        term = s.apply(&term).combine(1.0 / mid, &term, -1.0);
        coeff *= (alpha - (n as f64 - 1.0)) / n as f64;
        acc = acc.combine(1.0, &term, coeff);
    }
    Ok(acc.scale_real(mid.powf(alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Signal;

    fn system(l: usize, a: usize, b: usize, seed: u64) -> GaborSystem {
        let lat = Lattice::new(l, a, b).unwrap();
        GaborSystem::new(Signal::random(&lat, seed), lat).unwrap()
    }

    fn rel(x: &Signal, y: &Signal) -> f64 {
        x.distance(y) / y.norm().max(1e-300)
    }

    #[test]
    fn full_lattice_is_multiple_of_identity() {
        let sys = system(8, 1, 1, 4);
        let f = Signal::random(sys.lattice(), 9);
        let sf = apply_naive(&sys, &f).unwrap();
        let c = 8.0 * sys.window().norm_sqr();
        assert!(sf.distance(&f.scale_real(c)) < 1e-12);

        let d = dense(&sys);
        assert!(d.sub(&HermitianOperator::diagonal(&[c; 8])).spectral_norm() < 1e-12);
    }

    #[test]
    fn naive_matches_dense_on_small_case() {
        let lat = Lattice::new(4, 2, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let g = Signal::from_real(&[s, s, 0.0, 0.0]);
        let sys = GaborSystem::new(g, lat).unwrap();
        let d = dense(&sys);
        for j in 0..4 {
            let col = apply_naive(&sys, &Signal::delta(4, j)).unwrap();
            for i in 0..4 {
                assert!((col[i] - d.matrix()[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn naive_is_linear_hermitian_positive() {
        let sys = system(24, 4, 3, 1);
        let f = Signal::random(sys.lattice(), 2);
        let h = Signal::random(sys.lattice(), 3);
        let alpha = C64::new(0.3, -1.1);
        let lhs = apply_naive(&sys, &f.scale(alpha)).unwrap();
        let rhs = apply_naive(&sys, &f).unwrap().scale(alpha);
        assert!(lhs.distance(&rhs) < 1e-12);
        let sf = apply_naive(&sys, &f).unwrap();
        let sh = apply_naive(&sys, &h).unwrap();
        assert!((sf.inner(&h) - f.inner(&sh)).norm() < 1e-12);
        assert!(sf.inner(&f).re >= 0.0);
    }

    #[test]
    fn dense_columns_are_naive_images_and_trace_identity() {
        let sys = system(30, 5, 3, 6);
        let d = dense(&sys);
        assert!(linalg::hermitian_defect(d.matrix()) < 1e-12);
        for j in [0, 7, 29] {
            let col = apply_naive(&sys, &Signal::delta(30, j)).unwrap();
            for i in 0..30 {
                assert!((col[i] - d.matrix()[(i, j)]).norm() < 1e-12);
            }
        }
        // trace(S) = sum_{n,m} ||g_{n,m}||^2 by direct double sum over atoms
        let lat = sys.lattice();
        let mut oracle = 0.0;
        for n in 0..lat.time_shifts() {
            for m in 0..lat.modulations() {
                oracle += sys.atom(n as i64, m as i64).norm_sqr();
            }
        }
        assert!((d.trace() - oracle).abs() < 1e-11);
        let nm = (lat.time_shifts() * lat.modulations()) as f64;
        assert!((d.trace() - nm * sys.window().norm_sqr()).abs() < 1e-11);
    }

    #[test]
    fn delta_window_full_lattice_bounds() {
        let lat = Lattice::new(6, 1, 1).unwrap();
        let sys = GaborSystem::new(Signal::delta(6, 0), lat).unwrap();
        let fb = frame_bounds_dense(&sys).unwrap();
        assert!((fb.lower - 6.0).abs() < 1e-12 && (fb.upper - 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_window_is_not_a_frame() {
        let lat = Lattice::new(6, 2, 3).unwrap();
        let sys = GaborSystem::new(Signal::zeros(6), lat).unwrap();
        assert!(matches!(
            frame_bounds_dense(&sys),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn janssen_reproduces_naive() {
        for (l, a, b, seed) in [(12, 3, 2, 1u64), (24, 4, 3, 2), (30, 5, 3, 3)] {
            let sys = system(l, a, b, seed);
            let c = janssen_coefficients(&sys);
            assert!((c.get(0, 0).re - sys.window().norm_sqr()).abs() < 1e-14);
            let f = Signal::random(sys.lattice(), seed + 50);
            let j = apply_janssen(&sys, &c, &f).unwrap();
            let n = apply_naive(&sys, &f).unwrap();
            assert!(rel(&j, &n) < 1e-12, "L={l}: {}", rel(&j, &n));
        }
    }

    #[test]
    fn janssen_on_gaussian_l48() {
        let lat = Lattice::new(48, 6, 6).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(&lat), lat).unwrap();
        let c = janssen_coefficients(&sys);
        let f = Signal::random(&lat, 1);
        let j = apply_janssen(&sys, &c, &f).unwrap();
        assert!(rel(&j, &apply_naive(&sys, &f).unwrap()) < 1e-12);
        assert_eq!(apply_janssen(&sys, &c, &Signal::zeros(48)).unwrap().norm(), 0.0);
        // decay along both axes away from the origin (adjoint steps 8 and 8)
        for k in 1..3 {
            assert!(c.get(k + 1, 0).norm() < c.get(k, 0).norm());
            assert!(c.get(0, k + 1).norm() < c.get(0, k).norm());
        }
        assert!(c.get(1, 0).norm() < c.get(0, 0).norm());
    }

    #[test]
    fn janssen_rejects_other_lattice() {
        let sys = system(12, 3, 2, 1);
        let other = system(12, 2, 3, 1);
        let c = janssen_coefficients(&other);
        let f = Signal::random(sys.lattice(), 1);
        assert!(apply_janssen(&sys, &c, &f).is_err());
    }

    #[test]
    fn condition_a_sum_examples() {
        let lat = Lattice::new(4, 1, 1).unwrap();
        let sys = GaborSystem::new(Signal::delta(4, 0), lat).unwrap();
        // adjoint lattice is {(0, 0)} only; direct enumeration gives |<d, d>| = 1
        assert!((condition_a_sum(&sys) - 1.0).abs() < 1e-15);

        let lat = Lattice::new(240, 15, 15).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(&lat), lat).unwrap();
        let s1 = condition_a_sum(&sys);
        assert!(s1 >= 1.0 && s1.is_finite());
        assert_eq!(s1, condition_a_sum(&sys));
    }

    #[test]
    fn functional_calculus_identities() {
        let sys = system(24, 4, 3, 8);
        let f = Signal::random(sys.lattice(), 1);
        let id = apply_phi(&sys, &f, |s| s).unwrap();
        assert!(rel(&id, &apply_naive(&sys, &f).unwrap()) < 1e-12);
        let one = apply_phi(&sys, &f, |_| 1.0).unwrap();
        assert!(rel(&one, &f) < 1e-12);
        let half = apply_phi(&sys, &f, |s| s.sqrt()).unwrap();
        let back = apply_phi(&sys, &half, |s| 1.0 / s.sqrt()).unwrap();
        assert!(rel(&back, &f) < 1e-10);
    }

    #[test]
    fn singular_function_is_rejected() {
        let lat = Lattice::new(6, 2, 3).unwrap();
        let sys = GaborSystem::new(Signal::zeros(6), lat).unwrap();
        let f = Signal::random(&lat, 1);
        assert!(matches!(
            apply_phi(&sys, &f, |s| 1.0 / s),
            Err(Error::Undefined { .. })
        ));
    }

    #[test]
    fn spectral_mapping() {
        let sys = system(20, 4, 5, 3);
        let s = dense(&sys);
        let ev = s.eigenvalues();
        for phi in [|x: f64| x * x, |x: f64| 1.0 / x, |x: f64| 1.0 / x.sqrt()] {
            let mut mapped: Vec<f64> = ev.iter().map(|&x| phi(x)).collect();
            mapped.sort_by(f64::total_cmp);
            let got = s.map_spectrum(phi).unwrap().eigenvalues();
            for (x, y) in got.iter().zip(&mapped) {
                assert!((x - y).abs() < 1e-10 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn binomial_series_matches_eigendecomposition() {
        let lat = Lattice::new(48, 6, 6).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(&lat), lat).unwrap();
        let fb = frame_bounds_dense(&sys).unwrap();
        let spread = (fb.upper - fb.lower) / (fb.upper + fb.lower);
        assert!(spread <= 0.6, "spread {spread}");
        let f = Signal::random(&lat, 4);
        let series = power_series_apply(&sys, &f, -0.5, fb, 60).unwrap();
        let exact = apply_phi(&sys, &f, |s| s.powf(-0.5)).unwrap();
        assert!(rel(&series, &exact) < 1e-8, "{}", rel(&series, &exact));
    }

    #[test]
    fn hermitian_operator_validation() {
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 0.0));
        assert!(HermitianOperator::new(m).is_err());
        let m = CMatrix::from_fn(2, 3, |_, _| C64::new(0.0, 0.0));
        assert!(HermitianOperator::new(m).is_err());
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0, i as f64 - j as f64));
        assert!(HermitianOperator::new(m).is_ok());
    }
}
