//! Discrete Zak transform and the Zibulski-Zeevi block diagonalization of the
//! frame operator.
//!
//! With `lambda = M = L / b` and `K = b`, the Zak transform turns `S` into a
//! field of `p x p` Hermitian blocks. The grid is `r < M`, `s0 < b / p`; block
//! `(r, s0)` acts on the Zak samples at `(r, s0 + k b / p)`, `k < p`. The
//! `p x q` factor `Phi(r, s0)` has entries
//!
//! ```text
//! Phi[k][l] = sqrt(L / p) * Zg(r_l, s_k) * exp(-2 pi i kappa_l s_k / b)
//! ```
//!
//! where `s_k = s0 + k b / p` and `r - l a = r_l - kappa_l M` with
//! `0 <= r_l < M`. Then `Phi Phi^*` is the block of `S` at `(r, s0)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::lattice::Lattice;
use crate::linalg::{self, CMatrix};
use crate::operator::FrameBounds;
use crate::signal::{unit_roots, Signal};
use crate::C64;

/// `lambda x K` array of Zak samples, `K = L / lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakArray {
    lambda: usize,
    k_len: usize,
    values: Vec<C64>,
}

impl ZakArray {
    pub fn from_values(lambda: usize, k_len: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != lambda * k_len || lambda == 0 {
            return Err(Error::LengthMismatch {
                expected: lambda * k_len,
                found: values.len(),
            });
        }
        Ok(ZakArray {
            lambda,
            k_len,
            values,
        })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn k_len(&self) -> usize {
        self.k_len
    }

    pub fn get(&self, r: usize, s: usize) -> C64 {
        self.values[r * self.k_len + s]
    }

    pub fn set(&mut self, r: usize, s: usize, z: C64) {
        self.values[r * self.k_len + s] = z;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }

    /// Frobenius norm; equals the norm of the transformed signal.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `Zf(r, s) = K^{-1/2} sum_k f[r - k lambda] exp(2 pi i k s / K)`.
pub fn zak_forward(f: &Signal, lambda: usize) -> Result<ZakArray> {
    let len = f.len();
    if lambda == 0 || !len.is_multiple_of(lambda) {
        return Err(Error::InvalidArgument("Zak parameter must divide L"));
    }
    let k_len = len / lambda;
    let roots = unit_roots(k_len);
    let scale = 1.0 / (k_len as f64).sqrt();
    let mut values = vec![C64::new(0.0, 0.0); len];
    for r in 0..lambda {
        for s in 0..k_len {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..k_len {
                acc += f[(r + len - k * lambda) % len] * roots[(k * s) % k_len];
            }
            values[r * k_len + s] = acc * scale;
        }
    }
    Ok(ZakArray {
        lambda,
        k_len,
        values,
    })
}

/// Inverse of [`zak_forward`].
pub fn zak_inverse(z: &ZakArray) -> Signal {
    let (lambda, k_len) = (z.lambda, z.k_len);
    let len = lambda * k_len;
    let roots = unit_roots(k_len);
    let scale = 1.0 / (k_len as f64).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); len];
    for r in 0..lambda {
        for k in 0..k_len {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..k_len {
                acc += z.get(r, s) * roots[(k_len - (k * s) % k_len) % k_len];
            }
            out[(r + len - k * lambda) % len] = acc * scale;
        }
    }
    Signal::new(out)
}

/// Zibulski-Zeevi matrices `Phi(r, s0)` of a signal over the block grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZzField {
    lattice: Lattice,
    cols: usize,
    blocks: Vec<CMatrix>,
}

impl ZzField {
    /// `Phi^f` for a signal `f` on `lat`.
    pub fn new(f: &Signal, lat: &Lattice) -> Result<Self> {
        if f.len() != lat.len() {
            return Err(Error::LengthMismatch {
                expected: lat.len(),
                found: f.len(),
            });
        }
        let (a, b) = (lat.a(), lat.b());
        let (mm, p, q) = (lat.modulations(), lat.p(), lat.q());
        let stride = b / p;
        let zf = zak_forward(f, mm)?;
        let roots_b = unit_roots(b);
        let scale = (lat.len() as f64 / p as f64).sqrt();
        let mut blocks = Vec::with_capacity(mm * stride);
        for r in 0..mm {
            for s0 in 0..stride {
                let mut phi = CMatrix::zeros(p, q);
                for l in 0..q {
                    let x = r as i64 - (l * a) as i64;
                    let r_l = x.rem_euclid(mm as i64);
                    let kappa = ((r_l - x) / mm as i64) as usize % b;
                    for k in 0..p {
                        let s = s0 + k * stride;
                        let phase = roots_b[(b - (kappa * s) % b) % b];
                        phi[(k, l)] = zf.get(r_l as usize, s) * phase * scale;
                    }
                }
                blocks.push(phi);
            }
        }
        Ok(ZzField {
            lattice: *lat,
            cols: stride,
            blocks,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Grid shape `(M, b / p)`.
    pub fn grid(&self) -> (usize, usize) {
        (self.lattice.modulations(), self.cols)
    }

    /// The `p x q` matrix at grid point `(r, s0)`.
    pub fn block(&self, r: usize, s0: usize) -> &CMatrix {
        &self.blocks[r * self.cols + s0]
    }

    /// `Phi Phi^*` at `(r, s0)`: the `p x p` block of the frame operator.
    pub fn gram(&self, r: usize, s0: usize) -> CMatrix {
        let phi = self.block(r, s0);
        phi * phi.adjoint()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &CMatrix> {
        self.blocks.iter()
    }

    /// Extreme eigenvalues of `Phi Phi^*` over the whole grid.
    pub fn frame_bounds(&self) -> FrameBounds {
        let mut lower = f64::INFINITY;
        let mut upper: f64 = 0.0;
        for phi in &self.blocks {
            let e = linalg::hermitian_eigen(&(phi * phi.adjoint()));
            lower = lower.min(e.min());
            upper = upper.max(e.max());
        }
        FrameBounds {
            lower: lower.max(0.0),
            upper,
        }
    }

    /// `max ||Phi Phi^* - I_p||_2` over the grid.
    pub fn tightness_defect(&self) -> f64 {
        let p = self.lattice.p();
        self.blocks
            .iter()
            .map(|phi| linalg::hermitian_spectral_norm(&(phi * phi.adjoint() - CMatrix::identity(p, p))))
            .fold(0.0, f64::max)
    }
}

/// `Phi^g` for the window of `sys`.
pub fn zz_matrices(sys: &GaborSystem) -> ZzField {
    ZzField::new(sys.window(), sys.lattice()).expect("system window matches lattice")
}

/// Frame bounds from the block diagonalization. A zero window gives `(0, 0)`.
pub fn zz_frame_bounds(sys: &GaborSystem) -> FrameBounds {
    zz_matrices(sys).frame_bounds()
}

/// `phi(S) f` computed blockwise: `phi(Phi Phi^*)` applied to the Zak samples
/// of `f` at each grid point.
pub fn zz_apply_phi<F: Fn(f64) -> f64>(sys: &GaborSystem, f: &Signal, phi: F) -> Result<Signal> {
    sys.check_len(f)?;
    let lat = sys.lattice();
    let field = zz_matrices(sys);
    let (mm, stride) = field.grid();
    let p = lat.p();
    let mut z = zak_forward(f, mm)?;
    let mut v = DVector::zeros(p);
    for r in 0..mm {
        for s0 in 0..stride {
            for k in 0..p {
                v[k] = z.get(r, s0 + k * stride);
            }
            let eig = linalg::hermitian_eigen(&field.gram(r, s0));
            let w = eig.apply(&phi, &v)?;
            for k in 0..p {
                z.set(r, s0 + k * stride, w[k]);
            }
        }
    }
    Ok(zak_inverse(&z))
}

/// Canonical tight window for integer oversampling (`p = 1`): every block is
/// a `1 x q` row, `S` acts on the Zak domain as multiplication by its squared
/// norm, and `Z h0 = Z g / ||row||`.
pub fn zak_tight_integer(sys: &GaborSystem) -> Result<Signal> {
    let lat = sys.lattice();
    if !lat.is_integer_oversampling() {
        return Err(Error::NotIntegerOversampling {
            p: lat.p(),
            q: lat.q(),
        });
    }
    let field = zz_matrices(sys);
    let (mm, stride) = field.grid();
    let mut z = zak_forward(sys.window(), mm)?;
    let weights: Vec<f64> = field.blocks().map(|row| row.norm_squared()).collect();
    let upper = weights.iter().copied().fold(0.0, f64::max);
    let lower = weights.iter().copied().fold(f64::INFINITY, f64::min);
    FrameBounds { lower, upper }.require_frame()?;
    for r in 0..mm {
        for s in 0..stride {
            let w = weights[r * stride + s];
            z.set(r, s, z.get(r, s) / w.sqrt());
        }
    }
    Ok(zak_inverse(&z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{self, dense, frame_bounds_dense};

    fn system(l: usize, a: usize, b: usize, seed: u64) -> GaborSystem {
        let lat = Lattice::new(l, a, b).unwrap();
        GaborSystem::new(Signal::random(&lat, seed), lat).unwrap()
    }

    fn rel(x: &Signal, y: &Signal) -> f64 {
        x.distance(y) / y.norm()
    }

    fn tight_of(sys: &GaborSystem) -> GaborSystem {
        let h = operator::apply_phi(sys, sys.window(), |s| 1.0 / s.sqrt()).unwrap();
        sys.with_window(h).unwrap()
    }

    #[test]
    fn zak_degenerate_and_round_trip() {
        let lat = Lattice::new(12, 3, 4).unwrap();
        let f = Signal::random(&lat, 1);
        let z = zak_forward(&f, 12).unwrap();
        assert_eq!(z.k_len(), 1);
        for t in 0..12 {
            assert!((z.get(t, 0) - f[t]).norm() < 1e-15);
        }
        assert!(zak_inverse(&z).distance(&f) < 1e-15);
        for lambda in [1, 2, 3, 4, 6] {
            let z = zak_forward(&f, lambda).unwrap();
            assert!((z.norm() - f.norm()).abs() < 1e-13);
            assert!(zak_inverse(&z).distance(&f) < 1e-13);
        }
        assert!(zak_forward(&f, 5).is_err());
    }

    #[test]
    fn zak_is_linear() {
        let lat = Lattice::new(12, 3, 4).unwrap();
        let f = Signal::random(&lat, 1);
        let g = Signal::random(&lat, 2);
        let sum = zak_forward(&f.combine(2.0, &g, -0.5), 4).unwrap();
        let (zf, zg) = (zak_forward(&f, 4).unwrap(), zak_forward(&g, 4).unwrap());
        for (i, z) in sum.as_slice().iter().enumerate() {
            assert!((z - (zf.as_slice()[i] * 2.0 - zg.as_slice()[i] * 0.5)).norm() < 1e-14);
        }
    }

    /// The block family must reproduce `S` exactly: `Z S Z^{-1}` restricted to
    /// each block is `Phi Phi^*`.
    #[test]
    fn blocks_conjugate_the_dense_operator() {
        for (l, a, b, seed) in [
            (12, 3, 2, 1u64),
            (24, 4, 3, 2),
            (48, 6, 6, 3),
            (60, 4, 6, 4),
            (60, 12, 3, 5),
            (16, 2, 2, 6),
            (6, 2, 3, 7),
        ] {
            let sys = system(l, a, b, seed);
            let lat = *sys.lattice();
            let field = zz_matrices(&sys);
            let s = dense(&sys);
            let (mm, stride) = field.grid();
            let p = lat.p();
            for r in 0..mm {
                for s0 in 0..stride {
                    let gram = field.gram(r, s0);
                    for k in 0..p {
                        // column of S in Zak coordinates: image of a Zak unit vector
                        let mut z = ZakArray::from_values(mm, b, vec![C64::new(0.0, 0.0); l]).unwrap();
                        z.set(r, s0 + k * stride, C64::new(1.0, 0.0));
                        let image = zak_forward(&s.apply(&zak_inverse(&z)), mm).unwrap();
                        for (rr, ss) in (0..mm).flat_map(|x| (0..b).map(move |y| (x, y))) {
                            let expect = if rr == r && ss % stride == s0 {
                                gram[(ss / stride, k)]
                            } else {
                                C64::new(0.0, 0.0)
                            };
                            assert!(
                                (image.get(rr, ss) - expect).norm() < 1e-12,
                                "L={l} a={a} b={b} at ({rr},{ss})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phi_of_sf_is_gram_times_phi_of_f() {
        let sys = system(24, 4, 3, 9);
        let f = Signal::random(sys.lattice(), 10);
        let sf = dense(&sys).apply(&f);
        let lhs = ZzField::new(&sf, sys.lattice()).unwrap();
        let rhs = ZzField::new(&f, sys.lattice()).unwrap();
        let field = zz_matrices(&sys);
        let (mm, stride) = field.grid();
        for r in 0..mm {
            for s0 in 0..stride {
                let diff = lhs.block(r, s0) - field.gram(r, s0) * rhs.block(r, s0);
                assert!(diff.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn integer_oversampling_rows_give_eigenvalue_field() {
        let sys = system(16, 2, 2, 3);
        let field = zz_matrices(&sys);
        assert_eq!(field.block(0, 0).shape(), (1, 4));
        let mut field_values: Vec<f64> = field.blocks().map(|b| b.norm_squared()).collect();
        field_values.sort_by(f64::total_cmp);
        let ev = dense(&sys).eigenvalues();
        for (x, y) in field_values.iter().zip(&ev) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_sampling_is_scalar_field() {
        let sys = system(6, 2, 3, 4);
        let field = zz_matrices(&sys);
        assert_eq!(field.block(0, 0).shape(), (1, 1));
        let mut sq: Vec<f64> = field.blocks().map(|b| b[(0, 0)].norm_sqr()).collect();
        sq.sort_by(f64::total_cmp);
        let ev = dense(&sys).eigenvalues();
        assert_eq!(sq.len(), ev.len());
        for (x, y) in sq.iter().zip(&ev) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tight_window_gives_identity_blocks() {
        let sys = tight_of(&system(48, 6, 6, 2));
        assert!(zz_matrices(&sys).tightness_defect() < 1e-10);
        let fb = zz_frame_bounds(&sys);
        assert!((fb.lower - 1.0).abs() < 1e-10 && (fb.upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bounds_match_dense_at_sixteen_fifteenths() {
        let lat = Lattice::new(240, 15, 15).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(&lat), lat).unwrap();
        let zz = zz_frame_bounds(&sys);
        let de = frame_bounds_dense(&sys).unwrap();
        assert!((zz.lower - de.lower).abs() < 1e-10);
        assert!((zz.upper - de.upper).abs() < 1e-10);
    }

    #[test]
    fn zero_window_bounds() {
        let lat = Lattice::new(12, 3, 2).unwrap();
        let sys = GaborSystem::new(Signal::zeros(12), lat).unwrap();
        let fb = zz_frame_bounds(&sys);
        assert_eq!((fb.lower, fb.upper), (0.0, 0.0));
        assert!(!fb.is_frame());
    }

    #[test]
    fn blockwise_calculus_matches_eigendecomposition() {
        let sys = system(48, 6, 6, 5);
        let f = Signal::random(sys.lattice(), 6);
        let id = zz_apply_phi(&sys, &f, |s| s).unwrap();
        assert!(rel(&id, &operator::apply_naive(&sys, &f).unwrap()) < 1e-12);

        let g = sys.window();
        let dual = zz_apply_phi(&sys, g, |s| 1.0 / s).unwrap();
        let chol = dense(&sys).matrix().clone().cholesky().unwrap();
        let solved = linalg::to_signal(&chol.solve(&linalg::to_vector(g)));
        assert!(rel(&dual, &solved) < 1e-10);

        let h0 = zz_apply_phi(&sys, g, |s| 1.0 / s.sqrt()).unwrap();
        let oracle = operator::apply_phi(&sys, g, |s| 1.0 / s.sqrt()).unwrap();
        assert!(rel(&h0, &oracle) < 1e-10);
    }

    #[test]
    fn singular_block_is_rejected() {
        let lat = Lattice::new(12, 3, 2).unwrap();
        let sys = GaborSystem::new(Signal::zeros(12), lat).unwrap();
        let f = Signal::random(&lat, 1);
        assert!(matches!(
            zz_apply_phi(&sys, &f, |s| 1.0 / s),
            Err(Error::Undefined { .. })
        ));
    }

    #[test]
    fn integer_oversampling_shortcut() {
        let lat = Lattice::new(16, 2, 2).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(&lat), lat).unwrap();
        let h = zak_tight_integer(&sys).unwrap();
        let oracle = operator::apply_phi(&sys, sys.window(), |s| 1.0 / s.sqrt()).unwrap();
        assert!(h.distance(&oracle) < 1e-11);

        let tight = tight_of(&system(24, 2, 3, 4));
        let again = zak_tight_integer(&tight).unwrap();
        assert!(again.distance(tight.window()) < 1e-12);

        // full lattice: h0 = g / (sqrt(L) ||g||)
        let full = system(8, 1, 1, 2);
        let h = zak_tight_integer(&full).unwrap();
        let expect = full.window().scale_real(1.0 / (8f64.sqrt() * full.window().norm()));
        assert!(h.distance(&expect) < 1e-13);
    }

    #[test]
    fn critical_shortcut_is_unit_modulus_zak() {
        let sys = system(16, 4, 4, 8);
        let h = zak_tight_integer(&sys).unwrap();
        let zg = zak_forward(sys.window(), 4).unwrap();
        let zh = zak_forward(&h, 4).unwrap();
        let c = zh.get(0, 0) / (zg.get(0, 0) / zg.get(0, 0).norm());
        for (x, y) in zh.as_slice().iter().zip(zg.as_slice()) {
            assert!((x - c * y / y.norm()).norm() < 1e-12);
        }
    }

    #[test]
    fn shortcut_requires_integer_oversampling() {
        let sys = system(48, 6, 6, 1);
        assert!(matches!(
            zak_tight_integer(&sys),
            Err(Error::NotIntegerOversampling { p: 3, q: 4 })
        ));
    }
}
