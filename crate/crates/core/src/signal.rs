//! Complex signals on `Z_L` and the window generators.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Index, IndexMut, Sub};

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::C64;

/// `2^{1/4}`, the amplitude of the unit-norm continuous Gaussian.
const SQRT_SQRT_2: f64 = 1.189_207_115_002_721;

/// A length-`L` complex vector with cyclic indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    data: Vec<C64>,
}

impl Signal {
    pub fn new(data: Vec<C64>) -> Self {
        Signal { data }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Signal {
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Signal {
            data: vec![C64::new(0.0, 0.0); len],
        }
    }

    /// Unit impulse at `k`.
    pub fn delta(len: usize, k: usize) -> Self {
        let mut s = Signal::zeros(len);
        s.data[k % len] = C64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// Sample at `t mod L`.
    #[inline]
    pub fn at(&self, t: i64) -> C64 {
        self.data[t.rem_euclid(self.data.len() as i64) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = sum_t self[t] conj(other[t])`.
    pub fn inner(&self, other: &Signal) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * y.conj())
            .sum()
    }

    pub fn scale(&self, c: C64) -> Signal {
        Signal {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Signal {
        Signal {
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self / ||self||`.
    pub fn normalized(&self) -> Result<Signal> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale_real(1.0 / n))
    }

    /// `||self - other||`.
    pub fn distance(&self, other: &Signal) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Signal, beta: f64) -> Signal {
        Signal {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x * alpha + y * beta)
                .collect(),
        }
    }

    /// `M_{mb} T_{na} f`: `out[t] = exp(2 pi i m b t / L) f[t - n a]`.
    ///
    /// `n` and `m` are taken modulo `N` and `M`.
    pub fn tf_shift(&self, n: i64, m: i64, lat: &Lattice) -> Signal {
        let shift = n.rem_euclid(lat.time_shifts() as i64) as usize * lat.a();
        let freq = m.rem_euclid(lat.modulations() as i64) as usize * lat.b();
        self.shift_raw(shift, freq)
    }

    /// `out[t] = exp(2 pi i freq t / L) f[t - shift]` for raw index steps.
    pub fn shift_raw(&self, shift: usize, freq: usize) -> Signal {
        let len = self.len();
        let roots = unit_roots(len);
        let data = (0..len)
            .map(|t| roots[(freq * t) % len] * self.data[(t + len - shift % len) % len])
            .collect();
        Signal { data }
    }

    /// Unitary DFT: `F[k] = L^{-1/2} sum_t f[t] exp(-2 pi i k t / L)`.
    pub fn fourier(&self) -> Signal {
        let len = self.len();
        let roots = unit_roots(len);
        let scale = 1.0 / (len as f64).sqrt();
        let data = (0..len)
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                for (t, x) in self.data.iter().enumerate() {
                    acc += x * roots[(len - (k * t) % len) % len];
                }
                acc * scale
            })
            .collect();
        Signal { data }
    }

    /// Periodized, sampled Gaussian `sum_j exp(-pi (t + jL)^2 / L)`, `|j| <= 3`,
    /// normalized to unit norm. It is invariant under the unitary DFT.
    pub fn gaussian(lat: &Lattice) -> Signal {
        Signal::sampled_gaussian(lat)
            .normalized()
            .expect("gaussian has positive norm")
    }

    /// Samples of `2^{1/4} exp(-pi x^2)` at `x = t / sqrt(L)`, periodized like
    /// [`Signal::gaussian`] but not renormalized; the squared norm is close
    /// to `sqrt(L)`.
    pub fn sampled_gaussian(lat: &Lattice) -> Signal {
        let len = lat.len() as i64;
        let lf = len as f64;
        let bump = |x: f64| (-PI * x * x / lf).exp();
        let data: Vec<f64> = (0..len)
            .map(|t| {
                let u = if 2 * t <= len { t } else { t - len } as f64;
                // pairs summed as (j, -j) so that g[t] == g[L - t] bit for bit
                let mut acc = bump(u);
                for j in 1..=3 {
                    let j = j as f64 * lf;
                    acc += bump(u + j) + bump(u - j);
                }
                acc * SQRT_SQRT_2
            })
            .collect();
        Signal::from_real(&data)
    }

    /// Unit-norm window with i.i.d. uniform real and imaginary parts, seeded.
    pub fn random(lat: &Lattice, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..lat.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Signal { data }
            .normalized()
            .expect("random window is nonzero")
    }
}

impl Index<usize> for Signal {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Signal {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl Add for &Signal {
    type Output = Signal;
    fn add(self, rhs: &Signal) -> Signal {
        self.combine(1.0, rhs, 1.0)
    }
}

impl Sub for &Signal {
    type Output = Signal;
    fn sub(self, rhs: &Signal) -> Signal {
        self.combine(1.0, rhs, -1.0)
    }
}

impl From<Vec<C64>> for Signal {
    fn from(data: Vec<C64>) -> Self {
        Signal { data }
    }
}

/// `exp(2 pi i k / n)` for `k = 0..n`.
pub(crate) fn unit_roots(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            C64::new(c, s)
        })
        .collect()
}
