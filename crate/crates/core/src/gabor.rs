//! Gabor systems `(g, a, b)` with their analysis and synthesis operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::signal::{unit_roots, Signal};
use crate::C64;

/// A window together with the lattice it is shifted along.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborSystem {
    window: Signal,
    lattice: Lattice,
}

impl GaborSystem {
    pub fn new(window: Signal, lattice: Lattice) -> Result<Self> {
        if window.len() != lattice.len() {
            return Err(Error::LengthMismatch {
                expected: lattice.len(),
                found: window.len(),
            });
        }
        Ok(GaborSystem { window, lattice })
    }

    pub fn window(&self) -> &Signal {
        &self.window
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Same lattice, different window.
    pub fn with_window(&self, window: Signal) -> Result<GaborSystem> {
        GaborSystem::new(window, self.lattice)
    }

    pub(crate) fn check_len(&self, f: &Signal) -> Result<()> {
        if f.len() != self.lattice.len() {
            return Err(Error::LengthMismatch {
                expected: self.lattice.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// The atom `g_{n,m} = M_{mb} T_{na} g`.
    pub fn atom(&self, n: i64, m: i64) -> Signal {
        self.window.tf_shift(n, m, &self.lattice)
    }

    /// Coefficients `c[n][m] = <f, g_{n,m}>`.
    pub fn analysis(&self, f: &Signal) -> Result<Coefficients> {
        self.check_len(f)?;
        let lat = &self.lattice;
        let (len, a, b) = (lat.len(), lat.a(), lat.b());
        let (nn, mm) = (lat.time_shifts(), lat.modulations());
        let roots = unit_roots(len);
        let g = self.window.as_slice();
        let mut data = vec![C64::new(0.0, 0.0); nn * mm];
        let mut prod = vec![C64::new(0.0, 0.0); len];
        for n in 0..nn {
            for (t, x) in prod.iter_mut().enumerate() {
                *x = f[t] * g[(t + len - n * a) % len].conj();
            }
            for m in 0..mm {
                let mut acc = C64::new(0.0, 0.0);
                for (t, x) in prod.iter().enumerate() {
                    acc += x * roots[(len - (m * b * t) % len) % len];
                }
                data[n * mm + m] = acc;
            }
        }
        Ok(Coefficients {
            time_shifts: nn,
            modulations: mm,
            data,
        })
    }

    /// `sum_{n,m} c[n][m] g_{n,m}`, the adjoint of [`GaborSystem::analysis`].
    pub fn synthesis(&self, c: &Coefficients) -> Result<Signal> {
        let lat = &self.lattice;
        let (len, a, b) = (lat.len(), lat.a(), lat.b());
        let (nn, mm) = (lat.time_shifts(), lat.modulations());
        if c.time_shifts != nn || c.modulations != mm {
            return Err(Error::LengthMismatch {
                expected: nn * mm,
                found: c.data.len(),
            });
        }
        let roots = unit_roots(len);
        let g = self.window.as_slice();
        let mut out = vec![C64::new(0.0, 0.0); len];
        for n in 0..nn {
            let row = &c.data[n * mm..(n + 1) * mm];
            for (t, o) in out.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (m, cm) in row.iter().enumerate() {
                    acc += cm * roots[(m * b * t) % len];
                }
                *o += acc * g[(t + len - n * a) % len];
            }
        }
        Ok(Signal::new(out))
    }
}

/// An `N x M` array of Gabor coefficients, row `n`, column `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    time_shifts: usize,
    modulations: usize,
    data: Vec<C64>,
}

impl Coefficients {
    pub fn zeros(lat: &Lattice) -> Self {
        Coefficients {
            time_shifts: lat.time_shifts(),
            modulations: lat.modulations(),
            data: vec![C64::new(0.0, 0.0); lat.time_shifts() * lat.modulations()],
        }
    }

    pub fn from_vec(lat: &Lattice, data: Vec<C64>) -> Result<Self> {
        let expected = lat.time_shifts() * lat.modulations();
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Coefficients {
            time_shifts: lat.time_shifts(),
            modulations: lat.modulations(),
            data,
        })
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.data[n * self.modulations + m]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.time_shifts, self.modulations)
    }

    /// `sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self, other>` on `C^{N x M}`.
    pub fn inner(&self, other: &Coefficients) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * y.conj())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_analysis(f: &Signal, sys: &GaborSystem) -> Vec<C64> {
        let lat = sys.lattice();
        let mut out = Vec::new();
        for n in 0..lat.time_shifts() {
            for m in 0..lat.modulations() {
                let atom = sys.atom(n as i64, m as i64);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..lat.len() {
                    acc += f[t] * atom[t].conj();
                }
                out.push(acc);
            }
        }
        out
    }

    fn random_coeffs(lat: &Lattice, seed: u64) -> Coefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = lat.time_shifts() * lat.modulations();
        let data = (0..n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Coefficients::from_vec(lat, data).unwrap()
    }

    #[test]
    fn self_coefficient_is_energy() {
        let lat = Lattice::new(20, 4, 5).unwrap();
        let g = Signal::random(&lat, 1).scale_real(1.7);
        let sys = GaborSystem::new(g.clone(), lat).unwrap();
        let c = sys.analysis(&g).unwrap();
        assert!((c.get(0, 0).re - g.norm_sqr()).abs() < 1e-13);
        assert!(c.get(0, 0).im.abs() < 1e-13);
    }

    #[test]
    fn analysis_matches_brute_force() {
        let lat = Lattice::new(4, 2, 2).unwrap();
        let sys = GaborSystem::new(Signal::delta(4, 0), lat).unwrap();
        let f = Signal::delta(4, 1);
        let c = sys.analysis(&f).unwrap();
        // g_{n,m} is supported on {2n}; f on {1}
        assert!(c.as_slice().iter().all(|z| z.norm() < 1e-15));

        let lat = Lattice::new(24, 4, 3).unwrap();
        let sys = GaborSystem::new(Signal::random(&lat, 5), lat).unwrap();
        let f = Signal::random(&lat, 6);
        let fast = sys.analysis(&f).unwrap();
        for (x, y) in fast.as_slice().iter().zip(brute_analysis(&f, &sys)) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn full_lattice_energy() {
        let lat = Lattice::new(8, 1, 1).unwrap();
        let g = Signal::random(&lat, 2).scale_real(0.8);
        let f = Signal::random(&lat, 3).scale_real(1.3);
        let sys = GaborSystem::new(g.clone(), lat).unwrap();
        let e = sys.analysis(&f).unwrap().energy();
        assert!((e - 8.0 * g.norm_sqr() * f.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn synthesis_of_zero_is_zero() {
        let lat = Lattice::new(12, 3, 2).unwrap();
        let sys = GaborSystem::new(Signal::random(&lat, 1), lat).unwrap();
        let out = sys.synthesis(&Coefficients::zeros(&lat)).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn analysis_and_synthesis_are_adjoint() {
        for (l, a, b, seed) in [(12, 3, 2, 1u64), (30, 5, 3, 2), (48, 6, 6, 3)] {
            let lat = Lattice::new(l, a, b).unwrap();
            let sys = GaborSystem::new(Signal::random(&lat, seed), lat).unwrap();
            let f = Signal::random(&lat, seed + 100);
            let c = random_coeffs(&lat, seed + 200);
            let lhs = sys.synthesis(&c).unwrap().inner(&f);
            let rhs = c.inner(&sys.analysis(&f).unwrap());
            assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let lat = Lattice::new(12, 3, 2).unwrap();
        assert!(GaborSystem::new(Signal::zeros(10), lat).is_err());
        let sys = GaborSystem::new(Signal::random(&lat, 1), lat).unwrap();
        assert!(matches!(
            sys.analysis(&Signal::zeros(11)),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
