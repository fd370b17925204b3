//! Separable time-frequency lattices `aZ x bZ` on the cyclic group `Z_L`.

use crate::error::{Error, Result};

/// Lattice parameters for a discrete Gabor system.
///
/// `a` is the time step and `b` the frequency step (modulations are
/// `exp(2 pi i m b t / L)`). Both must divide `L`. The redundancy is
/// `R = L / (a b)` and `p / q = a b / L` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    len: usize,
    a: usize,
    b: usize,
    time_shifts: usize,
    modulations: usize,
    p: usize,
    q: usize,
}

impl Lattice {
    pub fn new(len: usize, a: usize, b: usize) -> Result<Self> {
        let fail = |reason| Err(Error::Lattice { len, a, b, reason });
        if len == 0 || a == 0 || b == 0 {
            return fail("all parameters must be positive");
        }
        if !len.is_multiple_of(a) {
            return fail("a must divide L");
        }
        if !len.is_multiple_of(b) {
            return fail("b must divide L");
        }
        let ab = a * b;
        let d = gcd(ab, len);
        Ok(Lattice {
            len,
            a,
            b,
            time_shifts: len / a,
            modulations: len / b,
            p: ab / d,
            q: len / d,
        })
    }

    /// Signal length `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Time step.
    pub fn a(&self) -> usize {
        self.a
    }

    /// Frequency step.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of time shifts `N = L / a`.
    pub fn time_shifts(&self) -> usize {
        self.time_shifts
    }

    /// Number of modulations `M = L / b`.
    pub fn modulations(&self) -> usize {
        self.modulations
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Oversampling ratio `R = L / (a b) = q / p`.
    pub fn redundancy(&self) -> f64 {
        self.q as f64 / self.p as f64
    }

    /// `1 / R = a b / L`, the squared norm of any normalized tight window.
    pub fn inverse_redundancy(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `false` when `N M < L`: such a system can never be a frame.
    pub fn can_be_frame(&self) -> bool {
        self.time_shifts * self.modulations >= self.len
    }

    pub fn is_integer_oversampling(&self) -> bool {
        self.p == 1
    }

    pub fn is_critical(&self) -> bool {
        self.p == 1 && self.q == 1
    }

    /// The lattice with the roles of `a` and `b` exchanged, i.e. the lattice
    /// seen by the Fourier transform of a window.
    pub fn transposed(&self) -> Lattice {
        Lattice::new(self.len, self.b, self.a).expect("transposed lattice is valid")
    }
}

pub(crate) fn gcd(mut x: usize, mut y: usize) -> usize {
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    x
}
