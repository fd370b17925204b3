//! Seeded invariant suite: every instance is a random window on a small
//! lattice, and each check reports its measured values and a verdict.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{canonical_dual, canonical_tight, Backend};
use crate::diagnostics;
use crate::error::Result;
use crate::gabor::GaborSystem;
use crate::iterate::{self, ScalingRule};
use crate::lattice::Lattice;
use crate::operator;
use crate::signal::Signal;
use crate::zak;

const LATTICES: [(usize, usize, usize); 6] = [
    (48, 6, 6),
    (60, 5, 6),
    (48, 4, 6),
    (36, 4, 3),
    (60, 6, 5),
    (64, 8, 4),
];

const COMPETITORS: u64 = 5;
const EQUIVALENCE_TOL: f64 = 1e-11;
const NORM_IDENTITY_TOL: f64 = 1e-10;
const ENVELOPE_SLACK: f64 = 1e-10;

/// Perturbation added to the canonical tight window when tampering.
pub const TAMPER_SIZE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub seed: u64,
    pub values: Vec<(&'static str, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub instances: usize,
    /// Corrupt the canonical tight window before it is checked.
    pub tamper: bool,
}

/// Seed of instance `index` in a suite started from `seed`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(index as u64)
}

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for i in 0..opts.instances {
        out.extend(run_instance(instance_seed(opts.seed, i), opts.tamper)?);
    }
    Ok(out)
}

pub fn all_pass(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|c| c.pass)
}

fn check(name: &'static str, seed: u64, values: Vec<(&'static str, f64)>, pass: bool) -> CheckOutcome {
    CheckOutcome {
        name,
        seed,
        values,
        pass,
    }
}

/// All checks for one seeded instance.
pub fn run_instance(seed: u64, tamper: bool) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, a, b) = LATTICES[rng.gen_range(0..LATTICES.len())];
    let lat = Lattice::new(l, a, b)?;
    let sys = GaborSystem::new(Signal::random(&lat, rng.gen()), lat)?;
    let g = sys.window();

    let mut h0 = canonical_tight(&sys, Backend::Dense)?;
    if tamper {
        let noise = Signal::random(&lat, rng.gen());
        h0 = h0.combine(1.0, &noise, TAMPER_SIZE);
    }
    let mut out = Vec::new();

    // minimality
    let tightness = diagnostics::tightness_residual(&h0, &lat)?;
    let mut pass = tightness <= diagnostics::COMPETITOR_TIGHTNESS;
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    for k in 0..COMPETITORS {
        let h = diagnostics::random_tight_competitor(&lat, seed ^ (0x5eed << 8) ^ k)?;
        let r = diagnostics::minimality_gap_with(g, &h0, &h, &lat)?;
        worst_lower = worst_lower.min(r.d_competitor - r.d_lower);
        worst_upper = worst_upper.min(r.d_upper - r.d_competitor);
        pass &= r.pass;
    }
    out.push(check(
        "minimality",
        seed,
        vec![
            ("tightness_residual", tightness),
            ("min_lower_margin", worst_lower),
            ("min_upper_margin", worst_upper),
        ],
        pass,
    ));

    // kantorovich on the frame operator
    let s = operator::dense(&sys);
    let (lower, upper) = s.spectral_bounds();
    let f = Signal::random(&lat, rng.gen());
    let (lhs, rhs) = diagnostics::kantorovich_check(&s, &f, lower, upper)?;
    out.push(check(
        "kantorovich",
        seed,
        vec![("lhs", lhs), ("rhs", rhs)],
        lhs >= rhs - 1e-12,
    ));

    // backend equivalence
    let naive = operator::apply_naive(&sys, &f)?;
    let scale = naive.norm();
    let dense = s.apply(&f);
    let coeffs = operator::janssen_coefficients(&sys);
    let janssen = operator::apply_janssen(&sys, &coeffs, &f)?;
    let blocks = zak::zz_apply_phi(&sys, &f, |x| x)?;
    let e_dense = dense.distance(&naive) / scale;
    let e_janssen = janssen.distance(&naive) / scale;
    let e_zz = blocks.distance(&naive) / scale;
    let dual_dense = canonical_dual(&sys, Backend::Dense)?;
    let dual_zz = canonical_dual(&sys, Backend::Zz)?;
    let e_dual = dual_zz.distance(&dual_dense) / dual_dense.norm();
    out.push(check(
        "backend_equivalence",
        seed,
        vec![
            ("dense", e_dense),
            ("janssen", e_janssen),
            ("zz", e_zz),
            ("dual_zz", e_dual),
        ],
        e_dense.max(e_janssen).max(e_zz) <= EQUIVALENCE_TOL && e_dual <= 1e-9,
    ));

    // norm identity
    let pairing = g.inner(&dual_dense).re;
    let tight_norm = h0.norm_sqr();
    let inv_r = lat.inverse_redundancy();
    let defect = (pairing - tight_norm)
        .abs()
        .max((pairing - inv_r).abs())
        .max((tight_norm - inv_r).abs());
    out.push(check(
        "norm_identity",
        seed,
        vec![
            ("dual_pairing", pairing),
            ("tight_norm_sqr", tight_norm),
            ("inverse_redundancy", inv_r),
        ],
        defect <= NORM_IDENTITY_TOL,
    ));

    // one norm-scaled step against the recursion envelope
    let g1 = iterate::newton_step(&sys, ScalingRule::Norm)?;
    let fb1 = operator::frame_bounds_dense(&sys.with_window(g1)?)?;
    let env = iterate::bound_recursion_envelope(lower, upper, lat.redundancy())?;
    out.push(check(
        "recursion_envelope",
        seed,
        vec![
            ("a1", fb1.lower),
            ("b1", fb1.upper),
            ("a1_lower", env.a1_lower),
            ("b1_upper", env.b1_upper),
        ],
        fb1.lower >= env.a1_lower - ENVELOPE_SLACK && fb1.upper <= env.b1_upper + ENVELOPE_SLACK,
    ));

    // finite sections of a banded Toeplitz operator
    let off = 0.5 + 0.45 * rng.gen::<f64>();
    let t = diagnostics::tridiagonal_toeplitz(101, 2.0, off);
    let errs = diagnostics::finite_section_convergence(&t, &[5, 10, 20, 40], &Signal::delta(101, 50))?;
    // nonincreasing up to rounding once the sections are exact to working precision
    let decreasing = errs.windows(2).all(|w| w[1] <= w[0] + 1e-12) && errs[3] < errs[0];
    out.push(check(
        "finite_sections",
        seed,
        vec![
            ("off_diagonal", off),
            ("err_5", errs[0]),
            ("err_10", errs[1]),
            ("err_20", errs[2]),
            ("err_40", errs[3]),
        ],
        decreasing,
    ));

    Ok(out)
}
