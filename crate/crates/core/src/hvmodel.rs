//! Two-level hidden-variable models and the shipped singlet instance.
//!
//! A model assigns deterministic ±1 outcomes to each side as a function
//! of both settings and the hidden point (μ, τ): no internal
//! randomness, and no dependence on the other side's *outcome*
//! (parameter independence). Averages over μ alone give the
//! intermediate correlation and the single-party marginals; a further
//! average over τ gives the full expectation values.

use std::f64::consts::PI;

use crate::geometry::{
    lambda_vector, mu_inverse_cdf, rotated_pair, Direction, HiddenPoint, RotatedPair,
};
use crate::quadrature::{self, QuadResult, DEFAULT_MU_TOL, DEFAULT_TAU_TOL};

/// sign with the measure-zero tie broken deterministically: sign(0) := +1,
/// so outcomes are total functions.
#[inline]
pub fn sign_pm(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// A deterministic two-level hidden-variable model.
///
/// `outcome_a`/`outcome_b` may depend on both settings (the models here
/// are nonlocal by construction) but only on the hidden point beyond
/// that. The density methods default to the singlet's hidden-variable
/// distribution (τ uniform on [0, π), μ with conditional density
/// |sin μ|/4), and the `*_from_uniform` methods are the matching inverse
/// CDFs used by the Monte Carlo samplers, so test models that only
/// override outcomes stay internally consistent.
pub trait TwoLevelModel {
    fn outcome_a(&self, a: &Direction, b: &Direction, p: &HiddenPoint) -> f64;
    fn outcome_b(&self, a: &Direction, b: &Direction, p: &HiddenPoint) -> f64;

    /// Upper-level density ρ(τ) on [0, π).
    fn rho_tau(&self, _tau: f64) -> f64 {
        1.0 / PI
    }

    /// Conditional lower-level density ρ(μ|τ) on [0, 2π).
    fn rho_mu_given_tau(&self, mu: f64, _tau: f64) -> f64 {
        mu.sin().abs() / 4.0
    }

    /// Maps a uniform u ∈ [0, 1) to a τ draw (inverse CDF of ρ(τ)).
    fn tau_from_uniform(&self, u: f64) -> f64 {
        PI * u
    }

    /// Maps a uniform u ∈ [0, 1) to a μ draw at fixed τ.
    fn mu_from_uniform(&self, u: f64, _tau: f64) -> f64 {
        mu_inverse_cdf(u)
    }

    /// τ values in [0, π) where the μ-flip structure of the outcomes
    /// degenerates for this settings pair, so the intermediate
    /// correlation can vary on an arbitrarily narrow τ scale. Outer
    /// τ-integrals place panel boundaries here; without them an
    /// adaptive rule can step over the transition and silently
    /// under-report its error.
    fn tau_breakpoints(&self, _a: &Direction, _b: &Direction) -> Vec<f64> {
        vec![PI / 2.0]
    }
}

/// The shipped singlet-state instance: outcomes are the signs of the
/// rotated settings against the hidden axis,
///
/// ```text
/// A = sign(â · λ),   B = −sign(b̂ · λ),
/// ```
///
/// with (â, b̂) from [`geometry::rotated_pair`] and λ the Cartesian
/// hidden point. Stateless; the hidden-variable distribution is uniform
/// on the sphere.
#[derive(Debug, Clone, Copy, Default)]
pub struct SingletModel;

impl TwoLevelModel for SingletModel {
    fn outcome_a(&self, a: &Direction, b: &Direction, p: &HiddenPoint) -> f64 {
        outcome_a_rotated(&rotated_pair(a, b), p)
    }

    fn outcome_b(&self, a: &Direction, b: &Direction, p: &HiddenPoint) -> f64 {
        outcome_b_rotated(&rotated_pair(a, b), p)
    }

    fn tau_breakpoints(&self, a: &Direction, b: &Direction) -> Vec<f64> {
        // v̂ · λ(μ, τ) ∝ cos(τ − φ_v̂) in its μ-flip positions, so the
        // flip points sweep fastest where that cosine vanishes:
        // τ* = φ_v̂ + π/2 (mod π), one per rotated setting.
        let pair = rotated_pair(a, b);
        [pair.a_hat, pair.b_hat]
            .iter()
            .map(|v| (v.y().atan2(v.x()) + PI / 2.0).rem_euclid(PI))
            .collect()
    }
}

/// A-side singlet outcome from a precomputed rotated pair. Grid scans
/// and the quadrature oracle use this to avoid re-deriving (â, b̂) per
/// hidden point.
#[inline]
pub fn outcome_a_rotated(pair: &RotatedPair, p: &HiddenPoint) -> f64 {
    sign_pm(pair.a_hat.dot(&lambda_vector(p)))
}

/// B-side singlet outcome from a precomputed rotated pair.
#[inline]
pub fn outcome_b_rotated(pair: &RotatedPair, p: &HiddenPoint) -> f64 {
    -sign_pm(pair.b_hat.dot(&lambda_vector(p)))
}

/// μ-average of the A-side outcome at fixed τ:
/// f(a, τ) = ∫ A(a, b, μ, τ) ρ(μ|τ) dμ.
///
/// For any crypto-nonlocal model this vanishes identically; the audit in
/// [`crate::analysis`] checks exactly that.
pub fn marginal_f<M: TwoLevelModel>(
    model: &M,
    a: &Direction,
    b: &Direction,
    tau: f64,
) -> QuadResult {
    average_over_mu(|p| model.outcome_a(a, b, p), model, tau)
}

/// μ-average of the B-side outcome at fixed τ (mirror of [`marginal_f`]).
pub fn marginal_g<M: TwoLevelModel>(
    model: &M,
    a: &Direction,
    b: &Direction,
    tau: f64,
) -> QuadResult {
    average_over_mu(|p| model.outcome_b(a, b, p), model, tau)
}

/// μ-average of the outcome product at fixed τ: the intermediate
/// correlation E_τ(A, B). The two outcome factors are scanned for sign
/// flips separately, so nearly simultaneous flips of A and B (where the
/// product scan alone would miss the lune between them) still become
/// panel boundaries.
pub fn intermediate_correlation<M: TwoLevelModel>(
    model: &M,
    a: &Direction,
    b: &Direction,
    tau: f64,
) -> QuadResult {
    let two_pi = 2.0 * PI;
    let side_a = |mu: f64| model.outcome_a(a, b, &HiddenPoint::new(mu, tau));
    let side_b = |mu: f64| model.outcome_b(a, b, &HiddenPoint::new(mu, tau));
    let mut breaks =
        quadrature::find_sign_changes(&side_a, 0.0, two_pi, quadrature::SIGN_SCAN_RESOLUTION);
    breaks.extend(quadrature::find_sign_changes(
        &side_b,
        0.0,
        two_pi,
        quadrature::SIGN_SCAN_RESOLUTION,
    ));
    breaks.push(PI);
    let value = |mu: f64| side_a(mu) * side_b(mu) * model.rho_mu_given_tau(mu, tau);
    quadrature::integrate_with_breaks(value, 0.0, two_pi, &breaks, DEFAULT_MU_TOL)
}

fn average_over_mu<M: TwoLevelModel>(
    outcome: impl Fn(&HiddenPoint) -> f64,
    model: &M,
    tau: f64,
) -> QuadResult {
    let two_pi = 2.0 * PI;
    let value = |mu: f64| {
        let p = HiddenPoint::new(mu, tau);
        outcome(&p) * model.rho_mu_given_tau(mu, tau)
    };
    // split at the density kink and at the outcome sign flips
    let mut breaks =
        quadrature::find_sign_changes(&value, 0.0, two_pi, quadrature::SIGN_SCAN_RESOLUTION);
    breaks.push(PI);
    quadrature::integrate_with_breaks(value, 0.0, two_pi, &breaks, DEFAULT_MU_TOL)
}

/// Full expectation ⟨A ⊗ B⟩ = ∫ E_τ(A, B) ρ(τ) dτ. For the singlet
/// model this must equal −a·b.
///
/// The outer τ-integral inherits the inner μ-tolerance; the reported
/// bound adds the two budgets.
pub fn full_expectation<M: TwoLevelModel>(model: &M, a: &Direction, b: &Direction) -> QuadResult {
    let inner = |tau: f64| intermediate_correlation(model, a, b, tau).value * model.rho_tau(tau);
    let mut breaks = model.tau_breakpoints(a, b);
    breaks.push(PI / 2.0);
    let mut result = quadrature::integrate_with_breaks(inner, 0.0, PI, &breaks, DEFAULT_TAU_TOL);
    result.error_bound += DEFAULT_MU_TOL;
    result
}
