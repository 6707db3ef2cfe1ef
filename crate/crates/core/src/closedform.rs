//! Analytic formulas for the intermediate correlations of the coplanar
//! CHSH quartet, the piecewise CHSH combination F(α, τ), the branch
//! constant α̃, and the quantum curve recovered by τ-averaging.
//!
//! All expressions are driven by the four auxiliary angles
//!
//! ```text
//! γ₁ = π sin²α,  γ₂ = π sin²3α,  γ₃ = 4α + π sin²α,  γ₄ = 4α − π sin²α,
//! ```
//!
//! through χ(γ, τ) = cos τ / √(cos²τ + cot²(γ/2)). Every formula here is
//! validated against the μ-quadrature oracle in [`crate::quadrature`],
//! which integrates the outcome products directly.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::LazyLock;

use crate::geometry::Direction;

/// The four coplanar directions generated by the angle α ∈ [0, π/4]:
/// a and b at ±α from +z in the xz-plane, a′ and b′ at ∓3α.
#[derive(Debug, Clone, Copy)]
pub struct ChshQuartet {
    alpha: f64,
    a: Direction,
    a_prime: Direction,
    b: Direction,
    b_prime: Direction,
}

impl ChshQuartet {
    pub fn new(alpha: f64) -> Self {
        assert!(
            (0.0..=FRAC_PI_4).contains(&alpha),
            "quartet angle out of [0, pi/4]: {alpha}"
        );
        ChshQuartet {
            alpha,
            a: Direction::in_xz_plane(alpha),
            a_prime: Direction::in_xz_plane(-3.0 * alpha),
            b: Direction::in_xz_plane(-alpha),
            b_prime: Direction::in_xz_plane(3.0 * alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> Direction {
        self.a
    }

    pub fn a_prime(&self) -> Direction {
        self.a_prime
    }

    pub fn b(&self) -> Direction {
        self.b
    }

    pub fn b_prime(&self) -> Direction {
        self.b_prime
    }

    /// The four CHSH pairs in combination order:
    /// (a,b), (a,b′), (a′,b), (a′,b′).
    pub fn pairs(&self) -> [(Direction, Direction); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// Which analytic branch of the mixed correlations applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// α ≤ α̃ (γ₃ ≤ π).
    Low,
    /// α > α̃ (γ₃ > π).
    High,
}

/// Branch selector: compares α against the computed root α̃.
pub fn branch_for(alpha: f64) -> Branch {
    if alpha <= alpha_tilde() {
        Branch::Low
    } else {
        Branch::High
    }
}

/// The auxiliary angle γⱼ(α), j ∈ {1, 2, 3, 4}.
pub fn gamma(j: usize, alpha: f64) -> f64 {
    assert!(
        (0.0..=FRAC_PI_4).contains(&alpha),
        "gamma: alpha out of [0, pi/4]: {alpha}"
    );
    let s = alpha.sin();
    match j {
        1 => PI * s * s,
        2 => {
            let s3 = (3.0 * alpha).sin();
            PI * s3 * s3
        }
        3 => 4.0 * alpha + PI * s * s,
        4 => 4.0 * alpha - PI * s * s,
        _ => panic!("gamma index out of 1..=4: {j}"),
    }
}

/// χ as a function of the auxiliary angle directly:
/// χ = cos τ / √(cos²τ + cot²(γ/2)), made total by the conventions
/// χ := 0 at γ = 0, χ := sign(cos τ) at γ = π (where cot = 0), and
/// χ := 0 at the joint singularity γ = π, cos τ = π/2.
///
/// The conventions fire on the exact representable inputs (`gamma == π`,
/// `tau == π/2` bit for bit); everywhere else the formula is already
/// total in floating point, and it approaches the convention values in
/// the limits cot → 0 and cos τ → 0 taken separately.
pub fn chi_from_gamma(gamma: f64, tau: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let ct = if tau == FRAC_PI_2 { 0.0 } else { tau.cos() };
    if gamma == PI {
        // cot(γ/2) = 0: the quotient collapses to sign(cos τ)
        return if ct == 0.0 { 0.0 } else { ct.signum() };
    }
    let half = 0.5 * gamma;
    let cot = half.cos() / half.sin();
    ct / (ct * ct + cot * cot).sqrt()
}

/// χⱼ(α, τ) ∈ [−1, 1].
pub fn chi(j: usize, alpha: f64, tau: f64) -> f64 {
    chi_from_gamma(gamma(j, alpha), tau)
}

/// Intermediate correlation of the pair (A, B): 2|χ₁| − 1.
pub fn corr_ab(alpha: f64, tau: f64) -> f64 {
    2.0 * chi(1, alpha, tau).abs() - 1.0
}

/// Intermediate correlation of the pair (A′, B′): 2|χ₂| − 1.
pub fn corr_apbp(alpha: f64, tau: f64) -> f64 {
    2.0 * chi(2, alpha, tau).abs() - 1.0
}

/// Intermediate correlation of both mixed pairs (A, B′) and (A′, B):
/// |χ₃ − χ₄| − 1 on the low branch (α ≤ α̃), 1 − |χ₃ + χ₄| on the high
/// branch. The two expressions agree at α = α̃, where χ₃ = sign(cos τ)
/// collapses both to −|χ₄|.
pub fn corr_mixed(alpha: f64, tau: f64) -> f64 {
    let x3 = chi(3, alpha, tau);
    let x4 = chi(4, alpha, tau);
    match branch_for(alpha) {
        Branch::Low => (x3 - x4).abs() - 1.0,
        Branch::High => 1.0 - (x3 + x4).abs(),
    }
}

/// The CHSH combination of the intermediate correlations,
/// F = E(A,B) + E(A,B′) + E(A′,B) − E(A′,B′), assembled from the three
/// closed forms above. Lies in [−4, 4]; continuous in (α, τ) except at
/// the single point (π/6, π/2), where the value follows the χ₂ := 0
/// convention (F = −2) while the limit along τ → π/2 at α = π/6 is −4.
pub fn f_tau(alpha: f64, tau: f64) -> f64 {
    corr_ab(alpha, tau) + 2.0 * corr_mixed(alpha, tau) - corr_apbp(alpha, tau)
}

/// The quantum CHSH curve of the quartet:
/// F = −a·b − a·b′ − a′·b + a′·b′ = −3cos 2α + cos 6α. Extremal at
/// α = π/8 with value −2√2.
pub fn f_quantum(alpha: f64) -> f64 {
    -3.0 * (2.0 * alpha).cos() + (6.0 * alpha).cos()
}

static ALPHA_TILDE: LazyLock<f64> = LazyLock::new(|| {
    // 4α + π sin²α − π is strictly increasing with a sign change in
    // [0.5, 0.6]; bisect to 1e−12.
    let f = |a: f64| 4.0 * a + PI * a.sin() * a.sin() - PI;
    let (mut lo, mut hi) = (0.5f64, 0.6f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
});

/// The branch constant α̃: the unique root of 4α + π sin²α = π
/// (equivalently γ₃(α̃) = π). Computed once by bisection and cached;
/// never hard-coded, because a printed value of ≃ 0.316 sometimes quoted
/// for this constant actually solves 4α + π sin²α = π/2 and is
/// inconsistent with the defining equation (see `cmd constants` in the
/// CLI and the README note). α̃ ≈ 0.562220, which exceeds π/6, as it
/// must for the singular point (π/6, π/2) to lie on the low branch.
pub fn alpha_tilde() -> f64 {
    *ALPHA_TILDE
}

/// Closed form of the τ-average (1/π)∫₀^π |χⱼ(α, τ)| dτ:
/// γⱼ/π when γⱼ ≤ π, and (2π − γⱼ)/π when γⱼ > π (both equal
/// 2 arcsin(sin(γⱼ/2))/π). Note the absolute value: the signed χⱼ is
/// antisymmetric about τ = π/2, so its τ-average vanishes identically.
pub fn tau_average_abs_chi(j: usize, alpha: f64) -> f64 {
    let g = gamma(j, alpha);
    if g <= PI {
        g / PI
    } else {
        (2.0 * PI - g) / PI
    }
}
