//! Unit vectors, the (μ, τ) parametrization of the sphere, the
//! setting-rotation rule, and samplers for the hidden variable.
//!
//! The hidden variable is a point on the unit sphere written in the
//! nonstandard chart μ ∈ [0, 2π), τ ∈ [0, π). The map to Cartesian
//! coordinates is the single formula
//!
//! ```text
//! λ(μ, τ) = (sin μ cos τ, sin μ sin τ, cos μ)
//! ```
//!
//! which for μ ∈ [0, π] is the usual polar point (θ = μ, φ = τ) with
//! y ≥ 0, and for μ ∈ (π, 2π) equals the polar point (θ = 2π − μ,
//! φ = τ + π) with y < 0. In this chart the surface element is
//! |sin μ| dμ dτ, so a uniform point on the sphere has joint density
//! |sin μ|/(4π) with μ and τ independent.

use std::f64::consts::PI;
use std::ops::Neg;

use rand::Rng;

const TWO_PI: f64 = 2.0 * PI;

/// A unit vector in ℝ³: a measurement setting or a hidden-variable axis.
///
/// Constructors normalize, so `x² + y² + z² = 1` always holds (within
/// 1e-12, the tolerance checked by the test suite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    /// +x axis.
    pub const X: Direction = Direction {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    /// +y axis.
    pub const Y: Direction = Direction {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    /// +z axis.
    pub const Z: Direction = Direction {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes the given components.
    ///
    /// Panics if the input is too close to the zero vector to define a
    /// direction.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let norm = (x * x + y * y + z * z).sqrt();
        assert!(norm > 1e-300, "cannot normalize a (near-)zero vector");
        Direction {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        }
    }

    /// Direction with standard polar angles θ (from +z) and φ (from +x).
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Direction in the xz-plane at the given position angle from +z,
    /// i.e. (sin t, 0, cos t). The coplanar quartet lives here.
    pub fn in_xz_plane(angle_from_z: f64) -> Self {
        let (s, c) = angle_from_z.sin_cos();
        Direction { x: s, y: 0.0, z: c }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// The hidden variable λ as the angle pair (μ, τ) with μ ∈ [0, 2π),
/// τ ∈ [0, π). Constructors reduce out-of-range angles modulo the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenPoint {
    mu: f64,
    tau: f64,
}

impl HiddenPoint {
    pub fn new(mu: f64, tau: f64) -> Self {
        HiddenPoint {
            mu: reduce(mu, TWO_PI),
            tau: reduce(tau, PI),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Reduce `x` into [0, period). `rem_euclid` can round up to the period
/// itself for tiny negative inputs, so that edge is folded back to 0.
fn reduce(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// The derived settings (â, b̂) for a pair (a, b), together with the
/// original angle ω between a and b and the rotated angle ω̂ between
/// â and b̂.
///
/// â and b̂ lie in the span of (a, b), are symmetric about the bisector
/// of (a, b), and subtend ω̂ = π sin²(ω/2); â sits on a's side of the
/// bisector, b̂ on b's side.
#[derive(Debug, Clone, Copy)]
pub struct RotatedPair {
    pub a_hat: Direction,
    pub b_hat: Direction,
    pub omega: f64,
    pub omega_hat: f64,
}

/// Angle between two unit vectors, in [0, π]. The dot product is clamped
/// to [−1, 1] so rounding at (anti)colinearity cannot produce NaN.
pub fn angle_between(a: &Direction, b: &Direction) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// The setting-distortion map ω̂ = π sin²(ω/2).
///
/// Monotonically nondecreasing on [0, π], with fixed points 0, π/2, π;
/// ω̂ ≤ ω exactly when ω ≤ π/2.
pub fn omega_hat(omega: f64) -> f64 {
    assert!((0.0..=PI).contains(&omega), "omega out of [0, pi]: {omega}");
    let s = (0.5 * omega).sin();
    PI * s * s
}

/// Rotates the settings pair (a, b) into (â, b̂).
///
/// Both rotated vectors stay in span(a, b), symmetric about the unit
/// bisector u = (a+b)/|a+b|, at total angle ω̂ = π sin²(ω/2); â is on
/// a's side. Degenerate inputs: ω = 0 gives â = b̂ = a, and ω = π gives
/// â = a, b̂ = b (ω̂ = π, so the original pair already satisfies the
/// angle and symmetry conditions).
pub fn rotated_pair(a: &Direction, b: &Direction) -> RotatedPair {
    let omega = angle_between(a, b);
    if omega == 0.0 {
        return RotatedPair {
            a_hat: *a,
            b_hat: *a,
            omega,
            omega_hat: 0.0,
        };
    }
    if omega == PI {
        return RotatedPair {
            a_hat: *a,
            b_hat: *b,
            omega,
            omega_hat: PI,
        };
    }
    let wh = omega_hat(omega);

    // u = unit bisector; w = in-plane unit vector orthogonal to u on a's side.
    let u = Direction::new(a.x + b.x, a.y + b.y, a.z + b.z);
    let au = a.dot(&u);
    let w = Direction::new(a.x - au * u.x, a.y - au * u.y, a.z - au * u.z);

    let (s, c) = (0.5 * wh).sin_cos();
    let a_hat = Direction::new(c * u.x + s * w.x, c * u.y + s * w.y, c * u.z + s * w.z);
    let b_hat = Direction::new(c * u.x - s * w.x, c * u.y - s * w.y, c * u.z - s * w.z);
    RotatedPair {
        a_hat,
        b_hat,
        omega,
        omega_hat: wh,
    }
}

/// Cartesian coordinates of the hidden point:
/// λ(μ, τ) = (sin μ cos τ, sin μ sin τ, cos μ).
pub fn lambda_vector(p: &HiddenPoint) -> Direction {
    let (sm, cm) = p.mu.sin_cos();
    let (st, ct) = p.tau.sin_cos();
    Direction {
        x: sm * ct,
        y: sm * st,
        z: cm,
    }
}

/// Inverse CDF of the conditional μ density |sin μ|/4 on [0, 2π).
///
/// The CDF is piecewise in cos μ:
///
/// ```text
/// F(μ) = (1 − cos μ)/4            for μ ∈ [0, π],
/// F(μ) = 1/2 + (1 + cos μ)/4      for μ ∈ (π, 2π),
/// ```
///
/// so `u < 1/2` inverts to μ = arccos(1 − 4u) ∈ [0, π] and `u ≥ 1/2` to
/// μ = 2π − arccos(4u − 3) ∈ [π, 2π).
pub fn mu_inverse_cdf(u: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    if u < 0.5 {
        (1.0 - 4.0 * u).acos()
    } else {
        let mu = TWO_PI - (4.0 * u - 3.0).acos();
        reduce(mu, TWO_PI)
    }
}

/// Draws μ from the conditional density |sin μ|/4 on [0, 2π)
/// (independent of τ), by inverse CDF.
pub fn sample_mu_given_tau<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    mu_inverse_cdf(rng.gen::<f64>())
}

/// Draws a uniform point on the unit sphere in the (μ, τ) chart:
/// τ uniform on [0, π), then μ from |sin μ|/4. Consumes exactly two
/// uniforms per call, in that order.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> HiddenPoint {
    let tau = PI * rng.gen::<f64>();
    let mu = sample_mu_given_tau(rng);
    HiddenPoint::new(mu, tau)
}
