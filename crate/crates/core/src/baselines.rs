//! Reference correlation sources the model is measured against: the
//! quantum singlet value, the Popescu–Rohrlich box, and brute-forced
//! local-deterministic strategies.

use rand::Rng;

use crate::geometry::Direction;

/// The quantum singlet correlation for spin measurements along a and b,
/// in closed form: −a·b. This is the one fact about the state the whole
/// laboratory consumes, so no state-vector machinery is involved.
pub fn quantum_correlation(a: &Direction, b: &Direction) -> f64 {
    -a.dot(b)
}

/// The PR box: binary inputs x, y and binary outputs obeying
/// a ⊕ b = x·y with uniform marginals. Outputs are kept as bits; the
/// ±1 remap o ↦ 1 − 2o happens only at the correlation boundary.
#[derive(Debug, Clone, Copy, Default)]
pub struct PrBox;

impl PrBox {
    /// Exact correlation E(x, y) of the remapped ±1 outputs: +1 unless
    /// both inputs are 1, where the rule forces opposite outputs.
    pub fn correlation(x: bool, y: bool) -> f64 {
        if x && y {
            -1.0
        } else {
            1.0
        }
    }

    /// One use of the box: Alice's output is a fair coin, Bob's is
    /// whatever the constraint a ⊕ b = x·y forces.
    pub fn sample<R: Rng + ?Sized>(x: bool, y: bool, rng: &mut R) -> (bool, bool) {
        let a = rng.gen::<bool>();
        (a, a ^ (x && y))
    }

    /// CHSH combination over the four input pairs:
    /// E(0,0) + E(0,1) + E(1,0) − E(1,1) = 4, the no-signalling maximum.
    pub fn chsh_f() -> f64 {
        Self::correlation(false, false)
            + Self::correlation(false, true)
            + Self::correlation(true, false)
            - Self::correlation(true, true)
    }
}

/// A deterministic local strategy: one fixed ±1 answer per observable,
/// independent of the remote setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalStrategy {
    pub a: i8,
    pub a_prime: i8,
    pub b: i8,
    pub b_prime: i8,
}

impl LocalStrategy {
    pub fn chsh_f(&self) -> f64 {
        let (a, ap, b, bp) = (
            self.a as f64,
            self.a_prime as f64,
            self.b as f64,
            self.b_prime as f64,
        );
        a * b + a * bp + ap * b - ap * bp
    }
}

/// Brute-forces all 16 deterministic local strategies and returns the
/// maximum |F| together with a witness attaining it. Always 2.
pub fn local_max_f() -> (f64, LocalStrategy) {
    let signs = [1i8, -1i8];
    let mut best = f64::NEG_INFINITY;
    let mut witness = LocalStrategy {
        a: 1,
        a_prime: 1,
        b: 1,
        b_prime: 1,
    };
    for &a in &signs {
        for &ap in &signs {
            for &b in &signs {
                for &bp in &signs {
                    let s = LocalStrategy {
                        a,
                        a_prime: ap,
                        b,
                        b_prime: bp,
                    };
                    let f = s.chsh_f().abs();
                    if f > best {
                        best = f;
                        witness = s;
                    }
                }
            }
        }
    }
    (best, witness)
}
