//! Reproducible Monte Carlo estimates of the model quantities.
//!
//! Sampling is chunked: chunk `i` of a run draws from its own ChaCha
//! stream keyed by `(seed, domain, i)`, where the domain separates the
//! four pair estimates inside a CHSH combination. The chunk size is
//! fixed by this module (never by the worker count), and partial sums
//! are merged in chunk order, so results are bitwise identical across
//! runs, thread counts, and schedulers. Samples are ±1-valued, so the
//! partial sums are exact integers in f64.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closedform::ChshQuartet;
use crate::geometry::{Direction, HiddenPoint};
use crate::hvmodel::TwoLevelModel;

/// Samples per RNG stream. Fixed by specification so that chunking is
/// part of the estimator's definition, not an execution detail.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// A Monte Carlo run request: identical configs give identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub n: u64,
}

impl McConfig {
    pub fn new(seed: u64, n: u64) -> Self {
        assert!(n >= 1, "sample count must be at least 1");
        McConfig { seed, n }
    }
}

/// A sample mean with its standard error (sample standard deviation
/// divided by √n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Which party's outcome a marginal estimate averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

fn stream_rng(seed: u64, domain: u64, chunk: u64) -> ChaCha8Rng {
    debug_assert!(domain < (1 << 32) && chunk < (1 << 32));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 32) | chunk);
    rng
}

/// Chunked mean of a ±1-valued sampling function, merged in chunk order.
fn mean_over_chunks<S>(cfg: McConfig, domain: u64, sample: S) -> Estimate
where
    S: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(cfg.n >= 1);
    let chunks = cfg.n.div_ceil(CHUNK_SIZE);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = stream_rng(cfg.seed, domain, ci);
            let count = CHUNK_SIZE.min(cfg.n - ci * CHUNK_SIZE);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let x = sample(&mut rng);
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sum_sq += s2;
    }

    let nf = cfg.n as f64;
    let mean = sum / nf;
    let stderr = if cfg.n > 1 {
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Estimate {
        mean,
        stderr,
        n: cfg.n,
    }
}

/// Draws a hidden point from the model's distribution. Consumes exactly
/// two uniforms: τ first, then μ.
fn draw_hidden<M: TwoLevelModel, R: Rng + ?Sized>(model: &M, rng: &mut R) -> HiddenPoint {
    let tau = model.tau_from_uniform(rng.gen::<f64>());
    let mu = model.mu_from_uniform(rng.gen::<f64>(), tau);
    HiddenPoint::new(mu, tau)
}

/// Estimates the full correlation ⟨A ⊗ B⟩ by sampling the hidden
/// variable over the whole sphere.
pub fn estimate_correlation<M>(model: &M, a: &Direction, b: &Direction, cfg: McConfig) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    correlation_in_domain(model, a, b, cfg, 0)
}

fn correlation_in_domain<M>(
    model: &M,
    a: &Direction,
    b: &Direction,
    cfg: McConfig,
    domain: u64,
) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    mean_over_chunks(cfg, domain, |rng| {
        let p = draw_hidden(model, rng);
        model.outcome_a(a, b, &p) * model.outcome_b(a, b, &p)
    })
}

/// Estimates a single-party marginal ⟨A⟩ or ⟨B⟩.
pub fn estimate_marginal<M>(
    model: &M,
    side: Side,
    a: &Direction,
    b: &Direction,
    cfg: McConfig,
) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    mean_over_chunks(cfg, 0, |rng| {
        let p = draw_hidden(model, rng);
        match side {
            Side::A => model.outcome_a(a, b, &p),
            Side::B => model.outcome_b(a, b, &p),
        }
    })
}

/// Estimates the intermediate correlation E_τ(A, B) at fixed τ by
/// sampling μ from the conditional density. One uniform per sample.
pub fn estimate_correlation_at_tau<M>(
    model: &M,
    a: &Direction,
    b: &Direction,
    tau: f64,
    cfg: McConfig,
) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    correlation_at_tau_in_domain(model, a, b, tau, cfg, 0)
}

fn correlation_at_tau_in_domain<M>(
    model: &M,
    a: &Direction,
    b: &Direction,
    tau: f64,
    cfg: McConfig,
    domain: u64,
) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    mean_over_chunks(cfg, domain, |rng| {
        let mu = model.mu_from_uniform(rng.gen::<f64>(), tau);
        let p = HiddenPoint::new(mu, tau);
        model.outcome_a(a, b, &p) * model.outcome_b(a, b, &p)
    })
}

/// Estimates the CHSH combination F = E(A,B) + E(A,B′) + E(A′,B) −
/// E(A′,B′) on the quartet, with `cfg.n` samples per term. Full-sphere
/// averages by default; τ-conditional when `tau` is given. The four
/// terms use separate stream domains, and their standard errors combine
/// in quadrature.
pub fn estimate_f<M>(model: &M, quartet: &ChshQuartet, cfg: McConfig, tau: Option<f64>) -> Estimate
where
    M: TwoLevelModel + Sync,
{
    let pairs = quartet.pairs();
    let signs = [1.0, 1.0, 1.0, -1.0];
    let mut mean = 0.0;
    let mut var = 0.0;
    for (k, ((x, y), sign)) in pairs.iter().zip(signs).enumerate() {
        let e = match tau {
            Some(t) => correlation_at_tau_in_domain(model, x, y, t, cfg, k as u64),
            None => correlation_in_domain(model, x, y, cfg, k as u64),
        };
        mean += sign * e.mean;
        var += e.stderr * e.stderr;
    }
    Estimate {
        mean,
        stderr: var.sqrt(),
        n: cfg.n,
    }
}
