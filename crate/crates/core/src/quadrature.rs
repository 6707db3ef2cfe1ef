//! Adaptive numerical-integration oracles, correct in the presence of
//! sign discontinuities of the integrands.
//!
//! The model's outcome functions are ±1-valued, so the μ-integrands are
//! piecewise-constant-times-smooth. Brute oversampling would lose the
//! panel rule's accuracy at every jump; instead, jumps are located by a
//! coarse sign scan plus bisection and promoted to panel boundaries,
//! which restores spectral accuracy on every panel. The Gauss–Kronrod
//! nodes are interior, so the panels never evaluate an integrand exactly
//! on a jump.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::geometry::{self, Direction};
use crate::hvmodel;

const TWO_PI: f64 = 2.0 * PI;

/// Default absolute tolerance for μ-integrals.
pub const DEFAULT_MU_TOL: f64 = 1e-10;
/// Default absolute tolerance for τ-integrals. Outer integrals inherit
/// inner error, so the τ budget is looser than the μ budget.
pub const DEFAULT_TAU_TOL: f64 = 1e-8;
/// Scan resolution for sign-change detection. The shipped integrands
/// have at most four sign changes over a period.
pub const SIGN_SCAN_RESOLUTION: usize = 4096;

const MAX_PANELS: usize = 4000;
const BISECT_WIDTH: f64 = 1e-13;

/// Outcome of a quadrature: value, a-posteriori error bound, and the
/// number of integrand evaluations spent. The bound is reported honestly
/// even when it exceeds the requested tolerance.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

impl QuadResult {
    /// Did the run reach the requested tolerance?
    pub fn converged_to(&self, tol: f64) -> bool {
        self.error_bound <= tol
    }
}

// 21-point Gauss–Kronrod rule (10-point Gauss embedded), QUADPACK nodes.
#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// QUADPACK's error rescaling: sharpens the raw |K − G| estimate using
/// the integral of |f − mean(f)| over the panel.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Gauss–Kronrod panel. Returns (value, error estimate);
/// costs 21 evaluations, all strictly interior to (a, b).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut resg = 0.0;
    let mut resk = WGK21[10] * fc;
    let mut resabs = resk.abs();
    let mut fv = [0.0f64; 21];
    fv[20] = fc;

    for j in 0..10 {
        let x = half * XGK21[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[10 + j] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            resg += WG10[j / 2] * fsum;
        }
        resk += WGK21[j] * fsum;
        resabs += WGK21[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK21[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK21[j] * ((fv[j] - mean).abs() + (fv[10 + j] - mean).abs());
    }

    let value = resk * half;
    let err = rescale_error(
        (resk - resg) * half,
        resabs * half.abs(),
        resasc * half.abs(),
    );
    (value, err)
}

#[derive(Debug)]
struct Panel {
    err: f64,
    lo: f64,
    hi: f64,
    value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key() == other.cmp_key()
    }
}
impl Eq for Panel {}
impl Panel {
    fn cmp_key(&self) -> (u64, u64) {
        (self.err.to_bits(), self.lo.to_bits())
    }
}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on error; ties broken by position for determinism
        self.err
            .total_cmp(&other.err)
            .then(self.lo.total_cmp(&other.lo))
    }
}

/// Adaptive integration of `f` over [lo, hi] to absolute tolerance `tol`,
/// with mandatory panel boundaries at `breaks`. The worst panel is
/// bisected until the summed error estimate meets the tolerance or the
/// panel budget runs out; the final sum runs in panel order, so the
/// result does not depend on refinement history beyond the final
/// partition.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> QuadResult {
    assert!(hi > lo, "empty integration interval");
    assert!(tol > 0.0);

    let mut edges: Vec<f64> = vec![lo, hi];
    edges.extend(breaks.iter().copied().filter(|x| *x > lo && *x < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut evals = 0usize;
    let mut heap = BinaryHeap::new();
    let mut active_err = 0.0;
    for pair in edges.windows(2) {
        let (value, err) = gk21(&f, pair[0], pair[1]);
        evals += 21;
        active_err += err;
        heap.push(Panel {
            err,
            lo: pair[0],
            hi: pair[1],
            value,
        });
    }

    // Panels too narrow to bisect keep their honest error estimate but
    // leave the refinement queue.
    let mut frozen: Vec<Panel> = Vec::new();
    let mut frozen_err = 0.0;
    while active_err + frozen_err > tol && heap.len() + frozen.len() < MAX_PANELS {
        let Some(worst) = heap.pop() else { break };
        active_err -= worst.err;
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen_err += worst.err;
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk21(&f, worst.lo, mid);
        let (v2, e2) = gk21(&f, mid, worst.hi);
        evals += 42;
        active_err += e1 + e2;
        heap.push(Panel {
            err: e1,
            lo: worst.lo,
            hi: mid,
            value: v1,
        });
        heap.push(Panel {
            err: e2,
            lo: mid,
            hi: worst.hi,
            value: v2,
        });
    }

    let mut panels = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let value = panels.iter().map(|p| p.value).sum();
    let error_bound = panels.iter().map(|p| p.err).sum();
    QuadResult {
        value,
        error_bound,
        evaluations: evals,
    }
}

/// Adaptive integration without extra breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> QuadResult {
    integrate_with_breaks(f, lo, hi, &[], tol)
}

/// Locates the sign changes of `f` on [lo, hi]: a scan at the given
/// resolution brackets each change, then bisection narrows the bracket
/// to width ≤ 1e−13 and the midpoint is reported.
pub fn find_sign_changes<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Vec<f64> {
    assert!(resolution >= 2);
    let step = (hi - lo) / resolution as f64;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=resolution {
        let x = if i == resolution {
            hi
        } else {
            lo + step * i as f64
        };
        let fx = f(x);
        if f_prev * fx < 0.0 {
            let (mut a, mut b) = (x_prev, x);
            let mut fa = f_prev;
            while b - a > BISECT_WIDTH {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m);
                if fa * fm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

/// Estimates ∫₀^{2π} f(μ) |sin μ|/4 dμ, the μ-average of `f` against the
/// conditional hidden-variable density. Panels split at the kink of
/// |sin μ| at μ = π and at every detected sign change of `f`.
pub fn integrate_mu<F: Fn(f64) -> f64>(f: F, tol: f64) -> QuadResult {
    integrate_mu_with_breaks(f, &[], tol)
}

/// [`integrate_mu`] with caller-supplied extra panel boundaries, for
/// integrands whose discontinuities the caller can locate better than a
/// scan of the product can. A product of two sign functions flips twice
/// per factor; when two flips from different factors land in the same
/// scan cell the product scan misses both, so product integrands must
/// pass the per-factor flip points here.
pub fn integrate_mu_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    extra_breaks: &[f64],
    tol: f64,
) -> QuadResult {
    let mut breaks = find_sign_changes(&f, 0.0, TWO_PI, SIGN_SCAN_RESOLUTION);
    breaks.push(PI);
    breaks.extend_from_slice(extra_breaks);
    let scan_cost = SIGN_SCAN_RESOLUTION + 1;
    let weighted = |mu: f64| f(mu) * mu.sin().abs() * 0.25;
    let mut result = integrate_with_breaks(weighted, 0.0, TWO_PI, &breaks, tol);
    result.evaluations += scan_cost;
    result
}

/// Estimates (1/π) ∫₀^π f(τ) dτ, the τ-average of `f` against the
/// uniform upper-level density. Panels split at τ = π/2 (where cos τ
/// changes sign, a kink of every |χ|-type integrand) and at detected
/// sign changes of `f`.
pub fn integrate_tau<F: Fn(f64) -> f64>(f: F, tol: f64) -> QuadResult {
    let mut breaks = find_sign_changes(&f, 0.0, PI, SIGN_SCAN_RESOLUTION);
    breaks.push(PI / 2.0);
    let scan_cost = SIGN_SCAN_RESOLUTION + 1;
    let weighted = |tau: f64| f(tau) / PI;
    let mut result = integrate_with_breaks(weighted, 0.0, PI, &breaks, tol);
    result.evaluations += scan_cost;
    result
}

/// Brute-force oracle for the intermediate correlation of the singlet
/// model at fixed τ: the μ-average of the outcome product for the pair
/// (a, b). This is the route against which the closed forms are
/// validated; it never consults them.
///
/// Each factor of the product is scanned for sign changes on its own:
/// a single outcome flips exactly twice per period, half a period
/// apart, so the per-factor scan cannot miss a flip even where the two
/// factors flip almost simultaneously and the product scan would.
pub fn pair_correlation_oracle(a: &Direction, b: &Direction, tau: f64) -> QuadResult {
    let pair = geometry::rotated_pair(a, b);
    let side_a =
        |mu: f64| hvmodel::outcome_a_rotated(&pair, &crate::geometry::HiddenPoint::new(mu, tau));
    let side_b =
        |mu: f64| hvmodel::outcome_b_rotated(&pair, &crate::geometry::HiddenPoint::new(mu, tau));
    let mut breaks = find_sign_changes(&side_a, 0.0, TWO_PI, SIGN_SCAN_RESOLUTION);
    breaks.extend(find_sign_changes(
        &side_b,
        0.0,
        TWO_PI,
        SIGN_SCAN_RESOLUTION,
    ));
    let mut result =
        integrate_mu_with_breaks(|mu| side_a(mu) * side_b(mu), &breaks, DEFAULT_MU_TOL);
    result.evaluations += 2 * (SIGN_SCAN_RESOLUTION + 1);
    result
}
