//! Property-based invariants over randomly generated inputs.

use std::f64::consts::PI;

use hvlab::analysis::{self, RegionLabel};
use hvlab::closedform;
use hvlab::geometry::{self, Direction, HiddenPoint};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| Direction::new(x, y, z))
}

proptest! {
    #[test]
    fn directions_are_unit(d in direction()) {
        let n = d.x() * d.x() + d.y() * d.y() + d.z() * d.z();
        prop_assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hidden_points_normalize_into_range(mu in -20.0f64..20.0, tau in -20.0f64..20.0) {
        let p = HiddenPoint::new(mu, tau);
        prop_assert!((0.0..2.0 * PI).contains(&p.mu()));
        prop_assert!((0.0..PI).contains(&p.tau()));
    }

    #[test]
    fn lambda_is_on_the_sphere(mu in 0.0f64..(2.0 * PI), tau in 0.0f64..PI) {
        let v = geometry::lambda_vector(&HiddenPoint::new(mu, tau));
        let n = v.x() * v.x() + v.y() * v.y() + v.z() * v.z();
        prop_assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega_hat_stays_in_range(omega in 0.0f64..=PI) {
        let wh = geometry::omega_hat(omega);
        prop_assert!((0.0..=PI).contains(&wh));
    }

    #[test]
    fn rotated_pair_respects_its_contract(a in direction(), b in direction()) {
        let omega = geometry::angle_between(&a, &b);
        prop_assume!(omega > 1e-6 && omega < PI - 1e-6);
        let rp = geometry::rotated_pair(&a, &b);
        prop_assert!((geometry::angle_between(&rp.a_hat, &rp.b_hat) - rp.omega_hat).abs() < 1e-10);
        let u = Direction::new(a.x() + b.x(), a.y() + b.y(), a.z() + b.z());
        prop_assert!((u.dot(&rp.a_hat) - u.dot(&rp.b_hat)).abs() < 1e-10);
        // â stays on a's side, b̂ on b's
        prop_assert!(rp.a_hat.dot(&a) >= rp.a_hat.dot(&b) - 1e-12);
        prop_assert!(rp.b_hat.dot(&b) >= rp.b_hat.dot(&a) - 1e-12);
    }

    #[test]
    fn chi_and_correlations_stay_in_range(
        alpha in 0.0f64..=(PI / 4.0),
        tau in 0.0f64..PI,
    ) {
        for j in 1..=4 {
            prop_assert!(closedform::chi(j, alpha, tau).abs() <= 1.0 + 1e-15);
        }
        for c in [
            closedform::corr_ab(alpha, tau),
            closedform::corr_apbp(alpha, tau),
            closedform::corr_mixed(alpha, tau),
        ] {
            prop_assert!((-1.0 - 1e-14..=1.0 + 1e-14).contains(&c));
        }
        let f = closedform::f_tau(alpha, tau);
        prop_assert!(f.abs() <= 4.0 + 1e-9);
        // classification is total and consistent on model output
        let label = analysis::classify(f).unwrap();
        match label {
            RegionLabel::Local => prop_assert!(f.abs() <= 2.0),
            RegionLabel::Quantum => prop_assert!(f.abs() > 2.0 && f.abs() <= analysis::QUANTUM_BOUND),
            RegionLabel::Superquantum => prop_assert!(f.abs() > analysis::QUANTUM_BOUND),
        }
    }

    #[test]
    fn mu_inverse_cdf_inverts_into_range(u in 0.0f64..1.0) {
        let mu = geometry::mu_inverse_cdf(u);
        prop_assert!((0.0..2.0 * PI).contains(&mu));
        // the CDF is monotone, so nearby quantiles stay ordered
        let v = (u + 1e-6).min(1.0 - 1e-12);
        prop_assert!(geometry::mu_inverse_cdf(v) >= mu - 1e-9);
    }
}
