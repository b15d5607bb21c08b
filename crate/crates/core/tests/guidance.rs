use std::cell::Cell;
use std::f64::consts::PI;

use intercept::guidance::{
    correction_sign, fuzzy_blend, los_iol_command, membership_iol, membership_pg, range_iol_blended,
};
use intercept::{EngagementModel, EngagementState, GuidanceLaw, GuidanceSpec, MembershipParams, VehicleState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn partition_of_unity_on_uniform_grid() {
    let params = MembershipParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let s: f64 = rng.random_range(-1.0..=1.0);
        let (iol, pg) = (membership_iol(s, &params), membership_pg(s, &params));
        assert_eq!(iol + pg, 1.0, "s = {s}");
        assert_eq!(iol, membership_iol(-s, &params));
        assert!((0.0..=1.0).contains(&iol));
    }
}

proptest! {
    #[test]
    fn membership_non_decreasing_in_magnitude(a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let params = MembershipParams::default();
        let (lo, hi) = if a.abs() <= b.abs() { (a, b) } else { (b, a) };
        prop_assert!(membership_iol(lo, &params) <= membership_iol(hi, &params));
    }

    #[test]
    fn membership_continuous(s in -1.0f64..=1.0) {
        let params = MembershipParams::default();
        let step = 1e-9;
        let jump = (membership_iol(s + step, &params) - membership_iol(s, &params)).abs();
        // Ramp slope is 1 / (ramp_end - dead_band) = 10.
        prop_assert!(jump <= 10.0 * step * (1.0 + 1e-6));
    }
}

fn state(range: f64, los: f64, gp: f64) -> EngagementState {
    let p = VehicleState {
        speed: 800.0,
        flight_path: gp,
        downrange: 0.0,
        altitude: 5000.0,
    };
    let e = VehicleState {
        speed: 500.0,
        flight_path: 0.3,
        downrange: range * los.cos(),
        altitude: 5000.0 + range * los.sin(),
    };
    EngagementState::from_vehicles(0.0, p, e)
}

#[test]
fn blend_skips_iol_branch_at_zero_weight() {
    let params = MembershipParams::default();
    let called = Cell::new(false);
    for s in [0.0, 0.05, -0.1, 0.1] {
        let (u, mu) = fuzzy_blend(
            s,
            &params,
            || {
                called.set(true);
                Ok(f64::INFINITY)
            },
            || Ok(7.0),
        )
        .unwrap();
        assert_eq!((u, mu), (7.0, 0.0));
    }
    assert!(!called.get());
}

#[test]
fn blended_command_finite_on_singular_geometry() {
    let model = EngagementModel::default();
    let spec = GuidanceSpec::new(GuidanceLaw::RangeIol);
    // Pursuer heading straight along the LOS: sin(psi - gamma_P) = 0.
    let s = state(4000.0, 0.4, 0.4);
    let cmd = range_iol_blended(&s, &spec, &model, 0.0).unwrap();
    assert_eq!(cmd.mu_iol, 0.0);
    assert!(cmd.u.is_finite());
}

#[test]
fn correction_is_an_involution() {
    let model = EngagementModel::default();
    let mut spec = GuidanceSpec::new(GuidanceLaw::LosIol);
    spec.saturation_limit = None;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let s = state(rng.random_range(500.0..20_000.0), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let plain = los_iol_command(&s, &spec, &model, 0.0, false).unwrap().u;
        let corrected = los_iol_command(&s, &spec, &model, 0.0, true).unwrap().u;
        assert_eq!(corrected * correction_sign(&s), plain);
        assert_eq!(corrected.abs(), plain.abs());
    }
}

#[test]
fn correction_boundary_is_strict() {
    let at = |deg: f64| correction_sign(&state(5000.0, 0.0, deg.to_radians()));
    assert_eq!(at(90.0), 1.0);
    assert_eq!(at(-90.0), 1.0);
    assert_eq!(at(90.5), -1.0);
    assert_eq!(at(-90.5), -1.0);
    assert_eq!(at(180.0), -1.0);
    // Wrapped before the test: 350° is 10° off the LOS.
    assert_eq!(at(350.0), 1.0);
}
