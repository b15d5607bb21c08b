use intercept::{simulate, simulate_result, GuidanceLaw, Scenario, Termination};

const LAWS: [GuidanceLaw; 3] = [GuidanceLaw::Pg, GuidanceLaw::RangeIol, GuidanceLaw::LosIol];

#[test]
fn nominal_engagement_intercepts_with_every_law() {
    for law in GuidanceLaw::ALL {
        let r = simulate_result(&Scenario::nominal(law)).unwrap();
        assert_eq!(r.termination, Termination::Intercepted, "{law}");
        assert!(r.miss_distance < 1.0, "{law}: {}", r.miss_distance);
        assert!(r.intercept_time > 10.0 && r.intercept_time < 25.0);
        assert!(r.closing_velocity > 0.0);
    }
}

#[test]
fn identical_scenarios_give_identical_results() {
    for law in LAWS {
        let s = Scenario::nominal(law);
        let a = simulate_result(&s).unwrap();
        let b = simulate_result(&s).unwrap();
        assert_eq!(a.intercept_time.to_bits(), b.intercept_time.to_bits());
        assert_eq!(a.miss_distance.to_bits(), b.miss_distance.to_bits());
        assert_eq!(a.closing_velocity.to_bits(), b.closing_velocity.to_bits());
        assert_eq!(a.termination, b.termination);
        // Recording the trajectory does not change the outcome.
        assert_eq!(simulate(&s).unwrap().1, a);
    }
}

#[test]
fn halving_the_step_barely_moves_the_miss() {
    for law in LAWS {
        let coarse = Scenario::nominal(law);
        let fine = Scenario {
            dt: coarse.dt / 2.0,
            ..coarse
        };
        let a = simulate_result(&coarse).unwrap();
        let b = simulate_result(&fine).unwrap();
        assert!((a.miss_distance - b.miss_distance).abs() < 0.01, "{law}: {a:?} vs {b:?}");
    }
}

#[test]
fn logged_commands_respect_saturation() {
    for law in GuidanceLaw::ALL {
        let mut s = Scenario::nominal(law);
        let limit = 5.0 * s.model.consts.g;
        s.guidance.saturation_limit = Some(limit);
        s.pursuer.flight_path = 40f64.to_radians();
        let (traj, _) = simulate(&s).unwrap();
        let mut saturated = 0;
        for sample in &traj.samples {
            assert!(sample.command.u.abs() <= limit, "{law}");
            saturated += usize::from(sample.command.saturated);
        }
        assert!(saturated > 0, "{law} never hit the limit");
    }
}

#[test]
fn pg_range_decreases_until_closest_approach() {
    let (traj, r) = simulate(&Scenario::nominal(GuidanceLaw::Pg)).unwrap();
    assert!(r.success);
    for sample in &traj.samples {
        assert!(sample.state.cartesian_range_rate() < 0.0, "t = {}", sample.state.t);
    }
}

#[test]
fn trajectory_is_step_uniform() {
    let s = Scenario::nominal(GuidanceLaw::LosIol);
    let (traj, r) = simulate(&s).unwrap();
    for (k, sample) in traj.samples.iter().enumerate() {
        assert_eq!(sample.state.t, k as f64 * s.dt);
    }
    assert!(traj.samples.last().unwrap().state.t <= r.intercept_time + s.dt);
}

#[test]
fn receding_target_times_out_or_diverges() {
    let mut s = Scenario::nominal(GuidanceLaw::Pg);
    // Pursuer flies away from an evader that is already faster.
    s.pursuer.flight_path = 180f64.to_radians();
    s.pursuer.speed = 300.0;
    s.model.pursuer.thrust = 0.0;
    s.evader.speed = 900.0;
    s.t_max = 5.0;
    let r = simulate_result(&s).unwrap();
    assert!(!r.success);
    assert!(matches!(r.termination, Termination::Timeout | Termination::Diverged));
}

#[test]
fn invalid_scenario_is_rejected() {
    let mut s = Scenario::nominal(GuidanceLaw::Pg);
    s.dt = 0.0;
    assert!(simulate_result(&s).is_err());
    let mut s = Scenario::nominal(GuidanceLaw::Pg);
    s.evader = s.pursuer;
    assert!(simulate_result(&s).is_err());
}
