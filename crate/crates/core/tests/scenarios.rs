mod common;

use common::{case, scenario};
use fdspc_core::metrics::smoothness;
use fdspc_core::{plan, plan_25d, scenarios, CrossConfig, PlanStatus, PlannerConfig, Scenario};

#[test]
fn bundled_scenarios_parse_with_free_endpoints() {
    for (name, text) in scenarios::BENCHMARKS
        .iter()
        .copied()
        .chain([("corridor_25d", scenarios::CORRIDOR_25D)])
    {
        let s = Scenario::from_json(text).unwrap();
        let w = s.planning_world();
        assert_eq!(w.inflation_radius(), Some(0.4), "{name}");
        assert!(!w.occupied_at(&s.start_state().point()), "{name}: start occupied");
        assert!(!w.occupied_at(&s.goal_point()), "{name}: goal occupied");
    }
    assert!(scenarios::by_name("nowhere").is_none());
}

#[test]
fn every_benchmark_solves_smoothly() {
    let cfg = PlannerConfig::default();
    for (name, _) in scenarios::BENCHMARKS {
        let c = case(name);
        let r = plan(&c.world, c.start, c.goal, &cfg).unwrap();
        assert!(r.is_success(), "{name}: {:?}", r.status);
        assert!(r.explore_calls > 0, "{name}: expected obstacles in the way");
        let (_, s2) = smoothness(&r.waypoints.points()).unwrap();
        assert!(s2 < 1.0, "{name}: S2 {s2}");
        assert!(r.profile.max_curvature_jump() <= cfg.rho * cfg.dt + 1e-9);
    }
}

#[test]
fn planar_planner_cannot_cross_the_dike() {
    let c = case("corridor_25d");
    let cfg = PlannerConfig::default();
    let r = plan(&c.world, c.start, c.goal, &cfg).unwrap();
    assert_eq!(r.status, PlanStatus::Exhausted);
    let r = plan_25d(&c.world, c.start, c.goal, &cfg, &CrossConfig::default()).unwrap();
    assert!(r.is_success());
}

#[test]
fn dike_spans_the_free_band() {
    let s = scenario("corridor_25d");
    let w = s.planning_world();
    // every free-band cell across the dike is blocked at ground level
    let (i, _) = w.cell_of(4.1, 1.6).unwrap();
    let blocked = (0..w.height()).all(|j| w.is_cell_occupied(i, j));
    assert!(blocked);
    assert_eq!(w.cell_obstacle_height(i, w.cell_of(4.1, 1.6).unwrap().1), 0.35);
}

#[test]
fn scenario_overrides_are_exposed() {
    let text = r#"{"resolution": 0.1, "width": 2, "height": 2, "start": [0.5, 0.5, 0], "goal": [1.5, 1.5],
                   "config": {"rho": 0.3}}"#;
    let s = Scenario::from_json(text).unwrap();
    assert_eq!(s.config.unwrap()["rho"], 0.3);
    assert!(s.robot_radius.is_none());
}
