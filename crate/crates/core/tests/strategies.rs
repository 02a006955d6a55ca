mod common;

use std::f64::consts::PI;

use common::{deg, desk, gripper, sheet_of, specimen};
use sheetgrasp::materials::{derive_stiffness, Material};
use sheetgrasp::scene::Scene;
use sheetgrasp::strategies::{
    classify_grasp_position, plan_edge_grasp, plan_top_grasp, plan_top_scoop, plan_wall_grasp, slide_normal_force,
    GraspPositionClass, GraspRequest, InfeasibleReason, Planner, StageName, Strategy, Verdict,
};
use sheetgrasp::Error;

/// Independent top-grasp oracle: edge contacts buckle the run to the free
/// edge pinned at it, interior contacts the span between the fingers.
fn top_grasp_oracle(m: &Material, x: f64, force: f64) -> bool {
    let ei = m.youngs_modulus * m.width * m.thickness.powi(3) / 12.0;
    let (len, factor) = if x <= 0.096 { (x, 0.7) } else { (0.096, 0.5) };
    m.mu1 < m.mu0 && force * (m.mu0 - m.mu1) > PI * PI * ei / (factor * len).powi(2)
}

#[test]
fn position_classes() {
    let g = gripper();
    assert_eq!(classify_grasp_position(0.090, &g).unwrap(), (GraspPositionClass::Edge, 0.7));
    assert_eq!(classify_grasp_position(0.130, &g).unwrap(), (GraspPositionClass::NonEdge, 0.5));
    assert!(matches!(classify_grasp_position(0.020, &g), Err(Error::UngraspablePosition { .. })));
}

#[test]
fn top_grasp_cases() {
    let g = gripper();
    let plan = plan_top_grasp(&GraspRequest::top_grasp(0.090), &sheet_of(specimen(80.0)), &g).unwrap();
    assert!(plan.is_feasible());
    for x in [0.050, 0.070, 0.090, 0.110, 0.130] {
        let plan = plan_top_grasp(&GraspRequest::top_grasp(x), &sheet_of(specimen(250.0)), &g).unwrap();
        assert!(!plan.is_feasible(), "250 g at {x}");
    }
    let slippery = specimen(80.0).with_friction(0.3, 0.6).unwrap();
    for f in [1.0, 1e3, 1e9] {
        let plan = plan_top_grasp(&GraspRequest::top_grasp(0.09).with_normal_force(f), &sheet_of(slippery.clone()), &g).unwrap();
        assert_eq!(plan.verdict, Verdict::Infeasible(InfeasibleReason::Friction));
    }
}

#[test]
fn top_grasp_matches_oracle_on_grid() {
    let g = gripper();
    for gsm in [17.0, 35.0, 60.0, 80.0, 100.0, 120.0, 150.0, 200.0, 230.0, 250.0] {
        for x in [0.050, 0.070, 0.090, 0.110, 0.130] {
            for f in [5.0, 25.0, 60.0] {
                let m = specimen(gsm);
                let plan = plan_top_grasp(&GraspRequest::top_grasp(x).with_normal_force(f), &sheet_of(m.clone()), &g).unwrap();
                assert_eq!(plan.is_feasible(), top_grasp_oracle(&m, x, f), "gsm {gsm} x {x} F {f}");
            }
        }
    }
}

#[test]
fn top_scoop_cases() {
    let g = gripper();
    let s = sheet_of(specimen(80.0));
    let narrow = plan_top_scoop(&GraspRequest::top_scoop(0.050, deg(5.0)), &s, &g).unwrap();
    assert_eq!(narrow.verdict, Verdict::Infeasible(InfeasibleReason::ContactWidth));
    assert!(plan_top_scoop(&GraspRequest::top_scoop(0.090, deg(5.0)), &s, &g).unwrap().is_feasible());
    let flat = plan_top_scoop(&GraspRequest::top_scoop(0.090, 0.0), &s, &g).unwrap();
    let top = plan_top_grasp(&GraspRequest::top_grasp(0.090), &s, &g).unwrap();
    assert_eq!(flat.stages, top.stages);
    assert!(matches!(plan_top_scoop(&GraspRequest::top_scoop(0.090, deg(8.0)), &s, &g), Err(Error::Tilt { .. })));
}

#[test]
fn scoop_widens_interior_margin() {
    let g = gripper();
    for gsm in [17.0, 80.0, 150.0, 250.0] {
        let s = sheet_of(specimen(gsm));
        let scoop = plan_top_scoop(&GraspRequest::top_scoop(0.130, deg(5.0)), &s, &g).unwrap();
        let top = plan_top_grasp(&GraspRequest::top_grasp(0.130), &s, &g).unwrap();
        assert!(scoop.margins.buckling.unwrap() > top.margins.buckling.unwrap(), "{gsm} g");
        // Edge contacts get no help from the tilt.
        let scoop = plan_top_scoop(&GraspRequest::top_scoop(0.090, deg(5.0)), &s, &g).unwrap();
        let top = plan_top_grasp(&GraspRequest::top_grasp(0.090), &s, &g).unwrap();
        assert_eq!(scoop.margins.buckling, top.margins.buckling);
    }
}

#[test]
fn wall_grasp_cases() {
    let g = gripper();
    let scene = desk(80.0);
    let wall = scene.wall().unwrap();
    let at = |t: f64, d: f64| plan_wall_grasp(&GraspRequest::wall_grasp(deg(t), d, 0.1485), &scene.sheet, &g, wall).unwrap();
    assert!((0.096 * deg(60.0).cos() - 0.048).abs() < 1e-15);
    assert!(at(60.0, 0.050).is_feasible());
    assert!(!at(60.0, 0.100).is_feasible());
    assert_eq!(at(60.0, 0.048).verdict, Verdict::Infeasible(InfeasibleReason::Collision));
    assert_eq!(at(30.0, 0.1485).verdict, Verdict::Infeasible(InfeasibleReason::NoSlack));
    assert_eq!(at(30.0, 0.160).verdict, Verdict::Infeasible(InfeasibleReason::NoSlack));
    let missing = Scene::new(scene.sheet.clone());
    let req = GraspRequest::wall_grasp(deg(60.0), 0.05, 0.1485);
    assert!(matches!(Planner::new(&g).plan(&req, &missing), Err(Error::MissingConstraint(_))));
}

#[test]
fn wall_grasp_heavy_stock_at_steep_tilt() {
    let g = gripper();
    for gsm in [230.0, 250.0] {
        let scene = desk(gsm);
        let plan = plan_wall_grasp(&GraspRequest::wall_grasp(deg(60.0), 0.050, 0.1485), &scene.sheet, &g, scene.wall().unwrap()).unwrap();
        assert!(plan.is_feasible(), "{gsm} g");
    }
}

#[test]
fn wall_grasp_transform_is_the_slide() {
    let g = gripper();
    let scene = desk(80.0);
    let plan = plan_wall_grasp(&GraspRequest::wall_grasp(deg(30.0), 0.100, 0.1485), &scene.sheet, &g, scene.wall().unwrap()).unwrap();
    let stages: Vec<_> = plan.stages.iter().map(|w| w.stage).collect();
    assert_eq!(stages, [StageName::Approach, StageName::Contact, StageName::Slide, StageName::Lift]);
    let initial = plan.stages[1].pose;
    let objective = plan.stages[2].pose;
    let got = plan.transform.unwrap().apply(&initial);
    assert!((got.x - objective.x).abs() < 1e-12 && (got.y - objective.y).abs() < 1e-12);
    // Wall at x = 0.7: the objective sits 100 mm short of it.
    assert!((objective.x - 0.600).abs() < 1e-12);
}

#[test]
fn edge_grasp_cases() {
    let g = gripper();
    for gsm in [17.0, 35.0, 60.0, 80.0, 100.0, 120.0] {
        let scene = desk(gsm);
        let m = &scene.sheet.material;
        let s = derive_stiffness(m).unwrap();
        let sag = s.lambda * 9.81 * 0.06f64.powi(4) / (8.0 * s.ei);
        let plan = plan_edge_grasp(&GraspRequest::edge_grasp(0.060), &scene.sheet, &g, scene.table_edge().unwrap()).unwrap();
        assert!(plan.is_feasible(), "{gsm} g sags {sag}");
        assert!((plan.margins.deflection_clearance.unwrap() - (0.048 - sag)).abs() < 1e-12);
    }
    let scene = desk(80.0);
    let none = plan_edge_grasp(&GraspRequest::edge_grasp(0.0), &scene.sheet, &g, scene.table_edge().unwrap()).unwrap();
    assert_eq!(none.verdict, Verdict::Infeasible(InfeasibleReason::InsufficientOverhang));
    let mut rigid = scene.clone();
    rigid.sheet.material = rigid.sheet.material.with_youngs_modulus(1e18).unwrap();
    let plan = plan_edge_grasp(&GraspRequest::edge_grasp(0.2), &rigid.sheet, &g, rigid.table_edge().unwrap()).unwrap();
    assert!(plan.is_feasible());
    assert!(plan.margins.deflection_clearance.unwrap() > 0.048 - 1e-8);
}

#[test]
fn slide_force_examples() {
    assert!((slide_normal_force(deg(30.0)).unwrap() - 10.0).abs() < 1e-12);
    assert!((slide_normal_force(deg(60.0)).unwrap() - 60.0).abs() < 1e-12);
    assert!((slide_normal_force(deg(45.0)).unwrap() - 35.0).abs() < 1e-12);
    assert!((slide_normal_force(deg(5.0)).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(slide_normal_force(deg(95.0)), Err(Error::Domain(_))));
    let mut last = 0.0;
    for d in 0..=90 {
        let f = slide_normal_force(deg(d as f64)).unwrap();
        assert!(f >= last);
        last = f;
    }
}

#[test]
fn every_feasible_plan_follows_its_order() {
    let g = gripper();
    let scene = desk(80.0);
    let reqs = [
        GraspRequest::top_grasp(0.09),
        GraspRequest::top_scoop(0.09, deg(5.0)),
        GraspRequest::wall_grasp(deg(60.0), 0.05, 0.1485),
        GraspRequest::edge_grasp(0.06),
    ];
    for (req, strategy) in reqs.iter().zip(Strategy::ALL) {
        let plan = Planner::new(&g).plan(req, &scene).unwrap();
        assert!(plan.is_feasible(), "{strategy}");
        assert_eq!(plan.strategy, strategy);
        assert_eq!(plan.stage_names(), strategy.stage_order());
    }
}

#[test]
fn plan_json_is_stable() {
    let g = gripper();
    let scene = desk(80.0);
    let plan = Planner::new(&g).plan(&GraspRequest::edge_grasp(0.06), &scene).unwrap();
    let a = plan.to_json();
    assert_eq!(a, Planner::new(&g).plan(&GraspRequest::edge_grasp(0.06), &scene).unwrap().to_json());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["verdict"], "feasible");
    assert!(v.get("reason").is_none());
    assert_eq!(v["stages"].as_array().unwrap().len(), 4);
    assert_eq!(v["stages"][0]["pose_mm_deg"]["z_mm"], 50.0);
}
