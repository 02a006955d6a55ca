mod common;

use common::{deg, library, DESK_SCENE};
use nalgebra::{Point2, Rotation2};
use sheetgrasp::scene::{
    normalize_angle, pose_from_corners, transform_between, ConstraintKind, Pose2D, Scene, SceneFile, SheetInstance,
};
use sheetgrasp::Error;

fn rect(cx: f64, cy: f64, yaw: f64, l: f64, w: f64) -> [Point2<f64>; 4] {
    let r = Rotation2::new(yaw);
    [(-l / 2.0, -w / 2.0), (l / 2.0, -w / 2.0), (l / 2.0, w / 2.0), (-l / 2.0, w / 2.0)]
        .map(|(u, v)| Point2::new(cx, cy) + r * nalgebra::Vector2::new(u, v))
}

#[test]
fn axis_aligned_rectangle() {
    let p = pose_from_corners(&rect(0.0, 0.0, 0.0, 0.297, 0.105)).unwrap();
    assert!(p.x.abs() < 1e-15 && p.y.abs() < 1e-15 && p.yaw.abs() < 1e-15);
}

#[test]
fn rotated_rectangle() {
    let p = pose_from_corners(&rect(0.0, 0.0, deg(30.0), 0.297, 0.105)).unwrap();
    assert!((p.yaw - deg(30.0)).abs() < 1e-12);
}

#[test]
fn a4_strip_round_trip() {
    let p = pose_from_corners(&rect(0.4, 0.2, deg(45.0), 0.297, 0.105)).unwrap();
    assert!((p.x - 0.4).abs() < 1e-9 && (p.y - 0.2).abs() < 1e-9 && (p.yaw - deg(45.0)).abs() < 1e-9);
}

#[test]
fn degenerate_corners() {
    let line = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0), Point2::new(3.0, 0.0)];
    assert!(matches!(pose_from_corners(&line), Err(Error::Geometry(_))));
    let bowtie = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    assert!(pose_from_corners(&bowtie).is_err());
}

#[test]
fn transform_examples() {
    let a = Pose2D::new(0.1, 0.2, deg(30.0));
    assert!(transform_between(&a, &a).max_abs_diff(&sheetgrasp::scene::TransformMatrix::identity()) < 1e-15);

    let t = transform_between(&Pose2D::new(0.0, 0.0, 0.0), &Pose2D::new(0.1, 0.0, 0.0));
    assert_eq!(t.yaw(), 0.0);
    assert!((t.translation().0 - 0.1).abs() < 1e-15 && t.translation().1.abs() < 1e-15);

    let b = Pose2D::new(0.3, -0.1, deg(80.0));
    let got = transform_between(&a, &b).apply(&a);
    assert!((got.x - b.x).abs() < 1e-12 && (got.y - b.y).abs() < 1e-12);
    assert!(normalize_angle(got.yaw - b.yaw).abs() < 1e-12);
}

#[test]
fn transform_matrix_is_rigid() {
    let m = transform_between(&Pose2D::new(0.1, 0.2, 0.3), &Pose2D::new(-0.4, 0.5, 2.9)).matrix();
    let (c, s) = (m[0][0], m[1][0]);
    assert!((c * c + s * s - 1.0).abs() < 1e-12);
    assert!((m[0][1] + s).abs() < 1e-15 && (m[1][1] - c).abs() < 1e-15);
    assert_eq!(m[2], [0.0, 0.0, 1.0]);
}

#[test]
fn desk_scene_file() {
    let scene = Scene::from_json_str(DESK_SCENE, &library()).unwrap();
    assert_eq!(scene.sheet.material.name, "printing-80");
    assert!((scene.sheet.pose.x - 0.4).abs() < 1e-15);
    assert_eq!(scene.wall().unwrap().kind, ConstraintKind::Wall);
    assert_eq!(scene.wall().unwrap().height, Some(0.08));
    assert!(scene.table_edge().is_some());
}

#[test]
fn corner_scene_file() {
    let text = include_str!("../data/scenes/cardboard_corners.json");
    let scene = Scene::from_json_str(text, &library()).unwrap();
    assert!((scene.sheet.pose.yaw - deg(45.0)).abs() < 1e-6);
    assert!((scene.sheet.pose.x - 0.4).abs() < 1e-6);
    assert_eq!(scene.sheet.material.mu1, 0.4);
}

#[test]
fn scene_file_round_trip() {
    let scene = Scene::from_json_str(DESK_SCENE, &library()).unwrap();
    let text = serde_json::to_string(&SceneFile::from_scene(&scene)).unwrap();
    let again = Scene::from_json_str(&text, &library()).unwrap();
    assert_eq!(again.sheet.pose, scene.sheet.pose);
    for (a, b) in again.constraints.iter().zip(&scene.constraints) {
        assert_eq!(a.kind, b.kind);
        assert!((a.start - b.start).norm() < 1e-15 && (a.end - b.end).norm() < 1e-15);
        assert_eq!(a.height, b.height);
    }
}

#[test]
fn scene_file_errors_name_the_line() {
    let broken = DESK_SCENE.replacen("\"length_mm\": 297.0,", "\"length_mm\": ,", 1);
    match Scene::from_json_str(&broken, &library()) {
        Err(Error::Parse(msg)) => assert!(msg.contains("line 4"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sheet_corners_match_pose() {
    let s = SheetInstance::from_pose(common::specimen(80.0), 0.297, 0.105, Pose2D::new(0.4, 0.2, deg(45.0))).unwrap();
    let expect = rect(0.4, 0.2, deg(45.0), 0.297, 0.105);
    for (a, b) in s.corners.iter().zip(expect.iter()) {
        assert!((a - b).norm() < 1e-9);
    }
}
