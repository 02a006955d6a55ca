//! Planar desk scene: the sheet, walls and table edges, and the rigid-motion
//! arithmetic the planners use.
//!
//! Everything lives in the table frame with the tabletop at `z = 0`. Poses are
//! planar (`x`, `y`, `yaw`) with a height carried alongside for collision
//! checks and waypoints.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Isometry2, Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{Material, MaterialLibrary};
use crate::{mm, to_mm};

/// Aspect ratio below which a sheet's long axis is considered ambiguous.
pub const NEAR_SQUARE_ASPECT: f64 = 1.05;

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Wraps an axis direction (defined modulo π) into (−π/2, π/2].
pub fn normalize_axis(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r > FRAC_PI_2 {
        r - PI
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    #[serde(default)]
    pub z: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        Pose2D { x, y, yaw: normalize_angle(yaw), z: 0.0 }
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn position(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }

    pub fn isometry(&self) -> Isometry2<f64> {
        Isometry2::new(Vector2::new(self.x, self.y), self.yaw)
    }

    fn from_isometry(iso: &Isometry2<f64>, z: f64) -> Self {
        Pose2D {
            x: iso.translation.x,
            y: iso.translation.y,
            yaw: normalize_angle(iso.rotation.angle()),
            z,
        }
    }

    /// Unit vector along the pose heading.
    pub fn heading(&self) -> Vector2<f64> {
        Vector2::new(self.yaw.cos(), self.yaw.sin())
    }
}

/// Planar rigid transform in the table frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformMatrix(Isometry2<f64>);

impl TransformMatrix {
    pub fn identity() -> Self {
        TransformMatrix(Isometry2::identity())
    }

    pub fn from_parts(tx: f64, ty: f64, yaw: f64) -> Self {
        TransformMatrix(Isometry2::new(Vector2::new(tx, ty), yaw))
    }

    pub fn apply(&self, pose: &Pose2D) -> Pose2D {
        Pose2D::from_isometry(&(self.0 * pose.isometry()), pose.z)
    }

    pub fn apply_point(&self, p: &Point2<f64>) -> Point2<f64> {
        self.0.transform_point(p)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &TransformMatrix) -> TransformMatrix {
        TransformMatrix(self.0 * first.0)
    }

    pub fn inverse(&self) -> TransformMatrix {
        TransformMatrix(self.0.inverse())
    }

    pub fn yaw(&self) -> f64 {
        self.0.rotation.angle()
    }

    pub fn translation(&self) -> (f64, f64) {
        (self.0.translation.x, self.0.translation.y)
    }

    /// Homogeneous 3×3 matrix, row-major.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let m = self.0.to_homogeneous();
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    /// Largest absolute element difference of the homogeneous matrices.
    pub fn max_abs_diff(&self, other: &TransformMatrix) -> f64 {
        let (a, b) = (self.matrix(), other.matrix());
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((a[i][j] - b[i][j]).abs());
            }
        }
        worst
    }
}

/// Transform taking `from` onto `to`, expressed in the table frame.
pub fn transform_between(from: &Pose2D, to: &Pose2D) -> TransformMatrix {
    TransformMatrix(to.isometry() * from.isometry().inverse())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerFit {
    pub pose: Pose2D,
    /// Mean length of the longer edge pair, m.
    pub length: f64,
    /// Mean length of the shorter edge pair, m.
    pub width: f64,
    /// The long axis is ambiguous (aspect below [`NEAR_SQUARE_ASPECT`]).
    pub near_square: bool,
}

/// Fits centre, long-axis yaw and side lengths to four corners given in
/// boundary order (either winding).
pub fn fit_corners(corners: &[Point2<f64>; 4]) -> Result<CornerFit> {
    if corners.iter().any(|c| !(c.x.is_finite() && c.y.is_finite())) {
        return Err(Error::Geometry("non-finite corner".into()));
    }
    let edges: Vec<Vector2<f64>> = (0..4).map(|i| corners[(i + 1) % 4] - corners[i]).collect();
    let scale = edges.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Geometry("all corners coincide".into()));
    }
    let turns: Vec<f64> = (0..4).map(|i| edges[i].perp(&edges[(i + 1) % 4])).collect();
    let eps = 1e-9 * scale * scale;
    let convex = turns.iter().all(|&t| t > eps) || turns.iter().all(|&t| t < -eps);
    if !convex {
        return Err(Error::Geometry("corners do not form a convex quadrilateral".into()));
    }
    let centre = corners.iter().fold(Vector2::zeros(), |acc, c| acc + c.coords) / 4.0;

    let pair_a = edges[0].norm() + edges[2].norm();
    let pair_b = edges[1].norm() + edges[3].norm();
    let (long_dir, length, width) = if pair_a >= pair_b {
        (edges[0] - edges[2], pair_a / 2.0, pair_b / 2.0)
    } else {
        (edges[1] - edges[3], pair_b / 2.0, pair_a / 2.0)
    };
    let yaw = normalize_axis(long_dir.y.atan2(long_dir.x));
    Ok(CornerFit {
        pose: Pose2D { x: centre.x, y: centre.y, yaw, z: 0.0 },
        length,
        width,
        near_square: length / width < NEAR_SQUARE_ASPECT,
    })
}

pub fn pose_from_corners(corners: &[Point2<f64>; 4]) -> Result<Pose2D> {
    fit_corners(corners).map(|f| f.pose)
}

/// A single sheet lying flat on the table.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetInstance {
    pub material: Material,
    /// Along the long axis, m.
    pub length: f64,
    /// m
    pub width: f64,
    pub pose: Pose2D,
    pub corners: [Point2<f64>; 4],
}

impl SheetInstance {
    pub fn from_pose(material: Material, length: f64, width: f64, pose: Pose2D) -> Result<Self> {
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return Err(Error::Geometry(format!("sheet size must be positive, got {length} x {width}")));
        }
        let pose = Pose2D { yaw: normalize_angle(pose.yaw), ..pose };
        let iso = pose.isometry();
        let (hl, hw) = (length / 2.0, width / 2.0);
        let corners = [(-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)].map(|(u, v)| iso.transform_point(&Point2::new(u, v)));
        Ok(SheetInstance { material, length, width, pose, corners })
    }

    /// Sheet fitted to observed corners; stored corners are the fitted
    /// rectangle.
    pub fn from_corners(material: Material, corners: &[Point2<f64>; 4]) -> Result<Self> {
        let fit = fit_corners(corners)?;
        Self::from_pose(material, fit.length, fit.width, fit.pose)
    }

    /// Point in the sheet frame (`u` along the long axis, `v` across).
    pub fn point(&self, u: f64, v: f64) -> Point2<f64> {
        self.pose.isometry().transform_point(&Point2::new(u, v))
    }

    /// Unit vector along the long axis.
    pub fn axis(&self) -> Vector2<f64> {
        self.pose.heading()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Wall,
    TableEdge,
}

/// A wall face or table-edge line in the table frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    /// Wall height above the table, m.
    pub height: Option<f64>,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, start: Point2<f64>, end: Point2<f64>, height: Option<f64>) -> Result<Self> {
        if (end - start).norm() < 1e-9 || !(start.x.is_finite() && start.y.is_finite() && end.x.is_finite() && end.y.is_finite()) {
            return Err(Error::Geometry("constraint segment endpoints must be distinct".into()));
        }
        if let Some(h) = height {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Geometry(format!("wall height must be positive, got {h}")));
            }
        }
        Ok(Constraint { kind, start, end, height })
    }

    pub fn direction(&self) -> Vector2<f64> {
        (self.end - self.start).normalize()
    }

    /// Pose of the constraint: segment midpoint, yaw along the segment.
    pub fn pose(&self) -> Pose2D {
        let mid = nalgebra::center(&self.start, &self.end);
        let d = self.direction();
        Pose2D::new(mid.x, mid.y, d.y.atan2(d.x))
    }

    /// Distance along the ray `origin + t·dir` to the constraint line, if the
    /// ray points at it.
    pub fn ray_hit(&self, origin: &Point2<f64>, dir: &Vector2<f64>) -> Option<f64> {
        let d = self.direction();
        let denom = dir.perp(&d);
        if denom.abs() < 1e-12 {
            return None;
        }
        let t = (self.start - origin).perp(&d) / denom;
        (t >= 0.0).then_some(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub sheet: SheetInstance,
    pub constraints: Vec<Constraint>,
}

impl Scene {
    pub fn new(sheet: SheetInstance) -> Self {
        Scene { sheet, constraints: Vec::new() }
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn first(&self, kind: ConstraintKind) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.kind == kind)
    }

    pub fn wall(&self) -> Option<&Constraint> {
        self.first(ConstraintKind::Wall)
    }

    pub fn table_edge(&self) -> Option<&Constraint> {
        self.first(ConstraintKind::TableEdge)
    }

    /// Loads a scene file, resolving the sheet material from `library`.
    pub fn from_json_str(s: &str, library: &MaterialLibrary) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(s)?;
        file.into_scene(library)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseMm {
    pub x_mm: f64,
    pub y_mm: f64,
    #[serde(default)]
    pub yaw_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperSpec {
    pub material_name: String,
    pub length_mm: f64,
    pub width_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners_mm: Option<[[f64; 2]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseMm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub segment_mm: [[f64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_mm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
}

/// Scene file. Millimetres and degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub paper: PaperSpec,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    pub table: TableSpec,
}

fn point_mm(p: [f64; 2]) -> Point2<f64> {
    Point2::new(mm(p[0]), mm(p[1]))
}

impl SceneFile {
    pub fn into_scene(self, library: &MaterialLibrary) -> Result<Scene> {
        let mut material = library.by_name(&self.paper.material_name)?.clone();
        if let Some(mu1) = self.table.mu1 {
            material.mu1 = mu1;
            material.validate()?;
        }
        let (length, width) = (mm(self.paper.length_mm), mm(self.paper.width_mm));
        let sheet = match (self.paper.corners_mm, self.paper.pose) {
            (Some(c), None) => {
                let fit = fit_corners(&c.map(point_mm))?;
                SheetInstance::from_pose(material, length, width, fit.pose)?
            }
            (None, Some(p)) => SheetInstance::from_pose(
                material,
                length,
                width,
                Pose2D::new(mm(p.x_mm), mm(p.y_mm), p.yaw_deg.to_radians()),
            )?,
            _ => return Err(Error::Parse("paper needs exactly one of corners_mm or pose".into())),
        };
        let constraints = self
            .constraints
            .into_iter()
            .map(|c| Constraint::new(c.kind, point_mm(c.segment_mm[0]), point_mm(c.segment_mm[1]), c.height_mm.map(mm)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene { sheet, constraints })
    }

    pub fn from_scene(scene: &Scene) -> Self {
        let p = &scene.sheet.pose;
        SceneFile {
            paper: PaperSpec {
                material_name: scene.sheet.material.name.clone(),
                length_mm: to_mm(scene.sheet.length),
                width_mm: to_mm(scene.sheet.width),
                corners_mm: None,
                pose: Some(PoseMm { x_mm: to_mm(p.x), y_mm: to_mm(p.y), yaw_deg: p.yaw.to_degrees() }),
            },
            constraints: scene
                .constraints
                .iter()
                .map(|c| ConstraintSpec {
                    kind: c.kind,
                    segment_mm: [[to_mm(c.start.x), to_mm(c.start.y)], [to_mm(c.end.x), to_mm(c.end.y)]],
                    height_mm: c.height.map(to_mm),
                })
                .collect(),
            table: TableSpec { mu1: Some(scene.sheet.material.mu1) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(pose: Pose2D, l: f64, w: f64) -> [Point2<f64>; 4] {
        let m = Material::from_gsm("m", 80.0).unwrap();
        SheetInstance::from_pose(m, l, w, pose).unwrap().corners
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(normalize_angle(PI), PI);
        assert!(close(normalize_angle(-PI), PI, 1e-15));
        assert!(close(normalize_angle(3.0 * PI / 2.0), -PI / 2.0, 1e-15));
        assert!(close(normalize_axis(100f64.to_radians()), -80f64.to_radians(), 1e-12));
        assert_eq!(normalize_axis(FRAC_PI_2), FRAC_PI_2);
    }

    #[test]
    fn axis_aligned_rectangle() {
        let c = rect(Pose2D::default(), 0.297, 0.105);
        let p = pose_from_corners(&c).unwrap();
        assert!(close(p.x, 0.0, 1e-15) && close(p.y, 0.0, 1e-15) && close(p.yaw, 0.0, 1e-15));
    }

    #[test]
    fn rotated_rectangle() {
        let c = rect(Pose2D::new(0.0, 0.0, 30f64.to_radians()), 0.297, 0.105);
        assert!(close(pose_from_corners(&c).unwrap().yaw, 30f64.to_radians(), 1e-12));
    }

    #[test]
    fn half_a4_round_trip() {
        let truth = Pose2D::new(0.4, 0.2, 45f64.to_radians());
        let fit = fit_corners(&rect(truth, 0.297, 0.105)).unwrap();
        assert!(close(fit.pose.x, 0.4, 1e-9) && close(fit.pose.y, 0.2, 1e-9));
        assert!(close(fit.pose.yaw, truth.yaw, 1e-9));
        assert!(close(fit.length, 0.297, 1e-9) && close(fit.width, 0.105, 1e-9));
        assert!(!fit.near_square);
    }

    #[test]
    fn reversed_winding_and_start() {
        let mut c = rect(Pose2D::new(0.1, -0.2, -20f64.to_radians()), 0.297, 0.105);
        c.reverse();
        c.rotate_left(1);
        let p = pose_from_corners(&c).unwrap();
        assert!(close(p.yaw, -20f64.to_radians(), 1e-12));
    }

    #[test]
    fn near_square_flag() {
        let fit = fit_corners(&rect(Pose2D::default(), 0.1, 0.099)).unwrap();
        assert!(fit.near_square);
    }

    #[test]
    fn degenerate_corners() {
        let z = Point2::new(0.0, 0.0);
        assert!(matches!(pose_from_corners(&[z; 4]), Err(Error::Geometry(_))));
        let line = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0), Point2::new(3.0, 0.0)];
        assert!(pose_from_corners(&line).is_err());
        let bowtie = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(pose_from_corners(&bowtie).is_err());
    }

    #[test]
    fn transforms() {
        let a = Pose2D::new(0.1, 0.2, 30f64.to_radians());
        assert!(transform_between(&a, &a).max_abs_diff(&TransformMatrix::identity()) < 1e-15);

        let t = transform_between(&Pose2D::default(), &Pose2D::new(0.1, 0.0, 0.0));
        assert_eq!(t.yaw(), 0.0);
        assert!(close(t.translation().0, 0.1, 1e-15) && close(t.translation().1, 0.0, 1e-15));

        let b = Pose2D::new(0.3, -0.1, 80f64.to_radians());
        let out = transform_between(&a, &b).apply(&a);
        assert!(close(out.x, b.x, 1e-12) && close(out.y, b.y, 1e-12) && close(out.yaw, b.yaw, 1e-12));
    }

    #[test]
    fn constraint_validation_and_rays() {
        assert!(Constraint::new(ConstraintKind::Wall, Point2::new(0.0, 0.0), Point2::new(0.0, 0.0), None).is_err());
        assert!(Constraint::new(ConstraintKind::Wall, Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Some(-1.0)).is_err());
        let wall = Constraint::new(ConstraintKind::Wall, Point2::new(0.5, -1.0), Point2::new(0.5, 1.0), Some(0.1)).unwrap();
        assert!(close(wall.ray_hit(&Point2::origin(), &Vector2::x()).unwrap(), 0.5, 1e-15));
        assert!(wall.ray_hit(&Point2::origin(), &-Vector2::x()).is_none());
        assert!(wall.ray_hit(&Point2::origin(), &Vector2::y()).is_none());
    }

    #[test]
    fn scene_file_parsing() {
        let lib = MaterialLibrary::builtin();
        let json = r#"{
            "paper": {"material_name": "printing-80", "length_mm": 297, "width_mm": 105,
                      "pose": {"x_mm": 400, "y_mm": 0, "yaw_deg": 0}},
            "constraints": [{"kind": "wall", "segment_mm": [[700, -200], [700, 200]], "height_mm": 80}],
            "table": {"mu1": 0.3}
        }"#;
        let scene = Scene::from_json_str(json, &lib).unwrap();
        assert_eq!(scene.sheet.material.mu1, 0.3);
        assert!(close(scene.sheet.pose.x, 0.4, 1e-15));
        assert!(scene.wall().is_some() && scene.table_edge().is_none());
        let again = SceneFile::from_scene(&scene).into_scene(&lib).unwrap();
        assert!(close(again.sheet.pose.x, 0.4, 1e-12));

        let both = json.replace(r#""pose""#, r#""corners_mm": [[0,0],[1,0],[1,1],[0,1]], "pose""#);
        assert!(matches!(Scene::from_json_str(&both, &lib), Err(Error::Parse(_))));
        let unknown = json.replace("printing-80", "vellum");
        assert!(matches!(Scene::from_json_str(&unknown, &lib), Err(Error::UnknownMaterial(_))));
        assert!(matches!(Scene::from_json_str("{\"paper\": 3}", &lib), Err(Error::Parse(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pose() -> impl Strategy<Value = Pose2D> {
            (-1.0f64..1.0, -1.0f64..1.0, -PI..PI).prop_map(|(x, y, t)| Pose2D::new(x, y, t))
        }

        proptest! {
            #[test]
            fn transforms_compose(a in pose(), b in pose(), c in pose()) {
                let ab = transform_between(&a, &b);
                let bc = transform_between(&b, &c);
                let ac = transform_between(&a, &c);
                prop_assert!(bc.compose(&ab).max_abs_diff(&ac) < 1e-12);
            }

            #[test]
            fn corner_fit_is_equivariant(sheet in pose(), motion in pose(), l in 0.15f64..0.4, w in 0.05f64..0.14) {
                let corners = rect(sheet, l, w);
                let t = TransformMatrix::from_parts(motion.x, motion.y, motion.yaw);
                let moved = corners.map(|p| t.apply_point(&p));
                let fitted_then_moved = t.apply(&pose_from_corners(&corners).unwrap());
                let moved_then_fitted = pose_from_corners(&moved).unwrap();
                prop_assert!((fitted_then_moved.x - moved_then_fitted.x).abs() < 1e-9);
                prop_assert!((fitted_then_moved.y - moved_then_fitted.y).abs() < 1e-9);
                let dyaw = normalize_axis(fitted_then_moved.yaw - moved_then_fitted.yaw);
                prop_assert!(dyaw.abs() < 1e-9);
            }
        }
    }
}
