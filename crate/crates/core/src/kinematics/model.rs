//! The learnable model container: template surface, rig, and bases.

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::pose::Pose;
use super::tree::KinematicTree;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::so3;

/// Vertex ids of the named landmarks used by the body-length measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Landmarks {
    pub head_top: usize,
    pub foot_left: usize,
    pub foot_right: usize,
}

/// A slicing plane expressed in terms of model keypoints so it moves with the
/// fitted shape. `origin` is an affine combination of keypoints (weights sum
/// to 1); the normal is the direction from the `axis_from` combination to the
/// `axis_to` combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneDef {
    pub name: String,
    pub origin: Vec<(usize, f64)>,
    pub axis_from: Vec<(usize, f64)>,
    pub axis_to: Vec<(usize, f64)>,
}

impl PlaneDef {
    pub fn resolve(&self, keypoints: &[Point3<f64>]) -> Result<(Point3<f64>, Vector3<f64>)> {
        let combine = |terms: &[(usize, f64)]| -> Result<Vector3<f64>> {
            let mut acc = Vector3::zeros();
            for &(idx, w) in terms {
                let p = keypoints
                    .get(idx)
                    .ok_or_else(|| Error::invalid(format!("plane {}: keypoint {idx} out of range", self.name)))?;
                acc += p.coords * w;
            }
            Ok(acc)
        };
        let origin = combine(&self.origin)?;
        let dir = combine(&self.axis_to)? - combine(&self.axis_from)?;
        let norm = dir.norm();
        if norm < 1e-12 {
            return Err(Error::invalid(format!(
                "plane {}: degenerate axis definition",
                self.name
            )));
        }
        Ok((Point3::from(origin), dir / norm))
    }
}

/// Template mesh, kinematic tree, skinning weights, regressors, and blend
/// bases. Immutable during fitting except through the provided setters; all
/// forward evaluations over a shared `&TemplateModel` are safe to run
/// concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateModel {
    pub tree: KinematicTree,
    /// Canonical-pose vertex coordinates, flat 3N (millimeters).
    pub template: DVector<f64>,
    pub faces: Vec<[u32; 3]>,
    /// K x N, each column nonnegative and summing to 1.
    pub skin_weights: DMatrix<f64>,
    /// 3K x 3N map from canonical vertices to joint positions.
    pub joint_regressor: DMatrix<f64>,
    /// 3M x 3N map from canonical vertices to anatomical keypoints.
    pub keypoint_regressor: DMatrix<f64>,
    /// 3N x D shape basis; columns are scaled so coefficients are in units of
    /// per-component standard deviations.
    pub shape_basis: DMatrix<f64>,
    /// 3N x 9(K-1) pose-blend basis over non-root rotation features.
    pub pose_blend_basis: DMatrix<f64>,
    /// The canonical pose `theta*`.
    pub rest_pose: Pose,
    pub keypoint_names: Vec<String>,
    pub landmarks: Landmarks,
    pub planes: Vec<PlaneDef>,

    // Derived caches; rebuilt by `refresh_derived`.
    rest_world_rot: Vec<Matrix3<f64>>,
    kp_skin_weights: DMatrix<f64>,
}

impl TemplateModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tree: KinematicTree,
        template: DVector<f64>,
        faces: Vec<[u32; 3]>,
        skin_weights: DMatrix<f64>,
        joint_regressor: DMatrix<f64>,
        keypoint_regressor: DMatrix<f64>,
        shape_basis: DMatrix<f64>,
        pose_blend_basis: DMatrix<f64>,
        rest_pose: Pose,
        keypoint_names: Vec<String>,
        landmarks: Landmarks,
        planes: Vec<PlaneDef>,
    ) -> Result<TemplateModel> {
        let mut model = TemplateModel {
            tree,
            template,
            faces,
            skin_weights,
            joint_regressor,
            keypoint_regressor,
            shape_basis,
            pose_blend_basis,
            rest_pose,
            keypoint_names,
            landmarks,
            planes,
            rest_world_rot: Vec::new(),
            kp_skin_weights: DMatrix::zeros(0, 0),
        };
        model.validate()?;
        model.refresh_derived();
        Ok(model)
    }

    pub fn vertex_count(&self) -> usize {
        self.template.len() / 3
    }

    pub fn joint_count(&self) -> usize {
        self.tree.joint_count()
    }

    pub fn keypoint_count(&self) -> usize {
        self.keypoint_regressor.nrows() / 3
    }

    pub fn shape_dim(&self) -> usize {
        self.shape_basis.ncols()
    }

    /// Width of the pose-feature vector driving the pose-blend basis.
    pub fn pose_feature_dim(&self) -> usize {
        9 * (self.joint_count() - 1)
    }

    pub fn template_vertex(&self, n: usize) -> Point3<f64> {
        Point3::new(
            self.template[3 * n],
            self.template[3 * n + 1],
            self.template[3 * n + 2],
        )
    }

    pub fn template_mesh(&self) -> Mesh {
        Mesh::new(
            (0..self.vertex_count())
                .map(|n| self.template_vertex(n))
                .collect(),
            self.faces.clone(),
        )
    }

    /// World rotations of every joint in the rest pose.
    pub fn rest_world_rotations(&self) -> &[Matrix3<f64>] {
        &self.rest_world_rot
    }

    /// K x M skinning weights assigned to keypoints: each keypoint inherits
    /// the weights of the vertices its regressor row draws from, averaged by
    /// block magnitude, so keypoints move consistently with the surface.
    pub fn keypoint_skin_weights(&self) -> &DMatrix<f64> {
        &self.kp_skin_weights
    }

    /// Replaces the keypoint regressor and rebuilds the derived keypoint
    /// skinning weights.
    pub fn set_keypoint_regressor(&mut self, regressor: DMatrix<f64>) {
        self.keypoint_regressor = regressor;
        self.refresh_derived();
    }

    /// Rebuilds caches after direct field edits.
    pub fn refresh_derived(&mut self) {
        let joints = self.tree.joint_count();
        let mut rot = Vec::with_capacity(joints);
        for k in 0..joints {
            let local = so3::rodrigues_unchecked(self.rest_pose.block(k));
            let world = match self.tree.parent(k) {
                Some(p) => rot[p] * local,
                None => local,
            };
            rot.push(world);
        }
        self.rest_world_rot = rot;
        self.kp_skin_weights = self.derive_keypoint_skin_weights();
    }

    fn derive_keypoint_skin_weights(&self) -> DMatrix<f64> {
        let (k_joints, n, m) = (
            self.joint_count(),
            self.vertex_count(),
            self.keypoint_count(),
        );
        let mut weights = DMatrix::zeros(k_joints, m);
        for kp in 0..m {
            let mut total = 0.0;
            let mut acc = DVector::zeros(k_joints);
            for v in 0..n {
                let mut mag = 0.0;
                for r in 0..3 {
                    for c in 0..3 {
                        let e = self.keypoint_regressor[(3 * kp + r, 3 * v + c)];
                        mag += e * e;
                    }
                }
                let mag = mag.sqrt();
                if mag > 0.0 {
                    total += mag;
                    acc += self.skin_weights.column(v) * mag;
                }
            }
            if total > 0.0 {
                weights.column_mut(kp).copy_from(&(acc / total));
            } else {
                weights.column_mut(kp).fill(1.0 / k_joints as f64);
            }
        }
        weights
    }

    pub fn validate(&self) -> Result<()> {
        let joints = self.tree.joint_count();
        let n = self.vertex_count();
        if self.template.len() % 3 != 0 || n == 0 {
            return Err(Error::invalid("template length must be a positive multiple of 3"));
        }
        if joints < 2 {
            return Err(Error::invalid("model needs at least two joints"));
        }
        let mesh = self.template_mesh();
        mesh.validate()?;
        if mesh.boundary_edge_count() != 0 {
            return Err(Error::invalid("template mesh is not closed"));
        }
        check_orientable(&self.faces)?;
        if self.skin_weights.shape() != (joints, n) {
            return Err(Error::invalid(format!(
                "skin weights must be {joints}x{n}, got {:?}",
                self.skin_weights.shape()
            )));
        }
        for v in 0..n {
            let col = self.skin_weights.column(v);
            if col.iter().any(|&w| w < -1e-12) {
                return Err(Error::invalid(format!("negative skin weight on vertex {v}")));
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "skin weights of vertex {v} sum to {sum}, expected 1"
                )));
            }
        }
        if self.joint_regressor.shape() != (3 * joints, 3 * n) {
            return Err(Error::invalid("joint regressor has wrong shape"));
        }
        if self.keypoint_regressor.nrows() % 3 != 0
            || self.keypoint_regressor.ncols() != 3 * n
        {
            return Err(Error::invalid("keypoint regressor has wrong shape"));
        }
        if self.keypoint_names.len() != self.keypoint_count() {
            return Err(Error::invalid("keypoint name count mismatch"));
        }
        if self.shape_basis.nrows() != 3 * n {
            return Err(Error::invalid("shape basis has wrong row count"));
        }
        if self.pose_blend_basis.shape() != (3 * n, 9 * (joints - 1)) {
            return Err(Error::invalid(format!(
                "pose blend basis must be {}x{}, got {:?}",
                3 * n,
                9 * (joints - 1),
                self.pose_blend_basis.shape()
            )));
        }
        if self.rest_pose.joint_count() != joints {
            return Err(Error::invalid("rest pose block count mismatch"));
        }
        let max_id = [
            self.landmarks.head_top,
            self.landmarks.foot_left,
            self.landmarks.foot_right,
        ]
        .into_iter()
        .max()
        .unwrap();
        if max_id >= n {
            return Err(Error::invalid("landmark vertex id out of range"));
        }
        // Regressed rest joints must land inside the template bounding box.
        let joints_vec = &self.joint_regressor * &self.template;
        let (mut lo, mut hi) = (Vector3::repeat(f64::INFINITY), Vector3::repeat(f64::NEG_INFINITY));
        for v in 0..n {
            let p = self.template_vertex(v);
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        for k in 0..joints {
            for a in 0..3 {
                let x = joints_vec[3 * k + a];
                if x < lo[a] - 1e-9 || x > hi[a] + 1e-9 {
                    return Err(Error::invalid(format!(
                        "regressed joint {k} lies outside the template bounding box"
                    )));
                }
            }
        }
        Ok(())
    }
}

// Every directed edge must appear exactly once for a consistently oriented
// closed surface.
fn check_orientable(faces: &[[u32; 3]]) -> Result<()> {
    let mut directed: Vec<(u32, u32)> = Vec::with_capacity(faces.len() * 3);
    for f in faces {
        for k in 0..3 {
            directed.push((f[k], f[(k + 1) % 3]));
        }
    }
    directed.sort_unstable();
    for pair in directed.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::invalid(
                "template mesh is not consistently oriented (repeated directed edge)",
            ));
        }
    }
    Ok(())
}

/// A posed surface: skinned vertices plus regressed-and-posed keypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PosedMesh {
    pub vertices: Vec<Point3<f64>>,
    pub keypoints: Vec<Point3<f64>>,
}
