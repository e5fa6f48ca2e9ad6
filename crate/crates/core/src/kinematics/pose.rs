//! Pose and shape parameter containers.

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::so3;

/// Per-joint axis-angle rotations, one 3-vector block per joint.
///
/// Block 0 belongs to the root joint and doubles as the global rotation; it
/// acts about the regressed root joint location and is excluded from the
/// pose-blend features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    blocks: Vec<Vector3<f64>>,
}

impl Pose {
    pub fn zeros(joint_count: usize) -> Pose {
        Pose {
            blocks: vec![Vector3::zeros(); joint_count],
        }
    }

    pub fn from_blocks(blocks: Vec<Vector3<f64>>) -> Pose {
        Pose { blocks }
    }

    pub fn joint_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, joint: usize) -> &Vector3<f64> {
        &self.blocks[joint]
    }

    pub fn block_mut(&mut self, joint: usize) -> &mut Vector3<f64> {
        &mut self.blocks[joint]
    }

    pub fn blocks(&self) -> &[Vector3<f64>] {
        &self.blocks
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// Wraps every block's angle into `[0, pi]`.
    pub fn canonicalized(&self) -> Pose {
        Pose {
            blocks: self.blocks.iter().map(so3::canonicalize).collect(),
        }
    }

    /// Flat `[w0x, w0y, w0z, w1x, ...]` layout.
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.blocks.len() * 3);
        for b in &self.blocks {
            out.extend_from_slice(&[b.x, b.y, b.z]);
        }
        out
    }

    pub fn from_flat(values: &[f64]) -> Pose {
        assert_eq!(values.len() % 3, 0);
        Pose {
            blocks: values
                .chunks_exact(3)
                .map(|c| Vector3::new(c[0], c[1], c[2]))
                .collect(),
        }
    }

    /// Flat layout of blocks `1..`, the prior/smoothness view used by energy
    /// terms that exclude the global rotation.
    pub fn flat_non_root(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity((self.blocks.len() - 1) * 3);
        for b in &self.blocks[1..] {
            out.extend_from_slice(&[b.x, b.y, b.z]);
        }
        out
    }

    /// Sum of squared differences of all blocks, `|theta_a - theta_b|^2`.
    pub fn sq_distance(&self, other: &Pose) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).norm_squared())
            .sum()
    }
}

/// Pose plus global translation (millimeters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseParams {
    pub pose: Pose,
    pub translation: Vector3<f64>,
}

impl PoseParams {
    pub fn rest(joint_count: usize) -> PoseParams {
        PoseParams {
            pose: Pose::zeros(joint_count),
            translation: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pose.is_finite() && self.translation.iter().all(|v| v.is_finite())
    }
}

/// Shape coefficients in units of per-component standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub beta: DVector<f64>,
}

impl ShapeParams {
    pub fn zeros(dim: usize) -> ShapeParams {
        ShapeParams {
            beta: DVector::zeros(dim),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.beta.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let p = Pose::from_blocks(vec![
            Vector3::new(0.1, 0.2, 0.3),
            Vector3::new(-0.4, 0.5, -0.6),
        ]);
        assert_eq!(Pose::from_flat(&p.flat()), p);
        assert_eq!(p.flat_non_root(), vec![-0.4, 0.5, -0.6]);
    }

    #[test]
    fn sq_distance_is_blockwise() {
        let a = Pose::zeros(2);
        let mut b = Pose::zeros(2);
        *b.block_mut(1) = Vector3::new(3.0, 0.0, 4.0);
        assert_eq!(a.sq_distance(&b), 25.0);
    }
}
