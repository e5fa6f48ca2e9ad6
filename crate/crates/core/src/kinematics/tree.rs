//! Rooted joint hierarchy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A kinematic tree over `joint_count()` joints. Joint 0 is the root (parent
/// `None`); every other joint's parent index is smaller than its own, so
/// iterating in index order visits parents before children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KinematicTree {
    parents: Vec<Option<usize>>,
}

impl KinematicTree {
    pub fn new(parents: Vec<Option<usize>>) -> Result<KinematicTree> {
        if parents.is_empty() {
            return Err(Error::invalid("kinematic tree must have at least one joint"));
        }
        let roots = parents.iter().filter(|p| p.is_none()).count();
        if roots != 1 || parents[0].is_some() {
            return Err(Error::invalid(
                "kinematic tree must have exactly one root at index 0",
            ));
        }
        for (k, parent) in parents.iter().enumerate().skip(1) {
            match parent {
                Some(p) if *p < k => {}
                Some(p) => {
                    return Err(Error::invalid(format!(
                        "joint {k} has parent {p}, which is not a lower index"
                    )))
                }
                None => unreachable!(),
            }
        }
        Ok(KinematicTree { parents })
    }

    /// A straight chain `0 -> 1 -> ... -> n-1`; handy for tests.
    pub fn chain(joint_count: usize) -> KinematicTree {
        let parents = (0..joint_count)
            .map(|k| if k == 0 { None } else { Some(k - 1) })
            .collect();
        KinematicTree { parents }
    }

    pub fn joint_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, joint: usize) -> Option<usize> {
        self.parents[joint]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_tree() {
        let t = KinematicTree::new(vec![None, Some(0), Some(0), Some(2)]).unwrap();
        assert_eq!(t.joint_count(), 4);
        assert_eq!(t.parent(3), Some(2));
        assert_eq!(t.parent(0), None);
    }

    #[test]
    fn rejects_bad_trees() {
        assert!(KinematicTree::new(vec![]).is_err());
        assert!(KinematicTree::new(vec![Some(0)]).is_err());
        assert!(KinematicTree::new(vec![None, None]).is_err());
        // Parent must precede child.
        assert!(KinematicTree::new(vec![None, Some(2), Some(1)]).is_err());
    }
}
