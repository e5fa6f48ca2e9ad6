//! Exact nearest-neighbor search over 3-D point sets.
//!
//! A static KD-tree built once per correspondence refresh and queried from
//! many threads. Ties in distance are broken by the lowest point index, which
//! makes results identical to a linear scan and keeps runs reproducible.

use nalgebra::Point3;

/// Result of a nearest-neighbor query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: usize,
    pub distance_sq: f64,
}

impl Nearest {
    fn better_than(&self, other: &Nearest) -> bool {
        self.distance_sq < other.distance_sq
            || (self.distance_sq == other.distance_sq && self.index < other.index)
    }
}

/// Static KD-tree over a point slice. Holds a copy of the points.
pub struct KdTree3 {
    points: Vec<Point3<f64>>,
    // Original indices permuted into tree order; subtrees are contiguous
    // ranges with the splitting element at the midpoint.
    order: Vec<u32>,
}

impl KdTree3 {
    pub fn build(points: &[Point3<f64>]) -> KdTree3 {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut tree = KdTree3 {
            points: points.to_vec(),
            order,
        };
        order = std::mem::take(&mut tree.order);
        build_recursive(&tree.points, &mut order, 0);
        tree.order = order;
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact nearest neighbor of `query`, lowest index on ties.
    ///
    /// Panics if the tree is empty.
    pub fn nearest(&self, query: &Point3<f64>) -> Nearest {
        assert!(!self.points.is_empty(), "nearest() on an empty KdTree3");
        let mut best = Nearest {
            index: usize::MAX,
            distance_sq: f64::INFINITY,
        };
        self.search(&self.order, 0, query, &mut best);
        best
    }

    fn search(&self, range: &[u32], depth: usize, query: &Point3<f64>, best: &mut Nearest) {
        if range.is_empty() {
            return;
        }
        let mid = range.len() / 2;
        let idx = range[mid] as usize;
        let p = &self.points[idx];
        let d2 = (p - query).norm_squared();
        let candidate = Nearest {
            index: idx,
            distance_sq: d2,
        };
        if candidate.better_than(best) {
            *best = candidate;
        }
        let axis = depth % 3;
        let delta = query[axis] - p[axis];
        let (near, far) = if delta < 0.0 {
            (&range[..mid], &range[mid + 1..])
        } else {
            (&range[mid + 1..], &range[..mid])
        };
        self.search(near, depth + 1, query, best);
        // The far half can still contain an equal-distance, lower-index point.
        if delta * delta <= best.distance_sq {
            self.search(far, depth + 1, query, best);
        }
    }
}

fn build_recursive(points: &[Point3<f64>], order: &mut [u32], depth: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis]
            .total_cmp(&points[b as usize][axis])
            .then(a.cmp(&b))
    });
    let (lo, rest) = order.split_at_mut(mid);
    build_recursive(points, lo, depth + 1);
    build_recursive(points, &mut rest[1..], depth + 1);
}

/// Linear-scan nearest neighbor; the reference oracle for [`KdTree3`].
pub fn nearest_brute(points: &[Point3<f64>], query: &Point3<f64>) -> Nearest {
    assert!(!points.is_empty());
    let mut best = Nearest {
        index: 0,
        distance_sq: (points[0] - query).norm_squared(),
    };
    for (i, p) in points.iter().enumerate().skip(1) {
        let d2 = (p - query).norm_squared();
        if d2 < best.distance_sq {
            best = Nearest {
                index: i,
                distance_sq: d2,
            };
        }
    }
    best
}
