//! Nearest-neighbor index over 3D point sets.
//!
//! A static k-d tree built by median splits on the widest axis, leaf size
//! 16. Queries return exactly the nearest stored point by squared
//! distance, breaking ties toward the lowest point index, matching
//! exhaustive search bit for bit. Sibling subtrees are visited whenever
//! the splitting-plane distance equals the current best so equal-distance
//! candidates with lower indices are never pruned away.
//!
//! Points are stored permuted so every leaf scans a contiguous range;
//! the Chamfer inner loop lives on these scans.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::vec3::{self, Point3};

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u8,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Immutable spatial partition over a copied point set.
#[derive(Debug)]
pub struct NeighborIndex {
    /// Points permuted so leaves are contiguous.
    reordered: Vec<Point3>,
    /// Original cloud index of each reordered slot.
    original: Vec<u32>,
    nodes: Vec<Node>,
    root: u32,
    min: Point3,
    max: Point3,
}

impl NeighborIndex {
    /// Builds the index; errors on an empty cloud. Construction is
    /// deterministic for a fixed input order.
    pub fn build(cloud: &PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::InvalidInput(
                "cannot build a neighbor index over an empty cloud".into(),
            ));
        }
        let points = cloud.points();
        let mut min = points[0];
        let mut max = points[0];
        for p in points {
            for a in 0..3 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        let mut slots: Vec<(Point3, u32)> = points
            .iter()
            .copied()
            .zip(0..points.len() as u32)
            .collect();
        let mut nodes = Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1);
        let root = build_range(&mut slots, 0, &mut nodes);
        Ok(Self {
            reordered: slots.iter().map(|(p, _)| *p).collect(),
            original: slots.iter().map(|(_, i)| *i).collect(),
            nodes,
            root,
            min,
            max,
        })
    }

    /// Number of indexed points.
    pub fn len(&self) -> usize {
        self.reordered.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty clouds
    }

    /// Axis-aligned bounding box of the indexed points.
    pub fn bounds(&self) -> (Point3, Point3) {
        (self.min, self.max)
    }


    /// Returns `(point_index, squared_distance)` of the stored point
    /// closest to `query`; ties break toward the lowest index.
    pub fn nearest(&self, query: &Point3) -> (usize, f64) {
        debug_assert!(vec3::is_finite(query));
        let mut best = (u32::MAX, f64::INFINITY);
        self.search(self.root, query, &mut best);
        (best.0 as usize, best.1)
    }

    /// Squared distance to the nearest stored point (no index tie-break
    /// bookkeeping on the hot path; the distance is identical).
    pub fn nearest_distance_sq(&self, query: &Point3) -> f64 {
        let mut best = f64::INFINITY;
        self.search_distance(self.root, query, &mut best);
        best
    }

    fn search(&self, node: u32, query: &Point3, best: &mut (u32, f64)) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for slot in *start as usize..*end as usize {
                    let p = &self.reordered[slot];
                    let dx = query[0] - p[0];
                    let dy = query[1] - p[1];
                    let dz = query[2] - p[2];
                    let d2 = dx * dx + dy * dy + dz * dz;
                    let idx = self.original[slot];
                    if d2 < best.1 || (d2 == best.1 && idx < best.0) {
                        *best = (idx, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[*axis as usize] - value;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search(near, query, best);
                // <= keeps equal-distance candidates reachable for the
                // lowest-index tie-break.
                if delta * delta <= best.1 {
                    self.search(far, query, best);
                }
            }
        }
    }

    fn search_distance(&self, node: u32, query: &Point3, best: &mut f64) {
        match &self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                let mut local = *best;
                for p in &self.reordered[*start as usize..*end as usize] {
                    let dx = query[0] - p[0];
                    let dy = query[1] - p[1];
                    let dz = query[2] - p[2];
                    let d2 = dx * dx + dy * dy + dz * dz;
                    if d2 < local {
                        local = d2;
                    }
                }
                *best = local;
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[*axis as usize] - value;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search_distance(near, query, best);
                if delta * delta < *best {
                    self.search_distance(far, query, best);
                }
            }
        }
    }
}

fn build_range(slots: &mut [(Point3, u32)], base: usize, nodes: &mut Vec<Node>) -> u32 {
    if slots.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: base as u32,
            end: (base + slots.len()) as u32,
        });
        return (nodes.len() - 1) as u32;
    }
    // Widest axis of this range's bounding box.
    let mut lo = slots[0].0;
    let mut hi = lo;
    for (p, _) in slots.iter() {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let mut axis = 0;
    for a in 1..3 {
        if hi[a] - lo[a] > hi[axis] - lo[axis] {
            axis = a;
        }
    }
    let mid = slots.len() / 2;
    slots.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]));
    let value = slots[mid].0[axis];
    let (left_slots, right_slots) = slots.split_at_mut(mid);
    let left = build_range(left_slots, base, nodes);
    let right = build_range(right_slots, base + mid, nodes);
    nodes.push(Node::Split {
        axis: axis as u8,
        value,
        left,
        right,
    });
    (nodes.len() - 1) as u32
}

/// Builds a [`NeighborIndex`] over `cloud`.
pub fn build_index(cloud: &PointCloud) -> Result<NeighborIndex> {
    NeighborIndex::build(cloud)
}
