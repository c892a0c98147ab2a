//! Incremental k-d tree for exact nearest-neighbour queries.
//!
//! Points are inserted one at a time and never removed. Nodes live in a flat
//! arena; the split axis cycles with depth. Queries return the point with the
//! smallest squared Euclidean distance, ties going to the lowest insertion
//! index.

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    left: u32,
    right: u32,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "k-d tree needs at least one dimension");
        Self {
            dim,
            coords: Vec::new(),
            nodes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.coords[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Appends a point; its index is the previous length.
    pub fn insert(&mut self, p: &[f64]) -> usize {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        let idx = self.nodes.len();
        assert!(idx < NIL as usize, "k-d tree is full");
        self.coords.extend_from_slice(p);
        self.nodes.push(Node {
            left: NIL,
            right: NIL,
        });
        if idx == 0 {
            return idx;
        }
        let mut cur = 0usize;
        let mut depth = 0usize;
        loop {
            let axis = depth % self.dim;
            let go_left = p[axis] < self.coords[cur * self.dim + axis];
            let child = if go_left {
                &mut self.nodes[cur].left
            } else {
                &mut self.nodes[cur].right
            };
            if *child == NIL {
                *child = idx as u32;
                return idx;
            }
            cur = *child as usize;
            depth += 1;
        }
    }

    /// Index and squared distance of the nearest stored point.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        assert_eq!(q.len(), self.dim, "query dimension mismatch");
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        // (node, depth, lower bound on distance² to anything in the subtree)
        let mut stack: Vec<(u32, usize, f64)> = vec![(0, 0, 0.0)];
        while let Some((node, depth, bound)) = stack.pop() {
            if bound > best.1 {
                continue;
            }
            let n = node as usize;
            let p = self.point(n);
            let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best.1 || (d2 == best.1 && n < best.0) {
                best = (n, d2);
            }
            let axis = depth % self.dim;
            let diff = q[axis] - p[axis];
            let (near, far) = if diff < 0.0 {
                (self.nodes[n].left, self.nodes[n].right)
            } else {
                (self.nodes[n].right, self.nodes[n].left)
            };
            // The far side is bounded by the squared slab distance; equality
            // must still be explored so ties resolve by index.
            if far != NIL {
                stack.push((far, depth + 1, bound.max(diff * diff)));
            }
            if near != NIL {
                stack.push((near, depth + 1, bound));
            }
        }
        Some(best)
    }
}
