use super::{dist2, PointCloud};

/// Static kd-tree over the points of a cloud for ball and nearest queries.
#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
    order: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Node {
    start: usize,
    end: usize,
    axis: usize,
    split: f64,
    left: Option<usize>,
    right: Option<usize>,
}

const LEAF: usize = 8;

impl KdTree {
    pub fn new(cloud: &PointCloud) -> Self {
        Self::from_coords(cloud.dim(), cloud.coords().to_vec())
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Self {
        Self::from_coords(dim, points.concat())
    }

    fn from_coords(dim: usize, coords: Vec<f64>) -> Self {
        let n = coords.len() / dim.max(1);
        let mut tree = KdTree { dim, coords, nodes: Vec::new(), order: (0..n).collect() };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    #[inline]
    fn pt(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { start, end, axis: 0, split: 0.0, left: None, right: None });
        if end - start <= LEAF {
            return id;
        }
        // split along the widest axis
        let mut best_axis = 0;
        let mut best_spread = -1.0;
        for axis in 0..self.dim {
            let (lo, hi) = self.order[start..end].iter().fold((f64::MAX, f64::MIN), |(lo, hi), &i| {
                let v = self.coords[i * self.dim + axis];
                (lo.min(v), hi.max(v))
            });
            if hi - lo > best_spread {
                best_spread = hi - lo;
                best_axis = axis;
            }
        }
        let mid = (start + end) / 2;
        let dim = self.dim;
        let coords = &self.coords;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            coords[a * dim + best_axis].total_cmp(&coords[b * dim + best_axis])
        });
        let split = self.coords[self.order[mid] * dim + best_axis];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        let node = &mut self.nodes[id];
        node.axis = best_axis;
        node.split = split;
        node.left = Some(left);
        node.right = Some(right);
        id
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Indices of all points within the closed ball `B(center, radius)`, sorted.
    pub fn within(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() || radius < 0.0 {
            return out;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            match (node.left, node.right) {
                (Some(l), Some(r)) => {
                    let delta = center[node.axis] - node.split;
                    if delta <= radius {
                        stack.push(l);
                    }
                    if delta >= -radius {
                        stack.push(r);
                    }
                }
                _ => {
                    for &i in &self.order[node.start..node.end] {
                        if dist2(self.pt(i), center) <= r2 {
                            out.push(i);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Nearest point to `center` and its distance; `None` for an empty tree.
    pub fn nearest(&self, center: &[f64]) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, center, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(&self, id: usize, center: &[f64], best: &mut (usize, f64)) {
        let node = &self.nodes[id];
        match (node.left, node.right) {
            (Some(l), Some(r)) => {
                let delta = center[node.axis] - node.split;
                let (near, far) = if delta <= 0.0 { (l, r) } else { (r, l) };
                self.nearest_rec(near, center, best);
                if delta * delta <= best.1 {
                    self.nearest_rec(far, center, best);
                }
            }
            _ => {
                for &i in &self.order[node.start..node.end] {
                    let d2 = dist2(self.pt(i), center);
                    if d2 < best.1 || (d2 == best.1 && i < best.0) {
                        *best = (i, d2);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_query_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..300).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let tree = KdTree::new(&cloud);
        for _ in 0..20 {
            let c: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
            let r = rng.gen::<f64>() * 0.4;
            let brute: Vec<usize> = (0..pts.len()).filter(|&i| dist2(&pts[i], &c) <= r * r).collect();
            assert_eq!(tree.within(&c, r), brute);
            let (ni, nd) = tree.nearest(&c).unwrap();
            let bd = pts.iter().map(|p| dist2(p, &c)).fold(f64::INFINITY, f64::min).sqrt();
            assert!((nd - bd).abs() < 1e-15);
            assert!((dist2(&pts[ni], &c).sqrt() - bd).abs() < 1e-15);
        }
    }
}
