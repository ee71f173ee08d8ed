//! Ordering unorganized points along a curve.
//!
//! The points are nonzero sample trains in `(d+1)`-dimensional space. They
//! are first chained by the NN-CRUST curve-reconstruction rule (connect
//! each point to its nearest neighbor, then give every degree-one point a
//! "half neighbor" on the opposite side), then oriented so the sequence
//! runs from the last-coordinate axis towards the first-coordinate axis.

use crate::error::{Error, Result, Stage};
use crate::float::Float;
use crate::train::SampleTrain;

/// A finite set of nonzero points sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<F> {
    data: Vec<F>,
    dim: usize,
}

impl<F: Float> PointCloud<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("point cloud is empty"));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::invalid("points differ in dimension"));
            }
            if row.iter().all(|v| *v == F::zero()) {
                return Err(Error::invalid("point cloud contains the zero vector"));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { data, dim })
    }

    pub fn from_trains(trains: &[SampleTrain<F>]) -> Result<Self> {
        Self::from_rows(trains.iter().map(|t| t.values().to_vec()).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[F] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[F]> {
        self.data.chunks_exact(self.dim)
    }

    /// A copy with rows rearranged into `order`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in order {
            data.extend_from_slice(self.point(i));
        }
        Self { data, dim: self.dim }
    }
}

fn dist2<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn dot_from<F: Float>(origin: &[F], a: &[F], b: &[F]) -> F {
    origin
        .iter()
        .zip(a)
        .zip(b)
        .map(|((&o, &x), &y)| (x - o) * (y - o))
        .sum()
}

fn norm2<F: Float>(a: &[F]) -> F {
    a.iter().map(|&x| x * x).sum()
}

/// Candidate tracker with deterministic tie-breaking: among equal
/// distances the lowest point index wins.
struct Best<F> {
    d2: F,
    idx: Option<usize>,
}

impl<F: Float> Best<F> {
    fn new() -> Self {
        Self { d2: F::infinity(), idx: None }
    }

    fn offer(&mut self, d2: F, idx: usize) {
        if d2 < self.d2 || (d2 == self.d2 && Some(idx) < self.idx.or(Some(usize::MAX))) {
            self.d2 = d2;
            self.idx = Some(idx);
        }
    }
}

// ---------------------------------------------------------------------------
// Exact nearest-neighbor backends
// ---------------------------------------------------------------------------

/// Brute-force reference: nearest point to `query` satisfying `accept`.
fn nearest_brute<F: Float>(
    cloud: &PointCloud<F>,
    query: &[F],
    accept: impl Fn(usize) -> bool,
) -> Option<usize> {
    let mut best = Best::new();
    for i in 0..cloud.len() {
        if accept(i) {
            best.offer(dist2(query, cloud.point(i)), i);
        }
    }
    best.idx
}

enum KdNode<F> {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: F, left: usize, right: usize },
}

/// Exact k-d tree over a point cloud. Queries agree with the brute-force
/// scan, including the lowest-index tie rule.
struct KdTree<F> {
    nodes: Vec<KdNode<F>>,
    perm: Vec<usize>,
    root: usize,
}

const KD_LEAF: usize = 16;

impl<F: Float> KdTree<F> {
    fn build(cloud: &PointCloud<F>) -> Self {
        let mut perm: Vec<usize> = (0..cloud.len()).collect();
        let mut nodes = Vec::new();
        let n = perm.len();
        let root = Self::build_range(cloud, &mut perm, &mut nodes, 0, n);
        Self { nodes, perm, root }
    }

    fn build_range(
        cloud: &PointCloud<F>,
        perm: &mut [usize],
        nodes: &mut Vec<KdNode<F>>,
        start: usize,
        end: usize,
    ) -> usize {
        let len = end - start;
        if len <= KD_LEAF {
            nodes.push(KdNode::Leaf { start, end });
            return nodes.len() - 1;
        }
        // Split on the coordinate with the widest extent.
        let dim = cloud.dim();
        let mut split_dim = 0;
        let mut widest = F::neg_infinity();
        for d in 0..dim {
            let mut lo = F::infinity();
            let mut hi = F::neg_infinity();
            for &i in &perm[start..end] {
                let x = cloud.point(i)[d];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if hi - lo > widest {
                widest = hi - lo;
                split_dim = d;
            }
        }
        let mid = start + len / 2;
        perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            cloud.point(a)[split_dim]
                .partial_cmp(&cloud.point(b)[split_dim])
                .unwrap()
                .then(a.cmp(&b))
        });
        let value = cloud.point(perm[mid])[split_dim];
        let node = nodes.len();
        nodes.push(KdNode::Leaf { start: 0, end: 0 }); // placeholder
        let left = Self::build_range(cloud, perm, nodes, start, mid);
        let right = Self::build_range(cloud, perm, nodes, mid, end);
        nodes[node] = KdNode::Split { dim: split_dim, value, left, right };
        node
    }

    fn nearest(
        &self,
        cloud: &PointCloud<F>,
        query: &[F],
        accept: &impl Fn(usize) -> bool,
    ) -> Option<usize> {
        let mut best = Best::new();
        self.search(cloud, self.root, query, accept, &mut best);
        best.idx
    }

    fn search(
        &self,
        cloud: &PointCloud<F>,
        node: usize,
        query: &[F],
        accept: &impl Fn(usize) -> bool,
        best: &mut Best<F>,
    ) {
        match &self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for &i in &self.perm[*start..*end] {
                    if accept(i) {
                        best.offer(dist2(query, cloud.point(i)), i);
                    }
                }
            }
            KdNode::Split { dim, value, left, right } => {
                let delta = query[*dim] - *value;
                let (near, far) = if delta < F::zero() { (*left, *right) } else { (*right, *left) };
                self.search(cloud, near, query, accept, best);
                // Equal plane distance may still hide a lower-index tie.
                if delta * delta <= best.d2 {
                    self.search(cloud, far, query, accept, best);
                }
            }
        }
    }
}

/// Exact nearest-neighbor index: brute force for small clouds, k-d tree
/// for large ones. Both backends return identical results.
pub(crate) struct NeighborIndex<'a, F> {
    cloud: &'a PointCloud<F>,
    tree: Option<KdTree<F>>,
}

const KD_THRESHOLD: usize = 512;

impl<'a, F: Float> NeighborIndex<'a, F> {
    pub(crate) fn new(cloud: &'a PointCloud<F>) -> Self {
        let tree = (cloud.len() >= KD_THRESHOLD).then(|| KdTree::build(cloud));
        Self { cloud, tree }
    }

    #[cfg(test)]
    fn brute(cloud: &'a PointCloud<F>) -> Self {
        Self { cloud, tree: None }
    }

    #[cfg(test)]
    fn kd(cloud: &'a PointCloud<F>) -> Self {
        Self { cloud, tree: Some(KdTree::build(cloud)) }
    }

    fn nearest_where(&self, query: &[F], accept: impl Fn(usize) -> bool) -> Option<usize> {
        match &self.tree {
            Some(tree) => tree.nearest(self.cloud, query, &accept),
            None => nearest_brute(self.cloud, query, accept),
        }
    }

    /// Nearest neighbor of point `i` (never `i` itself).
    fn nearest(&self, i: usize) -> Option<usize> {
        self.nearest_where(self.cloud.point(i), |j| j != i)
    }

    /// Shortest edge from `i` making a strictly obtuse angle with the
    /// existing edge `i -> q`.
    fn half_neighbor(&self, i: usize, q: usize) -> Option<usize> {
        let p = self.cloud.point(i);
        let pq = self.cloud.point(q);
        self.nearest_where(p, |j| {
            j != i && dot_from(p, pq, self.cloud.point(j)) < F::zero()
        })
    }
}

// ---------------------------------------------------------------------------
// NN-CRUST
// ---------------------------------------------------------------------------

/// Points listed in their order along the curve, before orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicOrder {
    order: Vec<usize>,
    closed: bool,
}

impl CyclicOrder {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Whether the recovered chain was a closed loop (every point had two
    /// neighbors) rather than an open path.
    pub fn closed(&self) -> bool {
        self.closed
    }

    /// Build directly from a known order (e.g. generator order in tests).
    pub fn from_order(order: Vec<usize>, closed: bool) -> Self {
        Self { order, closed }
    }
}

fn insufficient(detail: impl Into<String>) -> Error {
    Error::InsufficientData { stage: Stage::Ordering, detail: detail.into() }
}

/// Chain unorganized points along their curve with NN-CRUST.
///
/// Every point is connected to its nearest neighbor; every point left with
/// a single incident edge gains the shortest edge making an angle greater
/// than 90 degrees with it. The call succeeds iff the resulting edge set is
/// a single simple path or cycle covering all points; anything else means
/// the curve is not sampled densely enough yet.
pub fn nn_crust<F: Float>(cloud: &PointCloud<F>) -> Result<CyclicOrder> {
    let n = cloud.len();
    if n < 3 {
        return Err(insufficient(format!("need at least 3 points, got {n}")));
    }
    let index = NeighborIndex::new(cloud);

    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    let add_edge = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        if !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };

    for i in 0..n {
        let j = index.nearest(i).expect("n >= 3 guarantees a neighbor");
        add_edge(&mut adj, i, j);
    }
    let degree_one: Vec<usize> = (0..n).filter(|&i| adj[i].len() == 1).collect();
    for &i in &degree_one {
        let q = adj[i][0];
        if let Some(r) = index.half_neighbor(i, q) {
            add_edge(&mut adj, i, r);
        }
    }

    if let Some(i) = (0..n).find(|&i| adj[i].len() > 2) {
        return Err(insufficient(format!(
            "point {i} has {} incident edges",
            adj[i].len()
        )));
    }
    let endpoints: Vec<usize> = (0..n).filter(|&i| adj[i].len() == 1).collect();
    let closed = match endpoints.len() {
        0 => true,
        2 => false,
        k => {
            return Err(insufficient(format!(
                "{} chain endpoints imply multiple components",
                k
            )))
        }
    };

    // Walk the single path/cycle; starting point and direction are fixed
    // for determinism.
    let start = if closed { 0 } else { endpoints[0] };
    let mut order = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        order.push(cur);
        let next = adj[cur]
            .iter()
            .copied()
            .filter(|&x| x != prev)
            .min();
        match next {
            Some(next) if !(closed && next == start) && order.len() < n => {
                prev = cur;
                cur = next;
            }
            _ => break,
        }
    }
    if order.len() != n {
        return Err(insufficient(format!(
            "points split into more than one component ({} of {n} reachable)",
            order.len()
        )));
    }
    Ok(CyclicOrder { order, closed })
}

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

/// The oriented ordering of cloud points along the curve: it starts at the
/// last-coordinate axis (the curve's initial segment) and ends at the
/// first-coordinate axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveOrdering {
    perm: Vec<usize>,
    closed: bool,
}

impl CurveOrdering {
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn closed(&self) -> bool {
        self.closed
    }
}

/// `true` when every coordinate of `p` except `axis` is within `eps` of 0.
fn on_axis<F: Float>(p: &[F], axis: usize, eps: F) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == axis || x.abs() <= eps)
}

/// Orient a cyclic ordering so it runs from the curve's initial segment
/// (last-coordinate axis) to its terminal segment (first-coordinate axis).
///
/// `k` is the position of the on-last-axis point nearest the origin. The
/// cyclic order is kept when its successor is also on the last axis or its
/// predecessor is on the first axis, and reversed otherwise; either way the
/// result starts at `k`. Index arithmetic is modulo `n`.
pub fn orient<F: Float>(
    cloud: &PointCloud<F>,
    cyclic: &CyclicOrder,
    axis_epsilon: F,
) -> Result<CurveOrdering> {
    let n = cyclic.order.len();
    let dim = cloud.dim();
    let last = dim - 1;

    let mut k_best: Option<(F, usize, usize)> = None; // (norm2, point idx, position)
    for (pos, &i) in cyclic.order.iter().enumerate() {
        let p = cloud.point(i);
        if on_axis(p, last, axis_epsilon) {
            let key = (norm2(p), i, pos);
            if k_best.is_none_or(|(bn, bi, _)| (key.0, key.1) < (bn, bi)) {
                k_best = Some(key);
            }
        }
    }
    let Some((_, _, k)) = k_best else {
        return Err(Error::NoAxisPoint {
            axis: dim,
            epsilon: axis_epsilon.to_f64().unwrap_or(f64::NAN),
        });
    };

    let succ = cloud.point(cyclic.order[(k + 1) % n]);
    let pred = cloud.point(cyclic.order[(k + n - 1) % n]);
    let keep_direction = on_axis(succ, last, axis_epsilon) || on_axis(pred, 0, axis_epsilon);

    let perm = if keep_direction {
        (0..n).map(|j| cyclic.order[(k + j) % n]).collect()
    } else {
        (0..n).map(|j| cyclic.order[(k + n - j) % n]).collect()
    };
    Ok(CurveOrdering { perm, closed: cyclic.closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseSignal;
    use crate::train::{sample_train, SamplingConfig};

    fn cloud(rows: Vec<Vec<f64>>) -> PointCloud<f64> {
        PointCloud::from_rows(rows).unwrap()
    }

    /// The oriented order of trains sampled at increasing start times must
    /// be the generator order.
    fn curve_cloud(pulse: &PulseSignal<f64>, d: usize, tau: f64, starts: &[f64]) -> PointCloud<f64> {
        let cfg = SamplingConfig::new(d, tau).unwrap();
        let rows: Vec<Vec<f64>> = starts
            .iter()
            .map(|&t| sample_train(pulse, t, &cfg).values().to_vec())
            .collect();
        cloud(rows)
    }

    #[test]
    fn rejects_fewer_than_three_points() {
        let c = cloud(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(nn_crust(&c), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn eight_points_on_a_circle_recover_angular_order() {
        // Insertion order shuffles the angular order.
        let shuffled = [3usize, 7, 1, 5, 0, 6, 2, 4];
        let rows: Vec<Vec<f64>> = shuffled
            .iter()
            .map(|&k| {
                let a = k as f64 * std::f64::consts::FRAC_PI_4;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let c = cloud(rows);
        let cyc = nn_crust(&c).unwrap();
        assert!(cyc.closed());
        // Map recovered order back to angular positions; consecutive
        // angular steps must be +-1 mod 8 throughout.
        let angular: Vec<usize> = cyc.order().iter().map(|&i| shuffled[i]).collect();
        let step = (angular[1] + 8 - angular[0]) % 8;
        assert!(step == 1 || step == 7);
        for w in angular.windows(2) {
            assert_eq!((w[1] + 8 - w[0]) % 8, step);
        }
    }

    /// Hand-traced orientation example in the plane (d = 1).
    /// Points in cyclic order: (0,1), (1,2), (2,1), (1,0). The on-last-axis
    /// point is (0,1); its predecessor (1,0) lies on the first axis, so the
    /// direction is kept and the result starts (0,1),(1,2),(2,1),(1,0).
    #[test]
    fn orient_keeps_direction_per_hand_trace() {
        let c = cloud(vec![
            vec![0.0, 1.0],
            vec![1.0, 2.0],
            vec![2.0, 1.0],
            vec![1.0, 0.0],
        ]);
        let cyc = CyclicOrder::from_order(vec![0, 1, 2, 3], true);
        let o = orient(&c, &cyc, 0.0).unwrap();
        assert_eq!(o.perm(), &[0, 1, 2, 3]);
    }

    #[test]
    fn orient_reverses_reversed_input_to_same_result() {
        let c = cloud(vec![
            vec![0.0, 1.0],
            vec![1.0, 2.0],
            vec![2.0, 1.0],
            vec![1.0, 0.0],
        ]);
        let cyc = CyclicOrder::from_order(vec![3, 2, 1, 0], true);
        let o = orient(&c, &cyc, 0.0).unwrap();
        assert_eq!(o.perm(), &[0, 1, 2, 3]);
    }

    #[test]
    fn orient_without_axis_point_fails() {
        let c = cloud(vec![
            vec![0.5, 1.0],
            vec![1.0, 2.0],
            vec![2.0, 1.0],
        ]);
        let cyc = CyclicOrder::from_order(vec![0, 1, 2], true);
        assert!(matches!(orient(&c, &cyc, 0.0), Err(Error::NoAxisPoint { .. })));
    }

    #[test]
    fn orient_is_idempotent_in_effect() {
        let pulse = PulseSignal::<f64>::two_lobe();
        let starts: Vec<f64> = (0..120).map(|i| -0.32 + 1.32 * (i as f64 + 0.5) / 120.0).collect();
        let c = curve_cloud(&pulse, 2, 0.16, &starts);
        let cyc = nn_crust(&c).unwrap();
        let o1 = orient(&c, &cyc, 0.0).unwrap();
        let again = CyclicOrder::from_order(o1.perm().to_vec(), cyc.closed());
        let o2 = orient(&c, &again, 0.0).unwrap();
        assert_eq!(o1.perm(), o2.perm());
    }

    #[test]
    fn recovers_generator_order_on_dense_curve() {
        let pulse = PulseSignal::<f64>::two_lobe();
        let n = 200;
        let starts: Vec<f64> = (0..n).map(|i| -0.32 + 1.32 * (i as f64 + 0.5) / n as f64).collect();
        let c = curve_cloud(&pulse, 2, 0.16, &starts);
        let cyc = nn_crust(&c).unwrap();
        let o = orient(&c, &cyc, 0.0).unwrap();
        let identity: Vec<usize> = (0..n).collect();
        assert_eq!(o.perm(), identity.as_slice());
    }

    #[test]
    fn ordering_is_scale_invariant() {
        let pulse = PulseSignal::<f64>::two_lobe();
        let starts: Vec<f64> = (0..150).map(|i| -0.32 + 1.32 * (i as f64 + 0.5) / 150.0).collect();
        let c1 = curve_cloud(&pulse, 2, 0.16, &starts);
        for c in [0.25f64, 8.0] {
            let rows: Vec<Vec<f64>> = c1.iter_points().map(|p| p.iter().map(|&x| x * c).collect()).collect();
            let c2 = cloud(rows);
            let a = nn_crust(&c1).unwrap();
            let b = nn_crust(&c2).unwrap();
            assert_eq!(a, b);
            let oa = orient(&c1, &a, 0.0).unwrap();
            let ob = orient(&c2, &b, 0.0).unwrap();
            assert_eq!(oa.perm(), ob.perm());
        }
    }

    #[test]
    fn kd_and_brute_backends_agree() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        // Quantized coordinates force exact distance ties.
        let strat = proptest::collection::vec(
            proptest::collection::vec((-8i32..8).prop_map(|q| q as f64 * 0.25), 3),
            600..700,
        );
        runner
            .run(&strat, |mut rows| {
                for (i, row) in rows.iter_mut().enumerate() {
                    if row.iter().all(|&x| x == 0.0) {
                        row[i % 3] = 1.0;
                    }
                }
                let c = PointCloud::from_rows(rows).unwrap();
                let brute = NeighborIndex::brute(&c);
                let kd = NeighborIndex::kd(&c);
                for i in 0..c.len().min(250) {
                    prop_assert_eq!(brute.nearest(i), kd.nearest(i));
                    let q = brute.nearest(i).unwrap();
                    prop_assert_eq!(brute.half_neighbor(i, q), kd.half_neighbor(i, q));
                }
                Ok(())
            })
            .unwrap();
    }
}
