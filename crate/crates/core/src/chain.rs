//! Origin-capped polygonal chains and their arc-length parameterization.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::ordering::PointCloud;

/// The polygonal chain through ordered points, with both ends capped at
/// the origin, together with cumulative arc length at every vertex.
///
/// For ordered points `p_1 ... p_n` the vertices are `0, p_1, ..., p_n, 0`
/// and the total length is
/// `||p_1|| + sum_k ||p_{k+1} - p_k|| + ||p_n||`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalChain<F> {
    vertices: Vec<F>, // (n + 2) rows, flat
    cum_len: Vec<F>,  // one entry per vertex, cum_len[0] = 0
    dim: usize,
}

impl<F: Float> PolygonalChain<F> {
    /// Build the chain from points already in curve order.
    pub fn new(ordered: &PointCloud<F>) -> Result<Self> {
        if ordered.is_empty() {
            return Err(Error::invalid("cannot build a chain from zero points"));
        }
        let dim = ordered.dim();
        let n = ordered.len();
        let mut vertices = Vec::with_capacity((n + 2) * dim);
        vertices.extend(std::iter::repeat_n(F::zero(), dim));
        for p in ordered.iter_points() {
            vertices.extend_from_slice(p);
        }
        vertices.extend(std::iter::repeat_n(F::zero(), dim));

        let mut cum_len = Vec::with_capacity(n + 2);
        cum_len.push(F::zero());
        let mut acc = F::zero();
        for k in 1..n + 2 {
            let a = &vertices[(k - 1) * dim..k * dim];
            let b = &vertices[k * dim..(k + 1) * dim];
            let seg: F = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<F>()
                .sqrt();
            acc = acc + seg;
            cum_len.push(acc);
        }
        Ok(Self { vertices, cum_len, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of interior (non-origin) vertices.
    pub fn num_points(&self) -> usize {
        self.cum_len.len() - 2
    }

    /// Total length of the chain.
    pub fn total_len(&self) -> F {
        *self.cum_len.last().unwrap()
    }

    /// Arc-length coordinate of the `k`-th ordered point, `k = 1..=n`.
    pub fn arc_coordinate(&self, k: usize) -> Result<F> {
        if k < 1 || k > self.num_points() {
            return Err(Error::invalid(format!(
                "vertex index {k} out of range 1..={}",
                self.num_points()
            )));
        }
        Ok(self.cum_len[k])
    }

    fn vertex(&self, k: usize) -> &[F] {
        &self.vertices[k * self.dim..(k + 1) * self.dim]
    }

    /// The point at arc-length coordinate `s` along the chain,
    /// `0 <= s <= total_len()`, by linear interpolation on the containing
    /// segment.
    pub fn point_at(&self, s: F) -> Result<Vec<F>> {
        let total = self.total_len();
        if !(s >= F::zero() && s <= total) {
            return Err(Error::invalid(format!(
                "arc coordinate {s} outside [0, {total}]"
            )));
        }
        // First vertex index with cum_len >= s; interpolate on the
        // nondegenerate segment ending there.
        let j = self.cum_len.partition_point(|&c| c < s);
        if j == 0 {
            return Ok(self.vertex(0).to_vec());
        }
        let (lo, hi) = (self.cum_len[j - 1], self.cum_len[j]);
        let seg = hi - lo;
        if seg == F::zero() {
            return Ok(self.vertex(j).to_vec());
        }
        let r = (s - lo) / seg;
        let a = self.vertex(j - 1);
        let b = self.vertex(j);
        Ok(a.iter().zip(b).map(|(&x, &y)| x + r * (y - x)).collect())
    }
}
