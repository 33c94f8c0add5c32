//! Uniform grid over a point cloud for closed-ball radius queries.

use std::ops::Range;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::linalg::dist_sq;
use crate::points::PointSet;

const STACK_DIM: usize = 8;

/// Points bucketed by `floor(x / cell_size)`, stored cell by cell.
///
/// Built once, then read-only; queries may run from many threads.
#[derive(Clone, Debug)]
pub struct GridIndex {
    dim: usize,
    cell_size: f64,
    cells: FxHashMap<Box<[i64]>, Range<usize>>,
    /// Original point index of each slot, cell-contiguous.
    ids: Vec<usize>,
    /// Coordinates of each slot, same order as `ids`.
    coords: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl GridIndex {
    /// Indexes every point of `points`.
    pub fn build(points: &PointSet, cell_size: f64) -> Result<Self> {
        let all: Vec<usize> = (0..points.len()).collect();
        Self::build_subset(points, &all, cell_size)
    }

    /// Indexes only the points listed in `subset`; queries report the
    /// original indices.
    pub fn build_subset(points: &PointSet, subset: &[usize], cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::InvalidCellSize(cell_size));
        }
        let dim = points.dim();
        let mut keyed: Vec<(Box<[i64]>, usize)> = subset
            .iter()
            .map(|&i| (cell_key(points.point(i), cell_size), i))
            .collect();
        keyed.sort_unstable();

        let mut cells = FxHashMap::default();
        let mut ids = Vec::with_capacity(keyed.len());
        let mut coords = Vec::with_capacity(keyed.len() * dim);
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        let mut start = 0;
        for (slot, (key, i)) in keyed.iter().enumerate() {
            let p = points.point(*i);
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
            ids.push(*i);
            coords.extend_from_slice(p);
            let last = slot + 1 == keyed.len() || keyed[slot + 1].0 != *key;
            if last {
                cells.insert(key.clone(), start..slot + 1);
                start = slot + 1;
            }
        }
        Ok(Self {
            dim,
            cell_size,
            cells,
            ids,
            coords,
            lo,
            hi,
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of points in each occupied cell (unordered).
    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.values().map(|r| r.len()).collect()
    }

    /// Bounding box of the indexed points, `None` when empty.
    pub fn bounds(&self) -> Option<(&[f64], &[f64])> {
        (!self.is_empty()).then(|| (self.lo.as_slice(), self.hi.as_slice()))
    }

    /// Indices of points with `|x - p| <= r`, ascending.
    pub fn neighbors_within(&self, p: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_within(p, r, |i, _| {
            out.push(i);
            true
        });
        out.sort_unstable();
        out
    }

    /// Calls `f(index, coords)` for each point in the closed ball `B(p, r)`
    /// in storage order, stopping as soon as `f` returns `false`.
    pub fn visit_within<F>(&self, p: &[f64], r: f64, mut f: F)
    where
        F: FnMut(usize, &[f64]) -> bool,
    {
        assert_eq!(p.len(), self.dim, "query dimension mismatch");
        if self.is_empty() || !(r >= 0.0) {
            return;
        }
        let r_sq = r * r;
        let dim = self.dim;
        // Cell bounds and the running key; on the stack for small dims.
        let mut stack = [0i64; 3 * STACK_DIM];
        let mut heap = Vec::new();
        let buf: &mut [i64] = if dim <= STACK_DIM {
            &mut stack[..3 * dim]
        } else {
            heap.resize(3 * dim, 0);
            &mut heap
        };
        let (kmin, rest) = buf.split_at_mut(dim);
        let (kmax, key) = rest.split_at_mut(dim);
        let mut span = 1f64;
        for k in 0..dim {
            // Clip the query box to the data box first.
            let a = (p[k] - r).max(self.lo[k]);
            let b = (p[k] + r).min(self.hi[k]);
            if a > b {
                return;
            }
            kmin[k] = (a / self.cell_size).floor() as i64;
            kmax[k] = (b / self.cell_size).floor() as i64;
            span *= (kmax[k] - kmin[k] + 1) as f64;
        }

        let mut scan = |range: Range<usize>| -> bool {
            for slot in range {
                let q = &self.coords[slot * dim..(slot + 1) * dim];
                if dist_sq(p, q) <= r_sq && !f(self.ids[slot], q) {
                    return false;
                }
            }
            true
        };

        if span > self.cells.len() as f64 {
            // Fewer occupied cells than lattice cells in the box.
            for (key, range) in &self.cells {
                let inside = (0..dim).all(|k| key[k] >= kmin[k] && key[k] <= kmax[k]);
                if inside && !scan(range.clone()) {
                    return;
                }
            }
            return;
        }

        key.copy_from_slice(kmin);
        loop {
            if let Some(range) = self.cells.get(&*key) {
                if !scan(range.clone()) {
                    return;
                }
            }
            let mut k = 0;
            loop {
                if k == dim {
                    return;
                }
                key[k] += 1;
                if key[k] <= kmax[k] {
                    break;
                }
                key[k] = kmin[k];
                k += 1;
            }
        }
    }
}

fn cell_key(p: &[f64], cell_size: f64) -> Box<[i64]> {
    p.iter().map(|x| (x / cell_size).floor() as i64).collect()
}
