use super::GridSpec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which dyadic cubes a supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// The unshifted dyadic lattice.
    #[default]
    Dyadic,
    /// A single lattice out of the `3^n` shifted copies (0 is unshifted).
    Lattice(usize),
    /// Union of all `3^n` shifted lattices.
    Full,
}

impl Scope {
    pub fn lattices(&self, grid: &GridSpec) -> Vec<DyadicLattice> {
        match *self {
            Scope::Dyadic => vec![DyadicLattice::unshifted(*grid)],
            Scope::Lattice(id) => vec![DyadicLattice::shifted(*grid, id)],
            Scope::Full => DyadicLattice::all(*grid),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dyadic" => Some(Scope::Dyadic),
            "full" => Some(Scope::Full),
            other => other
                .strip_prefix("lattice:")
                .and_then(|n| n.parse().ok())
                .map(Scope::Lattice),
        }
    }
}

/// A dyadic cube, clipped to the grid when its lattice is shifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub lattice: usize,
    pub level: u32,
    /// Global multi-index `m`: the unclipped cube is `offset + [m, m+1) * 2^level`.
    pub index: [i64; 2],
    pub start: [usize; 2],
    pub end: [usize; 2],
    pub dim: usize,
}

impl Cube {
    pub fn cell_count(&self) -> usize {
        (0..self.dim).map(|a| self.end[a] - self.start[a]).product()
    }

    /// Side of the unclipped cube in cells.
    pub fn side_cells(&self) -> usize {
        1usize << self.level
    }

    pub fn contains_cell(&self, grid: &GridSpec, cell: usize) -> bool {
        let c = grid.coords(cell);
        (0..self.dim).all(|a| c[a] >= self.start[a] && c[a] < self.end[a])
    }

    /// `self ⊆ other` as cell sets.
    pub fn is_within(&self, other: &Cube) -> bool {
        (0..self.dim).all(|a| self.start[a] >= other.start[a] && self.end[a] <= other.end[a])
    }

    pub fn cells<'a>(&self, grid: &'a GridSpec) -> impl Iterator<Item = usize> + 'a {
        let (s, e) = (self.start, self.end);
        let (y0, y1) = if self.dim == 2 { (s[1], e[1]) } else { (0, 1) };
        (y0..y1).flat_map(move |y| (s[0]..e[0]).map(move |x| grid.index([x, y])))
    }

    /// Physical lower and upper corners of the (clipped) cube.
    pub fn extent(&self, grid: &GridSpec) -> ([f64; 2], [f64; 2]) {
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for a in 0..self.dim {
            let h = grid.cell_side(a);
            lo[a] = grid.lower()[a] + self.start[a] as f64 * h;
            hi[a] = grid.lower()[a] + self.end[a] as f64 * h;
        }
        (lo, hi)
    }

    pub(crate) fn check_within(&self, grid: &GridSpec) -> Result<()> {
        let res = grid.res();
        let ok = self.dim == grid.dim()
            && (0..self.dim).all(|a| self.start[a] < self.end[a] && self.end[a] <= res[a]);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "cube {:?}..{:?} does not lie within the grid",
                self.start, self.end
            )))
        }
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// A nested system of dyadic cubes over a grid, optionally shifted by a third
/// of the domain along each axis and clipped to the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicLattice {
    grid: GridSpec,
    id: usize,
    offset: [i64; 2],
}

impl DyadicLattice {
    pub fn unshifted(grid: GridSpec) -> Self {
        Self::shifted(grid, 0)
    }

    /// Lattice `id` in `0..3^n`; base-3 digit `d` of axis `a` selects the
    /// offset `{0, +s, -s}` with `s = round(res / 3)` cells.
    pub fn shifted(grid: GridSpec, id: usize) -> Self {
        let count = Self::count(grid.dim());
        assert!(id < count, "lattice id {id} out of range 0..{count}");
        let mut offset = [0i64; 2];
        let mut rest = id;
        for (a, o) in offset.iter_mut().enumerate().take(grid.dim()) {
            let s = (grid.res()[a] as f64 / 3.0).round() as i64;
            *o = match rest % 3 {
                0 => 0,
                1 => s,
                _ => -s,
            };
            rest /= 3;
        }
        Self { grid, id, offset }
    }

    /// All `3^n` lattices, unshifted first.
    pub fn all(grid: GridSpec) -> Vec<Self> {
        (0..Self::count(grid.dim()))
            .map(|id| Self::shifted(grid, id))
            .collect()
    }

    pub fn count(dim: usize) -> usize {
        3usize.pow(dim as u32)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn offset(&self) -> [i64; 2] {
        self.offset
    }

    pub fn top_level(&self) -> u32 {
        self.grid.top_level()
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        0..=self.top_level()
    }

    fn axis_range(&self, level: u32, axis: usize) -> (i64, usize) {
        if axis >= self.grid.dim() {
            return (0, 1);
        }
        let size = 1i64 << level;
        let res = self.grid.res()[axis] as i64;
        let o = self.offset[axis];
        let m_min = floor_div(-o, size);
        let m_max = floor_div(res - 1 - o, size);
        (m_min, (m_max - m_min + 1) as usize)
    }

    /// Number of cubes at `level` per axis.
    pub fn level_shape(&self, level: u32) -> [usize; 2] {
        [self.axis_range(level, 0).1, self.axis_range(level, 1).1]
    }

    pub fn cubes_at(&self, level: u32) -> usize {
        let s = self.level_shape(level);
        s[0] * s[1]
    }

    /// The `local`-th cube at `level` (axis 0 fastest).
    pub fn cube(&self, level: u32, local: usize) -> Cube {
        let shape = self.level_shape(level);
        let l = [local % shape[0], local / shape[0]];
        let size = 1i64 << level;
        let res = self.grid.res();
        let mut index = [0i64; 2];
        let mut start = [0usize; 2];
        let mut end = [1usize; 2];
        for a in 0..self.grid.dim() {
            let (m_min, _) = self.axis_range(level, a);
            let m = m_min + l[a] as i64;
            index[a] = m;
            let lo = self.offset[a] + m * size;
            let hi = lo + size;
            start[a] = lo.max(0) as usize;
            end[a] = hi.min(res[a] as i64) as usize;
        }
        Cube {
            lattice: self.id,
            level,
            index,
            start,
            end,
            dim: self.grid.dim(),
        }
    }

    /// Local index of the cube at `level` containing `cell`.
    pub fn cube_of(&self, level: u32, cell: usize) -> usize {
        let c = self.grid.coords(cell);
        let size = 1i64 << level;
        let shape = self.level_shape(level);
        let mut l = [0usize; 2];
        for (a, la) in l.iter_mut().enumerate().take(self.grid.dim()) {
            let (m_min, _) = self.axis_range(level, a);
            *la = (floor_div(c[a] as i64 - self.offset[a], size) - m_min) as usize;
        }
        l[0] + shape[0] * l[1]
    }

    /// Local index of the parent (at `level + 1`) of cube `local` at `level`.
    pub fn parent_of(&self, level: u32, local: usize) -> usize {
        let shape = self.level_shape(level);
        let pshape = self.level_shape(level + 1);
        let l = [local % shape[0], local / shape[0]];
        let mut p = [0usize; 2];
        for (a, pa) in p.iter_mut().enumerate().take(self.grid.dim()) {
            let (m_min, _) = self.axis_range(level, a);
            let (pm_min, _) = self.axis_range(level + 1, a);
            *pa = (floor_div(m_min + l[a] as i64, 2) - pm_min) as usize;
        }
        p[0] + pshape[0] * p[1]
    }

    /// Local indices of the children (at `level - 1`) of cube `local` at `level`.
    pub fn children_of(&self, level: u32, local: usize) -> Vec<usize> {
        assert!(level > 0);
        let parent = self.cube(level, local);
        let cshape = self.level_shape(level - 1);
        let mut out = Vec::with_capacity(4);
        let (ny_lo, ny_hi) = if self.grid.dim() == 2 { (0, 2) } else { (0, 1) };
        let (cmx, _) = self.axis_range(level - 1, 0);
        let (cmy, _) = self.axis_range(level - 1, 1);
        for ey in ny_lo..ny_hi {
            for ex in 0..2 {
                let mx = 2 * parent.index[0] + ex;
                let my = if self.grid.dim() == 2 {
                    2 * parent.index[1] + ey
                } else {
                    0
                };
                let lx = mx - cmx;
                let ly = my - cmy;
                if lx < 0 || ly < 0 || lx as usize >= cshape[0] || ly as usize >= cshape[1] {
                    continue;
                }
                out.push(lx as usize + cshape[0] * ly as usize);
            }
        }
        out
    }

    /// Cube sums of `values` at every level, accumulated bottom-up from the
    /// children so each level is a pairwise refinement of the one below.
    pub fn level_sums(&self, values: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(values.len(), self.grid.len());
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.top_level() as usize + 1);
        let mut base = vec![0.0; self.cubes_at(0)];
        for (cell, &v) in values.iter().enumerate() {
            base[self.cube_of(0, cell)] += v;
        }
        out.push(base);
        for level in 1..=self.top_level() {
            let mut sums = vec![0.0; self.cubes_at(level)];
            let below = &out[level as usize - 1];
            for (child, &s) in below.iter().enumerate() {
                sums[self.parent_of(level - 1, child)] += s;
            }
            out.push(sums);
        }
        out
    }

    /// Cell counts of every cube, level by level.
    pub fn level_counts(&self) -> Vec<Vec<f64>> {
        self.level_sums(&vec![1.0; self.grid.len()])
    }

    /// Cube means of `values` at every level.
    pub fn level_means(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let sums = self.level_sums(values);
        let counts = self.level_counts();
        sums.into_iter()
            .zip(counts)
            .map(|(s, c)| s.iter().zip(&c).map(|(a, b)| a / b).collect())
            .collect()
    }

    /// For each cell, the maximum of `per_level[k][cube_of(k, cell)]` over
    /// all levels `k`.
    pub fn sup_over_containing(&self, per_level: &[Vec<f64>]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|cell| {
                per_level
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v[self.cube_of(k as u32, cell)])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    /// For each cell, the sum of `per_level[k][cube_of(k, cell)]` over levels.
    pub fn sum_over_containing(&self, per_level: &[Vec<f64>]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|cell| {
                per_level
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v[self.cube_of(k as u32, cell)])
                    .sum()
            })
            .collect()
    }

    /// Every cube at every level, finest first.
    pub fn cubes(&self) -> impl Iterator<Item = Cube> + '_ {
        self.levels()
            .flat_map(move |k| (0..self.cubes_at(k)).map(move |i| self.cube(k, i)))
    }
}

/// Every cube of `lattice` with at least `min_cells` cells, each exactly once,
/// ordered by level then by local index.
pub fn enumerate_cubes(lattice: &DyadicLattice, min_cells: usize) -> Vec<Cube> {
    lattice
        .cubes()
        .filter(|q| q.cell_count() >= min_cells.max(1))
        .collect()
}
