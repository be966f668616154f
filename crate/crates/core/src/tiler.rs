//! Border-constrained square tiling: consistency checking, the recursive
//! lexicographic extension of a consistent border, lexicographically first
//! "good squares", ring extension, and per-subsquare complexity profiling.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::palette::{
    canonical_encode, BorderColoring, ColorId, GridError, Palette, Side, TilingGrid,
};
use crate::solver::{solve, SolveSpec, TileOrder};

#[derive(Clone, Copy, Debug)]
pub struct TilerConfig {
    /// Hard cap on square sides; consistency search is exponential in the
    /// worst case, so blowing past this is opt-in.
    pub max_side: usize,
}

impl Default for TilerConfig {
    fn default() -> Self {
        TilerConfig { max_side: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilerError {
    SideNotPowerOfTwo(usize),
    SideCapExceeded { n: usize, cap: usize },
    InconsistentBorder,
    NoTiling { n: usize },
    NotExtendible,
    Grid(GridError),
}

impl fmt::Display for TilerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilerError::SideNotPowerOfTwo(n) => write!(f, "side {} is not a power of two", n),
            TilerError::SideCapExceeded { n, cap } => {
                write!(f, "side {} exceeds the configured cap {}", n, cap)
            }
            TilerError::InconsistentBorder => write!(f, "border coloring admits no filling"),
            TilerError::NoTiling { n } => write!(f, "no consistent border of side {} exists", n),
            TilerError::NotExtendible => write!(f, "square admits no surrounding ring"),
            TilerError::Grid(e) => write!(f, "{}", e),
        }
    }
}

impl core::error::Error for TilerError {}

impl From<GridError> for TilerError {
    fn from(e: GridError) -> Self {
        TilerError::Grid(e)
    }
}

/// True iff some valid n-by-n grid matches `b` on all four sides.
pub fn is_consistent(p: &Palette, b: &BorderColoring, cfg: &TilerConfig) -> bool {
    consistency_witness(p, b, cfg).is_some()
}

/// Some matching grid when the border is consistent.
pub fn consistency_witness(p: &Palette, b: &BorderColoring, _cfg: &TilerConfig) -> Option<TilingGrid> {
    solve(&SolveSpec::with_border(p, b), TileOrder::LeastIndex)
}

fn partial_consistent(
    p: &Palette,
    n: usize,
    top: &[Option<ColorId>],
    bottom: &[Option<ColorId>],
    left: &[Option<ColorId>],
    right: &[Option<ColorId>],
) -> bool {
    let spec = SolveSpec::with_partial_border(
        p,
        n,
        top.to_vec(),
        bottom.to_vec(),
        left.to_vec(),
        right.to_vec(),
    );
    solve(&spec, TileOrder::LeastIndex).is_some()
}

/// Central-line state during the lexicographic search: `h` is the horizontal
/// cut (one color per column), `v` the vertical cut (one per row).
struct CenterSearch<'a> {
    p: &'a Palette,
    b: &'a BorderColoring,
    h: Vec<Option<ColorId>>,
    v: Vec<Option<ColorId>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Quadrant {
    Nw,
    Ne,
    Sw,
    Se,
}

impl<'a> CenterSearch<'a> {
    fn quadrant_border(
        &self,
        q: Quadrant,
    ) -> (Vec<Option<ColorId>>, Vec<Option<ColorId>>, Vec<Option<ColorId>>, Vec<Option<ColorId>>) {
        let n = self.b.n;
        let half = n / 2;
        let some = |s: &[ColorId]| s.iter().map(|&c| Some(c)).collect::<Vec<_>>();
        match q {
            Quadrant::Nw => (
                some(&self.b.top[..half]),
                self.h[..half].to_vec(),
                some(&self.b.left[..half]),
                self.v[..half].to_vec(),
            ),
            Quadrant::Ne => (
                some(&self.b.top[half..]),
                self.h[half..].to_vec(),
                self.v[..half].to_vec(),
                some(&self.b.right[..half]),
            ),
            Quadrant::Sw => (
                self.h[..half].to_vec(),
                some(&self.b.bottom[..half]),
                some(&self.b.left[half..]),
                self.v[half..].to_vec(),
            ),
            Quadrant::Se => (
                self.h[half..].to_vec(),
                some(&self.b.bottom[half..]),
                self.v[half..].to_vec(),
                some(&self.b.right[half..]),
            ),
        }
    }

    fn quadrant_ok(&self, q: Quadrant) -> bool {
        let (top, bottom, left, right) = self.quadrant_border(q);
        partial_consistent(self.p, self.b.n / 2, &top, &bottom, &left, &right)
    }

    fn affected(&self, pos: usize) -> [Quadrant; 2] {
        let n = self.b.n;
        let half = n / 2;
        if pos < n {
            // Horizontal cut, column pos.
            if pos < half {
                [Quadrant::Nw, Quadrant::Sw]
            } else {
                [Quadrant::Ne, Quadrant::Se]
            }
        } else {
            // Vertical cut, row pos - n.
            if pos - n < half {
                [Quadrant::Nw, Quadrant::Ne]
            } else {
                [Quadrant::Sw, Quadrant::Se]
            }
        }
    }

    /// Assigns positions `pos..2n` in serialization order (horizontal cut
    /// left to right, then vertical cut top to bottom), smallest color index
    /// first, pruning through partial quadrant consistency. The first
    /// complete assignment found is the lexicographically first one.
    fn search(&mut self, pos: usize) -> bool {
        let n = self.b.n;
        if pos == 2 * n {
            return true;
        }
        for c in 0..self.p.color_count() as u16 {
            let color = ColorId(c);
            if pos < n {
                self.h[pos] = Some(color);
            } else {
                self.v[pos - n] = Some(color);
            }
            let ok = self.affected(pos).iter().all(|&q| self.quadrant_ok(q));
            if ok && self.search(pos + 1) {
                return true;
            }
        }
        if pos < n {
            self.h[pos] = None;
        } else {
            self.v[pos - n] = None;
        }
        false
    }
}

/// Extends a consistent border of side 2^k to a full tiling: find the
/// lexicographically first coloring of the two central lines that leaves all
/// four quadrant borders consistent, then recurse; a 1x1 border is just a
/// tile coloring and the least matching tile is placed.
pub fn extend_lex(p: &Palette, b: &BorderColoring, cfg: &TilerConfig) -> Result<TilingGrid, TilerError> {
    if !b.n.is_power_of_two() {
        return Err(TilerError::SideNotPowerOfTwo(b.n));
    }
    if b.n > cfg.max_side {
        return Err(TilerError::SideCapExceeded { n: b.n, cap: cfg.max_side });
    }
    if !is_consistent(p, b, cfg) {
        return Err(TilerError::InconsistentBorder);
    }
    Ok(extend_rec(p, b))
}

fn extend_rec(p: &Palette, b: &BorderColoring) -> TilingGrid {
    let n = b.n;
    if n == 1 {
        let want = (b.top[0], b.right[0], b.bottom[0], b.left[0]);
        let t = p
            .tiles()
            .iter()
            .position(|t| (t.north, t.east, t.south, t.west) == want)
            .expect("consistent 1x1 border has a matching tile");
        return TilingGrid::filled(1, 1, t as u32);
    }
    let mut cs = CenterSearch { p, b, h: vec![None; n], v: vec![None; n] };
    let found = cs.search(0);
    debug_assert!(found, "consistent border must admit a central coloring");
    let h: Vec<ColorId> = cs.h.iter().map(|c| c.unwrap()).collect();
    let v: Vec<ColorId> = cs.v.iter().map(|c| c.unwrap()).collect();

    let half = n / 2;
    let quad = |top: &[ColorId], bottom: &[ColorId], left: &[ColorId], right: &[ColorId]| BorderColoring {
        n: half,
        top: top.to_vec(),
        bottom: bottom.to_vec(),
        left: left.to_vec(),
        right: right.to_vec(),
    };
    let nw = extend_rec(p, &quad(&b.top[..half], &h[..half], &b.left[..half], &v[..half]));
    let ne = extend_rec(p, &quad(&b.top[half..], &h[half..], &v[..half], &b.right[..half]));
    let sw = extend_rec(p, &quad(&h[..half], &b.bottom[..half], &b.left[half..], &v[half..]));
    let se = extend_rec(p, &quad(&h[half..], &b.bottom[half..], &v[half..], &b.right[half..]));

    let mut out = TilingGrid::filled(n, n, 0);
    for y in 0..half {
        for x in 0..half {
            out.set(x, y, nw.get(x, y));
            out.set(x + half, y, ne.get(x, y));
            out.set(x, y + half, sw.get(x, y));
            out.set(x + half, y + half, se.get(x, y));
        }
    }
    debug_assert!(crate::palette::is_valid(p, &out));
    out
}

/// Builds the canonical 2^k square: the lexicographically first consistent
/// border (in top, bottom, left, right serialization order) extended by
/// `extend_lex`.
pub fn build_good_square(p: &Palette, k: u32, cfg: &TilerConfig) -> Result<TilingGrid, TilerError> {
    let n = 1usize << k;
    if n > cfg.max_side {
        return Err(TilerError::SideCapExceeded { n, cap: cfg.max_side });
    }
    p.check_nonempty().map_err(|_| TilerError::NoTiling { n })?;
    let mut border: Vec<Option<ColorId>> = vec![None; 4 * n];
    if !border_search(p, n, &mut border, 0) {
        return Err(TilerError::NoTiling { n });
    }
    let take = |s: &[Option<ColorId>]| s.iter().map(|c| c.unwrap()).collect::<Vec<_>>();
    let b = BorderColoring {
        n,
        top: take(&border[0..n]),
        bottom: take(&border[n..2 * n]),
        left: take(&border[2 * n..3 * n]),
        right: take(&border[3 * n..4 * n]),
    };
    extend_lex(p, &b, cfg)
}

fn border_search(p: &Palette, n: usize, border: &mut Vec<Option<ColorId>>, pos: usize) -> bool {
    if pos == 4 * n {
        return true;
    }
    for c in 0..p.color_count() as u16 {
        border[pos] = Some(ColorId(c));
        if partial_consistent(p, n, &border[0..n], &border[n..2 * n], &border[2 * n..3 * n], &border[3 * n..4 * n])
            && border_search(p, n, border, pos + 1)
        {
            return true;
        }
    }
    border[pos] = None;
    false
}

/// Surrounds a valid square with one more layer, choosing ring tiles
/// lexicographically first in row-major scan order of the enlarged grid.
pub fn extend_center(p: &Palette, g: &TilingGrid, _cfg: &TilerConfig) -> Result<TilingGrid, TilerError> {
    if g.width != g.height {
        return Err(TilerError::Grid(GridError::NotSquare));
    }
    if let Some(v) = crate::palette::validate_tiling(p, g)?.first() {
        return Err(TilerError::Grid(GridError::InvalidTiling { x: v.x, y: v.y, side: v.side }));
    }
    let n = g.width;
    let m = n + 2;
    let mut big = TilingGrid::filled(m, m, u32::MAX);
    for y in 0..n {
        for x in 0..n {
            big.set(x + 1, y + 1, g.get(x, y));
        }
    }
    let ring: Vec<(usize, usize)> = (0..m * m)
        .map(|i| (i % m, i / m))
        .filter(|&(x, y)| x == 0 || y == 0 || x == m - 1 || y == m - 1)
        .collect();
    if ring_search(p, &mut big, &ring, 0) {
        Ok(big)
    } else {
        Err(TilerError::NotExtendible)
    }
}

fn ring_search(p: &Palette, big: &mut TilingGrid, ring: &[(usize, usize)], i: usize) -> bool {
    if i == ring.len() {
        return true;
    }
    let (x, y) = ring[i];
    let m = big.width;
    for t in 0..p.tile_count() as u32 {
        let tile = p.tile(t as usize);
        // Check against any already-assigned neighbor.
        let ok = [
            (x.wrapping_sub(1), y, Side::West),
            (x + 1, y, Side::East),
            (x, y.wrapping_sub(1), Side::North),
            (x, y + 1, Side::South),
        ]
        .iter()
        .all(|&(nx, ny, side)| {
            if nx >= m || ny >= m {
                return true;
            }
            let other = big.get(nx, ny);
            if other == u32::MAX {
                return true;
            }
            let o = p.tile(other as usize);
            match side {
                Side::West => tile.west == o.east,
                Side::East => tile.east == o.west,
                Side::North => tile.north == o.south,
                Side::South => tile.south == o.north,
            }
        });
        if ok {
            big.set(x, y, t);
            if ring_search(p, big, ring, i + 1) {
                return true;
            }
        }
    }
    big.set(x, y, u32::MAX);
    false
}

/// Proxy complexity extremes over all m-by-m subsquares, for every m up to
/// the smaller grid dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexityProfile {
    pub per_side: BTreeMap<usize, (u64, u64)>,
}

pub fn complexity_profile<F: FnMut(&[u8]) -> u64>(
    g: &TilingGrid,
    tile_count: usize,
    mut oracle: F,
) -> ComplexityProfile {
    let mut per_side = BTreeMap::new();
    let limit = g.width.min(g.height);
    for m in 1..=limit {
        let mut max = u64::MIN;
        let mut min = u64::MAX;
        for y in 0..=(g.height - m) {
            for x in 0..=(g.width - m) {
                let bytes = canonical_encode(&g.subgrid(x, y, m), tile_count);
                let c = oracle(&bytes);
                max = max.max(c);
                min = min.min(c);
            }
        }
        per_side.insert(m, (max, min));
    }
    ComplexityProfile { per_side }
}

/// Least-squares slope over the (m, max) points with the intercept raised to
/// the upper envelope, so residuals a*m + b - max(m) are all non-negative.
pub fn affine_upper_fit(profile: &ComplexityProfile) -> (f64, f64) {
    let pts: Vec<(f64, f64)> =
        profile.per_side.iter().map(|(&m, &(max, _))| (m as f64, max as f64)).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        let b = pts.first().map(|&(_, y)| y).unwrap_or(0.0);
        return (0.0, b);
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let mut a = if denom.abs() < 1e-12 { 0.0 } else { (n * sxy - sx * sy) / denom };
    if a < 0.0 {
        a = 0.0;
    }
    let b = pts.iter().map(|&(x, y)| y - a * x).fold(f64::MIN, f64::max);
    (a, b)
}

pub fn fit_residuals(profile: &ComplexityProfile, a: f64, b: f64) -> Vec<(usize, f64)> {
    profile
        .per_side
        .iter()
        .map(|(&m, &(max, _))| (m, a * m as f64 + b - max as f64))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DistinctSquareCount {
    pub n: usize,
    pub count: usize,
}

/// Exact number of distinct n-by-n subsquares, by canonical encoding.
pub fn count_distinct_squares(g: &TilingGrid, n: usize, tile_count: usize) -> DistinctSquareCount {
    let mut seen = BTreeSet::new();
    for y in 0..=(g.height - n) {
        for x in 0..=(g.width - n) {
            seen.insert(canonical_encode(&g.subgrid(x, y, n), tile_count));
        }
    }
    DistinctSquareCount { n, count: seen.len() }
}
