//! Tiles, palettes, finite tiling grids, border colorings, the tiles/crosses
//! dual view and the canonical grid encoding.
//!
//! A tile is a unit square with a color on each side; a grid of tiles is
//! valid when every shared edge carries the same color on both sides. Grids
//! store tile indices only; colors are always derived from the palette. Row 0
//! is the top row.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Index of a color in the owning palette's declaration order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub u16);

impl fmt::Debug for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Side {
    North,
    East,
    South,
    West,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tile {
    pub north: ColorId,
    pub east: ColorId,
    pub south: ColorId,
    pub west: ColorId,
    /// Optional input-bit type carried by the tile.
    pub bit: Option<u8>,
    /// Marks the designated origin tile of an origin-constrained palette.
    pub origin: bool,
}

impl Tile {
    pub fn side(&self, s: Side) -> ColorId {
        match s {
            Side::North => self.north,
            Side::East => self.east,
            Side::South => self.south,
            Side::West => self.west,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaletteError {
    DuplicateColor(String),
    DuplicateTile(String),
    UnknownColor(String),
    EmptyTiles,
    MultipleOrigins,
    InvalidBit(u8),
}

impl fmt::Display for PaletteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaletteError::DuplicateColor(n) => write!(f, "duplicate color name {:?}", n),
            PaletteError::DuplicateTile(n) => write!(f, "duplicate tile id {:?}", n),
            PaletteError::UnknownColor(n) => write!(f, "unknown color name {:?}", n),
            PaletteError::EmptyTiles => write!(f, "palette declares no tiles"),
            PaletteError::MultipleOrigins => write!(f, "more than one tile carries the origin flag"),
            PaletteError::InvalidBit(b) => write!(f, "tile bit must be 0 or 1, got {}", b),
        }
    }
}

impl core::error::Error for PaletteError {}

/// An ordered set of colors plus an ordered set of tiles over them.
///
/// Declaration order defines the "alphabet": every lexicographic comparison
/// in the crate compares color indices or tile indices in this order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Palette {
    name: String,
    colors: Vec<String>,
    tiles: Vec<Tile>,
    tile_names: Vec<String>,
}

impl Palette {
    pub fn new(name: &str, colors: &[&str]) -> Result<Self, PaletteError> {
        let mut seen = BTreeSet::new();
        for c in colors {
            if !seen.insert(*c) {
                return Err(PaletteError::DuplicateColor(String::from(*c)));
            }
        }
        Ok(Palette {
            name: String::from(name),
            colors: colors.iter().map(|c| String::from(*c)).collect(),
            tiles: Vec::new(),
            tile_names: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.colors.len()
    }

    pub fn color_id(&self, name: &str) -> Option<ColorId> {
        self.colors.iter().position(|c| c == name).map(|i| ColorId(i as u16))
    }

    pub fn color_name(&self, id: ColorId) -> &str {
        &self.colors[id.0 as usize]
    }

    /// Registers a color if it is not yet declared and returns its id.
    pub fn intern_color(&mut self, name: &str) -> ColorId {
        if let Some(id) = self.color_id(name) {
            return id;
        }
        self.colors.push(String::from(name));
        ColorId((self.colors.len() - 1) as u16)
    }

    pub fn add_tile_by_name(
        &mut self,
        id: &str,
        n: &str,
        e: &str,
        s: &str,
        w: &str,
        bit: Option<u8>,
        origin: bool,
    ) -> Result<usize, PaletteError> {
        let lookup = |p: &Palette, name: &str| {
            p.color_id(name).ok_or_else(|| PaletteError::UnknownColor(String::from(name)))
        };
        let tile = Tile {
            north: lookup(self, n)?,
            east: lookup(self, e)?,
            south: lookup(self, s)?,
            west: lookup(self, w)?,
            bit,
            origin,
        };
        self.add_tile(id, tile)
    }

    pub fn add_tile(&mut self, id: &str, tile: Tile) -> Result<usize, PaletteError> {
        if self.tile_names.iter().any(|t| t == id) {
            return Err(PaletteError::DuplicateTile(String::from(id)));
        }
        if let Some(b) = tile.bit {
            if b > 1 {
                return Err(PaletteError::InvalidBit(b));
            }
        }
        if tile.origin && self.tiles.iter().any(|t| t.origin) {
            return Err(PaletteError::MultipleOrigins);
        }
        self.tiles.push(tile);
        self.tile_names.push(String::from(id));
        Ok(self.tiles.len() - 1)
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn tile(&self, index: usize) -> &Tile {
        &self.tiles[index]
    }

    pub fn tile_name(&self, index: usize) -> &str {
        &self.tile_names[index]
    }

    pub fn tile_index(&self, name: &str) -> Option<usize> {
        self.tile_names.iter().position(|t| t == name)
    }

    pub fn origin_tile(&self) -> Option<usize> {
        self.tiles.iter().position(|t| t.origin)
    }

    pub fn check_nonempty(&self) -> Result<(), PaletteError> {
        if self.tiles.is_empty() {
            Err(PaletteError::EmptyTiles)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    IndexOutOfRange { x: usize, y: usize, index: u32, tiles: usize },
    CellCountMismatch { expected: usize, got: usize },
    NotSquare,
    InvalidTiling { x: usize, y: usize, side: Side },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::IndexOutOfRange { x, y, index, tiles } => {
                write!(f, "cell ({}, {}) holds tile index {} but the palette has {} tiles", x, y, index, tiles)
            }
            GridError::CellCountMismatch { expected, got } => {
                write!(f, "grid expects {} cells, got {}", expected, got)
            }
            GridError::NotSquare => write!(f, "operation requires a square grid"),
            GridError::InvalidTiling { x, y, side } => {
                write!(f, "adjacency violated at ({}, {}) on side {:?}", x, y, side)
            }
        }
    }
}

impl core::error::Error for GridError {}

/// A finite rectangular assignment of tile indices, row-major, top row first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TilingGrid {
    pub width: usize,
    pub height: usize,
    cells: Vec<u32>,
}

impl TilingGrid {
    pub fn new(width: usize, height: usize, cells: Vec<u32>) -> Result<Self, GridError> {
        if cells.len() != width * height {
            return Err(GridError::CellCountMismatch { expected: width * height, got: cells.len() });
        }
        Ok(TilingGrid { width, height, cells })
    }

    pub fn filled(width: usize, height: usize, tile: u32) -> Self {
        TilingGrid { width, height, cells: vec![tile; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, tile: u32) {
        self.cells[y * self.width + x] = tile;
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn check_indices(&self, p: &Palette) -> Result<(), GridError> {
        for y in 0..self.height {
            for x in 0..self.width {
                let t = self.get(x, y);
                if t as usize >= p.tile_count() {
                    return Err(GridError::IndexOutOfRange { x, y, index: t, tiles: p.tile_count() });
                }
            }
        }
        Ok(())
    }

    /// Extracts the n-by-n subgrid with top-left corner at (x, y).
    pub fn subgrid(&self, x: usize, y: usize, n: usize) -> TilingGrid {
        let mut cells = Vec::with_capacity(n * n);
        for dy in 0..n {
            for dx in 0..n {
                cells.push(self.get(x + dx, y + dy));
            }
        }
        TilingGrid { width: n, height: n, cells }
    }
}

/// One adjacency mismatch: the cell at (x, y) disagrees with its neighbor on
/// the named side (East pairs with the right neighbor, South with the one
/// below).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Violation {
    pub x: usize,
    pub y: usize,
    pub side: Side,
}

/// Lists every violated shared edge; the empty list means the grid is valid.
pub fn validate_tiling(p: &Palette, g: &TilingGrid) -> Result<Vec<Violation>, GridError> {
    g.check_indices(p)?;
    let mut out = Vec::new();
    for y in 0..g.height {
        for x in 0..g.width {
            let t = p.tile(g.get(x, y) as usize);
            if x + 1 < g.width {
                let r = p.tile(g.get(x + 1, y) as usize);
                if t.east != r.west {
                    out.push(Violation { x, y, side: Side::East });
                }
            }
            if y + 1 < g.height {
                let b = p.tile(g.get(x, y + 1) as usize);
                if t.south != b.north {
                    out.push(Violation { x, y, side: Side::South });
                }
            }
        }
    }
    Ok(out)
}

pub fn is_valid(p: &Palette, g: &TilingGrid) -> bool {
    matches!(validate_tiling(p, g), Ok(v) if v.is_empty())
}

/// Colors assigned to the 4n outer tile sides of an n-by-n square.
///
/// `top`/`bottom` run left to right, `left`/`right` top to bottom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BorderColoring {
    pub n: usize,
    pub top: Vec<ColorId>,
    pub bottom: Vec<ColorId>,
    pub left: Vec<ColorId>,
    pub right: Vec<ColorId>,
}

impl BorderColoring {
    pub fn uniform(n: usize, c: ColorId) -> Self {
        BorderColoring { n, top: vec![c; n], bottom: vec![c; n], left: vec![c; n], right: vec![c; n] }
    }

    /// The border a valid grid actually exposes.
    pub fn of_grid(p: &Palette, g: &TilingGrid) -> Result<Self, GridError> {
        if g.width != g.height {
            return Err(GridError::NotSquare);
        }
        g.check_indices(p)?;
        let n = g.width;
        let side = |x: usize, y: usize, s: Side| p.tile(g.get(x, y) as usize).side(s);
        Ok(BorderColoring {
            n,
            top: (0..n).map(|x| side(x, 0, Side::North)).collect(),
            bottom: (0..n).map(|x| side(x, n - 1, Side::South)).collect(),
            left: (0..n).map(|y| side(0, y, Side::West)).collect(),
            right: (0..n).map(|y| side(n - 1, y, Side::East)).collect(),
        })
    }

    /// Serialization order used for all lexicographic comparisons of borders:
    /// top, bottom, left, right, each in declaration direction.
    pub fn serialized(&self) -> Vec<ColorId> {
        let mut v = Vec::with_capacity(4 * self.n);
        v.extend_from_slice(&self.top);
        v.extend_from_slice(&self.bottom);
        v.extend_from_slice(&self.left);
        v.extend_from_slice(&self.right);
        v
    }
}

/// Edge coloring of a w-by-h window: all tile sides, borders included.
///
/// Vertical edges sit on the w+1 vertical grid lines (index `y * (w + 1) + x`),
/// horizontal edges on the h+1 horizontal lines (index `y * w + x`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeColoring {
    pub width: usize,
    pub height: usize,
    pub vertical: Vec<ColorId>,
    pub horizontal: Vec<ColorId>,
}

impl EdgeColoring {
    pub fn v(&self, x: usize, y: usize) -> ColorId {
        self.vertical[y * (self.width + 1) + x]
    }
    pub fn h(&self, x: usize, y: usize) -> ColorId {
        self.horizontal[y * self.width + x]
    }
}

/// The dual view: the set of 4-edge combinations allowed to meet at a grid
/// vertex, written (up, right, down, left).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossSet {
    pub crosses: BTreeSet<[ColorId; 4]>,
}

/// Enumerates every valid 2x2 corner configuration and projects it onto the
/// four edges meeting at the center vertex.
pub fn to_cross_palette(p: &Palette) -> CrossSet {
    let mut crosses = BTreeSet::new();
    let tiles = p.tiles();
    for nw in tiles {
        for ne in tiles {
            if nw.east != ne.west {
                continue;
            }
            for sw in tiles {
                if nw.south != sw.north {
                    continue;
                }
                for se in tiles {
                    if ne.south != se.north || sw.east != se.west {
                        continue;
                    }
                    crosses.insert([nw.east, ne.south, sw.east, nw.south]);
                }
            }
        }
    }
    CrossSet { crosses }
}

/// Reads the full edge coloring off a valid grid.
pub fn grid_to_edges(p: &Palette, g: &TilingGrid) -> Result<EdgeColoring, GridError> {
    if let Some(v) = validate_tiling(p, g)?.first() {
        return Err(GridError::InvalidTiling { x: v.x, y: v.y, side: v.side });
    }
    let (w, h) = (g.width, g.height);
    let mut vertical = vec![ColorId(0); (w + 1) * h];
    let mut horizontal = vec![ColorId(0); w * (h + 1)];
    for y in 0..h {
        for x in 0..w {
            let t = p.tile(g.get(x, y) as usize);
            vertical[y * (w + 1) + x] = t.west;
            vertical[y * (w + 1) + x + 1] = t.east;
            horizontal[y * w + x] = t.north;
            horizontal[(y + 1) * w + x] = t.south;
        }
    }
    Ok(EdgeColoring { width: w, height: h, vertical, horizontal })
}

/// Rebuilds a grid from an edge coloring, picking the least tile index that
/// matches each cell's four sides.
pub fn edges_to_grid(p: &Palette, e: &EdgeColoring) -> Result<TilingGrid, GridError> {
    let (w, h) = (e.width, e.height);
    let mut cells = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let want = (e.h(x, y), e.v(x + 1, y), e.h(x, y + 1), e.v(x, y));
            let found = p
                .tiles()
                .iter()
                .position(|t| (t.north, t.east, t.south, t.west) == want)
                .ok_or(GridError::InvalidTiling { x, y, side: Side::North })?;
            cells.push(found as u32);
        }
    }
    TilingGrid::new(w, h, cells)
}

/// Interior vertices whose 4-edge combination is not in the cross set.
pub fn cross_violations(cs: &CrossSet, e: &EdgeColoring) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for vy in 1..e.height {
        for vx in 1..e.width {
            let up = e.v(vx, vy - 1);
            let down = e.v(vx, vy);
            let left = e.h(vx - 1, vy);
            let right = e.h(vx, vy);
            if !cs.crosses.contains(&[up, right, down, left]) {
                out.push((vx, vy));
            }
        }
    }
    out
}

/// Deterministic, injective byte encoding of a grid.
///
/// Header: width and height as little-endian u32. Payload: the row-major cell
/// sequence read as the digits of one base-T number (first cell most
/// significant), serialized big-endian into exactly as many bytes as the
/// largest possible value needs. For T tiles and C cells that is
/// ceil(C*log2(T)/8) bytes.
pub fn canonical_encode(g: &TilingGrid, tile_count: usize) -> Vec<u8> {
    assert!(tile_count >= 1, "palette must have at least one tile");
    let mut out = Vec::new();
    out.extend_from_slice(&(g.width as u32).to_le_bytes());
    out.extend_from_slice(&(g.height as u32).to_le_bytes());
    let t = tile_count as u32;
    if t == 1 {
        return out;
    }
    // Little-endian big integer accumulator: value = value * t + digit.
    let mut acc: Vec<u8> = vec![0];
    let mut max: Vec<u8> = vec![0];
    for &cell in g.cells() {
        mul_small_add(&mut acc, t, cell);
        mul_small_add(&mut max, t, t - 1);
    }
    while acc.len() < max.len() {
        acc.push(0);
    }
    // Big-endian payload of fixed width.
    out.extend(acc.iter().rev());
    out
}

fn mul_small_add(v: &mut Vec<u8>, mul: u32, add: u32) {
    let mut carry: u64 = add as u64;
    for b in v.iter_mut() {
        let x = (*b as u64) * (mul as u64) + carry;
        *b = (x & 0xff) as u8;
        carry = x >> 8;
    }
    while carry > 0 {
        v.push((carry & 0xff) as u8);
        carry >>= 8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_tile_grid_validates() {
        let p = fixtures::single_palette();
        let g = TilingGrid::filled(4, 4, 0);
        assert_eq!(validate_tiling(&p, &g).unwrap(), Vec::new());
    }

    #[test]
    fn forced_mismatch_is_reported_at_the_left_cell() {
        let mut p = Palette::new("two", &["a", "b"]).unwrap();
        p.add_tile_by_name("t0", "a", "a", "a", "a", None, false).unwrap();
        p.add_tile_by_name("t1", "b", "b", "b", "b", None, false).unwrap();
        let g = TilingGrid::new(2, 1, vec![0, 1]).unwrap();
        let v = validate_tiling(&p, &g).unwrap();
        assert_eq!(v, vec![Violation { x: 0, y: 0, side: Side::East }]);
    }

    #[test]
    fn out_of_range_index_is_an_error() {
        let p = fixtures::single_palette();
        let g = TilingGrid::new(1, 1, vec![3]).unwrap();
        assert!(matches!(validate_tiling(&p, &g), Err(GridError::IndexOutOfRange { .. })));
    }

    #[test]
    fn naive_checker_agrees_on_random_grids() {
        // Independent double-loop oracle against the production validator.
        let p = fixtures::stripes6_palette();
        let t = p.tile_count() as u32;
        let mut seed = 0x9e3779b97f4a7c15u64;
        for _ in 0..1000 {
            let mut cells = Vec::with_capacity(20);
            for _ in 0..20 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                cells.push((seed >> 33) as u32 % t);
            }
            let g = TilingGrid::new(5, 4, cells).unwrap();
            let mut naive = Vec::new();
            for y in 0..4usize {
                for x in 0..5usize {
                    if x + 1 < 5 {
                        let a = p.tile(g.get(x, y) as usize);
                        let b = p.tile(g.get(x + 1, y) as usize);
                        if a.east != b.west {
                            naive.push(Violation { x, y, side: Side::East });
                        }
                    }
                    if y + 1 < 4 {
                        let a = p.tile(g.get(x, y) as usize);
                        let b = p.tile(g.get(x, y + 1) as usize);
                        if a.south != b.north {
                            naive.push(Violation { x, y, side: Side::South });
                        }
                    }
                }
            }
            assert_eq!(validate_tiling(&p, &g).unwrap(), naive);
        }
    }

    #[test]
    fn single_tile_palette_has_single_cross() {
        let p = fixtures::single_palette();
        let cs = to_cross_palette(&p);
        let w = p.color_id("w").unwrap();
        assert_eq!(cs.crosses.len(), 1);
        assert!(cs.crosses.contains(&[w, w, w, w]));
    }

    #[test]
    fn cross_count_matches_corner_enumeration() {
        // Distinct center-vertex projections of all valid 2x2 corners,
        // enumerated the slow way.
        let p = fixtures::stripes6_palette();
        let cs = to_cross_palette(&p);
        let mut seen = BTreeSet::new();
        let n = p.tile_count() as u32;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let g = TilingGrid::new(2, 2, vec![a, b, c, d]).unwrap();
                        if is_valid(&p, &g) {
                            let nw = p.tile(a as usize);
                            let ne = p.tile(b as usize);
                            let sw = p.tile(c as usize);
                            seen.insert([nw.east, ne.south, sw.east, nw.south]);
                        }
                    }
                }
            }
        }
        assert_eq!(cs.crosses, seen);
    }

    #[test]
    fn edges_roundtrip_reproduces_tiling() {
        let p = fixtures::stripes6_palette();
        // Alternate rows of all-w and all-b z-stripe tiles (t0 over t1 etc).
        let g = crate::solver::solve(&crate::solver::SolveSpec::free(&p, 8, 8), crate::solver::TileOrder::LeastIndex)
            .expect("stripes6 tiles an 8x8 window");
        let e = grid_to_edges(&p, &g).unwrap();
        let back = edges_to_grid(&p, &e).unwrap();
        assert_eq!(back, g);
        // And the cross set accepts every interior vertex of a valid tiling.
        let cs = to_cross_palette(&p);
        assert_eq!(cross_violations(&cs, &e), Vec::new());
    }

    #[test]
    fn canonical_encode_is_deterministic_and_injective() {
        let g1 = TilingGrid::new(3, 2, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let g2 = TilingGrid::new(3, 2, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let mut g3 = g1.clone();
        g3.set(1, 1, 0);
        assert_eq!(canonical_encode(&g1, 6), canonical_encode(&g2, 6));
        assert_ne!(canonical_encode(&g1, 6), canonical_encode(&g3, 6));
    }

    #[test]
    fn canonical_encode_length_matches_density() {
        // 16x16 over 6 tiles: 8 header bytes + ceil(256*log2(6)/8) payload.
        let g = TilingGrid::filled(16, 16, 5);
        let bytes = canonical_encode(&g, 6);
        // ceil(256 * log2(6) / 8) = ceil(82.72...) = 83
        assert_eq!(bytes.len(), 8 + 83);
        // Single-tile palettes need no payload at all.
        assert_eq!(canonical_encode(&g, 1).len(), 8);
    }

    #[test]
    fn subgrids_of_valid_grids_validate() {
        let p = fixtures::checker_palette();
        let g = crate::solver::solve(&crate::solver::SolveSpec::free(&p, 6, 6), crate::solver::TileOrder::LeastIndex).unwrap();
        assert!(is_valid(&p, &g));
        for m in 1..=6 {
            for y in 0..=(6 - m) {
                for x in 0..=(6 - m) {
                    assert!(is_valid(&p, &g.subgrid(x, y, m)));
                }
            }
        }
    }
}
