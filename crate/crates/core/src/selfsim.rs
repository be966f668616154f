//! The aligned self-similar square pattern, driven by 2-adic line
//! coordinates.
//!
//! Rank-k dark squares have side 2^k and repeat with period 2^(k+1) along
//! both axes; the groups are phased by a two-bit choice per rank. Giving the
//! vertical line at absolute position x the integer coordinate x - offset
//! (and likewise for horizontal lines) makes every structural question a
//! question about low-order bits:
//!
//! * a line's rank is one plus its number of trailing zero bits;
//! * vertical sides of rank-k squares sit on coordinates ending `10^(k-1)`;
//! * a line cuts through rank-k squares iff its last k+1 bits read as a
//!   number strictly between `010^(k-1)` and `110^(k-1)`;
//! * centers of rank-k squares lie on coordinates ending in k zeros.
//!
//! The all-zero coordinate is the separating line: it touches no square, has
//! infinite rank, and when it crosses a window the pattern falls apart into
//! independently structured parts.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelfsimError {
    WindowTooLarge { dim: usize, cap: usize },
    EdgeNotDark,
    RankOutOfRange { k: u8, max: u8 },
}

impl fmt::Display for SelfsimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelfsimError::WindowTooLarge { dim, cap } => {
                write!(f, "window dimension {} exceeds the resolvable cap {}", dim, cap)
            }
            SelfsimError::EdgeNotDark => write!(f, "edge does not lie on a dark square border"),
            SelfsimError::RankOutOfRange { k, max } => write!(f, "rank {} beyond configured {}", k, max),
        }
    }
}

impl core::error::Error for SelfsimError {}

/// Finite window onto an infinite-to-the-left 2-adic line coordinate: the
/// low `bits` bits plus a flag for the genuinely all-zero coordinate.
///
/// Every predicate here depends only on the represented bits, so queries
/// about ranks up to `bits - 2` are exact.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DyadicCoord {
    pub low: u64,
    pub bits: u8,
    pub zero: bool,
}

impl DyadicCoord {
    pub fn from_raw(low: u64, bits: u8, zero: bool) -> Self {
        debug_assert!(bits <= 63);
        let masked = low & ((1u64 << bits) - 1);
        debug_assert!(!zero || masked == 0);
        DyadicCoord { low: masked, bits, zero }
    }

    /// Coordinate of the line at absolute position `pos` when the zero line
    /// sits at `offset`.
    pub fn from_position(pos: i64, offset: i64, bits: u8) -> Self {
        let modulus = 1i128 << bits;
        let low = ((pos as i128 - offset as i128).rem_euclid(modulus)) as u64;
        DyadicCoord { low, bits, zero: pos == offset }
    }

    fn trailing_zeros(&self) -> Option<u8> {
        if self.low == 0 {
            None
        } else {
            Some(self.low.trailing_zeros() as u8)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rank {
    Finite(u8),
    /// The represented bits are all zero but the coordinate is not: the rank
    /// is at least this value and the window cannot pin it down.
    AtLeast(u8),
    Infinite,
}

/// One plus the number of trailing zeros; infinite on the separating line.
pub fn line_rank(c: &DyadicCoord) -> Rank {
    if c.zero {
        return Rank::Infinite;
    }
    match c.trailing_zeros() {
        Some(tz) => Rank::Finite(tz + 1),
        None => Rank::AtLeast(c.bits + 1),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LineColor {
    Red,
    Blue,
    Unconstrained,
}

/// Odd ranks are red, even ranks blue; the separating line is free. Lines
/// whose rank exceeds the represented precision are reported unconstrained
/// as well.
pub fn line_color(c: &DyadicCoord) -> LineColor {
    match line_rank(c) {
        Rank::Finite(k) => {
            if k % 2 == 1 {
                LineColor::Red
            } else {
                LineColor::Blue
            }
        }
        _ => LineColor::Unconstrained,
    }
}

/// Does this line pass through the interior of rank-k squares?
pub fn intersects_rank_k(c: &DyadicCoord, k: u8) -> bool {
    debug_assert!(k >= 1 && k + 1 <= c.bits);
    if c.zero {
        return false;
    }
    let m = c.low & ((1u64 << (k + 1)) - 1);
    let lo = 1u64 << (k - 1);
    m > lo && m < 3 * lo
}

/// Two grouping bits per rank, horizontal and vertical. Bit k-1 of each word
/// is the choice at rank k; the phase offset they induce is the sum of the
/// chosen 2^k terms.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ChoiceSequence {
    pub max_rank: u8,
    pub horizontal: u32,
    pub vertical: u32,
}

impl ChoiceSequence {
    pub fn new(max_rank: u8, horizontal: u32, vertical: u32) -> Self {
        debug_assert!(max_rank >= 1 && max_rank <= 24);
        let mask = (1u32 << max_rank) - 1;
        ChoiceSequence { max_rank, horizontal: horizontal & mask, vertical: vertical & mask }
    }

    pub fn offset_x(&self) -> i64 {
        (self.horizontal as i64) << 1
    }

    pub fn offset_y(&self) -> i64 {
        (self.vertical as i64) << 1
    }

    pub fn coord_bits(&self) -> u8 {
        self.max_rank + 2
    }

    pub fn coord_x(&self, line: i64) -> DyadicCoord {
        DyadicCoord::from_position(line, self.offset_x(), self.coord_bits())
    }

    pub fn coord_y(&self, line: i64) -> DyadicCoord {
        DyadicCoord::from_position(line, self.offset_y(), self.coord_bits())
    }
}

/// Horizontal direction toward the center of the owning square.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum HDir {
    Left,
    Right,
}

/// Vertical direction toward the center; rows grow downward.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum VDir {
    Up,
    Down,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum EdgeState {
    Light,
    Dark { rank: u8, h: HDir, v: VDir },
    /// Edge on a separating line painted dark (infinite rank, no owner).
    Separator,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CornerOrientation {
    Ne,
    Nw,
    Se,
    Sw,
}

/// How to paint the degenerate configurations, which genuinely branch: a
/// single separating line is uniformly light or dark, two form a dark corner.
#[derive(Clone, Copy, Debug)]
pub struct DegenerateStyle {
    pub single_dark: bool,
    pub corner: CornerOrientation,
}

impl Default for DegenerateStyle {
    fn default() -> Self {
        DegenerateStyle { single_dark: true, corner: CornerOrientation::Ne }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SeparatorKind {
    None,
    SingleVertical { line: i64, dark: bool },
    SingleHorizontal { line: i64, dark: bool },
    Corner { x: i64, y: i64, orientation: CornerOrientation },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PatternWindow {
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
    pub max_rank: u8,
    /// Vertical unit edges: (width+1) lines by height rows, row-major.
    pub v_edges: Vec<EdgeState>,
    /// Horizontal unit edges: width columns by (height+1) lines, row-major.
    pub h_edges: Vec<EdgeState>,
    pub separators: SeparatorKind,
}

impl PatternWindow {
    pub fn v_edge(&self, line: usize, row: usize) -> EdgeState {
        self.v_edges[row * (self.width + 1) + line]
    }

    pub fn h_edge(&self, col: usize, line: usize) -> EdgeState {
        self.h_edges[line * self.width + col]
    }

    fn v_edge_mut(&mut self, line: usize, row: usize) -> &mut EdgeState {
        &mut self.v_edges[row * (self.width + 1) + line]
    }

    fn h_edge_mut(&mut self, col: usize, line: usize) -> &mut EdgeState {
        &mut self.h_edges[line * self.width + col]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeRef {
    /// Vertical edge on line x0+line, spanning cell row y0+row.
    Vertical { line: usize, row: usize },
    /// Horizontal edge on line y0+line, spanning cell column x0+col.
    Horizontal { col: usize, line: usize },
}

/// Hard per-dimension cap on generated windows; coordinates are exact, so
/// this only bounds the edge-array allocation.
const WINDOW_CAP: usize = 1 << 10;

fn window_cap(_max_rank: u8) -> usize {
    WINDOW_CAP
}

fn blank_window(ch: &ChoiceSequence, x0: i64, y0: i64, w: usize, h: usize) -> PatternWindow {
    PatternWindow {
        x0,
        y0,
        width: w,
        height: h,
        max_rank: ch.max_rank,
        v_edges: vec![EdgeState::Light; (w + 1) * h],
        h_edges: vec![EdgeState::Light; w * (h + 1)],
        separators: SeparatorKind::None,
    }
}

fn separator_kind(ch: &ChoiceSequence, x0: i64, y0: i64, w: usize, h: usize, style: &DegenerateStyle) -> SeparatorKind {
    let zx = ch.offset_x();
    let zy = ch.offset_y();
    let vx = x0 <= zx && zx <= x0 + w as i64;
    let hy = y0 <= zy && zy <= y0 + h as i64;
    match (vx, hy) {
        (false, false) => SeparatorKind::None,
        (true, false) => SeparatorKind::SingleVertical { line: zx, dark: style.single_dark },
        (false, true) => SeparatorKind::SingleHorizontal { line: zy, dark: style.single_dark },
        (true, true) => SeparatorKind::Corner { x: zx, y: zy, orientation: style.corner },
    }
}

fn paint_separators(win: &mut PatternWindow) {
    let (x0, y0, w, h) = (win.x0, win.y0, win.width, win.height);
    match win.separators {
        SeparatorKind::None => {}
        SeparatorKind::SingleVertical { line, dark } => {
            if dark {
                let li = (line - x0) as usize;
                for row in 0..h {
                    *win.v_edge_mut(li, row) = EdgeState::Separator;
                }
            }
        }
        SeparatorKind::SingleHorizontal { line, dark } => {
            if dark {
                let li = (line - y0) as usize;
                for col in 0..w {
                    *win.h_edge_mut(col, li) = EdgeState::Separator;
                }
            }
        }
        SeparatorKind::Corner { x, y, orientation } => {
            let (up, right) = match orientation {
                CornerOrientation::Ne => (true, true),
                CornerOrientation::Nw => (true, false),
                CornerOrientation::Se => (false, true),
                CornerOrientation::Sw => (false, false),
            };
            let li = x - x0;
            if (0..=w as i64).contains(&li) {
                for row in 0..h {
                    let abs = y0 + row as i64;
                    let on_ray = if up { abs < y } else { abs >= y };
                    if on_ray {
                        *win.v_edge_mut(li as usize, row) = EdgeState::Separator;
                    }
                }
            }
            let li = y - y0;
            if (0..=h as i64).contains(&li) {
                for col in 0..w {
                    let abs = x0 + col as i64;
                    let on_ray = if right { abs >= x } else { abs < x };
                    if on_ray {
                        *win.h_edge_mut(col, li as usize) = EdgeState::Separator;
                    }
                }
            }
        }
    }
}

/// Builds the window straight from the coordinate predicates.
pub fn generate_pattern(
    ch: &ChoiceSequence,
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    style: &DegenerateStyle,
) -> Result<PatternWindow, SelfsimError> {
    let cap = window_cap(ch.max_rank);
    if width > cap || height > cap {
        return Err(SelfsimError::WindowTooLarge { dim: width.max(height), cap });
    }
    let mut win = blank_window(ch, x0, y0, width, height);
    win.separators = separator_kind(ch, x0, y0, width, height, style);

    // Vertical edges: the line's rank decides the owning square family, the
    // row decides whether the edge lies within a square's vertical extent.
    for li in 0..=width {
        let x = x0 + li as i64;
        let cx = ch.coord_x(x);
        let k = match line_rank(&cx) {
            Rank::Finite(k) if k <= ch.max_rank => k,
            _ => continue,
        };
        let period = 1i64 << (k + 1);
        let half = 1i64 << (k - 1);
        let is_left_side = (cx.low >> k) & 1 == 0;
        for row in 0..height {
            let y = y0 + row as i64;
            let rel = (y - ch.offset_y()).rem_euclid(period);
            if rel >= half && rel < 3 * half {
                let h = if is_left_side { HDir::Right } else { HDir::Left };
                let v = if rel - half < half { VDir::Down } else { VDir::Up };
                *win.v_edge_mut(li, row) = EdgeState::Dark { rank: k, h, v };
            }
        }
    }
    // Horizontal edges, symmetric.
    for li in 0..=height {
        let y = y0 + li as i64;
        let cy = ch.coord_y(y);
        let k = match line_rank(&cy) {
            Rank::Finite(k) if k <= ch.max_rank => k,
            _ => continue,
        };
        let period = 1i64 << (k + 1);
        let half = 1i64 << (k - 1);
        let is_top_side = (cy.low >> k) & 1 == 0;
        for col in 0..width {
            let x = x0 + col as i64;
            let rel = (x - ch.offset_x()).rem_euclid(period);
            if rel >= half && rel < 3 * half {
                let v = if is_top_side { VDir::Down } else { VDir::Up };
                let h = if rel - half < half { HDir::Right } else { HDir::Left };
                *win.h_edge_mut(col, li) = EdgeState::Dark { rank: k, h, v };
            }
        }
    }
    paint_separators(&mut win);
    Ok(win)
}

/// Independent construction: enumerate the squares of each rank explicitly
/// and paint their borders edge by edge.
pub fn geometric_pattern(
    ch: &ChoiceSequence,
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    style: &DegenerateStyle,
) -> Result<PatternWindow, SelfsimError> {
    let cap = window_cap(ch.max_rank);
    if width > cap || height > cap {
        return Err(SelfsimError::WindowTooLarge { dim: width.max(height), cap });
    }
    let mut win = blank_window(ch, x0, y0, width, height);
    win.separators = separator_kind(ch, x0, y0, width, height, style);

    for k in 1..=ch.max_rank {
        let side = 1i64 << k;
        let period = 1i64 << (k + 1);
        let half = 1i64 << (k - 1);
        // Left sides at offset + half (mod period); enumerate all squares
        // overlapping the window.
        let first_sx = first_at_or_below(ch.offset_x() + half, period, x0 - side);
        let first_sy = first_at_or_below(ch.offset_y() + half, period, y0 - side);
        let mut sy = first_sy;
        while sy <= y0 + height as i64 {
            let mut sx = first_sx;
            while sx <= x0 + width as i64 {
                paint_square(&mut win, sx, sy, k);
                sx += period;
            }
            sy += period;
        }
    }
    paint_separators(&mut win);
    Ok(win)
}

/// Largest value congruent to `residue_base` (mod `period`) that is >= `min`.
/// Returns the smallest such value at or above `min`.
fn first_at_or_below(residue_base: i64, period: i64, min: i64) -> i64 {
    let r = (min - residue_base).rem_euclid(period);
    if r == 0 {
        min
    } else {
        min + (period - r)
    }
}

fn paint_square(win: &mut PatternWindow, sx: i64, sy: i64, k: u8) {
    let side = 1i64 << k;
    let half = 1i64 << (k - 1);
    let (x0, y0) = (win.x0, win.y0);
    let (w, h) = (win.width as i64, win.height as i64);
    // Vertical sides.
    for (line, hdir) in [(sx, HDir::Right), (sx + side, HDir::Left)] {
        if line < x0 || line > x0 + w {
            continue;
        }
        for row in sy.max(y0)..(sy + side).min(y0 + h) {
            let v = if row - sy < half { VDir::Down } else { VDir::Up };
            *win.v_edge_mut((line - x0) as usize, (row - y0) as usize) =
                EdgeState::Dark { rank: k, h: hdir, v };
        }
    }
    // Horizontal sides.
    for (line, vdir) in [(sy, VDir::Down), (sy + side, VDir::Up)] {
        if line < y0 || line > y0 + h {
            continue;
        }
        for col in sx.max(x0)..(sx + side).min(x0 + w) {
            let hd = if col - sx < half { HDir::Right } else { HDir::Left };
            *win.h_edge_mut((col - x0) as usize, (line - y0) as usize) =
                EdgeState::Dark { rank: k, h: hd, v: vdir };
        }
    }
}

/// Orientation bits of a dark edge: horizontal and vertical direction toward
/// the center of the square whose border the edge lies on.
pub fn orientation_bits(win: &PatternWindow, edge: EdgeRef) -> Result<(HDir, VDir), SelfsimError> {
    let state = match edge {
        EdgeRef::Vertical { line, row } => win.v_edge(line, row),
        EdgeRef::Horizontal { col, line } => win.h_edge(col, line),
    };
    match state {
        EdgeState::Dark { h, v, .. } => Ok((h, v)),
        _ => Err(SelfsimError::EdgeNotDark),
    }
}

/// Reports the separating lines visible in the window.
pub fn detect_separating_lines(win: &PatternWindow) -> SeparatorKind {
    win.separators
}

/// Abstracted edge as seen from a vertex: dark edges keep their orientation
/// bits and the rank relative to the lowest dark rank at the vertex, capped.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum EdgeSig {
    Light,
    Sep,
    Dark { rel: u8, h: HDir, v: VDir },
}

pub type CrossSig = [EdgeSig; 4];

/// The catalog of vertex configurations the pattern family can produce.
#[derive(Clone, Debug)]
pub struct CrossCatalog {
    pub crosses: BTreeSet<CrossSig>,
}

const REL_CAP: u8 = 3;

fn vertex_sig(win: &PatternWindow, vx: usize, vy: usize) -> CrossSig {
    // Edge order: up, right, down, left around vertex (vx, vy); vertex
    // coordinates run over interior line intersections.
    let up = win.v_edge(vx, vy - 1);
    let down = win.v_edge(vx, vy);
    let left = win.h_edge(vx - 1, vy);
    let right = win.h_edge(vx, vy);
    let min_rank = [up, right, down, left]
        .iter()
        .filter_map(|e| match e {
            EdgeState::Dark { rank, .. } => Some(*rank),
            _ => None,
        })
        .min();
    let sig = |e: EdgeState| match e {
        EdgeState::Light => EdgeSig::Light,
        EdgeState::Separator => EdgeSig::Sep,
        EdgeState::Dark { rank, h, v } => {
            EdgeSig::Dark { rel: (rank - min_rank.unwrap()).min(REL_CAP), h, v }
        }
    };
    [sig(up), sig(right), sig(down), sig(left)]
}

impl CrossCatalog {
    /// Stable text form, one cross per line, for freezing as a fixture.
    pub fn to_text(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::new();
        for sig in &self.crosses {
            for (i, e) in sig.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match e {
                    EdgeSig::Light => out.push('.'),
                    EdgeSig::Sep => out.push('#'),
                    EdgeSig::Dark { rel, h, v } => {
                        let _ = write!(
                            out,
                            "D{}{}{}",
                            rel,
                            if *h == HDir::Left { 'L' } else { 'R' },
                            if *v == VDir::Up { 'U' } else { 'D' },
                        );
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Builds the catalog from exhaustive sweeps of generated windows: one
    /// full period of the regular pattern plus every degenerate styling.
    /// Deterministic.
    pub fn standard() -> Self {
        let mut crosses = BTreeSet::new();
        let mut absorb = |win: &PatternWindow| {
            for vy in 1..win.height {
                for vx in 1..win.width {
                    crosses.insert(vertex_sig(win, vx, vy));
                }
            }
        };
        let r = 6u8;
        let ch = ChoiceSequence::new(r, 0, 0);
        // Regular pattern: one full period in each axis, away from zero.
        let period = 1i64 << (r + 1);
        let win = generate_pattern(&ch, period, period, 2 * period as usize, 2 * period as usize, &DegenerateStyle::default()).unwrap();
        absorb(&win);
        // Single separators, both colors, both axes.
        for dark in [false, true] {
            let style = DegenerateStyle { single_dark: dark, corner: CornerOrientation::Ne };
            let w = generate_pattern(&ch, -32, 16, 64, 64, &style).unwrap();
            absorb(&w);
            let w = generate_pattern(&ch, 16, -32, 64, 64, &style).unwrap();
            absorb(&w);
        }
        // Corners, all four orientations.
        for corner in [CornerOrientation::Ne, CornerOrientation::Nw, CornerOrientation::Se, CornerOrientation::Sw] {
            let style = DegenerateStyle { single_dark: true, corner };
            let w = generate_pattern(&ch, -32, -32, 64, 64, &style).unwrap();
            absorb(&w);
        }
        CrossCatalog { crosses }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PatternViolation {
    /// Interior vertex whose 4-edge combination is not in the catalog.
    BadCross { vx: usize, vy: usize },
    /// A fully interior 4x4 cell block with no rank-1 dark edge: the rank-1
    /// square grid is missing locally.
    MissingRank1 { x: usize, y: usize },
}

/// Checks every interior vertex against the allowed-cross catalog and the
/// rank-1 density rule. Empty on every generated window; any single edge
/// flip is caught.
pub fn verify_pattern_local(win: &PatternWindow, catalog: &CrossCatalog) -> Vec<PatternViolation> {
    let mut out = Vec::new();
    for vy in 1..win.height {
        for vx in 1..win.width {
            if !catalog.crosses.contains(&vertex_sig(win, vx, vy)) {
                out.push(PatternViolation::BadCross { vx, vy });
            }
        }
    }
    if win.width >= 4 && win.height >= 4 {
        for y in 0..=(win.height - 4) {
            for x in 0..=(win.width - 4) {
                let mut any = false;
                'block: for row in y..y + 4 {
                    for line in x..=x + 4 {
                        if matches!(win.v_edge(line, row), EdgeState::Dark { rank: 1, .. }) {
                            any = true;
                            break 'block;
                        }
                    }
                }
                if !any {
                    for line in y..=y + 4 {
                        for col in x..x + 4 {
                            if matches!(win.h_edge(col, line), EdgeState::Dark { rank: 1, .. }) {
                                any = true;
                            }
                        }
                    }
                }
                if !any {
                    out.push(PatternViolation::MissingRank1 { x, y });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(low: u64) -> DyadicCoord {
        DyadicCoord::from_raw(low, 16, false)
    }

    #[test]
    fn rank_from_trailing_zeros() {
        assert_eq!(line_rank(&c(0b01)), Rank::Finite(1));
        assert_eq!(line_rank(&c(0b0100)), Rank::Finite(3));
        assert_eq!(line_rank(&DyadicCoord::from_raw(0, 16, true)), Rank::Infinite);
        assert_eq!(line_rank(&DyadicCoord::from_raw(0, 16, false)), Rank::AtLeast(17));
    }

    #[test]
    fn colors_alternate_with_rank() {
        assert_eq!(line_color(&c(0b1)), LineColor::Red);
        assert_eq!(line_color(&c(0b10)), LineColor::Blue);
        assert_eq!(line_color(&c(0b100)), LineColor::Red);
        assert_eq!(line_color(&DyadicCoord::from_raw(0, 16, true)), LineColor::Unconstrained);
    }

    #[test]
    fn interval_rule_examples() {
        // last 3 digits 100 -> 4 is inside (2, 6) for k = 2.
        assert!(intersects_rank_k(&c(0b100), 2));
        // boundary 010 -> 2 is not interior.
        assert!(!intersects_rank_k(&c(0b010), 2));
        assert!(!intersects_rank_k(&c(0b000 + 0b1000), 2));
    }

    #[test]
    fn rank1_squares_are_2x2_separated_by_two() {
        let ch = ChoiceSequence::new(3, 0, 0);
        let w = generate_pattern(&ch, 16, 16, 16, 16, &DegenerateStyle::default()).unwrap();
        // Dark rank-1 vertical edges exactly on lines with coord = 1, 3 mod 4
        // and rows with rel in [1, 3) mod 4.
        for li in 0..=16usize {
            let x = 16 + li as i64;
            for row in 0..16usize {
                let y = 16 + row as i64;
                let expect = {
                    let cm = x.rem_euclid(4);
                    let rm = y.rem_euclid(4);
                    (cm == 1 || cm == 3) && (1..3).contains(&rm)
                };
                let got = matches!(w.v_edge(li, row), EdgeState::Dark { rank: 1, .. });
                assert_eq!(got, expect, "line {} row {}", x, y);
            }
        }
    }

    #[test]
    fn generator_matches_geometric_constructor() {
        let styles = [
            DegenerateStyle::default(),
            DegenerateStyle { single_dark: false, corner: CornerOrientation::Sw },
        ];
        let mut seed = 12345u64;
        for trial in 0..50 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let r = 2 + (seed >> 50) as u8 % 5;
            let ch = ChoiceSequence::new(r, (seed >> 5) as u32, (seed >> 23) as u32);
            let x0 = ((seed >> 10) % 257) as i64 - 128;
            let y0 = ((seed >> 30) % 257) as i64 - 128;
            let style = styles[trial % 2];
            let a = generate_pattern(&ch, x0, y0, 48, 48, &style).unwrap();
            let b = geometric_pattern(&ch, x0, y0, 48, 48, &style).unwrap();
            assert_eq!(a, b, "trial {} r {} origin ({}, {})", trial, r, x0, y0);
        }
    }

    #[test]
    fn pattern_repeats_with_the_full_period() {
        let ch = ChoiceSequence::new(4, 0b1010, 0b0110);
        let p = 1i64 << 5;
        let a = generate_pattern(&ch, 64, 64, 32, 32, &DegenerateStyle::default()).unwrap();
        let b = generate_pattern(&ch, 64 + p, 64 + p, 32, 32, &DegenerateStyle::default()).unwrap();
        assert_eq!(a.v_edges, b.v_edges);
        assert_eq!(a.h_edges, b.h_edges);
    }

    #[test]
    fn separator_detection() {
        let ch = ChoiceSequence::new(3, 0b101, 0b011);
        let (zx, zy) = (ch.offset_x(), ch.offset_y());
        // Window straddling the x zero line only.
        let w = generate_pattern(&ch, zx - 4, zy + 5, 8, 8, &DegenerateStyle::default()).unwrap();
        assert_eq!(detect_separating_lines(&w), SeparatorKind::SingleVertical { line: zx, dark: true });
        // Window away from both.
        let w = generate_pattern(&ch, zx + 3, zy + 3, 8, 8, &DegenerateStyle::default()).unwrap();
        assert_eq!(detect_separating_lines(&w), SeparatorKind::None);
        // Both axes straddled: a dark corner.
        let style = DegenerateStyle { single_dark: true, corner: CornerOrientation::Se };
        let w = generate_pattern(&ch, zx - 4, zy - 4, 8, 8, &style).unwrap();
        assert_eq!(
            detect_separating_lines(&w),
            SeparatorKind::Corner { x: zx, y: zy, orientation: CornerOrientation::Se }
        );
    }

    #[test]
    fn orientation_bits_match_extent_recomputation() {
        let ch = ChoiceSequence::new(4, 0b0101, 0b0011);
        let win = generate_pattern(&ch, 40, 40, 32, 32, &DegenerateStyle::default()).unwrap();
        let mut checked = 0;
        // Recompute orientations for every dark vertical edge from the
        // square extents implied by the coordinates.
        for li in 0..=32usize {
            let x = 40 + li as i64;
            for row in 0..32usize {
                let y = 40 + row as i64;
                if let EdgeState::Dark { rank, .. } = win.v_edge(li, row) {
                    let k = rank;
                    let period = 1i64 << (k + 1);
                    let half = 1i64 << (k - 1);
                    let cm = (x - ch.offset_x()).rem_euclid(period);
                    let exp_h = if cm == half { HDir::Right } else { HDir::Left };
                    let rel = (y - ch.offset_y()).rem_euclid(period) - half;
                    let exp_v = if rel < half { VDir::Down } else { VDir::Up };
                    let (gh, gv) =
                        orientation_bits(&win, EdgeRef::Vertical { line: li, row }).unwrap();
                    assert_eq!((gh, gv), (exp_h, exp_v));
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
        // Light edges refuse to answer.
        let mut found_light = None;
        for li in 0..=32usize {
            for row in 0..32usize {
                if win.v_edge(li, row) == EdgeState::Light {
                    found_light = Some((li, row));
                }
            }
        }
        let (li, row) = found_light.unwrap();
        assert_eq!(
            orientation_bits(&win, EdgeRef::Vertical { line: li, row }),
            Err(SelfsimError::EdgeNotDark)
        );
    }

    #[test]
    fn verify_accepts_generated_windows() {
        let catalog = CrossCatalog::standard();
        let mut seed = 777u64;
        for _ in 0..20 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let ch = ChoiceSequence::new(5, (seed >> 7) as u32, (seed >> 29) as u32);
            let x0 = ((seed >> 11) % 129) as i64 - 64;
            let y0 = ((seed >> 41) % 129) as i64 - 64;
            let w = generate_pattern(&ch, x0, y0, 48, 48, &DegenerateStyle::default()).unwrap();
            assert_eq!(verify_pattern_local(&w, &catalog), Vec::new(), "origin ({}, {})", x0, y0);
        }
    }

    #[test]
    fn verify_catches_single_edge_mutations() {
        let catalog = CrossCatalog::standard();
        let ch = ChoiceSequence::new(4, 0b0110, 0b1001);
        let win = generate_pattern(&ch, 30, 30, 24, 24, &DegenerateStyle::default()).unwrap();
        assert!(verify_pattern_local(&win, &catalog).is_empty());
        let mut flipped = 0;
        for li in 5..12usize {
            for row in 5..12usize {
                let mut mutated = win.clone();
                let e = mutated.v_edge(li, row);
                *mutated.v_edge_mut(li, row) = match e {
                    EdgeState::Light => EdgeState::Dark { rank: 1, h: HDir::Left, v: VDir::Up },
                    _ => EdgeState::Light,
                };
                assert!(
                    !verify_pattern_local(&mutated, &catalog).is_empty(),
                    "flip at line {} row {} undetected",
                    li,
                    row
                );
                flipped += 1;
            }
        }
        assert_eq!(flipped, 49);
    }

    #[test]
    fn all_light_window_is_rejected() {
        let catalog = CrossCatalog::standard();
        let ch = ChoiceSequence::new(3, 0, 0);
        let mut win = blank_window(&ch, 16, 16, 16, 16);
        win.separators = SeparatorKind::None;
        let violations = verify_pattern_local(&win, &catalog);
        assert!(violations.iter().any(|v| matches!(v, PatternViolation::MissingRank1 { .. })));
    }

    #[test]
    fn square_sides_and_centers_have_the_advertised_coordinates() {
        let ch = ChoiceSequence::new(4, 0b0101, 0b0011);
        for k in 1..=4u8 {
            let period = 1i64 << (k + 1);
            let half = 1i64 << (k - 1);
            // Enumerate a few squares of rank k and check their side and
            // center line coordinates bit by bit.
            for j in -3..3i64 {
                let left = ch.offset_x() + half + j * period;
                let cl = ch.coord_x(left);
                let cr = ch.coord_x(left + (1 << k));
                // Sides end with exactly k-1 zeros (rank k).
                assert_eq!(line_rank(&cl), Rank::Finite(k));
                assert_eq!(line_rank(&cr), Rank::Finite(k));
                // Centers end with exactly k zeros (rank k+1 lines).
                let cc = ch.coord_x(left + half);
                assert_eq!(line_rank(&cc), Rank::Finite(k + 1));
            }
        }
    }
}
