//! Reference palettes and machines.
//!
//! These are the objects the documentation, the sample files under
//! `docs/samples/` and the test suites all agree on. Building them here keeps
//! the text files and the programmatic fixtures in sync.

use alloc::vec;
use alloc::vec::Vec;

use crate::palette::Palette;
use crate::stripes::StripePalette;
use crate::tm::{Dir, TmSpec};

/// One tile, all sides "w". Tiles everything.
pub fn single_palette() -> Palette {
    let mut p = Palette::new("single", &["w"]).unwrap();
    p.add_tile_by_name("t0", "w", "w", "w", "w", None, false).unwrap();
    p
}

/// Two tiles that force a checkerboard; every tiling has period 2.
pub fn checker_palette() -> Palette {
    let mut p = Palette::new("checker", &["a", "b"]).unwrap();
    p.add_tile_by_name("p", "a", "a", "b", "b", None, false).unwrap();
    p.add_tile_by_name("q", "b", "b", "a", "a", None, false).unwrap();
    p
}

/// The six-tile sample used throughout the docs: two colors, uniform tiles,
/// stripe tiles and two phase-shift tiles. Admits many tilings.
pub fn stripes6_palette() -> Palette {
    let mut p = Palette::new("stripes6", &["w", "b"]).unwrap();
    p.add_tile_by_name("t0", "w", "w", "w", "w", None, false).unwrap();
    p.add_tile_by_name("t1", "b", "b", "b", "b", None, false).unwrap();
    p.add_tile_by_name("t2", "w", "b", "w", "b", None, false).unwrap();
    p.add_tile_by_name("t3", "b", "w", "b", "w", None, false).unwrap();
    p.add_tile_by_name("t4", "w", "w", "b", "b", None, false).unwrap();
    p.add_tile_by_name("t5", "b", "b", "w", "w", None, false).unwrap();
    p
}

/// East colors and west colors are disjoint: no row of width 2 exists.
pub fn mismatch_palette() -> Palette {
    let mut p = Palette::new("mismatch", &["e", "w", "v"]).unwrap();
    p.add_tile_by_name("t0", "v", "e", "v", "w", None, false).unwrap();
    p
}

/// Three-state unary incrementer. Started on the leftmost mark of a block of
/// "1"s it walks right, appends one more "1" past the block, and halts one
/// cell further right; the head never visits negative cells.
pub fn inc3_tm() -> TmSpec {
    let mut tm = TmSpec::new("inc3", &["q0", "qa", "qh"], &["_", "1"], "_", "q0", &["qh"]).unwrap();
    tm.set_delta("q0", "1", "q0", "1", Dir::Right).unwrap();
    tm.set_delta("q0", "_", "qa", "1", Dir::Right).unwrap();
    tm.set_delta("qa", "1", "qa", "1", Dir::Right).unwrap();
    tm.set_delta("qa", "_", "qh", "_", Dir::Right).unwrap();
    tm.validate().unwrap();
    tm
}

/// Double-tape bit copier: walks right forever, writing each column's input
/// bit onto its work track. Symbols pair a work symbol with an input bit;
/// symbol index 2i+b is work symbol i with bit b.
pub fn bitcopy_tm() -> TmSpec {
    let mut tm = TmSpec::new(
        "bitcopy",
        &["q0", "qh"],
        &["_|0", "_|1", "0|0", "0|1", "1|0", "1|1"],
        "_|0",
        "q0",
        &["qh"],
    )
    .unwrap();
    tm.set_delta("q0", "_|0", "q0", "0|0", Dir::Right).unwrap();
    tm.set_delta("q0", "_|1", "q0", "1|1", Dir::Right).unwrap();
    // Work cells already written: keep moving.
    tm.set_delta("q0", "0|0", "q0", "0|0", Dir::Right).unwrap();
    tm.set_delta("q0", "0|1", "q0", "0|1", Dir::Right).unwrap();
    tm.set_delta("q0", "1|0", "q0", "1|0", Dir::Right).unwrap();
    tm.set_delta("q0", "1|1", "q0", "1|1", Dir::Right).unwrap();
    tm.validate().unwrap();
    tm
}

/// Stripe palette whose language is the set of alternating bit strings.
///
/// Every column repeats one tile vertically; horizontal colors force the bit
/// to flip between neighbors.
pub fn alt_stripe_palette() -> StripePalette {
    let mut p = Palette::new("altstripe", &["L", "R", "c0", "c1", "n0", "n1"]).unwrap();
    // W encodes what stands to the left (border or a bit), E what this column
    // shows to the right.
    for (w_name, w) in [("L", "L"), ("c0", "c0"), ("c1", "c1")] {
        for b in 0..2u8 {
            // A bit-b tile may follow the border or the opposite bit.
            if w_name != "L" && w == if b == 0 { "c0" } else { "c1" } {
                continue;
            }
            let n = if b == 0 { "n0" } else { "n1" };
            let e = if b == 0 { "c0" } else { "c1" };
            let id = alloc::format!("a{}{}", b, w_name);
            p.add_tile_by_name(&id, n, e, n, w, Some(b), false).unwrap();
            // Right-border variant.
            let id = alloc::format!("r{}{}", b, w_name);
            p.add_tile_by_name(&id, n, "R", n, w, Some(b), false).unwrap();
        }
    }
    let left = p.color_id("L").unwrap();
    let right = p.color_id("R").unwrap();
    StripePalette { palette: p, left, right }
}

/// Stripe palette whose language is the set of strings without "11".
pub fn no11_stripe_palette() -> StripePalette {
    let mut p = Palette::new("no11", &["L", "R", "c0", "c1", "n0", "n1"]).unwrap();
    for (w_name, prev_one) in [("L", false), ("c0", false), ("c1", true)] {
        for b in 0..2u8 {
            if prev_one && b == 1 {
                continue;
            }
            let n = if b == 0 { "n0" } else { "n1" };
            let e = if b == 0 { "c0" } else { "c1" };
            let id = alloc::format!("a{}{}", b, w_name);
            p.add_tile_by_name(&id, n, e, n, w_name, Some(b), false).unwrap();
            let id = alloc::format!("r{}{}", b, w_name);
            p.add_tile_by_name(&id, n, "R", n, w_name, Some(b), false).unwrap();
        }
    }
    let left = p.color_id("L").unwrap();
    let right = p.color_id("R").unwrap();
    StripePalette { palette: p, left, right }
}

/// Vertically striped period-2 grid over stripes6 (columns of t2 and t1).
pub fn striped_grid(width: usize, height: usize) -> crate::palette::TilingGrid {
    let mut cells = Vec::with_capacity(width * height);
    for _y in 0..height {
        for x in 0..width {
            cells.push(if x % 2 == 0 { 2 } else { 1 });
        }
    }
    crate::palette::TilingGrid::new(width, height, cells).unwrap()
}

/// All palettes exercised by the linear-complexity acceptance check.
pub fn good_square_fixture_palettes() -> Vec<Palette> {
    vec![single_palette(), checker_palette(), stripes6_palette()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::palette::is_valid;
    use crate::solver;

    #[test]
    fn fixture_palettes_tile_small_windows() {
        for p in good_square_fixture_palettes() {
            let g = solver::solve(&solver::SolveSpec::free(&p, 8, 8), solver::TileOrder::LeastIndex)
                .expect("fixture palette tiles 8x8");
            assert!(is_valid(&p, &g), "{}", p.name());
        }
    }

    #[test]
    fn striped_grid_is_valid_with_period_two() {
        let p = stripes6_palette();
        let g = striped_grid(6, 4);
        assert!(is_valid(&p, &g));
    }

    #[test]
    fn stripe_palettes_pass_bit_consistency() {
        alt_stripe_palette().validate().unwrap();
        no11_stripe_palette().validate().unwrap();
    }
}
