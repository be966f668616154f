//! Deterministic SVG and PPM renderers for tilings and pattern windows.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use wangkit_core::palette::{Palette, TilingGrid};
use wangkit_core::selfsim::{EdgeState, PatternWindow, SeparatorKind};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Target {
    Svg,
    Ppm,
}

#[derive(Clone, Copy, Debug)]
pub struct Layers {
    pub tiles: bool,
    pub edges: bool,
    pub ranks: bool,
    pub channels: bool,
    pub zones: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers { tiles: true, edges: false, ranks: true, channels: false, zones: false }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RenderSpec {
    pub target: Target,
    pub cell_px: u32,
    pub layers: Layers,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { target: Target::Svg, cell_px: 12, layers: Layers::default() }
    }
}

/// Deterministic color for the i-th palette entry: golden-angle hue walk.
pub fn index_color(i: usize) -> (u8, u8, u8) {
    let h = (i as u32 * 137) % 360;
    hsv_rgb(h, 140, 210)
}

fn hsv_rgb(h: u32, s: u32, v: u32) -> (u8, u8, u8) {
    // Integer HSV with s, v in 0..=255.
    let region = h / 60;
    let rem = (h % 60) * 255 / 60;
    let p = v * (255 - s) / 255;
    let q = v * (255 * 255 - s * rem) / (255 * 255);
    let t = v * (255 * 255 - s * (255 - rem)) / (255 * 255);
    let (r, g, b) = match region {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    (r as u8, g as u8, b as u8)
}

fn hex(c: (u8, u8, u8)) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0, c.1, c.2)
}

fn rank_color(rank: u8) -> (u8, u8, u8) {
    match rank {
        1 => (60, 60, 60),
        2 => (178, 34, 34),
        3 => (30, 90, 170),
        4 => (34, 139, 34),
        5 => (153, 50, 204),
        6 => (205, 133, 0),
        _ => (0, 0, 0),
    }
}

/// One rectangle per cell, plus optional shared-edge ticks.
pub fn svg_grid(p: &Palette, g: &TilingGrid, spec: &RenderSpec) -> String {
    let c = spec.cell_px;
    let (w, h) = (g.width as u32 * c, g.height as u32 * c);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        w, h, w, h
    );
    if spec.layers.tiles {
        for y in 0..g.height {
            for x in 0..g.width {
                let t = g.get(x, y) as usize;
                let _ = writeln!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                    x as u32 * c,
                    y as u32 * c,
                    c,
                    c,
                    hex(index_color(t)),
                );
            }
        }
    }
    if spec.layers.edges {
        for y in 0..g.height {
            for x in 0..g.width {
                let t = p.tile(g.get(x, y) as usize);
                // East and south edges ticked with the edge color.
                let ex = (x as u32 + 1) * c;
                let ey = y as u32 * c;
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>",
                    ex,
                    ey,
                    ex,
                    ey + c,
                    hex(index_color(t.east.0 as usize)),
                );
                let sy = (y as u32 + 1) * c;
                let sx = x as u32 * c;
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>",
                    sx,
                    sy,
                    sx + c,
                    sy,
                    hex(index_color(t.south.0 as usize)),
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Dark-square pattern: light background, one line segment per dark edge.
pub fn svg_pattern(win: &PatternWindow, spec: &RenderSpec) -> String {
    let c = spec.cell_px;
    let (w, h) = (win.width as u32 * c, win.height as u32 * c);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        w, h, w, h
    );
    let _ = writeln!(out, "<rect width=\"{}\" height=\"{}\" fill=\"#fcfcf8\"/>", w, h);
    let stroke = |out: &mut String, x1: u32, y1: u32, x2: u32, y2: u32, color: String, width: u32| {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            x1, y1, x2, y2, color, width
        );
    };
    for line in 0..=win.width {
        for row in 0..win.height {
            match win.v_edge(line, row) {
                EdgeState::Light => {}
                EdgeState::Dark { rank, .. } => {
                    let col = if spec.layers.ranks { rank_color(rank) } else { (40, 40, 40) };
                    stroke(
                        &mut out,
                        line as u32 * c,
                        row as u32 * c,
                        line as u32 * c,
                        (row as u32 + 1) * c,
                        hex(col),
                        2,
                    );
                }
                EdgeState::Separator => stroke(
                    &mut out,
                    line as u32 * c,
                    row as u32 * c,
                    line as u32 * c,
                    (row as u32 + 1) * c,
                    String::from("#000000"),
                    4,
                ),
            }
        }
    }
    for row_line in 0..=win.height {
        for col in 0..win.width {
            match win.h_edge(col, row_line) {
                EdgeState::Light => {}
                EdgeState::Dark { rank, .. } => {
                    let color = if spec.layers.ranks { rank_color(rank) } else { (40, 40, 40) };
                    stroke(
                        &mut out,
                        col as u32 * c,
                        row_line as u32 * c,
                        (col as u32 + 1) * c,
                        row_line as u32 * c,
                        hex(color),
                        2,
                    );
                }
                EdgeState::Separator => stroke(
                    &mut out,
                    col as u32 * c,
                    row_line as u32 * c,
                    (col as u32 + 1) * c,
                    row_line as u32 * c,
                    String::from("#000000"),
                    4,
                ),
            }
        }
    }
    if spec.layers.zones {
        // Zone boundaries of the top rank: dashed verticals.
        let zw = 1i64 << (win.max_rank + 1);
        let mut x = win.x0 - win.x0.rem_euclid(zw);
        while x <= win.x0 + win.width as i64 {
            if x >= win.x0 {
                let px = ((x - win.x0) as u32) * c;
                let _ = writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"0\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
                    px, px, h
                );
            }
            x += zw;
        }
    }
    if spec.layers.channels && win.separators == SeparatorKind::None {
        // Channel assignment per vertical line, marked near the top edge.
        for line in 0..=win.width {
            let x = win.x0 + line as i64;
            let coord = wangkit_core::selfsim::DyadicCoord::from_position(x, 0, win.max_rank + 2);
            if let Ok(k) = wangkit_core::channels::channel_rank_blocks(&coord) {
                if k <= win.max_rank {
                    let px = line as u32 * c;
                    let _ = writeln!(
                        out,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                        px,
                        c / 2,
                        c / 4,
                        hex(rank_color(k)),
                    );
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Binary P6 image of a tiling, one cell_px square block per cell.
pub fn ppm_grid(g: &TilingGrid, spec: &RenderSpec) -> Vec<u8> {
    let c = spec.cell_px as usize;
    let (w, h) = (g.width * c, g.height * c);
    let mut out = format!("P6\n{} {}\n255\n", w, h).into_bytes();
    for py in 0..h {
        for px in 0..w {
            let t = g.get(px / c, py / c) as usize;
            let (r, gr, b) = index_color(t);
            out.extend_from_slice(&[r, gr, b]);
        }
    }
    out
}

pub fn render_grid(p: &Palette, g: &TilingGrid, spec: &RenderSpec) -> Result<Vec<u8>> {
    match spec.target {
        Target::Svg => Ok(svg_grid(p, g, spec).into_bytes()),
        Target::Ppm => Ok(ppm_grid(g, spec)),
    }
}

pub fn render_pattern(win: &PatternWindow, spec: &RenderSpec) -> Result<Vec<u8>> {
    match spec.target {
        Target::Svg => Ok(svg_pattern(win, spec).into_bytes()),
        Target::Ppm => bail!("pattern windows render to SVG only"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wangkit_core::fixtures;
    use wangkit_core::selfsim::{generate_pattern, ChoiceSequence, DegenerateStyle};

    #[test]
    fn one_by_one_grid_has_exactly_one_cell_rect() {
        let p = fixtures::single_palette();
        let g = TilingGrid::filled(1, 1, 0);
        let svg = svg_grid(&p, &g, &RenderSpec::default());
        assert_eq!(svg.matches("<rect").count(), 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = fixtures::stripes6_palette();
        let g = fixtures::striped_grid(4, 4);
        let spec = RenderSpec::default();
        assert_eq!(render_grid(&p, &g, &spec).unwrap(), render_grid(&p, &g, &spec).unwrap());
        let ch = ChoiceSequence::new(4, 3, 5);
        let w = generate_pattern(&ch, 0, 0, 32, 32, &DegenerateStyle::default()).unwrap();
        assert_eq!(svg_pattern(&w, &spec), svg_pattern(&w, &spec));
    }

    #[test]
    fn ppm_has_correct_size() {
        let g = fixtures::striped_grid(3, 2);
        let spec = RenderSpec { cell_px: 4, ..RenderSpec::default() };
        let ppm = ppm_grid(&g, &spec);
        let header = b"P6\n12 8\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(ppm.len(), header.len() + 12 * 8 * 3);
    }
}
