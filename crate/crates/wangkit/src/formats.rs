//! Text file formats: palettes, tilings, machines, and bit files.
//!
//! All formats are line based UTF-8 with `#` comments. Parsing a serialized
//! value reproduces it exactly; parsing then serializing arbitrary input
//! yields the canonical form (comments and extra whitespace dropped).

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use wangkit_core::palette::{Palette, TilingGrid};
use wangkit_core::tm::{Dir, TmSpec};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            None
        } else {
            Some((i + 1, l))
        }
    })
}

/// Parses the `wangtiles v1` palette format.
pub fn parse_palette(text: &str) -> Result<Palette> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty palette file"))?;
    if header != "wangtiles v1" {
        bail!("missing header: expected `wangtiles v1`, got {:?}", header);
    }
    let mut name = String::from("palette");
    let mut palette: Option<Palette> = None;
    let mut pending_colors: Vec<String> = Vec::new();
    for (no, line) in lines {
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "palette" => {
                name = parts.next().ok_or_else(|| anyhow!("line {}: palette needs a name", no))?.to_string();
            }
            "colors" => {
                pending_colors.extend(parts.map(String::from));
            }
            "tile" => {
                if palette.is_none() {
                    let refs: Vec<&str> = pending_colors.iter().map(String::as_str).collect();
                    palette = Some(Palette::new(&name, &refs).map_err(|e| anyhow!("line {}: {}", no, e))?);
                }
                let p = palette.as_mut().unwrap();
                let id = parts.next().ok_or_else(|| anyhow!("line {}: tile needs an id", no))?;
                let mut n = None;
                let mut e = None;
                let mut s = None;
                let mut w = None;
                let mut bit = None;
                let mut origin = false;
                for field in parts {
                    if let Some(v) = field.strip_prefix("N=") {
                        n = Some(v);
                    } else if let Some(v) = field.strip_prefix("E=") {
                        e = Some(v);
                    } else if let Some(v) = field.strip_prefix("S=") {
                        s = Some(v);
                    } else if let Some(v) = field.strip_prefix("W=") {
                        w = Some(v);
                    } else if let Some(v) = field.strip_prefix("bit=") {
                        bit = Some(v.parse::<u8>().with_context(|| format!("line {}: bad bit", no))?);
                    } else if field == "origin" {
                        origin = true;
                    } else {
                        bail!("line {}: unknown tile field {:?}", no, field);
                    }
                }
                let (n, e, s, w) = match (n, e, s, w) {
                    (Some(n), Some(e), Some(s), Some(w)) => (n, e, s, w),
                    _ => bail!("line {}: tile {} needs N= E= S= W=", no, id),
                };
                p.add_tile_by_name(id, n, e, s, w, bit, origin)
                    .map_err(|err| anyhow!("line {}: {}", no, err))?;
            }
            other => bail!("line {}: unknown directive {:?}", no, other),
        }
    }
    let palette = match palette {
        Some(p) => p,
        None => {
            let refs: Vec<&str> = pending_colors.iter().map(String::as_str).collect();
            Palette::new(&name, &refs).map_err(|e| anyhow!("{}", e))?
        }
    };
    palette.check_nonempty().map_err(|e| anyhow!("{}", e))?;
    Ok(palette)
}

/// Canonical palette text.
pub fn serialize_palette(p: &Palette) -> String {
    let mut out = String::new();
    out.push_str("wangtiles v1\n");
    let _ = writeln!(out, "palette {}", p.name());
    let _ = writeln!(out, "colors {}", p.colors().join(" "));
    for (i, t) in p.tiles().iter().enumerate() {
        let _ = write!(
            out,
            "tile {} N={} E={} S={} W={}",
            p.tile_name(i),
            p.color_name(t.north),
            p.color_name(t.east),
            p.color_name(t.south),
            p.color_name(t.west),
        );
        if let Some(b) = t.bit {
            let _ = write!(out, " bit={}", b);
        }
        if t.origin {
            out.push_str(" origin");
        }
        out.push('\n');
    }
    out
}

/// Parses the `tiling v1` format against a palette.
pub fn parse_tiling(text: &str, p: &Palette) -> Result<TilingGrid> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty tiling file"))?;
    if header != "tiling v1" {
        bail!("missing header: expected `tiling v1`, got {:?}", header);
    }
    let (no, pal) = lines.next().ok_or_else(|| anyhow!("missing palette line"))?;
    let pal_name = pal
        .strip_prefix("palette ")
        .ok_or_else(|| anyhow!("line {}: expected `palette <name>`", no))?
        .trim();
    if pal_name != p.name() {
        bail!("tiling references palette {:?}, loaded palette is {:?}", pal_name, p.name());
    }
    let (no, size) = lines.next().ok_or_else(|| anyhow!("missing size line"))?;
    let dims: Vec<usize> = size
        .strip_prefix("size ")
        .ok_or_else(|| anyhow!("line {}: expected `size W H`", no))?
        .split_whitespace()
        .map(|v| v.parse::<usize>().map_err(|e| anyhow!("line {}: {}", no, e)))
        .collect::<Result<_>>()?;
    let (w, h) = match dims[..] {
        [w, h] => (w, h),
        _ => bail!("line {}: expected `size W H`", no),
    };
    let mut cells = Vec::with_capacity(w * h);
    for (no, line) in lines {
        for id in line.split_whitespace() {
            let t = p.tile_index(id).ok_or_else(|| anyhow!("line {}: unknown tile id {:?}", no, id))?;
            cells.push(t as u32);
        }
    }
    TilingGrid::new(w, h, cells).map_err(|e| anyhow!("{}", e))
}

/// Canonical tiling text, top row first.
pub fn serialize_tiling(p: &Palette, g: &TilingGrid) -> String {
    let mut out = String::new();
    out.push_str("tiling v1\n");
    let _ = writeln!(out, "palette {}", p.name());
    let _ = writeln!(out, "size {} {}", g.width, g.height);
    for y in 0..g.height {
        let row: Vec<&str> = (0..g.width).map(|x| p.tile_name(g.get(x, y) as usize)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses the `tm v1` machine format.
pub fn parse_tm(text: &str) -> Result<TmSpec> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty machine file"))?;
    if header != "tm v1" {
        bail!("missing header: expected `tm v1`, got {:?}", header);
    }
    let mut name = String::from("tm");
    let mut states: Vec<String> = Vec::new();
    let mut alphabet: Vec<String> = Vec::new();
    let mut blank = None;
    let mut initial = None;
    let mut halt: Vec<String> = Vec::new();
    let mut deltas: Vec<(usize, String)> = Vec::new();
    for (no, line) in lines {
        let mut parts = line.split_whitespace();
        match parts.next().unwrap() {
            "name" => name = parts.next().unwrap_or("tm").to_string(),
            "states" => states.extend(parts.map(String::from)),
            "alphabet" => alphabet.extend(parts.map(String::from)),
            "blank" => blank = parts.next().map(String::from),
            "initial" => initial = parts.next().map(String::from),
            "halt" => halt.extend(parts.map(String::from)),
            "delta" => deltas.push((no, line.to_string())),
            other => bail!("line {}: unknown directive {:?}", no, other),
        }
    }
    let blank = blank.ok_or_else(|| anyhow!("missing `blank` line"))?;
    let initial = initial.ok_or_else(|| anyhow!("missing `initial` line"))?;
    let state_refs: Vec<&str> = states.iter().map(String::as_str).collect();
    let sym_refs: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let halt_refs: Vec<&str> = halt.iter().map(String::as_str).collect();
    let mut tm = TmSpec::new(&name, &state_refs, &sym_refs, &blank, &initial, &halt_refs)
        .map_err(|e| anyhow!("{}", e))?;
    for (no, line) in deltas {
        // delta q a -> q' a' L|R
        let body = line.strip_prefix("delta").unwrap().trim();
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| anyhow!("line {}: expected `delta q a -> q' a' L|R`", no))?;
        let l: Vec<&str> = lhs.split_whitespace().collect();
        let r: Vec<&str> = rhs.split_whitespace().collect();
        if l.len() != 2 || r.len() != 3 {
            bail!("line {}: expected `delta q a -> q' a' L|R`", no);
        }
        let dir = match r[2] {
            "L" => Dir::Left,
            "R" => Dir::Right,
            d => bail!("line {}: bad direction {:?}", no, d),
        };
        tm.set_delta(l[0], l[1], r[0], r[1], dir).map_err(|e| anyhow!("line {}: {}", no, e))?;
    }
    tm.validate().map_err(|e| anyhow!("{}", e))?;
    Ok(tm)
}

/// Canonical machine text.
pub fn serialize_tm(tm: &TmSpec) -> String {
    let mut out = String::new();
    out.push_str("tm v1\n");
    let _ = writeln!(out, "name {}", tm.name);
    let states: Vec<&str> = (0..tm.state_count())
        .map(|q| tm.state_name(wangkit_core::tm::StateId(q as u16)))
        .collect();
    let _ = writeln!(out, "states {}", states.join(" "));
    let syms: Vec<&str> = (0..tm.symbol_count())
        .map(|s| tm.symbol_name(wangkit_core::tm::SymbolId(s as u16)))
        .collect();
    let _ = writeln!(out, "alphabet {}", syms.join(" "));
    let _ = writeln!(out, "blank {}", tm.symbol_name(tm.blank));
    let _ = writeln!(out, "initial {}", tm.state_name(tm.initial));
    let halts: Vec<&str> = tm.halting_states().map(|q| tm.state_name(q)).collect();
    let _ = writeln!(out, "halt {}", halts.join(" "));
    for q in 0..tm.state_count() as u16 {
        let q = wangkit_core::tm::StateId(q);
        for s in 0..tm.symbol_count() as u16 {
            let s = wangkit_core::tm::SymbolId(s);
            if let Some(mv) = tm.delta(q, s) {
                let _ = writeln!(
                    out,
                    "delta {} {} -> {} {} {}",
                    tm.state_name(q),
                    tm.symbol_name(s),
                    tm.state_name(mv.state),
                    tm.symbol_name(mv.write),
                    if mv.dir == Dir::Left { "L" } else { "R" },
                );
            }
        }
    }
    out
}

/// Parses a bit file: `0`/`1` characters, whitespace and comments ignored.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for (_no, line) in content_lines(text) {
        for ch in line.chars() {
            match ch {
                '0' => out.push(0),
                '1' => out.push(1),
                c if c.is_whitespace() => {}
                c => bail!("unexpected character {:?} in bit file", c),
            }
        }
    }
    Ok(out)
}

pub fn serialize_bits(bits: &[u8]) -> String {
    let mut s: String = bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use wangkit_core::fixtures;

    #[test]
    fn palette_roundtrip_is_canonical() {
        let p = fixtures::stripes6_palette();
        let text = serialize_palette(&p);
        let q = parse_palette(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(serialize_palette(&q), text);
        // Comments and spacing normalize away.
        let noisy = format!("# sample\n{}\n# trailing\n", text.replace(" N=", "   N="));
        let r = parse_palette(&noisy).unwrap();
        assert_eq!(serialize_palette(&r), text);
    }

    #[test]
    fn single_tile_file_parses() {
        let text = "wangtiles v1\npalette single\ncolors w\ntile A N=w E=w S=w W=w\n";
        let p = parse_palette(text).unwrap();
        assert_eq!(p.color_count(), 1);
        assert_eq!(p.tile_count(), 1);
    }

    #[test]
    fn unknown_color_is_rejected() {
        let text = "wangtiles v1\npalette x\ncolors w\ntile A N=w E=q S=w W=w\n";
        let err = parse_palette(text).unwrap_err().to_string();
        assert!(err.contains("unknown color"), "{}", err);
        assert!(err.contains("\"q\""), "{}", err);
    }

    #[test]
    fn duplicate_tile_and_missing_header_are_rejected() {
        let text = "wangtiles v1\npalette x\ncolors w\ntile A N=w E=w S=w W=w\ntile A N=w E=w S=w W=w\n";
        assert!(parse_palette(text).unwrap_err().to_string().contains("duplicate tile"));
        assert!(parse_palette("palette x\n").unwrap_err().to_string().contains("header"));
    }

    #[test]
    fn tiling_roundtrip() {
        let p = fixtures::stripes6_palette();
        let g = fixtures::striped_grid(4, 3);
        let text = serialize_tiling(&p, &g);
        let back = parse_tiling(&text, &p).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn tm_roundtrip() {
        let tm = fixtures::inc3_tm();
        let text = serialize_tm(&tm);
        let back = parse_tm(&text).unwrap();
        assert_eq!(back, tm);
    }

    #[test]
    fn bits_roundtrip() {
        let bits = vec![1u8, 0, 1, 1, 0];
        assert_eq!(parse_bits(&serialize_bits(&bits)).unwrap(), bits);
    }
}
