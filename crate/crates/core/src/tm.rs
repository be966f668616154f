//! Turing machines and their compilation into tile sets whose valid,
//! origin-anchored tilings are exactly space-time diagrams.
//!
//! Rows encode configurations, top row first, one time step per row. Each
//! tile's north side carries the cell content before the step (with the head
//! state when the head sits there), the south side the content after it, and
//! the vertical sides hand the moving head to a neighbor. Halting states copy
//! themselves downward, so the diagram freezes after halting.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::palette::{Palette, Tile, TilingGrid};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct StateId(pub u16);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SymbolId(pub u16);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dir {
    Left,
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TmMove {
    pub state: StateId,
    pub write: SymbolId,
    pub dir: Dir,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TmError {
    UnknownState(String),
    UnknownSymbol(String),
    DuplicateName(String),
    MissingTransition { state: String, symbol: String },
    HaltingTransition { state: String },
    TileBudgetExceeded { needed: usize, budget: usize },
    OddAlphabet,
    BitNotPreserved { state: String, symbol: String },
    WindowTooNarrow,
}

impl fmt::Display for TmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TmError::UnknownState(s) => write!(f, "unknown state {:?}", s),
            TmError::UnknownSymbol(s) => write!(f, "unknown symbol {:?}", s),
            TmError::DuplicateName(s) => write!(f, "duplicate name {:?}", s),
            TmError::MissingTransition { state, symbol } => {
                write!(f, "no transition for ({}, {})", state, symbol)
            }
            TmError::HaltingTransition { state } => {
                write!(f, "halting state {} must not have transitions", state)
            }
            TmError::TileBudgetExceeded { needed, budget } => {
                write!(f, "compilation needs {} tiles, budget is {}", needed, budget)
            }
            TmError::OddAlphabet => write!(f, "double-tape machines need a bit-paired alphabet of even size"),
            TmError::BitNotPreserved { state, symbol } => {
                write!(f, "transition ({}, {}) changes the read-only input bit", state, symbol)
            }
            TmError::WindowTooNarrow => write!(f, "window too narrow for the input"),
        }
    }
}

impl core::error::Error for TmError {}

/// A single-tape machine with a total transition map on non-halting states.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TmSpec {
    pub name: String,
    states: Vec<String>,
    symbols: Vec<String>,
    pub blank: SymbolId,
    pub initial: StateId,
    halting: BTreeSet<StateId>,
    delta: Vec<Option<TmMove>>,
}

impl TmSpec {
    pub fn new(
        name: &str,
        states: &[&str],
        symbols: &[&str],
        blank: &str,
        initial: &str,
        halting: &[&str],
    ) -> Result<Self, TmError> {
        let mut seen = BTreeSet::new();
        for s in states.iter().chain(symbols.iter()) {
            if !seen.insert(*s) {
                return Err(TmError::DuplicateName(String::from(*s)));
            }
        }
        let find_state = |n: &str| {
            states
                .iter()
                .position(|s| *s == n)
                .map(|i| StateId(i as u16))
                .ok_or_else(|| TmError::UnknownState(String::from(n)))
        };
        let find_symbol = |n: &str| {
            symbols
                .iter()
                .position(|s| *s == n)
                .map(|i| SymbolId(i as u16))
                .ok_or_else(|| TmError::UnknownSymbol(String::from(n)))
        };
        let halting: BTreeSet<StateId> =
            halting.iter().map(|h| find_state(h)).collect::<Result<_, _>>()?;
        Ok(TmSpec {
            name: String::from(name),
            states: states.iter().map(|s| String::from(*s)).collect(),
            symbols: symbols.iter().map(|s| String::from(*s)).collect(),
            blank: find_symbol(blank)?,
            initial: find_state(initial)?,
            halting,
            delta: vec![None; states.len() * symbols.len()],
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0 as usize]
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        &self.symbols[s.0 as usize]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u16))
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s == name).map(|i| SymbolId(i as u16))
    }

    pub fn is_halting(&self, q: StateId) -> bool {
        self.halting.contains(&q)
    }

    pub fn halting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.halting.iter().copied()
    }

    pub fn set_delta(
        &mut self,
        state: &str,
        read: &str,
        next: &str,
        write: &str,
        dir: Dir,
    ) -> Result<(), TmError> {
        let q = self.state_id(state).ok_or_else(|| TmError::UnknownState(String::from(state)))?;
        if self.is_halting(q) {
            return Err(TmError::HaltingTransition { state: String::from(state) });
        }
        let s = self.symbol_id(read).ok_or_else(|| TmError::UnknownSymbol(String::from(read)))?;
        let q2 = self.state_id(next).ok_or_else(|| TmError::UnknownState(String::from(next)))?;
        let s2 = self.symbol_id(write).ok_or_else(|| TmError::UnknownSymbol(String::from(write)))?;
        self.delta[q.0 as usize * self.symbols.len() + s.0 as usize] =
            Some(TmMove { state: q2, write: s2, dir });
        Ok(())
    }

    pub fn delta(&self, q: StateId, s: SymbolId) -> Option<TmMove> {
        self.delta[q.0 as usize * self.symbols.len() + s.0 as usize]
    }

    /// Checks that the transition map is total on non-halting states.
    pub fn validate(&self) -> Result<(), TmError> {
        for q in 0..self.states.len() {
            if self.is_halting(StateId(q as u16)) {
                continue;
            }
            for s in 0..self.symbols.len() {
                if self.delta[q * self.symbols.len() + s].is_none() {
                    return Err(TmError::MissingTransition {
                        state: self.states[q].clone(),
                        symbol: self.symbols[s].clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One machine configuration over a growable window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Configuration {
    /// Tape cell index of `tape[0]`.
    pub offset: i64,
    pub tape: Vec<SymbolId>,
    pub head: i64,
    pub state: StateId,
    pub halted: bool,
}

impl Configuration {
    pub fn symbol_at(&self, cell: i64, blank: SymbolId) -> SymbolId {
        let i = cell - self.offset;
        if i < 0 || i as usize >= self.tape.len() {
            blank
        } else {
            self.tape[i as usize]
        }
    }
}

/// Standard single-tape semantics, head starting on cell 0. Returns steps+1
/// configurations; once the machine halts, later entries repeat the halted
/// configuration.
pub fn simulate(tm: &TmSpec, input: &[SymbolId], steps: usize) -> Vec<Configuration> {
    let mut cfg = Configuration {
        offset: 0,
        tape: if input.is_empty() { vec![tm.blank] } else { input.to_vec() },
        head: 0,
        state: tm.initial,
        halted: tm.is_halting(tm.initial),
    };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(cfg.clone());
    for _ in 0..steps {
        if !cfg.halted {
            let i = (cfg.head - cfg.offset) as usize;
            let read = cfg.tape[i];
            let mv = tm.delta(cfg.state, read).expect("validated machine is total");
            cfg.tape[i] = mv.write;
            cfg.state = mv.state;
            cfg.head += match mv.dir {
                Dir::Left => -1,
                Dir::Right => 1,
            };
            if cfg.head < cfg.offset {
                cfg.tape.insert(0, tm.blank);
                cfg.offset -= 1;
            } else if (cfg.head - cfg.offset) as usize >= cfg.tape.len() {
                cfg.tape.push(tm.blank);
            }
            cfg.halted = tm.is_halting(cfg.state);
        }
        out.push(cfg.clone());
    }
    out
}

/// What a compiled tile does in the diagram.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TileRole {
    /// Cell keeps its symbol, head not involved.
    Passive(SymbolId),
    /// Head executes delta here.
    Action { state: StateId, sym: SymbolId },
    /// Head arrives from the left neighbor.
    ReceiveLeft { state: StateId, sym: SymbolId },
    /// Head arrives from the right neighbor.
    ReceiveRight { state: StateId, sym: SymbolId },
    /// Halted head copies itself downward.
    Halt { state: StateId, sym: SymbolId },
}

/// A compiled machine: the palette plus the metadata needed to seed and
/// decode diagram windows.
#[derive(Clone, Debug)]
pub struct CompiledTm {
    pub palette: Palette,
    pub origin_tile: usize,
    pub roles: Vec<TileRole>,
    pub tm: TmSpec,
    double_tape: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    pub tile_budget: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { tile_budget: 4096 }
    }
}

/// North/south edge meaning of a tile row position.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellReading {
    Plain(SymbolId),
    Head { state: StateId, sym: SymbolId },
}

/// Compiles a machine into an origin-constrained palette. The designated
/// origin tile is the head-on-blank tile of the initial state.
pub fn compile_origin_constrained(tm: &TmSpec, opts: &CompileOptions) -> Result<CompiledTm, TmError> {
    tm.validate()?;
    compile_inner(tm, opts, false)
}

/// Double-tape variant: the alphabet must pair work symbols with input bits
/// (symbol 2i+b is work symbol i carrying bit b) and transitions must keep
/// the bit. Every compiled tile is bit-typed and the palette's vertical
/// matching forces constant bits along columns.
pub fn compile_double_tape(tm: &TmSpec, opts: &CompileOptions) -> Result<CompiledTm, TmError> {
    tm.validate()?;
    if tm.symbol_count() % 2 != 0 {
        return Err(TmError::OddAlphabet);
    }
    for q in 0..tm.state_count() as u16 {
        let q = StateId(q);
        if tm.is_halting(q) {
            continue;
        }
        for s in 0..tm.symbol_count() as u16 {
            let mv = tm.delta(q, SymbolId(s)).expect("total");
            if mv.write.0 % 2 != s % 2 {
                return Err(TmError::BitNotPreserved {
                    state: String::from(tm.state_name(q)),
                    symbol: String::from(tm.symbol_name(SymbolId(s))),
                });
            }
        }
    }
    compile_inner(tm, opts, true)
}

fn compile_inner(tm: &TmSpec, opts: &CompileOptions, double: bool) -> Result<CompiledTm, TmError> {
    let n_sym = tm.symbol_count();
    let n_state = tm.state_count();
    let needed = n_sym + n_state * n_sym + 2 * n_state * n_sym + n_sym;
    if needed > opts.tile_budget {
        return Err(TmError::TileBudgetExceeded { needed, budget: opts.tile_budget });
    }

    let mut p = Palette::new(&tm.name, &[]).unwrap();
    // Horizontal colors: one per symbol, one per (state, symbol).
    let sym_color: Vec<_> =
        (0..n_sym).map(|s| p.intern_color(&format!("s:{}", tm.symbol_name(SymbolId(s as u16))))).collect();
    let head_color: Vec<Vec<_>> = (0..n_state)
        .map(|q| {
            (0..n_sym)
                .map(|s| {
                    p.intern_color(&format!(
                        "h:{}:{}",
                        tm.state_name(StateId(q as u16)),
                        tm.symbol_name(SymbolId(s as u16))
                    ))
                })
                .collect()
        })
        .collect();
    // Vertical colors: quiet, and per-state left/right handoff.
    let quiet = p.intern_color("v:.");
    let right: Vec<_> =
        (0..n_state).map(|q| p.intern_color(&format!("v:>{}", tm.state_name(StateId(q as u16))))).collect();
    let left: Vec<_> =
        (0..n_state).map(|q| p.intern_color(&format!("v:<{}", tm.state_name(StateId(q as u16))))).collect();

    let bit_of = |s: SymbolId| if double { Some(s.0 as u8 % 2) } else { None };

    let mut roles = Vec::new();
    let mut origin_tile = None;
    for s in 0..n_sym as u16 {
        let s = SymbolId(s);
        let name = format!("p:{}", tm.symbol_name(s));
        let t = Tile { north: sym_color[s.0 as usize], east: quiet, south: sym_color[s.0 as usize], west: quiet, bit: bit_of(s), origin: false };
        p.add_tile(&name, t).unwrap();
        roles.push(TileRole::Passive(s));
    }
    for q in 0..n_state as u16 {
        let q = StateId(q);
        for s in 0..n_sym as u16 {
            let s = SymbolId(s);
            let is_origin = q == tm.initial && s == tm.blank;
            if tm.is_halting(q) {
                let name = format!("z:{}:{}", tm.state_name(q), tm.symbol_name(s));
                let hc = head_color[q.0 as usize][s.0 as usize];
                let t = Tile { north: hc, east: quiet, south: hc, west: quiet, bit: bit_of(s), origin: is_origin };
                let idx = p.add_tile(&name, t).unwrap();
                roles.push(TileRole::Halt { state: q, sym: s });
                if is_origin {
                    origin_tile = Some(idx);
                }
            } else {
                let mv = tm.delta(q, s).expect("total");
                let name = format!("a:{}:{}", tm.state_name(q), tm.symbol_name(s));
                let (e, w) = match mv.dir {
                    Dir::Right => (right[mv.state.0 as usize], quiet),
                    Dir::Left => (quiet, left[mv.state.0 as usize]),
                };
                let t = Tile {
                    north: head_color[q.0 as usize][s.0 as usize],
                    east: e,
                    south: sym_color[mv.write.0 as usize],
                    west: w,
                    bit: bit_of(s),
                    origin: is_origin,
                };
                let idx = p.add_tile(&name, t).unwrap();
                roles.push(TileRole::Action { state: q, sym: s });
                if is_origin {
                    origin_tile = Some(idx);
                }
            }
        }
    }
    for q in 0..n_state as u16 {
        let q = StateId(q);
        for s in 0..n_sym as u16 {
            let s = SymbolId(s);
            let name = format!("rl:{}:{}", tm.state_name(q), tm.symbol_name(s));
            let t = Tile {
                north: sym_color[s.0 as usize],
                east: quiet,
                south: head_color[q.0 as usize][s.0 as usize],
                west: right[q.0 as usize],
                bit: bit_of(s),
                origin: false,
            };
            p.add_tile(&name, t).unwrap();
            roles.push(TileRole::ReceiveLeft { state: q, sym: s });

            let name = format!("rr:{}:{}", tm.state_name(q), tm.symbol_name(s));
            let t = Tile {
                north: sym_color[s.0 as usize],
                east: left[q.0 as usize],
                south: head_color[q.0 as usize][s.0 as usize],
                west: quiet,
                bit: bit_of(s),
                origin: false,
            };
            p.add_tile(&name, t).unwrap();
            roles.push(TileRole::ReceiveRight { state: q, sym: s });
        }
    }

    Ok(CompiledTm {
        palette: p,
        origin_tile: origin_tile.expect("initial state and blank symbol exist"),
        roles,
        tm: tm.clone(),
        double_tape: double,
    })
}

impl CompiledTm {
    pub fn is_double_tape(&self) -> bool {
        self.double_tape
    }

    /// Index of the unique tile with this role.
    pub fn find_role(&self, role: TileRole) -> usize {
        self.roles.iter().position(|&r| r == role).expect("role exists")
    }

    /// The unique tile row whose north edges carry the given colors, with
    /// quiet side borders, or `None` (no row / more than one row). Head
    /// hand-offs live inside a row, so this chain search is what forces the
    /// action/receive placement.
    pub fn row_from_norths(&self, norths: &[crate::palette::ColorId]) -> Option<Vec<u32>> {
        let p = &self.palette;
        let quiet = p.color_id("v:.").expect("compiled palette has the quiet color");
        let width = norths.len();
        let mut solutions: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<(usize, Vec<u32>)> = alloc::vec![(0, Vec::new())];
        while let Some((i, prefix)) = stack.pop() {
            if i == width {
                solutions.push(prefix);
                if solutions.len() > 1 {
                    return None;
                }
                continue;
            }
            let west_req = if i == 0 { quiet } else { p.tile(prefix[i - 1] as usize).east };
            for t in 0..p.tile_count() as u32 {
                let tile = p.tile(t as usize);
                if tile.north != norths[i] || tile.west != west_req {
                    continue;
                }
                if i + 1 == width && tile.east != quiet {
                    continue;
                }
                let mut next = prefix.clone();
                next.push(t);
                stack.push((i + 1, next));
            }
        }
        if solutions.len() == 1 {
            solutions.pop()
        } else {
            None
        }
    }

    /// North-edge colors encoding the initial configuration: head mark on
    /// cell 0, input symbols across, blanks beyond.
    pub fn initial_norths(&self, input: &[SymbolId], width: usize) -> Result<Vec<crate::palette::ColorId>, TmError> {
        if width < input.len() || width == 0 {
            return Err(TmError::WindowTooNarrow);
        }
        let p = &self.palette;
        let sym = |i: usize| if i < input.len() { input[i] } else { self.tm.blank };
        let mut norths = Vec::with_capacity(width);
        for i in 0..width {
            let s = sym(i);
            let color = if i == 0 {
                p.color_id(&format!("h:{}:{}", self.tm.state_name(self.tm.initial), self.tm.symbol_name(s)))
            } else {
                p.color_id(&format!("s:{}", self.tm.symbol_name(s)))
            };
            norths.push(color.expect("compiled colors exist"));
        }
        Ok(norths)
    }

    /// The input-encoding row: the unique row whose north edges spell the
    /// initial configuration.
    pub fn initial_row(&self, input: &[SymbolId], width: usize) -> Result<Vec<u32>, TmError> {
        let norths = self.initial_norths(input, width)?;
        self.row_from_norths(&norths).ok_or(TmError::WindowTooNarrow)
    }

    /// The unique valid successor of a row of tiles.
    pub fn forced_next_row(&self, row: &[u32]) -> Option<Vec<u32>> {
        let p = &self.palette;
        let norths: Vec<_> = row.iter().map(|&t| p.tile(t as usize).south).collect();
        self.row_from_norths(&norths)
    }

    /// The forced diagram window: input row on top, then `rows - 1` forced
    /// successors, side borders quiet.
    pub fn forced_window(&self, input: &[SymbolId], width: usize, rows: usize) -> Result<TilingGrid, TmError> {
        let mut cells = self.initial_row(input, width)?;
        let mut prev = cells.clone();
        for _ in 1..rows {
            let next = self.forced_next_row(&prev).ok_or(TmError::WindowTooNarrow)?;
            cells.extend_from_slice(&next);
            prev = next;
        }
        Ok(TilingGrid::new(width, rows, cells).expect("forced window dims"))
    }

    /// Reads a diagram row back into symbols and an optional head.
    pub fn decode_row(&self, row: &[u32]) -> (Vec<SymbolId>, Option<(usize, StateId)>) {
        let mut syms = Vec::with_capacity(row.len());
        let mut head = None;
        for (i, &t) in row.iter().enumerate() {
            match self.roles[t as usize] {
                TileRole::Passive(s) | TileRole::ReceiveLeft { sym: s, .. } | TileRole::ReceiveRight { sym: s, .. } => {
                    syms.push(s)
                }
                TileRole::Action { state, sym } | TileRole::Halt { state, sym } => {
                    syms.push(sym);
                    head = Some((i, state));
                }
            }
        }
        (syms, head)
    }
}

/// Superimposes two palettes, the second rotated a quarter turn: layer A
/// constraints apply as-is, layer B horizontal constraints run vertically.
pub fn superimpose_orthogonal(pa: &Palette, pb: &Palette) -> Palette {
    let mut p = Palette::new(&format!("{}*{}", pa.name(), pb.name()), &[]).unwrap();
    let has_a = pa.origin_tile().is_some();
    let has_b = pb.origin_tile().is_some();
    let pair_color = |a: &str, b: &str, p: &mut Palette| p.intern_color(&format!("{}*{}", a, b));
    for (ia, a) in pa.tiles().iter().enumerate() {
        for (ib, b) in pb.tiles().iter().enumerate() {
            let north = pair_color(pa.color_name(a.north), pb.color_name(b.east), &mut p);
            let east = pair_color(pa.color_name(a.east), pb.color_name(b.south), &mut p);
            let south = pair_color(pa.color_name(a.south), pb.color_name(b.west), &mut p);
            let west = pair_color(pa.color_name(a.west), pb.color_name(b.north), &mut p);
            let origin = (has_a || has_b)
                && (a.origin || !has_a)
                && (b.origin || !has_b);
            let t = Tile { north, east, south, west, bit: a.bit.or(b.bit), origin };
            p.add_tile(&format!("{}*{}", pa.tile_name(ia), pb.tile_name(ib)), t).unwrap();
        }
    }
    p
}

/// Projects a product tiling onto layer A (same geometry).
pub fn project_a(g: &TilingGrid, pb_tiles: usize) -> TilingGrid {
    let cells = g.cells().iter().map(|&t| t / pb_tiles as u32).collect();
    TilingGrid::new(g.width, g.height, cells).unwrap()
}

/// Projects a product tiling onto layer B and rotates the window back so it
/// validates against the unrotated layer-B palette: east steps in the
/// product are south steps in layer B.
pub fn project_b(g: &TilingGrid, pb_tiles: usize) -> TilingGrid {
    let (w, h) = (g.width, g.height);
    let mut cells = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            let t = g.get(x, y) % pb_tiles as u32;
            // Product cell (x, y) lands at column h-1-y, row x of the
            // h-by-w layer-B window.
            cells[x * h + (h - 1 - y)] = t;
        }
    }
    TilingGrid::new(h, w, cells).unwrap()
}
