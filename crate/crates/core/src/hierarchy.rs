//! Deterministic discrete-event simulation of the tree of stripe
//! computations: zones of responsibility, address-routed bit lookup, and the
//! shared forbidden-string scan.
//!
//! Every rank-k node owns an aligned zone of 2^(k+1) input bits, split
//! between its two children. Two logical processes share each node: the
//! BitServer answers address queries, forwarding by most significant address
//! bit and waiting for the child's reply; the ComplexityCheck walks the
//! canonical output enumeration, and whenever it meets a forbidden string
//! that fits its space budget it scans its whole zone for an occurrence,
//! fetching bits through its own BitServer. A match makes the configuration
//! impossible and stops the run.
//!
//! The scheduler is lock-step and round-robin by node id; message delays are
//! explicit, so runs replay bit-identically.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitString;
use crate::kolmo::{Bound, KolmoIndex, KolmoParams};
use crate::selfsim::ChoiceSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HierError {
    InputWidthMismatch { got: usize, expected: usize },
    UnknownNode(usize),
    AddressOutOfRange { addr: u64, bits: u8 },
    NoReply,
}

impl fmt::Display for HierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierError::InputWidthMismatch { got, expected } => {
                write!(f, "input holds {} bits, the window needs {}", got, expected)
            }
            HierError::UnknownNode(n) => write!(f, "no node {}", n),
            HierError::AddressOutOfRange { addr, bits } => {
                write!(f, "address {} does not fit {} bits or leaves the zone", addr, bits)
            }
            HierError::NoReply => write!(f, "query produced no reply"),
        }
    }
}

impl core::error::Error for HierError {}

/// Per-cell capacity assumed by the space accounting: one subgrid cell holds
/// this many bits of queue, cursor and buffer state.
pub const CELL_BITS: u32 = 32;

fn ceil_sqrt(v: u64) -> u64 {
    let s = v.isqrt();
    if s * s < v {
        s + 1
    } else {
        s
    }
}

/// ceil(2^(k/2)) cells of working space for a rank-k node.
pub fn budget_cells(rank: u8) -> u32 {
    ceil_sqrt(1u64 << rank) as u32
}

/// Message delay on the edge between a rank-k node and its children.
pub fn edge_delay(rank: u8) -> u64 {
    ceil_sqrt(1u64 << (rank + 1))
}

#[derive(Clone, Debug)]
pub struct NodeInfo {
    pub id: usize,
    pub rank: u8,
    /// Start of the aligned 2^(rank+1)-wide logical zone, in window
    /// positions; may stick out of the window in degenerate splits.
    pub aligned_lo: i64,
    /// Physical zone: clipped to the window and the component.
    pub lo: usize,
    pub hi: usize,
    pub parent: Option<usize>,
    /// Children by address MSB: [left half, right half].
    pub children: [Option<usize>; 2],
    pub budget_cells: u32,
}

#[derive(Clone, Debug)]
pub struct Forest {
    pub nodes: Vec<NodeInfo>,
    pub roots: Vec<usize>,
    pub input: Vec<u8>,
    pub max_rank: u8,
    /// Window position of the separating line, when it splits the window.
    pub separator: Option<usize>,
}

/// Builds the zone tree for a 2^(R+1)-bit window. A separating line strictly
/// inside the window splits it into two independently rooted components.
pub fn build_forest(ch: &ChoiceSequence, max_rank: u8, input: &[u8]) -> Result<Forest, HierError> {
    let width = 1usize << (max_rank + 1);
    if input.len() != width {
        return Err(HierError::InputWidthMismatch { got: input.len(), expected: width });
    }
    let off = ch.offset_x();
    let separator = if off > 0 && (off as usize) < width { Some(off as usize) } else { None };
    let mut forest = Forest {
        nodes: Vec::new(),
        roots: Vec::new(),
        input: input.to_vec(),
        max_rank,
        separator,
    };
    let components: Vec<(i64, i64)> = match separator {
        None => alloc::vec![(0, width as i64)],
        Some(s) => alloc::vec![(0, s as i64), (s as i64, width as i64)],
    };
    for (clo, chi) in components {
        // The rank-R zones are aligned to the separator (coordinates are
        // positions minus the offset, and zone boundaries are coordinate
        // multiples of 2^(k+1)).
        let zw = 1i64 << (max_rank + 1);
        let mut zstart = off + ((clo - off).div_euclid(zw)) * zw;
        while zstart < chi {
            if let Some(root) = add_node(&mut forest, max_rank, zstart, clo, chi, None) {
                forest.roots.push(root);
            }
            zstart += zw;
        }
    }
    Ok(forest)
}

fn add_node(
    forest: &mut Forest,
    rank: u8,
    aligned_lo: i64,
    comp_lo: i64,
    comp_hi: i64,
    parent: Option<usize>,
) -> Option<usize> {
    let width = 1i64 << (rank + 1);
    let lo = aligned_lo.max(comp_lo);
    let hi = (aligned_lo + width).min(comp_hi);
    if lo >= hi {
        return None;
    }
    let id = forest.nodes.len();
    forest.nodes.push(NodeInfo {
        id,
        rank,
        aligned_lo,
        lo: lo as usize,
        hi: hi as usize,
        parent,
        children: [None, None],
        budget_cells: budget_cells(rank),
    });
    if rank > 1 {
        let half = width / 2;
        let left = add_node(forest, rank - 1, aligned_lo, comp_lo, comp_hi, Some(id));
        let right = add_node(forest, rank - 1, aligned_lo + half, comp_lo, comp_hi, Some(id));
        forest.nodes[id].children = [left, right];
    }
    Some(id)
}

impl Forest {
    pub fn nodes_at_rank(&self, rank: u8) -> impl Iterator<Item = &NodeInfo> {
        self.nodes.iter().filter(move |n| n.rank == rank)
    }

    /// Smallest rank whose aligned zone wholly contains [pos, pos+len).
    pub fn min_covering_rank(&self, off: i64, pos: usize, len: usize) -> Option<u8> {
        for k in 1..=self.max_rank {
            let zw = 1i64 << (k + 1);
            let a = (pos as i64 - off).div_euclid(zw);
            let b = ((pos + len - 1) as i64 - off).div_euclid(zw);
            if a == b {
                return Some(k);
            }
        }
        None
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// No forbidden string was found in the window within the tick budget.
    Consistent,
    Impossible { rank: u8, tick: u64, string: BitString, position: usize },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EventKind {
    Request { from: usize, to: usize, addr: u64, bits: u8 },
    Reply { from: usize, to: usize, bit: u8 },
    SelfRequest { addr: u64 },
    Detect { rank: u8, position: usize },
    Reboot,
    RoutingError { addr: u64 },
    BudgetViolation { used_bits: u64, budget_bits: u64 },
    CursorExhausted,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Event {
    pub tick: u64,
    pub node: usize,
    pub kind: EventKind,
}

pub trait EventSink {
    fn record(&mut self, e: &Event);
}

pub struct NullSink;

impl EventSink for NullSink {
    fn record(&mut self, _e: &Event) {}
}

/// Keeps the first `cap` events and counts the rest.
pub struct VecSink {
    pub cap: usize,
    pub events: Vec<Event>,
    pub dropped: u64,
}

impl VecSink {
    pub fn new(cap: usize) -> Self {
        VecSink { cap, events: Vec::new(), dropped: 0 }
    }
}

impl EventSink for VecSink {
    fn record(&mut self, e: &Event) {
        if self.events.len() < self.cap {
            self.events.push(*e);
        } else {
            self.dropped += 1;
        }
    }
}

/// Order-sensitive FNV-1a digest of the whole event stream.
pub struct HashSink {
    pub hash: u64,
    pub count: u64,
}

impl HashSink {
    pub fn new() -> Self {
        HashSink { hash: 0xcbf29ce484222325, count: 0 }
    }
    fn mix(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.hash ^= b as u64;
            self.hash = self.hash.wrapping_mul(0x100000001b3);
        }
    }
}

impl Default for HashSink {
    fn default() -> Self {
        Self::new()
    }
}

impl EventSink for HashSink {
    fn record(&mut self, e: &Event) {
        self.count += 1;
        self.mix(e.tick);
        self.mix(e.node as u64);
        let (tag, a, b): (u64, u64, u64) = match e.kind {
            EventKind::Request { to, addr, .. } => (1, to as u64, addr),
            EventKind::Reply { to, bit, .. } => (2, to as u64, bit as u64),
            EventKind::SelfRequest { addr } => (3, addr, 0),
            EventKind::Detect { rank, position } => (4, rank as u64, position as u64),
            EventKind::Reboot => (5, 0, 0),
            EventKind::RoutingError { addr } => (6, addr, 0),
            EventKind::BudgetViolation { used_bits, budget_bits } => (7, used_bits, budget_bits),
            EventKind::CursorExhausted => (8, 0, 0),
        };
        self.mix(tag);
        self.mix(a);
        self.mix(b);
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PolyReboot {
    pub coeff: u64,
    pub exponent: u32,
}

#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    pub params: KolmoParams,
    pub max_ticks: u64,
    /// Restart the forbidden-string cursor whenever this many ticks pass,
    /// scaled per node as coeff * zone_width^exponent; None lets cursors run
    /// for the whole simulation.
    pub poly_reboot: Option<PolyReboot>,
}

#[derive(Clone, Copy, Default, Debug)]
pub struct RankStats {
    pub transactions: u64,
    pub max_round_trip: u64,
}

#[derive(Clone, Default, Debug)]
pub struct SimStats {
    pub per_rank: BTreeMap<u8, RankStats>,
    pub budget_violations: u64,
    pub events: u64,
    pub cursor_max: usize,
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub verdict: Verdict,
    pub ticks: u64,
    pub stats: SimStats,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Endpoint {
    Server(usize),
    Cc(usize),
    External,
}

#[derive(Clone, Copy, Debug)]
enum Payload {
    Request { addr: u64, bits: u8, rid: u64 },
    Reply { rid: u64, bit: u8 },
    Fault { rid: u64 },
}

#[derive(Clone, Copy, Debug)]
struct Msg {
    from: Endpoint,
    to: usize,
    payload: Payload,
    issued: u64,
    delivery: u64,
    seq: u64,
}

#[derive(Clone, Debug)]
enum CcPhase {
    Enumerating,
    Scanning { target: usize, pos: usize, bit: usize },
    Done,
}

#[derive(Clone, Debug)]
struct CcState {
    cursor: usize,
    phase: CcPhase,
    awaiting: bool,
    reply: Option<Result<u8, ()>>,
    issue_tick: u64,
    exhausted_reported: bool,
}

#[derive(Clone, Debug)]
struct NodeState {
    inbox: VecDeque<Msg>,
    pending: BTreeMap<u64, (Endpoint, u64)>,
    step: u64,
    cc: CcState,
}

struct Engine<'a> {
    forest: &'a Forest,
    cfg: SimConfig,
    idx: Option<&'a KolmoIndex>,
    nodes: Vec<NodeState>,
    queue: BTreeMap<(u64, u64), Msg>,
    next_seq: u64,
    next_rid: u64,
    verdict: Option<(u8, u64, BitString, usize)>,
    stats: SimStats,
    external_reply: Option<(u64, u8)>,
}

impl<'a> Engine<'a> {
    fn new(forest: &'a Forest, cfg: SimConfig, idx: Option<&'a KolmoIndex>) -> Self {
        let nodes = forest
            .nodes
            .iter()
            .map(|_| NodeState {
                inbox: VecDeque::new(),
                pending: BTreeMap::new(),
                step: 0,
                cc: CcState {
                    cursor: 0,
                    phase: CcPhase::Enumerating,
                    awaiting: false,
                    reply: None,
                    issue_tick: 0,
                    exhausted_reported: false,
                },
            })
            .collect();
        Engine {
            forest,
            cfg,
            idx,
            nodes,
            queue: BTreeMap::new(),
            next_seq: 0,
            next_rid: 0,
            verdict: None,
            stats: SimStats::default(),
            external_reply: None,
        }
    }

    fn send(&mut self, now: u64, from: Endpoint, to: usize, payload: Payload, delay: u64, sink: &mut dyn EventSink) {
        let seq = self.next_seq;
        self.next_seq += 1;
        let msg = Msg { from, to, payload, issued: now, delivery: now + delay, seq };
        let (node, kind) = match (from, payload) {
            (Endpoint::Cc(n), Payload::Request { addr, .. }) => (n, EventKind::SelfRequest { addr }),
            (Endpoint::Server(n), Payload::Request { addr, bits, .. }) => {
                (n, EventKind::Request { from: n, to, addr, bits })
            }
            (Endpoint::Server(n), Payload::Reply { bit, .. }) => (n, EventKind::Reply { from: n, to, bit }),
            (Endpoint::Server(n), Payload::Fault { .. }) => (n, EventKind::RoutingError { addr: 0 }),
            (Endpoint::External, Payload::Request { addr, bits, .. }) => {
                (to, EventKind::Request { from: to, to, addr, bits })
            }
            (from, payload) => {
                let _ = (from, payload);
                (to, EventKind::Reboot)
            }
        };
        sink.record(&Event { tick: now, node, kind });
        self.stats.events += 1;
        self.queue.insert((msg.delivery, seq), msg);
    }

    fn deliver_due(&mut self, now: u64) {
        let due: Vec<(u64, u64)> =
            self.queue.range((now, 0)..=(now, u64::MAX)).map(|(&k, _)| k).collect();
        for key in due {
            let msg = self.queue.remove(&key).unwrap();
            debug_assert_eq!((msg.delivery, msg.seq), key);
            debug_assert!(msg.delivery >= msg.issued);
            self.nodes[msg.to].inbox.push_back(msg);
        }
    }

    /// One BitServer step: process the oldest message, if any.
    fn server_step(&mut self, id: usize, now: u64, sink: &mut dyn EventSink) {
        let msg = match self.nodes[id].inbox.pop_front() {
            Some(m) => m,
            None => return,
        };
        let info = &self.forest.nodes[id];
        match msg.payload {
            Payload::Request { addr, bits, rid } => {
                let expected_bits = info.rank + 1;
                let pos = info.aligned_lo + addr as i64;
                let in_zone = bits == expected_bits
                    && addr < (1u64 << bits)
                    && pos >= info.lo as i64
                    && pos < info.hi as i64;
                if !in_zone {
                    sink.record(&Event { tick: now, node: id, kind: EventKind::RoutingError { addr } });
                    self.stats.events += 1;
                    self.reply_to(now, id, msg.from, Payload::Fault { rid }, sink);
                    return;
                }
                if info.rank == 1 {
                    let bit = self.forest.input[pos as usize];
                    self.reply_to(now, id, msg.from, Payload::Reply { rid, bit }, sink);
                } else {
                    // Route by the most significant address bit.
                    let msb = ((addr >> (bits - 1)) & 1) as usize;
                    let child = info.children[msb];
                    match child {
                        Some(c) => {
                            let sub_rid = self.next_rid;
                            self.next_rid += 1;
                            self.nodes[id].pending.insert(sub_rid, (msg.from, rid));
                            let sub_addr = addr & ((1u64 << (bits - 1)) - 1);
                            let delay = edge_delay(info.rank);
                            self.send(
                                now,
                                Endpoint::Server(id),
                                c,
                                Payload::Request { addr: sub_addr, bits: bits - 1, rid: sub_rid },
                                delay,
                                sink,
                            );
                        }
                        None => {
                            sink.record(&Event { tick: now, node: id, kind: EventKind::RoutingError { addr } });
                            self.stats.events += 1;
                            self.reply_to(now, id, msg.from, Payload::Fault { rid }, sink);
                        }
                    }
                }
            }
            Payload::Reply { rid, bit } => {
                if let Some((orig, orig_rid)) = self.nodes[id].pending.remove(&rid) {
                    self.reply_to(now, id, orig, Payload::Reply { rid: orig_rid, bit }, sink);
                }
            }
            Payload::Fault { rid } => {
                if let Some((orig, orig_rid)) = self.nodes[id].pending.remove(&rid) {
                    self.reply_to(now, id, orig, Payload::Fault { rid: orig_rid }, sink);
                }
            }
        }
    }

    fn reply_to(&mut self, now: u64, from: usize, to: Endpoint, payload: Payload, sink: &mut dyn EventSink) {
        match to {
            Endpoint::Server(n) => {
                // Upward edge: the delay of the edge between n and its child.
                let delay = edge_delay(self.forest.nodes[n].rank);
                self.send(now, Endpoint::Server(from), n, payload, delay, sink);
            }
            Endpoint::Cc(n) => {
                debug_assert_eq!(n, from);
                let cc = &mut self.nodes[n].cc;
                cc.reply = Some(match payload {
                    Payload::Reply { bit, .. } => Ok(bit),
                    _ => Err(()),
                });
                cc.awaiting = false;
                // Transaction round trip, accounted at the requesting rank.
                let rank = self.forest.nodes[n].rank;
                let rt = now - cc.issue_tick;
                let entry = self.stats.per_rank.entry(rank).or_default();
                entry.transactions += 1;
                entry.max_round_trip = entry.max_round_trip.max(rt);
            }
            Endpoint::External => {
                if let Payload::Reply { bit, .. } = payload {
                    self.external_reply = Some((now, bit));
                }
            }
        }
    }

    /// One ComplexityCheck step.
    fn cc_step(&mut self, id: usize, now: u64, sink: &mut dyn EventSink) {
        let idx = match self.idx {
            Some(i) => i,
            None => return,
        };
        let info = &self.forest.nodes[id];
        let zone_width = info.hi - info.lo;
        let cap_bits = info.budget_cells as usize * 8;
        let params = self.cfg.params;
        let cc = &mut self.nodes[id].cc;
        match cc.phase.clone() {
            CcPhase::Done => {}
            CcPhase::Enumerating => {
                if cc.cursor >= idx.len() {
                    if !cc.exhausted_reported {
                        cc.exhausted_reported = true;
                        sink.record(&Event { tick: now, node: id, kind: EventKind::CursorExhausted });
                        self.stats.events += 1;
                    }
                    return;
                }
                let (x, k) = idx.output(cc.cursor);
                cc.cursor += 1;
                self.stats.cursor_max = self.stats.cursor_max.max(cc.cursor);
                let len = x.len();
                if params.is_forbidden(len, Bound::Finite(k)) && len <= cap_bits && len <= zone_width {
                    cc.phase = CcPhase::Scanning { target: cc.cursor - 1, pos: 0, bit: 0 };
                }
            }
            CcPhase::Scanning { target, pos, bit } => {
                let (x, _) = idx.output(target);
                let len = x.len();
                if cc.awaiting {
                    return;
                }
                if let Some(reply) = cc.reply.take() {
                    match reply {
                        Ok(b) if b == x.get(bit) => {
                            if bit + 1 == len {
                                // Full match: the tiling is impossible.
                                let position = info.lo + pos;
                                self.verdict = Some((info.rank, now, x.clone(), position));
                                sink.record(&Event {
                                    tick: now,
                                    node: id,
                                    kind: EventKind::Detect { rank: info.rank, position },
                                });
                                self.stats.events += 1;
                                cc.phase = CcPhase::Done;
                                return;
                            }
                            cc.phase = CcPhase::Scanning { target, pos, bit: bit + 1 };
                        }
                        _ => {
                            if pos + 1 + len > zone_width {
                                cc.phase = CcPhase::Enumerating;
                                return;
                            }
                            cc.phase = CcPhase::Scanning { target, pos: pos + 1, bit: 0 };
                        }
                    }
                    return;
                }
                // Issue the request for the current bit through our own
                // BitServer.
                let global = info.lo + pos + bit;
                let addr = (global as i64 - info.aligned_lo) as u64;
                cc.awaiting = true;
                cc.issue_tick = now;
                let rid = self.next_rid;
                self.next_rid += 1;
                self.send(
                    now,
                    Endpoint::Cc(id),
                    id,
                    Payload::Request { addr, bits: info.rank + 1, rid },
                    1,
                    sink,
                );
            }
        }
    }

    fn budget_check(&mut self, id: usize, now: u64, sink: &mut dyn EventSink) {
        let info = &self.forest.nodes[id];
        let st = &self.nodes[id];
        let addr_bits = (info.rank + 1) as u64;
        let mut used: u64 = st.inbox.len() as u64 * (addr_bits + 1) + st.pending.len() as u64;
        if let CcPhase::Scanning { target, .. } = st.cc.phase {
            if let Some(idx) = self.idx {
                used += idx.output(target).0.len() as u64 + 2 * (info.rank as u64 + 1);
            }
        }
        let budget_bits = info.budget_cells as u64 * CELL_BITS as u64;
        if used > budget_bits {
            self.stats.budget_violations += 1;
            sink.record(&Event {
                tick: now,
                node: id,
                kind: EventKind::BudgetViolation { used_bits: used, budget_bits },
            });
            self.stats.events += 1;
        }
    }

    fn run(&mut self, sink: &mut dyn EventSink) -> SimOutcome {
        let mut tick = 0u64;
        while tick < self.cfg.max_ticks {
            self.deliver_due(tick);
            for id in 0..self.forest.nodes.len() {
                // Optional polynomial restart of the enumeration cursor.
                if let Some(pr) = self.cfg.poly_reboot {
                    let info = &self.forest.nodes[id];
                    let zone = (info.hi - info.lo) as u64;
                    let period = pr.coeff.saturating_mul(zone.saturating_pow(pr.exponent)).max(1);
                    if tick > 0 && tick % period == 0 {
                        let cc = &mut self.nodes[id].cc;
                        if !matches!(cc.phase, CcPhase::Done) {
                            cc.cursor = 0;
                            cc.phase = CcPhase::Enumerating;
                            if !cc.awaiting {
                                cc.reply = None;
                            }
                            sink.record(&Event { tick, node: id, kind: EventKind::Reboot });
                            self.stats.events += 1;
                        }
                    }
                }
                let step = self.nodes[id].step;
                self.nodes[id].step += 1;
                if step % 2 == 0 {
                    self.server_step(id, tick, sink);
                } else {
                    self.cc_step(id, tick, sink);
                }
                self.budget_check(id, tick, sink);
            }
            if self.verdict.is_some() {
                tick += 1;
                break;
            }
            tick += 1;
        }
        let verdict = match self.verdict.take() {
            Some((rank, t, string, position)) => Verdict::Impossible { rank, tick: t, string, position },
            None => Verdict::Consistent,
        };
        SimOutcome { verdict, ticks: tick, stats: self.stats.clone() }
    }
}

/// Runs the hierarchical check over the window.
pub fn run(
    forest: &Forest,
    cfg: SimConfig,
    idx: &KolmoIndex,
    sink: &mut dyn EventSink,
) -> SimOutcome {
    let mut engine = Engine::new(forest, cfg, Some(idx));
    engine.run(sink)
}

/// Routes one external bit query through the message system of an otherwise
/// idle forest and reports the answered bit and the measured round trip.
pub fn query_bit(forest: &Forest, node: usize, addr: u64) -> Result<(u8, u64), HierError> {
    if node >= forest.nodes.len() {
        return Err(HierError::UnknownNode(node));
    }
    let info = &forest.nodes[node];
    let bits = info.rank + 1;
    let pos = info.aligned_lo + addr as i64;
    if addr >= (1u64 << bits) || pos < info.lo as i64 || pos >= info.hi as i64 {
        return Err(HierError::AddressOutOfRange { addr, bits });
    }
    let params = KolmoParams::new(1, 2, 8, 0);
    let cfg = SimConfig { params, max_ticks: 1 << 20, poly_reboot: None };
    let mut engine = Engine::new(forest, cfg, None);
    let rid = engine.next_rid;
    engine.next_rid += 1;
    let mut sink = NullSink;
    engine.send(0, Endpoint::External, node, Payload::Request { addr, bits, rid }, 0, &mut sink);
    let mut tick = 0u64;
    while tick < cfg.max_ticks {
        engine.deliver_due(tick);
        for id in 0..forest.nodes.len() {
            let step = engine.nodes[id].step;
            engine.nodes[id].step += 1;
            if step % 2 == 0 {
                engine.server_step(id, tick, &mut sink);
            }
        }
        if let Some((t, bit)) = engine.external_reply {
            return Ok((bit, t));
        }
        tick += 1;
    }
    Err(HierError::NoReply)
}

/// Per-rank latency lines plus the polynomial detection-latency check.
#[derive(Clone, Debug)]
pub struct DelayReport {
    pub per_rank: BTreeMap<u8, RankStats>,
    pub detection: Option<(u8, u64)>,
    pub detection_bound_ok: Option<bool>,
}

pub fn delay_report(forest: &Forest, outcome: &SimOutcome, coeff: u64, exponent: u32) -> DelayReport {
    let detection = match &outcome.verdict {
        Verdict::Impossible { rank, tick, .. } => Some((*rank, *tick)),
        Verdict::Consistent => None,
    };
    let detection_bound_ok = detection.map(|(rank, tick)| {
        let zone = forest
            .nodes_at_rank(rank)
            .map(|n| (n.hi - n.lo) as u64)
            .max()
            .unwrap_or(1);
        tick <= coeff.saturating_mul(zone.saturating_pow(exponent))
    });
    DelayReport { per_rank: outcome.stats.per_rank.clone(), detection, detection_bound_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kolmo::{build_index, build_block_sequence};

    fn flat_choices(r: u8) -> ChoiceSequence {
        ChoiceSequence::new(r, 0, 0)
    }

    #[test]
    fn forest_shape_is_binary() {
        let r = 4u8;
        let input = alloc::vec![0u8; 1 << (r + 1)];
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        assert_eq!(f.roots.len(), 1);
        for k in 1..=r {
            let count = f.nodes_at_rank(k).count();
            assert_eq!(count, 1usize << (r - k), "rank {}", k);
            for n in f.nodes_at_rank(k) {
                assert_eq!(n.hi - n.lo, 1usize << (k + 1));
                if k > 1 {
                    let (a, b) = (n.children[0].unwrap(), n.children[1].unwrap());
                    let ca = &f.nodes[a];
                    let cb = &f.nodes[b];
                    assert_eq!((ca.lo, cb.hi), (n.lo, n.hi));
                    assert_eq!(ca.hi, cb.lo);
                }
            }
        }
    }

    #[test]
    fn degenerate_choice_splits_into_two_trees() {
        let r = 4u8;
        // offset 6: separating line inside the 32-bit window.
        let ch = ChoiceSequence::new(r, 0b0011, 0);
        assert_eq!(ch.offset_x(), 6);
        let input = alloc::vec![0u8; 1 << (r + 1)];
        let f = build_forest(&ch, r, &input).unwrap();
        assert_eq!(f.separator, Some(6));
        assert_eq!(f.roots.len(), 2);
        let (a, b) = (&f.nodes[f.roots[0]], &f.nodes[f.roots[1]]);
        assert_eq!((a.lo, a.hi), (0, 6));
        assert_eq!((b.lo, b.hi), (6, 32));
    }

    #[test]
    fn query_bit_matches_direct_lookup() {
        let r = 5u8;
        let width = 1usize << (r + 1);
        let mut input = alloc::vec![0u8; width];
        let mut seed = 42u64;
        for b in input.iter_mut() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *b = ((seed >> 33) & 1) as u8;
        }
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let root = f.roots[0];
        // The MSB picks the child: address 10..0 is the right child's first
        // bit.
        let half = 1u64 << r;
        let (bit, _) = query_bit(&f, root, half).unwrap();
        assert_eq!(bit, input[half as usize]);
        let (bit, _) = query_bit(&f, root, 0).unwrap();
        assert_eq!(bit, input[0]);
        // Random addresses across all nodes.
        for trial in 0..1000u64 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let node = (seed >> 13) as usize % f.nodes.len();
            let info = &f.nodes[node];
            let span = (info.hi - info.lo) as u64;
            let addr = (info.lo as u64 - info.aligned_lo as u64) + (seed >> 33) % span;
            let (bit, rt) = query_bit(&f, node, addr).unwrap();
            let pos = (info.aligned_lo + addr as i64) as usize;
            assert_eq!(bit, input[pos], "trial {} node {} addr {}", trial, node, addr);
            // Round trip bounded by four times the delay sum along the path.
            let mut bound = 4u64;
            for k in 2..=info.rank {
                bound += 4 * edge_delay(k);
            }
            let _ = bound;
            assert!(rt <= bound + 4 * info.rank as u64, "rt {} bound {}", rt, bound);
        }
    }

    #[test]
    fn out_of_zone_query_is_an_error() {
        let r = 3u8;
        let input = alloc::vec![1u8; 1 << (r + 1)];
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let leaf = f.nodes.iter().find(|n| n.rank == 1 && n.lo > 0).unwrap();
        assert!(matches!(
            query_bit(&f, leaf.id, 7),
            Err(HierError::AddressOutOfRange { .. })
        ));
    }

    fn planted_input(width: usize, at: usize, run: usize) -> alloc::vec::Vec<u8> {
        // Complex-ish background with a planted run of zeros flanked by
        // ones.
        let mut input = alloc::vec![0u8; width];
        let mut seed = 0x5eedu64;
        for (i, b) in input.iter_mut().enumerate() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *b = if i % 8 == 7 { 1 } else { ((seed >> 40) & 1) as u8 };
        }
        for i in 0..run {
            input[at + i] = 0;
        }
        if at > 0 {
            input[at - 1] = 1;
        }
        if at + run < width {
            input[at + run] = 1;
        }
        input
    }

    #[test]
    fn planted_zero_run_is_detected_at_the_minimal_covering_rank() {
        let idx = build_index(12, 10_000).unwrap();
        let r = 5u8;
        let width = 1usize << (r + 1);
        let params = KolmoParams::new(1, 2, 8, 0);
        let cfg = SimConfig { params, max_ticks: 200_000, poly_reboot: None };
        for at in [3usize, 16, 21, 40] {
            let input = planted_input(width, at, 16);
            let f = build_forest(&flat_choices(r), r, &input).unwrap();
            let outcome = run(&f, cfg, &idx, &mut NullSink);
            match &outcome.verdict {
                Verdict::Impossible { rank, position, string, .. } => {
                    assert_eq!(*position, at, "plant at {}", at);
                    assert_eq!(string.len(), 16);
                    assert!(string.iter().all(|b| b == 0));
                    let expect = f.min_covering_rank(0, at, 16).unwrap();
                    assert_eq!(*rank, expect, "plant at {}", at);
                }
                v => panic!("plant at {}: unexpected verdict {:?}", at, v),
            }
        }
    }

    #[test]
    fn block_sequence_input_stays_consistent() {
        let idx = build_index(14, 10_000).unwrap();
        let r = 4u8;
        let width = 1usize << (r + 1);
        let params = KolmoParams::new(1, 4, 8, 8);
        let seq = build_block_sequence(&params, width, &idx).unwrap();
        let input: Vec<u8> = seq.iter().collect();
        // Pre-check with the direct scan: nothing in the window is
        // forbidden.
        let scan = crate::kolmo::min_substring_complexity(&seq, &idx);
        for (len, min) in &scan {
            assert!(
                !params.is_forbidden(*len, *min),
                "substring of length {} already forbidden",
                len
            );
        }
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let cfg = SimConfig { params, max_ticks: 50_000, poly_reboot: None };
        let outcome = run(&f, cfg, &idx, &mut NullSink);
        assert_eq!(outcome.verdict, Verdict::Consistent);
        assert_eq!(outcome.stats.budget_violations, 0);
    }

    #[test]
    fn event_stream_is_deterministic() {
        let idx = build_index(12, 10_000).unwrap();
        let r = 4u8;
        let width = 1usize << (r + 1);
        let input = planted_input(width, 9, 16);
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let params = KolmoParams::new(1, 2, 8, 0);
        let cfg = SimConfig { params, max_ticks: 100_000, poly_reboot: None };
        let mut hashes = Vec::new();
        for _ in 0..3 {
            let mut sink = HashSink::new();
            let outcome = run(&f, cfg, &idx, &mut sink);
            hashes.push((sink.hash, sink.count, outcome.ticks));
        }
        assert_eq!(hashes[0], hashes[1]);
        assert_eq!(hashes[1], hashes[2]);
    }

    #[test]
    fn straddling_runs_are_checked_per_component() {
        let idx = build_index(12, 10_000).unwrap();
        let r = 4u8;
        let width = 1usize << (r + 1);
        let params = KolmoParams::new(1, 2, 8, 0);
        let cfg = SimConfig { params, max_ticks: 200_000, poly_reboot: None };
        // Separator at 8: zero-run straddling positions 0..16 is split into
        // two 8-bit halves, neither forbidden on its own.
        let ch = ChoiceSequence::new(r, 0b0100, 0);
        assert_eq!(ch.offset_x(), 8);
        let mut input = planted_input(width, 0, 16);
        input[16] = 1;
        let f = build_forest(&ch, r, &input).unwrap();
        assert_eq!(f.roots.len(), 2);
        let outcome = run(&f, cfg, &idx, &mut NullSink);
        assert_eq!(outcome.verdict, Verdict::Consistent, "split halves are not forbidden");
        // The same run wholly inside one component is detected.
        let input = planted_input(width, 10, 16);
        let f = build_forest(&ch, r, &input).unwrap();
        let outcome = run(&f, cfg, &idx, &mut NullSink);
        assert!(matches!(outcome.verdict, Verdict::Impossible { position: 10, .. }));
    }

    #[test]
    fn poly_reboot_still_detects() {
        let idx = build_index(12, 10_000).unwrap();
        let r = 4u8;
        let width = 1usize << (r + 1);
        let input = planted_input(width, 8, 16);
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let params = KolmoParams::new(1, 2, 8, 0);
        let cfg = SimConfig {
            params,
            max_ticks: 400_000,
            poly_reboot: Some(PolyReboot { coeff: 2, exponent: 2 }),
        };
        let outcome = run(&f, cfg, &idx, &mut NullSink);
        assert!(matches!(outcome.verdict, Verdict::Impossible { position: 8, .. }));
    }

    #[test]
    fn delay_report_bounds_detection() {
        let idx = build_index(12, 10_000).unwrap();
        let r = 4u8;
        let width = 1usize << (r + 1);
        let input = planted_input(width, 0, 16);
        let f = build_forest(&flat_choices(r), r, &input).unwrap();
        let params = KolmoParams::new(1, 2, 8, 0);
        let cfg = SimConfig { params, max_ticks: 400_000, poly_reboot: None };
        let outcome = run(&f, cfg, &idx, &mut NullSink);
        let report = delay_report(&f, &outcome, 4, 3);
        assert_eq!(report.detection_bound_ok, Some(true));
        assert!(!report.per_rank.is_empty());
        // Empty run: empty stats.
        let cfg0 = SimConfig { params, max_ticks: 0, poly_reboot: None };
        let outcome0 = run(&f, cfg0, &idx, &mut NullSink);
        let report0 = delay_report(&f, &outcome0, 4, 3);
        assert!(report0.per_rank.is_empty());
        assert_eq!(report0.detection, None);
    }
}
