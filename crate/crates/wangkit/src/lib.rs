//! IO companion for the `wangkit-core` algorithms: text file formats,
//! renderers, and event-log serialization. The `wangkit` binary wires these
//! into a command line.

pub mod formats;
pub mod render;

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use wangkit_core::hierarchy::{Event, EventKind, EventSink};

#[derive(Serialize)]
struct EventRecord<'a> {
    tick: u64,
    node: usize,
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    addr: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bit: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
}

fn record_of(e: &Event) -> EventRecord<'static> {
    let mut r = EventRecord {
        tick: e.tick,
        node: e.node,
        kind: "",
        to: None,
        addr: None,
        bit: None,
        rank: None,
        position: None,
    };
    match e.kind {
        EventKind::Request { to, addr, .. } => {
            r.kind = "request";
            r.to = Some(to);
            r.addr = Some(addr);
        }
        EventKind::Reply { to, bit, .. } => {
            r.kind = "reply";
            r.to = Some(to);
            r.bit = Some(bit);
        }
        EventKind::SelfRequest { addr } => {
            r.kind = "self_request";
            r.addr = Some(addr);
        }
        EventKind::Detect { rank, position } => {
            r.kind = "detect";
            r.rank = Some(rank);
            r.position = Some(position);
        }
        EventKind::Reboot => r.kind = "reboot",
        EventKind::RoutingError { addr } => {
            r.kind = "routing_error";
            r.addr = Some(addr);
        }
        EventKind::BudgetViolation { .. } => r.kind = "budget_violation",
        EventKind::CursorExhausted => r.kind = "cursor_exhausted",
    }
    r
}

/// Streams events straight to a writer, one JSON object per line.
pub struct JsonlSink<W: Write> {
    writer: W,
    pub errors: usize,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(writer: W) -> Self {
        JsonlSink { writer, errors: 0 }
    }
}

impl<W: Write> EventSink for JsonlSink<W> {
    fn record(&mut self, e: &Event) {
        let rec = record_of(e);
        let ok = serde_json::to_writer(&mut self.writer, &rec).is_ok()
            && self.writer.write_all(b"\n").is_ok();
        if !ok {
            self.errors += 1;
        }
    }
}

/// Renders a batch of events as JSONL text.
pub fn events_to_jsonl(events: &[Event]) -> Result<String> {
    let mut out = Vec::new();
    {
        let mut sink = JsonlSink::new(&mut out);
        for e in events {
            sink.record(e);
        }
    }
    Ok(String::from_utf8(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_serialize_one_per_line() {
        let events = vec![
            Event { tick: 3, node: 1, kind: EventKind::SelfRequest { addr: 5 } },
            Event { tick: 4, node: 0, kind: EventKind::Detect { rank: 3, position: 9 } },
        ];
        let text = events_to_jsonl(&events).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("\"self_request\""));
        assert!(lines[1].contains("\"position\":9"));
    }
}
