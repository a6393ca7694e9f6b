//! NS-2 wireless trace line format: canonical writer and tolerant parser.
//!
//! The writer is byte-exact: the layer column is right-aligned to three
//! characters and the flags/reason column to four (which is where the two
//! spaces in `RTR  ---` come from), all other separators are single
//! spaces, times carry nine decimals and AODV lifetimes six. The parser
//! accepts any amount of whitespace between columns.

use std::fmt::Write as _;
use std::io::{self, Write};

use aodvsim_core::packet::{Addr, NodeId};
use aodvsim_core::trace::{
    AodvTraceInfo, IpInfo, MacInfo, TraceEvent, TraceLayer, TraceRecord,
};

/// A parse failure, pointing at the first offending column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceParseError {
    /// 1-based line number; 0 when parsing a bare line.
    pub line: usize,
    /// 1-based column (field) index.
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for TraceParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: column {}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "column {}: {}", self.column, self.message)
        }
    }
}

impl std::error::Error for TraceParseError {}

fn err(column: usize, message: impl Into<String>) -> TraceParseError {
    TraceParseError {
        line: 0,
        column,
        message: message.into(),
    }
}

/// Renders one record as a single trace line (no trailing newline).
pub fn format_record(rec: &TraceRecord) -> String {
    let mut out = String::new();
    let why = rec.reason.as_deref().unwrap_or("---");
    write!(
        out,
        "{} {:.9} _{}_ {:>3} {:>4} {} {} {} [{:x} {:x} {:x} {:x}] ------- [{}:{} {}:{} {} {}]",
        rec.event.symbol(),
        rec.time,
        rec.node,
        rec.layer.name(),
        why,
        rec.seq,
        rec.ptype,
        rec.size,
        rec.mac.duration,
        rec.mac.dst_mac,
        rec.mac.src_mac,
        rec.mac.ethertype,
        rec.ip.src,
        rec.ip.sport,
        rec.ip.dst,
        rec.ip.dport,
        rec.ip.ttl,
        rec.ip.nexthop,
    )
    .expect("writing to a String");
    if let Some(info) = &rec.aodv {
        out.push(' ');
        format_aodv_info(&mut out, info);
    }
    if let Some(label) = &rec.label {
        write!(out, " ({})", label).expect("writing to a String");
    }
    out
}

fn format_aodv_info(out: &mut String, info: &AodvTraceInfo) {
    match info {
        AodvTraceInfo::Hello {
            hop_count,
            rpdst,
            rpseq,
            lifetime,
        } => {
            write!(out, "[0x1 {} [{} {}] {:.6}]", hop_count, rpdst, rpseq, lifetime)
        }
        AodvTraceInfo::Request {
            hop_count,
            bcast_id,
            dst,
            dst_seqno,
            src,
            src_seqno,
        } => {
            write!(
                out,
                "[0x2 {} {} [{} {}] [{} {}]]",
                hop_count, bcast_id, dst, dst_seqno, src, src_seqno
            )
        }
        AodvTraceInfo::Reply {
            hop_count,
            rpdst,
            rpseq,
            lifetime,
        } => {
            write!(out, "[0x4 {} [{} {}] {:.6}]", hop_count, rpdst, rpseq, lifetime)
        }
        AodvTraceInfo::Error { dests } => {
            write!(out, "[0x8 {}", dests.len()).expect("writing to a String");
            for (dst, seq) in dests {
                write!(out, " [{} {}]", dst, seq).expect("writing to a String");
            }
            write!(out, "]")
        }
    }
    .expect("writing to a String")
}

/// Splits a line into top-level tokens: plain words, `[...]` groups
/// (nesting allowed), and `(...)` groups.
fn split_tokens(line: &str) -> Result<Vec<&str>, TraceParseError> {
    let mut tokens = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match bytes[i] {
            b'[' | b'(' => {
                let (open, close) = if bytes[i] == b'[' { (b'[', b']') } else { (b'(', b')') };
                let mut depth = 0usize;
                loop {
                    if i >= bytes.len() {
                        return Err(err(
                            tokens.len() + 1,
                            "unterminated bracket group",
                        ));
                    }
                    if bytes[i] == open {
                        depth += 1;
                    } else if bytes[i] == close {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
            _ => {
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
            }
        }
        tokens.push(&line[start..i]);
    }
    Ok(tokens)
}

fn strip_group(tok: &str, open: char, close: char, column: usize) -> Result<&str, TraceParseError> {
    tok.strip_prefix(open)
        .and_then(|s| s.strip_suffix(close))
        .ok_or_else(|| err(column, format!("expected a {}...{} group, found `{}`", open, close, tok)))
}

fn parse_num<T: core::str::FromStr>(s: &str, column: usize, what: &str) -> Result<T, TraceParseError> {
    s.parse()
        .map_err(|_| err(column, format!("malformed {} `{}`", what, s)))
}

fn parse_hex(s: &str, column: usize) -> Result<u64, TraceParseError> {
    u64::from_str_radix(s, 16).map_err(|_| err(column, format!("malformed hex field `{}`", s)))
}

fn parse_addr(s: &str, column: usize) -> Result<Addr, TraceParseError> {
    if s == "-1" {
        return Ok(Addr::Broadcast);
    }
    let id: u16 = parse_num(s, column, "address")?;
    Ok(Addr::Node(NodeId(id)))
}

fn parse_node(s: &str, column: usize) -> Result<NodeId, TraceParseError> {
    Ok(NodeId(parse_num(s, column, "node id")?))
}

fn parse_addr_port(tok: &str, column: usize) -> Result<(Addr, u16), TraceParseError> {
    let (addr, port) = tok
        .rsplit_once(':')
        .ok_or_else(|| err(column, format!("expected addr:port, found `{}`", tok)))?;
    Ok((parse_addr(addr, column)?, parse_num(port, column, "port")?))
}

fn parse_pair(tok: &str, column: usize) -> Result<(NodeId, u32), TraceParseError> {
    let inner = strip_group(tok, '[', ']', column)?;
    let parts: Vec<&str> = inner.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(err(column, format!("expected [id seqno], found `{}`", tok)));
    }
    Ok((parse_node(parts[0], column)?, parse_num(parts[1], column, "seqno")?))
}

fn parse_aodv_info(tok: &str, column: usize) -> Result<AodvTraceInfo, TraceParseError> {
    let inner = strip_group(tok, '[', ']', column)?;
    let parts: Vec<&str> = split_tokens(inner)?
        .into_iter()
        .collect();
    if parts.is_empty() {
        return Err(err(column, "empty AODV group"));
    }
    match parts[0] {
        "0x1" | "0x4" => {
            if parts.len() != 4 {
                return Err(err(column, format!("expected [{} hop [dst seq] lifetime]", parts[0])));
            }
            let hop_count = parse_num(parts[1], column, "hop count")?;
            let (rpdst, rpseq) = parse_pair(parts[2], column)?;
            let lifetime = parse_num(parts[3], column, "lifetime")?;
            if parts[0] == "0x1" {
                Ok(AodvTraceInfo::Hello { hop_count, rpdst, rpseq, lifetime })
            } else {
                Ok(AodvTraceInfo::Reply { hop_count, rpdst, rpseq, lifetime })
            }
        }
        "0x2" => {
            if parts.len() != 5 {
                return Err(err(column, "expected [0x2 hop bid [dst seq] [src seq]]"));
            }
            let hop_count = parse_num(parts[1], column, "hop count")?;
            let bcast_id = parse_num(parts[2], column, "broadcast id")?;
            let (dst, dst_seqno) = parse_pair(parts[3], column)?;
            let (src, src_seqno) = parse_pair(parts[4], column)?;
            Ok(AodvTraceInfo::Request { hop_count, bcast_id, dst, dst_seqno, src, src_seqno })
        }
        "0x8" => {
            if parts.len() < 2 {
                return Err(err(column, "expected [0x8 count [dst seq] ...]"));
            }
            let count: usize = parse_num(parts[1], column, "destination count")?;
            let mut dests = Vec::new();
            for p in &parts[2..] {
                dests.push(parse_pair(p, column)?);
            }
            if dests.len() != count {
                return Err(err(
                    column,
                    format!("DestCount {} does not match {} listed pairs", count, dests.len()),
                ));
            }
            Ok(AodvTraceInfo::Error { dests })
        }
        other => Err(err(column, format!("unknown AODV type code `{}`", other))),
    }
}

/// Parses one trace line into a record.
pub fn parse_line(line: &str) -> Result<TraceRecord, TraceParseError> {
    let tokens = split_tokens(line)?;
    let need = |idx: usize| -> Result<&str, TraceParseError> {
        tokens
            .get(idx)
            .copied()
            .ok_or_else(|| err(idx + 1, "line truncated"))
    };

    let event_tok = need(0)?;
    let event = match event_tok.chars().next() {
        Some(c) if event_tok.len() == 1 => TraceEvent::from_symbol(c)
            .ok_or_else(|| err(1, format!("unknown event char `{}`", c)))?,
        _ => return Err(err(1, format!("unknown event char `{}`", event_tok))),
    };
    let time: f64 = parse_num(need(1)?, 2, "timestamp")?;
    let node_tok = need(2)?;
    let node_inner = node_tok
        .strip_prefix('_')
        .and_then(|s| s.strip_suffix('_'))
        .ok_or_else(|| err(3, format!("expected _node_, found `{}`", node_tok)))?;
    let node = parse_node(node_inner, 3)?;
    let layer_tok = need(3)?;
    let layer = TraceLayer::from_name(layer_tok)
        .ok_or_else(|| err(4, format!("unknown layer `{}`", layer_tok)))?;
    let why = need(4)?;
    let reason = if why == "---" {
        None
    } else {
        Some(why.to_string())
    };
    let seq: u64 = parse_num(need(5)?, 6, "sequence number")?;
    let ptype = need(6)?.to_string();
    let size: u32 = parse_num(need(7)?, 8, "packet size")?;

    let mac_inner = strip_group(need(8)?, '[', ']', 9)?;
    let mac_parts: Vec<&str> = mac_inner.split_whitespace().collect();
    if mac_parts.len() != 4 {
        return Err(err(9, "MAC group needs four fields"));
    }
    let mac = MacInfo {
        duration: parse_hex(mac_parts[0], 9)?,
        dst_mac: parse_hex(mac_parts[1], 9)?,
        src_mac: parse_hex(mac_parts[2], 9)?,
        ethertype: parse_hex(mac_parts[3], 9)?,
    };

    let ip_flags = need(9)?;
    if ip_flags != "-------" {
        return Err(err(10, format!("expected ------- flags, found `{}`", ip_flags)));
    }

    let ip_inner = strip_group(need(10)?, '[', ']', 11)?;
    let ip_parts: Vec<&str> = ip_inner.split_whitespace().collect();
    if ip_parts.len() != 4 {
        return Err(err(11, "IP group needs four fields"));
    }
    let (src, sport) = parse_addr_port(ip_parts[0], 11)?;
    let (dst, dport) = parse_addr_port(ip_parts[1], 11)?;
    let ip = IpInfo {
        src,
        sport,
        dst,
        dport,
        ttl: parse_num(ip_parts[2], 11, "ttl")?,
        nexthop: parse_num(ip_parts[3], 11, "nexthop")?,
    };

    let mut idx = 11;
    let mut aodv = None;
    if let Some(tok) = tokens.get(idx) {
        if tok.starts_with('[') {
            aodv = Some(parse_aodv_info(tok, idx + 1)?);
            idx += 1;
        }
    }
    let mut label = None;
    if let Some(tok) = tokens.get(idx) {
        let inner = strip_group(tok, '(', ')', idx + 1)?;
        label = Some(inner.to_string());
        idx += 1;
    }
    if idx < tokens.len() {
        return Err(err(idx + 1, format!("unexpected trailing token `{}`", tokens[idx])));
    }

    Ok(TraceRecord {
        event,
        time,
        node,
        layer,
        reason,
        seq,
        ptype,
        size,
        mac,
        ip,
        aodv,
        label,
    })
}

/// Writes records to `sink`, one line each, newline-terminated. Records
/// must be in non-decreasing time order; anything else is rejected
/// before a byte is written.
pub fn write_stream<W: Write>(records: &[TraceRecord], sink: &mut W) -> io::Result<()> {
    for pair in records.windows(2) {
        if pair[1].time < pair[0].time {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "trace records out of time order",
            ));
        }
    }
    let mut buf = String::new();
    for rec in records {
        buf.push_str(&format_record(rec));
        buf.push('\n');
    }
    sink.write_all(buf.as_bytes())?;
    sink.flush()
}

/// Parses a whole trace file, reporting the first bad line by number.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, TraceParseError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_line(line).map_err(|mut e| {
            e.line = i + 1;
            e
        })?;
        records.push(rec);
    }
    Ok(records)
}
