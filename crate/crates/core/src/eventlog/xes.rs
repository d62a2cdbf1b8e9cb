//! Reading and writing the control-flow subset of XES (IEEE 1849-2016).
//!
//! Only `<trace>`/`<event>` structure and the event-level
//! `<string key="concept:name" value="..."/>` attribute are interpreted;
//! everything else is skipped.

use std::io::{Read, Write};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};

use super::{Activity, EventLog, Trace};
use crate::{Error, Result};

const CONCEPT_NAME: &[u8] = b"concept:name";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Elem {
    Trace,
    Event,
    Other,
}

fn line_of(doc: &[u8], pos: usize) -> usize {
    1 + doc[..pos.min(doc.len())].iter().filter(|&&b| b == b'\n').count()
}

/// Parses an XES document into a variant-compressed log.
pub fn parse_xes<R: Read>(mut input: R) -> Result<EventLog> {
    let mut doc = Vec::new();
    input.read_to_end(&mut doc)?;
    parse_xes_bytes(&doc)
}

fn parse_xes_bytes(doc: &[u8]) -> Result<EventLog> {
    let mut reader = Reader::from_reader(doc);
    let mut buf = Vec::new();

    let mut stack: Vec<Elem> = Vec::new();
    let mut log = EventLog::new();
    let mut trace_index = 0usize;
    let mut current: Option<Trace> = None;
    let mut event_label: Option<Activity> = None;

    let xml_err = |reader: &Reader<&[u8]>, message: String| Error::Xml {
        line: line_of(doc, reader.buffer_position() as usize),
        message,
    };

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                let kind = match e.local_name().as_ref() {
                    b"trace" if current.is_none() => Elem::Trace,
                    b"event" if current.is_some() && stack.last() == Some(&Elem::Trace) => Elem::Event,
                    _ => Elem::Other,
                };
                match kind {
                    Elem::Trace => current = Some(Trace::empty()),
                    Elem::Event => event_label = None,
                    Elem::Other => {
                        if stack.last() == Some(&Elem::Event) && e.local_name().as_ref() == b"string" {
                            if let Some(label) = concept_name(e).map_err(|m| xml_err(&reader, m))? {
                                event_label = Some(Activity::new(label));
                            }
                        }
                    }
                }
                if empty {
                    close(kind, &mut current, &mut event_label, &mut log, &mut trace_index)?;
                } else {
                    stack.push(kind);
                }
            }
            Event::End(_) => {
                let kind = stack
                    .pop()
                    .ok_or_else(|| xml_err(&reader, "unbalanced closing tag".into()))?;
                close(kind, &mut current, &mut event_label, &mut log, &mut trace_index)?;
            }
            Event::Eof => {
                if !stack.is_empty() {
                    return Err(xml_err(&reader, "unexpected end of document".into()));
                }
                break;
            }
            _ => {}
        }
        buf.clear();
    }
    Ok(log)
}

fn close(
    kind: Elem,
    current: &mut Option<Trace>,
    event_label: &mut Option<Activity>,
    log: &mut EventLog,
    trace_index: &mut usize,
) -> Result<()> {
    match kind {
        Elem::Event => {
            let label = event_label
                .take()
                .ok_or(Error::MissingActivity { trace: *trace_index })?;
            if let Some(t) = current.as_mut() {
                t.push(label);
            }
        }
        Elem::Trace => {
            if let Some(t) = current.take() {
                log.push(t);
            }
            *trace_index += 1;
        }
        Elem::Other => {}
    }
    Ok(())
}

fn concept_name(e: &BytesStart<'_>) -> std::result::Result<Option<String>, String> {
    let mut is_name = false;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        match attr.key.as_ref() {
            b"key" => is_name = attr.value.as_ref() == CONCEPT_NAME,
            b"value" => value = Some(attr.unescape_value().map_err(|e| e.to_string())?.into_owned()),
            _ => {}
        }
    }
    Ok(if is_name { value } else { None })
}

/// Writes the log as XES, one `<trace>` per occurrence. Variants appear in
/// [`EventLog::variants`] order and cases are named `case_0`, `case_1`, ...
pub fn write_xes<W: Write>(log: &EventLog, out: W) -> Result<()> {
    let mut w = Writer::new_with_indent(out, b' ', 2);
    let io = |e: std::io::Error| Error::Io(e);

    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None))).map_err(io)?;
    let mut root = BytesStart::new("log");
    root.push_attribute(("xes.version", "1849-2016"));
    root.push_attribute(("xes.features", ""));
    root.push_attribute(("xmlns", "http://www.xes-standard.org/"));
    w.write_event(Event::Start(root)).map_err(io)?;

    let mut ext = BytesStart::new("extension");
    ext.push_attribute(("name", "Concept"));
    ext.push_attribute(("prefix", "concept"));
    ext.push_attribute(("uri", "http://www.xes-standard.org/concept.xesext"));
    w.write_event(Event::Empty(ext)).map_err(io)?;

    let mut case = 0u64;
    for (trace, count) in log.variants() {
        for _ in 0..count {
            w.write_event(Event::Start(BytesStart::new("trace"))).map_err(io)?;
            write_name(&mut w, &format!("case_{case}")).map_err(io)?;
            for a in trace.iter() {
                w.write_event(Event::Start(BytesStart::new("event"))).map_err(io)?;
                write_name(&mut w, a.as_str()).map_err(io)?;
                w.write_event(Event::End(BytesEnd::new("event"))).map_err(io)?;
            }
            w.write_event(Event::End(BytesEnd::new("trace"))).map_err(io)?;
            case += 1;
        }
    }
    w.write_event(Event::End(BytesEnd::new("log"))).map_err(io)?;
    w.into_inner().write_all(b"\n")?;
    Ok(())
}

fn write_name<W: Write>(w: &mut Writer<W>, value: &str) -> std::io::Result<()> {
    let mut s = BytesStart::new("string");
    s.push_attribute(("key", "concept:name"));
    s.push_attribute(("value", value));
    w.write_event(Event::Empty(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Trace {
        Trace::from_labels(s.chars().map(|c| c.to_string()))
    }

    fn doc(traces: &[&str]) -> String {
        let mut s = String::from("<?xml version=\"1.0\"?>\n<log>\n");
        for tr in traces {
            s.push_str("<trace><string key=\"concept:name\" value=\"case\"/>\n");
            for c in tr.chars() {
                s.push_str(&format!("<event><string key=\"concept:name\" value=\"{c}\"/><date key=\"time:timestamp\" value=\"2020-01-01T00:00:00\"/></event>\n"));
            }
            s.push_str("</trace>\n");
        }
        s.push_str("</log>\n");
        s
    }

    #[test]
    fn merges_identical_traces() {
        let log = parse_xes(doc(&["ab", "ab", "ac"]).as_bytes()).unwrap();
        assert_eq!(log.variants(), vec![(t("ab"), 2), (t("ac"), 1)]);
        assert_eq!(log.total_traces(), 3);
    }

    #[test]
    fn empty_log_and_empty_trace() {
        let log = parse_xes(doc(&[]).as_bytes()).unwrap();
        assert!(log.is_empty());
        let log = parse_xes(doc(&[""]).as_bytes()).unwrap();
        assert_eq!(log.variants(), vec![(Trace::empty(), 1)]);
        let log = parse_xes("<log><trace/></log>".as_bytes()).unwrap();
        assert_eq!(log.variants(), vec![(Trace::empty(), 1)]);
    }

    #[test]
    fn event_without_name_names_trace_index() {
        let xml = "<log><trace><event><string key=\"concept:name\" value=\"a\"/></event></trace>\
                   <trace><event><string key=\"org:resource\" value=\"bob\"/></event></trace></log>";
        match parse_xes(xml.as_bytes()) {
            Err(Error::MissingActivity { trace }) => assert_eq!(trace, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_xml_reports_line() {
        let xml = "<log>\n<trace>\n<event>\n</trace>\n</log>";
        match parse_xes(xml.as_bytes()) {
            Err(Error::Xml { line, .. }) => assert!(line >= 3, "line {line}"),
            other => panic!("unexpected {other:?}"),
        }
        let truncated = "<log>\n<trace>\n";
        assert!(matches!(parse_xes(truncated.as_bytes()), Err(Error::Xml { .. })));
    }

    #[test]
    fn nested_attributes_do_not_leak_into_labels() {
        let xml = r#"<log><trace><event>
              <container key="meta"><string key="concept:name" value="inner"/></container>
              <string key="concept:name" value="a"/>
            </event></trace></log>"#;
        let log = parse_xes(xml.as_bytes()).unwrap();
        assert_eq!(log.variants(), vec![(t("a"), 1)]);
    }

    #[test]
    fn escaped_labels_round_trip() {
        let log = EventLog::from_traces([(Trace::from_labels(["a & b", "<c>", "\"q\""]), 2)]);
        let mut out = Vec::new();
        write_xes(&log, &mut out).unwrap();
        assert_eq!(parse_xes(out.as_slice()).unwrap(), log);
    }
}
