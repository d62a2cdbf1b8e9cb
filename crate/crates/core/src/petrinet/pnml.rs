//! PNML (place/transition subset) import and export.
//!
//! Layout written and understood:
//!
//! ```xml
//! <pnml>
//!   <net id="net1" type="http://www.pnml.org/version-2009/grammar/pnmlcoremodel">
//!     <name><text>NAME</text></name>
//!     <page id="page1">
//!       <place id="p0"><name><text>p0</text></name>
//!         <initialMarking><text>1</text></initialMarking></place>
//!       <transition id="t0"><name><text>a</text></name></transition>
//!       <transition id="t1"><name><text>tau</text></name>
//!         <toolspecific tool="ProM" version="6.4" activity="$invisible$"/></transition>
//!       <arc id="a0" source="p0" target="t0"/>
//!     </page>
//!     <finalmarkings>
//!       <marking><place idref="p1"><text>1</text></place></marking>
//!     </finalmarkings>
//!   </net>
//! </pnml>
//! ```
//!
//! A transition is silent iff it carries the `$invisible$` tool-specific
//! marker; its name is then ignored.

use std::collections::HashMap;
use std::io::{Read, Write};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use super::{Arc, PetriNet, PlaceId, TransitionId};
use crate::eventlog::Activity;
use crate::{Error, Result};

const INVISIBLE: &str = "$invisible$";
const NET_TYPE: &str = "http://www.pnml.org/version-2009/grammar/pnmlcoremodel";

/// Serializes the net as a PNML document.
pub fn export_pnml<W: Write>(net: &PetriNet, out: W) -> Result<()> {
    let mut w = Writer::new_with_indent(out, b' ', 2);
    write_doc(net, &mut w).map_err(Error::Io)?;
    w.into_inner().write_all(b"\n")?;
    Ok(())
}

fn text_elem<W: Write>(w: &mut Writer<W>, tag: &str, text: &str) -> std::io::Result<()> {
    w.write_event(Event::Start(BytesStart::new(tag)))?;
    w.write_event(Event::Start(BytesStart::new("text")))?;
    w.write_event(Event::Text(BytesText::new(text)))?;
    w.write_event(Event::End(BytesEnd::new("text")))?;
    w.write_event(Event::End(BytesEnd::new(tag)))
}

fn write_doc<W: Write>(net: &PetriNet, w: &mut Writer<W>) -> std::io::Result<()> {
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    w.write_event(Event::Start(BytesStart::new("pnml")))?;
    let mut n = BytesStart::new("net");
    n.push_attribute(("id", "net1"));
    n.push_attribute(("type", NET_TYPE));
    w.write_event(Event::Start(n))?;
    text_elem(w, "name", &net.name)?;

    let mut page = BytesStart::new("page");
    page.push_attribute(("id", "page1"));
    w.write_event(Event::Start(page))?;

    for (i, p) in net.places.iter().enumerate() {
        let mut e = BytesStart::new("place");
        e.push_attribute(("id", p.id.as_str()));
        w.write_event(Event::Start(e))?;
        text_elem(w, "name", &p.id)?;
        let tokens = net.initial.get(PlaceId(i));
        if tokens > 0 {
            text_elem(w, "initialMarking", &tokens.to_string())?;
        }
        w.write_event(Event::End(BytesEnd::new("place")))?;
    }

    for t in &net.transitions {
        let mut e = BytesStart::new("transition");
        e.push_attribute(("id", t.id.as_str()));
        w.write_event(Event::Start(e))?;
        match &t.label {
            Some(l) => text_elem(w, "name", l.as_str())?,
            None => {
                text_elem(w, "name", "tau")?;
                let mut ts = BytesStart::new("toolspecific");
                ts.push_attribute(("tool", "ProM"));
                ts.push_attribute(("version", "6.4"));
                ts.push_attribute(("activity", INVISIBLE));
                w.write_event(Event::Empty(ts))?;
            }
        }
        w.write_event(Event::End(BytesEnd::new("transition")))?;
    }

    for (i, arc) in net.arcs.iter().enumerate() {
        let (src, tgt) = match *arc {
            Arc::PlaceTransition(p, t) => (&net.places[p.0].id, &net.transitions[t.0].id),
            Arc::TransitionPlace(t, p) => (&net.transitions[t.0].id, &net.places[p.0].id),
        };
        let mut e = BytesStart::new("arc");
        let id = format!("arc{i}");
        e.push_attribute(("id", id.as_str()));
        e.push_attribute(("source", src.as_str()));
        e.push_attribute(("target", tgt.as_str()));
        w.write_event(Event::Empty(e))?;
    }
    w.write_event(Event::End(BytesEnd::new("page")))?;

    w.write_event(Event::Start(BytesStart::new("finalmarkings")))?;
    w.write_event(Event::Start(BytesStart::new("marking")))?;
    for (p, tokens) in net.final_marking.support() {
        let mut e = BytesStart::new("place");
        e.push_attribute(("idref", net.places[p.0].id.as_str()));
        w.write_event(Event::Start(e))?;
        w.write_event(Event::Start(BytesStart::new("text")))?;
        w.write_event(Event::Text(BytesText::new(&tokens.to_string())))?;
        w.write_event(Event::End(BytesEnd::new("text")))?;
        w.write_event(Event::End(BytesEnd::new("place")))?;
    }
    w.write_event(Event::End(BytesEnd::new("marking")))?;
    w.write_event(Event::End(BytesEnd::new("finalmarkings")))?;

    w.write_event(Event::End(BytesEnd::new("net")))?;
    w.write_event(Event::End(BytesEnd::new("pnml")))
}

#[derive(Default)]
struct RawPlace {
    id: String,
    initial: u32,
}

#[derive(Default)]
struct RawTransition {
    id: String,
    name: Option<String>,
    invisible: bool,
}

fn attr(e: &BytesStart<'_>, key: &[u8]) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|e| Error::Pnml(e.to_string()))?;
        if a.key.as_ref() == key {
            return Ok(Some(a.unescape_value().map_err(|e| Error::Pnml(e.to_string()))?.into_owned()));
        }
    }
    Ok(None)
}

fn required(e: &BytesStart<'_>, key: &str) -> Result<String> {
    attr(e, key.as_bytes())?.ok_or_else(|| {
        Error::Pnml(format!(
            "<{}> lacks attribute {key}",
            String::from_utf8_lossy(e.local_name().as_ref())
        ))
    })
}

fn parse_tokens(s: &str) -> Result<u32> {
    s.trim().parse().map_err(|_| Error::Pnml(format!("invalid token count {s:?}")))
}

/// Parses a PNML document produced by [`export_pnml`] (or a compatible tool).
/// Only the first `<net>` is read. Without a `finalmarkings` section the
/// final marking is empty.
pub fn import_pnml<R: Read>(mut input: R) -> Result<PetriNet> {
    let mut doc = Vec::new();
    input.read_to_end(&mut doc)?;
    let mut reader = Reader::from_reader(doc.as_slice());
    reader.config_mut().trim_text(true);

    let mut path: Vec<Vec<u8>> = Vec::new();
    let mut name = String::new();
    let mut places: Vec<RawPlace> = Vec::new();
    let mut transitions: Vec<RawTransition> = Vec::new();
    let mut arcs: Vec<(String, String)> = Vec::new();
    let mut finals: Vec<(String, u32)> = Vec::new();
    let mut final_ref: Option<String> = None;
    let mut nets_seen = 0;
    let mut buf = Vec::new();

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::Pnml(format!("at byte {}: {e}", reader.buffer_position())))?;
        let in_net = nets_seen == 1;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let tag = e.local_name().as_ref().to_vec();
                let in_final = path.iter().any(|p| p == b"finalmarkings");
                match tag.as_slice() {
                    b"net" => nets_seen += 1,
                    b"place" if in_net && in_final => final_ref = Some(required(e, "idref")?),
                    b"place" if in_net => places.push(RawPlace { id: required(e, "id")?, initial: 0 }),
                    b"transition" if in_net => {
                        transitions.push(RawTransition { id: required(e, "id")?, ..Default::default() })
                    }
                    b"arc" if in_net => arcs.push((required(e, "source")?, required(e, "target")?)),
                    b"toolspecific" if in_net && path.last().map(|p| p.as_slice()) == Some(b"transition") => {
                        if attr(e, b"activity")?.as_deref() == Some(INVISIBLE) {
                            if let Some(t) = transitions.last_mut() {
                                t.invisible = true;
                            }
                        }
                    }
                    _ => {}
                }
                if matches!(ev, Event::Start(_)) {
                    path.push(tag);
                }
            }
            Event::Text(ref t) if in_net => {
                let text = t.unescape().map_err(|e| Error::Pnml(e.to_string()))?.into_owned();
                let tail: Vec<&[u8]> = path.iter().rev().take(3).map(|p| p.as_slice()).collect();
                match tail.as_slice() {
                    [b"text", b"name", b"net", ..] => name = text,
                    [b"text", b"name", b"transition", ..] => {
                        if let Some(t) = transitions.last_mut() {
                            t.name = Some(text);
                        }
                    }
                    [b"text", b"initialMarking", b"place", ..] => {
                        if let Some(p) = places.last_mut() {
                            p.initial = parse_tokens(&text)?;
                        }
                    }
                    [b"text", b"place", b"marking", ..] => {
                        if let Some(r) = final_ref.clone() {
                            finals.push((r, parse_tokens(&text)?));
                        }
                    }
                    _ => {}
                }
            }
            Event::End(_) => {
                path.pop();
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if let Some(open) = path.last() {
        return Err(Error::Pnml(format!("document ends inside <{}>", String::from_utf8_lossy(open))));
    }
    if nets_seen == 0 {
        return Err(Error::Pnml("no <net> element".into()));
    }

    let mut net = PetriNet::new(name);
    let mut place_ix: HashMap<String, PlaceId> = HashMap::new();
    let mut trans_ix: HashMap<String, TransitionId> = HashMap::new();
    for p in places {
        let id = net.add_place(p.id.clone());
        if place_ix.insert(p.id.clone(), id).is_some() {
            return Err(Error::Pnml(format!("duplicate place id {}", p.id)));
        }
        net.set_initial(id, p.initial);
    }
    for t in transitions {
        let label = if t.invisible { None } else { Some(Activity::new(t.name.as_deref().unwrap_or(&t.id))) };
        let id = net.add_transition(t.id.clone(), label);
        if place_ix.contains_key(&t.id) || trans_ix.insert(t.id.clone(), id).is_some() {
            return Err(Error::Pnml(format!("duplicate node id {}", t.id)));
        }
    }
    for (src, tgt) in arcs {
        match (place_ix.get(&src), trans_ix.get(&src), place_ix.get(&tgt), trans_ix.get(&tgt)) {
            (Some(&p), _, _, Some(&t)) => net.arc_in(p, t),
            (_, Some(&t), Some(&p), _) => net.arc_out(t, p),
            _ => return Err(Error::Pnml(format!("arc {src} -> {tgt} must join a place and a transition"))),
        }
    }
    for (r, tokens) in finals {
        let p = *place_ix
            .get(&r)
            .ok_or_else(|| Error::Pnml(format!("final marking references unknown place {r}")))?;
        net.set_final(p, tokens);
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn round_trip(net: &PetriNet) -> PetriNet {
        let mut out = Vec::new();
        export_pnml(net, &mut out).unwrap();
        import_pnml(out.as_slice()).unwrap()
    }

    #[test]
    fn truncated_document_is_an_error() {
        assert!(matches!(import_pnml("<pnml><net>".as_bytes()), Err(Error::Pnml(_))));
    }

    #[test]
    fn fixtures_round_trip() {
        for net in [
            fixtures::fig1_net(),
            fixtures::flower_net(&["a", "b", "c"]),
            fixtures::flower_net_silent(&["x & y", "<z>"]),
            fixtures::sequence_net(&["a", "b"]),
        ] {
            assert_eq!(round_trip(&net), net);
        }
    }

    #[test]
    fn silent_transition_uses_invisible_marker() {
        let net = fixtures::flower_net_silent(&["a"]);
        let mut out = Vec::new();
        export_pnml(&net, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.contains("activity=\"$invisible$\""));
        let back = import_pnml(s.as_bytes()).unwrap();
        assert_eq!(back.transitions().iter().filter(|t| t.is_silent()).count(), 2);
    }

    #[test]
    fn visible_tau_label_is_not_silent() {
        let mut net = PetriNet::new("n");
        let p = net.add_place("p");
        let t = net.add_transition("t", Some("tau".into()));
        net.arc_in(p, t);
        net.arc_out(t, p);
        assert_eq!(round_trip(&net), net);
    }

    #[test]
    fn empty_net_is_minimal_document() {
        let net = PetriNet::new("");
        let mut out = Vec::new();
        export_pnml(&net, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("<?xml"));
        assert!(s.contains("<net id=\"net1\""));
        assert_eq!(import_pnml(s.as_bytes()).unwrap(), net);
    }

    #[test]
    fn rejects_bad_arcs_and_missing_net() {
        let bad = r#"<pnml><net id="n"><page id="g"><place id="p"/><place id="q"/>
                     <arc id="a" source="p" target="q"/></page></net></pnml>"#;
        assert!(matches!(import_pnml(bad.as_bytes()), Err(Error::Pnml(_))));
        assert!(matches!(import_pnml("<pnml/>".as_bytes()), Err(Error::Pnml(_))));
    }
}
