//! Graphviz export: places as circles, transitions as boxes.

use std::fmt::Write as _;

use crate::net::Net;
use crate::process::Process;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Places show their initial token count; every arc carries its weight.
pub fn net_to_dot(net: &Net) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(net.name())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for s in net.place_ids() {
        let k = net.initial_marking().count(&s);
        let label = format!("{}\\n{k}", net.place_name(s));
        writeln!(out, "  p{} [shape=circle, label={}];", s.0, quote(&label)).unwrap();
    }
    for t in net.transition_ids() {
        writeln!(out, "  t{} [shape=box, label={}];", t.0, quote(net.transition_name(t))).unwrap();
    }
    for t in net.transition_ids() {
        for (s, w) in net.pre(t).iter() {
            writeln!(out, "  p{} -> t{} [label=\"{w}\"];", s.0, t.0).unwrap();
        }
        for (s, w) in net.post(t).iter() {
            writeln!(out, "  t{} -> p{} [label=\"{w}\"];", t.0, s.0).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Nodes are labelled with their identifier and the net node they map to.
/// Conditions of the initial cut are drawn bold.
pub fn process_to_dot(net: &Net, p: &Process) -> String {
    let mut out = String::new();
    writeln!(out, "digraph process {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for (c, s) in p.conditions() {
        let label = format!("{c}\\n{}", net.place_name(*s));
        let style = if p.initial().contains(c) { ", style=bold" } else { "" };
        writeln!(out, "  {c} [shape=circle, label={}{style}];", quote(&label)).unwrap();
    }
    for (e, ev) in p.events() {
        let label = format!("{e}\\n{}", net.transition_name(ev.label));
        writeln!(out, "  {e} [shape=box, label={}];", quote(&label)).unwrap();
    }
    for (e, ev) in p.events() {
        for c in &ev.pre {
            writeln!(out, "  {c} -> {e} [label=\"1\"];").unwrap();
        }
        for c in &ev.post {
            writeln!(out, "  {e} -> {c} [label=\"1\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
