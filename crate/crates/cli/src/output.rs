use std::fmt::Write;

use crystalk_core::lattice::Block;
use crystalk_core::oracle::{Outcome, VerifySummary};
use crystalk_core::toruskt::{InputMatrix, Report, SCHEMA_VERSION};
use crystalk_core::{ActionClass, FixedSetDescription, IntMatrix, StructureInvariants};
use serde::{Deserialize, Serialize};

use crate::catalog::{CatalogEntry, CheckLine};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOutput {
    pub spec_version: String,
    pub input: InputMatrix,
    pub invariants: StructureInvariants,
    pub class: ActionClass,
    pub fixed_set: FixedSetDescription,
    pub blocks: Vec<Block>,
    /// Columns give a basis in which the action is block diagonal.
    pub basis: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Delocalized,
    Kunneth,
    ExteriorOracle,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Delocalized => "delocalized",
            Route::Kunneth => "kunneth",
            Route::ExteriorOracle => "exterior-oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub route: Route,
    pub report: Report,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedRoute {
    pub route: Route,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RanksOutput {
    pub spec_version: String,
    pub routes: Vec<RouteResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedRoute>,
    pub agree: bool,
}

impl RanksOutput {
    pub fn new(routes: Vec<RouteResult>, skipped: Vec<SkippedRoute>) -> Self {
        let agree = routes.windows(2).all(|w| w[0].report.ranks == w[1].report.ranks);
        RanksOutput { spec_version: SCHEMA_VERSION.to_string(), routes, skipped, agree }
    }
}

fn fmt_invariants(inv: StructureInvariants) -> String {
    format!("(a, b, c) = ({}, {}, {})", inv.a, inv.b, inv.c)
}

fn fmt_matrix(m: &IntMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn classify_text(o: &ClassifyOutput) -> String {
    let mut s = String::new();
    let blocks: Vec<String> = o.blocks.iter().map(|b| format!("{b:?}")).collect();
    writeln!(s, "n: {}", o.input.n).unwrap();
    writeln!(s, "matrix: {}", fmt_matrix(&o.input.matrix)).unwrap();
    writeln!(s, "invariants: {}", fmt_invariants(o.invariants)).unwrap();
    writeln!(s, "class: {}", o.class).unwrap();
    writeln!(s, "fixed set: {} component(s) of dimension {}", o.fixed_set.components, o.fixed_set.dim).unwrap();
    writeln!(s, "blocks: {}", blocks.join(" + ")).unwrap();
    writeln!(s, "basis: {}", fmt_matrix(&o.basis)).unwrap();
    s
}

pub fn report_text(r: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "quantity: {}", serde_json::to_value(r.quantity).unwrap().as_str().unwrap()).unwrap();
    writeln!(s, "n: {}", r.input.n).unwrap();
    writeln!(s, "invariants: {}", fmt_invariants(r.invariants)).unwrap();
    writeln!(s, "class: {}", r.class).unwrap();
    writeln!(s, "fixed set: {} component(s) of dimension {}", r.fixed_set.components, r.fixed_set.dim).unwrap();
    writeln!(s, "K0 rank: {}", r.ranks.k0).unwrap();
    writeln!(s, "K1 rank: {}", r.ranks.k1).unwrap();
    writeln!(s, "scope: {}", r.scope_flag).unwrap();
    if let Some(m) = &r.module_structure {
        writeln!(s, "K0 module: {}", m.k0).unwrap();
        writeln!(s, "K1 module: {}", m.k1).unwrap();
    }
    if let Some(c) = &r.certificate {
        let steps: Vec<&str> = c.steps.iter().map(|x| x.step.as_str()).collect();
        writeln!(s, "certificate: {} ({})", steps.join(", "), if c.certifies_torsion_free() { "torsion-free" } else { "not certified" })
            .unwrap();
    }
    if let Some(c) = &r.caveat {
        writeln!(s, "caveat: {c}").unwrap();
    }
    s
}

pub fn ranks_text(o: &RanksOutput) -> String {
    let mut s = String::new();
    for (i, r) in o.routes.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        writeln!(s, "route: {}", r.route.name()).unwrap();
        s.push_str(&report_text(&r.report));
    }
    for k in &o.skipped {
        writeln!(s, "\nroute {} skipped: {}", k.route.name(), k.reason).unwrap();
    }
    if o.routes.len() > 1 {
        writeln!(s, "\nroutes agree: {}", if o.agree { "yes" } else { "NO" }).unwrap();
    }
    s
}

pub fn verify_text(v: &VerifySummary) -> String {
    let mut s = String::new();
    writeln!(s, "oracle sweep: n = {}, seed = {}, {} member(s)", v.n, v.seed, v.members.len()).unwrap();
    writeln!(s, "{:<26} {:>6} {:>6} {:>8}", "check", "pass", "fail", "skipped").unwrap();
    for (name, t) in &v.tallies {
        writeln!(s, "{:<26} {:>6} {:>6} {:>8}", name, t.pass, t.fail, t.skipped).unwrap();
    }
    writeln!(s).unwrap();
    writeln!(s, "{:<12} {:<18} {:<13} {:>8} {:>8}", "(a,b,c)", "class", "scope", "K0", "K1").unwrap();
    let mut seen = Vec::new();
    for m in &v.members {
        if seen.contains(&m.invariants) {
            continue;
        }
        seen.push(m.invariants);
        let inv = format!("({},{},{})", m.invariants.a, m.invariants.b, m.invariants.c);
        writeln!(s, "{:<12} {:<18} {:<13} {:>8} {:>8}", inv, m.class.to_string(), m.scope_flag.to_string(), m.ranks.0, m.ranks.1)
            .unwrap();
    }
    writeln!(s, "\nRationalOnly members: {}", v.rational_only_members()).unwrap();
    for m in &v.members {
        for c in m.checks.iter().filter(|c| c.outcome == Outcome::Fail) {
            writeln!(s, "FAIL member {} {}: {}", m.index, c.check, c.detail.as_deref().unwrap_or("")).unwrap();
        }
    }
    writeln!(s, "result: {}", if v.all_pass() { "all checks pass" } else { "FAILURES" }).unwrap();
    s
}

pub fn catalog_list_text(entries: &[CatalogEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        writeln!(s, "{:<20} n={} K0={} K1={} {:<13} {}", e.name, e.n, e.expected.k0, e.expected.k1, e.scope_flag.to_string(), e.description)
            .unwrap();
    }
    s
}

pub fn catalog_show_text(e: &CatalogEntry) -> String {
    let mut s = String::new();
    writeln!(s, "name: {}", e.name).unwrap();
    writeln!(s, "description: {}", e.description).unwrap();
    writeln!(s, "n: {}", e.n).unwrap();
    writeln!(s, "matrix: {}", fmt_matrix(&e.matrix)).unwrap();
    writeln!(s, "K0 rank: {}", e.expected.k0).unwrap();
    writeln!(s, "K1 rank: {}", e.expected.k1).unwrap();
    writeln!(s, "scope: {}", e.scope_flag).unwrap();
    writeln!(s, "provenance: {}", serde_json::to_value(e.provenance).unwrap().as_str().unwrap()).unwrap();
    s
}

pub fn catalog_check_text(lines: &[CheckLine]) -> String {
    let mut s = String::new();
    for l in lines {
        writeln!(
            s,
            "{} {:<20} expected ({}, {}) {}, computed ({}, {}) {}",
            if l.ok { "ok  " } else { "FAIL" },
            l.name,
            l.expected.k0,
            l.expected.k1,
            l.expected_scope,
            l.computed.k0,
            l.computed.k1,
            l.computed_scope
        )
        .unwrap();
    }
    s
}
