//! Report rendering: a human-readable text form and a machine-readable
//! JSON document. The JSON output is a single self-describing document per
//! invocation carrying every field of the underlying report; the text form
//! is a projection of it.

use serde_json::{json, Value};

use zpmin_core::harness::Mismatch;
use zpmin_core::{
    A0Interpretation, CrossValReport, CycleDecomposition, FamilyMode, FamilySpec, IntPoly,
    MinimalityReport, OrbitTrace, Verdict,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// How many mismatches the text renderer prints before truncating; the
/// JSON document always carries the full list.
const TEXT_MISMATCH_LIMIT: usize = 10;

fn poly_json(f: &IntPoly) -> Value {
    json!({
        "coefficients": f.coeff_list(),
        "display": f.to_string(),
    })
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Minimal => "minimal",
        Verdict::NotMinimal => "not-minimal",
    }
}

fn reading_str(r: A0Interpretation) -> &'static str {
    match r {
        A0Interpretation::AsEvenSum => "even-sum",
        A0Interpretation::AsMult6Sum => "mult6-sum",
    }
}

fn orbit_json(trace: &OrbitTrace) -> Value {
    json!({
        "prime": trace.start.prime().value(),
        "level": trace.start.level().value(),
        "start": trace.start.value(),
        "sequence": trace.values(),
        "preperiod": trace.preperiod,
        "period": trace.period,
        "full_cycle": trace.is_full_cycle(),
    })
}

fn orbit_text(trace: &OrbitTrace) -> String {
    let mut out = String::new();
    let seq = trace.values();
    let shown: Vec<String> = seq.iter().take(64).map(u64::to_string).collect();
    out.push_str(&shown.join(" -> "));
    if seq.len() > 64 {
        out.push_str(&format!(" -> ... ({} more)", seq.len() - 64));
    }
    out.push_str(&format!(
        "\npreperiod {}, period {}{}",
        trace.preperiod,
        trace.period,
        if trace.is_full_cycle() {
            " (full cycle)"
        } else {
            ""
        }
    ));
    out
}

pub fn render_check(report: &MinimalityReport, poly: &IntPoly, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "check",
                "prime": report.prime,
                "poly": poly_json(poly),
                "normalized": report.normalized.as_ref().map(poly_json),
                "method": report.method.to_string(),
                "verdict": verdict_str(report.verdict),
                "matched_case": report.matched_case,
                "conditions": report.conditions.iter().map(|c| json!({
                    "name": c.name,
                    "congruence": c.congruence,
                    "passed": c.passed,
                    "residue": c.residue,
                })).collect::<Vec<_>>(),
                "witness": report.witness.as_ref().map(orbit_json),
                "diagnostic": report.diagnostic,
            });
            pretty(doc)
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "polynomial: {}   (coefficients: {})\n",
                poly,
                poly.coeff_list()
            ));
            if let Some(g) = &report.normalized {
                out.push_str(&format!(
                    "conjugated: {}   (coefficients: {})\n",
                    g,
                    g.coeff_list()
                ));
            }
            out.push_str(&format!("prime:      {}\n", report.prime));
            out.push_str(&format!("method:     {}\n", report.method));
            out.push_str(&format!("verdict:    {}\n", report.verdict));
            if let Some(case) = &report.matched_case {
                out.push_str(&format!("case:       {case}\n"));
            }
            if !report.conditions.is_empty() {
                out.push_str("conditions:\n");
                for c in &report.conditions {
                    let residue = c
                        .residue
                        .map(|r| format!("  [residue {r}]"))
                        .unwrap_or_default();
                    out.push_str(&format!(
                        "  [{}] {}: {}{}\n",
                        if c.passed { "ok" } else { "FAIL" },
                        c.name,
                        c.congruence,
                        residue
                    ));
                }
            }
            if let Some(w) = &report.witness {
                out.push_str(&format!(
                    "oracle: orbit of 0 at level {} has preperiod {}, period {}{}\n",
                    w.start.level().value(),
                    w.preperiod,
                    w.period,
                    if w.is_full_cycle() {
                        " (full cycle)"
                    } else {
                        ""
                    }
                ));
            }
            if let Some(d) = &report.diagnostic {
                out.push_str(&format!("note: {d}\n"));
            }
            out
        }
    }
}

pub fn render_orbit(trace: &OrbitTrace, poly: &IntPoly, format: Format) -> String {
    match format {
        Format::Json => {
            let mut doc = orbit_json(trace);
            let obj = doc.as_object_mut().expect("orbit_json builds an object");
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("command".into(), json!("orbit"));
            obj.insert("poly".into(), poly_json(poly));
            pretty(doc)
        }
        Format::Text => format!(
            "orbit of {} under f = {} modulo {}^{}:\n{}\n",
            trace.start.value(),
            poly,
            trace.start.prime(),
            trace.start.level(),
            orbit_text(trace)
        ),
    }
}

pub fn render_decompose(
    decomp: &CycleDecomposition,
    poly: &IntPoly,
    max_members: usize,
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "decompose",
                "prime": decomp.prime.value(),
                "level": decomp.level.value(),
                "poly": poly_json(poly),
                "component_count": decomp.component_count(),
                "components": decomp.components.iter().map(|c| json!({
                    "cycle_length": c.cycle.len(),
                    "tail_count": c.tails.len(),
                    "cycle": c.cycle.iter().map(|r| r.value()).collect::<Vec<_>>(),
                    "tails": c.tails.iter().map(|r| r.value()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            pretty(doc)
        }
        Format::Text => {
            let mut out = format!(
                "decomposition of Z/{}^{}Z under f = {}: {} component{}\n",
                decomp.prime,
                decomp.level,
                poly,
                decomp.component_count(),
                if decomp.component_count() == 1 {
                    ""
                } else {
                    "s"
                }
            );
            for (i, c) in decomp.components.iter().enumerate() {
                out.push_str(&format!(
                    "  component {}: cycle length {}, tails {}\n",
                    i + 1,
                    c.cycle.len(),
                    c.tails.len()
                ));
                if c.size() <= max_members {
                    let cyc: Vec<String> = c.cycle.iter().map(|r| r.value().to_string()).collect();
                    out.push_str(&format!("    cycle: {}\n", cyc.join(" -> ")));
                    if !c.tails.is_empty() {
                        let tails: Vec<String> =
                            c.tails.iter().map(|r| r.value().to_string()).collect();
                        out.push_str(&format!("    tails: {}\n", tails.join(", ")));
                    }
                } else {
                    out.push_str("    (members suppressed; raise --max-members to list them)\n");
                }
            }
            out
        }
    }
}

fn family_json(spec: &FamilySpec) -> Value {
    json!({
        "prime": spec.p.value(),
        "max_degree": spec.max_degree,
        "coeff_modulus": spec.coeff_modulus,
        "constant_term": spec.constant_term.to_string(),
        "mode": match spec.mode {
            FamilyMode::Exhaustive => json!("exhaustive"),
            FamilyMode::Sample { count, seed } => json!({"samples": count, "seed": seed}),
        },
    })
}

fn family_text(spec: &FamilySpec) -> String {
    format!(
        "p={}, degree <= {}, coefficients in [0, {}), constant term {}, {}",
        spec.p.value(),
        spec.max_degree,
        spec.coeff_modulus,
        spec.constant_term,
        match spec.mode {
            FamilyMode::Exhaustive => "exhaustive".to_string(),
            FamilyMode::Sample { count, seed } => format!("{count} samples (seed {seed})"),
        }
    )
}

fn mismatch_json(m: &Mismatch) -> Value {
    json!({
        "poly": poly_json(&m.poly),
        "closed_form": verdict_str(m.closed_form),
        "oracle": verdict_str(m.oracle),
    })
}

pub fn render_xval(report: &CrossValReport, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "xval",
                "family": family_json(&report.family),
                "total": report.total,
                "minimal_count": report.minimal_count,
                "mismatch_count": report.mismatches.len(),
                "mismatches": report.mismatches.iter().map(mismatch_json).collect::<Vec<_>>(),
                "p3_interpretation_scores": report.p3_interpretation_scores.map(|s| json!({
                    "even_sum_mismatches": s.even_sum_mismatches,
                    "mult6_sum_mismatches": s.mult6_sum_mismatches,
                })),
                "chosen_reading": report.chosen_reading.map(reading_str),
                "runtime_seconds": report.runtime_seconds,
            });
            pretty(doc)
        }
        Format::Text => {
            let mut out = format!("family: {}\n", family_text(&report.family));
            out.push_str(&format!(
                "checked {} members; oracle-minimal {}\n",
                report.total, report.minimal_count
            ));
            if let Some(s) = report.p3_interpretation_scores {
                out.push_str(&format!(
                    "readings: even-index sum -> {} mismatches; multiple-of-six sum -> {} mismatches\n",
                    s.even_sum_mismatches, s.mult6_sum_mismatches
                ));
            }
            if let Some(r) = report.chosen_reading {
                out.push_str(&format!("reported reading: {r}\n"));
            }
            out.push_str(&format!("mismatches: {}\n", report.mismatches.len()));
            for m in report.mismatches.iter().take(TEXT_MISMATCH_LIMIT) {
                out.push_str(&format!(
                    "  {}   closed-form={}, oracle={}\n",
                    m.poly.coeff_list(),
                    m.closed_form,
                    m.oracle
                ));
            }
            if report.mismatches.len() > TEXT_MISMATCH_LIMIT {
                out.push_str(&format!(
                    "  ... and {} more (full list with --format json)\n",
                    report.mismatches.len() - TEXT_MISMATCH_LIMIT
                ));
            }
            out.push_str(&format!("runtime: {:.2} s\n", report.runtime_seconds));
            out
        }
    }
}

pub fn render_find(polys: &[IntPoly], spec: &FamilySpec, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "find",
                "family": family_json(spec),
                "found": polys.len(),
                "polys": polys.iter().map(poly_json).collect::<Vec<_>>(),
            });
            pretty(doc)
        }
        Format::Text => {
            let mut out = format!(
                "family: {}\nfound {} minimal member{}\n",
                family_text(spec),
                polys.len(),
                if polys.len() == 1 { "" } else { "s" }
            );
            for f in polys {
                out.push_str(&format!("  {}   (coefficients: {})\n", f, f.coeff_list()));
            }
            out
        }
    }
}

fn pretty(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json rendering cannot fail") + "\n"
}
