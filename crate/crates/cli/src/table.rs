//! Human-readable rendering of a [`Report`]. Lossy: decimals are marked `≈`.

use std::fmt::Write;

use weyl_q::series::rat::approx_f64;
use weyl_q::series::{parse_rat, ParamPoly, Rat};

use crate::report::{Integrated, ModeRow, Poly, Report};

fn rat(s: &str) -> Option<Rat> {
    parse_rat(s).ok()
}

fn with_decimal(s: &str) -> String {
    match rat(s) {
        Some(r) if !r.is_integer() => format!("{s}  (≈ {:.6})", approx_f64(&r)),
        _ => s.to_string(),
    }
}

fn poly_text(p: &Poly) -> String {
    let coeffs: Option<Vec<Rat>> = p.iter().map(|c| rat(c)).collect();
    match coeffs {
        Some(c) => ParamPoly::from_coeffs(c).to_string(),
        None => format!("[{}]", p.join(", ")),
    }
}

fn is_zero(p: &Poly) -> bool {
    p.iter().all(|c| rat(c).is_some_and(|r| r == Rat::from_integer(0.into())))
}

fn integrated_text(v: &Integrated) -> String {
    v.text.clone()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

/// Left-aligned columns, two spaces apart, indented by four.
fn grid(out: &mut String, header: &[&str], body: Vec<Vec<String>>) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("    {}", padded.join("  ").trim_end())
    };
    let _ = writeln!(out, "{}", line(header.iter().map(|h| h.to_string()).collect()));
    for row in body {
        let _ = writeln!(out, "{}", line(row));
    }
}

fn mode_grid(out: &mut String, rows: &[ModeRow], value: &str) {
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.channel.clone(),
                r.index.to_string(),
                poly_text(&r.eigenvalue),
                poly_text(&r.value),
            ]
        })
        .collect();
    grid(out, &["channel", "index", "eigenvalue", value], body);
}

fn mode_name(r: &ModeRow) -> String {
    match r.channel.as_str() {
        "constant" => "constant mode".to_string(),
        "exact" => format!("exact mode κ = {}", poly_text(&r.eigenvalue)),
        other => format!("{other} mode μ = {}", poly_text(&r.eigenvalue)),
    }
}

/// Why a structure is not smooth: the first nonzero bottom entry, else the
/// first nonzero `L₁β` entry.
fn obstruction_reason(bottom: &[ModeRow], l1: &[ModeRow], slots: (&str, &str)) -> String {
    if let Some(r) = bottom.iter().find(|r| !is_zero(&r.value)) {
        return format!("{} = {} on {}", slots.0, poly_text(&r.value), mode_name(r));
    }
    if let Some(r) = l1.iter().find(|r| !is_zero(&r.value)) {
        return format!("{} = {} on {}", slots.1, poly_text(&r.value), mode_name(r));
    }
    "obstruction present".to_string()
}

pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let m = &report.model;
    let _ = writeln!(
        out,
        "weylq {}  n = {}  backend = {}  λ = {}  truncation = {}  seed = {}",
        report.version, m.n, m.backend, m.lambda, m.truncation_order, report.seed
    );
    let r = &report.results;

    if let Some(q) = &r.q_curvature {
        let _ = writeln!(out, "\n[q_curvature]");
        let _ = writeln!(out, "  s: {}", with_decimal(&q.s));
        let _ = writeln!(out, "  c_n: {}", with_decimal(&q.c_n));
        let _ = writeln!(out, "  Q_h: {}", with_decimal(&q.q_h));
        let _ = writeln!(out, "  Q01: {}", with_decimal(&q.q01));
        let _ = writeln!(out, "  ∫Q dV: {}", integrated_text(&q.q_total));
        if !q.r.is_empty() {
            let _ = writeln!(out, "  r: {}", q.r.join(", "));
        }
    }

    if let Some(l) = &r.l1_spectrum {
        let _ = writeln!(out, "\n[l1_spectrum]  modes from {}{}", l.source, table_note(l.table_dependent));
        let body = l
            .modes
            .iter()
            .map(|e| {
                vec![
                    e.index.to_string(),
                    poly_text(&e.mu),
                    poly_text(&e.l1_frobenius),
                    poly_text(&e.l1_ladder),
                    poly_text(&e.l1_product),
                ]
            })
            .collect();
        grid(&mut out, &["index", "μ", "L1 Frobenius", "L1 ladder", "L1 product"], body);
    }

    if let Some(l) = &r.ladder_check {
        let _ = writeln!(out, "\n[ladder_check]");
        let _ = writeln!(out, "  shift multisets agree: {}", yes_no(l.shifts_match));
        let _ = writeln!(out, "  product shifts: {}", l.product_shifts.join(", "));
        let _ = writeln!(
            out,
            "  sl2 relations on {} seeded forms: {}",
            l.sl2_forms_checked,
            yes_no(l.sl2_relations_hold)
        );
        let body = l
            .modes
            .iter()
            .map(|e| {
                vec![
                    e.index.to_string(),
                    poly_text(&e.mu),
                    poly_text(&e.l1_ladder),
                    yes_no(e.extension_independent).to_string(),
                ]
            })
            .collect();
        grid(&mut out, &["index", "μ", "L1 ladder", "extension independent"], body);
    }

    if let Some(i) = &r.invariant {
        let _ = writeln!(out, "\n[invariant]");
        let _ = writeln!(out, "  Q_h: {}", with_decimal(&i.q_h));
        let _ = writeln!(out, "  ∫Q dV: {}", integrated_text(&i.q_total));
        let _ = writeln!(out, "  second term: {}", with_decimal(&i.second_term));
        let _ = writeln!(out, "  invariant: {}", integrated_text(&i.invariant));
        let _ = writeln!(out, "  pairing: {}", integrated_text(&i.pairing));
        let _ = writeln!(out, "  Q tractor weight: {}", i.q_tractor.weight);
        if i.smooth {
            let _ = writeln!(out, "  smooth: YES, Q_tractor = 0");
        } else {
            let _ = writeln!(
                out,
                "  smooth: NO ({})",
                obstruction_reason(
                    &i.q_tractor.bottom,
                    &i.q_tractor.middle,
                    ("Q_tractor bottom", "Q_tractor middle"),
                )
            );
        }
        if !i.second_term_breakdown.is_empty() {
            mode_grid(&mut out, &i.second_term_breakdown, "contribution");
        }
    }

    if let Some(s) = &r.smoothness {
        let _ = writeln!(out, "\n[smoothness]");
        if s.smooth {
            let _ = writeln!(out, "  smooth: YES, Q_tractor = 0");
        } else {
            let _ = writeln!(out, "  smooth: NO ({})", obstruction_reason(&s.bottom, &s.l1_beta, ("bottom", "L1β")));
        }
        let mut rows = s.bottom.clone();
        rows.extend(s.l1_beta.iter().cloned());
        mode_grid(&mut out, &rows, "log coefficient");
    }

    if let Some(f) = &r.functional {
        let _ = writeln!(out, "\n[functional]");
        let body = f
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| {
                vec![
                    e.label.clone(),
                    e.second_term.clone(),
                    integrated_text(&e.invariant),
                    yes_no(e.closed).to_string(),
                    yes_no(f.minimizers.contains(&k)).to_string(),
                ]
            })
            .collect();
        grid(&mut out, &["structure", "second term", "invariant", "closed", "minimizer"], body);
        let _ = writeln!(out, "  second terms nonnegative: {}", yes_no(f.second_terms_nonnegative));
        let _ = writeln!(out, "  zero exactly on closed: {}", yes_no(f.zero_exactly_on_closed));
        if let Some(p) = f.factors_positive {
            let _ = writeln!(out, "  product factors positive: {}", yes_no(p));
        }
    }

    if let Some(rc) = &r.rescale_check {
        let _ = writeln!(out, "\n[rescale_check]");
        for e in &rc.entries {
            let _ = writeln!(
                out,
                "  h ↦ {}·h: invariant {} → {}, scalings {}",
                e.metric_scale,
                integrated_text(&e.original_invariant),
                integrated_text(&e.rescaled_invariant),
                if e.all_pass { "match" } else { "MISMATCH" }
            );
        }
    }

    if !report.consistency_checks.is_empty() {
        let passed = report.consistency_checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "\nconsistency checks: {passed}/{} pass",
            report.consistency_checks.len()
        );
        for c in report.consistency_checks.iter().filter(|c| !c.pass) {
            let _ = writeln!(out, "  FAIL {}: {} vs {}", c.name, c.lhs, c.rhs);
        }
    }
    out
}

fn table_note(dependent: bool) -> &'static str {
    if dependent {
        "  (sphere 1-form table)"
    } else {
        ""
    }
}
