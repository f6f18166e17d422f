//! JSON and Markdown renderings of a [`Report`].

use std::fmt::Write as _;

use clap::ValueEnum;

use crate::pipeline::Report;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("reports serialize");
            out.push(b'\n');
            out
        }
        Format::Markdown => markdown(report).into_bytes(),
    }
}

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

pub fn markdown(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# realpv {} (schema {})\n", r.command, r.schema_version);
    let _ = writeln!(s, "## System\n");
    let _ = writeln!(s, "```text\n{}```\n", r.system.spec);
    let c = &r.config;
    let _ = writeln!(
        s,
        "Config: window {}, index bound {}, harness support {}, harness degree {}, morphism radius {}.\n",
        c.window, c.index_bound, c.support, c.degree, c.morphism_radius
    );

    let _ = writeln!(s, "## Candidates\n");
    let _ = writeln!(s, "| # | relations | simple | real | weak | realness |");
    let _ = writeln!(s, "|---|---|---|---|---|---|");
    for cand in &r.candidates {
        let rel = if cand.relations.is_empty() {
            "none".to_string()
        } else {
            cand.relations.join("; ")
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {}: {} |",
            cand.index,
            cell(&rel),
            flag(cand.flags.simple),
            flag(cand.flags.real),
            flag(cand.flags.weak),
            cand.realness.verdict,
            cell(&cand.realness.detail.join(", "))
        );
    }
    s.push('\n');

    if let Some(cl) = &r.classes {
        let _ = writeln!(s, "## Real classes\n");
        for (k, class) in cl.classes.iter().enumerate() {
            let members: Vec<String> = class.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "- class {k}: candidates {}", members.join(", "));
        }
        s.push('\n');
        for cmp in &cl.comparisons {
            let detail = match (&cmp.certificate, &cmp.scaling, &cmp.reason) {
                (Some(w), _, _) => format!(" witness `{w}`"),
                (_, Some(u), _) => format!(" scaling [{}]", u.join(", ")),
                (_, _, Some(m)) => format!(" ({m})"),
                _ => String::new(),
            };
            let _ = writeln!(s, "- {} vs {}: {}{}", cmp.first, cmp.second, cmp.verdict, detail);
        }
        s.push('\n');
    }

    if let Some(g) = &r.galois {
        let _ = writeln!(s, "## Galois group\n");
        let _ = writeln!(s, "G = {} (candidate {})", g.name, g.candidate);
        let order = g.order.map_or("infinite".to_string(), |o| o.to_string());
        let _ = writeln!(s, "- order: {order}");
        let eqs = if g.equations.is_empty() {
            "none".to_string()
        } else {
            g.equations.join(", ")
        };
        let _ = writeln!(s, "- equations: {eqs}");
        let _ = writeln!(s, "- defined over C: {}\n", g.defined_over_c);
    }

    if let Some(cr) = &r.correspondence {
        let _ = writeln!(s, "## Correspondence (index <= {})\n", cr.index_bound);
        let _ = writeln!(s, "| subgroup | fixed ring | round trip |");
        let _ = writeln!(s, "|---|---|---|");
        for row in &cr.rows {
            let ok = if row.ok { "ok" } else { "FAILED" };
            let _ = writeln!(s, "| {} | {} | {ok} |", row.subgroup_name, cell(&row.fixed_ring.name));
        }
        let _ = writeln!(s, "\nViolations: {} ({}).\n", cr.violations, cr.scope);
    }

    if let Some(rp) = &r.real_points {
        let _ = writeln!(s, "## Real points\n");
        let _ = writeln!(s, "G(R) = {}", rp.name);
        if rp.correspondence_fails {
            let _ = writeln!(s, "\nThe correspondence fails for G(R):");
            for col in &rp.collisions {
                let _ = writeln!(
                    s,
                    "- {} and {} have the same real fixer",
                    col.first.name, col.second.name
                );
            }
        } else {
            let _ = writeln!(s, "\nNo collision among the enumerated rings.");
        }
        s.push('\n');
    }

    if let Some(gs) = &r.germ_checks {
        let _ = writeln!(s, "## Germ checks\n");
        let _ = writeln!(s, "| # | x0 | initial | real initial | recurrence | all real | morphism | passed |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for g in gs {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {}/{} | {} |",
                g.candidate,
                g.x0,
                cell(&g.initial.join(", ")),
                g.real_initial,
                g.recurrence,
                g.all_real,
                g.morphism.checked - g.morphism.failures.len(),
                g.morphism.checked,
                g.passed
            );
        }
        s.push('\n');
    }

    let _ = writeln!(s, "## Unknown verdicts\n");
    if r.unknowns.is_empty() {
        let _ = writeln!(s, "None.");
    } else {
        for u in &r.unknowns {
            let _ = writeln!(s, "- {u}");
        }
    }
    s
}
