//! Plain-text rendering of a resolution for the terminal.

use std::fmt::Write as _;

use arxres_core::{FilterOutcome, ResolveResponse};

pub fn human(r: &ResolveResponse) -> String {
    let mut s = String::new();
    let p = &r.preprint;
    let authors: Vec<&str> = p.authors.iter().map(|a| a.full.as_str()).collect();
    let _ = writeln!(s, "arXiv:{}v{}  {}", p.id.normalized(), p.latest_version, p.title);
    let _ = writeln!(s, "  {}", authors.join(", "));
    let _ = writeln!(s, "  submitted {}, {}", p.published_date, p.primary_category);
    if let Some(doi) = &p.doi {
        let _ = writeln!(s, "  doi {doi}");
    }
    if let Some(jref) = &p.journal_ref {
        let _ = writeln!(s, "  journal-ref {jref}");
    }
    let _ = writeln!(s);

    if r.resolved {
        let _ = writeln!(s, "Published versions:");
    } else {
        let _ = writeln!(s, "No published version found.");
    }
    for (db, list) in &r.candidates {
        for view in list {
            let c = &view.candidate;
            let venue = c.venue.as_deref().or(c.journal.as_deref()).unwrap_or("?");
            let year = c.year.map_or_else(|| "?".to_string(), |y| y.to_string());
            let _ = writeln!(s, "  [{db}] {} ({venue}, {year})", c.title);
            if let Some(doi) = &c.doi {
                let _ = writeln!(s, "      doi {doi}");
            }
        }
    }

    let rejected: Vec<_> = r
        .trace
        .iter()
        .filter(|d| d.outcome == FilterOutcome::Rejected)
        .collect();
    if !rejected.is_empty() {
        let _ = writeln!(s, "\nRejected:");
        for d in rejected {
            let rule = d.rule.map(|r| format!("{r:?}")).unwrap_or_default();
            let _ = writeln!(s, "  [{}] #{} {rule}: {}", d.source, d.candidate_index, d.detail);
        }
    }
    let errors: Vec<_> = r.errors.iter().filter(|(_, e)| !e.is_empty()).collect();
    if !errors.is_empty() {
        let _ = writeln!(s, "\nErrors:");
        for (db, list) in errors {
            for e in list {
                let _ = writeln!(s, "  [{db}] {e}");
            }
        }
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}
