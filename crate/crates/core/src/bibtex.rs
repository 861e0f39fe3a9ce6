//! BibTeX rendering for accepted candidates and for the preprint itself.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::names;
use crate::model::{PersonName, PreprintRecord, PublicationCandidate, ResolutionReport, SourceDatabase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibTexEntry {
    pub entry_type: String,
    pub cite_key: String,
    pub fields: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibTexError {
    #[error("candidate lacks {0}")]
    MissingCoreFields(&'static str),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibTexOptions {
    /// Write common accented letters as TeX commands instead of UTF-8.
    pub tex_escape: bool,
}

impl BibTexEntry {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = format!("@{}{{{}", self.entry_type, self.cite_key);
        for (name, value) in &self.fields {
            let _ = write!(out, ",\n  {name} = {{{value}}}");
        }
        out.push_str("\n}\n");
        out
    }
}

/// Renders entries separated by one blank line.
pub fn render_all<'a>(entries: impl IntoIterator<Item = &'a BibTexEntry>) -> String {
    entries
        .into_iter()
        .map(BibTexEntry::render)
        .collect::<Vec<_>>()
        .join("\n")
}

const TEX_ACCENTS: [(char, &str); 30] = [
    ('ä', "{\\\"a}"),
    ('ö', "{\\\"o}"),
    ('ü', "{\\\"u}"),
    ('Ä', "{\\\"A}"),
    ('Ö', "{\\\"O}"),
    ('Ü', "{\\\"U}"),
    ('ß', "{\\ss}"),
    ('é', "{\\'e}"),
    ('è', "{\\`e}"),
    ('ê', "{\\^e}"),
    ('ë', "{\\\"e}"),
    ('á', "{\\'a}"),
    ('à', "{\\`a}"),
    ('â', "{\\^a}"),
    ('í', "{\\'i}"),
    ('ì', "{\\`i}"),
    ('î', "{\\^i}"),
    ('ï', "{\\\"i}"),
    ('ó', "{\\'o}"),
    ('ò', "{\\`o}"),
    ('ô', "{\\^o}"),
    ('ú', "{\\'u}"),
    ('ù', "{\\`u}"),
    ('û', "{\\^u}"),
    ('ç', "{\\c c}"),
    ('ñ', "{\\~n}"),
    ('ã', "{\\~a}"),
    ('õ', "{\\~o}"),
    ('å', "{\\aa}"),
    ('ø', "{\\o}"),
];

fn braces_balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Drops every brace when the value's braces do not nest properly, and a
/// trailing backslash that would swallow the closing delimiter.
pub fn sanitize_braces(value: &str) -> String {
    let mut v = if braces_balanced(value) {
        value.to_string()
    } else {
        value.chars().filter(|c| *c != '{' && *c != '}').collect()
    };
    while v.ends_with('\\') {
        v.pop();
    }
    v
}

/// Escapes characters with a special meaning in TeX text.
pub fn escape_text(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut prev = '\0';
    for ch in value.chars() {
        if matches!(ch, '&' | '%' | '#' | '$' | '_') && prev != '\\' {
            out.push('\\');
        }
        out.push(ch);
        prev = ch;
    }
    out
}

fn tex_accents(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for ch in value.chars() {
        match TEX_ACCENTS.iter().find(|(c, _)| *c == ch) {
            Some((_, tex)) => out.push_str(tex),
            None => out.push(ch),
        }
    }
    out
}

fn author_field(authors: &[PersonName]) -> String {
    authors
        .iter()
        .map(|a| {
            let name = a.full.trim();
            // A literal " and " inside one name would split it.
            if name.to_lowercase().split_whitespace().any(|w| w == "and") {
                format!("{{{name}}}")
            } else {
                name.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" and ")
}

fn pages_field(pages: &str) -> String {
    if pages.contains("--") {
        return pages.to_string();
    }
    match pages.split_once('-') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            format!("{}--{}", a.trim(), b.trim())
        }
        _ => pages.to_string(),
    }
}

fn key_part(s: &str) -> String {
    names::fold_diacritics(s)
        .to_lowercase()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect()
}

/// Base cite key: folded first-author surname, year, first title word.
pub fn base_cite_key(first_author: Option<&PersonName>, year: Option<i32>, title: &str) -> String {
    let surname = first_author
        .map(|a| key_part(&a.folded_surname))
        .unwrap_or_default();
    let year = year.map(|y| y.to_string()).unwrap_or_default();
    let word = title
        .split_whitespace()
        .map(key_part)
        .find(|w| !w.is_empty())
        .unwrap_or_default();
    let key = format!("{surname}{year}{word}");
    if key.is_empty() {
        "entry".to_string()
    } else {
        key
    }
}

// b, c, ..., z, aa, ab, ...
fn suffix(n: usize) -> String {
    let mut n = n + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
    }
    out.iter().rev().collect()
}

/// Renders entries while keeping cite keys unique.
#[derive(Debug, Default)]
pub struct BibTexRenderer {
    options: BibTexOptions,
    used: HashSet<String>,
}

impl BibTexRenderer {
    pub fn new(options: BibTexOptions) -> Self {
        BibTexRenderer {
            options,
            used: HashSet::new(),
        }
    }

    pub fn allocate_key(&mut self, base: &str) -> String {
        let mut key = base.to_string();
        let mut n = 1;
        while self.used.contains(&key) {
            key = format!("{base}{}", suffix(n));
            n += 1;
        }
        self.used.insert(key.clone());
        key
    }

    fn text(&self, value: &str) -> String {
        let v = escape_text(&sanitize_braces(value));
        if self.options.tex_escape {
            tex_accents(&v)
        } else {
            v
        }
    }

    fn push_text(&self, fields: &mut Vec<(String, String)>, name: &str, value: Option<&str>) {
        if let Some(v) = value.map(str::trim).filter(|v| !v.is_empty()) {
            fields.push((name.to_string(), self.text(v)));
        }
    }

    fn push_raw(fields: &mut Vec<(String, String)>, name: &str, value: Option<&str>) {
        if let Some(v) = value.map(str::trim).filter(|v| !v.is_empty()) {
            fields.push((name.to_string(), sanitize_braces(v)));
        }
    }

    pub fn render_candidate(&mut self, c: &PublicationCandidate) -> Result<BibTexEntry, BibTexError> {
        if c.title.trim().is_empty() {
            return Err(BibTexError::MissingCoreFields("a title"));
        }
        if c.authors.is_empty() {
            return Err(BibTexError::MissingCoreFields("authors"));
        }
        let entry_type = entry_type(&c.publication_types);
        let mut fields = Vec::new();
        self.push_text(&mut fields, "author", Some(&author_field(&c.authors)));
        self.push_text(&mut fields, "title", Some(&c.title));
        let venue = c.venue.as_deref().or(c.journal.as_deref());
        match entry_type {
            "article" => {
                self.push_text(&mut fields, "journal", c.journal.as_deref().or(c.venue.as_deref()))
            }
            "inproceedings" | "incollection" => self.push_text(&mut fields, "booktitle", venue),
            _ => {}
        }
        Self::push_raw(&mut fields, "year", c.year.map(|y| y.to_string()).as_deref());
        self.push_text(&mut fields, "volume", c.volume.as_deref());
        self.push_text(&mut fields, "number", c.number.as_deref());
        self.push_text(&mut fields, "pages", c.pages.as_deref().map(pages_field).as_deref());
        self.push_text(&mut fields, "publisher", c.publisher.as_deref());
        Self::push_raw(&mut fields, "doi", c.doi.as_ref().map(|d| d.as_str()));
        Self::push_raw(&mut fields, "url", c.url.as_deref());
        if let Some(id) = c.arxiv_external_id() {
            Self::push_raw(&mut fields, "eprint", Some(id));
            Self::push_raw(&mut fields, "archivePrefix", Some("arXiv"));
        }
        let base = base_cite_key(c.authors.first(), c.year, &c.title);
        Ok(BibTexEntry {
            entry_type: entry_type.to_string(),
            cite_key: self.allocate_key(&base),
            fields,
        })
    }

    pub fn render_preprint(&mut self, p: &PreprintRecord) -> BibTexEntry {
        use chrono::Datelike;
        let mut fields = Vec::new();
        if !p.authors.is_empty() {
            self.push_text(&mut fields, "author", Some(&author_field(&p.authors)));
        }
        self.push_text(&mut fields, "title", Some(&p.title));
        let year = p.published_date.year();
        Self::push_raw(&mut fields, "year", Some(&year.to_string()));
        Self::push_raw(&mut fields, "eprint", Some(p.id.normalized()));
        Self::push_raw(&mut fields, "archivePrefix", Some("arXiv"));
        Self::push_raw(&mut fields, "primaryClass", Some(&p.primary_category));
        Self::push_raw(&mut fields, "doi", p.doi.as_ref().map(|d| d.as_str()));
        Self::push_raw(
            &mut fields,
            "url",
            Some(&format!("https://arxiv.org/abs/{}", p.id.normalized())),
        );
        let base = base_cite_key(p.authors.first(), Some(year), &p.title);
        BibTexEntry {
            entry_type: "misc".to_string(),
            cite_key: self.allocate_key(&base),
            fields,
        }
    }
}

/// Maps database publication types to a BibTeX entry type. Conference
/// markers win over journal markers because proceedings often appear as
/// journal-like series.
pub fn entry_type(publication_types: &[String]) -> &'static str {
    let types: Vec<String> = publication_types.iter().map(|t| t.to_lowercase()).collect();
    let any = |needles: &[&str]| types.iter().any(|t| needles.iter().any(|n| t.contains(n)));
    if any(&["conference", "proceedings", "workshop"]) {
        "inproceedings"
    } else if any(&["chapter", "collection", "parts in books"]) {
        "incollection"
    } else if any(&["journal", "article"]) {
        "article"
    } else if any(&["book", "monograph"]) {
        "book"
    } else {
        "misc"
    }
}

pub fn render_candidate(c: &PublicationCandidate) -> Result<BibTexEntry, BibTexError> {
    BibTexRenderer::default().render_candidate(c)
}

pub fn render_preprint(p: &PreprintRecord) -> BibTexEntry {
    BibTexRenderer::default().render_preprint(p)
}

/// BibTeX for every accepted candidate of a report, plus the preprint.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBibTex {
    pub preprint: BibTexEntry,
    /// Parallel to `report.per_database[db]`; `None` when rendering failed.
    pub candidates: Vec<(SourceDatabase, Vec<Option<BibTexEntry>>)>,
}

/// Candidates are keyed first (database order, then display order) so the
/// publications get the unsuffixed keys.
pub fn render_report(report: &ResolutionReport, options: BibTexOptions) -> ReportBibTex {
    let mut renderer = BibTexRenderer::new(options);
    let candidates = report
        .per_database
        .iter()
        .map(|(db, list)| {
            let entries = list.iter().map(|c| renderer.render_candidate(c).ok()).collect();
            (*db, entries)
        })
        .collect();
    let preprint = renderer.render_preprint(&report.preprint);
    ReportBibTex {
        preprint,
        candidates,
    }
}
