//! Plain-text run reports.
//!
//! ```text
//! command = find-copy
//! version = 0.1.0
//! n = 3
//!
//! [search.red]
//! outcome = found
//! embedding:
//!   {} -> {1,2}
//!   ...
//!
//! [summary]
//! status = found
//! elapsed_ms = 3
//! ```
//!
//! Field order is fixed by construction. Apart from `version` and
//! `elapsed_ms`, identical inputs produce identical bytes.

use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub fields: Vec<(String, String)>,
    /// Named multi-line block rendered after the fields.
    pub block: Option<(String, Vec<String>)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            ..Section::default()
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn block(&mut self, key: &str, lines: Vec<String>) -> &mut Self {
        self.block = Some((key.to_string(), lines));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub header: Section,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut header = Section::new("");
        header.field("command", command);
        header.field("version", env!("CARGO_PKG_VERSION"));
        Report {
            header,
            sections: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.header.field(key, value);
        self
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Section {
        self.sections.push(Section::new(name));
        self.sections.last_mut().expect("just pushed")
    }

    pub fn find(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        render_fields(&mut out, &self.header);
        for section in &self.sections {
            out.push('\n');
            let _ = writeln!(out, "[{}]", section.name);
            render_fields(&mut out, section);
        }
        out
    }

    /// Reads back a rendered report. Unknown lines are rejected.
    pub fn parse(text: &str) -> Result<Report, String> {
        let mut report = Report::default();
        let mut current: Option<Section> = None;
        let mut in_block = false;
        for (number, line) in text.lines().enumerate() {
            let target = current.as_mut().unwrap_or(&mut report.header);
            if let Some(rest) = line.strip_prefix("  ") {
                match (&mut target.block, in_block) {
                    (Some((_, lines)), true) => lines.push(rest.to_string()),
                    _ => return Err(format!("line {}: indented line outside a block", number + 1)),
                }
                continue;
            }
            in_block = false;
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if let Some(done) = current.take() {
                    report.sections.push(done);
                }
                current = Some(Section::new(name));
                continue;
            }
            if let Some(key) = line.strip_suffix(':') {
                target.block = Some((key.to_string(), Vec::new()));
                in_block = true;
                continue;
            }
            match line.split_once(" = ") {
                Some((k, v)) => {
                    target.fields.push((k.to_string(), v.to_string()));
                }
                None => return Err(format!("line {}: cannot parse {line:?}", number + 1)),
            }
        }
        if let Some(done) = current.take() {
            report.sections.push(done);
        }
        Ok(report)
    }

    /// The rendering with volatile fields removed.
    #[cfg(test)]
    pub fn stable_text(&self) -> String {
        let mut copy = self.clone();
        for section in std::iter::once(&mut copy.header).chain(copy.sections.iter_mut()) {
            section.fields.retain(|(k, _)| k != "version" && k != "elapsed_ms");
        }
        copy.render()
    }
}

fn render_fields(out: &mut String, section: &Section) {
    for (k, v) in &section.fields {
        let _ = writeln!(out, "{k} = {v}");
    }
    if let Some((key, lines)) = &section.block {
        let _ = writeln!(out, "{key}:");
        for line in lines {
            let _ = writeln!(out, "  {line}");
        }
    }
}
