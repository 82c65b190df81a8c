//! Check reports with a header echoing the bounds used.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub location: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub header: Vec<(String, String)>,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        match self.header.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value.to_string(),
            None => self.header.push((key.to_string(), value.to_string())),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violate(&mut self, check: &str, location: impl Into<String>, value: impl Into<String>) {
        self.violations.push(Violation {
            check: check.to_string(),
            location: location.into(),
            value: value.into(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        for (k, v) in other.header {
            if self.get(&k).is_none() {
                self.header.push((k, v));
            }
        }
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.title);
        for (k, v) in &self.header {
            s.push_str(&format!("{k}: {v}\n"));
        }
        s.push_str(&format!("checked: {}\n", self.checked));
        s.push_str(&format!("violations: {}\n", self.violations.len()));
        for v in &self.violations {
            s.push_str(&format!("  [{}] {} => {}\n", v.check, v.location, v.value));
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s
    }
}
