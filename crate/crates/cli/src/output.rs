//! Command reports in text and JSON form.
//!
//! Every report carries a header (dimension, window, degree as applicable),
//! a list of named items and an optional verdict. Item texts are canonical
//! renderings that the expression parser reads back.

use psdo_core::psdo::render_monomial;
use psdo_core::series::render_exponent;
use psdo_core::{Coefficient, LaurentSeries, Rational};
use serde_json::{json, Value as Json};

use crate::eval::{Op, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct Item {
    pub name: String,
    pub kind: &'static str,
    pub text: String,
    /// `(monomial, coefficient)` pairs; empty for plain messages.
    pub terms: Vec<(String, String)>,
}

impl Item {
    pub fn value(name: &str, v: &Value) -> Self {
        match v {
            Value::Op(o) => Self::op(name, o),
            Value::Poly(p) => Self::poly(name, p),
            Value::Time(p) => Self::poly(name, p),
            Value::Series(s) => Self::series(name, s),
            Value::TimeSeries(s) => Self::series(name, s),
        }
    }

    pub fn op(name: &str, o: &Op) -> Self {
        let terms = o.sorted_terms().into_iter().map(|(e, c)| (render_monomial(e), c.to_string())).collect();
        Item { name: name.into(), kind: "operator", text: o.to_string(), terms }
    }

    pub fn poly<V: psdo_core::poly::Variable>(name: &str, p: &psdo_core::Poly<V, Rational>) -> Self {
        let mut terms: Vec<(String, String)> = p.terms().map(|(m, c)| (m.to_string(), c.to_string())).collect();
        terms.sort();
        Item { name: name.into(), kind: "coefficient", text: p.to_string(), terms }
    }

    pub fn series<C: Coefficient<Rational>>(name: &str, s: &LaurentSeries<Rational, C>) -> Self {
        let terms = s
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| (render_exponent(s.groups(), e), c.to_string()))
            .collect();
        Item { name: name.into(), kind: "series", text: s.to_string(), terms }
    }

    pub fn message(name: &str, text: impl Into<String>) -> Self {
        Item { name: name.into(), kind: "message", text: text.into(), terms: vec![] }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub header: Vec<(String, String)>,
    pub items: Vec<Item>,
    /// `Some(false)` when a check found a witness.
    pub verdict: Option<bool>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), header: vec![], items: vec![], verdict: None }
    }

    pub fn head(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.header.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, item: Item) -> &mut Self {
        self.items.push(item);
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Some(false) => 1,
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => serde_json::to_string_pretty(&self.json()).expect("serializable") + "\n",
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out += &format!("# {k}: {v}\n");
        }
        let single = self.items.len() == 1 && self.items[0].name == "result";
        for it in &self.items {
            if single {
                out += &format!("{}\n", it.text);
            } else {
                out += &format!("{}: {}\n", it.name, it.text);
            }
        }
        if let Some(v) = self.verdict {
            out += if v { "# verdict: holds\n" } else { "# verdict: witness found\n" };
        }
        out
    }

    pub fn json(&self) -> Json {
        let header: serde_json::Map<String, Json> =
            self.header.iter().map(|(k, v)| (k.clone(), Json::String(v.clone()))).collect();
        let items: Vec<Json> = self
            .items
            .iter()
            .map(|it| {
                let terms: Vec<Json> =
                    it.terms.iter().map(|(m, c)| json!({ "monomial": m, "coefficient": c })).collect();
                json!({ "name": it.name, "kind": it.kind, "text": it.text, "terms": terms })
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "header": header,
            "items": items,
            "verdict": self.verdict,
        })
    }
}
