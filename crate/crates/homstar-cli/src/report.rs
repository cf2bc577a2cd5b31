//! Structured reports.
//!
//! A report is a JSON object with sorted keys. Every report carries `schema`, `command`,
//! `verdict` and `truncation` (`order` and `xdeg_cap`, null when not applicable). The text
//! rendering flattens the same object into `path = value` lines.

use homstar::algebroid::AForm;
use homstar::classes::ClassReport;
use homstar::Scalar;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "homstar-report/1";

/// Process exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, order: Option<usize>, cap: Option<u32>) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(SCHEMA));
        fields.insert("command".into(), json!(command));
        fields.insert("truncation".into(), json!({ "order": order, "xdeg_cap": cap }));
        Report { fields }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn finish(mut self, verdict: Verdict) -> (Value, Verdict) {
        self.fields.insert("verdict".into(), json!(verdict == Verdict::Pass));
        (Value::Object(self.fields), verdict)
    }
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|s| json!(s.to_string())).collect())
}

pub fn form(f: &AForm, names: &[String]) -> Value {
    json!(f.render_with(names))
}

pub fn class(c: &ClassReport, names: &[String]) -> Value {
    json!({
        "coordinates": scalars(&c.coordinates),
        "representative": form(&c.representative, names),
        "basis": c.basis.iter().map(|b| form(b, names)).collect::<Vec<_>>(),
        "xdeg_cap": c.cap,
        "order": c.order,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `path = value` lines; arrays use `[i]` suffixes.
pub fn to_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::Array(_) => out.push_str(&format!("{prefix} = []\n")),
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            other => out.push_str(&format!("{prefix} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
