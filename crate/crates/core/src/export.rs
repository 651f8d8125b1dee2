//! Conversion of saved run and search reports to flat tables.

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Validation(format!("unknown format `{other}`, expected json or csv"))),
        }
    }
}

/// Re-renders a saved report. JSON output is pretty-printed; CSV has one row
/// per task of a run report or per record of a search report.
pub fn render(report: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report).expect("value serializes") + "\n"),
        Format::Csv => to_csv(report),
    }
}

fn text(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(items)) => items.iter().map(|i| text(Some(i))).collect::<Vec<_>>().join(" "),
        Some(other) => other.to_string(),
    }
}

fn failed(check: Option<&Value>) -> String {
    let Some(list) = check.and_then(|c| c.get("conclusions")).and_then(Value::as_array) else {
        return String::new();
    };
    list.iter()
        .filter(|c| c.get("holds") == Some(&Value::Bool(false)))
        .map(|c| text(c.get("name")))
        .collect::<Vec<_>>()
        .join("; ")
}

fn to_csv(report: &Value) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Validation(format!("csv: {e}"));
    if let Some(tasks) = report.get("tasks").and_then(Value::as_array) {
        w.write_record(["index", "task", "violation", "elapsed_ms", "hypotheses_hold", "conclusion_holds", "failed_conclusions", "result"])
            .map_err(io)?;
        for t in tasks {
            let r = t.get("result");
            let is_check = r.and_then(|r| r.get("statement_id")).is_some();
            let pick = |k: &str| if is_check { text(r.and_then(|r| r.get(k))) } else { String::new() };
            w.write_record([
                text(t.get("index")),
                text(t.get("task")),
                text(t.get("violation")),
                text(t.get("elapsed_ms")),
                pick("hypotheses_hold"),
                pick("conclusion_holds"),
                if is_check { failed(r) } else { String::new() },
                r.map(Value::to_string).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
    } else if let Some(records) = report.get("records").and_then(Value::as_array) {
        w.write_record(["cursor", "outcome", "shape", "a", "b", "y", "parameter", "hypotheses_hold", "conclusion_holds", "failed_conclusions"])
            .map_err(io)?;
        for r in records {
            let inst = r.get("instance");
            let field = |k: &str| text(inst.and_then(|i| i.get(k)));
            let check = r.get("check");
            w.write_record([
                text(r.get("cursor")),
                text(r.get("outcome")),
                field("shape"),
                field("a"),
                field("b"),
                field("y"),
                field("parameter"),
                text(check.and_then(|c| c.get("hypotheses_hold"))),
                text(check.and_then(|c| c.get("conclusion_holds"))),
                failed(check),
            ])
            .map_err(io)?;
        }
    } else {
        return Err(Error::Validation("not a run or search report: no `tasks` or `records` array".into()));
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
