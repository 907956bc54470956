use serde_json::{json, Map, Value as Json};

use super::{ExperimentOutput, RunOutput, Value};
use crate::error::{Error, Result};

pub const SCHEMA: &str = "ffgrowth/1";

/// Columns shared by every experiment, before the value columns.
pub const KEY_COLUMNS: [&str; 6] = ["p", "n", "family", "size", "trial", "seed"];

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(v) => Json::String(v.to_string()),
            Value::Float(v) => Json::from(*v),
            Value::Bool(v) => Json::Bool(*v),
            Value::Missing => Json::Null,
        }
    }
}

/// One CSV document for one experiment, header first.
pub fn to_csv(run: &RunOutput, exp: &ExperimentOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(KEY_COLUMNS.iter().chain(&exp.columns)).map_err(io)?;
    for row in &exp.rows {
        let mut rec = vec![
            run.config.p.to_string(),
            run.config.n.to_string(),
            row.family.name().to_string(),
            row.size.to_string(),
            row.trial.to_string(),
            row.seed.to_string(),
        ];
        rec.extend(row.values.iter().map(|(_, v)| v.csv()));
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn config_json(run: &RunOutput) -> Json {
    let mut cfg = serde_json::to_value(&run.config).expect("config serializes");
    // 64-bit seeds do not survive a trip through a double
    cfg["seed"] = Json::String(run.config.seed.to_string());
    if let Some(b) = cfg.get_mut("budgets").and_then(Json::as_object_mut) {
        for v in b.values_mut() {
            *v = Json::String(v.to_string());
        }
    }
    cfg
}

/// The whole run as one schema-versioned JSON document.
pub fn to_json(run: &RunOutput) -> String {
    let experiments: Vec<Json> = run
        .experiments
        .iter()
        .map(|exp| {
            let rows: Vec<Json> = exp
                .rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    m.insert("family".into(), json!(row.family.name()));
                    m.insert("size".into(), json!(row.size.to_string()));
                    m.insert("trial".into(), json!(row.trial.to_string()));
                    m.insert("seed".into(), json!(row.seed.to_string()));
                    m.insert(
                        "set".into(),
                        Json::Array(row.set.iter().map(|v| json!(v.to_string())).collect()),
                    );
                    for (k, v) in &row.values {
                        m.insert((*k).into(), v.json());
                    }
                    Json::Object(m)
                })
                .collect();
            let fits: Vec<Json> = exp
                .fits
                .iter()
                .map(|f| {
                    json!({
                        "family": f.family.name(),
                        "quantity": f.quantity,
                        "slope": f.slope,
                        "intercept": f.intercept,
                        "samples": f.samples.to_string(),
                        "residuals": f.residuals,
                        "reference_exponent": f.reference_exponent,
                        "log_blind": true,
                    })
                })
                .collect();
            json!({
                "experiment": exp.experiment.name(),
                "columns": exp.columns,
                "rows": rows,
                "fits": fits,
            })
        })
        .collect();
    let doc = json!({
        "schema": SCHEMA,
        "config": config_json(run),
        "experiments": experiments,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
    s.push('\n');
    s
}
