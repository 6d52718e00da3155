//! CSV and JSON output.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use super::config::SweepConfig;
use super::run::{PopulationRow, ResultRow, RowError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const BASE_COLUMNS: [&str; 13] = [
    "N",
    "beta",
    "eta",
    "nu",
    "M",
    "sigma",
    "n_t",
    "p_err_dsr",
    "n_th",
    "p_hb_dss",
    "p_sql_dss",
    "p_hb_cs",
    "p_sql_cs",
];

const POPULATION_COLUMNS: [&str; 8] = [
    "N",
    "beta",
    "sigma",
    "n_t",
    "stage",
    "symbol",
    "n",
    "probability",
];

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn columns(config: &SweepConfig) -> Vec<String> {
    BASE_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(
            config
                .outputs
                .ratio_benchmarks
                .iter()
                .map(|k| format!("ratio_db_vs_{k}")),
        )
        .collect()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn row_fields(row: &ResultRow) -> Vec<String> {
    let mut f = vec![
        format_float(row.n),
        format_float(row.beta),
        format_float(row.eta),
        format_float(row.nu),
        row.m.to_string(),
        format_float(row.sigma),
        format_float(row.n_t),
        format_float(row.p_err_dsr),
        row.n_th.map(|t| t.to_string()).unwrap_or_default(),
        format_float(row.p_hb_dss),
        format_float(row.p_sql_dss),
        format_float(row.p_hb_cs),
        format_float(row.p_sql_cs),
    ];
    f.extend(row.ratios_db.iter().map(|x| format_float(*x)));
    f
}

pub fn write_csv<W: Write>(rows: &[ResultRow], config: &SweepConfig, w: W) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(columns(config))?;
    for row in rows {
        out.write_record(row_fields(row))?;
    }
    out.flush()
}

pub fn write_population_csv<W: Write>(rows: &[PopulationRow], w: W) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(POPULATION_COLUMNS)?;
    for r in rows {
        out.write_record([
            format_float(r.n),
            format_float(r.beta),
            format_float(r.sigma),
            format_float(r.n_t),
            r.stage.to_string(),
            r.symbol.to_string(),
            r.photons.to_string(),
            format_float(r.probability),
        ])?;
    }
    out.flush()
}

fn number(x: f64) -> Value {
    // non-finite values become null
    Value::from(x)
}

fn row_json(row: &ResultRow, config: &SweepConfig) -> Value {
    let values = [
        number(row.n),
        number(row.beta),
        number(row.eta),
        number(row.nu),
        Value::from(row.m),
        number(row.sigma),
        number(row.n_t),
        number(row.p_err_dsr),
        row.n_th.map(Value::from).unwrap_or(Value::Null),
        number(row.p_hb_dss),
        number(row.p_sql_dss),
        number(row.p_hb_cs),
        number(row.p_sql_cs),
    ];
    let mut m = Map::new();
    for (k, v) in columns(config).into_iter().zip(
        values
            .into_iter()
            .chain(row.ratios_db.iter().map(|x| number(*x))),
    ) {
        m.insert(k, v);
    }
    Value::Object(m)
}

pub fn sweep_json(rows: &[ResultRow], errors: &[RowError], config: &SweepConfig) -> Value {
    json!({
        "config": serde_json::to_value(config).expect("config serializes"),
        "version": VERSION,
        "rows": rows.iter().map(|r| row_json(r, config)).collect::<Vec<_>>(),
        "errors": errors
            .iter()
            .map(|e| json!({"index": e.index, "N": number(e.n), "message": e.message}))
            .collect::<Vec<_>>(),
    })
}

pub fn population_json(rows: &[PopulationRow], config: &SweepConfig) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "N": number(r.n),
                "beta": number(r.beta),
                "sigma": number(r.sigma),
                "n_t": number(r.n_t),
                "stage": r.stage,
                "symbol": r.symbol,
                "n": r.photons,
                "probability": number(r.probability),
            })
        })
        .collect();
    json!({
        "config": serde_json::to_value(config).expect("config serializes"),
        "version": VERSION,
        "rows": rows,
    })
}

pub fn write_json<W: Write>(value: &Value, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
}
