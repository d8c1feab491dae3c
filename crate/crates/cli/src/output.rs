use clap::ValueEnum;

use crate::result::ExperimentResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

/// A single result renders as a JSON object, several as an array.
pub fn render(results: &[ExperimentResult], format: Format) -> String {
    match format {
        Format::Json => {
            if let [one] = results {
                one.to_json() + "\n"
            } else {
                serde_json::to_string_pretty(results).expect("plain data serialises") + "\n"
            }
        }
        Format::Csv => render_csv(results),
        Format::Table => results.iter().map(render_table).collect::<Vec<_>>().join("\n"),
    }
}

fn opt(v: Option<i64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn render_csv(results: &[ExperimentResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "n", "value"]).expect("in-memory write");
    for r in results {
        for rec in &r.results {
            w.write_record([opt(rec.i), opt(rec.n), rec.value.to_string()]).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn render_table(r: &ExperimentResult) -> String {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut out = format!("{} [{}] {} ms  {}\n", r.experiment, r.status, r.wall_ms, params.join(" "));
    let rows: Vec<[String; 3]> = r.results.iter().map(|rec| [opt(rec.i), opt(rec.n), rec.value.to_string()]).collect();
    if rows.is_empty() {
        return out;
    }
    let wi = rows.iter().map(|x| x[0].len()).max().unwrap_or(0).max(1);
    let wn = rows.iter().map(|x| x[1].len()).max().unwrap_or(0).max(1);
    out += &format!("  {:>wi$}  {:>wn$}  value\n", "i", "n");
    for [i, n, v] in rows {
        out += &format!("  {i:>wi$}  {n:>wn$}  {v}\n");
    }
    out
}
