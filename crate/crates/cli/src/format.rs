use std::io::{self, Write};

use crate::record::{OutputRecord, COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plot,
}

pub fn render(record: &OutputRecord, format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(record)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => render_csv(record),
        Format::Plot => Ok(render_plot(record).into_bytes()),
    }
}

fn render_csv(record: &OutputRecord) -> io::Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(COLUMNS)?;
    for row in &record.rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| e.into_error())
}

/// Whitespace-separated `k exact [empirical]` columns for rows that carry `k`.
fn render_plot(record: &OutputRecord) -> String {
    let rows: Vec<_> = record
        .rows
        .iter()
        .filter(|r| r.k.is_some() && r.exact_float.is_some())
        .collect();
    let with_empirical = rows.iter().any(|r| r.empirical.is_some());
    let mut out = String::from(if with_empirical {
        "# k exact empirical\n"
    } else {
        "# k exact\n"
    });
    for r in rows {
        let (k, exact) = (r.k.unwrap_or_default(), r.exact_float.unwrap_or_default());
        match (with_empirical, r.empirical) {
            (true, Some(e)) => out.push_str(&format!("{k} {exact} {e}\n")),
            (true, None) => out.push_str(&format!("{k} {exact} nan\n")),
            (false, _) => out.push_str(&format!("{k} {exact}\n")),
        }
    }
    out
}

pub fn emit(bytes: &[u8], out: Option<&std::path::Path>) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}
