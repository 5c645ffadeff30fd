//! CSV emission: one header line, comma separated, LF line endings and
//! every real printed with 17 significant digits so files round-trip
//! bit-exactly.

use std::path::Path;

use anyhow::{Context, Result};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
