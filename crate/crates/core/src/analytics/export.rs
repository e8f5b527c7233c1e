//! Plot-ready CSV exports of the elbow and silhouette curves and of the
//! final labels.

use std::io::Write;

use crate::error::Result;
use crate::scalar::Scalar;

pub fn write_elbow_csv<W: Write, T: Scalar>(sink: W, curve: &[(usize, T)]) -> Result<()> {
    write_curve(sink, "sse", curve)
}

pub fn write_silhouette_csv<W: Write, T: Scalar>(sink: W, curve: &[(usize, T)]) -> Result<()> {
    write_curve(sink, "silhouette", curve)
}

fn write_curve<W: Write, T: Scalar>(sink: W, column: &str, curve: &[(usize, T)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["k", column])?;
    for (k, v) in curve {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `cell_id,cluster` rows.
pub fn write_labels_csv<W: Write>(sink: W, ids: &[String], labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["cell_id", "cluster"])?;
    for (id, l) in ids.iter().zip(labels) {
        w.write_record([id.as_str(), &l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
