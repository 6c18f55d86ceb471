use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::harness::SweepRow;

pub const SWEEP_HEADER: [&str; 7] =
    ["n", "raw_mean", "conditioned_mean", "stderr", "y_star", "abs_dev", "cluster_outside_fraction"];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::Parse(format!("unexpected sweep header {header:?}")));
    }
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Parse("sweep file has no rows".into()));
    }
    Ok(rows)
}
