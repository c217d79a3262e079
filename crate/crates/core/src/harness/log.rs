//! Per-tick CSV telemetry.
//!
//! Vector quantities take `_x/_y/_z` suffixes; for Euler angles and torques
//! these are roll/pitch/yaw. `f` is the position-loop force (inertial),
//! `tau` the attitude-loop torque in Euler form, `tauhat` the body-frame
//! torque estimate. Floats are written in shortest round-trip form, so a
//! parsed log reproduces the in-memory values bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

fn xyz(prefix: &str) -> [String; 3] {
    ["x", "y", "z"].map(|a| format!("{prefix}_{a}"))
}

/// Column names, in order.
pub fn columns() -> Vec<String> {
    let mut c = vec!["t".to_string()];
    for v in ["p", "pd", "zeta", "zetad", "v", "omega", "f", "tau", "fhat", "tauhat"] {
        c.extend(xyz(v));
    }
    c.push("mhat".into());
    c.extend(xyz("bhat"));
    for s in ["V", "Vdot", "alpha", "sat_flag"] {
        c.push(s.into());
    }
    for v in ["s1", "s2", "delta1", "delta2", "fd", "taud"] {
        c.extend(xyz(v));
    }
    for s in ["thrust", "mass", "event"] {
        c.push(s.into());
    }
    c
}

/// Index of a column in [`columns`].
pub fn column(name: &str) -> usize {
    columns().iter().position(|c| c == name).unwrap_or_else(|| panic!("unknown log column `{name}`"))
}

/// Rows of numeric telemetry with a header.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl LogTable {
    pub fn new() -> Self {
        Self { header: columns(), rows: Vec::new() }
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    }

    /// Values of one column.
    pub fn series(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn duration(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r[0])
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        let mut fields = Vec::with_capacity(self.header.len());
        for row in &self.rows {
            fields.clear();
            fields.extend(row.iter().map(|x| x.to_string()));
            out.write_record(&fields)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(r);
        let header: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
        if header.first().map(String::as_str) != Some("t") {
            return Err(Error::Schema("first column must be `t`".into()));
        }
        let mut rows = Vec::new();
        for (i, record) in input.records().enumerate() {
            let record = record.map_err(|e| Error::Schema(format!("row {}: {e}", i + 1)))?;
            let row = record
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Schema(format!("row {}: {e}", i + 1)))?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Schema(format!("cannot open {}: {e}", path.display())))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

impl Default for LogTable {
    fn default() -> Self {
        Self::new()
    }
}
