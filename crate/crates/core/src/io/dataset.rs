//! Survival data files: `time,status[,group]` with status 1 = event observed,
//! 0 = right-censored.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sampler::Dataset;

pub const DEFAULT_GROUP: &str = "all";

/// Status column to censoring indicator: `δ = 1 - status`.
pub fn delta_from_status(status: u8) -> u8 {
    1 - status
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

/// Datasets keyed by group, in group-name order.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<BTreeMap<String, Dataset>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_dataset(file, &path.display().to_string())
}

pub fn read_dataset<R: Read>(reader: R, label: &str) -> Result<BTreeMap<String, Dataset>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(label, 1, e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (Some(ti), Some(si)) = (col("time"), col("status")) else {
        return Err(parse_err(label, 1, "header must name `time` and `status` columns"));
    };
    let gi = col("group");

    let mut groups: BTreeMap<String, (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(label, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize, name: &str| -> Result<&str> {
            rec.get(i)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| parse_err(label, line, format!("missing `{name}`")))
        };
        let raw_t = field(ti, "time")?;
        let t: f64 = raw_t
            .parse()
            .map_err(|_| parse_err(label, line, format!("time {raw_t:?} is not a number")))?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(parse_err(label, line, format!("time must be positive, got {raw_t}")));
        }
        let status = match field(si, "status")? {
            "1" => 1u8,
            "0" => 0u8,
            s => return Err(parse_err(label, line, format!("status must be 0 or 1, got {s:?}"))),
        };
        let g = match gi.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()) {
            Some(g) => g.to_string(),
            None => DEFAULT_GROUP.to_string(),
        };
        let e = groups.entry(g).or_default();
        e.0.push(t);
        e.1.push(delta_from_status(status) == 1);
    }
    if groups.is_empty() {
        return Err(parse_err(label, 1, "no data rows"));
    }
    groups
        .into_iter()
        .map(|(g, (t, c))| Ok((g.clone(), Dataset::new(g, t, c)?)))
        .collect()
}

/// Writes `time,status,group` rows with full-precision times.
pub fn write_dataset<'a, W: Write>(writer: W, sets: impl IntoIterator<Item = &'a Dataset>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["time", "status", "group"])?;
    for d in sets {
        for (t, c) in d.times().iter().zip(d.censored()) {
            let status = if *c { "0" } else { "1" };
            w.write_record([t.to_string().as_str(), status, d.group.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset<'a>(path: impl AsRef<Path>, sets: impl IntoIterator<Item = &'a Dataset>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_dataset(std::io::BufWriter::new(file), sets)
}
