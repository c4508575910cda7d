//! CSV datasets with header `x1,...,xp,y`.

use std::path::Path;

use stabconf_core::{DataPoint, Dataset, Domain};

use crate::error::{CliError, CliResult};

fn check_header(headers: &csv::StringRecord) -> CliResult<usize> {
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    let p = cols.len().saturating_sub(1);
    let expected: Vec<String> = (1..=p).map(|j| format!("x{j}")).chain(["y".to_owned()]).collect();
    if p == 0 || cols != expected {
        return Err(CliError::data(
            "header",
            format!("expected `{}`, found `{}`", expected.join(","), cols.join(",")),
        ));
    }
    Ok(p)
}

/// Parses a dataset and checks every row against `domain`.
pub fn read_dataset<R: std::io::Read>(reader: R, domain: Domain) -> CliResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::data("header", e.to_string()))?
        .clone();
    let p = check_header(&headers)?;
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = format!("row {}", i + 1);
        let rec = rec.map_err(|e| CliError::data(&row, e.to_string()))?;
        if rec.len() != p + 1 {
            return Err(CliError::data(&row, format!("expected {} columns, found {}", p + 1, rec.len())));
        }
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::data(&row, e.to_string()))?;
        let pt = DataPoint::new(vals[..p].to_vec(), vals[p]).map_err(|e| CliError::from(e).in_field(&row))?;
        points.push(pt);
    }
    if points.is_empty() {
        return Err(CliError::data("dataset", "no data rows"));
    }
    Ok(Dataset::new(points, domain)?)
}

pub fn load_dataset(path: &Path, domain: Domain) -> CliResult<Dataset> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::data("data", format!("cannot open {}: {e}", path.display())))?;
    read_dataset(file, domain)
}

/// Writes `dataset` in the format read by [`read_dataset`], 17 significant
/// digits per value.
pub fn write_dataset<W: std::io::Write>(writer: W, dataset: &Dataset) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let p = dataset.dim();
    let header: Vec<String> = (1..=p).map(|j| format!("x{j}")).chain(["y".to_owned()]).collect();
    let io = |e: csv::Error| CliError::internal(e.to_string());
    w.write_record(&header).map_err(io)?;
    for pt in dataset.points() {
        let row: Vec<String> = pt.x.iter().chain([&pt.y]).map(|v| crate::format::csv_num(*v)).collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::internal(e.to_string()))
}
