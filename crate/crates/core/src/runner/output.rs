use std::fs::File;
use std::path::Path;

use csv::{ReaderBuilder, Terminator, WriterBuilder};

use crate::error::{Error, Result};

use super::analysis::TSepRecord;
use super::{sort_points, CurvePoint, RateFit};

pub const CURVE_HEADER: [&str; 6] = ["state", "channel", "n", "gamma_t", "e_gl", "method"];
pub const RATES_HEADER: [&str; 7] = ["state", "channel", "n", "method", "alpha", "residual", "points_used"];
pub const TSEP_HEADER: [&str; 5] = ["state", "channel", "n", "method", "t_sep"];

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| {
        if source.is_io_error() {
            match source.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io {
                    path: path.to_path_buf(),
                    source: io,
                },
                _ => unreachable!(),
            }
        } else {
            Error::Csv {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

fn write_rows<const W: usize>(path: &Path, header: [&str; W], rows: impl IntoIterator<Item = [String; W]>) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(file);
    writer.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err(path))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes curve points sorted by state, channel, n, method and `γt`.
pub fn emit_curve_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    let mut sorted = points.to_vec();
    sort_points(&mut sorted);
    write_rows(
        path,
        CURVE_HEADER,
        sorted.iter().map(|p| {
            [
                p.state.to_string(),
                p.channel.to_string(),
                p.n.to_string(),
                format_float(p.gamma_t),
                format_float(p.e_gl),
                p.method.to_string(),
            ]
        }),
    )
}

pub fn emit_rates_csv(fits: &[RateFit], path: &Path) -> Result<()> {
    let mut sorted = fits.to_vec();
    sorted.sort_by_key(|f| (f.state, f.channel, f.n, f.method));
    write_rows(
        path,
        RATES_HEADER,
        sorted.iter().map(|f| {
            [
                f.state.to_string(),
                f.channel.to_string(),
                f.n.to_string(),
                f.method.to_string(),
                format_float(f.alpha),
                format_float(f.residual),
                f.points_used.to_string(),
            ]
        }),
    )
}

/// Curves that never separate get an empty `t_sep` field.
pub fn emit_tsep_csv(records: &[TSepRecord], path: &Path) -> Result<()> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.state, r.channel, r.n, r.method));
    write_rows(
        path,
        TSEP_HEADER,
        sorted.iter().map(|r| {
            [
                r.state.to_string(),
                r.channel.to_string(),
                r.n.to_string(),
                r.method.to_string(),
                r.t_sep.map(format_float).unwrap_or_default(),
            ]
        }),
    )
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = ReaderBuilder::new().from_reader(file);
    let header = reader.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(CURVE_HEADER.iter().copied()) {
        return Err(Error::Config(format!(
            "{}: expected header '{}', found '{}'",
            path.display(),
            CURVE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let bad = |line: u64, what: &str| Error::Config(format!("{}:{line}: invalid {what}", path.display()));
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        points.push(CurvePoint {
            state: record[0].parse()?,
            channel: record[1].parse()?,
            n: record[2].parse().map_err(|_| bad(line, "n"))?,
            gamma_t: record[3].parse().map_err(|_| bad(line, "gamma_t"))?,
            e_gl: record[4].parse().map_err(|_| bad(line, "e_gl"))?,
            method: record[5].parse()?,
        });
    }
    Ok(points)
}
