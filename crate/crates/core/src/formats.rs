//! Text formats shared by the library and the command-line tool.
//!
//! CSV output uses `.` decimals, 17 significant digits and LF line endings so
//! that repeated runs are byte-identical.

use std::io::Write;

use crate::error::{Result, RodeoError};
use crate::spectrum::{DiscreteSpectrum, ExcitedComponent};

/// Output encoding selected on the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = RodeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(RodeoError::usage(format!("unknown format '{other}'"))),
        }
    }
}

/// Round-trippable scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header and rows of numbers. Rows may be shorter than the header;
/// missing trailing cells are left empty.
pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        let mut cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        cells.resize(header.len().max(cells.len()), String::new());
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

/// Like [`write_csv`] but returns the text.
pub fn csv_string(header: &[String], rows: &[Vec<f64>]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    String::from_utf8(buf).map_err(|e| RodeoError::usage(e.to_string()))
}

/// Header and rows of a numeric CSV; empty cells are `None`.
pub type CsvData = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Parses CSV with a header into rows of numbers; empty cells become `None`.
/// Lines starting with `#` are skipped.
pub fn read_csv(text: &str) -> Result<CsvData> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|cell| {
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|e| RodeoError::usage(format!("bad number '{cell}': {e}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

const GROUND_WEIGHT_TAG: &str = "ground_weight=";

/// Spectrum as CSV: a `# ground_weight=<p>` comment line, then `energy_ratio,weight`.
pub fn spectrum_to_csv(spectrum: &DiscreteSpectrum<f64>) -> Result<String> {
    let header = vec!["energy_ratio".to_owned(), "weight".to_owned()];
    let rows: Vec<Vec<f64>> = spectrum.excited().iter().map(|c| vec![c.x, c.w]).collect();
    let body = csv_string(&header, &rows)?;
    Ok(format!(
        "# {GROUND_WEIGHT_TAG}{}\n{body}",
        fmt_f64(spectrum.ground_weight())
    ))
}

pub fn spectrum_from_csv(text: &str) -> Result<DiscreteSpectrum<f64>> {
    let ground = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix(GROUND_WEIGHT_TAG))
        .ok_or_else(|| RodeoError::usage("spectrum CSV lacks a '# ground_weight=' line"))?;
    let ground_weight: f64 = ground
        .trim()
        .parse()
        .map_err(|e| RodeoError::usage(format!("bad ground weight '{ground}': {e}")))?;
    let (header, rows) = read_csv(text)?;
    if header != ["energy_ratio", "weight"] {
        return Err(RodeoError::usage(format!(
            "spectrum CSV header must be energy_ratio,weight, got {}",
            header.join(",")
        )));
    }
    let excited = rows
        .into_iter()
        .map(|row| match row.as_slice() {
            [Some(x), Some(w)] => Ok(ExcitedComponent { x: *x, w: *w }),
            _ => Err(RodeoError::usage("spectrum rows need exactly two numbers")),
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteSpectrum::new(ground_weight, excited)
}

/// Reads a spectrum in either encoding; JSON is detected by a leading `{`.
pub fn parse_spectrum(text: &str) -> Result<DiscreteSpectrum<f64>> {
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(text)?)
    } else {
        spectrum_from_csv(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn ragged_rows() {
        let header: Vec<String> = ["n", "a", "b"].iter().map(|s| s.to_string()).collect();
        let text = csv_string(&header, &[vec![1.0, 2.0], vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(!text.contains('\r'));
        let (h, rows) = read_csv(&text).unwrap();
        assert_eq!(h, header);
        assert_eq!(rows[0], vec![Some(1.0), Some(2.0), None]);
        assert_eq!(rows[1][2], Some(3.0));
    }

    #[test]
    fn spectrum_round_trip() {
        let s = DiscreteSpectrum::new(
            0.25,
            vec![
                ExcitedComponent { x: 1.3, w: 0.5 },
                ExcitedComponent { x: 7.0, w: 0.25 },
            ],
        )
        .unwrap();
        let csv = spectrum_to_csv(&s).unwrap();
        assert!(csv.starts_with("# ground_weight="));
        assert_eq!(parse_spectrum(&csv).unwrap(), s);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(parse_spectrum(&json).unwrap(), s);
        assert!(spectrum_from_csv("energy_ratio,weight\n1.0,1.0\n").is_err());
    }
}
