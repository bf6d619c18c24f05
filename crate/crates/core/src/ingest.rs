//! CSV loading and normalisation of the empirical series: weather damages,
//! price indices, output series and long-bond real yields.
//!
//! Every file carries one header row. Accepted layouts:
//!
//! | kind    | columns                               |
//! |---------|---------------------------------------|
//! | damages | `year,damages_usd` (or `year,damages`) |
//! | yields  | `year,real_yield`                     |
//! | macro   | `year,value,kind`                     |

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Annual real-dollar weather damage observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamagesSeries {
    pub points: Vec<(i32, f64)>,
    /// Calendar year whose dollars the values are expressed in.
    pub base_year: i32,
}

/// Annual real yields of a fixed-tenor bond, as fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YieldSeries {
    pub points: Vec<(i32, f64)>,
    pub tenor_years: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MacroKind {
    Gdp,
    Cpi,
    Gwp,
}

impl fmt::Display for MacroKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MacroKind::Gdp => "GDP",
            MacroKind::Cpi => "CPI",
            MacroKind::Gwp => "GWP",
        })
    }
}

impl FromStr for MacroKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "GDP" => Ok(MacroKind::Gdp),
            "CPI" => Ok(MacroKind::Cpi),
            "GWP" => Ok(MacroKind::Gwp),
            other => Err(Error::Validation(format!("unknown macro kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSeries {
    pub points: Vec<(i32, f64)>,
    pub kind: MacroKind,
}

impl MacroSeries {
    pub fn value(&self, year: i32) -> Option<f64> {
        lookup(&self.points, year)
    }
}

impl DamagesSeries {
    pub fn new(points: Vec<(i32, f64)>, base_year: i32) -> Result<Self> {
        let s = DamagesSeries { points, base_year };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_years(&self.points)?;
        for &(year, v) in &self.points {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "damages for {year} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn value(&self, year: i32) -> Option<f64> {
        lookup(&self.points, year)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Multiply every observation by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        DamagesSeries {
            points: self.points.iter().map(|&(y, v)| (y, v * factor)).collect(),
            base_year: self.base_year,
        }
    }

    /// Observations with `start <= year <= end`.
    pub fn window(&self, start: i32, end: i32) -> Vec<(i32, f64)> {
        self.points
            .iter()
            .copied()
            .filter(|&(y, _)| y >= start && y <= end)
            .collect()
    }
}

impl YieldSeries {
    pub fn new(points: Vec<(i32, f64)>, tenor_years: u32) -> Result<Self> {
        let s = YieldSeries {
            points,
            tenor_years,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_years(&self.points)?;
        for &(year, v) in &self.points {
            if !v.is_finite() || v.abs() >= 0.25 {
                return Err(Error::Validation(format!(
                    "yield for {year} must be finite with |y| < 0.25, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl MacroSeries {
    pub fn new(points: Vec<(i32, f64)>, kind: MacroKind) -> Result<Self> {
        let s = MacroSeries { points, kind };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_years(&self.points)?;
        for &(year, v) in &self.points {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Validation(format!(
                    "{} value for {year} must be positive, got {v}",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

fn lookup(points: &[(i32, f64)], year: i32) -> Option<f64> {
    points
        .binary_search_by_key(&year, |p| p.0)
        .ok()
        .map(|i| points[i].1)
}

fn check_years(points: &[(i32, f64)]) -> Result<()> {
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Validation(format!(
                "years must be strictly increasing: {} follows {}",
                w[1].0, w[0].0
            )));
        }
    }
    Ok(())
}

/// Declared layout of a series file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSchema {
    Damages { base_year: i32 },
    Yields { tenor_years: u32 },
    Macro,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Damages(DamagesSeries),
    Yields(YieldSeries),
    Macro(MacroSeries),
}

impl Series {
    pub fn len(&self) -> usize {
        match self {
            Series::Damages(s) => s.points.len(),
            Series::Yields(s) => s.points.len(),
            Series::Macro(s) => s.points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn load_series(path: impl AsRef<Path>, schema: SeriesSchema) -> Result<Series> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_series(file, path, schema)
}

pub fn load_damages(path: impl AsRef<Path>, base_year: i32) -> Result<DamagesSeries> {
    match load_series(path, SeriesSchema::Damages { base_year })? {
        Series::Damages(d) => Ok(d),
        _ => unreachable!(),
    }
}

pub fn load_yields(path: impl AsRef<Path>, tenor_years: u32) -> Result<YieldSeries> {
    match load_series(path, SeriesSchema::Yields { tenor_years })? {
        Series::Yields(d) => Ok(d),
        _ => unreachable!(),
    }
}

pub fn load_macro(path: impl AsRef<Path>) -> Result<MacroSeries> {
    match load_series(path, SeriesSchema::Macro)? {
        Series::Macro(d) => Ok(d),
        _ => unreachable!(),
    }
}

/// Parse a series from any reader. `origin` only labels error messages.
pub fn read_series<R: Read>(reader: R, origin: &Path, schema: SeriesSchema) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let expected: &[&[&str]] = match schema {
        SeriesSchema::Damages { .. } => &[&["year"], &["damages_usd", "damages"]],
        SeriesSchema::Yields { .. } => &[&["year"], &["real_yield", "yield"]],
        SeriesSchema::Macro => &[&["year"], &["value"], &["kind"]],
    };
    let headers = rdr.headers()?.clone();
    let header_ok = headers.len() == expected.len()
        && headers
            .iter()
            .zip(expected)
            .all(|(h, names)| names.iter().any(|n| h.eq_ignore_ascii_case(n)));
    if !header_ok {
        let want: Vec<&str> = expected.iter().map(|n| n[0]).collect();
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 1,
            msg: format!(
                "header `{}` does not match `{}`",
                headers.iter().collect::<Vec<_>>().join(","),
                want.join(",")
            ),
        });
    }

    let mut points = Vec::new();
    let mut macro_kind: Option<MacroKind> = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse_err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        if record.len() != expected.len() {
            return Err(parse_err(format!(
                "expected {} fields, found {}",
                expected.len(),
                record.len()
            )));
        }
        let field = |i: usize| -> Result<&str> {
            let f = record.get(i).unwrap_or("");
            if f.is_empty() {
                Err(parse_err(format!("missing value in column {}", i + 1)))
            } else {
                Ok(f)
            }
        };
        let year: i32 = field(0)?
            .parse()
            .map_err(|_| parse_err(format!("bad year `{}`", record.get(0).unwrap_or(""))))?;
        let value: f64 = field(1)?
            .parse()
            .map_err(|_| parse_err(format!("bad number `{}`", record.get(1).unwrap_or(""))))?;
        if !value.is_finite() {
            return Err(parse_err(format!("non-finite value `{value}`")));
        }
        if schema == SeriesSchema::Macro {
            let kind: MacroKind = field(2)?.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            match macro_kind {
                None => macro_kind = Some(kind),
                Some(k) if k != kind => {
                    return Err(parse_err(format!("mixed kinds {k} and {kind} in one file")))
                }
                _ => {}
            }
        }
        points.push((year, value));
    }

    Ok(match schema {
        SeriesSchema::Damages { base_year } => Series::Damages(DamagesSeries::new(points, base_year)?),
        SeriesSchema::Yields { tenor_years } => Series::Yields(YieldSeries::new(points, tenor_years)?),
        SeriesSchema::Macro => {
            let kind = macro_kind.ok_or_else(|| {
                Error::InsufficientData(format!("{}: no rows", origin.display()))
            })?;
            Series::Macro(MacroSeries::new(points, kind)?)
        }
    })
}

/// Write a series in the layout `read_series` accepts.
pub fn write_series<W: Write>(writer: W, series: &Series) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    match series {
        Series::Damages(s) => {
            w.write_record(["year", "damages_usd"])?;
            for &(y, v) in &s.points {
                w.write_record([y.to_string(), fmt_f64(v)])?;
            }
        }
        Series::Yields(s) => {
            w.write_record(["year", "real_yield"])?;
            for &(y, v) in &s.points {
                w.write_record([y.to_string(), fmt_f64(v)])?;
            }
        }
        Series::Macro(s) => {
            w.write_record(["year", "value", "kind"])?;
            for &(y, v) in &s.points {
                w.write_record([y.to_string(), fmt_f64(v), s.kind.to_string()])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(PathBuf::from("<writer>"), e))?;
    Ok(())
}

/// Shortest round-tripping decimal form.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Re-express damages in `target_year` dollars: each value is multiplied by
/// `cpi(target_year) / cpi(year)`.
pub fn cpi_adjust(series: &DamagesSeries, cpi: &MacroSeries, target_year: i32) -> Result<DamagesSeries> {
    if cpi.kind != MacroKind::Cpi {
        return Err(Error::Validation(format!(
            "price adjustment needs a CPI series, got {}",
            cpi.kind
        )));
    }
    let target = cpi
        .value(target_year)
        .ok_or_else(|| Error::Coverage(format!("CPI has no value for target year {target_year}")))?;
    let points = series
        .points
        .iter()
        .map(|&(year, v)| {
            let c = cpi
                .value(year)
                .ok_or_else(|| Error::Coverage(format!("CPI has no value for {year}")))?;
            Ok((year, v * target / c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DamagesSeries {
        points,
        base_year: target_year,
    })
}

/// Arithmetic mean and sample (n − 1) standard deviation of the yields.
pub fn yield_stats(series: &YieldSeries) -> Result<(f64, f64)> {
    if series.points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "yield statistics need at least 2 points, got {}",
            series.points.len()
        )));
    }
    let values: Vec<f64> = series.points.iter().map(|p| p.1).collect();
    Ok((stats::mean(&values), stats::sample_std(&values)))
}
