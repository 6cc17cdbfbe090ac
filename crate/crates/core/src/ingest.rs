//! CSV ingestion.
//!
//! Comma-separated, double-quote escaping, UTF-8, header row required.
//! Missing values (empty fields or `NA`) are rejected.

use std::fs::File;
use std::io::Read;
use std::path::PathBuf;

use crate::design::{Dataset, FactorLayout};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestConfig {
    pub data: PathBuf,
    pub response: String,
    pub factors: Vec<String>,
    pub covariates: Vec<String>,
    /// Explicit level orders; factors not listed use first-appearance order.
    pub levels: Vec<(String, Vec<String>)>,
}

impl IngestConfig {
    fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::input("at least one factor is required"));
        }
        if self.factors.contains(&self.response) || self.covariates.contains(&self.response) {
            return Err(Error::input(format!(
                "response `{}` is also listed as a factor or covariate",
                self.response
            )));
        }
        if let Some(c) = self.covariates.iter().find(|c| self.factors.contains(c)) {
            return Err(Error::input(format!("`{c}` is listed as both factor and covariate")));
        }
        for (name, lv) in &self.levels {
            if !self.factors.contains(name) {
                return Err(Error::input(format!("levels given for unknown factor `{name}`")));
            }
            if lv.is_empty() {
                return Err(Error::input(format!("empty level list for `{name}`")));
            }
        }
        Ok(())
    }
}

/// Parse an explicit level declaration of the form `A=lo,mid,hi`.
pub fn parse_levels(spec: &str) -> Result<(String, Vec<String>)> {
    let (name, rest) = spec
        .split_once('=')
        .ok_or_else(|| Error::input(format!("level declaration `{spec}` lacks `=`")))?;
    let levels: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
    if name.trim().is_empty() || levels.iter().any(String::is_empty) {
        return Err(Error::input(format!("malformed level declaration `{spec}`")));
    }
    Ok((name.trim().to_string(), levels))
}

pub fn ingest(config: &IngestConfig) -> Result<(FactorLayout, Dataset)> {
    let file = File::open(&config.data)?;
    ingest_reader(config, file)
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f == "NA"
}

/// Same as [`ingest`] with the CSV text supplied by a reader.
pub fn ingest_reader<R: Read>(config: &IngestConfig, reader: R) -> Result<(FactorLayout, Dataset)> {
    config.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let y_col = find(&config.response)?;
    let f_cols = config.factors.iter().map(|f| find(f)).collect::<Result<Vec<_>>>()?;
    let x_cols = config.covariates.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?;

    let mut labels: Vec<Vec<String>> = config
        .factors
        .iter()
        .map(|f| {
            config
                .levels
                .iter()
                .find(|(n, _)| n == f)
                .map(|(_, l)| l.clone())
                .unwrap_or_default()
        })
        .collect();
    let declared: Vec<bool> = labels.iter().map(|l| !l.is_empty()).collect();

    let mut level_idx: Vec<Vec<usize>> = Vec::new();
    let mut y = Vec::new();
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); x_cols.len()];
    let number = |field: &str, row: usize, column: &str| -> Result<f64> {
        if is_missing(field) {
            return Err(Error::MissingValue {
                row,
                column: column.to_string(),
            });
        }
        let v: f64 = field.trim().parse().map_err(|_| Error::NonNumeric {
            row,
            column: column.to_string(),
            value: field.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::NonNumeric {
                row,
                column: column.to_string(),
                value: field.to_string(),
            });
        }
        Ok(v)
    };

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let field = |c: usize| record.get(c).unwrap_or("");
        let mut idx = Vec::with_capacity(f_cols.len());
        for (k, &c) in f_cols.iter().enumerate() {
            let v = field(c).trim();
            if is_missing(v) {
                return Err(Error::MissingValue {
                    row,
                    column: config.factors[k].clone(),
                });
            }
            let pos = match labels[k].iter().position(|l| l == v) {
                Some(p) => p,
                None if declared[k] => {
                    return Err(Error::input(format!(
                        "row {row}: level `{v}` of `{}` is not among the declared levels",
                        config.factors[k]
                    )))
                }
                None => {
                    labels[k].push(v.to_string());
                    labels[k].len() - 1
                }
            };
            idx.push(pos);
        }
        level_idx.push(idx);
        y.push(number(field(y_col), row, &config.response)?);
        for (k, &c) in x_cols.iter().enumerate() {
            xs[k].push(number(field(c), row, &config.covariates[k])?);
        }
    }
    if y.is_empty() {
        return Err(Error::NoObservations);
    }
    let layout = FactorLayout::with_labels(config.factors.clone(), labels)?;
    let cells = level_idx
        .iter()
        .map(|idx| layout.cell_index(idx))
        .collect::<Result<Vec<_>>>()?;
    let covariates = config.covariates.iter().cloned().zip(xs).collect();
    let data = Dataset::new(cells, covariates, y)?;
    Ok((layout, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IngestConfig {
        IngestConfig {
            response: "y".into(),
            factors: vec!["A".into(), "B".into()],
            ..Default::default()
        }
    }

    #[test]
    fn first_appearance_order() {
        let text = "A,B,y\nhi,x,1\nlo,y,2\nhi,y,3\n";
        let (layout, data) = ingest_reader(&cfg(), text.as_bytes()).unwrap();
        assert_eq!(layout.level_labels()[0], vec!["hi", "lo"]);
        assert_eq!(data.cells(), &[0, 3, 1]);
    }

    #[test]
    fn declared_levels_reorder() {
        let mut c = cfg();
        c.levels.push(parse_levels("A=lo,hi").unwrap());
        let text = "A,B,y\nhi,x,1\nlo,x,2\n";
        let (layout, data) = ingest_reader(&c, text.as_bytes()).unwrap();
        assert_eq!(layout.level_labels()[0], vec!["lo", "hi"]);
        assert_eq!(data.cells(), &[1, 0]);
        assert!(ingest_reader(&c, "A,B,y\nmid,x,1\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let e = ingest_reader(&cfg(), "A,B,z\n1,1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::MissingColumn(ref c) if c == "y"));
        let e = ingest_reader(&cfg(), "A,B,y\n1,1,\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::MissingValue { row: 1, .. }));
        let e = ingest_reader(&cfg(), "A,B,y\n1,1,1\n1,2,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::NonNumeric { row: 2, .. }));
        let e = ingest_reader(&cfg(), "A,B,y\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::NoObservations));
        let mut c = cfg();
        c.covariates.push("A".into());
        assert!(ingest_reader(&c, "A,B,y\n1,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn level_declaration_syntax() {
        assert_eq!(
            parse_levels("dose=low, high").unwrap(),
            ("dose".to_string(), vec!["low".to_string(), "high".to_string()])
        );
        assert!(parse_levels("dose").is_err());
        assert!(parse_levels("dose=a,,b").is_err());
    }
}
