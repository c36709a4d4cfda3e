//! CSV formats: I/Q samples, per-trial scores, ROC tables and histograms.
//!
//! | file      | header                                      |
//! |-----------|---------------------------------------------|
//! | samples   | `i1,q1,i2,q2`                               |
//! | scores    | `trial,score`                               |
//! | ROC       | `pfa,<pd column>...`                        |
//! | histogram | `bin_left,bin_right,count,density[,pdf_theory]` |
//!
//! ROC and histogram values are written with 12 significant digits; scores
//! use the shortest representation that round-trips exactly.

use std::io::{Read, Write};

use crate::experiment::{HistTable, RocTable};
use crate::rocgen::Histogram;
use crate::{Error, Result};

/// `x` with 12 significant digits, in plain or exponent notation like `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let plain = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&plain).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::parse(
            "header",
            format!("expected `{}`, got `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn field(record: &csv::StringRecord, i: usize) -> Result<f64> {
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    let raw = record
        .get(i)
        .ok_or_else(|| Error::parse(format!("line {line}"), "missing field"))?;
    raw.trim()
        .parse()
        .map_err(|e| Error::parse(format!("line {line}"), format!("`{raw}`: {e}")))
}

/// Reads `i1,q1,i2,q2` rows.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<[f64; 4]>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &["i1", "q1", "i2", "q2"])?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        out.push([
            field(&record, 0)?,
            field(&record, 1)?,
            field(&record, 2)?,
            field(&record, 3)?,
        ]);
    }
    Ok(out)
}

pub fn write_samples<W: Write>(out: W, samples: &[[f64; 4]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["i1", "q1", "i2", "q2"])?;
    for s in samples {
        w.write_record(s.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scores<W: Write>(out: W, scores: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "score"])?;
    for (i, s) in scores.iter().enumerate() {
        w.write_record([i.to_string(), format!("{s:?}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `trial,score` rows, returning scores in file order.
pub fn read_scores<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, &["trial", "score"])?;
    reader.records().map(|r| field(&r?, 1)).collect()
}

pub fn write_roc_table<W: Write>(out: W, table: &RocTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["pfa".to_string()];
    header.extend(table.columns.iter().map(|(name, _)| name.clone()));
    w.write_record(&header)?;
    for (i, p_fa) in table.grid.values().iter().enumerate() {
        let mut row = vec![fmt_sig(*p_fa)];
        row.extend(table.columns.iter().map(|(_, c)| fmt_sig(c.points[i].p_d)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A ROC file read back: header names and numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCsv {
    pub names: Vec<String>,
    pub p_fa: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_roc<R: Read>(input: R) -> Result<RocCsv> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers()?.clone();
    if header.get(0) != Some("pfa") || header.len() < 2 {
        return Err(Error::parse("header", "expected `pfa,<column>...`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut p_fa = Vec::new();
    let mut columns = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record?;
        p_fa.push(field(&record, 0)?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(field(&record, j + 1)?);
        }
    }
    Ok(RocCsv { names, p_fa, columns })
}

pub fn write_histogram<W: Write>(out: W, hist: &Histogram, pdf_theory: Option<&[f64]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["bin_left", "bin_right", "count", "density"];
    if pdf_theory.is_some() {
        header.push("pdf_theory");
    }
    w.write_record(&header)?;
    for i in 0..hist.bins() {
        let mut row = vec![
            fmt_sig(hist.bin_edges[i]),
            fmt_sig(hist.bin_edges[i + 1]),
            hist.counts[i].to_string(),
            fmt_sig(hist.density[i]),
        ];
        if let Some(pdf) = pdf_theory {
            row.push(fmt_sig(pdf[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_hist_table<W: Write>(out: W, table: &HistTable) -> Result<()> {
    write_histogram(out, &table.histogram, Some(&table.pdf_theory))
}

/// A histogram file read back.
#[derive(Clone, Debug, PartialEq)]
pub struct HistCsv {
    pub bin_left: Vec<f64>,
    pub bin_right: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub pdf_theory: Option<Vec<f64>>,
}

pub fn read_histogram<R: Read>(input: R) -> Result<HistCsv> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let with_pdf = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["bin_left", "bin_right", "count", "density"] => false,
        ["bin_left", "bin_right", "count", "density", "pdf_theory"] => true,
        _ => {
            return Err(Error::parse(
                "header",
                "expected `bin_left,bin_right,count,density[,pdf_theory]`",
            ))
        }
    };
    let mut out = HistCsv {
        bin_left: vec![],
        bin_right: vec![],
        counts: vec![],
        density: vec![],
        pdf_theory: with_pdf.then(Vec::new),
    };
    for record in reader.records() {
        let record = record?;
        out.bin_left.push(field(&record, 0)?);
        out.bin_right.push(field(&record, 1)?);
        let count = field(&record, 2)?;
        if count < 0.0 || count.fract() != 0.0 {
            return Err(Error::parse("count", format!("`{count}` is not a count")));
        }
        out.counts.push(count as u64);
        out.density.push(field(&record, 3)?);
        if let Some(pdf) = out.pdf_theory.as_mut() {
            pdf.push(field(&record, 4)?);
        }
    }
    Ok(out)
}
