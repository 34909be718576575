//! Loading, validation, filtering, and alignment of classified forum
//! comments and daily market bars into the date-indexed panel the model
//! consumes.
//!
//! Comments arrive pre-classified (three sentiment classes plus class
//! probabilities); no text is handled here, only lengths and counts.

use std::fmt;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::sentiment::SentimentSeries;

pub const COMMENTS_HEADER: &str = "date,text_length,readership,replies,label,pos_prob,neg_prob";
pub const MARKET_HEADER: &str = "date,turnover,rv";

/// Default length cutoff: comments with 150 or more characters are dropped.
pub const DEFAULT_MAX_LEN: u32 = 150;
/// Default per-day cap: keep the 50 highest-readership comments.
pub const DEFAULT_TOP_K: usize = 50;

/// Probability sums may exceed one by rounding in upstream classifier output.
const PROB_SUM_SLACK: f64 = 1e-6;

/// Hard sentiment class of a classified message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Neutral,
    Positive,
}

impl Label {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Label::Negative),
            1 => Some(Label::Neutral),
            2 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Neutral => 1,
            Label::Positive => 2,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// One classified forum comment.
#[derive(Debug, Clone, PartialEq)]
pub struct CommentRecord {
    pub date: NaiveDate,
    pub text_length: u32,
    pub readership: u64,
    pub replies: u64,
    pub label: Label,
    pub pos_prob: f64,
    pub neg_prob: f64,
}

impl CommentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.text_length == 0 {
            return Err(Error::invalid("text_length must be at least 1"));
        }
        for (name, p) in [("pos_prob", self.pos_prob), ("neg_prob", self.neg_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} {p} outside [0, 1]")));
            }
        }
        if self.pos_prob + self.neg_prob > 1.0 + PROB_SUM_SLACK {
            return Err(Error::invalid(format!(
                "pos_prob + neg_prob = {} exceeds 1",
                self.pos_prob + self.neg_prob
            )));
        }
        Ok(())
    }
}

/// One trading day's market observation; units are percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketBar {
    pub date: NaiveDate,
    pub turnover: f64,
    pub rv: f64,
}

impl MarketBar {
    pub fn validate(&self) -> Result<()> {
        if !(self.turnover > 0.0) {
            return Err(Error::invalid(format!(
                "turnover must be positive, got {}",
                self.turnover
            )));
        }
        if !(self.rv >= 0.0) {
            return Err(Error::invalid(format!(
                "rv must be nonnegative, got {}",
                self.rv
            )));
        }
        Ok(())
    }
}

/// Date-indexed joint series: sentiment, realized volatility, and the first
/// difference of turnover. All three share the same strictly increasing
/// dates; the first joined date is consumed by differencing.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    pub dates: Vec<NaiveDate>,
    pub sent: Vec<f64>,
    pub rv: Vec<f64>,
    pub dturn: Vec<f64>,
}

impl AlignedPanel {
    pub fn new(dates: Vec<NaiveDate>, sent: Vec<f64>, rv: Vec<f64>, dturn: Vec<f64>) -> Result<Self> {
        let t = dates.len();
        if t == 0 {
            return Err(Error::invalid("panel must contain at least one row"));
        }
        if sent.len() != t || rv.len() != t || dturn.len() != t {
            return Err(Error::invalid("panel series lengths differ"));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("panel dates must be strictly increasing"));
        }
        if let Some(bad) = sent.iter().find(|v| !(**v >= -1.0 && **v <= 1.0)) {
            return Err(Error::invalid(format!("sentiment value {bad} outside [-1, 1]")));
        }
        Ok(AlignedPanel {
            dates,
            sent,
            rv,
            dturn,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Row-major T x 3 data matrix in (sent, rv, dturn) column order.
    pub fn data_matrix(&self) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|i| [self.sent[i], self.rv[i], self.dturn[i]])
            .collect()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        match name {
            "sent" => Some(&self.sent),
            "rv" => Some(&self.rv),
            "dturn" => Some(&self.dturn),
            _ => None,
        }
    }
}

pub const PANEL_COLUMNS: [&str; 3] = ["sent", "rv", "dturn"];

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(content.lines().map(|s| s.to_string()).collect())
}

fn parse_date(path: &Path, line_no: usize, s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|_| Error::csv(path, line_no, format!("bad date '{s}', expected YYYY-MM-DD")))
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line_no: usize,
    name: &str,
    s: &str,
) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::csv(path, line_no, format!("bad {name} '{s}'")))
}

/// Load classified comments from a CSV with header
/// `date,text_length,readership,replies,label,pos_prob,neg_prob`.
/// Malformed rows are rejected with their line number.
pub fn load_comments(path: &Path) -> Result<Vec<CommentRecord>> {
    let lines = read_lines(path)?;
    let header = lines
        .first()
        .ok_or_else(|| Error::csv(path, 1, "empty file"))?;
    if header.trim() != COMMENTS_HEADER {
        return Err(Error::csv(
            path,
            1,
            format!("bad header '{header}', expected '{COMMENTS_HEADER}'"),
        ));
    }
    let mut out = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::csv(
                path,
                line_no,
                format!("expected 7 fields, found {}", fields.len()),
            ));
        }
        let record = CommentRecord {
            date: parse_date(path, line_no, fields[0])?,
            text_length: parse_field(path, line_no, "text_length", fields[1])?,
            readership: parse_field(path, line_no, "readership", fields[2])?,
            replies: parse_field(path, line_no, "replies", fields[3])?,
            label: {
                let code: u8 = parse_field(path, line_no, "label", fields[4])?;
                Label::from_code(code).ok_or_else(|| {
                    Error::csv(path, line_no, format!("label {code} not in {{0, 1, 2}}"))
                })?
            },
            pos_prob: parse_field(path, line_no, "pos_prob", fields[5])?,
            neg_prob: parse_field(path, line_no, "neg_prob", fields[6])?,
        };
        record
            .validate()
            .map_err(|e| Error::csv(path, line_no, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Drop comments at or above `max_len` characters, then keep the `top_k`
/// highest-readership comments per day. Ties break by replies (descending),
/// then original input order, so the result is deterministic and filtering
/// an already-filtered set is a no-op.
pub fn filter_comments(
    records: &[CommentRecord],
    max_len: u32,
    top_k: usize,
) -> Vec<CommentRecord> {
    let mut idx: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].text_length < max_len)
        .collect();
    idx.sort_by(|&a, &b| {
        let ra = &records[a];
        let rb = &records[b];
        ra.date
            .cmp(&rb.date)
            .then(rb.readership.cmp(&ra.readership))
            .then(rb.replies.cmp(&ra.replies))
            .then(a.cmp(&b))
    });
    let mut out = Vec::with_capacity(idx.len());
    let mut day_count = 0usize;
    let mut current: Option<NaiveDate> = None;
    for i in idx {
        let r = &records[i];
        if current != Some(r.date) {
            current = Some(r.date);
            day_count = 0;
        }
        if day_count < top_k {
            out.push(r.clone());
            day_count += 1;
        }
    }
    out
}

/// Load market bars from a CSV with header `date,turnover,rv`.
/// Duplicate dates are rejected; output is sorted by date.
pub fn load_market(path: &Path) -> Result<Vec<MarketBar>> {
    let lines = read_lines(path)?;
    let header = lines
        .first()
        .ok_or_else(|| Error::csv(path, 1, "empty file"))?;
    if header.trim() != MARKET_HEADER {
        return Err(Error::csv(
            path,
            1,
            format!("bad header '{header}', expected '{MARKET_HEADER}'"),
        ));
    }
    let mut out: Vec<MarketBar> = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, line) in lines.iter().enumerate().skip(1) {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::csv(
                path,
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let bar = MarketBar {
            date: parse_date(path, line_no, fields[0])?,
            turnover: parse_field(path, line_no, "turnover", fields[1])?,
            rv: parse_field(path, line_no, "rv", fields[2])?,
        };
        bar.validate()
            .map_err(|e| Error::csv(path, line_no, e.to_string()))?;
        if out.iter().any(|b| b.date == bar.date) {
            return Err(Error::csv(
                path,
                line_no,
                format!("duplicate date {}", bar.date),
            ));
        }
        out.push(bar);
    }
    out.sort_by_key(|b| b.date);
    Ok(out)
}

/// Inner-join sentiment and market bars on date and first-difference the
/// turnover series. The earliest joined date is consumed by differencing,
/// so the panel has (number of common dates) - 1 rows.
pub fn align_panel(sent: &SentimentSeries, bars: &[MarketBar]) -> Result<AlignedPanel> {
    let mut joined: Vec<(NaiveDate, f64, f64, f64)> = Vec::new();
    for bar in bars {
        if let Some(v) = sent.value_on(bar.date) {
            joined.push((bar.date, v, bar.rv, bar.turnover));
        }
    }
    joined.sort_by_key(|r| r.0);
    if joined.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 common dates between sentiment and market series, found {}",
            joined.len()
        )));
    }
    let mut dates = Vec::with_capacity(joined.len() - 1);
    let mut s = Vec::with_capacity(joined.len() - 1);
    let mut rv = Vec::with_capacity(joined.len() - 1);
    let mut dturn = Vec::with_capacity(joined.len() - 1);
    for w in joined.windows(2) {
        dates.push(w[1].0);
        s.push(w[1].1);
        rv.push(w[1].2);
        dturn.push(w[1].3 - w[0].3);
    }
    AlignedPanel::new(dates, s, rv, dturn)
}

/// Write comments in the loader's CSV schema.
pub fn write_comments_csv(path: &Path, records: &[CommentRecord]) -> Result<()> {
    let mut out = String::from(COMMENTS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.date, r.text_length, r.readership, r.replies, r.label, r.pos_prob, r.neg_prob
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write market bars in the loader's CSV schema.
pub fn write_market_csv(path: &Path, bars: &[MarketBar]) -> Result<()> {
    let mut out = String::from(MARKET_HEADER);
    out.push('\n');
    for b in bars {
        out.push_str(&format!("{},{},{}\n", b.date, b.turnover, b.rv));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
