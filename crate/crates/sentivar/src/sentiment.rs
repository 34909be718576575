//! Daily bullishness index from classified comments.
//!
//! For each day t and class c, M_t^c is the weighted message mass
//! sum_{i in D(t)} w_i * chi_i^c; the index is
//! (M_t^pos - M_t^neg) / (M_t^pos + M_t^neg), which lives in [-1, 1] and is
//! independent of the total posting volume. Neutral messages enter neither
//! sum. A day with no opinionated messages gets the explicit value 0 and a
//! degenerate flag rather than a hole in the panel.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ingest::{CommentRecord, Label};
use crate::stats;

pub const SENTIMENT_HEADER: &str = "date,sent,degenerate_flag,n_pos,n_neu,n_neg";

/// Per-message weight rule. All schemes yield finite, nonnegative weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightScheme {
    /// Every message counts 1 (the index then compares message counts).
    #[default]
    Unit,
    /// Messages weighted by readership.
    Readership,
    /// Messages weighted by ln(1 + readership), damping viral outliers.
    Log1pReadership,
}

impl WeightScheme {
    pub fn weight(self, record: &CommentRecord) -> f64 {
        match self {
            WeightScheme::Unit => 1.0,
            WeightScheme::Readership => record.readership as f64,
            WeightScheme::Log1pReadership => (1.0 + record.readership as f64).ln(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit" => Some(WeightScheme::Unit),
            "readership" => Some(WeightScheme::Readership),
            "log1p_readership" => Some(WeightScheme::Log1pReadership),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightScheme::Unit => "unit",
            WeightScheme::Readership => "readership",
            WeightScheme::Log1pReadership => "log1p_readership",
        }
    }
}

/// One day of the index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailySentiment {
    pub date: NaiveDate,
    pub value: f64,
    /// True when the day had no opinionated (positive or negative) mass.
    pub degenerate: bool,
    pub n_pos: usize,
    pub n_neu: usize,
    pub n_neg: usize,
}

/// Date-ordered bullishness series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SentimentSeries {
    pub days: Vec<DailySentiment>,
}

impl SentimentSeries {
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.days.iter().map(|d| d.date).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.value).collect()
    }

    pub fn value_on(&self, date: NaiveDate) -> Option<f64> {
        self.days
            .binary_search_by_key(&date, |d| d.date)
            .ok()
            .map(|i| self.days[i].value)
    }
}

/// Ratio form of the index for one day's class masses, with the
/// degenerate-day convention made explicit.
pub fn bullishness(m_pos: f64, m_neg: f64) -> (f64, bool) {
    let denom = m_pos + m_neg;
    if denom == 0.0 {
        (0.0, true)
    } else {
        ((m_pos - m_neg) / denom, false)
    }
}

/// Compute the daily index from classified (already filtered) comments.
pub fn daily_bullishness(records: &[CommentRecord], scheme: WeightScheme) -> SentimentSeries {
    let mut by_day: BTreeMap<NaiveDate, (f64, f64, [usize; 3])> = BTreeMap::new();
    for r in records {
        let entry = by_day.entry(r.date).or_insert((0.0, 0.0, [0, 0, 0]));
        let w = scheme.weight(r);
        match r.label {
            Label::Positive => {
                entry.0 += w;
                entry.2[0] += 1;
            }
            Label::Negative => {
                entry.1 += w;
                entry.2[2] += 1;
            }
            Label::Neutral => {
                entry.2[1] += 1;
            }
        }
    }
    let days = by_day
        .into_iter()
        .map(|(date, (m_pos, m_neg, counts))| {
            let (value, degenerate) = bullishness(m_pos, m_neg);
            DailySentiment {
                date,
                value,
                degenerate,
                n_pos: counts[0],
                n_neu: counts[1],
                n_neg: counts[2],
            }
        })
        .collect();
    SentimentSeries { days }
}

/// Sample summary in the descriptive-table layout: mean, standard
/// deviation, skewness, min, max, count. Skewness is the adjusted
/// Fisher-Pearson statistic and is absent when undefined (fewer than three
/// points or zero variance).
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSummary {
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

pub fn summarize_sentiment(series: &SentimentSeries) -> Result<SentimentSummary> {
    if series.is_empty() {
        return Err(Error::invalid("cannot summarize an empty sentiment series"));
    }
    let values = series.values();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SentimentSummary {
        mean: stats::mean(&values),
        sd: stats::std_dev(&values),
        skewness: stats::sample_skewness(&values).ok(),
        min,
        max,
        count: values.len(),
    })
}

pub fn write_sentiment_csv(path: &Path, series: &SentimentSeries) -> Result<()> {
    let mut out = String::from(SENTIMENT_HEADER);
    out.push('\n');
    for d in &series.days {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            d.date, d.value, d.degenerate as u8, d.n_pos, d.n_neu, d.n_neg
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_sentiment_csv(path: &Path) -> Result<SentimentSeries> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SENTIMENT_HEADER => {}
        Some((_, header)) => {
            return Err(Error::csv(
                path,
                1,
                format!("bad header '{header}', expected '{SENTIMENT_HEADER}'"),
            ))
        }
        None => return Err(Error::csv(path, 1, "empty file")),
    }
    let mut days = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::csv(
                path,
                line_no,
                format!("expected 6 fields, found {}", f.len()),
            ));
        }
        let date = NaiveDate::parse_from_str(f[0].trim(), "%Y-%m-%d")
            .map_err(|_| Error::csv(path, line_no, format!("bad date '{}'", f[0])))?;
        let value: f64 = f[1]
            .trim()
            .parse()
            .map_err(|_| Error::csv(path, line_no, format!("bad sent '{}'", f[1])))?;
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::csv(
                path,
                line_no,
                format!("sent {value} outside [-1, 1]"),
            ));
        }
        let flag: u8 = f[2]
            .trim()
            .parse()
            .map_err(|_| Error::csv(path, line_no, format!("bad degenerate_flag '{}'", f[2])))?;
        let parse_count = |s: &str, name: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| Error::csv(path, line_no, format!("bad {name} '{s}'")))
        };
        days.push(DailySentiment {
            date,
            value,
            degenerate: flag != 0,
            n_pos: parse_count(f[3], "n_pos")?,
            n_neu: parse_count(f[4], "n_neu")?,
            n_neg: parse_count(f[5], "n_neg")?,
        });
    }
    days.sort_by_key(|d| d.date);
    for w in days.windows(2) {
        if w[0].date == w[1].date {
            return Err(Error::invalid(format!(
                "duplicate sentiment date {}",
                w[0].date
            )));
        }
    }
    Ok(SentimentSeries { days })
}
