//! File-based interfaces: price and submission CSV ingestion, weight and
//! leaderboard serialization, plain-text key=value model configs, and the
//! fixed-format numeric rendering used by report tables.
//!
//! Data-exchange files (prices, submissions) render floats with Rust's
//! shortest round-trip formatting so that export followed by ingestion
//! reproduces panels bit-identically; report tables use [`format_sig`]
//! at 6 significant digits.

use crate::calendar::IntervalCalendar;
use crate::error::{Error, Result};
use crate::market::ReturnPanel;
use crate::portfolio::{validate_weights, WeightVector};
use chrono::{Datelike, NaiveDate, Weekday};
use nalgebra::DMatrix;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

// ---------------------------------------------------------------------------
// Price panel
// ---------------------------------------------------------------------------

/// Daily close prices for a fixed asset universe: one column per trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    asset_ids: Vec<String>,
    closes: DMatrix<f64>,
}

impl PricePanel {
    pub fn new(dates: Vec<NaiveDate>, asset_ids: Vec<String>, closes: DMatrix<f64>) -> Result<Self> {
        if closes.nrows() != asset_ids.len() || closes.ncols() != dates.len() {
            return Err(Error::Parameter("price matrix shape mismatch".into()));
        }
        Ok(Self { dates, asset_ids, closes })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn closes(&self) -> &DMatrix<f64> {
        &self.closes
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    /// Parses `date,asset_id,close` rows. Dates must be sorted strictly
    /// ascending, every date must carry the same asset set, and prices must
    /// be strictly positive; violations report the offending data row.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::ingest(0, format!("cannot open {}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = csv
                .headers()
                .map_err(|e| Error::ingest(0, format!("cannot read header: {e}")))?;
            let expect = ["date", "asset_id", "close"];
            if headers.iter().collect::<Vec<_>>() != expect {
                return Err(Error::ingest(0, format!("expected header date,asset_id,close, got {headers:?}")));
            }
        }

        // Assets in order of first appearance; per-date close maps.
        let mut asset_order: Vec<String> = Vec::new();
        let mut dates: Vec<NaiveDate> = Vec::new();
        let mut by_date: Vec<BTreeMap<String, f64>> = Vec::new();

        for (idx, record) in csv.records().enumerate() {
            let row = idx + 2; // 1-based, counting the header
            let record = record.map_err(|e| Error::ingest(row, format!("malformed row: {e}")))?;
            if record.len() != 3 {
                return Err(Error::ingest(row, format!("expected 3 fields, got {}", record.len())));
            }
            let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
                .map_err(|e| Error::ingest(row, format!("bad date {:?}: {e}", &record[0])))?;
            let asset = record[1].to_string();
            let close: f64 = record[2]
                .parse()
                .map_err(|e| Error::ingest(row, format!("bad close {:?}: {e}", &record[2])))?;
            if !(close > 0.0) {
                return Err(Error::ingest(row, format!("nonpositive price {close} for {asset}")));
            }

            match dates.last() {
                Some(&last) if date < last => {
                    return Err(Error::ingest(row, format!("dates not sorted: {date} after {last}")));
                }
                Some(&last) if date == last => {}
                _ => {
                    dates.push(date);
                    by_date.push(BTreeMap::new());
                }
            }
            if !asset_order.contains(&asset) {
                if dates.len() > 1 {
                    return Err(Error::ingest(row, format!("asset {asset} appears after the first date")));
                }
                asset_order.push(asset.clone());
            }
            if by_date.last_mut().unwrap().insert(asset.clone(), close).is_some() {
                return Err(Error::ingest(row, format!("duplicate entry for {asset} on {date}")));
            }
        }

        if dates.is_empty() {
            return Err(Error::ingest(0, "price file contains no data rows".to_string()));
        }
        let n_assets = asset_order.len();
        let mut closes = DMatrix::zeros(n_assets, dates.len());
        for (d, day) in by_date.iter().enumerate() {
            if day.len() != n_assets {
                return Err(Error::ingest(
                    0,
                    format!(
                        "ragged panel: date {} has {} assets, expected {}",
                        dates[d],
                        day.len(),
                        n_assets
                    ),
                ));
            }
            for (a, asset) in asset_order.iter().enumerate() {
                match day.get(asset) {
                    Some(&c) => closes[(a, d)] = c,
                    None => {
                        return Err(Error::ingest(
                            0,
                            format!("ragged panel: asset {asset} missing on {}", dates[d]),
                        ))
                    }
                }
            }
        }
        Self::new(dates, asset_order, closes)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("date,asset_id,close\n");
        for (d, date) in self.dates.iter().enumerate() {
            for (a, asset) in self.asset_ids.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", date.format("%Y-%m-%d"), asset, self.closes[(a, d)]));
            }
        }
        out
    }

    /// Simple returns r_t = S_t / S_{t-1} - 1, partitioned into
    /// `n_intervals` equal intervals.
    pub fn to_returns(&self, n_intervals: usize) -> Result<ReturnPanel> {
        let n_days = self.dates.len().saturating_sub(1);
        if n_days == 0 {
            return Err(Error::ingest(0, "need at least two dates to form returns".to_string()));
        }
        if n_days % n_intervals != 0 {
            return Err(Error::ingest(
                0,
                format!("{n_days} return days do not divide into {n_intervals} equal intervals"),
            ));
        }
        let calendar = IntervalCalendar::new(n_intervals, n_days / n_intervals)?;
        let mut returns = DMatrix::zeros(self.n_assets(), n_days);
        for t in 0..n_days {
            for a in 0..self.n_assets() {
                returns[(a, t)] = self.closes[(a, t + 1)] / self.closes[(a, t)] - 1.0;
            }
        }
        ReturnPanel::new(returns, calendar)
    }

    /// Builds a price path from a return panel (base price 100, consecutive
    /// weekdays from `start`); the exporter used for synthetic fixtures.
    pub fn from_returns(panel: &ReturnPanel, start: NaiveDate) -> Self {
        let n_assets = panel.n_assets();
        let n_days = panel.n_days();
        let mut dates = Vec::with_capacity(n_days + 1);
        let mut d = start;
        while dates.len() < n_days + 1 {
            if d.weekday() != Weekday::Sat && d.weekday() != Weekday::Sun {
                dates.push(d);
            }
            d = d.succ_opt().expect("date overflow");
        }
        let mut closes = DMatrix::zeros(n_assets, n_days + 1);
        for a in 0..n_assets {
            closes[(a, 0)] = 100.0;
            for t in 0..n_days {
                closes[(a, t + 1)] = closes[(a, t)] * (1.0 + panel.returns()[(a, t)]);
            }
        }
        let asset_ids = (0..n_assets).map(|a| format!("A{a:03}")).collect();
        Self { dates, asset_ids, closes }
    }
}

// ---------------------------------------------------------------------------
// Submission panel
// ---------------------------------------------------------------------------

/// A (team, interval) whose submitted gross exposure violates the
/// competition constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintViolation {
    pub team_id: String,
    pub interval: usize,
    pub gross: f64,
}

/// Portfolio weights for K teams over M submission intervals, with
/// carry-forward filling for skipped submissions. Teams absent in early
/// intervals become active at their first submission.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmissionPanel {
    team_ids: Vec<String>,
    asset_ids: Vec<String>,
    /// One I x K matrix per interval; columns are teams. Entries before a
    /// team's first active interval are zero.
    weights: Vec<DMatrix<f64>>,
    /// First interval (0-based) with a real submission, per team.
    first_active: Vec<usize>,
    violations: Vec<ConstraintViolation>,
}

impl SubmissionPanel {
    /// Builds a panel from fully specified per-interval weight matrices.
    pub fn from_matrices(
        team_ids: Vec<String>,
        asset_ids: Vec<String>,
        weights: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let k = team_ids.len();
        let i = asset_ids.len();
        if weights.is_empty() {
            return Err(Error::Parameter("submission panel needs at least one interval".into()));
        }
        for w in &weights {
            if w.nrows() != i || w.ncols() != k {
                return Err(Error::Parameter("weight matrix shape mismatch".into()));
            }
        }
        Ok(Self { team_ids, asset_ids, weights, first_active: vec![0; k], violations: Vec::new() })
    }

    /// Parses `team_id,interval,asset_id,weight` rows (intervals 1-based in
    /// the file), fills skipped intervals by carry-forward, and records
    /// gross-exposure violations. With `strict`, a violation is an error.
    pub fn from_csv_path(
        path: &Path,
        asset_ids: &[String],
        n_intervals: usize,
        strict: bool,
    ) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::ingest(0, format!("cannot open {}: {e}", path.display())))?;
        Self::from_reader(file, asset_ids, n_intervals, strict)
    }

    pub fn from_reader(
        reader: impl Read,
        asset_ids: &[String],
        n_intervals: usize,
        strict: bool,
    ) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = csv
                .headers()
                .map_err(|e| Error::ingest(0, format!("cannot read header: {e}")))?;
            let expect = ["team_id", "interval", "asset_id", "weight"];
            if headers.iter().collect::<Vec<_>>() != expect {
                return Err(Error::ingest(
                    0,
                    format!("expected header team_id,interval,asset_id,weight, got {headers:?}"),
                ));
            }
        }
        let asset_index: BTreeMap<&str, usize> =
            asset_ids.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let i = asset_ids.len();

        // (team -> interval -> weight column), teams in order of appearance.
        let mut team_order: Vec<String> = Vec::new();
        let mut submitted: Vec<Vec<Option<Vec<f64>>>> = Vec::new();

        for (idx, record) in csv.records().enumerate() {
            let row = idx + 2;
            let record = record.map_err(|e| Error::ingest(row, format!("malformed row: {e}")))?;
            if record.len() != 4 {
                return Err(Error::ingest(row, format!("expected 4 fields, got {}", record.len())));
            }
            let team = record[0].to_string();
            let interval: usize = record[1]
                .parse()
                .map_err(|e| Error::ingest(row, format!("bad interval {:?}: {e}", &record[1])))?;
            if interval == 0 || interval > n_intervals {
                return Err(Error::ingest(row, format!("interval {interval} outside 1..={n_intervals}")));
            }
            let asset = &record[2];
            let a = *asset_index
                .get(asset)
                .ok_or_else(|| Error::ingest(row, format!("unknown asset {asset:?}")))?;
            let weight: f64 = record[3]
                .parse()
                .map_err(|e| Error::ingest(row, format!("bad weight {:?}: {e}", &record[3])))?;
            if !weight.is_finite() {
                return Err(Error::ingest(row, format!("non-finite weight for {team}")));
            }

            let t = match team_order.iter().position(|x| x == &team) {
                Some(t) => t,
                None => {
                    team_order.push(team.clone());
                    submitted.push(vec![None; n_intervals]);
                    team_order.len() - 1
                }
            };
            submitted[t][interval - 1].get_or_insert_with(|| vec![0.0; i])[a] = weight;
        }

        if team_order.is_empty() {
            return Err(Error::ingest(0, "submission file contains no data rows".to_string()));
        }

        // Carry-forward fill and constraint validation.
        let k = team_order.len();
        let mut weights = vec![DMatrix::zeros(i, k); n_intervals];
        let mut first_active = vec![n_intervals; k];
        let mut violations = Vec::new();
        for (t, team) in team_order.iter().enumerate() {
            let mut last: Option<Vec<f64>> = None;
            for m in 0..n_intervals {
                if let Some(w) = &submitted[t][m] {
                    if first_active[t] == n_intervals {
                        first_active[t] = m;
                    }
                    let wv = WeightVector::from_slice(w);
                    if !validate_weights(&wv) {
                        let v = ConstraintViolation {
                            team_id: team.clone(),
                            interval: m + 1,
                            gross: wv.gross(),
                        };
                        if strict {
                            return Err(Error::ingest(
                                0,
                                format!(
                                    "team {} interval {}: gross exposure {} outside [0.25, 1]",
                                    v.team_id, v.interval, v.gross
                                ),
                            ));
                        }
                        violations.push(v);
                    }
                    last = Some(w.clone());
                }
                if let Some(w) = &last {
                    for (a, &x) in w.iter().enumerate() {
                        weights[m][(a, t)] = x;
                    }
                }
            }
            if first_active[t] == n_intervals {
                return Err(Error::ingest(0, format!("team {team} has no submissions")));
            }
        }

        Ok(Self {
            team_ids: team_order,
            asset_ids: asset_ids.to_vec(),
            weights,
            first_active,
            violations,
        })
    }

    pub fn team_ids(&self) -> &[String] {
        &self.team_ids
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn n_teams(&self) -> usize {
        self.team_ids.len()
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_intervals(&self) -> usize {
        self.weights.len()
    }

    /// I x K weight matrix for interval `m` (carry-forward already applied).
    pub fn interval_weights(&self, m: usize) -> &DMatrix<f64> {
        &self.weights[m]
    }

    pub fn first_active(&self) -> &[usize] {
        &self.first_active
    }

    pub fn violations(&self) -> &[ConstraintViolation] {
        &self.violations
    }

    pub fn team_weights(&self, m: usize, k: usize) -> WeightVector {
        WeightVector::new(self.weights[m].column(k).into_owned())
    }

    /// Teams active from the first interval (the cross-section the joint
    /// Sharpe test is run on).
    pub fn full_period_teams(&self) -> Vec<usize> {
        (0..self.n_teams()).filter(|&k| self.first_active[k] == 0).collect()
    }

    /// Merges teams with bitwise-identical weight panels into a single
    /// column so the test covariance has full rank; returns the reduced
    /// panel and the merge groups (kept index, removed indices).
    pub fn dedup_identical(&self) -> (SubmissionPanel, Vec<(usize, Vec<usize>)>) {
        let k = self.n_teams();
        let mut keep: Vec<usize> = Vec::new();
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for t in 0..k {
            let dup_of = keep.iter().copied().find(|&s| {
                self.first_active[s] == self.first_active[t]
                    && (0..self.n_intervals())
                        .all(|m| self.weights[m].column(s) == self.weights[m].column(t))
            });
            match dup_of {
                Some(s) => {
                    if let Some(g) = groups.iter_mut().find(|(kept, _)| *kept == s) {
                        g.1.push(t);
                    } else {
                        groups.push((s, vec![t]));
                    }
                }
                None => keep.push(t),
            }
        }
        if groups.is_empty() {
            return (self.clone(), groups);
        }
        let weights = (0..self.n_intervals())
            .map(|m| {
                DMatrix::from_fn(self.n_assets(), keep.len(), |a, j| self.weights[m][(a, keep[j])])
            })
            .collect();
        let panel = SubmissionPanel {
            team_ids: keep.iter().map(|&t| self.team_ids[t].clone()).collect(),
            asset_ids: self.asset_ids.clone(),
            weights,
            first_active: keep.iter().map(|&t| self.first_active[t]).collect(),
            violations: self.violations.clone(),
        };
        (panel, groups)
    }

    /// Serializes explicit rows for every interval from each team's first
    /// active one; re-ingestion reproduces the panel bit-identically.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("team_id,interval,asset_id,weight\n");
        for (t, team) in self.team_ids.iter().enumerate() {
            for m in self.first_active[t]..self.n_intervals() {
                for (a, asset) in self.asset_ids.iter().enumerate() {
                    out.push_str(&format!("{},{},{},{}\n", team, m + 1, asset, self.weights[m][(a, t)]));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Leaderboard CSV
// ---------------------------------------------------------------------------

/// Per-interval IR cross-sections parsed from a leaderboard CSV
/// (`team_id,window,ir,rank`), keyed by the `m1..mN` interval windows.
/// Every interval window must cover the same team set.
pub fn parse_leaderboard_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "team_id,window,ir,rank")) => {}
        other => {
            return Err(Error::ingest(1, format!("bad leaderboard header: {:?}", other.map(|x| x.1))))
        }
    }
    // window -> (team -> ir)
    let mut sections: BTreeMap<usize, Vec<(String, f64)>> = BTreeMap::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::ingest(row, format!("expected 4 fields, got {}", fields.len())));
        }
        let window = fields[1];
        if let Some(m) = window.strip_prefix('m').and_then(|s| s.parse::<usize>().ok()) {
            if m == 0 {
                return Err(Error::ingest(row, "interval windows are 1-based".to_string()));
            }
            let ir: f64 = fields[2]
                .parse()
                .map_err(|e| Error::ingest(row, format!("bad ir {:?}: {e}", fields[2])))?;
            sections.entry(m - 1).or_default().push((fields[0].to_string(), ir));
        }
    }
    if sections.is_empty() {
        return Err(Error::ingest(0, "no interval windows (m1..mN) in leaderboard".to_string()));
    }
    let m_count = *sections.keys().max().unwrap() + 1;
    if sections.len() != m_count {
        return Err(Error::ingest(0, "leaderboard is missing interval windows".to_string()));
    }
    let first_teams: Vec<&String> = sections[&0].iter().map(|(t, _)| t).collect();
    for (m, rows) in &sections {
        let teams: Vec<&String> = rows.iter().map(|(t, _)| t).collect();
        if teams != first_teams {
            return Err(Error::ingest(
                0,
                format!("interval window m{} covers a different team set", m + 1),
            ));
        }
    }
    Ok((0..m_count).map(|m| sections[&m].iter().map(|(_, ir)| *ir).collect()).collect())
}

// ---------------------------------------------------------------------------
// Key=value model config
// ---------------------------------------------------------------------------

/// Parses a plain-text `key=value` market config. Required keys: `mu_r`,
/// `sigma_rr`, `sigma_rr_prime`; optional: `lambda` (0), `n_assets` (100),
/// `days_per_interval` (20). Lines starting with `#` are comments.
pub fn parse_market_config(text: &str) -> Result<crate::market::MarketModel> {
    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::ingest(row, format!("expected key=value, got {line:?}")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|e| Error::ingest(row, format!("bad value for {key}: {e}")))?;
        let known = ["mu_r", "sigma_rr", "sigma_rr_prime", "lambda", "n_assets", "days_per_interval"];
        if !known.contains(&key) {
            return Err(Error::ingest(row, format!("unknown key {key:?}")));
        }
        values.insert(known.iter().find(|&&k| k == key).unwrap(), value);
    }
    let get = |k: &str| -> Result<f64> {
        values.get(k).copied().ok_or_else(|| Error::ingest(0, format!("missing required key {k}")))
    };
    crate::market::MarketModel::new(
        get("mu_r")?,
        get("sigma_rr")?,
        get("sigma_rr_prime")?,
        values.get("lambda").copied().unwrap_or(0.0),
        values.get("n_assets").copied().unwrap_or(100.0) as usize,
        values.get("days_per_interval").copied().unwrap_or(20.0) as usize,
    )
}

// ---------------------------------------------------------------------------
// Formatting and atomic writes
// ---------------------------------------------------------------------------

/// Renders `x` with the given number of significant digits (report tables
/// use 6). Falls back to scientific notation outside a readable range.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if mag >= digits as i32 || mag < -4 {
        format!("{:.*e}", digits.saturating_sub(1), x)
    } else {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Writes via a temp file in the same directory plus rename, so partially
/// written artifacts are never observed under the final name.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
