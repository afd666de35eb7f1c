use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AllocationStats, ExperimentMode, SimulationError};
use crate::market::SuId;
use crate::scenario::ScenarioTemplate;

/// Where a report's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedInfo {
    MonteCarlo(u64),
    Exhaustive,
}

impl fmt::Display for SeedInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedInfo::MonteCarlo(seed) => write!(f, "{seed}"),
            SeedInfo::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub su_id: String,
    /// `counts[i]`: instants served by the (i+1)-th choice.
    pub counts: Vec<u64>,
    pub unmatched: u64,
}

/// Serializable summary of one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub scenario: String,
    pub mode: ExperimentMode,
    pub instants: u64,
    pub seed: SeedInfo,
    /// Number of partial tallies merged into the result.
    pub shards: u64,
    pub rows: Vec<ReportRow>,
}

fn fraction(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

fn six_digits(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl StatsReport {
    pub fn new(
        template: &ScenarioTemplate,
        mode: ExperimentMode,
        seed: SeedInfo,
        shards: u64,
        stats: &AllocationStats,
    ) -> Self {
        let rows = template
            .users()
            .iter()
            .enumerate()
            .map(|(n, u)| ReportRow {
                su_id: u.name.clone(),
                counts: stats.counts(SuId(n)).to_vec(),
                unmatched: stats.unmatched_count(SuId(n)),
            })
            .collect();
        Self {
            scenario: template.label().to_owned(),
            mode,
            instants: stats.instants(),
            seed,
            shards,
            rows,
        }
    }

    pub fn stats(&self) -> Result<AllocationStats, SimulationError> {
        AllocationStats::from_counts(
            self.rows.iter().map(|r| r.counts.clone()).collect(),
            self.rows.iter().map(|r| r.unmatched).collect(),
            self.instants,
        )
    }

    pub fn row(&self, su_id: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.su_id == su_id)
    }

    /// `S(n, rank)` for the row named `su_id`.
    pub fn success(&self, su_id: &str, rank: usize) -> Option<f64> {
        let row = self.row(su_id)?;
        row.counts.get(rank - 1).map(|&c| fraction(c, self.instants))
    }

    pub fn unmatched_share(&self, su_id: &str) -> Option<f64> {
        self.row(su_id).map(|r| fraction(r.unmatched, self.instants))
    }

    /// CSV with header `su_id,rank,count,fraction`; each user's rows list
    /// ranks `1..=M` followed by a row whose rank column reads `unmatched`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let write = |w: &mut csv::Writer<Vec<u8>>, su: &str, rank: &str, count: u64| {
            w.write_record([
                su,
                rank,
                &count.to_string(),
                &format!("{:.6}", fraction(count, self.instants)),
            ])
            .expect("in-memory CSV write");
        };
        w.write_record(["su_id", "rank", "count", "fraction"])
            .expect("in-memory CSV write");
        for row in &self.rows {
            for (i, &c) in row.counts.iter().enumerate() {
                write(&mut w, &row.su_id, &(i + 1).to_string(), c);
            }
            write(&mut w, &row.su_id, "unmatched", row.unmatched);
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
    }

    /// Parses the rows of a CSV produced by [`StatsReport::to_csv`].
    pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>, ReportParseError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["su_id", "rank", "count", "fraction"] {
            return Err(ReportParseError::Format(format!("unexpected header {headers:?}")));
        }
        let mut rows: Vec<ReportRow> = Vec::new();
        for record in reader.records() {
            let record = record?;
            let su = &record[0];
            let count: u64 = record[2]
                .parse()
                .map_err(|_| ReportParseError::Format(format!("bad count `{}`", &record[2])))?;
            if rows.last().map(|r| r.su_id.as_str()) != Some(su) {
                rows.push(ReportRow {
                    su_id: su.to_owned(),
                    counts: Vec::new(),
                    unmatched: 0,
                });
            }
            let row = rows.last_mut().expect("pushed above");
            match &record[1] {
                "unmatched" => row.unmatched = count,
                rank => {
                    let rank: usize = rank
                        .parse()
                        .map_err(|_| ReportParseError::Format(format!("bad rank `{rank}`")))?;
                    if rank != row.counts.len() + 1 {
                        return Err(ReportParseError::Format(format!("rank {rank} out of order for {su}")));
                    }
                    row.counts.push(count);
                }
            }
        }
        Ok(rows)
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            scenario: self.scenario.clone(),
            mode: self.mode.as_str().to_owned(),
            instants: self.instants,
            seed: match self.seed {
                SeedInfo::MonteCarlo(s) => SeedDoc::Seed(s),
                SeedInfo::Exhaustive => SeedDoc::Label("exhaustive".into()),
            },
            shards: self.shards,
            rows: self
                .rows
                .iter()
                .map(|r| RowDoc {
                    su_id: r.su_id.clone(),
                    counts: r.counts.clone(),
                    unmatched: r.unmatched,
                    fractions: r
                        .counts
                        .iter()
                        .map(|&c| six_digits(fraction(c, self.instants)))
                        .collect(),
                    unmatched_fraction: six_digits(fraction(r.unmatched, self.instants)),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportParseError> {
        let doc: ReportDoc = serde_json::from_str(text)?;
        let seed = match doc.seed {
            SeedDoc::Seed(s) => SeedInfo::MonteCarlo(s),
            SeedDoc::Label(l) if l == "exhaustive" => SeedInfo::Exhaustive,
            SeedDoc::Label(l) => return Err(ReportParseError::Format(format!("bad seed `{l}`"))),
        };
        Ok(Self {
            scenario: doc.scenario,
            mode: doc.mode.parse().map_err(ReportParseError::Format)?,
            instants: doc.instants,
            seed,
            shards: doc.shards,
            rows: doc
                .rows
                .into_iter()
                .map(|r| ReportRow {
                    su_id: r.su_id,
                    counts: r.counts,
                    unmatched: r.unmatched,
                })
                .collect(),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportParseError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportDoc {
    scenario: String,
    mode: String,
    instants: u64,
    seed: SeedDoc,
    shards: u64,
    rows: Vec<RowDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SeedDoc {
    Seed(u64),
    Label(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    su_id: String,
    counts: Vec<u64>,
    unmatched: u64,
    // derived; ignored when reading
    fractions: Vec<f64>,
    unmatched_fraction: f64,
}
