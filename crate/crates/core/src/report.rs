//! Report tables assembled from the artifacts of earlier subcommands.
//!
//! CSV cells carry two decimals, truncated toward zero the way benchmark
//! tables conventionally print them (616 / 833 = 0.7395 prints as 0.73). JSON keeps full
//! precision.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cooc::{CoocSummary, Leakage, ObjectBias};
use crate::distance::{DistanceTable, GenderDistanceRow, Level};
use crate::error::{Error, Result};
use crate::estimate::EstimateSummary;
use crate::jsonl;
use crate::revision::ScoreSummary;
use crate::text_only::TextSummary;

/// File names written into a run directory by each subcommand.
pub mod artifact {
    pub const FILTERED_CONTEXTS: &str = "visual_context.jsonl";
    pub const FILTER_SUMMARY: &str = "filter_summary.json";
    pub const SCORED: &str = "scored.jsonl";
    pub const SCORE_SUMMARY: &str = "score_summary.json";
    pub const PREDICTIONS: &str = "predictions.jsonl";
    pub const ESTIMATE_SUMMARY: &str = "estimate_summary.json";
    pub const ESTIMATE_FAILURES: &str = "estimate_failures.jsonl";
    pub const COOC_SUMMARY: &str = "cooc_summary.json";
    pub const COOC_OBJECTS: &str = "cooc_objects.json";
    pub const COOC_OBJECTS_CSV: &str = "cooc_objects.csv";
    pub const LEAKAGE: &str = "leakage.json";
    pub const TEXT_SCORES: &str = "text_scores.jsonl";
    pub const TEXT_SUMMARY: &str = "text_summary.json";
    pub const VALIDATION: &str = "validation.json";
    pub const REPORT: &str = "report.json";

    pub fn distance_json(level: super::Level) -> String {
        format!("distance_{}.json", level.as_str())
    }

    pub fn distance_csv(level: super::Level) -> String {
        format!("distance_{}.csv", level.as_str())
    }
}

/// Two decimals, truncated toward zero.
pub fn fmt2(x: f64) -> String {
    // the nudge keeps values like 0.29 (stored as 0.28999...) at 0.29
    let t = (x.abs() * 100.0 + 1e-9).trunc() / 100.0;
    let t = if x < 0.0 && t != 0.0 { -t } else { t };
    format!("{t:.2}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt2).unwrap_or_default()
}

/// A CSV table held as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let fail = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row).map_err(fail)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

fn distance_row_cells(row: &GenderDistanceRow) -> Vec<String> {
    vec![
        row.subject.clone(),
        fmt_opt(row.s_person),
        fmt_opt(row.s_man),
        fmt_opt(row.s_woman),
        row.n_person.to_string(),
        row.n_man.to_string(),
        row.n_woman.to_string(),
        fmt_opt(row.man_to_neutral),
        fmt_opt(row.woman_to_neutral),
        fmt_opt(row.to_m),
        fmt_opt(row.to_w),
    ]
}

/// Per-subject rows followed by the corpus row.
pub fn distance_table(table: &DistanceTable) -> Table {
    let mut t = Table::new(&[
        "subject", "s_person", "s_man", "s_woman", "n_person", "n_man", "n_woman", "m_to_n",
        "w_to_n", "to_m", "to_w",
    ]);
    for row in &table.rows {
        t.push(distance_row_cells(row));
    }
    if table.corpus.n_person + table.corpus.n_man + table.corpus.n_woman > 0 {
        t.push(distance_row_cells(&table.corpus));
    }
    t
}

pub fn objects_table(rows: &[ObjectBias]) -> Table {
    let mut t = Table::new(&[
        "object", "method", "man", "woman", "captions", "to_m", "to_w",
    ]);
    for r in rows {
        let count = |x: f64| {
            if r.method == "cooc" {
                format!("{x}")
            } else {
                fmt2(x)
            }
        };
        t.push(vec![
            r.object.clone(),
            r.method.clone(),
            count(r.man),
            count(r.woman),
            r.captions.to_string(),
            fmt_opt(r.to_m),
            fmt_opt(r.to_w),
        ]);
    }
    t
}

/// Tables the `report` subcommand can assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Distance,
    Score,
    Estimation,
    Cooc,
    Objects,
    Leakage,
    Text,
}

impl TableKind {
    pub const ALL: [TableKind; 7] = [
        TableKind::Distance,
        TableKind::Score,
        TableKind::Estimation,
        TableKind::Cooc,
        TableKind::Objects,
        TableKind::Leakage,
        TableKind::Text,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Distance => "distance",
            TableKind::Score => "score",
            TableKind::Estimation => "estimation",
            TableKind::Cooc => "cooc",
            TableKind::Objects => "objects",
            TableKind::Leakage => "leakage",
            TableKind::Text => "text",
        }
    }

    /// Subcommand that produces this table's input.
    pub fn producer(self) -> &'static str {
        match self {
            TableKind::Distance => "distance",
            TableKind::Score => "score",
            TableKind::Estimation => "estimate",
            TableKind::Cooc | TableKind::Objects => "cooc",
            TableKind::Leakage => "leakage",
            TableKind::Text => "text-score",
        }
    }

    fn inputs(self) -> Vec<String> {
        match self {
            TableKind::Distance => vec![
                artifact::distance_json(Level::Word),
                artifact::distance_json(Level::Sentence),
            ],
            TableKind::Score => vec![artifact::SCORE_SUMMARY.into()],
            TableKind::Estimation => vec![artifact::ESTIMATE_SUMMARY.into()],
            TableKind::Cooc => vec![artifact::COOC_SUMMARY.into()],
            TableKind::Objects => vec![artifact::COOC_OBJECTS.into()],
            TableKind::Leakage => vec![artifact::LEAKAGE.into()],
            TableKind::Text => vec![artifact::TEXT_SUMMARY.into()],
        }
    }

    /// True when at least one input artifact exists in `run`.
    pub fn available(self, run: &Path) -> bool {
        self.inputs().iter().any(|f| run.join(f).is_file())
    }

    pub fn file_name(self) -> String {
        format!("table_{}.csv", self.name())
    }
}

impl std::str::FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown table `{s}`")))
    }
}

fn read_optional<T: for<'de> Deserialize<'de>>(path: PathBuf) -> Result<Option<T>> {
    if path.is_file() {
        jsonl::read_json(&path).map(Some)
    } else {
        Ok(None)
    }
}

/// Full-precision contents of every assembled table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportData {
    pub label: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub distance: Vec<GenderDistanceRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score: Option<ScoreSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimation: Option<EstimateSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cooc: Option<CoocSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objects: Option<Vec<ObjectBias>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leakage: Option<Leakage>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub text: Option<TextSummary>,
}

#[derive(Debug)]
pub struct Report {
    pub data: ReportData,
    pub tables: Vec<(TableKind, Table)>,
}

const AVERAGE_HEADER: [&str; 10] = [
    "label",
    "level",
    "avg_person",
    "avg_man",
    "avg_woman",
    "m_to_n",
    "w_to_n",
    "to_m",
    "leakage_m",
    "leakage_w",
];

fn average_row(
    label: &str,
    level: &str,
    row: [Option<f64>; 6],
    leak: Option<&Leakage>,
) -> Vec<String> {
    let mut cells = vec![label.to_string(), level.to_string()];
    cells.extend(row.iter().map(|x| fmt_opt(*x)));
    cells.push(fmt_opt(leak.and_then(|l| l.man)));
    cells.push(fmt_opt(leak.and_then(|l| l.woman)));
    cells
}

const COUNTS_HEADER: [&str; 6] = ["label", "man", "woman", "neutral", "to_m", "to_w"];

/// Assemble the requested tables from the artifacts in `run`.
///
/// With `requested` empty, every table whose artifact exists is built.
pub fn build_report(run: &Path, requested: &[TableKind], label: &str) -> Result<Report> {
    let kinds: Vec<TableKind> = if requested.is_empty() {
        let found: Vec<_> = TableKind::ALL
            .into_iter()
            .filter(|k| k.available(run))
            .collect();
        if found.is_empty() {
            return Err(Error::MissingArtifact {
                path: run.to_path_buf(),
                subcommand: "distance`, `score`, `estimate`, `cooc`, `leakage` or `text-score"
                    .into(),
            });
        }
        found
    } else {
        let mut k = requested.to_vec();
        k.sort();
        k.dedup();
        k
    };
    for kind in &kinds {
        if !kind.available(run) {
            return Err(Error::MissingArtifact {
                path: run.join(&kind.inputs()[0]),
                subcommand: kind.producer().into(),
            });
        }
    }

    let leak: Option<Leakage> = read_optional(run.join(artifact::LEAKAGE))?;
    let mut data = ReportData {
        label: label.to_string(),
        ..ReportData::default()
    };
    let mut tables = Vec::new();
    for kind in kinds {
        let table = match kind {
            TableKind::Distance => {
                let mut t = Table::new(&AVERAGE_HEADER);
                for level in [Level::Word, Level::Sentence] {
                    let Some(d) =
                        read_optional::<DistanceTable>(run.join(artifact::distance_json(level)))?
                    else {
                        continue;
                    };
                    let c = &d.corpus;
                    if c.n_person + c.n_man + c.n_woman > 0 {
                        t.push(average_row(
                            label,
                            level.as_str(),
                            [
                                c.s_person,
                                c.s_man,
                                c.s_woman,
                                c.man_to_neutral,
                                c.woman_to_neutral,
                                c.to_m,
                            ],
                            leak.as_ref(),
                        ));
                    }
                    let mut corpus = d.corpus.clone();
                    corpus.subject = level.as_str().to_string();
                    data.distance.push(corpus);
                }
                t
            }
            TableKind::Score => {
                let s: ScoreSummary = jsonl::read_json(&run.join(artifact::SCORE_SUMMARY))?;
                let mut t = Table::new(&AVERAGE_HEADER);
                if s.man.count + s.woman.count + s.person.count > 0 {
                    t.push(average_row(
                        label,
                        "gender_score",
                        [
                            s.person.mean_score,
                            s.man.mean_score,
                            s.woman.mean_score,
                            s.man_to_neutral,
                            s.woman_to_neutral,
                            s.to_m,
                        ],
                        leak.as_ref(),
                    ));
                }
                data.score = Some(s);
                t
            }
            TableKind::Estimation => {
                let s: EstimateSummary = jsonl::read_json(&run.join(artifact::ESTIMATE_SUMMARY))?;
                let mut t = Table::new(&COUNTS_HEADER);
                if s.man + s.woman + s.neutral > 0 {
                    t.push(vec![
                        label.to_string(),
                        s.man.to_string(),
                        s.woman.to_string(),
                        s.neutral.to_string(),
                        fmt_opt(s.to_m),
                        fmt_opt(s.to_w),
                    ]);
                }
                data.estimation = Some(s);
                t
            }
            TableKind::Cooc => {
                let s: CoocSummary = jsonl::read_json(&run.join(artifact::COOC_SUMMARY))?;
                let mut t = Table::new(&COUNTS_HEADER);
                let c = &s.counts;
                if c.man + c.woman + c.neutral + c.mixed > 0 {
                    t.push(vec![
                        label.to_string(),
                        c.man.to_string(),
                        c.woman.to_string(),
                        c.neutral.to_string(),
                        fmt_opt(c.to_m),
                        fmt_opt(c.to_w),
                    ]);
                }
                data.cooc = Some(s);
                t
            }
            TableKind::Objects => {
                let rows: Vec<ObjectBias> = jsonl::read_json(&run.join(artifact::COOC_OBJECTS))?;
                let t = objects_table(&rows);
                data.objects = Some(rows);
                t
            }
            TableKind::Leakage => {
                let l: Leakage = jsonl::read_json(&run.join(artifact::LEAKAGE))?;
                let mut t = Table::new(&[
                    "label",
                    "model_m",
                    "model_w",
                    "human_m",
                    "human_w",
                    "leakage_m",
                    "leakage_w",
                ]);
                t.push(vec![
                    label.to_string(),
                    l.model_man.to_string(),
                    l.model_woman.to_string(),
                    l.human_man.to_string(),
                    l.human_woman.to_string(),
                    fmt_opt(l.man),
                    fmt_opt(l.woman),
                ]);
                data.leakage = Some(l);
                t
            }
            TableKind::Text => {
                let s: TextSummary = jsonl::read_json(&run.join(artifact::TEXT_SUMMARY))?;
                let mut t = Table::new(&["label", "method", "to_m", "to_w"]);
                if s.gt_man + s.gt_woman > 0 {
                    t.push(vec![
                        label.to_string(),
                        "ground_truth".into(),
                        fmt_opt(s.gt_to_m),
                        fmt_opt(s.gt_to_w),
                    ]);
                }
                if s.records > 0 {
                    t.push(vec![
                        label.to_string(),
                        "gender_score".into(),
                        fmt_opt(s.to_m),
                        fmt_opt(s.to_w),
                    ]);
                }
                data.text = Some(s);
                t
            }
        };
        tables.push((kind, table));
    }
    Ok(Report { data, tables })
}

impl Report {
    pub fn write(&self, out: &Path) -> Result<()> {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        for (kind, table) in &self.tables {
            table.write(&out.join(kind.file_name()))?;
        }
        jsonl::write_json(&out.join(artifact::REPORT), &self.data)
    }
}
