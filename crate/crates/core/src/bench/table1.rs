//! The published worst-case scheduling results, and the identities every
//! row must satisfy under the default cost and reliability parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::icm::{CostModel, InjectedType};
use crate::reliability::{min_extra_offline, min_extra_online, ReliabilityParams};

pub const TABLE1_CSV: &str = include_str!("../../data/table1.csv");

pub const VARIANTS: [&str; 2] = ["opt", "unopt"];
pub const SCHEDULERS: [&str; 3] = ["asap", "alapt", "alaps"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    /// Blank in a few rows of the source table.
    pub t: Option<u64>,
    pub s: u64,
    pub bb: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub circuit: String,
    pub a: u64,
    pub y: u64,
    /// Indexed by variant (optimised, unoptimised) then scheduler.
    pub cells: [[Cell; 3]; 2],
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: missing column `{column}`")]
    MissingColumn { row: usize, column: String },
    #[error("row {row}, column `{column}`: `{value}` is not an integer")]
    BadValue { row: usize, column: String, value: String },
}

pub fn load_table1(csv_text: &str) -> Result<Vec<Table1Row>, FixtureError> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers()?.clone();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let field = |column: &str| -> Result<&str, FixtureError> {
            headers
                .iter()
                .position(|h| h == column)
                .and_then(|k| record.get(k))
                .map(str::trim)
                .ok_or_else(|| FixtureError::MissingColumn { row: i + 1, column: column.into() })
        };
        let optional = |column: &str| -> Result<Option<u64>, FixtureError> {
            let v = field(column)?;
            if v.is_empty() {
                return Ok(None);
            }
            v.parse()
                .map(Some)
                .map_err(|_| FixtureError::BadValue { row: i + 1, column: column.into(), value: v.into() })
        };
        let number = |column: &str| -> Result<u64, FixtureError> {
            optional(column)?.ok_or_else(|| FixtureError::BadValue { row: i + 1, column: column.into(), value: String::new() })
        };
        let mut cells = [[Cell { t: None, s: 0, bb: 0 }; 3]; 2];
        for (v, variant) in VARIANTS.iter().enumerate() {
            for (k, sched) in SCHEDULERS.iter().enumerate() {
                cells[v][k] = Cell {
                    t: optional(&format!("{variant}_{sched}_T"))?,
                    s: number(&format!("{variant}_{sched}_S"))?,
                    bb: number(&format!("{variant}_{sched}_BB"))?,
                };
            }
        }
        rows.push(Table1Row { circuit: field("circuit")?.to_string(), a: number("A")?, y: number("Y")?, cells });
    }
    Ok(rows)
}

/// The shipped fixture.
pub fn table1_fixture() -> Vec<Table1Row> {
    load_table1(TABLE1_CSV).expect("bundled fixture parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Check {
    /// BB = T * S in all six cells.
    BbIdentity,
    /// ASAP S equals the phase-one column width in both variants.
    AsapSpace,
    /// S(ALAPT) - S(ALAPS) equals the extra online trials times the A width.
    OnlineSpaceGap,
    /// Y = 2A.
    YRatio,
}

impl Table1Check {
    pub const ALL: [Table1Check; 4] =
        [Table1Check::BbIdentity, Table1Check::AsapSpace, Table1Check::OnlineSpaceGap, Table1Check::YRatio];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Nothing contradicts the identity but a value it needs is blank.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Table1Check,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub circuit: String,
    pub checks: Vec<CheckResult>,
}

impl RowReport {
    pub fn status(&self, check: Table1Check) -> CheckStatus {
        self.checks.iter().find(|c| c.check == check).map(|c| c.status).unwrap_or(CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Report {
    pub rows: Vec<RowReport>,
}

impl Table1Report {
    pub fn count(&self, check: Table1Check, status: CheckStatus) -> usize {
        self.rows.iter().filter(|r| r.status(check) == status).count()
    }

    /// Rows where no check failed.
    pub fn rows_without_failure(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.checks.iter().all(|c| c.status != CheckStatus::Fail))
            .count()
    }
}

pub fn check_table1(rows: &[Table1Row], rel: &ReliabilityParams, cm: &CostModel) -> Table1Report {
    let width_a = u64::from(cm.effective(InjectedType::A.op_kind()).space);
    let width_y = u64::from(cm.effective(InjectedType::Y.op_kind()).space);
    let online_s = min_extra_online(rel).s;
    let offline_rel = rel.per_guarantee(2);
    let rows = rows
        .iter()
        .map(|row| {
            let mut checks = Vec::with_capacity(4);

            let mut status = CheckStatus::Pass;
            let mut notes = Vec::new();
            for (v, variant) in VARIANTS.iter().enumerate() {
                for (k, sched) in SCHEDULERS.iter().enumerate() {
                    let cell = row.cells[v][k];
                    match cell.t {
                        Some(t) if t * cell.s != cell.bb => {
                            status = CheckStatus::Fail;
                            notes.push(format!("{variant}_{sched}: {t}*{} != {}", cell.s, cell.bb));
                        }
                        Some(_) => {}
                        None => {
                            if cell.s == 0 || cell.bb % cell.s != 0 {
                                status = CheckStatus::Fail;
                                notes.push(format!("{variant}_{sched}: T blank and S does not divide BB"));
                            } else {
                                if status == CheckStatus::Pass {
                                    status = CheckStatus::Incomplete;
                                }
                                notes.push(format!("{variant}_{sched}: T blank, BB/S = {}", cell.bb / cell.s));
                            }
                        }
                    }
                }
            }
            checks.push(CheckResult { check: Table1Check::BbIdentity, status, detail: notes.join("; ") });

            let s_a = if row.a > 0 { min_extra_offline(row.a, &offline_rel).s } else { 0 };
            let s_y = if row.y > 0 { min_extra_offline(row.y, &offline_rel).s } else { 0 };
            let expected = width_a * (row.a + s_a) + width_y * (row.y + s_y);
            let got = [row.cells[0][0].s, row.cells[1][0].s];
            checks.push(CheckResult {
                check: Table1Check::AsapSpace,
                status: pass_if(got.iter().all(|&s| s == expected)),
                detail: format!(
                    "{width_a}*({}+{s_a}) + {width_y}*({}+{s_y}) = {expected}; table {} / {}",
                    row.a, row.y, got[0], got[1]
                ),
            });

            let gap = online_s * width_a;
            let gaps: Vec<i64> = (0..2).map(|v| row.cells[v][1].s as i64 - row.cells[v][2].s as i64).collect();
            checks.push(CheckResult {
                check: Table1Check::OnlineSpaceGap,
                status: pass_if(gaps.iter().all(|&g| g == gap as i64)),
                detail: format!("expected {gap}; table {} / {}", gaps[0], gaps[1]),
            });

            checks.push(CheckResult {
                check: Table1Check::YRatio,
                status: pass_if(row.y == 2 * row.a),
                detail: format!("A={} Y={}", row.a, row.y),
            });
            RowReport { circuit: row.circuit.clone(), checks }
        })
        .collect();
    Table1Report { rows }
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shape() {
        let rows = table1_fixture();
        assert_eq!(rows.len(), 36);
        let first = &rows[0];
        assert_eq!(first.circuit, "3_17_13");
        assert_eq!((first.a, first.y), (14, 28));
        assert_eq!(first.cells[0][1], Cell { t: Some(650), s: 94, bb: 61100 });
        let blanks = rows.iter().flat_map(|r| r.cells.iter().flatten()).filter(|c| c.t.is_none()).count();
        assert_eq!(blanks, 3);
    }

    #[test]
    fn detects_a_broken_row() {
        let mut rows = table1_fixture();
        rows.truncate(1);
        rows[0].cells[1][0].s += 1;
        rows[0].cells[0][1].s += 1;
        rows[0].y += 1;
        let report = check_table1(&rows, &ReliabilityParams::default(), &CostModel::default());
        for check in Table1Check::ALL {
            assert_eq!(report.rows[0].status(check), CheckStatus::Fail, "{check:?}");
        }
    }

    #[test]
    fn load_errors() {
        assert!(matches!(load_table1("circuit,A\nx,1\n"), Err(FixtureError::MissingColumn { .. })));
        let bad = TABLE1_CSV.replacen("337", "3x7", 1);
        assert!(matches!(load_table1(&bad), Err(FixtureError::BadValue { .. })));
    }
}
