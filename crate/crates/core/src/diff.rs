//! Worldview comparison.
//!
//! For one attribute, stacking every agent's belief row gives an n×n matrix
//! `X` where `x[i][j]` is agent i's belief about agent j and `x[j][j]` is
//! agent j's ego value. Each entry is compared against its column's ego value:
//! agreeing entries vanish, disagreeing entries keep the presumed value. The
//! result is the [`DifferenceMatrix`], whose columns are summarised by
//! similarity and difference counts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::agent::AgentId;
use crate::error::{Error, Result};
use crate::worldview::{AttributeKind, AttributeValue, Worldview};

/// Equality tolerances for continuous or noisy attributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Locations within this Euclidean distance (metres) are equal.
    pub location_m: f64,
    /// Bandwidth entries within this many units are equal.
    pub bandwidth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            location_m: 0.5,
            bandwidth: 0,
        }
    }
}

impl Tolerance {
    /// Equality of two values of `kind` describing agent `subject`.
    ///
    /// `subject` matters only for communication rows, whose self-entry is
    /// undefined and skipped.
    pub fn equals(
        &self,
        kind: AttributeKind,
        subject: AgentId,
        a: &AttributeValue,
        b: &AttributeValue,
    ) -> Result<bool> {
        if a.kind() != kind || b.kind() != kind {
            return Err(Error::contract(format!(
                "compared {} with {} under {kind}",
                a.kind(),
                b.kind()
            )));
        }
        Ok(match (a, b) {
            (AttributeValue::Location(p), AttributeValue::Location(q)) => {
                p.distance(*q) <= self.location_m
            }
            (AttributeValue::ScienceZone(p), AttributeValue::ScienceZone(q)) => p == q,
            (AttributeValue::Battery(p), AttributeValue::Battery(q)) => p == q,
            (AttributeValue::Cpu(p), AttributeValue::Cpu(q)) => p == q,
            (AttributeValue::Actions(p), AttributeValue::Actions(q)) => p == q,
            (AttributeValue::CommRow(p), AttributeValue::CommRow(q)) => {
                if p.len() != q.len() || subject.0 >= p.len() {
                    return Err(Error::contract(format!(
                        "communication rows of length {} and {} for agent {subject}",
                        p.len(),
                        q.len()
                    )));
                }
                p.iter()
                    .zip(q)
                    .enumerate()
                    .filter(|(k, _)| *k != subject.0)
                    .all(|(_, (x, y))| x.abs_diff(*y) <= self.bandwidth)
            }
            _ => unreachable!("variants checked against kind above"),
        })
    }

    /// The diff of one entry against its ego value: `None` when they agree,
    /// otherwise the presumed value unchanged.
    pub fn diff_entry(
        &self,
        kind: AttributeKind,
        subject: AgentId,
        ego: &AttributeValue,
        presumed: &AttributeValue,
    ) -> Result<Option<AttributeValue>> {
        if self.equals(kind, subject, ego, presumed)? {
            Ok(None)
        } else {
            Ok(Some(presumed.clone()))
        }
    }
}

/// `entries[i][j]`: agent i's belief about agent j for one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeMatrix {
    pub kind: AttributeKind,
    pub entries: Vec<Vec<AttributeValue>>,
}

impl AttributeMatrix {
    pub fn new(kind: AttributeKind, entries: Vec<Vec<AttributeValue>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::contract(format!(
                    "row {i} has {} entries in a {n}-agent matrix",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| v.kind() != kind) {
                return Err(Error::contract(format!(
                    "row {i} holds a {} value in a {kind} matrix",
                    v.kind()
                )));
            }
        }
        Ok(Self { kind, entries })
    }

    /// Stacks each worldview's belief row. Worldviews must be in owner order.
    pub fn from_worldviews(kind: AttributeKind, worldviews: &[Worldview]) -> Result<Self> {
        for (i, wv) in worldviews.iter().enumerate() {
            if wv.owner.0 != i {
                return Err(Error::contract(format!(
                    "worldview at position {i} belongs to agent {}",
                    wv.owner
                )));
            }
        }
        Self::new(kind, worldviews.iter().map(|wv| wv.row(kind)).collect())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn ego(&self, j: usize) -> &AttributeValue {
        &self.entries[j][j]
    }
}

/// Classification of one Difference Matrix cell.
///
/// `Ego` is state 1 (the diagonal), `Agree` state 2, `Differ` state 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum DiffCell {
    Ego,
    Agree,
    Differ { presumed: AttributeValue },
}

impl DiffCell {
    pub fn state(&self) -> u8 {
        match self {
            DiffCell::Ego => 1,
            DiffCell::Agree => 2,
            DiffCell::Differ { .. } => 3,
        }
    }

    pub fn is_differ(&self) -> bool {
        matches!(self, DiffCell::Differ { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceMatrix {
    pub kind: AttributeKind,
    pub cells: Vec<Vec<DiffCell>>,
}

impl DifferenceMatrix {
    pub fn build(x: &AttributeMatrix, tol: &Tolerance) -> Result<Self> {
        let n = x.n();
        let mut cells = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                if i == j {
                    row.push(DiffCell::Ego);
                    continue;
                }
                let cell = match tol.diff_entry(x.kind, AgentId(j), x.ego(j), &x.entries[i][j])? {
                    None => DiffCell::Agree,
                    Some(presumed) => DiffCell::Differ { presumed },
                };
                row.push(cell);
            }
            cells.push(row);
        }
        Ok(Self { kind: x.kind, cells })
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn column_summary(&self, j: AgentId) -> ColumnSummary {
        let mut s = ColumnSummary {
            column: j,
            similarity_sum: 0,
            difference_sum: 0,
        };
        for row in &self.cells {
            match row[j.0] {
                DiffCell::Agree => s.similarity_sum += 1,
                DiffCell::Differ { .. } => s.difference_sum += 1,
                DiffCell::Ego => {}
            }
        }
        s
    }

    pub fn column_summaries(&self) -> Vec<ColumnSummary> {
        (0..self.n()).map(|j| self.column_summary(AgentId(j))).collect()
    }

    /// `(row, column)` of every state-3 cell, row-major.
    pub fn differing_cells(&self) -> Vec<(AgentId, AgentId)> {
        let mut out = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_differ() {
                    out.push((AgentId(i), AgentId(j)));
                }
            }
        }
        out
    }

    /// Groups agents whose rows disagree with exactly the same columns.
    ///
    /// Empty when the matrix has no state-3 cell. Under a network bipartition
    /// this yields the two sides of the cut.
    pub fn contrarian_sets(&self) -> Vec<Vec<AgentId>> {
        if !self.cells.iter().flatten().any(DiffCell::is_differ) {
            return Vec::new();
        }
        let mut groups: BTreeMap<Vec<bool>, Vec<AgentId>> = BTreeMap::new();
        for (i, row) in self.cells.iter().enumerate() {
            let signature: Vec<bool> = row.iter().map(DiffCell::is_differ).collect();
            groups.entry(signature).or_default().push(AgentId(i));
        }
        let mut sets: Vec<Vec<AgentId>> = groups.into_values().collect();
        sets.sort();
        sets
    }
}

/// Per-column counts of agreeing and disagreeing entries (diagonal excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub column: AgentId,
    pub similarity_sum: usize,
    pub difference_sum: usize,
}

impl ColumnSummary {
    /// Fraction of the other agents agreeing with the column's ego value.
    pub fn agreement(&self) -> f64 {
        let total = self.similarity_sum + self.difference_sum;
        if total == 0 {
            1.0
        } else {
            self.similarity_sum as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncReport {
    pub in_sync: bool,
    pub per_attribute: BTreeMap<AttributeKind, BTreeSet<(AgentId, AgentId)>>,
    pub contrarian_sets: BTreeMap<AttributeKind, Vec<Vec<AgentId>>>,
}

/// Builds the Difference Matrix of every monitored attribute.
pub fn monitored_matrices(
    worldviews: &[Worldview],
    tol: &Tolerance,
) -> Result<BTreeMap<AttributeKind, DifferenceMatrix>> {
    AttributeKind::MONITORED
        .iter()
        .map(|kind| {
            let x = AttributeMatrix::from_worldviews(*kind, worldviews)?;
            Ok((*kind, DifferenceMatrix::build(&x, tol)?))
        })
        .collect()
}

/// Desynchronization check over the monitored attributes.
///
/// Matrices for unmonitored attributes are accepted and ignored.
pub fn detect_desync(matrices: &BTreeMap<AttributeKind, DifferenceMatrix>) -> Result<SyncReport> {
    let mut per_attribute = BTreeMap::new();
    let mut contrarian_sets = BTreeMap::new();
    for kind in AttributeKind::MONITORED {
        let y = matrices.get(&kind).ok_or(Error::MissingAttribute(kind))?;
        per_attribute.insert(kind, y.differing_cells().into_iter().collect::<BTreeSet<_>>());
        contrarian_sets.insert(kind, y.contrarian_sets());
    }
    let in_sync = per_attribute.values().all(BTreeSet::is_empty);
    Ok(SyncReport {
        in_sync,
        per_attribute,
        contrarian_sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldview::{Level, Point};

    fn bt(p: u8) -> AttributeValue {
        AttributeValue::Battery(Level::new(p).unwrap())
    }

    fn battery_matrix(rows: &[[u8; 3]]) -> AttributeMatrix {
        AttributeMatrix::new(
            AttributeKind::BatteryLevel,
            rows.iter().map(|r| r.iter().map(|p| bt(*p)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn equality_semantics() {
        let tol = Tolerance::default();
        let k = AttributeKind::BatteryLevel;
        assert!(tol.equals(k, AgentId(0), &bt(50), &bt(50)).unwrap());

        let loc = |y| AttributeValue::Location(Point::new(0.0, y));
        let lk = AttributeKind::Location;
        assert!(!tol.equals(lk, AgentId(0), &loc(0.0), &loc(2.0 * tol.location_m)).unwrap());
        assert!(tol.equals(lk, AgentId(0), &loc(0.0), &loc(tol.location_m)).unwrap());

        let ck = AttributeKind::Communication;
        let a = AttributeValue::CommRow(vec![0, 3, 1]);
        let b = AttributeValue::CommRow(vec![7, 3, 1]);
        assert!(tol.equals(ck, AgentId(0), &a, &a).unwrap());
        assert!(tol.equals(ck, AgentId(0), &a, &b).unwrap(), "self entry ignored");
        assert!(!tol.equals(ck, AgentId(1), &a, &b).unwrap());
    }

    #[test]
    fn variant_mismatch_is_contract_violation() {
        let tol = Tolerance::default();
        let err = tol
            .equals(AttributeKind::BatteryLevel, AgentId(0), &bt(10), &AttributeValue::ScienceZone(true))
            .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
        assert!(tol
            .diff_entry(AttributeKind::ScienceZone, AgentId(0), &bt(10), &bt(10))
            .is_err());
    }

    #[test]
    fn diff_entry_branches() {
        let tol = Tolerance::default();
        let k = AttributeKind::BatteryLevel;
        assert_eq!(tol.diff_entry(k, AgentId(1), &bt(70), &bt(70)).unwrap(), None);
        assert_eq!(tol.diff_entry(k, AgentId(1), &bt(70), &bt(40)).unwrap(), Some(bt(40)));
        let sz = AttributeKind::ScienceZone;
        assert_eq!(
            tol.diff_entry(sz, AgentId(1), &AttributeValue::ScienceZone(true), &AttributeValue::ScienceZone(false))
                .unwrap(),
            Some(AttributeValue::ScienceZone(false))
        );
    }

    #[test]
    fn identical_rows_agree_everywhere() {
        let x = battery_matrix(&[[90, 50, 70], [90, 50, 70], [90, 50, 70]]);
        let y = DifferenceMatrix::build(&x, &Tolerance::default()).unwrap();
        for (i, row) in y.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                assert_eq!(c.state(), if i == j { 1 } else { 2 });
            }
        }
        let report = detect_desync(&single(y)).unwrap();
        assert!(report.in_sync);
        assert!(report.contrarian_sets.values().all(Vec::is_empty));
    }

    #[test]
    fn single_contrarian_in_column_two() {
        // Agent 0 is the only one holding a stale value for agent 2.
        let x = battery_matrix(&[[90, 50, 40], [90, 50, 70], [90, 50, 70]]);
        let y = DifferenceMatrix::build(&x, &Tolerance::default()).unwrap();
        assert_eq!(y.differing_cells(), vec![(AgentId(0), AgentId(2))]);
        assert_eq!(y.cells[0][2], DiffCell::Differ { presumed: bt(40) });
        let s = y.column_summary(AgentId(2));
        assert_eq!((s.similarity_sum, s.difference_sum), (1, 1));
        assert_eq!(y.contrarian_sets(), vec![vec![AgentId(0)], vec![AgentId(1), AgentId(2)]]);
    }

    #[test]
    fn sync_report_lists_state3_cells() {
        let mut rows = vec![vec![bt(100); 10]; 10];
        rows[7][1] = bt(30);
        let x = AttributeMatrix::new(AttributeKind::BatteryLevel, rows).unwrap();
        let y = DifferenceMatrix::build(&x, &Tolerance::default()).unwrap();
        let report = detect_desync(&single(y)).unwrap();
        assert!(!report.in_sync);
        let cells: Vec<_> = report.per_attribute[&AttributeKind::BatteryLevel].iter().copied().collect();
        assert_eq!(cells, vec![(AgentId(7), AgentId(1))]);
    }

    #[test]
    fn missing_monitored_attribute_is_config_error() {
        let x = battery_matrix(&[[90, 50, 70]; 3]);
        let y = DifferenceMatrix::build(&x, &Tolerance::default()).unwrap();
        let mut m = BTreeMap::new();
        m.insert(AttributeKind::BatteryLevel, y);
        assert!(matches!(detect_desync(&m), Err(Error::MissingAttribute(_))));
    }

    #[test]
    fn rejects_non_square_and_mixed_matrices() {
        assert!(AttributeMatrix::new(AttributeKind::BatteryLevel, vec![vec![bt(10)], vec![bt(10)]]).is_err());
        assert!(AttributeMatrix::new(AttributeKind::ScienceZone, vec![vec![bt(10)]]).is_err());
    }

    // Fills the other monitored panels with a trivially synchronized matrix.
    fn single(y: DifferenceMatrix) -> BTreeMap<AttributeKind, DifferenceMatrix> {
        let n = y.n();
        let mut m = BTreeMap::new();
        for kind in AttributeKind::MONITORED {
            if kind == y.kind {
                continue;
            }
            let v = match kind {
                AttributeKind::ScienceZone => AttributeValue::ScienceZone(false),
                AttributeKind::Communication => AttributeValue::CommRow(vec![0; n]),
                _ => bt(0),
            };
            let x = AttributeMatrix::new(kind, vec![vec![v; n]; n]).unwrap();
            m.insert(kind, DifferenceMatrix::build(&x, &Tolerance::default()).unwrap());
        }
        m.insert(y.kind, y);
        m
    }
}
