//! Cohomology tables `(a, i) -> h^i(F(a))` over a window, with per-cell
//! knowledge status, plus their JSON and CSV forms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bott::CohomologyVector;
use crate::lattice::{LatticeError, MultiDegree, ProductSpace, Window};

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Computed,
    InferredZero,
    Unknown,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Computed => "computed",
            CellStatus::InferredZero => "inferred_zero",
            CellStatus::Unknown => "unknown",
        })
    }
}

impl FromStr for CellStatus {
    type Err = TableError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "computed" => Ok(CellStatus::Computed),
            "inferred_zero" => Ok(CellStatus::InferredZero),
            "unknown" => Ok(CellStatus::Unknown),
            other => Err(TableError::Malformed(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub dim: u64,
    pub status: CellStatus,
}

impl Cell {
    pub const UNKNOWN: Cell = Cell { dim: 0, status: CellStatus::Unknown };
    pub const INFERRED_ZERO: Cell = Cell { dim: 0, status: CellStatus::InferredZero };

    pub fn computed(dim: u64) -> Self {
        Cell { dim, status: CellStatus::Computed }
    }

    /// The dimension, unless the cell is unknown.
    pub fn known(&self) -> Option<u64> {
        match self.status {
            CellStatus::Unknown => None,
            _ => Some(self.dim),
        }
    }
}

/// `h^i(F(a))` for every `a` in a window and `0 <= i <= m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyTable {
    space: ProductSpace,
    window: Window,
    cells: BTreeMap<MultiDegree, Vec<Cell>>,
}

impl CohomologyTable {
    /// Every cell unknown.
    pub fn unknown(space: ProductSpace, window: Window) -> Self {
        let row = vec![Cell::UNKNOWN; space.m() + 1];
        let cells = window.points().into_iter().map(|a| (a, row.clone())).collect();
        CohomologyTable { space, window, cells }
    }

    /// Every cell computed, from one vector per window point (in [`Window::points`] order).
    pub fn from_vectors(space: ProductSpace, window: Window, vectors: Vec<CohomologyVector>) -> Self {
        let points = window.points();
        assert_eq!(points.len(), vectors.len());
        let cells = points
            .into_iter()
            .zip(vectors)
            .map(|(a, v)| {
                assert_eq!(v.len(), space.m() + 1);
                (a, v.0.into_iter().map(Cell::computed).collect())
            })
            .collect();
        CohomologyTable { space, window, cells }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    /// `None` outside the window or for `i > m`.
    pub fn cell(&self, a: &MultiDegree, i: usize) -> Option<&Cell> {
        self.cells.get(a).and_then(|row| row.get(i))
    }

    /// Known dimension. Indices outside `[0, m]` are identically zero.
    pub fn known(&self, a: &MultiDegree, i: i64) -> Option<u64> {
        if i < 0 || i > self.m() as i64 {
            return Some(0);
        }
        self.cell(a, i as usize).and_then(Cell::known)
    }

    pub fn set(&mut self, a: &MultiDegree, i: usize, cell: Cell) {
        let row = self.cells.get_mut(a).expect("twist inside the table window");
        row[i] = cell;
    }

    pub fn vector(&self, a: &MultiDegree) -> Option<Vec<Cell>> {
        self.cells.get(a).cloned()
    }

    /// Rows in lexicographic twist order.
    pub fn rows(&self) -> impl Iterator<Item = (&MultiDegree, &[Cell])> {
        self.cells.iter().map(|(a, r)| (a, r.as_slice()))
    }

    /// Grow the window to include `other`; new cells are unknown.
    pub fn extend_to(&mut self, other: &Window) {
        let hull = self.window.hull(other);
        let row = vec![Cell::UNKNOWN; self.m() + 1];
        for a in hull.points() {
            self.cells.entry(a).or_insert_with(|| row.clone());
        }
        self.window = hull;
    }

    pub fn count_status(&self, status: CellStatus) -> usize {
        self.cells.values().flatten().filter(|c| c.status == status).count()
    }

    pub fn is_fully_known(&self) -> bool {
        self.count_status(CellStatus::Unknown) == 0
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            space: self.space.clone(),
            window: self.window.clone(),
            cells: self
                .cells
                .iter()
                .flat_map(|(a, row)| {
                    row.iter().enumerate().map(move |(i, c)| CellJson { a: a.clone(), i, dim: c.dim, status: c.status })
                })
                .collect(),
        }
    }

    pub fn from_json(j: TableJson) -> Result<Self, TableError> {
        let mut table = CohomologyTable::unknown(j.space, j.window);
        let mut seen = 0usize;
        for c in j.cells {
            if !table.window.contains(&c.a) || c.i > table.m() {
                return Err(TableError::Malformed(format!("cell {} i={} outside the table", c.a, c.i)));
            }
            if c.status == CellStatus::InferredZero && c.dim != 0 {
                return Err(TableError::Malformed(format!("inferred_zero cell {} i={} has dim {}", c.a, c.i, c.dim)));
            }
            table.set(&c.a, c.i, Cell { dim: c.dim, status: c.status });
            seen += 1;
        }
        if seen != table.window.size() * (table.m() + 1) {
            return Err(TableError::Malformed(format!("expected {} cells, found {seen}", table.window.size() * (table.m() + 1))));
        }
        Ok(table)
    }

    /// CSV with header `a1,...,at,i,dim,status`.
    pub fn to_csv(&self) -> String {
        let t = self.space.t();
        let mut out: Vec<String> = (1..=t).map(|j| format!("a{j}")).collect();
        out.extend(["i", "dim", "status"].map(String::from));
        let mut s = out.join(",");
        s.push('\n');
        for (a, row) in &self.cells {
            for (i, c) in row.iter().enumerate() {
                let coords: Vec<String> = a.0.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("{},{i},{},{}\n", coords.join(","), c.dim, c.status));
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    pub a: MultiDegree,
    pub i: usize,
    pub dim: u64,
    pub status: CellStatus,
}

/// Serialized table: `{space, window, cells: [{a, i, dim, status}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub space: ProductSpace,
    pub window: Window,
    pub cells: Vec<CellJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bott::line_bundle_h;

    fn o00_table() -> CohomologyTable {
        let s = ProductSpace::new(vec![1, 1]).unwrap();
        let w = Window::cube(2, -1, 1).unwrap();
        let v = w.points().iter().map(|a| line_bundle_h(&s, a)).collect();
        CohomologyTable::from_vectors(s, w, v)
    }

    #[test]
    fn lookups() {
        let t = o00_table();
        let z = MultiDegree(vec![0, 0]);
        assert_eq!(t.known(&z, 0), Some(1));
        assert_eq!(t.known(&z, -1), Some(0));
        assert_eq!(t.known(&z, 3), Some(0));
        assert_eq!(t.known(&MultiDegree(vec![5, 5]), 0), None);
        assert!(t.is_fully_known());
    }

    #[test]
    fn extension_adds_unknowns() {
        let mut t = o00_table();
        t.extend_to(&t.window().extended_down(1));
        assert_eq!(t.window().size(), 16);
        assert_eq!(t.count_status(CellStatus::Unknown), 7 * 3);
    }

    #[test]
    fn json_round_trip_and_csv() {
        let mut t = o00_table();
        t.set(&MultiDegree(vec![-1, -1]), 1, Cell::INFERRED_ZERO);
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back = CohomologyTable::from_json(serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, t);
        let csv = t.to_csv();
        assert!(csv.starts_with("a1,a2,i,dim,status\n-1,-1,0,0,computed\n"));
        assert_eq!(csv.lines().count(), 1 + 9 * 3);
    }

    #[test]
    fn malformed_json_is_rejected() {
        let t = o00_table();
        let mut j = t.to_json();
        j.cells.pop();
        assert!(CohomologyTable::from_json(j).is_err());
        let mut j = t.to_json();
        j.cells[0].status = CellStatus::InferredZero;
        j.cells[0].dim = 3;
        assert!(CohomologyTable::from_json(j).is_err());
    }
}
