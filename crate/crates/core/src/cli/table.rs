use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context};

use crate::local_algebra::{FgModule, TableCell};

const BUILTIN: &str = include_str!("../../data/expected-table.txt");

/// The published table, one cell per (r, k) with 0 ≤ k ≤ r−5.
#[derive(Clone, Debug)]
pub struct ExpectedTable {
    cells: BTreeMap<(u32, u32), TableCell>,
}

impl ExpectedTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("shipped expected table parses")
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cells = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(r), Some(k), Some(cell), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                bail!("line {}: expected `r k cell`", n + 1);
            };
            let r: u32 = r.parse().with_context(|| format!("line {}", n + 1))?;
            let k: u32 = k.parse().with_context(|| format!("line {}", n + 1))?;
            let cell = TableCell::parse(cell).map_err(|e| anyhow!("line {}: {e}", n + 1))?;
            cells.insert((r, k), cell);
        }
        Ok(ExpectedTable { cells })
    }

    pub fn rows(&self) -> Vec<u32> {
        let mut rs: Vec<u32> = self.cells.keys().map(|&(r, _)| r).collect();
        rs.dedup();
        rs
    }

    /// Displayed columns of row r.
    pub fn columns(&self, r: u32) -> Vec<u32> {
        self.cells.keys().filter(|&&(rr, _)| rr == r).map(|&(_, k)| k).collect()
    }

    /// The cell, with k beyond the last column read from the stable column.
    pub fn get(&self, r: u32, k: u32) -> Option<&TableCell> {
        let last = *self.columns(r).last()?;
        self.cells.get(&(r, k.min(last)))
    }

    pub fn component(&self, p: u64, r: u32, k: u32) -> Option<FgModule> {
        let c = self.get(r, k)?;
        match p {
            2 => Some(c.two.clone()),
            3 => Some(c.three.clone()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_cells() {
        let t = ExpectedTable::builtin();
        assert_eq!(t.get(11, 4).unwrap().render(), "8+4+∞+9");
        assert_eq!(t.get(15, 6).unwrap().render(), "64+27");
        assert_eq!(t.get(8, 0).unwrap().render(), "2");
        assert_eq!(t.get(15, 30).unwrap().render(), "128+27");
        assert_eq!(t.rows(), (7..=15).collect::<Vec<_>>());
        for r in 7..=15 {
            assert_eq!(t.columns(r), (0..=r - 5).collect::<Vec<_>>());
        }
    }
}
