use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Kind, Params, RamseyError};

/// A coloring of the universe of `kind` at `params`, keyed by structure code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringTable {
    pub kind: Kind,
    pub params: Params,
    pub r: u32,
    pub table: BTreeMap<u64, u32>,
}

impl ColoringTable {
    pub fn new(kind: Kind, params: Params, r: u32, table: BTreeMap<u64, u32>) -> Result<Self, RamseyError> {
        if r == 0 {
            return Err(RamseyError::BadParams("r must be positive".into()));
        }
        if let Some((code, c)) = table.iter().find(|(_, &c)| c >= r) {
            return Err(RamseyError::BadColoring(format!("color {c} of structure {code} is not below r = {r}")));
        }
        Ok(Self { kind, params, r, table })
    }

    /// Colors listed in universe order.
    pub fn from_colors(kind: Kind, params: Params, r: u32, universe: &[u64], colors: &[u32]) -> Result<Self, RamseyError> {
        Self::new(kind, params, r, universe.iter().copied().zip(colors.iter().copied()).collect())
    }

    pub fn constant(kind: Kind, params: Params, universe: &[u64]) -> Self {
        Self { kind, params, r: 1, table: universe.iter().map(|&c| (c, 0)).collect() }
    }

    /// Colors aligned with `universe`; fails unless the table is total on it
    /// and has no extra keys.
    pub fn aligned(&self, universe: &[u64]) -> Result<Vec<u32>, RamseyError> {
        if self.table.len() != universe.len() {
            return Err(RamseyError::BadColoring(format!(
                "table has {} entries, universe has {}",
                self.table.len(),
                universe.len()
            )));
        }
        universe
            .iter()
            .map(|c| self.table.get(c).copied().ok_or_else(|| RamseyError::BadColoring(format!("structure {c} is uncolored"))))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,p,n,k,r\n");
        let _ = writeln!(out, "{},{},{},{},{}", self.kind, self.params.p, self.params.n, self.params.k, self.r);
        out.push_str("code,color\n");
        for (code, color) in &self.table {
            let _ = writeln!(out, "{code},{color}");
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, RamseyError> {
        let bad = |msg: String| RamseyError::Parse(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("kind,p,n,k,r") {
            return Err(bad("first line must be \"kind,p,n,k,r\"".into()));
        }
        let head: Vec<&str> = lines.next().ok_or_else(|| bad("missing parameter line".into()))?.split(',').collect();
        let [kind, p, n, k, r] = head[..] else {
            return Err(bad("parameter line needs five fields".into()));
        };
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let kind: Kind = kind.trim().parse()?;
        let params = Params { p: num(p)? as u32, n: num(n)? as usize, k: num(k)? as usize };
        let r = num(r)? as u32;
        if lines.next() != Some("code,color") {
            return Err(bad("third line must be \"code,color\"".into()));
        }
        let mut table = BTreeMap::new();
        for line in lines {
            let (code, color) = line.split_once(',').ok_or_else(|| bad(format!("bad row {line:?}")))?;
            if table.insert(num(code)?, num(color)? as u32).is_some() {
                return Err(bad(format!("duplicate code in row {line:?}")));
            }
        }
        Self::new(kind, params, r, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let t = ColoringTable::new(
            Kind::Grassmannian,
            Params { p: 2, n: 2, k: 1 },
            2,
            [(1, 0), (2, 0), (3, 1)].into_iter().collect(),
        )
        .unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("kind,p,n,k,r\ngrassmannian,2,2,1,2\ncode,color\n1,0\n"));
        assert_eq!(ColoringTable::parse_csv(&csv).unwrap(), t);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ColoringTable::parse_csv("kind,p,n,k,r\nsquare,2,2,1,2\ncode,color\n1,2\n").is_err());
        assert!(ColoringTable::parse_csv("kind,p,n,k,r\nsquare,2,2,1,2\ncode,color\n1,0\n1,1\n").is_err());
        assert!(ColoringTable::parse_csv("kind,p,n,k,r\nbogus,2,2,1,2\ncode,color\n").is_err());
    }
}
