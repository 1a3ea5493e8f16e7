use std::fmt;

use super::rigid::{parse_numbers, EpiEnumerator};
use super::CombinatError;

/// A partition of `{0, ..., n-1}` with blocks listed by increasing minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Normalizes block contents and order; rejects overlaps, gaps and empty
    /// blocks.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, CombinatError> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(CombinatError::NotPartition("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x >= n || seen[x] {
                    return Err(CombinatError::NotPartition(format!("element {x} repeated or out of range")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(CombinatError::NotPartition("blocks do not cover the ground set".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// From a restricted-growth string: element `i` lies in block `rgs[i]`.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().map(|&b| b + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self { n: rgs.len(), blocks }
    }

    pub fn to_rgs(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x] = b;
            }
        }
        out
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_rgs(&(0..n).collect::<Vec<_>>())
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Whether every block of `finer` lies inside a block of `self`.
    pub fn is_coarser_than(&self, finer: &SetPartition) -> bool {
        if self.n != finer.n {
            return false;
        }
        let mine = self.to_rgs();
        finer.blocks.iter().all(|b| b.iter().all(|&x| mine[x] == mine[b[0]]))
    }

    /// Parses `"n k"` followed by one line per block.
    pub fn parse_text(text: &str) -> Result<Self, CombinatError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = parse_numbers(lines.next().ok_or_else(|| CombinatError::Parse("empty input".into()))?)?;
        let [n, k] = header[..] else {
            return Err(CombinatError::Parse("header must be \"n k\"".into()));
        };
        let blocks = lines.map(parse_numbers).collect::<Result<Vec<_>, _>>()?;
        if blocks.len() != k {
            return Err(CombinatError::Parse(format!("expected {k} blocks, found {}", blocks.len())));
        }
        Self::new(n, blocks)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.blocks.len());
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            out.push_str(&items.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Partitions of `n` into exactly `k` blocks, in restricted-growth order.
pub fn enumerate_partitions(n: usize, k: usize) -> Result<impl Iterator<Item = SetPartition>, CombinatError> {
    if k == 0 && n > 0 || k > n {
        return Err(CombinatError::BadArity { n, k });
    }
    let e = EpiEnumerator::new(n, k)?;
    let total = e.count();
    Ok((0..total).filter_map(move |i| e.nth(i)).map(|rgs| SetPartition::from_rgs(&rgs)))
}

/// The `k`-block partitions whose blocks are unions of blocks of `p`, in
/// restricted-growth order of the resulting partitions.
pub fn coarsenings(p: &SetPartition, k: usize) -> Result<impl Iterator<Item = SetPartition> + '_, CombinatError> {
    let m = p.num_blocks();
    if k == 0 && m > 0 || k > m {
        return Err(CombinatError::BadArity { n: m, k });
    }
    // Blocks are ordered by minimum, so an RGS on blocks yields an RGS on
    // elements and the orders agree.
    let e = EpiEnumerator::new(m, k)?;
    let total = e.count();
    Ok((0..total).filter_map(move |i| e.nth(i)).map(move |merge| {
        let mut rgs = vec![0; p.n];
        for (b, block) in p.blocks.iter().enumerate() {
            for &x in block {
                rgs[x] = merge[b];
            }
        }
        SetPartition::from_rgs(&rgs)
    }))
}
