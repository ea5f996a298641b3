//! Set partitions of the subsystem labels `{1, ..., N}`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::state::{SubsetMask, MAX_SUBSYSTEMS};

/// Disjoint nonempty blocks covering `{1, ..., N}`, stored as bitmasks and
/// kept sorted by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<u32>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<u32>) -> Result<Self> {
        if n == 0 || n > MAX_SUBSYSTEMS {
            return Err(Error::Partition(format!("N = {n} out of range 1..={MAX_SUBSYSTEMS}")));
        }
        let full = (1u32 << n) - 1;
        let mut seen = 0u32;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::Partition("empty block".into()));
            }
            if b & !full != 0 {
                return Err(Error::Partition(format!("block {b:#b} has labels beyond {n}")));
            }
            if b & seen != 0 {
                return Err(Error::Partition("blocks overlap".into()));
            }
            seen |= b;
        }
        if seen != full {
            return Err(Error::Partition(format!("blocks do not cover 1..{n}")));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { n, blocks })
    }

    /// The bipartition `side | complement`.
    pub fn cut(side: SubsetMask) -> Self {
        Partition::new(side.n(), vec![side.bits(), side.complement().bits()]).expect("mask is proper")
    }

    /// Blocks given by 1-based labels.
    pub fn from_labels(n: usize, blocks: &[&[usize]]) -> Result<Self> {
        let masks = blocks
            .iter()
            .map(|b| {
                b.iter().try_fold(0u32, |acc, &l| {
                    if l == 0 || l > n {
                        Err(Error::Partition(format!("label {l} outside 1..={n}")))
                    } else if acc >> (l - 1) & 1 == 1 {
                        Err(Error::Partition(format!("label {l} repeated")))
                    } else {
                        Ok(acc | 1 << (l - 1))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(n, masks)
    }

    /// Parses `"1|24|3"` over `n` subsystems.
    pub fn parse_with(text: &str, n: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in text.trim().split('|') {
            let labels = part
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Partition(format!("bad label {c:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if labels.is_empty() {
                return Err(Error::Partition(format!("empty block in {text:?}")));
            }
            blocks.push(labels);
        }
        let refs: Vec<&[usize]> = blocks.iter().map(|b| b.as_slice()).collect();
        Partition::from_labels(n, &refs).map_err(|e| match e {
            Error::Partition(msg) => Error::Partition(format!("{text:?}: {msg}")),
            other => other,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks `M`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn block_labels(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|&b| (0..self.n).filter(|k| b >> k & 1 == 1).map(|k| k + 1).collect())
            .collect()
    }

    /// Block sizes in decreasing order.
    pub fn profile(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.blocks.iter().map(|b| b.count_ones() as usize).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    }

    /// Union of the blocks selected by the bits of `sel`.
    fn union(&self, sel: u32) -> u32 {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| sel >> i & 1 == 1)
            .fold(0, |acc, (_, &b)| acc | b)
    }

    /// Every nonempty proper subset of `{1..N}` that is a union of blocks;
    /// there are `2^M - 2` of them.
    pub fn realized_subsets(&self) -> BTreeSet<SubsetMask> {
        let m = self.len();
        if m < 2 {
            return BTreeSet::new();
        }
        (1..(1u32 << m) - 1)
            .map(|sel| SubsetMask::new(self.union(sel), self.n).expect("proper union"))
            .collect()
    }

    /// The `2^(M-1) - 1` coarse bipartitions, each represented by the side
    /// containing the first block.
    pub fn cuts(&self) -> Vec<SubsetMask> {
        let m = self.len();
        if m < 2 {
            return Vec::new();
        }
        (0..(1u32 << (m - 1)) - 1)
            .map(|rest| {
                let sel = 1 | rest << 1;
                SubsetMask::new(self.union(sel), self.n).expect("proper union")
            })
            .collect()
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.block_labels().cmp(&other.block_labels()))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .block_labels()
            .iter()
            .map(|b| b.iter().map(|l| l.to_string()).collect())
            .collect();
        write!(f, "{}", text.join("|"))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// `N` is taken to be the number of labels.
    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().filter(|c| c.is_ascii_digit()).count();
        Partition::parse_with(s, n)
    }
}

/// All partitions of `{1..n}` into exactly `m` blocks, in canonical order.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<Vec<Partition>> {
    if n > MAX_SUBSYSTEMS || m < 2 || m > n {
        return Err(Error::Domain(format!(
            "need 2 <= M <= N <= {MAX_SUBSYSTEMS}, got N = {n}, M = {m}"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    grow(&mut rgs, 1, 1, m, &mut out);
    out.sort();
    Ok(out)
}

/// Restricted growth strings: `rgs[i]` is the block of element `i`, and each
/// new block index is at most one more than the current maximum.
fn grow(rgs: &mut [usize], pos: usize, used: usize, m: usize, out: &mut Vec<Partition>) {
    let n = rgs.len();
    if pos == n {
        if used == m {
            let mut blocks = vec![0u32; m];
            for (i, &b) in rgs.iter().enumerate() {
                blocks[b] |= 1 << i;
            }
            out.push(Partition::new(n, blocks).expect("valid growth string"));
        }
        return;
    }
    // not enough elements left to open the remaining blocks
    if used + (n - pos) < m {
        return;
    }
    for b in 0..=used.min(m - 1) {
        rgs[pos] = b;
        let next = if b == used { used + 1 } else { used };
        grow(rgs, pos + 1, next, m, out);
    }
}

/// The six `i|j|kl` tripartitions of four subsystems.
pub fn four_party_tripartitions() -> Vec<Partition> {
    enumerate_partitions(4, 3).expect("4 >= 3")
}

/// The three `ij|kl` bipartitions of four subsystems.
pub fn four_party_pair_cuts() -> Vec<Partition> {
    enumerate_partitions(4, 2)
        .expect("4 >= 2")
        .into_iter()
        .filter(|p| p.profile() == [2, 2])
        .collect()
}
