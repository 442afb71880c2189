//! Indices `(k_1, ..., k_n)` and the sets `I(k, n, s)` / `I_0(k, n, s)` of
//! indices with weight `k`, depth `n` and height `s` (admissible ones only
//! for `I_0`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A tuple of positive integers; the empty tuple is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Index(Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub weight: u32,
    pub depth: u32,
    pub height: u32,
    pub admissible: bool,
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(domain("index entries must be positive"));
        }
        Ok(Index(parts))
    }

    pub fn empty() -> Self {
        Index(Vec::new())
    }

    /// `(1, ..., 1, last)` with `ones` leading ones.
    pub fn ones_then(ones: usize, last: u32) -> Result<Self> {
        let mut parts = vec![1; ones];
        parts.push(last);
        Index::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn depth(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn height(&self) -> u32 {
        self.0.iter().filter(|&&k| k >= 2).count() as u32
    }

    pub fn is_admissible(&self) -> bool {
        self.0.last().is_some_and(|&k| k >= 2)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn classify(&self) -> Classification {
        Classification {
            weight: self.weight(),
            depth: self.depth(),
            height: self.height(),
            admissible: self.is_admissible(),
        }
    }

    /// Drops the last entry.
    pub fn prefix(&self) -> Index {
        let mut p = self.0.clone();
        p.pop();
        Index(p)
    }

    /// The index with its last entry lowered by one; `None` when that entry
    /// is 1 (or the index is empty).
    pub fn lowered(&self) -> Option<Index> {
        match self.0.last() {
            Some(&k) if k >= 2 => {
                let mut p = self.0.clone();
                *p.last_mut().unwrap() = k - 1;
                Some(Index(p))
            }
            _ => None,
        }
    }
}

pub fn classify(idx: &Index) -> Classification {
    idx.classify()
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Accepts `(1,2)`, `1,2`, `(2)`, `()` and the empty-set sign.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "∅" {
            return Ok(Index::empty());
        }
        let inner = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
        if inner.trim().is_empty() {
            return Ok(Index::empty());
        }
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad index entry {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Index::new(parts)
    }
}

impl TryFrom<Vec<u32>> for Index {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Index::new(parts)
    }
}

impl From<Index> for Vec<u32> {
    fn from(idx: Index) -> Vec<u32> {
        idx.0
    }
}

fn extend(
    prefix: &mut Vec<u32>,
    weight_left: u32,
    depth_left: u32,
    height_left: u32,
    admissible_only: bool,
    out: &mut Vec<Index>,
) {
    if depth_left == 0 {
        if weight_left == 0 && height_left == 0 {
            out.push(Index(prefix.clone()));
        }
        return;
    }
    if height_left > depth_left {
        return;
    }
    // each remaining slot takes at least 1, and each remaining tall slot at least 2
    if weight_left < depth_left + height_left {
        return;
    }
    let last = depth_left == 1;
    let max_part = weight_left - (depth_left - 1);
    for part in 1..=max_part {
        let tall = part >= 2;
        if tall && height_left == 0 {
            break;
        }
        if !tall && height_left == depth_left {
            continue;
        }
        if last && admissible_only && !tall {
            continue;
        }
        prefix.push(part);
        extend(
            prefix,
            weight_left - part,
            depth_left - 1,
            height_left - u32::from(tall),
            admissible_only,
            out,
        );
        prefix.pop();
    }
}

/// Members of `I(k, n, s)`, or of `I_0(k, n, s)` when `admissible_only`, in
/// lexicographic order. Unsatisfiable parameters give an empty list.
pub fn enumerate(k: u32, n: u32, s: u32, admissible_only: bool) -> Vec<Index> {
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 && s == 0 && !admissible_only {
            out.push(Index::empty());
        }
        return out;
    }
    extend(&mut Vec::with_capacity(n as usize), k, n, s, admissible_only, &mut out);
    out
}

/// All indices of weight `k` and depth `n`, any height.
pub fn enumerate_all_heights(k: u32, n: u32, admissible_only: bool) -> Vec<Index> {
    (0..=n)
        .flat_map(|s| enumerate(k, n, s, admissible_only))
        .collect::<Vec<_>>()
}

/// Every admissible index with weight in `2..=max_weight`, ordered by
/// weight, then depth, then lexicographically.
pub fn admissible_up_to(max_weight: u32) -> Vec<Index> {
    let mut out = Vec::new();
    for k in 2..=max_weight {
        for n in 1..k {
            let mut level = enumerate_all_heights(k, n, true);
            level.sort();
            out.extend(level);
        }
    }
    out
}

/// `sum_s |I(k, n, s)| = C(k-1, n-1)`.
pub fn count_all_heights(k: u32, n: u32) -> Result<u64> {
    if n == 0 || k < n {
        return Err(domain(format!("count_all_heights needs k >= n >= 1, got ({k}, {n})")));
    }
    let (top, pick) = (u64::from(k - 1), u64::from(n - 1));
    let pick = pick.min(top - pick);
    let mut c = 1u64;
    for i in 0..pick {
        c = c * (top - i) / (i + 1);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx(p: &[u32]) -> Index {
        Index::new(p.to_vec()).unwrap()
    }

    /// Every composition of `k` into `n` positive parts, by brute force.
    fn compositions(k: u32, n: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return if k == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 1..=k {
            for mut rest in compositions(k - first, n - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn classify_examples() {
        let c = idx(&[1, 2]).classify();
        assert_eq!((c.weight, c.depth, c.height, c.admissible), (3, 2, 1, true));
        let c = idx(&[2, 1]).classify();
        assert_eq!((c.weight, c.depth, c.height, c.admissible), (3, 2, 1, false));
        let c = Index::empty().classify();
        assert_eq!((c.weight, c.depth, c.height, c.admissible), (0, 0, 0, false));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate(3, 2, 1, false), vec![idx(&[1, 2]), idx(&[2, 1])]);
        assert_eq!(enumerate(3, 2, 1, true), vec![idx(&[1, 2])]);
        assert_eq!(enumerate(4, 2, 2, true), vec![idx(&[2, 2])]);
        assert_eq!(enumerate(2, 1, 1, true), vec![idx(&[2])]);
        assert!(enumerate(3, 2, 3, false).is_empty());
        assert!(enumerate(2, 3, 0, false).is_empty());
    }

    #[test]
    fn counts() {
        assert_eq!(count_all_heights(5, 3).unwrap(), 6);
        assert_eq!(compositions(5, 3).len(), 6);
        assert_eq!(count_all_heights(4, 2).unwrap(), 3);
        for k in 1..10 {
            assert_eq!(count_all_heights(k, 1).unwrap(), 1);
        }
        assert!(count_all_heights(2, 3).is_err());
    }

    #[test]
    fn matches_brute_force_compositions() {
        for k in 1..=12 {
            for n in 1..=k {
                let mut brute: Vec<Index> = compositions(k, n).into_iter().map(Index).collect();
                brute.sort();
                let mut ours = enumerate_all_heights(k, n, false);
                ours.sort();
                assert_eq!(ours, brute, "k={k} n={n}");
                assert_eq!(ours.len() as u64, count_all_heights(k, n).unwrap());
            }
        }
    }

    #[test]
    fn admissible_listing_order() {
        let names: Vec<String> = admissible_up_to(5).iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            [
                "(2)",
                "(3)",
                "(1,2)",
                "(4)",
                "(1,3)",
                "(2,2)",
                "(1,1,2)",
                "(5)",
                "(1,4)",
                "(2,3)",
                "(3,2)",
                "(1,1,3)",
                "(1,2,2)",
                "(2,1,2)",
                "(1,1,1,2)"
            ]
        );
        assert!(admissible_up_to(1).is_empty());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("(1,2)".parse::<Index>().unwrap(), idx(&[1, 2]));
        assert_eq!(" 3, 1 ".parse::<Index>().unwrap(), idx(&[3, 1]));
        assert_eq!("()".parse::<Index>().unwrap(), Index::empty());
        assert_eq!(idx(&[1, 1, 2]).to_string(), "(1,1,2)");
        assert!("(1,0)".parse::<Index>().is_err());
        assert!("(a)".parse::<Index>().is_err());
    }

    proptest! {
        #[test]
        fn enumerated_members_classify_back(k in 0u32..10, n in 0u32..8, s in 0u32..6, adm in any::<bool>()) {
            let all = enumerate(k, n, s, false);
            let admissible = enumerate(k, n, s, true);
            for i in &admissible {
                prop_assert!(all.contains(i));
            }
            for i in &all {
                let c = i.classify();
                prop_assert_eq!((c.weight, c.depth, c.height), (k, n, s));
            }
            let chosen = if adm { &admissible } else { &all };
            for i in chosen {
                prop_assert!(!adm || i.is_admissible());
            }
            if s > n || k < n + s {
                prop_assert!(all.is_empty());
            }
        }
    }
}
