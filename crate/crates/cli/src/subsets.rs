//! Classifier subset enumeration.
//!
//! Subsets are lists of zero-based ranks, where rank 0 is the most accurate
//! classifier. Every policy returns subsets of size ≥ 2 ordered by size and
//! then lexicographically.

use crate::config::SubsetPolicy;
use crate::error::{CliError, Result};

/// Every subset of `0..n` with `size` members.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn walk(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            walk(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    walk(0, n, size, &mut Vec::with_capacity(size), &mut out);
    out
}

/// Best/worst mixtures for small sizes, then every subset at sizes N−1 and N.
///
/// For each size s below N−1: the best s, the best s−1 plus the worst, the
/// best plus the worst s−1, and the worst s.
fn paper_style(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in 2..n.saturating_sub(1) {
        let best = |c: usize| (0..c).collect::<Vec<_>>();
        let worst = |c: usize| (n - c..n).collect::<Vec<_>>();
        let mut candidates = vec![
            best(s),
            [best(s - 1), worst(1)].concat(),
            [best(1), worst(s - 1)].concat(),
            worst(s),
        ];
        candidates.sort();
        candidates.dedup();
        out.extend(candidates);
    }
    for s in n.saturating_sub(1).max(2)..=n {
        out.extend(combinations(n, s));
    }
    out
}

/// Largest classifier count for which `auto` enumerates every subset.
pub const AUTO_ALL_LIMIT: usize = 8;

/// Resolve a policy for `n` classifiers.
pub fn enumerate(policy: &SubsetPolicy, n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(CliError::Config(format!(
            "need at least 2 classifiers to combine, got {n}"
        )));
    }
    match policy {
        SubsetPolicy::Auto if n <= AUTO_ALL_LIMIT => enumerate(&SubsetPolicy::All, n),
        SubsetPolicy::Auto => Ok(paper_style(n)),
        SubsetPolicy::All => Ok((2..=n).flat_map(|s| combinations(n, s)).collect()),
        SubsetPolicy::PaperStyle => Ok(paper_style(n)),
        SubsetPolicy::Explicit(list) => {
            let mut out = Vec::with_capacity(list.len());
            for ranks in list {
                let mut subset: Vec<usize> = ranks
                    .iter()
                    .map(|&r| {
                        if r == 0 || r > n {
                            Err(CliError::Config(format!("rank {r} outside 1..={n}")))
                        } else {
                            Ok(r - 1)
                        }
                    })
                    .collect::<Result<_>>()?;
                subset.sort_unstable();
                subset.dedup();
                if subset.len() < 2 {
                    return Err(CliError::Config(format!(
                        "subset {ranks:?} needs at least 2 distinct classifiers"
                    )));
                }
                out.push(subset);
            }
            out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            out.dedup();
            Ok(out)
        }
    }
}

/// `c1+c3` style label (one-based ranks).
pub fn label(subset: &[usize]) -> String {
    subset
        .iter()
        .map(|r| format!("c{}", r + 1))
        .collect::<Vec<_>>()
        .join("+")
}
