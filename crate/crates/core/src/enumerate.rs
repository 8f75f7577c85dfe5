//! Finite enumerations of gradings and DR profiles used by solvers, suites
//! and the table exporter. All outputs come in a fixed deterministic order.

use std::collections::BTreeSet;

use crate::bracket::{dr1_selection_unchecked, Dr1Bracket};

/// Nondecreasing sequences of length `len` over `[lo, hi]` summing to `sum`,
/// in lexicographic order.
pub fn multisets(len: usize, lo: u32, hi: u32, sum: i64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    let mut cur = Vec::with_capacity(len);
    fill(len, lo, hi, sum, &mut cur, &mut out);
    out
}

fn fill(len: usize, lo: u32, hi: u32, sum: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let left = (len - cur.len()) as i64;
    if left == 0 {
        if sum == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if sum < lo as i64 * left || sum > hi as i64 * left {
        return;
    }
    for v in lo..=hi {
        if v as i64 * left > sum {
            break;
        }
        cur.push(v);
        fill(len, v, hi, sum - v as i64, cur, out);
        cur.pop();
    }
}

/// Integer vectors of length `len` with `sum k = 0`, not all zero, and
/// `sum |k| <= abs_bound`.
pub fn k_vectors(len: usize, abs_bound: i64) -> Vec<Vec<i64>> {
    fn go(len: usize, budget: i64, sum: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            if sum == 0 && cur.iter().any(|&k| k != 0) {
                out.push(cur.clone());
            }
            return;
        }
        // the remaining entries must be able to cancel `sum`
        let rem_budget = budget;
        for k in -rem_budget..=rem_budget {
            let b = budget - k.abs();
            if (sum + k).abs() > b {
                continue;
            }
            cur.push(k);
            go(len, b, sum + k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, abs_bound, 0, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Every canonical selection-valid DR bracket with `n` entries at spin `r`
/// and `sum |k| <= abs_bound`, sorted by key order.
pub fn dr1_window(r: u32, n: usize, abs_bound: i64) -> Vec<Dr1Bracket> {
    let mut seen = BTreeSet::new();
    let gradings = multisets(n, 0, r - 1, (n as i64 - 1) * r as i64);
    // sorted k profiles: nonincreasing vectors suffice once a-lists are permuted
    let profiles: Vec<Vec<i64>> = k_vectors(n, abs_bound)
        .into_iter()
        .filter(|k| k.windows(2).all(|w| w[0] >= w[1]))
        .collect();
    for a in &gradings {
        debug_assert!(dr1_selection_unchecked(r, a));
        for perm in distinct_permutations(a) {
            for k in &profiles {
                let entries = k.iter().copied().zip(perm.iter().copied()).collect();
                if let Ok(b) = Dr1Bracket::from_pairs(r, entries) {
                    seen.insert(b);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Distinct orderings of a multiset, lexicographic.
pub fn distinct_permutations(items: &[u32]) -> Vec<Vec<u32>> {
    let mut cur: Vec<u32> = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}
