//! Exact sparse Gaussian elimination over the rationals.
//!
//! Columns are plain indices; callers map their keys to indices in sorted key
//! order, so "smallest column first" is lexicographic pivoting on keys. Rows
//! are reduced as they arrive, which lets callers stop feeding equations once
//! the rank is full.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Row = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Pivot(usize),
    Redundant,
}

#[derive(Debug, Clone, Default)]
pub struct SparseSystem {
    columns: usize,
    // pivot column -> (row with coefficient 1 at the pivot and only larger columns, rhs)
    pivots: BTreeMap<usize, (Row, Rational)>,
}

fn axpy(row: &mut Row, factor: &Rational, other: &Row) {
    for (&c, v) in other {
        let entry = row.entry(c).or_insert_with(Rational::zero);
        *entry -= factor * v;
        if entry.is_zero() {
            row.remove(&c);
        }
    }
}

impl SparseSystem {
    pub fn new(columns: usize) -> Self {
        SparseSystem { columns, pivots: BTreeMap::new() }
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.columns
    }

    /// Adds `sum row[c] x_c = rhs`. Fails if the equation contradicts the
    /// ones already absorbed.
    pub fn add_equation(&mut self, mut row: Row, mut rhs: Rational) -> Result<Insert> {
        row.retain(|_, v| !v.is_zero());
        debug_assert!(row.keys().all(|&c| c < self.columns));
        loop {
            let Some((&col, _)) = row.first_key_value() else {
                if !rhs.is_zero() {
                    return Err(Error::Inconsistent(format!("0 = {rhs}")));
                }
                return Ok(Insert::Redundant);
            };
            match self.pivots.get(&col) {
                Some((prow, prhs)) => {
                    let factor = row[&col].clone();
                    axpy(&mut row, &factor, prow);
                    rhs -= &factor * prhs;
                }
                None => {
                    let lead = row[&col].clone();
                    for v in row.values_mut() {
                        *v /= &lead;
                    }
                    rhs /= &lead;
                    self.pivots.insert(col, (row, rhs));
                    return Ok(Insert::Pivot(col));
                }
            }
        }
    }

    /// Back-substitutes. Entry `c` is `Some` exactly when every solution of the
    /// absorbed equations agrees on `x_c`.
    pub fn solve(&self) -> Vec<Option<Rational>> {
        // pivot -> (remaining free-column part, constant)
        let mut reduced: BTreeMap<usize, (Row, Rational)> = BTreeMap::new();
        for (&p, (row, rhs)) in self.pivots.iter().rev() {
            let mut free = Row::new();
            let mut constant = rhs.clone();
            for (&c, v) in row.range(p + 1..) {
                match reduced.get(&c) {
                    Some((cfree, cconst)) => {
                        constant -= v * cconst;
                        for (&f, w) in cfree {
                            let e = free.entry(f).or_insert_with(Rational::zero);
                            *e -= v * w;
                            if e.is_zero() {
                                free.remove(&f);
                            }
                        }
                    }
                    None => {
                        let e = free.entry(c).or_insert_with(Rational::zero);
                        *e += v;
                        if e.is_zero() {
                            free.remove(&c);
                        }
                    }
                }
            }
            // x_p = constant - sum free[f] x_f
            reduced.insert(p, (free, constant));
        }
        (0..self.columns)
            .map(|c| match reduced.get(&c) {
                Some((free, constant)) if free.is_empty() => Some(constant.clone()),
                _ => None,
            })
            .collect()
    }
}
