//! Exact property suites. Each suite enumerates a window of cases in a fixed
//! order, compares two independent computations exactly, and reports every
//! mismatch. Nothing here panics on a failed identity.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bracket::{genus_of, spin_divisibility, vanishing_by_axiom, Genus0Bracket};
use crate::dr1::{b_value, closed_form, relation3_check, relation_instances_at};
use crate::engine::Engine;
use crate::enumerate::{dr1_window, multisets};
use crate::error::Result;
use crate::genus0::{four_point, loop_sum, three_point, zero_entry_rule};
use crate::rational::{wire, zero, Rational};

/// Bounds shared by the suites: spin `r <= r_max`, at most `n_max` points
/// (genus 0) or entries (DR brackets), and `sum |k_i| <= k_sum_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub r_max: u32,
    pub n_max: usize,
    pub k_sum_max: i64,
}

impl Default for Window {
    fn default() -> Self {
        Window { r_max: 6, n_max: 5, k_sum_max: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub key: String,
    #[serde(with = "wire")]
    pub expected: Rational,
    #[serde(with = "wire")]
    pub got: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// First failure in key order.
    pub fn reproducer(&self) -> Option<&Failure> {
        self.failures.first()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

struct Tally {
    suite: &'static str,
    start: Instant,
    cases: u64,
    failures: Vec<Failure>,
}

impl Tally {
    fn new(suite: &'static str) -> Self {
        Tally { suite, start: Instant::now(), cases: 0, failures: Vec::new() }
    }

    fn compare(&mut self, key: impl FnOnce() -> String, expected: Rational, got: Result<Rational>) {
        self.cases += 1;
        match got {
            Ok(got) if got == expected => {}
            Ok(got) => self.failures.push(Failure { key: key(), expected, got, error: None }),
            Err(e) => self.failures.push(Failure {
                key: key(),
                expected,
                got: zero(),
                error: Some(e.to_string()),
            }),
        }
    }

    fn check(&mut self, key: impl FnOnce() -> String, holds: bool) {
        self.cases += 1;
        if !holds {
            self.failures.push(Failure {
                key: key(),
                expected: Rational::from_integer(1.into()),
                got: zero(),
                error: Some("property does not hold".into()),
            });
        }
    }

    fn finish(mut self) -> SuiteReport {
        self.failures.sort_by(|x, y| x.key.cmp(&y.key));
        SuiteReport {
            suite: self.suite.to_string(),
            cases: self.cases,
            failures: self.failures,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn signed(xs: &[u32]) -> Vec<i64> {
    xs.iter().map(|&x| x as i64).collect()
}

/// `sum_{a+b=m} <a, b, x>` against the closed loop formula, over every
/// `r <= r_max` and bracket size `n + 2 <= n_max`. With `extended`, `m` runs up
/// to `r` whenever `n >= 2`.
pub fn check_prop_loop(engine: &Engine, window: &Window, extended: bool) -> SuiteReport {
    let mut t = Tally::new(if extended { "loop-extended" } else { "loop" });
    for r in 2..=window.r_max {
        for nx in 1..=window.n_max.saturating_sub(2) {
            let top = if extended && nx >= 2 { r } else { r - 2 };
            for m in 0..=top {
                let sum = nx as i64 * r as i64 - m as i64 - 2;
                for x in multisets(nx, 0, r - 2, sum) {
                    let expected = loop_sum(r as i64, m as i64, &signed(&x), extended)
                        .expect("enumerated inside the loop-sum domain");
                    t.compare(
                        || format!("loop:r={r}:m={m}:x={}", list(&x)),
                        expected,
                        engine.loop_sum_brute(r, m, &x),
                    );
                }
            }
        }
    }
    t.finish()
}

/// Residual of every Relation 1 and 2 instance based at a window bracket,
/// with closed-form values substituted; every Relation 3 bracket must be 0.
pub fn check_relations(_engine: &Engine, window: &Window) -> SuiteReport {
    let mut t = Tally::new("relations");
    for r in 2..=window.r_max {
        for n in 2..=window.n_max {
            for bracket in dr1_window(r, n, window.k_sum_max) {
                let b = b_value(r as i64, &signed(&bracket.a())).expect("valid grading").value;
                if relation3_check(&bracket) {
                    t.compare(|| format!("relation3:{bracket}"), zero(), Ok(closed_form(&bracket).value));
                }
                for (i, inst) in relation_instances_at(r, bracket.entries()).into_iter().enumerate() {
                    let residual = inst.residual(&b, |k| closed_form(k).value);
                    t.compare(|| format!("{:?}#{i}:{bracket}", inst.kind), zero(), Ok(residual));
                }
            }
        }
    }
    t.finish()
}

/// Relational solver against the closed formula on every window bracket.
pub fn check_oracle_equivalence(engine: &Engine, window: &Window) -> SuiteReport {
    let mut t = Tally::new("oracle");
    for r in 2..=window.r_max {
        for n in 2..=window.n_max {
            for bracket in dr1_window(r, n, window.k_sum_max) {
                let expected = closed_form(&bracket).value;
                t.compare(|| bracket.key(), expected, engine.solve_relational(&bracket).map(|v| v.value));
            }
        }
    }
    t.finish()
}

/// `b_value = b_value_trr` for every selection-valid grading with at most
/// `n_max` entries and `r <= r_max`.
pub fn check_b_consistency(engine: &Engine, window: &Window) -> SuiteReport {
    let mut t = Tally::new("b-consistency");
    b_consistency(engine, window, &mut t);
    t.finish()
}

fn b_consistency(engine: &Engine, window: &Window, t: &mut Tally) {
    for r in 2..=window.r_max {
        for n in 1..=window.n_max {
            for a in multisets(n, 0, r - 1, (n as i64 - 1) * r as i64) {
                let a = signed(&a);
                let closed = b_value(r as i64, &a).expect("valid grading").value;
                t.compare(
                    || format!("b:r={r}:a={}", list(&a)),
                    closed,
                    engine.b_value_trr(r as i64, &a).map(|v| v.value),
                );
            }
        }
    }
}

/// Vanishing axiom on every evaluator, zero-entry vanishing in genus 0 (the
/// four-point formula and the unit rule must agree), genus determination and
/// spin divisibility on every emitted key, and `B` by both routes.
pub fn check_axioms(engine: &Engine, window: &Window) -> SuiteReport {
    let mut t = Tally::new("axioms");
    for r in 2..=window.r_max {
        for n in 3..=window.n_max {
            for a in multisets(n, 0, r - 1, (n as i64 - 2) * r as i64 - 2) {
                let key = || format!("g0:r={r}:a={}", list(&a));
                let raw = signed(&a);
                let insertions: Vec<(u32, u32)> = a.iter().map(|&x| (0, x)).collect();
                t.check(|| format!("genus:{}", key()), genus_of(r, &insertions) == Some(0));
                t.check(|| format!("divisibility:{}", key()), spin_divisibility(r, 0, &a));

                let solved = engine
                    .solve_bracket(&Genus0Bracket::new(r as i64, &raw).expect("valid"))
                    .map(|v| v.value);
                let closed = match n {
                    3 => Some(three_point(r as i64, raw[0], raw[1], raw[2]).expect("valid").value),
                    4 => Some(four_point(r as i64, [raw[0], raw[1], raw[2], raw[3]]).expect("valid").value),
                    _ => None,
                };
                if vanishing_by_axiom(r, &a) {
                    t.compare(|| format!("vanishing:{}", key()), zero(), solved.clone());
                    if let Some(c) = &closed {
                        t.compare(|| format!("vanishing-closed:{}", key()), zero(), Ok(c.clone()));
                    }
                }
                if zero_entry_rule(&a) {
                    t.compare(|| format!("zero-entry:{}", key()), zero(), solved);
                    if let Some(c) = closed {
                        t.compare(|| format!("zero-entry-formula:{}", key()), zero(), Ok(c));
                    }
                }
            }
        }
        for n in 2..=window.n_max {
            for bracket in dr1_window(r, n, window.k_sum_max) {
                let a = bracket.a();
                let mut insertions: Vec<(u32, u32)> = a.iter().map(|&x| (0, x)).collect();
                insertions[0].0 = 1;
                t.check(|| format!("genus:{bracket}"), genus_of(r, &insertions) == Some(1));
                t.check(|| format!("divisibility:{bracket}"), spin_divisibility(r, 1, &a));
                if vanishing_by_axiom(r, &a) {
                    t.compare(|| format!("vanishing-closed:{bracket}"), zero(), Ok(closed_form(&bracket).value));
                    t.compare(
                        || format!("vanishing-relational:{bracket}"),
                        zero(),
                        engine.solve_relational(&bracket).map(|v| v.value),
                    );
                }
            }
        }
    }
    b_consistency(engine, window, &mut t);
    t.finish()
}

/// The suites `verify --suite all` runs, in order.
pub fn run_all(engine: &Engine, window: &Window) -> Vec<SuiteReport> {
    vec![
        check_prop_loop(engine, window, false),
        check_prop_loop(engine, window, true),
        check_relations(engine, window),
        check_oracle_equivalence(engine, window),
        check_axioms(engine, window),
    ]
}

pub fn all_passed(reports: &[SuiteReport]) -> bool {
    reports.iter().all(SuiteReport::passed)
}
