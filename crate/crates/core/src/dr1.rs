//! Genus-1 double ramification brackets.
//!
//! Two independent evaluators:
//!
//! * [`closed_form`]: `(1/2 sum k_i^2 - 1) * B` with
//!   `B = (1/24) ((n-1)!/r^(n-1)) prod (r-1-a_i)`.
//! * [`Engine::solve_relational`]: never looks at the closed form. It rewrites
//!   the target with the three linear relations until only `B` (obtained from
//!   genus-0 brackets through the topological recursion relation) and
//!   identically vanishing brackets remain, falling back to exact elimination
//!   over a window of brackets if the rewriting cycles.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bracket::{
    dr1_selection_unchecked, vanishing_by_axiom, Dr1Bracket, EvalResult, SpinContext, Status,
};
use crate::engine::Engine;
use crate::enumerate::k_vectors;
use crate::error::{Error, Result};
use crate::genus0::loop_sum_value;
use crate::linsolve::{Row, SparseSystem};
use crate::rational::{int, ratio, zero, Rational};

fn b_closed(r: u32, a: &[u32]) -> Rational {
    loop_sum_value(r, a) * ratio(1, 24)
}

fn b_screen(r: i64, a: &[i64]) -> Result<(u32, Vec<u32>, Option<EvalResult>)> {
    let ctx = SpinContext::new(r)?;
    if a.is_empty() {
        return Err(Error::Structure("B needs at least one insertion".into()));
    }
    let a = ctx.gradings(a)?;
    let screened = if !dr1_selection_unchecked(ctx.r(), &a) {
        Some(EvalResult::zero(Status::DimensionMismatchZero))
    } else {
        None
    };
    Ok((ctx.r(), a, screened))
}

/// `B = <tau_{1,a_1} tau_{0,a_2} ... tau_{0,a_n}>_1` by its closed form.
pub fn b_value(r: i64, a: &[i64]) -> Result<EvalResult> {
    let (r, a, screened) = b_screen(r, a)?;
    if let Some(z) = screened {
        return Ok(z);
    }
    let v = b_closed(r, &a);
    Ok(with_axiom_status(r, &a, v).with_trace("b-closed"))
}

fn with_axiom_status(r: u32, a: &[u32], v: Rational) -> EvalResult {
    if v.is_zero() && vanishing_by_axiom(r, a) {
        EvalResult::zero(Status::VanishingAxiomZero)
    } else {
        EvalResult::ok(v)
    }
}

/// `(1/2 sum k_i^2 - 1) * (1/24) ((n-1)!/r^(n-1)) prod (r-1-a_i)`.
pub fn closed_form(bracket: &Dr1Bracket) -> EvalResult {
    let (r, a) = (bracket.r(), bracket.a());
    if !bracket.selection() {
        return EvalResult::zero(Status::DimensionMismatchZero);
    }
    let factor = ratio(bracket.k_square_sum(), 2) - int(1);
    with_axiom_status(r, &a, factor * b_closed(r, &a)).with_trace("closed-form")
}

/// `<1 | 0 ... 0 | -1>`: one `+1`, one `-1`, all other `k_i` zero.
pub fn relation3_check(bracket: &Dr1Bracket) -> bool {
    bracket.n_plus() == 1
        && bracket.n_minus() == 1
        && bracket.entries().iter().all(|e| e.0.abs() <= 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Relation1,
    Relation2,
    Relation3,
}

/// `b_coefficient * B = sum terms[key] * <key>`, all keys sharing `r` and the
/// grading multiset `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub kind: RelationKind,
    pub terms: BTreeMap<Dr1Bracket, Rational>,
    pub b_coefficient: Rational,
    pub r: u32,
    /// Sorted grading multiset fixing `B`.
    pub a: Vec<u32>,
}

impl RelationInstance {
    /// `sum terms[key] * value(key) - b_coefficient * b`.
    pub fn residual(&self, b: &Rational, value: impl Fn(&Dr1Bracket) -> Rational) -> Rational {
        let rhs: Rational = self.terms.iter().map(|(k, c)| c * value(k)).sum();
        rhs - &self.b_coefficient * b
    }

    /// Solves the identity for `target` given the values of the other terms.
    fn solve_for(
        &self,
        target: &Dr1Bracket,
        b: &Rational,
        mut value: impl FnMut(&Dr1Bracket) -> Result<Rational, Stall>,
    ) -> Result<Rational, Stall> {
        let c = self.terms.get(target).filter(|c| !c.is_zero()).ok_or(Stall)?;
        let mut acc = &self.b_coefficient * b;
        for (k, ck) in &self.terms {
            if k != target {
                acc -= ck * value(k)?;
            }
        }
        Ok(acc / c)
    }

    fn add(&mut self, r: u32, entries: Vec<(i64, u32)>, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let key = Dr1Bracket::from_pairs(r, entries).expect("relation terms keep sum k = 0");
        let v = self.terms.remove(&key).unwrap_or_else(zero) + coef;
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }
}

fn context(r: i64, k: &[i64], a: &[i64]) -> Result<(u32, Vec<(i64, u32)>)> {
    let bracket = Dr1Bracket::new(r, k, a)?;
    let r = bracket.r();
    let a: Vec<u32> = a.iter().map(|&x| x as u32).collect();
    Ok((r, k.iter().copied().zip(a).collect()))
}

fn sorted_a(entries: &[(i64, u32)]) -> Vec<u32> {
    let mut a: Vec<u32> = entries.iter().map(|e| e.1).collect();
    a.sort_unstable();
    a
}

/// Relation 1 with designated zero order `k_1 = k[pivot] >= 1`:
///
/// ```text
/// (k_1+1)(n_+ + n_- + 1) B = -(k_1 + n_+ + n_- + 1) <k_1, ..., k~>
///     - sum_{i>=2} (k_i - 1) <k_1+1, ..., k_i-1, ...>
///     + sum_i (k~_i + 1) <k_1+1, ..., k~_i+1, ...>
/// ```
///
/// where `k~_i = |k_i|` over the poles. Gradings stay attached to positions.
pub fn relation1_instance(r: i64, k: &[i64], a: &[i64], pivot: usize) -> Result<RelationInstance> {
    let (r, entries) = context(r, k, a)?;
    relation1_from_entries(r, &entries, pivot)
}

fn relation1_from_entries(r: u32, entries: &[(i64, u32)], pivot: usize) -> Result<RelationInstance> {
    let k1 = match entries.get(pivot) {
        Some(&(k, _)) if k > 0 => k,
        _ => return Err(Error::Precondition(format!("designated entry {pivot} is not a positive k"))),
    };
    let nonzero = entries.iter().filter(|e| e.0 != 0).count() as i64;
    let mut inst = RelationInstance {
        kind: RelationKind::Relation1,
        terms: BTreeMap::new(),
        b_coefficient: int((k1 + 1) * (nonzero + 1)),
        r,
        a: sorted_a(entries),
    };
    inst.add(r, entries.to_vec(), int(-(k1 + nonzero + 1)));
    for (i, &(ki, _)) in entries.iter().enumerate() {
        if i == pivot || ki == 0 {
            continue;
        }
        let mut e = entries.to_vec();
        e[pivot].0 += 1;
        if ki > 0 {
            e[i].0 -= 1;
            inst.add(r, e, int(-(ki - 1)));
        } else {
            e[i].0 -= 1;
            inst.add(r, e, int(-ki + 1));
        }
    }
    Ok(inst)
}

/// Relation 2 with designated `k_1 = k[pivot] >= 1` and a marked point
/// `zero_slot` with `k = 0` that becomes a simple pole:
///
/// ```text
/// (k_1+1) B = -<k_1, ..., | 0^{n_0} | ...> + <k_1+1, ..., | 0^{n_0-1} | 1, k~...>
/// ```
pub fn relation2_instance(
    r: i64,
    k: &[i64],
    a: &[i64],
    pivot: usize,
    zero_slot: usize,
) -> Result<RelationInstance> {
    let (r, entries) = context(r, k, a)?;
    relation2_from_entries(r, &entries, pivot, zero_slot)
}

fn relation2_from_entries(
    r: u32,
    entries: &[(i64, u32)],
    pivot: usize,
    zero_slot: usize,
) -> Result<RelationInstance> {
    if entries.iter().all(|e| e.0 != 0) {
        return Err(Error::Precondition("relation 2 needs n_0 >= 1".into()));
    }
    let k1 = match entries.get(pivot) {
        Some(&(k, _)) if k > 0 => k,
        _ => return Err(Error::Precondition(format!("designated entry {pivot} is not a positive k"))),
    };
    if entries.get(zero_slot).map(|e| e.0) != Some(0) {
        return Err(Error::Precondition(format!("entry {zero_slot} is not a zero of k")));
    }
    let mut inst = RelationInstance {
        kind: RelationKind::Relation2,
        terms: BTreeMap::new(),
        b_coefficient: int(k1 + 1),
        r,
        a: sorted_a(entries),
    };
    inst.add(r, entries.to_vec(), int(-1));
    let mut e = entries.to_vec();
    e[pivot].0 += 1;
    e[zero_slot].0 = -1;
    inst.add(r, e, int(1));
    Ok(inst)
}

/// Relation 3 as an instance: `0 * B = <1 | 0...0 | -1>`.
pub fn relation3_instance(bracket: &Dr1Bracket) -> Option<RelationInstance> {
    relation3_check(bracket).then(|| RelationInstance {
        kind: RelationKind::Relation3,
        terms: BTreeMap::from([(bracket.clone(), int(1))]),
        b_coefficient: zero(),
        r: bracket.r(),
        a: sorted_a(bracket.entries()),
    })
}

/// Every Relation 1 and Relation 2 instance based at `entries` (and at its
/// global sign flip): each positive entry as pivot, each zero as the slot.
pub fn relation_instances_at(r: u32, entries: &[(i64, u32)]) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    let flipped: Vec<(i64, u32)> = entries.iter().map(|&(k, a)| (-k, a)).collect();
    for e in [entries.to_vec(), flipped] {
        for p in (0..e.len()).filter(|&p| e[p].0 > 0) {
            out.push(relation1_from_entries(r, &e, p).expect("positive pivot"));
            for z in (0..e.len()).filter(|&z| e[z].0 == 0) {
                out.push(relation2_from_entries(r, &e, p, z).expect("zero slot"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Stall;

impl Engine {
    /// `B` through the topological recursion relation: the genus-1 one-psi
    /// correlator equals `(1/24) sum_{a'+a''=r-2} <a_1, ..., a_n, a', a''>_0`,
    /// each genus-0 bracket evaluated by the WDVV-backed solver.
    pub fn b_value_trr(&self, r: i64, a: &[i64]) -> Result<EvalResult> {
        let (r, a, screened) = b_screen(r, a)?;
        if let Some(z) = screened {
            return Ok(z);
        }
        let v = self.b_trr(r, &a)?;
        Ok(with_axiom_status(r, &a, v).with_trace("b-trr"))
    }

    fn b_trr(&self, r: u32, a: &[u32]) -> Result<Rational> {
        let mut key = a.to_vec();
        key.sort_unstable();
        if let Some(v) = self.b_memo.read().unwrap_or_else(|e| e.into_inner()).get(&(r, key.clone())) {
            return Ok(v.clone());
        }
        let v = self.loop_sum_brute(r, r - 2, &key)? * ratio(1, 24);
        self.b_memo
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert((r, key), v.clone());
        Ok(v)
    }

    /// Evaluates a DR bracket from Relations 1-3 and the TRR value of `B`.
    pub fn solve_relational(&self, bracket: &Dr1Bracket) -> Result<EvalResult> {
        let (r, a) = (bracket.r(), bracket.a());
        if !bracket.selection() {
            return Ok(EvalResult::zero(Status::DimensionMismatchZero));
        }
        if let Some(v) = self.dr1_memo.read().unwrap_or_else(|e| e.into_inner()).get(bracket) {
            return Ok(with_axiom_status(r, &a, v.clone()).with_trace("memo"));
        }
        let b = self.b_trr(r, &a)?;
        let mut memo = HashMap::new();
        let mut trace = Vec::new();
        let value = match reduce(bracket, &b, &mut HashSet::new(), &mut memo, &mut trace) {
            Ok(v) => v,
            Err(Stall) => {
                trace.push("window".to_string());
                self.solve_window(bracket, bracket.abs_k_sum() + 2)?
            }
        };
        {
            let mut shared = self.dr1_memo.write().unwrap_or_else(|e| e.into_inner());
            shared.extend(memo.iter().map(|(k, v)| (k.clone(), v.clone())));
            shared.insert(bracket.clone(), value.clone());
        }
        self.remember([(bracket.key(), value.clone())]);
        let mut result = with_axiom_status(r, &a, value);
        result.trace = trace;
        Ok(result)
    }

    /// Exact elimination over every bracket with the same positional gradings
    /// and `sum |k| <= abs_bound`, using all Relation 1/2/3 instances whose
    /// terms stay inside that window.
    pub fn solve_window(&self, target: &Dr1Bracket, abs_bound: i64) -> Result<Rational> {
        let r = target.r();
        let a = target.a();
        let b = self.b_trr(r, &a)?;
        let stalled = || Error::ReductionStalled { key: target.key() };

        let vectors = k_vectors(a.len(), abs_bound);
        let mut keys: Vec<Dr1Bracket> = vectors
            .iter()
            .map(|k| Dr1Bracket::from_pairs(r, k.iter().copied().zip(a.iter().copied()).collect()))
            .collect::<Result<_>>()?;
        keys.sort();
        keys.dedup();
        let index: HashMap<&Dr1Bracket, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let Some(&target_col) = index.get(target) else {
            return Err(stalled());
        };

        let mut sys = SparseSystem::new(keys.len());
        let feed = |inst: &RelationInstance, sys: &mut SparseSystem| -> Result<()> {
            let row: Option<Row> = inst
                .terms
                .iter()
                .map(|(k, c)| index.get(k).map(|&i| (i, c.clone())))
                .collect();
            if let Some(row) = row {
                sys.add_equation(row, &inst.b_coefficient * &b)?;
            }
            Ok(())
        };
        for key in &keys {
            if let Some(inst) = relation3_instance(key) {
                feed(&inst, &mut sys)?;
            }
        }
        for k in &vectors {
            let entries: Vec<(i64, u32)> = k.iter().copied().zip(a.iter().copied()).collect();
            for inst in relation_instances_at(r, &entries) {
                feed(&inst, &mut sys)?;
            }
        }
        sys.solve().swap_remove(target_col).ok_or_else(stalled)
    }

    /// Convenience wrapper validating raw input.
    pub fn dr1_relational(&self, r: i64, k: &[i64], a: &[i64]) -> Result<EvalResult> {
        self.solve_relational(&Dr1Bracket::new(r, k, a)?)
    }
}

fn reduce(
    target: &Dr1Bracket,
    b: &Rational,
    stack: &mut HashSet<Dr1Bracket>,
    memo: &mut HashMap<Dr1Bracket, Rational>,
    trace: &mut Vec<String>,
) -> Result<Rational, Stall> {
    if let Some(v) = memo.get(target) {
        return Ok(v.clone());
    }
    if relation3_check(target) {
        memo.insert(target.clone(), zero());
        return Ok(zero());
    }
    if !stack.insert(target.clone()) {
        return Err(Stall);
    }
    let (instance, rule) = rewrite(target);
    trace.push(format!("{rule}: {}", target.key()));
    let result = instance.solve_for(target, b, |k| reduce(k, b, stack, memo, trace));
    stack.remove(target);
    let v = result?;
    memo.insert(target.clone(), v.clone());
    Ok(v)
}

/// Picks the relation instance that expresses `target` through simpler
/// brackets, following the three cases of the uniqueness argument.
fn rewrite(target: &Dr1Bracket) -> (RelationInstance, &'static str) {
    let r = target.r();
    let entries = target.entries();
    let oriented = |sign: i64| -> Vec<(i64, u32)> { entries.iter().map(|&(k, a)| (sign * k, a)).collect() };

    // case 1: a simple zero/pole opposite an entry of order >= 2
    for (p, &(kp, _)) in entries.iter().enumerate() {
        if kp.abs() != 1 {
            continue;
        }
        if let Some(q) = entries.iter().position(|&(kq, _)| kq.signum() == -kp.signum() && kq.abs() >= 2) {
            // orient so the simple entry is a pole; the target is the last term
            // of Relation 2 based at the bracket with that pole turned into a zero
            let mut base = oriented(-kp.signum());
            base[p].0 = 0;
            base[q].0 -= 1;
            let inst = relation2_from_entries(r, &base, q, p).expect("case 1 base is valid");
            return (inst, "relation2");
        }
    }

    let max_abs = entries.iter().map(|e| e.0.abs()).max().unwrap_or(0);
    if max_abs == 1 {
        // case 2: all nonzero entries are +-1 with n_+ = n_- >= 2; the target is
        // the first term of Relation 1 based at itself
        let pivot = entries.iter().position(|e| e.0 > 0).expect("a positive entry");
        let inst = relation1_from_entries(r, entries, pivot).expect("positive pivot");
        return (inst, "relation1-first-term");
    }

    // case 3: every nonzero |k| >= 2. Lower the smallest order by one: the
    // target is a term of the last sum of Relation 1 based one step down.
    let d = (0..entries.len())
        .filter(|&i| entries[i].0 != 0)
        .min_by_key(|&i| entries[i].0.abs())
        .expect("a nonzero entry");
    let mut base = oriented(-entries[d].0.signum());
    let q = base.iter().position(|e| e.0 > 0).expect("a positive entry");
    base[q].0 -= 1;
    base[d].0 += 1;
    let inst = relation1_from_entries(r, &base, q).expect("case 3 base is valid");
    (inst, "relation1-last-sum")
}
