//! Genus-0 primary r-spin correlators `<a_1, ..., a_n>`.
//!
//! Three- and four-point brackets have closed forms. Higher point counts are
//! reconstructed level by level from WDVV: at `n` points every WDVV term that
//! involves an `n`-point bracket pairs it with a 3-point factor, so each
//! level is a linear system whose constants come from lower levels.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bracket::{
    genus0_selection_unchecked, vanishing_by_axiom, EvalResult, Genus0Bracket, SpinContext, Status,
};
use crate::engine::{Engine, Level};
use crate::enumerate::multisets;
use crate::error::{Error, Result};
use crate::linsolve::{Row, SparseSystem};
use crate::rational::{factorial, one, zero, Rational};

/// `<a_1, a_2, a_3> = 1` when `sum a_i = r - 2`.
pub fn three_point(r: i64, a1: i64, a2: i64, a3: i64) -> Result<EvalResult> {
    let ctx = SpinContext::new(r)?;
    let a = ctx.gradings(&[a1, a2, a3])?;
    Ok(closed_small(ctx.r(), &a))
}

/// `<a_1, ..., a_4> = (1/r) min{a_i, r-1-a_i}` when `sum a_i = 2r - 2`.
pub fn four_point(r: i64, a: [i64; 4]) -> Result<EvalResult> {
    let ctx = SpinContext::new(r)?;
    let a = ctx.gradings(&a)?;
    Ok(closed_small(ctx.r(), &a))
}

fn screen(r: u32, a: &[u32]) -> Option<EvalResult> {
    if !genus0_selection_unchecked(r, a) {
        return Some(EvalResult::zero(Status::DimensionMismatchZero));
    }
    if vanishing_by_axiom(r, a) {
        return Some(EvalResult::zero(Status::VanishingAxiomZero));
    }
    None
}

fn closed_small(r: u32, a: &[u32]) -> EvalResult {
    if let Some(z) = screen(r, a) {
        return z;
    }
    match a.len() {
        3 => EvalResult::ok(one()).with_trace("three-point"),
        4 => {
            let m = a.iter().map(|&x| x.min(r - 1 - x)).min().expect("four entries");
            EvalResult::ok(Rational::new(BigInt::from(m), BigInt::from(r))).with_trace("four-point")
        }
        n => unreachable!("closed form requested for {n} points"),
    }
}

/// A bracket with at least four points and a zero insertion vanishes (the
/// zero insertion is the unit of the Frobenius algebra).
pub fn zero_entry_rule(a: &[u32]) -> bool {
    a.len() >= 4 && a.contains(&0)
}

/// The node label `a'` in `[0, r-1]` carried by a genus-0 component holding
/// `subset`: `a' = -2 - sum(subset) mod r`.
pub fn node_label(r: u32, subset: &[u32]) -> u32 {
    let s: i64 = subset.iter().map(|&x| x as i64).sum();
    (-2 - s).rem_euclid(r as i64) as u32
}

/// `sum_{a+b=m} <a, b, x_1, ..., x_n> = ((n-1)!/r^(n-1)) prod (r-1-x_i)`.
///
/// Valid for `m <= r-2`; with `extended` the range is `m <= r` for `n >= 2`.
pub fn loop_sum(r: i64, m: i64, x: &[i64], extended: bool) -> Result<Rational> {
    let ctx = SpinContext::new(r)?;
    let r = ctx.r();
    let n = x.len();
    if n == 0 {
        return Err(Error::Precondition("loop sum needs at least one x_i".into()));
    }
    let x = ctx.gradings(x)?;
    if let Some(bad) = x.iter().find(|&&xi| xi > r - 2) {
        return Err(Error::Precondition(format!("x_i = {bad} exceeds r-2 = {}", r - 2)));
    }
    let top = if extended && n >= 2 { r as i64 } else { r as i64 - 2 };
    if m < 0 || m > top {
        let why = if extended && n == 1 { " (the extended range needs n >= 2)" } else { "" };
        return Err(Error::Precondition(format!("m = {m} outside [0, {top}]{why}")));
    }
    let sum: i64 = x.iter().map(|&xi| xi as i64).sum();
    let want = n as i64 * r as i64 - m - 2;
    if sum != want {
        return Err(Error::Precondition(format!("sum x_i = {sum}, expected n r - m - 2 = {want}")));
    }
    Ok(loop_sum_value(r, &x))
}

pub(crate) fn loop_sum_value(r: u32, x: &[u32]) -> Rational {
    let n = x.len() as u32;
    let prod: BigInt = x.iter().map(|&xi| BigInt::from(r - 1 - xi)).product();
    Rational::new(factorial(n - 1) * prod, BigInt::from(r).pow(n - 1))
}

/// One WDVV identity `sum coefficients[b] * <b> = constant` over the unknown
/// `n`-point brackets of a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WdvvEquation {
    pub coefficients: BTreeMap<Genus0Bracket, Rational>,
    pub constant: Rational,
}

impl WdvvEquation {
    pub fn residual(&self, value: impl Fn(&Genus0Bracket) -> Rational) -> Rational {
        let lhs: Rational = self.coefficients.iter().map(|(b, c)| c * value(b)).sum();
        lhs - &self.constant
    }
}

#[derive(Debug, Clone)]
pub struct WdvvSystem {
    pub r: u32,
    pub n: usize,
    /// Selection-valid keys without 0 or r-1 insertions, in key order.
    pub unknowns: Vec<Genus0Bracket>,
    pub equations: Vec<WdvvEquation>,
}

impl WdvvSystem {
    /// Exact elimination with pivots taken in key order.
    pub fn solve(&self) -> Result<BTreeMap<Genus0Bracket, Option<Rational>>> {
        let index: HashMap<&Genus0Bracket, usize> =
            self.unknowns.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut sys = SparseSystem::new(self.unknowns.len());
        for eq in &self.equations {
            let row: Row = eq.coefficients.iter().map(|(b, c)| (index[b], c.clone())).collect();
            sys.add_equation(row, eq.constant.clone())?;
        }
        Ok(self.unknowns.iter().cloned().zip(sys.solve()).collect())
    }
}

type SideSig = [[u32; 2]; 2];

fn pair(x: u32, y: u32) -> [u32; 2] {
    [x.min(y), x.max(y)]
}

fn side_sig(p: [u32; 2], q: [u32; 2]) -> SideSig {
    if p <= q {
        [p, q]
    } else {
        [q, p]
    }
}

fn sorted_with(mut v: Vec<u32>, extra: u32) -> Vec<u32> {
    v.push(extra);
    v.sort_unstable();
    v
}

fn level_unknowns(r: u32, n: usize) -> Vec<Vec<u32>> {
    if r < 3 {
        return Vec::new();
    }
    multisets(n, 1, r - 2, (n as i64 - 2) * r as i64 - 2)
}

impl Engine {
    /// Evaluates `<a_1, ..., a_n>` for any `n >= 3`, memoized through the cache.
    pub fn solve_bracket(&self, bracket: &Genus0Bracket) -> Result<EvalResult> {
        let (r, a) = (bracket.r(), bracket.a());
        if let Some(z) = screen(r, a) {
            return Ok(z);
        }
        if a.len() <= 4 {
            return Ok(closed_small(r, a));
        }
        if zero_entry_rule(a) {
            return Ok(EvalResult::ok(zero()).with_trace("zero-entry"));
        }
        let key = bracket.key();
        if let Some(v) = self.cached(&key) {
            return Ok(EvalResult::ok(v).with_trace("cache"));
        }
        let level = self.ensure_level(r, a.len())?;
        match level.get(a) {
            Some(Some(v)) => Ok(EvalResult::ok(v.clone()).with_trace("wdvv")),
            _ => Err(Error::Underdetermined { key }),
        }
    }

    /// Convenience wrapper validating raw input.
    pub fn genus0(&self, r: i64, a: &[i64]) -> Result<EvalResult> {
        self.solve_bracket(&Genus0Bracket::new(r, a)?)
    }

    /// Value of a sorted grading of any length >= 3 (inputs already in range).
    pub(crate) fn g0_value(&self, r: u32, a: &[u32]) -> Result<Rational> {
        debug_assert!(a.windows(2).all(|w| w[0] <= w[1]));
        Ok(self.solve_bracket(&Genus0Bracket::from_sorted(r, a.to_vec()))?.value)
    }

    /// `sum_{a+b=m} <a, b, x>` evaluated bracket by bracket.
    pub fn loop_sum_brute(&self, r: u32, m: u32, x: &[u32]) -> Result<Rational> {
        let mut total = zero();
        for a in 0..=m.min(r - 1) {
            let b = m - a;
            if b > r - 1 {
                continue;
            }
            let mut ins = x.to_vec();
            ins.push(a);
            ins.push(b);
            ins.sort_unstable();
            total += self.g0_value(r, &ins)?;
        }
        Ok(total)
    }

    /// Every distinct WDVV equation for the `n`-point level at spin `r`.
    pub fn wdvv_equations(&self, r: u32, n: usize) -> Result<WdvvSystem> {
        let unknowns = level_unknowns(r, n);
        let index: HashMap<Vec<u32>, usize> =
            unknowns.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut equations = Vec::new();
        self.for_each_wdvv(r, n, &index, |row, rhs| {
            let coefficients = row
                .into_iter()
                .map(|(i, c)| (Genus0Bracket::from_sorted(r, unknowns[i].clone()), c))
                .collect();
            equations.push(WdvvEquation { coefficients, constant: rhs });
            Ok(ControlFlow::Continue(()))
        })?;
        let unknowns = unknowns.into_iter().map(|a| Genus0Bracket::from_sorted(r, a)).collect();
        Ok(WdvvSystem { r, n, unknowns, equations })
    }

    fn ensure_level(&self, r: u32, n: usize) -> Result<Arc<Level>> {
        if let Some(l) = self.g0_levels.read().unwrap_or_else(|e| e.into_inner()).get(&(r, n)) {
            return Ok(l.clone());
        }
        if n > 5 {
            self.ensure_level(r, n - 1)?;
        }
        let level = Arc::new(self.solve_level(r, n)?);
        self.remember(level.iter().filter_map(|(a, v)| {
            v.as_ref().map(|v| (Genus0Bracket::from_sorted(r, a.clone()).key(), v.clone()))
        }));
        self.g0_levels
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert((r, n), level.clone());
        Ok(level)
    }

    fn solve_level(&self, r: u32, n: usize) -> Result<Level> {
        let unknowns = level_unknowns(r, n);
        let index: HashMap<Vec<u32>, usize> =
            unknowns.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut sys = SparseSystem::new(unknowns.len());
        if !unknowns.is_empty() {
            self.for_each_wdvv(r, n, &index, |row, rhs| {
                sys.add_equation(row, rhs)?;
                Ok(if sys.is_full_rank() { ControlFlow::Break(()) } else { ControlFlow::Continue(()) })
            })?;
        }
        Ok(unknowns.into_iter().zip(sys.solve()).collect())
    }

    /// Streams the WDVV equations of level `n`: for every `(n+1)`-insertion
    /// multiset over `[1, r-2]` with sum `(n-2) r - 2`, and every choice of four
    /// distinguished insertions, the degenerations `{i,j | k,l}` are equated
    /// with `{i,k | j,l}` and `{i,l | j,k}`.
    fn for_each_wdvv<F>(&self, r: u32, n: usize, index: &HashMap<Vec<u32>, usize>, mut emit: F) -> Result<()>
    where
        F: FnMut(Row, Rational) -> Result<ControlFlow<()>>,
    {
        assert!(n >= 5, "levels below 5 points have closed forms");
        if r < 3 {
            return Ok(());
        }
        let points = n + 1;
        let mut seen: HashSet<(Vec<u32>, SideSig, SideSig)> = HashSet::new();
        for ins in multisets(points, 1, r - 2, (n as i64 - 2) * r as i64 - 2) {
            for i in 0..points {
                for j in i + 1..points {
                    for k in j + 1..points {
                        for l in k + 1..points {
                            let rest: Vec<u32> = (0..points)
                                .filter(|&p| p != i && p != j && p != k && p != l)
                                .map(|p| ins[p])
                                .collect();
                            let [vi, vj, vk, vl] = [ins[i], ins[j], ins[k], ins[l]];
                            let base = side_sig(pair(vi, vj), pair(vk, vl));
                            for other in [side_sig(pair(vi, vk), pair(vj, vl)), side_sig(pair(vi, vl), pair(vj, vk))] {
                                if other == base {
                                    continue;
                                }
                                let sig = if base <= other {
                                    (rest.clone(), base, other)
                                } else {
                                    (rest.clone(), other, base)
                                };
                                if !seen.insert(sig) {
                                    continue;
                                }
                                let mut row = Row::new();
                                let mut known = zero();
                                self.wdvv_side(r, n, base, &rest, index, &Rational::one(), &mut row, &mut known)?;
                                self.wdvv_side(r, n, other, &rest, index, &-Rational::one(), &mut row, &mut known)?;
                                row.retain(|_, v| !v.is_zero());
                                if row.is_empty() && known.is_zero() {
                                    continue;
                                }
                                if emit(row, -known)?.is_break() {
                                    return Ok(());
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `sign * sum_{S1 + S2 = rest} <p, q, S1, e> <e', s, t, S2>` with
    /// `e + e' = r - 2`, splitting it into unknown coefficients and a known part.
    #[allow(clippy::too_many_arguments)]
    fn wdvv_side(
        &self,
        r: u32,
        n: usize,
        side: SideSig,
        rest: &[u32],
        index: &HashMap<Vec<u32>, usize>,
        sign: &Rational,
        row: &mut Row,
        known: &mut Rational,
    ) -> Result<()> {
        let [[p, q], [s, t]] = side;
        for mask in 0u32..(1 << rest.len()) {
            let mut left = vec![p, q];
            let mut right = vec![s, t];
            for (b, &x) in rest.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    left.push(x);
                } else {
                    right.push(x);
                }
            }
            let e = node_label(r, &left);
            if e == r - 1 {
                // a' = a'' = r-1: Witten's class restricts to zero in genus 0
                continue;
            }
            let left = sorted_with(left, e);
            let right = sorted_with(right, r - 2 - e);
            let (small, big) = if left.len() == 3 && right.len() == n {
                (left, right)
            } else if right.len() == 3 && left.len() == n {
                (right, left)
            } else {
                let v = self.g0_value(r, &left)?;
                if !v.is_zero() {
                    *known += sign * v * self.g0_value(r, &right)?;
                }
                continue;
            };
            let c = self.g0_value(r, &small)?;
            if c.is_zero() {
                continue;
            }
            match index.get(&big) {
                Some(&col) => *row.entry(col).or_insert_with(zero) += sign * c,
                // not an unknown, hence zero by selection or a vanishing rule
                None => debug_assert!(self.g0_value(r, &big)?.is_zero()),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn three_point_examples() {
        assert_eq!(three_point(5, 1, 1, 1).unwrap().value, int(1));
        assert_eq!(three_point(5, 1, 1, 2).unwrap().status, Status::DimensionMismatchZero);
        assert_eq!(three_point(3, 0, 0, 1).unwrap().value, int(1));
        let z = three_point(3, 1, 1, 1).unwrap();
        assert_eq!((z.value, z.status), (int(0), Status::DimensionMismatchZero));
        assert!(matches!(three_point(3, 0, 0, 3), Err(Error::InvalidGrading { .. })));
    }

    #[test]
    fn four_point_examples() {
        assert_eq!(four_point(5, [1, 1, 3, 3]).unwrap().value, ratio(1, 5));
        assert_eq!(four_point(4, [1, 1, 2, 2]).unwrap().value, ratio(1, 4));
        assert_eq!(four_point(4, [0, 2, 2, 2]).unwrap().value, int(0));
        let v = four_point(4, [3, 1, 1, 1]).unwrap();
        assert_eq!(v.status, Status::VanishingAxiomZero);
        let v = four_point(4, [1, 1, 1, 1]).unwrap();
        assert_eq!(v.status, Status::DimensionMismatchZero);
    }

    #[test]
    fn node_label_examples() {
        // exhaustive check of the congruence over a' in [0, r-1]
        for (r, subset, want) in [(5, vec![1, 1], 1), (3, vec![], 1), (4, vec![2, 2, 2], 0)] {
            assert_eq!(node_label(r, &subset), want);
            let s: i64 = subset.iter().map(|&x| x as i64).sum();
            let hits: Vec<u32> =
                (0..r).filter(|&c| (-2 - c as i64 - s).rem_euclid(r as i64) == 0).collect();
            assert_eq!(hits, vec![want]);
        }
    }

    #[test]
    fn loop_sum_examples() {
        assert_eq!(loop_sum(5, 2, &[3, 3], false).unwrap(), ratio(1, 5));
        assert_eq!(loop_sum(4, 2, &[2, 2], false).unwrap(), ratio(1, 4));
        // n = 1 forces x_1 = r - m - 2 and the sum is m + 1
        assert_eq!(loop_sum(3, 1, &[0], false).unwrap(), int(2));
        // brute force: only <1,1,2,2> survives in sum_{a+b=2} <a,b,2,2>
        let e = Engine::new();
        assert_eq!(e.loop_sum_brute(4, 2, &[2, 2]).unwrap(), ratio(1, 4));
        assert_eq!(e.loop_sum_brute(3, 1, &[0]).unwrap(), int(2));
    }

    #[test]
    fn loop_sum_preconditions() {
        assert!(matches!(loop_sum(5, 2, &[3, 2], false), Err(Error::Precondition(_))));
        assert!(matches!(loop_sum(5, 4, &[2, 2], false), Err(Error::Precondition(_))));
        assert!(loop_sum(5, 4, &[2, 2], true).is_ok());
        assert!(matches!(loop_sum(3, 2, &[0], true), Err(Error::Precondition(_))));
        assert!(matches!(loop_sum(5, 2, &[4, 2], false), Err(Error::Precondition(_))));
        assert!(matches!(loop_sum(5, 2, &[], false), Err(Error::Precondition(_))));
    }

    #[test]
    fn tiny_r_has_no_unknowns() {
        let e = Engine::new();
        let sys = e.wdvv_equations(2, 5).unwrap();
        assert!(sys.unknowns.is_empty() && sys.equations.is_empty());
    }

    #[test]
    fn solve_bracket_examples() {
        let e = Engine::new();
        assert_eq!(e.genus0(5, &[1, 1, 3, 3]).unwrap().value, ratio(1, 5));
        let v = e.genus0(4, &[3, 1, 1, 3]).unwrap();
        assert_eq!(v.value, int(0));
        let v = e.genus0(4, &[3, 1, 2, 2, 2]).unwrap();
        assert_eq!((v.value, v.status), (int(0), Status::VanishingAxiomZero));
        let v = e.genus0(5, &[0, 2, 3, 3, 3]).unwrap();
        assert_eq!(v.value, int(0));
    }

    #[test]
    fn wdvv_system_residuals_vanish() {
        let e = Engine::new();
        for r in 3..=6 {
            let sys = e.wdvv_equations(r, 5).unwrap();
            let sol = sys.solve().unwrap();
            assert!(sol.values().all(Option::is_some), "r={r} underdetermined");
            for eq in &sys.equations {
                let res = eq.residual(|b| sol[b].clone().unwrap());
                assert!(res.is_zero(), "r={r}");
            }
        }
    }

    #[test]
    fn level_five_matches_loop_formula() {
        let e = Engine::new();
        for r in 3..=6u32 {
            for x in multisets(3, 0, r - 2, 0).into_iter().chain((0..=(3 * r as i64)).flat_map(|s| multisets(3, 0, r - 2, s))) {
                let m = 3 * r as i64 - 2 - x.iter().map(|&v| v as i64).sum::<i64>();
                if !(0..=r as i64 - 2).contains(&m) {
                    continue;
                }
                let brute = e.loop_sum_brute(r, m as u32, &x).unwrap();
                assert_eq!(brute, loop_sum_value(r, &x), "r={r} m={m} x={x:?}");
            }
        }
    }
}
