//! Bounded enumerations of sub-invariants and HN types.
//!
//! Each enumeration fixes a rank pattern, writes the unknown degrees as
//! variables of a polytope and lists its integer points. Besides the
//! defining slope conditions, every part must pass necessary conditions for
//! its semistable locus to be non-empty:
//!
//! * tails `T_j` of a part `P` satisfy `μ(T_j) <= μ(P)` at the point;
//! * a zero-rank slot splits `P` into a direct sum whose summands share the
//!   slope of `P`;
//! * a zero map `φ_j` splits `P` at `j`; a non-zero map out of a line
//!   bundle `L` has a saturated image of degree at least `deg L`, and a
//!   non-zero map onto a line bundle `L` has a kernel of degree at least
//!   `d_(j-1) - deg L`, and both give subchains whose slope is bounded. When the
//!   summands of a split would have different perturbation slopes only the
//!   second case remains, otherwise the conditions are a disjunction;
//! * `χ(P, P) <= |P|^2`, and `χ(P, P) <= 1` when no proper sub-invariant can
//!   share both slopes of `P` (then semistable means stable);
//! * for two parts `P_j, P_j'` of one type, `-χ(P_j, P_j') >= 0`.
//!
//! Without these conditions the candidate sets are infinite.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::chain::{chain_euler_raw, direction_slope, slope_raw, ChainInvariants, HnType};
use crate::error::{Error, Result};
use crate::polytope::{integer_points, Constraint, LinExpr};
use crate::Rational;

const POINT_LIMIT: usize = 1_000_000;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// All `m` with `0 <= m_i <= n_i`, `m != 0`, `m != n`, in lexicographic order.
pub(crate) fn sub_ranks(n: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut m = vec![0; n.len()];
    loop {
        let mut k = n.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if m[k] < n[k] {
                m[k] += 1;
                break;
            }
            m[k] = 0;
        }
        if m != n {
            out.push(m.clone());
        }
    }
}

/// Ranks of a part with affine degree expressions.
#[derive(Clone, Debug)]
struct PartExpr {
    ranks: Vec<i64>,
    degs: Vec<LinExpr>,
}

impl PartExpr {
    fn constant(inv: &ChainInvariants, nvars: usize) -> Self {
        Self {
            ranks: inv.ranks().to_vec(),
            degs: inv.degrees().iter().map(|&d| LinExpr::from_int(nvars, d)).collect(),
        }
    }

    fn eval(&self, x: &[i64]) -> ChainInvariants {
        let degrees = self
            .degs
            .iter()
            .map(|e| {
                let v = e.eval(x);
                debug_assert!(v.is_integer());
                v.to_integer().try_into().expect("degree fits in i64")
            })
            .collect();
        ChainInvariants::new_unchecked(self.ranks.clone(), degrees)
    }

    /// α-slope of the slots `lo..` as an affine form.
    fn mu(&self, alpha: &[LinExpr], lo: usize) -> LinExpr {
        let nv = self.degs[0].nvars();
        let size: i64 = self.ranks[lo..].iter().sum();
        let mut num = LinExpr::zero(nv);
        for i in lo..self.ranks.len() {
            if self.ranks[i] != 0 {
                num = &num + &self.degs[i];
                num = &num + &alpha[i].scale_int(self.ranks[i]);
            }
        }
        num.scale(&Rational::new(1.into(), size.into()))
    }
}

fn chi(a: &PartExpr, b: &PartExpr, g: i64) -> LinExpr {
    let nv = a.degs[0].nvars();
    let pair = |m: i64, e: &LinExpr, n: i64, f: &LinExpr| -> LinExpr {
        let lin = &f.scale_int(m) - &e.scale_int(n);
        &lin + &LinExpr::from_int(nv, m * n * (1 - g))
    };
    let mut acc = LinExpr::zero(nv);
    for i in 0..a.ranks.len() {
        acc = &acc + &pair(a.ranks[i], &a.degs[i], b.ranks[i], &b.degs[i]);
        if i > 0 {
            acc = &acc - &pair(a.ranks[i - 1], &a.degs[i - 1], b.ranks[i], &b.degs[i]);
        }
    }
    acc
}

/// `integer_points` with the search named in `Unbounded` errors.
fn points(nv: usize, cons: &[Constraint], what: &dyn Fn() -> String) -> Result<Vec<Vec<i64>>> {
    integer_points(nv, cons, POINT_LIMIT).map_err(|e| match e {
        Error::Unbounded(msg) => Error::Unbounded(format!("{}: {msg}", what())),
        other => other,
    })
}

fn const_alpha(alpha: &[Rational], nv: usize) -> Vec<LinExpr> {
    alpha.iter().map(|a| LinExpr::constant(nv, a.clone())).collect()
}

/// Disjunctive constraint sets: a point is admissible when it satisfies one
/// of the inner lists.
type Alternatives = Vec<Vec<Constraint>>;

fn and_alternatives(a: Alternatives, b: &[Vec<Constraint>]) -> Alternatives {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
        .collect()
}

/// A necessary condition for `φ_j : F_(j-1) -> F_j` to be non-zero when one
/// end is a line bundle, in the form `μ(T) <= μ(P)` for a subchain `T`.
fn map_condition(p: &PartExpr, alpha: &[LinExpr], j: usize) -> Option<Constraint> {
    let nv = p.degs[0].nvars();
    let len = p.ranks.len();
    let mu_p = p.mu(alpha, 0);
    match (p.ranks[j - 1], p.ranks[j]) {
        (1, 1) => Some((&p.degs[j - 1] - &p.degs[j]).le()),
        (1, _) => {
            // (0, .., L, M, F_(j+1), ..) with M ⊃ φ_j(L), so deg M >= deg L.
            let mut t = p.clone();
            for i in 0..j - 1 {
                t.ranks[i] = 0;
                t.degs[i] = LinExpr::zero(nv);
            }
            t.ranks[j] = 1;
            t.degs[j] = p.degs[j - 1].clone();
            Some((&t.mu(alpha, 0) - &mu_p).le())
        }
        (a, 1) => {
            // (0, .., ker φ_j, 0, ..) with deg ker >= d_(j-1) - d_j.
            let mut k = PartExpr {
                ranks: vec![0; len],
                degs: vec![LinExpr::zero(nv); len],
            };
            k.ranks[j - 1] = a - 1;
            k.degs[j - 1] = &p.degs[j - 1] - &p.degs[j];
            Some((&k.mu(alpha, 0) - &mu_p).le())
        }
        _ => None,
    }
}

/// Non-emptiness conditions of `p` at the point `(alpha, u)`. `None` when
/// the rank pattern alone rules the part out.
fn part_conditions(p: &PartExpr, alpha: &[LinExpr], u: &[Rational], strict: bool, g: i64) -> Option<Alternatives> {
    let len = p.ranks.len();
    let mut base = Vec::new();
    for i in 0..len {
        if p.ranks[i] == 0 && !(p.degs[i].is_constant() && p.degs[i].constant_term().is_zero()) {
            base.push(p.degs[i].clone().eq0());
        }
    }
    let mut alts: Alternatives = vec![Vec::new()];
    let total: i64 = p.ranks.iter().sum();
    let ds_p = direction_slope(&p.ranks, u);
    let mu_p = p.mu(alpha, 0);
    for j in 1..len {
        let head: i64 = p.ranks[..j].iter().sum();
        let tail: i64 = p.ranks[j..].iter().sum();
        if head == 0 || tail == 0 {
            continue;
        }
        let ds_t = direction_slope(&p.ranks[j..], &u[j..]);
        let diff = &p.mu(alpha, j) - &mu_p;
        if p.ranks[j - 1] == 0 || p.ranks[j] == 0 {
            if ds_t != ds_p {
                return None;
            }
            base.push(diff.eq0());
            continue;
        }
        if strict && ds_t > ds_p {
            base.push(diff.clone().lt());
        } else {
            base.push(diff.clone().le());
        }
        if let Some(map) = map_condition(p, alpha, j) {
            if ds_t != ds_p {
                base.push(map);
            } else {
                alts = and_alternatives(alts, &[vec![diff.eq0()], vec![map]]);
            }
        }
    }
    let cap = LinExpr::from_int(p.degs[0].nvars(), total * total);
    base.push((&chi(p, p, g) - &cap).le());
    Some(and_alternatives(vec![base], &alts))
}

/// Integer points of `base` together with one alternative of each entry of
/// `alts`, deduplicated and sorted.
fn solve(nv: usize, base: &[Constraint], alts: &[Alternatives], what: &dyn Fn() -> String) -> Result<Vec<Vec<i64>>> {
    let sets = alts.iter().fold(vec![base.to_vec()], |acc, a| and_alternatives(acc, a));
    let mut out = BTreeSet::new();
    for set in &sets {
        out.extend(points(nv, set, what)?);
    }
    Ok(out.into_iter().collect())
}

/// Whether a proper sub-invariant of `inv` can share its α-slope, and its
/// `u`-slope when `u` is given.
pub(crate) fn equal_slope_sub(inv: &ChainInvariants, alpha: &[Rational], u: Option<&[Rational]>) -> bool {
    let mu = slope_raw(inv, alpha);
    let ds = u.map(|u| direction_slope(inv.ranks(), u));
    sub_ranks(inv.ranks()).into_iter().any(|m| {
        if let (Some(u), Some(ds)) = (u, &ds) {
            if &direction_slope(&m, u) != ds {
                return false;
            }
        }
        let size: i64 = m.iter().sum();
        let mut target = &mu * q(size);
        for (a, &mi) in alpha.iter().zip(&m) {
            target -= a * q(mi);
        }
        let free = m.iter().zip(inv.ranks()).any(|(&a, &n)| 0 < a && a < n);
        if free {
            target.is_integer()
        } else {
            let pinned: i64 = m
                .iter()
                .zip(inv.ranks().iter().zip(inv.degrees()))
                .filter(|(&a, (&n, _))| a == n && n > 0)
                .map(|(_, (_, &d))| d)
                .sum();
            target == q(pinned)
        }
    })
}

/// All non-emptiness conditions on a concrete part, including the sharper
/// Euler bound for parts that cannot be strictly semistable.
pub(crate) fn part_plausible(p: &ChainInvariants, alpha: &[Rational], u: &[Rational], strict: bool, g: i64) -> bool {
    let pe = PartExpr::constant(p, 0);
    let Some(alts) = part_conditions(&pe, &const_alpha(alpha, 0), u, strict, g) else {
        return false;
    };
    if !alts.iter().any(|set| set.iter().all(|c| c.holds(&[]))) {
        return false;
    }
    equal_slope_sub(p, alpha, Some(u)) || chain_euler_raw(p, p, g) <= 1
}

/// Degree variables for every slot of `ranks` with positive rank, starting at
/// variable `first`.
fn var_part(ranks: &[i64], first: usize, nv: usize) -> (PartExpr, usize) {
    let mut k = first;
    let degs = ranks
        .iter()
        .map(|&n| {
            if n > 0 {
                k += 1;
                LinExpr::var(nv, k - 1)
            } else {
                LinExpr::zero(nv)
            }
        })
        .collect();
    (
        PartExpr {
            ranks: ranks.to_vec(),
            degs,
        },
        k,
    )
}

/// Parts `0..k-1` get variables; the last part is the remainder of `inv`.
fn parts_with_remainder(inv: &ChainInvariants, comp: &[Vec<i64>]) -> (Vec<PartExpr>, usize) {
    let nv: usize = comp[..comp.len() - 1]
        .iter()
        .map(|m| m.iter().filter(|&&x| x > 0).count())
        .sum();
    let mut parts = Vec::with_capacity(comp.len());
    let mut next = 0;
    let mut rest = PartExpr::constant(inv, nv);
    for m in &comp[..comp.len() - 1] {
        let (p, k) = var_part(m, next, nv);
        next = k;
        for i in 0..m.len() {
            rest.degs[i] = &rest.degs[i] - &p.degs[i];
        }
        parts.push(p);
    }
    rest.ranks = comp[comp.len() - 1].clone();
    parts.push(rest);
    (parts, nv)
}

fn type_conditions(parts: &[PartExpr], b: i64, g: i64, out: &mut Vec<Constraint>) {
    let nv = parts[0].degs[0].nvars();
    let mut exponent = LinExpr::zero(nv);
    for j in 0..parts.len() {
        for k in j + 1..parts.len() {
            let c = chi(&parts[j], &parts[k], g);
            out.push(c.clone().le());
            exponent = &exponent - &c;
        }
    }
    out.push((&exponent - &LinExpr::from_int(nv, b)).le());
}

/// Ordered sequences of non-zero rank vectors summing to `n`, with at least
/// two terms, filtered by `keep(prev, next)` on consecutive terms.
fn rank_compositions(n: &[i64], keep: &dyn Fn(&[i64], &[i64]) -> bool) -> Vec<Vec<Vec<i64>>> {
    fn go(
        rem: &[i64],
        acc: &mut Vec<Vec<i64>>,
        keep: &dyn Fn(&[i64], &[i64]) -> bool,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        let ok = |acc: &Vec<Vec<i64>>, m: &[i64]| acc.last().is_none_or(|p| keep(p, m));
        if !acc.is_empty() && ok(acc, rem) {
            let mut done = acc.clone();
            done.push(rem.to_vec());
            out.push(done);
        }
        for m in sub_ranks(rem) {
            if !ok(acc, &m) {
                continue;
            }
            let next: Vec<i64> = rem.iter().zip(&m).map(|(a, b)| a - b).collect();
            acc.push(m);
            go(&next, acc, keep, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), keep, &mut out);
    out
}

/// Candidate wall times `t` (with `t > 0`, or `t >= 0` when `include_zero`)
/// along `α + t·δ`, ascending, each with the sub-invariants `A` that can be
/// the first part of a bound-`b` type at that wall.
pub(crate) fn wall_candidates(
    inv: &ChainInvariants,
    alpha: &[Rational],
    delta: &[Rational],
    include_zero: bool,
    b: i64,
    g: i64,
) -> Result<Vec<(Rational, Vec<ChainInvariants>)>> {
    let n = inv.ranks();
    let ds_n = direction_slope(n, delta);
    let mu_n = slope_raw(inv, alpha);
    let mut times: BTreeMap<Rational, BTreeSet<ChainInvariants>> = BTreeMap::new();
    for m in sub_ranks(n) {
        let ds_a = direction_slope(&m, delta);
        if ds_a == ds_n {
            continue;
        }
        let nv = m.iter().filter(|&&x| x > 0).count();
        let (a, _) = var_part(&m, 0, nv);
        let mut rest = PartExpr::constant(inv, nv);
        rest.ranks = n.iter().zip(&m).map(|(x, y)| x - y).collect();
        for i in 0..n.len() {
            rest.degs[i] = &rest.degs[i] - &a.degs[i];
        }
        let alpha_c = const_alpha(alpha, nv);
        let t = (&LinExpr::constant(nv, mu_n.clone()) - &a.mu(&alpha_c, 0))
            .scale(&(Rational::one() / (&ds_a - &ds_n)));
        let mut cons = vec![if include_zero { (-&t).le() } else { (-&t).lt() }];
        let alpha_t: Vec<LinExpr> = alpha_c
            .iter()
            .zip(delta)
            .map(|(a, d)| a + &t.scale(d))
            .collect();
        let Some(a_alts) = part_conditions(&a, &alpha_t, delta, false, g) else {
            continue;
        };
        // The remaining parts are an extension of objects of the wall slope,
        // hence semistable at the wall itself.
        let zero = vec![Rational::zero(); n.len()];
        let Some(rest_alts) = part_conditions(&rest, &alpha_t, &zero, false, g) else {
            continue;
        };
        for i in 0..n.len() {
            if rest.ranks[i] == 0 && m[i] > 0 {
                cons.push(rest.degs[i].clone().eq0());
            }
        }
        let e = -&chi(&a, &rest, g);
        cons.push((-&e).le());
        cons.push((&e - &LinExpr::from_int(nv, b)).le());
        let what = || format!("wall candidates of {inv} with sub-rank {m:?}");
        for x in solve(nv, &cons, &[a_alts, rest_alts], &what)? {
            times.entry(t.eval(&x)).or_default().insert(a.eval(&x));
        }
    }
    Ok(times
        .into_iter()
        .map(|(t, w)| (t, w.into_iter().collect()))
        .collect())
}

/// Non-trivial types at a wall `alpha_c` whose parts share the wall slope of
/// `inv` and have strictly decreasing `u`-slopes; exponent at most `b`.
pub(crate) fn wall_types(
    inv: &ChainInvariants,
    alpha_c: &[Rational],
    u: &[Rational],
    b: i64,
    g: i64,
) -> Result<Vec<HnType>> {
    let mu_n = slope_raw(inv, alpha_c);
    let keep = |p: &[i64], m: &[i64]| direction_slope(p, u) > direction_slope(m, u);
    let mut out = Vec::new();
    for comp in rank_compositions(inv.ranks(), &keep) {
        let (parts, nv) = parts_with_remainder(inv, &comp);
        let alpha = const_alpha(alpha_c, nv);
        let mut cons = Vec::new();
        let mu_c = LinExpr::constant(nv, mu_n.clone());
        for p in &parts[..parts.len() - 1] {
            cons.push((&p.mu(&alpha, 0) - &mu_c).eq0());
        }
        let Some(alts) = parts
            .iter()
            .map(|p| part_conditions(p, &alpha, u, true, g))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        type_conditions(&parts, b, g, &mut cons);
        let what = || format!("wall types of {inv} with ranks {comp:?}");
        for x in solve(nv, &cons, &alts, &what)? {
            let concrete: Vec<ChainInvariants> = parts.iter().map(|p| p.eval(&x)).collect();
            if concrete.iter().all(|p| part_plausible(p, alpha_c, u, true, g)) {
                out.push(HnType::new_unchecked(concrete));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Non-trivial HN types at the point `α` with exponent at most `b`.
pub(crate) fn hn_types(inv: &ChainInvariants, alpha: &[Rational], b: i64, g: i64) -> Result<Vec<HnType>> {
    let zero = vec![Rational::zero(); alpha.len()];
    let mut out = Vec::new();
    for comp in rank_compositions(inv.ranks(), &|_, _| true) {
        let (parts, nv) = parts_with_remainder(inv, &comp);
        let alpha_e = const_alpha(alpha, nv);
        let mut cons = Vec::new();
        for w in parts.windows(2) {
            cons.push((&w[1].mu(&alpha_e, 0) - &w[0].mu(&alpha_e, 0)).lt());
        }
        let Some(alts) = parts
            .iter()
            .map(|p| part_conditions(p, &alpha_e, &zero, false, g))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        type_conditions(&parts, b, g, &mut cons);
        let what = || format!("HN types of {inv} with ranks {comp:?}");
        for x in solve(nv, &cons, &alts, &what)? {
            let concrete: Vec<ChainInvariants> = parts.iter().map(|p| p.eval(&x)).collect();
            if concrete.iter().all(|p| part_plausible(p, alpha, &zero, false, g)) {
                out.push(HnType::new_unchecked(concrete));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Non-trivial HN types of generically surjective chains of constant rank in
/// the terminal chamber: constant-rank pieces with non-negative degree jumps
/// and strictly decreasing `Σd / m`, exponent at most `b`.
pub(crate) fn terminal_types(inv: &ChainInvariants, b: i64, g: i64) -> Result<Vec<HnType>> {
    let n = inv.ranks()[0];
    let len = inv.ranks().len();
    let mut out = Vec::new();
    let comps = rank_compositions(&[n], &|_, _| true);
    for comp in comps {
        let full: Vec<Vec<i64>> = comp.iter().map(|m| vec![m[0]; len]).collect();
        let (parts, nv) = parts_with_remainder(inv, &full);
        let mut cons = Vec::new();
        for p in &parts {
            for i in 1..len {
                cons.push((&p.degs[i - 1] - &p.degs[i]).le());
            }
        }
        let sum = |p: &PartExpr| p.degs.iter().fold(LinExpr::zero(nv), |acc, e| &acc + e);
        for w in parts.windows(2) {
            let (m0, m1) = (w[0].ranks[0], w[1].ranks[0]);
            cons.push((&sum(&w[1]).scale_int(m0) - &sum(&w[0]).scale_int(m1)).lt());
        }
        type_conditions(&parts, b, g, &mut cons);
        for x in points(nv, &cons, &|| format!("terminal types of {inv} with ranks {comp:?}"))? {
            out.push(HnType::new_unchecked(parts.iter().map(|p| p.eval(&x)).collect()));
        }
    }
    out.sort();
    Ok(out)
}

/// Chain types `(r; n; d)` with all `n_i >= 1`, `Σn_i = n` and Higgs degree
/// `Σ(d_i - i·n_i(2g-2)) = d` that can carry an `α_H`-stable chain with
/// non-zero maps: strict tail inequalities at `α_H`, the non-zero map
/// conditions next to every line bundle and `0 <= 1 - χ(P, P) <= n^2(g-1) + 1`.
pub(crate) fn fixed_types(n: i64, d: i64, g: i64) -> Result<Vec<ChainInvariants>> {
    let mut out = Vec::new();
    for r in 0..n as usize {
        let alpha_h: Vec<Rational> = (0..=r).map(|i| q((r - i) as i64 * (2 * g - 2))).collect();
        let nv = r + 1;
        let alpha = const_alpha(&alpha_h, nv);
        for ranks in positive_compositions(n, r + 1) {
            let (p, _) = var_part(&ranks, 0, nv);
            let mut higgs_degree = LinExpr::from_int(nv, -d);
            for i in 0..=r {
                higgs_degree = &higgs_degree + &p.degs[i];
                higgs_degree = &higgs_degree - &LinExpr::from_int(nv, i as i64 * ranks[i] * (2 * g - 2));
            }
            let mut cons = vec![higgs_degree.eq0()];
            let mu = p.mu(&alpha, 0);
            for j in 1..=r {
                cons.push((&p.mu(&alpha, j) - &mu).lt());
                // Stable chains do not split, so every map is non-zero.
                cons.extend(map_condition(&p, &alpha, j));
            }
            let chi_pp = chi(&p, &p, g);
            cons.push((&chi_pp - &LinExpr::from_int(nv, 1)).le());
            cons.push((&LinExpr::from_int(nv, -n * n * (g - 1)) - &chi_pp).le());
            for x in points(nv, &cons, &|| format!("fixed types with ranks {ranks:?}"))? {
                out.push(p.eval(&x));
            }
        }
    }
    out.sort_by(|a, b| (a.length(), a.ranks(), a.degrees()).cmp(&(b.length(), b.ranks(), b.degrees())));
    Ok(out)
}

/// Ordered compositions of `n` into `k` positive parts.
fn positive_compositions(n: i64, k: usize) -> Vec<Vec<i64>> {
    if k == 1 {
        return if n >= 1 { vec![vec![n]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..n {
        for mut rest in positive_compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
