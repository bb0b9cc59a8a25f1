//! The memoized recursion for `S(n, d, α)`, the series of the stack of
//! α-semistable chains.
//!
//! Stability is evaluated at points `(α, side)`: `Plus` and `Minus` mean
//! `α ± εδ` for infinitesimal `ε`, compared lexicographically. For a chain of
//! positive length the value at a point is obtained by starting in the
//! terminal chamber of the ray `α + tδ` and crossing every bound-relevant
//! wall towards `t = 0` with
//!
//! `S(α_-) = S(α_+) + Σ_(I_+) contribution - Σ_(I_-) contribution`.
//!
//! The terminal value vanishes for non-constant ranks and is obtained from
//! the generically surjective stack by removing its HN strata otherwise.
//! Only types with exponent at most `⌊N/2⌋` are visited; the others have
//! valuation above `N`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;

use crate::chain::{
    self, check_genus, direction_slope, slope_raw, terminal_direction, ChainInvariants, HnType,
    Side, StabilityParameter,
};
use crate::enumerate;
use crate::error::{argument, Error, Result};
use crate::kernel::CurveContext;
use crate::{Rational, Series};

/// Memo key: canonical invariants (total degree in `[0, |n|)`) and, for
/// stack values, `α` normalized to `α_r = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemoKey {
    Terminal(ChainInvariants),
    Stack {
        inv: ChainInvariants,
        alpha: Vec<Rational>,
        side: Side,
    },
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| argument(format!("bad list entry {x:?}"))))
        .collect()
}

impl fmt::Display for MemoKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoKey::Terminal(inv) => write!(f, "T;{};{}", join(inv.ranks()), join(inv.degrees())),
            MemoKey::Stack { inv, alpha, side } => {
                let side = match side {
                    Side::Exact => "exact",
                    Side::Plus => "plus",
                    Side::Minus => "minus",
                };
                write!(
                    f,
                    "S;{};{};{};{side}",
                    join(inv.ranks()),
                    join(inv.degrees()),
                    join(alpha)
                )
            }
        }
    }
}

impl FromStr for MemoKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(';').collect();
        let inv = |r: &str, d: &str| ChainInvariants::new(parse_list(r)?, parse_list(d)?);
        match fields.as_slice() {
            ["T", r, d] => Ok(MemoKey::Terminal(inv(r, d)?)),
            ["S", r, d, a, side] => {
                let side = match *side {
                    "exact" => Side::Exact,
                    "plus" => Side::Plus,
                    "minus" => Side::Minus,
                    other => return Err(argument(format!("bad side {other:?}"))),
                };
                Ok(MemoKey::Stack {
                    inv: inv(r, d)?,
                    alpha: parse_list(a)?,
                    side,
                })
            }
            _ => Err(argument(format!("bad memo key {s:?}"))),
        }
    }
}

/// Memo hit and miss counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MemoStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: u64,
}

/// Wall-crossing calculator for one curve context.
#[derive(Debug)]
pub struct Engine {
    ctx: CurveContext,
    g: i64,
    bound: i64,
    parallel: bool,
    memo: DashMap<MemoKey, Series>,
    hits: AtomicU64,
    misses: AtomicU64,
}

fn normalized(alpha: &[Rational]) -> Vec<Rational> {
    let last = alpha[alpha.len() - 1].clone();
    alpha.iter().map(|a| a - &last).collect()
}

impl Engine {
    pub fn new(ctx: CurveContext) -> Result<Self> {
        let g = ctx.genus() as i64;
        check_genus(g)?;
        let bound = (ctx.truncation() / 2) as i64;
        Ok(Self {
            ctx,
            g,
            bound,
            parallel: true,
            memo: DashMap::new(),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        })
    }

    /// Fans independent sub-computations out over the rayon pool when set;
    /// results are bit-identical either way.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    pub fn context(&self) -> &CurveContext {
        &self.ctx
    }

    pub fn genus(&self) -> i64 {
        self.g
    }

    /// The exponent bound `⌊N/2⌋`.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn stats(&self) -> MemoStats {
        MemoStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.memo.len() as u64,
        }
    }

    pub fn clear_memo(&self) {
        self.memo.clear();
    }

    /// Memo contents sorted by key.
    pub fn memo_entries(&self) -> Vec<(MemoKey, Series)> {
        let mut v: Vec<(MemoKey, Series)> = self
            .memo
            .iter()
            .map(|e| (e.key().clone(), e.value().clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Seeds the memo, e.g. from a persistent cache. Entries must come from
    /// the same `(g, N)`.
    pub fn preload(&self, key: MemoKey, value: Series) -> Result<()> {
        if value.order() != self.ctx.truncation() {
            return Err(argument("cached series has the wrong truncation order"));
        }
        self.memo.insert(key, value);
        Ok(())
    }

    fn lookup(&self, key: &MemoKey) -> Option<Series> {
        let hit = self.memo.get(key).map(|e| e.value().clone());
        if hit.is_some() {
            self.hits.fetch_add(1, Ordering::Relaxed);
        } else {
            self.misses.fetch_add(1, Ordering::Relaxed);
        }
        hit
    }

    fn sum_over<F>(&self, types: &[HnType], f: F) -> Result<Series>
    where
        F: Fn(&HnType) -> Result<Series> + Sync,
    {
        let terms: Vec<Series> = if self.parallel && types.len() > 1 {
            types.par_iter().map(&f).collect::<Result<_>>()?
        } else {
            types.iter().map(&f).collect::<Result<_>>()?
        };
        Ok(terms.iter().fold(self.ctx.zero(), |acc, t| &acc + t))
    }

    /// Class of the stack of generically surjective chains of constant rank
    /// `n`: `Bun_n · Π_i Sym^(l_i)(C x P^(n-1))` with `l_i = d_i - d_(i-1)`,
    /// and zero when some `l_i < 0`.
    pub fn gen_surj_class(&self, inv: &ChainInvariants) -> Result<Series> {
        if !inv.is_constant_rank() {
            return Err(argument(format!("{inv} does not have constant ranks")));
        }
        let n = inv.ranks()[0];
        let d = inv.degrees();
        if d.windows(2).any(|w| w[1] < w[0]) {
            return Ok(self.ctx.zero());
        }
        let mut acc = self.ctx.bun_stack_class(n)?;
        for w in d.windows(2) {
            acc = &acc * &self.ctx.sym_curve_proj_class((w[1] - w[0]) as usize, n)?;
        }
        Ok(acc)
    }

    /// `v^(2·exponent) · Π_j S(part_j, α)` for an HN type at `α`.
    pub fn hn_stratum_contribution(&self, tau: &HnType, alpha: &StabilityParameter) -> Result<Series> {
        let e = tau.hn_exponent(self.g);
        if e < 0 {
            return Err(Error::Internal(format!("negative exponent for {tau}")));
        }
        if 2 * e as usize > self.ctx.truncation() {
            return Ok(self.ctx.zero());
        }
        let mut acc = self.ctx.v_pow(2 * e as usize);
        for p in tau.parts() {
            chain::alpha_slope(p, alpha)?;
            acc = &acc * &self.stack_class_at(p, alpha.values(), Side::Exact)?;
        }
        Ok(acc)
    }

    /// The terminal-chamber value of a constant-rank chain. It does not
    /// depend on the starting parameter, which is only checked for length.
    pub fn invert_gen_surj(&self, inv: &ChainInvariants, alpha_inf: &StabilityParameter) -> Result<Series> {
        chain::alpha_slope(inv, alpha_inf)?;
        if !inv.is_constant_rank() {
            return Err(argument(format!("{inv} does not have constant ranks")));
        }
        self.terminal_class(inv)
    }

    /// The HN types removed from the generically surjective stack.
    pub fn terminal_types(&self, inv: &ChainInvariants) -> Result<Vec<HnType>> {
        if !inv.is_constant_rank() {
            return Err(argument(format!("{inv} does not have constant ranks")));
        }
        enumerate::terminal_types(inv, self.bound, self.g)
    }

    /// Series of the stack of α-semistable chains of type `inv`.
    pub fn ss_stack_class(&self, inv: &ChainInvariants, alpha: &StabilityParameter) -> Result<Series> {
        chain::alpha_slope(inv, alpha)?;
        if !alpha.in_cone_interior(self.g) {
            return Err(argument(format!(
                "stability parameter {alpha} is not in the interior of the cone"
            )));
        }
        if chain::is_critical(inv, alpha)? {
            return Err(Error::OnWall);
        }
        self.stack_class_at(inv, alpha.values(), Side::Exact)
    }

    /// Series at the point `(α, side)` with no criticality check; at a
    /// critical `Exact` point this is the class of the semistable stack.
    pub fn stack_class_at(&self, inv: &ChainInvariants, alpha: &[Rational], side: Side) -> Result<Series> {
        if alpha.len() != inv.ranks().len() {
            return Err(argument("stability parameter has the wrong length"));
        }
        let ranks = inv.ranks();
        let lo = ranks.iter().position(|&n| n > 0).expect("positive total rank");
        let hi = ranks.iter().rposition(|&n| n > 0).expect("positive total rank");
        if lo > 0 || hi + 1 < ranks.len() {
            return self.stack_class_at(&inv.restrict(lo, hi), &normalized(&alpha[lo..=hi]), side);
        }
        if let Some(j) = (1..hi).find(|&j| ranks[j] == 0) {
            return self.direct_sum(inv, alpha, side, j);
        }
        if inv.total_rank() == 1 {
            return Ok(&self.ctx.jacobian_class() * &self.ctx.bgm_class());
        }
        let inv = inv.canonical();
        let alpha = normalized(alpha);
        let key = MemoKey::Stack {
            inv: inv.clone(),
            alpha: alpha.clone(),
            side,
        };
        if let Some(hit) = self.lookup(&key) {
            return Ok(hit);
        }
        let value = if inv.length() == 0 {
            self.terminal_class(&inv)?
        } else {
            self.cross_walls(&inv, &alpha, side)?
        };
        self.memo.insert(key, value.clone());
        Ok(value)
    }

    /// A zero slot `j` splits every chain into head and tail summands.
    fn direct_sum(&self, inv: &ChainInvariants, alpha: &[Rational], side: Side, j: usize) -> Result<Series> {
        let r = inv.length();
        let head = inv.restrict(0, j - 1);
        let tail = inv.restrict(j + 1, r);
        let delta = terminal_direction(inv.ranks());
        let same_slope = slope_raw(&head, &alpha[..j]) == slope_raw(&tail, &alpha[j + 1..]);
        let same_dir = side == Side::Exact
            || direction_slope(head.ranks(), &delta[..j]) == direction_slope(tail.ranks(), &delta[j + 1..]);
        if !(same_slope && same_dir) {
            return Ok(self.ctx.zero());
        }
        let h = self.stack_class_at(&head, &normalized(&alpha[..j]), side)?;
        let t = self.stack_class_at(&tail, &normalized(&alpha[j + 1..]), side)?;
        Ok(&h * &t)
    }

    fn cross_walls(&self, inv: &ChainInvariants, alpha: &[Rational], side: Side) -> Result<Series> {
        let delta = terminal_direction(inv.ranks());
        let mut value = if inv.is_constant_rank() {
            self.terminal_class(inv)?
        } else {
            self.ctx.zero()
        };
        let walls = enumerate::wall_candidates(inv, alpha, &delta, side == Side::Minus, self.bound, self.g)?;
        for (t, _) in walls.iter().rev() {
            let alpha_c: Vec<Rational> = alpha.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            value += &self.wall_sum(inv, &alpha_c, Side::Plus)?;
            value -= &self.wall_sum(inv, &alpha_c, Side::Minus)?;
        }
        if side == Side::Exact && enumerate::equal_slope_sub(inv, alpha, None) {
            value += &self.wall_sum(inv, alpha, Side::Plus)?;
        }
        Ok(value)
    }

    fn wall_sum(&self, inv: &ChainInvariants, alpha_c: &[Rational], side: Side) -> Result<Series> {
        let u = side.direction(inv.ranks());
        let types = enumerate::wall_types(inv, alpha_c, &u, self.bound, self.g)?;
        self.sum_over(&types, |tau| {
            let mut acc = self.ctx.v_pow(2 * tau.hn_exponent(self.g) as usize);
            for p in tau.parts() {
                acc = &acc * &self.stack_class_at(p, alpha_c, side)?;
            }
            Ok(acc)
        })
    }

    /// Terminal-chamber value of a constant-rank chain:
    /// `gen_surj - Σ_τ v^(2 e_τ) Π S_∞(piece)`.
    pub fn terminal_class(&self, inv: &ChainInvariants) -> Result<Series> {
        if !inv.is_constant_rank() {
            return Err(argument(format!("{inv} does not have constant ranks")));
        }
        let inv = inv.canonical();
        let key = MemoKey::Terminal(inv.clone());
        if let Some(hit) = self.lookup(&key) {
            return Ok(hit);
        }
        let types = enumerate::terminal_types(&inv, self.bound, self.g)?;
        let strata = self.sum_over(&types, |tau| {
            let mut acc = self.ctx.v_pow(2 * tau.hn_exponent(self.g) as usize);
            for p in tau.parts() {
                acc = &acc * &self.terminal_class(p)?;
            }
            Ok(acc)
        })?;
        let value = &self.gen_surj_class(&inv)? - &strata;
        self.memo.insert(key, value.clone());
        Ok(value)
    }
}
