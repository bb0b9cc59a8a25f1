//! Integer points of rational polytopes given by affine constraints.
//!
//! Every bounded enumeration in the crate (wall candidates, HN types, fixed
//! types) reduces to listing the integer points of a small polytope. This
//! module does it exactly: equalities with a unit coefficient are eliminated
//! by substitution, the rest is projected variable by variable with
//! Fourier–Motzkin elimination, and a depth-first walk over the projections
//! produces the points in lexicographic order.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Row-count ceiling for a single projection step.
const MAX_ROWS: usize = 50_000;

/// An affine form `c + sum_i a_i x_i` over exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinExpr {
    coeffs: Vec<Rational>,
    constant: Rational,
}

impl LinExpr {
    pub fn zero(nvars: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); nvars],
            constant: Rational::zero(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self {
            coeffs: vec![Rational::zero(); nvars],
            constant: c,
        }
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(c.into()))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = Self::zero(nvars);
        e.coeffs[i] = Rational::one();
        e
    }

    pub fn nvars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(k.into()))
    }

    pub fn eval(&self, x: &[i64]) -> Rational {
        let mut acc = self.constant.clone();
        for (a, &xi) in self.coeffs.iter().zip(x) {
            if !a.is_zero() {
                acc += a * Rational::from_integer(xi.into());
            }
        }
        acc
    }

    pub fn le(self) -> Constraint {
        Constraint { expr: self, rel: Relation::Le }
    }

    pub fn lt(self) -> Constraint {
        Constraint { expr: self, rel: Relation::Lt }
    }

    pub fn eq0(self) -> Constraint {
        Constraint { expr: self, rel: Relation::Eq }
    }
}

impl Add for &LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: &LinExpr) -> LinExpr {
        debug_assert_eq!(self.nvars(), rhs.nvars());
        LinExpr {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &rhs.constant,
        }
    }
}

impl Sub for &LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: &LinExpr) -> LinExpr {
        debug_assert_eq!(self.nvars(), rhs.nvars());
        LinExpr {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
            constant: &self.constant - &rhs.constant,
        }
    }
}

impl Neg for &LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
            constant: -&self.constant,
        }
    }
}

impl Mul<&Rational> for &LinExpr {
    type Output = LinExpr;
    fn mul(self, k: &Rational) -> LinExpr {
        self.scale(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `expr <= 0`
    Le,
    /// `expr < 0`
    Lt,
    /// `expr = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub expr: LinExpr,
    pub rel: Relation,
}

impl Constraint {
    pub fn holds(&self, x: &[i64]) -> bool {
        let v = self.expr.eval(x);
        match self.rel {
            Relation::Le => v <= Rational::zero(),
            Relation::Lt => v < Rational::zero(),
            Relation::Eq => v.is_zero(),
        }
    }
}

/// `a . x <= b` with integer data.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    a: Vec<BigInt>,
    b: BigInt,
}

impl Row {
    /// Divides by the content of `a`, rounding `b` down; exact on integer points.
    fn normalized(mut self) -> Self {
        let g = self.a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in &mut self.a {
                *x /= &g;
            }
            self.b = self.b.div_floor(&g);
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }
}

/// Scales an affine form to integers: returns `(a, c)` with `expr * L = a.x + c`, `L > 0`.
fn integerize(e: &LinExpr) -> (Vec<BigInt>, BigInt) {
    let l = e
        .coeffs
        .iter()
        .chain(std::iter::once(&e.constant))
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let conv = |q: &Rational| (q * Rational::from_integer(l.clone())).to_integer();
    (e.coeffs.iter().map(conv).collect(), conv(&e.constant))
}

/// Keeps the tightest right-hand side for each coefficient vector.
fn dedupe(rows: Vec<Row>) -> Vec<Row> {
    let mut best: BTreeMap<Vec<BigInt>, BigInt> = BTreeMap::new();
    for r in rows {
        best.entry(r.a)
            .and_modify(|b| {
                if r.b < *b {
                    *b = r.b.clone();
                }
            })
            .or_insert(r.b);
    }
    best.into_iter().map(|(a, b)| Row { a, b }).collect()
}

/// `x_k = c + sum_j coeffs_j x_j`.
struct Substitution {
    k: usize,
    coeffs: Vec<BigInt>,
    c: BigInt,
}

/// All integer points satisfying every constraint, in lexicographic order of
/// the free variables. Fails with [`Error::Unbounded`] when a reachable
/// coordinate has no bound in some direction, or when more than `limit`
/// points exist.
pub fn integer_points(nvars: usize, constraints: &[Constraint], limit: usize) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    let mut eqs: Vec<Row> = Vec::new();
    for con in constraints {
        debug_assert_eq!(con.expr.nvars(), nvars);
        let (a, c) = integerize(&con.expr);
        let row = match con.rel {
            Relation::Le => Row { a, b: -c },
            Relation::Lt => Row { a, b: -c - 1 },
            Relation::Eq => {
                eqs.push(Row { a, b: -c });
                continue;
            }
        };
        rows.push(row);
    }

    // Unit-pivot elimination of equalities.
    let mut subs: Vec<Substitution> = Vec::new();
    loop {
        // Trivial equalities decide feasibility immediately.
        let mut feasible = true;
        eqs.retain(|e| {
            if e.is_trivial() {
                feasible &= e.b.is_zero();
                false
            } else {
                true
            }
        });
        if !feasible {
            return Ok(Vec::new());
        }
        let pivot = eqs.iter().enumerate().find_map(|(idx, e)| {
            e.a.iter()
                .position(|x| x.abs().is_one())
                .map(|k| (idx, k))
        });
        let Some((idx, k)) = pivot else { break };
        let e = eqs.swap_remove(idx);
        let s = e.a[k].clone();
        // a_k x_k = b - sum_{j != k} a_j x_j, with a_k = s = +-1.
        let mut coeffs: Vec<BigInt> = e.a.iter().map(|x| -x * &s).collect();
        coeffs[k] = BigInt::zero();
        let sub = Substitution {
            k,
            coeffs,
            c: &e.b * &s,
        };
        let apply = |r: &mut Row| {
            let ak = std::mem::take(&mut r.a[k]);
            if ak.is_zero() {
                return;
            }
            for (x, y) in r.a.iter_mut().zip(&sub.coeffs) {
                *x += &ak * y;
            }
            r.b -= &ak * &sub.c;
        };
        rows.iter_mut().for_each(apply);
        eqs.iter_mut().for_each(apply);
        subs.push(sub);
    }
    for e in eqs {
        let g = e.a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !e.b.is_multiple_of(&g) {
            return Ok(Vec::new());
        }
        let neg = Row {
            a: e.a.iter().map(|x| -x).collect(),
            b: -&e.b,
        };
        rows.push(e);
        rows.push(neg);
    }

    let eliminated: Vec<bool> = (0..nvars).map(|k| subs.iter().any(|s| s.k == k)).collect();
    let free: Vec<usize> = (0..nvars).filter(|&k| !eliminated[k]).collect();
    let nfree = free.len();

    let mut compact = Vec::with_capacity(rows.len());
    for r in rows {
        let row = Row {
            a: free.iter().map(|&k| r.a[k].clone()).collect(),
            b: r.b,
        }
        .normalized();
        if row.is_trivial() {
            if row.b.is_negative() {
                return Ok(Vec::new());
            }
            continue;
        }
        compact.push(row);
    }

    // levels[i] constrains the first i free variables only.
    let mut levels: Vec<Vec<Row>> = vec![Vec::new(); nfree + 1];
    levels[nfree] = dedupe(compact);
    for i in (0..nfree).rev() {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for r in &levels[i + 1] {
            match r.a[i].sign() {
                num_bigint::Sign::Plus => pos.push(r),
                num_bigint::Sign::Minus => neg.push(r),
                num_bigint::Sign::NoSign => keep.push(r.clone()),
            }
        }
        if keep.len() + pos.len() * neg.len() > MAX_ROWS {
            return Err(Error::Unbounded(format!(
                "projection step {i} exceeds {MAX_ROWS} rows"
            )));
        }
        for p in &pos {
            for q in &neg {
                let lp = -&q.a[i];
                let lq = p.a[i].clone();
                let a: Vec<BigInt> = p.a.iter().zip(&q.a).map(|(x, y)| x * &lp + y * &lq).collect();
                let row = Row {
                    a,
                    b: &p.b * &lp + &q.b * &lq,
                }
                .normalized();
                if row.is_trivial() {
                    if row.b.is_negative() {
                        return Ok(Vec::new());
                    }
                    continue;
                }
                keep.push(row);
            }
        }
        levels[i] = dedupe(keep);
    }

    let mut out = Vec::new();
    let mut prefix: Vec<BigInt> = Vec::with_capacity(nfree);
    walk(&levels, &mut prefix, &mut out, limit)?;

    // Back-substitute eliminated variables.
    out.into_iter()
        .map(|p| {
            let mut x: Vec<BigInt> = vec![BigInt::zero(); nvars];
            for (&k, v) in free.iter().zip(p) {
                x[k] = v;
            }
            for s in subs.iter().rev() {
                let mut v = s.c.clone();
                for (xj, cj) in x.iter().zip(&s.coeffs) {
                    if !cj.is_zero() {
                        v += xj * cj;
                    }
                }
                x[s.k] = v;
            }
            x.iter()
                .map(|v| {
                    v.to_i64()
                        .ok_or_else(|| Error::Unbounded("coordinate exceeds i64".into()))
                })
                .collect()
        })
        .collect()
}

fn walk(levels: &[Vec<Row>], prefix: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>, limit: usize) -> Result<()> {
    let i = prefix.len();
    if i + 1 == levels.len() {
        if out.len() >= limit {
            return Err(Error::Unbounded(format!("more than {limit} integer points")));
        }
        out.push(prefix.clone());
        return Ok(());
    }
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for r in &levels[i + 1] {
        let ai = &r.a[i];
        if ai.is_zero() {
            continue;
        }
        let mut rhs = r.b.clone();
        for (aj, xj) in r.a.iter().zip(prefix.iter()) {
            rhs -= aj * xj;
        }
        if ai.is_positive() {
            let b = rhs.div_floor(ai);
            hi = Some(match hi {
                Some(h) if h < b => h,
                _ => b,
            });
        } else {
            // ai * x <= rhs with ai < 0  <=>  x >= ceil(rhs / ai)
            let b = -(rhs.div_floor(&-ai));
            lo = Some(match lo {
                Some(l) if l > b => l,
                _ => b,
            });
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::Unbounded(format!("coordinate {i} has no finite range")));
    };
    let mut x = lo;
    while x <= hi {
        prefix.push(x.clone());
        walk(levels, prefix, out, limit)?;
        prefix.pop();
        x += 1;
    }
    Ok(())
}
