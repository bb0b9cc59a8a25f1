//! Independent reference computations shared by the integration tests.
//! Nothing here calls the engine or the enumerators.
#![allow(dead_code)]

use higgsmot_core::{ChainInvariants, CurveContext, Rational, Series};
use num_bigint::BigInt;

pub fn inv(n: &[i64], d: &[i64]) -> ChainInvariants {
    ChainInvariants::new(n.to_vec(), d.to_vec()).unwrap()
}

pub fn rat(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// `m f - n e + m n (1 - g)`.
pub fn pair(m: i64, e: i64, n: i64, f: i64, g: i64) -> i64 {
    m * f - n * e + m * n * (1 - g)
}

pub fn chi(a: (&[i64], &[i64]), b: (&[i64], &[i64]), g: i64) -> i64 {
    let (an, ad) = a;
    let (bn, bd) = b;
    let mut s = 0;
    for i in 0..an.len() {
        s += pair(an[i], ad[i], bn[i], bd[i], g);
        if i > 0 {
            s -= pair(an[i - 1], ad[i - 1], bn[i], bd[i], g);
        }
    }
    s
}

/// `(Σ d_i + Σ α_i n_i) / Σ n_i`.
pub fn mu(n: &[i64], d: &[i64], alpha: &[Rational]) -> Rational {
    let mut num = Rational::from_integer(d.iter().sum::<i64>().into());
    for (a, &k) in alpha.iter().zip(n) {
        num += a * Rational::from_integer(k.into());
    }
    num / Rational::from_integer(n.iter().sum::<i64>().into())
}

/// Stack of bundles by Atiyah–Bott: `S(n,d) = Bun_n - Σ v^(2e) Π S(n_i,d_i)`
/// over slope-decreasing types with exponent at most `N/2`.
pub struct BundleReference {
    pub ctx: CurveContext,
    g: i64,
    memo: std::collections::HashMap<(i64, i64), Series>,
}

impl BundleReference {
    pub fn new(g: u32, n: usize) -> Self {
        Self {
            ctx: CurveContext::new(g, n),
            g: g as i64,
            memo: Default::default(),
        }
    }

    pub fn ss(&mut self, n: i64, d: i64) -> Series {
        let d = d.rem_euclid(n);
        if let Some(s) = self.memo.get(&(n, d)) {
            return s.clone();
        }
        let mut acc = self.ctx.bun_stack_class(n).unwrap();
        let b = (self.ctx.truncation() / 2) as i64;
        let mut types = Vec::new();
        bundle_types(n, d, self.g, b, &mut Vec::new(), &mut types);
        for t in types {
            let mut e = 0;
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    e -= pair(t[i].0, t[i].1, t[j].0, t[j].1, self.g);
                }
            }
            let mut term = self.ctx.v_pow(2 * e as usize);
            for &(m, f) in &t {
                term = &term * &self.ss(m, f);
            }
            acc -= &term;
        }
        self.memo.insert((n, d), acc.clone());
        acc
    }
}

/// Types with at least two parts: strictly decreasing slope, exponent `<= b`.
/// Degrees are scanned in a box that is large enough for the bound.
fn bundle_types(n: i64, d: i64, g: i64, b: i64, prefix: &mut Vec<(i64, i64)>, out: &mut Vec<Vec<(i64, i64)>>) {
    let used_n: i64 = prefix.iter().map(|p| p.0).sum();
    let used_d: i64 = prefix.iter().map(|p| p.1).sum();
    let rem_n = n - used_n;
    let rem_d = d - used_d;
    let exponent = |t: &[(i64, i64)]| {
        let mut e = 0;
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                e -= pair(t[i].0, t[i].1, t[j].0, t[j].1, g);
            }
        }
        e
    };
    if !prefix.is_empty() {
        let mut t = prefix.clone();
        t.push((rem_n, rem_d));
        let ok = t.windows(2).all(|w| w[0].1 * w[1].0 > w[1].1 * w[0].0);
        if ok && exponent(&t) <= b {
            out.push(t);
        }
    }
    let span = 2 * (b + n * n * g) + n.abs() * 2;
    for m in 1..rem_n {
        for f in (d - span)..=(d + span) {
            if let Some(&(pm, pf)) = prefix.last() {
                if pf * m <= f * pm {
                    continue;
                }
            }
            prefix.push((m, f));
            bundle_types(n, d, g, b, prefix, out);
            prefix.pop();
        }
    }
}

pub fn int_series(ctx: &CurveContext, c: &[i64]) -> Series {
    Series::from_coeffs(c.iter().map(|&x| BigInt::from(x)), ctx.truncation())
}
