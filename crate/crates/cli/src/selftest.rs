//! Built-in consistency suites. Each check returns the first counterexample
//! it meets; the runner stops at the first failing check.

use std::io::Write;

use higgsmot_core::chain::{enumerate_hn_types, terminal_direction};
use higgsmot_core::kernel::CurveContext;
use higgsmot_core::{higgs, oracle, ChainInvariants, Engine, Series, Side, StabilityParameter};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Kernel,
    Combinatorics,
    Oracle,
    Structure,
    All,
}

type Check = (&'static str, fn() -> Result<(), String>);

fn expect_eq(what: impl FnOnce() -> String, got: &Series, want: &Series) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{}: got {got}, expected {want}", what()))
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const KERNEL: &[Check] = &[
    ("macdonald generating function", macdonald),
    ("projective factor m=1 is the symmetric power", proj_m1),
    ("zeta is the symmetric power generating function", zeta_sym),
    ("gerbe factor inverts 1-v^2", gerbe),
];

const COMBINATORICS: &[Check] = &[
    ("bundle strata sum to Bun", bundle_strata),
    ("degree twist invariance", twist_invariance),
    ("generically surjective stack is stratified", gen_surj),
];

const ORACLE: &[Check] = &[
    ("rank-2 Higgs oracle", rank2_higgs),
    ("rank-2 bundle oracle", rank2_bundles),
];

const STRUCTURE: &[Check] = &[
    ("rank-1 Higgs is the Jacobian", rank1),
    ("Higgs series structure", structure),
    ("rank-3 degree independence", rank3_independence),
];

pub fn checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Kernel => KERNEL.to_vec(),
        Suite::Combinatorics => COMBINATORICS.to_vec(),
        Suite::Oracle => ORACLE.to_vec(),
        Suite::Structure => STRUCTURE.to_vec(),
        Suite::All => [KERNEL, COMBINATORICS, ORACLE, STRUCTURE].concat(),
    }
}

/// Runs a suite, printing one line per check. Returns whether all passed.
pub fn run(suite: Suite, out: &mut dyn Write) -> std::io::Result<bool> {
    for (name, check) in checks(suite) {
        match check() {
            Ok(()) => writeln!(out, "ok   {name}")?,
            Err(cex) => {
                writeln!(out, "FAIL {name}: {cex}")?;
                return Ok(false);
            }
        }
    }
    Ok(true)
}

const KERNEL_N: usize = 40;

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `(1 - t)(1 - v² t) Σ Sym^n t^n = (1 + v t)^(2g)`, coefficientwise in `t`.
fn macdonald() -> Result<(), String> {
    for g in 0..=3u32 {
        let c = CurveContext::new(g, KERNEL_N);
        let v2 = c.v_pow(2);
        let one_v2 = &c.one() + &v2;
        for n in 0..=KERNEL_N {
            let mut lhs = c.sym_curve_class(n);
            if n >= 1 {
                lhs -= &(&one_v2 * &c.sym_curve_class(n - 1));
            }
            if n >= 2 {
                lhs += &(&v2 * &c.sym_curve_class(n - 2));
            }
            let want = c.v_pow(n).scale(&binomial(2 * g as u64, n as u64));
            expect_eq(|| format!("g={g} n={n}"), &lhs, &want)?;
        }
    }
    Ok(())
}

fn proj_m1() -> Result<(), String> {
    for g in 0..=3u32 {
        let c = CurveContext::new(g, KERNEL_N);
        for l in 0..=8 {
            let p = c.sym_curve_proj_class(l, 1).map_err(fail)?;
            expect_eq(|| format!("g={g} l={l}"), &p, &c.sym_curve_class(l))?;
        }
    }
    Ok(())
}

/// `Z(C, R{i}) = Σ_n v^(2in) Sym^n C`.
fn zeta_sym() -> Result<(), String> {
    for g in 0..=3u32 {
        let c = CurveContext::new(g, KERNEL_N);
        for i in 1..=4usize {
            let sum = (0..=KERNEL_N / (2 * i)).fold(c.zero(), |acc, n| &acc + &(&c.v_pow(2 * i * n) * &c.sym_curve_class(n)));
            let z = c.zeta_at_tate(i as i64).map_err(fail)?;
            expect_eq(|| format!("g={g} i={i}"), &z, &sum)?;
        }
    }
    Ok(())
}

fn gerbe() -> Result<(), String> {
    for g in 0..=3u32 {
        let c = CurveContext::new(g, KERNEL_N);
        expect_eq(|| format!("g={g}"), &(&c.bgm_class() * &c.gerbe_strip()), &c.one())?;
    }
    Ok(())
}

fn inv(n: &[i64], d: &[i64]) -> ChainInvariants {
    ChainInvariants::new(n.to_vec(), d.to_vec()).expect("valid invariants")
}

/// `Bun_{n,d} = Σ_τ v^(2·exp) Π S(part)` over all HN types, including the
/// semistable one.
fn bundle_strata() -> Result<(), String> {
    for g in [2u32, 3] {
        let e = Engine::new(CurveContext::new(g, 16)).map_err(fail)?;
        let zero = StabilityParameter::from_ints(&[0]).map_err(fail)?;
        for (n, d) in [(1, 0), (2, 1), (2, 0), (3, 1), (3, 0)] {
            let b = inv(&[n], &[d]);
            let mut sum = e.stack_class_at(&b, zero.values(), Side::Exact).map_err(fail)?;
            for t in enumerate_hn_types(&b, &zero, e.bound(), g as i64).map_err(fail)? {
                sum += &e.hn_stratum_contribution(&t, &zero).map_err(fail)?;
            }
            let bun = e.context().bun_stack_class(n).map_err(fail)?;
            expect_eq(|| format!("g={g} (n,d)=({n},{d})"), &sum, &bun)?;
        }
    }
    Ok(())
}

fn twist_invariance() -> Result<(), String> {
    let e = Engine::new(CurveContext::new(2, 14)).map_err(fail)?;
    let a = StabilityParameter::from_ints(&[7, 3, 0]).map_err(fail)?;
    let base = inv(&[1, 1, 1], &[0, 2, 3]);
    let want = e.stack_class_at(&base, a.values(), Side::Plus).map_err(fail)?;
    for k in [-2i64, 1, 4] {
        let fresh = Engine::new(CurveContext::new(2, 14)).map_err(fail)?;
        let got = fresh.stack_class_at(&base.twist(k), a.values(), Side::Plus).map_err(fail)?;
        expect_eq(|| format!("twist {k}"), &got, &want)?;
    }
    Ok(())
}

/// Past every wall the semistable stack completes the terminal strata to
/// the generically surjective stack.
fn gen_surj() -> Result<(), String> {
    let g = 2i64;
    for (n, d) in [(&[1, 1][..], &[0, 2][..]), (&[1, 1], &[0, 4]), (&[2, 2], &[1, 4])] {
        let c = inv(n, d);
        let e = Engine::new(CurveContext::new(g as u32, 12)).map_err(fail)?;
        let far = StabilityParameter::from_ints(&[0, 0])
            .map_err(fail)?
            .along(&higgsmot_core::Rational::new(1401.into(), 7.into()), &terminal_direction(n));
        let mut strata = e.ss_stack_class(&c, &far).map_err(fail)?;
        for t in e.terminal_types(&c).map_err(fail)? {
            let mut term = e.context().v_pow(2 * t.hn_exponent(g) as usize);
            for p in t.parts() {
                term = &term * &e.terminal_class(p).map_err(fail)?;
            }
            strata += &term;
        }
        expect_eq(|| c.to_string(), &strata, &e.gen_surj_class(&c).map_err(fail)?)?;
    }
    Ok(())
}

fn rank2_higgs() -> Result<(), String> {
    for (g, n) in [(2u32, 22usize), (3, 38)] {
        let e = Engine::new(CurveContext::new(g, n)).map_err(fail)?;
        let got = higgs::higgs_space_series(&e, 2, 1).map_err(fail)?;
        let want = oracle::rank2_higgs_direct(e.context(), 1).map_err(fail)?;
        expect_eq(|| format!("g={g} N={n}"), &got, &want)?;
    }
    Ok(())
}

fn rank2_bundles() -> Result<(), String> {
    for g in [2u32, 3] {
        let e = Engine::new(CurveContext::new(g, 30)).map_err(fail)?;
        let zero = StabilityParameter::from_ints(&[0]).map_err(fail)?;
        let ss = e.ss_stack_class(&inv(&[2], &[1]), &zero).map_err(fail)?;
        let got = &ss * &e.context().gerbe_strip();
        let want = oracle::rank2_coarse_bundles(e.context(), 1).map_err(fail)?;
        expect_eq(|| format!("g={g}"), &got, &want)?;
    }
    Ok(())
}

fn rank1() -> Result<(), String> {
    for g in 2..=4u32 {
        let e = Engine::new(CurveContext::new(g, 20)).map_err(fail)?;
        for d in [-1i64, 0, 3] {
            let got = higgs::higgs_space_series(&e, 1, d).map_err(fail)?;
            expect_eq(|| format!("g={g} d={d}"), &got, &e.context().jacobian_class())?;
        }
    }
    Ok(())
}

/// Structural properties of a full Higgs polynomial and its components.
pub fn check_higgs_structure(e: &Engine, n: i64, d: i64) -> Result<(), String> {
    let g = e.genus();
    let half = (n * n * (g - 1) + 1) as usize;
    let tag = format!("g={g} n={n} d={d}");
    if e.context().truncation() < 2 * half {
        return Err(format!("{tag}: truncation below the top degree {}", 2 * half));
    }
    let (series, rows) = higgs::higgs_space_with_breakdown(e, n, d).map_err(fail)?;
    if !series.constant().is_one() {
        return Err(format!("{tag}: constant coefficient {}", series.constant()));
    }
    if !series.is_nonnegative() {
        return Err(format!("{tag}: negative coefficient in {series}"));
    }
    if series.degree() != Some(2 * half) {
        return Err(format!("{tag}: degree {:?}, expected {}", series.degree(), 2 * half));
    }
    let nonempty = rows.iter().filter(|r| !r.series.is_zero()).count();
    if series.coeff(2 * half) != BigInt::from(nonempty) {
        return Err(format!("{tag}: top coefficient {} for {nonempty} components", series.coeff(2 * half)));
    }
    for r in rows.iter().filter(|r| !r.series.is_zero()) {
        let top = 2 * r.component.dim as usize;
        if r.series.degree() != Some(top) || !r.series.is_palindromic(top) || !r.series.constant().is_one() {
            return Err(format!("{tag}: component {} is not a palindrome of degree {top}: {}", r.component.invariants, r.series));
        }
    }
    let dr = higgs::de_rham_series(e, n, d).map_err(fail)?;
    if dr != series {
        return Err(format!("{tag}: de Rham series differs"));
    }
    Ok(())
}

fn structure() -> Result<(), String> {
    for (g, n, d) in [(2u32, 1i64, 0i64), (2, 2, 1), (3, 2, 1), (4, 2, 3), (2, 3, 1), (2, 3, 2)] {
        let top = 2 * (n * n * (g as i64 - 1) + 1) as usize;
        let e = Engine::new(CurveContext::new(g, top + 2)).map_err(fail)?;
        check_higgs_structure(&e, n, d)?;
    }
    Ok(())
}

fn rank3_independence() -> Result<(), String> {
    let e = Engine::new(CurveContext::new(2, 40)).map_err(fail)?;
    let a = higgs::higgs_space_series(&e, 3, 1).map_err(fail)?;
    let b = higgs::higgs_space_series(&e, 3, 2).map_err(fail)?;
    expect_eq(|| "g=2 d=1 vs d=2".into(), &a, &b)?;
    if a.coeffs().iter().all(Zero::is_zero) {
        return Err("empty series".into());
    }
    Ok(())
}
