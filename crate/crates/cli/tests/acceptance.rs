//! Acceptance criteria 1-9. Each test writes one `PASS`/`FAIL` line with its
//! runtime and budget straight to stderr, so the lines survive output
//! capture. A criterion fails on a wrong value or on a blown budget.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use higgsmot::cache::MemoCache;
use higgsmot::output::{CacheStats, Format, OutputDocument};
use higgsmot_core::{
    higgs, oracle, ChainInvariants, CurveContext, Engine, Rational, Series, Side, StabilityParameter,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let outcome = body();
    let took = start.elapsed();
    let within = took <= budget;
    let (verdict, detail) = match (&outcome, within) {
        (Ok(d), true) => ("PASS", d.clone()),
        (Ok(d), false) => ("FAIL", format!("{d}; over budget")),
        (Err(e), _) => ("FAIL", e.clone()),
    };
    let line = format!(
        "[criterion {id}] {verdict} {name}: {detail} ({:.2} s, budget {} s)\n",
        took.as_secs_f64(),
        budget.as_secs()
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(outcome.is_ok() && within, "{line}");
}

fn engine(g: u32, n: usize) -> Engine {
    Engine::new(CurveContext::new(g, n)).expect("genus at least 2")
}

fn same(what: impl std::fmt::Display, got: &Series, want: &Series) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `(1 + v)^(2g)` from binomial coefficients.
fn jacobian(g: u32, n: usize) -> Series {
    Series::from_coeffs((0..=2 * g as u64).map(|k| binomial(2 * g as u64, k)), n)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[test]
fn kernel_identities() {
    criterion(1, "kernel identities", Duration::from_secs(5), || {
        let n = 40;
        let mut checked = 0;
        for g in 0..=3u32 {
            let c = CurveContext::new(g, n);
            let v2 = c.v_pow(2);
            // (1 - t)(1 - v² t) Σ Sym^k t^k = (1 + v t)^(2g).
            for k in 0..=n {
                let mut lhs = c.sym_curve_class(k);
                if k >= 1 {
                    lhs -= &(&(&c.one() + &v2) * &c.sym_curve_class(k - 1));
                }
                if k >= 2 {
                    lhs += &(&v2 * &c.sym_curve_class(k - 2));
                }
                let want = c.v_pow(k).scale(&binomial(2 * g as u64, k as u64));
                same(format!("generating function g={g} k={k}"), &lhs, &want)?;
                checked += 1;
            }
            for l in 0..=10 {
                same(format!("proj(l,1) g={g} l={l}"), &c.sym_curve_proj_class(l, 1).map_err(err)?, &c.sym_curve_class(l))?;
                checked += 1;
            }
            for i in 1..=5usize {
                let sum = (0..=n / (2 * i)).fold(c.zero(), |acc, k| &acc + &(&c.v_pow(2 * i * k) * &c.sym_curve_class(k)));
                same(format!("zeta g={g} i={i}"), &c.zeta_at_tate(i as i64).map_err(err)?, &sum)?;
                checked += 1;
            }
            same(format!("gerbe g={g}"), &(&c.bgm_class() * &c.gerbe_strip()), &c.one())?;
            checked += 1;
        }
        Ok(format!("{checked} exact identities"))
    });
}

#[test]
fn rank_one_higgs() {
    criterion(2, "rank-1 Higgs equals (1+v)^(2g)", Duration::from_secs(5), || {
        for g in 2..=4u32 {
            let e = engine(g, 20);
            for d in [-5i64, 0, 1, 2, 9] {
                same(format!("g={g} d={d}"), &higgs::higgs_space_series(&e, 1, d).map_err(err)?, &jacobian(g, 20))?;
            }
        }
        Ok("g in 2..=4, five degrees each".into())
    });
}

#[test]
fn rank_two_oracle() {
    criterion(3, "rank-2 Higgs matches the closed form", Duration::from_secs(120), || {
        for (g, n) in [(2u32, 22usize), (3, 38)] {
            let e = engine(g, n);
            let got = higgs::higgs_space_series(&e, 2, 1).map_err(err)?;
            let want = oracle::rank2_higgs_direct(e.context(), 1).map_err(err)?;
            same(format!("g={g} N={n}"), &got, &want)?;
            if got.degree() != Some(2 * (4 * (g as usize - 1) + 1)) {
                return Err(format!("g={g}: not the full polynomial"));
            }
        }
        Ok("(g,N) in {(2,22),(3,38)}".into())
    });
}

#[test]
fn bundle_recursion() {
    criterion(4, "rank-2 bundle recursion matches the closed form", Duration::from_secs(30), || {
        for g in [2u32, 3] {
            let e = engine(g, 30);
            let alpha = StabilityParameter::from_ints(&[0]).map_err(err)?;
            let ss = e.ss_stack_class(&ChainInvariants::bundle(2, 1).map_err(err)?, &alpha).map_err(err)?;
            let want = oracle::rank2_coarse_bundles(e.context(), 1).map_err(err)?;
            same(format!("g={g}"), &(&ss * &e.context().gerbe_strip()), &want)?;
        }
        Ok("g in {2,3}, N=30".into())
    });
}

/// `gen_surj = S(α_∞) + Σ_τ v^(2·exp) Π S_∞(part)` for (1,1; 0,2), g = 2.
fn gen_surj_pair(e: &Engine) -> Result<(Series, Series), String> {
    let c = ChainInvariants::new(vec![1, 1], vec![0, 2]).map_err(err)?;
    let far = StabilityParameter::new(vec![Rational::new(1401.into(), 7.into()), Rational::zero()]).map_err(err)?;
    let mut strata = e.ss_stack_class(&c, &far).map_err(err)?;
    for t in e.terminal_types(&c).map_err(err)? {
        let mut term = e.context().v_pow(2 * t.hn_exponent(e.genus()) as usize);
        for p in t.parts() {
            term = &term * &e.terminal_class(p).map_err(err)?;
        }
        strata += &term;
    }
    Ok((strata, e.gen_surj_class(&c).map_err(err)?))
}

#[test]
fn gen_surj_consistency() {
    criterion(5, "generically surjective stack equals its stratum sum", Duration::from_secs(30), || {
        let e = engine(2, 12);
        if e.bound() != 6 {
            return Err(format!("exponent bound {} instead of 6", e.bound()));
        }
        let (strata, whole) = gen_surj_pair(&e)?;
        same("(1,1;0,2)", &strata, &whole)?;
        // Sym² C x Jac x BGm, computed by hand.
        let c = e.context();
        let sym2 = Series::from_coeffs([1, 4, 7, 4, 1].map(BigInt::from), 12);
        same("closed form", &whole, &(&(&jacobian(2, 12) * &c.bgm_class()) * &sym2))?;
        Ok("g=2, B=6, through v^12".into())
    });
}

/// Structural properties of a Higgs polynomial; returns the number of
/// non-empty components.
fn structure(e: &Engine, n: i64, d: i64) -> Result<usize, String> {
    let g = e.genus();
    let top = 2 * (n * n * (g - 1) + 1) as usize;
    let tag = format!("g={g} n={n} d={d}");
    let (s, rows) = higgs::higgs_space_with_breakdown(e, n, d).map_err(err)?;
    if !s.constant().is_one() {
        return Err(format!("{tag}: constant term {}", s.constant()));
    }
    if s.coeffs().iter().any(|c| c < &BigInt::zero()) {
        return Err(format!("{tag}: negative coefficient"));
    }
    if s.degree() != Some(top) {
        return Err(format!("{tag}: degree {:?} instead of {top}", s.degree()));
    }
    let live: Vec<_> = rows.iter().filter(|r| !r.series.is_zero()).collect();
    if s.coeff(top) != BigInt::from(live.len()) {
        return Err(format!("{tag}: top coefficient {} for {} components", s.coeff(top), live.len()));
    }
    for r in live.iter() {
        let k = 2 * r.component.dim as usize;
        let c = r.series.coeffs();
        let palindrome = r.series.degree() == Some(k) && (0..=k).all(|i| c[i] == c[k - i]);
        if !palindrome {
            return Err(format!("{tag}: component {} is not a palindrome of degree {k}", r.component.invariants));
        }
    }
    Ok(live.len())
}

#[test]
fn structural_checks() {
    criterion(6, "structure of every computed Higgs series", Duration::from_secs(120), || {
        let cases = [(2u32, 1i64, 0i64), (3, 1, 1), (4, 1, 2), (2, 2, 1), (3, 2, 1), (4, 2, 3), (2, 3, 1), (2, 3, 2), (2, 4, 1)];
        let mut comps = 0;
        for (g, n, d) in cases {
            let top = 2 * (n * n * (g as i64 - 1) + 1) as usize;
            comps += structure(&engine(g, top + 2), n, d)?;
        }
        Ok(format!("{} cases, {comps} components", cases.len()))
    });
}

#[test]
fn rank_three_degree_independence() {
    criterion(7, "rank-3 series is independent of the degree", Duration::from_secs(1800), || {
        let e = engine(2, 40);
        let a = higgs::higgs_space_series(&e, 3, 1).map_err(err)?;
        let b = higgs::higgs_space_series(&e, 3, 2).map_err(err)?;
        same("g=2 N=40 d=1 vs d=2", &a, &b)?;
        if a.is_zero() {
            return Err("empty series".into());
        }
        Ok(format!("g=2, N=40, P(1) = {}", a.coeffs().iter().sum::<BigInt>()))
    });
}

/// Every series of criteria 2-5 from a fresh engine in the given mode,
/// seeded from (and flushed to) `cache` when given.
fn all_series(parallel: bool, cache: Option<&std::path::Path>) -> Result<Vec<Series>, String> {
    let mut out = Vec::new();
    let mut run = |g: u32, n: usize, f: &dyn Fn(&Engine) -> Result<Vec<Series>, String>| -> Result<(), String> {
        let e = engine(g, n).with_parallel(parallel);
        let c = cache.map(|dir| MemoCache::new(&dir.join(format!("g{g}-n{n}")), g, n));
        if let Some(c) = &c {
            c.load_into(&e).map_err(err)?;
        }
        out.extend(f(&e)?);
        if let Some(c) = &c {
            c.store_from(&e).map_err(err)?;
        }
        Ok(())
    };
    for g in 2..=4u32 {
        run(g, 20, &|e| (-1..=1).map(|d| higgs::higgs_space_series(e, 1, d).map_err(err)).collect())?;
    }
    for (g, n) in [(2u32, 22usize), (3, 38)] {
        run(g, n, &|e| Ok(vec![higgs::higgs_space_series(e, 2, 1).map_err(err)?]))?;
    }
    for g in [2u32, 3] {
        run(g, 30, &|e| {
            let a = StabilityParameter::from_ints(&[0]).map_err(err)?;
            let b = ChainInvariants::bundle(2, 1).map_err(err)?;
            Ok(vec![e.ss_stack_class(&b, &a).map_err(err)?, e.stack_class_at(&b, a.values(), Side::Exact).map_err(err)?])
        })?;
    }
    run(2, 12, &|e| {
        let (s, w) = gen_surj_pair(e)?;
        Ok(vec![s, w])
    })?;
    Ok(out)
}

fn without_cache_stats(mut doc: OutputDocument) -> String {
    doc.cache = CacheStats::default();
    doc.render(Format::Json)
}

#[test]
fn determinism() {
    criterion(8, "cold, warm, serial and parallel runs agree", Duration::from_secs(300), || {
        let dir = tempfile::tempdir().map_err(err)?;
        let reference = all_series(true, None)?;
        for (parallel, label) in [(true, "parallel"), (false, "serial")] {
            let cache = dir.path().join(label);
            for phase in ["cold", "warm"] {
                if all_series(parallel, Some(&cache))? != reference {
                    return Err(format!("{label} {phase} run differs"));
                }
            }
        }

        // Whole documents through the binary: byte-identical except the
        // cache statistics.
        let bin = env!("CARGO_BIN_EXE_higgsmot");
        let cache = dir.path().join("cli");
        let args = ["higgs", "--genus", "3", "--rank", "2", "--degree", "1", "--precision", "38", "--breakdown"];
        let mut docs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(bin).args(args).env("HIGGSMOT_CACHE", &cache).output().map_err(err)?;
            if !out.status.success() {
                return Err(format!("binary exited with {}", out.status));
            }
            docs.push(serde_json::from_slice::<OutputDocument>(&out.stdout).map_err(err)?);
        }
        if docs[1].cache.misses != 0 || docs[1].cache.loaded == 0 {
            return Err(format!("warm run did not use the cache: {:?}", docs[1].cache));
        }
        let texts: Vec<String> = docs.into_iter().map(without_cache_stats).collect();
        if texts[0] != texts[1] {
            return Err("cold and warm documents differ".into());
        }
        Ok(format!("{} series in 4 modes, CLI cold/warm documents identical", reference.len()))
    });
}

#[test]
fn de_rham_equals_higgs() {
    criterion(9, "de Rham series equals Higgs series", Duration::from_secs(60), || {
        let cases = [(2u32, 1i64, 0i64, 20usize), (3, 1, 1, 20), (2, 2, 1, 22), (3, 2, 1, 38), (2, 3, 1, 40), (2, 3, 2, 40)];
        for (g, n, d, p) in cases {
            let e = engine(g, p);
            same(
                format!("g={g} n={n} d={d}"),
                &higgs::de_rham_series(&e, n, d).map_err(err)?,
                &higgs::higgs_space_series(&e, n, d).map_err(err)?,
            )?;
        }
        Ok(format!("{} cases", cases.len()))
    });
}
