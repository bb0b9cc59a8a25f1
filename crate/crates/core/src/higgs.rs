//! Assembly of the Higgs moduli series from its `Gm`-fixed components.
//!
//! A fixed point is a chain `F_0 -> ... -> F_r` with
//! `E = ⊕ F_i ⊗ ω^(-i)`, semistable for `α_H`. Each component enters with
//! the Białynicki-Birula twist `c⁺ = n²(g-1) + 1 - dim`, and its series is
//! the chain stack series at a perturbation of `α_H` with the `BGm` factor
//! removed.

use num_integer::Integer;
use rayon::prelude::*;

use crate::chain::{self, chain_euler_raw, higgs_parameter, ChainInvariants, Side};
use crate::engine::Engine;
use crate::enumerate;
use crate::error::{Error, Result};
use crate::Series;

/// A chain type of the fixed locus with its dimension and BB twist.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedComponentType {
    pub invariants: ChainInvariants,
    pub dim: i64,
    pub twist: i64,
}

/// One row of a per-component breakdown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsBreakdown {
    pub component: FixedComponentType,
    /// Series of the coarse component, without the twist.
    pub series: Series,
}

fn check(n: i64, d: i64, g: i64) -> Result<()> {
    chain::check_genus(g)?;
    if n < 1 {
        return Err(crate::error::argument(format!("rank must be at least 1, got {n}")));
    }
    if n.gcd(&d) != 1 {
        return Err(Error::NonCoprime { rank: n, degree: d });
    }
    Ok(())
}

/// Fixed chain types of the Higgs moduli space, sorted by `(r, n, d)`.
pub fn enumerate_fixed_types(n: i64, d: i64, g: i64) -> Result<Vec<FixedComponentType>> {
    check(n, d, g)?;
    let full = n * n * (g - 1) + 1;
    enumerate::fixed_types(n, d, g)?
        .into_iter()
        .map(|inv| {
            let dim = 1 - chain_euler_raw(&inv, &inv, g);
            let twist = full - dim;
            if twist < 0 {
                return Err(Error::Internal(format!("negative twist for {inv}")));
            }
            Ok(FixedComponentType {
                invariants: inv,
                dim,
                twist,
            })
        })
        .collect()
}

/// Series of the coarse fixed component: `S(α̃_H) · (1 - v²)`.
pub fn component_series(engine: &Engine, comp: &FixedComponentType) -> Result<Series> {
    let inv = &comp.invariants;
    let alpha_h = higgs_parameter(inv.length(), engine.genus());
    let alpha = chain::perturb_into_interior(&alpha_h, inv, engine.bound(), engine.genus())?;
    let stack = engine.stack_class_at(inv, alpha.values(), Side::Exact)?;
    Ok(&stack * &engine.context().gerbe_strip())
}

/// Per-component series in fixed-type order.
pub fn higgs_space_breakdown(engine: &Engine, n: i64, d: i64) -> Result<Vec<HiggsBreakdown>> {
    let comps = enumerate_fixed_types(n, d, engine.genus())?;
    let row = |c: &FixedComponentType| {
        Ok(HiggsBreakdown {
            component: c.clone(),
            series: component_series(engine, c)?,
        })
    };
    if engine.is_parallel() {
        comps.par_iter().map(row).collect()
    } else {
        comps.iter().map(row).collect()
    }
}

fn assemble(engine: &Engine, rows: &[HiggsBreakdown]) -> Series {
    rows.iter().fold(engine.context().zero(), |acc, row| {
        &acc + &(&engine.context().v_pow(2 * row.component.twist as usize) * &row.series)
    })
}

/// `Σ_components v^(2·twist) · component_series`.
pub fn higgs_space_series(engine: &Engine, n: i64, d: i64) -> Result<Series> {
    Ok(assemble(engine, &higgs_space_breakdown(engine, n, d)?))
}

/// The space series together with its breakdown.
pub fn higgs_space_with_breakdown(engine: &Engine, n: i64, d: i64) -> Result<(Series, Vec<HiggsBreakdown>)> {
    let rows = higgs_space_breakdown(engine, n, d)?;
    Ok((assemble(engine, &rows), rows))
}

/// The stack is a trivial `Gm`-gerbe over the space.
pub fn higgs_stack_series(engine: &Engine, n: i64, d: i64) -> Result<Series> {
    Ok(&higgs_space_series(engine, n, d)? * &engine.context().bgm_class())
}

/// The de Rham moduli space has the same motive as the Higgs moduli space.
pub fn de_rham_series(engine: &Engine, n: i64, d: i64) -> Result<Series> {
    higgs_space_series(engine, n, d)
}
