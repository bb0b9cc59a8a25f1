//! Closed forms for rank two, computed from the kernel classes only.
//!
//! For odd `d` the coarse moduli space `N_(2,d)` of stable rank-2 bundles has
//!
//! `P(N) = (1+v)^(2g) [(1+v^3)^(2g) - v^(2g)(1+v)^(2g)] / ((1-v^2)(1-v^4))`.
//!
//! The Higgs moduli space adds, for each odd `k` with `1 <= k <= 2g-3`, the
//! fixed component of chains `L_0 -> L_1` with `d_1 - d_0 = k`. It is
//! `Sym^k C x Jac` of dimension `g + k`, entering with twist `3g - 3 - k`.

use crate::error::{argument, Result};
use crate::kernel::CurveContext;
use crate::Series;

fn check(ctx: &CurveContext, d: i64) -> Result<()> {
    crate::chain::check_genus(ctx.genus() as i64)?;
    if d.rem_euclid(2) != 1 {
        return Err(argument(format!("rank-2 oracles need odd degree, got {d}")));
    }
    Ok(())
}

/// Poincaré series of the coarse moduli of stable rank-2 bundles of odd
/// degree `d`.
pub fn rank2_coarse_bundles(ctx: &CurveContext, d: i64) -> Result<Series> {
    check(ctx, d)?;
    let two_g = 2 * ctx.genus();
    let jac = ctx.jacobian_class();
    let odd = (&ctx.one() + &ctx.v_pow(3)).pow(two_g);
    let even = &ctx.v_pow(two_g as usize) * &jac;
    let den = &ctx.gerbe_strip() * &(&ctx.one() - &ctx.v_pow(4));
    Ok(&(&jac * &(&odd - &even)) * &den.unit_inverse()?)
}

/// Poincaré series of the rank-2 Higgs moduli space of odd degree `d`,
/// assembled from its fixed components.
pub fn rank2_higgs_direct(ctx: &CurveContext, d: i64) -> Result<Series> {
    let mut acc = rank2_coarse_bundles(ctx, d)?;
    let g = ctx.genus() as usize;
    let jac = ctx.jacobian_class();
    for k in (1..=(2 * g).saturating_sub(3)).step_by(2) {
        let comp = &ctx.sym_curve_class(k) * &jac;
        acc += &(&ctx.v_pow(2 * (3 * g - 3 - k)) * &comp);
    }
    Ok(acc)
}
