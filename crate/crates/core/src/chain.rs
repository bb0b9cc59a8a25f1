//! Chain invariants, α-slopes, Euler pairings, Harder–Narasimhan types and
//! stability parameters.
//!
//! A chain of length `r` is `F_0 -> F_1 -> ... -> F_r`; subchains are closed
//! under the maps, so the tails `(0, ..., 0, F_j, ..., F_r)` are subchains and
//! the heads are quotients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::enumerate;
use crate::error::{argument, Error, Result};
use crate::Rational;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Ranks `n_0..n_r` and degrees `d_0..d_r` of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainInvariants {
    ranks: Vec<i64>,
    degrees: Vec<i64>,
}

impl ChainInvariants {
    pub fn new(ranks: Vec<i64>, degrees: Vec<i64>) -> Result<Self> {
        if ranks.is_empty() || ranks.len() != degrees.len() {
            return Err(argument(format!(
                "ranks ({}) and degrees ({}) must have the same positive length",
                ranks.len(),
                degrees.len()
            )));
        }
        if ranks.iter().any(|&n| n < 0) {
            return Err(argument("ranks must be non-negative"));
        }
        if ranks.iter().sum::<i64>() < 1 {
            return Err(argument("total rank must be at least 1"));
        }
        if ranks.iter().zip(&degrees).any(|(&n, &d)| n == 0 && d != 0) {
            return Err(argument("a zero-rank slot must have degree 0"));
        }
        Ok(Self { ranks, degrees })
    }

    /// Length-0 invariants `(n; d)` of a vector bundle.
    pub fn bundle(n: i64, d: i64) -> Result<Self> {
        Self::new(vec![n], vec![d])
    }

    pub(crate) fn new_unchecked(ranks: Vec<i64>, degrees: Vec<i64>) -> Self {
        debug_assert!(Self::new(ranks.clone(), degrees.clone()).is_ok());
        Self { ranks, degrees }
    }

    /// The chain length `r`; there are `r + 1` slots.
    pub fn length(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[i64] {
        &self.ranks
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn total_rank(&self) -> i64 {
        self.ranks.iter().sum()
    }

    pub fn total_degree(&self) -> i64 {
        self.degrees.iter().sum()
    }

    pub fn is_constant_rank(&self) -> bool {
        self.ranks.iter().all(|&n| n == self.ranks[0])
    }

    /// Tensoring by a line bundle of degree `e`: `d_i -> d_i + e n_i`.
    pub fn twist(&self, e: i64) -> Self {
        Self {
            ranks: self.ranks.clone(),
            degrees: self
                .degrees
                .iter()
                .zip(&self.ranks)
                .map(|(&d, &n)| d + e * n)
                .collect(),
        }
    }

    /// The twist with total degree in `[0, total_rank)`.
    pub fn canonical(&self) -> Self {
        let e = -self.total_degree().div_euclid(self.total_rank());
        self.twist(e)
    }

    /// Slots `lo..=hi` as a chain of length `hi - lo`.
    pub(crate) fn restrict(&self, lo: usize, hi: usize) -> Self {
        Self {
            ranks: self.ranks[lo..=hi].to_vec(),
            degrees: self.degrees[lo..=hi].to_vec(),
        }
    }
}

impl fmt::Display for ChainInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "({}; {})", join(&self.ranks), join(&self.degrees))
    }
}

/// A stability parameter `α = (α_0, ..., α_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabilityParameter {
    alpha: Vec<Rational>,
}

impl StabilityParameter {
    pub fn new(alpha: Vec<Rational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(argument("stability parameter needs at least one entry"));
        }
        Ok(Self { alpha })
    }

    pub fn from_ints(alpha: &[i64]) -> Result<Self> {
        Self::new(alpha.iter().map(|&a| q(a)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `α_i - α_(i+1) >= 2g - 2` for all `i`.
    pub fn in_cone(&self, g: i64) -> bool {
        let gap = q(2 * g - 2);
        self.alpha.windows(2).all(|w| &w[0] - &w[1] >= gap)
    }

    /// `α_i - α_(i+1) > 2g - 2` for all `i`.
    pub fn in_cone_interior(&self, g: i64) -> bool {
        let gap = q(2 * g - 2);
        self.alpha.windows(2).all(|w| &w[0] - &w[1] > gap)
    }

    /// `α + t·δ`.
    pub fn along(&self, t: &Rational, delta: &[Rational]) -> Self {
        Self {
            alpha: self.alpha.iter().zip(delta).map(|(a, d)| a + t * d).collect(),
        }
    }
}

impl fmt::Display for StabilityParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(Rational::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Infinitesimal side of a stability point: `α`, `α + εδ` or `α - εδ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Exact,
    Plus,
    Minus,
}

impl Side {
    pub(crate) fn sign(self) -> i64 {
        match self {
            Side::Exact => 0,
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }

    /// The perturbation direction for a chain with ranks `ranks`.
    pub(crate) fn direction(self, ranks: &[i64]) -> Vec<Rational> {
        let s = q(self.sign());
        terminal_direction(ranks).into_iter().map(|x| x * &s).collect()
    }
}

/// `(Σd_i + Σα_i n_i) / Σn_i`.
pub fn alpha_slope(inv: &ChainInvariants, alpha: &StabilityParameter) -> Result<Rational> {
    if alpha.len() != inv.ranks.len() {
        return Err(argument(format!(
            "stability parameter has {} entries, chain has {} slots",
            alpha.len(),
            inv.ranks.len()
        )));
    }
    Ok(slope_raw(inv, alpha.values()))
}

pub(crate) fn slope_raw(inv: &ChainInvariants, alpha: &[Rational]) -> Rational {
    let mut num = q(inv.total_degree());
    for (a, &n) in alpha.iter().zip(&inv.ranks) {
        if n != 0 {
            num += a * q(n);
        }
    }
    num / q(inv.total_rank())
}

/// `u·m / |m|`, the slope contribution of a direction `u`; degree-free.
pub(crate) fn direction_slope(ranks: &[i64], u: &[Rational]) -> Rational {
    let total: i64 = ranks.iter().sum();
    let mut num = Rational::zero();
    for (a, &n) in u.iter().zip(ranks) {
        if n != 0 {
            num += a * q(n);
        }
    }
    num / q(total)
}

/// `χ(Hom(A, B))` for bundles `A = (m, e)`, `B = (n, f)`.
pub fn pair_euler(m: i64, e: i64, n: i64, f: i64, g: i64) -> i64 {
    m * f - n * e + m * n * (1 - g)
}

/// Euler form of the chain Hom-complex
/// `⊕ Hom(A_i, B_i) -> ⊕ Hom(A_(i-1), B_i)`.
pub fn chain_euler(a: &ChainInvariants, b: &ChainInvariants, g: i64) -> Result<i64> {
    if a.ranks.len() != b.ranks.len() {
        return Err(argument("chains of different lengths"));
    }
    Ok(chain_euler_raw(a, b, g))
}

pub(crate) fn chain_euler_raw(a: &ChainInvariants, b: &ChainInvariants, g: i64) -> i64 {
    let mut acc = 0;
    for i in 0..a.ranks.len() {
        acc += pair_euler(a.ranks[i], a.degrees[i], b.ranks[i], b.degrees[i], g);
        if i > 0 {
            acc -= pair_euler(a.ranks[i - 1], a.degrees[i - 1], b.ranks[i], b.degrees[i], g);
        }
    }
    acc
}

/// An ordered Harder–Narasimhan type, highest slope first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HnType {
    parts: Vec<ChainInvariants>,
}

impl HnType {
    pub fn new(parts: Vec<ChainInvariants>) -> Result<Self> {
        if parts.is_empty() {
            return Err(argument("an HN type needs at least one part"));
        }
        let len = parts[0].ranks.len();
        if parts.iter().any(|p| p.ranks.len() != len) {
            return Err(argument("HN parts must have equal length"));
        }
        Ok(Self { parts })
    }

    pub(crate) fn new_unchecked(parts: Vec<ChainInvariants>) -> Self {
        Self { parts }
    }

    pub fn parts(&self) -> &[ChainInvariants] {
        &self.parts
    }

    pub fn total(&self) -> ChainInvariants {
        let len = self.parts[0].ranks.len();
        let mut ranks = vec![0; len];
        let mut degrees = vec![0; len];
        for p in &self.parts {
            for i in 0..len {
                ranks[i] += p.ranks[i];
                degrees[i] += p.degrees[i];
            }
        }
        ChainInvariants { ranks, degrees }
    }

    /// Checks that the parts sum to `total` and have strictly decreasing
    /// α-slopes.
    pub fn validate(&self, total: &ChainInvariants, alpha: &StabilityParameter) -> Result<()> {
        if &self.total() != total {
            return Err(argument(format!("HN parts do not sum to {total}")));
        }
        let slopes = self
            .parts
            .iter()
            .map(|p| alpha_slope(p, alpha))
            .collect::<Result<Vec<_>>>()?;
        if slopes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(argument("HN slopes are not strictly decreasing"));
        }
        Ok(())
    }

    /// `Σ_(j<j') -χ(τ^j, τ^j')`: the codimension of the stratum.
    pub fn hn_exponent(&self, g: i64) -> i64 {
        let mut acc = 0;
        for j in 0..self.parts.len() {
            for k in j + 1..self.parts.len() {
                acc -= chain_euler_raw(&self.parts[j], &self.parts[k], g);
            }
        }
        acc
    }
}

impl fmt::Display for HnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(" > "))
    }
}

/// A critical time along a ray, with the sub-invariants whose slope meets
/// the total slope there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallEvent {
    pub time: Rational,
    pub witnesses: Vec<ChainInvariants>,
}

/// `α_H = (r(2g-2), ..., 2g-2, 0)`.
pub fn higgs_parameter(r: usize, g: i64) -> StabilityParameter {
    StabilityParameter {
        alpha: (0..=r).map(|i| q((r - i) as i64 * (2 * g - 2))).collect(),
    }
}

/// The ray direction for a chain with ranks `ranks`: `δ_r = 0` and
/// `δ_{i-1} - δ_i = K^(r-i)` with `K = n^2 + 2`, `n = Σ ranks`.
///
/// Two sub-objects of total rank at most `n` compare in δ-slope exactly as
/// their vectors of partial rank fractions `Σ_{i<=k} m_i / Σ m_i` compare
/// lexicographically, so restricting δ to a slot range and rescaling gives
/// the direction of the restricted chain. Along this ray a chain with
/// non-constant ranks is unstable for `t >> 0`: the subchain generated by
/// the first nonzero slot, or a kernel of a composite map, has larger
/// δ-slope. Equal gaps do not have this property, e.g. for ranks `(1,2,1)`.
pub fn terminal_direction(ranks: &[i64]) -> Vec<Rational> {
    let n: i64 = ranks.iter().sum();
    let k = BigInt::from(n * n + 2);
    let mut out = vec![Rational::zero(); ranks.len()];
    let mut gap = BigInt::one();
    for i in (0..ranks.len().saturating_sub(1)).rev() {
        out[i] = &out[i + 1] + Rational::from_integer(gap.clone());
        gap *= &k;
    }
    out
}

pub(crate) fn check_genus(g: i64) -> Result<()> {
    if g < 2 {
        return Err(Error::Configuration(format!(
            "genus must be at least 2, got {g}"
        )));
    }
    Ok(())
}

/// Whether some proper sub-invariant can have the same α-slope as `inv`.
///
/// A sub-rank `m'` pins the degree of every slot where it is `0` or `n_i`;
/// otherwise only integrality of the required total degree is tested.
pub fn is_critical(inv: &ChainInvariants, alpha: &StabilityParameter) -> Result<bool> {
    alpha_slope(inv, alpha)?;
    Ok(enumerate::equal_slope_sub(inv, alpha.values(), None))
}

/// `α̃ = α_H + ε·δ` with `ε = min(1, t_1 / 2)`, where `t_1` is the first
/// bound-`b` wall time after `α_H`. Between `α_H` and `α̃` no relevant
/// destabilizer changes side.
pub fn perturb_into_interior(
    alpha_h: &StabilityParameter,
    inv: &ChainInvariants,
    b: i64,
    g: i64,
) -> Result<StabilityParameter> {
    check_genus(g)?;
    if is_critical(inv, alpha_h)? {
        return Err(Error::Critical);
    }
    let r = inv.length();
    if r == 0 {
        return Ok(alpha_h.clone());
    }
    let delta = terminal_direction(inv.ranks());
    let walls = enumerate::wall_candidates(inv, alpha_h.values(), &delta, false, b, g)?;
    let mut eps = Rational::one();
    if let Some((t, _)) = walls.first() {
        let half = t / q(2);
        if half < eps {
            eps = half;
        }
    }
    Ok(alpha_h.along(&eps, &delta))
}

/// Times `t > 0` where a bound-relevant destabilizer meets `inv` along
/// `α_0 + t·δ`, ascending.
pub fn find_wall_events(
    inv: &ChainInvariants,
    alpha0: &StabilityParameter,
    delta: &[Rational],
    b: i64,
    g: i64,
) -> Result<Vec<WallEvent>> {
    check_genus(g)?;
    alpha_slope(inv, alpha0)?;
    if inv.length() == 0 {
        return Ok(Vec::new());
    }
    if delta.len() != alpha0.len() {
        return Err(argument("ray direction has the wrong length"));
    }
    if delta.iter().all(|x| x == &delta[0]) {
        return Err(argument("degenerate ray: constant direction separates no slopes"));
    }
    let walls = enumerate::wall_candidates(inv, alpha0.values(), delta, false, b, g)?;
    Ok(walls
        .into_iter()
        .map(|(time, witnesses)| WallEvent { time, witnesses })
        .collect())
}

/// Non-trivial HN types at `α` with exponent at most `b`, restricted to
/// types whose parts pass the non-emptiness tests. Sorted.
pub fn enumerate_hn_types(
    inv: &ChainInvariants,
    alpha: &StabilityParameter,
    b: i64,
    g: i64,
) -> Result<Vec<HnType>> {
    check_genus(g)?;
    alpha_slope(inv, alpha)?;
    enumerate::hn_types(inv, alpha.values(), b, g)
}

/// The types `I_±` at a wall: all parts share the wall slope and have
/// strictly decreasing slopes at `alpha_side`.
pub fn enumerate_wall_types(
    inv: &ChainInvariants,
    alpha_wall: &StabilityParameter,
    alpha_side: &StabilityParameter,
    b: i64,
    g: i64,
) -> Result<Vec<HnType>> {
    check_genus(g)?;
    alpha_slope(inv, alpha_side)?;
    if !is_critical(inv, alpha_wall)? {
        return Err(Error::NotAWall);
    }
    let u: Vec<Rational> = alpha_side
        .values()
        .iter()
        .zip(alpha_wall.values())
        .map(|(s, w)| s - w)
        .collect();
    if u.iter().all(Zero::is_zero) {
        return Ok(Vec::new());
    }
    enumerate::wall_types(inv, alpha_wall.values(), &u, b, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(n: &[i64], d: &[i64]) -> ChainInvariants {
        ChainInvariants::new(n.to_vec(), d.to_vec()).unwrap()
    }

    fn rat(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn slopes() {
        let a0 = StabilityParameter::from_ints(&[0]).unwrap();
        assert_eq!(alpha_slope(&inv(&[2], &[1]), &a0).unwrap(), rat(1, 2));
        let a = StabilityParameter::from_ints(&[2, 0]).unwrap();
        assert_eq!(alpha_slope(&inv(&[1, 1], &[0, 0]), &a).unwrap(), q(1));
        assert_eq!(
            alpha_slope(&inv(&[2, 4], &[2, 6]), &a).unwrap(),
            alpha_slope(&inv(&[1, 2], &[1, 3]), &a).unwrap()
        );
        assert!(alpha_slope(&inv(&[1, 1], &[0, 0]), &a0).is_err());
    }

    #[test]
    fn euler_forms() {
        assert_eq!(pair_euler(1, 0, 1, 0, 3), -2);
        assert_eq!(pair_euler(1, 0, 1, 5, 2), 5 + 1 - 2);
        assert_eq!(pair_euler(2, 3, 2, -1, 4) + pair_euler(2, -1, 2, 3, 4), 2 * 4 * (1 - 4));
        let a = inv(&[1, 1], &[2, 7]);
        assert_eq!(chain_euler(&a, &a, 3).unwrap(), (1 - 3) - (7 - 2));
        assert_eq!(1 - chain_euler(&a, &a, 3).unwrap(), 3 + 5);
        let b = inv(&[3], &[1]);
        assert_eq!(chain_euler(&b, &b, 2).unwrap(), pair_euler(3, 1, 3, 1, 2));
        // Dimension of the moduli of stable bundles.
        assert_eq!(1 - chain_euler(&b, &b, 2).unwrap(), 9 * (2 - 1) + 1);
    }

    #[test]
    fn bundle_exponent() {
        let t = HnType::new(vec![inv(&[1], &[4]), inv(&[1], &[1])]).unwrap();
        assert_eq!(t.hn_exponent(3), 4 - 1 + 3 - 1);
        assert_eq!(HnType::new(vec![inv(&[2], &[1])]).unwrap().hn_exponent(2), 0);
    }

    #[test]
    fn parameters() {
        assert_eq!(higgs_parameter(1, 2), StabilityParameter::from_ints(&[2, 0]).unwrap());
        assert_eq!(higgs_parameter(0, 5), StabilityParameter::from_ints(&[0]).unwrap());
        assert_eq!(higgs_parameter(2, 3), StabilityParameter::from_ints(&[8, 4, 0]).unwrap());
        assert!(higgs_parameter(2, 3).in_cone(3));
        assert!(!higgs_parameter(2, 3).in_cone_interior(3));
        assert_eq!(terminal_direction(&[1, 1]), vec![q(1), q(0)]);
        assert_eq!(terminal_direction(&[1, 2, 1]), vec![q(19), q(1), q(0)]);
        assert_eq!(terminal_direction(&[3]), vec![q(0)]);
        let a = higgs_parameter(2, 3).along(&rat(1, 5), &terminal_direction(&[1, 1, 1]));
        assert!(a.in_cone_interior(3));
    }

    #[test]
    fn twist_and_canonical() {
        let a = inv(&[1, 2], &[3, -1]);
        let alpha = StabilityParameter::new(vec![rat(7, 3), q(0)]).unwrap();
        let mu = alpha_slope(&a, &alpha).unwrap();
        assert_eq!(alpha_slope(&a.twist(4), &alpha).unwrap(), mu + q(4));
        let c = a.canonical();
        assert!((0..3).contains(&c.total_degree()));
        assert_eq!(c, a.twist(-7).canonical());
    }

    #[test]
    fn criticality() {
        let a = StabilityParameter::from_ints(&[0]).unwrap();
        assert!(!is_critical(&inv(&[2], &[1]), &a).unwrap());
        assert!(is_critical(&inv(&[2], &[2]), &a).unwrap());
        let h = higgs_parameter(1, 2);
        assert!(!is_critical(&inv(&[1, 1], &[1, 2]), &h).unwrap());
        // (1,0;0,0) splits off exactly when the slopes agree.
        let alpha = StabilityParameter::from_ints(&[0, 0]).unwrap();
        assert!(is_critical(&inv(&[1, 1], &[0, 0]), &alpha).unwrap());
    }

    #[test]
    fn validation() {
        assert!(ChainInvariants::new(vec![0, 1], vec![1, 0]).is_err());
        assert!(ChainInvariants::new(vec![0], vec![0]).is_err());
        assert!(ChainInvariants::new(vec![1, 1], vec![0]).is_err());
        let t = HnType::new(vec![inv(&[1], &[1]), inv(&[1], &[-1])]).unwrap();
        let a = StabilityParameter::from_ints(&[0]).unwrap();
        assert!(t.validate(&inv(&[2], &[0]), &a).is_ok());
        let rev = HnType::new(vec![inv(&[1], &[-1]), inv(&[1], &[1])]).unwrap();
        assert!(rev.validate(&inv(&[2], &[0]), &a).is_err());
    }
}
