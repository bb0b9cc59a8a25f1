//! Closed-form classes of the atomic motives the recursion is built from:
//! Tate twists, the curve, its symmetric powers and Jacobian, `BGm`, zeta
//! values at Tate twists, symmetric powers of `C x P^(m-1)` and the stack of
//! vector bundles.
//!
//! Everything is realized in the signed E-specialization, so pure classes
//! come out as Poincaré series with Betti-number coefficients.

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{argument, Error, Result};
use crate::Series;

/// Genus and truncation order shared by every computation, plus memo tables
/// for the kernel classes. Cache entries are pure functions of
/// `(genus, truncation, arguments)`, so concurrent fills are idempotent.
#[derive(Debug)]
pub struct CurveContext {
    genus: u32,
    truncation: usize,
    sym_cache: DashMap<usize, Series>,
    zeta_cache: DashMap<i64, Series>,
    proj_cache: DashMap<(usize, usize), Series>,
}

impl Clone for CurveContext {
    fn clone(&self) -> Self {
        Self::new(self.genus, self.truncation)
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl CurveContext {
    pub fn new(genus: u32, truncation: usize) -> Self {
        Self {
            genus,
            truncation,
            sym_cache: DashMap::new(),
            zeta_cache: DashMap::new(),
            proj_cache: DashMap::new(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn zero(&self) -> Series {
        Series::zero(self.truncation)
    }

    pub fn one(&self) -> Series {
        Series::one(self.truncation)
    }

    /// `v^k`.
    pub fn v_pow(&self, k: usize) -> Series {
        Series::monomial(k, BigInt::one(), self.truncation)
    }

    /// A series from small integer coefficients.
    pub fn from_ints(&self, c: &[i64]) -> Series {
        Series::from_coeffs(c.iter().map(|&x| BigInt::from(x)), self.truncation)
    }

    /// `1 - v^2`, the inverse of [`bgm_class`](Self::bgm_class).
    pub fn gerbe_strip(&self) -> Series {
        &self.one() - &self.v_pow(2)
    }

    /// The Tate object `R{j}`, realized as `v^(2j)`.
    pub fn tate_class(&self, j: usize) -> Series {
        self.v_pow(2 * j)
    }

    /// `1 + 2g v + v^2`.
    pub fn curve_class(&self) -> Series {
        let two_g = BigInt::from(2 * self.genus);
        Series::from_coeffs([BigInt::one(), two_g, BigInt::one()], self.truncation)
    }

    /// `(1 + v)^(2g)`.
    pub fn jacobian_class(&self) -> Series {
        let two_g = 2 * self.genus as u64;
        Series::from_coeffs((0..=two_g).map(|k| binomial(two_g, k)), self.truncation)
    }

    /// `sum_j v^(2j)`.
    pub fn bgm_class(&self) -> Series {
        Series::from_coeffs(
            (0..=self.truncation).map(|k| {
                if k % 2 == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }),
            self.truncation,
        )
    }

    /// Class of `Sym^n C`: the `t^n` coefficient of
    /// `(1 + v t)^(2g) / ((1 - t)(1 - v^2 t))`.
    pub fn sym_curve_class(&self, n: usize) -> Series {
        if let Some(hit) = self.sym_cache.get(&n) {
            return hit.clone();
        }
        let two_g = 2 * self.genus as usize;
        let mut out = self.zero();
        let mut coeffs = out.clone().into_coeffs();
        for a in 0..=two_g.min(n) {
            let b = binomial(two_g as u64, a as u64);
            for c in 0..=(n - a) {
                let k = a + 2 * c;
                if k > self.truncation {
                    break;
                }
                coeffs[k] += &b;
            }
        }
        out = Series::from_coeffs(coeffs, self.truncation);
        self.sym_cache.insert(n, out.clone());
        out
    }

    /// `Z(C, R{i}) = (1 + v^(2i+1))^(2g) / ((1 - v^(2i))(1 - v^(2i+2)))`.
    pub fn zeta_at_tate(&self, i: i64) -> Result<Series> {
        if i <= 0 {
            return Err(Error::DivergentZeta(i));
        }
        if let Some(hit) = self.zeta_cache.get(&i) {
            return Ok(hit.clone());
        }
        let i_u = i as usize;
        let odd = &self.one() + &self.v_pow(2 * i_u + 1);
        let numerator = odd.pow(2 * self.genus);
        let d1 = &self.one() - &self.v_pow(2 * i_u);
        let d2 = &self.one() - &self.v_pow(2 * i_u + 2);
        let out = &numerator * &(&d1 * &d2).unit_inverse()?;
        self.zeta_cache.insert(i, out.clone());
        Ok(out)
    }

    /// Class of `Sym^l (C x P^(m-1))`: the `t^l` coefficient of
    /// `prod_{j<m} (1 + v^(2j+1) t)^(2g) / ((1 - v^(2j) t)(1 - v^(2j+2) t))`.
    pub fn sym_curve_proj_class(&self, l: usize, m: i64) -> Result<Series> {
        if m <= 0 {
            return Err(argument(format!(
                "projective factor needs m >= 1, got {m}"
            )));
        }
        let m_u = m as usize;
        if let Some(hit) = self.proj_cache.get(&(l, m_u)) {
            return Ok(hit.clone());
        }
        let two_g = 2 * self.genus as usize;
        // Running product as a polynomial in t with series coefficients.
        let mut acc: Vec<Series> = (0..=l)
            .map(|k| if k == 0 { self.one() } else { self.zero() })
            .collect();
        for j in 0..m_u {
            // t-coefficients of the j-th factor.
            let factor: Vec<Series> = (0..=l)
                .map(|k| {
                    let mut c = vec![BigInt::zero(); self.truncation + 1];
                    for a in 0..=two_g.min(k) {
                        let b = binomial(two_g as u64, a as u64);
                        for p in 0..=(k - a) {
                            let q = k - a - p;
                            let e = (2 * j + 1) * a + 2 * j * p + (2 * j + 2) * q;
                            if e <= self.truncation {
                                c[e] += &b;
                            }
                        }
                    }
                    Series::from_coeffs(c, self.truncation)
                })
                .collect();
            let mut next: Vec<Series> = (0..=l).map(|_| self.zero()).collect();
            for (x, ax) in acc.iter().enumerate() {
                if ax.is_zero() {
                    continue;
                }
                for (y, fy) in factor[..=l - x].iter().enumerate() {
                    next[x + y] += &(ax * fy);
                }
            }
            acc = next;
        }
        let out = acc.pop().expect("non-empty");
        self.proj_cache.insert((l, m_u), out.clone());
        Ok(out)
    }

    /// Class of the stack `Bun_{n,d}` (independent of `d`):
    /// `Jac · BGm · prod_{i=1}^{n-1} Z(C, R{i})`.
    pub fn bun_stack_class(&self, n: i64) -> Result<Series> {
        if n <= 0 {
            return Err(argument(format!("bundle rank must be >= 1, got {n}")));
        }
        let mut acc = &self.jacobian_class() * &self.bgm_class();
        for i in 1..n {
            acc = &acc * &self.zeta_at_tate(i)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: u32, n: usize) -> CurveContext {
        CurveContext::new(g, n)
    }

    #[test]
    fn tate_and_curve() {
        let c = ctx(2, 8);
        assert_eq!(c.tate_class(0), c.one());
        assert_eq!(c.tate_class(1), c.from_ints(&[0, 0, 1]));
        assert_eq!(c.tate_class(3), c.from_ints(&[0, 0, 0, 0, 0, 0, 1]));
        assert!(c.tate_class(5).is_zero());
        assert_eq!(ctx(0, 4).curve_class(), ctx(0, 4).from_ints(&[1, 0, 1]));
        assert_eq!(c.curve_class(), c.from_ints(&[1, 4, 1]));
        assert_eq!(ctx(1, 4).curve_class(), ctx(1, 4).from_ints(&[1, 2, 1]));
    }

    #[test]
    fn symmetric_powers_small() {
        let c = ctx(1, 8);
        assert_eq!(c.sym_curve_class(0), c.one());
        assert_eq!(c.sym_curve_class(1), c.curve_class());
        // Sym^2 of an elliptic curve is a P^1-bundle over it.
        assert_eq!(c.sym_curve_class(2), c.from_ints(&[1, 2, 2, 2, 1]));
    }

    #[test]
    fn jacobian_classes() {
        assert_eq!(ctx(0, 4).jacobian_class(), ctx(0, 4).one());
        assert_eq!(ctx(1, 4).jacobian_class(), ctx(1, 4).from_ints(&[1, 2, 1]));
        assert_eq!(
            ctx(2, 6).jacobian_class(),
            ctx(2, 6).from_ints(&[1, 4, 6, 4, 1])
        );
    }

    #[test]
    fn bgm() {
        let c = ctx(2, 4);
        assert_eq!(c.bgm_class(), c.from_ints(&[1, 0, 1, 0, 1]));
        assert_eq!(&c.bgm_class() * &c.gerbe_strip(), c.one());
        let sum = (0..=2).fold(c.zero(), |acc, j| &acc + &c.tate_class(j));
        assert_eq!(sum, c.bgm_class());
    }

    #[test]
    fn zeta_values() {
        let c = ctx(0, 10);
        let expect = (&(&c.one() - &c.v_pow(2)) * &(&c.one() - &c.v_pow(4)))
            .unit_inverse()
            .unwrap();
        assert_eq!(c.zeta_at_tate(1).unwrap(), expect);
        assert!(matches!(
            c.zeta_at_tate(0),
            Err(Error::DivergentZeta(0))
        ));
        for i in 1..4 {
            assert_eq!(*ctx(3, 12).zeta_at_tate(i).unwrap().constant(), BigInt::one());
        }
    }

    #[test]
    fn projective_symmetric_powers() {
        let c = ctx(2, 12);
        assert_eq!(c.sym_curve_proj_class(0, 3).unwrap(), c.one());
        for l in 0..5 {
            assert_eq!(c.sym_curve_proj_class(l, 1).unwrap(), c.sym_curve_class(l));
        }
        for m in 1..4usize {
            let pm = (0..m).fold(c.zero(), |acc, j| &acc + &c.tate_class(j));
            assert_eq!(
                c.sym_curve_proj_class(1, m as i64).unwrap(),
                &c.curve_class() * &pm
            );
        }
        assert!(c.sym_curve_proj_class(2, 0).is_err());
    }

    #[test]
    fn bun_stack() {
        let c = ctx(1, 2);
        assert_eq!(c.bun_stack_class(1).unwrap(), c.from_ints(&[1, 2, 2]));
        let c = ctx(2, 4);
        assert_eq!(
            c.bun_stack_class(1).unwrap(),
            &c.jacobian_class() * &c.bgm_class()
        );
        assert!(c.bun_stack_class(0).is_err());
    }

    #[test]
    fn cache_is_pure() {
        let c = ctx(2, 10);
        let a = c.sym_curve_proj_class(3, 2).unwrap();
        let fresh = ctx(2, 10);
        assert_eq!(fresh.sym_curve_proj_class(3, 2).unwrap(), a);
        assert_eq!(c.sym_curve_proj_class(3, 2).unwrap(), a);
    }
}
