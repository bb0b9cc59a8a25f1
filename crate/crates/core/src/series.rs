//! Truncated power series in one variable `v`, modulo `v^(N+1)`.
//!
//! The ring is generic over its coefficient type; the crate root fixes
//! [`Series`](crate::Series) to arbitrary-precision integers, which is what
//! every public computation uses.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Coefficient ring of a [`TruncatedSeries`].
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
}

impl<T> Coefficient for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + for<'a> AddAssign<&'a T>
        + for<'a> SubAssign<&'a T>
{
}

/// An element of `C[v] / (v^(N+1))`. Exactly `N + 1` coefficients are stored;
/// index `k` holds the coefficient of `v^k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, C::one(), order)
    }

    /// `c · v^k`, which is the zero series once `k > order`.
    pub fn monomial(k: usize, c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from leading coefficients, padding with zeros or
    /// dropping everything past `order`.
    pub fn from_coeffs<I: IntoIterator<Item = C>>(coeffs: I, order: usize) -> Self {
        let mut c: Vec<C> = coeffs.into_iter().take(order + 1).collect();
        c.resize(order + 1, C::zero());
        Self { coeffs: c }
    }

    /// The truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first non-zero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Index of the last non-zero coefficient, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Re-truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise truncation order");
        Self::from_coeffs(self.coeffs.iter().cloned(), order)
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k > n {
                break;
            }
            out.coeffs[i + k] = c.clone();
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a series whose constant coefficient is `+1` or `-1`.
    pub fn unit_inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0 != C::one() && c0 != -C::one() {
            return Err(Error::NonInvertible);
        }
        let n = self.order();
        let mut inv = Self::zero(n);
        inv.coeffs[0] = c0.clone();
        for k in 1..=n {
            let mut acc = C::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += &(self.coeffs[j].clone() * inv.coeffs[k - j].clone());
            }
            // c0 is its own inverse.
            inv.coeffs[k] = -(c0.clone() * acc);
        }
        Ok(inv)
    }

    /// True when `coeff(k) == coeff(center - k)` for all `0 <= k <= center`
    /// and everything above `center` vanishes.
    pub fn is_palindromic(&self, center: usize) -> bool {
        if center > self.order() {
            return false;
        }
        if self.coeffs[center + 1..].iter().any(|c| !c.is_zero()) {
            return false;
        }
        (0..=center).all(|k| self.coeffs[k] == self.coeffs[center - k])
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "series of different truncation orders"
        );
    }
}

impl<C: Coefficient + PartialOrd> TruncatedSeries<C> {
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| *c >= C::zero())
    }
}

impl<C: Coefficient> Add for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn add(self, rhs: Self) -> TruncatedSeries<C> {
        self.check_order(rhs);
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coefficient> AddAssign<&TruncatedSeries<C>> for TruncatedSeries<C> {
    fn add_assign(&mut self, rhs: &TruncatedSeries<C>) {
        self.check_order(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<C: Coefficient> Sub for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn sub(self, rhs: Self) -> TruncatedSeries<C> {
        self.check_order(rhs);
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coefficient> SubAssign<&TruncatedSeries<C>> for TruncatedSeries<C> {
    fn sub_assign(&mut self, rhs: &TruncatedSeries<C>) {
        self.check_order(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl<C: Coefficient> Neg for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn neg(self) -> TruncatedSeries<C> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<C: Coefficient> Mul for &TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;

    fn mul(self, rhs: Self) -> TruncatedSeries<C> {
        self.check_order(rhs);
        let n = self.order();
        let mut out = TruncatedSeries::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] += &(a.clone() * b.clone());
            }
        }
        out
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*v")?,
                _ => write!(f, "{c}*v^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(v^{})", self.order() + 1)
    }
}

impl<C: Coefficient> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}
