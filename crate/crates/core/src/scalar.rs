//! Scalar abstraction for the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by density evolution and the threshold solvers.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Values outside the type's range saturate to ±∞.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| if x > 0.0 { Self::infinity() } else { Self::neg_infinity() })
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::lit(k as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Table of `ln k!` for `k = 0..=max`, accumulated in `f64` and stored as `T`.
#[derive(Debug, Clone)]
pub struct LnFactorials<T> {
    table: Vec<T>,
}

impl<T: Real> LnFactorials<T> {
    pub fn new(max: usize) -> Self {
        let mut acc = 0.0f64;
        let mut table = Vec::with_capacity(max + 1);
        table.push(T::zero());
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(T::lit(acc));
        }
        Self { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn ln_factorial(&self, k: usize) -> T {
        self.table[k]
    }

    /// `ln C(n, k)`, or `None` when the coefficient is zero (`k` outside `0..=n`,
    /// including negative arguments).
    #[inline]
    pub fn ln_binomial(&self, n: i64, k: i64) -> Option<T> {
        if n < 0 || k < 0 || k > n {
            return None;
        }
        let (n, k) = (n as usize, k as usize);
        Some(self.table[n] - self.table[k] - self.table[n - k])
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
}

impl<T: Real> CompensatedSum<T> {
    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// `1/k!` as `T`.
pub(crate) fn inv_factorial<T: Real>(k: usize) -> T {
    let mut v = 1.0f64;
    for i in 2..=k {
        v /= i as f64;
    }
    T::lit(v)
}
