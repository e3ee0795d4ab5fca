//! Decoding error probabilities of a bounded-distance decoder.
//!
//! `P(i)` is the probability that an observed bit which is *wrong* is still
//! wrong after decoding, given `i` uniformly placed errors among the other
//! `n − 1` positions; `Q(i)` is the probability that a *correct* bit is turned
//! wrong (miscorrection). Both follow from the weight spectrum because the
//! decoding spheres of radius `t` are disjoint.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{inv_factorial, CompensatedSum, LnFactorials, Real};
use crate::spectrum::SpectrumTable;

/// Allowed excursion outside `[0, 1]` before a table is rejected.
pub const RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    /// Computed from a weight spectrum.
    Analytic,
    /// Large-n limiting forms.
    Asymptotic,
    /// No miscorrection: `P(i) = 1{i ≥ t}`, `Q = 0`.
    Idealized,
    /// Monte Carlo estimates.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMode {
    Plain,
    EvenSubcode,
}

/// `P(i)`, `Q(i)` for `i = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MiscorrectionTable<T> {
    n: usize,
    t: usize,
    p: Vec<T>,
    q: Vec<T>,
    source: TableSource,
}

impl<T: Real> MiscorrectionTable<T> {
    /// Wraps explicit arrays after validating lengths and the `[0, 1]` range.
    pub fn new(n: usize, t: usize, p: Vec<T>, q: Vec<T>, source: TableSource) -> Result<Self> {
        if p.len() != n || q.len() != n {
            return Err(Error::config(format!(
                "P and Q must have n={n} entries (got {} and {})",
                p.len(),
                q.len()
            )));
        }
        let table = Self { n, t, p, q, source };
        table.check_range()?;
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn source(&self) -> TableSource {
        self.source
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    fn check_range(&self) -> Result<()> {
        let tol = T::lit(RANGE_TOLERANCE);
        for (name, arr) in [("P", &self.p), ("Q", &self.q)] {
            for (i, &v) in arr.iter().enumerate() {
                if !(v >= -tol && v <= T::one() + tol) {
                    return Err(Error::numerical(format!(
                        "{name}({i}) = {v} outside [0,1] (n={}, t={})",
                        self.n, self.t
                    )));
                }
            }
        }
        Ok(())
    }

    fn clamp(&mut self) {
        for v in self.p.iter_mut().chain(self.q.iter_mut()) {
            *v = v.max(T::zero()).min(T::one());
        }
    }

    /// CSV with columns `i,P,Q`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "P", "Q"])?;
        for i in 0..self.n {
            w.write_record([
                i.to_string(),
                format!("{:e}", self.p[i].to_f64_lossy()),
                format!("{:e}", self.q[i].to_f64_lossy()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `P(i)`, `Q(i)` from a weight spectrum.
///
/// With `l = i − δ + 2j + 1` and
/// `V = C(l, l−j)·C(n−l−1, δ−1−j) / C(n−1, i)`:
///
/// ```text
/// P(i) = 1 − Σ_{δ=1..t} Σ_{j=0..δ−1} ((n−l)/n)·A_l·V
/// Q(i) =     Σ_{δ=1..t} Σ_{j=0..δ−1} ((l+1)/n)·A_{l+1}·V
/// ```
///
/// Binomials with out-of-range arguments are zero; with that convention the
/// sums hold for every `i` (the closed-form `P = 1` / `Q = 1` ranges near
/// `n` come out of the all-one codeword term automatically). `P(i) = 0` for
/// `i < t` and `Q(i) = 0` for `i ≤ t` are enforced exactly. An even-weight
/// spectrum yields the subcode tables.
pub fn miscorrection_table<T: Real>(n: usize, t: usize, spectrum: &SpectrumTable) -> Result<MiscorrectionTable<T>> {
    if spectrum.n() != n || spectrum.t() != t {
        return Err(Error::config(format!(
            "spectrum is for (n={}, t={}), requested (n={n}, t={t})",
            spectrum.n(),
            spectrum.t()
        )));
    }
    if t == 0 || n < 2 * t + 1 {
        return Err(Error::config(format!("invalid (n={n}, t={t})")));
    }
    if let Some(d) = spectrum.min_distance() {
        if d < 2 * t + 1 {
            return Err(Error::config(format!(
                "spectrum has a weight-{d} codeword, below 2t+1={}",
                2 * t + 1
            )));
        }
    }
    if let Some(exact) = spectrum.exact_counts() {
        return exact_table(n, t, exact);
    }
    let lf = LnFactorials::<f64>::new(n + t + 1);
    let nf = n as f64;
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    for i in 0..n {
        let ln_norm = lf.ln_binomial(n as i64 - 1, i as i64).expect("i < n");
        let mut sp = CompensatedSum::<T>::default();
        let mut sq = CompensatedSum::<T>::default();
        for delta in 1..=t as i64 {
            for j in 0..delta {
                let l = i as i64 - delta + 2 * j + 1;
                if l < 0 {
                    continue;
                }
                let (Some(b1), Some(b2)) = (
                    lf.ln_binomial(l, l - j),
                    lf.ln_binomial(n as i64 - l - 1, delta - 1 - j),
                ) else {
                    continue;
                };
                let ln_v = b1 + b2 - ln_norm;
                let l = l as usize;
                let a_l = spectrum.ln_count(l);
                if a_l > f64::NEG_INFINITY && l < n {
                    sp.add(T::lit((((nf - l as f64) / nf).ln() + a_l + ln_v).exp()));
                }
                let a_l1 = spectrum.ln_count(l + 1);
                if a_l1 > f64::NEG_INFINITY {
                    sq.add(T::lit(((((l + 1) as f64) / nf).ln() + a_l1 + ln_v).exp()));
                }
            }
        }
        p[i] = if i < t { T::zero() } else { T::one() - sp.value() };
        q[i] = if i <= t { T::zero() } else { sq.value() };
    }
    let mut table = MiscorrectionTable {
        n,
        t,
        p,
        q,
        source: TableSource::Analytic,
    };
    table.check_range()?;
    table.clamp();
    Ok(table)
}

/// `C(m, k)` for `k ≤ kmax`, zero outside `0 ≤ k ≤ m`.
fn small_binomials(mmax: usize, kmax: usize) -> Vec<Vec<BigUint>> {
    (0..=mmax)
        .map(|m| {
            let mut row = vec![BigUint::zero(); kmax + 1];
            let mut c = BigUint::from(1u32);
            for (k, slot) in row.iter_mut().enumerate() {
                if k > m {
                    break;
                }
                if k > 0 {
                    c = c * (m - k + 1) / k;
                }
                *slot = c.clone();
            }
            row
        })
        .collect()
}

/// `num / den` rounded to the nearest `T` (up to a final 2⁻⁶⁴ truncation).
fn ratio<T: Real>(num: &BigUint, den: &BigUint) -> T {
    if num.is_zero() {
        return T::zero();
    }
    let shift = 66 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 { (num << shift as u64) / den } else { (num >> (-shift) as u64) / den };
    let mant = q.to_f64().unwrap_or(f64::INFINITY);
    T::lit(mant * 2f64.powi(-shift as i32))
}

fn exact_table<T: Real>(n: usize, t: usize, counts: &[BigUint]) -> Result<MiscorrectionTable<T>> {
    let small = small_binomials(n + t, t);
    let binom = |m: i64, k: i64| -> Option<&BigUint> {
        if m < 0 || k < 0 || k > m {
            None
        } else {
            small[m as usize].get(k as usize)
        }
    };
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    let mut norm = BigUint::from(1u32);
    for i in 0..n {
        if i > 0 {
            norm = norm * (n - i) / i;
        }
        let den = &norm * n;
        let mut sp = BigUint::zero();
        let mut sq = BigUint::zero();
        for delta in 1..=t as i64 {
            for j in 0..delta {
                let l = i as i64 - delta + 2 * j + 1;
                let (Some(b1), Some(b2)) = (binom(l, j), binom(n as i64 - l - 1, delta - 1 - j)) else {
                    continue;
                };
                let v = b1 * b2;
                let l = l as usize;
                if l < n && !counts[l].is_zero() {
                    sp += &counts[l] * &v * (n - l);
                }
                if l < n && !counts[l + 1].is_zero() {
                    sq += &counts[l + 1] * &v * (l + 1);
                }
            }
        }
        if sp > den {
            return Err(Error::numerical(format!("P({i}) < 0 in exact arithmetic (n={n}, t={t})")));
        }
        p[i] = if i < t { T::zero() } else { ratio(&(&den - &sp), &den) };
        q[i] = if i <= t { T::zero() } else { ratio(&sq, &den) };
    }
    let table = MiscorrectionTable {
        n,
        t,
        p,
        q,
        source: TableSource::Analytic,
    };
    table.check_range()?;
    Ok(table)
}

/// Large-n limiting tables.
///
/// `P(i) = 1` for `t ≤ i ≤ n−1`. Plain code: `Q(i) = 1/((t−1)!·n)` for
/// `t+1 ≤ i ≤ n−t−1` and `Q(i) = 1` for `i ≥ n−t` (all-one codeword).
/// Even subcode (`t ≥ 2`): on `t+2 ≤ i ≤ n−t−2`, `Q(i) = 1/((t−2)!·n²)` when
/// `i+t` is odd and `1/((t−1)!·n)` when `i+t` is even; zero elsewhere.
pub fn asymptotic_pq<T: Real>(n: usize, t: usize, mode: ParityMode) -> Result<MiscorrectionTable<T>> {
    if t == 0 || n < 2 * t + 3 {
        return Err(Error::config(format!("invalid (n={n}, t={t})")));
    }
    if mode == ParityMode::EvenSubcode && t < 2 {
        return Err(Error::config("even-subcode limit needs t >= 2 ((t-2)! undefined)"));
    }
    let nf = T::from_usize_lossy(n);
    let p = (0..n).map(|i| if i >= t { T::one() } else { T::zero() }).collect();
    let main = inv_factorial::<T>(t - 1) / nf;
    let q = (0..n)
        .map(|i| match mode {
            ParityMode::Plain if i > t && i < n - t => main,
            ParityMode::Plain if i >= n - t => T::one(),
            ParityMode::EvenSubcode if i >= t + 2 && i + t + 2 <= n => {
                if (i + t) % 2 == 1 {
                    inv_factorial::<T>(t - 2) / (nf * nf)
                } else {
                    main
                }
            }
            _ => T::zero(),
        })
        .collect();
    Ok(MiscorrectionTable {
        n,
        t,
        p,
        q,
        source: TableSource::Asymptotic,
    })
}

/// No-miscorrection table: `P(i) = 1{i ≥ t}`, `Q(i) = 0`. Read with `p` as an
/// erasure probability, this is the erasure-channel recursion for a component
/// decoder that fills up to `t` erasures.
pub fn idealized_table<T: Real>(n: usize, t: usize) -> Result<MiscorrectionTable<T>> {
    if n < 2 || t >= n {
        return Err(Error::config(format!("idealized table needs t < n (n={n}, t={t})")));
    }
    Ok(MiscorrectionTable {
        n,
        t,
        p: (0..n).map(|i| if i >= t { T::one() } else { T::zero() }).collect(),
        q: vec![T::zero(); n],
        source: TableSource::Idealized,
    })
}
