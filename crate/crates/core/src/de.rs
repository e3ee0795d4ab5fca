//! Density evolution for the uncoupled and spatially-coupled ensembles.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::miscorrection::MiscorrectionTable;
use crate::scalar::{CompensatedSum, LnFactorials, Real};

/// Coupled chain of `L` bit positions with coupling width `w`; positions
/// outside `[1, L]` are pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingProfile {
    l: usize,
    w: usize,
}

impl CouplingProfile {
    pub fn new(l: usize, w: usize) -> Result<Self> {
        if l == 0 || w == 0 || w > l {
            return Err(Error::config(format!("coupling needs L >= 1 and 1 <= w <= L (got L={l}, w={w})")));
        }
        Ok(Self { l, w })
    }

    /// `L = 1, w = 1`: the uncoupled recursion.
    pub fn uncoupled() -> Self {
        Self { l: 1, w: 1 }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn w(&self) -> usize {
        self.w
    }

    /// Number of constraint positions, `L + w − 1`.
    pub fn constraint_positions(&self) -> usize {
        self.l + self.w - 1
    }
}

/// Stopping rules for a density-evolution run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeLimits<T> {
    pub max_iters: usize,
    /// Success once every entry is below this.
    pub eps_success: T,
    /// Stall once the sup-norm change of one iteration is below this.
    pub eps_stall: T,
    /// Keep every `k`-th state (plus the final one) in the trace.
    pub record_every: Option<usize>,
}

impl<T: Real> Default for DeLimits<T> {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            eps_success: T::lit(1e-10),
            eps_stall: T::lit(1e-12),
            record_every: None,
        }
    }
}

impl<T: Real> DeLimits<T> {
    pub fn recording(mut self, every: usize) -> Self {
        self.record_every = Some(every.max(1));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergedToZero,
    Stalled,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeTrace<T> {
    pub verdict: Verdict,
    pub iterations: usize,
    /// Largest entry of the final state.
    pub residual: T,
    pub final_state: Vec<T>,
    /// `(iteration, state)` snapshots when recording was requested.
    pub history: Vec<(usize, Vec<T>)>,
}

impl<T: Real> DeTrace<T> {
    pub fn converged(&self) -> bool {
        self.verdict == Verdict::ConvergedToZero
    }

    /// CSV with columns `iteration,position,value`; positions are 1-based.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "position", "value"])?;
        for (it, state) in &self.history {
            for (i, v) in state.iter().enumerate() {
                w.write_record([it.to_string(), (i + 1).to_string(), format!("{:e}", v.to_f64_lossy())])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult<T> {
    pub threshold: T,
    /// `(succeeding, failing)` parameters bounding the threshold.
    pub bracket: (T, T),
    pub tolerance: T,
    pub evaluations: usize,
    /// `n·p*` for finite-length solves.
    pub a_star: Option<T>,
}

/// `x ↦ Σ_i C(N,i) xⁱ(1−x)^{N−i}·c_i` with `N = n − 1` and fixed weights `c`.
#[derive(Debug, Clone)]
pub struct UpdateKernel<T> {
    coeff: Vec<T>,
    lnf: LnFactorials<T>,
}

impl<T: Real> UpdateKernel<T> {
    pub fn from_weights(coeff: Vec<T>) -> Self {
        assert!(!coeff.is_empty());
        let lnf = LnFactorials::new(coeff.len() - 1);
        Self { coeff, lnf }
    }

    /// Weights `p·P(i) + (1−p)·Q(i)`.
    pub fn new(table: &MiscorrectionTable<T>, p: T) -> Self {
        let q = T::one() - p;
        Self::from_weights(table.p().iter().zip(table.q()).map(|(&a, &b)| p * a + q * b).collect())
    }

    /// Weights `P(i) − Q(i)`, i.e. `f(x;1) − f(x;0)` without cancellation.
    pub fn slope(table: &MiscorrectionTable<T>) -> Self {
        Self::from_weights(table.p().iter().zip(table.q()).map(|(&a, &b)| a - b).collect())
    }

    pub fn weights(&self) -> &[T] {
        &self.coeff
    }

    pub fn eval(&self, x: T) -> T {
        let big_n = self.coeff.len() - 1;
        if x <= T::zero() {
            return self.coeff[0];
        }
        if x >= T::one() {
            return self.coeff[big_n];
        }
        if big_n == 0 {
            return self.coeff[0];
        }
        let nf = T::from_usize_lossy(big_n);
        let mode = (((nf + T::one()) * x).floor().to_usize().unwrap_or(big_n)).min(big_n);
        let ln_x = x.ln();
        let ln_1mx = (-x).ln_1p();
        let ln_pm = self.lnf.ln_binomial(big_n as i64, mode as i64).unwrap()
            + T::from_usize_lossy(mode) * ln_x
            + T::from_usize_lossy(big_n - mode) * ln_1mx;
        let pm = ln_pm.exp();
        let odds = x / (T::one() - x);
        let eps = T::epsilon() * T::lit(1e-3);

        let mut sum = CompensatedSum::default();
        sum.add(pm * self.coeff[mode]);
        // Walk right of the mode; terms decrease geometrically.
        let mut pr = pm;
        for i in mode..big_n {
            let r = T::from_usize_lossy(big_n - i) / T::from_usize_lossy(i + 1) * odds;
            pr = pr * r;
            if pr == T::zero() {
                break;
            }
            sum.add(pr * self.coeff[i + 1]);
            if r < T::one() {
                let tail = pr * r / (T::one() - r);
                if tail < eps * sum.value() {
                    break;
                }
            }
        }
        let mut pl = pm;
        for i in (1..=mode).rev() {
            let r = T::from_usize_lossy(i) / T::from_usize_lossy(big_n - i + 1) / odds;
            pl = pl * r;
            if pl == T::zero() {
                break;
            }
            sum.add(pl * self.coeff[i - 1]);
            if r < T::one() {
                let tail = pl * r / (T::one() - r);
                if tail < eps * sum.value() {
                    break;
                }
            }
        }
        sum.value()
    }
}

/// `f_n(x;p) = Σ_{i=0}^{n−1} C(n−1,i) xⁱ(1−x)^{n−1−i}·(p·P(i) + (1−p)·Q(i))`.
pub fn fn_update<T: Real>(x: T, p: T, table: &MiscorrectionTable<T>) -> T {
    UpdateKernel::new(table, p).eval(x)
}

/// Iterates the coupled recursion
/// `x_i ← (1/w)·Σ_k f((1/w)·Σ_j x_{i−j+k})` from `x_i = init` on `[1, L]`.
///
/// Window sums are evaluated directly so that equal neighbourhoods give
/// bitwise-equal inputs, and the last evaluation of `f` is reused.
pub fn run_chain<T: Real, F: FnMut(T) -> T>(init: T, profile: &CouplingProfile, limits: &DeLimits<T>, mut f: F) -> DeTrace<T> {
    let (l, w) = (profile.l, profile.w);
    let nc = profile.constraint_positions();
    let inv_w = T::one() / T::from_usize_lossy(w);
    let mut x = vec![init; l];
    let mut next = vec![T::zero(); l];
    let mut g = vec![T::zero(); nc];
    let mut history = Vec::new();
    let every = limits.record_every;
    if every.is_some() {
        history.push((0, x.clone()));
    }
    let mut memo: Option<(T, T)> = None;
    let mut verdict = Verdict::IterationCap;
    let mut iterations = limits.max_iters;
    for it in 1..=limits.max_iters {
        for (c, gc) in g.iter_mut().enumerate() {
            let mut s = T::zero();
            for j in 0..w {
                if c >= j && c - j < l {
                    s = s + x[c - j];
                }
            }
            let y = s * inv_w;
            *gc = match memo {
                Some((a, b)) if a == y => b,
                _ => {
                    let v = f(y);
                    memo = Some((y, v));
                    v
                }
            };
        }
        let mut delta = T::zero();
        let mut top = T::zero();
        for (i, xi) in next.iter_mut().enumerate() {
            let mut s = T::zero();
            for gk in &g[i..i + w] {
                s = s + *gk;
            }
            let v = s * inv_w;
            delta = delta.max((v - x[i]).abs());
            top = top.max(v);
            *xi = v;
        }
        std::mem::swap(&mut x, &mut next);
        let done = if top < limits.eps_success {
            Some(Verdict::ConvergedToZero)
        } else if delta < limits.eps_stall || delta == T::zero() {
            Some(Verdict::Stalled)
        } else {
            None
        };
        if let Some(k) = every {
            if it % k == 0 || done.is_some() || it == limits.max_iters {
                history.push((it, x.clone()));
            }
        }
        if let Some(v) = done {
            verdict = v;
            iterations = it;
            break;
        }
    }
    let residual = x.iter().copied().fold(T::zero(), T::max);
    DeTrace {
        verdict,
        iterations,
        residual,
        final_state: x,
        history,
    }
}

/// Uncoupled recursion `x ← f_n(x;p)` from `x = p`.
pub fn de_run<T: Real>(p: T, table: &MiscorrectionTable<T>, limits: &DeLimits<T>) -> DeTrace<T> {
    sc_de_run(p, table, &CouplingProfile::uncoupled(), limits)
}

/// Coupled finite-length density evolution.
pub fn sc_de_run<T: Real>(p: T, table: &MiscorrectionTable<T>, profile: &CouplingProfile, limits: &DeLimits<T>) -> DeTrace<T> {
    let kernel = UpdateKernel::new(table, p);
    run_chain(p, profile, limits, |y| kernel.eval(y))
}

/// Bisection between a succeeding `lo` and a failing `hi`.
pub fn bisect<T: Real>(lo: T, hi: T, tol: T, mut succeeds: impl FnMut(T) -> Result<bool>) -> Result<ThresholdResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::config("tolerance must be positive"));
    }
    if !(lo < hi) {
        return Err(Error::Bracket(format!("empty bracket [{lo}, {hi}]")));
    }
    let ok_lo = succeeds(lo)?;
    let ok_hi = succeeds(hi)?;
    if ok_lo == ok_hi {
        return Err(Error::Bracket(format!(
            "both ends of [{lo}, {hi}] {}",
            if ok_lo { "succeed" } else { "fail" }
        )));
    }
    if !ok_lo {
        return Err(Error::Bracket(format!("lower end {lo} fails while upper end {hi} succeeds")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut evaluations = 2;
    let two = T::lit(2.0);
    while b - a > tol {
        let mid = (a + b) / two;
        if mid <= a || mid >= b {
            break;
        }
        evaluations += 1;
        if succeeds(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(ThresholdResult {
        threshold: (a + b) / two,
        bracket: (a, b),
        tolerance: tol,
        evaluations,
        a_star: None,
    })
}

/// Coupled threshold on `p` by bisection over `[0, 2t/(n−1)]`.
pub fn sc_threshold<T: Real>(table: &MiscorrectionTable<T>, profile: &CouplingProfile, tol: T, limits: &DeLimits<T>) -> Result<ThresholdResult<T>> {
    let hi = (T::from_usize_lossy(2 * table.t()) / T::from_usize_lossy(table.n() - 1)).min(T::one());
    sc_threshold_in(table, profile, (T::zero(), hi), tol, limits)
}

pub fn sc_threshold_in<T: Real>(
    table: &MiscorrectionTable<T>,
    profile: &CouplingProfile,
    bracket: (T, T),
    tol: T,
    limits: &DeLimits<T>,
) -> Result<ThresholdResult<T>> {
    let mut res = bisect(bracket.0, bracket.1, tol, |p| Ok(sc_de_run(p, table, profile, limits).converged()))?;
    res.a_star = Some(res.threshold * T::from_usize_lossy(table.n()));
    Ok(res)
}

/// Grid size for the uncoupled infimum.
pub const UNCOUPLED_GRID: usize = 12_000;

/// Uncoupled threshold from `r(x) = (x − f(x;0)) / (f(x;1) − f(x;0))`.
///
/// DE started at `x = p` decreases to zero iff `f(x;p) < x` on `(0, p]`, i.e.
/// iff `r(x) > p` for every `x ≤ p`, so `p* = inf_x max(x, r(x))`. This is
/// `inf_x r(x)` whenever the minimiser lies below `p*`; points where
/// `x ≤ f(x;0)` (near `x = 1` when the all-one word is a codeword) only
/// contribute `x`.
///
/// Dense grid (log-spaced below 10⁻², linear above) and golden-section
/// refinement, then a DE cross-check on either side of the result.
pub fn uncoupled_threshold<T: Real>(table: &MiscorrectionTable<T>) -> Result<ThresholdResult<T>> {
    let base = UpdateKernel::new(table, T::zero());
    let slope = UpdateKernel::slope(table);
    let ratio = |x: T| -> Result<T> {
        let den = slope.eval(x);
        if !(den > T::zero()) {
            return Err(Error::numerical(format!("f(x;1) - f(x;0) = {den} <= 0 at x = {x}")));
        }
        let num = x - base.eval(x);
        Ok(if num > T::zero() { x.max(num / den) } else { x })
    };
    let n_log = UNCOUPLED_GRID / 4;
    let n_lin = UNCOUPLED_GRID - n_log;
    let (x_min, x_knee) = (1e-8f64, 1e-2f64);
    let mut grid: Vec<T> = (0..n_log)
        .map(|k| T::lit(x_min * (x_knee / x_min).powf(k as f64 / n_log as f64)))
        .collect();
    grid.extend((0..n_lin).map(|k| T::lit(x_knee + (1.0 - x_knee) * k as f64 / n_lin as f64)));
    let mut best = (T::infinity(), 0usize);
    for (k, &x) in grid.iter().enumerate() {
        let r = ratio(x)?;
        if r < best.0 {
            best = (r, k);
        }
    }
    let k = best.1;
    let a = if k == 0 { T::lit(x_min * 1e-3) } else { grid[k - 1] };
    let b = if k + 1 == grid.len() { T::one() - T::lit(1e-9) } else { grid[k + 1] };
    let (_, p_star) = golden_section_min(a, b, T::lit(1e-13), |x| ratio(x).unwrap_or(T::infinity()));
    let p_star = p_star.min(best.0).max(T::zero());

    let delta = (p_star * T::lit(1e-4)).max(T::lit(1e-9));
    let limits = DeLimits {
        max_iters: 1_000_000,
        eps_success: T::lit(1e-12),
        eps_stall: T::zero(),
        record_every: None,
    };
    let lo = (p_star - delta).max(T::zero());
    let hi = (p_star + delta).min(T::one());
    let ok_lo = de_run(lo, table, &limits).converged();
    let ok_hi = de_run(hi, table, &limits).converged();
    if !ok_lo || ok_hi {
        return Err(Error::numerical(format!(
            "DE cross-check disagrees with p* = {p_star}: p={lo} {} and p={hi} {}",
            if ok_lo { "converges" } else { "fails" },
            if ok_hi { "converges" } else { "fails" }
        )));
    }
    Ok(ThresholdResult {
        threshold: p_star,
        bracket: (lo, hi),
        tolerance: hi - lo,
        evaluations: grid.len(),
        a_star: None,
    })
}

/// Golden-section search for a minimum on `[a, b]`; returns `(argmin, min)`.
pub(crate) fn golden_section_min<T: Real>(mut a: T, mut b: T, tol: T, mut f: impl FnMut(T) -> T) -> (T, T) {
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (T::one() + c.abs() + d.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    [(a, fa), (b, fb), (c, fc), (d, fd)]
        .into_iter()
        .fold((a, T::infinity()), |acc, (x, v)| if v < acc.1 { (x, v) } else { acc })
}
