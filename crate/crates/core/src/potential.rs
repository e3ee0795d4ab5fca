//! Potential functions of the no-miscorrection system and their thresholds.
//!
//! Both the finite-length update `f̂_n(x;p)` (idealized table) and its scaled
//! limit `ρ·φ(λ;t−1)` are linear in the channel parameter, so
//! `U(x;p) = x²/2 − p·G(x)` with `G(x) = ∫₀ˣ f̂(z;1) dz`. The cumulative
//! integral `G` is tabulated once by adaptive Simpson quadrature and reused
//! across all probes of the outer bisection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::de::{bisect, golden_section_min, ThresholdResult, UpdateKernel};
use crate::error::{Error, Result};
use crate::highrate::poisson_tails;
use crate::miscorrection::idealized_table;
use crate::scalar::Real;

/// Absolute tolerance of each quadrature call.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FiniteN,
    Scaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCurve<T> {
    pub regime: Regime,
    /// `p` (finite length) or `ρ` (scaled).
    pub parameter: T,
    /// `(x, U(x))`, strictly increasing in `x`, starting at `(0, 0)`.
    pub points: Vec<(T, T)>,
}

impl<T: Real> PotentialCurve<T> {
    /// CSV with columns `state,U,parameter,regime`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["state", "U", "parameter", "regime"])?;
        let regime = match self.regime {
            Regime::FiniteN => "finite_n",
            Regime::Scaled => "scaled",
        };
        for &(x, u) in &self.points {
            w.write_record([
                format!("{:e}", x.to_f64_lossy()),
                format!("{:e}", u.to_f64_lossy()),
                format!("{:e}", self.parameter.to_f64_lossy()),
                regime.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / two, depth - 1) + simpson_rec(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

/// `U_n(x;p) = ∫₀ˣ (z − f̂_n(z;p)) dz` with the idealized (no-miscorrection) update.
pub fn potential_value<T: Real>(x: T, p: T, n: usize, t: usize) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::Domain(format!("x = {x} outside [0,1]")));
    }
    let kernel = UpdateKernel::new(&idealized_table::<T>(n, t)?, p);
    Ok(adaptive_simpson(&|z: T| z - kernel.eval(z), T::zero(), x, T::lit(QUAD_TOL)))
}

/// Scaled potential `U(λ;ρ) = ∫₀^λ (z − ρ·φ(z;t−1)) dz`.
pub fn scaled_potential_value<T: Real>(lambda: T, rho: T, t: usize) -> Result<T> {
    if t == 0 || lambda < T::zero() {
        return Err(Error::Domain(format!("invalid (lambda={lambda}, t={t})")));
    }
    Ok(adaptive_simpson(
        &|z: T| z - rho * poisson_tails(z, t - 1).phi,
        T::zero(),
        lambda,
        T::lit(QUAD_TOL),
    ))
}

/// Tabulated `G(x) = ∫₀ˣ g(z) dz` on a grid with exact evaluation between nodes.
struct Cumulative<T, F> {
    g: F,
    grid: Vec<T>,
    cum: Vec<T>,
}

impl<T: Real, F: Fn(T) -> T> Cumulative<T, F> {
    fn new(g: F, grid: Vec<T>) -> Self {
        let tol = T::lit(QUAD_TOL) / T::from_usize_lossy(grid.len());
        let mut cum = Vec::with_capacity(grid.len());
        let mut acc = T::zero();
        let mut prev = T::zero();
        for &x in &grid {
            acc = acc + adaptive_simpson(&g, prev, x, tol);
            cum.push(acc);
            prev = x;
        }
        Self { g, grid, cum }
    }

    fn at(&self, x: T) -> T {
        let k = self.grid.partition_point(|&v| v <= x);
        let (x0, c0) = if k == 0 { (T::zero(), T::zero()) } else { (self.grid[k - 1], self.cum[k - 1]) };
        c0 + adaptive_simpson(&self.g, x0, x, T::lit(QUAD_TOL))
    }

    /// `min_x (x²/2 − p·G(x))` over the grid, refined by golden section;
    /// returns `(argmin, min)`.
    fn min_potential(&self, p: T) -> (T, T) {
        let half = T::lit(0.5);
        let mut best = (0usize, T::infinity());
        for (k, (&x, &c)) in self.grid.iter().zip(&self.cum).enumerate() {
            let u = half * x * x - p * c;
            if u < best.1 {
                best = (k, u);
            }
        }
        let k = best.0;
        let a = if k == 0 { T::zero() } else { self.grid[k - 1] };
        let b = self.grid[(k + 1).min(self.grid.len() - 1)];
        let (x, u) = golden_section_min(a, b, T::lit(1e-12), |x| half * x * x - p * self.at(x));
        if u < best.1 {
            (x, u)
        } else {
            (self.grid[k], best.1)
        }
    }
}

fn mixed_grid<T: Real>(lo: f64, knee: f64, hi: f64, n_log: usize, n_lin: usize) -> Vec<T> {
    let mut grid: Vec<T> = (0..n_log).map(|k| T::lit(lo * (knee / lo).powf(k as f64 / n_log as f64))).collect();
    grid.extend((0..=n_lin).map(|k| T::lit(knee + (hi - knee) * k as f64 / n_lin as f64)));
    grid
}

/// Outer bisection on the sign of `min U`, checking that `min U` does not
/// increase with the parameter.
fn sign_bisection<T: Real>(hi: T, tol: T, mut min_u: impl FnMut(T) -> Result<(T, T)>) -> Result<ThresholdResult<T>> {
    let mut seen: Vec<(T, T)> = Vec::new();
    let mut res = bisect(T::zero(), hi, tol, |p| {
        let (_, u) = min_u(p)?;
        for &(q, v) in &seen {
            if (q < p && v < u - T::lit(1e-12)) || (q > p && v > u + T::lit(1e-12)) {
                return Err(Error::numerical(format!(
                    "min U not monotone in the parameter: {v} at {q} vs {u} at {p}"
                )));
            }
        }
        seen.push((p, u));
        Ok(u >= T::zero())
    })?;
    res.evaluations = seen.len();
    Ok(res)
}

/// Finite-length potential threshold `p̂** = sup{p : min_x U_n(x;p) ≥ 0}`.
pub fn potential_threshold_finite<T: Real>(n: usize, t: usize, tol: T) -> Result<ThresholdResult<T>> {
    let kernel = UpdateKernel::new(&idealized_table::<T>(n, t)?, T::one());
    let cum = Cumulative::new(move |z: T| kernel.eval(z), mixed_grid(1e-6, 1e-2, 1.0, 400, 2000));
    let hi = T::one();
    let mut res = sign_bisection(hi, tol, |p| Ok(cum.min_potential(p)))?;
    res.a_star = Some(res.threshold * T::from_usize_lossy(n));
    Ok(res)
}

/// High-rate potential threshold `ρ̂** = sup{ρ ≥ 0 : min_{λ ≥ 0} U(λ;ρ) ≥ 0}`,
/// with the `λ` search capped at `4t`.
pub fn scaled_potential_threshold<T: Real>(t: usize, tol: T) -> Result<ThresholdResult<T>> {
    if t < 2 {
        return Err(Error::config(format!("scaled potential threshold needs t >= 2 (got t={t})")));
    }
    let cap = 4.0 * t as f64;
    let cum = Cumulative::new(move |z: T| poisson_tails(z, t - 1).phi, mixed_grid(1e-4, 0.5, cap, 100, 4000));
    let cap_t = T::lit(cap);
    let res = sign_bisection(T::lit(2.0 * t as f64), tol, |rho| {
        let (x, u) = cum.min_potential(rho);
        if u < T::zero() && x >= cap_t * T::lit(1.0 - 1e-9) {
            return Err(Error::Domain(format!("minimizer reached the lambda cap {cap} at rho = {rho}")));
        }
        Ok((x, u))
    })?;
    Ok(res)
}

/// `U_n(x;p)` on `points + 1` equispaced states in `[0, 1]`.
pub fn potential_curve_finite<T: Real>(n: usize, t: usize, p: T, points: usize) -> Result<PotentialCurve<T>> {
    let kernel = UpdateKernel::new(&idealized_table::<T>(n, t)?, p);
    let pts = cumulative_curve(&|z: T| z - kernel.eval(z), T::one(), points.max(1));
    Ok(PotentialCurve {
        regime: Regime::FiniteN,
        parameter: p,
        points: pts,
    })
}

/// `U(λ;ρ)` on `points + 1` equispaced states in `[0, lambda_max]`.
pub fn potential_curve_scaled<T: Real>(t: usize, rho: T, lambda_max: T, points: usize) -> Result<PotentialCurve<T>> {
    if t == 0 || !(lambda_max > T::zero()) {
        return Err(Error::config("scaled curve needs t >= 1 and lambda_max > 0"));
    }
    let pts = cumulative_curve(&|z: T| z - rho * poisson_tails(z, t - 1).phi, lambda_max, points.max(1));
    Ok(PotentialCurve {
        regime: Regime::Scaled,
        parameter: rho,
        points: pts,
    })
}

fn cumulative_curve<T: Real>(f: &impl Fn(T) -> T, hi: T, points: usize) -> Vec<(T, T)> {
    let step = hi / T::from_usize_lossy(points);
    let mut out = vec![(T::zero(), T::zero())];
    let mut acc = T::zero();
    for k in 1..=points {
        let a = step * T::from_usize_lossy(k - 1);
        let b = if k == points { hi } else { step * T::from_usize_lossy(k) };
        acc = acc + adaptive_simpson(f, a, b, T::lit(QUAD_TOL) / T::from_usize_lossy(points));
        out.push((b, acc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_exp() {
        let v = adaptive_simpson(&|x: f64| x * x * x, 0.0, 2.0, 1e-13);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn u_at_zero_and_zero_channel() {
        assert_eq!(potential_value(0.0f64, 0.3, 63, 2).unwrap(), 0.0);
        for &x in &[0.1f64, 0.5, 1.0] {
            assert!((potential_value(x, 0.0, 63, 2).unwrap() - x * x / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn curves_start_at_origin() {
        let c = potential_curve_scaled(3, 5.0f64, 12.0, 60).unwrap();
        assert_eq!(c.points[0], (0.0, 0.0));
        assert!(c.points.windows(2).all(|w| w[1].0 > w[0].0));
        let u = scaled_potential_value(12.0f64, 5.0, 3).unwrap();
        assert!((c.points.last().unwrap().1 - u).abs() < 1e-10);
    }

    #[test]
    fn scaled_threshold_needs_t_two() {
        assert!(scaled_potential_threshold::<f64>(1, 1e-4).unwrap_err().is_config());
    }
}
