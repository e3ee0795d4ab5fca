//! High-rate scaling limit: `n → ∞` with `ρ = p·(n−1)` fixed.
//!
//! The binomial error counts become Poisson, and the recursion tracks the mean
//! number `λ` of erroneous messages per constraint.

use serde::{Deserialize, Serialize};

use crate::de::{bisect, run_chain, CouplingProfile, DeLimits, DeTrace, ThresholdResult};
use crate::error::{Error, Result};
use crate::scalar::{inv_factorial, Real};
use crate::special::{gamma_p, ln_gamma};

/// Below this `λ` tails are summed term by term; above it the closed forms
/// through the incomplete gamma function are used.
pub const DIRECT_SUM_LIMIT: f64 = 30.0;

/// `(λ, ρ)` pair of the scaled recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledState<T> {
    pub lambda: T,
    pub rho: T,
}

/// Poisson tails at `(λ, k)`:
/// `φ = Σ_{i>k} π_i`, `ψ = Σ_{even i > 2⌊k/2⌋} π_i`, `ϕ = Σ_{odd i > 2⌊k/2⌋+1} π_i`
/// with `π_i = λⁱe^{−λ}/i!`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTails<T> {
    pub phi: T,
    pub psi: T,
    pub varphi: T,
}

pub fn poisson_tails<T: Real>(lambda: T, k: usize) -> PoissonTails<T> {
    if lambda < T::lit(DIRECT_SUM_LIMIT) {
        poisson_tails_direct(lambda, k)
    } else {
        poisson_tails_closed(lambda, k)
    }
}

/// Poisson pmf `λⁱe^{−λ}/i!`.
fn pmf<T: Real>(lambda: T, i: usize) -> T {
    if lambda <= T::zero() {
        return if i == 0 { T::one() } else { T::zero() };
    }
    let fi = T::from_usize_lossy(i);
    (fi * lambda.ln() - lambda - ln_gamma(fi + T::one())).exp()
}

/// Sums `π_i` for `i ≥ start`, split by parity of `i`: `(all, even, odd)`.
fn tail_from<T: Real>(lambda: T, start: usize) -> (T, T, T) {
    if lambda <= T::zero() {
        return if start == 0 { (T::one(), T::one(), T::zero()) } else { (T::zero(), T::zero(), T::zero()) };
    }
    let eps = T::epsilon() * T::lit(1e-3);
    let mut term = pmf(lambda, start);
    let (mut even, mut odd) = (T::zero(), T::zero());
    let mut i = start;
    loop {
        if i.is_multiple_of(2) {
            even = even + term;
        } else {
            odd = odd + term;
        }
        i += 1;
        term = term * lambda / T::from_usize_lossy(i);
        if term == T::zero() || (T::from_usize_lossy(i) > lambda && term < eps * (even + odd)) {
            break;
        }
    }
    (even + odd, even, odd)
}

fn clamp01<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Term-by-term tail sums (no cancellation).
pub fn poisson_tails_direct<T: Real>(lambda: T, k: usize) -> PoissonTails<T> {
    let (phi, _, _) = tail_from(lambda, k + 1);
    let h = 2 * (k / 2);
    let (_, psi, _) = tail_from(lambda, h + 2);
    let (_, _, varphi) = tail_from(lambda, h + 3);
    PoissonTails {
        phi: clamp01(phi),
        psi: clamp01(psi),
        varphi: clamp01(varphi),
    }
}

/// `φ(λ;k) = P(k+1, λ)` (regularized lower incomplete gamma) and
/// `ψ = (1+e^{−2λ})/2 − Σ_{i≤⌊k/2⌋} π_{2i}`, `ϕ = (1−e^{−2λ})/2 − Σ_{i≤⌊k/2⌋} π_{2i+1}`.
pub fn poisson_tails_closed<T: Real>(lambda: T, k: usize) -> PoissonTails<T> {
    let phi = gamma_p(T::from_usize_lossy(k + 1), lambda);
    let e2 = (-(lambda + lambda)).exp();
    let half = T::lit(0.5);
    let mut head_even = T::zero();
    let mut head_odd = T::zero();
    for i in 0..=k / 2 {
        head_even = head_even + pmf(lambda, 2 * i);
        head_odd = head_odd + pmf(lambda, 2 * i + 1);
    }
    PoissonTails {
        phi: clamp01(phi),
        psi: clamp01(half * (T::one() + e2) - head_even),
        varphi: clamp01(half * (T::one() - e2) - head_odd),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Plain,
    EvenTEven,
    EvenTOdd,
    NoMiscorrection,
}

impl VariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::EvenTEven => "even_t_even",
            Self::EvenTOdd => "even_t_odd",
            Self::NoMiscorrection => "no_miscorrection",
        }
    }
}

/// Scaled recursion for a given component family and `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScaledVariant {
    kind: VariantKind,
    t: usize,
}

impl ScaledVariant {
    pub fn new(kind: VariantKind, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::config("scaled recursion needs t >= 1"));
        }
        match kind {
            VariantKind::EvenTEven if !t.is_multiple_of(2) => Err(Error::config(format!("even_t_even requires even t (got t={t})"))),
            VariantKind::EvenTOdd if t.is_multiple_of(2) => Err(Error::config(format!("even_t_odd requires odd t (got t={t})"))),
            _ => Ok(Self { kind, t }),
        }
    }

    pub fn plain(t: usize) -> Result<Self> {
        Self::new(VariantKind::Plain, t)
    }

    /// Even-weight subcode, picking the branch that matches the parity of `t`.
    pub fn even_subcode(t: usize) -> Result<Self> {
        Self::new(if t.is_multiple_of(2) { VariantKind::EvenTEven } else { VariantKind::EvenTOdd }, t)
    }

    pub fn no_miscorrection(t: usize) -> Result<Self> {
        Self::new(VariantKind::NoMiscorrection, t)
    }

    pub fn kind(&self) -> VariantKind {
        self.kind
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Upper end of the default threshold bracket.
    pub fn bracket_high<T: Real>(&self) -> T {
        T::from_usize_lossy(2 * self.t)
    }

    /// `ρ·φ(λ;t−1) + m(λ)/(t−1)!` where the miscorrection term `m` is `φ(λ;t)`
    /// (plain), `ψ(λ;t)` / `ϕ(λ;t)` (even subcode) or zero.
    pub fn update<T: Real>(&self, lambda: T, rho: T) -> T {
        let t = self.t;
        if lambda <= T::zero() {
            return T::zero();
        }
        let (phi_tm1, phi_t, par_t) = if lambda < T::lit(DIRECT_SUM_LIMIT) {
            // One pass over i ≥ t: φ(t−1) = Σ_{i≥t}, φ(t) = φ(t−1) − π_t,
            // ψ(t) / ϕ(t) = Σ_{i≥t+2, i≡t (mod 2)}.
            let (all, even, odd) = tail_from(lambda, t);
            let pi_t = pmf(lambda, t);
            let same = if t.is_multiple_of(2) { even } else { odd };
            (all, (all - pi_t).max(T::zero()), (same - pi_t).max(T::zero()))
        } else {
            let a = poisson_tails_closed(lambda, t - 1).phi;
            let b = poisson_tails_closed(lambda, t);
            (a, b.phi, if t.is_multiple_of(2) { b.psi } else { b.varphi })
        };
        let mis = match self.kind {
            VariantKind::Plain => phi_t,
            VariantKind::EvenTEven | VariantKind::EvenTOdd => par_t,
            VariantKind::NoMiscorrection => return rho * phi_tm1,
        };
        rho * phi_tm1 + mis * inv_factorial::<T>(t - 1)
    }
}

pub fn scaled_update<T: Real>(lambda: T, rho: T, variant: &ScaledVariant) -> T {
    variant.update(lambda, rho)
}

impl<T: Real> DeLimits<T> {
    /// Defaults for the scaled recursion (success threshold on `λ` is 10⁻⁸).
    pub fn scaled() -> Self {
        Self {
            eps_success: T::lit(1e-8),
            ..Self::default()
        }
    }
}

/// Coupled scaled recursion from `λ_i = ρ` on `[1, L]`.
pub fn sc_scaled_de_run<T: Real>(rho: T, variant: &ScaledVariant, profile: &CouplingProfile, limits: &DeLimits<T>) -> DeTrace<T> {
    run_chain(rho, profile, limits, |y| variant.update(y, rho))
}

/// Coupled scaled threshold `ρ*` by bisection over `[0, 2t]`.
pub fn scaled_threshold<T: Real>(variant: &ScaledVariant, profile: &CouplingProfile, tol: T, limits: &DeLimits<T>) -> Result<ThresholdResult<T>> {
    scaled_threshold_in(variant, profile, (T::zero(), variant.bracket_high()), tol, limits)
}

pub fn scaled_threshold_in<T: Real>(
    variant: &ScaledVariant,
    profile: &CouplingProfile,
    bracket: (T, T),
    tol: T,
    limits: &DeLimits<T>,
) -> Result<ThresholdResult<T>> {
    bisect(bracket.0, bracket.1, tol, |rho| Ok(sc_scaled_de_run(rho, variant, profile, limits).converged()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_zero_tail() {
        for &l in &[0.1f64, 1.0, 5.0, 40.0] {
            assert!((poisson_tails(l, 0).phi - (1.0 - (-l).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_tail_at_zero() {
        for k in 0..6 {
            let z = poisson_tails(0.0f64, k);
            assert_eq!((z.phi, z.psi, z.varphi), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn direct_and_closed_forms_overlap() {
        for k in 0..=12 {
            for step in 0..=40 {
                let l = 20.0 + 0.5 * step as f64;
                let a = poisson_tails_direct(l, k);
                let b = poisson_tails_closed(l, k);
                assert!((a.phi - b.phi).abs() < 1e-12, "phi l={l} k={k}");
                assert!((a.psi - b.psi).abs() < 1e-12, "psi l={l} k={k}");
                assert!((a.varphi - b.varphi).abs() < 1e-12, "varphi l={l} k={k}");
            }
        }
    }

    #[test]
    fn update_pass_matches_tail_definitions() {
        for t in 1..=7 {
            for &l in &[0.01f64, 0.7, 3.0, 9.5, 29.0, 31.0, 60.0] {
                let rho = 4.2;
                let fact = inv_factorial::<f64>(t - 1);
                let a = poisson_tails(l, t - 1).phi;
                let b = poisson_tails(l, t);
                let plain = ScaledVariant::plain(t).unwrap().update(l, rho);
                assert!((plain - (rho * a + b.phi * fact)).abs() < 1e-12, "t={t} l={l}");
                let even = ScaledVariant::even_subcode(t).unwrap().update(l, rho);
                let m = if t % 2 == 0 { b.psi } else { b.varphi };
                assert!((even - (rho * a + m * fact)).abs() < 1e-12, "t={t} l={l}");
            }
        }
    }

    #[test]
    fn update_limits() {
        let v = ScaledVariant::plain(3).unwrap();
        assert_eq!(v.update(0.0, 5.0), 0.0);
        assert!((v.update(200.0f64, 5.0) - 5.5).abs() < 1e-12);
    }

    #[test]
    fn parity_validation() {
        assert!(ScaledVariant::new(VariantKind::EvenTEven, 3).unwrap_err().is_config());
        assert!(ScaledVariant::new(VariantKind::EvenTOdd, 4).unwrap_err().is_config());
        assert!(ScaledVariant::new(VariantKind::Plain, 0).is_err());
    }

    #[test]
    fn zero_rho_converges_immediately() {
        let v = ScaledVariant::plain(3).unwrap();
        let tr = sc_scaled_de_run(0.0, &v, &CouplingProfile::new(50, 5).unwrap(), &DeLimits::scaled());
        assert!(tr.converged());
        assert_eq!(tr.iterations, 1);
    }
}
