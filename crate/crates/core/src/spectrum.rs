//! Weight spectra of component codes: exact enumeration, MacWilliams transform
//! of the dual spectrum, and the binomial approximation for primitive BCH codes.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bch::{poly2, ComponentCode};
use crate::error::{Error, Result};
use crate::scalar::LnFactorials;

/// Largest dimension enumerated directly.
pub const MAX_ENUM_DIM: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ExactEnum,
    DualMacwilliams,
    BinomialApprox,
}

impl SpectrumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumMethod::ExactEnum => "exact_enum",
            SpectrumMethod::DualMacwilliams => "dual_macwilliams",
            SpectrumMethod::BinomialApprox => "binomial_approx",
        }
    }

    /// Exact enumeration when `k ≤ 24`, MacWilliams when `n − k ≤ 24`,
    /// the binomial approximation otherwise.
    pub fn auto_for(code: &ComponentCode) -> Self {
        if code.k() <= MAX_ENUM_DIM {
            SpectrumMethod::ExactEnum
        } else if code.n() - code.k() <= MAX_ENUM_DIM {
            SpectrumMethod::DualMacwilliams
        } else {
            SpectrumMethod::BinomialApprox
        }
    }
}

impl std::str::FromStr for SpectrumMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_enum" | "exact" => Ok(SpectrumMethod::ExactEnum),
            "dual_macwilliams" | "macwilliams" => Ok(SpectrumMethod::DualMacwilliams),
            "binomial_approx" | "binomial" => Ok(SpectrumMethod::BinomialApprox),
            other => Err(Error::config(format!("unknown spectrum method '{other}'"))),
        }
    }
}

/// Weight enumerator `A_0..A_n`, stored as natural logs so that approximate
/// spectra at n = 1023 stay representable. Exact methods also keep the integers.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    n: usize,
    k: usize,
    t: usize,
    method: SpectrumMethod,
    ln_counts: Vec<f64>,
    exact: Option<Vec<BigUint>>,
}

impl SpectrumTable {
    fn from_exact(n: usize, k: usize, t: usize, method: SpectrumMethod, counts: Vec<BigUint>) -> Self {
        let ln_counts = counts.iter().map(ln_biguint).collect();
        Self {
            n,
            k,
            t,
            method,
            ln_counts,
            exact: Some(counts),
        }
    }

    /// Builds a table from `ln A_l` values (`-inf` for zero counts).
    pub fn from_ln_counts(n: usize, k: usize, t: usize, method: SpectrumMethod, ln_counts: Vec<f64>) -> Result<Self> {
        if ln_counts.len() != n + 1 {
            return Err(Error::config(format!(
                "spectrum needs n+1={} entries, got {}",
                n + 1,
                ln_counts.len()
            )));
        }
        Ok(Self {
            n,
            k,
            t,
            method,
            ln_counts,
            exact: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn method(&self) -> SpectrumMethod {
        self.method
    }

    /// `ln A_l`, `-inf` when `A_l = 0` or `l > n`.
    #[inline]
    pub fn ln_count(&self, l: usize) -> f64 {
        self.ln_counts.get(l).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn count(&self, l: usize) -> f64 {
        self.ln_count(l).exp()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.ln_counts.iter().map(|x| x.exp()).collect()
    }

    /// Integer counts for exact methods.
    pub fn exact_counts(&self) -> Option<&[BigUint]> {
        self.exact.as_deref()
    }

    /// `min{l ≥ 1 : A_l > 0}`.
    pub fn min_distance(&self) -> Option<usize> {
        (1..=self.n).find(|&l| self.ln_counts[l] > f64::NEG_INFINITY)
    }

    /// CSV with columns `l,A_l,method`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l", "A_l", "method"])?;
        for l in 0..=self.n {
            let value = match &self.exact {
                Some(c) => c[l].to_string(),
                None => format!("{:.17e}", self.count(l)),
            };
            w.write_record([l.to_string(), value, self.method.as_str().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Weight spectrum of `code` by the requested method.
pub fn weight_spectrum(code: &ComponentCode, method: SpectrumMethod) -> Result<SpectrumTable> {
    let (n, k, t) = (code.n(), code.k(), code.t());
    match method {
        SpectrumMethod::ExactEnum => {
            if k > MAX_ENUM_DIM {
                return Err(Error::config(format!(
                    "exact_enum needs k <= {MAX_ENUM_DIM}, code has k={k}"
                )));
            }
            let basis: Vec<Vec<u64>> = code.basis().iter().map(|w| w.limbs().to_vec()).collect();
            let counts = enumerate_weights(n, &basis);
            Ok(SpectrumTable::from_exact(
                n,
                k,
                t,
                method,
                counts.into_iter().map(BigUint::from).collect(),
            ))
        }
        SpectrumMethod::DualMacwilliams => {
            let r = n - k;
            if r > MAX_ENUM_DIM {
                return Err(Error::config(format!(
                    "dual_macwilliams needs n-k <= {MAX_ENUM_DIM}, code has n-k={r}"
                )));
            }
            let dual = dual_counts(code);
            Ok(SpectrumTable::from_exact(n, k, t, method, macwilliams(n, r, &dual)?))
        }
        SpectrumMethod::BinomialApprox => Ok(binomial_approx(code)),
    }
}

/// `A_l = 2^{−νt}·C(n,l)` for `d ≤ l ≤ n−d`, `A_0 = A_n = 1`, else 0, with
/// `d = 2t+1`. For the even-weight subcode the odd entries are zeroed (which
/// drops `A_n`, as `n` is odd).
fn binomial_approx(code: &ComponentCode) -> SpectrumTable {
    let (n, t) = (code.n(), code.t());
    let nu = code.nu() as usize;
    let d = 2 * t + 1;
    let lf = LnFactorials::<f64>::new(n);
    let scale = -((nu * t) as f64) * std::f64::consts::LN_2;
    let mut ln_counts = vec![f64::NEG_INFINITY; n + 1];
    for (l, slot) in ln_counts.iter_mut().enumerate() {
        if l == 0 || l == n {
            *slot = 0.0;
        } else if d <= l && l + d <= n {
            *slot = scale + lf.ln_binomial(n as i64, l as i64).unwrap_or(f64::NEG_INFINITY);
        }
        if code.is_even_subcode() && l % 2 == 1 {
            *slot = f64::NEG_INFINITY;
        }
    }
    SpectrumTable {
        n,
        k: code.k(),
        t,
        method: SpectrumMethod::BinomialApprox,
        ln_counts,
        exact: None,
    }
}

/// Weight histogram of the span of `basis`, enumerated in Gray-code order.
fn enumerate_weights(n: usize, basis: &[Vec<u64>]) -> Vec<u64> {
    let limbs = n.div_ceil(64);
    let mut counts = vec![0u64; n + 1];
    let mut cur = vec![0u64; limbs];
    counts[0] += 1;
    for g in 1u64..(1u64 << basis.len()) {
        let row = &basis[g.trailing_zeros() as usize];
        for (c, r) in cur.iter_mut().zip(row) {
            *c ^= r;
        }
        let w: u32 = cur.iter().map(|l| l.count_ones()).sum();
        counts[w as usize] += 1;
    }
    counts
}

/// Weight histogram of the dual code. The dual of the cyclic code generated by
/// `g` is generated by the reciprocal of `h = (x^n − 1)/g`.
fn dual_counts(code: &ComponentCode) -> Vec<u64> {
    let n = code.n();
    let mut xn1 = vec![0u64; n / 64 + 1];
    xn1[0] |= 1;
    xn1[n / 64] |= 1 << (n % 64);
    let h = poly2::div_exact(&xn1, code.generator_poly());
    let deg_h = poly2::degree(&h).expect("h is nonzero");
    let mut h_rec = vec![0u64; deg_h / 64 + 1];
    for i in 0..=deg_h {
        if poly2::coeff(&h, i) {
            let j = deg_h - i;
            h_rec[j / 64] |= 1 << (j % 64);
        }
    }
    let dual_dim = n - deg_h;
    let limbs = n.div_ceil(64);
    let basis: Vec<Vec<u64>> = (0..dual_dim)
        .map(|s| {
            let mut row = vec![0u64; limbs];
            for i in 0..=deg_h {
                if poly2::coeff(&h_rec, i) {
                    let j = i + s;
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    enumerate_weights(n, &basis)
}

/// MacWilliams transform: `A_l = 2^{−r} Σ_w B_w K_l(w)` with Krawtchouk
/// polynomials `K_l(w) = Σ_j (−1)^j C(w,j) C(n−w,l−j)`.
fn macwilliams(n: usize, r: usize, dual: &[u64]) -> Result<Vec<BigUint>> {
    let mut binom = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for a in 0..=n {
        binom[a][0] = BigInt::one();
        for b in 1..=a {
            binom[a][b] = &binom[a - 1][b - 1] + if b < a { binom[a - 1][b].clone() } else { BigInt::zero() };
        }
    }
    let c = |a: usize, b: usize| -> &BigInt {
        static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
        if b > a {
            ZERO.get_or_init(BigInt::zero)
        } else {
            &binom[a][b]
        }
    };
    let denom = BigInt::one() << r;
    let mut out = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let mut acc = BigInt::zero();
        for (w, &bw) in dual.iter().enumerate() {
            if bw == 0 {
                continue;
            }
            let mut kraw = BigInt::zero();
            for j in 0..=l.min(w) {
                if l - j > n - w {
                    continue;
                }
                let term = c(w, j) * c(n - w, l - j);
                if j % 2 == 0 {
                    kraw += term;
                } else {
                    kraw -= term;
                }
            }
            acc += kraw * BigInt::from(bw);
        }
        if acc.is_negative() || !(&acc % &denom).is_zero() {
            return Err(Error::numerical(format!(
                "MacWilliams transform produced a non-integer count at l={l}"
            )));
        }
        out.push((acc / &denom).to_biguint().expect("nonnegative"));
    }
    Ok(out)
}
