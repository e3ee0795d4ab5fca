//! Binary primitive narrow-sense BCH codes, their even-weight subcodes and
//! bounded-distance decoding (Berlekamp–Massey + Chien search).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::word::Word;

/// Dense GF(2) polynomial, bit i = coefficient of x^i.
pub(crate) mod poly2 {
    pub fn degree(p: &[u64]) -> Option<usize> {
        p.iter()
            .enumerate()
            .rev()
            .find(|(_, &l)| l != 0)
            .map(|(i, &l)| i * 64 + 63 - l.leading_zeros() as usize)
    }

    pub fn coeff(p: &[u64], i: usize) -> bool {
        p.get(i / 64).is_some_and(|l| (l >> (i % 64)) & 1 == 1)
    }

    pub fn from_coeffs(bits: &[bool]) -> Vec<u64> {
        let mut p = vec![0u64; bits.len().div_ceil(64).max(1)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                p[i / 64] |= 1 << (i % 64);
            }
        }
        p
    }

    pub fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
        let (Some(da), Some(db)) = (degree(a), degree(b)) else {
            return vec![0];
        };
        let mut out = vec![0u64; (da + db) / 64 + 1];
        for i in 0..=da {
            if coeff(a, i) {
                for j in 0..=db {
                    if coeff(b, j) {
                        out[(i + j) / 64] ^= 1 << ((i + j) % 64);
                    }
                }
            }
        }
        out
    }

    /// Remainder of `a` modulo `m` (m nonzero).
    pub fn rem(a: &[u64], m: &[u64]) -> Vec<u64> {
        let dm = degree(m).expect("modulus must be nonzero");
        let mut r = a.to_vec();
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let shift = dr - dm;
            for j in 0..=dm {
                if coeff(m, j) {
                    let k = j + shift;
                    r[k / 64] ^= 1 << (k % 64);
                }
            }
        }
        r
    }

    /// Quotient of `a` by `m`; panics on nonzero remainder in debug builds.
    pub fn div_exact(a: &[u64], m: &[u64]) -> Vec<u64> {
        let dm = degree(m).expect("divisor must be nonzero");
        let mut r = a.to_vec();
        let da = degree(a).unwrap_or(0);
        let mut q = vec![0u64; da / 64 + 1];
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let shift = dr - dm;
            q[shift / 64] |= 1 << (shift % 64);
            for j in 0..=dm {
                if coeff(m, j) {
                    let k = j + shift;
                    r[k / 64] ^= 1 << (k % 64);
                }
            }
        }
        debug_assert!(degree(&r).is_none(), "inexact division");
        q
    }
}

/// A t-error-correcting binary primitive BCH code of length `n = 2^ν − 1`,
/// or its even-weight subcode.
#[derive(Debug, Clone)]
pub struct ComponentCode {
    n: usize,
    k: usize,
    t: usize,
    even_subcode: bool,
    generator: Vec<u64>,
    field: Arc<FieldTable>,
}

/// Result of bounded-distance decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// A codeword within distance `t` was found; `flips` positions differ from the input.
    Corrected { codeword: Word, flips: usize },
    /// No codeword within distance `t`; the input is passed through unchanged.
    Failure,
}

impl DecodeOutcome {
    pub fn is_corrected(&self) -> bool {
        matches!(self, DecodeOutcome::Corrected { .. })
    }

    pub fn flips(&self) -> usize {
        match self {
            DecodeOutcome::Corrected { flips, .. } => *flips,
            DecodeOutcome::Failure => 0,
        }
    }

    /// Bit-level output word: the codeword on success, otherwise `input`.
    pub fn output<'a>(&'a self, input: &'a Word) -> &'a Word {
        match self {
            DecodeOutcome::Corrected { codeword, .. } => codeword,
            DecodeOutcome::Failure => input,
        }
    }
}

/// Syndromes `S_1..S_2t` (index 0 unused) plus the overall parity, which is
/// the extra syndrome `r(1)` checked by the even-weight subcode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndromes {
    values: Vec<u32>,
    parity: bool,
}

impl Syndromes {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&s| s == 0)
    }

    pub fn parity(&self) -> bool {
        self.parity
    }
}

/// Builds the (ν, t) primitive BCH code, or its even-weight subcode.
pub fn build_bch(nu: u32, t: usize, even_subcode: bool) -> Result<ComponentCode> {
    let field = Arc::new(FieldTable::new(nu)?);
    ComponentCode::new(field, t, even_subcode)
}

impl ComponentCode {
    pub fn new(field: Arc<FieldTable>, t: usize, even_subcode: bool) -> Result<Self> {
        let n = field.order();
        let nu = field.nu();
        if t == 0 || 2 * t + 1 > n {
            return Err(Error::config(format!(
                "t={t} out of range for n={n} (need 1 <= t and 2t+1 <= n)"
            )));
        }
        let mut generator = vec![1u64];
        let mut covered = vec![false; n];
        for j in 1..=2 * t {
            if covered[j % n] {
                continue;
            }
            let coset = cyclotomic_coset(j, n);
            for &e in &coset {
                covered[e] = true;
            }
            generator = poly2::mul(&generator, &minimal_polynomial(&field, &coset));
        }
        let deg = poly2::degree(&generator).unwrap_or(0);
        let expected = nu as usize * t;
        if deg != expected {
            return Err(Error::DesignMismatch {
                nu,
                t,
                expected,
                actual: deg,
            });
        }
        if even_subcode {
            generator = poly2::mul(&generator, &[0b11]);
        }
        let k = n - poly2::degree(&generator).unwrap_or(0);
        Ok(Self {
            n,
            k,
            t,
            even_subcode,
            generator,
            field,
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

    pub fn nu(&self) -> u32 {
        self.field.nu()
    }

    pub fn is_even_subcode(&self) -> bool {
        self.even_subcode
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    /// Designed minimum distance: `2t+1`, or `2t+2` for the even-weight subcode.
    pub fn design_distance(&self) -> usize {
        2 * self.t + 1 + usize::from(self.even_subcode)
    }

    /// Generator polynomial coefficients, lowest degree first.
    pub fn generator_coeffs(&self) -> Vec<bool> {
        (0..=self.n - self.k)
            .map(|i| poly2::coeff(&self.generator, i))
            .collect()
    }

    pub(crate) fn generator_poly(&self) -> &[u64] {
        &self.generator
    }

    /// Whether the all-one word is a codeword (true for the plain code, false for
    /// the even-weight subcode since `n` is odd).
    pub fn contains_all_one(&self) -> bool {
        self.is_codeword(&Word::ones(self.n))
    }

    /// Non-systematic encoding `c(x) = m(x)·g(x)` of `k` message bits.
    pub fn encode(&self, message: &[bool]) -> Word {
        assert_eq!(message.len(), self.k, "message length must equal k");
        let m = poly2::from_coeffs(message);
        let c = poly2::mul(&m, &self.generator);
        let mut w = Word::zeros(self.n);
        for i in 0..self.n {
            if poly2::coeff(&c, i) {
                w.set(i, true);
            }
        }
        w
    }

    /// Generator-matrix rows `x^i·g(x)`, `i = 0..k`.
    pub fn basis(&self) -> Vec<Word> {
        (0..self.k)
            .map(|i| {
                let mut msg = vec![false; self.k];
                msg[i] = true;
                self.encode(&msg)
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &Word) -> bool {
        assert_eq!(word.len(), self.n);
        poly2::degree(&poly2::rem(word.limbs(), &self.generator)).is_none()
    }

    /// Column `i` of the parity-check map `c ↦ c(x) mod g(x)`: the bits of
    /// `x^i mod g(x)` for `i = 0..n`.
    pub fn parity_check_columns(&self) -> Vec<Vec<u64>> {
        let r = self.n - self.k;
        let mut cols = Vec::with_capacity(self.n);
        let mut cur = vec![0u64; r / 64 + 1];
        cur[0] = 1;
        for _ in 0..self.n {
            cols.push(cur.clone());
            // multiply by x modulo g
            let mut next = vec![0u64; r / 64 + 2];
            for i in 0..r {
                if poly2::coeff(&cur, i) {
                    next[(i + 1) / 64] |= 1 << ((i + 1) % 64);
                }
            }
            if poly2::coeff(&next, r) {
                for j in 0..=r {
                    if poly2::coeff(&self.generator, j) {
                        next[j / 64] ^= 1 << (j % 64);
                    }
                }
            }
            next.truncate(r / 64 + 1);
            cur = next;
        }
        cols
    }

    pub fn syndromes(&self, word: &Word) -> Syndromes {
        assert_eq!(word.len(), self.n, "word length must equal n");
        self.syndromes_from_support(word.support())
    }

    /// Syndromes of the word whose set bits are `support`.
    pub fn syndromes_from_support(&self, support: impl IntoIterator<Item = usize>) -> Syndromes {
        let mut s = Syndromes {
            values: vec![0; 2 * self.t + 1],
            parity: false,
        };
        for pos in support {
            self.toggle(&mut s, pos);
        }
        s
    }

    /// Updates `syn` for a flip of bit `pos`.
    #[inline]
    pub fn toggle(&self, syn: &mut Syndromes, pos: usize) {
        let f = &*self.field;
        for j in 1..=2 * self.t {
            syn.values[j] ^= f.exp((j * pos) as i64);
        }
        syn.parity ^= true;
    }

    /// Error positions of the unique codeword within distance `t`, or `None`
    /// when no such codeword exists (decoder failure).
    pub fn locate_errors(&self, syn: &Syndromes) -> Option<Vec<usize>> {
        if syn.is_zero() {
            return if self.even_subcode && syn.parity {
                None
            } else {
                Some(Vec::new())
            };
        }
        let f = &*self.field;
        let n = self.n;
        let locator = berlekamp_massey(f, &syn.values[1..]);
        let l = locator.len() - 1;
        if l > self.t {
            return None;
        }
        let mut positions = Vec::with_capacity(l);
        // Chien search: position i is in error iff Λ(α^{-i}) = 0.
        let steps: Vec<u32> = (0..=l).map(|d| f.exp(-(d as i64))).collect();
        let mut terms = locator.clone();
        for i in 0..n {
            let acc = terms.iter().fold(0u32, |a, &c| a ^ c);
            for (c, &s) in terms.iter_mut().zip(&steps) {
                *c = f.mul(*c, s);
            }
            if acc == 0 {
                positions.push(i);
                if positions.len() > l {
                    return None;
                }
            }
        }
        if positions.len() != l {
            return None;
        }
        let mut check = syn.clone();
        for &p in &positions {
            self.toggle(&mut check, p);
        }
        if !check.is_zero() || (self.even_subcode && check.parity) {
            return None;
        }
        Some(positions)
    }

    /// Bounded-distance decoding with radius `t`.
    pub fn bdd_decode(&self, word: &Word) -> DecodeOutcome {
        match self.locate_errors(&self.syndromes(word)) {
            None => DecodeOutcome::Failure,
            Some(positions) => {
                let mut codeword = word.clone();
                for &p in &positions {
                    codeword.flip(p);
                }
                DecodeOutcome::Corrected {
                    codeword,
                    flips: positions.len(),
                }
            }
        }
    }
}

fn cyclotomic_coset(j: usize, n: usize) -> Vec<usize> {
    let mut coset = vec![j % n];
    let mut e = (2 * j) % n;
    while e != j % n {
        coset.push(e);
        e = (2 * e) % n;
    }
    coset
}

/// `Π_{e ∈ coset} (x − α^e)`, which has binary coefficients.
fn minimal_polynomial(f: &FieldTable, coset: &[usize]) -> Vec<u64> {
    let mut coeffs: Vec<u32> = vec![1];
    for &e in coset {
        let root = f.exp(e as i64);
        let mut next = vec![0u32; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= f.mul(c, root);
        }
        coeffs = next;
    }
    let bits: Vec<bool> = coeffs
        .iter()
        .map(|&c| {
            debug_assert!(c <= 1, "minimal polynomial must be binary");
            c == 1
        })
        .collect();
    poly2::from_coeffs(&bits)
}

/// Shortest LFSR (connection polynomial, `Λ_0 = 1`) generating `s`.
fn berlekamp_massey(f: &FieldTable, s: &[u32]) -> Vec<u32> {
    let mut c = vec![1u32];
    let mut b = vec![1u32];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = 1u32;
    for r in 0..s.len() {
        let mut d = s[r];
        for i in 1..=l.min(c.len() - 1) {
            d ^= f.mul(c[i], s[r - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = f.div(d, bd);
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + m] ^= f.mul(coef, bi);
        }
        if 2 * l <= r {
            b = std::mem::replace(&mut c, next);
            l = r + 1 - l;
            bd = d;
            m = 1;
        } else {
            c = next;
            m += 1;
        }
    }
    c.truncate(l + 1);
    c.resize(l + 1, 0);
    c
}
