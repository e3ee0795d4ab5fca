//! Log/antilog-table arithmetic in GF(2^ν).

use crate::error::{Error, Result};

/// Primitive polynomials for ν = 2..=16 (bit i = coefficient of x^i), one per
/// degree, taken from the standard Lin–Costello table.
const PRIMITIVE_POLYS: [u32; 15] = [
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x89,    // x^7 + x^3 + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
];

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 16;

/// The fixed primitive polynomial used for degree `nu`.
pub fn primitive_poly(nu: u32) -> Option<u32> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&nu) {
        Some(PRIMITIVE_POLYS[(nu - MIN_DEGREE) as usize])
    } else {
        None
    }
}

/// GF(2^ν) with elements stored as polynomial-basis bit patterns.
#[derive(Debug, Clone)]
pub struct FieldTable {
    nu: u32,
    primitive_poly: u32,
    /// `log[x]` for nonzero x; `log[0]` is unused.
    log: Vec<u32>,
    /// `antilog[e] = α^e` for `e = 0..n`.
    antilog: Vec<u32>,
}

/// Builds GF(2^ν) from the fixed primitive polynomial for `nu`.
pub fn build_field(nu: u32) -> Result<FieldTable> {
    FieldTable::new(nu)
}

impl FieldTable {
    pub fn new(nu: u32) -> Result<Self> {
        let poly = primitive_poly(nu).ok_or_else(|| {
            Error::config(format!(
                "unsupported field degree nu={nu} (supported {MIN_DEGREE}..={MAX_DEGREE})"
            ))
        })?;
        Self::with_poly(nu, poly)
    }

    /// Builds the field from an explicit degree-`nu` polynomial, rejecting it
    /// unless `x` generates the full multiplicative group.
    pub fn with_poly(nu: u32, poly: u32) -> Result<Self> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&nu) || poly >> nu != 1 {
            return Err(Error::config(format!(
                "polynomial {poly:#x} does not have degree {nu}"
            )));
        }
        let size = 1usize << nu;
        let n = size - 1;
        let mut log = vec![u32::MAX; size];
        let mut antilog = vec![0u32; n];
        let mut x = 1u32;
        for (e, slot) in antilog.iter_mut().enumerate() {
            if log[x as usize] != u32::MAX {
                return Err(Error::config(format!(
                    "polynomial {poly:#x} is not primitive (order of x divides {e})"
                )));
            }
            *slot = x;
            log[x as usize] = e as u32;
            x <<= 1;
            if x & (1 << nu) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::config(format!("polynomial {poly:#x} is not primitive")));
        }
        Ok(Self {
            nu,
            primitive_poly: poly,
            log,
            antilog,
        })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Multiplicative group order `n = 2^ν − 1`.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    /// `α^e` for any integer exponent (reduced mod n).
    #[inline]
    pub fn exp(&self, e: i64) -> u32 {
        let n = self.order() as i64;
        self.antilog[e.rem_euclid(n) as usize]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, x: u32) -> Option<usize> {
        if x == 0 {
            None
        } else {
            Some(self.log[x as usize] as usize)
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order();
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.antilog[if s >= n { s - n } else { s }]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.order();
        let l = self.log[a as usize] as usize;
        self.antilog[if l == 0 { 0 } else { n - l }]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.order() as u64;
        let l = self.log[a as usize] as u64;
        self.antilog[((l * (e % n)) % n) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf8_has_seven_nonzero_elements_and_alpha7_is_one() {
        let f = build_field(3).unwrap();
        assert_eq!(f.order(), 7);
        assert_eq!(f.exp(7), 1);
        assert_eq!(f.pow(2, 7), 1);
    }

    #[test]
    fn gf8_defining_relation() {
        // x^3 + x + 1: α^3 = α + 1
        let f = build_field(3).unwrap();
        assert_eq!(f.primitive_poly(), 0xB);
        assert_eq!(f.exp(3), 0b011);
    }

    #[test]
    fn gf256_block_length() {
        assert_eq!(build_field(8).unwrap().order(), 255);
    }

    #[test]
    fn every_listed_polynomial_is_primitive() {
        for nu in MIN_DEGREE..=MAX_DEGREE {
            let f = build_field(nu).unwrap();
            assert_eq!(f.order(), (1usize << nu) - 1);
            for x in 1..=f.order() as u32 {
                assert_eq!(f.exp(f.log(x).unwrap() as i64), x);
            }
        }
    }

    #[test]
    fn rejects_unsupported_degree_and_nonprimitive_poly() {
        assert!(build_field(1).unwrap_err().is_config());
        assert!(build_field(17).unwrap_err().is_config());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5.
        assert!(FieldTable::with_poly(4, 0x1F).is_err());
    }

    #[test]
    fn inverse_and_division() {
        let f = build_field(6).unwrap();
        for a in 1..=f.order() as u32 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.div(f.mul(a, 7), 7), a);
        }
    }
}
