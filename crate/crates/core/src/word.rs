use std::fmt;

/// Fixed-length binary vector, bit `i` is the coefficient of `x^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    len: usize,
    limbs: Vec<u64>,
}

impl Word {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Self::zeros(len);
        for i in 0..len {
            w.set(i, true);
        }
        w
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            w.set(i, b);
        }
        w
    }

    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut w = Self::zeros(len);
        for &p in positions {
            w.flip(p);
        }
        w
    }

    /// Low `len` bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut w = Self::zeros(len);
        for i in 0..len.min(64) {
            w.set(i, (value >> i) & 1 == 1);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn xor_assign(&mut self, other: &Word) {
        assert_eq!(self.len, other.len, "word length mismatch");
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.xor_assign(other);
        w
    }

    pub fn distance(&self, other: &Word) -> usize {
        assert_eq!(self.len, other.len, "word length mismatch");
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Indices of the set bits, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(li, &limb)| {
            let mut rest = limb;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(li * 64 + b)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub(crate) fn limbs(&self) -> &[u64] {
        &self.limbs
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_weight_agree() {
        let w = Word::from_positions(130, &[0, 5, 63, 64, 129]);
        assert_eq!(w.weight(), 5);
        assert_eq!(w.support().collect::<Vec<_>>(), vec![0, 5, 63, 64, 129]);
    }

    #[test]
    fn distance_is_weight_of_xor() {
        let a = Word::from_u64(10, 0b1011001110);
        let b = Word::from_u64(10, 0b0011101010);
        assert_eq!(a.distance(&b), a.xor(&b).weight());
    }
}
