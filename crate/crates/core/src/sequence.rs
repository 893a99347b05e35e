//! The paperfolding symbol sequence.
//!
//! Two independent routes are provided: the inflation law (normative, O(1)
//! via bit tricks) and the reflection law around powers of two, kept as a
//! cross-check.

use std::fmt;

use serde::Serialize;

/// A crease direction: `L` is a left turn of the directed polygon, `R` a right turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FoldSymbol {
    L,
    R,
}

impl FoldSymbol {
    #[inline]
    pub fn complement(self) -> Self {
        match self {
            FoldSymbol::L => FoldSymbol::R,
            FoldSymbol::R => FoldSymbol::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            FoldSymbol::L => 'L',
            FoldSymbol::R => 'R',
        }
    }
}

impl fmt::Display for FoldSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Symbol at position `n >= 1` by the inflation law: strip the trailing zero
/// bits, then the residue mod 4 of what remains decides.
///
/// # Panics
/// If `n == 0`.
pub fn sigma(n: u64) -> FoldSymbol {
    assert!(n >= 1, "the paperfolding sequence starts at position 1");
    let odd = n >> n.trailing_zeros();
    if odd & 0b11 == 1 {
        FoldSymbol::L
    } else {
        FoldSymbol::R
    }
}

/// Symbol at position `n >= 1` using only `sigma(2^k) = L` and
/// `sigma(2^k - d) = complement(sigma(2^k + d))`.
///
/// Each step reflects `n` strictly above the largest power of two below it
/// to a smaller position, so the recursion depth is bounded by `log2(n) + 1`.
///
/// # Panics
/// If `n == 0`.
pub fn sigma_reflection(n: u64) -> FoldSymbol {
    assert!(n >= 1, "the paperfolding sequence starts at position 1");
    let mut n = n;
    let mut flipped = false;
    loop {
        if n.is_power_of_two() {
            let s = FoldSymbol::L;
            return if flipped { s.complement() } else { s };
        }
        // 2^k < n < 2^(k+1); reflect about 2^k: n = 2^k + d -> 2^k - d.
        let pow = 1u64 << (63 - n.leading_zeros());
        let d = n - pow;
        n = pow - d;
        flipped = !flipped;
    }
}

/// The first `len` symbols.
pub fn prefix(len: usize) -> Vec<FoldSymbol> {
    (1..=len as u64).map(sigma).collect()
}

/// Renders symbols as a compact `LLR...` string.
pub fn to_string(symbols: &[FoldSymbol]) -> String {
    symbols.iter().map(|s| s.as_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use FoldSymbol::{L, R};

    /// Textbook recursion straight from the case split, used as an oracle.
    fn sigma_naive(n: u64) -> FoldSymbol {
        match n % 4 {
            1 => L,
            3 => R,
            _ => sigma_naive(n / 2),
        }
    }

    #[test]
    fn named_positions() {
        assert_eq!(sigma(1), L);
        assert_eq!(sigma(3), R);
        assert_eq!(sigma(6), R);
        assert_eq!(sigma(7), R);
        assert_eq!(sigma_reflection(2), L);
        assert_eq!(sigma_reflection(7), R);
        assert_eq!(sigma_reflection(1 << 20), L);
    }

    #[test]
    fn prefixes() {
        assert_eq!(to_string(&prefix(1)), "L");
        assert_eq!(to_string(&prefix(3)), "LLR");
        assert_eq!(to_string(&prefix(15)), "LLRLLRRLLLRRLRR");
    }

    #[test]
    fn complement_is_involution() {
        for s in [L, R] {
            assert_ne!(s.complement(), s);
            assert_eq!(s.complement().complement(), s);
        }
    }

    #[test]
    fn laws_agree_up_to_2_pow_16() {
        for n in 1..=(1u64 << 16) {
            let s = sigma(n);
            assert_eq!(s, sigma_naive(n), "inflation vs naive at {n}");
            assert_eq!(s, sigma_reflection(n), "inflation vs reflection at {n}");
        }
    }

    #[test]
    fn inflation_self_similarity() {
        for n in 1..=(1u64 << 15) {
            assert_eq!(sigma(2 * n), sigma(n));
        }
    }

    #[test]
    fn count_balance() {
        for k in 1..=16u32 {
            let len = (1usize << k) - 1;
            let p = prefix(len);
            let ls = p.iter().filter(|&&s| s == L).count();
            let rs = (1..=len as u64).filter(|&n| sigma_naive(n) == R).count();
            assert_eq!(ls, rs + 1, "k = {k}");
        }
    }

    #[test]
    fn large_positions() {
        assert_eq!(sigma(u64::MAX), R);
        assert_eq!(sigma_reflection(u64::MAX), R);
        assert_eq!(sigma(1 << 63), L);
        assert_eq!(sigma_reflection((1 << 63) + 1), sigma((1 << 63) + 1));
    }
}
