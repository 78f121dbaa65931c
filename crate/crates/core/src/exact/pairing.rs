//! Diagonal pairing of naturals and the numberings built on it.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `<i, j> = (i + j)(i + j + 1)/2 + j`.
pub fn pair(i: &BigUint, j: &BigUint) -> BigUint {
    let s = i + j;
    (&s * (&s + 1u32)) / 2u32 + j
}

/// Inverse of [`pair`].
pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z + 1) - 1) / 2) is the diagonal index.
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let j = z - t;
    let i = &w - &j;
    (i, j)
}

/// Shortlex index of a binary word: "" -> 0, "0" -> 1, "1" -> 2, "00" -> 3, ...
pub fn word_index(bits: &[bool]) -> BigUint {
    let mut v = BigUint::one();
    for &b in bits {
        v <<= 1u32;
        if b {
            v += 1u32;
        }
    }
    v - 1u32
}

/// Inverse of [`word_index`].
pub fn word_from_index(index: &BigUint) -> Vec<bool> {
    let v = index + 1u32;
    let len = v.bits() as usize - 1;
    (0..len).rev().map(|k| v.bit(k as u64)).collect()
}

/// Trailing zeros do not change the ideal point `w0^ω`, so indices are taken
/// on the trimmed word.
pub fn trimmed(bits: &[bool]) -> &[bool] {
    let end = bits.iter().rposition(|&b| b).map_or(0, |p| p + 1);
    &bits[..end]
}

/// Folds a signed integer onto the naturals: 0, -1, 1, -2, ... -> 0, 1, 2, 3, ...
pub fn zigzag(n: &num_bigint::BigInt) -> BigUint {
    use num_bigint::Sign;
    let (sign, mag) = n.clone().into_parts();
    match sign {
        Sign::Minus => mag * 2u32 - 1u32,
        _ if mag.is_zero() => BigUint::zero(),
        _ => mag * 2u32,
    }
}
