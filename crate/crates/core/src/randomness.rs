//! Metered public randomness and the 4-wise independent sign generator.
//!
//! The shared coins available to all users are modelled as a finite bit string
//! that can only be read front to back, so every protocol's use of shared
//! randomness is counted exactly.
//!
//! Block signs come from the classic polynomial construction: four field
//! elements of `GF(2^k)` are the coefficients of a degree-3 polynomial, which is
//! evaluated at the `2^k` field elements. Any four evaluations are independent
//! and uniform, so the low bit of each one is a 4-wise independent fair coin.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::hadamard::check_power_of_two;

/// Irreducible polynomials over `GF(2)`, indexed by degree `k`, with the leading
/// `x^k` term included.
const IRREDUCIBLE: [u32; 17] = [
    0,
    0b11,     // x + 1
    0x7,      // x^2 + x + 1
    0xB,      // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x83,     // x^7 + x + 1
    0x11B,    // x^8 + x^4 + x^3 + x + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1100B,  // x^16 + x^12 + x^3 + x + 1
];

/// Largest field degree supported, i.e. at most `2^16` blocks.
pub const MAX_FIELD_DEGREE: u32 = 16;

/// A budget of `s` shared random bits, consumed strictly in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicSeed {
    bits: Vec<bool>,
    consumed: usize,
}

impl PublicSeed {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits, consumed: 0 }
    }

    /// `s` fresh uniform bits from `rng`.
    pub fn from_rng<R: RngCore + ?Sized>(rng: &mut R, s: usize) -> Self {
        Self::from_bits((0..s).map(|_| rng.random::<bool>()).collect())
    }

    /// The `s`-bit binary expansion of `value`, most significant bit first.
    /// Enumerating `value` over `0..2^s` walks the whole seed space.
    pub fn from_u64(value: u64, s: usize) -> Self {
        assert!(s <= 64, "from_u64 supports at most 64 bits");
        Self::from_bits((0..s).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn budget(&self) -> usize {
        self.bits.len()
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.consumed
    }

    pub fn draw_bits(&mut self, count: usize) -> Result<&[bool]> {
        if count > self.remaining() {
            return Err(Error::BudgetExhausted {
                requested: count,
                remaining: self.remaining(),
                budget: self.budget(),
            });
        }
        let start = self.consumed;
        self.consumed += count;
        Ok(&self.bits[start..self.consumed])
    }

    /// Draws `width` bits and reads them as an unsigned integer, MSB first.
    pub fn draw_uint(&mut self, width: usize) -> Result<u32> {
        debug_assert!(width <= 32);
        let bits = self.draw_bits(width)?;
        Ok(bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b)))
    }
}

/// Arithmetic in `GF(2^k)` with elements stored as their polynomial-basis bits.
#[derive(Debug, Clone, Copy)]
pub struct BinaryField {
    degree: u32,
    modulus: u32,
}

impl BinaryField {
    pub fn new(degree: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_FIELD_DEGREE {
            return Err(Error::Dimension(format!(
                "field degree {degree} outside 1..={MAX_FIELD_DEGREE}"
            )));
        }
        Ok(Self {
            degree,
            modulus: IRREDUCIBLE[degree as usize],
        })
    }

    pub fn order(&self) -> u32 {
        1 << self.degree
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1u32 << self.degree;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    /// Horner evaluation of `coeffs[0] + coeffs[1] x + ...`.
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Block signs `delta_1..delta_b` for a blockwise randomized Hadamard transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RademacherBlockSigns {
    signs: Vec<i8>,
    bits_consumed: usize,
}

impl RademacherBlockSigns {
    /// Wraps explicit signs. Every entry must be `+1` or `-1`.
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        check_power_of_two(signs.len(), "sign vector")?;
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parameter("block signs must be +1 or -1".into()));
        }
        Ok(Self {
            signs,
            bits_consumed: 0,
        })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn bits_consumed(&self) -> usize {
        self.bits_consumed
    }
}

/// Shared bits needed for `b` 4-wise independent signs: `4 log2 b`.
pub fn fourwise_bits(b: usize) -> usize {
    4 * b.trailing_zeros() as usize
}

/// Draws `4 log2(b)` bits and expands them into `b` 4-wise independent signs.
///
/// The bits are split into four `log2(b)`-bit coefficients `c0..c3` (MSB first
/// each); sign `i` is `+1` when the low bit of `c0 + c1 i + c2 i^2 + c3 i^3`,
/// evaluated in `GF(b)`, is zero and `-1` otherwise. `b = 1` draws nothing.
pub fn fourwise_rademacher(seed: &mut PublicSeed, b: usize) -> Result<RademacherBlockSigns> {
    check_power_of_two(b, "block count")?;
    let k = b.trailing_zeros();
    if k == 0 {
        return Ok(RademacherBlockSigns {
            signs: vec![1],
            bits_consumed: 0,
        });
    }
    let field = BinaryField::new(k)?;
    let needed = fourwise_bits(b);
    if needed > seed.remaining() {
        return Err(Error::BudgetExhausted {
            requested: needed,
            remaining: seed.remaining(),
            budget: seed.budget(),
        });
    }
    let mut coeffs = [0u32; 4];
    for c in coeffs.iter_mut() {
        *c = seed.draw_uint(k as usize)?;
    }
    let signs = (0..field.order())
        .map(|x| {
            if field.eval_poly(&coeffs, x) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(RademacherBlockSigns {
        signs,
        bits_consumed: needed,
    })
}
