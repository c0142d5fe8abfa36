//! Binary extension fields `GF(2^s)` for `1 <= s <= 32`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Fixed moduli, indexed by degree. Entry `s` is the bit pattern of an
/// irreducible polynomial of degree `s` (bit `i` is the coefficient of
/// `x^i`). Low-weight trinomials and pentanomials:
///
/// | s | polynomial | s | polynomial |
/// |---|------------|---|------------|
/// | 1 | x+1 | 17 | x^17+x^3+1 |
/// | 2 | x^2+x+1 | 18 | x^18+x^7+1 |
/// | 3 | x^3+x+1 | 19 | x^19+x^5+x^2+x+1 |
/// | 4 | x^4+x+1 | 20 | x^20+x^3+1 |
/// | 5 | x^5+x^2+1 | 21 | x^21+x^2+1 |
/// | 6 | x^6+x+1 | 22 | x^22+x+1 |
/// | 7 | x^7+x+1 | 23 | x^23+x^5+1 |
/// | 8 | x^8+x^4+x^3+x^2+1 | 24 | x^24+x^7+x^2+x+1 |
/// | 9 | x^9+x^4+1 | 25 | x^25+x^3+1 |
/// | 10 | x^10+x^3+1 | 26 | x^26+x^6+x^2+x+1 |
/// | 11 | x^11+x^2+1 | 27 | x^27+x^5+x^2+x+1 |
/// | 12 | x^12+x^6+x^4+x+1 | 28 | x^28+x^3+1 |
/// | 13 | x^13+x^4+x^3+x+1 | 29 | x^29+x^2+1 |
/// | 14 | x^14+x^10+x^6+x+1 | 30 | x^30+x^6+x^4+x+1 |
/// | 15 | x^15+x+1 | 31 | x^31+x^3+1 |
/// | 16 | x^16+x^12+x^3+x+1 | 32 | x^32+x^7+x^3+x^2+1 |
pub const MODULI: [u64; 33] = [
    0,
    0x3,
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11d,
    0x211,
    0x409,
    0x805,
    0x1053,
    0x201b,
    0x4443,
    0x8003,
    0x1100b,
    0x20009,
    0x40081,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x1000087,
    0x2000009,
    0x4000047,
    0x8000027,
    0x10000009,
    0x20000005,
    0x40000053,
    0x80000009,
    0x10000008d,
];

/// Smallest supported degree `s` with `2^s >= size` (and `s >= 1`).
pub fn degree_for(size: usize) -> Result<u32> {
    let mut s = 1u32;
    while (1u64 << s) < size as u64 {
        s += 1;
        if s > 32 {
            return Err(Error::UnsupportedDegree(s));
        }
    }
    Ok(s)
}

/// `GF(2^s)` under the tabulated modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    degree: u32,
}

impl Field {
    pub fn new(degree: u32) -> Result<Self> {
        if !(1..=32).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        Ok(Field { degree })
    }

    pub fn degree(self) -> u32 {
        self.degree
    }

    pub fn modulus(self) -> u64 {
        MODULI[self.degree as usize]
    }

    /// Number of elements, `2^s`.
    pub fn order(self) -> u64 {
        1u64 << self.degree
    }

    pub fn element(self, value: u64) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(Error::ElementOutOfRange {
                value,
                degree: self.degree,
            });
        }
        Ok(FieldElement {
            value: value as u32,
            degree: self.degree,
        })
    }

    /// Carryless product reduced modulo the field polynomial. Inputs must
    /// already be reduced.
    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        let s = self.degree;
        let mut acc = 0u64;
        let mut x = a as u64;
        let mut y = b;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            x <<= 1;
            y >>= 1;
        }
        let modulus = self.modulus();
        let mut bit = 63 - acc.leading_zeros().min(63);
        while acc >> s != 0 {
            if (acc >> bit) & 1 == 1 {
                acc ^= modulus << (bit - s);
            }
            bit -= 1;
        }
        acc as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse via `a^(2^s - 2)`.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Evaluates `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` by Horner's rule.
    #[inline]
    pub fn eval_poly(self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| self.mul(acc, x) ^ c)
    }
}

/// A reduced element tagged with its field degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    pub value: u32,
    pub degree: u32,
}

impl FieldElement {
    pub fn field(self) -> Field {
        Field { degree: self.degree }
    }
}

/// Product in `GF(2^s)`; both operands must share the degree.
pub fn gf_mul(a: FieldElement, b: FieldElement) -> Result<FieldElement> {
    if a.degree != b.degree {
        return Err(Error::DegreeMismatch {
            left: a.degree,
            right: b.degree,
        });
    }
    let field = Field::new(a.degree)?;
    Ok(FieldElement {
        value: field.mul(a.value, b.value),
        degree: a.degree,
    })
}

pub fn gf_inv(a: FieldElement) -> Result<FieldElement> {
    let field = Field::new(a.degree)?;
    Ok(FieldElement {
        value: field.inv(a.value)?,
        degree: a.degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Polynomial arithmetic over GF(2) on u128, independent of `Field::mul`.
    fn poly_mod(mut a: u128, b: u128) -> u128 {
        let db = 127 - b.leading_zeros();
        while a != 0 && 127 - a.leading_zeros() >= db {
            a ^= b << (127 - a.leading_zeros() - db);
        }
        a
    }

    fn poly_mulmod(a: u128, b: u128, m: u128) -> u128 {
        let mut acc = 0u128;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                acc ^= a << i;
            }
        }
        poly_mod(acc, m)
    }

    fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            let r = poly_mod(a, b);
            a = b;
            b = r;
        }
        a
    }

    // Rabin's test: p of degree s is irreducible iff x^(2^s) = x mod p and
    // gcd(x^(2^(s/q)) - x, p) = 1 for every prime q dividing s.
    fn rabin_irreducible(p: u128, s: u32) -> bool {
        let x = poly_mod(2, p);
        let frob = |times: u32| {
            let mut y = x;
            for _ in 0..times {
                y = poly_mulmod(y, y, p);
            }
            y
        };
        if frob(s) != x {
            return false;
        }
        let mut rest = s;
        let mut q = 2;
        while rest > 1 {
            if rest.is_multiple_of(q) {
                if poly_gcd(p, frob(s / q) ^ x) != 1 {
                    return false;
                }
                while rest.is_multiple_of(q) {
                    rest /= q;
                }
            }
            q += 1;
        }
        true
    }

    #[test]
    fn every_tabulated_modulus_is_irreducible_of_its_degree() {
        for s in 1..=32u32 {
            let p = MODULI[s as usize];
            assert_eq!(63 - p.leading_zeros(), s, "degree of modulus {s}");
            assert!(rabin_irreducible(p as u128, s), "modulus {s} reducible");
        }
    }

    #[test]
    fn gf2_identity() {
        let f = Field::new(1).unwrap();
        let one = f.element(1).unwrap();
        assert_eq!(gf_mul(one, one).unwrap().value, 1);
    }

    #[test]
    fn degree_four_wraps_the_modulus() {
        // x * x^3 = x^4 = x + 1 modulo x^4 + x + 1.
        let f = Field::new(4).unwrap();
        let a = f.element(0b0010).unwrap();
        let b = f.element(0b1000).unwrap();
        assert_eq!(gf_mul(a, b).unwrap().value, 0b0011);
    }

    #[test]
    fn zero_absorbs() {
        for s in [1, 5, 17, 32] {
            let f = Field::new(s).unwrap();
            let a = f.element(f.order() - 1).unwrap();
            assert_eq!(gf_mul(a, f.element(0).unwrap()).unwrap().value, 0);
        }
    }

    #[test]
    fn mismatched_degrees_error() {
        let a = Field::new(3).unwrap().element(1).unwrap();
        let b = Field::new(4).unwrap().element(1).unwrap();
        assert!(matches!(gf_mul(a, b), Err(Error::DegreeMismatch { .. })));
        assert!(Field::new(0).is_err());
        assert!(Field::new(33).is_err());
        assert!(Field::new(3).unwrap().element(8).is_err());
    }

    #[test]
    fn inverses_exhaustive_up_to_degree_eight() {
        for s in 1..=8u32 {
            let f = Field::new(s).unwrap();
            for a in 1..f.order() as u32 {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1, "s={s} a={a}");
            }
            assert_eq!(f.inv(0), Err(Error::ZeroInverse));
        }
    }

    #[test]
    fn mul_matches_independent_polynomial_reduction() {
        for s in [2u32, 8, 13, 24, 31, 32] {
            let f = Field::new(s).unwrap();
            let m = f.modulus() as u128;
            let mask = f.order() - 1;
            let mut x = 0x9e3779b97f4a7c15u64;
            for _ in 0..500 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let a = (x & mask) as u32;
                let b = ((x >> 32) & mask) as u32;
                assert_eq!(f.mul(a, b) as u128, poly_mulmod(a as u128, b as u128, m));
            }
        }
    }

    #[test]
    fn degree_for_rounds_up() {
        assert_eq!(degree_for(1).unwrap(), 1);
        assert_eq!(degree_for(2).unwrap(), 1);
        assert_eq!(degree_for(3).unwrap(), 2);
        assert_eq!(degree_for(4).unwrap(), 2);
        assert_eq!(degree_for(8).unwrap(), 3);
        assert_eq!(degree_for(9).unwrap(), 4);
    }

    proptest! {
        #[test]
        fn field_axioms(s in 1u32..=32, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
            let f = Field::new(s).unwrap();
            let mask = (f.order() - 1) as u32;
            let (a, b, c) = (a & mask, b & mask, c & mask);
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            prop_assert_eq!(f.mul(a, 1), a);
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }
}
