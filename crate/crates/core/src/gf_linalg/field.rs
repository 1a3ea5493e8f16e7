use std::fmt;

use super::GfError;

/// Largest supported modulus.
pub const MAX_PRIME: u32 = 1 << 16;

/// The prime field `GF(p)`, with elements stored as residues in `[0, p)`.
///
/// The field is ordered by residue value, `0 < 1 < ... < p - 1`. Every
/// order-dependent construction (antilexicographic order, least witnesses)
/// uses this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, GfError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a % self.p == 0 {
            return None;
        }
        Some(self.pow(a, self.p - 2))
    }

    pub fn pow(&self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1u32;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Order of `GL(F^k)`, i.e. `prod_{j<k} (p^k - p^j)`, or `None` on overflow.
    pub fn gl_order(&self, k: u32) -> Option<u128> {
        let p = self.p as u128;
        let pk = p.checked_pow(k)?;
        let mut acc: u128 = 1;
        for j in 0..k {
            acc = acc.checked_mul(pk - p.pow(j))?;
        }
        Some(acc)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
