//! Prime generation and Chinese remainder reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrtError {
    #[error("{moduli} moduli but {residues} residues")]
    LengthMismatch { moduli: usize, residues: usize },
    #[error("modulus {0} is not greater than 1")]
    ModulusTooSmall(usize),
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(usize, usize),
    #[error("residue {0} is outside [0, p_{0})")]
    ResidueOutOfRange(usize),
}

/// The first `k` primes, by a sieve whose bound is grown until it suffices.
pub fn nth_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    // p_k < k (ln k + ln ln k) for k >= 6
    let kf = k.max(6) as f64;
    let mut limit = (kf * (kf.ln() + kf.ln().ln()) * 1.1) as usize + 16;
    loop {
        let primes = sieve(limit);
        if primes.len() >= k {
            return primes[..k].to_vec();
        }
        limit *= 2;
    }
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Pairwise-coprime moduli (> 1) with residues in range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtSystem {
    moduli: Vec<BigInt>,
    residues: Vec<BigInt>,
}

impl CrtSystem {
    pub fn new(moduli: Vec<BigInt>, residues: Vec<BigInt>) -> Result<Self, CrtError> {
        if moduli.len() != residues.len() {
            return Err(CrtError::LengthMismatch {
                moduli: moduli.len(),
                residues: residues.len(),
            });
        }
        for (i, p) in moduli.iter().enumerate() {
            if *p <= BigInt::one() {
                return Err(CrtError::ModulusTooSmall(i));
            }
            if residues[i].is_negative() || residues[i] >= *p {
                return Err(CrtError::ResidueOutOfRange(i));
            }
            for (j, q) in moduli.iter().enumerate().skip(i + 1) {
                if !p.gcd(q).is_one() {
                    return Err(CrtError::NotCoprime(i, j));
                }
            }
        }
        Ok(CrtSystem { moduli, residues })
    }

    pub fn from_u64(moduli: &[u64], residues: &[u64]) -> Result<Self, CrtError> {
        CrtSystem::new(
            moduli.iter().map(|&p| BigInt::from(p)).collect(),
            residues.iter().map(|&a| BigInt::from(a)).collect(),
        )
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn residues(&self) -> &[BigInt] {
        &self.residues
    }

    pub fn modulus_product(&self) -> BigInt {
        self.moduli.iter().product()
    }
}

/// The unique `x` in `[0, ∏ p_i)` with `x ≡ a_i (mod p_i)`.
///
/// Combines congruences pairwise with the extended Euclidean algorithm.
pub fn crt(sys: &CrtSystem) -> BigInt {
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for (p, a) in sys.moduli.iter().zip(&sys.residues) {
        // x + modulus * t ≡ a (mod p)  =>  t ≡ (a - x) * modulus^{-1} (mod p)
        let egcd = modulus.extended_gcd(p);
        debug_assert!(egcd.gcd.is_one());
        let t = ((a - &x) * egcd.x).mod_floor(p);
        x += &modulus * t;
        modulus *= p;
    }
    debug_assert!(sys
        .moduli
        .iter()
        .zip(&sys.residues)
        .all(|(p, a)| x.mod_floor(p) == *a));
    x
}
