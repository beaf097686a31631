//! Euler's totient and its inverse.

use crate::error::{domain, Result};
use crate::exactnum::factor_u64;

/// φ(n) for n ≥ 1; returns 0 for n = 0.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p.get() * (p.get() - 1))
}

/// All n with φ(n) ≤ `bound`, ascending.
///
/// The scan stops at 2·bound², which is safe because φ(n) ≥ √(n/2) for every n.
pub fn invphi_all(bound: u64) -> Vec<u64> {
    let limit = 2 * bound * bound;
    (1..=limit.max(2))
        .filter(|&n| euler_phi(n) <= bound)
        .collect()
}

/// max{n : φ(n) ≤ bound}.
pub fn invphi_max(bound: u64) -> u64 {
    invphi_all(bound).last().copied().unwrap_or(1)
}

/// Degree of ℚ(ξ_n + ξ_n⁻¹) over ℚ, defined for n > 2.
pub fn semicyclic_degree(n: u64) -> Result<u64> {
    if n <= 2 {
        return Err(domain(format!("semicyclic degree needs n > 2, got {n}")));
    }
    Ok(euler_phi(n) / 2)
}
