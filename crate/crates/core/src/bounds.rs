//! Order bounds for finite subgroups of GL_n and PGL_n over number fields.

use num_integer::gcd;
use serde::Serialize;

use crate::cyclotomic::{
    all_invariants, real_cyclo_member, Conductor, CycloInvariants, FieldFlags, FieldSpec, Tristate,
};
use crate::diophantine::{solve_standard_equation, SolutionConstraints};
use crate::error::{domain, Result};
use crate::exactnum::{factorial_valuation, primes_up_to, valuation_u64, FactoredInteger, Prime};
use crate::totient::{euler_phi, invphi_max, semicyclic_degree};

/// Σ_{k≥0} ⌊n / (p^k·base)⌋.
fn floor_series(n: u64, p: u64, base: u64) -> u64 {
    let mut total = 0;
    let mut q = base;
    while q <= n {
        total += n / q;
        q = match q.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    total
}

fn product_over<F>(primes: &[Prime], mut exponent: F) -> Result<FactoredInteger>
where
    F: FnMut(Prime) -> Result<u64>,
{
    let mut out = FactoredInteger::one();
    for &p in primes {
        let e = exponent(p)?;
        let e = u32::try_from(e).map_err(|_| domain("exponent overflow"))?;
        out = out.mul(&FactoredInteger::prime_power(p, e));
    }
    Ok(out)
}

pub fn minkowski_exponent(n: u64, p: Prime) -> u64 {
    floor_series(n, p.get(), p.get() - 1)
}

pub fn minkowski_bound(n: u64) -> FactoredInteger {
    product_over(&primes_up_to(n + 1), |p| Ok(minkowski_exponent(n, p))).expect("small exponents")
}

pub fn schur_exponent(n: u64, inv: &CycloInvariants) -> u64 {
    let m = u64::from(inv.m);
    if inv.p != 2 {
        // m⌊n/t⌋ + ⌊n/(pt)⌋ + ⌊n/(p²t)⌋ + …
        return m * (n / inv.t) + floor_series(n, inv.p, inv.p * inv.t);
    }
    if inv.xi4 {
        m * n + floor_series(n, 2, 2)
    } else {
        n + m * (n / 2) + floor_series(n, 2, 4)
    }
}

pub fn schur_bound(n: u64, field: Conductor) -> Result<FactoredInteger> {
    let cutoff = n * field.degree() + 1;
    product_over(&primes_up_to(cutoff), |p| {
        Ok(schur_exponent(n, &all_invariants(field, p)?))
    })
}

pub fn serre_exponent(n: u64, inv: &CycloInvariants) -> u64 {
    let r = n - 1;
    u64::from(inv.m) * (r / euler_phi(inv.t)) + factorial_valuation(inv.prime(), r)
}

/// Primes beyond this cannot contribute to a Serre bound in rank `n − 1`
/// over a degree-`d` field: φ(t_p) ≤ n − 1 forces t_p ≤ invphi_max(n − 1),
/// and t_p ≥ (p − 1)/d.
fn serre_cutoff(n: u64, d: u64) -> u64 {
    (n - 1).max(d * invphi_max(n - 1) + 1)
}

pub fn serre_bound(n: u64, field: Conductor) -> Result<FactoredInteger> {
    if n < 2 {
        return Err(domain("serre bound needs n ≥ 2"));
    }
    let cutoff = serre_cutoff(n, field.degree());
    product_over(&primes_up_to(cutoff), |p| {
        Ok(serre_exponent(n, &all_invariants(field, p)?))
    })
}

/// Serre bound valid for every field of degree `d`.
///
/// Odd primes maximize over the standard equation; for p = 2 the real
/// subfield of ℚ(ξ_{2^m}) has degree 2^{m−2}, which must divide d.
pub fn serre_degree_bound(n: u64, d: u64) -> Result<FactoredInteger> {
    if n < 2 || d == 0 {
        return Err(domain("serre degree bound needs n ≥ 2 and d ≥ 1"));
    }
    let r = n - 1;
    let t_cap = invphi_max(r);
    product_over(&primes_up_to(serre_cutoff(n, d)), |p| {
        let weyl = factorial_valuation(p, r);
        if p.is_two() {
            let m2 = u64::from(valuation_u64(p, d)) + 2;
            return Ok(m2 * r + weyl);
        }
        let sols = solve_standard_equation(p, d, &SolutionConstraints::with_t_max(t_cap))?;
        let lead = sols
            .iter()
            .map(|s| u64::from(s.m) * (r / euler_phi(s.t)))
            .max()
            .unwrap_or(0);
        Ok(lead + weyl)
    })
}

pub fn rough_exponent(n: u64, d: u64, p: Prime) -> u64 {
    let v = u64::from(valuation_u64(p, d));
    if !p.is_two() {
        let step = (p.get() - 1) / gcd(p.get() - 1, d);
        return (v + 1) * (n / step) + floor_series(n, p.get(), p.get());
    }
    if d.is_multiple_of(2) {
        n * (v + 1) + floor_series(n, 2, 2)
    } else {
        n + 2 * (n / 2) + floor_series(n, 2, 4)
    }
}

pub fn rough_bound(n: u64, d: u64) -> FactoredInteger {
    product_over(&primes_up_to(n * d + 1), |p| Ok(rough_exponent(n, d, p)))
        .expect("small exponents")
}

/// The rough bound restricted to the listed primes.
pub fn rough_bound_over(n: u64, d: u64, primes: &[Prime]) -> FactoredInteger {
    product_over(primes, |p| Ok(rough_exponent(n, d, p))).expect("small exponents")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub d: u64,
    pub factored: FactoredInteger,
    pub decimal: String,
}

/// Rough bounds for d = 1..=d_max.
pub fn table(n: u64, d_max: u64) -> Vec<TableRow> {
    (1..=d_max)
        .map(|d| {
            let factored = rough_bound(n, d);
            let decimal = factored.to_decimal(false);
            TableRow {
                d,
                factored,
                decimal,
            }
        })
        .collect()
}

/// Finite subgroups of PGL₂ up to isomorphism type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupFamily {
    Cyclic(u64),
    /// Dihedral group of order 2m, stored by m.
    Dihedral(u64),
    A4,
    S4,
    A5,
}

impl GroupFamily {
    pub fn order(self) -> u64 {
        match self {
            GroupFamily::Cyclic(m) => m,
            GroupFamily::Dihedral(m) => 2 * m,
            GroupFamily::A4 => 12,
            GroupFamily::S4 => 24,
            GroupFamily::A5 => 60,
        }
    }
}

impl std::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupFamily::Cyclic(m) => write!(f, "μ{m}"),
            GroupFamily::Dihedral(m) => write!(f, "D{}", 2 * m),
            GroupFamily::A4 => write!(f, "A4"),
            GroupFamily::S4 => write!(f, "S4"),
            GroupFamily::A5 => write!(f, "A5"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgl2Report {
    pub families: Vec<GroupFamily>,
    pub max_order: u64,
}

/// Group types that may embed in PGL₂(K). Unknown flags admit the family.
pub fn pgl2_admissible(field: &FieldSpec) -> Result<Pgl2Report> {
    let d = field.degree();
    if d == 0 {
        return Err(domain("field degree must be positive"));
    }
    let flags = field.flags();
    let mut families = Vec::new();
    for m in 2..=invphi_max(2 * d) {
        let ok = match field {
            FieldSpec::ExactCyclotomic(c) => real_cyclo_member(m, *c),
            FieldSpec::DegreeOnly { .. } => m <= 2 || semicyclic_degree(m)? <= d,
        };
        if ok {
            families.push(GroupFamily::Cyclic(m));
            families.push(GroupFamily::Dihedral(m));
        }
    }
    if flags.minus1.admits() {
        families.push(GroupFamily::A4);
        families.push(GroupFamily::S4);
        if flags.sqrt5.admits() {
            families.push(GroupFamily::A5);
        }
    }
    families.sort();
    let max_order = families.iter().map(|g| g.order()).max().unwrap_or(1);
    Ok(Pgl2Report {
        families,
        max_order,
    })
}

/// Worst case over several flag assignments of a degree-`d` field.
pub fn pgl2_max_over_cases(d: u64, cases: &[FieldFlags]) -> Result<u64> {
    let mut best = 0;
    for &flags in cases {
        best = best.max(pgl2_admissible(&FieldSpec::DegreeOnly { d, flags })?.max_order);
    }
    Ok(best)
}

/// The two shapes of a quadratic field: either −1 is not a sum of two
/// squares and √5 may be present, or √5 is absent.
pub fn quadratic_cases() -> [FieldFlags; 2] {
    [
        FieldFlags {
            xi4: Tristate::No,
            minus1: Tristate::No,
            sqrt5: Tristate::Yes,
        },
        FieldFlags {
            xi4: Tristate::Unknown,
            minus1: Tristate::Unknown,
            sqrt5: Tristate::No,
        },
    ]
}

/// PGL₂ bound used when nothing beyond the degree is known, except that
/// d = 1 means ℚ and d = 2 uses the quadratic case split.
pub fn pgl2_default_max(d: u64) -> Result<u64> {
    match d {
        0 => Err(domain("field degree must be positive")),
        1 => Ok(pgl2_admissible(&FieldSpec::rationals())?.max_order),
        2 => pgl2_max_over_cases(2, &quadratic_cases()),
        _ => pgl2_max_over_cases(d, &[FieldFlags::default()]),
    }
}

/// |μ(K)| · |PGL₂ bound|, via the central extension by scalars.
pub fn gl2_max_order(d: u64) -> Result<FactoredInteger> {
    let scalars = FactoredInteger::from_u64(invphi_max(d))?;
    Ok(scalars.mul(&FactoredInteger::from_u64(pgl2_default_max(d)?)?))
}

/// Largest N with (per_point)·N < budget, both given as (numerator, denominator).
pub fn max_basket_points(budget: (u64, u64), per_point: (u64, u64)) -> Result<u64> {
    let (bn, bd) = budget;
    let (pn, pd) = per_point;
    if bn == 0 || bd == 0 || pn == 0 || pd == 0 {
        return Err(domain("budget and per-point cost must be positive"));
    }
    let lhs = u128::from(bn) * u128::from(pd);
    let rhs = u128::from(pn) * u128::from(bd);
    u64::try_from((lhs - 1) / rhs).map_err(|_| domain("basket count overflow"))
}
