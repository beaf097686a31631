//! Solutions of p^{m−1}(p−1)·e = d·t and the Schur exponents they allow.

use serde::{Deserialize, Serialize};

use crate::bounds::schur_exponent;
use crate::cyclotomic::{tq_lower_from_gcd, CycloInvariants};
use crate::error::{domain, Result};
use crate::exactnum::{FactoredInteger, Prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EquationSolution {
    pub m: u32,
    pub e: u64,
    pub t: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Filters on the solution set. `t_max` falls back to the rank in
/// [`max_schur_exponent`], since larger t contribute nothing there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolutionConstraints {
    pub e_min: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_eq: Option<u64>,
    /// Another prime has e_q equal to this value; then t ≥ (p−1)/gcd(p−1, d, e_q).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gcd_e: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_eq: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_parity: Option<Parity>,
}

impl Default for SolutionConstraints {
    fn default() -> Self {
        Self {
            e_min: 1,
            t_max: None,
            t_min: None,
            e_max: None,
            e_eq: None,
            gcd_e: None,
            m_eq: None,
            e_parity: None,
        }
    }
}

impl SolutionConstraints {
    pub fn with_t_max(t_max: u64) -> Self {
        Self {
            t_max: Some(t_max),
            ..Self::default()
        }
    }

    pub fn e_min(mut self, e_min: u64) -> Self {
        self.e_min = e_min;
        self
    }

    fn t_range(&self, p: Prime, d: u64) -> Result<(u64, u64)> {
        let t_max = self.t_max.ok_or_else(|| domain("t_max is required"))?;
        if t_max == 0 {
            return Err(domain("t_max must be at least 1"));
        }
        let mut t_min = self.t_min.unwrap_or(1).max(1);
        if let Some(eq) = self.gcd_e {
            t_min = t_min.max(tq_lower_from_gcd(p, d, eq)?);
        }
        Ok((t_min, t_max))
    }

    fn accepts(&self, s: &EquationSolution) -> bool {
        s.e >= self.e_min
            && self.e_max.is_none_or(|x| s.e <= x)
            && self.e_eq.is_none_or(|x| s.e == x)
            && self.m_eq.is_none_or(|x| s.m == x)
            && self
                .e_parity
                .is_none_or(|par| s.e.is_multiple_of(2) == (par == Parity::Even))
    }
}

fn odd_prime(p: Prime) -> Result<()> {
    if p.is_two() {
        Err(domain("the standard equation is stated for odd primes"))
    } else {
        Ok(())
    }
}

/// All constrained solutions, ordered by (t, m).
pub fn solve_standard_equation(
    p: Prime,
    d: u64,
    c: &SolutionConstraints,
) -> Result<Vec<EquationSolution>> {
    odd_prime(p)?;
    if d == 0 {
        return Err(domain("degree must be positive"));
    }
    let (t_min, t_max) = c.t_range(p, d)?;
    let q = p.get();
    let mut out = Vec::new();
    for t in t_min..=t_max {
        let rhs = d * t;
        if !rhs.is_multiple_of(q - 1) {
            continue;
        }
        let rest = rhs / (q - 1);
        let mut m = 1;
        let mut pw = 1u64;
        while rest.is_multiple_of(pw) {
            let s = EquationSolution { m, e: rest / pw, t };
            if c.accepts(&s) {
                out.push(s);
            }
            m += 1;
            pw = match pw.checked_mul(q) {
                Some(v) => v,
                None => break,
            };
        }
    }
    Ok(out)
}

/// Exhaustive search over a box; the completeness oracle for the solver.
pub fn brute_solutions(
    p: Prime,
    d: u64,
    m_max: u32,
    e_max: u64,
    t_max: u64,
) -> Vec<EquationSolution> {
    let q = p.get();
    let mut out = Vec::new();
    for t in 1..=t_max {
        for m in 1..=m_max {
            for e in 1..=e_max {
                let lhs = q
                    .checked_pow(m - 1)
                    .and_then(|x| x.checked_mul((q - 1) * e));
                if lhs == Some(d * t) {
                    out.push(EquationSolution { m, e, t });
                }
            }
        }
    }
    out
}

/// Re-checks a solution with exact factored arithmetic.
pub fn check_solution(p: Prime, d: u64, s: &EquationSolution) -> Result<bool> {
    let lhs = FactoredInteger::prime_power(p, s.m - 1)
        .mul(&FactoredInteger::from_u64(p.get() - 1)?)
        .mul(&FactoredInteger::from_u64(s.e)?);
    let rhs = FactoredInteger::from_u64(d)?.mul(&FactoredInteger::from_u64(s.t)?);
    Ok(lhs == rhs)
}

/// Largest ν^sch_{p,n} over the constrained solutions; 0 when there are none.
pub fn max_schur_exponent(p: Prime, n: u64, d: u64, c: &SolutionConstraints) -> Result<u64> {
    let mut c = c.clone();
    c.t_max.get_or_insert(n);
    let best = solve_standard_equation(p, d, &c)?
        .iter()
        .map(|s| {
            schur_exponent(
                n,
                &CycloInvariants {
                    p: p.get(),
                    t: s.t,
                    m: s.m,
                    e: s.e,
                    xi4: false,
                },
            )
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}
