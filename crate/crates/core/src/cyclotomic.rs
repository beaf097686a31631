//! Cyclotomic fields ℚ(ξ_N) and the invariants t_p, m_p, e_p.
//!
//! Only cyclotomic fields get exact invariants. Fields known only by their
//! degree are described by [`FieldSpec::DegreeOnly`] with tristate flags.

use num_integer::{gcd, lcm, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactnum::{valuation_u64, Prime};
use crate::totient::euler_phi;

/// Guard on the m_p search; real inputs stop after a handful of steps.
const M_CAP: u32 = 62;

/// Conductor N of ℚ(ξ_N), normalized so that N ≢ 2 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Conductor(u64);

impl Conductor {
    pub fn new(n: u64) -> Result<Self> {
        canonical_conductor(n)
    }

    pub const fn rationals() -> Self {
        Conductor(1)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    /// [ℚ(ξ_N) : ℚ].
    pub fn degree(self) -> u64 {
        euler_phi(self.0)
    }

    pub fn contains_xi4(self) -> bool {
        self.0.is_multiple_of(4)
    }
}

pub fn canonical_conductor(n: u64) -> Result<Conductor> {
    if n == 0 {
        return Err(domain("conductor must be positive"));
    }
    Ok(Conductor(if n % 4 == 2 { n / 2 } else { n }))
}

/// Whether ξ_k lies in ℚ(ξ_N).
pub fn contains_root_of_unity(field: Conductor, k: u64) -> bool {
    match canonical_conductor(k) {
        Ok(c) => field.0.is_multiple_of(c.0),
        Err(_) => false,
    }
}

/// Whether ξ_m + ξ_m⁻¹ lies in ℚ(ξ_N).
///
/// Galois criterion: every a ∈ (ℤ/L)^× fixing ℚ(ξ_N), i.e. a ≡ 1 mod N,
/// must send ξ_m to ξ_m^{±1}.
pub fn real_cyclo_member(m: u64, field: Conductor) -> bool {
    if m <= 2 {
        return true;
    }
    let n = field.0;
    let l = lcm(n, m);
    let mut a = 1;
    while a < l {
        if gcd(a, l) == 1 {
            let r = a % m;
            if r != 1 && r != m - 1 {
                return false;
            }
        }
        a += n;
    }
    true
}

fn lcm_conductor(field: Conductor, k: u64) -> Conductor {
    Conductor(canonical_conductor(lcm(field.0, k)).expect("nonzero").0)
}

/// t_p = [K(ξ_p) : K], with ξ₄ in place of ξ₂.
pub fn cyclo_t_p(field: Conductor, p: Prime) -> u64 {
    let k = if p.is_two() { 4 } else { p.get() };
    lcm_conductor(field, k).degree() / field.degree()
}

fn largest_level(p: u64, start: u32, holds: impl Fn(u64) -> bool) -> Result<u32> {
    let mut level = start;
    loop {
        if level >= M_CAP {
            return Err(Error::InternalInconsistency(format!(
                "m_{p} search exceeded {M_CAP}"
            )));
        }
        match p.checked_pow(level + 1) {
            Some(q) if holds(q) => level += 1,
            _ => return Ok(level),
        }
    }
}

/// m_p. For odd p this is measured in K(ξ_p); for p = 2 in K itself.
pub fn cyclo_m_p(field: Conductor, p: Prime) -> Result<u32> {
    if !p.is_two() {
        let ext = lcm_conductor(field, p.get());
        return largest_level(p.get(), 1, |q| contains_root_of_unity(ext, q));
    }
    if field.contains_xi4() {
        largest_level(2, 2, |q| contains_root_of_unity(field, q))
    } else {
        largest_level(2, 2, |q| real_cyclo_member(q, field))
    }
}

/// e_p. For odd p, [K(ξ_p) : ℚ(ξ_{p^m})]; for p = 2 the base is the real
/// subfield ℚ(ξ_{2^m} + ξ_{2^m}⁻¹) regardless of whether ξ₄ ∈ K.
pub fn cyclo_e_p(field: Conductor, p: Prime) -> Result<u64> {
    let t = cyclo_t_p(field, p);
    let m = cyclo_m_p(field, p)?;
    if p.is_two() {
        let top = lcm_conductor(field, 4).degree();
        let base = 1u64 << (m - 2);
        return exact_ratio(top, base, p);
    }
    let base = p.get().pow(m - 1) * (p.get() - 1);
    exact_ratio(field.degree() * t, base, p)
}

fn exact_ratio(num: u64, den: u64, p: Prime) -> Result<u64> {
    let (q, r) = num.div_rem(&den);
    if r != 0 {
        return Err(Error::InternalInconsistency(format!(
            "e_{p}: {den} does not divide {num}"
        )));
    }
    Ok(q)
}

/// The invariants of one prime for one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycloInvariants {
    pub p: u64,
    pub t: u64,
    pub m: u32,
    pub e: u64,
    pub xi4: bool,
}

impl CycloInvariants {
    pub fn prime(&self) -> Prime {
        Prime::unchecked(self.p)
    }
}

pub fn all_invariants(field: Conductor, p: Prime) -> Result<CycloInvariants> {
    let inv = CycloInvariants {
        p: p.get(),
        t: cyclo_t_p(field, p),
        m: cyclo_m_p(field, p)?,
        e: cyclo_e_p(field, p)?,
        xi4: field.contains_xi4(),
    };
    if p.is_two() {
        if inv.m < 2 || (inv.t == 1) != inv.xi4 {
            return Err(Error::InternalInconsistency(format!(
                "bad 2-invariants {inv:?}"
            )));
        }
    } else {
        let lhs = p.get().pow(inv.m - 1) * (p.get() - 1) * inv.e;
        if lhs != field.degree() * inv.t {
            return Err(Error::InternalInconsistency(format!(
                "relation fails for {inv:?}"
            )));
        }
    }
    Ok(inv)
}

/// Upper bound on m₂ from the 2-adic valuation of some e_p.
///
/// A result below 2 contradicts m₂ ≥ 2 and means the case cannot occur.
pub fn m2_upper_from_ep(e: u64, xi4: bool) -> u32 {
    let v = valuation_u64(Prime::unchecked(2), e);
    if xi4 {
        v + 1
    } else {
        v + 2
    }
}

/// Lower bound t_q ≥ (q−1)/gcd(q−1, d, e).
pub fn tq_lower_from_gcd(q: Prime, d: u64, e: u64) -> Result<u64> {
    if q.is_two() {
        return Err(domain("t_q bound needs an odd prime"));
    }
    let qm1 = q.get() - 1;
    Ok(qm1 / gcd(gcd(qm1, d), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tristate {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Tristate {
    pub fn admits(self) -> bool {
        self != Tristate::No
    }
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::Yes
        } else {
            Tristate::No
        }
    }
}

impl std::str::FromStr for Tristate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yes" | "true" => Ok(Tristate::Yes),
            "no" | "false" => Ok(Tristate::No),
            "unknown" => Ok(Tristate::Unknown),
            _ => Err(Error::Parse(format!("expected yes/no/unknown, got {s:?}"))),
        }
    }
}

/// Capability flags for a field known only by its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldFlags {
    pub xi4: Tristate,
    /// −1 is a sum of two squares.
    pub minus1: Tristate,
    pub sqrt5: Tristate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    ExactCyclotomic(Conductor),
    DegreeOnly { d: u64, flags: FieldFlags },
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::ExactCyclotomic(Conductor::rationals())
    }

    pub fn degree(&self) -> u64 {
        match self {
            FieldSpec::ExactCyclotomic(c) => c.degree(),
            FieldSpec::DegreeOnly { d, .. } => *d,
        }
    }

    /// Flags, derived for cyclotomic fields. The sum-of-two-squares flag is
    /// only decided where it is immediate.
    pub fn flags(&self) -> FieldFlags {
        match *self {
            FieldSpec::DegreeOnly { flags, .. } => flags,
            FieldSpec::ExactCyclotomic(c) => FieldFlags {
                xi4: c.contains_xi4().into(),
                minus1: if c.contains_xi4() {
                    Tristate::Yes
                } else if c.get() == 1 {
                    Tristate::No
                } else {
                    Tristate::Unknown
                },
                sqrt5: (c.get() % 5 == 0).into(),
            },
        }
    }
}
