//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};

use crbound::bounds::{
    minkowski_bound, minkowski_exponent, pgl2_admissible, pgl2_default_max, rough_exponent,
    schur_exponent, serre_bound, table,
};
use crbound::cyclotomic::{
    all_invariants, m2_upper_from_ep, real_cyclo_member, Conductor, CycloInvariants, FieldSpec,
};
use crbound::diophantine::{
    brute_solutions, max_schur_exponent, solve_standard_equation, EquationSolution,
    SolutionConstraints,
};
use crbound::exactnum::primes_up_to;
use crbound::ledger::{Ledger, WHITELIST};
use crbound::totient::invphi_max;
use crbound::Prime;
use num_integer::gcd;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn dec(v: &crbound::FactoredInteger) -> String {
    v.to_decimal(false)
}

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn minkowski() -> Check {
    expect_eq("M(4)", dec(&minkowski_bound(4)), "5760".into())?;
    expect_eq("M(11)", dec(&minkowski_bound(11)), "735746457600".into())?;
    expect_eq(
        "M(12)",
        dec(&minkowski_bound(12)),
        "24103053950976000".into(),
    )
}

/// Rows of the two published tables as (factored, decimal).
const TABLE_RANK3: [(&str, &str); 15] = [
    ("2^5·3^2", "288"),
    ("2^7·3^4·5·7", "362880"),
    ("2^5·3^3·7", "6048"),
    ("2^10·3^4·5^3·7·13", "943488000"),
    ("2^5·3^2·11", "3168"),
    ("2^7·3^7·5·7^3·13·19", "118582289280"),
    ("2^5·3^2", "288"),
    ("2^13·3^4·5^3·7·13·17", "128314368000"),
    ("2^5·3^4·7·19", "344736"),
    ("2^7·3^4·5^2·7·11^3·31", "74863958400"),
    ("2^5·3^2·23", "6624"),
    ("2^10·3^7·5^3·7^3·13^3·19·37", "148299010973568000"),
    ("2^5·3^2", "288"),
    ("2^7·3^4·5·7^2·29·43", "3167579520"),
    ("2^5·3^3·7·11·31", "2062368"),
];

const TABLE_RANK4: [(&str, &str); 7] = [
    ("2^9·3^3·5", "69120"),
    ("2^11·3^5·5^2·7", "87091200"),
    ("2^9·3^5·5·7^2·13", "396264960"),
    ("2^15·3^5·5^4·7·13·17", "7698862080000"),
    ("2^9·3^3·5^2·11^2", "41817600"),
    ("2^11·3^9·5^2·7^4·13^2·19", "7769511593625600"),
    ("2^9·3^3·5·29", "2004480"),
];

fn tables() -> Check {
    for (n, rows) in [(3u64, &TABLE_RANK3[..]), (4, &TABLE_RANK4[..])] {
        let got = table(n, rows.len() as u64);
        expect_eq("row count", got.len(), rows.len())?;
        for (row, (f, d)) in got.iter().zip(rows) {
            expect_eq(
                &format!("B({n},{}) factored", row.d),
                row.factored.to_string(),
                f.to_string(),
            )?;
            expect_eq(
                &format!("B({n},{}) decimal", row.d),
                row.decimal.clone(),
                d.to_string(),
            )?;
        }
    }
    Ok(())
}

fn serre() -> Check {
    let q = Conductor::rationals();
    for (n, want) in [(3, "10080"), (4, "362880"), (5, "87178291200")] {
        let got = serre_bound(n, q).map_err(|e| e.to_string())?;
        expect_eq(&format!("serre({n}, Q)"), dec(&got), want.into())?;
    }
    Ok(())
}

fn appendix_propositions() -> Check {
    let l = Ledger::shipped();
    for (id, want) in [
        ("appendix-prop-sch4-7", "1132185600"),
        ("appendix-prop-sch3-15", "240045120"),
        ("cor-gl4-le2", "87091200"),
        ("cor-gl3-le2", "2903040"),
        ("cor-pgl3-le2", "2620800"),
        ("cor-pgl4-le2", "943488000"),
    ] {
        expect_eq(
            id,
            dec(&l.eval(id).map_err(|e| e.to_string())?),
            want.into(),
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Rel {
    /// The computed exponent equals the displayed bound.
    Eq,
    /// The text states a bound that the computation improves on.
    Le,
}

struct Step {
    n: u64,
    d: u64,
    p: u64,
    c: SolutionConstraints,
    published: u64,
    rel: Rel,
}

fn cons(
    e_min: u64,
    gcd_e: Option<u64>,
    e_eq: Option<u64>,
    t_min: Option<u64>,
) -> SolutionConstraints {
    SolutionConstraints {
        gcd_e,
        e_eq,
        t_min,
        ..SolutionConstraints::default().e_min(e_min)
    }
}

fn other_prime(n: u64, d: u64, p: u64, published: u64) -> Step {
    Step {
        n,
        d,
        p,
        c: cons(2, Some(2), None, None),
        published,
        rel: Rel::Eq,
    }
}

fn own_prime(n: u64, d: u64, p: u64, published: u64) -> Step {
    Step {
        n,
        d,
        p,
        c: cons(1, None, Some(2), None),
        published,
        rel: Rel::Eq,
    }
}

fn high_e(n: u64, d: u64, p: u64, published: u64) -> Step {
    Step {
        n,
        d,
        p,
        c: cons(3, None, None, None),
        published,
        rel: Rel::Eq,
    }
}

fn steps() -> Vec<Step> {
    let mut s = Vec::new();
    // Rank 3, some e_p = 2.
    for d in [8, 10, 12, 14] {
        s.push(other_prime(3, d, 7, 1));
        s.push(other_prime(3, d, 5, 1));
        s.push(other_prime(3, d, 3, if d == 12 { 7 } else { 4 }));
    }
    for q in [13, 19, 37] {
        s.push(other_prime(3, 12, q, 0));
    }
    for (d, p, k) in [
        (12, 13, 1),
        (12, 19, 1),
        (12, 7, 3),
        (12, 3, 7),
        (8, 13, 1),
        (8, 5, 3),
        (10, 11, 1),
    ] {
        s.push(own_prime(3, d, p, k));
    }
    for p in [3, 5, 7, 29, 43] {
        s.push(own_prime(3, 14, p, 0));
    }
    // Rank 3, every e_p ≥ 3.
    s.push(Step {
        n: 3,
        d: 12,
        p: 13,
        c: SolutionConstraints::with_t_max(3).e_min(3),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(Step {
        n: 3,
        d: 12,
        p: 7,
        c: cons(3, None, Some(4), None),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(Step {
        n: 3,
        d: 12,
        p: 7,
        c: cons(3, None, Some(6), None),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(Step {
        n: 3,
        d: 12,
        p: 5,
        c: cons(3, None, None, Some(2)),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(high_e(3, 12, 3, 4));
    s.push(high_e(3, 12, 5, 3));
    s.push(high_e(3, 8, 5, 1));
    s.push(high_e(3, 10, 11, 1));
    s.push(high_e(3, 14, 29, 0));
    s.push(high_e(3, 14, 43, 0));
    // Rank 4, some e_p = 2.
    for d in [6, 4] {
        s.push(other_prime(4, d, 7, 1));
        s.push(other_prime(4, d, 5, 2));
        let mut q3 = other_prime(4, d, 3, 5);
        if d == 6 {
            q3.rel = Rel::Le;
        }
        s.push(q3);
    }
    for (d, p, k) in [(6, 13, 1), (6, 7, 2), (4, 7, 1), (4, 5, 2), (4, 3, 5)] {
        s.push(own_prime(4, d, p, k));
    }
    s.push(Step {
        rel: Rel::Le,
        ..own_prime(4, 6, 3, 5)
    });
    // Rank 4, every e_p ≥ 3.
    s.push(high_e(4, 6, 19, 0));
    s.push(high_e(4, 6, 13, 0));
    s.push(Step {
        n: 4,
        d: 6,
        p: 7,
        c: cons(3, None, Some(3), None),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(Step {
        n: 4,
        d: 6,
        p: 7,
        c: cons(3, None, Some(4), None),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(Step {
        n: 4,
        d: 6,
        p: 5,
        c: cons(1, Some(3), None, None),
        published: 1,
        rel: Rel::Eq,
    });
    s.push(high_e(4, 6, 3, 5));
    for q in [17, 13, 7] {
        s.push(high_e(4, 4, q, 0));
    }
    s.push(high_e(4, 4, 5, 1));
    s
}

fn two_exponent(n: u64, e: u64) -> u64 {
    let m = m2_upper_from_ep(e, false);
    schur_exponent(
        n,
        &CycloInvariants {
            p: 2,
            t: 2,
            m,
            e,
            xi4: false,
        },
    )
}

fn sol(m: u32, e: u64, t: u64) -> EquationSolution {
    EquationSolution { m, e, t }
}

fn standard_equation() -> Check {
    let c = SolutionConstraints::with_t_max(3).e_min(3);
    let solve = |p: u64| solve_standard_equation(prime(p), 12, &c).map_err(|e| e.to_string());
    expect_eq("d=12, p=13", solve(13)?, vec![sol(1, 3, 3)])?;
    expect_eq("d=12, p=7", solve(7)?, vec![sol(1, 4, 2), sol(1, 6, 3)])?;
    expect_eq("d=12, p=19", solve(19)?, vec![])?;
    expect_eq("d=12, p=37", solve(37)?, vec![])?;

    for st in steps() {
        let got = max_schur_exponent(prime(st.p), st.n, st.d, &st.c).map_err(|e| e.to_string())?;
        let label = format!("nu_{{{},{}}} at d = {} under {:?}", st.p, st.n, st.d, st.c);
        match st.rel {
            Rel::Eq => expect_eq(&label, got, st.published)?,
            Rel::Le if got <= st.published => {}
            Rel::Le => {
                return Err(format!(
                    "{label}: got {got}, text bounds it by {}",
                    st.published
                ))
            }
        }
    }
    // The 2-part: m₂ bounded through e_p.
    expect_eq("nu_2,3 with e_p = 2", two_exponent(3, 2), 6)?;
    expect_eq("nu_2,3 with e_p = 3", two_exponent(3, 3), 5)?;
    expect_eq("nu_2,4 with e_p = 2", two_exponent(4, 2), 11)?;
    expect_eq("nu_2,4 with e_p = 3", two_exponent(4, 3), 9)
}

fn geometry() -> Check {
    let l = Ledger::shipped();
    let wanted: &[(&str, &str)] = &[
        ("lemma-del-pezzo", "432"),
        ("dp8-q", "288"),
        ("mfs-positive-dim", "5184"),
        ("genus7-conic", "69672960"),
        ("lemma-1.2.1-1.2.5", "5573836800"),
        ("lemma-1.2.7", "444528000"),
        ("lemma-1.2.2", "1886976000"),
        ("lemma-1.2.4", "125798400"),
        ("curve-fixing-a", "30240"),
        ("curve-fixing-b", "254016"),
        ("curve-fixing-c", "21337344"),
        ("lemma-1.2.6", "64012032"),
        ("lemma-1.2.3-smooth", "120"),
        ("lemma-1.2.3-singular", "174182400"),
        ("lemma-1.2.8", "1778112000"),
        ("lemma-smooth-degree-5", "24"),
        ("lemma-genus-12", "5760"),
        ("lemma-degree-4", "1902071808"),
        ("prop-non-gorenstein", "3962649600"),
        ("non-gorenstein-n3", "1800338400"),
        ("iota1-g-le9", "735746457600"),
        ("cor-pgl5-q", "87178291200"),
        ("iota1-low-genus", "11520"),
        ("iota2-d1", "96"),
    ];
    for (id, want) in wanted {
        expect_eq(
            id,
            dec(&l.eval(id).map_err(|e| e.to_string())?),
            want.to_string(),
        )?;
    }
    // Every declared non-constant value outside the whitelist must match too.
    let report = l.verify().map_err(|e| e.to_string())?;
    let bad: Vec<&str> = report
        .unexpected(&WHITELIST)
        .map(|r| r.id.as_str())
        .collect();
    expect_eq("unexpected mismatches", bad, vec![])
}

fn root() -> Check {
    let l = Ledger::shipped();
    expect_eq(
        "final",
        dec(&l.final_bound().map_err(|e| e.to_string())?),
        "24103053950976000".into(),
    )?;
    let pruned = l.with_override("g10", None).map_err(|e| e.to_string())?;
    expect_eq(
        "final with g10 = 0",
        dec(&pruned.final_bound().map_err(|e| e.to_string())?),
        "735746457600".into(),
    )?;
    let out = Command::new(env!("CARGO_BIN_EXE_crbound"))
        .args(["ledger", "final", "--override", "g10=0", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    expect_eq(
        "cli final with g10 = 0",
        v["decimal"].as_str().unwrap_or(""),
        "735746457600",
    )
}

fn audit() -> Check {
    let report = Ledger::shipped().verify().map_err(|e| e.to_string())?;
    let got: BTreeSet<&str> = report.mismatches().map(|r| r.id.as_str()).collect();
    expect_eq("mismatch set", got, WHITELIST.into_iter().collect())?;

    let bin = env!("CARGO_BIN_EXE_crbound");
    let status = Command::new(bin)
        .args(["ledger", "verify"])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    expect_eq("verify exit code", status.code(), Some(0))?;

    // A fresh mismatch must flip the exit code.
    let mut doc: serde_json::Value = serde_json::from_str(crbound::ledger::PAPER_LEDGER).unwrap();
    doc["nodes"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({
            "id": "planted", "kind": "Minkowski", "args": {"n": 4},
            "declared": {"2": 1}, "citation": "planted mismatch"
        }));
    let path = std::env::temp_dir().join(format!("crbound-acceptance-{}.json", std::process::id()));
    std::fs::write(&path, doc.to_string()).map_err(|e| e.to_string())?;
    let status = Command::new(bin)
        .args(["ledger", "verify", "--file", path.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    std::fs::remove_file(&path).ok();
    expect_eq(
        "verify exit code with a planted mismatch",
        status.code(),
        Some(3),
    )
}

/// ξ_m + ξ_m⁻¹ is fixed by every a ∈ (ℤ/L)^× with a ≡ 1 mod N.
fn fixed_by_galois(m: u64, n: u64) -> bool {
    let l = m * n / gcd(m, n);
    (1..=l)
        .filter(|&a| gcd(a, l) == 1 && a % n == 1 % n)
        .all(|a| a % m == 1 % m || (a + 1) % m == 0)
}

fn properties() -> Check {
    let q = Conductor::rationals();
    for n in 1..=14 {
        for p in primes_up_to(n + 1) {
            let s = schur_exponent(n, &all_invariants(q, p).map_err(|e| e.to_string())?);
            let m = minkowski_exponent(n, p);
            let (got, want) = if p.is_two() { (s - m, n / 2) } else { (s, m) };
            expect_eq(&format!("schur vs minkowski, n = {n}, p = {p}"), got, want)?;
        }
    }
    for cond in 1..=48 {
        let k = Conductor::new(cond).unwrap();
        for n in [3, 4] {
            for p in primes_up_to(n * k.degree() + 1) {
                let s = schur_exponent(n, &all_invariants(k, p).map_err(|e| e.to_string())?);
                if s > rough_exponent(n, k.degree(), p) {
                    return Err(format!(
                        "rough bound fails for N = {cond}, n = {n}, p = {p}"
                    ));
                }
            }
        }
    }
    for p in primes_up_to(43).into_iter().filter(|p| !p.is_two()) {
        for d in 1..=15 {
            let fast = solve_standard_equation(p, d, &SolutionConstraints::with_t_max(4))
                .map_err(|e| e.to_string())?;
            expect_eq(
                &format!("solver, p = {p}, d = {d}"),
                fast,
                brute_solutions(p, d, 5, 60, 4),
            )?;
        }
    }
    for m in 1..=64 {
        for n in 1..=64 {
            let k = Conductor::new(n).unwrap();
            expect_eq(
                &format!("real subfield m = {m}, N = {n}"),
                real_cyclo_member(m, k),
                fixed_by_galois(m, n),
            )?;
        }
    }
    let inv: Vec<u64> = [8, 12, 24, 48].iter().map(|&b| invphi_max(b)).collect();
    expect_eq("invphi_max", inv, vec![30, 42, 90, 210])
}

fn pgl2() -> Check {
    let r = pgl2_admissible(&FieldSpec::rationals()).map_err(|e| e.to_string())?;
    let got: BTreeSet<String> = r.families.iter().map(ToString::to_string).collect();
    let want: BTreeSet<String> = ["μ2", "μ3", "μ4", "μ6", "D4", "D6", "D8", "D12"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    expect_eq("groups over Q", got, want)?;
    expect_eq("max over Q", r.max_order, 12)?;
    let maxima: Vec<u64> = [2, 4, 6, 12, 24]
        .iter()
        .map(|&d| pgl2_default_max(d))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    expect_eq("degree maxima", maxima, vec![24, 60, 84, 180, 420])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Minkowski bounds", minkowski),
        ("rough bound tables", tables),
        ("Serre bounds over Q", serre),
        (
            "appendix propositions and degree-2 corollaries",
            appendix_propositions,
        ),
        ("standard-equation lemmas", standard_equation),
        ("geometry arithmetic", geometry),
        ("root bound and g10 override", root),
        ("discrepancy audit", audit),
        ("property suites", properties),
        ("PGL2 classification", pgl2),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
