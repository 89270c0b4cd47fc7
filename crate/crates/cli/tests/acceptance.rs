//! Acceptance suite: one pass/fail line per criterion, exact comparisons
//! throughout, runtime budgets enforced. Exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use toda_core::arith::parse::parse_ratfn;
use toda_core::arith::{MPoly, QSeries, Rat, RatFn, Var};
use toda_core::nekrasov::{calibrate_and_compare, eps_log, f_inst_from_z, nekrasov_z};
use toda_core::period::{residue_identity_check, CurveSpec};
use toda_core::spectral::{
    full_prepotential, prepotential, solve_classical, solve_stationary_quantum, Convention,
};
use toda_core::toda::{Algebra, TodaSpec};
use toda_core::whittaker::{instanton_from_whittaker, verify_b_relation, whittaker, KappaConvention};

type Outcome = Result<String, String>;

fn preset(alg: Algebra) -> TodaSpec {
    TodaSpec::preset(alg, Rat::from_integer(2.into()))
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn swap(f: &RatFn, x: Var, y: Var) -> RatFn {
    f.substitute(x, &MPoly::var(Var::U))
        .and_then(|g| g.substitute(y, &MPoly::var(x)))
        .and_then(|g| g.substitute(Var::U, &MPoly::var(y)))
        .expect("variable swap is a polynomial substitution")
}

fn c1_eigenvalue_golden() -> Outcome {
    // second-order recursion by hand: b2 = 8/(4a^2 - hbar^2)
    let expected = parse_ratfn("8/(4*a1^2-hbar^2)").map_err(fail)?;
    let b = solve_stationary_quantum(&preset(Algebra::A1), 2).map_err(fail)?.b;
    ensure(b.coeff(2) == &expected, || format!("b2 = {}", b.coeff(2)))?;
    Ok(format!("b2 = {}", b.coeff(2)))
}

fn c2_quantum_classical() -> Outcome {
    for alg in [Algebra::A1, Algebra::A2] {
        let spec = preset(alg);
        let b = solve_stationary_quantum(&spec, 6).map_err(fail)?.b;
        let v = solve_classical(&spec, 6).map_err(fail)?.v;
        for n in 0..=6 {
            let lim = b.coeff(n).substitute(Var::HBAR, &MPoly::zero()).map_err(fail)?;
            ensure(&lim == v.coeff(n), || format!("{alg:?} order {n}: {lim} vs {}", v.coeff(n)))?;
        }
    }
    Ok("A1, A2: b|hbar=0 = v through order 6".into())
}

fn c3_whittaker_relations() -> Outcome {
    for alg in [Algebra::A1, Algebra::A2] {
        let spec = preset(alg);
        // kappa-pole order <= 1 and x-independence are enforced by the solver
        let w = whittaker(&spec, 5, KappaConvention::OperatorScale).map_err(fail)?;
        let b = solve_stationary_quantum(&spec, 5).map_err(fail)?.b;
        verify_b_relation(&w.phi, &b, KappaConvention::OperatorScale)
            .map_err(|n| format!("{alg:?}: q dPhi/dq != b at order {n}"))?;
        let inst = instanton_from_whittaker(&w.phi, KappaConvention::OperatorScale)
            .map_err(|(n, e)| format!("{alg:?} order {n}: {e}"))?;
        let v = solve_classical(&spec, 5).map_err(fail)?.v;
        let f = prepotential(&v, 1, Convention::SmallQ).map_err(fail)?;
        ensure(inst == f, || format!("{alg:?}: Phi|hbar=0 differs from F_inst"))?;
    }
    Ok("A1, A2 through order 5: simple kappa pole, x-independent Phi, q dPhi/dq = b, Phi|hbar=0 = F_inst".into())
}

fn c4_renormalization() -> Outcome {
    let spec = preset(Algebra::A1);
    let v = solve_classical(&spec, 8).map_err(fail)?.v;
    let f = prepotential(&v, 2, Convention::SmallQ).map_err(fail)?;
    ensure(f.qdq() == v, || "q dF/dq != v".into())?;
    let fq = prepotential(&v, 2, Convention::BigQ).map_err(fail)?;
    let full = full_prepotential(&spec, &fq);
    let u = full.u_series();
    let a2 = RatFn::from_mpoly(&MPoly::var(Var::a(1)).pow(2));
    ensure(u.coeff(0) == &a2, || format!("u_0 = {}", u.coeff(0)))?;
    for k in 1..=4 {
        ensure(u.coeff(k) == v.coeff(2 * k), || format!("Q dF/dQ != u at Q^{k}"))?;
    }
    Ok("A1 order 8: q dF/dq = v; Q dF/dQ = u = a^2 + ...".into())
}

fn c5_period_identity() -> Outcome {
    let a1 = preset(Algebra::A1);
    let curve = CurveSpec::from_spec(&a1).map_err(fail)?;
    let v = solve_classical(&a1, 8).map_err(fail)?.v;
    residue_identity_check(&v, &curve, 8)
        .map_err(fail)?
        .map_err(|n| format!("A1 fails at order {n}"))?;
    let other = CurveSpec::parse("w + 1/w + w^2").map_err(fail)?;
    let v2 = other.classical_v(6).map_err(fail)?;
    residue_identity_check(&v2, &other, 6)
        .map_err(fail)?
        .map_err(|n| format!("w + 1/w + w^2 fails at order {n}"))?;
    let mut bent = v2.coeffs().to_vec();
    bent[4] = bent[4].add(&parse_ratfn("1/a1^3").map_err(fail)?);
    let r = residue_identity_check(&QSeries::new(bent), &other, 6).map_err(fail)?;
    ensure(r == Err(4), || format!("perturbed v at order 4 gave {r:?}"))?;
    Ok("A1 order 8 and w + 1/w + w^2 order 6 pass; perturbation at order 4 detected at order 4".into())
}

fn c6_grading() -> Outcome {
    for (alg, h, order) in [(Algebra::A1, 2, 8), (Algebra::A2, 3, 6)] {
        let v = solve_classical(&preset(alg), order).map_err(fail)?.v;
        for m in 1..=order {
            if m % h != 0 {
                ensure(v.coeff(m).is_zero(), || format!("{alg:?}: v_{m} = {}", v.coeff(m)))?;
            }
        }
        ensure(!v.coeff(h).is_zero(), || format!("{alg:?}: v_{h} vanishes"))?;
    }
    Ok("A1 (h=2, m<=8) and A2 (h=3, m<=6)".into())
}

fn c7_oracle_self_validation() -> Outcome {
    let l = eps_log(&nekrasov_z(1, 5).map_err(fail)?).map_err(fail)?;
    for d in 0..=5 {
        let want = if d == 1 { RatFn::one() } else { RatFn::zero() };
        ensure(l.coeff(d) == &want, || format!("n=1: e1 e2 ln Z at Q^{d} = {}", l.coeff(d)))?;
    }
    let z = nekrasov_z(2, 3).map_err(fail)?;
    for d in 0..=3 {
        let c = z.coeff(d);
        ensure(&swap(c, Var::E1, Var::E2) == c, || format!("n=2 d={d}: not symmetric in e1, e2"))?;
        ensure(&swap(c, Var::a(1), Var::a(2)) == c, || format!("n=2 d={d}: not symmetric in a1, a2"))?;
    }
    Ok("n=1: e1 e2 ln Z = Q through d=5; n=2, d<=3 symmetric".into())
}

fn c8_regular_limit() -> Outcome {
    let z = nekrasov_z(2, 3).map_err(fail)?;
    let l = eps_log(&z).map_err(fail)?;
    for d in 0..=3 {
        let c = l.coeff(d);
        c.substitute(Var::E1, &MPoly::zero())
            .and_then(|g| g.substitute(Var::E2, &MPoly::zero()))
            .map_err(|e| format!("d={d}: {e}"))?;
    }
    let f = f_inst_from_z(&z).map_err(fail)?;
    Ok(format!("n=2, d<=3 regular; F_1 = {}", f.coeff(1)))
}

fn c9_headline() -> Outcome {
    let spec = preset(Algebra::A1);
    let v = solve_classical(&spec, 6).map_err(fail)?.v;
    let fq = prepotential(&v, 2, Convention::SmallQ).map_err(fail)?;
    let fz = f_inst_from_z(&nekrasov_z(2, 3).map_err(fail)?).map_err(fail)?;
    // calibrate on d = 1, 2 ...
    let two = calibrate_and_compare(&fq, 2, &fz.truncate(2), 2).map_err(fail)?;
    let chosen: Vec<_> = two.attempts.iter().filter(|a| a.first_mismatch.is_none()).collect();
    ensure(chosen.len() == 1, || {
        let d: Vec<String> = two.attempts.iter().map(|a| format!("[{}] {}", a.variable_map(), a.detail)).collect();
        format!("{} conventions match d=1,2: {}", chosen.len(), d.join("; "))
    })?;
    let pick = chosen[0];
    // ... then d = 3 must agree with no further freedom
    let three = calibrate_and_compare(&fq, 2, &fz, 3).map_err(fail)?;
    let same = three
        .attempts
        .iter()
        .find(|a| a.s == pick.s && a.imaginary == pick.imaginary)
        .ok_or("convention vanished")?;
    ensure(same.c == pick.c && same.first_mismatch.is_none(), || format!("d=3: {}", same.detail))?;
    let c = pick.c.as_ref().map_or("?".into(), |c| c.to_string());
    Ok(format!("{}, Q_Z = {c}*Q fixed by d=1,2; d=3 agrees", pick.variable_map()))
}

fn c10_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_toda");
    let runs: [&[&str]; 4] = [
        &["prepotential", "--algebra", "A2", "--order", "6", "--format", "json"],
        &["whittaker", "--algebra", "A1", "--order", "4", "--format", "json"],
        &["nekrasov", "--n", "2", "--order", "3", "--format", "json"],
        &["compare", "--algebra", "A1", "--n", "2", "--order", "3", "--format", "json"],
    ];
    for args in runs {
        let once = || Command::new(exe).args(args).output().map_err(fail);
        let (a, b) = (once()?, once()?);
        ensure(a.status.success(), || format!("{args:?} exited with {}", a.status))?;
        ensure(a.stdout == b.stdout, || format!("{args:?}: reports differ"))?;
    }
    Ok("prepotential, whittaker, nekrasov and compare reports byte-identical across runs".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "A1 eigenvalue golden value", Duration::from_secs(1), c1_eigenvalue_golden),
        (2, "quantum-classical consistency", Duration::from_secs(60), c2_quantum_classical),
        (3, "Whittaker relations", Duration::from_secs(120), c3_whittaker_relations),
        (4, "renormalization identity", Duration::from_secs(60), c4_renormalization),
        (5, "period identity", Duration::from_secs(60), c5_period_identity),
        (6, "grading property", Duration::from_secs(60), c6_grading),
        (7, "oracle self-validation", Duration::from_secs(60), c7_oracle_self_validation),
        (8, "regularity of the oracle limit", Duration::from_secs(60), c8_regular_limit),
        (9, "Toda prepotential vs partition function", Duration::from_secs(300), c9_headline),
        (10, "determinism", Duration::from_secs(60), c10_determinism),
    ];
    let mut failures = 0;
    for (n, name, budget, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let dt = t.elapsed();
        let outcome = match outcome {
            Ok(m) if dt > budget => Err(format!("{m}; took {dt:.2?}, budget {budget:?}")),
            o => o,
        };
        match outcome {
            Ok(m) => println!("criterion {n:>2} PASS  {name} ({dt:.2?}): {m}"),
            Err(m) => {
                failures += 1;
                println!("criterion {n:>2} FAIL  {name} ({dt:.2?}): {m}");
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
