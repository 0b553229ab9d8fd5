//! Acceptance gate: one PASS/FAIL line per criterion, all comparisons exact.

use std::sync::Arc;
use std::time::{Duration, Instant};

use vvhecke::arith::{CycMatrix, CycNumber};
use vvhecke::hecke::{t_op, Relation, Tamper};
use vvhecke::lattice::{CosetId, DiscriminantForm, Lattice};
use vvhecke::qseries::{
    brute_force_counts, scalar_hecke, theta_series, vv_theta, vvmf, MixedQSeries, SumMode,
};
use vvhecke::suites::{builtin_lattices, pairing_lift, rescaling, Input, Instance};
use vvhecke::weil::{check_subrep, Generator, WeilRep};
use vvhecke::Rational;

type Outcome = Result<(), String>;
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn form(g: &[Vec<i64>], r: u64) -> Arc<DiscriminantForm> {
    Arc::new(DiscriminantForm::new(&Lattice::new(g.to_vec()).unwrap(), r).unwrap())
}

fn q(n: i64) -> Rational {
    Rational::integer(n)
}

fn a1() -> Vec<Vec<i64>> {
    vec![vec![2]]
}

fn a2() -> Vec<Vec<i64>> {
    vec![vec![2, 1], vec![1, 2]]
}

fn relations(instances: Vec<Instance>) -> Outcome {
    for i in instances {
        let c = i.run(Tamper::None);
        if !c.passed {
            return Err(c.detail);
        }
    }
    Ok(())
}

fn inst(relation: Relation, lattice: Vec<Vec<i64>>, input: Input, mode: SumMode) -> Instance {
    Instance {
        relation,
        lattice,
        input,
        mode,
        negative: false,
    }
}

fn c1() -> Outcome {
    for g in builtin_lattices() {
        let w = WeilRep::new(form(&g, 1));
        let (t, s) = (w.rho_t().unwrap(), w.rho_s().unwrap());
        for (name, m) in [("T", &t), ("S", &s)] {
            if !(m * &m.conj_transpose()).is_identity() {
                return Err(format!("ρ({name}) not unitary on {g:?}"));
            }
        }
        let st: CycMatrix = w.rho_word(&[Generator::S, Generator::T]).unwrap();
        if &(&st * &st) * &st != &s * &s {
            return Err(format!("(ST)³ ≠ S² on {g:?}"));
        }
    }
    Ok(())
}

fn c2() -> Outcome {
    for g in [a1(), a2()] {
        for n in [2u64, 3] {
            let big = form(&g, n * n);
            if !check_subrep(&big, n).map_err(|e| e.to_string())? {
                return Err(format!("subrep fails for n={n} on {g:?}"));
            }
        }
    }
    Ok(())
}

fn c3() -> Outcome {
    for r in [4u64, 9] {
        let (ok, detail) = rescaling(&a1(), r, &q(6)).map_err(|e| e.to_string())?;
        if !ok {
            return Err(format!("r={r}: {detail}"));
        }
    }
    let (z, big) = (form(&a1(), 1), form(&a1(), 4));
    let even = theta_series(&big, CosetId(0), &q(6)).unwrap();
    let odd = theta_series(&big, CosetId(4), &q(6)).unwrap();
    let all = theta_series(&z, CosetId(0), &q(6)).unwrap();
    if even.add(&odd).terms() != all.terms() {
        return Err("θ_even + θ_odd ≠ θ_ℤ".into());
    }
    Ok(())
}

fn c4() -> Outcome {
    for g in [a1(), vec![vec![2, 0], vec![0, 2]]] {
        for r in [2u64, 3, 4] {
            let (ok, detail) = pairing_lift(&g, r, &q(12)).map_err(|e| e.to_string())?;
            if !ok {
                return Err(format!("{g:?} r={r}: {detail}"));
            }
        }
    }
    Ok(())
}

fn c5() -> Outcome {
    let mut v = Vec::new();
    for input in [Input::Theta, Input::Generic(2024)] {
        v.push(inst(
            Relation::TMult { m: 2, n: 3 },
            a1(),
            input,
            SumMode::All,
        ));
        for p in [2u64, 3] {
            for l in [2u32, 3] {
                v.push(inst(Relation::TRec { p, l }, a1(), input, SumMode::All));
            }
        }
    }
    relations(v)
}

fn c6() -> Outcome {
    let mut v = Vec::new();
    for input in [Input::Theta, Input::Generic(7)] {
        for n in [2u64, 3, 6] {
            v.push(inst(Relation::PU { n }, a1(), input, SumMode::All));
        }
        v.push(inst(
            Relation::PComp { m: 2, n: 3 },
            a1(),
            input,
            SumMode::All,
        ));
        v.push(inst(
            Relation::PTComm { m: 2, n: 3 },
            a1(),
            input,
            SumMode::All,
        ));
    }
    relations(v)
}

fn c7() -> Outcome {
    let mut v = vec![inst(
        Relation::HMult { m: 2, n: 3 },
        a1(),
        Input::Theta,
        SumMode::All,
    )];
    for p in [2u64, 3] {
        v.push(inst(
            Relation::HRec { p, l: 2 },
            a1(),
            Input::Theta,
            SumMode::All,
        ));
    }
    v.push(inst(
        Relation::HClosed { n: 2 },
        a1(),
        Input::Theta,
        SumMode::All,
    ));
    relations(v)
}

fn c8() -> Outcome {
    let mut v = Vec::new();
    for g in [a1(), a2()] {
        for l in [1u32, 2] {
            v.push(inst(
                Relation::BsEquiv { p: 3, l },
                g.clone(),
                Input::Theta,
                SumMode::DoubleCoset,
            ));
        }
    }
    relations(v)
}

fn c9() -> Outcome {
    let tau = [1i64, -24, 252, -1472, 4830, -6048, -16744, 84480];
    let delta = MixedQSeries::holomorphic(
        (q(12), q(0)),
        q(8),
        tau.iter()
            .enumerate()
            .map(|(i, &c)| (q(i as i64 + 1), CycNumber::integer(c))),
    )
    .map_err(|e| e.to_string())?;
    let t2 = scalar_hecke(&delta, 2, SumMode::All).map_err(|e| e.to_string())?;
    if *t2.trunc() != q(4) {
        return Err(format!("propagated truncation {}", t2.trunc()));
    }
    if !t2.agrees_with(&delta.scale(&CycNumber::integer(-24))) {
        return Err("T₂Δ ≠ −24Δ".into());
    }
    // coefficient rule a(2n) + 2¹¹·a(n/2)
    for n in 1..=4usize {
        let mut want = tau[2 * n - 1];
        if n % 2 == 0 {
            want += 2048 * tau[n / 2 - 1];
        }
        if t2.coefficient(&q(n as i64), &q(0)) != CycNumber::integer(want) {
            return Err(format!("coefficient rule fails at n={n}"));
        }
    }
    Ok(())
}

fn c10() -> Outcome {
    for (g, r) in [
        (a1(), 1u64),
        (a2(), 1),
        (vec![vec![2, 0], vec![0, 2]], 2),
        (a2(), 3),
    ] {
        let f = form(&g, r);
        let th = vv_theta(f.clone(), &q(4)).unwrap();
        let oracle = brute_force_counts(&f, &q(4)).unwrap();
        for id in f.ids() {
            let want: std::collections::BTreeMap<_, _> = oracle[id.0]
                .iter()
                .map(|(m, c)| (m.clone(), CycNumber::integer(*c)))
                .collect();
            if &want != th.component(id) {
                return Err(format!(
                    "point counts differ on {g:?} r={r} coset {:?}",
                    f.coords(id)
                ));
            }
        }
    }
    let th = vv_theta(form(&a2(), 1), &q(12)).unwrap();
    let psi = t_op(&th, 6, SumMode::All)
        .unwrap()
        .scale(&CycNumber::root(5, 2));
    let text = vvmf::to_string(&psi, None).unwrap();
    let back = vvmf::from_str(&text).unwrap();
    if !back.identical(&psi) || vvmf::to_string(&back, None).unwrap() != text {
        return Err("vvmf-v1 round trip is not bit-exact".into());
    }
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let one =
        serial.install(|| vvmf::to_string(&t_op(&th, 6, SumMode::All).unwrap(), None).unwrap());
    let many =
        wide.install(|| vvmf::to_string(&t_op(&th, 6, SumMode::All).unwrap(), None).unwrap());
    if one != many {
        return Err("output depends on thread count".into());
    }
    Ok(())
}

/// Written straight to stdout so the lines show without `--nocapture`.
fn report(line: String) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("C1", "Weil representation exactness", 5, c1),
        ("C2", "sub-representation", 30, c2),
        ("C3", "theta rescaling identity", 10, c3),
        ("C4", "pairing lift", 60, c4),
        ("C5", "T-algebra", 60, c5),
        ("C6", "projection algebra", 30, c6),
        ("C7", "H-algebra", 120, c7),
        ("C8", "explicit odd-prime formula equivalence", 120, c8),
        ("C9", "scalar anchor T2 on Delta", 5, c9),
        ("C10", "engine soundness", 10, c10),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, f) in criteria {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let res = res.and_then(|()| {
            if dt > Duration::from_secs(budget) {
                Err(format!("took {dt:.2?}, budget {budget} s"))
            } else {
                Ok(())
            }
        });
        match &res {
            Ok(()) => report(format!("PASS {id} {name} ({dt:.2?})")),
            Err(e) => {
                report(format!("FAIL {id} {name} ({dt:.2?}): {e}"));
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
