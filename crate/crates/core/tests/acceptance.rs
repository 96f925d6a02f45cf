//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line
//! directly to stderr so the lines survive output capture.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use logjet::corpus::{cases, check_case};
use logjet::format::SchemeDescription;
use logjet::jets::log_jet_presentation;
use logjet::lattice::FGAbelianGroup;
use logjet::logmodel::{
    abstract_table, definition_check, dimensional_regularity, interval_check, AbstractRow, MonomialLogScheme,
    Semantics, StratumTable, VerdictStatus,
};
use logjet::monoid::AffineMonoid;
use logjet::oracle::{closed_form_count, enumerate_log_jets, truncation_image_count, OracleError, DEFAULT_BUDGET};
use logjet::poly::{Monomial, Polynomial, Var};
use logjet::report::{run_text, Command, RunOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?}, limit {limit:?}"))
}

fn corpus_scheme(file: &str) -> MonomialLogScheme {
    let case = cases().into_iter().find(|c| c.file == file).expect("corpus file");
    SchemeDescription::parse(case.source).unwrap().scheme().unwrap()
}

fn corpus_table(file: &str) -> StratumTable {
    let case = cases().into_iter().find(|c| c.file == file).expect("corpus file");
    SchemeDescription::parse(case.source).unwrap().table().unwrap()
}

fn monoid_exactness() -> Outcome {
    let start = Instant::now();
    let cusp = AffineMonoid::parse(&["x", "y"], &["3x = 2y"]).map_err(|e| e.to_string())?;
    let sat = cusp.saturate(64).and_then(|s| s.monoid.reduced()).map_err(|e| e.to_string())?;
    ensure(*sat.gp() == FGAbelianGroup::free(1) && sat.images() == [vec![1]], "saturation of <2,3> is not N")?;
    let two = AffineMonoid::parse(&["x", "y"], &["2x = 2y"]).map_err(|e| e.to_string())?;
    ensure(two.gp().to_string() == "Z + Z/2", format!("x^2=y^2 completion is {}", two.gp()))?;
    let sat = two.saturate(64).and_then(|s| s.monoid.reduced()).map_err(|e| e.to_string())?;
    ensure(
        sat.names() == ["x", "t1"] && sat.images() == [vec![1, 0], vec![0, 1]],
        format!("x^2=y^2 saturation is {:?} {:?}", sat.names(), sat.images()),
    )?;
    within(start, Duration::from_secs(1), "monoid computations")?;
    Ok("<2,3>^sat = N; x^2=y^2 has gp Z + Z/2 and saturation (Z/2)t1 x Nx".into())
}

fn verdict_table() -> Outcome {
    let mut notes = Vec::new();
    let checks: [(&str, Option<Semantics>, bool, Option<VerdictStatus>); 6] = [
        ("plane-standard.logjet", None, true, Some(VerdictStatus::Irreducible)),
        ("plane-xy.logjet", None, true, Some(VerdictStatus::Irreducible)),
        ("diagonal.logjet", None, false, Some(VerdictStatus::Reducible)),
        ("three-lines.logjet", None, false, Some(VerdictStatus::Reducible)),
        ("quadric-cone.logjet", Some(Semantics::Image), true, None),
        ("quadric-cone.logjet", Some(Semantics::Associated), false, None),
    ];
    for (file, sem, regular, status) in checks {
        let start = Instant::now();
        let case = cases().into_iter().find(|c| c.file == file).unwrap();
        let opts = RunOptions { semantics: sem, ..RunOptions::default() };
        let doc = run_text(Command::Verdict, case.source, &opts).map_err(|e| e.to_string())?;
        let v = doc.verdict.unwrap();
        ensure(v.regularity.dimensionally_regular == regular, format!("{file}: regularity {}", !regular))?;
        if let Some(s) = status {
            ensure(v.status == s, format!("{file}: status {}", v.status))?;
        }
        if file == "quadric-cone.logjet" {
            ensure(
                doc.warnings.iter().any(|w| w.contains("rank semantics disagree on {z,w}")),
                "quadric: discrepancy warning missing",
            )?;
        }
        within(start, Duration::from_secs(1), file)?;
        notes.push(format!("{}{}", file.trim_end_matches(".logjet"), if regular { "+" } else { "-" }));
    }
    Ok(notes.join(" "))
}

fn diagonal_witness() -> Outcome {
    let v = corpus_scheme("diagonal.logjet").verdict().map_err(|e| e.to_string())?;
    let w = v.witness.ok_or("no witness")?;
    ensure(w.witness_order == 2, format!("witness m={}", w.witness_order))?;
    ensure(v.summary == "reducible, witness m=2", v.summary.clone())?;
    Ok(format!("witness m=2, dims {} > {}", w.dims.0, w.dims.1))
}

fn hs_presentations() -> Outcome {
    let b = vec!["x".to_string()];
    let x = Polynomial::parse("x", &b).unwrap();
    let line = log_jet_presentation(&b, &[], &[("x".into(), x)], 1).map_err(|e| e.to_string())?;
    ensure(line.rendered_relations() == ["d1_x - x*dlog1_x"], format!("{:?}", line.rendered_relations()))?;
    let cusp = SchemeDescription::parse("monoid: x, y\nrelations: 3x = 2y\n").unwrap();
    let pres = cusp.jet_input().unwrap().presentation(1, false).map_err(|e| e.to_string())?;
    ensure(pres.rendered_relations()[1] == "3*x^2*d1_x - 2*y*d1_y", format!("{:?}", pres.rendered_relations()))?;
    for name in ["line-log-jets", "cuspidal-cubic-jets", "a1-two-charts-jets"] {
        let case = cases().into_iter().find(|c| c.name == name).unwrap();
        let o = check_case(&case);
        ensure(o.passed, format!("{name}: {}", o.detail.unwrap_or_default()))?;
    }
    Ok("line and cusp relations exact, golden files match".into())
}

fn random_poly(rng: &mut ChaCha8Rng) -> Polynomial {
    loop {
        let mut p = Polynomial::zero();
        for _ in 0..rng.gen_range(1..=4) {
            let mut m = Monomial::new();
            for k in 0..2 {
                let e = rng.gen_range(0..=3u32);
                if e > 0 {
                    m.insert(Var::base(k), e);
                }
            }
            let num = loop {
                let n: i64 = rng.gen_range(-5..=5);
                if n != 0 {
                    break n;
                }
            };
            let c = BigRational::new(BigInt::from(num), BigInt::from(rng.gen_range(1..=3i64)));
            p = &p + &Polynomial::monomial(c, m);
        }
        if !p.is_zero() {
            return p;
        }
    }
}

fn log_leibniz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e1b);
    let base = vec!["x".to_string(), "y".to_string()];
    let mut failures = 0;
    for _ in 0..100 {
        let p = random_poly(&mut rng);
        let q = random_poly(&mut rng);
        let pq = &p * &q;
        let chart = [("p".to_string(), p.clone()), ("q".to_string(), q.clone()), ("pq".to_string(), pq.clone())];
        let pres = log_jet_presentation(&base, &[], &chart, 1).map_err(|e| e.to_string())?;
        let (rp, rq, rpq) = (&pres.relations[0], &pres.relations[1], &pres.relations[2]);
        let dl = |l| Polynomial::var(Var::dlog(1, l));
        let lhs = &(rpq - &(&p * rq)) - &(&q * rp);
        let rhs = &pq * &(&(&dl(0) + &dl(1)) - &dl(2));
        if lhs != rhs {
            failures += 1;
        }
    }
    ensure(failures == 0, format!("{failures} of 100 pairs fail"))?;
    Ok("100 random pairs, 0 failures".into())
}

fn oracle_grid() -> Outcome {
    let start = Instant::now();
    let examples = [
        ("line", AffineMonoid::free(&["x"])),
        ("plane", AffineMonoid::free(&["x", "y"])),
        ("cusp", AffineMonoid::parse(&["x", "y"], &["3x = 2y"]).unwrap()),
        ("two-lines", AffineMonoid::parse(&["x", "y"], &["2x = 2y"]).unwrap()),
    ];
    let (mut compared, mut refused) = (0, 0);
    for (name, p) in &examples {
        let scheme = MonomialLogScheme::standard(p.clone(), 0).map_err(|e| e.to_string())?;
        let torsion = p.gp().torsion_order();
        for q in [2u64, 3, 5] {
            for m in 0..=2 {
                let enumerated = enumerate_log_jets(p, q, m, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                match closed_form_count(&scheme, q, m, DEFAULT_BUDGET) {
                    Ok(c) => {
                        ensure(
                            c.count == enumerated.count,
                            format!("{name} q={q} m={m}: closed form {} vs enumeration {}", c.count, enumerated.count),
                        )?;
                        compared += 1;
                    }
                    Err(OracleError::Hypothesis { .. }) => {
                        ensure(torsion % q as i64 == 0, format!("{name} q={q}: unexpected refusal"))?;
                        refused += 1;
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    let line = enumerate_log_jets(&examples[0].1, 3, 1, DEFAULT_BUDGET).unwrap().count;
    ensure(line == 9, format!("line q=3 m=1 gives {line}"))?;
    within(start, Duration::from_secs(60), "oracle grid")?;
    Ok(format!("{compared} equal pairs, {refused} refused by the p-torsion condition"))
}

fn char_p_collapse() -> Outcome {
    let scheme = corpus_scheme("positive-char.logjet");
    let r = truncation_image_count(&scheme, 2, 3, 1, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(
        r.image_over_origin < r.full_fiber_over_origin,
        format!("image {} not below fiber {}", r.image_over_origin, r.full_fiber_over_origin),
    )?;
    let case = cases().into_iter().find(|c| c.file == "positive-char.logjet").unwrap();
    let doc = run_text(Command::Verdict, case.source, &RunOptions::default()).map_err(|e| e.to_string())?;
    let v = doc.verdict.unwrap();
    ensure(v.status == VerdictStatus::NotAsserted, format!("char 2 verdict is {}", v.status))?;
    ensure(v.char_p.is_some(), "no char-p checklist")?;
    Ok(format!(
        "image {} < fiber {} over the origin; verdict {}",
        r.image_over_origin, r.full_fiber_over_origin, v.status
    ))
}

fn random_table(rng: &mut ChaCha8Rng) -> Vec<AbstractRow> {
    let top_dim = rng.gen_range(1..=4usize);
    let mut rows =
        vec![AbstractRow { label: "R0".into(), rank: rng.gen_range(0..=1), dim: top_dim, closure_of: vec![] }];
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top_dim + 1];
    by_dim[top_dim].push(0);
    for d in (0..top_dim).rev() {
        let above = by_dim[d + 1].clone();
        if above.is_empty() {
            break;
        }
        for _ in 0..rng.gen_range(0..=3) {
            let mut parents: Vec<usize> = above.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            if parents.is_empty() {
                parents.push(above[rng.gen_range(0..above.len())]);
            }
            let base = parents.iter().map(|&i| rows[i].rank).max().unwrap();
            let jump = match rng.gen_range(0..10) {
                0..=4 => 0,
                5..=8 => 1,
                _ => 2,
            };
            let idx = rows.len();
            rows.push(AbstractRow {
                label: format!("R{idx}"),
                rank: base + jump,
                dim: d,
                closure_of: parents.iter().map(|&i| rows[i].label.clone()).collect(),
            });
            by_dim[d].push(idx);
        }
    }
    rows
}

fn random_saturated(rng: &mut ChaCha8Rng) -> Option<AffineMonoid> {
    let d = rng.gen_range(1..=3usize);
    let n = rng.gen_range(d..=d + 2);
    let functional = [3i64, 2, 1];
    let mut images = Vec::new();
    while images.len() < n {
        let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        if v.iter().zip(functional).map(|(a, b)| a * b).sum::<i64>() > 0 {
            images.push(v);
        }
    }
    if logjet::lattice::rank(d, &images) < d {
        return None;
    }
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let p = AffineMonoid::from_images(FGAbelianGroup::free(d), names.clone(), images).ok()?;
    let p = AffineMonoid::from_presentation(&names, p.presentation()).ok()?;
    p.saturate(64).ok()?.monoid.reduced().ok()
}

fn invariant_suites() -> Outcome {
    let mut violations = Vec::new();
    let mut corpus_tables = Vec::new();
    for file in [
        "plane-standard.logjet",
        "plane-xy.logjet",
        "diagonal.logjet",
        "quadric-cone.logjet",
        "two-lines.logjet",
        "positive-char.logjet",
        "line-log.logjet",
        "cuspidal-cubic.logjet",
    ] {
        let s = corpus_scheme(file);
        for sem in [Semantics::Associated, Semantics::Image] {
            match s.with_semantics(sem).and_then(|s| s.stratify()) {
                Ok(t) => corpus_tables.push((format!("{file}/{sem}"), t)),
                Err(e) => violations.push(format!("{file}/{sem}: {e}")),
            }
        }
    }
    corpus_tables.push(("three-lines".into(), corpus_table("three-lines.logjet")));
    for (name, t) in &corpus_tables {
        if let Err(e) = t.check_semicontinuity() {
            violations.push(format!("{name}: {e}"));
        }
        if definition_check(t).is_empty() != interval_check(t) {
            violations.push(format!("{name}: characterizations disagree"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e5);
    let (mut tables, mut irregular, mut attempts) = (0, 0, 0);
    while tables < 500 && attempts < 200_000 {
        attempts += 1;
        let Ok(t) = abstract_table(&random_table(&mut rng)) else { continue };
        tables += 1;
        let def = definition_check(&t).is_empty();
        if def != interval_check(&t) || dimensional_regularity(&t).is_err() {
            violations.push(format!("random table {tables}: characterizations disagree"));
        }
        irregular += usize::from(!def);
    }
    if tables < 500 {
        violations.push(format!("only {tables} valid random tables in {attempts} attempts"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x70c1c);
    let mut monoids = 0;
    while monoids < 50 {
        let Some(p) = random_saturated(&mut rng) else { continue };
        monoids += 1;
        let label = format!("monoid {:?}", p.images());
        let mut ranks = Vec::new();
        for sem in [Semantics::Associated, Semantics::Image] {
            let s = MonomialLogScheme::standard(p.clone(), 0).and_then(|s| s.with_semantics(sem));
            match s.and_then(|s| s.stratify().map(|t| (s, t))) {
                Ok((s, t)) => {
                    if t.check_semicontinuity().is_err() {
                        violations.push(format!("{label}: semicontinuity"));
                    }
                    match s.verdict() {
                        Ok(v) if v.regularity.dimensionally_regular && v.regularity.r == 0 => {}
                        Ok(_) => violations.push(format!("{label}/{sem}: not regular with r = 0")),
                        Err(e) => violations.push(format!("{label}/{sem}: {e}")),
                    }
                    ranks.push(t.components.iter().map(|c| (c.label.clone(), c.rank)).collect::<Vec<_>>());
                }
                Err(e) => violations.push(format!("{label}/{sem}: {e}")),
            }
        }
        if ranks.len() == 2 && ranks[0] != ranks[1] {
            violations.push(format!("{label}: semantics differ on a standard chart"));
        }
    }
    ensure(violations.is_empty(), violations.join("; "))?;
    Ok(format!(
        "{} corpus tables, {tables} random tables ({irregular} not regular), {monoids} saturated monoids; 0 violations",
        corpus_tables.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("monoid exactness", monoid_exactness),
        ("verdict table", verdict_table),
        ("diagonal witness", diagonal_witness),
        ("HS presentations", hs_presentations),
        ("log Leibniz syzygy", log_leibniz),
        ("oracle equality", oracle_grid),
        ("char-p collapse", char_p_collapse),
        ("invariant suites", invariant_suites),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        match f() {
            Ok(note) => {
                let _ = writeln!(err, "PASS criterion {n} ({name}): {note}");
            }
            Err(msg) => {
                let _ = writeln!(err, "FAIL criterion {n} ({name}): {msg}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
