//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! The Green-Tao (3,3,3) run takes several minutes; `RAMSEY_AP_SKIP_STRETCH=1`
//! skips it and its line then reads SKIP.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ramsey_ap::cardinality::encode_exactly;
use ramsey_ap::drivers::{
    alpha_steplist, compute_number, compute_transversal_sequence, extension_numbers_from_tau,
    transversal_extension_upper_bound, verify_certificate, NumberSearch, NumberStatus,
    SolverBackend,
};
use ramsey_ap::estimation::{count_progressions, estimate_count, fit_count_model};
use ramsey_ap::hypergraph::{
    first_progression_rank, independence_number_bruteforce, transversal_number_bruteforce,
};
use ramsey_ap::instances::{solve_nb_bruteforce, NbClauseSet, NbLit, NbVariable};
use ramsey_ap::translation::{decode_model, dp_reduce};
use ramsey_ap::{
    ap_hypergraph, build_instance, solve, translate, BoolClauseSet, Budget, Family, ParameterTuple,
    Status, TranslationKind,
};

const MIN: Duration = Duration::from_secs(60);

type Suite = fn() -> Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String, elapsed: Duration) {
        if !ok {
            self.failures += 1;
        }
        println!(
            "{} criterion {id}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn tuple(e: &[usize]) -> ParameterTuple {
    ParameterTuple::new(e.to_vec()).unwrap()
}

/// Runs one number computation with the per-solve time budget `limit`, and
/// checks the value, the certificate and the wall-clock limit.
fn number_check(
    family: Family,
    t: &[usize],
    kind: TranslationKind,
    expected: usize,
    n_max: usize,
    limit: Duration,
) -> (bool, String, Duration) {
    let t = tuple(t);
    let mut search = NumberSearch::new(kind, n_max);
    search.budget = Budget::time(limit);
    let started = Instant::now();
    let result = compute_number(family, &t, &search);
    let elapsed = started.elapsed();
    match result {
        Ok(r) => {
            let certified = r.certificate_n + 1 == expected
                && verify_certificate(family, &t, r.certificate_n, &r.certificate).unwrap_or(false);
            let ok = r.status == NumberStatus::Exact(expected) && certified && elapsed <= limit;
            (
                ok,
                format!("{family}({t}) = {} (want {expected})", r.status),
                elapsed,
            )
        }
        Err(e) => (false, format!("{family}({t}): {e}"), elapsed),
    }
}

fn criterion_numbers(
    report: &mut Report,
    id: &str,
    family: Family,
    cases: &[(&[usize], usize)],
    limit: Duration,
) -> Vec<usize> {
    let mut found = Vec::new();
    let started = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for &(t, expected) in cases {
        let (pass, detail, elapsed) = number_check(
            family,
            t,
            TranslationKind::WeakNested,
            expected,
            expected + 5,
            limit,
        );
        ok &= pass;
        if pass {
            found.push(expected);
        }
        details.push(format!("{detail} in {:.1} s", elapsed.as_secs_f64()));
    }
    report.line(id, ok, details.join("; "), started.elapsed());
    found
}

fn criterion_1_to_4(report: &mut Report) -> (Vec<usize>, Vec<usize>) {
    let core = criterion_numbers(
        report,
        "1 (core vdW numbers)",
        Family::Vdw,
        &[
            (&[3, 3], 9),
            (&[3, 4], 18),
            (&[3, 5], 22),
            (&[4, 4], 35),
            (&[3, 3, 3], 27),
        ],
        2 * MIN,
    );
    let extended = criterion_numbers(
        report,
        "2 (extended vdW numbers)",
        Family::Vdw,
        &[(&[2, 3, 3], 14), (&[2, 2, 3, 3], 17), (&[2, 3, 3, 3], 40)],
        10 * MIN,
    );

    let started = Instant::now();
    let (a, da, ta) = number_check(
        Family::Gt,
        &[3, 3],
        TranslationKind::WeakNested,
        23,
        30,
        30 * MIN,
    );
    let (b, db, tb) = number_check(
        Family::Gt,
        &[3, 4],
        TranslationKind::WeakNested,
        79,
        85,
        30 * MIN,
    );
    let total = started.elapsed();
    report.line(
        "3 (core GT numbers)",
        a && b && total <= 30 * MIN,
        format!(
            "{da} in {:.1} s; {db} in {:.1} s",
            ta.as_secs_f64(),
            tb.as_secs_f64()
        ),
        total,
    );
    if std::env::var("RAMSEY_AP_SKIP_STRETCH").as_deref() == Ok("1") {
        println!("SKIP criterion 3-stretch (GT (3,3,3), logarithmic): RAMSEY_AP_SKIP_STRETCH=1");
    } else {
        let (ok, detail, elapsed) = number_check(
            Family::Gt,
            &[3, 3, 3],
            TranslationKind::SimpleLogarithmic,
            137,
            140,
            240 * MIN,
        );
        report.line("3-stretch (GT (3,3,3), logarithmic)", ok, detail, elapsed);
    }

    criterion_numbers(
        report,
        "4 (extended GT numbers)",
        Family::Gt,
        &[
            (&[2, 3, 3], 31),
            (&[2, 2, 3, 3], 39),
            (&[2, 2, 2, 3, 3], 41),
        ],
        30 * MIN,
    );
    (core, extended)
}

fn transversal_check(
    family: Family,
    k: usize,
    expected: &[usize],
) -> (bool, Vec<usize>, Vec<usize>, Duration) {
    let started = Instant::now();
    let n_max = *expected.last().unwrap();
    let seq = compute_transversal_sequence(
        family,
        k,
        n_max,
        Budget::time(15 * MIN),
        &SolverBackend::default(),
    );
    let elapsed = started.elapsed();
    match seq {
        Ok(seq) => {
            let thresholds = extension_numbers_from_tau(&seq);
            let ok = thresholds == expected && seq.is_valid() && elapsed <= 15 * MIN;
            (ok, thresholds, alpha_steplist(&seq), elapsed)
        }
        Err(_) => (false, Vec::new(), Vec::new(), elapsed),
    }
}

fn criterion_5_6(report: &mut Report) {
    let gt3 = [4, 7, 9, 13, 14, 16, 18, 21, 22, 23];
    let gt4 = [9, 14, 17, 22, 26];
    let (ok3, got3, _, t3) = transversal_check(Family::Gt, 3, &gt3);
    let (ok4, got4, _, t4) = transversal_check(Family::Gt, 4, &gt4);
    report.line(
        "5 (GT transversal tables)",
        ok3 && ok4,
        format!(
            "k=3 {got3:?} in {:.1} s; k=4 {got4:?} in {:.1} s",
            t3.as_secs_f64(),
            t4.as_secs_f64()
        ),
        t3 + t4,
    );

    let vdw3 = [3, 6, 7, 8, 10, 12, 15, 16, 17, 18];
    let (ok, got, steplist, t) = transversal_check(Family::Vdw, 3, &vdw3);
    let prefix_ok = steplist.starts_with(&[1, 2, 4, 5, 9, 11]);
    report.line(
        "6 (vdW transversal table, steplist)",
        ok && prefix_ok,
        format!("thresholds {got:?}, steplist {steplist:?}"),
        t,
    );
}

fn criterion_7(report: &mut Report) {
    let started = Instant::now();
    let ranks: Vec<Option<usize>> = (3..=8)
        .map(|k| first_progression_rank(Family::Gt, k, 1000))
        .collect();
    let elapsed = started.elapsed();
    let expected = [4, 9, 10, 37, 155, 263].map(Some);
    report.line(
        "7 (simple GT numbers)",
        ranks == expected && elapsed <= MIN,
        format!("{ranks:?}"),
        elapsed,
    );
}

fn random_nb(rng: &mut ChaCha8Rng) -> NbClauseSet {
    if rng.gen_bool(0.5) {
        // a genuine progression instance
        let m = rng.gen_range(2..=3);
        let mut entries: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=4)).collect();
        entries.sort_unstable();
        let family = if rng.gen_bool(0.5) {
            Family::Vdw
        } else {
            Family::Gt
        };
        let n = rng.gen_range(0..=if m == 2 { 12 } else { 9 });
        return build_instance(family, &tuple(&entries), n);
    }
    let nvars = rng.gen_range(1..=6);
    let domain = rng.gen_range(2..=5);
    let clauses = (0..rng.gen_range(0..=14))
        .map(|_| {
            let width = rng.gen_range(0..=nvars.min(3));
            let mut vars: Vec<usize> = (0..nvars).collect();
            let mut lits = Vec::new();
            for _ in 0..width {
                let var = vars.swap_remove(rng.gen_range(0..vars.len()));
                lits.push(NbLit {
                    var,
                    value: rng.gen_range(1..=domain),
                });
            }
            lits
        })
        .collect();
    NbClauseSet {
        variables: (0..nvars)
            .map(|i| NbVariable {
                vertex: i as u64 + 1,
                domain,
            })
            .collect(),
        clauses,
    }
}

/// (a): every translation agrees with the brute-force oracle, and decodes to a solution.
fn property_a() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x8a);
    let instances = 240;
    let mut sat = 0;
    for i in 0..instances {
        let f = random_nb(&mut rng);
        let expected = solve_nb_bruteforce(&f)
            .map_err(|e| e.to_string())?
            .is_some();
        sat += usize::from(expected);
        for kind in TranslationKind::ALL {
            let (cnf, map) = translate(&f, kind).map_err(|e| e.to_string())?;
            let r = solve(&cnf, Budget::unlimited());
            if (r.status == Status::Sat) != expected {
                return Err(format!(
                    "instance {i}, {kind}: solver says {}, oracle says {expected}",
                    r.status
                ));
            }
            if let Some(model) = r.model {
                let values = decode_model(&f, kind, &map, &model).map_err(|e| e.to_string())?;
                if !f.satisfied_by(&values) {
                    return Err(format!(
                        "instance {i}, {kind}: decoded assignment falsifies a clause"
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{instances} instances ({sat} satisfiable) x 7 translations"
    ))
}

/// (b): DP-eliminating the last slot of every variable of the direct
/// translation gives the reduced translation.
fn property_b() -> Result<String, String> {
    let mut checked = 0;
    for family in [Family::Vdw, Family::Gt] {
        for t in [
            vec![3, 3, 3],
            vec![2, 3, 4],
            vec![3, 3, 3, 3],
            vec![2, 2, 3, 3],
        ] {
            let t = tuple(&t);
            let m = t.len();
            for n in 0..=12 {
                let f = build_instance(family, &t, n);
                for (direct, reduced) in [
                    (TranslationKind::WeakDirect, TranslationKind::WeakReduced),
                    (
                        TranslationKind::StrongDirect,
                        TranslationKind::StrongReduced,
                    ),
                ] {
                    let (mut d, _) = translate(&f, direct).map_err(|e| e.to_string())?;
                    for r in 0..n {
                        d = dp_reduce(&d, r * m + m);
                    }
                    let (red, _) = translate(&f, reduced).map_err(|e| e.to_string())?;
                    let renumbered: HashSet<Vec<i32>> = d
                        .clauses
                        .iter()
                        .map(|c| {
                            let mut c: Vec<i32> = c
                                .iter()
                                .map(|&l| {
                                    let idx = l.unsigned_abs() as usize - 1;
                                    let v = ((idx / m) * (m - 1) + idx % m + 1) as i32;
                                    l.signum() * v
                                })
                                .collect();
                            c.sort_unstable_by_key(|l| (l.abs(), *l < 0));
                            c.dedup();
                            c
                        })
                        .collect();
                    if renumbered != red.normalized() {
                        return Err(format!("{family}({t}) n={n} {direct}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} direct/reduced pairs"))
}

/// (c): projections of the exactly-b encoding are the weight-b assignments.
fn property_c() -> Result<String, String> {
    let mut checked = 0;
    for n in 0..=8usize {
        let vars: Vec<usize> = (1..=n).collect();
        for b in 0..=n {
            let enc = encode_exactly(&vars, b, n + 1).map_err(|e| e.to_string())?;
            for bits in 0u32..1 << n {
                let mut f = BoolClauseSet::with_clauses(enc.next_free() - 1, enc.clauses.clone());
                for i in 0..n {
                    let v = (i + 1) as i32;
                    f.push(vec![if bits >> i & 1 == 1 { v } else { -v }]);
                }
                let sat = solve(&f, Budget::unlimited()).status == Status::Sat;
                if sat != (bits.count_ones() as usize == b) {
                    return Err(format!("n={n} b={b} bits={bits:b}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (n, b, assignment) triples"))
}

/// (d): the SAT-based tau sequence steps by 0 or 1 and matches both brute-force oracles.
fn property_d() -> Result<String, String> {
    for family in [Family::Vdw, Family::Gt] {
        for k in [3, 4] {
            let seq = compute_transversal_sequence(
                family,
                k,
                22,
                Budget::unlimited(),
                &SolverBackend::default(),
            )
            .map_err(|e| e.to_string())?;
            if !seq.is_valid() {
                return Err(format!("{family} k={k}: step law violated: {:?}", seq.tau));
            }
            for n in 1..=22 {
                let h = ap_hypergraph(family, k, n);
                let alpha = independence_number_bruteforce(&h).map_err(|e| e.to_string())?;
                let tau = transversal_number_bruteforce(&h).map_err(|e| e.to_string())?;
                if seq.tau[n - 1] != tau || tau + alpha != n {
                    return Err(format!(
                        "{family} k={k} n={n}: tau {} / {tau}, alpha {alpha}",
                        seq.tau[n - 1]
                    ));
                }
            }
        }
    }
    Ok("vdW and GT, k = 3, 4, n <= 22".into())
}

/// (e): the embedded solver agrees with exhaustive enumeration.
fn property_e() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x8e);
    let instances = 600;
    let mut sat = 0;
    for i in 0..instances {
        let n = rng.gen_range(1..=12usize);
        let ratio = rng.gen_range(1.0..4.5);
        let count = (n as f64 * ratio) as usize;
        let clauses: Vec<Vec<i32>> = (0..count)
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let v = rng.gen_range(1..=n) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let expected = (0u32..1 << n).any(|bits| {
            clauses.iter().all(|c| {
                c.iter()
                    .any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
            })
        });
        sat += usize::from(expected);
        let f = BoolClauseSet::with_clauses(n, clauses);
        let r = solve(&f, Budget::unlimited());
        if (r.status == Status::Sat) != expected {
            return Err(format!(
                "instance {i}: solver {}, enumeration {expected}",
                r.status
            ));
        }
    }
    Ok(format!("{instances} random CNFs ({sat} satisfiable)"))
}

fn criterion_8(report: &mut Report, core: &[usize], extended: &[usize]) {
    let suites: [(&str, Suite); 5] = [
        ("8a (translations vs oracle)", property_a),
        ("8b (DP reduction)", property_b),
        ("8c (cardinality projection)", property_c),
        ("8d (tau step law, tau + alpha)", property_d),
        ("8e (solver vs enumeration)", property_e),
    ];
    for (id, suite) in suites {
        let started = Instant::now();
        let result = suite();
        let elapsed = started.elapsed();
        match result {
            Ok(detail) => report.line(id, true, detail, elapsed),
            Err(detail) => report.line(id, false, detail, elapsed),
        }
    }

    // (m + 1) * base bounds the tuple extended by m leading 2's
    let started = Instant::now();
    let known = |v: &[usize], x: usize| v.contains(&x).then_some(x);
    let checks = [
        (vec![3, 3], known(core, 9), 1, known(extended, 14)),
        (vec![3, 3], known(core, 9), 2, known(extended, 17)),
        (vec![3, 3, 3], known(core, 27), 1, known(extended, 40)),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (t, base, m, value) in checks {
        match (base, value) {
            (Some(base), Some(value)) => {
                let bound = transversal_extension_upper_bound(&tuple(&t), m, base);
                ok &= bound >= value;
                details.push(format!("{}*{base} = {bound} >= {value}", m + 1));
            }
            _ => {
                ok = false;
                details.push(format!("({t:?}, m={m}): input number not established"));
            }
        }
    }
    report.line(
        "8f (extension bound)",
        ok,
        details.join("; "),
        started.elapsed(),
    );
}

fn criterion_9(report: &mut Report) {
    let started = Instant::now();
    let samples: Vec<(usize, u64)> = (500..=5000)
        .step_by(500)
        .map(|n| (n, count_progressions(Family::Gt, 3, n)))
        .collect();
    let mut ok = true;
    let mut details = Vec::new();
    match fit_count_model(3, &samples, 2) {
        Ok(model) => {
            for n in [750, 4750] {
                let exact = count_progressions(Family::Gt, 3, n) as f64;
                let rel = (estimate_count(&model, n) - exact).abs() / exact;
                ok &= rel <= 0.10;
                details.push(format!("n={n} relative error {rel:.4}"));
            }
        }
        Err(e) => {
            ok = false;
            details.push(e.to_string());
        }
    }
    let elapsed = started.elapsed();
    report.line(
        "9 (count estimation)",
        ok && elapsed <= MIN,
        details.join("; "),
        elapsed,
    );
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters from the libtest harness are not supported
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut report = Report { failures: 0 };
    let (core, extended) = criterion_1_to_4(&mut report);
    criterion_5_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report, &core, &extended);
    criterion_9(&mut report);
    if report.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
