//! Acceptance suite. Prints one PASS/FAIL line per criterion, followed by
//! indented details. Sub-checks marked as known defects are reported but do
//! not fail the test; see the README for the analysis behind them.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use desv_core::automaton::{AnnotatedModel, Lfsa, SecretSpec, StateId};
use desv_core::compose::{concurrent_composition, explore_observer_product, self_composition};
use desv_core::derive::{build_observer, epsilonize, faulty_subautomaton, normal_subautomaton};
use desv_core::gallery;
use desv_core::inference::check_diagnosability;
use desv_core::legacy::{
    check_diag_generalized_twin_plant, check_diag_twin_plant, check_diag_yl_verifier, ErasedGraph,
};
use desv_core::oracle::{
    bounded_definitional_search, random_lfsa, validate_witness, DefinitionalClaim, GeneratorParams,
    PropertyInstance,
};
use desv_core::{verify, OpacityVariant, PropertyKind};

struct Check {
    name: String,
    pass: bool,
    detail: String,
    known_defect: bool,
}

fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail: detail.into(),
        known_defect: false,
    }
}

fn known_defect(mut c: Check) -> Check {
    c.known_defect = true;
    c
}

fn with_secrets(m: &AnnotatedModel, names: &[&str]) -> AnnotatedModel {
    let mut m = m.clone();
    m.secrets = SecretSpec::new(m.lfsa.state_set(names.iter().copied()).unwrap());
    m
}

fn holds(m: &AnnotatedModel, kind: PropertyKind, k: Option<u64>) -> bool {
    verify(m, kind, k).unwrap().holds
}

fn op(v: OpacityVariant) -> PropertyKind {
    PropertyKind::Opacity(v)
}

/// Fixed-seed suite: at most 6 states and 5 events.
fn general_suite() -> Vec<(u64, AnnotatedModel)> {
    (0..600u64)
        .map(|seed| {
            let mut p = GeneratorParams::new(1 + (seed % 6) as usize, 1 + (seed / 6 % 5) as usize, seed);
            p.initial = 1 + (seed % 2) as usize;
            p.density = [0.12, 0.2, 0.3][(seed / 30 % 3) as usize];
            (seed, random_lfsa(&p).unwrap())
        })
        .collect()
}

/// Models inside the scope of the legacy methods; every other one is live and divergence-free.
fn scoped_suite() -> Vec<(u64, AnnotatedModel, bool)> {
    (0..300u64)
        .map(|i| {
            let seed = 10_000 + i;
            let clean = i % 2 == 0;
            let mut p = GeneratorParams::new(2 + (i % 5) as usize, 2 + (i / 5 % 4) as usize, seed);
            p.appendix_scope = true;
            p.density = [0.15, 0.25][(i / 20 % 2) as usize];
            p.live = clean;
            p.divergence_free = clean;
            (seed, random_lfsa(&p).unwrap(), clean)
        })
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1() -> Vec<Check> {
    use OpacityVariant::*;
    let s2 = gallery::s2();
    let s3 = gallery::s3();
    let s4 = gallery::s4();
    let s5 = gallery::s5();
    let cases: Vec<(&str, AnnotatedModel, PropertyKind, bool)> = vec![
        ("S2 *-SD", s2.clone(), PropertyKind::StarSd, false),
        ("S2 ω-SD", s2.clone(), PropertyKind::OmegaSd, false),
        ("S3 diag", s3.clone(), PropertyKind::Diagnosability, false),
        ("S3 pred", s3.clone(), PropertyKind::Predictability, false),
        ("S2 CSO {q2}", with_secrets(&s2, &["q2"]), op(Cso), true),
        ("S2 ISO {q0}", with_secrets(&s2, &["q0"]), op(Iso), false),
        ("S2 InfSO {q2}", with_secrets(&s2, &["q2"]), op(Infso), true),
        ("S2 InfSO {q1}", with_secrets(&s2, &["q1"]), op(Infso), false),
        ("S5 InfSO {q1,q3}", with_secrets(&s5, &["q1", "q3"]), op(Infso), true),
        ("S5 SInfSO {q1,q3}", with_secrets(&s5, &["q1", "q3"]), op(Sinfso), false),
        ("S4 CSO {q2,q3}", with_secrets(&s4, &["q2", "q3"]), op(Cso), true),
        ("S4 SCSO {q2,q3}", with_secrets(&s4, &["q2", "q3"]), op(Scso), false),
    ];
    cases
        .into_iter()
        .map(|(name, m, kind, expected)| {
            let (v, t) = timed(|| verify(&m, kind, None).unwrap());
            check(
                name,
                v.holds == expected && t < Duration::from_secs(1),
                format!("holds={} (expected {expected}) in {:.2?}", v.holds, t),
            )
        })
        .collect()
}

fn criterion_2() -> Vec<Check> {
    let s6 = gallery::s6();
    let s7 = gallery::s7();
    let f6 = s6.lfsa.event_id("f").unwrap();
    let f7 = s7.lfsa.event_id("f").unwrap();
    let d6 = check_diagnosability(&s6.lfsa, &s6.faults).holds;
    let tp6 = check_diag_twin_plant(&s6.lfsa, f6).unwrap().0.holds;
    let d7 = check_diagnosability(&s7.lfsa, &s7.faults).holds;
    let gtp7 = check_diag_generalized_twin_plant(&s7.lfsa, f7).unwrap().0.holds;
    let yl7 = check_diag_yl_verifier(&s7.lfsa, f7).unwrap().0.holds;
    vec![
        check("S6 diag false, twin plant true", !d6 && tp6, format!("diag={d6}, twin plant={tp6}")),
        check(
            "S7 diag true, gtp true, verifier false",
            d7 && gtp7 && !yl7,
            format!("diag={d7}, gtp={gtp7}, verifier={yl7}"),
        ),
    ]
}

fn triples(v: impl IntoIterator<Item = (String, String, String)>) -> BTreeSet<(String, String, String)> {
    v.into_iter().collect()
}

fn expect(edges: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    triples(edges.iter().map(|(a, e, b)| (a.to_string(), e.to_string(), b.to_string())))
}

fn criterion_3() -> Vec<Check> {
    let s2 = gallery::s2().lfsa;
    let obs = build_observer(&s2);
    let got = triples(
        obs.edges()
            .map(|(i, a, j)| (obs.format_state(i), s2.output_name(a).to_string(), obs.format_state(j))),
    );
    let fig_obs = expect(&[
        ("{q0}", "a", "{q0}"),
        ("{q0}", "b", "{q1,q2}"),
        ("{q1,q2}", "b", "{q1}"),
        ("{q1,q2}", "a", "∅"),
        ("{q1}", "b", "{q1}"),
        ("{q1}", "a", "∅"),
        ("∅", "a", "∅"),
        ("∅", "b", "∅"),
    ]);
    let obs_ok = obs.num_states() == 4 && got == fig_obs;

    let sc = self_composition(&s2);
    let got = triples(
        sc.transitions()
            .iter()
            .map(|t| (sc.state_name(t.from), sc.event_name(&t.event), sc.state_name(t.to))),
    );
    let fig_sc = expect(&[
        ("(q0,q0)", "(e1,e1)", "(q0,q0)"),
        ("(q0,q0)", "(e2,ε)", "(q0,q0)"),
        ("(q0,q0)", "(ε,e2)", "(q0,q0)"),
        ("(q0,q0)", "(e3,e4)", "(q1,q2)"),
        ("(q0,q0)", "(e3,e3)", "(q1,q1)"),
        ("(q0,q0)", "(e4,e3)", "(q2,q1)"),
        ("(q0,q0)", "(e4,e4)", "(q2,q2)"),
        ("(q1,q1)", "(e5,e5)", "(q1,q1)"),
    ]);
    let sc_ok = sc.num_states() == 5 && got == fig_sc;

    let s3 = gallery::s3();
    let f = faulty_subautomaton(&s3.lfsa, &s3.faults).automaton;
    let n = normal_subautomaton(&s3.lfsa, &s3.faults).automaton;
    let cc = concurrent_composition(&f, &n).unwrap();
    let got = triples(
        cc.transitions()
            .iter()
            .map(|t| (cc.state_name(t.from), cc.event_name(&t.event), cc.state_name(t.to))),
    );
    let fig_cc = expect(&[
        ("(q0,q0)", "(e1,e1)", "(q1,q2)"),
        ("(q1,q2)", "(e2,e2)", "(q3,q4)"),
        ("(q3,q4)", "(ε,u)", "(q3,q4)"),
        ("(q3,q4)", "(f,ε)", "(q5,q4)"),
        ("(q5,q4)", "(ε,u)", "(q5,q4)"),
        ("(q5,q4)", "(u,ε)", "(q5,q4)"),
    ]);
    let cc_ok = fig_cc.is_subset(&got);

    let plant = epsilonize(&s2);
    let q = |n: &str| s2.state_id(n).unwrap();
    let set = |names: &[&str]| s2.state_set(names.iter().copied()).unwrap();
    let product_edges = |seed: (StateId, desv_core::StateSet)| {
        let p = explore_observer_product(&plant, &obs, &[seed], None);
        let name = |i: usize| {
            let (q, x) = p.state(i);
            format!("({},{})", s2.state_name(*q), s2.format_set(x))
        };
        triples(p.edges().iter().map(|&(v, a, w)| {
            let l = a.map_or("ε".to_string(), |a| s2.output_name(a).to_string());
            (name(v), l, name(w))
        }))
    };
    let mut got = product_edges((q("q0"), set(&["q0"])));
    got.extend(product_edges((q("q1"), set(&["q2"]))));
    let fig_op = expect(&[
        ("(q0,{q0})", "a", "(q0,{q0})"),
        ("(q0,{q0})", "ε", "(q0,{q0})"),
        ("(q0,{q0})", "b", "(q2,{q1,q2})"),
        ("(q0,{q0})", "b", "(q1,{q1,q2})"),
        ("(q1,{q1,q2})", "b", "(q1,{q1})"),
        ("(q1,{q1})", "b", "(q1,{q1})"),
        ("(q1,{q2})", "b", "(q1,∅)"),
        ("(q1,∅)", "b", "(q1,∅)"),
    ]);
    let op_ok = fig_op.is_subset(&got);

    vec![
        check("observer of S2", obs_ok, format!("{} states", obs.num_states())),
        check("self-composition of S2", sc_ok, format!("{} states", sc.num_states())),
        check("CC(S3f,S3n) fragment", cc_ok, format!("{} transitions", cc.transitions().len())),
        check("CC(S2ε,S2obsε) fragment with (q1,∅)", op_ok, format!("{} edges seen", got.len())),
    ]
}

fn k_grid(cap: u64) -> Vec<u64> {
    let mut ks: BTreeSet<u64> = (1..=4).collect();
    ks.insert(cap.max(1));
    ks.insert(cap + 1);
    ks.insert((cap / 2).max(1));
    ks.into_iter().collect()
}

fn criterion_4(suite: &[(u64, AnnotatedModel)], scoped: &[(u64, AnnotatedModel, bool)]) -> Vec<Check> {
    let start = Instant::now();
    let (mut witnesses, mut bad_witness) = (0usize, Vec::new());
    let (mut positives, mut refuted) = (0usize, Vec::new());
    for (seed, m) in suite {
        let n = m.lfsa.num_states();
        let bound = 2 * n * n + 2;
        for kind in PropertyKind::ALL {
            let ks: Vec<Option<u64>> = if kind.needs_k() {
                vec![Some(1), Some(2), Some(3), Some(7)]
            } else {
                vec![None]
            };
            for k in ks {
                let v = verify(m, kind, k).unwrap();
                let instance = PropertyInstance { property: kind, k };
                match v.witness {
                    Some(w) => {
                        witnesses += 1;
                        let c = validate_witness(m, &DefinitionalClaim { instance, witness: w });
                        if !matches!(c, Ok(ref c) if c.valid) {
                            bad_witness.push(format!("seed {seed} {kind} {k:?}"));
                        }
                    }
                    None => {
                        positives += 1;
                        if let Some(cx) = bounded_definitional_search(m, instance, bound).unwrap() {
                            refuted.push(format!("seed {seed} {kind} {k:?}: {:?}", cx.sequence));
                        }
                    }
                }
            }
        }
    }
    let (mut gtp_dis, mut legacy_dis, mut clean) = (Vec::new(), Vec::new(), 0);
    for (seed, m, is_clean) in scoped {
        let f = m.faults.events().next().unwrap();
        let d = check_diagnosability(&m.lfsa, &m.faults).holds;
        if check_diag_generalized_twin_plant(&m.lfsa, f).unwrap().0.holds != d {
            gtp_dis.push(*seed);
        }
        if *is_clean {
            clean += 1;
            let tp = check_diag_twin_plant(&m.lfsa, f).unwrap().0.holds;
            let yl = check_diag_yl_verifier(&m.lfsa, f).unwrap().0.holds;
            if tp != d || yl != d {
                legacy_dis.push(*seed);
            }
        }
    }
    let elapsed = start.elapsed();
    let first = |v: &[String]| v.first().cloned().unwrap_or_default();
    vec![
        check(
            "witnesses validate",
            bad_witness.is_empty(),
            format!("{witnesses} witnesses on {} models, {} invalid {}", suite.len(), bad_witness.len(), first(&bad_witness)),
        ),
        check(
            "no bounded counterexample to a true verdict",
            refuted.is_empty(),
            format!("{positives} true verdicts, {} refuted {}", refuted.len(), first(&refuted)),
        ),
        check(
            "diag agrees with the generalized twin plant",
            gtp_dis.is_empty(),
            format!("{} in-scope models, disagreements {:?}", scoped.len(), gtp_dis),
        ),
        check(
            "diag agrees with twin plant and verifier",
            legacy_dis.is_empty(),
            format!("{clean} live, divergence-free models, disagreements {:?}", legacy_dis),
        ),
        check(
            "total time under 60 s",
            elapsed < Duration::from_secs(60),
            format!("{elapsed:.2?}"),
        ),
    ]
}

fn criterion_5(suite: &[(u64, AnnotatedModel)]) -> Vec<Check> {
    use OpacityVariant::*;
    let mut kso_mono = Vec::new();
    let mut skso_mono = Vec::new();
    let mut kso_cap = Vec::new();
    let mut skso_cap = Vec::new();
    let mut implications = Vec::new();
    let mut sd = Vec::new();
    for (seed, m) in suite {
        let n = m.lfsa.num_states();
        let open = n - m.secrets.states().len();
        let cap = (1u64 << n) - 2;
        let open_cap = (1u64 << open).saturating_sub(2);
        let ks = k_grid(cap);
        let kso: Vec<bool> = ks.iter().map(|&k| holds(m, op(Kso), Some(k))).collect();
        let skso: Vec<bool> = ks.iter().map(|&k| holds(m, op(Skso), Some(k))).collect();
        if kso.windows(2).any(|w| w[1] && !w[0]) {
            kso_mono.push(*seed);
        }
        if skso.windows(2).any(|w| w[1] && !w[0]) {
            skso_mono.push(*seed);
        }
        if holds(m, op(Kso), Some(cap.max(1))) != holds(m, op(Infso), None) {
            kso_cap.push(*seed);
        }
        let sinfso = holds(m, op(Sinfso), None);
        let at_cap = if open_cap >= 1 {
            holds(m, op(Skso), Some(open_cap))
        } else {
            let inst = PropertyInstance {
                property: op(Skso),
                k: Some(0),
            };
            bounded_definitional_search(m, inst, 2 * n * n + 2).unwrap().is_none()
        };
        if at_cap != sinfso {
            skso_cap.push((*seed, open));
        }
        let pairs = [(Scso, Cso), (Siso, Iso), (Sinfso, Infso)];
        let mut ok = pairs.iter().all(|&(s, w)| !holds(m, op(s), None) || holds(m, op(w), None));
        ok &= skso.iter().zip(&kso).all(|(s, w)| !s || *w);
        if !ok {
            implications.push(*seed);
        }
        if !holds(m, PropertyKind::OmegaSd, None) && holds(m, PropertyKind::StarSd, None) {
            sd.push(*seed);
        }
    }
    let small: Vec<u64> = skso_cap.iter().filter(|(_, o)| *o <= 1).map(|(s, _)| *s).collect();
    let mut cap_check = check(
        "SKSO(2^|Q\\Q_S|-2) ≡ SInfSO",
        skso_cap.is_empty(),
        format!(
            "{} of {} models disagree ({} with |Q\\Q_S| ≤ 1, where the bound is 0), first {:?}",
            skso_cap.len(),
            suite.len(),
            small.len(),
            skso_cap.first()
        ),
    );
    if !cap_check.pass {
        cap_check = known_defect(cap_check);
    }
    vec![
        check("KSO monotone in K", kso_mono.is_empty(), format!("violations {kso_mono:?}")),
        check(
            "KSO(2^|Q|-2) ≡ InfSO",
            kso_cap.is_empty(),
            format!("disagreements {kso_cap:?} (K=1 when |Q|=1)"),
        ),
        check("SKSO monotone in K", skso_mono.is_empty(), format!("violations {skso_mono:?}")),
        cap_check,
        check("strong notions imply standard ones", implications.is_empty(), format!("violations {implications:?}")),
        check("ω-SD violation implies *-SD violation", sd.is_empty(), format!("violations {sd:?}")),
    ]
}

fn criterion_5_counterexample() -> Check {
    use desv_core::RawLfsa;
    let lfsa = Lfsa::validate(
        RawLfsa::new()
            .states(["s", "n1", "n2"])
            .event("u", Some("a"))
            .event("v", Some("a"))
            .event("w", Some("b"))
            .event("x", Some("b"))
            .event("y", Some("c"))
            .transition("s", "u", "n2")
            .transition("n1", "v", "n1")
            .transition("n1", "w", "n2")
            .transition("n2", "x", "n1")
            .transition("n1", "y", "n1")
            .initial("s")
            .initial("n1")
            .derive_outputs(),
    )
    .unwrap();
    let m = AnnotatedModel {
        secrets: SecretSpec::new(lfsa.state_set(["s"]).unwrap()),
        faults: desv_core::FaultSpec::default(),
        lfsa,
    };
    let inst = |k| PropertyInstance {
        property: op(OpacityVariant::Skso),
        k: Some(k),
    };
    let at_2 = bounded_definitional_search(&m, inst(2), 20).unwrap().is_none();
    let at_3 = bounded_definitional_search(&m, inst(3), 20).unwrap().is_none();
    let verdict_3 = holds(&m, op(OpacityVariant::Skso), Some(3));
    check(
        "constructed model, |Q\\Q_S| = 2: SKSO(2) holds, SKSO(3) fails",
        at_2 && !at_3 && !verdict_3,
        format!("definitional SKSO(2)={at_2}, SKSO(3)={at_3}; verifier SKSO(3)={verdict_3}"),
    )
}

fn criterion_6(suite: &[(u64, AnnotatedModel)], scoped: &[(u64, AnnotatedModel, bool)]) -> Vec<Check> {
    let mut bounds = Vec::new();
    for (seed, m) in suite {
        let s = &m.lfsa;
        let n = s.num_states();
        let obs = build_observer(s);
        let mut ok = obs.num_states() <= 1 << n;
        ok &= self_composition(s).num_states() <= n * n;
        let f = faulty_subautomaton(s, &m.faults).automaton;
        let nn = normal_subautomaton(s, &m.faults).automaton;
        ok &= concurrent_composition(&f, &nn).unwrap().num_states() <= f.num_states() * nn.num_states();
        ok &= self_composition(&nn).num_states() <= nn.num_states() * nn.num_states();
        let seeds: Vec<_> = s.initial().iter().map(|q| (q, obs.initial().clone())).collect();
        let p = explore_observer_product(&epsilonize(s), &obs, &seeds, None);
        ok &= p.num_states() <= n * obs.num_states();
        if !ok {
            bounds.push(*seed);
        }
    }
    let (mut literal, mut corrected, mut same_size) = (Vec::new(), Vec::new(), 0);
    for (seed, m, _) in scoped {
        let f = m.faults.events().next().unwrap();
        let erased = check_diag_generalized_twin_plant(&m.lfsa, f).unwrap().1.erase_tags();
        let sf = faulty_subautomaton(&m.lfsa, &m.faults).automaton;
        let sn = normal_subautomaton(&m.lfsa, &m.faults).automaton;
        let fn_graph = ErasedGraph::from_product(&concurrent_composition(&sf, &sn).unwrap());
        if erased != fn_graph {
            literal.push(*seed);
            if erased.states.len() == fn_graph.states.len() && erased.edges.len() == fn_graph.edges.len() {
                same_size += 1;
            }
        }
        let full = ErasedGraph::from_product(&concurrent_composition(&m.lfsa, &sn).unwrap());
        if erased != full {
            corrected.push(*seed);
        }
    }
    let mut literal_check = check(
        "tag-erased gtp ≅ CC(S_f,S_n)",
        literal.is_empty(),
        format!(
            "{} of {} in-scope models differ ({} with equal state and edge counts), first {:?}",
            literal.len(),
            scoped.len(),
            same_size,
            literal.first()
        ),
    );
    if !literal_check.pass {
        literal_check = known_defect(literal_check);
    }
    vec![
        check(
            "observer ≤ 2^|Q|, products ≤ |Q1|·|Q2|",
            bounds.is_empty(),
            format!("{} models, violations {bounds:?}", suite.len()),
        ),
        literal_check,
        check(
            "tag-erased gtp = CC(S,S_n)",
            corrected.is_empty(),
            format!("{} in-scope models, differences {corrected:?}", scoped.len()),
        ),
    ]
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = desv_core::cli::run(std::iter::once("desv").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn criterion_7() -> Vec<Check> {
    let dir = tempdir();
    let mut commands: Vec<Vec<String>> = Vec::new();
    for (name, m) in gallery::all() {
        let path = format!("{dir}/{name}.json");
        std::fs::write(&path, desv_core::io::serialize_model(&m)).unwrap();
        commands.push(vec!["verify".into(), path.clone(), "--all-properties".into(), "--k".into(), "2".into(), "--json".into()]);
        commands.push(vec!["oracle".into(), path.clone(), "--property".into(), "infso".into(), "--bound".into(), "6".into(), "--json".into()]);
        commands.push(vec!["build".into(), path.clone(), "--artifact".into(), "observer".into()]);
        commands.push(vec!["build".into(), path.clone(), "--artifact".into(), "cc-fn".into()]);
    }
    for seed in 0..5 {
        commands.push(vec!["gen".into(), "--states".into(), "5".into(), "--events".into(), "4".into(), "--seed".into(), seed.to_string()]);
    }
    let mut differ = Vec::new();
    for c in &commands {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        if cli(&args) != cli(&args) {
            differ.push(c.join(" "));
        }
    }
    let bin = env!("CARGO_BIN_EXE_desv");
    let path = format!("{dir}/s3.json");
    let run = || {
        std::process::Command::new(bin)
            .args(["verify", &path, "--property", "diag", "--json"])
            .output()
            .unwrap()
            .stdout
    };
    let same_process = run() == run();
    vec![
        check(
            "repeated commands give identical output",
            differ.is_empty(),
            format!("{} commands, differing {differ:?}", commands.len()),
        ),
        check("repeated binary runs give identical JSON", same_process, ""),
    ]
}

fn tempdir() -> String {
    let dir = std::env::temp_dir().join(format!("desv-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.to_string_lossy().into_owned()
}

#[test]
fn acceptance() {
    let suite = general_suite();
    let scoped = scoped_suite();
    let mut c5 = criterion_5(&suite);
    c5.push(criterion_5_counterexample());
    let criteria: Vec<(&str, Vec<Check>)> = vec![
        ("1 reference verdicts", criterion_1()),
        ("2 legacy-method discrepancies", criterion_2()),
        ("3 structure regression", criterion_3()),
        ("4 randomized cross-validation", criterion_4(&suite, &scoped)),
        ("5 K-step and implication checks", c5),
        ("6 structural bounds", criterion_6(&suite, &scoped)),
        ("7 determinism", criterion_7()),
    ];
    let mut unexpected = Vec::new();
    for (title, checks) in &criteria {
        let pass = checks.iter().all(|c| c.pass);
        println!("criterion {title}: {}", if pass { "PASS" } else { "FAIL" });
        for c in checks {
            let mark = match (c.pass, c.known_defect) {
                (true, _) => "ok",
                (false, true) => "FAIL (known defect)",
                (false, false) => "FAIL",
            };
            println!("    {mark}: {} [{}]", c.name, c.detail);
            if !c.pass && !c.known_defect {
                unexpected.push(format!("{title}: {}", c.name));
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
