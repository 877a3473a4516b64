use desv_core::compose::self_composition;
use desv_core::derive::build_observer;
use desv_core::io::{parse_model, serialize_model, ModelDocument};
use desv_core::oracle::{random_lfsa, validate_witness, DefinitionalClaim, GeneratorParams, PropertyInstance};
use desv_core::{verify, AnnotatedModel, OpacityVariant, PropertyKind};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = AnnotatedModel> {
    (1usize..=5, 1usize..=4, any::<u64>(), 1usize..=2, 0.05f64..0.4).prop_map(|(n, e, seed, init, density)| {
        let mut p = GeneratorParams::new(n, e, seed);
        p.initial = init;
        p.density = density;
        random_lfsa(&p).unwrap()
    })
}

fn holds(m: &AnnotatedModel, kind: PropertyKind, k: Option<u64>) -> bool {
    verify(m, kind, k).unwrap().holds
}

fn all_verdicts(m: &AnnotatedModel) -> Vec<bool> {
    PropertyKind::ALL
        .into_iter()
        .map(|p| holds(m, p, p.needs_k().then_some(2)))
        .collect()
}

/// Renames every state and event and reverses the declaration order.
fn renamed(m: &AnnotatedModel) -> AnnotatedModel {
    let mut doc = ModelDocument::from_model(m);
    let s = |x: &str| format!("s_{x}");
    let e = |x: &str| format!("ev_{x}");
    for st in &mut doc.states {
        st.id = s(&st.id);
    }
    for ev in &mut doc.events {
        ev.id = e(&ev.id);
    }
    for t in &mut doc.transitions {
        t.from = s(&t.from);
        t.event = e(&t.event);
        t.to = s(&t.to);
    }
    doc.states.reverse();
    doc.events.reverse();
    doc.transitions.reverse();
    doc.to_model().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn k_step_notions_are_monotone(m in model(), k in 1u64..6) {
        for v in [OpacityVariant::Kso, OpacityVariant::Skso] {
            let p = PropertyKind::Opacity(v);
            prop_assert!(!holds(&m, p, Some(k + 1)) || holds(&m, p, Some(k)));
        }
    }

    #[test]
    fn strong_opacity_implies_standard(m in model()) {
        use OpacityVariant::*;
        for (strong, weak, k) in [(Scso, Cso, None), (Siso, Iso, None), (Sinfso, Infso, None), (Skso, Kso, Some(3))] {
            prop_assert!(!holds(&m, PropertyKind::Opacity(strong), k) || holds(&m, PropertyKind::Opacity(weak), k));
        }
        prop_assert!(!holds(&m, PropertyKind::Opacity(Infso), None) || holds(&m, PropertyKind::Opacity(Cso), None));
    }

    #[test]
    fn star_detectability_implies_omega(m in model()) {
        prop_assert!(!holds(&m, PropertyKind::StarSd, None) || holds(&m, PropertyKind::OmegaSd, None));
    }

    #[test]
    fn verdicts_ignore_names_and_order(m in model()) {
        prop_assert_eq!(all_verdicts(&m), all_verdicts(&renamed(&m)));
    }

    #[test]
    fn construction_sizes_are_bounded(m in model()) {
        let n = m.lfsa.num_states();
        prop_assert!(build_observer(&m.lfsa).num_states() <= 1 << n);
        prop_assert!(self_composition(&m.lfsa).num_states() <= n * n);
    }

    #[test]
    fn models_round_trip(m in model()) {
        let text = serialize_model(&m);
        prop_assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn negative_verdicts_are_certified(m in model()) {
        for property in PropertyKind::ALL {
            let k = property.needs_k().then_some(2);
            if let Some(witness) = verify(&m, property, k).unwrap().witness {
                let claim = DefinitionalClaim { instance: PropertyInstance { property, k }, witness };
                let c = validate_witness(&m, &claim).unwrap();
                prop_assert!(c.valid, "{}: {}", property, c.explanation);
            }
        }
    }

    #[test]
    fn generation_is_deterministic(n in 1usize..=6, e in 0usize..=5, seed in any::<u64>()) {
        let p = GeneratorParams::new(n, e, seed);
        prop_assert_eq!(serialize_model(&random_lfsa(&p).unwrap()), serialize_model(&random_lfsa(&p).unwrap()));
    }
}
