//! Strong detectability, diagnosability and predictability via concurrent composition.

use serde::{Deserialize, Serialize};

use crate::automaton::{FaultSpec, Lfsa, StateId, Transition};
use crate::compose::{concurrent_composition, self_composition, ProductAutomaton};
use crate::derive::{faulty_subautomaton, normal_subautomaton};
use crate::graph;
use crate::witness::{
    Detectability, DetectabilityWitness, DiagnosabilityWitness, PredictabilityWitness, Step,
    TaggedCycleWitness, Witness,
};

/// Which inference property a verdict is about.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InferenceProperty {
    StrongDetectability(Detectability),
    Diagnosability,
    Predictability,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InferenceWitness {
    Detectability(DetectabilityWitness),
    Diagnosability(DiagnosabilityWitness),
    Predictability(PredictabilityWitness),
    TaggedCycle(TaggedCycleWitness),
}

impl From<InferenceWitness> for Witness {
    fn from(w: InferenceWitness) -> Witness {
        match w {
            InferenceWitness::Detectability(w) => Witness::Detectability(w),
            InferenceWitness::Diagnosability(w) => Witness::Diagnosability(w),
            InferenceWitness::Predictability(w) => Witness::Predictability(w),
            InferenceWitness::TaggedCycle(w) => Witness::TaggedCycle(w),
        }
    }
}

/// Outcome of an inference check. A witness is present exactly when `holds` is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceVerdict {
    pub property: InferenceProperty,
    pub holds: bool,
    pub witness: Option<InferenceWitness>,
    /// Reachable states of the product the check ran on.
    pub product_states: usize,
}

pub(crate) fn steps(m: &Lfsa, ts: &[Transition]) -> Vec<Step> {
    ts.iter()
        .map(|t| Step {
            event: m.event_name(t.event).to_string(),
            to: m.state_name(t.to).to_string(),
        })
        .collect()
}

/// Component analysis of a product graph: for each SCC, the first internal
/// transition accepted by `active`.
struct Loops {
    comp: Vec<usize>,
    first_active: Vec<Option<usize>>,
}

fn loops(p: &ProductAutomaton, active: impl Fn(usize) -> bool) -> Loops {
    let succ: Vec<Vec<usize>> = p
        .adjacency()
        .iter()
        .map(|edges| edges.iter().map(|&(_, w)| w).collect())
        .collect();
    let c = graph::tarjan(&succ);
    let mut first_active = vec![None; c.count];
    for (i, t) in p.transitions().iter().enumerate() {
        let k = c.comp[t.from];
        if k == c.comp[t.to] && active(i) && first_active[k].is_none() {
            first_active[k] = Some(i);
        }
    }
    Loops {
        comp: c.comp,
        first_active,
    }
}

impl Loops {
    fn active_at(&self, i: usize) -> Option<usize> {
        self.first_active[self.comp[i]]
    }

    /// A loop at `i` through the active edge of its component.
    fn cycle_at(&self, p: &ProductAutomaton, i: usize) -> Vec<usize> {
        let t = self.active_at(i).expect("active component");
        let tr = p.transitions()[t];
        let k = self.comp[i];
        graph::cycle_through_edge(p.adjacency(), i, (tr.from, t, tr.to), |v| self.comp[v] == k)
            .expect("strongly connected")
    }
}

fn reaches_cycle(m: &Lfsa) -> Vec<bool> {
    graph::coreachable(&m.edge_adjacency(), &m.cycle_states())
}

/// Strong detectability (`*` or `ω`) via `CC(S)`.
pub fn check_strong_detectability(model: &Lfsa, variant: Detectability) -> InferenceVerdict {
    let p = self_composition(model);
    let lp = loops(&p, |t| p.transitions()[t].label.is_some());
    let live = reaches_cycle(model);
    let bad: Vec<bool> = (0..p.num_states())
        .map(|i| {
            let (l, r) = p.state(i);
            l != r && (variant == Detectability::Star || live[l.0])
        })
        .collect();
    let co = graph::coreachable(p.adjacency(), &bad);
    let found = (0..p.num_states()).find(|&i| lp.active_at(i).is_some() && co[i]);
    let witness = found.map(|i| {
        let cycle = lp.cycle_at(&p, i);
        let suffix = graph::shortest_path(p.adjacency(), i, |_| true, |v| bad[v])
            .expect("coreachable state");
        let end = suffix.last().map_or(i, |&t| p.transitions()[t].to);
        let (tail_stem, tail_cycle) = match variant {
            Detectability::Star => (None, None),
            Detectability::Omega => {
                let (stem, cyc) = model
                    .lasso_from(p.state(end).0)
                    .expect("left end state reaches a cycle");
                (Some(steps(model, &stem)), Some(steps(model, &cyc)))
            }
        };
        InferenceWitness::Detectability(DetectabilityWitness {
            variant,
            prefix: p.pair_path_to(i),
            cycle: p.pair_steps(&cycle),
            suffix: p.pair_steps(&suffix),
            tail_stem,
            tail_cycle,
            pump: model.num_states() * model.num_states(),
        })
    });
    InferenceVerdict {
        property: InferenceProperty::StrongDetectability(variant),
        holds: witness.is_none(),
        witness,
        product_states: p.num_states(),
    }
}

/// Diagnosability via `CC(S_f, S_n)`.
pub fn check_diagnosability(model: &Lfsa, faults: &FaultSpec) -> InferenceVerdict {
    let f = faulty_subautomaton(model, faults);
    let n = normal_subautomaton(model, faults);
    let p = concurrent_composition(&f.automaton, &n.automaton)
        .expect("sub-automata share the output alphabet");
    let lp = loops(&p, |t| p.transitions()[t].event.left.is_some());
    let targets: Vec<bool> = (0..p.num_states())
        .map(|i| lp.active_at(i).is_some())
        .collect();
    let co = graph::coreachable(p.adjacency(), &targets);
    let found = p.transitions().iter().position(|t| {
        t.event.left.is_some_and(|e| faults.is_faulty(e)) && co[t.to]
    });
    let witness = found.map(|ti| {
        let t = p.transitions()[ti];
        let connector = graph::shortest_path(p.adjacency(), t.to, |_| true, |v| targets[v])
            .expect("coreachable state");
        let w = connector.last().map_or(t.to, |&c| p.transitions()[c].to);
        InferenceWitness::Diagnosability(DiagnosabilityWitness {
            prefix: p.pair_path_to(t.from),
            fault: p.pair_step(ti),
            connector: p.pair_steps(&connector),
            cycle: p.pair_steps(&lp.cycle_at(&p, w)),
            pump: model.num_states() * model.num_states(),
        })
    });
    InferenceVerdict {
        property: InferenceProperty::Diagnosability,
        holds: witness.is_none(),
        witness,
        product_states: p.num_states(),
    }
}

/// Predictability via `CC(S_n, S_n)`.
pub fn check_predictability(model: &Lfsa, faults: &FaultSpec) -> InferenceVerdict {
    let n = normal_subautomaton(model, faults);
    let p = self_composition(&n.automaton);
    let live = reaches_cycle(&n.automaton);
    let fault_from = |q: StateId| {
        model
            .out(n.origin(q))
            .iter()
            .find(|(e, _)| faults.is_faulty(*e))
            .copied()
    };
    let found = (0..p.num_states()).find_map(|i| {
        let (l, r) = p.state(i);
        if !live[r.0] {
            return None;
        }
        fault_from(l).map(|f| (i, f))
    });
    let witness = found.map(|(i, (e, q))| {
        let (stem, cycle) = n
            .automaton
            .lasso_from(p.state(i).1)
            .expect("right end state reaches a cycle");
        InferenceWitness::Predictability(PredictabilityWitness {
            prefix: p.pair_path_to(i),
            fault: Step {
                event: model.event_name(e).to_string(),
                to: model.state_name(q).to_string(),
            },
            stem: steps(&n.automaton, &stem),
            cycle: steps(&n.automaton, &cycle),
            pump: model.num_states() * model.num_states(),
        })
    });
    InferenceVerdict {
        property: InferenceProperty::Predictability,
        holds: witness.is_none(),
        witness,
        product_states: p.num_states(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::witness::PairState;

    fn pair(l: &str, r: &str) -> PairState {
        PairState {
            left: l.into(),
            right: r.into(),
        }
    }

    #[test]
    fn s1_is_strongly_detectable() {
        let m = gallery::s1().lfsa;
        for v in [Detectability::Star, Detectability::Omega] {
            let verdict = check_strong_detectability(&m, v);
            assert!(verdict.holds);
            assert!(verdict.witness.is_none());
        }
    }

    #[test]
    fn s2_is_not_strongly_detectable() {
        let m = gallery::s2().lfsa;
        let v = check_strong_detectability(&m, Detectability::Star);
        let Some(InferenceWitness::Detectability(w)) = v.witness else {
            panic!("expected a detectability witness");
        };
        assert_eq!(w.prefix.end(), &pair("q0", "q0"));
        assert_eq!(w.cycle.len(), 1);
        assert_eq!(w.cycle[0].left.as_deref(), Some("e1"));
        let last = w.suffix.last().unwrap();
        assert_eq!((last.left.as_deref(), last.right.as_deref()), (Some("e3"), Some("e4")));
        assert_eq!(last.to, pair("q1", "q2"));
        let v = check_strong_detectability(&m, Detectability::Omega);
        assert!(!v.holds);
    }

    #[test]
    fn s3_is_neither_diagnosable_nor_predictable() {
        let s3 = gallery::s3();
        let v = check_diagnosability(&s3.lfsa, &s3.faults);
        let Some(InferenceWitness::Diagnosability(w)) = v.witness else {
            panic!("expected a diagnosability witness");
        };
        assert_eq!(w.fault.left.as_deref(), Some("f"));
        assert_eq!(w.fault.right, None);
        assert_eq!(w.cycle.len(), 1);
        assert_eq!(w.cycle[0].left.as_deref(), Some("u"));
        assert_eq!(w.cycle[0].right, None);

        let v = check_predictability(&s3.lfsa, &s3.faults);
        let Some(InferenceWitness::Predictability(w)) = v.witness else {
            panic!("expected a predictability witness");
        };
        assert_eq!(w.prefix.end(), &pair("q3", "q4"));
        let shown: Vec<_> = w.prefix.steps.iter().map(|s| s.to.clone()).collect();
        assert_eq!(shown, [pair("q1", "q2"), pair("q3", "q4")]);
        assert_eq!(w.fault.event, "f");
    }

    #[test]
    fn no_faults_means_diagnosable_and_predictable() {
        let m = gallery::s2().lfsa;
        let none = FaultSpec::default();
        assert!(check_diagnosability(&m, &none).holds);
        assert!(check_predictability(&m, &none).holds);
    }

    #[test]
    fn s6_and_s7() {
        let s6 = gallery::s6();
        assert!(!check_diagnosability(&s6.lfsa, &s6.faults).holds);
        let s7 = gallery::s7();
        assert!(check_diagnosability(&s7.lfsa, &s7.faults).holds);
    }
}
