//! Automata derived from a model: observer, epsilonized plant and the
//! fault and secret sub-automata.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{
    FaultSpec, LabelId, Lfsa, SecretSpec, StateId, StateSet, Transition, EPSILON_EVENT,
};

/// The plant `S_ε`: events renamed to their labels plus the reserved `ε̂`.
pub type EpsilonPlant = Lfsa;

/// Deterministic observer over `2^Q`, built from `UR(Q₀)` by lazy subset construction.
///
/// The base model is retained, so [`ObserverAutomaton::step`] also works on
/// subsets that were never reached from the initial state.
#[derive(Clone, Debug)]
pub struct ObserverAutomaton {
    base: Lfsa,
    alphabet: Vec<LabelId>,
    states: Vec<StateSet>,
    index: HashMap<StateSet, usize>,
    delta: Vec<Vec<usize>>,
}

impl ObserverAutomaton {
    pub fn base(&self) -> &Lfsa {
        &self.base
    }

    /// `ℓ(E_o)` of the base model, in output-alphabet order.
    pub fn alphabet(&self) -> &[LabelId] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Reachable observer states in discovery order; index 0 is the initial state.
    pub fn states(&self) -> &[StateSet] {
        &self.states
    }

    pub fn initial(&self) -> &StateSet {
        &self.states[0]
    }

    pub fn find(&self, x: &StateSet) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Observer transitions `(source, label, target)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, LabelId, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(pos, &j)| (i, self.alphabet[pos], j))
        })
    }

    /// `δ_obs(x, a)` for any subset `x`.
    pub fn step(&self, x: &StateSet, a: LabelId) -> StateSet {
        if let (Some(i), Ok(pos)) = (self.find(x), self.alphabet.binary_search(&a)) {
            return self.states[self.delta[i][pos]].clone();
        }
        self.base.estimate_step(x, a)
    }

    pub fn format_state(&self, i: usize) -> String {
        self.base.format_set(&self.states[i])
    }
}

/// Reachable part of the observer of `model`.
pub fn build_observer(model: &Lfsa) -> ObserverAutomaton {
    let alphabet = model.observable_labels();
    let start = model.unobservable_reach(model.initial());
    let mut states = vec![start.clone()];
    let mut index = HashMap::from([(start, 0)]);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(alphabet.len());
        for &a in &alphabet {
            let y = model.estimate_step(&states[i], a);
            let j = match index.get(&y) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(y.clone(), j);
                    states.push(y);
                    queue.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        debug_assert_eq!(delta.len(), i);
        delta.push(row);
    }
    ObserverAutomaton {
        base: model.clone(),
        alphabet,
        states,
        index,
        delta,
    }
}

fn plant_events(model: &Lfsa, alphabet: &[LabelId]) -> (Vec<String>, Vec<Option<LabelId>>) {
    let mut names: Vec<String> = alphabet
        .iter()
        .map(|&a| model.output_name(a).to_string())
        .collect();
    names.push(EPSILON_EVENT.to_string());
    let mut labels: Vec<Option<LabelId>> = alphabet.iter().map(|&a| Some(a)).collect();
    labels.push(None);
    (names, labels)
}

/// `S_ε`: each event is replaced by its label, unobservable ones by `ε̂`.
pub fn epsilonize(model: &Lfsa) -> EpsilonPlant {
    let alphabet = model.observable_labels();
    let (events, labels) = plant_events(model, &alphabet);
    let eps = crate::automaton::EventId(alphabet.len());
    let transitions = model
        .transitions()
        .iter()
        .map(|t| {
            let event = match model.label(t.event) {
                Some(a) => crate::automaton::EventId(
                    alphabet.binary_search(&a).expect("label of an observable event"),
                ),
                None => eps,
            };
            Transition { event, ..*t }
        })
        .collect();
    Lfsa::from_parts(
        model.state_names().to_vec(),
        events,
        model.outputs().to_vec(),
        labels,
        transitions,
        model.initial().clone(),
    )
}

/// `S_obs^ε`: the observer as an automaton over the plant's event set.
pub fn lift_observer(obs: &ObserverAutomaton) -> Lfsa {
    let base = obs.base();
    let (events, labels) = plant_events(base, obs.alphabet());
    let states = (0..obs.num_states()).map(|i| obs.format_state(i)).collect();
    let transitions = obs
        .edges()
        .map(|(i, a, j)| Transition {
            from: StateId(i),
            event: crate::automaton::EventId(
                obs.alphabet().binary_search(&a).expect("observer label"),
            ),
            to: StateId(j),
        })
        .collect();
    Lfsa::from_parts(
        states,
        events,
        base.outputs().to_vec(),
        labels,
        transitions,
        StateSet::singleton(StateId(0)),
    )
}

/// A sub-automaton along with which original transitions survived.
///
/// The sub-automaton keeps the event set, labels and output alphabet of the
/// original; its states are renumbered, `state_origin` maps them back.
#[derive(Clone, Debug)]
pub struct SubautomatonReport {
    pub automaton: Lfsa,
    pub kept: Vec<Transition>,
    pub dropped: Vec<Transition>,
    pub state_origin: Vec<StateId>,
}

impl SubautomatonReport {
    pub fn origin(&self, q: StateId) -> StateId {
        self.state_origin[q.0]
    }

    pub fn local(&self, original: StateId) -> Option<StateId> {
        self.state_origin
            .binary_search(&original)
            .ok()
            .map(StateId)
    }

    /// Maps a set of sub-automaton states to original states.
    pub fn lift_set(&self, x: &StateSet) -> StateSet {
        x.iter().map(|q| self.origin(q)).collect()
    }
}

fn restrict(model: &Lfsa, states: &StateSet, kept: Vec<Transition>) -> SubautomatonReport {
    let state_origin: Vec<StateId> = states.iter().collect();
    let local = |q: StateId| StateId(state_origin.binary_search(&q).expect("kept state"));
    let transitions = kept
        .iter()
        .map(|t| Transition {
            from: local(t.from),
            event: t.event,
            to: local(t.to),
        })
        .collect();
    let initial = model.initial().intersection(states).iter().map(local).collect();
    let dropped = model
        .transitions()
        .iter()
        .filter(|t| kept.binary_search(t).is_err())
        .copied()
        .collect();
    let automaton = Lfsa::from_parts(
        state_origin
            .iter()
            .map(|&q| model.state_name(q).to_string())
            .collect(),
        model.event_names().to_vec(),
        model.outputs().to_vec(),
        model.label_of_slice().to_vec(),
        transitions,
        initial,
    );
    SubautomatonReport {
        automaton,
        kept,
        dropped,
        state_origin,
    }
}

/// `S_f`: faulty transitions with all their predecessor and successor transitions.
pub fn faulty_subautomaton(model: &Lfsa, faults: &FaultSpec) -> SubautomatonReport {
    let reach: Vec<StateSet> = model
        .state_ids()
        .map(|q| model.reachable(&StateSet::singleton(q), true))
        .collect();
    let faulty: Vec<&Transition> = model
        .transitions()
        .iter()
        .filter(|t| faults.is_faulty(t.event))
        .collect();
    let kept: Vec<Transition> = model
        .transitions()
        .iter()
        .filter(|t| {
            faulty.iter().any(|f| {
                *t == *f || reach[t.to.0].contains(f.from) || reach[f.to.0].contains(t.from)
            })
        })
        .copied()
        .collect();
    let states = kept.iter().flat_map(|t| [t.from, t.to]).collect();
    restrict(model, &states, kept)
}

/// `S_n`: faulty transitions removed, then trimmed to the accessible part.
pub fn normal_subautomaton(model: &Lfsa, faults: &FaultSpec) -> SubautomatonReport {
    accessible_restriction(model, |t| !faults.is_faulty(t.event), |_| true)
}

/// `S_dss`: secret states removed, then trimmed to the accessible part.
pub fn delete_secret(model: &Lfsa, secrets: &SecretSpec) -> SubautomatonReport {
    let open = |q: StateId| !secrets.is_secret(q);
    accessible_restriction(model, |t| open(t.from) && open(t.to), open)
}

fn accessible_restriction(
    model: &Lfsa,
    keep_transition: impl Fn(&Transition) -> bool,
    keep_state: impl Fn(StateId) -> bool,
) -> SubautomatonReport {
    let mut seen = vec![false; model.num_states()];
    let mut queue: VecDeque<StateId> = model.initial().iter().filter(|&q| keep_state(q)).collect();
    for &q in &queue {
        seen[q.0] = true;
    }
    while let Some(q) = queue.pop_front() {
        for &(event, to) in model.out(q) {
            let t = Transition { from: q, event, to };
            if keep_transition(&t) && !seen[to.0] {
                seen[to.0] = true;
                queue.push_back(to);
            }
        }
    }
    let states: StateSet = model.state_ids().filter(|q| seen[q.0]).collect();
    let kept = model
        .transitions()
        .iter()
        .filter(|t| seen[t.from.0] && keep_transition(t))
        .copied()
        .collect();
    restrict(model, &states, kept)
}
