//! Concurrent composition and observer-product exploration.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{EventId, LabelId, Lfsa, StateId, StateSet, Transition, EPSILON};
use crate::derive::ObserverAutomaton;
use crate::witness::{EstimateState, EstimateStep, PairPath, PairState, PairStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("operands do not share an output alphabet ({left:?} vs {right:?})")]
    AlphabetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
}

/// Event of a product: `(e, e′)`, `(e, ε)` or `(ε, e′)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductEvent {
    pub left: Option<EventId>,
    pub right: Option<EventId>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Both sides move on equally labeled observable events.
    Synchronous,
    /// Only the left side moves, on an unobservable event.
    Left,
    /// Only the right side moves, on an unobservable event.
    Right,
}

impl ProductEvent {
    pub fn kind(&self) -> EventKind {
        match (self.left, self.right) {
            (Some(_), Some(_)) => EventKind::Synchronous,
            (Some(_), None) => EventKind::Left,
            _ => EventKind::Right,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ProductTransition {
    pub from: usize,
    pub event: ProductEvent,
    /// Label of the product event, `None` when only one side moves.
    pub label: Option<LabelId>,
    pub to: usize,
}

/// Reachable part of `CC(A, B)`.
#[derive(Clone, Debug)]
pub struct ProductAutomaton {
    left: Lfsa,
    right: Lfsa,
    states: Vec<(StateId, StateId)>,
    index: HashMap<(StateId, StateId), usize>,
    transitions: Vec<ProductTransition>,
    out: Vec<Vec<(usize, usize)>>,
    initial: Vec<usize>,
    parent: Vec<Option<usize>>,
}

/// `CC(A, B)` restricted to the part reachable from `Q₀₁ × Q₀₂`.
pub fn concurrent_composition(a: &Lfsa, b: &Lfsa) -> Result<ProductAutomaton, ComposeError> {
    let seeds: Vec<(StateId, StateId)> = a
        .initial()
        .iter()
        .flat_map(|l| b.initial().iter().map(move |r| (l, r)))
        .collect();
    compose_from(a, b, &seeds)
}

/// `CC(A, A)`.
pub fn self_composition(a: &Lfsa) -> ProductAutomaton {
    concurrent_composition(a, a).expect("an automaton shares its own alphabet")
}

/// `CC(A, B)` restricted to the part reachable from `seeds`.
pub fn compose_from(
    a: &Lfsa,
    b: &Lfsa,
    seeds: &[(StateId, StateId)],
) -> Result<ProductAutomaton, ComposeError> {
    if a.outputs() != b.outputs() {
        return Err(ComposeError::AlphabetMismatch {
            left: a.outputs().to_vec(),
            right: b.outputs().to_vec(),
        });
    }
    let mut p = ProductAutomaton {
        left: a.clone(),
        right: b.clone(),
        states: Vec::new(),
        index: HashMap::new(),
        transitions: Vec::new(),
        out: Vec::new(),
        initial: Vec::new(),
        parent: Vec::new(),
    };
    let mut queue = VecDeque::new();
    for &s in seeds {
        let (i, fresh) = p.intern(s);
        if fresh {
            p.initial.push(i);
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        let (l, r) = p.states[v];
        let mut moves: Vec<(ProductEvent, Option<LabelId>, (StateId, StateId))> = Vec::new();
        for &(e, l2) in a.out(l) {
            match a.label(e) {
                Some(lab) => {
                    for &(f, r2) in b.out(r) {
                        if b.label(f) == Some(lab) {
                            moves.push((
                                ProductEvent {
                                    left: Some(e),
                                    right: Some(f),
                                },
                                Some(lab),
                                (l2, r2),
                            ));
                        }
                    }
                }
                None => moves.push((
                    ProductEvent {
                        left: Some(e),
                        right: None,
                    },
                    None,
                    (l2, r),
                )),
            }
        }
        for &(f, r2) in b.out(r) {
            if !b.is_observable(f) {
                moves.push((
                    ProductEvent {
                        left: None,
                        right: Some(f),
                    },
                    None,
                    (l, r2),
                ));
            }
        }
        for (event, label, target) in moves {
            let (w, fresh) = p.intern(target);
            let t = p.transitions.len();
            p.transitions.push(ProductTransition {
                from: v,
                event,
                label,
                to: w,
            });
            p.out[v].push((t, w));
            if fresh {
                p.parent[w] = Some(t);
                queue.push_back(w);
            }
        }
    }
    Ok(p)
}

impl ProductAutomaton {
    fn intern(&mut self, s: (StateId, StateId)) -> (usize, bool) {
        if let Some(&i) = self.index.get(&s) {
            return (i, false);
        }
        let i = self.states.len();
        self.states.push(s);
        self.index.insert(s, i);
        self.out.push(Vec::new());
        self.parent.push(None);
        (i, true)
    }

    pub fn left(&self) -> &Lfsa {
        &self.left
    }

    pub fn right(&self) -> &Lfsa {
        &self.right
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> (StateId, StateId) {
        self.states[i]
    }

    pub fn find(&self, l: StateId, r: StateId) -> Option<usize> {
        self.index.get(&(l, r)).copied()
    }

    /// Finds a state by component names.
    pub fn find_named(&self, l: &str, r: &str) -> Option<usize> {
        self.find(self.left.state_id(l)?, self.right.state_id(r)?)
    }

    pub fn transitions(&self) -> &[ProductTransition] {
        &self.transitions
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    /// `(transition, target)` pairs per state.
    pub fn adjacency(&self) -> &[Vec<(usize, usize)>] {
        &self.out
    }

    /// Transitions from a product initial state to `i` along the BFS tree.
    pub fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = i;
        while let Some(t) = self.parent[cur] {
            path.push(t);
            cur = self.transitions[t].from;
        }
        path.reverse();
        path
    }

    /// Root of the BFS tree containing `i`.
    pub fn root_of(&self, i: usize) -> usize {
        let mut cur = i;
        while let Some(t) = self.parent[cur] {
            cur = self.transitions[t].from;
        }
        cur
    }

    pub fn state_name(&self, i: usize) -> String {
        let (l, r) = self.states[i];
        format!(
            "({},{})",
            self.left.state_name(l),
            self.right.state_name(r)
        )
    }

    pub fn event_name(&self, ev: &ProductEvent) -> String {
        let side = |m: &Lfsa, e: Option<EventId>| e.map_or(EPSILON, |e| m.event_name(e)).to_string();
        format!(
            "({},{})",
            side(&self.left, ev.left),
            side(&self.right, ev.right)
        )
    }

    pub fn pair_state(&self, i: usize) -> PairState {
        let (l, r) = self.states[i];
        PairState {
            left: self.left.state_name(l).to_string(),
            right: self.right.state_name(r).to_string(),
        }
    }

    pub fn pair_step(&self, t: usize) -> PairStep {
        let tr = &self.transitions[t];
        PairStep {
            left: tr.event.left.map(|e| self.left.event_name(e).to_string()),
            right: tr.event.right.map(|e| self.right.event_name(e).to_string()),
            to: self.pair_state(tr.to),
        }
    }

    pub fn pair_steps(&self, ts: &[usize]) -> Vec<PairStep> {
        ts.iter().map(|&t| self.pair_step(t)).collect()
    }

    /// Named path from an initial state to `i`.
    pub fn pair_path_to(&self, i: usize) -> PairPath {
        PairPath {
            start: self.pair_state(self.root_of(i)),
            steps: self.pair_steps(&self.path_to(i)),
        }
    }

    /// The product as a plain automaton with composite names.
    pub fn to_lfsa(&self) -> Lfsa {
        let states = (0..self.num_states()).map(|i| self.state_name(i)).collect();
        let mut events: Vec<ProductEvent> = self.transitions.iter().map(|t| t.event).collect();
        events.sort();
        events.dedup();
        let labels = events
            .iter()
            .map(|ev| match (ev.left, ev.right) {
                (Some(e), Some(_)) => self.left.label(e),
                _ => None,
            })
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                from: StateId(t.from),
                event: EventId(events.binary_search(&t.event).expect("product event")),
                to: StateId(t.to),
            })
            .collect();
        let names = events.iter().map(|ev| self.event_name(ev)).collect();
        Lfsa::from_parts(
            states,
            names,
            self.left.outputs().to_vec(),
            labels,
            transitions,
            self.initial.iter().map(|&i| StateId(i)).collect(),
        )
    }
}

/// Reachable part of `CC(S_ε, S_obs^ε)` from chosen seeds, explored lazily.
///
/// Observer states are stepped on demand, so seeds may carry estimates that
/// the observer never reaches from its own initial state. `depth` counts
/// observable steps from the nearest seed.
#[derive(Clone, Debug)]
pub struct ObserverProduct {
    states: Vec<(StateId, StateSet)>,
    index: HashMap<(StateId, StateSet), usize>,
    depth: Vec<usize>,
    parent: Vec<Option<(usize, Option<LabelId>)>>,
    edges: Vec<(usize, Option<LabelId>, usize)>,
    seeds: Vec<usize>,
}

/// Explores `CC(plant, observer)` from `seeds`. Observable moves are not taken
/// from states already `cap` observable steps deep.
pub fn explore_observer_product(
    plant: &Lfsa,
    observer: &ObserverAutomaton,
    seeds: &[(StateId, StateSet)],
    cap: Option<usize>,
) -> ObserverProduct {
    const FAR: usize = usize::MAX;
    let mut p = ObserverProduct {
        states: Vec::new(),
        index: HashMap::new(),
        depth: Vec::new(),
        parent: Vec::new(),
        edges: Vec::new(),
        seeds: Vec::new(),
    };
    let mut done: Vec<bool> = Vec::new();
    let mut queue = VecDeque::new();
    let mut memo: HashMap<(StateSet, LabelId), StateSet> = HashMap::new();
    let intern = |p: &mut ObserverProduct, done: &mut Vec<bool>, s: (StateId, StateSet)| {
        if let Some(&i) = p.index.get(&s) {
            return i;
        }
        let i = p.states.len();
        p.index.insert(s.clone(), i);
        p.states.push(s);
        p.depth.push(FAR);
        p.parent.push(None);
        done.push(false);
        i
    };
    for s in seeds {
        let i = intern(&mut p, &mut done, s.clone());
        if p.depth[i] != 0 {
            p.depth[i] = 0;
            p.seeds.push(i);
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        if done[v] {
            continue;
        }
        done[v] = true;
        let (q, x) = p.states[v].clone();
        let dv = p.depth[v];
        for &(e, q2) in plant.out(q) {
            let (label, target, weight) = match plant.label(e) {
                None => (None, (q2, x.clone()), 0),
                Some(a) => {
                    if cap.is_some_and(|c| dv >= c) {
                        continue;
                    }
                    let y = memo
                        .entry((x.clone(), a))
                        .or_insert_with(|| observer.step(&x, a))
                        .clone();
                    (Some(a), (q2, y), 1)
                }
            };
            let w = intern(&mut p, &mut done, target);
            p.edges.push((v, label, w));
            if dv + weight < p.depth[w] {
                p.depth[w] = dv + weight;
                p.parent[w] = Some((v, label));
                if weight == 0 {
                    queue.push_front(w);
                } else {
                    queue.push_back(w);
                }
            }
        }
    }
    p
}

/// States of `CC(plant, observer)` reachable from `seed`, with their observable depth.
pub fn seeded_product_reach(
    plant: &Lfsa,
    observer: &ObserverAutomaton,
    seed: (StateId, StateSet),
    cap: Option<usize>,
) -> Vec<((StateId, StateSet), usize)> {
    let p = explore_observer_product(plant, observer, &[seed], cap);
    p.states.into_iter().zip(p.depth).collect()
}

impl ObserverProduct {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &(StateId, StateSet) {
        &self.states[i]
    }

    pub fn states(&self) -> &[(StateId, StateSet)] {
        &self.states
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn find(&self, q: StateId, x: &StateSet) -> Option<usize> {
        self.index.get(&(q, x.clone())).copied()
    }

    pub fn edges(&self) -> &[(usize, Option<LabelId>, usize)] {
        &self.edges
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// States in order of observable depth, ties by discovery order.
    pub fn by_depth(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.states.len()).collect();
        order.sort_by_key(|&i| self.depth[i]);
        order
    }

    /// The seed a state was reached from, and the moves from it.
    pub fn trace_to(&self, i: usize) -> (usize, Vec<(Option<LabelId>, usize)>) {
        let mut moves = Vec::new();
        let mut cur = i;
        while let Some((prev, label)) = self.parent[cur] {
            moves.push((label, cur));
            cur = prev;
        }
        moves.reverse();
        (cur, moves)
    }

    /// Named form of a product state. `plant` names the left side, `observer`
    /// the right side.
    pub fn estimate_state(&self, i: usize, plant: &Lfsa, observer: &ObserverAutomaton) -> EstimateState {
        let (q, x) = &self.states[i];
        EstimateState {
            state: plant.state_name(*q).to_string(),
            estimate: x
                .iter()
                .map(|r| observer.base().state_name(r).to_string())
                .collect(),
        }
    }

    pub fn estimate_trace(
        &self,
        i: usize,
        plant: &Lfsa,
        observer: &ObserverAutomaton,
    ) -> (EstimateState, Vec<EstimateStep>) {
        let (seed, moves) = self.trace_to(i);
        let steps = moves
            .into_iter()
            .map(|(label, j)| EstimateStep {
                label: label.map(|a| plant.output_name(a).to_string()),
                to: self.estimate_state(j, plant, observer),
            })
            .collect();
        (self.estimate_state(seed, plant, observer), steps)
    }

    /// The product as a plain automaton with composite names.
    pub fn to_lfsa(&self, plant: &Lfsa, observer: &ObserverAutomaton) -> Lfsa {
        let alphabet = observer.alphabet();
        let mut events: Vec<String> = alphabet
            .iter()
            .map(|&a| {
                let n = plant.output_name(a);
                format!("({n},{n})")
            })
            .collect();
        events.push(format!("({},{EPSILON})", crate::automaton::EPSILON_EVENT));
        let mut labels: Vec<Option<LabelId>> = alphabet.iter().map(|&a| Some(a)).collect();
        labels.push(None);
        let states = self
            .states
            .iter()
            .map(|(q, x)| format!("({},{})", plant.state_name(*q), observer.base().format_set(x)))
            .collect();
        let transitions = self
            .edges
            .iter()
            .map(|&(v, label, w)| Transition {
                from: StateId(v),
                event: EventId(match label {
                    Some(a) => alphabet.binary_search(&a).expect("observer label"),
                    None => alphabet.len(),
                }),
                to: StateId(w),
            })
            .collect();
        Lfsa::from_parts(
            states,
            events,
            plant.outputs().to_vec(),
            labels,
            transitions,
            self.seeds.iter().map(|&i| StateId(i)).collect(),
        )
    }
}
