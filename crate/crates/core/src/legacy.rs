//! Classical diagnosability constructions with fault tags: the twin plant,
//! the Yoo–Lafortune verifier and the generalized twin plant.
//!
//! All three assume `ℓ` is injective on observable events, a single initial
//! state and a single unobservable fault event.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{EventId, Lfsa, StateId, EPSILON};
use crate::graph;
use crate::inference::{InferenceProperty, InferenceVerdict, InferenceWitness};
use crate::witness::TaggedCycleWitness;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaultTag {
    /// No fault yet (twin plant).
    Phi,
    /// No fault yet (verifiers).
    N,
    /// A fault has occurred.
    F,
}

impl fmt::Display for FaultTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultTag::Phi => "φ",
            FaultTag::N => "N",
            FaultTag::F => "F",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegacyMethod {
    TwinPlant,
    YlVerifier,
    GeneralizedTwinPlant,
}

impl LegacyMethod {
    pub fn name(self) -> &'static str {
        match self {
            LegacyMethod::TwinPlant => "twin-plant",
            LegacyMethod::YlVerifier => "yl-verifier",
            LegacyMethod::GeneralizedTwinPlant => "gtp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("exactly one initial state is required, found {0}")]
    InitialStates(usize),
    #[error("observable events `{0}` and `{1}` share a label")]
    SharedLabel(String, String),
    #[error("fault event `{0}` is observable")]
    ObservableFault(String),
    #[error("fault event index {0} is not an event of the model")]
    UnknownFault(usize),
}

/// Checks the scope these methods are defined for and returns the initial state.
pub fn check_scope(model: &Lfsa, fault: EventId) -> Result<StateId, ScopeError> {
    if fault.0 >= model.num_events() {
        return Err(ScopeError::UnknownFault(fault.0));
    }
    if model.is_observable(fault) {
        return Err(ScopeError::ObservableFault(model.event_name(fault).to_string()));
    }
    let mut owner: HashMap<_, EventId> = HashMap::new();
    for e in model.event_ids() {
        if let Some(a) = model.label(e) {
            if let Some(prev) = owner.insert(a, e) {
                return Err(ScopeError::SharedLabel(
                    model.event_name(prev).to_string(),
                    model.event_name(e).to_string(),
                ));
            }
        }
    }
    let init = model.initial();
    if init.len() != 1 {
        return Err(ScopeError::InitialStates(init.len()));
    }
    Ok(init.iter().next().expect("one initial state"))
}

/// `(x₁, l₁, x₂, l₂)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedState {
    pub left: StateId,
    pub left_tag: FaultTag,
    pub right: StateId,
    pub right_tag: FaultTag,
}

/// A tagged-product move; a `None` side stays put.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedMove {
    pub left: Option<EventId>,
    pub right: Option<EventId>,
}

/// Reachable part of a fault-tagged product.
#[derive(Clone, Debug)]
pub struct TaggedProduct {
    pub method: LegacyMethod,
    model: Lfsa,
    states: Vec<TaggedState>,
    index: HashMap<TaggedState, usize>,
    transitions: Vec<(usize, TaggedMove, usize)>,
    out: Vec<Vec<(usize, usize)>>,
    parent: Vec<Option<usize>>,
}

impl TaggedProduct {
    fn explore(
        method: LegacyMethod,
        model: &Lfsa,
        start: TaggedState,
        moves: impl Fn(&TaggedState) -> Vec<(TaggedMove, TaggedState)>,
    ) -> TaggedProduct {
        let mut p = TaggedProduct {
            method,
            model: model.clone(),
            states: vec![start],
            index: HashMap::from([(start, 0)]),
            transitions: Vec::new(),
            out: vec![Vec::new()],
            parent: vec![None],
        };
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (mv, target) in moves(&p.states[v]) {
                let w = match p.index.get(&target) {
                    Some(&w) => w,
                    None => {
                        let w = p.states.len();
                        p.states.push(target);
                        p.index.insert(target, w);
                        p.out.push(Vec::new());
                        p.parent.push(None);
                        queue.push_back(w);
                        w
                    }
                };
                let t = p.transitions.len();
                p.transitions.push((v, mv, w));
                p.out[v].push((t, w));
                if p.parent[w].is_none() && w != 0 {
                    p.parent[w] = Some(t);
                }
            }
        }
        p
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[TaggedState] {
        &self.states
    }

    pub fn transitions(&self) -> &[(usize, TaggedMove, usize)] {
        &self.transitions
    }

    pub fn state_name(&self, i: usize) -> String {
        let s = &self.states[i];
        let (l, r) = (self.model.state_name(s.left), self.model.state_name(s.right));
        match self.method {
            LegacyMethod::TwinPlant => {
                format!("(({l},{}),({r},{}))", s.left_tag, s.right_tag)
            }
            _ => format!("({l},{},{r},{})", s.left_tag, s.right_tag),
        }
    }

    pub fn move_name(&self, mv: &TaggedMove) -> String {
        let side = |e: Option<EventId>| e.map_or(EPSILON, |e| self.model.event_name(e));
        match (self.method, mv.left, mv.right) {
            (LegacyMethod::YlVerifier, Some(a), Some(b)) if a == b => side(Some(a)).to_string(),
            (LegacyMethod::YlVerifier, e, None) | (LegacyMethod::YlVerifier, None, e) => {
                side(e).to_string()
            }
            _ => format!("({},{})", side(mv.left), side(mv.right)),
        }
    }

    /// The product with tags erased: `(x₁, x₂)` pairs and moves, by name.
    pub fn erase_tags(&self) -> ErasedGraph {
        let pair = |s: &TaggedState| {
            (
                self.model.state_name(s.left).to_string(),
                self.model.state_name(s.right).to_string(),
            )
        };
        let mut states: Vec<(String, String)> = self.states.iter().map(pair).collect();
        states.sort();
        states.dedup();
        let side = |e: Option<EventId>| e.map(|e| self.model.event_name(e).to_string());
        let mut edges: Vec<_> = self
            .transitions
            .iter()
            .map(|(v, mv, w)| {
                (
                    pair(&self.states[*v]),
                    (side(mv.left), side(mv.right)),
                    pair(&self.states[*w]),
                )
            })
            .collect();
        edges.sort();
        edges.dedup();
        ErasedGraph { states, edges }
    }

    fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = i;
        while let Some(t) = self.parent[cur] {
            path.push(t);
            cur = self.transitions[t].0;
        }
        path.reverse();
        path
    }

    /// Path to `i` and a cycle through `i` using `edge`, within `allowed`.
    fn cycle_witness(
        &self,
        i: usize,
        edge: (usize, usize, usize),
        allowed: impl Fn(usize) -> bool + Copy,
    ) -> TaggedCycleWitness {
        let cycle = graph::cycle_through_edge(&self.out, i, edge, allowed).expect("cycle");
        let names = |ts: &[usize]| -> Vec<String> {
            ts.iter()
                .map(|&t| {
                    let (_, mv, w) = &self.transitions[t];
                    format!("{} {}", self.move_name(mv), self.state_name(*w))
                })
                .collect()
        };
        let mut path = vec![self.state_name(0)];
        path.extend(names(&self.path_to(i)));
        TaggedCycleWitness {
            method: self.method.name().to_string(),
            path,
            cycle: names(&cycle),
        }
    }

    /// First transition inside `allowed` accepted by `pick`, as `(source, index, target)`.
    fn inner_edge(
        &self,
        allowed: impl Fn(usize) -> bool,
        pick: impl Fn(usize, &TaggedMove) -> bool,
    ) -> Option<(usize, usize, usize)> {
        self.transitions
            .iter()
            .enumerate()
            .find(|(_, (v, mv, w))| allowed(*v) && allowed(*w) && pick(*v, mv))
            .map(|(t, &(v, _, w))| (v, t, w))
    }

    /// Plain automaton view, for export.
    pub fn to_lfsa(&self) -> Lfsa {
        use crate::automaton::Transition;
        let mut names: Vec<String> = self
            .transitions
            .iter()
            .map(|(_, mv, _)| self.move_name(mv))
            .collect();
        names.sort();
        names.dedup();
        let transitions = self
            .transitions
            .iter()
            .map(|(v, mv, w)| Transition {
                from: StateId(*v),
                event: EventId(names.binary_search(&self.move_name(mv)).expect("move")),
                to: StateId(*w),
            })
            .collect();
        let labels = vec![None; names.len()];
        Lfsa::from_parts(
            (0..self.num_states()).map(|i| self.state_name(i)).collect(),
            names,
            self.model.outputs().to_vec(),
            labels,
            transitions,
            std::iter::once(StateId(0)).collect(),
        )
    }
}

/// A tag-free product graph described by names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasedGraph {
    pub states: Vec<(String, String)>,
    #[allow(clippy::type_complexity)]
    pub edges: Vec<((String, String), (Option<String>, Option<String>), (String, String))>,
}

impl ErasedGraph {
    /// Same shape built from a concurrent composition.
    pub fn from_product(p: &crate::compose::ProductAutomaton) -> ErasedGraph {
        let pair = |i: usize| {
            let s = p.pair_state(i);
            (s.left, s.right)
        };
        let mut states: Vec<_> = (0..p.num_states()).map(pair).collect();
        states.sort();
        let mut edges: Vec<_> = p
            .transitions()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let step = p.pair_step(i);
                (pair(t.from), (step.left, step.right), pair(t.to))
            })
            .collect();
        edges.sort();
        edges.dedup();
        ErasedGraph { states, edges }
    }

    /// Whether every state and edge of `self` occurs in `other`.
    pub fn is_subgraph_of(&self, other: &ErasedGraph) -> bool {
        self.states.iter().all(|s| other.states.binary_search(s).is_ok())
            && self.edges.iter().all(|e| other.edges.binary_search(e).is_ok())
    }
}

fn unobservable_out(model: &Lfsa, q: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
    model.out(q).iter().copied().filter(|(e, _)| !model.is_observable(*e))
}

/// `S_φ` successors of `(x, tag)`: `(t, x′, tag′)` for every `x -s t-> x′` with `s`
/// unobservable; the tag is `F` on paths whose `s` contains the fault.
fn phi_successors(model: &Lfsa, fault: EventId, x: StateId, tag: FaultTag) -> Vec<(EventId, StateId, FaultTag)> {
    let mut seen = HashMap::new();
    let start = (x, tag == FaultTag::F);
    seen.insert(start, ());
    let mut stack = vec![start];
    let mut out = Vec::new();
    while let Some((y, faulty)) = stack.pop() {
        for &(e, z) in model.out(y) {
            if model.is_observable(e) {
                out.push((e, z, if faulty { FaultTag::F } else { FaultTag::Phi }));
            } else {
                let next = (z, faulty || e == fault);
                if seen.insert(next, ()).is_none() {
                    stack.push(next);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Verdict for the tag criterion: no cyclic state accepted by `bad`.
fn cyclic_criterion(p: &TaggedProduct, bad: impl Fn(&TaggedState) -> bool) -> Option<InferenceWitness> {
    let succ: Vec<Vec<usize>> = p.out.iter().map(|e| e.iter().map(|&(_, w)| w).collect()).collect();
    let c = graph::tarjan(&succ);
    let mut cyclic = vec![false; c.count];
    for &(v, _, w) in &p.transitions {
        if c.comp[v] == c.comp[w] {
            cyclic[c.comp[v]] = true;
        }
    }
    let i = (0..p.num_states()).find(|&i| cyclic[c.comp[i]] && bad(&p.states[i]))?;
    let k = c.comp[i];
    let allowed = |v: usize| c.comp[v] == k;
    let edge = p.inner_edge(allowed, |v, _| v == i).expect("cyclic component");
    Some(InferenceWitness::TaggedCycle(p.cycle_witness(i, edge, allowed)))
}

fn verdict(witness: Option<InferenceWitness>, p: &TaggedProduct) -> InferenceVerdict {
    InferenceVerdict {
        property: InferenceProperty::Diagnosability,
        holds: witness.is_none(),
        witness,
        product_states: p.num_states(),
    }
}

/// Twin-plant method: diagnosable iff every cycle state carries equal tags.
pub fn check_diag_twin_plant(
    model: &Lfsa,
    fault: EventId,
) -> Result<(InferenceVerdict, TaggedProduct), ScopeError> {
    let x0 = check_scope(model, fault)?;
    let start = TaggedState {
        left: x0,
        left_tag: FaultTag::Phi,
        right: x0,
        right_tag: FaultTag::Phi,
    };
    let p = TaggedProduct::explore(LegacyMethod::TwinPlant, model, start, |s| {
        let left = phi_successors(model, fault, s.left, s.left_tag);
        let right = phi_successors(model, fault, s.right, s.right_tag);
        let mut moves = Vec::new();
        for &(t, x1, l1) in &left {
            for &(u, x2, l2) in &right {
                if t == u {
                    moves.push((
                        TaggedMove {
                            left: Some(t),
                            right: Some(t),
                        },
                        TaggedState {
                            left: x1,
                            left_tag: l1,
                            right: x2,
                            right_tag: l2,
                        },
                    ));
                }
            }
        }
        moves
    });
    let w = cyclic_criterion(&p, |s| s.left_tag != s.right_tag);
    Ok((verdict(w, &p), p))
}

/// Yoo–Lafortune verifier: rules (i)–(vii) from `(x₀,N,x₀,N)`.
pub fn check_diag_yl_verifier(
    model: &Lfsa,
    fault: EventId,
) -> Result<(InferenceVerdict, TaggedProduct), ScopeError> {
    let x0 = check_scope(model, fault)?;
    let start = TaggedState {
        left: x0,
        left_tag: FaultTag::N,
        right: x0,
        right_tag: FaultTag::N,
    };
    let p = TaggedProduct::explore(LegacyMethod::YlVerifier, model, start, |s| {
        let tag = |old: FaultTag, e: EventId| if e == fault { FaultTag::F } else { old };
        let mut moves = Vec::new();
        for &(e, x1) in model.out(s.left) {
            if !model.is_observable(e) {
                moves.push((
                    TaggedMove {
                        left: Some(e),
                        right: None,
                    },
                    TaggedState {
                        left: x1,
                        left_tag: tag(s.left_tag, e),
                        ..*s
                    },
                ));
            }
        }
        for &(e, x2) in model.out(s.right) {
            if !model.is_observable(e) {
                moves.push((
                    TaggedMove {
                        left: None,
                        right: Some(e),
                    },
                    TaggedState {
                        right: x2,
                        right_tag: tag(s.right_tag, e),
                        ..*s
                    },
                ));
            }
        }
        for &(e, x1) in model.out(s.left) {
            for &(g, x2) in model.out(s.right) {
                if e == g {
                    moves.push((
                        TaggedMove {
                            left: Some(e),
                            right: Some(e),
                        },
                        TaggedState {
                            left: x1,
                            left_tag: tag(s.left_tag, e),
                            right: x2,
                            right_tag: tag(s.right_tag, e),
                        },
                    ));
                }
            }
        }
        moves
    });
    let w = cyclic_criterion(&p, |s| s.left_tag != s.right_tag);
    Ok((verdict(w, &p), p))
}

/// Generalized twin plant: rules (a)–(d) from `(x₀,N,x₀,N)`. Not diagnosable iff a
/// reachable cycle of `(−,F,−,N)` states moves its left side at least once.
pub fn check_diag_generalized_twin_plant(
    model: &Lfsa,
    fault: EventId,
) -> Result<(InferenceVerdict, TaggedProduct), ScopeError> {
    let x0 = check_scope(model, fault)?;
    let start = TaggedState {
        left: x0,
        left_tag: FaultTag::N,
        right: x0,
        right_tag: FaultTag::N,
    };
    let p = TaggedProduct::explore(LegacyMethod::GeneralizedTwinPlant, model, start, |s| {
        let mut moves = Vec::new();
        for (e, x1) in unobservable_out(model, s.left) {
            let left_tag = if e == fault { FaultTag::F } else { s.left_tag };
            moves.push((
                TaggedMove {
                    left: Some(e),
                    right: None,
                },
                TaggedState {
                    left: x1,
                    left_tag,
                    ..*s
                },
            ));
        }
        for (e, x2) in unobservable_out(model, s.right) {
            if e != fault {
                moves.push((
                    TaggedMove {
                        left: None,
                        right: Some(e),
                    },
                    TaggedState { right: x2, ..*s },
                ));
            }
        }
        for &(e, x1) in model.out(s.left) {
            if !model.is_observable(e) {
                continue;
            }
            for &(g, x2) in model.out(s.right) {
                if e == g {
                    moves.push((
                        TaggedMove {
                            left: Some(e),
                            right: Some(e),
                        },
                        TaggedState {
                            left: x1,
                            right: x2,
                            ..*s
                        },
                    ));
                }
            }
        }
        moves
    });
    let fn_state = |i: usize| {
        let s = &p.states[i];
        s.left_tag == FaultTag::F && s.right_tag == FaultTag::N
    };
    let adj: Vec<Vec<usize>> = p
        .out
        .iter()
        .enumerate()
        .map(|(v, e)| {
            if !fn_state(v) {
                return Vec::new();
            }
            e.iter().map(|&(_, w)| w).filter(|&w| fn_state(w)).collect()
        })
        .collect();
    let c = graph::tarjan(&adj);
    let mut active = vec![false; c.count];
    for &(v, mv, w) in &p.transitions {
        if fn_state(v) && fn_state(w) && c.comp[v] == c.comp[w] && mv.left.is_some() {
            active[c.comp[v]] = true;
        }
    }
    let witness = (0..p.num_states())
        .find(|&i| fn_state(i) && active[c.comp[i]])
        .map(|i| {
            let k = c.comp[i];
            let allowed = |v: usize| fn_state(v) && c.comp[v] == k;
            let edge = p
                .inner_edge(allowed, |_, mv| mv.left.is_some())
                .expect("active component");
            InferenceWitness::TaggedCycle(p.cycle_witness(i, edge, allowed))
        });
    Ok((verdict(witness, &p), p))
}

/// Runs one of the three methods.
pub fn check_legacy(
    method: LegacyMethod,
    model: &Lfsa,
    fault: EventId,
) -> Result<(InferenceVerdict, TaggedProduct), ScopeError> {
    match method {
        LegacyMethod::TwinPlant => check_diag_twin_plant(model, fault),
        LegacyMethod::YlVerifier => check_diag_yl_verifier(model, fault),
        LegacyMethod::GeneralizedTwinPlant => check_diag_generalized_twin_plant(model, fault),
    }
}
