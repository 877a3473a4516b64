//! Labeled finite-state automata and the graph primitives every verifier builds on.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph;

/// Reserved event name used by the epsilonized plant for unobservable moves.
pub const EPSILON_EVENT: &str = "ε̂";
/// Display token for the empty label.
pub const EPSILON: &str = "ε";

macro_rules! index_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_type!(
    /// Index of a state within its automaton.
    StateId
);
index_type!(
    /// Index of an event within its automaton.
    EventId
);
index_type!(
    /// Index of an output symbol.
    LabelId
);

/// A sorted, duplicate-free set of states. Used as estimate and observer state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn singleton(q: StateId) -> Self {
        StateSet(vec![q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    /// Inserts `q`; returns whether it was new.
    pub fn insert(&mut self, q: StateId) -> bool {
        match self.0.binary_search(&q) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, q);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.filter(|q| other.contains(q))
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.filter(|q| !other.contains(q))
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.iter().all(|q| other.contains(q))
    }

    pub fn filter(&self, keep: impl Fn(StateId) -> bool) -> StateSet {
        StateSet(self.iter().filter(|&q| keep(q)).collect())
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

/// A single transition `(from, event, to)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub event: EventId,
    pub to: StateId,
}

/// Errors raised while validating a model description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} identifier `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("invalid {kind} identifier `{id}`: {reason}")]
    InvalidIdentifier {
        kind: &'static str,
        id: String,
        reason: &'static str,
    },
    #[error("{context} references undeclared state `{state}`")]
    UndeclaredState { state: String, context: String },
    #[error("{context} references undeclared event `{event}`")]
    UndeclaredEvent { event: String, context: String },
    #[error("event `{event}` carries label `{label}` which is not a declared output symbol")]
    UnknownLabel { event: String, label: String },
    #[error("`{0}` is not a declared output symbol")]
    UndeclaredLabel(String),
}

/// An unvalidated model description, referring to everything by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawLfsa {
    pub states: Vec<String>,
    pub events: Vec<(String, Option<String>)>,
    pub outputs: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub initial: Vec<String>,
}

impl RawLfsa {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(mut self, id: &str) -> Self {
        self.states.push(id.to_string());
        self
    }

    pub fn states<'a>(mut self, ids: impl IntoIterator<Item = &'a str>) -> Self {
        self.states.extend(ids.into_iter().map(str::to_string));
        self
    }

    pub fn event(mut self, id: &str, label: Option<&str>) -> Self {
        self.events.push((id.to_string(), label.map(str::to_string)));
        self
    }

    pub fn output(mut self, symbol: &str) -> Self {
        self.outputs.push(symbol.to_string());
        self
    }

    pub fn transition(mut self, from: &str, event: &str, to: &str) -> Self {
        self.transitions
            .push((from.to_string(), event.to_string(), to.to_string()));
        self
    }

    pub fn initial(mut self, id: &str) -> Self {
        self.initial.push(id.to_string());
        self
    }

    /// Appends every event label missing from the output alphabet, in first-use order.
    pub fn derive_outputs(mut self) -> Self {
        for (_, label) in &self.events {
            if let Some(l) = label {
                if !self.outputs.contains(l) {
                    self.outputs.push(l.clone());
                }
            }
        }
        self
    }
}

fn check_identifier(kind: &'static str, id: &str) -> Result<(), ModelError> {
    let bad = |reason| {
        Err(ModelError::InvalidIdentifier {
            kind,
            id: id.to_string(),
            reason,
        })
    };
    if id.is_empty() {
        return bad("identifiers must be non-empty");
    }
    if id == EPSILON_EVENT || id == EPSILON {
        return bad("the identifier is reserved");
    }
    if id
        .chars()
        .any(|c| c.is_whitespace() || c.is_control() || "(){},\"\\".contains(c))
    {
        return bad("whitespace, control characters, quotes, backslashes, parentheses, braces and commas are not allowed");
    }
    Ok(())
}

/// Strongly connected component of a model's transition graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub states: Vec<StateId>,
    /// Contains at least one transition, so a cycle exists inside it.
    pub cyclic: bool,
    /// Contains an observable transition between two of its states.
    pub observable_cycle: bool,
}

/// Partition of the states into SCCs, ordered by smallest member.
#[derive(Clone, Debug)]
pub struct SccPartition {
    pub components: Vec<Component>,
    pub index: Vec<usize>,
}

impl SccPartition {
    pub fn component_of(&self, q: StateId) -> &Component {
        &self.components[self.index[q.0]]
    }
}

/// A labeled finite-state automaton `(Q, E, δ, Q₀, Σ, ℓ)`.
#[derive(Clone, Debug)]
pub struct Lfsa {
    states: Vec<String>,
    events: Vec<String>,
    outputs: Vec<String>,
    label_of: Vec<Option<LabelId>>,
    transitions: Vec<Transition>,
    initial: StateSet,
    out: Vec<Vec<(EventId, StateId)>>,
    state_index: HashMap<String, StateId>,
    event_index: HashMap<String, EventId>,
    output_index: HashMap<String, LabelId>,
}

impl PartialEq for Lfsa {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
            && self.events == other.events
            && self.outputs == other.outputs
            && self.label_of == other.label_of
            && self.transitions == other.transitions
            && self.initial == other.initial
    }
}

impl Eq for Lfsa {}

impl Lfsa {
    /// Checks a raw description and builds the automaton.
    pub fn validate(raw: RawLfsa) -> Result<Lfsa, ModelError> {
        let mut state_index = HashMap::new();
        for (i, s) in raw.states.iter().enumerate() {
            check_identifier("state", s)?;
            if state_index.insert(s.clone(), StateId(i)).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "state",
                    id: s.clone(),
                });
            }
        }
        let mut output_index = HashMap::new();
        for (i, o) in raw.outputs.iter().enumerate() {
            check_identifier("output", o)?;
            if output_index.insert(o.clone(), LabelId(i)).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "output",
                    id: o.clone(),
                });
            }
        }
        let mut event_index = HashMap::new();
        let mut label_of = Vec::with_capacity(raw.events.len());
        for (i, (e, label)) in raw.events.iter().enumerate() {
            check_identifier("event", e)?;
            if event_index.insert(e.clone(), EventId(i)).is_some() {
                return Err(ModelError::Duplicate {
                    kind: "event",
                    id: e.clone(),
                });
            }
            label_of.push(match label {
                None => None,
                Some(l) => Some(*output_index.get(l).ok_or_else(|| ModelError::UnknownLabel {
                    event: e.clone(),
                    label: l.clone(),
                })?),
            });
        }
        let state = |name: &String, context: String| {
            state_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UndeclaredState {
                    state: name.clone(),
                    context,
                })
        };
        let mut transitions = Vec::with_capacity(raw.transitions.len());
        for (i, (from, event, to)) in raw.transitions.iter().enumerate() {
            let context = format!("transition #{i} ({from}, {event}, {to})");
            let from = state(from, context.clone())?;
            let to = state(to, context.clone())?;
            let event = event_index
                .get(event)
                .copied()
                .ok_or_else(|| ModelError::UndeclaredEvent {
                    event: event.clone(),
                    context,
                })?;
            transitions.push(Transition { from, event, to });
        }
        let initial = raw
            .initial
            .iter()
            .map(|q| state(q, "initial state list".to_string()))
            .collect::<Result<StateSet, _>>()?;
        Ok(Self::from_parts(
            raw.states,
            raw.events.into_iter().map(|(e, _)| e).collect(),
            raw.outputs,
            label_of,
            transitions,
            initial,
        ))
    }

    /// Builds an automaton from already consistent parts. Names are not checked,
    /// which lets derived automata use composite state names.
    pub(crate) fn from_parts(
        states: Vec<String>,
        events: Vec<String>,
        outputs: Vec<String>,
        label_of: Vec<Option<LabelId>>,
        mut transitions: Vec<Transition>,
        initial: StateSet,
    ) -> Lfsa {
        debug_assert_eq!(events.len(), label_of.len());
        transitions.sort_unstable_by_key(|t| (t.from, t.event, t.to));
        transitions.dedup();
        let mut out = vec![Vec::new(); states.len()];
        for t in &transitions {
            out[t.from.0].push((t.event, t.to));
        }
        let state_index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), StateId(i)))
            .collect();
        let event_index = events
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), EventId(i)))
            .collect();
        let output_index = outputs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), LabelId(i)))
            .collect();
        Lfsa {
            states,
            events,
            outputs,
            label_of,
            transitions,
            initial,
            out,
            state_index,
            event_index,
            output_index,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> {
        (0..self.events.len()).map(EventId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.0]
    }

    pub fn output_name(&self, a: LabelId) -> &str {
        &self.outputs[a.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn event_names(&self) -> &[String] {
        &self.events
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    pub fn label_id(&self, symbol: &str) -> Option<LabelId> {
        self.output_index.get(symbol).copied()
    }

    /// The label of `e`, or `None` for ε.
    pub fn label(&self, e: EventId) -> Option<LabelId> {
        self.label_of[e.0]
    }

    /// Display form of an event label.
    pub fn label_text(&self, e: EventId) -> &str {
        self.label(e).map_or(EPSILON, |a| self.output_name(a))
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.label_of[e.0].is_some()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing `(event, target)` pairs of `q`, sorted.
    pub fn out(&self, q: StateId) -> &[(EventId, StateId)] {
        &self.out[q.0]
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    /// `ℓ(E_o)` in output-alphabet order.
    pub fn observable_labels(&self) -> Vec<LabelId> {
        let mut used = vec![false; self.outputs.len()];
        for a in self.label_of.iter().flatten() {
            used[a.0] = true;
        }
        (0..self.outputs.len())
            .filter(|&i| used[i])
            .map(LabelId)
            .collect()
    }

    /// Resolves a sequence of output symbols.
    pub fn observation(&self, symbols: &[&str]) -> Result<Vec<LabelId>, ModelError> {
        symbols
            .iter()
            .map(|s| {
                self.label_id(s)
                    .ok_or_else(|| ModelError::UndeclaredLabel(s.to_string()))
            })
            .collect()
    }

    /// Resolves state names into a set.
    pub fn state_set<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<StateSet, ModelError> {
        names
            .into_iter()
            .map(|n| {
                self.state_id(n).ok_or_else(|| ModelError::UndeclaredState {
                    state: n.to_string(),
                    context: "state set".to_string(),
                })
            })
            .collect()
    }

    pub fn format_set(&self, x: &StateSet) -> String {
        if x.is_empty() {
            return "∅".to_string();
        }
        let names: Vec<&str> = x.iter().map(|q| self.state_name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// `UR(x)`: states reachable from `x` through unobservable transitions, `x` included.
    pub fn unobservable_reach(&self, x: &StateSet) -> StateSet {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = x.iter().collect();
        for q in x.iter() {
            seen[q.0] = true;
        }
        while let Some(q) = stack.pop() {
            for &(e, r) in self.out(q) {
                if !self.is_observable(e) && !seen[r.0] {
                    seen[r.0] = true;
                    stack.push(r);
                }
            }
        }
        self.collect_marked(&seen)
    }

    /// One observer step: `UR` of the `a`-successors of `x`.
    pub fn estimate_step(&self, x: &StateSet, a: LabelId) -> StateSet {
        let post: StateSet = x
            .iter()
            .flat_map(|q| self.out(q).iter())
            .filter(|(e, _)| self.label(*e) == Some(a))
            .map(|&(_, r)| r)
            .collect();
        self.unobservable_reach(&post)
    }

    /// `M(S, σ)`: the states reachable by runs whose label sequence is `σ`.
    pub fn current_state_estimate(&self, sigma: &[LabelId]) -> StateSet {
        sigma.iter().fold(self.unobservable_reach(&self.initial), |x, &a| {
            self.estimate_step(&x, a)
        })
    }

    /// States reachable from `seeds` via `E*` (`reflexive`) or `E⁺`.
    pub fn reachable(&self, seeds: &StateSet, reflexive: bool) -> StateSet {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::new();
        if reflexive {
            for q in seeds.iter() {
                seen[q.0] = true;
                queue.push_back(q);
            }
        } else {
            for q in seeds.iter() {
                for &(_, r) in self.out(q) {
                    if !seen[r.0] {
                        seen[r.0] = true;
                        queue.push_back(r);
                    }
                }
            }
        }
        while let Some(q) = queue.pop_front() {
            for &(_, r) in self.out(q) {
                if !seen[r.0] {
                    seen[r.0] = true;
                    queue.push_back(r);
                }
            }
        }
        self.collect_marked(&seen)
    }

    fn collect_marked(&self, marks: &[bool]) -> StateSet {
        StateSet(
            marks
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| StateId(i))
                .collect(),
        )
    }

    fn successor_lists(&self) -> Vec<Vec<usize>> {
        self.out
            .iter()
            .map(|edges| edges.iter().map(|&(_, r)| r.0).collect())
            .collect()
    }

    pub(crate) fn edge_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.num_states()];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.from.0].push((i, t.to.0));
        }
        out
    }

    /// SCC partition with the cyclic and observable-cycle tags.
    pub fn scc_partition(&self) -> SccPartition {
        let raw = graph::tarjan(&self.successor_lists());
        let members = raw.members();
        let mut order: Vec<usize> = (0..raw.count).collect();
        order.sort_by_key(|&c| members[c][0]);
        let mut rank = vec![0; raw.count];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let mut components: Vec<Component> = order
            .iter()
            .map(|&c| Component {
                states: members[c].iter().map(|&i| StateId(i)).collect(),
                cyclic: false,
                observable_cycle: false,
            })
            .collect();
        let index: Vec<usize> = raw.comp.iter().map(|&c| rank[c]).collect();
        for t in &self.transitions {
            let c = index[t.from.0];
            if c == index[t.to.0] {
                components[c].cyclic = true;
                if self.is_observable(t.event) {
                    components[c].observable_cycle = true;
                }
            }
        }
        SccPartition { components, index }
    }

    /// States lying on some cycle.
    pub fn cycle_states(&self) -> Vec<bool> {
        let scc = self.scc_partition();
        (0..self.num_states())
            .map(|i| scc.components[scc.index[i]].cyclic)
            .collect()
    }

    /// Whether some cycle is reachable from `q` via `E⁺`, so an infinite run starts at `q`.
    pub fn can_reach_cycle(&self, q: StateId) -> bool {
        let on_cycle = self.cycle_states();
        self.reachable(&StateSet::singleton(q), true)
            .iter()
            .any(|r| on_cycle[r.0])
    }

    /// A shortest stem from `q` to a cycle, followed by that cycle, as transition lists.
    pub fn lasso_from(&self, q: StateId) -> Option<(Vec<Transition>, Vec<Transition>)> {
        let scc = self.scc_partition();
        let adj = self.edge_adjacency();
        let on_cycle = |i: usize| scc.components[scc.index[i]].cyclic;
        let stem = graph::shortest_path(&adj, q.0, |_| true, on_cycle)?;
        let entry = stem.last().map_or(q.0, |&t| self.transitions[t].to.0);
        let comp = scc.index[entry];
        let in_comp = |i: usize| scc.index[i] == comp;
        let (ti, t) = self
            .transitions
            .iter()
            .enumerate()
            .find(|(_, t)| in_comp(t.from.0) && in_comp(t.to.0))?;
        let cycle = graph::cycle_through_edge(&adj, entry, (t.from.0, ti, t.to.0), in_comp)?;
        let pick = |ids: Vec<usize>| ids.into_iter().map(|i| self.transitions[i]).collect();
        Some((pick(stem), pick(cycle)))
    }

    /// Every reachable state has an outgoing transition.
    pub fn is_live(&self) -> bool {
        self.reachable(&self.initial, true)
            .iter()
            .all(|q| !self.out(q).is_empty())
    }

    /// No reachable cycle consists only of unobservable transitions.
    pub fn is_divergence_free(&self) -> bool {
        let reach = self.reachable(&self.initial, true);
        let adj: Vec<Vec<usize>> = (0..self.num_states())
            .map(|i| {
                if !reach.contains(StateId(i)) {
                    return Vec::new();
                }
                self.out[i]
                    .iter()
                    .filter(|(e, _)| !self.is_observable(*e))
                    .map(|&(_, r)| r.0)
                    .collect()
            })
            .collect();
        let scc = graph::tarjan(&adj);
        !adj.iter()
            .enumerate()
            .any(|(v, succ)| succ.iter().any(|&w| scc.comp[v] == scc.comp[w]))
    }

    pub(crate) fn label_of_slice(&self) -> &[Option<LabelId>] {
        &self.label_of
    }
}

impl fmt::Display for Lfsa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "states: {} (initial {})",
            self.states.join(" "),
            self.format_set(&self.initial)
        )?;
        for t in &self.transitions {
            writeln!(
                f,
                "  {} --{}/{}--> {}",
                self.state_name(t.from),
                self.event_name(t.event),
                self.label_text(t.event),
                self.state_name(t.to)
            )?;
        }
        Ok(())
    }
}

/// The faulty events `E_f ⊆ E` of a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultSpec {
    faulty: Vec<bool>,
}

impl FaultSpec {
    pub fn new(model: &Lfsa, events: impl IntoIterator<Item = EventId>) -> Self {
        let mut faulty = vec![false; model.num_events()];
        for e in events {
            faulty[e.0] = true;
        }
        FaultSpec { faulty }
    }

    pub fn from_names<'a>(
        model: &Lfsa,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, ModelError> {
        let ids = names
            .into_iter()
            .map(|n| {
                model.event_id(n).ok_or_else(|| ModelError::UndeclaredEvent {
                    event: n.to_string(),
                    context: "fault specification".to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(model, ids))
    }

    pub fn is_faulty(&self, e: EventId) -> bool {
        self.faulty.get(e.0).copied().unwrap_or(false)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.faulty
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| EventId(i))
    }

    pub fn is_empty(&self) -> bool {
        !self.faulty.iter().any(|&f| f)
    }
}

/// The secret states `Q_S ⊆ Q` of a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SecretSpec {
    secret: StateSet,
}

impl SecretSpec {
    pub fn new(secret: StateSet) -> Self {
        SecretSpec { secret }
    }

    pub fn from_names<'a>(
        model: &Lfsa,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, ModelError> {
        Ok(SecretSpec::new(model.state_set(names)?))
    }

    pub fn states(&self) -> &StateSet {
        &self.secret
    }

    pub fn is_secret(&self, q: StateId) -> bool {
        self.secret.contains(q)
    }
}

/// A model together with its fault and secret annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedModel {
    pub lfsa: Lfsa,
    pub faults: FaultSpec,
    pub secrets: SecretSpec,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> Lfsa {
        Lfsa::validate(
            RawLfsa::new()
                .states(["q0", "q1"])
                .event("e1", Some("a"))
                .event("e2", Some("b"))
                .derive_outputs()
                .transition("q0", "e1", "q0")
                .transition("q0", "e2", "q1")
                .initial("q0"),
        )
        .unwrap()
    }

    fn s2() -> Lfsa {
        Lfsa::validate(
            RawLfsa::new()
                .states(["q0", "q1", "q2"])
                .event("e1", Some("a"))
                .event("e2", None)
                .event("e3", Some("b"))
                .event("e4", Some("b"))
                .event("e5", Some("b"))
                .derive_outputs()
                .transition("q0", "e1", "q0")
                .transition("q0", "e2", "q0")
                .transition("q0", "e3", "q1")
                .transition("q0", "e4", "q2")
                .transition("q1", "e5", "q1")
                .initial("q0"),
        )
        .unwrap()
    }

    fn set(m: &Lfsa, names: &[&str]) -> StateSet {
        m.state_set(names.iter().copied()).unwrap()
    }

    #[test]
    fn undeclared_state_is_named() {
        let err = Lfsa::validate(
            RawLfsa::new()
                .state("q0")
                .event("e", Some("a"))
                .derive_outputs()
                .transition("q9", "e", "q0"),
        )
        .unwrap_err();
        assert!(matches!(&err, ModelError::UndeclaredState { state, .. } if state == "q9"));
        assert!(err.to_string().contains("q9"));
    }

    #[test]
    fn label_outside_alphabet_is_rejected() {
        let err = Lfsa::validate(RawLfsa::new().state("q0").event("e", Some("z"))).unwrap_err();
        assert!(matches!(err, ModelError::UnknownLabel { .. }));
    }

    #[test]
    fn reserved_tokens_are_rejected() {
        for bad in [EPSILON_EVENT, EPSILON, "a b", "(x)", ""] {
            assert!(Lfsa::validate(RawLfsa::new().state(bad)).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn estimates_of_s1() {
        let m = s1();
        let obs = |s: &[&str]| m.current_state_estimate(&m.observation(s).unwrap());
        assert_eq!(obs(&["a", "a"]), set(&m, &["q0"]));
        assert_eq!(obs(&["a", "b"]), set(&m, &["q1"]));
        assert_eq!(obs(&["b", "a"]), StateSet::new());
        assert!(m.observation(&["c"]).is_err());
    }

    #[test]
    fn estimate_of_s2_after_b() {
        let m = s2();
        let b = m.label_id("b").unwrap();
        assert_eq!(m.current_state_estimate(&[b]), set(&m, &["q1", "q2"]));
        assert_eq!(m.unobservable_reach(&set(&m, &["q0"])), set(&m, &["q0"]));
    }

    #[test]
    fn reachability_flags() {
        let m = s2();
        let q0 = set(&m, &["q0"]);
        assert_eq!(m.reachable(&q0, false), set(&m, &["q0", "q1", "q2"]));
        let q2 = set(&m, &["q2"]);
        assert_eq!(m.reachable(&q2, true), q2);
        assert_eq!(m.reachable(&q2, false), StateSet::new());
    }

    #[test]
    fn scc_tags_of_s2() {
        let m = s2();
        let p = m.scc_partition();
        assert_eq!(p.components.len(), 3);
        let q = |n| m.state_id(n).unwrap();
        assert!(p.component_of(q("q0")).observable_cycle);
        assert!(p.component_of(q("q1")).observable_cycle);
        assert!(!p.component_of(q("q2")).cyclic);
        assert!(m.can_reach_cycle(q("q1")));
        assert!(!m.can_reach_cycle(q("q2")));
    }

    #[test]
    fn lasso_reaches_self_loop() {
        let m = s2();
        let (stem, cycle) = m.lasso_from(m.state_id("q0").unwrap()).unwrap();
        assert!(stem.is_empty());
        assert_eq!(cycle.len(), 1);
        assert!(m.lasso_from(m.state_id("q2").unwrap()).is_none());
    }

    #[test]
    fn liveness_and_divergence() {
        let m = s2();
        assert!(!m.is_live());
        assert!(!m.is_divergence_free());
        assert!(s1().is_divergence_free());
    }
}
