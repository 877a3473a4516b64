//! Checks that work from the definitions directly, with no use of observers,
//! concurrent compositions or the verifiers: witness validation, bounded
//! search, and a random model generator.

mod generate;
mod search;
mod validate;

use std::collections::BTreeSet;

use crate::automaton::{EventId, LabelId, Lfsa, StateId};

pub use generate::{random_lfsa, GenerateError, GeneratorParams};
pub use search::{
    bounded_definitional_search, bounded_definitional_search_with_budget, default_budget, SearchError,
    BUDGET_VAR,
};
pub use validate::{validate_witness, ClaimError, DefinitionalClaim, PropertyInstance, WitnessCheck};

/// States reachable from `start` by runs producing exactly `sigma`, where every
/// event taken satisfies `event` and every state visited satisfies `state`.
pub(crate) fn filtered_estimate(
    m: &Lfsa,
    start: impl IntoIterator<Item = StateId>,
    sigma: &[LabelId],
    event: &dyn Fn(EventId) -> bool,
    state: &dyn Fn(StateId) -> bool,
) -> BTreeSet<StateId> {
    let close = |mut x: BTreeSet<StateId>| {
        let mut stack: Vec<StateId> = x.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(e, r) in m.out(q) {
                if m.label(e).is_none() && event(e) && state(r) && x.insert(r) {
                    stack.push(r);
                }
            }
        }
        x
    };
    let mut x = close(start.into_iter().filter(|&q| state(q)).collect());
    for &a in sigma {
        let next = x
            .iter()
            .flat_map(|&q| m.out(q).iter())
            .filter(|&&(e, r)| m.label(e) == Some(a) && event(e) && state(r))
            .map(|&(_, r)| r)
            .collect();
        x = close(next);
    }
    x
}

/// Bitset view of a model with at most 64 states.
pub(crate) struct Bits {
    pub n: usize,
    post: Vec<Vec<u64>>,
    pub label: Vec<Option<usize>>,
    pub labels: usize,
    pub initial: u64,
    pub all: u64,
}

pub(crate) fn members(x: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| x >> i & 1 == 1)
}

impl Bits {
    pub fn new(m: &Lfsa) -> Option<Bits> {
        let n = m.num_states();
        if n > 64 {
            return None;
        }
        let mut post = vec![vec![0u64; n]; m.num_events()];
        for t in m.transitions() {
            post[t.event.0][t.from.0] |= 1 << t.to.0;
        }
        Some(Bits {
            n,
            post,
            label: m.event_ids().map(|e| m.label(e).map(|a| a.0)).collect(),
            labels: m.outputs().len(),
            initial: m.initial().iter().fold(0, |acc, q| acc | 1 << q.0),
            all: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
        })
    }

    pub fn post(&self, x: u64, e: usize) -> u64 {
        members(x).fold(0, |acc, q| acc | self.post[e][q])
    }

    /// Closure under allowed unobservable events, staying inside `states`.
    pub fn close(&self, x: u64, events: &[bool], states: u64) -> u64 {
        let mut x = x & states;
        loop {
            let mut y = x;
            for (e, &ok) in events.iter().enumerate() {
                if ok && self.label[e].is_none() {
                    y |= self.post(x, e) & states;
                }
            }
            if y == x {
                return x;
            }
            x = y;
        }
    }

    /// Observable step on label `a` followed by closure.
    pub fn step(&self, x: u64, a: usize, events: &[bool], states: u64) -> u64 {
        let mut y = 0;
        for (e, &ok) in events.iter().enumerate() {
            if ok && self.label[e] == Some(a) {
                y |= self.post(x, e);
            }
        }
        self.close(y & states, events, states)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn bit_and_set_estimates_agree_on_s2() {
        let m = gallery::s2().lfsa;
        let bits = Bits::new(&m).unwrap();
        let every = vec![true; m.num_events()];
        let sigma = m.observation(&["a", "b", "b"]).unwrap();
        let mut x = bits.close(bits.initial, &every, bits.all);
        for a in &sigma {
            x = bits.step(x, a.0, &every, bits.all);
        }
        let set = filtered_estimate(&m, m.initial().iter(), &sigma, &|_| true, &|_| true);
        assert_eq!(members(x).collect::<Vec<_>>(), set.iter().map(|q| q.0).collect::<Vec<_>>());
        assert_eq!(x, 0b010);
    }
}
