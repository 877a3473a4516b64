use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::{AnnotatedModel, EventId, FaultSpec, Lfsa, RawLfsa, SecretSpec, StateId};

/// Parameters of [`random_lfsa`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub states: usize,
    pub events: usize,
    /// Probability that an event is observable.
    pub observable_fraction: f64,
    /// Probability that a given `(q, e, q′)` is a transition.
    pub density: f64,
    pub initial: usize,
    pub secret_density: f64,
    pub fault_density: f64,
    /// Every reachable state has an outgoing transition.
    pub live: bool,
    /// No reachable cycle of unobservable transitions.
    pub divergence_free: bool,
    /// Injective labels on observable events, one initial state, exactly one
    /// unobservable fault.
    pub appendix_scope: bool,
    pub seed: u64,
    pub retries: usize,
}

impl GeneratorParams {
    pub fn new(states: usize, events: usize, seed: u64) -> Self {
        GeneratorParams {
            states,
            events,
            observable_fraction: 0.6,
            density: 0.12,
            initial: 1,
            secret_density: 0.3,
            fault_density: 0.2,
            live: false,
            divergence_free: false,
            appendix_scope: false,
            seed,
            retries: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("a model needs at least one state")]
    NoStates,
    #[error("the appendix scope needs a fault event")]
    NoEvents,
    #[error("`{0}` must lie in [0, 1]")]
    Fraction(&'static str),
    #[error("constraints not met after {0} attempts")]
    Unsatisfiable(usize),
}

/// A seeded random model; identical parameters give identical models.
pub fn random_lfsa(params: &GeneratorParams) -> Result<AnnotatedModel, GenerateError> {
    if params.states == 0 {
        return Err(GenerateError::NoStates);
    }
    if params.events == 0 && params.appendix_scope {
        return Err(GenerateError::NoEvents);
    }
    for (name, f) in [
        ("observable_fraction", params.observable_fraction),
        ("density", params.density),
        ("secret_density", params.secret_density),
        ("fault_density", params.fault_density),
    ] {
        if !(0.0..=1.0).contains(&f) {
            return Err(GenerateError::Fraction(name));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.retries.max(1) {
        if let Some(m) = attempt(params, &mut rng) {
            return Ok(m);
        }
    }
    Err(GenerateError::Unsatisfiable(params.retries.max(1)))
}

fn attempt(p: &GeneratorParams, rng: &mut ChaCha8Rng) -> Option<AnnotatedModel> {
    let n = p.states;
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let events: Vec<String> = (0..p.events).map(|i| format!("e{i}")).collect();
    let alphabet = ["a", "b", "c", "d", "e", "g", "h", "i"];
    let fault_event = p.appendix_scope.then(|| rng.random_range(0..p.events));
    let labels: Vec<Option<String>> = (0..p.events)
        .map(|i| {
            if fault_event == Some(i) || !rng.random_bool(p.observable_fraction) {
                None
            } else if p.appendix_scope {
                Some(format!("o{i}"))
            } else {
                let width = p.events.div_ceil(2).clamp(1, alphabet.len());
                Some(alphabet[rng.random_range(0..width)].to_string())
            }
        })
        .collect();
    let allowed = |from: usize, e: usize, to: usize| !p.divergence_free || labels[e].is_some() || to > from;
    let mut transitions = Vec::new();
    for q in 0..n {
        for e in 0..p.events {
            for r in 0..n {
                if allowed(q, e, r) && rng.random_bool(p.density) {
                    transitions.push((q, e, r));
                }
            }
        }
    }
    if p.live {
        for q in 0..n {
            if transitions.iter().any(|t| t.0 == q) {
                continue;
            }
            let options: Vec<(usize, usize)> = (0..p.events)
                .flat_map(|e| (0..n).map(move |r| (e, r)))
                .filter(|&(e, r)| allowed(q, e, r))
                .collect();
            if options.is_empty() {
                return None;
            }
            let (e, r) = options[rng.random_range(0..options.len())];
            transitions.push((q, e, r));
        }
    }
    let count = if p.appendix_scope { 1 } else { p.initial.min(n) };
    let mut initial: Vec<usize> = Vec::new();
    while initial.len() < count {
        let q = rng.random_range(0..n);
        if !initial.contains(&q) {
            initial.push(q);
        }
    }
    initial.sort_unstable();
    let secret: Vec<usize> = (0..n).filter(|_| rng.random_bool(p.secret_density)).collect();
    let faulty: Vec<usize> = match fault_event {
        Some(f) => vec![f],
        None => (0..p.events).filter(|_| rng.random_bool(p.fault_density)).collect(),
    };

    let mut raw = RawLfsa::new().states(states.iter().map(String::as_str));
    for (e, l) in events.iter().zip(&labels) {
        raw = raw.event(e, l.as_deref());
    }
    for &(q, e, r) in &transitions {
        raw = raw.transition(&states[q], &events[e], &states[r]);
    }
    for &q in &initial {
        raw = raw.initial(&states[q]);
    }
    let lfsa = Lfsa::validate(raw.derive_outputs()).expect("generated model is well formed");
    if (p.live && !lfsa.is_live()) || (p.divergence_free && !lfsa.is_divergence_free()) {
        return None;
    }
    let faults = FaultSpec::new(&lfsa, faulty.into_iter().map(EventId));
    let secrets = SecretSpec::new(secret.into_iter().map(StateId).collect());
    Some(AnnotatedModel { lfsa, faults, secrets })
}
