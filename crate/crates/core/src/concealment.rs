//! Standard and strong opacity via observer products.

use thiserror::Error;

use crate::automaton::{LabelId, Lfsa, SecretSpec, StateId, StateSet};
use crate::compose::{explore_observer_product, ObserverProduct};
use crate::derive::{build_observer, delete_secret, epsilonize, ObserverAutomaton};
use crate::witness::{OpacityVariant, OpacityWitness, Run, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{0:?} requires a step bound k")]
    MissingK(OpacityVariant),
    #[error("{0:?} does not take a step bound")]
    UnexpectedK(OpacityVariant),
    #[error("the step bound k must be at least 1")]
    ZeroK,
    #[error("secret state index {0} is not a state of the model")]
    UnknownSecret(usize),
    #[error("{variant:?} is not a {family} opacity notion")]
    WrongFamily {
        variant: OpacityVariant,
        family: &'static str,
    },
}

/// An opacity notion with its secret states and, for the K-step notions, `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpacityQuery {
    pub variant: OpacityVariant,
    pub secrets: SecretSpec,
    pub k: Option<u64>,
}

impl OpacityQuery {
    pub fn new(
        model: &Lfsa,
        variant: OpacityVariant,
        secrets: SecretSpec,
        k: Option<u64>,
    ) -> Result<Self, QueryError> {
        match (variant.needs_k(), k) {
            (true, None) => return Err(QueryError::MissingK(variant)),
            (false, Some(_)) => return Err(QueryError::UnexpectedK(variant)),
            (true, Some(0)) => return Err(QueryError::ZeroK),
            _ => {}
        }
        if let Some(q) = secrets.states().iter().find(|q| q.0 >= model.num_states()) {
            return Err(QueryError::UnknownSecret(q.0));
        }
        Ok(OpacityQuery {
            variant,
            secrets,
            k,
        })
    }
}

/// Outcome of an opacity check. A witness is present exactly when `holds` is false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpacityVerdict {
    pub variant: OpacityVariant,
    pub holds: bool,
    pub witness: Option<OpacityWitness>,
    /// The bound actually used by the K-step notions.
    pub effective_k: Option<u64>,
    pub observer_states: usize,
    pub product_states: usize,
}

/// `min(k, 2ⁿ − 2)`, saturating at zero.
pub fn effective_k(n: usize, k: u64) -> u64 {
    if n >= 64 {
        return k;
    }
    k.min((1u64 << n).saturating_sub(2))
}

/// Bound for the strong K-step notion on a model with `n` states, `open` of
/// them non-secret: `min(k, n·2^open − 1)`. A shortest violation never
/// revisits a pair (state, non-secret estimate), so longer delays add nothing.
pub fn strong_effective_k(n: usize, open: usize, k: u64) -> u64 {
    if open >= 64 {
        return k;
    }
    let cap = (n as u64).saturating_mul(1u64 << open).saturating_sub(1);
    k.min(cap)
}

fn cap_of(k: u64) -> usize {
    usize::try_from(k).unwrap_or(usize::MAX)
}

struct Checker<'a> {
    model: &'a Lfsa,
    plant: Lfsa,
    observer: ObserverAutomaton,
    explored: usize,
}

/// A located violation: product, state index, and how the run before it was obtained.
struct Hit {
    prefix: Option<(Run, Vec<String>)>,
    product: ObserverProduct,
    state: usize,
}

impl<'a> Checker<'a> {
    fn new(model: &'a Lfsa, observer: ObserverAutomaton) -> Self {
        Checker {
            model,
            plant: epsilonize(model),
            observer,
            explored: 0,
        }
    }

    fn explore(&mut self, seeds: &[(StateId, StateSet)], cap: Option<usize>) -> ObserverProduct {
        let p = explore_observer_product(&self.plant, &self.observer, seeds, cap);
        self.explored += p.num_states();
        p
    }

    /// First state (by observable depth) accepted by `pred`.
    fn first(p: &ObserverProduct, pred: impl Fn(StateId, &StateSet) -> bool) -> Option<usize> {
        p.by_depth().into_iter().find(|&i| {
            let (q, x) = p.state(i);
            pred(*q, x)
        })
    }

    /// Concrete model run along the product trace to `i`.
    fn realize(&self, p: &ObserverProduct, i: usize) -> (Run, Vec<String>) {
        let (seed, moves) = p.trace_to(i);
        let mut q = p.state(seed).0;
        let mut run = Run {
            start: self.model.state_name(q).to_string(),
            steps: Vec::new(),
        };
        let mut sigma = Vec::new();
        for (label, j) in moves {
            let next = p.state(j).0;
            let e = self.concrete_event(q, label, next);
            run.steps.push(Step {
                event: self.model.event_name(e).to_string(),
                to: self.model.state_name(next).to_string(),
            });
            if let Some(a) = label {
                sigma.push(self.model.output_name(a).to_string());
            }
            q = next;
        }
        (run, sigma)
    }

    fn concrete_event(
        &self,
        from: StateId,
        label: Option<LabelId>,
        to: StateId,
    ) -> crate::automaton::EventId {
        self.model
            .out(from)
            .iter()
            .find(|&&(e, r)| r == to && self.model.label(e) == label)
            .map(|&(e, _)| e)
            .expect("plant moves come from model transitions")
    }

    /// A run from an initial state to `q` whose observation leads the observer to `x`.
    fn run_to(&mut self, q: StateId, x: &StateSet) -> (Run, Vec<String>) {
        let seeds: Vec<(StateId, StateSet)> = self
            .model
            .initial()
            .iter()
            .map(|q0| (q0, self.observer.initial().clone()))
            .collect();
        let full = self.explore(&seeds, None);
        let i = full.find(q, x).expect("q lies in the estimate x");
        self.realize(&full, i)
    }

    fn witness(&self, variant: OpacityVariant, hit: Hit, secret_index: Option<usize>) -> OpacityWitness {
        let (mut run, mut observation) = self.realize(&hit.product, hit.state);
        let mut split = None;
        let mut secret_index = secret_index;
        if let Some((prefix, alpha)) = hit.prefix {
            split = Some(alpha.len());
            secret_index = Some(prefix.steps.len());
            let mut steps = prefix.steps;
            steps.extend(run.steps);
            run = Run {
                start: prefix.start,
                steps,
            };
            let mut sigma = alpha;
            sigma.extend(observation);
            observation = sigma;
        } else if let Some(idx) = secret_index {
            split = Some(
                run.steps[..idx]
                    .iter()
                    .filter(|s| {
                        let e = self.model.event_id(&s.event).expect("model event");
                        self.model.is_observable(e)
                    })
                    .count(),
            );
        }
        let (start, trace) = hit
            .product
            .estimate_trace(hit.state, &self.plant, &self.observer);
        OpacityWitness {
            variant,
            observation,
            run,
            secret_index,
            split,
            trace_start: Some(start),
            trace,
        }
    }

    fn verdict(
        &self,
        variant: OpacityVariant,
        witness: Option<OpacityWitness>,
        effective_k: Option<u64>,
    ) -> OpacityVerdict {
        OpacityVerdict {
            variant,
            holds: witness.is_none(),
            witness,
            effective_k,
            observer_states: self.observer.num_states(),
            product_states: self.explored,
        }
    }
}

/// CSO, ISO, InfSO and KSO via the observer and `CC(S_ε, S_obs^ε)`.
pub fn check_standard_opacity(
    model: &Lfsa,
    query: &OpacityQuery,
) -> Result<OpacityVerdict, QueryError> {
    use OpacityVariant::*;
    let variant = query.variant;
    if variant.is_strong() {
        return Err(QueryError::WrongFamily {
            variant,
            family: "standard",
        });
    }
    let secret = query.secrets.states();
    let mut c = Checker::new(model, build_observer(model));
    let exposed = |x: &StateSet| !x.is_empty() && x.is_subset(secret);
    let eff = query.k.map(|k| effective_k(model.num_states(), k));

    let mut witness = None;
    match variant {
        Cso => {
            let x = c.observer.states().iter().find(|x| exposed(x)).cloned();
            if let Some(x) = x {
                let q = x.iter().next().expect("nonempty estimate");
                witness = Some(c.exposed_witness(variant, q, &x, false));
            }
        }
        Iso => {
            let q0 = model.initial().clone();
            if exposed(&q0) {
                let q = q0.iter().next().expect("nonempty initial set");
                let start = c.model.state_name(q).to_string();
                witness = Some(OpacityWitness {
                    variant,
                    observation: Vec::new(),
                    run: Run {
                        start,
                        steps: Vec::new(),
                    },
                    secret_index: None,
                    split: None,
                    trace_start: None,
                    trace: Vec::new(),
                });
            } else {
                let others = model.unobservable_reach(&q0.difference(secret));
                for s in q0.intersection(secret).iter() {
                    let p = c.explore(&[(s, others.clone())], None);
                    if let Some(i) = Checker::first(&p, |_, x| x.is_empty()) {
                        let hit = Hit {
                            prefix: None,
                            product: p,
                            state: i,
                        };
                        witness = Some(c.witness(variant, hit, None));
                        break;
                    }
                }
            }
        }
        Infso | Kso => {
            let cap = eff.map(cap_of);
            let states = c.observer.states().to_vec();
            'outer: for x in &states {
                if exposed(x) {
                    let q = x.iter().next().expect("nonempty estimate");
                    witness = Some(c.exposed_witness(variant, q, x, true));
                    break;
                }
                let rest = model.unobservable_reach(&x.difference(secret));
                for q in x.intersection(secret).iter() {
                    let p = c.explore(&[(q, rest.clone())], cap);
                    if let Some(i) = Checker::first(&p, |_, y| y.is_empty()) {
                        let prefix = c.run_to(q, x);
                        let hit = Hit {
                            prefix: Some(prefix),
                            product: p,
                            state: i,
                        };
                        witness = Some(c.witness(variant, hit, None));
                        break 'outer;
                    }
                }
            }
        }
        _ => unreachable!("strong variants rejected above"),
    }
    Ok(c.verdict(variant, witness, eff))
}

impl Checker<'_> {
    /// Witness for an estimate `x ⊆ Q_S`: a run ending in `q ∈ x`.
    fn exposed_witness(
        &mut self,
        variant: OpacityVariant,
        q: StateId,
        x: &StateSet,
        delayed: bool,
    ) -> OpacityWitness {
        let seeds: Vec<(StateId, StateSet)> = self
            .model
            .initial()
            .iter()
            .map(|q0| (q0, self.observer.initial().clone()))
            .collect();
        let p = self.explore(&seeds, None);
        let i = p.find(q, x).expect("q lies in the estimate x");
        let run_len = p.trace_to(i).1.len();
        let hit = Hit {
            prefix: None,
            product: p,
            state: i,
        };
        self.witness(variant, hit, delayed.then_some(run_len))
    }
}

/// SCSO, SISO, SInfSO and SKSO via `CC(S_ε, S_dssobs^ε)`.
pub fn check_strong_opacity(
    model: &Lfsa,
    query: &OpacityQuery,
) -> Result<OpacityVerdict, QueryError> {
    use OpacityVariant::*;
    let variant = query.variant;
    if !variant.is_strong() {
        return Err(QueryError::WrongFamily {
            variant,
            family: "strong",
        });
    }
    let secret = query.secrets.states().clone();
    let dss = delete_secret(model, &query.secrets);
    let mut c = Checker::new(model, build_observer(&dss.automaton));
    let open = model.num_states() - secret.len();
    let eff = query.k.map(|k| strong_effective_k(model.num_states(), open, k));
    let start = c.observer.initial().clone();
    let seeds: Vec<(StateId, StateSet)> = model
        .initial()
        .iter()
        .map(|q0| (q0, start.clone()))
        .collect();

    let last_secret = |c: &Checker, run: &Run| {
        run.states()
            .iter()
            .rposition(|n| secret.contains(c.model.state_id(n).expect("model state")))
    };

    let mut witness = None;
    match variant {
        Scso => {
            let p = c.explore(&seeds, None);
            if let Some(i) = Checker::first(&p, |q, x| secret.contains(q) && x.is_empty()) {
                let hit = Hit {
                    prefix: None,
                    product: p,
                    state: i,
                };
                witness = Some(c.witness(variant, hit, None));
            }
        }
        Siso => {
            for q0 in model.initial().intersection(&secret).iter() {
                let p = c.explore(&[(q0, start.clone())], None);
                if let Some(i) = Checker::first(&p, |_, x| x.is_empty()) {
                    let hit = Hit {
                        prefix: None,
                        product: p,
                        state: i,
                    };
                    witness = Some(c.witness(variant, hit, None));
                    break;
                }
            }
        }
        Sinfso => {
            let p = c.explore(&seeds, None);
            if let Some(i) = Checker::first(&p, |_, x| x.is_empty()) {
                let (run, _) = c.realize(&p, i);
                let idx = last_secret(&c, &run).expect("a non-secret run keeps the estimate nonempty");
                let hit = Hit {
                    prefix: None,
                    product: p,
                    state: i,
                };
                witness = Some(c.witness(variant, hit, Some(idx)));
            }
        }
        Skso => {
            let cap = eff.map(cap_of);
            let full = c.explore(&seeds, None);
            for i in full.by_depth() {
                let (q, x) = full.state(i).clone();
                if !secret.contains(q) {
                    continue;
                }
                let p = c.explore(&[(q, x)], cap);
                if let Some(j) = Checker::first(&p, |_, y| y.is_empty()) {
                    let prefix = c.realize(&full, i);
                    let hit = Hit {
                        prefix: Some(prefix),
                        product: p,
                        state: j,
                    };
                    witness = Some(c.witness(variant, hit, None));
                    break;
                }
            }
        }
        _ => unreachable!("standard variants rejected above"),
    }
    Ok(c.verdict(variant, witness, eff))
}

/// Dispatches to the standard or strong checker.
pub fn check_opacity(model: &Lfsa, query: &OpacityQuery) -> Result<OpacityVerdict, QueryError> {
    if query.variant.is_strong() {
        check_strong_opacity(model, query)
    } else {
        check_standard_opacity(model, query)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::automaton::RawLfsa;

    fn check(model: &Lfsa, variant: OpacityVariant, secrets: &[&str], k: Option<u64>) -> OpacityVerdict {
        let s = SecretSpec::from_names(model, secrets.iter().copied()).unwrap();
        let q = OpacityQuery::new(model, variant, s, k).unwrap();
        check_opacity(model, &q).unwrap()
    }

    #[test]
    fn s2_standard_notions() {
        use OpacityVariant::*;
        let m = gallery::s2().lfsa;
        assert!(check(&m, Cso, &["q2"], None).holds);
        let iso = check(&m, Iso, &["q0"], None);
        assert!(!iso.holds);
        assert!(iso.witness.unwrap().observation.is_empty());
        assert!(check(&m, Infso, &["q2"], None).holds);
        let inf = check(&m, Infso, &["q1"], None);
        assert!(!inf.holds);
        let w = inf.witness.unwrap();
        assert_eq!(w.trace_start.as_ref().unwrap().estimate, ["q2"]);
        let end = &w.trace.last().unwrap().to;
        assert_eq!((end.state.as_str(), end.estimate.len()), ("q1", 0));
        let kso = check(&m, Kso, &["q1"], Some(1));
        assert!(!kso.holds);
        assert_eq!(kso.effective_k, Some(1));
    }

    #[test]
    fn s5_is_infinite_step_opaque_but_not_strongly() {
        use OpacityVariant::*;
        let m = gallery::s5().lfsa;
        assert!(check(&m, Infso, &["q1", "q3"], None).holds);
        let v = check(&m, Sinfso, &["q1", "q3"], None);
        assert!(!v.holds);
        let v = check(&m, Skso, &["q1", "q3"], Some(1));
        assert!(!v.holds);
        assert_eq!(v.effective_k, Some(1));
    }

    #[test]
    fn strong_delay_can_exceed_estimate_count() {
        use OpacityVariant::*;
        let m = Lfsa::validate(
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
        assert!(check(&m, Skso, &["s"], Some(2)).holds);
        let v = check(&m, Skso, &["s"], Some(3));
        assert!(!v.holds);
        assert_eq!(v.effective_k, Some(3));
        assert_eq!(v.witness.unwrap().observation.len(), 3);
        assert!(!check(&m, Sinfso, &["s"], None).holds);
    }

    #[test]
    fn s4_current_state_notions() {
        use OpacityVariant::*;
        let m = gallery::s4().lfsa;
        assert!(check(&m, Cso, &["q2", "q3"], None).holds);
        assert!(!check(&m, Scso, &["q2", "q3"], None).holds);
    }

    #[test]
    fn empty_secret_is_always_strongly_opaque() {
        let m = gallery::s5().lfsa;
        for v in [OpacityVariant::Scso, OpacityVariant::Siso, OpacityVariant::Sinfso] {
            assert!(check(&m, v, &[], None).holds);
        }
        assert!(check(&m, OpacityVariant::Skso, &[], Some(3)).holds);
    }

    #[test]
    fn query_validation() {
        let m = gallery::s2().lfsa;
        let s = SecretSpec::default();
        assert_eq!(
            OpacityQuery::new(&m, OpacityVariant::Kso, s.clone(), None),
            Err(QueryError::MissingK(OpacityVariant::Kso))
        );
        assert_eq!(
            OpacityQuery::new(&m, OpacityVariant::Kso, s.clone(), Some(0)),
            Err(QueryError::ZeroK)
        );
        assert!(OpacityQuery::new(&m, OpacityVariant::Cso, s, Some(2)).is_err());
    }

    #[test]
    fn effective_k_saturates() {
        assert_eq!(effective_k(0, 5), 0);
        assert_eq!(effective_k(1, 5), 0);
        assert_eq!(effective_k(3, 100), 6);
        assert_eq!(effective_k(70, 9), 9);
        assert_eq!(strong_effective_k(2, 1, 5), 3);
        assert_eq!(strong_effective_k(3, 2, 100), 11);
        assert_eq!(strong_effective_k(80, 70, 9), 9);
    }
}
