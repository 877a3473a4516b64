use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{AnnotatedModel, EventId, LabelId, Lfsa, StateId};
use crate::verify::PropertyKind;
use crate::witness::{
    Detectability, DetectabilityWitness, DiagnosabilityWitness, OpacityVariant, OpacityWitness,
    PairState, PairStep, PredictabilityWitness, Step, Witness,
};

use super::filtered_estimate;

/// A check together with its parameter.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PropertyInstance {
    pub property: PropertyKind,
    pub k: Option<u64>,
}

/// "`instance` fails on the model, as shown by `witness`."
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinitionalClaim {
    pub instance: PropertyInstance,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub valid: bool,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClaimError {
    #[error("malformed claim: {0}")]
    Malformed(String),
    #[error("a {witness} witness cannot refute {property}")]
    Mismatch { property: String, witness: String },
}

enum Fail {
    Malformed(String),
    Invalid(String),
}

type Outcome<T> = Result<T, Fail>;

fn malformed<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Fail::Malformed(msg.into()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome<()> {
    if cond {
        Ok(())
    } else {
        Err(Fail::Invalid(msg()))
    }
}

/// Checks a claimed witness against the definitions, by direct subset
/// construction along the claimed observation.
pub fn validate_witness(model: &AnnotatedModel, claim: &DefinitionalClaim) -> Result<WitnessCheck, ClaimError> {
    let mismatch = || ClaimError::Mismatch {
        property: claim.instance.property.name().to_string(),
        witness: kind_name(&claim.witness).to_string(),
    };
    let v = Validator { model };
    let outcome = match (&claim.instance.property, &claim.witness) {
        (PropertyKind::StarSd, Witness::Detectability(w)) if w.variant == Detectability::Star => v.detectability(w),
        (PropertyKind::OmegaSd, Witness::Detectability(w)) if w.variant == Detectability::Omega => {
            v.detectability(w)
        }
        (PropertyKind::Diagnosability, Witness::Diagnosability(w)) => v.diagnosability(w),
        (PropertyKind::Predictability, Witness::Predictability(w)) => v.predictability(w),
        (PropertyKind::Opacity(variant), Witness::Opacity(w)) if w.variant == *variant => {
            v.opacity(w, claim.instance.k)
        }
        (_, Witness::TaggedCycle(_) | Witness::Counterexample(_)) => {
            Err(Fail::Invalid("the witness carries no run of the model to check".into()))
        }
        _ => return Err(mismatch()),
    };
    match outcome {
        Ok(explanation) => Ok(WitnessCheck {
            valid: true,
            explanation,
        }),
        Err(Fail::Invalid(explanation)) => Ok(WitnessCheck {
            valid: false,
            explanation,
        }),
        Err(Fail::Malformed(msg)) => Err(ClaimError::Malformed(msg)),
    }
}

fn kind_name(w: &Witness) -> &'static str {
    match w {
        Witness::Detectability(_) => "detectability",
        Witness::Diagnosability(_) => "diagnosability",
        Witness::Predictability(_) => "predictability",
        Witness::Opacity(_) => "opacity",
        Witness::TaggedCycle(_) => "tagged-cycle",
        Witness::Counterexample(_) => "counterexample",
    }
}

/// One side of a product path after resolution.
#[derive(Default)]
struct Side {
    events: Vec<EventId>,
}

struct Validator<'a> {
    model: &'a AnnotatedModel,
}

impl Validator<'_> {
    fn m(&self) -> &Lfsa {
        &self.model.lfsa
    }

    fn state(&self, name: &str) -> Outcome<StateId> {
        match self.m().state_id(name) {
            Some(q) => Ok(q),
            None => malformed(format!("unknown state `{name}`")),
        }
    }

    fn event(&self, name: &str) -> Outcome<EventId> {
        match self.m().event_id(name) {
            Some(e) => Ok(e),
            None => malformed(format!("unknown event `{name}`")),
        }
    }

    fn pair(&self, p: &PairState) -> Outcome<(StateId, StateId)> {
        Ok((self.state(&p.left)?, self.state(&p.right)?))
    }

    fn is_transition(&self, q: StateId, e: EventId, r: StateId) -> bool {
        self.m().out(q).contains(&(e, r))
    }

    fn labels(&self, events: &[EventId]) -> Vec<LabelId> {
        events.iter().filter_map(|&e| self.m().label(e)).collect()
    }

    fn show(&self, sigma: &[LabelId]) -> String {
        if sigma.is_empty() {
            return "ε".into();
        }
        sigma.iter().map(|&a| self.m().output_name(a)).collect::<Vec<_>>().join("")
    }

    fn show_set(&self, x: &BTreeSet<StateId>) -> String {
        let names: Vec<&str> = x.iter().map(|&q| self.m().state_name(q)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Walks product steps from `at`, checking every move against the model.
    fn walk(
        &self,
        mut at: (StateId, StateId),
        steps: &[PairStep],
        left: &mut Side,
        right: &mut Side,
    ) -> Outcome<(StateId, StateId)> {
        let m = self.m();
        for (i, s) in steps.iter().enumerate() {
            let to = self.pair(&s.to)?;
            let le = s.left.as_deref().map(|e| self.event(e)).transpose()?;
            let re = s.right.as_deref().map(|e| self.event(e)).transpose()?;
            match (le, re) {
                (None, None) => return malformed(format!("product step {i} moves neither side")),
                (Some(a), Some(b)) => ensure(
                    m.label(a).is_some() && m.label(a) == m.label(b),
                    || format!("product step {i} pairs events with different outputs"),
                )?,
                (Some(e), None) | (None, Some(e)) => ensure(m.label(e).is_none(), || {
                    format!("product step {i} moves one side on observable `{}`", m.event_name(e))
                })?,
            }
            for (ev, from, target, side) in [(le, at.0, to.0, &mut *left), (re, at.1, to.1, &mut *right)] {
                match ev {
                    Some(e) => {
                        ensure(self.is_transition(from, e, target), || {
                            format!(
                                "({},{},{}) is not a transition",
                                m.state_name(from),
                                m.event_name(e),
                                m.state_name(target)
                            )
                        })?;
                        side.events.push(e);
                    }
                    None if from != target => {
                        return malformed(format!("product step {i} changes an idle side"));
                    }
                    None => {}
                }
            }
            at = to;
        }
        Ok(at)
    }

    /// Walks a plain run from `at`.
    fn walk_run(&self, mut at: StateId, steps: &[Step], events: &mut Vec<EventId>) -> Outcome<StateId> {
        let m = self.m();
        for s in steps {
            let e = self.event(&s.event)?;
            let to = self.state(&s.to)?;
            ensure(self.is_transition(at, e, to), || {
                format!("({},{},{}) is not a transition", m.state_name(at), s.event, s.to)
            })?;
            events.push(e);
            at = to;
        }
        Ok(at)
    }

    fn initial_pair(&self, p: (StateId, StateId)) -> Outcome<()> {
        let init = self.m().initial();
        ensure(init.contains(p.0) && init.contains(p.1), || {
            "the product run does not start from initial states".into()
        })
    }

    fn detectability(&self, w: &DetectabilityWitness) -> Outcome<String> {
        let m = self.m();
        let start = self.pair(&w.prefix.start)?;
        self.initial_pair(start)?;
        let (mut left, mut right) = (Side::default(), Side::default());
        let q1 = self.walk(start, &w.prefix.steps, &mut left, &mut right)?;
        if w.cycle.is_empty() {
            return malformed("empty pump segment");
        }
        let (mut cl, mut cr) = (Side::default(), Side::default());
        if self.walk(q1, &w.cycle, &mut cl, &mut cr)? != q1 {
            return malformed("pump segment is not a cycle");
        }
        let gamma = self.labels(&cl.events);
        ensure(!gamma.is_empty(), || "pump segment produces no output".into())?;
        let (mut sl, mut sr) = (Side::default(), Side::default());
        let q2 = self.walk(q1, &w.suffix, &mut sl, &mut sr)?;
        ensure(q2.0 != q2.1, || "the run pair ends in equal states".into())?;

        let mut sigma = self.labels(&left.events);
        for _ in 0..=w.pump {
            sigma.extend(&gamma);
        }
        sigma.extend(self.labels(&sl.events));
        ensure(sigma.len() > w.pump, || "pumped observation is not longer than k".into())?;
        let est = filtered_estimate(m, m.initial().iter(), &sigma, &|_| true, &|_| true);
        ensure(est.contains(&q2.0) && est.contains(&q2.1) && est.len() > 1, || {
            format!("M(σ) = {} does not contain both end states", self.show_set(&est))
        })?;
        let mut note = format!(
            "|σ| = {} > k = {} and M(σ) = {} has {} states; pumping the cycle further keeps this for every k",
            sigma.len(),
            w.pump,
            self.show_set(&est),
            est.len()
        );
        if w.variant == Detectability::Omega {
            let (Some(stem), Some(cycle)) = (&w.tail_stem, &w.tail_cycle) else {
                return malformed("infinite-run witness without a lasso");
            };
            let mut evs = Vec::new();
            let at = self.walk_run(q2.0, stem, &mut evs)?;
            if cycle.is_empty() {
                return malformed("empty lasso cycle");
            }
            if self.walk_run(at, cycle, &mut evs)? != at {
                return malformed("lasso cycle does not close");
            }
            note.push_str(&format!("; the run continues forever through a cycle at {}", m.state_name(at)));
        }
        Ok(note)
    }

    fn diagnosability(&self, w: &DiagnosabilityWitness) -> Outcome<String> {
        let m = self.m();
        let faults = &self.model.faults;
        let start = self.pair(&w.prefix.start)?;
        self.initial_pair(start)?;
        let (mut left, mut right) = (Side::default(), Side::default());
        let at = self.walk(start, &w.prefix.steps, &mut left, &mut right)?;
        let before = left.events.len();
        let at = self.walk(at, std::slice::from_ref(&w.fault), &mut left, &mut right)?;
        ensure(
            left.events.len() == before + 1 && faults.is_faulty(left.events[before]),
            || "the marked step is not a faulty move of the left run".into(),
        )?;
        let q1 = self.walk(at, &w.connector, &mut left, &mut right)?;
        if w.cycle.is_empty() {
            return malformed("empty pump segment");
        }
        let (mut cl, mut cr) = (Side::default(), Side::default());
        if self.walk(q1, &w.cycle, &mut cl, &mut cr)? != q1 {
            return malformed("pump segment is not a cycle");
        }
        ensure(!cl.events.is_empty(), || "the left run is idle on the cycle".into())?;
        ensure(
            right.events.iter().chain(&cr.events).all(|&e| !faults.is_faulty(e)),
            || "the right run contains a fault".into(),
        )?;

        let after = left.events.len() - (before + 1) + cl.events.len() * (w.pump + 1);
        ensure(after > w.pump, || "fewer than k events follow the fault".into())?;
        let mut sigma = self.labels(&left.events);
        let gamma = self.labels(&cl.events);
        for _ in 0..=w.pump {
            sigma.extend(&gamma);
        }
        let normal = filtered_estimate(m, m.initial().iter(), &sigma, &|e| !faults.is_faulty(e), &|_| true);
        ensure(normal.contains(&q1.1), || {
            format!("no fault-free run produces σ; fault-free estimate is {}", self.show_set(&normal))
        })?;
        Ok(format!(
            "{} events follow `{}` (k = {}), and fault-free runs still produce the same {} outputs, ending in {}",
            after,
            m.event_name(left.events[before]),
            w.pump,
            sigma.len(),
            self.show_set(&normal)
        ))
    }

    fn predictability(&self, w: &PredictabilityWitness) -> Outcome<String> {
        let m = self.m();
        let faults = &self.model.faults;
        let start = self.pair(&w.prefix.start)?;
        self.initial_pair(start)?;
        let (mut left, mut right) = (Side::default(), Side::default());
        let end = self.walk(start, &w.prefix.steps, &mut left, &mut right)?;
        ensure(
            left.events.iter().chain(&right.events).all(|&e| !faults.is_faulty(e)),
            || "the paired runs are not fault-free".into(),
        )?;
        let f = self.event(&w.fault.event)?;
        let fq = self.state(&w.fault.to)?;
        ensure(faults.is_faulty(f) && self.is_transition(end.0, f, fq), || {
            format!("`{}` is not a fault leaving {}", w.fault.event, m.state_name(end.0))
        })?;
        let mut tail = Vec::new();
        let at = self.walk_run(end.1, &w.stem, &mut tail)?;
        if w.cycle.is_empty() {
            return malformed("empty pump segment");
        }
        let mut cyc = Vec::new();
        if self.walk_run(at, &w.cycle, &mut cyc)? != at {
            return malformed("pump segment is not a cycle");
        }
        ensure(tail.iter().chain(&cyc).all(|&e| !faults.is_faulty(e)), || {
            "the continuation contains a fault".into()
        })?;
        let v = tail.len() + cyc.len() * (w.pump + 1);
        ensure(v > w.pump, || "continuation is not longer than k".into())?;
        let sigma = self.labels(&left.events);
        for i in 0..=sigma.len() {
            let x = filtered_estimate(m, m.initial().iter(), &sigma[..i], &|e| !faults.is_faulty(e), &|_| true);
            ensure(!x.is_empty(), || format!("no fault-free run produces {}", self.show(&sigma[..i])))?;
        }
        Ok(format!(
            "before `{}` every prefix of {} is also produced by a fault-free run with a fault-free continuation of {} > k = {} events",
            w.fault.event,
            self.show(&sigma),
            v,
            w.pump
        ))
    }

    fn opacity(&self, w: &OpacityWitness, k: Option<u64>) -> Outcome<String> {
        use OpacityVariant::*;
        let m = self.m();
        let secret = |q: StateId| self.model.secrets.is_secret(q);
        let start = self.state(&w.run.start)?;
        ensure(m.initial().contains(start), || "the run does not start in an initial state".into())?;
        let mut events = Vec::new();
        self.walk_run(start, &w.run.steps, &mut events)?;
        let sigma = self.labels(&events);
        let claimed = w
            .observation
            .iter()
            .map(|a| match m.label_id(a) {
                Some(l) => Ok(l),
                None => malformed(format!("unknown output `{a}`")),
            })
            .collect::<Outcome<Vec<_>>>()?;
        ensure(claimed == sigma, || "the run does not produce the claimed observation".into())?;
        let states: Vec<StateId> = std::iter::once(start)
            .chain(w.run.steps.iter().map(|s| m.state_id(&s.to).expect("resolved")))
            .collect();

        let split = if w.variant.is_delayed() {
            let (Some(i), Some(split)) = (w.secret_index, w.split) else {
                return malformed("delayed witness without a secret position");
            };
            if i >= states.len() || self.labels(&events[..i]).len() != split {
                return malformed("secret position and split disagree with the run");
            }
            ensure(secret(states[i]), || format!("{} is not secret", m.state_name(states[i])))?;
            if w.variant.needs_k() {
                let Some(k) = k else {
                    return malformed("K-step claim without K");
                };
                ensure((sigma.len() - split) as u64 <= k, || {
                    format!("the secret lies {} > K = {k} outputs back", sigma.len() - split)
                })?;
            }
            split
        } else {
            0
        };
        let init = m.initial();
        let nonsecret_run = |from: &dyn Fn(StateId) -> bool| {
            filtered_estimate(m, init.iter().filter(|&q| from(q)), &sigma, &|_| true, &|q| !secret(q))
        };
        let (counterpart, what) = match w.variant {
            Cso => {
                ensure(secret(*states.last().unwrap()), || "the run does not end in a secret".into())?;
                let x = filtered_estimate(m, init.iter(), &sigma, &|_| true, &|_| true);
                (x.into_iter().filter(|&q| !secret(q)).collect(), "non-secret states in M(σ)")
            }
            Iso => {
                ensure(secret(start), || "the run does not start in a secret".into())?;
                let x = filtered_estimate(m, init.iter().filter(|&q| !secret(q)), &sigma, &|_| true, &|_| true);
                (x, "states reached from non-secret initial states")
            }
            Infso | Kso => {
                let at = filtered_estimate(m, init.iter(), &sigma[..split], &|_| true, &|_| true);
                let x = filtered_estimate(
                    m,
                    at.into_iter().filter(|&q| !secret(q)),
                    &sigma[split..],
                    &|_| true,
                    &|_| true,
                );
                (x, "runs passing a non-secret state after α")
            }
            Scso => {
                ensure(secret(*states.last().unwrap()), || "the run does not end in a secret".into())?;
                (nonsecret_run(&|_| true), "non-secret runs")
            }
            Siso => {
                ensure(secret(start), || "the run does not start in a secret".into())?;
                (nonsecret_run(&|q| !secret(q)), "non-secret runs")
            }
            Sinfso | Skso => (nonsecret_run(&|_| true), "non-secret runs"),
        };
        ensure(counterpart.is_empty(), || {
            format!("{what} producing {} exist: {}", self.show(&sigma), self.show_set(&counterpart))
        })?;
        Ok(format!("no {what} produce {}", self.show(&sigma)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::verify::verify;

    fn claim(model: &AnnotatedModel, property: PropertyKind, k: Option<u64>) -> DefinitionalClaim {
        let v = verify(model, property, k).unwrap();
        DefinitionalClaim {
            instance: PropertyInstance { property, k },
            witness: v.witness.expect("negative verdict"),
        }
    }

    #[test]
    fn reference_witnesses_validate() {
        let s2 = gallery::s2();
        for p in [PropertyKind::StarSd, PropertyKind::OmegaSd] {
            let c = validate_witness(&s2, &claim(&s2, p, None)).unwrap();
            assert!(c.valid, "{}", c.explanation);
        }
        let s3 = gallery::s3();
        for p in [PropertyKind::Diagnosability, PropertyKind::Predictability] {
            let c = validate_witness(&s3, &claim(&s3, p, None)).unwrap();
            assert!(c.valid, "{}", c.explanation);
        }
    }

    #[test]
    fn fabricated_cycles_are_rejected() {
        let s2 = gallery::s2();
        let base = claim(&s2, PropertyKind::StarSd, None);

        let mut open = base.clone();
        let Witness::Detectability(w) = &mut open.witness else { unreachable!() };
        w.cycle = vec![PairStep {
            left: Some("e3".into()),
            right: Some("e3".into()),
            to: PairState {
                left: "q1".into(),
                right: "q1".into(),
            },
        }];
        assert!(matches!(validate_witness(&s2, &open), Err(ClaimError::Malformed(_))));

        let mut fake = base;
        let Witness::Detectability(w) = &mut fake.witness else { unreachable!() };
        w.cycle[0].left = Some("e3".into());
        w.cycle[0].right = Some("e3".into());
        let c = validate_witness(&s2, &fake).unwrap();
        assert!(!c.valid);
        assert!(c.explanation.contains("not a transition"), "{}", c.explanation);
    }

    #[test]
    fn wrong_kind_is_a_mismatch() {
        let s3 = gallery::s3();
        let mut c = claim(&s3, PropertyKind::Diagnosability, None);
        c.instance.property = PropertyKind::StarSd;
        assert!(matches!(validate_witness(&s3, &c), Err(ClaimError::Mismatch { .. })));
    }
}
