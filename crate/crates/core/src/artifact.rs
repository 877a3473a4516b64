//! Every derived automaton, by name, as a renderable graph.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use thiserror::Error;

use crate::automaton::{AnnotatedModel, EventId, Lfsa, StateId};
use crate::compose::{concurrent_composition, explore_observer_product, self_composition, ComposeError};
use crate::derive::{build_observer, delete_secret, epsilonize, faulty_subautomaton, lift_observer, normal_subautomaton};
use crate::io::GraphView;
use crate::legacy::{check_legacy, LegacyMethod, ScopeError};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum Artifact {
    Observer,
    SelfComposition,
    /// `CC(S_f, S_n)`.
    CcFn,
    /// `CC(S_n, S_n)`.
    CcNn,
    Epsilon,
    DssObserver,
    TwinPlant,
    YlVerifier,
    Gtp,
    /// `CC(S_ε, S_obs^ε)` from the initial states.
    CcObs,
    /// `CC(S_ε, S_dssobs^ε)` from the initial states.
    CcDssObs,
}

impl Artifact {
    pub fn name(self) -> &'static str {
        match self {
            Artifact::Observer => "observer",
            Artifact::SelfComposition => "self-composition",
            Artifact::CcFn => "cc-fn",
            Artifact::CcNn => "cc-nn",
            Artifact::Epsilon => "epsilon",
            Artifact::DssObserver => "dss-observer",
            Artifact::TwinPlant => "twin-plant",
            Artifact::YlVerifier => "yl-verifier",
            Artifact::Gtp => "gtp",
            Artifact::CcObs => "cc-obs",
            Artifact::CcDssObs => "cc-dss-obs",
        }
    }
}

impl fmt::Display for Artifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Artifact {
    type Err = ArtifactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Artifact::value_variants()
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| ArtifactError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArtifactError {
    #[error("unknown artifact `{0}`")]
    Unknown(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("the model has {0} fault events; pick one explicitly")]
    AmbiguousFault(usize),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

fn legacy_fault(model: &AnnotatedModel, name: Option<&str>) -> Result<EventId, ArtifactError> {
    match name {
        Some(n) => model
            .lfsa
            .event_id(n)
            .ok_or_else(|| ArtifactError::UnknownEvent(n.to_string())),
        None => {
            let faults: Vec<EventId> = model.faults.events().collect();
            match faults.as_slice() {
                [f] => Ok(*f),
                _ => Err(ArtifactError::AmbiguousFault(faults.len())),
            }
        }
    }
}

fn observer_product(plant: &Lfsa, observed: &Lfsa) -> Lfsa {
    let obs = build_observer(observed);
    let seeds: Vec<(StateId, _)> = plant
        .initial()
        .iter()
        .map(|q| (q, obs.initial().clone()))
        .collect();
    explore_observer_product(&epsilonize(plant), &obs, &seeds, None).to_lfsa(plant, &obs)
}

/// Builds `artifact` for `model`. The legacy constructions use `fault`, or the
/// model's only fault event.
pub fn build_artifact(model: &AnnotatedModel, artifact: Artifact, fault: Option<&str>) -> Result<GraphView, ArtifactError> {
    let m = &model.lfsa;
    let legacy = |method: LegacyMethod| -> Result<Lfsa, ArtifactError> {
        let f = legacy_fault(model, fault)?;
        Ok(check_legacy(method, m, f)?.1.to_lfsa())
    };
    let dss = || delete_secret(m, &model.secrets).automaton;
    let (lfsa, plain) = match artifact {
        Artifact::Observer => (lift_observer(&build_observer(m)), true),
        Artifact::DssObserver => (lift_observer(&build_observer(&dss())), true),
        Artifact::SelfComposition => (self_composition(m).to_lfsa(), false),
        Artifact::CcFn => {
            let f = faulty_subautomaton(m, &model.faults).automaton;
            let n = normal_subautomaton(m, &model.faults).automaton;
            (concurrent_composition(&f, &n)?.to_lfsa(), false)
        }
        Artifact::CcNn => (self_composition(&normal_subautomaton(m, &model.faults).automaton).to_lfsa(), false),
        Artifact::Epsilon => (epsilonize(m), false),
        Artifact::TwinPlant => (legacy(LegacyMethod::TwinPlant)?, true),
        Artifact::YlVerifier => (legacy(LegacyMethod::YlVerifier)?, true),
        Artifact::Gtp => (legacy(LegacyMethod::GeneralizedTwinPlant)?, true),
        Artifact::CcObs => (observer_product(m, m), true),
        Artifact::CcDssObs => (observer_product(m, &dss()), true),
    };
    Ok(GraphView::from_lfsa(artifact.name(), &lfsa, plain))
}
