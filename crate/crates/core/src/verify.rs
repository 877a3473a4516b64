//! One entry point for all twelve checks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automaton::AnnotatedModel;
use crate::concealment::{check_opacity, OpacityQuery, QueryError};
use crate::inference::{check_diagnosability, check_predictability, check_strong_detectability};
use crate::io::{Parameters, Statistics, Timing, VerdictDocument, FORMAT_VERSION};
use crate::witness::{Detectability, OpacityVariant, Witness};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropertyKind {
    StarSd,
    OmegaSd,
    Diagnosability,
    Predictability,
    Opacity(OpacityVariant),
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 12] = [
        PropertyKind::StarSd,
        PropertyKind::OmegaSd,
        PropertyKind::Diagnosability,
        PropertyKind::Predictability,
        PropertyKind::Opacity(OpacityVariant::Cso),
        PropertyKind::Opacity(OpacityVariant::Iso),
        PropertyKind::Opacity(OpacityVariant::Infso),
        PropertyKind::Opacity(OpacityVariant::Kso),
        PropertyKind::Opacity(OpacityVariant::Scso),
        PropertyKind::Opacity(OpacityVariant::Siso),
        PropertyKind::Opacity(OpacityVariant::Sinfso),
        PropertyKind::Opacity(OpacityVariant::Skso),
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::StarSd => "star-sd",
            PropertyKind::OmegaSd => "omega-sd",
            PropertyKind::Diagnosability => "diag",
            PropertyKind::Predictability => "pred",
            PropertyKind::Opacity(v) => match v {
                OpacityVariant::Cso => "cso",
                OpacityVariant::Iso => "iso",
                OpacityVariant::Infso => "infso",
                OpacityVariant::Kso => "kso",
                OpacityVariant::Scso => "scso",
                OpacityVariant::Siso => "siso",
                OpacityVariant::Sinfso => "sinfso",
                OpacityVariant::Skso => "skso",
            },
        }
    }

    pub fn needs_k(self) -> bool {
        matches!(self, PropertyKind::Opacity(v) if v.needs_k())
    }

    pub fn uses_faults(self) -> bool {
        matches!(self, PropertyKind::Diagnosability | PropertyKind::Predictability)
    }

    pub fn uses_secrets(self) -> bool {
        matches!(self, PropertyKind::Opacity(_))
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown property `{0}`")]
pub struct UnknownProperty(pub String);

impl FromStr for PropertyKind {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownProperty(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("{0} does not take a step bound")]
    UnexpectedK(PropertyKind),
}

/// A verdict of any of the twelve checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub property: PropertyKind,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub k: Option<u64>,
    pub effective_k: Option<u64>,
    pub observer_states: usize,
    pub product_states: usize,
}

/// Runs `kind` on `model`, using its fault and secret annotations.
pub fn verify(model: &AnnotatedModel, kind: PropertyKind, k: Option<u64>) -> Result<Verdict, VerifyError> {
    let m = &model.lfsa;
    if !kind.needs_k() && k.is_some() {
        return Err(VerifyError::UnexpectedK(kind));
    }
    let inference = |v: crate::inference::InferenceVerdict| Verdict {
        property: kind,
        holds: v.holds,
        witness: v.witness.map(Witness::from),
        k: None,
        effective_k: None,
        observer_states: 0,
        product_states: v.product_states,
    };
    Ok(match kind {
        PropertyKind::StarSd => inference(check_strong_detectability(m, Detectability::Star)),
        PropertyKind::OmegaSd => inference(check_strong_detectability(m, Detectability::Omega)),
        PropertyKind::Diagnosability => inference(check_diagnosability(m, &model.faults)),
        PropertyKind::Predictability => inference(check_predictability(m, &model.faults)),
        PropertyKind::Opacity(variant) => {
            let query = OpacityQuery::new(m, variant, model.secrets.clone(), k)?;
            let v = check_opacity(m, &query)?;
            Verdict {
                property: kind,
                holds: v.holds,
                witness: v.witness.map(Witness::Opacity),
                k,
                effective_k: v.effective_k,
                observer_states: v.observer_states,
                product_states: v.product_states,
            }
        }
    })
}

impl Verdict {
    pub fn to_document(&self, model: &AnnotatedModel, timing: Option<Timing>) -> VerdictDocument {
        let m = &model.lfsa;
        let faults = if self.property.uses_faults() {
            model.faults.events().map(|e| m.event_name(e).to_string()).collect()
        } else {
            Vec::new()
        };
        let secrets = if self.property.uses_secrets() {
            model.secrets.states().iter().map(|q| m.state_name(q).to_string()).collect()
        } else {
            Vec::new()
        };
        VerdictDocument {
            format_version: FORMAT_VERSION.to_string(),
            property: self.property.name().to_string(),
            parameters: Parameters {
                k: self.k,
                effective_k: self.effective_k,
                faults,
                secrets,
            },
            holds: self.holds,
            witness: self.witness.clone(),
            statistics: Statistics {
                observer_states: self.observer_states,
                product_states: self.product_states,
            },
            timing,
        }
    }
}
