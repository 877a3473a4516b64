//! Witness records. Everything is referenced by name so that a witness can be
//! serialized, read back and checked against a model independently.

use serde::{Deserialize, Serialize};

/// A transition step of a plain run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub event: String,
    pub to: String,
}

/// A run `q₀ e₁ q₁ … eₙ qₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: String,
    pub steps: Vec<Step>,
}

impl Run {
    pub fn end(&self) -> &str {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }

    /// The states visited, starting state included.
    pub fn states(&self) -> Vec<&str> {
        std::iter::once(self.start.as_str())
            .chain(self.steps.iter().map(|s| s.to.as_str()))
            .collect()
    }
}

/// A state of a two-sided product, by component names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairState {
    pub left: String,
    pub right: String,
}

/// A product step; `None` on a side means that side did not move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStep {
    pub left: Option<String>,
    pub right: Option<String>,
    pub to: PairState,
}

/// A product run from a product initial state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPath {
    pub start: PairState,
    pub steps: Vec<PairStep>,
}

impl PairPath {
    pub fn end(&self) -> &PairState {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }
}

/// Detectability flavour.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detectability {
    /// Strong detectability over finite runs.
    Star,
    /// Strong detectability over infinite runs.
    Omega,
}

/// Failure of strong detectability in the self-composition:
/// `prefix` reaches `q′₁`, `cycle` is an observable loop at `q′₁`, and
/// `suffix` leads to a state whose components differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectabilityWitness {
    pub variant: Detectability,
    pub prefix: PairPath,
    pub cycle: Vec<PairStep>,
    pub suffix: Vec<PairStep>,
    /// For the infinite-run variant: a lasso of the model from the left end state.
    pub tail_stem: Option<Vec<Step>>,
    pub tail_cycle: Option<Vec<Step>>,
    /// The length bound `k` the cycle is pumped past.
    pub pump: usize,
}

/// Failure of diagnosability in `CC(S_f, S_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosabilityWitness {
    pub prefix: PairPath,
    pub fault: PairStep,
    pub connector: Vec<PairStep>,
    /// A loop whose left side is not entirely idle.
    pub cycle: Vec<PairStep>,
    pub pump: usize,
}

/// Failure of predictability in `CC(S_n, S_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictabilityWitness {
    pub prefix: PairPath,
    /// A faulty transition leaving the left end state.
    pub fault: Step,
    /// A fault-free lasso of the model from the right end state.
    pub stem: Vec<Step>,
    pub cycle: Vec<Step>,
    pub pump: usize,
}

/// Opacity variant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpacityVariant {
    Cso,
    Iso,
    Infso,
    Kso,
    Scso,
    Siso,
    Sinfso,
    Skso,
}

impl OpacityVariant {
    pub const ALL: [OpacityVariant; 8] = [
        OpacityVariant::Cso,
        OpacityVariant::Iso,
        OpacityVariant::Infso,
        OpacityVariant::Kso,
        OpacityVariant::Scso,
        OpacityVariant::Siso,
        OpacityVariant::Sinfso,
        OpacityVariant::Skso,
    ];

    pub fn is_strong(self) -> bool {
        matches!(
            self,
            OpacityVariant::Scso
                | OpacityVariant::Siso
                | OpacityVariant::Sinfso
                | OpacityVariant::Skso
        )
    }

    pub fn needs_k(self) -> bool {
        matches!(self, OpacityVariant::Kso | OpacityVariant::Skso)
    }

    /// Whether the secret may be visited anywhere along the run.
    pub fn is_delayed(self) -> bool {
        matches!(
            self,
            OpacityVariant::Infso | OpacityVariant::Kso | OpacityVariant::Sinfso | OpacityVariant::Skso
        )
    }
}

/// A state of an observer product: plant state plus an estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateState {
    pub state: String,
    pub estimate: Vec<String>,
}

/// A step of an observer product; `label` is `None` for an `ε̂` move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateStep {
    pub label: Option<String>,
    pub to: EstimateState,
}

/// Failure of an opacity notion: a secret run and the observation it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpacityWitness {
    pub variant: OpacityVariant,
    /// Observation `σ` produced by `run`.
    pub observation: Vec<String>,
    /// A run of the model exposing the secret.
    pub run: Run,
    /// Index into the run's visited states where the secret state is occupied
    /// (delayed variants only).
    pub secret_index: Option<usize>,
    /// `|α|` for delayed variants.
    pub split: Option<usize>,
    /// Observer-product trace ending in the violating state, for display.
    pub trace_start: Option<EstimateState>,
    pub trace: Vec<EstimateStep>,
}

/// A cycle in a fault-tagged product, as reported by the legacy methods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedCycleWitness {
    pub method: String,
    pub path: Vec<String>,
    pub cycle: Vec<String>,
}

/// A counterexample found by bounded definitional search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: String,
    /// The observation (or event sequence for run-based properties).
    pub sequence: Vec<String>,
    /// `(start, length)` of the segment that may be repeated, when relevant.
    pub pump: Option<(usize, usize)>,
    /// `|α|` for delayed opacity variants.
    pub split: Option<usize>,
    pub note: String,
}

/// Any witness, tagged by kind in its serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Detectability(DetectabilityWitness),
    Diagnosability(DiagnosabilityWitness),
    Predictability(PredictabilityWitness),
    Opacity(OpacityWitness),
    TaggedCycle(TaggedCycleWitness),
    Counterexample(Counterexample),
}

impl Witness {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serialization")
    }

    pub fn from_json(text: &str) -> Result<Witness, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Left and right projections of a product path's events.
pub fn projections(steps: &[PairStep]) -> (Vec<&str>, Vec<&str>) {
    let left = steps.iter().filter_map(|s| s.left.as_deref()).collect();
    let right = steps.iter().filter_map(|s| s.right.as_deref()).collect();
    (left, right)
}
