//! Forward pass: embedding lookup, sentence composition, and measurement.
//!
//! Three model kinds share the pipeline `tokens → word states → sentence → p`:
//!
//! * `CeSup` superposes the word states into one pure state.
//! * `CeMix` mixes the word projectors into a density matrix.
//! * `RealEmbed` averages real rows and applies a logistic head.
//!
//! Both complex kinds are measured with a learned rank-r projector, `p = Tr(Pρ)`.
//! Every sentence uses uniform weights `1/m`, where `m` counts its real tokens.

mod checkpoint;
mod compose;
mod head;
mod projector;
mod table;

use std::fmt;
use std::str::FromStr;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use compose::{
    mix, real_mean, superpose, uniform_weights, SentenceRepresentation, SUPERPOSITION_NORM_FLOOR,
};
pub(crate) use compose::superpose_clamped;
pub use head::{linear_head, sigmoid, LinearHead};
pub use projector::{
    born_probability, project, FactoredProjector, Measurement, RankRProjector, MIN_GRAM_PIVOT,
};
pub use table::{init_table, lookup, ComplexEmbeddingTable, RealEmbeddingTable, WordState};

use crate::error::{Error, Result};

/// Probability at or above which a sentence is labelled positive.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    RealEmbed,
    CeSup,
    CeMix,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::RealEmbed, ModelKind::CeSup, ModelKind::CeMix];

    /// Short identifier used on the command line and in checkpoints.
    pub fn id(self) -> &'static str {
        match self {
            ModelKind::RealEmbed => "real",
            ModelKind::CeSup => "ce-sup",
            ModelKind::CeMix => "ce-mix",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::RealEmbed => "Real-Embed",
            ModelKind::CeSup => "CE-Sup",
            ModelKind::CeMix => "CE-Mix",
        }
    }

    pub fn is_complex(self) -> bool {
        !matches!(self, ModelKind::RealEmbed)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "real-embed" => Ok(ModelKind::RealEmbed),
            "ce-sup" | "sup" => Ok(ModelKind::CeSup),
            "ce-mix" | "mix" => Ok(ModelKind::CeMix),
            other => Err(Error::Config(format!(
                "unknown model kind `{other}` (expected ce-sup, ce-mix or real)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub n: usize,
    pub r: usize,
    pub vocab_size: usize,
    pub seed: u64,
}

impl ModelConfig {
    /// Config with the default rank `⌊n/2⌋`.
    pub fn new(kind: ModelKind, n: usize, vocab_size: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            r: n / 2,
            vocab_size,
            seed,
        }
    }

    pub fn with_rank(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("dimension n={} must be >= 2", self.n)));
        }
        if self.r == 0 || self.r >= self.n {
            return Err(Error::Config(format!(
                "rank r={} must satisfy 1 <= r < n={}",
                self.r, self.n
            )));
        }
        if self.vocab_size == 0 {
            return Err(Error::Config("vocabulary is empty".into()));
        }
        Ok(())
    }

    /// Number of real coordinates in the flat parameter layout.
    pub fn parameter_count(&self) -> usize {
        match self.kind {
            ModelKind::RealEmbed => self.vocab_size * self.n + self.n + 1,
            _ => 2 * self.vocab_size * self.n + 2 * self.n * self.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Parameters {
    Complex {
        table: ComplexEmbeddingTable,
        projector: RankRProjector,
    },
    Real {
        table: RealEmbeddingTable,
        head: LinearHead,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    config: ModelConfig,
    params: Parameters,
}

impl Model {
    /// Fresh model from the seeded initialization.
    pub fn init(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let params = match config.kind {
            ModelKind::RealEmbed => {
                let table = RealEmbeddingTable::init(config.vocab_size, config.n, config.seed);
                let head = LinearHead::zeros(config.n);
                Parameters::Real { table, head }
            }
            _ => Parameters::Complex {
                table: init_table(config.vocab_size, config.n, config.seed),
                projector: RankRProjector::init(config.n, config.r, config.seed)?,
            },
        };
        Ok(Self { config, params })
    }

    pub fn from_complex(
        kind: ModelKind,
        table: ComplexEmbeddingTable,
        projector: RankRProjector,
        seed: u64,
    ) -> Result<Self> {
        if !kind.is_complex() {
            return Err(Error::Config("complex parameters given for the real baseline".into()));
        }
        if projector.dim() != table.dim() {
            return Err(Error::Dimension {
                expected: table.dim(),
                got: projector.dim(),
            });
        }
        let config = ModelConfig {
            kind,
            n: table.dim(),
            r: projector.rank(),
            vocab_size: table.vocab_size(),
            seed,
        };
        config.validate()?;
        Ok(Self {
            config,
            params: Parameters::Complex { table, projector },
        })
    }

    pub fn from_real(table: RealEmbeddingTable, head: LinearHead, r: usize, seed: u64) -> Result<Self> {
        if head.weights.len() != table.dim() {
            return Err(Error::Dimension {
                expected: table.dim(),
                got: head.weights.len(),
            });
        }
        let config = ModelConfig {
            kind: ModelKind::RealEmbed,
            n: table.dim(),
            r,
            vocab_size: table.vocab_size(),
            seed,
        };
        config.validate()?;
        Ok(Self {
            config,
            params: Parameters::Real { table, head },
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn kind(&self) -> ModelKind {
        self.config.kind
    }

    pub fn complex_table(&self) -> Option<&ComplexEmbeddingTable> {
        match &self.params {
            Parameters::Complex { table, .. } => Some(table),
            Parameters::Real { .. } => None,
        }
    }

    pub fn complex_table_mut(&mut self) -> Option<&mut ComplexEmbeddingTable> {
        match &mut self.params {
            Parameters::Complex { table, .. } => Some(table),
            Parameters::Real { .. } => None,
        }
    }

    pub fn projector(&self) -> Option<&RankRProjector> {
        match &self.params {
            Parameters::Complex { projector, .. } => Some(projector),
            Parameters::Real { .. } => None,
        }
    }

    pub fn real_table(&self) -> Option<&RealEmbeddingTable> {
        match &self.params {
            Parameters::Real { table, .. } => Some(table),
            Parameters::Complex { .. } => None,
        }
    }

    pub fn linear_head(&self) -> Option<&LinearHead> {
        match &self.params {
            Parameters::Real { head, .. } => Some(head),
            Parameters::Complex { .. } => None,
        }
    }

    /// Named parameter groups, in checkpoint / flat-layout order.
    pub fn segments(&self) -> Vec<(&'static str, &[f64])> {
        match &self.params {
            Parameters::Complex { table, projector } => vec![
                ("embedding", bytemuck::cast_slice(table.as_slice())),
                ("projector", bytemuck::cast_slice(projector.factor_matrix().as_slice())),
            ],
            Parameters::Real { table, head } => vec![
                ("embedding", table.as_slice()),
                ("head_weights", head.weights.as_slice()),
                ("head_bias", std::slice::from_ref(&head.bias)),
            ],
        }
    }

    pub fn segments_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        match &mut self.params {
            Parameters::Complex { table, projector } => vec![
                ("embedding", bytemuck::cast_slice_mut(table.as_mut_slice())),
                (
                    "projector",
                    bytemuck::cast_slice_mut(projector.factor_matrix_mut().as_mut_slice()),
                ),
            ],
            Parameters::Real { table, head } => vec![
                ("embedding", table.as_mut_slice()),
                ("head_weights", head.weights.as_mut_slice()),
                ("head_bias", std::slice::from_mut(&mut head.bias)),
            ],
        }
    }

    /// A read-only evaluator with the projector factorized once.
    pub fn scorer(&self) -> Result<Scorer<'_>> {
        let projector = match &self.params {
            Parameters::Complex { projector, .. } => Some(projector.factorize()?),
            Parameters::Real { .. } => None,
        };
        Ok(Scorer {
            model: self,
            projector,
        })
    }

    pub fn forward(&self, token_ids: &[u32]) -> Result<f64> {
        self.scorer()?.probability(token_ids)
    }
}

/// Evaluates sentences against a frozen parameter snapshot.
pub struct Scorer<'a> {
    model: &'a Model,
    projector: Option<FactoredProjector<'a>>,
}

impl<'a> Scorer<'a> {
    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn factored_projector(&self) -> Option<&FactoredProjector<'a>> {
        self.projector.as_ref()
    }

    pub fn word_states(&self, token_ids: &[u32]) -> Result<Vec<WordState>> {
        let table = self
            .model
            .complex_table()
            .ok_or_else(|| Error::Config("real baseline has no complex word states".into()))?;
        token_ids.iter().map(|&id| table.lookup(id as usize)).collect()
    }

    /// Sentence state as used by the forward graph. CE-Sup uses the clamped
    /// normalization, so a near-cancelled superposition is slightly sub-unit
    /// rather than an error.
    pub fn sentence(&self, token_ids: &[u32]) -> Result<SentenceRepresentation> {
        if token_ids.is_empty() {
            return Err(Error::EmptySentence);
        }
        let weights = uniform_weights(token_ids.len());
        match &self.model.params {
            Parameters::Real { table, .. } => {
                let rows = token_ids
                    .iter()
                    .map(|&id| table.row(id as usize))
                    .collect::<Result<Vec<_>>>()?;
                real_mean(&rows)
            }
            Parameters::Complex { .. } => {
                let states = self.word_states(token_ids)?;
                match self.model.kind() {
                    ModelKind::CeMix => mix(&states, &weights),
                    _ => {
                        let (s, _, _) = superpose_clamped(&states, &weights, SUPERPOSITION_NORM_FLOOR);
                        Ok(SentenceRepresentation::PureState(s))
                    }
                }
            }
        }
    }

    pub fn probability(&self, token_ids: &[u32]) -> Result<f64> {
        let sentence = self.sentence(token_ids)?;
        match (&sentence, &self.model.params) {
            (SentenceRepresentation::RealMean(mean), Parameters::Real { head, .. }) => {
                head.logit(mean).map(sigmoid)
            }
            _ => self
                .projector
                .as_ref()
                .expect("complex models carry a projector")
                .born_probability(&sentence),
        }
    }

    pub fn predict(&self, token_ids: &[u32]) -> Result<u8> {
        Ok(u8::from(self.probability(token_ids)? >= DECISION_THRESHOLD))
    }
}
