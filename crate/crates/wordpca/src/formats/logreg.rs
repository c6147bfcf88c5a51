//! JSON persistence for trained classifiers.

use serde::{Deserialize, Serialize};
use wordpca_core::classifier::Standardizer;
use wordpca_core::{LogRegConfig, LogRegModel, TrainingSummary};

use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub classes: Vec<String>,
    /// `[classes, features + 1]`; the last column is the bias.
    pub shape: [usize; 2],
    /// Row-major weights.
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardizer: Option<StandardizerFile>,
    pub training: TrainingMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerFile {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub final_loss: f64,
    pub converged: bool,
    pub l2_strength: f64,
    pub config: ClassifierConfig,
}

/// Serializable mirror of [`LogRegConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub l2_strength: Option<f64>,
    pub max_iters: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    pub standardize: bool,
}

impl From<&LogRegConfig> for ClassifierConfig {
    fn from(c: &LogRegConfig) -> Self {
        ClassifierConfig {
            l2_strength: c.l2_strength,
            max_iters: c.max_iters,
            tolerance: c.tolerance,
            initial_step: c.initial_step,
            standardize: c.standardize,
        }
    }
}

impl From<&ClassifierConfig> for LogRegConfig {
    fn from(c: &ClassifierConfig) -> Self {
        LogRegConfig {
            l2_strength: c.l2_strength,
            max_iters: c.max_iters,
            tolerance: c.tolerance,
            initial_step: c.initial_step,
            standardize: c.standardize,
        }
    }
}

impl From<&LogRegModel> for ModelFile {
    fn from(m: &LogRegModel) -> Self {
        let s = m.summary();
        ModelFile {
            classes: m.classes().to_vec(),
            shape: [m.classes().len(), m.num_features() + 1],
            weights: m.weights().to_vec(),
            standardizer: m.standardizer().map(|s| StandardizerFile { mean: s.mean.clone(), scale: s.scale.clone() }),
            training: TrainingMetadata {
                iterations: s.iterations,
                final_gradient_norm: s.final_gradient_norm,
                final_loss: s.final_loss,
                converged: s.converged,
                l2_strength: s.l2_strength,
                config: m.config().into(),
            },
        }
    }
}

impl ModelFile {
    pub fn into_model(self) -> Result<LogRegModel> {
        let t = self.training;
        let summary = TrainingSummary {
            iterations: t.iterations,
            final_gradient_norm: t.final_gradient_norm,
            final_loss: t.final_loss,
            converged: t.converged,
            l2_strength: t.l2_strength,
            loss_history: Vec::new(),
        };
        if self.shape[0] != self.classes.len() || self.shape[1] == 0 {
            return Err(crate::Error::InvalidArgument(format!(
                "shape {:?} does not match {} classes",
                self.shape,
                self.classes.len()
            )));
        }
        Ok(LogRegModel::from_parts(
            self.classes,
            self.shape[1] - 1,
            self.weights,
            self.standardizer.map(|s| Standardizer { mean: s.mean, scale: s.scale }),
            summary,
            (&t.config).into(),
        )?)
    }
}

pub fn to_json(model: &LogRegModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelFile::from(model))?)
}

pub fn from_json(text: &str) -> Result<LogRegModel> {
    serde_json::from_str::<ModelFile>(text)?.into_model()
}
