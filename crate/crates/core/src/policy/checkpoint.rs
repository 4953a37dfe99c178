use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CriticParams, FeatureSchema, PolicyParams, CRITIC_DIM, FEATURE_DIM};
use crate::error::{Error, Result};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Trained parameters on disk:
/// `{"theta":[..],"phi":[..],"lambdas":[..],"schema_version":1,"feature_schema":"v1"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub schema_version: u32,
    pub feature_schema: FeatureSchema,
}

impl Checkpoint {
    pub fn new(policy: &PolicyParams, critic: &CriticParams, lambdas: &[f64]) -> Self {
        Self {
            theta: policy.theta.clone(),
            phi: critic.phi.clone(),
            lambdas: lambdas.to_vec(),
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            feature_schema: policy.schema,
        }
    }

    pub fn policy(&self) -> Result<PolicyParams> {
        PolicyParams::new(self.theta.clone(), self.feature_schema)
    }

    pub fn critic(&self) -> Result<CriticParams> {
        CriticParams::new(self.phi.clone())
    }

    fn check(self) -> Result<Self> {
        if self.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "checkpoint schema_version {} (supported: {CHECKPOINT_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.theta.len() != FEATURE_DIM || self.phi.len() != CRITIC_DIM {
            return Err(Error::Schema(format!(
                "checkpoint has {} actor and {} critic weights, expected {FEATURE_DIM} and {CRITIC_DIM}",
                self.theta.len(),
                self.phi.len()
            )));
        }
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<Self>(s)?.check()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
