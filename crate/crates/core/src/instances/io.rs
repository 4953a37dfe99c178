use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::grid::{Cell, GridMap};
use crate::error::{invalid, Error, Result};
use crate::instance::{AdjacencyInstance, BtspInstance, EuclideanInstance, Matrix};

pub const INSTANCE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Euclidean,
    Adjacency,
}

/// On-disk instance:
/// `{"kind", "n", "coords" | "a1" + "a2", "seed", "meta", "schema_version"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<Vec<Vec<f64>>>,
    pub seed: u64,
    #[serde(default)]
    pub meta: Map<String, Value>,
    #[serde(default = "default_version")]
    pub schema_version: u32,
}

fn default_version() -> u32 {
    INSTANCE_SCHEMA_VERSION
}

impl InstanceFile {
    pub fn from_instance(inst: &BtspInstance, seed: u64, meta: Map<String, Value>) -> Self {
        let (kind, coords, a1, a2) = match inst {
            BtspInstance::Euclidean(e) => (InstanceKind::Euclidean, Some(e.coords().to_vec()), None, None),
            BtspInstance::Adjacency(a) => {
                (InstanceKind::Adjacency, None, Some(a.a1().to_rows()), Some(a.a2().to_rows()))
            }
        };
        Self { kind, n: inst.n(), coords, a1, a2, seed, meta, schema_version: INSTANCE_SCHEMA_VERSION }
    }

    /// Validates the file and builds the instance it describes.
    pub fn to_instance(&self) -> Result<BtspInstance> {
        if self.schema_version > INSTANCE_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "instance schema_version {} is newer than supported {INSTANCE_SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let inst: BtspInstance = match (self.kind, &self.coords, &self.a1, &self.a2) {
            (InstanceKind::Euclidean, Some(c), None, None) => EuclideanInstance::new(c.clone())?.into(),
            (InstanceKind::Adjacency, None, Some(a1), Some(a2)) => {
                AdjacencyInstance::new(Matrix::from_rows(a1)?, Matrix::from_rows(a2)?)?.into()
            }
            (InstanceKind::Euclidean, ..) => return invalid("euclidean instance needs exactly `coords`"),
            (InstanceKind::Adjacency, ..) => return invalid("adjacency instance needs exactly `a1` and `a2`"),
        };
        if inst.n() != self.n {
            return invalid(format!("declared n = {} but data has {} cities", self.n, inst.n()));
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// On-disk grid map: `{"width", "height", "obstacles": [[r, c], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMapFile {
    pub width: usize,
    pub height: usize,
    pub obstacles: Vec<[usize; 2]>,
}

impl From<&GridMap> for GridMapFile {
    fn from(map: &GridMap) -> Self {
        Self {
            width: map.width(),
            height: map.height(),
            obstacles: map.obstacles().into_iter().map(|(r, c)| [r, c]).collect(),
        }
    }
}

impl TryFrom<GridMapFile> for GridMap {
    type Error = Error;

    fn try_from(f: GridMapFile) -> Result<Self> {
        let cells: Vec<Cell> = f.obstacles.iter().map(|&[r, c]| (r, c)).collect();
        GridMap::from_obstacles(f.width, f.height, &cells)
    }
}
