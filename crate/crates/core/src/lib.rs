//! Bi-objective TSP front approximation.
//!
//! The objective space is split into preference cones; each cone's
//! problem (minimize the objective norm subject to staying on the
//! preference ray) is relaxed with a Lagrange multiplier and solved either
//! by local search ([`search`]) or by a policy-gradient actor trained
//! across preferences ([`policy`]). Evolutionary and scalarization
//! baselines, hypervolume metrics and grid-map instances round it out, and
//! [`concave`] shows the decomposition on a continuous problem whose front
//! linear scalarization cannot cover.

pub mod archive;
pub mod baselines;
pub mod concave;
pub mod decomposition;
mod error;
pub mod instance;
pub mod instances;
pub mod metrics;
pub mod objective;
pub mod policy;
pub mod rng;
pub mod search;
pub mod tour;

pub use archive::{ArchiveEntry, ParetoArchive};
pub use decomposition::{
    cone_constraint, generate_preferences, lagrangian_reward, surrogate_objective, update_multipliers,
    MultiplierState, PreferenceSet, PreferenceVector,
};
pub use error::{Error, Result};
pub use instance::{
    evaluate_adjacency, evaluate_euclidean, AdjacencyInstance, BtspInstance, CostMatrices, EuclideanInstance, Matrix,
};
pub use objective::{dominates, nondominated_filter, ObjectiveVector};
pub use rng::RngSeed;
pub use tour::Tour;
