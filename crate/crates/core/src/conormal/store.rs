use serde::{Deserialize, Serialize};

use crate::exactalg::Subspace;
use crate::varieties::VarietySpec;

/// Identifies a cached saturation piece. The saturation depends on the
/// variety, the prime, and through the random linear form on `seed`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceKey {
    pub variety: VarietySpec,
    pub quantity: String,
    pub degree: u32,
    pub prime: u64,
    pub window: u32,
    pub m_cap: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoredPiece {
    pub sat: Subspace,
    pub stabilization_m: u32,
    pub chain_dims: Vec<usize>,
}

/// Persistent storage for saturation pieces. Entries that fail to load are
/// recomputed, so implementations may return `None` for anything doubtful.
pub trait PieceStore: Send + Sync {
    fn load(&self, key: &PieceKey) -> Option<StoredPiece>;
    fn save(&self, key: &PieceKey, piece: &StoredPiece);
}
