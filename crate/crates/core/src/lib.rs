//! Minimal measurement-based resource states for concatenated Clifford tasks.

pub mod aux_ops;
pub mod bits;
pub mod codes;
pub mod concat;
pub mod error;
pub mod gf2;
pub mod graph_state;
pub mod oracle;
pub mod pauli;
pub mod stabilizer;
pub mod tasks;

pub use aux_ops::{AuxOps, Side};
pub use bits::Bits;
pub use codes::{CodeKind, CodeSpec, Party};
pub use error::{ForgeError, Result};
pub use graph_state::{GraphState, LocalClifford};
pub use pauli::{PauliFactor, PauliString};
pub use stabilizer::{Role, StabilizerTableau};
