//! Dense complex Hermitian linear algebra.

mod eigh;
mod hermitian;
mod matrix;
mod norms;
mod projection;
pub mod vector;

pub use eigh::{eigh, Eigh};
pub(crate) use eigh::jacobi;
pub use hermitian::HermitianOperator;
pub use matrix::{CMatrix, CVector, C64};
pub use norms::{op_abs, operator_norm, schatten_norms, SchattenNorms};
pub use projection::{difference, join, meet, rank_one, OrthProjection};
pub(crate) use projection::shared_directions;
