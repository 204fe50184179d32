//! Code constructions: random regular LDPC matrices, ML-designed
//! full-diversity matrices and root-LDPC codes.

pub mod degree;
pub mod ml;
pub mod regular;
pub mod root;

pub use degree::DegreeDistribution;
pub use ml::{build_random_full_diversity, build_wstar2, build_wstar3, is_ml_full_diversity};
pub use regular::random_regular_ldpc;
pub use root::{build_root_irregular, build_root_regular, CheckClass, ColumnClass, RootLdpcCode};
