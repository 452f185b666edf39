//! Exact sheaf cohomology on products of projective spaces `P^{n_1} x ... x P^{n_t}`
//! and a splitting test for vector bundles with respect to a Segre-Veronese
//! polarization `O(d_1, ..., d_t)`.

pub mod bott;
pub mod cech;
pub mod coxring;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod sheaves;
pub mod splitter;
pub mod table;
pub mod tate;

pub use bott::{line_bundle_h, CohomologyVector};
pub use cech::{CechEngine, CechError, CechOptions};
pub use coxring::{FreeSum, LineBundleComplex, MultiHomogPoly, PolyMatrix};
pub use lattice::{MultiDegree, Polarization, ProductSpace, Window};
pub use linalg::FieldSpec;
pub use splitter::{split_check, split_check_table, SplitVerdict, VerdictReport};
pub use table::{Cell, CellStatus, CohomologyTable};
