//! Formaldimine geometry, integral sources over a coordinate space, scans,
//! and the two intersection searches.

mod branching;
mod formaldimine;
mod scan;
mod search;
mod surface;

pub use branching::{BranchingSpace, ProjectorErrors};
pub use formaldimine::{bond_angle, build_formaldimine, dihedral, internal_jacobian, Atom, GeometrySpec, ANGLE_NCH, D_CH, D_NC, D_NH};
pub use scan::{line_grid, pes_scan, pes_scan_chains, PointStatus, ScanRow, ScanTable};
pub use search::{ci_search_2d, composite_gradient, meci_search, CiSearchOptions, MeciOptions, SearchResult, StopReason, TrajectoryRow};
pub use surface::{CoordinateMap, IntegralSource, PointDerivatives, Surface, SurfacePoint};
