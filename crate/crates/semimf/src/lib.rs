//! Exact symbolic computation with Grassmann algebras, polynomial supermaps
//! and noninvertible gluing data.

pub mod atlas;
pub mod bundle;
pub mod cli;
pub mod format;
pub mod grassmann;
pub mod homotopy;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod solver;
pub mod supermap;

pub use atlas::{
    AtlasError, ChartKind, NicenessReport, NicenessWitness, SemiAtlas, TowerSemigroup,
};
pub use bundle::{
    check_semi_section, fiber_action, BundleError, SemiBundle, MIXED_CYCLE_SHAPES,
};
pub use format::{parse, pad_map_source, serialize, Document, FormatError, MapDecl, TaskSpec};
pub use grassmann::{GrassmannElement, GrassmannError, Parity};
pub use homotopy::{odd_average_solutions, HomotopyError, ParameterKind, SemiHomotopy};
pub use report::{RelationReport, Verdict};
pub use poly::{PolyError, SuperPolynomial, VarMonomial};
pub use solver::{
    annihilator, default_degree_bound, mult_operator_matrix, solve_linear, solve_map_ansatz,
    try_invert, MapAnsatz, MapSolutionSet, SolutionSet, SolverError,
};
pub use supermap::{
    orientation_class, Berezinian, OrientationClass, Sign, SuperDomainSignature, SuperJacobian,
    SuperMap, SuperMapError,
};
