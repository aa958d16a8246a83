//! Stable matchings that survive errors in the preference lists.
//!
//! The crate builds the rotation poset of a stable marriage instance,
//! represents sublattices of the stable lattice as compressions of that
//! poset, finds the edge sets (bouquets) that define the matchings surviving
//! one error, and combines them to decide whether a fully robust stable
//! matching exists and to pick one of maximum weight.
//!
//! ```
//! use robust_stable::{build_robust, build_rotation_poset, fixtures, ErrorSpec};
//!
//! let a = fixtures::example_a();
//! let poset = build_rotation_poset(&a);
//! let errors = ErrorSpec::parse_file(fixtures::EXAMPLE_ERROR, a.n()).unwrap();
//! let result = build_robust(&poset, &a, &errors).unwrap();
//! assert_eq!(result.witness.unwrap().to_string(), "{a1,b2,c3,d4}");
//! ```

pub use fixedbitset::FixedBitSet;

pub mod bouquet;
pub mod compression;
pub mod fixtures;
pub mod flow;
pub mod generate;
pub mod instance;
pub mod matching;
pub mod oracle;
pub mod order;
pub mod robust;
pub mod rotations;

pub use bouquet::{
    canonical_path, find_bouquet, verify_bouquet, Bouquet, BouquetError, BouquetRun, CanonicalPath, Flower,
    MembershipOracle, Orientation,
};
pub use compression::{
    closed_sets_of_meta, compression_from_sublattice, crosses, minimize_edges, separates, shrink,
    sublattice_from_edges, Edge, EdgeSet, MetaPoset,
};
pub use generate::{generate, GeneratorConfig, GeneratorMode};
pub use instance::{Instance, InstanceError, ParseError, Side};
pub use matching::{blocking_pairs, deferred_acceptance, dominates, is_stable, join, meet, BlockingPair, Matching};
pub use order::{Elem, Order};
pub use robust::{
    apply_error, build_robust, edges_for_error, max_weight_robust, robust_matchings, ErrorSpec, RobustResult,
    WeightFunction,
};
pub use rotations::{build_rotation_poset, eliminate, exposed_rotations, ClosedSet, Rotation, RotationPoset, S, T};
