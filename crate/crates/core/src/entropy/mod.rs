//! Entropy numbers of finite witness samples: exact restricted-centers
//! search, greedy covers, farthest-point packings, and counted sparse
//! cover families.

pub mod certificate;
pub mod cover;
pub mod experiments;
pub mod metric;
pub mod profile;
pub mod sparse_cover;

pub use certificate::{CoverCertificate, PackingCertificate, Provenance};
pub use cover::{exact_entropy_small, exact_min_centers, farthest_point_packing, farthest_point_traversal, greedy_cover, ExactCover, Traversal};
pub use experiments::{ball_entropy_experiment, duality_sum_check, octahedron_entropy_experiment, DualityReport, DualityStatus};
pub use metric::{DistanceMatrix, Metric};
pub use profile::{traversal_brackets, EntropyProfile};
pub use sparse_cover::{coordinate_ball_bound, coordinate_cover, cover_from_sparse};
