//! Closed-form quantities: digamma, concentration centers, tail bounds,
//! sufficient measurement counts, covering sizes and perturbation envelopes.

mod bounds;
mod digamma;
mod perturbation;

pub use bounds::{
    check_volume_embedding, lemma1_tail, log_covering_cardinality, measurement_bound_corollary1,
    measurement_bound_davies, measurement_bound_davies_pairwise, measurement_bound_length,
    measurement_bound_theorem1, order_estimate, BoundParams, OrderMode, DEFAULT_C, DEFAULT_C_PRIME,
};
pub use digamma::{
    digamma, sine_product_center, volume_ratio_center, volume_ratio_center_asymptotic, volume_ratio_center_sum,
};
pub use perturbation::{
    min_column_distance_floor, perturbation_envelope, smallest_singular_floor, PerturbationEnvelope,
};
