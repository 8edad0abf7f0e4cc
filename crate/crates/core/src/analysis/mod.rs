//! Homomorphisms, data-exchange equivalence and the inverse-type lattice.

mod classify;
mod homomorphism;

pub use classify::{
    classify, classify_chain, data_exchange_equivalent, data_exchange_equivalent_chain,
    Classification, ClassificationReport, InverseType,
};
pub use homomorphism::{
    find_homomorphism, find_homomorphism_with, is_isomorphic, Homomorphism, SearchOptions,
};
