//! Orthogonality measures of three-term recurrences.

pub mod askey;
pub mod classify;
pub mod jacobi;
pub mod measure;
pub mod qpoch;
pub mod quadrature;

pub use askey::{
    al_salam_carlitz_measure, askey_wilson_case, askey_wilson_measure, aw_counts, big_q_jacobi_measure,
    little_q_jacobi_measure, AwCase,
};
pub use classify::{check_support_interval, classify_nu, classify_nu_with, NuOptions, SupportInfo};
pub use jacobi::{
    classify_signs, favard_classify, jacobi_from_recurrence, moments_from_jacobi, FavardClass, FavardReport,
    JacobiMatrix,
};
pub use measure::{Affine, Atom, Density, Family, OrthMeasure};
pub use qpoch::{qpoch, qpoch_inf, qpoch_inf_complex, InfiniteProduct};
pub use quadrature::{golub_welsch, Quadrature};
