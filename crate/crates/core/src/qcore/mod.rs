//! Scalar building blocks: q-Pochhammer symbols, the theta function,
//! basic hypergeometric series and the two q-exponentials.

mod exponential;
mod hypergeometric;
mod modulus;
mod pochhammer;
mod spiral;
mod summation;
mod theta;
mod truncation;

pub use exponential::{
    big_e_exp, big_e_exp_detailed, big_e_exp_product, e_exp, e_exp_detailed, e_exp_product,
};
pub use hypergeometric::{rphis, rphis_detailed};
pub use modulus::QModulus;
pub use pochhammer::{
    qpochhammer_inf, qpochhammer_inf_multi, qpochhammer_inf_shifted_pole, qpochhammer_n,
};
pub use spiral::{Nearest, Spiral, DEFAULT_DELTA};
pub use summation::Summed;
pub use theta::{theta, theta_detailed, theta_product, theta_sum};
pub use truncation::Truncation;

pub(crate) use summation::{sum_bilateral, sum_terms};
