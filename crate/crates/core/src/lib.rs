//! Construction, verification, search, and analysis of perfect periodic
//! autocorrelation sequences and arrays with the array orthogonality
//! property (AOP).
//!
//! Phase exponents are plain integers reduced modulo an alphabet order.
//! Every verdict (orthogonality, perfection, AOP) is decided by exact
//! arithmetic in the cyclotomic integers; the floating-point kernels are
//! advisory and are generic over [`Real`] so they run in `f32` or `f64`.
//! The exact kernels are generic over the coefficient width [`Coeff`].
//!
//! The aliases at the crate root fix the scalar types most callers want.

pub mod aop;
pub mod construct;
pub mod correlation;
pub mod cyclotomic;
pub mod error;
pub mod format;
pub mod indexfn;
pub mod quaternion;
pub mod scalar;
pub mod scatter;
pub mod search;
pub mod seq;

pub use error::{Error, Result};
pub use scalar::{Coeff, Real};

/// Exact cyclotomic integer with 64-bit coefficients.
pub type Cyclotomic = cyclotomic::CyclotomicInt<i64>;
/// Exact correlation profile with 64-bit coefficients.
pub type Profile = correlation::CorrelationProfile<i64>;
/// Exact projection sequence with 64-bit coefficients.
pub type Projection = seq::ProjectionSequence<i64>;
/// Double-precision complex value used by the float kernels.
pub type Complex64 = num_complex::Complex<f64>;
/// Double-precision scatter trace.
pub type Trace = scatter::ScatterTrace<f64>;

pub use aop::{AopCondition, AopVerdict, Witness};
pub use indexfn::{FlooredIndex, IndexFunction, PolyIndex};
pub use quaternion::{Convention, QuatUnit, Quaternion, QuaternionSequence};
pub use scatter::BiQuadraticSpec;
pub use search::{Family, SearchReport, SearchSpec};
pub use seq::{PhaseArray, PhaseSequence, ProjectionAxis};
