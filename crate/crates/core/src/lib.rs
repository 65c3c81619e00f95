//! Exact symbolic calculus of pseudodifferential operators in several
//! variables: the Leibniz product with windowed truncation, adjoints,
//! residues and `±` splits, wave functions and their residue identities,
//! dressing and Lax/Zakharov–Shabat checks, and the Miwa-shift machinery for
//! polynomial tau functions.
//!
//! Everything is generic over an exact scalar field `F: Scalar`; the aliases
//! below fix `F` to arbitrary-precision rationals.

pub mod error;
pub mod hierarchy;
pub mod jet;
pub mod multi_index;
pub mod poly;
pub mod psdo;
pub mod scalar;
pub mod series;
pub mod tau;
pub mod time_poly;
pub mod wave;
pub mod window;

pub use error::{Error, Result};
pub use jet::{Alphabet, FlowRules, Jet, Symbol};
pub use multi_index::MultiIndex;
pub use poly::{Monomial, Poly};
pub use psdo::PsdOp;
pub use scalar::{Coefficient, Scalar};
pub use series::{GroupKind, LaurentSeries};
pub use time_poly::TimeVar;
pub use wave::WaveSymbol;
pub use window::Window;

pub type Rational = num_rational::BigRational;

pub type QDiffPoly = jet::DiffPoly<Rational>;
pub type QTimePoly = time_poly::TimePoly<Rational>;
pub type QPsdOp = PsdOp<Rational>;
pub type QFlowRules = FlowRules<Rational>;
pub type QWaveSymbol = WaveSymbol<Rational>;
