//! Continued fractions for binomial powers `(1+x)^n` and their limiting
//! forms: `tan nφ`, `arctan t`, `tan θ`, `ln((1+z)/(1−z))` and `v·coth v`.
//!
//! * [`kernel`]: scalar modes (f64, exact rationals, complex f64) and tolerances.
//! * [`engine`]: convergents, Lentz and backward evaluation, tails, equivalence transforms.
//! * [`families`]: the eight fraction generators.
//! * [`oracle`]: independent closed-form and series reference values.
//! * [`verify`]: the identity suite run by `cfkit verify`.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod engine;
pub mod families;
pub mod kernel;
pub mod oracle;
pub mod verify;

pub use engine::{CfStream, CfTerm, Convergent, EvalReport};
pub use families::{Exponent, Family, FamilySpec};
pub use kernel::{Mode, Scalar, ScalarValue, ToleranceSpec};
