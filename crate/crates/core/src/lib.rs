//! Finite-window certificates for Furstenberg families of subsets of `Z+` and for
//! the classification of transitive symbolic systems.
//!
//! Every verdict in this crate is relative to a window `[0, horizon)` and a set of
//! detector parameters; nothing here decides membership of an infinite set.

pub mod certificate;
pub mod classify;
pub mod construct;
pub mod detect;
pub mod error;
pub mod family;
pub mod format;
pub mod replay;
pub mod symbolic;
pub mod window;

pub use certificate::{ClassCertificate, ClassTag, Scale, Verdict, Witness};
pub use classify::{check_report_invariants, classify_point, ClassReport, Scales};
pub use detect::DetectorRequest;
pub use error::{Error, Result};
pub use symbolic::{Cylinder, SymbolicWord};
pub use window::{finite_sums, WindowSet};
