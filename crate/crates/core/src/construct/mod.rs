//! Staged constructions and set generators.

pub mod appendix;
pub mod generators;
pub mod wtp;

pub use appendix::{
    build_appendix, verify_claim1, verify_claim2, verify_separation, verify_trace, AppendixTrace,
};
pub use generators::{
    gen_dilated_thick, gen_fs, gen_random, gen_syndetic, gen_thick, geometric_runs,
    weakly_thick_pool, witness_pool, RunSpec,
};
pub use wtp::{build_wtp, verify_wtp, StartSpec, WtpSpec, WtpTrace};
