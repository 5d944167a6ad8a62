//! Empirical verification of the embedding and Nikol'skij-type inequalities
//! on seeded ensembles of band-limited fields.

pub mod ensemble;
pub mod ratios;
pub mod report;
pub mod suites;

pub use ensemble::{generate, generate_bands, EnsembleKind, EnsembleSpec};
pub use ratios::{
    check_balance, mixed_npp_ratio, npp_ratio, seq_npp_ratio, sobolev_ratio, sobolev_ratio_bands, RatioTrial,
    SobolevParams,
};
pub use report::{LinearFit, Verdict, VerificationReport};
pub use suites::{
    FieldKind, Lemma1Suite, MixedNppSuite, NppSuite, SeqNppSuite, SobolevSuite, SubaddSuite, SweepSuite,
    SLOPE_TOLERANCE,
};
