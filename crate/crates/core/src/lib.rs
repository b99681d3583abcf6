//! Accountable e-discovery: Label-Verification protocols between a
//! producing party, a requesting party and a trusted mediator, continuous
//! active learning on top of them, critical-point disclosure in the
//! realizable case, and the experiment harness that checks their
//! guarantees.
//!
//! The core is generic over the scalar type; `f64` is the default and the
//! aliases below name both precisions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cal;
pub mod critical;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod highdim;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod parties;
pub mod protocols;
pub mod rng;
pub mod scalar;
pub mod svm;

pub use error::{Error, Result};
pub use model::{
    nrd, recall, DocId, Document, GroundTruth, Instance, Label, LabelReport, LinearModel, OneDimInstance, Point,
    ProtocolOutcome, Threshold,
};
pub use parties::{AliceOracle, AliceStrategy, Bob, BobOracle, Court, CourtOracle};
pub use protocols::{ClassifierReportConfig, LabelReportConfig, Subprotocol};
pub use scalar::Scalar;

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type OneDimInstance64 = OneDimInstance<f64>;
pub type OneDimInstance32 = OneDimInstance<f32>;
pub type LinearModel64 = LinearModel<f64>;
pub type LinearModel32 = LinearModel<f32>;
