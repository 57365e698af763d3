//! Homomorphism counting: the constant-space walk over matched elimination
//! trees and the circuit construction over matched tree decompositions.

mod circuit;
mod constraint;
mod mtd;
mod ring;

pub use circuit::{
    build_hom_circuit, count_hom_mtw, count_with_plan, evaluate_circuit, CircuitPlan, GateSink,
    HomCircuit,
};
pub use constraint::{all_hold, Constraint};
pub use mtd::{count_hom_mtd, estimated_work, HostProfile};
pub use ring::{CheckedU128, EvalRing, Naturals};
