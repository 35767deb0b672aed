//! Exact symbolic workbench for nested-commutator symmetry analysis of
//! linear differential operators.
//!
//! The crate has three layers:
//!
//! * an exact coefficient world — Gaussian rationals, Laurent monomials in
//!   symbolic physical parameters, coordinate polynomials, and a
//!   fraction-free linear solver over that ring ([`scalar`], [`param`],
//!   [`coord`], [`linsys`]);
//! * the operator algebra — normal-ordered differential operators,
//!   composition by the generalized Leibniz rule, plain and nested
//!   commutators, reduction modulo a base operator, a catalog of named
//!   operators, and the bounded-degree symmetry solver ([`diffop`],
//!   [`catalog`], [`symmetry`]);
//! * a numeric verification world — one-parameter coordinate flows with a
//!   Runge-Kutta cross-check, and plane-wave dispersion, boost, and
//!   weight-function checks ([`flows`], [`waves`]).
//!
//! Everything in the exact layer is immutable and pure; results are
//! deterministic for a fixed input ordering.

pub mod catalog;
pub mod coord;
pub mod diffop;
pub mod display;
pub mod flows;
pub mod linsys;
pub mod param;
pub mod scalar;
pub mod symmetry;
pub mod waves;

pub use coord::{CoordMonomial, CoordPolynomial};
pub use diffop::{DerivIndex, DiffOp, ReduceError};
pub use param::{Param, ParamBinding, ParamError, ParamMonomial, ParamScalar};
pub use scalar::GaussianRational;
