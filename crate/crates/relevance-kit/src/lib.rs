//! Exact deciders, reductions, and certification tools for coordinate
//! relevance in finite decision problems.
//!
//! A decision problem is a finite action set, a product state space, and an
//! exact rational utility table. The library answers which coordinates of
//! the state an optimizer actually depends on — sufficiency, anchors,
//! minimum sufficient sets — across four regimes (explicit, succinct,
//! stochastic, sequential), with certified step counts, checkable
//! witnesses, constructive hardness gadgets, structure-exploiting fast
//! paths, and budget-aware certifiers that abstain rather than guess.

pub mod certify;
pub mod circuit;
pub mod deciders;
pub mod model;
pub mod reductions;
pub mod sequential;
pub mod stochastic;
pub mod tractable;
pub mod translate;
