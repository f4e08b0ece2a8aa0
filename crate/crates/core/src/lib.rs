//! Generalized number systems over orders of number fields.
//!
//! A generalized number system is a pair `(p, D)` where `p` is a monic
//! polynomial over an order `O` and `D` is a complete residue system of `O`
//! modulo `p(0)` containing `0`. The library builds digit sets from
//! fundamental domains, expands polynomials by backward division, decides the
//! finiteness property with certified bounds, and checks the dominant
//! condition and related shift criteria.

pub mod ball;
pub mod criteria;
pub mod digits;
pub mod domain;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod order;
pub mod poly;
pub mod roots;

pub use ball::{Ball, Rat};
pub use criteria::{
    check_dominant, delta_set, non_finiteness_family, shift_search, taylor_shift, z_set, Condition, DominantReport,
    FamilyNote, FamilyRecord, ShiftMode, ShiftSearchResult, ShiftSign, TrailEntry, DEFAULT_Z_CAP,
};
pub use digits::DigitSet;
pub use domain::{verify_tiling, BoxDomain, FundamentalDomain, HypothesisFlags, NeighborSet, SailDomain, SailVariant, TilingReport};
pub use engine::{
    DecideOptions, DecisionReport, ExpandOutcome, Expansion, FailureReason, GnsInstance, LengthBound, StateBound, Verdict,
    Witness, DEFAULT_BITS, DEFAULT_MAX_STATES,
};
pub use error::{GnsError, Result};
pub use order::{EmbeddingMatrix, MulMatrix, Order, OrderElement, RationalVector};
pub use poly::{conjugate_product, is_expansive, Expansivity, IntPoly, NonExpansiveReason, OPoly};
pub use roots::DEFAULT_PRECISION_CAP;
