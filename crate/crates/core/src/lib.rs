//! Finite partial group actions: validation under both axiomatizations,
//! orbit quotients and sections, enveloping spaces, quotient-group actions,
//! tower descent along normal chains, the Birget-Rhodes expansion and the
//! action groupoid.

pub mod action;
pub mod algebra;
pub mod batch;
pub mod fixtures;
pub mod globalization;
pub mod group;
pub mod instance;
pub mod orbits;
pub mod properties;
pub mod tower;

pub use action::{GlobalAction, PartialAction, PointSet, ValidationReport, Violation};
pub use algebra::{ActionGroupoid, Arrow, BrElement};
pub use batch::Execution;
pub use globalization::{envelope, EnvelopingSpace, QuotientGroupAction};
pub use group::{FiniteGroup, Subgroup};
pub use orbits::{OrbitQuotient, Section};
pub use tower::NormalChain;
