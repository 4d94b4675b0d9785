//! Executable models for automatic structures on finitely generated groups.
//!
//! The crate is organized as a pipeline of layers:
//!
//! * [`fsa`] — finite-state automata over labelled alphabets, including the
//!   padded convolution of two languages and the usual boolean/rational
//!   operations. Everything downstream stores languages as automata.
//! * [`groups`] — small evaluable group models (free, free abelian, finite,
//!   direct products, free-by-finite-index) with word evaluation, ball
//!   enumeration and word-metric distances.
//! * [`structures`] — a language paired with a marked group model, plus the
//!   empirical checks: fellow-traveller constants (synchronous, asynchronous
//!   and two-sided), departure functions, representative-length constants,
//!   rational-section coverage and equivalence of structures.
//! * [`homs`] — homomorphisms between group models, the bounded-reduction
//!   checks for them (Hausdorff, synchronous, fellow-traveller input/output),
//!   the Gromov-product check for free groups and an exact decision procedure
//!   for which free-group endomorphisms satisfy the synchronous bounded
//!   reduction property on geodesics.
//! * [`subgroups`] — membership oracles, empirical quasiconvexity, and the
//!   kernel/equalizer/fixed-subgroup/centralizer pipelines.
//! * [`constructions`] — new structures from old: direct products via
//!   convolution, subgroup rewriting systems, structures induced along a
//!   homomorphism, and the pulled-back structure for a homomorphism with
//!   finite kernel and quasiconvex image.
//! * [`gallery`] — the bundled worked examples used by the CLI and the
//!   acceptance suite, and their JSON definition files.
//!
//! All checks are bounded verifications: they sweep words and group elements
//! up to explicit length/radius caps and report either a constant together
//! with the bound it was verified to, or a failure witness plus a growth
//! trace of the best constant per bound.

pub mod constructions;
pub mod fsa;
pub mod gallery;
pub mod groups;
pub mod homs;
pub mod io;
pub mod report;
pub mod structures;
pub mod subgroups;

pub use report::{CheckReport, GrowthTrace, Verdict, Witness};
