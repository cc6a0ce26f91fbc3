//! Informational reconstruction toolkit for systems of N qubits.
//!
//! The crate models an observer's catalogue of binary questions about an
//! N-qubit system, the compatibility/complementarity structure of that
//! catalogue, and the time evolution that permutes maximal question sets.
//! Everything is phrased in the Bloch representation: a state is the vector
//! of expectation values over the 4^N - 1 non-trivial Pauli strings, and
//! evolution acts as special orthogonal matrices on that vector.
//!
//! Modules build on each other in order: `pauli` (operator kernel),
//! `questions` (relations and maximal sets), `bloch` (states and information
//! measures), `generators` (swap generators and their exponentials),
//! `states` (pure-state characterisation, seeds, decompositions),
//! `interrogation` (Born probabilities and measurement updates).

pub mod bloch;
pub mod generators;
pub mod interrogation;
pub mod pauli;
pub mod questions;
pub mod states;

pub use bloch::BlochVector;
pub use generators::{EvolutionMatrix, GeneratorLabel, SwapGenerator};
pub use interrogation::{InterrogationRecord, QuestionVector};
pub use pauli::{Axis, PauliProduct, Phase, QuestionIndex};
pub use questions::{ComplementaritySet, CorrelationTriangle, Parity, Relation};
pub use states::{Decomposition, PureStateSample, SeedConvention, SeedSet};
