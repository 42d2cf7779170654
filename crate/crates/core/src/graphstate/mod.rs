//! Graphs, graph states, the syndrome basis |G_u⟩ and a stabilizer tableau.

pub mod graph;
pub mod state;
pub mod tableau;

pub use graph::{Graph, Roles};
pub use state::{
    build_graph_state, pauli_expectation, stabilizer_generator, syndrome_state, GraphState,
    PauliExpectation, Representation,
};
pub use tableau::{tableau_measure_pauli, StabilizerTableau};
