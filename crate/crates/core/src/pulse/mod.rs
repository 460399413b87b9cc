//! Spin-system Hamiltonians, pulse sequences and gate constructions.

mod gates;
mod sequence;
mod system;

pub use gates::{cnot, cnot_unitary, coherence_order, crusher, not_gate, toffoli};
pub use sequence::{Axis, Event, PulseSequence};
pub use system::{CouplingMode, SpinSystem, SpinSystemFile};
