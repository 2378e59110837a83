use serde::{Deserialize, Serialize};

use super::circuit::{Basis, Operation, ReadoutCircuit, ROUNDS_PER_CYCLE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    /// Pauli error applied right after the operation.
    Pauli(Vec<(usize, Pauli)>),
    /// Measurement outcome flipped.
    Flip(usize),
}

/// A single fault in one operation of one cycle. `weight` is its
/// probability in units of the error rate `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub cycle: usize,
    pub round: usize,
    pub operation: usize,
    pub fault: Fault,
    pub weight: f64,
}

impl std::fmt::Display for ErrorEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "cycle {} round {} op {}: {:?}",
            self.cycle, self.round, self.operation, self.fault
        )
    }
}

/// Every single fault of one cycle, with `cycle` set to 0. The circuit is
/// the same in every cycle, so events of other cycles are shifts of these.
pub fn enumerate_events(circuit: &ReadoutCircuit) -> Vec<ErrorEvent> {
    let mut out = Vec::new();
    for round in 0..ROUNDS_PER_CYCLE {
        for (operation, op) in circuit.round(round).iter().enumerate() {
            let mut push = |fault, weight| {
                out.push(ErrorEvent {
                    cycle: 0,
                    round,
                    operation,
                    fault,
                    weight,
                })
            };
            match *op {
                Operation::Prepare { qubit, basis } => {
                    let p = match basis {
                        Basis::Z => Pauli::X,
                        Basis::X => Pauli::Z,
                    };
                    push(Fault::Pauli(vec![(qubit, p)]), 1.0);
                }
                Operation::Measure { qubit, .. } => push(Fault::Flip(qubit), 1.0),
                Operation::Idle { qubit } => {
                    for p in Pauli::ALL {
                        push(Fault::Pauli(vec![(qubit, p)]), 1.0 / 3.0);
                    }
                }
                Operation::Cnot { control, target } => {
                    for pc in [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)] {
                        for pt in [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)] {
                            let mut ps = Vec::new();
                            if let Some(p) = pc {
                                ps.push((control, p));
                            }
                            if let Some(p) = pt {
                                ps.push((target, p));
                            }
                            if !ps.is_empty() {
                                push(Fault::Pauli(ps), 1.0 / 15.0);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Pauli frame over all qubits of the circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    pub fn apply(&mut self, q: usize, p: Pauli) {
        self.x[q] ^= p.has_x();
        self.z[q] ^= p.has_z();
    }
}

/// Effect of a fault on one cycle: the ancillas whose outcome in that cycle
/// flips, and the Pauli error left on the data qubits at the end of it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventEffect {
    pub flipped: Vec<usize>,
    /// Data-qubit indices (not lattice edges) carrying an X component.
    pub data_x: Vec<usize>,
    pub data_z: Vec<usize>,
}

/// Pushes `frame`, present right after round `round`, through the rest of
/// the cycle. `flips` collects measurement outcome flips.
pub fn propagate_frame(
    circuit: &ReadoutCircuit,
    round: usize,
    frame: &mut PauliFrame,
    flips: &mut [bool],
) {
    for r in round + 1..ROUNDS_PER_CYCLE {
        run_round(circuit, r, frame, flips);
    }
}

/// Propagates one event through the ideal remainder of its cycle, touching
/// only the operations on qubits the error has reached.
pub fn propagate_event(circuit: &ReadoutCircuit, event: &ErrorEvent) -> EventEffect {
    let ps = match &event.fault {
        Fault::Flip(q) => {
            return EventEffect {
                flipped: vec![*q],
                ..Default::default()
            }
        }
        Fault::Pauli(ps) => ps,
    };
    // (qubit, x, z), kept short: a single fault spreads to a handful of qubits
    let mut frame: Vec<(usize, bool, bool)> = Vec::new();
    fn toggle(frame: &mut Vec<(usize, bool, bool)>, q: usize, x: bool, z: bool) {
        match frame.iter_mut().find(|f| f.0 == q) {
            Some(f) => {
                f.1 ^= x;
                f.2 ^= z;
            }
            None => frame.push((q, x, z)),
        }
    }
    for &(q, p) in ps {
        toggle(&mut frame, q, p.has_x(), p.has_z());
    }
    let mut flipped = Vec::new();
    for r in event.round + 1..ROUNDS_PER_CYCLE {
        frame.retain(|f| f.1 || f.2);
        let mut ops: Vec<Operation> = Vec::with_capacity(frame.len());
        for f in &frame {
            let op = circuit.operation_on(r, f.0);
            if !ops.contains(&op) {
                ops.push(op);
            }
        }
        for op in ops {
            let get = |frame: &Vec<(usize, bool, bool)>, q: usize| {
                frame
                    .iter()
                    .find(|f| f.0 == q)
                    .map_or((false, false), |f| (f.1, f.2))
            };
            match op {
                Operation::Cnot { control, target } => {
                    let (xc, _) = get(&frame, control);
                    let (_, zt) = get(&frame, target);
                    toggle(&mut frame, target, xc, false);
                    toggle(&mut frame, control, false, zt);
                }
                Operation::Measure { qubit, basis } => {
                    let (x, z) = get(&frame, qubit);
                    if match basis {
                        Basis::Z => x,
                        Basis::X => z,
                    } {
                        flipped.push(qubit);
                    }
                }
                Operation::Prepare { qubit, .. } => frame.retain(|f| f.0 != qubit),
                Operation::Idle { .. } => {}
            }
        }
    }
    flipped.sort_unstable();
    let nd = circuit.data_edges().len();
    let mut data_x: Vec<usize> = frame
        .iter()
        .filter(|f| f.0 < nd && f.1)
        .map(|f| f.0)
        .collect();
    let mut data_z: Vec<usize> = frame
        .iter()
        .filter(|f| f.0 < nd && f.2)
        .map(|f| f.0)
        .collect();
    data_x.sort_unstable();
    data_z.sort_unstable();
    EventEffect {
        flipped,
        data_x,
        data_z,
    }
}

/// Joint effect of several events in the same cycle (faults add mod 2), by
/// running every operation of the cycle on a dense frame.
pub fn propagate_events(circuit: &ReadoutCircuit, events: &[ErrorEvent]) -> EventEffect {
    let n = circuit.num_qubits();
    let mut flips = vec![false; n];
    let mut frame = PauliFrame::new(n);
    for r in 0..ROUNDS_PER_CYCLE {
        run_round(circuit, r, &mut frame, &mut flips);
        for ev in events.iter().filter(|e| e.round == r) {
            match &ev.fault {
                Fault::Flip(q) => flips[*q] ^= true,
                Fault::Pauli(ps) => {
                    for &(q, p) in ps {
                        frame.apply(q, p);
                    }
                }
            }
        }
    }
    let nd = circuit.data_edges().len();
    EventEffect {
        flipped: (0..n).filter(|&q| flips[q]).collect(),
        data_x: (0..nd).filter(|&q| frame.x[q]).collect(),
        data_z: (0..nd).filter(|&q| frame.z[q]).collect(),
    }
}

fn run_round(circuit: &ReadoutCircuit, r: usize, frame: &mut PauliFrame, flips: &mut [bool]) {
    for op in circuit.round(r) {
        match *op {
            Operation::Cnot { control, target } => {
                frame.x[target] ^= frame.x[control];
                frame.z[control] ^= frame.z[target];
            }
            Operation::Measure { qubit, basis } => {
                flips[qubit] ^= match basis {
                    Basis::Z => frame.x[qubit],
                    Basis::X => frame.z[qubit],
                };
            }
            // preparation discards whatever was on the qubit
            Operation::Prepare { qubit, .. } => {
                frame.x[qubit] = false;
                frame.z[qubit] = false;
            }
            Operation::Idle { .. } => {}
        }
    }
}
