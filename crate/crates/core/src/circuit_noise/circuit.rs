use serde::{Deserialize, Serialize};

use crate::error::CircuitError;
use crate::geometry::{Direction, SurfaceLattice};

pub const ROUNDS_PER_CYCLE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operation {
    Prepare { qubit: usize, basis: Basis },
    Cnot { control: usize, target: usize },
    Measure { qubit: usize, basis: Basis },
    Idle { qubit: usize },
}

/// What each qubit of the circuit stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitRole {
    /// Data qubit on a lattice edge.
    Data(usize),
    /// Ancilla measuring a plaquette (Z-type) check.
    Plaquette(usize),
    /// Ancilla measuring a site (X-type) check.
    Site(usize),
}

/// Syndrome readout repeated for `cycles` cycles of six rounds: prepare,
/// four CNOT rounds in the order of `order`, measure.
#[derive(Clone, Debug)]
pub struct ReadoutCircuit {
    roles: Vec<QubitRole>,
    data: Vec<usize>,
    data_of_edge: Vec<Option<usize>>,
    num_plaquettes: usize,
    num_sites: usize,
    order: [Direction; 4],
    cycle: Vec<Vec<Operation>>,
    /// `slot[r][q]`: index in round `r` of the operation acting on `q`.
    slot: Vec<Vec<u32>>,
    cycles: usize,
}

/// North, West, East, South.
pub const DEFAULT_ORDER: [Direction; 4] = Direction::ALL;

impl ReadoutCircuit {
    pub fn data_qubit(&self, lattice_edge: usize) -> Option<usize> {
        self.data_of_edge.get(lattice_edge).copied().flatten()
    }

    pub fn plaquette_qubit(&self, p: usize) -> usize {
        self.data.len() + p
    }

    pub fn site_qubit(&self, s: usize) -> usize {
        self.data.len() + self.num_plaquettes + s
    }

    pub fn num_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn role(&self, q: usize) -> QubitRole {
        self.roles[q]
    }

    /// Lattice edges that carry a data qubit, in qubit order.
    pub fn data_edges(&self) -> &[usize] {
        &self.data
    }

    pub fn num_plaquettes(&self) -> usize {
        self.num_plaquettes
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn num_rounds(&self) -> usize {
        self.cycles * ROUNDS_PER_CYCLE
    }

    pub fn order(&self) -> [Direction; 4] {
        self.order
    }

    /// Operations of round `r` (0..6) of every cycle.
    pub fn round(&self, r: usize) -> &[Operation] {
        &self.cycle[r]
    }

    /// The operation acting on qubit `q` in round `r`; every qubit has
    /// exactly one per round, idling included.
    pub fn operation_on(&self, r: usize, q: usize) -> Operation {
        self.cycle[r][self.slot[r][q] as usize]
    }

    /// CNOTs scheduled for check ancilla `q` in one cycle.
    pub fn cnot_count(&self, q: usize) -> usize {
        self.cycle
            .iter()
            .flatten()
            .filter(|op| matches!(op, Operation::Cnot { control, target } if *control == q || *target == q))
            .count()
    }
}

/// Readout circuit on every lattice edge.
pub fn build_readout_circuit(
    lattice: &SurfaceLattice,
    cycles: usize,
) -> Result<ReadoutCircuit, CircuitError> {
    let all: Vec<usize> = (0..lattice.num_edges()).collect();
    build_readout_circuit_on(lattice, cycles, &all, DEFAULT_ORDER)
}

/// Readout circuit with data qubits only on the lattice edges `data`; checks
/// next to missing qubits skip the corresponding CNOTs and idle instead.
pub fn build_readout_circuit_on(
    lattice: &SurfaceLattice,
    cycles: usize,
    data: &[usize],
    order: [Direction; 4],
) -> Result<ReadoutCircuit, CircuitError> {
    if cycles == 0 {
        return Err(CircuitError::NoCycles);
    }
    let nd = data.len();
    let np = lattice.num_plaquettes();
    let ns = lattice.num_sites();
    let mut data_of_edge = vec![None; lattice.num_edges()];
    for (i, &e) in data.iter().enumerate() {
        data_of_edge[e] = Some(i);
    }
    let mut roles: Vec<QubitRole> = data.iter().map(|&e| QubitRole::Data(e)).collect();
    roles.extend((0..np).map(QubitRole::Plaquette));
    roles.extend((0..ns).map(QubitRole::Site));
    let nq = roles.len();
    let mut cycle = Vec::with_capacity(ROUNDS_PER_CYCLE);

    let mut prep: Vec<Operation> = (0..np)
        .map(|p| Operation::Prepare {
            qubit: nd + p,
            basis: Basis::Z,
        })
        .chain((0..ns).map(|s| Operation::Prepare {
            qubit: nd + np + s,
            basis: Basis::X,
        }))
        .collect();
    prep.extend((0..nd).map(|q| Operation::Idle { qubit: q }));
    cycle.push(prep);

    for dir in order {
        let mut busy = vec![false; nq];
        let mut ops = Vec::new();
        for p in 0..np {
            if let Some(q) = lattice.plaquette_edge(p, dir).and_then(|e| data_of_edge[e]) {
                let a = nd + p;
                if busy[q] {
                    return Err(CircuitError::BadSchedule(format!(
                        "data qubit {q} used twice in one round"
                    )));
                }
                busy[q] = true;
                busy[a] = true;
                ops.push(Operation::Cnot {
                    control: q,
                    target: a,
                });
            }
        }
        for s in 0..ns {
            if let Some(q) = lattice.site_edge(s, dir).and_then(|e| data_of_edge[e]) {
                let a = nd + np + s;
                if busy[q] {
                    return Err(CircuitError::BadSchedule(format!(
                        "data qubit {q} used twice in one round"
                    )));
                }
                busy[q] = true;
                busy[a] = true;
                ops.push(Operation::Cnot {
                    control: a,
                    target: q,
                });
            }
        }
        ops.extend(
            (0..nq)
                .filter(|&q| !busy[q])
                .map(|q| Operation::Idle { qubit: q }),
        );
        cycle.push(ops);
    }

    let mut meas: Vec<Operation> = (0..np)
        .map(|p| Operation::Measure {
            qubit: nd + p,
            basis: Basis::Z,
        })
        .chain((0..ns).map(|s| Operation::Measure {
            qubit: nd + np + s,
            basis: Basis::X,
        }))
        .collect();
    meas.extend((0..nd).map(|q| Operation::Idle { qubit: q }));
    cycle.push(meas);

    let mut slot = vec![vec![u32::MAX; nq]; ROUNDS_PER_CYCLE];
    for (r, ops) in cycle.iter().enumerate() {
        for (i, op) in ops.iter().enumerate() {
            let qs = match *op {
                Operation::Prepare { qubit, .. }
                | Operation::Measure { qubit, .. }
                | Operation::Idle { qubit } => [qubit, qubit],
                Operation::Cnot { control, target } => [control, target],
            };
            for q in qs {
                slot[r][q] = i as u32;
            }
        }
    }
    debug_assert!(slot.iter().flatten().all(|&i| i != u32::MAX));
    let circuit = ReadoutCircuit {
        roles,
        data: data.to_vec(),
        data_of_edge,
        num_plaquettes: np,
        num_sites: ns,
        order,
        cycle,
        slot,
        cycles,
    };
    check_schedule(lattice, &circuit)?;
    Ok(circuit)
}

/// A plaquette and a site sharing two data qubits must touch both in the
/// same relative order, otherwise the two checks are not measured
/// faithfully.
pub fn check_schedule(
    lattice: &SurfaceLattice,
    circuit: &ReadoutCircuit,
) -> Result<(), CircuitError> {
    let round_of = |dirs: &[Direction; 4], d: Direction| {
        dirs.iter().position(|&x| x == d).expect("all directions")
    };
    let order = circuit.order;
    for p in 0..lattice.num_plaquettes() {
        let mut shared: std::collections::HashMap<usize, Vec<(usize, usize)>> = Default::default();
        for pd in Direction::ALL {
            let Some(e) = lattice.plaquette_edge(p, pd) else {
                continue;
            };
            if circuit.data_qubit(e).is_none() {
                continue;
            }
            for s in lattice.edge(e).sites {
                let sd = Direction::ALL
                    .into_iter()
                    .find(|&d| lattice.site_edge(s, d) == Some(e))
                    .expect("edge incident to its site");
                shared
                    .entry(s)
                    .or_default()
                    .push((round_of(&order, pd), round_of(&order, sd)));
            }
        }
        for (s, pairs) in shared {
            if pairs.len() == 2 {
                let first = pairs[0].0 < pairs[0].1;
                if (pairs[1].0 < pairs[1].1) != first {
                    return Err(CircuitError::BadSchedule(format!(
                        "plaquette {p} and site {s}"
                    )));
                }
            }
        }
    }
    Ok(())
}
