use serde::Serialize;

use crate::circuit::{Circuit, Gate, Reg};
use crate::modules::QtvCircuit;

use super::{LaneState, SimError};

/// One lane per coordinate branch. Lane `l` starts at `X = l mod 2^n`, `Y = l div 2^n`.
#[derive(Debug, Clone)]
pub struct BranchState {
    lanes: LaneState,
    x: Reg,
    y: Reg,
}

impl BranchState {
    /// All `2^(2n)` branches with every non-coordinate qubit at 0.
    pub fn new(num_qubits: usize, x: Reg, y: Reg) -> Self {
        let side = 1usize << x.len;
        let count = side << y.len;
        let mut lanes = LaneState::new(num_qubits, count);
        for l in 0..count {
            lanes.write(l, x, (l % side) as u64);
            lanes.write(l, y, (l / side) as u64);
        }
        Self { lanes, x, y }
    }

    pub fn branches(&self) -> usize {
        self.lanes.lanes()
    }

    pub fn lanes(&self) -> &LaneState {
        &self.lanes
    }

    /// Current coordinate values of branch `l`.
    pub fn coords(&self, l: usize) -> (u64, u64) {
        (self.lanes.read(l, self.x), self.lanes.read(l, self.y))
    }

    pub fn value(&self, l: usize, reg: Reg) -> u64 {
        self.lanes.read(l, reg)
    }

    /// Continues the simulation with a permutation circuit (no Hadamards).
    pub fn apply(&mut self, c: &Circuit) -> Result<(), SimError> {
        self.lanes.apply(c)
    }

    fn apply_gates(&mut self, gates: &[Gate]) -> Result<(), SimError> {
        for g in gates {
            self.lanes.apply_gate(g)?;
        }
        Ok(())
    }

    /// Exhaustive readout of `reg`, keyed by the coordinate registers.
    pub fn readout(&self, reg: Reg) -> ReadoutTable {
        let mut entries: Vec<_> = (0..self.branches())
            .map(|l| {
                let (x, y) = self.coords(l);
                ReadoutEntry {
                    x,
                    y,
                    value: self.value(l, reg),
                    count: None,
                }
            })
            .collect();
        entries.sort_by_key(|e| (e.x, e.y));
        ReadoutTable {
            shots: None,
            entries,
        }
    }
}

/// Runs a circuit whose only Hadamards form a leading layer on the coordinate registers.
pub fn run_branches(c: &Circuit) -> Result<BranchState, SimError> {
    let layout = c.layout();
    let (x, y) = match (layout.coord_x(), layout.coord_y()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(SimError::HadamardLayer),
    };
    let lead = c
        .gates()
        .iter()
        .take_while(|g| matches!(g, Gate::H(_)))
        .count();
    let mut hs: Vec<usize> = c.gates()[..lead]
        .iter()
        .filter_map(|g| match g {
            Gate::H(q) => Some(*q),
            _ => None,
        })
        .collect();
    hs.sort_unstable();
    let want: Vec<usize> = x.qubits().chain(y.qubits()).collect();
    if hs != want {
        return Err(SimError::HadamardLayer);
    }
    let mut state = BranchState::new(c.num_qubits(), x, y);
    state.apply_gates(&c.gates()[lead..])?;
    Ok(state)
}

/// Exhaustive readout of the QTV output register.
pub fn run_branchwise(qc: &QtvCircuit) -> Result<ReadoutTable, SimError> {
    Ok(run_branches(&qc.circuit)?.readout(qc.output()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadoutEntry {
    pub x: u64,
    pub y: u64,
    pub value: u64,
    /// Number of shots that observed this association, when sampled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

/// Coordinate to value associations, sorted by `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadoutTable {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    pub entries: Vec<ReadoutEntry>,
}

impl ReadoutTable {
    pub fn get(&self, x: u64, y: u64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&(x, y), |e| (e.x, e.y))
            .ok()
            .map(|i| self.entries[i].value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether every coordinate of a `2^n x 2^n` grid is present.
    pub fn is_complete(&self, n: usize) -> bool {
        self.entries.len() == 1 << (2 * n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{RegisterLayout, RegisterRole};
    use crate::image::Image;
    use crate::modules::{build_neqr, build_qtv};

    #[test]
    fn neqr_example_table() {
        let img = Image::from_rows(8, &[[240, 148], [68, 73]]).unwrap();
        let (l, c) = RegisterLayout::neqr(8, 1);
        let circ = build_neqr(&img, &l, c, true).unwrap();
        let t = run_branches(&circ).unwrap().readout(c);
        assert_eq!(t.get(0, 0), Some(240));
        assert_eq!(t.get(0, 1), Some(68));
        assert_eq!(t.get(1, 0), Some(148));
        assert_eq!(t.get(1, 1), Some(73));
        assert!(t.is_complete(1));
    }

    #[test]
    fn constant_patch_readout() {
        let patch = Image::filled(4, 4, 8, 42).unwrap();
        let t = run_branchwise(&build_qtv(&patch, 1.0, 8).unwrap()).unwrap();
        assert_eq!(t.len(), 16);
        assert!(t.entries.iter().all(|e| e.value == 42));
        assert!(t.to_json().contains("\"value\": 42"));
    }

    #[test]
    fn hadamard_layer_checked() {
        let (l, c) = RegisterLayout::neqr(2, 1);
        let mut circ = Circuit::new(l.clone());
        circ.append(Gate::h(l.coord_x().unwrap().start)).unwrap();
        assert_eq!(run_branches(&circ).unwrap_err(), SimError::HadamardLayer);
        let mut circ = Circuit::new(l.clone());
        for q in l
            .coord_x()
            .unwrap()
            .qubits()
            .chain(l.coord_y().unwrap().qubits())
        {
            circ.append(Gate::h(q)).unwrap();
        }
        circ.append(Gate::x(c.start)).unwrap();
        circ.append(Gate::h(c.start)).unwrap();
        assert_eq!(
            run_branches(&circ).unwrap_err(),
            SimError::UnexpectedHadamard(c.start)
        );
        let mut bare = RegisterLayout::new();
        bare.add("a", RegisterRole::Value, 1).unwrap();
        assert!(run_branches(&Circuit::new(bare)).is_err());
    }
}
