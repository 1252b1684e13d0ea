//! Depth accounting under two conventions.
//!
//! `strict` is the longest path of the gate dependency DAG, every gate
//! weighing 1. `paper` evaluates the published per-module cost formulas for
//! each tagged span; untagged gates fall back to a weighted DAG in which a
//! gate with a negative control costs 3 (the X pair around the control).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{Circuit, Gate, ModuleTag, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthConvention {
    Paper,
    Strict,
}

impl fmt::Display for DepthConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthConvention::Paper => "paper",
            DepthConvention::Strict => "strict",
        })
    }
}

impl FromStr for DepthConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(DepthConvention::Paper),
            "strict" => Ok(DepthConvention::Strict),
            _ => Err(format!("unknown depth convention {s:?}")),
        }
    }
}

/// Depth figures for one tag. `gates` and `depth` describe the largest instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagDepth {
    pub tag: ModuleTag,
    pub instances: usize,
    pub gates: usize,
    pub depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub convention: DepthConvention,
    pub bit_depth: usize,
    pub coord_bits: usize,
    pub total_gates: usize,
    pub total_depth: u64,
    pub per_tag: Vec<TagDepth>,
}

impl DepthReport {
    pub fn tag(&self, tag: ModuleTag) -> Option<&TagDepth> {
        self.per_tag.iter().find(|t| t.tag == tag)
    }
}

/// Published cost formula for a module at bit depth `q` and `n` coordinate bits per axis.
pub fn closed_form(tag: ModuleTag, q: usize, n: usize) -> Option<u64> {
    let (q, n) = (q as u64, n as u64);
    let pixels = 1u64 << (2 * n);
    let neqr = pixels * (8 * n + 4);
    let cs = n * n.saturating_sub(1);
    Some(match tag {
        ModuleTag::Neqr => neqr,
        ModuleTag::Cs => cs,
        ModuleTag::Swap | ModuleTag::Cswap => q,
        ModuleTag::Set | ModuleTag::Copy => 1,
        ModuleTag::Add => 15 * q + 1,
        ModuleTag::Sub => 15 * q + 3,
        ModuleTag::Comp => 8 * q,
        ModuleTag::Swpr => 9 * q,
        ModuleTag::Sort => 27 * q,
        ModuleTag::Mf => 81 * q,
        ModuleTag::Pc => 60 * q + 8,
        ModuleTag::Np => 5 * (neqr + q + cs),
        ModuleTag::Raw => return None,
    })
}

/// Longest path through `gates` where each gate adds `weight(gate)`.
pub fn weighted_depth(gates: &[Gate], num_qubits: usize, weight: impl Fn(&Gate) -> u64) -> u64 {
    let mut level = vec![0u64; num_qubits];
    let mut best = 0;
    for g in gates {
        let d = g.qubits().map(|q| level[q]).max().unwrap_or(0) + weight(g);
        for q in g.qubits() {
            level[q] = d;
        }
        best = best.max(d);
    }
    best
}

pub fn strict_depth(gates: &[Gate], num_qubits: usize) -> u64 {
    weighted_depth(gates, num_qubits, |_| 1)
}

fn raw_weight(g: &Gate) -> u64 {
    if g.has_negative_control() {
        3
    } else {
        1
    }
}

fn span_depth(c: &Circuit, span: &Span, convention: DepthConvention) -> u64 {
    let gates = &c.gates()[span.range.clone()];
    match convention {
        DepthConvention::Strict => strict_depth(gates, c.num_qubits()),
        DepthConvention::Paper => closed_form(span.tag, c.bit_depth(), c.coord_bits())
            .unwrap_or_else(|| weighted_depth(gates, c.num_qubits(), raw_weight)),
    }
}

pub fn depth(c: &Circuit, convention: DepthConvention) -> DepthReport {
    let mut per_tag: Vec<TagDepth> = Vec::new();
    for top in c.spans() {
        top.walk(&mut |s| {
            let d = span_depth(c, s, convention);
            let gates = s.range.len();
            match per_tag.iter_mut().find(|t| t.tag == s.tag) {
                Some(t) => {
                    t.instances += 1;
                    t.gates = t.gates.max(gates);
                    t.depth = t.depth.max(d);
                }
                None => per_tag.push(TagDepth {
                    tag: s.tag,
                    instances: 1,
                    gates,
                    depth: d,
                }),
            }
        });
    }
    let total_depth = match convention {
        DepthConvention::Strict => strict_depth(c.gates(), c.num_qubits()),
        DepthConvention::Paper => c.spans().iter().map(|s| span_depth(c, s, convention)).sum(),
    };
    DepthReport {
        convention,
        bit_depth: c.bit_depth(),
        coord_bits: c.coord_bits(),
        total_gates: c.len(),
        total_depth,
        per_tag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, RegisterLayout, RegisterRole};

    fn circuit(n: usize, gates: &[Gate]) -> Circuit {
        let mut l = RegisterLayout::new();
        l.add("a", RegisterRole::Value, n).unwrap();
        let mut c = Circuit::new(l);
        for g in gates {
            c.append(*g).unwrap();
        }
        c
    }

    #[test]
    fn single_h_is_depth_one() {
        let c = circuit(1, &[Gate::h(0)]);
        assert_eq!(depth(&c, DepthConvention::Strict).total_depth, 1);
        assert_eq!(depth(&c, DepthConvention::Paper).total_depth, 1);
    }

    #[test]
    fn parallel_gates_share_a_layer() {
        let c = circuit(4, &[Gate::x(0), Gate::x(1), Gate::cnot(0, 1), Gate::x(3)]);
        assert_eq!(depth(&c, DepthConvention::Strict).total_depth, 2);
    }

    #[test]
    fn negative_control_weighs_three_on_raw() {
        let g = Gate::cx(&[Control::neg(0)], 1).unwrap();
        let c = circuit(2, &[g]);
        assert_eq!(depth(&c, DepthConvention::Paper).total_depth, 3);
        assert_eq!(depth(&c, DepthConvention::Strict).total_depth, 1);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form(ModuleTag::Comp, 8, 2), Some(64));
        assert_eq!(closed_form(ModuleTag::Add, 3, 2), Some(46));
        assert_eq!(closed_form(ModuleTag::Neqr, 8, 1), Some(48));
        assert_eq!(closed_form(ModuleTag::Cs, 8, 2), Some(2));
        assert_eq!(closed_form(ModuleTag::Raw, 8, 2), None);
    }

    #[test]
    fn convention_parse() {
        assert_eq!(
            "paper".parse::<DepthConvention>().unwrap(),
            DepthConvention::Paper
        );
        assert!("loose".parse::<DepthConvention>().is_err());
    }
}
