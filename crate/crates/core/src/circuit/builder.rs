use std::collections::HashMap;

use super::{Circuit, CircuitError, Gate, ModuleTag, Reg, RegisterLayout, RegisterRole, Span};

/// Incremental circuit construction with nested span tagging and an ancilla pool.
///
/// Scratch registers are requested by key. A released register is handed out
/// again to the next request with the same key and width, so the pool ends up
/// sized by the largest simultaneous need. Callers only release registers they
/// have returned to `|0>`.
#[derive(Debug)]
pub struct CircuitBuilder {
    layout: RegisterLayout,
    gates: Vec<Gate>,
    stack: Vec<(ModuleTag, usize, Vec<Span>)>,
    top: Vec<Span>,
    free: Vec<(String, Reg)>,
    counters: HashMap<String, usize>,
    with_reset: bool,
    bit_depth: usize,
    coord_bits: usize,
}

impl CircuitBuilder {
    pub fn new(layout: RegisterLayout, bit_depth: usize, coord_bits: usize) -> Self {
        Self {
            layout,
            gates: Vec::new(),
            stack: Vec::new(),
            top: Vec::new(),
            free: Vec::new(),
            counters: HashMap::new(),
            with_reset: true,
            bit_depth,
            coord_bits,
        }
    }

    /// Whether modules may clean ancillas with RESET instead of uncomputation.
    pub fn with_reset(mut self, enabled: bool) -> Self {
        self.with_reset = enabled;
        self
    }

    pub fn reset_enabled(&self) -> bool {
        self.with_reset
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn bit_depth(&self) -> usize {
        self.bit_depth
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.layout.total_qubits())?;
        let at = self.gates.len();
        self.gates.push(gate);
        if self.stack.is_empty() {
            match self.top.last_mut() {
                Some(s) if s.tag == ModuleTag::Raw && s.range.end == at => s.range.end += 1,
                _ => self.top.push(Span {
                    tag: ModuleTag::Raw,
                    range: at..at + 1,
                    children: Vec::new(),
                }),
            }
        }
        Ok(())
    }

    pub fn open(&mut self, tag: ModuleTag) {
        self.stack.push((tag, self.gates.len(), Vec::new()));
    }

    pub fn close(&mut self) -> Result<(), CircuitError> {
        let (tag, start, children) = self.stack.pop().ok_or(CircuitError::UnbalancedSpans)?;
        let span = Span {
            tag,
            range: start..self.gates.len(),
            children,
        };
        match self.stack.last_mut() {
            Some((_, _, siblings)) => siblings.push(span),
            None => self.top.push(span),
        }
        Ok(())
    }

    /// Runs `f` inside a span labelled `tag`.
    pub fn scoped<T, E: From<CircuitError>>(
        &mut self,
        tag: ModuleTag,
        f: impl FnOnce(&mut Self) -> Result<T, E>,
    ) -> Result<T, E> {
        self.open(tag);
        let out = f(self)?;
        self.close()?;
        Ok(out)
    }

    /// Pushes a whole pre-built circuit's gates and spans at the current position.
    pub fn splice(&mut self, sub: &Circuit) -> Result<(), CircuitError> {
        let n = self.layout.total_qubits();
        for g in sub.gates() {
            g.validate(n)?;
        }
        let offset = self.gates.len();
        self.gates.extend_from_slice(sub.gates());
        let spans = sub.spans().iter().map(|s| s.shifted(offset));
        match self.stack.last_mut() {
            Some((_, _, siblings)) => siblings.extend(spans),
            None => self.top.extend(spans),
        }
        Ok(())
    }

    /// Returns a `|0>` scratch register of width `len`.
    pub fn acquire(&mut self, key: &str, len: usize) -> Reg {
        if let Some(pos) = self.free.iter().position(|(k, r)| k == key && r.len == len) {
            return self.free.swap_remove(pos).1;
        }
        let n = self.counters.entry(key.to_string()).or_insert(0);
        let name = format!("{key}_{n}");
        *n += 1;
        self.layout
            .add(name, RegisterRole::Ancilla, len)
            .expect("scratch names are unique")
    }

    /// Returns a register to the pool; it must be back in `|0>`.
    pub fn release(&mut self, key: &str, reg: Reg) {
        self.free.push((key.to_string(), reg));
    }

    pub fn finish(self) -> Result<Circuit, CircuitError> {
        if !self.stack.is_empty() {
            return Err(CircuitError::UnbalancedSpans);
        }
        Ok(Circuit::from_parts(
            self.layout,
            self.gates,
            self.top,
            self.bit_depth,
            self.coord_bits,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_spans() {
        let mut l = RegisterLayout::new();
        l.add("a", RegisterRole::Value, 3).unwrap();
        let mut b = CircuitBuilder::new(l, 3, 0);
        b.push(Gate::x(0)).unwrap();
        b.scoped(ModuleTag::Swpr, |b| {
            b.scoped(ModuleTag::Comp, |b| b.push(Gate::cnot(0, 1)))?;
            b.scoped(ModuleTag::Cswap, |b| b.push(Gate::swap(1, 2)))
        })
        .unwrap();
        let c = b.finish().unwrap();
        assert_eq!(c.top_tags(), vec![ModuleTag::Raw, ModuleTag::Swpr]);
        assert_eq!(c.spans()[1].range, 1..3);
        assert_eq!(c.instances(ModuleTag::Comp), vec![1..2]);
        assert_eq!(c.instances(ModuleTag::Cswap), vec![2..3]);
    }

    #[test]
    fn ancilla_pool_reuses_released() {
        let mut b = CircuitBuilder::new(RegisterLayout::new(), 1, 0);
        let a = b.acquire("carry", 3);
        let c = b.acquire("carry", 3);
        assert_ne!(a, c);
        b.release("carry", a);
        assert_eq!(b.acquire("carry", 3), a);
        assert_eq!(b.layout().total_qubits(), 6);
    }

    #[test]
    fn unbalanced() {
        let mut b = CircuitBuilder::new(RegisterLayout::new(), 1, 0);
        b.open(ModuleTag::Np);
        assert!(b.finish().is_err());
    }
}
