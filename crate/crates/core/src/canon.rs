//! Canonical forms of labeled diagrams for isomorphism deduplication.
//!
//! Colour refinement splits the nodes by label statistics; remaining ties are
//! broken by individualizing each member of the first non-trivial cell in turn.
//! The form is the lexicographically least encoding over all leaves of that
//! search tree, which is invariant because every step is.

use crate::diagram::{Diagram, EdgeLabel};

/// Weights of dotted edges are compared on this grid.
const WEIGHT_QUANTUM: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u64>);

impl CanonicalForm {
    /// Short stable hex digest for manifests and file names.
    pub fn digest(&self) -> String {
        // FNV-1a, 64 bit.
        let mut h: u64 = 0xcbf29ce484222325;
        for &x in &self.0 {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        format!("{h:016x}")
    }
}

/// Integer code of a label; 0 is the right angle.
pub fn label_code(l: EdgeLabel) -> u64 {
    match l {
        EdgeLabel::Right => 0,
        EdgeLabel::Angle(m) => m as u64,
        EdgeLabel::Dotted(Some(w)) => (1u64 << 40) + (w / WEIGHT_QUANTUM).round() as u64,
        EdgeLabel::Dotted(None) => u64::MAX,
    }
}

struct Coded {
    n: usize,
    codes: Vec<u64>,
    colors: Vec<u64>,
}

impl Coded {
    fn new(d: &Diagram, colors: &[u32]) -> Self {
        let n = d.order();
        let mut codes = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    codes[i * n + j] = label_code(d.label(i, j));
                }
            }
        }
        Coded { n, codes, colors: colors.iter().map(|&c| c as u64).collect() }
    }

    fn code(&self, i: usize, j: usize) -> u64 {
        self.codes[i * self.n + j]
    }

    /// Refines `cell` (node -> cell index) to an equitable partition; cell
    /// indices stay ordered by invariant signatures.
    fn refine(&self, cell: &mut [u64]) {
        let n = self.n;
        let mut count = distinct(cell);
        loop {
            let sigs: Vec<(u64, Vec<(u64, u64)>)> = (0..n)
                .map(|v| {
                    let mut s: Vec<(u64, u64)> = (0..n)
                        .filter(|&u| u != v && self.code(v, u) != 0)
                        .map(|u| (cell[u], self.code(v, u)))
                        .collect();
                    s.sort_unstable();
                    (cell[v], s)
                })
                .collect();
            let mut sorted: Vec<&(u64, Vec<(u64, u64)>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let ranks: Vec<u64> = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).unwrap() as u64)
                .collect();
            let new_count = sorted.len();
            cell.copy_from_slice(&ranks);
            if new_count == count {
                return;
            }
            count = new_count;
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u64> {
        let n = self.n;
        let mut out = Vec::with_capacity(1 + n + n * n.saturating_sub(1) / 2);
        out.push(n as u64);
        out.extend(order.iter().map(|&v| self.colors[v]));
        for a in 0..n {
            for b in a + 1..n {
                out.push(self.code(order[a], order[b]));
            }
        }
        out
    }

    fn search(&self, cell: Vec<u64>, best: &mut Option<(Vec<u64>, Vec<usize>)>) {
        let n = self.n;
        // First non-singleton cell, by cell index.
        let mut sizes = vec![0usize; n];
        for &c in &cell {
            sizes[c as usize] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1);
        match target {
            None => {
                let mut order = vec![0; n];
                for (v, &c) in cell.iter().enumerate() {
                    order[c as usize] = v;
                }
                let enc = self.encode(&order);
                if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                    *best = Some((enc, order));
                }
            }
            Some(t) => {
                for v in (0..n).filter(|&v| cell[v] as usize == t) {
                    let mut child: Vec<u64> = cell
                        .iter()
                        .enumerate()
                        .map(|(u, &c)| 2 * c + u64::from(c as usize == t && u != v))
                        .collect();
                    self.refine(&mut child);
                    self.search(child, best);
                }
            }
        }
    }
}

fn distinct(cell: &[u64]) -> usize {
    let mut v = cell.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

pub fn canonical_form(d: &Diagram) -> CanonicalForm {
    canonical_labeling(d, &vec![0; d.order()]).0
}

pub fn canonical_form_colored(d: &Diagram, colors: &[u32]) -> CanonicalForm {
    canonical_labeling(d, colors).0
}

/// Canonical form together with the node order realizing it: position `i` of
/// the canonical diagram is node `order[i]` of `d`.
pub fn canonical_labeling(d: &Diagram, colors: &[u32]) -> (CanonicalForm, Vec<usize>) {
    assert_eq!(colors.len(), d.order());
    let coded = Coded::new(d, colors);
    let mut cell: Vec<u64> = coded.colors.clone();
    coded.refine(&mut cell);
    let mut best = None;
    coded.search(cell, &mut best);
    let (enc, order) = best.unwrap_or_else(|| (vec![0], Vec::new()));
    (CanonicalForm(enc), order)
}

/// The diagram rewritten in canonical node order.
pub fn canonical_diagram(d: &Diagram) -> Diagram {
    let (_, order) = canonical_labeling(d, &vec![0; d.order()]);
    d.induced(&order).renumbered()
}

pub fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    a.order() == b.order() && canonical_form(a) == canonical_form(b)
}

/// Minimum encoding over all `n!` orders; exponential, for testing only.
pub fn brute_force_form(d: &Diagram, colors: &[u32]) -> CanonicalForm {
    let coded = Coded::new(d, colors);
    let n = d.order();
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = coded.encode(&order);
    // Heap's algorithm.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            let enc = coded.encode(&order);
            if enc < best {
                best = enc;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    CanonicalForm(best)
}
