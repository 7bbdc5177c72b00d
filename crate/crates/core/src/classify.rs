//! Elliptic / parabolic / Lannér / hyperbolic verdicts, standard-family typing
//! of elliptic diagrams, and subset enumeration of elliptic subdiagrams.

use std::collections::BTreeSet;
use std::fmt;

use crate::canon::{canonical_form, CanonicalForm};
use crate::diagram::{Diagram, EdgeLabel};
use crate::error::{Error, Result};
use crate::linalg;
use crate::numeric::zero_tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramClass {
    Elliptic,
    Parabolic,
    Lanner,
    Hyperbolic,
    /// Degenerate and semidefinite, but some component is positive definite,
    /// so the diagram is neither elliptic nor parabolic.
    MixedSemidefinite,
    OtherIndefinite,
}

impl fmt::Display for DiagramClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagramClass::Elliptic => "elliptic",
            DiagramClass::Parabolic => "parabolic",
            DiagramClass::Lanner => "lanner",
            DiagramClass::Hyperbolic => "hyperbolic",
            DiagramClass::MixedSemidefinite => "mixed-semidefinite",
            DiagramClass::OtherIndefinite => "other-indefinite",
        };
        f.write_str(s)
    }
}

pub fn classify(d: &Diagram) -> Result<DiagramClass> {
    if let Some((i, j, _)) = d.edges().into_iter().find(|e| e.2.is_unknown()) {
        return Err(Error::UnknownWeight(d.ids()[i], d.ids()[j]));
    }
    let sig = d.signature()?;
    if sig.n_neg == 0 && sig.n_zero == 0 {
        return Ok(DiagramClass::Elliptic);
    }
    if sig.n_neg == 0 {
        let mut all_degenerate = true;
        for comp in d.components() {
            if d.induced(&comp).signature()?.n_zero == 0 {
                all_degenerate = false;
            }
        }
        return Ok(if all_degenerate { DiagramClass::Parabolic } else { DiagramClass::MixedSemidefinite });
    }
    if d.is_connected() && all_deletions_elliptic(d)? {
        return Ok(DiagramClass::Lanner);
    }
    Ok(if sig.n_neg == 1 { DiagramClass::Hyperbolic } else { DiagramClass::OtherIndefinite })
}

fn all_deletions_elliptic(d: &Diagram) -> Result<bool> {
    let n = d.order();
    for skip in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&v| v != skip).collect();
        if !is_elliptic(&d.induced(&rest)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Connected, indefinite, and every proper subdiagram elliptic.
pub fn is_lanner(d: &Diagram) -> bool {
    matches!(classify(d), Ok(DiagramClass::Lanner))
}

/// Positive definiteness by Cholesky; unknown or dotted weights never qualify.
pub fn is_elliptic(d: &Diagram) -> bool {
    let n = d.order();
    if d.edges().iter().any(|e| e.2.is_dotted()) {
        return false;
    }
    match d.gram_matrix() {
        Ok(g) => linalg::is_positive_definite(&g, n, zero_tol()),
        Err(_) => false,
    }
}

/// Positive definiteness of the principal submatrix on a node subset.
pub(crate) fn subset_is_elliptic(gram: &[f64], n: usize, nodes: &[usize]) -> bool {
    let k = nodes.len();
    let mut sub = [0.0f64; 256];
    if k > 16 {
        let v: Vec<f64> = nodes.iter().flat_map(|&a| nodes.iter().map(move |&b| gram[a * n + b])).collect();
        return linalg::is_positive_definite(&v, k, zero_tol());
    }
    for (x, &a) in nodes.iter().enumerate() {
        for (y, &b) in nodes.iter().enumerate() {
            let w = gram[a * n + b];
            // Weights of magnitude >= 1 off the diagonal rule out definiteness.
            if x != y && w <= -1.0 {
                return false;
            }
            sub[x * k + y] = w;
        }
    }
    linalg::is_positive_definite(&sub[..k * k], k, zero_tol())
}

/// Gram matrix where unknown dotted weights are replaced by a value that can
/// never be part of an elliptic subset.
pub(crate) fn gram_for_elliptic_tests(d: &Diagram) -> Vec<f64> {
    let mut g = d.gram();
    for i in 0..g.n {
        for j in 0..g.n {
            if d.label(i, j).is_unknown() {
                g.c[i * g.n + j] = -2.0;
            }
        }
    }
    g.c
}

/// All elliptic subsets of the given order, lexicographic. Subsets are grown
/// level by level and a candidate is tested only when all of its one-smaller
/// subsets were elliptic.
pub fn enumerate_elliptic_subdiagrams(d: &Diagram, order: usize) -> Vec<Vec<usize>> {
    let n = d.order();
    if order == 0 {
        return vec![Vec::new()];
    }
    if order > n {
        return Vec::new();
    }
    let levels = elliptic_levels(d, order);
    let mut out: Vec<Vec<usize>> = levels[order].iter().map(|&m| mask_nodes(m)).collect();
    out.sort();
    out
}

/// Bitmask levels of elliptic subsets, `levels[k]` holding those of order `k`
/// (up to `max_order`). Limited to 64 nodes.
pub fn elliptic_levels(d: &Diagram, max_order: usize) -> Vec<Vec<u64>> {
    let n = d.order();
    assert!(n <= 64, "elliptic_levels supports at most 64 nodes");
    let g = gram_for_elliptic_tests(d);
    let mut levels: Vec<Vec<u64>> = vec![vec![0]];
    if max_order == 0 {
        return levels;
    }
    levels.push((0..n).map(|v| 1u64 << v).collect());
    let mut nodes = Vec::with_capacity(n);
    for k in 2..=max_order.min(n) {
        let prev: BTreeSet<u64> = levels[k - 1].iter().copied().collect();
        let mut next = Vec::new();
        for &m in &levels[k - 1] {
            let top = 63 - m.leading_zeros() as usize;
            for v in top + 1..n {
                let cand = m | 1 << v;
                // Every (k-1)-subset must be elliptic.
                let ok = (0..n)
                    .filter(|&u| cand >> u & 1 == 1 && u != v)
                    .all(|u| prev.contains(&(cand & !(1 << u))));
                if !ok {
                    continue;
                }
                nodes.clear();
                nodes.extend((0..n).filter(|&u| cand >> u & 1 == 1));
                if subset_is_elliptic(&g, n, &nodes) {
                    next.push(cand);
                }
            }
        }
        next.sort_unstable();
        levels.push(next);
    }
    while levels.len() <= max_order {
        levels.push(Vec::new());
    }
    levels
}

pub(crate) fn mask_nodes(m: u64) -> Vec<usize> {
    (0..64).filter(|&v| m >> v & 1 == 1).collect()
}

/// A connected finite Coxeter type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A(usize),
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    /// Dihedral group of order `2m`, `m >= 5`.
    G2(u32),
}

impl Family {
    pub fn rank(self) -> usize {
        match self {
            Family::A(n) | Family::B(n) | Family::D(n) => n,
            Family::E6 => 6,
            Family::E7 => 7,
            Family::E8 => 8,
            Family::F4 | Family::H4 => 4,
            Family::H3 => 3,
            Family::G2(_) => 2,
        }
    }

    /// Order of the finite reflection group.
    pub fn group_order(self) -> u128 {
        fn fact(n: usize) -> u128 {
            (1..=n as u128).product()
        }
        match self {
            Family::A(n) => fact(n + 1),
            Family::B(n) => (1u128 << n) * fact(n),
            Family::D(n) => (1u128 << (n - 1)) * fact(n),
            Family::E6 => 51_840,
            Family::E7 => 2_903_040,
            Family::E8 => 696_729_600,
            Family::F4 => 1152,
            Family::H3 => 120,
            Family::H4 => 14_400,
            Family::G2(m) => 2 * m as u128,
        }
    }

    /// Canonical diagram of the family.
    pub fn diagram(self) -> Diagram {
        match self {
            Family::A(n) => Diagram::path(&vec![3; n - 1]),
            Family::B(n) => {
                let mut labels = vec![3; n - 1];
                labels[n - 2] = 4;
                Diagram::path(&labels)
            }
            Family::D(n) => {
                let mut edges: Vec<(usize, usize, u32)> = (0..n - 2).map(|i| (i, i + 1, 3)).collect();
                edges.push((n - 3, n - 1, 3));
                Diagram::from_angles(n, &edges).expect("valid")
            }
            Family::E6 | Family::E7 | Family::E8 => {
                let n = self.rank();
                let mut edges: Vec<(usize, usize, u32)> = (0..n - 2).map(|i| (i, i + 1, 3)).collect();
                edges.push((2, n - 1, 3));
                Diagram::from_angles(n, &edges).expect("valid")
            }
            Family::F4 => Diagram::path(&[3, 4, 3]),
            Family::H3 => Diagram::path(&[5, 3]),
            Family::H4 => Diagram::path(&[5, 3, 3]),
            Family::G2(m) => Diagram::path(&[m]),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A(n) => write!(f, "A{n}"),
            Family::B(n) => write!(f, "B{n}"),
            Family::D(n) => write!(f, "D{n}"),
            Family::E6 => write!(f, "E6"),
            Family::E7 => write!(f, "E7"),
            Family::E8 => write!(f, "E8"),
            Family::F4 => write!(f, "F4"),
            Family::H3 => write!(f, "H3"),
            Family::H4 => write!(f, "H4"),
            Family::G2(m) => write!(f, "G2({m})"),
        }
    }
}

/// Component decomposition of an elliptic diagram. Rank-2 components with
/// labels 3 and 4 are reported as `A2` and `B2`; `G2(m)` covers `m >= 5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticType {
    /// Families sorted for a stable multiset representation.
    pub components: Vec<Family>,
}

impl EllipticType {
    pub fn group_order(&self) -> u128 {
        self.components.iter().map(|c| c.group_order()).product()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank()).sum()
    }

    pub fn has_a_or_d5(&self) -> bool {
        self.components.iter().any(|c| matches!(c, Family::A(_) | Family::D(5)))
    }
}

impl fmt::Display for EllipticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

pub fn elliptic_type(d: &Diagram) -> Result<EllipticType> {
    if !is_elliptic(d) {
        return Err(Error::NotElliptic("diagram".into()));
    }
    let mut components = Vec::new();
    for comp in d.components() {
        let sub = d.induced(&comp);
        let fam = connected_family(&sub)
            .ok_or_else(|| Error::NotElliptic(format!("component of order {} (unrecognized shape)", comp.len())))?;
        components.push(fam);
    }
    components.sort();
    Ok(EllipticType { components })
}

/// Structural recognition of a connected diagram as a finite Coxeter type.
fn connected_family(d: &Diagram) -> Option<Family> {
    let n = d.order();
    let edges = d.edges();
    let mut labels = Vec::with_capacity(edges.len());
    for &(_, _, l) in &edges {
        match l {
            EdgeLabel::Angle(m) => labels.push(m),
            _ => return None,
        }
    }
    match n {
        1 => return Some(Family::A(1)),
        2 => {
            return Some(match labels[0] {
                3 => Family::A(2),
                4 => Family::B(2),
                m => Family::G2(m),
            })
        }
        _ => {}
    }
    if edges.len() != n - 1 || labels.iter().any(|&m| m > 5) {
        return None;
    }
    let degree: Vec<usize> = (0..n).map(|v| d.neighbors(v).count()).collect();
    let branch: Vec<usize> = (0..n).filter(|&v| degree[v] >= 3).collect();
    if !branch.is_empty() {
        if branch.len() > 1 || degree[branch[0]] > 3 || labels.iter().any(|&m| m != 3) {
            return None;
        }
        let c = branch[0];
        let mut arms: Vec<usize> = d
            .neighbors(c)
            .map(|start| {
                let (mut prev, mut cur, mut len) = (c, start, 1);
                while let Some(next) = d.neighbors(cur).find(|&x| x != prev) {
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort_unstable();
        return match arms[..] {
            [1, 1, k] => Some(Family::D(k + 3)),
            [1, 2, 2] => Some(Family::E6),
            [1, 2, 3] => Some(Family::E7),
            [1, 2, 4] => Some(Family::E8),
            _ => None,
        };
    }
    // A path: read labels from one end.
    let start = (0..n).find(|&v| degree[v] == 1)?;
    let mut seq = Vec::with_capacity(n - 1);
    let (mut prev, mut cur) = (usize::MAX, start);
    while let Some(next) = d.neighbors(cur).find(|&x| x != prev) {
        seq.push(d.label(cur, next).angle_order()?);
        prev = cur;
        cur = next;
    }
    let special: Vec<usize> = (0..seq.len()).filter(|&i| seq[i] != 3).collect();
    match special[..] {
        [] => Some(Family::A(n)),
        [i] => {
            let at_end = i == 0 || i == seq.len() - 1;
            match (seq[i], at_end, n) {
                (4, true, _) => Some(Family::B(n)),
                (4, false, 4) => Some(Family::F4),
                (5, true, 3) => Some(Family::H3),
                (5, true, 4) => Some(Family::H4),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Connected finite types of the given rank whose labels stay within `cap`.
pub fn connected_families(rank: usize, cap: u32) -> Vec<Family> {
    let mut out = Vec::new();
    if rank == 0 {
        return out;
    }
    out.push(Family::A(rank));
    if rank >= 2 && cap >= 4 {
        out.push(Family::B(rank));
    }
    if rank >= 4 {
        out.push(Family::D(rank));
    }
    match rank {
        2 => out.extend((5..=cap).map(Family::G2)),
        3 if cap >= 5 => out.push(Family::H3),
        4 => {
            if cap >= 4 {
                out.push(Family::F4);
            }
            if cap >= 5 {
                out.push(Family::H4);
            }
        }
        6 => out.push(Family::E6),
        7 => out.push(Family::E7),
        8 => out.push(Family::E8),
        _ => {}
    }
    out
}

/// Every elliptic diagram of the given order with labels `<= cap`, one per
/// isomorphism class, assembled from multisets of connected types and sorted
/// by canonical form.
pub fn elliptic_diagrams(order: usize, cap: u32) -> Vec<Diagram> {
    let mut by_rank: Vec<Vec<Family>> = (0..=order).map(|r| connected_families(r, cap)).collect();
    by_rank[0].clear();
    let mut all: Vec<Family> = by_rank.into_iter().flatten().collect();
    all.sort();
    let mut out: Vec<(CanonicalForm, Diagram)> = Vec::new();
    let mut stack = Vec::new();
    collect_multisets(&all, 0, order, &mut stack, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, d)| d).collect()
}

fn collect_multisets(
    fams: &[Family],
    from: usize,
    remaining: usize,
    stack: &mut Vec<Family>,
    out: &mut Vec<(CanonicalForm, Diagram)>,
) {
    if remaining == 0 {
        let d = disjoint_union(&stack.iter().map(|f| f.diagram()).collect::<Vec<_>>());
        out.push((canonical_form(&d), d));
        return;
    }
    for i in from..fams.len() {
        if fams[i].rank() <= remaining {
            stack.push(fams[i]);
            collect_multisets(fams, i, remaining - fams[i].rank(), stack, out);
            stack.pop();
        }
    }
}

pub fn disjoint_union(parts: &[Diagram]) -> Diagram {
    let n: usize = parts.iter().map(|p| p.order()).sum();
    let mut d = Diagram::new(n);
    let mut off = 0;
    for p in parts {
        for (i, j, l) in p.edges() {
            d.set_label(off + i, off + j, l).expect("valid");
        }
        off += p.order();
    }
    d
}

/// Every Lannér diagram of the given order (>= 3) with labels `<= cap`, one per
/// isomorphism class. Any such diagram minus its last node is elliptic, so the
/// search extends each elliptic class of order `order - 1` by one node in all
/// possible ways.
pub fn lanner_diagrams(order: usize, cap: u32) -> Vec<Diagram> {
    use rayon::prelude::*;
    assert!(order >= 3);
    let bases = elliptic_diagrams(order - 1, cap);
    let k = order - 1;
    let choices = cap as usize - 1; // labels 2..=cap
    let total = choices.pow(k as u32);
    let mut found: Vec<(CanonicalForm, Diagram)> = bases
        .par_iter()
        .flat_map_iter(|base| {
            let mut local = Vec::new();
            let mut labels = vec![EdgeLabel::Right; k];
            for code in 0..total {
                let mut c = code;
                for l in labels.iter_mut() {
                    *l = EdgeLabel::from_order((c % choices) as u32 + 2);
                    c /= choices;
                }
                let cand = base.with_node(&labels).expect("valid labels");
                if !cand.is_connected() || !all_deletions_elliptic(&cand).unwrap_or(false) {
                    continue;
                }
                if is_elliptic(&cand) {
                    continue;
                }
                if matches!(classify(&cand), Ok(DiagramClass::Lanner)) {
                    local.push((canonical_form(&cand), cand.renumbered()));
                }
            }
            local
        })
        .collect();
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.dedup_by(|a, b| a.0 == b.0);
    found.into_iter().map(|(_, d)| d).collect()
}
