//! Verification of polytope diagrams: Lorentzian vector models, recovery of
//! unknown dotted weights, the face-lattice test and face diagrams.

use std::collections::HashMap;
use std::fmt;

use crate::classify::{elliptic_levels, elliptic_type, is_elliptic, mask_nodes};
use crate::diagram::{Diagram, EdgeLabel};
use crate::error::{Error, Result};
use crate::linalg;
use crate::numeric::{snap_angle, zero_tol, PRODUCT_TOL, SNAP_TOL};

/// Lorentzian product with form `diag(1, ..., 1, -1)`.
pub fn lorentz(u: &[f64], v: &[f64]) -> f64 {
    let k = u.len() - 1;
    let mut s = -u[k] * v[k];
    for i in 0..k {
        s += u[i] * v[i];
    }
    s
}

/// Unit outward normals in `R^{d,1}`, one per node.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorModel {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl VectorModel {
    /// Realizes a Gram matrix of order `d+1` and signature `(d,1,0)` as
    /// `B = |L|^{1/2} Q^T` from `G = Q L Q^T`, with the timelike coordinate
    /// last.
    pub fn from_gram(g: &[f64], dim: usize) -> Result<Self> {
        let n = dim + 1;
        if g.len() != n * n {
            return Err(Error::DimensionMismatch(format!("Gram matrix of order {} for d = {dim}", (g.len() as f64).sqrt())));
        }
        let (vals, q) = linalg::symmetric_eigen(g, n);
        let tol = zero_tol();
        if !(vals[0] < -tol && vals[1] > tol) {
            return Err(Error::DegenerateBasis(format!("eigenvalues {vals:?} are not of signature ({dim},1,0)")));
        }
        // Column order: positive eigenvalues first, the negative one last.
        let cols: Vec<usize> = (1..n).chain(std::iter::once(0)).collect();
        let vectors = (0..n)
            .map(|i| cols.iter().map(|&c| q[i * n + c] * vals[c].abs().sqrt()).collect())
            .collect();
        Ok(VectorModel { dim, vectors })
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        lorentz(&self.vectors[i], &self.vectors[j])
    }

    pub fn gram(&self) -> Vec<f64> {
        let n = self.vectors.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self.inner(i, j);
            }
        }
        g
    }

    /// Largest deviation between model products and the diagram's weights.
    pub fn max_gram_error(&self, d: &Diagram) -> f64 {
        let g = d.gram();
        let n = d.order();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j || !d.label(i, j).is_unknown() {
                    err = err.max((self.inner(i, j) - g.entry(i, j)).abs());
                }
            }
        }
        err
    }
}

/// A candidate solution of [`reconstruct_vector`].
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub vector: Vec<f64>,
    /// Product of the candidate with the withheld basis vector.
    pub withheld_product: f64,
}

/// Precomputed inverse Gram matrix of a basis, for repeated reconstruction.
#[derive(Clone, Debug)]
pub struct Reconstructor {
    basis: Vec<Vec<f64>>,
    ginv: Vec<f64>,
}

impl Reconstructor {
    pub fn new(basis: &[Vec<f64>]) -> Result<Self> {
        let k = basis.len();
        if k == 0 || basis.iter().any(|b| b.len() != k) {
            return Err(Error::DegenerateBasis(format!("{k} vectors do not form a square basis")));
        }
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                g[i * k + j] = lorentz(&basis[i], &basis[j]);
            }
        }
        let det = linalg::det(&g, k);
        if det.abs() < 1e-10 {
            return Err(Error::DegenerateBasis(format!("basis Gram determinant {det:e}")));
        }
        let ginv = linalg::inverse(&g, k).ok_or_else(|| Error::DegenerateBasis("singular basis".into()))?;
        Ok(Reconstructor { basis: basis.to_vec(), ginv })
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    fn combine(&self, c: &[f64]) -> Vec<f64> {
        let k = self.basis.len();
        let mut v = vec![0.0; k];
        for j in 0..k {
            let a: f64 = (0..k).map(|i| self.ginv[j * k + i] * c[i]).sum();
            if a != 0.0 {
                for (x, b) in v.iter_mut().zip(&self.basis[j]) {
                    *x += a * b;
                }
            }
        }
        v
    }

    /// Unit vectors whose products with the basis equal `products`, except at
    /// index `withheld`, whose entry is ignored. Sorted by withheld product.
    pub fn candidates(&self, products: &[f64], withheld: usize) -> Vec<Candidate> {
        let k = self.basis.len();
        let w = withheld;
        let gi = |i: usize, j: usize| self.ginv[i * k + j];
        let alpha = gi(w, w);
        let mut beta = 0.0;
        let mut gamma = 0.0;
        for i in (0..k).filter(|&i| i != w) {
            beta += gi(w, i) * products[i];
            for j in (0..k).filter(|&j| j != w) {
                gamma += gi(i, j) * products[i] * products[j];
            }
        }
        // alpha t^2 + 2 beta t + gamma - 1 = 0
        let mut ts = Vec::with_capacity(2);
        let scale = 1.0 + beta.abs() + (gamma - 1.0).abs();
        if alpha.abs() < 1e-13 * scale {
            if beta.abs() > 1e-13 * scale {
                ts.push((1.0 - gamma) / (2.0 * beta));
            }
        } else {
            let disc = beta * beta - alpha * (gamma - 1.0);
            let eps = 1e-12 * (beta * beta).max((alpha * (gamma - 1.0)).abs()).max(1.0);
            if disc > eps {
                let r = disc.sqrt();
                // Numerically stable pair of roots.
                let q = -(beta + beta.signum() * r);
                if q != 0.0 {
                    ts.push(q / alpha);
                    ts.push((gamma - 1.0) / q);
                } else {
                    ts.push(r / alpha);
                    ts.push(-r / alpha);
                }
            } else if disc > -eps {
                ts.push(-beta / alpha);
            }
        }
        ts.sort_by(f64::total_cmp);
        let mut c = products.to_vec();
        ts.into_iter()
            .map(|t| {
                c[w] = t;
                Candidate { vector: self.combine(&c), withheld_product: t }
            })
            .collect()
    }

    /// The vector with all products prescribed, if its norm is 1.
    pub fn determined(&self, products: &[f64]) -> (Vec<f64>, f64) {
        let v = self.combine(products);
        let norm = lorentz(&v, &v);
        (v, norm)
    }
}

/// Unit vectors with the prescribed products against all basis vectors but
/// `withheld` (`products` lists them in basis order, skipping `withheld`).
pub fn reconstruct_vector(basis: &[Vec<f64>], products: &[f64], withheld: usize) -> Result<Vec<Candidate>> {
    if products.len() + 1 != basis.len() || withheld >= basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} products for a basis of {} with withheld index {withheld}",
            products.len(),
            basis.len()
        )));
    }
    let r = Reconstructor::new(basis)?;
    let mut full = products.to_vec();
    full.insert(withheld, 0.0);
    Ok(r.candidates(&full, withheld))
}

/// Outcome of [`combinatorial_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct CombinatorialReport {
    pub ok: bool,
    /// Elliptic subdiagrams of order `d`, lexicographic.
    pub vertices: Vec<Vec<usize>>,
    pub violation: Option<String>,
}

/// Maximal elliptic order equals `d`, and every elliptic subdiagram of order
/// `d-1` lies in exactly two of order `d`.
pub fn combinatorial_check(d: &Diagram, dim: usize) -> CombinatorialReport {
    let levels = elliptic_levels(d, dim + 1);
    combinatorial_check_levels(d, dim, &levels)
}

pub(crate) fn combinatorial_check_levels(d: &Diagram, dim: usize, levels: &[Vec<u64>]) -> CombinatorialReport {
    let ids = d.ids();
    let name = |m: u64| -> String {
        let v: Vec<String> = mask_nodes(m).iter().map(|&i| ids[i].to_string()).collect();
        format!("{{{}}}", v.join(","))
    };
    let mut vertices: Vec<Vec<usize>> = levels[dim].iter().map(|&m| mask_nodes(m)).collect();
    vertices.sort();
    let fail = |violation: String, vertices: Vec<Vec<usize>>| CombinatorialReport { ok: false, vertices, violation: Some(violation) };
    if let Some(&m) = levels.get(dim + 1).and_then(|l| l.first()) {
        return fail(format!("elliptic subdiagram of order {} exceeds the dimension: {}", dim + 1, name(m)), vertices);
    }
    if levels[dim].is_empty() {
        return fail(format!("no elliptic subdiagram of order {dim}"), vertices);
    }
    if dim >= 1 {
        for &e in &levels[dim - 1] {
            let count = levels[dim].iter().filter(|&&v| v & e == e).count();
            if count != 2 {
                return fail(format!("elliptic subdiagram {} of order {} lies in {count} vertices, expected 2", name(e), dim - 1), vertices);
            }
        }
    }
    CombinatorialReport { ok: true, vertices, violation: None }
}

/// Elliptic `S` and node `v` such that `<S, v>` is parabolic-degenerate
/// (positive semidefinite and singular), if any.
pub fn find_parabolic(d: &Diagram, max_order: usize) -> Option<Vec<usize>> {
    let levels = elliptic_levels(d, max_order);
    let g = crate::classify::gram_for_elliptic_tests(d);
    find_parabolic_in(d.order(), &g, &levels, None)
}

/// As [`find_parabolic`] over precomputed elliptic levels, optionally only
/// among subdiagrams containing node `with`.
pub(crate) fn find_parabolic_in(n: usize, g: &[f64], levels: &[Vec<u64>], with: Option<usize>) -> Option<Vec<usize>> {
    for level in levels.iter().skip(1) {
        for &m in level {
            let s = mask_nodes(m);
            let k = s.len();
            let mut inv: Option<Option<Vec<f64>>> = None;
            for v in 0..n {
                if m >> v & 1 == 1 {
                    continue;
                }
                if let Some(c) = with {
                    if c != v && m >> c & 1 == 0 {
                        continue;
                    }
                }
                let w: Vec<f64> = s.iter().map(|&a| -g[v * n + a]).collect();
                if w.iter().all(|&x| x == 0.0) || w.iter().any(|&x| x >= 1.0) {
                    continue;
                }
                let inv = inv.get_or_insert_with(|| {
                    let gs: Vec<f64> = s.iter().flat_map(|&a| s.iter().map(move |&b| g[a * n + b])).collect();
                    linalg::inverse(&gs, k)
                });
                let Some(inv) = inv else { break };
                let schur = crate::localdet::attached_local_det(inv, &w);
                if schur.abs() <= 1e-9 {
                    let mut t = s.clone();
                    t.push(v);
                    t.sort_unstable();
                    return Some(t);
                }
            }
        }
    }
    None
}

/// A verified compact Coxeter polytope.
#[derive(Clone, Debug)]
pub struct PolytopeRecord {
    /// All dotted weights known.
    pub diagram: Diagram,
    pub dim: usize,
    pub model: VectorModel,
    pub vertices: Vec<Vec<usize>>,
    pub face_lattice_ok: bool,
    /// `name`, `family`, `source`, ... in insertion order.
    pub meta: Vec<(String, String)>,
}

impl PolytopeRecord {
    pub fn facets(&self) -> usize {
        self.diagram.order()
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        let value = value.into();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
        self
    }

    /// Vertex points `p` in the hyperboloid model, `(p,p) = -1`, one per vertex,
    /// lying on the polytope side of every other facet.
    pub fn vertex_points(&self) -> Vec<Vec<f64>> {
        let dim = self.dim;
        self.vertices
            .iter()
            .map(|vs| {
                // Null vector of the d normals under the Lorentz form: solve
                // Euclidean orthogonality against J e_i.
                let rows: Vec<Vec<f64>> = vs
                    .iter()
                    .map(|&i| {
                        let mut r = self.model.vectors[i].clone();
                        r[dim] = -r[dim];
                        r
                    })
                    .collect();
                let mut p = linalg::cofactor_null_vector(&rows, dim + 1);
                let norm = lorentz(&p, &p);
                let s = (-norm).sqrt();
                for x in &mut p {
                    *x /= s;
                }
                // Outward normals: (p, e) <= 0 for every facet.
                let other = (0..self.model.vectors.len()).find(|i| !vs.contains(i));
                if let Some(o) = other {
                    if lorentz(&p, &self.model.vectors[o]) > 0.0 {
                        for x in &mut p {
                            *x = -*x;
                        }
                    }
                }
                p
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    Combinatorics(String),
    Signature { found: (usize, usize, usize) },
    /// A solved weight for an unknown dotted edge is not above 1.
    WeightNotDotted { edge: (usize, usize), value: f64 },
    ProductMismatch { edge: (usize, usize), expected: f64, found: f64 },
    /// A node attached through prescribed products would not be a unit vector.
    NormMismatch { node: usize, norm: f64 },
    Parabolic(Vec<usize>),
    /// No basis with at most one unknown product is available for the node.
    Undetermined { node: usize },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Combinatorics(s) => write!(f, "face lattice: {s}"),
            Rejection::Signature { found } => write!(f, "signature {found:?} is not (d,1,n-d-1)"),
            Rejection::WeightNotDotted { edge, value } => {
                write!(f, "edge {} {}: solved weight {value} is not above 1", edge.0, edge.1)
            }
            Rejection::ProductMismatch { edge, expected, found } => {
                write!(f, "edge {} {}: product {found} contradicts prescribed weight {expected}", edge.0, edge.1)
            }
            Rejection::NormMismatch { node, norm } => write!(f, "node {node}: prescribed products force norm {norm}"),
            Rejection::Parabolic(nodes) => write!(f, "parabolic subdiagram {nodes:?}"),
            Rejection::Undetermined { node } => write!(f, "node {node}: every basis leaves two or more products unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Accepted(PolytopeRecord),
    Rejected(Rejection),
}

impl Verdict {
    pub fn accepted(self) -> Option<PolytopeRecord> {
        match self {
            Verdict::Accepted(r) => Some(r),
            Verdict::Rejected(_) => None,
        }
    }
}

pub(crate) fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

struct Solver<'a> {
    d: &'a Diagram,
    dim: usize,
    /// Weight per pair; `None` until solved for unknown dotted edges.
    weights: Vec<Option<f64>>,
    bases: HashMap<Vec<usize>, Option<Reconstructor>>,
}

impl<'a> Solver<'a> {
    fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights[i * self.d.order() + j]
    }

    fn set_weight(&mut self, i: usize, j: usize, w: Option<f64>) {
        let n = self.d.order();
        self.weights[i * n + j] = w;
        self.weights[j * n + i] = w;
    }

    fn basis(&mut self, nodes: &[usize], placed: &[Option<Vec<f64>>]) -> Option<&Reconstructor> {
        if !self.bases.contains_key(nodes) {
            let vecs: Vec<Vec<f64>> = nodes.iter().map(|&i| placed[i].clone().unwrap()).collect();
            self.bases.insert(nodes.to_vec(), Reconstructor::new(&vecs).ok());
        }
        self.bases.get(nodes).unwrap().as_ref()
    }

    /// Next node to attach with a basis of placed nodes and the index of the
    /// single unknown product in it, if any.
    fn next_step(&mut self, placed: &[Option<Vec<f64>>]) -> Option<(usize, Vec<usize>, Option<usize>)> {
        let n = self.d.order();
        let placed_nodes: Vec<usize> = (0..n).filter(|&i| placed[i].is_some()).collect();
        let k = self.dim + 1;
        for allowed_unknown in 0..=1usize {
            for w in (0..n).filter(|&i| placed[i].is_none()) {
                let mut found = None;
                let mut combos = Vec::new();
                combinations(placed_nodes.len(), k, |idx| {
                    let nodes: Vec<usize> = idx.iter().map(|&i| placed_nodes[i]).collect();
                    let unknown: Vec<usize> = (0..k).filter(|&a| self.weight(w, nodes[a]).is_none()).collect();
                    if unknown.len() == allowed_unknown {
                        combos.push((nodes, unknown.first().copied()));
                    }
                    combos.len() >= 64
                });
                for (nodes, unk) in combos {
                    if self.basis(&nodes, placed).is_some() {
                        found = Some((w, nodes, unk));
                        break;
                    }
                }
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    fn attach(&mut self, placed: &mut Vec<Option<Vec<f64>>>) -> std::result::Result<(), Rejection> {
        let n = self.d.order();
        if placed.iter().all(|p| p.is_some()) {
            return Ok(());
        }
        let Some((w, nodes, unknown)) = self.next_step(placed) else {
            let node = (0..n).find(|&i| placed[i].is_none()).unwrap();
            return Err(Rejection::Undetermined { node: self.d.ids()[node] });
        };
        let products: Vec<f64> = nodes.iter().map(|&u| -self.weight(w, u).unwrap_or(0.0)).collect();
        let rec = self.basis(&nodes, placed).unwrap().clone();
        let candidates: Vec<Vec<f64>> = match unknown {
            None => {
                let (v, norm) = rec.determined(&products);
                if (norm - 1.0).abs() > 1e-7 {
                    return Err(Rejection::NormMismatch { node: self.d.ids()[w], norm });
                }
                vec![v]
            }
            Some(a) => rec.candidates(&products, a).into_iter().map(|c| c.vector).collect(),
        };
        if candidates.is_empty() {
            let u = nodes[unknown.unwrap_or(0)];
            return Err(Rejection::WeightNotDotted { edge: (self.d.ids()[w], self.d.ids()[u]), value: f64::NAN });
        }
        let mut first_err = None;
        for v in candidates {
            match self.consistent(w, &v, placed) {
                Ok(solved) => {
                    for &(u, val) in &solved {
                        self.set_weight(w, u, Some(val));
                    }
                    placed[w] = Some(v);
                    match self.attach(placed) {
                        Ok(()) => return Ok(()),
                        Err(e) => {
                            placed[w] = None;
                            for &(u, _) in &solved {
                                self.set_weight(w, u, None);
                            }
                            self.bases.retain(|k, _| !k.contains(&w));
                            first_err.get_or_insert(e);
                        }
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.unwrap())
    }

    /// Checks a candidate for `w` against every placed node; returns the
    /// weights it assigns to unknown dotted edges.
    fn consistent(&self, w: usize, v: &[f64], placed: &[Option<Vec<f64>>]) -> std::result::Result<Vec<(usize, f64)>, Rejection> {
        let ids = self.d.ids();
        let mut solved = Vec::new();
        for (u, pu) in placed.iter().enumerate() {
            let Some(pu) = pu else { continue };
            let p = lorentz(v, pu);
            match self.weight(w, u) {
                Some(expected) => {
                    if (p + expected).abs() > PRODUCT_TOL * expected.abs().max(1.0) {
                        return Err(Rejection::ProductMismatch { edge: (ids[w], ids[u]), expected, found: -p });
                    }
                }
                None => {
                    if -p <= 1.0 + zero_tol() {
                        return Err(Rejection::WeightNotDotted { edge: (ids[w], ids[u]), value: -p });
                    }
                    solved.push((u, -p));
                }
            }
        }
        Ok(solved)
    }
}

/// Verifies a candidate polytope diagram of dimension `dim`, solving every
/// unknown dotted weight.
pub fn solve_dotted(d: &Diagram, dim: usize) -> Result<Verdict> {
    let n = d.order();
    if dim == 0 || n < dim + 1 {
        return Ok(Verdict::Rejected(Rejection::Combinatorics(format!("{n} facets cannot bound a {dim}-polytope"))));
    }
    let levels = elliptic_levels(d, dim + 1);
    let comb = combinatorial_check_levels(d, dim, &levels);
    if !comb.ok {
        return Ok(Verdict::Rejected(Rejection::Combinatorics(comb.violation.unwrap_or_default())));
    }

    // Seed: least (d+1)-subset with every weight known and signature (d,1,0).
    let mut seed: Option<Vec<usize>> = None;
    let mut precision = None;
    combinations(n, dim + 1, |idx| {
        let known = idx.iter().all(|&a| idx.iter().all(|&b| !d.label(a, b).is_unknown()));
        if !known {
            return false;
        }
        match d.induced(idx).signature() {
            Ok(s) if s.triple() == (dim, 1, 0) => {
                seed = Some(idx.to_vec());
                true
            }
            Ok(_) => false,
            Err(e) => {
                precision.get_or_insert(e);
                false
            }
        }
    });
    let Some(seed) = seed else {
        return Err(precision.unwrap_or(Error::NoSeed));
    };

    let sub = d.induced(&seed).gram_matrix()?;
    let model = VectorModel::from_gram(&sub, dim)?;
    let mut placed: Vec<Option<Vec<f64>>> = vec![None; n];
    for (k, &i) in seed.iter().enumerate() {
        placed[i] = Some(model.vectors[k].clone());
    }
    let mut solver = Solver {
        d,
        dim,
        weights: (0..n * n).map(|k| d.label(k / n, k % n).weight()).collect(),
        bases: HashMap::new(),
    };
    if let Err(r) = solver.attach(&mut placed) {
        return Ok(Verdict::Rejected(r));
    }

    let mut solved = d.clone();
    for i in 0..n {
        for j in i + 1..n {
            if d.label(i, j).is_unknown() {
                solved.set_label(i, j, EdgeLabel::Dotted(solver.weight(i, j)))?;
            }
        }
    }
    // n normals in R^{d,1}: the full Gram matrix has rank d+1.
    let sig = solved.signature()?;
    if sig.triple() != (dim, 1, n - dim - 1) {
        return Ok(Verdict::Rejected(Rejection::Signature { found: sig.triple() }));
    }
    if let Some(p) = find_parabolic(&solved, dim) {
        return Ok(Verdict::Rejected(Rejection::Parabolic(p.iter().map(|&i| d.ids()[i]).collect())));
    }
    let model = VectorModel { dim, vectors: placed.into_iter().map(Option::unwrap).collect() };
    Ok(Verdict::Accepted(PolytopeRecord {
        diagram: solved,
        dim,
        model,
        vertices: comb.vertices,
        face_lattice_ok: true,
        meta: Vec::new(),
    }))
}

/// Diagram of the face `P(S_0)`: the nodes of `S_0`'s good neighbours and
/// non-neighbours, with good-neighbour weights recomputed by projecting the
/// normals onto the orthogonal complement of `span(S_0)`.
pub fn face_diagram(record: &PolytopeRecord, s0: &[usize]) -> Result<Diagram> {
    let d = &record.diagram;
    let n = d.order();
    let sd = d.subdiagram(s0)?;
    if !is_elliptic(&sd) {
        return Err(Error::NotElliptic(format!("face subdiagram {s0:?}")));
    }
    let ty = elliptic_type(&sd)?;
    if ty.has_a_or_d5() {
        return Err(Error::NotGuaranteed(format!("{ty} has an A_n or D_5 component")));
    }
    let mut nodes = Vec::new();
    let mut good = Vec::new();
    for v in (0..n).filter(|v| !s0.contains(v)) {
        let joined = s0.iter().any(|&s| d.label(v, s) != EdgeLabel::Right);
        if !joined {
            nodes.push(v);
        } else {
            let mut with: Vec<usize> = s0.to_vec();
            with.push(v);
            if is_elliptic(&d.induced(&with)) {
                nodes.push(v);
                good.push(v);
            }
        }
    }
    if good.is_empty() {
        return Ok(d.induced(&nodes));
    }
    // Orthonormal basis of span(S_0) (positive definite) by Gram-Schmidt.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &s in s0 {
        let mut u = record.model.vectors[s].clone();
        for b in &basis {
            let c = lorentz(&u, b);
            for (x, y) in u.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = lorentz(&u, &u).sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
        basis.push(u);
    }
    let projected: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&v| {
            let mut u = record.model.vectors[v].clone();
            for b in &basis {
                let c = lorentz(&u, b);
                for (x, y) in u.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            let norm = lorentz(&u, &u).sqrt();
            u.iter_mut().for_each(|x| *x /= norm);
            u
        })
        .collect();
    let mut out = d.induced(&nodes);
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            if !good.contains(&nodes[a]) && !good.contains(&nodes[b]) {
                continue;
            }
            let w = -lorentz(&projected[a], &projected[b]);
            let label = if w > 1.0 + 1e-9 {
                EdgeLabel::Dotted(Some(w))
            } else if let Some(k) = snap_angle(w, 10_000, SNAP_TOL) {
                EdgeLabel::from_order(k)
            } else {
                return Err(Error::NotGuaranteed(format!(
                    "projected weight {w} between nodes {} and {} is not a Coxeter angle",
                    d.ids()[nodes[a]],
                    d.ids()[nodes[b]]
                )));
            };
            out.set_label(a, b, label)?;
        }
    }
    Ok(out)
}
