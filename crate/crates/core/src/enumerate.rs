//! The reduced enumeration of polytope diagrams: seed lists, attachment of
//! nodes with at most one dotted edge to the seed, and walking along edges.
//!
//! Every candidate carries a vector model, so weights of new edges are read
//! off Lorentzian products instead of being solved from determinants.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::canon::{canonical_form, canonical_form_colored, label_code, CanonicalForm};
use crate::classify::{elliptic_diagrams, elliptic_levels, gram_for_elliptic_tests, mask_nodes};
use crate::diagram::{Diagram, EdgeLabel};
use crate::error::{Error, Result};
use crate::linalg;
use crate::localdet::attached_local_det;
use crate::numeric::{cos_pi_over, snap_angle, zero_tol, SNAP_TOL};
use crate::polytope::{find_parabolic_in, lorentz, solve_dotted, PolytopeRecord, Reconstructor, VectorModel, Verdict};

/// Solved weights above `1 + DOTTED_MIN` are dotted edges.
pub const DOTTED_MIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EnumConfig {
    pub d: usize,
    pub k_max: u32,
    pub n_max: usize,
    /// Abort once this many candidate entries have been produced in total.
    pub limit_entries: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl EnumConfig {
    pub fn new(d: usize, k_max: u32, n_max: usize) -> Self {
        EnumConfig { d, k_max, n_max, limit_entries: None, time_limit: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 4 || self.k_max < 3 || self.n_max < self.d + 1 {
            return Err(Error::Domain(format!(
                "need d >= 4, k_max >= 3 and n_max >= d + 1, got d = {}, k_max = {}, n_max = {}",
                self.d, self.k_max, self.n_max
            )));
        }
        Ok(())
    }

    /// Dotted edges allowed in any candidate: `p <= n - d - 2` with `n <= n_max`.
    pub fn dotted_budget(&self) -> usize {
        self.n_max.saturating_sub(self.d + 2)
    }
}

/// A candidate subdiagram with its vector model.
#[derive(Clone, Debug)]
pub struct Entry {
    pub diagram: Diagram,
    pub vectors: Vec<Vec<f64>>,
    /// Nodes `0..core` are the seed `<S_0, x, y>` (0 when unmarked).
    pub core: usize,
    /// Largest diagram worth growing this entry into.
    pub n_cap: usize,
    pub parent: Option<String>,
}

impl Entry {
    fn colors(&self, d: usize) -> Vec<u32> {
        (0..self.diagram.order())
            .map(|i| match self.core {
                0 => 0,
                _ if i < d => 1,
                c if i < c => 2,
                _ => 3,
            })
            .collect()
    }

    pub fn form(&self, d: usize) -> CanonicalForm {
        canonical_form_colored(&self.diagram, &self.colors(d))
    }

    /// An unmarked entry from a known diagram (all weights solved).
    pub fn from_record(record: &PolytopeRecord, n_cap: usize) -> Entry {
        Entry { diagram: record.diagram.clone(), vectors: record.model.vectors.clone(), core: 0, n_cap, parent: None }
    }

    fn extended(&self, vector: Vec<f64>, row: &[EdgeLabel]) -> Entry {
        let diagram = self.diagram.with_node(row).expect("labels come from validated weights");
        let mut vectors = self.vectors.clone();
        vectors.push(vector);
        Entry { diagram, vectors, core: self.core, n_cap: self.n_cap, parent: None }
    }
}

/// A polytope diagram met during the search.
#[derive(Clone, Debug)]
pub struct Found {
    pub record: PolytopeRecord,
    pub stage: String,
    /// `p <= n - d - 2`.
    pub member: bool,
    pub form: CanonicalForm,
}

impl Found {
    pub fn facets(&self) -> usize {
        self.record.diagram.order()
    }

    pub fn dotted(&self) -> usize {
        self.record.diagram.dotted_count()
    }
}

#[derive(Clone, Debug)]
pub struct SeedLists {
    pub l0: Vec<Diagram>,
    pub l1: Vec<Entry>,
    pub l2: Vec<Entry>,
    pub found: Vec<Found>,
}

/// A node attached to a seed `<S_0, x, y>`.
#[derive(Clone, Debug)]
pub struct Attachment {
    pub vector: Vec<f64>,
    /// Labels to the seed nodes, in seed order.
    pub row: Vec<EdgeLabel>,
    key: Vec<u64>,
}

#[derive(Clone, Debug, Default)]
pub struct EnumResult {
    /// Polytopes with `p <= n - d - 2`, sorted by facet count then form.
    pub members: Vec<Found>,
    /// Other polytope diagrams met on the way (simplices, ...).
    pub others: Vec<Found>,
    pub stage_counts: Vec<(String, usize)>,
}

impl EnumResult {
    pub fn all(&self) -> impl Iterator<Item = &Found> {
        self.members.iter().chain(&self.others)
    }
}

/// Weight label of a solved product: dotted above 1, an angle `pi/k` with
/// `k <= k_max`, or nothing.
pub fn weight_label(w: f64, k_max: u32) -> Option<EdgeLabel> {
    if w > 1.0 + DOTTED_MIN {
        Some(EdgeLabel::Dotted(Some(w)))
    } else {
        snap_angle(w, k_max, SNAP_TOL).map(EdgeLabel::from_order)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Inspection {
    Reject,
    Partial,
    Polytope,
}

/// Hereditary tests every subdiagram of a compact polytope diagram passes,
/// and whether the diagram is already complete. With `new`, the subset tests
/// are restricted to subsets containing that node.
pub(crate) fn inspect(d: &Diagram, dim: usize, new: Option<usize>) -> Inspection {
    let n = d.order();
    let levels = elliptic_levels(d, dim + 1);
    if levels.get(dim + 1).is_some_and(|l| !l.is_empty()) {
        return Inspection::Reject;
    }
    let empty = Vec::new();
    let top = levels.get(dim).unwrap_or(&empty);
    let mut exact = !top.is_empty();
    for &e in levels.get(dim - 1).unwrap_or(&empty) {
        match top.iter().filter(|&&v| v & e == e).count() {
            0 | 1 => exact = false,
            2 => {}
            _ => return Inspection::Reject,
        }
    }
    // A Lannér subdiagram of order d+1 is a simplex inside a larger diagram.
    if n > dim + 1 {
        for &v in top {
            for u in 0..n {
                if v >> u & 1 == 1 {
                    continue;
                }
                if let Some(c) = new {
                    if u != c && v >> c & 1 == 0 {
                        continue;
                    }
                }
                let m = v | 1 << u;
                if mask_nodes(m).iter().all(|&a| top.binary_search(&(m & !(1 << a))).is_ok()) {
                    return Inspection::Reject;
                }
            }
        }
    }
    let g = gram_for_elliptic_tests(d);
    if find_parabolic_in(n, &g, &levels[..levels.len().min(dim + 1)], new).is_some() {
        return Inspection::Reject;
    }
    if exact {
        Inspection::Polytope
    } else {
        Inspection::Partial
    }
}

fn record_of(diagram: &Diagram, vectors: &[Vec<f64>], dim: usize) -> PolytopeRecord {
    let mut vertices: Vec<Vec<usize>> = elliptic_levels(diagram, dim)[dim].iter().map(|&m| mask_nodes(m)).collect();
    vertices.sort();
    PolytopeRecord {
        diagram: diagram.clone(),
        dim,
        model: VectorModel { dim, vectors: vectors.to_vec() },
        vertices,
        face_lattice_ok: true,
        meta: Vec::new(),
    }
}

fn found(diagram: &Diagram, vectors: &[Vec<f64>], cfg: &EnumConfig, stage: &str) -> Found {
    let n = diagram.order();
    Found {
        record: record_of(diagram, vectors, cfg.d),
        stage: stage.to_string(),
        member: diagram.dotted_count() + cfg.d + 2 <= n,
        form: canonical_form(diagram),
    }
}

fn for_each_vector(len: usize, k: u32, mut f: impl FnMut(&[u32])) {
    let mut v = vec![2u32; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            if v[i] < k {
                v[i] += 1;
                break;
            }
            v[i] = 2;
            i += 1;
        }
    }
}

fn automorphisms(s: &Diagram) -> Vec<Vec<usize>> {
    fn rec(s: &Diagram, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let i = perm.len();
        if i == s.order() {
            out.push(perm.clone());
            return;
        }
        for v in 0..s.order() {
            if used[v] || (0..i).any(|j| s.label(j, i) != s.label(perm[j], v)) {
                continue;
            }
            used[v] = true;
            perm.push(v);
            rec(s, perm, used, out);
            perm.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    rec(s, &mut Vec::new(), &mut vec![false; s.order()], &mut out);
    out
}

fn dedup_entries(mut entries: Vec<Entry>, d: usize) -> Vec<Entry> {
    let mut keyed: Vec<(CanonicalForm, Entry)> = entries.drain(..).map(|e| (e.form(d), e)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(CanonicalForm, Entry)> = Vec::with_capacity(keyed.len());
    for (f, e) in keyed {
        match out.last_mut() {
            Some((g, kept)) if *g == f => kept.n_cap = kept.n_cap.max(e.n_cap),
            _ => out.push((f, e)),
        }
    }
    out.into_iter().map(|(_, e)| e).collect()
}

fn dedup_found(mut found: Vec<Found>) -> Vec<Found> {
    // Stable: the earliest stage in input order wins.
    found.sort_by(|a, b| a.form.cmp(&b.form));
    found.dedup_by(|a, b| a.form == b.form);
    found
}

/// Lists `L_0` (elliptic seeds), `L_1 = <S_0, x>` of signature `(d,1,0)` and
/// `L_2 = <S_0, x, y>` with the `xy` weight forced by the vector model.
pub fn seed_lists(cfg: &EnumConfig) -> Result<SeedLists> {
    cfg.validate()?;
    let d = cfg.d;
    let k = cfg.k_max;
    let l0 = elliptic_diagrams(d, k);
    let per_seed: Vec<(Vec<Entry>, Vec<Entry>, Vec<Found>)> = l0.par_iter().map(|s0| seed_from(cfg, s0)).collect();
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut fs = Vec::new();
    for (a, b, c) in per_seed {
        l1.extend(a);
        l2.extend(b);
        fs.extend(c);
    }
    Ok(SeedLists { l0, l1: dedup_entries(l1, d), l2: dedup_entries(l2, d), found: dedup_found(fs) })
}

fn seed_from(cfg: &EnumConfig, s0: &Diagram) -> (Vec<Entry>, Vec<Entry>, Vec<Found>) {
    let d = cfg.d;
    let k = cfg.k_max;
    let g = s0.gram_matrix().expect("elliptic seeds have no unknown weights");
    let inv = linalg::inverse(&g, d).expect("elliptic Gram matrices are invertible");
    let autos = automorphisms(s0);
    let mut found_here = Vec::new();
    // (labels, is orbit representative)
    let mut usable: Vec<(Vec<u32>, bool)> = Vec::new();
    for_each_vector(d, k, |labels| {
        let w: Vec<f64> = labels.iter().map(|&m| cos_pi_over(m)).collect();
        if attached_local_det(&inv, &w) >= -zero_tol() {
            return;
        }
        let row: Vec<EdgeLabel> = labels.iter().map(|&m| EdgeLabel::from_order(m)).collect();
        let sigma1 = s0.with_node(&row).expect("valid");
        let rep = autos.iter().all(|p| {
            let image: Vec<u32> = (0..d).map(|i| labels[p[i]]).collect();
            image.as_slice() >= labels
        });
        match inspect(&sigma1, d, Some(d)) {
            Inspection::Reject => {}
            Inspection::Polytope => {
                if rep {
                    let model = VectorModel::from_gram(&sigma1.gram_matrix().expect("known"), d);
                    if let Ok(m) = model {
                        found_here.push(found(&sigma1, &m.vectors, cfg, "L1"));
                    }
                }
            }
            Inspection::Partial => usable.push((labels.to_vec(), rep)),
        }
    });

    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for (xl, rep) in &usable {
        if !rep {
            continue;
        }
        let row: Vec<EdgeLabel> = xl.iter().map(|&m| EdgeLabel::from_order(m)).collect();
        let sigma1 = s0.with_node(&row).expect("valid");
        let Ok(model) = VectorModel::from_gram(&sigma1.gram_matrix().expect("known"), d) else { continue };
        let Ok(rec) = Reconstructor::new(&model.vectors) else { continue };
        let entry1 = Entry { diagram: sigma1, vectors: model.vectors.clone(), core: 0, n_cap: cfg.n_max, parent: None };
        for (yl, _) in &usable {
            let mut products: Vec<f64> = yl.iter().map(|&m| -cos_pi_over(m)).collect();
            products.push(0.0);
            for cand in rec.candidates(&products, d) {
                let Some(EdgeLabel::Angle(m)) = weight_label(-cand.withheld_product, k).map(|l| match l {
                    EdgeLabel::Right => EdgeLabel::Angle(2),
                    other => other,
                }) else {
                    continue;
                };
                let mut row: Vec<EdgeLabel> = yl.iter().map(|&m| EdgeLabel::from_order(m)).collect();
                row.push(EdgeLabel::from_order(m));
                let mut e2 = entry1.extended(cand.vector, &row);
                e2.core = d + 2;
                match inspect(&e2.diagram, d, Some(d + 1)) {
                    Inspection::Reject => {}
                    Inspection::Polytope => found_here.push(found(&e2.diagram, &e2.vectors, cfg, "L2")),
                    Inspection::Partial => l2.push(e2),
                }
            }
        }
        let mut e1 = entry1;
        e1.core = d + 1;
        l1.push(e1);
    }
    (l1, l2, found_here)
}

/// Nodes joined to the seed `<S_0,x,y>` by at most one dotted edge. Each is
/// reconstructed from `<S_0,x>` minus a withheld node `v`: for `v = x` any
/// admissible weight is accepted; for `v` in `S_0` only a dotted one (the
/// non-dotted case is already covered by `v = x`).
pub fn attachments(cfg: &EnumConfig, seed: &Entry) -> Vec<Attachment> {
    let d = cfg.d;
    let k = cfg.k_max;
    let Ok(rec) = Reconstructor::new(&seed.vectors[..=d]) else { return Vec::new() };
    let y = &seed.vectors[d + 1];
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for v in 0..=d {
        for_each_vector(d, k, |labels| {
            let mut products = Vec::with_capacity(d + 1);
            let mut it = labels.iter();
            for i in 0..=d {
                products.push(if i == v { 0.0 } else { -cos_pi_over(*it.next().unwrap()) });
            }
            for cand in rec.candidates(&products, v) {
                let wv = -cand.withheld_product;
                let lv = if v == d {
                    weight_label(wv, k)
                } else if wv > 1.0 + DOTTED_MIN {
                    Some(EdgeLabel::Dotted(Some(wv)))
                } else {
                    None
                };
                let Some(lv) = lv else { continue };
                let Some(ly) = weight_label(-lorentz(&cand.vector, y), k) else { continue };
                if lv.is_dotted() && ly.is_dotted() {
                    continue;
                }
                let mut row: Vec<EdgeLabel> = products.iter().map(|&c| EdgeLabel::from_order(snap_angle(-c, k, SNAP_TOL).unwrap_or(2))).collect();
                row[v] = lv;
                row.push(ly);
                let key: Vec<u64> = row.iter().map(|&l| label_code(l)).collect();
                if !seen.insert(key.clone()) {
                    continue;
                }
                let trial = seed.diagram.with_node(&row).expect("valid");
                if inspect(&trial, d, Some(d + 2)) == Inspection::Reject {
                    continue;
                }
                out.push(Attachment { vector: cand.vector, row, key });
            }
        });
    }
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out
}

/// Weight of the edge joining two attachments, if admissible.
pub fn compatible(a: &Attachment, b: &Attachment, k_max: u32) -> Option<EdgeLabel> {
    weight_label(-lorentz(&a.vector, &b.vector), k_max)
}

/// The seed with a set of mutually compatible attachments, added in key
/// order whatever the order of `set`.
pub fn union_of(seed: &Entry, set: &[&Attachment], k_max: u32) -> Option<Entry> {
    let mut set = set.to_vec();
    set.sort_by(|a, b| a.key.cmp(&b.key));
    let mut e = seed.clone();
    for (i, a) in set.iter().enumerate() {
        let mut row = a.row.clone();
        for b in &set[..i] {
            row.push(compatible(b, a, k_max)?);
        }
        e = e.extended(a.vector.clone(), &row);
    }
    Some(e)
}

/// Unions of mutually compatible attachments (`L_3, L_4, ...`). Polytope
/// diagrams are reported and not extended; the rest become walk entries with
/// a facet cap of `2c + d + 2` for `c` attached nodes.
pub fn extend_tuples(cfg: &EnumConfig, seed: &Entry, atts: &[Attachment]) -> (Vec<Found>, Vec<Entry>) {
    let n = atts.len();
    let k = cfg.k_max;
    let mut compat = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let c = compatible(&atts[i], &atts[j], k);
            compat[i * n + j] = c;
            compat[j * n + i] = c;
        }
    }
    let mut out_found = Vec::new();
    let mut out_entries = Vec::new();
    let parent = Some(seed.form(cfg.d).digest());
    let mut stack: Vec<usize> = Vec::new();
    grow(cfg, seed, atts, &compat, &mut stack, seed.clone(), &parent, &mut out_found, &mut out_entries);
    (out_found, out_entries)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    cfg: &EnumConfig,
    seed: &Entry,
    atts: &[Attachment],
    compat: &[Option<EdgeLabel>],
    clique: &mut Vec<usize>,
    current: Entry,
    parent: &Option<String>,
    out_found: &mut Vec<Found>,
    out_entries: &mut Vec<Entry>,
) {
    let n = atts.len();
    let d = cfg.d;
    if current.diagram.order() >= cfg.n_max {
        return;
    }
    let start = clique.last().map_or(0, |&l| l + 1);
    for j in start..n {
        if clique.iter().any(|&i| compat[i * n + j].is_none()) {
            continue;
        }
        let mut row = atts[j].row.clone();
        row.extend(clique.iter().map(|&i| compat[i * n + j].unwrap()));
        if row.iter().filter(|l| l.is_dotted()).count() + current.diagram.dotted_count() > cfg.dotted_budget() {
            continue;
        }
        let mut next = current.extended(atts[j].vector.clone(), &row);
        let c = clique.len() + 1;
        let stage = format!("L{}", c + 2);
        match inspect(&next.diagram, d, Some(next.diagram.order() - 1)) {
            Inspection::Reject => continue,
            Inspection::Polytope => {
                out_found.push(found(&next.diagram, &next.vectors, cfg, &stage));
                continue;
            }
            Inspection::Partial => {}
        }
        next.n_cap = cfg.n_max.min(2 * c + d + 2);
        next.parent = parent.clone();
        clique.push(j);
        grow(cfg, seed, atts, compat, clique, next.clone(), parent, out_found, out_entries);
        clique.pop();
        out_entries.push(next);
    }
}

/// One round of walking along edges: every entry has an edge with a single
/// known vertex; the node completing it is reconstructed from a basis of the
/// edge's `d-1` facets and two more nodes, at most one of them joined to it by
/// a dotted edge.
pub fn walk_edges(cfg: &EnumConfig, entries: &[Entry]) -> Result<(Vec<Found>, Vec<Entry>)> {
    cfg.validate()?;
    let parts: Vec<(Vec<Found>, Vec<Entry>)> = entries.par_iter().map(|e| walk_one(cfg, e)).collect();
    let mut fs = Vec::new();
    let mut next = Vec::new();
    for (f, e) in parts {
        fs.extend(f);
        next.extend(e);
    }
    Ok((fs, dedup_entries(next, cfg.d)))
}

/// The first edge (order `d-1` elliptic subset) lying in exactly one vertex.
fn open_edge(levels: &[Vec<u64>], d: usize) -> Option<u64> {
    levels[d - 1].iter().copied().find(|&e| levels[d].iter().filter(|&&v| v & e == e).count() == 1)
}

fn walk_one(cfg: &EnumConfig, entry: &Entry) -> (Vec<Found>, Vec<Entry>) {
    let d = cfg.d;
    let k = cfg.k_max;
    let n = entry.diagram.order();
    let mut fs = Vec::new();
    let mut next = Vec::new();
    if n >= entry.n_cap || n >= cfg.n_max {
        return (fs, next);
    }
    let levels = elliptic_levels(&entry.diagram, d);
    if levels.len() <= d {
        return (fs, next);
    }
    let Some(edge) = open_edge(&levels, d) else { return (fs, next) };
    let e_nodes = mask_nodes(edge);
    let others: Vec<usize> = (0..n).filter(|&i| edge >> i & 1 == 0).collect();
    let budget = cfg.dotted_budget();
    let have = entry.diagram.dotted_count();

    // Labels on the edge's facets keeping <E, v> elliptic.
    let ge = entry.diagram.induced(&e_nodes).gram_matrix().expect("known");
    let m = d - 1;
    let mut elliptic_rows: Vec<Vec<u32>> = Vec::new();
    for_each_vector(m, k, |labels| {
        let mut g = vec![0.0; d * d];
        for i in 0..m {
            for j in 0..m {
                g[i * d + j] = ge[i * m + j];
            }
            g[i * d + m] = -cos_pi_over(labels[i]);
            g[m * d + i] = g[i * d + m];
        }
        g[m * d + m] = 1.0;
        if linalg::is_positive_definite(&g, d, zero_tol()) {
            elliptic_rows.push(labels.to_vec());
        }
    });

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for a in 0..others.len() {
        for b in a + 1..others.len() {
            let (u1, u2) = (others[a], others[b]);
            let mut basis_nodes = e_nodes.clone();
            basis_nodes.push(u1);
            basis_nodes.push(u2);
            let basis: Vec<Vec<f64>> = basis_nodes.iter().map(|&i| entry.vectors[i].clone()).collect();
            let Ok(rec) = Reconstructor::new(&basis) else { continue };
            for withheld in [m, m + 1] {
                let known = 2 * m + 1 - withheld;
                for er in &elliptic_rows {
                    for lab in 2..=k {
                        let mut products = vec![0.0; d + 1];
                        for i in 0..m {
                            products[i] = -cos_pi_over(er[i]);
                        }
                        products[known] = -cos_pi_over(lab);
                        for cand in rec.candidates(&products, withheld) {
                            let mut row = Vec::with_capacity(n);
                            let mut ok = true;
                            for i in 0..n {
                                match weight_label(-lorentz(&cand.vector, &entry.vectors[i]), k) {
                                    Some(l) => row.push(l),
                                    None => {
                                        ok = false;
                                        break;
                                    }
                                }
                            }
                            if !ok {
                                continue;
                            }
                            let dotted = row.iter().filter(|l| l.is_dotted()).count();
                            if have + dotted > budget {
                                continue;
                            }
                            // Nodes with at most one dotted edge to the seed
                            // were attached before walking.
                            if entry.core > 0 && row[..entry.core].iter().filter(|l| l.is_dotted()).count() < 2 {
                                continue;
                            }
                            let key: Vec<u64> = row.iter().map(|&l| label_code(l)).collect();
                            if !seen.insert(key) {
                                continue;
                            }
                            let mut e = entry.extended(cand.vector, &row);
                            match inspect(&e.diagram, d, Some(n)) {
                                Inspection::Reject => {}
                                Inspection::Polytope => fs.push(found(&e.diagram, &e.vectors, cfg, "walk")),
                                Inspection::Partial => {
                                    e.parent = Some(entry.form(d).digest());
                                    next.push(e);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (fs, next)
}

/// Re-verifies a found diagram independently: its dotted weights are blanked
/// and re-solved (kept when no seed without them exists), and the result must
/// match.
pub fn reverify(f: &Found) -> bool {
    let d = f.record.dim;
    let dia = &f.record.diagram;
    let solved = match solve_dotted(&dia.blank_dotted(), d) {
        Err(Error::NoSeed) => solve_dotted(dia, d),
        other => other,
    };
    match solved {
        Ok(Verdict::Accepted(r)) => {
            let n = dia.order();
            (0..n).all(|i| {
                (0..n).all(|j| match (dia.label(i, j).weight(), r.diagram.label(i, j).weight()) {
                    (Some(a), Some(b)) => (a - b).abs() < 1e-6 * a.abs().max(1.0),
                    _ => false,
                })
            })
        }
        _ => false,
    }
}

/// The full reduced enumeration.
pub fn enumerate_p(cfg: &EnumConfig) -> Result<EnumResult> {
    cfg.validate()?;
    let start = Instant::now();
    let check = |produced: usize, stage: &str| -> Result<()> {
        if let Some(limit) = cfg.limit_entries {
            if produced > limit {
                return Err(Error::ResourceLimit(format!("{produced} entries after stage {stage} exceed the limit of {limit}")));
            }
        }
        if let Some(t) = cfg.time_limit {
            if start.elapsed() > t {
                return Err(Error::ResourceLimit(format!("time limit of {t:?} reached after stage {stage} ({produced} entries)")));
            }
        }
        Ok(())
    };

    let seeds = seed_lists(cfg)?;
    let mut counts = vec![
        ("L0".to_string(), seeds.l0.len()),
        ("L1".to_string(), seeds.l1.len()),
        ("L2".to_string(), seeds.l2.len()),
    ];
    let mut produced = seeds.l1.len() + seeds.l2.len();
    check(produced, "L2")?;
    let mut all_found = seeds.found;

    let tuple_parts: Vec<(Vec<Found>, Vec<Entry>)> = seeds
        .l2
        .par_iter()
        .map(|s| {
            let atts = attachments(cfg, s);
            extend_tuples(cfg, s, &atts)
        })
        .collect();
    let mut frontier = Vec::new();
    for (f, e) in tuple_parts {
        all_found.extend(f);
        frontier.extend(e);
    }
    let mut frontier = dedup_entries(frontier, cfg.d);
    let mut by_size: HashMap<usize, usize> = HashMap::new();
    for e in &frontier {
        *by_size.entry(e.diagram.order() - cfg.d - 2).or_default() += 1;
    }
    let mut sizes: Vec<_> = by_size.into_iter().collect();
    sizes.sort();
    for (c, count) in sizes {
        counts.push((format!("L{}", c + 2), count));
    }
    produced += frontier.len();
    check(produced, "tuples")?;

    let mut seen: HashSet<CanonicalForm> = frontier.iter().map(|e| e.form(cfg.d)).collect();
    let mut round = 0;
    while !frontier.is_empty() {
        round += 1;
        let (f, next) = walk_edges(cfg, &frontier)?;
        all_found.extend(f.into_iter().map(|mut x| {
            x.stage = format!("walk{round}");
            x
        }));
        frontier = next.into_iter().filter(|e| seen.insert(e.form(cfg.d))).collect();
        counts.push((format!("walk{round}"), frontier.len()));
        produced += frontier.len();
        check(produced, &format!("walk{round}"))?;
    }

    let mut verified: Vec<Found> = dedup_found(all_found).into_par_iter().filter(reverify).collect();
    verified.sort_by(|a, b| a.facets().cmp(&b.facets()).then_with(|| a.form.cmp(&b.form)));
    let (members, others) = verified.into_iter().partition(|f| f.member);
    Ok(EnumResult { members, others, stage_counts: counts })
}
