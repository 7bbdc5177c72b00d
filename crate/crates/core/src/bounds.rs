//! Effective bounds on facet counts and edge multiplicities, and the search
//! that sharpens the multiplicity bound.

use std::fmt;

use rayon::prelude::*;

use crate::canon::{canonical_form, CanonicalForm};
use crate::classify::{elliptic_diagrams, lanner_diagrams};
use crate::diagram::{Diagram, EdgeLabel};
use crate::error::{Error, Result};
use crate::linalg;
use crate::localdet::inverse_gram;
use crate::numeric::{cos_pi_over, sin2_pi_over, snap_angle, SNAP_TOL};
use crate::polytope::find_parabolic;

/// Accepted `|det|` of a zero-determinant witness.
pub const ZERO_DET_TOL: f64 = 1e-7;
/// A solved cosine must sit this close to `cos(pi/k)`.
pub const ROOT_TOL: f64 = 1e-9;
/// Counted `q0` is skipped above this many label vectors.
pub const COUNT_LIMIT: u128 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Formula,
    Counted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KSource {
    Given,
    Search,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundSet {
    pub d: usize,
    pub k: u32,
    pub elliptic: u128,
    pub q0_formula: u128,
    pub q0_counted: Option<u128>,
    /// Configurations `<S,x>` of signature `(d,1)` counted up to isomorphism
    /// fixing `S`.
    pub n0_configs: u128,
    pub q1: u128,
    pub k0: u32,
    pub k0_source: KSource,
    pub n0: u128,
}

impl fmt::Display for BoundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counted = self.q0_counted.map_or_else(|| "skipped".to_string(), |v| v.to_string());
        let source = match self.k0_source {
            KSource::Given => "given",
            KSource::Search => "search",
        };
        let rows = [
            ("d", self.d.to_string()),
            ("k", self.k.to_string()),
            ("elliptic", self.elliptic.to_string()),
            ("q0_formula", self.q0_formula.to_string()),
            ("q0_counted", counted),
            ("N0", self.n0_configs.to_string()),
            ("q1", self.q1.to_string()),
            ("k0", format!("{} ({source})", self.k0)),
            ("n0", self.n0.to_string()),
        ];
        for (key, value) in rows {
            writeln!(f, "{key:<12}{value}")?;
        }
        Ok(())
    }
}

fn check_args(d: usize, k: u32) -> Result<()> {
    if d < 2 || k < 3 {
        return Err(Error::Domain(format!("bounds need d >= 2 and k >= 3, got d = {d}, k = {k}")));
    }
    Ok(())
}

/// Number of elliptic diagrams of order `d` with labels `<= k`. For `d = 4`
/// the classical count `8 + k(k-1)/2` is used by the formula mode instead.
pub fn elliptic_count(d: usize, k: u32) -> u128 {
    elliptic_diagrams(d, k).len() as u128
}

fn pow(base: u32, e: usize) -> u128 {
    (base as u128).saturating_pow(e as u32)
}

/// `Q_0(d,k)`: nodes of a dotted-free diagram containing an elliptic
/// subdiagram of order `d`.
pub fn q0_bound(d: usize, k: u32, mode: BoundMode) -> Result<u128> {
    check_args(d, k)?;
    match mode {
        BoundMode::Formula => {
            let e = if d == 4 { 8 + (k as u128) * (k as u128 - 1) / 2 } else { elliptic_count(d, k) };
            Ok(e.saturating_mul(pow(k - 1, 2 * d + 1)).saturating_add(d as u128 + 1))
        }
        BoundMode::Counted => {
            let configs = sx_configurations(d, k);
            let work = (configs.len() as u128).saturating_mul(pow(k - 1, d + 1));
            if work > COUNT_LIMIT {
                return Err(Error::ResourceLimit(format!("{work} label vectors to test")));
            }
            let best = configs.par_iter().map(|c| unit_attachments(c, k)).max().unwrap_or(0);
            Ok(d as u128 + 1 + best as u128)
        }
    }
}

/// `N_0(d,k)` counted.
pub fn n0_configurations(d: usize, k: u32) -> Result<u128> {
    check_args(d, k)?;
    Ok(sx_configurations(d, k).len() as u128)
}

/// `Q_1(d,k) = 2(d+1) N_0(d,k) (k-1)^d` with counted `N_0`.
pub fn q1_bound(d: usize, k: u32) -> Result<u128> {
    let n0 = n0_configurations(d, k)?;
    Ok((2 * (d as u128 + 1)).saturating_mul(n0).saturating_mul(pow(k - 1, d)))
}

/// `n_0(d) = 2 Q_1(d, K_0) + d + 2`.
pub fn n0_bound(d: usize, k0: u32) -> Result<u128> {
    Ok(q1_bound(d, k0)?.saturating_mul(2).saturating_add(d as u128 + 2))
}

pub fn bound_set(d: usize, k: u32, k0: Option<u32>) -> Result<BoundSet> {
    check_args(d, k)?;
    let configs = n0_configurations(d, k)?;
    let (k0, k0_source) = match k0 {
        Some(v) => (v, KSource::Search),
        None => (k, KSource::Given),
    };
    let q0_counted = match q0_bound(d, k, BoundMode::Counted) {
        Ok(v) => Some(v),
        Err(Error::ResourceLimit(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundSet {
        d,
        k,
        elliptic: elliptic_count(d, k),
        q0_formula: q0_bound(d, k, BoundMode::Formula)?,
        q0_counted,
        n0_configs: configs,
        q1: q1_bound(d, k)?,
        k0,
        k0_source,
        n0: n0_bound(d, k0)?,
    })
}

/// Label-preserving permutations of a small diagram.
fn automorphisms(s: &Diagram) -> Vec<Vec<usize>> {
    fn rec(s: &Diagram, perm: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
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

/// Iterates label vectors in `{2..=k}^len` (as cosines via a table index).
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

/// Gram matrices of all `<S,x>` with `S` elliptic of order `d`, labels `<= k`
/// and signature `(d,1,0)`, one per orbit of `Aut(S)` on attachments.
fn sx_configurations(d: usize, k: u32) -> Vec<Vec<f64>> {
    let seeds = elliptic_diagrams(d, k);
    seeds
        .par_iter()
        .flat_map_iter(|s| {
            let autos = automorphisms(s);
            let g = s.gram_matrix().expect("elliptic diagrams are fully known");
            let inv = linalg::inverse(&g, d).expect("elliptic Gram matrices are invertible");
            let mut out = Vec::new();
            for_each_vector(d, k, |labels| {
                // Orbit representative: lexicographically least under Aut(S).
                let minimal = autos.iter().all(|p| {
                    let image: Vec<u32> = (0..d).map(|i| labels[p[i]]).collect();
                    image.as_slice() >= labels
                });
                if !minimal {
                    return;
                }
                let w: Vec<f64> = labels.iter().map(|&m| cos_pi_over(m)).collect();
                if crate::localdet::attached_local_det(&inv, &w) >= -crate::numeric::zero_tol() {
                    return;
                }
                let n = d + 1;
                let mut full = vec![0.0; n * n];
                for i in 0..d {
                    for j in 0..d {
                        full[i * n + j] = g[i * d + j];
                    }
                    full[i * n + d] = -w[i];
                    full[d * n + i] = -w[i];
                }
                full[d * n + d] = 1.0;
                out.push(full);
            });
            out
        })
        .collect()
}

/// Number of label vectors joining a new node to the basis `<S,x>` that
/// determine a unit vector.
fn unit_attachments(gram: &[f64], k: u32) -> usize {
    let n = (gram.len() as f64).sqrt() as usize;
    let inv = linalg::inverse(gram, n).expect("signature (d,1,0) is nondegenerate");
    let mut count = 0;
    for_each_vector(n, k, |labels| {
        let c: Vec<f64> = labels.iter().map(|&m| -cos_pi_over(m)).collect();
        let norm = 1.0 - crate::localdet::attached_local_det(&inv, &c);
        if (norm - 1.0).abs() < 1e-8 {
            count += 1;
        }
    });
    count
}

/// Shapes of zero-determinant diagrams searched by [`refine_k_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchShape {
    /// `<S,x,y>`: `S` elliptic of order `d`, all labels `<= k(S)`.
    General,
    /// `d = 4` with `P(S_0)` a triangle: `S_0 = G_2^{(k)}`, `k >= 7`, the
    /// Lannér triangle `L_{p,q,r}` of non-neighbours and a node `y` joined to
    /// `S_0` by `l, m` and to the triangle by `s, t, u`.
    TriangleFace,
}

#[derive(Clone, Copy, Debug)]
pub struct RefineConfig {
    pub d: usize,
    pub label_cap: u32,
    pub shape: SearchShape,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub diagram: Diagram,
    pub max_label: u32,
    pub determinant: f64,
}

#[derive(Clone, Debug)]
pub struct RefineResult {
    /// Largest label over all witnesses; 0 when there are none.
    pub max_label: u32,
    /// Sorted by decreasing label, then canonical form.
    pub witnesses: Vec<Witness>,
    /// The maximum sits at the cap, so no bound is established.
    pub cap_too_small: bool,
}

/// Largest edge label among zero-determinant hyperbolic diagrams of the given
/// shape with labels up to the cap.
pub fn refine_k_bound(cfg: &RefineConfig) -> Result<RefineResult> {
    let found = match cfg.shape {
        SearchShape::General => {
            if cfg.d < 2 {
                return Err(Error::Domain("d must be at least 2".into()));
            }
            general_search(cfg.d, cfg.label_cap)
        }
        SearchShape::TriangleFace => {
            if cfg.d != 4 {
                return Err(Error::Domain("the triangle-face shape is four-dimensional".into()));
            }
            triangle_search(cfg.label_cap)
        }
    };
    Ok(collect_witnesses(found, cfg.label_cap))
}

fn collect_witnesses(mut found: Vec<(CanonicalForm, Witness)>, cap: u32) -> RefineResult {
    found.sort_by(|a, b| b.1.max_label.cmp(&a.1.max_label).then_with(|| a.0.cmp(&b.0)));
    found.dedup_by(|a, b| a.0 == b.0);
    let max_label = found.first().map_or(0, |w| w.1.max_label);
    RefineResult { max_label, witnesses: found.into_iter().map(|(_, w)| w).collect(), cap_too_small: max_label == cap }
}

/// Accepts a diagram whose last free edge was solved: near-zero determinant,
/// one negative eigenvalue, no parabolic subdiagram.
fn admit(d: Diagram) -> Option<(CanonicalForm, Witness)> {
    let det = d.determinant().ok()?;
    if det.abs() >= ZERO_DET_TOL {
        return None;
    }
    let sig = d.signature().ok()?;
    if sig.n_neg != 1 {
        return None;
    }
    if find_parabolic(&d, d.order()).is_some() {
        return None;
    }
    let max_label = d.max_label();
    Some((canonical_form(&d), Witness { diagram: d, max_label, determinant: det }))
}

/// Cosines `c` in `[0, 1)` with `det(G(c)) = 0`, where `c` is the weight of
/// edge `(i, j)`: the determinant is quadratic in it.
fn zero_det_weights(gram: &mut [f64], n: usize, i: usize, j: usize) -> Vec<f64> {
    let mut at = |c: f64| {
        gram[i * n + j] = -c;
        gram[j * n + i] = -c;
        linalg::det(gram, n)
    };
    let (f0, f1, fm) = (at(0.0), at(1.0), at(-1.0));
    let a = (f1 + fm) / 2.0 - f0;
    let b = (f1 - fm) / 2.0;
    let c = f0;
    let mut roots = Vec::new();
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-14 * scale {
        if b.abs() > 1e-14 * scale {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            roots.push(q / a);
            if q != 0.0 {
                roots.push(c / q);
            }
        }
    }
    roots.retain(|r| (-SNAP_TOL..1.0).contains(r));
    roots
}

/// Snaps a solved cosine and confirms the continuous root is within
/// [`ROOT_TOL`] of the label's cosine.
fn confirm_label(c: f64, k: u32) -> Option<u32> {
    let m = snap_angle(c, k, SNAP_TOL)?;
    ((c - cos_pi_over(m)).abs() < ROOT_TOL).then_some(m)
}

fn general_search(d: usize, cap: u32) -> Vec<(CanonicalForm, Witness)> {
    let seeds: Vec<Diagram> = elliptic_diagrams(d, cap).into_iter().filter(|s| s.max_label() >= 3).collect();
    seeds
        .par_iter()
        .flat_map_iter(|s| {
            let k = s.max_label();
            let n = d + 2;
            let base = s.gram_matrix().expect("known");
            let mut out = Vec::new();
            for_each_vector(d, k, |xl| {
                for_each_vector(d, k, |yl| {
                    let mut g = vec![0.0; n * n];
                    for i in 0..d {
                        for j in 0..d {
                            g[i * n + j] = base[i * d + j];
                        }
                        g[i * n + d] = -cos_pi_over(xl[i]);
                        g[d * n + i] = g[i * n + d];
                        g[i * n + d + 1] = -cos_pi_over(yl[i]);
                        g[(d + 1) * n + i] = g[i * n + d + 1];
                    }
                    g[d * n + d] = 1.0;
                    g[(d + 1) * n + d + 1] = 1.0;
                    for c in zero_det_weights(&mut g, n, d, d + 1) {
                        let Some(m) = confirm_label(c, k) else { continue };
                        let mut dia = s.clone();
                        dia = dia.with_node(&xl.iter().map(|&l| EdgeLabel::from_order(l)).collect::<Vec<_>>()).expect("valid");
                        let mut ylab: Vec<EdgeLabel> = yl.iter().map(|&l| EdgeLabel::from_order(l)).collect();
                        ylab.push(EdgeLabel::from_order(m));
                        dia = dia.with_node(&ylab).expect("valid");
                        if let Some(w) = admit(dia) {
                            out.push(w);
                        }
                    }
                });
            });
            out
        })
        .collect()
}

/// `w^T G^{-1} w` for `w` in `[0,1]^3`, minimised over the last coordinate.
fn min_over_last(ginv: &[f64], w0: f64, w1: f64) -> f64 {
    let fixed = ginv[0] * w0 * w0 + ginv[4] * w1 * w1 + 2.0 * ginv[1] * w0 * w1;
    let lin = 2.0 * (ginv[2] * w0 + ginv[5] * w1);
    let quad = ginv[8];
    let f = |t: f64| fixed + lin * t + quad * t * t;
    let mut best = f(0.0).min(f(1.0));
    if quad > 0.0 {
        let t = -lin / (2.0 * quad);
        if (0.0..=1.0).contains(&t) {
            best = best.min(f(t));
        }
    }
    best
}

/// `A(l,m,k)`: the quadratic form of `y`'s weights against `G_2^{(k)}`.
fn a_value(cl: f64, cm: f64, ck: f64) -> f64 {
    (cl * cl + cm * cm + 2.0 * cl * cm * ck) / (1.0 - ck * ck)
}

fn triangle_search(cap: u32) -> Vec<(CanonicalForm, Witness)> {
    // Lannér triangles with labels <= cap, as (p <= q <= r) in the
    // orientation of `Diagram::triangle`.
    let mut triangles: Vec<(u32, u32, u32)> = lanner_diagrams(3, cap.max(7))
        .iter()
        .map(|t| {
            let mut l: Vec<u32> = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| t.label(i, j).angle_order().unwrap_or(2)).collect();
            l.sort_unstable();
            (l[0], l[1], l[2])
        })
        .collect();
    triangles.sort_unstable();
    let jobs: Vec<(u32, (u32, u32, u32))> =
        (7..=cap).flat_map(|k| triangles.iter().filter(move |t| t.2 <= k).map(move |&t| (k, t))).collect();
    jobs.par_iter().flat_map_iter(|&(k, (p, q, r))| triangle_job(k, p, q, r)).collect()
}

fn triangle_job(k: u32, p: u32, q: u32, r: u32) -> Vec<(CanonicalForm, Witness)> {
    let tri = Diagram::triangle(p, q, r);
    let ginv = inverse_gram(&tri).expect("Lannér triangles are nondegenerate");
    let ck = cos_pi_over(k);
    let a_min = 0.25 / sin2_pi_over(k);
    let b_max = 1.0 - a_min;
    let neg: f64 = ginv.iter().map(|&g| g.min(0.0)).sum();
    if neg > b_max {
        return Vec::new();
    }
    let mut out = Vec::new();
    let form = |w: &[f64; 3]| -> f64 {
        let mut b = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                b += ginv[i * 3 + j] * w[i] * w[j];
            }
        }
        b
    };
    for s in 2..=k {
        let cs = cos_pi_over(s);
        for t in 2..=k {
            let ct = cos_pi_over(t);
            if min_over_last(&ginv, cs, ct) > b_max + 1e-12 {
                continue;
            }
            for u in 2..=k {
                let w = [cs, ct, cos_pi_over(u)];
                let target = 1.0 - form(&w);
                if target < a_min - 1e-9 {
                    continue;
                }
                for l in 2..=k {
                    let cl = cos_pi_over(l);
                    let disc = (1.0 - ck * ck) * (target - cl * cl);
                    if disc < -1e-12 {
                        continue;
                    }
                    let cm = -cl * ck + disc.max(0.0).sqrt();
                    let Some(m) = confirm_label(cm, k) else { continue };
                    if l == 2 && m == 2 {
                        continue;
                    }
                    debug_assert!((a_value(cl, cos_pi_over(m), ck) - target).abs() < 1e-6);
                    if let Some(wit) = admit(triangle_witness(k, (p, q, r), (l, m), (s, t, u))) {
                        out.push(wit);
                    }
                }
            }
        }
    }
    out
}

/// Nodes `0, 1` form `G_2^{(k)}`, nodes `2, 3, 4` the triangle, node 5 is `y`.
pub fn triangle_witness(k: u32, (p, q, r): (u32, u32, u32), (l, m): (u32, u32), (s, t, u): (u32, u32, u32)) -> Diagram {
    let mut d = Diagram::new(6);
    let set = |d: &mut Diagram, i: usize, j: usize, m: u32| d.set_label(i, j, EdgeLabel::from_order(m)).expect("valid");
    set(&mut d, 0, 1, k);
    set(&mut d, 2, 3, p);
    set(&mut d, 2, 4, q);
    set(&mut d, 3, 4, r);
    set(&mut d, 5, 0, l);
    set(&mut d, 5, 1, m);
    set(&mut d, 5, 2, s);
    set(&mut d, 5, 3, t);
    set(&mut d, 5, 4, u);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::is_elliptic;

    #[test]
    fn formula_example() {
        assert_eq!(q0_bound(4, 3, BoundMode::Formula).unwrap(), 11 * 512 + 5);
        assert!(q0_bound(4, 3, BoundMode::Counted).unwrap() <= 5637);
        assert!(q0_bound(1, 3, BoundMode::Formula).is_err());
        assert!(q0_bound(4, 2, BoundMode::Formula).is_err());
    }

    #[test]
    fn formula_monotone_in_k() {
        for d in [2, 3] {
            let vals: Vec<u128> = (3..=10).map(|k| q0_bound(d, k, BoundMode::Formula).unwrap()).collect();
            assert!(vals[0] > 0);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{vals:?}");
        }
    }

    #[test]
    fn counted_below_formula() {
        for (d, k) in [(2, 3), (2, 6), (3, 3), (3, 4), (4, 3)] {
            let f = q0_bound(d, k, BoundMode::Formula).unwrap();
            let c = q0_bound(d, k, BoundMode::Counted).unwrap();
            assert!(c <= f, "d={d} k={k}: {c} > {f}");
            let formula_n0 = elliptic_count(d, k) * pow(k - 1, d);
            assert!(n0_configurations(d, k).unwrap() <= formula_n0);
        }
    }

    #[test]
    fn n0_composition_and_monotonicity() {
        for k in 3..=6 {
            assert_eq!(n0_bound(3, k).unwrap(), 2 * q1_bound(3, k).unwrap() + 5);
        }
        let v: Vec<u128> = (3..=10).map(|k| n0_bound(2, k).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
    }

    #[test]
    fn n0_regression_d4_k5() {
        let v = n0_bound(4, 5).unwrap();
        assert_eq!(v, 2 * q1_bound(4, 5).unwrap() + 6);
        assert_eq!(v, N0_D4_K5);
    }

    const N0_D4_K5: u128 = 11_294_726;

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&Diagram::path(&[3, 3, 3])).len(), 2);
        assert_eq!(automorphisms(&Diagram::new(3)).len(), 6);
        assert_eq!(automorphisms(&Diagram::path(&[4, 3, 3])).len(), 1);
    }

    /// Independent scan: every labelling of 4 nodes with labels <= cap.
    fn brute_force_d2(cap: u32) -> (u32, Vec<CanonicalForm>) {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut forms = Vec::new();
        let mut best = 0;
        for_each_vector(6, cap, |labels| {
            let mut d = Diagram::new(4);
            for (&(i, j), &m) in pairs.iter().zip(labels) {
                d.set_label(i, j, EdgeLabel::from_order(m)).unwrap();
            }
            let max = *labels.iter().max().unwrap();
            // Some elliptic pair carries the largest label.
            let has_seed = pairs.iter().zip(labels).any(|(&(i, j), &m)| m == max && m >= 3 && is_elliptic(&d.induced(&[i, j])));
            if !has_seed || d.determinant().unwrap().abs() >= ZERO_DET_TOL {
                return;
            }
            if d.signature().unwrap().n_neg != 1 || find_parabolic(&d, 4).is_some() {
                return;
            }
            best = best.max(max);
            forms.push(canonical_form(&d));
        });
        forms.sort();
        forms.dedup();
        (best, forms)
    }

    #[test]
    fn general_d2_matches_brute_force() {
        for cap in [6, 8] {
            let r = refine_k_bound(&RefineConfig { d: 2, label_cap: cap, shape: SearchShape::General }).unwrap();
            let (best, forms) = brute_force_d2(cap);
            assert_eq!(r.max_label, best);
            let mut got: Vec<CanonicalForm> = r.witnesses.iter().map(|w| canonical_form(&w.diagram)).collect();
            got.sort();
            assert_eq!(got, forms);
            for w in &r.witnesses {
                assert!(w.determinant.abs() < ZERO_DET_TOL);
                assert_eq!(w.diagram.signature().unwrap().n_neg, 1);
            }
        }
    }

    #[test]
    fn general_nonincreasing_as_cap_tightens() {
        let mut last = u32::MAX;
        for cap in (4..=9).rev() {
            let r = refine_k_bound(&RefineConfig { d: 2, label_cap: cap, shape: SearchShape::General }).unwrap();
            assert!(r.max_label <= last);
            last = r.max_label;
        }
    }

    #[test]
    fn known_triangle_witness() {
        let d = triangle_witness(30, (2, 3, 15), (2, 3), (3, 15, 15));
        assert!(d.determinant().unwrap().abs() < 1e-12);
        assert_eq!(d.signature().unwrap().triple(), (4, 1, 1));
        assert!(find_parabolic(&d, 6).is_none());
        assert!(admit(d).is_some());
    }

    #[test]
    fn triangle_shape_small_cap() {
        let r = refine_k_bound(&RefineConfig { d: 4, label_cap: 20, shape: SearchShape::TriangleFace }).unwrap();
        assert_eq!(r.max_label, 20);
        assert!(r.cap_too_small);
        let r = refine_k_bound(&RefineConfig { d: 4, label_cap: 19, shape: SearchShape::TriangleFace }).unwrap();
        assert!(r.max_label <= 18);
        assert!(!r.cap_too_small);
    }
}
