//! Tools for essentiality questions: the odd part of a diagram, dissections
//! into two Coxeter polytopes, doubling along a facet, volumes of
//! even-dimensional polytopes, necessary conditions for a finite-index
//! reflection subgroup, and the catalog of known polytopes.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::canon::canonical_form;
use crate::classify::{elliptic_levels, elliptic_type, mask_nodes};
use crate::diagram::{parse_cox, CoxDocument, Diagram, EdgeLabel};
use crate::enumerate::weight_label;
use crate::error::{Error, Result};
use crate::linalg;
use crate::polytope::{combinations, lorentz, solve_dotted, PolytopeRecord, Verdict};

/// Largest angle label recognised on a cutting hyperplane.
pub const CUT_LABEL_CAP: u32 = 1000;
/// Vertices closer than this to a cutting hyperplane lie on it.
const SIDE_TOL: f64 = 1e-9;

/// The subdiagram on nodes incident to an edge with an odd label.
pub fn sigma_odd(d: &Diagram) -> Diagram {
    let n = d.order();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| matches!(d.label(i, j), EdgeLabel::Angle(m) if m % 2 == 1)))
        .collect();
    d.subdiagram(&keep).expect("nodes are in range")
}

#[derive(Clone, Debug, PartialEq)]
pub enum DissectionKind {
    /// Orthogonal to the listed facets.
    Orthogonal { facets: Vec<usize> },
    /// Through the codimension-2 face of facets `face`, splitting `pi/m` into
    /// `pi/a` (on the side of `face.0`) and `pi/b`.
    Split { face: (usize, usize), m: u32, a: u32, b: u32 },
}

#[derive(Clone, Debug)]
pub struct DissectionWitness {
    /// Unit spacelike normal of the cutting hyperplane; part 0 lies on its
    /// negative side.
    pub normal: Vec<f64>,
    pub kind: DissectionKind,
    pub parts: [PolytopeRecord; 2],
    /// For each facet of the polytope, its edge label against the hyperplane
    /// in a part containing it (`None` when neither part keeps it).
    pub angles: Vec<Option<EdgeLabel>>,
    /// Facets of the polytope kept by each part, in part node order.
    pub kept: [Vec<usize>; 2],
}

impl fmt::Display for DissectionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DissectionKind::Orthogonal { facets } => {
                let ids: Vec<String> = facets.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "orthogonal to facets {}", ids.join(","))?;
            }
            DissectionKind::Split { face, m, a, b } => {
                write!(f, "split at facets {},{}: pi/{m} = pi/{a} + pi/{b}", face.0 + 1, face.1 + 1)?;
            }
        }
        for (i, part) in self.parts.iter().enumerate() {
            write!(f, "; part {}: {} facets", i + 1, part.facets())?;
        }
        Ok(())
    }
}

fn lorentz_unit(mut h: Vec<f64>) -> Option<Vec<f64>> {
    let norm = lorentz(&h, &h);
    let scale = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale < 1e-12 || norm <= 1e-9 * scale * scale {
        return None;
    }
    let s = norm.sqrt();
    h.iter_mut().for_each(|x| *x /= s);
    Some(h)
}

/// The part of `record` on the side `(p, sign*h) <= 0`, if it is a Coxeter
/// polytope.
fn cut_part(record: &PolytopeRecord, points: &[Vec<f64>], h: &[f64], sign: f64) -> Result<Option<(PolytopeRecord, Vec<usize>)>> {
    let n = record.facets();
    let dim = record.dim;
    let mut kept = Vec::new();
    for i in 0..n {
        let inside = record
            .vertices
            .iter()
            .zip(points)
            .any(|(v, p)| v.contains(&i) && sign * lorentz(p, h) < -SIDE_TOL);
        if inside {
            kept.push(i);
        }
    }
    let mut row = Vec::with_capacity(kept.len());
    for &i in &kept {
        match weight_label(-sign * lorentz(&record.model.vectors[i], h), CUT_LABEL_CAP) {
            Some(l) => row.push(l),
            None => return Ok(None),
        }
    }
    let part = record.diagram.subdiagram(&kept)?.renumbered().with_node(&row)?;
    match solve_dotted(&part, dim)? {
        Verdict::Accepted(r) => Ok(Some((r, kept))),
        Verdict::Rejected(_) => Ok(None),
    }
}

fn try_hyperplane(record: &PolytopeRecord, points: &[Vec<f64>], h: Vec<f64>, kind: DissectionKind) -> Result<Option<DissectionWitness>> {
    let below = points.iter().any(|p| lorentz(p, &h) < -SIDE_TOL);
    let above = points.iter().any(|p| lorentz(p, &h) > SIDE_TOL);
    if !below || !above {
        return Ok(None);
    }
    let Some((p0, k0)) = cut_part(record, points, &h, 1.0)? else { return Ok(None) };
    let Some((p1, k1)) = cut_part(record, points, &h, -1.0)? else { return Ok(None) };
    let angles = (0..record.facets())
        .map(|i| {
            if let Some(pos) = k0.iter().position(|&j| j == i) {
                Some(p0.diagram.label(pos, k0.len()))
            } else {
                k1.iter().position(|&j| j == i).map(|pos| p1.diagram.label(pos, k1.len()))
            }
        })
        .collect();
    Ok(Some(DissectionWitness { normal: h, kind, parts: [p0, p1], angles, kept: [k0, k1] }))
}

/// Integer splits `1/m = 1/a + 1/b` with `m < a <= 2m`.
pub fn angle_splits(m: u32) -> Vec<(u32, u32)> {
    (m + 1..=2 * m).filter(|&a| (a * m) % (a - m) == 0).map(|a| (a, a * m / (a - m))).collect()
}

/// Hyperplanes dissecting `record` into two Coxeter polytopes, found by the
/// orthogonal search (hyperplanes orthogonal to `d` facets that do not form a
/// vertex) and the split search (hyperplanes through a codimension-2 face
/// splitting its angle into two integral submultiples of pi).
pub fn find_dissections(record: &PolytopeRecord) -> Result<Vec<DissectionWitness>> {
    let dim = record.dim;
    let n = record.facets();
    let vs = &record.model.vectors;
    let points = record.vertex_points();
    let vertex_sets: HashSet<Vec<usize>> = record.vertices.iter().cloned().collect();

    let mut candidates: Vec<(Vec<f64>, DissectionKind)> = Vec::new();
    combinations(n, dim, |subset| {
        if vertex_sets.contains(subset) {
            return false;
        }
        let rows: Vec<Vec<f64>> = subset
            .iter()
            .map(|&i| {
                let mut r = vs[i].clone();
                r[dim] = -r[dim];
                r
            })
            .collect();
        if let Some(h) = lorentz_unit(linalg::cofactor_null_vector(&rows, dim + 1)) {
            candidates.push((h, DissectionKind::Orthogonal { facets: subset.to_vec() }));
        }
        false
    });
    // Codimension-2 faces are the elliptic pairs.
    for i in 0..n {
        for j in i + 1..n {
            let Some(m) = record.diagram.label(i, j).angle_order() else { continue };
            let c = lorentz(&vs[i], &vs[j]);
            for (a, b) in angle_splits(m) {
                for (x, y, p, q) in [(i, j, a, b), (j, i, a, b)] {
                    if a == b && x == j {
                        continue;
                    }
                    // h = s e_x + t e_y with (h, e_x) = -cos(pi/p), (h, e_y) = cos(pi/q).
                    let rhs = [-crate::numeric::cos_pi_over(p), crate::numeric::cos_pi_over(q)];
                    let Some(st) = linalg::solve(&[1.0, c, c, 1.0], 2, &rhs) else { continue };
                    let h: Vec<f64> = (0..=dim).map(|k| st[0] * vs[x][k] + st[1] * vs[y][k]).collect();
                    if let Some(h) = lorentz_unit(h) {
                        candidates.push((h, DissectionKind::Split { face: (x, y), m, a: p, b: q }));
                    }
                }
            }
        }
    }

    let found: Vec<Option<DissectionWitness>> = candidates
        .into_par_iter()
        .map(|(h, kind)| try_hyperplane(record, &points, h, kind))
        .collect::<Result<_>>()?;
    let mut out: Vec<DissectionWitness> = Vec::new();
    for w in found.into_iter().flatten() {
        let same = out.iter().any(|o| {
            let diff: f64 = o.normal.iter().zip(&w.normal).map(|(a, b)| (a - b).abs()).sum();
            let sum: f64 = o.normal.iter().zip(&w.normal).map(|(a, b)| (a + b).abs()).sum();
            diff.min(sum) < 1e-7
        });
        if !same {
            out.push(w);
        }
    }
    Ok(out)
}

/// Whether every subdiagram of `part` equal to its own odd part occurs in
/// `whole` (dotted weights ignored). Holds for parts of a dissection.
pub fn odd_subdiagrams_embed(part: &Diagram, whole: &Diagram) -> bool {
    let blank = |d: &Diagram| d.blank_dotted();
    let part = blank(part);
    let whole = blank(whole);
    let n = part.order();
    let mut whole_forms: Vec<HashSet<_>> = vec![HashSet::new(); n + 1];
    for (k, forms) in whole_forms.iter_mut().enumerate() {
        combinations(whole.order(), k, |s| {
            forms.insert(canonical_form(&whole.induced(s)));
            false
        });
    }
    let mut ok = true;
    for k in 1..=n {
        combinations(n, k, |s| {
            let sub = part.induced(s);
            if sigma_odd(&sub).order() == sub.order() && !whole_forms[k].contains(&canonical_form(&sub)) {
                ok = false;
            }
            !ok
        });
    }
    ok
}

/// Doubles `record` along `facet`: the mirror copy is glued on, normals
/// orthogonal to the facet extend through it, the others are reflected.
pub fn double(record: &PolytopeRecord, facet: usize) -> Result<PolytopeRecord> {
    let n = record.facets();
    if facet >= n {
        return Err(Error::UnknownNode(facet + 1));
    }
    let f = &record.model.vectors[facet];
    let mut vectors = Vec::new();
    let mut reflected = Vec::new();
    for j in (0..n).filter(|&j| j != facet) {
        let label = record.diagram.label(facet, j);
        match label {
            EdgeLabel::Right => {}
            EdgeLabel::Angle(m) if m % 2 == 0 => {}
            EdgeLabel::Angle(m) => {
                return Err(Error::Gluing(format!(
                    "angle pi/{m} between facets {} and {} doubles to 2pi/{m}",
                    facet + 1,
                    j + 1
                )))
            }
            _ => {}
        }
        let v = &record.model.vectors[j];
        vectors.push(v.clone());
        if label != EdgeLabel::Right {
            let c = lorentz(v, f);
            reflected.push(v.iter().zip(f).map(|(a, b)| a - 2.0 * c * b).collect::<Vec<f64>>());
        }
    }
    vectors.extend(reflected);
    let m = vectors.len();
    let mut dia = Diagram::new(m);
    for i in 0..m {
        for j in i + 1..m {
            let w = -lorentz(&vectors[i], &vectors[j]);
            let label = weight_label(w, CUT_LABEL_CAP)
                .ok_or_else(|| Error::Gluing(format!("doubled facets {} and {} meet at a non-Coxeter angle", i + 1, j + 1)))?;
            dia.set_label(i, j, label)?;
        }
    }
    match solve_dotted(&dia, record.dim)? {
        Verdict::Accepted(r) => Ok(r),
        Verdict::Rejected(why) => Err(Error::Gluing(format!("doubled diagram rejected: {why}"))),
    }
}

/// `sum (-1)^|T| / |W_T|` over elliptic subdiagrams `T`, the empty one included.
pub fn euler_characteristic(d: &Diagram, dim: usize) -> Result<f64> {
    let levels = elliptic_levels(d, dim);
    let mut chi = 1.0;
    for (k, level) in levels.iter().enumerate().skip(1) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for &m in level {
            let order = elliptic_type(&d.induced(&mask_nodes(m)))?.group_order();
            chi += sign / order as f64;
        }
    }
    Ok(chi)
}

/// Volume of an even-dimensional compact Coxeter polytope. Polygons use the
/// angle defect, higher dimensions the Euler characteristic of the group.
pub fn volume(record: &PolytopeRecord) -> Result<f64> {
    let d = record.dim;
    if d % 2 == 1 {
        return Err(Error::Unsupported(format!("volume in odd dimension {d}")));
    }
    if d == 2 {
        let angles: f64 = record
            .vertices
            .iter()
            .map(|v| PI / record.diagram.label(v[0], v[1]).angle_order().unwrap_or(2) as f64)
            .sum();
        return Ok((record.facets() as f64 - 2.0) * PI - angles);
    }
    Ok(euler_volume(&record.diagram, d)?)
}

/// `(-1)^(d/2) vol(S^d)/2 * chi`.
pub fn euler_volume(d: &Diagram, dim: usize) -> Result<f64> {
    let k = dim / 2;
    let mut half_sphere = 1.0;
    for i in 1..=k {
        half_sphere *= 2.0 * PI / (2 * i - 1) as f64;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * half_sphere * euler_characteristic(d, dim)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterReason {
    FacetCount { sub: usize, sup: usize },
    Combinatorics,
    VertexGroup { vertex: Vec<usize>, group: String },
    VolumeRatio(f64),
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterReason::FacetCount { sub, sup } => write!(f, "facet-count: {sup} facets exceed {sub}"),
            FilterReason::Combinatorics => write!(f, "combinatorics: equal facet counts but different face lattices"),
            FilterReason::VertexGroup { vertex, group } => {
                let ids: Vec<String> = vertex.iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "vertex-group: {group} at vertex {{{}}} embeds in no vertex group", ids.join(","))
            }
            FilterReason::VolumeRatio(r) => write!(f, "volume-ratio: {r:.9} is not a positive integer"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterVerdict {
    Possible { volume_ratio: Option<f64> },
    Impossible(FilterReason),
}

/// Whether the facet-vertex incidences of two simple polytopes agree up to
/// relabelling facets.
pub fn same_combinatorics(a: &PolytopeRecord, b: &PolytopeRecord) -> bool {
    let n = a.facets();
    if n != b.facets() || a.vertices.len() != b.vertices.len() {
        return false;
    }
    let mask = |v: &Vec<usize>| v.iter().fold(0u64, |m, &i| m | 1 << i);
    let target: HashSet<u64> = b.vertices.iter().map(mask).collect();
    let degree = |r: &PolytopeRecord, i: usize| r.vertices.iter().filter(|v| v.contains(&i)).count();
    let da: Vec<usize> = (0..n).map(|i| degree(a, i)).collect();
    let db: Vec<usize> = (0..n).map(|i| degree(b, i)).collect();

    fn rec(i: usize, n: usize, perm: &mut Vec<usize>, used: &mut [bool], a: &PolytopeRecord, da: &[usize], db: &[usize], target: &HashSet<u64>) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || da[i] != db[j] {
                continue;
            }
            perm.push(j);
            // Vertices of a whose facets are all mapped must land on vertices of b.
            let ok = a.vertices.iter().filter(|v| v.iter().all(|&x| x <= i)).all(|v| {
                let m = v.iter().fold(0u64, |m, &x| m | 1 << perm[x]);
                target.contains(&m)
            });
            if ok {
                used[j] = true;
                if rec(i + 1, n, perm, used, a, da, db, target) {
                    return true;
                }
                used[j] = false;
            }
            perm.pop();
        }
        false
    }
    rec(0, n, &mut Vec::new(), &mut vec![false; n], a, &da, &db, &target)
}

/// Necessary conditions for the reflection group of `p` to be a finite-index
/// subgroup of that of `f`, checked in order: facet count, combinatorics on
/// equal counts, vertex groups (order divisibility, equal types on equal
/// orders), and for even dimension the volume ratio.
pub fn subgroup_filter(p: &PolytopeRecord, f: &PolytopeRecord) -> Result<FilterVerdict> {
    if p.dim != f.dim {
        return Err(Error::DimensionMismatch(format!("{} vs {}", p.dim, f.dim)));
    }
    let (np, nf) = (p.facets(), f.facets());
    if nf > np {
        return Ok(FilterVerdict::Impossible(FilterReason::FacetCount { sub: np, sup: nf }));
    }
    if nf == np && !same_combinatorics(p, f) {
        return Ok(FilterVerdict::Impossible(FilterReason::Combinatorics));
    }
    let groups = |r: &PolytopeRecord| -> Result<Vec<(String, u128)>> {
        r.vertices
            .iter()
            .map(|v| {
                let t = elliptic_type(&r.diagram.induced(v))?;
                Ok((t.to_string(), t.group_order()))
            })
            .collect()
    };
    let gf = groups(f)?;
    for (v, (name, order)) in p.vertices.iter().zip(groups(p)?) {
        let fits = gf.iter().any(|(fname, forder)| forder % order == 0 && (forder != &order || *fname == name));
        if !fits {
            return Ok(FilterVerdict::Impossible(FilterReason::VertexGroup { vertex: v.clone(), group: name }));
        }
    }
    if p.dim % 2 == 0 {
        let ratio = volume(p)? / volume(f)?;
        if ratio < 1.0 - 1e-6 || (ratio - ratio.round()).abs() > 1e-6 {
            return Ok(FilterVerdict::Impossible(FilterReason::VolumeRatio(ratio)));
        }
        return Ok(FilterVerdict::Possible { volume_ratio: Some(ratio) });
    }
    Ok(FilterVerdict::Possible { volume_ratio: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogFamily {
    Simplex,
    Prism,
    Esselmann,
    TruncatedSimplex,
    Other,
}

impl fmt::Display for CatalogFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CatalogFamily::Simplex => "simplex",
            CatalogFamily::Prism => "prism",
            CatalogFamily::Esselmann => "esselmann",
            CatalogFamily::TruncatedSimplex => "truncated-simplex",
            CatalogFamily::Other => "other",
        })
    }
}

impl FromStr for CatalogFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "simplex" => CatalogFamily::Simplex,
            "prism" => CatalogFamily::Prism,
            "esselmann" => CatalogFamily::Esselmann,
            "truncated-simplex" => CatalogFamily::TruncatedSimplex,
            "other" => CatalogFamily::Other,
            _ => return Err(format!("unknown family `{s}`")),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub family: CatalogFamily,
    pub source: String,
    /// The file as written, for byte-identical saving.
    pub document: CoxDocument,
    pub record: PolytopeRecord,
}

impl CatalogEntry {
    pub fn from_document(name: &str, document: CoxDocument) -> Result<CatalogEntry> {
        let fail = |message: String| Error::Catalog { file: name.to_string(), message };
        let dim = document.dim.ok_or_else(|| fail("missing `dim` line".into()))?;
        let family = match document.meta_value("family") {
            Some(f) => f.parse().map_err(fail)?,
            None => CatalogFamily::Other,
        };
        let record = match solve_dotted(&document.diagram, dim).map_err(|e| fail(e.to_string()))? {
            Verdict::Accepted(r) => r,
            Verdict::Rejected(why) => return Err(fail(format!("rejected: {why}"))),
        };
        let record = document.meta.iter().fold(record, |r, (k, v)| r.with_meta(k, v.clone()));
        Ok(CatalogEntry {
            name: document.meta_value("name").unwrap_or(name).to_string(),
            family,
            source: document.meta_value("source").unwrap_or("").to_string(),
            document,
            record,
        })
    }
}

fn cox_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut items: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    items.sort();
    for p in items {
        if p.is_dir() {
            cox_files(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "cox") {
            out.push(p);
        }
    }
    Ok(())
}

pub fn load_entry(path: &Path) -> Result<CatalogEntry> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::Catalog { file: file.clone(), message: e.to_string() })?;
    let doc = parse_cox(&text).map_err(|e| Error::Catalog { file: file.clone(), message: e.to_string() })?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    CatalogEntry::from_document(&stem, doc).map_err(|e| match e {
        Error::Catalog { message, .. } => Error::Catalog { file, message },
        other => other,
    })
}

/// Every `.cox` file under `dir` (recursively, in path order), verified.
pub fn load_catalog(dir: &Path) -> Result<Vec<CatalogEntry>> {
    let mut files = Vec::new();
    cox_files(dir, &mut files)?;
    files.par_iter().map(|p| load_entry(p)).collect()
}

/// Writes each entry to `<dir>/<name>.cox` exactly as it was read.
pub fn save_catalog(dir: &Path, entries: &[CatalogEntry]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for e in entries {
        fs::write(dir.join(format!("{}.cox", e.name)), e.document.to_string())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_cox;

    fn verified(d: &Diagram, dim: usize) -> PolytopeRecord {
        solve_dotted(d, dim).unwrap().accepted().unwrap()
    }

    fn tri(p: u32, q: u32, r: u32) -> PolytopeRecord {
        verified(&Diagram::triangle(p, q, r), 2)
    }

    /// Angles of a polygon record, read off its vertices in cyclic order.
    fn polygon_angles(r: &PolytopeRecord) -> Vec<u32> {
        let mut a: Vec<u32> = r.vertices.iter().map(|v| r.diagram.label(v[0], v[1]).angle_order().unwrap_or(2)).collect();
        a.sort();
        a
    }

    fn pentagon() -> PolytopeRecord {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut d = Diagram::cycle(&[2, 2, 2, 2, 2]);
        for (i, j) in [(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)] {
            d.set_label(i, j, EdgeLabel::Dotted(Some(phi))).unwrap();
        }
        verified(&d, 2)
    }

    #[test]
    fn odd_part() {
        let even = Diagram::from_angles(4, &[(0, 1, 4), (1, 2, 10), (2, 3, 6)]).unwrap();
        assert_eq!(sigma_odd(&even).order(), 0);
        let mixed = Diagram::from_angles(5, &[(0, 1, 3), (1, 2, 10), (2, 3, 4), (3, 4, 5)]).unwrap();
        let odd = sigma_odd(&mixed);
        assert_eq!(odd.ids(), &[1, 2, 4, 5]);
        assert_eq!(sigma_odd(&odd), odd);
    }

    #[test]
    fn splits_of_angles() {
        assert_eq!(angle_splits(3), vec![(4, 12), (6, 6)]);
        assert_eq!(angle_splits(2), vec![(3, 6), (4, 4)]);
        for m in 2..30 {
            for (a, b) in angle_splits(m) {
                assert_eq!(a * b, m * (a + b));
            }
        }
    }

    #[test]
    fn triangle_388_splits_into_two_268() {
        let r = tri(3, 8, 8);
        let ws = find_dissections(&r).unwrap();
        let target = canonical_form(&Diagram::triangle(2, 6, 8));
        let hit = ws.iter().find(|w| w.parts.iter().all(|p| canonical_form(&p.diagram) == target)).expect("witness");
        assert!(matches!(hit.kind, DissectionKind::Split { m: 3, a: 6, b: 6, .. }));
        let total = volume(&r).unwrap();
        for w in &ws {
            let sum = volume(&w.parts[0]).unwrap() + volume(&w.parts[1]).unwrap();
            assert!((total - sum).abs() < 1e-8);
            for p in &w.parts {
                assert!(p.facets() <= r.facets());
                assert!(solve_dotted(&p.diagram, 2).unwrap().accepted().is_some());
                assert!(odd_subdiagrams_embed(&p.diagram, &r.diagram));
            }
        }
    }

    #[test]
    fn triangle_237_is_not_dissected() {
        assert!(find_dissections(&tri(2, 3, 7)).unwrap().is_empty());
    }

    #[test]
    fn areas() {
        assert!((volume(&tri(2, 3, 7)).unwrap() - PI / 42.0).abs() < 1e-12);
        assert!((volume(&pentagon()).unwrap() - PI / 2.0).abs() < 1e-12);
        // The Euler characteristic formula agrees with the angle defect.
        for r in [tri(2, 3, 7), tri(3, 8, 8), tri(2, 6, 8), pentagon()] {
            assert!((euler_volume(&r.diagram, 2).unwrap() - volume(&r).unwrap()).abs() < 1e-12);
        }
        assert!(matches!(volume(&verified(&Diagram::path(&[4, 3, 5]), 3)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn doubling_268() {
        let r = tri(2, 6, 8);
        // Node 0 meets node 1 at pi/2, node 2 at pi/6; node 1 meets 2 at pi/8.
        // The side shared by the pi/6 and pi/8 vertices is node 2.
        let dbl = double(&r, 2).unwrap();
        assert_eq!(dbl.facets(), 4);
        assert_eq!(polygon_angles(&dbl), vec![2, 2, 3, 4]);
        assert!((volume(&dbl).unwrap() - 2.0 * volume(&r).unwrap()).abs() < 1e-9);
        // Cutting along the mirror recovers two copies.
        let target = canonical_form(&r.diagram);
        let ws = find_dissections(&dbl).unwrap();
        assert!(ws.iter().any(|w| w.parts.iter().all(|p| canonical_form(&p.diagram) == target)));
        assert!(matches!(double(&tri(2, 3, 7), 0), Err(Error::Gluing(_))));
        assert!(matches!(double(&r, 3), Err(Error::UnknownNode(4))));
    }

    #[test]
    fn filter_conditions() {
        let r = tri(2, 6, 8);
        let dbl = double(&r, 2).unwrap();
        match subgroup_filter(&dbl, &r).unwrap() {
            FilterVerdict::Possible { volume_ratio: Some(x) } => assert!((x - 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            subgroup_filter(&r, &dbl).unwrap(),
            FilterVerdict::Impossible(FilterReason::FacetCount { sub: 3, sup: 4 })
        ));
        assert!(matches!(subgroup_filter(&tri(2, 3, 7), &tri(2, 3, 8)).unwrap(), FilterVerdict::Impossible(_)));
        assert!(matches!(subgroup_filter(&r, &verified(&Diagram::path(&[5, 3, 3, 3]), 4)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn combinatorics_of_polygons() {
        let quad = double(&tri(2, 6, 8), 2).unwrap();
        assert!(same_combinatorics(&quad, &quad));
        assert!(same_combinatorics(&tri(2, 3, 7), &tri(3, 8, 8)));
        assert!(!same_combinatorics(&quad, &pentagon()));
    }

    #[test]
    fn catalog_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let empty = tempfile::tempdir().unwrap();
        assert!(load_catalog(empty.path()).unwrap().is_empty());
        let text = "# name: t237\n# family: simplex\n# source: test\ndim 2\nnodes 3\nedge 1 2 m3\nedge 1 3 m7\n";
        fs::write(dir.path().join("t237.cox"), text).unwrap();
        let entries = load_catalog(dir.path()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].family, CatalogFamily::Simplex);
        let out = tempfile::tempdir().unwrap();
        save_catalog(out.path(), &entries).unwrap();
        assert_eq!(fs::read_to_string(out.path().join("t237.cox")).unwrap(), text);

        let bad = "# name: bad\ndim 2\nnodes 3\nedge 1 2 m3\nedge 1 3 m3\n";
        fs::write(dir.path().join("bad.cox"), bad).unwrap();
        match load_catalog(dir.path()) {
            Err(Error::Catalog { file, .. }) => assert!(file.ends_with("bad.cox")),
            other => panic!("{other:?}"),
        }
        let _ = parse_cox(text).unwrap();
    }
}
