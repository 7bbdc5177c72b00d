//! Coxeter diagrams, their Gram matrices, determinants and certified signatures.

use std::fmt;
use std::fmt::Write as _;

use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numeric::{cos_pi_over, cos_pi_over_extended, zero_tol};

/// Label of the pair of facets `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeLabel {
    /// Facets orthogonal; no edge is drawn.
    Right,
    /// Dihedral angle `pi/m`, `m >= 3`.
    Angle(u32),
    /// Diverging facets; the weight `cosh(rho) > 1` may still be unknown.
    Dotted(Option<f64>),
}

impl EdgeLabel {
    /// The weight `w_ij`, or `None` for an unknown dotted weight.
    pub fn weight(self) -> Option<f64> {
        match self {
            EdgeLabel::Right => Some(0.0),
            EdgeLabel::Angle(m) => Some(cos_pi_over(m)),
            EdgeLabel::Dotted(w) => w,
        }
    }

    pub fn is_dotted(self) -> bool {
        matches!(self, EdgeLabel::Dotted(_))
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, EdgeLabel::Dotted(None))
    }

    /// Label value for finite angles: 2 for right angles, `m` for `pi/m`.
    pub fn angle_order(self) -> Option<u32> {
        match self {
            EdgeLabel::Right => Some(2),
            EdgeLabel::Angle(m) => Some(m),
            EdgeLabel::Dotted(_) => None,
        }
    }

    /// `Angle(2)` collapses to `Right`.
    pub fn from_order(m: u32) -> Self {
        if m == 2 {
            EdgeLabel::Right
        } else {
            EdgeLabel::Angle(m)
        }
    }

    fn validate(self) -> std::result::Result<Self, String> {
        match self {
            EdgeLabel::Angle(2) => Ok(EdgeLabel::Right),
            EdgeLabel::Angle(m) if m < 2 => Err(format!("label m{m} is below 3")),
            EdgeLabel::Dotted(Some(w)) if !(w > 1.0) || !w.is_finite() => {
                Err(format!("dotted weight {w} must be a finite value above 1"))
            }
            other => Ok(other),
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Right => write!(f, "m2"),
            EdgeLabel::Angle(m) => write!(f, "m{m}"),
            EdgeLabel::Dotted(Some(w)) => write!(f, "dotted w={w}"),
            EdgeLabel::Dotted(None) => write!(f, "dotted w=?"),
        }
    }
}

/// Abstract Coxeter diagram on `n` nodes. Nodes are addressed by position
/// `0..n`; `ids` carries their external identifiers (1-based in files), which
/// survive taking subdiagrams.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    ids: Vec<usize>,
    labels: Vec<EdgeLabel>,
}

impl Diagram {
    /// `n` pairwise orthogonal nodes with ids `1..=n`.
    pub fn new(n: usize) -> Self {
        Diagram { ids: (1..=n).collect(), labels: vec![EdgeLabel::Right; n * n] }
    }

    pub fn with_ids(ids: Vec<usize>) -> Result<Self> {
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDiagram("node identifiers must be unique".into()));
        }
        let n = ids.len();
        Ok(Diagram { ids, labels: vec![EdgeLabel::Right; n * n] })
    }

    /// Builds a diagram from `(i, j, label)` triples on positions `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, EdgeLabel)]) -> Result<Self> {
        let mut d = Diagram::new(n);
        for &(i, j, l) in edges {
            d.set_label(i, j, l)?;
        }
        Ok(d)
    }

    /// Convenience for angle-only diagrams: `(i, j, m)`.
    pub fn from_angles(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut d = Diagram::new(n);
        for &(i, j, m) in edges {
            d.set_label(i, j, EdgeLabel::from_order(m))?;
        }
        Ok(d)
    }

    /// Cyclic or linear diagrams are common enough to deserve a constructor:
    /// `path(&[5, 3, 3])` is the linear diagram with those consecutive labels.
    pub fn path(labels: &[u32]) -> Self {
        let n = labels.len() + 1;
        let edges: Vec<_> = labels.iter().enumerate().map(|(i, &m)| (i, i + 1, m)).collect();
        Diagram::from_angles(n, &edges).expect("path labels are valid")
    }

    /// Cycle through all nodes; `labels[i]` joins node `i` and `i+1 mod n`.
    pub fn cycle(labels: &[u32]) -> Self {
        let n = labels.len();
        let edges: Vec<_> = labels.iter().enumerate().map(|(i, &m)| (i, (i + 1) % n, m)).collect();
        Diagram::from_angles(n, &edges).expect("cycle labels are valid")
    }

    /// The triangle diagram `L_{p,q,r}`: node 0 (the distinguished vertex `v`)
    /// joined to nodes 1, 2 by `p`, `q`; nodes 1, 2 joined by `r`.
    pub fn triangle(p: u32, q: u32, r: u32) -> Self {
        Diagram::from_angles(3, &[(0, 1, p), (0, 2, q), (1, 2, r)]).expect("valid labels")
    }

    pub fn order(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn label(&self, i: usize, j: usize) -> EdgeLabel {
        self.labels[i * self.order() + j]
    }

    pub fn set_label(&mut self, i: usize, j: usize, label: EdgeLabel) -> Result<()> {
        let n = self.order();
        if i >= n {
            return Err(Error::UnknownNode(i));
        }
        if j >= n {
            return Err(Error::UnknownNode(j));
        }
        if i == j {
            return Err(Error::InvalidDiagram(format!("self-edge at node {}", self.ids[i])));
        }
        let label = label.validate().map_err(Error::InvalidDiagram)?;
        self.labels[i * n + j] = label;
        self.labels[j * n + i] = label;
        Ok(())
    }

    /// Non-right pairs `i < j` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, EdgeLabel)> {
        let n = self.order();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let l = self.label(i, j);
                if l != EdgeLabel::Right {
                    out.push((i, j, l));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&j| j != i && self.label(i, j) != EdgeLabel::Right)
    }

    pub fn dotted_count(&self) -> usize {
        self.edges().iter().filter(|e| e.2.is_dotted()).count()
    }

    pub fn has_unknown(&self) -> bool {
        self.labels.iter().any(|l| l.is_unknown())
    }

    /// Largest finite-angle label (2 when there are none).
    pub fn max_label(&self) -> u32 {
        self.labels
            .iter()
            .filter_map(|l| match l {
                EdgeLabel::Angle(m) => Some(*m),
                _ => None,
            })
            .max()
            .unwrap_or(2)
    }

    /// Copy with every known dotted weight replaced by an unknown one.
    pub fn blank_dotted(&self) -> Diagram {
        let mut d = self.clone();
        for l in &mut d.labels {
            if l.is_dotted() {
                *l = EdgeLabel::Dotted(None);
            }
        }
        d
    }

    /// Connected components as sorted position lists, ordered by first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                k += 1;
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.order() <= 1 || self.components().len() == 1
    }

    /// Induced diagram on the given positions (in the given order).
    pub fn subdiagram(&self, nodes: &[usize]) -> Result<Diagram> {
        let n = self.order();
        let mut seen = vec![false; n];
        for &v in nodes {
            if v >= n {
                return Err(Error::UnknownNode(v));
            }
            if seen[v] {
                return Err(Error::InvalidDiagram(format!("node {v} listed twice")));
            }
            seen[v] = true;
        }
        Ok(self.induced(nodes))
    }

    /// Unchecked `subdiagram` for internal callers with valid positions.
    pub(crate) fn induced(&self, nodes: &[usize]) -> Diagram {
        let k = nodes.len();
        let mut labels = Vec::with_capacity(k * k);
        for &a in nodes {
            for &b in nodes {
                labels.push(self.label(a, b));
            }
        }
        Diagram { ids: nodes.iter().map(|&v| self.ids[v]).collect(), labels }
    }

    /// Diagram obtained by appending a node with the given labels to every
    /// existing node. The new node gets id `max(ids) + 1`.
    pub fn with_node(&self, labels: &[EdgeLabel]) -> Result<Diagram> {
        let n = self.order();
        if labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} existing nodes",
                labels.len(),
                n
            )));
        }
        let mut ids = self.ids.clone();
        ids.push(self.ids.iter().copied().max().unwrap_or(0) + 1);
        let mut d = Diagram { ids, labels: vec![EdgeLabel::Right; (n + 1) * (n + 1)] };
        for i in 0..n {
            for j in 0..n {
                d.labels[i * (n + 1) + j] = self.label(i, j);
            }
        }
        for (i, &l) in labels.iter().enumerate() {
            d.set_label(i, n, l)?;
        }
        Ok(d)
    }

    /// Renumbers ids to `1..=n` in position order.
    pub fn renumbered(&self) -> Diagram {
        Diagram { ids: (1..=self.order()).collect(), labels: self.labels.clone() }
    }

    /// Relabels positions: node `perm[i]` of the result is node `i` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Diagram {
        let n = self.order();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        self.induced(&inv).renumbered()
    }

    /// Gram matrix; entries from unknown weights are left at zero and flagged.
    pub fn gram(&self) -> GramView {
        let n = self.order();
        let mut c = vec![0.0; n * n];
        let mut complete = true;
        for i in 0..n {
            c[i * n + i] = 1.0;
            for j in 0..n {
                if i != j {
                    match self.label(i, j).weight() {
                        Some(w) => c[i * n + j] = -w,
                        None => complete = false,
                    }
                }
            }
        }
        GramView { n, c, complete }
    }

    /// Gram matrix, failing on unknown weights.
    pub fn gram_matrix(&self) -> Result<Vec<f64>> {
        self.gram().into_complete()
    }

    /// Gram matrix in double-double precision, with angle entries evaluated
    /// there too rather than widened from `f64`.
    pub fn gram_extended(&self) -> Result<Vec<TwoFloat>> {
        let n = self.order();
        let mut c = vec![TwoFloat::from(0.0); n * n];
        for i in 0..n {
            c[i * n + i] = TwoFloat::from(1.0);
            for j in 0..n {
                if i == j {
                    continue;
                }
                c[i * n + j] = match self.label(i, j) {
                    EdgeLabel::Right => TwoFloat::from(0.0),
                    EdgeLabel::Angle(m) => -cos_pi_over_extended(m),
                    EdgeLabel::Dotted(Some(w)) => TwoFloat::from(-w),
                    EdgeLabel::Dotted(None) => return Err(self.unknown_error(i, j)),
                };
            }
        }
        Ok(c)
    }

    fn unknown_error(&self, i: usize, j: usize) -> Error {
        Error::UnknownWeight(self.ids[i], self.ids[j])
    }

    pub fn determinant(&self) -> Result<f64> {
        self.gram().determinant()
    }

    /// Signature with the process tolerance, escalating to double-double once
    /// when the double-precision result is ambiguous.
    pub fn signature(&self) -> Result<SignatureReport> {
        self.signature_with(zero_tol())
    }

    pub fn signature_with(&self, tol: f64) -> Result<SignatureReport> {
        let g = self.gram();
        let report = g.signature(tol)?;
        if report.certified {
            return Ok(report);
        }
        let ext = self.gram_extended()?;
        let vals: Vec<f64> = linalg::jacobi_eigenvalues(&ext, self.order())
            .into_iter()
            .map(linalg::Real::to_f64)
            .collect();
        let report = SignatureReport::from_eigenvalues(&vals, tol);
        if report.certified {
            Ok(report)
        } else {
            Err(Error::Uncertified(report.worst))
        }
    }

    pub fn to_cox(&self, dim: Option<usize>) -> String {
        CoxDocument { meta: Vec::new(), dim, diagram: self.renumbered() }.to_string()
    }
}

/// Materialized Gram matrix (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct GramView {
    pub n: usize,
    pub c: Vec<f64>,
    /// False when some unknown dotted weight was left out.
    pub complete: bool,
}

impl GramView {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    fn into_complete(self) -> Result<Vec<f64>> {
        if self.complete {
            Ok(self.c)
        } else {
            Err(Error::InvalidDiagram("Gram matrix has unknown dotted weights".into()))
        }
    }

    pub fn determinant(&self) -> Result<f64> {
        if !self.complete {
            return Err(Error::InvalidDiagram("determinant of a Gram matrix with unknown weights".into()));
        }
        Ok(linalg::det(&self.c, self.n))
    }

    /// Inertia by eigenvalue signs; uncertified reports are returned, not
    /// raised.
    pub fn signature(&self, tol: f64) -> Result<SignatureReport> {
        if !self.complete {
            return Err(Error::InvalidDiagram("signature of a Gram matrix with unknown weights".into()));
        }
        Ok(SignatureReport::from_eigenvalues(&linalg::symmetric_eigenvalues(&self.c, self.n), tol))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignatureReport {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub tol: f64,
    pub certified: bool,
    /// Magnitude of the eigenvalue closest to the ambiguity band.
    pub worst: f64,
}

impl SignatureReport {
    pub fn from_eigenvalues(vals: &[f64], tol: f64) -> Self {
        let mut r = SignatureReport { n_pos: 0, n_neg: 0, n_zero: 0, tol, certified: true, worst: 0.0 };
        for &v in vals {
            let a = v.abs();
            if a <= tol {
                r.n_zero += 1;
            } else if v > 0.0 {
                r.n_pos += 1;
            } else {
                r.n_neg += 1;
            }
            if a > tol && a <= 10.0 * tol {
                r.certified = false;
                r.worst = a;
            }
        }
        r
    }

    pub fn triple(&self) -> (usize, usize, usize) {
        (self.n_pos, self.n_neg, self.n_zero)
    }
}

impl fmt::Display for SignatureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_pos, self.n_neg, self.n_zero)
    }
}

/// A parsed `.cox` file: metadata comments, optional dimension, diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct CoxDocument {
    /// `# key: value` header lines, in file order.
    pub meta: Vec<(String, String)>,
    pub dim: Option<usize>,
    pub diagram: Diagram,
}

impl CoxDocument {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram> {
    Ok(parse_cox(text)?.diagram)
}

pub fn parse_cox(text: &str) -> Result<CoxDocument> {
    let mut meta = Vec::new();
    let mut dim = None;
    let mut nodes: Option<usize> = None;
    let mut edges: Vec<(usize, usize, usize, EdgeLabel)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once(':') {
                let k = k.trim();
                if !k.is_empty() && !k.contains(char::is_whitespace) {
                    meta.push((k.to_string(), v.trim().to_string()));
                }
            }
            continue;
        }
        // Allow the one-line "dim 2 / nodes 3 / edge 1 2 m3" shorthand.
        for stmt in line.split('/').map(str::trim).filter(|s| !s.is_empty()) {
            let tokens: Vec<&str> = stmt.split_whitespace().collect();
            match tokens[0] {
                "dim" => {
                    if tokens.len() != 2 {
                        return Err(Error::parse(line_no, "expected `dim <d>`"));
                    }
                    dim = Some(parse_num(tokens[1], line_no)?);
                }
                "nodes" => {
                    if tokens.len() != 2 {
                        return Err(Error::parse(line_no, "expected `nodes <n>`"));
                    }
                    if nodes.is_some() {
                        return Err(Error::parse(line_no, "`nodes` given twice"));
                    }
                    nodes = Some(parse_num(tokens[1], line_no)?);
                }
                "edge" => {
                    if tokens.len() < 4 {
                        return Err(Error::parse(line_no, "expected `edge <i> <j> <label>`"));
                    }
                    let i = parse_num(tokens[1], line_no)?;
                    let j = parse_num(tokens[2], line_no)?;
                    if i == j {
                        return Err(Error::parse(line_no, format!("self-edge at node {i}")));
                    }
                    let label = parse_label(&tokens[3..], line_no)?;
                    edges.push((line_no, i, j, label));
                }
                other => return Err(Error::parse(line_no, format!("unknown statement `{other}`"))),
            }
        }
    }

    // Without a `nodes` line the diagram spans the largest index mentioned.
    let n = match nodes {
        Some(n) => n,
        None => edges.iter().map(|e| e.1.max(e.2)).max().unwrap_or(0),
    };
    let mut diagram = Diagram::new(n);
    let mut seen = std::collections::HashSet::new();
    for (line_no, i, j, label) in edges {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(line_no, format!("node index out of range 1..={n}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::parse(line_no, format!("duplicate edge {i} {j}")));
        }
        diagram
            .set_label(i - 1, j - 1, label)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    Ok(CoxDocument { meta, dim, diagram })
}

fn parse_num(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_label(tokens: &[&str], line: usize) -> Result<EdgeLabel> {
    match tokens {
        [m] if m.starts_with('m') => {
            let k: u32 = m[1..].parse().map_err(|_| Error::parse(line, format!("bad label `{m}`")))?;
            if k < 3 {
                return Err(Error::parse(line, format!("label m{k} is below 3")));
            }
            Ok(EdgeLabel::Angle(k))
        }
        ["dotted", w] => {
            let value = w
                .strip_prefix("w=")
                .ok_or_else(|| Error::parse(line, "expected `dotted w=<value>`"))?;
            if value == "?" {
                return Ok(EdgeLabel::Dotted(None));
            }
            let w: f64 = value.parse().map_err(|_| Error::parse(line, format!("bad weight `{value}`")))?;
            if w == 1.0 {
                return Err(Error::parse(line, "bold edge (weight 1) is not allowed"));
            }
            if !(w > 1.0) || !w.is_finite() {
                return Err(Error::parse(line, format!("dotted weight {value} must exceed 1")));
            }
            Ok(EdgeLabel::Dotted(Some(w)))
        }
        _ => Err(Error::parse(line, format!("unknown label `{}`", tokens.join(" ")))),
    }
}

impl fmt::Display for CoxDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        if let Some(d) = self.dim {
            let _ = writeln!(s, "dim {d}");
        }
        let _ = writeln!(s, "nodes {}", self.diagram.order());
        for (i, j, l) in self.diagram.edges() {
            let _ = writeln!(s, "edge {} {} {}", i + 1, j + 1, l);
        }
        f.write_str(&s)
    }
}
