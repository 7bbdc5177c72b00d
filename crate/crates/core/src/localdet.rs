//! Local determinants `det(S, T) = det(S) / det(S \ T)` and their closed forms.

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::linalg;
use crate::numeric::{cos_pi_over, sin2_pi_over, zero_tol};

pub fn local_det(sigma: &Diagram, t: &[usize]) -> Result<f64> {
    let n = sigma.order();
    for &v in t {
        if v >= n {
            return Err(Error::UnknownNode(v));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|v| !t.contains(v)).collect();
    let den = sigma.induced(&rest).determinant()?;
    if den.abs() <= zero_tol() {
        return Err(Error::NearZeroDenominator(format!("|det(S \\ T)| = {:e}", den.abs())));
    }
    Ok(sigma.determinant()? / den)
}

/// Closed form of `det(L_{p,q,r}, v)` where `v` is joined to the ends of the
/// `r`-edge by `p` and `q`.
pub fn d_pqr(p: u32, q: u32, r: u32) -> Result<f64> {
    if p < 2 || q < 2 {
        return Err(Error::Domain(format!("labels must be at least 2, got ({p},{q},{r})")));
    }
    if r < 3 {
        return Err(Error::Domain(format!("r = {r} must be at least 3")));
    }
    let (cp, cq, cr) = (cos_pi_over(p), cos_pi_over(q), cos_pi_over(r));
    Ok(1.0 - (cp * cp + cq * cq + 2.0 * cp * cq * cr) / sin2_pi_over(r))
}

/// Local determinant of `<T, y>` on `y` from the Gram matrix of `T` alone:
/// `1 - w^T G_T^{-1} w`, where `w` holds the weights joining `y` to `T`.
pub fn attached_local_det(gram_t_inv: &[f64], w: &[f64]) -> f64 {
    let k = w.len();
    let mut q = 0.0;
    for i in 0..k {
        if w[i] == 0.0 {
            continue;
        }
        for j in 0..k {
            q += w[i] * gram_t_inv[i * k + j] * w[j];
        }
    }
    1.0 - q
}

/// Result of gluing diagrams at a common node.
#[derive(Clone, Debug)]
pub struct LocSum {
    /// `sum_i det(S_i, v) - (l - 1)`.
    pub value: f64,
    /// `det(S, v)` of the glued diagram, computed directly.
    pub direct: f64,
    /// The glued diagram; `v` is at position 0.
    pub union: Diagram,
}

/// Glues `parts` along the node with identifier `v`. Parts must pairwise share
/// exactly that node and are otherwise disjoint (hence non-adjacent in the
/// union).
pub fn loc_sum(parts: &[Diagram], v: usize) -> Result<LocSum> {
    if parts.is_empty() {
        return Err(Error::Gluing("no parts".into()));
    }
    for (i, p) in parts.iter().enumerate() {
        if !p.ids().contains(&v) {
            return Err(Error::Gluing(format!("part {i} does not contain node {v}")));
        }
        for (j, q) in parts.iter().enumerate().skip(i + 1) {
            let shared: Vec<usize> = p.ids().iter().copied().filter(|x| q.ids().contains(x)).collect();
            if shared != [v] {
                return Err(Error::Gluing(format!("parts {i} and {j} share nodes {shared:?}, expected only {v}")));
            }
        }
    }
    let mut ids = vec![v];
    for p in parts {
        ids.extend(p.ids().iter().copied().filter(|&x| x != v));
    }
    let mut union = Diagram::with_ids(ids.clone())?;
    for p in parts {
        let pos: Vec<usize> = p.ids().iter().map(|x| ids.iter().position(|y| y == x).unwrap()).collect();
        for (a, b, l) in p.edges() {
            union.set_label(pos[a], pos[b], l)?;
        }
    }
    let mut value = 0.0;
    for p in parts {
        let at = p.ids().iter().position(|&x| x == v).unwrap();
        value += local_det(p, &[at])?;
    }
    value -= (parts.len() - 1) as f64;
    let direct = local_det(&union, &[0])?;
    Ok(LocSum { value, direct, union })
}

/// Inverse Gram matrix of a diagram, used by the Schur-complement forms.
pub fn inverse_gram(d: &Diagram) -> Result<Vec<f64>> {
    let g = d.gram_matrix()?;
    linalg::inverse(&g, d.order()).ok_or_else(|| Error::NearZeroDenominator("singular Gram matrix".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, elliptic_diagrams, is_elliptic, DiagramClass};
    use crate::diagram::EdgeLabel;
    use proptest::prelude::*;

    /// Relabels a diagram's ids (positions unchanged).
    fn with_ids(d: &Diagram, ids: Vec<usize>) -> Diagram {
        let mut out = Diagram::with_ids(ids).unwrap();
        for (i, j, l) in d.edges() {
            out.set_label(i, j, l).unwrap();
        }
        out
    }

    #[test]
    fn d237() {
        let d = d_pqr(2, 3, 7).unwrap();
        // 30-digit evaluation of the closed form.
        assert!((d + 0.327985277605681767).abs() < 1e-14);
        let l = local_det(&Diagram::triangle(2, 3, 7), &[0]).unwrap();
        assert!((l - d).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quotient() {
        let a = d_pqr(3, 3, 4).unwrap();
        let b = local_det(&Diagram::triangle(3, 3, 4), &[0]).unwrap();
        assert!((a - b).abs() < 1e-10);
        // With p = q = 2 both cosines vanish and the numerator is zero.
        for r in 3..20 {
            assert_eq!(d_pqr(2, 2, r).unwrap(), 1.0);
            let v = local_det(&Diagram::triangle(2, 2, r), &[0]).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(d_pqr(3, 3, 2).is_err());
    }

    #[test]
    fn trivial_subsets() {
        let l = Diagram::triangle(2, 3, 7);
        // T = S leaves the empty diagram (determinant 1) in the denominator.
        assert_eq!(local_det(&l, &[0, 1, 2]).unwrap(), l.determinant().unwrap());
        assert!((local_det(&l, &[]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singleton_quotient_matches_cofactor() {
        for d in elliptic_diagrams(4, 6) {
            let g = d.gram_matrix().unwrap();
            let minor: Vec<f64> = (1..4).flat_map(|i| (1..4).map(move |j| (i, j))).map(|(i, j)| g[i * 4 + j]).collect();
            let m3 = minor[0] * (minor[4] * minor[8] - minor[5] * minor[7])
                - minor[1] * (minor[3] * minor[8] - minor[5] * minor[6])
                + minor[2] * (minor[3] * minor[7] - minor[4] * minor[6]);
            let expect = d.determinant().unwrap() / m3;
            assert!((local_det(&d, &[0]).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn denominator_guard() {
        // Removing the middle node of a parabolic-plus-node diagram leaves A~2.
        let mut d = Diagram::new(4);
        for (i, j) in [(1, 2), (2, 3), (1, 3)] {
            d.set_label(i, j, EdgeLabel::Angle(3)).unwrap();
        }
        d.set_label(0, 1, EdgeLabel::Angle(3)).unwrap();
        assert!(matches!(local_det(&d, &[0]), Err(Error::NearZeroDenominator(_))));
    }

    #[test]
    fn gluing_two_triangles() {
        let a = with_ids(&Diagram::triangle(2, 3, 7), vec![1, 2, 3]);
        let b = with_ids(&Diagram::triangle(2, 3, 7), vec![1, 4, 5]);
        let s = loc_sum(&[a.clone(), b], 1).unwrap();
        let d = d_pqr(2, 3, 7).unwrap();
        assert!((s.value - (2.0 * d - 1.0)).abs() < 1e-12);
        assert!((s.value - s.direct).abs() < 1e-10);
        assert!((s.value + 1.65597).abs() < 1e-4);
        let single = loc_sum(&[a.clone()], 1).unwrap();
        assert!((single.value - d).abs() < 1e-12);
        let c = with_ids(&Diagram::triangle(2, 3, 7), vec![1, 2, 9]);
        assert!(matches!(loc_sum(&[a, c], 1), Err(Error::Gluing(_))));
    }

    #[test]
    fn gluing_edge_and_triangle() {
        let edge = with_ids(&Diagram::path(&[6]), vec![1, 2]);
        let tri = with_ids(&Diagram::triangle(2, 3, 7), vec![1, 3, 4]);
        let s = loc_sum(&[edge, tri], 1).unwrap();
        let expect = sin2_pi_over(6) + d_pqr(2, 3, 7).unwrap() - 1.0;
        assert!((s.value - expect).abs() < 1e-12);
        assert!((s.value - s.direct).abs() < 1e-10);
    }

    #[test]
    fn d_pqr_grows_in_each_label() {
        for p in 2..=10u32 {
            for q in 2..=10u32 {
                for r in 3..=30u32 {
                    let hyp = |a: u32, b: u32, c: u32| 1.0 / a as f64 + 1.0 / b as f64 + 1.0 / (c as f64) < 1.0 - 1e-12;
                    let base = d_pqr(p, q, r).unwrap().abs();
                    for (a, b, c) in [(p + 1, q, r), (p, q + 1, r), (p, q, r + 1)] {
                        if hyp(p, q, r) && hyp(a, b, c) {
                            assert!(d_pqr(a, b, c).unwrap().abs() >= base - 1e-12, "({p},{q},{r})");
                        }
                    }
                }
            }
        }
    }

    fn arb_part(max_extra: usize) -> impl Strategy<Value = Diagram> {
        (1..=max_extra).prop_flat_map(|extra| {
            let n = extra + 1;
            proptest::collection::vec(prop_oneof![2 => Just(2u32), 2 => Just(3u32), 1 => 4u32..=10], n * (n - 1) / 2)
                .prop_map(move |ls| {
                    let mut d = Diagram::new(n);
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            d.set_label(i, j, EdgeLabel::from_order(ls[k])).unwrap();
                            k += 1;
                        }
                    }
                    d
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn additivity(parts in proptest::collection::vec(arb_part(2), 1..=3)) {
            // Node 1 is shared; the rest get fresh ids.
            let mut next = 2;
            let mut glued = Vec::new();
            for p in &parts {
                let mut ids = vec![1];
                for _ in 1..p.order() {
                    ids.push(next);
                    next += 1;
                }
                glued.push(with_ids(p, ids));
            }
            let total: usize = glued.iter().map(|p| p.order() - 1).sum::<usize>() + 1;
            prop_assume!(total <= 6);
            match loc_sum(&glued, 1) {
                Ok(s) => prop_assert!((s.value - s.direct).abs() < 1e-9, "{} vs {}", s.value, s.direct),
                Err(Error::NearZeroDenominator(_)) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn determinant_decreases_in_attached_labels(
            order in 1usize..=4,
            pick in any::<prop::sample::Index>(),
            attach in proptest::collection::vec(2u32..=8, 4),
            which in any::<prop::sample::Index>(),
        ) {
            let pool = elliptic_diagrams(order, 6);
            let s = pick.get(&pool);
            let labels: Vec<EdgeLabel> = attach[..order].iter().map(|&m| EdgeLabel::from_order(m)).collect();
            let sx = s.with_node(&labels).unwrap();
            prop_assume!(matches!(classify(&sx), Ok(DiagramClass::Hyperbolic | DiagramClass::Lanner)));
            let i = which.index(order);
            let mut raised = attach[..order].to_vec();
            raised[i] += 1;
            let labels2: Vec<EdgeLabel> = raised.iter().map(|&m| EdgeLabel::from_order(m)).collect();
            let sx2 = s.with_node(&labels2).unwrap();
            prop_assert!(is_elliptic(s));
            prop_assert!(sx2.determinant().unwrap() < sx.determinant().unwrap());
        }
    }
}
