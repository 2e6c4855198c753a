//! Standard quivers and automorphisms used by the verification suites:
//! type-A chains with their diagram involution, the affine A3 rotation, the
//! D4 triality and the E6 involution.
//!
//! Vertex ids are zero-padded so lexicographic order equals numeric order;
//! all representative choices in the split-quotient construction rely on
//! that. Arrow ids are "src-tgt".

use std::collections::{BTreeMap, BTreeSet};

use crate::adhm::GradedDims;
use crate::error::{Error, Result};
use crate::fold::FoldContext;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::slodowy::SliceSpec;
use crate::Mat;
use crate::quiver::{AdmAut, Arrow, Quiver};
use num_traits::{One, Zero};

/// Vertex id of the type-A chain: 1-based index, zero-padded.
pub fn a_vertex(i: usize) -> String {
    format!("{i:02}")
}

pub fn arrow_id(src: &str, tgt: &str) -> String {
    format!("{src}-{tgt}")
}

fn edge(src: &str, tgt: &str) -> [Arrow; 2] {
    [
        Arrow {
            id: arrow_id(src, tgt),
            src: src.to_string(),
            tgt: tgt.to_string(),
            bar: arrow_id(tgt, src),
        },
        Arrow {
            id: arrow_id(tgt, src),
            src: tgt.to_string(),
            tgt: src.to_string(),
            bar: arrow_id(src, tgt),
        },
    ]
}

/// Chain quiver on the given vertex ids, oriented left to right.
pub fn path_quiver(ids: &[&str]) -> Quiver {
    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    for w in ids.windows(2) {
        let [f, b] = edge(w[0], w[1]);
        orientation.insert(f.id.clone());
        arrows.push(f);
        arrows.push(b);
    }
    Quiver {
        vertices: ids.iter().map(|s| s.to_string()).collect(),
        arrows,
        orientation,
    }
}

/// The quiver of type A_{2n-1}: vertices 1..2n-1, edges between neighbours,
/// oriented towards the middle vertex n.
pub fn type_a_quiver(n: usize) -> Quiver {
    assert!(n >= 1);
    let len = 2 * n - 1;
    let vertices: Vec<String> = (1..=len).map(a_vertex).collect();
    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    for i in 1..len {
        let (u, v) = (a_vertex(i), a_vertex(i + 1));
        let [f, b] = edge(&u, &v);
        // Forward means "towards the middle".
        if i + 1 <= n {
            orientation.insert(f.id.clone());
        } else {
            orientation.insert(b.id.clone());
        }
        arrows.push(f);
        arrows.push(b);
    }
    Quiver { vertices, arrows, orientation }
}

/// A_{2n-1} with the involution i <-> 2n-i, period 2.
pub fn type_a_with_involution(n: usize) -> (Quiver, AdmAut) {
    let q = type_a_quiver(n);
    let len = 2 * n - 1;
    let mut vertex_perm = BTreeMap::new();
    for i in 1..=len {
        vertex_perm.insert(a_vertex(i), a_vertex(2 * n - i));
    }
    let mut arrow_perm = BTreeMap::new();
    for a in &q.arrows {
        let src: usize = a.src.parse().unwrap();
        let tgt: usize = a.tgt.parse().unwrap();
        arrow_perm.insert(
            a.id.clone(),
            arrow_id(&a_vertex(2 * n - src), &a_vertex(2 * n - tgt)),
        );
    }
    (q, AdmAut { vertex_perm, arrow_perm, period: 2 })
}

/// Affine A3 cycle with the rotation by two steps (period 2): vertices
/// 0..3, edges 1-2, 3-2, 1-0, 3-0 oriented into the even vertices.
pub fn affine_a3_with_rotation() -> (Quiver, AdmAut) {
    let vertices: Vec<String> = ["0", "1", "2", "3"].iter().map(|s| s.to_string()).collect();
    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    for (s, t) in [("1", "2"), ("3", "2"), ("1", "0"), ("3", "0")] {
        let [f, b] = edge(s, t);
        orientation.insert(f.id.clone());
        arrows.push(f);
        arrows.push(b);
    }
    let q = Quiver { vertices, arrows, orientation };
    let rot = |v: &str| -> String {
        match v {
            "0" => "2",
            "2" => "0",
            "1" => "3",
            "3" => "1",
            _ => unreachable!(),
        }
        .to_string()
    };
    let vertex_perm: BTreeMap<String, String> =
        q.vertices.iter().map(|v| (v.clone(), rot(v))).collect();
    let arrow_perm: BTreeMap<String, String> = q
        .arrows
        .iter()
        .map(|a| (a.id.clone(), arrow_id(&rot(&a.src), &rot(&a.tgt))))
        .collect();
    (q, AdmAut { vertex_perm, arrow_perm, period: 2 })
}

/// D4 star with the triality rotating the outer vertices, period 3.
pub fn d4_with_triality() -> (Quiver, AdmAut) {
    let vertices: Vec<String> = ["c", "o1", "o2", "o3"].iter().map(|s| s.to_string()).collect();
    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    for o in ["o1", "o2", "o3"] {
        let [f, b] = edge(o, "c");
        orientation.insert(f.id.clone());
        arrows.push(f);
        arrows.push(b);
    }
    let q = Quiver { vertices, arrows, orientation };
    let rot = |v: &str| -> String {
        match v {
            "c" => "c",
            "o1" => "o2",
            "o2" => "o3",
            "o3" => "o1",
            _ => unreachable!(),
        }
        .to_string()
    };
    let vertex_perm: BTreeMap<String, String> =
        q.vertices.iter().map(|v| (v.clone(), rot(v))).collect();
    let arrow_perm: BTreeMap<String, String> = q
        .arrows
        .iter()
        .map(|a| (a.id.clone(), arrow_id(&rot(&a.src), &rot(&a.tgt))))
        .collect();
    (q, AdmAut { vertex_perm, arrow_perm, period: 3 })
}

/// The framing vector of the small case: ones at positions k and 2n-k, so a
/// 2 at the middle when k = n. Length 2n-1.
pub fn small_w(n: usize, k: usize) -> Vec<usize> {
    assert!(1 <= k && k <= n);
    (1..=2 * n - 1)
        .map(|i| if i == k || i == 2 * n - k { if k == n { 2 } else { 1 } } else { 0 })
        .collect()
}

/// The dimension vector with all slope differences zero:
/// (1, 2, ..., k, k, ..., k, ..., 2, 1). Length 2n-1.
pub fn v_special(n: usize, k: usize) -> Vec<usize> {
    (1..=2 * n - 1).map(|i| i.min(k).min(2 * n - i)).collect()
}

/// Fold context for A_{2n-1} with the standard involution: phi = id
/// everywhere, sigma = id off the middle, and the middle involution taken
/// diagonal with the given signature (w_+ ones then w_- minus-ones).
pub fn standard_fold_context(
    n: usize,
    v: &[usize],
    w: &[usize],
    signature: Option<(usize, usize)>,
    field_order: u32,
) -> Result<FoldContext> {
    let w_mid = w[n - 1];
    let sigma_n = match signature {
        Some((p, m)) => {
            if p + m != w_mid {
                return Err(Error::Invalid(format!(
                    "signature ({p},{m}) does not sum to w_n = {w_mid}"
                )));
            }
            Matrix::from_fn(w_mid, w_mid, |i, j| {
                if i != j {
                    Scalar::zero()
                } else if i < p {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                }
            })
        }
        None => Matrix::identity(w_mid),
    };
    standard_fold_context_with_sigma(n, v, w, sigma_n, field_order)
}

/// Same as [`standard_fold_context`] with an explicit middle involution.
pub fn standard_fold_context_with_sigma(
    n: usize,
    v: &[usize],
    w: &[usize],
    sigma_n: Mat,
    field_order: u32,
) -> Result<FoldContext> {
    let (q, a) = type_a_with_involution(n);
    let dims = GradedDims::new(&q, v, w)?;
    let phi: BTreeMap<String, Mat> = q
        .vertices
        .iter()
        .map(|i| (i.clone(), Matrix::identity(dims.v_of(i))))
        .collect();
    let mut sigma: BTreeMap<String, Mat> = q
        .vertices
        .iter()
        .map(|i| (i.clone(), Matrix::identity(dims.w_of(i))))
        .collect();
    sigma.insert(a_vertex(n), sigma_n);
    FoldContext::new(q, a, dims, phi, sigma, field_order)
}

/// Fold context matching a slice specification, with the special dimension
/// vector unless one is given.
pub fn slice_fold_context(spec: &SliceSpec, v: Option<&[usize]>) -> Result<FoldContext> {
    let default_v = v_special(spec.n, spec.k);
    let v = v.unwrap_or(&default_v);
    let w = small_w(spec.n, spec.k);
    standard_fold_context(spec.n, v, &w, spec.signature, 2)
}

/// E6 with its diagram involution (1<->5, 2<->4; 3 and 6 fixed), period 2.
/// Chain 1-2-3-4-5 with 6 attached to 3, all edges oriented into vertex 3.
pub fn e6_with_involution() -> (Quiver, AdmAut) {
    let vertices: Vec<String> = ["1", "2", "3", "4", "5", "6"].iter().map(|s| s.to_string()).collect();
    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    for (s, t) in [("1", "2"), ("2", "3"), ("5", "4"), ("4", "3"), ("6", "3")] {
        let [f, b] = edge(s, t);
        orientation.insert(f.id.clone());
        arrows.push(f);
        arrows.push(b);
    }
    let q = Quiver { vertices, arrows, orientation };
    let inv = |v: &str| -> String {
        match v {
            "1" => "5",
            "5" => "1",
            "2" => "4",
            "4" => "2",
            other => other,
        }
        .to_string()
    };
    let vertex_perm: BTreeMap<String, String> =
        q.vertices.iter().map(|v| (v.clone(), inv(v))).collect();
    let arrow_perm: BTreeMap<String, String> = q
        .arrows
        .iter()
        .map(|a| (a.id.clone(), arrow_id(&inv(&a.src), &inv(&a.tgt))))
        .collect();
    (q, AdmAut { vertex_perm, arrow_perm, period: 2 })
}
