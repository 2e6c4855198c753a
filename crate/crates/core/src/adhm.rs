//! ADHM configurations on an arbitrary quiver: the moment-map relations,
//! stability, nilpotency, group actions, path products, an exact sampler of
//! relation points and a transporter between points of one orbit.
//!
//! The sampler exploits that every term of the moment-map equation contains
//! exactly one backward factor: fixing the forward maps B_h (h in Omega) and
//! the Gamma_i makes the relations linear in the backward maps and the
//! Delta_i, so exact solutions come from one kernel computation. No Groebner
//! bases anywhere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{EquationSet, LinMat, VarTable};
use crate::matrix::{AffineSolutionSet, Matrix};
use crate::quiver::Quiver;
use crate::rng::{SplitMix64, random_matrix, subseed};
use crate::scalar::Scalar;
use crate::Mat;

/// Graded dimension vectors (v, w), one entry per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDims {
    pub v: BTreeMap<String, usize>,
    pub w: BTreeMap<String, usize>,
}

impl GradedDims {
    pub fn new(q: &Quiver, v: &[usize], w: &[usize]) -> Result<Self> {
        if v.len() != q.vertices.len() || w.len() != q.vertices.len() {
            return Err(Error::Dim(format!(
                "dimension vectors must have {} entries",
                q.vertices.len()
            )));
        }
        Ok(GradedDims {
            v: q.vertices.iter().cloned().zip(v.iter().copied()).collect(),
            w: q.vertices.iter().cloned().zip(w.iter().copied()).collect(),
        })
    }

    pub fn v_of(&self, i: &str) -> usize {
        *self.v.get(i).unwrap_or_else(|| panic!("vertex {i:?} has no v-dimension"))
    }

    pub fn w_of(&self, i: &str) -> usize {
        *self.w.get(i).unwrap_or_else(|| panic!("vertex {i:?} has no w-dimension"))
    }

    pub fn total_v(&self) -> usize {
        self.v.values().sum()
    }
}

/// A point of the ADHM space M(V, W): matrices B_h, Gamma_i, Delta_i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdhmDatum {
    pub dims: GradedDims,
    /// Arrow id -> B_h of shape v_{t(h)} x v_{s(h)}, for every h in H.
    pub b: BTreeMap<String, Mat>,
    /// Vertex -> Gamma_i of shape v_i x w_i.
    pub gamma: BTreeMap<String, Mat>,
    /// Vertex -> Delta_i of shape w_i x v_i.
    pub delta: BTreeMap<String, Mat>,
    pub field_order: u32,
}

impl AdhmDatum {
    /// All-zero datum of the given dimensions.
    pub fn zero(q: &Quiver, dims: &GradedDims, field_order: u32) -> Self {
        let b = q
            .arrows
            .iter()
            .map(|a| (a.id.clone(), Matrix::zeros(dims.v_of(&a.tgt), dims.v_of(&a.src))))
            .collect();
        let gamma = q
            .vertices
            .iter()
            .map(|i| (i.clone(), Matrix::zeros(dims.v_of(i), dims.w_of(i))))
            .collect();
        let delta = q
            .vertices
            .iter()
            .map(|i| (i.clone(), Matrix::zeros(dims.w_of(i), dims.v_of(i))))
            .collect();
        AdhmDatum { dims: dims.clone(), b, gamma, delta, field_order }
    }

    pub fn b_of(&self, id: &str) -> &Mat {
        self.b.get(id).unwrap_or_else(|| panic!("datum has no map for arrow {id:?}"))
    }

    pub fn gamma_of(&self, i: &str) -> &Mat {
        self.gamma.get(i).unwrap_or_else(|| panic!("datum has no Gamma at vertex {i:?}"))
    }

    pub fn delta_of(&self, i: &str) -> &Mat {
        self.delta.get(i).unwrap_or_else(|| panic!("datum has no Delta at vertex {i:?}"))
    }

    /// Checks all shapes against the quiver and the dimension vectors.
    pub fn check_shapes(&self, q: &Quiver) -> Result<()> {
        for a in &q.arrows {
            let m = self.b_of(&a.id);
            if (m.rows, m.cols) != (self.dims.v_of(&a.tgt), self.dims.v_of(&a.src)) {
                return Err(Error::Dim(format!("B_{} has shape {}x{}", a.id, m.rows, m.cols)));
            }
        }
        for i in &q.vertices {
            let g = self.gamma_of(i);
            if (g.rows, g.cols) != (self.dims.v_of(i), self.dims.w_of(i)) {
                return Err(Error::Dim(format!("Gamma_{i} has shape {}x{}", g.rows, g.cols)));
            }
            let d = self.delta_of(i);
            if (d.rows, d.cols) != (self.dims.w_of(i), self.dims.v_of(i)) {
                return Err(Error::Dim(format!("Delta_{i} has shape {}x{}", d.rows, d.cols)));
            }
        }
        Ok(())
    }
}

/// Block-diagonal group element of G_V = prod GL(V_i) or G_W = prod GL(W_i).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub blocks: BTreeMap<String, Mat>,
}

impl GroupElement {
    pub fn identity_v(dims: &GradedDims) -> Self {
        GroupElement {
            blocks: dims.v.iter().map(|(i, &d)| (i.clone(), Matrix::identity(d))).collect(),
        }
    }

    pub fn identity_w(dims: &GradedDims) -> Self {
        GroupElement {
            blocks: dims.w.iter().map(|(i, &d)| (i.clone(), Matrix::identity(d))).collect(),
        }
    }

    pub fn block(&self, i: &str) -> &Mat {
        self.blocks.get(i).unwrap_or_else(|| panic!("group element has no block at {i:?}"))
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.values().all(Matrix::is_invertible)
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let mut blocks = BTreeMap::new();
        for (i, m) in &self.blocks {
            blocks.insert(i.clone(), m.inverse()?);
        }
        Ok(GroupElement { blocks })
    }

    /// Scalar element lambda * id in every block.
    pub fn scalar(dims: &BTreeMap<String, usize>, lambda: &Scalar) -> Self {
        GroupElement {
            blocks: dims
                .iter()
                .map(|(i, &d)| (i.clone(), Matrix::identity(d).scale(lambda)))
                .collect(),
        }
    }
}

/// Left-hand side minus right-hand side of the moment-map equation at every
/// vertex: sum_{h in Omega, s(h)=i} B_hbar B_h - sum_{h in Omega, t(h)=i}
/// B_h B_hbar - Gamma_i Delta_i.
pub fn moment_residual(q: &Quiver, x: &AdhmDatum) -> BTreeMap<String, Mat> {
    let mut res = BTreeMap::new();
    for i in &q.vertices {
        let vi = x.dims.v_of(i);
        let mut acc: Mat = Matrix::zeros(vi, vi);
        for a in q.forward_arrows() {
            if &a.src == i {
                acc = &acc + &(x.b_of(&a.bar) * x.b_of(&a.id));
            }
            if &a.tgt == i {
                acc = &acc - &(x.b_of(&a.id) * x.b_of(&a.bar));
            }
        }
        acc = &acc - &(x.gamma_of(i) * x.delta_of(i));
        res.insert(i.clone(), acc);
    }
    res
}

pub fn residual_is_zero(q: &Quiver, x: &AdhmDatum) -> bool {
    moment_residual(q, x).values().all(Matrix::is_zero_matrix)
}

fn column_space_basis(m: &Mat) -> Mat {
    let mut t = m.transpose();
    let pivots = t.rref();
    let basis_rows = pivots.len();
    t.block(0, 0, basis_rows, m.rows).transpose()
}

/// Stability: the images of all Gamma_i generate V under the maps B_h.
pub fn is_stable(q: &Quiver, x: &AdhmDatum) -> bool {
    let mut span: BTreeMap<String, Mat> = q
        .vertices
        .iter()
        .map(|i| (i.clone(), column_space_basis(x.gamma_of(i))))
        .collect();
    // Closure under all maps B_h; at most total_v growth steps.
    for _ in 0..=x.dims.total_v() {
        let mut changed = false;
        for a in &q.arrows {
            let img = x.b_of(&a.id) * &span[&a.src];
            let cur = &span[&a.tgt];
            let joined = Matrix::hstack(&[cur, &img]);
            if joined.rank() > cur.rank() {
                span.insert(a.tgt.clone(), column_space_basis(&joined));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    q.vertices.iter().all(|i| span[i].cols == x.dims.v_of(i))
}

/// Nilpotency of the family (B_h): the increasing chain of graded subspaces
/// K^0 = 0, K^{t+1} = intersection of the preimages B_h^{-1}(K^t), exhausts V.
pub fn b_family_nilpotent(q: &Quiver, x: &AdhmDatum) -> bool {
    // Annihilator rows of the current subspace at each vertex: K_i = ker C_i.
    let mut ann: BTreeMap<String, Mat> = q
        .vertices
        .iter()
        .map(|i| (i.clone(), Matrix::identity(x.dims.v_of(i))))
        .collect();
    let dim_of = |ann: &BTreeMap<String, Mat>, i: &str| x.dims.v_of(i) - ann[i].rank();
    for _ in 0..=x.dims.total_v() {
        let mut next = BTreeMap::new();
        for i in &q.vertices {
            // v in K'_i iff C_{t(h)} B_h v = 0 for every h with s(h) = i.
            let mut rows: Vec<Mat> = Vec::new();
            for a in &q.arrows {
                if &a.src == i {
                    rows.push(&ann[&a.tgt] * x.b_of(&a.id));
                }
            }
            let stacked = if rows.is_empty() {
                Matrix::zeros(0, x.dims.v_of(i))
            } else {
                let refs: Vec<&Mat> = rows.iter().collect();
                Matrix::vstack(&refs)
            };
            // Annihilator of ker(stacked) is the row space of stacked.
            let mut t = stacked;
            let pivots = t.rref();
            next.insert(i.clone(), t.block(0, 0, pivots.len(), x.dims.v_of(i)));
        }
        let grew = q.vertices.iter().any(|i| dim_of(&next, i) > dim_of(&ann, i));
        ann = next;
        if !grew {
            break;
        }
    }
    q.vertices.iter().all(|i| dim_of(&ann, i) == x.dims.v_of(i))
}

/// Membership in the Lagrangian subvariety: all Delta_i vanish, and (unless
/// the underlying graph is finite Dynkin, where it is automatic) the family
/// (B_h) is nilpotent.
pub fn in_lagrangian(q: &Quiver, x: &AdhmDatum, dynkin_finite: bool) -> bool {
    if !x.delta.values().all(Matrix::is_zero_matrix) {
        return false;
    }
    dynkin_finite || b_family_nilpotent(q, x)
}

/// Action of (g_i) in G_V: B -> g B g^{-1}, Gamma -> g Gamma, Delta -> Delta g^{-1}.
pub fn act_gv(q: &Quiver, g: &GroupElement, x: &AdhmDatum) -> AdhmDatum {
    let g_inv = g.inverse().expect("G_V element must be invertible");
    let mut out = x.clone();
    for a in &q.arrows {
        out.b
            .insert(a.id.clone(), &(g.block(&a.tgt) * x.b_of(&a.id)) * g_inv.block(&a.src));
    }
    for i in &q.vertices {
        out.gamma.insert(i.clone(), g.block(i) * x.gamma_of(i));
        out.delta.insert(i.clone(), x.delta_of(i) * g_inv.block(i));
    }
    out
}

/// Action of (alpha_i) in G_W: Gamma -> Gamma alpha^{-1}, Delta -> alpha Delta.
pub fn act_gw(q: &Quiver, alpha: &GroupElement, x: &AdhmDatum) -> AdhmDatum {
    let a_inv = alpha.inverse().expect("G_W element must be invertible");
    let mut out = x.clone();
    for i in &q.vertices {
        out.gamma.insert(i.clone(), x.gamma_of(i) * a_inv.block(i));
        out.delta.insert(i.clone(), alpha.block(i) * x.delta_of(i));
    }
    out
}

/// Product of the B maps along the geodesic segments joining consecutive
/// waypoints; the result maps V_{last waypoint} to V_{first waypoint}.
/// The underlying graph must make each segment's shortest path unique.
pub fn path_product(q: &Quiver, x: &AdhmDatum, waypoints: &[String]) -> Result<Mat> {
    if waypoints.is_empty() {
        return Err(Error::Invalid("empty waypoint list".into()));
    }
    let start = waypoints.last().unwrap();
    let mut acc: Mat = Matrix::identity(x.dims.v_of(start));
    // Compose right to left: the rightmost segment acts first.
    for pair in waypoints.windows(2).rev() {
        let (to, from) = (&pair[0], &pair[1]);
        let path = shortest_path(q, from, to)?;
        for step in path.windows(2) {
            let arrow = q.arrow_between(&step[0], &step[1])?;
            acc = &(x.b_of(&arrow.id).clone()) * &acc;
        }
    }
    Ok(acc)
}

/// Unique shortest vertex path from `from` to `to` in the underlying graph.
fn shortest_path(q: &Quiver, from: &str, to: &str) -> Result<Vec<String>> {
    let mut dist: BTreeMap<&str, usize> = BTreeMap::new();
    let mut preds: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    dist.insert(from, 0);
    let mut frontier = vec![from];
    let mut level = 0usize;
    while !frontier.is_empty() && !dist.contains_key(to) {
        level += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for a in &q.arrows {
                if a.src == u {
                    let t = a.tgt.as_str();
                    if !dist.contains_key(t) {
                        if !next.contains(&t) {
                            next.push(t);
                        }
                        let p = preds.entry(t).or_default();
                        if !p.contains(&u) {
                            p.push(u);
                        }
                    }
                }
            }
        }
        for &v in &next {
            dist.insert(v, level);
        }
        frontier = next;
    }
    if !dist.contains_key(to) {
        return Err(Error::Invalid(format!("no path from {from:?} to {to:?}")));
    }
    // Walk back; multiple predecessors mean the shortest path is not unique.
    let mut rev = vec![to.to_string()];
    let mut cur = to;
    while cur != from {
        let p = &preds[cur];
        if p.len() != 1 {
            return Err(Error::Invalid(format!(
                "shortest path from {from:?} to {to:?} is not unique"
            )));
        }
        cur = p[0];
        rev.push(cur.to_string());
    }
    rev.reverse();
    Ok(rev)
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    /// Pin all Delta_i to zero.
    pub delta_zero: bool,
    /// Pin all Gamma_i to zero (gives non-stable points when v != 0).
    pub gamma_zero: bool,
    /// Which half of the B maps to draw at random: false = forward,
    /// true = backward. None alternates with the attempt number; some
    /// orientations only admit stable points from one of the two modes.
    pub sample_backward: Option<bool>,
    /// Retry until the point is stable.
    pub require_stable: bool,
    /// Entries are drawn from [-bound, bound].
    pub bound: i64,
    pub max_retries: usize,
    pub field_order: u32,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            delta_zero: false,
            gamma_zero: false,
            sample_backward: None,
            require_stable: true,
            bound: 3,
            max_retries: 50,
            field_order: 1,
        }
    }
}

/// Samples an exact point of the relation variety Lambda(V, W).
///
/// Every term of the moment-map relation has exactly one forward and one
/// backward factor, or one Gamma and one Delta factor. So after drawing one
/// half of the maps (one side of the B's plus the Gamma_i) with small
/// integer entries, the relations are linear in the other half, which is
/// taken to be a random element of the exact solution space.
pub fn sample_point(
    q: &Quiver,
    dims: &GradedDims,
    seed: u64,
    opts: &SampleOptions,
) -> Result<AdhmDatum> {
    for attempt in 0..opts.max_retries {
        let mut rng = SplitMix64::new(subseed(seed, attempt as u64));
        let solve_forward = match opts.sample_backward {
            Some(b) => b,
            None => attempt % 2 == 1,
        };
        let x = sample_once(q, dims, &mut rng, opts, solve_forward);
        debug_assert!(residual_is_zero(q, &x), "sampler produced a nonzero residual");
        if !opts.require_stable || is_stable(q, &x) {
            return Ok(x);
        }
    }
    Err(Error::SampleFailure { attempts: opts.max_retries })
}

fn sample_once(
    q: &Quiver,
    dims: &GradedDims,
    rng: &mut SplitMix64,
    opts: &SampleOptions,
    solve_forward: bool,
) -> AdhmDatum {
    let mut x = AdhmDatum::zero(q, dims, opts.field_order);
    for a in q.forward_arrows() {
        let (rows, cols) = (dims.v_of(&a.tgt), dims.v_of(&a.src));
        if solve_forward {
            let m = random_matrix(rng, cols, rows, opts.bound, opts.field_order);
            x.b.insert(a.bar.clone(), m);
        } else {
            let m = random_matrix(rng, rows, cols, opts.bound, opts.field_order);
            x.b.insert(a.id.clone(), m);
        }
    }
    for i in &q.vertices {
        if !opts.gamma_zero {
            let g = random_matrix(rng, dims.v_of(i), dims.w_of(i), opts.bound, opts.field_order);
            x.gamma.insert(i.clone(), g);
        }
    }
    // Unknown side: backward maps (forward in delta_zero mode) plus Delta.
    let mut vars = VarTable::new();
    let mut b_vars = BTreeMap::new();
    for a in q.forward_arrows() {
        let (rows, cols) = (dims.v_of(&a.tgt), dims.v_of(&a.src));
        if solve_forward {
            b_vars.insert(a.id.clone(), vars.alloc(rows, cols));
        } else {
            b_vars.insert(a.bar.clone(), vars.alloc(cols, rows));
        }
    }
    let mut d_vars = BTreeMap::new();
    if !opts.delta_zero {
        for i in &q.vertices {
            d_vars.insert(i.clone(), vars.alloc(dims.w_of(i), dims.v_of(i)));
        }
    }
    let lin_b = |id: &str| -> LinMat {
        match b_vars.get(id) {
            Some(block) => LinMat::from_var(*block),
            None => LinMat::from_const(x.b_of(id)),
        }
    };
    let mut eqs = EquationSet::new();
    for i in &q.vertices {
        let vi = dims.v_of(i);
        let mut acc = LinMat::zeros(vi, vi);
        for a in q.forward_arrows() {
            if &a.src == i {
                acc = acc.add(&lin_b(&a.bar).mul(&lin_b(&a.id)));
            }
            if &a.tgt == i {
                acc = acc.sub(&lin_b(&a.id).mul(&lin_b(&a.bar)));
            }
        }
        if let Some(dv) = d_vars.get(i) {
            acc = acc.sub(&LinMat::mul_const_left(x.gamma_of(i), &LinMat::from_var(*dv)));
        }
        eqs.require_zero(&acc);
    }
    let solution = match eqs.solve(vars.n_vars()).expect("shapes are consistent") {
        AffineSolutionSet::Solutions { particular, kernel } => {
            // The system is homogeneous; take a random kernel combination.
            debug_assert!(particular.is_zero_matrix());
            let mut sol = particular.entries;
            for k in &kernel {
                let c = Scalar::from_int(rng.int_in(-opts.bound, opts.bound));
                for (s, kv) in sol.iter_mut().zip(&k.entries) {
                    *s = &*s + &(&c * kv);
                }
            }
            sol
        }
        AffineSolutionSet::Empty => unreachable!("homogeneous system is never empty"),
    };
    for (id, block) in &b_vars {
        x.b.insert(id.clone(), vars.value(*block, &solution));
    }
    for (i, block) in &d_vars {
        x.delta.insert(i.clone(), vars.value(*block, &solution));
    }
    x
}

/// Solves act(g, y) = x for g in G_V. For stable points the solution set is
/// empty or a single point; returns it when it is blockwise invertible.
pub fn transporter(q: &Quiver, x: &AdhmDatum, y: &AdhmDatum) -> Option<GroupElement> {
    assert_eq!(x.dims, y.dims, "transporter requires equal dimension vectors");
    let mut vars = VarTable::new();
    let mut g_vars = BTreeMap::new();
    for i in &q.vertices {
        let d = x.dims.v_of(i);
        g_vars.insert(i.clone(), vars.alloc(d, d));
    }
    let gv = |i: &str| LinMat::from_var(g_vars[i]);
    let mut eqs = EquationSet::new();
    // g_t y.B = x.B g_s, g_i y.Gamma = x.Gamma, y.Delta = x.Delta g_i.
    for a in &q.arrows {
        let lhs = LinMat::mul_const_right(&gv(&a.tgt), y.b_of(&a.id));
        let rhs = LinMat::mul_const_left(x.b_of(&a.id), &gv(&a.src));
        eqs.require_zero(&lhs.sub(&rhs));
    }
    for i in &q.vertices {
        let lhs = LinMat::mul_const_right(&gv(i), y.gamma_of(i));
        eqs.require_eq(&lhs, x.gamma_of(i));
        let rhs = LinMat::mul_const_left(x.delta_of(i), &gv(i));
        eqs.require_eq(&rhs, y.delta_of(i));
    }
    match eqs.solve(vars.n_vars()).ok()? {
        AffineSolutionSet::Empty => None,
        AffineSolutionSet::Solutions { particular, kernel } => {
            if !kernel.is_empty() {
                return None;
            }
            let blocks: BTreeMap<String, Mat> = g_vars
                .iter()
                .map(|(i, b)| (i.clone(), vars.value(*b, &particular.entries)))
                .collect();
            let g = GroupElement { blocks };
            g.is_invertible().then_some(g)
        }
    }
}

/// Dimension of the kernel of the moment map linearized at x, in all of
/// (b_h, gamma_i, delta_i). Constant across stable points of one Lambda.
pub fn linearized_moment_kernel_dim(q: &Quiver, x: &AdhmDatum) -> usize {
    let mut vars = VarTable::new();
    let mut b_vars = BTreeMap::new();
    for a in &q.arrows {
        b_vars.insert(a.id.clone(), vars.alloc(x.dims.v_of(&a.tgt), x.dims.v_of(&a.src)));
    }
    let mut g_vars = BTreeMap::new();
    let mut d_vars = BTreeMap::new();
    for i in &q.vertices {
        g_vars.insert(i.clone(), vars.alloc(x.dims.v_of(i), x.dims.w_of(i)));
        d_vars.insert(i.clone(), vars.alloc(x.dims.w_of(i), x.dims.v_of(i)));
    }
    let mut eqs = EquationSet::new();
    for i in &q.vertices {
        let vi = x.dims.v_of(i);
        let mut acc = LinMat::zeros(vi, vi);
        for a in q.forward_arrows() {
            if &a.src == i {
                acc = acc
                    .add(&LinMat::mul_const_right(&LinMat::from_var(b_vars[&a.bar]), x.b_of(&a.id)));
                acc = acc
                    .add(&LinMat::mul_const_left(x.b_of(&a.bar), &LinMat::from_var(b_vars[&a.id])));
            }
            if &a.tgt == i {
                acc = acc
                    .sub(&LinMat::mul_const_right(&LinMat::from_var(b_vars[&a.id]), x.b_of(&a.bar)));
                acc = acc
                    .sub(&LinMat::mul_const_left(x.b_of(&a.id), &LinMat::from_var(b_vars[&a.bar])));
            }
        }
        acc = acc.sub(&LinMat::mul_const_right(&LinMat::from_var(g_vars[i]), x.delta_of(i)));
        acc = acc.sub(&LinMat::mul_const_left(x.gamma_of(i), &LinMat::from_var(d_vars[i])));
        eqs.require_zero(&acc);
    }
    match eqs.solve(vars.n_vars()).expect("linearization is consistent") {
        AffineSolutionSet::Solutions { kernel, .. } => kernel.len(),
        AffineSolutionSet::Empty => unreachable!("homogeneous system"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rng::random_invertible;

    fn a3_setup() -> (Quiver, GradedDims) {
        let q = fixtures::type_a_quiver(2);
        let dims = GradedDims::new(&q, &[1, 2, 1], &[0, 2, 0]).unwrap();
        (q, dims)
    }

    #[test]
    fn zero_datum_is_in_lambda() {
        let (q, dims) = a3_setup();
        let x = AdhmDatum::zero(&q, &dims, 1);
        assert!(residual_is_zero(&q, &x));
        assert!(!is_stable(&q, &x)); // Gamma = 0 with v != 0
        let empty = GradedDims::new(&q, &[0, 0, 0], &[0, 0, 0]).unwrap();
        let z = AdhmDatum::zero(&q, &empty, 1);
        assert!(is_stable(&q, &z)); // vacuous
        assert!(in_lagrangian(&q, &z, true));
    }

    #[test]
    fn sampled_point_is_on_lambda_and_stable() {
        let (q, dims) = a3_setup();
        let x = sample_point(&q, &dims, 7, &SampleOptions::default()).unwrap();
        assert!(residual_is_zero(&q, &x));
        assert!(is_stable(&q, &x));
        x.check_shapes(&q).unwrap();
    }

    #[test]
    fn sampler_is_deterministic() {
        let (q, dims) = a3_setup();
        let a = sample_point(&q, &dims, 99, &SampleOptions::default()).unwrap();
        let b = sample_point(&q, &dims, 99, &SampleOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_point_on_split_d3() {
        // The split-quotient of (A3, involution) is the D3 quiver; sample there.
        let (q, a) = fixtures::type_a_with_involution(2);
        let sq = crate::quiver::split_quotient(&q, &a).unwrap();
        let d = &sq.split;
        let v: Vec<usize> =
            d.vertices.iter().map(|id| if id.starts_with("01") { 2 } else { 1 }).collect();
        let w: Vec<usize> =
            d.vertices.iter().map(|id| if id.starts_with("01") { 0 } else { 1 }).collect();
        let dims = GradedDims::new(d, &v, &w).unwrap();
        let x = sample_point(d, &dims, 3, &SampleOptions::default()).unwrap();
        assert!(residual_is_zero(d, &x));
        assert!(is_stable(d, &x));
    }

    #[test]
    fn group_action_preserves_lambda_and_stability() {
        let (q, dims) = a3_setup();
        let x = sample_point(&q, &dims, 11, &SampleOptions::default()).unwrap();
        let mut rng = SplitMix64::new(4);
        let g = GroupElement {
            blocks: q
                .vertices
                .iter()
                .map(|i| (i.clone(), random_invertible(&mut rng, dims.v_of(i), 2)))
                .collect(),
        };
        let gx = act_gv(&q, &g, &x);
        // Residual conjugates: res(g.x)_i = g_i res(x)_i g_i^{-1}.
        let res_x = moment_residual(&q, &x);
        let res_gx = moment_residual(&q, &gx);
        for i in &q.vertices {
            let gi = g.block(i);
            let expect = &(gi * &res_x[i]) * &gi.inverse().unwrap();
            assert_eq!(res_gx[i], expect);
        }
        assert!(is_stable(&q, &gx));
        // Identity acts trivially.
        let id = GroupElement::identity_v(&dims);
        assert_eq!(act_gv(&q, &id, &x), x);
    }

    #[test]
    fn diagonal_scalar_pair_acts_trivially() {
        let (q, dims) = a3_setup();
        let x = sample_point(&q, &dims, 13, &SampleOptions::default()).unwrap();
        let lam = Scalar::rat(3, 2);
        let gv = GroupElement::scalar(&dims.v, &lam);
        let gw = GroupElement::scalar(&dims.w, &lam);
        let y = act_gw(&q, &gw, &act_gv(&q, &gv, &x));
        assert_eq!(y, x);
    }

    #[test]
    fn transporter_recovers_group_element() {
        let (q, dims) = a3_setup();
        let x = sample_point(&q, &dims, 17, &SampleOptions::default()).unwrap();
        // Freeness: the only transporter from x to x is the identity.
        let t = transporter(&q, &x, &x).unwrap();
        assert_eq!(t, GroupElement::identity_v(&dims));
        let mut rng = SplitMix64::new(8);
        let g = GroupElement {
            blocks: q
                .vertices
                .iter()
                .map(|i| (i.clone(), random_invertible(&mut rng, dims.v_of(i), 2)))
                .collect(),
        };
        let gx = act_gv(&q, &g, &x);
        let found = transporter(&q, &gx, &x).unwrap();
        assert_eq!(found, g);
        // A different orbit generically has no transporter.
        let y = sample_point(&q, &dims, 18, &SampleOptions::default()).unwrap();
        assert!(transporter(&q, &y, &x).is_none());
    }

    #[test]
    fn path_products_on_a3() {
        let (q, dims) = a3_setup();
        let x = sample_point(&q, &dims, 23, &SampleOptions::default()).unwrap();
        // Single vertex: identity.
        let p = path_product(&q, &x, &["02".into()]).unwrap();
        assert_eq!(p, Matrix::identity(2));
        // B_{1,2,1} = B_{01<-02} B_{02<-01}.
        let p = path_product(&q, &x, &["01".into(), "02".into(), "01".into()]).unwrap();
        let expect = &(x.b_of("02-01").clone()) * x.b_of("01-02");
        assert_eq!(p, expect);
        // B_{2,1,2} entrywise.
        let p = path_product(&q, &x, &["02".into(), "01".into(), "02".into()]).unwrap();
        let expect = &(x.b_of("01-02").clone()) * x.b_of("02-01");
        assert_eq!(p, expect);
    }

    #[test]
    fn delta_zero_sampling_gives_lagrangian_points() {
        let (q, dims) = a3_setup();
        let opts = SampleOptions { delta_zero: true, ..Default::default() };
        let x = sample_point(&q, &dims, 31, &opts).unwrap();
        assert!(residual_is_zero(&q, &x));
        assert!(is_stable(&q, &x));
        assert!(in_lagrangian(&q, &x, true));
        // Type A is finite Dynkin, so nilpotency must hold outright as well.
        assert!(b_family_nilpotent(&q, &x));
        assert!(in_lagrangian(&q, &x, false));
        // Nonzero Delta is never Lagrangian.
        let y = sample_point(&q, &dims, 32, &SampleOptions::default()).unwrap();
        if y.delta.values().any(|d| !d.is_zero_matrix()) {
            assert!(!in_lagrangian(&q, &y, true));
        }
    }

    #[test]
    fn tangent_dimension_is_constant_on_stable_locus() {
        let (q, dims) = a3_setup();
        let mut dims_seen = std::collections::BTreeSet::new();
        for trial in 0..10 {
            let x = sample_point(&q, &dims, 100 + trial, &SampleOptions::default()).unwrap();
            dims_seen.insert(linearized_moment_kernel_dim(&q, &x));
        }
        assert_eq!(dims_seen.len(), 1, "tangent dimension varied: {dims_seen:?}");
    }

    #[test]
    fn nilpotency_detects_an_invertible_loop() {
        // On A3, forward and backward maps between 01 and 02 composing to the
        // identity: not nilpotent.
        let q = fixtures::type_a_quiver(2);
        let dims = GradedDims::new(&q, &[1, 1, 0], &[0, 0, 0]).unwrap();
        let mut x = AdhmDatum::zero(&q, &dims, 1);
        x.b.insert("01-02".into(), Matrix::identity(1));
        x.b.insert("02-01".into(), Matrix::identity(1));
        assert!(!b_family_nilpotent(&q, &x));
    }
}
