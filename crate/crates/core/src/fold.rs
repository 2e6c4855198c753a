//! Diagram automorphisms of ADHM data and the embedding of split-quotient
//! data into their fixed points.
//!
//! A [`FoldContext`] fixes the admissible automorphism together with the
//! intertwiners phi_i : V_i -> V_{a(i)} (whose orbit composite is the
//! identity) and sigma_i : W_i -> W_{a(i)} (whose orbit composite has order
//! dividing e_i). The composite's eigenspaces split each W_i over the
//! e_i-th roots of unity; a [`Decomposition`] splits each V_i the same way.
//! [`psi_embed`] realizes split-quotient data as an honest configuration on
//! the big quiver whose orbit is theta-stable, and [`classify_fixed`]
//! inverts it: it detects theta-stability of an orbit, normalizes the
//! eigenspace decomposition to the canonical coordinate one, and reads the
//! split-quotient datum back off.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::adhm::{AdhmDatum, GradedDims, GroupElement, act_gv, transporter};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, eigenspace};
use crate::quiver::{AdmAut, Quiver, SplitQuotient, split_arrow_bar_id, split_arrow_id,
                    split_quotient, split_vertex_id};
use crate::scalar::{MAX_FIELD_ORDER, Scalar};
use crate::Mat;

/// Eigenspace splitting of one W_i: an invertible basis matrix whose columns
/// group the eigenvectors in the canonical root-of-unity order, plus the
/// block dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSplit {
    pub basis: Mat,
    pub dims: Vec<usize>,
}

/// All data of a diagram automorphism of the ADHM space.
#[derive(Clone, Debug)]
pub struct FoldContext {
    pub quiver: Quiver,
    pub aut: AdmAut,
    pub sq: SplitQuotient,
    pub dims: GradedDims,
    /// Field order N: a multiple of the period, at most 12.
    pub field_order: u32,
    /// phi_i : V_i -> V_{a(i)}.
    pub phi: BTreeMap<String, Mat>,
    /// sigma_i : W_i -> W_{a(i)}.
    pub sigma: BTreeMap<String, Mat>,
    /// Per representative: eigen splitting of the sigma-composite on W_i.
    pub w_eigen: BTreeMap<String, EigenSplit>,
}

impl FoldContext {
    pub fn new(
        quiver: Quiver,
        aut: AdmAut,
        dims: GradedDims,
        phi: BTreeMap<String, Mat>,
        sigma: BTreeMap<String, Mat>,
        field_order: u32,
    ) -> Result<Self> {
        let sq = split_quotient(&quiver, &aut)?;
        if field_order % aut.period != 0 || field_order > MAX_FIELD_ORDER {
            return Err(Error::Invalid(format!(
                "field order {field_order} must be a multiple of the period {} (and <= 12)",
                aut.period
            )));
        }
        let mut bad = Vec::new();
        for i in &quiver.vertices {
            let ai = aut.v(i);
            if dims.v_of(i) != dims.v_of(ai) {
                bad.push(format!("v_{i} != v_{ai}"));
            }
            if dims.w_of(i) != dims.w_of(ai) {
                bad.push(format!("w_{i} != w_{ai}"));
            }
            let p = phi
                .get(i)
                .ok_or_else(|| Error::Invalid(format!("missing phi at {i}")))?;
            if (p.rows, p.cols) != (dims.v_of(ai), dims.v_of(i)) || !p.is_invertible() {
                bad.push(format!("phi_{i} is not an isomorphism V_{i} -> V_{ai}"));
            }
            let s = sigma
                .get(i)
                .ok_or_else(|| Error::Invalid(format!("missing sigma at {i}")))?;
            if (s.rows, s.cols) != (dims.w_of(ai), dims.w_of(i)) || !s.is_invertible() {
                bad.push(format!("sigma_{i} is not an isomorphism W_{i} -> W_{ai}"));
            }
        }
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        let ctx = FoldContext {
            quiver,
            aut,
            sq,
            dims,
            field_order,
            phi,
            sigma,
            w_eigen: BTreeMap::new(),
        };
        // phi-composite must be the identity on every orbit.
        for i in &ctx.quiver.vertices {
            let comp = ctx.phi_composite(i);
            if comp != Matrix::identity(ctx.dims.v_of(i)) {
                return Err(Error::Validation(vec![format!(
                    "phi composite around the orbit of {i} is not the identity"
                )]));
            }
        }
        // sigma-composite must have order dividing e_i; compute eigen data.
        let mut w_eigen = BTreeMap::new();
        for rep in ctx.sq.reps.clone() {
            let e = ctx.aut.e_v(&rep);
            let comp = ctx.sigma_composite(&rep);
            let w = ctx.dims.w_of(&rep);
            if comp.pow(e as usize) != Matrix::identity(w) {
                return Err(Error::Validation(vec![format!(
                    "sigma composite at {rep} does not have order dividing e = {e}"
                )]));
            }
            let mut cols: Vec<Mat> = Vec::new();
            let mut dims_u = Vec::new();
            for u in 0..e {
                let zeta = ctx.zeta(&rep, u);
                let space = eigenspace(&comp, &zeta)?;
                dims_u.push(space.cols);
                cols.push(space);
            }
            let total: usize = dims_u.iter().sum();
            if total != w {
                return Err(Error::Validation(vec![format!(
                    "eigenspaces of the sigma composite at {rep} span {total} of {w} dimensions"
                )]));
            }
            let refs: Vec<&Mat> = cols.iter().collect();
            let basis = if w == 0 { Matrix::identity(0) } else { Matrix::hstack(&refs) };
            debug_assert!(basis.is_invertible());
            w_eigen.insert(rep.clone(), EigenSplit { basis, dims: dims_u });
        }
        Ok(FoldContext { w_eigen, ..ctx })
    }

    pub fn phi_of(&self, i: &str) -> &Mat {
        &self.phi[i]
    }

    pub fn sigma_of(&self, i: &str) -> &Mat {
        &self.sigma[i]
    }

    /// phi_{a^{d-1}(i)} ... phi_{a(i)} phi_i : V_i -> V_i.
    pub fn phi_composite(&self, i: &str) -> Mat {
        let d = self.aut.d_v(i);
        let mut acc: Mat = Matrix::identity(self.dims.v_of(i));
        let mut cur = i.to_string();
        for _ in 0..d {
            acc = &(self.phi[&cur].clone()) * &acc;
            cur = self.aut.v(&cur).to_string();
        }
        acc
    }

    /// sigma_{a^{d-1}(i)} ... sigma_{a(i)} sigma_i : W_i -> W_i.
    pub fn sigma_composite(&self, i: &str) -> Mat {
        let d = self.aut.d_v(i);
        let mut acc: Mat = Matrix::identity(self.dims.w_of(i));
        let mut cur = i.to_string();
        for _ in 0..d {
            acc = &(self.sigma[&cur].clone()) * &acc;
            cur = self.aut.v(&cur).to_string();
        }
        acc
    }

    /// The fixed primitive period-th root of unity eta.
    pub fn eta(&self) -> Scalar {
        Scalar::root_of_unity(self.field_order, (self.field_order / self.aut.period) as i64)
    }

    /// The u-th element of mu_{e_rep} in canonical order: eta^{u * d_rep}.
    pub fn zeta(&self, rep: &str, u: u32) -> Scalar {
        let e = self.aut.e_v(rep);
        debug_assert!(u < e);
        Scalar::root_of_unity(self.field_order, (u * (self.field_order / e)) as i64)
    }

    /// Graded dimensions of the split-quotient datum for a decomposition.
    pub fn split_dims(&self, d: &Decomposition) -> GradedDims {
        let mut v = BTreeMap::new();
        let mut w = BTreeMap::new();
        for (id, (rep, u)) in &self.sq.vertex_zeta {
            v.insert(id.clone(), d.dim(id));
            w.insert(id.clone(), self.w_eigen[rep].dims[*u as usize]);
        }
        GradedDims { v, w }
    }

    /// Graded dimension vector w-tilde of the split-quotient framing.
    pub fn w_tilde(&self) -> BTreeMap<String, usize> {
        self.sq
            .vertex_zeta
            .iter()
            .map(|(id, (rep, u))| (id.clone(), self.w_eigen[rep].dims[*u as usize]))
            .collect()
    }

    /// Offsets of the canonical coordinate blocks of V_rep for a
    /// decomposition: block u starts at offset[u].
    fn v_block_offsets(&self, d: &Decomposition, rep: &str) -> Vec<usize> {
        let e = self.aut.e_v(rep);
        let mut offs = vec![0usize];
        for u in 0..e {
            let last = *offs.last().unwrap();
            offs.push(last + d.dim(&split_vertex_id(rep, u)));
        }
        offs
    }

    fn w_block_offsets(&self, rep: &str) -> Vec<usize> {
        let mut offs = vec![0usize];
        for d in &self.w_eigen[rep].dims {
            let last = *offs.last().unwrap();
            offs.push(last + d);
        }
        offs
    }
}

/// A point of D(v): a split of each v_i over the e_i-th roots of unity. The
/// associated subspaces are the canonical coordinate blocks, in the fixed
/// root-of-unity order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub vtilde: BTreeMap<String, usize>,
}

impl Decomposition {
    pub fn dim(&self, split_vertex: &str) -> usize {
        *self
            .vtilde
            .get(split_vertex)
            .unwrap_or_else(|| panic!("no entry for split vertex {split_vertex:?}"))
    }
}

/// All decompositions of v over the split vertices, in lexicographic order
/// of the per-representative compositions.
pub fn enumerate_decompositions(ctx: &FoldContext) -> Vec<Decomposition> {
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(total - first, parts - 1) {
                let mut c = vec![first];
                c.append(&mut rest);
                out.push(c);
            }
        }
        out
    }
    let mut result = vec![BTreeMap::new()];
    for rep in &ctx.sq.reps {
        let e = ctx.aut.e_v(rep) as usize;
        let v = ctx.dims.v_of(rep);
        let mut next = Vec::new();
        for base in &result {
            for comp in compositions(v, e) {
                let mut m: BTreeMap<String, usize> = base.clone();
                for (u, c) in comp.iter().enumerate() {
                    m.insert(split_vertex_id(rep, u as u32), *c);
                }
                next.push(m);
            }
        }
        result = next;
    }
    result.into_iter().map(|vtilde| Decomposition { vtilde }).collect()
}

/// The group element g-tilde attached to a decomposition: scalar zeta on the
/// u-th canonical block of each representative, identity elsewhere.
pub fn g_vtilde(ctx: &FoldContext, d: &Decomposition) -> GroupElement {
    let mut blocks = BTreeMap::new();
    for i in &ctx.quiver.vertices {
        let vi = ctx.dims.v_of(i);
        if !ctx.sq.reps.contains(i) {
            blocks.insert(i.clone(), Matrix::identity(vi));
            continue;
        }
        let offs = ctx.v_block_offsets(d, i);
        let e = ctx.aut.e_v(i);
        let mut m: Mat = Matrix::zeros(vi, vi);
        for u in 0..e {
            let zeta = ctx.zeta(i, u);
            for p in offs[u as usize]..offs[u as usize + 1] {
                m[(p, p)] = zeta.clone();
            }
        }
        blocks.insert(i.clone(), m);
    }
    GroupElement { blocks }
}

/// The diagram automorphism on ADHM data:
/// (B, Gamma, Delta) -> (phi B phi^{-1}, phi Gamma sigma^{-1}, sigma Delta phi^{-1})
/// with all indices shifted by a^{-1}.
pub fn theta(ctx: &FoldContext, x: &AdhmDatum) -> AdhmDatum {
    let q = &ctx.quiver;
    let mut out = x.clone();
    for arr in &q.arrows {
        let pre = ctx.aut.h_inv(&arr.id);
        let pre_arr = q.arrow(pre);
        let phi_t = ctx.phi_of(&pre_arr.tgt);
        let phi_s_inv = ctx.phi_of(&pre_arr.src).inverse().unwrap();
        out.b.insert(arr.id.clone(), &(phi_t * x.b_of(pre)) * &phi_s_inv);
    }
    for i in &q.vertices {
        let pre = ctx.aut.v_inv(i);
        let phi = ctx.phi_of(pre);
        let sigma_inv = ctx.sigma_of(pre).inverse().unwrap();
        out.gamma.insert(i.clone(), &(phi * x.gamma_of(pre)) * &sigma_inv);
        let sigma = ctx.sigma_of(pre);
        let phi_inv = phi.inverse().unwrap();
        out.delta.insert(i.clone(), &(sigma * x.delta_of(pre)) * &phi_inv);
    }
    out
}

/// theta on G_V: (g_i) -> (phi_{a^{-1}(i)} g_{a^{-1}(i)} phi_{a^{-1}(i)}^{-1}).
pub fn theta_gv(ctx: &FoldContext, g: &GroupElement) -> GroupElement {
    let blocks = ctx
        .quiver
        .vertices
        .iter()
        .map(|i| {
            let pre = ctx.aut.v_inv(i);
            let phi = ctx.phi_of(pre);
            (i.clone(), &(phi * g.block(pre)) * &phi.inverse().unwrap())
        })
        .collect();
    GroupElement { blocks }
}

/// theta on G_W, with sigma in place of phi.
pub fn theta_gw(ctx: &FoldContext, alpha: &GroupElement) -> GroupElement {
    let blocks = ctx
        .quiver
        .vertices
        .iter()
        .map(|i| {
            let pre = ctx.aut.v_inv(i);
            let s = ctx.sigma_of(pre);
            (i.clone(), &(s * alpha.block(pre)) * &s.inverse().unwrap())
        })
        .collect();
    GroupElement { blocks }
}

/// The chain g_{a^f(t)} phi_{a^{f-1}(t)} ... g_{a(t)} phi_t : V_t -> V_{a^f(t)}.
fn chain(ctx: &FoldContext, g: &GroupElement, t_rep: &str, f: u32) -> Mat {
    let mut acc: Mat = Matrix::identity(ctx.dims.v_of(t_rep));
    let mut cur = t_rep.to_string();
    for _ in 0..f {
        let next = ctx.aut.v(&cur).to_string();
        acc = &(g.block(&next) * ctx.phi_of(&cur)) * &acc;
        cur = next;
    }
    acc
}

/// Embeds a split-quotient datum as a configuration on the big quiver whose
/// orbit is theta-stable, with transporter g-tilde.
pub fn psi_embed(ctx: &FoldContext, d: &Decomposition, y: &AdhmDatum) -> Result<AdhmDatum> {
    let q = &ctx.quiver;
    let split_dims = ctx.split_dims(d);
    if y.dims != split_dims {
        return Err(Error::Dim("split datum does not match the decomposition".into()));
    }
    let g = g_vtilde(ctx, d);
    let mut x = AdhmDatum::zero(q, &ctx.dims, ctx.field_order);

    // Gamma and Delta at the representatives: block-diagonal in the
    // canonical V-blocks and the W-eigenbasis, with the factor e_i on Gamma.
    for rep in &ctx.sq.reps {
        let e = ctx.aut.e_v(rep);
        let v_offs = ctx.v_block_offsets(d, rep);
        let w_offs = ctx.w_block_offsets(rep);
        let (vi, wi) = (ctx.dims.v_of(rep), ctx.dims.w_of(rep));
        let mut gam: Mat = Matrix::zeros(vi, wi);
        let mut del: Mat = Matrix::zeros(wi, vi);
        for u in 0..e {
            let id = split_vertex_id(rep, u);
            gam.set_block(v_offs[u as usize], w_offs[u as usize], y.gamma_of(&id));
            del.set_block(w_offs[u as usize], v_offs[u as usize], y.delta_of(&id));
        }
        let p = &ctx.w_eigen[rep].basis;
        let p_inv = p.inverse().unwrap();
        let e_scalar = Scalar::from_int(e as i64);
        x.gamma.insert(rep.clone(), (&gam * &p_inv).scale(&e_scalar));
        x.delta.insert(rep.clone(), p * &del);
    }
    // Extend along each vertex orbit by the defining covariance rule.
    for rep in &ctx.sq.reps {
        let dlen = ctx.aut.d_v(rep);
        let mut prev = rep.clone();
        for _ in 1..dlen {
            let cur = ctx.aut.v(&prev).to_string();
            let gp = &(g.block(&cur) * ctx.phi_of(&prev));
            let gam = &(gp * x.gamma_of(&prev)) * &ctx.sigma_of(&prev).inverse().unwrap();
            let del = &(ctx.sigma_of(&prev) * x.delta_of(&prev)) * &gp.inverse().unwrap();
            x.gamma.insert(cur.clone(), gam);
            x.delta.insert(cur.clone(), del);
            prev = cur;
        }
    }

    // B at the chosen orbit representatives: the admissible-pair block
    // matrix, chained up to a^{f}(t-rep), with the factor e_h forward.
    for h1 in &ctx.sq.omega1 {
        let arr = q.arrow(h1);
        let s_rep = &ctx.sq.orbit_rep[&arr.src];
        let t_rep = &ctx.sq.orbit_rep[&arr.tgt];
        let (e_s, e_t, e_h) = (ctx.aut.e_v(s_rep), ctx.aut.e_v(t_rep), ctx.aut.e_h(h1));
        let s_offs = ctx.v_block_offsets(d, s_rep);
        let t_offs = ctx.v_block_offsets(d, t_rep);
        let mut fwd: Mat = Matrix::zeros(ctx.dims.v_of(t_rep), ctx.dims.v_of(s_rep));
        let mut bwd: Mat = Matrix::zeros(ctx.dims.v_of(s_rep), ctx.dims.v_of(t_rep));
        for u in 0..e_s {
            for u2 in 0..e_t {
                if u % e_h != u2 % e_h {
                    continue;
                }
                let fid = split_arrow_id(h1, u, u2);
                let bid = split_arrow_bar_id(h1, u, u2);
                fwd.set_block(t_offs[u2 as usize], s_offs[u as usize], y.b_of(&fid));
                bwd.set_block(s_offs[u as usize], t_offs[u2 as usize], y.b_of(&bid));
            }
        }
        let f = ctx.sq.f_exp[h1];
        let ch = chain(ctx, &g, t_rep, f);
        let e_h_scalar = Scalar::from_int(e_h as i64);
        x.b.insert(h1.clone(), (&ch * &fwd).scale(&e_h_scalar));
        x.b.insert(arr.bar.clone(), &bwd * &ch.inverse().unwrap());
    }
    // Extend along each arrow orbit; after a full orbit the rule must return
    // the representative's value (the block form guarantees it).
    for start in ctx.sq.omega1.iter().flat_map(|h1| [h1.clone(), q.arrow(h1).bar.clone()]) {
        let dlen = ctx.aut.d_h(&start);
        let mut cur = start.clone();
        for step in 0..dlen {
            let nxt = ctx.aut.h(&cur).to_string();
            let cur_arr = q.arrow(&cur);
            let left = &(g.block(ctx.aut.v(&cur_arr.tgt)) * ctx.phi_of(&cur_arr.tgt));
            let right = (g.block(ctx.aut.v(&cur_arr.src)) * ctx.phi_of(&cur_arr.src))
                .inverse()
                .unwrap();
            let val = &(left * x.b_of(&cur)) * &right;
            if step + 1 == dlen {
                debug_assert_eq!(val, *x.b_of(&nxt), "orbit extension is inconsistent");
            } else {
                x.b.insert(nxt.clone(), val);
            }
            cur = nxt;
        }
    }
    Ok(x)
}

/// Result of classifying a theta-stable orbit.
#[derive(Clone, Debug)]
pub struct Classified {
    /// Eigenspace dimension vector of the orbit: its component in D(v).
    pub vtilde: Decomposition,
    /// The unique g with act(g, theta(x)) = x.
    pub g: GroupElement,
    /// The conjugating element moving x into canonical position.
    pub conjugator: GroupElement,
    /// The canonical-position representative of the orbit.
    pub normalized: AdhmDatum,
    /// The split-quotient datum with psi(preimage) = normalized.
    pub preimage: AdhmDatum,
}

/// Decides whether the orbit of a stable relation point is theta-stable and,
/// if so, produces its component, the canonical representative and the
/// split-quotient preimage. `Ok(None)` means not fixed.
pub fn classify_fixed(ctx: &FoldContext, x: &AdhmDatum) -> Result<Option<Classified>> {
    let q = &ctx.quiver;
    let tx = theta(ctx, x);
    let Some(g) = transporter(q, x, &tx) else {
        return Ok(None);
    };
    // tau_i = g_i phi_{a^{d-1}(i)} ... g_{a(i)} phi_i, with eigenvalues in
    // mu_{e_i}; its eigenspace dimensions are the component.
    let mut vtilde = BTreeMap::new();
    let mut bases: BTreeMap<String, Mat> = BTreeMap::new();
    for rep in &ctx.sq.reps {
        let tau = chain(ctx, &g, rep, ctx.aut.d_v(rep));
        let e = ctx.aut.e_v(rep);
        let vi = ctx.dims.v_of(rep);
        if tau.pow(e as usize) != Matrix::identity(vi) {
            return Err(Error::Inconsistent(format!(
                "tau at {rep} does not have order dividing e = {e}; input not stable?"
            )));
        }
        let mut cols: Vec<Mat> = Vec::new();
        let mut total = 0;
        for u in 0..e {
            let space = eigenspace(&tau, &ctx.zeta(rep, u))?;
            vtilde.insert(split_vertex_id(rep, u), space.cols);
            total += space.cols;
            cols.push(space);
        }
        if total != vi {
            return Err(Error::Inconsistent(format!(
                "eigenspaces of tau at {rep} span {total} of {vi} dimensions"
            )));
        }
        let refs: Vec<&Mat> = cols.iter().collect();
        let basis = if vi == 0 { Matrix::identity(0) } else { Matrix::hstack(&refs) };
        bases.insert(rep.clone(), basis);
    }
    let d = Decomposition { vtilde };

    // Conjugate so the eigenspaces become the canonical coordinate blocks
    // and the transporter becomes identity off the representatives.
    let mut h_blocks: BTreeMap<String, Mat> = BTreeMap::new();
    for rep in &ctx.sq.reps {
        h_blocks.insert(rep.clone(), bases[rep].inverse().unwrap());
        let dlen = ctx.aut.d_v(rep);
        let mut prev = rep.clone();
        for _ in 1..dlen {
            let cur = ctx.aut.v(&prev).to_string();
            let h_prev = &h_blocks[&prev];
            let phi = ctx.phi_of(&prev);
            let val = &(&(phi * h_prev) * &phi.inverse().unwrap())
                * &g.block(&cur).inverse().unwrap();
            h_blocks.insert(cur.clone(), val);
            prev = cur;
        }
    }
    let h = GroupElement { blocks: h_blocks };
    let x_norm = act_gv(q, &h, x);
    // g' = h g theta(h)^{-1} must be the canonical g-tilde.
    let g_norm = {
        let th_inv = theta_gv(ctx, &h).inverse()?;
        let blocks = q
            .vertices
            .iter()
            .map(|i| (i.clone(), &(h.block(i) * g.block(i)) * th_inv.block(i)))
            .collect();
        GroupElement { blocks }
    };
    let g_canon = g_vtilde(ctx, &d);
    for i in &q.vertices {
        if g_norm.block(i) != g_canon.block(i) {
            return Err(Error::Inconsistent(format!(
                "normalized transporter is not canonical at {i}"
            )));
        }
    }

    // Read the split-quotient datum off the canonical representative.
    let split_dims = ctx.split_dims(&d);
    let mut y = AdhmDatum::zero(&ctx.sq.split, &split_dims, ctx.field_order);
    for rep in &ctx.sq.reps {
        let e = ctx.aut.e_v(rep);
        let v_offs = ctx.v_block_offsets(&d, rep);
        let w_offs = ctx.w_block_offsets(rep);
        let p = &ctx.w_eigen[rep].basis;
        let gam_eig = x_norm.gamma_of(rep) * p;
        let del_eig = &p.inverse().unwrap() * x_norm.delta_of(rep);
        let e_inv = Scalar::one() / Scalar::from_int(e as i64);
        for u in 0..e as usize {
            for u2 in 0..e as usize {
                let gb = gam_eig.block(
                    v_offs[u2],
                    w_offs[u],
                    v_offs[u2 + 1] - v_offs[u2],
                    w_offs[u + 1] - w_offs[u],
                );
                let db = del_eig.block(
                    w_offs[u],
                    v_offs[u2],
                    w_offs[u + 1] - w_offs[u],
                    v_offs[u2 + 1] - v_offs[u2],
                );
                if u == u2 {
                    let id = split_vertex_id(rep, u as u32);
                    y.gamma.insert(id.clone(), gb.scale(&e_inv));
                    y.delta.insert(id, db);
                } else if !gb.is_zero_matrix() || !db.is_zero_matrix() {
                    return Err(Error::Inconsistent(format!(
                        "framing maps at {rep} are not eigen-block-diagonal"
                    )));
                }
            }
        }
    }
    for h1 in &ctx.sq.omega1 {
        let arr = q.arrow(h1);
        let s_rep = &ctx.sq.orbit_rep[&arr.src];
        let t_rep = &ctx.sq.orbit_rep[&arr.tgt];
        let (e_s, e_t, e_h) = (ctx.aut.e_v(s_rep), ctx.aut.e_v(t_rep), ctx.aut.e_h(h1));
        let s_offs = ctx.v_block_offsets(&d, s_rep);
        let t_offs = ctx.v_block_offsets(&d, t_rep);
        let ch = chain(ctx, &g_canon, t_rep, ctx.sq.f_exp[h1]);
        let e_h_inv = Scalar::one() / Scalar::from_int(e_h as i64);
        let fwd = (&ch.inverse().unwrap() * x_norm.b_of(h1)).scale(&e_h_inv);
        let bwd = x_norm.b_of(&arr.bar) * &ch;
        for u in 0..e_s {
            for u2 in 0..e_t {
                let fb = fwd.block(
                    t_offs[u2 as usize],
                    s_offs[u as usize],
                    t_offs[u2 as usize + 1] - t_offs[u2 as usize],
                    s_offs[u as usize + 1] - s_offs[u as usize],
                );
                let bb = bwd.block(
                    s_offs[u as usize],
                    t_offs[u2 as usize],
                    s_offs[u as usize + 1] - s_offs[u as usize],
                    t_offs[u2 as usize + 1] - t_offs[u2 as usize],
                );
                if u % e_h == u2 % e_h {
                    y.b.insert(split_arrow_id(h1, u, u2), fb);
                    y.b.insert(split_arrow_bar_id(h1, u, u2), bb);
                } else if !fb.is_zero_matrix() || !bb.is_zero_matrix() {
                    return Err(Error::Inconsistent(format!(
                        "arrow maps at {h1} have entries outside the admissible blocks"
                    )));
                }
            }
        }
    }
    debug_assert_eq!(psi_embed(ctx, &d, &y)?, x_norm, "psi does not reproduce the representative");
    Ok(Some(Classified { vtilde: d, g, conjugator: h, normalized: x_norm, preimage: y }))
}

/// The homomorphism G_{V-tilde} -> G_V attached to a decomposition: block
/// diagonal at the representatives, extended along orbits by conjugation
/// with the chain maps.
pub fn rho_v(ctx: &FoldContext, d: &Decomposition, h_tilde: &GroupElement) -> GroupElement {
    let g = g_vtilde(ctx, d);
    let mut blocks: BTreeMap<String, Mat> = BTreeMap::new();
    for rep in &ctx.sq.reps {
        let e = ctx.aut.e_v(rep);
        let offs = ctx.v_block_offsets(d, rep);
        let vi = ctx.dims.v_of(rep);
        let mut m: Mat = Matrix::zeros(vi, vi);
        for u in 0..e {
            m.set_block(
                offs[u as usize],
                offs[u as usize],
                h_tilde.block(&split_vertex_id(rep, u)),
            );
        }
        blocks.insert(rep.clone(), m);
        let dlen = ctx.aut.d_v(rep);
        let mut prev = rep.clone();
        for _ in 1..dlen {
            let cur = ctx.aut.v(&prev).to_string();
            let gp = g.block(&cur) * ctx.phi_of(&prev);
            let val = &(&gp * &blocks[&prev]) * &gp.inverse().unwrap();
            blocks.insert(cur.clone(), val);
            prev = cur;
        }
    }
    GroupElement { blocks }
}

/// The inverse of the isomorphism G_W^theta -> G_{W-tilde}: block diagonal
/// in the eigenbasis at the representatives, extended by sigma-conjugation.
pub fn rho_w_inv(ctx: &FoldContext, alpha_tilde: &GroupElement) -> GroupElement {
    let mut blocks: BTreeMap<String, Mat> = BTreeMap::new();
    for rep in &ctx.sq.reps {
        let e = ctx.aut.e_v(rep);
        let offs = ctx.w_block_offsets(rep);
        let wi = ctx.dims.w_of(rep);
        let mut m: Mat = Matrix::zeros(wi, wi);
        for u in 0..e {
            m.set_block(
                offs[u as usize],
                offs[u as usize],
                alpha_tilde.block(&split_vertex_id(rep, u)),
            );
        }
        let p = &ctx.w_eigen[rep].basis;
        blocks.insert(rep.clone(), &(p * &m) * &p.inverse().unwrap());
        let dlen = ctx.aut.d_v(rep);
        let mut prev = rep.clone();
        for _ in 1..dlen {
            let cur = ctx.aut.v(&prev).to_string();
            let s = ctx.sigma_of(&prev);
            let val = &(s * &blocks[&prev]) * &s.inverse().unwrap();
            blocks.insert(cur.clone(), val);
            prev = cur;
        }
    }
    GroupElement { blocks }
}

/// Finds lambda in mu_period with theta(alpha) = lambda alpha, if any.
pub fn theta_similitude(ctx: &FoldContext, alpha: &GroupElement) -> Option<Scalar> {
    let t = theta_gw(ctx, alpha);
    for l in 0..ctx.aut.period {
        let lam = ctx.eta().pow(l as i64);
        let ok = ctx.quiver.vertices.iter().all(|i| {
            t.block(i) == &alpha.block(i).scale(&lam)
        });
        if ok {
            return Some(lam);
        }
    }
    None
}

/// The permutation of D(v) induced by a similitude with factor lambda:
/// v'_{i, zeta} = v_{i, zeta lambda^{-d_i}}.
pub fn component_permutation(
    ctx: &FoldContext,
    lambda: &Scalar,
    d: &Decomposition,
) -> Result<Decomposition> {
    let n = ctx.aut.period;
    let l = (0..n)
        .find(|&l| ctx.eta().pow(l as i64) == *lambda)
        .ok_or_else(|| Error::Invalid(format!("{lambda:?} is not a power of eta")))?;
    let mut vtilde = BTreeMap::new();
    for (id, (rep, u)) in &ctx.sq.vertex_zeta {
        let e = ctx.aut.e_v(rep);
        let shifted = (u + e - (l % e)) % e;
        vtilde.insert(id.clone(), d.dim(&split_vertex_id(rep, shifted)));
    }
    Ok(Decomposition { vtilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adhm::{SampleOptions, act_gw, in_lagrangian, is_stable, residual_is_zero,
                      sample_point};
    use crate::fixtures;
    use crate::rng::{SplitMix64, random_invertible};
    use num_traits::Zero;

    fn ctx_a3() -> FoldContext {
        fixtures::standard_fold_context(2, &[1, 2, 1], &[0, 2, 0], Some((1, 1)), 2).unwrap()
    }

    fn sample_split(ctx: &FoldContext, d: &Decomposition, seed: u64) -> Option<AdhmDatum> {
        let dims = ctx.split_dims(d);
        let opts = SampleOptions { field_order: ctx.field_order, ..Default::default() };
        sample_point(&ctx.sq.split, &dims, seed, &opts).ok()
    }

    fn middle_decomposition(ctx: &FoldContext, v_plus: usize, v_minus: usize) -> Decomposition {
        let mut vtilde = BTreeMap::new();
        for (id, (rep, u)) in &ctx.sq.vertex_zeta {
            let dim = if ctx.aut.e_v(rep) == 1 {
                ctx.dims.v_of(rep)
            } else if *u == 0 {
                v_plus
            } else {
                v_minus
            };
            vtilde.insert(id.clone(), dim);
        }
        Decomposition { vtilde }
    }

    #[test]
    fn theta_is_an_involution() {
        let ctx = ctx_a3();
        let q = &ctx.quiver;
        let dims = &ctx.dims;
        let x = sample_point(q, dims, 5, &SampleOptions::default()).unwrap();
        assert_eq!(theta(&ctx, &theta(&ctx, &x)), x);
        // theta preserves the relation variety and stability.
        let tx = theta(&ctx, &x);
        assert!(residual_is_zero(q, &tx));
        assert!(is_stable(q, &tx));
    }

    #[test]
    fn theta_with_identity_automorphism_is_sigma_action() {
        // a = id, sigma = id: theta is the identity map.
        let q = fixtures::type_a_quiver(2);
        let a = crate::quiver::AdmAut::identity(&q, 1);
        let dims = GradedDims::new(&q, &[1, 2, 1], &[1, 1, 1]).unwrap();
        let phi = q
            .vertices
            .iter()
            .map(|i| (i.clone(), Matrix::identity(dims.v_of(i))))
            .collect();
        let sigma = q
            .vertices
            .iter()
            .map(|i| (i.clone(), Matrix::identity(dims.w_of(i))))
            .collect();
        let ctx = FoldContext::new(q.clone(), a, dims.clone(), phi, sigma, 1).unwrap();
        let x = sample_point(&q, &dims, 9, &SampleOptions::default()).unwrap();
        assert_eq!(theta(&ctx, &x), x);
    }

    #[test]
    fn psi_with_identity_automorphism_is_a_relabeling() {
        // a = id, period 1: the split quiver is a copy of the original and
        // psi transports each map unchanged.
        let q = fixtures::type_a_quiver(2);
        let a = crate::quiver::AdmAut::identity(&q, 1);
        let dims = GradedDims::new(&q, &[1, 2, 1], &[1, 1, 1]).unwrap();
        let ident =
            |d: &dyn Fn(&str) -> usize| -> BTreeMap<String, Mat> {
                q.vertices.iter().map(|i| (i.clone(), Matrix::identity(d(i)))).collect()
            };
        let phi = ident(&|i| dims.v_of(i));
        let sigma = ident(&|i| dims.w_of(i));
        let ctx = FoldContext::new(q.clone(), a, dims.clone(), phi, sigma, 1).unwrap();
        let ds = enumerate_decompositions(&ctx);
        assert_eq!(ds.len(), 1);
        let split_dims = ctx.split_dims(&ds[0]);
        let opts = SampleOptions { field_order: 1, ..Default::default() };
        let y = sample_point(&ctx.sq.split, &split_dims, 2, &opts).unwrap();
        let x = psi_embed(&ctx, &ds[0], &y).unwrap();
        for i in &q.vertices {
            assert_eq!(x.gamma_of(i), y.gamma_of(&split_vertex_id(i, 0)));
            assert_eq!(x.delta_of(i), y.delta_of(&split_vertex_id(i, 0)));
        }
        for (fid, (h1, _, _)) in &ctx.sq.arrow_data {
            assert_eq!(x.b_of(h1), y.b_of(fid));
        }
    }

    #[test]
    fn decomposition_enumeration_counts() {
        let ctx = ctx_a3();
        // v_middle = 2 splits as (0,2), (1,1), (2,0): three decompositions.
        let ds = enumerate_decompositions(&ctx);
        assert_eq!(ds.len(), 3);
        let ctx5 = fixtures::standard_fold_context(3, &[1, 2, 3, 2, 1], &[0, 0, 2, 0, 0], Some((1, 1)), 2)
            .unwrap();
        assert_eq!(enumerate_decompositions(&ctx5).len(), 4);
    }

    #[test]
    fn psi_zero_is_zero_and_matches_example_blocks() {
        let ctx = ctx_a3();
        let d = middle_decomposition(&ctx, 1, 1);
        let dims = ctx.split_dims(&d);
        let zero = AdhmDatum::zero(&ctx.sq.split, &dims, 2);
        let x = psi_embed(&ctx, &d, &zero).unwrap();
        assert!(x.b.values().all(Matrix::is_zero_matrix));
        assert!(x.gamma.values().all(Matrix::is_zero_matrix));

        // Now check the displayed block structure on a sampled datum:
        // Gamma_mid = 2 diag(G+, G-), B into the middle is stacked, and the
        // reflected arrow gets a sign on the minus block.
        let y = sample_split(&ctx, &d, 21).unwrap();
        let x = psi_embed(&ctx, &d, &y).unwrap();
        let gam = x.gamma_of("02");
        let gp = y.gamma_of("02@0");
        let gm = y.gamma_of("02@1");
        assert_eq!(gam[(0, 0)], &Scalar::from_int(2) * &gp[(0, 0)]);
        assert_eq!(gam[(1, 1)], &Scalar::from_int(2) * &gm[(0, 0)]);
        assert!(gam[(0, 1)].is_zero() && gam[(1, 0)].is_zero());
        // Forward arrow 01->02 stacks the two split maps.
        let b_in = x.b_of("01-02");
        let bp = y.b_of("01-02@0|0");
        let bm = y.b_of("01-02@0|1");
        assert_eq!(b_in[(0, 0)], bp[(0, 0)]);
        assert_eq!(b_in[(1, 0)], bm[(0, 0)]);
        // Reflected arrow 03->02 carries the sign on the minus block.
        let b_ref = x.b_of("03-02");
        assert_eq!(b_ref[(0, 0)], bp[(0, 0)]);
        assert_eq!(b_ref[(1, 0)], -&bm[(0, 0)]);
    }

    #[test]
    fn psi_preserves_relations_stability_and_theta_fixes_image() {
        let ctx = ctx_a3();
        for (vp, vm) in [(0, 2), (1, 1), (2, 0)] {
            let d = middle_decomposition(&ctx, vp, vm);
            let Some(y) = sample_split(&ctx, &d, 100 + vp as u64) else { continue };
            let x = psi_embed(&ctx, &d, &y).unwrap();
            assert!(residual_is_zero(&ctx.quiver, &x), "residual broke at ({vp},{vm})");
            assert_eq!(is_stable(&ctx.sq.split, &y), is_stable(&ctx.quiver, &x));
            // act(g-tilde, theta(psi(y))) = psi(y).
            let g = g_vtilde(&ctx, &d);
            assert_eq!(act_gv(&ctx.quiver, &g, &theta(&ctx, &x)), x);
        }
    }

    #[test]
    fn psi_equivariance() {
        let ctx = ctx_a3();
        let d = middle_decomposition(&ctx, 1, 1);
        let y = sample_split(&ctx, &d, 33).unwrap();
        let split_dims = ctx.split_dims(&d);
        let mut rng = SplitMix64::new(14);
        // G_{V-tilde} equivariance through rho_v.
        let h_tilde = GroupElement {
            blocks: ctx
                .sq
                .split
                .vertices
                .iter()
                .map(|i| (i.clone(), random_invertible(&mut rng, split_dims.v_of(i), 2)))
                .collect(),
        };
        let lhs = psi_embed(&ctx, &d, &act_gv(&ctx.sq.split, &h_tilde, &y)).unwrap();
        let rhs = act_gv(&ctx.quiver, &rho_v(&ctx, &d, &h_tilde), &psi_embed(&ctx, &d, &y).unwrap());
        assert_eq!(lhs, rhs);
        // G_{W-tilde} equivariance through rho^{-1}.
        let a_tilde = GroupElement {
            blocks: ctx
                .sq
                .split
                .vertices
                .iter()
                .map(|i| (i.clone(), random_invertible(&mut rng, split_dims.w_of(i), 2)))
                .collect(),
        };
        let lhs = psi_embed(&ctx, &d, &act_gw(&ctx.sq.split, &a_tilde, &y)).unwrap();
        let rhs = act_gw(&ctx.quiver, &rho_w_inv(&ctx, &a_tilde), &psi_embed(&ctx, &d, &y).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn classify_round_trips_psi() {
        let ctx = ctx_a3();
        for (vp, vm) in [(1, 1), (2, 0)] {
            let d = middle_decomposition(&ctx, vp, vm);
            let Some(y) = sample_split(&ctx, &d, 55 + vp as u64) else { continue };
            let x = psi_embed(&ctx, &d, &y).unwrap();
            let c = classify_fixed(&ctx, &x).unwrap().expect("psi image must be fixed");
            assert_eq!(c.vtilde, d);
            // x is already in canonical position, so recovery is exact.
            assert_eq!(c.normalized, x);
            assert_eq!(c.preimage, y);
            // Now move x by a random group element: same component, and the
            // preimage is recovered up to the split-side group.
            let mut rng = SplitMix64::new(77);
            let g = GroupElement {
                blocks: ctx
                    .quiver
                    .vertices
                    .iter()
                    .map(|i| (i.clone(), random_invertible(&mut rng, ctx.dims.v_of(i), 2)))
                    .collect(),
            };
            let gx = act_gv(&ctx.quiver, &g, &x);
            let c2 = classify_fixed(&ctx, &gx).unwrap().expect("orbit is fixed");
            assert_eq!(c2.vtilde, d);
            let t = transporter(&ctx.sq.split, &c2.preimage, &y);
            assert!(t.is_some(), "preimage is not in the split-side orbit of y");
        }
    }

    #[test]
    fn generic_point_is_not_fixed() {
        let ctx = ctx_a3();
        let x = sample_point(&ctx.quiver, &ctx.dims, 200, &SampleOptions::default()).unwrap();
        // A generic sampled point is not theta-symmetric.
        assert!(classify_fixed(&ctx, &x).unwrap().is_none());
    }

    #[test]
    fn lagrangian_membership_transfers() {
        let ctx = ctx_a3();
        let d = middle_decomposition(&ctx, 1, 1);
        let dims = ctx.split_dims(&d);
        let opts = SampleOptions {
            delta_zero: true,
            field_order: ctx.field_order,
            ..Default::default()
        };
        let y = sample_point(&ctx.sq.split, &dims, 61, &opts).unwrap();
        let x = psi_embed(&ctx, &d, &y).unwrap();
        // Both quivers are finite Dynkin; check with the nilpotency clause
        // forced on as well.
        for finite in [true, false] {
            assert!(in_lagrangian(&ctx.sq.split, &y, finite));
            assert!(in_lagrangian(&ctx.quiver, &x, finite));
        }
    }

    #[test]
    fn similitudes_and_component_permutation() {
        let ctx = ctx_a3();
        // alpha = antidiagonal swap on the middle W: theta(alpha) = -alpha.
        let mut blocks = BTreeMap::new();
        for i in &ctx.quiver.vertices {
            let wi = ctx.dims.w_of(i);
            if i == "02" {
                blocks.insert(
                    i.clone(),
                    Matrix::new(
                        2,
                        2,
                        vec![Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero()],
                    )
                    .unwrap(),
                );
            } else {
                blocks.insert(i.clone(), Matrix::identity(wi));
            }
        }
        let alpha = GroupElement { blocks };
        let lam = theta_similitude(&ctx, &alpha).expect("swap is a similitude");
        assert_eq!(lam, Scalar::from_int(-1));
        // A unipotent middle block is neither fixed nor negated.
        let mut bad = alpha.clone();
        bad.blocks.insert(
            "02".into(),
            Matrix::new(
                2,
                2,
                vec![Scalar::one(), Scalar::one(), Scalar::zero(), Scalar::one()],
            )
            .unwrap(),
        );
        assert!(theta_similitude(&ctx, &bad).is_none());
        // k < n: the two framing lines are swapped, so (a, b) is a
        // similitude iff a = +-b.
        let ctx_small = fixtures::slice_fold_context(
            &crate::slodowy::SliceSpec::new(2, 1, None).unwrap(),
            None,
        )
        .unwrap();
        let diag_pair = |a: i64, b: i64| GroupElement {
            blocks: ctx_small
                .quiver
                .vertices
                .iter()
                .map(|i| {
                    let wi = ctx_small.dims.w_of(i);
                    let s = if i == "01" { a } else { b };
                    (i.clone(), Matrix::identity(wi).scale(&Scalar::from_int(s)))
                })
                .collect(),
        };
        assert_eq!(theta_similitude(&ctx_small, &diag_pair(2, 2)), Some(Scalar::one()));
        assert_eq!(theta_similitude(&ctx_small, &diag_pair(2, -2)), Some(Scalar::from_int(-1)));
        assert_eq!(theta_similitude(&ctx_small, &diag_pair(2, 3)), None);
        // lambda = -1 swaps (v+, v-).
        let d = middle_decomposition(&ctx, 0, 2);
        let p = component_permutation(&ctx, &lam, &d).unwrap();
        assert_eq!(p, middle_decomposition(&ctx, 2, 0));
        // lambda = 1 is the identity permutation.
        let p1 = component_permutation(&ctx, &Scalar::one(), &d).unwrap();
        assert_eq!(p1, d);
        // And the action on actual points matches: classify(alpha . x).
        let dd = middle_decomposition(&ctx, 1, 1);
        if let Some(y) = sample_split(&ctx, &dd, 91) {
            let x = psi_embed(&ctx, &dd, &y).unwrap();
            let ax = act_gw(&ctx.quiver, &alpha, &x);
            let c = classify_fixed(&ctx, &ax).unwrap().expect("similitude keeps fixedness");
            assert_eq!(c.vtilde, component_permutation(&ctx, &lam, &dd).unwrap());
        }
        // (2,0) involution: theta(alpha) = alpha for diagonal alpha.
        let ctx20 =
            fixtures::standard_fold_context(2, &[1, 2, 1], &[0, 2, 0], Some((2, 0)), 2).unwrap();
        let alpha = GroupElement {
            blocks: ctx20
                .quiver
                .vertices
                .iter()
                .map(|i| (i.clone(), Matrix::identity(ctx20.dims.w_of(i)).scale(&Scalar::from_int(2))))
                .collect(),
        };
        assert_eq!(theta_similitude(&ctx20, &alpha), Some(Scalar::one()));
    }

    #[test]
    fn eigenspace_dims_sum_for_sampled_sigma() {
        // A conjugated involution still splits W with dimensions summing to w.
        let mut rng = SplitMix64::new(3);
        let p = random_invertible(&mut rng, 2, 2);
        let sig = &(&p * &SliceLike::diag().clone()) * &p.inverse().unwrap();
        let ctx =
            fixtures::standard_fold_context_with_sigma(2, &[1, 2, 1], &[0, 2, 0], sig, 2).unwrap();
        let split = &ctx.w_eigen["02"];
        assert_eq!(split.dims.iter().sum::<usize>(), 2);
        assert_eq!(split.dims, vec![1, 1]);
    }

    struct SliceLike;
    impl SliceLike {
        fn diag() -> Mat {
            Matrix::new(
                2,
                2,
                vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::from_int(-1)],
            )
            .unwrap()
        }
    }
}
