//! Quivers, admissible automorphisms, the split-quotient construction and
//! symmetrizable Cartan matrices.
//!
//! A quiver here is a finite graph without edge loops, given as the set H of
//! oriented edges with a fixed-point-free reversal involution `bar`, plus an
//! acyclic orientation Omega with H = Omega ⊔ Omega-bar. An admissible
//! automorphism permutes vertices and arrows compatibly and never maps a
//! vertex to a neighbour. The split-quotient quiver has vertices (i, zeta)
//! with i an orbit representative and zeta an e_i-th root of unity; roots of
//! unity are tracked as integer exponents of a fixed primitive root eta, so
//! this module is pure integer combinatorics.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub src: String,
    pub tgt: String,
    pub bar: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub orientation: BTreeSet<String>,
}

impl Quiver {
    pub fn arrow(&self, id: &str) -> &Arrow {
        self.arrows
            .iter()
            .find(|a| a.id == id)
            .unwrap_or_else(|| panic!("unknown arrow id {id:?}"))
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.iter().any(|u| u == v)
    }

    pub fn is_forward(&self, id: &str) -> bool {
        self.orientation.contains(id)
    }

    pub fn forward_arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(|a| self.orientation.contains(&a.id))
    }

    /// The unique arrow from `src` to `tgt`, if there is exactly one.
    pub fn arrow_between(&self, src: &str, tgt: &str) -> Result<&Arrow> {
        let mut found = None;
        for a in &self.arrows {
            if a.src == src && a.tgt == tgt {
                if found.is_some() {
                    return Err(Error::Invalid(format!(
                        "parallel arrows between {src:?} and {tgt:?}"
                    )));
                }
                found = Some(a);
            }
        }
        found.ok_or_else(|| Error::Invalid(format!("no arrow from {src:?} to {tgt:?}")))
    }

    /// Structural well-formedness of the quiver itself.
    pub fn check(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let vset: BTreeSet<&String> = self.vertices.iter().collect();
        if vset.len() != self.vertices.len() {
            bad.push("duplicate vertex ids".into());
        }
        let aset: BTreeSet<&String> = self.arrows.iter().map(|a| &a.id).collect();
        if aset.len() != self.arrows.len() {
            bad.push("duplicate arrow ids".into());
        }
        for a in &self.arrows {
            if !vset.contains(&a.src) || !vset.contains(&a.tgt) {
                bad.push(format!("arrow {} has an endpoint outside the vertex set", a.id));
                continue;
            }
            if a.src == a.tgt {
                bad.push(format!("edge loop at vertex {} (arrow {})", a.src, a.id));
            }
            if !aset.contains(&a.bar) {
                bad.push(format!("arrow {} has unknown reversal {}", a.id, a.bar));
                continue;
            }
            let b = self.arrow(&a.bar);
            if b.id == a.id {
                bad.push(format!("reversal of arrow {} is itself", a.id));
            }
            if b.bar != a.id {
                bad.push(format!("reversal involution broken at arrow {}", a.id));
            }
            if b.src != a.tgt || b.tgt != a.src {
                bad.push(format!("reversal of arrow {} does not swap endpoints", a.id));
            }
        }
        for id in &self.orientation {
            if !aset.contains(id) {
                bad.push(format!("orientation contains unknown arrow {id}"));
            }
        }
        if bad.is_empty() {
            for a in &self.arrows {
                let fwd = self.orientation.contains(&a.id);
                let bwd = self.orientation.contains(&a.bar);
                if fwd == bwd {
                    bad.push(format!(
                        "orientation must contain exactly one of {} and {}",
                        a.id, a.bar
                    ));
                }
            }
            if self.orientation_has_cycle() {
                bad.push("orientation contains an oriented cycle".into());
            }
        }
        bad
    }

    fn orientation_has_cycle(&self) -> bool {
        // Kahn's algorithm on the forward arrows.
        let mut indeg: BTreeMap<&String, usize> = self.vertices.iter().map(|v| (v, 0)).collect();
        for a in self.forward_arrows() {
            *indeg.get_mut(&a.tgt).unwrap() += 1;
        }
        let mut queue: Vec<&String> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| *v)
            .collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for a in self.forward_arrows() {
                if &a.src == v {
                    let d = indeg.get_mut(&a.tgt).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        queue.push(&a.tgt);
                    }
                }
            }
        }
        seen != self.vertices.len()
    }
}

/// Admissible automorphism: compatible permutations of vertices and arrows,
/// with a period that every orbit length divides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmAut {
    pub vertex_perm: BTreeMap<String, String>,
    pub arrow_perm: BTreeMap<String, String>,
    pub period: u32,
}

impl AdmAut {
    pub fn identity(q: &Quiver, period: u32) -> Self {
        AdmAut {
            vertex_perm: q.vertices.iter().map(|v| (v.clone(), v.clone())).collect(),
            arrow_perm: q.arrows.iter().map(|a| (a.id.clone(), a.id.clone())).collect(),
            period,
        }
    }

    pub fn v(&self, i: &str) -> &str {
        self.vertex_perm
            .get(i)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("vertex {i:?} not in permutation"))
    }

    pub fn h(&self, id: &str) -> &str {
        self.arrow_perm
            .get(id)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("arrow {id:?} not in permutation"))
    }

    pub fn v_inv(&self, i: &str) -> &str {
        self.vertex_perm
            .iter()
            .find(|(_, to)| to.as_str() == i)
            .map(|(from, _)| from.as_str())
            .unwrap_or_else(|| panic!("vertex {i:?} not in permutation image"))
    }

    pub fn h_inv(&self, id: &str) -> &str {
        self.arrow_perm
            .iter()
            .find(|(_, to)| to.as_str() == id)
            .map(|(from, _)| from.as_str())
            .unwrap_or_else(|| panic!("arrow {id:?} not in permutation image"))
    }

    /// a^k applied to a vertex.
    pub fn v_pow(&self, i: &str, k: u32) -> String {
        let mut cur = i.to_string();
        for _ in 0..k {
            cur = self.v(&cur).to_string();
        }
        cur
    }

    /// Orbit of a vertex, starting at the vertex itself.
    pub fn vertex_orbit(&self, i: &str) -> Vec<String> {
        let mut orbit = vec![i.to_string()];
        let mut cur = self.v(i).to_string();
        while cur != i {
            orbit.push(cur.clone());
            cur = self.v(&cur).to_string();
        }
        orbit
    }

    pub fn arrow_orbit(&self, id: &str) -> Vec<String> {
        let mut orbit = vec![id.to_string()];
        let mut cur = self.h(id).to_string();
        while cur != id {
            orbit.push(cur.clone());
            cur = self.h(&cur).to_string();
        }
        orbit
    }

    /// Orbit size d_i of a vertex.
    pub fn d_v(&self, i: &str) -> u32 {
        self.vertex_orbit(i).len() as u32
    }

    /// Orbit size d_h of an arrow.
    pub fn d_h(&self, id: &str) -> u32 {
        self.arrow_orbit(id).len() as u32
    }

    pub fn e_v(&self, i: &str) -> u32 {
        self.period / self.d_v(i)
    }

    pub fn e_h(&self, id: &str) -> u32 {
        self.period / self.d_h(id)
    }
}

/// Checks every invariant of an admissible automorphism of a quiver.
/// Returns the list of named violations (empty means valid).
pub fn validate(q: &Quiver, a: &AdmAut) -> Vec<String> {
    let mut bad = q.check();
    if !bad.is_empty() {
        return bad;
    }
    let vkeys: BTreeSet<&String> = a.vertex_perm.keys().collect();
    let vvals: BTreeSet<&String> = a.vertex_perm.values().collect();
    let vset: BTreeSet<&String> = q.vertices.iter().collect();
    if vkeys != vset || vvals != vset {
        bad.push("vertex permutation is not a bijection of the vertex set".into());
        return bad;
    }
    let akeys: BTreeSet<&String> = a.arrow_perm.keys().collect();
    let avals: BTreeSet<&String> = a.arrow_perm.values().collect();
    let aset: BTreeSet<&String> = q.arrows.iter().map(|x| &x.id).collect();
    if akeys != aset || avals != aset {
        bad.push("arrow permutation is not a bijection of the arrow set".into());
        return bad;
    }
    for arr in &q.arrows {
        let img = q.arrow(a.h(&arr.id));
        if img.src != a.v(&arr.src) {
            bad.push(format!("source not equivariant at arrow {}", arr.id));
        }
        if img.tgt != a.v(&arr.tgt) {
            bad.push(format!("target not equivariant at arrow {}", arr.id));
        }
        if img.bar != a.h(&arr.bar) {
            bad.push(format!("reversal not equivariant at arrow {}", arr.id));
        }
        if q.is_forward(&arr.id) != q.is_forward(&img.id) {
            bad.push(format!("orientation not preserved at arrow {}", arr.id));
        }
    }
    if !bad.is_empty() {
        bad.sort();
        bad.dedup();
        return bad;
    }
    for arr in &q.arrows {
        // No two adjacent vertices in one orbit.
        if a.vertex_orbit(&arr.src).contains(&arr.tgt) {
            bad.push(format!(
                "adjacent orbit: vertices {} and {} of arrow {} lie in one orbit",
                arr.src, arr.tgt, arr.id
            ));
        }
    }
    for v in &q.vertices {
        if a.period % a.d_v(v) != 0 {
            bad.push(format!("period {} not divisible by vertex orbit size at {}", a.period, v));
        }
    }
    for arr in &q.arrows {
        if a.period % a.d_h(&arr.id) != 0 {
            bad.push(format!(
                "period {} not divisible by arrow orbit size at {}",
                a.period, arr.id
            ));
        }
    }
    bad.sort();
    bad.dedup();
    bad
}

pub fn validate_ok(q: &Quiver, a: &AdmAut) -> Result<()> {
    let bad = validate(q, a);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(bad))
    }
}

/// Symmetrizable Cartan matrix attached to (quiver, automorphism): rows and
/// columns indexed by the chosen orbit representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanMatrix {
    pub reps: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

impl CartanMatrix {
    pub fn entry(&self, i: &str, j: &str) -> i64 {
        let ii = self.reps.iter().position(|r| r == i).expect("unknown representative");
        let jj = self.reps.iter().position(|r| r == j).expect("unknown representative");
        self.entries[ii][jj]
    }
}

/// Lexicographically least vertex of each orbit, sorted.
pub fn orbit_representatives(q: &Quiver, a: &AdmAut) -> Vec<String> {
    let mut reps = BTreeSet::new();
    for v in &q.vertices {
        let orbit = a.vertex_orbit(v);
        reps.insert(orbit.iter().min().unwrap().clone());
    }
    reps.into_iter().collect()
}

/// -c_ij = d_i^{-1} |{h in H : s(h) in orbit(i), t(h) in orbit(j)}|.
pub fn cartan(q: &Quiver, a: &AdmAut) -> Result<CartanMatrix> {
    validate_ok(q, a)?;
    let reps = orbit_representatives(q, a);
    let mut orbit_of: BTreeMap<&String, String> = BTreeMap::new();
    for v in &q.vertices {
        let orbit = a.vertex_orbit(v);
        orbit_of.insert(v, orbit.iter().min().unwrap().clone());
    }
    let mut entries = vec![vec![0i64; reps.len()]; reps.len()];
    for (ii, i) in reps.iter().enumerate() {
        let d_i = a.d_v(i) as i64;
        for (jj, j) in reps.iter().enumerate() {
            if ii == jj {
                entries[ii][jj] = 2;
                continue;
            }
            let count = q
                .arrows
                .iter()
                .filter(|h| orbit_of[&h.src] == *i && orbit_of[&h.tgt] == *j)
                .count() as i64;
            debug_assert_eq!(count % d_i, 0);
            entries[ii][jj] = -count / d_i;
        }
    }
    Ok(CartanMatrix { reps, entries })
}

/// One representative h1 per <a>-orbit in Omega with s(h1) a chosen vertex
/// representative, together with the exponent f with t(h1) = a^f(t-rep).
pub fn edge_orbit_reps(q: &Quiver, a: &AdmAut) -> Result<(Vec<String>, BTreeMap<String, u32>)> {
    validate_ok(q, a)?;
    let reps = orbit_representatives(q, a);
    let rep_set: BTreeSet<&String> = reps.iter().collect();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut omega1 = Vec::new();
    let mut f_exp = BTreeMap::new();
    let mut forward: Vec<&Arrow> = q.forward_arrows().collect();
    forward.sort_by(|x, y| x.id.cmp(&y.id));
    for h in forward {
        if seen.contains(&h.id) {
            continue;
        }
        let orbit = a.arrow_orbit(&h.id);
        for id in &orbit {
            seen.insert(id.clone());
        }
        // Lexicographically least arrow in the orbit whose source is a rep.
        let h1 = orbit
            .iter()
            .filter(|id| rep_set.contains(&q.arrow(id).src))
            .min()
            .expect("every arrow orbit meets the representative sources")
            .clone();
        let t_rep = {
            let t = &q.arrow(&h1).tgt;
            a.vertex_orbit(t).iter().min().unwrap().clone()
        };
        let d_t = a.d_v(&t_rep);
        let mut f = 0;
        let mut cur = t_rep.clone();
        while cur != q.arrow(&h1).tgt {
            cur = a.v(&cur).to_string();
            f += 1;
            assert!(f < d_t, "target representative not reachable");
        }
        omega1.push(h1.clone());
        f_exp.insert(h1, f);
    }
    omega1.sort();
    Ok((omega1, f_exp))
}

/// Identifier of the split-quotient vertex (rep, eta^{u * n/e_rep}); `u` is
/// the canonical index 0..e_rep-1.
pub fn split_vertex_id(rep: &str, u: u32) -> String {
    format!("{rep}@{u}")
}

/// Identifier of the split arrow (orbit of h1, zeta index u, zeta' index u2).
pub fn split_arrow_id(h1: &str, u: u32, u2: u32) -> String {
    format!("{h1}@{u}|{u2}")
}

/// Identifier of the reversal of [`split_arrow_id`].
pub fn split_arrow_bar_id(h1: &str, u: u32, u2: u32) -> String {
    format!("{h1}@{u}|{u2}~")
}

/// The split-quotient quiver together with its induced admissible
/// automorphism and the bookkeeping needed to move data back and forth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitQuotient {
    /// Chosen vertex representatives (the quotient vertex set), sorted.
    pub reps: Vec<String>,
    /// Vertex -> its representative.
    pub orbit_rep: BTreeMap<String, String>,
    /// The quiver (I~, H~, Omega~).
    pub split: Quiver,
    /// The induced automorphism of the split quiver (same period).
    pub split_aut: AdmAut,
    /// Common period n; eta is a fixed primitive n-th root of unity.
    pub period: u32,
    /// Split vertex id -> (rep, canonical index u in 0..e_rep).
    pub vertex_zeta: BTreeMap<String, (String, u32)>,
    /// Forward split arrow id -> (h1, u, u') over the Omega-orbit of h1.
    pub arrow_data: BTreeMap<String, (String, u32, u32)>,
    /// Representatives of the <a>-orbits in Omega.
    pub omega1: Vec<String>,
    /// f(h1): the exponent with t(h1) = a^{f}(t-rep).
    pub f_exp: BTreeMap<String, u32>,
}

/// Builds the split-quotient quiver of (q, a).
pub fn split_quotient(q: &Quiver, a: &AdmAut) -> Result<SplitQuotient> {
    validate_ok(q, a)?;
    let n = a.period;
    let reps = orbit_representatives(q, a);
    let mut orbit_rep = BTreeMap::new();
    for v in &q.vertices {
        let orbit = a.vertex_orbit(v);
        orbit_rep.insert(v.clone(), orbit.iter().min().unwrap().clone());
    }
    let (omega1, f_exp) = edge_orbit_reps(q, a)?;

    let mut vertices = Vec::new();
    let mut vertex_zeta = BTreeMap::new();
    for rep in &reps {
        let e = a.e_v(rep);
        for u in 0..e {
            let id = split_vertex_id(rep, u);
            vertices.push(id.clone());
            vertex_zeta.insert(id, (rep.clone(), u));
        }
    }

    let mut arrows = Vec::new();
    let mut orientation = BTreeSet::new();
    let mut arrow_data = BTreeMap::new();
    for h1 in &omega1 {
        let arr = q.arrow(h1);
        let s_rep = orbit_rep[&arr.src].clone();
        let t_rep = orbit_rep[&arr.tgt].clone();
        let e_s = a.e_v(&s_rep);
        let e_t = a.e_v(&t_rep);
        let e_h = a.e_h(h1);
        debug_assert!(e_s % e_h == 0 && e_t % e_h == 0);
        for u in 0..e_s {
            for u2 in 0..e_t {
                // zeta^{e_s/e_h} = zeta'^{e_t/e_h}  <=>  u = u' (mod e_h).
                if u % e_h != u2 % e_h {
                    continue;
                }
                let fid = split_arrow_id(h1, u, u2);
                let bid = split_arrow_bar_id(h1, u, u2);
                arrows.push(Arrow {
                    id: fid.clone(),
                    src: split_vertex_id(&s_rep, u),
                    tgt: split_vertex_id(&t_rep, u2),
                    bar: bid.clone(),
                });
                arrows.push(Arrow {
                    id: bid.clone(),
                    src: split_vertex_id(&t_rep, u2),
                    tgt: split_vertex_id(&s_rep, u),
                    bar: fid.clone(),
                });
                orientation.insert(fid.clone());
                arrow_data.insert(fid, (h1.clone(), u, u2));
            }
        }
    }

    let split = Quiver { vertices, arrows, orientation };

    // a~(i, zeta) = (i, zeta * eta^{d_i}): index u -> u+1 mod e_i.
    let mut vperm = BTreeMap::new();
    for (id, (rep, u)) in &vertex_zeta {
        let e = a.e_v(rep);
        vperm.insert(id.clone(), split_vertex_id(rep, (u + 1) % e));
    }
    let mut aperm = BTreeMap::new();
    for (fid, (h1, u, u2)) in &arrow_data {
        let arr = q.arrow(h1);
        let e_s = a.e_v(&orbit_rep[&arr.src]);
        let e_t = a.e_v(&orbit_rep[&arr.tgt]);
        let nf = split_arrow_id(h1, (u + 1) % e_s, (u2 + 1) % e_t);
        let nb = split_arrow_bar_id(h1, (u + 1) % e_s, (u2 + 1) % e_t);
        aperm.insert(fid.clone(), nf);
        aperm.insert(split_arrow_bar_id(h1, *u, *u2), nb);
    }
    let split_aut = AdmAut { vertex_perm: vperm, arrow_perm: aperm, period: n };

    let sq = SplitQuotient {
        reps,
        orbit_rep,
        split,
        split_aut,
        period: n,
        vertex_zeta,
        arrow_data,
        omega1,
        f_exp,
    };
    debug_assert!(validate(&sq.split, &sq.split_aut).is_empty());
    Ok(sq)
}

/// Directed-quiver isomorphism by backtracking; intended for the small
/// fixtures only (<= 16 vertices, trees or near-trees).
pub fn quivers_isomorphic(p: &Quiver, q: &Quiver) -> bool {
    if p.vertices.len() != q.vertices.len() || p.arrows.len() != q.arrows.len() {
        return false;
    }
    fn profile(q: &Quiver, v: &str) -> (usize, usize) {
        let out = q.forward_arrows().filter(|a| a.src == v).count();
        let inn = q.forward_arrows().filter(|a| a.tgt == v).count();
        (out, inn)
    }
    fn count_fwd(q: &Quiver, s: &str, t: &str) -> usize {
        q.forward_arrows().filter(|a| a.src == s && a.tgt == t).count()
    }
    fn backtrack<'a>(
        p: &'a Quiver,
        q: &'a Quiver,
        idx: usize,
        assignment: &mut BTreeMap<&'a str, &'a str>,
        used: &mut BTreeSet<&'a str>,
    ) -> bool {
        if idx == p.vertices.len() {
            return true;
        }
        let v = p.vertices[idx].as_str();
        for w in &q.vertices {
            let w = w.as_str();
            if used.contains(w) || profile(p, v) != profile(q, w) {
                continue;
            }
            let ok = assignment.iter().all(|(&a, &b)| {
                count_fwd(p, v, a) == count_fwd(q, w, b) && count_fwd(p, a, v) == count_fwd(q, b, w)
            });
            if !ok {
                continue;
            }
            assignment.insert(v, w);
            used.insert(w);
            if backtrack(p, q, idx + 1, assignment, used) {
                return true;
            }
            assignment.remove(v);
            used.remove(w);
        }
        false
    }
    let mut assignment = BTreeMap::new();
    let mut used = BTreeSet::new();
    backtrack(p, q, 0, &mut assignment, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn a3_involution_is_admissible() {
        let (q, a) = fixtures::type_a_with_involution(2);
        assert!(validate(&q, &a).is_empty());
    }

    #[test]
    fn adjacent_swap_is_rejected() {
        // A2 with both vertices swapped: the orbit {1,2} contains an edge.
        let q = fixtures::path_quiver(&["01", "02"]);
        let mut a = AdmAut::identity(&q, 2);
        a.vertex_perm.insert("01".into(), "02".into());
        a.vertex_perm.insert("02".into(), "01".into());
        a.arrow_perm.insert("01-02".into(), "02-01".into());
        a.arrow_perm.insert("02-01".into(), "01-02".into());
        let bad = validate(&q, &a);
        assert!(
            bad.iter().any(|m| m.contains("adjacent orbit"))
                || bad.iter().any(|m| m.contains("orientation not preserved")),
            "expected adjacent-orbit or orientation violation, got {bad:?}"
        );
    }

    #[test]
    fn affine_a3_rotation_is_admissible() {
        let (q, a) = fixtures::affine_a3_with_rotation();
        assert!(validate(&q, &a).is_empty());
    }

    #[test]
    fn a3_cartan_is_type_b2() {
        let (q, a) = fixtures::type_a_with_involution(2);
        let c = cartan(&q, &a).unwrap();
        assert_eq!(c.reps, vec!["01".to_string(), "02".to_string()]);
        assert_eq!(c.entries, vec![vec![2, -1], vec![-2, 2]]);
    }

    #[test]
    fn identity_aut_gives_symmetric_cartan() {
        let q = fixtures::type_a_quiver(2); // A3 quiver for n = 2
        let a = AdmAut::identity(&q, 1);
        let c = cartan(&q, &a).unwrap();
        assert_eq!(
            c.entries,
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]
        );
    }

    #[test]
    fn split_of_a3_is_d3() {
        let (q, a) = fixtures::type_a_with_involution(2);
        let sq = split_quotient(&q, &a).unwrap();
        // D3 = A3: three vertices, middle vertex split into (02@0), (02@1).
        assert_eq!(sq.split.vertices.len(), 3);
        assert_eq!(sq.split.arrows.len(), 4);
        let c = cartan(&sq.split, &sq.split_aut).unwrap();
        let big = cartan(&q, &a).unwrap();
        for i in &big.reps {
            for j in &big.reps {
                assert_eq!(
                    c.entry(&split_vertex_id(i, 0), &split_vertex_id(j, 0)),
                    big.entry(j, i)
                );
            }
        }
    }

    #[test]
    fn split_counts_match_e_values() {
        for n in 2..=4 {
            let (q, a) = fixtures::type_a_with_involution(n);
            let sq = split_quotient(&q, &a).unwrap();
            let total: u32 = sq.reps.iter().map(|r| a.e_v(r)).sum();
            assert_eq!(sq.split.vertices.len() as u32, total);
            // |H~| = sum over orbit reps of 2 e_s e_t / e_h.
            let mut expect = 0;
            for h1 in &sq.omega1 {
                let arr = q.arrow(h1);
                let e_s = a.e_v(&sq.orbit_rep[&arr.src]);
                let e_t = a.e_v(&sq.orbit_rep[&arr.tgt]);
                expect += 2 * e_s * e_t / a.e_h(h1);
            }
            assert_eq!(sq.split.arrows.len() as u32, expect);
        }
    }

    #[test]
    fn identity_automorphism_gives_disjoint_copies() {
        let q = fixtures::path_quiver(&["01", "02"]); // A2
        let a = AdmAut::identity(&q, 3);
        let sq = split_quotient(&q, &a).unwrap();
        assert_eq!(sq.split.vertices.len(), 6);
        assert_eq!(sq.split.arrows.len(), 3 * q.arrows.len());
        // Arrows only connect vertices in the same layer.
        for arr in &sq.split.arrows {
            let (_, u) = &sq.vertex_zeta[&arr.src];
            let (_, u2) = &sq.vertex_zeta[&arr.tgt];
            assert_eq!(u, u2);
        }
    }

    #[test]
    fn affine_a3_splits_to_affine_a1() {
        let (q, a) = fixtures::affine_a3_with_rotation();
        let sq = split_quotient(&q, &a).unwrap();
        assert_eq!(sq.split.vertices.len(), 2);
        assert_eq!(sq.split.arrows.len(), 4); // two parallel edge pairs
        for (k, v) in &sq.split_aut.vertex_perm {
            assert_eq!(k, v, "induced automorphism should be the identity");
        }
        let (omega1, f) = edge_orbit_reps(&q, &a).unwrap();
        assert_eq!(omega1.len(), 2);
        let fs: Vec<u32> = omega1.iter().map(|h| f[h]).collect();
        assert!(fs.contains(&0) && fs.contains(&1), "got f values {fs:?}");
    }

    #[test]
    fn edge_reps_of_a3() {
        let (q, a) = fixtures::type_a_with_involution(2);
        let (omega1, f) = edge_orbit_reps(&q, &a).unwrap();
        assert_eq!(omega1, vec!["01-02".to_string()]);
        assert_eq!(f["01-02"], 0);
    }

    #[test]
    fn double_split_recovers_original() {
        for n in 2..=4 {
            let (q, a) = fixtures::type_a_with_involution(n);
            let sq = split_quotient(&q, &a).unwrap();
            let sq2 = split_quotient(&sq.split, &sq.split_aut).unwrap();
            assert!(
                quivers_isomorphic(&sq2.split, &q),
                "double split-quotient of A{} is not the original quiver",
                2 * n - 1
            );
        }
        let (q, a) = fixtures::d4_with_triality();
        let sq = split_quotient(&q, &a).unwrap();
        let sq2 = split_quotient(&sq.split, &sq.split_aut).unwrap();
        assert!(quivers_isomorphic(&sq2.split, &q));
    }

    #[test]
    fn cartan_transpose_for_folding_fixtures() {
        let cases: Vec<(Quiver, AdmAut)> = vec![
            fixtures::type_a_with_involution(2),
            fixtures::type_a_with_involution(3),
            fixtures::affine_a3_with_rotation(),
            fixtures::d4_with_triality(),
            fixtures::e6_with_involution(),
        ];
        for (q, a) in cases {
            let sq = split_quotient(&q, &a).unwrap();
            let big = cartan(&q, &a).unwrap();
            let small = cartan(&sq.split, &sq.split_aut).unwrap();
            for i in &big.reps {
                for j in &big.reps {
                    assert_eq!(
                        small.entry(&split_vertex_id(i, 0), &split_vertex_id(j, 0)),
                        big.entry(j, i),
                        "transpose failed at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn d4_triality_cartan_is_g2_fold() {
        let (q, a) = fixtures::d4_with_triality();
        let c = cartan(&q, &a).unwrap();
        assert_eq!(c.reps, vec!["c".to_string(), "o1".to_string()]);
        assert_eq!(c.entries, vec![vec![2, -3], vec![-1, 2]]);
    }
}
