//! Two-row Slodowy slices: the base sl2-triple (E0, H0, F0), slice and
//! orbit-closure membership, the bilinear forms on the ambient 2n-space,
//! and the involution given by negative transpose with respect to them.
//!
//! The ambient space is organized as k copies of the line W_k followed by
//! 2n-k copies of the line W_{2n-k} (case k < n), or n copies of the plane
//! W_n in its fixed sigma-eigenbasis (case k = n). Every matrix in this
//! module is written in that basis order, as is the output of the recursion
//! in [`crate::maffei`].

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, commutator};
use crate::partition::{Partition, dominance_leq, jordan_type_nilpotent};
use crate::scalar::Scalar;
use crate::Mat;

/// Which two-row slice: k < n with one-dimensional W's at k and 2n-k, or
/// k = n with the two-dimensional middle W and a chosen involution signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub n: usize,
    pub k: usize,
    /// Signature (w_plus, w_minus) of the middle involution; required and
    /// summing to 2 exactly when k = n.
    pub signature: Option<(usize, usize)>,
}

impl SliceSpec {
    pub fn new(n: usize, k: usize, signature: Option<(usize, usize)>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        match (k == n, signature) {
            (true, Some((p, m))) if p + m == 2 => {}
            (true, _) => {
                return Err(Error::Invalid(
                    "k = n requires a signature (w+, w-) with w+ + w- = 2".into(),
                ))
            }
            (false, None) => {}
            (false, Some(_)) => {
                return Err(Error::Invalid("k < n does not take a signature".into()))
            }
        }
        Ok(SliceSpec { n, k, signature })
    }

    pub fn is_middle(&self) -> bool {
        self.k == self.n
    }

    /// Dimension of the ambient space sl acts on.
    pub fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    /// The middle involution as a diagonal matrix in its own eigenbasis.
    pub fn sigma_matrix(&self) -> Option<Mat> {
        self.signature.map(|(p, m)| {
            Matrix::from_fn(2, 2, |i, j| {
                if i != j {
                    Scalar::zero()
                } else if i < p {
                    Scalar::one()
                } else {
                    debug_assert!(i < p + m);
                    Scalar::from_int(-1)
                }
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sl2Triple {
    pub e: Mat,
    pub h: Mat,
    pub f: Mat,
}

impl Sl2Triple {
    /// [H,E] = 2E, [H,F] = -2F, [E,F] = H, exactly.
    pub fn check_relations(&self) -> bool {
        commutator(&self.h, &self.e) == self.e.scale(&Scalar::from_int(2))
            && commutator(&self.h, &self.f) == self.f.scale(&Scalar::from_int(-2))
            && commutator(&self.e, &self.f) == self.h
    }
}

/// The m x m shift matrix E^[m] with ones on the superdiagonal.
pub fn shift_e(m: usize) -> Mat {
    Matrix::from_fn(m, m, |i, j| if j == i + 1 { Scalar::one() } else { Scalar::zero() })
}

/// H^[m] = diag(m-1, m-3, ..., -(m-1)).
pub fn shift_h(m: usize) -> Mat {
    Matrix::from_fn(m, m, |i, j| {
        if i == j {
            Scalar::from_int(m as i64 - 1 - 2 * i as i64)
        } else {
            Scalar::zero()
        }
    })
}

/// F^[m] with subdiagonal entries i(m-i), i = 1..m-1.
pub fn shift_f(m: usize) -> Mat {
    Matrix::from_fn(m, m, |i, j| {
        if i == j + 1 {
            let r = (i as i64) * (m as i64 - i as i64);
            Scalar::from_int(r)
        } else {
            Scalar::zero()
        }
    })
}

/// The base triple (E0, H0, F0) of the slice, in the fixed basis order.
pub fn build_triple(spec: &SliceSpec) -> Sl2Triple {
    let (n, k) = (spec.n, spec.k);
    if spec.is_middle() {
        // n blocks of the 2-dimensional middle space: X^[n] tensor id_2.
        let id2: Mat = Matrix::identity(2);
        Sl2Triple {
            e: shift_e(n).kron(&id2),
            h: shift_h(n).kron(&id2),
            f: shift_f(n).kron(&id2),
        }
    } else {
        let blk = |a: Mat, b: Mat| {
            let mut m = Matrix::zeros(2 * n, 2 * n);
            m.set_block(0, 0, &a);
            m.set_block(k, k, &b);
            m
        };
        Sl2Triple {
            e: blk(shift_e(k), shift_e(2 * n - k)),
            h: blk(shift_h(k), shift_h(2 * n - k)),
            f: blk(shift_f(k), shift_f(2 * n - k)),
        }
    }
}

/// Slice membership: trace zero (precondition), [X - E0, F0] = 0, and X
/// nilpotent. All checks exact.
pub fn in_slice(spec: &SliceSpec, x: &Mat) -> Result<bool> {
    let d = spec.ambient_dim();
    if x.rows != d || x.cols != d {
        return Err(Error::Dim(format!("slice element must be {d}x{d}")));
    }
    if !x.trace().is_zero() {
        return Err(Error::Invalid("slice element must be traceless".into()));
    }
    let t = build_triple(spec);
    if !commutator(&(x - &t.e), &t.f).is_zero_matrix() {
        return Ok(false);
    }
    Ok(x.pow(d).is_zero_matrix())
}

/// X lies in the closure of the nilpotent orbit with Jordan type lambda iff
/// the Jordan type of X is dominated by lambda.
pub fn in_orbit_closure(x: &Mat, lambda: &Partition) -> Result<bool> {
    let jt = jordan_type_nilpotent(x)?;
    dominance_leq(&jt, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    Symmetric,
    Skew,
}

/// Nondegenerate bilinear form on the ambient space, as a Gram matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearForm {
    pub gram: Mat,
    pub kind: FormKind,
}

/// Gram matrix of the pairing on the 2-dimensional middle space:
/// (w, y) = <w, sigma y> with <.,.> the standard skew form (0 1; -1 0).
pub fn middle_pairing_gram(spec: &SliceSpec) -> Option<Mat> {
    let sigma = spec.sigma_matrix()?;
    let j = Matrix::new(
        2,
        2,
        vec![Scalar::zero(), Scalar::one(), Scalar::from_int(-1), Scalar::zero()],
    )
    .unwrap();
    Some(&j * &sigma)
}

/// Builds the bilinear form of the slice and classifies its symmetry type.
pub fn build_form(spec: &SliceSpec) -> BilinearForm {
    let (n, k) = (spec.n, spec.k);
    let gram = if spec.is_middle() {
        // Blocks (i, n+1-i) = (-1)^{i-1} * middle Gram.
        let g2 = middle_pairing_gram(spec).expect("middle case has a signature");
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for i in 1..=n {
            let sign = if (i - 1) % 2 == 0 { 1 } else { -1 };
            m.set_block(2 * (i - 1), 2 * (n - i), &g2.scale(&Scalar::from_int(sign)));
        }
        m
    } else {
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for i in 1..=k {
            let sign = if (i - 1) % 2 == 0 { 1 } else { -1 };
            m[(i - 1, k - i)] = Scalar::from_int(sign);
        }
        for i in 1..=(2 * n - k) {
            let sign = if (n - k + i) % 2 == 0 { 1 } else { -1 };
            m[(k + i - 1, k + (2 * n - k - i))] = Scalar::from_int(sign);
        }
        m
    };
    let kind = if gram.transpose() == gram {
        FormKind::Symmetric
    } else {
        debug_assert_eq!(gram.transpose(), -&gram, "form is neither symmetric nor skew");
        FormKind::Skew
    };
    debug_assert!(gram.is_invertible());
    BilinearForm { gram, kind }
}

/// The expected symmetry type from the case analysis: skew iff (k < n and k
/// even) or (k = n even with signature (1,1)) or (k = n odd with signature
/// (2,0) or (0,2)).
pub fn expected_form_kind(spec: &SliceSpec) -> FormKind {
    let skew = if spec.is_middle() {
        let (p, m) = spec.signature.unwrap();
        let mixed = p == 1 && m == 1;
        (spec.n % 2 == 0 && mixed) || (spec.n % 2 == 1 && !mixed)
    } else {
        spec.k % 2 == 0
    };
    if skew {
        FormKind::Skew
    } else {
        FormKind::Symmetric
    }
}

/// Negative transpose with respect to the form: Theta(X) = -J^{-1} X^T J,
/// the unique map with (Xw, y) + (w, Theta(X)y) = 0.
pub fn theta_big(form: &BilinearForm, x: &Mat) -> Mat {
    let j_inv = form.gram.inverse().expect("Gram matrix is invertible");
    -&(&(&j_inv * &x.transpose()) * &form.gram)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonemptyReport {
    pub s: Vec<i64>,
    pub ell: usize,
    pub nonempty: bool,
}

/// Nonemptiness of the type-A ADHM space with the slice's framing: the
/// successive differences s_i must lie in {-1, 0, 1} and at most k of them
/// may be nonzero. `v` is the full symmetric dimension vector of length 2n-1.
pub fn nonempty_type_a(n: usize, k: usize, v: &[usize]) -> Result<NonemptyReport> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if v.len() != 2 * n - 1 {
        return Err(Error::Dim(format!("v must have {} entries", 2 * n - 1)));
    }
    for i in 0..v.len() {
        if v[i] != v[2 * n - 2 - i] {
            return Err(Error::Invalid("v is not symmetric".into()));
        }
    }
    let vi = |i: usize| v[i - 1] as i64; // 1-based
    let mut s = Vec::with_capacity(n);
    for i in 1..=n {
        let si = if i == 1 {
            1 - vi(1)
        } else if i <= k {
            1 - vi(i) + vi(i - 1)
        } else {
            -vi(i) + vi(i - 1)
        };
        s.push(si);
    }
    let ell = s.iter().filter(|&&x| x != 0).count();
    let nonempty = s.iter().all(|&x| (-1..=1).contains(&x)) && ell <= k;
    Ok(NonemptyReport { s, ell, nonempty })
}

/// Jordan-type bound (2n - ell, ell) for the orbit closure met by the slice.
pub fn closure_bound(n: usize, ell: usize) -> Partition {
    Partition::new(vec![2 * n - ell, ell]).expect("2n - ell >= ell")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{SplitMix64, random_matrix};

    fn all_specs(max_n: usize) -> Vec<SliceSpec> {
        let mut out = Vec::new();
        for n in 1..=max_n {
            for k in 1..n {
                out.push(SliceSpec::new(n, k, None).unwrap());
            }
            for sig in [(1, 1), (2, 0), (0, 2)] {
                out.push(SliceSpec::new(n, n, Some(sig)).unwrap());
            }
        }
        out
    }

    #[test]
    fn sl2_relations_hold_for_all_specs() {
        for spec in all_specs(6) {
            let t = build_triple(&spec);
            assert!(t.check_relations(), "sl2 relations failed for {spec:?}");
        }
    }

    #[test]
    fn f_subdiagonal_values() {
        // F^[3] has subdiagonal (2, 2): the numbers i(m-i) for m = 3.
        let f = shift_f(3);
        assert_eq!(f[(1, 0)], Scalar::from_int(2));
        assert_eq!(f[(2, 1)], Scalar::from_int(2));
    }

    #[test]
    fn base_point_jordan_types() {
        // k=2, n=3: E0 = E^[2] + E^[4] has Jordan type (4, 2).
        let spec = SliceSpec::new(3, 2, None).unwrap();
        let t = build_triple(&spec);
        let jt = jordan_type_nilpotent(&t.e).unwrap();
        assert_eq!(jt.parts(), &[4, 2]);
        for spec in all_specs(5) {
            let t = build_triple(&spec);
            let jt = jordan_type_nilpotent(&t.e).unwrap();
            assert_eq!(jt.parts(), &[2 * spec.n - spec.k, spec.k]);
        }
    }

    #[test]
    fn slice_membership_examples() {
        let spec = SliceSpec::new(3, 2, None).unwrap();
        let t = build_triple(&spec);
        assert!(in_slice(&spec, &t.e).unwrap());
        // E0 + F0 commutes with F0 against E0 shift but is not nilpotent.
        let x = &t.e + &t.f;
        assert!(!in_slice(&spec, &x).unwrap());
        // H0 is traceless but [H0 - E0, F0] != 0.
        assert!(!in_slice(&spec, &t.h).unwrap());
        // Non-traceless input is an error.
        assert!(in_slice(&spec, &Matrix::identity(6)).is_err());
    }

    #[test]
    fn orbit_closure_examples() {
        let spec = SliceSpec::new(3, 2, None).unwrap();
        let t = build_triple(&spec);
        // E0 of type (4,2) lies in the closure of (2n - ell, ell) iff ell <= k.
        assert!(in_orbit_closure(&t.e, &closure_bound(3, 2)).unwrap());
        assert!(in_orbit_closure(&t.e, &closure_bound(3, 1)).unwrap());
        assert!(in_orbit_closure(&t.e, &closure_bound(3, 0)).unwrap());
        let zero: Mat = Matrix::zeros(6, 6);
        assert!(in_orbit_closure(&zero, &closure_bound(3, 0)).unwrap());
        // A regular nilpotent is not in the closure of (n, n).
        let reg = shift_e(6);
        assert!(!in_orbit_closure(&reg, &Partition::new(vec![3, 3]).unwrap()).unwrap());
    }

    #[test]
    fn form_kinds_match_case_table() {
        for spec in all_specs(6) {
            let form = build_form(&spec);
            assert_eq!(form.kind, expected_form_kind(&spec), "wrong kind for {spec:?}");
            assert!(form.gram.is_invertible());
        }
        // Spot checks against the case analysis.
        assert_eq!(build_form(&SliceSpec::new(3, 2, None).unwrap()).kind, FormKind::Skew);
        assert_eq!(
            build_form(&SliceSpec::new(3, 3, Some((1, 1))).unwrap()).kind,
            FormKind::Symmetric
        );
        assert_eq!(
            build_form(&SliceSpec::new(2, 2, Some((2, 0))).unwrap()).kind,
            FormKind::Symmetric
        );
        assert_eq!(
            build_form(&SliceSpec::new(2, 2, Some((1, 1))).unwrap()).kind,
            FormKind::Skew
        );
    }

    #[test]
    fn theta_fixes_the_triple_and_is_an_involution() {
        for spec in all_specs(5) {
            let t = build_triple(&spec);
            let form = build_form(&spec);
            assert_eq!(theta_big(&form, &t.e), t.e, "Theta(E0) != E0 for {spec:?}");
            assert_eq!(theta_big(&form, &t.h), t.h);
            assert_eq!(theta_big(&form, &t.f), t.f);
        }
        let spec = SliceSpec::new(3, 1, None).unwrap();
        let form = build_form(&spec);
        let mut rng = SplitMix64::new(2);
        for _ in 0..5 {
            let x = random_matrix(&mut rng, 6, 6, 3, 1);
            let y = random_matrix(&mut rng, 6, 6, 3, 1);
            assert_eq!(theta_big(&form, &theta_big(&form, &x)), x);
            // Theta is a Lie algebra homomorphism: Theta[X,Y] = [Theta X, Theta Y].
            assert_eq!(
                theta_big(&form, &commutator(&x, &y)),
                commutator(&theta_big(&form, &x), &theta_big(&form, &y))
            );
        }
    }

    #[test]
    fn theta_defining_identity() {
        // (Xw, y) + (w, Theta(X) y) = 0 as a matrix identity:
        // X^T J + J Theta(X) = 0.
        for spec in all_specs(4) {
            let form = build_form(&spec);
            let mut rng = SplitMix64::new(7);
            let x = random_matrix(&mut rng, form.gram.rows, form.gram.cols, 2, 1);
            let lhs = &(&x.transpose() * &form.gram) + &(&form.gram * &theta_big(&form, &x));
            assert!(lhs.is_zero_matrix());
        }
    }

    #[test]
    fn theta_preserves_slice_and_jordan_type() {
        let spec = SliceSpec::new(2, 2, Some((1, 1))).unwrap();
        let t = build_triple(&spec);
        let form = build_form(&spec);
        // Elements of the slice's commutator locus: E0 plus the centralizer
        // of F0, obtained exactly as the kernel of ad(F0).
        let d = 4;
        let mut vars = crate::linsys::VarTable::new();
        let xb = vars.alloc(d, d);
        let mut eqs = crate::linsys::EquationSet::new();
        let xm = crate::linsys::LinMat::from_var(xb);
        let lhs = crate::linsys::LinMat::mul_const_right(&xm, &t.f)
            .sub(&crate::linsys::LinMat::mul_const_left(&t.f, &xm));
        eqs.require_zero(&lhs);
        let sol = eqs.solve(vars.n_vars()).unwrap();
        let kernel = match sol {
            crate::matrix::AffineSolutionSet::Solutions { kernel, .. } => kernel,
            _ => panic!(),
        };
        let mut rng = SplitMix64::new(13);
        for _ in 0..5 {
            let mut x = t.e.clone();
            for kvec in &kernel {
                let c = Scalar::from_int(rng.int_in(-2, 2));
                let km = Matrix::from_fn(d, d, |i, j| kvec.entries[i * d + j].clone());
                x = &x + &km.scale(&c);
            }
            // x satisfies the commutator part of the slice condition.
            assert!(commutator(&(&x - &t.e), &t.f).is_zero_matrix());
            let tx = theta_big(&form, &x);
            assert!(
                commutator(&(&tx - &t.e), &t.f).is_zero_matrix(),
                "Theta left the slice's commutator locus"
            );
        }
        // Jordan type preserved on nilpotent elements.
        let mut rng = SplitMix64::new(17);
        for _ in 0..5 {
            let upper = Matrix::from_fn(4, 4, |i, j| {
                if j > i {
                    Scalar::from_int(rng.int_in(-2, 2))
                } else {
                    Scalar::zero()
                }
            });
            let jt = jordan_type_nilpotent(&upper).unwrap();
            let jt2 = jordan_type_nilpotent(&theta_big(&form, &upper)).unwrap();
            assert_eq!(jt, jt2);
        }
    }

    #[test]
    fn nonempty_examples() {
        // n=k=2, v=(1,2,1): s=(0,0), ell=0, nonempty.
        let r = nonempty_type_a(2, 2, &[1, 2, 1]).unwrap();
        assert_eq!(r.s, vec![0, 0]);
        assert_eq!(r.ell, 0);
        assert!(r.nonempty);
        // n=2, k=1, v=(1,1,1): s=(0,0), nonempty.
        let r = nonempty_type_a(2, 1, &[1, 1, 1]).unwrap();
        assert_eq!(r.s, vec![0, 0]);
        assert!(r.nonempty);
        // n=k=2, v=(3,0,3): s1 = -2, empty.
        let r = nonempty_type_a(2, 2, &[3, 0, 3]).unwrap();
        assert_eq!(r.s[0], -2);
        assert!(!r.nonempty);
        // Asymmetric v is rejected.
        assert!(nonempty_type_a(2, 2, &[1, 2, 2]).is_err());
    }
}
