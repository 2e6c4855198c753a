//! File-facing JSON schemas and their conversions to the in-memory types.
//!
//! Scalars serialize as "p/q" strings (cyclotomic elements as coefficient
//! arrays with their field order), matrices as {rows, cols, entries}
//! row-major, quivers and automorphisms with their literal fields. ADHM
//! data travels as {quiver_ref, v, w, field_order, B, Gamma, Delta}; fold
//! contexts carry the sigma matrices and the chosen eigenbasis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adhm::{AdhmDatum, GradedDims};
use crate::error::{Error, Result};
use crate::fold::FoldContext;
use crate::matrix::Matrix;
use crate::quiver::{AdmAut, Quiver};
use crate::Mat;

/// On-disk form of an ADHM datum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdhmFile {
    /// Free-form label of the quiver the datum lives on.
    pub quiver_ref: String,
    pub v: BTreeMap<String, usize>,
    pub w: BTreeMap<String, usize>,
    pub field_order: u32,
    #[serde(rename = "B")]
    pub b: BTreeMap<String, Mat>,
    #[serde(rename = "Gamma")]
    pub gamma: BTreeMap<String, Mat>,
    #[serde(rename = "Delta")]
    pub delta: BTreeMap<String, Mat>,
}

impl AdhmFile {
    pub fn from_datum(x: &AdhmDatum, quiver_ref: &str) -> Self {
        AdhmFile {
            quiver_ref: quiver_ref.to_string(),
            v: x.dims.v.clone(),
            w: x.dims.w.clone(),
            field_order: x.field_order,
            b: x.b.clone(),
            gamma: x.gamma.clone(),
            delta: x.delta.clone(),
        }
    }

    /// Validates the file against a quiver and produces the datum.
    pub fn into_datum(self, q: &Quiver) -> Result<AdhmDatum> {
        let dims = GradedDims { v: self.v, w: self.w };
        for i in &q.vertices {
            if !dims.v.contains_key(i) || !dims.w.contains_key(i) {
                return Err(Error::Invalid(format!("missing dimensions at vertex {i:?}")));
            }
        }
        let mut x = AdhmDatum {
            dims,
            b: self.b,
            gamma: self.gamma,
            delta: self.delta,
            field_order: self.field_order,
        };
        // Allow omitted maps: fill with zeros of the right shape.
        for a in &q.arrows {
            x.b.entry(a.id.clone()).or_insert_with(|| {
                Matrix::zeros(x.dims.v_of(&a.tgt), x.dims.v_of(&a.src))
            });
        }
        for i in &q.vertices {
            let (vi, wi) = (x.dims.v_of(i), x.dims.w_of(i));
            x.gamma.entry(i.clone()).or_insert_with(|| Matrix::zeros(vi, wi));
            x.delta.entry(i.clone()).or_insert_with(|| Matrix::zeros(wi, vi));
        }
        x.check_shapes(q)?;
        Ok(x)
    }
}

/// On-disk form of a fold context. The eigenbasis is emitted for the
/// record; when present on input it must agree with the recomputed one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldContextFile {
    pub quiver: Quiver,
    pub aut: AdmAut,
    pub v: BTreeMap<String, usize>,
    pub w: BTreeMap<String, usize>,
    pub field_order: u32,
    pub phi: BTreeMap<String, Mat>,
    pub sigma: BTreeMap<String, Mat>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub eigenbasis: BTreeMap<String, Mat>,
}

impl FoldContextFile {
    pub fn from_context(ctx: &FoldContext) -> Self {
        FoldContextFile {
            quiver: ctx.quiver.clone(),
            aut: ctx.aut.clone(),
            v: ctx.dims.v.clone(),
            w: ctx.dims.w.clone(),
            field_order: ctx.field_order,
            phi: ctx.phi.clone(),
            sigma: ctx.sigma.clone(),
            eigenbasis: ctx.w_eigen.iter().map(|(k, s)| (k.clone(), s.basis.clone())).collect(),
        }
    }

    pub fn into_context(self) -> Result<FoldContext> {
        let dims = GradedDims { v: self.v, w: self.w };
        let ctx = FoldContext::new(self.quiver, self.aut, dims, self.phi, self.sigma, self.field_order)?;
        for (rep, basis) in &self.eigenbasis {
            let split = ctx
                .w_eigen
                .get(rep)
                .ok_or_else(|| Error::Invalid(format!("eigenbasis given for non-representative {rep:?}")))?;
            if &split.basis != basis {
                return Err(Error::Invalid(format!(
                    "stored eigenbasis at {rep:?} does not match the canonical one"
                )));
            }
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adhm::{SampleOptions, sample_point};
    use crate::fixtures;

    #[test]
    fn adhm_file_round_trip() {
        let q = fixtures::type_a_quiver(2);
        let dims = GradedDims::new(&q, &[1, 2, 1], &[0, 2, 0]).unwrap();
        let x = sample_point(&q, &dims, 12, &SampleOptions::default()).unwrap();
        let file = AdhmFile::from_datum(&x, "a3");
        let json = serde_json::to_string_pretty(&file).unwrap();
        assert!(json.contains("\"quiver_ref\": \"a3\""));
        assert!(json.contains("\"B\""));
        let back: AdhmFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_datum(&q).unwrap(), x);
    }

    #[test]
    fn adhm_file_rejects_bad_shapes() {
        let q = fixtures::type_a_quiver(2);
        let dims = GradedDims::new(&q, &[1, 2, 1], &[0, 2, 0]).unwrap();
        let x = AdhmDatum::zero(&q, &dims, 1);
        let mut file = AdhmFile::from_datum(&x, "a3");
        file.b.insert("01-02".into(), Matrix::identity(3));
        assert!(file.into_datum(&q).is_err());
    }

    #[test]
    fn context_file_round_trip() {
        let ctx = fixtures::standard_fold_context(2, &[1, 2, 1], &[0, 2, 0], Some((1, 1)), 2).unwrap();
        let file = FoldContextFile::from_context(&ctx);
        let json = serde_json::to_string(&file).unwrap();
        let back: FoldContextFile = serde_json::from_str(&json).unwrap();
        let ctx2 = back.into_context().unwrap();
        assert_eq!(ctx2.dims, ctx.dims);
        assert_eq!(ctx2.w_eigen, ctx.w_eigen);
        // A tampered eigenbasis is rejected.
        let mut bad = FoldContextFile::from_context(&ctx);
        let key = bad.eigenbasis.keys().next().unwrap().clone();
        bad.eigenbasis.insert(key, Matrix::identity(99));
        assert!(bad.into_context().is_err());
    }
}
