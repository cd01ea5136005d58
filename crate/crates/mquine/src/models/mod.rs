//! Embedding storage, score functions, and analytic gradients.
//!
//! All six model kinds share one flat parameter layout (entity blocks in id
//! order, then relation blocks in id order) so that the optimizer, the
//! checkpoint format, and sparse updates are model-agnostic. Matrix-valued
//! entities are stored as the free lower-triangular half of E = A + Aᵀ;
//! symmetry lives in the storage, not in a projection step.

pub mod baselines;
mod checkpoint;
pub mod mquine;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use mquine::RelationEmbedding;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Hard cap on the number of Z-samples per positive.
pub const MAX_Z_SAMPLES: usize = 1024;

/// Training hyperparameters. Field names follow the conventional symbols:
/// `d` embedding dimension, `gamma` margin, `m` negatives per positive,
/// `k` Z-samples per positive, `alpha` self-adversarial temperature,
/// `eta` learning rate, `b` batch size, and the three loss weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub d: usize,
    pub gamma: f64,
    pub m: usize,
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub b: usize,
    pub lambda_reg: f64,
    pub lambda_neg: f64,
    pub lambda_z: f64,
}

impl Default for Hyperparams {
    /// The tuned FB15k-237 configuration.
    fn default() -> Self {
        Hyperparams {
            d: 38,
            gamma: 12.0,
            m: 256,
            k: 32,
            alpha: 0.5,
            eta: 1e-3,
            b: 1024,
            lambda_reg: 0.01,
            lambda_neg: 1.0,
            lambda_z: 1.0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.m == 0 || self.b == 0 {
            return Err(Error::Config("m and b must be at least 1".into()));
        }
        if self.k > MAX_Z_SAMPLES {
            return Err(Error::Config(format!(
                "k = {} exceeds the cap of {MAX_Z_SAMPLES}",
                self.k
            )));
        }
        if !(self.gamma > 0.0) || !(self.eta > 0.0) {
            return Err(Error::Config("gamma and eta must be positive".into()));
        }
        if self.alpha < 0.0 || self.lambda_reg < 0.0 || self.lambda_neg < 0.0 || self.lambda_z < 0.0
        {
            return Err(Error::Config("weights must be nonnegative".into()));
        }
        Ok(())
    }
}

/// The free parameters of one symmetric entity matrix: the lower triangle of
/// A (diagonal included), with E = A + Aᵀ materialized on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular {
    d: usize,
    a: Vec<f64>,
}

/// Number of free parameters for a d×d symmetric entity matrix.
pub fn lower_len(d: usize) -> usize {
    d * (d + 1) / 2
}

impl LowerTriangular {
    pub fn zeros(d: usize) -> Self {
        LowerTriangular {
            d,
            a: vec![0.0; lower_len(d)],
        }
    }

    pub fn from_slice(d: usize, a: &[f64]) -> Self {
        assert_eq!(a.len(), lower_len(d));
        LowerTriangular { d, a: a.to_vec() }
    }

    /// Free parameters reproducing a given symmetric matrix exactly
    /// (a_ij = E_ij below the diagonal, a_ii = E_ii / 2).
    pub fn from_symmetric(e: &Mat) -> Self {
        assert!(e.is_symmetric(), "entity matrices must be symmetric");
        let d = e.dim();
        let mut a = Vec::with_capacity(lower_len(d));
        for i in 0..d {
            for j in 0..=i {
                a.push(if i == j { e[(i, i)] / 2.0 } else { e[(i, j)] });
            }
        }
        LowerTriangular { d, a }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    /// E = A + Aᵀ. Mirrored entries are written from the same stored value,
    /// so the output is bit-identically symmetric.
    pub fn materialize(&self) -> Mat {
        materialize_lower(self.d, &self.a)
    }
}

/// Slice-level version of [`LowerTriangular::materialize`].
pub fn materialize_lower(d: usize, a: &[f64]) -> Mat {
    debug_assert_eq!(a.len(), lower_len(d));
    let mut e = Mat::zeros(d);
    let mut idx = 0;
    for i in 0..d {
        for j in 0..=i {
            let v = a[idx];
            idx += 1;
            if i == j {
                e[(i, i)] = 2.0 * v;
            } else {
                e[(i, j)] = v;
                e[(j, i)] = v;
            }
        }
    }
    e
}

/// Chain rule from a gradient G w.r.t. the materialized matrix E (entries
/// treated as independent) onto the lower-triangular storage:
/// ∂s/∂a_ij = G_ij + G_ji for i ≥ j (the diagonal contributes 2·G_ii).
pub fn fold_symmetric_grad(g: &Mat) -> Vec<f64> {
    let d = g.dim();
    let mut out = Vec::with_capacity(lower_len(d));
    for i in 0..d {
        for j in 0..=i {
            out.push(g[(i, j)] + g[(j, i)]);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    MQuinE,
    MQuadE,
    TransE,
    RotatE,
    DistMult,
    ComplEx,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::MQuinE,
        ModelKind::MQuadE,
        ModelKind::TransE,
        ModelKind::RotatE,
        ModelKind::DistMult,
        ModelKind::ComplEx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MQuinE => "mquine",
            ModelKind::MQuadE => "mquade",
            ModelKind::TransE => "transe",
            ModelKind::RotatE => "rotate",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx => "complex",
        }
    }

    pub fn parse(s: &str) -> Result<ModelKind> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model kind {s:?}")))
    }

    /// Stable tag used in the checkpoint header.
    pub fn tag(self) -> u32 {
        match self {
            ModelKind::MQuinE => 0,
            ModelKind::MQuadE => 1,
            ModelKind::TransE => 2,
            ModelKind::RotatE => 3,
            ModelKind::DistMult => 4,
            ModelKind::ComplEx => 5,
        }
    }

    pub fn from_tag(tag: u32) -> Result<ModelKind> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == tag)
            .ok_or_else(|| Error::Checkpoint(format!("unknown model tag {tag}")))
    }

    /// Parameters per entity.
    pub fn entity_stride(self, d: usize) -> usize {
        match self {
            ModelKind::MQuinE | ModelKind::MQuadE => lower_len(d),
            ModelKind::TransE | ModelKind::DistMult => d,
            ModelKind::RotatE | ModelKind::ComplEx => 2 * d,
        }
    }

    /// Parameters per relation.
    pub fn relation_stride(self, d: usize) -> usize {
        match self {
            ModelKind::MQuinE => 3 * d * d,
            ModelKind::MQuadE => 2 * d * d,
            ModelKind::TransE | ModelKind::DistMult | ModelKind::RotatE => d,
            ModelKind::ComplEx => 2 * d,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Gradient of one triple's score in raw parameter coordinates.
#[derive(Clone, Debug)]
pub struct TripleGrad {
    pub h: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

/// All learnable parameters plus the hyperparameters they were trained with.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    pub kind: ModelKind,
    pub dim: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub entity_params: Vec<f64>,
    pub relation_params: Vec<f64>,
    pub hyper: Hyperparams,
}

impl ModelState {
    /// Initializes a model. Matrix kinds draw entity parameters from
    /// N(0, init_std²) and start every relation matrix at the identity;
    /// vector kinds draw uniformly from [−γ/d, γ/d]. Deterministic in `seed`.
    pub fn init(
        kind: ModelKind,
        n_entities: usize,
        n_relations: usize,
        hyper: Hyperparams,
        seed: u64,
        init_std: f64,
    ) -> Result<ModelState> {
        hyper.validate()?;
        let d = hyper.d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let es = kind.entity_stride(d);
        let rs = kind.relation_stride(d);
        let mut entity_params = vec![0.0; n_entities * es];
        let mut relation_params = vec![0.0; n_relations * rs];
        match kind {
            ModelKind::MQuinE | ModelKind::MQuadE => {
                let normal = Normal::new(0.0, init_std)
                    .map_err(|e| Error::Config(format!("bad init_std: {e}")))?;
                for p in &mut entity_params {
                    *p = normal.sample(&mut rng);
                }
                let eye = Mat::identity(d);
                let n_mats = rs / (d * d);
                for r in 0..n_relations {
                    for m in 0..n_mats {
                        let off = r * rs + m * d * d;
                        relation_params[off..off + d * d].copy_from_slice(eye.as_slice());
                    }
                }
            }
            _ => {
                let range = hyper.gamma / d as f64;
                for p in entity_params.iter_mut().chain(&mut relation_params) {
                    *p = rng.gen_range(-range..=range);
                }
            }
        }
        Ok(ModelState {
            kind,
            dim: d,
            n_entities,
            n_relations,
            entity_params,
            relation_params,
            hyper,
        })
    }

    pub fn entity(&self, e: u32) -> &[f64] {
        let s = self.kind.entity_stride(self.dim);
        &self.entity_params[e as usize * s..(e as usize + 1) * s]
    }

    pub fn entity_mut(&mut self, e: u32) -> &mut [f64] {
        let s = self.kind.entity_stride(self.dim);
        &mut self.entity_params[e as usize * s..(e as usize + 1) * s]
    }

    pub fn relation(&self, r: u32) -> &[f64] {
        let s = self.kind.relation_stride(self.dim);
        &self.relation_params[r as usize * s..(r as usize + 1) * s]
    }

    pub fn relation_mut(&mut self, r: u32) -> &mut [f64] {
        let s = self.kind.relation_stride(self.dim);
        &mut self.relation_params[r as usize * s..(r as usize + 1) * s]
    }

    /// Materialized symmetric entity matrix (matrix kinds only).
    pub fn entity_mat(&self, e: u32) -> Mat {
        debug_assert!(matches!(self.kind, ModelKind::MQuinE | ModelKind::MQuadE));
        materialize_lower(self.dim, self.entity(e))
    }

    /// The ⟨Rʰ, Rᵗ, Rᶜ⟩ triple for a relation (MQuinE only).
    pub fn relation_embedding(&self, r: u32) -> RelationEmbedding {
        assert_eq!(self.kind, ModelKind::MQuinE);
        let d = self.dim;
        let p = self.relation(r);
        RelationEmbedding::new(
            Mat::from_slice(d, &p[..d * d]),
            Mat::from_slice(d, &p[d * d..2 * d * d]),
            Mat::from_slice(d, &p[2 * d * d..]),
        )
    }

    /// The (R, R̂) pair for a relation (MQuadE only).
    pub fn relation_pair(&self, r: u32) -> (Mat, Mat) {
        assert_eq!(self.kind, ModelKind::MQuadE);
        let d = self.dim;
        let p = self.relation(r);
        (
            Mat::from_slice(d, &p[..d * d]),
            Mat::from_slice(d, &p[d * d..]),
        )
    }

    /// Overwrites an entity with a given symmetric matrix (matrix kinds).
    pub fn set_entity_symmetric(&mut self, e: u32, mat: &Mat) {
        let lt = LowerTriangular::from_symmetric(mat);
        self.entity_mut(e).copy_from_slice(lt.as_slice());
    }

    /// Overwrites a relation's matrix triple (MQuinE only).
    pub fn set_relation_embedding(&mut self, r: u32, rel: &RelationEmbedding) {
        assert_eq!(self.kind, ModelKind::MQuinE);
        let d = self.dim;
        let p = self.relation_mut(r);
        p[..d * d].copy_from_slice(rel.rh.as_slice());
        p[d * d..2 * d * d].copy_from_slice(rel.rt.as_slice());
        p[2 * d * d..].copy_from_slice(rel.rc.as_slice());
    }

    /// Score of one triple under the current parameters. Lower is more
    /// plausible for every kind.
    pub fn score(&self, h: u32, r: u32, t: u32) -> f64 {
        match self.kind {
            ModelKind::MQuinE => mquine::score(
                &self.entity_mat(h),
                &self.relation_embedding(r),
                &self.entity_mat(t),
            ),
            ModelKind::MQuadE => {
                let (rm, rhat) = self.relation_pair(r);
                baselines::mquade_score(&self.entity_mat(h), &rm, &rhat, &self.entity_mat(t))
            }
            ModelKind::TransE => baselines::transe_score(self.entity(h), self.relation(r), self.entity(t)),
            ModelKind::RotatE => baselines::rotate_score(self.entity(h), self.relation(r), self.entity(t)),
            ModelKind::DistMult => {
                baselines::distmult_score(self.entity(h), self.relation(r), self.entity(t))
            }
            ModelKind::ComplEx => {
                baselines::complex_score(self.entity(h), self.relation(r), self.entity(t))
            }
        }
    }

    /// Score plus the gradient in raw parameter coordinates. When h == t the
    /// two entity gradients are reported separately; accumulation adds them.
    pub fn score_and_grad(&self, h: u32, r: u32, t: u32) -> (f64, TripleGrad) {
        match self.kind {
            ModelKind::MQuinE => {
                let (s, g) = mquine::score_and_grad(
                    &self.entity_mat(h),
                    &self.relation_embedding(r),
                    &self.entity_mat(t),
                );
                let mut rg = Vec::with_capacity(3 * self.dim * self.dim);
                rg.extend_from_slice(g.rh.as_slice());
                rg.extend_from_slice(g.rt.as_slice());
                rg.extend_from_slice(g.rc.as_slice());
                (
                    s,
                    TripleGrad {
                        h: fold_symmetric_grad(&g.h),
                        r: rg,
                        t: fold_symmetric_grad(&g.t),
                    },
                )
            }
            ModelKind::MQuadE => {
                let (rm, rhat) = self.relation_pair(r);
                let (s, gh, gr, grhat, gt) =
                    baselines::mquade_grad(&self.entity_mat(h), &rm, &rhat, &self.entity_mat(t));
                let mut rg = Vec::with_capacity(2 * self.dim * self.dim);
                rg.extend_from_slice(gr.as_slice());
                rg.extend_from_slice(grhat.as_slice());
                (
                    s,
                    TripleGrad {
                        h: fold_symmetric_grad(&gh),
                        r: rg,
                        t: fold_symmetric_grad(&gt),
                    },
                )
            }
            ModelKind::TransE => {
                let s = baselines::transe_score(self.entity(h), self.relation(r), self.entity(t));
                let (gh, gr, gt) =
                    baselines::transe_grad(self.entity(h), self.relation(r), self.entity(t));
                (s, TripleGrad { h: gh, r: gr, t: gt })
            }
            ModelKind::RotatE => {
                let s = baselines::rotate_score(self.entity(h), self.relation(r), self.entity(t));
                let (gh, gr, gt) =
                    baselines::rotate_grad(self.entity(h), self.relation(r), self.entity(t));
                (s, TripleGrad { h: gh, r: gr, t: gt })
            }
            ModelKind::DistMult => {
                let s = baselines::distmult_score(self.entity(h), self.relation(r), self.entity(t));
                let (gh, gr, gt) =
                    baselines::distmult_grad(self.entity(h), self.relation(r), self.entity(t));
                (s, TripleGrad { h: gh, r: gr, t: gt })
            }
            ModelKind::ComplEx => {
                let s = baselines::complex_score(self.entity(h), self.relation(r), self.entity(t));
                let (gh, gr, gt) =
                    baselines::complex_grad(self.entity(h), self.relation(r), self.entity(t));
                (s, TripleGrad { h: gh, r: gr, t: gt })
            }
        }
    }

    /// Scores of (h, r, t′) for every entity t′. Matrix kinds precompute the
    /// per-query factors so each candidate costs a single d×d×d product.
    pub fn score_all_tails(&self, h: u32, r: u32) -> Vec<f64> {
        let n = self.n_entities;
        match self.kind {
            ModelKind::MQuinE => {
                let (l, m) = mquine::tail_query(&self.entity_mat(h), &self.relation_embedding(r));
                (0..n as u32)
                    .map(|t| mquine::score_tail_factored(&l, &m, &self.entity_mat(t)))
                    .collect()
            }
            ModelKind::MQuadE => {
                let (rm, rhat) = self.relation_pair(r);
                let l = self.entity_mat(h).mul(&rm);
                (0..n as u32)
                    .map(|t| Mat::mul_minus_frob_sq(&rhat, &self.entity_mat(t), &l).sqrt())
                    .collect()
            }
            ModelKind::TransE => {
                let q: Vec<f64> = self
                    .entity(h)
                    .iter()
                    .zip(self.relation(r))
                    .map(|(a, b)| a + b)
                    .collect();
                (0..n as u32)
                    .map(|t| {
                        q.iter()
                            .zip(self.entity(t))
                            .map(|(q, t)| (q - t) * (q - t))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect()
            }
            ModelKind::RotatE => {
                let d = self.dim;
                let he = self.entity(h);
                let ph = self.relation(r);
                let mut q = vec![0.0; 2 * d];
                for j in 0..d {
                    let (c, s) = (ph[j].cos(), ph[j].sin());
                    q[j] = he[j] * c - he[d + j] * s;
                    q[d + j] = he[j] * s + he[d + j] * c;
                }
                (0..n as u32)
                    .map(|t| {
                        q.iter()
                            .zip(self.entity(t))
                            .map(|(q, t)| (q - t) * (q - t))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect()
            }
            ModelKind::DistMult => {
                let w: Vec<f64> = self
                    .entity(h)
                    .iter()
                    .zip(self.relation(r))
                    .map(|(a, b)| a * b)
                    .collect();
                (0..n as u32)
                    .map(|t| -w.iter().zip(self.entity(t)).map(|(w, t)| w * t).sum::<f64>())
                    .collect()
            }
            ModelKind::ComplEx => {
                let d = self.dim;
                let he = self.entity(h);
                let re = self.relation(r);
                let mut w = vec![0.0; 2 * d];
                for j in 0..d {
                    w[j] = he[j] * re[j] - he[d + j] * re[d + j];
                    w[d + j] = he[j] * re[d + j] + he[d + j] * re[j];
                }
                (0..n as u32)
                    .map(|t| {
                        let te = self.entity(t);
                        -(0..d).map(|j| w[j] * te[j] + w[d + j] * te[d + j]).sum::<f64>()
                    })
                    .collect()
            }
        }
    }

    /// Scores of (h′, r, t) for every entity h′.
    pub fn score_all_heads(&self, r: u32, t: u32) -> Vec<f64> {
        let n = self.n_entities;
        match self.kind {
            ModelKind::MQuinE => {
                let (p, q) = mquine::head_query(&self.relation_embedding(r), &self.entity_mat(t));
                (0..n as u32)
                    .map(|h| mquine::score_head_factored(&self.entity_mat(h), &p, &q))
                    .collect()
            }
            ModelKind::MQuadE => {
                let (rm, rhat) = self.relation_pair(r);
                let q = rhat.mul(&self.entity_mat(t));
                (0..n as u32)
                    .map(|h| Mat::mul_minus_frob_sq(&self.entity_mat(h), &rm, &q).sqrt())
                    .collect()
            }
            ModelKind::TransE => {
                let w: Vec<f64> = self
                    .entity(t)
                    .iter()
                    .zip(self.relation(r))
                    .map(|(t, r)| t - r)
                    .collect();
                (0..n as u32)
                    .map(|h| {
                        w.iter()
                            .zip(self.entity(h))
                            .map(|(w, h)| (h - w) * (h - w))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect()
            }
            ModelKind::RotatE => (0..n as u32)
                .map(|h| baselines::rotate_score(self.entity(h), self.relation(r), self.entity(t)))
                .collect(),
            ModelKind::DistMult => {
                let w: Vec<f64> = self
                    .relation(r)
                    .iter()
                    .zip(self.entity(t))
                    .map(|(r, t)| r * t)
                    .collect();
                (0..n as u32)
                    .map(|h| -w.iter().zip(self.entity(h)).map(|(w, h)| w * h).sum::<f64>())
                    .collect()
            }
            ModelKind::ComplEx => {
                let d = self.dim;
                let re = self.relation(r);
                let te = self.entity(t);
                // w = r · conj(t); Re(h·w) = h_re·w_re − h_im·w_im.
                let mut w = vec![0.0; 2 * d];
                for j in 0..d {
                    w[j] = re[j] * te[j] + re[d + j] * te[d + j];
                    w[d + j] = re[d + j] * te[j] - re[j] * te[d + j];
                }
                (0..n as u32)
                    .map(|h| {
                        let he = self.entity(h);
                        -(0..d).map(|j| he[j] * w[j] - he[d + j] * w[d + j]).sum::<f64>()
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materialize_contracts() {
        let z = LowerTriangular::zeros(3);
        assert_eq!(z.materialize(), Mat::zeros(3));

        // Single sub-diagonal entry mirrors into both off-diagonal slots.
        let mut a = LowerTriangular::zeros(2);
        let mut vals = a.as_slice().to_vec();
        vals[1] = 1.0; // a_10
        a = LowerTriangular::from_slice(2, &vals);
        let e = a.materialize();
        assert_eq!(e[(1, 0)], 1.0);
        assert_eq!(e[(0, 1)], 1.0);
        assert_eq!(e[(0, 0)], 0.0);
        assert_eq!(e[(1, 1)], 0.0);

        // Lower triangle of I doubles on the diagonal.
        let eye_lower =
            LowerTriangular::from_slice(3, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert_eq!(eye_lower.materialize(), Mat::identity(3).scale(2.0));
    }

    #[test]
    fn materialized_matrix_is_exactly_symmetric() {
        let a = LowerTriangular::from_slice(3, &[0.3, -1.7, 2.2, 0.9, 5.5, -0.01]);
        let e = a.materialize();
        assert!(e.is_symmetric());
        // from_symmetric is the exact inverse.
        assert_eq!(LowerTriangular::from_symmetric(&e).as_slice(), a.as_slice());
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let hyper = Hyperparams {
            d: 4,
            ..Hyperparams::default()
        };
        for kind in ModelKind::ALL {
            let a = ModelState::init(kind, 7, 3, hyper, 42, 0.1).unwrap();
            let b = ModelState::init(kind, 7, 3, hyper, 42, 0.1).unwrap();
            assert_eq!(a, b, "{kind} init not deterministic");
            let c = ModelState::init(kind, 7, 3, hyper, 43, 0.1).unwrap();
            assert_ne!(a.entity_params, c.entity_params, "{kind} ignores the seed");
        }
    }

    #[test]
    fn init_rejects_zero_dim() {
        let hyper = Hyperparams {
            d: 0,
            ..Hyperparams::default()
        };
        assert!(ModelState::init(ModelKind::MQuinE, 2, 1, hyper, 0, 0.1).is_err());
    }

    #[test]
    fn mquine_init_scores_with_identity_relations() {
        // At initialization every relation is the identity triple, so the
        // score reduces to ‖H − T + H·T‖²_F.
        let hyper = Hyperparams {
            d: 3,
            ..Hyperparams::default()
        };
        let state = ModelState::init(ModelKind::MQuinE, 4, 2, hyper, 9, 0.1).unwrap();
        let h = state.entity_mat(0);
        let t = state.entity_mat(2);
        let expect = h.sub(&t).add(&h.mul(&t)).frob_sq();
        assert!((state.score(0, 1, 2) - expect).abs() < 1e-14);
    }

    #[test]
    fn paired_entities_score_symmetrically_at_init() {
        let hyper = Hyperparams {
            d: 3,
            ..Hyperparams::default()
        };
        let mut state = ModelState::init(ModelKind::MQuinE, 2, 1, hyper, 5, 0.1).unwrap();
        let block = state.entity(0).to_vec();
        state.entity_mut(1).copy_from_slice(&block);
        assert_eq!(state.score(0, 0, 1), state.score(1, 0, 0));
        assert_eq!(state.score(0, 0, 0), state.score(1, 0, 1));
    }

    #[test]
    fn fast_paths_match_pointwise_scores() {
        for kind in ModelKind::ALL {
            let hyper = Hyperparams {
                d: 3,
                gamma: 4.0,
                ..Hyperparams::default()
            };
            let state = ModelState::init(kind, 6, 2, hyper, 11, 0.3).unwrap();
            // Perturb relations away from identity so matrix kinds are nontrivial.
            let mut state = state;
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for p in &mut state.relation_params {
                *p += rng.gen_range(-0.5..0.5);
            }
            for (h, r, t) in [(0u32, 0u32, 1u32), (2, 1, 3), (4, 0, 4)] {
                let tails = state.score_all_tails(h, r);
                let heads = state.score_all_heads(r, t);
                let direct = state.score(h, r, t);
                assert!(
                    (tails[t as usize] - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                    "{kind}: tail fast path diverges"
                );
                assert!(
                    (heads[h as usize] - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                    "{kind}: head fast path diverges"
                );
            }
        }
    }
}
