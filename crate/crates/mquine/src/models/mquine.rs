//! The matrix-quintuple score function and its analytic gradients.
//!
//! A triple (h, r, t) is embedded as (H, ⟨Rʰ, Rᵗ, Rᶜ⟩, T) with H, T symmetric,
//! and scored by
//!
//! ```text
//!     s(h, r, t) = ‖H·Rʰ − Rᵗ·T + H·Rᶜ·T‖²_F
//! ```
//!
//! Setting Rᶜ = 0 recovers the plain matrix-quadruple score; the cross term
//! is what breaks the additive cancellation that forces translational models
//! to close every Z-pattern.

use crate::linalg::Mat;

/// The matrix triple ⟨Rʰ, Rᵗ, Rᶜ⟩ embedding one relation.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationEmbedding {
    pub rh: Mat,
    pub rt: Mat,
    pub rc: Mat,
}

impl RelationEmbedding {
    pub fn new(rh: Mat, rt: Mat, rc: Mat) -> Self {
        assert_eq!(rh.dim(), rt.dim(), "relation matrices must share a dimension");
        assert_eq!(rh.dim(), rc.dim(), "relation matrices must share a dimension");
        RelationEmbedding { rh, rt, rc }
    }

    pub fn identity(d: usize) -> Self {
        RelationEmbedding {
            rh: Mat::identity(d),
            rt: Mat::identity(d),
            rc: Mat::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.rh.dim()
    }
}

/// The difference matrix D = H·Rʰ − Rᵗ·T + H·Rᶜ·T.
pub fn difference(h: &Mat, rel: &RelationEmbedding, t: &Mat) -> Mat {
    assert_eq!(h.dim(), rel.dim(), "dimension mismatch between H and relation");
    assert_eq!(t.dim(), rel.dim(), "dimension mismatch between T and relation");
    let mut d = h.mul(&rel.rh);
    d.add_scaled(-1.0, &rel.rt.mul(t));
    d.add_scaled(1.0, &h.mul(&rel.rc).mul(t));
    d
}

/// Direct evaluation of the score, ‖D‖²_F.
pub fn score(h: &Mat, rel: &RelationEmbedding, t: &Mat) -> f64 {
    difference(h, rel, t).frob_sq()
}

/// Gradients of the score with respect to the five matrix slots. The entity
/// gradients are taken with respect to the materialized symmetric matrices;
/// callers fold them onto lower-triangular storage.
#[derive(Clone, Debug)]
pub struct GradMats {
    pub h: Mat,
    pub rh: Mat,
    pub rt: Mat,
    pub rc: Mat,
    pub t: Mat,
}

/// Score plus analytic gradients. With D as above:
///
/// ```text
///   ∂s/∂H  = 2·D·(Rʰ + Rᶜ·T)ᵀ        ∂s/∂T  = 2·(H·Rᶜ − Rᵗ)ᵀ·D
///   ∂s/∂Rʰ = 2·Hᵀ·D    ∂s/∂Rᵗ = −2·D·Tᵀ    ∂s/∂Rᶜ = 2·Hᵀ·D·Tᵀ
/// ```
pub fn score_and_grad(h: &Mat, rel: &RelationEmbedding, t: &Mat) -> (f64, GradMats) {
    let hrc = h.mul(&rel.rc);
    let mut d = h.mul(&rel.rh);
    d.add_scaled(-1.0, &rel.rt.mul(t));
    d.add_scaled(1.0, &hrc.mul(t));
    let s = d.frob_sq();

    let mut rh_plus_rct = rel.rc.mul(t);
    rh_plus_rct.add_scaled(1.0, &rel.rh);
    let grad_h = d.mul_nt(&rh_plus_rct).scale(2.0);

    let mut hrc_minus_rt = hrc;
    hrc_minus_rt.add_scaled(-1.0, &rel.rt);
    let grad_t = hrc_minus_rt.mul_tn(&d).scale(2.0);

    let ht_d = h.mul_tn(&d);
    let grad_rh = ht_d.scale(2.0);
    let grad_rt = d.mul_nt(t).scale(-2.0);
    let grad_rc = ht_d.mul_nt(t).scale(2.0);

    (
        s,
        GradMats {
            h: grad_h,
            rh: grad_rh,
            rt: grad_rt,
            rc: grad_rc,
            t: grad_t,
        },
    )
}

/// Precomputation for ranking tails under a fixed (h, r): with L = H·Rʰ and
/// M = Rᵗ − H·Rᶜ, the score of any candidate T′ is ‖M·T′ − L‖²_F. This is an
/// algebraic rearrangement of the direct form, not an approximation.
pub fn tail_query(h: &Mat, rel: &RelationEmbedding) -> (Mat, Mat) {
    let l = h.mul(&rel.rh);
    let mut m = h.mul(&rel.rc).scale(-1.0);
    m.add_scaled(1.0, &rel.rt);
    (l, m)
}

pub fn score_tail_factored(l: &Mat, m: &Mat, t: &Mat) -> f64 {
    Mat::mul_minus_frob_sq(m, t, l)
}

/// Precomputation for ranking heads under a fixed (r, t): with P = Rʰ + Rᶜ·T
/// and Q = Rᵗ·T, the score of any candidate H′ is ‖H′·P − Q‖²_F.
pub fn head_query(rel: &RelationEmbedding, t: &Mat) -> (Mat, Mat) {
    let mut p = rel.rc.mul(t);
    p.add_scaled(1.0, &rel.rh);
    let q = rel.rt.mul(t);
    (p, q)
}

pub fn score_head_factored(h: &Mat, p: &Mat, q: &Mat) -> f64 {
    Mat::mul_minus_frob_sq(h, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The relation and entity matrices used in the no-Z-paradox construction.
    pub(crate) fn paradox_free_instance() -> (RelationEmbedding, [Mat; 4], Mat) {
        let rel = RelationEmbedding::new(
            Mat::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]),
            Mat::from_rows(&[&[0.0, 0.0], &[0.0, -1.0]]),
            Mat::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]),
        );
        let e1 = Mat::identity(2);
        let e2 = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let e3 = Mat::from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let e4 = Mat::from_rows(&[&[1.0, 1.0], &[1.0, 0.0]]);
        let e4_alt = Mat::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        (rel, [e1, e2, e3, e4], e4_alt)
    }

    #[test]
    fn paradox_free_scores_reproduce_exactly() {
        let (rel, [e1, e2, e3, e4], e4_alt) = paradox_free_instance();
        assert_eq!(score(&e1, &rel, &e2), 0.0);
        assert_eq!(score(&e3, &rel, &e2), 0.0);
        assert_eq!(score(&e3, &rel, &e4), 0.0);
        assert!((score(&e1, &rel, &e4) - 1.0).abs() < 1e-12);
        // The alternative tail closes the pattern with score zero.
        assert_eq!(score(&e3, &rel, &e4_alt), 0.0);
        assert_eq!(score(&e1, &rel, &e4_alt), 0.0);
    }

    #[test]
    fn zero_entities_score_zero() {
        let rel = RelationEmbedding::new(
            Mat::from_rows(&[&[0.3, -1.0], &[2.0, 0.5]]),
            Mat::from_rows(&[&[1.0, 4.0], &[0.0, -2.0]]),
            Mat::from_rows(&[&[0.7, 0.7], &[-0.1, 0.2]]),
        );
        let z = Mat::zeros(2);
        assert_eq!(score(&z, &rel, &z), 0.0);
    }

    #[test]
    fn zero_cross_term_reduces_to_quadruple_score() {
        let h = Mat::from_rows(&[&[0.5, 1.0], &[1.0, -0.3]]);
        let t = Mat::from_rows(&[&[2.0, 0.1], &[0.1, 0.4]]);
        let rh = Mat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let rt = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.5]]);
        let rel = RelationEmbedding::new(rh.clone(), rt.clone(), Mat::zeros(2));
        let quad = h.mul(&rh).sub(&rt.mul(&t)).frob_sq();
        assert!((score(&h, &rel, &t) - quad).abs() < 1e-15);
    }

    #[test]
    fn factored_forms_match_direct_evaluation() {
        let h = Mat::from_rows(&[&[0.5, 1.0], &[1.0, -0.3]]);
        let t = Mat::from_rows(&[&[2.0, 0.1], &[0.1, 0.4]]);
        let rel = RelationEmbedding::new(
            Mat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]),
            Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.5]]),
            Mat::from_rows(&[&[0.2, -0.6], &[0.9, 1.1]]),
        );
        let direct = score(&h, &rel, &t);
        let (l, m) = tail_query(&h, &rel);
        let (p, q) = head_query(&rel, &t);
        assert!((score_tail_factored(&l, &m, &t) - direct).abs() <= 1e-10 * direct.max(1.0));
        assert!((score_head_factored(&h, &p, &q) - direct).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn gradients_vanish_at_zero_difference() {
        // Any exactly-satisfied triple is a stationary point of the score.
        let (rel, [_, e2, e3, _], _) = paradox_free_instance();
        let (s, g) = score_and_grad(&e3, &rel, &e2);
        assert_eq!(s, 0.0);
        for m in [&g.h, &g.rh, &g.rt, &g.rc, &g.t] {
            assert_eq!(m.frob_sq(), 0.0);
        }
    }
}
