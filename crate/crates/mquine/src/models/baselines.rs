//! Baseline score functions: TransE, RotatE, DistMult, ComplEx, MQuadE.
//!
//! Each follows its published form: translational models return unsquared
//! norms, bilinear models return negated products (so that lower is always
//! more plausible). Complex-valued layouts store all real parts followed by
//! all imaginary parts; RotatE relations are stored as phases, which keeps
//! every coordinate on the unit circle by construction.

use crate::linalg::Mat;

/// ‖h + r − t‖₂
pub fn transe_score(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    check_len("transe", h, r, t, r.len());
    h.iter()
        .zip(r)
        .zip(t)
        .map(|((h, r), t)| {
            let v = h + r - t;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Gradient of the TransE score w.r.t. (h, r, t). Zero at the (non-smooth)
/// origin.
pub fn transe_grad(h: &[f64], r: &[f64], t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let s = transe_score(h, r, t);
    let n = h.len();
    if s == 0.0 {
        return (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    }
    let mut gh = Vec::with_capacity(n);
    for i in 0..n {
        gh.push((h[i] + r[i] - t[i]) / s);
    }
    let gt: Vec<f64> = gh.iter().map(|v| -v).collect();
    (gh.clone(), gh, gt)
}

/// ‖h ∘ r − t‖₂ over complex coordinates, with r = e^{iθ} per coordinate.
/// `h` and `t` have layout `[re…, im…]` (length 2k); `phases` has length k.
pub fn rotate_score(h: &[f64], phases: &[f64], t: &[f64]) -> f64 {
    let k = phases.len();
    assert_eq!(h.len(), 2 * k, "rotate head layout mismatch");
    assert_eq!(t.len(), 2 * k, "rotate tail layout mismatch");
    let mut acc = 0.0;
    for j in 0..k {
        let (re, im) = rotate_residual(h, phases, t, j);
        acc += re * re + im * im;
    }
    acc.sqrt()
}

fn rotate_residual(h: &[f64], phases: &[f64], t: &[f64], j: usize) -> (f64, f64) {
    let k = phases.len();
    let (a, b) = (h[j], h[k + j]);
    let (c, s) = (phases[j].cos(), phases[j].sin());
    let re = a * c - b * s - t[j];
    let im = a * s + b * c - t[k + j];
    (re, im)
}

pub fn rotate_grad(h: &[f64], phases: &[f64], t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = phases.len();
    let score = rotate_score(h, phases, t);
    if score == 0.0 {
        return (vec![0.0; 2 * k], vec![0.0; k], vec![0.0; 2 * k]);
    }
    let mut gh = vec![0.0; 2 * k];
    let mut gr = vec![0.0; k];
    let mut gt = vec![0.0; 2 * k];
    for j in 0..k {
        let (a, b) = (h[j], h[k + j]);
        let (c, s) = (phases[j].cos(), phases[j].sin());
        let (re, im) = rotate_residual(h, phases, t, j);
        gh[j] = (re * c + im * s) / score;
        gh[k + j] = (-re * s + im * c) / score;
        gr[j] = (re * (-a * s - b * c) + im * (a * c - b * s)) / score;
        gt[j] = -re / score;
        gt[k + j] = -im / score;
    }
    (gh, gr, gt)
}

/// −⟨h, r, t⟩
pub fn distmult_score(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    check_len("distmult", h, r, t, r.len());
    -h.iter().zip(r).zip(t).map(|((h, r), t)| h * r * t).sum::<f64>()
}

pub fn distmult_grad(h: &[f64], r: &[f64], t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = h.len();
    let mut gh = Vec::with_capacity(n);
    let mut gr = Vec::with_capacity(n);
    let mut gt = Vec::with_capacity(n);
    for i in 0..n {
        gh.push(-r[i] * t[i]);
        gr.push(-h[i] * t[i]);
        gt.push(-h[i] * r[i]);
    }
    (gh, gr, gt)
}

/// −Re⟨h, r, t̄⟩ with layout `[re…, im…]` (length 2k each).
pub fn complex_score(h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    let k = h.len() / 2;
    check_len("complex", h, r, t, 2 * k);
    let mut acc = 0.0;
    for j in 0..k {
        let (a, b) = (h[j], h[k + j]);
        let (c, d) = (r[j], r[k + j]);
        let (e, f) = (t[j], t[k + j]);
        acc += (a * c - b * d) * e + (a * d + b * c) * f;
    }
    -acc
}

pub fn complex_grad(h: &[f64], r: &[f64], t: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = h.len() / 2;
    let mut gh = vec![0.0; 2 * k];
    let mut gr = vec![0.0; 2 * k];
    let mut gt = vec![0.0; 2 * k];
    for j in 0..k {
        let (a, b) = (h[j], h[k + j]);
        let (c, d) = (r[j], r[k + j]);
        let (e, f) = (t[j], t[k + j]);
        gh[j] = -(c * e + d * f);
        gh[k + j] = -(-d * e + c * f);
        gr[j] = -(a * e + b * f);
        gr[k + j] = -(-b * e + a * f);
        gt[j] = -(a * c - b * d);
        gt[k + j] = -(a * d + b * c);
    }
    (gh, gr, gt)
}

/// ‖H·R − R̂·T‖_F with symmetric H, T (MQuadE).
pub fn mquade_score(h: &Mat, r: &Mat, r_hat: &Mat, t: &Mat) -> f64 {
    h.mul(r).sub(&r_hat.mul(t)).frob()
}

/// Gradients of the MQuadE score w.r.t. (H, R, R̂, T); entity gradients are in
/// materialized-matrix space.
pub fn mquade_grad(h: &Mat, r: &Mat, r_hat: &Mat, t: &Mat) -> (f64, Mat, Mat, Mat, Mat) {
    let diff = h.mul(r).sub(&r_hat.mul(t));
    let s = diff.frob();
    let d = h.dim();
    if s == 0.0 {
        let z = Mat::zeros(d);
        return (0.0, z.clone(), z.clone(), z.clone(), z);
    }
    let inv = 1.0 / s;
    let gh = diff.mul_nt(r).scale(inv);
    let gr = h.mul_tn(&diff).scale(inv);
    let grhat = diff.mul_nt(t).scale(-inv);
    let gt = r_hat.mul_tn(&diff).scale(-inv);
    (s, gh, gr, grhat, gt)
}

fn check_len(kind: &str, h: &[f64], r: &[f64], t: &[f64], expect: usize) {
    assert!(
        h.len() == expect && r.len() == expect && t.len() == expect,
        "{kind}: parameter layout mismatch (expected {expect})"
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transe_exact_translation_scores_zero() {
        assert_eq!(transe_score(&[0.0], &[1.0], &[1.0]), 0.0);
    }

    #[test]
    fn distmult_inner_product() {
        assert_eq!(distmult_score(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]), -2.0);
    }

    #[test]
    fn rotate_half_turn_maps_one_to_minus_one() {
        // One complex coordinate: h = 1, r = e^{iπ}, t = −1.
        let s = rotate_score(&[1.0, 0.0], &[std::f64::consts::PI], &[-1.0, 0.0]);
        assert!(s < 1e-15, "score {s}");
    }

    #[test]
    fn complex_score_matches_real_expansion() {
        // h = 1+2i, r = 3−i, t = −2+i ⇒ Re(h·r·conj(t)) = Re((5+5i)(−2−i)) = −5.
        let s = complex_score(&[1.0, 2.0], &[3.0, -1.0], &[-2.0, 1.0]);
        assert!((s - 5.0).abs() < 1e-15);
    }

    #[test]
    fn mquade_is_cross_term_free_quintuple() {
        let h = Mat::from_rows(&[&[1.0, 0.5], &[0.5, 2.0]]);
        let t = Mat::from_rows(&[&[0.0, 1.0], &[1.0, -1.0]]);
        let r = Mat::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let r_hat = Mat::from_rows(&[&[0.5, 0.0], &[1.0, 1.0]]);
        let expect = h.mul(&r).sub(&r_hat.mul(&t)).frob_sq().sqrt();
        assert_eq!(mquade_score(&h, &r, &r_hat, &t), expect);
    }
}
