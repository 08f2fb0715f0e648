//! Helpers shared by the integration test targets.

use std::sync::Arc;

use deltawell::distrib::{Jet, PieceFn, Piecewise};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Continuous piecewise function built from `v + s t + q t² + w sin t`,
/// `t = x − anchor`, with each piece anchored at its left breakpoint and
/// its value there fixed by the previous piece.
pub fn random_piecewise(rng: &mut ChaCha8Rng) -> Piecewise {
    let count = rng.gen_range(1..=4);
    let mut breakpoints: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.5..1.5)).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let mut coefficients = Vec::new();
    let mut value_at_anchor = rng.gen_range(-1.0..1.0);
    let anchors: Vec<f64> = std::iter::once(breakpoints[0]).chain(breakpoints.iter().copied()).collect();
    for k in 0..anchors.len() {
        let (s, q, w): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coefficients.push((anchors[k], value_at_anchor, s, q, w));
        if k + 1 < anchors.len() {
            let t = anchors[k + 1] - anchors[k];
            value_at_anchor += s * t + q * t * t + w * t.sin();
        }
    }
    let pieces = coefficients
        .into_iter()
        .map(|(a, v, s, q, w)| {
            Arc::new(move |x: f64| {
                let t = x - a;
                Jet::new(v + s * t + q * t * t + w * t.sin(), s + 2.0 * q * t + w * t.cos(), 2.0 * q - w * t.sin())
            }) as PieceFn
        })
        .collect();
    Piecewise::line(breakpoints, pieces).unwrap()
}
