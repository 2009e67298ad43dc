#![allow(dead_code)]

use rand::Rng;
use topograph::ScalarGrid;

/// Values drawn from `{0, 1/4, 1/2, 3/4, 1}`.
pub fn quarter_grid(rng: &mut impl Rng, h: usize, w: usize) -> ScalarGrid {
    ScalarGrid::from_fn(h, w, |_, _| rng.gen_range(0..=4) as f64 / 4.0).unwrap()
}

pub fn uniform_grid(rng: &mut impl Rng, h: usize, w: usize) -> ScalarGrid {
    ScalarGrid::from_fn(h, w, |_, _| rng.gen::<f64>()).unwrap()
}

pub fn transpose(g: &ScalarGrid) -> ScalarGrid {
    ScalarGrid::from_fn(g.width(), g.height(), |y, x| g.get(x, y)).unwrap()
}

/// Square ring of ones on a zero background, inset by `margin` pixels.
pub fn ring_patch(side: usize, margin: usize) -> ScalarGrid {
    let (lo, hi) = (margin, side - 1 - margin);
    ScalarGrid::from_fn(side, side, |y, x| {
        let inside = (lo..=hi).contains(&y) && (lo..=hi).contains(&x);
        let border = y == lo || y == hi || x == lo || x == hi;
        if inside && border {
            1.0
        } else {
            0.0
        }
    })
    .unwrap()
}
