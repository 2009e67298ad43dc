mod common;

use common::{quarter_grid, transpose, uniform_grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topograph::cubical::{
    betti_at, build_complex, compute_diagram, oracle_diagram, PersistenceDiagram, PersistencePair,
};
use topograph::ScalarGrid;

fn assert_oracle_agrees(g: &ScalarGrid) {
    let fast = compute_diagram(g);
    let slow = oracle_diagram(&build_complex(g)).unwrap();
    assert!(
        fast.multiset_eq(&slow),
        "grid {:?}\nfast:\n{}oracle:\n{}",
        g.values(),
        fast.dump(),
        slow.dump()
    );
}

#[test]
fn random_small_grids_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1500 {
        let (h, w) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        assert_oracle_agrees(&quarter_grid(&mut rng, h, w));
    }
}

#[test]
fn every_two_by_two_quarter_grid_matches_oracle() {
    for code in 0..5usize.pow(4) {
        let values: Vec<f64> = (0..4).map(|i| ((code / 5usize.pow(i)) % 5) as f64 / 4.0).collect();
        assert_oracle_agrees(&ScalarGrid::new(2, 2, values).unwrap());
    }
}

#[test]
fn continuous_values_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        assert_oracle_agrees(&uniform_grid(&mut rng, 7, 7));
    }
}

fn euler_holds(g: &ScalarGrid) -> bool {
    let c = build_complex(g);
    let d = compute_diagram(g);
    let mut levels = g.values().to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels.iter().all(|&tau| {
        let (b0, b1) = betti_at(&d, tau);
        let (v, e, f) = c.counts_at(tau);
        b0 as i64 - b1 as i64 == v as i64 - e as i64 + f as i64
    })
}

#[test]
fn euler_characteristic_matches_betti_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let g = if i % 2 == 0 {
            quarter_grid(&mut rng, 8, 8)
        } else {
            uniform_grid(&mut rng, 8, 8)
        };
        assert!(euler_holds(&g), "{:?}", g.values());
    }
}

#[test]
fn flips_and_transpose_preserve_diagram() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let g = uniform_grid(&mut rng, 9, 6);
        let d = compute_diagram(&g);
        for moved in [g.flip_horizontal(), g.flip_vertical(), transpose(&g)] {
            assert!(compute_diagram(&moved).multiset_eq(&d));
        }
    }
}

#[test]
fn adding_a_constant_shifts_every_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let g = quarter_grid(&mut rng, 6, 6);
        let shifted: PersistenceDiagram = compute_diagram(&g)
            .pairs()
            .iter()
            .map(|p| PersistencePair {
                birth: p.birth + 0.25,
                death: p.death + 0.25,
                ..*p
            })
            .collect();
        assert!(compute_diagram(&g.map(|v| v + 0.25)).multiset_eq(&shifted));
    }
}

/// Every point of `a` is within `eps` of a point of `b` of the same
/// dimension, or has persistence at most `2 eps`.
fn covered(a: &PersistenceDiagram, b: &PersistenceDiagram, eps: f64) -> bool {
    a.pairs().iter().all(|p| {
        p.persistence() <= 2.0 * eps + 1e-12
            || b.pairs().iter().any(|q| {
                q.dim == p.dim
                    && (q.birth - p.birth).abs() <= eps + 1e-12
                    && (q.death - p.death).abs() <= eps + 1e-12
            })
    })
}

#[test]
fn small_perturbations_move_points_a_little() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let eps = 0.01;
    for _ in 0..100 {
        let g = uniform_grid(&mut rng, 12, 12);
        let noise: Vec<f64> = (0..144).map(|_| rng.gen_range(-eps..=eps)).collect();
        let values = g.values().iter().zip(&noise).map(|(v, n)| v + n).collect();
        let moved = ScalarGrid::new(12, 12, values).unwrap();
        let (a, b) = (compute_diagram(&g), compute_diagram(&moved));
        assert!(covered(&a, &b, eps) && covered(&b, &a, eps));
    }
}

#[test]
fn diagram_counts_follow_ties() {
    // two separate peaks at equal height: one essential, one finite
    let g = ScalarGrid::new(1, 5, vec![1.0, 0.2, 0.0, 0.2, 1.0]).unwrap();
    let d = compute_diagram(&g);
    assert_eq!(d.dimension(0).filter(|p| p.essential).count(), 1);
    assert_eq!(d.dimension(0).filter(|p| !p.essential).count(), 1);
    assert_eq!(betti_at(&d, 0.5), (2, 0));
    assert_eq!(betti_at(&d, 0.0), (1, 0));
}
