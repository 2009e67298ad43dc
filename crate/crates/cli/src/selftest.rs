//! Randomized self-test: fast persistence against the reduction oracle, and
//! Betti numbers against the Euler characteristic of each super-level set.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topograph::cubical::{betti_at, build_complex, compute_diagram, oracle_diagram, PersistencePair};
use topograph::ScalarGrid;

/// Grid of side at most `max_side` with values in `{0, 1/4, ..., 1}`.
pub fn random_quarter_grid(rng: &mut impl Rng, max_side: usize) -> ScalarGrid {
    let h = rng.gen_range(1..=max_side);
    let w = rng.gen_range(1..=max_side);
    ScalarGrid::from_fn(h, w, |_, _| rng.gen_range(0..=4) as f64 / 4.0).expect("finite values")
}

/// Whether `b0 - b1` read off the diagram equals `V - E + F` counted on the
/// complex, at every distinct cell value.
pub fn euler_identity_holds(g: &ScalarGrid) -> bool {
    let c = build_complex(g);
    let d = compute_diagram(g);
    let mut levels: Vec<f64> = g.values().to_vec();
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup();
    levels.iter().all(|&tau| {
        let (b0, b1) = betti_at(&d, tau);
        let (v, e, f) = c.counts_at(tau);
        b0 as i64 - b1 as i64 == v as i64 - e as i64 + f as i64
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub total: usize,
    pub matched: usize,
    pub euler_ok: usize,
    pub fast_time: Vec<Duration>,
    pub oracle_time: Vec<Duration>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.matched == self.total && self.euler_ok == self.total
    }

    pub fn summary(&self) -> String {
        let stats = |t: &[Duration]| {
            let max = t.iter().max().copied().unwrap_or_default();
            let mean = t.iter().sum::<Duration>() / t.len().max(1) as u32;
            format!("mean {:.1} us, max {:.1} us", micros(mean), micros(max))
        };
        format!(
            "{}/{} diagrams match\n{}/{} Euler identities hold\nwall-clock per diagram: fast path {}; oracle {}",
            self.matched,
            self.total,
            self.euler_ok,
            self.total,
            stats(&self.fast_time),
            stats(&self.oracle_time)
        )
    }
}

fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

/// Runs `count` random grids. `inject_fault` adds a spurious pair to every
/// fast diagram so the failure path can be exercised.
pub fn run_check(count: usize, seed: u64, inject_fault: bool) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport {
        total: count,
        matched: 0,
        euler_ok: 0,
        fast_time: Vec::with_capacity(count),
        oracle_time: Vec::with_capacity(count),
    };
    for _ in 0..count {
        let g = random_quarter_grid(&mut rng, 6);
        let start = Instant::now();
        let mut fast = compute_diagram(&g);
        report.fast_time.push(start.elapsed());
        if inject_fault {
            fast.push(PersistencePair::finite(0, 1.0, 0.0));
        }
        let start = Instant::now();
        let slow = oracle_diagram(&build_complex(&g)).expect("small grids fit the oracle");
        report.oracle_time.push(start.elapsed());
        report.matched += usize::from(fast.multiset_eq(&slow));
        report.euler_ok += usize::from(euler_identity_holds(&g));
    }
    report
}
