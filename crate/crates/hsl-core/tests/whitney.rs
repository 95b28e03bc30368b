//! Whitney decomposition invariants: tiling, exact diameter-to-distance
//! ratio, finite overlap of the enlarged cells, height and distance
//! comparability, and the discrete comparability of enlarged-vs-plain
//! cell integrals.

mod common;

use common::{random_hpoint, rng};
use hsl_core::carleson::cube_average;
use hsl_core::halfspace::WhitneyCell;
use hsl_core::{enlarged_cell, whitney_cell_containing, HPoint, TestFunction};
use rand::Rng;

#[test]
fn tiling_contains_points_and_interiors_disjoint() {
    for n in 1..=3usize {
        let mut r = rng(11 + n as u64);
        let mut cells = Vec::new();
        for _ in 0..10_000 {
            let p = random_hpoint(&mut r, n, 10.0, 8.0);
            let cell = whitney_cell_containing(&p).unwrap();
            assert!(
                cell.cube().contains(&p),
                "cell {cell:?} does not contain {p:?}"
            );
            cells.push(cell);
        }
        // distinct cells have disjoint interiors
        for pair in cells.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a == b {
                continue;
            }
            let ba = a.cube().to_box();
            let bb = b.cube().to_box();
            let mut open_overlap = ba.t_lo < bb.t_hi && bb.t_lo < ba.t_hi;
            for i in 0..n {
                open_overlap &= ba.x_lo[i] < bb.x_hi[i] && bb.x_lo[i] < ba.x_hi[i];
            }
            assert!(!open_overlap, "interiors overlap: {a:?} {b:?}");
        }
    }
}

#[test]
fn diameter_distance_ratio_is_exact() {
    for n in 1..=3usize {
        let mut r = rng(23 + n as u64);
        let target = ((n + 1) as f64).sqrt();
        for _ in 0..500 {
            let p = random_hpoint(&mut r, n, 10.0, 8.0);
            let cell = whitney_cell_containing(&p).unwrap();
            let cube = cell.cube();
            let dist_to_boundary = cube.t_range().0;
            assert_eq!(cube.diam() / dist_to_boundary, target);
        }
    }
}

fn enlarged_cover_count(p: &HPoint) -> usize {
    let base = whitney_cell_containing(p).unwrap();
    let n = p.dim();
    let mut count = 0;
    for dk in -3..=3i32 {
        let layer = base.layer + dk;
        let side = (2.0f64).powi(-layer);
        let mut ranges = Vec::new();
        for i in 0..n {
            let c = (p.x()[i] / side).floor() as i64;
            ranges.push((c - 2, c + 2));
        }
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let mut lattice = [0i64; 3];
            lattice[..n].copy_from_slice(&idx);
            let cell = WhitneyCell { layer, lattice, n };
            if enlarged_cell(&cell).contains(p) {
                count += 1;
            }
            let mut ax = n;
            loop {
                if ax == 0 {
                    break 'outer;
                }
                ax -= 1;
                idx[ax] += 1;
                if idx[ax] <= ranges[ax].1 {
                    break;
                }
                idx[ax] = ranges[ax].0;
            }
        }
    }
    count
}

#[test]
fn finite_overlap_of_enlarged_cells() {
    for n in 1..=3usize {
        let bound = 3 * (1usize << (n + 1));
        let mut r = rng(37 + n as u64);
        let mut max_first = 0usize;
        let mut max_second = 0usize;
        for i in 0..10_000 {
            let p = random_hpoint(&mut r, n, 6.0, 6.0);
            let c = enlarged_cover_count(&p);
            if i < 5_000 {
                max_first = max_first.max(c);
            }
            max_second = max_second.max(c);
        }
        assert!(
            max_second <= bound,
            "n={n}: overlap {max_second} exceeds bound {bound}"
        );
        // stable when the sample doubles
        assert_eq!(max_first, max_second, "n={n}");
    }
}

#[test]
fn height_comparable_inside_enlarged_cell() {
    for n in 1..=2usize {
        let mut r = rng(51 + n as u64);
        for _ in 0..2_000 {
            let p = random_hpoint(&mut r, n, 4.0, 6.0);
            let cell = whitney_cell_containing(&p).unwrap();
            let big = enlarged_cell(&cell).to_box();
            let t = r.gen_range(big.t_lo..big.t_hi);
            let ratio = t / cell.eta();
            assert!((0.25..=4.0).contains(&ratio), "ratio {ratio}");
        }
    }
}

#[test]
fn reflected_distance_comparable_to_center_distance() {
    let n = 1;
    let mut r = rng(67);
    let mut worst: f64 = 1.0;
    let mut worst_half: f64 = 1.0;
    for i in 0..2_000 {
        let p = random_hpoint(&mut r, n, 4.0, 5.0);
        let cell = whitney_cell_containing(&p).unwrap();
        let big = enlarged_cell(&cell).to_box();
        let w = HPoint::new1(
            r.gen_range(big.x_lo[0]..big.x_hi[0]),
            r.gen_range(big.t_lo..big.t_hi),
        );
        let z = random_hpoint(&mut r, n, 6.0, 5.0);
        let ratio = z.dist_reflected(&w) / z.dist_reflected(&cell.center());
        let spread = ratio.max(1.0 / ratio);
        if i < 1_000 {
            worst_half = worst_half.max(spread);
        }
        worst = worst.max(spread);
        assert!(spread <= 8.0, "spread {spread}");
    }
    // the empirical factor is stable under sample doubling
    assert!((worst - worst_half) / worst_half < 0.10, "{worst_half} -> {worst}");
}

#[test]
fn enlarged_vs_plain_cell_sums_comparable() {
    // sum_k eta^{n+1} ( int_{cell*} u dm_alpha )^beta against the same sum
    // over the plain cells, window-stable
    let f = TestFunction::PoissonShift { n: 1, s0: 1.0 };
    let alpha = 0.5;
    let sums = |lattice_half: i64, beta: f64| -> (f64, f64) {
        let mut plain = 0.0;
        let mut big = 0.0;
        for layer in -2..=3i32 {
            for i in -lattice_half..lattice_half {
                let cell = WhitneyCell { layer, lattice: [i, 0, 0], n: 1 };
                let eta = cell.eta();
                for (target, cube) in
                    [(&mut plain, cell.cube()), (&mut big, enlarged_cell(&cell))]
                {
                    let avg = cube_average(
                        &|z: &HPoint| f.eval_h(z).unwrap() * z.t().powf(alpha),
                        &cube,
                        6,
                    )
                    .unwrap();
                    let integral = avg * cube.side.powi(2);
                    *target += eta.powi(2) * integral.powf(beta);
                }
            }
        }
        (plain, big)
    };
    for beta in [0.5, 1.0, 2.0] {
        let (p1, b1) = sums(4, beta);
        let (p2, b2) = sums(8, beta);
        let c1 = b1 / p1;
        let c2 = b2 / p2;
        assert!(c1 > 0.2 && c1 < 8.0, "beta {beta}: one-window constant {c1}");
        assert!(
            (c1 - c2).abs() / c1 < 0.15,
            "beta {beta}: window doubling moved {c1} to {c2}"
        );
    }
}
