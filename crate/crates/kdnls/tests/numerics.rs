use kdnls::numerics::{central_diff, sample, Axis, CDd, ComplexMatrix, Dd, Grid2D, Precision};
use num_complex::Complex64;
use proptest::prelude::*;

/// Leibniz sum over permutations.
fn leibniz(rows: &[Vec<Complex64>]) -> Complex64 {
    fn perms(n: usize) -> Vec<(Vec<usize>, f64)> {
        if n == 1 {
            return vec![(vec![0], 1.0)];
        }
        let mut out = Vec::new();
        for (p, s) in perms(n - 1) {
            for k in 0..n {
                let mut q = p.clone();
                q.insert(k, n - 1);
                // Inserting at k moves the new element past n-1-k others.
                let sign = if (n - 1 - k).is_multiple_of(2) { s } else { -s };
                out.push((q, sign));
            }
        }
        out
    }
    let n = rows.len();
    perms(n)
        .into_iter()
        .map(|(p, s)| {
            p.iter()
                .enumerate()
                .fold(Complex64::new(s, 0.0), |acc, (r, &c)| acc * rows[r][c])
        })
        .sum()
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<Complex64>>> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n), n).prop_map(
            |rows| {
                rows.into_iter()
                    .map(|r| r.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                    .collect()
            },
        )
    })
}

fn hadamard(rows: &[Vec<Complex64>]) -> f64 {
    rows.iter()
        .map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .product::<f64>()
        .max(1.0)
}

#[test]
fn permutation_oracle_known_values() {
    let c = |a: f64| Complex64::new(a, 0.0);
    let m = vec![
        vec![c(2.0), c(0.0), c(1.0)],
        vec![c(1.0), c(3.0), c(2.0)],
        vec![c(1.0), c(1.0), c(2.0)],
    ];
    assert_eq!(leibniz(&m), c(6.0));
    let i = Complex64::new(0.0, 1.0);
    assert_eq!(leibniz(&[vec![i, c(1.0)], vec![c(1.0), i]]), c(-2.0));
}

proptest! {
    #[test]
    fn determinant_matches_permutation_sum(rows in matrix_strategy()) {
        let oracle = leibniz(&rows);
        let m = ComplexMatrix::from_rows(&rows).unwrap();
        for p in [Precision::Double, Precision::Extended] {
            let d = m.det_with(p).unwrap();
            prop_assert!((d - oracle).norm() <= 1e-12 * hadamard(&rows), "{p}: {d} vs {oracle}");
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in matrix_strategy()) {
        let n = a.len();
        let b: Vec<Vec<Complex64>> = (0..n)
            .map(|r| (0..n).map(|c| Complex64::new((r + 2 * c) as f64 * 0.3 - 0.5, (r * c) as f64 * 0.2 + 0.1 * r as f64)).collect())
            .collect();
        let ma = ComplexMatrix::from_rows(&a).unwrap();
        let mb = ComplexMatrix::from_rows(&b).unwrap();
        let lhs = ma.matmul(&mb).det().unwrap();
        let rhs = ma.det().unwrap() * mb.det().unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * hadamard(&a) * hadamard(&b));
    }

    #[test]
    fn double_double_sum_is_exact(a in -1e6..1e6f64, b in -1e-6..1e-6f64) {
        // a + b is representable exactly as a double-double.
        let s = Dd::from_f64(a) + Dd::from_f64(b);
        let back = s - Dd::from_f64(a);
        prop_assert_eq!(back.to_f64(), b);
    }

    #[test]
    fn double_double_division_round_trips(a in 0.1..1e3f64, b in 0.1..1e3f64) {
        let q = Dd::from_f64(a) / Dd::from_f64(b);
        let r = q * Dd::from_f64(b) - Dd::from_f64(a);
        prop_assert!(r.to_f64().abs() <= 1e-28 * a);
    }
}

#[test]
fn extended_resolves_cancellation() {
    // det [[1, 1], [1, 1 + δ]] = δ with δ below double resolution of the entries.
    let d = 1e-17;
    let z = |a: f64| CDd::from_c64(Complex64::new(a, 0.0));
    let big = z(1.0) + z(d);
    let det = z(1.0) * big - z(1.0) * z(1.0);
    assert!((det.to_c64().re - d).abs() < 1e-30);
}

#[test]
fn central_difference_second_order() {
    let f = |x: f64, t: f64| Complex64::new((x * 1.3).sin() * t.cos(), x * t);
    let mut errs = Vec::new();
    for n in [41, 81, 161] {
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap();
        let d = central_diff(&sample(f, &g), Axis::X, 1).unwrap();
        let mut worst = 0.0f64;
        for j in 0..g.nt {
            for i in 0..g.nx {
                let (x, t) = (g.x(i), g.t(j));
                let exact = Complex64::new(1.3 * (x * 1.3).cos() * t.cos(), t);
                worst = worst.max((d.at(i, j) - exact).norm());
            }
        }
        errs.push(worst);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..2.2).contains(&order), "order {order}");
    }
}
