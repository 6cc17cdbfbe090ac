mod common;

use common::f_tail_quadrature;
use typ3::numeric::f_tail;

const DFS: [usize; 9] = [1, 2, 3, 4, 5, 8, 13, 21, 30];
const F_VALUES: [f64; 8] = [0.05, 0.3, 0.9, 1.0, 1.7, 3.2, 7.5, 25.0];

#[test]
fn matches_quadrature_on_grid() {
    let mut worst = (0.0f64, 0.0, 0, 0);
    for &d1 in &DFS {
        for &d2 in &DFS {
            for &f in &F_VALUES {
                let err = (f_tail(f, d1, d2).unwrap() - f_tail_quadrature(f, d1, d2)).abs();
                if err > worst.0 {
                    worst = (err, f, d1, d2);
                }
            }
        }
    }
    assert!(worst.0 <= 1e-8, "worst {:?}", worst);
}

#[test]
fn closed_forms() {
    // ν1 = 2: P(F > f) = (1 + 2f/ν2)^{-ν2/2}.
    for &d2 in &DFS {
        for &f in &F_VALUES {
            let exact = (1.0 + 2.0 * f / d2 as f64).powf(-(d2 as f64) / 2.0);
            assert!((f_tail(f, 2, d2).unwrap() - exact).abs() < 1e-12);
        }
    }
    // ν1 = ν2 = 1: P(F > f) = 1 − (2/π) atan(√f).
    for &f in &F_VALUES {
        let exact = 1.0 - std::f64::consts::FRAC_2_PI * f.sqrt().atan();
        assert!((f_tail(f, 1, 1).unwrap() - exact).abs() < 1e-12);
    }
}

#[test]
fn edge_values() {
    assert_eq!(f_tail(0.0, 3, 4).unwrap(), 1.0);
    assert!(f_tail(1e12, 3, 4).unwrap() < 1e-15);
    assert!(f_tail(f64::NAN, 3, 4).is_err());
    assert!(f_tail(1.0, 0, 4).is_err());
}
