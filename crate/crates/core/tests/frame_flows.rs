use std::f64::consts::PI;

use nlcrit::frame::{frame_at_max, symmetrize, Resample};
use nlcrit::solver::InitialData;
use nlcrit::Grid;

fn split(init: &InitialData, n: usize) -> (f64, f64) {
    let g = Grid::new(n, PI).unwrap();
    let u = init.sample(&g).unwrap();
    let (_, framed) = frame_at_max(&u, Resample::Spectral, 0.0).unwrap();
    let d = symmetrize(&framed);
    (d.sym.l2_norm(), d.rem.l2_norm())
}

#[test]
fn beltrami_splits_into_comparable_halves() {
    // the reflection sends a curl eigenfield with eigenvalue 1 to one with eigenvalue -1
    for n in [16, 32] {
        let (s, r) = split(&InitialData::beltrami(), n);
        assert!((s / r - 1.0).abs() < 0.1, "n={n}: sym {s}, rem {r}");
    }
}

#[test]
fn taylor_green_is_symmetric_at_its_maximum() {
    for n in [16, 32] {
        let (s, r) = split(&InitialData::TaylorGreen, n);
        assert!(r <= 1e-12 * s, "n={n}: sym {s}, rem {r}");
    }
}
