use std::f64::consts::PI;
use std::io::BufReader;

use geob_core::solver::{self, ACParams, ACState, StepOptions};
use geob_core::spectral::snapshot::{self, Snapshot};
use geob_core::spectral::{Grid, Parity, ScalarField, VectorField, VELOCITY_PARITY};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(f: &ScalarField) -> Vec<u64> {
    f.coeffs()
        .unwrap()
        .iter()
        .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vector_round_trip_is_bit_exact(
        half in 4usize..8,
        n_v in prop_oneof![Just(1usize), 4usize..7],
        l in 0.5f64..40.0,
        t in -1e3f64..1e3,
        seed in any::<u64>(),
    ) {
        let n_h = 2 * half;
        let g = if n_v == 1 {
            Grid::horizontal(l, n_h, 2.0 / 3.0).unwrap()
        } else {
            Grid::new(l, n_h, n_v, 2.0 / 3.0).unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = VectorField::new(VELOCITY_PARITY.map(|p| ScalarField::random(&g, p, &mut rng, |_| Some(1.0))));
        let mut buf = Vec::new();
        snapshot::write_vector(&mut buf, &u, t).unwrap();
        let (snap, t2) = snapshot::read(BufReader::new(&buf[..]), 2.0 / 3.0).unwrap();
        prop_assert_eq!(t2.to_bits(), t.to_bits());
        let Snapshot::Vector(v) = snap else { panic!("expected a vector snapshot") };
        prop_assert_eq!(v.parities(), u.parities());
        for (a, b) in u.comps.iter().zip(&v.comps) {
            prop_assert_eq!(bits(a), bits(b));
        }
    }
}

#[test]
fn restart_from_snapshot_continues_bitwise() {
    let g = Grid::new(2.0 * PI, 16, 4, 2.0 / 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let band = |m: &geob_core::spectral::Mode| (m.n1.abs() <= 3 && m.n2.abs() <= 3 && m.k <= 2).then_some(1.0);
    let u = VectorField::new(VELOCITY_PARITY.map(|p| ScalarField::random(&g, p, &mut rng, band)));
    let p = ScalarField::random(&g, Parity::Even, &mut rng, band);
    let s0 = ACState::new(u, p, 0.0).unwrap();
    let params = ACParams::new(0.2, 1.0, 0.5).unwrap();
    let opts = StepOptions::default();
    let dt = 1e-2;

    let straight = solver::run(&params, &s0, 0.2, dt, 1_000, opts).unwrap();
    let mid = solver::run(&params, &s0, 0.1, dt, 1_000, opts).unwrap();
    let mid = mid.snapshots.last().unwrap();

    let (mut ub, mut pb) = (Vec::new(), Vec::new());
    snapshot::write_vector(&mut ub, &mid.u, mid.t).unwrap();
    snapshot::write_scalar(&mut pb, &mid.p, mid.t).unwrap();
    let (Snapshot::Vector(u), t) = snapshot::read(&ub[..], 2.0 / 3.0).unwrap() else {
        panic!("kind")
    };
    let (Snapshot::Scalar(p), _) = snapshot::read(&pb[..], 2.0 / 3.0).unwrap() else {
        panic!("kind")
    };
    let restarted = ACState::new(u, p, t).unwrap();
    let rest = solver::run(&params, &restarted, 0.1, dt, 1_000, opts).unwrap();

    let (a, b) = (straight.snapshots.last().unwrap(), rest.snapshots.last().unwrap());
    assert_eq!(a.sub(b).unwrap().norm(), 0.0);
}

#[test]
fn truncated_file_reports_row_count() {
    let g = Grid::new(1.0, 8, 4, 1.0).unwrap();
    let f = ScalarField::zeros(&g, Parity::Even);
    let mut buf = Vec::new();
    snapshot::write_scalar(&mut buf, &f, 0.0).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    let err = snapshot::read(cut.as_bytes(), 1.0).unwrap_err().to_string();
    assert!(err.contains("expected 196 rows"), "{err}");
}
