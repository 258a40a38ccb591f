use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use kerrwalk::{run_sweep, AxisRange, InitialState, SweepSpec};

#[test]
fn anchor_grid_traps_only_at_pi_over_three_and_strong_kerr() {
    let mut spec = SweepSpec::new(2, 2, 2000, InitialState::SymmetricCircular);
    spec.theta = AxisRange::new(FRAC_PI_4, FRAC_PI_3, 2);
    spec.chi = AxisRange::new(0.0, 0.6, 2);
    let table = run_sweep(&spec, 4).unwrap();
    let best = table
        .cells
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.sp_bar.total_cmp(&b.1.sp_bar))
        .unwrap()
        .0;
    assert_eq!(best, 3);
    assert_eq!((table.cells[3].theta, table.cells[3].chi), (FRAC_PI_3, 0.6));
}

#[test]
fn worker_count_does_not_change_the_table() {
    let spec = SweepSpec::new(6, 5, 300, InitialState::SymmetricCircular);
    let one = run_sweep(&spec, 1).unwrap();
    let eight = run_sweep(&spec, 8).unwrap();
    assert_eq!(one, eight);
    for (x, y) in one.cells.iter().zip(&eight.cells) {
        assert_eq!(x.sp_bar.to_bits(), y.sp_bar.to_bits());
        assert_eq!(x.ipr_bar.to_bits(), y.ipr_bar.to_bits());
    }
}

#[test]
fn right_only_table_is_mirror_symmetric() {
    let spec = SweepSpec::new(9, 7, 400, InitialState::RightOnly);
    let table = run_sweep(&spec, 4).unwrap();
    for i in 0..9 {
        for k in 0..7 {
            let (p, q) = (table.cell(i, k), table.cell(8 - i, k));
            assert!((p.sp_bar - q.sp_bar).abs() < 1e-6, "θ index {i}, χ index {k}");
        }
    }
}

#[test]
fn linear_column_spreads_away_from_the_trivial_coins() {
    let mut spec = SweepSpec::new(5, 2, 1500, InitialState::SymmetricCircular);
    spec.chi = AxisRange::new(0.0, 0.1, 2);
    let table = run_sweep(&spec, 4).unwrap();
    // θ = π/4, π/2 · (1/2), 3π/4 at χ = 0.
    for i in 1..4 {
        if i == 2 {
            continue;
        }
        assert!(table.cell(i, 0).sp_bar < 0.01, "{:?}", table.cell(i, 0));
    }
}
