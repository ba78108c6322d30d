use wgemit_core::experiments::{
    optimize_thickness, sweep_height, sweep_thickness, Axis, Grid, Spacing, SweepSpec,
};
use wgemit_core::{branching_ratio, DipoleEmitter, ModeId, OpticalContext, Orientation, Polarization, WaveguideStack};

const TM1: ModeId = ModeId {
    pol: Polarization::TM,
    order: 1,
};

#[test]
fn fig2_far_from_surface_is_radiative() {
    let table = sweep_height(&SweepSpec::fig2()).unwrap();
    assert_eq!(table.rows.len(), 200);
    assert_eq!(table.modes.len(), 4);
    let first = &table.rows[0];
    let last = &table.rows[199];
    assert!(first.guided_sum > 0.4);
    assert!(last.guided_sum < 0.05);
    // Every mode decays monotonically once the emitter leaves the surface.
    for i in 0..table.modes.len() {
        let col = table.column(table.modes[i]).unwrap();
        assert!(col.windows(2).skip(100).all(|w| w[1] <= w[0]), "{}", table.modes[i]);
    }
}

#[test]
fn fig3_tm1_decay_length_from_table() {
    for d in [235.0, 245.0, 255.0] {
        let mut spec = SweepSpec::fig3(d).unwrap();
        spec.grid = Grid::new(780e-9, 2340e-9, 21, Spacing::Linear).unwrap();
        let table = sweep_height(&spec).unwrap();
        let i = table.modes.iter().position(|&id| id == TM1).unwrap();
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            table.rows.iter().map(|r| (r.abscissa, r.rates[i].ln())).unzip();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let decay = table.rows[0].decay_lengths[i].unwrap();
        assert!((-1.0 / slope - decay).abs() <= 1e-3 * decay, "d={d}: {} vs {decay}", -1.0 / slope);
    }
}

#[test]
fn thickness_sweep_sees_tm1_birth() {
    let mut spec = SweepSpec::fig3(255.0).unwrap();
    spec.axis = Axis::Thickness;
    spec.grid = Grid::new(200e-9, 260e-9, 13, Spacing::Linear).unwrap();
    let table = sweep_thickness(&spec).unwrap();
    let i = table.modes.iter().position(|&id| id == TM1).unwrap();
    for row in &table.rows {
        let born = row.abscissa > 225.2e-9;
        assert_eq!(row.decay_lengths[i].is_some(), born, "d = {}", row.abscissa);
        assert_eq!(row.branching[i] > 0.0, born);
    }
    assert!(table.header().iter().any(|h| h.starts_with("decay_nm_")));
}

#[test]
fn optimizer_agrees_with_grid_scan() {
    let stack = WaveguideStack::from_nm(2.0, 1.0, 1.0, 255.0).unwrap();
    let ctx = OpticalContext::from_nm(780.0).unwrap();
    let e = DipoleEmitter::new(Orientation::perpendicular(), 0.0).unwrap();
    let best = optimize_thickness(&stack, &ctx, &e, (100e-9, 400e-9)).unwrap();
    let (mut arg, mut max) = (0.0, f64::NEG_INFINITY);
    for d in 101..400 {
        let s = stack.with_thickness(d as f64 * 1e-9).unwrap();
        let g = branching_ratio(&s, &ctx, &e).unwrap().guided_sum;
        if g > max {
            arg = d as f64;
            max = g;
        }
    }
    assert!(best.guided_sum >= max - 1e-9, "{} < {max}", best.guided_sum);
    assert!(best.guided_sum > 0.5);
    // A kinked optimum sits at a birth; a smooth one must match the scan.
    assert!((best.thickness * 1e9 - arg).abs() <= 1.0, "{} vs {arg}", best.thickness * 1e9);
}

#[test]
fn csv_is_independent_of_thread_count() {
    let mut spec = SweepSpec::fig2();
    spec.grid = Grid::new(1e-9, 1e-6, 40, Spacing::Log).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sweep_height(&spec).unwrap().to_csv_string())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(4));
    assert!(one.starts_with("abscissa_nm,P_TE0,P_TE1,P_TM0,P_TM1,guided_sum,wtot_over_w0\n"));
}
