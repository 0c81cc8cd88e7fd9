use sharpfront::analysis::{front_speed, perturbation_decay, scheme_comparison};
use sharpfront::scheme::{run, GridConfig, InitialData, Problem, SchemeKind, DEFAULT_CFL};
use sharpfront::{Error, Kinetics};

fn setup(r: f64, dx: f64, t_end: f64) -> (Problem, GridConfig) {
    let p = Problem::new(Kinetics::fisher_kpp(), r).unwrap();
    let g = GridConfig::new(&p, -15.0, 60.0, dx, DEFAULT_CFL, t_end).unwrap();
    (p, g)
}

#[test]
fn sharp_edge_beats_classical() {
    let (p, g) = setup(0.0, 0.05, 5.0);
    let rep = scheme_comparison(&p, &g).unwrap();
    assert!(rep.sharp_edge_better(), "{rep:?}");
    assert!(rep.sharp.norms.linf < rep.classical.norms.linf);
    // Bitwise reproducible.
    assert_eq!(rep, scheme_comparison(&p, &g).unwrap());
}

#[test]
fn sharp_error_shrinks_under_refinement() {
    let coarse = scheme_comparison(&setup(0.0, 0.1, 5.0).0, &setup(0.0, 0.1, 5.0).1).unwrap();
    let fine = scheme_comparison(&setup(0.0, 0.05, 5.0).0, &setup(0.0, 0.05, 5.0).1).unwrap();
    assert!(fine.sharp.norms.linf < coarse.sharp.norms.linf);
    assert!(fine.sharp.edge_error < coarse.sharp.edge_error);
}

#[test]
fn comparison_requires_exact_case() {
    let (p, g) = setup(0.1, 0.1, 1.0);
    assert!(matches!(scheme_comparison(&p, &g), Err(Error::Domain(_))));
}

#[test]
fn speed_is_grid_consistent() {
    let speed = |dx| {
        let (p, g) = setup(0.0, dx, 10.0);
        let s = run(&p, &g, |_, x| sharpfront::scheme::sharp_wave(x), &[], SchemeKind::Sharp).unwrap();
        front_speed(&s.trajectory, (5.0, 10.0)).unwrap().speed
    };
    let (a, b) = (speed(0.1), speed(0.05));
    assert!((a - b).abs() / b < 5e-3, "{a} vs {b}");
}

#[test]
fn delayed_run_edge_position() {
    let (p, g) = setup(0.1, 0.05, 10.0);
    let s = run(
        &p,
        &g,
        |_, x| sharpfront::scheme::sharp_wave(x),
        &[10.0],
        SchemeKind::Sharp,
    )
    .unwrap();
    let x_hat = s.trajectory.last().unwrap().x_hat;
    assert!((x_hat + 9.115).abs() < 0.1, "{x_hat}");
    assert_eq!(s.diagnostics.fallbacks, 0);
}

#[test]
fn zero_perturbation_gives_zero_deviation() {
    let (p, g) = setup(0.1, 0.1, 2.0);
    let rep = perturbation_decay(&p, &g, 0.0).unwrap();
    assert_eq!(rep.times, vec![0.0, 1.0, 2.0]);
    assert!(rep.deviation.iter().all(|&d| d == 0.0));
}

#[test]
fn perturbation_starts_at_its_amplitude() {
    let (p, g) = setup(0.1, 0.1, 1.0);
    let rep = perturbation_decay(&p, &g, 0.2).unwrap();
    assert!((rep.deviation[0] - 0.2).abs() < 1e-12);
    assert!(rep.deviation[1] < rep.deviation[0]);
}

#[test]
fn snapshot_times_outside_run_rejected() {
    let (p, g) = setup(0.0, 0.1, 1.0);
    let data = InitialData::SharpWave { shift: 0.0 };
    let res = run(&p, &g, |s, x| data.eval(s, x), &[2.0], SchemeKind::Sharp);
    assert!(matches!(res, Err(Error::Config(_))));
}

#[test]
fn edge_leaving_domain_is_reported() {
    let p = Problem::new(Kinetics::fisher_kpp(), 0.0).unwrap();
    let g = GridConfig::new(&p, -1.0, 10.0, 0.1, DEFAULT_CFL, 3.0).unwrap();
    let res = run(&p, &g, |_, x| sharpfront::scheme::sharp_wave(x), &[], SchemeKind::Sharp);
    assert_eq!(res.unwrap_err(), Error::EdgeLeftDomain);
}
