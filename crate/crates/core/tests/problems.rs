use hyperpint::problems::{
    acoustics_defaults, acoustics_pressure, material_functions, material_max_speed, random_layers,
    AcousticsProblem, MaterialId, NonlinearProblem, NonlinearProblemId, DEFAULT_SEED,
};
use hyperpint::Boundary;

#[test]
fn pressure_pulse_spot_values() {
    assert!((acoustics_pressure(0.5) - 2.5).abs() < 1e-15);
    assert!((acoustics_pressure(0.45) - 1.75).abs() < 1e-14);
    assert_eq!(acoustics_pressure(0.4), 1.0);
    assert_eq!(acoustics_pressure(0.8), 1.0);
}

#[test]
fn materials_at_sample_points() {
    let f = material_functions(MaterialId::SmoothSpeed, DEFAULT_SEED);
    assert!((f(0.05).0 - 1.5).abs() < 1e-15 && f(0.05).1 == 1.0);
    let f = material_functions(MaterialId::Smooth, DEFAULT_SEED);
    assert!((f(0.0).1 - 1.25).abs() < 1e-15);
    let f = material_functions(MaterialId::Slab, DEFAULT_SEED);
    assert_eq!(f(0.5), (2.0, 2.0));
    assert_eq!(f(0.1), (0.6, 6.0));
    let f = material_functions(MaterialId::Layered, DEFAULT_SEED);
    assert_eq!(f(0.01), (1.0, 1.0));
    assert_eq!(f(0.07), (1.0, 2.0));
    let f = material_functions(MaterialId::RandomLayered, 7);
    let (c, z) = random_layers(7);
    assert_eq!(f(0.99), (c[15], z[15]));
    assert_eq!(random_layers(7), random_layers(7));
    assert_ne!(random_layers(7).0, random_layers(8).0);
    assert!(c.iter().chain(&z).all(|v| (0.5..=2.5).contains(v)));
    assert_eq!(material_max_speed(MaterialId::RandomLayered, 7), c.iter().cloned().fold(0.0, f64::max));
}

#[test]
fn acoustics_time_steps() {
    let (dt, nt) = acoustics_defaults(MaterialId::SmoothSpeed, 256, 0.85, DEFAULT_SEED).unwrap();
    assert!(dt <= 0.85 / (256.0 * 1.5));
    assert!(((nt - 1) as f64 * dt - 1.0).abs() < 1e-14);
    assert_eq!(nt, (256.0f64 * 1.5 / 0.85).ceil() as usize + 1);
    let (dt, _) = acoustics_defaults(MaterialId::Slab, 128, 0.85, DEFAULT_SEED).unwrap();
    assert!(dt <= 0.85 / 128.0 / 2.0 && dt > 0.8 / 128.0 / 2.0);
    let (dt, _) = acoustics_defaults(MaterialId::Layered, 128, 0.85, DEFAULT_SEED).unwrap();
    assert!(dt <= 0.85 / 128.0 && dt > 0.8 / 128.0);
    let p = AcousticsProblem::new(MaterialId::Smooth, 64, None, 0.85, DEFAULT_SEED).unwrap();
    assert_eq!(p.grid().bc(), Boundary::Periodic);
    assert!(p.q0[64..].iter().all(|u| *u == 0.0));
    assert!(AcousticsProblem::new(MaterialId::Smooth, 64, Some(3), 0.85, DEFAULT_SEED).is_err());
    assert!(MaterialId::from_index(6).is_err() && MaterialId::from_index(0).is_err());
    assert_eq!(MaterialId::from_index(3).unwrap(), MaterialId::Slab);
}

#[test]
fn nonlinear_initial_states() {
    let idp = NonlinearProblem::new(NonlinearProblemId::Idp, 0.1).unwrap();
    assert!((idp.initial_state(2.5)[0] - 1.1).abs() < 1e-15);
    assert_eq!(idp.initial_state(2.5)[1], 0.0);
    let idpp = NonlinearProblem::new(NonlinearProblemId::Idpp, 0.2).unwrap();
    let s = idpp.initial_state(2.5);
    // p = rho, u = 0
    assert!((s[0] - 1.2).abs() < 1e-15 && (0.4 * s[2] - 1.2).abs() < 1e-14);
    let db = NonlinearProblem::new(NonlinearProblemId::DamBreak, 0.5).unwrap();
    assert_eq!(db.initial_state(-1.0)[0], 1.5);
    assert_eq!(db.initial_state(1.0)[0], 1.0);
    assert_eq!(db.bc, Boundary::Extrapolate);
    let sod = NonlinearProblem::new(NonlinearProblemId::Sod, 0.125).unwrap();
    assert_eq!(sod.initial_state(0.25)[0], 1.0);
    assert_eq!(sod.initial_state(0.75)[0], 0.875);
    assert!((sod.initial_state(0.75)[2] - 0.875 / 0.4).abs() < 1e-15);
    assert!(NonlinearProblem::new(NonlinearProblemId::Idp, -1.5).is_err());
    assert!(NonlinearProblem::new(NonlinearProblemId::Sod, f64::NAN).is_err());
}

#[test]
fn problem_names_parse() {
    for (s, id) in [
        ("idp", NonlinearProblemId::Idp),
        ("IDPP", NonlinearProblemId::Idpp),
        ("dam-break", NonlinearProblemId::DamBreak),
        ("db", NonlinearProblemId::DamBreak),
        ("sod", NonlinearProblemId::Sod),
    ] {
        assert_eq!(NonlinearProblemId::parse(s).unwrap(), id);
        assert_eq!(NonlinearProblemId::parse(id.name()).unwrap(), id);
    }
    assert!(NonlinearProblemId::parse("riemann").is_err());
    assert!(NonlinearProblemId::Sod.is_euler() && !NonlinearProblemId::Idp.is_euler());
}

#[test]
fn discrete_initial_uses_cell_centres() {
    let idp = NonlinearProblem::new(NonlinearProblemId::Idp, 0.1).unwrap();
    let g = idp.grid(40, None, None).unwrap();
    let q0 = idp.discrete_initial(&g);
    assert_eq!(q0.len(), 80);
    // h = 0.25, centre of cell 30 is 2.625
    assert!((q0[30] - idp.initial_state(2.625)[0]).abs() < 1e-15);
    assert!(((g.nt() - 1) as f64 * g.dt() - 10.0).abs() < 1e-12);
    let g = idp.grid(40, None, Some(11)).unwrap();
    assert_eq!(g.nt(), 11);
}
