use std::f64::consts::PI;

use hybrid_qme::dynamics::{default_observables, evolve, EvolutionConfig};
use hybrid_qme::experiment::{run_pair, BRANCH_COLUMNS};
use hybrid_qme::metrics::{wigner, ModeSelection, WignerSpec};
use hybrid_qme::model::{slots, ModelParams, Truncations};
use hybrid_qme::operators::FockTruncation;
use hybrid_qme::states::{cat_state, initial_system_state, CatSpec, ParitySign};

fn tiny_model() -> ModelParams {
    ModelParams {
        truncations: Truncations::new([2, 2, 2, 4, 4]).unwrap(),
        ..ModelParams::default()
    }
}

fn short_run() -> EvolutionConfig {
    EvolutionConfig {
        t_end: 1.0,
        dt: 0.005,
        sample_every: 10,
        positivity_check_every: 1,
        ..EvolutionConfig::default()
    }
}

#[test]
fn paired_run_stays_physical() {
    let p = tiny_model();
    let cscs = CatSpec::coherent(0.7, ParitySign::Minus);
    let sscs = CatSpec::squeezed(0.7, ParitySign::Minus, 0.3, PI);
    let (a, b) = run_pair(&p, &cscs, &sscs, &short_run()).unwrap();
    assert_eq!(a.series.times(), b.series.times());
    assert_eq!(a.series.len(), 21);
    for br in [&a, &b] {
        let d = &br.diagnostics;
        assert!(d.max_trace_deviation() < 1e-10);
        assert!(d.max_hermiticity_drift() < 1e-12);
        assert!(d.lowest_eigenvalue() > -1e-9);
        let f = br.series.column("fidelity").unwrap();
        assert!((f[0] - 1.0).abs() < 1e-12);
        assert!(f.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        let c = br.series.column("concurrence").unwrap();
        assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
        for name in ["nve1_pop", "nve2_pop", "plus", "minus", "projection_weight"] {
            assert!(br.series.column(name).unwrap().iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        }
        assert_eq!(br.series.names(), BRANCH_COLUMNS);
    }
    // squeezing changes the dynamics
    let fa = a.series.column("fidelity").unwrap();
    let fb = b.series.column("fidelity").unwrap();
    assert!(fa.iter().zip(fb).any(|(x, y)| (x - y).abs() > 1e-4));
}

#[test]
fn generic_evolution_agrees_with_the_paired_runner() {
    let p = tiny_model();
    let cat = CatSpec::coherent(0.7, ParitySign::Minus);
    let cfg = short_run();
    let (branch, _) = run_pair(&p, &cat, &cat, &cfg).unwrap();

    let space = p.space().unwrap();
    let t = &p.truncations;
    let st = cat_state(&cat, t.fock(slots::RES1), t.fock(slots::RES2)).unwrap();
    let rho0 = initial_system_state(&st, &space).unwrap();
    let obs = default_observables(&space, &cat).unwrap();
    let ev = evolve(&rho0, &p, &cfg, &obs).unwrap();
    assert_eq!(ev.series.times(), branch.series.times());
    for (name, _) in &obs {
        let x = ev.series.column(name).unwrap();
        let y = branch.series.column(name).unwrap();
        let dev = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "{name}: {dev}");
    }
    let dev = (&ev.final_state - &branch.final_state)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-12);
}

#[test]
fn odd_two_mode_cat_has_negative_joint_parity() {
    let n = FockTruncation::new(14).unwrap();
    let st = cat_state(&CatSpec::coherent(1.5, ParitySign::Minus), n, n).unwrap();
    let rho = st.density_matrix();
    let spec = WignerSpec {
        nx: 21,
        np: 21,
        ..WignerSpec::default()
    };
    let cut = wigner(&rho, &st.space, &spec).unwrap();
    assert_eq!(cut.mode, ModeSelection::CorrelatedCut);
    assert!((cut.nearest(hybrid_qme::C64::new(0.0, 0.0)) + 2.0 / PI).abs() < 1e-9);

    // each mode alone is a classical mixture near the origin
    let reduced = wigner(
        &rho,
        &st.space,
        &WignerSpec {
            mode: ModeSelection::ReducedMode1,
            ..spec
        },
    )
    .unwrap();
    assert!(reduced.min() > -1e-3);
    assert!((reduced.integral() - 1.0).abs() < 2e-2);
}

#[test]
fn model_round_trips_through_json() {
    let p = ModelParams {
        kappa: 0.07,
        omega_q: Some(2.5),
        ..tiny_model()
    };
    let text = serde_json::to_string(&p).unwrap();
    let back: ModelParams = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
    assert!(serde_json::from_str::<ModelParams>(r#"{"kapa": 1.0}"#).is_err());
}
