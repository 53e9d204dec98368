use nsac_core::psystem::{Family, GasLaw};
use nsac_core::riemann::{
    hugoniot_right_state, interaction_point, solve_outgoing_fan, wave_strength, EndStates, ShockWave, WaveFan,
};
use proptest::prelude::*;

/// `∫_{a}^{b} -√γ s^{-(γ+1)/2} ds`, written out independently of the library.
fn lambda1_integral(gamma: f64, a: f64, b: f64) -> f64 {
    let k = (1.0 - gamma) / 2.0;
    -gamma.sqrt() * (b.powf(k) - a.powf(k)) / k
}

fn sound(gamma: f64, v: f64) -> f64 {
    (gamma * v.powf(-gamma - 1.0)).sqrt()
}

#[test]
fn fixture_values() {
    let law: GasLaw = GasLaw::new(2.0).unwrap();
    let fan: WaveFan = WaveFan::solve(EndStates::from_chain(law, 1.0, 0.0, 1.2, 1.4).unwrap()).unwrap();
    let (rear, front) = fan.incoming_pair().unwrap();
    assert!((rear.speed - 1.2360330811826103).abs() < 1e-14);
    assert!((front.speed - 0.959792589083161).abs() < 1e-14);
    let (x0, t0) = fan.interaction.unwrap();
    assert!((t0 - 1.0 / (rear.speed - front.speed)).abs() < 1e-13);
    assert!((x0 - rear.speed * t0).abs() < 1e-13);
    assert!((fan.v_m - 1.0012067621695895).abs() < 1e-12);
    assert!((fan.u_m - 0.0017050763656491683).abs() < 1e-12);
    assert!((fan.s_tilde2().unwrap() - 1.1055107474171522).abs() < 1e-12);
}

#[test]
fn entropy_solution_pieces() {
    let law: GasLaw = GasLaw::new(2.0).unwrap();
    let fan: WaveFan = WaveFan::solve(EndStates::from_chain(law, 1.0, 0.0, 1.2, 1.4).unwrap()).unwrap();
    let (x0, t0) = fan.interaction.unwrap();
    let es = fan.end_states;
    assert_eq!(fan.eval_entropy_solution(-1.0, 0.5), es.minus());
    assert_eq!(fan.eval_entropy_solution(0.5, 0.0), es.star());
    assert_eq!(fan.eval_entropy_solution(2.0, 0.0), es.plus());
    // inside the outgoing fan the volume follows λ₁(v) = (x - x0)/(t - t0)
    let rare = fan.outgoing_rarefaction.unwrap();
    let t = t0 + 10.0;
    let w = 0.5 * (rare.w_left + rare.w_right);
    let (v, _) = fan.eval_entropy_solution(x0 + w * (t - t0), t);
    assert!((-sound(2.0, v) - w).abs() < 1e-10);
    let (v, u) = fan.eval_entropy_solution(x0 + 0.5 * (rare.w_right + fan.s_tilde2().unwrap()) * (t - t0), t);
    assert_eq!((v, u), (fan.v_m, fan.u_m));
}

#[test]
fn refuses_bad_configurations() {
    let law: GasLaw = GasLaw::new(2.0).unwrap();
    assert!(EndStates::from_chain(law, 1.2, 0.0, 1.0, 1.4).is_err());
    assert!(hugoniot_right_state(1.0, 0.0, 0.9, &law).is_err());
    assert!(interaction_point(0.9, 1.2).is_err());
    assert!(solve_outgoing_fan(1.4, 0.0, 1.0, 0.0, &law).is_err());
    let single: WaveFan = WaveFan::solve(EndStates::from_chain(law, 1.0, 0.0, 1.0, 1.4).unwrap()).unwrap();
    assert!(single.interaction.is_none());
    assert!(single.interaction_point().is_err());
    let trivial: WaveFan = WaveFan::solve(EndStates::from_chain(law, 1.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
    assert!(trivial.is_trivial());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shocks_satisfy_rankine_hugoniot_and_lax(
        gamma in 1.2f64..3.0,
        v_l in 0.5f64..2.0,
        jump in 1e-3f64..0.5,
        u_l in -1.0f64..1.0,
    ) {
        let law: GasLaw = GasLaw::new(gamma).unwrap();
        let s = ShockWave::second_family(v_l, u_l, v_l + jump, &law).unwrap();
        let (m, p) = s.rh_residuals(&law);
        prop_assert!(m.abs() <= 1e-12 && p.abs() <= 1e-12, "residuals {m:e} {p:e}");
        prop_assert!(sound(gamma, s.right.0) < s.speed && s.speed < sound(gamma, s.left.0));
        prop_assert!(s.satisfies_lax(&law));
        prop_assert_eq!(s.family, Family::Second);
        // u decreases across a 2-shock with growing volume
        prop_assert!(s.right.1 < s.left.1);
    }

    #[test]
    fn strengths_are_reproduced(gamma in 1.2f64..3.0, d1 in 1e-3f64..0.3, d2 in 1e-3f64..0.3) {
        let law: GasLaw = GasLaw::new(gamma).unwrap();
        let es = EndStates::from_strengths(law, 1.0, 0.0, d1, d2).unwrap();
        prop_assert!((wave_strength(es.minus(), es.star()) - d1).abs() < 1e-12);
        prop_assert!((wave_strength(es.star(), es.plus()) - d2).abs() < 1e-12);
    }

    #[test]
    fn interaction_lies_on_both_shock_lines(gamma in 1.2f64..3.0, d1 in 1e-3f64..0.3, d2 in 1e-3f64..0.3, offset in 0.1f64..5.0) {
        let law: GasLaw = GasLaw::new(gamma).unwrap();
        let fan: WaveFan = WaveFan::solve_with_offset(EndStates::from_strengths(law, 1.0, 0.0, d1, d2).unwrap(), offset).unwrap();
        let (rear, front) = fan.incoming_pair().unwrap();
        prop_assert!(rear.speed > front.speed);
        let (x0, t0) = fan.interaction.unwrap();
        prop_assert!(t0 > 0.0);
        prop_assert!((x0 - rear.speed * t0).abs() <= 1e-12 * (1.0 + x0.abs()));
        prop_assert!((x0 - offset - front.speed * t0).abs() <= 1e-12 * (1.0 + x0.abs()));
    }

    #[test]
    fn outgoing_fan_relations(gamma in 1.2f64..3.0, d1 in 1e-3f64..0.3, d2 in 1e-3f64..0.3) {
        let law: GasLaw = GasLaw::new(gamma).unwrap();
        let fan: WaveFan = WaveFan::solve(EndStates::from_strengths(law, 1.0, 0.0, d1, d2).unwrap()).unwrap();
        let es = fan.end_states;
        prop_assert!(es.v_minus <= fan.v_m && fan.v_m < es.v_plus);
        // 1-rarefaction curve
        let u_rare = es.u_minus - lambda1_integral(gamma, es.v_minus, fan.v_m);
        prop_assert!((fan.u_m - u_rare).abs() <= 1e-10);
        // 2-shock from (v_m, u_m) to (v₊, u₊)
        let s = fan.s_tilde2().unwrap();
        let dv = es.v_plus - fan.v_m;
        let du = es.u_plus - fan.u_m;
        let dp = es.v_plus.powf(-gamma) - fan.v_m.powf(-gamma);
        prop_assert!((s * dv + du).abs() <= 1e-10);
        prop_assert!((-s * du + dp).abs() <= 1e-10);
        prop_assert!(sound(gamma, es.v_plus) < s && s < sound(gamma, fan.v_m));
        // the outgoing 2-shock carries roughly the combined strength
        let st = fan.strengths;
        prop_assert!((st.delta2_out - st.delta1 - st.delta2).abs() <= 5.0 * st.delta1 * st.delta2);
    }
}
