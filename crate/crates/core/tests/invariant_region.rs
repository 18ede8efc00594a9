use savanna_pulse::presets::preset;
use savanna_pulse::simulate::{run, Scheme};
use savanna_pulse::{Model, State};

// With negative competition, trees feed grass growth and grass can rise
// above its carrying level, so the box bound only holds for gamma_TG >= 0.
#[test]
fn facilitation_leaves_the_box() {
    let m = Model::new(preset("R1").unwrap().params).unwrap();
    assert!(m.params.gamma_tg < 0.0);
    let start = State::at(m.derived.x_g, m.derived.y_t);
    let traj = run(start, &m, 1, m.tau() / 1000.0, Scheme::Nsfd).unwrap();
    let peak = traj.states.iter().map(|s| s.grass).fold(0.0, f64::max);
    assert!(peak > m.derived.x_g * (1.0 + 1e-3), "peak {peak}");
}

#[test]
fn competition_keeps_the_box() {
    let mut p = preset("R1").unwrap().params;
    p.gamma_tg = 0.03;
    let m = Model::new(p).unwrap();
    let start = State::at(m.derived.x_g, m.derived.y_t);
    let traj = run(start, &m, 5, m.tau() / 1000.0, Scheme::Nsfd).unwrap();
    assert!(traj.states.iter().all(|s| m.in_invariant_region(s, 1e-9 * m.scale())));
}
