//! Exact within-period solutions, the one-period (stroboscopic) map and the
//! two periodic orbits: the grassland orbit `(G̃_e(t), 0)` and the savanna
//! orbit `(G̃*(t), T̃*(t))`.
//!
//! Post-fire values are the natural coordinates of the period map: `G*` and
//! `T*` are the biomasses just after a fire, and a period runs from one
//! post-fire state to the next. The fire-intensity argument is always built
//! from the pre-fire grass `G*/(1 - λ_fG)`, exactly as the impulse map does
//! during simulation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{apply_impulse, Model, State};
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH};
use crate::roots::bisect_secant;
use crate::stability::r_pulse_ge;

/// Default number of phases sampled along an orbit.
pub const DEFAULT_ORBIT_SAMPLES: usize = 512;
/// Default number of grid points used to bracket roots of `h`.
pub const DEFAULT_H_SCAN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    Grassland,
    Savanna,
}

/// A τ-periodic solution, described by its post-fire state and samples over
/// one period. Sample times are phases in `[0, τ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub kind: OrbitKind,
    pub g_star: f64,
    pub t_star: f64,
    pub tau: f64,
    pub samples: Vec<State>,
}

impl PeriodicOrbit {
    /// The state just before the fire that closes the period.
    pub fn pre_fire(&self, m: &Model) -> Result<State> {
        let g = grass_within_period(self.g_star, self.t_star, self.tau, m)?;
        let t = tree_within_period(self.t_star, self.tau, m);
        Ok(State::new(g, t, self.tau))
    }

    pub fn post_fire(&self) -> State {
        State::new(self.g_star, self.t_star, 0.0)
    }

    /// Residual of the period map at the post-fire state.
    pub fn residual(&self, m: &Model) -> Result<(f64, f64)> {
        let (g, t) = period_map(self.g_star, self.t_star, m)?;
        Ok(((g - self.g_star).abs(), (t - self.t_star).abs()))
    }

    fn sample(kind: OrbitKind, g_star: f64, t_star: f64, m: &Model, n: usize) -> Result<Self> {
        let tau = m.tau();
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let phase = tau * k as f64 / n as f64;
            let g = match kind {
                OrbitKind::Grassland => grassland_orbit_value(phase, m)?,
                OrbitKind::Savanna => grass_within_period(g_star, t_star, phase, m)?,
            };
            let t = tree_within_period(t_star, phase, m);
            samples.push(State::new(g, t, phase));
        }
        Ok(PeriodicOrbit {
            kind,
            g_star,
            t_star,
            tau,
            samples,
        })
    }
}

fn grassland_absent(m: &Model) -> Error {
    Error::Existence {
        what: "grassland periodic orbit",
        threshold: "R_pulse_Ge",
        value: r_pulse_ge(m),
        requirement: "> 1",
    }
}

/// Post-fire grass on the grassland orbit,
/// `X_G ((1 - λ_fG) e^{r_G τ} - 1) / (e^{r_G τ} - 1)`.
pub fn grassland_post_fire(m: &Model) -> Result<f64> {
    let d = &m.derived;
    let p = &m.params;
    let growth = (d.r_g * p.tau).exp();
    let excess = (1.0 - p.lambda_fg) * growth - 1.0;
    if !(excess > 0.0) {
        return Err(grassland_absent(m));
    }
    Ok(d.x_g * excess / (d.r_g * p.tau).exp_m1())
}

/// Pre-fire grass on the grassland orbit: the limit of `G̃_e` as the phase
/// approaches `τ` from below.
pub fn grassland_pre_fire(m: &Model) -> Result<f64> {
    Ok(grassland_post_fire(m)? / (1.0 - m.params.lambda_fg))
}

/// `G̃_e(phase)` for `phase ∈ [0, τ]`; the value at `τ` is the pre-fire limit.
pub fn grassland_orbit_value(phase: f64, m: &Model) -> Result<f64> {
    let d = &m.derived;
    let p = &m.params;
    if !(0.0..=p.tau).contains(&phase) {
        return Err(Error::Domain(format!("phase {phase} outside [0, {}]", p.tau)));
    }
    let growth = (d.r_g * p.tau).exp();
    let a = (1.0 - p.lambda_fg) * growth - 1.0;
    if !(a > 0.0) {
        return Err(grassland_absent(m));
    }
    let rise = a * (d.r_g * phase).exp();
    Ok(d.x_g * rise / (rise + p.lambda_fg * growth))
}

/// Exact logistic tree growth from `t0` over `dt`.
pub fn tree_within_period(t0: f64, dt: f64, m: &Model) -> f64 {
    let d = &m.derived;
    let q = t0 / d.y_t;
    // This form keeps 0 and Y_T fixed exactly.
    t0 / (q + (1.0 - q) * (-d.r_t * dt).exp())
}

/// Grass growth factor `χ(dt; T0) = exp{r_G dt - (γ_TG/μ_T) ln[1 + (T0/Y_T)(e^{r_T dt} - 1)]}`.
pub fn chi(dt: f64, t0: f64, m: &Model) -> f64 {
    let d = &m.derived;
    let shading = (t0 / d.y_t * (d.r_t * dt).exp_m1()).ln_1p();
    (d.r_g * dt - m.params.gamma_tg / d.mu_t * shading).exp()
}

/// `∫₀^dt χ(u; T0) du`, in closed form when the grass is decoupled from trees.
pub fn chi_integral(dt: f64, t0: f64, m: &Model) -> Result<f64> {
    let d = &m.derived;
    if t0 == 0.0 || m.params.gamma_tg == 0.0 {
        return Ok((d.r_g * dt).exp_m1() / d.r_g);
    }
    if dt == 0.0 {
        return Ok(0.0);
    }
    let peak = 1f64.max(chi(dt, t0, m)).max((d.r_g * m.params.tau).exp());
    adaptive_simpson(|u| chi(u, t0, m), 0.0, dt, 1e-12 * peak, DEFAULT_MAX_DEPTH)
}

/// Exact grass biomass after `dt` years without fire, starting from `(g0, t0)`.
pub fn grass_within_period(g0: f64, t0: f64, dt: f64, m: &Model) -> Result<f64> {
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let integral = chi_integral(dt, t0, m)?;
    Ok(g0 * chi(dt, t0, m) / (1.0 + m.derived.mu_g * g0 * integral))
}

/// The one-period map: post-fire state at `nτ` to post-fire state at `(n+1)τ`.
pub fn period_map(g: f64, t: f64, m: &Model) -> Result<(f64, f64)> {
    let tau = m.tau();
    let pre = State::new(grass_within_period(g, t, tau, m)?, tree_within_period(t, tau, m), tau);
    let (post, _) = apply_impulse(&pre, &m.params);
    Ok((post.grass, post.tree))
}

/// `φ(y)`: the post-fire grass that the grass map holds fixed when the
/// post-fire tree biomass is `y`. Negative when grass cannot persist.
pub fn phi(y: f64, m: &Model) -> Result<f64> {
    let tau = m.tau();
    let integral = chi_integral(tau, y, m)?;
    Ok(((1.0 - m.params.lambda_fg) * chi(tau, y, m) - 1.0) / (m.derived.mu_g * integral))
}

/// Residual of the tree fixed-point condition once the grass is slaved to
/// `φ(y)`. Roots are post-fire tree biomasses of periodic orbits; `φ` is
/// clamped at 0, where grass is extinct and the fire does nothing to trees.
pub fn h_function(y: f64, m: &Model) -> Result<f64> {
    let y_t = m.derived.y_t;
    if !(y >= -1e-12 * y_t && y <= y_t * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("h(y) needs y in [0, {y_t}], got {y}")));
    }
    let y = y.clamp(0.0, y_t);
    let p = &m.params;
    let growth = (m.derived.r_t * p.tau).exp();
    let pre_fire_grass = phi(y, m)?.max(0.0) / (1.0 - p.lambda_fg);
    Ok(y / y_t * (growth - 1.0) + p.tree_kill_fraction(pre_fire_grass) * growth - (growth - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// `h` goes from negative to positive.
    Upward,
    /// `h` goes from positive to negative.
    Downward,
}

/// A post-fire fixed point of the period map with both biomasses positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoexistencePoint {
    pub g_star: f64,
    pub t_star: f64,
    pub crossing: Crossing,
}

/// Grid values of `h` on `n + 1` uniform points of `[0, Y_T]`.
pub fn h_scan(m: &Model, n: usize) -> Result<Vec<(f64, f64)>> {
    let y_t = m.derived.y_t;
    (0..=n)
        .map(|k| {
            let y = if k == n { y_t } else { y_t * k as f64 / n as f64 };
            h_function(y, m).map(|h| (y, h))
        })
        .collect()
}

/// Number of strict sign changes of `h` over an `n`-interval scan.
pub fn h_sign_changes(m: &Model, n: usize) -> Result<usize> {
    let scan = h_scan(m, n)?;
    Ok(crossings(&scan).len())
}

fn crossings(scan: &[(f64, f64)]) -> Vec<(usize, Crossing)> {
    let last = scan.len().saturating_sub(1);
    let mut out = Vec::new();
    for i in 0..last {
        let (h0, h1) = (scan[i].1, scan[i + 1].1);
        // A root exactly at Y_T counts once, from the last cell.
        let up_end = i + 1 == last && h1 == 0.0;
        if h0 < 0.0 && (h1 > 0.0 || up_end) {
            out.push((i, Crossing::Upward));
        } else if h0 > 0.0 && h1 < 0.0 {
            out.push((i, Crossing::Downward));
        }
    }
    out
}

/// Every coexistence fixed point found by scanning `h` on `n` cells and
/// refining each sign change.
pub fn coexistence_points(m: &Model, n: usize) -> Result<Vec<CoexistencePoint>> {
    let scan = h_scan(m, n)?;
    let xtol = 1e-12 * m.derived.y_t;
    let mut points = Vec::new();
    for (i, crossing) in crossings(&scan) {
        let (a, b) = (scan[i].0, scan[i + 1].0);
        let t_star = bisect_secant(|y| h_function(y, m), a, b, xtol)?;
        let g_star = phi(t_star, m)?;
        if g_star > 0.0 && t_star > 0.0 {
            points.push(CoexistencePoint {
                g_star,
                t_star,
                crossing,
            });
        }
    }
    Ok(points)
}

/// The savanna orbit: the first upward root of `h` on `[0, Y_T]`.
///
/// When the forest is unstable to grass invasion `h(0) < 0 < h(Y_T)` and the
/// root is bracketed by the end points. When the forest is stable `h(Y_T)` is
/// 0 and a savanna exists only if `h` rises above zero in between, in which
/// case the downward root after it is a saddle and is not returned here.
pub fn solve_savanna_fixed_point(m: &Model) -> Result<PeriodicOrbit> {
    solve_savanna_with(m, DEFAULT_H_SCAN, DEFAULT_ORBIT_SAMPLES)
}

pub fn solve_savanna_with(m: &Model, scan: usize, samples: usize) -> Result<PeriodicOrbit> {
    let rpg = r_pulse_ge(m);
    if !(rpg > 1.0) {
        return Err(grassland_absent(m));
    }
    let h0 = h_function(0.0, m)?;
    if !(h0 < 0.0) {
        return Err(Error::Existence {
            what: "savanna periodic orbit",
            threshold: "R_pulse_star",
            value: crate::stability::r_pulse_star(m).unwrap_or(f64::NAN),
            requirement: "> 1",
        });
    }
    let points = coexistence_points(m, scan)?;
    if let Some(pt) = points.iter().find(|pt| pt.crossing == Crossing::Upward) {
        return PeriodicOrbit::sample(OrbitKind::Savanna, pt.g_star, pt.t_star, m, samples);
    }
    let h_end = h_function(m.derived.y_t, m)?;
    if h_end > 0.0 {
        return Err(Error::Bracket(format!(
            "h(0) = {h0:e} < 0 < h(Y_T) = {h_end:e} but no root was found"
        )));
    }
    Err(Error::Existence {
        what: "savanna periodic orbit",
        threshold: "nu_1",
        value: crate::stability::trivial_equilibria_eigenvalues(m).nu1,
        requirement: "> 1, or an interior rise of h above 0",
    })
}

/// The grassland orbit `(G̃_e(t), 0)`.
pub fn grassland_orbit(m: &Model) -> Result<PeriodicOrbit> {
    grassland_orbit_with(m, DEFAULT_ORBIT_SAMPLES)
}

pub fn grassland_orbit_with(m: &Model, samples: usize) -> Result<PeriodicOrbit> {
    let g_star = grassland_post_fire(m)?;
    PeriodicOrbit::sample(OrbitKind::Grassland, g_star, 0.0, m, samples)
}

/// Integrals of grass and tree biomass over one period of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitIntegrals {
    pub grass: f64,
    pub tree: f64,
}

/// `∫₀^τ G̃` and `∫₀^τ T̃` along `orbit`.
///
/// The grass integral is `(1/μ_G) ln(1 + μ_G G* ∫χ)`. On the savanna orbit
/// the tree integral uses the fixed-point identity
/// `(1/μ_T)[ln(1 - λ_fT ω) + r_T τ]`; on the grassland orbit it is 0.
pub fn orbit_integrals(orbit: &PeriodicOrbit, m: &Model) -> Result<OrbitIntegrals> {
    let d = &m.derived;
    let tau = m.tau();
    let integral = chi_integral(tau, orbit.t_star, m)?;
    let grass = (d.mu_g * orbit.g_star * integral).ln_1p() / d.mu_g;
    let tree = match orbit.kind {
        OrbitKind::Grassland => 0.0,
        OrbitKind::Savanna => {
            let pre_fire_grass = orbit.g_star / (1.0 - m.params.lambda_fg);
            ((-m.params.tree_kill_fraction(pre_fire_grass)).ln_1p() + d.r_t * tau) / d.mu_t
        }
    };
    Ok(OrbitIntegrals { grass, tree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{r1_params, OmegaArg, VegetationParams};

    fn r1(gamma_tg: f64) -> Model {
        Model::new(r1_params(gamma_tg)).unwrap()
    }

    fn fig7(tau: f64) -> Model {
        Model::new(VegetationParams {
            gamma_g: 3.1,
            delta_g0: 0.1,
            k_g: 19.0,
            gamma_t: 1.5,
            delta_t: 0.015,
            k_t: 65.0,
            gamma_tg: 0.04,
            lambda_fg: 0.5,
            lambda_ft: 0.6,
            alpha: 2.0,
            theta: 2.0,
            tau,
            omega_arg_convention: OmegaArg::StandingGrass,
        })
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn grassland_post_fire_values() {
        let g = grassland_post_fire(&r1(0.03)).unwrap();
        let expected = 4.0 * (0.5 * 8.4f64.exp() - 1.0) / 8.4f64.exp_m1();
        assert!(rel(g, expected) < 1e-14);
        assert!((g - 1.9996).abs() < 1e-4);
        let g7 = grassland_post_fire(&fig7(0.5)).unwrap();
        assert!((g7 - 6.553).abs() < 1e-3);
    }

    #[test]
    fn grassland_orbit_shape() {
        let m = r1(0.03);
        let post = grassland_post_fire(&m).unwrap();
        assert!(rel(grassland_orbit_value(0.0, &m).unwrap(), post) < 1e-14);
        let pre = grassland_orbit_value(m.tau(), &m).unwrap();
        assert!(rel(pre, post / 0.5) < 1e-14);
        let mut prev = 0.0;
        for k in 0..100 {
            let v = grassland_orbit_value(12.0 * k as f64 / 100.0, &m).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(grassland_orbit_value(12.5, &m).is_err());
    }

    #[test]
    fn grassland_without_grass_fire_sits_at_cap() {
        let mut p = r1_params(0.03);
        p.lambda_fg = 1e-12;
        let m = Model::new(p).unwrap();
        for phase in [0.0, 3.0, 11.9] {
            assert!(rel(grassland_orbit_value(phase, &m).unwrap(), 4.0) < 1e-9);
        }
    }

    #[test]
    fn grassland_existence_error() {
        let mut p = r1_params(0.03);
        p.gamma_g = 0.05;
        p.lambda_fg = 0.9;
        p.tau = 1.0;
        let m = Model::new(p).unwrap();
        assert!(matches!(
            grassland_post_fire(&m),
            Err(Error::Existence { threshold: "R_pulse_Ge", .. })
        ));
    }

    #[test]
    fn tree_logistic() {
        let m = r1(0.03);
        assert_eq!(tree_within_period(14.0, 5.0, &m), 14.0);
        assert_eq!(tree_within_period(0.0, 5.0, &m), 0.0);
        let v = tree_within_period(7.0, 12.0, &m);
        let e9 = 9f64.exp();
        assert!(rel(v, 7.0 * e9 / (1.0 + 0.5 * (e9 - 1.0))) < 1e-14);
        assert!((v - 13.9983).abs() < 1e-4);
    }

    #[test]
    fn chi_values() {
        let m = r1(0.03);
        assert_eq!(chi(0.0, 5.0, &m), 1.0);
        let m0 = r1(0.0);
        assert!(rel(chi(3.0, 9.0, &m0), (0.7f64 * 3.0).exp()) < 1e-15);
        // r_G = 3, γ_TG = 0.09, μ_T = 0.03, r_T = 1.485, Y_T = 49.5.
        let p = VegetationParams {
            gamma_g: 3.1,
            delta_g0: 0.1,
            k_g: 19.0,
            gamma_t: 1.5,
            delta_t: 0.015,
            k_t: 50.0,
            gamma_tg: 0.09,
            lambda_fg: 0.5,
            lambda_ft: 0.6,
            alpha: 2.0,
            theta: 2.0,
            tau: 0.5,
            omega_arg_convention: OmegaArg::BurntGrass,
        };
        let m = Model::new(p).unwrap();
        let expected = (1.5 - 3.0 * 0.7425f64).exp();
        assert!(rel(chi(0.5, 49.5, &m), expected) < 1e-13);
    }

    #[test]
    fn grass_reduces_to_logistic_without_trees() {
        let m = r1(0.03);
        for (g0, dt) in [(1.0, 0.5), (3.5, 12.0), (0.01, 7.0)] {
            let e = (0.7f64 * dt).exp();
            let logistic = g0 * e / (1.0 + g0 / 4.0 * (e - 1.0));
            assert!(rel(grass_within_period(g0, 0.0, dt, &m).unwrap(), logistic) < 1e-12);
        }
        assert_eq!(grass_within_period(0.0, 3.0, 2.0, &m).unwrap(), 0.0);
    }

    #[test]
    fn period_map_trivial_points() {
        let m = r1(0.03);
        assert_eq!(period_map(0.0, 0.0, &m).unwrap(), (0.0, 0.0));
        let (g, t) = period_map(0.0, 3.0, &m).unwrap();
        assert_eq!(g, 0.0);
        let e = (0.75f64 * 12.0).exp();
        assert!(rel(t, 3.0 * e / (1.0 + 3.0 / 14.0 * (e - 1.0))) < 1e-13);
        let mut t = 1.0;
        for _ in 0..20 {
            t = period_map(0.0, t, &m).unwrap().1;
        }
        assert!(rel(t, 14.0) < 1e-12);
    }

    #[test]
    fn phi_at_zero_is_grassland_level() {
        let m = r1(0.03);
        assert!(rel(phi(0.0, &m).unwrap(), grassland_post_fire(&m).unwrap()) < 1e-12);
    }

    #[test]
    fn h_without_tree_damage() {
        let mut p = r1_params(0.03);
        p.lambda_ft = 0.0;
        let m = Model::new(p).unwrap();
        let e = (0.75f64 * 12.0).exp();
        for y in [0.0, 3.0, 14.0] {
            let h = h_function(y, &m).unwrap();
            assert!((h - (y / 14.0 - 1.0) * (e - 1.0)).abs() < 1e-9 * e);
        }
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        assert_eq!(orbit.t_star, 14.0);
        assert!(rel(orbit.g_star, phi(14.0, &m).unwrap()) < 1e-12);
    }

    #[test]
    fn h_domain() {
        let m = r1(0.03);
        assert!(matches!(h_function(-1.0, &m), Err(Error::Domain(_))));
        assert!(matches!(h_function(14.5, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn h_brackets_r1_savanna() {
        let m = r1(0.03);
        assert!(h_function(0.0, &m).unwrap() < 0.0);
        assert!(h_function(14.0, &m).unwrap() > 0.0);
    }

    #[test]
    fn savanna_fixed_point_r1() {
        let m = r1(0.03);
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        let (dg, dt) = orbit.residual(&m).unwrap();
        assert!(dg < 1e-8 * 14.0 && dt < 1e-8 * 14.0, "{dg} {dt}");
        assert_eq!(orbit.samples.len(), DEFAULT_ORBIT_SAMPLES);
        assert_eq!(h_sign_changes(&m, 10_000).unwrap(), 1);
    }

    #[test]
    fn decoupled_savanna() {
        let m = r1(0.0);
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        let ge = grassland_post_fire(&m).unwrap();
        assert!(rel(orbit.g_star, ge) < 1e-12);
        let e = (0.75f64 * 12.0).exp();
        let kill = m.params.tree_kill_fraction(ge / 0.5);
        let t_star = 14.0 * ((1.0 - kill) * e - 1.0) / (e - 1.0);
        assert!(rel(orbit.t_star, t_star) < 1e-10);
    }

    #[test]
    fn no_savanna_when_forest_dominates() {
        let m = r1(0.051);
        assert!(matches!(
            solve_savanna_fixed_point(&m),
            Err(Error::Existence { what: "savanna periodic orbit", .. })
        ));
    }

    #[test]
    fn bistable_savanna_has_a_saddle_partner() {
        let m = fig7(0.6);
        let pts = coexistence_points(&m, DEFAULT_H_SCAN).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].crossing, Crossing::Upward);
        assert_eq!(pts[1].crossing, Crossing::Downward);
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        assert_eq!(orbit.t_star, pts[0].t_star);
    }

    #[test]
    fn grassland_integral_identity() {
        let m = r1(0.03);
        let orbit = grassland_orbit(&m).unwrap();
        let ints = orbit_integrals(&orbit, &m).unwrap();
        let lhs = m.derived.mu_g * ints.grass;
        let rhs = 0.7 * 12.0 + 0.5f64.ln();
        assert!((lhs - rhs).abs() < 1e-10);
        assert_eq!(ints.tree, 0.0);
    }

    #[test]
    fn tree_integral_without_tree_damage() {
        let mut p = r1_params(0.03);
        p.lambda_ft = 0.0;
        let m = Model::new(p).unwrap();
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        let ints = orbit_integrals(&orbit, &m).unwrap();
        assert!(rel(ints.tree, 0.75 * 12.0 / m.derived.mu_t) < 1e-14);
    }

    #[test]
    fn tree_integral_matches_logistic_form() {
        let m = r1(0.03);
        let orbit = solve_savanna_fixed_point(&m).unwrap();
        let ints = orbit_integrals(&orbit, &m).unwrap();
        let d = &m.derived;
        let direct = (orbit.t_star / d.y_t * (d.r_t * 12.0).exp_m1()).ln_1p() / d.mu_t;
        assert!(rel(ints.tree, direct) < 1e-9);
    }
}
