//! Time-domain engines: the nonstandard finite-difference (NSFD) scheme, a
//! classical RK4 reference integrator, the exact period map, the fire event
//! loop, attractor detection, basin maps and parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{coexistence_points, grass_within_period, grassland_post_fire, period_map, tree_within_period, DEFAULT_H_SCAN};
use crate::error::{Error, Result};
use crate::model::{apply_impulse, continuous_rhs, ImpulseRecord, Model, State, VegetationParams};
use crate::stability::{classify_regime, RegimeCase, ThresholdSet};

/// Integration scheme used between fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Nsfd,
    /// Classical fourth-order Runge-Kutta.
    Reference,
    /// Exact within-period solution evaluated on the step grid.
    ClosedForm,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Nsfd => "nsfd",
            Scheme::Reference => "reference",
            Scheme::ClosedForm => "closed_form",
        }
    }
}

/// One NSFD step. The tree update is the exact logistic flow; the grass
/// update is exact whenever trees do not act on grass.
pub fn nsfd_step(s: &State, dt: f64, m: &Model) -> Result<State> {
    let d = &m.derived;
    let p = &m.params;
    let phi1 = (d.r_g * dt).exp_m1() / d.r_g;
    let phi2 = (d.r_t * dt).exp_m1() / d.r_t;
    let denom_g = 1.0 + phi1 * (d.mu_g * s.grass + p.gamma_tg * s.tree);
    if !(denom_g > 0.0) {
        return Err(Error::StepSize(format!(
            "grass denominator {denom_g:e} <= 0 at G = {}, T = {}, dt = {dt}",
            s.grass, s.tree
        )));
    }
    let grass = s.grass * (d.r_g * dt).exp() / denom_g;
    let tree = s.tree * (d.r_t * dt).exp() / (1.0 + phi2 * d.mu_t * s.tree);
    Ok(State::new(grass, tree, s.time + dt))
}

/// One classical RK4 step of the smooth dynamics.
pub fn reference_step(s: &State, dt: f64, m: &Model) -> State {
    let p = &m.params;
    let f = |g: f64, t: f64| continuous_rhs(&State::at(g, t), p);
    let (g, t) = (s.grass, s.tree);
    let k1 = f(g, t);
    let k2 = f(g + 0.5 * dt * k1.0, t + 0.5 * dt * k1.1);
    let k3 = f(g + 0.5 * dt * k2.0, t + 0.5 * dt * k2.1);
    let k4 = f(g + dt * k3.0, t + dt * k3.1);
    let g1 = g + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
    let t1 = t + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    State::new(g1.max(0.0), t1.max(0.0), s.time + dt)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Initial state, every step, and the post-fire state at each fire time.
    pub states: Vec<State>,
    pub impulses: Vec<ImpulseRecord>,
    pub dt: f64,
    pub scheme: Scheme,
}

/// Step sizes covering one fire period: full steps of `dt`, plus a shorter
/// final step when `dt` does not divide `τ`.
fn period_steps(tau: f64, dt: f64) -> usize {
    let full = (tau / dt + 1e-9).floor() as usize;
    let rem = tau - full as f64 * dt;
    if rem > 1e-9 * tau {
        full + 1
    } else {
        full.max(1)
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    Ok(())
}

/// Advances one post-fire state through one period and returns the pre-fire
/// state. `visit` sees every intermediate state, the pre-fire one included.
fn advance_period<F: FnMut(&State)>(
    start: &State,
    m: &Model,
    dt: f64,
    scheme: Scheme,
    mut visit: F,
) -> Result<State> {
    let tau = m.tau();
    let t0 = start.time;
    let end = t0 + tau;
    if scheme == Scheme::ClosedForm && dt >= tau {
        let pre = State::new(
            grass_within_period(start.grass, start.tree, tau, m)?,
            tree_within_period(start.tree, tau, m),
            end,
        );
        visit(&pre);
        return Ok(pre);
    }
    let n = period_steps(tau, dt);
    let mut s = *start;
    for k in 0..n {
        let last = k + 1 == n;
        let h = if last { end - s.time } else { dt };
        s = match scheme {
            Scheme::Nsfd => nsfd_step(&s, h, m)?,
            Scheme::Reference => reference_step(&s, h, m),
            Scheme::ClosedForm => {
                let phase = if last { tau } else { (k + 1) as f64 * dt };
                State::new(
                    grass_within_period(start.grass, start.tree, phase, m)?,
                    tree_within_period(start.tree, phase, m),
                    t0 + phase,
                )
            }
        };
        if last {
            s.time = end;
        }
        visit(&s);
    }
    Ok(s)
}

/// Simulates `horizon` fire periods from `initial` (taken at time 0, just
/// after a fire). Fires occur at every multiple of τ.
pub fn run(initial: State, m: &Model, horizon: usize, dt: f64, scheme: Scheme) -> Result<Trajectory> {
    check_dt(dt)?;
    let tau = m.tau();
    let per = period_steps(tau, dt);
    let mut states = Vec::with_capacity(1 + horizon * per);
    let mut impulses = Vec::with_capacity(horizon);
    let mut s = State::new(initial.grass, initial.tree, 0.0);
    states.push(s);
    for n in 0..horizon {
        s.time = n as f64 * tau;
        let mut pre = advance_period(&s, m, dt, scheme, |x| states.push(*x))?;
        pre.time = (n + 1) as f64 * tau;
        let (post, rec) = apply_impulse(&pre, &m.params);
        *states.last_mut().unwrap() = post;
        impulses.push(rec);
        s = post;
    }
    Ok(Trajectory {
        states,
        impulses,
        dt,
        scheme,
    })
}

/// Post-fire state after one full period.
pub fn next_post_fire(s: &State, m: &Model, dt: f64, scheme: Scheme) -> Result<State> {
    if scheme == Scheme::ClosedForm {
        let (g, t) = period_map(s.grass, s.tree, m)?;
        return Ok(State::new(g, t, s.time + m.tau()));
    }
    let pre = advance_period(s, m, dt, scheme, |_| {})?;
    Ok(apply_impulse(&pre, &m.params).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AttractorKind {
    BareSoil,
    Forest,
    GrasslandPeriodic,
    SavannaPeriodic,
    Undecided,
}

impl AttractorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttractorKind::BareSoil => "BareSoil",
            AttractorKind::Forest => "Forest",
            AttractorKind::GrasslandPeriodic => "GrasslandPeriodic",
            AttractorKind::SavannaPeriodic => "SavannaPeriodic",
            AttractorKind::Undecided => "Undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttractorVerdict {
    pub kind: AttractorKind,
    pub final_post_fire_state: State,
    pub periods_to_converge: usize,
}

/// Settings for attractor detection. Tolerances are relative to
/// `max(X_G, Y_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectOptions {
    pub scheme: Scheme,
    /// Step size for the stepping schemes; `None` means τ/1000.
    pub dt: Option<f64>,
    pub max_periods: usize,
    pub conv_rel: f64,
    pub match_rel: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            scheme: Scheme::ClosedForm,
            dt: None,
            max_periods: 2000,
            conv_rel: 1e-8,
            match_rel: 1e-4,
        }
    }
}

/// Post-fire states of the candidate attractors of one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorTargets {
    pub forest: State,
    pub grassland: Option<State>,
    pub coexistence: Vec<State>,
}

impl AttractorTargets {
    pub fn new(m: &Model) -> Self {
        let grassland = grassland_post_fire(m).ok().map(|g| State::at(g, 0.0));
        let coexistence = coexistence_points(m, DEFAULT_H_SCAN)
            .map(|pts| pts.iter().map(|p| State::at(p.g_star, p.t_star)).collect())
            .unwrap_or_default();
        AttractorTargets {
            forest: State::at(0.0, m.derived.y_t),
            grassland,
            coexistence,
        }
    }

    fn classify(&self, s: &State, tol: f64) -> AttractorKind {
        let near = |a: &State| (a.grass - s.grass).abs() < tol && (a.tree - s.tree).abs() < tol;
        if near(&State::at(0.0, 0.0)) {
            AttractorKind::BareSoil
        } else if near(&self.forest) {
            AttractorKind::Forest
        } else if self.grassland.as_ref().is_some_and(near) {
            AttractorKind::GrasslandPeriodic
        } else if self.coexistence.iter().any(near) {
            AttractorKind::SavannaPeriodic
        } else {
            AttractorKind::Undecided
        }
    }
}

/// Iterates the post-fire sequence from `initial` until consecutive states
/// agree within the convergence tolerance, then names the state reached.
pub fn detect_attractor(initial: State, m: &Model, opts: &DetectOptions) -> Result<AttractorVerdict> {
    detect_with_targets(initial, m, opts, &AttractorTargets::new(m))
}

pub fn detect_with_targets(
    initial: State,
    m: &Model,
    opts: &DetectOptions,
    targets: &AttractorTargets,
) -> Result<AttractorVerdict> {
    let dt = opts.dt.unwrap_or(m.tau() / 1000.0);
    check_dt(dt)?;
    let scale = m.scale();
    let eps_conv = opts.conv_rel * scale;
    let mut s = State::new(initial.grass, initial.tree, 0.0);
    for n in 1..=opts.max_periods {
        let next = next_post_fire(&s, m, dt, opts.scheme)?;
        let step = (next.grass - s.grass).abs().max((next.tree - s.tree).abs());
        s = next;
        if step < eps_conv {
            return Ok(AttractorVerdict {
                kind: targets.classify(&s, opts.match_rel * scale),
                final_post_fire_state: s,
                periods_to_converge: n,
            });
        }
    }
    Ok(AttractorVerdict {
        kind: AttractorKind::Undecided,
        final_post_fire_state: s,
        periods_to_converge: opts.max_periods,
    })
}

/// Initial-condition grid. Ranges default to `[0, X_G]` and `[0, Y_T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_g: usize,
    pub n_t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_g: 50,
            n_t: 50,
            g_range: None,
            t_range: None,
        }
    }
}

fn axis(n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinCell {
    pub g0: f64,
    pub t0: f64,
    pub verdict: AttractorVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinGrid {
    pub g_axis: Vec<f64>,
    pub t_axis: Vec<f64>,
    /// Row-major over the tree axis, grass varying fastest.
    pub cells: Vec<BasinCell>,
}

impl BasinGrid {
    pub fn kinds(&self) -> std::collections::BTreeSet<AttractorKind> {
        self.cells.iter().map(|c| c.verdict.kind).collect()
    }
}

/// Runs attractor detection from every grid point, in parallel.
pub fn basin_map(m: &Model, grid: &GridSpec, opts: &DetectOptions) -> Result<BasinGrid> {
    if grid.n_g == 0 || grid.n_t == 0 {
        return Err(Error::invalid("grid", "needs at least one point per axis"));
    }
    let g_range = grid.g_range.unwrap_or((0.0, m.derived.x_g));
    let t_range = grid.t_range.unwrap_or((0.0, m.derived.y_t));
    for (lo, hi) in [g_range, t_range] {
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::invalid("grid", format!("bad range [{lo}, {hi}]")));
        }
    }
    let g_axis = axis(grid.n_g, g_range);
    let t_axis = axis(grid.n_t, t_range);
    let targets = AttractorTargets::new(m);
    let points: Vec<(f64, f64)> = t_axis
        .iter()
        .flat_map(|&t| g_axis.iter().map(move |&g| (g, t)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(g0, t0)| {
            detect_with_targets(State::at(g0, t0), m, opts, &targets)
                .map(|verdict| BasinCell { g0, t0, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinGrid {
        g_axis,
        t_axis,
        cells,
    })
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweptParam {
    #[serde(rename = "gamma_TG")]
    GammaTg,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "lambda_fT")]
    LambdaFt,
    #[serde(rename = "lambda_fG")]
    LambdaFg,
}

impl SweptParam {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "gamma_TG" | "gamma-tg" | "gamma_tg" => Some(SweptParam::GammaTg),
            "tau" => Some(SweptParam::Tau),
            "lambda_fT" | "lambda-ft" | "lambda_ft" => Some(SweptParam::LambdaFt),
            "lambda_fG" | "lambda-fg" | "lambda_fg" => Some(SweptParam::LambdaFg),
            _ => None,
        }
    }

    pub fn apply(self, p: &VegetationParams, value: f64) -> VegetationParams {
        let mut q = *p;
        match self {
            SweptParam::GammaTg => q.gamma_tg = value,
            SweptParam::Tau => q.tau = value,
            SweptParam::LambdaFt => q.lambda_ft = value,
            SweptParam::LambdaFg => q.lambda_fg = value,
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub thresholds: ThresholdSet,
    pub regime: RegimeCase,
    /// Distinct attractors reached from the probe initial conditions.
    pub attractors: Vec<AttractorKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<SweepResult, Error>,
}

/// Probe initial conditions, as fractions of `(X_G, Y_T)`.
pub const DEFAULT_PROBES: [(f64, f64); 5] = [(0.9, 0.01), (0.5, 0.5), (0.01, 0.9), (0.1, 0.1), (0.9, 0.9)];

/// Thresholds, regime and simulated attractors for each swept value, in
/// input order. Failures are recorded per value.
pub fn parameter_sweep(
    base: &VegetationParams,
    swept: SweptParam,
    values: &[f64],
    probes: &[(f64, f64)],
    opts: &DetectOptions,
) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| SweepRow {
            value,
            outcome: sweep_one(&swept.apply(base, value), probes, opts),
        })
        .collect()
}

fn sweep_one(p: &VegetationParams, probes: &[(f64, f64)], opts: &DetectOptions) -> Result<SweepResult> {
    let m = Model::new(*p)?;
    let regime = classify_regime(&m);
    let targets = AttractorTargets::new(&m);
    let mut attractors = Vec::new();
    for &(fg, ft) in probes {
        let init = State::at(fg * m.derived.x_g, ft * m.derived.y_t);
        attractors.push(detect_with_targets(init, &m, opts, &targets)?.kind);
    }
    attractors.sort();
    attractors.dedup();
    Ok(SweepResult {
        thresholds: regime.thresholds,
        regime,
        attractors,
    })
}
