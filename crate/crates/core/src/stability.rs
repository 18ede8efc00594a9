//! Threshold quantities, eigenvalues of the trivial equilibria, Floquet
//! multipliers of the two periodic orbits and the regime classifier.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::closed_form::{
    grassland_pre_fire, orbit_integrals, solve_savanna_fixed_point, OrbitKind, PeriodicOrbit,
};
use crate::error::Result;
use crate::model::Model;

/// Relative distance from 1 under which a threshold counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// A threshold that may be undefined for the given parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdValue {
    Value(f64),
    /// The formula divides by a nonpositive tree-on-grass competition rate.
    NotApplicable,
    /// The orbit the threshold is evaluated on does not exist.
    NotComputed,
}

impl ThresholdValue {
    pub fn value(self) -> Option<f64> {
        match self {
            ThresholdValue::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn lt1(self) -> bool {
        matches!(self, ThresholdValue::Value(v) if v < 1.0 && !on_boundary(v))
    }

    pub fn gt1(self) -> bool {
        matches!(self, ThresholdValue::Value(v) if v > 1.0 && !on_boundary(v))
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, ThresholdValue::Value(v) if on_boundary(v))
    }
}

fn on_boundary(v: f64) -> bool {
    (v - 1.0).abs() <= BOUNDARY_TOL
}

impl fmt::Display for ThresholdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdValue::Value(v) => f.write_str(&crate::output::fmt_f64(*v)),
            ThresholdValue::NotApplicable => f.write_str("NotApplicable"),
            ThresholdValue::NotComputed => f.write_str("NotComputed"),
        }
    }
}

impl Serialize for ThresholdValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ThresholdValue::Value(v) if v.is_finite() => s.serialize_f64(*v),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}

/// The six thresholds that drive the regime classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSet {
    #[serde(rename = "R_01")]
    pub r01: ThresholdValue,
    #[serde(rename = "R_pulse_Ge")]
    pub r_pulse_ge: ThresholdValue,
    #[serde(rename = "R_tilde_R01")]
    pub r_tilde_r01: ThresholdValue,
    #[serde(rename = "R_pulse_star")]
    pub r_pulse_star: ThresholdValue,
    #[serde(rename = "R_stable_star")]
    pub r_stable_star: ThresholdValue,
    #[serde(rename = "R_tilde_stable_star2")]
    pub r_tilde_stable_star2: ThresholdValue,
}

impl ThresholdSet {
    pub fn named(&self) -> [(&'static str, ThresholdValue); 6] {
        [
            ("R_01", self.r01),
            ("R_pulse_Ge", self.r_pulse_ge),
            ("R_tilde_R01", self.r_tilde_r01),
            ("R_pulse_star", self.r_pulse_star),
            ("R_stable_star", self.r_stable_star),
            ("R_tilde_stable_star2", self.r_tilde_stable_star2),
        ]
    }
}

/// Grass persistence under fire alone: `r_G τ / ln(1/(1 - λ_fG))`.
pub fn r_pulse_ge(m: &Model) -> f64 {
    let loss = -(-m.params.lambda_fg).ln_1p();
    if loss == 0.0 {
        return f64::INFINITY;
    }
    m.derived.r_g * m.tau() / loss
}

/// `γ_TG r_T / (r_G μ_T)`, the reciprocal of the forest invasion threshold,
/// meaningful for any sign of `γ_TG`.
pub fn inverse_r01(m: &Model) -> f64 {
    let d = &m.derived;
    m.params.gamma_tg * d.r_t / (d.r_g * d.mu_t)
}

/// `r_T τ / ln(1/(1 - λ_fT ω))` for the fire that meets `pre_fire_grass`.
fn tree_pulse_ratio(m: &Model, pre_fire_grass: f64) -> f64 {
    let loss = -(-m.params.tree_kill_fraction(pre_fire_grass)).ln_1p();
    if loss == 0.0 {
        return f64::INFINITY;
    }
    m.derived.r_t * m.tau() / loss
}

/// Tree persistence against fires fuelled by the grassland orbit.
pub fn r_pulse_star(m: &Model) -> Result<f64> {
    Ok(tree_pulse_ratio(m, grassland_pre_fire(m)?))
}

/// Tree persistence against fires fuelled by the savanna orbit.
pub fn r_stable_star(orbit: &PeriodicOrbit, m: &Model) -> f64 {
    tree_pulse_ratio(m, orbit.g_star / (1.0 - m.params.lambda_fg))
}

/// Computes all thresholds. The two savanna thresholds need `orbit`; they are
/// `NotComputed` when it is `None` or not a savanna orbit.
pub fn compute_thresholds(m: &Model, orbit: Option<&PeriodicOrbit>) -> ThresholdSet {
    use ThresholdValue::*;
    let d = &m.derived;
    let rpg = r_pulse_ge(m);
    let (r01, r_tilde) = if m.params.gamma_tg > 0.0 {
        let r01 = (d.r_g / d.r_t) * (d.mu_t / m.params.gamma_tg);
        (Value(r01), Value(rpg * (1.0 - 1.0 / r01)))
    } else {
        (NotApplicable, NotApplicable)
    };
    let r_pulse_star = r_pulse_star(m).map(Value).unwrap_or(NotComputed);
    let (r_stable, r_tilde2) = match orbit {
        Some(o) if o.kind == OrbitKind::Savanna => match orbit_integrals(o, m) {
            Ok(ints) => {
                let rs = r_stable_star(o, m);
                let v = inverse_r01(m) * (1.0 - 1.0 / rs)
                    + 1.0 / rpg
                    + 2.0 / d.x_g * ints.grass / m.tau();
                (Value(rs), Value(v))
            }
            Err(_) => (NotComputed, NotComputed),
        },
        _ => (NotComputed, NotComputed),
    };
    ThresholdSet {
        r01,
        r_pulse_ge: Value(rpg),
        r_tilde_r01: r_tilde,
        r_pulse_star,
        r_stable_star: r_stable,
        r_tilde_stable_star2: r_tilde2,
    }
}

/// Thresholds with the savanna orbit solved internally when it exists.
pub fn thresholds(m: &Model) -> ThresholdSet {
    let orbit = solve_savanna_fixed_point(m).ok();
    compute_thresholds(m, orbit.as_ref())
}

/// Eigenvalues of the period map at bare soil `(ρ₁, ρ₂)` and at the forest
/// `(ν₁, ν₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrivialEigenvalues {
    pub rho1: f64,
    pub rho2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

pub fn trivial_equilibria_eigenvalues(m: &Model) -> TrivialEigenvalues {
    let d = &m.derived;
    let p = &m.params;
    let tau = p.tau;
    TrivialEigenvalues {
        rho1: (1.0 - p.lambda_fg) * (d.r_g * tau).exp(),
        rho2: (d.r_t * tau).exp(),
        nu1: (1.0 - p.lambda_fg) * (d.r_g * tau - p.gamma_tg / d.mu_t * d.r_t * tau).exp(),
        nu2: (-d.r_t * tau).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloquetReport {
    pub kind: OrbitKind,
    pub multipliers: (f64, f64),
    pub stable: bool,
}

impl FloquetReport {
    fn new(kind: OrbitKind, l1: f64, l2: f64) -> Self {
        FloquetReport {
            kind,
            multipliers: (l1, l2),
            stable: l1.abs() < 1.0 && l2.abs() < 1.0,
        }
    }
}

/// Floquet multipliers of the grassland orbit.
pub fn grassland_floquet(m: &Model) -> Result<FloquetReport> {
    let orbit = crate::closed_form::grassland_orbit_with(m, 1)?;
    let ints = orbit_integrals(&orbit, m)?;
    let l1 = (-m.derived.mu_g * ints.grass).exp();
    let pre = grassland_pre_fire(m)?;
    let l2 = (1.0 - m.params.tree_kill_fraction(pre)) * (m.derived.r_t * m.tau()).exp();
    Ok(FloquetReport::new(OrbitKind::Grassland, l1, l2))
}

/// Floquet multipliers of the savanna orbit.
pub fn savanna_floquet(orbit: &PeriodicOrbit, m: &Model) -> Result<FloquetReport> {
    let d = &m.derived;
    let p = &m.params;
    let ints = orbit_integrals(orbit, m)?;
    let exponent = d.r_g * p.tau - 2.0 * d.mu_g * ints.grass - p.gamma_tg * ints.tree;
    let l1 = (1.0 - p.lambda_fg) * exponent.exp();
    let rs = r_stable_star(orbit, m);
    let l2 = (d.r_t * p.tau * (1.0 / rs - 1.0)).exp();
    Ok(FloquetReport::new(OrbitKind::Savanna, l1, l2))
}

/// Eigenvalues of the Jacobian of the period map at a post-fire state,
/// by central differences. Complex pairs are reported by modulus.
pub fn numeric_monodromy(g: f64, t: f64, m: &Model) -> Result<(f64, f64)> {
    use crate::closed_form::period_map;
    let hg = 1e-6 * g.abs().max(1e-3);
    let ht = 1e-6 * t.abs().max(1e-3);
    let (gp, tp) = period_map(g + hg, t, m)?;
    let (gm, tm) = period_map((g - hg).max(0.0), t, m)?;
    let dg = g + hg - (g - hg).max(0.0);
    let (a, c) = ((gp - gm) / dg, (tp - tm) / dg);
    let (gp, tp) = period_map(g, t + ht, m)?;
    let (gm, tm) = period_map(g, (t - ht).max(0.0), m)?;
    let dt = t + ht - (t - ht).max(0.0);
    let (b, dd) = ((gp - gm) / dt, (tp - tm) / dt);
    let tr = a + dd;
    let det = a * dd - b * c;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        Ok((tr / 2.0 + s, tr / 2.0 - s))
    } else {
        let modulus = det.sqrt();
        Ok((modulus, modulus))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "GAS")]
    Gas,
    #[serde(rename = "LAS")]
    Las,
    Unstable,
    Unknown,
}

impl Verdict {
    pub fn is_attracting(self) -> bool {
        matches!(self, Verdict::Gas | Verdict::Las)
    }
}

/// The four equilibria: bare soil, forest, grassland orbit and savanna orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumId {
    E00,
    E01,
    E10,
    E11,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquilibriumVerdict {
    pub id: EquilibriumId,
    pub exists: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
    XI,
    XII,
    XIII,
    XIV,
    XV,
    DirectConditions,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        use CaseLabel::*;
        match self {
            I => "I",
            II => "II",
            III => "III",
            IV => "IV",
            V => "V",
            VI => "VI",
            VII => "VII",
            VIII => "VIII",
            IX => "IX",
            X => "X",
            XI => "XI",
            XII => "XII",
            XIII => "XIII",
            XIV => "XIV",
            XV => "XV",
            DirectConditions => "DirectConditions",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCase {
    pub case_label: CaseLabel,
    /// Verdicts in the order bare soil, forest, grassland orbit, savanna orbit.
    pub equilibria: Vec<EquilibriumVerdict>,
    /// Thresholds that sit on 1 within the boundary tolerance.
    pub boundary: Vec<&'static str>,
    pub thresholds: ThresholdSet,
}

impl RegimeCase {
    pub fn verdict(&self, id: EquilibriumId) -> EquilibriumVerdict {
        self.equilibria[id as usize]
    }

    /// Equilibria that exist and are marked GAS or LAS.
    pub fn attracting(&self) -> Vec<EquilibriumId> {
        self.equilibria
            .iter()
            .filter(|e| e.exists && e.verdict.is_attracting())
            .map(|e| e.id)
            .collect()
    }
}

/// Everything the classifier needs, evaluated once.
struct Evaluation {
    thresholds: ThresholdSet,
    eig: TrivialEigenvalues,
    grassland: Option<FloquetReport>,
    savanna: Option<FloquetReport>,
}

fn evaluate(m: &Model) -> Evaluation {
    let orbit = solve_savanna_fixed_point(m).ok();
    let thresholds = compute_thresholds(m, orbit.as_ref());
    let savanna = orbit.as_ref().and_then(|o| savanna_floquet(o, m).ok());
    Evaluation {
        thresholds,
        eig: trivial_equilibria_eigenvalues(m),
        grassland: grassland_floquet(m).ok(),
        savanna,
    }
}

/// Matches the threshold pattern against the regime table. Returns the case
/// and the verdicts for (forest, grassland orbit, savanna orbit).
fn table_row(t: &ThresholdSet) -> Option<(CaseLabel, [Verdict; 3])> {
    use CaseLabel::*;
    use Verdict::*;
    let (r01, rpg, rt, rps) = (t.r01, t.r_pulse_ge, t.r_tilde_r01, t.r_pulse_star);
    let (rss, rt2) = (t.r_stable_star, t.r_tilde_stable_star2);
    let savanna_stable = rss.gt1() && rt2.gt1();
    let savanna_unstable = (rss.gt1() && rt2.lt1()) || rss.lt1();
    if r01.lt1() {
        if rpg.lt1() {
            return Some((I, [Gas, Unstable, Unstable]));
        }
        if rpg.gt1() {
            if rps.lt1() {
                return Some((II, [Las, Las, Unstable]));
            }
            if rps.gt1() && savanna_stable {
                return Some((III, [Las, Unstable, Las]));
            }
            if rps.gt1() && savanna_unstable {
                return Some((IV, [Gas, Unstable, Unstable]));
            }
            return Some((V, [Gas, Unstable, Unstable]));
        }
        return None;
    }
    if r01.gt1() {
        if rpg.lt1() {
            return Some((VI, [Gas, Unstable, Unstable]));
        }
        if !rpg.gt1() {
            return None;
        }
        if rt.lt1() {
            if rps.lt1() {
                return Some((VII, [Las, Las, Unstable]));
            }
            if rps.gt1() && savanna_stable {
                return Some((VIII, [Las, Unstable, Las]));
            }
            if rps.gt1() && savanna_unstable {
                return Some((IX, [Gas, Unstable, Unstable]));
            }
            return Some((X, [Gas, Unstable, Unstable]));
        }
        if rt.gt1() {
            if rps.lt1() {
                return Some((XII, [Unstable, Gas, Unstable]));
            }
            if rps.gt1() && savanna_stable {
                return Some((XIII, [Unstable, Unstable, Gas]));
            }
            if rps.gt1() && savanna_unstable {
                return Some((XIV, [Unstable, Unstable, Unstable]));
            }
            return Some((XV, [Unstable, Gas, Unstable]));
        }
    }
    None
}

fn from_multiplier(x: f64) -> Verdict {
    if on_boundary(x) || !x.is_finite() {
        Verdict::Unknown
    } else if x < 1.0 {
        Verdict::Las
    } else {
        Verdict::Unstable
    }
}

/// Verdicts straight from eigenvalues and multipliers, with the forest and
/// grassland global-stability criteria layered on top.
fn direct_conditions(ev: &Evaluation) -> [Verdict; 3] {
    use Verdict::*;
    let t = &ev.thresholds;
    let mut forest = from_multiplier(ev.eig.nu1);
    if forest == Las && t.r_pulse_ge.lt1() {
        forest = Gas;
    }
    let mut grass = match ev.grassland {
        Some(f) => from_multiplier(f.multipliers.0.max(f.multipliers.1)),
        None => Unstable,
    };
    if grass == Las && t.r_pulse_star.lt1() && forest == Unstable {
        grass = Gas;
    }
    let mut savanna = match ev.savanna {
        Some(f) => from_multiplier(f.multipliers.0.max(f.multipliers.1)),
        None => Unstable,
    };
    if savanna == Las && forest == Unstable && !grass.is_attracting() {
        savanna = Gas;
    }
    [forest, grass, savanna]
}

/// Classifies the long-term behaviour of the model.
pub fn classify_regime(m: &Model) -> RegimeCase {
    let ev = evaluate(m);
    let t = ev.thresholds;
    let boundary: Vec<&'static str> = t
        .named()
        .iter()
        .filter(|(_, v)| v.is_boundary())
        .map(|(n, _)| *n)
        .collect();
    let row = if m.params.gamma_tg > 0.0 && boundary.is_empty() {
        table_row(&t)
    } else {
        None
    };
    let (label, [forest, grass, savanna]) =
        row.unwrap_or_else(|| (CaseLabel::DirectConditions, direct_conditions(&ev)));
    let grass_exists = t.r_pulse_ge.gt1() || (t.r_pulse_ge.is_boundary() && ev.grassland.is_some());
    let equilibria = vec![
        EquilibriumVerdict {
            id: EquilibriumId::E00,
            exists: true,
            verdict: Verdict::Unstable,
        },
        EquilibriumVerdict {
            id: EquilibriumId::E01,
            exists: true,
            verdict: forest,
        },
        EquilibriumVerdict {
            id: EquilibriumId::E10,
            exists: grass_exists,
            verdict: if grass_exists { grass } else { Verdict::Unstable },
        },
        EquilibriumVerdict {
            id: EquilibriumId::E11,
            exists: ev.savanna.is_some(),
            verdict: if ev.savanna.is_some() { savanna } else { Verdict::Unstable },
        },
    ];
    RegimeCase {
        case_label: label,
        equilibria,
        boundary,
        thresholds: t,
    }
}
