//! Parameters, derived rates, the fire-intensity function, the smooth vector
//! field and the fire (impulse) map of the tree-grass system.
//!
//! Between fires the biomasses follow
//!
//! ```text
//! dG/dt = γ_G G (1 - G/K_G) - δ_G0 G - γ_TG T G
//! dT/dt = γ_T T (1 - T/K_T) - δ_T T
//! ```
//!
//! and at each fire time `t_n = nτ`
//!
//! ```text
//! G(t_n+) = (1 - λ_fG) G(t_n)
//! T(t_n+) = (1 - λ_fT ω(arg)) T(t_n)
//! ```
//!
//! where `arg` is either the burnt fuel `λ_fG G(t_n)` or the standing fuel
//! `G(t_n)`, both taken from the pre-fire grass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which grass quantity feeds the fire-intensity function at a fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaArg {
    /// `ω(λ_fG · G)`: intensity driven by the grass actually consumed.
    #[default]
    BurntGrass,
    /// `ω(G)`: intensity driven by the standing grass before the fire.
    StandingGrass,
}

impl OmegaArg {
    pub fn as_str(self) -> &'static str {
        match self {
            OmegaArg::BurntGrass => "burnt",
            OmegaArg::StandingGrass => "standing",
        }
    }
}

/// Raw model parameters. Units are t·ha⁻¹ for biomasses and years for time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VegetationParams {
    /// Grass production rate (yr⁻¹).
    #[serde(rename = "gamma_G")]
    pub gamma_g: f64,
    /// Grass loss rate from grazing or human action (yr⁻¹).
    #[serde(rename = "delta_G0")]
    pub delta_g0: f64,
    /// Grass carrying capacity (t·ha⁻¹).
    #[serde(rename = "K_G")]
    pub k_g: f64,
    /// Tree production rate (yr⁻¹).
    #[serde(rename = "gamma_T")]
    pub gamma_t: f64,
    /// Tree loss rate from browsing or human action (yr⁻¹).
    #[serde(rename = "delta_T")]
    pub delta_t: f64,
    /// Tree carrying capacity (t·ha⁻¹).
    #[serde(rename = "K_T")]
    pub k_t: f64,
    /// Tree-on-grass competition (ha·t⁻¹·yr⁻¹). Negative means facilitation.
    #[serde(rename = "gamma_TG")]
    pub gamma_tg: f64,
    /// Fraction of grass consumed by each fire, in `[0, 1)`.
    #[serde(rename = "lambda_fG")]
    pub lambda_fg: f64,
    /// Maximal fraction of tree biomass lost per fire, in `[0, 1)`.
    #[serde(rename = "lambda_fT")]
    pub lambda_ft: f64,
    /// Half-saturation of the fire intensity (t·ha⁻¹).
    pub alpha: f64,
    /// Steepness of the fire intensity (dimensionless exponent).
    pub theta: f64,
    /// Fire period (yr).
    pub tau: f64,
    #[serde(default)]
    pub omega_arg_convention: OmegaArg,
}

/// Rates and caps computed once from [`VegetationParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// Net grass production `γ_G - δ_G0`.
    pub r_g: f64,
    /// Net tree production `γ_T - δ_T`.
    pub r_t: f64,
    /// Grass self-competition `γ_G / K_G`.
    pub mu_g: f64,
    /// Tree self-competition `γ_T / K_T`.
    pub mu_t: f64,
    /// Grass cap of the invariant region, `r_G / μ_G`.
    pub x_g: f64,
    /// Tree cap of the invariant region, `r_T / μ_T`.
    pub y_t: f64,
}

/// Grass and tree biomass at a given time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    #[serde(rename = "G")]
    pub grass: f64,
    #[serde(rename = "T")]
    pub tree: f64,
    #[serde(rename = "t", default)]
    pub time: f64,
}

impl State {
    pub fn new(grass: f64, tree: f64, time: f64) -> Self {
        State { grass, tree, time }
    }

    pub fn at(grass: f64, tree: f64) -> Self {
        State::new(grass, tree, 0.0)
    }
}

/// What happened at one fire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpulseRecord {
    pub time: f64,
    pub pre: State,
    pub post: State,
    /// The value of ω that scaled the tree loss.
    pub intensity: f64,
}

fn check_finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}

impl VegetationParams {
    /// Checks every parameter invariant.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_G", self.gamma_g),
            ("delta_G0", self.delta_g0),
            ("K_G", self.k_g),
            ("gamma_T", self.gamma_t),
            ("delta_T", self.delta_t),
            ("K_T", self.k_t),
            ("gamma_TG", self.gamma_tg),
            ("lambda_fG", self.lambda_fg),
            ("lambda_fT", self.lambda_ft),
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("tau", self.tau),
        ];
        for (name, v) in fields {
            check_finite(name, v)?;
        }
        if self.delta_g0 < 0.0 {
            return Err(Error::invalid("delta_G0", "must be >= 0"));
        }
        if self.gamma_g <= self.delta_g0 {
            return Err(Error::invalid(
                "gamma_G",
                format!(
                    "net grass production gamma_G - delta_G0 = {} must be > 0",
                    self.gamma_g - self.delta_g0
                ),
            ));
        }
        if self.delta_t < 0.0 {
            return Err(Error::invalid("delta_T", "must be >= 0"));
        }
        if self.gamma_t <= self.delta_t {
            return Err(Error::invalid(
                "gamma_T",
                format!(
                    "net tree production gamma_T - delta_T = {} must be > 0",
                    self.gamma_t - self.delta_t
                ),
            ));
        }
        if self.k_g <= 0.0 {
            return Err(Error::invalid("K_G", "must be > 0"));
        }
        if self.k_t <= 0.0 {
            return Err(Error::invalid("K_T", "must be > 0"));
        }
        if !(0.0..1.0).contains(&self.lambda_fg) {
            return Err(Error::invalid("lambda_fG", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.lambda_ft) {
            return Err(Error::invalid("lambda_fT", "must lie in [0, 1)"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::invalid("alpha", "must be > 0"));
        }
        if self.theta <= 0.0 {
            return Err(Error::invalid("theta", "must be > 0"));
        }
        if self.tau <= 0.0 {
            return Err(Error::invalid("tau", "must be > 0"));
        }
        Ok(())
    }

    /// ω for an already-validated, nonnegative argument.
    pub(crate) fn omega(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        // G^θ/(α^θ+G^θ) written to stay finite for large G.
        1.0 / (1.0 + (self.alpha / g).powf(self.theta))
    }

    /// The fire-intensity argument derived from the pre-fire grass.
    pub fn omega_argument(&self, pre_fire_grass: f64) -> f64 {
        match self.omega_arg_convention {
            OmegaArg::BurntGrass => self.lambda_fg * pre_fire_grass,
            OmegaArg::StandingGrass => pre_fire_grass,
        }
    }

    /// Fraction of tree biomass removed by a fire that meets `pre_fire_grass`.
    pub fn tree_kill_fraction(&self, pre_fire_grass: f64) -> f64 {
        self.lambda_ft * self.omega(self.omega_argument(pre_fire_grass))
    }
}

/// Computes `r_G, r_T, μ_G, μ_T, X_G, Y_T`, rejecting invalid parameters.
pub fn derive_quantities(p: &VegetationParams) -> Result<DerivedQuantities> {
    p.validate()?;
    let r_g = p.gamma_g - p.delta_g0;
    let r_t = p.gamma_t - p.delta_t;
    let mu_g = p.gamma_g / p.k_g;
    let mu_t = p.gamma_t / p.k_t;
    Ok(DerivedQuantities {
        r_g,
        r_t,
        mu_g,
        mu_t,
        x_g: p.k_g * (1.0 - p.delta_g0 / p.gamma_g),
        y_t: p.k_t * (1.0 - p.delta_t / p.gamma_t),
    })
}

/// `ω(G) = G^θ / (α^θ + G^θ)`.
pub fn fire_intensity(g: f64, p: &VegetationParams) -> Result<f64> {
    if !(g >= 0.0) {
        return Err(Error::Domain(format!(
            "fire intensity needs nonnegative grass biomass, got {g}"
        )));
    }
    Ok(p.omega(g))
}

/// Right-hand side of the smooth dynamics, `(dG/dt, dT/dt)`.
pub fn continuous_rhs(s: &State, p: &VegetationParams) -> (f64, f64) {
    let (g, t) = (s.grass, s.tree);
    let dg = p.gamma_g * g * (1.0 - g / p.k_g) - p.delta_g0 * g - p.gamma_tg * t * g;
    let dt = p.gamma_t * t * (1.0 - t / p.k_t) - p.delta_t * t;
    (dg, dt)
}

/// Applies one fire to the pre-fire state `s`.
pub fn apply_impulse(s: &State, p: &VegetationParams) -> (State, ImpulseRecord) {
    let intensity = p.omega(p.omega_argument(s.grass));
    let post = State {
        grass: (1.0 - p.lambda_fg) * s.grass,
        tree: (1.0 - p.lambda_ft * intensity) * s.tree,
        time: s.time,
    };
    let record = ImpulseRecord {
        time: s.time,
        pre: *s,
        post,
        intensity,
    };
    (post, record)
}

/// Validated parameters bundled with their derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Model {
    pub params: VegetationParams,
    pub derived: DerivedQuantities,
}

impl Model {
    pub fn new(params: VegetationParams) -> Result<Self> {
        let derived = derive_quantities(&params)?;
        Ok(Model { params, derived })
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    /// `max(X_G, Y_T)`, the scale used by absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.derived.x_g.max(self.derived.y_t)
    }

    /// True when `s` lies in `[0, X_G] × [0, Y_T]` up to `slack`.
    pub fn in_invariant_region(&self, s: &State, slack: f64) -> bool {
        s.grass >= -slack
            && s.tree >= -slack
            && s.grass <= self.derived.x_g + slack
            && s.tree <= self.derived.y_t + slack
    }
}

#[cfg(test)]
pub(crate) use tests::r1 as r1_params;

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn r1(gamma_tg: f64) -> VegetationParams {
        VegetationParams {
            gamma_g: 0.7,
            delta_g0: 0.0,
            k_g: 4.0,
            gamma_t: 0.75,
            delta_t: 0.0,
            k_t: 14.0,
            gamma_tg,
            lambda_fg: 0.5,
            lambda_ft: 0.9,
            alpha: 2.0,
            theta: 2.0,
            tau: 12.0,
            omega_arg_convention: OmegaArg::BurntGrass,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn derive_r1() {
        let d = derive_quantities(&r1(0.03)).unwrap();
        assert_eq!(d.r_g, 0.7);
        assert!(close(d.mu_g, 0.175, 1e-15));
        assert!(close(d.x_g, 4.0, 1e-15));
        assert_eq!(d.r_t, 0.75);
        assert!(close(d.mu_t, 0.75 / 14.0, 1e-15));
        assert!(close(d.y_t, 14.0, 1e-15));
    }

    #[test]
    fn derive_fig6_grass_and_tree_caps() {
        let mut p = r1(0.09);
        p.k_g = 19.0;
        p.gamma_g = 3.1;
        p.delta_g0 = 0.1;
        p.k_t = 50.0;
        p.gamma_t = 1.5;
        p.delta_t = 0.015;
        let d = derive_quantities(&p).unwrap();
        assert!(close(d.r_g, 3.0, 1e-14));
        assert!((d.x_g - 18.3871).abs() < 1e-4);
        assert!(close(d.r_t, 1.485, 1e-14));
        assert!(close(d.y_t, 49.5, 1e-14));
    }

    #[test]
    fn rejects_nonpositive_net_production() {
        let mut p = r1(0.03);
        p.delta_g0 = 0.7;
        assert!(matches!(
            derive_quantities(&p),
            Err(Error::InvalidParameter { field: "gamma_G", .. })
        ));
        let mut p = r1(0.03);
        p.delta_t = 1.0;
        assert!(matches!(
            derive_quantities(&p),
            Err(Error::InvalidParameter { field: "gamma_T", .. })
        ));
    }

    #[test]
    fn rejects_total_burn() {
        let mut p = r1(0.03);
        p.lambda_fg = 1.0;
        assert!(p.validate().is_err());
        let mut p = r1(0.03);
        p.lambda_ft = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn accepts_facilitation() {
        assert!(Model::new(r1(-0.01)).is_ok());
    }

    #[test]
    fn omega_values() {
        let p = r1(0.0);
        assert_eq!(fire_intensity(0.0, &p).unwrap(), 0.0);
        assert!(close(fire_intensity(2.0, &p).unwrap(), 0.5, 1e-15));
        assert!((fire_intensity(3.2765, &p).unwrap() - 0.728546).abs() < 1e-6);
        assert!(fire_intensity(-1.0, &p).is_err());
        assert!(fire_intensity(1e300, &p).unwrap() <= 1.0);
    }

    #[test]
    fn rhs_examples() {
        let p = r1(0.03);
        assert_eq!(continuous_rhs(&State::at(0.0, 0.0), &p), (0.0, 0.0));
        let (dg, dt) = continuous_rhs(&State::at(0.0, 14.0), &p);
        assert_eq!(dg, 0.0);
        assert!(dt.abs() < 1e-15);
        let (dg, dt) = continuous_rhs(&State::at(2.0, 7.0), &p);
        assert!(close(dg, 0.28, 1e-14));
        assert!(close(dt, 2.625, 1e-14));
    }

    #[test]
    fn impulse_burnt_grass_example() {
        let mut p = r1(0.0);
        p.lambda_fg = 0.5;
        p.lambda_ft = 0.9;
        let (post, rec) = apply_impulse(&State::new(2.0, 10.0, 12.0), &p);
        assert_eq!(post.grass, 1.0);
        assert!(close(rec.intensity, 0.2, 1e-15));
        assert!(close(post.tree, 8.2, 1e-14));
        assert_eq!(rec.pre.grass, 2.0);
        assert_eq!(post.time, 12.0);
    }

    #[test]
    fn impulse_uses_pre_fire_grass() {
        let mut p = r1(0.0);
        p.omega_arg_convention = OmegaArg::StandingGrass;
        let (post, rec) = apply_impulse(&State::at(2.0, 10.0), &p);
        // ω(2) = 0.5 from the standing (pre-fire) grass, not ω(1) from what is left.
        assert!(close(rec.intensity, 0.5, 1e-15));
        assert!(close(post.tree, 10.0 * (1.0 - 0.45), 1e-14));
    }

    #[test]
    fn identity_impulses() {
        let mut p = r1(0.0);
        p.lambda_fg = 0.0;
        let (post, _) = apply_impulse(&State::at(3.0, 5.0), &p);
        assert_eq!((post.grass, post.tree), (3.0, 5.0));
        let p = r1(0.0);
        let (post, rec) = apply_impulse(&State::at(0.0, 5.0), &p);
        assert_eq!((post.grass, post.tree, rec.intensity), (0.0, 5.0, 0.0));
    }
}
