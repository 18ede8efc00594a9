//! Built-in parameter sets for the three climatic regions and the
//! plausible range of each parameter per region.

use serde::{Deserialize, Serialize};

use crate::model::{OmegaArg, VegetationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Semi-arid.
    R1,
    /// Mesic.
    R2,
    /// Humid.
    R3,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
        }
    }
}

/// Inclusive plausible range of one parameter; `hi = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub field: &'static str,
    pub lo: f64,
    pub hi: Option<f64>,
}

const fn r(field: &'static str, lo: f64, hi: f64) -> Range {
    Range { field, lo, hi: Some(hi) }
}

const R1_RANGES: [Range; 12] = [
    r("K_G", 2.0, 5.0),
    r("gamma_G", 0.4, 1.5),
    r("delta_G0", 0.0, 0.0),
    r("lambda_fG", 0.1, 0.9),
    r("alpha", 2.0, 2.0),
    r("theta", 2.0, 2.0),
    r("K_T", 10.0, 25.0),
    r("gamma_T", 0.3, 0.9),
    r("delta_T", 0.0, 0.0),
    r("lambda_fT", 0.1, 0.5),
    Range { field: "tau", lo: 10.0, hi: None },
    r("gamma_TG", -0.01, 0.03),
];

const R2_RANGES: [Range; 12] = [
    r("K_G", 8.0, 10.0),
    r("gamma_G", 1.5, 3.0),
    r("delta_G0", 0.0, 0.0),
    r("lambda_fG", 0.1, 0.9),
    r("alpha", 2.0, 2.0),
    r("theta", 2.0, 2.0),
    r("K_T", 25.0, 60.0),
    r("gamma_T", 0.9, 1.2),
    r("delta_T", 0.0, 0.0),
    r("lambda_fT", 0.1, 0.5),
    r("tau", 2.0, 8.0),
    r("gamma_TG", 0.01, 0.08),
];

const R3_RANGES: [Range; 12] = [
    r("K_G", 10.0, 20.0),
    r("gamma_G", 3.0, 4.6),
    r("delta_G0", 0.0, 0.9),
    r("lambda_fG", 0.1, 0.9),
    r("alpha", 2.0, 2.0),
    r("theta", 2.0, 2.0),
    r("K_T", 60.0, 115.0),
    r("gamma_T", 1.2, 7.2),
    r("delta_T", 0.0, 0.015),
    r("lambda_fT", 0.1, 0.4),
    r("tau", 0.5, 2.0),
    r("gamma_TG", 0.03, 0.09),
];

pub fn region_ranges(region: Region) -> &'static [Range] {
    match region {
        Region::R1 => &R1_RANGES,
        Region::R2 => &R2_RANGES,
        Region::R3 => &R3_RANGES,
    }
}

fn field_value(p: &VegetationParams, field: &str) -> f64 {
    match field {
        "K_G" => p.k_g,
        "gamma_G" => p.gamma_g,
        "delta_G0" => p.delta_g0,
        "lambda_fG" => p.lambda_fg,
        "alpha" => p.alpha,
        "theta" => p.theta,
        "K_T" => p.k_t,
        "gamma_T" => p.gamma_t,
        "delta_T" => p.delta_t,
        "lambda_fT" => p.lambda_ft,
        "tau" => p.tau,
        "gamma_TG" => p.gamma_tg,
        _ => unreachable!("unknown field {field}"),
    }
}

/// Human-readable warnings for parameters outside the region's ranges.
pub fn range_warnings(p: &VegetationParams, region: Region) -> Vec<String> {
    region_ranges(region)
        .iter()
        .filter_map(|rg| {
            let v = field_value(p, rg.field);
            let above = rg.hi.is_some_and(|hi| v > hi);
            if v < rg.lo || above {
                let hi = rg.hi.map_or("inf".to_string(), |h| h.to_string());
                Some(format!(
                    "{} = {v} lies outside the {} range [{}, {hi}]",
                    rg.field,
                    region.as_str(),
                    rg.lo
                ))
            } else {
                None
            }
        })
        .collect()
}

/// A named parameter set from the published simulations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPreset {
    pub name: &'static str,
    pub region: Region,
    pub description: &'static str,
    pub params: VegetationParams,
    /// Values of `gamma_TG` used across the figure panels.
    pub gamma_tg_panels: Vec<f64>,
    /// Values of `tau` used across the figure panels.
    pub tau_panels: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn params(
    k_g: f64,
    gamma_g: f64,
    delta_g0: f64,
    k_t: f64,
    gamma_t: f64,
    delta_t: f64,
    tau: f64,
    lambda_ft: f64,
    lambda_fg: f64,
    gamma_tg: f64,
) -> VegetationParams {
    VegetationParams {
        gamma_g,
        delta_g0,
        k_g,
        gamma_t,
        delta_t,
        k_t,
        gamma_tg,
        lambda_fg,
        lambda_ft,
        alpha: 2.0,
        theta: 2.0,
        tau,
        omega_arg_convention: OmegaArg::BurntGrass,
    }
}

pub const PRESET_NAMES: [&str; 6] = ["R1", "R2", "R2-fig4", "R3", "R3-fig6", "R3-fig7"];

/// All presets, in a fixed order.
pub fn presets() -> Vec<RegionPreset> {
    PRESET_NAMES.iter().map(|n| preset(n).unwrap()).collect()
}

/// Looks up a preset by name. `R1-fig2`, `R2-fig3` and `R3-fig5` are
/// accepted as aliases of `R1`, `R2` and `R3`.
pub fn preset(name: &str) -> Option<RegionPreset> {
    let p = match name {
        "R1" | "R1-fig2" => RegionPreset {
            name: "R1",
            region: Region::R1,
            description: "semi-arid, competition sweep (figure 2)",
            params: params(4.0, 0.7, 0.0, 14.0, 0.75, 0.0, 12.0, 0.9, 0.5, -0.01),
            gamma_tg_panels: vec![-0.01, 0.01, 0.03, 0.051],
            tau_panels: vec![12.0],
        },
        "R2" | "R2-fig3" => RegionPreset {
            name: "R2",
            region: Region::R2,
            description: "mesic, competition sweep (figure 3)",
            params: params(8.0, 1.9, 0.0, 30.0, 0.9, 0.0, 5.0, 0.5, 0.6, 0.01),
            gamma_tg_panels: vec![0.01, 0.02, 0.03, 0.055],
            tau_panels: vec![5.0],
        },
        "R2-fig4" => RegionPreset {
            name: "R2-fig4",
            region: Region::R2,
            description: "mesic, stronger fire damage to trees (figure 4)",
            params: params(8.0, 1.5, 0.0, 30.0, 0.9, 0.0, 2.2, 0.8, 0.5, 0.01),
            gamma_tg_panels: vec![0.01, 0.02, 0.03, 0.055],
            tau_panels: vec![2.2],
        },
        "R3" | "R3-fig5" => RegionPreset {
            name: "R3",
            region: Region::R3,
            description: "humid, competition sweep (figure 5)",
            params: params(17.0, 4.5, 0.0, 45.0, 6.0, 0.0, 0.6, 0.4, 0.4, 0.03),
            gamma_tg_panels: vec![0.03, 0.05, 0.07, 0.09],
            tau_panels: vec![0.6],
        },
        "R3-fig6" => RegionPreset {
            name: "R3-fig6",
            region: Region::R3,
            description: "humid, forest/grassland bistability (figure 6)",
            params: params(19.0, 3.1, 0.1, 50.0, 1.5, 0.015, 0.5, 0.6, 0.5, 0.09),
            gamma_tg_panels: vec![0.09],
            tau_panels: vec![0.5],
        },
        "R3-fig7" => RegionPreset {
            name: "R3-fig7",
            region: Region::R3,
            description: "humid, fire-period bifurcation (figure 7)",
            params: params(19.0, 3.1, 0.1, 65.0, 1.5, 0.015, 0.5, 0.6, 0.5, 0.04),
            gamma_tg_panels: vec![0.04],
            tau_panels: vec![0.5, 0.6],
        },
        _ => return None,
    };
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;

    #[test]
    fn presets_are_valid() {
        for p in presets() {
            Model::new(p.params).unwrap();
            assert_eq!(p.params.gamma_tg, p.gamma_tg_panels[0]);
            assert_eq!(p.params.tau, p.tau_panels[0]);
        }
    }

    #[test]
    fn aliases() {
        assert_eq!(preset("R1-fig2").unwrap().name, "R1");
        assert!(preset("R9").is_none());
    }

    #[test]
    fn fig6_values() {
        let p = preset("R3-fig6").unwrap().params;
        assert_eq!(
            (p.k_g, p.gamma_g, p.delta_g0, p.lambda_fg, p.k_t, p.gamma_t, p.delta_t, p.lambda_ft, p.tau, p.alpha, p.gamma_tg),
            (19.0, 3.1, 0.1, 0.5, 50.0, 1.5, 0.015, 0.6, 0.5, 2.0, 0.09)
        );
    }

    #[test]
    fn warnings_for_out_of_range() {
        let p = preset("R1").unwrap().params;
        // The figure uses λ_fT = 0.9, above the semi-arid range.
        let w = range_warnings(&p, Region::R1);
        assert_eq!(w.len(), 1);
        assert!(w[0].starts_with("lambda_fT"));
        assert!(range_warnings(&preset("R3-fig6").unwrap().params, Region::R3).len() > 1);
    }
}
