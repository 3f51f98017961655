//! Figure presets: the published drive parameters plus the sweep window and
//! exceptional-point ray used to regenerate each phase diagram.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::config::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigurePreset {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4a,
    Fig4b,
    Fig5,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 8] = [
        FigurePreset::Fig1,
        FigurePreset::Fig2,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig3c,
        FigurePreset::Fig4a,
        FigurePreset::Fig4b,
        FigurePreset::Fig5,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig3c => "fig3c",
            FigurePreset::Fig4a => "fig4a",
            FigurePreset::Fig4b => "fig4b",
            FigurePreset::Fig5 => "fig5",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "one-photon resonance, gain on the first half period",
            FigurePreset::Fig2 => "two-photon resonance, gain on the first half period",
            FigurePreset::Fig3a => "multiphoton resonances, gamma0 = gamma, gamma1 = 0, T0 = T1",
            FigurePreset::Fig3b => "multiphoton resonances, gamma0 = -gamma1 = gamma, T0 = T1",
            FigurePreset::Fig3c => "multiphoton resonances, gamma0 = -gamma1 = gamma, T0 = 0.55T",
            FigurePreset::Fig4a => "square-wave coupling, delta0 = 1, delta1 = 0, T0 = 0.5T",
            FigurePreset::Fig4b => "square-wave coupling, delta0 = 1, delta1 = -0.2, T0 = 0.55T",
            FigurePreset::Fig5 => "high frequency, omega = 3, T0 = 0.4T, gamma0 and gamma1 free",
        }
    }

    /// The preset as a config layer.
    pub fn document(&self) -> Value {
        let gamma = json!({"field": "gamma0", "min": 0.0, "max": 0.5, "count": 400});
        let balanced_gamma = json!({
            "name": "gamma",
            "terms": [{"field": "gamma0", "scale": 1.0}, {"field": "gamma1", "scale": -1.0}],
            "min": 0.0, "max": 0.5, "count": 400
        });
        let common_gamma = json!({"field": "gamma", "min": 0.0, "max": 0.5, "count": 400});
        let omega =
            |min: f64, max: f64| json!({"field": "omega", "min": min, "max": max, "count": 400});
        let ep = |min: f64, max: f64, boundary: &str| json!({"field": "omega", "min": min, "max": max, "count": 2000, "boundary": boundary});
        let protocol = |d1: f64, g0: f64, g1: f64, omega: f64, fraction: f64| json!({"delta0": 1.0, "delta1": d1, "gamma0": g0, "gamma1": g1, "omega": omega, "t0_fraction": fraction});

        match self {
            FigurePreset::Fig1 => json!({
                "protocol": protocol(1.0, 0.2, 0.0, 1.0, 0.5),
                "sweep": {"x": omega(0.8, 1.25), "y": gamma},
                "ep": ep(0.8, 1.25, "minus_one"),
            }),
            FigurePreset::Fig2 => json!({
                "protocol": protocol(1.0, 0.2, 0.0, 0.495, 0.5),
                "sweep": {"x": omega(0.44, 0.52), "y": gamma},
                "ep": ep(0.48, 0.51, "plus_one"),
            }),
            FigurePreset::Fig3a => json!({
                "protocol": protocol(1.0, 0.2, 0.0, 1.0, 0.5),
                "sweep": {"x": omega(0.15, 1.25), "y": gamma},
                "ep": ep(0.15, 1.25, "both"),
            }),
            FigurePreset::Fig3b => json!({
                "protocol": protocol(1.0, 0.2, -0.2, 1.0, 0.5),
                "sweep": {"x": omega(0.15, 1.25), "y": balanced_gamma},
                "ep": ep(0.15, 1.25, "both"),
            }),
            FigurePreset::Fig3c => json!({
                "protocol": protocol(1.0, 0.2, -0.2, 1.0, 0.55),
                "sweep": {"x": omega(0.15, 1.25), "y": balanced_gamma},
                "ep": ep(0.15, 1.25, "both"),
            }),
            FigurePreset::Fig4a => json!({
                "protocol": protocol(0.0, 0.2, 0.2, 0.5, 0.5),
                "sweep": {"x": omega(0.1, 0.6), "y": common_gamma},
                "ep": ep(0.1, 0.6, "both"),
            }),
            FigurePreset::Fig4b => json!({
                "protocol": protocol(-0.2, 0.2, 0.2, 0.46, 0.55),
                "sweep": {"x": omega(0.1, 0.55), "y": common_gamma},
                "ep": ep(0.1, 0.55, "both"),
            }),
            FigurePreset::Fig5 => json!({
                "protocol": protocol(1.0, 0.0, 0.0, 3.0, 0.4),
                "sweep": {
                    "x": {"field": "gamma0", "min": -4.0, "max": 4.0, "count": 401},
                    "y": {"field": "gamma1", "min": -4.0, "max": 4.0, "count": 401},
                },
                "ep": {"field": "gamma0", "min": 0.0, "max": 5.0, "count": 500, "boundary": "plus_one"},
            }),
        }
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePreset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| ConfigError::UnknownPreset(s.to_string()))
    }
}
