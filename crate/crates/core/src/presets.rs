//! Scenario files shipped with the crate.

use crate::error::Result;
use crate::scenario::{load_scenario, ScenarioConfig};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig3_50",
        text: include_str!("../scenarios/fig3_50.scn"),
    },
    Preset {
        name: "fig3_100",
        text: include_str!("../scenarios/fig3_100.scn"),
    },
    Preset {
        name: "fig3_150",
        text: include_str!("../scenarios/fig3_150.scn"),
    },
    Preset {
        name: "fig3_200",
        text: include_str!("../scenarios/fig3_200.scn"),
    },
    Preset {
        name: "fig4",
        text: include_str!("../scenarios/fig4.scn"),
    },
    Preset {
        name: "fig5",
        text: include_str!("../scenarios/fig5.scn"),
    },
    Preset {
        name: "fig6",
        text: include_str!("../scenarios/fig6.scn"),
    },
    Preset {
        name: "fig7",
        text: include_str!("../scenarios/fig7.scn"),
    },
];

impl Preset {
    pub fn file_name(&self) -> String {
        format!("{}.scn", self.name)
    }

    /// First comment line of the file.
    pub fn description(&self) -> &'static str {
        self.text
            .lines()
            .find_map(|l| l.strip_prefix('#'))
            .map(str::trim)
            .unwrap_or("")
    }

    pub fn config(&self) -> Result<ScenarioConfig> {
        load_scenario(self.text)
    }
}

/// Looks a preset up by name, with or without the `.scn` extension.
pub fn find(name: &str) -> Option<&'static Preset> {
    let stem = name.strip_suffix(".scn").unwrap_or(name);
    PRESETS.iter().find(|p| p.name == stem)
}

pub fn config(name: &str) -> Option<ScenarioConfig> {
    find(name).and_then(|p| p.config().ok())
}
