//! Experiment description and fleet generation.
//!
//! Scenario files are flat `key = value` text, one entry per line, with `#`
//! starting a comment. Only `n_planes` is required.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::AirframeKind;
use crate::rng::{self, Purpose};
use crate::traffic::KindSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BerMode {
    /// `erfc(sqrt(r) * sin(pi/M))`, the high-SNR approximation of the exact integral.
    ApproxEq5,
    /// Adaptive quadrature of the exact M-PSK phase-error integral.
    ExactEq4,
    /// Approximate bit error rate compounded over every on-air bit of the packet.
    PerBit,
    /// `erfc(sqrt(r * sin(pi/M)))`, the approximation with the sine under the root.
    ApproxPrinted,
}

impl BerMode {
    pub const ALL: [BerMode; 4] = [
        BerMode::ApproxEq5,
        BerMode::ExactEq4,
        BerMode::PerBit,
        BerMode::ApproxPrinted,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BerMode::ApproxEq5 => "approx_eq5",
            BerMode::ExactEq4 => "exact_eq4",
            BerMode::PerBit => "per_bit",
            BerMode::ApproxPrinted => "approx_printed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.key() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceModel {
    /// Distance uniform on (0, R].
    UniformDistance,
    /// Position uniform over the disk of radius R.
    UniformArea,
}

impl DistanceModel {
    pub fn key(self) -> &'static str {
        match self {
            DistanceModel::UniformDistance => "uniform_distance",
            DistanceModel::UniformArea => "uniform_area",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [DistanceModel::UniformDistance, DistanceModel::UniformArea]
            .into_iter()
            .find(|m| m.key() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub n_planes: u32,
    pub n_uavs: u32,
    pub plane_radius_km: f64,
    pub uav_radius_km: f64,
    pub plane_power_dbm: f64,
    pub uav_power_dbm: f64,
    pub sensitivity_dbm: f64,
    pub freq_mhz: f64,
    pub bandwidth_hz: f64,
    pub noise_floor_dbm: f64,
    pub duration_s: f64,
    pub seed: u64,
    pub enabled_kinds: KindSet,
    pub channel_errors_enabled: bool,
    pub ber_mode: BerMode,
    pub psk_order: u32,
    pub distance_model: DistanceModel,
    pub deadline_s: f64,
    pub tracked_aircraft: u32,
    pub bin_width_km: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_planes: 0,
            n_uavs: 0,
            plane_radius_km: 50.0,
            uav_radius_km: 5.0,
            plane_power_dbm: 44.0,
            uav_power_dbm: 30.0,
            sensitivity_dbm: -93.0,
            freq_mhz: 1090.0,
            bandwidth_hz: 1e6,
            noise_floor_dbm: -90.0,
            duration_s: 500.0,
            seed: 1,
            enabled_kinds: KindSet::all(),
            channel_errors_enabled: false,
            ber_mode: BerMode::ApproxEq5,
            psk_order: 8,
            distance_model: DistanceModel::UniformDistance,
            deadline_s: 3.0,
            tracked_aircraft: 0,
            bin_width_km: 2.5,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "n_planes",
    "n_uavs",
    "plane_radius_km",
    "uav_radius_km",
    "plane_power_dbm",
    "uav_power_dbm",
    "sensitivity_dbm",
    "freq_mhz",
    "bandwidth_hz",
    "noise_floor_dbm",
    "duration_s",
    "seed",
    "enabled_kinds",
    "channel_errors_enabled",
    "ber_mode",
    "psk_order",
    "distance_model",
    "deadline_s",
    "tracked_aircraft",
    "bin_width_km",
];

/// Rejection reason for a single `set` call.
#[derive(Debug, Clone, PartialEq)]
pub enum SetError {
    UnknownKey,
    BadValue(String),
}

fn parse_num<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, SetError> {
    value
        .parse()
        .map_err(|_| SetError::BadValue(format!("expected {what}, got `{value}`")))
}

impl ScenarioConfig {
    pub fn n_aircraft(&self) -> u32 {
        self.n_planes + self.n_uavs
    }

    /// Assigns one key from its textual value. Does not validate cross-field invariants.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        let v = value.trim();
        match key {
            "n_planes" => self.n_planes = parse_num(v, "a non-negative integer")?,
            "n_uavs" => self.n_uavs = parse_num(v, "a non-negative integer")?,
            "plane_radius_km" => self.plane_radius_km = parse_num(v, "a number")?,
            "uav_radius_km" => self.uav_radius_km = parse_num(v, "a number")?,
            "plane_power_dbm" => self.plane_power_dbm = parse_num(v, "a number")?,
            "uav_power_dbm" => self.uav_power_dbm = parse_num(v, "a number")?,
            "sensitivity_dbm" => self.sensitivity_dbm = parse_num(v, "a number")?,
            "freq_mhz" => self.freq_mhz = parse_num(v, "a number")?,
            "bandwidth_hz" => self.bandwidth_hz = parse_num(v, "a number")?,
            "noise_floor_dbm" => self.noise_floor_dbm = parse_num(v, "a number")?,
            "duration_s" => self.duration_s = parse_num(v, "a number")?,
            "seed" => self.seed = parse_num(v, "an unsigned 64-bit integer")?,
            "enabled_kinds" => self.enabled_kinds = v.parse().map_err(SetError::BadValue)?,
            "channel_errors_enabled" => {
                self.channel_errors_enabled = parse_num(v, "true or false")?
            }
            "ber_mode" => {
                self.ber_mode = BerMode::parse(v).ok_or_else(|| {
                    SetError::BadValue(format!(
                        "expected one of approx_eq5, exact_eq4, per_bit, approx_printed, got `{v}`"
                    ))
                })?
            }
            "psk_order" => self.psk_order = parse_num(v, "a positive integer")?,
            "distance_model" => {
                self.distance_model = DistanceModel::parse(v).ok_or_else(|| {
                    SetError::BadValue(format!(
                        "expected uniform_distance or uniform_area, got `{v}`"
                    ))
                })?
            }
            "deadline_s" => self.deadline_s = parse_num(v, "a number")?,
            "tracked_aircraft" => self.tracked_aircraft = parse_num(v, "an aircraft index")?,
            "bin_width_km" => self.bin_width_km = parse_num(v, "a number")?,
            _ => return Err(SetError::UnknownKey),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                bad.push(msg.to_string());
            }
        };
        check(self.n_aircraft() >= 1, "n_planes + n_uavs must be at least 1");
        check(
            self.uav_radius_km > 0.0 && self.uav_radius_km.is_finite(),
            "uav_radius_km must be positive",
        );
        check(
            self.uav_radius_km <= self.plane_radius_km && self.plane_radius_km.is_finite(),
            "uav_radius_km must not exceed plane_radius_km",
        );
        check(
            self.duration_s > 0.0 && self.duration_s.is_finite(),
            "duration_s must be positive",
        );
        check(
            self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite(),
            "bandwidth_hz must be positive",
        );
        check(self.freq_mhz > 0.0 && self.freq_mhz.is_finite(), "freq_mhz must be positive");
        check(!self.enabled_kinds.is_empty(), "enabled_kinds must not be empty");
        check(
            self.psk_order >= 2 && self.psk_order.is_power_of_two(),
            "psk_order must be a power of two, at least 2",
        );
        check(self.deadline_s > 0.0, "deadline_s must be positive");
        check(self.bin_width_km > 0.0, "bin_width_km must be positive");
        check(
            self.n_aircraft() == 0 || self.tracked_aircraft < self.n_aircraft(),
            "tracked_aircraft must index an aircraft",
        );
        for (name, v) in [
            ("plane_power_dbm", self.plane_power_dbm),
            ("uav_power_dbm", self.uav_power_dbm),
            ("sensitivity_dbm", self.sensitivity_dbm),
            ("noise_floor_dbm", self.noise_floor_dbm),
        ] {
            check(v.is_finite(), &format!("{name} must be finite"));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Renders the config in scenario-file syntax; `load_scenario` reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(s, "{key} = {}", self.value_text(key).unwrap_or_default());
        }
        s
    }

    pub fn value_text(&self, key: &str) -> Option<String> {
        Some(match key {
            "n_planes" => self.n_planes.to_string(),
            "n_uavs" => self.n_uavs.to_string(),
            "plane_radius_km" => self.plane_radius_km.to_string(),
            "uav_radius_km" => self.uav_radius_km.to_string(),
            "plane_power_dbm" => self.plane_power_dbm.to_string(),
            "uav_power_dbm" => self.uav_power_dbm.to_string(),
            "sensitivity_dbm" => self.sensitivity_dbm.to_string(),
            "freq_mhz" => self.freq_mhz.to_string(),
            "bandwidth_hz" => self.bandwidth_hz.to_string(),
            "noise_floor_dbm" => self.noise_floor_dbm.to_string(),
            "duration_s" => self.duration_s.to_string(),
            "seed" => self.seed.to_string(),
            "enabled_kinds" => self.enabled_kinds.to_string(),
            "channel_errors_enabled" => self.channel_errors_enabled.to_string(),
            "ber_mode" => self.ber_mode.key().to_string(),
            "psk_order" => self.psk_order.to_string(),
            "distance_model" => self.distance_model.key().to_string(),
            "deadline_s" => self.deadline_s.to_string(),
            "tracked_aircraft" => self.tracked_aircraft.to_string(),
            "bin_width_km" => self.bin_width_km.to_string(),
            _ => return None,
        })
    }
}

pub fn load_scenario(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut saw_planes = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            key: line.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        match cfg.set(key, value) {
            Ok(()) => {}
            Err(SetError::UnknownKey) => {
                return Err(Error::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                })
            }
            Err(SetError::BadValue(message)) => {
                return Err(Error::Parse {
                    line: line_no,
                    key: key.to_string(),
                    message,
                })
            }
        }
        saw_planes |= key == "n_planes";
    }
    if !saw_planes {
        return Err(Error::MissingKey("n_planes"));
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aircraft {
    pub id: u32,
    pub kind: AirframeKind,
    pub distance_km: f64,
    pub power_dbm: f64,
    pub address: u32,
}

/// Planes take ids `0..n_planes`, UAVs follow. Each aircraft's distance comes
/// from its own seeded stream, so growing the fleet leaves existing members unchanged.
pub fn build_fleet(config: &ScenarioConfig) -> Result<Vec<Aircraft>> {
    config.validate()?;
    let base: u32 = rng::fleet_stream(config.seed, Purpose::Address).random::<u32>() & 0xFF_FFFF;
    let fleet = (0..config.n_aircraft())
        .map(|id| {
            let (kind, radius, power) = if id < config.n_planes {
                (AirframeKind::Plane, config.plane_radius_km, config.plane_power_dbm)
            } else {
                (AirframeKind::Uav, config.uav_radius_km, config.uav_power_dbm)
            };
            let mut rng = rng::stream(config.seed, id, Purpose::Placement);
            // 1 - U[0,1) lies in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            let frac = match config.distance_model {
                DistanceModel::UniformDistance => u,
                DistanceModel::UniformArea => u.sqrt(),
            };
            Aircraft {
                id,
                kind,
                distance_km: radius * frac,
                power_dbm: power,
                address: base.wrapping_add(id) & 0xFF_FFFF,
            }
        })
        .collect();
    Ok(fleet)
}
