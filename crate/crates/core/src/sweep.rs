//! One-parameter sweeps with replications per point.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::engine::{run_replicated, Replicated, Stat};
use crate::error::{Error, Result};
use crate::output::fmt_sig6;
use crate::rng;
use crate::scenario::{ScenarioConfig, SetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NPlanes,
    NUavs,
    NoiseFloorDbm,
    DeadlineS,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [
        SweepParam::NPlanes,
        SweepParam::NUavs,
        SweepParam::NoiseFloorDbm,
        SweepParam::DeadlineS,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SweepParam::NPlanes => "n_planes",
            SweepParam::NUavs => "n_uavs",
            SweepParam::NoiseFloorDbm => "noise_floor_dbm",
            SweepParam::DeadlineS => "deadline_s",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.key() == s).ok_or_else(|| {
            let keys: Vec<_> = Self::ALL.iter().map(|p| p.key()).collect();
            Error::Sweep(format!(
                "unknown sweep parameter `{s}`; valid parameters: {}",
                keys.join(", ")
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<String>,
    pub reps: u32,
}

impl SweepSpec {
    pub fn new(param: &str, values: &str, reps: u32) -> Result<Self> {
        let param = param.parse()?;
        let values: Vec<String> = values
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(Error::Sweep("value list is empty".into()));
        }
        if reps == 0 {
            return Err(Error::Sweep("replications per point must be at least 1".into()));
        }
        Ok(SweepSpec {
            param,
            values,
            reps,
        })
    }
}

/// Base seed of a sweep point; depends only on the base seed and the value.
pub fn point_seed(base_seed: u64, value: &str) -> u64 {
    let bits = value
        .parse::<f64>()
        .map(f64::to_bits)
        .unwrap_or_else(|_| value.bytes().fold(0u64, |h, b| rng::combine(h, b as u64)));
    rng::combine(base_seed, bits)
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub config: ScenarioConfig,
    pub replicated: Replicated,
}

pub fn point_config(spec: &SweepSpec, base: &ScenarioConfig, value: &str) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    cfg.set(spec.param.key(), value).map_err(|e| match e {
        SetError::BadValue(m) => Error::Sweep(format!("{}: {m}", spec.param)),
        SetError::UnknownKey => Error::Sweep(format!("unknown key {}", spec.param)),
    })?;
    cfg.seed = point_seed(base.seed, value);
    cfg.validate()?;
    Ok(cfg)
}

/// Points are evaluated in parallel; results keep the order of `spec.values`.
pub fn run_sweep(spec: &SweepSpec, base: &ScenarioConfig) -> Result<Vec<SweepPoint>> {
    let configs = spec
        .values
        .iter()
        .map(|v| point_config(spec, base, v).map(|c| (v.clone(), c)))
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .map(|(value, config)| {
            let replicated = run_replicated(&config, spec.reps)?;
            Ok(SweepPoint {
                value,
                config,
                replicated,
            })
        })
        .collect()
}

pub fn sweep_csv(spec: &SweepSpec, points: &[SweepPoint]) -> String {
    let mut s = String::from(
        "# schema: squitter-sim/sweep/v1\n\
         param,value,replication,seed,received_ratio,received_ratio_std,plane_received_ratio,uav_received_ratio,update_probability\n",
    );
    let cell = |x: Option<f64>| x.map(fmt_sig6).unwrap_or_default();
    let mean = |x: Option<Stat>| cell(x.map(|s| s.mean));
    for p in points {
        for (k, r) in p.replicated.reports.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{k},{},{},,{},{},{}",
                spec.param,
                p.value,
                r.seed,
                fmt_sig6(r.received_ratio),
                cell(r.plane_received_ratio),
                cell(r.uav_received_ratio),
                cell(r.tracked.update.map(|u| u.probability)),
            );
        }
        let sm = &p.replicated.summary;
        let _ = writeln!(
            s,
            "{},{},summary,{},{},{},{},{},{}",
            spec.param,
            p.value,
            p.config.seed,
            fmt_sig6(sm.received_ratio.mean),
            fmt_sig6(sm.received_ratio.std),
            mean(sm.plane_received_ratio),
            mean(sm.uav_received_ratio),
            mean(sm.update_probability),
        );
    }
    s
}
