//! Discrete-event simulation loop.
//!
//! Each (aircraft, packet kind) pair is an emission source. The event queue
//! always holds the next pending emission of every live source; popping an
//! event applies the channel model to that packet and schedules the
//! source's following emission. Once the horizon is reached the complete
//! air log is resolved under ALOHA and reduced to a [`RunReport`].

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{AircraftLink, LinkBudget};
use crate::error::Result;
use crate::frame::AirframeKind;
use crate::mac::{self, ReceptionOutcome, Verdict};
use crate::metrics::{
    self, AircraftTally, BinRow, LossRunHistogram, Tally, UpdateProbabilityResult,
    NOMINAL_POS_INTERVAL_S,
};
use crate::output::{sig6, sig6_opt};
use crate::rng::{self, Purpose, SimRng};
use crate::scenario::{build_fleet, Aircraft, ScenarioConfig};
use crate::traffic::{EmissionSource, PacketKind, Transmission};

pub const REPORT_SCHEMA: &str = "squitter-sim/run/v1";

#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub time_s: f64,
    pub emitter_id: u32,
    pub kind: PacketKind,
    source: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time_s
            .total_cmp(&other.time_s)
            .then(self.emitter_id.cmp(&other.emitter_id))
            .then(self.kind.cmp(&other.kind))
    }
}

/// Min-queue of emission events ordered by (time, emitter, kind).
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        self.heap.push(Reverse(event));
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|Reverse(e)| e)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Everything produced by one run, before reduction to a report.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub fleet: Vec<Aircraft>,
    pub links: Vec<AircraftLink>,
    /// Air log in (start, emitter, kind) order.
    pub transmissions: Vec<Transmission>,
    pub outcomes: Vec<ReceptionOutcome>,
}

pub fn simulate(config: &ScenarioConfig) -> Result<Simulation> {
    config.validate()?;
    let fleet = build_fleet(config)?;
    let budget = LinkBudget::from_config(config);
    let links = fleet
        .iter()
        .map(|a| AircraftLink::new(a, &budget))
        .collect::<Result<Vec<_>>>()?;
    let mut channel_rngs: Vec<SimRng> = fleet
        .iter()
        .map(|a| rng::stream(config.seed, a.id, Purpose::Channel))
        .collect();

    let horizon = config.duration_s;
    let mut sources = Vec::new();
    let mut queue = EventQueue::new();
    for a in &fleet {
        for kind in config.enabled_kinds.iter() {
            let src = EmissionSource::new(config.seed, a.id, kind);
            if src.peek() < horizon {
                queue.push(Event {
                    time_s: src.peek(),
                    emitter_id: a.id,
                    kind,
                    source: sources.len(),
                });
            }
            sources.push(src);
        }
    }

    let expected: f64 = config
        .enabled_kinds
        .iter()
        .map(|k| horizon / k.schedule().mean_interval_s())
        .sum::<f64>()
        * fleet.len() as f64;
    let mut transmissions = Vec::with_capacity(expected as usize + 16);
    while let Some(ev) = queue.pop() {
        let src = &mut sources[ev.source];
        let t = src.advance();
        let id = ev.emitter_id as usize;
        let c = links[id].classify(ev.kind, &mut channel_rngs[id]);
        transmissions.push(Transmission {
            rx_power_dbm: c.rx_power_dbm,
            corrupted: c.corrupted,
            below_sensitivity: c.below_sensitivity,
            ..Transmission::new(ev.emitter_id, ev.kind, t)
        });
        if src.peek() < horizon {
            queue.push(Event {
                time_s: src.peek(),
                ..ev
            });
        }
    }

    let outcomes = mac::resolve(&transmissions)?;
    Ok(Simulation {
        config: config.clone(),
        fleet,
        links,
        transmissions,
        outcomes,
    })
}

impl Simulation {
    /// Time-ordered POS verdicts of one aircraft.
    pub fn pos_verdicts(&self, aircraft_id: u32) -> Vec<Verdict> {
        self.outcomes
            .iter()
            .filter(|o| {
                let t = &self.transmissions[o.index];
                t.emitter_id == aircraft_id && t.kind == PacketKind::Pos
            })
            .map(|o| o.verdict)
            .collect()
    }

    pub fn report(&self) -> Result<RunReport> {
        let mut tallies: Vec<AircraftTally> = self
            .fleet
            .iter()
            .map(|a| AircraftTally {
                aircraft: *a,
                total: Tally::default(),
                by_kind: [Tally::default(); 6],
            })
            .collect();
        for o in &self.outcomes {
            let t = &self.transmissions[o.index];
            let entry = &mut tallies[t.emitter_id as usize];
            entry.total.record(o.verdict);
            entry.by_kind[t.kind.index()].record(o.verdict);
        }

        let mut totals = Tally::default();
        let mut planes = Tally::default();
        let mut uavs = Tally::default();
        let mut kinds = [Tally::default(); 6];
        for t in &tallies {
            totals.merge(&t.total);
            match t.aircraft.kind {
                AirframeKind::Plane => planes.merge(&t.total),
                AirframeKind::Uav => uavs.merge(&t.total),
            }
            for (acc, k) in kinds.iter_mut().zip(&t.by_kind) {
                acc.merge(k);
            }
        }

        let tracked_id = self.config.tracked_aircraft;
        let pos = self.pos_verdicts(tracked_id);
        let histogram = metrics::loss_run_histogram(&pos);
        let pos_tally: Tally = pos.iter().collect();
        let tracked = TrackedReport {
            aircraft: self.fleet[tracked_id as usize],
            pos: pos_tally,
            pos_received_ratio: pos_tally.ratio().ok(),
            update: metrics::update_probability(&pos, self.config.deadline_s, NOMINAL_POS_INTERVAL_S)
                .ok(),
            histogram,
        };
        let bins = metrics::distance_binned_ratio(&tallies, self.config.bin_width_km)?;

        Ok(RunReport {
            schema: REPORT_SCHEMA,
            seed: self.config.seed,
            received_ratio: totals.ratio()?,
            plane_received_ratio: planes.ratio().ok(),
            uav_received_ratio: uavs.ratio().ok(),
            totals,
            planes,
            uavs,
            by_kind: self
                .config
                .enabled_kinds
                .iter()
                .map(|k| KindTally {
                    kind: k,
                    received_ratio: kinds[k.index()].ratio().ok(),
                    tally: kinds[k.index()],
                })
                .collect(),
            tracked,
            bins,
            aircraft: tallies,
            scenario: self.config.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindTally {
    pub kind: PacketKind,
    pub tally: Tally,
    #[serde(serialize_with = "sig6_opt")]
    pub received_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackedReport {
    pub aircraft: Aircraft,
    pub pos: Tally,
    #[serde(serialize_with = "sig6_opt")]
    pub pos_received_ratio: Option<f64>,
    /// `None` when the run produced fewer POS packets than one update window.
    pub update: Option<UpdateProbabilityResult>,
    pub histogram: LossRunHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub seed: u64,
    #[serde(serialize_with = "sig6")]
    pub received_ratio: f64,
    #[serde(serialize_with = "sig6_opt")]
    pub plane_received_ratio: Option<f64>,
    #[serde(serialize_with = "sig6_opt")]
    pub uav_received_ratio: Option<f64>,
    pub totals: Tally,
    pub planes: Tally,
    pub uavs: Tally,
    pub by_kind: Vec<KindTally>,
    pub tracked: TrackedReport,
    pub bins: Vec<BinRow>,
    pub aircraft: Vec<AircraftTally>,
    pub scenario: ScenarioConfig,
}

pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    simulate(config)?.report()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    #[serde(serialize_with = "sig6")]
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    #[serde(serialize_with = "sig6")]
    pub std: f64,
    pub n: usize,
}

impl Stat {
    /// Sorts before summing so the result does not depend on input order.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Stat> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
            dev.sort_by(f64::total_cmp);
            (dev.iter().sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Stat { mean, std, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub received_ratio: Stat,
    pub plane_received_ratio: Option<Stat>,
    pub uav_received_ratio: Option<Stat>,
    pub tracked_pos_received_ratio: Option<Stat>,
    pub update_probability: Option<Stat>,
}

impl Summary {
    pub fn of(reports: &[RunReport]) -> Option<Summary> {
        Some(Summary {
            received_ratio: Stat::of(reports.iter().map(|r| r.received_ratio))?,
            plane_received_ratio: Stat::of(reports.iter().filter_map(|r| r.plane_received_ratio)),
            uav_received_ratio: Stat::of(reports.iter().filter_map(|r| r.uav_received_ratio)),
            tracked_pos_received_ratio: Stat::of(
                reports.iter().filter_map(|r| r.tracked.pos_received_ratio),
            ),
            update_probability: Stat::of(
                reports
                    .iter()
                    .filter_map(|r| r.tracked.update.map(|u| u.probability)),
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicated {
    pub reports: Vec<RunReport>,
    pub summary: Summary,
}

/// Replication `k` runs with `rng::replication_seed(config.seed, k)`.
pub fn run_replicated(config: &ScenarioConfig, n_reps: u32) -> Result<Replicated> {
    config.validate()?;
    let n = n_reps.max(1);
    let reports = (0..n)
        .into_par_iter()
        .map(|k| {
            run(&ScenarioConfig {
                seed: rng::replication_seed(config.seed, k as u64),
                ..config.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::of(&reports).expect("at least one replication");
    Ok(Replicated { reports, summary })
}
