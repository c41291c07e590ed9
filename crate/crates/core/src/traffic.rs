//! Per-aircraft emission timelines with jittered ("shaking") intervals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::frame;
use crate::rng::{self, Purpose, SimRng};
use crate::scenario::Aircraft;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PacketKind {
    #[serde(rename = "POS")]
    Pos,
    #[serde(rename = "VEL")]
    Vel,
    #[serde(rename = "ID")]
    Id,
    #[serde(rename = "AOS")]
    Aos,
    #[serde(rename = "TSS")]
    Tss,
    #[serde(rename = "SMAG")]
    Smag,
}

impl PacketKind {
    pub const ALL: [PacketKind; 6] = [
        PacketKind::Pos,
        PacketKind::Vel,
        PacketKind::Id,
        PacketKind::Aos,
        PacketKind::Tss,
        PacketKind::Smag,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PacketKind::Pos => "POS",
            PacketKind::Vel => "VEL",
            PacketKind::Id => "ID",
            PacketKind::Aos => "AOS",
            PacketKind::Tss => "TSS",
            PacketKind::Smag => "SMAG",
        }
    }

    pub fn on_air_bits(self) -> u32 {
        frame::on_air_bits(self)
    }

    pub fn duration_s(self) -> f64 {
        frame::on_air_duration_s(self)
    }

    pub fn schedule(self) -> EmissionSchedule {
        let (lo, hi) = match self {
            PacketKind::Pos | PacketKind::Vel => (0.4, 0.6),
            PacketKind::Id => (4.8, 5.2),
            PacketKind::Aos => (2.4, 2.6),
            PacketKind::Tss => (1.2, 1.3),
            PacketKind::Smag => (0.15, 0.25),
        };
        EmissionSchedule {
            kind: self,
            jitter_lo_s: lo,
            jitter_hi_s: hi,
        }
    }
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PacketKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PacketKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown packet kind `{}`", s.trim()))
    }
}

/// Set of enabled packet kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KindSet(u8);

impl KindSet {
    pub fn all() -> Self {
        Self::from_kinds(PacketKind::ALL)
    }

    pub fn from_kinds(kinds: impl IntoIterator<Item = PacketKind>) -> Self {
        kinds
            .into_iter()
            .fold(KindSet(0), |acc, k| KindSet(acc.0 | 1 << k.index()))
    }

    pub fn contains(self, kind: PacketKind) -> bool {
        self.0 & (1 << kind.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = PacketKind> {
        PacketKind::ALL.into_iter().filter(move |k| self.contains(*k))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(PacketKind::name).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for KindSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(KindSet::all());
        }
        let kinds = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<PacketKind>, _>>()?;
        Ok(KindSet::from_kinds(kinds))
    }
}

impl Serialize for KindSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionSchedule {
    pub kind: PacketKind,
    pub jitter_lo_s: f64,
    pub jitter_hi_s: f64,
}

impl EmissionSchedule {
    pub fn mean_interval_s(&self) -> f64 {
        0.5 * (self.jitter_lo_s + self.jitter_hi_s)
    }

    fn draw_gap(&self, rng: &mut SimRng) -> f64 {
        if self.jitter_hi_s > self.jitter_lo_s {
            rng.random_range(self.jitter_lo_s..=self.jitter_hi_s)
        } else {
            self.jitter_lo_s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transmission {
    pub emitter_id: u32,
    pub kind: PacketKind,
    pub start_s: f64,
    pub duration_s: f64,
    pub rx_power_dbm: f64,
    pub corrupted: bool,
    /// Received power fell below the receiver sensitivity; the packet never reaches the GS.
    pub below_sensitivity: bool,
}

impl Transmission {
    pub fn new(emitter_id: u32, kind: PacketKind, start_s: f64) -> Self {
        Transmission {
            emitter_id,
            kind,
            start_s,
            duration_s: kind.duration_s(),
            rx_power_dbm: f64::NEG_INFINITY,
            corrupted: false,
            below_sensitivity: false,
        }
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.duration_s
    }
}

pub fn next_emission(schedule: &EmissionSchedule, t_now: f64, rng: &mut SimRng) -> f64 {
    t_now + schedule.draw_gap(rng)
}

/// One periodic emission stream: a single packet kind of a single aircraft.
#[derive(Debug, Clone)]
pub struct EmissionSource {
    pub emitter_id: u32,
    pub schedule: EmissionSchedule,
    rng: SimRng,
    next_s: f64,
}

impl EmissionSource {
    pub fn new(seed: u64, emitter_id: u32, kind: PacketKind) -> Self {
        let schedule = kind.schedule();
        let mut rng = rng::stream(seed, emitter_id, Purpose::Emission(kind));
        let first_gap = schedule.draw_gap(&mut rng);
        let next_s = rng.random_range(0.0..first_gap);
        EmissionSource {
            emitter_id,
            schedule,
            rng,
            next_s,
        }
    }

    pub fn kind(&self) -> PacketKind {
        self.schedule.kind
    }

    pub fn peek(&self) -> f64 {
        self.next_s
    }

    /// Returns the pending emission time and schedules the following one.
    pub fn advance(&mut self) -> f64 {
        let t = self.next_s;
        self.next_s = next_emission(&self.schedule, t, &mut self.rng);
        t
    }
}

/// All emissions of one aircraft before `horizon_s`, sorted by start time then kind.
/// Channel annotations are left unset.
pub fn generate_timeline(
    aircraft: &Aircraft,
    kinds: KindSet,
    horizon_s: f64,
    seed: u64,
) -> Vec<Transmission> {
    let mut out = Vec::new();
    for kind in kinds.iter() {
        let mut src = EmissionSource::new(seed, aircraft.id, kind);
        while src.peek() < horizon_s {
            out.push(Transmission::new(aircraft.id, kind, src.advance()));
        }
    }
    out.sort_by(|a, b| a.start_s.total_cmp(&b.start_s).then(a.kind.cmp(&b.kind)));
    out
}

pub fn timeline_csv(transmissions: &[Transmission]) -> String {
    let mut s = String::from("emitter_id,kind,start_s,duration_s\n");
    for t in transmissions {
        s.push_str(&format!(
            "{},{},{:.9},{:.9}\n",
            t.emitter_id, t.kind, t.start_s, t.duration_s
        ));
    }
    s
}
