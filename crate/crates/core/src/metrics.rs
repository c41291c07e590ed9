//! Received ratio, loss-run histograms, position-update probability,
//! distance-binned ratios and noise-floor calibration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::engine;
use crate::error::{Error, Result};
use crate::frame::AirframeKind;
use crate::mac::Verdict;
use crate::output::sig6;
use crate::scenario::{Aircraft, ScenarioConfig};

/// Nominal POS generation period.
pub const NOMINAL_POS_INTERVAL_S: f64 = 0.5;

pub const CALIBRATION_BRACKET_DBM: (f64, f64) = (-120.0, -75.0);
pub const CALIBRATION_TOLERANCE: f64 = 0.005;

/// Outcome counts; ratios are always derived from these integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub generated: u64,
    pub received: u64,
    pub lost_collision: u64,
    pub lost_corrupted: u64,
    pub lost_below_sensitivity: u64,
}

impl Tally {
    pub fn record(&mut self, verdict: Verdict) {
        self.generated += 1;
        match verdict {
            Verdict::Received => self.received += 1,
            Verdict::LostCollision => self.lost_collision += 1,
            Verdict::LostCorrupted => self.lost_corrupted += 1,
            Verdict::LostBelowSensitivity => self.lost_below_sensitivity += 1,
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.generated += other.generated;
        self.received += other.received;
        self.lost_collision += other.lost_collision;
        self.lost_corrupted += other.lost_corrupted;
        self.lost_below_sensitivity += other.lost_below_sensitivity;
    }

    pub fn lost(&self) -> u64 {
        self.lost_collision + self.lost_corrupted + self.lost_below_sensitivity
    }

    /// Every generated packet sits in exactly one bucket.
    pub fn is_partition(&self) -> bool {
        self.received + self.lost() == self.generated
    }

    pub fn ratio(&self) -> Result<f64> {
        if self.generated == 0 {
            return Err(Error::UndefinedRatio);
        }
        Ok(self.received as f64 / self.generated as f64)
    }
}

impl<'a> FromIterator<&'a Verdict> for Tally {
    fn from_iter<I: IntoIterator<Item = &'a Verdict>>(iter: I) -> Self {
        let mut t = Tally::default();
        for v in iter {
            t.record(*v);
        }
        t
    }
}

/// Packets received by the GS over packets sent.
pub fn received_ratio<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Result<f64> {
    verdicts.into_iter().collect::<Tally>().ratio()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LossRunHistogram {
    /// run length -> number of maximal runs of that length
    pub runs: BTreeMap<usize, u64>,
}

impl LossRunHistogram {
    pub fn from_runs(runs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        LossRunHistogram {
            runs: runs.into_iter().filter(|(_, c)| *c > 0).collect(),
        }
    }

    pub fn total_lost(&self) -> u64 {
        self.runs.iter().map(|(len, n)| *len as u64 * n).sum()
    }

    /// Sliding windows of `k` slots lying wholly inside a loss run.
    pub fn failed_windows(&self, k: usize) -> u64 {
        self.runs
            .iter()
            .map(|(len, n)| (*len + 1).saturating_sub(k) as u64 * n)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: squitter-sim/loss-runs/v1\nrun_length,count\n");
        for (len, n) in &self.runs {
            s.push_str(&format!("{len},{n}\n"));
        }
        s
    }
}

impl Serialize for LossRunHistogram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            run_length: usize,
            count: u64,
        }
        s.collect_seq(self.runs.iter().map(|(l, c)| Row {
            run_length: *l,
            count: *c,
        }))
    }
}

/// Maximal runs of consecutive lost packets in a time-ordered POS sequence.
pub fn loss_run_histogram(pos: &[Verdict]) -> LossRunHistogram {
    let mut runs = BTreeMap::new();
    let mut current = 0usize;
    for v in pos.iter().chain(std::iter::once(&Verdict::Received)) {
        if v.is_lost() {
            current += 1;
        } else if current > 0 {
            *runs.entry(current).or_insert(0) += 1;
            current = 0;
        }
    }
    LossRunHistogram { runs }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpdateProbabilityResult {
    pub deadline_s: f64,
    pub window_k: usize,
    #[serde(serialize_with = "sig6")]
    pub probability: f64,
    pub failed_windows: u64,
    pub total_windows: u64,
}

pub fn window_len(deadline_s: f64, nominal_interval_s: f64) -> usize {
    // 1e-9 slack keeps exact multiples (3 / 0.5) from rounding up
    ((deadline_s / nominal_interval_s) - 1e-9).ceil().max(1.0) as usize
}

/// A window of `K = ceil(deadline / nominal)` consecutive POS slots fails
/// iff every packet in it was lost. Probability = 1 - failed / (N - K + 1).
pub fn update_probability(
    pos: &[Verdict],
    deadline_s: f64,
    nominal_interval_s: f64,
) -> Result<UpdateProbabilityResult> {
    if deadline_s.is_nan() || deadline_s <= 0.0 || nominal_interval_s.is_nan() || nominal_interval_s <= 0.0 {
        return Err(Error::Domain(format!(
            "deadline ({deadline_s}) and nominal interval ({nominal_interval_s}) must be positive"
        )));
    }
    let k = window_len(deadline_s, nominal_interval_s);
    if pos.len() < k {
        return Err(Error::InsufficientData {
            have: pos.len(),
            need: k,
        });
    }
    let total = (pos.len() - k + 1) as u64;
    let failed = loss_run_histogram(pos).failed_windows(k);
    Ok(UpdateProbabilityResult {
        deadline_s,
        window_k: k,
        probability: 1.0 - failed as f64 / total as f64,
        failed_windows: failed,
        total_windows: total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AircraftTally {
    pub aircraft: Aircraft,
    pub total: Tally,
    /// Indexed by `PacketKind::index`.
    pub by_kind: [Tally; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinRow {
    #[serde(serialize_with = "sig6")]
    pub bin_center_km: f64,
    #[serde(serialize_with = "sig6")]
    pub bin_lo_km: f64,
    #[serde(serialize_with = "sig6")]
    pub bin_hi_km: f64,
    pub class: AirframeKind,
    #[serde(serialize_with = "sig6")]
    pub ratio: f64,
    pub n_aircraft: u32,
    pub received: u64,
    pub generated: u64,
}

/// Pooled received ratio per class and distance bin `(lo, hi]`. Empty bins are omitted.
/// Rows are ordered by class (planes first), then distance.
pub fn distance_binned_ratio(tallies: &[AircraftTally], bin_width_km: f64) -> Result<Vec<BinRow>> {
    if bin_width_km.is_nan() || bin_width_km <= 0.0 {
        return Err(Error::Domain(format!("bin width must be positive, got {bin_width_km}")));
    }
    let mut bins: BTreeMap<(AirframeKind, i64), (u32, Tally)> = BTreeMap::new();
    for t in tallies {
        let idx = ((t.aircraft.distance_km / bin_width_km).ceil() as i64 - 1).max(0);
        let entry = bins.entry((t.aircraft.kind, idx)).or_default();
        entry.0 += 1;
        entry.1.merge(&t.total);
    }
    bins.into_iter()
        .filter(|(_, (_, tally))| tally.generated > 0)
        .map(|((class, idx), (n, tally))| {
            let lo = idx as f64 * bin_width_km;
            Ok(BinRow {
                bin_center_km: lo + 0.5 * bin_width_km,
                bin_lo_km: lo,
                bin_hi_km: lo + bin_width_km,
                class,
                ratio: tally.ratio()?,
                n_aircraft: n,
                received: tally.received,
                generated: tally.generated,
            })
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub target: f64,
    pub noise_floor_dbm: f64,
    pub achieved_ratio: f64,
    pub replications: u32,
    /// (noise floor, mean ratio) for every evaluated point, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

/// Bisects the noise floor over [-120, -75] dBm until the replicated mean
/// aggregate received ratio lies within 0.5 points of `target`.
///
/// Every evaluation reuses the same replication seeds, so the ratio is a
/// monotone non-increasing function of the floor; a violation is reported
/// as an error rather than bisected through.
pub fn calibrate_noise_floor(target: f64, base: &ScenarioConfig, reps: u32) -> Result<Calibration> {
    if !target.is_finite() {
        return Err(Error::Domain(format!("calibration target must be finite, got {target}")));
    }
    let reps = reps.max(1);
    let mut evaluations = Vec::new();
    let mut eval = |floor: f64| -> Result<f64> {
        let cfg = ScenarioConfig {
            noise_floor_dbm: floor,
            ..base.clone()
        };
        let ratio = engine::run_replicated(&cfg, reps)?.summary.received_ratio.mean;
        evaluations.push((floor, ratio));
        Ok(ratio)
    };
    let done = |floor: f64, ratio: f64, evaluations: Vec<(f64, f64)>| Calibration {
        target,
        noise_floor_dbm: floor,
        achieved_ratio: ratio,
        replications: reps,
        evaluations,
    };

    let (mut lo, mut hi) = CALIBRATION_BRACKET_DBM;
    let mut r_lo = eval(lo)?;
    let mut r_hi = eval(hi)?;
    if r_hi > r_lo {
        return Err(Error::NonMonotone(format!(
            "{lo} dBm -> {r_lo}, {hi} dBm -> {r_hi}"
        )));
    }
    if (r_lo - target).abs() <= CALIBRATION_TOLERANCE {
        return Ok(done(lo, r_lo, evaluations));
    }
    if (r_hi - target).abs() <= CALIBRATION_TOLERANCE {
        return Ok(done(hi, r_hi, evaluations));
    }
    if target > r_lo || target < r_hi {
        return Err(Error::Calibration {
            target,
            lo_dbm: lo,
            lo_ratio: r_lo,
            hi_dbm: hi,
            hi_ratio: r_hi,
        });
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let r_mid = eval(mid)?;
        if r_mid > r_lo || r_mid < r_hi {
            return Err(Error::NonMonotone(format!(
                "{mid} dBm -> {r_mid} outside [{r_hi}, {r_lo}]"
            )));
        }
        if (r_mid - target).abs() <= CALIBRATION_TOLERANCE {
            return Ok(done(mid, r_mid, evaluations));
        }
        if r_mid > target {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    Err(Error::Calibration {
        target,
        lo_dbm: lo,
        lo_ratio: r_lo,
        hi_dbm: hi,
        hi_ratio: r_hi,
    })
}
