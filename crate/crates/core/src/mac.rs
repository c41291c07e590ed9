//! Unslotted ALOHA reception at a single ground station.
//!
//! Packets occupy half-open intervals `[start, start + duration)`. Every
//! member of a chain of transitively overlapping packets is lost; there is
//! no capture effect. Corrupted packets collide like intact ones.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::traffic::Transmission;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Received,
    LostCollision,
    LostCorrupted,
    LostBelowSensitivity,
}

impl Verdict {
    pub fn is_lost(self) -> bool {
        self != Verdict::Received
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Received => "received",
            Verdict::LostCollision => "lost_collision",
            Verdict::LostCorrupted => "lost_corrupted",
            Verdict::LostBelowSensitivity => "lost_below_sensitivity",
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReceptionOutcome {
    /// Index into the resolved transmission slice.
    pub index: usize,
    pub verdict: Verdict,
}

pub fn overlaps(a: &Transmission, b: &Transmission) -> bool {
    a.start_s < b.end_s() && b.start_s < a.end_s()
}

fn check_sorted(transmissions: &[Transmission]) -> Result<()> {
    match transmissions
        .windows(2)
        .position(|w| w[1].start_s < w[0].start_s)
    {
        Some(i) => Err(Error::Unsorted { index: i + 1 }),
        None => Ok(()),
    }
}

/// Maximal chains of transitively overlapping packets, as index lists into
/// `transmissions`. Below-sensitivity packets are skipped entirely.
pub fn overlap_clusters(transmissions: &[Transmission]) -> Result<Vec<Vec<usize>>> {
    check_sorted(transmissions)?;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut frontier = f64::NEG_INFINITY;
    for (i, t) in transmissions.iter().enumerate() {
        if t.below_sensitivity {
            continue;
        }
        match clusters.last_mut() {
            Some(current) if t.start_s < frontier => {
                current.push(i);
                frontier = frontier.max(t.end_s());
            }
            _ => {
                clusters.push(vec![i]);
                frontier = t.end_s();
            }
        }
    }
    Ok(clusters)
}

/// One outcome per input transmission, in input order.
///
/// Precedence when several loss causes apply:
/// below sensitivity > collision > corruption.
pub fn resolve(transmissions: &[Transmission]) -> Result<Vec<ReceptionOutcome>> {
    let mut verdicts: Vec<Verdict> = transmissions
        .iter()
        .map(|t| {
            if t.below_sensitivity {
                Verdict::LostBelowSensitivity
            } else if t.corrupted {
                Verdict::LostCorrupted
            } else {
                Verdict::Received
            }
        })
        .collect();
    for cluster in overlap_clusters(transmissions)? {
        if cluster.len() > 1 {
            for i in cluster {
                verdicts[i] = Verdict::LostCollision;
            }
        }
    }
    Ok(verdicts
        .into_iter()
        .enumerate()
        .map(|(index, verdict)| ReceptionOutcome { index, verdict })
        .collect())
}

pub fn outcomes_csv(transmissions: &[Transmission], outcomes: &[ReceptionOutcome]) -> String {
    let mut s = String::from("emitter_id,kind,start_s,verdict\n");
    for o in outcomes {
        let t = &transmissions[o.index];
        s.push_str(&format!(
            "{},{},{:.9},{}\n",
            t.emitter_id,
            t.kind,
            t.start_s,
            o.verdict.name()
        ));
    }
    s
}
