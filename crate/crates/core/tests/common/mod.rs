//! Reference implementations shared by the integration tests. None of these
//! call into the crate's own algorithms; they only use its data types.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use squitter_sim::mac::Verdict;
use squitter_sim::traffic::{PacketKind, Transmission};

/// Mean emission interval and on-air duration, seconds.
pub fn kind_timing(kind: PacketKind) -> (f64, f64) {
    match kind {
        PacketKind::Pos | PacketKind::Vel => (0.5, 120e-6),
        PacketKind::Id => (5.0, 120e-6),
        PacketKind::Aos => (2.5, 120e-6),
        PacketKind::Tss => (1.25, 120e-6),
        PacketKind::Smag => (0.2, 64e-6),
    }
}

/// Pure-ALOHA success probability of a homogeneous fleet of `n` emitters:
/// a type-i packet survives with probability exp(-sum_j lambda_j (T_i + T_j)),
/// where lambda_j counts the other n - 1 emitters. The aggregate weights each
/// type by its emission rate.
pub fn aloha_received_ratio(n: u32, kinds: &[PacketKind]) -> f64 {
    let others = n.saturating_sub(1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for &i in kinds {
        let (mi, ti) = kind_timing(i);
        let exponent: f64 = kinds
            .iter()
            .map(|&j| {
                let (mj, tj) = kind_timing(j);
                others / mj * (ti + tj)
            })
            .sum();
        num += (-exponent).exp() / mi;
        den += 1.0 / mi;
    }
    num / den
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// All-pairs collision resolution, independent of input order.
pub fn brute_force_verdicts(tx: &[Transmission]) -> Vec<Verdict> {
    let n = tx.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut touched = vec![false; n];
    for a in 0..n {
        if tx[a].below_sensitivity {
            continue;
        }
        for b in a + 1..n {
            if tx[b].below_sensitivity {
                continue;
            }
            let (x, y) = (&tx[a], &tx[b]);
            if x.start_s < y.start_s + y.duration_s && y.start_s < x.start_s + x.duration_s {
                touched[a] = true;
                touched[b] = true;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    (0..n)
        .map(|i| {
            if tx[i].below_sensitivity {
                Verdict::LostBelowSensitivity
            } else if touched[i] {
                Verdict::LostCollision
            } else if tx[i].corrupted {
                Verdict::LostCorrupted
            } else {
                Verdict::Received
            }
        })
        .collect()
}

/// Connected components of the overlap graph with two or more members,
/// each sorted, ordered by smallest member.
pub fn brute_force_clusters(tx: &[Transmission]) -> Vec<Vec<usize>> {
    let n = tx.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in a + 1..n {
            if tx[a].below_sensitivity || tx[b].below_sensitivity {
                continue;
            }
            let (x, y) = (&tx[a], &tx[b]);
            if x.start_s < y.start_s + y.duration_s && y.start_s < x.start_s + x.duration_s {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, t) in tx.iter().enumerate() {
        if !t.below_sensitivity {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() > 1).collect();
    out.sort();
    out
}

/// Random sorted packet list. Start times sit on an 8 us grid so that
/// exactly touching intervals occur regularly.
pub fn random_instance(rng: &mut impl Rng, max_len: usize) -> Vec<Transmission> {
    let n = rng.random_range(0..=max_len);
    let span_slots = (n as u64 * rng.random_range(5..40)).max(1);
    let mut tx: Vec<Transmission> = (0..n)
        .map(|_| {
            let kind = if rng.random_bool(0.2) { PacketKind::Smag } else { PacketKind::Pos };
            let start = rng.random_range(0..span_slots) as f64 * 8e-6;
            let mut t = Transmission::new(rng.random_range(0..50), kind, start);
            t.corrupted = rng.random_bool(0.1);
            t.below_sensitivity = rng.random_bool(0.05);
            t
        })
        .collect();
    tx.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    tx
}

/// Run lengths of consecutive losses, as (length, count) sorted by length.
pub fn scan_runs(pos: &[Verdict]) -> Vec<(usize, u64)> {
    let mut lengths = Vec::new();
    let mut i = 0;
    while i < pos.len() {
        if pos[i] == Verdict::Received {
            i += 1;
            continue;
        }
        let start = i;
        while i < pos.len() && pos[i] != Verdict::Received {
            i += 1;
        }
        lengths.push(i - start);
    }
    lengths.sort_unstable();
    let mut out: Vec<(usize, u64)> = Vec::new();
    for l in lengths {
        match out.last_mut() {
            Some((len, c)) if *len == l => *c += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Number of length-k windows in which every packet was lost.
pub fn scan_failed_windows(pos: &[Verdict], k: usize) -> u64 {
    if pos.len() < k {
        return 0;
    }
    pos.windows(k)
        .filter(|w| w.iter().all(|v| *v != Verdict::Received))
        .count() as u64
}

/// Craig's single-integral symbol error rate for M-PSK,
/// (1/pi) * int_0^{(M-1)pi/M} exp(-r sin^2(pi/M) / sin^2 phi) dphi,
/// by composite Simpson on a fixed fine grid.
pub fn craig_mpsk_ser(r: f64, m: u32) -> f64 {
    let m = m as f64;
    let upper = (m - 1.0) * std::f64::consts::PI / m;
    let g = r * (std::f64::consts::PI / m).sin().powi(2);
    let f = |phi: f64| {
        let s = phi.sin();
        if s == 0.0 {
            if g == 0.0 { 1.0 } else { 0.0 }
        } else {
            (-g / (s * s)).exp()
        }
    };
    let n = 20_000;
    let h = upper / n as f64;
    let mut acc = f(0.0) + f(upper);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0 / std::f64::consts::PI
}

/// Monte Carlo symbol error rate of coherent M-PSK with unit symbol energy
/// and Es/N0 = r; returns (estimate, standard error).
pub fn monte_carlo_mpsk_ser(r: f64, m: u32, trials: u32, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half_sector = std::f64::consts::PI / m as f64;
    let (amp, sigma) = if r > 0.0 {
        (1.0, (1.0 / (2.0 * r)).sqrt())
    } else {
        (0.0, 1.0)
    };
    let mut errors = 0u32;
    for _ in 0..trials {
        let i: f64 = amp + sigma * rng.sample::<f64, _>(StandardNormal);
        let q: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        if q.atan2(i).abs() > half_sector {
            errors += 1;
        }
    }
    let p = errors as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against U(0, 1).
pub fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i + 1) as f64 / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov critical value at the 1% level for large n.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
