mod common;

use squitter_sim::engine::{run, run_replicated, simulate};
use squitter_sim::mac::Verdict;
use squitter_sim::output::report_json;
use squitter_sim::presets;
use squitter_sim::scenario::{build_fleet, DistanceModel, ScenarioConfig};
use squitter_sim::traffic::{generate_timeline, KindSet, PacketKind};
use squitter_sim::AirframeKind;

fn small(n_planes: u32, n_uavs: u32, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n_planes,
        n_uavs,
        duration_s: 60.0,
        seed,
        ..Default::default()
    }
}

#[test]
fn plane_distances_are_uniform() {
    let mut xs = Vec::new();
    for seed in 0..100 {
        let fleet = build_fleet(&ScenarioConfig {
            n_planes: 1000,
            seed,
            ..Default::default()
        })
        .unwrap();
        xs.extend(fleet.iter().map(|a| a.distance_km / 50.0));
    }
    let n = xs.len();
    assert!(xs.iter().all(|x| *x > 0.0 && *x <= 1.0));
    let d = common::ks_uniform(xs);
    assert!(d < common::ks_critical_1pct(n), "KS D = {d} over {n} draws");
}

#[test]
fn uniform_area_distances_follow_square_law() {
    let mut xs = Vec::new();
    for seed in 0..20 {
        let fleet = build_fleet(&ScenarioConfig {
            n_planes: 1000,
            seed,
            distance_model: DistanceModel::UniformArea,
            ..Default::default()
        })
        .unwrap();
        xs.extend(fleet.iter().map(|a| (a.distance_km / 50.0).powi(2)));
    }
    let n = xs.len();
    assert!(common::ks_uniform(xs) < common::ks_critical_1pct(n));
}

#[test]
fn pos_counts_stay_within_jitter_bounds() {
    let fleet = build_fleet(&small(50, 0, 9)).unwrap();
    let pos = KindSet::from_kinds([PacketKind::Pos]);
    let mut total = 0;
    for a in &fleet {
        let n = generate_timeline(a, pos, 500.0, 9).len();
        assert!((833..=1251).contains(&n), "{n}");
        total += n;
    }
    let mean = total as f64 / fleet.len() as f64;
    assert!((mean - 1000.0).abs() < 5.0, "{mean}");
}

#[test]
fn six_kind_rate_per_second() {
    let fleet = build_fleet(&small(20, 0, 4)).unwrap();
    let n: usize = fleet
        .iter()
        .map(|a| generate_timeline(a, KindSet::all(), 500.0, 4).len())
        .sum();
    let rate = n as f64 / (20.0 * 500.0);
    assert!((rate - 10.4).abs() < 0.1, "{rate}");
}

#[test]
fn repeat_runs_are_byte_identical() {
    let cfg = ScenarioConfig {
        channel_errors_enabled: true,
        noise_floor_dbm: -85.0,
        ..small(60, 10, 5)
    };
    assert_eq!(report_json(&run(&cfg).unwrap()), report_json(&run(&cfg).unwrap()));
    assert_eq!(run_replicated(&cfg, 3).unwrap(), run_replicated(&cfg, 3).unwrap());
}

#[test]
fn outcomes_partition_generated_packets() {
    for seed in 0..5 {
        let cfg = ScenarioConfig {
            channel_errors_enabled: seed % 2 == 0,
            noise_floor_dbm: -84.0,
            ..small(80, 10, seed)
        };
        let sim = simulate(&cfg).unwrap();
        assert_eq!(sim.outcomes.len(), sim.transmissions.len());
        let r = sim.report().unwrap();
        assert!(r.totals.is_partition());
        assert_eq!(r.totals.generated as usize, sim.transmissions.len());
        let per_aircraft: u64 = r.aircraft.iter().map(|a| a.total.generated).sum();
        assert_eq!(per_aircraft, r.totals.generated);
        assert_eq!(r.planes.generated + r.uavs.generated, r.totals.generated);
    }
}

#[test]
fn adding_uavs_or_errors_only_adds_losses() {
    let base = small(100, 0, 12);
    let more = ScenarioConfig { n_uavs: 20, ..base.clone() };
    let noisy = ScenarioConfig {
        channel_errors_enabled: true,
        noise_floor_dbm: -84.0,
        ..more.clone()
    };
    let a = simulate(&base).unwrap();
    let b = simulate(&more).unwrap();
    let c = simulate(&noisy).unwrap();
    for id in 0..base.n_planes {
        let (pa, pb, pc) = (a.pos_verdicts(id), b.pos_verdicts(id), c.pos_verdicts(id));
        assert_eq!(pa.len(), pb.len());
        assert_eq!(pb.len(), pc.len());
        for i in 0..pa.len() {
            if pa[i].is_lost() {
                assert!(pb[i].is_lost());
            }
            if pb[i].is_lost() {
                assert!(pc[i].is_lost());
            }
        }
    }
}

#[test]
fn collision_only_presets_have_no_channel_losses() {
    let r = run(&ScenarioConfig {
        duration_s: 50.0,
        ..presets::config("fig4").unwrap()
    })
    .unwrap();
    assert_eq!(r.totals.lost_corrupted, 0);
    assert_eq!(r.totals.lost_below_sensitivity, 0);
    assert!(r.totals.lost_collision > 0);
}

#[test]
fn uav_rows_appear_in_bins() {
    let r = run(&ScenarioConfig {
        duration_s: 20.0,
        ..presets::config("fig6").unwrap()
    })
    .unwrap();
    assert!(r.bins.iter().any(|b| b.class == AirframeKind::Uav));
    assert!(r.bins.iter().any(|b| b.class == AirframeKind::Plane));
    assert!(r.bins.iter().all(|b| b.class == AirframeKind::Plane || b.bin_hi_km <= 5.0));
}

#[test]
fn below_sensitivity_aircraft_never_received() {
    let cfg = ScenarioConfig {
        sensitivity_dbm: -80.0,
        channel_errors_enabled: true,
        ..small(40, 0, 3)
    };
    let sim = simulate(&cfg).unwrap();
    for a in &sim.fleet {
        let gated = 44.0 - (32.44 + 20.0 * a.distance_km.log10() + 20.0 * 1090f64.log10()) < -80.0;
        let v = sim.pos_verdicts(a.id);
        if gated {
            assert!(v.iter().all(|x| *x == Verdict::LostBelowSensitivity));
        } else {
            assert!(v.iter().all(|x| *x != Verdict::LostBelowSensitivity));
        }
    }
}
