//! Discrete-event Monte Carlo simulation of the shared 1090 MHz ADS-B
//! channel: planes and UAVs broadcast jittered extended squitters, a single
//! ground station receives them under unslotted ALOHA with a link-budget and
//! M-PSK bit-error model, and the run is reduced to received ratios,
//! consecutive-loss histograms and position-update probabilities.

pub mod channel;
pub mod engine;
pub mod error;
pub mod frame;
pub mod mac;
pub mod metrics;
pub mod output;
pub mod presets;
pub mod rng;
pub mod scenario;
pub mod sweep;
pub mod traffic;

pub use engine::{run, run_replicated, simulate, Replicated, RunReport, Simulation, Summary};
pub use error::{Error, Result};
pub use frame::{AirframeKind, SquitterFrame};
pub use scenario::{build_fleet, load_scenario, Aircraft, BerMode, ScenarioConfig};
pub use traffic::{KindSet, PacketKind, Transmission};
