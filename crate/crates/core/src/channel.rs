//! Link budget and M-PSK bit-error model.
//!
//! Powers are in dBm, losses in dB. The received power of each aircraft is
//! constant for the run, so the error probability is computed once per
//! aircraft and reused for every packet it sends.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::scenario::{Aircraft, BerMode, ScenarioConfig};
use crate::traffic::PacketKind;

// Target is 1e-6 absolute; Simpson's local error estimate can be optimistic
// on coarse panels, so integrate well below it and always split a few times.
const QUAD_TOL: f64 = 1e-10;
const QUAD_MIN_DEPTH: u32 = 4;
const QUAD_MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    pub freq_mhz: f64,
    pub noise_floor_dbm: f64,
    pub sensitivity_dbm: f64,
    pub ber_mode: BerMode,
    pub psk_order: u32,
    /// When false the channel is ideal: no sensitivity gate and no bit errors.
    pub errors_enabled: bool,
}

impl LinkBudget {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        LinkBudget {
            freq_mhz: cfg.freq_mhz,
            noise_floor_dbm: cfg.noise_floor_dbm,
            sensitivity_dbm: cfg.sensitivity_dbm,
            ber_mode: cfg.ber_mode,
            psk_order: cfg.psk_order,
            errors_enabled: cfg.channel_errors_enabled,
        }
    }

    pub fn bit_error_rate(&self, r: f64) -> Result<f64> {
        match self.ber_mode {
            BerMode::ApproxEq5 | BerMode::PerBit => Ok(ber_mpsk_approx(r, self.psk_order)),
            BerMode::ExactEq4 => ber_mpsk_exact(r, self.psk_order),
            BerMode::ApproxPrinted => Ok(ber_mpsk_approx_printed(r, self.psk_order)),
        }
    }
}

pub fn path_loss_db(d_km: f64, f_mhz: f64) -> Result<f64> {
    if d_km.is_nan() || d_km <= 0.0 || f_mhz.is_nan() || f_mhz <= 0.0 {
        return Err(Error::Domain(format!(
            "path loss needs positive distance and frequency, got d={d_km} km, f={f_mhz} MHz"
        )));
    }
    Ok(32.44 + 20.0 * d_km.log10() + 20.0 * f_mhz.log10())
}

pub fn received_power_dbm(tx_power_dbm: f64, loss_db: f64) -> f64 {
    tx_power_dbm - loss_db
}

pub fn passes_sensitivity(s_dbm: f64, a_dbm: f64) -> bool {
    s_dbm >= a_dbm
}

pub fn snr_linear(s_dbm: f64, n_dbm: f64) -> f64 {
    10f64.powf((s_dbm - n_dbm) / 10.0)
}

/// `erfc(sqrt(r) * sin(pi/M))`.
pub fn ber_mpsk_approx(r: f64, m: u32) -> f64 {
    let r = r.max(0.0);
    erfc(r.sqrt() * (PI / m as f64).sin()).clamp(0.0, 1.0)
}

/// `erfc(sqrt(r * sin(pi/M)))`, with the sine inside the square root.
pub fn ber_mpsk_approx_printed(r: f64, m: u32) -> f64 {
    let r = r.max(0.0);
    erfc((r * (PI / m as f64).sin()).sqrt()).clamp(0.0, 1.0)
}

/// Exact M-PSK phase-decision error probability
///
/// `Pe = 1 - 1/(2pi) ∫_{-pi/M}^{pi/M} e^{-r} [1 + sqrt(4 pi r) cos t e^{r cos^2 t} Φ(sqrt(2r) cos t)] dt`.
///
/// Writing `Φ = 1 - Q` splits the integrand into a part with a closed-form
/// integral and a remainder integrated by adaptive Simpson quadrature:
///
/// `Pe = erfc(sqrt(r) sin(pi/M)) - e^{-r}/M + ∫ sqrt(r/pi) cos t e^{-r sin^2 t} Q(sqrt(2r) cos t) dt`.
///
/// Every term stays small at high SNR, so the tail is accurate far below the
/// quadrature tolerance instead of drowning in `1 - (1 - ε)` cancellation.
pub fn ber_mpsk_exact(r: f64, m: u32) -> Result<f64> {
    if r.is_nan() || r < 0.0 || m < 2 {
        return Err(Error::Domain(format!("exact M-PSK BER needs r >= 0 and M >= 2, got r={r}, M={m}")));
    }
    let half = PI / m as f64;
    let closed = erfc(r.sqrt() * half.sin()) - (-r).exp() / m as f64;
    let k = (r / PI).sqrt();
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        k * c * (-r * s * s).exp() * 0.5 * erfc(r.sqrt() * c)
    };
    // symmetric in t
    let tail = 2.0
        * adaptive_simpson(&integrand, 0.0, half, QUAD_TOL / 2.0, QUAD_MAX_DEPTH)
            .ok_or(Error::Quadrature { r, order: m })?;
    Ok((closed + tail).clamp(0.0, 1.0))
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    if depth + QUAD_MIN_DEPTH <= QUAD_MAX_DEPTH && delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Some(l + r)
}

/// Probability that a packet of `kind` is bad, given a per-bit error probability.
pub fn corruption_probability(pe_bit: f64, kind: PacketKind, mode: BerMode) -> f64 {
    let pe = pe_bit.clamp(0.0, 1.0);
    match mode {
        BerMode::PerBit => {
            let bits = kind.on_air_bits() as f64;
            (-(bits * (-pe).ln_1p()).exp_m1()).clamp(0.0, 1.0)
        }
        _ => pe,
    }
}

/// Channel state of one quasi-static aircraft.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AircraftLink {
    pub loss_db: f64,
    pub rx_power_dbm: f64,
    pub below_sensitivity: bool,
    pub snr: f64,
    pub pe_bit: f64,
    errors_enabled: bool,
    corrupt_by_kind: [f64; 6],
}

impl AircraftLink {
    pub fn new(aircraft: &Aircraft, link: &LinkBudget) -> Result<Self> {
        let loss_db = path_loss_db(aircraft.distance_km, link.freq_mhz)?;
        let rx_power_dbm = received_power_dbm(aircraft.power_dbm, loss_db);
        let snr = snr_linear(rx_power_dbm, link.noise_floor_dbm);
        let pe_bit = link.bit_error_rate(snr)?;
        let mut corrupt_by_kind = [0.0; 6];
        for kind in PacketKind::ALL {
            corrupt_by_kind[kind.index()] = corruption_probability(pe_bit, kind, link.ber_mode);
        }
        Ok(AircraftLink {
            loss_db,
            rx_power_dbm,
            below_sensitivity: link.errors_enabled
                && !passes_sensitivity(rx_power_dbm, link.sensitivity_dbm),
            snr,
            pe_bit,
            errors_enabled: link.errors_enabled,
            corrupt_by_kind,
        })
    }

    pub fn corruption_probability(&self, kind: PacketKind) -> f64 {
        if self.errors_enabled {
            self.corrupt_by_kind[kind.index()]
        } else {
            0.0
        }
    }

    /// Draws the good/bad decision for one packet: bad iff `i >= 1 - P` with `i ~ U[0,1)`.
    /// Consumes exactly one draw whenever channel errors are enabled.
    pub fn classify(&self, kind: PacketKind, rng: &mut SimRng) -> Classification {
        let corrupted = if self.errors_enabled {
            let i: f64 = rng.random();
            i >= 1.0 - self.corrupt_by_kind[kind.index()]
        } else {
            false
        };
        Classification {
            rx_power_dbm: self.rx_power_dbm,
            pe_bit: self.pe_bit,
            corrupted: corrupted && !self.below_sensitivity,
            below_sensitivity: self.below_sensitivity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub rx_power_dbm: f64,
    pub pe_bit: f64,
    pub corrupted: bool,
    pub below_sensitivity: bool,
}

pub fn classify_transmission(
    aircraft: &Aircraft,
    kind: PacketKind,
    link: &LinkBudget,
    rng: &mut SimRng,
) -> Result<Classification> {
    Ok(AircraftLink::new(aircraft, link)?.classify(kind, rng))
}
