//! Mode S extended squitter frame layout.
//!
//! The 112-bit main body is packed as DF(5) CA/CF(3) AA(24) ME(56) PI(24),
//! most-significant bit first within each field. PI is carried opaquely.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::PacketKind;

pub const FRAME_BITS: usize = 112;
pub const FRAME_BYTES: usize = FRAME_BITS / 8;

/// Control bits transmitted alongside every squitter and short Mode S reply.
pub const CONTROL_BITS: u32 = 8;
/// Payload of a short Mode S (SMAG) packet.
pub const SHORT_PAYLOAD_BITS: u32 = 56;

/// Air time of one bit.
pub const BIT_DURATION_S: f64 = 1e-6;

pub const DF_ADSB_TRANSPONDER: u8 = 17;
pub const DF_ADSB_NON_TRANSPONDER: u8 = 18;

const DF_WIDTH: u32 = 5;
const CA_WIDTH: u32 = 3;
const AA_WIDTH: u32 = 24;
const ME_WIDTH: u32 = 56;
const PI_WIDTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AirframeKind {
    Plane,
    Uav,
}

impl AirframeKind {
    pub fn downlink_format(self) -> u8 {
        match self {
            AirframeKind::Plane => DF_ADSB_TRANSPONDER,
            AirframeKind::Uav => DF_ADSB_NON_TRANSPONDER,
        }
    }

    pub fn from_downlink_format(df: u8) -> Option<Self> {
        match df {
            DF_ADSB_TRANSPONDER => Some(AirframeKind::Plane),
            DF_ADSB_NON_TRANSPONDER => Some(AirframeKind::Uav),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AirframeKind::Plane => "plane",
            AirframeKind::Uav => "uav",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SquitterFrame {
    pub df: u8,
    pub ca_cf: u8,
    pub aa: u32,
    pub me: u64,
    pub pi: u32,
}

impl SquitterFrame {
    /// Frame with zero CA/CF, ME and PI for the given emitter class and address.
    pub fn for_airframe(kind: AirframeKind, address: u32) -> Self {
        SquitterFrame {
            df: kind.downlink_format(),
            aa: address & 0x00FF_FFFF,
            ..Self::default()
        }
    }

    pub fn airframe_kind(&self) -> Option<AirframeKind> {
        AirframeKind::from_downlink_format(self.df)
    }
}

/// The packed 112-bit body.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameBits([u8; FRAME_BYTES]);

impl FrameBits {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; FRAME_BYTES] = bytes.try_into().map_err(|_| Error::FrameLength {
            expected: FRAME_BYTES,
            found: bytes.len(),
            unit: "bytes",
        })?;
        Ok(FrameBits(arr))
    }

    /// Parses a string of exactly 112 `0`/`1` characters.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n != FRAME_BITS {
            return Err(Error::FrameLength {
                expected: FRAME_BITS,
                found: n,
                unit: "bits",
            });
        }
        let mut out = [0u8; FRAME_BYTES];
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out[i / 8] |= 0x80 >> (i % 8),
                other => return Err(Error::FrameText(format!("bad bit character {other:?}"))),
            }
        }
        Ok(FrameBits(out))
    }

    /// Parses 28 hexadecimal digits.
    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() != FRAME_BYTES * 2 {
            return Err(Error::FrameLength {
                expected: FRAME_BYTES * 2,
                found: s.len(),
                unit: "hex digits",
            });
        }
        let mut out = [0u8; FRAME_BYTES];
        for (i, byte) in out.iter_mut().enumerate() {
            let pair = s
                .get(2 * i..2 * i + 2)
                .ok_or_else(|| Error::FrameText("non-ASCII hex".into()))?;
            *byte = u8::from_str_radix(pair, 16)
                .map_err(|_| Error::FrameText(format!("bad hex digits {pair:?}")))?;
        }
        Ok(FrameBits(out))
    }

    pub fn as_bytes(&self) -> &[u8; FRAME_BYTES] {
        &self.0
    }

    pub fn bit(&self, index: usize) -> bool {
        self.0[index / 8] & (0x80 >> (index % 8)) != 0
    }

    pub fn to_bit_string(&self) -> String {
        (0..FRAME_BITS).map(|i| if self.bit(i) { '1' } else { '0' }).collect()
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02X}")).collect()
    }

    fn as_u128(&self) -> u128 {
        let mut buf = [0u8; 16];
        buf[16 - FRAME_BYTES..].copy_from_slice(&self.0);
        u128::from_be_bytes(buf)
    }

    fn from_u128(v: u128) -> Self {
        let buf = v.to_be_bytes();
        let mut out = [0u8; FRAME_BYTES];
        out.copy_from_slice(&buf[16 - FRAME_BYTES..]);
        FrameBits(out)
    }
}

impl fmt::Debug for FrameBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrameBits({})", self.to_hex())
    }
}

impl fmt::Display for FrameBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn check_width(field: &'static str, value: u64, width: u32) -> Result<u128> {
    if value >> width != 0 {
        return Err(Error::FieldWidth {
            field,
            value,
            width,
        });
    }
    Ok(value as u128)
}

pub fn pack(frame: &SquitterFrame) -> Result<FrameBits> {
    let mut acc: u128 = 0;
    for (field, value, width) in [
        ("DF", frame.df as u64, DF_WIDTH),
        ("CA/CF", frame.ca_cf as u64, CA_WIDTH),
        ("AA", frame.aa as u64, AA_WIDTH),
        ("ME", frame.me, ME_WIDTH),
        ("PI", frame.pi as u64, PI_WIDTH),
    ] {
        acc = (acc << width) | check_width(field, value, width)?;
    }
    Ok(FrameBits::from_u128(acc))
}

pub fn unpack(bits: &FrameBits) -> SquitterFrame {
    let v = bits.as_u128();
    let take = |shift: u32, width: u32| ((v >> shift) & ((1u128 << width) - 1)) as u64;
    let pi_shift = 0;
    let me_shift = pi_shift + PI_WIDTH;
    let aa_shift = me_shift + ME_WIDTH;
    let ca_shift = aa_shift + AA_WIDTH;
    let df_shift = ca_shift + CA_WIDTH;
    SquitterFrame {
        df: take(df_shift, DF_WIDTH) as u8,
        ca_cf: take(ca_shift, CA_WIDTH) as u8,
        aa: take(aa_shift, AA_WIDTH) as u32,
        me: take(me_shift, ME_WIDTH),
        pi: take(pi_shift, PI_WIDTH) as u32,
    }
}

/// Unpacks a raw byte slice, rejecting anything other than 14 bytes.
pub fn unpack_bytes(bytes: &[u8]) -> Result<SquitterFrame> {
    Ok(unpack(&FrameBits::from_bytes(bytes)?))
}

pub fn on_air_bits(kind: PacketKind) -> u32 {
    match kind {
        PacketKind::Smag => SHORT_PAYLOAD_BITS + CONTROL_BITS,
        _ => FRAME_BITS as u32 + CONTROL_BITS,
    }
}

pub fn on_air_duration_s(kind: PacketKind) -> f64 {
    on_air_bits(kind) as f64 * BIT_DURATION_S
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn df17_only() {
        let bits = pack(&SquitterFrame {
            df: 17,
            ..Default::default()
        })
        .unwrap();
        let s = bits.to_bit_string();
        assert_eq!(s.len(), 112);
        assert_eq!(&s[..5], "10001");
        assert!(s[5..].chars().all(|c| c == '0'));
    }

    #[test]
    fn all_zero() {
        let bits = pack(&SquitterFrame::default()).unwrap();
        assert_eq!(bits.to_bit_string(), "0".repeat(112));
        assert_eq!(unpack(&bits), SquitterFrame::default());
    }

    #[test]
    fn df18_prefix() {
        let s = format!("10010{}", "0".repeat(107));
        let frame = unpack(&FrameBits::from_bit_str(&s).unwrap());
        assert_eq!(frame.df, 18);
        assert_eq!(frame.airframe_kind(), Some(AirframeKind::Uav));
    }

    #[test]
    fn field_positions() {
        let frame = SquitterFrame {
            df: 0,
            ca_cf: 0b101,
            aa: 0,
            me: 0,
            pi: 1,
        };
        let s = pack(&frame).unwrap().to_bit_string();
        assert_eq!(&s[5..8], "101");
        assert_eq!(s.rfind('1'), Some(111));
        let aa = pack(&SquitterFrame {
            aa: 0x80_0000,
            ..Default::default()
        })
        .unwrap();
        assert!(aa.bit(8));
        let me = pack(&SquitterFrame {
            me: 1,
            ..Default::default()
        })
        .unwrap();
        assert!(me.bit(87));
        assert_eq!(me.to_bit_string().matches('1').count(), 1);
    }

    #[test]
    fn overflow_rejected() {
        let err = pack(&SquitterFrame {
            df: 32,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::FieldWidth { field: "DF", width: 5, .. }));
        assert!(pack(&SquitterFrame {
            me: 1 << 56,
            ..Default::default()
        })
        .is_err());
        assert!(pack(&SquitterFrame {
            aa: 1 << 24,
            ..Default::default()
        })
        .is_err());
        assert!(pack(&SquitterFrame {
            ca_cf: 8,
            ..Default::default()
        })
        .is_err());
        assert!(pack(&SquitterFrame {
            pi: 1 << 24,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn wrong_length() {
        assert!(matches!(
            unpack_bytes(&[0u8; 13]),
            Err(Error::FrameLength { expected: 14, found: 13, .. })
        ));
        assert!(FrameBits::from_bit_str(&"0".repeat(111)).is_err());
        assert!(FrameBits::from_hex("8D").is_err());
    }

    #[test]
    fn hex_text() {
        let frame = SquitterFrame {
            df: 17,
            ca_cf: 5,
            aa: 0x4840D6,
            me: 0x202CC371C32CE0,
            pi: 0x576098,
        };
        let bits = pack(&frame).unwrap();
        assert_eq!(bits.to_hex(), "8D4840D6202CC371C32CE0576098");
        assert_eq!(unpack(&FrameBits::from_hex(&bits.to_hex()).unwrap()), frame);
    }

    #[test]
    fn airframe_mapping() {
        for kind in [AirframeKind::Plane, AirframeKind::Uav] {
            assert_eq!(AirframeKind::from_downlink_format(kind.downlink_format()), Some(kind));
        }
        assert_eq!(AirframeKind::Plane.downlink_format(), 17);
        assert_eq!(AirframeKind::Uav.downlink_format(), 18);
        assert_eq!(AirframeKind::from_downlink_format(11), None);
    }

    #[test]
    fn air_time() {
        assert_eq!(on_air_bits(PacketKind::Pos), 120);
        assert_eq!(on_air_bits(PacketKind::Vel), 120);
        assert_eq!(on_air_bits(PacketKind::Smag), 64);
        assert!((on_air_duration_s(PacketKind::Pos) - 120e-6).abs() < 1e-15);
        for kind in PacketKind::ALL {
            if kind != PacketKind::Smag {
                assert_eq!(on_air_bits(kind), FRAME_BITS as u32 + 8);
            }
        }
    }

    proptest! {
        #[test]
        fn bits_round_trip(bytes in proptest::array::uniform14(any::<u8>())) {
            let bits = FrameBits::from_bytes(&bytes).unwrap();
            prop_assert_eq!(pack(&unpack(&bits)).unwrap(), bits);
        }
    }
}
