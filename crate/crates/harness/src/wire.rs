//! The 8-byte header plus body framing shared by all handshake messages.
//!
//! | offset | size | field                      |
//! |--------|------|----------------------------|
//! | 0      | 1    | version, `0x01`            |
//! | 1      | 1    | message type               |
//! | 2      | 2    | kem id, big-endian         |
//! | 4      | 4    | body length, big-endian    |

use crate::error::{HarnessError, Result};

pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 8;
/// Upper bound on body lengths accepted from the network.
pub const MAX_BODY: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    ClientHello = 1,
    ServerHello = 2,
    Finished = 3,
    /// One-byte error code sent before closing on a protocol error.
    Alert = 4,
}

impl MsgType {
    fn from_u8(b: u8) -> Option<Self> {
        match b {
            1 => Some(MsgType::ClientHello),
            2 => Some(MsgType::ServerHello),
            3 => Some(MsgType::Finished),
            4 => Some(MsgType::Alert),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandshakeMessage {
    pub msg_type: MsgType,
    pub kem_id: u16,
    pub body: Vec<u8>,
}

/// Parsed header: type, kem id and body length.
pub fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(MsgType, u16, usize)> {
    if h[0] != VERSION {
        return Err(HarnessError::Protocol(format!("unsupported version 0x{:02x}", h[0])));
    }
    let t = MsgType::from_u8(h[1]).ok_or_else(|| HarnessError::Protocol(format!("unknown message type {}", h[1])))?;
    let kem_id = u16::from_be_bytes([h[2], h[3]]);
    let len = u32::from_be_bytes([h[4], h[5], h[6], h[7]]) as usize;
    if len > MAX_BODY {
        return Err(HarnessError::Protocol(format!("body length {len} exceeds {MAX_BODY}")));
    }
    Ok((t, kem_id, len))
}

impl HandshakeMessage {
    pub fn new(msg_type: MsgType, kem_id: u16, body: Vec<u8>) -> Self {
        HandshakeMessage { msg_type, kem_id, body }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.body.len());
        out.push(VERSION);
        out.push(self.msg_type as u8);
        out.extend_from_slice(&self.kem_id.to_be_bytes());
        out.extend_from_slice(&(self.body.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let header: &[u8; HEADER_LEN] = bytes
            .get(..HEADER_LEN)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| HarnessError::Protocol(format!("message of {} bytes is shorter than its header", bytes.len())))?;
        let (msg_type, kem_id, len) = parse_header(header)?;
        if bytes.len() != HEADER_LEN + len {
            return Err(HarnessError::Protocol(format!(
                "header announces {len} body bytes, message carries {}",
                bytes.len() - HEADER_LEN
            )));
        }
        Ok(HandshakeMessage {
            msg_type,
            kem_id,
            body: bytes[HEADER_LEN..].to_vec(),
        })
    }
}
