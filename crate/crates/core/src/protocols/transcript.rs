use crate::error::{Error, Result};

/// Everything the users sent, plus the shared randomness they consumed.
///
/// Binary form (all integers big-endian):
///
/// ```text
/// u32 user_count
/// u64 public_bits_used
/// user_count x { u32 bit_len, ceil(bit_len / 8) bytes, MSB first, zero-padded }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub messages: Vec<Vec<bool>>,
    pub bits_sent: Vec<usize>,
    pub public_bits_used: usize,
}

impl Transcript {
    pub fn new(messages: Vec<Vec<bool>>, public_bits_used: usize) -> Self {
        let bits_sent = messages.iter().map(Vec::len).collect();
        Self {
            messages,
            bits_sent,
            public_bits_used,
        }
    }

    pub fn num_users(&self) -> usize {
        self.messages.len()
    }

    pub fn total_bits(&self) -> usize {
        self.bits_sent.iter().sum()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.total_bits() / 8 + 5 * self.messages.len());
        out.extend_from_slice(&(self.messages.len() as u32).to_be_bytes());
        out.extend_from_slice(&(self.public_bits_used as u64).to_be_bytes());
        for msg in &self.messages {
            out.extend_from_slice(&(msg.len() as u32).to_be_bytes());
            for chunk in msg.chunks(8) {
                let byte = chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (j, &b)| acc | (u8::from(b) << (7 - j)));
                out.push(byte);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let users = take_u32(&mut cursor)? as usize;
        let public_bits_used = usize::try_from(take_u64(&mut cursor)?)
            .map_err(|_| Error::Transcript("public bit count overflows".into()))?;
        let mut messages = Vec::with_capacity(users.min(1 << 20));
        for k in 0..users {
            let len = take_u32(&mut cursor)? as usize;
            let nbytes = len.div_ceil(8);
            if cursor.len() < nbytes {
                return Err(Error::Transcript(format!("message {k} truncated")));
            }
            let (body, rest) = cursor.split_at(nbytes);
            let msg: Vec<bool> = (0..len).map(|j| body[j / 8] >> (7 - j % 8) & 1 == 1).collect();
            if !len.is_multiple_of(8) && body[nbytes - 1] & (0xFF >> (len % 8)) != 0 {
                return Err(Error::Transcript(format!("message {k} has nonzero padding")));
            }
            messages.push(msg);
            cursor = rest;
        }
        if !cursor.is_empty() {
            return Err(Error::Transcript(format!("{} trailing bytes", cursor.len())));
        }
        Ok(Self::new(messages, public_bits_used))
    }
}

fn take_u32(cursor: &mut &[u8]) -> Result<u32> {
    let (head, rest) = cursor
        .split_first_chunk::<4>()
        .ok_or_else(|| Error::Transcript("unexpected end of input".into()))?;
    *cursor = rest;
    Ok(u32::from_be_bytes(*head))
}

fn take_u64(cursor: &mut &[u8]) -> Result<u64> {
    let (head, rest) = cursor
        .split_first_chunk::<8>()
        .ok_or_else(|| Error::Transcript("unexpected end of input".into()))?;
    *cursor = rest;
    Ok(u64::from_be_bytes(*head))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_bytes() {
        let t = Transcript::new(
            vec![
                vec![true, false, true],
                vec![],
                vec![true, true, true, true, false, false, false, false, true],
            ],
            12,
        );
        let hex: String = t.to_bytes().iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(
            hex,
            "00000003000000000000000c00000003a00000000000000009f080"
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(Transcript::from_bytes(&[0, 0]).is_err());
        let mut bytes = Transcript::new(vec![vec![true]], 0).to_bytes();
        bytes.push(0);
        assert!(Transcript::from_bytes(&bytes).is_err());
        let mut padded = Transcript::new(vec![vec![true]], 0).to_bytes();
        *padded.last_mut().unwrap() |= 1;
        assert!(Transcript::from_bytes(&padded).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(msgs in prop::collection::vec(prop::collection::vec(any::<bool>(), 0..40), 0..12), used in 0usize..1000) {
            let t = Transcript::new(msgs, used);
            prop_assert_eq!(Transcript::from_bytes(&t.to_bytes()).unwrap(), t);
        }
    }
}
