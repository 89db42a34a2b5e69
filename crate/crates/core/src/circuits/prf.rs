//! SHAKE256 over the Keccak-f[1600] permutation, and the keyed PRF used for
//! garbled-table rows and output decoding.

const RATE: usize = 136;

struct Sponge {
    state: [u64; 25],
    pos: usize,
}

impl Sponge {
    fn new() -> Self {
        Self {
            state: [0; 25],
            pos: 0,
        }
    }

    fn xor_byte(&mut self, i: usize, b: u8) {
        self.state[i / 8] ^= u64::from(b) << (8 * (i % 8));
    }

    fn absorb(&mut self, data: &[u8]) {
        for &b in data {
            self.xor_byte(self.pos, b);
            self.pos += 1;
            if self.pos == RATE {
                keccak::f1600(&mut self.state);
                self.pos = 0;
            }
        }
    }

    fn squeeze(mut self, out_len: usize) -> Vec<u8> {
        self.xor_byte(self.pos, 0x1f);
        self.xor_byte(RATE - 1, 0x80);
        keccak::f1600(&mut self.state);
        let mut out = Vec::with_capacity(out_len);
        let mut i = 0;
        while out.len() < out_len {
            if i == RATE {
                keccak::f1600(&mut self.state);
                i = 0;
            }
            out.push((self.state[i / 8] >> (8 * (i % 8))) as u8);
            i += 1;
        }
        out
    }
}

pub fn shake256(input: &[u8], out_len: usize) -> Vec<u8> {
    let mut s = Sponge::new();
    s.absorb(input);
    s.squeeze(out_len)
}

/// `PRF(domain, parts)`: SHAKE256 over length-prefixed fields, so distinct
/// argument tuples never collide as byte strings.
pub fn prf(domain: &[u8], parts: &[&[u8]], out_len: usize) -> Vec<u8> {
    let mut s = Sponge::new();
    s.absorb(&(domain.len() as u64).to_le_bytes());
    s.absorb(domain);
    for p in parts {
        s.absorb(&(p.len() as u64).to_le_bytes());
        s.absorb(p);
    }
    s.squeeze(out_len)
}
