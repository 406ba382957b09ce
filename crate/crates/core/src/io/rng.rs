/// Seeded xorshift64* generator used by the arena generators.
///
/// The stream is part of the generator's output contract, so it is defined
/// here rather than borrowed from a crate whose algorithm may change:
///
/// * seeding: `state = mix(seed)` where `mix` is the SplitMix64 finalizer
///   applied to `seed + 0x9E3779B97F4A7C15`; a zero state is replaced by
///   `0x9E3779B97F4A7C15`.
/// * step: `x ^= x >> 12; x ^= x << 25; x ^= x >> 27`, output
///   `x * 0x2545F4914F6CDD1D` (wrapping).
#[derive(Clone, Debug)]
pub struct XorShift64Star {
    state: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(GOLDEN);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        XorShift64Star {
            state: if z == 0 { GOLDEN } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, span)` by multiply-high; `span` must be nonzero.
    pub fn below(&mut self, span: u64) -> u64 {
        debug_assert!(span > 0);
        ((self.next_u64() as u128 * span as u128) >> 64) as u64
    }

    /// Uniform in `[lo, hi]`.
    pub fn in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return self.next_u64() as i64;
        }
        (lo as i128 + self.below(span as u64) as i128) as i64
    }

    /// `true` with probability `p`: the top 53 bits compared against
    /// `floor(p · 2^53)`.
    pub fn chance(&mut self, p: f64) -> bool {
        let threshold = (p.clamp(0.0, 1.0) * (1u64 << 53) as f64) as u64;
        (self.next_u64() >> 11) < threshold
    }
}
