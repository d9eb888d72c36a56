use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for. Each purpose gets its own ChaCha
/// stream so that draws for one entity never shift draws for another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    CuePositions,
    /// Shadowing of every CUE-to-BS link.
    CueShadowing,
    /// Transmitter and receiver placement of one D2D link.
    LinkGeometry(usize),
    /// Shadowing of every path ending at, or starting from, one D2D link.
    LinkShadowing(usize),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::CuePositions => 1,
            Stream::CueShadowing => 2,
            Stream::LinkGeometry(i) => (1 << 32) | i as u64,
            Stream::LinkShadowing(i) => (2 << 32) | i as u64,
        }
    }
}

/// The random source of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    seed: u64,
}

impl SeedStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Seed of trial `trial` under the base seed `base`.
    pub fn for_trial(base: u64, trial: u64) -> Self {
        Self::new(splitmix64(
            base ^ splitmix64(trial.wrapping_add(0x5851_F42D_4C95_7F2D)),
        ))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream.id());
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
