use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purposes keep the false-alarm, delay and trajectory streams of one
/// master seed independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Purpose {
    FalseAlarm = 1,
    Delay = 2,
    Trajectory = 3,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for one trial: a ChaCha8 key from `(master, purpose)` and the
/// trial index as stream number, so trials never share randomness and the
/// result does not depend on scheduling.
pub(crate) fn trial_rng(master: u64, purpose: Purpose, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(master ^ splitmix(purpose as u64)));
    rng.set_stream(trial);
    rng
}
