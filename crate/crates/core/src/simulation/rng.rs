use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier recorded in reports so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str =
    "chacha8 (rand_chacha 0.9, seed_from_u64(seed), stream = replicate index)";

/// The generator for replicate `rep` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}
