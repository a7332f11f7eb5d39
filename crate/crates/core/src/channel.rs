//! Seeded binary symmetric channel.

use thiserror::Error;

use crate::rng::Prng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("crossover probability {0} outside [0, 0.5]")]
    Crossover(f64),
    #[error("sequence length must be at least 1")]
    EmptySequence,
}

/// Crossover probability and seed of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BscParams {
    crossover: f64,
    seed: u64,
}

impl BscParams {
    pub fn new(crossover: f64, seed: u64) -> Result<Self, ChannelError> {
        if !(0.0..=0.5).contains(&crossover) {
            return Err(ChannelError::Crossover(crossover));
        }
        Ok(BscParams { crossover, seed })
    }

    pub fn crossover(&self) -> f64 {
        self.crossover
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Flips each bit of `word` independently with the configured probability.
pub fn bsc_transmit(word: &[u8], params: &BscParams) -> Vec<u8> {
    let mut rng = Prng::from_seed(params.seed);
    flip_bits(word, params.crossover, &mut rng)
}

fn flip_bits(word: &[u8], crossover: f64, rng: &mut Prng) -> Vec<u8> {
    word.iter()
        .map(|&b| b ^ u8::from(rng.next_f64() < crossover))
        .collect()
}

/// Uniform `x` and its BSC image `y`, both drawn from one seeded stream.
pub fn generate_key_pair(
    length: usize,
    params: &BscParams,
) -> Result<(Vec<u8>, Vec<u8>), ChannelError> {
    if length == 0 {
        return Err(ChannelError::EmptySequence);
    }
    let mut rng = Prng::from_seed(params.seed);
    let x = rng.bits(length);
    let y = flip_bits(&x, params.crossover, &mut rng);
    Ok((x, y))
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
