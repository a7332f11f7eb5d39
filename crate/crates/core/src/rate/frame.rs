use std::collections::BTreeMap;

use super::{ModulationParams, RateError};
use crate::rng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Key,
    Punctured,
    Shortened,
}

/// Length-`n` word laid out over the mother code: key bits in the
/// non-reserved positions, random filler in the reserved ones.
///
/// Roles only ever move from `Punctured` to `Shortened`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    roles: Vec<Role>,
    values: Vec<u8>,
}

/// Uniformly chosen reserved positions, returned in ascending order.
pub fn select_reserved_positions(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let pool: Vec<usize> = (0..n).collect();
    let mut picked = Prng::from_seed(seed).sample(&pool, count);
    picked.sort_unstable();
    picked
}

/// Complement of `reserved` in `0..n`, ascending. Key bit `i` lives at the
/// `i`-th entry.
pub fn key_positions(n: usize, reserved: &[usize]) -> Vec<usize> {
    let mut is_reserved = vec![false; n];
    for &r in reserved {
        is_reserved[r] = true;
    }
    (0..n).filter(|&i| !is_reserved[i]).collect()
}

impl Frame {
    /// Places `key` in the non-reserved positions in ascending order and
    /// `punctured_values[i]` at `reserved[i]`, all reserved symbols starting
    /// out punctured.
    pub fn assemble(
        params: &ModulationParams,
        key: &[u8],
        reserved: &[usize],
        punctured_values: &[u8],
    ) -> Result<Self, RateError> {
        let n = params.n();
        if reserved.len() != params.reserved() {
            return Err(RateError::Frame(format!(
                "expected {} reserved positions, got {}",
                params.reserved(),
                reserved.len()
            )));
        }
        if punctured_values.len() != reserved.len() {
            return Err(RateError::Frame(format!(
                "{} filler values for {} reserved positions",
                punctured_values.len(),
                reserved.len()
            )));
        }
        if key.len() != params.key_length() {
            return Err(RateError::Frame(format!(
                "key length {} differs from {}",
                key.len(),
                params.key_length()
            )));
        }
        let mut roles = vec![Role::Key; n];
        let mut values = vec![0u8; n];
        for (&pos, &v) in reserved.iter().zip(punctured_values) {
            if pos >= n {
                return Err(RateError::Frame(format!("position {pos} out of range")));
            }
            if roles[pos] != Role::Key {
                return Err(RateError::Frame(format!("position {pos} listed twice")));
            }
            roles[pos] = Role::Punctured;
            values[pos] = v & 1;
        }
        let slots = roles.iter().enumerate().filter(|(_, r)| **r == Role::Key);
        for ((pos, _), &bit) in slots.zip(key) {
            values[pos] = bit & 1;
        }
        Ok(Frame { roles, values })
    }

    /// Like [`Frame::assemble`] with filler values drawn from `rng`.
    pub fn assemble_random(
        params: &ModulationParams,
        key: &[u8],
        reserved: &[usize],
        rng: &mut Prng,
    ) -> Result<Self, RateError> {
        let filler = rng.bits(reserved.len());
        Self::assemble(params, key, reserved, &filler)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn key(&self) -> Vec<u8> {
        self.collect_role(Role::Key).map(|i| self.values[i]).collect()
    }

    pub fn punctured_positions(&self) -> Vec<usize> {
        self.collect_role(Role::Punctured).collect()
    }

    pub fn count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    fn collect_role(&self, role: Role) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(move |(_, &r)| r == role)
            .map(|(i, _)| i)
    }

    /// Turns `count` uniformly chosen punctured symbols into shortened ones
    /// and returns their positions and values.
    pub fn convert_to_shortened(
        &mut self,
        count: usize,
        rng: &mut Prng,
    ) -> Result<BTreeMap<usize, u8>, RateError> {
        let punctured = self.punctured_positions();
        if count > punctured.len() {
            return Err(RateError::Frame(format!(
                "cannot shorten {count} of {} punctured symbols",
                punctured.len()
            )));
        }
        let chosen = rng.sample(&punctured, count);
        let mut reveal = BTreeMap::new();
        for pos in chosen {
            self.roles[pos] = Role::Shortened;
            reveal.insert(pos, self.values[pos]);
        }
        Ok(reveal)
    }
}
