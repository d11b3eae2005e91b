// SPDX-License-Identifier: Apache-2.0

//! Assignments to Boolean variables, and witness-selection policies.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A (partial) assignment of Boolean variables by index.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BoolEnv {
    bits: Vec<Option<bool>>,
}

impl BoolEnv {
    pub fn new() -> Self {
        BoolEnv::default()
    }

    /// Variables `0..n` assigned from the low bits of `mask`.
    pub fn from_mask(mask: u64, n: u32) -> Self {
        let mut env = BoolEnv::new();
        for i in 0..n {
            env.set(i, (mask >> i) & 1 == 1);
        }
        env
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, bool)>>(pairs: I) -> Self {
        let mut env = BoolEnv::new();
        for (i, b) in pairs {
            env.set(i, b);
        }
        env
    }

    pub fn set(&mut self, var: u32, value: bool) {
        let i = var as usize;
        if i >= self.bits.len() {
            self.bits.resize(i + 1, None);
        }
        self.bits[i] = Some(value);
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.bits.get(var as usize).copied().flatten()
    }

    pub fn is_assigned(&self, var: u32) -> bool {
        self.get(var).is_some()
    }

    /// Assigned variables in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| (i as u32, b)))
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Debug for BoolEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// How free variables are chosen when extracting a satisfying assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Policy {
    /// Prefer `false` wherever possible.
    Zeros,
    /// Prefer `true` wherever possible.
    Ones,
    /// Seeded random preferences.
    Random(u64),
}

impl Policy {
    pub fn chooser(self) -> PolicyChooser {
        PolicyChooser {
            policy: self,
            rng: match self {
                Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
                _ => None,
            },
        }
    }

    pub fn name(self) -> String {
        match self {
            Policy::Zeros => "zeros".into(),
            Policy::Ones => "ones".into(),
            Policy::Random(seed) => format!("random({seed})"),
        }
    }
}

/// Stream of preferred values for successive variables under a policy.
pub struct PolicyChooser {
    policy: Policy,
    rng: Option<ChaCha8Rng>,
}

impl PolicyChooser {
    pub fn next_pref(&mut self) -> bool {
        match self.policy {
            Policy::Zeros => false,
            Policy::Ones => true,
            Policy::Random(_) => self.rng.as_mut().expect("seeded").gen(),
        }
    }
}
