//! Small shared plumbing: rational numbers, compact id sets, deterministic
//! seed derivation and a least-squares helper for the scaling checks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All conductance arithmetic is exact. Class-averaged conductance divides by
/// `2^class`, and classes can reach 62 for the largest admissible latencies,
/// so numerators and denominators need 128-bit headroom. (`Ratio`'s ordering
/// uses a Euclid-style comparison and never overflows on its own.)
pub type Rational = num_rational::Ratio<i128>;

pub fn rational(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// splitmix64 step; used to derive independent seeds from (seed, salt) pairs
/// so that per-node and per-trial randomness never aliases.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    mix64(seed ^ mix64(salt))
}

/// Deterministic RNG for a (seed, salt) pair. ChaCha keeps streams identical
/// across platforms.
pub fn seeded_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, salt))
}

/// Fixed-universe bitset over node (or edge) ids. Rumor bags get unioned on
/// every delivery, so this wants to be a few words, not a hash set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdSet {
    words: Vec<u64>,
    universe: usize,
}

impl IdSet {
    pub fn new(universe: usize) -> Self {
        IdSet { words: vec![0; universe.div_ceil(64)], universe }
    }

    pub fn singleton(universe: usize, id: usize) -> Self {
        let mut s = Self::new(universe);
        s.insert(id);
        s
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::new(universe);
        for id in 0..universe {
            s.insert(id);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, id: usize) {
        debug_assert!(id < self.universe);
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn contains(&self, id: usize) -> bool {
        debug_assert!(id < self.universe);
        self.words[id / 64] >> (id % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &IdSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_superset(&self, other: &IdSet) -> bool {
        self.words.iter().zip(&other.words).all(|(w, o)| w & o == *o)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(|&i| self.contains(i))
    }
}

/// Ordinary least squares `y ~ a*x + b`, returning `(a, b, r_squared)`.
/// The scaling acceptance checks fit mean round counts against a predictor.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - (a * x + b)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (a, b, r2)
}

pub fn median(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[values.len() / 2]
}
