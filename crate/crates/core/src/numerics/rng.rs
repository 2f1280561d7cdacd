use super::NumericsError;

/// SplitMix64 finalizer. Used to turn arbitrary (possibly correlated) seeds
/// into well-mixed 64-bit states.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a role/index pair into an independent child seed.
pub fn derive_seed(seed: u64, role: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ role.wrapping_mul(0xD6E8_FEB8_6659_FD93)) ^ index)
}

/// Seedable xorshift64* generator.
///
/// State update is `x ^= x >> 12; x ^= x << 25; x ^= x >> 27`, output is
/// `x * 0x2545F4914F6CDD1D`. The seed is passed through SplitMix64 first so
/// that nearby seeds (`seed`, `seed + 1`, ...) give unrelated streams and a
/// zero state cannot occur.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    state: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        let mut state = splitmix64(seed);
        if state == 0 {
            state = 0x9E37_79B9_7F4A_7C15;
        }
        Self { seed, state }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform01()
    }

    /// Unbiased integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        // Rejection on the top of the range removes modulo bias.
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let r = self.next_u64();
            if r < zone {
                return (r % n) as usize;
            }
        }
    }

    /// Standard normal draw (Box–Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `n` i.i.d. draws from `[0, n)`.
    pub fn bootstrap_indices(&mut self, n: usize) -> Result<Vec<usize>, NumericsError> {
        if n == 0 {
            return Err(NumericsError::EmptyRange);
        }
        Ok((0..n).map(|_| self.below(n)).collect())
    }

    /// `k` distinct indices from `[0, n)`, returned in ascending order.
    pub fn sample_without_replacement(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool.sort_unstable();
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_of_single_element() {
        let mut rng = RandomSource::new(1);
        let mut v = vec![42];
        rng.shuffle(&mut v);
        assert_eq!(v, vec![42]);
    }

    #[test]
    fn same_seed_same_permutation() {
        let perm = |seed| {
            let mut rng = RandomSource::new(seed);
            let mut v: Vec<usize> = (0..100).collect();
            rng.shuffle(&mut v);
            v
        };
        let a = perm(5);
        assert_eq!(a, perm(5));
        assert_ne!(a, perm(6));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn uniform_mean_is_near_half() {
        let mut rng = RandomSource::new(2024);
        let n = 100_000;
        let mean = (0..n).map(|_| rng.uniform01()).sum::<f64>() / n as f64;
        assert!((0.49..=0.51).contains(&mean), "mean {mean}");
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = RandomSource::new(0);
        assert!((0..10_000).map(|_| rng.uniform01()).all(|u| (0.0..1.0).contains(&u)));
    }

    #[test]
    fn bootstrap_rejects_empty_range() {
        let mut rng = RandomSource::new(1);
        assert!(matches!(
            rng.bootstrap_indices(0),
            Err(NumericsError::EmptyRange)
        ));
        let draws = rng.bootstrap_indices(50).unwrap();
        assert_eq!(draws.len(), 50);
        assert!(draws.iter().all(|&d| d < 50));
    }

    #[test]
    fn bootstrap_covers_range_roughly_uniformly() {
        let mut rng = RandomSource::new(77);
        let mut counts = [0usize; 10];
        for _ in 0..2_000 {
            for d in rng.bootstrap_indices(10).unwrap() {
                counts[d] += 1;
            }
        }
        // 20,000 draws, expected 2,000 per bucket.
        assert!(counts.iter().all(|&c| (1_800..=2_200).contains(&c)), "{counts:?}");
    }

    #[test]
    fn sample_without_replacement_is_distinct_and_sorted() {
        let mut rng = RandomSource::new(4);
        let s = rng.sample_without_replacement(20, 7);
        assert_eq!(s.len(), 7);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rng.sample_without_replacement(3, 10), vec![0, 1, 2]);
    }

    #[test]
    fn normal_draws_have_unit_variance() {
        let mut rng = RandomSource::new(8);
        let n = 50_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.02);
        assert!((var - 1.0).abs() < 0.03);
    }
}
