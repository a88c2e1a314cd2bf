use rand::Rng;

use crate::popularity::ZipfCatalog;

/// Draws 0-based object indices by inverting the cumulative distribution.
#[derive(Debug, Clone)]
pub struct PopularitySampler<'a> {
    cumulative: &'a [f64],
}

impl<'a> PopularitySampler<'a> {
    pub fn new(catalog: &'a ZipfCatalog) -> Self {
        Self {
            cumulative: catalog.cumulative(),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empirical_frequencies_follow_probabilities() {
        let cat = ZipfCatalog::new(5, 1.0).unwrap();
        let sampler = PopularitySampler::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 200_000;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            counts[sampler.sample(&mut rng)] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let p = cat.probabilities()[i];
            let sd = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((c as f64 / draws as f64 - p).abs() < 5.0 * sd, "object {i}");
        }
    }

    #[test]
    fn single_object() {
        let cat = ZipfCatalog::new(1, 1.0).unwrap();
        let sampler = PopularitySampler::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..100).all(|_| sampler.sample(&mut rng) == 0));
    }
}
