//! Counter-based random draws: a pure function of `(seed, index)`.
//!
//! Every random quantity in the crate is produced by these draws, so any
//! result is reproducible from its seed alone, independent of evaluation
//! order or thread count. The mixer is the splitmix64 finalizer.

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// The `index`-th word of the stream keyed by `seed`.
#[inline]
pub fn draw_u64(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(1).wrapping_mul(GOLDEN) ^ mix(index.wrapping_mul(GOLDEN).wrapping_add(1)))
}

/// Uniform draw in `[0, 1)` with 53 significant bits.
#[inline]
pub fn draw_uniform(seed: u64, index: u64) -> f64 {
    (draw_u64(seed, index) >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform draw in `[lo, hi)`.
#[inline]
pub fn draw_uniform_in(seed: u64, index: u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * draw_uniform(seed, index)
}

/// Standard normal draw by Box–Muller; consumes the uniform pair at
/// `(2 * index, 2 * index + 1)` of a dedicated substream.
#[inline]
pub fn draw_standard_normal(seed: u64, index: u64) -> f64 {
    let u1 = draw_uniform(seed, 2 * index);
    let u2 = draw_uniform(seed, 2 * index + 1);
    let mag = (-2.0 * (1.0 - u1).ln()).sqrt();
    mag * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Derives an independent stream key, e.g. one per Monte Carlo path.
#[inline]
pub fn substream(seed: u64, id: u64) -> u64 {
    mix(seed ^ mix(id.wrapping_mul(GOLDEN).wrapping_add(0x517cc1b727220a95)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic() {
        assert_eq!(draw_u64(7, 0), draw_u64(7, 0));
        assert_ne!(draw_u64(7, 0), draw_u64(7, 1));
        assert_ne!(draw_u64(7, 0), draw_u64(8, 0));
    }

    #[test]
    fn uniform_moments() {
        let n = 100_000;
        let mean: f64 = (0..n).map(|i| draw_uniform(42, i)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "uniform mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|i| draw_standard_normal(3, i)).collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "normal mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "normal variance {var}");
    }
}
