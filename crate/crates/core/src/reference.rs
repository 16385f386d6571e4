//! Built-in catalogue of fitted wave parameters for eight national
//! epidemic case series, and synthesis of the corresponding cumulative /
//! daily probability curves.
//!
//! Each catalogue entry lists, per wave, the logistic coefficients
//! `(A, B, C)` and the observed peak day `T`. Synthetic series are built
//! by choosing each wave's time shift so that its daily peak lands
//! exactly on `T` (`Δt = ln B / C − T`) and summing the waves on integer
//! days, optionally with seeded multiplicative noise — useful as a
//! self-contained regression fixture for the whole fit pipeline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logistic::LogisticWave;

/// One wave of a catalogue entry.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceWave {
    /// Plateau height `A` (fraction of the population).
    pub a: f64,
    /// Offset coefficient `B`.
    pub b: f64,
    /// Growth rate `C` (per day).
    pub c: f64,
    /// Observed day of the wave's daily peak.
    pub peak_day: f64,
}

/// One country of the catalogue.
#[derive(Debug, Clone)]
pub struct ReferenceCountry {
    pub name: &'static str,
    pub population: u64,
    pub waves: Vec<ReferenceWave>,
}

impl ReferenceCountry {
    /// The catalogue waves as evaluable logistic curves, with each time
    /// shift placing the daily peak on the recorded day and no baseline.
    pub fn waves(&self) -> Vec<LogisticWave> {
        self.waves
            .iter()
            .map(|w| LogisticWave {
                a: w.a,
                b: w.b,
                c: w.c,
                t_shift: w.b.ln() / w.c - w.peak_day,
                d: 0.0,
            })
            .collect()
    }

    /// Number of days covered by the synthesized series: the last peak
    /// plus four e-folding times of its wave, so every wave has largely
    /// saturated.
    pub fn horizon(&self) -> usize {
        self.waves
            .iter()
            .map(|w| (w.peak_day + 4.0 / w.c).ceil() as usize)
            .max()
            .unwrap_or(0)
            + 1
    }

    /// Noise-free daily probability density on integer days.
    pub fn density(&self) -> Vec<f64> {
        let waves = self.waves();
        (0..self.horizon())
            .map(|t| waves.iter().map(|w| w.eval_daily(t as f64)).sum())
            .collect()
    }

    /// Daily density with seeded multiplicative Gaussian noise
    /// (each sample scaled by `max(0, N(1, sigma))`).
    pub fn noisy_density(&self, seed: u64, sigma: f64) -> Result<Vec<f64>> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be non-negative, got {sigma}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self
            .density()
            .into_iter()
            .map(|v| v * (1.0 + sigma * standard_normal(&mut rng)).max(0.0))
            .collect())
    }

    /// `(peak time, peak height)` of each catalogue wave.
    pub fn peaks(&self) -> Vec<(f64, f64)> {
        self.waves
            .iter()
            .map(|w| (w.peak_day, w.a * w.c / 4.0))
            .collect()
    }
}

/// Standard normal deviate via the Box–Muller transform (keeps the
/// dependency footprint to the plain RNG crates).
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Cumulative curve as the running sum of a daily density.
pub fn cumulative_from_density(density: &[f64]) -> Vec<f64> {
    let mut total = 0.0;
    density
        .iter()
        .map(|v| {
            total += v;
            total
        })
        .collect()
}

/// The full eight-country catalogue, in a fixed order.
pub fn catalogue() -> Vec<ReferenceCountry> {
    fn w(a: f64, b: f64, c: f64, peak_day: f64) -> ReferenceWave {
        ReferenceWave { a, b, c, peak_day }
    }
    vec![
        ReferenceCountry {
            name: "USA",
            population: 331_002_651,
            waves: vec![
                w(5.054e-3, 3.296e3, 0.086, 86.0),
                w(0.015, 28.948, 0.054, 176.0),
                w(0.08, 22.432, 0.032, 316.0),
            ],
        },
        ReferenceCountry {
            name: "Canada",
            population: 37_742_154,
            waves: vec![
                w(2.89e-3, 82.91, 0.064, 69.0),
                w(0.022, 138.206, 0.034, 302.0),
            ],
        },
        ReferenceCountry {
            name: "Russia",
            population: 145_934_462,
            waves: vec![
                w(6.443e-3, 84.426, 0.045, 98.0),
                w(0.024, 41.625, 0.033, 268.0),
            ],
        },
        ReferenceCountry {
            name: "UK",
            population: 67_886_011,
            waves: vec![
                w(4.307e-3, 13.884, 0.067, 49.0),
                w(0.024, 411.247, 0.062, 240.0),
                w(0.038, 30.289, 0.086, 308.0),
            ],
        },
        ReferenceCountry {
            name: "Belgium",
            population: 11_589_623,
            waves: vec![
                w(5.08e-3, 82.824, 0.105, 35.0),
                w(0.052, 6000.0, 0.065, 228.0),
            ],
        },
        ReferenceCountry {
            name: "Finland",
            population: 5_540_720,
            waves: vec![
                w(1.297e-3, 3186.664, 0.076, 97.0),
                w(7.336e-3, 313.688, 0.038, 320.0),
                w(0.01, 24.599, 0.048, 417.0),
            ],
        },
        ReferenceCountry {
            name: "Japan",
            population: 126_476_461,
            waves: vec![
                w(1.339e-4, 5.973e4, 0.119, 58.0),
                w(5.334e-4, 165.534, 0.074, 174.0),
                w(3.012e-3, 89.729, 0.048, 313.0),
            ],
        },
        ReferenceCountry {
            name: "Israel",
            population: 8_655_535,
            waves: vec![
                w(1.921e-3, 443.886, 0.142, 38.0),
                w(9.961e-3, 504.644, 0.086, 143.0),
                w(0.027, 45.026, 0.099, 203.0),
                w(0.061, 99.469, 0.059, 319.0),
            ],
        },
    ]
}

/// Look up a catalogue entry by name, case-insensitively.
pub fn find(name: &str) -> Option<ReferenceCountry> {
    catalogue()
        .into_iter()
        .find(|c| c.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::{fit_composite, segment_waves, FitConfig};
    use approx::assert_abs_diff_eq;

    #[test]
    fn catalogue_is_fixed_and_well_formed() {
        let cat = catalogue();
        assert_eq!(cat.len(), 8);
        let names: Vec<&str> = cat.iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "USA", "Canada", "Russia", "UK", "Belgium", "Finland", "Japan", "Israel"
            ]
        );
        for c in &cat {
            assert!(c.population > 1_000_000);
            for w in &c.waves {
                assert!(w.a > 0.0 && w.b > 0.0 && w.c > 0.0 && w.peak_day > 0.0);
            }
            // Waves are listed in chronological order.
            for pair in c.waves.windows(2) {
                assert!(pair[0].peak_day < pair[1].peak_day);
            }
        }
    }

    #[test]
    fn synthesized_waves_peak_on_the_recorded_days() {
        for country in catalogue() {
            for (wave, reference) in country.waves().iter().zip(&country.waves) {
                assert_abs_diff_eq!(wave.peak_time(), reference.peak_day, epsilon = 1e-9);
                assert_abs_diff_eq!(
                    wave.peak_height(),
                    reference.a * reference.c / 4.0,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn densities_are_positive_and_nearly_saturated_at_the_horizon() {
        for country in catalogue() {
            let density = country.density();
            assert_eq!(density.len(), country.horizon());
            assert!(density.iter().all(|&v| v >= 0.0 && v.is_finite()));
            let total: f64 = density.iter().sum();
            let plateau: f64 = country.waves.iter().map(|w| w.a).sum();
            // Everything but the tails of the last wave has accumulated.
            assert!(
                total > 0.93 * plateau && total < plateau,
                "{}: accumulated {total} of plateau {plateau}",
                country.name
            );
        }
    }

    #[test]
    fn noise_is_deterministic_per_seed_and_small_at_one_percent() {
        let country = find("israel").unwrap();
        let a = country.noisy_density(42, 0.01).unwrap();
        let b = country.noisy_density(42, 0.01).unwrap();
        let c = country.noisy_density(43, 0.01).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let clean = country.density();
        let max_rel = a
            .iter()
            .zip(&clean)
            .filter(|(_, &c)| c > 1e-9)
            .map(|(&n, &c)| (n / c - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(max_rel < 0.06, "max relative deviation {max_rel}");
        assert!(country.noisy_density(1, -0.5).is_err());
    }

    #[test]
    fn segmentation_recovers_every_catalogue_wave_count() {
        let cfg = FitConfig::default();
        for country in catalogue() {
            let clean = segment_waves(&country.density(), &cfg).unwrap();
            assert_eq!(
                clean.len(),
                country.waves.len(),
                "{}: clean segmentation found {:?}",
                country.name,
                clean
            );
            let noisy = country.noisy_density(42, 0.01).unwrap();
            let segs = segment_waves(&noisy, &cfg).unwrap();
            assert_eq!(
                segs.len(),
                country.waves.len(),
                "{}: noisy segmentation found {:?}",
                country.name,
                segs
            );
        }
    }

    #[test]
    fn full_fit_recovers_the_catalogue_peaks_from_noisy_data() {
        let cfg = FitConfig::default();
        for country in catalogue() {
            let noisy = country.noisy_density(42, 0.01).unwrap();
            let cumulative = cumulative_from_density(&noisy);
            let days: Vec<f64> = (0..cumulative.len()).map(|t| t as f64).collect();
            let fit = fit_composite(&days, &cumulative, &cfg).unwrap();
            assert_eq!(
                fit.waves.len(),
                country.waves.len(),
                "{}: wrong wave count",
                country.name
            );
            for (got, want) in fit.peaks().iter().zip(country.peaks()) {
                assert!(
                    (got.0 - want.0).abs() < 3.0,
                    "{}: peak time {} vs {}",
                    country.name,
                    got.0,
                    want.0
                );
                assert!(
                    (got.1 - want.1).abs() < 0.05 * want.1,
                    "{}: peak height {} vs {}",
                    country.name,
                    got.1,
                    want.1
                );
            }
        }
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert!(find("usa").is_some());
        assert!(find("Japan").is_some());
        assert!(find("atlantis").is_none());
    }
}
