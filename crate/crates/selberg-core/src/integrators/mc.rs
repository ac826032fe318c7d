//! Deterministic parallel Monte Carlo.
//!
//! Both samplers split the sample budget into fixed-size chunks, derive an
//! independent ChaCha stream per chunk from the master seed, map chunks in
//! parallel, and fold the per-chunk statistics in index order. Results are
//! therefore bit-identical for a given seed and sample count no matter how
//! the thread pool schedules the work.
//!
//! The p-adic sampler draws each coordinate's valuation from a two-sided
//! geometric law and fills in uniformly random digits. Importance rates
//! must be matched to the integrand by the caller: a coordinate whose
//! absolute value enters with exponent `t <= -1/2` has a square-integrable
//! weight only when the inner rate cancels the singularity, which is why
//! integrands get sampled in coordinates that straighten their singular
//! hyperplanes rather than in raw coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::fields::padic::p_power_rational;
use crate::integrators::cells::PadicIntegrand;
use crate::integrators::estimate::IntegralEstimate;
use crate::{C64, Result};

const CHUNK: u64 = 8192;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(master: u64, chunk: u64) -> ChaCha8Rng {
    let mut state = master ^ chunk.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut seed = [0u8; 32];
    for word in 0..4 {
        seed[word * 8..(word + 1) * 8].copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

#[derive(Clone, Copy, Default)]
struct ChunkStat {
    sum: C64,
    sum2: f64,
    max2: f64,
    aborted: u64,
}

impl ChunkStat {
    fn absorb(&mut self, w: C64) {
        let n2 = w.norm_sqr();
        self.sum += w;
        self.sum2 += n2;
        self.max2 = self.max2.max(n2);
    }
}

fn fold_chunks(
    stats: Vec<ChunkStat>,
    samples: u64,
    scale: f64,
) -> IntegralEstimate {
    let mut total = ChunkStat::default();
    for s in &stats {
        total.sum += s.sum;
        total.sum2 += s.sum2;
        total.max2 = total.max2.max(s.max2);
        total.aborted += s.aborted;
    }
    let n = samples as f64;
    let mean = total.sum / n;
    let var = (total.sum2 / n - mean.norm_sqr()).max(0.0);
    let mut est = IntegralEstimate::exact(mean * scale);
    est.mc_sigma = (var / n).sqrt() * scale;
    est.samples = samples;
    est.aborted = total.aborted;
    est.strata = stats.len() as u64;
    if total.max2 > 0.05 * total.sum2 && total.sum2 > 0.0 {
        est.notes.push(format!(
            "heavy-tailed weights: one sample carries {:.1}% of the second moment",
            100.0 * total.max2 / total.sum2
        ));
    }
    if total.aborted > 0 {
        est.notes
            .push(format!("{} samples aborted on exact singularities", total.aborted));
    }
    est
}

/// Two-sided geometric valuation law for one sampled coordinate.
///
/// With probability `inner_mass` the valuation is `v >= 0` distributed as
/// `(1 - q_in) q_in^v`, `q_in = p^{-inner_rate}`; otherwise `v <= -1` as
/// `(1 - q_out) q_out^{-1-v}`, `q_out = p^{-outer_rate}`. Matching
/// `inner_rate` to the exponent of the coordinate's singularity at zero
/// makes that factor's weight exactly constant over inner shells; the
/// outer rate should sit inside the integrand's convergence margin.
#[derive(Debug, Clone, Copy)]
pub struct PadicCoordDensity {
    pub inner_rate: f64,
    pub outer_rate: f64,
    pub inner_mass: f64,
}

impl PadicCoordDensity {
    pub fn balanced(inner_rate: f64, outer_rate: f64) -> Result<Self> {
        let d = PadicCoordDensity {
            inner_rate,
            outer_rate,
            inner_mass: 0.5,
        };
        if !(inner_rate > 0.0) || !(outer_rate > 0.0) {
            return Err(Error::config(
                "valuation rates must be positive for a normalizable law",
            ));
        }
        Ok(d)
    }

    fn sample_valuation(&self, p: u64, rng: &mut ChaCha8Rng) -> Option<i64> {
        let side = rng.random::<f64>();
        let u = rng.random::<f64>();
        let (rate, inner) = if side < self.inner_mass {
            (self.inner_rate, true)
        } else {
            (self.outer_rate, false)
        };
        let q = (p as f64).powf(-rate);
        let g = ((1.0 - u).ln() / q.ln()).floor();
        if !g.is_finite() || g > 1.0e6 {
            return None;
        }
        let g = g as i64;
        Some(if inner { g } else { -1 - g })
    }

    /// Probability of the sampled valuation divided by the Haar mass
    /// `p^{-v} (1 - 1/p)` of the shell, inverted: the importance weight.
    fn shell_weight(&self, p: u64, v: i64) -> f64 {
        let pf = p as f64;
        let mass = pf.powf(-(v as f64)) * (1.0 - 1.0 / pf);
        let prob = if v >= 0 {
            let q = pf.powf(-self.inner_rate);
            self.inner_mass * (1.0 - q) * q.powf(v as f64)
        } else {
            let q = pf.powf(-self.outer_rate);
            (1.0 - self.inner_mass) * (1.0 - q) * q.powf((-1 - v) as f64)
        };
        mass / prob
    }
}

/// How to draw p-adic samples: one valuation law per sampled coordinate,
/// an optional unimodular map from sampled coordinates to the integrand's
/// coordinates (Jacobian of absolute value one, caller's responsibility),
/// and the digit precision of each sample.
pub struct PadicMcSpec {
    pub densities: Vec<PadicCoordDensity>,
    pub to_y: Option<Box<dyn Fn(&[BigRational]) -> Vec<BigRational> + Send + Sync>>,
    pub digits: u32,
}

impl PadicMcSpec {
    pub fn new(densities: Vec<PadicCoordDensity>) -> Self {
        PadicMcSpec {
            densities,
            to_y: None,
            digits: 40,
        }
    }

    pub fn with_map(
        mut self,
        to_y: impl Fn(&[BigRational]) -> Vec<BigRational> + Send + Sync + 'static,
    ) -> Self {
        self.to_y = Some(Box::new(to_y));
        self
    }
}

fn sample_unit(p: u64, digits: u32, rng: &mut ChaCha8Rng) -> BigInt {
    let mut unit = BigInt::from(rng.random_range(1..p));
    let mut power = BigInt::from(p);
    for _ in 1..digits {
        unit += BigInt::from(rng.random_range(0..p)) * &power;
        power *= p;
    }
    unit
}

/// Importance-sampled estimate of the integrand over the whole coefficient
/// space. The result carries `mc_sigma`, not a certified bound.
pub fn padic_mc_integrate(
    integrand: &PadicIntegrand,
    spec: &PadicMcSpec,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate> {
    if spec.densities.len() != integrand.dim() {
        return Err(Error::config(format!(
            "{} coordinate laws for a dimension {} integrand",
            spec.densities.len(),
            integrand.dim()
        )));
    }
    if samples == 0 {
        return Err(Error::config("sample count must be positive"));
    }
    let p = integrand.p();
    let chunks = samples.div_ceil(CHUNK);
    let stats: Vec<ChunkStat> = (0..chunks)
        .into_par_iter()
        .map(|ci| -> Result<ChunkStat> {
            let mut rng = chunk_rng(seed, ci);
            let todo = CHUNK.min(samples - ci * CHUNK);
            let mut stat = ChunkStat::default();
            for _ in 0..todo {
                let mut u = Vec::with_capacity(spec.densities.len());
                let mut weight = 1.0f64;
                let mut ok = true;
                for law in &spec.densities {
                    match law.sample_valuation(p, &mut rng) {
                        Some(v) => {
                            let unit = sample_unit(p, spec.digits, &mut rng);
                            u.push(
                                BigRational::from_integer(unit) * p_power_rational(p, v),
                            );
                            weight *= law.shell_weight(p, v);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    stat.aborted += 1;
                    continue;
                }
                let y = match &spec.to_y {
                    Some(map) => map(&u),
                    None => u,
                };
                match integrand.eval_point(&y) {
                    Ok(v) => stat.absorb(v * weight),
                    Err(Error::Singular { .. }) | Err(Error::PrecisionExhausted { .. }) => {
                        stat.aborted += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(stat)
        })
        .collect::<Result<_>>()?;
    Ok(fold_chunks(stats, samples, 1.0))
}

/// Mixture importance density for one complex coordinate: power bumps at
/// 0 and 1 matched to the integrand's local exponents plus a polynomially
/// heavy tail matched to its decay.
#[derive(Debug, Clone, Copy)]
pub struct ComplexMcSpec {
    /// Exponent `a` of the `|z|^{2a-2}` singularity at the origin.
    pub sing0: f64,
    /// Exponent `b` of the `|1-z|^{2b-2}` singularity at one.
    pub sing1: f64,
    /// Tail exponent `t` of the `(1+|z|^2)^{-t}` component; pick
    /// `t = 2 - a - b - 2(n-1)c` so the weight stays bounded at infinity.
    pub tail_exp: f64,
    pub bump0: f64,
    pub bump1: f64,
}

impl ComplexMcSpec {
    pub fn new(sing0: f64, sing1: f64, tail_exp: f64) -> Result<Self> {
        if !(sing0 > 0.0) || !(sing1 > 0.0) {
            return Err(Error::region(
                "singularity exponents must be positive for a normalizable bump",
            ));
        }
        if !(tail_exp > 1.0) {
            return Err(Error::region(
                "tail exponent must exceed 1 for a normalizable density",
            ));
        }
        Ok(ComplexMcSpec {
            sing0,
            sing1,
            tail_exp,
            bump0: 0.25,
            bump1: 0.25,
        })
    }

    fn density(&self, z: C64) -> f64 {
        use std::f64::consts::PI;
        let tail_mass = 1.0 - self.bump0 - self.bump1;
        let n0 = z.norm_sqr();
        let n1 = (z - 1.0).norm_sqr();
        let mut q = tail_mass * (self.tail_exp - 1.0) / PI * (1.0 + n0).powf(-self.tail_exp);
        if n0 < 1.0 {
            q += self.bump0 * self.sing0 / PI * n0.powf(self.sing0 - 1.0);
        }
        if n1 < 1.0 {
            q += self.bump1 * self.sing1 / PI * n1.powf(self.sing1 - 1.0);
        }
        q
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> C64 {
        use std::f64::consts::TAU;
        let branch = rng.random::<f64>();
        let u = rng.random::<f64>();
        let angle = TAU * rng.random::<f64>();
        let dir = C64::new(angle.cos(), angle.sin());
        if branch < self.bump0 {
            dir * u.powf(0.5 / self.sing0)
        } else if branch < self.bump0 + self.bump1 {
            dir * u.powf(0.5 / self.sing1) + 1.0
        } else {
            dir * ((1.0 - u).powf(-1.0 / (self.tail_exp - 1.0)) - 1.0).max(0.0).sqrt()
        }
    }
}

/// Estimate `int f(z) prod dz_i` over `C^dim` where each `dz_i` is twice
/// Lebesgue measure, the normalization under which the complex gamma
/// factors are unitary.
pub fn complex_mc_integrate(
    f: &(dyn Fn(&[C64]) -> C64 + Sync),
    dim: usize,
    spec: &ComplexMcSpec,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate> {
    if dim == 0 || samples == 0 {
        return Err(Error::config("need a positive dimension and sample count"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let stats: Vec<ChunkStat> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = chunk_rng(seed, ci);
            let todo = CHUNK.min(samples - ci * CHUNK);
            let mut stat = ChunkStat::default();
            let mut z = vec![C64::new(0.0, 0.0); dim];
            for _ in 0..todo {
                let mut q = 1.0f64;
                for zi in z.iter_mut() {
                    *zi = spec.sample(&mut rng);
                    q *= spec.density(*zi);
                }
                let w = f(&z) / q;
                if w.re.is_finite() && w.im.is_finite() {
                    stat.absorb(w);
                } else {
                    stat.aborted += 1;
                }
            }
            stat
        })
        .collect();
    Ok(fold_chunks(stats, samples, (2.0f64).powi(dim as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::gamma_complex;
    use crate::fields::complex_norm;
    use crate::integrators::cells::{padic_full_integrate, EngineConfig};
    use crate::integrators::factors::{AffineFactor, DiscriminantFactor};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// Monic quadratic coefficient-space integrand with straightened
    /// singular hyperplanes: `u = (f(0), f(1))`, `y = (b_0, b_1)`.
    fn quadratic_integrand(p: u64, a: f64, b: f64, cc: f64) -> (PadicIntegrand, PadicMcSpec) {
        let mut ig = PadicIntegrand::new(p, 2);
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1), rat(0, 1)], c(a - 1.0)).unwrap(),
        ));
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(1, 1), rat(1, 1), rat(1, 1)], c(b - 1.0)).unwrap(),
        ));
        ig.push(Box::new(DiscriminantFactor::new(p, 2, c(cc), 2).unwrap()));
        let spec = PadicMcSpec::new(vec![
            PadicCoordDensity::balanced(a, 1.0 - a - 2.0 * cc).unwrap(),
            PadicCoordDensity::balanced(b, 1.0 - b - 2.0 * cc).unwrap(),
        ])
        .with_map(|u: &[BigRational]| {
            let b0 = u[0].clone();
            let b1 = &u[1] - &u[0] - BigRational::from_integer(1.into());
            vec![b0, b1]
        });
        (ig, spec)
    }

    #[test]
    fn padic_sampler_is_deterministic() {
        let (ig, spec) = quadratic_integrand(5, 0.3, 0.25, 0.15);
        let e1 = padic_mc_integrate(&ig, &spec, 4096, 17).unwrap();
        let e2 = padic_mc_integrate(&ig, &spec, 4096, 17).unwrap();
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.mc_sigma, e2.mc_sigma);
        let e3 = padic_mc_integrate(&ig, &spec, 4096, 18).unwrap();
        assert_ne!(e1.value, e3.value);
    }

    #[test]
    fn padic_sampler_agrees_with_the_certified_engine() {
        let (ig, spec) = quadratic_integrand(5, 0.3, 0.25, 0.15);
        let exact = padic_full_integrate(&ig, &EngineConfig::default()).unwrap();
        let mc = padic_mc_integrate(&ig, &spec, 120_000, 20260815).unwrap();
        let dist = (mc.value - exact.value).norm();
        assert!(
            dist < 4.0 * mc.mc_sigma + exact.certified_bound() + 1e-9,
            "mc {} vs certified {} is {:.2} sigma apart",
            mc.value,
            exact.value,
            dist / mc.mc_sigma
        );
        // The affine hyperplanes are straightened by the importance map but
        // the discriminant parabola is not, so the estimator keeps a heavy
        // tail; ten-percent-level sigma is what this budget buys.
        assert!(
            mc.mc_sigma < 0.12 * exact.value.norm(),
            "sampler variance regressed: sigma {} vs value {}",
            mc.mc_sigma,
            exact.value.norm()
        );
    }

    #[test]
    fn padic_weights_need_positive_rates() {
        assert!(PadicCoordDensity::balanced(0.0, 0.5).is_err());
    }

    #[test]
    fn complex_sampler_recovers_the_disk_area() {
        // Twice-Lebesgue measure of the unit disk is 2 pi.
        let spec = ComplexMcSpec::new(0.5, 0.5, 1.5).unwrap();
        let f = |z: &[C64]| {
            if complex_norm(z[0]) < 1.0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        };
        let est = complex_mc_integrate(&f, 1, &spec, 200_000, 7).unwrap();
        let expect = 2.0 * std::f64::consts::PI;
        assert!(
            (est.value.re - expect).abs() < 4.0 * est.mc_sigma,
            "disk mass {} vs {}",
            est.value.re,
            expect
        );
    }

    #[test]
    fn complex_sampler_hits_the_beta_value() {
        let (a, b) = (0.3, 0.25);
        let spec = ComplexMcSpec::new(a, b, 2.0 - a - b).unwrap();
        let f = move |z: &[C64]| {
            let n0 = complex_norm(z[0]);
            let n1 = complex_norm(z[0] - C64::new(1.0, 0.0));
            C64::new(n0.powf(a - 1.0) * n1.powf(b - 1.0), 0.0)
        };
        let est = complex_mc_integrate(&f, 1, &spec, 400_000, 42).unwrap();
        let expect = gamma_complex(c(a)).unwrap() * gamma_complex(c(b)).unwrap()
            / gamma_complex(c(a + b)).unwrap();
        assert!(
            (est.value - expect).norm() < 4.0 * est.mc_sigma,
            "beta {} vs gamma quotient {}",
            est.value,
            expect
        );
        assert!(est.mc_sigma < 0.05 * expect.norm());
    }

    #[test]
    fn complex_sampler_is_deterministic() {
        let spec = ComplexMcSpec::new(0.4, 0.4, 1.4).unwrap();
        let f = |z: &[C64]| {
            let w: f64 = z
                .iter()
                .map(|zi| (1.0 + complex_norm(*zi)).powf(-1.4))
                .product();
            C64::new(w, 0.0)
        };
        let e1 = complex_mc_integrate(&f, 2, &spec, 20_000, 5).unwrap();
        let e2 = complex_mc_integrate(&f, 2, &spec, 20_000, 5).unwrap();
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.mc_sigma, e2.mc_sigma);
    }
}
