//! Seeded simulation of the physical chain: turbulence, pointing jitter, the
//! IRS cascade and the fixed-gain relay.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::e2e::ModulationScheme;
use crate::fso::{Detection, FsoDerived};
use crate::rf::{NakagamiParams, ShadowedRicianParams};

/// Bits of the stream id reserved for the replicate index.
const REPLICATE_BITS: u32 = 24;

/// One counter-based ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Dedicated stream for one (sweep point, replicate) pair.
    pub fn for_point(seed: u64, point: usize, replicate: usize) -> Self {
        Self::new(seed, ((point as u64) << REPLICATE_BITS) | replicate as u64)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

fn gamma_draw<R: Rng + ?Sized>(rng: &mut R, shape: f64, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // shapes and means are validated upstream
    Gamma::new(shape, mean / shape).expect("validated gamma parameters").sample(rng)
}

/// Unit-mean Gamma-Gamma irradiance `X·Y`.
pub fn sample_turbulence<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    gamma_draw(rng, alpha, 1.0) * gamma_draw(rng, beta, 1.0)
}

/// Pointing loss for elliptical Gaussian jitter; `jitter_ratio` scales the
/// horizontal axis.
pub fn sample_pointing<R: Rng + ?Sized>(rng: &mut R, a0: f64, eta_s: f64, jitter_ratio: f64) -> f64 {
    let x: f64 = rng.sample::<f64, _>(StandardNormal) * jitter_ratio;
    let y: f64 = rng.sample(StandardNormal);
    // 2 r²/ω_eq² with r in units of the vertical jitter
    a0 * (-(x * x + y * y) / (2.0 * eta_s * eta_s)).exp()
}

/// Shadowed-Rician amplitude: Nakagami line of sight plus circular Gaussian scatter.
pub fn sample_sr_amplitude<R: Rng + ?Sized>(rng: &mut R, p: &ShadowedRicianParams) -> f64 {
    let los = gamma_draw(rng, p.m, p.omega).sqrt();
    let sd = p.b.sqrt();
    let re: f64 = los + sd * rng.sample::<f64, _>(StandardNormal);
    let im: f64 = sd * rng.sample::<f64, _>(StandardNormal);
    re.hypot(im)
}

pub fn sample_nakagami<R: Rng + ?Sized>(rng: &mut R, p: &NakagamiParams) -> f64 {
    gamma_draw(rng, p.m, p.omega).sqrt()
}

/// Phase-aligned IRS sum `Σ α_i β_i`.
pub fn sample_irs_sum<R: Rng + ?Sized>(
    rng: &mut R,
    elements: u32,
    sr: &ShadowedRicianParams,
    nak: &NakagamiParams,
) -> f64 {
    (0..elements).map(|_| sample_sr_amplitude(rng, sr) * sample_nakagami(rng, nak)).sum()
}

pub fn sample_rf_snr<R: Rng + ?Sized>(
    rng: &mut R,
    elements: u32,
    sr: &ShadowedRicianParams,
    nak: &NakagamiParams,
    gamma_bar_u: f64,
) -> f64 {
    let z = sample_irs_sum(rng, elements, sr, nak);
    gamma_bar_u * z * z
}

/// Everything needed to draw one end-to-end SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSampler {
    pub fso: FsoDerived,
    pub detection: Detection,
    pub gamma_bar_h: f64,
    pub relay_gain: f64,
    pub elements: u32,
    pub sr: ShadowedRicianParams,
    pub nak: NakagamiParams,
    pub gamma_bar_u: f64,
}

/// One draw of each hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDraw {
    pub optical: f64,
    pub rf: f64,
    pub end_to_end: f64,
}

impl LinkSampler {
    pub fn sample_fso_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let d = &self.fso;
        let h = d.h_al * sample_turbulence(rng, d.alpha, d.beta) * sample_pointing(rng, d.a0, d.eta_s, d.jitter_ratio);
        self.gamma_bar_h * h.powf(self.detection.exponent())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SnrDraw {
        let optical = self.sample_fso_snr(rng);
        let rf = sample_rf_snr(rng, self.elements, &self.sr, &self.nak, self.gamma_bar_u);
        SnrDraw { optical, rf, end_to_end: optical * rf / (rf + self.relay_gain) }
    }

    pub fn sample_e2e_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample(rng).end_to_end
    }

    pub fn with_gamma_bar_h(self, gamma_bar_h: f64) -> Self {
        Self { gamma_bar_h, ..self }
    }
}

/// Running mean and variance.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate { value: self.mean, stderr: (var / self.n as f64).sqrt(), samples: self.n }
    }
}

/// Sample mean of `f(γ)` with its standard error.
pub fn estimate_mean(
    stream: &mut RngStream,
    n: u64,
    sampler: &LinkSampler,
    mut f: impl FnMut(f64) -> f64,
) -> McEstimate {
    let mut acc = Welford::default();
    for _ in 0..n {
        acc.push(f(sampler.sample_e2e_snr(stream.rng())));
    }
    acc.estimate()
}

/// Fraction of draws below `threshold`, binomial standard error.
pub fn estimate_op(stream: &mut RngStream, n: u64, threshold: f64, sampler: &LinkSampler) -> McEstimate {
    let mut hits = 0u64;
    for _ in 0..n {
        if sampler.sample_e2e_snr(stream.rng()) < threshold {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    McEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), samples: n }
}

/// Average BER via the conditional error probability at each draw.
pub fn estimate_ber(stream: &mut RngStream, n: u64, scheme: &ModulationScheme, sampler: &LinkSampler) -> McEstimate {
    estimate_mean(stream, n, sampler, |g| scheme.conditional_ber(g))
}

/// Mean of `ln(1 + c0 γ)` in nats.
pub fn estimate_capacity(stream: &mut RngStream, n: u64, c0: f64, sampler: &LinkSampler) -> McEstimate {
    estimate_mean(stream, n, sampler, |g| (c0 * g).ln_1p())
}

/// All three metrics from one set of draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McMetrics {
    pub outage: McEstimate,
    pub ber: Option<McEstimate>,
    pub capacity: McEstimate,
}

pub fn estimate_all(
    stream: &mut RngStream,
    n: u64,
    threshold: f64,
    scheme: Option<&ModulationScheme>,
    c0: f64,
    sampler: &LinkSampler,
) -> McMetrics {
    let mut hits = 0u64;
    let mut ber = Welford::default();
    let mut cap = Welford::default();
    for _ in 0..n {
        let g = sampler.sample_e2e_snr(stream.rng());
        if g < threshold {
            hits += 1;
        }
        if let Some(s) = scheme {
            ber.push(s.conditional_ber(g));
        }
        cap.push((c0 * g).ln_1p());
    }
    let p = hits as f64 / n as f64;
    McMetrics {
        outage: McEstimate { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), samples: n },
        ber: scheme.map(|_| ber.estimate()),
        capacity: cap.estimate(),
    }
}

/// Largest gap between the empirical CDF of `samples` and `cdf`, checked at
/// both sides of every sample.
pub fn ks_distance(samples: &mut [f64], mut cdf: impl FnMut(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    worst
}

/// Largest empirical-CDF gap over a fixed grid; cheaper when `cdf` is costly.
pub fn grid_distance(samples: &mut [f64], grid: &[f64], mut cdf: impl FnMut(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    grid.iter()
        .map(|&x| {
            let below = samples.partition_point(|&s| s <= x) as f64 / n;
            (below - cdf(x)).abs()
        })
        .fold(0.0, f64::max)
}
