//! Seeded finite-shot simulation of projective measurements.
//!
//! Generator: ChaCha8 (`rand_chacha`). Shots are split into chunks of
//! [`CHUNK_SHOTS`]; chunk `c` draws from the generator seeded with
//! `seed_from_u64(seed)` on stream `c`. Each shot takes one `f64` in `[0, 1)`
//! and picks the first outcome whose cumulative probability exceeds it.
//! Counts are therefore fixed by `(state, PDI, shots, seed)` whether chunks
//! run on one thread or many.
//!
//! CHSH settings are sampled independently with seed `seed ^ index`, index
//! `2a + b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bell::{sign_pdi, BellError, ChshOperators, SettingPair, CHSH_VARIANTS};
use crate::hilbert::{HilbertError, Ket, Observable, Pdi};

pub const CHUNK_SHOTS: u64 = 1 << 16;

/// Probability sums further than this from 1 are rejected rather than
/// renormalized.
pub const RENORMALIZE_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("{found} outcome values for {expected} outcomes")]
    ValueCount { expected: usize, found: usize },
    #[error("outcome probabilities sum to {total}")]
    ProbabilitySum { total: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    shots: u64,
    seed: u64,
}

impl RunConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self, SamplerError> {
        if shots == 0 {
            return Err(SamplerError::ZeroShots);
        }
        Ok(RunConfig { shots, seed })
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        RunConfig { seed, ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub empirical_mean: f64,
    /// Standard error of the mean, `sqrt(var / shots)`.
    pub std_error: f64,
}

impl SampleResult {
    pub fn count(&self, label: &str) -> Option<u64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.counts[i])
    }
}

/// Cumulative distribution; entries from the last nonzero outcome on are
/// pinned to 1 so zero-probability outcomes are never drawn.
fn cumulative(probs: &[f64]) -> Result<Vec<f64>, SamplerError> {
    let total: f64 = probs.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() > RENORMALIZE_WINDOW {
        return Err(SamplerError::ProbabilitySum { total });
    }
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut acc = 0.0;
    let mut cum: Vec<f64> = probs
        .iter()
        .map(|&p| {
            acc += p.max(0.0) / total;
            acc
        })
        .collect();
    for c in &mut cum[last..] {
        *c = 1.0;
    }
    Ok(cum)
}

fn sample_chunk(cum: &[f64], seed: u64, chunk: u64, shots: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = vec![0u64; cum.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let j = cum.partition_point(|&c| c <= u);
        counts[j.min(cum.len() - 1)] += 1;
    }
    counts
}

fn chunk_sizes(shots: u64) -> Vec<u64> {
    let full = shots / CHUNK_SHOTS;
    let mut sizes = vec![CHUNK_SHOTS; full as usize];
    if !shots.is_multiple_of(CHUNK_SHOTS) {
        sizes.push(shots % CHUNK_SHOTS);
    }
    sizes
}

/// Draws `cfg.shots` outcomes with probabilities `probs`.
pub fn sample_counts(probs: &[f64], cfg: RunConfig) -> Result<Vec<u64>, SamplerError> {
    let cum = cumulative(probs)?;
    let sizes = chunk_sizes(cfg.shots);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(sizes.len());
    let mut totals = vec![0u64; cum.len()];
    if workers <= 1 {
        for (c, &n) in sizes.iter().enumerate() {
            for (t, k) in totals
                .iter_mut()
                .zip(sample_chunk(&cum, cfg.seed, c as u64, n))
            {
                *t += k;
            }
        }
        return Ok(totals);
    }
    let partials: Vec<Vec<u64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let cum = &cum;
                let sizes = &sizes;
                scope.spawn(move || {
                    let mut local = vec![0u64; cum.len()];
                    for c in (w..sizes.len()).step_by(workers) {
                        for (t, k) in local
                            .iter_mut()
                            .zip(sample_chunk(cum, cfg.seed, c as u64, sizes[c]))
                        {
                            *t += k;
                        }
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler worker panicked"))
            .collect()
    });
    for p in partials {
        for (t, k) in totals.iter_mut().zip(p) {
            *t += k;
        }
    }
    Ok(totals)
}

/// Samples the outcomes of `pdi` in `state`; `values[j]` is the number
/// attached to outcome `j` when forming the mean.
pub fn sample_pdi(
    state: &Ket,
    pdi: &Pdi,
    values: &[f64],
    cfg: RunConfig,
) -> Result<SampleResult, SamplerError> {
    if values.len() != pdi.len() {
        return Err(SamplerError::ValueCount {
            expected: pdi.len(),
            found: values.len(),
        });
    }
    let probs = pdi.probabilities(state)?;
    let counts = sample_counts(&probs, cfg)?;
    let n = cfg.shots as f64;
    let mean = counts
        .iter()
        .zip(values)
        .map(|(&k, v)| k as f64 * v)
        .sum::<f64>()
        / n;
    let var = counts
        .iter()
        .zip(values)
        .map(|(&k, v)| k as f64 * (v - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(SampleResult {
        labels: pdi.labels().to_vec(),
        values: values.to_vec(),
        counts,
        shots: cfg.shots,
        empirical_mean: mean,
        std_error: (var / n).sqrt(),
    })
}

/// Samples the spectral PDI of `obs`, using its eigenvalues as outcome
/// values.
pub fn sample_observable(
    state: &Ket,
    obs: &Observable,
    cfg: RunConfig,
) -> Result<SampleResult, SamplerError> {
    sample_pdi(state, obs.pdi(), obs.eigenvalues(), cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalChsh {
    /// One run per setting pair, in `SettingPair::all()` order.
    pub runs: Vec<SampleResult>,
    /// `E_hat[a][b] = (N+ - N-) / N`.
    pub estimates: [[f64; 2]; 2],
    pub s_hat: f64,
    pub std_error: f64,
}

/// Four independent experiments, each measuring `M_ab = A_a B_b` directly.
pub fn empirical_chsh(
    state: &Ket,
    ops: &ChshOperators,
    cfg: RunConfig,
) -> Result<EmpiricalChsh, SamplerError> {
    let mut runs = Vec::with_capacity(4);
    let mut estimates = [[0.0; 2]; 2];
    let mut s_hat = 0.0;
    let mut var = 0.0;
    for (s, sign) in SettingPair::all().into_iter().zip(CHSH_VARIANTS[0]) {
        let pdi = sign_pdi(&ops.product(s))?;
        let values: Vec<f64> = pdi
            .labels()
            .iter()
            .map(|l| if l == "+" { 1.0 } else { -1.0 })
            .collect();
        let run = sample_pdi(
            state,
            &pdi,
            &values,
            cfg.with_seed(cfg.seed ^ s.index() as u64),
        )?;
        estimates[s.a][s.b] = run.empirical_mean;
        s_hat += f64::from(sign) * run.empirical_mean;
        var += run.std_error.powi(2);
        runs.push(run);
    }
    Ok(EmpiricalChsh {
        runs,
        estimates,
        s_hat,
        std_error: var.sqrt(),
    })
}
