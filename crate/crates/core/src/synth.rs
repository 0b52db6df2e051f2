//! Seeded generators for the four regime-switching test models.
//!
//! All models share one mechanism: a regime variable (a slope for models 1-2,
//! a level for models 3-4) keeps its value with probability `p` and is
//! otherwise redrawn as `b (U[0,1] − ½)`. Observations add `N(0, σ²)` noise.
//!
//! Randomness comes from ChaCha20 seeded with `seed`. Regime draws (switch
//! decisions and uniforms) use stream 0, Gaussian noise uses stream 1, so the
//! regime path for a seed does not depend on `σ`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const REGIME_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    /// Probability that the regime variable persists from one step to the next.
    pub p: f64,
    /// Scale of the uniform redraw `b (U − ½)`.
    pub b: f64,
    pub sigma: f64,
    /// Mean-reversion speed (model 4 only).
    pub theta: f64,
    pub seed: u64,
}

impl ModelParams {
    /// Straight trends with white noise: `p = 0.99, b = 0.5, σ = 15`, `n = 2000`.
    pub fn model1_reference(seed: u64) -> Self {
        Self { n: 2000, p: 0.99, b: 0.5, sigma: 15.0, theta: 1.0, seed }
    }

    /// Random walk with switching drift: `p = 0.993, b = 5, σ = 15`.
    pub fn model2_reference(n: usize, seed: u64) -> Self {
        Self { n, p: 0.993, b: 5.0, sigma: 15.0, theta: 1.0, seed }
    }

    /// Step levels with white noise: `p = 0.998, b = 50, σ = 8`.
    pub fn model3_reference(n: usize, seed: u64) -> Self {
        Self { n, p: 0.998, b: 50.0, sigma: 8.0, theta: 1.0, seed }
    }

    /// Mean reversion to a switching level: `p = 0.9985, b = 20, θ = 0.1, σ = 2`.
    pub fn model4_reference(n: usize, seed: u64) -> Self {
        Self { n, p: 0.9985, b: 20.0, sigma: 2.0, theta: 0.1, seed }
    }

    pub fn validate(&self, uses_theta: bool) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter { name: "n", reason: "must be positive" });
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter { name: "p", reason: "must lie in [0, 1]" });
        }
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter { name: "b", reason: "must be finite" });
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "must be finite and non-negative",
            });
        }
        if uses_theta && !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter { name: "theta", reason: "must lie in (0, 1]" });
        }
        Ok(())
    }
}

/// Output of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    /// Noise-free path: the trend (models 1, 2) or the switching mean (3, 4).
    pub trend: Vec<f64>,
    pub observed: Vec<f64>,
    /// Steps at which the regime variable was redrawn.
    pub switches: Vec<usize>,
}

struct Regime {
    rng: ChaCha20Rng,
    p: f64,
    b: f64,
}

impl Regime {
    fn new(params: &ModelParams) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
        rng.set_stream(REGIME_STREAM);
        Self { rng, p: params.p, b: params.b }
    }

    fn draw(&mut self) -> f64 {
        self.b * (self.rng.random::<f64>() - 0.5)
    }

    /// Returns the next value and whether it was redrawn.
    fn step(&mut self, current: f64) -> (f64, bool) {
        let u: f64 = self.rng.random();
        if u < self.p {
            (current, false)
        } else {
            (self.draw(), true)
        }
    }
}

struct Noise {
    rng: ChaCha20Rng,
    sigma: f64,
}

impl Noise {
    fn new(params: &ModelParams) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
        rng.set_stream(NOISE_STREAM);
        Self { rng, sigma: params.sigma }
    }

    fn draw(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        self.sigma * z
    }
}

/// Model 1: `x_t = x_{t−1} + v_t`, `y_t = x_t + ε_t`, `x_0 = 0`, `v_0` drawn.
pub fn simulate_model1(params: &ModelParams) -> Result<Simulation> {
    params.validate(false)?;
    let mut regime = Regime::new(params);
    let mut noise = Noise::new(params);
    let mut slope = regime.draw();
    let mut x = 0.0;
    let mut sim = Simulation::with_capacity(params.n);
    for t in 0..params.n {
        if t > 0 {
            let (v, switched) = regime.step(slope);
            slope = v;
            if switched {
                sim.switches.push(t);
            }
            x += slope;
        }
        sim.trend.push(x);
        sim.observed.push(x + noise.draw());
    }
    Ok(sim)
}

/// Model 2: `y_t = y_{t−1} + v_t + ε_t`, `y_0 = 0`. `trend` is the drift-only
/// path `Σ v`.
pub fn simulate_model2(params: &ModelParams) -> Result<Simulation> {
    params.validate(false)?;
    let mut regime = Regime::new(params);
    let mut noise = Noise::new(params);
    let mut drift = regime.draw();
    let (mut x, mut y) = (0.0, 0.0);
    let mut sim = Simulation::with_capacity(params.n);
    for t in 0..params.n {
        if t > 0 {
            let (v, switched) = regime.step(drift);
            drift = v;
            if switched {
                sim.switches.push(t);
            }
            x += drift;
            y += drift + noise.draw();
        }
        sim.trend.push(x);
        sim.observed.push(y);
    }
    Ok(sim)
}

/// Model 3: piecewise-constant level `x_t` (drawn at `t = 0`), `y_t = x_t + ε_t`.
pub fn simulate_model3(params: &ModelParams) -> Result<Simulation> {
    params.validate(false)?;
    let mut regime = Regime::new(params);
    let mut noise = Noise::new(params);
    let mut level = regime.draw();
    let mut sim = Simulation::with_capacity(params.n);
    for t in 0..params.n {
        if t > 0 {
            let (v, switched) = regime.step(level);
            level = v;
            if switched {
                sim.switches.push(t);
            }
        }
        sim.trend.push(level);
        sim.observed.push(level + noise.draw());
    }
    Ok(sim)
}

/// Model 4: `y_t = y_{t−1} + θ (x_t − y_{t−1}) + ε_t` with switching mean
/// `x_t` (drawn at `t = 0`) and `y_0 = 0`.
pub fn simulate_model4(params: &ModelParams) -> Result<Simulation> {
    params.validate(true)?;
    let mut regime = Regime::new(params);
    let mut noise = Noise::new(params);
    let mut level = regime.draw();
    let mut y = 0.0;
    let mut sim = Simulation::with_capacity(params.n);
    for t in 0..params.n {
        if t > 0 {
            let (v, switched) = regime.step(level);
            level = v;
            if switched {
                sim.switches.push(t);
            }
            y += params.theta * (level - y) + noise.draw();
        }
        sim.trend.push(level);
        sim.observed.push(y);
    }
    Ok(sim)
}

/// Standard Brownian path sampled at unit steps, `W_0 = 0`.
pub fn simulate_brownian(n: usize, seed: u64) -> Vec<f64> {
    let params = ModelParams { n, p: 1.0, b: 0.0, sigma: 1.0, theta: 1.0, seed };
    let mut noise = Noise::new(&params);
    let mut w = 0.0;
    (0..n)
        .map(|t| {
            if t > 0 {
                w += noise.draw();
            }
            w
        })
        .collect()
}

/// The four models by number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    StraightTrends,
    SwitchingRandomWalk,
    StepLevels,
    MeanReverting,
}

impl Model {
    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Model::StraightTrends),
            2 => Ok(Model::SwitchingRandomWalk),
            3 => Ok(Model::StepLevels),
            4 => Ok(Model::MeanReverting),
            _ => Err(Error::InvalidParameter { name: "model", reason: "must be 1, 2, 3 or 4" }),
        }
    }

    pub fn simulate(self, params: &ModelParams) -> Result<Simulation> {
        match self {
            Model::StraightTrends => simulate_model1(params),
            Model::SwitchingRandomWalk => simulate_model2(params),
            Model::StepLevels => simulate_model3(params),
            Model::MeanReverting => simulate_model4(params),
        }
    }
}

impl Simulation {
    fn with_capacity(n: usize) -> Self {
        Self {
            trend: Vec::with_capacity(n),
            observed: Vec::with_capacity(n),
            switches: Vec::new(),
        }
    }
}
