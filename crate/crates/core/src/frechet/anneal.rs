//! Simulated annealing over a discrete landscape.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{derive_seed, map_indices};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `R0 * alpha^k`.
    Exponential,
    /// `R0 / (1 + alpha k)`.
    Linear,
    /// `R0 / (1 + alpha ln(1 + k))`.
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingSchedule {
    kind: ScheduleKind,
    r0: f64,
    alpha: f64,
}

impl CoolingSchedule {
    pub fn new(kind: ScheduleKind, r0: f64, alpha: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("initial temperature must be positive, got {r0}")));
        }
        let ok = match kind {
            ScheduleKind::Exponential => alpha > 0.0 && alpha <= 1.0,
            ScheduleKind::Linear | ScheduleKind::Logarithmic => alpha >= 0.0 && alpha.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid decay parameter {alpha} for {kind:?} cooling")));
        }
        Ok(Self { kind, r0, alpha })
    }

    pub fn exponential(r0: f64, alpha: f64) -> Result<Self> {
        Self::new(ScheduleKind::Exponential, r0, alpha)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn initial(&self) -> f64 {
        self.r0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Temperature at iteration `k` (0-based).
    pub fn temperature(&self, k: usize) -> f64 {
        let k = k as f64;
        match self.kind {
            ScheduleKind::Exponential => self.r0 * self.alpha.powf(k),
            ScheduleKind::Linear => self.r0 / (1.0 + self.alpha * k),
            ScheduleKind::Logarithmic => self.r0 / (1.0 + self.alpha * k.ln_1p()),
        }
    }
}

impl Default for CoolingSchedule {
    fn default() -> Self {
        Self { kind: ScheduleKind::Exponential, r0: 1000.0, alpha: 0.9995 }
    }
}

impl FromStr for CoolingSchedule {
    type Err = Error;

    /// `exp:R0:alpha`, `lin:R0:alpha` or `log:R0:alpha`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("invalid schedule '{s}', expected kind:R0:alpha"));
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, r0, alpha] = parts[..] else {
            return Err(bad());
        };
        let kind = match kind {
            "exp" | "exponential" => ScheduleKind::Exponential,
            "lin" | "linear" => ScheduleKind::Linear,
            "log" | "logarithmic" => ScheduleKind::Logarithmic,
            _ => return Err(bad()),
        };
        let r0 = r0.parse().map_err(|_| bad())?;
        let alpha = alpha.parse().map_err(|_| bad())?;
        Self::new(kind, r0, alpha)
    }
}

impl fmt::Display for CoolingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ScheduleKind::Exponential => "exp",
            ScheduleKind::Linear => "lin",
            ScheduleKind::Logarithmic => "log",
        };
        write!(f, "{kind}:{}:{}", self.r0, self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub schedule: CoolingSchedule,
    pub iterations: usize,
    /// Independent chains; the best result wins.
    pub chains: usize,
    pub seed: u64,
    pub parallel: bool,
    /// Keep the per-iteration trace of the winning chain.
    pub trace: bool,
}

impl SaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            schedule: CoolingSchedule::default(),
            iterations: 50_000,
            chains: 4,
            seed: 0,
            parallel: true,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub temperature: f64,
    pub energy: f64,
    pub best_energy: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaResult<S> {
    pub best: S,
    pub best_energy: f64,
    pub trace: Vec<TraceRow>,
    pub accepted: usize,
    /// Chain that produced `best` and its derived seed.
    pub chain: usize,
    pub seed: u64,
}

impl<S> SaResult<S> {
    pub fn map<T>(self, f: impl FnOnce(S) -> T) -> SaResult<T> {
        SaResult {
            best: f(self.best),
            best_energy: self.best_energy,
            trace: self.trace,
            accepted: self.accepted,
            chain: self.chain,
            seed: self.seed,
        }
    }

    /// Writes the trace as CSV.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["iteration", "temperature", "energy", "best_energy", "accepted"]).map_err(io)?;
        for r in &self.trace {
            w.write_record([
                r.iteration.to_string(),
                r.temperature.to_string(),
                r.energy.to_string(),
                r.best_energy.to_string(),
                (r.accepted as u8).to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// A search space with an energy to minimize.
pub trait Landscape: Sync {
    type State: Clone + Send + Sync;
    type Move;

    fn energy(&self, state: &Self::State) -> f64;
    /// A proposed move, or `None` for a self-move or a rejected proposal.
    fn propose<R: Rng>(&self, state: &Self::State, rng: &mut R) -> Option<Self::Move>;
    /// Energy change if `mv` were applied.
    fn delta(&self, state: &Self::State, mv: &Self::Move) -> f64;
    fn apply(&self, state: &mut Self::State, mv: &Self::Move);
    /// Tie-break between states of equal energy.
    fn precedes(&self, a: &Self::State, b: &Self::State) -> bool;
}

/// Energies closer than this are treated as equal.
pub(crate) fn tie_tolerance(e: f64) -> f64 {
    1e-9 * e.abs().max(1.0)
}

fn better<L: Landscape>(land: &L, e: f64, s: &L::State, best_e: f64, best: &L::State) -> bool {
    let tol = tie_tolerance(best_e);
    e < best_e - tol || (e <= best_e + tol && land.precedes(s, best))
}

fn run_chain<L: Landscape>(land: &L, initial: &L::State, config: &SaConfig, chain: usize) -> SaResult<L::State> {
    let seed = derive_seed(config.seed, chain as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial.clone();
    let mut energy = land.energy(&state);
    let mut best = state.clone();
    let mut best_energy = energy;
    let mut trace = Vec::with_capacity(if config.trace { config.iterations } else { 0 });
    let mut accepted = 0usize;
    for k in 0..config.iterations {
        let temperature = config.schedule.temperature(k);
        let mut took = false;
        if let Some(mv) = land.propose(&state, &mut rng) {
            let d = land.delta(&state, &mv);
            let u: f64 = rng.random();
            if d <= 0.0 || (temperature > 0.0 && u < (-d / temperature).exp()) {
                land.apply(&mut state, &mv);
                energy += d;
                accepted += 1;
                took = true;
                if better(land, energy, &state, best_energy, &best) {
                    best_energy = land.energy(&state);
                    energy = best_energy;
                    best = state.clone();
                }
            }
        }
        if config.trace {
            trace.push(TraceRow { iteration: k, temperature, energy, best_energy, accepted: took });
        }
    }
    SaResult { best, best_energy, trace, accepted, chain, seed }
}

/// Runs `config.chains` independent chains from `initial` and returns the
/// best result (lowest energy, then the landscape's tie-break, then the
/// lowest chain index).
pub fn anneal<L: Landscape>(land: &L, initial: &L::State, config: &SaConfig) -> Result<SaResult<L::State>> {
    if config.iterations == 0 {
        return Err(Error::InvalidParameter("annealing needs at least one iteration".into()));
    }
    if config.chains == 0 {
        return Err(Error::InvalidParameter("annealing needs at least one chain".into()));
    }
    let results = map_indices(config.chains, config.parallel, |c| run_chain(land, initial, config, c));
    let mut results = results.into_iter();
    let mut winner = results.next().unwrap();
    for r in results {
        if better(land, r.best_energy, &r.best, winner.best_energy, &winner.best) {
            winner = r;
        }
    }
    Ok(winner)
}
