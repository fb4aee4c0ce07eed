//! Coalescent branching times under a time-varying effective population size.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::metrics::RankedGenealogy;
use crate::models::beta_split::{sample_blum_francois, BetaSplit};

/// Effective population size `N_e(t)`, `t` measured backwards from the
/// present.
#[derive(Clone)]
pub enum PopSize {
    Constant(f64),
    /// `n0 * exp(-rate * t)`.
    Exponential { n0: f64, rate: f64 },
    /// Periodic logistic boom-bust: with `s = t mod period`,
    /// `floor + amplitude / (1 + exp(period/2 - 2s))` for `s <= period/2`
    /// and `floor + amplitude / (1 + exp(2s - 3 period/2))` otherwise.
    Logistic { floor: f64, amplitude: f64, period: f64 },
    /// Any positive function; `max_step` bounds the quadrature panel width
    /// so oscillations are not stepped over.
    Custom { f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, max_step: f64 },
}

impl fmt::Debug for PopSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopSize::Constant(n) => write!(f, "Constant({n})"),
            PopSize::Exponential { n0, rate } => write!(f, "Exponential({n0}, {rate})"),
            PopSize::Logistic { floor, amplitude, period } => write!(f, "Logistic({floor}, {amplitude}, {period})"),
            PopSize::Custom { max_step, .. } => write!(f, "Custom(max_step = {max_step})"),
        }
    }
}

impl PopSize {
    /// The three named trajectories: `constant` (10000), `exponential`
    /// (10000 exp(-0.01 t)) and `logistic` (1000 to 10000, period 12).
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "constant" => Ok(PopSize::Constant(10_000.0)),
            "exponential" => Ok(PopSize::Exponential { n0: 10_000.0, rate: 0.01 }),
            "logistic" => Ok(PopSize::Logistic { floor: 1000.0, amplitude: 9000.0, period: 12.0 }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown population size '{name}' (use constant, exponential or logistic)"
            ))),
        }
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, max_step: f64) -> Self {
        PopSize::Custom { f: Arc::new(f), max_step }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            PopSize::Constant(n) => *n,
            PopSize::Exponential { n0, rate } => n0 * (-rate * t).exp(),
            PopSize::Logistic { floor, amplitude, period } => {
                let s = t.rem_euclid(*period);
                let z = if s <= period / 2.0 { period / 2.0 - 2.0 * s } else { 2.0 * s - 1.5 * period };
                floor + amplitude / (1.0 + z.exp())
            }
            PopSize::Custom { f, .. } => f(t),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            PopSize::Constant(n) => *n > 0.0 && n.is_finite(),
            PopSize::Exponential { n0, rate } => *n0 > 0.0 && n0.is_finite() && rate.is_finite(),
            PopSize::Logistic { floor, amplitude, period } => {
                *floor > 0.0 && *amplitude >= 0.0 && *period > 0.0 && (floor + amplitude).is_finite()
            }
            PopSize::Custom { f, max_step } => *max_step > 0.0 && f(0.0) > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("population size {self:?} is not positive")))
        }
    }

    fn max_step(&self) -> f64 {
        match self {
            PopSize::Logistic { period, .. } => period / 8.0,
            PopSize::Custom { max_step, .. } => *max_step,
            _ => f64::INFINITY,
        }
    }

    /// `integral_a^b dt / N_e(t)`.
    pub fn intensity(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            PopSize::Constant(n) => Ok((b - a) / n),
            PopSize::Exponential { n0, rate } if *rate != 0.0 => {
                Ok(((rate * b).exp() - (rate * a).exp()) / (rate * n0))
            }
            PopSize::Exponential { n0, .. } => Ok((b - a) / n0),
            PopSize::Logistic { period, .. } if b - a > *period => {
                let whole = ((b - a) / period).floor();
                let start = a + whole * period;
                Ok(whole * self.quadrature(0.0, *period)? + self.quadrature(start, b)?)
            }
            _ => self.quadrature(a, b),
        }
    }

    fn quadrature(&self, a: f64, b: f64) -> Result<f64> {
        let inv = |t: f64| {
            let v = self.value(t);
            if v > 0.0 && v.is_finite() {
                Ok(1.0 / v)
            } else {
                Err(Error::InvalidParameter(format!("population size {v} at t = {t} is not positive")))
            }
        };
        let panels = ((b - a) / self.max_step()).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            total += adaptive_simpson(&inv, lo, lo + h, 1e-12)?;
        }
        Ok(total)
    }

    /// Waiting time `g` after `s` until the next coalescence when
    /// `pairs * integral_s^{s+g} dt/N = e`.
    fn waiting_time(&self, s: f64, pairs: f64, e: f64) -> Result<f64> {
        let target = e / pairs;
        match self {
            PopSize::Constant(n) => Ok(target * n),
            PopSize::Exponential { n0, rate } if *rate != 0.0 => {
                let arg = (rate * s).exp() + rate * n0 * target;
                if arg <= 0.0 {
                    return Err(Error::Numerical("population grows too fast for another coalescence".into()));
                }
                Ok(arg.ln() / rate - s)
            }
            PopSize::Exponential { n0, .. } => Ok(target * n0),
            _ => self.invert_intensity(s, target),
        }
    }

    fn invert_intensity(&self, s: f64, target: f64) -> Result<f64> {
        // bracket
        let mut hi = (target * self.value(s)).max(1e-12);
        let mut acc_hi = self.intensity(s, s + hi)?;
        let mut lo = 0.0;
        let mut acc_lo = 0.0;
        let mut guard = 0;
        while acc_hi < target {
            lo = hi;
            acc_lo = acc_hi;
            hi *= 2.0;
            acc_hi = acc_lo + self.intensity(s + lo, s + hi)?;
            guard += 1;
            if guard > 200 {
                return Err(Error::Numerical("waiting time diverges".into()));
            }
        }
        // safeguarded Newton on F(x) = intensity(s, s + x) - target
        let mut x = lo + (hi - lo) * (target - acc_lo) / (acc_hi - acc_lo);
        for _ in 0..100 {
            let fx = acc_lo + self.intensity(s + lo, s + x)? - target;
            if fx.abs() <= 1e-12 * target.max(1e-300) {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
                acc_lo = fx + target;
            }
            let newton = x - fx * self.value(s + x);
            x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-13 * hi.max(1.0) {
                return Ok(x);
            }
        }
        Ok(x)
    }
}

fn simpson(f0: f64, fm: f64, f1: f64, h: f64) -> f64 {
    h / 6.0 * (f0 + 4.0 * fm + f1)
}

fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let (fa, fm, fb) = (f(a)?, f(0.5 * (a + b))?, f(b)?);
    let whole = simpson(fa, fm, fb, b - a);
    let tol = (rel_tol * whole.abs()).max(f64::MIN_POSITIVE);
    refine(f, a, b, fa, fm, fb, whole, tol, 30)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

impl FromStr for PopSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::builtin(s)
    }
}

/// Branching times `u[0] > u[1] > ... > u[n-2] > 0` (root first) for `n`
/// samples taken at time 0.
pub fn sample_coalescent_times<R: Rng + ?Sized>(n: usize, pop: &PopSize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    pop.validate()?;
    let mut times = vec![0.0; n - 1];
    let mut s = 0.0;
    for lineages in (2..=n).rev() {
        let pairs = (lineages * (lineages - 1) / 2) as f64;
        let e: f64 = Exp1.sample(rng);
        s += pop.waiting_time(s, pairs, e)?;
        times[lineages - 2] = s;
    }
    Ok(times)
}

/// A neutral coalescent genealogy: Yule-distributed ranked shape with
/// independent branching times.
pub fn sample_coalescent_genealogy<R: Rng + ?Sized>(n: usize, pop: &PopSize, rng: &mut R) -> Result<RankedGenealogy> {
    let code = sample_blum_francois(n, BetaSplit::YULE, rng);
    let times = sample_coalescent_times(n, pop, rng)?;
    RankedGenealogy::new(code, times)
}
