//! Initial data generators.
//!
//! `random_smooth` draws its coefficients from ChaCha8 (`rand_chacha`)
//! seeded with `seed_from_u64(seed)`. Modes are visited in a fixed lattice
//! order that does not depend on the grid resolution, so the same seed
//! describes the same continuous initial data on every grid fine enough to
//! hold it.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Field, Grid};
use crate::state::{normalize_director, FluidState};
use crate::{Error, Result};

/// Highest integer mode populated by `random_smooth` (further limited by the
/// grid's dealiasing cutoff).
pub const RANDOM_SMOOTH_MAX_MODE: i64 = 8;

/// Resolution of the grid on which `random_smooth` draws and scales its
/// data; `amplitude` is the peak of |u| (and of the director perturbation)
/// over this grid's points.
pub const RANDOM_SMOOTH_SAMPLING_RES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    TaylorGreen,
    WindingDirector,
    RandomSmooth,
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "taylor_green" => Ok(Self::TaylorGreen),
            "winding_director" => Ok(Self::WindingDirector),
            "random_smooth" => Ok(Self::RandomSmooth),
            other => Err(format!(
                "unknown scenario `{other}` (expected taylor_green, winding_director or random_smooth)"
            )),
        }
    }
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::TaylorGreen => "taylor_green",
            Self::WindingDirector => "winding_director",
            Self::RandomSmooth => "random_smooth",
        }
    }
}

/// Scenario name plus named real parameters (`k`, `amplitude`, `seed`, `slope`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub params: BTreeMap<String, f64>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn build(&self, grid: &Arc<Grid>) -> Result<FluidState> {
        match self.kind {
            ScenarioKind::TaylorGreen => taylor_green(grid, self.get("amplitude", 1.0)),
            ScenarioKind::WindingDirector => {
                let k = self.get("k", 1.0);
                if k.fract() != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "scenario.k",
                        reason: format!("winding number must be an integer, got {k}"),
                    });
                }
                winding_director(grid, k as i64)
            }
            ScenarioKind::RandomSmooth => {
                let seed = self.get("seed", 0.0);
                if seed < 0.0 || seed.fract() != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "scenario.seed",
                        reason: format!("seed must be a non-negative integer, got {seed}"),
                    });
                }
                random_smooth(
                    grid,
                    seed as u64,
                    self.get("slope", 4.0),
                    self.get("amplitude", 0.5),
                )
            }
        }
    }
}

fn director_up(grid: &Arc<Grid>) -> Field {
    Field::constant(grid.clone(), &[0.0, 0.0, 1.0])
}

fn check_amplitude(amplitude: f64) -> Result<()> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidParameter {
            name: "scenario.amplitude",
            reason: format!("must be positive, got {amplitude}"),
        });
    }
    Ok(())
}

/// 2D: `u = A(sin x₁ cos x₂, −cos x₁ sin x₂)`; 3D: `u = A(sin x₁ cos x₂ cos x₃,
/// −cos x₁ sin x₂ cos x₃, 0)`; `d = (0, 0, 1)`.
pub fn taylor_green(grid: &Arc<Grid>, amplitude: f64) -> Result<FluidState> {
    check_amplitude(amplitude)?;
    let dim = grid.dim();
    let u = Field::from_fn(grid.clone(), dim, |x, c| {
        let z = if dim == 3 { x[2].cos() } else { 1.0 };
        amplitude
            * z
            * match c {
                0 => x[0].sin() * x[1].cos(),
                1 => -x[0].cos() * x[1].sin(),
                _ => 0.0,
            }
    });
    FluidState::new(u, director_up(grid), 0.0)
}

/// Taylor-Green vortex carried by a uniform drift `U`, the exact solution
/// `U + e^{−2νt} TG(x − Ut)` of the 2D Navier-Stokes equations. Unlike the
/// resting vortex its advection term is not a pure gradient, so time
/// integration errors are visible.
pub fn translating_taylor_green(
    grid: &Arc<Grid>,
    amplitude: f64,
    drift: [f64; 2],
    nu: f64,
    t: f64,
) -> Result<FluidState> {
    check_amplitude(amplitude)?;
    if grid.dim() != 2 {
        return Err(Error::Shape(
            "translating Taylor-Green is two-dimensional".into(),
        ));
    }
    let decay = amplitude * (-2.0 * nu * t).exp();
    let u = Field::from_fn(grid.clone(), 2, |x, c| {
        let (a, b) = (x[0] - drift[0] * t, x[1] - drift[1] * t);
        drift[c]
            + decay
                * if c == 0 {
                    a.sin() * b.cos()
                } else {
                    -a.cos() * b.sin()
                }
    });
    FluidState::new(u, director_up(grid), t)
}

/// `u = 0`, `d = (cos k x₁, sin k x₁, 0)`: a stationary harmonic map.
pub fn winding_director(grid: &Arc<Grid>, k: i64) -> Result<FluidState> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "scenario.k",
            reason: "winding number must be nonzero".into(),
        });
    }
    if 3 * k.unsigned_abs() as usize >= grid.res() {
        return Err(Error::UnderResolved { k, res: grid.res() });
    }
    let kf = k as f64;
    let d = Field::from_fn(grid.clone(), 3, |x, c| match c {
        0 => (kf * x[0]).cos(),
        1 => (kf * x[0]).sin(),
        _ => 0.0,
    });
    FluidState::new(Field::zeros(grid.clone(), grid.dim()), d, 0.0)
}

/// Divergence-free random velocity with spectrum `∝ (1+|k|)^{−slope}` and
/// max norm `amplitude`; director `normalize((0,0,1) + q)` with `q` drawn
/// the same way and scaled to max norm `amplitude`.
pub fn random_smooth(
    grid: &Arc<Grid>,
    seed: u64,
    slope: f64,
    amplitude: f64,
) -> Result<FluidState> {
    check_amplitude(amplitude)?;
    let dim = grid.dim();
    let min_slope = dim as f64 / 2.0 + 1.0;
    if !(slope > min_slope) {
        return Err(Error::InvalidParameter {
            name: "scenario.slope",
            reason: format!("must exceed {min_slope} in {dim}D, got {slope}"),
        });
    }
    // Draw and scale on a fixed sampling grid so the same seed yields the same
    // continuous data (and the same amplitude) on every fine enough grid.
    let sample = if grid.res() > RANDOM_SMOOTH_SAMPLING_RES {
        Grid::shared(dim, RANDOM_SMOOTH_SAMPLING_RES, grid.length())?
    } else {
        grid.clone()
    };
    let kmax = RANDOM_SMOOTH_MAX_MODE.min(sample.dealias_cutoff() as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut draw = |count: usize| -> Vec<Vec<Complex64>> {
        (0..count)
            .map(|_| random_coeffs(&sample, &mut rng, kmax, slope))
            .collect()
    };
    let mut u = draw(dim);
    sample.project_in_place(&mut u);
    let u = scaled(&sample, u, amplitude)?.into_coefficients();
    let q = scaled(&sample, draw(3), amplitude)?.into_coefficients();

    let embed = |comps: Vec<Vec<Complex64>>| -> Result<Field> {
        let comps = comps
            .iter()
            .map(|c| embed_modes(&sample, grid, c))
            .collect();
        Ok(Field::from_spectral(grid.clone(), comps)?.into_physical())
    };
    let u = embed(u)?;
    let d: Vec<Vec<f64>> = embed(q)?
        .into_values()
        .into_iter()
        .enumerate()
        .map(|(m, mut comp)| {
            if m == 2 {
                comp.iter_mut().for_each(|v| *v += 1.0);
            }
            comp
        })
        .collect();
    let s = FluidState::new(u, Field::from_physical(grid.clone(), d)?, 0.0)?;
    normalize_director(&s)
}

/// Copies the coefficients of `from` into the matching modes of the (finer
/// or equal) grid `to`. The source Nyquist plane is dropped.
fn embed_modes(from: &Grid, to: &Grid, coeffs: &[Complex64]) -> Vec<Complex64> {
    if from.res() == to.res() {
        return coeffs.to_vec();
    }
    let nyquist = from.res() as i64 / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); to.len()];
    for (i, c) in coeffs.iter().enumerate() {
        let k = from.mode(i);
        if k[..from.dim()].iter().any(|m| m.abs() == nyquist) {
            continue;
        }
        out[to.mode_index(&k[..to.dim()])] = *c;
    }
    out
}

fn random_coeffs(grid: &Grid, rng: &mut ChaCha8Rng, kmax: i64, slope: f64) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let span = -kmax..=kmax;
    let lattice: Vec<[i64; 3]> = match grid.dim() {
        2 => span
            .clone()
            .flat_map(|a| span.clone().map(move |b| [a, b, 0]))
            .collect(),
        _ => span
            .clone()
            .flat_map(|a| {
                let span = span.clone();
                span.clone()
                    .flat_map(move |b| span.clone().map(move |c| [a, b, c]))
            })
            .collect(),
    };
    for k in lattice {
        if k == [0, 0, 0] {
            continue;
        }
        let norm = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        let envelope = (1.0 + norm).powf(-slope);
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        coeffs[grid.mode_index(&k)] = envelope * Complex64::new(re, im);
    }
    // Keep the real part in physical space so the field is real-valued.
    let real = grid.to_physical(&coeffs);
    grid.to_spectral(&real)
}

fn scaled(grid: &Arc<Grid>, coeffs: Vec<Vec<Complex64>>, amplitude: f64) -> Result<Field> {
    let field = Field::from_spectral(grid.clone(), coeffs)?.into_physical();
    let peak = field.max_norm();
    let factor = if peak > 0.0 { amplitude / peak } else { 0.0 };
    let values = field
        .into_values()
        .into_iter()
        .map(|c| c.into_iter().map(|v| v * factor).collect())
        .collect();
    Field::from_physical(grid.clone(), values)
}
