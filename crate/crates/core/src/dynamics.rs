//! Right-hand sides and integrating-factor Runge-Kutta time stepping.
//!
//! The diffusion terms `νΔu` and `Δd` are integrated exactly in spectral
//! space through the factors `e^{−ν|k|²dt}` and `e^{−|k|²dt}`; transport,
//! the elastic forcing `−Δd·∇d` and the tension `|∇d|²d` are advanced
//! explicitly. The director is renormalized once per full step.

use std::str::FromStr;

use num_complex::Complex64;

use crate::spectral::{Field, Grid};
use crate::state::{normalized, FluidState, PhysicsParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    IfRk2,
    #[default]
    IfRk4,
}

impl FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "if-rk2" | "ifrk2" | "rk2" => Ok(Integrator::IfRk2),
            "if-rk4" | "ifrk4" | "rk4" => Ok(Integrator::IfRk4),
            other => Err(format!(
                "unknown integrator `{other}` (expected IF-RK2 or IF-RK4)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub time_step: TimeStep,
    pub t_max: f64,
    pub integrator: Integrator,
}

impl StepPolicy {
    pub fn validate(&self) -> Result<()> {
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(Error::InvalidTimeStep(dt))
            }
            TimeStep::Cfl(f) if !(f > 0.0 && f <= 1.0) => {
                return Err(Error::InvalidParameter {
                    name: "cfl_factor",
                    reason: format!("must lie in (0, 1], got {f}"),
                })
            }
            _ => {}
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: format!("must be finite and non-negative, got {}", self.t_max),
            });
        }
        Ok(())
    }
}

type Coeffs = Vec<Vec<Complex64>>;

/// Explicit part of the tendency for the stacked coefficients
/// `[u_0.., u_{dim-1}, d_0, d_1, d_2]`: the projected `−u·∇u − Δd·∇d` and
/// `|∇d|²d − u·∇d`, both dealiased.
fn nonlinear(grid: &Grid, y: &[Vec<Complex64>]) -> Coeffs {
    let dim = grid.dim();
    let n = grid.len();
    let (uh, dh) = y.split_at(dim);
    let u: Vec<Vec<f64>> = uh.iter().map(|c| grid.to_physical(c)).collect();
    let d: Vec<Vec<f64>> = dh.iter().map(|c| grid.to_physical(c)).collect();
    let lap_d: Vec<Vec<f64>> = dh
        .iter()
        .map(|c| grid.to_physical(&grid.laplacian_coeffs(c)))
        .collect();
    // du[i][j] = ∂_i u_j, dd[i][m] = ∂_i d_m
    let du: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|i| {
            uh.iter()
                .map(|c| grid.to_physical(&grid.derivative(c, i)))
                .collect()
        })
        .collect();
    let dd: Vec<Vec<Vec<f64>>> = (0..dim)
        .map(|i| {
            dh.iter()
                .map(|c| grid.to_physical(&grid.derivative(c, i)))
                .collect()
        })
        .collect();

    let mut out = vec![vec![0.0; n]; dim + 3];
    for p in 0..n {
        for j in 0..dim {
            let mut adv = 0.0;
            for i in 0..dim {
                adv += u[i][p] * du[i][j][p];
            }
            let mut force = 0.0;
            for m in 0..3 {
                force += lap_d[m][p] * dd[j][m][p];
            }
            out[j][p] = -(adv + force);
        }
        let mut grad_sq = 0.0;
        for row in &dd {
            for comp in row {
                grad_sq += comp[p] * comp[p];
            }
        }
        for m in 0..3 {
            let mut adv = 0.0;
            for i in 0..dim {
                adv += u[i][p] * dd[i][m][p];
            }
            out[dim + m][p] = grad_sq * d[m][p] - adv;
        }
    }

    let mut coeffs: Coeffs = out
        .iter()
        .map(|v| {
            let mut c = grid.to_spectral(v);
            grid.dealias_in_place(&mut c);
            c
        })
        .collect();
    grid.project_in_place(&mut coeffs[..dim]);
    coeffs
}

fn stacked(s: &FluidState) -> Coeffs {
    let grid = s.grid();
    s.u_values()
        .iter()
        .chain(s.d_values())
        .map(|c| grid.to_spectral(c))
        .collect()
}

/// `P[−u·∇u − Δd·∇d] + νΔu`, returned in physical representation.
pub fn momentum_rhs(s: &FluidState, params: &PhysicsParams) -> Field {
    let grid = s.grid();
    let y = stacked(s);
    let mut n = nonlinear(grid, &y);
    n.truncate(grid.dim());
    for (nc, yc) in n.iter_mut().zip(&y) {
        for ((a, b), &k2) in nc.iter_mut().zip(yc).zip(grid.ksq()) {
            *a -= params.nu() * k2 * b;
        }
    }
    Field::from_spectral(grid.clone(), n)
        .expect("shape")
        .into_physical()
}

/// `Δd + |∇d|²d − u·∇d`, returned in physical representation.
pub fn director_rhs(s: &FluidState) -> Field {
    let grid = s.grid();
    let dim = grid.dim();
    let y = stacked(s);
    let n = nonlinear(grid, &y).split_off(dim);
    let n = n
        .into_iter()
        .zip(&y[dim..])
        .map(|(mut nc, yc)| {
            for ((a, b), &k2) in nc.iter_mut().zip(yc).zip(grid.ksq()) {
                *a -= k2 * b;
            }
            nc
        })
        .collect();
    Field::from_spectral(grid.clone(), n)
        .expect("shape")
        .into_physical()
}

/// Advances the state by `dt` and renormalizes the director.
pub fn step(
    s: &FluidState,
    params: &PhysicsParams,
    dt: f64,
    integrator: Integrator,
) -> Result<FluidState> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let grid = s.grid();
    let dim = grid.dim();
    let y0 = stacked(s);

    // Decay factors over a full and a half step, per component class.
    let factor = |rate: f64, h: f64| -> Vec<f64> {
        grid.ksq()
            .iter()
            .map(|&k2| (-rate * k2 * h).exp())
            .collect()
    };
    let full = [factor(params.nu(), dt), factor(1.0, dt)];
    let half = [factor(params.nu(), 0.5 * dt), factor(1.0, 0.5 * dt)];
    let class = |c: usize| usize::from(c >= dim);

    let y1 = match integrator {
        Integrator::IfRk2 => {
            let n1 = nonlinear(grid, &y0);
            let stage = combine(&y0, |c, p| full[class(c)][p] * (y0[c][p] + dt * n1[c][p]));
            let n2 = nonlinear(grid, &stage);
            combine(&y0, |c, p| {
                let e = full[class(c)][p];
                e * y0[c][p] + 0.5 * dt * (e * n1[c][p] + n2[c][p])
            })
        }
        Integrator::IfRk4 => {
            let n1 = nonlinear(grid, &y0);
            let a = combine(&y0, |c, p| {
                half[class(c)][p] * (y0[c][p] + 0.5 * dt * n1[c][p])
            });
            let n2 = nonlinear(grid, &a);
            let b = combine(&y0, |c, p| {
                half[class(c)][p] * y0[c][p] + 0.5 * dt * n2[c][p]
            });
            let n3 = nonlinear(grid, &b);
            let c4 = combine(&y0, |c, p| {
                let eh = half[class(c)][p];
                full[class(c)][p] * y0[c][p] + dt * eh * n3[c][p]
            });
            let n4 = nonlinear(grid, &c4);
            combine(&y0, |c, p| {
                let e = full[class(c)][p];
                let eh = half[class(c)][p];
                e * y0[c][p]
                    + dt / 6.0 * (e * n1[c][p] + 2.0 * eh * (n2[c][p] + n3[c][p]) + n4[c][p])
            })
        }
    };

    let t = s.t() + dt;
    let mut values: Vec<Vec<f64>> = y1.iter().map(|c| grid.to_physical(c)).collect();
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { t });
    }
    let d = normalized(&values.split_off(dim))?;
    FluidState::new(
        Field::from_physical(grid.clone(), values)?,
        Field::from_physical(grid.clone(), d)?,
        t,
    )
}

fn combine<F>(shape: &[Vec<Complex64>], f: F) -> Coeffs
where
    F: Fn(usize, usize) -> Complex64,
{
    shape
        .iter()
        .enumerate()
        .map(|(c, comp)| (0..comp.len()).map(|p| f(c, p)).collect())
        .collect()
}

/// Pointwise maximum of `(Σ_{i,m} (∂_i d_m)²)^{1/2}`.
pub(crate) fn grad_d_linf(s: &FluidState) -> f64 {
    let grid = s.grid();
    let mut sq = vec![0.0; grid.len()];
    for comp in s.d_values() {
        let c = grid.to_spectral(comp);
        for axis in 0..grid.dim() {
            for (acc, g) in sq
                .iter_mut()
                .zip(grid.to_physical(&grid.derivative(&c, axis)))
            {
                *acc += g * g;
            }
        }
    }
    sq.into_iter().fold(0.0, f64::max).sqrt()
}

/// `cfl · Δx / max(‖u‖∞, ‖∇d‖∞, 1)`, or the fixed step, capped by the
/// time left until `t_max`.
pub fn suggest_dt(s: &FluidState, policy: &StepPolicy) -> f64 {
    let dt = match policy.time_step {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Cfl(factor) => {
            let speed = s.u().max_norm().max(grad_d_linf(s)).max(1.0);
            factor * s.grid().spacing() / speed
        }
    };
    dt.min(policy.t_max - s.t())
}
