//! The coupled flow state: velocity, unit director and time.

use std::sync::Arc;

use num_complex::Complex64;

use crate::spectral::{Field, Grid};
use crate::{Error, Result};

/// A director shorter than this at any grid point is treated as a loss of
/// resolution rather than renormalized.
pub const DEGENERATE_DIRECTOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    nu: f64,
}

impl PhysicsParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: format!("viscosity must be positive, got {nu}"),
            });
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self { nu: 1.0 }
    }
}

/// Velocity `u` (`dim` components), director `d` (always 3 components) and
/// time `t`. Both fields are kept in physical representation.
#[derive(Debug, Clone)]
pub struct FluidState {
    grid: Arc<Grid>,
    u: Field,
    d: Field,
    t: f64,
}

impl FluidState {
    pub fn new(u: Field, d: Field, t: f64) -> Result<Self> {
        let grid = u.grid().clone();
        if **d.grid() != *grid {
            return Err(Error::Shape("u and d live on different grids".into()));
        }
        if u.components() != grid.dim() {
            return Err(Error::Shape(format!(
                "velocity needs {} components, got {}",
                grid.dim(),
                u.components()
            )));
        }
        if d.components() != 3 {
            return Err(Error::Shape(format!(
                "director needs 3 components, got {}",
                d.components()
            )));
        }
        Ok(Self {
            grid,
            u: u.into_physical(),
            d: d.into_physical(),
            t,
        })
    }

    /// `u = 0`, `d = (0, 0, 1)`, `t = 0`.
    pub fn quiescent(grid: Arc<Grid>) -> Self {
        let dim = grid.dim();
        Self {
            u: Field::zeros(grid.clone(), dim),
            d: Field::constant(grid.clone(), &[0.0, 0.0, 1.0]),
            grid,
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn u(&self) -> &Field {
        &self.u
    }

    pub fn d(&self) -> &Field {
        &self.d
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub(crate) fn u_values(&self) -> &[Vec<f64>] {
        self.u.physical().expect("state fields are physical")
    }

    pub(crate) fn d_values(&self) -> &[Vec<f64>] {
        self.d.physical().expect("state fields are physical")
    }
}

/// Divides the director by its length at every grid point.
pub fn normalize_director(s: &FluidState) -> Result<FluidState> {
    let d = normalized(s.d_values())?;
    Ok(FluidState {
        grid: s.grid.clone(),
        u: s.u.clone(),
        d: Field::from_physical(s.grid.clone(), d)?,
        t: s.t,
    })
}

pub(crate) fn normalized(d: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out = d.to_vec();
    for p in 0..d[0].len() {
        let len = (d[0][p] * d[0][p] + d[1][p] * d[1][p] + d[2][p] * d[2][p]).sqrt();
        if !(len >= DEGENERATE_DIRECTOR) {
            return Err(Error::DegenerateDirector {
                index: p,
                magnitude: len,
            });
        }
        for comp in out.iter_mut() {
            comp[p] /= len;
        }
    }
    Ok(out)
}

/// Zero-mean pressure solving `Δp = −∇·(u·∇u + Δd·∇d)`, with the
/// products dealiased. Viscosity does not enter since `Δu` is
/// divergence-free.
pub fn recover_pressure(s: &FluidState, _params: &PhysicsParams) -> Field {
    let grid = &s.grid;
    let forcing = momentum_flux(s);
    let mut p = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, f) in forcing.iter().enumerate() {
        let kd = grid.kderiv(axis);
        for (q, (pc, fc)) in p.iter_mut().zip(f).enumerate() {
            // i k·F̂ / |k|²
            *pc += Complex64::new(-kd[q] * fc.im, kd[q] * fc.re);
        }
    }
    for (pc, &k2) in p.iter_mut().zip(grid.ksq()) {
        *pc = if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            *pc / k2
        };
    }
    Field::from_spectral(grid.clone(), vec![p]).expect("scalar shape")
}

/// Dealiased coefficients of `u·∇u + Δd·∇d`, one vector per velocity component.
pub(crate) fn momentum_flux(s: &FluidState) -> Vec<Vec<Complex64>> {
    let grid = &s.grid;
    let dim = grid.dim();
    let u = s.u_values();
    let uh: Vec<_> = u.iter().map(|c| grid.to_spectral(c)).collect();
    let dh: Vec<_> = s.d_values().iter().map(|c| grid.to_spectral(c)).collect();
    let lap_d: Vec<_> = dh
        .iter()
        .map(|c| grid.to_physical(&grid.laplacian_coeffs(c)))
        .collect();
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut flux = vec![0.0; grid.len()];
        for i in 0..dim {
            let du = grid.to_physical(&grid.derivative(&uh[j], i));
            for p in 0..grid.len() {
                flux[p] += u[i][p] * du[p];
            }
        }
        for (m, lap) in lap_d.iter().enumerate() {
            let dd = grid.to_physical(&grid.derivative(&dh[m], j));
            for p in 0..grid.len() {
                flux[p] += lap[p] * dd[p];
            }
        }
        let mut c = grid.to_spectral(&flux);
        grid.dealias_in_place(&mut c);
        out.push(c);
    }
    out
}

/// `(max | |d| − 1 |, max | |∇d|² + d·Δd |)` over grid points.
pub fn constraint_residual(s: &FluidState) -> (f64, f64) {
    let grid = &s.grid;
    let d = s.d_values();
    let norm_err = (0..grid.len())
        .map(|p| ((d[0][p].powi(2) + d[1][p].powi(2) + d[2][p].powi(2)).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);

    let mut identity = vec![0.0; grid.len()];
    for comp in d {
        let c = grid.to_spectral(comp);
        let lap = grid.to_physical(&grid.laplacian_coeffs(&c));
        for p in 0..grid.len() {
            identity[p] += comp[p] * lap[p];
        }
        for axis in 0..grid.dim() {
            let g = grid.to_physical(&grid.derivative(&c, axis));
            for p in 0..grid.len() {
                identity[p] += g[p] * g[p];
            }
        }
    }
    let identity_err = identity.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (norm_err, identity_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gradient, leray_project};
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Grid::shared(2, 32, 2.0 * PI).unwrap()
    }

    fn state(
        g: &Arc<Grid>,
        u: impl Fn(&[f64; 3], usize) -> f64,
        d: impl Fn(&[f64; 3], usize) -> f64,
    ) -> FluidState {
        FluidState::new(
            Field::from_fn(g.clone(), 2, u),
            Field::from_fn(g.clone(), 3, d),
            0.0,
        )
        .unwrap()
    }

    fn winding(x: &[f64; 3], c: usize) -> f64 {
        match c {
            0 => x[0].cos(),
            1 => x[0].sin(),
            _ => 0.0,
        }
    }

    fn tg(x: &[f64; 3], c: usize) -> f64 {
        match c {
            0 => x[0].sin() * x[1].cos(),
            _ => -x[0].cos() * x[1].sin(),
        }
    }

    fn up(_: &[f64; 3], c: usize) -> f64 {
        if c == 2 {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn viscosity_must_be_positive() {
        assert!(PhysicsParams::new(-1.0).is_err());
        assert!(PhysicsParams::new(0.0).is_err());
        assert!(PhysicsParams::new(f64::NAN).is_err());
        assert_eq!(PhysicsParams::default().nu(), 1.0);
    }

    #[test]
    fn state_checks_shapes() {
        let g = grid();
        let u = Field::zeros(g.clone(), 3);
        let d = Field::zeros(g.clone(), 3);
        assert!(FluidState::new(u, d.clone(), 0.0).is_err());
        assert!(FluidState::new(Field::zeros(g.clone(), 2), Field::zeros(g, 2), 0.0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let g = grid();
        let s = state(&g, |_, _| 0.0, |_, c| if c == 2 { 2.0 } else { 0.0 });
        let n = normalize_director(&s).unwrap();
        assert!(n.d().values()[2].iter().all(|&v| v == 1.0));

        let s = state(&g, |_, _| 0.0, winding);
        let n = normalize_director(&s).unwrap();
        assert!(n.d().max_abs_diff(s.d()) < 1e-15);

        let s = state(&g, |_, _| 0.0, |_, c| if c < 2 { 1.0 } else { 0.0 });
        let n = normalize_director(&s).unwrap().d().values();
        let r = 1.0 / 2f64.sqrt();
        assert!((n[0][5] - r).abs() < 1e-15 && (n[1][5] - r).abs() < 1e-15 && n[2][5] == 0.0);
    }

    #[test]
    fn normalize_rejects_degenerate() {
        let g = grid();
        let s = state(
            &g,
            |_, _| 0.0,
            |x, c| if c == 0 && x[0] > 1.0 { 1.0 } else { 0.0 },
        );
        assert!(matches!(
            normalize_director(&s),
            Err(Error::DegenerateDirector { index: 0, .. })
        ));
    }

    #[test]
    fn pressure_vanishes_for_harmonic_director() {
        let g = grid();
        let params = PhysicsParams::default();
        let s = state(&g, |_, _| 0.0, winding);
        assert!(recover_pressure(&s, &params).max_norm() < 1e-13);
        let s = state(&g, |_, _| 0.0, up);
        assert_eq!(recover_pressure(&s, &params).max_norm(), 0.0);
    }

    #[test]
    fn taylor_green_pressure() {
        // Substituting u = (sin x cos y, −cos x sin y) into the momentum
        // equation gives ∇p = −u·∇u = −(sin 2x, sin 2y)/2.
        let g = grid();
        let s = state(&g, tg, up);
        let p = recover_pressure(&s, &PhysicsParams::default());
        let exact = Field::from_fn(g, 1, |x, _| ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0);
        assert!(p.max_abs_diff(&exact) < 1e-13);
        assert!(p.spectral().unwrap()[0][0].norm() == 0.0);
    }

    #[test]
    fn pressure_gradient_is_invisible_after_projection() {
        let g = grid();
        let s = state(
            &g,
            |x, c| {
                if c == 0 {
                    (x[1] + 0.3).sin() * x[0].cos()
                } else {
                    (2.0 * x[0]).cos() * 0.5
                }
            },
            |x, c| match c {
                0 => 0.3 * x[1].sin(),
                1 => 0.2 * (x[0] + x[1]).cos(),
                _ => 1.0,
            },
        );
        let s = normalize_director(&s).unwrap();
        let flux = momentum_flux(&s);
        let p = recover_pressure(&s, &PhysicsParams::default());
        let grad_p: Vec<_> = (0..2)
            .map(|a| gradient(&p, a).unwrap().into_coefficients().remove(0))
            .collect();
        let with_p: Vec<Vec<Complex64>> = flux
            .iter()
            .zip(&grad_p)
            .map(|(f, gp)| f.iter().zip(gp).map(|(a, b)| a + b).collect())
            .collect();
        let a = leray_project(&Field::from_spectral(g.clone(), with_p).unwrap()).unwrap();
        let b = leray_project(&Field::from_spectral(g, flux).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-11);
    }

    #[test]
    fn constraint_residual_examples() {
        let g = grid();
        let (a, b) = constraint_residual(&state(&g, |_, _| 0.0, up));
        assert!(a < 1e-12 && b < 1e-12);
        let (a, b) = constraint_residual(&state(&g, |_, _| 0.0, winding));
        assert!(a < 1e-12 && b < 1e-12);
        let (a, _) = constraint_residual(&state(
            &g,
            |_, _| 0.0,
            |_, c| if c == 2 { 1.001 } else { 0.0 },
        ));
        assert!((a - 1e-3).abs() < 1e-12);
    }
}
