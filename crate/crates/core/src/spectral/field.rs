use std::sync::Arc;

use num_complex::Complex64;

use super::Grid;
use crate::{Error, Result};

/// Which representation of a [`Field`] is current.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
enum Data {
    Physical(Vec<Vec<f64>>),
    Spectral(Vec<Vec<Complex64>>),
}

/// A scalar or multi-component real field on a [`Grid`], held either as
/// point samples or as spectral coefficients.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    data: Data,
}

impl Field {
    pub fn from_physical(grid: Arc<Grid>, comps: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&grid, comps.iter().map(Vec::len), comps.len())?;
        Ok(Self {
            grid,
            data: Data::Physical(comps),
        })
    }

    pub fn from_spectral(grid: Arc<Grid>, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        check_shape(&grid, comps.iter().map(Vec::len), comps.len())?;
        Ok(Self {
            grid,
            data: Data::Spectral(comps),
        })
    }

    pub fn zeros(grid: Arc<Grid>, components: usize) -> Self {
        let n = grid.len();
        Self {
            grid,
            data: Data::Physical(vec![vec![0.0; n]; components]),
        }
    }

    /// Every component equal to the matching entry of `value` everywhere.
    pub fn constant(grid: Arc<Grid>, value: &[f64]) -> Self {
        let n = grid.len();
        let comps = value.iter().map(|&v| vec![v; n]).collect();
        Self {
            grid,
            data: Data::Physical(comps),
        }
    }

    /// Samples `f(x, component)` at every grid point.
    pub fn from_fn<F>(grid: Arc<Grid>, components: usize, f: F) -> Self
    where
        F: Fn(&[f64; 3], usize) -> f64,
    {
        let comps = (0..components)
            .map(|c| (0..grid.len()).map(|p| f(&grid.point(p), c)).collect())
            .collect();
        Self {
            grid,
            data: Data::Physical(comps),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        match &self.data {
            Data::Physical(c) => c.len(),
            Data::Spectral(c) => c.len(),
        }
    }

    pub fn repr(&self) -> Repr {
        match self.data {
            Data::Physical(_) => Repr::Physical,
            Data::Spectral(_) => Repr::Spectral,
        }
    }

    pub fn physical(&self) -> Option<&[Vec<f64>]> {
        match &self.data {
            Data::Physical(c) => Some(c),
            Data::Spectral(_) => None,
        }
    }

    pub fn spectral(&self) -> Option<&[Vec<Complex64>]> {
        match &self.data {
            Data::Spectral(c) => Some(c),
            Data::Physical(_) => None,
        }
    }

    /// Forward transform. A no-op clone when already spectral.
    pub fn to_spectral(&self) -> Field {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Field {
        self.clone().into_physical()
    }

    pub fn into_spectral(self) -> Field {
        let data = match self.data {
            Data::Spectral(c) => Data::Spectral(c),
            Data::Physical(c) => {
                Data::Spectral(c.iter().map(|v| self.grid.to_spectral(v)).collect())
            }
        };
        Field {
            grid: self.grid,
            data,
        }
    }

    pub fn into_physical(self) -> Field {
        let data = match self.data {
            Data::Physical(c) => Data::Physical(c),
            Data::Spectral(c) => {
                Data::Physical(c.iter().map(|v| self.grid.to_physical(v)).collect())
            }
        };
        Field {
            grid: self.grid,
            data,
        }
    }

    /// Point samples, transforming if necessary.
    pub fn values(&self) -> Vec<Vec<f64>> {
        match &self.data {
            Data::Physical(c) => c.clone(),
            Data::Spectral(c) => c.iter().map(|v| self.grid.to_physical(v)).collect(),
        }
    }

    /// Spectral coefficients, transforming if necessary.
    pub fn coefficients(&self) -> Vec<Vec<Complex64>> {
        match &self.data {
            Data::Spectral(c) => c.clone(),
            Data::Physical(c) => c.iter().map(|v| self.grid.to_spectral(v)).collect(),
        }
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        match self.into_physical().data {
            Data::Physical(c) => c,
            Data::Spectral(_) => unreachable!(),
        }
    }

    pub fn into_coefficients(self) -> Vec<Vec<Complex64>> {
        match self.into_spectral().data {
            Data::Spectral(c) => c,
            Data::Physical(_) => unreachable!(),
        }
    }

    /// Single component as a scalar field, same representation.
    pub fn component(&self, c: usize) -> Field {
        let data = match &self.data {
            Data::Physical(v) => Data::Physical(vec![v[c].clone()]),
            Data::Spectral(v) => Data::Spectral(vec![v[c].clone()]),
        };
        Field {
            grid: self.grid.clone(),
            data,
        }
    }

    /// Maximum over grid points of the pointwise Euclidean magnitude.
    pub fn max_norm(&self) -> f64 {
        pointwise_max(&self.values())
    }

    /// `(∫ Σ_c f_c² dx)^{1/2}` over one torus cell by collocation quadrature.
    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let sum: f64 = self.values().iter().flatten().map(|v| v * v).sum();
        (sum * dv).sqrt()
    }

    /// `L^dim Σ |f̂|²`, the spectral side of Parseval's identity.
    pub fn spectral_energy(&self) -> f64 {
        let sum: f64 = self
            .coefficients()
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum();
        sum * self.grid.volume()
    }

    /// Max-norm distance of point samples.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values()
            .iter()
            .flatten()
            .zip(other.values().iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Maximum of the pointwise magnitude evaluated on a grid twice as fine,
    /// by zero-padding the spectrum. Nyquist modes of the coarse grid are
    /// dropped.
    pub fn oversampled_max_norm(&self) -> f64 {
        pointwise_max(&self.oversampled_values())
    }

    pub(crate) fn oversampled_values(&self) -> Vec<Vec<f64>> {
        let fine = self.grid.refined();
        let half = self.grid.res() as i64 / 2;
        self.coefficients()
            .iter()
            .map(|coeffs| {
                let mut padded = vec![Complex64::new(0.0, 0.0); fine.len()];
                for (p, &c) in coeffs.iter().enumerate() {
                    let k = self.grid.mode(p);
                    if k.contains(&half) {
                        continue;
                    }
                    padded[fine.mode_index(&k)] = c;
                }
                fine.to_physical(&padded)
            })
            .collect()
    }
}

pub(crate) fn pointwise_max(comps: &[Vec<f64>]) -> f64 {
    let n = comps.first().map_or(0, Vec::len);
    (0..n)
        .map(|p| comps.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn check_shape(grid: &Grid, lens: impl Iterator<Item = usize>, count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::Shape("a field needs at least one component".into()));
    }
    for (c, len) in lens.enumerate() {
        if len != grid.len() {
            return Err(Error::Shape(format!(
                "component {c} has {len} values, grid has {}",
                grid.len()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_wrong_lengths() {
        let g = Grid::shared(2, 8, 2.0 * PI).unwrap();
        assert!(Field::from_physical(g.clone(), vec![vec![0.0; 63]]).is_err());
        assert!(Field::from_physical(g.clone(), vec![]).is_err());
        assert!(Field::from_physical(g, vec![vec![0.0; 64]; 2]).is_ok());
    }

    #[test]
    fn constant_transforms_to_mean() {
        let g = Grid::shared(2, 16, 2.0 * PI).unwrap();
        let f = Field::constant(g, &[3.5]).into_spectral();
        let c = &f.spectral().unwrap()[0];
        assert!((c[0] - Complex64::new(3.5, 0.0)).norm() < 1e-14);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn pure_tone_has_two_modes() {
        let g = Grid::shared(2, 16, 2.0 * PI).unwrap();
        let f = Field::from_fn(g.clone(), 1, |x, _| x[0].sin()).into_spectral();
        let c = &f.spectral().unwrap()[0];
        let nonzero: Vec<[i64; 3]> = (0..g.len())
            .filter(|&p| c[p].norm() > 1e-12)
            .map(|p| g.mode(p))
            .collect();
        assert_eq!(nonzero, vec![[1, 0, 0], [-1, 0, 0]]);
        // sin x = (e^{ix} - e^{-ix}) / 2i
        assert!((c[g.mode_index(&[1, 0])] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn oversampling_catches_off_grid_peak() {
        let g = Grid::shared(2, 8, 2.0 * PI).unwrap();
        // cos(2x + π/4) peaks between collocation points of the coarse grid.
        let f = Field::from_fn(g, 1, |x, _| (2.0 * x[0] + PI / 4.0).cos());
        assert!(f.max_norm() < 0.75);
        assert!((f.oversampled_max_norm() - 1.0).abs() < 1e-12);
    }
}
