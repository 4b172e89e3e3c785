//! Periodic-torus discretization and exact spectral operators.
//!
//! All operators accept a field in either representation and return a
//! spectral-current field. Derivatives multiply by `i k` with the Nyquist
//! wavenumber set to zero; the Laplacian uses the same wavenumbers, so
//! `laplacian = divergence ∘ gradient` holds mode by mode.

pub(crate) mod field;
mod grid;

pub use field::{Field, Repr};
pub use grid::Grid;

use num_complex::Complex64;

use crate::{Error, Result};

/// Forward transform (physical to spectral).
pub fn transform_forward(f: &Field) -> Field {
    f.to_spectral()
}

/// Inverse transform (spectral to physical).
pub fn transform_inverse(f: &Field) -> Field {
    f.to_physical()
}

/// `∂f/∂x_axis`, applied to each component.
pub fn gradient(f: &Field, axis: usize) -> Result<Field> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(Error::InvalidAxis {
            axis,
            dim: grid.dim(),
        });
    }
    let comps = f
        .coefficients()
        .iter()
        .map(|c| grid.derivative(c, axis))
        .collect();
    Field::from_spectral(grid.clone(), comps)
}

pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid();
    let comps = f
        .coefficients()
        .iter()
        .map(|c| grid.laplacian_coeffs(c))
        .collect();
    Field::from_spectral(grid.clone(), comps).expect("shape preserved")
}

/// `∂²f/∂x_i∂x_j`, applied to each component.
pub fn second_derivative(f: &Field, i: usize, j: usize) -> Result<Field> {
    gradient(&gradient(f, i)?, j)
}

/// `Σ_j ∂v_j/∂x_j` for a field with `dim` components.
pub fn divergence(v: &Field) -> Result<Field> {
    let grid = v.grid();
    expect_vector(v)?;
    let coeffs = v.coefficients();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (axis, c) in coeffs.iter().enumerate() {
        for (o, d) in out.iter_mut().zip(grid.derivative(c, axis)) {
            *o += d;
        }
    }
    Field::from_spectral(grid.clone(), vec![out])
}

/// Vorticity: a scalar `∂₁v₂ − ∂₂v₁` in 2D, the 3-vector `∇×v` in 3D.
pub fn curl(v: &Field) -> Result<Field> {
    let grid = v.grid();
    expect_vector(v)?;
    let c = v.coefficients();
    let d = |comp: usize, axis: usize| grid.derivative(&c[comp], axis);
    let sub = |a: Vec<Complex64>, b: Vec<Complex64>| -> Vec<Complex64> {
        a.into_iter().zip(b).map(|(x, y)| x - y).collect()
    };
    let comps = if grid.dim() == 2 {
        vec![sub(d(1, 0), d(0, 1))]
    } else {
        vec![
            sub(d(2, 1), d(1, 2)),
            sub(d(0, 2), d(2, 0)),
            sub(d(1, 0), d(0, 1)),
        ]
    };
    Field::from_spectral(grid.clone(), comps)
}

/// Orthogonal projection onto divergence-free fields, `I − ∇Δ⁻¹∇·`.
/// The mean (mode zero) passes through unchanged.
pub fn leray_project(v: &Field) -> Result<Field> {
    expect_vector(v)?;
    let mut comps = v.coefficients();
    v.grid().project_in_place(&mut comps);
    Field::from_spectral(v.grid().clone(), comps)
}

/// Zeroes every mode with some `|k_j| > res/3`.
pub fn dealias(f: &Field) -> Field {
    let grid = f.grid();
    let mut comps = f.coefficients();
    for c in &mut comps {
        grid.dealias_in_place(c);
    }
    Field::from_spectral(grid.clone(), comps).expect("shape preserved")
}

/// `(Σ_{i,j} ‖∂_i∂_j f‖²_{L²})^{1/2}`, the full Hessian norm.
pub fn hessian_l2(f: &Field) -> f64 {
    let dim = f.grid().dim();
    let spectral = f.to_spectral();
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let h = second_derivative(&spectral, i, j).expect("axes in range");
            sum += h.spectral_energy();
        }
    }
    sum.sqrt()
}

fn expect_vector(v: &Field) -> Result<()> {
    let dim = v.grid().dim();
    if v.components() != dim {
        return Err(Error::Shape(format!(
            "expected {dim} components, got {}",
            v.components()
        )));
    }
    Ok(())
}
