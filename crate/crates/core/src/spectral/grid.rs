use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Uniform periodic grid on the torus `[0, length)^dim`.
///
/// Samples are stored row-major with the last axis fastest. Spectral
/// coefficients use the same layout; index `i` along an axis carries the
/// signed integer mode `i` for `i <= res/2` and `i - res` above that.
///
/// The forward transform divides by the number of points, so the mode-zero
/// coefficient is the mean of the samples.
pub struct Grid {
    dim: usize,
    res: usize,
    length: f64,
    /// Signed integer mode for each 1-D index.
    modes: Vec<i64>,
    /// Per-axis derivative wavenumber at each flat index, Nyquist zeroed.
    kderiv: Vec<Vec<f64>>,
    /// Sum of squared derivative wavenumbers at each flat index.
    ksq: Vec<f64>,
    /// 2/3-rule survivors.
    keep: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fine: OnceLock<Arc<Grid>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("res", &self.res)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.res == other.res && self.length == other.length
    }
}

impl Grid {
    pub fn new(dim: usize, res: usize, length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if res < 8 || !res.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "res must be a power of two >= 8, got {res}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive, got {length}"
            )));
        }

        let half = res as i64 / 2;
        let modes: Vec<i64> = (0..res as i64)
            .map(|i| if i <= half { i } else { i - res as i64 })
            .collect();
        let scale = 2.0 * PI / length;
        let deriv_1d: Vec<f64> = modes
            .iter()
            .map(|&k| if k == half { 0.0 } else { k as f64 * scale })
            .collect();

        let total = res.pow(dim as u32);
        let mut kderiv = vec![vec![0.0; total]; dim];
        let mut ksq = vec![0.0; total];
        let mut keep = vec![true; total];
        for flat in 0..total {
            for (axis, kd) in kderiv.iter_mut().enumerate() {
                let i = index_along(flat, axis, dim, res);
                kd[flat] = deriv_1d[i];
                ksq[flat] += deriv_1d[i] * deriv_1d[i];
                if 3 * modes[i].unsigned_abs() as usize > res {
                    keep[flat] = false;
                }
            }
        }

        let mut planner = FftPlanner::new();
        Ok(Self {
            dim,
            res,
            length,
            modes,
            kderiv,
            ksq,
            keep,
            forward: planner.plan_fft_forward(res),
            inverse: planner.plan_fft_inverse(res),
            fine: OnceLock::new(),
        })
    }

    /// Shorthand for `Arc::new(Grid::new(..)?)`.
    pub fn shared(dim: usize, res: usize, length: f64) -> Result<Arc<Self>> {
        Self::new(dim, res, length).map(Arc::new)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid points, `res^dim`.
    pub fn len(&self) -> usize {
        self.ksq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.res as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the whole torus cell.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Multi-index of a flat index (unused trailing axes are zero).
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for (axis, slot) in idx.iter_mut().enumerate().take(self.dim) {
            *slot = index_along(flat, axis, self.dim, self.res);
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .take(self.dim)
            .fold(0, |acc, &i| acc * self.res + i)
    }

    /// Physical coordinates of a grid point.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.multi_index(flat);
        [idx[0] as f64 * h, idx[1] as f64 * h, idx[2] as f64 * h]
    }

    /// Signed integer mode numbers of a flat spectral index.
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let idx = self.multi_index(flat);
        let mut k = [0; 3];
        for axis in 0..self.dim {
            k[axis] = self.modes[idx[axis]];
        }
        k
    }

    /// Flat spectral index holding the signed mode `k` (wrapped modulo res).
    pub fn mode_index(&self, k: &[i64]) -> usize {
        let r = self.res as i64;
        k.iter()
            .take(self.dim)
            .fold(0, |acc, &m| acc * self.res + m.rem_euclid(r) as usize)
    }

    /// Derivative wavenumbers along `axis`, one per flat index.
    pub fn kderiv(&self, axis: usize) -> &[f64] {
        &self.kderiv[axis]
    }

    /// `|k|²` per flat index, consistent with [`Grid::kderiv`].
    pub fn ksq(&self) -> &[f64] {
        &self.ksq
    }

    /// Whether a flat spectral index survives the 2/3 rule.
    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    /// Largest integer mode magnitude kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.res / 3
    }

    /// Grid with twice the resolution, used for oversampled maxima.
    pub(crate) fn refined(&self) -> &Arc<Grid> {
        self.fine.get_or_init(|| {
            Arc::new(
                Grid::new(self.dim, 2 * self.res, self.length)
                    .expect("doubling a valid grid stays valid"),
            )
        })
    }

    /// In-place forward transform; output coefficients are normalized by `1/len`.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let norm = 1.0 / self.len() as f64;
        for c in data.iter_mut() {
            *c *= norm;
        }
    }

    /// In-place inverse transform, exact inverse of [`Grid::forward_in_place`].
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    pub fn to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// `i k_axis f̂`.
    pub fn derivative(&self, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
        coeffs
            .iter()
            .zip(&self.kderiv[axis])
            .map(|(c, &k)| Complex64::new(-k * c.im, k * c.re))
            .collect()
    }

    /// `-|k|² f̂`.
    pub fn laplacian_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        coeffs
            .iter()
            .zip(&self.ksq)
            .map(|(c, &k2)| -k2 * c)
            .collect()
    }

    pub fn dealias_in_place(&self, coeffs: &mut [Complex64]) {
        for (c, &keep) in coeffs.iter_mut().zip(&self.keep) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Removes the gradient part of a vector field given by its components'
    /// coefficients. Modes with `|k|² = 0` pass through unchanged.
    pub fn project_in_place(&self, comps: &mut [Vec<Complex64>]) {
        debug_assert_eq!(comps.len(), self.dim);
        for p in 0..self.len() {
            let k2 = self.ksq[p];
            if k2 == 0.0 {
                continue;
            }
            let mut kdotv = Complex64::new(0.0, 0.0);
            for (j, comp) in comps.iter().enumerate() {
                kdotv += self.kderiv[j][p] * comp[p];
            }
            let factor = kdotv / k2;
            for (j, comp) in comps.iter_mut().enumerate() {
                comp[p] -= self.kderiv[j][p] * factor;
            }
        }
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        let n = self.res;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // Last axis is contiguous: rustfft handles the batch directly.
        fft.process_with_scratch(data, &mut scratch);

        let mut block: Vec<Complex64> = Vec::new();
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let span = stride * n;
            block.resize(span, Complex64::new(0.0, 0.0));
            for chunk in data.chunks_exact_mut(span) {
                // chunk is laid out [j][inner]; transpose to [inner][j].
                for j in 0..n {
                    for inner in 0..stride {
                        block[inner * n + j] = chunk[j * stride + inner];
                    }
                }
                fft.process_with_scratch(&mut block, &mut scratch);
                for j in 0..n {
                    for inner in 0..stride {
                        chunk[j * stride + inner] = block[inner * n + j];
                    }
                }
            }
        }
    }
}

fn index_along(flat: usize, axis: usize, dim: usize, res: usize) -> usize {
    let stride = res.pow((dim - 1 - axis) as u32);
    (flat / stride) % res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(1, 16, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(2, 4, 1.0).is_err());
        assert!(Grid::new(2, 24, 1.0).is_err());
        assert!(Grid::new(2, 16, 0.0).is_err());
        assert!(Grid::new(2, 16, 2.0 * PI).is_ok());
    }

    #[test]
    fn wavenumbers_are_scaled_integers_with_zero_nyquist() {
        let g = Grid::new(2, 8, 4.0 * PI).unwrap();
        // scale = 2π / 4π = 1/2
        let expected = [0.0, 0.5, 1.0, 1.5, 0.0, -1.5, -1.0, -0.5];
        for (i, &e) in expected.iter().enumerate() {
            let flat = g.flat_index(&[0, i]);
            assert_eq!(g.kderiv(1)[flat], e);
            let flat = g.flat_index(&[i, 0]);
            assert_eq!(g.kderiv(0)[flat], e);
        }
        assert_eq!(g.mode(g.flat_index(&[4, 5])), [4, -3, 0]);
    }

    #[test]
    fn mode_index_wraps() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let flat = g.mode_index(&[-1, 2, -4]);
        assert_eq!(g.multi_index(flat), [7, 2, 4]);
        assert_eq!(g.mode(flat), [-1, 2, 4]);
    }

    #[test]
    fn forward_inverse_round_trip_3d() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let values: Vec<f64> = (0..g.len()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let back = g.to_physical(&g.to_spectral(&values));
        for (a, b) in values.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_cutoff_matches_two_thirds() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        assert_eq!(g.dealias_cutoff(), 5);
        let kept = (0..16)
            .filter(|&i| g.dealias_mask()[g.flat_index(&[0, i])])
            .count();
        assert_eq!(kept, 11);
    }
}
