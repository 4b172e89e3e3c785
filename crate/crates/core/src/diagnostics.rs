//! Norms and functionals tracked along a run: the blow-up monitor, the
//! controlled norms `‖ω‖_{L²}` and `‖∇²d‖_{L²}`, the energy law and the
//! fitted Gronwall envelope.
//!
//! Integrals are collocation sums over one torus cell. `L∞` norms are
//! maxima over collocation points unless oversampling is requested.

use crate::spectral::field::pointwise_max;
use crate::spectral::{curl, Field};
use crate::state::{constraint_residual, FluidState, PhysicsParams};
use crate::{Error, Result};

/// Relative slack below which the controlled norms are not considered to
/// have grown when fitting the Gronwall constant.
pub const ENVELOPE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub u_l2: f64,
    pub grad_d_l2: f64,
    pub omega_l2: f64,
    pub omega_linf: f64,
    pub grad_d_linf: f64,
    /// `‖∇²d‖_{L²}`, evaluated as `‖Δd‖_{L²}`.
    pub hess_d_l2: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub monitor_integrand: f64,
    pub monitor_accum: f64,
    pub sphere_norm_err: f64,
    pub sphere_identity_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinfMode {
    #[default]
    Collocation,
    /// Zero-padded evaluation on a grid twice as fine.
    Oversampled,
}

impl DiagnosticsRecord {
    /// Evaluates every field-derived quantity of `s`. `monitor_accum` is left
    /// at zero; the caller owns the running integral.
    pub fn evaluate(s: &FluidState, params: &PhysicsParams, linf: LinfMode) -> Self {
        let grid = s.grid();
        let dv = grid.cell_volume();
        let fields = Derived::new(s);

        let grad_d_linf = linf_of(&fields.grad_d, linf, s);
        let omega_linf = linf_of(&fields.omega, linf, s);
        let omega_l2 = l2(&fields.omega, dv);
        let (energy, dissipation) = fields.energy_and_dissipation(s, params.nu(), dv);
        let (sphere_norm_err, sphere_identity_err) = constraint_residual(s);

        Self {
            t: s.t(),
            u_l2: l2(s.u_values(), dv),
            grad_d_l2: l2(&fields.grad_d, dv),
            omega_l2,
            omega_linf,
            grad_d_linf,
            hess_d_l2: l2(&fields.lap_d, dv),
            energy,
            dissipation,
            monitor_integrand: integrand(grid.dim(), omega_linf, grad_d_linf),
            monitor_accum: 0.0,
            sphere_norm_err,
            sphere_identity_err,
        }
    }

    /// `‖ω‖²_{L²} + ‖Δd‖²_{L²}`, the quantity bounded by the Gronwall envelope.
    pub fn controlled_sq(&self) -> f64 {
        self.omega_l2 * self.omega_l2 + self.hess_d_l2 * self.hess_d_l2
    }
}

/// Physical-space derivative fields shared by several diagnostics.
struct Derived {
    /// `∂_i d_m`, flattened as `i * 3 + m`.
    grad_d: Vec<Vec<f64>>,
    lap_d: Vec<Vec<f64>>,
    /// `∂_i u_j`, flattened.
    grad_u: Vec<Vec<f64>>,
    omega: Vec<Vec<f64>>,
}

impl Derived {
    fn new(s: &FluidState) -> Self {
        let grid = s.grid();
        let dh: Vec<_> = s.d_values().iter().map(|c| grid.to_spectral(c)).collect();
        let uh: Vec<_> = s.u_values().iter().map(|c| grid.to_spectral(c)).collect();
        let mut grad_d = Vec::new();
        let mut grad_u = Vec::new();
        for i in 0..grid.dim() {
            grad_d.extend(dh.iter().map(|c| grid.to_physical(&grid.derivative(c, i))));
            grad_u.extend(uh.iter().map(|c| grid.to_physical(&grid.derivative(c, i))));
        }
        let lap_d = dh
            .iter()
            .map(|c| grid.to_physical(&grid.laplacian_coeffs(c)))
            .collect();
        let omega = curl(s.u())
            .expect("velocity has dim components")
            .into_values();
        Self {
            grad_d,
            lap_d,
            grad_u,
            omega,
        }
    }

    fn energy_and_dissipation(&self, s: &FluidState, nu: f64, dv: f64) -> (f64, f64) {
        let d = s.d_values();
        let n = s.grid().len();
        let kinetic: f64 = s.u_values().iter().flatten().map(|v| v * v).sum();
        let elastic: f64 = self.grad_d.iter().flatten().map(|v| v * v).sum();
        let viscous: f64 = self.grad_u.iter().flatten().map(|v| v * v).sum();
        let mut tension = 0.0;
        for p in 0..n {
            let grad_sq: f64 = self.grad_d.iter().map(|g| g[p] * g[p]).sum();
            for m in 0..3 {
                let r = self.lap_d[m][p] + grad_sq * d[m][p];
                tension += r * r;
            }
        }
        (
            (kinetic + elastic) * dv,
            2.0 * (nu * viscous + tension) * dv,
        )
    }
}

fn l2(comps: &[Vec<f64>], dv: f64) -> f64 {
    (comps.iter().flatten().map(|v| v * v).sum::<f64>() * dv).sqrt()
}

fn linf_of(comps: &[Vec<f64>], mode: LinfMode, s: &FluidState) -> f64 {
    match mode {
        LinfMode::Collocation => pointwise_max(comps),
        LinfMode::Oversampled => {
            let f = Field::from_physical(s.grid().clone(), comps.to_vec()).expect("grid shape");
            f.oversampled_max_norm()
        }
    }
}

fn integrand(dim: usize, omega_linf: f64, grad_d_linf: f64) -> f64 {
    let elastic = grad_d_linf * grad_d_linf;
    if dim == 3 {
        omega_linf + elastic
    } else {
        elastic
    }
}

/// `‖ω‖∞ + ‖∇d‖²∞` in 3D and `‖∇d‖²∞` in 2D, with collocation maxima.
pub fn blowup_integrand(s: &FluidState) -> f64 {
    let fields = Derived::new(s);
    integrand(
        s.dim(),
        pointwise_max(&fields.omega),
        pointwise_max(&fields.grad_d),
    )
}

/// One trapezoidal step of the running monitor integral.
pub fn accumulate_monitor(prev: &DiagnosticsRecord, curr_integrand: f64, dt: f64) -> Result<f64> {
    if dt < 0.0 || dt.is_nan() {
        return Err(Error::InvalidTimeStep(dt));
    }
    Ok(prev.monitor_accum + 0.5 * dt * (prev.monitor_integrand + curr_integrand))
}

/// `(E, D) = (∫|u|² + |∇d|², 2∫ν|∇u|² + |Δd + |∇d|²d|²)`.
pub fn energy_and_dissipation(s: &FluidState, params: &PhysicsParams) -> (f64, f64) {
    Derived::new(s).energy_and_dissipation(s, params.nu(), s.grid().cell_volume())
}

/// `max_t |E(t) + ∫₀ᵗ D − E(0)| / max(E(0), 1)`, with `∫D` by trapezoid.
pub fn energy_residual(history: &[DiagnosticsRecord]) -> Result<f64> {
    let first = history.first().ok_or(Error::EmptyHistory)?;
    check_ordered(history)?;
    let scale = first.energy.max(1.0);
    let mut dissipated = 0.0;
    let mut worst: f64 = 0.0;
    for pair in history.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        dissipated += 0.5 * (b.t - a.t) * (a.dissipation + b.dissipation);
        worst = worst.max((b.energy + dissipated - first.energy).abs() / scale);
    }
    Ok(worst)
}

/// `(‖ω‖_{L²}, ‖∇²d‖_{L²})`, the latter via `‖Δd‖_{L²}`.
pub fn controlled_norms(s: &FluidState) -> (f64, f64) {
    let dv = s.grid().cell_volume();
    let fields = Derived::new(s);
    (l2(&fields.omega, dv), l2(&fields.lap_d, dv))
}

/// Smallest `C ≥ 0` with `‖ω(t)‖² + ‖Δd(t)‖² ≤ (‖ω₀‖² + ‖Δd₀‖²) e^{C B(t)}`
/// over every record, where `B` is the accumulated monitor.
pub fn gronwall_envelope(history: &[DiagnosticsRecord]) -> Result<f64> {
    let first = history.first().ok_or(Error::EmptyHistory)?;
    check_ordered(history)?;
    let base = first.controlled_sq();
    let mut c: f64 = 0.0;
    for r in history {
        let level = r.controlled_sq();
        if level <= base * (1.0 + ENVELOPE_SLACK) {
            continue;
        }
        if r.monitor_accum > 0.0 && base > 0.0 {
            c = c.max((level / base).ln() / r.monitor_accum);
        } else {
            return Err(Error::EnvelopeUndefined { t: r.t });
        }
    }
    Ok(c)
}

fn check_ordered(history: &[DiagnosticsRecord]) -> Result<()> {
    for (i, pair) in history.windows(2).enumerate() {
        if !(pair[1].t >= pair[0].t) {
            return Err(Error::UnorderedHistory(i + 1));
        }
    }
    Ok(())
}
