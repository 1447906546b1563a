//! Stationary Schrödinger equation `-psi'' + V psi = E psi` at complex energy.
//!
//! The first-order system `(psi, psi')` is advanced with classical RK4 on a
//! symmetric uniform grid. The potential is sampled once at grid points and
//! midpoints, so repeated solves at different energies share the samples.

use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::potential::{PotentialError, PotentialSpec};

/// `|psi|` above which integration stops with [`SchrodingerError::Overflow`].
pub const OVERFLOW_LIMIT: f64 = 1e280;
/// Relative flatness required of the potential at the grid ends.
pub const EPS_ASYM: f64 = 1e-10;
/// Momenta below this are treated as zero in coefficient extraction.
pub const MIN_MOMENTUM: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SchrodingerError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("potential not flat at the grid ends: |V(+-L) - V_asym| = {deviation:e} (allowed {allowed:e}); enlarge L")]
    NotFlat { deviation: f64, allowed: f64 },
    #[error("x = {0} is not a grid point")]
    NotGridPoint(f64),
    #[error("initial data (psi, psi') are both zero")]
    ZeroInitialData,
    #[error("|psi| exceeded {OVERFLOW_LIMIT:e} at x = {x}; rescale or shorten the domain")]
    Overflow { x: f64 },
    #[error("asymptotic momentum {0} too small for coefficient extraction")]
    ZeroMomentum(f64),
    #[error("wavefunction arrays do not match the grid")]
    LengthMismatch,
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Symmetric uniform grid `x_j = -L + j h`, `j = 0..n`, with `n` odd.
///
/// Mirror points are stored exactly: `x(n-1-j) == -x(j)` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self, SchrodingerError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(SchrodingerError::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(SchrodingerError::InvalidGrid(format!(
                "n_points must be odd and >= 3, got {n_points}"
            )));
        }
        Ok(Self {
            half_width,
            n_points,
        })
    }

    /// Grid with step as close to `step` as an odd point count allows.
    pub fn with_step(half_width: f64, step: f64) -> Result<Self, SchrodingerError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(SchrodingerError::InvalidGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        let intervals = (2.0 * half_width / step).round().max(2.0) as usize;
        let intervals = intervals + intervals % 2;
        Self::new(half_width, intervals + 1)
    }

    /// Default grid: `L` from the potential, `h = 1e-3 / max(1, inverse length)`.
    pub fn for_potential(spec: &PotentialSpec) -> Self {
        let step = 1e-3 / spec.inverse_length().max(1.0);
        Self::with_step(spec.natural_half_width(), step).expect("potential half-width is positive")
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Index of `x = 0`.
    pub fn mid(&self) -> usize {
        self.n_points / 2
    }

    pub fn mirror(&self, j: usize) -> usize {
        self.n_points - 1 - j
    }

    pub fn x(&self, j: usize) -> f64 {
        let m = self.mirror(j);
        if j < m {
            -self.half_width + j as f64 * self.step()
        } else if j == m {
            0.0
        } else {
            -self.x(m)
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.x(j))
    }

    /// Index of the grid point equal to `x` up to `1e-9 h`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let h = self.step();
        let t = (x + self.half_width) / h;
        let j = t.round();
        if j < 0.0 || j > (self.n_points - 1) as f64 {
            return None;
        }
        let j = j as usize;
        ((self.x(j) - x).abs() <= 1e-9 * h).then_some(j)
    }

    /// Checks `|V(+-L) - V_asym| < EPS_ASYM * scale`.
    pub fn check_flatness(&self, spec: &PotentialSpec) -> Result<(), SchrodingerError> {
        let asym = spec.asymptote();
        let left = spec.evaluate(-self.half_width)?;
        let right = spec.evaluate(self.half_width)?;
        let deviation = (left - asym).norm().max((right - asym).norm());
        let allowed = EPS_ASYM * spec.magnitude_scale().max(f64::MIN_POSITIVE);
        if deviation > allowed {
            return Err(SchrodingerError::NotFlat { deviation, allowed });
        }
        Ok(())
    }
}

/// Potential values at grid points (even slots) and midpoints (odd slots).
#[derive(Debug, Clone)]
pub struct SampledPotential {
    grid: Grid,
    asymptote: f64,
    values: Vec<Complex64>,
}

impl SampledPotential {
    pub fn new(spec: &PotentialSpec, grid: &Grid) -> Result<Self, SchrodingerError> {
        let n = grid.len();
        let mut values = Vec::with_capacity(2 * n - 1);
        for j in 0..n {
            values.push(spec.evaluate(grid.x(j))?);
            if j + 1 < n {
                values.push(spec.evaluate(0.5 * (grid.x(j) + grid.x(j + 1)))?);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            asymptote: spec.asymptote(),
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn asymptote(&self) -> f64 {
        self.asymptote
    }

    pub fn at_point(&self, j: usize) -> Complex64 {
        self.values[2 * j]
    }

    /// Asymptotic momentum `k = sqrt(E - V_asym)` on the branch `Im k >= 0`.
    pub fn momentum(&self, energy: Complex64) -> Complex64 {
        momentum_for(energy, self.asymptote)
    }

    /// Advances `(psi, psi')` from grid index `from` to `to`, calling `visit`
    /// at every index including both ends.
    pub(crate) fn sweep(
        &self,
        energy: Complex64,
        from: usize,
        to: usize,
        init: (Complex64, Complex64),
        mut visit: impl FnMut(usize, Complex64, Complex64),
    ) -> Result<(Complex64, Complex64), SchrodingerError> {
        let h = self.grid.step();
        let (mut psi, mut dpsi) = init;
        visit(from, psi, dpsi);
        let mut j = from;
        while j != to {
            let (next, step, mid_slot) = if to > j {
                (j + 1, h, 2 * j + 1)
            } else {
                (j - 1, -h, 2 * j - 1)
            };
            (psi, dpsi) = rk4_step(
                psi,
                dpsi,
                self.values[2 * j] - energy,
                self.values[mid_slot] - energy,
                self.values[2 * next] - energy,
                step,
            );
            j = next;
            if !(psi.norm() <= OVERFLOW_LIMIT) {
                return Err(SchrodingerError::Overflow { x: self.grid.x(j) });
            }
            visit(j, psi, dpsi);
        }
        Ok((psi, dpsi))
    }

    /// Like [`sweep`](Self::sweep) but only returns the end values, dividing
    /// by a positive real factor every `every` steps to avoid overflow.
    pub(crate) fn sweep_renormalized(
        &self,
        energy: Complex64,
        from: usize,
        to: usize,
        init: (Complex64, Complex64),
        every: usize,
    ) -> (Complex64, Complex64) {
        let h = self.grid.step();
        let (mut psi, mut dpsi) = init;
        let mut j = from;
        let mut count = 0;
        while j != to {
            let (next, step, mid_slot) = if to > j {
                (j + 1, h, 2 * j + 1)
            } else {
                (j - 1, -h, 2 * j - 1)
            };
            (psi, dpsi) = rk4_step(
                psi,
                dpsi,
                self.values[2 * j] - energy,
                self.values[mid_slot] - energy,
                self.values[2 * next] - energy,
                step,
            );
            j = next;
            count += 1;
            if count % every == 0 {
                let scale = psi.norm().max(dpsi.norm());
                if scale > 0.0 && scale.is_finite() {
                    psi /= scale;
                    dpsi /= scale;
                }
            }
        }
        (psi, dpsi)
    }

    /// Full-grid solution through `(psi, psi')(x_start) = init`.
    pub fn solve(
        &self,
        energy: Complex64,
        start: usize,
        init: (Complex64, Complex64),
        direction: Direction,
    ) -> Result<Wavefunction, SchrodingerError> {
        if init.0 == Complex64::new(0.0, 0.0) && init.1 == Complex64::new(0.0, 0.0) {
            return Err(SchrodingerError::ZeroInitialData);
        }
        let n = self.grid.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut psi = vec![zero; n];
        let mut dpsi = vec![zero; n];
        let mut record = |j: usize, p: Complex64, d: Complex64| {
            psi[j] = p;
            dpsi[j] = d;
        };
        let (first, second) = match direction {
            Direction::Forward => (n - 1, 0),
            Direction::Backward => (0, n - 1),
        };
        self.sweep(energy, start, first, init, &mut record)?;
        self.sweep(energy, start, second, init, &mut record)?;
        Ok(Wavefunction::new(
            self.grid.clone(),
            psi,
            dpsi,
            energy,
            self.asymptote,
        ))
    }

    /// Right-moving and left-moving solutions at the left asymptote.
    pub fn fundamental_pair(
        &self,
        energy: Complex64,
    ) -> Result<(Wavefunction, Wavefunction), SchrodingerError> {
        let k = self.momentum(energy);
        let i = Complex64::i();
        let x0 = -self.grid.half_width();
        let right = (i * k * x0).exp();
        let left = (-i * k * x0).exp();
        let w1 = self.solve(energy, 0, (right, i * k * right), Direction::Forward)?;
        let w2 = self.solve(energy, 0, (left, -i * k * left), Direction::Forward)?;
        Ok((w1, w2))
    }
}

pub(crate) fn momentum_for(energy: Complex64, asymptote: f64) -> Complex64 {
    let k = (energy - asymptote).sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// One RK4 step of `psi' = dpsi, dpsi' = (V - E) psi`, given `V - E` at the
/// start, midpoint and end of the step.
#[inline]
fn rk4_step(
    psi: Complex64,
    dpsi: Complex64,
    q0: Complex64,
    qm: Complex64,
    q1: Complex64,
    h: f64,
) -> (Complex64, Complex64) {
    let half = 0.5 * h;
    let k1p = dpsi;
    let k1d = q0 * psi;
    let k2p = dpsi + half * k1d;
    let k2d = qm * (psi + half * k1p);
    let k3p = dpsi + half * k2d;
    let k3d = qm * (psi + half * k2p);
    let k4p = dpsi + h * k3d;
    let k4d = q1 * (psi + h * k3p);
    let sixth = h / 6.0;
    (
        psi + sixth * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        dpsi + sixth * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// `psi` and `psi'` on a symmetric grid at a fixed complex energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    psi: Vec<Complex64>,
    dpsi: Vec<Complex64>,
    energy: Complex64,
    k: Complex64,
}

impl Wavefunction {
    /// Panics if the arrays do not match the grid length.
    pub fn new(
        grid: Grid,
        psi: Vec<Complex64>,
        dpsi: Vec<Complex64>,
        energy: Complex64,
        asymptote: f64,
    ) -> Self {
        assert_eq!(psi.len(), grid.len(), "psi length must match grid");
        assert_eq!(dpsi.len(), grid.len(), "dpsi length must match grid");
        Self {
            grid,
            psi,
            dpsi,
            energy,
            k: momentum_for(energy, asymptote),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn dpsi(&self) -> &[Complex64] {
        &self.dpsi
    }

    pub fn energy(&self) -> Complex64 {
        self.energy
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    /// Multiplies `psi` and `psi'` by `c`.
    pub fn scaled(mut self, c: Complex64) -> Self {
        self.psi.iter_mut().for_each(|p| *p *= c);
        self.dpsi.iter_mut().for_each(|p| *p *= c);
        self
    }

    /// `a * self + b * other`; both must share grid and energy.
    pub fn combine(
        &self,
        a: Complex64,
        other: &Wavefunction,
        b: Complex64,
    ) -> Result<Wavefunction, SchrodingerError> {
        if self.grid != other.grid {
            return Err(SchrodingerError::LengthMismatch);
        }
        let psi = self
            .psi
            .iter()
            .zip(&other.psi)
            .map(|(p, q)| a * p + b * q)
            .collect();
        let dpsi = self
            .dpsi
            .iter()
            .zip(&other.dpsi)
            .map(|(p, q)| a * p + b * q)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            psi,
            dpsi,
            energy: self.energy,
            k: self.k,
        })
    }

    /// `psi_1 psi_2' - psi_2 psi_1'` at every grid point.
    pub fn wronskian(&self, other: &Wavefunction) -> Result<Vec<Complex64>, SchrodingerError> {
        if self.grid != other.grid {
            return Err(SchrodingerError::LengthMismatch);
        }
        Ok((0..self.grid.len())
            .map(|j| self.psi[j] * other.dpsi[j] - other.psi[j] * self.dpsi[j])
            .collect())
    }

    /// Plane-wave amplitudes `(c+, c-)` at grid point `x`.
    pub fn extract_coefficients(
        &self,
        x: f64,
        k: Complex64,
    ) -> Result<(Complex64, Complex64), SchrodingerError> {
        let j = self
            .grid
            .index_of(x)
            .ok_or(SchrodingerError::NotGridPoint(x))?;
        plane_wave_coefficients(self.psi[j], self.dpsi[j], self.grid.x(j), k)
    }

    /// Writes `x,re_psi,im_psi,re_dpsi,im_dpsi`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "re_psi", "im_psi", "re_dpsi", "im_dpsi"])?;
        for j in 0..self.grid.len() {
            let (p, d) = (self.psi[j], self.dpsi[j]);
            w.write_record([
                self.grid.x(j).to_string(),
                p.re.to_string(),
                p.im.to_string(),
                d.re.to_string(),
                d.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves `psi = c+ e^{ikx} + c- e^{-ikx}` locally from `(psi, psi')` at `x`.
pub fn plane_wave_coefficients(
    psi: Complex64,
    dpsi: Complex64,
    x: f64,
    k: Complex64,
) -> Result<(Complex64, Complex64), SchrodingerError> {
    if k.norm() < MIN_MOMENTUM {
        return Err(SchrodingerError::ZeroMomentum(k.norm()));
    }
    let ik = Complex64::i() * k;
    let plus = (-ik * x).exp() * (dpsi + ik * psi) / (2.0 * ik);
    let minus = (ik * x).exp() * (ik * psi - dpsi) / (2.0 * ik);
    Ok((plus, minus))
}

/// Full-grid solution of `-psi'' + V psi = E psi` with `(psi, psi')(x0) = init`.
///
/// The solution always spans the whole grid; `direction` selects which side
/// of `x0` is swept first.
pub fn integrate(
    spec: &PotentialSpec,
    energy: Complex64,
    grid: &Grid,
    x0: f64,
    init: (Complex64, Complex64),
    direction: Direction,
) -> Result<Wavefunction, SchrodingerError> {
    let start = grid
        .index_of(x0)
        .ok_or(SchrodingerError::NotGridPoint(x0))?;
    SampledPotential::new(spec, grid)?.solve(energy, start, init, direction)
}

/// Solutions launched at `-L` as a pure right-mover and a pure left-mover.
pub fn fundamental_pair(
    spec: &PotentialSpec,
    energy: Complex64,
    grid: &Grid,
) -> Result<(Wavefunction, Wavefunction), SchrodingerError> {
    SampledPotential::new(spec, grid)?.fundamental_pair(energy)
}

/// Local energy `(-psi'' + V psi) / psi` with a fourth-order stencil for
/// `psi''`; entries closer than two points to either end are skipped.
pub fn local_energy(
    spec: &PotentialSpec,
    w: &Wavefunction,
) -> Result<Vec<Complex64>, SchrodingerError> {
    let grid = w.grid();
    let h2 = grid.step() * grid.step();
    let psi = w.psi();
    let mut out = Vec::with_capacity(grid.len().saturating_sub(4));
    for j in 2..grid.len() - 2 {
        let d2 = (-psi[j + 2] + 16.0 * psi[j + 1] - 30.0 * psi[j] + 16.0 * psi[j - 1] - psi[j - 2])
            / (12.0 * h2);
        out.push((-d2 + spec.evaluate(grid.x(j))? * psi[j]) / psi[j]);
    }
    Ok(out)
}
