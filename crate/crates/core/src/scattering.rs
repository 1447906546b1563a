//! Transfer and scattering matrices, Scarf-II closed forms, and numerical
//! defects of the matrix identities proposed for PT-symmetric scattering.
//!
//! Asymptotics: `psi -> A e^{ikx} + B e^{-ikx}` on the left and
//! `C e^{ikx} + D e^{-ikx}` on the right. `M (A, B) = (C, D)` and
//! `S (A, D) = (B, C)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::exec::{map_ordered, Execution};
use crate::potential::{PotentialSpec, Scarf2};
use crate::schrodinger::{
    plane_wave_coefficients, Grid, SampledPotential, SchrodingerError, Wavefunction,
};
use crate::specfun::{gamma_ratio, SpecFunError};

pub type Mat2 = Matrix2<Complex64>;

/// `|M22|` below which S is reported as singular.
pub const SINGULARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ScatteringError {
    #[error("momentum must be positive and finite, got {0}")]
    InvalidMomentum(f64),
    #[error("spectral singularity at k = {k}: |M22| = {m22:e}")]
    SpectralSingularity { k: f64, m22: f64 },
    #[error("closed-form amplitude at a gamma pole: {0}")]
    Pole(#[from] SpecFunError),
    #[error("flux-deviation denominator vanishes at k = {k}")]
    DegenerateDenominator { k: f64 },
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// `diag(1, -1)`.
pub fn sigma3() -> Mat2 {
    Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `[[0, 1], [1, 0]]`.
pub fn sigma1() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// `[[0, -1], [1, 0]]`.
pub fn j_metric() -> Mat2 {
    Mat2::new(c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Largest entry modulus.
pub fn max_norm(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Amplitudes `A, B` (left) and `C, D` (right) of the asymptotic plane waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficients {
    pub cf_a: Complex64,
    pub cf_b: Complex64,
    pub cf_c: Complex64,
    pub cf_d: Complex64,
}

impl AsymptoticCoefficients {
    /// Physical solution for unit incidence from the left: `(1, r_L, t, 0)`.
    pub fn left_incidence(s: &ScatteringMatrix) -> Self {
        Self {
            cf_a: c(1.0, 0.0),
            cf_b: s.reflection_left(),
            cf_c: s.transmission_left(),
            cf_d: c(0.0, 0.0),
        }
    }

    /// `|(A B* - B A*) - (C D* - D C*)|`, the left/right cross-term balance.
    pub fn cross_flux_residual(&self) -> f64 {
        let left = self.cf_a * self.cf_b.conj() - self.cf_b * self.cf_a.conj();
        let right = self.cf_c * self.cf_d.conj() - self.cf_d * self.cf_c.conj();
        (left - right).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: Mat2,
    pub k: f64,
}

impl TransferMatrix {
    pub fn det_defect(&self) -> f64 {
        (self.m.determinant() - 1.0).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `(A, D) -> (B, C)`.
    InOut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub s: Mat2,
    pub k: f64,
    pub convention: Convention,
}

impl ScatteringMatrix {
    pub fn reflection_left(&self) -> Complex64 {
        self.s[(0, 0)]
    }
    pub fn transmission_right(&self) -> Complex64 {
        self.s[(0, 1)]
    }
    pub fn transmission_left(&self) -> Complex64 {
        self.s[(1, 0)]
    }
    pub fn reflection_right(&self) -> Complex64 {
        self.s[(1, 1)]
    }

    /// `|r_L|^2 + |t|^2 - 1` for incidence from the left.
    pub fn flux_deviation(&self) -> f64 {
        self.reflection_left().norm_sqr() + self.transmission_left().norm_sqr() - 1.0
    }
}

/// Sampled potential plus a flatness-checked grid, reused across momenta.
#[derive(Debug, Clone)]
pub struct ScatteringSetup {
    sampled: SampledPotential,
}

impl ScatteringSetup {
    pub fn new(spec: &PotentialSpec, grid: &Grid) -> Result<Self, ScatteringError> {
        grid.check_flatness(spec)?;
        Ok(Self {
            sampled: SampledPotential::new(spec, grid)?,
        })
    }

    fn energy(&self, k: f64) -> Result<Complex64, ScatteringError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(ScatteringError::InvalidMomentum(k));
        }
        Ok(c(self.sampled.asymptote() + k * k, 0.0))
    }

    pub fn transfer_matrix(&self, k: f64) -> Result<TransferMatrix, ScatteringError> {
        let (w1, w2) = self.sampled.fundamental_pair(self.energy(k)?)?;
        let grid = self.sampled.grid();
        let last = grid.len() - 1;
        let x = grid.x(last);
        let kc = c(k, 0.0);
        let (m11, m21) = plane_wave_coefficients(w1.psi()[last], w1.dpsi()[last], x, kc)?;
        let (m12, m22) = plane_wave_coefficients(w2.psi()[last], w2.dpsi()[last], x, kc)?;
        Ok(TransferMatrix {
            m: Mat2::new(m11, m12, m21, m22),
            k,
        })
    }

    /// Left-incidence scattering state `e^{ikx} + r_L e^{-ikx}` (left),
    /// `t e^{ikx}` (right).
    pub fn scattering_state(&self, k: f64) -> Result<Wavefunction, ScatteringError> {
        let (w1, w2) = self.sampled.fundamental_pair(self.energy(k)?)?;
        let grid = self.sampled.grid();
        let last = grid.len() - 1;
        let x = grid.x(last);
        let kc = c(k, 0.0);
        let (m11, m21) = plane_wave_coefficients(w1.psi()[last], w1.dpsi()[last], x, kc)?;
        let (m12, m22) = plane_wave_coefficients(w2.psi()[last], w2.dpsi()[last], x, kc)?;
        let tm = TransferMatrix {
            m: Mat2::new(m11, m12, m21, m22),
            k,
        };
        let s = s_from_m(&tm)?;
        Ok(w1.combine(c(1.0, 0.0), &w2, s.reflection_left())?)
    }
}

pub fn transfer_matrix(
    spec: &PotentialSpec,
    k: f64,
    grid: &Grid,
) -> Result<TransferMatrix, ScatteringError> {
    ScatteringSetup::new(spec, grid)?.transfer_matrix(k)
}

pub fn scattering_state(
    spec: &PotentialSpec,
    k: f64,
    grid: &Grid,
) -> Result<Wavefunction, ScatteringError> {
    ScatteringSetup::new(spec, grid)?.scattering_state(k)
}

/// `S = [[-M21, 1], [det M, M12]] / M22`.
pub fn s_from_m(tm: &TransferMatrix) -> Result<ScatteringMatrix, ScatteringError> {
    let m = &tm.m;
    let m22 = m[(1, 1)];
    if m22.norm() < SINGULARITY_TOLERANCE {
        return Err(ScatteringError::SpectralSingularity {
            k: tm.k,
            m22: m22.norm(),
        });
    }
    let s = Mat2::new(-m[(1, 0)], c(1.0, 0.0), m.determinant(), m[(0, 1)]) / m22;
    Ok(ScatteringMatrix {
        s,
        k: tm.k,
        convention: Convention::InOut,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReflectionVariant {
    /// `sinh(pi a / alpha)` in the second bracket term, as printed.
    AsPrinted,
    /// `sin(pi a / alpha)` in the second bracket term.
    SinCorrected,
}

impl ReflectionVariant {
    pub const ALL: [ReflectionVariant; 2] = [
        ReflectionVariant::AsPrinted,
        ReflectionVariant::SinCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReflectionVariant::AsPrinted => "as-printed",
            ReflectionVariant::SinCorrected => "sin-corrected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticAmplitudes {
    pub t: Complex64,
    pub r: Complex64,
    pub variant: ReflectionVariant,
}

/// Closed-form Scarf-II transmission amplitude at (possibly complex) `k`:
///
/// `T = G(-a-ik) G(1+a-ik) G(1/2-b-ik) G(1/2+b-ik) / [G(-ik) G(1-ik) G(1/2-ik)^2]`,
/// all arguments divided by alpha.
pub fn scarf2_transmission(p: &Scarf2, k: Complex64) -> Result<Complex64, ScatteringError> {
    transmission_with_denominator(p, k, -1.0)
}

/// Same product with `G(1+ik)` in place of `G(1-ik)` in the denominator.
pub fn scarf2_transmission_as_printed(
    p: &Scarf2,
    k: Complex64,
) -> Result<Complex64, ScatteringError> {
    transmission_with_denominator(p, k, 1.0)
}

fn transmission_with_denominator(
    p: &Scarf2,
    k: Complex64,
    sign: f64,
) -> Result<Complex64, ScatteringError> {
    let a = p.a_pot / p.alpha;
    let b = p.b_pot / p.alpha;
    let ik = Complex64::i() * k / p.alpha;
    let one = c(1.0, 0.0);
    let half = c(0.5, 0.0);
    let ratio = gamma_ratio(
        &[-a - ik, one + a - ik, half - b - ik, half + b - ik],
        &[-ik, one + sign * ik, half - ik, half - ik],
    )?;
    Ok(ratio.value)
}

/// Closed-form `T` and left-incidence `R = i T [cos(pi a) sin(pi b)/cosh(pi k) + f(pi a) cos(pi b)/sinh(pi k)]`
/// (arguments over alpha), with `f = sinh` or `sin` per `variant`.
pub fn scarf2_analytic_amplitudes(
    p: &Scarf2,
    k: f64,
    variant: ReflectionVariant,
) -> Result<AnalyticAmplitudes, ScatteringError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(ScatteringError::InvalidMomentum(k));
    }
    let t = scarf2_transmission(p, c(k, 0.0))?;
    let pa = PI * p.a_pot / p.alpha;
    let pb = PI * p.b_pot / p.alpha;
    let pk = PI * k / p.alpha;
    let f = match variant {
        ReflectionVariant::AsPrinted => pa.sinh(),
        ReflectionVariant::SinCorrected => pa.sin(),
    };
    let bracket = pa.cos() * pb.sin() / pk.cosh() + f * pb.cos() / pk.sinh();
    Ok(AnalyticAmplitudes {
        t,
        r: Complex64::i() * t * bracket,
        variant,
    })
}

/// Closed-form non-conservation term `|R|^2 + |T|^2 - 1` as published for
/// Scarf-II, evaluated after dividing numerator and denominator by
/// `sinh^2 cosh^2 (pi k / alpha)` so large `k` does not overflow.
pub fn flux_deviation_analytic(p: &Scarf2, k: f64) -> Result<f64, ScatteringError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(ScatteringError::InvalidMomentum(k));
    }
    let pa = PI * p.a_pot / p.alpha;
    let pb = PI * p.b_pot / p.alpha;
    let pk = PI * k / p.alpha;
    let (inv_s, inv_c) = (1.0 / pk.sinh(), 1.0 / pk.cosh());
    let cos2a_sin2b = (pa.cos() * pb.sin()).powi(2);
    // sinh(2x) / (sinh^2 x cosh^2 x) = 2 / (sinh x cosh x)
    let numerator = 2.0 * cos2a_sin2b * inv_c * inv_c
        + 2.0 * (2.0 * pa).sin() * (2.0 * pb).sin() * inv_s * inv_c;
    let denominator = 1.0 + (pa.sin() * pb.cos() * inv_s).powi(2) - cos2a_sin2b * inv_c * inv_c;
    if !(denominator.abs() > 1e-300) || !numerator.is_finite() {
        return Err(ScatteringError::DegenerateDenominator { k });
    }
    Ok(numerator / denominator)
}

/// Metric `eta` in the pseudo-unitarity test `S^dagger eta S = eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedMetric {
    pub name: String,
    pub eta: Mat2,
}

impl NamedMetric {
    pub fn new(name: impl Into<String>, eta: Mat2) -> Self {
        Self {
            name: name.into(),
            eta,
        }
    }

    /// `J = [[0,-1],[1,0]]` and `sigma1 = [[0,1],[1,0]]`.
    pub fn defaults() -> Vec<Self> {
        vec![Self::new("J", j_metric()), Self::new("sigma1", sigma1())]
    }
}

pub mod defect {
    //! Report keys.
    pub const UNITARITY: &str = "unitarity";
    pub const HERMITICITY: &str = "hermiticity";
    /// `||M^dagger sigma3 M - sigma3||`.
    pub const SIGMA3_PSEUDO_UNITARITY: &str = "eq8";
    /// Cross-term flux balance on the left-incidence solution.
    pub const CROSS_FLUX: &str = "eq9";
    /// `||M^dagger J M - J||`.
    pub const J_PSEUDO_UNITARITY: &str = "eq10";
    /// Prefix for `||S^dagger eta S - eta||` keys.
    pub const METRIC_PREFIX: &str = "eq13_";
    pub const PT_CLOSURE: &str = "ptM";
    pub const SYMMETRY: &str = "symmetry";
    pub const DETERMINANT: &str = "det";
    pub const DUALITY: &str = "duality";
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub k: f64,
    pub transfer: TransferMatrix,
    pub scattering: ScatteringMatrix,
    /// Max-entry norms of each identity's violation, keyed by [`defect`] names.
    pub defects: BTreeMap<String, f64>,
}

/// Measures every matrix identity at one momentum.
pub fn identity_defects_from(
    tm: &TransferMatrix,
    metrics: &[NamedMetric],
) -> Result<IdentityReport, ScatteringError> {
    let sm = s_from_m(tm)?;
    let m = &tm.m;
    let s = &sm.s;
    let s_adj = s.adjoint();
    let mut defects = BTreeMap::new();
    let mut put = |key: &str, value: f64| {
        defects.insert(key.to_string(), value);
    };
    put(defect::UNITARITY, max_norm(&(s_adj * s - identity())));
    put(defect::HERMITICITY, max_norm(&(s - s_adj)));
    put(
        defect::SIGMA3_PSEUDO_UNITARITY,
        max_norm(&(m.adjoint() * sigma3() * m - sigma3())),
    );
    put(
        defect::CROSS_FLUX,
        AsymptoticCoefficients::left_incidence(&sm).cross_flux_residual(),
    );
    put(
        defect::J_PSEUDO_UNITARITY,
        max_norm(&(m.adjoint() * j_metric() * m - j_metric())),
    );
    for metric in metrics {
        let key = format!("{}{}", defect::METRIC_PREFIX, metric.name);
        put(&key, max_norm(&(s_adj * metric.eta * s - metric.eta)));
    }
    put(
        defect::PT_CLOSURE,
        max_norm(&(m.map(|z| z.conj()) * m - identity())),
    );
    put(defect::SYMMETRY, max_norm(&(s - s.transpose())));
    put(defect::DETERMINANT, tm.det_defect());
    Ok(IdentityReport {
        k: tm.k,
        transfer: *tm,
        scattering: sm,
        defects,
    })
}

pub fn identity_defects(
    spec: &PotentialSpec,
    k: f64,
    grid: &Grid,
    metrics: &[NamedMetric],
) -> Result<IdentityReport, ScatteringError> {
    identity_defects_from(&transfer_matrix(spec, k, grid)?, metrics)
}

/// `||S(V)^dagger S(V_even - i V_odd) - I||`.
pub fn duality_defect(spec: &PotentialSpec, k: f64, grid: &Grid) -> Result<f64, ScatteringError> {
    let s = s_from_m(&transfer_matrix(spec, k, grid)?)?;
    let s_flip = s_from_m(&transfer_matrix(&spec.flip_odd(), k, grid)?)?;
    Ok(max_norm(&(s.s.adjoint() * s_flip.s - identity())))
}

/// Identity reports (with duality) for many momenta, sorted by `k`.
pub fn identity_sweep(
    spec: &PotentialSpec,
    ks: &[f64],
    grid: &Grid,
    metrics: &[NamedMetric],
    exec: Execution,
) -> Result<Vec<(f64, Result<IdentityReport, ScatteringError>)>, ScatteringError> {
    let setup = ScatteringSetup::new(spec, grid)?;
    let flipped = ScatteringSetup::new(&spec.flip_odd(), grid)?;
    let mut ks = ks.to_vec();
    ks.sort_by(f64::total_cmp);
    let reports = map_ordered(&ks, exec, |&k| {
        let run = || -> Result<IdentityReport, ScatteringError> {
            let mut report = identity_defects_from(&setup.transfer_matrix(k)?, metrics)?;
            let partner = s_from_m(&flipped.transfer_matrix(k)?)?;
            let duality = max_norm(&(report.scattering.s.adjoint() * partner.s - identity()));
            report.defects.insert(defect::DUALITY.to_string(), duality);
            Ok(report)
        };
        (k, run())
    });
    Ok(reports)
}
