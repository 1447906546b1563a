//! Complex one-dimensional potentials.
//!
//! Units are `hbar = 1`, `m = 1/2`, so the stationary equation reads
//! `-psi'' + V psi = E psi`. To convert energies from a convention with
//! `hbar^2 / 2m = c`, multiply by `c`.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::schrodinger::{Grid, Wavefunction};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("x = {x} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("potential is not PT-symmetric (max |V*(-x) - V(x)| = {asymmetry:e})")]
    NotPTSymmetric { asymmetry: f64 },
    #[error("operation only supported for the Scarf-II family")]
    UnsupportedPotential,
    #[error("ground state not normalizable for a_pot = {a_pot}")]
    NotNormalizable { a_pot: f64 },
    #[error("invalid Scarf-II parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid potential table: {0}")]
    InvalidTable(String),
    #[error("potential CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("potential CSV: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Scarf2,
    CustomTabulated,
}

/// Parameters of the complexified Scarf-II potential
///
/// `V(x) = a^2 - (a(a+alpha) + b^2) sech^2(alpha x) + i b (2a + alpha) sech(alpha x) tanh(alpha x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scarf2 {
    pub a_pot: f64,
    pub b_pot: f64,
    pub alpha: f64,
}

impl Scarf2 {
    pub fn new(a_pot: f64, b_pot: f64, alpha: f64) -> Result<Self, PotentialError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(PotentialError::InvalidParameters(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if !a_pot.is_finite() || !b_pot.is_finite() {
            return Err(PotentialError::InvalidParameters(format!(
                "a_pot and b_pot must be finite, got {a_pot}, {b_pot}"
            )));
        }
        Ok(Self {
            a_pot,
            b_pot,
            alpha,
        })
    }

    /// Depth of the real sech^2 well, `a(a+alpha) + b^2`.
    pub fn well_depth(&self) -> f64 {
        self.a_pot * (self.a_pot + self.alpha) + self.b_pot * self.b_pot
    }

    /// Amplitude of the imaginary sech*tanh part, `b(2a + alpha)`.
    pub fn gain_loss_amplitude(&self) -> f64 {
        self.b_pot * (2.0 * self.a_pot + self.alpha)
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        let ax = self.alpha * x;
        let sech = 1.0 / ax.cosh();
        let tanh = ax.tanh();
        Complex64::new(
            self.a_pot * self.a_pot - self.well_depth() * sech * sech,
            self.gain_loss_amplitude() * tanh * sech,
        )
    }

    /// `W(x) = a tanh(alpha x) + i b sech(alpha x)`.
    pub fn superpotential(&self, x: f64) -> Complex64 {
        let ax = self.alpha * x;
        Complex64::new(self.a_pot * ax.tanh(), self.b_pot / ax.cosh())
    }

    /// `W'(x)`.
    pub fn superpotential_derivative(&self, x: f64) -> Complex64 {
        let ax = self.alpha * x;
        let sech = 1.0 / ax.cosh();
        Complex64::new(
            self.a_pot * self.alpha * sech * sech,
            -self.b_pot * self.alpha * sech * ax.tanh(),
        )
    }
}

/// Complex potential sampled on a strictly increasing, symmetric abscissa,
/// linearly interpolated in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    x: Vec<f64>,
    v: Vec<Complex64>,
}

impl TabulatedPotential {
    pub fn new(x: Vec<f64>, v: Vec<Complex64>) -> Result<Self, PotentialError> {
        if x.len() != v.len() {
            return Err(PotentialError::InvalidTable(format!(
                "{} abscissae but {} values",
                x.len(),
                v.len()
            )));
        }
        if x.len() < 2 {
            return Err(PotentialError::InvalidTable(
                "need at least two samples".into(),
            ));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(PotentialError::InvalidTable(format!(
                "x not strictly increasing at row {}",
                i + 2
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || v.iter().any(|z| !z.is_finite()) {
            return Err(PotentialError::InvalidTable("non-finite sample".into()));
        }
        let (lo, hi) = (x[0], x[x.len() - 1]);
        if (lo + hi).abs() > 1e-9 * hi.abs().max(1.0) {
            return Err(PotentialError::InvalidTable(format!(
                "range [{lo}, {hi}] is not symmetric about 0"
            )));
        }
        Ok(Self { x, v })
    }

    /// Tabulates `f` on `n` equally spaced points over `[-half_width, half_width]`.
    pub fn from_fn(
        half_width: f64,
        n: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, PotentialError> {
        if n < 2 {
            return Err(PotentialError::InvalidTable(
                "need at least two samples".into(),
            ));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let x: Vec<f64> = (0..n)
            .map(|j| {
                let mirror = n - 1 - j;
                if j < mirror {
                    -half_width + j as f64 * h
                } else if j == mirror {
                    0.0
                } else {
                    half_width - mirror as f64 * h
                }
            })
            .collect();
        let v = x.iter().map(|&xi| f(xi)).collect();
        Self::new(x, v)
    }

    /// Reads a CSV with header `x,re_v,im_v`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, PotentialError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["x", "re_v", "im_v"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(PotentialError::InvalidTable(format!(
                "expected header `x,re_v,im_v`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut x = Vec::new();
        let mut v = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| -> Result<f64, PotentialError> {
                rec[i].parse::<f64>().map_err(|e| {
                    PotentialError::InvalidTable(format!(
                        "line {}, field `{}`: {e}",
                        row + 2,
                        expected[i]
                    ))
                })
            };
            x.push(field(0)?);
            v.push(Complex64::new(field(1)?, field(2)?));
        }
        Self::new(x, v)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, PotentialError> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn half_width(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Complex64] {
        &self.v
    }

    pub fn evaluate(&self, x: f64) -> Result<Complex64, PotentialError> {
        let (lo, hi) = (self.x[0], self.half_width());
        let slack = 1e-12 * hi.abs().max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(PotentialError::OutOfRange { x, lo, hi });
        }
        let x = x.clamp(lo, hi);
        let i = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        };
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        Ok(self.v[i] * (1.0 - t) + self.v[i + 1] * t)
    }

    fn conjugated(&self) -> Self {
        Self {
            x: self.x.clone(),
            v: self.v.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Real even and odd parts of a PT-symmetric potential, `V = v_even + i v_odd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenOddParts {
    pub v_even: f64,
    pub v_odd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Scarf2(Scarf2),
    CustomTabulated(TabulatedPotential),
}

impl From<Scarf2> for PotentialSpec {
    fn from(p: Scarf2) -> Self {
        PotentialSpec::Scarf2(p)
    }
}

impl From<TabulatedPotential> for PotentialSpec {
    fn from(p: TabulatedPotential) -> Self {
        PotentialSpec::CustomTabulated(p)
    }
}

/// Tolerance of the PT test, relative to the potential's magnitude scale.
pub const PT_TOLERANCE: f64 = 1e-10;

impl PotentialSpec {
    pub fn scarf2(a_pot: f64, b_pot: f64, alpha: f64) -> Result<Self, PotentialError> {
        Scarf2::new(a_pot, b_pot, alpha).map(Self::Scarf2)
    }

    pub fn kind(&self) -> PotentialKind {
        match self {
            Self::Scarf2(_) => PotentialKind::Scarf2,
            Self::CustomTabulated(_) => PotentialKind::CustomTabulated,
        }
    }

    pub fn as_scarf2(&self) -> Option<&Scarf2> {
        match self {
            Self::Scarf2(p) => Some(p),
            Self::CustomTabulated(_) => None,
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<Complex64, PotentialError> {
        match self {
            Self::Scarf2(p) => Ok(p.evaluate(x)),
            Self::CustomTabulated(t) => t.evaluate(x),
        }
    }

    /// Real constant approached as `x -> +-infinity` (end average for tables).
    pub fn asymptote(&self) -> f64 {
        match self {
            Self::Scarf2(p) => p.a_pot * p.a_pot,
            Self::CustomTabulated(t) => 0.5 * (t.v[0].re + t.v[t.v.len() - 1].re),
        }
    }

    /// Typical size of `V`, used to make flatness and symmetry tests relative.
    pub fn magnitude_scale(&self) -> f64 {
        match self {
            Self::Scarf2(p) => (p.a_pot * p.a_pot)
                .max(p.well_depth().abs())
                .max(p.gain_loss_amplitude().abs()),
            Self::CustomTabulated(t) => t.v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Half-width beyond which the potential is flat to double precision.
    pub fn natural_half_width(&self) -> f64 {
        match self {
            Self::Scarf2(p) => 25.0 / p.alpha,
            Self::CustomTabulated(t) => t.half_width(),
        }
    }

    /// Inverse length scale used to pick a default step.
    pub fn inverse_length(&self) -> f64 {
        match self {
            Self::Scarf2(p) => p.alpha,
            Self::CustomTabulated(_) => 1.0,
        }
    }

    /// `max |V*(-x) - V(x)|` over the table abscissae (or a fixed sample for Scarf-II).
    pub fn pt_asymmetry(&self) -> f64 {
        let xs: Vec<f64> = match self {
            Self::Scarf2(p) => (0..=400)
                .map(|j| (j as f64 / 400.0 - 0.5) * 20.0 / p.alpha)
                .collect(),
            Self::CustomTabulated(t) => t.x.clone(),
        };
        xs.iter()
            .filter_map(|&x| {
                let v = self.evaluate(x).ok()?;
                let mirror = self.evaluate(-x).ok()?;
                Some((mirror.conj() - v).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_pt_symmetric(&self) -> bool {
        self.pt_asymmetry() <= PT_TOLERANCE * self.magnitude_scale().max(1.0)
    }

    pub fn decompose_even_odd(&self, x: f64) -> Result<EvenOddParts, PotentialError> {
        if let Self::CustomTabulated(_) = self {
            let asymmetry = self.pt_asymmetry();
            if asymmetry > PT_TOLERANCE * self.magnitude_scale().max(1.0) {
                return Err(PotentialError::NotPTSymmetric { asymmetry });
            }
        }
        let v = self.evaluate(x)?;
        Ok(EvenOddParts {
            v_even: v.re,
            v_odd: v.im,
        })
    }

    /// Partner potential `V_even - i V_odd`, i.e. the complex conjugate on the
    /// real axis (`b_pot -> -b_pot` for Scarf-II).
    pub fn flip_odd(&self) -> Self {
        match self {
            Self::Scarf2(p) => Self::Scarf2(Scarf2 {
                b_pot: -p.b_pot,
                ..*p
            }),
            Self::CustomTabulated(t) => Self::CustomTabulated(t.conjugated()),
        }
    }

    pub fn superpotential(&self, x: f64) -> Result<Complex64, PotentialError> {
        match self {
            Self::Scarf2(p) => Ok(p.superpotential(x)),
            Self::CustomTabulated(_) => Err(PotentialError::UnsupportedPotential),
        }
    }

    /// Zero-energy ground state `psi_0(x) = exp(-int_0^x W)` with `psi_0(0) = 1`.
    ///
    /// The integral of `W` is accumulated outward from the origin with
    /// five-point Gauss-Legendre on every grid interval.
    pub fn ground_state_oracle(&self, grid: &Grid) -> Result<Wavefunction, PotentialError> {
        let p = match self {
            Self::Scarf2(p) => p,
            Self::CustomTabulated(_) => return Err(PotentialError::UnsupportedPotential),
        };
        if p.a_pot <= 0.0 {
            return Err(PotentialError::NotNormalizable { a_pot: p.a_pot });
        }
        let n = grid.len();
        let mid = grid.mid();
        let mut integral = vec![Complex64::new(0.0, 0.0); n];
        for j in mid + 1..n {
            integral[j] = integral[j - 1]
                + gauss_legendre5(|x| p.superpotential(x), grid.x(j - 1), grid.x(j));
        }
        for j in (0..mid).rev() {
            integral[j] = integral[j + 1]
                - gauss_legendre5(|x| p.superpotential(x), grid.x(j), grid.x(j + 1));
        }
        let psi: Vec<Complex64> = integral.iter().map(|i| (-i).exp()).collect();
        let dpsi = psi
            .iter()
            .enumerate()
            .map(|(j, &y)| -p.superpotential(grid.x(j)) * y)
            .collect();
        let energy = Complex64::new(0.0, 0.0);
        Ok(Wavefunction::new(
            grid.clone(),
            psi,
            dpsi,
            energy,
            self.asymptote(),
        ))
    }
}

fn gauss_legendre5(f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);
    NODES
        .iter()
        .zip(WEIGHTS)
        .map(|(&t, w)| f(centre + half * t) * w)
        .sum::<Complex64>()
        * half
}
