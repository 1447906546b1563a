//! Non-local correlation `rho(x) = psi*(-x) psi(x)` and its current.
//!
//! With `phi(x) = psi*(-x)` the current is `q = psi phi' - phi psi'`, and for a
//! PT-symmetric potential the stationary equation gives
//! `dq/dx = 2i Im(E) rho`. Mirror values are taken by index reflection on the
//! symmetric grid, never by interpolation.

use std::io::Write;

use num_complex::Complex64;
use thiserror::Error;

use crate::schrodinger::{Grid, Wavefunction};

#[derive(Debug, Error, PartialEq)]
pub enum CorrelationError {
    #[error("wavefunction is not sampled on a symmetric grid")]
    AsymmetricGrid,
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error("wavefunction has zero norm")]
    ZeroFunction,
}

fn check(w: &Wavefunction) -> Result<&Grid, CorrelationError> {
    let g = w.grid();
    if w.psi().len() != g.len() || g.len() % 2 == 0 {
        return Err(CorrelationError::AsymmetricGrid);
    }
    Ok(g)
}

/// `rho_j = conj(psi(-x_j)) psi(x_j)`.
pub fn correlation_density(w: &Wavefunction) -> Result<Vec<Complex64>, CorrelationError> {
    let g = check(w)?;
    let psi = w.psi();
    Ok((0..g.len())
        .map(|j| psi[g.mirror(j)].conj() * psi[j])
        .collect())
}

/// `q_j = psi phi' - phi psi'` with `phi(x) = conj(psi(-x))`, `phi'(x) = -conj(psi'(-x))`.
pub fn pt_current(w: &Wavefunction) -> Result<Vec<Complex64>, CorrelationError> {
    let g = check(w)?;
    let (psi, dpsi) = (w.psi(), w.dpsi());
    Ok((0..g.len())
        .map(|j| {
            let m = g.mirror(j);
            let phi = psi[m].conj();
            let dphi = -dpsi[m].conj();
            psi[j] * dphi - phi * dpsi[j]
        })
        .collect())
}

/// `max_j |(q_{j+1} - q_{j-1}) / 2h - 2i Im(E) rho_j|` over interior points.
pub fn continuity_residual(w: &Wavefunction) -> Result<f64, CorrelationError> {
    let rho = correlation_density(w)?;
    let q = pt_current(w)?;
    let h = w.grid().step();
    let source = Complex64::new(0.0, 2.0 * w.energy().im);
    Ok((1..q.len() - 1)
        .map(|j| ((q[j + 1] - q[j - 1]) / (2.0 * h) - source * rho[j]).norm())
        .fold(0.0, f64::max))
}

fn trapezoid_weight(g: &Grid, j: usize) -> f64 {
    if j == 0 || j + 1 == g.len() {
        0.5 * g.step()
    } else {
        g.step()
    }
}

/// Best scalar `c` with `psi*(-x) ~ c partner(x)` and the relative residual
/// `||phi - c partner|| / ||partner||`, in the trapezoidal L2 product.
pub fn pt_overlap_with(
    w: &Wavefunction,
    partner: &Wavefunction,
) -> Result<(Complex64, f64), CorrelationError> {
    let g = check(w)?;
    check(partner)?;
    if g != partner.grid() {
        return Err(CorrelationError::GridMismatch);
    }
    let psi = w.psi();
    let target = partner.psi();
    let mut cross = Complex64::new(0.0, 0.0);
    let mut norm2 = 0.0;
    for j in 0..g.len() {
        let wt = trapezoid_weight(g, j);
        let phi = psi[g.mirror(j)].conj();
        cross += wt * target[j].conj() * phi;
        norm2 += wt * target[j].norm_sqr();
    }
    if !(norm2 > 0.0) {
        return Err(CorrelationError::ZeroFunction);
    }
    let c = cross / norm2;
    let resid2: f64 = (0..g.len())
        .map(|j| trapezoid_weight(g, j) * (psi[g.mirror(j)].conj() - c * target[j]).norm_sqr())
        .sum();
    Ok((c, (resid2 / norm2).sqrt()))
}

/// PT self-overlap: how far `psi*(-x)` is from a multiple of `psi`.
pub fn pt_overlap(w: &Wavefunction) -> Result<(Complex64, f64), CorrelationError> {
    pt_overlap_with(w, w)
}

/// Trapezoidal `int phi(x) conj(psi(-x)) dx`.
pub fn nonlocal_inner_product(
    phi: &Wavefunction,
    psi: &Wavefunction,
) -> Result<Complex64, CorrelationError> {
    let g = check(phi)?;
    check(psi)?;
    if g != psi.grid() {
        return Err(CorrelationError::GridMismatch);
    }
    let (a, b) = (phi.psi(), psi.psi());
    Ok((0..g.len())
        .map(|j| trapezoid_weight(g, j) * a[j] * b[g.mirror(j)].conj())
        .sum())
}

/// `rho` and `q` of one wavefunction, aligned with its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationField {
    pub grid: Grid,
    pub energy: Complex64,
    pub rho: Vec<Complex64>,
    pub q: Vec<Complex64>,
}

impl CorrelationField {
    pub fn from_wavefunction(w: &Wavefunction) -> Result<Self, CorrelationError> {
        Ok(Self {
            grid: w.grid().clone(),
            energy: w.energy(),
            rho: correlation_density(w)?,
            q: pt_current(w)?,
        })
    }

    /// `max_j |q_j - q_mid| / |q_mid|`; infinite if `q_mid` is zero.
    pub fn current_variation(&self) -> f64 {
        let q0 = self.q[self.grid.mid()];
        let worst = self.q.iter().map(|q| (q - q0).norm()).fold(0.0, f64::max);
        worst / q0.norm()
    }

    /// `max |q| / max |rho|`.
    pub fn current_to_density(&self) -> f64 {
        let q = self.q.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rho = self.rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
        q / rho
    }

    /// Writes `x,re_rho,im_rho,re_q,im_q`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "re_rho", "im_rho", "re_q", "im_q"])?;
        for (j, (r, q)) in self.rho.iter().zip(&self.q).enumerate() {
            w.write_record([
                self.grid.x(j).to_string(),
                r.re.to_string(),
                r.im.to_string(),
                q.re.to_string(),
                q.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(
        grid: &Grid,
        energy: Complex64,
        f: impl Fn(f64) -> (Complex64, Complex64),
    ) -> Wavefunction {
        let (psi, dpsi): (Vec<_>, Vec<_>) = grid.points().map(f).unzip();
        Wavefunction::new(grid.clone(), psi, dpsi, energy, 0.0)
    }

    fn gaussian(grid: &Grid) -> Wavefunction {
        sampled(grid, Complex64::new(1.0, 0.0), |x| {
            let g = (-x * x).exp();
            (Complex64::new(g, 0.0), Complex64::new(-2.0 * x * g, 0.0))
        })
    }

    #[test]
    fn real_even_function() {
        let grid = Grid::new(6.0, 1201).unwrap();
        let w = gaussian(&grid);
        let rho = correlation_density(&w).unwrap();
        for (r, p) in rho.iter().zip(w.psi()) {
            assert!((r - p * p).norm() < 1e-15);
            assert!(r.re >= 0.0);
        }
        let (c, defect) = pt_overlap(&w).unwrap();
        assert!((c - 1.0).norm() < 1e-12 && defect < 1e-12);
        assert!(pt_current(&w).unwrap().iter().all(|q| q.norm() < 1e-15));
    }

    #[test]
    fn real_odd_function() {
        let grid = Grid::new(6.0, 1201).unwrap();
        let w = sampled(&grid, Complex64::new(1.0, 0.0), |x| {
            let g = x * (-x * x).exp();
            (
                Complex64::new(g, 0.0),
                Complex64::new((1.0 - 2.0 * x * x) * (-x * x).exp(), 0.0),
            )
        });
        let (c, defect) = pt_overlap(&w).unwrap();
        assert!((c + 1.0).norm() < 1e-12 && defect < 1e-12);
    }

    #[test]
    fn plane_wave() {
        let grid = Grid::new(5.0, 1001).unwrap();
        let k = 1.7;
        let i = Complex64::i();
        let w = sampled(&grid, Complex64::new(k * k, 0.0), |x| {
            ((i * k * x).exp(), i * k * (i * k * x).exp())
        });
        let rho = correlation_density(&w).unwrap();
        for (j, r) in rho.iter().enumerate() {
            assert!((r - (2.0 * i * k * grid.x(j)).exp()).norm() < 1e-14);
        }
        assert!(pt_current(&w).unwrap().iter().all(|q| q.norm() < 1e-14));
        assert!(continuity_residual(&w).unwrap() < 1e-12);
    }

    #[test]
    fn pt_self_symmetric_function() {
        // psi*(-x) = psi(x) for psi = e^{-x^2} (1 + i x)
        let grid = Grid::new(6.0, 1201).unwrap();
        let i = Complex64::i();
        let w = sampled(&grid, Complex64::new(1.0, 0.0), |x| {
            let g = (-x * x).exp();
            let p = g * (1.0 + i * x);
            (p, -2.0 * x * p + g * i)
        });
        let rho = correlation_density(&w).unwrap();
        for (r, p) in rho.iter().zip(w.psi()) {
            assert!((r - p * p).norm() < 1e-15);
        }
        assert!(pt_current(&w).unwrap().iter().all(|q| q.norm() < 1e-15));
        assert!(continuity_residual(&w).unwrap() < 1e-8);
    }

    #[test]
    fn inner_product_reflection_identity() {
        let grid = Grid::new(6.0, 1201).unwrap();
        let i = Complex64::i();
        let a = sampled(&grid, Complex64::new(1.0, 0.0), |x| {
            (
                (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.4 * i * x),
                Complex64::default(),
            )
        });
        let b = sampled(&grid, Complex64::new(1.0, 0.0), |x| {
            (
                (-x * x / 2.0).exp() * (i * x).exp() * (0.2 + x),
                Complex64::default(),
            )
        });
        let lhs = nonlocal_inner_product(&a, &b).unwrap();
        // int conj(psi(x)) phi(-x) dx on the same grid
        let rhs: Complex64 = (0..grid.len())
            .map(|j| trapezoid_weight(&grid, j) * b.psi()[j].conj() * a.psi()[grid.mirror(j)])
            .sum();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn inner_product_of_pt_symmetric_state_is_integral_of_square() {
        let grid = Grid::new(6.0, 1201).unwrap();
        let i = Complex64::i();
        let w = sampled(&grid, Complex64::new(1.0, 0.0), |x| {
            ((-x * x).exp() * (1.0 + i * x), Complex64::default())
        });
        let ip = nonlocal_inner_product(&w, &w).unwrap();
        let sq: Complex64 = (0..grid.len())
            .map(|j| trapezoid_weight(&grid, j) * w.psi()[j] * w.psi()[j])
            .sum();
        assert!((ip - sq).norm() < 1e-14);
    }

    #[test]
    fn grid_mismatch_and_zero() {
        let a = gaussian(&Grid::new(6.0, 1201).unwrap());
        let b = gaussian(&Grid::new(6.0, 1001).unwrap());
        assert_eq!(
            nonlocal_inner_product(&a, &b),
            Err(CorrelationError::GridMismatch)
        );
        let grid = Grid::new(1.0, 5).unwrap();
        let z = Wavefunction::new(
            grid,
            vec![Complex64::default(); 5],
            vec![Complex64::default(); 5],
            Complex64::new(1.0, 0.0),
            0.0,
        );
        assert_eq!(pt_overlap(&z), Err(CorrelationError::ZeroFunction));
    }

    #[test]
    fn csv_header() {
        let grid = Grid::new(1.0, 3).unwrap();
        let field = CorrelationField::from_wavefunction(&gaussian(&grid)).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("x,re_rho,im_rho,re_q,im_q\n"));
    }
}
