//! Bound states and complex-conjugate eigenvalue pairs by complex-energy
//! shooting, plus the Scarf-II gamma-pole candidates.

use num_complex::Complex64;
use thiserror::Error;

use crate::correlation::{pt_overlap, pt_overlap_with, CorrelationError};
use crate::exec::{map_ordered, Execution};
use crate::potential::{PotentialSpec, Scarf2};
use crate::schrodinger::{Grid, SampledPotential, SchrodingerError, Wavefunction};

/// Steps between renormalizations of the shooting solutions.
pub const RENORM_EVERY: usize = 1000;
/// `|E_partner - conj(E)|` accepted when pairing broken-phase eigenvalues.
pub const PAIRING_TOLERANCE: f64 = 1e-6;
const MAX_NEWTON_ITERATIONS: usize = 60;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("Re kappa <= 0 at E = {re} + {im}i: no decaying asymptotics")]
    BranchError { re: f64, im: f64 },
    #[error("no eigenvalues found")]
    EmptySpectrum,
    #[error("invalid search: {0}")]
    InvalidSearch(String),
    #[error(transparent)]
    Schrodinger(#[from] SchrodingerError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

fn decay_rate(energy: Complex64, asymptote: f64) -> Result<Complex64, SpectrumError> {
    let kappa = (Complex64::new(asymptote, 0.0) - energy).sqrt();
    if kappa.re <= 0.0 {
        return Err(SpectrumError::BranchError {
            re: energy.re,
            im: energy.im,
        });
    }
    Ok(kappa)
}

/// Potential samples shared by every shooting evaluation on one grid.
#[derive(Debug, Clone)]
pub struct Shooter {
    sampled: SampledPotential,
    inverse_length: f64,
}

impl Shooter {
    pub fn new(spec: &PotentialSpec, grid: &Grid) -> Result<Self, SpectrumError> {
        grid.check_flatness(spec)?;
        Ok(Self {
            sampled: SampledPotential::new(spec, grid)?,
            inverse_length: spec.inverse_length(),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.sampled.grid()
    }

    /// Normalized matching Wronskian at `x = 0` of the solutions decaying
    /// towards `-L` and `+L`.
    pub fn mismatch(&self, energy: Complex64) -> Result<Complex64, SpectrumError> {
        let kappa = decay_rate(energy, self.sampled.asymptote())?;
        let n = self.grid().len();
        let mid = self.grid().mid();
        let one = Complex64::new(1.0, 0.0);
        let (pl, dl) = self
            .sampled
            .sweep_renormalized(energy, 0, mid, (one, kappa), RENORM_EVERY);
        let (pr, dr) =
            self.sampled
                .sweep_renormalized(energy, n - 1, mid, (one, -kappa), RENORM_EVERY);
        // sine of the angle between (psi, psi'/s) from each side
        let s = kappa.norm().max(self.inverse_length);
        let left = (pl.norm_sqr() + (dl / s).norm_sqr()).sqrt();
        let right = (pr.norm_sqr() + (dr / s).norm_sqr()).sqrt();
        let scale = s * left * right;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SchrodingerError::Overflow { x: 0.0 }.into());
        }
        Ok((pl * dr - pr * dl) / scale)
    }

    /// Eigenfunction at a located eigenvalue, glued at `x = 0` and scaled to
    /// `max |psi| = 1`.
    pub fn eigenfunction(&self, energy: Complex64) -> Result<Wavefunction, SpectrumError> {
        let kappa = decay_rate(energy, self.sampled.asymptote())?;
        let grid = self.grid().clone();
        let n = grid.len();
        let mid = grid.mid();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut psi = vec![zero; n];
        let mut dpsi = vec![zero; n];
        self.sweep_recording(energy, 0, mid, (one, kappa), &mut psi, &mut dpsi)?;
        let (left_mid, left_dmid) = (psi[mid], dpsi[mid]);
        self.sweep_recording(energy, n - 1, mid, (one, -kappa), &mut psi, &mut dpsi)?;
        // glue: scale the right branch so psi is continuous at the origin
        let right_mid = psi[mid];
        let factor = if right_mid.norm() > 0.0 {
            left_mid / right_mid
        } else {
            one
        };
        for j in mid..n {
            psi[j] *= factor;
            dpsi[j] *= factor;
        }
        psi[mid] = left_mid;
        dpsi[mid] = 0.5 * (left_dmid + dpsi[mid]);
        let peak = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > 0.0 {
            psi.iter_mut().for_each(|z| *z /= peak);
            dpsi.iter_mut().for_each(|z| *z /= peak);
        }
        Ok(Wavefunction::new(
            grid,
            psi,
            dpsi,
            energy,
            self.sampled.asymptote(),
        ))
    }

    fn sweep_recording(
        &self,
        energy: Complex64,
        from: usize,
        to: usize,
        init: (Complex64, Complex64),
        psi: &mut [Complex64],
        dpsi: &mut [Complex64],
    ) -> Result<(), SpectrumError> {
        let mut start = from;
        let mut state = init;
        while start != to {
            let end = if to > start {
                (start + RENORM_EVERY).min(to)
            } else {
                start.saturating_sub(RENORM_EVERY).max(to)
            };
            state = self.sampled.sweep(energy, start, end, state, |j, p, d| {
                psi[j] = p;
                dpsi[j] = d;
            })?;
            let scale = state.0.norm().max(state.1.norm());
            if scale > 1e100 {
                let (lo, hi) = if to > from { (from, end) } else { (end, from) };
                for j in lo..=hi {
                    psi[j] /= scale;
                    dpsi[j] /= scale;
                }
                state = (state.0 / scale, state.1 / scale);
            }
            start = end;
        }
        Ok(())
    }
}

pub fn shoot_mismatch(
    spec: &PotentialSpec,
    energy: Complex64,
    grid: &Grid,
) -> Result<Complex64, SpectrumError> {
    Shooter::new(spec, grid)?.mismatch(energy)
}

/// Rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, SpectrumError> {
        let ok = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite())
            && re_min < re_max
            && im_min <= im_max;
        if !ok {
            return Err(SpectrumError::InvalidSearch(format!(
                "box Re [{re_min}, {re_max}] x Im [{im_min}, {im_max}] is empty or not finite"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn contains(&self, e: Complex64, slack: f64) -> bool {
        e.re >= self.re_min - slack
            && e.re <= self.re_max + slack
            && e.im >= self.im_min - slack
            && e.im <= self.im_max + slack
    }

    /// Probe lattice: `8n` cell-centred real parts by `2n + 1` imaginary
    /// rows spanning the box edges, or a single row if the box is flat in Im.
    pub fn lattice(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let nx = 8 * n;
        let res = (0..nx)
            .map(|i| self.re_min + (i as f64 + 0.5) * (self.re_max - self.re_min) / nx as f64)
            .collect();
        let ims = if self.im_max > self.im_min {
            let ny = 2 * n + 1;
            (0..ny)
                .map(|j| self.im_min + j as f64 * (self.im_max - self.im_min) / (ny - 1) as f64)
                .collect()
        } else {
            vec![self.im_min]
        };
        (res, ims)
    }

    /// Lattice points in row-major order (imaginary part outermost).
    pub fn seeds(&self, n: usize) -> Vec<Complex64> {
        let (res, ims) = self.lattice(n);
        ims.iter()
            .flat_map(|&im| res.iter().map(move |&re| Complex64::new(re, im)))
            .collect()
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Bound,
    ResonancePairMember,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub energy: Complex64,
    /// `kappa = sqrt(V_asym - E)`, `Re kappa > 0`.
    pub kappa: Complex64,
    /// Family-1 gamma-pole index, when the point matches one.
    pub n_index: Option<usize>,
    pub classification: Classification,
    pub mismatch: f64,
    /// PT self-overlap defect of the eigenfunction.
    pub pt_defect: f64,
    /// `|E_partner - conj(E)|` for the nearest conjugate partner.
    pub partner_mismatch: Option<f64>,
    /// PT cross-overlap defect against the partner's eigenfunction.
    pub pt_partner_defect: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    NoConvergence,
    BranchError,
    OutsideBox,
    SingularJacobian,
    IntegrationFailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedFailure {
    pub seed: Complex64,
    pub last: Complex64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumScan {
    pub points: Vec<SpectralPoint>,
    pub failures: Vec<SeedFailure>,
}

enum SeedOutcome {
    Root(Complex64),
    Failed(SeedFailure),
}

fn newton(shooter: &Shooter, seed: Complex64, search_box: &SearchBox, tol: f64) -> SeedOutcome {
    let fail = |last, reason| SeedOutcome::Failed(SeedFailure { seed, last, reason });
    let eval = |e: Complex64| {
        shooter.mismatch(e).map_err(|err| match err {
            SpectrumError::BranchError { .. } => FailureReason::BranchError,
            _ => FailureReason::IntegrationFailed,
        })
    };
    let max_step = 0.25 * search_box.diameter().max(1e-3);
    let far = search_box.diameter().max(1.0);
    let mut e = seed;
    let mut f = match eval(e) {
        Ok(f) => f,
        Err(reason) => return fail(e, reason),
    };
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let delta = 1e-7 * e.norm().max(1.0);
        let (fx, fy) = match (eval(e + delta), eval(e + Complex64::new(0.0, delta))) {
            (Ok(a), Ok(b)) => ((a - f) / delta, (b - f) / delta),
            (Err(reason), _) | (_, Err(reason)) => return fail(e, reason),
        };
        // real 2x2 Newton: [fx.re fy.re; fx.im fy.im] d = -f
        let det = fx.re * fy.im - fy.re * fx.im;
        if !(det.abs() > 0.0) || !det.is_finite() {
            return fail(e, FailureReason::SingularJacobian);
        }
        let dx = (-f.re * fy.im + fy.re * f.im) / det;
        let dy = (-fx.re * f.im + fx.im * f.re) / det;
        let mut step = Complex64::new(dx, dy);
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        if step.norm() <= tol * e.norm().max(1.0) {
            e += step;
            return match eval(e) {
                Ok(f) if f.norm() < tol => SeedOutcome::Root(e),
                Ok(_) => fail(e, FailureReason::NoConvergence),
                Err(reason) => fail(e, reason),
            };
        }
        // backtrack until |mismatch| decreases
        let mut accepted = None;
        let mut scale = 1.0;
        for _ in 0..12 {
            let trial = e + step * scale;
            if let Ok(ft) = eval(trial) {
                if ft.norm() < f.norm() {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((trial, ft)) => {
                e = trial;
                f = ft;
            }
            None if f.norm() < tol => return SeedOutcome::Root(e),
            None => return fail(e, FailureReason::NoConvergence),
        }
        if !search_box.contains(e, far) {
            return fail(e, FailureReason::OutsideBox);
        }
    }
    fail(e, FailureReason::NoConvergence)
}

/// Lattice indices whose finite value does not exceed any of the eight neighbours.
fn local_minima(values: &[f64], nx: usize, ny: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = values[j * nx + i];
            if !v.is_finite() {
                continue;
            }
            let lowest = (j.saturating_sub(1)..=(j + 1).min(ny - 1))
                .flat_map(|jj| (i.saturating_sub(1)..=(i + 1).min(nx - 1)).map(move |ii| (ii, jj)))
                .all(|(ii, jj)| values[jj * nx + ii] >= v);
            if lowest {
                out.push(j * nx + i);
            }
        }
    }
    out
}

/// Newton search seeded at the local minima of `|mismatch|` over a
/// deterministic probe lattice.
///
/// Converged roots inside the box are deduplicated at `10 tol`, annotated
/// with PT overlaps and conjugate partners, and sorted by `(Re E, Im E)`.
/// Seeds that fail or converge outside the box are listed in `failures`.
pub fn find_eigenvalues(
    spec: &PotentialSpec,
    grid: &Grid,
    search_box: &SearchBox,
    seeds_per_axis: usize,
    tol: f64,
    exec: Execution,
) -> Result<SpectrumScan, SpectrumError> {
    if seeds_per_axis == 0 || !(tol > 0.0) {
        return Err(SpectrumError::InvalidSearch(format!(
            "need seeds_per_axis > 0 and tol > 0, got {seeds_per_axis}, {tol}"
        )));
    }
    let shooter = Shooter::new(spec, grid)?;
    let (res, ims) = search_box.lattice(seeds_per_axis);
    let probes = search_box.seeds(seeds_per_axis);
    let values = map_ordered(&probes, exec, |&e| shooter.mismatch(e).ok());
    let sizes: Vec<f64> = values
        .iter()
        .map(|f| f.map_or(f64::INFINITY, |f| f.norm()))
        .collect();
    let mut seeds: Vec<Complex64> = local_minima(&sizes, res.len(), ims.len())
        .into_iter()
        .map(|i| probes[i])
        .collect();
    // on the real axis, also seed at every sign change of Re(mismatch)
    for (j, _) in ims.iter().enumerate().filter(|(_, im)| **im == 0.0) {
        let row = &values[j * res.len()..(j + 1) * res.len()];
        for i in 1..row.len() {
            if let (Some(f0), Some(f1)) = (row[i - 1], row[i]) {
                if f0.re * f1.re < 0.0 {
                    let t = f0.re / (f0.re - f1.re);
                    seeds.push(Complex64::new(res[i - 1] + t * (res[i] - res[i - 1]), 0.0));
                }
            }
        }
    }
    let outcomes = map_ordered(&seeds, exec, |&seed| {
        newton(&shooter, seed, search_box, tol)
    });

    let mut roots = Vec::new();
    let mut failures = Vec::new();
    for (seed, outcome) in seeds.iter().zip(outcomes) {
        match outcome {
            SeedOutcome::Root(e) if search_box.contains(e, 10.0 * tol) => roots.push(e),
            SeedOutcome::Root(e) => failures.push(SeedFailure {
                seed: *seed,
                last: e,
                reason: FailureReason::OutsideBox,
            }),
            SeedOutcome::Failed(f) => failures.push(f),
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut unique: Vec<Complex64> = Vec::new();
    for e in roots {
        if !unique.iter().any(|u| (u - e).norm() < 10.0 * tol) {
            unique.push(e);
        }
    }

    let family1 = spec
        .as_scarf2()
        .map(scarf2_pole_spectrum)
        .map(|p| p.family1)
        .unwrap_or_default();
    let asymptote = spec.asymptote();
    let annotated = map_ordered(
        &unique,
        exec,
        |&e| -> Result<(SpectralPoint, Wavefunction), SpectrumError> {
            let w = shooter.eigenfunction(e)?;
            let (_, pt_defect) = pt_overlap(&w)?;
            let kappa = decay_rate(e, asymptote)?;
            let classification = if e.im.abs() < PAIRING_TOLERANCE {
                Classification::Bound
            } else {
                Classification::ResonancePairMember
            };
            let n_index = family1
                .iter()
                .find(|c| (c.energy - e).norm() < 1e-6)
                .map(|c| c.n);
            Ok((
                SpectralPoint {
                    energy: e,
                    kappa,
                    n_index,
                    classification,
                    mismatch: shooter.mismatch(e)?.norm(),
                    pt_defect,
                    partner_mismatch: None,
                    pt_partner_defect: None,
                },
                w,
            ))
        },
    );
    let annotated = annotated.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut points: Vec<SpectralPoint> = annotated.iter().map(|(p, _)| p.clone()).collect();
    for (i, point) in points.iter_mut().enumerate() {
        if point.classification != Classification::ResonancePairMember {
            continue;
        }
        let partner = annotated
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(j, (p, _))| (j, (p.energy - point.energy.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, dist)) = partner {
            point.partner_mismatch = Some(dist);
            if dist < PAIRING_TOLERANCE {
                let (_, defect) = pt_overlap_with(&annotated[i].1, &annotated[j].1)?;
                point.pt_partner_defect = Some(defect);
            }
        }
    }
    Ok(SpectrumScan { points, failures })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleCandidate {
    pub n: usize,
    pub energy: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleCandidates {
    /// Poles of `Gamma(-a/alpha - ik/alpha)`: `kappa = a - n alpha > 0`.
    pub family1: Vec<PoleCandidate>,
    /// Poles of `Gamma(1/2 -+ b/alpha - ik/alpha)`: `kappa = +-b - (m + 1/2) alpha > 0`.
    pub family2: Vec<PoleCandidate>,
}

/// Candidate energies `E = a^2 - kappa^2` from the transmission poles at
/// `k = i kappa`. Family-2 candidates are not asserted to be eigenvalues.
pub fn scarf2_pole_spectrum(p: &Scarf2) -> PoleCandidates {
    let a2 = p.a_pot * p.a_pot;
    let level = |n: usize, kappa: f64| PoleCandidate {
        n,
        energy: Complex64::new(a2 - kappa * kappa, 0.0),
    };
    let family1 = (0..)
        .map(|n| (n, p.a_pot - n as f64 * p.alpha))
        .take_while(|&(_, kappa)| kappa > 0.0)
        .map(|(n, kappa)| level(n, kappa))
        .collect();
    let mut family2: Vec<PoleCandidate> = [p.b_pot, -p.b_pot]
        .iter()
        .flat_map(|&b| {
            (0..)
                .map(move |m| (m, b - (m as f64 + 0.5) * p.alpha))
                .take_while(|&(_, kappa)| kappa > 0.0)
                .map(|(m, kappa)| level(m, kappa))
        })
        .collect();
    family2.sort_by(|x, y| x.energy.re.total_cmp(&y.energy.re));
    PoleCandidates { family1, family2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Unbroken,
    Broken,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Unbroken => "unbroken",
            Phase::Broken => "broken",
        }
    }
}

/// Unbroken iff every eigenvalue has `|Im E| < tol`.
pub fn phase_classify(points: &[SpectralPoint], tol: f64) -> Result<Phase, SpectrumError> {
    if points.is_empty() {
        return Err(SpectrumError::EmptySpectrum);
    }
    let worst = points.iter().map(|p| p.energy.im.abs()).fold(0.0, f64::max);
    Ok(if worst < tol {
        Phase::Unbroken
    } else {
        Phase::Broken
    })
}

/// Default search rectangle: `Re E` from below the deepest `Re V` to one well
/// depth above the asymptote (only complex energies are usable there), with
/// `|Im E|` up to `max(0.5, max |Im V|)`.
pub fn default_search_box(spec: &PotentialSpec, grid: &Grid) -> Result<SearchBox, SpectrumError> {
    let mut min_re = f64::INFINITY;
    let mut max_im: f64 = 0.0;
    for x in grid.points().step_by(10) {
        let v = spec.evaluate(x).map_err(SchrodingerError::from)?;
        min_re = min_re.min(v.re);
        max_im = max_im.max(v.im.abs());
    }
    let asym = spec.asymptote();
    let depth = (asym - min_re).max(1e-3);
    let eimax = max_im.max(0.5);
    SearchBox::new(min_re - 0.1 * depth, asym + depth, -eimax, eimax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_candidates() {
        let c = scarf2_pole_spectrum(&Scarf2::new(2.5, 0.5, 1.0).unwrap());
        let e: Vec<f64> = c.family1.iter().map(|p| p.energy.re).collect();
        assert_eq!(e, vec![0.0, 4.0, 6.0]);
        assert!(c.family2.is_empty());
        let c = scarf2_pole_spectrum(&Scarf2::new(1.0, 0.0, 1.0).unwrap());
        assert_eq!(c.family1.len(), 1);
        assert_eq!(c.family1[0].energy, Complex64::new(0.0, 0.0));
        assert!(scarf2_pole_spectrum(&Scarf2::new(-0.5, 0.3, 1.0).unwrap())
            .family1
            .is_empty());
        let c = scarf2_pole_spectrum(&Scarf2::new(0.5, 0.9, 1.0).unwrap());
        assert_eq!(c.family2.len(), 1);
        assert!((c.family2[0].energy.re - (0.25 - 0.16)).abs() < 1e-14);
        let c = scarf2_pole_spectrum(&Scarf2::new(0.5, -0.9, 1.0).unwrap());
        assert_eq!(c.family2.len(), 1);
    }

    #[test]
    fn seeds_lattice() {
        let b = SearchBox::new(0.0, 4.0, -1.0, 1.0).unwrap();
        let (res, ims) = b.lattice(1);
        assert_eq!(res, vec![0.25, 0.75, 1.25, 1.75, 2.25, 2.75, 3.25, 3.75]);
        assert_eq!(ims, vec![-1.0, 0.0, 1.0]);
        assert_eq!(b.seeds(1)[9], Complex64::new(0.75, 0.0));
        let flat = SearchBox::new(0.0, 4.0, 0.0, 0.0).unwrap();
        assert_eq!(flat.seeds(2).len(), 16);
        assert!(SearchBox::new(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn minima_of_lattice() {
        let v = [3.0, 2.0, 3.0, 1.0, f64::INFINITY, 5.0];
        assert_eq!(local_minima(&v, 3, 2), vec![3]);
        assert_eq!(local_minima(&[2.0, 1.0, 2.0, 0.5], 4, 1), vec![1, 3]);
    }

    #[test]
    fn mismatch_at_eigenvalue_and_away() {
        let v = PotentialSpec::scarf2(2.5, 0.5, 1.0).unwrap();
        let grid = Grid::with_step(25.0, 2e-3).unwrap();
        assert!(
            shoot_mismatch(&v, Complex64::new(0.0, 0.0), &grid)
                .unwrap()
                .norm()
                < 1e-7
        );
        assert!(
            shoot_mismatch(&v, Complex64::new(-1.0, 0.0), &grid)
                .unwrap()
                .norm()
                > 1e-2
        );
        let h = PotentialSpec::scarf2(1.0, 0.0, 1.0).unwrap();
        assert!(
            shoot_mismatch(&h, Complex64::new(0.0, 0.0), &grid)
                .unwrap()
                .norm()
                < 1e-7
        );
        assert!(matches!(
            shoot_mismatch(&v, Complex64::new(7.0, 0.0), &grid),
            Err(SpectrumError::BranchError { .. })
        ));
    }

    #[test]
    fn phase_of_points() {
        let point = |e: Complex64| SpectralPoint {
            energy: e,
            kappa: Complex64::new(1.0, 0.0),
            n_index: None,
            classification: Classification::Bound,
            mismatch: 0.0,
            pt_defect: 0.0,
            partner_mismatch: None,
            pt_partner_defect: None,
        };
        assert!(matches!(
            phase_classify(&[], 1e-6),
            Err(SpectrumError::EmptySpectrum)
        ));
        assert_eq!(
            phase_classify(&[point(Complex64::new(1.0, 1e-9))], 1e-6).unwrap(),
            Phase::Unbroken
        );
        assert_eq!(
            phase_classify(
                &[
                    point(Complex64::new(1.0, 0.3)),
                    point(Complex64::new(1.0, -0.3))
                ],
                1e-6
            )
            .unwrap(),
            Phase::Broken
        );
    }
}
