//! One test per acceptance criterion. Each prints a PASS/FAIL line before
//! asserting, so `cargo test --test acceptance` lists every verdict.

mod common;

use common::{broken_well, lngamma_series, log_rel, lossy_offset_well, scarf, verdict};
use ptcorr::correlation::{continuity_residual, CorrelationField};
use ptcorr::potential::Scarf2;
use ptcorr::scattering::{
    defect, flux_deviation_analytic, identity_defects, identity_sweep, s_from_m,
    scarf2_analytic_amplitudes, transfer_matrix, NamedMetric, ReflectionVariant,
};
use ptcorr::schrodinger::local_energy;
use ptcorr::specfun::lngamma;
use ptcorr::spectrum::{
    default_search_box, find_eigenvalues, phase_classify, Phase, SearchBox, Shooter,
};
use ptcorr::{Complex64, Execution, Grid, PotentialSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KS: [f64; 3] = [0.5, 1.0, 2.0];
const TOL: f64 = 1e-8;
const SEEDS: usize = 6;

fn grid(spec: &PotentialSpec) -> Grid {
    Grid::for_potential(spec)
}

fn defects_at(spec: &PotentialSpec, k: f64) -> std::collections::BTreeMap<String, f64> {
    identity_defects(spec, k, &grid(spec), &NamedMetric::defaults())
        .unwrap()
        .defects
}

#[test]
fn criterion_01_hermitian_limit() {
    let v = scarf(2.5, 0.0);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for k in KS {
        let d = defects_at(&v, k);
        let s = s_from_m(&transfer_matrix(&v, k, &grid(&v)).unwrap()).unwrap();
        worst.0 = worst.0.max(d[defect::UNITARITY]);
        worst.1 = worst.1.max(d[defect::SIGMA3_PSEUDO_UNITARITY]);
        worst.2 = worst.2.max(s.flux_deviation().abs());
    }
    let ok = worst.0 < 1e-6 && worst.1 < 1e-6 && worst.2 < 1e-8;
    verdict(
        "1",
        ok,
        &format!(
            "max ||S'S-I|| = {:.2e}, max ||M's3M-s3|| = {:.2e}, max ||R|^2+|T|^2-1| = {:.2e}",
            worst.0, worst.1, worst.2
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_reflectionless_decides_variant() {
    let p = Scarf2::new(1.0, 0.0, 1.0).unwrap();
    let v = PotentialSpec::from(p);
    let mut max_r = 0.0f64;
    let mut err = [0.0f64; 2];
    for k in KS {
        let s = s_from_m(&transfer_matrix(&v, k, &grid(&v)).unwrap()).unwrap();
        let (r, t) = (s.reflection_left(), s.transmission_left());
        max_r = max_r.max(r.norm());
        for (i, variant) in ReflectionVariant::ALL.iter().enumerate() {
            let amp = scarf2_analytic_amplitudes(&p, k, *variant).unwrap();
            // R itself vanishes, so measure the error on the scale of the amplitudes
            err[i] = err[i].max((amp.r - r).norm() / r.norm().max(t.norm()));
        }
    }
    let winner = if err[0] < err[1] { 0 } else { 1 };
    let winner_variant = ReflectionVariant::ALL[winner];
    let ok =
        max_r < 1e-7 && winner_variant == ReflectionVariant::SinCorrected && err[winner] < 1e-4;
    verdict(
        "2",
        ok,
        &format!(
            "max |R| = {max_r:.2e}; rel error R: as-printed {:.2e}, sin-corrected {:.2e}; winner {}",
            err[0],
            err[1],
            winner_variant.name()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_03_analytic_transmission() {
    let p = Scarf2::new(2.5, 0.5, 1.0).unwrap();
    let v = PotentialSpec::from(p);
    let mut worst = 0.0f64;
    for k in KS {
        let tm = transfer_matrix(&v, k, &grid(&v)).unwrap();
        let t_num = Complex64::new(1.0, 0.0) / tm.m[(1, 1)];
        let t_ana = scarf2_analytic_amplitudes(&p, k, ReflectionVariant::SinCorrected)
            .unwrap()
            .t;
        worst = worst.max((t_ana - t_num).norm() / t_num.norm());
    }
    let ok = worst < 1e-4;
    verdict(
        "3",
        ok,
        &format!("max rel |T_closed - 1/M22| = {worst:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_04_flux_deviation() {
    let flux_error = |a: f64, b: f64, k: f64| -> (f64, f64, f64) {
        let p = Scarf2::new(a, b, 1.0).unwrap();
        let v = PotentialSpec::from(p);
        let s = s_from_m(&transfer_matrix(&v, k, &grid(&v)).unwrap()).unwrap();
        let measured = s.flux_deviation();
        let closed = flux_deviation_analytic(&p, k).unwrap();
        // relative to the flux itself when the closed form vanishes
        let scale = closed.abs().max(1.0 + measured);
        (measured, closed, (measured - closed).abs() / scale)
    };
    let mut worst_rel = 0.0f64;
    for k in KS {
        worst_rel = worst_rel.max(flux_error(2.5, 0.5, k).2);
    }
    let mut worst_zero = 0.0f64;
    let mut worst_closed_zero = 0.0f64;
    for (a, b) in [(2.5, 0.0), (1.3, 0.0), (0.5, 0.5), (0.5, 1.7)] {
        for k in KS {
            let (measured, closed, _) = flux_error(a, b, k);
            worst_zero = worst_zero.max(measured.abs());
            worst_closed_zero = worst_closed_zero.max(closed.abs());
        }
    }
    let ok = worst_rel < 1e-4 && worst_zero < 1e-8 && worst_closed_zero < 1e-8;
    verdict(
        "4",
        ok,
        &format!(
            "a=2.5 b=0.5: max rel error {worst_rel:.2e}; forced zeros (b=0, a=1/2): measured {worst_zero:.2e}, closed form {worst_closed_zero:.2e}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_structural_properties() {
    let potentials = [
        scarf(2.5, 0.0),
        scarf(1.0, 0.0),
        scarf(2.5, 0.5),
        scarf(0.5, 0.9),
        scarf(0.5, 1.1),
        scarf(1.7, -0.8),
        lossy_offset_well(),
    ];
    let (mut det, mut sym) = (0.0f64, 0.0f64);
    for v in &potentials {
        let reports = identity_sweep(
            v,
            &KS,
            &grid(v),
            &NamedMetric::defaults(),
            Execution::Parallel,
        )
        .unwrap();
        for (_, r) in reports {
            let r = r.unwrap();
            det = det.max(r.defects[defect::DETERMINANT]);
            sym = sym.max(r.defects[defect::SYMMETRY]);
        }
    }
    let ok = det < 1e-8 && sym < 1e-8;
    verdict(
        "5",
        ok,
        &format!(
            "{} potentials x 3 momenta: max |det M - 1| = {det:.2e}, max ||S - S^T|| = {sym:.2e}",
            potentials.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_06_pt_constraints() {
    let v = scarf(2.5, 0.5);
    let (mut pt, mut s1) = (0.0f64, 0.0f64);
    let mut reported = Vec::new();
    for k in KS {
        let d = defects_at(&v, k);
        pt = pt.max(d[defect::PT_CLOSURE]);
        s1 = s1.max(d["eq13_sigma1"]);
        let extra = [
            defect::CROSS_FLUX,
            defect::J_PSEUDO_UNITARITY,
            "eq13_J",
            defect::HERMITICITY,
        ];
        assert!(extra
            .iter()
            .all(|key| d.get(*key).is_some_and(|x| x.is_finite())));
        reported.push(format!(
            "k={k}: eq9 {:.2e} eq10 {:.2e} eq13_J {:.2e}",
            d[defect::CROSS_FLUX],
            d[defect::J_PSEUDO_UNITARITY],
            d["eq13_J"]
        ));
    }
    let ok = pt < 1e-6 && s1 < 1e-6;
    verdict(
        "6",
        ok,
        &format!(
            "max ||M*M - I|| = {pt:.2e}, max ||S's1S - s1|| = {s1:.2e}; reported: {}",
            reported.join("; ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_duality() {
    let scarf_v = scarf(2.5, 0.5);
    let custom = lossy_offset_well();
    assert!(!custom.is_pt_symmetric());
    let d_scarf = ptcorr::scattering::duality_defect(&scarf_v, 1.0, &grid(&scarf_v)).unwrap();
    let d_custom = ptcorr::scattering::duality_defect(&custom, 1.0, &grid(&custom)).unwrap();
    let ok = d_scarf < 1e-6 && d_custom < 1e-6;
    verdict(
        "7",
        ok,
        &format!("||S(V)'S(V*) - I||: Scarf-II {d_scarf:.2e}, non-PT custom {d_custom:.2e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_bound_spectrum() {
    let v = scarf(2.5, 0.5);
    let g = grid(&v);
    let search_box = default_search_box(&v, &g).unwrap();
    let scan = find_eigenvalues(&v, &g, &search_box, SEEDS, TOL, Execution::Parallel).unwrap();
    let energies: Vec<Complex64> = scan.points.iter().map(|p| p.energy).collect();
    let expected = [0.0, 4.0, 6.0];
    let matches = energies.len() == expected.len()
        && energies
            .iter()
            .zip(expected)
            .all(|(e, x)| (e - x).norm() < 1e-6)
        && scan
            .points
            .iter()
            .map(|p| p.n_index)
            .eq([Some(0), Some(1), Some(2)]);

    let oracle = v.ground_state_oracle(&g).unwrap();
    let e0 = energies.first().copied().unwrap_or_default();
    let susy = local_energy(&v, &oracle)
        .unwrap()
        .iter()
        .map(|e| (e - e0).norm())
        .fold(0.0, f64::max);
    let ok = matches && susy < 1e-6;
    let listed: Vec<String> = energies
        .iter()
        .map(|e| format!("{:.9}{:+.1e}i", e.re, e.im))
        .collect();
    verdict(
        "8",
        ok,
        &format!(
            "eigenvalues [{}]; SUSY ground-state residual {susy:.2e}",
            listed.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_09_phase_transition() {
    let spectrum = |b: f64| {
        let v = scarf(0.5, b);
        let g = grid(&v);
        let search_box = default_search_box(&v, &g).unwrap();
        find_eigenvalues(&v, &g, &search_box, SEEDS, TOL, Execution::Parallel).unwrap()
    };
    let below = spectrum(0.9);
    let above = spectrum(1.1);
    let unbroken = phase_classify(&below.points, 1e-6).ok() == Some(Phase::Unbroken);
    let pair = above.points.iter().find(|p| {
        p.energy.im > 0.01
            && p.partner_mismatch.is_some_and(|m| m < 1e-6)
            && p.pt_partner_defect.is_some_and(|d| d < 1e-5)
    });
    let ok = unbroken && pair.is_some();
    let show = |s: &ptcorr::spectrum::SpectrumScan| {
        s.points
            .iter()
            .map(|p| format!("{:.6}{:+.1e}i", p.energy.re, p.energy.im))
            .collect::<Vec<_>>()
            .join(", ")
    };
    verdict(
        "9",
        ok,
        &format!(
            "b=0.9 spectrum [{}] ({}); b=1.1 spectrum [{}], conjugate pair {}",
            show(&below),
            if unbroken { "all real" } else { "not all real" },
            show(&above),
            if pair.is_some() { "found" } else { "absent" }
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_continuity() {
    // real-E scattering states; q = 2ik r t* vanishes for reflectionless wells, so use reflecting ones
    let mut q_variation = 0.0f64;
    for (a, b) in [(1.7, 0.4), (0.5, 1.1)] {
        let v = scarf(a, b);
        for k in KS {
            let state = ptcorr::scattering::scattering_state(&v, k, &grid(&v)).unwrap();
            q_variation = q_variation.max(
                CorrelationField::from_wavefunction(&state)
                    .unwrap()
                    .current_variation(),
            );
        }
    }

    // unbroken bound states
    let v = scarf(2.5, 0.5);
    let g = grid(&v);
    let shooter = Shooter::new(&v, &g).unwrap();
    let scan = find_eigenvalues(
        &v,
        &g,
        &default_search_box(&v, &g).unwrap(),
        SEEDS,
        TOL,
        Execution::Parallel,
    )
    .unwrap();
    let bound_ratio = scan
        .points
        .iter()
        .map(|p| {
            CorrelationField::from_wavefunction(&shooter.eigenfunction(p.energy).unwrap())
                .unwrap()
                .current_to_density()
        })
        .fold(0.0, f64::max);

    // broken-phase eigenstate, residual at h and h/2
    let pair_box = SearchBox::new(0.0, 0.4, -1.0, 1.0).unwrap();
    let broken_residual = |h: f64| -> Option<(f64, f64)> {
        let w = broken_well(30.0, 60001);
        let g = Grid::with_step(30.0, h).unwrap();
        let scan = find_eigenvalues(&w, &g, &pair_box, 4, TOL, Execution::Parallel).unwrap();
        let p = scan.points.iter().find(|p| p.energy.im > 0.01)?;
        let psi = Shooter::new(&w, &g)
            .unwrap()
            .eigenfunction(p.energy)
            .unwrap();
        let field = CorrelationField::from_wavefunction(&psi).unwrap();
        let max_rho = field.rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Some((continuity_residual(&psi).unwrap(), max_rho))
    };
    let coarse = broken_residual(2e-3);
    let fine = broken_residual(1e-3);
    let (broken_ok, ratio, detail) = match (coarse, fine) {
        (Some((r1, m1)), Some((r2, m2))) => {
            let ratio = r1 / r2;
            (
                r1 < 1e-5 * m1 && r2 < 1e-5 * m2,
                ratio,
                format!("{r1:.2e} (h=2e-3) -> {r2:.2e} (h=1e-3), ratio {ratio:.2}"),
            )
        }
        _ => (
            false,
            f64::NAN,
            "no broken-phase eigenstate found".to_string(),
        ),
    };
    let ok = q_variation < 1e-5 && bound_ratio < 1e-6 && broken_ok && (3.0..=5.0).contains(&ratio);
    verdict(
        "10",
        ok,
        &format!(
            "scattering q variation {q_variation:.2e}; bound max|q|/max|rho| {bound_ratio:.2e}; broken residual {detail}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_11_special_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut rec, mut refl) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 1000 {
        let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let near_pole = z.re < 0.5 && (z.re.round() - z.re).abs() < 1e-3 && z.im.abs() < 1e-3;
        if near_pole {
            continue;
        }
        n += 1;
        let lz = lngamma(z).unwrap();
        rec = rec.max(log_rel(lngamma(z + 1.0).unwrap(), lz + z.ln()));
        let pi = std::f64::consts::PI;
        let sin = (pi * z).sin();
        refl = refl.max(log_rel(
            lz + lngamma(1.0 - z).unwrap(),
            Complex64::new(pi.ln(), 0.0) - sin.ln(),
        ));
    }
    let mut modulus = 0.0f64;
    for y in [0.5, 1.0, 2.0] {
        let pi = std::f64::consts::PI;
        let closed = pi / (y * (pi * y).sinh());
        let z = Complex64::new(0.0, y);
        let ours = (2.0 * lngamma(z).unwrap().re).exp();
        let series = (2.0 * lngamma_series(z).re).exp();
        modulus = modulus
            .max((ours - closed).abs() / closed)
            .max((ours - series).abs() / series);
    }
    let ok = rec < 1e-10 && refl < 1e-10 && modulus < 1e-10;
    verdict(
        "11",
        ok,
        &format!("1000 samples: recurrence {rec:.2e}, reflection {refl:.2e}; |Gamma(iy)|^2 {modulus:.2e}"),
    );
    assert!(ok);
}
