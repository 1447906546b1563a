//! Job runners. Each returns the rendered report plus an optional numerical
//! failure summary; the report is written either way.

use std::collections::BTreeSet;

use ptcorr::correlation::{continuity_residual, pt_overlap, CorrelationField};
use ptcorr::exec::{map_ordered, Execution};
use ptcorr::potential::Scarf2;
use ptcorr::scattering::{
    flux_deviation_analytic, identity_sweep, s_from_m, scarf2_analytic_amplitudes,
    scarf2_transmission_as_printed, IdentityReport, Mat2, NamedMetric, ReflectionVariant,
    ScatteringError, ScatteringSetup,
};
use ptcorr::spectrum::{
    default_search_box, find_eigenvalues, phase_classify, scarf2_pole_spectrum, Classification,
    FailureReason, Shooter, SpectrumScan,
};
use ptcorr::{Complex64, PotentialSpec, Wavefunction};
use serde_json::{json, Map, Value};

use crate::config::{Command, Format, JobConfig};
use crate::error::CliError;

pub enum Rendered {
    Json(Value),
    /// One or more CSV documents; the label distinguishes several files.
    Csv(Vec<(Option<String>, Vec<u8>)>),
}

pub struct Outcome {
    pub rendered: Rendered,
    pub failure: Option<String>,
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cx(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn mat(m: &Mat2) -> Value {
    json!([
        [cx(m[(0, 0)]), cx(m[(0, 1)])],
        [cx(m[(1, 0)]), cx(m[(1, 1)])]
    ])
}

/// Shortest round-trip text, with an exponent for very small or large values.
fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite floats serialize")
    } else {
        String::new()
    }
}

fn params(job: &JobConfig) -> Value {
    let mut p = Map::new();
    match job.potential.spec.as_scarf2() {
        Some(s) => {
            p.insert("potential".into(), json!("scarf2"));
            p.insert("A".into(), num(s.a_pot));
            p.insert("B".into(), num(s.b_pot));
            p.insert("alpha".into(), num(s.alpha));
        }
        None => {
            p.insert("potential".into(), json!("custom"));
            let path = job
                .potential
                .custom_path
                .as_ref()
                .map(|p| p.display().to_string());
            p.insert("custom".into(), json!(path));
        }
    }
    p.insert("L".into(), num(job.grid.half_width()));
    p.insert("h".into(), num(job.grid.step()));
    p.insert("n_points".into(), json!(job.grid.len()));
    p.insert("tol".into(), num(job.tol));
    Value::Object(p)
}

fn csv_doc(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn run(job: &JobConfig) -> Result<Outcome, CliError> {
    match job.command {
        Command::Scatter => scatter(job, true),
        Command::Identities => scatter(job, false),
        Command::Spectrum => spectrum(job),
        Command::PhaseDiagram => phase_diagram(job),
        Command::Correlation => correlation(job),
        Command::Scarf2Validate => scarf2_validate(job),
    }
}

/// Closed-form amplitudes with the corrected reflection formula; the
/// as-printed reflection is carried alongside for comparison.
fn analytic_block(p: &Scarf2, k: f64) -> Value {
    let amplitudes =
        scarf2_analytic_amplitudes(p, k, ReflectionVariant::SinCorrected).and_then(|c| {
            Ok((
                c,
                scarf2_analytic_amplitudes(p, k, ReflectionVariant::AsPrinted)?,
            ))
        });
    match amplitudes {
        Ok((corrected, printed)) => json!({
            "T": cx(corrected.t),
            "R": cx(corrected.r),
            "variant": corrected.variant.name(),
            "R_as_printed": cx(printed.r),
            "flux_deviation": flux_deviation_analytic(p, k).map_or(Value::Null, num),
        }),
        Err(e) => json!({"error": e.to_string()}),
    }
}

fn scatter(job: &JobConfig, full: bool) -> Result<Outcome, CliError> {
    let spec = &job.potential.spec;
    let sweep = identity_sweep(spec, &job.ks, &job.grid, &NamedMetric::defaults(), job.exec)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut ok: Vec<IdentityReport> = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in sweep {
        match r {
            Ok(rep) => ok.push(rep),
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    let failure = (!failures.is_empty()).then(|| {
        let ks: Vec<String> = failures.iter().map(|(k, _)| k.to_string()).collect();
        format!(
            "{} of {} momenta failed (k = {})",
            failures.len(),
            job.ks.len(),
            ks.join(", ")
        )
    });

    let rendered = match job.format {
        Format::Json => {
            let reports: Vec<Value> = ok
                .iter()
                .map(|rep| {
                    let defects: Map<String, Value> = rep
                        .defects
                        .iter()
                        .map(|(n, d)| (n.clone(), num(*d)))
                        .collect();
                    if !full {
                        return json!({"k": num(rep.k), "defects": defects});
                    }
                    let s = &rep.scattering;
                    let analytic = spec
                        .as_scarf2()
                        .map_or(Value::Null, |p| analytic_block(p, rep.k));
                    json!({
                        "k": num(rep.k),
                        "M": mat(&rep.transfer.m),
                        "S": mat(&s.s),
                        "T": cx(s.transmission_left()),
                        "R": cx(s.reflection_left()),
                        "R_right": cx(s.reflection_right()),
                        "flux_deviation": num(s.flux_deviation()),
                        "defects": defects,
                        "analytic": analytic,
                    })
                })
                .collect();
            let failures: Vec<Value> = failures
                .iter()
                .map(|(k, e)| json!({"k": num(*k), "error": e}))
                .collect();
            Rendered::Json(json!({
                "command": job.command.name(),
                "params": params(job),
                "reports": reports,
                "failures": failures,
            }))
        }
        Format::Csv => {
            let keys: BTreeSet<&String> = ok.iter().flat_map(|r| r.defects.keys()).collect();
            let mut header: Vec<String> = vec!["k".into()];
            if full {
                header.extend(["re_T", "im_T", "re_R", "im_R", "flux_deviation"].map(String::from));
            }
            header.extend(keys.iter().map(|k| k.to_string()));
            let rows: Vec<Vec<String>> = ok
                .iter()
                .map(|rep| {
                    let s = &rep.scattering;
                    let mut row = vec![fmt_f(rep.k)];
                    if full {
                        let (t, r) = (s.transmission_left(), s.reflection_left());
                        row.extend([t.re, t.im, r.re, r.im, s.flux_deviation()].map(fmt_f));
                    }
                    row.extend(
                        keys.iter()
                            .map(|k| rep.defects.get(*k).map_or(String::new(), |d| fmt_f(*d))),
                    );
                    row
                })
                .collect();
            Rendered::Csv(vec![(None, csv_doc(&header, &rows)?)])
        }
    };
    Ok(Outcome { rendered, failure })
}

fn reason_name(r: FailureReason) -> &'static str {
    match r {
        FailureReason::NoConvergence => "no-convergence",
        FailureReason::BranchError => "branch-error",
        FailureReason::OutsideBox => "outside-box",
        FailureReason::SingularJacobian => "singular-jacobian",
        FailureReason::IntegrationFailed => "integration-failed",
    }
}

fn class_name(c: Classification) -> &'static str {
    match c {
        Classification::Bound => "bound",
        Classification::ResonancePairMember => "resonance-pair-member",
    }
}

fn scan(job: &JobConfig, spec: &PotentialSpec, exec: Execution) -> Result<SpectrumScan, CliError> {
    let default =
        default_search_box(spec, &job.grid).map_err(|e| CliError::Validation(e.to_string()))?;
    let search_box = job.search.apply(default)?;
    find_eigenvalues(spec, &job.grid, &search_box, job.seeds, job.tol, exec)
        .map_err(|e| CliError::Numerical(e.to_string()))
}

fn spectrum(job: &JobConfig) -> Result<Outcome, CliError> {
    let spec = &job.potential.spec;
    let default =
        default_search_box(spec, &job.grid).map_err(|e| CliError::Validation(e.to_string()))?;
    let search_box = job.search.apply(default)?;
    let result = find_eigenvalues(spec, &job.grid, &search_box, job.seeds, job.tol, job.exec)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let phase = phase_classify(&result.points, job.tol.max(1e-6)).ok();
    let failure = phase
        .is_none()
        .then(|| "no eigenvalues found in the search box".to_string());

    let rendered = match job.format {
        Format::Json => {
            let points: Vec<Value> = result
                .points
                .iter()
                .map(|p| {
                    json!({
                        "E": cx(p.energy),
                        "kappa": cx(p.kappa),
                        "class": class_name(p.classification),
                        "n_index": p.n_index,
                        "mismatch": num(p.mismatch),
                        "pt_defect": num(p.pt_defect),
                        "partner_mismatch": p.partner_mismatch.map(num),
                        "pt_partner_defect": p.pt_partner_defect.map(num),
                    })
                })
                .collect();
            let poles = spec
                .as_scarf2()
                .map(scarf2_pole_spectrum)
                .map_or(Value::Null, |c| {
                    let list = |v: &[ptcorr::spectrum::PoleCandidate]| {
                        v.iter().map(|p| cx(p.energy)).collect::<Vec<_>>()
                    };
                    json!({"family1": list(&c.family1), "family2": list(&c.family2)})
                });
            let failures: Vec<Value> = result
                .failures
                .iter()
                .map(|f| json!({"seed": cx(f.seed), "last": cx(f.last), "reason": reason_name(f.reason)}))
                .collect();
            Rendered::Json(json!({
                "command": job.command.name(),
                "spec": params(job),
                "search_box": {
                    "re_min": num(search_box.re_min), "re_max": num(search_box.re_max),
                    "im_min": num(search_box.im_min), "im_max": num(search_box.im_max),
                },
                "phase": phase.map(|p| p.name()),
                "points": points,
                "pole_candidates": poles,
                "failures": failures,
            }))
        }
        Format::Csv => {
            let header: Vec<String> = [
                "re_E",
                "im_E",
                "re_kappa",
                "im_kappa",
                "class",
                "n_index",
                "mismatch",
                "pt_defect",
            ]
            .map(String::from)
            .to_vec();
            let rows: Vec<Vec<String>> = result
                .points
                .iter()
                .map(|p| {
                    vec![
                        fmt_f(p.energy.re),
                        fmt_f(p.energy.im),
                        fmt_f(p.kappa.re),
                        fmt_f(p.kappa.im),
                        class_name(p.classification).to_string(),
                        p.n_index.map_or(String::new(), |n| n.to_string()),
                        fmt_f(p.mismatch),
                        fmt_f(p.pt_defect),
                    ]
                })
                .collect();
            Rendered::Csv(vec![(None, csv_doc(&header, &rows)?)])
        }
    };
    Ok(Outcome { rendered, failure })
}

fn phase_diagram(job: &JobConfig) -> Result<Outcome, CliError> {
    let base = job
        .potential
        .spec
        .as_scarf2()
        .expect("validated as Scarf-II");
    let rows = map_ordered(
        &job.b_values,
        job.exec,
        |&b| -> Result<(f64, Vec<Complex64>, Option<&'static str>), String> {
            let spec =
                PotentialSpec::scarf2(base.a_pot, b, base.alpha).map_err(|e| e.to_string())?;
            let result = scan(job, &spec, Execution::Sequential).map_err(|e| e.to_string())?;
            let phase = phase_classify(&result.points, job.tol.max(1e-6))
                .ok()
                .map(|p| p.name());
            Ok((b, result.points.iter().map(|p| p.energy).collect(), phase))
        },
    );
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (b, row) in job.b_values.iter().zip(rows) {
        match row {
            Ok(r) => ok.push(r),
            Err(e) => failures.push((*b, e)),
        }
    }
    let failure = (!failures.is_empty()).then(|| {
        format!(
            "{} of {} B values failed",
            failures.len(),
            job.b_values.len()
        )
    });
    let max_im = |es: &[Complex64]| es.iter().map(|e| e.im.abs()).fold(0.0, f64::max);

    let rendered = match job.format {
        Format::Json => {
            let scan: Vec<Value> = ok
                .iter()
                .map(|(b, es, phase)| {
                    json!({
                        "B": num(*b),
                        "phase": phase,
                        "eigenvalues": es.iter().map(|e| cx(*e)).collect::<Vec<_>>(),
                        "max_abs_im": num(max_im(es)),
                    })
                })
                .collect();
            let failures: Vec<Value> = failures
                .iter()
                .map(|(b, e)| json!({"B": num(*b), "error": e}))
                .collect();
            Rendered::Json(json!({
                "command": job.command.name(),
                "params": params(job),
                "scan": scan,
                "failures": failures,
            }))
        }
        Format::Csv => {
            let header: Vec<String> = ["B", "phase", "n_eigenvalues", "max_abs_im"]
                .map(String::from)
                .to_vec();
            let rows: Vec<Vec<String>> = ok
                .iter()
                .map(|(b, es, phase)| {
                    vec![
                        fmt_f(*b),
                        phase.unwrap_or("").to_string(),
                        es.len().to_string(),
                        fmt_f(max_im(es)),
                    ]
                })
                .collect();
            Rendered::Csv(vec![(None, csv_doc(&header, &rows)?)])
        }
    };
    Ok(Outcome { rendered, failure })
}

struct CorrelationState {
    kind: &'static str,
    label: String,
    k: Option<f64>,
    wave: Wavefunction,
}

fn correlation(job: &JobConfig) -> Result<Outcome, CliError> {
    let spec = &job.potential.spec;
    let states: Vec<CorrelationState> = if job.ks_explicit {
        let setup = ScatteringSetup::new(spec, &job.grid)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let waves = map_ordered(&job.ks, job.exec, |&k| setup.scattering_state(k));
        job.ks
            .iter()
            .zip(waves)
            .map(|(&k, w)| {
                Ok(CorrelationState {
                    kind: "scattering",
                    label: format!("k{k}"),
                    k: Some(k),
                    wave: w.map_err(|e: ScatteringError| {
                        CliError::Numerical(format!("k = {k}: {e}"))
                    })?,
                })
            })
            .collect::<Result<_, CliError>>()?
    } else {
        let result = scan(job, spec, job.exec)?;
        if result.points.is_empty() {
            return Err(CliError::Numerical(
                "no eigenstates found in the search box".into(),
            ));
        }
        let shooter =
            Shooter::new(spec, &job.grid).map_err(|e| CliError::Numerical(e.to_string()))?;
        result
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(CorrelationState {
                    kind: "eigenstate",
                    label: format!("state{i}"),
                    k: None,
                    wave: shooter
                        .eigenfunction(p.energy)
                        .map_err(|e| CliError::Numerical(e.to_string()))?,
                })
            })
            .collect::<Result<_, CliError>>()?
    };

    let fields = map_ordered(&states, job.exec, |s| {
        CorrelationField::from_wavefunction(&s.wave)
    });
    let fields = fields
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Numerical(e.to_string()))?;

    let rendered = match job.format {
        Format::Json => {
            let mut list = Vec::new();
            for (s, f) in states.iter().zip(&fields) {
                let residual =
                    continuity_residual(&s.wave).map_err(|e| CliError::Numerical(e.to_string()))?;
                let (c, pt_defect) =
                    pt_overlap(&s.wave).map_err(|e| CliError::Numerical(e.to_string()))?;
                let max_rho = f.rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
                list.push(json!({
                    "kind": s.kind,
                    "k": s.k.map(num),
                    "E": cx(s.wave.energy()),
                    "continuity_residual": num(residual),
                    "max_abs_rho": num(max_rho),
                    "current_variation": num(f.current_variation()),
                    "current_to_density": num(f.current_to_density()),
                    "pt_overlap": cx(c),
                    "pt_defect": num(pt_defect),
                }));
            }
            Rendered::Json(json!({
                "command": job.command.name(),
                "params": params(job),
                "states": list,
            }))
        }
        Format::Csv => {
            let single = fields.len() == 1;
            let mut docs = Vec::new();
            for (s, f) in states.iter().zip(&fields) {
                let mut buf = Vec::new();
                f.write_csv(&mut buf)?;
                docs.push(((!single).then(|| s.label.clone()), buf));
            }
            Rendered::Csv(docs)
        }
    };
    Ok(Outcome {
        rendered,
        failure: None,
    })
}

fn scarf2_validate(job: &JobConfig) -> Result<Outcome, CliError> {
    let p = *job
        .potential
        .spec
        .as_scarf2()
        .expect("validated as Scarf-II");
    let setup = ScatteringSetup::new(&job.potential.spec, &job.grid)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut ks = job.ks.clone();
    ks.sort_by(f64::total_cmp);

    struct Row {
        k: f64,
        t: Complex64,
        r: Complex64,
        measured_flux: f64,
        variants: Vec<(ReflectionVariant, f64, f64)>,
        t_printed_error: f64,
        closed_flux: Result<f64, String>,
    }
    let rows = map_ordered(&ks, job.exec, |&k| -> Result<Row, String> {
        let s = s_from_m(&setup.transfer_matrix(k).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let (t, r) = (s.transmission_left(), s.reflection_left());
        let scale = t.norm().max(r.norm());
        let mut variants = Vec::new();
        for v in ReflectionVariant::ALL {
            let amp = scarf2_analytic_amplitudes(&p, k, v).map_err(|e| e.to_string())?;
            variants.push((v, (amp.r - r).norm() / scale, (amp.t - t).norm() / t.norm()));
        }
        let kc = Complex64::new(k, 0.0);
        let printed = scarf2_transmission_as_printed(&p, kc).map_err(|e| e.to_string())?;
        Ok(Row {
            k,
            t,
            r,
            measured_flux: s.flux_deviation(),
            variants,
            t_printed_error: (printed - t).norm() / t.norm(),
            closed_flux: flux_deviation_analytic(&p, k).map_err(|e| e.to_string()),
        })
    });
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (k, row) in ks.iter().zip(rows) {
        match row {
            Ok(r) => ok.push(r),
            Err(e) => failures.push(json!({"k": num(*k), "error": e})),
        }
    }
    let failure = (!failures.is_empty())
        .then(|| format!("{} of {} momenta failed", failures.len(), ks.len()));

    let mut summary = Vec::new();
    let mut winner: Option<(ReflectionVariant, f64)> = None;
    for (i, v) in ReflectionVariant::ALL.iter().enumerate() {
        let max_r = ok.iter().map(|row| row.variants[i].1).fold(0.0, f64::max);
        let max_t = ok.iter().map(|row| row.variants[i].2).fold(0.0, f64::max);
        summary.push(json!({"variant": v.name(), "max_rel_error_R": num(max_r), "max_rel_error_T": num(max_t)}));
        if !ok.is_empty() && winner.map_or(true, |(_, e)| max_r < e) {
            winner = Some((*v, max_r));
        }
    }
    let per_k: Vec<Value> = ok
        .iter()
        .map(|row| {
            let (closed, abs_err, rel_err) = match &row.closed_flux {
                Ok(c) => {
                    let d = (c - row.measured_flux).abs();
                    let scale = c.abs().max((row.r.norm_sqr() + row.t.norm_sqr()).max(1.0));
                    (num(*c), num(d), num(d / scale))
                }
                Err(e) => (json!({"error": e}), Value::Null, Value::Null),
            };
            json!({
                "k": num(row.k),
                "T": cx(row.t),
                "R": cx(row.r),
                "rel_error_R": row.variants.iter().map(|(v, r, _)| (v.name().to_string(), num(*r))).collect::<Map<_, _>>(),
                "rel_error_T_printed_denominator": num(row.t_printed_error),
                "flux_deviation": {"measured": num(row.measured_flux), "closed_form": closed, "abs_error": abs_err, "rel_error": rel_err},
            })
        })
        .collect();
    let max_flux_rel = ok
        .iter()
        .filter_map(|row| {
            row.closed_flux.as_ref().ok().map(|c| {
                let scale = c.abs().max((row.r.norm_sqr() + row.t.norm_sqr()).max(1.0));
                (c - row.measured_flux).abs() / scale
            })
        })
        .fold(0.0, f64::max);
    let max_t_printed = ok.iter().map(|row| row.t_printed_error).fold(0.0, f64::max);
    let rendered = Rendered::Json(json!({
        "command": job.command.name(),
        "params": params(job),
        "variants": summary,
        "winner": winner.map(|(v, _)| v.name()),
        "winner_max_rel_error_R": winner.map(|(_, e)| num(e)),
        "transmission_printed_denominator_max_rel_error": num(max_t_printed),
        "flux_deviation_max_rel_error": num(max_flux_rel),
        "per_k": per_k,
        "failures": failures,
    }));
    Ok(Outcome { rendered, failure })
}
