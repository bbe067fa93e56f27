//! Job execution shared by the single-command path and batch mode.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use spectre_core::brieskorn::{t_matrix, twist, LatticePair};
use spectre_core::error::Error;
use spectre_core::exactalg::rational::{parse_rational, render_rational};
use spectre_core::exactalg::matrix::QMatrix;
use spectre_core::lattice::{
    check_symmetry, convolve_spectra, dual_spectrum, lattice_pair_from_json, lattice_pair_to_json,
    monodromy_char_poly, spectral_polynomial, v_filtration_with, SpectrumMultiset, VOptions,
};
use spectre_core::newton::{newton_spectrum_with, NewtonSpectrumOptions};
use spectre_core::poly::MultiPoly;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// One unit of work: exactly one input source plus a command verb.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    /// spectrum: newton | vfilt | both (default both for polynomials).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// mellin: det-t | aomoto | dim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    /// twist constant, "p/q".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    /// Second input for convolve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars_b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_nondegeneracy_check: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_cap: Option<usize>,
}

pub enum Outcome {
    Ok(Value),
    Fail { class: i32, message: String },
}

impl Outcome {
    fn err(class: i32, message: impl Into<String>) -> Outcome {
        Outcome::Fail {
            class,
            message: message.into(),
        }
    }
}

fn exit_class(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::UnknownVariable(_)
        | Error::InvalidLattice(_)
        | Error::InvalidRational(_)
        | Error::IndexOutOfRange { .. }
        | Error::VariableMismatch => EXIT_USAGE,
        Error::NotConvenient { .. }
        | Error::NewtonDegenerate
        | Error::NonIsolatedCriticalLocus
        | Error::DegeneratePolyhedron { .. }
        | Error::ZeroCriticalValue
        | Error::SingularA0 => EXIT_PRECONDITION,
        _ => EXIT_COMPUTATION,
    }
}

macro_rules! try_job {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                return Outcome::Fail {
                    class: exit_class(&err),
                    message: err.to_string(),
                }
            }
        }
    };
}

enum Input {
    Poly(MultiPoly),
    Lattice(LatticePair),
}

fn load_input(
    poly: &Option<String>,
    vars: &Option<Vec<String>>,
    lattice: &Option<String>,
) -> Result<Input, Outcome> {
    match (poly, lattice) {
        (Some(_), Some(_)) => Err(Outcome::err(
            EXIT_USAGE,
            "give either a polynomial or a lattice file, not both",
        )),
        (None, None) => Err(Outcome::err(
            EXIT_USAGE,
            "an input is required: -f/--poly with --vars, or --lattice FILE",
        )),
        (Some(text), None) => {
            let Some(vars) = vars else {
                return Err(Outcome::err(EXIT_USAGE, "--vars is required with -f/--poly"));
            };
            if vars.len() < 2 {
                return Err(Outcome::err(
                    EXIT_PRECONDITION,
                    "polynomial pipelines need at least two variables (n >= 1)",
                ));
            }
            match spectre_core::poly::parse(text, vars) {
                Ok(f) => {
                    if f.is_zero() {
                        return Err(Outcome::err(EXIT_USAGE, "the zero polynomial has no invariants"));
                    }
                    Ok(Input::Poly(f))
                }
                Err(e) => Err(Outcome::Fail {
                    class: exit_class(&e),
                    message: e.to_string(),
                }),
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Outcome::err(EXIT_USAGE, format!("cannot read lattice file {path}: {e}"))
            })?;
            let value: Value = serde_json::from_str(&text).map_err(|e| {
                Outcome::err(EXIT_USAGE, format!("lattice file is not valid JSON: {e}"))
            })?;
            match lattice_pair_from_json(&value) {
                Ok(lp) => Ok(Input::Lattice(lp)),
                Err(e) => Err(Outcome::Fail {
                    class: exit_class(&e),
                    message: e.to_string(),
                }),
            }
        }
    }
}

fn lattice_of(input: &Input) -> Result<LatticePair, Error> {
    match input {
        Input::Poly(f) => t_matrix(f),
        Input::Lattice(lp) => Ok(lp.clone()),
    }
}

fn spectrum_json(s: &SpectrumMultiset) -> Value {
    Value::Array(
        s.to_pairs()
            .into_iter()
            .map(|(beta, mult)| json!({"beta": render_rational(&beta), "mult": mult}))
            .collect(),
    )
}

fn grid_json(m: &QMatrix) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| {
                Value::Array(
                    (0..m.cols)
                        .map(|j| Value::String(render_rational(&m[(i, j)])))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn poly_coeffs_json(p: &spectre_core::exactalg::unipoly::UniPoly) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| Value::String(render_rational(c)))
            .collect(),
    )
}

pub fn run_job(job: &JobSpec) -> Outcome {
    match job.command.as_str() {
        "milnor" => run_milnor(job),
        "spectrum" => run_spectrum(job),
        "tmatrix" => run_tmatrix(job),
        "goodbasis" => run_goodbasis(job),
        "monodromy" => run_monodromy(job),
        "mellin" => run_mellin(job),
        "dual" => run_dual(job),
        "convolve" => run_convolve(job),
        "twist" => run_twist(job),
        "check" => run_check(job),
        other => Outcome::err(EXIT_USAGE, format!("unknown command `{other}`")),
    }
}

fn require_poly(job: &JobSpec) -> Result<MultiPoly, Outcome> {
    match load_input(&job.poly, &job.vars, &job.lattice)? {
        Input::Poly(f) => Ok(f),
        Input::Lattice(_) => Err(Outcome::err(
            EXIT_USAGE,
            format!("`{}` needs a polynomial input", job.command),
        )),
    }
}

fn run_milnor(job: &JobSpec) -> Outcome {
    let f = match require_poly(job) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let md = try_job!(spectre_core::groebner::milnor_data(&f));
    let basis: Vec<String> = md
        .standard_monomials
        .iter()
        .map(|m| {
            MultiPoly::monomial_term(&f.vars, m.clone(), spectre_core::exactalg::rational::rat_int(1)).render()
        })
        .collect();
    Outcome::Ok(json!({
        "mu": md.mu,
        "standard_monomials": basis,
    }))
}

fn newton_opts(job: &JobSpec) -> NewtonSpectrumOptions {
    NewtonSpectrumOptions {
        skip_nondegeneracy_check: job.skip_nondegeneracy_check.unwrap_or(false),
    }
}

fn v_opts(job: &JobSpec) -> VOptions {
    VOptions {
        window_cap: job.window_cap,
    }
}

fn run_spectrum(job: &JobSpec) -> Outcome {
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let default_method = match &input {
        Input::Poly(_) => "both",
        Input::Lattice(_) => "vfilt",
    };
    let method = job.method.as_deref().unwrap_or(default_method);
    match (&input, method) {
        (Input::Lattice(_), "newton" | "both") => {
            return Outcome::err(EXIT_USAGE, "newton spectra need a polynomial input")
        }
        _ => {}
    }
    let mut out = serde_json::Map::new();
    let spectrum = match method {
        "newton" => {
            let Input::Poly(f) = &input else { unreachable!() };
            let s = try_job!(newton_spectrum_with(f, newton_opts(job)));
            out.insert("method".into(), "newton".into());
            s
        }
        "vfilt" => {
            let lp = try_job!(lattice_of(&input));
            let vf = try_job!(v_filtration_with(&lp, v_opts(job)));
            out.insert("method".into(), "vfilt".into());
            vf.spectrum
        }
        "both" => {
            let Input::Poly(f) = &input else { unreachable!() };
            let newton = try_job!(newton_spectrum_with(f, newton_opts(job)));
            let lp = try_job!(t_matrix(f));
            let vf = try_job!(v_filtration_with(&lp, v_opts(job)));
            let agree = newton == vf.spectrum;
            out.insert("method".into(), "both".into());
            out.insert("checks".into(), json!({ "agreement": agree }));
            if !agree {
                out.insert("spectrum_newton".into(), spectrum_json(&newton));
                out.insert("spectrum_vfilt".into(), spectrum_json(&vf.spectrum));
                return Outcome::err(
                    EXIT_COMPUTATION,
                    format!(
                        "newton and V-filtration spectra disagree: {}",
                        Value::Object(out)
                    ),
                );
            }
            newton
        }
        other => {
            return Outcome::err(
                EXIT_USAGE,
                format!("unknown spectrum method `{other}` (newton | vfilt | both)"),
            )
        }
    };
    out.insert("mu".into(), json!(spectrum.total()));
    out.insert("spectrum".into(), spectrum_json(&spectrum));
    let (factored, expanded) = spectral_polynomial(&spectrum);
    out.insert(
        "spectral_polynomial".into(),
        json!({"factored": factored, "expanded": poly_coeffs_json(&expanded)}),
    );
    Outcome::Ok(Value::Object(out))
}

fn theta_matrix_json(t: &spectre_core::exactalg::theta::ThetaMatrix) -> Value {
    Value::Array(
        (0..t.size)
            .map(|i| {
                Value::Array(
                    (0..t.size)
                        .map(|j| {
                            Value::Array(
                                t.get(i, j)
                                    .coeffs()
                                    .iter()
                                    .map(|c| Value::String(render_rational(c)))
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn run_tmatrix(job: &JobSpec) -> Outcome {
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    Outcome::Ok(json!({
        "mu": lp.mu,
        "weight": lp.weight_w,
        "degree": lp.t_matrix.deg(),
        "t_matrix": theta_matrix_json(&lp.t_matrix),
        "a0": grid_json(&lp.a0()),
        "a1": grid_json(&lp.a1()),
        "lattice": lattice_pair_to_json(&lp),
    }))
}

fn run_goodbasis(job: &JobSpec) -> Outcome {
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    let (vf, gb) = try_job!(spectre_core::birkhoff::good_basis(&lp));
    if let Some(degree) = gb.stalled {
        return Outcome::err(
            EXIT_COMPUTATION,
            format!("Birkhoff reduction stalled at theta-degree {degree}"),
        );
    }
    let report = spectre_core::birkhoff::verify_good_basis(&gb, &vf.spectrum);
    Outcome::Ok(json!({
        "mu": lp.mu,
        "spectrum": spectrum_json(&vf.spectrum),
        "goodbasis": spectre_core::birkhoff::good_basis_to_json(&gb),
        "a0": grid_json(&gb.a0),
        "a1": grid_json(&gb.a1),
        "report": serde_json::to_value(&report).expect("serializable"),
    }))
}

fn run_monodromy(job: &JobSpec) -> Outcome {
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    let vf = try_job!(v_filtration_with(&lp, v_opts(job)));
    let cp = try_job!(monodromy_char_poly(&vf.spectrum));
    Outcome::Ok(json!({
        "mu": lp.mu,
        "spectrum": spectrum_json(&vf.spectrum),
        "monodromy_char_poly": poly_coeffs_json(&cp),
        "rendered": cp.render("T"),
    }))
}

fn run_mellin(job: &JobSpec) -> Outcome {
    let op = job.op.as_deref().unwrap_or("det-t");
    if !matches!(op, "det-t" | "aomoto" | "dim") {
        return Outcome::err(
            EXIT_USAGE,
            format!("unknown mellin operation `{op}` (det-t | aomoto | dim)"),
        );
    }
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    let (vf, gb) = try_job!(spectre_core::birkhoff::good_basis(&lp));
    if let Some(degree) = gb.stalled {
        return Outcome::err(
            EXIT_COMPUTATION,
            format!("Birkhoff reduction stalled at theta-degree {degree}"),
        );
    }
    match op {
        "det-t" => {
            let det = spectre_core::mellin::det_t_mellin(&gb);
            Outcome::Ok(json!({
                "mu": lp.mu,
                "det_t": {
                    "factored": det.factored,
                    "num": poly_coeffs_json(&det.value.num),
                    "den": poly_coeffs_json(&det.value.den),
                },
            }))
        }
        "aomoto" => {
            let a = try_job!(spectre_core::mellin::aomoto_determinant(&gb, &vf.spectrum));
            Outcome::Ok(json!({
                "mu": lp.mu,
                "c": render_rational(&a.c),
                "aomoto": {
                    "factored": a.factored,
                    "num": poly_coeffs_json(&a.value.num),
                    "den": poly_coeffs_json(&a.value.den),
                },
            }))
        }
        _ => Outcome::Ok(json!({
            "mu": lp.mu,
            "mellin_dimension": spectre_core::mellin::mellin_dimension(&gb),
            "irregularity_full": spectre_core::mellin::irregularity_full(&gb),
        })),
    }
}

fn run_dual(job: &JobSpec) -> Outcome {
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    let vf = try_job!(v_filtration_with(&lp, v_opts(job)));
    let dual = dual_spectrum(&vf.spectrum);
    Outcome::Ok(json!({
        "mu": lp.mu,
        "spectrum": spectrum_json(&vf.spectrum),
        "dual": spectrum_json(&dual),
    }))
}

fn run_convolve(job: &JobSpec) -> Outcome {
    let a = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let b = match load_input(&job.poly_b, &job.vars_b, &job.lattice_b) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp_a = try_job!(lattice_of(&a));
    let lp_b = try_job!(lattice_of(&b));
    let sa = try_job!(v_filtration_with(&lp_a, v_opts(job))).spectrum;
    let sb = try_job!(v_filtration_with(&lp_b, v_opts(job))).spectrum;
    let conv = convolve_spectra(&sa, &sb);
    Outcome::Ok(json!({
        "spectrum_a": spectrum_json(&sa),
        "spectrum_b": spectrum_json(&sb),
        "convolution": spectrum_json(&conv),
        "total": conv.total(),
    }))
}

fn run_twist(job: &JobSpec) -> Outcome {
    let Some(c_text) = &job.c else {
        return Outcome::err(EXIT_USAGE, "twist needs -c RATIONAL");
    };
    let c = try_job!(parse_rational(c_text));
    let input = match load_input(&job.poly, &job.vars, &job.lattice) {
        Ok(i) => i,
        Err(o) => return o,
    };
    let lp = try_job!(lattice_of(&input));
    let twisted = twist(&lp, &c);
    let spectrum = try_job!(v_filtration_with(&twisted, v_opts(job))).spectrum;
    Outcome::Ok(json!({
        "c": render_rational(&c),
        "mu": twisted.mu,
        "a0": grid_json(&twisted.a0()),
        "a1": grid_json(&twisted.a1()),
        "lattice": lattice_pair_to_json(&twisted),
        "spectrum": spectrum_json(&spectrum),
    }))
}

fn run_check(job: &JobSpec) -> Outcome {
    let f = match require_poly(job) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let md = try_job!(spectre_core::groebner::milnor_data(&f));
    let newton = try_job!(newton_spectrum_with(&f, newton_opts(job)));
    let lp = try_job!(spectre_core::brieskorn::t_matrix_from_milnor(&md));
    let vf = try_job!(v_filtration_with(&lp, v_opts(job)));
    let w = f.nvars() as i64;
    let zero = spectre_core::exactalg::rational::rat_int(0);
    let hi = spectre_core::exactalg::rational::rat_int(w);
    let checks = json!({
        "newton_vs_vfilt": newton == vf.spectrum,
        "symmetry": check_symmetry(&vf.spectrum, w),
        "positivity": vf.spectrum.is_strictly_inside(&zero, &hi),
        "degree": newton.total() == md.mu && vf.spectrum.total() == md.mu,
    });
    Outcome::Ok(json!({
        "mu": md.mu,
        "weight": w,
        "spectrum": spectrum_json(&vf.spectrum),
        "checks": checks,
    }))
}
