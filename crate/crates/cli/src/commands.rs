//! The six commands.  Each returns an [`Outcome`]: the structured result
//! object, an optional validity block, the human rendering, and the exit
//! code (0, or 3 when a verification found a mismatch).
//!
//! Both renderings print the same exact rational strings, so nothing is
//! lost by choosing one over the other.

use num_traits::Zero;
use serde_json::{json, Map, Value};

use fqh_bundle::chern::{
    ch_bruteforce, ch_closed_form, ch_closed_form_sign_flipped, BRUTEFORCE_GENERATOR_LIMIT,
};
use fqh_bundle::config::{
    asymptotic_conductance, delta_n, max_particle_vector, particle_max_analysis, solve_shift,
};
use fqh_bundle::grassmann::{wick_bruteforce, wick_closed};
use fqh_bundle::{
    Algebra, Configuration, Error, IntSymMatrix, Rational, Subset, ValidityReport,
};

use crate::job::{CliError, JobSpec, VerifyParams, EXIT_VERIFICATION_FAILURE};

/// What a command produced, before rendering to stdout / `--out`.
pub struct Outcome {
    pub result: Value,
    pub validity: Option<Value>,
    pub human: String,
    pub exit: i32,
}

impl Outcome {
    fn ok(result: Value, validity: Option<Value>, human: String) -> Self {
        Outcome {
            result,
            validity,
            human,
            exit: 0,
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn rat_strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(Rational::to_string).collect()
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn validity_json(v: &ValidityReport) -> Value {
    json!({
        "coupling_minus_identity_psd": v.coupling_minus_identity_psd,
        "quasiholes_nonnegative": v.quasiholes_nonnegative,
        "kodaira_bound": v.kodaira_bound,
        "particle_constraint": v.particle_constraint,
        "coupling_nondegenerate": v.coupling_nondegenerate,
        "certified": v.certified(),
        "all": v.all(),
    })
}

fn validity_line(v: &ValidityReport) -> String {
    format!(
        "K-I PSD: {} | p >= 0: {} | vanishing bound: {} | n > 2g-1: {} | det(K) != 0: {} | certified: {}",
        yes_no(v.coupling_minus_identity_psd),
        yes_no(v.quasiholes_nonnegative),
        yes_no(v.kodaira_bound),
        yes_no(v.particle_constraint),
        yes_no(v.coupling_nondegenerate),
        yes_no(v.certified()),
    )
}

/// `chern`: resolve the configuration, run the closed-form pipeline, and
/// report rank, conductance, coefficients, and the validity flags.
pub fn chern(job: &JobSpec) -> Result<Outcome, CliError> {
    let cfg = job.resolve_configuration()?;
    let quasiholes = cfg.quasiholes();
    let character = cfg.chern_character()?;
    let validity = cfg.validity();

    let rank = character.rank();
    let mut note: Option<String> = None;
    let conductance = if cfg.genus() == 0 {
        note = Some("genus 0 carries no degree-one coefficient; conductance undefined".into());
        None
    } else if cfg.rank_vanishes() {
        note = Some("negative quasi-hole count forces rank 0; conductance undefined".into());
        None
    } else if rank.is_zero() {
        note = Some("rank is zero; conductance undefined".into());
        None
    } else {
        Some(character.conductance()?)
    };

    let result = json!({
        "rank": rank.to_string(),
        "conductance": conductance.as_ref().map(Rational::to_string),
        "ch": rat_strings(character.coeffs()),
        "degrees": cfg.degrees(),
        "particles": cfg.particles(),
        "quasiholes": quasiholes,
        "note": note,
    });

    let mut human = format!("configuration : {cfg}\n");
    human += &format!("quasi-holes   : p={quasiholes:?}\n");
    human += &format!("rank          : {rank}\n");
    human += &format!(
        "conductance   : {}\n",
        conductance
            .as_ref()
            .map_or_else(|| "undefined".to_string(), Rational::to_string)
    );
    human += &format!("ch            : {character}\n");
    if let Some(text) = &note {
        human += &format!("note          : {text}\n");
    }
    human += &format!("validity      : {}\n", validity_line(&validity));

    Ok(Outcome::ok(result, Some(validity_json(&validity)), human))
}

/// `shift`: solve `K n⃗₀ = d⃗ − (g−1) K⃗` exactly.
pub fn shift(job: &JobSpec) -> Result<Outcome, CliError> {
    let coupling = job.coupling_matrix()?;
    let layers = coupling.size();
    let degrees = job
        .degrees(layers)?
        .ok_or_else(|| CliError::invalid("shift needs d"))?;
    let solution = solve_shift(&coupling, job.g, &degrees)?;

    let result = json!({
        "particles": rat_strings(&solution.particles),
        "integral": solution.integral,
        "admissible": solution.admissible,
        "integer_particles": solution.integer_particles(),
    });
    let human = format!(
        "n0         : ({})\nintegral   : {}\nadmissible : {}\n",
        join(&solution.particles),
        yes_no(solution.integral),
        yes_no(solution.admissible),
    );
    Ok(Outcome::ok(result, None, human))
}

/// `analyze`: coupling diagnostics (determinant, inverse column sums,
/// maximization flag), plus shift / quasi-hole blocks when `d` / `p` are
/// present.
pub fn analyze(job: &JobSpec) -> Result<Outcome, CliError> {
    let coupling = job.coupling_matrix()?;
    let layers = coupling.size();
    let det = coupling.det();
    let psd = coupling.minus_identity().is_psd();

    let mut result = Map::new();
    result.insert("det".into(), json!(det.to_string()));
    result.insert("coupling_minus_identity_psd".into(), json!(psd));
    let mut human = format!("coupling      : {coupling}\n");
    human += &format!("det(K)        : {det}\n");
    human += &format!("K - I PSD     : {}\n", yes_no(psd));

    if det.is_zero() {
        let text = "singular coupling: inverse diagnostics unavailable";
        result.insert("note".into(), json!(text));
        human += &format!("note          : {text}\n");
        return Ok(Outcome::ok(Value::Object(result), None, human));
    }

    let report = particle_max_analysis(&coupling)?;
    let entry_sum = coupling.inverse()?.entry_sum();
    result.insert("inverse_entry_sum".into(), json!(entry_sum.to_string()));
    result.insert("column_sums".into(), json!(rat_strings(&report.column_sums)));
    result.insert("maximizes_particles".into(), json!(report.maximizes));
    human += &format!("|K^-1|        : {entry_sum}\n");
    human += &format!("C             : ({})\n", join(&report.column_sums));
    human += &format!("maximizes n   : {}\n", yes_no(report.maximizes));

    if let Some(degrees) = job.degrees(layers)? {
        let solution = solve_shift(&coupling, job.g, &degrees)?;
        result.insert(
            "shift".into(),
            json!({
                "particles": rat_strings(&solution.particles),
                "integral": solution.integral,
                "admissible": solution.admissible,
            }),
        );
        human += &format!(
            "shift n0      : ({}) [integral: {}, admissible: {}]\n",
            join(&solution.particles),
            yes_no(solution.integral),
            yes_no(solution.admissible),
        );
        match max_particle_vector(&coupling, job.g, &degrees) {
            Ok(n) => {
                human += &format!("max particles : {n:?}\n");
                result.insert("max_particles".into(), json!(n));
            }
            Err(Error::Precondition(text)) => {
                human += &format!("max particles : unavailable ({text})\n");
                result.insert("max_particles_note".into(), json!(text));
            }
            Err(other) => return Err(other.into()),
        }
    }

    if let Some(p) = job.quasiholes(layers)? {
        let delta = delta_n(&coupling, &p)?;
        result.insert(
            "delta".into(),
            json!({
                "per_layer": rat_strings(&delta.per_layer),
                "total": delta.total.to_string(),
            }),
        );
        human += &format!(
            "delta n       : ({}) at p={p:?}, total {}\n",
            join(&delta.per_layer),
            delta.total
        );
    }

    Ok(Outcome::ok(Value::Object(result), None, human))
}

/// `wick`: evaluate one flux-pair Gaussian integral both ways and compare.
pub fn wick(job: &JobSpec) -> Result<Outcome, CliError> {
    let coupling = job.coupling_matrix()?;
    let layers = coupling.size();
    if job.g == 0 {
        return Err(CliError::invalid("wick needs genus >= 1 for a flux pair"));
    }
    let genus = job.g;
    let cycle = job.cycle.unwrap_or(0);
    if cycle >= genus {
        return Err(CliError::invalid(format!(
            "cycle {cycle} out of range for genus {genus}"
        )));
    }
    let indices = job.insertion.clone().unwrap_or_default();
    if let Some(&bad) = indices.iter().find(|&&i| i >= layers) {
        return Err(CliError::invalid(format!(
            "insertion layer {bad} out of range for a {layers}-layer coupling"
        )));
    }
    let generators = 2 * genus * layers + 2 * genus;
    if generators > BRUTEFORCE_GENERATOR_LIMIT {
        return Err(CliError::invalid(format!(
            "brute-force comparison needs {generators} generators \
             (limit {BRUTEFORCE_GENERATOR_LIMIT}); reduce g or the layer count"
        )));
    }
    let insertion = Subset::from_indices(&indices);
    let algebra = Algebra::new(layers, genus).map_err(CliError::from)?;
    let closed = wick_closed(algebra, &coupling, insertion, cycle);
    let brute = wick_bruteforce(algebra, &coupling, insertion, cycle);
    let agree = closed == brute;

    let result = json!({
        "insertion": indices,
        "cycle": cycle,
        "closed_form": closed.to_string(),
        "brute_force": brute.to_string(),
        "agree": agree,
    });
    let human = format!(
        "insertion   : I={insertion} on cycle {cycle}\nclosed form : {closed}\nbrute force : {brute}\nagree       : {}\n",
        yes_no(agree)
    );
    Ok(Outcome {
        result,
        validity: None,
        human,
        exit: if agree { 0 } else { EXIT_VERIFICATION_FAILURE },
    })
}

/// Couplings the `verify` sweep ranges over: entries in `0..=4`,
/// `K − I` positive semi-definite, `det K ≠ 0`.
fn sweep_couplings(size: usize) -> Vec<IntSymMatrix> {
    let span = 5usize;
    let slots = size * (size + 1) / 2;
    let total = span.pow(slots as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let mut rows = vec![vec![0i64; size]; size];
        for i in 0..size {
            for j in i..size {
                let v = (rest % span) as i64;
                rest /= span;
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let m = IntSymMatrix::from_rows(&rows).expect("rows are symmetric");
        if m.minus_identity().is_psd() && !m.det().is_zero() {
            out.push(m);
        }
    }
    out
}

fn closed_pipeline(
    flip_sign: bool,
) -> fn(&IntSymMatrix, usize, &[i64], &[i64]) -> fqh_bundle::Result<fqh_bundle::ChernCharacter> {
    if flip_sign {
        ch_closed_form_sign_flipped
    } else {
        ch_closed_form
    }
}

/// `verify`: equivalence of the two pipelines — one configuration when
/// the job file pins one down, otherwise a deterministic sweep.
pub fn verify(job: &JobSpec) -> Result<Outcome, CliError> {
    let params = job.verify.clone().unwrap_or_default();
    if job.has_configuration_fields() {
        verify_single(job, &params)
    } else {
        verify_sweep(job, &params)
    }
}

fn verify_single(job: &JobSpec, params: &VerifyParams) -> Result<Outcome, CliError> {
    let cfg = job.resolve_configuration()?;
    let generators = 2 * cfg.genus() * cfg.layers() + 2 * cfg.genus();
    if generators > BRUTEFORCE_GENERATOR_LIMIT {
        return Err(CliError::invalid(format!(
            "this configuration needs {generators} generators for the brute-force pipeline \
             (limit {BRUTEFORCE_GENERATOR_LIMIT})"
        )));
    }
    let quasiholes = cfg.quasiholes();
    let brute = ch_bruteforce(cfg.coupling(), cfg.genus(), &quasiholes, cfg.particles())?;
    let closed = closed_pipeline(params.flip_sign)(
        cfg.coupling(),
        cfg.genus(),
        &quasiholes,
        cfg.particles(),
    )?;
    let agree = brute == closed;

    let result = json!({
        "mode": "single",
        "flip_sign": params.flip_sign,
        "checked": 1,
        "passed": u32::from(agree),
        "failed": u32::from(!agree),
        "refused": 0,
        "brute_force": rat_strings(brute.coeffs()),
        "closed_form": rat_strings(closed.coeffs()),
    });
    let human = format!(
        "{} {cfg} p={quasiholes:?}\n  brute force {brute}\n  closed form {closed}\n",
        if agree { "pass" } else { "FAIL" }
    );
    Ok(Outcome {
        result,
        validity: None,
        human,
        exit: if agree { 0 } else { EXIT_VERIFICATION_FAILURE },
    })
}

fn verify_sweep(_job: &JobSpec, params: &VerifyParams) -> Result<Outcome, CliError> {
    if params.max_layers == 0 || params.max_layers > 3 {
        return Err(CliError::invalid("max_layers must be 1, 2, or 3"));
    }
    if params.max_genus == 0 || params.max_genus > 5 {
        return Err(CliError::invalid("max_genus must be between 1 and 5"));
    }
    if !(0..=8).contains(&params.quasihole_max) {
        return Err(CliError::invalid("quasihole_max must be between 0 and 8"));
    }
    // the job's K is ignored in sweep mode: the sweep supplies its own family

    let p_span = (params.quasihole_max + 1) as usize;
    let mut configurations = Vec::new();
    let mut human = String::new();
    let (mut passed, mut failed, mut refused) = (0usize, 0usize, 0usize);
    for layers in 1..=params.max_layers {
        for coupling in sweep_couplings(layers) {
            for genus in 1..=params.max_genus {
                let particles = vec![2 * genus as i64; layers];
                let generators = 2 * genus * layers + 2 * genus;
                for code in 0..p_span.pow(layers as u32) {
                    let mut rest = code;
                    let quasiholes: Vec<i64> = (0..layers)
                        .map(|_| {
                            let v = (rest % p_span) as i64;
                            rest /= p_span;
                            v
                        })
                        .collect();
                    let label =
                        format!("K={coupling} g={genus} p={quasiholes:?} n={particles:?}");
                    if generators > BRUTEFORCE_GENERATOR_LIMIT {
                        refused += 1;
                        human += &format!("refused {label}: needs {generators} generators (limit {BRUTEFORCE_GENERATOR_LIMIT})\n");
                        configurations.push(json!({
                            "configuration": label,
                            "status": "refused",
                        }));
                        continue;
                    }
                    let brute = ch_bruteforce(&coupling, genus, &quasiholes, &particles)?;
                    let closed = closed_pipeline(params.flip_sign)(
                        &coupling,
                        genus,
                        &quasiholes,
                        &particles,
                    )?;
                    let agree = brute == closed;
                    if agree {
                        passed += 1;
                        human += &format!("pass    {label}\n");
                    } else {
                        failed += 1;
                        human += &format!(
                            "FAIL    {label}: brute force {brute} vs closed form {closed}\n"
                        );
                    }
                    configurations.push(json!({
                        "configuration": label,
                        "status": if agree { "pass" } else { "fail" },
                    }));
                }
            }
        }
    }

    let checked = passed + failed;
    if checked == 0 {
        return Err(CliError::invalid(
            "the requested bounds leave nothing the brute-force pipeline can check",
        ));
    }
    human += &format!(
        "checked {checked} configurations: {passed} passed, {failed} failed, {refused} refused{}\n",
        if params.flip_sign {
            " (sign flipped deliberately)"
        } else {
            ""
        }
    );

    let result = json!({
        "mode": "sweep",
        "flip_sign": params.flip_sign,
        "checked": checked,
        "passed": passed,
        "failed": failed,
        "refused": refused,
        "configurations": configurations,
    });
    Ok(Outcome {
        result,
        validity: None,
        human,
        exit: if failed > 0 {
            EXIT_VERIFICATION_FAILURE
        } else {
            0
        },
    })
}

/// `sweep`: tabulate exact vs asymptotic conductance over a degree range
/// at fixed quasi-hole counts.
pub fn sweep(job: &JobSpec) -> Result<Outcome, CliError> {
    let coupling = job.coupling_matrix()?;
    let layers = coupling.size();
    if job.g == 0 {
        return Err(CliError::invalid("sweep needs genus >= 1 for a conductance"));
    }
    let range = job
        .sweep
        .clone()
        .ok_or_else(|| CliError::invalid("sweep needs a sweep range block"))?;
    if range.d_step < 1 {
        return Err(CliError::invalid("d_step must be >= 1"));
    }
    if range.d_from < 0 || range.d_to < range.d_from {
        return Err(CliError::invalid("need 0 <= d_from <= d_to"));
    }
    if (range.d_to - range.d_from) / range.d_step >= 2000 {
        return Err(CliError::invalid("sweep range too large (over 2000 rows)"));
    }
    let quasiholes = job
        .quasiholes(layers)?
        .unwrap_or_else(|| vec![0; layers]);

    let mut rows = Vec::new();
    let mut human = format!(
        "sweep over d at K={coupling}, g={}, p={quasiholes:?}\n",
        job.g
    );
    let mut previous_gap: Option<Rational> = None;
    let mut monotone = true;
    let mut compared = 0usize;
    let mut d = range.d_from;
    while d <= range.d_to {
        let degrees = vec![d; layers];
        let shifted: Vec<i64> = degrees.iter().zip(&quasiholes).map(|(di, pi)| di - pi).collect();
        let solution = solve_shift(&coupling, job.g, &shifted)?;
        let Some(particles) = solution.integer_particles() else {
            human += &format!("d={d:<5} skipped: non-integral particle solve\n");
            rows.push(json!({"d": d, "skipped": "non-integral particle solve"}));
            d += range.d_step;
            continue;
        };
        if particles.iter().any(|&n| n <= 0) {
            human += &format!("d={d:<5} skipped: non-positive particle count\n");
            rows.push(json!({"d": d, "skipped": "non-positive particle count"}));
            d += range.d_step;
            continue;
        }
        let cfg = Configuration::new(coupling.clone(), job.g, degrees, particles.clone())?;
        let character = cfg.chern_character()?;
        if character.rank().is_zero() {
            human += &format!("d={d:<5} skipped: rank 0\n");
            rows.push(json!({"d": d, "particles": particles, "skipped": "rank 0"}));
            d += range.d_step;
            continue;
        }
        let exact = character.conductance()?;
        let asymptotic = asymptotic_conductance(&coupling, &particles, &quasiholes)?;
        let gap = exact.clone() - asymptotic.clone();
        let abs_gap = gap.abs();
        if let Some(previous) = &previous_gap {
            if abs_gap >= *previous {
                monotone = false;
            }
        }
        previous_gap = Some(abs_gap.clone());
        compared += 1;

        human += &format!(
            "d={d:<5} n=({}) exact={exact} asymptotic={asymptotic} |gap|={abs_gap}\n",
            join(&particles)
        );
        rows.push(json!({
            "d": d,
            "particles": particles,
            "rank": character.rank().to_string(),
            "exact": exact.to_string(),
            "asymptotic": asymptotic.to_string(),
            "gap": gap.to_string(),
            "abs_gap": abs_gap.to_string(),
        }));
        d += range.d_step;
    }

    let monotone_value = if compared >= 2 {
        Value::Bool(monotone)
    } else {
        Value::Null
    };
    if compared >= 2 {
        human += &format!("|gap| strictly decreasing: {}\n", yes_no(monotone));
    }
    let result = json!({
        "rows": rows,
        "compared": compared,
        "gap_strictly_decreasing": monotone_value,
    });
    Ok(Outcome::ok(result, None, human))
}
