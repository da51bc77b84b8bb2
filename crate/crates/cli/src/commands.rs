//! The five commands, each producing a `ReportEnvelope`, plus the CSV and
//! pretty renderers.

use serde_json::{json, Value};

use curvlab_core::curvature::{
    betti_conditions, hat_bound_distinguished, hat_bound_general, nk_hat8_intersection,
    nk_ring_plus0_intersection, nk_ring_plus_bound, ring_bound_einstein, ring_bound_general,
    BettiInputs, EinsteinData, IntervalBound, SectionalBounds,
};
use curvlab_core::operators::{spectrum, SubspaceLabel, CLUSTER_TOL};
use curvlab_core::structure::{G2Model, SU3Model};
use curvlab_core::{Error, Result};

use crate::criteria::{run_all, CriterionStatus};
use crate::report::{
    eigenvalue_rows, pretty_value, rational_guess, sig12, ReportEnvelope, Status,
};
use crate::spaces::{einstein_for, load_space, operator_on, subspace_for, OperatorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        Some(match s {
            "json" => Format::Json,
            "csv" => Format::Csv,
            "pretty" => Format::Pretty,
            _ => return None,
        })
    }
}

pub fn cmd_identities(structure: &str) -> Result<ReportEnvelope> {
    let rows = match structure {
        "g2" => G2Model::standard()?.verify_identities(),
        "su3" => SU3Model::standard()?.verify_identities(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown structure '{other}', expected g2 or su3"
            )))
        }
    };
    let all_zero = rows.iter().all(|r| r.residual == 0.0);
    Ok(ReportEnvelope {
        command: "identities".into(),
        inputs: json!({ "structure": structure }),
        tolerances: json!({ "residual": 0.0 }),
        status: if all_zero { Status::Ok } else { Status::CheckFailed },
        results: json!({ "rows": rows, "all_zero": all_zero }),
    })
}

pub fn cmd_spectrum(space_arg: &str, operator: &str, subspace: Option<&str>) -> Result<ReportEnvelope> {
    let op = OperatorKind::parse(operator).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "unknown operator '{operator}', expected rhat, rring, what or wring"
        ))
    })?;
    let label_str = subspace.unwrap_or_else(|| op.default_subspace());
    let label = SubspaceLabel::parse(label_str)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown subspace '{label_str}'")))?;
    let space = load_space(space_arg)?;
    let r = space.model().curvature()?;
    let e = match einstein_for(&space, &r) {
        Ok(e) => e,
        // the Einstein structure is only needed for Weyl shifts and
        // structure-dependent blocks; plain spectra work without it
        Err(error) => {
            let basic = matches!(op, OperatorKind::Hat | OperatorKind::Ring)
                && matches!(
                    label,
                    SubspaceLabel::TwoFormsFull
                        | SubspaceLabel::Sym2Full
                        | SubspaceLabel::Sym2Traceless
                );
            if basic {
                EinsteinData::new(space.model().dim_m(), 0.0, None)?
            } else {
                return Err(error);
            }
        }
    };
    let sub = subspace_for(&space, &r, &e, label)?;
    let matrix = operator_on(op, &r, &e, &sub)?;
    let spec = spectrum(&matrix, CLUSTER_TOL)?;
    let rows = eigenvalue_rows(&spec.eigenvalues);
    let min = spec.eigenvalues.first().map(|c| sig12(c.value));
    Ok(ReportEnvelope {
        command: "spectrum".into(),
        inputs: json!({
            "space": space.model().id,
            "operator": operator,
            "subspace": label.as_str(),
        }),
        tolerances: json!({ "cluster": CLUSTER_TOL }),
        status: Status::Ok,
        results: json!({
            "eigenvalues": rows,
            "min_eigenvalue": min,
            "subspace_dim": sub.subspace_dim(),
        }),
    })
}

fn need(value: Option<f64>, flag: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required for this theorem")))
}

pub fn cmd_bounds(
    theorem: &str,
    delta: f64,
    delta_cap: f64,
    n: Option<usize>,
    k: Option<f64>,
) -> Result<ReportEnvelope> {
    let sb = SectionalBounds::new(delta, delta_cap)?;
    let need_n = || {
        n.ok_or_else(|| Error::InvalidParameter("--n is required for this theorem".into()))
    };
    let intervals: Vec<IntervalBound> = match theorem {
        "hat-general" => vec![hat_bound_general(need_n()?, &sb)],
        "hat-special" => vec![hat_bound_distinguished(&sb)],
        "ring-general" => {
            let (main, g_direction) = ring_bound_general(need_n()?, &sb);
            vec![main, g_direction]
        }
        "ring-einstein" => {
            let e = EinsteinData::new(need_n()?, need(k, "k")?, None)?;
            vec![ring_bound_einstein(&e, &sb)?]
        }
        "nk-ring-plus" => vec![nk_ring_plus_bound(&sb)],
        "nk-intersections" => vec![
            nk_hat8_intersection(&sb)?,
            nk_ring_plus0_intersection(&sb)?,
        ],
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown theorem '{other}'; expected hat-general, hat-special, ring-general, \
                 ring-einstein, nk-ring-plus or nk-intersections"
            )))
        }
    };
    let rows: Vec<Value> = intervals
        .iter()
        .map(|i| {
            json!({
                "label": i.label,
                "lo": sig12(i.lo),
                "hi": sig12(i.hi),
                "lo_rational": rational_guess(i.lo),
                "hi_rational": rational_guess(i.hi),
            })
        })
        .collect();
    Ok(ReportEnvelope {
        command: "bounds".into(),
        inputs: json!({
            "theorem": theorem,
            "delta": delta,
            "Delta": delta_cap,
            "n": n,
            "k": k,
        }),
        tolerances: json!({}),
        status: Status::Ok,
        results: json!({ "intervals": rows }),
    })
}

pub fn cmd_betti(
    space_arg: &str,
    mode: &str,
    delta: Option<f64>,
    delta_cap: Option<f64>,
) -> Result<ReportEnvelope> {
    let space = load_space(space_arg)?;
    let builtin = space.builtin().ok_or_else(|| {
        Error::InvalidParameter(
            "the vanishing criteria need the structure type, available only on built-in spaces"
                .into(),
        )
    })?;
    let r = space.model().curvature()?;
    let e = einstein_for(&space, &r)?;
    let (inputs_echo, inputs) = match mode {
        "spectral" => {
            let minima = crate::spaces::spectral_minima(builtin, &r, &e)?;
            let echo = json!({
                "space": space.model().id,
                "mode": mode,
                "hat_distinguished": sig12(minima.hat_distinguished),
                "ring_traceless": minima.ring_traceless.map(sig12),
                "ring_plus0": minima.ring_plus0.map(sig12),
                "ring_minus": minima.ring_minus.map(sig12),
            });
            (echo, BettiInputs::Spectral(minima))
        }
        "sectional" => {
            let sb = SectionalBounds::new(need(delta, "delta")?, need(delta_cap, "Delta")?)?;
            let echo = json!({
                "space": space.model().id,
                "mode": mode,
                "delta": sb.delta,
                "Delta": sb.delta_cap,
            });
            (echo, BettiInputs::Sectional(sb))
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown mode '{other}', expected spectral or sectional"
            )))
        }
    };
    let report = betti_conditions(builtin.kind, &inputs, &e)?;
    Ok(ReportEnvelope {
        command: "betti".into(),
        inputs: inputs_echo,
        tolerances: json!({}),
        // a missing sufficient condition is a verdict, not a failure
        status: Status::Ok,
        results: serde_json::to_value(&report)?,
    })
}

pub fn cmd_verify_all(seed: u64, samples: usize) -> ReportEnvelope {
    let outcomes = run_all(seed, samples);
    let any_failed = outcomes.iter().any(|o| o.status == CriterionStatus::Fail);
    ReportEnvelope {
        command: "verify-all".into(),
        inputs: json!({ "seed": seed, "samples": samples }),
        tolerances: json!({
            "eigenvalue": 1e-9,
            "einstein": 1e-10,
            "round_trip": 1e-12,
        }),
        status: if any_failed { Status::CheckFailed } else { Status::Ok },
        results: json!({ "criteria": outcomes }),
    }
}

// ---------------------------------------------------------------------------
// rendering

pub fn render(envelope: &ReportEnvelope, format: Format) -> String {
    match format {
        Format::Json => envelope.to_json(),
        Format::Csv => render_csv(envelope),
        Format::Pretty => render_pretty(envelope),
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_csv(envelope: &ReportEnvelope) -> String {
    let mut out = String::new();
    let results = &envelope.results;
    match envelope.command.as_str() {
        "identities" => {
            out.push_str("label,residual\n");
            for row in results["rows"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{}\n",
                    csv_field(&row["label"]),
                    csv_field(&row["residual"])
                ));
            }
        }
        "spectrum" => {
            out.push_str("value,multiplicity,rational\n");
            for row in results["eigenvalues"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_field(&row["value"]),
                    csv_field(&row["multiplicity"]),
                    csv_field(&row["rational"])
                ));
            }
        }
        "bounds" => {
            out.push_str("label,lo,hi,lo_rational,hi_rational\n");
            for row in results["intervals"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_field(&row["label"]),
                    csv_field(&row["lo"]),
                    csv_field(&row["hi"]),
                    csv_field(&row["lo_rational"]),
                    csv_field(&row["hi_rational"])
                ));
            }
        }
        "betti" => {
            out.push_str("kind,id,observed,threshold,holds\n");
            for row in results["conditions"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "condition,{},{},{},{}\n",
                    csv_field(&row["id"]),
                    csv_field(&row["observed"]),
                    csv_field(&row["threshold"]),
                    csv_field(&row["holds"])
                ));
            }
            out.push_str(&format!("verdict,b2,,,{}\n", csv_field(&results["b2"])));
            out.push_str(&format!("verdict,b3,,,{}\n", csv_field(&results["b3"])));
        }
        "verify-all" => {
            out.push_str("criterion,name,status,details\n");
            for row in results["criteria"].as_array().into_iter().flatten() {
                let details = csv_field(&row["details"]).replace(',', ";");
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_field(&row["index"]),
                    csv_field(&row["name"]),
                    csv_field(&row["status"]),
                    details
                ));
            }
        }
        _ => out.push_str(&envelope.to_json()),
    }
    out
}

fn render_pretty(envelope: &ReportEnvelope) -> String {
    let mut out = String::new();
    let results = &envelope.results;
    match envelope.command.as_str() {
        "identities" => {
            out.push_str(&format!(
                "structure {}:\n",
                csv_field(&envelope.inputs["structure"])
            ));
            for row in results["rows"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "  {:<24} residual {}\n",
                    csv_field(&row["label"]),
                    csv_field(&row["residual"])
                ));
            }
        }
        "spectrum" => {
            out.push_str(&format!(
                "space {}, operator {}, subspace {} (dim {})\n",
                csv_field(&envelope.inputs["space"]),
                csv_field(&envelope.inputs["operator"]),
                csv_field(&envelope.inputs["subspace"]),
                csv_field(&results["subspace_dim"]),
            ));
            for row in results["eigenvalues"].as_array().into_iter().flatten() {
                let value = row["value"].as_f64().unwrap_or(f64::NAN);
                out.push_str(&format!(
                    "  {} ×{}\n",
                    pretty_value(value),
                    csv_field(&row["multiplicity"])
                ));
            }
        }
        "bounds" => {
            for row in results["intervals"].as_array().into_iter().flatten() {
                let lo = row["lo"].as_f64().unwrap_or(f64::NAN);
                let hi = row["hi"].as_f64().unwrap_or(f64::NAN);
                out.push_str(&format!(
                    "{}: [{}, {}]\n",
                    csv_field(&row["label"]),
                    pretty_value(lo),
                    pretty_value(hi)
                ));
            }
        }
        "betti" => {
            out.push_str(&format!("manifold {}\n", csv_field(&results["manifold"])));
            for row in results["conditions"].as_array().into_iter().flatten() {
                let observed = row["observed"].as_f64().unwrap_or(f64::NAN);
                let threshold = row["threshold"].as_f64().unwrap_or(f64::NAN);
                let relation = if row["lower_bound"].as_bool().unwrap_or(true) {
                    ">="
                } else {
                    "<="
                };
                let holds = if row["holds"].as_bool().unwrap_or(false) {
                    "holds"
                } else {
                    "fails"
                };
                out.push_str(&format!(
                    "  {:<22} {} {} {}: {}\n",
                    csv_field(&row["id"]),
                    pretty_value(observed),
                    relation,
                    pretty_value(threshold),
                    holds
                ));
            }
            out.push_str(&format!("b2 = {}\n", csv_field(&results["b2"])));
            out.push_str(&format!("b3 = {}\n", csv_field(&results["b3"])));
        }
        "verify-all" => {
            for row in results["criteria"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "{:>7}  {:>2}. {:<34} {}\n",
                    csv_field(&row["status"]),
                    csv_field(&row["index"]),
                    csv_field(&row["name"]),
                    csv_field(&row["details"])
                ));
            }
        }
        _ => out.push_str(&envelope.to_json()),
    }
    let status = match envelope.status {
        Status::Ok => "ok",
        Status::CheckFailed => "check_failed",
        Status::Error => "error",
    };
    out.push_str(&format!("status: {status}\n"));
    out
}
