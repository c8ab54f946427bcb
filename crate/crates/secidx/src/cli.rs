//! Command implementations behind the `secidx` binary.
//!
//! Every command reads JSON files, prints one JSON report to stdout, and
//! exits with a stable code:
//!
//! - `0` success (searches that complete, checks that pass, verdicts that
//!   are decided),
//! - `1` input error (unreadable or malformed files, bad arguments),
//! - `2` enumeration or search cap exceeded (including cone verdicts that
//!   stay undecided at the cap),
//! - `3` infeasible constructions and failed verifications.
//!
//! Caps come from `--cap`, then the `SECIDX_CAP` environment variable, then
//! the per-operation defaults.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::conventional::{find_linear_code, min_rank, LinearCode, MinRankOutcome};
use crate::gotp::{construct_gotp, gotp_feasible, reduced_instance, Feasibility};
use crate::linreduce::{extract_conventional, to_standard_form};
use crate::problem::{rate_of, ratio_string, Instance, KeyProfile, RateVector};
use crate::secure::{
    error_probability_mc, joint_of, mutual_information, search_table_code, secrecy_report,
    total_variation, verify_decoding, verify_perfect_secrecy, DecodingOutcome, SearchGoal,
    SecrecyOutcome, SecureCode,
};
use crate::{Error, Result, DEFAULT_SEARCH_CAP, DEFAULT_SECURE_CAP};

/// Exit code plus the JSON report a command produced.
#[derive(Debug)]
pub struct CmdOutput {
    pub exit: i32,
    pub report: Value,
}

impl CmdOutput {
    fn ok(report: Value) -> Self {
        CmdOutput { exit: 0, report }
    }
}

/// Maps library errors onto the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => 2,
        Error::Infeasible(_) => 3,
        _ => 1,
    }
}

/// Cap resolution: explicit flag, then SECIDX_CAP, then the default.
pub fn effective_cap(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(|| {
        std::env::var("SECIDX_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(default)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn rate_value(rate: &RateVector) -> Value {
    json!({
        "r": rate.msg.iter().map(ratio_string).collect::<Vec<_>>(),
        "r_k": ratio_string(&rate.common_key),
        "r_ki": rate.private_keys.iter().map(ratio_string).collect::<Vec<_>>(),
    })
}

/// `minrank`: exhaustive optimal code length. Unit-length messages go
/// through the fitting-matrix search; general lengths and `--nonlinear`
/// fall back to witness searches per candidate length.
pub fn run_minrank(
    instance_path: &Path,
    max_l: Option<usize>,
    nonlinear: bool,
    out: Option<&Path>,
    cap: Option<u64>,
) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SEARCH_CAP);
    let instance = Instance::parse(&read(instance_path)?)?;
    let limit = max_l.unwrap_or_else(|| instance.total_msg_len());

    if nonlinear {
        // smallest table-code alphabet exponent, witness included
        for l in 0..=limit {
            if let Some(witness) = search_table_code(
                &instance,
                &KeyProfile::none(instance.receivers()),
                l,
                SearchGoal::ZeroError,
                cap,
            )? {
                let code = SecureCode::Table(witness);
                let mut report = json!({
                    "mode": "nonlinear",
                    "l_star": l,
                    "found": true,
                });
                if let Some(path) = out {
                    fs::write(path, code.to_json())?;
                    report["witness_file"] = json!(path.display().to_string());
                }
                return Ok(CmdOutput::ok(report));
            }
        }
        return Ok(CmdOutput::ok(json!({
            "mode": "nonlinear",
            "found": false,
            "max_l": limit,
        })));
    }

    let unit_lengths = instance.msg_lens().iter().all(|&l| l == 1);
    let (found, nodes) = if unit_lengths {
        match min_rank(&instance, limit, cap)? {
            MinRankOutcome::Found {
                l_star,
                witness,
                nodes,
            } => (Some((l_star, witness)), nodes),
            MinRankOutcome::NoneWithin { nodes, .. } => (None, nodes),
        }
    } else {
        // vector messages: search a witness per candidate length
        let mut hit = None;
        for l in 0..=limit {
            if let Some(code) = find_linear_code(&instance, l, cap)? {
                hit = Some((l, code));
                break;
            }
        }
        (hit, 0)
    };

    match found {
        Some((l_star, witness)) => {
            let mut report = json!({
                "mode": "linear",
                "l_star": l_star,
                "found": true,
                "nodes": nodes,
                "witness_rows": (0..witness.encode_matrix().rows())
                    .map(|r| witness.encode_matrix().row(r))
                    .collect::<Vec<_>>(),
            });
            if let Some(path) = out {
                fs::write(path, witness.to_json(&instance))?;
                report["witness_file"] = json!(path.display().to_string());
            }
            Ok(CmdOutput::ok(report))
        }
        None => Ok(CmdOutput::ok(json!({
            "mode": "linear",
            "found": false,
            "max_l": limit,
            "nodes": nodes,
        }))),
    }
}

/// Metric selection for `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Perfect,
    Strong,
    Weak,
    Decode,
    All,
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "perfect" => Ok(Metric::Perfect),
            "strong" => Ok(Metric::Strong),
            "weak" => Ok(Metric::Weak),
            "decode" => Ok(Metric::Decode),
            "all" => Ok(Metric::All),
            other => Err(Error::Parse(format!(
                "unknown metric '{other}' (perfect|strong|weak|decode|all)"
            ))),
        }
    }
}

/// `verify`: runs the requested checks on a code file. Exit 0 exactly when
/// every requested check passes: perfect secrecy must hold with a pass
/// verdict, strong secrecy means total variation exactly zero, weak secrecy
/// means mutual information zero within its reported error bound, and
/// decode means zero-error on every input.
pub fn run_verify(code_path: &Path, metric: Metric, cap: Option<u64>) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SECURE_CAP);
    let code = SecureCode::parse(&read(code_path)?)?;
    let mut report = json!({ "metric": format!("{metric:?}").to_lowercase() });
    let mut pass = true;

    if matches!(metric, Metric::Decode | Metric::All) {
        match verify_decoding(&code, cap)? {
            DecodingOutcome::Pass => {
                report["decode"] = json!({ "pass": true });
            }
            DecodingOutcome::Fail { receiver, input } => {
                pass = false;
                report["decode"] = json!({
                    "pass": false,
                    "receiver": receiver + 1,
                    "input": input,
                });
            }
        }
    }

    match metric {
        Metric::Perfect => match verify_perfect_secrecy(&code, cap)? {
            SecrecyOutcome::Pass => {
                report["perfect"] = json!(true);
            }
            SecrecyOutcome::Fail { m, m_prime, c } => {
                pass = false;
                report["perfect"] = json!(false);
                report["witness"] = json!({ "m": m, "m_prime": m_prime, "c": c });
            }
        },
        Metric::Strong => {
            let tv = total_variation(&joint_of(&code, cap)?);
            report["tv"] = json!(ratio_string(&tv));
            pass &= tv.is_zero();
        }
        Metric::Weak => {
            let (mi, err) = mutual_information(&joint_of(&code, cap)?);
            report["mi_bits"] = json!(mi);
            report["mi_err"] = json!(err);
            pass &= mi.abs() <= err.max(1e-9);
        }
        Metric::Decode => {}
        Metric::All => {
            let full = secrecy_report(&code, cap)?;
            pass &= full.perfect;
            report["perfect"] = json!(full.perfect);
            if let Some(w) = &full.witness {
                report["witness"] = json!({ "m": w.m, "m_prime": w.m_prime, "c": w.c });
            }
            pass &= full.tv == "0";
            report["tv"] = json!(full.tv);
            pass &= full.mi_bits.abs() <= full.mi_err.max(1e-9);
            report["mi_bits"] = json!(full.mi_bits);
            report["mi_err"] = json!(full.mi_err);
            report["perr"] = json!(full.perr);
        }
    }

    report["pass"] = json!(pass);
    Ok(CmdOutput {
        exit: if pass { 0 } else { 3 },
        report,
    })
}

/// `gotp`: builds the generalized one-time pad code for an instance and key
/// profile. The inner conventional code is searched for, or supplied with
/// `--conv`. Infeasible profiles exit 3 with the reason.
pub fn run_gotp(
    instance_path: &Path,
    keys_path: &Path,
    conv_path: Option<&Path>,
    out: Option<&Path>,
    cap: Option<u64>,
) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SEARCH_CAP);
    let instance = Instance::parse(&read(instance_path)?)?;
    let keys = KeyProfile::parse(&read(keys_path)?)?;

    let feasibility = gotp_feasible(&instance, &keys, cap)?;
    let conv_len = match feasibility {
        Feasibility::Infeasible { reason } => {
            return Ok(CmdOutput {
                exit: 3,
                report: json!({ "feasible": false, "reason": reason }),
            })
        }
        Feasibility::Feasible { conv_len } => conv_len,
    };

    let reduced = reduced_instance(&instance, &keys)?;
    let conv = match conv_path {
        Some(path) => {
            let (conv_instance, code) = LinearCode::parse(&read(path)?)?;
            if conv_instance != reduced {
                return Err(Error::Parse(format!(
                    "inner code in {} serves a different instance than the reduced one",
                    path.display()
                )));
            }
            code
        }
        None => find_linear_code(&reduced, conv_len, cap)?
            .ok_or_else(|| Error::Internal("feasibility promised a conventional code".into()))?,
    };

    let code = construct_gotp(&instance, &keys, &conv, cap)?;
    let rate = code.rate()?;
    let warnings: Vec<String> = instance
        .msg_lens()
        .iter()
        .zip(keys.l_ki.iter())
        .enumerate()
        .filter(|(_, (&l, &k))| k > l)
        .map(|(i, (&l, &k))| {
            format!(
                "receiver {} private key of {k} symbols exceeds its {l}-symbol message",
                i + 1
            )
        })
        .collect();

    let mut report = json!({
        "feasible": true,
        "l": code.code_len(),
        "conv_len": conv.len(),
        "rate": rate_value(&rate),
        "warnings": warnings,
    });
    if let Some(path) = out {
        fs::write(path, code.to_json())?;
        report["code_file"] = json!(path.display().to_string());
    }
    Ok(CmdOutput::ok(report))
}

/// `reduce`: standard form plus extracted conventional code for a linear
/// secure code file. Writes `<out>.standard.json` and
/// `<out>.conventional.json`.
pub fn run_reduce(code_path: &Path, out_prefix: &str, cap: Option<u64>) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SECURE_CAP);
    let code = SecureCode::parse(&read(code_path)?)?;
    let SecureCode::Linear(lin) = code else {
        return Err(Error::Parse(
            "reduce needs a linear code file (a table encoder has no code matrix)".into(),
        ));
    };
    let instance = lin.instance().clone();
    let standard = to_standard_form(lin.matrix(), &instance, cap)?;
    let extracted = extract_conventional(&standard, &instance, cap)?;

    let standard_path = format!("{out_prefix}.standard.json");
    let mut standard_json: Value =
        serde_json::from_str(&standard.to_json()).expect("marked form json");
    standard_json["instance"] = serde_json::from_str(&instance.to_json()).expect("instance json");
    let standard_text =
        serde_json::to_string_pretty(&standard_json).expect("standard form serializes");
    fs::write(&standard_path, standard_text)?;

    let conventional_path = format!("{out_prefix}.conventional.json");
    fs::write(
        &conventional_path,
        extracted.code.to_json(&extracted.reduced),
    )?;

    let layout = standard.code_matrix().layout();
    Ok(CmdOutput::ok(json!({
        "l": standard.code_matrix().pi().rows(),
        "l_k": layout.l_k,
        "l_ki": layout.l_ki,
        "reduced_msg_len": extracted.reduced.msg_lens(),
        "pinned": extracted
            .pinned
            .iter()
            .map(|pins| pins.iter().map(|&j| j + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "standard_form_file": standard_path,
        "conventional_file": conventional_path,
    })))
}

/// Cone verdicts for `cone`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeVerdict {
    InCone { witness_len: usize },
    OutOfCone,
    Undecided,
}

/// Decides whether the normalized vector `([r_i - r_ki]+ / r_k)_i` lies in
/// the conventional rate region, by witness search at denominator-bounded
/// block lengths. `c/0` is zero for `c = 0` and infinite otherwise, and any
/// ratio above one is outside every index coding region (each receiver must
/// decode its message from the public code and independent side
/// information).
pub fn cone_membership(
    instance: &Instance,
    rates: &RateVector,
    max_scale: usize,
    cap: u64,
) -> Result<(ConeVerdict, Vec<String>)> {
    let t = instance.receivers();
    if rates.msg.len() != t {
        return Err(Error::Dimension(format!(
            "rate vector covers {} receivers, instance has {t}",
            rates.msg.len()
        )));
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let mut ratios: Vec<Option<BigRational>> = Vec::with_capacity(t); // None = infinite
    for i in 0..t {
        let numer = (&rates.msg[i] - &rates.private_keys[i]).max(BigRational::zero());
        if rates.common_key.is_zero() {
            ratios.push(if numer.is_zero() {
                Some(BigRational::zero())
            } else {
                None
            });
        } else {
            ratios.push(Some(numer / &rates.common_key));
        }
    }
    let printable: Vec<String> = ratios
        .iter()
        .map(|r| match r {
            Some(x) => ratio_string(x),
            None => "inf".into(),
        })
        .collect();

    if ratios.iter().any(|r| r.is_none()) || ratios.iter().flatten().any(|r| r > &one) {
        return Ok((ConeVerdict::OutOfCone, printable));
    }
    let ratios: Vec<BigRational> = ratios.into_iter().map(|r| r.unwrap()).collect();
    if ratios.iter().all(|r| r.is_zero()) {
        return Ok((ConeVerdict::InCone { witness_len: 0 }, printable));
    }

    // common denominator of the reduced ratios
    let mut denom = BigInt::from(1);
    for r in &ratios {
        denom = denom.lcm(r.denom());
    }
    let Some(step) = denom.to_u64() else {
        return Ok((ConeVerdict::Undecided, printable));
    };

    for s in 1..=max_scale {
        let l = step as usize * s;
        let lens: Vec<usize> = ratios
            .iter()
            .map(|r| {
                let scaled = r * BigRational::from_integer(BigInt::from(l));
                scaled.to_integer().to_usize().expect("desk-scale length")
            })
            .collect();
        let scaled = instance.with_msg_lens(lens)?;
        match find_linear_code(&scaled, l, cap) {
            Ok(Some(_)) => return Ok((ConeVerdict::InCone { witness_len: l }, printable)),
            Ok(None) => continue,
            Err(Error::CapExceeded { .. }) => return Ok((ConeVerdict::Undecided, printable)),
            Err(e) => return Err(e),
        }
    }
    Ok((ConeVerdict::Undecided, printable))
}

/// `cone`: membership verdict for a rate vector given as a comma-separated
/// list `r_1,..,r_t,r_k,r_k1,..,r_kt` of integers or `a/b` fractions.
pub fn run_cone(
    instance_path: &Path,
    rates: &str,
    max_scale: usize,
    cap: Option<u64>,
) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SEARCH_CAP);
    let instance = Instance::parse(&read(instance_path)?)?;
    let rates = RateVector::parse(rates, instance.receivers())?;
    let (verdict, ratios) = cone_membership(&instance, &rates, max_scale, cap)?;
    let (exit, verdict_str, witness) = match verdict {
        ConeVerdict::InCone { witness_len } => (0, "in-cone", Some(witness_len)),
        ConeVerdict::OutOfCone => (0, "out-of-cone", None),
        ConeVerdict::Undecided => (2, "undecided", None),
    };
    let mut report = json!({
        "verdict": verdict_str,
        "ratios": ratios,
    });
    if let Some(l) = witness {
        report["witness_len"] = json!(l);
    }
    Ok(CmdOutput { exit, report })
}

/// `report`: rate vector, all secrecy metrics, decoding verdict, and an
/// optional seeded Monte-Carlo cross-check of the error probability.
pub fn run_report(
    code_path: &Path,
    mc_samples: Option<u64>,
    seed: u64,
    cap: Option<u64>,
) -> Result<CmdOutput> {
    let cap = effective_cap(cap, DEFAULT_SECURE_CAP);
    let code = SecureCode::parse(&read(code_path)?)?;
    let full = secrecy_report(&code, cap)?;
    let decode = verify_decoding(&code, cap)?;

    let mut report = json!({
        "l": code.code_len(),
        "keys": { "l_k": code.keys().l_k, "l_ki": code.keys().l_ki, "l_w": code.keys().l_w },
        "perfect": full.perfect,
        "tv": full.tv,
        "mi_bits": full.mi_bits,
        "mi_err": full.mi_err,
        "perr": full.perr,
        "decode": matches!(decode, DecodingOutcome::Pass),
    });
    if let Some(w) = &full.witness {
        report["witness"] = json!({ "m": w.m, "m_prime": w.m_prime, "c": w.c });
    }
    if code.code_len() > 0 {
        report["rate"] = rate_value(&rate_of(code.instance(), &code.keys(), code.code_len())?);
    }
    if let Some(samples) = mc_samples {
        report["perr_mc"] = json!(error_probability_mc(&code, samples, seed)?);
        report["mc_samples"] = json!(samples);
        report["seed"] = json!(seed);
    }
    Ok(CmdOutput::ok(report))
}
