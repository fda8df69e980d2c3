//! Command-line front end: parse JSON specs, dispatch computations, emit
//! JSON reports (or flat text with `--format text`).
//!
//! Exit codes: 0 on success — an infeasible or not-found report is a
//! successful report — 1 on domain errors, 2 on malformed input or usage.

use std::io::Write;

use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::af_tower::AFTower;
use crate::bim::{FiniteBIM, SemisimpleSpec};
use crate::error::{Error, Result};
use crate::means::{self, MeanSolution, MeanVector, SolveStatus};
use crate::paradox::{
    arden_upgrade, bike_amplify, detect_weak, kuratowski_bijection, AffineMap, AffineMapJson,
    KuratowskiInstance, ParadoxCertificate,
};
use crate::pbij::{GroundSet, PartialBijection};
use crate::rook::{RookMatrix, RookMatrixJson};
use crate::typemonoid::{self, Decision, TypeElement};
use crate::util::{rational_from_str, rational_to_string, SplitMix64};

const USAGE: &str = "\
usage: imean <verb> <input.json> [...] [flags]

verbs:
  monoid <spec.json>                    summarize a monoid built from a spec
  solve <spec.json>                     solve for all invariant means
  check <spec.json>                     full structural report
  type present <spec.json>              type monoid presentation
  type leq <spec.json> <query.json>     bounded order check in the type monoid
  type obstruction <spec.json>          scan for (n+1)u <= nu
  rook validate <spec.json> <a.json>    check RM1-RM3 and base membership
  rook mul <spec.json> <a.json> <b.json>
  rook star <spec.json> <a.json>
  rook tarski <spec.json> <a.json>      test A*A = I against the shape
  tower validate <tower.json>
  tower mean <tower.json> [--depth d]   pull a seed mean down the tower
  tower uhf <tower.json> [--depth d]    the forced single-block tower mean
  paradox detect <gens.json> [--max-word L]
  paradox amplify <input.json>
  paradox upgrade <input.json>
  paradox kuratowski <instance.json>

flags: --cap N, --depth D, --max-word L, --bound B, --seed S,
       --format json|text";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Debug)]
struct Flags {
    cap: usize,
    depth: Option<usize>,
    max_word: usize,
    bound: u64,
    seed: u64,
    format: Format,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            cap: 100_000,
            depth: None,
            max_word: 3,
            bound: 10,
            seed: 0xC0FFEE,
            format: Format::Json,
        }
    }
}

enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Run the command line; returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(args) {
        Ok((value, format)) => {
            let rendered = render(&value, format);
            let _ = writeln!(out, "{rendered}");
            0
        }
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "{msg}\n\n{USAGE}");
            2
        }
    }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serializable"),
        Format::Text => match value.as_object() {
            Some(map) => map
                .iter()
                .map(|(k, v)| format!("{k}: {v}"))
                .collect::<Vec<_>>()
                .join("\n"),
            None => value.to_string(),
        },
    }
}

fn parse_flags(args: &[String]) -> CliResult<(Vec<String>, Flags)> {
    let mut flags = Flags::default();
    let mut positional = Vec::new();
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if let Some(name) = arg.strip_prefix("--") {
            let value = iter
                .next()
                .ok_or_else(|| CliError::Usage(format!("flag --{name} needs a value")))?;
            match name {
                "cap" => flags.cap = parse_number(name, value)?,
                "depth" => flags.depth = Some(parse_number(name, value)?),
                "max-word" => flags.max_word = parse_number(name, value)?,
                "bound" => flags.bound = parse_number(name, value)? as u64,
                "seed" => flags.seed = parse_number(name, value)? as u64,
                "format" => {
                    flags.format = match value.as_str() {
                        "json" => Format::Json,
                        "text" => Format::Text,
                        other => {
                            return usage_err(format!("unknown format `{other}`"));
                        }
                    }
                }
                other => return usage_err(format!("unknown flag --{other}")),
            }
        } else {
            positional.push(arg.clone());
        }
    }
    Ok((positional, flags))
}

fn parse_number(name: &str, value: &str) -> CliResult<usize> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("flag --{name} needs a number, got `{value}`")))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("cannot parse {path}: {e}")))
}

/// A monoid is specified either by block sizes or by generators to close.
#[derive(Deserialize)]
#[serde(untagged)]
enum MonoidSpecJson {
    Semisimple {
        semisimple: Vec<usize>,
    },
    Generated {
        ground: usize,
        generators: Vec<PartialBijection>,
        #[serde(default)]
        cap: Option<usize>,
    },
}

impl MonoidSpecJson {
    fn build(self, default_cap: usize) -> Result<FiniteBIM> {
        match self {
            MonoidSpecJson::Semisimple { semisimple } => {
                Ok(FiniteBIM::semisimple(&SemisimpleSpec::new(semisimple)?))
            }
            MonoidSpecJson::Generated {
                ground,
                generators,
                cap,
            } => FiniteBIM::close(
                GroundSet::new(ground)?,
                &generators,
                cap.unwrap_or(default_cap),
            ),
        }
    }
}

fn load_monoid(path: &str, flags: &Flags) -> CliResult<FiniteBIM> {
    let spec: MonoidSpecJson = read_json(path)?;
    Ok(spec.build(flags.cap)?)
}

fn dispatch(args: &[String]) -> CliResult<(Value, Format)> {
    let (positional, flags) = parse_flags(args)?;
    let mut pos = positional.iter().map(String::as_str);
    let verb = match pos.next() {
        Some(v) => v,
        None => return usage_err("missing verb"),
    };
    let rest: Vec<&str> = pos.collect();
    let value = match verb {
        "monoid" => cmd_monoid(&rest, &flags)?,
        "solve" => cmd_solve(&rest, &flags)?,
        "check" => cmd_check(&rest, &flags)?,
        "type" => cmd_type(&rest, &flags)?,
        "rook" => cmd_rook(&rest, &flags)?,
        "tower" => cmd_tower(&rest, &flags)?,
        "paradox" => cmd_paradox(&rest, &flags)?,
        other => return usage_err(format!("unknown verb `{other}`")),
    };
    Ok((value, flags.format))
}

fn one_path<'a>(rest: &[&'a str], verb: &str) -> CliResult<&'a str> {
    match rest {
        [path] => Ok(path),
        _ => usage_err(format!("`{verb}` takes exactly one input path")),
    }
}

fn cmd_monoid(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let monoid = load_monoid(one_path(rest, "monoid")?, flags)?;
    let classes = monoid.atom_classes();
    Ok(json!({
        "ground": monoid.ground().size(),
        "elements": monoid.element_count().to_string(),
        "idempotents": monoid.idempotent_count().to_string(),
        "atoms": classes.atoms.len(),
        "atom_classes": classes.class_count,
        "class_sizes": classes.class_sizes(),
        "d_eq_j": monoid.check_d_eq_j()?,
        "zero_simplifying": monoid.is_zero_simplifying()?,
    }))
}

fn mean_to_json(mean: &MeanVector) -> Value {
    let entries: serde_json::Map<String, Value> = mean
        .class_values()
        .iter()
        .enumerate()
        .map(|(c, v)| (format!("g{c}"), Value::String(rational_to_string(v))))
        .collect();
    Value::Object(entries)
}

fn solution_to_json(solution: &MeanSolution) -> Value {
    let status = match solution.status {
        SolveStatus::Unique => "unique",
        SolveStatus::Polytope => "polytope",
        SolveStatus::Infeasible => "infeasible",
    };
    json!({
        "status": status,
        "witness": solution.witness.as_ref().map(mean_to_json),
        "vertices": solution.vertices.iter().map(mean_to_json).collect::<Vec<_>>(),
        "dim": solution.dim,
        "truncated": solution.truncated,
        "constraints": solution
            .constraint_system
            .equations
            .iter()
            .map(|(coeffs, rhs)| json!({
                "coeffs": coeffs.iter().map(rational_to_string).collect::<Vec<_>>(),
                "rhs": rational_to_string(rhs),
            }))
            .collect::<Vec<_>>(),
    })
}

fn cmd_solve(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let monoid = load_monoid(one_path(rest, "solve")?, flags)?;
    let solution = means::solve(&monoid)?;
    Ok(solution_to_json(&solution))
}

fn cmd_check(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let monoid = load_monoid(one_path(rest, "check")?, flags)?;
    let solution = means::solve(&monoid)?;
    let witness = solution
        .witness
        .clone()
        .ok_or(Error::InternalInvariantViolation("no witness".into()))?;

    // exhaustive axiom check when the element set is enumerable; a seeded
    // invariance sample otherwise
    let axioms = if monoid.element_count() <= 100_000u32.into() {
        let report = means::check_axioms(&monoid, &witness)?;
        json!({
            "mode": "exhaustive",
            "ok": report.ok(),
            "elements": report.checked_elements,
            "idempotent_pairs": report.checked_idempotent_pairs,
            "violation": report.violation.map(|v| format!("{}: {:?}", v.law, v.witnesses)),
        })
    } else {
        let mut rng = SplitMix64::new(flags.seed);
        let samples = 10_000;
        let mut ok = true;
        for _ in 0..samples {
            let s = monoid.sample_element(&mut rng);
            if witness.evaluate(&s.domain())? != witness.evaluate(&s.range())? {
                ok = false;
                break;
            }
        }
        json!({"mode": "sampled", "ok": ok, "elements": samples, "seed": flags.seed})
    };

    let presentation = typemonoid::present(&monoid)?;
    let obstruction = typemonoid::tarski_obstruction(
        &presentation,
        flags.bound as usize,
        obstruction_rewrite_bound(&presentation, flags.bound as usize),
    );

    Ok(json!({
        "solve": solution_to_json(&solution),
        "axioms": axioms,
        "witness_faithful": means::is_faithful(&witness),
        "d_eq_j": monoid.check_d_eq_j()?,
        "zero_simplifying": monoid.is_zero_simplifying()?,
        "kuratowski_property": crate::paradox::check_kuratowski_property(&monoid)?,
        "tarski_obstruction": serde_json::to_value(&obstruction).expect("serializable"),
    }))
}

fn obstruction_rewrite_bound(p: &typemonoid::TypePresentation, n_max: usize) -> u64 {
    (n_max as u64 + 2) * p.unit().degree().max(1) * 2 + 16
}

#[derive(Deserialize)]
struct LeqQuery {
    x: Vec<u64>,
    y: Vec<u64>,
}

fn cmd_type(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let (sub, rest) = match rest.split_first() {
        Some((s, r)) => (*s, r),
        None => return usage_err("`type` needs a subcommand: present, leq, obstruction"),
    };
    match sub {
        "present" => {
            let monoid = load_monoid(one_path(rest, "type present")?, flags)?;
            let p = typemonoid::present(&monoid)?;
            Ok(json!({
                "generators": p.generator_count(),
                "relations": p
                    .relations()
                    .iter()
                    .map(|(l, r)| json!([l.coeffs(), r.coeffs()]))
                    .collect::<Vec<_>>(),
                "unit": p.unit().coeffs(),
                "generator_atoms": p
                    .generator_atoms()
                    .iter()
                    .map(|atoms| atoms.iter().map(|a| a.members().collect::<Vec<_>>()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }))
        }
        "leq" => {
            let (spec_path, query_path) = match rest {
                [a, b] => (*a, *b),
                _ => return usage_err("`type leq` takes a monoid spec and a query file"),
            };
            let monoid = load_monoid(spec_path, flags)?;
            let p = typemonoid::present(&monoid)?;
            let query: LeqQuery = read_json(query_path)?;
            if query.x.len() != p.generator_count() || query.y.len() != p.generator_count() {
                return Err(CliError::Domain(Error::InvalidInput(format!(
                    "query arity must be {}",
                    p.generator_count()
                ))));
            }
            let verdict = p.leq(
                &TypeElement::new(query.x),
                &TypeElement::new(query.y),
                flags.bound,
            );
            Ok(json!({
                "result": decision_str(verdict),
                "bound": flags.bound,
            }))
        }
        "obstruction" => {
            let monoid = load_monoid(one_path(rest, "type obstruction")?, flags)?;
            let p = typemonoid::present(&monoid)?;
            let report = typemonoid::tarski_obstruction(
                &p,
                flags.bound as usize,
                obstruction_rewrite_bound(&p, flags.bound as usize),
            );
            Ok(serde_json::to_value(&report).expect("serializable"))
        }
        other => usage_err(format!("unknown type subcommand `{other}`")),
    }
}

fn decision_str(d: Decision) -> &'static str {
    match d {
        Decision::Yes => "yes",
        Decision::No => "no",
        Decision::Unknown => "unknown",
    }
}

fn load_matrix(path: &str) -> CliResult<RookMatrix<PartialBijection>> {
    let raw: RookMatrixJson = read_json(path)?;
    Ok(raw.into_matrix()?)
}

fn cmd_rook(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let (sub, rest) = match rest.split_first() {
        Some((s, r)) => (*s, r),
        None => return usage_err("`rook` needs a subcommand: validate, mul, star, tarski"),
    };
    match sub {
        "validate" => {
            let (spec, mat) = match rest {
                [a, b] => (*a, *b),
                _ => return usage_err("`rook validate` takes a base spec and a matrix"),
            };
            let base = load_monoid(spec, flags)?;
            let matrix = load_matrix(mat)?;
            Ok(json!({"valid": matrix.validate_in(&base)?}))
        }
        "mul" => {
            let (spec, a, b) = match rest {
                [s, a, b] => (*s, *a, *b),
                _ => return usage_err("`rook mul` takes a base spec and two matrices"),
            };
            let base = load_monoid(spec, flags)?;
            for m in [a, b] {
                let matrix = load_matrix(m)?;
                if !matrix.validate_in(&base)? {
                    return Err(CliError::Domain(Error::InvalidInput(format!(
                        "{m} is not a valid rook matrix over the base"
                    ))));
                }
            }
            let product = load_matrix(a)?.product(&load_matrix(b)?)?;
            Ok(serde_json::to_value(RookMatrixJson::from_matrix(&product))
                .expect("serializable"))
        }
        "star" => {
            let (spec, a) = match rest {
                [s, a] => (*s, *a),
                _ => return usage_err("`rook star` takes a base spec and a matrix"),
            };
            let base = load_monoid(spec, flags)?;
            let matrix = load_matrix(a)?;
            if !matrix.validate_in(&base)? {
                return Err(CliError::Domain(Error::InvalidInput(
                    "input is not a valid rook matrix over the base".into(),
                )));
            }
            Ok(serde_json::to_value(RookMatrixJson::from_matrix(&matrix.star()))
                .expect("serializable"))
        }
        "tarski" => {
            let (spec, a) = match rest {
                [s, a] => (*s, *a),
                _ => return usage_err("`rook tarski` takes a base spec and a matrix"),
            };
            let base = load_monoid(spec, flags)?;
            let matrix = load_matrix(a)?;
            if !matrix.validate_in(&base)? {
                return Err(CliError::Domain(Error::InvalidInput(
                    "input is not a valid rook matrix over the base".into(),
                )));
            }
            let degree = match matrix.rows() {
                crate::rook::Dim::Finite(m) => m,
                crate::rook::Dim::Omega => {
                    return Err(CliError::Domain(Error::ShapeMismatch));
                }
            };
            Ok(json!({"degree": degree, "tarski": matrix.is_tarski(degree)?}))
        }
        other => usage_err(format!("unknown rook subcommand `{other}`")),
    }
}

#[derive(Deserialize)]
struct TowerJson {
    levels: Vec<Vec<u64>>,
    maps: Vec<Vec<Vec<u64>>>,
    #[serde(default)]
    seed: Option<Vec<String>>,
}

fn cmd_tower(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let (sub, rest) = match rest.split_first() {
        Some((s, r)) => (*s, r),
        None => return usage_err("`tower` needs a subcommand: validate, mean, uhf"),
    };
    let raw: TowerJson = read_json(one_path(rest, "tower")?)?;
    let seed_strings = raw.seed.clone();
    match sub {
        "validate" => {
            let tower = AFTower {
                levels: raw.levels,
                maps: raw.maps,
            };
            match tower.validate() {
                Ok(()) => Ok(json!({"valid": true, "depth": tower.depth()})),
                Err(e) => Ok(json!({"valid": false, "reason": e.to_string()})),
            }
        }
        "mean" | "uhf" => {
            let tower = AFTower::new(raw.levels, raw.maps)?;
            let depth = flags.depth.unwrap_or_else(|| tower.depth());
            let mean = if sub == "uhf" {
                tower.uhf_unique_mean(depth)?
            } else {
                let seed: Vec<BigRational> = match &seed_strings {
                    Some(strings) => strings
                        .iter()
                        .map(|s| rational_from_str(s))
                        .collect::<Result<_>>()?,
                    None if tower.is_uhf() => {
                        return Ok(tower_mean_json(&tower.uhf_unique_mean(depth)?));
                    }
                    None => {
                        return Err(CliError::Domain(Error::InvalidInput(
                            "tower is not single-block; supply a `seed` vector in the JSON".into(),
                        )))
                    }
                };
                tower.tower_mean(depth, &seed)?
            };
            Ok(tower_mean_json(&mean))
        }
        other => usage_err(format!("unknown tower subcommand `{other}`")),
    }
}

fn tower_mean_json(mean: &crate::af_tower::TowerMean) -> Value {
    json!({
        "levels": mean
            .vectors
            .iter()
            .map(|v| v.iter().map(rational_to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "faithful": mean.is_positive(),
    })
}

#[derive(Deserialize)]
struct DetectInput {
    generators: Vec<AffineMapJson>,
}

#[derive(Deserialize)]
struct AmplifyInput {
    a: AffineMapJson,
    pencil: Vec<AffineMapJson>,
}

#[derive(Deserialize)]
struct UpgradeInput {
    certificate: ParadoxCertificate,
    witness: AffineMapJson,
}

fn cmd_paradox(rest: &[&str], flags: &Flags) -> CliResult<Value> {
    let (sub, rest) = match rest.split_first() {
        Some((s, r)) => (*s, r),
        None => {
            return usage_err("`paradox` needs a subcommand: detect, amplify, upgrade, kuratowski")
        }
    };
    match sub {
        "detect" => {
            let input: DetectInput = read_json(one_path(rest, "paradox detect")?)?;
            let generators: Vec<AffineMap> = input
                .generators
                .into_iter()
                .map(AffineMap::try_from)
                .collect::<Result<_>>()?;
            match detect_weak(&generators, flags.max_word)? {
                Some(cert) => Ok(json!({
                    "found": true,
                    "certificate": serde_json::to_value(&cert).expect("serializable"),
                })),
                None => Ok(json!({
                    "found": false,
                    "note": format!(
                        "no certificate found at word length <= {}; inconclusive",
                        flags.max_word
                    ),
                })),
            }
        }
        "amplify" => {
            let input: AmplifyInput = read_json(one_path(rest, "paradox amplify")?)?;
            let a = AffineMap::try_from(input.a)?;
            let pencil: Vec<AffineMap> = input
                .pencil
                .into_iter()
                .map(AffineMap::try_from)
                .collect::<Result<_>>()?;
            let cert = bike_amplify(&a, &pencil)?;
            Ok(serde_json::to_value(&cert).expect("serializable"))
        }
        "upgrade" => {
            let input: UpgradeInput = read_json(one_path(rest, "paradox upgrade")?)?;
            let witness = AffineMap::try_from(input.witness)?;
            let cert = arden_upgrade(&input.certificate, &witness)?;
            Ok(serde_json::to_value(&cert).expect("serializable"))
        }
        "kuratowski" => {
            let instance: KuratowskiInstance = read_json(one_path(rest, "paradox kuratowski")?)?;
            let dec = kuratowski_bijection(&instance)?;
            Ok(serde_json::to_value(&dec).expect("serializable"))
        }
        other => usage_err(format!("unknown paradox subcommand `{other}`")),
    }
}
