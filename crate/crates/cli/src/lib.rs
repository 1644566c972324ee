//! Command dispatch for the `paract` binary.
//!
//! Every command prints JSON with sorted keys on stdout. Exit codes: 0 on
//! success, 1 on a domain error (an invalid action, a non-free action, a
//! failing check), 2 on malformed input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use paract_core::action::ActionError;
use paract_core::algebra::{br_enumerate, br_verify_inverse_monoid, groupoid_build, DEFAULT_ORDER_CAP};
use paract_core::batch::{self, Execution};
use paract_core::fixtures::{gen_fixture, FixtureParams};
use paract_core::globalization::envelope;
use paract_core::group::GroupError;
use paract_core::instance::{group_value, parse_group, Body, InstanceError, InstanceFile};
use paract_core::orbits::{orbit_quotient, section_finite_traced, OrbitQuotient, Section};
use paract_core::properties::{run_suite, Suite};
use paract_core::tower::{build_chain, tower_section, ChainParseError, NormalChain};
use paract_core::{FiniteGroup, PartialAction};

#[derive(Debug, Parser)]
#[command(name = "paract", version, about = "Finite partial group actions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a group or action file against its axioms.
    Validate { file: PathBuf },
    /// Orbit classes under the whole group or a subgroup.
    Orbits {
        file: PathBuf,
        /// Comma-separated subgroup elements.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// A section of the orbit map by the clopen-cover construction.
    Section { file: PathBuf },
    /// The enveloping space, its global action and embedding.
    Globalize {
        file: PathBuf,
        /// Also compare the classes with the hat-action orbits.
        #[arg(long)]
        check_hat: bool,
        /// Print a DOT digraph of the global action instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// A section of the orbit map by descent along a normal chain.
    TowerSection {
        file: PathBuf,
        /// Chain terms separated by `;`, elements by `,`, e.g. `0,1,2,3;0,2;0`.
        #[arg(long)]
        chain: Option<String>,
    },
    /// Size and inverse-monoid check of the Birget-Rhodes expansion.
    Br {
        /// Group file or built-in group name.
        group: String,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap: usize,
    },
    /// The action groupoid and its axiom check.
    Groupoid {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Generate a fixture instance.
    Gen {
        /// bernoulli, subgroup-restriction, trivial, random-free or random-any
        name: String,
        /// Group name or group file.
        #[arg(long)]
        group: Option<String>,
        /// Comma-separated subset for subgroup-restriction.
        #[arg(long)]
        subset: Option<String>,
        /// Number of points (trivial) or point bound (random fixtures).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the randomized property suites.
    Suite {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; 0 uses all cores, 1 runs sequentially.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Run only the named suite.
        #[arg(long)]
        only: Option<String>,
    },
}

/// A command outcome other than success.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1; `report` is still printed on stdout.
    Domain { kind: String, message: String, report: Value },
    /// Exit 2.
    Malformed(anyhow::Error),
}

impl Failure {
    fn domain(kind: impl Into<String>, message: impl Into<String>) -> Self {
        let (kind, message) = (kind.into(), message.into());
        let report = json!({ "error": kind, "message": message });
        Failure::Domain { kind, message, report }
    }

    fn malformed(err: impl Into<anyhow::Error>) -> Self {
        Failure::Malformed(err.into())
    }
}

/// Innermost variant name of an error, e.g. `NotFree` for `Lift(Section(NotFree))`.
fn variant_name(err: &impl std::fmt::Debug) -> String {
    let text = format!("{err:?}");
    let mut rest = text.as_str();
    loop {
        let end = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if rest[end..].starts_with('(') && rest[end + 1..].starts_with(|c: char| c.is_uppercase()) {
            rest = &rest[end + 1..];
        } else {
            return rest[..end].to_string();
        }
    }
}

fn domain_error<E: std::fmt::Debug + std::fmt::Display>(err: E) -> Failure {
    Failure::domain(variant_name(&err), err.to_string())
}

impl From<InstanceError> for Failure {
    fn from(err: InstanceError) -> Self {
        match err {
            InstanceError::Group(e) => group_failure(e),
            InstanceError::Action(e) => action_failure(e),
            other => Failure::malformed(other),
        }
    }
}

fn group_failure(err: GroupError) -> Failure {
    match err {
        GroupError::Empty | GroupError::NotSquare { .. } | GroupError::EntryOutOfRange { .. } | GroupError::UnknownName(_) => {
            Failure::malformed(err)
        }
        other => domain_error(other),
    }
}

fn action_failure(err: ActionError) -> Failure {
    match err {
        ActionError::EmptySpace
        | ActionError::WrongElementCount { .. }
        | ActionError::PointOutOfRange { .. }
        | ActionError::LabelCount { .. } => Failure::malformed(err),
        ActionError::Group(e) => group_failure(e),
        other => domain_error(other),
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Malformed)?;
    Ok(InstanceFile::parse(&text)?)
}

/// The partial action in a file; global actions are viewed as partial ones.
fn read_action(path: &Path) -> Result<PartialAction, Failure> {
    let pa = match read_instance(path)?.body {
        Body::PartialAction(pa) => pa,
        Body::GlobalAction(ga) => ga.as_partial_action(),
        Body::Group(_) => return Err(Failure::malformed(anyhow::anyhow!("expected an action, found a group"))),
    };
    let report = pa.validate();
    if !report.is_valid() {
        return Err(Failure::Domain {
            kind: "InvalidPartialAction".into(),
            message: report.to_string(),
            report: json!({ "error": "InvalidPartialAction", "validation": report }),
        });
    }
    Ok(pa)
}

fn read_group(spec: &str) -> Result<FiniteGroup, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        return match read_instance(path)?.body {
            Body::Group(g) => Ok(g),
            Body::PartialAction(pa) => Ok(pa.group().clone()),
            Body::GlobalAction(ga) => Ok(ga.group().clone()),
        };
    }
    parse_group(&Value::String(spec.to_string()), "--group").map_err(Failure::from)
}

fn parse_indices(text: &str, flag: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .with_context(|| format!("{flag}: {s:?} is not an element index"))
                .map_err(Failure::Malformed)
        })
        .collect()
}

fn labels(pa: &PartialAction) -> Value {
    json!(pa.points().map(|x| pa.label(x)).collect::<Vec<_>>())
}

fn quotient_value(q: &OrbitQuotient) -> Value {
    json!({
        "subgroup": q.subgroup().elements(),
        "classes": q.classes(),
        "class_of": q.class_map(),
    })
}

fn section_value(pa: &PartialAction, s: &Section) -> Value {
    let points = s.chosen_points();
    json!({
        "choice": s.choice,
        "chosen_points": points,
        "chosen_labels": points.iter().map(|&x| pa.label(x)).collect::<Vec<_>>(),
        "classes": s.from.classes(),
    })
}

fn validate(path: &Path) -> Result<Value, Failure> {
    let file = read_instance(path)?;
    let kind = file.body.kind();
    match file.body {
        Body::Group(g) => Ok(json!({ "kind": kind, "valid": true, "order": g.order() })),
        Body::GlobalAction(ga) => Ok(json!({ "kind": kind, "valid": true, "space_size": ga.space_size() })),
        Body::PartialAction(pa) => {
            let report = pa.validate();
            let value = json!({
                "kind": kind,
                "valid": report.is_valid(),
                "pointwise": report.pointwise,
                "family": report.family,
                "verdicts_agree": report.verdicts_agree(),
            });
            if report.is_valid() {
                Ok(value)
            } else {
                Err(Failure::Domain {
                    kind: "InvalidPartialAction".into(),
                    message: report.to_string(),
                    report: value,
                })
            }
        }
    }
}

fn orbits(path: &Path, subgroup: Option<&str>) -> Result<Value, Failure> {
    let pa = read_action(path)?;
    let group = pa.group();
    let sub = match subgroup {
        None => group.whole(),
        Some(text) => group.subgroup(&parse_indices(text, "--subgroup")?).map_err(domain_error)?,
    };
    let q = orbit_quotient(&pa, &sub).map_err(domain_error)?;
    let mut value = quotient_value(&q);
    value["labels"] = labels(&pa);
    Ok(value)
}

fn section(path: &Path) -> Result<Value, Failure> {
    let pa = read_action(path)?;
    let trace = section_finite_traced(&pa).map_err(domain_error)?;
    let mut value = section_value(&pa, &trace.section);
    value["refinement"] = json!(trace
        .refinement
        .iter()
        .map(|(base, classes)| json!({ "base_point": base, "classes": classes }))
        .collect::<Vec<_>>());
    Ok(value)
}

fn globalize(path: &Path, check_hat: bool, dot: bool) -> Result<Output, Failure> {
    let pa = read_action(path)?;
    let env = envelope(&pa).map_err(domain_error)?;
    if dot {
        return Ok(Output::Text(env.to_dot()));
    }
    let mu: serde_json::Map<String, Value> = pa
        .group()
        .elements()
        .map(|g| (g.to_string(), json!(env.mu().perm(g))))
        .collect();
    let report = env.check();
    let mut value = json!({
        "size": env.len(),
        "classes": env.classes(),
        "iota": env.iota(),
        "mu": mu,
        "checks": report,
    });
    if !report.all_hold() {
        return Err(Failure::Domain {
            kind: "EnvelopeCheckFailed".into(),
            message: format!("{report:?}"),
            report: value,
        });
    }
    if check_hat {
        let matches = env.matches_hat_orbits();
        value["hat_orbits_match"] = json!(matches);
        if !matches {
            return Err(Failure::Domain {
                kind: "HatOrbitMismatch".into(),
                message: "envelope classes differ from hat-action orbits".into(),
                report: value,
            });
        }
    }
    Ok(Output::Json(value))
}

fn chain_failure(err: ChainParseError) -> Failure {
    match err {
        ChainParseError::BadElement(_) => Failure::malformed(err),
        other => domain_error(other),
    }
}

fn tower(path: &Path, chain: Option<&str>) -> Result<Value, Failure> {
    let pa = read_action(path)?;
    let chain = match chain {
        Some(text) => NormalChain::parse(pa.group(), text).map_err(chain_failure)?,
        None => build_chain(pa.group()),
    };
    let tower = tower_section(&pa, &chain).map_err(domain_error)?;
    let levels: Vec<Value> = tower
        .levels
        .iter()
        .map(|level| {
            json!({
                "subgroup": level.subgroup.elements(),
                "choice": level.section.choice,
                "classes": level.section.to.classes(),
            })
        })
        .collect();
    let mut value = section_value(&pa, tower.section());
    value["chain"] = json!(chain.terms().iter().map(|t| t.elements().to_vec()).collect::<Vec<_>>());
    value["levels"] = json!(levels);
    Ok(value)
}

fn br(spec: &str, cap: usize) -> Result<Value, Failure> {
    let group = Arc::new(read_group(spec)?);
    let report = br_verify_inverse_monoid(&group, cap, Execution::available()).map_err(domain_error)?;
    let enumerated = br_enumerate(&group).map_err(domain_error)?.len();
    let value = json!({
        "group": group_value(&group),
        "enumerated": enumerated,
        "report": report,
    });
    if report.all_pass() && enumerated == report.count {
        Ok(value)
    } else {
        Err(Failure::Domain {
            kind: "InverseMonoidCheckFailed".into(),
            message: report.violations.join("; "),
            report: value,
        })
    }
}

fn groupoid(path: &Path, dot: bool) -> Result<Output, Failure> {
    let pa = read_action(path)?;
    let gpd = groupoid_build(&pa);
    if dot {
        return Ok(Output::Text(gpd.to_dot()));
    }
    let pair = |a: paract_core::Arrow| [a.g, a.x];
    let report = gpd.verify();
    let value = json!({
        "arrows": gpd.arrows().iter().map(|&a| pair(a)).collect::<Vec<_>>(),
        "compositions": gpd
            .compositions()
            .into_iter()
            .map(|(f, h, c)| [pair(f), pair(h), pair(c)])
            .collect::<Vec<_>>(),
        "components": gpd.components(),
        "report": report,
    });
    if report.all_pass() {
        Ok(Output::Json(value))
    } else {
        Err(Failure::Domain {
            kind: "GroupoidCheckFailed".into(),
            message: format!("{report:?}"),
            report: value,
        })
    }
}

fn generate(name: &str, group: Option<&str>, subset: Option<&str>, size: Option<usize>, seed: u64) -> Result<Value, Failure> {
    let params = FixtureParams {
        group: group.map(read_group).transpose()?,
        subset: subset.map(|s| parse_indices(s, "--subset")).transpose()?,
        size,
        seed,
    };
    let pa = gen_fixture(name, &params).map_err(Failure::malformed)?;
    Ok(InstanceFile::named(name, Body::PartialAction(pa)).to_value())
}

fn suite(instances: usize, seed: u64, jobs: usize, only: Option<&str>) -> Result<Value, Failure> {
    let selected: Vec<Suite> = match only {
        None => Suite::ALL.to_vec(),
        Some(name) => vec![*Suite::ALL
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Failure::malformed(anyhow::anyhow!("unknown suite {name:?}")))?],
    };
    let exec = if jobs == 1 { Execution::Sequential } else { Execution::available() };
    let outcomes = batch::with_jobs(jobs, || {
        selected
            .iter()
            .map(|&s| run_suite(s, instances, seed, exec))
            .collect::<Vec<_>>()
    });
    let passed = outcomes.iter().all(|o| o.passed());
    let value = json!({ "instances": instances, "seed": seed, "passed": passed, "suites": outcomes });
    if passed {
        Ok(value)
    } else {
        Err(Failure::Domain {
            kind: "SuiteFailed".into(),
            message: "some property suites failed".into(),
            report: value,
        })
    }
}

pub enum Output {
    Json(Value),
    Text(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("values serialize")),
            Output::Text(t) => t.clone(),
        }
    }
}

pub fn execute(cli: Cli) -> Result<Output, Failure> {
    use Command::*;
    let json = |r: Result<Value, Failure>| r.map(Output::Json);
    match cli.command {
        Validate { file } => json(validate(&file)),
        Orbits { file, subgroup } => json(orbits(&file, subgroup.as_deref())),
        Section { file } => json(section(&file)),
        Globalize { file, check_hat, dot } => globalize(&file, check_hat, dot),
        TowerSection { file, chain } => json(tower(&file, chain.as_deref())),
        Br { group, cap } => json(br(&group, cap)),
        Groupoid { file, dot } => groupoid(&file, dot),
        Gen {
            name,
            group,
            subset,
            size,
            seed,
        } => json(generate(&name, group.as_deref(), subset.as_deref(), size, seed)),
        Suite {
            instances,
            seed,
            jobs,
            only,
        } => json(suite(instances, seed, jobs, only.as_deref())),
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.render());
            0
        }
        Err(Failure::Domain { kind, message, report }) => {
            print!("{}", Output::Json(report).render());
            eprintln!("error: {kind}: {message}");
            1
        }
        Err(Failure::Malformed(err)) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names() {
        use paract_core::orbits::SectionError;
        use paract_core::tower::TowerError;
        assert_eq!(variant_name(&SectionError::NotFree), "NotFree");
        assert_eq!(variant_name(&TowerError::NotNormal { index: 1 }), "NotNormal");
        assert_eq!(
            variant_name(&TowerError::Orbit(paract_core::orbits::OrbitError::NotAPartition { point: 0 })),
            "NotAPartition"
        );
    }
}
