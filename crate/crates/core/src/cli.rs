//! Batch command-line front end. Every subcommand writes one JSON report.
//!
//! Exit codes: 0 success, 1 verification counterexample, 2 input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::compactify::{PolyCurve, RadialPoint};
use crate::exact_linalg::{Rational, Subspace};
use crate::georgescu::{
    random_curve, verify_injectivity, verify_order_independence, GeorgescuPoint, GeorgescuSpace,
    CLOSURE_TOL,
};
use crate::nbody::{
    generators, minus_identity, nbody_semilattice, permutations, symmetry_action, NBodySpec,
    SymmetryKind, DEFAULT_CAP,
};
use crate::report::{envelope, render, tuple, Decimal};
use crate::semilattice::{
    admissible_orderings, close, count_admissible_orderings, is_clean, random_admissible_ordering,
    reduce_along, tag_events, AdmissibleOrdering, ReductionState, Semilattice,
};

#[derive(Parser, Debug)]
#[command(name = "corner-blowup", version, about = "Semilattices, blow-up charts and Georgescu tuples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Close a family of subspaces under intersection.
    Close(LatticeArgs),
    /// Count and list admissible orderings.
    Orderings {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Maximum number of orderings to list.
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Reduce by one minimal member, or along a whole ordering.
    Reduce {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Member index of the center.
        #[arg(long, conflicts_with = "ordering")]
        center: Option<usize>,
        /// Comma-separated member indices; defaults to the canonical ordering.
        #[arg(long)]
        ordering: Option<String>,
    },
    /// Limit of a polynomial curve in every compactified quotient.
    Limit {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Face signature of a tuple (or of a curve's limit).
    Signature {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, required_unless_present = "curve")]
        point: Option<PathBuf>,
        #[arg(long, conflicts_with = "point")]
        curve: Option<PathBuf>,
    },
    /// Compare tuples computed along different admissible orderings.
    VerifyOrder {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        sampling: Sampling,
        /// Maximum number of orderings compared.
        #[arg(long, default_value_t = 24)]
        orderings: usize,
    },
    /// Check that distinct curve limits give distinct tuples.
    VerifyInjective {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Generators, closure and symmetry checks for an N-body semilattice.
    Nbody {
        #[arg(long, value_parser = parse_nbody)]
        nbody: NBodyArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// Semilattice file: {"ambient","members"}, {"ambient","generators"} or {"nbody":{"N","d"}}.
    #[arg(long = "in", visible_alias = "lattice", required_unless_present = "nbody")]
    pub input: Option<PathBuf>,
    /// Built-in N-body semilattice, e.g. N=3,d=1.
    #[arg(long, value_parser = parse_nbody, conflicts_with = "input")]
    pub nbody: Option<NBodyArg>,
}

#[derive(Args, Debug, Clone)]
pub struct Sampling {
    #[arg(long, visible_alias = "samples", default_value_t = 100)]
    pub curves: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = CLOSURE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NBodyArg {
    pub particles: usize,
    pub d: usize,
}

fn parse_nbody(text: &str) -> Result<NBodyArg, String> {
    let mut particles = None;
    let mut d = None;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected N=<int>,d=<int>, got {text:?}"))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| format!("not a nonnegative integer: {value:?}"))?;
        match key.trim() {
            "N" | "n" => particles = Some(value),
            "d" | "D" => d = Some(value),
            other => return Err(format!("unknown key {other:?}")),
        }
    }
    match (particles, d) {
        (Some(particles), Some(d)) => Ok(NBodyArg { particles, d }),
        _ => Err(format!("expected N=<int>,d=<int>, got {text:?}")),
    }
}

/// Failures that end a run, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Io(String),
}

type Outcome = Result<(Value, bool), Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn from_value<T: for<'de> Deserialize<'de>>(path: &Path, value: Value) -> Result<T, Failure> {
    serde_json::from_value(value).map_err(input(&path.display().to_string()))
}

#[derive(Deserialize)]
struct GeneratorsFile {
    ambient: usize,
    generators: Vec<Vec<Vec<crate::exact_linalg::JsonRational>>>,
}

#[derive(Deserialize)]
struct NBodyFile {
    nbody: NBodySpec,
}

struct LoadedLattice {
    lattice: Semilattice,
    source: Value,
}

fn nbody_lattice(spec: NBodySpec) -> Result<LoadedLattice, Failure> {
    spec.validate().map_err(input("nbody"))?;
    let lattice = nbody_semilattice(&spec).map_err(input("nbody"))?;
    Ok(LoadedLattice {
        lattice,
        source: json!({ "nbody": { "N": spec.particles, "d": spec.d } }),
    })
}

fn load_lattice(args: &LatticeArgs) -> Result<LoadedLattice, Failure> {
    if let Some(arg) = args.nbody {
        return nbody_lattice(NBodySpec {
            particles: arg.particles,
            d: arg.d,
            cap: DEFAULT_CAP,
        });
    }
    let path = args
        .input
        .as_deref()
        .ok_or_else(|| Failure::Input("no semilattice given".into()))?;
    let value = read_json(path)?;
    let source = json!({ "file": path.display().to_string() });
    let ctx = path.display().to_string();
    let lattice = if value.get("nbody").is_some() {
        let file: NBodyFile = from_value(path, value)?;
        return Ok(LoadedLattice {
            source,
            ..nbody_lattice(file.nbody)?
        });
    } else if value.get("generators").is_some() {
        let file: GeneratorsFile = from_value(path, value)?;
        let gens = file
            .generators
            .into_iter()
            .map(|basis| {
                let vectors = basis.into_iter().map(crate::exact_linalg::from_json_vector).collect();
                Subspace::span(file.ambient, vectors)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(input(&ctx))?;
        close(file.ambient, &gens).map_err(input(&ctx))?
    } else {
        from_value::<Semilattice>(path, value)?
    };
    Ok(LoadedLattice { lattice, source })
}

fn load_curve(path: &Path) -> Result<PolyCurve, Failure> {
    from_value(path, read_json(path)?)
}

#[derive(Deserialize)]
struct PointFile {
    components: Vec<RadialPoint>,
}

fn space_of(lattice: &Semilattice) -> Result<GeorgescuSpace, Failure> {
    GeorgescuSpace::new(lattice.clone()).map_err(input("semilattice"))
}

fn parse_ordering(text: &str) -> Result<AdmissibleOrdering, Failure> {
    let sequence = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(input("--ordering"))?;
    Ok(AdmissibleOrdering { sequence })
}

fn members_summary(lattice: &Semilattice) -> Value {
    let dims: Vec<usize> = lattice.members().iter().map(Subspace::dim).collect();
    json!({
        "size": lattice.len(),
        "dims": dims,
        "semilattice": lattice,
    })
}

fn run_close(args: &LatticeArgs) -> Outcome {
    let loaded = load_lattice(args)?;
    let config = json!({ "lattice": loaded.source });
    Ok((envelope("close", config, members_summary(&loaded.lattice)), true))
}

fn run_orderings(args: &LatticeArgs, limit: usize) -> Outcome {
    let loaded = load_lattice(args)?;
    let lattice = &loaded.lattice;
    let count = count_admissible_orderings(lattice).ok();
    let listed = admissible_orderings(lattice, limit);
    let config = json!({ "lattice": loaded.source, "limit": limit });
    let body = json!({
        "count": count.map(|c| c.to_string()),
        "listed": listed.len(),
        "orderings": listed,
    });
    Ok((envelope("orderings", config, body), true))
}

fn run_reduce(args: &LatticeArgs, center: Option<usize>, ordering: Option<&str>) -> Outcome {
    let loaded = load_lattice(args)?;
    let lattice = &loaded.lattice;
    let config = json!({
        "lattice": loaded.source,
        "center": center,
        "ordering": ordering,
    });
    if let Some(center) = center {
        let mut state = ReductionState::new(lattice);
        let step = state.reduce(center).map_err(input("--center"))?;
        let body = json!({
            "size_before": lattice.len(),
            "size_after": step.family_size(),
            "reduction": step,
        });
        return Ok((envelope("reduce", config, body), true));
    }
    let ordering = match ordering {
        Some(text) => parse_ordering(text)?,
        None => AdmissibleOrdering::canonical(lattice),
    };
    let steps = reduce_along(lattice, &ordering).map_err(input("--ordering"))?;
    let events: Vec<Value> = tag_events(&steps)
        .into_iter()
        .map(|((a, b), tags)| json!({ "pair": [a, b], "tags": tags }))
        .collect();
    let sizes: Vec<usize> = steps.iter().map(|s| s.family_size()).collect();
    let body = json!({
        "ordering": ordering,
        "sizes": sizes,
        "steps": steps,
        "tag_events": events,
    });
    Ok((envelope("reduce", config, body), true))
}

fn limit_body(space: &GeorgescuSpace, point: &GeorgescuPoint) -> Result<Value, Failure> {
    let signature = space.signature(point).map_err(input("tuple"))?;
    Ok(json!({
        "components": tuple(point),
        "signature": signature.at_infinity,
    }))
}

fn run_limit(args: &LatticeArgs, curve: &Path) -> Outcome {
    let loaded = load_lattice(args)?;
    let c = load_curve(curve)?;
    let space = space_of(&loaded.lattice)?;
    let point = space
        .curve_limit_tuple(&c)
        .map_err(input(&curve.display().to_string()))?;
    let config = json!({ "lattice": loaded.source, "curve": curve.display().to_string() });
    Ok((envelope("limit", config, limit_body(&space, &point)?), true))
}

fn run_signature(args: &LatticeArgs, point: Option<&Path>, curve: Option<&Path>) -> Outcome {
    let loaded = load_lattice(args)?;
    let space = space_of(&loaded.lattice)?;
    let (p, config) = match (point, curve) {
        (Some(path), _) => {
            let file: PointFile = from_value(path, read_json(path)?)?;
            let config = json!({ "lattice": loaded.source, "point": path.display().to_string() });
            (GeorgescuPoint { components: file.components }, config)
        }
        (None, Some(path)) => {
            let c = load_curve(path)?;
            let p = space
                .curve_limit_tuple(&c)
                .map_err(input(&path.display().to_string()))?;
            let config = json!({ "lattice": loaded.source, "curve": path.display().to_string() });
            (p, config)
        }
        (None, None) => return Err(Failure::Input("give --point or --curve".into())),
    };
    if p.components.len() != loaded.lattice.len() {
        return Err(Failure::Input(format!(
            "tuple has {} components, semilattice has {} members",
            p.components.len(),
            loaded.lattice.len()
        )));
    }
    for (z, q) in p.components.iter().zip(0..) {
        if z.dim() != space.quotient(q).target_dim() {
            return Err(Failure::Input(format!("component {q} has the wrong dimension")));
        }
    }
    match space.check(&p) {
        Ok(()) => {
            let signature = space.signature(&p).map_err(input("tuple"))?;
            let body = json!({ "valid": true, "signature": signature.at_infinity });
            Ok((envelope("signature", config, body), true))
        }
        Err(violation) => {
            let body = json!({ "valid": false, "violation": violation });
            Ok((envelope("signature", config, body), false))
        }
    }
}

fn sample_curves(lattice: &Semilattice, sampling: &Sampling) -> Vec<PolyCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    (0..sampling.curves).map(|_| random_curve(&mut rng, lattice)).collect()
}

fn choose_orderings(lattice: &Semilattice, max: usize, seed: u64) -> Vec<AdmissibleOrdering> {
    let exhaustive = admissible_orderings(lattice, max.saturating_add(1));
    if exhaustive.len() <= max {
        return exhaustive;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut chosen = vec![AdmissibleOrdering::canonical(lattice)];
    let mut attempts = 0;
    while chosen.len() < max && attempts < 100 * max {
        let o = random_admissible_ordering(lattice, &mut rng);
        if !chosen.contains(&o) {
            chosen.push(o);
        }
        attempts += 1;
    }
    chosen
}

fn sampling_config(source: Value, sampling: &Sampling) -> Value {
    json!({
        "lattice": source,
        "curves": sampling.curves,
        "seed": sampling.seed,
        "tol": Decimal(sampling.tol),
    })
}

fn run_verify_order(args: &LatticeArgs, sampling: &Sampling, max_orderings: usize) -> Outcome {
    let loaded = load_lattice(args)?;
    let space = space_of(&loaded.lattice)?;
    let orderings = choose_orderings(&loaded.lattice, max_orderings.max(1), sampling.seed);
    let curves = sample_curves(&loaded.lattice, sampling);
    let report = verify_order_independence(&space, &orderings, &curves, sampling.tol)
        .map_err(input("harness"))?;
    let mut config = sampling_config(loaded.source, sampling);
    config["orderings"] = json!(max_orderings);
    let passed = report.passed();
    let mut body = serde_json::to_value(&report).expect("reports serialize");
    body["compared_orderings"] = json!(orderings);
    body["total_orderings"] = json!(count_admissible_orderings(&loaded.lattice)
        .ok()
        .map(|c| c.to_string()));
    Ok((envelope("verify-order", config, body), passed))
}

/// `c(λt)` for `λ = 2`: a positive reparametrization with the same limit.
fn reparametrize(c: &PolyCurve) -> PolyCurve {
    let two = Rational::from_integer(2.into());
    let mut factor = Rational::from_integer(1.into());
    let coeffs = c
        .coeffs()
        .iter()
        .map(|v| {
            let scaled = v.iter().map(|x| x * &factor).collect();
            factor *= &two;
            scaled
        })
        .collect();
    PolyCurve::new(coeffs).expect("same shape as the input curve")
}

fn is_chain(lattice: &Semilattice, members: &[usize]) -> bool {
    members.iter().all(|&a| {
        members
            .iter()
            .all(|&b| lattice.is_subset(a, b) || lattice.is_subset(b, a))
    })
}

fn run_verify_injective(args: &LatticeArgs, sampling: &Sampling) -> Outcome {
    let loaded = load_lattice(args)?;
    let lattice = &loaded.lattice;
    let space = space_of(lattice)?;
    let mut curves = sample_curves(lattice, sampling);
    let reparametrized: Vec<PolyCurve> = curves.iter().step_by(4).map(reparametrize).collect();
    curves.extend(reparametrized);
    let report = verify_injectivity(&space, &curves, sampling.tol).map_err(input("harness"))?;
    let mut signatures: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in &curves {
        let p = space.curve_limit_tuple(c).map_err(input("harness"))?;
        let s = space.signature(&p).map_err(input("harness"))?;
        *signatures.entry(s.at_infinity.into_iter().collect()).or_insert(0) += 1;
    }
    let observed: Vec<Value> = signatures
        .iter()
        .map(|(members, count)| {
            json!({ "members": members, "count": count, "is_chain": is_chain(lattice, members) })
        })
        .collect();
    let passed = report.passed();
    let mut body = serde_json::to_value(&report).expect("reports serialize");
    body["curves_total"] = json!(curves.len());
    body["signatures_observed"] = Value::Array(observed);
    let config = sampling_config(loaded.source, sampling);
    Ok((envelope("verify-injective", config, body), passed))
}

fn run_nbody(arg: NBodyArg, cap: usize) -> Outcome {
    let spec = NBodySpec::with_cap(arg.particles, arg.d, cap).map_err(input("--nbody"))?;
    let gens = generators(&spec).map_err(input("--nbody"))?;
    let lattice = nbody_semilattice(&spec).map_err(input("--nbody"))?;
    let mut permutation_failures = Vec::new();
    for sigma in permutations(spec.particles) {
        let g = symmetry_action(&spec, &SymmetryKind::Permutation(sigma.clone()))
            .map_err(input("--nbody"))?;
        if crate::semilattice::act(&lattice, &g).map_err(input("--nbody"))? != lattice {
            permutation_failures.push(sigma);
        }
    }
    let minus = symmetry_action(&spec, &SymmetryKind::OrthoDiag(minus_identity(spec.d)))
        .map_err(input("--nbody"))?;
    let minus_ok = crate::semilattice::act(&lattice, &minus).map_err(input("--nbody"))? == lattice;
    let clean = is_clean(lattice.members());
    let passed = permutation_failures.is_empty() && minus_ok;
    let config = json!({ "N": spec.particles, "d": spec.d, "cap": cap });
    let body = json!({
        "ambient": spec.ambient(),
        "generators": gens,
        "size": lattice.len(),
        "semilattice": lattice,
        "admissible_orderings": count_admissible_orderings(&lattice).ok().map(|c| c.to_string()),
        "clean": clean,
        "permutation_invariant": permutation_failures.is_empty(),
        "permutation_failures": permutation_failures,
        "minus_identity_invariant": minus_ok,
    });
    Ok((envelope("nbody", config, body), passed))
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Close(args) => run_close(args),
        Command::Orderings { lattice, limit } => run_orderings(lattice, *limit),
        Command::Reduce {
            lattice,
            center,
            ordering,
        } => run_reduce(lattice, *center, ordering.as_deref()),
        Command::Limit { lattice, curve } => run_limit(lattice, curve),
        Command::Signature {
            lattice,
            point,
            curve,
        } => run_signature(lattice, point.as_deref(), curve.as_deref()),
        Command::VerifyOrder {
            lattice,
            sampling,
            orderings,
        } => run_verify_order(lattice, sampling, *orderings),
        Command::VerifyInjective { lattice, sampling } => run_verify_injective(lattice, sampling),
        Command::Nbody { nbody, cap } => run_nbody(*nbody, *cap),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|(report, passed)| {
        emit(&cli, &render(&report))?;
        Ok(passed)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Input(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nbody_flag() {
        assert_eq!(parse_nbody("N=2,d=1"), Ok(NBodyArg { particles: 2, d: 1 }));
        assert_eq!(parse_nbody("d=3, N=3"), Ok(NBodyArg { particles: 3, d: 3 }));
        assert!(parse_nbody("N=2").is_err());
        assert!(parse_nbody("N=x,d=1").is_err());
    }

    #[test]
    fn reparametrization_keeps_the_limit() {
        let c: PolyCurve = serde_json::from_str(r#"{"coeffs": [[0, 5], [1, 0]]}"#).unwrap();
        let r = reparametrize(&c);
        assert_eq!(r.coeffs()[1][0], Rational::from_integer(2.into()));
        let lattice = nbody_semilattice(&NBodySpec::new(2, 1).unwrap()).unwrap();
        let space = GeorgescuSpace::new(lattice).unwrap();
        assert_eq!(space.exact_limits(&c).unwrap(), space.exact_limits(&r).unwrap());
    }

    #[test]
    fn ordering_choice_is_exhaustive_when_small() {
        let lattice = nbody_semilattice(&NBodySpec::new(2, 1).unwrap()).unwrap();
        assert_eq!(choose_orderings(&lattice, 24, 0).len(), 6);
        let big = nbody_semilattice(&NBodySpec::new(3, 1).unwrap()).unwrap();
        let chosen = choose_orderings(&big, 10, 0);
        assert_eq!(chosen.len(), 10);
        assert_eq!(chosen, choose_orderings(&big, 10, 0));
        for o in &chosen {
            o.validate(&big).unwrap();
        }
    }
}
