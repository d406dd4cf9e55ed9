//! `csp-blp`: solve, round, analyze and probe finite-valued Min CSPs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use csp_blp::blp::{rescale_denominator, solve_blp};
use csp_blp::csp::brute_force_opt;
use csp_blp::gadgets::{
    hypergraph_gadget, preset_language, random_instance, random_satisfiable_instance, Hypergraph, Preset,
    WeightRange,
};
use csp_blp::io::{
    fractional_op_to_value, instance_from_json, instance_to_json, language_from_json, language_to_json,
    lp_solution_from_json, rounding_report_to_value, symmetric_op_from_json, LPSolutionJson,
};
use csp_blp::polylab::{
    classify_operation, enumerate_symmetric_polymorphisms, lipschitz_analysis, min_c_bound, pp_evaluate,
    CBound, Operation, PPFormula, SymmetricOperation,
};
use csp_blp::rounding::{
    lattice_modulus, lattice_round, make_phi, round_symmetric, three_element_round, Family, Lattice, Mode,
};
use csp_blp::{Caps, Error, ExactField, Instance, LPSolution, Language, Rational, RoundingReport};

#[derive(Parser, Debug)]
#[command(name = "csp-blp", version, about = "Basic LP relaxation and rounding for Min CSPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    #[command(flatten)]
    caps: CapArgs,

    /// Include per-item detail (operation tables, per-instance assignments).
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct CapArgs {
    /// Cap on table sizes and tuple enumerations.
    #[arg(long, global = true, default_value_t = Caps::default().enumeration, value_parser = clap::value_parser!(u64).range(1..))]
    cap_enumeration: u64,
    /// Cap on |A|^|V| for exhaustive optimisation.
    #[arg(long, global = true, default_value_t = Caps::default().brute_force, value_parser = clap::value_parser!(u64).range(1..))]
    cap_brute_force: u64,
    /// Cap on the number of assignments in the c-bound probe.
    #[arg(long, global = true, default_value_t = Caps::default().farkas, value_parser = clap::value_parser!(u64).range(1..))]
    cap_farkas: u64,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps { enumeration: self.cap_enumeration, brute_force: self.cap_brute_force, farkas: self.cap_farkas }
    }
}

/// A language given either by preset name or by a JSON file.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct LanguageArg {
    /// Built-in language: hornsat:K, ihbs:K, min-uncut, min-2cnf, r-plus-minus, powerset-lattice:S.
    #[arg(long)]
    preset: Option<Preset>,
    /// Language JSON file.
    #[arg(long)]
    language: Option<PathBuf>,
}

impl LanguageArg {
    fn load(&self) -> anyhow::Result<(String, Language)> {
        match (&self.preset, &self.language) {
            (Some(p), _) => Ok((p.to_string(), preset_language(*p)?)),
            (None, Some(path)) => Ok((path.display().to_string(), language_from_json(&read(path)?)?)),
            (None, None) => bail!("either --preset or --language is required"),
        }
    }
}

/// A lattice given by file or as the powerset of an `s`-set.
#[derive(Args, Debug)]
struct LatticeArg {
    /// Lattice JSON file ({"ground_size", "subsets"}).
    #[arg(long, conflicts_with = "powerset")]
    lattice: Option<PathBuf>,
    /// Use the powerset lattice of an S-element set.
    #[arg(long)]
    powerset: Option<usize>,
}

impl LatticeArg {
    fn load(&self, domain_size: Option<usize>) -> anyhow::Result<Lattice> {
        if let Some(path) = &self.lattice {
            return Ok(serde_json::from_str(&read(path)?)?);
        }
        let s = match (self.powerset, domain_size) {
            (Some(s), _) => s,
            (None, Some(d)) if d.is_power_of_two() => d.trailing_zeros() as usize,
            _ => bail!("pass --lattice or --powerset"),
        };
        Ok(Lattice::powerset(s)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the BLP relaxation; optionally brute-force OPT.
    Solve {
        instance: PathBuf,
        /// Also compute OPT by exhaustive search.
        #[arg(long)]
        brute_force: bool,
        /// Write the LP solution to this file (input for `round --solution`).
        #[arg(long)]
        lp_out: Option<PathBuf>,
    },
    /// Round a BLP solution to an assignment.
    Round {
        instance: PathBuf,
        /// symmetric:<op-file>, lattice or three-element.
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, value_enum, default_value_t = ModeArg::Derandomized)]
        mode: ModeArg,
        /// Required in sample mode.
        #[arg(long)]
        seed: Option<u64>,
        /// Use this LP solution instead of solving the relaxation.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Rescale the denominator to at least this value.
        #[arg(long)]
        rescale: Option<u64>,
        /// Rescale to the least denominator the scheme accepts.
        #[arg(long)]
        auto_rescale: bool,
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Enumerate symmetric polymorphisms per arity and classify them.
    AnalyzeLanguage {
        #[command(flatten)]
        language: LanguageArg,
        /// Largest arity to enumerate.
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Smallest arity to enumerate.
        #[arg(long, default_value_t = 1)]
        min_arity: usize,
    },
    /// Least c of a c-bounded fractional assignment on the universal instance, per n.
    GapProbe {
        #[command(flatten)]
        language: LanguageArg,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Include the optimal fractional assignment.
        #[arg(long)]
        certificate: bool,
    },
    /// Exact Lipschitz constant of a rounding family.
    Lipschitz {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Arity; repeatable.
        #[arg(long, required = true, num_args = 1..)]
        n: Vec<usize>,
        /// Maximum arity K for the lattice family.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Emit a preset language, or the independent-set reduction instance of a hypergraph.
    Gadget {
        #[command(flatten)]
        language: LanguageArg,
        /// Hypergraph JSON ({"num_vertices", "arity", "edges"}).
        #[arg(long, requires = "target")]
        hypergraph: Option<PathBuf>,
        /// Use member I of the language as the relation R.
        #[arg(long, group = "target")]
        member: Option<usize>,
        /// Define R by this pp-formula over the language.
        #[arg(long, group = "target")]
        pp: Option<PathBuf>,
        /// The label a of the gadget.
        #[arg(long, default_value_t = 0)]
        a: usize,
        /// The label b of the gadget.
        #[arg(long, default_value_t = 1)]
        b: usize,
    },
    /// Random instances: OPT vs BLPopt vs rounded value.
    Bench {
        #[command(flatten)]
        language: LanguageArg,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 5)]
        vars: usize,
        #[arg(long, default_value_t = 6)]
        constraints: usize,
        #[arg(long)]
        seed: u64,
        /// Plant a zero-cost assignment in every instance.
        #[arg(long)]
        satisfiable: bool,
        /// Rounding scheme; by default picked from the language.
        #[arg(long)]
        scheme: Option<Scheme>,
        #[command(flatten)]
        lattice: LatticeArg,
    },
}

#[derive(Debug, Clone)]
enum Scheme {
    Symmetric(PathBuf),
    Lattice,
    ThreeElement,
    None,
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lattice" => Ok(Scheme::Lattice),
            "three-element" => Ok(Scheme::ThreeElement),
            "none" => Ok(Scheme::None),
            _ => match s.strip_prefix("symmetric:") {
                Some(p) if !p.is_empty() => Ok(Scheme::Symmetric(p.into())),
                _ => Err(format!("unknown scheme {s:?}; expected symmetric:<op-file>, lattice, three-element or none")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Sample,
    Derandomized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Lattice,
    ThreeElement,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn rat(x: &Rational) -> String {
    x.to_ratio_string()
}

fn write_json(path: &Path, v: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

struct Ctx {
    caps: Caps,
    verbose: bool,
}

/// Outcome of a subcommand: the report and an exit code.
struct Outcome {
    report: Value,
    code: u8,
}

impl From<Value> for Outcome {
    fn from(report: Value) -> Self {
        Outcome { report, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let ctx = Ctx { caps: cli.caps.caps(), verbose: cli.verbose };
    let result = run(&cli.command, &ctx).and_then(|o| {
        match &cli.out {
            Some(path) => write_json(path, &o.report)?,
            None => println!("{}", serde_json::to_string_pretty(&o.report)?),
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if e.downcast_ref::<Error>().is_some() {
                eprintln!("error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. }) => 2,
        Some(Error::Infeasible(_)) | Some(Error::HardViolation { .. }) => 3,
        _ => 1,
    }
}

fn run(command: &Command, ctx: &Ctx) -> anyhow::Result<Outcome> {
    match command {
        Command::Solve { instance, brute_force, lp_out } => solve(instance, *brute_force, lp_out.as_deref(), ctx),
        Command::Round { instance, scheme, mode, seed, solution, rescale, auto_rescale, lattice } => {
            let inst: Instance = instance_from_json(&read(instance)?)?;
            let sol = match solution {
                Some(p) => lp_solution_from_json(&read(p)?)?,
                None => solve_blp(&inst)?,
            };
            let sol = match rescale {
                Some(t) => rescale_denominator(&sol, *t)?,
                None => sol,
            };
            let mode = match (mode, seed) {
                (ModeArg::Sample, Some(seed)) => Mode::Sample { seed: *seed },
                (ModeArg::Sample, None) => bail!("--seed is required in sample mode"),
                (ModeArg::Derandomized, _) => Mode::Derandomized,
            };
            let report = round(&inst, &sol, scheme, mode, *auto_rescale, lattice)?
                .ok_or_else(|| anyhow!("scheme none produces no assignment"))?;
            Ok(rounding_report_to_value(&report).into())
        }
        Command::AnalyzeLanguage { language, max_arity, min_arity } => {
            analyze(language, *min_arity, *max_arity, ctx)
        }
        Command::GapProbe { language, n_min, n_max, certificate } => {
            gap_probe(language, *n_min, *n_max, *certificate, ctx)
        }
        Command::Lipschitz { family, n, k, lattice } => lipschitz(*family, n, *k, lattice, ctx),
        Command::Gadget { language, hypergraph, member, pp, a, b } => {
            gadget(language, hypergraph.as_deref(), *member, pp.as_deref(), *a, *b, ctx)
        }
        Command::Bench { language, instances, vars, constraints, seed, satisfiable, scheme, lattice } => {
            let config = BenchConfig {
                instances: *instances,
                vars: *vars,
                constraints: *constraints,
                seed: *seed,
                satisfiable: *satisfiable,
            };
            bench(language, &config, scheme.as_ref(), lattice, ctx)
        }
    }
}

fn solve(path: &Path, brute_force: bool, lp_out: Option<&Path>, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let inst: Instance = instance_from_json(&read(path)?)?;
    let sol = solve_blp(&inst)?;
    if let Some(p) = lp_out {
        write_json(p, &LPSolutionJson::from(&sol))?;
    }
    let mut report = json!({
        "num_vars": inst.num_vars(),
        "num_constraints": inst.constraints().len(),
        "blp_value": rat(&sol.value),
        "denominator": sol.denominator,
        "lp_solution": LPSolutionJson::from(&sol),
    });
    if brute_force {
        let opt = brute_force_opt(&inst, ctx.caps.brute_force)?;
        report["opt"] = json!({ "value": rat(&opt.value), "witness": opt.witness });
    }
    Ok(report.into())
}

/// Least denominator the scheme accepts, for `--auto-rescale`.
fn scheme_minimum(inst: &Instance, scheme: &Scheme, lattice: Option<&Lattice>, op: Option<&SymmetricOperation>) -> anyhow::Result<u64> {
    Ok(match scheme {
        Scheme::Lattice => lattice_modulus(lattice.expect("lattice loaded"), inst.max_arity().max(1))?,
        Scheme::ThreeElement => 3,
        Scheme::Symmetric(_) => op.expect("operation loaded").arity() as u64,
        Scheme::None => 1,
    })
}

fn round(
    inst: &Instance,
    sol: &LPSolution,
    scheme: &Scheme,
    mode: Mode,
    auto_rescale: bool,
    lattice_arg: &LatticeArg,
) -> anyhow::Result<Option<RoundingReport>> {
    let lattice = match scheme {
        Scheme::Lattice => Some(lattice_arg.load(Some(inst.domain().size()))?),
        _ => None,
    };
    let op = match scheme {
        Scheme::Symmetric(p) => Some(symmetric_op_from_json(&read(p)?)?),
        _ => None,
    };
    let mut sol = sol.clone();
    if auto_rescale {
        let min = scheme_minimum(inst, scheme, lattice.as_ref(), op.as_ref())?;
        if sol.denominator < min {
            sol = rescale_denominator(&sol, min)?;
        }
    }
    Ok(match scheme {
        Scheme::Lattice => Some(lattice_round(inst, &sol, lattice.as_ref().expect("loaded"), mode)?),
        Scheme::ThreeElement => Some(three_element_round(inst, &sol, mode)?),
        Scheme::Symmetric(_) => Some(symmetric_report(inst, &sol, op.as_ref().expect("loaded"))?),
        Scheme::None => None,
    })
}

fn symmetric_report(inst: &Instance, sol: &LPSolution, op: &SymmetricOperation) -> anyhow::Result<RoundingReport> {
    if op.arity() as u64 != sol.denominator {
        bail!(
            "operation arity {} differs from the LP denominator {}; try --rescale {} or --auto-rescale",
            op.arity(),
            sol.denominator,
            op.arity()
        );
    }
    let assignment = round_symmetric(sol, op)?;
    let e = csp_blp::csp::evaluate(inst, &assignment, false)?;
    Ok(RoundingReport {
        scheme: "symmetric".into(),
        assignment,
        value: e.value.clone(),
        blp_value: sol.value.clone(),
        n: sol.denominator,
        h: 0,
        h_values: vec![(0, e.value.clone())],
        mean_value: e.value.clone(),
        seed: None,
        feasible: e.is_feasible(),
    })
}

fn analyze(language: &LanguageArg, min_arity: usize, max_arity: usize, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (name, lang) = language.load()?;
    if min_arity == 0 || min_arity > max_arity {
        bail!("need 1 ≤ --min-arity ≤ --max-arity");
    }
    let mut rows = Vec::new();
    let mut nu_arity = None;
    for n in min_arity..=max_arity {
        let ops = enumerate_symmetric_polymorphisms(&lang, n, &ctx.caps)?;
        let mut flags = json!({ "idempotent": 0, "totally_symmetric": 0, "nu": 0, "wnu": 0 });
        let mut detail = Vec::new();
        for op in &ops {
            let c = classify_operation(&op.to_general(ctx.caps.enumeration)?);
            for (key, on) in [("idempotent", c.idempotent), ("totally_symmetric", c.totally_symmetric), ("nu", c.nu), ("wnu", c.wnu)] {
                if on {
                    flags[key] = json!(flags[key].as_u64().unwrap_or(0) + 1);
                }
            }
            if c.nu && nu_arity.is_none() {
                nu_arity = Some(n);
            }
            if ctx.verbose {
                detail.push(json!({ "table": op.table(), "classification": c }));
            }
        }
        let mut row = json!({ "arity": n, "count": ops.len(), "classified": flags });
        if ctx.verbose {
            row["operations"] = Value::Array(detail);
        }
        rows.push(row);
    }
    Ok(json!({
        "language": name,
        "domain_size": lang.domain().size(),
        "arities": rows,
        "symmetric_nu_arity": nu_arity,
    })
    .into())
}

fn gap_probe(language: &LanguageArg, n_min: usize, n_max: usize, certificate: bool, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (name, lang) = language.load()?;
    if n_min == 0 || n_min > n_max {
        bail!("need 1 ≤ --n-min ≤ --n-max");
    }
    let mut rows = Vec::new();
    let mut code = 0;
    for n in n_min..=n_max {
        let row = match min_c_bound(&lang, n, &ctx.caps) {
            Ok(CBound::Bounded { c, certificate: cert }) => {
                let mut row = json!({ "n": n, "verdict": "bounded", "c": rat(&c) });
                if certificate {
                    row["certificate"] = fractional_op_to_value(&cert);
                }
                row
            }
            Ok(CBound::Infeasible) => json!({ "n": n, "verdict": "infeasible", "c": null }),
            Err(e @ Error::CapExceeded { .. }) => {
                code = 2;
                json!({ "n": n, "verdict": "cap-exceeded", "c": null, "detail": e.to_string() })
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    Ok(Outcome { report: json!({ "language": name, "rows": rows }), code })
}

fn lipschitz(family: FamilyArg, ns: &[usize], k: usize, lattice_arg: &LatticeArg, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (fam, name, bound) = match family {
        FamilyArg::Lattice => {
            let lattice = match (&lattice_arg.lattice, lattice_arg.powerset) {
                (None, None) => Lattice::powerset(2)?,
                _ => lattice_arg.load(None)?,
            };
            let big_n = lattice_modulus(&lattice, k)?;
            let bound = Rational::from_integer((big_n * lattice.ground_size() as u64).into());
            (Family::Lattice { lattice, k }, "lattice", Some(bound))
        }
        FamilyArg::ThreeElement => (Family::ThreeElement, "three-element", None),
    };
    let mut rows = Vec::new();
    for &n in ns {
        let phi = make_phi::<Rational>(&fam, n, ctx.caps.enumeration)?;
        let a = lipschitz_analysis(&phi, ctx.caps.enumeration)?;
        let mut row = json!({
            "n": n,
            "support_size": phi.support().len(),
            "constant": rat(&a.constant),
            "witness": a.witness.as_ref().map(|(x, y)| [x.counts().to_vec(), y.counts().to_vec()]),
        });
        if let Some(b) = &bound {
            row["bound"] = json!(rat(b));
            row["within_bound"] = json!(a.constant <= *b);
        }
        rows.push(row);
    }
    let mut report = json!({ "family": name, "rows": rows });
    if let Family::Lattice { lattice, k } = &fam {
        report["lattice"] = json!({ "ground_size": lattice.ground_size(), "domain_size": lattice.domain_size(), "k": k });
    }
    Ok(report.into())
}

fn gadget(
    language: &LanguageArg,
    hypergraph: Option<&Path>,
    member: Option<usize>,
    pp: Option<&Path>,
    a: usize,
    b: usize,
    ctx: &Ctx,
) -> anyhow::Result<Outcome> {
    let (_, lang) = language.load()?;
    let Some(hpath) = hypergraph else {
        return Ok(serde_json::from_str::<Value>(&language_to_json(&lang))?.into());
    };
    let h: Hypergraph = serde_json::from_str(&read(hpath)?)?;
    let inst: Instance = match (member, pp) {
        (Some(i), None) => {
            let relation = lang
                .members()
                .get(i)
                .and_then(|m| m.as_relation())
                .ok_or_else(|| anyhow!("member {i} is not a relation of the language"))?
                .clone();
            hypergraph_gadget(&h, &relation, a, b, None, ctx.caps.enumeration)?
        }
        (None, Some(path)) => {
            let f: PPFormula = serde_json::from_str(&read(path)?)?;
            let f = PPFormula::new(f.num_free, f.num_bound, f.atoms)?;
            let relation = pp_evaluate(&f, &lang, ctx.caps.enumeration)?;
            hypergraph_gadget(&h, &relation, a, b, Some((&f, &lang)), ctx.caps.enumeration)?
        }
        _ => bail!("pass exactly one of --member and --pp"),
    };
    Ok(serde_json::from_str::<Value>(&instance_to_json(&inst))?.into())
}

struct BenchConfig {
    instances: usize,
    vars: usize,
    constraints: usize,
    seed: u64,
    satisfiable: bool,
}

fn bench(
    language: &LanguageArg,
    config: &BenchConfig,
    scheme: Option<&Scheme>,
    lattice: &LatticeArg,
    ctx: &Ctx,
) -> anyhow::Result<Outcome> {
    let (name, lang) = language.load()?;
    let default_scheme = match language.preset {
        Some(Preset::PowersetLattice { .. }) => Some(Scheme::Lattice),
        Some(Preset::RPlusMinus) => Some(Scheme::ThreeElement),
        _ => None,
    };
    let scheme = scheme.cloned().or(default_scheme);
    let mut rows = Vec::new();
    let mut sound = true;
    for i in 0..config.instances {
        let seed = config.seed.wrapping_add(i as u64);
        let inst = if config.satisfiable {
            random_satisfiable_instance(&lang, config.vars, config.constraints, WeightRange::default(), seed)?.0
        } else {
            random_instance(&lang, config.vars, config.constraints, WeightRange::default(), seed)?
        };
        let sol = solve_blp(&inst)?;
        let opt = brute_force_opt(&inst, ctx.caps.brute_force)?;
        let rounded = match &scheme {
            Some(s) => round(&inst, &sol, s, Mode::Derandomized, true, lattice)?,
            None => first_symmetric_rounding(&inst, &sol, &lang, ctx)?,
        };
        sound &= sol.value <= opt.value && rounded.as_ref().is_none_or(|r| sol.value <= r.value);
        let mut row = json!({
            "seed": seed,
            "opt": rat(&opt.value),
            "blp": rat(&sol.value),
            "denominator": sol.denominator,
            "scheme": rounded.as_ref().map(|r| r.scheme.clone()),
            "rounded": rounded.as_ref().map(|r| rat(&r.value)),
        });
        if ctx.verbose {
            row["opt_witness"] = json!(opt.witness);
            row["rounded_assignment"] = json!(rounded.as_ref().map(|r| r.assignment.clone()));
        }
        rows.push(row);
    }
    Ok(json!({ "language": name, "rows": rows, "blp_below_opt_and_rounded": sound }).into())
}

/// Rounds with the first enumerated symmetric polymorphism at the LP
/// denominator, if there is one.
fn first_symmetric_rounding(inst: &Instance, sol: &LPSolution, lang: &Language, ctx: &Ctx) -> anyhow::Result<Option<RoundingReport>> {
    let n = sol.denominator as usize;
    let ops = match enumerate_symmetric_polymorphisms(lang, n, &ctx.caps) {
        Ok(ops) => ops,
        Err(Error::CapExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    ops.first().map(|op| symmetric_report(inst, sol, op)).transpose()
}
