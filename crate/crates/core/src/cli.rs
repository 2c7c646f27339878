//! The `elimpar` command line: load a theory and a groupoid, run checks and
//! emit text and JSON reports.

use crate::definable::{full_depth, saturate_family, PointSpace, DEFAULT_FAMILY_CAP};
use crate::elimination::{conservative_at_level, eliminates_at_tuple, eliminates_parameters, ElimVerdict, FormulaPool};
use crate::error::{Error, Result};
use crate::groupoid::{load_groupoid, GroupoidDoc, LoadedGroupoid};
use crate::report::{context_sorts, definable_json, point_json, show_point, structure_json, RunReport, Status};
use crate::semantics::check_theory;
use crate::syntax::{
    morleyize, parse_classical_theory, parse_functional_theory, parse_theory, print_formula, print_theory,
    relationalize, Context, Theory,
};
use crate::theorygen::{synthesize, SynthesisBounds};
use crate::topology::{arrow_basis, check_etale_complete, first_inseparable, is_open_map_t, lattice_gap, object_basis};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fs;
use std::io::Write;

pub const DEFAULT_MAX_TUPLE: usize = 3;
pub const DEFAULT_SIZE_BOUND: usize = 4;
pub const DEFAULT_POOL_VARS: usize = 2;
pub const DEFAULT_MODEL_CAP: usize = 1 << 22;

#[derive(Debug, Parser)]
#[command(name = "elimpar", version, about = "Elimination of parameters for finite model groupoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theory satisfaction, conservativity, elimination, openness and T0.
    Check(CheckArgs),
    /// Orbit of `⟦x⃗ = m⃗⟧` and its parameter-free formula, if any.
    Orbit(OrbitArgs),
    /// Object and arrow bases, the target map and the stable-open lattice.
    Topology(TopologyArgs),
    /// Add every isomorphism between the objects.
    Etale(EtaleArgs),
    /// Synthesize the theory of the groupoid over the extended signature.
    Synth(SynthArgs),
    /// Rewrite a classical theory as a coherent one.
    Morleyize(MorleyizeArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Groupoid JSON document.
    #[arg(long)]
    pub groupoid: String,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Theory in the DSL; required by the `theory` and `conservative` checks.
    #[arg(long)]
    pub theory: Option<String>,
    /// Comma-separated subset of theory,conservative,elimination,open,t0.
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_TUPLE)]
    pub max_tuple: usize,
    /// Per-sort model size for conservativity.
    #[arg(long, default_value_t = DEFAULT_SIZE_BOUND)]
    pub size_bound: usize,
    /// Scheme instantiation bound; defaults to the size bound.
    #[arg(long)]
    pub scheme_bound: Option<usize>,
    /// Variables in the conservativity formula pool.
    #[arg(long, default_value_t = DEFAULT_POOL_VARS)]
    pub pool_vars: usize,
    /// Distinct parameters per basic sentence and arrow mapping.
    #[arg(long, default_value_t = crate::topology::DEFAULT_MAX_PARAMS)]
    pub max_params: usize,
    #[arg(long, default_value_t = DEFAULT_MODEL_CAP)]
    pub model_cap: usize,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated parameter names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tuple: Vec<String>,
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = crate::topology::DEFAULT_MAX_PARAMS)]
    pub max_params: usize,
    /// Comma-separated sorts of the context for the lattice comparison;
    /// defaults to one variable of the first sort.
    #[arg(long, value_delimiter = ',')]
    pub context: Vec<String>,
    /// Quantifier depth of the parameter-free family; defaults to the
    /// largest object size.
    #[arg(long)]
    pub max_extra_vars: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EtaleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Write the completed groupoid here instead of standard output.
    #[arg(long)]
    pub out: Option<String>,
    /// Tuple bound for the before/after elimination comparison.
    #[arg(long, default_value_t = DEFAULT_MAX_TUPLE)]
    pub max_tuple: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: Common,
    /// Write the theory here instead of standard output.
    #[arg(long)]
    pub out: Option<String>,
    /// Write the extended groupoid here.
    #[arg(long)]
    pub out_groupoid: Option<String>,
    /// Length bound on parameter tuples given a relation.
    #[arg(long, default_value_t = 2)]
    pub max_tuple: usize,
    #[arg(long, default_value_t = 2)]
    pub vars: usize,
    #[arg(long, default_value_t = 2)]
    pub premise_atoms: usize,
    #[arg(long, default_value_t = 2)]
    pub conclusion_atoms: usize,
    /// Leave out `∃w. atom` disjuncts.
    #[arg(long)]
    pub no_exists: bool,
    #[arg(long, default_value_t = 20_000)]
    pub max_axioms: usize,
}

#[derive(Debug, Args)]
pub struct MorleyizeArgs {
    /// Classical theory in the DSL.
    #[arg(long)]
    pub theory: String,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub json: Option<String>,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(&cli.command, &mut out) {
        Ok(report) => report.status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => 3,
                _ => 2,
            }
        }
    }
}

/// Runs one command, writing the human-readable summary to `out` and any
/// requested JSON report to its file.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<RunReport> {
    let (report, json) = match cmd {
        Command::Check(a) => (cmd_check(a, out)?, &a.common.json),
        Command::Orbit(a) => (cmd_orbit(a, out)?, &a.common.json),
        Command::Topology(a) => (cmd_topology(a, out)?, &a.common.json),
        Command::Etale(a) => (cmd_etale(a, out)?, &a.common.json),
        Command::Synth(a) => (cmd_synth(a, out)?, &a.common.json),
        Command::Morleyize(a) => (cmd_morleyize(a, out)?, &a.json),
    };
    if let Some(path) = json {
        write_file(path, &report.to_json())?;
    }
    Ok(report)
}

fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    })
}

fn write_file(path: &str, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    })
}

fn in_file<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io { .. } => e,
        other => Error::Io {
            path: path.to_string(),
            message: other.to_string(),
        },
    })
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    })
}

/// Relational theories parse directly; theories declaring functions are
/// parsed as such and encoded by graph relations.
pub fn load_theory_text(text: &str) -> Result<Theory> {
    let functional = text.lines().any(|l| l.trim_start().starts_with("fun "));
    if functional {
        relationalize(&parse_functional_theory(text)?)
    } else {
        parse_theory(text)
    }
}

fn load_groupoid_file(path: &str, report: &mut RunReport) -> Result<LoadedGroupoid> {
    let text = read_file(path)?;
    report.input("groupoid", path, text.as_bytes());
    in_file(path, load_groupoid(&text))
}

fn load_theory_file(path: &str, report: &mut RunReport) -> Result<Theory> {
    let text = read_file(path)?;
    report.input("theory", path, text.as_bytes());
    in_file(path, load_theory_text(&text))
}

fn capped<T>(r: Result<T>) -> Result<std::result::Result<T, Error>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ Error::CapExceeded { .. }) => Ok(Err(e)),
        Err(e) => Err(e),
    }
}

fn elimination_json(lg: &LoadedGroupoid, v: &ElimVerdict) -> Value {
    let g = &lg.groupoid;
    let entries: Vec<Value> = v
        .entries
        .iter()
        .map(|e| {
            let sorts = context_sorts(g, &e.context);
            json!({
                "tuple": e.names,
                "eliminates": e.eliminates,
                "orbit_size": e.orbit.len(),
                "upper_bound": print_formula(&e.upper_bound),
                "formula": e.formula.as_ref().map(print_formula),
                "witness": e.witness.as_ref().map(|w| json!({
                    "inside": point_json(g, &sorts, &w.inside),
                    "outside": point_json(g, &sorts, &w.outside),
                })),
            })
        })
        .collect();
    json!({
        "eliminates": v.eliminates,
        "tuple_bound": v.bound,
        "tuples": v.entries.len(),
        "uninterpreted": v.uninterpreted,
        "entries": entries,
    })
}

fn elimination_line(lg: &LoadedGroupoid, v: &ElimVerdict) -> String {
    match v.first_failure() {
        None => format!("elimination: pass ({} tuples, tuple bound {})", v.entries.len(), v.bound),
        Some(e) => {
            let sorts = context_sorts(&lg.groupoid, &e.context);
            let w = e.witness.as_ref().expect("failures carry witnesses");
            format!(
                "elimination: FAIL at ({}): {} is in the orbit, {} lies above it but outside",
                e.names.join(", "),
                show_point(&lg.groupoid, &sorts, &w.inside),
                show_point(&lg.groupoid, &sorts, &w.outside)
            )
        }
    }
}

const ALL_CHECKS: [&str; 5] = ["theory", "conservative", "elimination", "open", "t0"];

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("check");
    let lg = load_groupoid_file(&a.common.groupoid, &mut report)?;
    let theory = a.theory.as_deref().map(|p| load_theory_file(p, &mut report)).transpose()?;
    let g = &lg.groupoid;
    let checks: Vec<&str> = if a.check.is_empty() {
        ALL_CHECKS
            .iter()
            .copied()
            .filter(|c| theory.is_some() || !matches!(*c, "theory" | "conservative"))
            .collect()
    } else {
        a.check.iter().map(String::as_str).collect()
    };
    for c in &checks {
        if !ALL_CHECKS.contains(c) {
            return Err(Error::invalid(format!("unknown check `{c}`")));
        }
    }
    let scheme_bound = a.scheme_bound.unwrap_or(a.size_bound);
    report.bound("max_tuple", a.max_tuple);
    report.bound("size_bound", a.size_bound);
    report.bound("scheme_bound", scheme_bound);
    report.bound("pool_vars", a.pool_vars);
    report.bound("max_params", a.max_params);
    report.bound("model_cap", a.model_cap);
    say(out, format!("groupoid: {} objects, {} arrows, {} parameters", g.len(), g.arrows().len(), lg.indexing.len()))?;
    let need_theory = || {
        theory
            .as_ref()
            .ok_or_else(|| Error::invalid("this check needs --theory"))
    };
    if let Some(t) = &theory {
        if !t.signature.is_subsignature_of(g.signature()) {
            return Err(Error::invalid("the theory's signature is not part of the groupoid's"));
        }
    }
    for c in checks {
        match c {
            "theory" => {
                let t = need_theory()?;
                let mut failures = Vec::new();
                let mut inconclusive = false;
                for m in g.objects() {
                    let r = check_theory(m, t, scheme_bound)?;
                    inconclusive |= r.schemes_inconclusive;
                    for f in r.failures {
                        failures.push(json!({ "object": m.id, "axiom": f.axiom, "assignment": f.assignment }));
                    }
                }
                let status = if !failures.is_empty() {
                    Status::Fail
                } else if inconclusive {
                    Status::Inconclusive
                } else {
                    Status::Pass
                };
                match failures.first() {
                    None => say(out, format!("theory: {} in every object", word(status)))?,
                    Some(f) => say(out, format!("theory: FAIL {} violates {} at {}", f["object"], f["axiom"], f["assignment"]))?,
                }
                report.push("theory", status, json!({ "failures": failures, "schemes_inconclusive": inconclusive }));
            }
            "conservative" => {
                let t = need_theory()?;
                let pool = FormulaPool::atomic(g.signature(), a.pool_vars, true);
                match capped(conservative_at_level(g, t, &pool, a.size_bound, scheme_bound, a.model_cap))? {
                    Ok(v) => {
                        let status = if !v.conservative {
                            Status::Fail
                        } else if v.schemes_inconclusive {
                            Status::Inconclusive
                        } else {
                            Status::Pass
                        };
                        let cm = v.countermodel.as_ref().map(|cm| {
                            json!({
                                "context": cm.context.vars,
                                "premise": print_formula(&cm.premise),
                                "conclusion": print_formula(&cm.conclusion),
                                "model": structure_json(&cm.model),
                                "tuple": cm.tuple,
                            })
                        });
                        let failures: Vec<Value> = v
                            .object_failures
                            .iter()
                            .map(|(id, c)| json!({ "object": id, "axioms": c.failures.iter().map(|f| &f.axiom).collect::<Vec<_>>() }))
                            .collect();
                        if let Some(c) = &v.countermodel {
                            say(out, format!(
                                "conservative: FAIL {} => {} holds over the objects but not in a model of size {}",
                                print_formula(&c.premise), print_formula(&c.conclusion), c.model.total_size()
                            ))?;
                        } else if let Some((id, _)) = v.object_failures.first() {
                            say(out, format!("conservative: FAIL object {id} is not a model"))?;
                        } else {
                            say(out, format!(
                                "conservative: {} ({} containments, {} models up to size {})",
                                word(status), v.containments, v.models_checked, v.size_bound
                            ))?;
                        }
                        report.push("conservative", status, json!({
                            "conservative": v.conservative,
                            "containments": v.containments,
                            "models_checked": v.models_checked,
                            "schemes_inconclusive": v.schemes_inconclusive,
                            "object_failures": failures,
                            "countermodel": cm,
                        }));
                    }
                    Err(e) => inconclusive(&mut report, out, "conservative", &e)?,
                }
            }
            "elimination" => match capped(eliminates_parameters(g, &lg.indexing, a.max_tuple))? {
                Ok(v) => {
                    say(out, elimination_line(&lg, &v))?;
                    report.push("elimination", Status::from_bool(v.eliminates), elimination_json(&lg, &v));
                }
                Err(e) => inconclusive(&mut report, out, "elimination", &e)?,
            },
            "open" => match capped(object_basis(g, &lg.indexing, a.max_params))? {
                Ok(ob) => {
                    let ab = arrow_basis(g, &lg.indexing, &ob, a.max_params);
                    let v = is_open_map_t(g, &ob, &ab);
                    let witness = v.failure.map(|(i, o)| {
                        let b = &ab.opens[i];
                        json!({
                            "source": b.source.map(|s| g.object(s).id.clone()),
                            "target": b.target.map(|s| g.object(s).id.clone()),
                            "mapping": b.mapping.iter().map(|&(p, q)| (lg.indexing.name(p), lg.indexing.name(q))).collect::<Vec<_>>(),
                            "object": g.object(o).id,
                        })
                    });
                    match &witness {
                        None => say(out, format!("open: pass ({} object opens, {} arrow opens)", ob.opens.len(), ab.opens.len()))?,
                        Some(w) => say(out, format!("open: FAIL the target image of {w} is not open"))?,
                    }
                    report.push("open", Status::from_bool(v.open), json!({
                        "object_opens": ob.opens.len(),
                        "arrow_opens": ab.opens.len(),
                        "witness": witness,
                    }));
                }
                Err(e) => inconclusive(&mut report, out, "open", &e)?,
            },
            "t0" => match capped(object_basis(g, &lg.indexing, a.max_params))? {
                Ok(ob) => {
                    let pair = first_inseparable(&ob).map(|(i, j)| (g.object(i).id.clone(), g.object(j).id.clone()));
                    match &pair {
                        None => say(out, "t0: pass")?,
                        Some((i, j)) => say(out, format!("t0: FAIL {i} and {j} lie in the same basic opens"))?,
                    }
                    report.push("t0", Status::from_bool(pair.is_none()), json!({ "inseparable": pair }));
                }
                Err(e) => inconclusive(&mut report, out, "t0", &e)?,
            },
            _ => unreachable!(),
        }
    }
    Ok(report)
}

fn word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Inconclusive => "inconclusive",
    }
}

fn inconclusive(report: &mut RunReport, out: &mut dyn Write, name: &str, e: &Error) -> Result<()> {
    say(out, format!("{name}: inconclusive ({e})"))?;
    report.push(name, Status::Inconclusive, json!({ "error": e.to_string() }));
    Ok(())
}

pub fn cmd_orbit(a: &OrbitArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("orbit");
    let lg = load_groupoid_file(&a.common.groupoid, &mut report)?;
    let g = &lg.groupoid;
    let tuple = lg.indexing.resolve(&a.tuple)?;
    let e = eliminates_at_tuple(g, &lg.indexing, &tuple)?;
    let sorts = context_sorts(g, &e.context);
    say(out, format!("tuple: ({})", e.names.join(", ")))?;
    say(out, format!("upper bound: {}", print_formula(&e.upper_bound)))?;
    say(out, format!("orbit ({} points):", e.orbit.len()))?;
    for p in &e.orbit.members {
        say(out, format!("  {}", show_point(g, &sorts, p)))?;
    }
    match (&e.formula, &e.witness) {
        (Some(f), _) => say(out, format!("formula: {}", print_formula(f)))?,
        (None, Some(w)) => say(out, format!(
            "formula: none; {} is in the orbit, {} lies above it but outside",
            show_point(g, &sorts, &w.inside),
            show_point(g, &sorts, &w.outside)
        ))?,
        (None, None) => say(out, "formula: none")?,
    }
    report.push("orbit", Status::from_bool(e.eliminates), json!({
        "tuple": e.names,
        "context": e.context.vars,
        "orbit": definable_json(g, &e.orbit),
        "upper_bound": print_formula(&e.upper_bound),
        "formula": e.formula.as_ref().map(print_formula),
        "witness": e.witness.as_ref().map(|w| json!({
            "inside": point_json(g, &sorts, &w.inside),
            "outside": point_json(g, &sorts, &w.outside),
        })),
    }));
    Ok(report)
}

pub fn cmd_topology(a: &TopologyArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("topology");
    let lg = load_groupoid_file(&a.common.groupoid, &mut report)?;
    let g = &lg.groupoid;
    let ix = &lg.indexing;
    let depth = a.max_extra_vars.unwrap_or_else(|| full_depth(g));
    report.bound("max_params", a.max_params);
    report.bound("max_extra_vars", depth);
    let ob = object_basis(g, ix, a.max_params)?;
    say(out, format!("object basis ({} opens):", ob.opens.len()))?;
    let mut opens = Vec::new();
    for b in &ob.opens {
        let ids: Vec<&str> = b.extension.ones().map(|o| g.object(o).id.as_str()).collect();
        let sentences: Vec<String> = b.sentences.iter().map(print_formula).collect();
        say(out, format!("  {{{}}}  {}", ids.join(", "), sentences.join("  |  ")))?;
        opens.push(json!({ "objects": ids, "sentences": sentences }));
    }
    let t0 = first_inseparable(&ob).map(|(i, j)| (g.object(i).id.clone(), g.object(j).id.clone()));
    say(out, format!("t0: {}", if t0.is_none() { "yes" } else { "no" }))?;
    let ab = arrow_basis(g, ix, &ob, a.max_params);
    let open = is_open_map_t(g, &ob, &ab);
    say(out, format!("arrow basis: {} opens; target map open: {}", ab.opens.len(), if open.open { "yes" } else { "no" }))?;

    let sorts: Vec<String> = if a.context.is_empty() {
        vec![g.signature().sorts.first().cloned().ok_or_else(|| Error::invalid("signature has no sorts"))?]
    } else {
        a.context.clone()
    };
    let sort_refs: Vec<&str> = sorts.iter().map(String::as_str).collect();
    let ctx = Context::numbered("x", &sort_refs);
    let space = PointSpace::new(g, &ctx)?;
    let generators = crate::topology::stable_open_generators(&space, ix);
    let gap = lattice_gap(g, ix, &ctx)?;
    let family = capped(saturate_family(g, &ctx, depth, DEFAULT_FAMILY_CAP))?;
    let csorts = context_sorts(g, &ctx);
    say(out, format!("stable-open generators in context ({}): {}", sorts.join(", "), generators.len()))?;
    match &family {
        Ok(f) => say(out, format!("parameter-free family at depth {depth}: {} sets", f.len()))?,
        Err(e) => say(out, format!("parameter-free family: inconclusive ({e})"))?,
    }
    match &gap {
        None => say(out, "lattice: every stable open is parameter-free definable")?,
        Some(p) => say(out, format!("lattice: the least stable open around {} is not parameter-free definable", show_point(g, &csorts, p)))?,
    }
    report.push("t0", Status::from_bool(t0.is_none()), json!({ "inseparable": t0, "opens": opens }));
    report.push("open", Status::from_bool(open.open), json!({ "arrow_opens": ab.opens.len(), "failure": open.failure }));
    report.push("lattice", Status::from_bool(gap.is_none()), json!({
        "context": ctx.vars,
        "generators": generators.len(),
        "pf_family": family.as_ref().ok().map(Vec::len),
        "gap": gap.as_ref().map(|p| point_json(g, &csorts, p)),
    }));
    Ok(report)
}

pub fn cmd_etale(a: &EtaleArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("etale");
    let lg = load_groupoid_file(&a.common.groupoid, &mut report)?;
    report.bound("max_tuple", a.max_tuple);
    let g = &lg.groupoid;
    let missing = check_etale_complete(g);
    let completed = g.etale_completion();
    let before = eliminates_parameters(g, &lg.indexing, a.max_tuple)?;
    let after = eliminates_parameters(&completed, &lg.indexing, a.max_tuple)?;
    let doc = GroupoidDoc::from_groupoid(&completed, Some(&lg.indexing)).to_json() + "\n";
    match &a.out {
        Some(p) => write_file(p, &doc)?,
        None => out.write_all(doc.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() })?,
    }
    let summary = format!(
        "arrows: {} -> {}; elimination before: {}, after: {}",
        g.arrows().len(),
        completed.arrows().len(),
        before.eliminates,
        after.eliminates
    );
    if a.out.is_some() {
        say(out, summary)?;
    } else {
        eprintln!("{summary}");
    }
    report.push("etale", Status::Pass, json!({
        "arrows_before": g.arrows().len(),
        "arrows_after": completed.arrows().len(),
        "already_complete": missing.is_none(),
        "missing_example": missing.map(|m| m.describe(g.objects())),
        "eliminates_before": before.eliminates,
        "eliminates_after": after.eliminates,
    }));
    Ok(report)
}

pub fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("synth");
    let lg = load_groupoid_file(&a.common.groupoid, &mut report)?;
    let bounds = SynthesisBounds {
        vars: a.vars,
        premise_atoms: a.premise_atoms,
        conclusion_atoms: a.conclusion_atoms,
        exists: !a.no_exists,
        max_axioms: a.max_axioms,
    };
    report.bound("max_tuple", a.max_tuple);
    report.bound("vars", a.vars);
    report.bound("premise_atoms", a.premise_atoms);
    report.bound("conclusion_atoms", a.conclusion_atoms);
    report.bound("exists", bounds.exists);
    report.bound("max_axioms", a.max_axioms);
    let s = synthesize(&lg.groupoid, &lg.indexing, a.max_tuple, &bounds)?;
    let text = print_theory(&s.theory);
    let reparsed = parse_theory(&text).map(|t| print_theory(&t) == text).unwrap_or(false);
    let mut violations = Vec::new();
    for m in s.groupoid.objects() {
        for f in check_theory(m, &s.theory, 0)?.failures {
            violations.push(json!({ "object": m.id, "axiom": f.axiom }));
        }
    }
    let v = eliminates_parameters(&s.groupoid, &lg.indexing, a.max_tuple)?;
    let orbits_named = v.entries.iter().all(|e| {
        let Some((name, _)) = s.extension.tuples.iter().find(|(_, t)| *t == e.tuple) else {
            return false;
        };
        let vars: Vec<&str> = e.context.names().collect();
        crate::semantics::definable(&crate::syntax::Formula::rel(name, &vars), &e.context, s.groupoid.objects())
            .map(|d| d.members == e.orbit.members)
            .unwrap_or(false)
    });
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() })?,
    }
    if let Some(p) = &a.out_groupoid {
        write_file(p, &(GroupoidDoc::from_groupoid(&s.groupoid, Some(&lg.indexing)).to_json() + "\n"))?;
    }
    let ok = reparsed && violations.is_empty() && v.eliminates && orbits_named;
    let summary = format!(
        "synthesized {} axioms over {} added relations; satisfied: {}; re-parses: {}; extended elimination: {}",
        s.theory.axioms.len(),
        s.extension.tuples.len(),
        violations.is_empty(),
        reparsed,
        v.eliminates && orbits_named
    );
    if a.out.is_some() {
        say(out, summary)?;
    } else {
        eprintln!("{summary}");
    }
    report.push("synth", Status::from_bool(ok), json!({
        "axioms": s.theory.axioms.len(),
        "added_relations": s.extension.tuples.len(),
        "violations": violations,
        "reparses": reparsed,
        "extended_eliminates": v.eliminates,
        "orbits_are_relations": orbits_named,
    }));
    Ok(report)
}

pub fn cmd_morleyize(a: &MorleyizeArgs, out: &mut dyn Write) -> Result<RunReport> {
    let mut report = RunReport::new("morleyize");
    let text = read_file(&a.theory)?;
    report.input("theory", &a.theory, text.as_bytes());
    let t = in_file(&a.theory, parse_classical_theory(&text))?;
    let m = morleyize(&t)?;
    let printed = print_theory(&m.theory);
    let reparsed = parse_theory(&printed).is_ok();
    match &a.out {
        Some(p) => write_file(p, &printed)?,
        None => out.write_all(printed.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), message: e.to_string() })?,
    }
    report.push("morleyize", Status::from_bool(reparsed), json!({
        "axioms": m.theory.axioms.len(),
        "negations": m.negations.iter().map(|n| json!({ "relation": n.relation, "context": n.context.vars, "negates": print_formula(&n.formula) })).collect::<Vec<_>>(),
        "reparses": reparsed,
    }));
    Ok(report)
}
