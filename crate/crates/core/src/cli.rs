//! The `resonance` command line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::equation::{generate_trees, series_weights, EquationSpec};
use crate::hopf::{arborify, coproduct_bck, reduced_coproduct};
use crate::nls::{convergence_study, NlsError, StepperConfig};
use crate::oracle::{default_times, fit_order, nonresonant_tuple, scheme_errors};
use crate::phase::{core_of, phase_tree, split_adaptive};
use crate::scheme::{local_error_terms, required_regularity, SchemeBuilder};
use crate::suite::property_suite;
use crate::tree::{parse_tree, Forest, Tree};

pub const DEFAULT_SEED: u64 = 20_240_501;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("property check failed: {0}")]
    Property(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Property(_) => 2,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "resonance", version, about = "Decorated trees, arborification and resonance-based schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EqArg {
    /// Equation JSON; cubic NLS when omitted.
    #[arg(long)]
    pub eq: Option<PathBuf>,
}

impl EqArg {
    fn load(&self) -> Result<EquationSpec, CliError> {
        match &self.eq {
            None => Ok(EquationSpec::cubic_nls()),
            Some(p) => {
                let s = std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
                EquationSpec::from_json_str(&s).map_err(invalid)
            }
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct TreeArg {
    /// Generated tree name (`T3`), `fixture:<name>`, compact form (`I[t2,0](...)`) or a JSON file.
    #[arg(long)]
    pub tree: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the trees of order at most `--order`.
    Trees {
        #[command(flatten)]
        eq: EqArg,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Butcher-Connes-Kreimer coproduct of a tree.
    Coproduct {
        #[command(flatten)]
        eq: EqArg,
        #[command(flatten)]
        tree: TreeArg,
        /// Drop the `1 ⊗ T` and `T ⊗ 1` terms.
        #[arg(long)]
        reduced: bool,
    },
    /// Arborification of a tree into words of letters.
    Arborify {
        #[command(flatten)]
        eq: EqArg,
        #[command(flatten)]
        tree: TreeArg,
    },
    /// Prefix-by-prefix dominant/lower splitting of every word.
    Split {
        #[command(flatten)]
        eq: EqArg,
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        r: i64,
        /// Comma separated `m_1,…`; zeros when omitted.
        #[arg(long)]
        m: Option<String>,
    },
    /// `Π^{n,r}` per tree, in the twisted variable unless `--untwisted`.
    Scheme {
        #[command(flatten)]
        eq: EqArg,
        #[arg(long, default_value_t = 2)]
        order: i64,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long)]
        tree: Option<String>,
        #[arg(long)]
        untwisted: bool,
    },
    /// Local error terms and required regularity.
    ErrorTerms {
        #[command(flatten)]
        eq: EqArg,
        #[arg(long, default_value_t = 2)]
        order: i64,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long)]
        tree: Option<String>,
    },
    /// Quadrature oracle: `|Π - Π^{n,r}|` over decreasing times.
    Oracle {
        #[command(flatten)]
        eq: EqArg,
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value_t = 2)]
        n: i64,
        /// Defaults to the order of the tree.
        #[arg(long)]
        r: Option<i64>,
        /// Frequencies are drawn from `[-range, range]`.
        #[arg(long, default_value_t = 2)]
        range: i64,
    },
    /// Convergence study of the NLS stepper.
    NlsRun {
        /// Stepper config JSON; smooth data on 32 modes when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        r: i64,
        /// Also run to the final time (heuristic global order).
        #[arg(long)]
        global: bool,
    },
    /// Run the property suite.
    Check {
        /// Smaller brute-force universe.
        #[arg(long)]
        quick: bool,
    },
}

/// Parses `argv`, runs the command and writes to `stdout` or `--out`. Returns the exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let mut text = String::new();
    let res = execute(&cli, &mut text);
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    match (res, written) {
        (Ok(()), Ok(())) => 0,
        (Err(e), _) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        (Ok(()), Err(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn resolve_tree(spec: &str, eq: &EquationSpec, order: usize) -> Result<Tree, CliError> {
    let s = spec.trim();
    if s.starts_with("I[") {
        return parse_tree(s).map_err(invalid);
    }
    if let Some(name) = s.strip_prefix("fixture:") {
        return fixture(name).ok_or_else(|| invalid(format!("unknown fixture `{name}`")));
    }
    if s.ends_with(".json") {
        let raw = std::fs::read_to_string(s).map_err(|e| invalid(format!("{s}: {e}")))?;
        let v: Value = serde_json::from_str(&raw).map_err(invalid)?;
        return Tree::from_json(&v).map_err(invalid);
    }
    let idx: usize = s.strip_prefix('T').and_then(|x| x.parse().ok()).ok_or_else(|| invalid(format!("unknown tree `{s}`")))?;
    let ts = generate_trees(eq, order.max(3));
    ts.get(&format!("T{idx}")).cloned().ok_or_else(|| invalid(format!("no tree {s} among trees of order <= {}", order.max(3))))
}

fn fixture(name: &str) -> Option<Tree> {
    use crate::fixtures as f;
    Some(match name {
        "letter" => f::letter(),
        "root_letter" => f::root_letter(),
        "nested_core" => f::nested_core(),
        "conj_letter" => f::conj_letter(),
        "conj_nested_core" => f::conj_nested_core(),
        "t0" => f::t0(),
        "t1" => f::t1(),
        "t2" => f::t2(),
        "t3" => f::t3(),
        _ => return None,
    })
}

/// The t2-planted part, which is what the twisted scheme sees.
fn twisted(t: &Tree) -> Option<Tree> {
    core_of(t).ok().cloned()
}

fn execute(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::Trees { eq, order } => trees(&eq.load()?, *order, cli.json, out),
        Command::Coproduct { eq, tree, reduced } => {
            let eq = eq.load()?;
            let t = resolve_tree(&tree.tree, &eq, 3)?;
            let t = twisted(&t).unwrap_or(t);
            let d = if *reduced { reduced_coproduct(&t) } else { coproduct_bck(&Forest::single(t.clone())) };
            if cli.json {
                writeln!(out, "{}", json!({"tree": t.to_string(), "coproduct": d.to_json()})).ok();
            } else {
                writeln!(out, "{d}").ok();
            }
            Ok(())
        }
        Command::Arborify { eq, tree } => {
            let eq = eq.load()?;
            let t = resolve_tree(&tree.tree, &eq, 3)?;
            let t = twisted(&t).unwrap_or(t);
            let ws = arborify(&Forest::single(t)).map_err(invalid)?;
            if cli.json {
                let terms: Vec<_> = ws.terms().map(|(w, c)| json!({"word": w.to_string(), "coeff": c})).collect();
                writeln!(out, "{}", json!({ "words": terms })).ok();
            } else {
                writeln!(out, "{ws}").ok();
            }
            Ok(())
        }
        Command::Split { eq, tree, n, r, m } => {
            let eq = eq.load()?;
            let t = resolve_tree(&tree.tree, &eq, 3)?;
            split(&eq, &t, *n, *r, m.as_deref(), cli.json, out)
        }
        Command::Scheme { eq, order, n, tree, untwisted } => {
            let eq = eq.load()?;
            check_nr(*n, *order)?;
            let b = SchemeBuilder::new(*n, &eq);
            let mut rows = Vec::new();
            for (name, t) in selected(&eq, *order, tree.as_deref())? {
                let target = if *untwisted { Some(t.clone()) } else { twisted(&t) };
                let s = match target {
                    Some(x) => b.tree(&x, *order).map_err(invalid)?,
                    None => crate::scheme::ExpPoly::one(),
                };
                rows.push((name, s));
            }
            if cli.json {
                let v: Vec<_> = rows.iter().map(|(nm, s)| json!({"tree": nm, "scheme": s.to_json()})).collect();
                writeln!(out, "{}", Value::Array(v)).ok();
            } else if rows.len() == 1 && tree.is_some() {
                writeln!(out, "{}", rows[0].1).ok();
            } else {
                for (nm, s) in rows {
                    writeln!(out, "{nm}: {s}").ok();
                }
            }
            Ok(())
        }
        Command::ErrorTerms { eq, order, n, tree } => {
            let eq = eq.load()?;
            check_nr(*n, *order)?;
            let mut all = Vec::new();
            for (name, t) in selected(&eq, *order, tree.as_deref())? {
                let Some(core) = twisted(&t) else { continue };
                let terms = local_error_terms(&core, *n, *order, &eq).map_err(invalid)?;
                all.push((name, required_regularity(&terms), terms));
            }
            if cli.json {
                let v: Vec<_> = all
                    .iter()
                    .map(|(nm, reg, ts)| json!({"tree": nm, "regularity": reg, "terms": ts.iter().map(|e| e.to_json()).collect::<Vec<_>>()}))
                    .collect();
                writeln!(out, "{}", Value::Array(v)).ok();
            } else {
                for (nm, reg, ts) in all {
                    writeln!(out, "{nm}: required regularity {reg}").ok();
                    for e in ts {
                        writeln!(out, "  {e}").ok();
                    }
                }
            }
            Ok(())
        }
        Command::Oracle { eq, tree, n, r, range } => {
            let eq = eq.load()?;
            let t = resolve_tree(&tree.tree, &eq, 3)?;
            let r = r.unwrap_or(t.order() as i64);
            check_nr(*n, r)?;
            if *range < 1 {
                return Err(invalid("--range must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let fa = nonresonant_tuple(&t, *n, r, &eq, *range, &mut rng).map_err(invalid)?;
            let errs = scheme_errors(&t, *n, r, &eq, &fa, &default_times()).map_err(invalid)?;
            let fit = fit_order(&errs);
            if cli.json {
                let fit = match &fit {
                    Ok(f) => json!({"slope": f.slope, "residual": f.residual}),
                    Err(e) => json!({"error": e.to_string()}),
                };
                writeln!(out, "{}", json!({"tuple": fa, "errors": errs, "fit": fit})).ok();
            } else {
                writeln!(out, "step,err,slope_running").ok();
                for (i, (h, e)) in errs.iter().enumerate() {
                    let slope = if i == 0 { String::new() } else { format!("{:.4}", (errs[i - 1].1 / e).log2() / (errs[i - 1].0 / h).log2()) };
                    writeln!(out, "{h:.6e},{e:.6e},{slope}").ok();
                }
            }
            Ok(())
        }
        Command::NlsRun { config, r, global } => {
            let cfg = match config {
                Some(p) => {
                    let s = std::fs::read_to_string(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
                    serde_json::from_str::<StepperConfig>(&s).map_err(invalid)?
                }
                None => StepperConfig { seed: cli.seed, ..StepperConfig::smooth(*r) },
            };
            check_nr(cfg.n, cfg.r)?;
            if cfg.taus.len() < 4 {
                return Err(invalid("need at least four step sizes"));
            }
            let rep = match convergence_study(&cfg, *global) {
                Ok(r) => r,
                Err(NlsError::CrossCheck(d)) => return Err(CliError::Property(format!("reference cross-validation off by {d:e}"))),
                Err(e) => return Err(invalid(e)),
            };
            if cli.json {
                writeln!(out, "{}", rep.to_json()).ok();
            } else {
                out.push_str(&rep.to_csv());
                if let Some(s) = rep.local_slope() {
                    writeln!(out, "# local order {s:.3}").ok();
                }
                if let Some(s) = rep.global_slope() {
                    writeln!(out, "# global order {s:.3} (heuristic)").ok();
                }
                for t in &rep.diverged {
                    writeln!(out, "# diverged at tau = {t:e}").ok();
                }
            }
            Ok(())
        }
        Command::Check { quick } => {
            let results = property_suite(cli.seed, *quick);
            if cli.json {
                writeln!(out, "{}", serde_json::to_value(&results).unwrap_or(Value::Null)).ok();
            } else {
                for r in &results {
                    writeln!(out, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail).ok();
                }
            }
            match results.iter().find(|r| !r.passed) {
                Some(r) => Err(CliError::Property(r.name.clone())),
                None => Ok(()),
            }
        }
    }
}

fn check_nr(n: i64, r: i64) -> Result<(), CliError> {
    if n < 0 || r < 0 {
        return Err(invalid(format!("inconsistent (n, r) = ({n}, {r}): both must be non-negative")));
    }
    Ok(())
}

fn selected(eq: &EquationSpec, order: i64, tree: Option<&str>) -> Result<Vec<(String, Tree)>, CliError> {
    match tree {
        Some(s) => {
            let t = resolve_tree(s, eq, order as usize)?;
            if t.order() as i64 > order {
                return Err(invalid(format!("tree {s} has order {} > {order}", t.order())));
            }
            Ok(vec![(s.to_string(), t)])
        }
        None => Ok(generate_trees(eq, order as usize).trees.into_iter().map(|nt| (nt.name, nt.tree)).collect()),
    }
}

fn trees(eq: &EquationSpec, order: usize, as_json: bool, out: &mut String) -> Result<(), CliError> {
    let ws = series_weights(&generate_trees(eq, order), eq).map_err(invalid)?;
    if as_json {
        let v: Vec<_> = ws
            .iter()
            .map(|w| {
                json!({
                    "name": w.name, "tree": w.tree.to_json(), "text": w.tree.to_string(),
                    "symmetry": w.symmetry, "upsilon": w.upsilon.coeff.to_string(),
                    "phase": phase_tree(&w.tree, eq).to_string(),
                })
            })
            .collect();
        writeln!(out, "{}", Value::Array(v)).ok();
    } else {
        for w in ws {
            writeln!(out, "{}  S = {}  Upsilon = {}  F = {}", w.name, w.symmetry, w.upsilon.coeff, phase_tree(&w.tree, eq)).ok();
            writeln!(out, "    {}", w.tree).ok();
        }
    }
    Ok(())
}

fn split(eq: &EquationSpec, t: &Tree, n: i64, r: i64, m: Option<&str>, as_json: bool, out: &mut String) -> Result<(), CliError> {
    check_nr(n, r)?;
    let t = twisted(t).unwrap_or_else(|| t.clone());
    let ws = arborify(&Forest::single(t)).map_err(invalid)?;
    let given: Option<Vec<u32>> = match m {
        None => None,
        Some(s) => Some(s.split(',').map(|x| x.trim().parse::<u32>().map_err(invalid)).collect::<Result<_, _>>()?),
    };
    let mut rows = Vec::new();
    for (w, c) in ws.terms() {
        let ms = given.clone().unwrap_or_else(|| vec![0; w.len()]);
        if ms.len() != w.len() {
            return Err(invalid(format!("--m needs {} entries for word {w}", w.len())));
        }
        let sp = split_adaptive(w, &ms, n, r, &eq.alpha, eq);
        rows.push((w.to_string(), c, sp));
    }
    if as_json {
        let v: Vec<_> = rows
            .iter()
            .map(|(w, c, sp)| {
                let pre: Vec<_> = sp
                    .iter()
                    .map(|a| json!({"phase": a.split.sum.to_string(), "dominant": a.split.dominant.to_string(), "lower": a.split.lower.to_string(), "condition": a.condition.to_string(), "expanded": a.expanded}))
                    .collect();
                json!({"word": w, "coeff": c, "prefixes": pre})
            })
            .collect();
        writeln!(out, "{}", Value::Array(v)).ok();
    } else {
        for (w, c, sp) in rows {
            writeln!(out, "{c} * {w}").ok();
            writeln!(out, "  j | phase | dominant | lower | condition (n = {n})").ok();
            for (j, a) in sp.iter().enumerate() {
                writeln!(out, "  {} | {} | {} | {} | {}{}", j + 1, a.split.sum, a.split.dominant, a.split.lower, a.condition, if a.expanded { " (expanded)" } else { "" })
                    .ok();
            }
        }
    }
    Ok(())
}
