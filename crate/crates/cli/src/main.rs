use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use regrep::aut::{automorphism_group, set_stabilizer};
use regrep::cayley::{
    aut_order, build_cayley, is_drr, is_grr, normaliser_identity_check, ConnectionSet, Kind,
};
use regrep::certificate::{sweep_document, witness_document, wreath_document, Document};
use regrep::classify::classify;
use regrep::verify::{run_suite, Config, SUITES};
use regrep::witness::{search_witness, Strategy, WitnessOutcome, LADDER_BUDGET};
use regrep::wreath::find_gen_wreath;
use regrep::{enumerate_groups, Error, SquarefreeGroup};

/// Regular representations of Cayley digraphs on groups of squarefree order.
#[derive(Parser)]
#[command(name = "regrep", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Global {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized phases.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Sample budget for randomized searches.
    #[arg(long, global = true, default_value_t = LADDER_BUDGET)]
    budget: u64,
    /// Largest group order accepted by `enumerate` and `classify`.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_order: u64,
}

#[derive(Subcommand)]
enum Command {
    /// List the groups of a squarefree order.
    Enumerate { order: u64 },
    /// Decide DRR/GRR detection for a group or for every group of an order.
    Classify {
        group: Option<String>,
        #[arg(long, conflicts_with = "group")]
        order: Option<u64>,
    },
    /// Check a connection set, or re-validate a certificate.
    Check(CheckArgs),
    /// Search for a set with Aut(R)_S = 1 whose Cayley (di)graph is not regular.
    Witness {
        group: String,
        /// `digraph` or `graph`.
        kind: Kind,
        /// `ladder`, `structured`, `randomized` or `exhaustive`.
        #[arg(default_value = "ladder")]
        strategy: Strategy,
    },
    /// Automorphism group orders of R, and of Cay(R, S) when a set is given.
    Aut {
        group: String,
        #[arg(long)]
        set: Option<String>,
    },
    /// Re-run the reproducibility suites (`all` or one suite id).
    VerifyPaper {
        #[arg(default_value = "all")]
        suite: String,
        /// Skip optional large instances.
        #[arg(long)]
        no_stretch: bool,
    },
}

#[derive(Args)]
struct CheckArgs {
    group: Option<String>,
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    drr: bool,
    #[arg(long)]
    grr: bool,
    #[arg(long)]
    wreath: bool,
    #[arg(long)]
    normaliser: bool,
    /// Print the Cayley digraph in DOT format.
    #[arg(long)]
    dot: bool,
    /// Re-validate a JSON certificate.
    #[arg(long, conflicts_with_all = ["group", "set"])]
    certificate: Option<PathBuf>,
}

/// Outcome of a command: a JSON result and its text rendering. Inconclusive
/// searches surface as `Error::BudgetExhausted` instead.
struct Outcome {
    result: Value,
    text: String,
}

impl Outcome {
    fn done(result: Value, text: String) -> Self {
        Outcome { result, text }
    }
}

type CliResult = Result<Outcome, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("REGREP_THREADS").ok().and_then(|v| v.parse().ok()) {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let (name, inputs) = describe(&cli.command);
    let g = cli.global;
    let outcome = match cli.command {
        Command::Enumerate { order } => enumerate(order, &g),
        Command::Classify { group, order } => cmd_classify(group, order, &g),
        Command::Check(args) => check(args),
        Command::Witness {
            group,
            kind,
            strategy,
        } => witness(&group, kind, strategy, &g),
        Command::Aut { group, set } => aut(&group, set.as_deref()),
        Command::VerifyPaper { suite, no_stretch } => verify_paper(&suite, !no_stretch, &g),
    };
    match outcome {
        Ok(o) => {
            if g.json {
                let report = json!({
                    "command": name,
                    "inputs": inputs,
                    "result": o.result,
                    "seed": g.seed,
                    "elapsed_ms": start.elapsed().as_millis() as u64,
                });
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{}", o.text);
            }
            ExitCode::SUCCESS
        }
        Err(Error::BudgetExhausted(n)) => {
            eprintln!("inconclusive: randomized budget of {n} samples exhausted");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn describe(c: &Command) -> (&'static str, Value) {
    match c {
        Command::Enumerate { order } => ("enumerate", json!({ "order": order })),
        Command::Classify { group, order } => ("classify", json!({ "group": group, "order": order })),
        Command::Check(a) => (
            "check",
            json!({
                "group": a.group, "set": a.set, "drr": a.drr, "grr": a.grr,
                "wreath": a.wreath, "normaliser": a.normaliser,
                "certificate": a.certificate.as_ref().map(|p| p.display().to_string()),
            }),
        ),
        Command::Witness {
            group,
            kind,
            strategy,
        } => (
            "witness",
            json!({ "group": group, "kind": kind, "strategy": format!("{strategy:?}") }),
        ),
        Command::Aut { group, set } => ("aut", json!({ "group": group, "set": set })),
        Command::VerifyPaper { suite, no_stretch } => {
            ("verify-paper", json!({ "suite": suite, "stretch": !no_stretch }))
        }
    }
}

fn check_order(order: u64, g: &Global) -> Result<(), Error> {
    if order > g.max_order {
        return Err(Error::TooLarge {
            size: order as u128,
            bound: g.max_order as u128,
        });
    }
    Ok(())
}

fn enumerate(order: u64, g: &Global) -> CliResult {
    check_order(order, g)?;
    let groups = enumerate_groups(order)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &groups {
        text += &format!("{:<28} {:<12} abelian={}\n", r.literal(), r.name(), r.is_abelian());
        rows.push(json!({ "group": r.literal(), "name": r.name(), "abelian": r.is_abelian() }));
    }
    Ok(Outcome::done(json!(rows), text))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_classify(group: Option<String>, order: Option<u64>, g: &Global) -> CliResult {
    let groups = match (group, order) {
        (Some(lit), _) => vec![lit.parse::<SquarefreeGroup>()?],
        (None, Some(n)) => {
            check_order(n, g)?;
            enumerate_groups(n)?
        }
        (None, None) => return Err(Error::Parse { pos: 0, msg: "give a group or --order".into() }),
    };
    let mut text = format!("{:<28} {:<12} {:<4} {:<4} {:<10} justification\n", "group", "name", "DRR", "GRR", "clause");
    let mut rows = Vec::new();
    for r in &groups {
        let v = classify(r);
        text += &format!(
            "{:<28} {:<12} {:<4} {:<4} {:<10} {}\n",
            r.literal(),
            r.name(),
            yes_no(v.drr_detecting),
            yes_no(v.grr_detecting),
            v.clause.label(),
            v.clause.justification()
        );
        rows.push(json!({
            "group": r.literal(),
            "name": r.name(),
            "drr_detecting": v.drr_detecting,
            "grr_detecting": v.grr_detecting,
            "clause": v.clause.label(),
            "justification": v.clause.justification(),
        }));
    }
    Ok(Outcome::done(json!(rows), text))
}

fn load_certificate(path: &PathBuf) -> Result<Document, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Rejected(format!("{}: {e}", path.display())))?;
    // Accept a bare certificate or a `--json` run report wrapping one.
    match Document::from_json(&text) {
        Ok(d) => Ok(d),
        Err(first) => {
            let v: Value = serde_json::from_str(&text).map_err(|_| first.clone())?;
            match v.get("result") {
                Some(inner) => Document::from_json(&inner.to_string()),
                None => Err(first),
            }
        }
    }
}

fn check(a: CheckArgs) -> CliResult {
    if let Some(path) = &a.certificate {
        let doc = load_certificate(path)?;
        let summary = doc.validate()?;
        return Ok(Outcome::done(json!({ "valid": true, "summary": summary }), summary + "\n"));
    }
    let lit = a.group.ok_or_else(|| Error::Parse { pos: 0, msg: "missing group".into() })?;
    let r: SquarefreeGroup = lit.parse()?;
    let s = match &a.set {
        Some(text) => ConnectionSet::parse(&r, text)?,
        None => ConnectionSet::empty(&r),
    };
    let mut result = serde_json::Map::new();
    result.insert("group".into(), json!(r.literal()));
    result.insert("set".into(), json!(s.format(&r)));
    let mut text = format!("R = {}, S = {}\n", r.name(), s.format(&r));
    let any = a.drr || a.grr || a.wreath || a.normaliser || a.dot;
    if a.drr || !any {
        let v = is_drr(&r, &s)?;
        text += &format!("is_drr: {v}\n");
        result.insert("is_drr".into(), json!(v));
    }
    if a.grr {
        let v = is_grr(&r, &s)?;
        let order = aut_order(&build_cayley(&r, &s)?)?;
        text += &format!("is_grr: {v}\n|Aut(Cay(R,S))| = {order}\n");
        result.insert("is_grr".into(), json!(v));
        result.insert("aut_order".into(), json!(order.to_string()));
    }
    if a.wreath {
        match find_gen_wreath(&r, s.as_set())? {
            Some(w) => {
                text += &format!("wreath pair: {}\n", w.describe(&r));
                let doc = wreath_document(&r, &s, &w);
                result.insert("wreath".into(), serde_json::to_value(&doc).expect("serializable"));
            }
            None => {
                text += "wreath pair: none\n";
                result.insert("wreath".into(), Value::Null);
            }
        }
    }
    if a.normaliser {
        let rep = normaliser_identity_check(&r, &s)?;
        text += &format!(
            "|N(R-hat)| = {}, |R-hat x| Aut(R)_S| = {}, equal: {}\n",
            rep.normaliser_order, rep.product_order, rep.equal
        );
        result.insert("normaliser".into(), serde_json::to_value(&rep).expect("serializable"));
    }
    if a.dot {
        let dot = build_cayley(&r, &s)?.to_dot();
        result.insert("dot".into(), json!(dot));
        // DOT alone stays pipeable into graphviz.
        if !(a.drr || a.grr || a.wreath || a.normaliser) {
            text.clear();
        }
        text += &dot;
    }
    Ok(Outcome::done(Value::Object(result), text))
}

fn witness(lit: &str, kind: Kind, strategy: Strategy, g: &Global) -> CliResult {
    let r: SquarefreeGroup = lit.parse()?;
    match search_witness(&r, kind, strategy, g.budget, g.seed)? {
        WitnessOutcome::Found(c) => {
            let doc = witness_document(&c);
            let text = format!(
                "witness S = {} on {} ({}): |Aut(R)_S| = 1, |Aut| = {}\n",
                c.s.format(&r),
                r.name(),
                c.source,
                c.aut_order
            );
            Ok(Outcome::done(serde_json::to_value(&doc).expect("serializable"), text))
        }
        WitnessOutcome::NonExistence(rep) => {
            let text = format!(
                "no {kind} witness on {}: {} orbit classes checked ({} with trivial Aut(R)_S)\n",
                r.name(),
                rep.orbit_classes,
                rep.trivial_stabilizer_classes
            );
            let doc = sweep_document(&rep);
            Ok(Outcome::done(serde_json::to_value(&doc).expect("serializable"), text))
        }
    }
}

fn aut(lit: &str, set: Option<&str>) -> CliResult {
    let r: SquarefreeGroup = lit.parse()?;
    let aut_r = automorphism_group(&r)?;
    let mut text = format!("|Aut({})| = {}\n", r.name(), aut_r.order());
    let mut result = json!({ "group": r.literal(), "aut_r_order": aut_r.order() });
    if let Some(set) = set {
        let s = ConnectionSet::parse(&r, set)?;
        let stab = set_stabilizer(&r, s.as_set())?;
        let order = aut_order(&build_cayley(&r, &s)?)?;
        text += &format!(
            "|Aut(R)_S| = {}\n|Aut(Cay(R,S))| = {order}\n",
            stab.elements.len()
        );
        result["stabilizer_order"] = json!(stab.elements.len());
        result["aut_order"] = json!(order.to_string());
    }
    Ok(Outcome::done(result, text))
}

fn verify_paper(suite: &str, stretch: bool, g: &Global) -> CliResult {
    let cfg = Config {
        seed: g.seed,
        stretch,
    };
    let ids: Vec<&str> = if suite == "all" {
        SUITES.iter().map(|s| s.id).collect()
    } else {
        vec![suite]
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut failed = false;
    for id in ids {
        let rep = run_suite(id, &cfg)?;
        if !rep.stretch && !rep.passed {
            failed = true;
        }
        let status = match (rep.passed, rep.stretch) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (stretch)",
        };
        text += &format!("{status} {} [{} ms]: {}\n", rep.id, rep.elapsed_ms, rep.claim);
        for line in &rep.details {
            text += &format!("    {line}\n");
        }
        reports.push(rep);
    }
    if failed {
        eprint!("{text}");
        return Err(Error::Rejected("a verification suite failed".into()));
    }
    Ok(Outcome::done(serde_json::to_value(&reports).expect("serializable"), text))
}
