//! `mpolar`: analyze finite scenario markets from the command line.
//!
//! Exit codes: 0 success (or no arbitrage for `check`), 1 arbitrage found
//! or a domain error, 2 unreadable or invalid input, 3 the LP oracle
//! disagrees with the geometric analysis.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpolar_core::arbitrage::{
    classify, defragment, extract_p_arbitrage, feasibility, lebesgue_decompose, one_step_1p_check,
    resolve_class, FiltrationKind,
};
use mpolar_core::market::{load_market, load_strategy, Market};
use mpolar_core::measures::{full_support_measure, supporting_measure};
use mpolar_core::oracle::{oracle_arbitrage, oracle_support};
use mpolar_core::splitter::{backward_eliminate, universal_aggregator};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "mpolar",
    version,
    about = "Martingale-polar sets and arbitrage in finite scenario markets"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-check against the brute-force LP oracle.
    #[arg(long, global = true)]
    verify: bool,
    /// Print a short human-readable summary to stderr.
    #[arg(long, global = true)]
    summary: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polar set, splittings, aggregator, full-support measure and feasibility.
    Analyze { market: PathBuf },
    /// Arbitrage verdict for one class of significant sets.
    Check {
        market: PathBuf,
        /// A declared class, or MI, 1p, qs:<probability>.
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = Filtration::Enlarged)]
        filtration: Filtration,
    },
    /// Classical arbitrage for a declared probability.
    Extract {
        market: PathBuf,
        #[arg(long)]
        prob: String,
    },
    /// A martingale measure charging one scenario.
    Measure {
        market: PathBuf,
        #[arg(long)]
        support: String,
    },
    /// Split an arbitrage strategy into per-period gains.
    Defrag {
        market: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Polytope support and per-set arbitrage search by direct LP.
    Oracle { market: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Filtration {
    Natural,
    Enlarged,
}

/// A command's result: JSON output, exit code, summary lines.
struct Outcome {
    report: Value,
    code: u8,
    summary: Vec<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            code: 0,
            summary: Vec::new(),
        }
    }
}

/// A failure that ends the run with `code` and a message on stderr.
struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn domain(message: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn open_market(path: &Path) -> Result<Market, Failure> {
    load_market(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn analyze(m: &Market, verify: bool) -> Outcome {
    let pa = backward_eliminate(m);
    let agg = universal_aggregator(m, &pa);
    let full = full_support_measure(m, &pa);
    let feas = feasibility(m, &pa);
    let mut verdicts = serde_json::Map::new();
    let mut names: Vec<String> = vec!["MI".into(), "1p".into()];
    names.extend(
        m.classes()
            .keys()
            .filter(|n| !["MI", "1p"].contains(&n.as_str()))
            .cloned(),
    );
    for name in &names {
        let class = resolve_class(m, name).expect("built-in or declared");
        let v = classify(m, &pa, &class, FiltrationKind::Enlarged);
        verdicts.insert(name.clone(), report::verdict(m, &v));
    }
    let one_step: Vec<Value> = one_step_1p_check(m)
        .iter()
        .map(|o| {
            json!({
                "t": o.period,
                "level_set": report::ids(m, &o.level_set),
                "position": report::vector(&o.position),
                "gains_on": report::ids(m, &o.gains_on),
            })
        })
        .collect();

    let mut out = json!({
        "market": report::digest(m),
        "warnings": m.warnings(),
        "analysis": report::polar_analysis(m, &pa),
        "aggregator": report::aggregator(m, &agg),
        "enlarged_filtration": report::enlarged_filtration(m, &agg),
        "full_support_measure": full.as_ref().map(|f| json!({ "full": f.full, "weights": report::measure(m, &f.measure) })),
        "one_step_arbitrage": one_step,
        "verdicts": verdicts,
        "feasibility": report::feasibility(m, &feas),
    });
    let mut code = 0;
    if verify {
        let support = oracle_support(m);
        let agrees = support == pa.omega_star;
        out["oracle"] = json!({ "support": report::ids(m, &support), "agrees": agrees });
        if !agrees {
            code = 3;
        }
    }
    let summary = vec![
        format!(
            "scenarios: {}, d = {}, T = {}",
            m.len(),
            m.assets(),
            m.horizon()
        ),
        format!(
            "supported by martingale measures: {:?}",
            m.ids(&pa.omega_star)
        ),
        format!("polar: {:?}", m.ids(&pa.polar_complement())),
        format!("feasible: {}", feas.is_feasible()),
    ];
    Outcome {
        report: out,
        code,
        summary,
    }
}

fn check(
    m: &Market,
    class: &str,
    filtration: Filtration,
    verify: bool,
) -> Result<Outcome, Failure> {
    let class = resolve_class(m, class).map_err(input)?;
    let pa = backward_eliminate(m);
    let kind = match filtration {
        Filtration::Natural => FiltrationKind::Natural,
        Filtration::Enlarged => FiltrationKind::Enlarged,
    };
    let v = classify(m, &pa, &class, kind);
    let mut out = report::verdict(m, &v);
    let mut code = u8::from(v.is_arbitrage());
    if verify && kind == FiltrationKind::Enlarged {
        let enlarged = universal_aggregator(m, &pa).enlarged;
        let lp = class
            .sets()
            .iter()
            .any(|c| oracle_arbitrage(m, &enlarged, c).is_some());
        out["oracle"] = json!({ "arbitrage": lp, "agrees": lp == v.is_arbitrage() });
        if lp != v.is_arbitrage() {
            code = 3;
        }
    }
    let summary = vec![format!(
        "class {}: {}",
        class.name(),
        if v.is_arbitrage() {
            "arbitrage"
        } else {
            "no arbitrage"
        }
    )];
    Ok(Outcome {
        report: out,
        code,
        summary,
    })
}

fn extract(m: &Market, prob: &str) -> Result<Outcome, Failure> {
    let p = m
        .probabilities()
        .get(prob)
        .ok_or_else(|| input(format!("unknown probability {prob:?}")))?;
    let pa = backward_eliminate(m);
    let decomposition = lebesgue_decompose(m, &pa, p).map_err(domain)?;
    let extraction = extract_p_arbitrage(m, &pa, p).map_err(domain)?;
    let summary = vec![match &extraction {
        Some(e) => format!(
            "{prob}-arbitrage at t = {} gaining with probability {}",
            e.period, e.gain_probability
        ),
        None => format!("{prob} charges no polar scenario"),
    }];
    Ok(Outcome {
        report: json!({
            "probability": prob,
            "decomposition": report::decomposition(m, &decomposition),
            "extraction": extraction.as_ref().map(|e| report::extraction(m, e)),
        }),
        code: 0,
        summary,
    })
}

fn measure(m: &Market, id: &str) -> Result<Outcome, Failure> {
    let w = m
        .index_of(id)
        .ok_or_else(|| input(format!("unknown scenario id {id:?}")))?;
    let pa = backward_eliminate(m);
    let q = supporting_measure(m, &pa, w).map_err(domain)?;
    Ok(Outcome::ok(
        json!({ "support": id, "weights": report::measure(m, &q) }),
    ))
}

fn defrag(m: &Market, strategy: &Path) -> Result<Outcome, Failure> {
    let h = load_strategy(m, &read(strategy)?)
        .map_err(|e| input(format!("{}: {e}", strategy.display())))?;
    let d = defragment(m, &h).map_err(domain)?;
    Ok(Outcome::ok(report::defragmentation(m, &d)))
}

fn oracle(m: &Market) -> Outcome {
    let pa = backward_eliminate(m);
    let support = oracle_support(m);
    let enlarged = universal_aggregator(m, &pa).enlarged;
    let polar = pa.polar_complement();
    let mut agrees = support == pa.omega_star;
    let mut classes = Vec::new();
    for class in m.classes().values() {
        let sets: Vec<Value> = class
            .sets()
            .iter()
            .map(|c| {
                let lp = oracle_arbitrage(m, &enlarged, c).is_some();
                let geometric = pa.omega_star.is_empty() || c.is_subset(&polar);
                agrees &= lp == geometric;
                json!({ "set": report::ids(m, c), "arbitrage": lp, "geometric": geometric })
            })
            .collect();
        classes.push(json!({ "class": class.name(), "sets": sets }));
    }
    Outcome {
        report: json!({
            "support": report::ids(m, &support),
            "omega_star": report::ids(m, &pa.omega_star),
            "classes": classes,
            "agrees": agrees,
        }),
        code: if agrees { 0 } else { 3 },
        summary: vec![format!(
            "oracle support {:?}; agrees: {agrees}",
            m.ids(&support)
        )],
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Analyze { market } => Ok(analyze(&open_market(market)?, cli.verify)),
        Command::Check {
            market,
            class,
            filtration,
        } => check(&open_market(market)?, class, *filtration, cli.verify),
        Command::Extract { market, prob } => extract(&open_market(market)?, prob),
        Command::Measure { market, support } => measure(&open_market(market)?, support),
        Command::Defrag { market, strategy } => defrag(&open_market(market)?, strategy),
        Command::Oracle { market } => Ok(oracle(&open_market(market)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let mut text = serde_json::to_string_pretty(&outcome.report).expect("JSON values serialize");
    text.push('\n');
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if cli.summary {
        for line in &outcome.summary {
            eprintln!("{line}");
        }
    }
    ExitCode::from(outcome.code)
}
