mod parse;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use primpair::bounds::{
    best_sieve_with, check_reference, generic_cn, theorem31_check, CoreMode, REFERENCE_PASSES,
};
use primpair::charsums::property_audit;
use primpair::ffcore::{factorize, prime_power, Elem, FieldCtx};
use primpair::polyrat::{is_exceptional, Family, FamilyOptions, RationalFunc};
use primpair::search::{
    checkpoint_path_for, classify_with, exception_scan, pair_search, q_in_q_with, scan_to_csv, ClassifyConfig,
    PairWitness, ScanConfig, SearchError, CSV_HEADER, DEFAULT_BUDGET,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_FAILURE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "primpair", version, about = "Primitive pairs (a, f(a)) in finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,
    /// Omit the leading `#` line carrying the config hash and timestamp.
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
enum Command {
    /// W-test and best sieve split for one q.
    CheckBound {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        n: u64,
        /// Only consider cores made of the least primes of q-1.
        #[arg(long)]
        paper_faithful: bool,
    },
    /// Recompute the worst-case passes and the constants C_n.
    Tables,
    /// Candidate scan over the prime powers in [lo, hi].
    Scan {
        #[arg(long, default_value_t = 3)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value_t = 2)]
        n: u64,
        #[arg(long)]
        paper_faithful: bool,
        /// Emit every q, not just the candidates.
        #[arg(long)]
        all: bool,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Checkpoint file (defaults next to --out, or under $PRIMPAIR_CHECKPOINT_DIR).
        #[arg(long, requires = "out")]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        checkpoint_every: u64,
    },
    /// Exhaustively classify the candidates up to qmax for one family.
    Classify {
        /// Family `n1,n2`, e.g. `1,1` or `2,0`.
        #[arg(long)]
        family: String,
        #[arg(long)]
        qmax: u64,
        /// Restrict the quadratic family to irreducible quadratics.
        #[arg(long)]
        irreducible: bool,
        /// Admit monomials c*x^j into general families (exploration only).
        #[arg(long)]
        monomials: bool,
        #[arg(long)]
        paper_faithful: bool,
        /// Work units allowed, measured as the sum of q^3 over candidates.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write one JSON line per exception here.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Search a primitive pair for one f = num/den.
    Pair {
        #[arg(long)]
        q: u64,
        /// Numerator coefficients, constant term first: `1,1` or `[0,1],1`.
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, default_value = "1")]
        den: String,
    },
    /// Whether every member of a family has a primitive pair over F_q.
    Qmember {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        family: String,
        #[arg(long)]
        irreducible: bool,
        #[arg(long)]
        monomials: bool,
    },
    /// Seeded random audit of the Weil bound and the character expansions.
    WeilAudit {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Other(String),
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Failure {
        match e {
            SearchError::Field(_)
            | SearchError::Poly(_)
            | SearchError::Range { .. }
            | SearchError::Degenerate(_)
            | SearchError::Exceptional
            | SearchError::Checkpoint { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Out {
    format: Format,
}

impl Out {
    fn json(&self, v: &Value) {
        println!("{}", serde_json::to_string_pretty(v).expect("json value"));
    }
}

fn config_hash(cli: &Cli) -> String {
    let v = json!({ "command": &cli.command, "format": cli.format });
    hex::encode(&Sha256::digest(v.to_string().as_bytes())[..8])
}

fn field(q: u64) -> Result<FieldCtx, Failure> {
    if q < 3 || prime_power(q).is_none() {
        return Err(usage(format!("{q} is not a prime power >= 3")));
    }
    FieldCtx::from_order(q).map_err(usage)
}

fn decimal(r: &num_rational::BigRational) -> String {
    format!("{:.7}", r.to_f64().unwrap_or(f64::NAN))
}

fn show(ctx: &FieldCtx, a: Elem) -> String {
    if ctx.k() == 1 {
        a.index().to_string()
    } else {
        format!("{:?}", ctx.coeffs(a))
    }
}

fn mode(paper_faithful: bool) -> CoreMode {
    if paper_faithful {
        CoreMode::Prefix
    } else {
        CoreMode::Exact
    }
}

fn check_bound(out: &Out, hash: &str, q: u64, n: u64, paper_faithful: bool) -> Result<u8, Failure> {
    if q < 3 || prime_power(q).is_none() {
        return Err(usage(format!("{q} is not a prime power >= 3")));
    }
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    let fact = factorize(q - 1).map_err(usage)?;
    let w_pass = theorem31_check(n, q, fact.w());
    let best = best_sieve_with(q, &fact, n, mode(paper_faithful)).map_err(usage)?;
    let p = &best.params;
    let delta = p.delta();
    let big = p.big_delta();
    let threshold = p.threshold(n);
    let verdict = if w_pass || best.pass { "pass" } else { "candidate" };
    match out.format {
        Format::Json => out.json(&json!({
            "config_hash": hash,
            "q": q,
            "n": n,
            "mode": mode(paper_faithful).to_string(),
            "q_minus_1_factors": fact.to_factor_string(),
            "omega": fact.omega(),
            "w": fact.w(),
            "w_test": w_pass,
            "sieve": {
                "core": p.core,
                "sieved": p.sieved,
                "delta": delta.to_string(),
                "big_delta": big.as_ref().map(|b| b.to_string()),
                "threshold": threshold.as_ref().map(|t| t.to_string()),
                "margin": best.report.margin,
                "pass": best.pass,
            },
            "verdict": verdict,
        })),
        Format::Human => {
            println!("q = {q}, n = {n}, q-1 = {}, omega = {}, W = {}", fact.to_factor_string(), fact.omega(), fact.w());
            println!("W test  sqrt(q) > n*W^2: {}", if w_pass { "pass" } else { "fail" });
            println!("sieve   core {:?}, sieved {:?} ({} cores)", p.core, p.sieved, mode(paper_faithful));
            println!("  delta = {delta} = {}", decimal(&delta));
            match (&big, &threshold) {
                (Some(b), Some(t)) => {
                    println!("  Delta = {b} = {}", decimal(b));
                    println!("  n*Delta*W(l)^2 = {t} = {}", decimal(t));
                    println!("  margin sqrt(q)/threshold = {:.6}", best.report.margin.unwrap_or(f64::NAN));
                }
                _ => println!("  delta <= 0: criterion does not apply"),
            }
            println!("  sieve verdict: {}", if best.pass { "pass" } else { "fail" });
            println!("verdict: {verdict}");
        }
        Format::Csv => return Err(usage("check-bound has no csv output")),
    }
    Ok(if verdict == "pass" { 0 } else { EXIT_NEGATIVE })
}

fn tables(out: &Out, hash: &str) -> Result<u8, Failure> {
    let mut rows = Vec::new();
    let mut all_ok = true;
    for r in &REFERENCE_PASSES {
        let c = check_reference(r).map_err(|e| Failure::Other(e.to_string()))?;
        all_ok &= c.ok();
        rows.push(c);
    }
    let cn: Vec<(u64, f64)> = (2..=5).map(|n| (n, generic_cn(n).expect("n > 0"))).collect();
    match out.format {
        Format::Json => out.json(&json!({
            "config_hash": hash,
            "rows": rows.iter().map(|c| json!({
                "n": c.reference.n, "a": c.reference.a, "b": c.reference.b, "r": c.reference.r,
                "delta": c.computed.delta_min.to_string(),
                "big_delta": c.computed.big_delta_max.as_ref().map(|v| v.to_string()),
                "threshold": c.computed.threshold.as_ref().map(|v| v.to_string()),
                "threshold_below": c.reference.threshold_below,
                "ok": c.ok(),
            })).collect::<Vec<_>>(),
            "generic_cn": cn.iter().map(|(n, v)| json!({"n": n, "value": v})).collect::<Vec<_>>(),
            "ok": all_ok,
        })),
        Format::Csv => {
            println!("n,a,b,r,delta,delta_decimal,big_delta_decimal,threshold_decimal,threshold_below,ok");
            for c in &rows {
                let s = &c.computed;
                println!(
                    "{},{},{},{},{},{:.7},{:.7},{:.3},{},{}",
                    s.n,
                    s.a,
                    s.b,
                    s.r,
                    s.delta_min,
                    s.delta_f64(),
                    s.big_delta_f64().unwrap_or(f64::NAN),
                    s.threshold_f64().unwrap_or(f64::NAN),
                    c.reference.threshold_below,
                    c.ok()
                );
            }
        }
        Format::Human => {
            for c in &rows {
                let s = &c.computed;
                let flag = if c.ok() { "ok" } else { "MISMATCH" };
                println!(
                    "n={} a={} b={} r={}  delta={} ({:.7} vs {})  Delta={:.7} (vs {})  {}*Delta*W^2={:.3} < {}  {flag}",
                    s.n,
                    s.a,
                    s.b,
                    s.r,
                    s.delta_min,
                    s.delta_f64(),
                    c.reference.delta,
                    s.big_delta_f64().unwrap_or(f64::NAN),
                    c.reference.big_delta,
                    s.n,
                    s.threshold_f64().unwrap_or(f64::NAN),
                    c.reference.threshold_below
                );
            }
            for (n, v) in &cn {
                println!("C_{n} = {v:.4e}");
            }
        }
    }
    Ok(if all_ok { 0 } else { EXIT_NEGATIVE })
}

#[allow(clippy::too_many_arguments)]
fn scan(
    out: &Out,
    hash: &str,
    workers: usize,
    lo: u64,
    hi: u64,
    n: u64,
    paper_faithful: bool,
    all: bool,
    dest: Option<&PathBuf>,
    checkpoint: Option<&PathBuf>,
    checkpoint_every: u64,
) -> Result<u8, Failure> {
    let cfg = ScanConfig { n, mode: mode(paper_faithful), candidates_only: !all, workers, checkpoint_every };
    let summary = match dest {
        None => {
            let (records, summary) = exception_scan(lo, hi, &cfg)?;
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let write = |w: &mut BufWriter<_>, row: &[String]| writeln!(w, "{}", row.join(","));
            let header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
            write(&mut w, &header).map_err(|e| Failure::Other(e.to_string()))?;
            for r in &records {
                write(&mut w, &r.csv_row()).map_err(|e| Failure::Other(e.to_string()))?;
            }
            w.flush().map_err(|e| Failure::Other(e.to_string()))?;
            summary
        }
        Some(path) => {
            let cp = checkpoint.cloned().unwrap_or_else(|| checkpoint_path_for(path, lo, hi, &cfg));
            scan_to_csv(lo, hi, &cfg, path, Some(&cp))?
        }
    };
    let report = json!({
        "config_hash": hash,
        "scan_config_hash": cfg.hash(),
        "mode": cfg.mode.to_string(),
        "summary": summary,
    });
    let human = format!(
        "scanned [{}, {}] n={n} ({} cores): {} prime powers this run, {} candidates, largest {}",
        summary.lo,
        summary.hi,
        cfg.mode,
        summary.scanned,
        summary.candidates,
        summary.max_candidate.map_or("none".to_string(), |q| q.to_string())
    );
    match (dest, out.format) {
        (None, Format::Json) => eprintln!("{report}"),
        (None, _) => eprintln!("{human}"),
        (Some(_), Format::Json) => out.json(&report),
        (Some(_), Format::Human) => println!("{human}"),
        (Some(_), Format::Csv) => return Err(usage("with --out the summary is human or json")),
    }
    Ok(0)
}

fn family_options(family: Family, irreducible: bool, monomials: bool) -> Result<FamilyOptions, Failure> {
    if irreducible && family != Family::QUADRATIC {
        return Err(usage("--irreducible applies to the 2,0 family only"));
    }
    Ok(FamilyOptions { include_monomials: monomials, irreducible_quadratics: irreducible })
}

fn func_json(ctx: &FieldCtx, f: &RationalFunc) -> Value {
    json!({ "display": f.display(ctx).to_string(), "num": f.num().to_indices(), "den": f.den().to_indices() })
}

#[allow(clippy::too_many_arguments)]
fn classify(
    out: &Out,
    hash: &str,
    workers: usize,
    family: &str,
    qmax: u64,
    opts: (bool, bool),
    paper_faithful: bool,
    budget: u64,
    witnesses: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let family: Family = family.parse().map_err(usage)?;
    let mut cfg = ClassifyConfig::new(family, qmax);
    cfg.options = family_options(family, opts.0, opts.1)?;
    cfg.mode = mode(paper_faithful);
    cfg.budget = budget;
    cfg.workers = workers;
    let report = classify_with(&cfg)?;
    if let Some(path) = witnesses {
        let io = |e: std::io::Error| Failure::Other(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        for e in &report.exceptions {
            writeln!(w, "{}", e.witness_line().to_json()).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    let qs = report.exception_qs();
    match out.format {
        Format::Json => out.json(&json!({
            "config_hash": hash,
            "family": family.to_string(),
            "q_max": qmax,
            "candidates": report.candidates.len(),
            "exceptions": qs,
            "complete": report.complete,
            "high_water": report.high_water,
            "work": report.work,
            "work_required": report.work_required,
        })),
        Format::Human => {
            println!("family {family}, q <= {qmax}: {} candidates from the criterion", report.candidates.len());
            for e in &report.exceptions {
                let ctx = FieldCtx::from_order(e.q).map_err(usage)?;
                println!("  q = {:>4}: no primitive pair for f = {}", e.q, e.failing.display(&ctx));
            }
            println!("true exceptions ({}): {qs:?}", qs.len());
        }
        Format::Csv => {
            println!("q,family,num,den");
            for e in &report.exceptions {
                let join = |v: Vec<u32>| v.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
                println!("{},{},{},{}", e.q, family, join(e.failing.num().to_indices()), join(e.failing.den().to_indices()));
            }
        }
    }
    if !report.complete {
        return Err(Failure::Budget(format!(
            "classification needs {} work units but the budget is {}; only q <= {} was classified",
            report.work_required, budget, report.high_water
        )));
    }
    Ok(0)
}

fn pair(out: &Out, hash: &str, q: u64, num: &str, den: &str) -> Result<u8, Failure> {
    let ctx = field(q)?;
    let num = parse::parse_poly(num, &ctx).map_err(|e| usage(format!("--num {e}")))?;
    let den = parse::parse_poly(den, &ctx).map_err(|e| usage(format!("--den {e}")))?;
    let f = RationalFunc::new(num, den, &ctx).map_err(usage)?;
    let (exceptional, why) = is_exceptional(&ctx, &f);
    let w = pair_search(&ctx, &f)?;
    match out.format {
        Format::Json => out.json(&json!({
            "config_hash": hash,
            "q": q,
            "f": func_json(&ctx, &f),
            "exceptional": exceptional,
            "exceptionality": why,
            "result": w,
        })),
        Format::Human => {
            println!("q = {q}, f = {}", f.display(&ctx));
            println!("exceptionality={exceptional}");
            match w {
                PairWitness::Found { alpha, f_alpha, alpha_dlog, falpha_dlog } => println!(
                    "witness: alpha = {} = g^{alpha_dlog}, f(alpha) = {} = g^{falpha_dlog}",
                    show(&ctx, alpha),
                    show(&ctx, f_alpha)
                ),
                PairWitness::Absent { examined } => println!("ABSENT ({examined} primitive alpha examined)"),
            }
        }
        Format::Csv => return Err(usage("pair has no csv output")),
    }
    Ok(if w.is_found() { 0 } else { EXIT_NEGATIVE })
}

fn qmember(out: &Out, hash: &str, q: u64, family: &str, irreducible: bool, monomials: bool) -> Result<u8, Failure> {
    let ctx = field(q)?;
    let family: Family = family.parse().map_err(usage)?;
    let m = q_in_q_with(&ctx, family, family_options(family, irreducible, monomials)?)?;
    match out.format {
        Format::Json => out.json(&json!({
            "config_hash": hash,
            "q": q,
            "family": family.to_string(),
            "member": m.member,
            "failing": m.failing.as_ref().map(|f| func_json(&ctx, f)),
        })),
        Format::Human => match &m.failing {
            None => println!("q = {q} is in Q_{family}: every member has a primitive pair"),
            Some(f) => println!("q = {q} is not in Q_{family}: f = {} has no primitive pair", f.display(&ctx)),
        },
        Format::Csv => return Err(usage("qmember has no csv output")),
    }
    Ok(if m.member { 0 } else { EXIT_NEGATIVE })
}

fn weil_audit(out: &Out, hash: &str, seed: u64, cases: u64) -> Result<u8, Failure> {
    let r = property_audit(seed, cases);
    match out.format {
        Format::Json => out.json(&json!({ "config_hash": hash, "audit": r })),
        Format::Human => {
            println!(
                "seed {seed}: {} Weil instances (worst |S|/bound {:.6}), {} N_f expansions, {} rho_u values",
                r.weil_checked, r.weil_worst_ratio, r.nf_checked, r.rho_checked
            );
            for f in &r.failures {
                println!("  FAIL {f}");
            }
            println!("{}", if r.ok() { "all checks passed" } else { "violations found" });
        }
        Format::Csv => return Err(usage("weil-audit has no csv output")),
    }
    Ok(if r.ok() { 0 } else { EXIT_NEGATIVE })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let out = Out { format: cli.format };
    let hash = config_hash(cli);
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    if !cli.no_header {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        println!("# primpair {} config={hash} unix_time={now}", env!("CARGO_PKG_VERSION"));
    }
    match &cli.command {
        Command::CheckBound { q, n, paper_faithful } => check_bound(&out, &hash, *q, *n, *paper_faithful),
        Command::Tables => tables(&out, &hash),
        Command::Scan { lo, hi, n, paper_faithful, all, out: dest, checkpoint, checkpoint_every } => scan(
            &out,
            &hash,
            cli.workers,
            *lo,
            *hi,
            *n,
            *paper_faithful,
            *all,
            dest.as_ref(),
            checkpoint.as_ref(),
            *checkpoint_every,
        ),
        Command::Classify { family, qmax, irreducible, monomials, paper_faithful, budget, witnesses } => classify(
            &out,
            &hash,
            cli.workers,
            family,
            *qmax,
            (*irreducible, *monomials),
            *paper_faithful,
            *budget,
            witnesses.as_ref(),
        ),
        Command::Pair { q, num, den } => pair(&out, &hash, *q, num, den),
        Command::Qmember { q, family, irreducible, monomials } => {
            qmember(&out, &hash, *q, family, *irreducible, *monomials)
        }
        Command::WeilAudit { seed, cases } => weil_audit(&out, &hash, *seed, *cases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget refusal: {m}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
