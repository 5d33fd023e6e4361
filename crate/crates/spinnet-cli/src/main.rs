//! `spinnet`: exact recoupling symbols, spin-network amplitudes, Wilson loop
//! matrix elements and identity sweeps from the command line.
//!
//! Exit status is 0 on success, 1 when a sweep finds failures and 2 on any
//! argument or input error. Errors go to standard error prefixed `error:`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinnet::cache::{load_cache, prefill_6j_cache, save_cache, CACHE_ENV};
use spinnet::wigner::{admissible_6j, clebsch_gordan_term, parse_spin, six_j_cache_len, wigner_3j_term, wigner_6j_term};
use spinnet::{
    amplitude, build_lattice, matrix_element, second_kind, verify_with, IdentityId, IdentityReport, LatticeKind,
    LoopName, LoopSpec, Mode, Sample, SecondKindBracket, SpinAssignment, TopologicalSector, VerifyParams,
};
use surd::{HalfInt, SurdSum};

#[derive(Parser, Debug)]
#[command(name = "spinnet", version, about = "Exact spin-network symbols, amplitudes and Wilson loop identities")]
struct Cli {
    /// Read spins as twice-j integers (`3` for 3/2).
    #[arg(long, global = true)]
    twice: bool,
    /// 6j cache file loaded before and saved after the command (default: $SPINNET_CACHE).
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single symbol.
    #[command(subcommand)]
    Symbol(Symbol),
    /// Ground-state amplitude Phi(J) of a lattice spin network.
    Amplitude {
        #[arg(long)]
        lattice: String,
        /// Spins as `label=twice_j` pairs, e.g. `j1=1,j2=1,j3=2,...`.
        #[arg(long)]
        assign: String,
        /// Torus topological sector `p,q`.
        #[arg(long)]
        sector: Option<String>,
    },
    /// Matrix element of a Wilson loop between two spin-network states.
    Matel {
        #[arg(long)]
        lattice: String,
        #[arg(long = "loop")]
        loop_name: String,
        #[arg(long = "J")]
        j: String,
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value = "1/2")]
        s: String,
    },
    /// Sweep an identity over admissible spin tuples.
    Verify(VerifyArgs),
    /// Tabulate symbols as CSV.
    #[command(subcommand)]
    Table(Table),
    /// Load, fill or save the 6j cache.
    Cache {
        #[arg(long, value_name = "PATH")]
        load: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
        /// Evaluate every admissible 6j up to this spin before saving.
        #[arg(long, value_name = "JMAX")]
        prefill: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Symbol {
    /// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
    #[command(name = "6j")]
    SixJ {
        #[arg(num_args = 6, required = true, allow_hyphen_values = true)]
        j: Vec<String>,
    },
    /// Wigner 3j symbol: j1 j2 j3 m1 m2 m3.
    #[command(name = "3j")]
    ThreeJ {
        #[arg(num_args = 6, required = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>: j1 m1 j2 m2 J M.
    Cg {
        #[arg(num_args = 6, required = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// 3nj bracket of the second kind.
    #[command(name = "3nj2")]
    ThreeNj2 {
        #[arg(long)]
        n: usize,
        #[arg(long, num_args = 1.., required = true)]
        top: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        mid: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        bottom: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum Table {
    /// Every admissible 6j with all arguments <= jmax.
    #[command(name = "6j")]
    SixJ {
        #[arg(long)]
        jmax: String,
        /// Output file (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    identity: String,
    #[arg(long)]
    jmax: String,
    #[arg(long, default_value = "1/2")]
    s: String,
    #[arg(long)]
    sector: Option<String>,
    /// Number of seeded random tuples (exhaustive when omitted).
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `chain` (default) or `printed`.
    #[arg(long, default_value = "chain")]
    mode: String,
    /// Loop for ITERATED and MEVE_GENERIC.
    #[arg(long = "loop")]
    loop_name: Option<String>,
    /// Iterations for ITERATED.
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long)]
    threads: Option<usize>,
    /// Widen every k window by this many steps on each side.
    #[arg(long, default_value_t = 0)]
    window_pad: u32,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    /// Report elapsed_ms as 0 so that output is byte-reproducible.
    #[arg(long)]
    no_elapsed: bool,
}

/// A failed run: exit status and message.
struct Failure(u8, String);

type Outcome = Result<u8, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure(2, e.to_string())
}

/// Fixed-point when the magnitude allows, scientific otherwise; 15 significant digits.
fn approx(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        format!("{:.*}", (14 - mag) as usize, x)
    } else {
        format!("{:.14e}", x)
    }
}

fn print_value(out: &mut impl Write, v: &SurdSum) -> std::io::Result<()> {
    writeln!(out, "{v}")?;
    writeln!(out, "approx {}", approx(v.to_f64()))
}

/// A projection quantum number, which may be negative.
fn parse_projection(s: &str, twice: bool) -> Result<HalfInt, Failure> {
    if twice {
        s.trim().parse::<i32>().map(HalfInt::from_twice).map_err(|_| usage(format!("bad twice-j integer `{s}`")))
    } else {
        s.parse::<HalfInt>().map_err(usage)
    }
}

fn spins(list: &[String], twice: bool) -> Result<Vec<HalfInt>, Failure> {
    list.iter().map(|s| parse_spin(s, twice).map_err(usage)).collect()
}

fn sector(text: &Option<String>) -> Result<TopologicalSector, Failure> {
    text.as_deref().map_or(Ok(TopologicalSector::TRIVIAL), |t| t.parse().map_err(usage))
}

fn run_symbol(sym: Symbol, twice: bool, out: &mut impl Write) -> Outcome {
    let value = match sym {
        Symbol::SixJ { j } => {
            let j = spins(&j, twice)?;
            wigner_6j_term([j[0], j[1], j[2], j[3], j[4], j[5]]).to_surd()
        }
        Symbol::ThreeJ { args } => {
            let j = spins(&args[..3], twice)?;
            let m: Vec<_> = args[3..].iter().map(|s| parse_projection(s, twice)).collect::<Result<_, _>>()?;
            wigner_3j_term(j[0], j[1], j[2], m[0], m[1], m[2]).map_err(usage)?.to_surd()
        }
        Symbol::Cg { args } => {
            let j = spins(&[args[0].clone(), args[2].clone(), args[4].clone()], twice)?;
            let m: Vec<_> =
                [&args[1], &args[3], &args[5]].iter().map(|s| parse_projection(s, twice)).collect::<Result<_, _>>()?;
            clebsch_gordan_term(j[0], m[0], j[1], m[1], j[2], m[2]).map_err(usage)?.to_surd()
        }
        Symbol::ThreeNj2 { n, top, mid, bottom } => {
            if ![3, 4, 6].contains(&n) {
                return Err(usage(format!("--n must be 3, 4 or 6, got {n}")));
            }
            let (top, mid, bottom) = (spins(&top, twice)?, spins(&mid, twice)?, spins(&bottom, twice)?);
            if [top.len(), mid.len(), bottom.len()] != [n; 3] {
                return Err(usage(format!("each row needs {n} spins")));
            }
            let b = SecondKindBracket::new(top, mid, bottom).map_err(usage)?;
            second_kind::<SurdSum>(&b)
        }
    };
    print_value(out, &value).map_err(usage)?;
    Ok(0)
}

fn run_amplitude(lattice: &str, assign: &str, sec: &Option<String>, out: &mut impl Write) -> Outcome {
    let kind: LatticeKind = lattice.parse().map_err(usage)?;
    let j = SpinAssignment::parse(kind, assign).map_err(usage)?;
    let v: SurdSum = amplitude(build_lattice(kind), &j, sector(sec)?).map_err(usage)?;
    print_value(out, &v).map_err(usage)?;
    Ok(0)
}

fn run_matel(lattice: &str, name: &str, j: &str, k: &str, s: &str, twice: bool, out: &mut impl Write) -> Outcome {
    let kind: LatticeKind = lattice.parse().map_err(usage)?;
    let name: LoopName = name.parse().map_err(usage)?;
    if name.lattice() != kind {
        return Err(usage(format!("loop {name} lives on the {} lattice, not on {kind}", name.lattice())));
    }
    let lp = LoopSpec::named(name);
    let j = SpinAssignment::parse(kind, j).map_err(usage)?;
    let k = SpinAssignment::parse(kind, k).map_err(usage)?;
    let s = parse_spin(s, twice).map_err(usage)?;
    let r = matrix_element::<SurdSum>(&lp, &j, &k, s).map_err(usage)?;
    print_value(out, &r.value).map_err(usage)?;
    writeln!(out, "deltas_satisfied {}", r.deltas_satisfied).map_err(usage)?;
    writeln!(out, "triads_satisfied {}", r.triads_satisfied()).map_err(usage)?;
    Ok(0)
}

fn verify_params(a: &VerifyArgs, twice: bool) -> Result<VerifyParams, Failure> {
    let id: IdentityId = a.identity.parse().map_err(usage)?;
    let jmax = parse_spin(&a.jmax, twice).map_err(usage)?;
    let s = parse_spin(&a.s, twice).map_err(usage)?;
    let mut p = VerifyParams::new(id, jmax, s)
        .sector(sector(&a.sector)?)
        .mode(a.mode.parse::<Mode>().map_err(usage)?)
        .q(a.q)
        .window_pad(a.window_pad);
    if let Some(n) = a.sample {
        p = p.sample(Sample::Random { n, seed: a.seed });
    }
    if let Some(l) = &a.loop_name {
        p = p.loop_name(l.parse().map_err(usage)?);
    }
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        p = p.threads(t);
    }
    Ok(p)
}

fn write_report(r: &IdentityReport, json: bool, out: &mut impl Write) -> std::io::Result<()> {
    if json {
        return writeln!(out, "{}", serde_json::to_string_pretty(r).expect("report serializes"));
    }
    let p = &r.params;
    writeln!(out, "identity: {}", r.identity)?;
    let mut line = format!("params: jmax={}", p.jmax);
    for (key, val) in [("s", &p.s), ("sector", &p.sector), ("loop", &p.loop_name)] {
        if let Some(v) = val {
            line.push_str(&format!(" {key}={v}"));
        }
    }
    if let Some(q) = p.q {
        line.push_str(&format!(" q={q}"));
    }
    line.push_str(&format!(" mode={} sample={} window_pad={}", p.mode, p.sample, p.window_pad));
    writeln!(out, "{line}")?;
    writeln!(out, "tuples_checked: {}", r.tuples_checked)?;
    writeln!(out, "failures: {}", r.failures.len())?;
    for f in &r.failures {
        writeln!(out, "  {}  lhs={}  rhs={}  residual={}", f.tuple, f.lhs, f.rhs, f.residual)?;
    }
    Ok(())
}

fn run_verify(a: &VerifyArgs, twice: bool, out: &mut impl Write) -> Outcome {
    let p = verify_params(a, twice)?;
    let mut r = verify_with(&p).map_err(usage)?;
    if a.no_elapsed {
        r.elapsed_ms = 0;
    }
    write_report(&r, a.json, out).map_err(usage)?;
    if !a.json {
        eprintln!("elapsed_ms: {}", r.elapsed_ms);
    }
    Ok(if r.passed() { 0 } else { 1 })
}

fn run_table(jmax: &str, path: &Option<PathBuf>, twice: bool, out: &mut impl Write) -> Outcome {
    let jmax = parse_spin(jmax, twice).map_err(usage)?;
    let sink: Box<dyn Write + '_> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?),
        None => Box::new(out),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| usage(e);
    w.write_record(["j1", "j2", "j3", "j4", "j5", "j6", "value", "approx"]).map_err(io)?;
    for j in admissible_6j(jmax) {
        let v = wigner_6j_term(j).to_surd();
        let mut row: Vec<String> = j.iter().map(|x| x.twice().to_string()).collect();
        row.push(v.to_string());
        row.push(approx(v.to_f64()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(usage)?;
    Ok(0)
}

fn run_cache(
    load: &Option<PathBuf>,
    save: &Option<PathBuf>,
    prefill: &Option<String>,
    twice: bool,
    out: &mut impl Write,
) -> Outcome {
    if load.is_none() && save.is_none() && prefill.is_none() {
        return Err(usage("cache needs at least one of --load, --save, --prefill"));
    }
    if let Some(p) = load {
        let n = load_cache(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        writeln!(out, "loaded {n} entries from {}", p.display()).map_err(usage)?;
    }
    if let Some(j) = prefill {
        let jmax = parse_spin(j, twice).map_err(usage)?;
        let n = prefill_6j_cache(jmax);
        writeln!(out, "evaluated {n} admissible 6j symbols up to {jmax}").map_err(usage)?;
    }
    if let Some(p) = save {
        let n = save_cache(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        writeln!(out, "saved {n} entries to {}", p.display()).map_err(usage)?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let cache_path = cli.cache.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    if let Some(p) = cache_path.as_ref().filter(|p| p.exists()) {
        load_cache(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    let before = six_j_cache_len();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let twice = cli.twice;
    let status = match cli.command {
        Command::Symbol(sym) => run_symbol(sym, twice, &mut out),
        Command::Amplitude { lattice, assign, sector } => run_amplitude(&lattice, &assign, &sector, &mut out),
        Command::Matel { lattice, loop_name, j, k, s } => run_matel(&lattice, &loop_name, &j, &k, &s, twice, &mut out),
        Command::Verify(a) => run_verify(&a, twice, &mut out),
        Command::Table(Table::SixJ { jmax, out: path }) => run_table(&jmax, &path, twice, &mut out),
        Command::Cache { load, save, prefill } => run_cache(&load, &save, &prefill, twice, &mut out),
    }?;
    if let Some(p) = cache_path {
        if six_j_cache_len() > before {
            save_cache(&p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        }
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
