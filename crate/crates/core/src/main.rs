use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wordproblem::activity::{self, ActivityClass};
use wordproblem::bench::{self, Bench, Family, Model};
use wordproblem::contraction::{self, CheckOutcome, ContractionCertificate, Mode, Scanner};
use wordproblem::nilpotent::{self, GroupKind};
use wordproblem::solvers::{self, StepReport};
use wordproblem::{builtin, word_engine, Automaton, Error, Result};

#[derive(Parser)]
#[command(name = "wp", version, about = "Word problem solvers for automaton groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Contracting,
    Bounded,
    Polynomial,
    Nilpotent,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct AutArg {
    /// Automaton file, or one of grigorchuk, basilica, poly1, adding, doubled.
    #[arg(long, short = 'a')]
    automaton: String,
}

#[derive(clap::Args)]
struct CertArgs {
    /// Certificate file written by `certify --out`.
    #[arg(long)]
    certificate: Option<String>,
    /// Largest block length searched when no certificate is given.
    #[arg(long, default_value_t = 10)]
    max_len: usize,
    /// Largest alphabet power searched when no certificate is given.
    #[arg(long, default_value_t = 3)]
    max_power: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an automaton and print a summary.
    Validate(AutArg),
    /// Print the minimized automaton.
    Minimize(AutArg),
    /// Section `w|_v` and image `o(w, v)`.
    DualSection {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long, short = 'w')]
        word: String,
        #[arg(long, short = 'v')]
        at: String,
    },
    /// Decide whether a word is trivial. Exit 0 accept, 1 reject, 2 error.
    Solve {
        #[arg(long, short = 'a', conflicts_with = "group")]
        automaton: Option<String>,
        /// z4, z2 or heis.
        #[arg(long, short = 'g')]
        group: Option<String>,
        #[arg(long, short = 'm', value_enum, default_value = "auto")]
        method: Method,
        #[command(flatten)]
        cert: CertArgs,
        #[arg(long, value_enum)]
        report: Option<ReportFormat>,
        /// Read the word from a file instead.
        #[arg(long, conflicts_with = "word")]
        file: Option<String>,
        word: Option<String>,
    },
    /// Check a contraction condition, or search for a certificate with --find.
    Certify {
        #[command(flatten)]
        aut: AutArg,
        #[arg(short = 'L', default_value_t = 1)]
        block_len: usize,
        #[arg(short = 'k', default_value_t = 1)]
        power: usize,
        #[arg(long, default_value = "item3")]
        mode: String,
        /// Search all (k, L) up to -k and -L instead of checking one triple.
        #[arg(long)]
        find: bool,
        /// Check this many seeded random blocks instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the certificate table here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Bounded / polynomial / exponential activity.
    Classify(AutArg),
    /// Growth function as CSV `n,gamma`.
    Growth {
        #[command(flatten)]
        aut: AutArg,
        #[arg(short = 'n', default_value_t = 6)]
        radius: usize,
        /// Emit `n, n·log₂ γ(n)` instead.
        #[arg(long)]
        curve: bool,
    },
    /// Run a benchmark family.
    Bench {
        #[arg(long, short = 'f')]
        family: String,
        #[arg(long, default_value_t = 4)]
        from: u32,
        #[arg(long, default_value_t = 10)]
        to: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        report: ReportFormat,
        /// Largest log power among the fitted models (json report).
        #[arg(long, default_value_t = 2)]
        max_log_power: u32,
    },
    /// Fit complexity models to a CSV with `n` and `steps` columns.
    Fit {
        file: String,
        /// Comma-separated models, e.g. `n,nlogn,nlog2n,n2`.
        #[arg(long, default_value = "n,nlogn,nlog2n,n2")]
        models: String,
    },
    /// Exhaustive small-scale agreement checks.
    Selftest,
}

fn load_automaton(source: &str) -> Result<Automaton> {
    if let Some(a) = builtin::by_name(source) {
        return Ok(a);
    }
    let text = fs::read_to_string(source).map_err(|e| Error::Invalid(format!("{source}: {e}")))?;
    Automaton::parse(&text)
}

fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))
}

fn certificate_for(aut: &Automaton, sym: &Automaton, args: &CertArgs) -> Result<ContractionCertificate> {
    match &args.certificate {
        Some(path) => {
            let cert = ContractionCertificate::parse(sym, &read_file(path)?)?;
            if let Some((w, x)) = contraction::verify_certificate(sym, &cert)? {
                return Err(Error::CertificateMismatch(format!("entry {} at letter {x} is wrong", sym.format_word(&w))));
            }
            Ok(cert)
        }
        None => contraction::find_certificate(aut, args.max_len, args.max_power),
    }
}

fn print_report(report: &StepReport, format: Option<ReportFormat>) {
    match format {
        Some(ReportFormat::Json) => println!("{}", serde_json::to_string_pretty(report).expect("report serializes")),
        Some(ReportFormat::Csv) => {
            println!("method,input_len,stages,steps,table_lookups,oracle_calls,verdict");
            println!(
                "{},{},{},{},{},{},{}",
                report.method,
                report.input_len,
                report.stages,
                report.steps,
                report.table_lookups,
                report.oracle_calls,
                if report.accepted() { "accept" } else { "reject" }
            );
        }
        None => println!("{}", if report.accepted() { "accept" } else { "reject" }),
    }
}

fn solve(
    automaton: Option<String>,
    group: Option<String>,
    method: Method,
    cert: CertArgs,
    report: Option<ReportFormat>,
    word: String,
) -> Result<ExitCode> {
    let r = if let Some(g) = group {
        if !matches!(method, Method::Nilpotent | Method::Auto) {
            return Err(Error::Invalid("instance groups use --method nilpotent".into()));
        }
        let inst = nilpotent::build_instance(g.parse::<GroupKind>()?)?;
        nilpotent::solve_nilpotent(&inst, &inst.parse_word(&word)?)?
    } else {
        let source = automaton.ok_or_else(|| Error::Invalid("need --automaton or --group".into()))?;
        let aut = load_automaton(&source)?;
        let sym = aut.symmetrize();
        let w = sym.parse_word(&word)?;
        match method {
            Method::Oracle => solvers::solve_oracle(&sym, &w)?,
            Method::Contracting => solvers::solve_contracting(&sym, &certificate_for(&aut, &sym, &cert)?, &w)?,
            Method::Bounded => solvers::solve_bounded(&sym, &certificate_for(&aut, &sym, &cert)?, &w)?,
            Method::Polynomial => {
                let degree = match activity::classify_activity(&sym)? {
                    ActivityClass::Polynomial { degree } => degree,
                    ActivityClass::Bounded { .. } => 0,
                    ActivityClass::Exponential => return Err(Error::NotPolynomial),
                };
                let (looped, _) = activity::loopify(&sym)?;
                solvers::solve_polynomial(&looped, degree, None, &w)?
            }
            Method::Nilpotent => return Err(Error::Invalid("--method nilpotent needs --group".into())),
            Method::Auto => solvers::solve_auto(&aut, &w)?,
        }
    };
    print_report(&r, report);
    Ok(if r.accepted() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn certify(
    aut: &Automaton,
    block_len: usize,
    power: usize,
    mode: &str,
    find: bool,
    sample: Option<usize>,
    seed: u64,
    out: Option<String>,
) -> Result<ExitCode> {
    let scanner = Scanner::new(aut, block_len)?;
    let sym = scanner.automaton();
    let cert = if find {
        match contraction::find_certificate(aut, block_len, power) {
            Ok(c) => Some(c),
            Err(Error::NotFound { max_len, max_power }) => {
                println!("not found: no certificate with L <= {max_len}, k <= {max_power}");
                return Ok(ExitCode::from(1));
            }
            Err(e) => return Err(e),
        }
    } else {
        let mode: Mode = mode.parse()?;
        let outcome = match (sample, &out) {
            (Some(n), None) => scanner.check_sample(block_len, power, mode, n, seed)?,
            _ => match scanner.certify(block_len, power, mode)? {
                Ok(c) => {
                    if let Some(path) = &out {
                        fs::write(path, c.to_text(sym)).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
                    }
                    CheckOutcome::Pass
                }
                Err(fail) => fail,
            },
        };
        match outcome {
            CheckOutcome::Pass => {
                let scope = sample.map_or("all blocks".to_string(), |n| format!("{n} sampled blocks (seed {seed})"));
                println!("pass: {mode} L={block_len} k={power} over {scope}");
                return Ok(ExitCode::SUCCESS);
            }
            CheckOutcome::Fail { witness, lengths } => {
                let lens: Vec<String> = lengths.iter().map(|l| l.map_or("> L".into(), |l| l.to_string())).collect();
                println!("fail: {mode} L={block_len} k={power} witness {} lengths [{}]", sym.format_word(&witness), lens.join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    };
    let cert = cert.expect("found");
    println!(
        "found: {} L={} k={} lambda={}/{}",
        cert.mode, cert.block_len, cert.power, cert.lambda.0, cert.lambda.1
    );
    if let Some(path) = out {
        let sym = aut.symmetrize();
        fs::write(&path, cert.to_text(&sym)).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn fit(file: &str, models: &str) -> Result<ExitCode> {
    let text = read_file(file)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    let col = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| Error::Invalid(format!("missing column `{name}`")))
    };
    let (ni, si) = (col("n")?, col("steps")?);
    let rows = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            let bad = || Error::Invalid(format!("bad row `{l}`"));
            let n = f.get(ni).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let s = f.get(si).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            Ok((n, s))
        })
        .collect::<Result<Vec<(usize, u64)>>>()?;
    let models = models.split(',').map(str::parse).collect::<Result<Vec<Model>>>()?;
    let r = bench::fit_complexity(&rows, &models)?;
    println!("model,residual,constant");
    for f in &r.fits {
        println!("{},{:.6},{:.6}", f.model, f.residual, f.constant);
    }
    println!("winner: {} (constant {:.4})", r.winner, r.constant);
    Ok(ExitCode::SUCCESS)
}

fn selftest() -> Result<ExitCode> {
    let mut ok = true;
    let g = builtin::grigorchuk();
    let scanner = Scanner::new(&g, 2)?;
    let sym = scanner.automaton().clone();
    let cert = scanner.certify(2, 1, Mode::Item1)?.map_err(|_| Error::Invalid("item1 certificate".into()))?;
    let gens = sym.generators();
    let mut disagreements = 0;
    let mut total = 0;
    for len in 0..=6u32 {
        for idx in 0..gens.len().pow(len) {
            let mut i = idx;
            let w: Vec<_> = (0..len)
                .map(|_| {
                    let s = gens[i % gens.len()];
                    i /= gens.len();
                    s
                })
                .collect();
            let oracle = word_engine::is_identity_oracle(&sym, &w, word_engine::DEFAULT_BUDGET)?;
            let fast = solvers::solve_contracting(&sym, &cert, &w)?.accepted();
            let bounded = solvers::solve_bounded(&sym, &cert, &w)?.accepted();
            total += 1;
            if fast != oracle || bounded != oracle {
                disagreements += 1;
            }
        }
    }
    println!("grigorchuk words of length <= 6: {total} checked, {disagreements} disagreements");
    ok &= disagreements == 0;

    for kind in GroupKind::ALL {
        let inst = nilpotent::build_instance(kind)?;
        let closure = nilpotent::verify_table_closure(&inst);
        println!("{kind}: |N| = {}, table closure {}", inst.letters().len(), if closure.is_none() { "ok" } else { "FAILED" });
        ok &= closure.is_none();
    }
    let z = nilpotent::build_instance(GroupKind::Z4)?;
    let letters: Vec<_> = z.parse_word("aAe")?;
    let mut bad = 0;
    for len in 0..=8u32 {
        for idx in 0..3usize.pow(len) {
            let mut i = idx;
            let w: Vec<_> = (0..len)
                .map(|_| {
                    let a = letters[i % 3];
                    i /= 3;
                    a
                })
                .collect();
            if nilpotent::solve_nilpotent(&z, &w)?.accepted() != (z.evaluate(&w) == [0; 3]) {
                bad += 1;
            }
        }
    }
    println!("z4 words of length <= 8: {bad} disagreements");
    ok &= bad == 0;
    println!("{}", if ok { "selftest passed" } else { "selftest FAILED" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate(a) => {
            let aut = load_automaton(&a.automaton)?;
            println!("ok: {} states, {} letters", aut.num_states(), aut.num_letters());
            match aut.identity() {
                Some(e) => println!("identity: {}", aut.state_name(e)),
                None => println!("identity: none"),
            }
        }
        Command::Minimize(a) => print!("{}", load_automaton(&a.automaton)?.minimize().to_text()),
        Command::DualSection { aut, word, at } => {
            let aut = load_automaton(&aut.automaton)?;
            let sym = aut.symmetrize();
            let w = sym.parse_word(&word)?;
            let v = sym.parse_letters(&at)?;
            println!("section: {}", sym.format_word(&sym.section_of_word(&w, &v)?));
            println!("image: {}", sym.format_letters(&sym.apply(&w, &v)?));
        }
        Command::Solve { automaton, group, method, cert, report, file, word } => {
            let word = match (file, word) {
                (Some(path), _) => read_file(&path)?,
                (None, Some(w)) => w,
                (None, None) => String::new(),
            };
            return solve(automaton, group, method, cert, report, word);
        }
        Command::Certify { aut, block_len, power, mode, find, sample, seed, out } => {
            return certify(&load_automaton(&aut.automaton)?, block_len, power, &mode, find, sample, seed, out);
        }
        Command::Classify(a) => {
            let class = activity::classify_activity(&load_automaton(&a.automaton)?)?;
            match class {
                ActivityClass::Bounded { bound } => println!("bounded (C = {bound})"),
                ActivityClass::Polynomial { degree } => println!("polynomial (degree {degree})"),
                ActivityClass::Exponential => println!("exponential"),
            }
        }
        Command::Growth { aut, radius, curve } => {
            let table = word_engine::growth(&load_automaton(&aut.automaton)?.symmetrize(), radius)?;
            if curve {
                print!("{}", bench::curve_to_csv(&bench::lower_bound_curve(&table, 0..=radius)));
            } else {
                print!("{}", table.to_csv());
            }
        }
        Command::Bench { family, from, to, seed, report, max_log_power } => {
            let family: Family = family.parse()?;
            let rows = Bench::new(family)?.run(from..=to, seed)?;
            match report {
                ReportFormat::Csv => print!("{}", bench::rows_to_csv(&rows)),
                ReportFormat::Json => {
                    let pts: Vec<(usize, u64)> = rows.iter().map(|r| (r.n, r.steps)).collect();
                    let fit = bench::fit_complexity(&pts, &Model::standard(max_log_power)).ok();
                    let report = bench::BenchReport { family, seed, rows, fit };
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                }
            }
        }
        Command::Fit { file, models } => return fit(&file, &models),
        Command::Selftest => return selftest(),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
