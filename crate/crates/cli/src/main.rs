use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use aperiodic_spectra::palindromes::{self, PalindromeReportEntry, StrongPrefixOptions};
use aperiodic_spectra::repetition;
use aperiodic_spectra::returnwords::{Address, OdometerPrefix, ReturnLetter};
use aperiodic_spectra::spectral::{self, CouplingConfig, EigenSolution};
use aperiodic_spectra::substitution::{classify_params, Classification, SubstitutionSpec};
use aperiodic_spectra::words::Symbol;
use aperiodic_spectra::{Budget, Error, Letter, Substitution};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

const SCHEMA: &str = "aperiodic-spectra/1";

#[derive(Parser)]
#[command(
    name = "aperiodic-spectra",
    version,
    about = "Combinatorics and Schrödinger spectra of substitutions a -> a^p, b -> b a^k1 ... b a^kr",
    after_help = "Exit codes: 0 ok, 2 usage or invalid input, 3 degenerate/trivial/minimal input or \
                  inapplicable regime, 4 budget exceeded, undetermined range or search exhausted."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full JSON report: classification, complexity, palindromes, index and Gordon verdict.
    Analyze(AnalyzeArgs),
    /// Dump a window of a sequence as `index<TAB>value` lines.
    Generate(GenerateArgs),
    /// Search a strongly palindromic address and print its palindromes as a JSON array.
    Palindromes(PalindromeArgs),
    /// Integer bracket on the b-index.
    Index(IndexArgs),
    /// Periodic-approximant spectrum proxy as CSV.
    Spectrum(SpectrumArgs),
    /// Switch couplings and eigenstate decay for b -> bab^4.
    Eigenvalue(EigenArgs),
}

#[derive(Args, Clone)]
struct SubstitutionArgs {
    /// JSON file `{"p": .., "ks": [..]}`.
    #[arg(long, conflicts_with_all = ["p", "ks", "image"])]
    config: Option<PathBuf>,
    /// Exponent of `a -> a^p`.
    #[arg(long)]
    p: Option<u64>,
    /// Comma-separated exponents k1,...,kr.
    #[arg(long, value_delimiter = ',', conflicts_with = "image")]
    ks: Option<Vec<u64>>,
    /// Image of b as a word over {a,b}; it is brought into normal form.
    #[arg(long)]
    image: Option<String>,
}

impl SubstitutionArgs {
    fn spec(&self) -> anyhow::Result<SubstitutionSpec> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let spec: SubstitutionSpec = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            return Ok(spec);
        }
        let p = self.p.ok_or_else(|| Error::InvalidInput("give --config, or --p with --ks or --image".into()))?;
        if let Some(image) = &self.image {
            let s = Substitution::normalize(p, &image.parse()?)?;
            return Ok(s.into());
        }
        let ks = self.ks.clone().ok_or_else(|| Error::InvalidInput("missing --ks".into()))?;
        Ok(SubstitutionSpec { p, ks })
    }

    /// Loads and insists on an almost-primitive substitution.
    fn load_ap(&self) -> anyhow::Result<Substitution> {
        let spec = self.spec()?;
        match classify_params(spec.p, &spec.ks) {
            Classification::AlmostPrimitive { .. } => Ok(Substitution::new(spec.p, spec.ks)?),
            Classification::Degenerate => Err(Error::Degenerate("all exponents are zero, b -> b^r".into()).into()),
            other => Err(Error::NotAlmostPrimitive { kind: other.to_string(), operation: "this command".into() }.into()),
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    /// Largest n for the sampled complexity c(n).
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    /// Depth of the measure samples.
    #[arg(long, default_value_t = 6)]
    measure_depth: u32,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alphabet {
    Ab,
    Return,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    /// Odometer digits p1,...,pn; the window shows the approximant, `?` for undetermined cells.
    #[arg(long, value_delimiter = ',', conflicts_with = "fixedpoint")]
    digits: Option<Vec<usize>>,
    /// The fixed point lim ϱ̄ⁿ(k1), extended by ∞ at position -1.
    #[arg(long)]
    fixedpoint: bool,
    /// With --fixedpoint: the second fixed point of a type-0 substitution (0 at position -1).
    #[arg(long, requires = "fixedpoint")]
    twin: bool,
    /// Inclusive range `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long, value_enum, default_value = "return")]
    alphabet: Alphabet,
    /// Print the window as one word instead of `index<TAB>value` lines.
    #[arg(long)]
    word: bool,
}

#[derive(Args)]
struct PalindromeArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    /// Strength B > 1, as a decimal.
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 3)]
    j_max: usize,
    /// Also require B^{c'_j}/ℓ'_j ≤ κ/j.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 20_000)]
    node_limit: usize,
    /// Shuffle the digit order with this seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    sub: SubstitutionArgs,
    #[arg(long, allow_hyphen_values = true)]
    va: String,
    #[arg(long, allow_hyphen_values = true)]
    vb: String,
    /// `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 5)]
    depth: u32,
    /// Permit V(a) = V(b).
    #[arg(long)]
    allow_degenerate: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bab4,
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long, value_enum, default_value = "bab4")]
    family: Family,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 125)]
    m_max: usize,
    /// Directory for the s_m series files; defaults to the current directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Degenerate(_) | Error::NotAlmostPrimitive { .. }) => 3,
        Some(Error::RegimeForbidden { .. } | Error::RegimeMismatch(_) | Error::NonHyperbolic) => 3,
        Some(Error::BudgetExceeded { .. } | Error::Undetermined { .. } | Error::LetterOverflow | Error::NotFound { .. }) => 4,
        Some(_) => 2,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Generate(a) => generate(a),
        Command::Palindromes(a) => palindromes_cmd(a),
        Command::Index(a) => index(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Eigenvalue(a) => eigenvalue(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn ratio<T: std::fmt::Display>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn print_json(value: &impl Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            writeln!(std::io::stdout().lock(), "{text}")?;
            Ok(())
        }
    }
}

fn analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let s = args.sub.load_ap()?;
    let budget = Budget::DEFAULT;
    let profile = s.complexity_profile(args.n_max, budget)?;
    let index = repetition::index_b_bounds(&s, 6)?;
    let gordon = repetition::gordon_criterion(&s)?;
    let mut measures = Vec::new();
    for u in ["b", "a", "ba", "bb"] {
        let u = u.parse()?;
        match s.measure_cylinder(&u, args.measure_depth, budget) {
            Ok(m) => measures.push(json!({"word": u.to_string(), "depth": m.depth, "value": ratio(&m.value), "next": ratio(&m.next)})),
            Err(Error::IllegalWord(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let mut notes = vec![
        format!("complexity sampled from Toeplitz hosts up to n = {}", args.n_max),
        format!("measure samples are finite-depth frequencies at depth {}", args.measure_depth),
    ];
    if index.upper.is_none() {
        notes.push("index test still positive at n_max; upper bracket open".into());
    }
    let regime = palindromes::regime(&s)?;
    let report = json!({
        "schema": SCHEMA,
        "substitution": {"p": s.p(), "ks": s.ks(), "image_b": s.image(Letter::B).to_string()},
        "classification": s.classify(),
        "matrix": s.matrix().entries,
        "complexity": {
            "class": s.complexity_class(),
            "samples": profile.iter().enumerate().skip(1).map(|(n, c)| json!([n, c])).collect::<Vec<_>>(),
        },
        "palindromes": {"regime": regime},
        "index": {
            "exceeds": index.exceeds,
            "upper": index.upper,
            "witnessed": ratio(&index.witnessed),
            "bracket": index.to_string(),
        },
        "gordon": {
            "holds": gordon.holds,
            "witness": gordon.witness.as_ref().map(|w| w.to_string()),
            "return_word": gordon.y.as_ref().map(|y| y.to_string()),
        },
        "measures": measures,
        "notes": notes,
    });
    print_json(&report, args.out.as_deref())
}

fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| Error::InvalidInput(format!("range '{s}' must look like lo..hi")))?;
    let lo: i64 = lo.trim().parse().map_err(|_| Error::InvalidInput(format!("bad range start '{lo}'")))?;
    let hi: i64 = hi.trim().parse().map_err(|_| Error::InvalidInput(format!("bad range end '{hi}'")))?;
    if hi < lo {
        bail!(Error::InvalidInput(format!("empty range {lo}..{hi}")));
    }
    Ok((lo, hi))
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let s = args.sub.load_ap()?;
    let (lo, hi) = parse_range(&args.range)?;
    let address = match (&args.digits, args.fixedpoint) {
        (Some(d), false) => Address::Prefix(OdometerPrefix::new(s.r(), d.clone())?),
        (None, true) => {
            if args.twin && !s.is_type0() {
                bail!(Error::InvalidInput("--twin needs a type-0 substitution".into()));
            }
            let extension = if args.twin { ReturnLetter::finite(0) } else { ReturnLetter::INFINITY };
            Address::FixedPoint { shift: 0, extension }
        }
        _ => bail!(Error::InvalidInput("give exactly one of --digits or --fixedpoint".into())),
    };
    let budget = Budget::DEFAULT;
    let values: Vec<String> = match args.alphabet {
        Alphabet::Return => address.window(&s, lo, hi, budget)?.cells.iter().map(|c| c.map_or("?".to_string(), |k| k.to_string())).collect(),
        Alphabet::Ab => address.binary_window(&s, lo, hi, budget)?.iter().map(|l| l.render()).collect(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if args.word {
        let sep = if values.iter().all(|v| v.chars().count() == 1) { "" } else { " " };
        writeln!(out, "{}", values.join(sep))?;
    } else {
        for (i, v) in values.iter().enumerate() {
            writeln!(out, "{}\t{v}", lo + i as i64)?;
        }
    }
    Ok(())
}

fn palindromes_cmd(args: PalindromeArgs) -> anyhow::Result<()> {
    let s = args.sub.load_ap()?;
    let b = palindromes::parse_decimal(&args.b)?;
    let opts = StrongPrefixOptions {
        j_max: args.j_max,
        ratio_cap: args.kappa,
        max_depth: args.max_depth,
        node_limit: args.node_limit,
        seed: args.seed,
    };
    let found = palindromes::construct_strong_prefix(&s, &b, &opts)?;
    let entries: Vec<PalindromeReportEntry> = found.data.iter().map(PalindromeReportEntry::from).collect();
    eprintln!("address digits {}", found.prefix);
    writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&entries)?)?;
    Ok(())
}

fn index(args: IndexArgs) -> anyhow::Result<()> {
    let s = args.sub.load_ap()?;
    let bounds = repetition::index_b_bounds(&s, args.n_max)?;
    let verdicts = (1..=args.n_max).map(|n| repetition::index_b_exceeds(&s, n)).collect::<Result<Vec<_>, _>>()?;
    let report = json!({
        "schema": SCHEMA,
        "bracket": bounds.to_string(),
        "exceeds": bounds.exceeds,
        "upper": bounds.upper,
        "witnessed": ratio(&bounds.witnessed),
        "verdicts": verdicts,
    });
    print_json(&report, None)
}

fn parse_f64(name: &str, s: &str) -> anyhow::Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::InvalidInput(format!("{name}: '{s}' is not a number")))?;
    if !v.is_finite() {
        bail!(Error::InvalidInput(format!("{name} must be finite")));
    }
    Ok(v)
}

fn spectrum(args: SpectrumArgs) -> anyhow::Result<()> {
    let s = args.sub.load_ap()?;
    let cfg = CouplingConfig::new(parse_f64("--va", &args.va)?, parse_f64("--vb", &args.vb)?, args.allow_degenerate)?;
    let parts: Vec<&str> = args.grid.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        bail!(Error::InvalidInput(format!("grid '{}' must look like lo:hi:step", args.grid)));
    };
    let grid = spectral::grid(parse_f64("grid lo", lo)?, parse_f64("grid hi", hi)?, parse_f64("grid step", step)?)?;
    let est = spectral::spectrum_estimate(&s, &cfg, &grid, args.depth, Budget::DEFAULT)?;
    let mut csv = String::from("E,in_spectrum,trace_b_period,trace_a\n");
    for p in &est.points {
        csv.push_str(&format!("{},{},{},{}\n", p.e, p.in_spectrum, p.trace_b_period, p.trace_a));
    }
    match &args.out {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => write!(std::io::stdout().lock(), "{csv}")?,
    }
    eprintln!("heuristic: periodic-approximant estimate at depth {}", args.depth);
    Ok(())
}

fn eigenvalue(args: EigenArgs) -> anyhow::Result<()> {
    let Family::Bab4 = args.family;
    let s = Substitution::new(args.p, vec![1, 0, 0, 0, 0])?;
    if args.p <= 5 {
        bail!(Error::InvalidInput(format!("the decay argument needs p > 5 = |ϱ(b)|_b, got p = {}", args.p)));
    }
    let dir = args.out_dir.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let solutions = spectral::solve_switch_system(&s)?;
    if solutions.is_empty() {
        return Err(anyhow!(Error::NotFound { what: "switch solution".into(), depth: 0 }));
    }
    let mut reports = Vec::new();
    for (i, sol) in solutions.iter().enumerate() {
        let decay = spectral::eigenstate_decay(&s, sol, args.m_max)?;
        let path = dir.join(format!("s_m_p{}_solution{}.tsv", args.p, i + 1));
        let mut text = String::from("m\tell\tlog_s\n");
        for pt in &decay.series {
            text.push_str(&format!("{}\t{}\t{}\n", pt.m, pt.ell, pt.log_s));
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        reports.push(report_for(sol, &decay, &path));
    }
    let out = json!({"schema": SCHEMA, "family": "bab4", "p": args.p, "m_max": args.m_max, "solutions": reports});
    print_json(&out, None)
}

fn report_for(sol: &EigenSolution, decay: &spectral::DecayReport, path: &Path) -> serde_json::Value {
    json!({
        "x_a": sol.x_a,
        "x_b": sol.x_b,
        "mu": sol.mu,
        "residuals": sol.residuals,
        "decay_rate": decay.gamma,
        "m0": decay.m0,
        "switch_leakage": decay.switch_leakage,
        "s_m_series_path": path.display().to_string(),
    })
}
