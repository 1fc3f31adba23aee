//! Command-line front end: compute, simulate, influence, variance, compare.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use zenga::asymptotics::DEFAULT_DELTA_STEP;
use zenga::io::{write_kde_csv, write_qq_csv};
use zenga::montecarlo::run_study;
use zenga::{
    asymptotic_variance, confidence_interval, delta_variance, from_frequency_table,
    gini_empirical, gini_population, influence_profile, numeric_influence, parse_dist_spec,
    parse_frequency_csv, write_report, zenga_empirical, zenga_population, CountVector,
    DiscreteDistribution, HMode, InfluenceProfile, ReportFormat, RepresentativeRule, StudyConfig,
    ZengaDecomposition,
};

#[derive(Parser)]
#[command(
    name = "zenga",
    version,
    about = "Zenga inequality index on discrete income data: estimation, variance, influence, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Indices, Zenga curve, standard error and confidence interval
    Compute {
        #[command(flatten)]
        input: InputSource,
        /// Representative-point rule for frequency tables
        #[arg(long, value_enum, default_value_t = ReprArg::Midpoint)]
        repr: ReprArg,
        /// Confidence level for the interval
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Display indices multiplied by 100
        #[arg(long)]
        percent: bool,
    },
    /// Monte Carlo study: bias, RMSE, normality diagnostics, coverage
    Simulate {
        /// Distribution spec (TOML)
        #[arg(long)]
        dist: String,
        /// Comma-separated sample sizes
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        /// Replicates per size
        #[arg(long, default_value_t = 3000)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Confidence level for the coverage column
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        /// Study CSV destination ('-' for stdout)
        #[arg(long, default_value = "-")]
        out: String,
        /// Optional QQ-pair CSV for the largest size
        #[arg(long)]
        qq: Option<String>,
        /// Optional kernel-density CSV for the largest size
        #[arg(long)]
        kde: Option<String>,
    },
    /// Influence function at every support point
    Influence {
        /// Distribution spec (TOML)
        #[arg(long)]
        dist: String,
        /// Also evaluate the contamination difference quotient
        #[arg(long)]
        numeric: bool,
        /// Contamination mass for --numeric
        #[arg(long, requires = "numeric", default_value_t = 1e-6)]
        eps: f64,
    },
    /// Asymptotic variance of sqrt(n)(Zhat - Z) under the chosen path
    Variance {
        /// Distribution spec (TOML)
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Corrected)]
        mode: ModeArg,
    },
    /// Rank several frequency tables by Zenga and Gini
    Compare {
        /// Frequency-table CSV (repeat for each input)
        #[arg(long = "freq", required = true)]
        freqs: Vec<String>,
        /// Comma-separated labels, one per input (default: file names)
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = IndexArg::Both)]
        index: IndexArg,
        /// Display indices multiplied by 100
        #[arg(long)]
        percent: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputSource {
    /// Frequency-table CSV
    #[arg(long)]
    freq: Option<String>,
    /// Distribution spec (TOML)
    #[arg(long)]
    dist: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReprArg {
    Midpoint,
    Custom,
}

impl From<ReprArg> for RepresentativeRule {
    fn from(r: ReprArg) -> Self {
        match r {
            ReprArg::Midpoint => RepresentativeRule::Midpoint,
            ReprArg::Custom => RepresentativeRule::Custom,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Literal,
    Corrected,
    Delta,
    If,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexArg {
    Zenga,
    Gini,
    Both,
}

enum CliError {
    /// Bad flags or malformed/invalid input: exit code 2.
    Usage(String),
    /// Environment failures (e.g. unwritable output): exit code 1.
    Internal(String),
}

impl From<zenga::Error> for CliError {
    fn from(e: zenga::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {path}: {e}")))
    }
}

fn write_output(path: &str, content: &str) -> CliResult<()> {
    if path == "-" {
        print!("{content}");
        Ok(())
    } else {
        std::fs::write(path, content)
            .map_err(|e| CliError::Internal(format!("writing {path}: {e}")))
    }
}

fn load_distribution(path: &str) -> CliResult<DiscreteDistribution> {
    let spec = parse_dist_spec(&read_input(path)?)?;
    Ok(spec.to_distribution()?)
}

fn load_table_points(
    path: &str,
    rule: RepresentativeRule,
) -> CliResult<(Vec<f64>, CountVector)> {
    let table = parse_frequency_csv(&read_input(path)?)?;
    Ok(from_frequency_table(&table, rule)?)
}

fn scaled(x: f64, percent: bool) -> f64 {
    if percent {
        100.0 * x
    } else {
        x
    }
}

fn print_curve(decomposition: &ZengaDecomposition) {
    println!("zenga curve:");
    println!("  cut  weight  lower_mean  upper_mean  ratio  curve");
    for t in &decomposition.terms {
        println!(
            "  {}  {}  {}  {}  {}  {}",
            t.cut,
            t.weight,
            t.lower_mean,
            t.upper_mean,
            t.ratio,
            t.curve_point()
        );
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compute {
            input,
            repr,
            level,
            percent,
        } => compute(input, repr.into(), level, percent),
        Command::Simulate {
            dist,
            sizes,
            reps,
            seed,
            level,
            out,
            qq,
            kde,
        } => simulate(&dist, sizes, reps, seed, level, &out, qq, kde),
        Command::Influence { dist, numeric, eps } => influence(&dist, numeric, eps),
        Command::Variance { dist, mode } => variance(&dist, mode),
        Command::Compare {
            freqs,
            labels,
            index,
            percent,
        } => compare(&freqs, labels, index, percent),
    }
}

fn compute(
    input: InputSource,
    rule: RepresentativeRule,
    level: f64,
    percent: bool,
) -> CliResult<()> {
    if let Some(path) = input.freq {
        let (support, counts) = load_table_points(&path, rule)?;
        let z = zenga_empirical(&counts, &support)?;
        let g = gini_empirical(&counts, &support)?;
        let report = confidence_interval(&counts, &support, level)?;
        println!("points: {}", support.len());
        println!("n: {}", counts.total());
        println!("zenga: {}", scaled(z.index, percent));
        println!("gini: {}", scaled(g, percent));
        println!("se: {}", scaled(report.standard_error(), percent));
        println!(
            "ci({level}): [{}, {}]",
            scaled(report.ci_low, percent),
            scaled(report.ci_high, percent)
        );
        print_curve(&z);
    } else {
        let path = input.dist.expect("clap enforces one input");
        let dist = load_distribution(&path)?;
        let z = zenga_population(&dist);
        let g = gini_population(&dist);
        println!("points: {}", dist.len());
        println!("mean: {}", dist.mean());
        println!("zenga: {}", scaled(z.index, percent));
        println!("gini: {}", scaled(g, percent));
        // no sample size here: report the limit sd of sqrt(n)(Zhat - Z)
        println!(
            "sigma: {}",
            asymptotic_variance(&dist, HMode::Corrected).sqrt()
        );
        print_curve(&z);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    dist_path: &str,
    sizes: Vec<u64>,
    reps: u32,
    seed: u64,
    level: f64,
    out: &str,
    qq: Option<String>,
    kde: Option<String>,
) -> CliResult<()> {
    let config = StudyConfig {
        dist: load_distribution(dist_path)?,
        sizes,
        replicates: reps,
        seed,
        level,
    };
    config.validate()?;
    let report = run_study(&config)?;
    write_output(out, &write_report(&report, ReportFormat::Csv)?)?;
    if let Some(path) = qq {
        write_output(&path, &write_qq_csv(&report))?;
    }
    if let Some(path) = kde {
        write_output(&path, &write_kde_csv(&report))?;
    }
    Ok(())
}

fn influence(dist_path: &str, numeric: bool, eps: f64) -> CliResult<()> {
    let dist = load_distribution(dist_path)?;
    let profile: InfluenceProfile = influence_profile(&dist);
    if numeric {
        println!("value  influence  numeric(eps={eps})");
        let mut max_dev: f64 = 0.0;
        for (k, p) in profile.points.iter().enumerate() {
            let oracle = numeric_influence(&dist, k, eps)?;
            max_dev = max_dev.max((oracle - p.influence).abs());
            println!("{}  {}  {}", p.value, p.influence, oracle);
        }
        println!("if_variance: {}", profile.if_variance);
        println!("max_abs_deviation: {max_dev}");
    } else {
        println!("value  influence");
        for p in &profile.points {
            println!("{}  {}", p.value, p.influence);
        }
        println!("if_variance: {}", profile.if_variance);
    }
    Ok(())
}

fn variance(dist_path: &str, mode: ModeArg) -> CliResult<()> {
    let dist = load_distribution(dist_path)?;
    match mode {
        ModeArg::Literal => println!(
            "literal: {}",
            asymptotic_variance(&dist, HMode::Literal)
        ),
        ModeArg::Corrected => println!(
            "corrected: {}",
            asymptotic_variance(&dist, HMode::Corrected)
        ),
        ModeArg::Delta => println!(
            "delta: {}",
            delta_variance(&dist, DEFAULT_DELTA_STEP)?
        ),
        ModeArg::If => println!("if: {}", influence_profile(&dist).if_variance),
        ModeArg::All => {
            let literal = asymptotic_variance(&dist, HMode::Literal);
            let corrected = asymptotic_variance(&dist, HMode::Corrected);
            let delta = delta_variance(&dist, DEFAULT_DELTA_STEP)?;
            let iff = influence_profile(&dist).if_variance;
            println!("literal: {literal}");
            println!("corrected: {corrected}");
            println!("delta: {delta}");
            println!("if: {iff}");
            let rel = |a: f64, b: f64| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            };
            println!("rel_diff(corrected,delta): {}", rel(corrected, delta));
            println!("rel_diff(corrected,if): {}", rel(corrected, iff));
            println!("rel_diff(literal,corrected): {}", rel(literal, corrected));
            if rel(literal, corrected) > 0.1 {
                println!(
                    "note: the literal weighting disagrees with the corrected one by a factor of {:.2}; \
                     the corrected value is the one confirmed by the delta-method and influence-function routes",
                    if corrected > 0.0 { literal / corrected } else { f64::INFINITY }
                );
            }
        }
    }
    Ok(())
}

fn compare(
    freqs: &[String],
    labels: Option<Vec<String>>,
    index: IndexArg,
    percent: bool,
) -> CliResult<()> {
    if freqs.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least 2 --freq inputs, got {}",
            freqs.len()
        )));
    }
    let labels = match labels {
        Some(l) => {
            if l.len() != freqs.len() {
                return Err(CliError::Usage(format!(
                    "{} labels for {} inputs",
                    l.len(),
                    freqs.len()
                )));
            }
            l
        }
        None => freqs.to_vec(),
    };
    let mut zengas = Vec::with_capacity(freqs.len());
    let mut ginis = Vec::with_capacity(freqs.len());
    for path in freqs {
        let (support, counts) = load_table_points(path, RepresentativeRule::Midpoint)?;
        zengas.push(zenga_empirical(&counts, &support)?.index);
        ginis.push(gini_empirical(&counts, &support)?);
    }
    // rank 1 = least unequal
    let ranks = |xs: &[f64]| -> Vec<usize> {
        xs.iter()
            .map(|x| 1 + xs.iter().filter(|y| *y < x).count())
            .collect()
    };
    let rz = ranks(&zengas);
    let rg = ranks(&ginis);

    match index {
        IndexArg::Zenga => {
            println!("label  zenga  rank");
            for i in 0..freqs.len() {
                println!("{}  {}  {}", labels[i], scaled(zengas[i], percent), rz[i]);
            }
        }
        IndexArg::Gini => {
            println!("label  gini  rank");
            for i in 0..freqs.len() {
                println!("{}  {}  {}", labels[i], scaled(ginis[i], percent), rg[i]);
            }
        }
        IndexArg::Both => {
            println!("label  zenga  gini  rank_zenga  rank_gini");
            for i in 0..freqs.len() {
                println!(
                    "{}  {}  {}  {}  {}",
                    labels[i],
                    scaled(zengas[i], percent),
                    scaled(ginis[i], percent),
                    rz[i],
                    rg[i]
                );
            }
            if rz == rg {
                println!("orderings agree");
            } else {
                println!("orderings differ between the indices");
            }
        }
    }
    for (name, r) in [("zenga", &rz), ("gini", &rg)] {
        if matches!(
            (index, name),
            (IndexArg::Zenga, "gini") | (IndexArg::Gini, "zenga")
        ) {
            continue;
        }
        for i in 0..r.len() {
            for j in (i + 1)..r.len() {
                if r[i] == r[j] {
                    println!("tie under {name}: {} and {}", labels[i], labels[j]);
                }
            }
        }
    }
    Ok(())
}
