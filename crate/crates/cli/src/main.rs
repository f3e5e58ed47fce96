use std::fmt::Display;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gaussmap::cache::{stable_rank_cached, ResultsCache, CACHE_ENV};
use gaussmap::cover::default_precision;
use gaussmap::table::{table_row, CSV_HEADER};
use gaussmap::witness::{witness, WitnessReport};
use gaussmap::{
    enumerate_galois, GaloisFamilyClass, GaussianError, MonodromyDatum, MonodromyError,
    PrecisionPolicy, RankReport, Rational,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "gaussmap",
    version,
    about = "Exact Gaussian-map ranks for cyclic covers of the line"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Append-only results cache (one JSON record per line).
    #[arg(long, env = CACHE_ENV, global = true)]
    cache: Option<PathBuf>,

    /// Refuse genera above this.
    #[arg(long, default_value_t = 30, global = true)]
    max_genus: u32,

    /// Refuse series precisions above this.
    #[arg(long, default_value_t = 600, global = true)]
    max_precision: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct PrecisionArgs {
    /// Fixed series precision.
    #[arg(long, conflicts_with = "escalate")]
    prec: Option<usize>,

    /// Escalating precision `start:factor:max`.
    #[arg(long, value_parser = parse_escalate)]
    escalate: Option<PrecisionPolicy>,
}

impl PrecisionArgs {
    fn policy(&self) -> Option<PrecisionPolicy> {
        self.escalate.or(self.prec.map(PrecisionPolicy::Fixed))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank of mu_2 for one monodromy datum, e.g. "m=4;a=1^2,3^2,2^2".
    Rank {
        monodromy: String,
        /// Comma-separated rationals, first one 0, for the normalized datum.
        #[arg(long, allow_hyphen_values = true)]
        branch_points: Option<String>,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
    /// Table rows for a genus range such as 5..8.
    Table {
        range: String,
        #[arg(long, default_value_t = 1)]
        gprime: u32,
        #[command(flatten)]
        precision: PrecisionArgs,
    },
    /// Galois classes of the (g, g') locus.
    Enumerate { g: u32, gprime: u32 },
    /// Invariant quadric with nonvanishing mu_2 image on a Galois family.
    Witness {
        g: u32,
        gprime: u32,
        /// Index into the class list printed by `enumerate`.
        #[arg(long, default_value_t = 0)]
        class: usize,
        #[arg(long)]
        prec: Option<usize>,
    },
    /// Checks a monodromy datum and prints its invariants.
    Validate { monodromy: String },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Resource(m) => f.write_str(m),
        }
    }
}

fn gaussian_err(e: GaussianError) -> CliError {
    match e {
        GaussianError::Cover(_) | GaussianError::Monodromy(_) => CliError::Domain(e.to_string()),
        e => CliError::Domain(format!("gaussian: {e}")),
    }
}

fn monodromy_err(e: MonodromyError) -> CliError {
    match e {
        MonodromyError::Parse { .. } => CliError::Usage(format!("monodromy: {e}")),
        e => CliError::Domain(format!("monodromy: {e}")),
    }
}

fn parse_escalate(s: &str) -> Result<PrecisionPolicy, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, factor, max] = parts[..] else {
        return Err(format!("expected start:factor:max, got '{s}'"));
    };
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("not a number: '{x}'"))
    };
    let (start, factor, max) = (num(start)?, num(factor)?, num(max)?);
    if factor < 2 || start == 0 || max < start {
        return Err("need start >= 1, factor >= 2 and max >= start".into());
    }
    Ok(PrecisionPolicy::Escalate { start, factor, max })
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, CliError> {
    let bad = || CliError::Usage(format!("bad genus range '{s}' (expected e.g. 5..8)"));
    let num = |x: &str| x.trim().parse::<u32>().map_err(|_| bad());
    let range = match s.split_once("..") {
        Some((lo, hi)) => num(lo)?..=num(hi.trim_start_matches('='))?,
        None => num(s)?..=num(s)?,
    };
    if range.is_empty() {
        return Err(bad());
    }
    Ok(range)
}

fn parse_branch_points(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .enumerate()
        .map(|(i, x)| {
            x.trim().parse::<Rational>().map_err(|_| {
                CliError::Usage(format!(
                    "branch point {}: not a rational: '{}'",
                    i + 1,
                    x.trim()
                ))
            })
        })
        .collect()
}

fn parse_datum(s: &str) -> Result<MonodromyDatum, CliError> {
    s.parse::<MonodromyDatum>().map_err(monodromy_err)
}

struct Limits {
    max_genus: u32,
    max_precision: usize,
}

impl Limits {
    fn genus(&self, g: u32) -> Result<(), CliError> {
        if g > self.max_genus {
            return Err(CliError::Resource(format!(
                "genus {g} exceeds the cap {} (raise it with --max-genus)",
                self.max_genus
            )));
        }
        Ok(())
    }

    fn precision(&self, p: usize) -> Result<(), CliError> {
        if p > self.max_precision {
            return Err(CliError::Resource(format!(
                "precision {p} exceeds the cap {} (raise it with --max-precision)",
                self.max_precision
            )));
        }
        Ok(())
    }
}

fn open_cache(path: Option<&PathBuf>) -> Result<Option<ResultsCache>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let cache = ResultsCache::open(path)
        .map_err(|e| CliError::Domain(format!("cache {}: {e}", path.display())))?;
    if cache.skipped() > 0 {
        log::warn!(
            "{} corrupt cache lines skipped in {}",
            cache.skipped(),
            path.display()
        );
    }
    Ok(Some(cache))
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records serialize")
}

fn no_csv(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::Usage(format!(
            "csv output is not available for `{command}`"
        )));
    }
    Ok(())
}

fn rank_text(r: &RankReport) -> String {
    let rank = if r.saturated {
        format!("{} (exact, injective)", r.mu2_rank_lower_bound)
    } else {
        format!(">= {}", r.mu2_rank_lower_bound)
    };
    let levels: Vec<String> = r.levels.iter().map(|(p, k)| format!("{p}:{k}")).collect();
    format!(
        "datum          {}\n\
         branch points  {}\n\
         genus          {}\n\
         precision      {} (levels {})\n\
         mult rank      {}{}\n\
         dim I2         {}\n\
         rank mu2       {}\n\
         stable         {}",
        r.datum,
        r.branch_points.join(","),
        r.genus,
        r.precision_used,
        levels.join(" "),
        r.mult_rank,
        if r.kernel_certified {
            " (certified)"
        } else {
            " (not certified)"
        },
        r.i2_dim,
        rank,
        r.stable
    )
}

fn cmd_rank(
    cli: &Cli,
    limits: &Limits,
    monodromy: &str,
    branch_points: Option<&str>,
    precision: &PrecisionArgs,
) -> Result<(), CliError> {
    no_csv(cli.format, "rank")?;
    let given = parse_datum(monodromy)?;
    let violations = given.validate();
    if !violations.is_empty() {
        return Err(monodromy_err(MonodromyError::Invalid(violations)));
    }
    let genus = given.genus().map_err(monodromy_err)?;
    limits.genus(genus)?;
    let d = given.normalize().map_err(monodromy_err)?;
    if d != given {
        log::info!("normalized {given} to {d}");
    }
    let t = match branch_points {
        Some(s) => parse_branch_points(s)?,
        None => gaussmap::default_branch_points(d.r()),
    };
    let policy = precision
        .policy()
        .unwrap_or(PrecisionPolicy::Fixed(default_precision(genus)));
    limits.precision(policy.max_precision())?;
    let cache = open_cache(cli.cache.as_ref())?;
    let report = stable_rank_cached(cache.as_ref(), &d, &t, policy).map_err(gaussian_err)?;
    match cli.format {
        Format::Json => println!("{}", json_line(&report)),
        _ => println!("{}", rank_text(&report)),
    }
    Ok(())
}

fn cmd_table(
    cli: &Cli,
    limits: &Limits,
    range: &str,
    gprime: u32,
    precision: &PrecisionArgs,
) -> Result<(), CliError> {
    let range = parse_range(range)?;
    limits.genus(*range.end())?;
    let policy = precision.policy();
    let top = policy.map_or(default_precision(*range.end()), |p| p.max_precision());
    limits.precision(top)?;
    let cache = open_cache(cli.cache.as_ref())?;

    let genera: Vec<u32> = range.collect();
    let rows: Vec<_> = genera
        .par_iter()
        .map(|&g| {
            log::info!("table row g = {g}");
            table_row(g, gprime, policy, cache.as_ref()).map_err(|e| gaussian_err(e).to_string())
        })
        .collect();

    match cli.format {
        Format::Csv => println!("{CSV_HEADER}"),
        Format::Text => println!("  g  monodromy          rank   max"),
        Format::Json => {}
    }
    let mut failures = 0;
    for (g, row) in genera.iter().zip(&rows) {
        match (row, cli.format) {
            (Ok((row, _)), Format::Csv) => println!("{}", row.to_csv()),
            (Ok((row, _)), Format::Json) => println!("{}", json_line(row)),
            (Ok((row, _)), Format::Text) => println!("{row}"),
            (Err(e), Format::Csv) => println!("# g={g}: {e}"),
            (Err(e), Format::Json) => println!("{}", json!({ "genus": g, "error": e })),
            (Err(e), Format::Text) => println!("{g:>3}  error: {e}"),
        }
        failures += usize::from(row.is_err());
    }
    if failures > 0 {
        return Err(CliError::Domain(format!(
            "{failures} of {} rows failed",
            genera.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassRecord<'a> {
    index: usize,
    monodromy: String,
    datum: String,
    #[serde(flatten)]
    class: &'a GaloisFamilyClass,
    eigenspace_dimensions: Vec<u32>,
}

fn cmd_enumerate(cli: &Cli, g: u32, gprime: u32) -> Result<(), CliError> {
    let classes = enumerate_galois(g, gprime).map_err(monodromy_err)?;
    if cli.format == Format::Csv {
        println!("index,monodromy,s1,s3,r2,eigenspace_dimensions");
    }
    for (index, class) in classes.iter().enumerate() {
        let rep = &class.representative;
        let rec = ClassRecord {
            index,
            monodromy: rep.shorthand(),
            datum: rep.to_string(),
            class,
            eigenspace_dimensions: rep.eigenspace_dimensions(),
        };
        let dims: Vec<String> = rec
            .eigenspace_dimensions
            .iter()
            .map(u32::to_string)
            .collect();
        match cli.format {
            Format::Json => println!("{}", json_line(&rec)),
            Format::Csv => println!(
                "{index},{},{},{},{},{}",
                rec.monodromy,
                class.s1,
                class.s3,
                class.r2,
                dims.join(" ")
            ),
            Format::Text => println!(
                "{index}  {:<18} s1={} s3={} r2={}  dims {}",
                rec.monodromy,
                class.s1,
                class.s3,
                class.r2,
                dims.join(",")
            ),
        }
    }
    Ok(())
}

fn witness_text(w: &WitnessReport) -> String {
    let mut out = format!(
        "family         g={} g'={} {}\ndims           {:?}\nprecision      {}",
        w.g,
        w.gprime,
        w.class.representative.shorthand(),
        w.eigenspace_dimensions,
        w.precision
    );
    for q in &w.quadrics {
        out.push_str(&format!(
            "\nquadric        {}\n  in I2        {}\n  character    {:?} (invariant: {})\n  mu2 image    {}",
            q.quadric,
            q.membership_verified,
            q.character,
            q.full_group_invariant,
            match (&q.vanishing_order, &q.leading_coefficient) {
                (Some(k), Some(c)) => format!("{c} y^{k} + ..."),
                _ => format!("zero to precision {}", q.precision),
            }
        ));
    }
    out
}

fn cmd_witness(
    cli: &Cli,
    limits: &Limits,
    g: u32,
    gprime: u32,
    class: usize,
    prec: Option<usize>,
) -> Result<(), CliError> {
    no_csv(cli.format, "witness")?;
    limits.genus(g)?;
    if let Some(p) = prec {
        limits.precision(p)?;
    }
    let report = witness(g, gprime, class, prec, limits.max_precision).map_err(gaussian_err)?;
    match cli.format {
        Format::Json => println!("{}", json_line(&report)),
        _ => println!("{}", witness_text(&report)),
    }
    if report.invariant_witness().is_none() {
        log::warn!("no full-group invariant quadric with nonzero image at this precision");
    }
    Ok(())
}

fn cmd_validate(cli: &Cli, monodromy: &str) -> Result<(), CliError> {
    no_csv(cli.format, "validate")?;
    let d = parse_datum(monodromy)?;
    let violations: Vec<String> = d.validate().iter().map(ToString::to_string).collect();
    let genus = if violations.is_empty() {
        d.genus().ok()
    } else {
        None
    };
    let dims = genus.map(|_| d.eigenspace_dimensions());
    let normalized = genus
        .and_then(|_| d.normalize().ok())
        .map(|n| n.to_string());
    match cli.format {
        Format::Json => println!(
            "{}",
            json!({
                "datum": d.to_string(),
                "valid": genus.is_some(),
                "violations": violations,
                "genus": genus,
                "eigenspace_dimensions": dims,
                "normalized": normalized,
            })
        ),
        _ => {
            println!("datum          {d}");
            match (genus, &dims) {
                (Some(g), Some(dims)) => {
                    println!("valid          yes");
                    println!("genus          {g}");
                    println!("dims           {dims:?}");
                    println!(
                        "normalized     {}",
                        normalized.as_deref().unwrap_or("(no unit residue)")
                    );
                }
                _ => {
                    println!("valid          no");
                    for v in &violations {
                        println!("  {v}");
                    }
                }
            }
        }
    }
    if genus.is_none() {
        let why = if violations.is_empty() {
            d.genus().err().map(|e| e.to_string()).unwrap_or_default()
        } else {
            violations.join("; ")
        };
        return Err(CliError::Domain(format!("monodromy: invalid datum: {why}")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let limits = Limits {
        max_genus: cli.max_genus,
        max_precision: cli.max_precision,
    };
    match &cli.command {
        Command::Rank {
            monodromy,
            branch_points,
            precision,
        } => cmd_rank(cli, &limits, monodromy, branch_points.as_deref(), precision),
        Command::Table {
            range,
            gprime,
            precision,
        } => cmd_table(cli, &limits, range, *gprime, precision),
        Command::Enumerate { g, gprime } => cmd_enumerate(cli, *g, *gprime),
        Command::Witness {
            g,
            gprime,
            class,
            prec,
        } => cmd_witness(cli, &limits, *g, *gprime, *class, *prec),
        Command::Validate { monodromy } => cmd_validate(cli, monodromy),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussmap::CoverError;

    #[test]
    fn escalate_syntax() {
        assert_eq!(
            parse_escalate("50:2:400").unwrap(),
            PrecisionPolicy::Escalate {
                start: 50,
                factor: 2,
                max: 400
            }
        );
        assert!(parse_escalate("50:1:400").is_err());
        assert!(parse_escalate("50:2").is_err());
    }

    #[test]
    fn genus_ranges() {
        assert_eq!(parse_range("5..8").unwrap(), 5..=8);
        assert_eq!(parse_range("5..=8").unwrap(), 5..=8);
        assert_eq!(parse_range("9").unwrap(), 9..=9);
        assert!(parse_range("8..5").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn branch_point_lists() {
        let t = parse_branch_points("0, 1/2,-3").unwrap();
        assert_eq!(t[1], Rational::from((1, 2)));
        assert!(matches!(
            parse_branch_points("0,x"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn cover_errors_keep_their_origin() {
        let e = gaussian_err(GaussianError::Cover(CoverError::NotNormalized));
        assert!(e.to_string().starts_with("cover: "), "{e}");
        assert_eq!(e.code(), 1);
    }
}
