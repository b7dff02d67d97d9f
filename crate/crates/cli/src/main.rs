use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chebytower::cache::{Cache, Provenance};
use chebytower::coeffs::{coeff_from_invariants, coeffs_backsub, coeffs_level_recursion, span, MAX_LEVEL};
use chebytower::format::{grouped_json, poly_csv, poly_text, table_csv, table_text, PolyJson, TableJson};
use chebytower::invariants::{first_valid_level, invariants_recursive, invariants_vandermonde_table, InvariantTable};
use chebytower::numeric::{format_int, format_rational};
use chebytower::polyseq::gen_p;
use chebytower::trees::{count, enumerate, grouped_weights, weight};
use chebytower::verify::{self, VerifyConfig};
use chebytower::{Error, Limits};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

#[derive(Parser)]
#[command(name = "chebytower", version, about = "Exact computations on the tower p_0 = x^2 - 2, p_n = p_{n-1}^2 - 2")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Largest allowed log2 of a polynomial degree.
    #[arg(long, global = true, env = "CHEBYTOWER_MAX_DEGREE_LOG2", default_value_t = Limits::default().max_degree_log2)]
    max_degree_log2: u32,
    /// Largest number of trees an enumeration may produce.
    #[arg(long, global = true, env = "CHEBYTOWER_MAX_TREES", default_value_t = Limits::default().max_trees)]
    max_trees: u64,
    /// Invariant cache directory.
    #[arg(long, global = true, env = "CHEBYTOWER_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

impl Global {
    fn limits(&self) -> Limits {
        Limits { max_degree_log2: self.max_degree_log2, max_trees: self.max_trees }
    }

    fn cache(&self) -> Cache {
        let dir = self.cache_dir.clone().unwrap_or_else(|| {
            let base = std::env::var_os("XDG_CACHE_HOME")
                .map(PathBuf::from)
                .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
                .unwrap_or_else(|| PathBuf::from("."));
            base.join("chebytower")
        });
        Cache::new(dir)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffMethod {
    Square,
    Backsub,
    Lemma,
    Invariant,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InvMethod {
    Recursive,
    Vandermonde,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeMode {
    Count,
    List,
    Weights,
    Grouped,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print p_n.
    Poly {
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        header: bool,
    },
    /// Print c_{n,2k}, the coefficient of x^(2k) in p_n.
    Coeff {
        n: u32,
        k: u64,
        #[arg(long, value_enum, default_value_t = CoeffMethod::Lemma)]
        method: CoeffMethod,
        /// Run every applicable method and check they agree.
        #[arg(long)]
        all_methods: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Print the invariant table a_{j,k} for k <= kmax.
    Invariants {
        kmax: u64,
        #[arg(long, value_enum, default_value_t = InvMethod::Recursive)]
        method: InvMethod,
        #[arg(long, value_enum, default_value_t = Switch::Off)]
        cache: Switch,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        header: bool,
        /// Append decimal approximations in text output.
        #[arg(long)]
        approx: bool,
    },
    /// Labeled ordered trees with root label k.
    Trees {
        k: u64,
        #[arg(value_enum, default_value_t = TreeMode::Count)]
        mode: TreeMode,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Run the cross-validation suite.
    Verify {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 8)]
        k_max: u64,
        #[arg(long, env = "CHEBYTOWER_PRECISION", default_value_t = 256)]
        precision: u32,
        /// Random angles per level for the trigonometric residual.
        #[arg(long, default_value_t = 8)]
        angles: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Manage the invariant cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Print the cache directory.
    Path,
    /// Delete all cache files.
    Clear,
    /// Compute and store the table for kmax.
    Save { kmax: u64 },
    /// Load and revalidate the table for kmax.
    Load {
        kmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Inconsistent(_) | Error::Disagreement(_) => 3,
            Error::DegreeGuard { .. } | Error::EnumerationGuard { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

fn disagreement(msg: String) -> Failure {
    Failure { code: 3, message: msg }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Out {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Poly { n, format, header } => cmd_poly(*n, *format, *header, &g.limits()),
        Cmd::Coeff { n, k, method, all_methods, format } => {
            cmd_coeff(*n, *k, *method, *all_methods, *format, &g.limits())
        }
        Cmd::Invariants { kmax, method, cache, format, header, approx } => {
            let table = invariant_table(g, *kmax, *method, *cache)?;
            Ok(render_table(&table, *format, *header, *approx)?)
        }
        Cmd::Trees { k, mode, format } => cmd_trees(*k, *mode, *format, &g.limits()),
        Cmd::Verify { n_max, k_max, precision, angles, seed, format } => {
            let cfg = VerifyConfig {
                n_max: *n_max,
                k_max: *k_max,
                precision_bits: *precision,
                angles: *angles,
                seed: *seed,
                limits: g.limits(),
            };
            let report = verify::run(&cfg);
            let text = match format {
                ReportFormat::Text => report.to_string(),
                ReportFormat::Json => serde_json::to_string_pretty(&report)?,
            };
            if report.all_passed() {
                Ok(text)
            } else {
                println!("{text}");
                Err(disagreement(format!("{} check(s) failed", report.failures().count())))
            }
        }
        Cmd::Cache { action } => cmd_cache(g, action),
    }
}

fn cmd_poly(n: u32, format: Format, header: bool, limits: &Limits) -> Out {
    let p = gen_p(n, limits)?;
    Ok(match format {
        Format::Text => poly_text(&p),
        Format::Json => serde_json::to_string(&PolyJson::new(n, &p))?,
        Format::Csv => poly_csv(&p, header),
    })
}

fn coeff_by(method: CoeffMethod, n: u32, k: u64, limits: &Limits) -> Result<BigInt, Error> {
    match method {
        CoeffMethod::Square => {
            let p = gen_p(n, limits)?;
            Ok(p.coeffs().get(k as usize).cloned().unwrap_or_default())
        }
        CoeffMethod::Backsub => Ok(coeffs_backsub(n, limits)?.values[k as usize].clone()),
        CoeffMethod::Lemma => Ok(coeffs_level_recursion(n, k)?.values[k as usize].clone()),
        CoeffMethod::Invariant => {
            if k == 0 {
                return Err(Error::Domain("the invariant method needs k >= 1".into()));
            }
            let n0 = first_valid_level(k);
            if n < n0 {
                return Err(Error::Domain(format!("the invariant method needs n >= {n0} for k = {k}")));
            }
            coeff_from_invariants(n, k, &invariants_recursive(k)?)
        }
    }
}

fn method_name(m: CoeffMethod) -> &'static str {
    match m {
        CoeffMethod::Square => "square",
        CoeffMethod::Backsub => "backsub",
        CoeffMethod::Lemma => "lemma",
        CoeffMethod::Invariant => "invariant",
    }
}

fn cmd_coeff(n: u32, k: u64, method: CoeffMethod, all: bool, format: ReportFormat, limits: &Limits) -> Out {
    if n > MAX_LEVEL || k > span(n) {
        return Err(Error::Domain(format!("k = {k} is out of range for n = {n} (need k <= 2^n)")).into());
    }
    if !all {
        let v = coeff_by(method, n, k, limits)?;
        return Ok(match format {
            ReportFormat::Text => format!("c_({n},{}) = {v} [{}]", 2 * k, method_name(method)),
            ReportFormat::Json => serde_json::to_string(&json!({
                "n": n, "k": k, "method": method_name(method), "value": format_int(&v),
            }))?,
        });
    }
    let methods = [CoeffMethod::Square, CoeffMethod::Backsub, CoeffMethod::Lemma, CoeffMethod::Invariant];
    let mut values: Vec<(&str, BigInt)> = Vec::new();
    let mut skipped: Vec<(&str, String)> = Vec::new();
    for m in methods {
        match coeff_by(m, n, k, limits) {
            Ok(v) => values.push((method_name(m), v)),
            Err(e @ (Error::Domain(_) | Error::DegreeGuard { .. })) => skipped.push((method_name(m), e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    if values.is_empty() {
        return Err(Error::Domain("no method applies".into()).into());
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    let text = match format {
        ReportFormat::Text => {
            let mut s = String::new();
            for (m, v) in &values {
                s.push_str(&format!("{m}: {v}\n"));
            }
            for (m, why) in &skipped {
                s.push_str(&format!("{m}: skipped ({why})\n"));
            }
            s.push_str(&format!("agree: {agree}\n"));
            s
        }
        ReportFormat::Json => {
            let vals: serde_json::Map<String, serde_json::Value> =
                values.iter().map(|(m, v)| (m.to_string(), json!(format_int(v)))).collect();
            let sk: serde_json::Map<String, serde_json::Value> =
                skipped.iter().map(|(m, why)| (m.to_string(), json!(why))).collect();
            serde_json::to_string(&json!({"n": n, "k": k, "values": vals, "skipped": sk, "agree": agree}))?
        }
    };
    if agree {
        Ok(text)
    } else {
        print!("{text}");
        Err(disagreement(format!("methods disagree on c_({n},{})", 2 * k)))
    }
}

fn invariant_table(g: &Global, kmax: u64, method: InvMethod, cache: Switch) -> Result<InvariantTable, Failure> {
    if kmax == 0 {
        return Err(Error::Domain("kmax must be >= 1".into()).into());
    }
    let primary = match (method, cache) {
        (InvMethod::Vandermonde, _) => invariants_vandermonde_table(kmax)?,
        (_, Switch::On) => {
            let (t, prov) = g.cache().get_or_compute(kmax)?;
            if prov == (Provenance::Computed { rejected: true }) {
                eprintln!("warning: cache file for kmax={kmax} failed validation and was recomputed");
            }
            t
        }
        (_, Switch::Off) => invariants_recursive(kmax)?,
    };
    if method == InvMethod::Both {
        let other = invariants_vandermonde_table(kmax)?;
        if let Some((j, k)) = primary.first_difference(&other) {
            return Err(disagreement(format!(
                "recursive and Vandermonde routes differ first at (j,k) = ({j},{k}): {} vs {}",
                format_rational(primary.get(j, k)),
                format_rational(other.get(j, k))
            )));
        }
    }
    if method == InvMethod::Vandermonde && cache == Switch::On {
        g.cache().save(&primary)?;
    }
    Ok(primary)
}

fn render_table(t: &InvariantTable, format: Format, header: bool, approx: bool) -> Out {
    Ok(match format {
        Format::Text => table_text(t, approx),
        Format::Json => serde_json::to_string(&TableJson::from(t))?,
        Format::Csv => table_csv(t, header),
    })
}

fn cmd_trees(k: u64, mode: TreeMode, format: ReportFormat, limits: &Limits) -> Out {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()).into());
    }
    let json = matches!(format, ReportFormat::Json);
    Ok(match mode {
        TreeMode::Count => {
            let c = count(k)?;
            if json {
                serde_json::to_string(&json!({"k": k, "count": format_int(&c)}))?
            } else {
                c.to_string()
            }
        }
        TreeMode::List => {
            let trees = enumerate(k, limits)?;
            if json {
                serde_json::to_string(&trees.iter().map(|t| t.to_json()).collect::<Vec<_>>())?
            } else {
                trees.iter().map(|t| format!("{t}\n")).collect()
            }
        }
        TreeMode::Weights => {
            let trees = enumerate(k, limits)?;
            if json {
                let rows: Vec<_> = trees
                    .iter()
                    .map(|t| {
                        json!({"tree": t.to_string(), "monomial": t.monomial().to_string(),
                               "weight": format_rational(&weight(t))})
                    })
                    .collect();
                serde_json::to_string(&rows)?
            } else {
                trees.iter().map(|t| format!("{t}  {}  {}\n", t.monomial(), format_rational(&weight(t)))).collect()
            }
        }
        TreeMode::Grouped => {
            let groups = grouped_weights(k, limits)?;
            if json {
                serde_json::to_string(&grouped_json(&groups))?
            } else {
                groups.iter().map(|(m, c)| format!("{m}: {c}\n")).collect()
            }
        }
    })
}

fn cmd_cache(g: &Global, action: &CacheAction) -> Out {
    let cache = g.cache();
    match action {
        CacheAction::Path => Ok(cache.dir().display().to_string()),
        CacheAction::Clear => Ok(format!("removed {} file(s)", cache.clear()?)),
        CacheAction::Save { kmax } => {
            if *kmax == 0 {
                return Err(Error::Domain("kmax must be >= 1".into()).into());
            }
            let path = cache.save(&invariants_recursive(*kmax)?)?;
            Ok(path.display().to_string())
        }
        CacheAction::Load { kmax, format } => match cache.load(*kmax)? {
            Some(t) => render_table(&t, *format, false, false),
            None => Err(Error::Domain(format!("no cache file for kmax={kmax} in {}", cache.dir().display())).into()),
        },
    }
}
