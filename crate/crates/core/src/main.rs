use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hankellab::coefficients::{FracOrder, OperatorSymbol, ShiftOrder};
use hankellab::counterexamples::{
    dp1_closed_form, dp1_section_norms, dp2_entry, dp2_ladder, lacunary_symbol, order_control_ratios,
    primitive_norm_check, BetaRule, Dp1Config, WitnessKind,
};
use hankellab::error::{Error, Result};
use hankellab::functionals::{
    analytic_embedding_value, gram_embedding_converged, gram_embedding_value, norm_chain, rk_thesis_value,
    weak_bmoa_value, WGrid,
};
use hankellab::report::{exit_code, write_csv, CsvRow, Envelope, EXIT_USAGE};
use hankellab::spaces::{bloch_norm, carleson_intensity, BlochGrid, GridMeasure};

#[derive(Parser, Debug)]
#[command(name = "hankellab", version, about = "Finite-section Hankel operator experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (falls back to HANKELLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; experiments default to CSV, single evaluations to JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Analytic,
    Anti,
    Weak,
    Rk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All six norm-like quantities and their pairwise ratios.
    NormChain {
        symbol: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        /// Truncation; defaults to the symbol degree.
        #[arg(long)]
        n: Option<usize>,
    },
    /// A single embedding functional.
    Embedding {
        symbol: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Weighted sections of the rank-one-valued counterexample.
    Dp1 {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "63,255,1023,4095")]
        n_ladder: Vec<usize>,
        /// `default` or `zero`.
        #[arg(long, default_value = "default")]
        beta_rule: String,
    },
    /// Schur multiplier lower bounds along a size ladder.
    Dp2 {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
        n_ladder: Vec<usize>,
        /// `all`, `basic`, or a comma-separated list of witness names.
        #[arg(long, default_value = "all")]
        family: String,
    },
    /// Section norms against differentiation order.
    LemmaOrder {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value = "1..12")]
        l_range: String,
        /// `lacunary` or a symbol file.
        #[arg(long, default_value = "lacunary")]
        psi: String,
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
    /// Both sides of the primitive estimate on monomials.
    LemmaPrimitive {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.5,1,2",
            allow_negative_numbers = true
        )]
        alpha_set: Vec<f64>,
        #[arg(long, default_value = "1..6")]
        l_range: String,
        #[arg(long, default_value = "0..32")]
        nzero_range: String,
    },
    /// Box intensity of an atomic measure.
    Carleson {
        measure: PathBuf,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Bloch norm of a symbol.
    Bloch { symbol: PathBuf },
}

/// Attaches the path to I/O failures so the diagnostic names the file.
fn with_path<T>(path: &std::path::Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn load_symbol(path: &std::path::Path) -> Result<OperatorSymbol> {
    with_path(path, OperatorSymbol::load(path))
}

/// Inclusive `a..b`, or a comma-separated list.
fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("malformed range '{s}' (expected a..b or a,b,c)"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn parse_family(s: &str) -> Result<Vec<WitnessKind>> {
    let mut out: Vec<WitnessKind> = Vec::new();
    for t in s.split(',').map(str::trim) {
        let kinds =
            match t {
                "all" => WitnessKind::ALL.to_vec(),
                "basic" => WitnessKind::BASIC.to_vec(),
                _ => vec![WitnessKind::parse(t)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown witness family '{t}'")))?],
            };
        for k in kinds {
            if !out.contains(&k) {
                out.push(k);
            }
        }
    }
    Ok(out)
}

struct Output {
    json: Option<String>,
    rows: Vec<CsvRow>,
    default: Format,
}

fn emit(global: &Global, out: Output) -> Result<()> {
    let format = global.format.unwrap_or(out.default);
    let mut buf = Vec::new();
    match format {
        Format::Json => buf.extend(
            out.json
                .ok_or_else(|| Error::InvalidArgument("JSON output unavailable for this command".into()))?
                .into_bytes(),
        ),
        Format::Csv => {
            if out.rows.is_empty() {
                return Err(Error::InvalidArgument("CSV output unavailable for this command".into()));
            }
            write_csv(&out.rows, &mut buf)?;
        }
    }
    match &global.out {
        Some(path) => fs::write(path, buf)?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn envelope<P: Serialize, R: Serialize>(g: &Global, command: &str, params: P, result: R) -> Result<String> {
    Envelope::new(command, g.seed, !g.no_timestamp, params, result).to_json()
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let output = match &cli.command {
        Command::NormChain { symbol, alpha, n } => {
            let phi = load_symbol(symbol)?;
            let n = n.unwrap_or(phi.degree());
            let report = norm_chain(&phi, FracOrder::new(*alpha)?, n)?;
            let rows = report
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| CsvRow::new(format!("norm-chain-{}", i + 1), *alpha, n, *v, ""))
                .collect();
            let params = serde_json::json!({ "symbol": symbol, "alpha": alpha, "N": n });
            Output {
                json: Some(envelope(g, "norm-chain", params, &report)?),
                rows,
                default: Format::Json,
            }
        }
        Command::Embedding { symbol, mode, alpha, n } => {
            let phi = load_symbol(symbol)?;
            let a = FracOrder::new(*alpha)?;
            let params = serde_json::json!({ "symbol": symbol, "mode": mode, "alpha": alpha, "N": n });
            let (result, rows) = match mode {
                Mode::Analytic | Mode::Anti => {
                    let (ex, degree) = match (mode, n) {
                        (Mode::Anti, None) => gram_embedding_converged(&phi),
                        (Mode::Anti, Some(n)) => (gram_embedding_value(&phi, *n), *n),
                        (_, n) => {
                            let n = n.unwrap_or(phi.degree() + 8);
                            (analytic_embedding_value(&phi, n), n)
                        }
                    };
                    let name = format!(
                        "embedding-{}",
                        if matches!(mode, Mode::Anti) { "anti" } else { "analytic" }
                    );
                    let json = serde_json::json!({
                        "value": ex.value, "test_degree": degree, "residual": ex.residual,
                        "converged": ex.converged, "method": format!("{:?}", ex.method).to_lowercase(),
                    });
                    (json, vec![CsvRow::new(name, *alpha, degree, ex.value, "")])
                }
                Mode::Weak => {
                    let n = n.unwrap_or(phi.degree());
                    let v = weak_bmoa_value(&phi, a, &WGrid::default(), n)?;
                    let w = format!("w={}{:+}i", v.argmax.re, v.argmax.im);
                    (
                        serde_json::to_value(v)?,
                        vec![CsvRow::new("embedding-weak", *alpha, n, v.value, w)],
                    )
                }
                Mode::Rk => {
                    let n = n.unwrap_or(phi.degree());
                    let v = rk_thesis_value(&phi, a, &WGrid::default(), n)?;
                    let rows = vec![
                        CsvRow::new("embedding-rk-iii", *alpha, n, v.iii.value, ""),
                        CsvRow::new("embedding-rk-v", *alpha, n, v.v.value, ""),
                    ];
                    (serde_json::to_value(v)?, rows)
                }
            };
            Output {
                json: Some(envelope(g, "embedding", params, result)?),
                rows,
                default: Format::Json,
            }
        }
        Command::Dp1 {
            alpha,
            n_ladder,
            beta_rule,
        } => {
            let rule = match beta_rule.as_str() {
                "default" => BetaRule::Default,
                "zero" => BetaRule::Zero,
                other => return Err(Error::InvalidArgument(format!("unknown beta rule '{other}'"))),
            };
            let cfg = Dp1Config::new(FracOrder::new(*alpha)?, 0)?.with_rule(rule);
            let table = dp1_section_norms(&cfg, n_ladder);
            let mut rows = Vec::new();
            for q in ["right", "right-closed", "left", "left-lower"] {
                for r in &table {
                    let v = match q {
                        "right" => r.right,
                        "right-closed" => r.right_closed,
                        "left" => r.left,
                        _ => r.left_lower,
                    };
                    rows.push(CsvRow::new(format!("dp1-{q}"), *alpha, r.n, v, "e0"));
                }
            }
            let bound = n_ladder
                .iter()
                .max()
                .map(|&n| dp1_closed_form(&cfg.with_n(n)).right_norm_upper);
            let params = serde_json::json!({ "alpha": alpha, "n_ladder": n_ladder, "beta_rule": beta_rule });
            let result = serde_json::json!({ "rows": table, "right_norm_upper": bound.flatten() });
            Output {
                json: Some(envelope(g, "dp1", params, result)?),
                rows,
                default: Format::Csv,
            }
        }
        Command::Dp2 {
            alpha,
            n_ladder,
            family,
        } => {
            let fam = parse_family(family)?;
            let bounds = dp2_ladder(FracOrder::new(*alpha)?, n_ladder, &fam, g.seed)?;
            let mut rows = Vec::new();
            for b in &bounds {
                rows.push(CsvRow::new("dp2-lower-bound", *alpha, b.n, b.value, b.witness.clone()));
            }
            for b in &bounds {
                for w in &b.ratios {
                    rows.push(CsvRow::new("dp2-witness", *alpha, b.n, w.ratio, w.witness.clone()));
                }
            }
            let (m, far) = (50usize, 5000usize);
            let limits = serde_json::json!({
                "m": m, "n": far,
                "b_m_far": dp2_entry(*alpha, m, far),
                "b_far_m": dp2_entry(*alpha, far, m),
            });
            let params = serde_json::json!({ "alpha": alpha, "n_ladder": n_ladder, "family": family });
            let result = serde_json::json!({ "bounds": bounds, "iterated_limits": limits });
            Output {
                json: Some(envelope(g, "dp2", params, result)?),
                rows,
                default: Format::Csv,
            }
        }
        Command::LemmaOrder { alpha, l_range, psi, n } => {
            let symbol = if psi == "lacunary" {
                lacunary_symbol(8)
            } else {
                load_symbol(psi.as_ref())?
            };
            let ls: Vec<ShiftOrder> = parse_range(l_range)?
                .into_iter()
                .map(|l| ShiftOrder::new(l as u32))
                .collect::<Result<_>>()?;
            let report = order_control_ratios(&symbol, FracOrder::new(*alpha)?, &ls, *n)?;
            let rows = report
                .rows
                .iter()
                .map(|r| CsvRow::new("order-control", *alpha, *n, r.ratio, format!("l={}", r.l)))
                .collect();
            let params = serde_json::json!({ "alpha": alpha, "l_range": l_range, "psi": psi, "N": n });
            Output {
                json: Some(envelope(g, "lemma-order", params, &report)?),
                rows,
                default: Format::Csv,
            }
        }
        Command::LemmaPrimitive {
            alpha_set,
            l_range,
            nzero_range,
        } => {
            let ls = parse_range(l_range)?;
            let ns = parse_range(nzero_range)?;
            let mut checks = Vec::new();
            for &a in alpha_set {
                let a = FracOrder::new(a)?;
                for &l in &ls {
                    let l = ShiftOrder::new(l as u32)?;
                    for &n in &ns {
                        checks.push(primitive_norm_check(a, l, n)?);
                    }
                }
            }
            let rows = checks
                .iter()
                .map(|c| CsvRow::new("primitive-rel-gap", c.alpha, c.n_zero, c.rel_gap, format!("l={}", c.l)))
                .collect();
            let max_gap = checks.iter().map(|c| c.rel_gap).fold(0.0, f64::max);
            let params = serde_json::json!({ "alpha_set": alpha_set, "l_range": l_range, "nzero_range": nzero_range });
            let result = serde_json::json!({ "checks": checks, "max_rel_gap": max_gap });
            Output {
                json: Some(envelope(g, "lemma-primitive", params, result)?),
                rows,
                default: Format::Csv,
            }
        }
        Command::Carleson { measure, levels } => {
            let mu = with_path(measure, GridMeasure::load(measure))?;
            let v = carleson_intensity(&mu, *levels)?;
            let params = serde_json::json!({ "measure": measure, "levels": levels });
            Output {
                json: Some(envelope(g, "carleson", params, v)?),
                rows: vec![CsvRow::new("carleson-intensity", 0.0, *levels, v.value, "")],
                default: Format::Json,
            }
        }
        Command::Bloch { symbol } => {
            let phi = load_symbol(symbol)?;
            let v = bloch_norm(&phi, BlochGrid::default());
            let params = serde_json::json!({ "symbol": symbol });
            Output {
                json: Some(envelope(g, "bloch", params, v)?),
                rows: vec![CsvRow::new("bloch", 0.0, phi.degree(), v.value, "")],
                default: Format::Json,
            }
        }
    };
    emit(g, output)
}

fn configure_threads(g: &Global) -> Result<()> {
    let requested = match g.threads {
        Some(t) => Some(t),
        None => match std::env::var("HANKELLAB_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("HANKELLAB_THREADS must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = requested {
        if t == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = configure_threads(&cli.global).and_then(|_| run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hankellab: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
