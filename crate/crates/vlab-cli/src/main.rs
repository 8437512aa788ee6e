//! vlab: verify modular relations, Riesz-sum identities and functional
//! equations for Dirichlet series with multiple Gamma factors.
//!
//! Exit codes: 0 all checks passed, 2 an identity check failed its
//! tolerance, 1 configuration or numerical error.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use vlab_core::config::{
    parse_config, run, to_csv, to_json, OutputFormat, PointSpec, RunConfig, RunOutcome, Task,
};

#[derive(Parser)]
#[command(name = "vlab", version, about = "numerical laboratory for Hecke-type functional equations")]
struct Cli {
    /// Run a full JSON configuration instead of subcommand flags
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default, Clone)]
struct SeriesArgs {
    /// preset name: theta-zeta | divisor | sigma-z | sigma-k | r2 | ramanujan-tau
    #[arg(long)]
    preset: Option<String>,
    /// sigma-z parameter (-1 < z <= 0)
    #[arg(long)]
    z: Option<f64>,
    /// sigma-k parameter (k >= 1)
    #[arg(long)]
    k: Option<u32>,
    /// coefficient generation cap
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args, Debug, Default, Clone)]
struct OutArgs {
    /// output format (json or csv); prints a summary line regardless
    #[arg(long)]
    out: Option<String>,
    /// write the report to this path instead of stdout
    #[arg(long)]
    path: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an inverse-Mellin kernel on a vertical line
    Kernel {
        /// Z | Y | X
        #[arg(long)]
        kind: String,
        /// Gamma-block alphas, comma separated
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Gamma-block betas, comma separated (re or re+imi)
        #[arg(long, value_delimiter = ',')]
        betas: Vec<String>,
        #[arg(long)]
        x: Vec<f64>,
        /// delta for the X kernel
        #[arg(long)]
        delta: Option<f64>,
        /// line abscissa Re s = a
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify an identity at one or more points
    Identity {
        /// modular | aux | riesz | fe
        which: String,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        x: Vec<f64>,
        /// evaluation point for fe, as re,im
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
        #[arg(long)]
        rho: Option<f64>,
        /// strip/line parameter a (defaults per identity)
        #[arg(long)]
        a: Option<f64>,
        /// pass/fail tolerance; riesz defaults to 1e-4 relative
        #[arg(long)]
        tol: Option<f64>,
        /// judge the tolerance relative to |lhs|
        #[arg(long)]
        rel: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate the I_rho asymptotic expansion term table
    Asympt {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        x: Vec<f64>,
        #[arg(long)]
        rho: f64,
        /// number of correction terms (0..=2)
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Catalog operations
    Catalog {
        #[command(subcommand)]
        op: CatalogOp,
    },
}

#[derive(Subcommand)]
enum CatalogOp {
    /// List the shipped presets
    List,
}

fn parse_beta(s: &str) -> anyhow::Result<(f64, f64)> {
    // "0.5" or "0.3+0.2i" / "0.3-0.2i"
    let t = s.trim();
    if let Some(stripped) = t.strip_suffix('i') {
        for (i, ch) in stripped.char_indices().skip(1) {
            if ch == '+' || ch == '-' {
                let re: f64 = stripped[..i].parse()?;
                let im: f64 = stripped[i..].parse()?;
                return Ok((re, im));
            }
        }
        return Ok((0.0, stripped.parse()?));
    }
    Ok((t.parse()?, 0.0))
}

fn emit(outcome: &RunOutcome, format: OutputFormat, path: Option<&std::path::PathBuf>) -> anyhow::Result<()> {
    let body = match format {
        OutputFormat::Json => to_json(&outcome.records),
        OutputFormat::Csv => to_csv(&outcome.records),
    };
    match path {
        Some(p) => std::fs::write(p, &body).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{body}"),
    }
    Ok(())
}

fn out_format(out: &OutArgs) -> anyhow::Result<OutputFormat> {
    match out.out.as_deref() {
        None | Some("json") => Ok(OutputFormat::Json),
        Some("csv") => Ok(OutputFormat::Csv),
        Some(other) => anyhow::bail!("unknown output format `{other}` (json or csv)"),
    }
}

fn build_config(cmd: Command) -> anyhow::Result<(RunConfig, OutArgs)> {
    match cmd {
        Command::Kernel { kind, alphas, betas, x, delta, a, tol, out } => {
            let betas = betas.iter().map(|b| parse_beta(b)).collect::<anyhow::Result<Vec<_>>>()?;
            let cfg = RunConfig {
                task: Task::Kernel,
                preset: None,
                z: None,
                k: None,
                custom: None,
                points: x.into_iter().map(|x| PointSpec { x: Some(x), s: None, rho: None }).collect(),
                tol,
                tol_relative: false,
                a,
                n_max: None,
                kernel_kind: Some(kind),
                alphas: Some(alphas),
                betas: Some(betas),
                delta,
                m: None,
                contour: None,
                output: out_format(&out)?,
                out_path: out.path.as_ref().map(|p| p.display().to_string()),
            };
            Ok((cfg, out))
        }
        Command::Identity { which, series, x, s, rho, a, tol, rel, out } => {
            let task = match which.as_str() {
                "modular" => Task::Modular,
                "aux" => Task::Aux,
                "riesz" => Task::Riesz,
                "fe" => Task::Fe,
                other => anyhow::bail!("unknown identity `{other}` (modular|aux|riesz|fe)"),
            };
            // the Riesz series converges algebraically; its shipped default
            // is a relative tolerance
            let (tol, rel) = match (tol, task) {
                (Some(t), _) => (t, rel),
                (None, Task::Riesz) => (1e-4, true),
                (None, _) => (1e-7, rel),
            };
            let points = if task == Task::Fe {
                let s = s.ok_or_else(|| anyhow::anyhow!("identity fe needs --s re,im"))?;
                if s.len() != 2 {
                    anyhow::bail!("--s takes exactly re,im");
                }
                vec![PointSpec { x: None, s: Some((s[0], s[1])), rho: None }]
            } else {
                x.into_iter().map(|x| PointSpec { x: Some(x), s: None, rho }).collect()
            };
            let cfg = RunConfig {
                task,
                preset: series.preset,
                z: series.z,
                k: series.k,
                custom: None,
                points,
                tol,
                tol_relative: rel,
                a,
                n_max: series.n_max,
                kernel_kind: None,
                alphas: None,
                betas: None,
                delta: None,
                m: None,
                contour: None,
                output: out_format(&out)?,
                out_path: out.path.as_ref().map(|p| p.display().to_string()),
            };
            Ok((cfg, out))
        }
        Command::Asympt { series, x, rho, m, out } => {
            let cfg = RunConfig {
                task: Task::Asympt,
                preset: series.preset,
                z: series.z,
                k: series.k,
                custom: None,
                points: x
                    .into_iter()
                    .map(|x| PointSpec { x: Some(x), s: None, rho: Some(rho) })
                    .collect(),
                tol: 1e-7,
                tol_relative: false,
                a: None,
                n_max: series.n_max,
                kernel_kind: None,
                alphas: None,
                betas: None,
                delta: None,
                m: Some(m),
                contour: None,
                output: out_format(&out)?,
                out_path: out.path.as_ref().map(|p| p.display().to_string()),
            };
            Ok((cfg, out))
        }
        Command::Catalog { .. } => unreachable!("handled before config building"),
    }
}

fn main() {
    // exit codes: 0 passed, 2 identity failure, 1 config/numerical error
    // (including usage errors)
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    std::process::exit(match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    });
}

fn real_main(cli: Cli) -> anyhow::Result<i32> {
    if let Some(path) = &cli.config {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = parse_config(&bytes)?;
        let outcome = run(&cfg)?;
        let path = cfg.out_path.as_ref().map(std::path::PathBuf::from);
        emit(&outcome, cfg.output, path.as_ref())?;
        return Ok(if outcome.all_passed { 0 } else { 2 });
    }
    let Some(cmd) = cli.command else {
        anyhow::bail!("need a subcommand or --config PATH (try --help)");
    };
    if let Command::Catalog { op: CatalogOp::List } = cmd {
        println!("name            delta  Q               d'    description");
        for name in vlab_core::catalog::PRESET_NAMES {
            let id = match name {
                "sigma-z" => vlab_core::catalog::PresetId::SigmaZ { z: -0.5 },
                "sigma-k" => vlab_core::catalog::PresetId::SigmaK { k: 2 },
                other => vlab_core::catalog::PresetId::parse(other, None, None)?,
            };
            let p = vlab_core::catalog::preset_with_cap(id, 8)?;
            println!(
                "{:<15} {:<6.3} {:<15.9} {:<5.2} {}",
                name,
                p.fe.delta,
                p.fe.big_q,
                p.fe.dprime(),
                p.oracle_tags.first().map(String::as_str).unwrap_or("")
            );
        }
        return Ok(0);
    }
    let (cfg, out) = build_config(cmd)?;
    let outcome = run(&cfg)?;
    emit(&outcome, cfg.output, out.path.as_ref())?;
    Ok(if outcome.all_passed { 0 } else { 2 })
}
