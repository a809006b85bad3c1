use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cellseq::report::{self, Bundle, Suite};
use cellseq::visual::checkerboard_sample;
use cellseq::{Error, ExampleSpec, Tower, VisualMetricConfig};

#[derive(Parser)]
#[command(name = "cellseq", version, about = "Cellular subdivision rules: validation, towers, visual metrics and diagnostics")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "CELLSEQ_JOBS")]
    jobs: Option<usize>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the complexes, maps and realization of a rule.
    Validate { rule: String },
    /// Build levels of the tower.
    Iterate {
        rule: String,
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long, value_enum, default_value_t = Emit::Counts)]
        emit: Emit,
    },
    /// Visual metric on a vertex sample.
    Visual {
        rule: String,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = Sample::Vertices)]
        sample: Sample,
        /// Cell-metric table up to this level.
        #[arg(long)]
        cells: Option<u32>,
        /// Write `(q, rho)` pairs as CSV.
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
    /// Quasisymmetry, BQS and CXC diagnostics.
    Diagnose {
        rule: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 4)]
        max_level: u32,
        /// Write BQS samples as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print or dump a built-in example.
    Example {
        name: String,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Export the cells (CSV) or chamber graph (DOT) of one level.
    Export {
        rule: String,
        #[arg(long, default_value_t = 2)]
        level: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        to: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Counts,
    Cells,
    Adjacency,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sample {
    Vertices,
    Checkerboard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Dot,
}

fn load(rule: &str) -> cellseq::Result<Tower> {
    let spec: ExampleSpec = rule.parse()?;
    Ok(Tower::from_example(&spec.build()?))
}

/// `Ok(true)` when every check in the report passed.
fn run(cli: &Cli) -> cellseq::Result<(Bundle, bool)> {
    let mut b = Bundle::new();
    let mut ok = true;
    match &cli.command {
        Command::Validate { rule } => {
            let ex = rule.parse::<ExampleSpec>()?.build()?;
            let mut v = ex.rule.validate();
            if let Some(r) = &ex.realization {
                v.merge(r.validate(&ex.rule));
            }
            ok = v.ok;
            b.insert("validation", &v)?;
            b.insert("multiplicity", &ex.rule.multiplicity_table())?;
        }
        Command::Iterate { rule, level, emit } => {
            let t = load(rule)?;
            match emit {
                Emit::Counts => {
                    let counts: Vec<Vec<usize>> = (0..=*level)
                        .map(|m| {
                            let l = t.level(m)?;
                            let mut c = vec![0; t.dim_top() + 1];
                            (0..l.len()).for_each(|i| c[l.dim(i)] += 1);
                            Ok(c)
                        })
                        .collect::<cellseq::Result<_>>()?;
                    b.insert("counts_by_dim", &counts)?;
                }
                Emit::Cells => b.insert("cells", &report::cell_rows(&t, *level)?)?,
                Emit::Adjacency => b.insert("dot", &report::chamber_dot(&t, *level)?)?,
            }
        }
        Command::Visual {
            rule,
            lambda,
            eps,
            depth,
            sample,
            cells,
            scatter,
        } => {
            let t = load(rule)?;
            let cfg = match sample {
                Sample::Vertices => VisualMetricConfig::vertices(&t, *lambda, *eps, *depth)?,
                Sample::Checkerboard => {
                    let pts = checkerboard_sample(&t, depth.saturating_sub(2), *depth)?;
                    VisualMetricConfig::new(*lambda, *eps, *depth, pts)?
                }
            };
            let rep = t.chain_metric(&cfg)?;
            ok = rep.check.ok() && rep.c_meas.is_finite();
            if let Some(m) = cells {
                b.insert("cell_metric", &t.cell_metric_report(&rep, &cfg, *m)?)?;
            }
            if let Some(path) = scatter {
                report::write_csv(path, rep.scatter().into_iter().map(|(q, rho)| [q, rho]))?;
            }
            b.insert("visual", &rep)?;
        }
        Command::Diagnose {
            rule,
            suite,
            max_level,
            csv,
        } => {
            let t = load(rule)?;
            let suite: Suite = suite.parse()?;
            b = report::diagnose(&t, suite, *max_level, cli.seed)?;
            if let Some(path) = csv {
                let env = t.bqs_envelope(1..=(*max_level).max(1), cli.seed)?;
                report::write_csv(path, env.samples)?;
            }
        }
        Command::Example { name, dump } => {
            let ex = name.parse::<ExampleSpec>()?.build()?;
            let text = cellseq::json::rule_to_string(&ex)?;
            if let Some(path) = dump {
                std::fs::write(path, &text)?;
            }
            b.insert("example", &ex.name)?;
            b.insert("counts", &[ex.rule.base().count_by_dim(), ex.rule.refined().count_by_dim()])?;
        }
        Command::Export {
            rule,
            level,
            format,
            to,
        } => {
            let t = load(rule)?;
            match format {
                Format::Csv => report::write_csv(to, report::cell_rows(&t, *level)?)?,
                Format::Dot => std::fs::write(to, report::chamber_dot(&t, *level)?)?,
            }
            b.insert("written", &to)?;
        }
    }
    Ok((b, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match run(&cli) {
        Ok((bundle, ok)) => {
            let text = match bundle.to_json() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            print!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
