use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use election_compass::compass::full_compass;
use election_compass::cultures::{relphi_to_phi, Culture, CultureSpec};
use election_compass::embed::{coordinates_csv, embed_distances, render_svg, write_coordinates};
use election_compass::error::{Error, Result};
use election_compass::fit::{self, fit_mallows};
use election_compass::ingest::{
    read_preflib, run_pipeline, serialize_election, PipelineConfig, Preset,
};
use election_compass::matrix::{parse_rational, read_matrix_csv, FrequencyMatrix, MatrixFile};
use election_compass::metric::{
    distance_csv_decimal, distance_csv_exact, distance_matrix, format_decimal, parse_distance_csv,
    positionwise,
};
use election_compass::recovery::{
    election_from_position_matrix, round_frequency_matrix, rounding_deviation,
};
use election_compass::{ingest, Election};

/// Maps of elections: sampling, positionwise distances, compass matrices,
/// preference-data preprocessing, embeddings, and Mallows fitting.
#[derive(Parser, Debug)]
#[command(name = "ecompass", version, arg_required_else_help = true)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file or directory (meaning depends on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// File of `key=value` lines supplying defaults for long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CultureName {
    Ic,
    Urn,
    UrnGamma,
    Mallows,
    MallowsNorm,
    Conitzer,
    Walsh,
    Hypercube,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an election from a statistical culture.
    Generate {
        #[arg(long, value_enum)]
        culture: CultureName,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long)]
        relphi: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Positionwise distance between two matrices (CSV) or elections.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Divide by D(m) = (m^2 - 1) / 3.
        #[arg(long)]
        normalize: bool,
    },
    /// Pairwise distances of a set of matrices or elections.
    DistanceMatrix {
        /// Matrix CSV or election files; ids are the file stems.
        inputs: Vec<PathBuf>,
        /// Read every file of this directory, in name order.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Prepend the full compass with this path density.
        #[arg(long)]
        compass_scale: Option<usize>,
        /// Candidate count for the compass when there are no inputs.
        #[arg(long)]
        m: Option<usize>,
        /// Also write exact `p/q` distances to this file.
        #[arg(long)]
        exact: Option<PathBuf>,
    },
    /// Build an election realizing a position or frequency matrix.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        /// Number of voters (required for a frequency matrix).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Write the compass matrices and their connecting paths.
    Compass {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        scale: usize,
    },
    /// Print the rel-phi to phi conversion table.
    MallowsTable {
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,50,100")]
        m_list: Vec<usize>,
        /// Spacing of the rel-phi rows.
        #[arg(long, default_value = "0.05")]
        step: String,
    },
    /// Preprocess preference-data files into fixed-size elections.
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "custom")]
        preset: String,
        /// Coverage pruning threshold (enables pruning).
        #[arg(long)]
        coverage: Option<String>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        min_candidates: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        votes_per_sample: Option<usize>,
        #[arg(long)]
        min_voters: Option<u64>,
        #[arg(long)]
        max_candidates: Option<usize>,
    },
    /// Embed a distance matrix in the plane.
    Embed {
        #[arg(long)]
        distances: PathBuf,
        #[arg(long, default_value_t = election_compass::embed::DEFAULT_ITERATIONS)]
        iters: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        coords: Option<PathBuf>,
    },
    /// Fit the normalized Mallows parameter to a dataset of elections.
    FitMallows {
        /// Election files.
        inputs: Vec<PathBuf>,
        /// Read every election file of this directory, in name order.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Grid step 0.01 with 20 samples per value.
        #[arg(long)]
        coarse: bool,
        #[arg(long)]
        grid_step: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write the objective at every grid value to this CSV.
        #[arg(long)]
        objective: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_internal() { 2 } else { 1 })
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Appends `--key value` for every config entry whose flag is not given on
/// the command line. Keys of other subcommands are skipped.
fn apply_config(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)?;
    let cmd = Cli::command();
    let flags_of = |c: &clap::Command| -> BTreeSet<(String, bool)> {
        c.get_arguments()
            .filter_map(|a| {
                let takes_value = !matches!(
                    a.get_action(),
                    clap::ArgAction::SetTrue | clap::ArgAction::Help | clap::ArgAction::Version
                );
                a.get_long().map(|l| (l.to_string(), takes_value))
            })
            .collect()
    };
    let mut known = flags_of(&cmd);
    let mut everywhere = known.clone();
    let names: BTreeSet<String> = cmd
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let chosen = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .find(|a| names.contains(a));
    for sub in cmd.get_subcommands() {
        let f = flags_of(sub);
        everywhere.extend(f.iter().cloned());
        if Some(sub.get_name()) == chosen.as_deref() {
            known.extend(f);
        }
    }
    let given: BTreeSet<String> = args
        .iter()
        .filter_map(|a| {
            a.to_str()?
                .strip_prefix("--")
                .map(|s| s.split('=').next().unwrap_or(s).to_string())
        })
        .collect();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: k + 1,
            message: "expected key=value".into(),
        })?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(Error::InvalidParameter("config files cannot nest".into()));
        }
        if given.contains(&key) {
            continue;
        }
        if let Some((_, takes_value)) = known.iter().find(|(l, _)| *l == key) {
            if *takes_value {
                args.push(format!("--{key}").into());
                args.push(value.into());
            } else if matches!(value, "true" | "1" | "yes") {
                args.push(format!("--{key}").into());
            }
        } else if !everywhere.iter().any(|(l, _)| *l == key) {
            return Err(Error::Parse {
                line: k + 1,
                message: format!("unknown key {key:?}"),
            });
        }
    }
    Ok(args)
}

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Writes `text` to `--out` or stdout.
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => {
                fs::write(p, text)?;
                self.info(format!("wrote {}", p.display()));
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn out_dir(&self) -> Result<&Path> {
        let dir = self
            .out
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("--out DIR is required".into()))?;
        fs::create_dir_all(dir)?;
        Ok(dir)
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        out: cli.out,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Generate {
            culture,
            m,
            n,
            phi,
            relphi,
            alpha,
            dim,
        } => {
            let need = |v: Option<f64>, flag: &str| {
                v.ok_or_else(|| Error::InvalidParameter(format!("this culture needs --{flag}")))
            };
            let culture = match culture {
                CultureName::Ic => Culture::Ic,
                CultureName::Urn => Culture::Urn {
                    alpha: need(alpha, "alpha")?,
                },
                CultureName::UrnGamma => Culture::UrnGamma,
                CultureName::Mallows => Culture::Mallows {
                    phi: need(phi, "phi")?,
                },
                CultureName::MallowsNorm => Culture::MallowsNorm {
                    relphi: need(relphi, "relphi")?,
                },
                CultureName::Conitzer => Culture::Conitzer,
                CultureName::Walsh => Culture::Walsh,
                CultureName::Hypercube => Culture::Hypercube {
                    dim: dim.unwrap_or(1),
                },
            };
            let e = CultureSpec {
                culture,
                m,
                n,
                seed: ctx.seed,
            }
            .generate()?;
            ctx.emit(&serialize_election(&e))
        }
        Command::Distance { a, b, normalize } => {
            let x = load_matrix(&a)?;
            let y = load_matrix(&b)?;
            let mut d = positionwise(&x, &y)?.value;
            if normalize {
                d = election_compass::metric::normalized(d, x.m());
            }
            ctx.emit(&format!(
                "{}\n{}/{}\n",
                format_decimal(d, 12),
                d.numer(),
                d.denom()
            ))
        }
        Command::DistanceMatrix {
            inputs,
            dir,
            compass_scale,
            m,
            exact,
        } => {
            let mut files = inputs;
            if let Some(dir) = dir {
                files.extend(list_dir(&dir, &[])?);
            }
            let mut ids = Vec::new();
            let mut items = Vec::new();
            let loaded: Vec<(String, FrequencyMatrix)> = files
                .iter()
                .map(|f| Ok((stem(f), load_matrix(f)?)))
                .collect::<Result<_>>()?;
            if let Some(scale) = compass_scale {
                let m = match (m, loaded.first()) {
                    (Some(m), _) => m,
                    (None, Some((_, x))) => x.m(),
                    (None, None) => {
                        return Err(Error::InvalidParameter(
                            "--m is required without inputs".into(),
                        ))
                    }
                };
                for entry in full_compass(m, scale)? {
                    ids.push(entry.label);
                    items.push(entry.matrix);
                }
            }
            for (id, x) in loaded {
                ids.push(id);
                items.push(x);
            }
            if items.is_empty() {
                return Err(Error::InvalidParameter("nothing to compare".into()));
            }
            let d = distance_matrix(&items)?;
            if let Some(p) = exact {
                fs::write(&p, distance_csv_exact(&ids, &d))?;
                ctx.info(format!("wrote {}", p.display()));
            }
            ctx.emit(&distance_csv_decimal(&ids, &d))
        }
        Command::Recover { matrix, n } => {
            let e = match read_matrix_csv(&matrix)? {
                MatrixFile::Position(p) => {
                    if n.is_some_and(|n| n != p.n()) {
                        return Err(Error::InvalidParameter(format!(
                            "--n differs from the matrix line sum {}",
                            p.n()
                        )));
                    }
                    election_from_position_matrix(&p)?
                }
                MatrixFile::Frequency(x) => {
                    let n = n.ok_or_else(|| {
                        Error::InvalidParameter("a frequency matrix needs --n".into())
                    })?;
                    let p = round_frequency_matrix(&x, n)?;
                    let dev = rounding_deviation(&x, &p);
                    ctx.info(format!("rounding deviation {}", format_decimal(dev, 12)));
                    election_from_position_matrix(&p)?
                }
            };
            ctx.info(format!("{} distinct votes", e.distinct_votes()));
            ctx.emit(&serialize_election(&e))
        }
        Command::Compass { m, scale } => {
            let dir = ctx.out_dir()?;
            let entries = full_compass(m, scale)?;
            let mut manifest = String::from("label,pair,alpha\n");
            for e in &entries {
                fs::write(dir.join(format!("{}.csv", e.label)), e.matrix.to_csv())?;
                let pair = e.pair.map_or(String::new(), |(a, b)| format!("{a}-{b}"));
                writeln!(manifest, "{},{},{}", e.label, pair, e.alpha).unwrap();
            }
            fs::write(dir.join("manifest.csv"), manifest)?;
            ctx.info(format!(
                "wrote {} matrices to {}",
                entries.len(),
                dir.display()
            ));
            Ok(())
        }
        Command::MallowsTable { m_list, step } => {
            let step = parse_rational(&step)?;
            let half = election_compass::Rational::new(1, 2);
            if step <= election_compass::Rational::from_integer(0) || step > half {
                return Err(Error::InvalidParameter(
                    "--step must lie in (0, 0.5]".into(),
                ));
            }
            let mut out = String::from("rel-phi \\ m");
            for m in &m_list {
                write!(out, "\t{m}").unwrap();
            }
            out.push('\n');
            let mut r = election_compass::Rational::from_integer(0);
            while r <= half {
                let relphi = *r.numer() as f64 / *r.denom() as f64;
                out.push_str(&format_decimal(r, 6));
                for &m in &m_list {
                    write!(out, "\t{:.3}", relphi_to_phi(m, relphi)?).unwrap();
                }
                out.push('\n');
                r += step;
            }
            ctx.emit(&out)
        }
        Command::Ingest {
            input,
            preset,
            coverage,
            no_prune,
            min_candidates,
            top_k,
            samples,
            votes_per_sample,
            min_voters,
            max_candidates,
        } => {
            let mut config = PipelineConfig::preset(preset.parse::<Preset>()?);
            config.seed = ctx.seed;
            if let Some(c) = coverage {
                config.prune_threshold = Some(parse_rational(&c)?);
            }
            if no_prune {
                config.prune_threshold = None;
            }
            if let Some(k) = min_candidates {
                config.min_candidates = k;
            }
            if let Some(k) = top_k {
                config.top_k = k;
            }
            if let Some(k) = samples {
                config.samples = k;
            }
            if let Some(k) = votes_per_sample {
                config.votes_per_sample = k;
            }
            if min_voters.is_some() {
                config.min_voters = min_voters;
            }
            if max_candidates.is_some() {
                config.max_candidates = max_candidates;
            }
            let files = list_dir(&input, &["soc", "soi", "toc", "toi"])?;
            let profiles = files
                .iter()
                .map(|f| Ok((stem(f), read_preflib(f)?)))
                .collect::<Result<Vec<_>>>()?;
            let output = run_pipeline(&profiles, &config)?;
            let dir = ctx.out_dir()?;
            fs::create_dir_all(dir.join("completed"))?;
            fs::create_dir_all(dir.join("samples"))?;
            for (source, e) in &output.intermediate {
                fs::write(
                    dir.join("completed").join(format!("{source}.soc")),
                    serialize_election(e),
                )?;
            }
            let mut sample_list = String::from("file,source\n");
            for (k, (source, e)) in output.samples.iter().enumerate() {
                let name = format!("sample_{k:03}.soc");
                let e = e.clone().with_metadata("source", source);
                fs::write(dir.join("samples").join(&name), serialize_election(&e))?;
                writeln!(sample_list, "samples/{name},{source}").unwrap();
            }
            let threshold = config
                .prune_threshold
                .map_or("none".to_string(), |t| t.to_string());
            let mut manifest = format!(
                "# seed: {}\n# coverage: {threshold}\nsource,removed_candidates,removed_votes,status\n",
                config.seed
            );
            for r in &output.reports {
                let status = match &r.skipped {
                    Some(why) => format!("skipped: {why}"),
                    None => "kept".to_string(),
                };
                writeln!(
                    manifest,
                    "{},{},{},{}",
                    r.source,
                    r.pruned.removed_candidates.join(";"),
                    r.pruned.removed_votes,
                    status.replace(',', ";")
                )
                .unwrap();
            }
            fs::write(dir.join("manifest.csv"), manifest)?;
            fs::write(dir.join("samples.csv"), sample_list)?;
            ctx.info(format!(
                "{} of {} profiles kept, {} samples written to {}",
                output.intermediate.len(),
                output.reports.len(),
                output.samples.len(),
                dir.display()
            ));
            Ok(())
        }
        Command::Embed {
            distances,
            iters,
            svg,
            coords,
        } => {
            let (ids, d) = parse_distance_csv(&fs::read_to_string(&distances)?)?;
            let layout = embed_distances(&ids, &d, ctx.seed, iters)?.with_inferred_styling();
            if let Some(p) = &svg {
                render_svg(&layout, p)?;
                ctx.info(format!("wrote {}", p.display()));
            }
            if let Some(p) = &coords {
                write_coordinates(&layout, p)?;
                ctx.info(format!("wrote {}", p.display()));
            }
            if svg.is_none() && coords.is_none() {
                ctx.emit(&coordinates_csv(&layout)?)?;
            }
            Ok(())
        }
        Command::FitMallows {
            inputs,
            dataset,
            coarse,
            grid_step,
            samples,
            objective,
        } => {
            let mut files = inputs;
            if let Some(dir) = dataset {
                files.extend(list_dir(&dir, &["soc", "soi", "toc", "toi"])?);
            }
            let elections = files
                .iter()
                .map(|f| ingest::read_election(f))
                .collect::<Result<Vec<Election>>>()?;
            let step = match (grid_step, coarse) {
                (Some(s), _) => parse_rational(&s)?,
                (None, true) => election_compass::Rational::new(1, 100),
                (None, false) => election_compass::Rational::new(1, 1000),
            };
            let samples = samples.unwrap_or(if coarse {
                fit::COARSE_SAMPLES_PER_VALUE
            } else {
                fit::DEFAULT_SAMPLES_PER_VALUE
            });
            let grid = grid_from_step(step)?;
            let result = fit_mallows(&elections, &grid, samples, ctx.seed)?;
            if let Some(p) = objective {
                let mut csv = String::from("relphi,mean,std\n");
                for g in &result.objective {
                    writeln!(csv, "{},{:.12},{:.12}", g.relphi, g.mean, g.std).unwrap();
                }
                fs::write(&p, csv)?;
                ctx.info(format!("wrote {}", p.display()));
            }
            let b = &result.best;
            ctx.emit(&format!(
                "relphi,mean,std\n{},{:.6},{:.6}\n",
                b.relphi, b.mean, b.std
            ))
        }
    }
}

fn grid_from_step(step: election_compass::Rational) -> Result<Vec<f64>> {
    let zero = election_compass::Rational::from_integer(0);
    let half = election_compass::Rational::new(1, 2);
    if step <= zero || step > half {
        return Err(Error::InvalidParameter(
            "grid step must lie in (0, 0.5]".into(),
        ));
    }
    let mut grid = Vec::new();
    let mut r = zero;
    while r <= half {
        grid.push(*r.numer() as f64 / *r.denom() as f64);
        r += step;
    }
    Ok(grid)
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(
        || p.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

/// Files of `dir` in name order, restricted to `extensions` unless empty.
fn list_dir(dir: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| {
        p.is_file()
            && (extensions.is_empty()
                || p.extension()
                    .is_some_and(|x| extensions.contains(&x.to_string_lossy().as_ref())))
    });
    files.sort();
    Ok(files)
}

/// A frequency matrix from a matrix CSV or, for any other extension, from
/// an election file.
fn load_matrix(path: &Path) -> Result<FrequencyMatrix> {
    if path.extension().is_some_and(|x| x == "csv") {
        Ok(read_matrix_csv(path)?.into_frequency())
    } else {
        Ok(ingest::read_election(path)?.frequency_matrix())
    }
}
