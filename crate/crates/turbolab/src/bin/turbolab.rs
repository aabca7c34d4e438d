//! Command-line front end for turbolab.
//!
//! Exit codes: 0 on success, 1 when a check or computation fails, 2 on
//! usage or parse errors. `LAB_THREADS` caps the worker pool (0 = auto).

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use turbolab::bounds::{
    bound_1e, bound_1i, bound_2e, bound_2i, constant_c, ratio_string, theorem_inner_bound,
    InnerParams, OuterParams,
};
use turbolab::classify::{
    build_graph, classify_report, classify_with_graph, graph_to_dot, is_recursive,
};
use turbolab::convolutional::{trace_and_detours, ConvInput};
use turbolab::encoders::SeedMorphism;
use turbolab::experiments::{
    default_run_dir, load_config, run_experiment, verify_corpus, ExperimentConfig,
};
use turbolab::spectra::{inner_spectrum, outer_spectrum};
use turbolab::specfile::{load_encoder, LoadedEncoder};
use turbolab::turbo::{monte_carlo_distance, turbo_distance_exact, Interleaver, TurboInstance};
use turbolab::{Budgets, Error, Word};

#[derive(Parser)]
#[command(name = "turbolab", version, about = "Distance analysis for classical and quantum turbo-style encoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Cap on brute-force enumerations (inputs, spectrum tuples).
    #[arg(long)]
    budget: Option<u64>,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        match self.budget {
            Some(b) => Budgets {
                max_enumeration: b,
                max_spectrum_inputs: b,
                ..Budgets::default()
            },
            None => Budgets::default(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a seed encoder: recursive, totally recursive, systematic,
    /// speed, memory split sizes.
    Classify {
        /// Encoder spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Falsification search depth for systematicity.
        #[arg(long, default_value_t = 6)]
        n_falsify: usize,
        /// Also write the memory transition graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Exact weight spectra (CSV).
    Spectrum {
        #[command(subcommand)]
        which: SpectrumCmd,
    },
    /// Exact counting bounds next to the exact spectra (CSV).
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Trace an undetected convolutional input and cut it into detours.
    Trace {
        #[arg(long)]
        spec: PathBuf,
        /// Initial memory word, e.g. "0" or "I".
        #[arg(long)]
        memory: String,
        /// Comma-separated information blocks, e.g. "1,0,0,1".
        #[arg(long)]
        info: String,
        /// Comma-separated stabilizer blocks (defaults to all identity).
        #[arg(long)]
        stab: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Exact distance of one turbo instance.
    TurboDistance {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
        /// Outer block count N.
        #[arg(long)]
        n: usize,
        /// Interleaver seed; omit for the identity interleaver.
        #[arg(long)]
        seed: Option<u64>,
        /// Also compute the degenerate distance.
        #[arg(long)]
        dq: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Monte Carlo minimum distance over random interleavers (JSON lines).
    Mc {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        inner: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        /// Master seed; per-trial seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thresholds D for empirical P(d_c <= D), comma-separated.
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        #[arg(long)]
        dq: bool,
        /// Also export (n, trial, d_c) rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run a full experiment from a config file into a run directory.
    Experiment {
        /// Config JSON (or a manifest.json from a previous run).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Override the length grid, comma-separated.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        mode: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the invariant suite over a corpus of encoder specs.
    Verify {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Convolutional spectrum a_N(w, d) of a seed encoder.
    Inner {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w_max: Option<usize>,
        #[arg(long)]
        d_max: Option<u64>,
        /// Emit the cumulative table a_N(w, <= d) instead of the exact one.
        #[arg(long)]
        cumulative: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Blockwise spectrum of a memoryless encoder.
    Outer {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d_max: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Inner bounds: exact counts, the combinatorial bound, and the
    /// closed forms where the seed qualifies.
    Inner {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        w_max: usize,
        #[arg(long, default_value_t = 4)]
        d_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Outer bounds: exact counts, the support bound, the density bound.
    Outer {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d_max: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn emit(out: &Option<PathBuf>, contents: &str) -> turbolab::Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn parse_blocks(seed: &SeedMorphism, raw: &str, len: usize) -> turbolab::Result<Vec<Word>> {
    let sp = seed.space();
    raw.split(',')
        .map(|s| {
            let s = s.trim();
            if s.is_empty() && len == 0 {
                Ok(Word::zero(sp, 0))
            } else {
                let w = Word::parse(sp, s)?;
                if w.len() != len {
                    return Err(Error::Dimension(format!(
                        "block {s:?} has {} letters, expected {len}",
                        w.len()
                    )));
                }
                Ok(w)
            }
        })
        .collect()
}

fn load_seed(path: &std::path::Path) -> turbolab::Result<LoadedEncoder> {
    load_encoder(path)
}

fn run() -> turbolab::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify {
            spec,
            n_falsify,
            dot,
            out,
            budget,
        } => {
            let loaded = load_seed(&spec)?;
            let budgets = budget.budgets();
            let report = classify_report(&loaded.name, &loaded.seed, n_falsify, &budgets)?;
            if let Some(dot_path) = dot {
                let graph = build_graph(&loaded.seed, &budgets)?;
                std::fs::write(dot_path, graph_to_dot(&loaded.seed, &graph))?;
            }
            emit(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(true)
        }
        Command::Spectrum { which } => {
            match which {
                SpectrumCmd::Inner {
                    spec,
                    n,
                    w_max,
                    d_max,
                    cumulative,
                    out,
                    budget,
                } => {
                    let loaded = load_seed(&spec)?;
                    let seed = loaded.seed;
                    let slots = seed.m() + seed.k() * n;
                    let full_d = (seed.n() * n + seed.m()) as u64;
                    let t = inner_spectrum(
                        &seed,
                        n,
                        w_max.unwrap_or(slots),
                        d_max.unwrap_or(full_d),
                        &budget.budgets(),
                    )?;
                    let table = if cumulative { &t.cumulative } else { &t.exact };
                    emit(&out, &table.to_csv())?;
                }
                SpectrumCmd::Outer {
                    spec,
                    n,
                    d_max,
                    out,
                    budget,
                } => {
                    let loaded = load_seed(&spec)?;
                    let block = loaded.block.ok_or_else(|| {
                        Error::Spec("outer spectra need a memoryless encoder (m = 0)".into())
                    })?;
                    let t = outer_spectrum(&block, n, d_max, &budget.budgets())?;
                    emit(&out, &t.to_csv())?;
                }
            }
            Ok(true)
        }
        Command::Bounds { which } => {
            match which {
                BoundsCmd::Inner {
                    spec,
                    n,
                    w_max,
                    d_max,
                    out,
                    budget,
                } => {
                    let loaded = load_seed(&spec)?;
                    let seed = loaded.seed;
                    let budgets = budget.budgets();
                    let graph = build_graph(&seed, &budgets)?;
                    let c = classify_with_graph(&graph);
                    let recursive = is_recursive(&seed, &graph, &c).recursive;
                    let params = InnerParams {
                        m: seed.m(),
                        k: seed.k(),
                        eta: c.eta.unwrap_or(1),
                        p_size: seed.space().size(),
                    };
                    let tot = turbolab::classify::is_totally_recursive(&seed, &budgets)?;
                    let dec_params = if tot.recursive {
                        let dec = seed.truncated_decoder()?;
                        let dg = build_graph(&dec, &budgets)?;
                        let dc = classify_with_graph(&dg);
                        Some(InnerParams {
                            m: dec.m(),
                            k: dec.k(),
                            eta: dc.eta.unwrap_or(1),
                            p_size: dec.space().size(),
                        })
                    } else {
                        None
                    };
                    let slots = seed.m() + seed.k() * n;
                    let t = inner_spectrum(&seed, n, w_max.min(slots), d_max, &budgets)?;
                    let mut csv = String::from("w,d,a,a_le,theorem,bound_1i,bound_2i\n");
                    for w in 0..=w_max.min(slots) {
                        for d in 0..=d_max {
                            let theorem = theorem_inner_bound(&params, w as u64, d, n as u64);
                            let b1 = if recursive {
                                ratio_string(&bound_1i(&params, w as u64, d, n as u64))
                            } else {
                                String::new()
                            };
                            let b2 = dec_params
                                .as_ref()
                                .map(|dp| ratio_string(&bound_2i(dp, w as u64, d, n as u64)))
                                .unwrap_or_default();
                            csv.push_str(&format!(
                                "{w},{d},{},{},{theorem},{b1},{b2}\n",
                                t.a(w, d),
                                t.a_le(w, d),
                            ));
                        }
                    }
                    emit(&out, &csv)?;
                }
                BoundsCmd::Outer {
                    spec,
                    n,
                    d_max,
                    out,
                    budget,
                } => {
                    let loaded = load_seed(&spec)?;
                    let block = loaded.block.ok_or_else(|| {
                        Error::Spec("outer bounds need a memoryless encoder (m = 0)".into())
                    })?;
                    let budgets = budget.budgets();
                    let d = block.distances(&budgets)?;
                    let (Some(d_c), Some(d_q)) = (d.d_c.finite(), d.d_q.finite()) else {
                        return Err(Error::Hypotheses(
                            "outer bounds need finite distances".into(),
                        ));
                    };
                    let params = OuterParams {
                        n: block.n(),
                        d_c,
                        d_q,
                        p_size: block.space().size(),
                    };
                    let t = outer_spectrum(&block, n, d_max, &budgets)?;
                    let cc = constant_c(&block, &budgets).ok();
                    let mut csv =
                        String::from("d,a,bound_1e_sum,bound_1e_single,single_valid,bound_2e\n");
                    for dd in 0..=t.d_range() {
                        let b = bound_1e(&params, dd, n as u64);
                        let b2 = cc
                            .as_ref()
                            .map(|cc| {
                                ratio_string(&bound_2e(
                                    cc,
                                    params.p_size,
                                    block.n(),
                                    n as u64,
                                    dd,
                                ))
                            })
                            .unwrap_or_default();
                        csv.push_str(&format!(
                            "{dd},{},{},{},{},{b2}\n",
                            t.a(dd),
                            b.sum_form,
                            b.single_term,
                            b.single_term_valid,
                        ));
                    }
                    emit(&out, &csv)?;
                }
            }
            Ok(true)
        }
        Command::Trace {
            spec,
            memory,
            info,
            stab,
            out,
            budget,
        } => {
            let loaded = load_seed(&spec)?;
            let seed = loaded.seed;
            let budgets = budget.budgets();
            let graph = build_graph(&seed, &budgets)?;
            let c = classify_with_graph(&graph);
            let sp = seed.space();
            let mem = if seed.m() == 0 {
                Word::zero(sp, 0)
            } else {
                Word::parse(sp, memory.trim())?
            };
            let info_blocks = parse_blocks(&seed, &info, seed.k())?;
            let stab_blocks = match stab {
                Some(s) => parse_blocks(&seed, &s, seed.s())?,
                None => vec![Word::zero(sp, seed.s()); info_blocks.len()],
            };
            let input = ConvInput::new(mem, info_blocks, stab_blocks)?;
            let t = trace_and_detours(&seed, &c, &input)?;
            emit(&out, &(serde_json::to_string_pretty(&t)? + "\n"))?;
            Ok(true)
        }
        Command::TurboDistance {
            outer,
            inner,
            n,
            seed,
            dq,
            out,
            budget,
        } => {
            let outer_block = load_seed(&outer)?.block.ok_or_else(|| {
                Error::Spec("the outer encoder must be memoryless (m = 0)".into())
            })?;
            let inner_seed = load_seed(&inner)?.seed;
            let budgets = budget.budgets();
            let size = n * outer_block.n();
            let interleaver = match seed {
                Some(s) => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
                    Interleaver::sample(&mut rng, size, outer_block.space())?
                }
                None => Interleaver::identity(outer_block.space(), size),
            };
            let t = TurboInstance::new(outer_block, inner_seed, interleaver, n)?;
            let report = turbo_distance_exact(&t, dq, &budgets)?;
            emit(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(true)
        }
        Command::Mc {
            outer,
            inner,
            n,
            trials,
            seed,
            d,
            dq,
            csv,
            out,
            budget,
        } => {
            let outer_block = load_seed(&outer)?.block.ok_or_else(|| {
                Error::Spec("the outer encoder must be memoryless (m = 0)".into())
            })?;
            let inner_seed = load_seed(&inner)?.seed;
            let report = monte_carlo_distance(
                &outer_block,
                &inner_seed,
                n,
                trials,
                seed,
                dq,
                &d,
                &budget.budgets(),
            )?;
            let mut jsonl = String::new();
            for s in &report.samples {
                jsonl.push_str(&serde_json::to_string(s)?);
                jsonl.push('\n');
            }
            jsonl.push_str(&serde_json::to_string(&serde_json::json!({
                "summary": report.summary
            }))?);
            jsonl.push('\n');
            emit(&out, &jsonl)?;
            if let Some(csv_path) = csv {
                let mut rows = String::from("n,trial,d_c\n");
                for s in &report.samples {
                    rows.push_str(&format!("{n},{},{}\n", s.trial, s.d_c));
                }
                std::fs::write(csv_path, rows)?;
            }
            Ok(true)
        }
        Command::Experiment {
            config,
            out,
            seed,
            trials,
            n_grid,
            alpha,
            x,
            mode,
            budget,
        } => {
            let mut cfg: ExperimentConfig = load_config(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(g) = n_grid {
                cfg.n_grid = g;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(xv) = x {
                cfg.x = xv;
            }
            if let Some(m) = mode {
                cfg.mode = match m.as_str() {
                    "poly" => turbolab::bounds::SumMode::Poly,
                    "sublog" => turbolab::bounds::SumMode::Sublog,
                    other => {
                        return Err(Error::Spec(format!(
                            "mode must be poly or sublog, got {other:?}"
                        )))
                    }
                };
            }
            if let Some(b) = budget.budget {
                cfg.budgets = Some(Budgets {
                    max_enumeration: b,
                    max_spectrum_inputs: b,
                    ..cfg.budgets.unwrap_or_default()
                });
            }
            let out_dir = out.unwrap_or_else(|| default_run_dir(cfg.master_seed));
            let threads = lab_threads();
            let manifest = run_experiment(cfg, &out_dir, threads)?;
            println!(
                "run complete: {} files in {}{}",
                manifest.outputs.len(),
                out_dir.display(),
                if manifest.skipped.is_empty() {
                    String::new()
                } else {
                    format!(" ({} notices)", manifest.skipped.len())
                }
            );
            for note in &manifest.skipped {
                println!("notice: {note}");
            }
            Ok(true)
        }
        Command::Verify { corpus, budget } => {
            let report = verify_corpus(&corpus, &budget.budgets())?;
            for w in &report.warnings {
                println!("warning: {w}");
            }
            for c in &report.checks {
                println!(
                    "{} {} :: {}{}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.subject,
                    c.check,
                    if c.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", c.detail)
                    }
                );
            }
            Ok(report.all_pass())
        }
    }
}

fn lab_threads() -> usize {
    std::env::var("LAB_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn main() -> ExitCode {
    // a global cap also applies to the non-experiment commands
    let threads = lab_threads();
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Spec(_) | Error::Json(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
