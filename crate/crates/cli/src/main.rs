use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use stabring::group::load_group;
use stabring::oracle::{oracle_summary, sp_orbit_oracle};
use stabring::orbits::{orbits_for_genus, DEFAULT_STATE_CAP};
use stabring::pipeline::{resolve_group_arg, run_pipeline, PipelineConfig};
use stabring::report::emit_report;

#[derive(Parser)]
#[command(name = "stabring", version, about = "Orbit rings of Hurwitz vectors and their stability checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// orbit table cache (STABRING_CACHE takes precedence)
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the orbits of G^{2n}.
    Orbits {
        /// short name (trivial, z<k>, klein, s3, d4, q8) or path to a spec file
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: u64,
    },
    /// Print the group-homology oracles for a group.
    Oracle {
        #[arg(long)]
        group: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Run {
            config,
            threads,
            cache,
            out,
        } => {
            let mut cfg = PipelineConfig::load(&config)
                .with_context(|| format!("loading config {}", config.display()))?;
            if threads.is_some() {
                cfg.threads = threads;
            }
            if cache.is_some() {
                cfg.cache_dir = cache;
            }
            if out.is_some() {
                cfg.out_dir = out;
            }
            let report = run_pipeline(&cfg)?;
            print!("{}", report.summary_text());
            if let Some(dir) = &cfg.out_dir {
                for p in emit_report(&report, dir)? {
                    eprintln!("wrote {}", p.display());
                }
            }
            Ok(report.exit_code() as u8)
        }
        Cmd::Orbits {
            group,
            n,
            depth,
            state_cap,
        } => {
            let g = load_group(&resolve_group_arg(&group)?)?;
            let t = orbits_for_genus(&g, n, depth, state_cap)?;
            println!("{g}, n = {n}: {} orbits", t.count());
            let sizes = t.orbit_sizes();
            for (i, size) in sizes.iter().enumerate() {
                let rep = t.rep_tuple(i as u32);
                let b = stabring::freegroup::evaluated_boundary(&g, &rep);
                println!("  orbit {i}: size {size}, boundary {b}, rep {rep:?}");
            }
            Ok(0)
        }
        Cmd::Oracle { group } => {
            let g = load_group(&resolve_group_arg(&group)?)?;
            let s = oracle_summary(&g)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
            if g.is_abelian() {
                for n in 1..=3 {
                    match sp_orbit_oracle(&g, n, 1 << 24) {
                        Ok(c) => println!("symplectic orbits, n = {n}: {c}"),
                        Err(e) => println!("symplectic orbits, n = {n}: {e}"),
                    }
                }
            }
            Ok(0)
        }
    }
}
