use clap::Parser;

use cocircular::cli::{run, RunConfig, THREADS_ENV};

fn main() {
    if let Some(threads) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if threads > 0 {
            // Only fails if a global pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let config = RunConfig::parse();
    std::process::exit(run(config));
}
