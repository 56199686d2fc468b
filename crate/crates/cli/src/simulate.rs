use std::fs::File;
use std::io::BufWriter;

use mpgrand_core::sim::{format_sig6, run_bler, write_results, OutputFormat, SimConfig};
use mpgrand_core::ReliabilitySequence;

use crate::{CliError, DataFormat, SimulateArgs};

pub fn run(seq: &ReliabilitySequence, args: &SimulateArgs) -> Result<(), CliError> {
    let config = SimConfig {
        n: args.n,
        order: args.mqam,
        cutoff: args.cutoff,
        ebn0_grid: args.ebn0.0.clone(),
        trials_per_point: args.trials,
        master_seed: args.seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if config.effective_cutoff() < config.cutoff {
        eprintln!(
            "warning: S={} exceeds the {} symbols per block; using S={}",
            config.cutoff,
            config.symbols_per_block(),
            config.effective_cutoff()
        );
    }

    let format = match args.format {
        DataFormat::Csv => OutputFormat::Csv,
        DataFormat::Json => OutputFormat::Json,
    };
    let path = args.out.clone().unwrap_or_else(|| config.default_file_name(format).into());

    let points = run_bler(&config, seq, args.workers)?;

    let file = File::create(&path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
    write_results(&config, &points, format, BufWriter::new(file))?;

    println!(
        "N={} {}-QAM S={} trials/point={} seed={}",
        config.block_length(),
        config.order,
        config.effective_cutoff(),
        config.trials_per_point,
        config.master_seed
    );
    println!("{:>8} {:>10} {:>10} {:>12} {:>12}", "Eb/N0", "BLER", "uncoded", "errors", "mean TEPs");
    for p in &points {
        println!(
            "{:>8} {:>10} {:>10} {:>12} {:>12}",
            format_sig6(p.ebn0_db),
            format_sig6(p.bler),
            format_sig6(p.uncoded_bler()),
            p.block_errors,
            format_sig6(p.mean_queries)
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}
