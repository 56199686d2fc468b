use mpgrand_core::channel::{stream_rng, transmit, ChannelParams};
use mpgrand_core::grand::{apply_tep, TestErrorPattern};
use mpgrand_core::{pmult, BitVector, Constellation, DecodeOutcome, Decoder, PolarCode, ReliabilitySequence};
use rand::Rng;

use crate::{CliError, DecodeOneArgs};

pub fn run(seq: &ReliabilitySequence, args: &DecodeOneArgs) -> Result<(), CliError> {
    let code = PolarCode::build(seq, args.n)?;
    let cst = Constellation::new(args.mqam)?;
    let decoder = Decoder::new(&code, cst.clone(), args.cutoff)?;
    let n = code.block_length();
    let mut rng = stream_rng(args.seed, 0, 0);

    let codeword = match &args.codeword {
        Some(hex) => {
            let c = BitVector::from_hex(hex, n).map_err(|e| CliError::Usage(format!("--codeword: {e}")))?;
            if !code.is_codeword(&c)? {
                return Err(CliError::Usage(format!("--codeword is not a codeword of the ({n},{}) code", code.dimension())));
            }
            c
        }
        None => code.encode(&BitVector::from_bools((0..code.dimension()).map(|_| rng.random::<bool>())))?,
    };
    let params = match args.ebn0 {
        Some(x) => ChannelParams::new(args.mqam, x).map_err(|e| CliError::Usage(e.to_string()))?,
        None => ChannelParams::noiseless(args.mqam)?,
    };

    let sent = cst.bits_to_symbols(&codeword);
    let received = transmit(&sent, &params, &mut rng);
    let cut = decoder.rank(&received);
    let s = cut.selected.len();

    println!("code: N={n} K={} {}-QAM, {} symbols, S={s} (requested {})", code.dimension(), args.mqam, sent.len(), args.cutoff);
    match args.ebn0 {
        Some(x) => println!("channel: Eb/N0={x} dB, sigma={:.6} lattice units", params.sigma),
        None => println!("channel: noiseless"),
    }
    println!("transmitted: {}", codeword.to_hex());
    println!();
    println!("{:>4} {:>10} {:>20} {:>10} {:>10} {:>5} {:>5}", "sym", "sent", "received", "hard", "L", "cands", "rank");
    for (k, rel) in cut.reliabilities.iter().enumerate() {
        let rank = cut.selected.iter().position(|&p| p == k).map_or("-".to_string(), |r| (r + 1).to_string());
        println!(
            "{:>4} {:>10} {:>20} {:>10} {:>10.6} {:>5} {:>5}",
            k,
            format!("({},{})", sent[k].i, sent[k].q),
            format!("({:.4},{:.4})", received[k].a, received[k].b),
            format!("({},{})", rel.hard.i, rel.hard.q),
            rel.likelihood,
            rel.candidates.len(),
            rank
        );
    }
    println!();
    println!("cut-off symbols (least reliable first): {:?}", cut.selected);
    println!("candidate counts: {:?}", cut.candidate_counts());
    println!("test error patterns: {} (bound 4^{s} = {})", cut.pattern_count(), 4u64.pow(s as u32));

    let rows = decoder.row_index_sets();
    let hard_bits = apply_tep(&cut, &TestErrorPattern::all_hard(s), &cst, n)?;
    let hard_syn = pmult(rows, &hard_bits)?;
    println!(
        "hard decision: {} syndrome {} ({} steps)",
        hard_bits.to_hex(),
        if hard_syn.syndrome.is_zero() { "zero" } else { "non-zero" },
        hard_syn.steps
    );

    let result = decoder.decode(&received)?;
    println!("patterns with zero syndrome: {}", result.patterns_valid);
    match &result.outcome {
        DecodeOutcome::Decoded { codeword: decoded, info } => {
            let winner = result.winner.as_ref().expect("decoded result carries its pattern");
            let verdict = pmult(rows, decoded)?;
            println!(
                "winning pattern: {:?} ({})",
                winner.assignment,
                if winner.substitutions() == 0 { "all-hard" } else { "substituted" }
            );
            println!(
                "winner syndrome: {} ({} steps), squared distance {:.6}",
                if verdict.syndrome.is_zero() { "zero" } else { "non-zero" },
                verdict.steps,
                result.selected_distance.unwrap_or(f64::NAN)
            );
            println!("decoded:     {}", decoded.to_hex());
            println!("info bits:   {}", info.to_hex());
            println!("outcome: {}", if *decoded == codeword { "success" } else { "mismatch" });
        }
        DecodeOutcome::Abandoned => println!("outcome: abandoned after {} patterns", result.queries_checked),
    }
    println!(
        "modeled latency: 2n + 2S + 4 = 2*{} + 2*{s} + 4 = {} cycles",
        code.exponent(),
        result.modeled_latency_cycles
    );
    Ok(())
}
