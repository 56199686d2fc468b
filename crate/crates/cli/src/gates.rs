use std::fmt::Write as _;

use mpgrand_core::reference::{gate_cost_delta, gate_cost_reference};
use mpgrand_core::{pmult, BitVector, GateCostReport, PolarCode, ReliabilitySequence, RowIndexSets};
use serde_json::json;

use crate::{CliError, GatesArgs, ReportFormat};

struct Row {
    n: u32,
    block_length: usize,
    report: GateCostReport,
    measured_steps: usize,
}

fn measure(seq: &ReliabilitySequence, n: u32) -> Result<Row, CliError> {
    let code = PolarCode::build(seq, n)?;
    let rows = RowIndexSets::new(code.parity_check())?;
    let report = rows.cost_report();
    let measured = pmult(&rows, &BitVector::zeros(code.block_length()))?;
    if measured.steps != report.parallel_steps
        || measured.and_gates != report.and_gates
        || measured.xor_gates != report.xor_gates
    {
        return Err(CliError::Runtime(format!("n={n}: measured circuit counters disagree with the closed form")));
    }
    Ok(Row { n, block_length: code.block_length(), report, measured_steps: measured.steps })
}

fn text(rows: &[Row]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:>2} {:>5} {:>6} {:>5} {:>5} {:>9} {:>5} | {:>6} {:>5} {:>5} {:>7} {:>5} | delta",
        "n", "N", "AND", "XOR", "maxW", "sparsity", "steps", "refAND", "refXOR", "rmaxW", "rspars", "rstep"
    )
    .unwrap();
    for r in rows {
        let c = &r.report;
        write!(
            s,
            "{:>2} {:>5} {:>6} {:>5} {:>5} {:>8.2}% {:>5} |",
            r.n,
            r.block_length,
            c.and_gates,
            c.xor_gates,
            c.max_row_weight,
            100.0 * c.sparsity,
            r.measured_steps
        )
        .unwrap();
        match gate_cost_reference(r.n) {
            Some(p) => {
                let d = gate_cost_delta(c, p);
                let verdict = if d.is_zero() {
                    "match".to_string()
                } else {
                    format!(
                        "AND {:+} XOR {:+} maxW {:+} sparsity {:+.2} steps {:+}",
                        d.and_gates, d.xor_gates, d.max_row_weight, d.sparsity_percent, d.steps
                    )
                };
                writeln!(
                    s,
                    " {:>6} {:>5} {:>5} {:>6.2}% {:>5} | {verdict}",
                    p.and_gates, p.xor_gates, p.max_row_weight, p.sparsity_percent, p.steps
                )
                .unwrap();
            }
            None => writeln!(s, " (no reference)").unwrap(),
        }
    }
    s
}

fn json(rows: &[Row]) -> String {
    let items: Vec<_> = rows
        .iter()
        .map(|r| {
            let c = &r.report;
            let mut item = json!({
                "n": r.n,
                "N": r.block_length,
                "and_gates": c.and_gates,
                "xor_gates": c.xor_gates,
                "two_input_xors": c.two_input_xors,
                "sparsity": c.sparsity,
                "max_row_weight": c.max_row_weight,
                "steps": r.measured_steps,
            });
            if let Some(p) = gate_cost_reference(r.n) {
                let d = gate_cost_delta(c, p);
                item["reference"] = json!({
                    "and_gates": p.and_gates,
                    "xor_gates": p.xor_gates,
                    "sparsity_percent": p.sparsity_percent,
                    "max_row_weight": p.max_row_weight,
                    "steps": p.steps,
                });
                item["delta"] = json!({
                    "and_gates": d.and_gates,
                    "xor_gates": d.xor_gates,
                    "sparsity_percent": d.sparsity_percent,
                    "max_row_weight": d.max_row_weight,
                    "steps": d.steps,
                });
            }
            item
        })
        .collect();
    serde_json::to_string_pretty(&items).unwrap() + "\n"
}

pub fn run(seq: &ReliabilitySequence, args: &GatesArgs) -> Result<(), CliError> {
    let exponents: Vec<u32> = match args.selection.n {
        Some(n) => vec![n],
        None => (5..=10).collect(),
    };
    let rows = exponents.into_iter().map(|n| measure(seq, n)).collect::<Result<Vec<_>, _>>()?;
    let body = match args.format {
        ReportFormat::Text => text(&rows),
        ReportFormat::Json => json(&rows),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(())
}
