//! Runs a scenario file and prints one line per task.
//!
//!     cargo run --example scenario_runner -- scenarios/growth_d5.json

use gsubmod::scenario::{parse_scenario, run};

fn main() -> gsubmod::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/kneser_s4.json").into());
    let text = std::fs::read_to_string(&path).map_err(|e| gsubmod::Error::Validation(format!("{path}: {e}")))?;
    let scenario = parse_scenario(&text)?;
    let caps = scenario.effective_caps(|k| std::env::var(k).ok())?;
    let report = run(&scenario, &caps)?;
    println!("{} (order {}, {} points)", report.group, report.group_order, report.domain_size);
    for t in &report.tasks {
        let verdict = t.result.get("conclusion_holds").map(|v| format!(" conclusion_holds={v}")).unwrap_or_default();
        println!("  {:>2} {:<16} {:>8.2} ms{verdict}{}", t.index, t.task, t.elapsed_ms, if t.violation { "  VIOLATION" } else { "" });
    }
    println!("{} violations", report.violations);
    Ok(())
}
