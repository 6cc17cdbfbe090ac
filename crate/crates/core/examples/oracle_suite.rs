//! A short randomized engine-versus-oracle run, with the worst discrepancy
//! seen for each kind of check.

use std::collections::BTreeMap;

use typ3::oracle::{run_suite, CheckStatus};

fn main() -> typ3::Result<()> {
    let result = run_suite(1, 30, false)?;
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for r in result.reports.iter().filter(|r| r.status != CheckStatus::Info) {
        let kind = r.check.split('[').next().unwrap_or(&r.check).to_string();
        let w = worst.entry(kind).or_insert(0.0);
        *w = w.max(r.discrepancy);
    }
    for (kind, d) in &worst {
        println!("{kind:<28} {d:.1e}");
    }
    let s = &result.summary;
    println!(
        "{} scenarios, {} checks, {} failed; disjoint tested spans in {:.0}% of scenarios",
        s.scenarios,
        s.checks,
        s.failed,
        100.0 * s.disjoint_fraction
    );
    Ok(())
}
