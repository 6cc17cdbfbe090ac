//! Empty diagonal cells: no main effect is estimable, and only the single
//! interaction contrast is an ANOVA effect.

use typ3::engine::{anova_table, build_context, AnalysisOptions, Classification, SsType};
use typ3::{formula, sample};

fn main() -> typ3::Result<()> {
    let layout = sample::layout();
    let data = sample::diagonal_empty()?;
    let spec = formula::parse("y ~ A*B", layout.names(), &[])?;
    let ctx = build_context(&layout, &spec, &data)?;
    let report = anova_table(&ctx, data.response(), &[SsType::III], &AnalysisOptions::default())?;

    let mut anova = 0;
    let mut total = 0;
    for row in &report.table(SsType::III).expect("requested").rows {
        println!("{} ({} df)", row.label, row.df);
        for c in &row.contrasts {
            total += 1;
            let tag = match &c.classification {
                Classification::Anova(_) => {
                    anova += 1;
                    "anova"
                }
                Classification::NonAnova => "other",
            };
            println!("  {tag:<6} {}", c.label);
        }
    }
    println!("{anova} of {total} tested contrasts are ANOVA effects");
    Ok(())
}
