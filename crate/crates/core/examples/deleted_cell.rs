//! One empty cell: the Type III A test mixes an estimable marginal contrast
//! with a contrast that is not an ANOVA effect.

use typ3::engine::{anova_table, build_context, AnalysisOptions, SsType};
use typ3::report::classification_label;
use typ3::{formula, sample};

fn main() -> typ3::Result<()> {
    let layout = sample::layout();
    let data = sample::deleted()?;
    let spec = formula::parse("y ~ A*B", layout.names(), &[])?;
    let ctx = build_context(&layout, &spec, &data)?;
    let report = anova_table(&ctx, data.response(), &[SsType::III], &AnalysisOptions::default())?;

    for row in &report.table(SsType::III).expect("requested").rows {
        let d = row.df_detail.expect("type III detail");
        println!(
            "{}: SS {:.4} on {} df; estimable part {} of innate {}",
            row.label, row.ss, row.df, d.estimable_part, d.innate
        );
        for c in &row.contrasts {
            println!("    {:<12} {}", classification_label(&spec, &c.classification), c.label);
        }
    }
    Ok(())
}
