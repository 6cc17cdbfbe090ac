//! Type I, II and III tables for the complete 3×3 sample data.

use typ3::engine::{anova_table, build_context, AnalysisOptions, SsType};
use typ3::report::render_text;
use typ3::{formula, sample};

fn main() -> typ3::Result<()> {
    let layout = sample::layout();
    let data = sample::full()?;
    let spec = formula::parse("y ~ A*B", layout.names(), &[])?;
    let ctx = build_context(&layout, &spec, &data)?;
    let report = anova_table(&ctx, data.response(), &SsType::ALL, &AnalysisOptions::default())?;
    print!("{}", render_text(&ctx, &report));
    Ok(())
}
