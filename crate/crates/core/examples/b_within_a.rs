//! `y ~ A + A:B`: the Type III A:B test is the test of B within A, checked
//! against the restricted-model SSE difference.

use typ3::design::{effect_columns, EffectId};
use typ3::engine::{anova_table, build_context, factor_term, h_star, AnalysisOptions, SsType};
use typ3::oracle::rmfm_oracle;
use typ3::{formula, sample};

fn main() -> typ3::Result<()> {
    let layout = sample::layout();
    let data = sample::full()?;
    let spec = formula::parse("y ~ A + A:B", layout.names(), &[])?;
    let ctx = build_context(&layout, &spec, &data)?;

    let ab = factor_term(EffectId::parse("11")?);
    let hs = h_star(&layout, &spec, &ab)?;
    let names: Vec<String> = hs.effects.iter().map(|j| j.label(layout.names())).collect();
    println!("H* sums the projectors for {{{}}}", names.join(", "));

    let report = anova_table(&ctx, data.response(), &[SsType::III], &AnalysisOptions::default())?;
    let row = report.row(SsType::III, "A:B").expect("A:B row");
    let a_only = ctx.incidence(0) * effect_columns(&layout, &EffectId::parse("10")?)?;
    let restricted = rmfm_oracle(ctx.x(), &a_only, data.response())?;
    println!("type III A:B  {:.4} on {} df", row.ss, row.df);
    println!("B within A    {restricted:.4}");
    Ok(())
}
