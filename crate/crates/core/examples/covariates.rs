//! A covariate with a separate slope per level of A, on synthetic data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typ3::design::{Dataset, FactorLayout};
use typ3::engine::{anova_table, build_context, AnalysisOptions, SsType};
use typ3::formula;
use typ3::report::render_text;

fn main() -> typ3::Result<()> {
    let layout = FactorLayout::new(vec!["A", "B"], vec![2, 3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cells = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for cell in 0..layout.cells() {
        let a = layout.cell_levels(cell)[0];
        for _ in 0..4 {
            let xi: f64 = rng.random_range(0.0..10.0);
            let slope = if a == 0 { 1.5 } else { 0.5 };
            cells.push(cell);
            x.push(xi);
            y.push(10.0 + cell as f64 + slope * xi + rng.random_range(-1.0..1.0));
        }
    }
    let data = Dataset::new(cells, vec![("x".to_string(), x)], y)?;
    let spec = formula::parse("y ~ A*B + x + x:A", layout.names(), &["x".to_string()])?;
    let ctx = build_context(&layout, &spec, &data)?;
    let report = anova_table(&ctx, data.response(), &SsType::ALL, &AnalysisOptions::default())?;
    print!("{}", render_text(&ctx, &report));
    Ok(())
}
