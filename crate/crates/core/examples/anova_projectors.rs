//! The ANOVA projectors of a 2×3 layout: ranks, orthogonality and their sum.

use typ3::design::{centering_projector, FactorLayout};
use typ3::oracle::anova_projectors;

fn main() -> typ3::Result<()> {
    let layout = FactorLayout::new(vec!["A", "B"], vec![2, 3])?;
    let hs = anova_projectors(&layout)?;
    let levels = layout.levels();
    let mut sum = typ3::numeric::Matrix::zeros(layout.cells(), layout.cells());
    for (j, h) in &hs {
        let label = if j.is_intercept() { "mean".to_string() } else { j.label(layout.names()) };
        println!("{label:<5} trace {:.1}  innate df {}", h.trace(), j.innate_df(&levels));
        if !j.is_intercept() {
            sum += h;
        }
    }
    let mut cross = 0.0f64;
    for (i, (_, a)) in hs.iter().enumerate() {
        for (_, b) in &hs[i + 1..] {
            cross = cross.max((a * b).amax());
        }
    }
    println!("largest |H_j H_k| entry, j != k: {cross:.1e}");
    println!("largest gap to the centering projector: {:.1e}", (sum - centering_projector(layout.cells())).amax());
    Ok(())
}
