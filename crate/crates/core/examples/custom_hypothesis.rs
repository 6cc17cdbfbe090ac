//! Testing an arbitrary set of cell-mean contrasts by restricted-model
//! comparison, and checking which of them are estimable.

use typ3::engine::{build_context, rmfm_ss, HypothesisSpec};
use typ3::numeric::{Matrix, Tolerance};
use typ3::oracle::estimable_oracle;
use typ3::{formula, sample};

fn main() -> typ3::Result<()> {
    let layout = sample::layout();
    let data = sample::deleted()?;
    let spec = formula::parse("y ~ A*B", layout.names(), &[])?;
    let ctx = build_context(&layout, &spec, &data)?;

    // Row marginal means: level 2 vs 3, then level 1 vs 2.
    let third = 1.0 / 3.0;
    let rows = Matrix::from_row_slice(
        2,
        9,
        &[
            0., 0., 0., third, third, third, -third, -third, -third, //
            third, third, third, -third, -third, -third, 0., 0., 0.,
        ],
    );
    for r in 0..rows.nrows() {
        let g = ctx.lift_cell_rows(0, &rows.rows(r, 1).into_owned())?;
        let g: Vec<f64> = g.iter().copied().collect();
        println!("contrast {} estimable: {}", r + 1, estimable_oracle(ctx.x(), &g)?);
    }

    let first = HypothesisSpec::CellMeans { submodel: 0, rows: rows.rows(0, 1).into_owned() };
    let (ss, df) = rmfm_ss(&ctx, &first, data.response(), &Tolerance::default())?;
    println!("SS for the estimable contrast: {ss:.4} on {df} df");
    Ok(())
}
