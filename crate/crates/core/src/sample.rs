//! A small unbalanced 3×3 data set used throughout the examples and tests.

use crate::design::{Dataset, FactorLayout};
use crate::error::Result;

/// Responses for the nine cells of a 3×3 layout, in cell order
/// (`(1,1), (1,2), …, (3,3)`). Cell sizes are `1,2,3,3,1,2,3,2,1`.
pub fn cell_responses() -> Vec<Vec<f64>> {
    vec![
        vec![50.0],
        vec![22.2, 111.7],
        vec![65.3, 53.2, 54.2],
        vec![101.3, 42.0, 95.5],
        vec![65.4],
        vec![99.8, 126.8],
        vec![87.3, 88.6, 133.2],
        vec![67.0, 70.2],
        vec![106.2],
    ]
}

/// Factors `A` and `B` at three levels each.
pub fn layout() -> FactorLayout {
    FactorLayout::new(vec!["A", "B"], vec![3, 3]).expect("valid layout")
}

/// All 18 observations.
pub fn full() -> Result<Dataset> {
    Dataset::from_cells(&cell_responses())
}

/// The data with every observation in the listed cells removed.
pub fn without_cells(cells: &[usize]) -> Result<Dataset> {
    let mut data = cell_responses();
    for &c in cells {
        data[c].clear();
    }
    Dataset::from_cells(&data)
}

/// Cell `(1,1)` empty.
pub fn deleted() -> Result<Dataset> {
    without_cells(&[0])
}

/// Cells `(1,1)`, `(2,2)`, `(3,3)` empty.
pub fn diagonal_empty() -> Result<Dataset> {
    without_cells(&[0, 4, 8])
}
