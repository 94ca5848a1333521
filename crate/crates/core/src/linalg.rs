use nalgebra::{DMatrix, DVector};

/// Builds `I - gamma * P` where row `i` of `P` is `rows[i]`.
pub(crate) fn discounted_system(rows: &[&[f64]], gamma: f64) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - gamma * rows[i][j]
    })
}

/// Dense LU solve. Panics when the matrix is singular, which cannot happen
/// for `I - gamma * P` with a stochastic `P` and `gamma < 1`.
pub(crate) fn solve(a: DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = DVector::from_column_slice(b);
    a.lu()
        .solve(&rhs)
        .expect("internal error: singular discounted system")
        .iter()
        .copied()
        .collect()
}
