//! Summation helpers shared by the numeric modules.

use std::ops::Add;

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so results are bitwise reproducible for a given input order.
pub fn pairwise_sum<T: Copy + Add<Output = T>>(values: &[T], zero: T) -> T {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(zero, |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid], zero) + pairwise_sum(&values[mid..], zero)
}
