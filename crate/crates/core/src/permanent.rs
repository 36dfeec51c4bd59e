//! Matrix permanents, the Fock-basis transition amplitudes of linear optics.

use num_complex::Complex64;

/// Permanent of the `n×n` row-major matrix `a` by Ryser's inclusion-exclusion
/// formula, walking column subsets in Gray-code order (`O(2ⁿ·n)`).
///
/// The empty matrix has permanent 1.
pub fn permanent(a: &[Complex64], n: usize) -> Complex64 {
    assert_eq!(a.len(), n * n, "permanent needs a square matrix");
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return a[0],
        2 => return a[0] * a[3] + a[1] * a[2],
        _ => {}
    }
    assert!(
        n < usize::BITS as usize,
        "matrix too large for Ryser enumeration"
    );

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray = 0usize;
    for step in 1usize..(1 << n) {
        let col = step.trailing_zeros() as usize;
        let bit = 1 << col;
        gray ^= bit;
        if gray & bit != 0 {
            row_sums
                .iter_mut()
                .enumerate()
                .for_each(|(i, s)| *s += a[i * n + col]);
        } else {
            row_sums
                .iter_mut()
                .enumerate()
                .for_each(|(i, s)| *s -= a[i * n + col]);
        }
        let prod = row_sums
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        // (−1)^(n − |S|)
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}
