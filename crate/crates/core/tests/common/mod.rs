#![allow(dead_code)]

use num_complex::Complex64;

/// Permanent by the defining sum over all permutations.
pub fn naive_permanent(a: &[Complex64], n: usize) -> Complex64 {
    fn go(a: &[Complex64], n: usize, row: usize, used: &mut [bool]) -> Complex64 {
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if !used[col] {
                used[col] = true;
                acc += a[row * n + col] * go(a, n, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    go(a, n, 0, &mut vec![false; n])
}

pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
