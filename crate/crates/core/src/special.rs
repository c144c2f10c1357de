/// `ln n!` as a running sum of logarithms; exact enough for the Fock
/// dimensions used here (a few hundred at most).
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Table of `ln k!` for `k = 0..len`.
pub(crate) fn ln_factorial_table(len: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        table.push(acc);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        let table = ln_factorial_table(30);
        for (k, v) in table.iter().enumerate() {
            assert!((v - ln_factorial(k)).abs() < 1e-12);
        }
    }
}
