/// Neumaier-compensated sum, visiting terms from smallest to largest magnitude.
pub(crate) fn compensated_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for &t in terms.iter() {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - next) + t;
        } else {
            carry += (t - next) + sum;
        }
        sum = next;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let mut terms = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&mut terms), 2.0);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(compensated_sum(&mut []), 0.0);
    }
}
