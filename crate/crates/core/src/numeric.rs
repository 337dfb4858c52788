//! Small summation helpers shared by the norm code.

const LEAF: usize = 256;

/// Pairwise (cascade) sum of `f(x)` over a slice, in a fixed order.
pub(crate) fn pairwise_sum_by<T, F: Fn(&T) -> f64 + Copy>(items: &[T], f: F) -> f64 {
    if items.len() <= LEAF {
        let mut acc = 0.0;
        for x in items {
            acc += f(x);
        }
        acc
    } else {
        let mid = items.len() / 2;
        pairwise_sum_by(&items[..mid], f) + pairwise_sum_by(&items[mid..], f)
    }
}

pub(crate) fn pairwise_sum(items: &[f64]) -> f64 {
    pairwise_sum_by(items, |x| *x)
}

/// `(sum |x|^p * weight)^(1/p)` for finite p, `max |x|` for infinite p.
///
/// Nonzero terms are summed in ascending order, so the result depends only on
/// the multiset of nonzero magnitudes.
pub(crate) fn weighted_lp(magnitudes: &[f64], p: f64, weight: f64) -> f64 {
    assert!(p >= 1.0, "L^p exponent must be >= 1, got {p}");
    if p.is_infinite() {
        return magnitudes.iter().copied().fold(0.0, f64::max);
    }
    let mut terms: Vec<f64> = if p == 1.0 {
        magnitudes.to_vec()
    } else if p == 2.0 {
        magnitudes.iter().map(|x| x * x).collect()
    } else {
        magnitudes.iter().map(|x| x.powf(p)).collect()
    };
    terms.retain(|t| *t != 0.0);
    terms.sort_unstable_by(f64::total_cmp);
    (pairwise_sum(&terms) * weight).powf(1.0 / p)
}

/// Hölder conjugate exponent `p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}
