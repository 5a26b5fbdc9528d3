//! Multiset matching of affine points by greedy global nearest pairing.

use num_complex::Complex64;

/// Relative distance between two affine points.
pub fn point_distance(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    let d = ((a.0 - b.0).norm_sqr() + (a.1 - b.1).norm_sqr()).sqrt();
    let s = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt().max((b.0.norm_sqr() + b.1.norm_sqr()).sqrt());
    d / (1.0 + s)
}

/// Pairs every element of `small` with a distinct element of `big`.
///
/// Returns `(pairs, max_distance)` where `pairs[k] = index into big` for
/// `small[k]`. The pairing repeatedly takes the globally closest unused pair.
pub fn match_points(
    small: &[(Complex64, Complex64)],
    big: &[(Complex64, Complex64)],
) -> Option<(Vec<usize>, f64)> {
    if small.len() > big.len() {
        return None;
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(small.len() * big.len());
    for (i, a) in small.iter().enumerate() {
        for (j, b) in big.iter().enumerate() {
            cand.push((point_distance(*a, *b), i, j));
        }
    }
    cand.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_small = vec![false; small.len()];
    let mut used_big = vec![false; big.len()];
    let mut pairs = vec![usize::MAX; small.len()];
    let mut worst: f64 = 0.0;
    let mut left = small.len();
    for (d, i, j) in cand {
        if left == 0 {
            break;
        }
        if used_small[i] || used_big[j] {
            continue;
        }
        used_small[i] = true;
        used_big[j] = true;
        pairs[i] = j;
        worst = worst.max(d);
        left -= 1;
    }
    Some((pairs, worst))
}

/// Maximal pairing distance between two multisets of the same size.
pub fn multiset_distance(a: &[(Complex64, Complex64)], b: &[(Complex64, Complex64)]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    match_points(a, b).map_or(f64::INFINITY, |(_, d)| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permuted_multisets_match() {
        let p = |x: f64, y: f64| (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
        let a = vec![p(1.0, 2.0), p(3.0, 4.0), p(1.0, 2.0)];
        let b = vec![p(3.0, 4.0), p(1.0, 2.0), p(1.0, 2.0 + 1e-12)];
        assert!(multiset_distance(&a, &b) < 1e-12);
        let c = vec![p(3.0, 4.0), p(3.0, 4.0), p(1.0, 2.0)];
        assert!(multiset_distance(&a, &c) > 0.1);
    }
}
