//! Cancellation-free helpers for the parametric families.

#[allow(unused_imports)]
use num_traits::Float;

/// n-th derivative of `g_k(z) = (e^z - Σ_{j<k} z^j/j!) / z^k = Σ_{j≥0} z^j/(j+k)!`.
///
/// Power series for `|z| ≤ 2`, closed form through Leibniz' rule elsewhere.
pub(crate) fn exp_tail(k: u32, n: u32, z: f64) -> f64 {
    if z.abs() <= 2.0 {
        // Σ_j (j+1)(j+2)..(j+n) z^j / (j+n+k)!
        let mut denom = 1.0;
        for i in 1..=(n + k) {
            denom *= i as f64;
        }
        let mut rising = 1.0;
        for i in 1..=n {
            rising *= i as f64;
        }
        let mut power = 1.0;
        let mut sum = 0.0;
        for j in 0..48u32 {
            let term = rising * power / denom;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && j > 4 {
                break;
            }
            power *= z;
            rising = rising * (j + n + 1) as f64 / (j + 1) as f64;
            denom *= (j + n + k + 1) as f64;
        }
        sum
    } else {
        // d^n [ (e^z - P_{k-1}(z)) z^{-k} ]
        let ez = z.exp();
        let mut total = 0.0;
        let mut binom = 1.0;
        for i in 0..=n {
            // i-th derivative of e^z - P_{k-1}(z) is e^z - P_{k-1-i}(z)
            let head = if i < k { taylor_head(k - 1 - i, z) } else { 0.0 };
            let numer = ez - head;
            let r = n - i;
            let mut coef = 1.0;
            for j in 0..r {
                coef *= -((k + j) as f64);
            }
            let inv = z.powi(-((k + r) as i32));
            total += binom * numer * coef * inv;
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        total
    }
}

/// `Σ_{j=0}^{m} z^j / j!`
fn taylor_head(m: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=m {
        term *= z / j as f64;
        sum += term;
    }
    sum
}

/// Neumaier-compensated sum, accumulated in iteration order.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_tail(k: u32, z: f64) -> f64 {
        (z.exp() - taylor_head(k - 1, z)) / z.powi(k as i32)
    }

    #[test]
    fn tail_branches_meet() {
        for k in 1..=5 {
            for n in 0..=3 {
                let a = exp_tail(k, n, 2.0);
                let b = exp_tail(k, n, 2.0 + 1e-12);
                assert!((a - b).abs() <= 1e-9 * a.abs(), "k={k} n={n}: {a} vs {b}");
                let a = exp_tail(k, n, -2.0);
                let b = exp_tail(k, n, -2.0 - 1e-12);
                assert!((a - b).abs() <= 1e-9 * a.abs(), "k={k} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tail_values() {
        assert!((exp_tail(3, 0, 0.0) - 1.0 / 6.0).abs() < 1e-16);
        assert!((exp_tail(3, 1, 0.0) - 1.0 / 24.0).abs() < 1e-16);
        assert!((exp_tail(4, 2, 0.0) - 2.0 / 720.0).abs() < 1e-16);
        for &z in &[-7.5, -3.0, 0.7, 2.5, 9.0] {
            let d = direct_tail(3, z);
            assert!((exp_tail(3, 0, z) - d).abs() < 1e-12 * d.abs());
        }
        // derivative by central difference
        for &z in &[-4.0, -1.0, 0.3, 1.9, 3.5] {
            for n in 0..3 {
                let h = 1e-5;
                let fd = (exp_tail(3, n, z + h) - exp_tail(3, n, z - h)) / (2.0 * h);
                let an = exp_tail(3, n + 1, z);
                assert!((fd - an).abs() < 1e-7 * (1.0 + an.abs()), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn first_tail_is_exprel() {
        assert_eq!(exp_tail(1, 0, 0.0), 1.0);
        for z in [1e-3f64, -0.5, 1.7] {
            let want = z.exp_m1() / z;
            assert!((exp_tail(1, 0, z) - want).abs() < 1e-15 * want);
        }
    }

    #[test]
    fn compensated_beats_naive() {
        let v = [1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        assert!((compensated_sum(v) - 4e-16).abs() < 1e-30);
    }
}
