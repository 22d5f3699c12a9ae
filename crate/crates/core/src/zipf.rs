//! Zipf-Mandelbrot laws `f(i; N, q, s) = (i + q)^(−s) / H_{N,q,s}` on
//! `{1, …, N}` and the divergence bounds between two such laws.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::divergence::{divergence_bounds, DivergenceTheorem, GeneratorFunction, ProbabilityVector};
use crate::elr::BoundReport;
use crate::error::{Error, Result};
use crate::special::compensated_sum;

/// `H_{N,q,s} = Σ_{i=1}^{N} (i + q)^(−s)`.
///
/// The terms decrease in `i`, so the sum runs in descending magnitude; it is
/// compensated to keep the result reproducible to the last bit.
pub fn harmonic_sum(n: usize, q: f64, s: f64) -> Result<f64> {
    check_params(n, q, s)?;
    Ok(compensated_sum((1..=n).map(|i| term(i, q, s))))
}

fn term(i: usize, q: f64, s: f64) -> f64 {
    (i as f64 + q).powf(-s)
}

fn check_params(n: usize, q: f64, s: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "N", value: 0.0 });
    }
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter { name: "q", value: q });
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter { name: "s", value: s });
    }
    Ok(())
}

/// A materialized Zipf-Mandelbrot law. `q = 0` is Zipf's law.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfMandelbrot {
    n: usize,
    q: f64,
    s: f64,
    normalizer: f64,
    pmf: ProbabilityVector,
}

impl ZipfMandelbrot {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `H_{N,q,s}`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn pmf(&self) -> &ProbabilityVector {
        &self.pmf
    }
}

/// Build the law for `N ≥ 1`, `q ≥ 0`, `s > 0`.
pub fn zm_distribution(n: usize, q: f64, s: f64) -> Result<ZipfMandelbrot> {
    let normalizer = harmonic_sum(n, q, s)?;
    let pmf: Vec<f64> = (1..=n).map(|i| term(i, q, s) / normalizer).collect();
    Ok(ZipfMandelbrot {
        n,
        q,
        s,
        normalizer,
        pmf: ProbabilityVector::new(pmf)?,
    })
}

/// `(min pᵢ/qᵢ, max pᵢ/qᵢ)` for `p = a`, `q = b`.
///
/// The ratios are taken from the materialized pmfs, so the interval matches
/// the nodes used by the bound computation exactly. Both values straddle 1
/// mathematically; rounding is absorbed by clamping them onto 1.
pub fn zm_ratio_extrema(a: &ZipfMandelbrot, b: &ZipfMandelbrot) -> Result<(f64, f64)> {
    if a.n != b.n {
        return Err(Error::LengthMismatch { left: a.n, right: b.n });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&pi, &qi) in a.pmf.entries().iter().zip(b.pmf.entries()) {
        let r = pi / qi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo.min(1.0), hi.max(1.0)))
}

/// Bound report between two Zipf-Mandelbrot laws.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfBoundReport {
    pub a: (usize, f64, f64),
    pub b: (usize, f64, f64),
    pub m: f64,
    pub big_m: f64,
    pub report: BoundReport,
}

/// Divergence bounds for `p = a`, `q = b` on `[m, M]` from
/// [`zm_ratio_extrema`]. Identical laws give a degenerate interval.
pub fn zm_divergence_bounds(
    a: &ZipfMandelbrot,
    b: &ZipfMandelbrot,
    gen: &GeneratorFunction,
    theorem: DivergenceTheorem,
) -> Result<ZipfBoundReport> {
    let (m, big_m) = zm_ratio_extrema(a, b)?;
    if !(m < big_m) {
        return Err(Error::DegenerateInterval { lo: m, hi: big_m });
    }
    let report = divergence_bounds(&a.pmf, &b.pmf, gen, m, big_m, theorem)?;
    Ok(ZipfBoundReport {
        a: (a.n, a.q, a.s),
        b: (b.n, b.q, b.s),
        m,
        big_m,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::generator;
    use crate::elr::Orientation;

    #[test]
    fn harmonic_sum_examples() {
        assert_eq!(harmonic_sum(1, 0.0, 2.0).unwrap(), 1.0);
        assert_eq!(harmonic_sum(2, 0.0, 1.0).unwrap(), 1.5);
        assert!((harmonic_sum(3, 1.0, 1.0).unwrap() - (0.5 + 1.0 / 3.0 + 0.25)).abs() < 1e-15);
        assert!(harmonic_sum(0, 0.0, 1.0).is_err());
        assert!(zm_distribution(3, -1.0, 1.0).is_err());
        assert!(zm_distribution(3, 0.0, 0.0).is_err());
    }

    #[test]
    fn pmf_examples() {
        let z = zm_distribution(2, 0.0, 1.0).unwrap();
        assert!((z.pmf().entries()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((z.pmf().entries()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(zm_distribution(1, 3.0, 2.0).unwrap().pmf().entries(), &[1.0]);
        for &p in zm_distribution(3, 0.0, 1e-4).unwrap().pmf().entries() {
            assert!((p - 1.0 / 3.0).abs() < 1e-3);
        }
    }

    #[test]
    fn ratio_extrema() {
        let a = zm_distribution(2, 0.0, 1.0).unwrap();
        let b = zm_distribution(2, 0.0, 2.0).unwrap();
        let (m, big_m) = zm_ratio_extrema(&a, &b).unwrap();
        assert!((m - 5.0 / 6.0).abs() < 1e-15);
        assert!((big_m - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(zm_ratio_extrema(&a, &a).unwrap(), (1.0, 1.0));
        let c = zm_distribution(3, 0.0, 2.0).unwrap();
        assert!(zm_ratio_extrema(&a, &c).is_err());
    }

    #[test]
    fn bounds() {
        let a = zm_distribution(2, 0.0, 1.0).unwrap();
        let b = zm_distribution(2, 0.0, 2.0).unwrap();
        let h = generator("harmonic", &[]).unwrap();
        let r = zm_divergence_bounds(&a, &b, &h, DivergenceTheorem::Derivative).unwrap();
        assert!(r.report.brackets(1e-12));
        let (m, big_m) = (r.m, r.big_m);
        let d = crate::divergence::f_divergence(a.pmf(), b.pmf(), &h).unwrap();
        let direct = (big_m - 1.0) / (big_m - m) * h.value(m) + (1.0 - m) / (big_m - m) * h.value(big_m) - d;
        assert!((r.report.mid - direct).abs() < 1e-14);
        let kl = generator("kl", &[]).unwrap();
        let r = zm_divergence_bounds(&a, &b, &kl, DivergenceTheorem::Taylor).unwrap();
        assert_eq!(r.report.orientation, Orientation::Reversed);
        assert!(r.report.brackets(1e-12));
        assert!(matches!(
            zm_divergence_bounds(&a, &a, &kl, DivergenceTheorem::Taylor),
            Err(Error::DegenerateInterval { .. })
        ));
    }
}
