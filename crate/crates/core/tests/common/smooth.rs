//! Twenty smooth test functions, generic over the scalar type, with analytic
//! derivative bundles; and the ε-split divided-difference oracle.

#![allow(dead_code)]

use elr_core::bundle::FunctionBundle;
use elr_core::divided_diff::{dd_confluent, dd_recursive, MultiplicityPattern, PatternShape};
use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smooth {
    Cube,
    Quartic,
    Quintic,
    Exp,
    ExpDecay,
    Sin,
    Cos3,
    Ln,
    Sqrt,
    Recip,
    XLogX,
    Pow25,
    XExp,
    Atan,
    Log1p,
    PowNeg15,
    Sinh,
    CoshHalf,
    Gauss,
    Harmonic,
}

pub const ALL: [Smooth; 20] = [
    Smooth::Cube,
    Smooth::Quartic,
    Smooth::Quintic,
    Smooth::Exp,
    Smooth::ExpDecay,
    Smooth::Sin,
    Smooth::Cos3,
    Smooth::Ln,
    Smooth::Sqrt,
    Smooth::Recip,
    Smooth::XLogX,
    Smooth::Pow25,
    Smooth::XExp,
    Smooth::Atan,
    Smooth::Log1p,
    Smooth::PowNeg15,
    Smooth::Sinh,
    Smooth::CoshHalf,
    Smooth::Gauss,
    Smooth::Harmonic,
];

/// Scalars the test functions can be evaluated in: `f64`, and a
/// double-double type for the recursive oracle.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn of(v: f64) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn atan(self) -> Self;
}

impl Scalar for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
}

/// Double-double scalar. Wraps `TwoFloat` but supplies its own division,
/// exponential, logarithm and arctangent: the `twofloat` versions of these
/// are only good to between 1e-17 and 1e-12, which a third difference at
/// ε = 1e-4 inflates by 1e12.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd(pub TwoFloat);

const LN2_HI: f64 = 0.6931471805599453;
const LN2_LO: f64 = 2.3190468138462996e-17;

impl Dd {
    fn hi(self) -> f64 {
        self.0.hi()
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> f64 {
        f64::from(v.0)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0 + rhs.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0 - rhs.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    // Long division, one double-precision digit at a time.
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi() / rhs.hi();
        let r = self.0 - rhs.0 * TwoFloat::from(q1);
        let q2 = r.hi() / rhs.hi();
        let r = r - rhs.0 * TwoFloat::from(q2);
        let q3 = r.hi() / rhs.hi();
        Dd(TwoFloat::from(q1) + TwoFloat::from(q2) + TwoFloat::from(q3))
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Scalar for Dd {
    fn of(v: f64) -> Self {
        Dd(TwoFloat::from(v))
    }
    fn sqrt(self) -> Self {
        // One Newton step from the double root.
        let y = Dd::of(self.hi().sqrt());
        (y + self / y) / Dd::of(2.0)
    }
    fn sin(self) -> Self {
        Dd(self.0.sin())
    }
    fn cos(self) -> Self {
        Dd(self.0.cos())
    }
    fn exp(self) -> Self {
        let k = (self.hi() / LN2_HI).round();
        let ln2 = Dd::of(LN2_HI) + Dd::of(LN2_LO);
        let r = (self - ln2 * Dd::of(k)) / Dd::of(1024.0);
        let mut term = Dd::of(1.0);
        let mut sum = Dd::of(1.0);
        for n in 1..16 {
            term = term * r / Dd::of(n as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum * Dd::of(2f64.powi(k as i32))
    }
    fn ln(self) -> Self {
        let mut y = Dd::of(self.hi().ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::of(1.0);
        }
        y
    }
    fn atan(self) -> Self {
        let mut y = Dd::of(self.hi().atan());
        for _ in 0..2 {
            let (s, c) = (y.sin(), y.cos());
            y = y - (s - self * c) / (c + self * s);
        }
        y
    }
}

fn c<T: Scalar>(v: f64) -> T {
    T::of(v)
}

impl Smooth {
    pub fn eval<T: Scalar>(self, x: T) -> T {
        let one = T::of(1.0);
        match self {
            Smooth::Cube => x * x * x,
            Smooth::Quartic => x * x * x * x,
            Smooth::Quintic => x * x * x * x * x - c::<T>(2.0) * x * x,
            Smooth::Exp => x.exp(),
            Smooth::ExpDecay => (c::<T>(-2.0) * x).exp(),
            Smooth::Sin => x.sin(),
            Smooth::Cos3 => (c::<T>(3.0) * x).cos(),
            Smooth::Ln => x.ln(),
            Smooth::Sqrt => x.sqrt(),
            Smooth::Recip => one / x,
            Smooth::XLogX => x * x.ln(),
            Smooth::Pow25 => x * x * x.sqrt(),
            Smooth::XExp => x * x.exp(),
            Smooth::Atan => x.atan(),
            Smooth::Log1p => (one + x).ln(),
            Smooth::PowNeg15 => one / (x * x.sqrt()),
            Smooth::Sinh => (x.exp() - (-x).exp()) / c::<T>(2.0),
            Smooth::CoshHalf => ((x / c::<T>(2.0)).exp() + (-x / c::<T>(2.0)).exp()) / c::<T>(2.0),
            Smooth::Gauss => (x * x / c::<T>(4.0)).exp(),
            Smooth::Harmonic => c::<T>(2.0) * x / (one + x),
        }
    }

    /// First three derivatives at `x`.
    pub fn derivatives(self, x: f64) -> [f64; 3] {
        let e = x.exp();
        match self {
            Smooth::Cube => [3.0 * x * x, 6.0 * x, 6.0],
            Smooth::Quartic => [4.0 * x.powi(3), 12.0 * x * x, 24.0 * x],
            Smooth::Quintic => [5.0 * x.powi(4) - 4.0 * x, 20.0 * x.powi(3) - 4.0, 60.0 * x * x],
            Smooth::Exp => [e, e, e],
            Smooth::ExpDecay => {
                let g = (-2.0 * x).exp();
                [-2.0 * g, 4.0 * g, -8.0 * g]
            }
            Smooth::Sin => [x.cos(), -x.sin(), -x.cos()],
            Smooth::Cos3 => [-3.0 * (3.0 * x).sin(), -9.0 * (3.0 * x).cos(), 27.0 * (3.0 * x).sin()],
            Smooth::Ln => [1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3)],
            Smooth::Sqrt => [0.5 * x.powf(-0.5), -0.25 * x.powf(-1.5), 0.375 * x.powf(-2.5)],
            Smooth::Recip => [-1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4)],
            Smooth::XLogX => [x.ln() + 1.0, 1.0 / x, -1.0 / (x * x)],
            Smooth::Pow25 => [2.5 * x.powf(1.5), 3.75 * x.sqrt(), 1.875 / x.sqrt()],
            Smooth::XExp => [(1.0 + x) * e, (2.0 + x) * e, (3.0 + x) * e],
            Smooth::Atan => {
                let u = 1.0 + x * x;
                [1.0 / u, -2.0 * x / (u * u), (6.0 * x * x - 2.0) / u.powi(3)]
            }
            Smooth::Log1p => [1.0 / (1.0 + x), -1.0 / (1.0 + x).powi(2), 2.0 / (1.0 + x).powi(3)],
            Smooth::PowNeg15 => [-1.5 * x.powf(-2.5), 3.75 * x.powf(-3.5), -13.125 * x.powf(-4.5)],
            Smooth::Sinh => [x.cosh(), x.sinh(), x.cosh()],
            Smooth::CoshHalf => [0.5 * (x / 2.0).sinh(), 0.25 * (x / 2.0).cosh(), 0.125 * (x / 2.0).sinh()],
            Smooth::Gauss => {
                let g = (x * x / 4.0).exp();
                [0.5 * x * g, (0.5 + x * x / 4.0) * g, (0.75 * x + x.powi(3) / 8.0) * g]
            }
            Smooth::Harmonic => [2.0 / (1.0 + x).powi(2), -4.0 / (1.0 + x).powi(3), 12.0 / (1.0 + x).powi(4)],
        }
    }

    /// Bundle on `(0, ∞)` with analytic derivatives.
    pub fn bundle(self) -> FunctionBundle {
        FunctionBundle::new(0.0, f64::INFINITY, move |x: f64| self.eval(x))
            .unwrap()
            .with_d1(move |x| self.derivatives(x)[0])
            .with_d2(move |x| self.derivatives(x)[1])
            .with_d3(move |x| self.derivatives(x)[2])
    }
}

/// Base points `(t, t₀, t₁)` used by the oracle.
pub const BASES: [(f64, f64, f64); 2] = [(0.9, 1.6, 2.3), (2.2, 1.1, 0.6)];

pub const SHAPES: [PatternShape; 4] = [
    PatternShape::Double,
    PatternShape::DoubleDouble,
    PatternShape::Triple,
    PatternShape::Quadruple,
];

/// Confluent value and the recursive value on ε-split points, the latter in
/// double-double arithmetic. Repeated points are split symmetrically about
/// their location so the first-order splitting error cancels.
pub fn oracle_pair(f: Smooth, shape: PatternShape, base: (f64, f64, f64), eps: f64) -> (f64, f64) {
    let (t, t0, t1) = base;
    let tf = Dd::of;
    let e = tf(eps);
    let half = e / Dd::of(2.0);
    let (pattern, points): (MultiplicityPattern, [Dd; 4]) = match shape {
        PatternShape::Double => (
            MultiplicityPattern::double(t, t0, t1).unwrap(),
            [tf(t) - half, tf(t) + half, tf(t0), tf(t1)],
        ),
        PatternShape::DoubleDouble => (
            MultiplicityPattern::double_double(t, t0).unwrap(),
            [tf(t) - half, tf(t) + half, tf(t0) - half, tf(t0) + half],
        ),
        PatternShape::Triple => (
            MultiplicityPattern::triple(t, t0).unwrap(),
            [tf(t) - e, tf(t), tf(t) + e, tf(t0)],
        ),
        _ => (
            MultiplicityPattern::quadruple(t).unwrap(),
            [tf(t) - e - half, tf(t) - half, tf(t) + half, tf(t) + e + half],
        ),
    };
    let confluent = dd_confluent(&f.bundle(), &pattern).unwrap();
    let values: Vec<(Dd, Dd)> = points.iter().map(|&x| (x, f.eval(x))).collect();
    let recursive: f64 = dd_recursive(&values).unwrap().into();
    (confluent, recursive)
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
