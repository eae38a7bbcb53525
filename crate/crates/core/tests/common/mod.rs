//! Independent reference code for the integration tests: a second
//! construction of `ψ_i` on plain `BigRational` point lists, a direct
//! evaluator, and a sampling search for subadditivity violations.

#![allow(dead_code)]

use gjfacets::{PwlFunction, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Point = (BigRational, BigRational);

pub fn br(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_r(x: &BigRational) -> Rational {
    Rational::from(x.clone())
}

pub fn from_r(x: &Rational) -> BigRational {
    x.as_big().clone()
}

/// `ε_i = base · ratio^i`.
pub fn geometric_eps(base: &BigRational, ratio: &BigRational, count: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(count);
    let mut e = base.clone();
    for _ in 0..count {
        e = &e * ratio;
        out.push(e.clone());
    }
    out
}

/// The standard schedule `α = 1/2`, `ε_i = 2^{-2i-1}`.
pub fn standard_eps(count: usize) -> Vec<BigRational> {
    geometric_eps(&br(1, 2), &br(1, 4), count)
}

/// Builds `ψ_depth` from the triangle by inserting, in every ascending
/// piece `[a, b]`, the descent between `(a+b∓ε)/2`.
pub fn oracle_psi(alpha: &BigRational, eps: &[BigRational]) -> Vec<Point> {
    let mut pts = vec![
        (BigRational::zero(), BigRational::zero()),
        (alpha.clone(), BigRational::one()),
        (BigRational::one(), BigRational::zero()),
    ];
    let two = br(2, 1);
    let drop = |e: &BigRational| e / (&two * (BigRational::one() - alpha));
    for e in eps {
        let mut next = vec![pts[0].clone()];
        for w in pts.windows(2) {
            let ((a, fa), (b, fb)) = (&w[0], &w[1]);
            if fb > fa {
                let m = (fa + fb) / &two;
                next.push(((a + b - e) / &two, &m + drop(e)));
                next.push(((a + b + e) / &two, &m - drop(e)));
            }
            next.push((b.clone(), fb.clone()));
        }
        pts = next;
    }
    pts
}

pub fn oracle_gamma(alpha: &BigRational, eps: &[BigRational]) -> BigRational {
    let mut g = alpha.clone();
    let mut w = BigRational::one();
    for e in eps {
        g -= &w * e;
        w *= br(2, 1);
    }
    g
}

pub fn to_pwl(pts: &[Point]) -> PwlFunction {
    PwlFunction::new(
        pts.iter().map(|p| to_r(&p.0)).collect(),
        pts.iter().map(|p| to_r(&p.1)).collect(),
    )
    .expect("oracle points form a valid function")
}

pub fn points_of(f: &PwlFunction) -> Vec<Point> {
    f.breakpoints()
        .iter()
        .zip(f.values())
        .map(|(b, v)| (from_r(b), from_r(v)))
        .collect()
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn oracle_eval(pts: &[Point], x: &BigRational) -> BigRational {
    let x = frac(x);
    let k = pts.partition_point(|p| p.0 <= x);
    if k == 0 {
        return pts[0].1.clone();
    }
    if k == pts.len() {
        return pts[k - 1].1.clone();
    }
    let ((a, fa), (b, fb)) = (&pts[k - 1], &pts[k]);
    fa + (&x - a) * (fb - fa) / (b - a)
}

/// Float copy of a point list for cheap screening.
pub struct FloatPwl {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl FloatPwl {
    pub fn new(pts: &[Point]) -> Self {
        FloatPwl {
            xs: pts.iter().map(|p| p.0.to_f64().unwrap()).collect(),
            ys: pts.iter().map(|p| p.1.to_f64().unwrap()).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x - x.floor();
        let k = self.xs.partition_point(|b| *b <= x).clamp(1, self.xs.len() - 1);
        let (a, b) = (self.xs[k - 1], self.xs[k]);
        self.ys[k - 1] + (x - a) * (self.ys[k] - self.ys[k - 1]) / (b - a)
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> BigRational {
    let d: i64 = rng.gen_range(2..=1_000_000);
    br(rng.gen_range(0..d), d)
}

fn jitter(rng: &mut ChaCha8Rng) -> BigRational {
    let k: u32 = rng.gen_range(8..=40);
    let j: i64 = rng.gen_range(-4..=4);
    BigRational::new(BigInt::from(j), BigInt::from(1u64) << k)
}

/// One sample pair: uniform, near the breakpoint grid, or near a diagonal
/// `x + y = b`.
fn sample_pair(rng: &mut ChaCha8Rng, pts: &[Point]) -> (BigRational, BigRational) {
    let pick = |rng: &mut ChaCha8Rng| pts[rng.gen_range(0..pts.len())].0.clone();
    match rng.gen_range(0..3) {
        0 => (random_unit(rng), random_unit(rng)),
        1 => (pick(rng) + jitter(rng), pick(rng) + jitter(rng)),
        _ => {
            let x = if rng.gen_bool(0.5) { pick(rng) + jitter(rng) } else { random_unit(rng) };
            let y = pick(rng) - &x + jitter(rng) + BigRational::one();
            (x, y)
        }
    }
}

/// Searches `pairs` random pairs for `f(x) + f(y) < f(x + y)`; floats only
/// select candidates, the verdict on each candidate is exact.
pub fn sample_violation(pts: &[Point], pairs: usize, rng: &mut ChaCha8Rng) -> Option<(BigRational, BigRational)> {
    let fl = FloatPwl::new(pts);
    for _ in 0..pairs {
        let (x, y) = sample_pair(rng, pts);
        let (xf, yf) = (x.to_f64().unwrap(), y.to_f64().unwrap());
        let approx = fl.eval(xf) + fl.eval(yf) - fl.eval(xf + yf);
        if approx > 1e-7 {
            continue;
        }
        let exact = oracle_eval(pts, &x) + oracle_eval(pts, &y) - oracle_eval(pts, &(&x + &y));
        if exact.is_negative() {
            return Some((x, y));
        }
    }
    None
}

/// Raises the value at interior breakpoint `k` by `bump`.
pub fn mutate(pts: &[Point], k: usize, bump: &BigRational) -> Vec<Point> {
    let mut out = pts.to_vec();
    out[k].1 += bump;
    out
}
