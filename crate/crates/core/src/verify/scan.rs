//! Streaming scan of `Δf(x, y) = f(x) + f(y) - f(x + y)` over the vertices
//! of the additivity complex on the torus.
//!
//! The vertex set is `F1 ∪ F2 ∪ mirror(F2)` with `F1 = T × T`,
//! `F2 = {(t_i, t_k - t_i)}` and `T` the breakpoints reduced to `[0, 1)`.
//! Rows are indexed by `x = t_i`; each row lists `y ∈ T ∪ (T - t_i)`. A row
//! point `y ∉ T` also stands for its mirror `(y, t_i)`, which has the same
//! Δ and is not produced by any row.
//!
//! Two exact back ends share the row logic: an integer lattice (all
//! breakpoints and values over common denominators, no allocation per
//! vertex) when the magnitudes fit, and a big-rational fallback.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::exec::{map_reduce, Execution};
use crate::pwl::PwlFunction;
use crate::rational::Rational;

/// Scan result with exact statistics.
#[derive(Clone, Debug)]
pub(crate) struct ScanOutcome {
    pub min_delta: Rational,
    pub vertex_count: u64,
    pub violation_count: u64,
    pub min_count: u64,
    /// Lexicographically smallest witness vertices: violating ones when
    /// `min_delta < 0`, otherwise those attaining the minimum.
    pub witnesses: Vec<(Rational, Rational)>,
}

/// Entry of one row: `y`, its index in `T` if any, and the index `k` with
/// `t_i + y ≡ t_k` if any.
struct RowPoint<P> {
    y: P,
    in_t: Option<usize>,
    shift_of: Option<usize>,
}

trait Grid: Sync {
    type P: Ord + Clone + Send + Sync;
    type D: Ord + Clone + Send + Sync;

    fn points(&self) -> &[Self::P];
    /// `(t_k - t_i) mod 1`.
    fn shifted(&self, k: usize, i: usize) -> Self::P;
    fn delta(&self, i: usize, y: &RowPoint<Self::P>) -> Self::D;
    fn is_negative(&self, d: &Self::D) -> bool;
    fn point_to_rational(&self, p: &Self::P) -> Rational;
    fn delta_to_rational(&self, d: &Self::D) -> Rational;
}

fn row<G: Grid>(grid: &G, i: usize) -> Vec<RowPoint<G::P>> {
    let t = grid.points();
    let n = t.len();
    let shifted = (i..n).chain(0..i).map(|k| (grid.shifted(k, i), k));
    let mut out: Vec<RowPoint<G::P>> = Vec::with_capacity(2 * n);
    let mut a = t.iter().enumerate().peekable();
    let mut b = shifted.peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => {
                let (j, y) = a.next().unwrap();
                RowPoint { y: y.clone(), in_t: Some(j), shift_of: None }
            }
            (None, Some(_)) => {
                let (y, k) = b.next().unwrap();
                RowPoint { y, in_t: None, shift_of: Some(k) }
            }
            (Some((_, ya)), Some((yb, _))) => match (*ya).cmp(yb) {
                Ordering::Less => {
                    let (j, y) = a.next().unwrap();
                    RowPoint { y: y.clone(), in_t: Some(j), shift_of: None }
                }
                Ordering::Greater => {
                    let (y, k) = b.next().unwrap();
                    RowPoint { y, in_t: None, shift_of: Some(k) }
                }
                Ordering::Equal => {
                    let (j, _) = a.next().unwrap();
                    let (y, k) = b.next().unwrap();
                    RowPoint { y, in_t: Some(j), shift_of: Some(k) }
                }
            },
        };
        out.push(next);
    }
    out
}

/// Bounded max-heap that keeps the `cap` smallest keys.
#[derive(Clone)]
struct Smallest<K: Ord> {
    cap: usize,
    heap: BinaryHeap<K>,
}

impl<K: Ord + Clone> Smallest<K> {
    fn new(cap: usize) -> Self {
        Smallest { cap, heap: BinaryHeap::new() }
    }

    fn push(&mut self, key: K) {
        if self.heap.len() < self.cap {
            self.heap.push(key);
        } else if let Some(top) = self.heap.peek() {
            if key < *top {
                self.heap.pop();
                self.heap.push(key);
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for k in other.heap {
            self.push(k);
        }
        self
    }

    fn clear(&mut self) {
        self.heap.clear();
    }

    fn into_sorted(self) -> Vec<K> {
        self.heap.into_sorted_vec()
    }
}

#[derive(Clone)]
struct Acc<P: Ord + Clone, D> {
    count: u64,
    min: Option<D>,
    at_min: u64,
    min_keys: Smallest<(P, P)>,
    violations: u64,
    violation_keys: Smallest<(P, P)>,
}

impl<P: Ord + Clone, D: Ord + Clone> Acc<P, D> {
    fn new(cap: usize) -> Self {
        Acc {
            count: 0,
            min: None,
            at_min: 0,
            min_keys: Smallest::new(cap),
            violations: 0,
            violation_keys: Smallest::new(cap),
        }
    }

    fn observe(&mut self, key: (P, P), d: &D, negative: bool) {
        self.count += 1;
        if negative {
            self.violations += 1;
            self.violation_keys.push(key.clone());
        }
        match self.min.as_ref().map(|m| d.cmp(m)) {
            None | Some(Ordering::Less) => {
                self.min = Some(d.clone());
                self.at_min = 1;
                self.min_keys.clear();
                self.min_keys.push(key);
            }
            Some(Ordering::Equal) => {
                self.at_min += 1;
                self.min_keys.push(key);
            }
            Some(Ordering::Greater) => {}
        }
    }

    fn merge(self, other: Self) -> Self {
        let (min, at_min, min_keys) = match (self.min, other.min) {
            (None, m) => (m, other.at_min, other.min_keys),
            (m, None) => (m, self.at_min, self.min_keys),
            (Some(a), Some(b)) => match a.cmp(&b) {
                Ordering::Less => (Some(a), self.at_min, self.min_keys),
                Ordering::Greater => (Some(b), other.at_min, other.min_keys),
                Ordering::Equal => (
                    Some(a),
                    self.at_min + other.at_min,
                    self.min_keys.merge(other.min_keys),
                ),
            },
        };
        Acc {
            count: self.count + other.count,
            min,
            at_min,
            min_keys,
            violations: self.violations + other.violations,
            violation_keys: self.violation_keys.merge(other.violation_keys),
        }
    }
}

fn run<G: Grid>(grid: &G, cap: usize, exec: Execution) -> ScanOutcome {
    let t = grid.points();
    let acc = map_reduce(
        exec,
        t.len(),
        Acc::new(cap),
        |i| {
            let mut acc = Acc::new(cap);
            let x = &t[i];
            for rp in row(grid, i) {
                let d = grid.delta(i, &rp);
                let neg = grid.is_negative(&d);
                if rp.in_t.is_none() {
                    acc.observe((rp.y.clone(), x.clone()), &d, neg);
                }
                acc.observe((x.clone(), rp.y), &d, neg);
            }
            acc
        },
        Acc::merge,
    );
    let min = acc.min.expect("the vertex set always contains (0, 0)");
    let min_delta = grid.delta_to_rational(&min);
    let keys = if min_delta.is_negative() {
        acc.violation_keys.into_sorted()
    } else {
        acc.min_keys.into_sorted()
    };
    ScanOutcome {
        min_delta,
        vertex_count: acc.count,
        violation_count: acc.violations,
        min_count: acc.at_min,
        witnesses: keys
            .iter()
            .map(|(x, y)| (grid.point_to_rational(x), grid.point_to_rational(y)))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// big-rational back end

struct RationalGrid<'a> {
    f: &'a PwlFunction,
    t: Vec<Rational>,
}

impl<'a> RationalGrid<'a> {
    fn new(f: &'a PwlFunction) -> Self {
        let bps = f.breakpoints();
        RationalGrid { f, t: bps[..bps.len() - 1].to_vec() }
    }
}

impl Grid for RationalGrid<'_> {
    type P = Rational;
    type D = Rational;

    fn points(&self) -> &[Rational] {
        &self.t
    }

    fn shifted(&self, k: usize, i: usize) -> Rational {
        let d = &self.t[k] - &self.t[i];
        if d.is_negative() {
            d + Rational::one()
        } else {
            d
        }
    }

    fn delta(&self, i: usize, y: &RowPoint<Rational>) -> Rational {
        let vals = self.f.values();
        let fy = match y.in_t {
            Some(j) => vals[j].clone(),
            None => self.f.eval_in_unit(&y.y),
        };
        let fz = match y.shift_of {
            Some(k) => vals[k].clone(),
            None => self.f.eval(&(&self.t[i] + &y.y)),
        };
        &vals[i] + fy - fz
    }

    fn is_negative(&self, d: &Rational) -> bool {
        d.is_negative()
    }

    fn point_to_rational(&self, p: &Rational) -> Rational {
        p.clone()
    }

    fn delta_to_rational(&self, d: &Rational) -> Rational {
        d.clone()
    }
}

// ---------------------------------------------------------------------------
// integer lattice back end

/// Bound on the common breakpoint denominator and on scaled values. With
/// both at most 2^40 every intermediate below stays under 2^124.
const LATTICE_LIMIT_BITS: u64 = 40;

/// `num / den` with `den > 0`, compared by cross multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128,
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct LatticeGrid {
    /// Breakpoints including 1, as numerators over `dx`.
    b: Vec<i128>,
    /// Values as numerators over `dv`.
    v: Vec<i128>,
    dx: i128,
    dv: BigInt,
}

fn lcm_of_denoms<'a>(it: impl Iterator<Item = &'a Rational>) -> BigInt {
    it.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn fits(x: &BigInt) -> Option<i128> {
    if x.bits() <= LATTICE_LIMIT_BITS {
        x.to_i128()
    } else {
        None
    }
}

impl LatticeGrid {
    fn try_new(f: &PwlFunction) -> Option<Self> {
        let dx = lcm_of_denoms(f.breakpoints().iter());
        let dv = lcm_of_denoms(f.values().iter());
        let dx_i = fits(&dx)?;
        fits(&dv)?;
        let scale = |r: &Rational, d: &BigInt| -> Option<i128> {
            let n: BigInt = r.numer() * (d / r.denom());
            fits(&n.abs()).map(|_| n.to_i128().unwrap())
        };
        let b = f
            .breakpoints()
            .iter()
            .map(|r| scale(r, &dx))
            .collect::<Option<Vec<_>>>()?;
        let v = f
            .values()
            .iter()
            .map(|r| scale(r, &dv))
            .collect::<Option<Vec<_>>>()?;
        Some(LatticeGrid { b, v, dx: dx_i, dv })
    }

    /// Value at lattice point `z` in `[0, dx)` as a fraction of `dv`.
    fn eval(&self, z: i128) -> Frac {
        let k = self.b.partition_point(|&b| b <= z) - 1;
        if self.b[k] == z {
            return Frac { num: self.v[k], den: 1 };
        }
        let len = self.b[k + 1] - self.b[k];
        Frac {
            num: self.v[k] * len + (self.v[k + 1] - self.v[k]) * (z - self.b[k]),
            den: len,
        }
    }
}

impl Grid for LatticeGrid {
    type P = i128;
    type D = Frac;

    fn points(&self) -> &[i128] {
        &self.b[..self.b.len() - 1]
    }

    fn shifted(&self, k: usize, i: usize) -> i128 {
        let d = self.b[k] - self.b[i];
        if d < 0 {
            d + self.dx
        } else {
            d
        }
    }

    fn delta(&self, i: usize, y: &RowPoint<i128>) -> Frac {
        let vx = self.v[i];
        match (y.in_t, y.shift_of) {
            (Some(j), Some(k)) => Frac { num: vx + self.v[j] - self.v[k], den: 1 },
            (None, Some(k)) => {
                let fy = self.eval(y.y);
                Frac { num: (vx - self.v[k]) * fy.den + fy.num, den: fy.den }
            }
            (Some(j), None) => {
                let mut z = self.b[i] + y.y;
                if z >= self.dx {
                    z -= self.dx;
                }
                let fz = self.eval(z);
                Frac { num: (vx + self.v[j]) * fz.den - fz.num, den: fz.den }
            }
            (None, None) => unreachable!("row points come from T or T - t_i"),
        }
    }

    fn is_negative(&self, d: &Frac) -> bool {
        d.num < 0
    }

    fn point_to_rational(&self, p: &i128) -> Rational {
        Rational::from_bigints(BigInt::from(*p), BigInt::from(self.dx)).unwrap()
    }

    fn delta_to_rational(&self, d: &Frac) -> Rational {
        Rational::from_bigints(BigInt::from(d.num), BigInt::from(d.den) * &self.dv).unwrap()
    }
}

/// Which back end a scan should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Backend {
    Auto,
    Rational,
}

pub(crate) fn scan(f: &PwlFunction, cap: usize, exec: Execution, backend: Backend) -> ScanOutcome {
    if backend == Backend::Auto {
        if let Some(grid) = LatticeGrid::try_new(f) {
            return run(&grid, cap, exec);
        }
    }
    run(&RationalGrid::new(f), cap, exec)
}

pub(crate) fn lattice_applicable(f: &PwlFunction) -> bool {
    LatticeGrid::try_new(f).is_some()
}
