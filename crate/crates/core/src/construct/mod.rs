//! The GMI function `ψ_0` and the family `ψ_i` obtained by repeatedly
//! replacing every maximal positive-slope segment with three segments.

mod schedule;

use std::collections::BTreeMap;

pub use schedule::{EpsilonSchedule, ScheduleKind};

pub use crate::pwl::{SegmentTag, SlopeSign};
use crate::error::{Error, Result};
use crate::pwl::{scale, PwlFunction};
use crate::rational::Rational;
use crate::verify::{Property, VerificationReport, Witness, WitnessKind};

fn check_alpha(alpha: &Rational) -> Result<()> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return Err(Error::OutOfDomain {
            name: "alpha",
            value: alpha.clone(),
            domain: "]0, 1[",
        });
    }
    Ok(())
}

/// The triangular function through `(0, 0)`, `(α, 1)`, `(1, 0)`.
pub fn gmi(alpha: &Rational) -> Result<PwlFunction> {
    check_alpha(alpha)?;
    let f = PwlFunction::new(
        vec![Rational::zero(), alpha.clone(), Rational::one()],
        vec![Rational::zero(), Rational::one(), Rational::zero()],
    )?;
    f.with_tags(vec![SegmentTag::positive(0), SegmentTag::negative(0)])
}

fn derived_tags(f: &PwlFunction) -> Result<Vec<SegmentTag>> {
    (0..f.num_pieces())
        .map(|k| {
            let s = f.slope(k);
            if s.is_positive() {
                Ok(SegmentTag::positive(0))
            } else if s.is_negative() {
                Ok(SegmentTag::negative(0))
            } else {
                Err(Error::InvalidFunction(format!(
                    "piece [{}, {}] has zero slope",
                    f.breakpoints()[k],
                    f.breakpoints()[k + 1]
                )))
            }
        })
        .collect()
}

/// One refinement step: each maximal positive-slope interval `[a, b]`
/// becomes three segments through
/// `((a+b-ε)/2, f((a+b)/2) + ε/(2(1-α)))` and
/// `((a+b+ε)/2, f((a+b)/2) - ε/(2(1-α)))`.
pub fn step(f: &PwlFunction, alpha: &Rational, eps: &Rational) -> Result<PwlFunction> {
    check_alpha(alpha)?;
    if !eps.is_positive() {
        return Err(Error::OutOfDomain {
            name: "eps",
            value: eps.clone(),
            domain: "]0, +inf[",
        });
    }
    let g = f.normalize();
    let tags = match g.tags() {
        Some(t) => t.to_vec(),
        None => derived_tags(&g)?,
    };
    let next_index = tags.iter().map(|t| t.index).max().unwrap_or(0) + 1;
    let two = Rational::from(2);
    let half_jump = eps / (&two * (Rational::one() - alpha));

    let (bps, vals) = (g.breakpoints(), g.values());
    let mut out_b = Vec::with_capacity(2 * bps.len());
    let mut out_v = Vec::with_capacity(2 * bps.len());
    let mut out_t = Vec::with_capacity(2 * tags.len());
    out_b.push(bps[0].clone());
    out_v.push(vals[0].clone());
    for (k, tag) in tags.iter().enumerate() {
        let (a, b) = (&bps[k], &bps[k + 1]);
        let (fa, fb) = (&vals[k], &vals[k + 1]);
        match tag.sign {
            SlopeSign::Negative => {
                out_b.push(b.clone());
                out_v.push(fb.clone());
                out_t.push(*tag);
            }
            SlopeSign::Positive => {
                if b > alpha {
                    return Err(Error::NotConstructionInput {
                        left: a.clone(),
                        right: b.clone(),
                    });
                }
                if *eps >= b - a {
                    return Err(Error::StepCollision {
                        left: a.clone(),
                        right: b.clone(),
                        eps: eps.clone(),
                    });
                }
                let sum = a + b;
                let mid_value = (fa + fb) / &two;
                out_b.push((&sum - eps) / &two);
                out_v.push(&mid_value + &half_jump);
                out_b.push((&sum + eps) / &two);
                out_v.push(&mid_value - &half_jump);
                out_b.push(b.clone());
                out_v.push(fb.clone());
                out_t.extend([
                    SegmentTag::positive(next_index),
                    SegmentTag::negative(next_index),
                    SegmentTag::positive(next_index),
                ]);
            }
        }
    }
    Ok(PwlFunction::from_parts_unchecked(out_b, out_v, Some(out_t)))
}

/// `ψ_i` for the given schedule.
pub fn build(schedule: &EpsilonSchedule, i: usize) -> Result<PwlFunction> {
    let mut ladder = Ladder::new(schedule.clone());
    ladder.extend_to(i)?;
    Ok(ladder.levels.pop().expect("ladder has at least psi_0"))
}

/// Memoized sequence `ψ_0, ψ_1, …` for one schedule.
#[derive(Clone, Debug)]
pub struct Ladder {
    schedule: EpsilonSchedule,
    levels: Vec<PwlFunction>,
}

impl Ladder {
    pub fn new(schedule: EpsilonSchedule) -> Self {
        let psi0 = gmi(schedule.alpha()).expect("schedule alpha is validated");
        Ladder {
            schedule,
            levels: vec![psi0],
        }
    }

    pub fn schedule(&self) -> &EpsilonSchedule {
        &self.schedule
    }

    pub fn extend_to(&mut self, i: usize) -> Result<&PwlFunction> {
        self.schedule.supports_depth(i)?;
        while self.levels.len() <= i {
            let k = self.levels.len();
            let eps = self.schedule.epsilon(k)?;
            let next = step(&self.levels[k - 1], self.schedule.alpha(), &eps)?;
            self.levels.push(next);
        }
        Ok(&self.levels[i])
    }

    pub fn level(&self, i: usize) -> Option<&PwlFunction> {
        self.levels.get(i)
    }

    pub fn levels(&self) -> &[PwlFunction] {
        &self.levels
    }
}

/// `γ_i = α - Σ_{k=1}^{i} 2^{k-1} ε_k`, the total positive-slope length of
/// `ψ_i`.
pub fn gamma_i(schedule: &EpsilonSchedule, i: usize) -> Result<Rational> {
    Ok(schedule.alpha() - schedule.partial_sum(i)?)
}

/// Checks the piece structure of `ψ_i`: piece counts, negative lengths and
/// slopes, positive lengths and slopes, all exactly.
pub fn structure_report(
    f: &PwlFunction,
    schedule: &EpsilonSchedule,
    i: usize,
) -> Result<VerificationReport> {
    const CAP: usize = 64;
    let alpha = schedule.alpha();
    let one = Rational::one();
    let gamma = gamma_i(schedule, i)?;
    let pieces_each = 1usize << i;
    let pos_len = &gamma / Rational::pow2(i as i32);
    let neg_slope = -(&one - alpha).recip();
    let mut r = VerificationReport::new(Property::Structure);
    r.stat("gamma", gamma.clone());
    r.stat("positive_length", pos_len.clone());
    r.stat("negative_slope", neg_slope.clone());
    if !gamma.is_positive() {
        r.fail(
            Witness {
                kind: WitnessKind::ValuePoint,
                data: vec![Rational::from(i as i64)],
                lhs: gamma.clone(),
                rhs: Rational::zero(),
            },
            CAP,
        );
        return Ok(r);
    }
    let pos_slope = (&one - &gamma) / ((&one - alpha) * &gamma);
    r.stat("positive_slope", pos_slope.clone());

    let g = f.normalize();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for p in g.pieces() {
        if p.slope.is_positive() {
            positives.push(p);
        } else {
            negatives.push(p);
        }
    }
    r.count("positive_count", positives.len());
    r.count("negative_count", negatives.len());
    for (found, what) in [(positives.len(), 1), (negatives.len(), -1)] {
        if found != pieces_each {
            r.fail(
                Witness {
                    kind: WitnessKind::PieceMismatch,
                    data: vec![Rational::from(what)],
                    lhs: Rational::from(found as i64),
                    rhs: Rational::from(pieces_each as i64),
                },
                CAP,
            );
        }
    }

    let mut expected: BTreeMap<Rational, i64> = BTreeMap::new();
    *expected.entry(&one - alpha).or_default() += 1;
    for k in 1..=i {
        *expected.entry(schedule.epsilon(k)?).or_default() += 1i64 << (k - 1);
    }
    let mut observed: BTreeMap<Rational, i64> = BTreeMap::new();
    for p in &negatives {
        *observed.entry(&p.right - &p.left).or_default() += 1;
    }
    let lengths: std::collections::BTreeSet<_> = expected.keys().chain(observed.keys()).cloned().collect();
    for len in lengths {
        let (e, o) = (expected.get(&len).copied().unwrap_or(0), observed.get(&len).copied().unwrap_or(0));
        if e != o {
            r.fail(
                Witness {
                    kind: WitnessKind::PieceMismatch,
                    data: vec![len],
                    lhs: Rational::from(o),
                    rhs: Rational::from(e),
                },
                CAP,
            );
        }
    }

    for p in &negatives {
        if p.slope != neg_slope {
            r.fail(
                Witness {
                    kind: WitnessKind::Segment,
                    data: vec![p.left.clone(), p.right.clone()],
                    lhs: p.slope.clone(),
                    rhs: neg_slope.clone(),
                },
                CAP,
            );
        }
    }
    for p in &positives {
        let len = &p.right - &p.left;
        if len != pos_len {
            r.fail(
                Witness {
                    kind: WitnessKind::PieceMismatch,
                    data: vec![p.left.clone(), p.right.clone()],
                    lhs: len,
                    rhs: pos_len.clone(),
                },
                CAP,
            );
        }
        if p.slope != pos_slope {
            r.fail(
                Witness {
                    kind: WitnessKind::Segment,
                    data: vec![p.left.clone(), p.right.clone()],
                    lhs: p.slope.clone(),
                    rhs: pos_slope.clone(),
                },
                CAP,
            );
        }
    }
    Ok(r)
}

/// `(λ, μ)` of the self-similar decomposition on `[0, α + ε_1]`.
pub fn lambda_mu(alpha: &Rational, eps1: &Rational) -> Result<(Rational, Rational)> {
    check_alpha(alpha)?;
    let one = Rational::one();
    if !eps1.is_positive() || *eps1 > &one - alpha {
        return Err(Error::OutOfDomain {
            name: "eps1",
            value: eps1.clone(),
            domain: "]0, 1 - alpha]",
        });
    }
    let denom = (alpha + eps1) * (&one - alpha);
    let lambda = (&one - alpha - eps1) / &denom;
    let mu = eps1 / &denom;
    Ok((lambda, mu))
}

/// `α' = (α - ε_1)/(α + ε_1)`, `ε'_i = 2 ε_{i+1}/(α + ε_1)`.
pub fn reduced_parameters(schedule: &EpsilonSchedule) -> Result<EpsilonSchedule> {
    let alpha = schedule.alpha();
    let eps1 = schedule.epsilon(1)?;
    let s = alpha + &eps1;
    let alpha_r = (alpha - &eps1) / &s;
    let two = Rational::from(2);
    match schedule.kind() {
        ScheduleKind::Geometric { base, ratio } => {
            EpsilonSchedule::geometric(alpha_r, &two * base * ratio / &s, ratio.clone())
        }
        ScheduleKind::Explicit(eps) => EpsilonSchedule::explicit(
            alpha_r,
            eps[1..].iter().map(|e| &two * e / &s).collect(),
        ),
    }
}

/// Checks `ψ_i(x) = λx + μ ψ'_{i-1}(2x/(α + ε_1))` on `[0, α + ε_1]`,
/// where `ψ'` uses the reduced parameters. Both sides are piecewise linear
/// and the checked grid holds every breakpoint of both, so agreement on
/// the grid is agreement on the interval.
pub fn verify_recursive_decomposition(
    schedule: &EpsilonSchedule,
    i: usize,
) -> Result<VerificationReport> {
    if i == 0 {
        return Err(Error::OutOfDomain {
            name: "i",
            value: Rational::zero(),
            domain: "positive integers",
        });
    }
    const CAP: usize = 64;
    let alpha = schedule.alpha();
    let eps1 = schedule.epsilon(1)?;
    let width = alpha + &eps1;
    let (lambda, mu) = lambda_mu(alpha, &eps1)?;
    let direct = build(schedule, i)?;
    let reduced = reduced_parameters(schedule)?;
    let inner = build(&reduced, i - 1)?;
    let handle = scale(&inner, mu.clone(), Rational::from(2) / &width)?;

    let mut grid: std::collections::BTreeSet<Rational> = direct
        .breakpoints()
        .iter()
        .filter(|b| **b <= width)
        .cloned()
        .collect();
    grid.extend(handle.breakpoints_in(&Rational::zero(), &width));

    let mut r = VerificationReport::new(Property::RecursiveDecomposition);
    r.stat("lambda", lambda.clone());
    r.stat("mu", mu.clone());
    r.stat("alpha_reduced", reduced.alpha().clone());
    if let Ok(e) = reduced.epsilon(1) {
        r.stat("eps1_reduced", e);
    }
    r.count("checked_points", grid.len());
    for x in &grid {
        let lhs = direct.eval(x);
        let rhs = &lambda * x + handle.eval(x);
        if lhs != rhs {
            r.fail(
                Witness {
                    kind: WitnessKind::DecompositionPoint,
                    data: vec![x.clone()],
                    lhs,
                    rhs,
                },
                CAP,
            );
        }
    }
    Ok(r)
}
