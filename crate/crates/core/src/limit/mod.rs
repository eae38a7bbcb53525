//! The limit `ψ = lim ψ_i`: exact values on the negative-slope set `S`,
//! certified enclosures elsewhere, and finite evidence for its structure.

use std::collections::BTreeSet;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::construct::{build, gamma_i, EpsilonSchedule, Ladder, ScheduleKind, SlopeSign};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::pwl::PwlFunction;
use crate::rational::Rational;
use crate::verify::{delta, Property, VerificationReport, Witness, WitnessKind};

/// Largest depth for operations that materialize `ψ_depth`.
pub const MAX_FULL_DEPTH: usize = 20;

const CAP: usize = 64;

/// `γ` and the Cauchy constant `C` of a geometric schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitParams {
    pub schedule: EpsilonSchedule,
    pub gamma: Rational,
    pub c: Rational,
}

impl LimitParams {
    pub fn new(schedule: &EpsilonSchedule) -> Result<Self> {
        let gamma = gamma_limit(schedule)?;
        let c = constant_for(schedule.alpha(), &gamma);
        Ok(LimitParams {
            schedule: schedule.clone(),
            gamma,
            c,
        })
    }

    /// `C / 2^{d-1}`, the tail bound on `|ψ_d - ψ|`.
    pub fn radius(&self, depth: usize) -> Rational {
        &self.c * Rational::pow2(1 - depth as i32)
    }
}

/// `γ = α - Σ_{i≥1} 2^{i-1} ε_i`.
pub fn gamma_limit(schedule: &EpsilonSchedule) -> Result<Rational> {
    match schedule.series_sum() {
        Some(total) => Ok(schedule.alpha() - total),
        None => Err(Error::Unsupported(
            "the limit needs a geometric schedule; explicit lists have no closed-form tail".into(),
        )),
    }
}

fn constant_for(alpha: &Rational, gamma: &Rational) -> Rational {
    let one = Rational::one();
    alpha * (&one - gamma) / ((&one - alpha) * gamma)
}

/// `C = α(1 - γ)/((1 - α)γ)`.
pub fn convergence_constant(params: &LimitParams) -> Rational {
    constant_for(params.schedule.alpha(), &params.gamma)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentLocation {
    /// `x` lies in the closure of a negative segment created at step `index`.
    Negative {
        left: Rational,
        right: Rational,
        index: usize,
    },
    /// `x` lies in the positive piece `[left, right]` of `ψ_depth`.
    Positive {
        left: Rational,
        right: Rational,
        depth: usize,
    },
}

/// The single piece of `ψ_depth` that contains `x`, refined one step at a
/// time.
struct Descent<'a> {
    schedule: &'a EpsilonSchedule,
    x: Rational,
    depth: usize,
    left: Rational,
    right: Rational,
    f_left: Rational,
    f_right: Rational,
    negative: Option<usize>,
}

impl<'a> Descent<'a> {
    /// Requires `0 < x < 1`.
    fn start(schedule: &'a EpsilonSchedule, x: Rational) -> Self {
        let alpha = schedule.alpha().clone();
        let (left, right, f_left, f_right, negative) = if x >= alpha {
            (alpha, Rational::one(), Rational::one(), Rational::zero(), Some(0))
        } else {
            (Rational::zero(), alpha, Rational::zero(), Rational::one(), None)
        };
        Descent {
            schedule,
            x,
            depth: 0,
            left,
            right,
            f_left,
            f_right,
            negative,
        }
    }

    fn advance(&mut self) -> Result<()> {
        debug_assert!(self.negative.is_none());
        let d = self.depth + 1;
        let eps = self.schedule.epsilon(d)?;
        let two = Rational::from(2);
        let sum = &self.left + &self.right;
        let mid_value = (&self.f_left + &self.f_right) / &two;
        let half_jump = &eps / (&two * (Rational::one() - self.schedule.alpha()));
        let p = (&sum - &eps) / &two;
        let q = (&sum + &eps) / &two;
        let fp = &mid_value + &half_jump;
        let fq = &mid_value - &half_jump;
        if self.x < p {
            self.right = p;
            self.f_right = fp;
        } else if self.x > q {
            self.left = q;
            self.f_left = fq;
        } else {
            self.left = p;
            self.right = q;
            self.f_left = fp;
            self.f_right = fq;
            self.negative = Some(d);
        }
        self.depth = d;
        Ok(())
    }

    fn value(&self) -> Rational {
        let t = (&self.x - &self.left) / (&self.right - &self.left);
        &self.f_left + t * (&self.f_right - &self.f_left)
    }
}

/// Finds the first depth at which `x` falls in the closure of a negative
/// segment, descending at most to `max_depth`.
pub fn locate(x: &Rational, max_depth: usize, schedule: &EpsilonSchedule) -> Result<SegmentLocation> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x.clone(),
            domain: "]0, 1[",
        });
    }
    let mut d = Descent::start(schedule, x.clone());
    while d.negative.is_none() && d.depth < max_depth {
        d.advance()?;
    }
    Ok(match d.negative {
        Some(index) => SegmentLocation::Negative {
            left: d.left,
            right: d.right,
            index,
        },
        None => SegmentLocation::Positive {
            left: d.left,
            right: d.right,
            depth: d.depth,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitMode {
    Exact { value: Rational, segment_index: usize },
    Enclosure { lower: Rational, upper: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitEvaluation {
    pub point: Rational,
    pub mode: LimitMode,
    pub depth: usize,
}

impl LimitEvaluation {
    pub fn is_exact(&self) -> bool {
        matches!(self.mode, LimitMode::Exact { .. })
    }

    pub fn lower(&self) -> &Rational {
        match &self.mode {
            LimitMode::Exact { value, .. } => value,
            LimitMode::Enclosure { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> &Rational {
        match &self.mode {
            LimitMode::Exact { value, .. } => value,
            LimitMode::Enclosure { upper, .. } => upper,
        }
    }

    pub fn width(&self) -> Rational {
        self.upper() - self.lower()
    }

    pub fn contains(&self, y: &Rational) -> bool {
        self.lower() <= y && y <= self.upper()
    }

    /// Whether `[lower, upper]` lies inside the other result's interval.
    pub fn nested_in(&self, other: &LimitEvaluation) -> bool {
        other.lower() <= self.lower() && self.upper() <= other.upper()
    }
}

impl Serialize for LimitEvaluation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(if self.is_exact() { 4 } else { 5 }))?;
        map.serialize_entry("point", &self.point)?;
        match &self.mode {
            LimitMode::Exact { value, .. } => {
                map.serialize_entry("mode", "exact")?;
                map.serialize_entry("value", value)?;
            }
            LimitMode::Enclosure { lower, upper } => {
                map.serialize_entry("mode", "enclosure")?;
                map.serialize_entry("lower", lower)?;
                map.serialize_entry("upper", upper)?;
            }
        }
        map.serialize_entry("depth", &self.depth)?;
        map.end()
    }
}

/// `ψ(x)` for any rational `x` (reduced mod 1): exact when `x` reaches a
/// negative segment before the tail bound drops to `tol`, otherwise an
/// enclosure of width at most `2·tol`.
pub fn eval_limit(x: &Rational, tol: &Rational, schedule: &EpsilonSchedule) -> Result<LimitEvaluation> {
    eval_limit_with(x, tol, &LimitParams::new(schedule)?)
}

pub fn eval_limit_with(x: &Rational, tol: &Rational, params: &LimitParams) -> Result<LimitEvaluation> {
    check_tol(tol)?;
    let point = x.mod_one();
    if point.is_zero() {
        return Ok(LimitEvaluation {
            point,
            mode: LimitMode::Exact {
                value: Rational::zero(),
                segment_index: 0,
            },
            depth: 0,
        });
    }
    let mut d = Descent::start(&params.schedule, point.clone());
    loop {
        if let Some(index) = d.negative {
            return Ok(LimitEvaluation {
                mode: LimitMode::Exact {
                    value: d.value(),
                    segment_index: index,
                },
                depth: d.depth,
                point,
            });
        }
        let r = params.radius(d.depth);
        if r <= *tol {
            let v = d.value();
            let lower = Rational::max_of(&(&v - &r), &Rational::zero()).clone();
            let upper = Rational::min_of(&(&v + &r), &Rational::one()).clone();
            return Ok(LimitEvaluation {
                mode: LimitMode::Enclosure { lower, upper },
                depth: d.depth,
                point,
            });
        }
        d.advance()?;
    }
}

/// [`eval_limit_with`] over many points; results keep the input order.
pub fn eval_limit_batch(
    xs: &[Rational],
    tol: &Rational,
    params: &LimitParams,
    exec: Execution,
) -> Result<Vec<LimitEvaluation>> {
    check_tol(tol)?;
    map_collect(exec, xs, |x| eval_limit_with(x, tol, params))
        .into_iter()
        .collect()
}

fn check_tol(tol: &Rational) -> Result<()> {
    if !tol.is_positive() {
        return Err(Error::OutOfDomain {
            name: "tol",
            value: tol.clone(),
            domain: "]0, +inf[",
        });
    }
    Ok(())
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_FULL_DEPTH {
        return Err(Error::DepthPolicy {
            requested: depth,
            max: MAX_FULL_DEPTH,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NegativeSegment {
    pub left: Rational,
    pub right: Rational,
    pub index: usize,
}

impl NegativeSegment {
    pub fn midpoint(&self) -> Rational {
        Rational::midpoint(&self.left, &self.right)
    }
}

fn segments_of(f: &PwlFunction) -> Vec<NegativeSegment> {
    let g = f.normalize();
    let b = g.breakpoints();
    match g.tags() {
        Some(tags) => tags
            .iter()
            .enumerate()
            .filter(|(_, t)| t.sign == SlopeSign::Negative)
            .map(|(k, t)| NegativeSegment {
                left: b[k].clone(),
                right: b[k + 1].clone(),
                index: t.index,
            })
            .collect(),
        None => unreachable!("built functions carry tags"),
    }
}

/// The negative pieces of `ψ_depth` with their creation steps, sorted by
/// left endpoint.
pub fn negative_segments(depth: usize, schedule: &EpsilonSchedule) -> Result<Vec<NegativeSegment>> {
    check_depth(depth)?;
    Ok(segments_of(&build(schedule, depth)?))
}

fn longest_gap(segs: &[NegativeSegment]) -> Rational {
    let mut prev = Rational::zero();
    let mut best = Rational::zero();
    for s in segs {
        let gap = &s.left - &prev;
        if gap > best {
            best = gap;
        }
        prev = s.right.clone();
    }
    let tail = Rational::one() - prev;
    if tail > best {
        tail
    } else {
        best
    }
}

/// Length of the longest sub-interval of `[0, 1]` that misses `S_depth`,
/// measured on the enumerated segments.
pub fn density_gap(depth: usize, schedule: &EpsilonSchedule) -> Result<Rational> {
    Ok(longest_gap(&negative_segments(depth, schedule)?))
}

/// For every `k = 1..depth`, a whole negative segment inside `]0, 2^{-k}[`,
/// plus the segment counts `1, 2, …, 2^depth`.
pub fn non_pwl_evidence(depth: usize, schedule: &EpsilonSchedule) -> Result<VerificationReport> {
    if depth == 0 {
        return Err(Error::OutOfDomain {
            name: "depth",
            value: Rational::zero(),
            domain: "positive integers",
        });
    }
    check_depth(depth)?;
    let mut ladder = Ladder::new(schedule.clone());
    ladder.extend_to(depth)?;
    let mut r = VerificationReport::new(Property::NonPiecewiseLinear);
    let mut prev_count = 0usize;
    for (k, f) in ladder.levels().iter().enumerate() {
        let count = segments_of(f).len();
        if count != 1 << k || count <= prev_count {
            r.fail(
                Witness {
                    kind: WitnessKind::PieceMismatch,
                    data: vec![Rational::from(k as i64)],
                    lhs: Rational::from(count as i64),
                    rhs: Rational::from(1i64 << k),
                },
                CAP,
            );
        }
        prev_count = count;
    }
    let segs = segments_of(&ladder.levels()[depth]);
    r.count("segment_count", segs.len());
    r.count("depth", depth);
    for k in 1..=depth {
        let bound = Rational::pow2(-(k as i32));
        match segs.iter().find(|s| s.left.is_positive() && s.right < bound) {
            Some(s) => r.record(
                Witness {
                    kind: WitnessKind::Segment,
                    data: vec![s.left.clone(), s.right.clone()],
                    lhs: s.right.clone(),
                    rhs: bound,
                },
                CAP,
            ),
            None => r.fail(
                Witness {
                    kind: WitnessKind::Segment,
                    data: vec![Rational::zero(), bound.clone()],
                    lhs: Rational::zero(),
                    rhs: bound,
                },
                CAP,
            ),
        }
    }
    if let Some(s) = segs.iter().find(|s| s.left.is_positive()) {
        r.stat("first_segment_left", s.left.clone());
        r.stat("first_segment_right", s.right.clone());
    }
    Ok(r)
}

/// Default probe points for the approximation chains.
pub fn default_probes() -> Vec<Rational> {
    vec![Rational::new(1, 3), Rational::new(2, 3), Rational::new(1, 7)]
}

/// Sorted negative segments with interval queries.
struct SegmentIndex<'a> {
    segs: &'a [NegativeSegment],
}

impl<'a> SegmentIndex<'a> {
    /// Segments whose interior meets `]lo, hi[`.
    fn overlapping(&self, lo: &Rational, hi: &Rational) -> &'a [NegativeSegment] {
        let start = self.segs.partition_point(|s| s.right <= *lo);
        let end = self.segs.partition_point(|s| s.left < *hi);
        &self.segs[start..end.max(start)]
    }

    fn starting_at(&self, x: &Rational) -> Option<&'a NegativeSegment> {
        let k = self.segs.partition_point(|s| s.left < *x);
        self.segs.get(k).filter(|s| s.left == *x)
    }
}

fn sorted_in(points: &[Rational], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let start = points.partition_point(|b| b < lo);
    let end = points.partition_point(|b| b <= hi);
    points[start..end].to_vec()
}

/// Vertices of the complex restricted to the box `U × V`.
fn box_vertices(f: &PwlFunction, u: (&Rational, &Rational), v: (&Rational, &Rational)) -> BTreeSet<(Rational, Rational)> {
    let bps = f.breakpoints();
    let lines = |lo: &Rational, hi: &Rational| -> Vec<Rational> {
        let base = lo.floor();
        let mut out = BTreeSet::new();
        out.insert(lo.clone());
        out.insert(hi.clone());
        let mut shift = base.clone();
        while shift <= *hi {
            for b in sorted_in(bps, &(lo - &shift), &(hi - &shift)) {
                out.insert(b + &shift);
            }
            shift += &Rational::one();
        }
        out.into_iter().collect()
    };
    let xs = lines(u.0, u.1);
    let ys = lines(v.0, v.1);
    let ds = lines(&(u.0 + v.0), &(u.1 + v.1));
    let mut out = BTreeSet::new();
    for x in &xs {
        for y in &ys {
            out.insert((x.clone(), y.clone()));
        }
        for d in &ds {
            let y = d - x;
            if *v.0 <= y && y <= *v.1 {
                out.insert((x.clone(), y));
            }
        }
    }
    for y in &ys {
        for d in &ds {
            let x = d - y;
            if *u.0 <= x && x <= *u.1 {
                out.insert((x, y.clone()));
            }
        }
    }
    out
}

fn interval_additivity(f: &PwlFunction, segs: &[NegativeSegment]) -> VerificationReport {
    let mut r = VerificationReport::new(Property::FacetEvidence);
    r.notes.push("interval additivity on U x V for every negative segment".into());
    let one = Rational::one();
    let two = Rational::from(2);
    let mut checked = 0usize;
    for s in segs {
        let ua = Rational::midpoint(&s.left, &s.right);
        let vb = &one - (&s.right - &s.left) / &two;
        for (x, y) in box_vertices(f, (&ua, &s.right), (&vb, &one)) {
            checked += 1;
            let d = delta(f, &x, &y);
            if !d.is_zero() {
                let w = Witness::subadditivity(f, x, y);
                r.fail(Witness { kind: WitnessKind::Additivity, ..w }, CAP);
            }
        }
    }
    r.count("segments", segs.len());
    r.count("vertices_checked", checked);
    r
}

fn midpoint_relations(f: &PwlFunction, segs: &[NegativeSegment], depth: usize) -> VerificationReport {
    let mut r = VerificationReport::new(Property::FacetEvidence);
    r.notes.push("midpoint relations psi(m)+psi(m)=psi(2m) and psi(m_s)+psi(m)=psi(m_s+m)".into());
    let index = SegmentIndex { segs };
    let mut relations = 0usize;
    let mut tight = |r: &mut VerificationReport, u: &Rational, v: &Rational| {
        relations += 1;
        let w = Witness {
            kind: WitnessKind::Additivity,
            ..Witness::subadditivity(f, u.clone(), v.clone())
        };
        if w.lhs == w.rhs {
            r.record(w, CAP);
        } else {
            r.fail(w, CAP);
        }
    };
    let landing = |r: &mut VerificationReport, at: &Rational, max_index: usize, exact: bool| {
        let at = at.mod_one();
        let ok = index
            .starting_at(&at)
            .is_some_and(|s| if exact { s.index == max_index } else { s.index <= max_index });
        if !ok {
            r.fail(
                Witness {
                    kind: WitnessKind::Segment,
                    data: vec![at.clone()],
                    lhs: at,
                    rhs: Rational::from(max_index as i64),
                },
                CAP,
            );
        }
    };
    for j in 1..=depth {
        let Some(closest) = segs.iter().find(|s| s.index == j) else {
            continue;
        };
        let m = closest.midpoint();
        let k = j - 1;
        tight(&mut r, &m, &m);
        landing(&mut r, &(&m + &m), k, true);
        for s in segs.iter().filter(|s| s.index == j) {
            let ms = s.midpoint();
            tight(&mut r, &ms, &m);
            landing(&mut r, &(&ms + &m), k, false);
        }
    }
    r.count("relations_checked", relations);
    r
}

struct ChainLink {
    gap: Rational,
    y: Rational,
    z: Rational,
}

/// The pair `y + z = x̄` with `y, z ∈ S_depth`, `0 < z < 1/n`, minimizing
/// `ψ(y) + ψ(z) - ψ(x̄)`, ties broken by the smaller `z`.
fn best_link(f: &PwlFunction, index: &SegmentIndex, xbar: &Rational, fx: &Rational, n: usize) -> Option<ChainLink> {
    let window_lo = xbar - Rational::new(1, n as i64);
    let zero = Rational::zero();
    let mut best: Option<ChainLink> = None;
    for ys in index.overlapping(&window_lo, xbar) {
        let a1 = Rational::max_of(&ys.left, &window_lo);
        let a2 = Rational::min_of(&ys.right, xbar);
        if a1 >= a2 {
            continue;
        }
        let (lo, hi) = (xbar - a2, xbar - a1);
        for zs in index.overlapping(&lo, &hi) {
            let a = Rational::max_of(Rational::max_of(&lo, &zs.left), &zero);
            let b = Rational::min_of(&hi, &zs.right);
            if a >= b {
                continue;
            }
            let z = Rational::midpoint(a, b);
            let y = xbar - &z;
            let gap = f.eval(&y) + f.eval(&z) - fx;
            let better = match &best {
                None => true,
                Some(cur) => gap < cur.gap || (gap == cur.gap && z < cur.z),
            };
            if better {
                best = Some(ChainLink { gap, y, z });
            }
        }
    }
    best
}

fn approximation_chain(
    f: &PwlFunction,
    segs: &[NegativeSegment],
    xbar: &Rational,
    depth: usize,
    lipschitz: &Rational,
    params: Option<&LimitParams>,
) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(Property::FacetEvidence);
    r.notes.push(format!("approximation chain for x = {xbar}"));
    r.stat("probe", xbar.clone());
    let index = SegmentIndex { segs };
    let fx = f.eval(xbar);
    let floor = match params {
        Some(p) => Some(eval_limit_with(xbar, &Rational::pow2(-30), p)?.lower().clone()),
        None => {
            r.notes.push("no closed-form tail: limit enclosure check skipped".into());
            None
        }
    };
    let two = Rational::from(2);
    let mut prev_gap: Option<Rational> = None;
    for n in 2..=depth {
        let bound = Rational::new(1, n as i64);
        let Some(link) = best_link(f, &index, xbar, &fx, n) else {
            r.fail(
                Witness {
                    kind: WitnessKind::ValuePoint,
                    data: vec![xbar.clone()],
                    lhs: Rational::from(n as i64),
                    rhs: bound,
                },
                CAP,
            );
            continue;
        };
        let sum = &link.gap + &fx;
        let mut ok = !link.gap.is_negative()
            && link.z.is_positive()
            && link.z < bound
            && link.gap <= &two * lipschitz * &link.z
            && prev_gap.as_ref().is_none_or(|p| link.gap <= *p);
        if let Some(lo) = &floor {
            ok &= sum >= *lo;
        }
        let w = Witness {
            kind: WitnessKind::SubadditivityPair,
            data: vec![link.y.clone(), link.z.clone()],
            lhs: sum,
            rhs: fx.clone(),
        };
        if ok {
            r.record(w, CAP);
        } else {
            r.fail(w, CAP);
        }
        r.stat("final_gap", link.gap.clone());
        r.stat("final_z", link.z.clone());
        prev_gap = Some(link.gap);
    }
    r.count("links", depth.saturating_sub(1));
    Ok(r)
}

/// Finite checks on `ψ_depth` of the relations used to show `ψ` is a
/// facet: interval additivity around each negative segment, the midpoint
/// relations, and approximation chains `y_n + z_n = x̄` for each probe.
/// Only points of `S_depth` are touched, so every value is also a value
/// of `ψ`. This is evidence, not a decision procedure.
pub fn facet_evidence(
    depth: usize,
    schedule: &EpsilonSchedule,
    probes: &[Rational],
) -> Result<VerificationReport> {
    check_depth(depth)?;
    for p in probes {
        if !p.is_positive() || *p >= Rational::one() {
            return Err(Error::OutOfDomain {
                name: "probe",
                value: p.clone(),
                domain: "]0, 1[",
            });
        }
    }
    let f = build(schedule, depth)?;
    let segs = segments_of(&f);
    let params = match schedule.kind() {
        ScheduleKind::Geometric { .. } => Some(LimitParams::new(schedule)?),
        ScheduleKind::Explicit(_) => None,
    };
    let one = Rational::one();
    let alpha = schedule.alpha();
    let gamma = gamma_i(schedule, depth)?;
    let pos_slope = (&one - &gamma) / ((&one - alpha) * &gamma);
    let neg_abs = (&one - alpha).recip();
    let lipschitz = Rational::max_of(&pos_slope, &neg_abs).clone();

    let mut r = VerificationReport::new(Property::FacetEvidence);
    r.count("depth", depth);
    r.count("segments", segs.len());
    r.components.push(interval_additivity(&f, &segs));
    r.components.push(midpoint_relations(&f, &segs, depth));
    for p in probes {
        r.components
            .push(approximation_chain(&f, &segs, p, depth, &lipschitz, params.as_ref())?);
    }
    r.holds = r.components.iter().all(|c| c.holds);
    r.witness_total = r.components.iter().map(|c| c.witness_total).sum();
    r.notes.push(
        "finite evidence on psi_depth restricted to the negative-slope set; facet-ness of the limit is not decided"
            .into(),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn std_sched() -> EpsilonSchedule {
        EpsilonSchedule::standard()
    }

    #[test]
    fn gamma_and_constant() {
        let s = std_sched();
        let p = LimitParams::new(&s).unwrap();
        assert_eq!(p.gamma, q(1, 4));
        assert_eq!(p.c, q(3, 1));
        assert_eq!(convergence_constant(&p), q(3, 1));
        let s2 = EpsilonSchedule::geometric(q(4, 5), q(4, 5), q(1, 4)).unwrap();
        assert_eq!(gamma_limit(&s2).unwrap(), q(2, 5));
        for k in 0..=10 {
            assert!(p.gamma < gamma_i(&s, k).unwrap());
        }
        assert_eq!(constant_for(&q(1, 2), &q(1, 2)), q(1, 1));
        let e = EpsilonSchedule::explicit(q(1, 2), vec![q(1, 8)]).unwrap();
        assert!(matches!(gamma_limit(&e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn locate_examples() {
        let s = std_sched();
        assert_eq!(
            locate(&q(3, 4), 5, &s).unwrap(),
            SegmentLocation::Negative { left: q(1, 2), right: q(1, 1), index: 0 }
        );
        assert_eq!(
            locate(&q(1, 4), 1, &s).unwrap(),
            SegmentLocation::Negative { left: q(3, 16), right: q(5, 16), index: 1 }
        );
        assert_eq!(
            locate(&q(1, 10), 1, &s).unwrap(),
            SegmentLocation::Positive { left: q(0, 1), right: q(3, 16), depth: 1 }
        );
        assert!(locate(&q(0, 1), 3, &s).is_err());
        assert!(locate(&q(1, 1), 3, &s).is_err());
    }

    #[test]
    fn eval_examples() {
        let s = std_sched();
        let e = eval_limit(&q(1, 2), &q(1, 1000), &s).unwrap();
        assert_eq!((e.mode.clone(), e.depth), (LimitMode::Exact { value: q(1, 1), segment_index: 0 }, 0));
        let e = eval_limit(&q(3, 16), &q(1, 1000), &s).unwrap();
        assert_eq!(e.lower(), &q(5, 8));
        assert_eq!(e.depth, 1);
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"point":"3/16","mode":"exact","value":"5/8","depth":1}"#
        );
        let e = eval_limit(&q(-3, 2), &q(1, 1000), &s).unwrap();
        assert_eq!(e.point, q(1, 2));
        assert!(eval_limit(&q(1, 3), &q(0, 1), &s).is_err());
        let z = eval_limit(&q(2, 1), &q(1, 10), &s).unwrap();
        assert_eq!(z.lower(), &q(0, 1));
    }

    #[test]
    fn enclosure_width_and_clipping() {
        let s = std_sched();
        let tol = q(1, 1000);
        let e = eval_limit(&Rational::pow2(-40), &tol, &s).unwrap();
        assert!(!e.is_exact());
        assert!(e.width() <= &tol * q(2, 1));
        assert_eq!(e.lower(), &q(0, 1));
        let p = LimitParams::new(&s).unwrap();
        assert!(p.radius(e.depth) <= tol);
        assert!(p.radius(e.depth - 1) > tol);
    }

    #[test]
    fn segment_examples() {
        let s = std_sched();
        assert_eq!(
            negative_segments(0, &s).unwrap(),
            vec![NegativeSegment { left: q(1, 2), right: q(1, 1), index: 0 }]
        );
        assert_eq!(
            negative_segments(1, &s).unwrap(),
            vec![
                NegativeSegment { left: q(3, 16), right: q(5, 16), index: 1 },
                NegativeSegment { left: q(1, 2), right: q(1, 1), index: 0 }
            ]
        );
        assert!(matches!(negative_segments(21, &s), Err(Error::DepthPolicy { .. })));
        assert_eq!(density_gap(0, &s).unwrap(), q(1, 2));
        assert_eq!(density_gap(1, &s).unwrap(), q(3, 16));
        assert!(density_gap(10, &s).unwrap() < Rational::pow2(-11));
    }

    #[test]
    fn non_pwl_examples() {
        let s = std_sched();
        let r = non_pwl_evidence(1, &s).unwrap();
        assert!(r.holds);
        assert_eq!(r.witnesses[0].data, vec![q(3, 16), q(5, 16)]);
        assert!(non_pwl_evidence(0, &s).is_err());
    }

    #[test]
    fn facet_evidence_small_depths() {
        let s = std_sched();
        let r0 = facet_evidence(0, &s, &default_probes()).unwrap();
        assert!(r0.holds);
        let r1 = facet_evidence(1, &s, &default_probes()).unwrap();
        assert!(r1.holds, "{}", r1.to_json());
        let mid = &r1.components[1];
        let w = &mid.witnesses[0];
        assert_eq!(w.data, vec![q(1, 4), q(1, 4)]);
        assert_eq!((w.lhs.clone(), w.rhs.clone()), (q(1, 1), q(1, 1)));
        let f = build(&s, 1).unwrap();
        let verts = box_vertices(&f, (&q(1, 4), &q(5, 16)), (&q(15, 16), &q(1, 1)));
        assert!(verts.contains(&(q(1, 4), q(15, 16))));
        assert!(verts.iter().all(|(x, y)| delta(&f, x, y).is_zero()));
        assert!(facet_evidence(3, &s, &[q(3, 2)]).is_err());
    }

    #[test]
    fn chains_at_depth_four() {
        let s = std_sched();
        let r = facet_evidence(4, &s, &default_probes()).unwrap();
        assert!(r.holds, "{}", r.to_json());
        for c in &r.components[2..] {
            assert_eq!(c.witnesses.len(), 3);
            for w in &c.witnesses {
                assert!(w.lhs >= w.rhs);
            }
        }
    }
}
