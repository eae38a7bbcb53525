use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// How the epsilons are given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `ε_1, …, ε_k`.
    Explicit(Vec<Rational>),
    /// `ε_i = base · ratio^i` for `i ≥ 1`, with `0 < ratio < 1/2`.
    Geometric { base: Rational, ratio: Rational },
}

/// Parameters `(α, ε_1, ε_2, …)` of the construction, validated on
/// creation:
///
/// * `0 < α < 1`;
/// * every `ε_i > 0` and the sequence is nonincreasing;
/// * `ε_1 ≤ 1 - α`;
/// * `Σ 2^{i-1} ε_i < α` (every prefix for explicit lists, the closed-form
///   full series for geometric ones).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct EpsilonSchedule {
    alpha: Rational,
    kind: ScheduleKind,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawSchedule {
    Geometric {
        alpha: Rational,
        base: Rational,
        ratio: Rational,
    },
    Explicit {
        alpha: Rational,
        epsilons: Vec<Rational>,
    },
}

impl TryFrom<RawSchedule> for EpsilonSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        match raw {
            RawSchedule::Geometric { alpha, base, ratio } => {
                EpsilonSchedule::geometric(alpha, base, ratio)
            }
            RawSchedule::Explicit { alpha, epsilons } => EpsilonSchedule::explicit(alpha, epsilons),
        }
    }
}

impl From<EpsilonSchedule> for RawSchedule {
    fn from(s: EpsilonSchedule) -> Self {
        match s.kind {
            ScheduleKind::Geometric { base, ratio } => RawSchedule::Geometric {
                alpha: s.alpha,
                base,
                ratio,
            },
            ScheduleKind::Explicit(epsilons) => RawSchedule::Explicit {
                alpha: s.alpha,
                epsilons,
            },
        }
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidSchedule { field, reason }
}

impl EpsilonSchedule {
    pub fn new(alpha: Rational, kind: ScheduleKind) -> Result<Self> {
        let s = EpsilonSchedule { alpha, kind };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(alpha: Rational, base: Rational, ratio: Rational) -> Result<Self> {
        Self::new(alpha, ScheduleKind::Geometric { base, ratio })
    }

    pub fn explicit(alpha: Rational, epsilons: Vec<Rational>) -> Result<Self> {
        Self::new(alpha, ScheduleKind::Explicit(epsilons))
    }

    /// `α = 1/2`, `ε_i = (1/2)(1/4)^i = 2^{-2i-1}`.
    pub fn standard() -> Self {
        Self::geometric(Rational::new(1, 2), Rational::new(1, 2), Rational::new(1, 4))
            .expect("standard schedule is valid")
    }

    fn validate(&self) -> Result<()> {
        let one = Rational::one();
        let alpha = &self.alpha;
        if !alpha.is_positive() || *alpha >= one {
            return Err(invalid("alpha", format!("{alpha} is not in ]0, 1[")));
        }
        match &self.kind {
            ScheduleKind::Geometric { base, ratio } => {
                if !base.is_positive() {
                    return Err(invalid("base", format!("{base} must be positive")));
                }
                if !ratio.is_positive() || ratio * Rational::from(2) >= one {
                    return Err(invalid(
                        "ratio",
                        format!("{ratio} must satisfy 0 < ratio < 1/2"),
                    ));
                }
            }
            ScheduleKind::Explicit(eps) => {
                let mut sum = Rational::zero();
                let mut weight = Rational::one();
                for (k, e) in eps.iter().enumerate() {
                    if !e.is_positive() {
                        return Err(invalid("epsilons", format!("epsilon_{} = {e} is not positive", k + 1)));
                    }
                    if k > 0 && e > &eps[k - 1] {
                        return Err(invalid(
                            "epsilons",
                            format!("sequence increases at epsilon_{} = {e}", k + 1),
                        ));
                    }
                    sum += &(&weight * e);
                    if sum >= *alpha {
                        return Err(invalid(
                            "epsilons",
                            format!(
                                "sum of 2^(i-1) epsilon_i up to i = {} is {sum}, not below alpha = {alpha}",
                                k + 1
                            ),
                        ));
                    }
                    weight = weight * Rational::from(2);
                }
            }
        }
        if let Some(e1) = self.epsilon_opt(1) {
            if e1 > &one - alpha {
                return Err(invalid(
                    "epsilons",
                    format!("epsilon_1 = {e1} exceeds 1 - alpha = {}", &one - alpha),
                ));
            }
        }
        if let Some(total) = self.series_sum() {
            if total >= *alpha {
                return Err(invalid(
                    "ratio",
                    format!("series sum {total} is not below alpha = {alpha}"),
                ));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// Number of epsilons available, `None` for unbounded schedules.
    pub fn available_depth(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Explicit(eps) => Some(eps.len()),
            ScheduleKind::Geometric { .. } => None,
        }
    }

    pub fn supports_depth(&self, i: usize) -> Result<()> {
        match self.available_depth() {
            Some(n) if i > n => Err(Error::ScheduleExhausted {
                requested: i,
                available: n,
            }),
            _ => Ok(()),
        }
    }

    pub fn has_closed_form_tail(&self) -> bool {
        matches!(self.kind, ScheduleKind::Geometric { .. })
    }

    fn epsilon_opt(&self, i: usize) -> Option<Rational> {
        if i == 0 {
            return None;
        }
        match &self.kind {
            ScheduleKind::Explicit(eps) => eps.get(i - 1).cloned(),
            ScheduleKind::Geometric { base, ratio } => Some(base * ratio.pow(i as i32)),
        }
    }

    /// `ε_i`, 1-based.
    pub fn epsilon(&self, i: usize) -> Result<Rational> {
        if i == 0 {
            return Err(Error::InvalidSchedule {
                field: "epsilons",
                reason: "epsilons are indexed from 1".into(),
            });
        }
        self.supports_depth(i)?;
        Ok(self.epsilon_opt(i).expect("depth checked"))
    }

    /// `Σ_{i≥1} 2^{i-1} ε_i` in closed form; `None` for explicit lists.
    pub fn series_sum(&self) -> Option<Rational> {
        match &self.kind {
            ScheduleKind::Geometric { base, ratio } => {
                Some(base * ratio / (Rational::one() - ratio * Rational::from(2)))
            }
            ScheduleKind::Explicit(_) => None,
        }
    }

    /// Sum of the first `i` weighted epsilons.
    pub fn partial_sum(&self, i: usize) -> Result<Rational> {
        self.supports_depth(i)?;
        let mut sum = Rational::zero();
        let mut weight = Rational::one();
        for k in 1..=i {
            sum += &(&weight * self.epsilon_opt(k).unwrap());
            weight = weight * Rational::from(2);
        }
        Ok(sum)
    }
}
