//! Exact probability tables.
//!
//! Masses are stored sparsely: support points that are absent carry zero mass,
//! and zero masses are dropped on construction so that two tables compare equal
//! exactly when they describe the same distribution.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::probability::{format_rational, Rational};

/// How much of the distribution a table covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Masses plus the undefined-event slot sum to exactly one.
    Complete,
    /// Support cut at `horizon`; the remaining mass is reported as tail.
    Truncated { horizon: u64 },
    /// No normalization claim (ad hoc tables).
    Partial,
}

fn collect_masses<K: Ord>(
    entries: impl IntoIterator<Item = (K, Rational)>,
) -> Result<BTreeMap<K, Rational>> {
    let mut masses: BTreeMap<K, Rational> = BTreeMap::new();
    for (key, mass) in entries {
        if mass.is_negative() {
            return Err(Error::InvalidMass(format!("negative mass {mass}")));
        }
        *masses.entry(key).or_insert_with(Rational::zero) += mass;
    }
    masses.retain(|_, m| !m.is_zero());
    Ok(masses)
}

fn check_unit_total(total: &Rational) -> Result<()> {
    if total.is_one() {
        Ok(())
    } else {
        Err(Error::InvalidMass(format!(
            "total mass {} differs from 1",
            format_rational(total)
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPmf {
    masses: BTreeMap<u64, Rational>,
    undefined: Rational,
    coverage: Coverage,
}

impl ExactPmf {
    /// A table with no normalization requirement.
    pub fn partial(entries: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        Ok(ExactPmf {
            masses: collect_masses(entries)?,
            undefined: Rational::zero(),
            coverage: Coverage::Partial,
        })
    }

    /// A full distribution. `undefined` is the mass of outcomes where the
    /// statistic has no value (e.g. the shortest run of a B-free sequence).
    pub fn complete(
        entries: impl IntoIterator<Item = (u64, Rational)>,
        undefined: Rational,
    ) -> Result<Self> {
        if undefined.is_negative() {
            return Err(Error::InvalidMass("negative undefined-event mass".into()));
        }
        let pmf = ExactPmf {
            masses: collect_masses(entries)?,
            undefined,
            coverage: Coverage::Complete,
        };
        check_unit_total(&(pmf.total_mass() + &pmf.undefined))?;
        Ok(pmf)
    }

    /// A waiting-time table cut at `horizon`; mass beyond it becomes the tail.
    pub fn truncated(
        entries: impl IntoIterator<Item = (u64, Rational)>,
        horizon: u64,
    ) -> Result<Self> {
        let masses = collect_masses(entries)?;
        if let Some((&last, _)) = masses.last_key_value() {
            if last > horizon {
                return Err(Error::InvalidMass(format!(
                    "support point {last} lies beyond the horizon {horizon}"
                )));
            }
        }
        let pmf = ExactPmf {
            masses,
            undefined: Rational::zero(),
            coverage: Coverage::Truncated { horizon },
        };
        if pmf.total_mass() > Rational::one() {
            return Err(Error::InvalidMass("truncated table exceeds unit mass".into()));
        }
        Ok(pmf)
    }

    pub fn coverage(&self) -> Coverage {
        self.coverage
    }

    pub fn is_complete(&self) -> bool {
        self.coverage == Coverage::Complete
    }

    pub fn get(&self, x: u64) -> Rational {
        self.masses.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn masses(&self) -> &BTreeMap<u64, Rational> {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.masses.iter().map(|(&x, m)| (x, m))
    }

    /// Sum of the tabulated masses, excluding tail and undefined-event mass.
    pub fn total_mass(&self) -> Rational {
        self.masses.values().sum()
    }

    pub fn undefined_mass(&self) -> &Rational {
        &self.undefined
    }

    /// Mass beyond the horizon of a truncated table; zero otherwise.
    pub fn tail_mass(&self) -> Rational {
        match self.coverage {
            Coverage::Truncated { .. } => Rational::one() - self.total_mass(),
            _ => Rational::zero(),
        }
    }

    /// `P(X <= x)` over the tabulated support.
    pub fn cdf(&self, x: u64) -> Rational {
        self.masses.range(..=x).map(|(_, m)| m).sum()
    }

    /// `P(X >= x)` over the tabulated support.
    pub fn upper_tail(&self, x: u64) -> Rational {
        self.masses.range(x..).map(|(_, m)| m).sum()
    }
}

/// Distribution over `(length, count)` pairs plus an undefined-event slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointPmf {
    masses: BTreeMap<(u64, u64), Rational>,
    undefined: Rational,
}

impl JointPmf {
    /// A table whose total is not checked against 1.
    pub fn partial(
        entries: impl IntoIterator<Item = ((u64, u64), Rational)>,
        undefined: Rational,
    ) -> Result<Self> {
        Ok(JointPmf {
            masses: collect_masses(entries)?,
            undefined,
        })
    }

    pub fn complete(
        entries: impl IntoIterator<Item = ((u64, u64), Rational)>,
        undefined: Rational,
    ) -> Result<Self> {
        if undefined.is_negative() {
            return Err(Error::InvalidMass("negative undefined-event mass".into()));
        }
        let pmf = JointPmf {
            masses: collect_masses(entries)?,
            undefined,
        };
        check_unit_total(&(pmf.total_mass() + &pmf.undefined))?;
        Ok(pmf)
    }

    pub fn get(&self, length: u64, count: u64) -> Rational {
        self.masses
            .get(&(length, count))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn masses(&self) -> &BTreeMap<(u64, u64), Rational> {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), &Rational)> {
        self.masses.iter().map(|(&k, m)| (k, m))
    }

    pub fn total_mass(&self) -> Rational {
        self.masses.values().sum()
    }

    pub fn undefined_mass(&self) -> &Rational {
        &self.undefined
    }

    /// Sums out the count coordinate.
    pub fn marginal(&self) -> Result<ExactPmf> {
        ExactPmf::complete(
            self.masses.iter().map(|(&(len, _), m)| (len, m.clone())),
            self.undefined.clone(),
        )
    }
}

/// Result of evaluating any statistic: scalar or joint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distribution {
    Scalar(ExactPmf),
    Joint(JointPmf),
}

impl Distribution {
    pub fn as_scalar(&self) -> Option<&ExactPmf> {
        match self {
            Distribution::Scalar(p) => Some(p),
            Distribution::Joint(_) => None,
        }
    }

    pub fn as_joint(&self) -> Option<&JointPmf> {
        match self {
            Distribution::Joint(p) => Some(p),
            Distribution::Scalar(_) => None,
        }
    }

    pub fn into_scalar(self) -> Result<ExactPmf> {
        match self {
            Distribution::Scalar(p) => Ok(p),
            Distribution::Joint(_) => Err(Error::Unsupported("expected a scalar PMF".into())),
        }
    }

    pub fn into_joint(self) -> Result<JointPmf> {
        match self {
            Distribution::Joint(p) => Ok(p),
            Distribution::Scalar(_) => Err(Error::Unsupported("expected a joint PMF".into())),
        }
    }

    pub fn undefined_mass(&self) -> &Rational {
        match self {
            Distribution::Scalar(p) => p.undefined_mass(),
            Distribution::Joint(p) => p.undefined_mass(),
        }
    }

    pub fn total_mass(&self) -> Rational {
        match self {
            Distribution::Scalar(p) => p.total_mass(),
            Distribution::Joint(p) => p.total_mass(),
        }
    }

    pub fn tail_mass(&self) -> Rational {
        match self {
            Distribution::Scalar(p) => p.tail_mass(),
            Distribution::Joint(_) => Rational::zero(),
        }
    }
}
