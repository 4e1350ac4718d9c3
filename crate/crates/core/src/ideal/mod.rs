//! Ideals of rank-one unit-norm tensors, their theta bases and
//! combinatorial moment matrices.
//!
//! The `Full` format generates the ideal by a reduced Groebner basis; `TT`
//! and `HOSVD` generate the same ideal by the minors of fewer
//! matricizations. Theta bases and moment matrices always come from the
//! certified `Full` basis.

mod basis;
mod decompose;
mod generators;
mod moment;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::BigRational;
use num_traits::Float;
use serde::{Deserialize, Serialize};

pub use basis::{standard_monomials_of, ThetaBasis};
pub use decompose::{decompose_minor, parse_minor, Minor};
pub use generators::{full_minors, generators, matricization_minors, GeneratorSet};
pub use moment::{moment_structure_from, moment_structure_order3_fast, MomentEntry, MomentStructure};

use crate::error::{input, Error, Result};
use crate::grobner::GroebnerBasis;
use crate::tensor::{DenseTensor, Dims};

/// Which matricizations generate the ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Minors of every matricization, in Groebner-basis form.
    Full,
    /// Prefix matricizations `{1}, {1,2}, .., {1..d-1}`.
    Tt,
    /// Unfoldings `{1}, .., {d}`.
    Hosvd,
    /// Explicit list of row-mode sets (1-based).
    Custom(Vec<Vec<usize>>),
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Format::Full => write!(f, "full"),
            Format::Tt => write!(f, "tt"),
            Format::Hosvd => write!(f, "hosvd"),
            Format::Custom(sets) => {
                let parts: Vec<String> =
                    sets.iter().map(|s| s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")).collect();
                write!(f, "custom:{}", parts.join(";"))
            }
        }
    }
}

/// Parses `full`, `tt`, `hosvd` or `custom:1;1,2`.
impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Format::Full),
            "tt" => Ok(Format::Tt),
            "hosvd" => Ok(Format::Hosvd),
            other => {
                let body =
                    other.strip_prefix("custom:").ok_or_else(|| Error::Parse(format!("unknown format `{s}`")))?;
                let sets = body
                    .split(';')
                    .map(|set| {
                        set.split(',')
                            .map(|m| m.trim().parse::<usize>().map_err(|e| Error::Parse(format!("format `{s}`: {e}"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Format::Custom(sets))
            }
        }
    }
}

/// Shape plus generating format.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealSpec {
    pub dims: Dims,
    pub format: Format,
}

impl IdealSpec {
    pub fn new(dims: Dims, format: Format) -> Result<Self> {
        let spec = IdealSpec { dims, format };
        spec.validate()?;
        Ok(spec)
    }

    pub fn full(dims: Dims) -> Self {
        IdealSpec { dims, format: Format::Full }
    }

    /// Row-mode sets (1-based) of the generating matricizations. Empty for
    /// `Full`, which is generated by the combinatorial construction instead.
    pub fn matricizations(&self) -> Vec<Vec<usize>> {
        let d = self.dims.order();
        match &self.format {
            Format::Full => Vec::new(),
            Format::Tt => (1..d).map(|k| (1..=k).collect()).collect(),
            Format::Hosvd => (1..=d).map(|k| vec![k]).collect(),
            Format::Custom(sets) => sets.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims.order();
        if let Format::Custom(sets) = &self.format {
            if sets.is_empty() {
                return input("custom format needs at least one matricization");
            }
            for s in sets {
                let mut sorted = s.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if s.is_empty() || sorted.len() != s.len() || sorted.len() >= d || s.iter().any(|&m| m == 0 || m > d) {
                    return input(format!("matricization {s:?} is not a nonempty proper subset of 1..={d}"));
                }
            }
        }
        Ok(())
    }
}

type Shared<K, V> = OnceLock<RwLock<HashMap<K, Arc<V>>>>;

static BASES: Shared<Dims, GroebnerBasis<BigRational>> = OnceLock::new();
static STRUCTURES: Shared<(Dims, usize, bool), MomentStructure<BigRational>> = OnceLock::new();

fn memo<K, V>(cell: &Shared<K, V>, key: K, build: impl FnOnce() -> Result<V>) -> Result<Arc<V>>
where
    K: std::hash::Hash + Eq + Clone,
{
    let lock = cell.get_or_init(Default::default);
    if let Some(v) = lock.read().expect("cache lock").get(&key) {
        return Ok(Arc::clone(v));
    }
    let v = Arc::new(build()?);
    let mut w = lock.write().expect("cache lock");
    Ok(Arc::clone(w.entry(key).or_insert(v)))
}

/// The `Full` generators as a certified Groebner basis, memoized per shape.
pub fn certified_basis(dims: &Dims) -> Result<Arc<GroebnerBasis<BigRational>>> {
    memo(&BASES, dims.clone(), || {
        let gens = generators::<BigRational>(&IdealSpec::full(dims.clone()))?;
        GroebnerBasis::certify(gens.all())
    })
}

/// Theta basis of level `k`. Every format shares the basis of the `Full`
/// ideal.
pub fn standard_monomials(spec: &IdealSpec, k: usize) -> Result<ThetaBasis> {
    spec.validate()?;
    if k == 0 {
        return input("theta level k must be at least 1");
    }
    let gb = certified_basis(&spec.dims)?;
    Ok(standard_monomials_of(gb.as_ref(), &spec.dims, k))
}

/// Level-`k` moment structure by exact reduction, memoized.
pub fn moment_structure(spec: &IdealSpec, k: usize) -> Result<Arc<MomentStructure<BigRational>>> {
    spec.validate()?;
    memo(&STRUCTURES, (spec.dims.clone(), k, false), || {
        let basis = standard_monomials(spec, k)?;
        let gb = certified_basis(&spec.dims)?;
        moment_structure_from(gb.as_ref(), basis, spec.dims.clone())
    })
}

/// Moment structure for solving: the closed-form order-3 level-1 assembly
/// when it applies, the exact reduction otherwise.
pub fn solver_structure(spec: &IdealSpec, k: usize) -> Result<Arc<MomentStructure<BigRational>>> {
    spec.validate()?;
    if spec.dims.order() == 3 && k == 1 {
        memo(&STRUCTURES, (spec.dims.clone(), k, true), || moment_structure_order3_fast(&spec.dims))
    } else {
        moment_structure(spec, k)
    }
}

/// Largest absolute value of any generator at `x`.
pub fn variety_residual<T: Float>(spec: &IdealSpec, x: &DenseTensor<T>) -> Result<T> {
    if x.dims() != &spec.dims {
        return input(format!("tensor shape {} does not match ideal shape {}", x.dims(), spec.dims));
    }
    let gens = generators::<BigRational>(spec)?;
    let mut worst = T::zero();
    for g in gens.all() {
        let v = g.eval(x.values()).ok_or_else(|| Error::Invariant("generator evaluation failed".into()))?;
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_round_trip() {
        for s in ["full", "tt", "hosvd", "custom:1;1,2"] {
            let f: Format = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("nope".parse::<Format>().is_err());
    }

    #[test]
    fn matricization_lists() {
        let d: Dims = "2x2x2x2".parse().unwrap();
        assert_eq!(
            IdealSpec::new(d.clone(), Format::Tt).unwrap().matricizations(),
            vec![vec![1], vec![1, 2], vec![1, 2, 3]]
        );
        assert_eq!(IdealSpec::new(d.clone(), Format::Hosvd).unwrap().matricizations().len(), 4);
        assert!(IdealSpec::new(d.clone(), Format::Custom(vec![vec![1, 2, 3, 4]])).is_err());
        assert!(IdealSpec::new(d.clone(), Format::Custom(vec![vec![0]])).is_err());
        assert!(IdealSpec::new(d, Format::Custom(vec![vec![2, 2]])).is_err());
    }
}
