//! Parameter tables for the rank-one groups `SO0(n,1)`, `SU(n,1)`, `Sp(n,1)`
//! and the discrete components of `pi_alpha (x) pi_beta` that the operator
//! construction and the overgroup restriction argument predict.
//!
//! The lists are lower bounds on the discrete spectrum, not decompositions.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    R,
    C,
    H,
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Field::R),
            "C" | "c" => Ok(Field::C),
            "H" | "h" => Ok(Field::H),
            _ => Err(Error::Domain(format!("unknown field `{s}`, expected R, C or H"))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupParams {
    pub field: Field,
    pub n: u32,
    pub rho: Rational64,
    /// Open interval of complementary-series parameters.
    pub comp_range: (Rational64, Rational64),
}

impl GroupParams {
    pub fn rho_f64(&self) -> f64 {
        self.rho.to_f64().expect("small rational")
    }

    pub fn in_range(&self, mu: f64) -> bool {
        let (lo, hi) = self.comp_range;
        mu > lo.to_f64().expect("small rational") && mu < hi.to_f64().expect("small rational")
    }
}

pub fn group_params(field: Field, n: u32) -> Result<GroupParams> {
    if n < 2 {
        return Err(Error::Range(format!("n must be at least 2, got {n}")));
    }
    let n_r = Rational64::from_integer(n as i64);
    let rho = match field {
        Field::R => (n_r - 1) / 2,
        Field::C => n_r,
        Field::H => n_r * 2 + 1,
    };
    let two = Rational64::from_integer(2);
    let comp_range = match field {
        Field::R | Field::C => (Rational64::from_integer(0), rho * 2),
        Field::H => (two, rho * 2 - 2),
    };
    Ok(GroupParams {
        field,
        n,
        rho,
        comp_range,
    })
}

/// Which argument produces a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// The bilinear differential operator `D_{alpha,beta,j}` is bounded and nonzero.
    DifferentialOperator,
    /// Restriction from the overgroup's holomorphic discrete series.
    OvergroupRestriction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Component {
    pub param: f64,
    pub j: u32,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentList {
    pub field: Field,
    pub n: u32,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub components: Vec<Component>,
}

pub fn discrete_components(field: Field, n: u32, alpha: f64, beta: f64) -> Result<ComponentList> {
    let g = group_params(field, n)?;
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !g.in_range(v) {
            return Err(Error::Range(format!(
                "{name} = {v} outside the complementary range ({}, {})",
                g.comp_range.0, g.comp_range.1
            )));
        }
    }
    let rho = g.rho_f64();
    let sum = alpha + beta;
    let mut components = Vec::new();
    match field {
        Field::R => {
            let mut j = 0u32;
            while sum + 2.0 * f64::from(j) < rho {
                components.push(Component {
                    param: sum + 2.0 * f64::from(j),
                    j,
                    source: Source::DifferentialOperator,
                });
                j += 1;
            }
        }
        Field::C | Field::H => {
            let bound = if field == Field::C { n as f64 } else { 2.0 * n as f64 - 1.0 };
            if sum < bound {
                components.push(Component {
                    param: sum,
                    j: 0,
                    source: Source::OvergroupRestriction,
                });
            }
        }
    }
    Ok(ComponentList {
        field,
        n,
        rho,
        alpha,
        beta,
        components,
    })
}

/// `nu = mu / 2`, the overgroup parameter whose restriction contains `pi_mu`.
pub fn overgroup_parameter(field: Field, n: u32, mu: f64) -> Result<f64> {
    group_params(field, n)?;
    let (lo, hi) = match field {
        Field::R => return Err(Error::Range("no overgroup parameter for the real case".into())),
        Field::C => (0.0, n as f64),
        Field::H => (2.0, 2.0 * n as f64 - 1.0),
    };
    if !(mu > lo && mu < hi) {
        return Err(Error::Range(format!("mu = {mu} outside ({lo}, {hi})")));
    }
    Ok(mu / 2.0)
}
