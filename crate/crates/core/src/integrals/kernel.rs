use serde::{Deserialize, Serialize};

use super::geminal::GeminalFit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelTag {
    Overlap,
    Kinetic,
    Nuclear,
    Coulomb,
    F12,
    F12Coulomb,
    F12Squared,
}

impl KernelTag {
    pub fn name(self) -> &'static str {
        match self {
            KernelTag::Overlap => "overlap",
            KernelTag::Kinetic => "kinetic",
            KernelTag::Nuclear => "nuclear",
            KernelTag::Coulomb => "coulomb",
            KernelTag::F12 => "f12",
            KernelTag::F12Coulomb => "f12_coulomb",
            KernelTag::F12Squared => "f12_squared",
        }
    }

    pub fn is_f12(self) -> bool {
        matches!(self, KernelTag::F12 | KernelTag::F12Coulomb | KernelTag::F12Squared)
    }

    pub fn is_two_electron(self) -> bool {
        matches!(self, KernelTag::Coulomb) || self.is_f12()
    }
}

/// An integral kernel; `gamma` is set exactly for the f12 family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub tag: KernelTag,
    pub gamma: Option<f64>,
}

impl Kernel {
    pub fn new(tag: KernelTag, gamma: Option<f64>) -> Result<Self> {
        match (tag.is_f12(), gamma) {
            (true, Some(g)) if g > 0.0 => Ok(Kernel { tag, gamma }),
            (true, Some(g)) => Err(Error::Invalid(format!("gamma must be positive, got {g}"))),
            (true, None) => Err(Error::Invalid(format!("kernel {} needs gamma", tag.name()))),
            (false, None) => Ok(Kernel { tag, gamma }),
            (false, Some(_)) => Err(Error::Invalid(format!("kernel {} takes no gamma", tag.name()))),
        }
    }

    pub fn coulomb() -> Self {
        Kernel {
            tag: KernelTag::Coulomb,
            gamma: None,
        }
    }
}

/// Elementary two-electron operators understood by the Hermite engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// 1/r12
    Coulomb,
    /// exp(-w r12²)
    Gaussian(f64),
    /// exp(-w r12²)/r12
    GaussianCoulomb(f64),
}

/// Linear combination of primitive operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion(pub Vec<(f64, Primitive)>);

impl Expansion {
    /// Expansion of a kernel, including the -1/gamma prefactors of the f12 family.
    pub fn of(kernel: &Kernel, fit: Option<&GeminalFit>) -> Result<Self> {
        let tag = kernel.tag;
        if !tag.is_two_electron() {
            return Err(Error::Invalid(format!("{} is not a two-electron kernel", tag.name())));
        }
        if tag == KernelTag::Coulomb {
            return Ok(Expansion(vec![(1.0, Primitive::Coulomb)]));
        }
        let fit = fit.ok_or(Error::MissingFit(tag.name()))?;
        let g = kernel.gamma.unwrap_or(fit.gamma);
        if (g - fit.gamma).abs() > 1e-12 * g {
            return Err(Error::Invalid(format!(
                "kernel gamma {g} differs from fitted gamma {}",
                fit.gamma
            )));
        }
        let terms = match tag {
            KernelTag::F12 => fit
                .terms
                .iter()
                .map(|&(c, a)| (-c / g, Primitive::Gaussian(a)))
                .collect(),
            KernelTag::F12Coulomb => fit
                .terms
                .iter()
                .map(|&(c, a)| (-c / g, Primitive::GaussianCoulomb(a)))
                .collect(),
            KernelTag::F12Squared => {
                let mut v = Vec::new();
                for (i, &(ci, ai)) in fit.terms.iter().enumerate() {
                    for (j, &(cj, aj)) in fit.terms[..=i].iter().enumerate() {
                        let mult = if i == j { 1.0 } else { 2.0 };
                        v.push((mult * ci * cj / (g * g), Primitive::Gaussian(ai + aj)));
                    }
                }
                v
            }
            _ => unreachable!(),
        };
        Ok(Expansion(terms))
    }

    /// Same operators with absolute weights; a positive-definite majorant for screening.
    pub fn majorant(&self) -> Expansion {
        Expansion(self.0.iter().map(|&(w, p)| (w.abs(), p)).collect())
    }

    /// Evaluates the kernel at distance `r` (for tests and quadrature).
    pub fn eval(&self, r: f64) -> f64 {
        self.0
            .iter()
            .map(|&(w, p)| {
                w * match p {
                    Primitive::Coulomb => 1.0 / r,
                    Primitive::Gaussian(a) => (-a * r * r).exp(),
                    Primitive::GaussianCoulomb(a) => (-a * r * r).exp() / r,
                }
            })
            .sum()
    }
}
