//! Elements of free sharp monoids over named generators, with the
//! divisibility order `p <= q` iff `q = p + r` for some `r`. In a free
//! commutative monoid this is coordinatewise domination of exponent vectors.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonoidError {
    #[error("homomorphism image uses generator '{0}' outside its target")]
    ImageOutsideTarget(String),
    #[error("homomorphism does not define an image for generator '{0}'")]
    MissingImage(String),
}

/// A finitely supported exponent vector. The zero element is the empty map;
/// zero coefficients are never stored.
///
/// The derived `Ord` is structural (for use in sorted containers) and is not
/// the monoid order; use [`MonoidElement::divides`] and
/// [`MonoidElement::comparable`] for that.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidElement {
    coeffs: BTreeMap<String, u64>,
}

impl MonoidElement {
    pub fn zero() -> Self {
        MonoidElement::default()
    }

    pub fn generator(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), 1);
        MonoidElement { coeffs }
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (String, u64)>) -> Self {
        MonoidElement {
            coeffs: coeffs.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, name: &str) -> u64 {
        self.coeffs.get(name).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<String, u64> {
        &self.coeffs
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(|s| s.as_str())
    }

    /// `true` iff the element is a single generator with coefficient one.
    pub fn is_unit_generator(&self) -> Option<&str> {
        if self.coeffs.len() == 1 {
            let (name, &c) = self.coeffs.iter().next().unwrap();
            if c == 1 {
                return Some(name);
            }
        }
        None
    }

    pub fn add(&self, other: &MonoidElement) -> MonoidElement {
        let mut coeffs = self.coeffs.clone();
        for (name, &c) in &other.coeffs {
            *coeffs.entry(name.clone()).or_insert(0) += c;
        }
        MonoidElement { coeffs }
    }

    /// `other - self` when `self` divides `other`.
    pub fn difference_to(&self, other: &MonoidElement) -> Option<MonoidElement> {
        if !self.divides(other) {
            return None;
        }
        let coeffs = other
            .coeffs
            .iter()
            .map(|(name, &c)| (name.clone(), c - self.coeff(name)))
            .filter(|&(_, c)| c > 0)
            .collect();
        Some(MonoidElement { coeffs })
    }

    /// The monoid order: `self <= other` iff `other = self + r`.
    pub fn divides(&self, other: &MonoidElement) -> bool {
        self.coeffs.iter().all(|(name, &c)| c <= other.coeff(name))
    }

    pub fn strictly_divides(&self, other: &MonoidElement) -> bool {
        self != other && self.divides(other)
    }

    pub fn comparable(&self, other: &MonoidElement) -> bool {
        self.divides(other) || other.divides(self)
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (name, &c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if c == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{c}*{name}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A monoid homomorphism between free monoids, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    target_generators: Vec<String>,
    images: BTreeMap<String, MonoidElement>,
}

impl MonoidHom {
    pub fn new(
        target_generators: Vec<String>,
        images: BTreeMap<String, MonoidElement>,
    ) -> Result<Self, MonoidError> {
        let target: BTreeSet<&str> = target_generators.iter().map(|s| s.as_str()).collect();
        for image in images.values() {
            for g in image.support() {
                if !target.contains(g) {
                    return Err(MonoidError::ImageOutsideTarget(g.to_string()));
                }
            }
        }
        Ok(MonoidHom {
            target_generators,
            images,
        })
    }

    pub fn identity(generators: &[String]) -> Self {
        MonoidHom {
            target_generators: generators.to_vec(),
            images: generators
                .iter()
                .map(|g| (g.clone(), MonoidElement::generator(g.clone())))
                .collect(),
        }
    }

    /// The face contraction sending the listed generators to zero and fixing
    /// the rest.
    pub fn killing(source_generators: &[String], killed: &[&str]) -> Self {
        let keep: Vec<String> = source_generators
            .iter()
            .filter(|g| !killed.contains(&g.as_str()))
            .cloned()
            .collect();
        let images = source_generators
            .iter()
            .map(|g| {
                let image = if killed.contains(&g.as_str()) {
                    MonoidElement::zero()
                } else {
                    MonoidElement::generator(g.clone())
                };
                (g.clone(), image)
            })
            .collect();
        MonoidHom {
            target_generators: keep,
            images,
        }
    }

    /// The projection keeping exactly one generator, i.e. the map to a rank-1
    /// monoid used to probe a single smoothing parameter.
    pub fn onto_generator(source_generators: &[String], kept: &str) -> Self {
        let killed: Vec<&str> = source_generators
            .iter()
            .map(|s| s.as_str())
            .filter(|g| *g != kept)
            .collect();
        Self::killing(source_generators, &killed)
    }

    pub fn target_generators(&self) -> &[String] {
        &self.target_generators
    }

    pub fn apply(&self, element: &MonoidElement) -> Result<MonoidElement, MonoidError> {
        let mut out = MonoidElement::zero();
        for (name, &c) in element.coeffs() {
            let image = self
                .images
                .get(name)
                .ok_or_else(|| MonoidError::MissingImage(name.clone()))?;
            for (g, &ic) in image.coeffs() {
                out = out.add(&MonoidElement::from_coeffs([(g.clone(), ic * c)]));
            }
        }
        Ok(out)
    }

    /// Composition `other . self` (apply `self` first).
    pub fn then(&self, other: &MonoidHom) -> Result<MonoidHom, MonoidError> {
        let images = self
            .images
            .iter()
            .map(|(name, image)| Ok((name.clone(), other.apply(image)?)))
            .collect::<Result<_, MonoidError>>()?;
        MonoidHom::new(other.target_generators.clone(), images)
    }
}
