//! The surface (a disk with `n` punctures), isotopy classes of embedded
//! circles on it, and orientation bookkeeping.
//!
//! On a punctured disk two embedded circles are isotopic exactly when they
//! enclose the same set of punctures, so an isotopy class is represented by
//! its enclosed-puncture set. This representation is what restricts the crate
//! to genus zero.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A disk with `n ≥ 0` punctures. `n = 0` is the plain disk (classical
/// Khovanov homology), `n = 1` the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surface {
    punctures: usize,
}

impl Surface {
    pub fn new(punctures: usize) -> Self {
        Surface { punctures }
    }

    pub fn punctures(&self) -> usize {
        self.punctures
    }
}

/// Signed ray-crossing counts per puncture; the H1 class of an oriented curve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WindingVector(Vec<i64>);

impl WindingVector {
    pub fn zero(n: usize) -> Self {
        WindingVector(vec![0; n])
    }

    pub fn new(coords: Vec<i64>) -> Self {
        WindingVector(coords)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, rhs: &WindingVector) -> WindingVector {
        debug_assert_eq!(self.len(), rhs.len());
        WindingVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_assign(&mut self, rhs: &WindingVector) {
        debug_assert_eq!(self.len(), rhs.len());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }

    pub fn negate(&self) -> WindingVector {
        WindingVector(self.0.iter().map(|x| -x).collect())
    }

    /// Reduction mod 2, used for the resolution-independence check of the
    /// underlying curve system's class.
    pub fn mod2(&self) -> Vec<bool> {
        self.0.iter().map(|x| x.rem_euclid(2) == 1).collect()
    }
}

impl fmt::Display for WindingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// One of the two orientations of a circle. `Ccw` is the globally preferred
/// label; all saddle case tables are written against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn reverse(self) -> Orientation {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }

    /// The orientation grading value: +1 for `Ccw`, -1 for `Cw`.
    pub fn w_value(self) -> i64 {
        match self {
            Orientation::Ccw => 1,
            Orientation::Cw => -1,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Ccw => write!(f, "ccw"),
            Orientation::Cw => write!(f, "cw"),
        }
    }
}

/// The isotopy class of an embedded circle: the set of punctures it encloses.
/// The empty set is the contractible class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleClass {
    support: BTreeSet<usize>,
}

impl CircleClass {
    pub fn contractible() -> Self {
        CircleClass { support: BTreeSet::new() }
    }

    pub fn from_support(support: impl IntoIterator<Item = usize>) -> Self {
        CircleClass { support: support.into_iter().collect() }
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn is_contractible(&self) -> bool {
        self.support.is_empty()
    }

    /// Classify a winding vector as the class of an embedded circle, returning
    /// the class together with the traversal orientation (`None` when
    /// contractible). Fails when the vector is not an embedded-circle class:
    /// every coordinate must be in {-1, 0, +1} and all nonzero coordinates
    /// must share one sign.
    pub fn from_winding(w: &WindingVector) -> Result<(CircleClass, Option<Orientation>)> {
        let mut sign = 0i64;
        let mut support = BTreeSet::new();
        for (i, &x) in w.coords().iter().enumerate() {
            match x {
                0 => {}
                1 | -1 => {
                    if sign == 0 {
                        sign = x;
                    } else if sign != x {
                        return Err(Error::internal(format!(
                            "winding {w} mixes signs; not an embedded-circle class"
                        )));
                    }
                    support.insert(i);
                }
                _ => {
                    return Err(Error::internal(format!(
                        "winding {w} has entry {x} at puncture {i}; not an embedded-circle class"
                    )));
                }
            }
        }
        let orientation = match sign {
            0 => None,
            1 => Some(Orientation::Ccw),
            _ => Some(Orientation::Cw),
        };
        Ok((CircleClass { support }, orientation))
    }

    /// The fundamental class of the circle with the given orientation:
    /// +1 on the support for `Ccw`, -1 for `Cw`, 0 elsewhere.
    pub fn oriented_class(&self, n: usize, o: Orientation) -> WindingVector {
        let mut coords = vec![0i64; n];
        for &p in &self.support {
            coords[p] = o.w_value();
        }
        WindingVector(coords)
    }
}

impl fmt::Display for CircleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.support.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// The orientation correspondence induced by an isotopy between two circles
/// of the same nonempty class. Planar isotopies preserve rotation sense, so
/// the correspondence is always `Ccw -> Ccw`, `Cw -> Cw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientationMap;

impl OrientationMap {
    pub fn apply(&self, o: Orientation) -> Orientation {
        o
    }
}

/// The canonical identification of orientations of two isotopic
/// non-contractible circles. Unequal or empty supports are a caller bug.
pub fn canonical_identify(c1: &CircleClass, c2: &CircleClass) -> Result<OrientationMap> {
    if c1.is_contractible() || c2.is_contractible() {
        return Err(Error::internal(format!(
            "canonical identification needs non-contractible circles, got {c1} and {c2}"
        )));
    }
    if c1 != c2 {
        return Err(Error::internal(format!(
            "circles {c1} and {c2} are not isotopic; no canonical identification"
        )));
    }
    Ok(OrientationMap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oriented_class_values() {
        let c = CircleClass::from_support([0]);
        assert_eq!(c.oriented_class(1, Orientation::Ccw), WindingVector::new(vec![1]));
        let trivial = CircleClass::contractible();
        assert!(trivial.oriented_class(2, Orientation::Cw).is_zero());
        let c = CircleClass::from_support([0, 2]);
        assert_eq!(c.oriented_class(3, Orientation::Cw), WindingVector::new(vec![-1, 0, -1]));
    }

    #[test]
    fn reversal_negates_class() {
        for support in [vec![], vec![0], vec![1], vec![0, 1], vec![0, 1, 2]] {
            let c = CircleClass::from_support(support);
            let n = 3;
            assert_eq!(
                c.oriented_class(n, Orientation::Ccw),
                c.oriented_class(n, Orientation::Cw).negate()
            );
        }
    }

    #[test]
    fn identify_isotopic_circles() {
        let a = CircleClass::from_support([2]);
        let b = CircleClass::from_support([2]);
        let m = canonical_identify(&a, &b).unwrap();
        assert_eq!(m.apply(Orientation::Ccw), Orientation::Ccw);
        assert_eq!(m.apply(Orientation::Cw), Orientation::Cw);

        let c = canonical_identify(&CircleClass::from_support([1, 2]), &CircleClass::from_support([1, 2]));
        assert!(c.is_ok());

        let err = canonical_identify(&CircleClass::from_support([1]), &CircleClass::from_support([2]));
        assert!(err.is_err());
    }

    #[test]
    fn classify_windings() {
        let (c, o) = CircleClass::from_winding(&WindingVector::new(vec![0, 0])).unwrap();
        assert!(c.is_contractible());
        assert_eq!(o, None);

        let (c, o) = CircleClass::from_winding(&WindingVector::new(vec![-1, 0, -1])).unwrap();
        assert_eq!(c, CircleClass::from_support([0, 2]));
        assert_eq!(o, Some(Orientation::Cw));

        assert!(CircleClass::from_winding(&WindingVector::new(vec![1, -1])).is_err());
        assert!(CircleClass::from_winding(&WindingVector::new(vec![2])).is_err());
    }
}
