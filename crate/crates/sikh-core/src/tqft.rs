//! State spaces of curve configurations and the band-surgery maps between
//! them.
//!
//! Each circle contributes a rank-2 module: a contractible circle has
//! generators `v+`, `v-`, a non-contractible one has a generator per
//! orientation. A band surgery either merges two circles or splits one, and
//! the induced map is given by a case table depending on which of the circles
//! involved are contractible. The two cases where all circles are
//! non-contractible carry the deformation parameter `λ`.
//!
//! Those two `λ`-cases are implemented twice: [`apply_saddle`] selects the
//! orientations by requiring winding-vector additivity together with a drop
//! of one in the orientation grading, while [`saddle_case_table_literal`]
//! constructs the planar pair-of-pants nesting pattern explicitly and reads
//! off boundary orientations (outer boundary counterclockwise, inner holes
//! clockwise). The two formulations are asserted equal by the verification
//! suite.

use std::fmt;

use crate::coeff::{Coeff, Lambda};
use crate::error::{Error, Result};
use crate::matrix::SparseMat;
use crate::planar::{canonical_identify, CircleClass, Orientation, WindingVector};

/// A basis label for one circle. Contractible circles take `Plus`/`Minus`,
/// non-contractible circles take an orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Plus,
    Minus,
    Or(Orientation),
}

impl Label {
    fn index(self) -> usize {
        match self {
            Label::Plus | Label::Or(Orientation::Ccw) => 0,
            Label::Minus | Label::Or(Orientation::Cw) => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Plus => write!(f, "+"),
            Label::Minus => write!(f, "-"),
            Label::Or(o) => write!(f, "{o}"),
        }
    }
}

/// The grading triple of a basis element: the internal quantum grading
/// (sum of ±1 over contractible labels), the orientation grading `w`
/// (+1 per ccw, -1 per cw label), and the H1 class `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingTuple {
    pub q_internal: i64,
    pub w: i64,
    pub g: WindingVector,
}

/// The free module attached to an ordered list of circles; its basis is all
/// labelings, enumerated lexicographically (circle 0 most significant, first
/// label before second).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    punctures: usize,
    circles: Vec<CircleClass>,
}

impl StateSpace {
    pub fn new(punctures: usize, circles: Vec<CircleClass>) -> Self {
        StateSpace { punctures, circles }
    }

    pub fn punctures(&self) -> usize {
        self.punctures
    }

    pub fn circles(&self) -> &[CircleClass] {
        &self.circles
    }

    pub fn dim(&self) -> usize {
        1usize << self.circles.len()
    }

    /// The label of circle `ci` in basis element `idx`.
    pub fn label(&self, idx: usize, ci: usize) -> Label {
        let m = self.circles.len();
        let bit = (idx >> (m - 1 - ci)) & 1;
        if self.circles[ci].is_contractible() {
            if bit == 0 {
                Label::Plus
            } else {
                Label::Minus
            }
        } else if bit == 0 {
            Label::Or(Orientation::Ccw)
        } else {
            Label::Or(Orientation::Cw)
        }
    }

    /// Basis index of a full labeling, given as one label per circle.
    pub fn index_of(&self, labels: &[Label]) -> usize {
        assert_eq!(labels.len(), self.circles.len());
        let m = self.circles.len();
        labels.iter().enumerate().map(|(ci, l)| l.index() << (m - 1 - ci)).sum()
    }

    pub fn grading(&self, idx: usize) -> GradingTuple {
        let mut q_internal = 0i64;
        let mut w = 0i64;
        let mut g = WindingVector::zero(self.punctures);
        for ci in 0..self.circles.len() {
            match self.label(idx, ci) {
                Label::Plus => q_internal += 1,
                Label::Minus => q_internal -= 1,
                Label::Or(o) => {
                    w += o.w_value();
                    g.add_assign(&self.circles[ci].oriented_class(self.punctures, o));
                }
            }
        }
        GradingTuple { q_internal, w, g }
    }
}

/// How a band surgery rearranges circles between a source and target
/// configuration: either two source circles merge into one target circle or
/// one source circle splits in two. `untouched` pairs source and target
/// indices of the circles the band does not meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleDescriptor {
    pub kind: SaddleKind,
    pub untouched: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaddleKind {
    Merge { src: [usize; 2], dst: usize },
    Split { src: usize, dst: [usize; 2] },
}

/// The matrix of a saddle map together with a flag recording whether the
/// touched circles fell into a `λ`-carrying case. In a `λ`-case every nonzero
/// entry of the matrix has a factor of `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleMap<C: Coeff> {
    pub mat: SparseMat<C>,
    pub lambda_case: bool,
}

/// Which formulation decides the orientations in the all-non-contractible
/// cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LambdaRule {
    /// Winding additivity plus a drop of one in the `w` grading.
    WindingSelection,
    /// Explicit pair-of-pants nesting with boundary orientations.
    NestingLiteral,
}

/// The saddle map for `desc`, with the unified winding-addition rule for the
/// all-non-contractible cases.
pub fn apply_saddle<C: Coeff>(
    src: &StateSpace,
    dst: &StateSpace,
    desc: &SaddleDescriptor,
    lambda: &Lambda<C>,
) -> Result<SaddleMap<C>> {
    build_saddle(src, dst, desc, lambda, LambdaRule::WindingSelection)
}

/// The saddle map with the all-non-contractible cases decided by explicitly
/// constructing the planar pair-of-pants configuration. The cases not
/// involving `λ` share code with [`apply_saddle`].
pub fn saddle_case_table_literal<C: Coeff>(
    src: &StateSpace,
    dst: &StateSpace,
    desc: &SaddleDescriptor,
    lambda: &Lambda<C>,
) -> Result<SaddleMap<C>> {
    build_saddle(src, dst, desc, lambda, LambdaRule::NestingLiteral)
}

/// One term of the touched-circle part of a saddle map: input labels on the
/// touched source circles, output labels on the touched target circles, and
/// whether the coefficient is `1` or `λ`.
struct CaseTerm {
    inputs: Vec<Label>,
    outputs: Vec<Label>,
    lambda_factor: bool,
}

struct CaseTable {
    terms: Vec<CaseTerm>,
    lambda_case: bool,
}

fn build_saddle<C: Coeff>(
    src: &StateSpace,
    dst: &StateSpace,
    desc: &SaddleDescriptor,
    lambda: &Lambda<C>,
    rule: LambdaRule,
) -> Result<SaddleMap<C>> {
    validate_descriptor(src, dst, desc)?;
    let n = src.punctures();

    let (touched_src, touched_dst): (Vec<usize>, Vec<usize>) = match desc.kind {
        SaddleKind::Merge { src: s, dst: d } => (s.to_vec(), vec![d]),
        SaddleKind::Split { src: s, dst: d } => (vec![s], d.to_vec()),
    };

    let table = match desc.kind {
        SaddleKind::Merge { src: [a, b], dst: d } => {
            merge_table(n, &src.circles()[a], &src.circles()[b], &dst.circles()[d], rule)?
        }
        SaddleKind::Split { src: s, dst: [a, b] } => {
            split_table(n, &src.circles()[s], &dst.circles()[a], &dst.circles()[b], rule)?
        }
    };

    let mut mat = SparseMat::zero(dst.dim(), src.dim());
    let coeff_one = C::one();
    let coeff_lambda = lambda.value().clone();

    for src_idx in 0..src.dim() {
        let in_labels: Vec<Label> = touched_src.iter().map(|&ci| src.label(src_idx, ci)).collect();
        for term in &table.terms {
            if !labels_eq(&in_labels, &term.inputs) {
                continue;
            }
            // Transfer untouched labels verbatim, place the term's outputs.
            let mut out_labels: Vec<Option<Label>> = vec![None; dst.circles().len()];
            for &(si, di) in &desc.untouched {
                out_labels[di] = Some(src.label(src_idx, si));
            }
            for (k, &di) in touched_dst.iter().enumerate() {
                out_labels[di] = Some(term.outputs[k]);
            }
            let out_labels: Vec<Label> = out_labels
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::internal("saddle descriptor leaves a target circle unlabeled"))?;
            let dst_idx = dst.index_of(&out_labels);
            let coeff = if term.lambda_factor { &coeff_lambda } else { &coeff_one };
            mat.add_to(dst_idx, src_idx, coeff);
        }
    }

    Ok(SaddleMap { mat, lambda_case: table.lambda_case })
}

fn labels_eq(a: &[Label], b: &[Label]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

fn validate_descriptor(src: &StateSpace, dst: &StateSpace, desc: &SaddleDescriptor) -> Result<()> {
    let mut src_seen = vec![false; src.circles().len()];
    let mut dst_seen = vec![false; dst.circles().len()];
    let mark = |seen: &mut Vec<bool>, i: usize, side: &str| -> Result<()> {
        if i >= seen.len() || seen[i] {
            return Err(Error::internal(format!(
                "saddle descriptor reuses or exceeds {side} circle {i}"
            )));
        }
        seen[i] = true;
        Ok(())
    };
    match desc.kind {
        SaddleKind::Merge { src: [a, b], dst: d } => {
            mark(&mut src_seen, a, "source")?;
            mark(&mut src_seen, b, "source")?;
            mark(&mut dst_seen, d, "target")?;
        }
        SaddleKind::Split { src: s, dst: [a, b] } => {
            mark(&mut src_seen, s, "source")?;
            mark(&mut dst_seen, a, "target")?;
            mark(&mut dst_seen, b, "target")?;
        }
    }
    for &(si, di) in &desc.untouched {
        mark(&mut src_seen, si, "source")?;
        mark(&mut dst_seen, di, "target")?;
        if src.circles()[si] != dst.circles()[di] {
            return Err(Error::internal(format!(
                "untouched circle bijection mismatch: {} vs {}",
                src.circles()[si],
                dst.circles()[di]
            )));
        }
    }
    if src_seen.iter().any(|&s| !s) || dst_seen.iter().any(|&s| !s) {
        return Err(Error::internal("saddle descriptor does not cover all circles"));
    }
    Ok(())
}

fn symmetric_difference(a: &CircleClass, b: &CircleClass) -> CircleClass {
    CircleClass::from_support(a.support().symmetric_difference(b.support()).copied())
}

const ORIENTATIONS: [Orientation; 2] = [Orientation::Ccw, Orientation::Cw];

/// Merging circles `a` and `b` into `c`.
fn merge_table(
    n: usize,
    a: &CircleClass,
    b: &CircleClass,
    c: &CircleClass,
    rule: LambdaRule,
) -> Result<CaseTable> {
    if symmetric_difference(a, b) != *c {
        return Err(Error::internal(format!(
            "merge of {a} and {b} cannot produce {c}"
        )));
    }
    let table = match (a.is_contractible(), b.is_contractible()) {
        // Both contractible: the Frobenius multiplication.
        (true, true) => CaseTable {
            terms: vec![
                term(&[Label::Plus, Label::Plus], &[Label::Plus], false),
                term(&[Label::Plus, Label::Minus], &[Label::Minus], false),
                term(&[Label::Minus, Label::Plus], &[Label::Minus], false),
            ],
            lambda_case: false,
        },
        // One contractible: v+ acts as the identity through the canonical
        // identification, v- kills.
        (true, false) => {
            let iota = canonical_identify(b, c)?;
            CaseTable {
                terms: ORIENTATIONS
                    .iter()
                    .map(|&o| {
                        term(
                            &[Label::Plus, Label::Or(o)],
                            &[Label::Or(iota.apply(o))],
                            false,
                        )
                    })
                    .collect(),
                lambda_case: false,
            }
        }
        (false, true) => {
            let iota = canonical_identify(a, c)?;
            CaseTable {
                terms: ORIENTATIONS
                    .iter()
                    .map(|&o| {
                        term(
                            &[Label::Or(o), Label::Plus],
                            &[Label::Or(iota.apply(o))],
                            false,
                        )
                    })
                    .collect(),
                lambda_case: false,
            }
        }
        (false, false) => {
            if c.is_contractible() {
                // Two parallel non-contractible circles close up; opposite
                // orientations map to v-, equal orientations die.
                canonical_identify(a, b)?;
                CaseTable {
                    terms: vec![
                        term(
                            &[Label::Or(Orientation::Ccw), Label::Or(Orientation::Cw)],
                            &[Label::Minus],
                            false,
                        ),
                        term(
                            &[Label::Or(Orientation::Cw), Label::Or(Orientation::Ccw)],
                            &[Label::Minus],
                            false,
                        ),
                    ],
                    lambda_case: false,
                }
            } else {
                let (oa, ob, oc) = match rule {
                    LambdaRule::WindingSelection => select_merge_orientations(n, a, b, c)?,
                    LambdaRule::NestingLiteral => {
                        pants_orientations(a, b).map(|(ba, bb, bc)| (ba.reverse(), bb.reverse(), bc))?
                    }
                };
                CaseTable {
                    terms: vec![term(
                        &[Label::Or(oa), Label::Or(ob)],
                        &[Label::Or(oc)],
                        true,
                    )],
                    lambda_case: true,
                }
            }
        }
    };
    Ok(table)
}

/// Splitting circle `c` into `a` and `b`.
fn split_table(
    n: usize,
    c: &CircleClass,
    a: &CircleClass,
    b: &CircleClass,
    rule: LambdaRule,
) -> Result<CaseTable> {
    if symmetric_difference(a, b) != *c {
        return Err(Error::internal(format!(
            "split of {c} cannot produce {a} and {b}"
        )));
    }
    let table = match (a.is_contractible(), b.is_contractible()) {
        // Both outputs contractible: the Frobenius comultiplication.
        (true, true) => CaseTable {
            terms: vec![
                term(&[Label::Plus], &[Label::Plus, Label::Minus], false),
                term(&[Label::Plus], &[Label::Minus, Label::Plus], false),
                term(&[Label::Minus], &[Label::Minus, Label::Minus], false),
            ],
            lambda_case: false,
        },
        // One output contractible: it is born with v-, the other keeps the
        // orientation through the canonical identification.
        (true, false) => {
            let iota = canonical_identify(c, b)?;
            CaseTable {
                terms: ORIENTATIONS
                    .iter()
                    .map(|&o| {
                        term(
                            &[Label::Or(o)],
                            &[Label::Minus, Label::Or(iota.apply(o))],
                            false,
                        )
                    })
                    .collect(),
                lambda_case: false,
            }
        }
        (false, true) => {
            let iota = canonical_identify(c, a)?;
            CaseTable {
                terms: ORIENTATIONS
                    .iter()
                    .map(|&o| {
                        term(
                            &[Label::Or(o)],
                            &[Label::Or(iota.apply(o)), Label::Minus],
                            false,
                        )
                    })
                    .collect(),
                lambda_case: false,
            }
        }
        (false, false) => {
            if c.is_contractible() {
                // A contractible circle splits into two parallel
                // non-contractible circles.
                canonical_identify(a, b)?;
                CaseTable {
                    terms: vec![
                        term(
                            &[Label::Plus],
                            &[Label::Or(Orientation::Ccw), Label::Or(Orientation::Cw)],
                            false,
                        ),
                        term(
                            &[Label::Plus],
                            &[Label::Or(Orientation::Cw), Label::Or(Orientation::Ccw)],
                            false,
                        ),
                    ],
                    lambda_case: false,
                }
            } else {
                let (oc, oa, ob) = match rule {
                    LambdaRule::WindingSelection => select_split_orientations(n, c, a, b)?,
                    LambdaRule::NestingLiteral => {
                        pants_orientations(a, b).map(|(ba, bb, bc)| (bc.reverse(), ba, bb))?
                    }
                };
                CaseTable {
                    terms: vec![term(
                        &[Label::Or(oc)],
                        &[Label::Or(oa), Label::Or(ob)],
                        true,
                    )],
                    lambda_case: true,
                }
            }
        }
    };
    Ok(table)
}

fn term(inputs: &[Label], outputs: &[Label], lambda_factor: bool) -> CaseTerm {
    CaseTerm { inputs: inputs.to_vec(), outputs: outputs.to_vec(), lambda_factor }
}

/// The unique orientation triple for a merge of non-contractible circles:
/// winding vectors must add and the `w` grading must drop by one.
fn select_merge_orientations(
    n: usize,
    a: &CircleClass,
    b: &CircleClass,
    c: &CircleClass,
) -> Result<(Orientation, Orientation, Orientation)> {
    let mut found = None;
    for oa in ORIENTATIONS {
        for ob in ORIENTATIONS {
            for oc in ORIENTATIONS {
                let sum = a.oriented_class(n, oa).add(&b.oriented_class(n, ob));
                if sum == c.oriented_class(n, oc)
                    && oc.w_value() == oa.w_value() + ob.w_value() - 1
                {
                    if found.is_some() {
                        return Err(Error::internal(format!(
                            "merge of {a}, {b} into {c}: orientation selection not unique"
                        )));
                    }
                    found = Some((oa, ob, oc));
                }
            }
        }
    }
    found.ok_or_else(|| {
        Error::internal(format!(
            "merge of {a}, {b} into {c}: no admissible orientation assignment"
        ))
    })
}

/// The unique orientation triple for a split into non-contractible circles:
/// winding vectors must add and the `w` grading must drop by one.
fn select_split_orientations(
    n: usize,
    c: &CircleClass,
    a: &CircleClass,
    b: &CircleClass,
) -> Result<(Orientation, Orientation, Orientation)> {
    let mut found = None;
    for oc in ORIENTATIONS {
        for oa in ORIENTATIONS {
            for ob in ORIENTATIONS {
                let sum = a.oriented_class(n, oa).add(&b.oriented_class(n, ob));
                if sum == c.oriented_class(n, oc)
                    && oa.w_value() + ob.w_value() == oc.w_value() - 1
                {
                    if found.is_some() {
                        return Err(Error::internal(format!(
                            "split of {c} into {a}, {b}: orientation selection not unique"
                        )));
                    }
                    found = Some((oc, oa, ob));
                }
            }
        }
    }
    found.ok_or_else(|| {
        Error::internal(format!(
            "split of {c} into {a}, {b}: no admissible orientation assignment"
        ))
    })
}

/// Boundary orientations of the pair of pants spanned by three disjoint
/// non-contractible circles with classes `a`, `b`, `a Δ b`, read off the
/// planar nesting pattern: the outermost of the three bounds the pants from
/// outside and gets the counterclockwise boundary orientation, the other two
/// are holes and get clockwise. Returns `(for a, for b, for a Δ b)`.
fn pants_orientations(
    a: &CircleClass,
    b: &CircleClass,
) -> Result<(Orientation, Orientation, Orientation)> {
    let sa = a.support();
    let sb = b.support();
    if sa.is_disjoint(sb) {
        // Side-by-side circles; the merged class surrounds both.
        Ok((Orientation::Cw, Orientation::Cw, Orientation::Ccw))
    } else if sa.is_subset(sb) {
        // `a` nests inside `b`.
        Ok((Orientation::Cw, Orientation::Ccw, Orientation::Cw))
    } else if sb.is_subset(sa) {
        Ok((Orientation::Ccw, Orientation::Cw, Orientation::Cw))
    } else {
        Err(Error::internal(format!(
            "supports {a} and {b} are neither nested nor disjoint; \
             impossible for disjoint embedded circles on a planar surface"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn cls(support: &[usize]) -> CircleClass {
        CircleClass::from_support(support.iter().copied())
    }

    fn lam(n: i64) -> Lambda<BigInt> {
        Lambda::from_int(n)
    }

    #[test]
    fn state_space_of_one_contractible_circle() {
        let sp = StateSpace::new(0, vec![cls(&[])]);
        assert_eq!(sp.dim(), 2);
        assert_eq!(sp.grading(0).q_internal, 1);
        assert_eq!(sp.grading(1).q_internal, -1);
        assert_eq!(sp.grading(0).w, 0);
    }

    #[test]
    fn state_space_of_annular_circle() {
        let sp = StateSpace::new(1, vec![cls(&[0])]);
        assert_eq!(sp.dim(), 2);
        let up = sp.grading(0);
        assert_eq!(up.q_internal, 0);
        assert_eq!(up.w, 1);
        assert_eq!(up.g, WindingVector::new(vec![1]));
        let down = sp.grading(1);
        assert_eq!(down.g, WindingVector::new(vec![-1]));
    }

    #[test]
    fn empty_state_space_is_rank_one() {
        let sp = StateSpace::new(2, vec![]);
        assert_eq!(sp.dim(), 1);
        let g = sp.grading(0);
        assert_eq!((g.q_internal, g.w), (0, 0));
        assert!(g.g.is_zero());
    }

    fn merge_desc() -> SaddleDescriptor {
        SaddleDescriptor { kind: SaddleKind::Merge { src: [0, 1], dst: 0 }, untouched: vec![] }
    }

    fn split_desc() -> SaddleDescriptor {
        SaddleDescriptor { kind: SaddleKind::Split { src: 0, dst: [0, 1] }, untouched: vec![] }
    }

    #[test]
    fn contractible_merge_is_frobenius_multiplication() {
        let src = StateSpace::new(0, vec![cls(&[]), cls(&[])]);
        let dst = StateSpace::new(0, vec![cls(&[])]);
        let m = apply_saddle(&src, &dst, &merge_desc(), &lam(1)).unwrap();
        assert!(!m.lambda_case);
        // ++ -> +, +- -> -, -+ -> -, -- -> 0.
        assert_eq!(m.mat.get(0, 0), BigInt::from(1));
        assert_eq!(m.mat.get(1, 1), BigInt::from(1));
        assert_eq!(m.mat.get(1, 2), BigInt::from(1));
        assert_eq!(m.mat.nnz(), 3);
    }

    #[test]
    fn unnested_merge_of_essential_circles() {
        // Circles around punctures {0} and {1} merge into one around {0,1}.
        let src = StateSpace::new(2, vec![cls(&[0]), cls(&[1])]);
        let dst = StateSpace::new(2, vec![cls(&[0, 1])]);
        let m = apply_saddle(&src, &dst, &merge_desc(), &lam(5)).unwrap();
        assert!(m.lambda_case);
        // ccw⊗ccw -> λ·ccw, everything else dies.
        assert_eq!(m.mat.get(0, 0), BigInt::from(5));
        assert_eq!(m.mat.nnz(), 1);

        let lit = saddle_case_table_literal(&src, &dst, &merge_desc(), &lam(5)).unwrap();
        assert_eq!(lit.mat, m.mat);
    }

    #[test]
    fn nested_split_of_essential_circles() {
        // A circle around {1} splits into one around {0} and one around {0,1}.
        let src = StateSpace::new(2, vec![cls(&[1])]);
        let dst = StateSpace::new(2, vec![cls(&[0]), cls(&[0, 1])]);
        let m = apply_saddle(&src, &dst, &split_desc(), &lam(7)).unwrap();
        assert!(m.lambda_case);
        // ccw -> λ·(cw ⊗ ccw): circle {0} clockwise, circle {0,1} ccw.
        let out = dst.index_of(&[Label::Or(Orientation::Cw), Label::Or(Orientation::Ccw)]);
        assert_eq!(m.mat.get(out, 0), BigInt::from(7));
        assert_eq!(m.mat.nnz(), 1);

        let lit = saddle_case_table_literal(&src, &dst, &split_desc(), &lam(7)).unwrap();
        assert_eq!(lit.mat, m.mat);
    }

    #[test]
    fn lambda_zero_kills_essential_interactions() {
        let src = StateSpace::new(2, vec![cls(&[0]), cls(&[1])]);
        let dst = StateSpace::new(2, vec![cls(&[0, 1])]);
        let m = apply_saddle(&src, &dst, &merge_desc(), &lam(0)).unwrap();
        assert!(m.mat.is_zero());
    }

    #[test]
    fn parallel_merge_and_contractible_split() {
        // Two isotopic essential circles merge into a contractible one.
        let src = StateSpace::new(1, vec![cls(&[0]), cls(&[0])]);
        let dst = StateSpace::new(1, vec![cls(&[])]);
        let m = apply_saddle(&src, &dst, &merge_desc(), &lam(1)).unwrap();
        assert!(!m.lambda_case);
        let ccw_cw = src.index_of(&[Label::Or(Orientation::Ccw), Label::Or(Orientation::Cw)]);
        let cw_ccw = src.index_of(&[Label::Or(Orientation::Cw), Label::Or(Orientation::Ccw)]);
        assert_eq!(m.mat.get(1, ccw_cw), BigInt::from(1));
        assert_eq!(m.mat.get(1, cw_ccw), BigInt::from(1));
        assert_eq!(m.mat.nnz(), 2);

        // And the reverse: a contractible circle splits into two parallels.
        let src2 = dst;
        let dst2 = StateSpace::new(1, vec![cls(&[0]), cls(&[0])]);
        let s = apply_saddle(&src2, &dst2, &split_desc(), &lam(1)).unwrap();
        assert!(!s.lambda_case);
        assert_eq!(s.mat.nnz(), 2);
        // v- dies.
        for (_, c, _) in s.mat.iter() {
            assert_eq!(c, 0);
        }
    }

    #[test]
    fn one_sided_merge_keeps_orientation() {
        let src = StateSpace::new(1, vec![cls(&[]), cls(&[0])]);
        let dst = StateSpace::new(1, vec![cls(&[0])]);
        let m = apply_saddle(&src, &dst, &merge_desc(), &lam(3)).unwrap();
        assert!(!m.lambda_case);
        let plus_ccw = src.index_of(&[Label::Plus, Label::Or(Orientation::Ccw)]);
        let plus_cw = src.index_of(&[Label::Plus, Label::Or(Orientation::Cw)]);
        assert_eq!(m.mat.get(0, plus_ccw), BigInt::from(1));
        assert_eq!(m.mat.get(1, plus_cw), BigInt::from(1));
        assert_eq!(m.mat.nnz(), 2);
    }

    #[test]
    fn untouched_circles_pass_through() {
        let src = StateSpace::new(2, vec![cls(&[]), cls(&[]), cls(&[0])]);
        let dst = StateSpace::new(2, vec![cls(&[]), cls(&[0])]);
        let desc = SaddleDescriptor {
            kind: SaddleKind::Merge { src: [0, 1], dst: 0 },
            untouched: vec![(2, 1)],
        };
        let m = apply_saddle(&src, &dst, &desc, &lam(1)).unwrap();
        // (+ ⊗ + ⊗ x) -> (+ ⊗ x) for both orientations x.
        for o in ORIENTATIONS {
            let i = src.index_of(&[Label::Plus, Label::Plus, Label::Or(o)]);
            let j = dst.index_of(&[Label::Plus, Label::Or(o)]);
            assert_eq!(m.mat.get(j, i), BigInt::from(1));
        }
    }

    /// Exhaustive equality of the two saddle formulations on every class
    /// combination realizable with at most 4 punctures.
    #[test]
    fn formulations_agree_on_small_configurations() {
        let n = 4;
        let supports: Vec<Vec<usize>> = (1u32..16)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        let mut checked = 0;
        for sa in &supports {
            for sb in &supports {
                let a = cls(sa);
                let b = cls(sb);
                let disjoint = a.support().is_disjoint(b.support());
                let nested = a.support().is_subset(b.support()) || b.support().is_subset(a.support());
                if !disjoint && !nested {
                    continue;
                }
                let c = symmetric_difference(&a, &b);
                if c.is_contractible() {
                    continue;
                }
                for l in [0, 1, 2, -1] {
                    let src = StateSpace::new(n, vec![a.clone(), b.clone()]);
                    let dst = StateSpace::new(n, vec![c.clone()]);
                    let m1 = apply_saddle(&src, &dst, &merge_desc(), &lam(l)).unwrap();
                    let m2 = saddle_case_table_literal(&src, &dst, &merge_desc(), &lam(l)).unwrap();
                    assert_eq!(m1.mat, m2.mat, "merge {a} + {b} -> {c} at λ={l}");

                    let src2 = StateSpace::new(n, vec![c.clone()]);
                    let dst2 = StateSpace::new(n, vec![a.clone(), b.clone()]);
                    let s1 = apply_saddle(&src2, &dst2, &split_desc(), &lam(l)).unwrap();
                    let s2 = saddle_case_table_literal(&src2, &dst2, &split_desc(), &lam(l)).unwrap();
                    assert_eq!(s1.mat, s2.mat, "split {c} -> {a} + {b} at λ={l}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 50);
    }

    /// λ-affinity: T_λ = T_0 + λ·(T_1 − T_0) as matrices.
    #[test]
    fn saddle_maps_are_affine_in_lambda() {
        let src = StateSpace::new(2, vec![cls(&[0]), cls(&[0, 1])]);
        let dst = StateSpace::new(2, vec![cls(&[1])]);
        for l in [0i64, 1, 2, -1, 5] {
            let t = apply_saddle(&src, &dst, &merge_desc(), &lam(l)).unwrap().mat;
            let t0 = apply_saddle(&src, &dst, &merge_desc(), &lam(0)).unwrap().mat;
            let t1 = apply_saddle(&src, &dst, &merge_desc(), &lam(1)).unwrap().mat;
            let affine = t0.add(&t1.sub(&t0).scale(&BigInt::from(l)));
            assert_eq!(t, affine);
        }
    }

    /// Grading behavior of every nonzero entry: Δg = 0 and Δ(q_internal + w)
    /// = -1, split as Δq_internal = -1 on λ-free entries and Δw = -1 on
    /// λ-entries.
    #[test]
    fn entries_are_grading_homogeneous() {
        let n = 2;
        let cases: Vec<(StateSpace, StateSpace, SaddleDescriptor)> = vec![
            (
                StateSpace::new(n, vec![cls(&[]), cls(&[])]),
                StateSpace::new(n, vec![cls(&[])]),
                merge_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[]), cls(&[0])]),
                StateSpace::new(n, vec![cls(&[0])]),
                merge_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[0]), cls(&[0])]),
                StateSpace::new(n, vec![cls(&[])]),
                merge_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[0]), cls(&[1])]),
                StateSpace::new(n, vec![cls(&[0, 1])]),
                merge_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[])]),
                StateSpace::new(n, vec![cls(&[]), cls(&[])]),
                split_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[0])]),
                StateSpace::new(n, vec![cls(&[]), cls(&[0])]),
                split_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[])]),
                StateSpace::new(n, vec![cls(&[0]), cls(&[0])]),
                split_desc(),
            ),
            (
                StateSpace::new(n, vec![cls(&[1])]),
                StateSpace::new(n, vec![cls(&[0]), cls(&[0, 1])]),
                split_desc(),
            ),
        ];
        for (src, dst, desc) in cases {
            let m = apply_saddle(&src, &dst, &desc, &lam(1)).unwrap();
            for (r, c, _) in m.mat.iter() {
                let gs = src.grading(c);
                let gd = dst.grading(r);
                assert_eq!(gd.g, gs.g, "Δg must vanish");
                assert_eq!(
                    gd.q_internal + gd.w,
                    gs.q_internal + gs.w - 1,
                    "Δ(q_internal + w) must be -1"
                );
                if m.lambda_case {
                    assert_eq!(gd.q_internal, gs.q_internal);
                    assert_eq!(gd.w, gs.w - 1);
                } else {
                    assert_eq!(gd.q_internal, gs.q_internal - 1);
                    assert_eq!(gd.w, gs.w);
                }
            }
        }
    }
}
