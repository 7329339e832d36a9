//! The cube of resolutions: one state space per resolution, one signed
//! saddle map per cube edge, and the splitting of the total complex into
//! grading blocks.
//!
//! Gradings of a generator living at vertex `v` with internal gradings
//! `(q_internal, w, g)`:
//!
//! * homological `h = |v| - n_minus`
//! * quantum `q = q_internal + |v| + n_plus - 2 n_minus`
//! * refined quantum `qt = q + w`
//!
//! The differential raises `h` by one, preserves `g` and `qt`, and raises
//! `q` by one exactly on the entries coming from `λ`-cases (so `q` is a
//! grading only when no such entry occurs, e.g. at `λ = 0`; otherwise it is
//! a filtration).

use std::collections::BTreeMap;

use crate::coeff::{Coeff, Lambda};
use crate::diagram::{CrossingSigns, Diagram};
use crate::error::{Error, Result};
use crate::matrix::SparseMat;
use crate::planar::WindingVector;
use crate::tqft::{apply_saddle, SaddleMap, StateSpace};

/// One cube edge: the saddle at `crossing` applied at resolution `from`
/// (whose bit is 0 there), with the checkerboard sign.
#[derive(Debug, Clone)]
pub struct CubeEdge<C: Coeff> {
    pub from: u64,
    pub crossing: usize,
    pub negative: bool,
    pub map: SaddleMap<C>,
}

#[derive(Debug, Clone)]
pub struct CubeComplex<C: Coeff> {
    punctures: usize,
    k: usize,
    signs: CrossingSigns,
    states: Vec<StateSpace>,
    edges: Vec<CubeEdge<C>>,
}

/// How far to refine the grading decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Split by the H1 class `g` only.
    Hg,
    /// Split by `g` and the refined quantum grading `qt`.
    HgQt,
    /// Split by `g` and the quantum grading `q`; fails when `q` is not a
    /// grading (some `λ`-case entry occurs).
    HgQ,
}

/// Key of one grading block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockKey {
    pub g: WindingVector,
    pub qt: Option<i64>,
    pub q: Option<i64>,
}

impl std::fmt::Display for BlockKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g={}", self.g)?;
        if let Some(qt) = self.qt {
            write!(f, " qt={qt}")?;
        }
        if let Some(q) = self.q {
            write!(f, " q={q}")?;
        }
        Ok(())
    }
}

/// One block of the chain complex: dimensions and differentials per
/// homological degree, plus the chain-level quantum filtration values of the
/// generators (ascending per degree).
#[derive(Debug, Clone)]
pub struct ChainBlock<C: Coeff> {
    pub dims: BTreeMap<i64, usize>,
    pub diffs: BTreeMap<i64, SparseMat<C>>,
    pub q_values: BTreeMap<i64, Vec<i64>>,
}

impl<C: Coeff> ChainBlock<C> {
    pub fn dim(&self, h: i64) -> usize {
        self.dims.get(&h).copied().unwrap_or(0)
    }

    /// The differential out of degree `h` (zero when absent).
    pub fn diff(&self, h: i64) -> SparseMat<C> {
        self.diffs
            .get(&h)
            .cloned()
            .unwrap_or_else(|| SparseMat::zero(self.dim(h + 1), self.dim(h)))
    }
}

#[derive(Debug, Clone)]
pub struct GradedChainComplex<C: Coeff> {
    pub refinement: Refinement,
    pub blocks: BTreeMap<BlockKey, ChainBlock<C>>,
}

impl<C: Coeff> CubeComplex<C> {
    pub fn punctures(&self) -> usize {
        self.punctures
    }

    pub fn crossing_count(&self) -> usize {
        self.k
    }

    pub fn signs(&self) -> CrossingSigns {
        self.signs
    }

    pub fn states(&self) -> &[StateSpace] {
        &self.states
    }

    pub fn edges(&self) -> &[CubeEdge<C>] {
        &self.edges
    }

    pub fn homological_degree(&self, v: u64) -> i64 {
        v.count_ones() as i64 - self.signs.n_minus as i64
    }

    fn quantum_shift(&self, v: u64) -> i64 {
        v.count_ones() as i64 + self.signs.n_plus as i64 - 2 * self.signs.n_minus as i64
    }

    /// Shifted gradings `(h, q, qt, g)` of basis element `idx` at vertex `v`.
    pub fn gradings(&self, v: u64, idx: usize) -> (i64, i64, i64, WindingVector) {
        let t = self.states[v as usize].grading(idx);
        let h = self.homological_degree(v);
        let q = t.q_internal + self.quantum_shift(v);
        (h, q, q + t.w, t.g)
    }

    /// Whether any `λ`-case edge map has a nonzero entry (then `q` is only a
    /// filtration, not a grading).
    pub fn has_lambda_entries(&self) -> bool {
        self.edges.iter().any(|e| e.map.lambda_case && !e.map.mat.is_zero())
    }

    /// Total dimension over all vertices.
    pub fn total_dim(&self) -> usize {
        self.states.iter().map(|s| s.dim()).sum()
    }

    /// The full differential as one matrix over the direct sum of all
    /// vertices (vertex-major, basis-minor ordering).
    pub fn total_differential(&self) -> SparseMat<C> {
        let mut offset = vec![0usize; self.states.len() + 1];
        for (v, s) in self.states.iter().enumerate() {
            offset[v + 1] = offset[v] + s.dim();
        }
        let dim = offset[self.states.len()];
        let mut d = SparseMat::zero(dim, dim);
        for e in &self.edges {
            let to = e.from | 1 << e.crossing;
            for (r, c, val) in e.map.mat.iter() {
                let signed = if e.negative { val.neg() } else { val.clone() };
                d.add_to(offset[to as usize] + r, offset[e.from as usize] + c, &signed);
            }
        }
        d
    }

    /// Check every differential entry for grading homogeneity: `Δh = +1`,
    /// `Δg = 0`, `Δqt = 0`, and `Δq` equal to +1 on `λ`-case entries and 0
    /// otherwise.
    pub fn check_entry_gradings(&self) -> Result<()> {
        for e in &self.edges {
            let to = e.from | 1 << e.crossing;
            for (r, c, _) in e.map.mat.iter() {
                let (h1, q1, qt1, g1) = self.gradings(e.from, c);
                let (h2, q2, qt2, g2) = self.gradings(to, r);
                let expected_dq = if e.map.lambda_case { 1 } else { 0 };
                if h2 != h1 + 1 || g2 != g1 || qt2 != qt1 || q2 != q1 + expected_dq {
                    return Err(Error::internal(format!(
                        "differential entry at crossing {} from {:#b} violates grading \
                         homogeneity: Δh={} Δq={} Δqt={} Δg: {} -> {}",
                        e.crossing,
                        e.from,
                        h2 - h1,
                        q2 - q1,
                        qt2 - qt1,
                        g1,
                        g2
                    )));
                }
            }
        }
        Ok(())
    }

    /// Split the cube into grading blocks.
    pub fn graded_blocks(&self, refinement: Refinement) -> Result<GradedChainComplex<C>> {
        if refinement == Refinement::HgQ && self.has_lambda_entries() {
            return Err(Error::invalid(
                "gradings",
                "the quantum grading is not preserved by this differential (λ-case entries \
                 occur); use the refined grading or λ = 0",
            ));
        }

        let key_of = |v: u64, idx: usize| -> BlockKey {
            let (_, q, qt, g) = self.gradings(v, idx);
            match refinement {
                Refinement::Hg => BlockKey { g, qt: None, q: None },
                Refinement::HgQt => BlockKey { g, qt: Some(qt), q: None },
                Refinement::HgQ => BlockKey { g, qt: None, q: Some(q) },
            }
        };

        // Enumerate generators per (block, degree) in vertex-major order.
        let mut index: BTreeMap<(BlockKey, i64), Vec<(u64, usize)>> = BTreeMap::new();
        for (v, s) in self.states.iter().enumerate() {
            let v = v as u64;
            let h = self.homological_degree(v);
            for idx in 0..s.dim() {
                index.entry((key_of(v, idx), h)).or_default().push((v, idx));
            }
        }
        let mut local: BTreeMap<(u64, usize), usize> = BTreeMap::new();
        for gens in index.values() {
            for (i, &gen) in gens.iter().enumerate() {
                local.insert(gen, i);
            }
        }

        let mut blocks: BTreeMap<BlockKey, ChainBlock<C>> = BTreeMap::new();
        for ((key, h), gens) in &index {
            let block = blocks.entry(key.clone()).or_insert_with(|| ChainBlock {
                dims: BTreeMap::new(),
                diffs: BTreeMap::new(),
                q_values: BTreeMap::new(),
            });
            block.dims.insert(*h, gens.len());
            let mut qs: Vec<i64> = gens.iter().map(|&(v, idx)| self.gradings(v, idx).1).collect();
            qs.sort_unstable();
            block.q_values.insert(*h, qs);
        }

        // Route differential entries into their blocks.
        for e in &self.edges {
            let to = e.from | 1 << e.crossing;
            let h = self.homological_degree(e.from);
            for (r, c, val) in e.map.mat.iter() {
                let key_src = key_of(e.from, c);
                let key_dst = key_of(to, r);
                if key_src != key_dst {
                    return Err(Error::internal(format!(
                        "grading homogeneity failure: entry maps block {key_src} to {key_dst}"
                    )));
                }
                let block = blocks.get_mut(&key_src).expect("block exists");
                let rows = block.dim(h + 1);
                let cols = block.dim(h);
                let mat = block
                    .diffs
                    .entry(h)
                    .or_insert_with(|| SparseMat::zero(rows, cols));
                let signed = if e.negative { val.neg() } else { val.clone() };
                mat.add_to(local[&(to, r)], local[&(e.from, c)], &signed);
            }
        }

        Ok(GradedChainComplex { refinement, blocks })
    }

    /// Graded Euler characteristic at chain level: per `g` block, the signed
    /// count of generators at each quantum level. Independent of `λ`.
    pub fn euler_by_g(&self) -> BTreeMap<WindingVector, BTreeMap<i64, i64>> {
        let mut out: BTreeMap<WindingVector, BTreeMap<i64, i64>> = BTreeMap::new();
        for (v, s) in self.states.iter().enumerate() {
            let v = v as u64;
            let h = self.homological_degree(v);
            let sign = if h.rem_euclid(2) == 0 { 1 } else { -1 };
            for idx in 0..s.dim() {
                let (_, q, _, g) = self.gradings(v, idx);
                *out.entry(g).or_default().entry(q).or_default() += sign;
            }
        }
        out.retain(|_, by_q| {
            by_q.retain(|_, coeff| *coeff != 0);
            !by_q.is_empty()
        });
        out
    }
}

/// Build the cube of a diagram: resolve all vertices, build every saddle map,
/// and attach the checkerboard sign (parity of the 1-bits of `v` after the
/// flipped coordinate).
pub fn build_cube<C: Coeff>(d: &Diagram, lambda: &Lambda<C>) -> Result<CubeComplex<C>> {
    let k = d.crossing_count();
    let n = d.punctures();
    let mut resolved = Vec::with_capacity(1 << k);
    for v in 0..(1u64 << k) {
        resolved.push(d.resolve(v)?);
    }
    let states: Vec<StateSpace> =
        resolved.iter().map(|s| StateSpace::new(n, s.classes())).collect();

    let mut edges = Vec::new();
    for v in 0..(1u64 << k) {
        for i in 0..k {
            if v >> i & 1 == 1 {
                continue;
            }
            let to = v | 1 << i;
            let desc = d.saddle_descriptor_between(&resolved[v as usize], &resolved[to as usize], i)?;
            let map = apply_saddle(
                &states[v as usize],
                &states[to as usize],
                &desc,
                lambda,
            )?;
            let higher_ones = (v >> (i + 1)).count_ones();
            edges.push(CubeEdge { from: v, crossing: i, negative: higher_ones % 2 == 1, map });
        }
    }

    Ok(CubeComplex { punctures: n, k, signs: d.crossing_signs(), states, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::F2;
    use crate::morse::{MorseWord, Side};
    use num_bigint::BigInt;

    fn kink_plus() -> Diagram {
        MorseWord::new(4).cup(1, 2).cross(1, 2, Side::Right).cap(1, 2).compile().unwrap()
    }

    #[test]
    fn crossing_free_circle_is_a_single_space() {
        let d = MorseWord::new(3).cup(0, 1).cap(0, 1).compile().unwrap();
        let cube = build_cube::<BigInt>(&d, &Lambda::one()).unwrap();
        assert_eq!(cube.total_dim(), 2);
        assert!(cube.edges().is_empty());
        assert!(cube.total_differential().is_zero());
    }

    #[test]
    fn positive_kink_cube() {
        let d = kink_plus();
        let cube = build_cube::<BigInt>(&d, &Lambda::one()).unwrap();
        assert_eq!(cube.signs().n_plus, 1);
        assert_eq!(cube.edges().len(), 1);
        // Two circles merge into one; shifts [0]{1}.
        assert_eq!(cube.states()[0].dim(), 4);
        assert_eq!(cube.states()[1].dim(), 2);
        assert_eq!(cube.homological_degree(0), 0);
        // d² = 0 and gradings are homogeneous.
        assert!(cube.total_differential().mul(&cube.total_differential()).is_zero());
        cube.check_entry_gradings().unwrap();
    }

    #[test]
    fn d_squared_vanishes_on_the_trefoil() {
        let d = crate::morse::MorseWord::new(4)
            .cup(0, 1)
            .cup(2, 3)
            .cross(1, 2, Side::Left)
            .cross(1, 2, Side::Left)
            .cross(1, 2, Side::Left)
            .cap(0, 1)
            .cap(2, 3)
            .compile()
            .unwrap();
        for lam in [0i64, 1, 2, -1] {
            let cube = build_cube::<BigInt>(&d, &Lambda::from_int(lam)).unwrap();
            let dd = cube.total_differential();
            assert!(dd.mul(&dd).is_zero(), "λ={lam}");
            cube.check_entry_gradings().unwrap();
        }
        let cube = build_cube::<F2>(&d, &Lambda::one()).unwrap();
        let dd = cube.total_differential();
        assert!(dd.mul(&dd).is_zero());
    }

    #[test]
    fn annular_unknot_splits_into_two_rank_one_blocks() {
        let d = MorseWord::new(5).puncture(2, 1).cup(1, 3).cap(1, 3).compile().unwrap();
        let cube = build_cube::<BigInt>(&d, &Lambda::one()).unwrap();
        let blocks = cube.graded_blocks(Refinement::Hg).unwrap();
        assert_eq!(blocks.blocks.len(), 2);
        for (key, block) in &blocks.blocks {
            assert_eq!(block.dim(0), 1, "{key}");
        }
        let gs: Vec<String> = blocks.blocks.keys().map(|k| k.g.to_string()).collect();
        assert_eq!(gs, vec!["(-1)", "(1)"]);
    }

    #[test]
    fn disk_diagrams_have_qt_equal_q() {
        let d = kink_plus();
        let cube = build_cube::<BigInt>(&d, &Lambda::one()).unwrap();
        for v in 0..2u64 {
            for idx in 0..cube.states()[v as usize].dim() {
                let (_, q, qt, g) = cube.gradings(v, idx);
                assert_eq!(q, qt);
                assert!(g.is_zero());
            }
        }
        // n = 0 has no λ-entries, so the q-refined splitting works.
        cube.graded_blocks(Refinement::HgQ).unwrap();
    }

    #[test]
    fn euler_characteristic_of_the_annular_unknot() {
        let d = MorseWord::new(5).puncture(2, 1).cup(1, 3).cap(1, 3).compile().unwrap();
        let cube = build_cube::<BigInt>(&d, &Lambda::one()).unwrap();
        let chi = cube.euler_by_g();
        assert_eq!(chi.len(), 2);
        for by_q in chi.values() {
            assert_eq!(by_q.values().sum::<i64>(), 1);
        }
    }
}
