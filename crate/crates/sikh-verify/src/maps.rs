//! Exhaustive enumeration of planar two-band configurations.
//!
//! A configuration of disjoint circles with two disjoint bands attached is
//! the same data as a 4-valent combinatorial map with two vertices: each
//! vertex is a band site, its two pairings of opposite arcs are the
//! configuration before and after surgery. Enumerating all dart matchings,
//! keeping the genus-zero ones, choosing an outer face and a puncture
//! assignment therefore enumerates every such configuration on a punctured
//! disk, including the nesting pattern of the circles.
//!
//! For each embedded configuration the four saddle maps of the square
//! `(0,0) -> (1,1)` are produced as state spaces plus descriptors, ready for
//! the commutativity and case-table checks.

use std::collections::{BTreeMap, BTreeSet};

use sikh_core::planar::CircleClass;
use sikh_core::tqft::{SaddleDescriptor, SaddleKind, StateSpace};

/// A dart is (vertex, port), numbered 4*vertex + port.
type Dart = usize;

fn vertex(d: Dart) -> usize {
    d / 4
}

fn rotate(d: Dart) -> Dart {
    4 * vertex(d) + (d % 4 + 1) % 4
}

/// All perfect matchings of the eight darts of a two-vertex map.
fn matchings() -> Vec<Vec<Dart>> {
    let mut out = Vec::new();
    let mut alpha = vec![usize::MAX; 8];
    fn rec(alpha: &mut Vec<usize>, out: &mut Vec<Vec<Dart>>) {
        let Some(first) = alpha.iter().position(|&x| x == usize::MAX) else {
            out.push(alpha.clone());
            return;
        };
        for second in first + 1..8 {
            if alpha[second] == usize::MAX {
                alpha[first] = second;
                alpha[second] = first;
                rec(alpha, out);
                alpha[first] = usize::MAX;
                alpha[second] = usize::MAX;
            }
        }
    }
    rec(&mut alpha, &mut out);
    out
}

/// One component of the map with its faces.
#[derive(Debug, Clone)]
struct MapComponent {
    verts: Vec<usize>,
    edge_count: usize,
    /// face id (global) per corner dart: the face containing corner
    /// (v, j) is the orbit of dart (v, j+1).
    faces: Vec<usize>,
}

/// The arrangement of the (possibly disconnected) map in the disk.
#[derive(Debug, Clone)]
struct Embedding {
    /// global face identifications induced by nesting (pairs of face ids)
    identify: Vec<(usize, usize)>,
    outer: usize,
}

/// A fully embedded two-band configuration.
#[derive(Debug, Clone)]
pub struct Configuration {
    alpha: Vec<Dart>,
    face_of_corner: Vec<usize>, // by dart id of the corner's CCW-next dart owner: see below
    n_faces: usize,
    identify: Vec<(usize, usize)>,
    outer: usize,
    /// puncture index -> face id
    punctures: Vec<usize>,
}

/// One resolved side of the configuration along with the data needed to
/// build saddle maps.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    /// per circle: the class and the set of darts it traverses
    pub circles: Vec<(CircleClass, BTreeSet<Dart>)>,
}

impl ResolvedConfig {
    pub fn classes(&self) -> Vec<CircleClass> {
        self.circles.iter().map(|(c, _)| c.clone()).collect()
    }
}

/// The square of a two-band configuration: state spaces at the four corners
/// and the four saddle descriptors.
#[derive(Debug, Clone)]
pub struct Square {
    pub punctures: usize,
    pub corners: [ResolvedConfig; 4], // indexed by smoothing mask s1<<1 | s0
    /// descriptors: (from mask, band index, to mask, descriptor)
    pub edges: Vec<(usize, usize, usize, SaddleDescriptor)>,
}

impl Square {
    pub fn state_space(&self, mask: usize) -> StateSpace {
        StateSpace::new(self.punctures, self.corners[mask].classes())
    }

    /// A stable signature: squares with equal signatures produce identical
    /// saddle matrices, so checks can deduplicate on it.
    pub fn signature(&self) -> String {
        format!("{:?}|{:?}", self.corners.iter().map(|c| c.classes()).collect::<Vec<_>>(), self.edges)
    }
}

/// The face structure of one matching, or `None` when not planar.
fn analyze(alpha: &[Dart]) -> Option<(Vec<MapComponent>, Vec<usize>, usize)> {
    // Connected components over vertices.
    let mut comp_of = [usize::MAX; 2];
    let mut n_comps = 0;
    for start in 0..2 {
        if comp_of[start] != usize::MAX {
            continue;
        }
        comp_of[start] = n_comps;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for p in 0..4 {
                let w = vertex(alpha[4 * v + p]);
                if comp_of[w] == usize::MAX {
                    comp_of[w] = n_comps;
                    stack.push(w);
                }
            }
        }
        n_comps += 1;
    }

    // Faces: orbits of rotate ∘ alpha.
    let mut face_of_dart = vec![usize::MAX; 8];
    let mut n_faces = 0;
    for d0 in 0..8 {
        if face_of_dart[d0] != usize::MAX {
            continue;
        }
        let mut d = d0;
        loop {
            face_of_dart[d] = n_faces;
            d = rotate(alpha[d]);
            if d == d0 {
                break;
            }
        }
        n_faces += 1;
    }

    // Planarity per component.
    let mut comps = Vec::new();
    for c in 0..n_comps {
        let verts: Vec<usize> = (0..2).filter(|&v| comp_of[v] == c).collect();
        let edge_count = verts
            .iter()
            .map(|&v| (0..4).filter(|&p| alpha[4 * v + p] >= 4 * v + p).count())
            .sum::<usize>();
        let mut faces = BTreeSet::new();
        for &v in &verts {
            for p in 0..4 {
                faces.insert(face_of_dart[4 * v + p]);
            }
        }
        let chi = verts.len() as i64 - edge_count as i64 + faces.len() as i64;
        if chi != 2 {
            return None;
        }
        comps.push(MapComponent { verts, edge_count, faces: faces.into_iter().collect() });
    }
    Some((comps, face_of_dart, n_faces))
}

/// Faces of the corner sectors: corner (v, j) lies in the face of dart
/// (v, j+1).
fn face_of_corner(face_of_dart: &[usize], v: usize, j: usize) -> usize {
    face_of_dart[4 * v + (j + 1) % 4]
}

/// All embeddings (outer-face and nesting choices) of the analyzed map.
fn embeddings(comps: &[MapComponent]) -> Vec<Embedding> {
    let mut out = Vec::new();
    match comps {
        [single] => {
            for &outer in &single.faces {
                out.push(Embedding { identify: vec![], outer });
            }
        }
        [a, b] => {
            // Side by side: the two chosen outer faces are the same region.
            for &fa in &a.faces {
                for &fb in &b.faces {
                    out.push(Embedding { identify: vec![(fa, fb)], outer: fa });
                }
            }
            // One inside a bounded face of the other.
            for (inner, outer_comp) in [(b, a), (a, b)] {
                for &outer_face in &outer_comp.faces {
                    for &host in &outer_comp.faces {
                        if host == outer_face {
                            continue;
                        }
                        for &fi in &inner.faces {
                            out.push(Embedding {
                                identify: vec![(fi, host)],
                                outer: outer_face,
                            });
                        }
                    }
                }
            }
        }
        _ => unreachable!("at most two components"),
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

impl Configuration {
    /// Resolve both band sites: `mask` bit `i` selects the pairing at vertex
    /// `i` (0 joins ports 0-1 and 2-3, 1 joins ports 0-3 and 1-2).
    fn resolve(&self, mask: usize) -> ResolvedConfig {
        let smoothing_partner = |v: usize, p: usize| -> usize {
            if mask >> v & 1 == 0 {
                [1, 0, 3, 2][p]
            } else {
                [3, 2, 1, 0][p]
            }
        };

        // Circles: orbits of alpha followed by the smoothing pairing.
        let mut seen = vec![false; 8];
        let mut raw: Vec<BTreeSet<Dart>> = Vec::new();
        for d0 in 0..8 {
            if seen[d0] {
                continue;
            }
            let mut orbit = BTreeSet::new();
            let mut d = d0;
            loop {
                seen[d] = true;
                orbit.insert(d);
                let a = self.alpha[d];
                seen[a] = true;
                orbit.insert(a);
                d = 4 * vertex(a) + smoothing_partner(vertex(a), a % 4);
                if d == d0 {
                    break;
                }
            }
            raw.push(orbit);
        }
        // The same circle appears once per traversal direction; orbits that
        // share darts are merged by the insertion of alpha images above, so
        // dedupe by dart-set equality.
        let mut circles_darts: Vec<BTreeSet<Dart>> = Vec::new();
        for orbit in raw {
            if !circles_darts.iter().any(|c| !c.is_disjoint(&orbit)) {
                circles_darts.push(orbit);
            }
        }

        // Resolved regions: faces glued through the smoothing channels and
        // the nesting identifications.
        let mut uf = UnionFind::new(self.n_faces);
        for &(a, b) in &self.identify {
            uf.union(a, b);
        }
        for v in 0..2 {
            if mask >> v & 1 == 0 {
                uf.union(
                    face_of_corner(&self.face_of_corner, v, 1),
                    face_of_corner(&self.face_of_corner, v, 3),
                );
            } else {
                uf.union(
                    face_of_corner(&self.face_of_corner, v, 0),
                    face_of_corner(&self.face_of_corner, v, 2),
                );
            }
        }

        // Region tree: regions are nodes, circles are edges. Each circle
        // borders the two regions flanking any of its darts.
        let sides: Vec<(usize, usize)> = circles_darts
            .iter()
            .map(|c| {
                let &d = c.iter().next().expect("nonempty circle");
                let (v, p) = (vertex(d), d % 4);
                let left = uf.find(face_of_corner(&self.face_of_corner, v, p));
                let right = uf.find(face_of_corner(&self.face_of_corner, v, (p + 3) % 4));
                (left, right)
            })
            .collect();
        let root = uf.find(self.outer);

        // Distances from the root region through circle edges give each
        // circle an inside: the side farther from the root.
        let mut adjacency: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, &(a, b)) in sides.iter().enumerate() {
            adjacency.entry(a).or_default().push((b, ci));
            adjacency.entry(b).or_default().push((a, ci));
        }
        let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
        depth.insert(root, 0);
        let mut queue = std::collections::VecDeque::from([root]);
        let mut inner_region: Vec<usize> = vec![usize::MAX; sides.len()];
        while let Some(r) = queue.pop_front() {
            let d = depth[&r];
            for &(next, ci) in adjacency.get(&r).into_iter().flatten() {
                if !depth.contains_key(&next) {
                    depth.insert(next, d + 1);
                    inner_region[ci] = next;
                    queue.push_back(next);
                }
            }
        }

        // Supports: punctures living in regions inside each circle. Walk up
        // from each puncture's region to the root, crossing circles.
        let mut region_parent_circle: BTreeMap<usize, usize> = BTreeMap::new();
        for (ci, &r) in inner_region.iter().enumerate() {
            region_parent_circle.insert(r, ci);
        }
        let parent_of = |region: usize, sides: &[(usize, usize)]| -> Option<(usize, usize)> {
            let ci = *region_parent_circle.get(&region)?;
            let (a, b) = sides[ci];
            Some((if a == region { b } else { a }, ci))
        };
        let mut supports: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); circles_darts.len()];
        for (pi, &face) in self.punctures.iter().enumerate() {
            let mut region = uf.find(face);
            while region != root {
                let (up, ci) = parent_of(region, &sides).expect("path to root");
                supports[ci].insert(pi);
                region = up;
            }
        }

        let circles = circles_darts
            .into_iter()
            .zip(supports)
            .map(|(darts, support)| (CircleClass::from_support(support), darts))
            .collect();
        ResolvedConfig { circles }
    }

    fn descriptor(&self, from: &ResolvedConfig, to: &ResolvedConfig, band: usize) -> Option<SaddleDescriptor> {
        let touches = |darts: &BTreeSet<Dart>| darts.iter().any(|&d| vertex(d) == band);
        let src_touched: Vec<usize> =
            (0..from.circles.len()).filter(|&i| touches(&from.circles[i].1)).collect();
        let dst_touched: Vec<usize> =
            (0..to.circles.len()).filter(|&i| touches(&to.circles[i].1)).collect();
        let mut by_darts: BTreeMap<&BTreeSet<Dart>, usize> = BTreeMap::new();
        for (i, (_, darts)) in to.circles.iter().enumerate() {
            if !dst_touched.contains(&i) {
                by_darts.insert(darts, i);
            }
        }
        let mut untouched = Vec::new();
        for (i, (_, darts)) in from.circles.iter().enumerate() {
            if src_touched.contains(&i) {
                continue;
            }
            untouched.push((i, *by_darts.get(darts)?));
        }
        let kind = match (src_touched.as_slice(), dst_touched.as_slice()) {
            (&[a, b], &[d]) => SaddleKind::Merge { src: [a, b], dst: d },
            (&[s], &[a, b]) => SaddleKind::Split { src: s, dst: [a, b] },
            _ => return None,
        };
        Some(SaddleDescriptor { kind, untouched })
    }

    /// The four resolved corners and four saddle descriptors of the square.
    pub fn square(&self) -> Option<Square> {
        let corners = [self.resolve(0), self.resolve(1), self.resolve(2), self.resolve(3)];
        let mut edges = Vec::new();
        for (from, band, to) in [(0usize, 0usize, 1usize), (0, 1, 2), (1, 1, 3), (2, 0, 3)] {
            edges.push((from, band, to, self.descriptor(&corners[from], &corners[to], band)?));
        }
        Some(Square { punctures: self.punctures.len(), corners, edges })
    }
}

/// Enumerate every embedded two-band configuration with at most
/// `max_punctures` punctures, handing each square to `visit`.
pub fn enumerate_squares(max_punctures: usize, mut visit: impl FnMut(&Square)) {
    for alpha in matchings() {
        let Some((comps, face_of_dart, n_faces)) = analyze(&alpha) else {
            continue;
        };
        for emb in embeddings(&comps) {
            // All faces usable for punctures.
            for n in 0..=max_punctures {
                let mut assignment = vec![0usize; n];
                loop {
                    let config = Configuration {
                        alpha: alpha.clone(),
                        face_of_corner: face_of_dart.clone(),
                        n_faces,
                        identify: emb.identify.clone(),
                        outer: emb.outer,
                        punctures: assignment.clone(),
                    };
                    if let Some(square) = config.square() {
                        visit(&square);
                    }
                    // next assignment in base n_faces
                    let mut i = 0;
                    loop {
                        if i == n {
                            break;
                        }
                        assignment[i] += 1;
                        if assignment[i] < n_faces {
                            break;
                        }
                        assignment[i] = 0;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matchings_count() {
        assert_eq!(matchings().len(), 105);
    }

    #[test]
    fn squares_exist_and_are_balanced() {
        let mut count = 0usize;
        let mut kinds = BTreeSet::new();
        enumerate_squares(2, |square| {
            count += 1;
            for (_, _, _, desc) in &square.edges {
                kinds.insert(match desc.kind {
                    SaddleKind::Merge { .. } => "merge",
                    SaddleKind::Split { .. } => "split",
                });
            }
            // Circle counts along a square edge differ by exactly one.
            for &(from, _, to, _) in &square.edges {
                let a = square.corners[from].circles.len() as i64;
                let b = square.corners[to].circles.len() as i64;
                assert_eq!((a - b).abs(), 1);
            }
        });
        assert!(count > 1000, "only {count} squares");
        assert_eq!(kinds.len(), 2);
    }

    #[test]
    fn unnested_essential_merge_appears() {
        // Somewhere in the enumeration a merge of circles around {0} and {1}
        // into one around {0, 1} must occur.
        let mut found = false;
        enumerate_squares(2, |square| {
            for (from, _, to, desc) in &square.edges {
                if let SaddleKind::Merge { src, dst } = desc.kind {
                    let a = &square.corners[*from].circles[src[0]].0;
                    let b = &square.corners[*from].circles[src[1]].0;
                    let c = &square.corners[*to].circles[dst].0;
                    if a == &CircleClass::from_support([0])
                        && b == &CircleClass::from_support([1])
                        && c == &CircleClass::from_support([0, 1])
                    {
                        found = true;
                    }
                }
            }
        });
        assert!(found);
    }
}
