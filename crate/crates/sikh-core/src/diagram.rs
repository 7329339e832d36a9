//! Link diagrams on the punctured disk and their resolutions.
//!
//! A diagram is a 4-valent graph: edges are oriented arcs carrying winding
//! data (signed ray crossings per puncture), crossings hold four edge-ends in
//! counterclockwise planar order with the under-strand occupying ports 0 and
//! 2 after normalization. Replacing crossing `i` by its `v_i`-smoothing for
//! every `i` yields the resolved curve system `D_v`; the smoothing convention
//! is that the 0-smoothing joins ports 0–1 and 2–3, the 1-smoothing joins
//! ports 0–3 and 1–2.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::planar::{CircleClass, Surface, WindingVector};
use crate::tqft::{SaddleDescriptor, SaddleKind};

/// Hard cap on crossing count; full validation enumerates all resolutions.
pub const MAX_CROSSINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeEnd {
    Tail,
    Head,
}

impl EdgeEnd {
    pub fn flip(self) -> EdgeEnd {
        match self {
            EdgeEnd::Tail => EdgeEnd::Head,
            EdgeEnd::Head => EdgeEnd::Tail,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            EdgeEnd::Tail => 0,
            EdgeEnd::Head => 1,
        }
    }

    pub fn from_u8(x: u8) -> Option<EdgeEnd> {
        match x {
            0 => Some(EdgeEnd::Tail),
            1 => Some(EdgeEnd::Head),
            _ => None,
        }
    }
}

/// One edge-end sitting at a crossing port. `edge` is a position into the
/// diagram's edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Port {
    pub edge: usize,
    pub end: EdgeEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: u32,
    pub winding: WindingVector,
}

/// A crossing with ports in counterclockwise order; after normalization the
/// under-strand runs through ports 0 and 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub id: u32,
    pub ports: [Port; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingSigns {
    pub n_plus: usize,
    pub n_minus: usize,
}

/// A validated link diagram. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    surface: Surface,
    edges: Vec<Edge>,
    crossings: Vec<Crossing>,
    components: Vec<Vec<usize>>,
}

/// One circle of a resolved state: its isotopy class, the set of edges it
/// traverses (used to identify circles across cube vertices), and the winding
/// of the traversal that was used to classify it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedCircle {
    pub class: CircleClass,
    pub footprint: BTreeSet<usize>,
    pub winding: WindingVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedState {
    pub vertex: u64,
    pub circles: Vec<ResolvedCircle>,
}

impl ResolvedState {
    pub fn classes(&self) -> Vec<CircleClass> {
        self.circles.iter().map(|c| c.class.clone()).collect()
    }
}

impl Diagram {
    /// Build and fully validate a diagram. `crossings` ports may start at any
    /// rotation; they are normalized so that port 0 is an under-strand end,
    /// guided by the per-crossing `under0` flag (`true` when port 0 of the
    /// given listing is already an under end).
    pub fn new(
        punctures: usize,
        edges: Vec<(u32, WindingVector)>,
        crossings: Vec<(u32, [(u32, EdgeEnd); 4], bool)>,
        components: Vec<Vec<u32>>,
    ) -> Result<Diagram> {
        if crossings.len() > MAX_CROSSINGS {
            return Err(Error::invalid(
                "crossings",
                format!("{} crossings exceeds the supported maximum {MAX_CROSSINGS}", crossings.len()),
            ));
        }

        // Edges, sorted by id, with an id -> position table.
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|(id, winding)| Edge { id, winding })
            .collect();
        edges.sort_by_key(|e| e.id);
        let mut edge_pos: BTreeMap<u32, usize> = BTreeMap::new();
        for (pos, e) in edges.iter().enumerate() {
            if e.winding.len() != punctures {
                return Err(Error::invalid(
                    format!("edges[{}]", e.id),
                    format!("winding length {} but surface has {punctures} punctures", e.winding.len()),
                ));
            }
            if edge_pos.insert(e.id, pos).is_some() {
                return Err(Error::invalid(format!("edges[{}]", e.id), "duplicate edge id"));
            }
        }

        // Crossings, sorted by id, port references resolved and normalized.
        let mut sorted: Vec<(u32, [(u32, EdgeEnd); 4], bool)> = crossings;
        sorted.sort_by_key(|c| c.0);
        let mut seen_ids = BTreeSet::new();
        let mut crossings = Vec::with_capacity(sorted.len());
        for (id, raw_ports, under0) in sorted {
            if !seen_ids.insert(id) {
                return Err(Error::invalid(format!("crossings[{id}]"), "duplicate crossing id"));
            }
            let mut ports = [Port { edge: 0, end: EdgeEnd::Tail }; 4];
            for (j, (eid, end)) in raw_ports.iter().enumerate() {
                let &pos = edge_pos.get(eid).ok_or_else(|| {
                    Error::invalid(format!("crossings[{id}].ports[{j}]"), format!("unknown edge id {eid}"))
                })?;
                ports[j] = Port { edge: pos, end: *end };
            }
            // Rotate so port 0 is an under-strand end, preserving cyclic order.
            if !under0 {
                ports.rotate_left(1);
            }
            crossings.push(Crossing { id, ports });
        }

        // Components with edge ids resolved to positions.
        let mut comp_pos = Vec::with_capacity(components.len());
        for (ci, comp) in components.iter().enumerate() {
            let mut cycle = Vec::with_capacity(comp.len());
            for eid in comp {
                let &pos = edge_pos.get(eid).ok_or_else(|| {
                    Error::invalid(format!("components[{ci}]"), format!("unknown edge id {eid}"))
                })?;
                cycle.push(pos);
            }
            comp_pos.push(cycle);
        }

        let d = Diagram {
            surface: Surface::new(punctures),
            edges,
            crossings,
            components: comp_pos,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn punctures(&self) -> usize {
        self.surface.punctures()
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Where each edge-end sits: `(crossing index, port index)`.
    fn port_map(&self) -> BTreeMap<(usize, EdgeEnd), (usize, usize)> {
        let mut map = BTreeMap::new();
        for (ci, x) in self.crossings.iter().enumerate() {
            for (j, p) in x.ports.iter().enumerate() {
                map.insert((p.edge, p.end), (ci, j));
            }
        }
        map
    }

    fn validate(&self) -> Result<()> {
        let mut usage: BTreeMap<(usize, EdgeEnd), (usize, usize)> = BTreeMap::new();
        for (ci, x) in self.crossings.iter().enumerate() {
            let mut distinct = BTreeSet::new();
            for (j, p) in x.ports.iter().enumerate() {
                if !distinct.insert((p.edge, p.end)) {
                    return Err(Error::invalid(
                        format!("crossings[{}].ports[{j}]", x.id),
                        "edge end listed twice at one crossing",
                    ));
                }
                if let Some((c2, j2)) = usage.insert((p.edge, p.end), (ci, j)) {
                    return Err(Error::invalid(
                        format!("crossings[{}].ports[{j}]", x.id),
                        format!(
                            "port reuse: edge {} end {} already used at crossings[{}].ports[{j2}]",
                            self.edges[p.edge].id,
                            p.end.as_u8(),
                            self.crossings[c2].id
                        ),
                    ));
                }
            }
            // Each strand passes through: one incoming, one outgoing end.
            for (a, b) in [(0usize, 2usize), (1, 3)] {
                let (ea, eb) = (x.ports[a].end, x.ports[b].end);
                if ea == eb {
                    return Err(Error::invalid(
                        format!("crossings[{}]", x.id),
                        format!(
                            "under0 consistency: ports {a} and {b} must be one incoming and one \
                             outgoing end of a strand"
                        ),
                    ));
                }
            }
        }

        // Every edge end is either at a crossing or part of a free loop.
        let mut free_loops = BTreeSet::new();
        for (pos, e) in self.edges.iter().enumerate() {
            let tail = usage.contains_key(&(pos, EdgeEnd::Tail));
            let head = usage.contains_key(&(pos, EdgeEnd::Head));
            match (tail, head) {
                (true, true) => {}
                (false, false) => {
                    free_loops.insert(pos);
                }
                _ => {
                    return Err(Error::invalid(
                        format!("edges[{}]", e.id),
                        "dangling edge-end: one end at a crossing, the other unattached",
                    ));
                }
            }
        }

        self.validate_components(&usage, &free_loops)?;
        self.validate_planarity(&free_loops)?;
        self.validate_resolutions()?;
        Ok(())
    }

    fn validate_components(
        &self,
        usage: &BTreeMap<(usize, EdgeEnd), (usize, usize)>,
        free_loops: &BTreeSet<usize>,
    ) -> Result<()> {
        let mut covered = vec![false; self.edges.len()];
        for (ci, comp) in self.components.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::invalid(format!("components[{ci}]"), "empty component"));
            }
            for &pos in comp {
                if covered[pos] {
                    return Err(Error::invalid(
                        format!("components[{ci}]"),
                        format!("edge {} appears in more than one component", self.edges[pos].id),
                    ));
                }
                covered[pos] = true;
            }
            if comp.len() == 1 && free_loops.contains(&comp[0]) {
                // Crossing-free loop; its winding must already be an
                // embedded-circle class.
                let e = &self.edges[comp[0]];
                CircleClass::from_winding(&e.winding).map_err(|_| {
                    Error::invalid(
                        format!("components[{ci}]"),
                        format!("free loop edge {} has winding {} which is not an embedded-circle class", e.id, e.winding),
                    )
                })?;
                continue;
            }
            // Consecutive edges meet head-to-tail at opposite ports of one crossing.
            for w in 0..comp.len() {
                let e = comp[w];
                let f = comp[(w + 1) % comp.len()];
                let &(c1, j1) = usage.get(&(e, EdgeEnd::Head)).ok_or_else(|| {
                    Error::invalid(
                        format!("components[{ci}]"),
                        format!("component is not a closed cycle: edge {} head is unattached", self.edges[e].id),
                    )
                })?;
                let &(c2, j2) = usage.get(&(f, EdgeEnd::Tail)).ok_or_else(|| {
                    Error::invalid(
                        format!("components[{ci}]"),
                        format!("component is not a closed cycle: edge {} tail is unattached", self.edges[f].id),
                    )
                })?;
                if c1 != c2 || (j1 + 2) % 4 != j2 {
                    return Err(Error::invalid(
                        format!("components[{ci}]"),
                        format!(
                            "edges {} and {} are listed consecutively but do not continue \
                             through a crossing",
                            self.edges[e].id, self.edges[f].id
                        ),
                    ));
                }
            }
        }
        if let Some(pos) = covered.iter().position(|&c| !c) {
            return Err(Error::invalid(
                "components",
                format!("edge {} belongs to no component", self.edges[pos].id),
            ));
        }
        Ok(())
    }

    /// Rotation-system planarity: each connected component of the crossing
    /// graph must have Euler characteristic 2 (sphere embedding).
    fn validate_planarity(&self, free_loops: &BTreeSet<usize>) -> Result<()> {
        let k = self.crossings.len();
        if k == 0 {
            return Ok(());
        }
        // Dart = (crossing, port), numbered 4*c + j. The edge involution
        // pairs the two ends of each edge.
        let mut alpha = vec![usize::MAX; 4 * k];
        let mut crossing_of_edge: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        let port_map = self.port_map();
        for (pos, _) in self.edges.iter().enumerate() {
            if free_loops.contains(&pos) {
                continue;
            }
            let (c1, j1) = port_map[&(pos, EdgeEnd::Tail)];
            let (c2, j2) = port_map[&(pos, EdgeEnd::Head)];
            alpha[4 * c1 + j1] = 4 * c2 + j2;
            alpha[4 * c2 + j2] = 4 * c1 + j1;
            crossing_of_edge[pos] = vec![c1, c2];
        }

        // Connected components of the crossing graph.
        let mut comp_id = vec![usize::MAX; k];
        let mut next = 0;
        for start in 0..k {
            if comp_id[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp_id[start] = next;
            while let Some(c) = stack.pop() {
                for j in 0..4 {
                    let d = alpha[4 * c + j];
                    let c2 = d / 4;
                    if comp_id[c2] == usize::MAX {
                        comp_id[c2] = next;
                        stack.push(c2);
                    }
                }
            }
            next += 1;
        }

        // Face orbits of sigma∘alpha, counted per component.
        let mut faces = vec![0usize; next];
        let mut seen = vec![false; 4 * k];
        for d0 in 0..4 * k {
            if seen[d0] {
                continue;
            }
            let mut d = d0;
            loop {
                seen[d] = true;
                let a = alpha[d];
                d = 4 * (a / 4) + (a % 4 + 1) % 4;
                if d == d0 {
                    break;
                }
            }
            faces[comp_id[d0 / 4]] += 1;
        }

        let mut verts = vec![0usize; next];
        for c in 0..k {
            verts[comp_id[c]] += 1;
        }
        let mut edges_per = vec![0usize; next];
        for ends in crossing_of_edge.iter().filter(|e| !e.is_empty()) {
            edges_per[comp_id[ends[0]]] += 1;
        }
        for comp in 0..next {
            let chi = verts[comp] as i64 - edges_per[comp] as i64 + faces[comp] as i64;
            if chi != 2 {
                return Err(Error::invalid(
                    "crossings",
                    format!("crossing structure is not planar (component Euler characteristic {chi})"),
                ));
            }
        }
        Ok(())
    }

    /// Winding consistency: every circle of every resolution must be an
    /// embedded-circle class, and the mod-2 class of the whole system must
    /// not depend on the resolution.
    fn validate_resolutions(&self) -> Result<()> {
        let k = self.crossings.len();
        let mut reference: Option<Vec<bool>> = None;
        for v in 0..(1u64 << k) {
            let state = self.resolve(v).map_err(|e| match e {
                Error::Internal(msg) => Error::invalid("edges", format!("resolution {v:#b}: {msg}")),
                other => other,
            })?;
            let mut total = WindingVector::zero(self.punctures());
            for c in &state.circles {
                total.add_assign(&c.winding);
            }
            let class = total.mod2();
            match &reference {
                None => reference = Some(class),
                Some(r) => {
                    if *r != class {
                        return Err(Error::invalid(
                            "edges",
                            "winding inconsistency: resolution-dependent curve-system class",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The smoothing pairing of a crossing's ports: the 0-smoothing joins
    /// ports 0–1 and 2–3, the 1-smoothing joins 0–3 and 1–2.
    fn smoothing_pairs(bit: bool) -> [(usize, usize); 2] {
        if bit {
            [(0, 3), (1, 2)]
        } else {
            [(0, 1), (2, 3)]
        }
    }

    /// Resolve every crossing according to the bits of `v` and trace the
    /// resulting circles. Deterministic: circles are listed by their smallest
    /// edge position.
    pub fn resolve(&self, v: u64) -> Result<ResolvedState> {
        let k = self.crossings.len();
        assert!(v < (1u64 << k), "resolution vector out of range");

        // Join partner of every edge end.
        let mut partner: BTreeMap<(usize, EdgeEnd), (usize, EdgeEnd)> = BTreeMap::new();
        for (ci, x) in self.crossings.iter().enumerate() {
            for (a, b) in Self::smoothing_pairs(v >> ci & 1 == 1) {
                let (pa, pb) = (x.ports[a], x.ports[b]);
                partner.insert((pa.edge, pa.end), (pb.edge, pb.end));
                partner.insert((pb.edge, pb.end), (pa.edge, pa.end));
            }
        }

        let mut visited = vec![false; self.edges.len()];
        let mut circles = Vec::new();
        for start in 0..self.edges.len() {
            if visited[start] {
                continue;
            }
            let mut footprint = BTreeSet::new();
            let mut winding = WindingVector::zero(self.punctures());
            // Walk from `start` traversed tail -> head.
            let mut edge = start;
            let mut forward = true;
            loop {
                visited[edge] = true;
                footprint.insert(edge);
                if forward {
                    winding.add_assign(&self.edges[edge].winding);
                } else {
                    winding.add_assign(&self.edges[edge].winding.negate());
                }
                let out_end = if forward { EdgeEnd::Head } else { EdgeEnd::Tail };
                let next = match partner.get(&(edge, out_end)) {
                    Some(&n) => n,
                    // A free loop closes on itself.
                    None => (edge, out_end.flip()),
                };
                if next == (start, EdgeEnd::Tail) {
                    break;
                }
                edge = next.0;
                forward = next.1 == EdgeEnd::Tail;
            }
            let (class, _orientation) = CircleClass::from_winding(&winding)?;
            circles.push(ResolvedCircle { class, footprint, winding });
        }
        circles.sort_by_key(|c| *c.footprint.iter().next().expect("nonempty footprint"));
        Ok(ResolvedState { vertex: v, circles })
    }

    /// Crossing signs: a crossing is positive when the frame (over-strand
    /// direction, under-strand direction) is positively oriented. With ports
    /// in counterclockwise order this happens exactly when the under-strand's
    /// outgoing port directly follows the over-strand's outgoing port.
    pub fn crossing_signs(&self) -> CrossingSigns {
        let mut n_plus = 0;
        let mut n_minus = 0;
        for x in &self.crossings {
            let under_out = if x.ports[0].end == EdgeEnd::Tail { 0 } else { 2 };
            let over_out = if x.ports[1].end == EdgeEnd::Tail { 1 } else { 3 };
            if under_out == (over_out + 1) % 4 {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
        }
        CrossingSigns { n_plus, n_minus }
    }

    /// Describe the saddle between `resolve(v)` and `resolve(v + e_i)`:
    /// which circles are touched by the band at crossing `i` and the
    /// bijection of untouched circles (by footprint equality).
    pub fn saddle_descriptor(&self, v: u64, i: usize) -> Result<(ResolvedState, ResolvedState, SaddleDescriptor)> {
        assert!(v >> i & 1 == 0, "crossing {i} is already 1-smoothed in {v:#b}");
        let src = self.resolve(v)?;
        let dst = self.resolve(v | 1 << i)?;
        let desc = self.saddle_descriptor_between(&src, &dst, i)?;
        Ok((src, dst, desc))
    }

    /// Same as [`saddle_descriptor`](Self::saddle_descriptor) with resolved
    /// states supplied by the caller.
    pub fn saddle_descriptor_between(
        &self,
        src: &ResolvedState,
        dst: &ResolvedState,
        i: usize,
    ) -> Result<SaddleDescriptor> {
        let port_edges: BTreeSet<usize> = self.crossings[i].ports.iter().map(|p| p.edge).collect();
        let touches = |c: &ResolvedCircle| !c.footprint.is_disjoint(&port_edges);

        let src_touched: Vec<usize> =
            (0..src.circles.len()).filter(|&ix| touches(&src.circles[ix])).collect();
        let dst_touched: Vec<usize> =
            (0..dst.circles.len()).filter(|&ix| touches(&dst.circles[ix])).collect();

        let mut dst_by_footprint: BTreeMap<&BTreeSet<usize>, usize> = BTreeMap::new();
        for (ix, c) in dst.circles.iter().enumerate() {
            if !dst_touched.contains(&ix) {
                dst_by_footprint.insert(&c.footprint, ix);
            }
        }
        let mut untouched = Vec::new();
        for (ix, c) in src.circles.iter().enumerate() {
            if src_touched.contains(&ix) {
                continue;
            }
            let &jx = dst_by_footprint.get(&c.footprint).ok_or_else(|| {
                Error::internal(format!(
                    "untouched-circle bijection failure at crossing {i}, resolution {:#b}",
                    src.vertex
                ))
            })?;
            untouched.push((ix, jx));
        }
        if untouched.len() + src_touched.len() != src.circles.len()
            || untouched.len() + dst_touched.len() != dst.circles.len()
        {
            return Err(Error::internal(format!(
                "untouched-circle bijection failure at crossing {i}, resolution {:#b}",
                src.vertex
            )));
        }

        let kind = match (src_touched.as_slice(), dst_touched.as_slice()) {
            (&[a, b], &[d]) => SaddleKind::Merge { src: [a, b], dst: d },
            (&[s], &[a, b]) => SaddleKind::Split { src: s, dst: [a, b] },
            (&[_], &[_]) => {
                return Err(Error::internal(format!(
                    "merge-to-self at crossing {i}, resolution {:#b}: unreachable on a planar \
                     surface; winding data is corrupt",
                    src.vertex
                )))
            }
            _ => {
                return Err(Error::internal(format!(
                    "saddle at crossing {i} touches {} source and {} target circles",
                    src_touched.len(),
                    dst_touched.len()
                )))
            }
        };
        Ok(SaddleDescriptor { kind, untouched })
    }

    /// The diagram with crossing `i` replaced by its `bit`-smoothing. Edges
    /// through the smoothing are concatenated; components are retraced and
    /// reoriented (windings flip sign where the traversal direction does).
    pub fn smooth_crossing(&self, i: usize, bit: bool) -> Result<Diagram> {
        assert!(i < self.crossings.len());

        // Joined partner of edge ends through the deleted crossing.
        let mut joins: BTreeMap<(usize, EdgeEnd), (usize, EdgeEnd)> = BTreeMap::new();
        for (a, b) in Self::smoothing_pairs(bit) {
            let (pa, pb) = (self.crossings[i].ports[a], self.crossings[i].ports[b]);
            joins.insert((pa.edge, pa.end), (pb.edge, pb.end));
            joins.insert((pb.edge, pb.end), (pa.edge, pa.end));
        }

        // A chain state is an edge plus a traversal direction. Stepping
        // forward leaves through the head (tail if reversed) and enters the
        // join partner; stepping backward mirrors this.
        let fwd_step = |edge: usize, forward: bool| -> Option<(usize, bool)> {
            let out = (edge, if forward { EdgeEnd::Head } else { EdgeEnd::Tail });
            joins.get(&out).map(|&(e2, end2)| (e2, end2 == EdgeEnd::Tail))
        };
        let back_step = |edge: usize, forward: bool| -> Option<(usize, bool)> {
            let back = (edge, if forward { EdgeEnd::Tail } else { EdgeEnd::Head });
            joins.get(&back).map(|&(e2, end2)| (e2, end2 == EdgeEnd::Head))
        };

        // Walk maximal chains of edges through the joins. A chain is either a
        // path with two ends at surviving crossings, or a closed loop.
        let mut assembly = ProtoAssembly::new(self.punctures());
        let mut chain_of_end: BTreeMap<(usize, EdgeEnd), (usize, usize)> = BTreeMap::new();
        let mut visited = vec![false; self.edges.len()];
        for start in 0..self.edges.len() {
            if visited[start] {
                continue;
            }
            // Walk backward to a chain endpoint, or detect a closed loop.
            let mut state = (start, true);
            let mut is_loop = false;
            loop {
                match back_step(state.0, state.1) {
                    Some(prev) => {
                        if prev == (start, true) {
                            is_loop = true;
                            break;
                        }
                        state = prev;
                    }
                    None => break,
                }
            }
            // Collect the chain forward from the endpoint (or loop entry).
            let chain_start = if is_loop { (start, true) } else { state };
            let mut winding = WindingVector::zero(self.punctures());
            let mut state = chain_start;
            let open_entry = (
                chain_start.0,
                if chain_start.1 { EdgeEnd::Tail } else { EdgeEnd::Head },
            );
            let open_exit;
            loop {
                let (edge, forward) = state;
                visited[edge] = true;
                let step = if forward {
                    self.edges[edge].winding.clone()
                } else {
                    self.edges[edge].winding.negate()
                };
                winding.add_assign(&step);
                match fwd_step(edge, forward) {
                    Some(next) if !(is_loop && next == chain_start) => state = next,
                    Some(_) => {
                        open_exit = None;
                        break;
                    }
                    None => {
                        open_exit = Some((edge, if forward { EdgeEnd::Head } else { EdgeEnd::Tail }));
                        break;
                    }
                }
            }
            match open_exit {
                None => {
                    assembly.add_loop(winding);
                }
                Some(exit) => {
                    let p = assembly.add_open(winding);
                    chain_of_end.insert(open_entry, (p, 0));
                    chain_of_end.insert(exit, (p, 1));
                }
            }
        }

        // Surviving crossings keep their cyclic port order and under-strand.
        for (ci, x) in self.crossings.iter().enumerate() {
            if ci == i {
                continue;
            }
            let mut corners = [(0usize, 0usize); 4];
            for (j, p) in x.ports.iter().enumerate() {
                let &(proto, which) = chain_of_end
                    .get(&(p.edge, p.end))
                    .ok_or_else(|| Error::internal("edge end lost while smoothing a crossing"))?;
                corners[j] = (proto, which);
            }
            let id = if ci > i { ci - 1 } else { ci };
            assembly.add_crossing(id, corners, true);
        }
        assembly.assemble(&[])
    }

    /// The same diagram with crossings relabeled: new crossing `j` is old
    /// crossing `perm[j]`. Resolution vectors permute accordingly; graded
    /// homology must not change.
    pub fn permute_crossings(&self, perm: &[usize]) -> Result<Diagram> {
        assert_eq!(perm.len(), self.crossings.len());
        let edges = self.edges.iter().map(|e| (e.id, e.winding.clone())).collect();
        let crossings = perm
            .iter()
            .enumerate()
            .map(|(j, &old)| {
                let x = &self.crossings[old];
                let ports: [(u32, EdgeEnd); 4] =
                    std::array::from_fn(|p| (self.edges[x.ports[p].edge].id, x.ports[p].end));
                (j as u32, ports, true)
            })
            .collect();
        let components = self
            .components
            .iter()
            .map(|c| c.iter().map(|&pos| self.edges[pos].id).collect())
            .collect();
        Diagram::new(self.punctures(), edges, crossings, components)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diagram: {} punctures, {} edges, {} crossings, {} components",
            self.punctures(),
            self.edges.len(),
            self.crossings.len(),
            self.components.len()
        )
    }
}

/// Incremental builder for a diagram whose component orientations are not
/// yet decided: edges arrive as unoriented arcs attached to crossing corners,
/// with windings recorded along an arbitrary build direction. `assemble`
/// traces components, orients them, and emits a validated [`Diagram`].
#[derive(Debug, Default)]
pub(crate) struct ProtoAssembly {
    punctures: usize,
    /// winding of each proto-edge read from its end 0 to its end 1
    windings: Vec<WindingVector>,
    is_loop: Vec<bool>,
    /// corner occupants per crossing, counterclockwise; `(proto, end)`
    crossings: Vec<(usize, [(usize, usize); 4], bool)>,
}

impl ProtoAssembly {
    pub(crate) fn new(punctures: usize) -> Self {
        ProtoAssembly { punctures, ..Default::default() }
    }

    pub(crate) fn add_open(&mut self, winding: WindingVector) -> usize {
        self.windings.push(winding);
        self.is_loop.push(false);
        self.windings.len() - 1
    }

    pub(crate) fn add_loop(&mut self, winding: WindingVector) -> usize {
        self.windings.push(winding);
        self.is_loop.push(true);
        self.windings.len() - 1
    }

    /// Register a crossing. `corners` lists the four attached proto-edge ends
    /// in counterclockwise order; `under_even` says whether corners 0 and 2
    /// carry the under-strand (otherwise corners 1 and 3 do).
    pub(crate) fn add_crossing(&mut self, id: usize, corners: [(usize, usize); 4], under_even: bool) {
        self.crossings.push((id, corners, under_even));
    }

    /// Trace components, orient each one (optionally flipping those listed in
    /// `flip`), and build the diagram.
    pub(crate) fn assemble(mut self, flip: &[bool]) -> Result<Diagram> {
        self.crossings.sort_by_key(|&(id, _, _)| id);
        let m = self.windings.len();
        // (proto, end) -> (crossing index, corner)
        let mut corner_of: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for (ci, &(_, corners, _)) in self.crossings.iter().enumerate() {
            for (j, &(p, e)) in corners.iter().enumerate() {
                if corner_of.insert((p, e), (ci, j)).is_some() {
                    return Err(Error::internal("proto edge end attached to two corners"));
                }
            }
        }
        for p in 0..m {
            let attached =
                corner_of.contains_key(&(p, 0)) as usize + corner_of.contains_key(&(p, 1)) as usize;
            let expected = if self.is_loop[p] { 0 } else { 2 };
            if attached != expected {
                return Err(Error::internal(format!(
                    "proto edge {p} has {attached} attached ends, expected {expected}"
                )));
            }
        }

        // Trace components; record traversal direction per proto edge.
        let mut direction: Vec<Option<bool>> = vec![None; m]; // true = end0 -> end1
        let mut components: Vec<Vec<usize>> = Vec::new();
        for start in 0..m {
            if direction[start].is_some() {
                continue;
            }
            if self.is_loop[start] {
                direction[start] = Some(true);
                components.push(vec![start]);
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            let mut fwd = true;
            loop {
                direction[p] = Some(fwd);
                cycle.push(p);
                let out_end = if fwd { 1 } else { 0 };
                let &(ci, j) = corner_of
                    .get(&(p, out_end))
                    .ok_or_else(|| Error::internal("open proto edge end during assembly"))?;
                let (p2, e2) = self.crossings[ci].1[(j + 2) % 4];
                if p2 == start {
                    if e2 != 0 {
                        return Err(Error::internal("component trace reentered an edge sideways"));
                    }
                    break;
                }
                if direction[p2].is_some() {
                    return Err(Error::internal("component trace revisited an edge"));
                }
                p = p2;
                fwd = e2 == 0;
            }
            components.push(cycle);
        }

        // An edge is reversed exactly when its traversal direction disagrees
        // with the final component direction (traversal direction, possibly
        // flipped per component).
        let mut reversed = vec![false; m];
        for (ci, comp) in components.iter().enumerate() {
            let f = flip.get(ci).copied().unwrap_or(false);
            for &p in comp {
                let fwd = direction[p].expect("traced");
                reversed[p] = fwd == f;
            }
        }

        let edges: Vec<(u32, WindingVector)> = (0..m)
            .map(|p| {
                let w = if reversed[p] { self.windings[p].negate() } else { self.windings[p].clone() };
                (p as u32, w)
            })
            .collect();

        let end_kind = |p: usize, e: usize| -> EdgeEnd {
            // End 0 is the tail when the edge is not reversed.
            let tail_end = if reversed[p] { 1 } else { 0 };
            if e == tail_end {
                EdgeEnd::Tail
            } else {
                EdgeEnd::Head
            }
        };

        let crossings: Vec<(u32, [(u32, EdgeEnd); 4], bool)> = self
            .crossings
            .iter()
            .map(|&(id, corners, under_even)| {
                let rot = if under_even { 0 } else { 1 };
                let ports: [(u32, EdgeEnd); 4] = std::array::from_fn(|j| {
                    let (p, e) = corners[(j + rot) % 4];
                    (p as u32, end_kind(p, e))
                });
                (id as u32, ports, true)
            })
            .collect();

        let components: Vec<Vec<u32>> = components
            .iter()
            .enumerate()
            .map(|(ci, comp)| {
                let f = flip.get(ci).copied().unwrap_or(false);
                let mut c: Vec<u32> = comp.iter().map(|&p| p as u32).collect();
                if f {
                    c.reverse();
                }
                c
            })
            .collect();

        Diagram::new(self.punctures, edges, crossings, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The unknot with one positive kink: one crossing, two edges. Edge 0 is
    /// the lower (cup) arc at ports 2 and 3, edge 1 the upper (cap) arc at
    /// ports 0 and 1.
    fn positive_kink() -> Diagram {
        Diagram::new(
            0,
            vec![(0, WindingVector::zero(0)), (1, WindingVector::zero(0))],
            vec![(
                0,
                [
                    (1, EdgeEnd::Head),
                    (1, EdgeEnd::Tail),
                    (0, EdgeEnd::Tail),
                    (0, EdgeEnd::Head),
                ],
                true,
            )],
            vec![vec![0, 1]],
        )
        .unwrap()
    }

    fn negative_kink() -> Diagram {
        // Mirror: swap which strand is over by rotating the port listing so
        // the other strand occupies ports 0 and 2.
        Diagram::new(
            0,
            vec![(0, WindingVector::zero(0)), (1, WindingVector::zero(0))],
            vec![(
                0,
                [
                    (1, EdgeEnd::Tail),
                    (0, EdgeEnd::Tail),
                    (0, EdgeEnd::Head),
                    (1, EdgeEnd::Head),
                ],
                true,
            )],
            vec![vec![0, 1]],
        )
        .unwrap()
    }

    #[test]
    fn kink_signs() {
        assert_eq!(positive_kink().crossing_signs(), CrossingSigns { n_plus: 1, n_minus: 0 });
        assert_eq!(negative_kink().crossing_signs(), CrossingSigns { n_plus: 0, n_minus: 1 });
    }

    #[test]
    fn kink_resolutions() {
        // Positive kink: the 0-smoothing is the oriented smoothing with two
        // circles, the 1-smoothing is a single circle.
        let d = positive_kink();
        assert_eq!(d.resolve(0).unwrap().circles.len(), 2);
        assert_eq!(d.resolve(1).unwrap().circles.len(), 1);
        let n = negative_kink();
        assert_eq!(n.resolve(0).unwrap().circles.len(), 1);
        assert_eq!(n.resolve(1).unwrap().circles.len(), 2);
    }

    #[test]
    fn kink_saddles() {
        let d = positive_kink();
        let (_, _, desc) = d.saddle_descriptor(0, 0).unwrap();
        assert!(matches!(desc.kind, SaddleKind::Merge { .. }));
        let n = negative_kink();
        let (_, _, desc) = n.saddle_descriptor(0, 0).unwrap();
        assert!(matches!(desc.kind, SaddleKind::Split { .. }));
    }

    #[test]
    fn crossing_free_loop_on_annulus() {
        let d = Diagram::new(
            1,
            vec![(0, WindingVector::new(vec![1]))],
            vec![],
            vec![vec![0]],
        )
        .unwrap();
        assert_eq!(d.crossing_count(), 0);
        let state = d.resolve(0).unwrap();
        assert_eq!(state.circles.len(), 1);
        assert_eq!(state.circles[0].class, CircleClass::from_support([0]));
    }

    #[test]
    fn port_reuse_is_rejected() {
        let err = Diagram::new(
            0,
            vec![(0, WindingVector::zero(0)), (1, WindingVector::zero(0))],
            vec![(
                0,
                [
                    (1, EdgeEnd::Head),
                    (1, EdgeEnd::Tail),
                    (1, EdgeEnd::Head),
                    (0, EdgeEnd::Head),
                ],
                true,
            )],
            vec![vec![0, 1]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("twice"), "{err}");
    }

    #[test]
    fn bad_free_loop_winding_is_rejected() {
        let err = Diagram::new(
            1,
            vec![(0, WindingVector::new(vec![2]))],
            vec![],
            vec![vec![0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("embedded-circle"), "{err}");
    }

    #[test]
    fn dangling_end_is_rejected() {
        // Edge 2 has a tail at the crossing but its head nowhere.
        let err = Diagram::new(
            0,
            vec![
                (0, WindingVector::zero(0)),
                (1, WindingVector::zero(0)),
                (2, WindingVector::zero(0)),
            ],
            vec![(
                0,
                [
                    (1, EdgeEnd::Head),
                    (1, EdgeEnd::Tail),
                    (2, EdgeEnd::Tail),
                    (0, EdgeEnd::Head),
                ],
                true,
            )],
            vec![vec![0, 1, 2]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("dangling") || err.to_string().contains("cycle"), "{err}");
    }

    #[test]
    fn smoothing_the_positive_kink() {
        let d = positive_kink();
        let s0 = d.smooth_crossing(0, false).unwrap();
        assert_eq!(s0.crossing_count(), 0);
        assert_eq!(s0.components().len(), 2);
        let s1 = d.smooth_crossing(0, true).unwrap();
        assert_eq!(s1.components().len(), 1);
    }
}
