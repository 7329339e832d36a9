//! Building diagrams from sweep words.
//!
//! A Morse word describes a diagram drawn on a slot grid, swept bottom to
//! top: strands occupy integer slots, and each event is a cup (local
//! minimum), a cap (local maximum), or a crossing of two strands. Punctures
//! sit at fixed slots between two event heights; their rays point straight
//! up, and a horizontal run above a puncture crossing its column counts -1
//! when traversed rightward, +1 leftward (so a counterclockwise circle around
//! a puncture winds +1).
//!
//! Words are correct by construction: the compiler produces genuinely planar
//! diagrams with consistent winding data, which is why fixtures and the
//! randomized test generator are written in this form. Component orientations
//! are chosen by traversal; `compile_with` can flip individual components.

use crate::diagram::{Diagram, ProtoAssembly};
use crate::error::{Error, Result};
use crate::planar::WindingVector;

/// Which incoming strand passes over at a crossing: the one entering from
/// the lower-left slot (`Left`) or the lower-right (`Right`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorseEvent {
    Cup { left: usize, right: usize },
    Cap { left: usize, right: usize },
    Cross { left: usize, right: usize, over: Side },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Puncture {
    pub slot: usize,
    /// The puncture sits above the first `after_event` events: a horizontal
    /// run at event index `t` crosses its ray exactly when `t >= after_event`.
    pub after_event: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseWord {
    pub slots: usize,
    pub punctures: Vec<Puncture>,
    pub events: Vec<MorseEvent>,
}

impl MorseWord {
    pub fn new(slots: usize) -> Self {
        MorseWord { slots, punctures: Vec::new(), events: Vec::new() }
    }

    pub fn puncture(mut self, slot: usize, after_event: usize) -> Self {
        self.punctures.push(Puncture { slot, after_event });
        self
    }

    pub fn cup(mut self, left: usize, right: usize) -> Self {
        self.events.push(MorseEvent::Cup { left, right });
        self
    }

    pub fn cap(mut self, left: usize, right: usize) -> Self {
        self.events.push(MorseEvent::Cap { left, right });
        self
    }

    pub fn cross(mut self, left: usize, right: usize, over: Side) -> Self {
        self.events.push(MorseEvent::Cross { left, right, over });
        self
    }

    pub fn compile(&self) -> Result<Diagram> {
        self.compile_with(&[])
    }

    /// Compile, then reverse the orientation of each component whose index
    /// has a `true` entry in `flips` (components in traversal order).
    pub fn compile_with(&self, flips: &[bool]) -> Result<Diagram> {
        Compiler::new(self)?.run(flips)
    }
}

/// An open strand end. Stable across arc merges.
#[derive(Debug, Clone, Copy)]
struct EndRef {
    arc: usize,
    which: usize, // 0 or 1
}

#[derive(Debug, Clone)]
struct ArcBuf {
    /// winding read end0 -> end1
    winding: Vec<i64>,
    ends: [usize; 2],
    /// corner attachment per end: (crossing, corner)
    corner: [Option<(usize, usize)>; 2],
    alive: bool,
    closed: bool,
}

// Corner numbering, counterclockwise: 0 = upper-right, 1 = upper-left,
// 2 = lower-left, 3 = lower-right.
const UP_RIGHT: usize = 0;
const UP_LEFT: usize = 1;
const DOWN_LEFT: usize = 2;
const DOWN_RIGHT: usize = 3;

struct Compiler<'w> {
    word: &'w MorseWord,
    arcs: Vec<ArcBuf>,
    ends: Vec<EndRef>,
    /// end id per corner of each crossing
    crossings: Vec<[usize; 4]>,
    /// whether the strand through corners 0 and 2 is under
    under_even: Vec<bool>,
    /// slot -> end id
    occupancy: std::collections::BTreeMap<usize, usize>,
}

impl<'w> Compiler<'w> {
    fn new(word: &'w MorseWord) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, p) in word.punctures.iter().enumerate() {
            if p.slot >= word.slots {
                return Err(Error::invalid(
                    format!("punctures[{i}]"),
                    format!("slot {} out of range 0..{}", p.slot, word.slots),
                ));
            }
            if !seen.insert(p.slot) {
                return Err(Error::invalid(format!("punctures[{i}]"), "puncture slots must be distinct"));
            }
        }
        Ok(Compiler {
            word,
            arcs: Vec::new(),
            ends: Vec::new(),
            crossings: Vec::new(),
            under_even: Vec::new(),
            occupancy: std::collections::BTreeMap::new(),
        })
    }

    fn is_puncture_slot(&self, slot: usize) -> bool {
        self.word.punctures.iter().any(|p| p.slot == slot)
    }

    /// Signed ray crossings of a horizontal run at event `t` from slot `from`
    /// to slot `to`.
    fn run_delta(&self, from: usize, to: usize, t: usize) -> Vec<i64> {
        let n = self.word.punctures.len();
        let mut delta = vec![0i64; n];
        let (lo, hi) = (from.min(to), from.max(to));
        let sign = if to > from { -1 } else { 1 };
        for (i, p) in self.word.punctures.iter().enumerate() {
            if lo < p.slot && p.slot < hi && t >= p.after_event {
                delta[i] += sign;
            }
        }
        delta
    }

    fn add_delta(winding: &mut [i64], delta: &[i64], negate: bool) {
        for (w, d) in winding.iter_mut().zip(delta) {
            *w += if negate { -d } else { *d };
        }
    }

    /// Append a horizontal run to the arc owning end `end_id`. The run's
    /// delta is given in its travel direction; `into_end` says whether the
    /// travel direction points toward that end (an arriving run) or away
    /// from it (a departing run).
    fn append_run(&mut self, end_id: usize, delta: &[i64], into_end: bool) {
        let EndRef { arc, which } = self.ends[end_id];
        // Reading the arc end0 -> end1 traverses a run at end1 in its
        // arriving direction and a run at end0 in its departing direction.
        let as_read = (which == 1) == into_end;
        Self::add_delta(&mut self.arcs[arc].winding, delta, !as_read);
    }

    fn new_arc(&mut self, winding: Vec<i64>) -> (usize, usize, usize) {
        let arc = self.arcs.len();
        let e0 = self.ends.len();
        let e1 = e0 + 1;
        self.ends.push(EndRef { arc, which: 0 });
        self.ends.push(EndRef { arc, which: 1 });
        self.arcs.push(ArcBuf {
            winding,
            ends: [e0, e1],
            corner: [None, None],
            alive: true,
            closed: false,
        });
        (arc, e0, e1)
    }

    fn check_span(&self, ev: usize, left: usize, right: usize, endpoints_occupied: bool) -> Result<()> {
        let loc = format!("events[{ev}]");
        if left >= right || right >= self.word.slots {
            return Err(Error::invalid(loc, format!("bad slot pair ({left}, {right})")));
        }
        for s in [left, right] {
            if self.is_puncture_slot(s) {
                return Err(Error::invalid(loc, format!("slot {s} is a puncture slot")));
            }
            if self.occupancy.contains_key(&s) != endpoints_occupied {
                return Err(Error::invalid(
                    loc,
                    format!(
                        "slot {s} is {}occupied",
                        if endpoints_occupied { "not " } else { "" }
                    ),
                ));
            }
        }
        if let Some((&s, _)) = self.occupancy.range(left + 1..right).next() {
            return Err(Error::invalid(loc, format!("slot {s} is occupied between {left} and {right}")));
        }
        Ok(())
    }

    fn run(mut self, flips: &[bool]) -> Result<Diagram> {
        for (t, event) in self.word.events.iter().enumerate() {
            match *event {
                MorseEvent::Cup { left, right } => {
                    self.check_span(t, left, right, false)?;
                    let delta = self.run_delta(left, right, t);
                    let (_, e0, e1) = self.new_arc(delta);
                    self.occupancy.insert(left, e0);
                    self.occupancy.insert(right, e1);
                }
                MorseEvent::Cross { left, right, over } => {
                    self.check_span(t, left, right, true)?;
                    let end_l = self.occupancy.remove(&left).expect("checked");
                    let end_r = self.occupancy.remove(&right).expect("checked");
                    // The crossing point sits just right of `left`; the
                    // right-hand strand's incoming run sweeps the full span.
                    let sweep = self.run_delta(right, left, t);
                    self.append_run(end_r, &sweep, true);
                    // Continuations: the left strand exits upper-right after
                    // sweeping rightward, the right strand exits upper-left.
                    let out_sweep = self.run_delta(left, right, t);
                    let (_, a0, a1) = self.new_arc(out_sweep);
                    let (_, b0, b1) = self.new_arc(vec![0; self.word.punctures.len()]);
                    let x = self.crossings.len();
                    self.attach(end_l, x, DOWN_LEFT)?;
                    self.attach(end_r, x, DOWN_RIGHT)?;
                    self.attach(a0, x, UP_RIGHT)?;
                    self.attach(b0, x, UP_LEFT)?;
                    self.crossings.push([a0, b0, end_l, end_r]);
                    // Strand A runs lower-left to upper-right; it is under
                    // exactly when the right strand is over.
                    self.under_even.push(over == Side::Right);
                    self.occupancy.insert(right, a1);
                    self.occupancy.insert(left, b1);
                }
                MorseEvent::Cap { left, right } => {
                    self.check_span(t, left, right, true)?;
                    let end_l = self.occupancy.remove(&left).expect("checked");
                    let end_r = self.occupancy.remove(&right).expect("checked");
                    let delta = self.run_delta(left, right, t);
                    self.close_or_merge(end_l, end_r, &delta)?;
                }
            }
        }
        if !self.occupancy.is_empty() {
            let open: Vec<usize> = self.occupancy.keys().copied().collect();
            return Err(Error::invalid("events", format!("unclosed strands at slots {open:?}")));
        }

        // Hand everything to the assembler; arcs in creation order.
        let n = self.word.punctures.len();
        let mut assembly = ProtoAssembly::new(n);
        let mut proto_of_arc = vec![usize::MAX; self.arcs.len()];
        for (i, arc) in self.arcs.iter().enumerate() {
            if !arc.alive {
                continue;
            }
            let w = WindingVector::new(arc.winding.clone());
            proto_of_arc[i] = if arc.closed { assembly.add_loop(w) } else { assembly.add_open(w) };
        }
        for (x, corners) in self.crossings.iter().enumerate() {
            let mapped: [(usize, usize); 4] = std::array::from_fn(|c| {
                let EndRef { arc, which } = self.ends[corners[c]];
                (proto_of_arc[arc], which)
            });
            assembly.add_crossing(x, mapped, self.under_even[x]);
        }
        assembly.assemble(flips)
    }

    fn attach(&mut self, end_id: usize, crossing: usize, corner: usize) -> Result<()> {
        let EndRef { arc, which } = self.ends[end_id];
        if self.arcs[arc].corner[which].is_some() {
            return Err(Error::internal("strand end attached to two crossings"));
        }
        self.arcs[arc].corner[which] = Some((crossing, corner));
        Ok(())
    }

    /// A cap joins the two ends. Same arc: it closes into a free loop.
    /// Different arcs: concatenate them through the cap run.
    fn close_or_merge(&mut self, end_l: usize, end_r: usize, delta_lr: &[i64]) -> Result<()> {
        let l_ref = self.ends[end_l];
        let r_ref = self.ends[end_r];
        if l_ref.arc == r_ref.arc {
            let arc = l_ref.arc;
            // Close the loop: read end0 -> end1, then the cap run from
            // end1's slot back to end0's slot. delta_lr travels left to
            // right, so it is negated when end1 sits at the right slot.
            let negate = l_ref.which == 0;
            Self::add_delta(&mut self.arcs[arc].winding, delta_lr, negate);
            self.arcs[arc].closed = true;
            return Ok(());
        }
        // Merge: new arc reads (arc of end_l toward end_l), the cap run
        // left -> right, then (arc of end_r away from end_r).
        let al = self.arcs[l_ref.arc].clone();
        let ar = self.arcs[r_ref.arc].clone();
        let mut winding = if l_ref.which == 1 {
            al.winding.clone()
        } else {
            al.winding.iter().map(|x| -x).collect()
        };
        Self::add_delta(&mut winding, delta_lr, false);
        let rhs: Vec<i64> = if r_ref.which == 0 {
            ar.winding.clone()
        } else {
            ar.winding.iter().map(|x| -x).collect()
        };
        Self::add_delta(&mut winding, &rhs, false);

        let keep_l = al.ends[1 - l_ref.which];
        let keep_r = ar.ends[1 - r_ref.which];
        let arc = self.arcs.len();
        self.arcs.push(ArcBuf {
            winding,
            ends: [keep_l, keep_r],
            corner: [al.corner[1 - l_ref.which], ar.corner[1 - r_ref.which]],
            alive: true,
            closed: false,
        });
        self.ends[keep_l] = EndRef { arc, which: 0 };
        self.ends[keep_r] = EndRef { arc, which: 1 };
        self.arcs[l_ref.arc].alive = false;
        self.arcs[r_ref.arc].alive = false;
        Ok(())
    }
}
