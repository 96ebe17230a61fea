//! The combinatorial cactus operad: configurations of parametrized circles
//! whose dual graph is a tree, stored as canonical traversal words.
//!
//! A configuration is traversed starting at its global basepoint; at every
//! intersection the traversal continues onto the next circle in that point's
//! cyclic order. Reading off which marked point each segment departs from
//! yields the *global word*, a sequence of `(lobe, slot)` marks that is a
//! complete invariant of the configuration. All operations here are pure
//! word/structure surgery followed by re-derivation of the canonical word.

mod compose;
mod decompose;
mod enumerate;
mod metric;
mod serde_io;

pub use compose::{compose, full_compose, relabel, spiny_compose};
pub use decompose::{decompose_generators, recompose, Decomposition, Step};
pub use enumerate::{enumerate_cacti, enumerate_spiny, noncrossing_basepoint_count, word_is_noncrossing};
pub use metric::{metric_compose, realize, realize_labeled, EventLabel, MetricCactus};
pub use serde_io::{BasepointPos, CactusJson, MetricCactusJson};

use std::collections::BTreeMap;
use std::fmt;

/// A marked point addressed as the `slot`-th point of a lobe, counting from
/// the lobe basepoint in parametrization order. Lobe labels are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mark {
    pub lobe: usize,
    pub slot: usize,
}

impl Mark {
    pub fn new(lobe: usize, slot: usize) -> Self {
        Mark { lobe, slot }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lobe, self.slot)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CactusError {
    /// Some label in `1..=n` never occurs.
    MissingLobe(usize),
    /// Two lobes interleave cyclically; the dual graph is not a tree.
    InterleavedLobes(usize, usize),
    /// Arc or slot data inconsistent with a traversal.
    BadParametrization(String),
    IndexOutOfRange { index: usize, arity: usize },
    SlotOutOfRange { lobe: usize, slot: usize, count: usize },
    CountMismatch { lobe: usize, expected: usize, got: usize },
    ArityMismatch { expected: usize, got: usize },
    /// Retained for API stability: in the canonical word model every
    /// adjacent pinch has a well-defined result, so this is never produced.
    IllegalPinch(String),
    BadBarycentric(String),
    Parse(String),
}

impl fmt::Display for CactusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CactusError::MissingLobe(k) => write!(f, "MissingLobe: label {k} absent"),
            CactusError::InterleavedLobes(i, j) => {
                write!(f, "InterleavedLobes: lobes {i} and {j} cross; dual graph has a cycle")
            }
            CactusError::BadParametrization(msg) => write!(f, "BadParametrization: {msg}"),
            CactusError::IndexOutOfRange { index, arity } => {
                write!(f, "IndexOutOfRange: lobe {index} of a {arity}-lobe cactus")
            }
            CactusError::SlotOutOfRange { lobe, slot, count } => {
                write!(f, "SlotOutOfRange: slot {slot} on lobe {lobe} with {count} points")
            }
            CactusError::CountMismatch { lobe, expected, got } => {
                write!(f, "CountMismatch: lobe {lobe} has {expected} points but refinement has {got}")
            }
            CactusError::ArityMismatch { expected, got } => {
                write!(f, "ArityMismatch: expected {expected} arguments, got {got}")
            }
            CactusError::IllegalPinch(msg) => write!(f, "IllegalPinch: {msg}"),
            CactusError::BadBarycentric(msg) => write!(f, "BadBarycentric: {msg}"),
            CactusError::Parse(msg) => write!(f, "Parse: {msg}"),
        }
    }
}

impl std::error::Error for CactusError {}

/// A marked point is either an intersection (shared node) or a plain point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PointRef {
    Node(usize),
    Plain(usize),
}

/// A cactus with a chosen set of marked points per lobe (slot 0 is the lobe
/// basepoint) including all special points. Canonical form is the global
/// traversal word; two spiny cacti are equal exactly when their words are.
#[derive(Clone, Debug)]
pub struct SpinyCactus {
    /// per lobe (index `label-1`): marks in parametrization order
    pub(crate) lobes: Vec<Vec<PointRef>>,
    /// per node: cyclic order of incident lobes (arrival via `order[i]`
    /// departs on `order[i+1]`)
    pub(crate) nodes: Vec<Vec<usize>>,
    pub(crate) global: Mark,
    word: Vec<Mark>,
}

impl PartialEq for SpinyCactus {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for SpinyCactus {}

impl std::hash::Hash for SpinyCactus {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

impl fmt::Display for SpinyCactus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.word.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

/// One intersection point: its multiplicity and incident lobes in cyclic
/// order, derived data only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub multiplicity: usize,
    pub lobes: Vec<usize>,
}

impl SpinyCactus {
    /// Assemble from structural data and derive the canonical word.
    pub(crate) fn from_structure(
        lobes: Vec<Vec<PointRef>>,
        nodes: Vec<Vec<usize>>,
        global: Mark,
    ) -> Result<SpinyCactus, CactusError> {
        validate_structure(&lobes, &nodes, &global)?;
        let word = derive_word(&lobes, &nodes, &global)?;
        Ok(SpinyCactus { lobes, nodes, global, word })
    }

    /// Parse a global word of marks; the word must be a valid traversal.
    pub fn from_word(word: &[Mark]) -> Result<SpinyCactus, CactusError> {
        let sc = spiny_from_word(word)?;
        debug_assert_eq!(sc.word, word, "canonical word must reproduce the input");
        Ok(sc)
    }

    /// The identity spiny single lobe with `points` marks and the global
    /// basepoint at slot `global_slot`.
    pub fn single_lobe(points: usize, global_slot: usize) -> Result<SpinyCactus, CactusError> {
        if points == 0 || global_slot >= points {
            return Err(CactusError::SlotOutOfRange { lobe: 1, slot: global_slot, count: points });
        }
        let lobes = vec![(0..points).map(PointRef::Plain).collect::<Vec<_>>()];
        SpinyCactus::from_structure(lobes, Vec::new(), Mark::new(1, global_slot))
    }

    pub fn lobe_count(&self) -> usize {
        self.lobes.len()
    }

    /// Point counts `(j_1, ..., j_n)`.
    pub fn counts(&self) -> Vec<usize> {
        self.lobes.iter().map(|l| l.len()).collect()
    }

    pub fn total_points(&self) -> usize {
        self.lobes.iter().map(|l| l.len()).sum()
    }

    pub fn global_basepoint(&self) -> Mark {
        self.global
    }

    /// The canonical global traversal word.
    pub fn word(&self) -> &[Mark] {
        &self.word
    }

    /// Position of the mark `(k, i)` in the global cyclic order; the
    /// traversal starts at position 0. Bijective onto `0..total_points()`.
    pub fn global_index(&self, lobe: usize, slot: usize) -> Result<usize, CactusError> {
        if lobe == 0 || lobe > self.lobes.len() || slot >= self.lobes[lobe - 1].len() {
            return Err(CactusError::SlotOutOfRange {
                lobe,
                slot,
                count: if lobe >= 1 && lobe <= self.lobes.len() { self.lobes[lobe - 1].len() } else { 0 },
            });
        }
        Ok(self
            .word
            .iter()
            .position(|m| m.lobe == lobe && m.slot == slot)
            .expect("every mark departs exactly once"))
    }

    /// Derived intersection data, in order of first traversal visit.
    pub fn nodes_info(&self) -> Vec<NodeInfo> {
        let mut seen = Vec::new();
        for m in &self.word {
            if let PointRef::Node(v) = self.lobes[m.lobe - 1][m.slot] {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen.into_iter()
            .map(|v| {
                let order = &self.nodes[v];
                // canonical start: the smallest incident lobe
                let start = order.iter().enumerate().min_by_key(|(_, l)| **l).map(|(i, _)| i).unwrap();
                let lobes: Vec<usize> =
                    (0..order.len()).map(|i| order[(start + i) % order.len()]).collect();
                NodeInfo { multiplicity: order.len(), lobes }
            })
            .collect()
    }

    /// Slot of node `v` on lobe `k`, if incident.
    pub(crate) fn node_slot(&self, v: usize, lobe: usize) -> Option<usize> {
        self.lobes[lobe - 1].iter().position(|p| matches!(p, PointRef::Node(u) if *u == v))
    }

    /// Whether the mark is a special point (lobe basepoint, global
    /// basepoint, or intersection).
    pub fn is_special(&self, m: Mark) -> bool {
        m.slot == 0
            || m == self.global
            || matches!(self.lobes[m.lobe - 1][m.slot], PointRef::Node(_))
    }

    /// Forget non-special marks, producing the minimal marking.
    pub fn minimalize(&self) -> SpinyCactus {
        let mut lobes: Vec<Vec<PointRef>> = Vec::with_capacity(self.lobes.len());
        let mut global = self.global;
        for (li, points) in self.lobes.iter().enumerate() {
            let lobe = li + 1;
            let mut kept = Vec::new();
            for (slot, p) in points.iter().enumerate() {
                let keep = self.is_special(Mark::new(lobe, slot));
                if self.global == Mark::new(lobe, slot) && keep {
                    global = Mark::new(lobe, kept.len());
                }
                if keep {
                    kept.push(*p);
                }
            }
            lobes.push(kept);
        }
        SpinyCactus::from_structure(lobes, self.nodes.clone(), global)
            .expect("minimal marking of a valid structure is valid")
    }

    /// Whether every mark is special.
    pub fn is_minimal(&self) -> bool {
        self.lobes
            .iter()
            .enumerate()
            .all(|(li, points)| (0..points.len()).all(|s| self.is_special(Mark::new(li + 1, s))))
    }

    /// Insert a new plain point on lobe `k` between slots `i` and `i+1`
    /// (cyclically). The underlying cactus is unchanged.
    pub fn degeneracy(&self, lobe: usize, slot: usize) -> Result<SpinyCactus, CactusError> {
        if lobe == 0 || lobe > self.lobes.len() {
            return Err(CactusError::IndexOutOfRange { index: lobe, arity: self.lobes.len() });
        }
        let j = self.lobes[lobe - 1].len();
        if slot >= j {
            return Err(CactusError::SlotOutOfRange { lobe, slot, count: j });
        }
        let mut lobes = self.lobes.clone();
        let fresh = self.fresh_plain_id();
        lobes[lobe - 1].insert(slot + 1, PointRef::Plain(fresh));
        let mut global = self.global;
        if global.lobe == lobe && global.slot > slot {
            global.slot += 1;
        }
        SpinyCactus::from_structure(lobes, self.nodes.clone(), global)
    }

    /// Pinch the adjacent points at slots `i` and `i+1` (cyclically) of lobe
    /// `k` together. When both points are intersections the cactus itself
    /// changes: the merged node takes the union of incidences, ordered by
    /// splicing the second cyclic order after the first.
    pub fn face(&self, lobe: usize, slot: usize) -> Result<SpinyCactus, CactusError> {
        if lobe == 0 || lobe > self.lobes.len() {
            return Err(CactusError::IndexOutOfRange { index: lobe, arity: self.lobes.len() });
        }
        let j = self.lobes[lobe - 1].len();
        if slot >= j || j < 2 {
            return Err(CactusError::SlotOutOfRange { lobe, slot, count: j });
        }
        let s1 = slot;
        let s2 = (slot + 1) % j;
        let p = self.lobes[lobe - 1][s1];
        let q = self.lobes[lobe - 1][s2];

        let mut lobes = self.lobes.clone();
        let mut nodes = self.nodes.clone();

        let merged: PointRef = match (p, q) {
            (PointRef::Plain(a), PointRef::Plain(_)) => PointRef::Plain(a),
            (PointRef::Node(u), PointRef::Plain(_)) => PointRef::Node(u),
            (PointRef::Plain(_), PointRef::Node(v)) => PointRef::Node(v),
            (PointRef::Node(u), PointRef::Node(v)) => {
                // splice: (k, u-tail after k, v-tail after k)
                let tail = |order: &[usize]| -> Vec<usize> {
                    let at = order.iter().position(|l| *l == lobe).unwrap();
                    (1..order.len()).map(|i| order[(at + i) % order.len()]).collect()
                };
                let mut merged_order = vec![lobe];
                merged_order.extend(tail(&nodes[u]));
                merged_order.extend(tail(&nodes[v]));
                nodes[u] = merged_order;
                for points in lobes.iter_mut() {
                    for pt in points.iter_mut() {
                        if matches!(pt, PointRef::Node(w) if *w == v) {
                            *pt = PointRef::Node(u);
                        }
                    }
                }
                nodes[v] = Vec::new();
                PointRef::Node(u)
            }
        };

        // drop one slot and place the merged point; a pinch across the
        // basepoint makes the merged point the new basepoint
        let keep_at = if s2 == 0 { 0 } else { s1 };
        let drop_at = if s2 == 0 { s1 } else { s2 };
        lobes[lobe - 1][keep_at] = merged;
        lobes[lobe - 1].remove(drop_at);

        let mut global = self.global;
        if global.lobe == lobe {
            let g = global.slot;
            if g == s1 || g == s2 {
                global.slot = keep_at;
            } else if g > drop_at {
                global.slot -= 1;
            }
        }

        let (lobes, nodes, global) = compact_nodes(lobes, nodes, global);
        SpinyCactus::from_structure(lobes, nodes, global)
    }

    /// A plain-point id unused by this structure.
    pub(crate) fn fresh_plain_id(&self) -> usize {
        self.lobes
            .iter()
            .flatten()
            .filter_map(|p| match p {
                PointRef::Plain(i) => Some(*i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Remove empty node entries, renumbering references.
pub(crate) fn compact_nodes(
    mut lobes: Vec<Vec<PointRef>>,
    nodes: Vec<Vec<usize>>,
    global: Mark,
) -> (Vec<Vec<PointRef>>, Vec<Vec<usize>>, Mark) {
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut kept = Vec::new();
    for (i, order) in nodes.into_iter().enumerate() {
        if !order.is_empty() {
            remap[i] = kept.len();
            kept.push(order);
        }
    }
    for points in lobes.iter_mut() {
        for pt in points.iter_mut() {
            if let PointRef::Node(v) = pt {
                *v = remap[*v];
            }
        }
    }
    (lobes, kept, global)
}

fn validate_structure(
    lobes: &[Vec<PointRef>],
    nodes: &[Vec<usize>],
    global: &Mark,
) -> Result<(), CactusError> {
    let n = lobes.len();
    if n == 0 {
        return Err(CactusError::Parse("a cactus needs at least one lobe".into()));
    }
    for (li, points) in lobes.iter().enumerate() {
        if points.is_empty() {
            return Err(CactusError::BadParametrization(format!("lobe {} has no points", li + 1)));
        }
    }
    if global.lobe == 0 || global.lobe > n || global.slot >= lobes[global.lobe - 1].len() {
        return Err(CactusError::BadParametrization("global basepoint out of range".into()));
    }
    for (v, order) in nodes.iter().enumerate() {
        if order.len() < 2 {
            return Err(CactusError::BadParametrization(format!(
                "node {v} has multiplicity {} < 2",
                order.len()
            )));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != order.len() {
            return Err(CactusError::BadParametrization(format!("node {v} lists a lobe twice")));
        }
        for &l in order {
            let count = lobes
                .get(l.wrapping_sub(1))
                .map(|pts| pts.iter().filter(|p| matches!(p, PointRef::Node(u) if *u == v)).count())
                .unwrap_or(0);
            if count != 1 {
                return Err(CactusError::BadParametrization(format!(
                    "node {v} occurs {count} times on lobe {l}"
                )));
            }
        }
    }
    for (li, points) in lobes.iter().enumerate() {
        for p in points {
            if let PointRef::Node(v) = p {
                if *v >= nodes.len() || !nodes[*v].contains(&(li + 1)) {
                    return Err(CactusError::BadParametrization(format!(
                        "lobe {} references node {v} that does not list it",
                        li + 1
                    )));
                }
            }
        }
    }
    // tree condition on the incidence graph (lobes ⊔ nodes)
    let v_count = n + nodes.len();
    let mut uf = UnionFind::new(v_count);
    let mut edges = 0usize;
    for (v, order) in nodes.iter().enumerate() {
        for &l in order {
            edges += 1;
            uf.union(l - 1, n + v);
        }
    }
    let components = {
        let mut roots = std::collections::BTreeSet::new();
        for i in 0..v_count {
            roots.insert(uf.find(i));
        }
        roots.len()
    };
    if n > 1 && components != 1 {
        return Err(CactusError::BadParametrization("configuration is not connected".into()));
    }
    if n > 1 && edges + 1 != v_count {
        let (a, b) = first_interleaved_pair(lobes, nodes).unwrap_or((1, 2));
        return Err(CactusError::InterleavedLobes(a, b));
    }
    Ok(())
}

/// Find two lobes whose incidences witness a dual-graph cycle.
fn first_interleaved_pair(lobes: &[Vec<PointRef>], nodes: &[Vec<usize>]) -> Option<(usize, usize)> {
    for a in 1..=lobes.len() {
        for b in a + 1..=lobes.len() {
            let shared = nodes.iter().filter(|order| order.contains(&a) && order.contains(&b)).count();
            if shared >= 2 {
                return Some((a, b));
            }
        }
    }
    None
}

fn derive_word(
    lobes: &[Vec<PointRef>],
    nodes: &[Vec<usize>],
    global: &Mark,
) -> Result<Vec<Mark>, CactusError> {
    let mut node_slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (li, points) in lobes.iter().enumerate() {
        for (slot, p) in points.iter().enumerate() {
            if let PointRef::Node(v) = p {
                node_slot.insert((*v, li + 1), slot);
            }
        }
    }
    let total: usize = lobes.iter().map(|l| l.len()).sum();
    let mut word = vec![*global];
    loop {
        let cur = *word.last().unwrap();
        let j = lobes[cur.lobe - 1].len();
        let end_slot = (cur.slot + 1) % j;
        let next = match lobes[cur.lobe - 1][end_slot] {
            PointRef::Plain(_) => Mark::new(cur.lobe, end_slot),
            PointRef::Node(v) => {
                let order = &nodes[v];
                let at = order.iter().position(|l| *l == cur.lobe).expect("validated incidence");
                let next_lobe = order[(at + 1) % order.len()];
                Mark::new(next_lobe, node_slot[&(v, next_lobe)])
            }
        };
        if next == *global {
            break;
        }
        if word.len() > total {
            return Err(CactusError::BadParametrization(
                "traversal does not close after covering every segment".into(),
            ));
        }
        word.push(next);
    }
    if word.len() != total {
        return Err(CactusError::BadParametrization(format!(
            "traversal covers {} of {} segments",
            word.len(),
            total
        )));
    }
    Ok(word)
}

/// Reconstruct a configuration from its global word.
fn spiny_from_word(word: &[Mark]) -> Result<SpinyCactus, CactusError> {
    if word.is_empty() {
        return Err(CactusError::Parse("empty word".into()));
    }
    let n = word.iter().map(|m| m.lobe).max().unwrap();
    if word.iter().any(|m| m.lobe == 0) {
        return Err(CactusError::Parse("lobe labels are 1-based".into()));
    }
    let mut counts = vec![0usize; n];
    for m in word {
        counts[m.lobe - 1] += 1;
    }
    for (li, c) in counts.iter().enumerate() {
        if *c == 0 {
            return Err(CactusError::MissingLobe(li + 1));
        }
    }
    // rotation condition per lobe: slots appear in cyclic order
    let mut per_lobe: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in word {
        per_lobe[m.lobe - 1].push(m.slot);
    }
    for (li, slots) in per_lobe.iter().enumerate() {
        let j = slots.len();
        for s in slots {
            if *s >= j {
                return Err(CactusError::SlotOutOfRange { lobe: li + 1, slot: *s, count: j });
            }
        }
        for w in slots.windows(2) {
            if w[1] != (w[0] + 1) % j {
                return Err(CactusError::BadParametrization(format!(
                    "lobe {} departs slot {} right after slot {}",
                    li + 1,
                    w[1],
                    w[0]
                )));
            }
        }
        let mut sorted = slots.clone();
        sorted.sort_unstable();
        if sorted != (0..j).collect::<Vec<_>>() {
            return Err(CactusError::BadParametrization(format!("lobe {} repeats a slot", li + 1)));
        }
    }
    // co-locate: endpoint of word[t] with the start of word[t+1]
    let mark_id = |m: &Mark| -> usize {
        let base: usize = counts.iter().take(m.lobe - 1).sum();
        base + m.slot
    };
    let total = word.len();
    let mut uf = UnionFind::new(total);
    let mut switches: Vec<(usize, usize, usize)> = Vec::new();
    for t in 0..total {
        let cur = word[t];
        let next = word[(t + 1) % total];
        let end = Mark::new(cur.lobe, (cur.slot + 1) % counts[cur.lobe - 1]);
        uf.union(mark_id(&end), mark_id(&next));
        if cur.lobe != next.lobe {
            switches.push((mark_id(&end), cur.lobe, next.lobe));
        } else if end.slot != next.slot {
            return Err(CactusError::BadParametrization(format!(
                "lobe {} jumps from slot {} to slot {}",
                cur.lobe, cur.slot, next.slot
            )));
        }
    }
    let mut class_members: BTreeMap<usize, Vec<Mark>> = BTreeMap::new();
    for m in word {
        class_members.entry(uf.find(mark_id(m))).or_default().push(*m);
    }
    let mut class_succ: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (id, from, to) in &switches {
        let root = uf.find(*id);
        let succ = class_succ.entry(root).or_default();
        if succ.insert(*from, *to).is_some() {
            return Err(CactusError::BadParametrization(format!(
                "lobe {from} departs the same point twice"
            )));
        }
    }
    let mut lobes: Vec<Vec<PointRef>> =
        counts.iter().map(|c| vec![PointRef::Plain(usize::MAX); *c]).collect();
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut plain_id = 0usize;
    for (root, members) in &class_members {
        let mut incident: Vec<usize> = members.iter().map(|m| m.lobe).collect();
        incident.sort_unstable();
        let mut distinct = incident.clone();
        distinct.dedup();
        if distinct.len() != incident.len() {
            // one circle through the same point twice: the dual graph has a cycle
            let l = incident.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]).unwrap_or(1);
            return Err(CactusError::InterleavedLobes(l, l));
        }
        if distinct.len() == 1 {
            for m in members {
                lobes[m.lobe - 1][m.slot] = PointRef::Plain(plain_id);
                plain_id += 1;
            }
            continue;
        }
        let succ = class_succ.get(root).ok_or_else(|| {
            CactusError::BadParametrization("intersection point with no switches".into())
        })?;
        let start = *distinct.first().unwrap();
        let mut order = vec![start];
        let mut cur = start;
        loop {
            let next = *succ.get(&cur).ok_or_else(|| {
                CactusError::BadParametrization(format!(
                    "lobe {cur} never departs an intersection it lies on"
                ))
            })?;
            if next == start {
                break;
            }
            order.push(next);
            cur = next;
            if order.len() > distinct.len() {
                return Err(CactusError::BadParametrization(
                    "intersection switches do not close into one cycle".into(),
                ));
            }
        }
        if order.len() != distinct.len() {
            return Err(CactusError::BadParametrization(
                "intersection switches split into several cycles".into(),
            ));
        }
        let v = nodes.len();
        nodes.push(order);
        for m in members {
            lobes[m.lobe - 1][m.slot] = PointRef::Node(v);
        }
    }
    let sc = SpinyCactus::from_structure(lobes, nodes, word[0])?;
    if sc.word != word {
        return Err(CactusError::BadParametrization(
            "word is not the canonical traversal of its configuration".into(),
        ));
    }
    Ok(sc)
}

/// A cactus: the combinatorial class of a configuration, stored as its
/// minimal marking (special points only).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cactus {
    spiny: SpinyCactus,
}

impl Cactus {
    /// The operad identity: one circle, global basepoint at the lobe
    /// basepoint.
    pub fn identity() -> Cactus {
        Cactus { spiny: SpinyCactus::single_lobe(1, 0).unwrap() }
    }

    /// Two circles joined at one point carrying every basepoint.
    pub fn figure_eight() -> Cactus {
        Cactus::from_spiny(SpinyCactus::from_word(&[Mark::new(1, 0), Mark::new(2, 0)]).unwrap())
    }

    /// Forget the marking of a spiny cactus down to the underlying cactus.
    pub fn from_spiny(sc: SpinyCactus) -> Cactus {
        Cactus { spiny: sc.minimalize() }
    }

    /// The minimal spiny marking (every special point, nothing else).
    pub fn minimal_spiny(&self) -> &SpinyCactus {
        &self.spiny
    }

    pub fn lobe_count(&self) -> usize {
        self.spiny.lobe_count()
    }

    pub fn nodes_info(&self) -> Vec<NodeInfo> {
        self.spiny.nodes_info()
    }

    pub fn global_word(&self) -> &[Mark] {
        self.spiny.word()
    }

    /// The arc word: lobe labels of the maximal same-lobe runs of the
    /// traversal, read from the global basepoint.
    pub fn arc_word(&self) -> Vec<usize> {
        let mut arcs = Vec::new();
        for m in self.spiny.word() {
            if arcs.last() != Some(&m.lobe) {
                arcs.push(m.lobe);
            }
        }
        arcs
    }

    /// Where each lobe basepoint sits relative to the arcs: the arc whose
    /// run contains the departure from slot 0, and whether the basepoint is
    /// strictly inside that arc.
    pub fn basepoints(&self) -> Vec<BasepointPos> {
        let word = self.spiny.word();
        let mut arc_of = Vec::with_capacity(word.len());
        let mut run_start = Vec::with_capacity(word.len());
        let mut arc = 0usize;
        for (t, m) in word.iter().enumerate() {
            if t == 0 {
                arc_of.push(0);
                run_start.push(true);
            } else if m.lobe == word[t - 1].lobe {
                arc_of.push(arc);
                run_start.push(false);
            } else {
                arc += 1;
                arc_of.push(arc);
                run_start.push(true);
            }
        }
        (1..=self.spiny.lobe_count())
            .map(|k| {
                let pos = self.spiny.global_index(k, 0).unwrap();
                BasepointPos { arc: arc_of[pos], interior: !run_start[pos] }
            })
            .collect()
    }

    /// Validate a raw arc word plus basepoint data into a canonical cactus.
    pub fn validate(arc_word: &[usize], basepoints: &[BasepointPos]) -> Result<Cactus, CactusError> {
        serde_io::cactus_from_arcs(arc_word, basepoints)
    }
}

impl fmt::Display for Cactus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self.arc_word().iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", arcs.join(","))
    }
}

/// Plain union–find.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    pub fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn w(pairs: &[(usize, usize)]) -> Vec<Mark> {
        pairs.iter().map(|(k, s)| Mark::new(*k, *s)).collect()
    }

    #[test]
    fn identity_cactus() {
        let id = Cactus::identity();
        assert_eq!(id.arc_word(), vec![1]);
        assert!(id.nodes_info().is_empty());
        assert_eq!(id.global_word(), &w(&[(1, 0)])[..]);
    }

    #[test]
    fn figure_eight_structure() {
        let f8 = Cactus::figure_eight();
        assert_eq!(f8.arc_word(), vec![1, 2]);
        let nodes = f8.nodes_info();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].multiplicity, 2);
        assert_eq!(nodes[0].lobes, vec![1, 2]);
    }

    #[test]
    fn single_lobe_offset_basepoint() {
        let sc = SpinyCactus::single_lobe(2, 1).unwrap();
        assert_eq!(sc.word(), &w(&[(1, 1), (1, 0)])[..]);
        let c = Cactus::from_spiny(sc);
        assert_eq!(c.arc_word(), vec![1]);
        assert_eq!(c.basepoints()[0], BasepointPos { arc: 0, interior: true });
    }

    #[test]
    fn three_lobe_chain_word_roundtrip() {
        // lobes 2 and 3 attached to lobe 1 at two distinct interior nodes
        let word = w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)]);
        let sc = SpinyCactus::from_word(&word).unwrap();
        assert_eq!(sc.lobe_count(), 3);
        assert_eq!(sc.counts(), vec![3, 1, 1]);
        let nodes = sc.nodes_info();
        assert_eq!(nodes.len(), 2);
        assert!(nodes.iter().all(|n| n.multiplicity == 2));
        let c = Cactus::from_spiny(sc.clone());
        assert_eq!(c.arc_word(), vec![1, 2, 1, 3, 1]);
        assert_eq!(c.minimal_spiny(), &sc);
    }

    #[test]
    fn interleaved_word_rejected() {
        let word = w(&[(1, 0), (2, 0), (1, 1), (2, 1)]);
        match SpinyCactus::from_word(&word) {
            Err(CactusError::InterleavedLobes(_, _)) | Err(CactusError::BadParametrization(_)) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn global_index_examples() {
        let word = w(&[(1, 0), (1, 1), (2, 0), (2, 1)]);
        let sc = SpinyCactus::from_word(&word).unwrap();
        assert_eq!(sc.global_index(1, 0).unwrap(), 0);
        assert_eq!(sc.global_index(1, 1).unwrap(), 1);
        assert_eq!(sc.global_index(2, 0).unwrap(), 2);
        assert_eq!(sc.global_index(2, 1).unwrap(), 3);
        let sl = SpinyCactus::single_lobe(4, 0).unwrap();
        for i in 0..4 {
            assert_eq!(sl.global_index(1, i).unwrap(), i);
        }
        assert!(sl.global_index(1, 4).is_err());
    }

    #[test]
    fn degeneracy_preserves_cactus() {
        let f8 = Cactus::figure_eight();
        let sc = f8.minimal_spiny().clone();
        let bigger = sc.degeneracy(2, 0).unwrap();
        assert_eq!(bigger.counts(), vec![1, 2]);
        assert_eq!(Cactus::from_spiny(bigger), f8);
        let sl = SpinyCactus::single_lobe(1, 0).unwrap();
        let two = sl.degeneracy(1, 0).unwrap();
        assert_eq!(two.counts(), vec![2]);
    }

    #[test]
    fn face_merges_junction_with_plain_point() {
        // figure-eight, j = (2,1): pinch slot 0 (junction) with slot 1 (plain)
        let word = w(&[(1, 0), (1, 1), (2, 0)]);
        let sc = SpinyCactus::from_word(&word).unwrap();
        let pinched = sc.face(1, 0).unwrap();
        assert_eq!(pinched.counts(), vec![1, 1]);
        assert_eq!(Cactus::from_spiny(pinched), Cactus::figure_eight());
        let sl = SpinyCactus::single_lobe(3, 0).unwrap();
        let merged = sl.face(1, 1).unwrap();
        assert_eq!(merged.counts(), vec![2]);
    }

    #[test]
    fn face_merging_two_nodes_concatenates_orders() {
        // pinching lobe 1's two junction nodes gives one node of multiplicity 3
        let word = w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)]);
        let sc = SpinyCactus::from_word(&word).unwrap();
        let pinched = sc.face(1, 1).unwrap();
        let nodes = pinched.nodes_info();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].multiplicity, 3);
        assert_eq!(nodes[0].lobes, vec![1, 2, 3]);
    }

    #[test]
    fn degeneracy_then_face_is_identity() {
        let samples = [
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0)])).unwrap(),
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)])).unwrap(),
            SpinyCactus::single_lobe(3, 1).unwrap(),
        ];
        for sc in &samples {
            for (li, points) in sc.lobes.iter().enumerate() {
                for slot in 0..points.len() {
                    let inserted = sc.degeneracy(li + 1, slot).unwrap();
                    let back = inserted.face(li + 1, slot).unwrap();
                    assert_eq!(&back, sc, "degeneracy/face at ({},{slot})", li + 1);
                }
            }
        }
    }

    #[test]
    fn minimalize_drops_plain_marks() {
        let word = w(&[(1, 0), (1, 1), (2, 0), (2, 1)]);
        let sc = SpinyCactus::from_word(&word).unwrap();
        let min = sc.minimalize();
        assert_eq!(min.counts(), vec![1, 1]);
        assert!(min.is_minimal());
        assert!(!sc.is_minimal());
    }

    #[test]
    fn global_basepoint_at_interior_mark_survives_minimalization() {
        let sc = SpinyCactus::single_lobe(3, 2).unwrap();
        let min = sc.minimalize();
        assert_eq!(min.counts(), vec![2]);
        assert_eq!(min.global_basepoint(), Mark::new(1, 1));
    }
}
