//! Text form of cacti and the arc-word validator.
//!
//! A cactus serializes as its arc word (lobe labels of the traversal runs)
//! plus, per lobe, the arc its basepoint belongs to and whether the
//! basepoint lies strictly inside that arc or at its start. A metric cactus
//! adds exact rational radii and per-slot positions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::field::{Field, Rationals};

use super::metric::MetricCactus;
use super::{Cactus, CactusError, Mark, PointRef, SpinyCactus, UnionFind};

/// Where a lobe basepoint sits: on arc `arc` (an index into the arc word),
/// either at the arc's start point or strictly inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasepointPos {
    pub arc: usize,
    pub interior: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CactusJson {
    pub word: Vec<usize>,
    pub basepoints: BTreeMap<String, BasepointPos>,
}

impl CactusJson {
    pub fn from_cactus(c: &Cactus) -> CactusJson {
        let basepoints = c
            .basepoints()
            .into_iter()
            .enumerate()
            .map(|(i, bp)| ((i + 1).to_string(), bp))
            .collect();
        CactusJson { word: c.arc_word(), basepoints }
    }

    pub fn to_cactus(&self) -> Result<Cactus, CactusError> {
        let n = *self.word.iter().max().ok_or_else(|| CactusError::Parse("empty word".into()))?;
        let mut basepoints = Vec::with_capacity(n);
        for k in 1..=n {
            let bp = self
                .basepoints
                .get(&k.to_string())
                .copied()
                .ok_or_else(|| CactusError::Parse(format!("missing basepoint for lobe {k}")))?;
            basepoints.push(bp);
        }
        cactus_from_arcs(&self.word, &basepoints)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricCactusJson {
    pub word: Vec<usize>,
    pub basepoints: BTreeMap<String, BasepointPos>,
    /// one exact rational per lobe, summing to 1
    pub radii: Vec<String>,
    /// per lobe: arc-length offset of each minimal mark from the lobe
    /// basepoint, slot order; the first entry must be `0`
    pub positions: BTreeMap<String, Vec<String>>,
}

impl MetricCactusJson {
    pub fn from_metric(mc: &MetricCactus) -> MetricCactusJson {
        let f = Rationals;
        let shape = CactusJson::from_cactus(mc.cactus());
        MetricCactusJson {
            word: shape.word,
            basepoints: shape.basepoints,
            radii: mc.radii().iter().map(|r| f.render(r)).collect(),
            positions: mc
                .positions()
                .iter()
                .enumerate()
                .map(|(i, offs)| ((i + 1).to_string(), offs.iter().map(|o| f.render(o)).collect()))
                .collect(),
        }
    }

    pub fn to_metric(&self) -> Result<MetricCactus, CactusError> {
        let f = Rationals;
        let shape = CactusJson { word: self.word.clone(), basepoints: self.basepoints.clone() };
        let cactus = shape.to_cactus()?;
        let parse = |s: &String| -> Result<BigRational, CactusError> {
            f.parse(s).map_err(|e| CactusError::Parse(e.to_string()))
        };
        let radii = self.radii.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let n = cactus.lobe_count();
        let mut positions = Vec::with_capacity(n);
        for k in 1..=n {
            let offs = self
                .positions
                .get(&k.to_string())
                .ok_or_else(|| CactusError::Parse(format!("missing positions for lobe {k}")))?;
            positions.push(offs.iter().map(parse).collect::<Result<Vec<_>, _>>()?);
        }
        MetricCactus::new(cactus, radii, positions)
    }
}

/// Build the canonical cactus from an arc word and basepoint placements.
pub fn cactus_from_arcs(arcs: &[usize], basepoints: &[BasepointPos]) -> Result<Cactus, CactusError> {
    if arcs.is_empty() {
        return Err(CactusError::Parse("empty word".into()));
    }
    let n = *arcs.iter().max().unwrap();
    if arcs.iter().any(|&l| l == 0) {
        return Err(CactusError::Parse("lobe labels are 1-based".into()));
    }
    for k in 1..=n {
        if !arcs.contains(&k) {
            return Err(CactusError::MissingLobe(k));
        }
    }
    if basepoints.len() != n {
        return Err(CactusError::Parse(format!(
            "expected {n} basepoints, got {}",
            basepoints.len()
        )));
    }
    let len = arcs.len();
    for t in 1..len {
        if arcs[t] == arcs[t - 1] {
            return Err(CactusError::BadParametrization(format!(
                "arcs {t} and {} carry the same lobe; runs must be maximal",
                t - 1
            )));
        }
    }
    // cheap noncrossing pre-check gives the informative error early
    if !super::enumerate::word_is_noncrossing(arcs) {
        let (a, b) = first_crossing(arcs).unwrap_or((1, 2));
        return Err(CactusError::InterleavedLobes(a, b));
    }

    // arcs of each lobe, in word (= parametrization) order
    let mut lobe_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, &l) in arcs.iter().enumerate() {
        lobe_arcs[l - 1].push(t);
    }

    // formal boundary points w(k, a) = end of the lobe's a-th arc; the point
    // id space is indexed per lobe
    let mut w_base = vec![0usize; n + 1];
    for k in 1..=n {
        w_base[k] = w_base[k - 1] + lobe_arcs[k - 1].len();
    }
    let w_id = |k: usize, a: usize| w_base[k - 1] + a;
    let total_w = w_base[n];

    // arc t of lobe k is the a(t)-th arc of that lobe
    let mut arc_rank = vec![0usize; len];
    for ranks in &lobe_arcs {
        for (a, &t) in ranks.iter().enumerate() {
            arc_rank[t] = a;
        }
    }
    // end of arc t = w(lobe, rank); start of arc t = w(lobe, rank-1 cyc)
    let end_of = |t: usize| w_id(arcs[t], arc_rank[t]);
    let start_of = |t: usize| {
        let m = lobe_arcs[arcs[t] - 1].len();
        w_id(arcs[t], (arc_rank[t] + m - 1) % m)
    };

    let mut uf = UnionFind::new(total_w);
    let mut switches: Vec<(usize, usize, usize)> = Vec::new();
    for t in 0..len {
        let next = (t + 1) % len;
        uf.union(end_of(t), start_of(next));
        if arcs[t] != arcs[next] {
            switches.push((end_of(t), arcs[t], arcs[next]));
        }
    }

    let mut class_members: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for k in 1..=n {
        for a in 0..lobe_arcs[k - 1].len() {
            class_members.entry(uf.find(w_id(k, a))).or_default().push((k, a));
        }
    }
    let mut class_succ: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (id, from, to) in &switches {
        let root = uf.find(*id);
        if class_succ.entry(root).or_default().insert(*from, *to).is_some() {
            return Err(CactusError::BadParametrization(format!(
                "lobe {from} departs the same point twice"
            )));
        }
    }

    // resolve each class into a node or a plain point
    #[derive(Clone, Copy)]
    enum Resolved {
        Node(usize),
        Plain(usize),
    }
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut resolved: BTreeMap<usize, Resolved> = BTreeMap::new();
    let mut plain_next = 0usize;
    for (root, members) in &class_members {
        let mut incident: Vec<usize> = members.iter().map(|(k, _)| *k).collect();
        incident.sort_unstable();
        let mut distinct = incident.clone();
        distinct.dedup();
        if distinct.len() != incident.len() {
            let l = incident.windows(2).find(|p| p[0] == p[1]).map(|p| p[0]).unwrap_or(1);
            return Err(CactusError::InterleavedLobes(l, l));
        }
        if distinct.len() == 1 {
            resolved.insert(*root, Resolved::Plain(plain_next));
            plain_next += 1;
            continue;
        }
        let succ = class_succ.get(root).ok_or_else(|| {
            CactusError::BadParametrization("intersection point with no switches".into())
        })?;
        let start = distinct[0];
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
        resolved.insert(*root, Resolved::Node(nodes.len()));
        nodes.push(order);
    }

    // per-lobe point lists starting at the lobe basepoint
    let mut lobes: Vec<Vec<PointRef>> = Vec::with_capacity(n);
    // remember, per lobe, which slot holds each boundary point
    let mut w_slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for k in 1..=n {
        let m = lobe_arcs[k - 1].len();
        let bp = basepoints[k - 1];
        let a = lobe_arcs[k - 1]
            .iter()
            .position(|&t| t == bp.arc)
            .ok_or_else(|| {
                CactusError::BadParametrization(format!(
                    "basepoint of lobe {k} references arc {} which is not an arc of that lobe",
                    bp.arc
                ))
            })?;
        // boundary points around the circle from the start of arc a:
        // w(a-1), w(a), ..., w(a-2); the basepoint is w(a-1) itself or a
        // fresh plain point just before the others
        let mut points: Vec<PointRef> = Vec::with_capacity(m + 1);
        let boundary_from = if bp.interior {
            points.push(PointRef::Plain(plain_next));
            plain_next += 1;
            a // w(a), w(a+1), ..., w(a-1)
        } else {
            a + m - 1 // w(a-1) first
        };
        for off in 0..m {
            let b = (boundary_from + off) % m;
            let root = uf.find(w_id(k, b));
            points.push(match resolved[&root] {
                Resolved::Node(v) => PointRef::Node(v),
                Resolved::Plain(p) => PointRef::Plain(p),
            });
            w_slot.insert((k, b), points.len() - 1);
        }
        lobes.push(points);
    }
    // global basepoint: the start of arc 0
    let g_lobe = arcs[0];
    let g_b = {
        let m = lobe_arcs[g_lobe - 1].len();
        (arc_rank[0] + m - 1) % m
    };
    let g_slot = w_slot[&(g_lobe, g_b)];
    let global = Mark::new(g_lobe, g_slot);

    let sc = SpinyCactus::from_structure(lobes, nodes, global)?;
    let c = Cactus::from_spiny(sc);
    // the construction must reproduce its own description
    if c.arc_word() != arcs {
        return Err(CactusError::BadParametrization(
            "arc word is not the canonical traversal of its configuration".into(),
        ));
    }
    if c.basepoints() != basepoints {
        return Err(CactusError::BadParametrization(
            "basepoint data inconsistent with the canonical traversal".into(),
        ));
    }
    Ok(c)
}

fn first_crossing(labels: &[usize]) -> Option<(usize, usize)> {
    let max = labels.iter().copied().max().unwrap_or(0);
    for a in 1..=max {
        for b in a + 1..=max {
            let filtered: Vec<usize> =
                labels.iter().copied().filter(|l| *l == a || *l == b).collect();
            // crossing iff the filtered cyclic word alternates >= 4 times
            let mut changes = 0;
            for i in 0..filtered.len() {
                if filtered[i] != filtered[(i + 1) % filtered.len()] {
                    changes += 1;
                }
            }
            if changes >= 4 {
                return Some((a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_single_lobe_variants() {
        let id = cactus_from_arcs(&[1], &[BasepointPos { arc: 0, interior: false }]).unwrap();
        assert_eq!(id, Cactus::identity());
        let offset = cactus_from_arcs(&[1], &[BasepointPos { arc: 0, interior: true }]).unwrap();
        assert_ne!(offset, id);
        assert_eq!(offset.minimal_spiny().counts(), vec![2]);
    }

    #[test]
    fn validate_three_lobe_example() {
        // lobes 2 and 3 attach to lobe 1 at distinct nodes of multiplicity 2
        let bps = vec![
            BasepointPos { arc: 0, interior: false },
            BasepointPos { arc: 1, interior: false },
            BasepointPos { arc: 3, interior: false },
        ];
        let c = cactus_from_arcs(&[1, 2, 1, 3], &bps).unwrap();
        assert_eq!(c.lobe_count(), 3);
        let nodes = c.nodes_info();
        assert_eq!(nodes.len(), 2);
        assert!(nodes.iter().all(|n| n.multiplicity == 2));
        assert_eq!(c.arc_word(), vec![1, 2, 1, 3]);
    }

    #[test]
    fn validate_rejects_interleaving() {
        let bps = vec![
            BasepointPos { arc: 0, interior: false },
            BasepointPos { arc: 1, interior: false },
        ];
        match cactus_from_arcs(&[1, 2, 1, 2], &bps) {
            Err(CactusError::InterleavedLobes(1, 2)) => {}
            other => panic!("expected InterleavedLobes(1,2), got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_missing_lobe() {
        let bps = vec![
            BasepointPos { arc: 0, interior: false },
            BasepointPos { arc: 0, interior: false },
            BasepointPos { arc: 0, interior: false },
        ];
        match cactus_from_arcs(&[1, 3, 1], &bps) {
            Err(CactusError::MissingLobe(2)) => {}
            other => panic!("expected MissingLobe(2), got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_adjacent_duplicate_arcs() {
        let bps = vec![BasepointPos { arc: 0, interior: false }];
        assert!(matches!(
            cactus_from_arcs(&[1, 1], &bps),
            Err(CactusError::BadParametrization(_))
        ));
    }

    #[test]
    fn roundtrip_through_json() {
        for c in super::super::enumerate_cacti(2) {
            let json = CactusJson::from_cactus(&c);
            let text = serde_json::to_string(&json).unwrap();
            let parsed: CactusJson = serde_json::from_str(&text).unwrap();
            assert_eq!(parsed.to_cactus().unwrap(), c);
        }
    }

    #[test]
    fn arc_constructor_covers_all_enumerated_cacti() {
        for c in super::super::enumerate_cacti(2).into_iter().chain(super::super::enumerate_cacti(3)) {
            let rebuilt = cactus_from_arcs(&c.arc_word(), &c.basepoints()).unwrap();
            assert_eq!(rebuilt, c);
        }
    }
}
