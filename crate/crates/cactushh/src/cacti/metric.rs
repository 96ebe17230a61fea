//! Metric cacti and the rational simplex realization map.
//!
//! A metric cactus fixes positive rational radii summing to 1 (each lobe's
//! circumference is its radius, so the traversal circle has circumference 1)
//! and exact arc-length offsets for every special point. The realization map
//! subdivides the traversal circle by the input dividing points, every
//! intersection incidence, and the global basepoint, and reads off the
//! interval lengths.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Cactus, CactusError, Mark, PointRef, SpinyCactus};

#[derive(Clone, Debug, PartialEq)]
pub struct MetricCactus {
    cactus: Cactus,
    radii: Vec<BigRational>,
    /// positions[k-1][s]: offset of the minimal mark (k, s) from the lobe
    /// basepoint, in [0, r_k); slot 0 is always 0
    positions: Vec<Vec<BigRational>>,
}

impl MetricCactus {
    pub fn new(
        cactus: Cactus,
        radii: Vec<BigRational>,
        positions: Vec<Vec<BigRational>>,
    ) -> Result<MetricCactus, CactusError> {
        let n = cactus.lobe_count();
        if radii.len() != n || positions.len() != n {
            return Err(CactusError::ArityMismatch { expected: n, got: radii.len() });
        }
        let total: BigRational = radii.iter().sum();
        if !total.is_one() {
            return Err(CactusError::Parse(format!("radii sum to {total}, not 1")));
        }
        if radii.iter().any(|r| !r.is_positive()) {
            return Err(CactusError::Parse("radii must be positive".into()));
        }
        let counts = cactus.minimal_spiny().counts();
        for k in 1..=n {
            let offs = &positions[k - 1];
            if offs.len() != counts[k - 1] {
                return Err(CactusError::CountMismatch {
                    lobe: k,
                    expected: counts[k - 1],
                    got: offs.len(),
                });
            }
            if !offs[0].is_zero() {
                return Err(CactusError::Parse(format!("lobe {k} basepoint offset must be 0")));
            }
            for w in offs.windows(2) {
                if w[1] <= w[0] {
                    return Err(CactusError::Parse(format!(
                        "lobe {k} offsets must strictly increase in slot order"
                    )));
                }
            }
            if offs.last().unwrap() >= &radii[k - 1] {
                return Err(CactusError::Parse(format!(
                    "lobe {k} offsets must stay below the radius"
                )));
            }
        }
        Ok(MetricCactus { cactus, radii, positions })
    }

    /// Equal radii, equally spaced special points: the canonical metric
    /// representative of a combinatorial class.
    pub fn equispaced(cactus: &Cactus) -> MetricCactus {
        let n = cactus.lobe_count();
        let r = BigRational::new(1.into(), (n as i64).into());
        let counts = cactus.minimal_spiny().counts();
        let positions = counts
            .iter()
            .map(|&j| {
                (0..j)
                    .map(|s| &r * BigRational::new((s as i64).into(), (j as i64).into()))
                    .collect()
            })
            .collect();
        MetricCactus::new(cactus.clone(), vec![r; n], positions).expect("equispaced data is valid")
    }

    pub fn cactus(&self) -> &Cactus {
        &self.cactus
    }
    pub fn radii(&self) -> &[BigRational] {
        &self.radii
    }
    pub fn positions(&self) -> &[Vec<BigRational>] {
        &self.positions
    }

    /// Global traversal time at which segment `(k, s)` starts, plus the
    /// segment's length.
    fn segment_times(&self) -> Vec<(Mark, BigRational, BigRational)> {
        let sp = self.cactus.minimal_spiny();
        let mut cum = BigRational::zero();
        let mut out = Vec::with_capacity(sp.total_points());
        for m in sp.word() {
            let j = self.positions[m.lobe - 1].len();
            let here = &self.positions[m.lobe - 1][m.slot];
            let len = if m.slot + 1 == j {
                &self.radii[m.lobe - 1] - here
            } else {
                &self.positions[m.lobe - 1][m.slot + 1] - here
            };
            out.push((*m, cum.clone(), len.clone()));
            cum += len;
        }
        debug_assert!(cum.is_one());
        out
    }
}

/// What produced a subdivision event of the realization.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventLabel {
    /// The global basepoint, always the first event.
    Global,
    /// The `idx`-th dividing point of a lobe (index 0 sits at the lobe
    /// basepoint).
    Dividing { lobe: usize, idx: usize },
    /// One incidence of an intersection point, seen on `lobe` at `slot`.
    Incidence { lobe: usize, slot: usize },
}

impl EventLabel {
    fn rank(&self) -> usize {
        match self {
            EventLabel::Global => 0,
            EventLabel::Dividing { .. } => 1,
            EventLabel::Incidence { .. } => 2,
        }
    }
}

/// The realization map with event labels exposed (used by the composition
/// compatibility check).
pub fn realize_labeled(
    mc: &MetricCactus,
    barycentric: &[Vec<BigRational>],
) -> Result<(Vec<BigRational>, Vec<EventLabel>), CactusError> {
    let sp = mc.cactus.minimal_spiny();
    let n = sp.lobe_count();
    if barycentric.len() != n {
        return Err(CactusError::ArityMismatch { expected: n, got: barycentric.len() });
    }
    for (k, coords) in barycentric.iter().enumerate() {
        if coords.is_empty() {
            return Err(CactusError::BadBarycentric(format!("lobe {} needs >= 1 coordinate", k + 1)));
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(CactusError::BadBarycentric(format!("lobe {} has a negative coordinate", k + 1)));
        }
        let total: BigRational = coords.iter().sum();
        if !total.is_one() {
            return Err(CactusError::BadBarycentric(format!(
                "lobe {} coordinates sum to {total}, not 1",
                k + 1
            )));
        }
    }
    let segs = mc.segment_times();
    let seg_start = |mark: &Mark| -> &BigRational {
        &segs.iter().find(|(m, _, _)| m == mark).expect("segment exists").1
    };
    let mut events: Vec<(BigRational, EventLabel)> = Vec::new();
    events.push((BigRational::zero(), EventLabel::Global));
    // dividing points at the cumulative sums, scaled by the radius
    for (k, coords) in barycentric.iter().enumerate() {
        let r = &mc.radii[k];
        let mut offset = BigRational::zero();
        for idx in 0..coords.len() {
            if idx > 0 {
                offset += &coords[idx - 1] * r;
            }
            // host segment: the largest slot whose position is <= offset
            let offs = &mc.positions[k];
            let mut slot = offs.len() - 1;
            for (s, o) in offs.iter().enumerate() {
                if o <= &offset {
                    slot = s;
                } else {
                    break;
                }
            }
            let time = seg_start(&Mark::new(k + 1, slot)) + (&offset - &offs[slot]);
            events.push((time, EventLabel::Dividing { lobe: k + 1, idx }));
        }
    }
    // one incidence event per node per incident lobe
    for (m, start, _) in &segs {
        if matches!(sp.lobes[m.lobe - 1][m.slot], PointRef::Node(_)) {
            events.push((start.clone(), EventLabel::Incidence { lobe: m.lobe, slot: m.slot }));
        }
    }
    events.sort_by(|(t1, l1), (t2, l2)| t1.cmp(t2).then(l1.rank().cmp(&l2.rank())).then(l1.cmp(l2)));
    debug_assert_eq!(events[0].1, EventLabel::Global);
    let mut coords = Vec::with_capacity(events.len());
    for i in 0..events.len() {
        let next = if i + 1 == events.len() { BigRational::one() } else { events[i + 1].0.clone() };
        coords.push(next - &events[i].0);
    }
    let labels = events.into_iter().map(|(_, l)| l).collect();
    Ok((coords, labels))
}

/// The realization map: subdivision lengths of the unit traversal circle,
/// a rational point of the simplex of dimension `Σj_k - 1 + m` where `m` is
/// one plus the total multiplicity of the intersection points.
pub fn realize(
    mc: &MetricCactus,
    barycentric: &[Vec<BigRational>],
) -> Result<Vec<BigRational>, CactusError> {
    realize_labeled(mc, barycentric).map(|(coords, _)| coords)
}

/// Metric operadic composition `γ(c; d_1, ..., d_n)`.
///
/// Lobe `i` is scaled to radius `r_i` and wrapped onto `d_i`; the special
/// points of lobe `i` land at their exact traversal offsets. When an image
/// coincides with an existing special point the two merge, the host's cyclic
/// order first.
pub fn metric_compose(c: &MetricCactus, ds: &[MetricCactus]) -> Result<MetricCactus, CactusError> {
    let csp = c.cactus.minimal_spiny();
    let n = csp.lobe_count();
    if ds.len() != n {
        return Err(CactusError::ArityMismatch { expected: n, got: ds.len() });
    }
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0usize;
    for d in ds {
        offsets.push(acc);
        acc += d.cactus.lobe_count();
    }
    let total_lobes = acc;

    // collect, per composite lobe, the points to place: (offset, key)
    // key identifies the source so collisions can merge cyclic orders
    #[derive(Clone, Debug, PartialEq)]
    enum Src {
        DNode { d: usize, node: usize },
        DPlain { d: usize, lobe: usize, slot: usize },
        CNode { node: usize },
        CGlobal,
    }
    struct Placed {
        offset: BigRational,
        srcs: Vec<Src>,
    }
    let mut per_lobe: Vec<Vec<Placed>> = (0..total_lobes).map(|_| Vec::new()).collect();
    let mut place = |lobe: usize, offset: BigRational, src: Src| {
        let list = &mut per_lobe[lobe - 1];
        if let Some(p) = list.iter_mut().find(|p| p.offset == offset) {
            p.srcs.push(src);
        } else {
            list.push(Placed { offset, srcs: vec![src] });
        }
    };

    // native points of each insert, scaled
    for (i, d) in ds.iter().enumerate() {
        let scale = &c.radii[i];
        let dsp = d.cactus.minimal_spiny();
        for (li, points) in dsp.lobes.iter().enumerate() {
            for (slot, p) in points.iter().enumerate() {
                let lobe = offsets[i] + li + 1;
                let offset = &d.positions[li][slot] * scale;
                let src = match p {
                    PointRef::Node(v) => Src::DNode { d: i, node: *v },
                    PointRef::Plain(_) => Src::DPlain { d: i, lobe: li + 1, slot },
                };
                place(lobe, offset, src);
            }
        }
    }

    // images of the special points of c: walk each insert's timeline
    let locate = |i: usize, tau: &BigRational| -> (usize, BigRational) {
        // position tau in [0,1) on d_i's unit traversal -> (composite lobe, scaled offset)
        let segs = ds[i].segment_times();
        for (m, start, len) in &segs {
            if tau >= start && tau < &(start + len) {
                let local = &ds[i].positions[m.lobe - 1][m.slot] + (tau - start);
                return (offsets[i] + m.lobe, local * &c.radii[i]);
            }
        }
        unreachable!("tau in [0,1) lies in some segment");
    };
    for (v, _) in csp.nodes.iter().enumerate() {
        for &l in &csp.nodes[v] {
            let slot = csp.node_slot(v, l).unwrap();
            let tau = &c.positions[l - 1][slot] / &c.radii[l - 1];
            let (lobe, off) = locate(l - 1, &tau);
            place(lobe, off, Src::CNode { node: v });
        }
    }
    {
        let g = csp.global;
        let tau = &c.positions[g.lobe - 1][g.slot] / &c.radii[g.lobe - 1];
        let (lobe, off) = locate(g.lobe - 1, &tau);
        place(lobe, off, Src::CGlobal);
    }

    // assemble the composite structure: resolve merged points into nodes
    for lobe_points in per_lobe.iter_mut() {
        lobe_points.sort_by(|a, b| a.offset.cmp(&b.offset));
    }
    // map: merged point identity -> (node-to-be?) incidences in cyclic order
    // a point is an intersection iff it lies on >= 2 composite lobes
    #[derive(Default)]
    struct Merged {
        incidences: Vec<(usize, usize)>, // (composite lobe, slot)
        order_sources: Vec<Src>,
    }
    let mut merged: Vec<Merged> = Vec::new();
    // identity of a merged point: the set of "primary" sources; two placed
    // entries on different lobes are the same point iff they share a source
    let mut src_to_merged: Vec<(Src, usize)> = Vec::new();
    let mut lobes_out: Vec<Vec<Option<usize>>> = Vec::new(); // merged ids per slot
    for (li, lobe_points) in per_lobe.iter().enumerate() {
        let mut slots = Vec::new();
        for p in lobe_points {
            // find an existing merged point sharing any source
            let mut id = None;
            for s in &p.srcs {
                if let Some((_, m)) = src_to_merged.iter().find(|(s2, _)| s2 == s) {
                    id = Some(*m);
                    break;
                }
            }
            let id = match id {
                Some(id) => id,
                None => {
                    merged.push(Merged::default());
                    merged.len() - 1
                }
            };
            for s in &p.srcs {
                if !src_to_merged.iter().any(|(s2, _)| s2 == s) {
                    src_to_merged.push((s.clone(), id));
                }
            }
            merged[id].incidences.push((li + 1, slots.len()));
            for s in &p.srcs {
                if !merged[id].order_sources.contains(s) {
                    merged[id].order_sources.push(s.clone());
                }
            }
            slots.push(Some(id));
        }
        lobes_out.push(slots);
    }

    // cyclic orders: expand each source's order, hosts first
    let relabel_d = |i: usize, l: usize| offsets[i] + l;
    let mut node_orders: Vec<Vec<usize>> = Vec::new();
    let mut merged_to_node: Vec<Option<usize>> = vec![None; merged.len()];
    for (id, m) in merged.iter().enumerate() {
        if m.incidences.len() < 2 {
            continue;
        }
        // build the order: start from the d-node order if present, else from
        // the c-node order with lobes mapped through their landing lobes
        let mut order: Vec<usize> = Vec::new();
        let mut push_unique = |order: &mut Vec<usize>, l: usize| {
            if !order.contains(&l) {
                order.push(l);
            }
        };
        for s in &m.order_sources {
            match s {
                Src::DNode { d, node } => {
                    for &l in &ds[*d].cactus.minimal_spiny().nodes[*node] {
                        push_unique(&mut order, relabel_d(*d, l));
                    }
                }
                Src::CNode { node } => {
                    for &l in &csp.nodes[*node] {
                        // landing lobe of this incidence
                        let slot = csp.node_slot(*node, l).unwrap();
                        let tau = &c.positions[l - 1][slot] / &c.radii[l - 1];
                        let (lobe, _) = locate(l - 1, &tau);
                        push_unique(&mut order, lobe);
                    }
                }
                _ => {}
            }
        }
        debug_assert_eq!(order.len(), m.incidences.len(), "every incidence ordered");
        merged_to_node.push(None);
        merged_to_node[id] = Some(node_orders.len());
        node_orders.push(order);
    }

    // final structure
    let mut plain_next = 0usize;
    let mut lobes_refs: Vec<Vec<PointRef>> = Vec::new();
    for slots in &lobes_out {
        let refs = slots
            .iter()
            .map(|id| match merged_to_node[id.unwrap()] {
                Some(v) => PointRef::Node(v),
                None => {
                    plain_next += 1;
                    PointRef::Plain(plain_next - 1)
                }
            })
            .collect();
        lobes_refs.push(refs);
    }
    // global: the merged point with the CGlobal source, on the lobe where it landed
    let g_id = src_to_merged.iter().find(|(s, _)| *s == Src::CGlobal).unwrap().1;
    let g_lobe_landing = {
        let g = csp.global;
        let tau = &c.positions[g.lobe - 1][g.slot] / &c.radii[g.lobe - 1];
        locate(g.lobe - 1, &tau).0
    };
    let g_slot = lobes_out[g_lobe_landing - 1]
        .iter()
        .position(|id| id.unwrap() == g_id)
        .expect("global point placed");
    let global = Mark::new(g_lobe_landing, g_slot);

    let sc = SpinyCactus::from_structure(lobes_refs, node_orders, global)?;
    let cactus = Cactus::from_spiny(sc);

    // metric data for the composite, indexed by ITS minimal marking
    let radii_out: Vec<BigRational> = ds
        .iter()
        .enumerate()
        .flat_map(|(i, d)| d.radii.iter().map(move |r| r * &c.radii[i]))
        .collect();
    let msp = cactus.minimal_spiny();
    let mut positions_out: Vec<Vec<BigRational>> = Vec::new();
    for (li, points) in msp.lobes.iter().enumerate() {
        // match the minimal marks back to the placed points by offset order:
        // the minimal marking keeps a subset of the placed points (dropped
        // plain marks were non-special), in the same cyclic order from the
        // basepoint, which sits at offset 0
        let placed = &per_lobe[li];
        let specials: Vec<&Placed> = placed
            .iter()
            .filter(|p| {
                let id = src_to_merged.iter().find(|(s, _)| p.srcs.contains(s)).unwrap().1;
                merged_to_node[id].is_some() || id == g_id || p.offset.is_zero()
            })
            .collect();
        if specials.len() != points.len() {
            return Err(CactusError::Parse(
                "internal: special point count mismatch in metric composition".into(),
            ));
        }
        positions_out.push(specials.iter().map(|p| p.offset.clone()).collect());
    }
    MetricCactus::new(cactus, radii_out, positions_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn realize_single_lobe_basepoint_start() {
        // single lobe, j = (2), global basepoint at the lobe basepoint,
        // input (1/2, 1/2): the added global point coincides with the first
        // dividing point, so the first coordinate is zero
        let mc = MetricCactus::equispaced(&Cactus::identity());
        let out = realize(&mc, &[vec![q(1, 2), q(1, 2)]]).unwrap();
        assert_eq!(out, vec![q(0, 1), q(1, 2), q(1, 2)]);
    }

    #[test]
    fn realize_figure_eight_pattern() {
        // figure-eight, radii (1/2,1/2), j = (1,1): the junction contributes
        // two zero-length slots next to the two lobe lengths, and the global
        // point another zero
        let mc = MetricCactus::equispaced(&Cactus::figure_eight());
        let (out, labels) = realize_labeled(&mc, &[vec![q(1, 1)], vec![q(1, 1)]]).unwrap();
        assert_eq!(out, vec![q(0, 1), q(0, 1), q(1, 2), q(0, 1), q(1, 2)]);
        assert_eq!(out.len(), 2 + (1 + 2)); // Σj + m with m = 1 + total multiplicity
        assert_eq!(labels[0], EventLabel::Global);
        let total: BigRational = out.iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn realize_rejects_bad_barycentric() {
        let mc = MetricCactus::equispaced(&Cactus::identity());
        assert!(matches!(
            realize(&mc, &[vec![q(1, 2), q(1, 3)]]),
            Err(CactusError::BadBarycentric(_))
        ));
        assert!(matches!(
            realize(&mc, &[vec![q(3, 2), q(-1, 2)]]),
            Err(CactusError::BadBarycentric(_))
        ));
    }

    #[test]
    fn realize_sums_to_one_on_samples() {
        for c in super::super::enumerate_cacti(2).into_iter().take(10) {
            let mc = MetricCactus::equispaced(&c);
            let inputs: Vec<Vec<BigRational>> = c
                .minimal_spiny()
                .counts()
                .iter()
                .map(|_| vec![q(1, 3), q(2, 3)])
                .collect();
            let out = realize(&mc, &inputs).unwrap();
            let total: BigRational = out.iter().sum();
            assert!(total.is_one());
            assert!(out.iter().all(|t| !t.is_negative()));
        }
    }

    #[test]
    fn metric_compose_identity() {
        let f8 = Cactus::figure_eight();
        let mc = MetricCactus::equispaced(&f8);
        let id = MetricCactus::equispaced(&Cactus::identity());
        let done = metric_compose(&mc, &[id.clone(), id]).unwrap();
        assert_eq!(done.cactus(), &f8);
        assert_eq!(done.radii(), mc.radii());
    }

    #[test]
    fn metric_compose_figure_eights() {
        let f8 = Cactus::figure_eight();
        let mc = MetricCactus::equispaced(&f8);
        let id = MetricCactus::equispaced(&Cactus::identity());
        let out = metric_compose(&mc, &[mc.clone(), id]).unwrap();
        assert_eq!(out.cactus().arc_word(), vec![1, 2, 3]);
        assert_eq!(out.radii(), &[q(1, 4), q(1, 4), q(1, 2)]);
    }
}
