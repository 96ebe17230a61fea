//! Decomposition of a cactus into elementary generators: a marked circle,
//! a sequence of two-lobe pinches carrying insertion data, and a final
//! relabeling.
//!
//! Each pinch step stores the two-lobe spiny element to compose with; its
//! marked points say exactly where the points of the pinched lobe land, so
//! recomposition through the count-matched spiny composition reproduces the
//! input on the nose. A cactus with `n` lobes always decomposes with exactly
//! `n-1` pinch steps.

use std::collections::BTreeSet;

use super::compose::{relabel_spiny, spiny_compose};
use super::{compact_nodes, Cactus, CactusError, Mark, PointRef, SpinyCactus};

/// One elementary operation of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// The starting one-lobe marked circle (a reparametrization marker when
    /// its global basepoint sits away from the lobe basepoint).
    Base(SpinyCactus),
    /// Compose at lobe `at` with a two-lobe spiny element.
    Pinch { at: usize, insert: SpinyCactus },
    /// Final relabeling of lobes (`perm[old-1] = new`).
    Relabel(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub steps: Vec<Step>,
}

impl Decomposition {
    pub fn pinch_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Pinch { .. })).count()
    }
}

/// Rebuild a cactus from its decomposition.
pub fn recompose(dec: &Decomposition) -> Result<Cactus, CactusError> {
    let mut steps = dec.steps.iter();
    let mut current = match steps.next() {
        None => return Ok(Cactus::identity()),
        Some(Step::Base(b)) => {
            if b.lobe_count() != 1 {
                return Err(CactusError::Parse("base step must have one lobe".into()));
            }
            b.clone()
        }
        Some(_) => return Err(CactusError::Parse("decomposition must start with a base".into())),
    };
    for step in steps {
        match step {
            Step::Base(_) => return Err(CactusError::Parse("base step after the start".into())),
            Step::Pinch { at, insert } => {
                if insert.lobe_count() != 2 {
                    return Err(CactusError::Parse("pinch insert must have two lobes".into()));
                }
                let counts = current.counts();
                let refinements: Vec<SpinyCactus> = (1..=current.lobe_count())
                    .map(|l| {
                        if l == *at {
                            Ok(insert.clone())
                        } else {
                            SpinyCactus::single_lobe(counts[l - 1], 0)
                        }
                    })
                    .collect::<Result<_, _>>()?;
                current = spiny_compose(&current, &refinements)?;
            }
            Step::Relabel(perm) => {
                current = relabel_spiny(&current, perm)?;
            }
        }
    }
    Ok(Cactus::from_spiny(current))
}

/// Decompose into a base circle, `n-1` pinches, and a relabeling.
pub fn decompose_generators(c: &Cactus) -> Decomposition {
    let n = c.lobe_count();
    if n == 1 {
        if c == &Cactus::identity() {
            return Decomposition::default();
        }
        return Decomposition { steps: vec![Step::Base(c.minimal_spiny().clone())] };
    }

    // Phase 1: plan the merge order on the dual tree, ignoring labels.
    let plan = plan_merges(c);

    // Phase 2: relabel so that every planned merge joins consecutive labels.
    let perm_to_nice: Vec<usize> = {
        let mut p = vec![0usize; n];
        for (nice_minus_1, orig) in plan.in_order.iter().enumerate() {
            p[orig - 1] = nice_minus_1 + 1;
        }
        p
    };
    let perm_from_nice: Vec<usize> = {
        let mut p = vec![0usize; n];
        for (orig, nice) in perm_to_nice.iter().enumerate() {
            p[nice - 1] = orig + 1;
        }
        p
    };
    let mut current = relabel_spiny(c.minimal_spiny(), &perm_to_nice).expect("relabeling is valid");

    // Phase 3: execute the merges, recording the extracted pinch elements.
    // Track which original lobes each current label carries.
    let mut groups: Vec<BTreeSet<usize>> =
        plan.in_order.iter().map(|orig| BTreeSet::from([*orig])).collect();
    let mut pinches: Vec<Step> = Vec::new();
    for (a_rep, b_rep) in &plan.merges {
        let a_cur = groups.iter().position(|g| g.contains(a_rep)).unwrap() + 1;
        let b_cur = groups.iter().position(|g| g.contains(b_rep)).unwrap() + 1;
        assert_eq!(b_cur, a_cur + 1, "planned merges join consecutive labels");
        let (merged, insert) = unpinch(&current, a_cur);
        pinches.push(Step::Pinch { at: a_cur, insert });
        current = merged;
        let b_set = groups.remove(b_cur - 1);
        groups[a_cur - 1].extend(b_set);
    }
    assert_eq!(current.lobe_count(), 1);

    let mut steps = vec![Step::Base(current)];
    steps.extend(pinches.into_iter().rev());
    if perm_from_nice.iter().enumerate().any(|(i, p)| *p != i + 1) {
        steps.push(Step::Relabel(perm_from_nice));
    }
    Decomposition { steps }
}

struct MergePlan {
    /// merges in execution order, each identified by the smallest original
    /// label of the two participating groups
    merges: Vec<(usize, usize)>,
    /// original labels in the in-order of the merge tree
    in_order: Vec<usize>,
}

#[derive(Clone)]
enum MergeTree {
    Leaf(usize),
    Node(Box<MergeTree>, Box<MergeTree>),
}

impl MergeTree {
    fn leaves(&self, out: &mut Vec<usize>) {
        match self {
            MergeTree::Leaf(l) => out.push(*l),
            MergeTree::Node(a, b) => {
                a.leaves(out);
                b.leaves(out);
            }
        }
    }
}

/// Walk the dual tree, repeatedly absorbing a leaf lobe into a neighbor.
fn plan_merges(c: &Cactus) -> MergePlan {
    let sc = c.minimal_spiny();
    let n = sc.lobe_count();
    // group state: index = group id; orders hold group ids
    let mut alive: Vec<bool> = vec![true; n];
    let mut reps: Vec<usize> = (1..=n).collect(); // min original label per group
    let mut trees: Vec<Option<MergeTree>> = (1..=n).map(|l| Some(MergeTree::Leaf(l))).collect();
    let mut node_orders: Vec<Vec<usize>> =
        sc.nodes.iter().map(|order| order.iter().map(|l| l - 1).collect()).collect();
    let mut merges = Vec::new();

    for _ in 0..n - 1 {
        // leaf group: alive, incident to exactly one live node
        let incidences = |g: usize, orders: &[Vec<usize>]| -> Vec<usize> {
            orders
                .iter()
                .enumerate()
                .filter(|(_, o)| o.len() >= 2 && o.contains(&g))
                .map(|(i, _)| i)
                .collect()
        };
        let leaf = (0..n)
            .filter(|g| alive[*g])
            .filter(|g| incidences(*g, &node_orders).len() == 1)
            .max_by_key(|g| reps[*g])
            .expect("a tree with two or more lobes has a leaf lobe");
        let w = incidences(leaf, &node_orders)[0];
        let order = node_orders[w].clone();
        let pos = order.iter().position(|g| *g == leaf).unwrap();
        let host = order[(pos + order.len() - 1) % order.len()];

        // record the merge as (host representative, leaf representative)
        merges.push((reps[host], reps[leaf]));

        // split w into the part between host..leaf and leaf..host
        let host_pos = order.iter().position(|g| *g == host).unwrap();
        let mut alpha = Vec::new();
        let mut i = (host_pos + 1) % order.len();
        while order[i] != leaf {
            alpha.push(order[i]);
            i = (i + 1) % order.len();
        }
        let mut beta = Vec::new();
        let mut i = (pos + 1) % order.len();
        while order[i] != host {
            beta.push(order[i]);
            i = (i + 1) % order.len();
        }
        node_orders[w].clear();
        if !alpha.is_empty() {
            let mut o = vec![host];
            o.extend(alpha);
            node_orders.push(o);
        }
        if !beta.is_empty() {
            let mut o = vec![host];
            o.extend(beta);
            node_orders.push(o);
        }
        let leaf_tree = trees[leaf].take().unwrap();
        let host_tree = trees[host].take().unwrap();
        trees[host] = Some(MergeTree::Node(Box::new(host_tree), Box::new(leaf_tree)));
        reps[host] = reps[host].min(reps[leaf]);
        alive[leaf] = false;
    }

    let root = (0..n).find(|g| alive[*g]).unwrap();
    let mut in_order = Vec::new();
    trees[root].as_ref().unwrap().leaves(&mut in_order);
    MergePlan { merges, in_order }
}

/// Merge lobes `a` and `a+1` (which meet at a node) into one lobe labeled
/// `a`, returning the merged cactus and the extracted two-lobe element whose
/// marks record where every point of the merged lobe lands.
fn unpinch(sc: &SpinyCactus, a: usize) -> (SpinyCactus, SpinyCactus) {
    let b = a + 1;
    let w = (0..sc.nodes.len())
        .find(|v| sc.nodes[*v].contains(&a) && sc.nodes[*v].contains(&b))
        .expect("merged lobes share a node");
    let slot_a_w = sc.node_slot(w, a).unwrap();
    let slot_b_w = sc.node_slot(w, b).unwrap();

    // the extracted element: lobes a, b with their current marks, all other
    // structure forgotten to plain points
    let insert = {
        let mut fresh = 0usize;
        let mut map_points = |points: &[PointRef]| -> Vec<PointRef> {
            points
                .iter()
                .map(|p| match p {
                    PointRef::Node(v) if *v == w => PointRef::Node(0),
                    _ => {
                        fresh += 1;
                        PointRef::Plain(fresh - 1)
                    }
                })
                .collect()
        };
        let lobes = vec![map_points(&sc.lobes[a - 1]), map_points(&sc.lobes[b - 1])];
        SpinyCactus::from_structure(lobes, vec![vec![1, 2]], Mark::new(1, 0))
            .expect("extracted pair is a valid two-lobe cactus")
    };

    // relabel for the merged cactus: b disappears, higher labels shift down
    let relab = |l: usize| if l <= a { l } else { l - 1 };

    // split w's cyclic order at a and b
    let order = &sc.nodes[w];
    let a_pos = order.iter().position(|l| *l == a).unwrap();
    let b_pos = order.iter().position(|l| *l == b).unwrap();
    let mut alpha = Vec::new();
    let mut i = (a_pos + 1) % order.len();
    while i != b_pos {
        alpha.push(relab(order[i]));
        i = (i + 1) % order.len();
    }
    let mut beta = Vec::new();
    let mut i = (b_pos + 1) % order.len();
    while i != a_pos {
        beta.push(relab(order[i]));
        i = (i + 1) % order.len();
    }

    // new node table: every node except w (relabeled), then p and q
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut node_map = vec![usize::MAX; sc.nodes.len()];
    for (v, ord) in sc.nodes.iter().enumerate() {
        if v == w {
            continue;
        }
        node_map[v] = nodes.len();
        nodes.push(ord.iter().map(|l| relab(*l)).collect());
    }
    let mut fresh_plain = sc.fresh_plain_id();
    let mut fresh = || {
        fresh_plain += 1;
        PointRef::Plain(fresh_plain - 1)
    };
    let p_ref = if alpha.is_empty() {
        fresh()
    } else {
        let mut o = vec![a];
        o.extend(alpha.iter().copied());
        nodes.push(o);
        PointRef::Node(nodes.len() - 1)
    };
    let q_ref = if beta.is_empty() {
        fresh()
    } else {
        let mut o = vec![a];
        o.extend(beta.iter().copied());
        nodes.push(o);
        PointRef::Node(nodes.len() - 1)
    };

    // the merged lobe: follow the element's traversal, pulling marks back;
    // the two visits of w pull back to q (departure on a) and p (entry into b)
    let mut merged_points: Vec<PointRef> = Vec::new();
    let mut source_slot_of: Vec<(usize, usize)> = Vec::new(); // (element lobe, slot)
    for m in insert.word() {
        let (src_lobe, src_slot) = (m.lobe, m.slot);
        let reference = if src_lobe == 1 && src_slot == slot_a_w {
            q_ref
        } else if src_lobe == 2 && src_slot == slot_b_w {
            p_ref
        } else {
            let orig = if src_lobe == 1 { sc.lobes[a - 1][src_slot] } else { sc.lobes[b - 1][src_slot] };
            match orig {
                PointRef::Node(v) => PointRef::Node(node_map[v]),
                PointRef::Plain(x) => PointRef::Plain(x),
            }
        };
        merged_points.push(reference);
        source_slot_of.push((src_lobe, src_slot));
    }

    // other lobes: retarget w references to p or q
    let mut lobes: Vec<Vec<PointRef>> = Vec::new();
    for (li, points) in sc.lobes.iter().enumerate() {
        let l = li + 1;
        if l == a || l == b {
            continue;
        }
        let mapped: Vec<PointRef> = points
            .iter()
            .map(|pt| match pt {
                PointRef::Node(v) if *v == w => {
                    // the lobe sits strictly between a and b, or b and a
                    if alpha.contains(&relab(l)) {
                        p_ref
                    } else {
                        q_ref
                    }
                }
                PointRef::Node(v) => PointRef::Node(node_map[*v]),
                PointRef::Plain(x) => PointRef::Plain(*x),
            })
            .collect();
        lobes.push(mapped);
    }
    lobes.insert(a - 1, merged_points);

    // global basepoint
    let g = sc.global;
    let global = if g.lobe != a && g.lobe != b {
        Mark::new(relab(g.lobe), g.slot)
    } else {
        let src = (if g.lobe == a { 1 } else { 2 }, g.slot);
        let k_slot = source_slot_of.iter().position(|s| *s == src).unwrap();
        Mark::new(a, k_slot)
    };

    let (lobes, nodes, global) = compact_nodes(lobes, nodes, global);
    let merged = SpinyCactus::from_structure(lobes, nodes, global)
        .expect("merging two lobes of a valid cactus is valid");
    (merged, insert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pairs: &[(usize, usize)]) -> Vec<Mark> {
        pairs.iter().map(|(k, s)| Mark::new(*k, *s)).collect()
    }

    #[test]
    fn identity_decomposes_to_nothing() {
        let dec = decompose_generators(&Cactus::identity());
        assert!(dec.steps.is_empty());
        assert_eq!(recompose(&dec).unwrap(), Cactus::identity());
    }

    #[test]
    fn offset_circle_decomposes_to_base_marker() {
        let c = Cactus::from_spiny(SpinyCactus::single_lobe(2, 1).unwrap());
        let dec = decompose_generators(&c);
        assert_eq!(dec.pinch_count(), 0);
        assert_eq!(dec.steps.len(), 1);
        assert_eq!(recompose(&dec).unwrap(), c);
    }

    #[test]
    fn figure_eight_is_one_pinch() {
        let f8 = Cactus::figure_eight();
        let dec = decompose_generators(&f8);
        assert_eq!(dec.pinch_count(), 1);
        assert_eq!(recompose(&dec).unwrap(), f8);
    }

    #[test]
    fn three_lobe_chain_roundtrip() {
        let c = Cactus::from_spiny(
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)])).unwrap(),
        );
        let dec = decompose_generators(&c);
        assert_eq!(dec.pinch_count(), 2);
        assert_eq!(recompose(&dec).unwrap(), c);
    }

    #[test]
    fn star_with_permuted_labels_roundtrip() {
        // three lobes at one junction, odd label order through relabeling
        let base = Cactus::from_spiny(
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (3, 0)])).unwrap(),
        );
        let c = super::super::relabel(&base, &[3, 1, 2]).unwrap();
        let dec = decompose_generators(&c);
        assert_eq!(dec.pinch_count(), 2);
        assert_eq!(recompose(&dec).unwrap(), c);
    }

    #[test]
    fn label_order_needing_final_relabel() {
        // path 3-1-4-2: no two consecutive labels are adjacent, so the
        // decomposition must end with a nontrivial relabeling
        let word = w(&[(1, 0), (3, 0), (1, 1), (4, 0), (2, 0), (4, 1)]);
        let c = Cactus::from_spiny(SpinyCactus::from_word(&word).unwrap());
        assert_eq!(c.lobe_count(), 4);
        let dec = decompose_generators(&c);
        assert_eq!(dec.pinch_count(), 3);
        assert!(dec.steps.iter().any(|s| matches!(s, Step::Relabel(_))));
        assert_eq!(recompose(&dec).unwrap(), c);
    }
}
