//! Operadic composition of cacti.
//!
//! The count-matched composition of spiny cacti is positionwise word
//! substitution: the marks of lobe `i` are identified with the marked points
//! of the `i`-th refinement in global traversal order, basepoint to global
//! basepoint. The bare composition inserts the non-basepoint special points
//! of the collapsed lobe as fresh plain points in the first timeline gap of
//! the inserted cactus, which keeps the operad laws exact while staying a
//! total function.

use super::{Cactus, CactusError, Mark, SpinyCactus};

/// Count-matched composition of a spiny cactus with one refinement per lobe.
///
/// The total point count of `refinements[i]` must equal `j_{i+1}`; the
/// result lives over the composed cactus, lobes relabeled block by block.
pub fn spiny_compose(sc: &SpinyCactus, refinements: &[SpinyCactus]) -> Result<SpinyCactus, CactusError> {
    let n = sc.lobe_count();
    if refinements.len() != n {
        return Err(CactusError::ArityMismatch { expected: n, got: refinements.len() });
    }
    let counts = sc.counts();
    for (i, r) in refinements.iter().enumerate() {
        if r.total_points() != counts[i] {
            return Err(CactusError::CountMismatch {
                lobe: i + 1,
                expected: counts[i],
                got: r.total_points(),
            });
        }
    }
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0usize;
    for r in refinements {
        offsets.push(acc);
        acc += r.lobe_count();
    }
    let word: Vec<Mark> = sc
        .word()
        .iter()
        .map(|m| {
            let r = &refinements[m.lobe - 1];
            let image = r.word()[m.slot];
            Mark::new(offsets[m.lobe - 1] + image.lobe, image.slot)
        })
        .collect();
    SpinyCactus::from_word(&word)
}

/// Operadic `∘_at`: collapse lobe `at` of `c` onto `d`.
///
/// The lobe basepoint is glued to the global basepoint of `d`; the other
/// special points of the collapsed lobe land, in order, immediately after
/// that basepoint on `d`'s traversal.
pub fn compose(c: &Cactus, at: usize, d: &Cactus) -> Result<Cactus, CactusError> {
    let n_c = c.lobe_count();
    if at == 0 || at > n_c {
        return Err(CactusError::IndexOutOfRange { index: at, arity: n_c });
    }
    let csp = c.minimal_spiny();
    let dsp = d.minimal_spiny();
    let m = csp.counts()[at - 1];
    let n_d = dsp.lobe_count();
    let anchor = dsp.word()[0]; // d's global basepoint mark
    let relabel_c = |l: usize| if l < at { l } else { l + n_d - 1 };
    let relabel_d = |l: usize| at + l - 1;
    let map_d = |dm: &Mark| {
        let slot = if dm.lobe == anchor.lobe && dm.slot > anchor.slot { dm.slot + m - 1 } else { dm.slot };
        Mark::new(relabel_d(dm.lobe), slot)
    };
    let mut word = Vec::with_capacity(csp.total_points() + dsp.total_points() - 1);
    for mark in csp.word() {
        if mark.lobe != at {
            word.push(Mark::new(relabel_c(mark.lobe), mark.slot));
        } else if mark.slot == 0 {
            word.extend(dsp.word().iter().map(&map_d));
        } else {
            word.push(Mark::new(relabel_d(anchor.lobe), anchor.slot + mark.slot));
        }
    }
    let composed = SpinyCactus::from_word(&word)?;
    Ok(Cactus::from_spiny(composed))
}

/// Full composition `γ(c; d_1, ..., d_n)`, one insert per lobe.
pub fn full_compose(c: &Cactus, inserts: &[Cactus]) -> Result<Cactus, CactusError> {
    let n = c.lobe_count();
    if inserts.len() != n {
        return Err(CactusError::ArityMismatch { expected: n, got: inserts.len() });
    }
    let mut result = c.clone();
    // compose from the top index down so earlier lobe indices stay put
    for i in (1..=n).rev() {
        result = compose(&result, i, &inserts[i - 1])?;
    }
    Ok(result)
}

/// Relabel lobes by a permutation (`perm[old-1] = new`, 1-based labels).
pub fn relabel(c: &Cactus, perm: &[usize]) -> Result<Cactus, CactusError> {
    Ok(Cactus::from_spiny(relabel_spiny(c.minimal_spiny(), perm)?))
}

pub(crate) fn relabel_spiny(sc: &SpinyCactus, perm: &[usize]) -> Result<SpinyCactus, CactusError> {
    let n = sc.lobe_count();
    if perm.len() != n {
        return Err(CactusError::ArityMismatch { expected: n, got: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(CactusError::Parse(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        seen[p - 1] = true;
    }
    let mut lobes = vec![Vec::new(); n];
    for (old, points) in sc.lobes.iter().enumerate() {
        lobes[perm[old] - 1] = points.clone();
    }
    let nodes = sc
        .nodes
        .iter()
        .map(|order| order.iter().map(|l| perm[l - 1]).collect())
        .collect();
    let global = Mark::new(perm[sc.global.lobe - 1], sc.global.slot);
    SpinyCactus::from_structure(lobes, nodes, global)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pairs: &[(usize, usize)]) -> Vec<Mark> {
        pairs.iter().map(|(k, s)| Mark::new(*k, *s)).collect()
    }

    #[test]
    fn unit_laws() {
        let id = Cactus::identity();
        let samples = [
            Cactus::figure_eight(),
            Cactus::from_spiny(SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)])).unwrap()),
            Cactus::from_spiny(SpinyCactus::single_lobe(2, 1).unwrap()),
        ];
        for c in &samples {
            assert_eq!(&compose(&id, 1, c).unwrap(), c, "left unit for {c}");
            for i in 1..=c.lobe_count() {
                assert_eq!(&compose(c, i, &id).unwrap(), c, "right unit at {i} for {c}");
            }
        }
    }

    #[test]
    fn figure_eight_into_figure_eight() {
        let f8 = Cactus::figure_eight();
        let c = compose(&f8, 1, &f8).unwrap();
        assert_eq!(c.arc_word(), vec![1, 2, 3]);
        // all three lobes at one junction of multiplicity 3
        let nodes = c.nodes_info();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].lobes, vec![1, 2, 3]);
        assert_eq!(c.global_word(), &w(&[(1, 0), (2, 0), (3, 0)])[..]);
    }

    #[test]
    fn full_compose_matches_iterated() {
        let f8 = Cactus::figure_eight();
        let id = Cactus::identity();
        assert_eq!(full_compose(&f8, &[id.clone(), id.clone()]).unwrap(), f8);
        let g = full_compose(&f8, &[f8.clone(), id.clone()]).unwrap();
        assert_eq!(g.arc_word(), vec![1, 2, 3]);
        let by_hand = compose(&f8, 1, &f8).unwrap();
        assert_eq!(g, by_hand);
    }

    #[test]
    fn arity_checks() {
        let f8 = Cactus::figure_eight();
        assert!(matches!(
            compose(&f8, 3, &Cactus::identity()),
            Err(CactusError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            full_compose(&f8, &[Cactus::identity()]),
            Err(CactusError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn spiny_compose_example() {
        // figure-eight with j = (2,1), lobe 1 refined by the spiny
        // figure-eight with j = (1,1); counts match (1+1 = 2)
        let sc = SpinyCactus::from_word(&w(&[(1, 0), (1, 1), (2, 0)])).unwrap();
        let f8_spiny = SpinyCactus::from_word(&w(&[(1, 0), (2, 0)])).unwrap();
        let id1 = SpinyCactus::single_lobe(1, 0).unwrap();
        let composed = spiny_compose(&sc, &[f8_spiny.clone(), id1.clone()]).unwrap();
        assert_eq!(composed.word(), &w(&[(1, 0), (2, 0), (3, 0)])[..]);
        assert_eq!(Cactus::from_spiny(composed).arc_word(), vec![1, 2, 3]);
        // identity refinements reproduce the input
        let id2 = SpinyCactus::single_lobe(2, 0).unwrap();
        let same = spiny_compose(&sc, &[id2, id1]).unwrap();
        assert_eq!(same, sc);
        // count mismatch
        let id3 = SpinyCactus::single_lobe(3, 0).unwrap();
        let bad = spiny_compose(&sc, &[id3, SpinyCactus::single_lobe(1, 0).unwrap()]);
        assert!(matches!(bad, Err(CactusError::CountMismatch { lobe: 1, expected: 2, got: 3 })));
    }

    #[test]
    fn relabel_roundtrip() {
        let c = Cactus::from_spiny(
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (1, 1), (3, 0), (1, 2)])).unwrap(),
        );
        let swapped = relabel(&c, &[2, 3, 1]).unwrap();
        assert_eq!(swapped.arc_word(), vec![2, 3, 2, 1, 2]);
        let back = relabel(&swapped, &[3, 1, 2]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn compose_preserves_interior_structure() {
        // c = lobe 1 with lobe 2 attached mid-lobe; composing lobe 2 with a
        // figure-eight keeps the attachment position on lobe 1
        let c = Cactus::from_spiny(
            SpinyCactus::from_word(&w(&[(1, 0), (2, 0), (1, 1)])).unwrap(),
        );
        let f8 = Cactus::figure_eight();
        let got = compose(&c, 2, &f8).unwrap();
        assert_eq!(got.lobe_count(), 3);
        assert_eq!(got.arc_word(), vec![1, 2, 3, 1]);
    }
}
