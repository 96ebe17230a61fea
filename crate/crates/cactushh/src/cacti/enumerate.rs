//! Exhaustive enumeration of canonical cacti and spiny cacti at desk scale.
//!
//! Words are generated with a stack discipline (a lobe's marks may only be
//! interrupted by complete nested excursions), which is exactly the
//! noncrossing condition read linearly from the global basepoint. A second,
//! independent route counts arc words directly and is used to cross-check
//! the enumerator.

use super::serde_io::{cactus_from_arcs, BasepointPos};
use super::{Cactus, Mark, SpinyCactus};

/// Cyclic interleaving test on a plain label word: `true` when no two labels
/// alternate as `a..b..a..b` around the cycle.
pub fn word_is_noncrossing(labels: &[usize]) -> bool {
    let max = labels.iter().copied().max().unwrap_or(0);
    for a in 1..=max {
        let pa: Vec<usize> = (0..labels.len()).filter(|&t| labels[t] == a).collect();
        if pa.len() < 2 {
            continue;
        }
        for b in a + 1..=max {
            let pb: Vec<usize> = (0..labels.len()).filter(|&t| labels[t] == b).collect();
            if pb.len() < 2 {
                continue;
            }
            // every occurrence of b must fall in the same cyclic gap of a
            let gap_of = |t: usize| pa.iter().filter(|&&p| p < t).count() % pa.len();
            let g0 = gap_of(pb[0]);
            if pb.iter().any(|&t| gap_of(t) != g0) {
                return false;
            }
        }
    }
    true
}

struct Gen {
    counts: Vec<usize>,
    starts: Vec<usize>,
    total: usize,
    minimal_only: bool,
    out: Vec<SpinyCactus>,
}

impl Gen {
    fn run(&mut self) {
        let mut word = Vec::with_capacity(self.total);
        let mut stack: Vec<(usize, usize, usize)> = Vec::new(); // (lobe, next slot, remaining)
        let mut opened = vec![false; self.counts.len()];
        self.step(&mut word, &mut stack, &mut opened);
    }

    fn step(
        &mut self,
        word: &mut Vec<Mark>,
        stack: &mut Vec<(usize, usize, usize)>,
        opened: &mut Vec<bool>,
    ) {
        if word.len() == self.total {
            if stack.is_empty() {
                if let Ok(sc) = SpinyCactus::from_word(word) {
                    if !self.minimal_only || sc.is_minimal() {
                        self.out.push(sc);
                    }
                }
            }
            return;
        }
        // advance the open lobe on top of the stack
        if let Some(&(lobe, slot, remaining)) = stack.last() {
            let mark = Mark::new(lobe, slot);
            if !(self.minimal_only && self.would_be_plain(word, mark)) {
                word.push(mark);
                if remaining == 1 {
                    stack.pop();
                    self.step(word, stack, opened);
                    stack.push((lobe, slot, remaining));
                } else {
                    let j = self.counts[lobe - 1];
                    *stack.last_mut().unwrap() = (lobe, (slot + 1) % j, remaining - 1);
                    self.step(word, stack, opened);
                    *stack.last_mut().unwrap() = (lobe, slot, remaining);
                }
                word.pop();
            }
        }
        // or open a fresh lobe
        for l in 1..=self.counts.len() {
            if opened[l - 1] {
                continue;
            }
            let j = self.counts[l - 1];
            let first = self.starts[l - 1];
            let mark = Mark::new(l, first);
            if self.minimal_only && self.would_be_plain(word, mark) {
                continue;
            }
            opened[l - 1] = true;
            word.push(mark);
            if j == 1 {
                self.step(word, stack, opened);
            } else {
                stack.push((l, (first + 1) % j, j - 1));
                self.step(word, stack, opened);
                stack.pop();
            }
            word.pop();
            opened[l - 1] = false;
        }
    }

    /// A mark emitted directly after its same-lobe predecessor becomes a
    /// plain point. Lobe basepoints (slot 0) and the global start (the very
    /// first mark) are special regardless.
    fn would_be_plain(&self, word: &[Mark], mark: Mark) -> bool {
        mark.slot != 0 && matches!(word.last(), Some(prev) if prev.lobe == mark.lobe)
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    // all (j_1..j_parts) with j_k >= 1 summing to total
    let mut out = Vec::new();
    let mut cur = vec![1usize; parts];
    fn rec(cur: &mut Vec<usize>, idx: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if idx == cur.len() - 1 {
            cur[idx] = left;
            out.push(cur.clone());
            return;
        }
        for v in 1..=left - (cur.len() - 1 - idx) {
            cur[idx] = v;
            rec(cur, idx + 1, left - v, out);
        }
    }
    if total >= parts {
        rec(&mut cur, 0, total, &mut out);
    }
    out
}

fn generate(n: usize, max_total: usize, minimal_only: bool) -> Vec<SpinyCactus> {
    let mut all = Vec::new();
    for total in n..=max_total {
        for counts in compositions(total, n) {
            let mut starts = vec![0usize; n];
            loop {
                let mut g = Gen {
                    counts: counts.clone(),
                    starts: starts.clone(),
                    total,
                    minimal_only,
                    out: Vec::new(),
                };
                g.run();
                all.extend(g.out);
                // next start vector
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    starts[i] += 1;
                    if starts[i] < counts[i] {
                        break;
                    }
                    starts[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
    }
    all
}

/// All spiny cacti with exactly `n` lobes and at most `max_total` marks.
pub fn enumerate_spiny(n: usize, max_total: usize) -> Vec<SpinyCactus> {
    generate(n, max_total, false)
}

/// All canonical cacti with exactly `n` lobes, via their minimal markings.
pub fn enumerate_cacti(n: usize) -> Vec<Cactus> {
    // a minimal marking has at most 3n-1 points in total
    generate(n, 3 * n - 1, true).into_iter().map(Cactus::from_spiny).collect()
}

/// Independent count of canonical cacti with `n` lobes by direct noncrossing
/// arc-word generation: each realizable arc word contributes one cactus per
/// basepoint placement (two placements per arc of each lobe).
pub fn noncrossing_basepoint_count(n: usize) -> usize {
    let mut count = 0usize;
    let mut word: Vec<usize> = Vec::new();
    fn rec(n: usize, len: usize, word: &mut Vec<usize>, count: &mut usize) {
        if word.len() == len {
            let mut present = vec![false; n];
            for &l in word.iter() {
                present[l - 1] = true;
            }
            if !present.iter().all(|p| *p) {
                return;
            }
            // equal labels across the wrap are fine: that boundary is the
            // global basepoint, not a switch
            if !word_is_noncrossing(word) {
                return;
            }
            // realizability: validate with default basepoints
            let basepoints: Vec<BasepointPos> = (1..=n)
                .map(|k| BasepointPos {
                    arc: word.iter().position(|l| *l == k).unwrap(),
                    interior: false,
                })
                .collect();
            if cactus_from_arcs(word, &basepoints).is_ok() {
                let placements: usize =
                    (1..=n).map(|k| 2 * word.iter().filter(|l| **l == k).count()).product();
                *count += placements;
            }
            return;
        }
        for l in 1..=n {
            if word.last() == Some(&l) {
                continue; // canonical arc words have no adjacent duplicates
            }
            word.push(l);
            rec(n, len, word, count);
            word.pop();
        }
    }
    for len in n.max(1)..=2 * n {
        rec(n, len, &mut word, &mut count);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noncrossing_examples() {
        assert!(word_is_noncrossing(&[1, 2, 1, 3]));
        assert!(!word_is_noncrossing(&[1, 2, 1, 2]));
        assert!(word_is_noncrossing(&[1]));
        assert!(word_is_noncrossing(&[1, 2, 1, 3, 1]));
        assert!(!word_is_noncrossing(&[1, 2, 3, 1, 2, 3]));
    }

    #[test]
    fn one_lobe_enumeration() {
        let cacti = enumerate_cacti(1);
        // the identity and the offset-basepoint circle
        assert_eq!(cacti.len(), 2);
        assert_eq!(noncrossing_basepoint_count(1), 2);
    }

    #[test]
    fn two_lobe_enumeration_matches_direct_count() {
        let cacti = enumerate_cacti(2);
        let direct = noncrossing_basepoint_count(2);
        assert_eq!(cacti.len(), direct);
        // words [1,2], [2,1]: 4 placements each; [1,2,1], [2,1,2]: 8 each
        assert_eq!(direct, 24);
    }

    #[test]
    fn enumerated_cacti_are_distinct_and_minimal() {
        let cacti = enumerate_cacti(2);
        let set: std::collections::HashSet<_> = cacti.iter().cloned().collect();
        assert_eq!(set.len(), cacti.len());
        for c in &cacti {
            assert!(c.minimal_spiny().is_minimal());
            assert_eq!(c.lobe_count(), 2);
        }
    }

    #[test]
    fn spiny_enumeration_two_lobes() {
        let spiny = enumerate_spiny(2, 4);
        assert!(!spiny.is_empty());
        for sc in &spiny {
            assert_eq!(sc.lobe_count(), 2);
            assert!(sc.total_points() <= 4);
        }
        let set: std::collections::HashSet<_> = spiny.iter().cloned().collect();
        assert_eq!(set.len(), spiny.len());
    }
}
