//! Interchange law on slice sequences and the leftmost normal form.
//!
//! Two adjacent slices commute when the later one acts on wires entirely to
//! the left or entirely to the right of the wires produced by the earlier
//! one. A zero-width block sitting strictly inside another slice's block does
//! not commute with it; at a block boundary both placements are legal.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use crate::term::{Slice, Term};

/// Every way to exchange the adjacent pair `first ; second`.
///
/// Each returned pair is `(second', first')`, the exchanged slices in their
/// new application order. Empty when the pair does not commute.
pub fn exchanges(first: &Slice, second: &Slice) -> Vec<(Slice, Slice)> {
    let mut out = Vec::with_capacity(2);
    let first_src = first.gen.source();
    let first_tgt = first.gen.target();
    let second_src = second.gen.source();
    let second_tgt = second.gen.target();

    // `second` lies left of the block produced by `first`.
    if second.left + second_src <= first.left {
        let moved = Slice::new(
            second.left,
            second.gen,
            first.source() - second.left - second_src,
        );
        let shifted = Slice::new(first.left - second_src + second_tgt, first.gen, first.right);
        out.push((moved, shifted));
    }
    // `second` lies right of the block produced by `first`.
    if second.left >= first.left + first_tgt {
        let moved = Slice::new(
            second.left - first_tgt + first_src,
            second.gen,
            second.right,
        );
        let shifted = Slice::new(first.left, first.gen, first.right - second_src + second_tgt);
        if out.first() != Some(&(moved, shifted)) {
            out.push((moved, shifted));
        }
    }
    out
}

/// All terms obtained from `t` by one legal exchange of adjacent slices.
pub fn adjacent_exchanges(t: &Term) -> Vec<Term> {
    let slices = t.slices();
    let mut out = Vec::new();
    for p in 0..slices.len().saturating_sub(1) {
        for (a, b) in exchanges(&slices[p], &slices[p + 1]) {
            let mut next = slices.to_vec();
            next[p] = a;
            next[p + 1] = b;
            out.push(Term::from_slices_unchecked(t.source(), next));
        }
    }
    out
}

fn schedule_key(s: &Slice) -> (usize, crate::term::GenKind, usize, usize) {
    (s.left, s.gen.kind(), s.gen.m(), s.gen.n())
}

fn compare_seqs(a: &[Slice], b: &[Slice]) -> Ordering {
    a.iter().map(schedule_key).cmp(b.iter().map(schedule_key))
}

/// Normal form modulo interchange: the smallest slice sequence in the
/// interchange class, comparing slices by left offset, then generator kind
/// and indices.
pub fn canonical(t: &Term) -> Term {
    let start = t.slices().to_vec();
    let mut best = start.clone();
    let mut seen: HashSet<Vec<Slice>> = HashSet::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some(current) = stack.pop() {
        if compare_seqs(&current, &best) == Ordering::Less {
            best = current.clone();
        }
        for p in 0..current.len().saturating_sub(1) {
            for (moved, shifted) in exchanges(&current[p], &current[p + 1]) {
                let mut next = current.clone();
                next[p] = moved;
                next[p + 1] = shifted;
                if !seen.contains(&next) {
                    seen.insert(next.clone());
                    stack.push(next);
                }
            }
        }
    }
    Term::from_slices_unchecked(t.source(), best)
}

/// A reordering of a term's slices; each entry keeps the index the slice had
/// in the original term.
pub type Arrangement = Vec<(usize, Slice)>;

/// Every slice order reachable from `t` by legal exchanges, in breadth-first
/// discovery order starting with `t` itself.
pub fn arrangements(t: &Term) -> Vec<Arrangement> {
    let start: Arrangement = t.slices().iter().copied().enumerate().collect();
    let mut seen: HashSet<Arrangement> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(current) = queue.pop_front() {
        for p in 0..current.len().saturating_sub(1) {
            let (ia, a) = current[p];
            let (ib, b) = current[p + 1];
            for (moved, shifted) in exchanges(&a, &b) {
                let mut next = current.clone();
                next[p] = (ib, moved);
                next[p + 1] = (ia, shifted);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        order.push(current);
    }
    order
}

pub fn interchange_equivalent(a: &Term, b: &Term) -> bool {
    a.source() == b.source() && canonical(a) == canonical(b)
}
