//! Bounded search over the rewrite graph of canonical terms.
//!
//! Triangle expansions make the rewrite graph infinitely branching, so every
//! search runs under [`SearchCaps`]. Results are sound but incomplete: a path
//! found is a proof of equality, exhaustion proves nothing.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use indexmap::map::Entry;
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functor::{FunctorSpec, RationalSpec};
use crate::interchange::canonical;
use crate::rewrite::{apply, find_step, rewrites, Rewrite, RewriteError, RewriteStep};
use crate::term::{Generator, Mode, Obj, Slice, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchCaps {
    pub max_gen_count: usize,
    pub max_width: usize,
    pub max_index_n: usize,
    pub max_states: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_gen_count: 6,
            max_width: 8,
            max_index_n: 2,
            max_states: 100_000,
        }
    }
}

impl SearchCaps {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_width == 0 || self.max_index_n == 0 || self.max_states == 0 {
            return Err(SearchError::InvalidCaps(*self));
        }
        Ok(())
    }

    /// Whether the canonical term `t` stays within the caps.
    pub fn admits(&self, t: &Term) -> bool {
        t.gen_count() <= self.max_gen_count && t.max_width() <= self.max_width
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("terms have different shapes: {a_source}->{a_target} vs {b_source}->{b_target}")]
    NotEqualShape {
        a_source: Obj,
        a_target: Obj,
        b_source: Obj,
        b_target: Obj,
    },
    #[error("invalid search caps {0:?}: widths, indices and state budget must be at least 1")]
    InvalidCaps(SearchCaps),
}

/// Admissible rewrites of `t`, deduplicated by result, in enumeration order.
pub fn neighbor_rewrites(t: &Term, mode: Mode, caps: &SearchCaps) -> Vec<Rewrite> {
    let mut seen = std::collections::HashSet::new();
    rewrites(t, mode, Some(caps.into()))
        .into_iter()
        .filter(|r| caps.admits(&r.result) && seen.insert(r.result.clone()))
        .collect()
}

pub fn neighbors(t: &Term, mode: Mode, caps: &SearchCaps) -> Vec<Term> {
    neighbor_rewrites(t, mode, caps)
        .into_iter()
        .map(|r| r.result)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: RewriteStep,
    pub result: Term,
}

/// A concrete chain of rewrites from `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewritePath {
    pub start: Term,
    pub steps: Vec<PathStep>,
}

impl RewritePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// Replays every step with [`apply`].
    pub fn verify(&self) -> Result<(), RewriteError> {
        let mut current = canonical(&self.start);
        for s in &self.steps {
            let next = apply(&current, &s.step)?;
            if next != s.result {
                return Err(RewriteError::InvalidStep(format!(
                    "{} yields {next}, path records {}",
                    s.step, s.result
                )));
            }
            current = next;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Equality {
    Equal(RewritePath),
    /// Not decided within the caps.
    Unknown {
        states_visited: usize,
        truncated: bool,
    },
}

impl Equality {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equality::Equal(_))
    }

    pub fn path(&self) -> Option<&RewritePath> {
        match self {
            Equality::Equal(p) => Some(p),
            Equality::Unknown { .. } => None,
        }
    }
}

type Parents = IndexMap<Term, Option<(usize, RewriteStep)>>;

/// Expand every state of `frontier` in parallel; results keep frontier order.
fn expand_level(
    states: &Parents,
    frontier: &[usize],
    mode: Mode,
    caps: &SearchCaps,
) -> Vec<Vec<Rewrite>> {
    frontier
        .par_iter()
        .map(|&ix| {
            let (t, _) = states.get_index(ix).expect("frontier index in range");
            neighbor_rewrites(t, mode, caps)
        })
        .collect()
}

fn chain_to(states: &Parents, mut ix: usize) -> Vec<(RewriteStep, Term)> {
    let mut out = Vec::new();
    while let Some((t, Some((parent, step)))) = states.get_index(ix) {
        out.push((step.clone(), t.clone()));
        ix = *parent;
    }
    out.reverse();
    out
}

fn run_in_pool<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// Bounded word problem: bidirectional breadth-first search between the
/// canonical forms of `a` and `b`.
pub fn equal(a: &Term, b: &Term, mode: Mode, caps: &SearchCaps) -> Result<Equality, SearchError> {
    equal_with_threads(a, b, mode, caps, None)
}

pub fn equal_with_threads(
    a: &Term,
    b: &Term,
    mode: Mode,
    caps: &SearchCaps,
    threads: Option<usize>,
) -> Result<Equality, SearchError> {
    if a.source() != b.source() || a.target() != b.target() {
        return Err(SearchError::NotEqualShape {
            a_source: a.source(),
            a_target: a.target(),
            b_source: b.source(),
            b_target: b.target(),
        });
    }
    caps.validate()?;
    let a = canonical(a);
    let b = canonical(b);
    if a == b {
        return Ok(Equality::Equal(RewritePath {
            start: a,
            steps: Vec::new(),
        }));
    }
    Ok(run_in_pool(threads, || bidirectional(a, b, mode, caps)))
}

fn bidirectional(a: Term, b: Term, mode: Mode, caps: &SearchCaps) -> Equality {
    let mut sides: [Parents; 2] = [IndexMap::new(), IndexMap::new()];
    sides[0].insert(a.clone(), None);
    sides[1].insert(b, None);
    let mut frontiers: [Vec<usize>; 2] = [vec![0], vec![0]];
    let mut truncated = false;

    loop {
        // An exhausted side is a complete bounded component that the other
        // side never entered.
        if frontiers[0].is_empty() || frontiers[1].is_empty() {
            break;
        }
        let side = usize::from(frontiers[1].len() < frontiers[0].len());
        let expanded = expand_level(&sides[side], &frontiers[side], mode, caps);
        let mut next = Vec::new();
        'merge: for (&parent, batch) in frontiers[side].iter().zip(expanded) {
            for rw in batch {
                if sides[side].contains_key(&rw.result) {
                    continue;
                }
                if sides[0].len() + sides[1].len() >= caps.max_states {
                    truncated = true;
                    break 'merge;
                }
                let meet = sides[1 - side].get_index_of(&rw.result);
                let (ix, _) = sides[side].insert_full(rw.result, Some((parent, rw.step)));
                if let Some(other) = meet {
                    let (fwd_ix, bwd_ix) = if side == 0 { (ix, other) } else { (other, ix) };
                    return Equality::Equal(join_paths(&sides, fwd_ix, bwd_ix, a, mode));
                }
                next.push(ix);
            }
        }
        frontiers[side] = next;
        if truncated {
            break;
        }
    }
    Equality::Unknown {
        states_visited: sides[0].len() + sides[1].len(),
        truncated,
    }
}

fn join_paths(
    sides: &[Parents; 2],
    fwd_ix: usize,
    bwd_ix: usize,
    start: Term,
    mode: Mode,
) -> RewritePath {
    let mut steps: Vec<PathStep> = chain_to(&sides[0], fwd_ix)
        .into_iter()
        .map(|(step, result)| PathStep { step, result })
        .collect();
    // Walk from the meeting point back to `b`, reversing each discovered edge.
    let mut current = sides[1].get_index(bwd_ix).expect("meet").0.clone();
    let mut ix = bwd_ix;
    while let Some((_, Some((parent, _)))) = sides[1].get_index(ix) {
        let prev = sides[1].get_index(*parent).expect("parent").0.clone();
        let step = find_step(&current, &prev, mode).expect("every rewrite step is reversible");
        steps.push(PathStep {
            step,
            result: prev.clone(),
        });
        current = prev;
        ix = *parent;
    }
    RewritePath { start, steps }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreReport {
    pub start: Term,
    pub mode: Mode,
    pub caps: SearchCaps,
    pub states_visited: usize,
    pub identity_found: bool,
    pub min_gen_count_seen: usize,
    pub truncated: bool,
    /// Breadth-first levels completed.
    pub levels: usize,
    /// Rewrite path from `start` to the identity, when one was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<RewritePath>,
}

/// Full result of an exploration, including the visited states in discovery
/// order.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub report: ExploreReport,
    pub states: Vec<Term>,
}

impl Exploration {
    /// Order-sensitive digest of the visited states.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.states.hash(&mut h);
        h.finish()
    }
}

/// Breadth-first exploration of the bounded equivalence class of `t`.
pub fn explore(t: &Term, mode: Mode, caps: &SearchCaps) -> ExploreReport {
    explore_states(t, mode, caps, None).report
}

/// Like [`explore`], on a pool of `threads` workers (`None`: the global
/// pool). The visit order does not depend on the number of workers.
pub fn explore_states(
    t: &Term,
    mode: Mode,
    caps: &SearchCaps,
    threads: Option<usize>,
) -> Exploration {
    run_in_pool(threads, || bfs(t, mode, caps))
}

fn bfs(t: &Term, mode: Mode, caps: &SearchCaps) -> Exploration {
    let start = canonical(t);
    let identity = (start.source() == start.target()).then(|| Term::identity(start.source()));
    let mut states: Parents = IndexMap::new();
    states.insert(start.clone(), None);
    let mut frontier = vec![0];
    let mut truncated = false;
    let mut levels = 0;

    while !frontier.is_empty() && !truncated {
        let expanded = expand_level(&states, &frontier, mode, caps);
        let mut next = Vec::new();
        'merge: for (&parent, batch) in frontier.iter().zip(expanded) {
            for rw in batch {
                if states.len() >= caps.max_states && !states.contains_key(&rw.result) {
                    truncated = true;
                    break 'merge;
                }
                if let Entry::Vacant(slot) = states.entry(rw.result) {
                    next.push(slot.index());
                    slot.insert(Some((parent, rw.step)));
                }
            }
        }
        frontier = next;
        levels += 1;
    }

    let identity_ix = identity.as_ref().and_then(|id| states.get_index_of(id));
    let witness = identity_ix.map(|ix| RewritePath {
        start: start.clone(),
        steps: chain_to(&states, ix)
            .into_iter()
            .map(|(step, result)| PathStep { step, result })
            .collect(),
    });
    let min_gen_count_seen = states.keys().map(Term::gen_count).min().unwrap_or(0);
    let report = ExploreReport {
        start,
        mode,
        caps: *caps,
        states_visited: states.len(),
        identity_found: witness.is_some(),
        min_gen_count_seen,
        truncated,
        levels,
        witness,
    };
    Exploration {
        report,
        states: states.into_keys().collect(),
    }
}

/// One equivalence class found by [`enum_hom`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomClass {
    pub representative: Term,
    /// Enumerated terms merged into this class.
    pub members: Vec<Term>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomEnumeration {
    pub source: Obj,
    pub target: Obj,
    pub mode: Mode,
    pub caps: SearchCaps,
    pub terms_generated: usize,
    pub classes: Vec<HomClass>,
    /// Pairs of classes that bounded search kept apart although every tested
    /// vector-space image agrees.
    pub unresolved: Vec<(usize, usize)>,
    /// Whether any merging search ran out of states.
    pub truncated: bool,
    #[serde(skip)]
    index: HashMap<Term, usize>,
}

impl HomEnumeration {
    pub fn representatives(&self) -> Vec<Term> {
        self.classes
            .iter()
            .map(|c| c.representative.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class of an enumerated term.
    pub fn class_of(&self, t: &Term) -> Option<usize> {
        self.index.get(&canonical(t)).copied()
    }

    /// Class of an arbitrary term: direct lookup, otherwise a bounded search
    /// from `t` for an enumerated term.
    pub fn locate(&self, t: &Term) -> Option<usize> {
        if let Some(c) = self.class_of(t) {
            return Some(c);
        }
        let mut caps = self.caps;
        caps.max_gen_count = caps.max_gen_count.max(t.gen_count());
        caps.max_width = caps.max_width.max(canonical(t).max_width());
        explore_states(t, self.mode, &caps, None)
            .states
            .iter()
            .find_map(|s| self.index.get(s).copied())
    }
}

/// Every slice applicable at width `width` under the caps.
pub(crate) fn slices_at(width: usize, caps: &SearchCaps) -> Vec<Slice> {
    let mut out = Vec::new();
    for n in 1..=caps.max_index_n {
        if width + 2 * n <= caps.max_width {
            for left in 0..=width {
                for m in 0..=width - left {
                    out.push(Slice::new(left, Generator::eta(m, n), width - left - m));
                }
            }
        }
        if width >= 2 * n {
            let rest = width - 2 * n;
            for left in 0..=rest {
                for m in 0..=rest - left {
                    out.push(Slice::new(left, Generator::eps(m, n), rest - left - m));
                }
            }
        }
    }
    out
}

/// All canonical terms `source -> target` within the caps, sorted by
/// generator count.
pub fn generate_terms(source: Obj, target: Obj, caps: &SearchCaps) -> Vec<Term> {
    fn go(
        source: Obj,
        target: Obj,
        width: usize,
        slices: &mut Vec<Slice>,
        caps: &SearchCaps,
        out: &mut std::collections::HashSet<Term>,
    ) {
        if width == target {
            let t = canonical(&Term::from_slices_unchecked(source, slices.clone()));
            if caps.admits(&t) {
                out.insert(t);
            }
        }
        if slices.len() >= caps.max_gen_count {
            return;
        }
        let remaining = caps.max_gen_count - slices.len() - 1;
        for s in slices_at(width, caps) {
            let next = s.target();
            if next.abs_diff(target) > 2 * caps.max_index_n * remaining {
                continue;
            }
            slices.push(s);
            go(source, target, next, slices, caps, out);
            slices.pop();
        }
    }
    let mut found = std::collections::HashSet::new();
    if source <= caps.max_width && target <= caps.max_width {
        go(source, target, source, &mut Vec::new(), caps, &mut found);
    }
    let mut terms: Vec<Term> = found.into_iter().collect();
    terms.sort_by(|a, b| a.gen_count().cmp(&b.gen_count()).then_with(|| a.cmp(b)));
    terms
}

/// Equivalence classes of terms `source -> target` within the caps.
///
/// Classes are merged by bounded exploration; classes that stay apart but
/// share every tested vector-space image are listed as unresolved.
pub fn enum_hom(source: Obj, target: Obj, mode: Mode, caps: &SearchCaps) -> HomEnumeration {
    let terms = generate_terms(source, target, caps);
    let enumerated: std::collections::HashSet<&Term> = terms.iter().collect();
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut classes: Vec<HomClass> = Vec::new();
    let mut truncated = false;
    for t in &terms {
        if index.contains_key(t) {
            continue;
        }
        let c = classes.len();
        let exploration = explore_states(t, mode, caps, None);
        truncated |= exploration.report.truncated;
        let mut members = Vec::new();
        for s in exploration.states {
            if enumerated.contains(&s) && !index.contains_key(&s) {
                index.insert(s.clone(), c);
                members.push(s);
            }
        }
        classes.push(HomClass {
            representative: t.clone(),
            members,
        });
    }

    let specs = [RationalSpec::identity(2), RationalSpec::random(2, 1)];
    let images: Vec<Vec<_>> = classes
        .iter()
        .map(|c| {
            specs
                .iter()
                .map(|spec| spec.eval_term(&c.representative).ok())
                .collect()
        })
        .collect();
    let mut unresolved = Vec::new();
    for x in 0..classes.len() {
        for y in x + 1..classes.len() {
            if images[x].iter().all(Option::is_some) && images[x] == images[y] {
                unresolved.push((x, y));
            }
        }
    }

    HomEnumeration {
        source,
        target,
        mode,
        caps: *caps,
        terms_generated: terms.len(),
        classes,
        unresolved,
        truncated,
        index,
    }
}

/// Evaluate a term under every spec; used to certify distinctness.
pub fn separated_by<S: crate::scalar::Scalar>(
    specs: &[FunctorSpec<S>],
    a: &Term,
    b: &Term,
) -> bool {
    specs
        .iter()
        .any(|spec| match (spec.eval_term(a), spec.eval_term(b)) {
            (Ok(x), Ok(y)) => x != y,
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(source: usize, slices: &[(usize, Generator, usize)]) -> Term {
        Term::from_slices(
            source,
            slices
                .iter()
                .map(|&(l, g, r)| Slice::new(l, g, r))
                .collect(),
        )
        .unwrap()
    }

    fn small() -> SearchCaps {
        SearchCaps {
            max_gen_count: 4,
            max_width: 6,
            max_index_n: 1,
            max_states: 20_000,
        }
    }

    fn triangle_a() -> Term {
        t(
            1,
            &[(0, Generator::eta(0, 1), 1), (0, Generator::eps(1, 1), 0)],
        )
    }

    fn snake() -> Term {
        t(
            1,
            &[(0, Generator::eta(0, 1), 1), (1, Generator::eps(0, 1), 0)],
        )
    }

    #[test]
    fn neighbors_of_id0() {
        let caps = SearchCaps {
            max_gen_count: 6,
            ..SearchCaps::default()
        };
        assert!(neighbors(&Term::identity(0), Mode::D, &caps).is_empty());
        // No wires to expand on: every triangle needs i + n >= 1 wires.
        assert!(neighbors(&Term::identity(0), Mode::C, &caps).is_empty());
    }

    #[test]
    fn neighbors_of_id1_are_the_two_triangles() {
        let caps = SearchCaps {
            max_gen_count: 2,
            max_index_n: 1,
            ..SearchCaps::default()
        };
        let ns = neighbors(&Term::identity(1), Mode::C, &caps);
        assert!(ns.contains(&canonical(&triangle_a())));
        assert!(ns.contains(&canonical(&t(
            1,
            &[(0, Generator::eta(1, 1), 0), (0, Generator::eps(0, 1), 1)]
        ))));
        for u in &ns {
            assert_eq!((u.source(), u.target()), (1, 1));
        }
    }

    #[test]
    fn triangle_equals_identity_in_one_step() {
        let eq = equal(&triangle_a(), &Term::identity(1), Mode::C, &small()).unwrap();
        let path = eq.path().expect("equal");
        assert_eq!(path.len(), 1);
        path.verify().unwrap();
        assert_eq!(path.end(), &Term::identity(1));
    }

    #[test]
    fn reflexive_equality_has_empty_path() {
        let eq = equal(&snake(), &snake(), Mode::C, &small()).unwrap();
        assert!(eq.path().unwrap().is_empty());
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            equal(&Term::identity(1), &Term::identity(2), Mode::C, &small()),
            Err(SearchError::NotEqualShape { .. })
        ));
    }

    #[test]
    fn snake_is_not_reached_from_identity_under_small_caps() {
        let eq = equal(&snake(), &Term::identity(1), Mode::C, &small()).unwrap();
        assert!(!eq.is_equal());
    }

    #[test]
    fn explore_control_and_circle() {
        let r = explore(&triangle_a(), Mode::C, &small());
        assert!(r.identity_found);
        assert_eq!(r.min_gen_count_seen, 0);
        r.witness.unwrap().verify().unwrap();

        let circle = t(
            0,
            &[(0, Generator::eta(0, 1), 0), (0, Generator::eps(0, 1), 0)],
        );
        let r = explore(&circle, Mode::C, &small());
        assert!(!r.identity_found);
    }

    #[test]
    fn exploration_is_deterministic() {
        let a = explore_states(&snake(), Mode::C, &small(), Some(1));
        let b = explore_states(&snake(), Mode::C, &small(), Some(4));
        assert_eq!(a.report, b.report);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn parity_empties_odd_homs() {
        let caps = SearchCaps {
            max_gen_count: 3,
            max_width: 5,
            max_index_n: 2,
            max_states: 1_000,
        };
        assert!(generate_terms(0, 1, &caps).is_empty());
        assert!(enum_hom(0, 1, Mode::C, &caps).is_empty());
        assert!(enum_hom(1, 2, Mode::D, &caps).is_empty());
    }

    #[test]
    fn endomorphisms_of_0() {
        let caps = SearchCaps {
            max_gen_count: 2,
            max_width: 4,
            max_index_n: 1,
            max_states: 1_000,
        };
        let hom = enum_hom(0, 0, Mode::C, &caps);
        let circle = canonical(&t(
            0,
            &[(0, Generator::eta(0, 1), 0), (0, Generator::eps(0, 1), 0)],
        ));
        let id = hom.class_of(&Term::identity(0)).unwrap();
        let c = hom.class_of(&circle).unwrap();
        assert_ne!(id, c);
        assert!(separated_by(
            &[RationalSpec::identity(2)],
            &Term::identity(0),
            &circle
        ));
    }

    #[test]
    fn identity_alone_without_generators() {
        let caps = SearchCaps {
            max_gen_count: 0,
            ..small()
        };
        let hom = enum_hom(1, 1, Mode::D, &caps);
        assert_eq!(hom.representatives(), vec![Term::identity(1)]);
    }
}
