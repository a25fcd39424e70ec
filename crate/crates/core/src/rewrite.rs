//! The defining relations as a bidirectional rewrite system on slice terms.
//!
//! Every relation has a two-slice left-hand side. The four naturality
//! relations have two-slice right-hand sides, the triangle identities have
//! the identity as right-hand side. A relation may be applied inside any
//! whiskering context `id(A) * _ * id(B)` and to any pair of slices that can
//! be made adjacent by interchange.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interchange::{arrangements, canonical, Arrangement};
use crate::search::SearchCaps;
use crate::term::{GenKind, Generator, Mode, Slice, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    /// `eta_{i+j+2k+l,n} (id_i + eta_{j,k} + id_l) = ((id_i + eta_{j,k} + id_l) + id_2n) eta_{i+j+l,n}`
    NatEtaEta,
    /// `eta_{i+j+l,n} (id_i + eps_{j,k} + id_l) = ((id_i + eps_{j,k} + id_l) + id_2n) eta_{i+j+2k+l,n}`
    NatEtaEps,
    /// `eps_{i+j+2k+l,n} ((id_i + eta_{j,k} + id_l) + id_2n) = (id_i + eta_{j,k} + id_l) eps_{i+j+l,n}`
    NatEpsEta,
    /// `eps_{i+j+l,n} ((id_i + eps_{j,k} + id_l) + id_2n) = (id_i + eps_{j,k} + id_l) eps_{i+j+2k+l,n}`
    NatEpsEps,
    /// `eps_{i+n,n} (eta_{i,n} + id_n) = id_{i+n}`
    TriangleA,
    /// `(eps_{i,n} + id_n) eta_{i+n,n} = id_{i+n}`
    TriangleB,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [
        RuleId::NatEtaEta,
        RuleId::NatEtaEps,
        RuleId::NatEpsEta,
        RuleId::NatEpsEps,
        RuleId::TriangleA,
        RuleId::TriangleB,
    ];

    pub const NATURALITY: [RuleId; 4] = [
        RuleId::NatEtaEta,
        RuleId::NatEtaEps,
        RuleId::NatEpsEta,
        RuleId::NatEpsEps,
    ];

    pub fn is_triangle(self) -> bool {
        matches!(self, RuleId::TriangleA | RuleId::TriangleB)
    }

    /// Whether the rule belongs to the presentation read in `mode`.
    pub fn holds_in(self, mode: Mode) -> bool {
        mode == Mode::C || !self.is_triangle()
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// Left-hand side to right-hand side.
    Forward,
    /// Right-hand side to left-hand side.
    Backward,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Parameters of one relation instance. Triangle instances use only `i`, `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub n: usize,
}

impl RuleInstance {
    pub fn naturality(rule: RuleId, i: usize, j: usize, k: usize, l: usize, n: usize) -> Self {
        assert!(!rule.is_triangle() && k >= 1 && n >= 1);
        RuleInstance {
            rule,
            i,
            j,
            k,
            l,
            n,
        }
    }

    pub fn triangle(rule: RuleId, i: usize, n: usize) -> Self {
        assert!(rule.is_triangle() && n >= 1);
        RuleInstance {
            rule,
            i,
            j: 0,
            k: 0,
            l: 0,
            n,
        }
    }

    fn sides(&self) -> (Vec<Slice>, Vec<Slice>) {
        let RuleInstance { i, j, k, l, n, .. } = *self;
        let s = Slice::new;
        match self.rule {
            RuleId::NatEtaEta => (
                vec![
                    s(i, Generator::eta(j, k), l),
                    s(0, Generator::eta(i + j + 2 * k + l, n), 0),
                ],
                vec![
                    s(0, Generator::eta(i + j + l, n), 0),
                    s(i, Generator::eta(j, k), l + 2 * n),
                ],
            ),
            RuleId::NatEtaEps => (
                vec![
                    s(i, Generator::eps(j, k), l),
                    s(0, Generator::eta(i + j + l, n), 0),
                ],
                vec![
                    s(0, Generator::eta(i + j + 2 * k + l, n), 0),
                    s(i, Generator::eps(j, k), l + 2 * n),
                ],
            ),
            RuleId::NatEpsEta => (
                vec![
                    s(i, Generator::eta(j, k), l + 2 * n),
                    s(0, Generator::eps(i + j + 2 * k + l, n), 0),
                ],
                vec![
                    s(0, Generator::eps(i + j + l, n), 0),
                    s(i, Generator::eta(j, k), l),
                ],
            ),
            RuleId::NatEpsEps => (
                vec![
                    s(i, Generator::eps(j, k), l + 2 * n),
                    s(0, Generator::eps(i + j + l, n), 0),
                ],
                vec![
                    s(0, Generator::eps(i + j + 2 * k + l, n), 0),
                    s(i, Generator::eps(j, k), l),
                ],
            ),
            RuleId::TriangleA => (
                vec![
                    s(0, Generator::eta(i, n), n),
                    s(0, Generator::eps(i + n, n), 0),
                ],
                vec![],
            ),
            RuleId::TriangleB => (
                vec![
                    s(0, Generator::eta(i + n, n), 0),
                    s(0, Generator::eps(i, n), n),
                ],
                vec![],
            ),
        }
    }

    pub fn source(&self) -> usize {
        self.sides().0[0].source()
    }

    pub fn target(&self) -> usize {
        self.sides().0[1].target()
    }

    pub fn lhs(&self) -> Term {
        Term::from_slices_unchecked(self.source(), self.sides().0)
    }

    pub fn rhs(&self) -> Term {
        Term::from_slices_unchecked(self.source(), self.sides().1)
    }

    /// Instances of every rule with `i, j, l` in `0..=max_small` and
    /// `k, n` in `1..=max_index`.
    pub fn sweep(max_small: usize, max_index: usize) -> Vec<RuleInstance> {
        let mut out = Vec::new();
        for rule in RuleId::NATURALITY {
            for i in 0..=max_small {
                for j in 0..=max_small {
                    for l in 0..=max_small {
                        for k in 1..=max_index {
                            for n in 1..=max_index {
                                out.push(RuleInstance::naturality(rule, i, j, k, l, n));
                            }
                        }
                    }
                }
            }
        }
        for rule in [RuleId::TriangleA, RuleId::TriangleB] {
            for i in 0..=max_small {
                for n in 1..=max_index {
                    out.push(RuleInstance::triangle(rule, i, n));
                }
            }
        }
        out
    }
}

/// Where a step acts on the term it is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    /// Two slices, by their index in the term, in the order they are applied
    /// once made adjacent.
    Pair { first: usize, second: usize },
    /// A cut through the term: the indices of the slices applied before it.
    Boundary { below: Vec<usize> },
}

/// One edge of the rewrite graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RewriteStep {
    pub instance: RuleInstance,
    pub direction: Direction,
    pub site: Site,
    /// Identity wires to the left of the rewritten region.
    pub offset: usize,
}

impl RewriteStep {
    pub fn rule(&self) -> RuleId {
        self.instance.rule
    }

    /// Change in generator count caused by this step.
    pub fn gen_delta(&self) -> isize {
        let lhs = self.instance.lhs().gen_count() as isize;
        let rhs = self.instance.rhs().gen_count() as isize;
        match self.direction {
            Direction::Forward => rhs - lhs,
            Direction::Backward => lhs - rhs,
        }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RuleInstance {
            rule,
            i,
            j,
            k,
            l,
            n,
        } = self.instance;
        let dir = match self.direction {
            Direction::Forward => "->",
            Direction::Backward => "<-",
        };
        if rule.is_triangle() {
            write!(f, "{rule} {dir} i={i} n={n}")?;
        } else {
            write!(f, "{rule} {dir} i={i} j={j} k={k} l={l} n={n}")?;
        }
        write!(f, " offset={}", self.offset)?;
        match &self.site {
            Site::Pair { first, second } => write!(f, " at slices {first},{second}"),
            Site::Boundary { below } => write!(f, " at cut above {below:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rewrite step does not match the term: {0}")]
    InvalidStep(String),
}

/// Parameters of a relation whose `side` matches the adjacent pair `p ; q`,
/// together with the outer left offset. Candidates are verified by
/// reconstruction before being returned.
fn pair_candidates(p: &Slice, q: &Slice, mode: Mode) -> Vec<(RuleInstance, Direction, usize)> {
    let mut out = Vec::new();
    let pk = p.gen.kind();
    let qk = q.gen.kind();

    // Forward naturality: `p` is the inner slice, `q` the component. The inner
    // slice must sit within the component's passive wires: for an eta
    // component its whiskers contain the component's, for an eps component it
    // must additionally avoid the trailing 2n wires consumed by the cap.
    {
        let outer_left = q.left;
        let outer_right = q.right;
        let reserved = if qk == GenKind::Eps { 2 * q.gen.n() } else { 0 };
        if p.left >= outer_left && p.right >= outer_right + reserved {
            let rule = match (qk, pk) {
                (GenKind::Eta, GenKind::Eta) => RuleId::NatEtaEta,
                (GenKind::Eta, GenKind::Eps) => RuleId::NatEtaEps,
                (GenKind::Eps, GenKind::Eta) => RuleId::NatEpsEta,
                (GenKind::Eps, GenKind::Eps) => RuleId::NatEpsEps,
            };
            let inst = RuleInstance::naturality(
                rule,
                p.left - outer_left,
                p.gen.m(),
                p.gen.n(),
                p.right - outer_right - reserved,
                q.gen.n(),
            );
            out.push((inst, Direction::Forward, outer_left));
        }
    }

    // Backward naturality: `p` is the component, `q` the inner slice acting on
    // the passive wires left of the component's cup/cap block. After an eta
    // component the 2n new wires sit on the right of that block.
    {
        let outer_left = p.left;
        let outer_right = p.right;
        let reserved = if pk == GenKind::Eta { 2 * p.gen.n() } else { 0 };
        if q.left >= outer_left && q.right >= outer_right + reserved {
            let rule = match (pk, qk) {
                (GenKind::Eta, GenKind::Eta) => RuleId::NatEtaEta,
                (GenKind::Eta, GenKind::Eps) => RuleId::NatEtaEps,
                (GenKind::Eps, GenKind::Eta) => RuleId::NatEpsEta,
                (GenKind::Eps, GenKind::Eps) => RuleId::NatEpsEps,
            };
            let inst = RuleInstance::naturality(
                rule,
                q.left - outer_left,
                q.gen.m(),
                q.gen.n(),
                q.right - outer_right - reserved,
                p.gen.n(),
            );
            out.push((inst, Direction::Backward, outer_left));
        }
    }

    if mode == Mode::C && pk == GenKind::Eta && qk == GenKind::Eps && p.left == q.left {
        let n = p.gen.n();
        if q.gen.n() == n {
            if p.right == q.right + n {
                out.push((
                    RuleInstance::triangle(RuleId::TriangleA, p.gen.m(), n),
                    Direction::Forward,
                    p.left,
                ));
            }
            if q.right == p.right + n {
                out.push((
                    RuleInstance::triangle(RuleId::TriangleB, q.gen.m(), n),
                    Direction::Forward,
                    p.left,
                ));
            }
        }
    }

    out.retain(|(inst, dir, offset)| {
        let side = match dir {
            Direction::Forward => inst.lhs(),
            Direction::Backward => inst.rhs(),
        };
        let width = p.source();
        if side.source() + offset > width {
            return false;
        }
        let placed = side.whiskered(*offset, width - offset - side.source());
        placed.slices() == [*p, *q]
    });
    out
}

fn replacement(inst: &RuleInstance, dir: Direction, offset: usize, width: usize) -> Vec<Slice> {
    let side = match dir {
        Direction::Forward => inst.rhs(),
        Direction::Backward => inst.lhs(),
    };
    side.whiskered(offset, width - offset - side.source())
        .slices()
        .to_vec()
}

/// A matched step together with its (canonical) result.
#[derive(Debug, Clone)]
pub struct Rewrite {
    pub step: RewriteStep,
    pub result: Term,
}

/// Limits on the triangle expansions offered by [`rewrites`].
#[derive(Debug, Clone, Copy)]
pub struct ExpansionLimits {
    pub max_index_n: usize,
    pub max_width: usize,
    pub max_gen_count: usize,
}

impl From<&SearchCaps> for ExpansionLimits {
    fn from(caps: &SearchCaps) -> Self {
        ExpansionLimits {
            max_index_n: caps.max_index_n,
            max_width: caps.max_width,
            max_gen_count: caps.max_gen_count,
        }
    }
}

/// Triangle instances that can be inserted at a cut of width `width`.
fn expansion_instances(width: usize, max_index_n: usize) -> Vec<(RuleInstance, usize)> {
    let mut out = Vec::new();
    for n in 1..=max_index_n {
        if n > width {
            break;
        }
        for i in 0..=width - n {
            for offset in 0..=width - i - n {
                for rule in [RuleId::TriangleA, RuleId::TriangleB] {
                    out.push((RuleInstance::triangle(rule, i, n), offset));
                }
            }
        }
    }
    out
}

/// All steps applicable to `t` with their canonical results.
///
/// Contractions and naturality moves are matched on every pair of slices
/// that interchange can make adjacent. In mode `C`, triangle expansions are
/// offered at every cut, bounded by `limits`.
pub fn rewrites(t: &Term, mode: Mode, limits: Option<ExpansionLimits>) -> Vec<Rewrite> {
    let members = arrangements(t);
    let mut seen_steps: HashSet<RewriteStep> = HashSet::new();
    let mut out = Vec::new();

    for member in &members {
        for x in 0..member.len().saturating_sub(1) {
            let (ia, a) = member[x];
            let (ib, b) = member[x + 1];
            for (inst, dir, offset) in pair_candidates(&a, &b, mode) {
                let step = RewriteStep {
                    instance: inst,
                    direction: dir,
                    site: Site::Pair {
                        first: ia,
                        second: ib,
                    },
                    offset,
                };
                if !seen_steps.insert(step.clone()) {
                    continue;
                }
                let result = splice(
                    t.source(),
                    member,
                    x,
                    2,
                    &replacement(&inst, dir, offset, a.source()),
                );
                out.push(Rewrite { step, result });
            }
        }
    }

    if mode == Mode::C {
        if let Some(limits) = limits {
            if t.gen_count() + 2 <= limits.max_gen_count {
                let mut seen_cuts: HashSet<Vec<usize>> = HashSet::new();
                for member in &members {
                    for x in 0..=member.len() {
                        let mut below: Vec<usize> = member[..x].iter().map(|(i, _)| *i).collect();
                        below.sort_unstable();
                        if !seen_cuts.insert(below.clone()) {
                            continue;
                        }
                        let width = cut_width(t.source(), member, x);
                        for (inst, offset) in expansion_instances(width, limits.max_index_n) {
                            if width + 2 * inst.n > limits.max_width {
                                continue;
                            }
                            let step = RewriteStep {
                                instance: inst,
                                direction: Direction::Backward,
                                site: Site::Boundary {
                                    below: below.clone(),
                                },
                                offset,
                            };
                            let result = splice(
                                t.source(),
                                member,
                                x,
                                0,
                                &replacement(&inst, Direction::Backward, offset, width),
                            );
                            out.push(Rewrite { step, result });
                        }
                    }
                }
            }
        }
    }
    out
}

fn cut_width(source: usize, member: &Arrangement, x: usize) -> usize {
    if x == 0 {
        source
    } else {
        member[x - 1].1.target()
    }
}

/// Replace `remove` slices at position `at` of `member` by `insert`, then
/// canonicalise.
fn splice(source: usize, member: &Arrangement, at: usize, remove: usize, insert: &[Slice]) -> Term {
    let mut slices: Vec<Slice> = member[..at].iter().map(|(_, s)| *s).collect();
    slices.extend_from_slice(insert);
    slices.extend(member[at + remove..].iter().map(|(_, s)| *s));
    canonical(&Term::from_slices_unchecked(source, slices))
}

/// Steps applicable to `t` in `mode`, with expansions bounded by `caps`.
pub fn match_rules(t: &Term, mode: Mode, caps: &SearchCaps) -> Vec<RewriteStep> {
    rewrites(t, mode, Some(caps.into()))
        .into_iter()
        .map(|r| r.step)
        .collect()
}

/// Apply `step` to `t`. The result is canonical.
pub fn apply(t: &Term, step: &RewriteStep) -> Result<Term, RewriteError> {
    let invalid = || RewriteError::InvalidStep(step.to_string());
    let inst = step.instance;
    for member in arrangements(t) {
        match &step.site {
            Site::Pair { first, second } => {
                let Some(x) = member
                    .windows(2)
                    .position(|w| w[0].0 == *first && w[1].0 == *second)
                else {
                    continue;
                };
                let (a, b) = (member[x].1, member[x + 1].1);
                let mode = if inst.rule.is_triangle() {
                    Mode::C
                } else {
                    Mode::D
                };
                if pair_candidates(&a, &b, mode).contains(&(inst, step.direction, step.offset)) {
                    return Ok(splice(
                        t.source(),
                        &member,
                        x,
                        2,
                        &replacement(&inst, step.direction, step.offset, a.source()),
                    ));
                }
            }
            Site::Boundary { below } => {
                if !inst.rule.is_triangle() || step.direction != Direction::Backward {
                    return Err(invalid());
                }
                let x = below.len();
                if x > member.len() {
                    return Err(invalid());
                }
                let mut prefix: Vec<usize> = member[..x].iter().map(|(i, _)| *i).collect();
                prefix.sort_unstable();
                if &prefix != below {
                    continue;
                }
                let width = cut_width(t.source(), &member, x);
                if step.offset + inst.source() > width {
                    return Err(invalid());
                }
                return Ok(splice(
                    t.source(),
                    &member,
                    x,
                    0,
                    &replacement(&inst, Direction::Backward, step.offset, width),
                ));
            }
        }
    }
    Err(invalid())
}

/// A step leading from `from` to `to`, if one exists. Expansions are searched
/// up to the size of `to`.
pub fn find_step(from: &Term, to: &Term, mode: Mode) -> Option<RewriteStep> {
    let target = canonical(to);
    let limits = ExpansionLimits {
        max_index_n: to.max_index().max(1),
        max_width: target.max_width(),
        max_gen_count: to.gen_count(),
    };
    rewrites(from, mode, Some(limits))
        .into_iter()
        .find(|r| r.result == target)
        .map(|r| r.step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(source: usize, slices: &[(usize, Generator, usize)]) -> Term {
        Term::from_slices(
            source,
            slices
                .iter()
                .map(|&(l, g, r)| Slice::new(l, g, r))
                .collect(),
        )
        .unwrap()
    }

    fn caps() -> SearchCaps {
        SearchCaps {
            max_gen_count: 4,
            max_width: 6,
            max_index_n: 1,
            max_states: 10_000,
        }
    }

    #[test]
    fn instance_sides_are_well_typed() {
        for inst in RuleInstance::sweep(2, 2) {
            let (lhs, rhs) = (inst.lhs(), inst.rhs());
            assert_eq!(lhs.source(), rhs.source(), "{inst:?}");
            assert_eq!(lhs.target(), rhs.target(), "{inst:?}");
        }
    }

    #[test]
    fn triangle_a_contracts() {
        let t = term(
            1,
            &[(0, Generator::eta(0, 1), 1), (0, Generator::eps(1, 1), 0)],
        );
        let steps = match_rules(&t, Mode::C, &caps());
        let step = steps
            .iter()
            .find(|s| s.rule() == RuleId::TriangleA && s.direction == Direction::Forward)
            .expect("triangle A matches");
        assert_eq!((step.instance.i, step.instance.n), (0, 1));
        assert_eq!(apply(&t, step).unwrap(), Term::identity(1));
    }

    #[test]
    fn triangle_b_contracts() {
        let t = term(
            1,
            &[(0, Generator::eta(1, 1), 0), (0, Generator::eps(0, 1), 1)],
        );
        let step = match_rules(&t, Mode::C, &caps())
            .into_iter()
            .find(|s| s.rule() == RuleId::TriangleB && s.direction == Direction::Forward)
            .expect("triangle B matches");
        assert_eq!(apply(&t, &step).unwrap(), Term::identity(1));
    }

    #[test]
    fn nat_eta_eta_instance() {
        // (i,j,k,l,n) = (0,0,1,0,1)
        let t = term(
            0,
            &[(0, Generator::eta(0, 1), 0), (0, Generator::eta(2, 1), 0)],
        );
        let step = match_rules(&t, Mode::D, &caps())
            .into_iter()
            .find(|s| s.rule() == RuleId::NatEtaEta && s.direction == Direction::Forward)
            .unwrap();
        let inst = step.instance;
        assert_eq!((inst.i, inst.j, inst.k, inst.l, inst.n), (0, 0, 1, 0, 1));
        let expected = term(
            0,
            &[(0, Generator::eta(0, 1), 0), (0, Generator::eta(0, 1), 2)],
        );
        assert_eq!(apply(&t, &step).unwrap(), canonical(&expected));
    }

    #[test]
    fn no_triangle_moves_in_d() {
        assert!(match_rules(&Term::identity(0), Mode::D, &caps()).is_empty());
        assert!(match_rules(&Term::identity(2), Mode::D, &caps()).is_empty());
        let t = term(
            1,
            &[(0, Generator::eta(0, 1), 1), (0, Generator::eps(1, 1), 0)],
        );
        assert!(match_rules(&t, Mode::D, &caps())
            .iter()
            .all(|s| !s.rule().is_triangle()));
    }

    #[test]
    fn snake_admits_no_contraction_or_naturality() {
        let s = term(
            1,
            &[(0, Generator::eta(0, 1), 1), (1, Generator::eps(0, 1), 0)],
        );
        let steps = match_rules(&s, Mode::C, &caps());
        assert!(!steps.is_empty());
        assert!(steps
            .iter()
            .all(|st| st.direction == Direction::Backward && st.rule().is_triangle()));
        assert!(match_rules(&s, Mode::D, &caps()).is_empty());
    }

    #[test]
    fn expansions_of_id0_are_absent() {
        // Width 0 admits no triangle (i + n >= 1 wires are needed).
        assert!(match_rules(&Term::identity(0), Mode::C, &caps()).is_empty());
    }

    #[test]
    fn expansions_of_id1() {
        let results: Vec<Term> = rewrites(&Term::identity(1), Mode::C, Some((&caps()).into()))
            .into_iter()
            .map(|r| r.result)
            .collect();
        let a = term(
            1,
            &[(0, Generator::eta(0, 1), 1), (0, Generator::eps(1, 1), 0)],
        );
        let b = term(
            1,
            &[(0, Generator::eta(1, 1), 0), (0, Generator::eps(0, 1), 1)],
        );
        assert!(results.contains(&canonical(&a)));
        assert!(results.contains(&canonical(&b)));
        assert_eq!(results.len(), 2);
    }

    #[test]
    fn every_step_reverses() {
        let t = term(
            2,
            &[
                (0, Generator::eps(0, 1), 0),
                (0, Generator::eta(0, 1), 0),
                (0, Generator::eta(2, 1), 0),
            ],
        );
        for r in rewrites(&t, Mode::C, Some((&caps()).into())) {
            let back = find_step(&r.result, &t, Mode::C)
                .unwrap_or_else(|| panic!("no reverse for {}", r.step));
            assert_eq!(back.direction, r.step.direction.reversed());
            assert_eq!(back.instance, r.step.instance);
            assert_eq!(apply(&r.result, &back).unwrap(), canonical(&t));
        }
    }

    #[test]
    fn mismatched_step_is_rejected() {
        let t = term(
            1,
            &[(0, Generator::eta(0, 1), 1), (1, Generator::eps(0, 1), 0)],
        );
        let step = RewriteStep {
            instance: RuleInstance::triangle(RuleId::TriangleA, 0, 1),
            direction: Direction::Forward,
            site: Site::Pair {
                first: 0,
                second: 1,
            },
            offset: 0,
        };
        assert!(matches!(
            apply(&t, &step),
            Err(RewriteError::InvalidStep(_))
        ));
    }
}
