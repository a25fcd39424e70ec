//! The battery of checks run by `monocat suite`.
//!
//! Checks that assert a theorem report `Pass` or `Fail`. Bounded searches that
//! can only gather support for an unbounded claim report `Evidence`.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::duality::{snake_term, transpose, untranspose};
use crate::functor::{FunctorError, FunctorSpec, IsoVerdict, Obstruction};
use crate::interchange::canonical;
use crate::matrix::Mat;
use crate::rewrite::{RuleId, RuleInstance};
use crate::scalar::{Field, FieldError, Scalar, ScalarVisitor};
use crate::search::{
    enum_hom, equal_with_threads, explore_states, slices_at, Equality, HomEnumeration, SearchCaps,
};
use crate::term::{Generator, Mode, Slice, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Caps for equality queries and the exploration from the snake.
    pub caps: SearchCaps,
    /// Caps for hom-set enumeration.
    pub hom_caps: SearchCaps,
    /// Caps for the automorphism search, which composes every candidate pair.
    pub auto_caps: SearchCaps,
    pub dims: Vec<usize>,
    pub phi_seeds: Vec<u64>,
    pub field: Field,
    /// Samples per forbidden shape.
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Test hook: check a deliberately broken version of this rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_rule: Option<RuleId>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            caps: SearchCaps::default(),
            hom_caps: SearchCaps {
                max_gen_count: 4,
                max_width: 5,
                max_index_n: 1,
                max_states: 20_000,
            },
            auto_caps: SearchCaps {
                max_gen_count: 3,
                max_width: 5,
                max_index_n: 1,
                max_states: 20_000,
            },
            dims: vec![1, 2],
            phi_seeds: vec![1, 2, 3, 4, 5],
            field: Field::Rationals,
            samples: 100,
            seed: 0,
            threads: None,
            corrupt_rule: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("dims must be a non-empty subset of {{1, 2, 3}}, got {0:?}")]
    Dims(Vec<usize>),
    #[error("invalid caps {0:?}")]
    Caps(SearchCaps),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dims.is_empty() || self.dims.iter().any(|d| !(1..=3).contains(d)) {
            return Err(ConfigError::Dims(self.dims.clone()));
        }
        for caps in [&self.caps, &self.hom_caps, &self.auto_caps] {
            caps.validate().map_err(|_| ConfigError::Caps(*caps))?;
        }
        self.field.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Pass,
    Fail,
    Evidence,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states_visited: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
    pub timing_ms: u64,
}

impl CheckResult {
    fn new(name: &str, status: Status, details: Value) -> Self {
        CheckResult {
            name: name.to_string(),
            status,
            details,
            states_visited: None,
            path: None,
            timing_ms: 0,
        }
    }

    fn pass_if(name: &str, ok: bool, details: Value) -> Self {
        Self::new(name, if ok { Status::Pass } else { Status::Fail }, details)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn zero_timings(&mut self) {
        for c in &mut self.checks {
            c.timing_ms = 0;
        }
    }
}

type CheckFn = fn(&SuiteConfig) -> CheckResult;

pub const CHECK_NAMES: [&str; 9] = [
    "rule_soundness",
    "tower_snakes",
    "closedness",
    "non_rigidity",
    "non_rigidity_control",
    "functor_blindness",
    "skeletal_obstructions",
    "r_category",
    "automorphisms",
];

const CHECKS: [CheckFn; 9] = [
    check_rule_soundness,
    check_tower_snakes,
    check_closedness,
    check_not_rigid_evidence,
    check_not_rigid_control,
    check_functor_blindness,
    check_skeletal_and_obstructions,
    check_r_category,
    check_automorphisms,
];

/// Runs every check. Results are listed in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> Result<SuiteReport, ConfigError> {
    cfg.validate()?;
    let checks = CHECKS
        .par_iter()
        .map(|check| {
            let started = Instant::now();
            let mut result = check(cfg);
            result.timing_ms = started.elapsed().as_millis() as u64;
            result
        })
        .collect();
    Ok(SuiteReport {
        config: cfg.clone(),
        checks,
    })
}

/// Runs a single check by name.
pub fn run_check(cfg: &SuiteConfig, name: &str) -> Option<CheckResult> {
    let ix = CHECK_NAMES.iter().position(|n| *n == name)?;
    Some(CHECKS[ix](cfg))
}

/// The identity form followed by one seeded random form per seed.
fn specs<S: Scalar>(d: usize, seeds: &[u64]) -> Vec<(String, FunctorSpec<S>)> {
    let mut out = vec![("identity".to_string(), FunctorSpec::identity(d))];
    for &seed in seeds {
        out.push((format!("random:{seed}"), FunctorSpec::random(d, seed)));
    }
    out
}

fn field_failure(name: &str, e: FieldError) -> CheckResult {
    CheckResult::new(name, Status::Fail, json!({ "error": e.to_string() }))
}

/// Breaks an instance by exchanging the whiskers of one slice with unequal
/// whiskers: the first such slice of a triangle's left side, or the last one
/// of a naturality rule's right side. Instances without one are unchanged.
fn corrupted_sides(inst: &RuleInstance) -> (Term, Term) {
    let (lhs, rhs) = (inst.lhs(), inst.rhs());
    let triangle = inst.rule.is_triangle();
    let victim = if triangle { &lhs } else { &rhs };
    let mut slices = victim.slices().to_vec();
    let uneven = |s: &Slice| s.left != s.right;
    let ix = if triangle {
        slices.iter().position(uneven)
    } else {
        slices.iter().rposition(uneven)
    };
    let Some(ix) = ix else {
        return (lhs, rhs);
    };
    let Slice { left, gen, right } = slices[ix];
    slices[ix] = Slice::new(right, gen, left);
    let broken = Term::from_slices(victim.source(), slices).expect("whisker swap keeps widths");
    if triangle {
        (broken, rhs)
    } else {
        (lhs, broken)
    }
}

/// Both sides of every small relation instance have the same image.
pub fn check_rule_soundness(cfg: &SuiteConfig) -> CheckResult {
    struct Sweep<'a>(&'a SuiteConfig);
    impl ScalarVisitor for Sweep<'_> {
        type Output = CheckResult;
        fn visit<S: Scalar>(self) -> CheckResult {
            let cfg = self.0;
            let instances = RuleInstance::sweep(2, 2);
            let mut jobs = Vec::new();
            for &d in &cfg.dims {
                for (phi, spec) in specs::<S>(d, &cfg.phi_seeds) {
                    jobs.push((d, phi, spec));
                }
            }
            let per_job: Vec<(usize, usize, Vec<String>)> = jobs
                .par_iter()
                .map(|(d, phi, spec)| {
                    let mut failures = Vec::new();
                    let (mut checked, mut too_large) = (0, 0);
                    for inst in &instances {
                        let (lhs, rhs) = if cfg.corrupt_rule == Some(inst.rule) {
                            corrupted_sides(inst)
                        } else {
                            (inst.lhs(), inst.rhs())
                        };
                        match spec.check_rule_instance(&lhs, &rhs) {
                            Ok(true) => checked += 1,
                            Ok(false) => failures.push(format!("{inst:?} d={d} phi={phi}")),
                            Err(FunctorError::TooLarge { .. }) => too_large += 1,
                            Err(e) => failures.push(format!("{inst:?} d={d} phi={phi}: {e}")),
                        }
                    }
                    (checked, too_large, failures)
                })
                .collect();
            let checked: usize = per_job.iter().map(|(c, _, _)| c).sum();
            let too_large: usize = per_job.iter().map(|(_, t, _)| t).sum();
            let failures: Vec<String> = per_job.into_iter().flat_map(|(_, _, f)| f).collect();
            CheckResult::pass_if(
                "rule_soundness",
                failures.is_empty(),
                json!({
                    "field": S::field_name(),
                    "instances": instances.len(),
                    "evaluations_equal": checked,
                    "skipped_too_large": too_large,
                    "failures": failures.len(),
                    "first_failures": failures.iter().take(5).collect::<Vec<_>>(),
                }),
            )
        }
    }
    cfg.field
        .visit(Sweep(cfg))
        .unwrap_or_else(|e| field_failure("rule_soundness", e))
}

/// The tower duality maps satisfy both snake identities as matrices.
pub fn tower_snake_holds<S: Scalar>(spec: &FunctorSpec<S>, n: usize) -> (bool, bool) {
    let d = spec.dim();
    let id_n = Mat::<S>::identity(d.pow(n as u32));
    let (coev, ev) = (spec.coev_mat(n), spec.ev_mat(n));
    let first = id_n.kron(&ev).matmul(&coev.kron(&id_n));
    let second = ev.kron(&id_n).matmul(&id_n.kron(&coev));
    (first.is_identity(), second.is_identity())
}

pub fn check_tower_snakes(cfg: &SuiteConfig) -> CheckResult {
    struct Snakes<'a>(&'a SuiteConfig);
    impl ScalarVisitor for Snakes<'_> {
        type Output = CheckResult;
        fn visit<S: Scalar>(self) -> CheckResult {
            let mut failures = Vec::new();
            let mut checked = 0;
            for &d in &self.0.dims {
                for (phi, spec) in specs::<S>(d, &self.0.phi_seeds) {
                    for n in 1..=3 {
                        let (a, b) = tower_snake_holds(&spec, n);
                        checked += 2;
                        if !(a && b) {
                            failures.push(format!("d={d} phi={phi} n={n}"));
                        }
                    }
                }
            }
            CheckResult::pass_if(
                "tower_snakes",
                failures.is_empty(),
                json!({ "field": S::field_name(), "identities_checked": checked, "failures": failures }),
            )
        }
    }
    cfg.field
        .visit(Snakes(cfg))
        .unwrap_or_else(|e| field_failure("tower_snakes", e))
}

/// Caps large enough to hold both terms, with room for one expansion.
fn caps_for(cfg: &SuiteConfig, terms: &[&Term]) -> SearchCaps {
    let mut caps = cfg.caps;
    for t in terms {
        caps.max_gen_count = caps.max_gen_count.max(t.gen_count() + 2);
        caps.max_width = caps.max_width.max(canonical(t).max_width());
        caps.max_index_n = caps.max_index_n.max(t.max_index());
    }
    caps
}

fn path_len(eq: &Equality) -> Option<usize> {
    eq.path().map(|p| p.len())
}

/// The triangle composites are identities in one step, and bending a
/// generator back and forth returns it within two steps.
pub fn check_closedness(cfg: &SuiteConfig) -> CheckResult {
    let mut failures = Vec::new();
    let mut triangles = 0;
    for rule in [RuleId::TriangleA, RuleId::TriangleB] {
        for i in 0..=2 {
            for n in 1..=2 {
                let inst = RuleInstance::triangle(rule, i, n);
                let lhs = inst.lhs();
                let id = Term::identity(i + n);
                let caps = caps_for(cfg, &[&lhs]);
                let eq = equal_with_threads(&lhs, &id, Mode::C, &caps, cfg.threads);
                triangles += 1;
                let ok = eq.as_ref().ok().and_then(path_len) == Some(1)
                    && eq
                        .as_ref()
                        .ok()
                        .and_then(Equality::path)
                        .is_some_and(|p| p.steps.iter().all(|s| s.step.rule().is_triangle()));
                if !ok {
                    failures.push(format!("{rule} i={i} n={n}"));
                }
            }
        }
    }

    let mut roundtrips = Vec::new();
    for g in small_generators() {
        let t = Term::generator(g);
        for x in 1..=2 {
            if t.source() >= x {
                let there = transpose(&t, x).expect("source wide enough");
                let back = untranspose(&there, x).expect("target wide enough");
                roundtrips.push((format!("untranspose(transpose({g}, {x}))"), back, t.clone()));
            }
            if t.target() >= x {
                let there = untranspose(&t, x).expect("target wide enough");
                let back = transpose(&there, x).expect("source wide enough");
                roundtrips.push((format!("transpose(untranspose({g}, {x}))"), back, t.clone()));
            }
        }
    }
    let results: Vec<(String, Option<usize>)> = roundtrips
        .par_iter()
        .map(|(label, back, t)| {
            let caps = caps_for(cfg, &[back, t]);
            let eq = equal_with_threads(back, t, Mode::C, &caps, Some(1));
            (label.clone(), eq.ok().as_ref().and_then(path_len))
        })
        .collect();
    let mut longest = 0;
    for (label, len) in &results {
        match len {
            Some(l) if *l <= 2 => longest = longest.max(*l),
            _ => failures.push(format!("{label}: {len:?}")),
        }
    }
    CheckResult::pass_if(
        "closedness",
        failures.is_empty(),
        json!({
            "triangle_instances": triangles,
            "roundtrips": results.len(),
            "longest_roundtrip_path": longest,
            "failures": failures,
        }),
    )
}

fn small_generators() -> Vec<Generator> {
    let mut out = Vec::new();
    for m in 0..=1 {
        for n in 1..=2 {
            out.push(Generator::eta(m, n));
            out.push(Generator::eps(m, n));
        }
    }
    out
}

/// Bounded exploration from the snake never reaches the identity. Also
/// confirms that every visited term still has the identity as its image.
pub fn check_not_rigid_evidence(cfg: &SuiteConfig) -> CheckResult {
    let s = snake_term();
    let exploration = explore_states(&s, Mode::C, &cfg.caps, cfg.threads);
    let spec = FunctorSpec::<crate::Rational>::identity(2);
    let image_failures: Vec<String> = exploration
        .states
        .par_iter()
        .filter(|t| !spec.eval_term(t).is_ok_and(|m| m.is_identity()))
        .map(|t| t.render())
        .collect();
    let report = &exploration.report;
    let status = if report.identity_found || !image_failures.is_empty() {
        Status::Fail
    } else {
        Status::Evidence
    };
    let mut result = CheckResult::new(
        "non_rigidity",
        status,
        json!({
            "start": s.render(),
            "identity_found": report.identity_found,
            "truncated": report.truncated,
            "levels": report.levels,
            "min_gen_count_seen": report.min_gen_count_seen,
            "caps": report.caps,
            "fingerprint": format!("{:016x}", exploration.fingerprint()),
            "states_with_non_identity_image": image_failures.len(),
        }),
    );
    result.states_visited = Some(report.states_visited);
    result.path = report
        .witness
        .as_ref()
        .map(|w| w.steps.iter().map(|s| s.step.to_string()).collect());
    result
}

/// The same exploration from a triangle composite does reach the identity.
pub fn check_not_rigid_control(cfg: &SuiteConfig) -> CheckResult {
    let start = RuleInstance::triangle(RuleId::TriangleA, 0, 1).lhs();
    let exploration = explore_states(&start, Mode::C, &cfg.caps, cfg.threads);
    let report = exploration.report;
    let mut result = CheckResult::pass_if(
        "non_rigidity_control",
        report.identity_found,
        json!({
            "start": start.render(),
            "identity_found": report.identity_found,
            "truncated": report.truncated,
        }),
    );
    result.states_visited = Some(report.states_visited);
    result.path = report
        .witness
        .map(|w| w.steps.iter().map(|s| s.step.to_string()).collect());
    result
}

/// The snake has the identity image under every tested spec, yet bounded
/// rewriting cannot relate it to the identity.
pub fn check_functor_blindness(cfg: &SuiteConfig) -> CheckResult {
    struct Images<'a>(&'a SuiteConfig);
    impl ScalarVisitor for Images<'_> {
        type Output = (usize, Vec<String>);
        fn visit<S: Scalar>(self) -> (usize, Vec<String>) {
            let s = snake_term();
            let mut checked = 0;
            let mut failures = Vec::new();
            for &d in &self.0.dims {
                for (phi, spec) in specs::<S>(d, &self.0.phi_seeds) {
                    checked += 1;
                    if !spec.eval_term(&s).is_ok_and(|m| m.is_identity()) {
                        failures.push(format!("d={d} phi={phi}"));
                    }
                }
            }
            (checked, failures)
        }
    }
    let (checked, failures) = match cfg.field.visit(Images(cfg)) {
        Ok(r) => r,
        Err(e) => return field_failure("functor_blindness", e),
    };
    let eq = equal_with_threads(
        &snake_term(),
        &Term::identity(1),
        Mode::C,
        &cfg.caps,
        cfg.threads,
    );
    let (unknown, states) = match &eq {
        Ok(Equality::Unknown { states_visited, .. }) => (true, Some(*states_visited)),
        _ => (false, None),
    };
    let mut result = CheckResult::pass_if(
        "functor_blindness",
        failures.is_empty() && unknown,
        json!({
            "specs_tested": checked,
            "image_not_identity": failures,
            "equality": match &eq {
                Ok(Equality::Equal(_)) => "Equal",
                Ok(Equality::Unknown { .. }) => "Unknown",
                Err(_) => "error",
            },
        }),
    );
    result.states_visited = states;
    result
}

/// A random term of at most `steps` slices starting at `source`.
pub fn random_term(rng: &mut impl Rng, source: usize, steps: usize, caps: &SearchCaps) -> Term {
    let mut slices = Vec::new();
    let mut width = source;
    for _ in 0..steps {
        let options = slices_at(width, caps);
        if options.is_empty() {
            break;
        }
        let s = options[rng.gen_range(0..options.len())];
        width = s.target();
        slices.push(s);
    }
    Term::from_slices(source, slices).expect("slices chosen to fit")
}

/// Samples of the two forbidden shapes: a cap applied first, or a cup
/// applied last, around a random term.
pub fn forbidden_samples(seed: u64, count: usize, caps: &SearchCaps) -> (Vec<Term>, Vec<Term>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leading = Vec::with_capacity(count);
    let mut trailing = Vec::with_capacity(count);
    let small = SearchCaps {
        max_width: caps.max_width.min(6),
        max_index_n: caps.max_index_n.min(2),
        ..*caps
    };
    while leading.len() < count {
        let (i1, j, i2) = (
            rng.gen_range(0..=1),
            rng.gen_range(0..=1),
            rng.gen_range(0..=1),
        );
        let k = rng.gen_range(1..=small.max_index_n);
        let cap = Term::whisker(i1, Generator::eps(j, k), i2);
        let steps = rng.gen_range(0..=2);
        let g = random_term(&mut rng, cap.target(), steps, &small);
        leading.push(cap.compose(&g).expect("g starts at the cap's target"));
    }
    while trailing.len() < count {
        let (j1, l, j2) = (
            rng.gen_range(0..=1),
            rng.gen_range(0..=1),
            rng.gen_range(0..=1),
        );
        let m = rng.gen_range(1..=small.max_index_n);
        let cup = Term::whisker(j1, Generator::eta(l, m), j2);
        let steps = rng.gen_range(0..=2);
        let g = random_term(&mut rng, cup.source(), steps, &small);
        // Run g backwards from the cup's source to get g: ? -> cup.source().
        let g = reverse_term(&g);
        trailing.push(g.compose(&cup).expect("g ends at the cup's source"));
    }
    (leading, trailing)
}

/// The mirror image in the horizontal axis: slices in reverse order with
/// cups and caps exchanged.
pub fn reverse_term(t: &Term) -> Term {
    let slices: Vec<Slice> = t
        .slices()
        .iter()
        .rev()
        .map(|s| {
            let g = match s.gen.kind() {
                crate::term::GenKind::Eta => Generator::eps(s.gen.m(), s.gen.n()),
                crate::term::GenKind::Eps => Generator::eta(s.gen.m(), s.gen.n()),
            };
            Slice::new(s.left, g, s.right)
        })
        .collect();
    Term::from_slices(t.target(), slices).expect("mirror image is well formed")
}

pub fn check_skeletal_and_obstructions(cfg: &SuiteConfig) -> CheckResult {
    struct Obstructions<'a>(&'a SuiteConfig, usize);
    impl ScalarVisitor for Obstructions<'_> {
        type Output = CheckResult;
        fn visit<S: Scalar>(self) -> CheckResult {
            let (cfg, d) = (self.0, self.1);
            let (leading, trailing) = forbidden_samples(cfg.seed, cfg.samples, &cfg.caps);
            let mut failures = Vec::new();
            let mut counts = [0usize; 2];
            for (name, spec) in specs::<S>(d, &cfg.phi_seeds[..cfg.phi_seeds.len().min(1)]) {
                for t in leading.iter().chain(&trailing) {
                    match spec.iso_obstruction(t) {
                        Ok(IsoVerdict::NotIso(Obstruction::NonSquare { .. })) => counts[0] += 1,
                        Ok(IsoVerdict::NotIso(Obstruction::RankDeficient { .. })) => counts[1] += 1,
                        other => failures.push(format!("{} phi={name}: {other:?}", t.render())),
                    }
                }
            }

            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
            let mut non_square = 0;
            let mut attempts = 0;
            let spec = FunctorSpec::<S>::identity(d);
            while non_square < 20 && attempts < 10_000 {
                attempts += 1;
                let source = rng.gen_range(0..=3);
                let steps = rng.gen_range(1..=3);
                let t = random_term(&mut rng, source, steps, &cfg.caps);
                if t.source() == t.target() {
                    continue;
                }
                non_square += 1;
                if !matches!(
                    spec.iso_obstruction(&t),
                    Ok(IsoVerdict::NotIso(Obstruction::NonSquare { .. }))
                ) {
                    failures.push(format!("{}: expected non-square", t.render()));
                }
            }
            let id3 = spec.iso_obstruction(&Term::identity(3));
            if id3 != Ok(IsoVerdict::Inconclusive) {
                failures.push(format!("id(3): {id3:?}"));
            }
            let cap_rank = spec
                .eval_generator(Generator::eps(0, 1))
                .map(|m| (m.rank(), m.cols()));
            CheckResult::pass_if(
                "skeletal_obstructions",
                failures.is_empty() && non_square == 20,
                json!({
                    "field": S::field_name(),
                    "dim": d,
                    "forbidden_samples_per_shape": leading.len(),
                    "not_iso_by_shape": counts[0],
                    "not_iso_by_rank": counts[1],
                    "non_square_terms": non_square,
                    "cap_rank_of_columns": cap_rank.ok(),
                    "failures": failures,
                }),
            )
        }
    }
    let Some(d) = cfg.dims.iter().copied().filter(|&d| d >= 2).min() else {
        return CheckResult::new(
            "skeletal_obstructions",
            Status::Skipped,
            json!({ "reason": "needs a dimension of at least 2" }),
        );
    };
    cfg.field
        .visit(Obstructions(cfg, d))
        .unwrap_or_else(|e| field_failure("skeletal_obstructions", e))
}

/// Outcome of matching `Hom(y + x, 0)` against `Hom(y, x)`.
#[derive(Debug, Clone, Serialize)]
pub struct BendingCheck {
    pub y: usize,
    pub x: usize,
    pub bent_classes: usize,
    pub straight_classes: usize,
    /// Classes below the generator cap on each side, where both maps must be
    /// defined.
    pub bent_in_range: usize,
    pub straight_in_range: usize,
    /// Classes of the bijection: components of the link graph.
    pub matched: usize,
    /// Enumerated classes beyond one per side in a component.
    pub duplicates: usize,
    pub roundtrips: usize,
    pub failures: Vec<String>,
    pub unresolved_pairs: usize,
}

/// Transpose and untranspose between enumerated class sets.
///
/// A link joins a class to the class its image was located in. A link is
/// certified when the roundtrip of its source class is provably equal to the
/// source: then the two classes correspond in both directions. Every class
/// below the generator cap needs a certified link. Linked classes form
/// components, one per class of the bijection. Extra classes in a component
/// are provably equal to the others and are reported as duplicates of the
/// enumeration.
pub fn bending_bijection(y: usize, x: usize, caps: &SearchCaps) -> BendingCheck {
    // Bending a term of width w on the straight side yields width w + x.
    let bent_caps = SearchCaps {
        max_width: caps.max_width + x,
        ..*caps
    };
    let bent = enum_hom(y + x, 0, Mode::C, &bent_caps);
    let straight = enum_hom(y, x, Mode::C, caps);
    let mut failures = Vec::new();
    let small = |t: &Term| t.gen_count() < caps.max_gen_count;

    // Each map is also needed on the images of the other, which may lie
    // above the generator cap.
    let first_back = map_classes(&straight, &bent, |t| untranspose(t, x), |_, t| small(t));
    let hit: HashSet<usize> = first_back.iter().flatten().copied().collect();
    let forward = map_classes(
        &bent,
        &straight,
        |t| transpose(t, x),
        |c, t| small(t) || hit.contains(&c),
    );
    let hit: HashSet<usize> = forward.iter().flatten().copied().collect();
    let backward = map_classes(
        &straight,
        &bent,
        |t| untranspose(t, x),
        |b, t| small(t) || hit.contains(&b),
    );

    for (label, from, map) in [
        ("bent", &bent, &forward),
        ("straight", &straight, &backward),
    ] {
        for (c, class) in from.classes.iter().enumerate() {
            if small(&class.representative) && map[c].is_none() {
                failures.push(format!(
                    "{label} class {} has no located image",
                    class.representative.render()
                ));
            }
        }
    }

    // Roundtrips of every link source.
    let bend_back = |f: &Term| untranspose(&transpose(f, x).expect("wide"), x).expect("wide");
    let straighten_back = |g: &Term| transpose(&untranspose(g, x).expect("wide"), x).expect("wide");
    let mut pairs = Vec::new();
    for (c, class) in bent.classes.iter().enumerate() {
        if forward[c].is_some() {
            let f = &class.representative;
            pairs.push((bend_back(f), f.clone()));
        }
    }
    for (b, class) in straight.classes.iter().enumerate() {
        if backward[b].is_some() {
            let g = &class.representative;
            pairs.push((straighten_back(g), g.clone()));
        }
    }
    let outcomes: Vec<Option<String>> = pairs
        .par_iter()
        .map(|(back, t)| {
            // Sliding the cup or cap back through the term widens it by 2x.
            let mut c = bent_caps;
            c.max_gen_count = c.max_gen_count.max(back.gen_count()) + 2;
            c.max_width = c.max_width.max(canonical(back).max_width()) + 2 * x;
            c.max_states = c.max_states.max(100_000);
            match equal_with_threads(back, t, Mode::C, &c, Some(1)) {
                Ok(Equality::Equal(_)) => None,
                other => Some(format!("roundtrip of {}: {other:?}", t.render())),
            }
        })
        .collect();
    failures.extend(outcomes.into_iter().flatten());

    // Components of the link graph; straight class b is node bent.len() + b.
    let offset = bent.len();
    let mut parent: Vec<usize> = (0..offset + straight.len()).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let links = forward
        .iter()
        .enumerate()
        .filter_map(|(c, b)| b.map(|b| (c, b)))
        .chain(
            backward
                .iter()
                .enumerate()
                .filter_map(|(b, c)| c.map(|c| (c, b))),
        );
    for (c, b) in links {
        let (rc, rb) = (root(&mut parent, c), root(&mut parent, offset + b));
        parent[rc] = rb;
    }
    let mut sizes: HashMap<usize, (usize, usize)> = HashMap::new();
    let linked = |v: usize| {
        if v < offset {
            forward[v].is_some() || backward.contains(&Some(v))
        } else {
            backward[v - offset].is_some() || forward.contains(&Some(v - offset))
        }
    };
    for v in 0..parent.len() {
        if linked(v) {
            let r = root(&mut parent, v);
            let e = sizes.entry(r).or_default();
            if v < offset {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let matched = sizes.len();
    let duplicates = sizes.values().map(|(p, q)| p + q - 2).sum();

    let in_range = |h: &HomEnumeration| {
        h.classes
            .iter()
            .filter(|c| small(&c.representative))
            .count()
    };
    BendingCheck {
        y,
        x,
        bent_classes: bent.len(),
        straight_classes: straight.len(),
        bent_in_range: in_range(&bent),
        straight_in_range: in_range(&straight),
        matched,
        duplicates,
        roundtrips: pairs.len(),
        failures,
        unresolved_pairs: bent.unresolved.len() + straight.unresolved.len(),
    }
}

fn map_classes(
    from: &HomEnumeration,
    to: &HomEnumeration,
    f: impl Fn(&Term) -> Result<Term, crate::term::TermError>,
    include: impl Fn(usize, &Term) -> bool,
) -> Vec<Option<usize>> {
    from.classes
        .iter()
        .enumerate()
        .map(|(ix, c)| {
            if !include(ix, &c.representative) {
                return None;
            }
            f(&c.representative).ok().and_then(|t| to.locate(&t))
        })
        .collect()
}

pub fn check_r_category(cfg: &SuiteConfig) -> CheckResult {
    let results: Vec<BendingCheck> = (0..=2)
        .map(|y| bending_bijection(y, 1, &cfg.hom_caps))
        .collect();
    let ok = results.iter().all(|r| r.failures.is_empty());
    CheckResult::pass_if(
        "r_category",
        ok,
        json!({ "x": 1, "hom_caps": cfg.hom_caps, "cases": results }),
    )
}

/// Enumerated endomorphisms of 1 and 2 with an enumerated two-sided inverse
/// are all equal to the identity. Candidate inverses are first filtered by
/// their images, since `F(a) F(b) = I` is necessary for `a ; b = id`.
pub fn check_automorphisms(cfg: &SuiteConfig) -> CheckResult {
    let spec = FunctorSpec::<crate::Rational>::random(2, 1);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for w in 1..=2 {
        let hom = enum_hom(w, w, Mode::C, &cfg.auto_caps);
        let id_class = hom.class_of(&Term::identity(w));
        let images: Vec<Option<Mat<crate::Rational>>> = hom
            .classes
            .par_iter()
            .map(|c| spec.eval_term(&c.representative).ok())
            .collect();
        let mut by_image: HashMap<&Mat<crate::Rational>, Vec<usize>> = HashMap::new();
        for (b, image) in images.iter().enumerate() {
            if let Some(m) = image {
                by_image.entry(m).or_default().push(b);
            }
        }
        let mut candidates = 0;
        let mut automorphisms = Vec::new();
        for (a, ca) in hom.classes.iter().enumerate() {
            let Some(inverse_image) = images[a].as_ref().and_then(Mat::inverse) else {
                continue;
            };
            let partners = by_image.get(&inverse_image).cloned().unwrap_or_default();
            candidates += partners.len();
            let invertible = partners.iter().any(|&b| {
                let cb = &hom.classes[b];
                let left = ca.representative.compose(&cb.representative).expect("endo");
                let right = cb.representative.compose(&ca.representative).expect("endo");
                id_class.is_some()
                    && hom.locate(&left) == id_class
                    && hom.locate(&right) == id_class
            });
            if invertible {
                automorphisms.push(a);
                if Some(a) != id_class {
                    failures.push(format!("{} is invertible", ca.representative.render()));
                }
            }
        }
        summary.push(json!({
            "object": w,
            "classes": hom.len(),
            "candidate_pairs": candidates,
            "automorphism_classes": automorphisms.len(),
        }));
    }
    let status = if failures.is_empty() {
        Status::Evidence
    } else {
        Status::Fail
    };
    CheckResult::new(
        "automorphisms",
        status,
        json!({ "auto_caps": cfg.auto_caps, "objects": summary, "failures": failures }),
    )
}
