//! Objects and morphism terms of the free PRO on the parametric cups and caps.
//!
//! A morphism is stored as a sequence of [`Slice`]s, each one generator
//! whiskered by identity wires on both sides. Composition is diagrammatic:
//! slices are applied first to last.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An object is a number of wires; the tensor product is addition.
pub type Obj = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid generator {kind}({m},{n}): the index n must be at least 1")]
    InvalidGenerator { kind: GenKind, m: usize, n: usize },
    #[error("cannot compose: target width {target} does not match source width {next_source}")]
    NotComposable { target: usize, next_source: usize },
    #[error(
        "slice {index} expects input width {expected}, but the wires at that point number {found}"
    )]
    IllFormed {
        index: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    /// `eta(m, n): m -> m + 2n`
    Eta,
    /// `eps(m, n): m + 2n -> m`
    Eps,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::Eta => f.write_str("eta"),
            GenKind::Eps => f.write_str("eps"),
        }
    }
}

/// One of the generating arrows `eta(m,n)` or `eps(m,n)`, `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    kind: GenKind,
    m: usize,
    n: usize,
}

impl Generator {
    pub fn new(kind: GenKind, m: usize, n: usize) -> Result<Self, TermError> {
        if n == 0 {
            return Err(TermError::InvalidGenerator { kind, m, n });
        }
        Ok(Generator { kind, m, n })
    }

    /// `eta(m, n)`. Panics if `n == 0`.
    pub fn eta(m: usize, n: usize) -> Self {
        Self::new(GenKind::Eta, m, n).expect("eta index n must be positive")
    }

    /// `eps(m, n)`. Panics if `n == 0`.
    pub fn eps(m: usize, n: usize) -> Self {
        Self::new(GenKind::Eps, m, n).expect("eps index n must be positive")
    }

    pub fn kind(&self) -> GenKind {
        self.kind
    }

    /// Number of passive wires to the left of the cup/cap block.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Half the width of the cup/cap block.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> Obj {
        match self.kind {
            GenKind::Eta => self.m,
            GenKind::Eps => self.m + 2 * self.n,
        }
    }

    pub fn target(&self) -> Obj {
        match self.kind {
            GenKind::Eta => self.m + 2 * self.n,
            GenKind::Eps => self.m,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.kind, self.m, self.n)
    }
}

/// `id(left) * gen * id(right)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slice {
    pub left: usize,
    pub gen: Generator,
    pub right: usize,
}

impl Slice {
    pub fn new(left: usize, gen: Generator, right: usize) -> Self {
        Slice { left, gen, right }
    }

    pub fn source(&self) -> Obj {
        self.left + self.gen.source() + self.right
    }

    pub fn target(&self) -> Obj {
        self.left + self.gen.target() + self.right
    }

    /// Shift the whole slice by extra identity wires.
    pub fn whiskered(&self, left: usize, right: usize) -> Self {
        Slice::new(self.left + left, self.gen, self.right + right)
    }
}

/// Which presented category a term is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Naturality relations only.
    D,
    /// Naturality relations plus the triangle identities.
    C,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::D => f.write_str("D"),
            Mode::C => f.write_str("C"),
        }
    }
}

/// A morphism term: a source width and a composable list of slices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    source: Obj,
    slices: Vec<Slice>,
}

impl Term {
    pub fn identity(n: Obj) -> Self {
        Term {
            source: n,
            slices: Vec::new(),
        }
    }

    pub fn from_slices(source: Obj, slices: Vec<Slice>) -> Result<Self, TermError> {
        let mut width = source;
        for (index, slice) in slices.iter().enumerate() {
            if slice.source() != width {
                return Err(TermError::IllFormed {
                    index,
                    expected: slice.source(),
                    found: width,
                });
            }
            width = slice.target();
        }
        Ok(Term { source, slices })
    }

    /// Construct without validation; callers guarantee composability.
    pub(crate) fn from_slices_unchecked(source: Obj, slices: Vec<Slice>) -> Self {
        debug_assert!(Term::from_slices(source, slices.clone()).is_ok());
        Term { source, slices }
    }

    pub fn generator(gen: Generator) -> Self {
        Self::whisker(0, gen, 0)
    }

    pub fn whisker(left: usize, gen: Generator, right: usize) -> Self {
        let slice = Slice::new(left, gen, right);
        Term {
            source: slice.source(),
            slices: vec![slice],
        }
    }

    pub fn source(&self) -> Obj {
        self.source
    }

    pub fn target(&self) -> Obj {
        self.slices.last().map_or(self.source, Slice::target)
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn is_identity(&self) -> bool {
        self.slices.is_empty()
    }

    /// Number of generator occurrences.
    pub fn gen_count(&self) -> usize {
        self.slices.len()
    }

    /// Widths at every boundary, source first and target last.
    pub fn widths(&self) -> impl Iterator<Item = Obj> + '_ {
        std::iter::once(self.source).chain(self.slices.iter().map(Slice::target))
    }

    pub fn max_width(&self) -> Obj {
        self.widths().max().unwrap_or(self.source)
    }

    /// Largest cup/cap index `n` used by any generator (0 for identities).
    pub fn max_index(&self) -> usize {
        self.slices.iter().map(|s| s.gen.n()).max().unwrap_or(0)
    }

    /// `self` followed by `next`.
    pub fn compose(&self, next: &Term) -> Result<Term, TermError> {
        if self.target() != next.source {
            return Err(TermError::NotComposable {
                target: self.target(),
                next_source: next.source,
            });
        }
        let mut slices = self.slices.clone();
        slices.extend_from_slice(&next.slices);
        Ok(Term {
            source: self.source,
            slices,
        })
    }

    /// `self ⊗ other`, laid out as `(self ⊗ id)` then `(id ⊗ other)`.
    pub fn tensor(&self, other: &Term) -> Term {
        let target = self.target();
        let slices = self
            .slices
            .iter()
            .map(|s| s.whiskered(0, other.source))
            .chain(other.slices.iter().map(|s| s.whiskered(target, 0)))
            .collect();
        Term {
            source: self.source + other.source,
            slices,
        }
    }

    /// `id(left) * self * id(right)`.
    pub fn whiskered(&self, left: usize, right: usize) -> Term {
        Term {
            source: left + self.source + right,
            slices: self
                .slices
                .iter()
                .map(|s| s.whiskered(left, right))
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slices.is_empty() {
            return write!(f, "id({})", self.source);
        }
        let bracket = self.slices.len() > 1;
        for (index, slice) in self.slices.iter().enumerate() {
            if index > 0 {
                f.write_str(" ; ")?;
            }
            let mut parts = Vec::with_capacity(3);
            if slice.left > 0 {
                parts.push(format!("id({})", slice.left));
            }
            parts.push(slice.gen.to_string());
            if slice.right > 0 {
                parts.push(format!("id({})", slice.right));
            }
            if bracket && parts.len() > 1 {
                write!(f, "({})", parts.join(" * "))?;
            } else {
                f.write_str(&parts.join(" * "))?;
            }
        }
        Ok(())
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        crate::syntax::parse_expr(&text).map_err(serde::de::Error::custom)
    }
}
