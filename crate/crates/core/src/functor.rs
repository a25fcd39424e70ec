//! The strong monoidal functor into finite-dimensional vector spaces.
//!
//! A spec fixes `V = k^d` and an invertible bilinear form `B`, read as the
//! isomorphism `V -> V*`. The self-duality maps are
//!
//! ```text
//! ev(v (x) w)   = v^T B w
//! coev(1)       = sum_{a,b} (B^-1)[a][b] e_a (x) e_b
//! ```
//!
//! and for `V^(x)n` they nest: the innermost pair of tensor factors is
//! contracted first. `eta(m,n)` maps to `id_{V^m} (x) coev_n`, `eps(m,n)` to
//! `id_{V^m} (x) ev_n`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::term::{GenKind, Generator, Obj, Term};

/// Default guard on `d^width`.
pub const DEFAULT_MAX_DIM: usize = 1 << 20;
/// Guard on the number of entries of any intermediate matrix.
const MAX_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("dimension {dim}^{width} exceeds the configured cap of {cap}")]
    TooLarge {
        dim: usize,
        width: usize,
        cap: usize,
    },
    #[error("shape mismatch: {lhs_source}->{lhs_target} vs {rhs_source}->{rhs_target}")]
    ShapeMismatch {
        lhs_source: Obj,
        lhs_target: Obj,
        rhs_source: Obj,
        rhs_target: Obj,
    },
    #[error("phi is not invertible")]
    NotInvertible,
    #[error("phi must be a non-empty square matrix, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },
    #[error("phi file, line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub struct FunctorSpec<S> {
    dim: usize,
    phi: Mat<S>,
    phi_inv: Mat<S>,
    max_dim: usize,
}

pub type RationalSpec = FunctorSpec<BigRational>;

impl<S: Scalar> Clone for FunctorSpec<S> {
    fn clone(&self) -> Self {
        FunctorSpec {
            dim: self.dim,
            phi: self.phi.clone(),
            phi_inv: self.phi_inv.clone(),
            max_dim: self.max_dim,
        }
    }
}

impl<S: Scalar> std::fmt::Debug for FunctorSpec<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctorSpec")
            .field("dim", &self.dim)
            .field("phi", &self.phi.to_strings())
            .finish()
    }
}

/// Outcome of the isomorphism obstruction test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoVerdict {
    NotIso(Obstruction),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// Distinct objects are never isomorphic.
    NonSquare { source: Obj, target: Obj },
    /// The image has a kernel (or cokernel).
    RankDeficient {
        rank: usize,
        dim: usize,
        shape: Option<ForbiddenShape>,
    },
}

/// The two presentations that can never be invertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForbiddenShape {
    /// A cap applied first, then anything.
    LeadingEps,
    /// Anything, then a cup applied last.
    TrailingEta,
}

impl<S: Scalar> FunctorSpec<S> {
    pub fn new(phi: Mat<S>) -> Result<Self, FunctorError> {
        if !phi.is_square() || phi.rows() == 0 {
            return Err(FunctorError::BadShape {
                rows: phi.rows(),
                cols: phi.cols(),
            });
        }
        let phi_inv = phi.inverse().ok_or(FunctorError::NotInvertible)?;
        Ok(FunctorSpec {
            dim: phi.rows(),
            phi,
            phi_inv,
            max_dim: DEFAULT_MAX_DIM,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(Mat::identity(dim)).expect("identity is invertible")
    }

    /// A seeded invertible form with small integer entries.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let rows = (0..dim)
                .map(|_| {
                    (0..dim)
                        .map(|_| S::from_i64(rng.gen_range(-3..=3)))
                        .collect()
                })
                .collect();
            if let Ok(spec) = Self::new(Mat::from_rows(rows)) {
                return spec;
            }
        }
    }

    /// Parse `d` on the first line, then `d` rows of `d` entries written as
    /// integers or `num/den`.
    pub fn from_phi_text(text: &str) -> Result<Self, FunctorError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines.next().ok_or(FunctorError::Parse {
            line: 1,
            message: "missing dimension".into(),
        })?;
        let dim: usize = first.parse().map_err(|_| FunctorError::Parse {
            line,
            message: format!("expected a dimension, found {first:?}"),
        })?;
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line, text) = lines.next().ok_or(FunctorError::Parse {
                line: line + rows.len() + 1,
                message: format!("expected {dim} rows"),
            })?;
            let row = text
                .split_whitespace()
                .map(|tok| {
                    parse_entry::<S>(tok).ok_or_else(|| FunctorError::Parse {
                        line,
                        message: format!("bad entry {tok:?}"),
                    })
                })
                .collect::<Result<Vec<S>, _>>()?;
            if row.len() != dim {
                return Err(FunctorError::Parse {
                    line,
                    message: format!("expected {dim} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(FunctorError::Parse {
                line,
                message: "trailing content".into(),
            });
        }
        Self::new(Mat::from_rows(rows))
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self) -> &Mat<S> {
        &self.phi
    }

    fn space_dim(&self, width: usize) -> Result<usize, FunctorError> {
        let too_large = FunctorError::TooLarge {
            dim: self.dim,
            width,
            cap: self.max_dim,
        };
        let size = u32::try_from(width)
            .ok()
            .and_then(|w| self.dim.checked_pow(w))
            .ok_or(too_large.clone())?;
        if size > self.max_dim {
            return Err(too_large);
        }
        Ok(size)
    }

    /// `coev` for `V^(x)n`, a `d^2n x 1` column.
    pub fn coev_mat(&self, n: usize) -> Mat<S> {
        let d = self.dim;
        let base = Mat::from_rows(
            (0..d * d)
                .map(|ab| vec![self.phi_inv.get(ab / d, ab % d).clone()])
                .collect(),
        );
        let mut acc = Mat::identity(1);
        for _ in 0..n {
            let v = Mat::identity(d);
            acc = v.kron(&acc).kron(&v).matmul(&base);
        }
        acc
    }

    /// `ev` for `V^(x)n`, a `1 x d^2n` row.
    pub fn ev_mat(&self, n: usize) -> Mat<S> {
        let d = self.dim;
        let base = Mat::from_rows(vec![(0..d * d)
            .map(|ab| self.phi.get(ab / d, ab % d).clone())
            .collect()]);
        let mut acc = Mat::identity(1);
        for _ in 0..n {
            let v = Mat::identity(d);
            acc = base.matmul(&v.kron(&acc).kron(&v));
        }
        acc
    }

    /// Image of a single generator.
    pub fn eval_generator(&self, g: Generator) -> Result<Mat<S>, FunctorError> {
        self.eval_term(&Term::generator(g))
    }

    /// `F(t)`, a `d^target x d^source` matrix.
    pub fn eval_term(&self, t: &Term) -> Result<Mat<S>, FunctorError> {
        let rows = self.space_dim(t.target())?;
        let cols = self.space_dim(t.source())?;
        if rows.saturating_mul(cols) > MAX_ENTRIES {
            return Err(FunctorError::TooLarge {
                dim: self.dim,
                width: t.source().max(t.target()),
                cap: self.max_dim,
            });
        }
        let mut out = Mat::zeros(rows, cols);
        for (c, column) in self.eval_columns(t)?.into_iter().enumerate() {
            for (r, v) in column {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// `F(t)` as sparse columns: for every basis vector of the source, the
    /// nonzero entries of its image sorted by row. Never materialises the
    /// Kronecker products with identities.
    pub fn eval_columns(&self, t: &Term) -> Result<Vec<SparseColumn<S>>, FunctorError> {
        for w in t.widths() {
            self.space_dim(w)?;
        }
        let cols = self.space_dim(t.source())?;
        let mut stages = Vec::with_capacity(t.slices().len());
        let mut blocks: Vec<Option<(BlockColumns<S>, BlockColumns<S>)>> = Vec::new();
        for slice in t.slices() {
            let n = slice.gen.n();
            if blocks.len() <= n {
                blocks.resize(n + 1, None);
            }
            let (coev, ev) = blocks[n].get_or_insert_with(|| {
                (
                    BlockColumns::new(&self.coev_mat(n)),
                    BlockColumns::new(&self.ev_mat(n)),
                )
            });
            let block = match slice.gen.kind() {
                GenKind::Eta => coev.clone(),
                GenKind::Eps => ev.clone(),
            };
            stages.push((block, self.space_dim(slice.right)?));
        }
        Ok((0..cols)
            .into_par_iter()
            .map(|c| {
                let mut column = vec![(c, S::one())];
                for (block, right) in &stages {
                    column = block.apply(&column, *right);
                }
                column
            })
            .collect())
    }

    /// Whether both sides have the same image.
    pub fn check_rule_instance(&self, lhs: &Term, rhs: &Term) -> Result<bool, FunctorError> {
        if lhs.source() != rhs.source() || lhs.target() != rhs.target() {
            return Err(FunctorError::ShapeMismatch {
                lhs_source: lhs.source(),
                lhs_target: lhs.target(),
                rhs_source: rhs.source(),
                rhs_target: rhs.target(),
            });
        }
        Ok(self.eval_columns(lhs)? == self.eval_columns(rhs)?)
    }

    /// Certifies that `t` is not an isomorphism when it is non-square or its
    /// image is singular. Meaningful for `d >= 2`.
    pub fn iso_obstruction(&self, t: &Term) -> Result<IsoVerdict, FunctorError> {
        if t.source() != t.target() {
            return Ok(IsoVerdict::NotIso(Obstruction::NonSquare {
                source: t.source(),
                target: t.target(),
            }));
        }
        let image = self.eval_term(t)?;
        let rank = image.rank();
        if rank < image.rows() {
            return Ok(IsoVerdict::NotIso(Obstruction::RankDeficient {
                rank,
                dim: image.rows(),
                shape: forbidden_shape(t),
            }));
        }
        Ok(IsoVerdict::Inconclusive)
    }
}

/// Which forbidden presentation `t` has, in any interchange order.
pub fn forbidden_shape(t: &Term) -> Option<ForbiddenShape> {
    let members = crate::interchange::arrangements(t);
    if members
        .iter()
        .any(|m| m.first().is_some_and(|(_, s)| s.gen.kind() == GenKind::Eps))
    {
        return Some(ForbiddenShape::LeadingEps);
    }
    if members
        .iter()
        .any(|m| m.last().is_some_and(|(_, s)| s.gen.kind() == GenKind::Eta))
    {
        return Some(ForbiddenShape::TrailingEta);
    }
    None
}

/// Nonzero `(row, value)` entries of one column, sorted by row.
pub type SparseColumn<S> = Vec<(usize, S)>;

/// A block matrix stored by columns, for applying `id (x) block (x) id`.
#[derive(Clone)]
struct BlockColumns<S> {
    rows: usize,
    cols: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> BlockColumns<S> {
    fn new(block: &Mat<S>) -> Self {
        let cols = (0..block.cols())
            .map(|c| {
                (0..block.rows())
                    .filter(|&r| !block.get(r, c).is_zero())
                    .map(|r| (r, block.get(r, c).clone()))
                    .collect()
            })
            .collect();
        BlockColumns {
            rows: block.rows(),
            cols,
        }
    }

    /// `(id (x) block (x) id_right) * column`; the left identity is implied by
    /// the row index.
    fn apply(&self, column: &[(usize, S)], right: usize) -> SparseColumn<S> {
        let bc = self.cols.len();
        let mut acc: BTreeMap<usize, S> = BTreeMap::new();
        for (row, v) in column {
            let r = row % right;
            let s = (row / right) % bc;
            let l = row / right / bc;
            for (t, coeff) in &self.cols[s] {
                let dst = (l * self.rows + t) * right + r;
                let term = coeff.clone() * v.clone();
                match acc.entry(dst) {
                    Entry::Vacant(slot) => {
                        slot.insert(term);
                    }
                    Entry::Occupied(mut slot) => {
                        let sum = slot.get().clone() + term;
                        *slot.get_mut() = sum;
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

fn parse_entry<S: Scalar>(tok: &str) -> Option<S> {
    match tok.split_once('/') {
        Some((num, den)) => S::from_ratio(num.parse().ok()?, den.parse().ok()?),
        None => Some(S::from_i64(tok.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Fp;
    use crate::term::Slice;
    use num_traits::Zero;

    type Q = BigRational;

    fn snake() -> Term {
        Term::from_slices(
            1,
            vec![
                Slice::new(0, Generator::eta(0, 1), 1),
                Slice::new(1, Generator::eps(0, 1), 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn base_cup_and_cap() {
        let spec = RationalSpec::identity(2);
        assert_eq!(
            spec.coev_mat(1),
            Mat::from_i64_rows(&[&[1], &[0], &[0], &[1]])
        );
        assert_eq!(spec.ev_mat(1), Mat::from_i64_rows(&[&[1, 0, 0, 1]]));
        assert_eq!(spec.coev_mat(0), Mat::identity(1));
        assert_eq!(spec.ev_mat(0), Mat::identity(1));
    }

    #[test]
    fn images_of_small_terms() {
        let spec = RationalSpec::identity(2);
        assert!(spec.eval_term(&snake()).unwrap().is_identity());
        let circle = Term::generator(Generator::eta(0, 1))
            .compose(&Term::generator(Generator::eps(0, 1)))
            .unwrap();
        assert_eq!(
            spec.eval_term(&circle).unwrap(),
            Mat::from_i64_rows(&[&[2]])
        );
        let id3 = spec.eval_term(&Term::identity(3)).unwrap();
        assert_eq!((id3.rows(), id3.is_identity()), (8, true));
        let cap = spec.eval_generator(Generator::eps(0, 1)).unwrap();
        assert_eq!((cap.rows(), cap.cols(), cap.rank()), (1, 4, 1));
    }

    #[test]
    fn eval_matches_explicit_kronecker_products() {
        let spec = RationalSpec::random(2, 3);
        let t = Term::from_slices(
            2,
            vec![
                Slice::new(1, Generator::eta(0, 1), 1),
                Slice::new(0, Generator::eps(1, 1), 1),
            ],
        )
        .unwrap();
        let id2 = Mat::<Q>::identity(2);
        let first = id2.kron(&spec.coev_mat(1)).kron(&id2);
        let second = id2.kron(&spec.ev_mat(1)).kron(&id2);
        assert_eq!(spec.eval_term(&t).unwrap(), second.matmul(&first));
    }

    #[test]
    fn sparse_columns_agree_with_dense_image() {
        let spec = RationalSpec::random(2, 4);
        let t = Term::from_slices(
            1,
            vec![
                Slice::new(1, Generator::eta(0, 2), 0),
                Slice::new(0, Generator::eps(2, 1), 1),
                Slice::new(0, Generator::eta(1, 1), 2),
            ],
        )
        .unwrap();
        let dense = spec.eval_term(&t).unwrap();
        for (c, column) in spec.eval_columns(&t).unwrap().iter().enumerate() {
            for r in 0..dense.rows() {
                let sparse = column
                    .iter()
                    .find(|(row, _)| *row == r)
                    .map(|(_, v)| v.clone());
                assert_eq!(sparse.unwrap_or_else(Q::zero), dense.get(r, c).clone());
            }
        }
    }

    #[test]
    fn width_guard() {
        let spec = RationalSpec::identity(2).with_max_dim(16);
        assert!(spec.eval_term(&Term::identity(4)).is_ok());
        assert!(matches!(
            spec.eval_term(&Term::identity(5)),
            Err(FunctorError::TooLarge { .. })
        ));
    }

    #[test]
    fn obstruction_verdicts() {
        let spec = RationalSpec::identity(2);
        let cap = Term::generator(Generator::eps(0, 1));
        assert!(matches!(
            spec.iso_obstruction(&cap).unwrap(),
            IsoVerdict::NotIso(Obstruction::NonSquare {
                source: 2,
                target: 0
            })
        ));
        assert_eq!(
            spec.iso_obstruction(&Term::identity(1)).unwrap(),
            IsoVerdict::Inconclusive
        );
        let cap_then_cup = Term::whisker(0, Generator::eps(0, 1), 1)
            .compose(&Term::whisker(0, Generator::eta(0, 1), 1))
            .unwrap();
        assert!(matches!(
            spec.iso_obstruction(&cap_then_cup).unwrap(),
            IsoVerdict::NotIso(Obstruction::RankDeficient {
                rank: 2,
                dim: 8,
                shape: Some(_)
            })
        ));
    }

    #[test]
    fn phi_file_parsing() {
        let spec = RationalSpec::from_phi_text("2\n1 1/2\n0 -3\n").unwrap();
        assert_eq!(spec.phi().get(0, 1), &Q::new(1.into(), 2.into()));
        assert!(matches!(
            RationalSpec::from_phi_text("2\n1 2\n2 4\n"),
            Err(FunctorError::NotInvertible)
        ));
        assert!(matches!(
            RationalSpec::from_phi_text("2\n1 x\n0 1\n"),
            Err(FunctorError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            RationalSpec::from_phi_text("2\n1 0\n"),
            Err(FunctorError::Parse { .. })
        ));
        let p = FunctorSpec::<Fp<1_000_003>>::from_phi_text("1\n1/2\n").unwrap();
        assert_eq!(p.dim(), 1);
    }

    #[test]
    fn degenerate_dimension_one() {
        let spec = RationalSpec::random(1, 9);
        let image = spec.eval_term(&snake()).unwrap();
        assert_eq!((image.rows(), image.cols()), (1, 1));
        assert!(!image.get(0, 0).is_zero());
    }
}
