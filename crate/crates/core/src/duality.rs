//! The bending maps between `Hom(y + x, z)` and `Hom(y, z + x)`.

use crate::term::{Generator, Obj, Slice, Term, TermError};

/// The snake `(eta(0,1) * id(1)) ; (id(1) * eps(0,1))`.
pub fn snake_term() -> Term {
    Term::from_slices(
        1,
        vec![
            Slice::new(0, Generator::eta(0, 1), 1),
            Slice::new(1, Generator::eps(0, 1), 0),
        ],
    )
    .expect("snake is well formed")
}

/// `eta(y,x) ; (f * id(x))` for `f: y + x -> z`. Identity when `x = 0`.
pub fn transpose(f: &Term, x: Obj) -> Result<Term, TermError> {
    let Some(y) = f.source().checked_sub(x) else {
        return Err(TermError::NotComposable {
            target: f.source(),
            next_source: x,
        });
    };
    if x == 0 {
        return Ok(f.clone());
    }
    Term::generator(Generator::eta(y, x)).compose(&f.tensor(&Term::identity(x)))
}

/// `(g * id(x)) ; eps(z,x)` for `g: y -> z + x`. Identity when `x = 0`.
pub fn untranspose(g: &Term, x: Obj) -> Result<Term, TermError> {
    let Some(z) = g.target().checked_sub(x) else {
        return Err(TermError::NotComposable {
            target: g.target(),
            next_source: x,
        });
    };
    if x == 0 {
        return Ok(g.clone());
    }
    g.tensor(&Term::identity(x))
        .compose(&Term::generator(Generator::eps(z, x)))
}
