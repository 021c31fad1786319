//! Simple types over `nat`, with optional binary products.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Nat,
    Arrow(Arc<Type>, Arc<Type>),
    Product(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn product(l: Type, r: Type) -> Type {
        Type::Product(Arc::new(l), Arc::new(r))
    }

    /// `σ₁ → … → σₙ → τ`.
    pub fn arrows<I: IntoIterator<Item = Type>>(doms: I, cod: Type) -> Type
    where
        I::IntoIter: DoubleEndedIterator,
    {
        doms.into_iter().rev().fold(cod, |acc, d| Type::arrow(d, acc))
    }

    /// Pure type of level `k`: `0 = nat`, `k+1 = k → nat`.
    pub fn pure(k: usize) -> Type {
        (0..k).fold(Type::Nat, |acc, _| Type::arrow(acc, Type::Nat))
    }

    pub fn level(&self) -> usize {
        match self {
            Type::Nat => 0,
            Type::Arrow(a, b) => (a.level() + 1).max(b.level()),
            Type::Product(a, b) => a.level().max(b.level()),
        }
    }

    pub fn is_nat(&self) -> bool {
        matches!(self, Type::Nat)
    }

    pub fn is_product_free(&self) -> bool {
        match self {
            Type::Nat => true,
            Type::Arrow(a, b) => a.is_product_free() && b.is_product_free(),
            Type::Product(..) => false,
        }
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Arrow(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_product(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Splits `σ₁ → … → σₙ → τ` with `τ` not an arrow.
    pub fn uncurry(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, b) = t {
            args.push((**a).clone());
            t = b;
        }
        (args, t.clone())
    }

    /// Number of arguments before reaching a non-arrow type.
    pub fn arity(&self) -> usize {
        let mut n = 0;
        let mut t = self;
        while let Type::Arrow(_, b) = t {
            n += 1;
            t = b;
        }
        n
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => write!(f, "nat"),
            Type::Arrow(a, b) => write!(f, "(-> {a} {b})"),
            Type::Product(a, b) => write!(f, "(* {a} {b})"),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
