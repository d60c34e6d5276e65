use std::ops::Add;

/// An associative, commutative binary operation with an identity element.
#[derive(Clone, Copy)]
pub struct Combiner<T> {
    pub identity: T,
    pub op: fn(T, T) -> T,
}

impl<T: Copy> Combiner<T> {
    pub fn new(identity: T, op: fn(T, T) -> T) -> Self {
        Combiner { identity, op }
    }

    pub fn apply(&self, a: T, b: T) -> T {
        (self.op)(a, b)
    }

    pub fn fold(&self, items: impl IntoIterator<Item = T>) -> T {
        items.into_iter().fold(self.identity, self.op)
    }
}

impl<T> std::fmt::Debug for Combiner<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Combiner")
    }
}

/// Types with a greatest and least element, for min/max identities.
pub trait Bounded: Copy + PartialOrd {
    const LEAST: Self;
    const GREATEST: Self;
}

macro_rules! bounded {
    ($($t:ty: $lo:expr, $hi:expr);*) => {$(
        impl Bounded for $t {
            const LEAST: Self = $lo;
            const GREATEST: Self = $hi;
        }
    )*};
}

bounded!(u32: 0, u32::MAX; u64: 0, u64::MAX; i64: i64::MIN, i64::MAX;
         f64: f64::NEG_INFINITY, f64::INFINITY);

macro_rules! bounded_tuple {
    ($($name:ident),+) => {
        impl<$($name: Bounded),+> Bounded for ($($name,)+) {
            const LEAST: Self = ($($name::LEAST,)+);
            const GREATEST: Self = ($($name::GREATEST,)+);
        }
    };
}

bounded_tuple!(A, B);
bounded_tuple!(A, B, C);
bounded_tuple!(A, B, C, D);

pub trait Zero: Copy + Add<Output = Self> {
    const ZERO: Self;
}

impl Zero for u32 {
    const ZERO: Self = 0;
}
impl Zero for u64 {
    const ZERO: Self = 0;
}
impl Zero for i64 {
    const ZERO: Self = 0;
}
impl Zero for f64 {
    const ZERO: Self = 0.0;
}

impl<T: Bounded> Combiner<T> {
    /// Minimum; tuples compare lexicographically.
    pub fn min() -> Self {
        Combiner::new(T::GREATEST, |a, b| if b < a { b } else { a })
    }

    pub fn max() -> Self {
        Combiner::new(T::LEAST, |a, b| if b > a { b } else { a })
    }
}

impl<T: Zero> Combiner<T> {
    pub fn sum() -> Self {
        Combiner::new(T::ZERO, |a, b| a + b)
    }
}

impl Combiner<bool> {
    pub fn or() -> Self {
        Combiner::new(false, |a, b| a || b)
    }
}
