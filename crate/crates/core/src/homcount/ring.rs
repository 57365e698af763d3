use core::cell::Cell;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A commutative ring with a valuation of host-vertex variables.
pub trait EvalRing {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &mut Self::Elem, b: &Self::Elem);
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Value of the variable of host vertex `x`.
    fn var(&self, x: u32) -> Self::Elem;
    /// `a * var(x)`; rings with cheap generators override this.
    fn mul_var(&self, a: &Self::Elem, x: u32) -> Self::Elem {
        self.mul(a, &self.var(x))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

/// Integers with every variable set to 1.
pub struct Naturals;

impl EvalRing for Naturals {
    type Elem = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &mut BigUint, b: &BigUint) {
        *a += b;
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn var(&self, _: u32) -> BigUint {
        BigUint::one()
    }
    fn mul_var(&self, a: &BigUint, _: u32) -> BigUint {
        a.clone()
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
}

/// `u128` with every variable set to 1; records overflow instead of wrapping.
#[derive(Default)]
pub struct CheckedU128 {
    overflow: Cell<bool>,
}

impl CheckedU128 {
    pub fn overflowed(&self) -> bool {
        self.overflow.get()
    }
}

impl EvalRing for CheckedU128 {
    type Elem = u128;
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    fn add(&self, a: &mut u128, b: &u128) {
        *a = a.checked_add(*b).unwrap_or_else(|| {
            self.overflow.set(true);
            0
        });
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a.checked_mul(*b).unwrap_or_else(|| {
            self.overflow.set(true);
            0
        })
    }
    fn var(&self, _: u32) -> u128 {
        1
    }
    fn mul_var(&self, a: &u128, _: u32) -> u128 {
        *a
    }
    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }
}
