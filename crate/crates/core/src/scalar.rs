//! Coefficient types for exact linear algebra.
//!
//! Rank computations are generic over [`Field`], which is satisfied by the
//! rationals and by the prime fields [`Zp`]. Smith normal form is generic over
//! any signed Euclidean integer type via [`IntegerRing`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

/// A commutative field usable as a coefficient type.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;

    fn from_i64(v: i64) -> Self;

    /// Characteristic of the field (0 for the rationals).
    fn characteristic() -> u64;
}

/// Integer types admitting Smith normal form.
pub trait IntegerRing:
    Clone + fmt::Debug + Integer + Signed + FromPrimitive + Send + Sync
{
}

impl<T> IntegerRing for T where T: Clone + fmt::Debug + Integer + Signed + FromPrimitive + Send + Sync
{}

impl Field for BigRational {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        self.recip()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn characteristic() -> u64 {
        0
    }
}

/// Integers modulo the prime `P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Zp<const P: u32>(u32);

impl<const P: u32> Zp<P> {
    pub const MODULUS: u32 = P;

    pub fn new(v: i64) -> Self {
        Zp(v.rem_euclid(P as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u64;
        let mut acc = 1u64;
        let m = P as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Zp(acc as u32)
    }
}

impl<const P: u32> fmt::Debug for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.0, P)
    }
}

impl<const P: u32> Add for Zp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 as u64 + rhs.0 as u64;
        Zp((s % P as u64) as u32)
    }
}

impl<const P: u32> Sub for Zp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let s = self.0 as u64 + P as u64 - rhs.0 as u64;
        Zp((s % P as u64) as u32)
    }
}

impl<const P: u32> Mul for Zp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Zp((self.0 as u64 * rhs.0 as u64 % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Zp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Zp(P - self.0)
        }
    }
}

impl<const P: u32> Zero for Zp<P> {
    fn zero() -> Self {
        Zp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Zp<P> {
    fn one() -> Self {
        Zp(1 % P)
    }
}

impl<const P: u32> Field for Zp<P> {
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(P as u64 - 2)
    }

    fn from_i64(v: i64) -> Self {
        Zp::new(v)
    }

    fn characteristic() -> u64 {
        P as u64
    }
}

/// The primes for which a [`Zp`] instantiation is compiled in.
pub const SUPPORTED_PRIMES: &[u32] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 65521, 1_000_003, 2_147_483_629, 2_147_483_647,
];

/// The two large primes used to cross-check rational ranks.
pub const CHECK_PRIMES: [u32; 2] = [2_147_483_647, 2_147_483_629];

/// Evaluates `$body` with `$F` bound to `Zp<p>` for a runtime prime `p`.
/// Evaluates to `None` when `p` is not in [`SUPPORTED_PRIMES`].
#[macro_export]
macro_rules! with_prime_field {
    ($p:expr, $F:ident => $body:expr) => {{
        let p: u32 = $p;
        match p {
            2 => {
                type $F = $crate::scalar::Zp<2>;
                Some($body)
            }
            3 => {
                type $F = $crate::scalar::Zp<3>;
                Some($body)
            }
            5 => {
                type $F = $crate::scalar::Zp<5>;
                Some($body)
            }
            7 => {
                type $F = $crate::scalar::Zp<7>;
                Some($body)
            }
            11 => {
                type $F = $crate::scalar::Zp<11>;
                Some($body)
            }
            13 => {
                type $F = $crate::scalar::Zp<13>;
                Some($body)
            }
            17 => {
                type $F = $crate::scalar::Zp<17>;
                Some($body)
            }
            19 => {
                type $F = $crate::scalar::Zp<19>;
                Some($body)
            }
            23 => {
                type $F = $crate::scalar::Zp<23>;
                Some($body)
            }
            29 => {
                type $F = $crate::scalar::Zp<29>;
                Some($body)
            }
            31 => {
                type $F = $crate::scalar::Zp<31>;
                Some($body)
            }
            37 => {
                type $F = $crate::scalar::Zp<37>;
                Some($body)
            }
            41 => {
                type $F = $crate::scalar::Zp<41>;
                Some($body)
            }
            43 => {
                type $F = $crate::scalar::Zp<43>;
                Some($body)
            }
            47 => {
                type $F = $crate::scalar::Zp<47>;
                Some($body)
            }
            53 => {
                type $F = $crate::scalar::Zp<53>;
                Some($body)
            }
            59 => {
                type $F = $crate::scalar::Zp<59>;
                Some($body)
            }
            61 => {
                type $F = $crate::scalar::Zp<61>;
                Some($body)
            }
            67 => {
                type $F = $crate::scalar::Zp<67>;
                Some($body)
            }
            71 => {
                type $F = $crate::scalar::Zp<71>;
                Some($body)
            }
            73 => {
                type $F = $crate::scalar::Zp<73>;
                Some($body)
            }
            79 => {
                type $F = $crate::scalar::Zp<79>;
                Some($body)
            }
            83 => {
                type $F = $crate::scalar::Zp<83>;
                Some($body)
            }
            89 => {
                type $F = $crate::scalar::Zp<89>;
                Some($body)
            }
            97 => {
                type $F = $crate::scalar::Zp<97>;
                Some($body)
            }
            65521 => {
                type $F = $crate::scalar::Zp<65521>;
                Some($body)
            }
            1000003 => {
                type $F = $crate::scalar::Zp<1000003>;
                Some($body)
            }
            2147483629 => {
                type $F = $crate::scalar::Zp<2147483629>;
                Some($body)
            }
            2147483647 => {
                type $F = $crate::scalar::Zp<2147483647>;
                Some($body)
            }
            _ => None,
        }
    }};
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Zp<7>;

    #[test]
    fn zp_arithmetic() {
        assert_eq!(F7::new(-1).value(), 6);
        assert_eq!((F7::new(3) * F7::new(5)).value(), 1);
        assert_eq!(F7::new(3).inv(), F7::new(5));
        assert_eq!((F7::new(2) - F7::new(5)).value(), 4);
        assert_eq!(-F7::new(0), F7::new(0));
    }

    #[test]
    fn large_prime_inverse() {
        type F = Zp<2_147_483_647>;
        for v in [1i64, 2, 12345, 2_147_483_646] {
            let x = F::new(v);
            assert_eq!(x * x.inv(), F::one());
        }
    }

    #[test]
    fn dispatch_covers_supported_primes() {
        for &p in SUPPORTED_PRIMES {
            let got = with_prime_field!(p, F => <F as Field>::characteristic());
            assert_eq!(got, Some(p as u64));
        }
        assert_eq!(with_prime_field!(4u32, F => <F as Field>::characteristic()), None);
    }

    #[test]
    fn rational_field() {
        let a = <BigRational as Field>::from_i64(3);
        assert_eq!(a.clone() * a.inv(), BigRational::one());
        assert_eq!(BigRational::characteristic(), 0);
    }
}
