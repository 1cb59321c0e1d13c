use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

/// Exact rationals used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Returns true when `x` is the square of a rational number.
pub fn is_rational_square(x: &Q) -> bool {
    is_square_int(x.numer()) && is_square_int(x.denom())
}

/// The quadratic field K(sqrt d) over K = Q, identified by its discriminant tag.
#[derive(Clone)]
pub struct QuadField {
    d: Arc<Q>,
}

impl QuadField {
    pub fn new(d: Q) -> Result<Self, AlgebraError> {
        if is_rational_square(&d) {
            return Err(AlgebraError::SquareDiscriminant(d.to_string()));
        }
        Ok(QuadField { d: Arc::new(d) })
    }

    /// Q(sqrt -1).
    pub fn gaussian() -> Self {
        QuadField { d: Arc::new(q(-1)) }
    }

    pub fn d(&self) -> &Q {
        &self.d
    }

    pub fn zero(&self) -> QuadElement {
        QuadElement { a: Q::zero(), b: Q::zero(), d: self.d.clone() }
    }

    pub fn one(&self) -> QuadElement {
        self.rational(Q::one())
    }

    pub fn int(&self, n: i64) -> QuadElement {
        self.rational(q(n))
    }

    pub fn rational(&self, a: Q) -> QuadElement {
        QuadElement { a, b: Q::zero(), d: self.d.clone() }
    }

    pub fn element(&self, a: Q, b: Q) -> QuadElement {
        QuadElement { a, b, d: self.d.clone() }
    }

    /// The generator sqrt d.
    pub fn root(&self) -> QuadElement {
        self.element(Q::zero(), Q::one())
    }

    /// Label used in reports, e.g. `Q(sqrt(-1))`.
    pub fn label(&self) -> String {
        if *self.d == q(-1) {
            "Q(i)".to_string()
        } else {
            format!("Q(sqrt({}))", self.d)
        }
    }
}

impl PartialEq for QuadField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.d, &other.d) || *self.d == *other.d
    }
}
impl Eq for QuadField {}

impl fmt::Debug for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadField(d={})", self.d)
    }
}

/// An element a + b sqrt(d).
#[derive(Clone)]
pub struct QuadElement {
    a: Q,
    b: Q,
    d: Arc<Q>,
}

impl QuadElement {
    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn field(&self) -> QuadField {
        QuadField { d: self.d.clone() }
    }

    pub fn same_field(&self, other: &QuadElement) -> bool {
        Arc::ptr_eq(&self.d, &other.d) || *self.d == *other.d
    }

    fn check(&self, other: &QuadElement) {
        assert!(
            self.same_field(other),
            "mixed quadratic fields: d={} and d={}",
            self.d,
            other.d
        );
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate a - b sqrt(d).
    pub fn conj(&self) -> QuadElement {
        QuadElement { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    /// Field norm a^2 - d b^2.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &*self.d * &self.b * &self.b
    }

    /// Field trace 2a.
    pub fn trace(&self) -> Q {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Option<QuadElement> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadElement { a: &self.a / &n, b: -&self.b / &n, d: self.d.clone() })
    }

    pub fn scale(&self, r: &Q) -> QuadElement {
        QuadElement { a: &self.a * r, b: &self.b * r, d: self.d.clone() }
    }

    pub fn pow(&self, mut e: u32) -> QuadElement {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for QuadElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.a == other.a && self.b == other.b
    }
}
impl Eq for QuadElement {}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if *self.d == q(-1) { "i".to_string() } else { format!("sqrt({})", self.d) };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => {
                if self.b.is_one() {
                    write!(f, "{root}")
                } else if self.b == -Q::one() {
                    write!(f, "-{root}")
                } else {
                    write!(f, "{}{root}", self.b)
                }
            }
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                let mag = self.b.abs();
                if mag.is_one() {
                    write!(f, "{}{sign}{root}", self.a)
                } else {
                    write!(f, "{}{sign}{mag}{root}", self.a)
                }
            }
        }
    }
}

impl fmt::Debug for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn add(self, rhs: &QuadElement) -> QuadElement {
        self.check(rhs);
        QuadElement { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d: self.d.clone() }
    }
}

impl<'a> Sub<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn sub(self, rhs: &QuadElement) -> QuadElement {
        self.check(rhs);
        QuadElement { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d: self.d.clone() }
    }
}

impl<'a> Mul<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn mul(self, rhs: &QuadElement) -> QuadElement {
        self.check(rhs);
        if self.b.is_zero() && rhs.b.is_zero() {
            return QuadElement { a: &self.a * &rhs.a, b: Q::zero(), d: self.d.clone() };
        }
        QuadElement {
            a: &self.a * &rhs.a + &*self.d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d: self.d.clone(),
        }
    }
}

impl<'a> Div<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn div(self, rhs: &QuadElement) -> QuadElement {
        self * &rhs.inv().expect("division by zero in quadratic field")
    }
}

impl Neg for &QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        QuadElement { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

impl Neg for QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadElement> for QuadElement {
            type Output = QuadElement;
            fn $m(self, rhs: QuadElement) -> QuadElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadElement> for QuadElement {
            type Output = QuadElement;
            fn $m(self, rhs: &QuadElement) -> QuadElement {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&QuadElement> for QuadElement {
    fn add_assign(&mut self, rhs: &QuadElement) {
        self.check(rhs);
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&QuadElement> for QuadElement {
    fn sub_assign(&mut self, rhs: &QuadElement) {
        self.check(rhs);
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&QuadElement> for QuadElement {
    fn mul_assign(&mut self, rhs: &QuadElement) {
        *self = &*self * rhs;
    }
}

/// Galois group element of a quadratic extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Galois {
    #[serde(rename = "id")]
    Id,
    #[serde(rename = "c")]
    Conj,
}

impl Galois {
    pub fn compose(self, other: Galois) -> Galois {
        if self == other {
            Galois::Id
        } else {
            Galois::Conj
        }
    }

    pub fn apply(self, x: &QuadElement) -> QuadElement {
        match self {
            Galois::Id => x.clone(),
            Galois::Conj => x.conj(),
        }
    }

    /// Index in the two-element group table (0 = identity).
    pub fn index(self) -> usize {
        match self {
            Galois::Id => 0,
            Galois::Conj => 1,
        }
    }

    pub fn from_index(i: usize) -> Galois {
        if i == 0 {
            Galois::Id
        } else {
            Galois::Conj
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_examples() {
        let k = QuadField::gaussian();
        let x = k.element(q(3), q(2));
        assert_eq!(x.conj(), k.element(q(3), q(-2)));
        assert_eq!(k.int(5).conj(), k.int(5));
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn square_discriminant_rejected() {
        assert!(QuadField::new(q(4)).is_err());
        assert!(QuadField::new(q_frac(9, 16)).is_err());
        assert!(QuadField::new(q(0)).is_err());
        assert!(QuadField::new(q(2)).is_ok());
        assert!(QuadField::new(q(-4)).is_ok());
    }

    #[test]
    fn inverse_and_norm() {
        let k = QuadField::new(q(3)).unwrap();
        let x = k.element(q_frac(1, 2), q(5));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(k.rational(x.norm()), &x * &x.conj());
    }

    #[test]
    #[should_panic(expected = "mixed quadratic fields")]
    fn mixing_fields_panics() {
        let a = QuadField::gaussian().one();
        let b = QuadField::new(q(2)).unwrap().one();
        let _ = &a + &b;
    }

    #[test]
    fn display_forms() {
        let k = QuadField::gaussian();
        assert_eq!(k.element(q(3), q(-2)).to_string(), "3-2i");
        assert_eq!(k.root().to_string(), "i");
        assert_eq!(k.int(0).to_string(), "0");
    }
}
