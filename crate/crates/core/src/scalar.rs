//! Exact scalars: rationals and elements of cyclotomic fields Q(zeta_N).
//!
//! A [`Scalar`] is an element of Q[x]/(Phi_N(x)) where Phi_N is the N-th
//! cyclotomic polynomial. Field order 1 means a plain rational; rationals
//! embed into any Q(zeta_N), so order-1 values act as universal constants
//! and binary operations promote them on the fly. Two scalars of distinct
//! orders > 1 never meet in one computation, and mixing them is an error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rat = BigRational;

/// Largest supported cyclotomic order. Phi_N is hardcoded below.
pub const MAX_FIELD_ORDER: u32 = 12;

/// Coefficients (constant term first) of Phi_N for N = 1..=12.
const CYCLOTOMIC_POLYS: [&[i64]; 12] = [
    &[-1, 1],                   // Phi_1  = x - 1
    &[1, 1],                    // Phi_2  = x + 1
    &[1, 1, 1],                 // Phi_3  = x^2 + x + 1
    &[1, 0, 1],                 // Phi_4  = x^2 + 1
    &[1, 1, 1, 1, 1],           // Phi_5  = x^4 + x^3 + x^2 + x + 1
    &[1, -1, 1],                // Phi_6  = x^2 - x + 1
    &[1, 1, 1, 1, 1, 1, 1],     // Phi_7
    &[1, 0, 0, 0, 1],           // Phi_8  = x^4 + 1
    &[1, 0, 0, 1, 0, 0, 1],     // Phi_9  = x^6 + x^3 + 1
    &[1, -1, 1, -1, 1],         // Phi_10 = x^4 - x^3 + x^2 - x + 1
    &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], // Phi_11
    &[1, 0, -1, 0, 1],          // Phi_12 = x^4 - x^2 + 1
];

/// Degree of Phi_N, i.e. Euler's totient of N, for N <= 12.
pub fn cyclotomic_degree(order: u32) -> usize {
    assert!(
        (1..=MAX_FIELD_ORDER).contains(&order),
        "field order {order} out of supported range 1..=12"
    );
    CYCLOTOMIC_POLYS[(order - 1) as usize].len() - 1
}

fn phi_coeffs(order: u32) -> Vec<Rat> {
    CYCLOTOMIC_POLYS[(order - 1) as usize]
        .iter()
        .map(|&c| Rat::from_integer(BigInt::from(c)))
        .collect()
}

/// An exact element of Q(zeta_N), stored as a residue mod Phi_N.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    order: u32,
    /// Length = deg Phi_order; coefficients of 1, zeta, zeta^2, ...
    coeffs: Vec<Rat>,
}

impl Scalar {
    pub fn from_rat(r: Rat) -> Self {
        Scalar { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    /// The rational p/q.
    pub fn rat(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Self::from_rat(Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    /// zeta_order^exponent, an exact root of unity in Q(zeta_order).
    pub fn root_of_unity(order: u32, exponent: i64) -> Self {
        let deg = cyclotomic_degree(order);
        let e = exponent.rem_euclid(order as i64) as usize;
        let mut poly = vec![Rat::zero(); e + 1];
        poly[e] = Rat::one();
        let coeffs = poly_rem(poly, &phi_coeffs(order), deg);
        Scalar { order, coeffs }.normalized()
    }

    pub fn field_order(&self) -> u32 {
        self.order
    }

    pub fn is_rational(&self) -> bool {
        self.order == 1
    }

    /// The rational value, if this scalar is one.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.order == 1 {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Builds a cyclotomic element from its coefficient vector.
    pub fn from_coeffs(order: u32, coeffs: Vec<Rat>) -> Result<Self, Error> {
        let deg = cyclotomic_degree(order);
        if coeffs.len() != deg {
            return Err(Error::Invalid(format!(
                "expected {deg} coefficients for field order {order}, got {}",
                coeffs.len()
            )));
        }
        Ok(Scalar { order, coeffs }.normalized())
    }

    /// Demote to a plain rational whenever the value is one.
    fn normalized(mut self) -> Self {
        if self.order != 1 && self.coeffs[1..].iter().all(Rat::is_zero) {
            self = Scalar { order: 1, coeffs: vec![self.coeffs[0].clone()] };
        }
        self
    }

    fn promote(&self, order: u32) -> Scalar {
        if self.order == order {
            return self.clone();
        }
        assert_eq!(
            self.order, 1,
            "cannot mix scalars of field orders {} and {}",
            self.order, order
        );
        let deg = cyclotomic_degree(order);
        let mut coeffs = vec![Rat::zero(); deg];
        coeffs[0] = self.coeffs[0].clone();
        Scalar { order, coeffs }
    }

    fn binop(&self, other: &Scalar, f: impl Fn(&[Rat], &[Rat], u32) -> Vec<Rat>) -> Scalar {
        let order = if self.order == 1 { other.order } else { self.order };
        let a = self.promote(order);
        let b = other.promote(order);
        Scalar { order, coeffs: f(&a.coeffs, &b.coeffs, order) }.normalized()
    }

    pub fn inv(&self) -> Result<Scalar, Error> {
        if self.is_zero() {
            return Err(Error::Singular);
        }
        if self.order == 1 {
            return Ok(Scalar::from_rat(self.coeffs[0].recip()));
        }
        // Extended Euclid in Q[x]: s*a + t*Phi = gcd (a nonzero mod the
        // irreducible Phi, so the gcd is a nonzero constant).
        let deg = cyclotomic_degree(self.order);
        let (gcd, s) = poly_ext_gcd(self.coeffs.clone(), phi_coeffs(self.order));
        assert_eq!(gcd.len(), 1, "cyclotomic polynomial must be irreducible");
        let c = gcd[0].clone();
        let coeffs = poly_rem(
            s.into_iter().map(|x| x / c.clone()).collect(),
            &phi_coeffs(self.order),
            deg,
        );
        Ok(Scalar { order: self.order, coeffs }.normalized())
    }

    pub fn pow(&self, exp: i64) -> Scalar {
        if exp < 0 {
            return self.inv().expect("negative power of zero").pow(-exp);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical string form: "p" or "p/q" for rationals.
    pub fn to_rat_string(&self) -> Option<String> {
        self.as_rat().map(rat_to_string)
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_str(s: &str) -> Result<Rat, Error> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim())
            .map_err(|_| Error::Invalid(format!("bad rational literal {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

// ---- polynomial helpers (dense, constant term first) ----

fn poly_trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.len() > 1 && p.last().map_or(false, Rat::is_zero) {
        p.pop();
    }
    p
}

fn poly_is_zero(p: &[Rat]) -> bool {
    p.iter().all(Rat::is_zero)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder of p mod the monic polynomial m, padded to `deg` coefficients.
fn poly_rem(mut p: Vec<Rat>, m: &[Rat], deg: usize) -> Vec<Rat> {
    let md = m.len() - 1;
    debug_assert!(m[md].is_one());
    while p.len() > md {
        let top = p.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = p.len() - md;
        for (i, c) in m[..md].iter().enumerate() {
            let idx = shift + i;
            let delta = c * &top;
            p[idx] -= delta;
        }
    }
    p.resize(deg, Rat::zero());
    p
}

/// Division with remainder: a = q*b + r.
fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = poly_trim(b.to_vec());
    assert!(!poly_is_zero(&b), "polynomial division by zero");
    let mut r = poly_trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() - 1 < db || poly_is_zero(&r) {
        return (vec![Rat::zero()], r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    let lead = b[db].clone();
    while !poly_is_zero(&r) && r.len() - 1 >= db {
        let shift = r.len() - 1 - db;
        let coef = r.last().unwrap() / &lead;
        q[shift] = coef.clone();
        for (i, c) in b.iter().enumerate() {
            let delta = c * &coef;
            r[shift + i] -= delta;
        }
        r = poly_trim(r);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
    }
    (poly_trim(q), r)
}

/// Returns (gcd, s) with s*a = gcd mod b.
fn poly_ext_gcd(a: Vec<Rat>, b: Vec<Rat>) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0 = poly_trim(a);
    let mut r1 = poly_trim(b);
    let mut s0 = vec![Rat::one()];
    let mut s1 = vec![Rat::zero()];
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let qs = poly_mul(&q, &s1);
        let mut s = s0.clone();
        s.resize(s.len().max(qs.len()), Rat::zero());
        for (i, c) in qs.into_iter().enumerate() {
            s[i] -= c;
        }
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = poly_trim(s);
    }
    (r0, s0)
}

// ---- arithmetic ----

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b, _| a.iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b, _| a.iter().zip(b).map(|(x, y)| x - y).collect())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b, order| {
            poly_rem(poly_mul(a, b), &phi_coeffs(order), cyclotomic_degree(order))
        })
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    // Division in a field is multiplication by the inverse.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("scalar division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($trait:ident, $method:ident);*) => {$(
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $trait::$method(&self, rhs)
            }
        }
    )*};
}
forward_owned!(Add, add; Sub, sub; Mul, mul; Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::from_int(1)
    }
    fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{}", rat_to_string(r));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
                if i == 0 {
                    write!(f, "{}", rat_to_string(c))?;
                    continue;
                }
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{}*", rat_to_string(&a))?;
            }
            write!(f, "z{}", self.order)?;
            if i > 1 {
                write!(f, "^{i}")?;
            }
        }
        Ok(())
    }
}

// Serialization: rationals as the string "p" or "p/q"; cyclotomic elements
// as {"field_order": N, "coeffs": ["p/q", ...]}.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self.as_rat() {
            Some(r) => ser.serialize_str(&rat_to_string(r)),
            None => {
                let mut st = ser.serialize_struct("Scalar", 2)?;
                st.serialize_field("field_order", &self.order)?;
                let coeffs: Vec<String> = self.coeffs.iter().map(rat_to_string).collect();
                st.serialize_field("coeffs", &coeffs)?;
                st.end()
            }
        }
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rational(String),
            Cyclotomic { field_order: u32, coeffs: Vec<String> },
        }
        match Repr::deserialize(de)? {
            Repr::Rational(s) => {
                let r = rat_from_str(&s).map_err(D::Error::custom)?;
                Ok(Scalar::from_rat(r))
            }
            Repr::Cyclotomic { field_order, coeffs } => {
                if !(1..=MAX_FIELD_ORDER).contains(&field_order) {
                    return Err(D::Error::custom(format!(
                        "field order {field_order} out of supported range 1..=12"
                    )));
                }
                let coeffs: Vec<Rat> = coeffs
                    .iter()
                    .map(|s| rat_from_str(s))
                    .collect::<Result<_, _>>()
                    .map_err(D::Error::custom)?;
                Scalar::from_coeffs(field_order, coeffs).map_err(D::Error::custom)
            }
        }
    }
}

/// Total order used only to make pivots and serializations deterministic.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let order = if self.order == 1 { other.order } else { self.order };
        let a = self.promote(order);
        let b = other.promote(order);
        Some(a.coeffs.cmp(&b.coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        let z = Scalar::root_of_unity(4, 1);
        let a = &z + &Scalar::rat(1, 2);
        let b = &z * &z - &Scalar::from_int(3);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
    }

    #[test]
    fn minimal_polynomial_is_satisfied() {
        for order in 1..=MAX_FIELD_ORDER {
            let z = Scalar::root_of_unity(order, 1);
            let phi = phi_coeffs(order);
            let mut acc = Scalar::zero();
            for (i, c) in phi.iter().enumerate() {
                acc = &acc + &(&Scalar::from_rat(c.clone()) * &z.pow(i as i64));
            }
            assert!(acc.is_zero(), "Phi_{order}(zeta_{order}) != 0");
        }
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        for order in 1..=MAX_FIELD_ORDER {
            let z = Scalar::root_of_unity(order, 1);
            assert_eq!(z.pow(order as i64), Scalar::one());
            for k in 1..order {
                assert!(
                    order % k != 0 || !z.pow(k as i64).is_one(),
                    "zeta_{order}^{k} should not be 1"
                );
            }
        }
    }

    #[test]
    fn rationals_demote_and_compare() {
        let z2 = Scalar::root_of_unity(2, 1);
        assert_eq!(z2, Scalar::from_int(-1));
        let z3 = Scalar::root_of_unity(3, 1);
        let s = &(&z3 * &z3) + &(&z3 + &Scalar::one()); // 1 + z + z^2 = 0
        assert!(s.is_zero());
        assert_eq!(&z3 * &z3.pow(2), Scalar::one());
    }

    #[test]
    fn inverse_of_cyclotomic_element() {
        let z = Scalar::root_of_unity(12, 5);
        let a = &(&z + &z) - &Scalar::rat(7, 3);
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, Scalar::one());
    }

    #[test]
    fn mixing_orders_panics() {
        let z3 = Scalar::root_of_unity(3, 1);
        let z4 = Scalar::root_of_unity(4, 1);
        let result = std::panic::catch_unwind(|| &z3 + &z4);
        assert!(result.is_err());
    }

    #[test]
    fn rational_string_round_trip() {
        for s in ["0", "-7", "22/7", "-3/5"] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }
}
