//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! Elements are stored in the power basis {ζ^0, …, ζ^{φ(N)−1}} modulo the
//! N-th cyclotomic polynomial, as an integer coefficient vector over a single
//! shared positive denominator. The representation is canonical (content and
//! denominator coprime, denominator positive), so structural equality is
//! field equality and zero-testing is free.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, WharfError};

/// Euler's totient function.
pub fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Monic integer coefficients of the n-th cyclotomic polynomial Φ_n,
/// index = power, length φ(n) + 1.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic order must be positive");
    // Φ_d for each divisor d of n, by exact division of x^d − 1.
    let mut memo: HashMap<u32, Vec<BigInt>> = HashMap::new();
    let mut divisors: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    divisors.sort_unstable();
    for d in divisors {
        // x^d − 1
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        for (dd, poly) in memo.iter() {
            if d % dd == 0 && *dd < d {
                num = exact_div_monic(&num, poly);
            }
        }
        memo.insert(d, num);
    }
    memo.remove(&n).unwrap()
}

/// Quotient of `a` by the monic polynomial `b`; panics if the division is
/// not exact (never happens for cyclotomic factors).
fn exact_div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    assert!(b[db].is_one());
    let mut rem: Vec<BigInt> = a.to_vec();
    let dq = a.len() - 1 - db;
    let mut quot = vec![BigInt::zero(); dq + 1];
    for k in (0..=dq).rev() {
        let c = rem[k + db].clone();
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                rem[k + i] -= &c * bi;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Cached per-conductor data: Φ_N and the reduction rows expressing
/// x^{φ+k} mod Φ_N for k = 0..φ−1 (covers every product of two reduced
/// polynomials).
struct OrderData {
    phi: usize,
    poly: Vec<BigInt>,
    red: Vec<Vec<BigInt>>,
}

impl OrderData {
    fn build(order: u32) -> OrderData {
        let poly = cyclotomic_poly(order);
        let phi = poly.len() - 1;
        let mut red: Vec<Vec<BigInt>> = Vec::with_capacity(phi);
        // x^phi = −(low-degree part of Φ)
        let base: Vec<BigInt> = poly[..phi].iter().map(|c| -c).collect();
        red.push(base);
        for k in 1..phi {
            let prev = &red[k - 1];
            let mut next = vec![BigInt::zero(); phi];
            for i in 0..phi - 1 {
                next[i + 1] = prev[i].clone();
            }
            let carry = prev[phi - 1].clone();
            if !carry.is_zero() {
                for i in 0..phi {
                    next[i] += &carry * &red[0][i];
                }
            }
            red.push(next);
        }
        OrderData { phi, poly, red }
    }

    /// Remainder of an arbitrary-degree integer polynomial modulo Φ_N.
    fn rem_poly(&self, mut coeffs: Vec<BigInt>) -> Vec<BigInt> {
        let phi = self.phi;
        for k in (phi..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[k], BigInt::zero());
            if c.is_zero() {
                continue;
            }
            if k - phi < phi {
                for i in 0..phi {
                    let t = &c * &self.red[k - phi][i];
                    coeffs[i] += t;
                }
            } else {
                // shift Φ: x^k = x^{k−φ}·x^φ
                for (i, ci) in self.red[0].iter().enumerate() {
                    let t = &c * ci;
                    coeffs[k - phi + i] += t;
                }
            }
        }
        coeffs.truncate(phi);
        coeffs.resize(phi, BigInt::zero());
        coeffs
    }
}

fn order_cache() -> &'static Mutex<HashMap<u32, Arc<OrderData>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<OrderData>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn order_data(order: u32) -> Arc<OrderData> {
    assert!(order >= 1, "cyclotomic order must be positive");
    let mut cache = order_cache().lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(OrderData::build(order)))
        .clone()
}

/// An element of Q(ζ_N) in canonical form: integer numerator coefficients
/// over one positive denominator with overall content 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNumber {
    order: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNumber {
    pub fn zero(order: u32) -> CycloNumber {
        let phi = euler_phi(order) as usize;
        CycloNumber { order, num: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn one(order: u32) -> CycloNumber {
        CycloNumber::from_int(order, 1)
    }

    pub fn from_int(order: u32, v: i64) -> CycloNumber {
        let mut x = CycloNumber::zero(order);
        x.num[0] = BigInt::from(v);
        x
    }

    pub fn from_bigint(order: u32, v: BigInt) -> CycloNumber {
        let mut x = CycloNumber::zero(order);
        x.num[0] = v;
        x
    }

    pub fn from_rational(order: u32, num: BigInt, den: BigInt) -> Result<CycloNumber> {
        if den.is_zero() {
            return Err(WharfError::DivisionByZero(order));
        }
        let mut x = CycloNumber::zero(order);
        x.num[0] = num;
        x.den = den;
        x.normalize();
        Ok(x)
    }

    /// ζ_N^k for any integer k (reduced modulo N, then modulo Φ_N).
    pub fn root_power(order: u32, k: i64) -> CycloNumber {
        let data = order_data(order);
        let e = k.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = BigInt::one();
        let num = data.rem_poly(coeffs);
        let mut x = CycloNumber { order, num, den: BigInt::one() };
        x.normalize();
        x
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one()
            && self.num[0].is_one()
            && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// The value as a rational number if it lies in Q, i.e. all higher
    /// basis coordinates vanish.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some((self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Power-basis coordinates as reduced rationals (numerator, denominator).
    pub fn coordinates(&self) -> Vec<(BigInt, BigInt)> {
        self.num
            .iter()
            .map(|n| {
                if n.is_zero() {
                    (BigInt::zero(), BigInt::one())
                } else {
                    let g = n.gcd(&self.den);
                    (n / &g, &self.den / &g)
                }
            })
            .collect()
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    return;
                }
            }
        }
        if !g.is_one() {
            self.den = &self.den / &g;
            for c in &mut self.num {
                if !c.is_zero() {
                    *c = &*c / &g;
                }
            }
        }
    }

    fn check_order(&self, other: &CycloNumber) {
        assert_eq!(
            self.order, other.order,
            "cyclotomic order mismatch: {} vs {}",
            self.order, other.order
        );
    }

    pub fn add_ref(&self, other: &CycloNumber) -> CycloNumber {
        self.check_order(other);
        let mut num = Vec::with_capacity(self.num.len());
        for (a, b) in self.num.iter().zip(&other.num) {
            num.push(a * &other.den + b * &self.den);
        }
        let mut x = CycloNumber { order: self.order, num, den: &self.den * &other.den };
        x.normalize();
        x
    }

    pub fn sub_ref(&self, other: &CycloNumber) -> CycloNumber {
        self.check_order(other);
        let mut num = Vec::with_capacity(self.num.len());
        for (a, b) in self.num.iter().zip(&other.num) {
            num.push(a * &other.den - b * &self.den);
        }
        let mut x = CycloNumber { order: self.order, num, den: &self.den * &other.den };
        x.normalize();
        x
    }

    pub fn mul_ref(&self, other: &CycloNumber) -> CycloNumber {
        self.check_order(other);
        let data = order_data(self.order);
        let phi = data.phi;
        let mut conv = vec![BigInt::zero(); 2 * phi - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                conv[i + j] += a * b;
            }
        }
        for k in phi..2 * phi - 1 {
            if conv[k].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut conv[k], BigInt::zero());
            for i in 0..phi {
                let t = &c * &data.red[k - phi][i];
                if !t.is_zero() {
                    conv[i] += t;
                }
            }
        }
        conv.truncate(phi);
        let mut x = CycloNumber { order: self.order, num: conv, den: &self.den * &other.den };
        x.normalize();
        x
    }

    pub fn neg_ref(&self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    /// Multiply by the rational num/den.
    pub fn scaled(&self, num: &BigInt, den: &BigInt) -> CycloNumber {
        assert!(!den.is_zero());
        let mut x = CycloNumber {
            order: self.order,
            num: self.num.iter().map(|c| c * num).collect(),
            den: &self.den * den,
        };
        x.normalize();
        x
    }

    /// Exact multiplicative inverse via the extended Euclidean algorithm in
    /// Q[x] against Φ_N (which is irreducible, so any nonzero residue is a
    /// unit).
    pub fn inverse(&self) -> Result<CycloNumber> {
        if self.is_zero() {
            return Err(WharfError::DivisionByZero(self.order));
        }
        let data = order_data(self.order);
        let to_rat = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::from_integer(c.clone())).collect()
        };
        // Invariant: s_i · self.num ≡ r_i (mod Φ).
        let mut r0 = to_rat(&data.poly);
        let mut r1 = to_rat(&self.num);
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let g = r0[0].clone();
        let inv_poly: Vec<BigRational> = s0.iter().map(|c| c / &g).collect();
        // Actual value is num/den, so the inverse picks up a factor den.
        let mut den_lcm = BigInt::one();
        for c in &inv_poly {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num = vec![BigInt::zero(); data.phi];
        for (i, c) in inv_poly.iter().enumerate() {
            num[i] = c.numer() * (&den_lcm / c.denom()) * &self.den;
        }
        let mut x = CycloNumber { order: self.order, num, den: den_lcm };
        x.normalize();
        Ok(x)
    }

    pub fn pow(&self, e: i64) -> Result<CycloNumber> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = CycloNumber::one(self.order);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_ref(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        Ok(acc)
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(&mut out);
    out
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    assert!(!b.is_empty());
    let mut rem = a.to_vec();
    if a.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); a.len() - b.len() + 1];
    let lead = b.last().unwrap();
    for k in (0..quot.len()).rev() {
        let c = &rem[k + b.len() - 1] / lead;
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                let t = &c * bi;
                rem[k + i] -= t;
            }
        }
        quot[k] = c;
    }
    trim(&mut rem);
    (quot, rem)
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, (n, d)) in self.coordinates().into_iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if d.is_one() {
                write!(f, "{}", n)?;
            } else {
                write!(f, "{}/{}", n, d)?;
            }
            if k > 0 {
                write!(f, "*z{}^{}", self.order, k)?;
            }
        }
        Ok(())
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for &CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: &CycloNumber) -> CycloNumber {
                self.$inner(rhs)
            }
        }
        impl std::ops::$trait for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: CycloNumber) -> CycloNumber {
                self.$inner(&rhs)
            }
        }
        impl std::ops::$trait<&CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: &CycloNumber) -> CycloNumber {
                self.$inner(rhs)
            }
        }
    };
}

impl_binop!(Add, add, add_ref);
impl_binop!(Sub, sub, sub_ref);
impl_binop!(Mul, mul, mul_ref);

impl std::ops::Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        self.neg_ref()
    }
}

impl std::ops::Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        self.neg_ref()
    }
}

impl std::ops::AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        *self = self.add_ref(rhs);
    }
}

impl std::ops::SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, rhs: &CycloNumber) {
        *self = self.sub_ref(rhs);
    }
}

#[derive(Serialize, Deserialize)]
struct CycloDto {
    #[serde(rename = "N")]
    order: u32,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coordinates()
            .into_iter()
            .map(|(n, d)| [n.to_string(), d.to_string()])
            .collect();
        CycloDto { order: self.order, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let dto = CycloDto::deserialize(deserializer)?;
        if dto.order == 0 {
            return Err(D::Error::custom("cyclotomic order must be positive"));
        }
        let phi = euler_phi(dto.order) as usize;
        if dto.coeffs.len() != phi {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for order {}, got {}",
                phi,
                dto.order,
                dto.coeffs.len()
            )));
        }
        let parse = |s: &str| -> std::result::Result<BigInt, D::Error> {
            s.parse::<BigInt>()
                .map_err(|e| D::Error::custom(format!("bad integer {:?}: {}", s, e)))
        };
        let mut parts: Vec<(BigInt, BigInt)> = Vec::with_capacity(phi);
        let mut den = BigInt::one();
        for [n, d] in &dto.coeffs {
            let n = parse(n)?;
            let d = parse(d)?;
            if d.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            den = den.lcm(&d);
            parts.push((n, d));
        }
        let num = parts.into_iter().map(|(n, d)| &n * (&den / &d)).collect();
        let mut x = CycloNumber { order: dto.order, num, den };
        x.normalize();
        Ok(x)
    }
}

/// The scalar context for level r: the conductor N = lcm(4r, 8), the root
/// A = ζ_N^{(N/4r)·root_exponent} (a primitive 4r-th root of unity),
/// q = A², and √2 = ζ_8 + ζ_8^{−1}. Half-integer powers of q mean powers
/// of A throughout.
#[derive(Clone)]
pub struct FieldContext {
    r: u32,
    root_exponent: u32,
    order: u32,
    a_exp: i64,
    a: CycloNumber,
    q: CycloNumber,
    sqrt2: CycloNumber,
}

impl FieldContext {
    pub fn new(r: u32, root_exponent: u32) -> Result<FieldContext> {
        if r < 3 {
            return Err(WharfError::InvalidLevel(r));
        }
        let four_r = 4 * r;
        if num::integer::gcd(root_exponent, four_r) != 1 {
            return Err(WharfError::RootExponentNotCoprime {
                exponent: root_exponent,
                modulus: four_r,
            });
        }
        let order = num::integer::lcm(four_r, 8);
        let a_exp = ((order / four_r) * root_exponent) as i64;
        let a = CycloNumber::root_power(order, a_exp);
        let q = CycloNumber::root_power(order, 2 * a_exp);
        let eighth = (order / 8) as i64;
        let sqrt2 = CycloNumber::root_power(order, eighth) + CycloNumber::root_power(order, -eighth);
        Ok(FieldContext { r, root_exponent, order, a_exp, a, q, sqrt2 })
    }

    pub fn level(&self) -> u32 {
        self.r
    }

    pub fn root_exponent(&self) -> u32 {
        self.root_exponent
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn a(&self) -> &CycloNumber {
        &self.a
    }

    pub fn q(&self) -> &CycloNumber {
        &self.q
    }

    pub fn sqrt2(&self) -> &CycloNumber {
        &self.sqrt2
    }

    pub fn zero(&self) -> CycloNumber {
        CycloNumber::zero(self.order)
    }

    pub fn one(&self) -> CycloNumber {
        CycloNumber::one(self.order)
    }

    pub fn int(&self, v: i64) -> CycloNumber {
        CycloNumber::from_int(self.order, v)
    }

    /// q^k for integer k.
    pub fn q_pow(&self, k: i64) -> CycloNumber {
        CycloNumber::root_power(self.order, 2 * self.a_exp * k)
    }

    /// q^{k/2} = A^k for integer k (half-integer powers of q).
    pub fn q_half_pow(&self, k: i64) -> CycloNumber {
        CycloNumber::root_power(self.order, self.a_exp * k)
    }

    /// Quantum integer [n] = (q^n − q^{−n})/(q − q^{−1}) in the
    /// division-free form Σ_{i=0}^{n−1} q^{n−1−2i}; [−n] = −[n].
    pub fn quantum_integer(&self, n: i64) -> CycloNumber {
        if n < 0 {
            return -self.quantum_integer(-n);
        }
        let mut acc = self.zero();
        for i in 0..n {
            acc += &self.q_pow(n - 1 - 2 * i);
        }
        acc
    }

    /// [n]! = [1][2]⋯[n].
    pub fn quantum_factorial(&self, n: i64) -> CycloNumber {
        let mut acc = self.one();
        for k in 1..=n {
            acc = acc.mul_ref(&self.quantum_integer(k));
        }
        acc
    }
}

/// Builds the field context for level r; see `FieldContext`.
pub fn field_for_level(r: u32, root_exponent: u32) -> Result<FieldContext> {
    FieldContext::new(r, root_exponent)
}

/// Parses sign information out of a BigInt for compact displays.
pub fn sign_char(v: &BigInt) -> char {
    match v.sign() {
        Sign::Minus => '-',
        _ => '+',
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(order: u32, k: i64) -> CycloNumber {
        CycloNumber::root_power(order, k)
    }

    #[test]
    fn totient_values() {
        for (n, expect) in [(1u32, 1u32), (2, 1), (8, 4), (12, 4), (16, 8), (24, 8), (40, 16)] {
            assert_eq!(euler_phi(n), expect, "phi({})", n);
        }
    }

    #[test]
    fn cyclotomic_polys_match_known_forms() {
        let to_i64 = |v: Vec<BigInt>| -> Vec<i64> {
            v.into_iter().map(|c| i64::try_from(c).unwrap()).collect()
        };
        assert_eq!(to_i64(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(to_i64(cyclotomic_poly(8)), vec![1, 0, 0, 0, 1]);
        assert_eq!(to_i64(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(to_i64(cyclotomic_poly(24)), vec![1, 0, 0, 0, -1, 0, 0, 0, 1]);
        let p40 = to_i64(cyclotomic_poly(40));
        let mut expect = vec![0i64; 17];
        expect[0] = 1;
        expect[4] = -1;
        expect[8] = 1;
        expect[12] = -1;
        expect[16] = 1;
        assert_eq!(p40, expect);
    }

    #[test]
    fn root_powers_reduce() {
        assert!(zeta(24, 24).is_one());
        assert_eq!(zeta(24, 12), CycloNumber::from_int(24, -1));
        assert_eq!(zeta(24, 8).mul_ref(&zeta(24, 16)), CycloNumber::one(24));
        assert_eq!(zeta(40, -1), zeta(40, 39));
        // order 1: the trivial field Q
        assert!(zeta(1, 5).is_one());
    }

    #[test]
    fn arithmetic_and_canonical_form() {
        let a = CycloNumber::from_rational(24, BigInt::from(2), BigInt::from(4)).unwrap();
        let b = CycloNumber::from_rational(24, BigInt::from(1), BigInt::from(2)).unwrap();
        assert_eq!(a, b);
        let c = zeta(24, 5).scaled(&BigInt::from(3), &BigInt::from(2));
        let d = c.sub_ref(&c);
        assert!(d.is_zero());
        assert_eq!(d, CycloNumber::zero(24));
    }

    #[test]
    fn inverse_roundtrip() {
        let vals = [
            zeta(24, 7),
            zeta(24, 1).add_ref(&CycloNumber::one(24)),
            CycloNumber::from_rational(24, BigInt::from(-3), BigInt::from(7)).unwrap(),
            zeta(40, 3).sub_ref(&zeta(40, 11)).add_ref(&CycloNumber::from_int(40, 2)),
        ];
        for v in vals {
            let inv = v.inverse().unwrap();
            assert!(v.mul_ref(&inv).is_one(), "inverse failed for {}", v);
        }
        assert!(CycloNumber::zero(8).inverse().is_err());
        assert_eq!(zeta(24, 7).inverse().unwrap(), zeta(24, -7));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        for order in [8u32, 16, 24, 40] {
            let eighth = (order / 8) as i64;
            let s = zeta(order, eighth).add_ref(&zeta(order, -eighth));
            assert_eq!(s.mul_ref(&s), CycloNumber::from_int(order, 2));
        }
    }

    #[test]
    fn field_context_conductors() {
        let f3 = field_for_level(3, 1).unwrap();
        assert_eq!(f3.order(), 24);
        assert_eq!(f3.a(), &zeta(24, 2));
        assert!(f3.a().pow(12).unwrap().is_one());
        assert_eq!(f3.a().pow(6).unwrap(), f3.int(-1));

        let f4 = field_for_level(4, 1).unwrap();
        assert_eq!(f4.order(), 16);
        assert_eq!(f4.q(), &zeta(16, 2));
        assert!(f4.q().pow(8).unwrap().is_one());

        assert!(field_for_level(2, 1).is_err());
        assert!(field_for_level(5, 5).is_err());
        assert!(field_for_level(4, 2).is_err());
    }

    #[test]
    fn nonstandard_root_has_full_order() {
        // Multiplicative-order oracle: power A up step by step and record
        // the first k with A^k = 1.
        let f = field_for_level(5, 3).unwrap();
        assert_eq!(f.order(), 40);
        assert_eq!(f.a(), &zeta(40, 6));
        let mut acc = f.one();
        let mut ord = 0;
        for k in 1..=20 {
            acc = acc.mul_ref(f.a());
            if acc.is_one() {
                ord = k;
                break;
            }
        }
        assert_eq!(ord, 20);
    }

    #[test]
    fn quantum_integer_basics() {
        for r in 3..=6u32 {
            let f = field_for_level(r, 1).unwrap();
            assert!(f.quantum_integer(0).is_zero());
            assert!(f.quantum_integer(1).is_one());
            assert!(f.quantum_integer(r as i64).is_zero(), "[r] at r={}", r);
            assert_eq!(f.quantum_integer(-2), -f.quantum_integer(2));
        }
        // level 3: q is a primitive 6th root, so [2] = q + q^{−1} = 1;
        // evaluated both via the sum form and via explicit root powers.
        let f = field_for_level(3, 1).unwrap();
        let direct = f.q_pow(1).add_ref(&f.q_pow(-1));
        assert_eq!(f.quantum_integer(2), direct);
        assert!(direct.is_one());
    }

    #[test]
    fn serde_roundtrip_and_shape() {
        let f = field_for_level(5, 1).unwrap();
        let v = f
            .quantum_integer(3)
            .scaled(&BigInt::from(5), &BigInt::from(6))
            .add_ref(&f.sqrt2().inverse().unwrap());
        let json = serde_json::to_string(&v).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["N"], 40);
        assert_eq!(parsed["coeffs"].as_array().unwrap().len(), 16);
        let back: CycloNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
