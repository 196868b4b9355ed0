//! Exact arithmetic in F_p and F_{p^m}.
//!
//! Elements are stored packed: the coefficient vector `(c_0, .., c_{m-1})` in
//! the power basis of the defining polynomial is the integer
//! `c_0 + c_1 p + .. + c_{m-1} p^{m-1}`. Prime fields use plain modular
//! arithmetic; extensions use log/antilog and Zech tables built once per
//! field, so every operation is a few table lookups.

mod fp_poly;
pub mod poly;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use poly::{univariate_roots, Poly};

/// Largest field order for which extension tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 21;

const NO_LOG: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Monic defining polynomial, lowest coefficient first (length `m + 1`).
    pub min_poly: Vec<u32>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Self {
        FieldSpec {
            p,
            m: 1,
            min_poly: vec![0, 1],
        }
    }

    /// `F_{p^m}` with a deterministic defining polynomial.
    pub fn extension(p: u32, m: u32) -> Result<Self> {
        if m <= 1 {
            return Ok(Self::prime(p));
        }
        check_prime(p)?;
        Ok(FieldSpec {
            p,
            m,
            min_poly: find_irreducible(p, m, 0),
        })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.m)
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if p < 3 {
        return Err(Error::InvalidField(
            "characteristic 2 is not supported".into(),
        ));
    }
    Ok(())
}

/// Monic irreducible polynomial of degree `m` over F_p (lowest coefficient
/// first). Deterministic in `(p, m, seed)`.
pub fn find_irreducible(p: u32, m: u32, seed: u64) -> Vec<u32> {
    let pp = p as u64;
    if m == 1 {
        return vec![0, 1];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((p as u64) << 32) ^ m as u64);
    loop {
        let mut f: Vec<u64> = (0..m).map(|_| rng.gen_range(0..pp)).collect();
        f.push(1);
        if f[0] != 0 && fp_poly::is_irreducible(&f, pp) {
            return f.into_iter().map(|c| c as u32).collect();
        }
    }
}

/// A field element in packed form. Only meaningful together with the
/// [`Field`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fel(pub(crate) u32);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The packed index in `0..q`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }
}

struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`.
    exp: Vec<u32>,
    /// `zech[d] = log(1 + g^d)`, or `NO_LOG` when `1 + g^d = 0`.
    zech: Vec<u32>,
}

struct Inner {
    spec: FieldSpec,
    p: u32,
    q: u32,
    tables: Option<Tables>,
}

/// A finite field handle; cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.0.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        check_prime(spec.p)?;
        if spec.m == 0 {
            return Err(Error::InvalidField(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = spec.order();
        if spec.m > 1 && q > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge {
                p: spec.p,
                m: spec.m,
            });
        }
        let spec = if spec.m == 1 {
            FieldSpec::prime(spec.p)
        } else {
            let f: Vec<u64> = spec.min_poly.iter().map(|&c| c as u64).collect();
            if f.len() != spec.m as usize + 1 || f[spec.m as usize] != 1 {
                return Err(Error::InvalidField(format!(
                    "defining polynomial must be monic of degree {}",
                    spec.m
                )));
            }
            if f.iter().any(|&c| c >= spec.p as u64) {
                return Err(Error::InvalidField("coefficient out of range".into()));
            }
            if !fp_poly::is_irreducible(&f, spec.p as u64) {
                return Err(Error::InvalidField(
                    "defining polynomial is reducible".into(),
                ));
            }
            spec
        };
        let tables = (spec.m > 1).then(|| build_tables(&spec));
        Ok(Field(Arc::new(Inner {
            p: spec.p,
            q: q as u32,
            spec,
            tables,
        })))
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(FieldSpec::prime(p))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.m
    }

    pub fn order(&self) -> u64 {
        self.0.q as u64
    }

    #[inline]
    pub fn zero(&self) -> Fel {
        Fel::ZERO
    }

    #[inline]
    pub fn one(&self) -> Fel {
        Fel::ONE
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_i64(&self, v: i64) -> Fel {
        Fel(v.rem_euclid(self.0.p as i64) as u32)
    }

    /// Element with the given packed index.
    pub fn element(&self, index: u64) -> Result<Fel> {
        if index >= self.order() {
            return Err(Error::SpecMismatch(format!(
                "index {index} out of range for {}",
                self.0.spec
            )));
        }
        Ok(Fel(index as u32))
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fel> {
        let m = self.0.spec.m as usize;
        if coeffs.len() != m {
            return Err(Error::SpecMismatch(format!(
                "expected {m} coefficients, got {}",
                coeffs.len()
            )));
        }
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(Error::SpecMismatch(format!("coefficient {c} out of range")));
            }
            v = v * self.0.p as u64 + c as u64;
        }
        Ok(Fel(v as u32))
    }

    pub fn coeffs(&self, a: Fel) -> Vec<u32> {
        let p = self.0.p;
        let mut v = a.0;
        (0..self.0.spec.m)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// The class of the polynomial variable `x` (for prime fields, `0`).
    pub fn generator_x(&self) -> Fel {
        if self.0.spec.m == 1 {
            Fel::ZERO
        } else {
            Fel(self.0.p)
        }
    }

    #[inline]
    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        match &self.0.tables {
            None => {
                let s = a.0 + b.0;
                Fel(if s >= self.0.p { s - self.0.p } else { s })
            }
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let q1 = self.0.q - 1;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + q1 - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    Fel::ZERO
                } else {
                    Fel(t.exp[(la + z) as usize])
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Fel) -> Fel {
        if a.0 == 0 {
            return a;
        }
        match &self.0.tables {
            None => Fel(self.0.p - a.0),
            Some(t) => {
                let half = (self.0.q - 1) / 2;
                Fel(t.exp[(t.log[a.0 as usize] + half) as usize])
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        match &self.0.tables {
            None => Fel(if a.0 >= b.0 {
                a.0 - b.0
            } else {
                a.0 + self.0.p - b.0
            }),
            Some(_) => self.add(a, self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        match &self.0.tables {
            None => Fel(((a.0 as u64 * b.0 as u64) % self.0.p as u64) as u32),
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    Fel::ZERO
                } else {
                    Fel(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
                }
            }
        }
    }

    pub fn inv(&self, a: Fel) -> Result<Fel> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            None => Fel(fp_poly::inv_mod(a.0 as u64, self.0.p as u64) as u32),
            Some(t) => {
                let q1 = self.0.q - 1;
                Fel(t.exp[((q1 - t.log[a.0 as usize]) % q1) as usize])
            }
        })
    }

    pub fn div(&self, a: Fel, b: Fel) -> Result<Fel> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fel, e: u64) -> Fel {
        if e == 0 {
            return Fel::ONE;
        }
        if a.0 == 0 {
            return Fel::ZERO;
        }
        match &self.0.tables {
            None => Fel(fp_poly::pow_mod(a.0 as u64, e, self.0.p as u64) as u32),
            Some(t) => {
                let q1 = (self.0.q - 1) as u64;
                let l = (t.log[a.0 as usize] as u64 * (e % q1)) % q1;
                Fel(t.exp[l as usize])
            }
        }
    }

    /// `dst[j] += c * src[j]` for all `j`.
    pub fn axpy(&self, dst: &mut [Fel], c: Fel, src: &[Fel]) {
        if c.0 == 0 {
            return;
        }
        match &self.0.tables {
            None => {
                let p = self.0.p as u64;
                let c = c.0 as u64;
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 = ((d.0 as u64 + c * s.0 as u64) % p) as u32;
                    }
                }
            }
            Some(t) => {
                let lc = t.log[c.0 as usize];
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        let prod = Fel(t.exp[(lc + t.log[s.0 as usize]) as usize]);
                        *d = self.add(*d, prod);
                    }
                }
            }
        }
    }

    /// `v[j] *= c` for all `j`.
    pub fn scale(&self, v: &mut [Fel], c: Fel) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }

    pub fn dot(&self, a: &[Fel], b: &[Fel]) -> Fel {
        let mut acc = Fel::ZERO;
        for (&x, &y) in a.iter().zip(b) {
            acc = self.add(acc, self.mul(x, y));
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fel {
        Fel(rng.gen_range(1..self.0.q))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fel> {
        (0..self.0.q).map(Fel)
    }

    /// JSON encoding: an integer for prime fields, else the little-endian
    /// coefficient array in the power basis.
    pub fn encode(&self, a: Fel) -> Value {
        if self.0.spec.m == 1 {
            Value::from(a.0)
        } else {
            Value::from(self.coeffs(a))
        }
    }

    pub fn decode(&self, v: &Value) -> Result<Fel> {
        match v {
            Value::Number(n) if self.0.spec.m == 1 => {
                let x = n
                    .as_u64()
                    .ok_or_else(|| Error::SpecMismatch(format!("bad element {n}")))?;
                if x >= self.0.p as u64 {
                    return Err(Error::SpecMismatch(format!("element {x} not reduced")));
                }
                Ok(Fel(x as u32))
            }
            Value::Array(items) => {
                let coeffs = items
                    .iter()
                    .map(|c| {
                        c.as_u64()
                            .filter(|&x| x <= u32::MAX as u64)
                            .map(|x| x as u32)
                            .ok_or_else(|| Error::SpecMismatch(format!("bad coefficient {c}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.from_coeffs(&coeffs)
            }
            other => Err(Error::SpecMismatch(format!("bad field element {other}"))),
        }
    }

    pub fn encode_vec(&self, v: &[Fel]) -> Value {
        Value::Array(v.iter().map(|&a| self.encode(a)).collect())
    }

    pub fn decode_vec(&self, v: &Value) -> Result<Vec<Fel>> {
        v.as_array()
            .ok_or_else(|| Error::MalformedFile("expected an array of field elements".into()))?
            .iter()
            .map(|x| self.decode(x))
            .collect()
    }

    /// Human-readable rendering of an element.
    pub fn display(&self, a: Fel) -> String {
        if self.0.spec.m == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Slow polynomial-basis multiplication used only while building tables.
fn mul_packed(spec: &FieldSpec, a: u32, b: u32) -> u32 {
    let p = spec.p as u64;
    let unpack = |mut v: u32| -> Vec<u64> {
        (0..spec.m)
            .map(|_| {
                let c = (v % spec.p) as u64;
                v /= spec.p;
                c
            })
            .collect()
    };
    let f: Vec<u64> = spec.min_poly.iter().map(|&c| c as u64).collect();
    let r = fp_poly::mul_mod(&unpack(a), &unpack(b), &f, p);
    r.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

fn build_tables(spec: &FieldSpec) -> Tables {
    let q = spec.order() as u32;
    let q1 = q - 1;
    let factors = fp_poly::distinct_prime_factors(q1 as u64);
    let pow_slow = |mut a: u32, mut e: u64| -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = mul_packed(spec, r, a);
            }
            a = mul_packed(spec, a, a);
            e >>= 1;
        }
        r
    };
    let g = (2..q)
        .find(|&cand| factors.iter().all(|&r| pow_slow(cand, q1 as u64 / r) != 1))
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * q1 as usize];
    let mut log = vec![NO_LOG; q as usize];
    let mut cur = 1u32;
    for i in 0..q1 {
        exp[i as usize] = cur;
        log[cur as usize] = i;
        cur = mul_packed(spec, cur, g);
    }
    for i in 0..q1 as usize {
        exp[i + q1 as usize] = exp[i];
    }
    let p = spec.p;
    let zech = (0..q1 as usize)
        .map(|d| {
            let v = exp[d];
            let low = v % p;
            let w = v - low + (low + 1) % p;
            if w == 0 {
                NO_LOG
            } else {
                log[w as usize]
            }
        })
        .collect();
    Tables { log, exp, zech }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f49() -> Field {
        Field::new(FieldSpec {
            p: 7,
            m: 2,
            min_poly: vec![1, 0, 1],
        })
        .unwrap()
    }

    #[test]
    fn inverse_in_f7() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.inv(Fel(3)).unwrap(), Fel(5));
        assert!(matches!(f.inv(Fel(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn defining_relation_in_f49() {
        let f = f49();
        let x = f.generator_x();
        assert_eq!(f.coeffs(f.mul(x, x)), vec![6, 0]);
        assert_eq!(f.pow(x, 49), x);
    }

    #[test]
    fn frobenius_fixes_every_element() {
        let f = f49();
        for a in f.elements() {
            assert_eq!(f.pow(a, 49), a);
        }
    }

    #[test]
    fn table_arithmetic_matches_polynomial_arithmetic() {
        let f = Field::new(FieldSpec::extension(5, 3).unwrap()).unwrap();
        let spec = f.spec().clone();
        for a in (0..125).step_by(7) {
            for b in 0..125 {
                let prod = f.mul(Fel(a), Fel(b));
                assert_eq!(prod.0, mul_packed(&spec, a, b));
                let ca = f.coeffs(Fel(a));
                let cb = f.coeffs(Fel(b));
                let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % 5).collect();
                assert_eq!(f.coeffs(f.add(Fel(a), Fel(b))), sum);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(2).is_err());
        let reducible = FieldSpec {
            p: 7,
            m: 2,
            min_poly: vec![6, 0, 1],
        };
        assert!(Field::new(reducible).is_err());
    }

    #[test]
    fn coefficient_length_is_checked() {
        let f = f49();
        assert!(matches!(f.from_coeffs(&[1]), Err(Error::SpecMismatch(_))));
        assert_eq!(f.from_coeffs(&[3, 2]).unwrap(), Fel(3 + 2 * 7));
    }

    #[test]
    fn x2_plus_1_is_irreducible_over_f7() {
        // brute check: no root in F_7
        assert!((0u32..7).all(|x| (x * x + 1) % 7 != 0));
        assert!(fp_poly::is_irreducible(&[1, 0, 1], 7));
    }

    #[test]
    fn found_cubic_over_f5_has_no_factor() {
        for seed in 0..5 {
            let f = find_irreducible(5, 3, seed);
            assert_eq!(f.len(), 4);
            assert_eq!(f[3], 1);
            // no roots in F_5
            for x in 0u64..5 {
                let v = f
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &c| (acc * x + c as u64) % 5);
                assert_ne!(v, 0);
            }
            // not divisible by any monic irreducible quadratic
            for c0 in 0u64..5 {
                for c1 in 0u64..5 {
                    let g = vec![c0, c1, 1];
                    if (0..5).any(|x| (x * x + c1 * x + c0) % 5 == 0) {
                        continue;
                    }
                    let fu: Vec<u64> = f.iter().map(|&c| c as u64).collect();
                    assert!(!fp_poly::rem(&fu, &g, 5).is_empty());
                }
            }
        }
    }

    #[test]
    fn json_encoding() {
        let f = f49();
        let a = f.from_coeffs(&[3, 4]).unwrap();
        assert_eq!(f.encode(a), serde_json::json!([3, 4]));
        assert_eq!(f.decode(&serde_json::json!([3, 4])).unwrap(), a);
        let g = Field::prime(101).unwrap();
        assert_eq!(g.encode(Fel(17)), serde_json::json!(17));
        assert!(g.decode(&serde_json::json!(101)).is_err());
    }
}
