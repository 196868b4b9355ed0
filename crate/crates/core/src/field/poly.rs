//! Univariate polynomials over a [`Field`] and root extraction.

use crate::error::{Error, Result};

use super::{Fel, Field};

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<Fel>);

impl Poly {
    pub fn new(mut coeffs: Vec<Fel>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Fel) -> Self {
        Poly::new(vec![c])
    }

    /// `x - r`
    pub fn linear_root(field: &Field, r: Fel) -> Self {
        Poly::new(vec![field.neg(r), Fel::ONE])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fel {
        self.0.last().copied().unwrap_or(Fel::ZERO)
    }

    pub fn coeff(&self, i: usize) -> Fel {
        self.0.get(i).copied().unwrap_or(Fel::ZERO)
    }

    pub fn eval(&self, field: &Field, x: Fel) -> Fel {
        self.0
            .iter()
            .rev()
            .fold(Fel::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new(
            (0..n)
                .map(|i| field.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new(
            (0..n)
                .map(|i| field.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn scale(&self, field: &Field, c: Fel) -> Poly {
        Poly::new(self.0.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fel::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            field.axpy(&mut out[i..i + other.0.len()], a, &other.0);
        }
        Poly::new(out)
    }

    pub fn pow(&self, field: &Field, e: u32) -> Poly {
        let mut out = Poly::constant(Fel::ONE);
        for _ in 0..e {
            out = out.mul(field, self);
        }
        out
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, field: &Field, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead_inv = field.inv(divisor.leading())?;
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Fel::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = field.mul(rem[i + dd], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i] = c;
            let neg = field.neg(c);
            field.axpy(&mut rem[i..i + dd + 1], neg, &divisor.0);
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, field: &Field, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(field, divisor)?.1)
    }

    pub fn monic(&self, field: &Field) -> Result<Poly> {
        let l = field.inv(self.leading())?;
        Ok(self.scale(field, l))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, field: &Field, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic(field).expect("nonzero")
        }
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, field: &Field, mut e: u64, modulus: &Poly) -> Result<Poly> {
        let mut result = Poly::constant(Fel::ONE).rem(field, modulus)?;
        let mut base = self.rem(field, modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(field, &base).rem(field, modulus)?;
            }
            base = base.mul(field, &base).rem(field, modulus)?;
            e >>= 1;
        }
        Ok(result)
    }
}

/// All roots of `poly` lying in the field, with multiplicities, sorted by
/// packed index.
pub fn univariate_roots(field: &Field, poly: &Poly) -> Result<Vec<(Fel, usize)>> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f = poly.monic(field)?;
    let mut roots = Vec::new();
    if f.degree() == Some(0) {
        return Ok(roots);
    }
    let x = Poly::new(vec![Fel::ZERO, Fel::ONE]);
    // product of the distinct linear factors: gcd(f, x^q - x)
    let xq = x.pow_mod(field, field.order(), &f)?;
    let split = f.gcd(field, &xq.sub(field, &x));
    let mut distinct = Vec::new();
    split_linear(field, &split, &mut distinct)?;
    distinct.sort();
    for r in distinct {
        let lin = Poly::linear_root(field, r);
        let mut mult = 0;
        let mut cur = f.clone();
        loop {
            let (qt, rm) = cur.div_rem(field, &lin)?;
            if !rm.is_zero() {
                break;
            }
            mult += 1;
            cur = qt;
        }
        roots.push((r, mult));
    }
    Ok(roots)
}

/// Splits a squarefree product of distinct linear factors.
fn split_linear(field: &Field, g: &Poly, out: &mut Vec<Fel>) -> Result<()> {
    match g.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            let g = g.monic(field)?;
            out.push(field.neg(g.coeff(0)));
            return Ok(());
        }
        _ => {}
    }
    let deg = g.degree().unwrap();
    if field.order() <= 64 {
        // tiny field: exhaustive search
        out.extend(field.elements().filter(|&a| g.eval(field, a).is_zero()));
        return Ok(());
    }
    // equal-degree splitting with deterministic shifts a = 0, 1, 2, ...
    let half = (field.order() - 1) / 2;
    for shift in field.elements() {
        let base = Poly::new(vec![shift, Fel::ONE]);
        let h = base.pow_mod(field, half, g)?;
        let d = g.gcd(field, &h.sub(field, &Poly::constant(Fel::ONE)));
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < deg {
            let (other, _) = g.div_rem(field, &d)?;
            split_linear(field, &d, out)?;
            split_linear(field, &other, out)?;
            return Ok(());
        }
    }
    unreachable!("equal-degree splitting always finds a separating shift")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(field: &Field, c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&v| field.from_i64(v)).collect())
    }

    #[test]
    fn simple_roots_in_f7() {
        let f = Field::prime(7).unwrap();
        let r = univariate_roots(&f, &p(&f, &[-1, 0, 1])).unwrap();
        assert_eq!(r, vec![(Fel(1), 1), (Fel(6), 1)]);
    }

    #[test]
    fn double_root() {
        let f = Field::prime(7).unwrap();
        // (x - 2)^2 = x^2 - 4x + 4
        let r = univariate_roots(&f, &p(&f, &[4, -4, 1])).unwrap();
        assert_eq!(r, vec![(Fel(2), 2)]);
    }

    #[test]
    fn x2_plus_1_needs_extension() {
        let f7 = Field::prime(7).unwrap();
        assert!(univariate_roots(&f7, &p(&f7, &[1, 0, 1]))
            .unwrap()
            .is_empty());
        let f49 = Field::new(FieldSpec {
            p: 7,
            m: 2,
            min_poly: vec![1, 0, 1],
        })
        .unwrap();
        let r = univariate_roots(&f49, &p(&f49, &[1, 0, 1])).unwrap();
        // exhaustive oracle
        let brute: Vec<Fel> = f49
            .elements()
            .filter(|&a| f49.add(f49.mul(a, a), Fel::ONE).is_zero())
            .collect();
        assert_eq!(r.len(), 2);
        assert_eq!(r.iter().map(|x| x.0).collect::<Vec<_>>(), brute);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        let f = Field::prime(7).unwrap();
        assert!(matches!(
            univariate_roots(&f, &Poly::zero()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn roots_of_products_are_multiset_unions() {
        let field = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let da = rng.gen_range(1..=3);
            let db = rng.gen_range(1..=3);
            let a = Poly::new((0..=da).map(|_| field.random_nonzero(&mut rng)).collect());
            let b = Poly::new((0..=db).map(|_| field.random_nonzero(&mut rng)).collect());
            let ra = univariate_roots(&field, &a).unwrap();
            let rb = univariate_roots(&field, &b).unwrap();
            let rab = univariate_roots(&field, &a.mul(&field, &b)).unwrap();
            let mut merged = std::collections::BTreeMap::new();
            for (r, m) in ra.into_iter().chain(rb) {
                *merged.entry(r).or_insert(0) += m;
            }
            assert_eq!(rab, merged.into_iter().collect::<Vec<_>>());
        }
    }
}
