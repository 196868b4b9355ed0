use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::field::{Fel, Field};
use crate::linalg::Mat;

/// Monomials of degree `q` in `n` variables, in graded-lex order with
/// `x_0 > x_1 > .. > x_{n-1}`.
#[derive(Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    q: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

type BasisCache = Mutex<HashMap<(usize, usize), Arc<MonomialBasis>>>;

static CACHE: Lazy<BasisCache> = Lazy::new(Default::default);

fn push_exponents(n: usize, q: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == n {
        prefix.push(q as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=q).rev() {
        prefix.push(e as u8);
        push_exponents(n, q - e, prefix, out);
        prefix.pop();
    }
}

/// `binom(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl MonomialBasis {
    fn build(n: usize, q: usize) -> Self {
        assert!(n >= 1, "at least one variable");
        let mut exps = Vec::with_capacity(binomial(n + q - 1, q));
        push_exponents(n, q, &mut Vec::with_capacity(n), &mut exps);
        let index = exps
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        MonomialBasis { n, q, exps, index }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Index of `x_var * m_i` in the degree `q + 1` basis `next`.
    pub fn times_variable(&self, i: usize, var: usize, next: &MonomialBasis) -> usize {
        let mut e = self.exps[i].clone();
        e[var] += 1;
        next.index_of(&e).expect("product lies in the next degree")
    }

    /// Values of all monomials at a point.
    pub fn evaluate(&self, field: &Field, point: &[Fel]) -> Vec<Fel> {
        let powers: Vec<Vec<Fel>> = point
            .iter()
            .map(|&x| {
                let mut pw = Vec::with_capacity(self.q + 1);
                let mut cur = Fel::ONE;
                for _ in 0..=self.q {
                    pw.push(cur);
                    cur = field.mul(cur, x);
                }
                pw
            })
            .collect();
        self.exps
            .iter()
            .map(|e| {
                e.iter().enumerate().fold(Fel::ONE, |acc, (v, &k)| {
                    field.mul(acc, powers[v][k as usize])
                })
            })
            .collect()
    }

    pub fn render(&self, i: usize, names: &[String]) -> String {
        let parts: Vec<String> = self.exps[i]
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| {
                if k == 1 {
                    names[v].clone()
                } else {
                    format!("{}^{}", names[v], k)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Basis of `Sym^q` of an `n`-dimensional space: monomials of degree `q`.
pub fn sym_basis(n: usize, q: usize) -> Arc<MonomialBasis> {
    let mut map = CACHE.lock().expect("monomial cache poisoned");
    map.entry((n, q))
        .or_insert_with(|| Arc::new(MonomialBasis::build(n, q)))
        .clone()
}

pub fn sym_dim(n: usize, q: usize) -> usize {
    binomial(n + q - 1, q)
}

/// Product of two homogeneous polynomials given as dense coefficient
/// vectors over [`sym_basis`].
pub fn poly_mul(field: &Field, n: usize, a: &[Fel], da: usize, b: &[Fel], db: usize) -> Vec<Fel> {
    let ba = sym_basis(n, da);
    let bb = sym_basis(n, db);
    let bc = sym_basis(n, da + db);
    let mut out = vec![Fel::ZERO; bc.len()];
    let mut e = vec![0u8; n];
    for (i, &ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            for (v, ev) in e.iter_mut().enumerate().take(n) {
                *ev = ba.exps[i][v] + bb.exps[j][v];
            }
            let k = bc.index_of(&e).expect("product degree");
            out[k] = field.add(out[k], field.mul(ca, cb));
        }
    }
    out
}

/// Sparse coefficients of `x^mono * g` in the basis of the product degree.
pub fn monomial_times(n: usize, mono: &[u8], g: &[Fel], dg: usize) -> Vec<(usize, Fel)> {
    let bg = sym_basis(n, dg);
    let bo = sym_basis(n, dg + mono.iter().map(|&k| k as usize).sum::<usize>());
    let mut e = vec![0u8; n];
    g.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, &c)| {
            for v in 0..n {
                e[v] = bg.exps[j][v] + mono[v];
            }
            (bo.index_of(&e).expect("product degree"), c)
        })
        .collect()
}

/// Evaluates a homogeneous polynomial at a point.
pub fn poly_eval(field: &Field, n: usize, g: &[Fel], degree: usize, point: &[Fel]) -> Fel {
    let vals = sym_basis(n, degree).evaluate(field, point);
    field.dot(g, &vals)
}

/// `∂g/∂x_var`, a polynomial of degree `degree - 1` (zero vector when
/// `degree == 0`).
pub fn partial_derivative(
    field: &Field,
    n: usize,
    g: &[Fel],
    degree: usize,
    var: usize,
) -> Vec<Fel> {
    if degree == 0 {
        return vec![Fel::ZERO; 1];
    }
    let src = sym_basis(n, degree);
    let dst = sym_basis(n, degree - 1);
    let mut out = vec![Fel::ZERO; dst.len()];
    let mut e = vec![0u8; n];
    for (i, &c) in g.iter().enumerate() {
        let k = src.exps[i][var];
        if c.is_zero() || k == 0 {
            continue;
        }
        e.copy_from_slice(&src.exps[i]);
        e[var] -= 1;
        let j = dst.index_of(&e).expect("lower degree");
        out[j] = field.add(out[j], field.mul(c, field.from_i64(k as i64)));
    }
    out
}

/// Pulls back a homogeneous polynomial in `param.ncols()` variables along
/// the linear map `y -> y * param`, giving a polynomial in `param.nrows()`
/// variables.
pub fn substitute_linear(field: &Field, g: &[Fel], degree: usize, param: &Mat) -> Vec<Fel> {
    let n_old = param.ncols();
    let n_new = param.nrows();
    let old = sym_basis(n_old, degree);
    // x_j = sum_i y_i param[i][j], as degree-1 polynomials in y
    let linear: Vec<Vec<Fel>> = (0..n_old).map(|j| param.column(j)).collect();
    let mut out = vec![Fel::ZERO; sym_dim(n_new, degree)];
    for (i, &c) in g.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut acc = vec![c];
        let mut d = 0;
        for (v, &k) in old.exps[i].iter().enumerate() {
            for _ in 0..k {
                acc = poly_mul(field, n_new, &acc, d, &linear[v], 1);
                d += 1;
            }
        }
        field.axpy(&mut out, Fel::ONE, &acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_cubics_in_grlex_order() {
        let b = sym_basis(2, 3);
        assert_eq!(
            b.exponents(),
            &[vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]
        );
    }

    #[test]
    fn sizes() {
        assert_eq!(sym_basis(6, 2).len(), 21);
        assert_eq!(sym_basis(8, 2).len(), 36);
        assert_eq!(sym_basis(3, 6).len(), 28);
        assert_eq!(sym_basis(4, 0).len(), 1);
        for n in 1..8 {
            for q in 0..5 {
                let b = sym_basis(n, q);
                assert_eq!(b.len(), binomial(n + q - 1, q));
                assert!(b
                    .exponents()
                    .iter()
                    .all(|e| e.iter().map(|&k| k as usize).sum::<usize>() == q));
            }
        }
    }

    #[test]
    fn euler_relation() {
        // sum x_i dg/dx_i = deg(g) g
        use rand::SeedableRng;
        let field = Field::prime(101).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let g: Vec<Fel> = (0..sym_dim(3, 4)).map(|_| field.random(&mut rng)).collect();
        let pt: Vec<Fel> = (0..3).map(|_| field.random(&mut rng)).collect();
        let lhs = (0..3).fold(Fel::ZERO, |acc, v| {
            let d = partial_derivative(&field, 3, &g, 4, v);
            field.add(acc, field.mul(pt[v], poly_eval(&field, 3, &d, 3, &pt)))
        });
        let rhs = field.mul(field.from_i64(4), poly_eval(&field, 3, &g, 4, &pt));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_commutes_with_evaluation() {
        use rand::SeedableRng;
        let field = Field::prime(101).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let param = Mat::from_fn(&field, 3, 5, |_, _| field.random(&mut rng));
        let g: Vec<Fel> = (0..sym_dim(5, 3)).map(|_| field.random(&mut rng)).collect();
        let h = substitute_linear(&field, &g, 3, &param);
        for _ in 0..10 {
            let y: Vec<Fel> = (0..3).map(|_| field.random(&mut rng)).collect();
            let x: Vec<Fel> = (0..5).map(|j| field.dot(&y, &param.column(j))).collect();
            assert_eq!(
                poly_eval(&field, 3, &h, 3, &y),
                poly_eval(&field, 5, &g, 3, &x)
            );
        }
    }
}
