//! Plücker equations of `Gr(2, n)` and linear sections.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fel, Field};
use crate::graded::{substitute_linear, sym_basis, Generator};
use crate::linalg::{Mat, Subspace};

/// `Gr(2, n)` in `P^{binom(n,2)-1}`.
#[derive(Clone, Debug)]
pub struct GrassmannianModel {
    pub n: usize,
    /// Coordinate `k` is `p_{ij}` with `plucker_vars[k] = (i, j)`, `i < j`.
    pub plucker_vars: Vec<(usize, usize)>,
    /// `p_ij p_kl - p_ik p_jl + p_il p_jk` for `i < j < k < l`.
    pub relations: Vec<Generator>,
}

pub fn plucker_model(field: &Field, n: usize) -> GrassmannianModel {
    assert!(n >= 4, "Gr(2, n) needs n >= 4");
    let mut vars = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            vars.push((i, j));
        }
    }
    let nv = vars.len();
    let var = |i: usize, j: usize| vars.iter().position(|&v| v == (i, j)).expect("pair");
    let basis = sym_basis(nv, 2);
    let mut relations = Vec::new();
    let one = Fel::ONE;
    let minus = field.from_i64(-1);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let mut coeffs = vec![Fel::ZERO; basis.len()];
                    for (a, b, c) in [
                        (var(i, j), var(k, l), one),
                        (var(i, k), var(j, l), minus),
                        (var(i, l), var(j, k), one),
                    ] {
                        let mut e = vec![0u8; nv];
                        e[a] += 1;
                        e[b] += 1;
                        coeffs[basis.index_of(&e).expect("quadratic monomial")] = c;
                    }
                    relations.push(Generator { degree: 2, coeffs });
                }
            }
        }
    }
    GrassmannianModel {
        n,
        plucker_vars: vars,
        relations,
    }
}

impl GrassmannianModel {
    pub fn nvars(&self) -> usize {
        self.plucker_vars.len()
    }

    /// Plücker coordinates of the row space of a random `2 x n` matrix,
    /// redrawn until the matrix has rank 2.
    pub fn sample_point<R: Rng + ?Sized>(&self, field: &Field, rng: &mut R) -> Vec<Fel> {
        loop {
            let a: Vec<Fel> = (0..self.n).map(|_| field.random(rng)).collect();
            let b: Vec<Fel> = (0..self.n).map(|_| field.random(rng)).collect();
            let pt: Vec<Fel> = self
                .plucker_vars
                .iter()
                .map(|&(i, j)| field.sub(field.mul(a[i], b[j]), field.mul(a[j], b[i])))
                .collect();
            if pt.iter().any(|c| !c.is_zero()) {
                return pt;
            }
        }
    }
}

/// Pulls quadrics (or any forms) back to the linear subspace parametrized
/// by the rows of `param`. Returns the nonzero restrictions and the
/// dimension of their span.
pub fn restrict_to_linear_section(
    field: &Field,
    forms: &[Generator],
    param: &Mat,
) -> Result<(Vec<Generator>, usize)> {
    let rank = param.rank();
    if rank != param.nrows() {
        return Err(Error::RankDeficientParametrization {
            rank,
            rows: param.nrows(),
        });
    }
    let restricted: Vec<Generator> = forms
        .iter()
        .map(|g| Generator {
            degree: g.degree,
            coeffs: substitute_linear(field, &g.coeffs, g.degree, param),
        })
        .filter(|g| g.coeffs.iter().any(|c| !c.is_zero()))
        .collect();
    let mut span = 0;
    let mut degrees: Vec<usize> = restricted.iter().map(|g| g.degree).collect();
    degrees.sort();
    degrees.dedup();
    for d in degrees {
        let rows: Vec<Vec<Fel>> = restricted
            .iter()
            .filter(|g| g.degree == d)
            .map(|g| g.coeffs.clone())
            .collect();
        let ncols = rows[0].len();
        span += Subspace::from_rows(field, ncols, rows)?.dim();
    }
    Ok((restricted, span))
}

/// A random `rows x cols` matrix of full row rank.
pub fn random_parametrization<R: Rng + ?Sized>(
    field: &Field,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<Mat> {
    let m = Mat::from_fn(field, rows, cols, |_, _| field.random(rng));
    let rank = m.rank();
    if rank != rows {
        return Err(Error::RankDeficientParametrization { rank, rows });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::poly_eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn relation_counts() {
        let f = Field::prime(101).unwrap();
        let g5 = plucker_model(&f, 5);
        assert_eq!((g5.nvars(), g5.relations.len()), (10, 5));
        let g6 = plucker_model(&f, 6);
        assert_eq!((g6.nvars(), g6.relations.len()), (15, 15));
        for r in &g6.relations {
            let nz: Vec<Fel> = r.coeffs.iter().copied().filter(|c| !c.is_zero()).collect();
            assert_eq!(nz.len(), 3);
        }
    }

    #[test]
    fn sampled_points_satisfy_relations() {
        let f = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [4, 5, 6] {
            let g = plucker_model(&f, n);
            for _ in 0..100 {
                let pt = g.sample_point(&f, &mut rng);
                for r in &g.relations {
                    assert!(poly_eval(&f, g.nvars(), &r.coeffs, 2, &pt).is_zero());
                }
            }
        }
    }

    #[test]
    fn restriction_spans() {
        let f = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g6 = plucker_model(&f, 6);
        let id = Mat::identity(&f, 15);
        let (same, span) = restrict_to_linear_section(&f, &g6.relations, &id).unwrap();
        assert_eq!(same, g6.relations);
        assert_eq!(span, 15);
        let param = random_parametrization(&f, 8, 15, &mut rng).unwrap();
        let (_, span) = restrict_to_linear_section(&f, &g6.relations, &param).unwrap();
        assert_eq!(span, 15);
        let g5 = plucker_model(&f, 5);
        let param = random_parametrization(&f, 6, 10, &mut rng).unwrap();
        let (_, span) = restrict_to_linear_section(&f, &g5.relations, &param).unwrap();
        assert_eq!(span, 5);
    }

    #[test]
    fn rank_deficient_parametrization_is_rejected() {
        let f = Field::prime(101).unwrap();
        let g5 = plucker_model(&f, 5);
        let param = Mat::zeros(&f, 6, 10);
        assert!(matches!(
            restrict_to_linear_section(&f, &g5.relations, &param),
            Err(Error::RankDeficientParametrization { rank: 0, rows: 6 })
        ));
    }
}
