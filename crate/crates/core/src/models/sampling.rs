//! Rational points on projective models.
//!
//! A random linear slice of complementary dimension cuts an
//! arithmetically Cohen-Macaulay model in a finite scheme of degree `D`.
//! In a degree `e` where the sliced coordinate ring has stabilized at `D`,
//! multiplication by `y_i / L` for a general linear form `L` is a family of
//! commuting operators whose joint eigenvectors are the points of the
//! slice; simple eigenvalues in the field give its rational points.

use std::collections::{HashSet, VecDeque};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::poly::univariate_roots;
use crate::field::{Fel, Field};
use crate::graded::{
    eval_matrix, normalize_point, substitute_linear, sym_dim, CoordinateRing, EvaluationModel,
    Generator, PresentationModel, EVALUATION_SLACK,
};
use crate::linalg::Mat;

use super::grassmannian::random_parametrization;

/// Highest degree probed while looking for the stable Hilbert value of a
/// slice.
const MAX_SLICE_DEGREE: usize = 6;

/// Tries for a linear form that acts invertibly on a slice.
const FORM_ATTEMPTS: usize = 8;

/// Rational points of the intersection of `model` (of dimension `dim`)
/// with one random linear subspace of codimension `dim`. May be empty.
pub fn slice_points<R: Rng + ?Sized>(
    model: &PresentationModel,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Fel>>> {
    let field = &model.field;
    let n = model.n;
    if dim == 0 || dim >= n {
        return Err(Error::InvalidArgument(format!(
            "cannot slice a {dim}-dimensional model in {n} variables"
        )));
    }
    let m = n - dim;
    let mut param = random_parametrization(field, m, n, rng);
    while param.is_err() {
        param = random_parametrization(field, m, n, rng);
    }
    let param = param?;
    let gens: Vec<Generator> = model
        .generators
        .iter()
        .map(|g| Generator {
            degree: g.degree,
            coeffs: substitute_linear(field, &g.coeffs, g.degree, &param),
        })
        .filter(|g| g.coeffs.iter().any(|c| !c.is_zero()))
        .collect();
    let ring = CoordinateRing::presentation(&PresentationModel::new(field, m, gens)?);
    let mut e = 1;
    let mut h = ring.dim(1)?;
    loop {
        let next = ring.dim(e as i64 + 1)?;
        if next == h {
            break;
        }
        if e + 1 >= MAX_SLICE_DEGREE {
            return Err(Error::Degenerate(
                "Hilbert function of a linear slice does not stabilize".into(),
            ));
        }
        h = next;
        e += 1;
    }
    if h == 0 {
        return Ok(Vec::new());
    }
    let mults = ring.mult_maps(e)?;
    let random_form = |rng: &mut R| -> Mat {
        let mut acc = Mat::zeros(field, h, h);
        for mm in mults {
            acc.add_scaled(field.random(rng), mm).expect("same shape");
        }
        acc
    };
    let mut linv = None;
    for _ in 0..FORM_ATTEMPTS {
        if let Ok(inv) = random_form(rng).inverse() {
            linv = Some(inv);
            break;
        }
    }
    let Some(linv) = linv else {
        return Ok(Vec::new());
    };
    let ops: Vec<Mat> = mults.iter().map(|mm| linv.mul(mm)).collect::<Result<_>>()?;
    let mut t = Mat::zeros(field, h, h);
    for op in &ops {
        t.add_scaled(field.random(rng), op)?;
    }
    let roots = univariate_roots(field, &t.charpoly()?)?;
    let mut out = Vec::new();
    for (lambda, mult) in roots {
        if mult != 1 {
            continue;
        }
        let mut shifted = t.clone();
        for i in 0..h {
            shifted.set(i, i, field.sub(shifted.get(i, i), lambda));
        }
        let ker = shifted.kernel_basis();
        if ker.dim() != 1 {
            continue;
        }
        let v = ker.basis().row(0).to_vec();
        let k = v
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero eigenvector");
        let vk_inv = field.inv(v[k])?;
        let y: Vec<Fel> = ops
            .iter()
            .map(|op| Ok(field.mul(op.mul_vec(&v)?[k], vk_inv)))
            .collect::<Result<_>>()?;
        let x: Vec<Fel> = (0..n).map(|j| field.dot(&y, &param.column(j))).collect();
        let Some(x) = normalize_point(field, &x) else {
            continue;
        };
        if model.vanishes_at(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Up to `count` distinct rational points of `model`, gathered from
/// random slices; fails once `max_stall` consecutive slices bring nothing
/// new.
pub fn sample_section_points<R: Rng + ?Sized>(
    model: &PresentationModel,
    dim: usize,
    count: usize,
    max_stall: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Fel>>> {
    let mut feed = PointFeed::new(&model.field, max_stall, || {
        slice_points(model, dim, rng).map(Some)
    });
    let mut out = Vec::new();
    while out.len() < count {
        match feed.next_point()? {
            Some(p) => out.push(p),
            None => {
                return Err(Error::InsufficientPoints {
                    needed: count,
                    have: out.len(),
                })
            }
        }
    }
    Ok(out)
}

/// Deduplicating buffer over a source of point batches. The source
/// returns `None` when exhausted.
pub struct PointFeed<'f, S> {
    field: &'f Field,
    source: S,
    queue: VecDeque<Vec<Fel>>,
    seen: HashSet<Vec<Fel>>,
    stall: usize,
    max_stall: usize,
}

impl<'f, S> PointFeed<'f, S>
where
    S: FnMut() -> Result<Option<Vec<Vec<Fel>>>>,
{
    pub fn new(field: &'f Field, max_stall: usize, source: S) -> Self {
        PointFeed {
            field,
            source,
            queue: VecDeque::new(),
            seen: HashSet::new(),
            stall: 0,
            max_stall,
        }
    }

    pub fn next_point(&mut self) -> Result<Option<Vec<Fel>>> {
        loop {
            if let Some(p) = self.queue.pop_front() {
                return Ok(Some(p));
            }
            if self.stall >= self.max_stall {
                return Ok(None);
            }
            let Some(batch) = (self.source)()? else {
                return Ok(None);
            };
            let before = self.queue.len();
            for p in batch {
                let Some(p) = normalize_point(self.field, &p) else {
                    continue;
                };
                if self.seen.insert(p.clone()) {
                    self.queue.push_back(p);
                }
            }
            if self.queue.len() == before {
                self.stall += 1;
            } else {
                self.stall = 0;
            }
        }
    }
}

/// Point-count policy for evaluation models: at least
/// `dim Sym^top + slack` points, then more until the rank of the degree
/// `top` evaluation matrix survives two consecutive additions.
pub fn collect_points<S>(
    field: &Field,
    n: usize,
    top: usize,
    feed: &mut PointFeed<'_, S>,
) -> Result<EvaluationModel>
where
    S: FnMut() -> Result<Option<Vec<Vec<Fel>>>>,
{
    let needed = sym_dim(n, top) + EVALUATION_SLACK;
    let mut pts = EvaluationModel::new(n);
    let mut add = |pts: &mut EvaluationModel| -> Result<bool> {
        match feed.next_point()? {
            Some(p) => {
                pts.push(field, &p)?;
                Ok(true)
            }
            None => Ok(false),
        }
    };
    while pts.len() < needed {
        if !add(&mut pts)? {
            return Err(Error::InsufficientPoints {
                needed,
                have: pts.len(),
            });
        }
    }
    let mut rank = eval_matrix(field, &pts, top).rank();
    let mut stable = 0;
    while stable < 2 {
        if !add(&mut pts)? {
            return Err(Error::InsufficientPoints {
                needed: pts.len() + 2 - stable,
                have: pts.len(),
            });
        }
        let r = eval_matrix(field, &pts, top).rank();
        if r == rank {
            stable += 1;
        } else {
            rank = r;
            stable = 0;
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::sym_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn twisted_cubic(f: &Field) -> PresentationModel {
        let b = sym_basis(4, 2);
        let q = |terms: &[(&[u8], i64)]| {
            let mut c = vec![Fel::ZERO; b.len()];
            for (e, v) in terms {
                c[b.index_of(e).unwrap()] = f.from_i64(*v);
            }
            Generator {
                degree: 2,
                coeffs: c,
            }
        };
        let g = vec![
            q(&[(&[1, 0, 1, 0], 1), (&[0, 2, 0, 0], -1)]),
            q(&[(&[1, 0, 0, 1], 1), (&[0, 1, 1, 0], -1)]),
            q(&[(&[0, 1, 0, 1], 1), (&[0, 0, 2, 0], -1)]),
        ];
        PresentationModel::new(f, 4, g).unwrap()
    }

    #[test]
    fn twisted_cubic_points_are_on_the_curve() {
        let f = Field::prime(101).unwrap();
        let model = twisted_cubic(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = sample_section_points(&model, 1, 40, 50, &mut rng).unwrap();
        assert_eq!(pts.len(), 40);
        let distinct: HashSet<_> = pts.iter().collect();
        assert_eq!(distinct.len(), 40);
        for p in &pts {
            assert!(model.vanishes_at(p));
        }
    }

    #[test]
    fn small_field_runs_dry() {
        // the twisted cubic has q + 1 = 8 points over F_7
        let f = Field::prime(7).unwrap();
        let model = twisted_cubic(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_section_points(&model, 1, 9, 60, &mut rng).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientPoints { needed: 9, have: 8 }
        ));
    }
}
