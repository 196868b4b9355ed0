//! Graded pieces `M_q` of homogeneous coordinate rings.
//!
//! A ring is given either by a presentation (generators of the ideal) or by
//! a set of points on the variety (evaluation). In both cases a degree-`q`
//! piece is described by a set of basis monomials together with a
//! reduction matrix sending any vector of `Sym^q` to coordinates in that
//! basis, so multiplication maps are computed the same way for both.

pub mod monomial;

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use once_cell::sync::OnceCell;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Fel, Field};
use crate::linalg::{Mat, Subspace};

pub use monomial::{
    binomial, monomial_times, partial_derivative, poly_eval, poly_mul, substitute_linear,
    sym_basis, sym_dim, MonomialBasis,
};

/// Points beyond `dim Sym^q` required before an evaluation piece of degree
/// `q` is trusted.
pub const EVALUATION_SLACK: usize = 10;

/// Highest degree for which pieces are built.
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub construction: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    /// Number of random draws consumed before the model was accepted.
    #[serde(default)]
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_model: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub degree: usize,
    pub coeffs: Vec<Fel>,
}

/// A projective model given by ideal generators.
#[derive(Clone, Debug)]
pub struct PresentationModel {
    pub field: Field,
    pub n: usize,
    pub variables: Vec<String>,
    pub generators: Vec<Generator>,
    pub expected_hilbert: BTreeMap<usize, usize>,
    pub meta: ModelMeta,
}

pub fn default_variables(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl PresentationModel {
    pub fn new(field: &Field, n: usize, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            if g.coeffs.len() != sym_dim(n, g.degree) {
                return Err(Error::AmbientMismatch(g.coeffs.len(), sym_dim(n, g.degree)));
            }
            if g.coeffs.iter().all(|c| c.is_zero()) {
                return Err(Error::ZeroPolynomial);
            }
        }
        Ok(PresentationModel {
            field: field.clone(),
            n,
            variables: default_variables(n),
            generators,
            expected_hilbert: BTreeMap::new(),
            meta: ModelMeta::default(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn with_expected_hilbert(mut self, expected: &[(usize, usize)]) -> Self {
        self.expected_hilbert = expected.iter().copied().collect();
        self
    }

    pub fn generators_of_degree(&self, d: usize) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(move |g| g.degree == d)
    }

    pub fn vanishes_at(&self, point: &[Fel]) -> bool {
        self.generators
            .iter()
            .all(|g| poly_eval(&self.field, self.n, &g.coeffs, g.degree, point).is_zero())
    }
}

/// Scales a nonzero point so its first nonzero coordinate is 1.
pub fn normalize_point(field: &Field, point: &[Fel]) -> Option<Vec<Fel>> {
    let lead = point.iter().copied().find(|c| !c.is_zero())?;
    let inv = field.inv(lead).ok()?;
    Some(point.iter().map(|&c| field.mul(c, inv)).collect())
}

/// A finite set of normalized projective points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationModel {
    n: usize,
    points: Vec<Vec<Fel>>,
    seen: HashSet<Vec<Fel>>,
}

impl EvaluationModel {
    pub fn new(n: usize) -> Self {
        EvaluationModel {
            n,
            points: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn from_points(field: &Field, n: usize, points: &[Vec<Fel>]) -> Result<Self> {
        let mut m = Self::new(n);
        for p in points {
            m.push(field, p)?;
        }
        Ok(m)
    }

    /// Adds a point; returns `false` if it was already present.
    pub fn push(&mut self, field: &Field, point: &[Fel]) -> Result<bool> {
        if point.len() != self.n {
            return Err(Error::AmbientMismatch(point.len(), self.n));
        }
        let p = normalize_point(field, point).ok_or_else(|| {
            Error::InvalidArgument("the zero vector is not a projective point".into())
        })?;
        if !self.seen.insert(p.clone()) {
            return Ok(false);
        }
        self.points.push(p);
        Ok(true)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Fel>] {
        &self.points
    }

    pub fn truncated(&self, count: usize) -> Self {
        EvaluationModel {
            n: self.n,
            points: self.points[..count.min(self.points.len())].to_vec(),
            seen: self.points[..count.min(self.points.len())]
                .iter()
                .cloned()
                .collect(),
        }
    }
}

/// The row space of all monomial multiples of generators in degree `q`.
pub fn ideal_piece(model: &PresentationModel, q: usize) -> Subspace {
    let n = model.n;
    let dim = sym_dim(n, q);
    let mut rows = Vec::new();
    for g in model.generators.iter().filter(|g| g.degree <= q) {
        let mult = sym_basis(n, q - g.degree);
        for e in mult.exponents() {
            let mut row = vec![Fel::ZERO; dim];
            for (k, c) in monomial_times(n, e, &g.coeffs, g.degree) {
                row[k] = c;
            }
            rows.push(row);
        }
    }
    Subspace::from_rows(&model.field, dim, rows).expect("consistent lengths")
}

/// Entry `(i, j)` is monomial `j` of degree `q` evaluated at point `i`.
pub fn eval_matrix(field: &Field, points: &EvaluationModel, q: usize) -> Mat {
    let basis = sym_basis(points.nvars(), q);
    let rows: Vec<Vec<Fel>> = points
        .points()
        .iter()
        .map(|p| basis.evaluate(field, p))
        .collect();
    Mat::from_rows(field, basis.len(), &rows).expect("consistent lengths")
}

/// A degree-`q` piece with a monomial basis and a reduction map
/// `Sym^q -> M_q`.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub q: usize,
    pub sym: Arc<MonomialBasis>,
    /// Indices (into `sym`) of the monomials forming the basis of `M_q`.
    pub basis: Vec<usize>,
    /// `dim M_q x dim Sym^q`; column `j` gives monomial `j` in the basis.
    pub reduction: Mat,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn reduce(&self, v: &[Fel]) -> Result<Vec<Fel>> {
        self.reduction.mul_vec(v)
    }
}

fn check_hilbert(expected: &BTreeMap<usize, usize>, q: usize, observed: usize) -> Result<()> {
    match expected.get(&q) {
        Some(&e) if e != observed => Err(Error::HilbertMismatch {
            degree: q,
            expected: e,
            observed,
        }),
        _ => Ok(()),
    }
}

/// `M_q = Sym^q / I_q` for a presentation; the basis is the set of
/// non-pivot monomials of the reduced ideal piece.
pub fn quotient_piece_presentation(model: &PresentationModel, q: usize) -> Result<GradedPiece> {
    let field = &model.field;
    let sym = sym_basis(model.n, q);
    let ideal = ideal_piece(model, q);
    let mut is_pivot = vec![false; sym.len()];
    for &c in ideal.pivots() {
        is_pivot[c] = true;
    }
    let basis: Vec<usize> = (0..sym.len()).filter(|&c| !is_pivot[c]).collect();
    check_hilbert(&model.expected_hilbert, q, basis.len())?;
    let position: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut reduction = Mat::zeros(field, basis.len(), sym.len());
    for (k, &c) in basis.iter().enumerate() {
        reduction.set(k, c, Fel::ONE);
    }
    // pivot monomial c of row r equals -(rest of row r) modulo the ideal
    for (r, &c) in ideal.pivots().iter().enumerate() {
        for (&col, &k) in &position {
            let a = ideal.basis().get(r, col);
            if !a.is_zero() {
                reduction.set(k, c, field.neg(a));
            }
        }
    }
    Ok(GradedPiece {
        q,
        sym,
        basis,
        reduction,
    })
}

/// `M_q` realized as functions on a point set; the basis is the set of
/// pivot columns of the evaluation matrix.
pub fn quotient_piece_evaluation(
    field: &Field,
    points: &EvaluationModel,
    q: usize,
    expected: &BTreeMap<usize, usize>,
) -> Result<GradedPiece> {
    let sym = sym_basis(points.nvars(), q);
    let needed = if q == 0 {
        1
    } else {
        sym.len() + EVALUATION_SLACK
    };
    if points.len() < needed {
        return Err(Error::InsufficientPoints {
            needed,
            have: points.len(),
        });
    }
    let ech = eval_matrix(field, points, q).echelon();
    check_hilbert(expected, q, ech.rank)?;
    let rows: Vec<usize> = (0..ech.rank).collect();
    Ok(GradedPiece {
        q,
        sym,
        basis: ech.pivots.clone(),
        reduction: ech.rref.select_rows(&rows),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Presentation,
    Evaluation,
}

#[derive(Clone, Debug)]
enum Source {
    Presentation(PresentationModel),
    Evaluation {
        points: EvaluationModel,
        expected: BTreeMap<usize, usize>,
    },
}

/// Lazily built graded pieces and multiplication maps of one model.
/// Pieces are built at most once; concurrent readers see either nothing
/// or a complete piece.
pub struct CoordinateRing {
    field: Field,
    n: usize,
    source: Source,
    pieces: Vec<OnceCell<GradedPiece>>,
    mults: Vec<OnceCell<Vec<Mat>>>,
}

impl std::fmt::Debug for CoordinateRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoordinateRing")
            .field("field", &self.field)
            .field("n", &self.n)
            .field("representation", &self.representation())
            .finish()
    }
}

impl CoordinateRing {
    fn with_source(field: &Field, n: usize, source: Source) -> Self {
        CoordinateRing {
            field: field.clone(),
            n,
            source,
            pieces: (0..=MAX_DEGREE + 1).map(|_| OnceCell::new()).collect(),
            mults: (0..=MAX_DEGREE).map(|_| OnceCell::new()).collect(),
        }
    }

    pub fn presentation(model: &PresentationModel) -> Self {
        Self::with_source(&model.field, model.n, Source::Presentation(model.clone()))
    }

    pub fn evaluation(
        field: &Field,
        points: &EvaluationModel,
        expected: &BTreeMap<usize, usize>,
    ) -> Self {
        Self::with_source(
            field,
            points.nvars(),
            Source::Evaluation {
                points: points.clone(),
                expected: expected.clone(),
            },
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn representation(&self) -> Representation {
        match self.source {
            Source::Presentation(_) => Representation::Presentation,
            Source::Evaluation { .. } => Representation::Evaluation,
        }
    }

    pub fn piece(&self, q: usize) -> Result<&GradedPiece> {
        let cell = self
            .pieces
            .get(q)
            .ok_or(Error::DegreeUnavailable(q as i64))?;
        cell.get_or_try_init(|| match &self.source {
            Source::Presentation(m) => quotient_piece_presentation(m, q),
            Source::Evaluation { points, expected } => {
                quotient_piece_evaluation(&self.field, points, q, expected)
            }
        })
    }

    /// `dim M_q`, with `M_q = 0` for negative `q`.
    pub fn dim(&self, q: i64) -> Result<usize> {
        if q < 0 {
            return Ok(0);
        }
        Ok(self.piece(q as usize)?.dim())
    }

    /// Matrices of multiplication by each variable, `M_q -> M_{q+1}`;
    /// column `j` holds `x_i * (basis vector j)`.
    pub fn mult_maps(&self, q: usize) -> Result<&[Mat]> {
        let cell = self
            .mults
            .get(q)
            .ok_or(Error::DegreeUnavailable(q as i64))?;
        let maps = cell.get_or_try_init(|| {
            let src = self.piece(q)?;
            let dst = self.piece(q + 1)?;
            Ok::<_, Error>(
                (0..self.n)
                    .map(|var| {
                        let cols: Vec<usize> = src
                            .basis
                            .iter()
                            .map(|&m| src.sym.times_variable(m, var, &dst.sym))
                            .collect();
                        dst.reduction.select_columns(&cols)
                    })
                    .collect(),
            )
        })?;
        Ok(maps)
    }

    /// Multiplication by the linear form `sum_i coeffs[i] x_i`.
    pub fn mult_by_form(&self, q: usize, coeffs: &[Fel]) -> Result<Mat> {
        if coeffs.len() != self.n {
            return Err(Error::AmbientMismatch(coeffs.len(), self.n));
        }
        let maps = self.mult_maps(q)?;
        let mut out = Mat::zeros(&self.field, maps[0].nrows(), maps[0].ncols());
        for (c, m) in coeffs.iter().zip(maps) {
            if !c.is_zero() {
                out.add_scaled(*c, m)?;
            }
        }
        Ok(out)
    }
}
