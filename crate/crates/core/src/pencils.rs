//! The five `g^1_4` pencils on a 4-nodal plane sextic: residuals of the
//! lines through each node and of the conics through all four nodes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::poly::{univariate_roots, Poly};
use crate::field::{Fel, Field};
use crate::graded::{binomial, normalize_point, sym_basis};
use crate::linalg::{Mat, Subspace};
use crate::models::NodalSexticModel;

/// Parameters tried per pencil before giving up on the field.
pub const PARAMETER_BUDGET: usize = 4000;

/// Degree of a pencil divisor on the sextic model.
pub const PENCIL_DEGREE: usize = 4;

/// `ρ(r, d, g) = g - (r+1)(r-d+g)`.
pub fn brill_noether_number(r: i64, d: i64, g: i64) -> i64 {
    g - (r + 1) * (r - d + g)
}

/// `binom(2k, k) / (k + 1)`, the number of `g^1_{k+1}` on a general curve
/// of genus `2k`.
pub fn expected_pencils(k: u64) -> u64 {
    let b = binomial(2 * k as usize, k as usize) as u64;
    debug_assert_eq!(b % (k + 1), 0);
    b / (k + 1)
}

/// `(ρ(r, d, g), expected_pencils(g / 2))`.
pub fn brill_noether_numbers(r: i64, d: i64, g: i64) -> (i64, u64) {
    (
        brill_noether_number(r, d, g),
        expected_pencils((g / 2) as u64),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PencilKind {
    /// Lines through node `i` (0-based).
    NodeProjection(usize),
    /// Conics through all four nodes.
    ConicFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    pub id: usize,
    pub kind: PencilKind,
    /// Lines: the node and two points spanning a complementary line.
    /// Conics: a basis of the conics through the nodes.
    pub data: Vec<Vec<Fel>>,
}

impl Pencil {
    pub fn label(&self) -> String {
        match self.kind {
            PencilKind::NodeProjection(i) => format!("lines through node {}", i + 1),
            PencilKind::ConicFamily => "conics through the nodes".into(),
        }
    }

    pub fn to_json(&self, field: &Field) -> Value {
        json!({
            "id": self.id,
            "kind": match self.kind {
                PencilKind::NodeProjection(i) => json!({"node_projection": i + 1}),
                PencilKind::ConicFamily => json!("conic_family"),
            },
            "data": self.data.iter().map(|v| field.encode_vec(v)).collect::<Vec<_>>(),
        })
    }
}

/// Lines through each node, then the conic pencil.
pub fn enumerate_pencils(sextic: &NodalSexticModel) -> Result<Vec<Pencil>> {
    let field = &sextic.field;
    let mut out = Vec::new();
    for (i, node) in sextic.nodes.iter().enumerate() {
        // two coordinate vectors completing the node to a basis
        let mut frame = vec![node.clone()];
        for k in 0..3 {
            let mut e = vec![Fel::ZERO; 3];
            e[k] = Fel::ONE;
            let mut trial = frame.clone();
            trial.push(e.clone());
            if Mat::from_rows(field, 3, &trial)?.rank() == trial.len() {
                frame.push(e);
            }
            if frame.len() == 3 {
                break;
            }
        }
        out.push(Pencil {
            id: i,
            kind: PencilKind::NodeProjection(i),
            data: frame,
        });
    }
    let conics = sym_basis(3, 2);
    let rows: Vec<Vec<Fel>> = sextic
        .nodes
        .iter()
        .map(|p| conics.evaluate(field, p))
        .collect();
    let space = Mat::from_rows(field, conics.len(), &rows)?.kernel_basis();
    if space.dim() != 2 {
        return Err(Error::ConicSpaceDegenerate(space.dim()));
    }
    out.push(Pencil {
        id: sextic.nodes.len(),
        kind: PencilKind::ConicFamily,
        data: space.vectors().map(|v| v.to_vec()).collect(),
    });
    Ok(out)
}

/// An effective divisor on the curve given by plane points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisor {
    pub pencil: usize,
    pub t: Fel,
    pub points: Vec<(Vec<Fel>, usize)>,
}

impl Divisor {
    pub fn degree(&self) -> usize {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn to_json(&self, field: &Field) -> Value {
        json!({
            "pencil": self.pencil,
            "t": field.encode(self.t),
            "points": self.points.iter().map(|(p, m)| json!({
                "point": field.encode_vec(p),
                "multiplicity": m,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Quadratic form of a conic as a symmetric-bilinear-free evaluator:
/// value and gradient at a point.
fn conic_value(field: &Field, c: &[Fel], pt: &[Fel]) -> Fel {
    field.dot(c, &sym_basis(3, 2).evaluate(field, pt))
}

fn conic_gradient(field: &Field, c: &[Fel], pt: &[Fel]) -> Vec<Fel> {
    (0..3)
        .map(|v| {
            let d = crate::graded::partial_derivative(field, 3, c, 2, v);
            field.dot(&d, pt)
        })
        .collect()
}

/// `det` of the symmetric matrix of a conic, up to a unit.
fn conic_discriminant(field: &Field, c: &[Fel]) -> Fel {
    let b = sym_basis(3, 2);
    let h = |i: usize, j: usize| {
        let mut e = vec![0u8; 3];
        e[i] += 1;
        e[j] += 1;
        let k = b.index_of(&e).expect("quadratic monomial");
        if i == j {
            field.mul(field.from_i64(2), c[k])
        } else {
            c[k]
        }
    };
    let m = Mat::from_fn(field, 3, 3, h);
    m.determinant().expect("square")
}

/// Polynomial parametrization `s -> P(s)` of the member at `t`, with its
/// nominal degree; `None` if the member is singular.
fn member_parametrization(field: &Field, pencil: &Pencil, t: Fel) -> Option<(Vec<Poly>, usize)> {
    match pencil.kind {
        PencilKind::NodeProjection(_) => {
            let node = &pencil.data[0];
            let (b0, b1) = (&pencil.data[1], &pencil.data[2]);
            let param = (0..3)
                .map(|k| Poly::new(vec![field.add(b0[k], field.mul(t, b1[k])), node[k]]))
                .collect();
            Some((param, 1))
        }
        PencilKind::ConicFamily => {
            let mut c = pencil.data[0].clone();
            field.axpy(&mut c, t, &pencil.data[1]);
            if conic_discriminant(field, &c).is_zero() {
                return None;
            }
            // project from the first node: w(s) = (0, 1, s)
            let n1 = vec![Fel::ONE, Fel::ZERO, Fel::ZERO];
            let grad = conic_gradient(field, &c, &n1);
            let b = sym_basis(3, 2);
            let coef = |e: [u8; 3]| c[b.index_of(&e).expect("quadratic monomial")];
            // Q(0, 1, s) = c_yy + c_yz s + c_zz s^2
            let q = Poly::new(vec![coef([0, 2, 0]), coef([0, 1, 1]), coef([0, 0, 2])]);
            // grad . w(s) = grad_y + grad_z s
            let l = Poly::new(vec![grad[1], grad[2]]);
            let neg_l = l.scale(field, field.from_i64(-1));
            let s = Poly::new(vec![Fel::ZERO, Fel::ONE]);
            debug_assert!(conic_value(field, &c, &n1).is_zero());
            Some((vec![q, neg_l.clone(), neg_l.mul(field, &s)], 2))
        }
    }
}

fn eval_point(field: &Field, param: &[Poly], s: Fel) -> Vec<Fel> {
    param.iter().map(|p| p.eval(field, s)).collect()
}

/// The residual divisor of the member at `t`: everything the member cuts
/// on the sextic away from the nodes. Errors with `Degenerate` unless the
/// member meets each node it passes through with multiplicity exactly 2,
/// misses the other nodes, and the residual consists of 4 distinct
/// simple rational points.
pub fn divisor_at(sextic: &NodalSexticModel, pencil: &Pencil, t: Fel) -> Result<Divisor> {
    let field = &sextic.field;
    let reject = |why: &str| Err(Error::Degenerate(format!("parameter rejected: {why}")));
    let Some((param, e)) = member_parametrization(field, pencil, t) else {
        return reject("singular member");
    };
    // F(s) = f(P(s))
    let basis = sym_basis(3, 6);
    let powers: Vec<Vec<Poly>> = param
        .iter()
        .map(|p| {
            let mut v = vec![Poly::constant(Fel::ONE)];
            for k in 1..=6 {
                v.push(v[k - 1].mul(field, p));
            }
            v
        })
        .collect();
    let mut fs = Poly::zero();
    for (i, ex) in basis.exponents().iter().enumerate() {
        let c = sextic.f[i];
        if c.is_zero() {
            continue;
        }
        let term = powers[0][ex[0] as usize]
            .mul(field, &powers[1][ex[1] as usize])
            .mul(field, &powers[2][ex[2] as usize]);
        fs = fs.add(field, &term.scale(field, c));
    }
    if fs.is_zero() {
        return reject("member is a component of the curve");
    }
    let nominal = 6 * e;
    let mut hits: Vec<(Vec<Fel>, usize)> = Vec::new();
    for (s, m) in univariate_roots(field, &fs)? {
        hits.push((eval_point(field, &param, s), m));
    }
    let at_infinity = nominal - fs.degree().expect("nonzero");
    if at_infinity > 0 {
        hits.push((param.iter().map(|p| p.coeff(e)).collect(), at_infinity));
    }
    let expected: Vec<bool> = match pencil.kind {
        PencilKind::NodeProjection(i) => (0..sextic.nodes.len()).map(|j| j == i).collect(),
        PencilKind::ConicFamily => vec![true; sextic.nodes.len()],
    };
    let mut node_mult = vec![0usize; sextic.nodes.len()];
    let mut residual = Vec::new();
    for (pt, m) in hits {
        let Some(pt) = normalize_point(field, &pt) else {
            return reject("parametrization collapses");
        };
        match sextic.nodes.iter().position(|n| *n == pt) {
            Some(j) => node_mult[j] += m,
            None => residual.push((pt, m)),
        }
    }
    for (j, &m) in node_mult.iter().enumerate() {
        let want = if expected[j] { 2 } else { 0 };
        if m != want {
            return reject("unexpected contact with a node");
        }
    }
    if residual.len() != PENCIL_DEGREE || residual.iter().any(|(_, m)| *m != 1) {
        return reject("residual does not split into distinct rational points");
    }
    residual.sort();
    Ok(Divisor {
        pencil: pencil.id,
        t,
        points: residual,
    })
}

/// Parameters in a seeded order: all field elements for small fields,
/// random draws otherwise.
fn parameters(field: &Field, rng: &mut ChaCha8Rng) -> Vec<Fel> {
    if field.order() as usize <= PARAMETER_BUDGET {
        let mut all: Vec<Fel> = field.elements().collect();
        all.shuffle(rng);
        all
    } else {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        while out.len() < PARAMETER_BUDGET {
            let t = field.random(rng);
            if seen.insert(t) {
                out.push(t);
            }
        }
        out
    }
}

/// `count` split divisors of one pencil at distinct parameters, drawn from
/// a stream determined by `seed` and the pencil id.
pub fn split_divisors(
    sextic: &NodalSexticModel,
    pencil: &Pencil,
    count: usize,
    seed: u64,
) -> Result<Vec<Divisor>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pencil.id as u64 + 1);
    let mut out = Vec::new();
    let mut tried = 0;
    for t in parameters(&sextic.field, &mut rng) {
        tried += 1;
        match divisor_at(sextic, pencil, t) {
            Ok(d) => {
                out.push(d);
                if out.len() == count {
                    return Ok(out);
                }
            }
            Err(Error::Degenerate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted(format!(
        "{}: {} split divisors among {tried} parameters over {}",
        pencil.label(),
        out.len(),
        sextic.field.spec()
    )))
}

/// Divisors for every pencil, computed in parallel.
pub fn all_split_divisors(
    sextic: &NodalSexticModel,
    pencils: &[Pencil],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<Divisor>>> {
    pencils
        .par_iter()
        .map(|p| split_divisors(sextic, p, count, seed))
        .collect()
}

/// `H^0(ω_C - Z)` inside `V = H^0(ω_C)`.
#[derive(Clone, Debug)]
pub struct SpecialSubspace {
    pub pencil: usize,
    pub t: Fel,
    pub space: Subspace,
}

/// Linear forms on `P^5` vanishing at the canonical images of the divisor
/// points.
pub fn annihilator(sextic: &NodalSexticModel, points: &[Vec<Fel>]) -> Result<Subspace> {
    let rows: Vec<Vec<Fel>> = points.iter().map(|p| sextic.canonical_image(p)).collect();
    let m = Mat::from_rows(&sextic.field, sextic.adjoints.len(), &rows)?;
    Ok(m.kernel_basis())
}

/// The special subspace of a pencil divisor; its dimension must be 3.
pub fn special_subspace(sextic: &NodalSexticModel, divisor: &Divisor) -> Result<SpecialSubspace> {
    let pts: Vec<Vec<Fel>> = divisor.points.iter().map(|(p, _)| p.clone()).collect();
    let space = annihilator(sextic, &pts)?;
    if space.dim() != 3 {
        return Err(Error::SpecialtyViolation(space.dim()));
    }
    Ok(SpecialSubspace {
        pencil: divisor.pencil,
        t: divisor.t,
        space,
    })
}

/// Random non-nodal points of the sextic, for comparison with pencil
/// divisors.
pub fn random_curve_points<R: Rng + ?Sized>(
    sextic: &NodalSexticModel,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Fel>>> {
    let mut out: Vec<Vec<Fel>> = Vec::new();
    for x0 in sextic.abscissae(rng) {
        for p in sextic.points_over(x0)? {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        if out.len() >= count {
            out.truncate(count);
            return Ok(out);
        }
    }
    Err(Error::InsufficientPoints {
        needed: count,
        have: out.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::gen_nodal_sextic;

    #[test]
    fn numerology() {
        assert_eq!(brill_noether_number(1, 4, 6), 0);
        assert_eq!(expected_pencils(3), 5);
        assert_eq!(expected_pencils(4), 14);
        assert_eq!(brill_noether_numbers(1, 5, 8), (0, 14));
        for k in 1..8 {
            assert_eq!(brill_noether_number(1, k + 1, 2 * k), 0);
        }
    }

    #[test]
    fn five_pencils_with_split_divisors() {
        let f = Field::prime(101).unwrap();
        let s = gen_nodal_sextic(&f, 1).unwrap();
        let pencils = enumerate_pencils(&s).unwrap();
        assert_eq!(pencils.len(), 5);
        let divs = all_split_divisors(&s, &pencils, 3, 7).unwrap();
        for (p, ds) in pencils.iter().zip(&divs) {
            assert_eq!(ds.len(), 3);
            for d in ds {
                assert_eq!(d.degree(), 4);
                assert_eq!(d.pencil, p.id);
                for (pt, _) in &d.points {
                    assert!(s.eval(pt).is_zero());
                    assert!(!s.is_node(pt));
                }
                let w = special_subspace(&s, d).unwrap();
                assert_eq!(w.space.dim(), 3);
                for (pt, _) in &d.points {
                    let img = s.canonical_image(pt);
                    for v in w.space.vectors() {
                        assert!(f.dot(v, &img).is_zero());
                    }
                }
            }
            // no base points
            for i in 0..ds.len() {
                for j in i + 1..ds.len() {
                    assert!(ds[i]
                        .points
                        .iter()
                        .all(|a| ds[j].points.iter().all(|b| a.0 != b.0)));
                }
            }
        }
    }

    #[test]
    fn random_quadruples_are_not_special() {
        let f = Field::prime(101).unwrap();
        let s = gen_nodal_sextic(&f, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_curve_points(&s, 40, &mut rng).unwrap();
        let mut twos = 0;
        for chunk in pts.chunks(4).take(10) {
            let w = annihilator(&s, chunk).unwrap();
            if w.dim() == 2 {
                twos += 1;
            }
        }
        assert!(twos >= 9);
    }

    #[test]
    fn split_divisors_are_deterministic() {
        let f = Field::prime(101).unwrap();
        let s = gen_nodal_sextic(&f, 4).unwrap();
        let pencils = enumerate_pencils(&s).unwrap();
        let a = split_divisors(&s, &pencils[4], 2, 11).unwrap();
        let b = split_divisors(&s, &pencils[4], 2, 11).unwrap();
        assert_eq!(a, b);
    }
}
