//! Plane sextics with four ordinary nodes and their adjoint cubics.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::poly::{univariate_roots, Poly};
use crate::field::{Fel, Field};
use crate::graded::{normalize_point, partial_derivative, poly_eval, sym_basis};
use crate::linalg::Mat;

/// Fields up to this order are scanned exhaustively when sampling points.
const EXHAUSTIVE_SCAN: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodalSexticModel {
    pub field: Field,
    /// Coefficients over the degree-6 monomials in `x, y, z`.
    pub f: Vec<Fel>,
    pub nodes: Vec<Vec<Fel>>,
    /// Basis of the cubics through the nodes.
    pub adjoints: Vec<Vec<Fel>>,
}

/// `(1:0:0), (0:1:0), (0:0:1), (1:1:1)`.
pub fn standard_nodes() -> Vec<Vec<Fel>> {
    let (o, z) = (Fel::ONE, Fel::ZERO);
    vec![vec![o, z, z], vec![z, o, z], vec![z, z, o], vec![o, o, o]]
}

/// Rows: vanishing of `∂f/∂x`, `∂f/∂y`, `∂f/∂z` at each node (which
/// forces `f` to vanish there as well).
pub fn node_condition_matrix(field: &Field, nodes: &[Vec<Fel>]) -> Mat {
    let basis = sym_basis(3, 6);
    let mut rows = Vec::new();
    for node in nodes {
        for var in 0..3 {
            let row: Vec<Fel> = (0..basis.len())
                .map(|i| {
                    let mut unit = vec![Fel::ZERO; basis.len()];
                    unit[i] = Fel::ONE;
                    let d = partial_derivative(field, 3, &unit, 6, var);
                    poly_eval(field, 3, &d, 5, node)
                })
                .collect();
            rows.push(row);
        }
    }
    Mat::from_rows(field, basis.len(), &rows).expect("consistent lengths")
}

/// Cubics vanishing at all the given points.
pub fn adjoint_cubics(field: &Field, nodes: &[Vec<Fel>]) -> Vec<Vec<Fel>> {
    let basis = sym_basis(3, 3);
    let rows: Vec<Vec<Fel>> = nodes.iter().map(|p| basis.evaluate(field, p)).collect();
    let m = Mat::from_rows(field, basis.len(), &rows).expect("consistent lengths");
    m.kernel_basis().vectors().map(|v| v.to_vec()).collect()
}

/// Second derivatives of `g` (degree `d`) at `pt`.
fn hessian(field: &Field, g: &[Fel], d: usize, pt: &[Fel]) -> [[Fel; 3]; 3] {
    let mut h = [[Fel::ZERO; 3]; 3];
    for (i, row) in h.iter_mut().enumerate() {
        let gi = partial_derivative(field, 3, g, d, i);
        for (j, entry) in row.iter_mut().enumerate() {
            let gij = partial_derivative(field, 3, &gi, d - 1, j);
            *entry = poly_eval(field, 3, &gij, d - 2, pt);
        }
    }
    h
}

/// Whether the quadratic part of `f` at a singular point is a
/// nondegenerate binary form, read in the affine chart of the first
/// nonzero coordinate.
pub fn is_ordinary_node(field: &Field, f: &[Fel], node: &[Fel]) -> bool {
    let Some(k) = node.iter().position(|c| !c.is_zero()) else {
        return false;
    };
    let h = hessian(field, f, 6, node);
    let idx: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let det = field.sub(
        field.mul(h[idx[0]][idx[0]], h[idx[1]][idx[1]]),
        field.mul(h[idx[0]][idx[1]], h[idx[1]][idx[0]]),
    );
    !det.is_zero()
}

/// One random sextic with nodes at the standard points; fails with
/// `Degenerate` if a node is not ordinary.
pub fn draw_nodal_sextic<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Result<NodalSexticModel> {
    let nodes = standard_nodes();
    let cond = node_condition_matrix(field, &nodes);
    let kernel = cond.kernel_basis();
    let mut f = vec![Fel::ZERO; sym_basis(3, 6).len()];
    for v in kernel.vectors() {
        field.axpy(&mut f, field.random(rng), v);
    }
    if f.iter().all(|c| c.is_zero()) {
        return Err(Error::Degenerate("zero sextic".into()));
    }
    for node in &nodes {
        if !is_ordinary_node(field, &f, node) {
            return Err(Error::Degenerate("node is not ordinary".into()));
        }
    }
    let adjoints = adjoint_cubics(field, &nodes);
    Ok(NodalSexticModel {
        field: field.clone(),
        f,
        nodes,
        adjoints,
    })
}

impl NodalSexticModel {
    pub fn eval(&self, pt: &[Fel]) -> Fel {
        poly_eval(&self.field, 3, &self.f, 6, pt)
    }

    pub fn gradient(&self, pt: &[Fel]) -> [Fel; 3] {
        let mut g = [Fel::ZERO; 3];
        for (v, out) in g.iter_mut().enumerate() {
            let d = partial_derivative(&self.field, 3, &self.f, 6, v);
            *out = poly_eval(&self.field, 3, &d, 5, pt);
        }
        g
    }

    pub fn is_node(&self, pt: &[Fel]) -> bool {
        let Some(p) = normalize_point(&self.field, pt) else {
            return false;
        };
        self.nodes.contains(&p)
    }

    /// Image in `P^5` under the adjoint cubics.
    pub fn canonical_image(&self, pt: &[Fel]) -> Vec<Fel> {
        let vals = sym_basis(3, 3).evaluate(&self.field, pt);
        self.adjoints
            .iter()
            .map(|a| self.field.dot(a, &vals))
            .collect()
    }

    /// `f(x0, y, 1)` as a polynomial in `y`.
    fn restrict_to_vertical_line(&self, x0: Fel) -> Poly {
        let field = &self.field;
        let basis = sym_basis(3, 6);
        let mut coeffs = vec![Fel::ZERO; 7];
        for (i, e) in basis.exponents().iter().enumerate() {
            let c = self.f[i];
            if c.is_zero() {
                continue;
            }
            let b = e[1] as usize;
            coeffs[b] = field.add(coeffs[b], field.mul(c, field.pow(x0, e[0] as u64)));
        }
        Poly::new(coeffs)
    }

    /// Non-nodal points `(x0 : y : 1)` of the curve. A singular non-nodal
    /// point is reported as `Degenerate`.
    pub fn points_over(&self, x0: Fel) -> Result<Vec<Vec<Fel>>> {
        let line = self.restrict_to_vertical_line(x0);
        if line.is_zero() {
            return Err(Error::Degenerate("sextic contains a line".into()));
        }
        let mut out = Vec::new();
        for (y, _) in univariate_roots(&self.field, &line)? {
            let pt = vec![x0, y, Fel::ONE];
            if self.is_node(&pt) {
                continue;
            }
            if self.gradient(&pt).iter().all(|c| c.is_zero()) {
                return Err(Error::Degenerate(
                    "sextic has an extra singular point".into(),
                ));
            }
            out.push(pt);
        }
        Ok(out)
    }

    /// Abscissae to scan, in a seeded order. Small fields are scanned
    /// completely; larger ones by random draws.
    pub fn abscissae<R: Rng + ?Sized>(&self, rng: &mut R) -> Box<dyn Iterator<Item = Fel>> {
        let field = self.field.clone();
        if field.order() <= EXHAUSTIVE_SCAN {
            let mut all: Vec<Fel> = field.elements().collect();
            all.shuffle(rng);
            Box::new(all.into_iter())
        } else {
            let seed: u64 = rng.gen();
            let mut local = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            Box::new(std::iter::repeat_with(move || field.random(&mut local)))
        }
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "f": f.encode_vec(&self.f),
            "nodes": self.nodes.iter().map(|n| f.encode_vec(n)).collect::<Vec<_>>(),
            "adjoints": self.adjoints.iter().map(|a| f.encode_vec(a)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::MalformedFile(format!("plane model: {what}"));
        let list = |key: &str| -> Result<Vec<Vec<Fel>>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|x| field.decode_vec(x))
                .collect()
        };
        let f = field.decode_vec(v.get("f").ok_or_else(|| bad("f"))?)?;
        let nodes = list("nodes")?;
        let adjoints = list("adjoints")?;
        if f.len() != sym_basis(3, 6).len()
            || nodes.iter().any(|n| n.len() != 3)
            || adjoints.iter().any(|a| a.len() != sym_basis(3, 3).len())
        {
            return Err(bad("coefficient lengths"));
        }
        Ok(NodalSexticModel {
            field: field.clone(),
            f,
            nodes,
            adjoints,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn node_conditions_have_rank_12() {
        let f = Field::prime(101).unwrap();
        let m = node_condition_matrix(&f, &standard_nodes());
        assert_eq!(m.shape(), (12, 28));
        assert_eq!(m.rank(), 12);
        assert_eq!(m.kernel_basis().dim(), 16);
    }

    #[test]
    fn six_adjoint_cubics() {
        let f = Field::prime(101).unwrap();
        let adj = adjoint_cubics(&f, &standard_nodes());
        assert_eq!(adj.len(), 6);
        for a in &adj {
            for n in standard_nodes() {
                assert!(poly_eval(&f, 3, a, 3, &n).is_zero());
            }
        }
    }

    #[test]
    fn drawn_sextic_is_singular_at_nodes() {
        let f = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = draw_nodal_sextic(&f, &mut rng).unwrap();
        for n in &s.nodes {
            assert!(s.eval(n).is_zero());
            assert_eq!(s.gradient(n), [Fel::ZERO; 3]);
            assert!(is_ordinary_node(&f, &s.f, n));
        }
        let x0 = f.from_i64(3);
        for p in s.points_over(x0).unwrap() {
            assert!(s.eval(&p).is_zero());
            assert!(s.canonical_image(&p).iter().any(|c| !c.is_zero()));
        }
    }

    #[test]
    fn node_with_cusp_is_not_ordinary() {
        // y^2 z^4 - x^3 z^3 has a cusp at (0:0:1)
        let f = Field::prime(101).unwrap();
        let b = sym_basis(3, 6);
        let mut g = vec![Fel::ZERO; b.len()];
        g[b.index_of(&[0, 2, 4]).unwrap()] = Fel::ONE;
        g[b.index_of(&[3, 0, 3]).unwrap()] = f.from_i64(-1);
        assert!(!is_ordinary_node(&f, &g, &[Fel::ZERO, Fel::ZERO, Fel::ONE]));
        // y^2 z^4 - x^2 z^4 is an ordinary node there
        let mut h = vec![Fel::ZERO; b.len()];
        h[b.index_of(&[0, 2, 4]).unwrap()] = Fel::ONE;
        h[b.index_of(&[2, 0, 4]).unwrap()] = f.from_i64(-1);
        assert!(is_ordinary_node(&f, &h, &[Fel::ZERO, Fel::ZERO, Fel::ONE]));
    }

    #[test]
    fn json_round_trip() {
        let f = Field::prime(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = draw_nodal_sextic(&f, &mut rng).unwrap();
        assert_eq!(NodalSexticModel::from_json(&f, &s.to_json()).unwrap(), s);
    }
}
