//! Koszul complexes, their cohomology, and graded Betti tables.
//!
//! For `W ⊆ V = M_1` the complex in weight `(p, q)` is
//! `⋀^{p+1}W⊗M_{q-1} -> ⋀^pW⊗M_q -> ⋀^{p-1}W⊗M_{q+1}` with
//! `δ(w_I ⊗ m) = Σ_j (-1)^j w_{I∖i_j} ⊗ w_{i_j}·m` (positions `j` counted
//! from zero). Matrices have rows indexed by the codomain.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fel, Field};
use crate::graded::CoordinateRing;
use crate::linalg::{IncrementalBasis, Mat, Subspace};

/// Strictly increasing `p`-tuples from `0..dim_w`, in lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeBasis {
    pub p: usize,
    pub dim_w: usize,
    tuples: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

fn push_tuples(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == p {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        if n - i < p - cur.len() {
            break;
        }
        cur.push(i);
        push_tuples(i + 1, n, p, cur, out);
        cur.pop();
    }
}

impl WedgeBasis {
    pub fn new(dim_w: usize, p: usize) -> Self {
        let mut tuples = Vec::new();
        if p <= dim_w {
            push_tuples(0, dim_w, p, &mut Vec::with_capacity(p), &mut tuples);
        }
        let index = tuples
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        WedgeBasis {
            p,
            dim_w,
            tuples,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn index_of(&self, t: &[usize]) -> Option<usize> {
        self.index.get(t).copied()
    }
}

fn wedge_len(dim_w: usize, p: i64) -> usize {
    if p < 0 {
        0
    } else {
        crate::graded::binomial(dim_w, p as usize)
    }
}

/// Matrix of `δ: ⋀^pW⊗M_q -> ⋀^{p-1}W⊗M_{q+1}` in the tensor bases
/// (wedge index major, `M` index minor).
pub fn koszul_differential(ring: &CoordinateRing, w: &Subspace, p: i64, q: i64) -> Result<Mat> {
    let field = ring.field();
    if w.ambient_dim() != ring.nvars() {
        return Err(Error::AmbientMismatch(w.ambient_dim(), ring.nvars()));
    }
    let dw = w.dim();
    let rows = wedge_len(dw, p - 1) * ring.dim(q + 1)?;
    let cols = wedge_len(dw, p) * ring.dim(q)?;
    let mut out = Mat::zeros(field, rows, cols);
    if rows == 0 || cols == 0 {
        return Ok(out);
    }
    let (p, q) = (p as usize, q as usize);
    let mults = w
        .vectors()
        .map(|v| ring.mult_by_form(q, v))
        .collect::<Result<Vec<_>>>()?;
    let (dq, dq1) = (ring.dim(q as i64)?, ring.dim(q as i64 + 1)?);
    let src = WedgeBasis::new(dw, p);
    let dst = WedgeBasis::new(dw, p - 1);
    let mut rest = Vec::with_capacity(p);
    for (ii, tuple) in src.tuples().iter().enumerate() {
        for (j, &wi) in tuple.iter().enumerate() {
            rest.clear();
            rest.extend(
                tuple
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &t)| t),
            );
            let jj = dst.index_of(&rest).expect("face of a tuple");
            let m = &mults[wi];
            let negate = j % 2 == 1;
            for b in 0..dq1 {
                let row = jj * dq1 + b;
                for a in 0..dq {
                    let v = m.get(b, a);
                    if !v.is_zero() {
                        out.set(row, ii * dq + a, if negate { field.neg(v) } else { v });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The two differentials around `⋀^pW⊗M_q`.
#[derive(Clone, Debug)]
pub struct KoszulCell {
    pub p: i64,
    pub q: i64,
    pub w: Subspace,
    pub delta_in: Mat,
    pub delta_out: Mat,
}

impl KoszulCell {
    /// Builds both differentials and checks that they compose to zero.
    pub fn build(ring: &CoordinateRing, w: &Subspace, p: i64, q: i64) -> Result<Self> {
        let delta_out = koszul_differential(ring, w, p, q)?;
        let delta_in = koszul_differential(ring, w, p + 1, q - 1)?;
        check_composite(&delta_out, &delta_in, p, q)?;
        Ok(KoszulCell {
            p,
            q,
            w: w.clone(),
            delta_in,
            delta_out,
        })
    }

    pub fn middle_dim(&self) -> usize {
        self.delta_out.ncols()
    }
}

fn check_composite(outer: &Mat, inner: &Mat, p: i64, q: i64) -> Result<()> {
    if outer.ncols() != inner.nrows() {
        return Err(Error::ComplexDefect { p, q });
    }
    if outer.nrows() == 0 || inner.ncols() == 0 {
        return Ok(());
    }
    if outer.mul(inner)?.is_zero() {
        Ok(())
    } else {
        Err(Error::ComplexDefect { p, q })
    }
}

/// A subspace of `K_{p,q}(·;V)` given by cocycle representatives that are
/// independent modulo coboundaries.
#[derive(Clone, Debug)]
pub struct SyzygyClassSpace {
    pub p: i64,
    pub q: i64,
    pub dim_v: usize,
    pub cocycles: Subspace,
    pub coboundaries: Subspace,
    pub representatives: Vec<Vec<Fel>>,
}

impl SyzygyClassSpace {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Dimension of the span of several represented subspaces of the same
    /// cohomology group.
    pub fn span_dim<'a>(spaces: impl IntoIterator<Item = &'a SyzygyClassSpace>) -> Result<usize> {
        let mut it = spaces.into_iter().peekable();
        let Some(first) = it.peek() else {
            return Ok(0);
        };
        let mut basis = IncrementalBasis::from_subspace(&first.coboundaries);
        let base = basis.dim();
        for s in it {
            if s.coboundaries.ambient_dim() != basis.ambient_dim() {
                return Err(Error::AmbientMismatch(
                    s.coboundaries.ambient_dim(),
                    basis.ambient_dim(),
                ));
            }
            for r in &s.representatives {
                basis.insert(r);
            }
        }
        Ok(basis.dim() - base)
    }
}

fn greedy_complement(
    cobound: &Subspace,
    candidates: impl IntoIterator<Item = Vec<Fel>>,
) -> Vec<Vec<Fel>> {
    let mut basis = IncrementalBasis::from_subspace(cobound);
    candidates.into_iter().filter(|v| basis.insert(v)).collect()
}

/// `dim K_{p,q}(M;W)` with a basis of representatives.
pub fn koszul_cohomology(
    ring: &CoordinateRing,
    w: &Subspace,
    p: i64,
    q: i64,
) -> Result<(usize, SyzygyClassSpace)> {
    let cell = KoszulCell::build(ring, w, p, q)?;
    let space = cohomology_of_cell(&cell);
    Ok((space.dim(), space))
}

fn cohomology_of_cell(cell: &KoszulCell) -> SyzygyClassSpace {
    let cocycles = cell.delta_out.kernel_basis();
    let coboundaries = cell.delta_in.column_space();
    let representatives = greedy_complement(
        &coboundaries,
        cocycles.vectors().map(|v| v.to_vec()).collect::<Vec<_>>(),
    );
    SyzygyClassSpace {
        p: cell.p,
        q: cell.q,
        dim_v: cell.w.dim(),
        cocycles,
        coboundaries,
        representatives,
    }
}

/// `K_{p,q}(M;V)` computed once, for comparing images of many subspaces.
#[derive(Clone, Debug)]
pub struct FullCohomology {
    pub space: SyzygyClassSpace,
    coboundary_basis: IncrementalBasis,
    m_dim: usize,
}

impl FullCohomology {
    pub fn new(ring: &CoordinateRing, p: i64, q: i64) -> Result<Self> {
        let v = Subspace::full(ring.field(), ring.nvars());
        let (_, space) = koszul_cohomology(ring, &v, p, q)?;
        Ok(FullCohomology {
            coboundary_basis: IncrementalBasis::from_subspace(&space.coboundaries),
            m_dim: ring.dim(q)?,
            space,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Image of `K_{p,q}(M;W) -> K_{p,q}(M;V)`.
    pub fn image_of(&self, ring: &CoordinateRing, w: &Subspace) -> Result<SyzygyClassSpace> {
        let (p, q) = (self.space.p, self.space.q);
        let (_, sub) = koszul_cohomology(ring, w, p, q)?;
        let included = include_wedge(ring.field(), w, p, self.m_dim, sub.cocycles.vectors())?;
        for v in &included {
            if !self.space.cocycles.contains_vector(v) {
                return Err(Error::ComplexDefect { p, q });
            }
        }
        let mut basis = self.coboundary_basis.clone();
        let representatives = included.into_iter().filter(|v| basis.insert(v)).collect();
        Ok(SyzygyClassSpace {
            representatives,
            ..self.space.clone()
        })
    }
}

/// Applies `⋀^p ι ⊗ id` for the inclusion `ι: W -> V` given by the basis
/// rows of `w`.
fn include_wedge<'a>(
    field: &Field,
    w: &Subspace,
    p: i64,
    m_dim: usize,
    vectors: impl Iterator<Item = &'a [Fel]>,
) -> Result<Vec<Vec<Fel>>> {
    let n = w.ambient_dim();
    let p = p.max(0) as usize;
    let wb = WedgeBasis::new(w.dim(), p);
    let vb = WedgeBasis::new(n, p);
    // minors[J][I] = det of rows J, columns I of the W basis
    let minors: Vec<Vec<(usize, Fel)>> = wb
        .tuples()
        .iter()
        .map(|rows| {
            let sub = w.basis().select_rows(rows);
            vb.tuples()
                .iter()
                .enumerate()
                .filter_map(|(ii, cols)| {
                    let d = sub.select_columns(cols).determinant().expect("square");
                    (!d.is_zero()).then_some((ii, d))
                })
                .collect()
        })
        .collect();
    vectors
        .map(|v| {
            if v.len() != wb.len() * m_dim {
                return Err(Error::AmbientMismatch(v.len(), wb.len() * m_dim));
            }
            let mut out = vec![Fel::ZERO; vb.len() * m_dim];
            for (jj, row) in minors.iter().enumerate() {
                let block = &v[jj * m_dim..(jj + 1) * m_dim];
                if block.iter().all(|c| c.is_zero()) {
                    continue;
                }
                for &(ii, d) in row {
                    field.axpy(&mut out[ii * m_dim..(ii + 1) * m_dim], d, block);
                }
            }
            Ok(out)
        })
        .collect()
}

/// Image of `K_{p,q}(M;W)` inside `K_{p,q}(M;V)`.
pub fn subspace_cohomology_image(
    ring: &CoordinateRing,
    w: &Subspace,
    p: i64,
    q: i64,
) -> Result<SyzygyClassSpace> {
    FullCohomology::new(ring, p, q)?.image_of(ring, w)
}

/// Grid `b_{p,q}` for `p` in `p_range`, `q` in `q_range` (inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub p_range: (i64, i64),
    pub q_range: (i64, i64),
    /// `grid[q - q_min][p - p_min]`
    pub grid: Vec<Vec<usize>>,
    pub model: Value,
}

impl BettiTable {
    pub fn get(&self, p: i64, q: i64) -> Option<usize> {
        if p < self.p_range.0 || p > self.p_range.1 || q < self.q_range.0 || q > self.q_range.1 {
            return None;
        }
        Some(self.grid[(q - self.q_range.0) as usize][(p - self.p_range.0) as usize])
    }

    pub fn row(&self, q: i64) -> Option<&[usize]> {
        if q < self.q_range.0 || q > self.q_range.1 {
            return None;
        }
        Some(&self.grid[(q - self.q_range.0) as usize])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p_min": self.p_range.0,
            "p_max": self.p_range.1,
            "q_min": self.q_range.0,
            "q_max": self.q_range.1,
            "rows": self.grid.iter().enumerate().map(|(i, r)| json!({
                "q": self.q_range.0 + i as i64,
                "values": r,
            })).collect::<Vec<_>>(),
            "model": self.model,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::MalformedFile("betti table".into());
        let int = |k: &str| v.get(k).and_then(Value::as_i64).ok_or_else(bad);
        let p_range = (int("p_min")?, int("p_max")?);
        let q_range = (int("q_min")?, int("q_max")?);
        let grid = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|r| {
                r.get("values")
                    .and_then(Value::as_array)
                    .ok_or_else(bad)?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let width = (p_range.1 - p_range.0 + 1).max(0) as usize;
        if grid.len() != (q_range.1 - q_range.0 + 1).max(0) as usize
            || grid.iter().any(|r| r.len() != width)
        {
            return Err(bad());
        }
        Ok(BettiTable {
            p_range,
            q_range,
            grid,
            model: v.get("model").cloned().unwrap_or(Value::Null),
        })
    }

    /// Rows indexed by `q`, columns by `p`, zeros shown as `.`.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .grid
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&b| {
                        if b == 0 {
                            ".".to_string()
                        } else {
                            b.to_string()
                        }
                    })
                    .collect()
            })
            .collect();
        let headers: Vec<String> = (self.p_range.0..=self.p_range.1)
            .map(|p| p.to_string())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .chain(&headers)
            .map(String::len)
            .max()
            .unwrap_or(1);
        let label = (self.q_range.0..=self.q_range.1)
            .map(|q| format!("{q}:").len())
            .max()
            .unwrap_or(2);
        let mut s = String::new();
        let _ = write!(s, "{:label$}", "");
        for h in &headers {
            let _ = write!(s, " {h:>width$}");
        }
        s.push('\n');
        for (i, row) in cells.iter().enumerate() {
            let _ = write!(s, "{:>label$}", format!("{}:", self.q_range.0 + i as i64));
            for c in row {
                let _ = write!(s, " {c:>width$}");
            }
            s.push('\n');
        }
        s
    }
}

/// Betti numbers of `M` with respect to all of `V`. Each differential is
/// built once; adjacent differentials are checked to compose to zero.
pub fn betti_table(
    ring: &CoordinateRing,
    p_range: (i64, i64),
    q_range: (i64, i64),
) -> Result<BettiTable> {
    let v = Subspace::full(ring.field(), ring.nvars());
    // differential (p, q) has domain ⋀^p⊗M_q
    let mut needed = Vec::new();
    for q in q_range.0..=q_range.1 {
        for p in p_range.0..=p_range.1 {
            needed.push((p, q));
            needed.push((p + 1, q - 1));
        }
    }
    needed.sort();
    needed.dedup();
    // materialize pieces up front so workers only read them
    for q in (q_range.0 - 1).max(0)..=q_range.1 + 1 {
        ring.dim(q)?;
        if q <= q_range.1 {
            ring.mult_maps(q as usize)?;
        }
    }
    let mats: BTreeMap<(i64, i64), Mat> = needed
        .par_iter()
        .map(|&(p, q)| Ok(((p, q), koszul_differential(ring, &v, p, q)?)))
        .collect::<Result<_>>()?;
    let ranks: BTreeMap<(i64, i64), usize> = mats.par_iter().map(|(&k, m)| (k, m.rank())).collect();
    let composites: Vec<(i64, i64)> = (q_range.0..=q_range.1)
        .flat_map(|q| (p_range.0..=p_range.1).map(move |p| (p, q)))
        .collect();
    composites
        .par_iter()
        .try_for_each(|&(p, q)| check_composite(&mats[&(p, q)], &mats[&(p + 1, q - 1)], p, q))?;
    let grid = (q_range.0..=q_range.1)
        .map(|q| {
            (p_range.0..=p_range.1)
                .map(|p| {
                    let out = &mats[&(p, q)];
                    out.ncols() - ranks[&(p, q)] - ranks[&(p + 1, q - 1)]
                })
                .collect()
        })
        .collect();
    Ok(BettiTable {
        p_range,
        q_range,
        grid,
        model: Value::Null,
    })
}
