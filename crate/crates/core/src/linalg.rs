//! Dense exact linear algebra over a [`Field`].
//!
//! Pivoting always takes the lowest-indexed row with a nonzero entry, so
//! every reduced form is bit-reproducible.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fel, Field, Poly};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    nrows: usize,
    ncols: usize,
    data: Vec<Fel>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Mat {}x{} over {}",
            self.nrows,
            self.ncols,
            self.field.spec()
        )?;
        for i in 0..self.nrows.min(12) {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .take(16)
                .map(|&a| self.field.display(a))
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rref: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

fn two_rows(data: &mut [Fel], ncols: usize, dst: usize, src: usize) -> (&mut [Fel], &[Fel]) {
    debug_assert_ne!(dst, src);
    if dst < src {
        let (a, b) = data.split_at_mut(src * ncols);
        (&mut a[dst * ncols..(dst + 1) * ncols], &b[..ncols])
    } else {
        let (a, b) = data.split_at_mut(dst * ncols);
        (&mut b[..ncols], &a[src * ncols..(src + 1) * ncols])
    }
}

impl Mat {
    pub fn zeros(field: &Field, nrows: usize, ncols: usize) -> Self {
        Mat {
            field: field.clone(),
            nrows,
            ncols,
            data: vec![Fel::ZERO; nrows * ncols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fel::ONE);
        }
        m
    }

    pub fn from_vec(field: &Field, nrows: usize, ncols: usize, data: Vec<Fel>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::SpecMismatch(format!(
                "{} entries for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        Ok(Mat {
            field: field.clone(),
            nrows,
            ncols,
            data,
        })
    }

    pub fn from_rows(field: &Field, ncols: usize, rows: &[Vec<Fel>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for r in rows {
            if r.len() != ncols {
                return Err(Error::AmbientMismatch(r.len(), ncols));
            }
            data.extend_from_slice(r);
        }
        Ok(Mat {
            field: field.clone(),
            nrows: rows.len(),
            ncols,
            data,
        })
    }

    pub fn from_fn(
        field: &Field,
        nrows: usize,
        ncols: usize,
        mut f: impl FnMut(usize, usize) -> Fel,
    ) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Mat {
            field: field.clone(),
            nrows,
            ncols,
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn entries(&self) -> &[Fel] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fel {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fel) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fel] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fel] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Fel]> {
        (0..self.nrows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Fel> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.ncols, self.nrows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.ncols != other.nrows {
            return Err(Error::AmbientMismatch(self.ncols, other.nrows));
        }
        let mut out = Mat::zeros(&self.field, self.nrows, other.ncols);
        for i in 0..self.nrows {
            let dst = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if !a.is_zero() {
                    self.field.axpy(dst, a, other.row(k));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Fel]) -> Result<Vec<Fel>> {
        if v.len() != self.ncols {
            return Err(Error::AmbientMismatch(v.len(), self.ncols));
        }
        Ok(self.rows().map(|r| self.field.dot(r, v)).collect())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.shape() != other.shape() {
            return Err(Error::AmbientMismatch(
                self.nrows * self.ncols,
                other.nrows * other.ncols,
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Mat {
            data,
            ..self.clone()
        })
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: Fel, other: &Mat) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::AmbientMismatch(
                self.nrows * self.ncols,
                other.nrows * other.ncols,
            ));
        }
        let field = self.field.clone();
        field.axpy(&mut self.data, c, &other.data);
        Ok(())
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.ncols != other.ncols {
            return Err(Error::AmbientMismatch(self.ncols, other.ncols));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            field: self.field.clone(),
            nrows: self.nrows + other.nrows,
            ncols: self.ncols,
            data,
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        Mat::from_fn(&self.field, self.nrows, cols.len(), |i, j| {
            self.get(i, cols[j])
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        Mat::from_fn(&self.field, rows.len(), self.ncols, |i, j| {
            self.get(rows[i], j)
        })
    }

    /// Reduced row echelon form.
    pub fn echelon(&self) -> Echelon {
        let field = &self.field;
        let nc = self.ncols;
        let mut data = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..nc {
            if r == self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| !data[i * nc + c].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in c..nc {
                    data.swap(pr * nc + j, r * nc + j);
                }
            }
            let inv = field.inv(data[r * nc + c]).expect("pivot is nonzero");
            field.scale(&mut data[r * nc + c..(r + 1) * nc], inv);
            for i in 0..self.nrows {
                if i == r {
                    continue;
                }
                let a = data[i * nc + c];
                if a.is_zero() {
                    continue;
                }
                let (dst, src) = two_rows(&mut data, nc, i, r);
                field.axpy(&mut dst[c..], field.neg(a), &src[c..]);
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            rref: Mat {
                field: field.clone(),
                nrows: self.nrows,
                ncols: nc,
                data,
            },
            rank: r,
            pivots,
        }
    }

    /// Rank by forward elimination only.
    pub fn rank(&self) -> usize {
        let field = &self.field;
        let nc = self.ncols;
        let mut data = self.data.clone();
        let mut r = 0;
        for c in 0..nc {
            if r == self.nrows {
                break;
            }
            let Some(pr) = (r..self.nrows).find(|&i| !data[i * nc + c].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in c..nc {
                    data.swap(pr * nc + j, r * nc + j);
                }
            }
            let inv = field.inv(data[r * nc + c]).expect("pivot is nonzero");
            for i in r + 1..self.nrows {
                let a = data[i * nc + c];
                if a.is_zero() {
                    continue;
                }
                let factor = field.neg(field.mul(a, inv));
                let (dst, src) = two_rows(&mut data, nc, i, r);
                field.axpy(&mut dst[c..], factor, &src[c..]);
            }
            r += 1;
        }
        r
    }

    /// Basis of `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let ech = self.echelon();
        let field = &self.field;
        let mut is_pivot = vec![false; self.ncols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let rows: Vec<Vec<Fel>> = (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Fel::ZERO; self.ncols];
                v[f] = Fel::ONE;
                for (i, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = field.neg(ech.rref.get(i, f));
                }
                v
            })
            .collect();
        Subspace::from_rows(field, self.ncols, rows).expect("consistent lengths")
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::from_mat(self)
    }

    pub fn column_space(&self) -> Subspace {
        Subspace::from_mat(&self.transpose())
    }

    pub fn determinant(&self) -> Result<Fel> {
        if self.nrows != self.ncols {
            return Err(Error::AmbientMismatch(self.nrows, self.ncols));
        }
        let field = &self.field;
        let n = self.nrows;
        let mut data = self.data.clone();
        let mut det = Fel::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !data[i * n + c].is_zero()) else {
                return Ok(Fel::ZERO);
            };
            if pr != c {
                for j in 0..n {
                    data.swap(pr * n + j, c * n + j);
                }
                det = field.neg(det);
            }
            let piv = data[c * n + c];
            det = field.mul(det, piv);
            let inv = field.inv(piv)?;
            for i in c + 1..n {
                let a = data[i * n + c];
                if a.is_zero() {
                    continue;
                }
                let factor = field.neg(field.mul(a, inv));
                let (dst, src) = two_rows(&mut data, n, i, c);
                field.axpy(&mut dst[c..], factor, &src[c..]);
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.nrows;
        if n != self.ncols {
            return Err(Error::AmbientMismatch(self.nrows, self.ncols));
        }
        let aug = Mat::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                Fel::ONE
            } else {
                Fel::ZERO
            }
        });
        let ech = aug.echelon();
        if ech.pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) || ech.rank < n {
            return Err(Error::DivisionByZero);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Ok(ech.rref.select_columns(&cols))
    }

    /// Characteristic polynomial `det(xI - A)` via reduction to Hessenberg
    /// form.
    pub fn charpoly(&self) -> Result<Poly> {
        let n = self.nrows;
        if n != self.ncols {
            return Err(Error::AmbientMismatch(self.nrows, self.ncols));
        }
        let f = &self.field;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(piv) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
                continue;
            };
            if piv != m {
                for j in 0..n {
                    let (a, b) = (h.get(piv, j), h.get(m, j));
                    h.set(piv, j, b);
                    h.set(m, j, a);
                }
                for i in 0..n {
                    let (a, b) = (h.get(i, piv), h.get(i, m));
                    h.set(i, piv, b);
                    h.set(i, m, a);
                }
            }
            let t_inv = f.inv(h.get(m, m - 1))?;
            for i in m + 1..n {
                let u = f.mul(h.get(i, m - 1), t_inv);
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = f.sub(h.get(i, j), f.mul(u, h.get(m, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, m), f.mul(u, h.get(r, i)));
                    h.set(r, m, v);
                }
            }
        }
        // p_k = (x - h_kk) p_{k-1} - sum_{i<k} h_{ik} (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
        let x = Poly::new(vec![Fel::ZERO, Fel::ONE]);
        let mut ps: Vec<Poly> = vec![Poly::constant(Fel::ONE)];
        for k in 0..n {
            let mut next = x.sub(f, &Poly::constant(h.get(k, k))).mul(f, &ps[k]);
            let mut prod = Fel::ONE;
            for i in (0..k).rev() {
                prod = f.mul(prod, h.get(i + 1, i));
                let c = f.mul(h.get(i, k), prod);
                if !c.is_zero() {
                    next = next.sub(f, &ps[i].scale(f, c));
                }
            }
            ps.push(next);
        }
        Ok(ps.pop().unwrap())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "nrows": self.nrows,
            "ncols": self.ncols,
            "entries": self.field.encode_vec(&self.data),
        })
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<Mat> {
        let get = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::MalformedFile(format!("matrix field {k} missing")))
        };
        let nrows = get("nrows")? as usize;
        let ncols = get("ncols")? as usize;
        let entries = field.decode_vec(
            v.get("entries")
                .ok_or_else(|| Error::MalformedFile("matrix entries missing".into()))?,
        )?;
        Mat::from_vec(field, nrows, ncols, entries)
    }
}

/// A linear subspace of `K^n`, stored as the nonzero rows of a reduced row
/// echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_mat(m: &Mat) -> Self {
        let ech = m.echelon();
        let rows: Vec<usize> = (0..ech.rank).collect();
        Subspace {
            ambient_dim: m.ncols,
            basis: ech.rref.select_rows(&rows),
            pivots: ech.pivots,
        }
    }

    pub fn from_rows(field: &Field, ambient_dim: usize, rows: Vec<Vec<Fel>>) -> Result<Self> {
        let m = Mat::from_rows(field, ambient_dim, &rows)?;
        Ok(Self::from_mat(&m))
    }

    pub fn zero(field: &Field, ambient_dim: usize) -> Self {
        Self::from_mat(&Mat::zeros(field, 0, ambient_dim))
    }

    pub fn full(field: &Field, ambient_dim: usize) -> Self {
        Self::from_mat(&Mat::identity(field, ambient_dim))
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Basis rows in reduced echelon form.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Fel]> {
        self.basis.rows()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::from_mat(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let field = self.field();
        let a = self.dim();
        if a == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(field, self.ambient_dim));
        }
        // alpha A = beta B  <=>  (alpha, beta) in the left kernel of [A; B]
        let stacked = self.basis.vstack(&other.basis)?;
        let left = stacked.transpose().kernel_basis();
        let rows = left
            .vectors()
            .map(|coef| {
                let mut v = vec![Fel::ZERO; self.ambient_dim];
                for (i, &c) in coef[..a].iter().enumerate() {
                    field.axpy(&mut v, c, self.basis.row(i));
                }
                v
            })
            .collect();
        Subspace::from_rows(field, self.ambient_dim, rows)
    }

    /// Whether `other` is contained in `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(other.vectors().all(|v| self.contains_vector(v)))
    }

    pub fn contains_vector(&self, v: &[Fel]) -> bool {
        self.solve_in_span(v).is_ok()
    }

    /// Coordinates of `v` with respect to the echelon basis.
    pub fn solve_in_span(&self, v: &[Fel]) -> Result<Vec<Fel>> {
        if v.len() != self.ambient_dim {
            return Err(Error::AmbientMismatch(v.len(), self.ambient_dim));
        }
        let field = self.field();
        let mut rest = v.to_vec();
        let coords: Vec<Fel> = self.pivots.iter().map(|&c| v[c]).collect();
        for (i, &c) in coords.iter().enumerate() {
            field.axpy(&mut rest, field.neg(c), self.basis.row(i));
        }
        if rest.iter().all(|a| a.is_zero()) {
            Ok(coords)
        } else {
            Err(Error::NotInSpan)
        }
    }

    /// Image of the subspace under `v -> m v` (vectors as columns).
    pub fn map(&self, m: &Mat) -> Result<Subspace> {
        let rows = self
            .vectors()
            .map(|v| m.mul_vec(v))
            .collect::<Result<Vec<_>>>()?;
        Subspace::from_rows(self.field(), m.nrows(), rows)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient_dim": self.ambient_dim,
            "basis": self.basis.to_json(),
        })
    }
}

/// A growing set of independent vectors kept fully reduced, for greedy
/// rank computations.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    field: Field,
    ambient_dim: usize,
    rows: Vec<Vec<Fel>>,
    pivots: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new(field: &Field, ambient_dim: usize) -> Self {
        IncrementalBasis {
            field: field.clone(),
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_subspace(s: &Subspace) -> Self {
        let mut b = Self::new(s.field(), s.ambient_dim());
        for v in s.vectors() {
            b.insert(v);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn reduce(&self, v: &[Fel]) -> Vec<Fel> {
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let a = w[c];
            if !a.is_zero() {
                self.field.axpy(&mut w, self.field.neg(a), row);
            }
        }
        w
    }

    /// Adds `v` if it is independent of the current span; returns whether it
    /// was added.
    pub fn insert(&mut self, v: &[Fel]) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "ambient mismatch");
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = self.field.inv(w[c]).expect("nonzero");
        self.field.scale(&mut w, inv);
        for row in self.rows.iter_mut() {
            let a = row[c];
            if !a.is_zero() {
                self.field.axpy(row, self.field.neg(a), &w);
            }
        }
        self.rows.push(w);
        self.pivots.push(c);
        true
    }

    pub fn contains(&self, v: &[Fel]) -> bool {
        self.reduce(v).iter().all(|a| a.is_zero())
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace::from_rows(&self.field, self.ambient_dim, self.rows.clone())
            .expect("consistent lengths")
    }
}
