use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{Polynomial, VarNames};

/// Dense matrix with polynomial entries sharing one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    field: Field,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize, nvars: usize, field: Field) -> Self {
        PolyMatrix {
            rows,
            cols,
            nvars,
            field,
            entries: vec![Polynomial::zero(nvars, field); rows * cols],
        }
    }

    pub fn identity(n: usize, nvars: usize, field: Field) -> Self {
        let mut m = Self::zero(n, n, nvars, field);
        for i in 0..n {
            m.set(i, i, Polynomial::one(nvars, field));
        }
        m
    }

    /// Builds from row-major entries.
    pub fn from_rows(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let first = rows
            .iter()
            .flatten()
            .next()
            .ok_or_else(|| Error::dim("empty matrix needs an explicit ring"))?;
        let (nvars, field) = (first.nvars(), first.field());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dim("ragged matrix rows"));
            }
            for e in row {
                if e.nvars() != nvars || e.field() != field {
                    return Err(Error::dim("matrix entries live in different rings"));
                }
                entries.push(e);
            }
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            nvars,
            field,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn same_shape(&self, other: &PolyMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("matrix shapes differ"));
        }
        if self.nvars != other.nvars || self.field != other.field {
            return Err(Error::dim("matrix rings differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = &*a + b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = &*a - b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &crate::field::Coefficient) -> PolyMatrix {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(c);
        }
        out
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.nvars != other.nvars || self.field != other.field {
            return Err(Error::dim("matrix rings differ"));
        }
        let mut out = PolyMatrix::zero(self.rows, other.cols, self.nvars, self.field);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(self.nvars, self.field);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::dim("trace of a non-square matrix"));
        }
        let mut acc = Polynomial::zero(self.nvars, self.field);
        for i in 0..self.rows {
            acc = &acc + self.get(i, i);
        }
        Ok(acc)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Polynomial::one(self.nvars, self.field));
        }
        let mut m: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut negate = false;
        let mut prev = Polynomial::one(self.nvars, self.field);
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        negate = !negate;
                    }
                    None => return Ok(Polynomial::zero(self.nvars, self.field)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = num
                        .exact_div(&prev)
                        .ok_or_else(|| Error::Invariant("Bareiss division was not exact".into()))?;
                }
                m[i][k] = Polynomial::zero(self.nvars, self.field);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if negate { -&det } else { det })
    }

    /// Characteristic polynomial `det(λI − M)` in a ring with one extra
    /// variable λ appended after the entry variables.
    pub fn characteristic_polynomial(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::dim("characteristic polynomial of a non-square matrix"));
        }
        let n = self.rows;
        let nv = self.nvars + 1;
        let lambda = Polynomial::var(self.nvars, nv, self.field);
        let mut shifted = PolyMatrix::zero(n, n, nv, self.field);
        for i in 0..n {
            for j in 0..n {
                let mut e = -&self.get(i, j).extend_vars(nv);
                if i == j {
                    e = &e + &lambda;
                }
                shifted.set(i, j, e);
            }
        }
        shifted.determinant()
    }

    /// Substitutes into every entry.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<PolyMatrix> {
        let rows = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).substitute(images))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() || self.cols == 0 {
            return Ok(self.clone());
        }
        PolyMatrix::from_rows(rows)
    }

    pub fn to_string_with(&self, names: &VarNames) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = (0..self.cols)
                    .map(|j| self.get(i, j).to_string_with(names))
                    .collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&VarNames::standard(self.nvars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize, n: usize) -> Polynomial {
        Polynomial::var(i, n, Field::Rational)
    }

    #[test]
    fn bareiss_matches_cofactor_on_3x3() {
        let n = 3;
        let a = PolyMatrix::from_rows(vec![
            vec![x(0, n), x(1, n), x(2, n)],
            vec![x(1, n), x(2, n), x(0, n)],
            vec![x(2, n), x(0, n), &x(1, n) + &x(0, n)],
        ])
        .unwrap();
        let g = |i: usize, j: usize| a.get(i, j).clone();
        let cof = &(&(&g(0, 0) * &(&(&g(1, 1) * &g(2, 2)) - &(&g(1, 2) * &g(2, 1))))
            - &(&g(0, 1) * &(&(&g(1, 0) * &g(2, 2)) - &(&g(1, 2) * &g(2, 0)))))
            + &(&g(0, 2) * &(&(&g(1, 0) * &g(2, 1)) - &(&g(1, 1) * &g(2, 0))));
        assert_eq!(a.determinant().unwrap(), cof);
    }

    #[test]
    fn zero_pivot_triggers_row_swap() {
        let n = 1;
        let z = Polynomial::zero(n, Field::Rational);
        let one = Polynomial::one(n, Field::Rational);
        let a = PolyMatrix::from_rows(vec![vec![z.clone(), one.clone()], vec![x(0, n), z]]).unwrap();
        assert_eq!(a.determinant().unwrap(), -&x(0, n));
    }

    #[test]
    fn characteristic_polynomial_of_nilpotent() {
        let n = 2;
        let z = Polynomial::zero(n, Field::Rational);
        let a = PolyMatrix::from_rows(vec![vec![z.clone(), x(1, n)], vec![z.clone(), z]]).unwrap();
        let cp = a.characteristic_polynomial().unwrap();
        assert_eq!(cp, Polynomial::var(2, 3, Field::Rational).pow(2));
    }
}
