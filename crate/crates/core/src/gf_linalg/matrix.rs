use std::fmt;
use std::str::FromStr;

use super::{GfError, PrimeField};

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FFMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FFMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing each modulo `p`.
    pub fn from_entries(field: PrimeField, rows: usize, cols: usize, entries: &[i64]) -> Result<Self, GfError> {
        if entries.len() != rows * cols {
            return Err(GfError::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let data = entries.iter().map(|&x| field.reduce(x)).collect();
        Ok(Self { field, rows, cols, data })
    }

    /// Builds a matrix from residues that must already lie in `[0, p)`.
    pub fn from_residues(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, GfError> {
        if data.len() != rows * cols {
            return Err(GfError::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x >= field.order()) {
            return Err(GfError::EntryOutOfRange { entry: bad as i64, p: field.order() });
        }
        Ok(Self { field, rows, cols, data })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self, GfError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(GfError::Shape("ragged rows".into()));
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::from_entries(field, r, c, &flat)
    }

    /// A column vector `n x 1`.
    pub fn column(field: PrimeField, v: &[u32]) -> Self {
        Self {
            field,
            rows: v.len(),
            cols: 1,
            data: v.iter().map(|&x| x % field.order()).collect(),
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: u32) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value % self.field.order();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &FFMatrix) -> Result<FFMatrix, GfError> {
        if self.field != rhs.field {
            return Err(GfError::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(GfError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let p = self.field.order() as u64;
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for l in 0..self.cols {
                    acc += self.get(i, l) as u64 * rhs.get(l, j) as u64;
                    if acc >= (1 << 62) {
                        acc %= p;
                    }
                }
                out.data[i * rhs.cols + j] = (acc % p) as u32;
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector given as a slice.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let p = self.field.order() as u64;
        (0..self.rows)
            .map(|i| {
                let acc: u64 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum();
                (acc % p) as u32
            })
            .collect()
    }

    pub fn sub(&self, rhs: &FFMatrix) -> Result<FFMatrix, GfError> {
        if self.shape() != rhs.shape() || self.field != rhs.field {
            return Err(GfError::Shape("subtraction of mismatched matrices".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(Self { data, ..self.clone() })
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FFMatrix {
        let mut out = Self::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + jj] = self.get(i, j);
            }
        }
        out
    }

    /// The first `n` rows of `self`.
    pub fn top_rows(&self, n: usize) -> FFMatrix {
        let n = n.min(self.rows);
        Self {
            field: self.field,
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        super::echelon::rank_and_rref(self).rank
    }

    /// Parses the text format: first line `p rows cols`, then `rows` lines of
    /// space-separated residues. Out-of-range entries are rejected.
    pub fn parse_text(text: &str) -> Result<Self, GfError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| GfError::Parse("empty input".into()))?;
        let dims: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|e| GfError::Parse(format!("bad header token {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let [p, rows, cols] = dims[..] else {
            return Err(GfError::Parse(format!("header must be `p rows cols`, got {header:?}")));
        };
        let p = u32::try_from(p).map_err(|_| GfError::NotPrime(u32::MAX))?;
        let field = PrimeField::new(p)?;
        let (rows, cols) = (rows as usize, cols as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| GfError::Parse(format!("missing row {r} of {rows}")))?;
            let before = data.len();
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|e| GfError::Parse(format!("bad entry {tok:?} in row {r}: {e}")))?;
                if v < 0 || v >= p as i64 {
                    return Err(GfError::EntryOutOfRange { entry: v, p });
                }
                data.push(v as u32);
            }
            if data.len() - before != cols {
                return Err(GfError::Parse(format!(
                    "row {r} has {} entries, expected {cols}",
                    data.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(GfError::Parse("trailing rows after matrix".into()));
        }
        Self::from_residues(field, rows, cols, data)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.field.order(), self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Rows as nested vectors, convenient for JSON output.
    pub fn to_nested(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl FromStr for FFMatrix {
    type Err = GfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

impl fmt::Display for FFMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A square invertible matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GLMatrix(FFMatrix);

impl GLMatrix {
    pub fn new(m: FFMatrix) -> Result<Self, GfError> {
        if !m.is_square() {
            return Err(GfError::Shape(format!("{}x{} matrix is not square", m.rows, m.cols)));
        }
        if m.rank() != m.rows {
            return Err(GfError::Singular);
        }
        Ok(Self(m))
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self(FFMatrix::identity(field, n))
    }

    pub fn as_matrix(&self) -> &FFMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> FFMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn inverse(&self) -> GLMatrix {
        let rr = super::echelon::rank_and_rref(&self.0);
        debug_assert!(rr.r == FFMatrix::identity(self.0.field, self.0.rows));
        GLMatrix(rr.u.into_matrix())
    }

    pub fn mul(&self, rhs: &GLMatrix) -> GLMatrix {
        GLMatrix(self.0.mul(&rhs.0).expect("GL matrices of equal size compose"))
    }

    pub fn transpose(&self) -> GLMatrix {
        GLMatrix(self.0.transpose())
    }

    pub(crate) fn from_trusted(m: FFMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }
}

impl std::ops::Deref for GLMatrix {
    type Target = FFMatrix;

    fn deref(&self) -> &FFMatrix {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let a = FFMatrix::from_rows(f(5), &[vec![1, 2, 0], vec![0, 4, 3]]).unwrap();
        let back: FFMatrix = a.to_text().parse().unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn parser_rejects_out_of_range() {
        let err = FFMatrix::parse_text("3 1 2\n1 3\n").unwrap_err();
        assert!(matches!(err, GfError::EntryOutOfRange { entry: 3, p: 3 }));
        assert!(FFMatrix::parse_text("3 1 2\n1 -1\n").is_err());
        assert!(FFMatrix::parse_text("4 1 1\n1\n").is_err());
        assert!(FFMatrix::parse_text("3 2 2\n1 1\n").is_err());
    }

    #[test]
    fn gl_inverse_round_trips() {
        let a = FFMatrix::from_rows(f(7), &[vec![2, 3], vec![1, 4]]).unwrap();
        let g = GLMatrix::new(a).unwrap();
        assert_eq!(g.mul(&g.inverse()), GLMatrix::identity(f(7), 2));
        assert!(GLMatrix::new(FFMatrix::from_rows(f(2), &[vec![1, 1], vec![1, 1]]).unwrap()).is_err());
    }
}
