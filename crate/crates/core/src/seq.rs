//! Phase sequences, row-major phase arrays, and their row/column projections.

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::scalar::Coeff;

/// A length-`L` sequence of phase exponents modulo `order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseSequence {
    order: u32,
    exponents: Vec<u32>,
}

fn reduce_all<E: Into<i64>>(order: u32, exponents: impl IntoIterator<Item = E>) -> Vec<u32> {
    exponents
        .into_iter()
        .map(|e| e.into().rem_euclid(order as i64) as u32)
        .collect()
}

impl PhaseSequence {
    /// Builds a sequence, normalizing each exponent into `[0, order)`.
    pub fn new<E: Into<i64>>(order: u32, exponents: impl IntoIterator<Item = E>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "alphabet order must be positive".into(),
            ));
        }
        let exponents = reduce_all(order, exponents);
        if exponents.is_empty() {
            return Err(Error::Dimension("sequence must be non-empty".into()));
        }
        Ok(Self { order, exponents })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Adds `k` to every exponent (a global phase rotation).
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            order: self.order,
            exponents: reduce_all(self.order, self.exponents.iter().map(|&e| e as i64 + k)),
        }
    }
}

/// An `R × C` phase array stored row-major: entry `(i, j)` lives at `i·C + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseArray {
    order: u32,
    rows: usize,
    cols: usize,
    exponents: Vec<u32>,
}

impl PhaseArray {
    pub fn new<E: Into<i64>>(
        order: u32,
        rows: usize,
        cols: usize,
        exponents: impl IntoIterator<Item = E>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "alphabet order must be positive".into(),
            ));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols} array")));
        }
        let exponents = reduce_all(order, exponents);
        if exponents.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries do not fill a {rows}x{cols} array",
                exponents.len()
            )));
        }
        Ok(Self {
            order,
            rows,
            cols,
            exponents,
        })
    }

    /// Builds an array from nested rows.
    pub fn from_rows(order: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(order, rows.len(), cols, rows.iter().flatten().copied())
    }

    /// Wraps exponents already reduced into `[0, order)`.
    pub(crate) fn from_reduced(order: u32, rows: usize, cols: usize, exponents: Vec<u32>) -> Self {
        debug_assert_eq!(exponents.len(), rows * cols);
        debug_assert!(exponents.iter().all(|&e| e < order));
        Self {
            order,
            rows,
            cols,
            exponents,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.exponents[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.exponents[i * self.cols..(i + 1) * self.cols]
    }

    pub fn flatten(&self) -> PhaseSequence {
        PhaseSequence {
            order: self.order,
            exponents: self.exponents.clone(),
        }
    }

    pub fn unflatten(s: &PhaseSequence, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != s.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} does not factor length {}",
                s.len()
            )));
        }
        Ok(Self {
            order: s.order,
            rows,
            cols,
            exponents: s.exponents.clone(),
        })
    }

    pub fn shifted(&self, k: i64) -> Self {
        Self {
            exponents: reduce_all(self.order, self.exponents.iter().map(|&e| e as i64 + k)),
            ..self.clone()
        }
    }

    /// `r_i = Σ_j S_{i,j}`: one exact value per row, length `R`.
    pub fn column_sum<I: Coeff>(&self) -> Result<ProjectionSequence<I>> {
        let mut values = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = CyclotomicInt::zero(self.order);
            for &e in self.row(i) {
                acc.add_root(e as i64)?;
            }
            values.push(acc);
        }
        Ok(ProjectionSequence {
            order: self.order,
            values,
        })
    }

    /// `c_j = Σ_i S_{i,j}`: one exact value per column, length `C`.
    pub fn row_sum<I: Coeff>(&self) -> Result<ProjectionSequence<I>> {
        let mut values = vec![CyclotomicInt::zero(self.order); self.cols];
        for i in 0..self.rows {
            for (acc, &e) in values.iter_mut().zip(self.row(i)) {
                acc.add_root(e as i64)?;
            }
        }
        Ok(ProjectionSequence {
            order: self.order,
            values,
        })
    }

    pub fn project<I: Coeff>(&self, axis: ProjectionAxis) -> Result<ProjectionSequence<I>> {
        match axis {
            ProjectionAxis::ColumnSum => self.column_sum(),
            ProjectionAxis::RowSum => self.row_sum(),
        }
    }
}

/// Which sum collapses the array to one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionAxis {
    /// Sum across each row; indexed by row, length `R`.
    ColumnSum,
    /// Sum down each column; indexed by column, length `C`.
    RowSum,
}

/// A sequence of exact cyclotomic values produced by projecting an array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSequence<I = i64> {
    order: u32,
    values: Vec<CyclotomicInt<I>>,
}

impl<I: Coeff> ProjectionSequence<I> {
    pub fn new(order: u32, values: Vec<CyclotomicInt<I>>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.order() != order) {
            return Err(Error::OrderMismatch {
                left: order,
                right: v.order(),
            });
        }
        Ok(Self { order, values })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn values(&self) -> &[CyclotomicInt<I>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cyclotomic;
    use proptest::prelude::*;

    fn frank2() -> PhaseArray {
        PhaseArray::from_rows(2, &[vec![0, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(frank2().flatten().exponents(), &[0, 0, 0, 1]);
        let row = PhaseArray::new(5, 1, 4, [3i64, 1, 4, 1]).unwrap();
        assert_eq!(row.flatten().exponents(), &[3, 1, 4, 1]);
    }

    #[test]
    fn unflatten_examples() {
        let s = PhaseSequence::new(2, [0i64, 0, 0, 1]).unwrap();
        assert_eq!(PhaseArray::unflatten(&s, 2, 2).unwrap(), frank2());
        let a = PhaseArray::unflatten(&s, 1, 4).unwrap();
        assert_eq!(a.row(0), &[0, 0, 0, 1]);
        assert!(matches!(
            PhaseArray::unflatten(&s, 3, 2),
            Err(Error::Dimension(_))
        ));
        assert!(PhaseArray::unflatten(&s, 0, 4).is_err());
    }

    #[test]
    fn construction_normalizes_and_validates() {
        let s = PhaseSequence::new(3, [-1i64, 4, 0]).unwrap();
        assert_eq!(s.exponents(), &[2, 1, 0]);
        assert!(PhaseSequence::new(3, Vec::<i64>::new()).is_err());
        assert!(PhaseSequence::new(0, [0i64]).is_err());
        assert!(PhaseArray::new(2, 2, 2, [0i64, 1, 0]).is_err());
        let ones = PhaseSequence::new(1, [5i64, 7]).unwrap();
        assert_eq!(ones.exponents(), &[0, 0]);
    }

    #[test]
    fn column_sum_examples() {
        let r = frank2().column_sum::<i64>().unwrap();
        assert_eq!(
            r.values()[0],
            Cyclotomic::from_coeffs(2, vec![2, 0]).unwrap()
        );
        assert_eq!(
            r.values()[1],
            Cyclotomic::from_coeffs(2, vec![1, 1]).unwrap()
        );
        assert!(r.values()[1].is_zero());

        let flat = PhaseArray::new(4, 3, 5, vec![0i64; 15]).unwrap();
        for v in flat.column_sum::<i64>().unwrap().values() {
            assert_eq!(v.as_integer(), Some(5));
        }

        let single = PhaseArray::new(4, 3, 1, [1i64, 2, 3]).unwrap();
        let r = single.column_sum::<i64>().unwrap();
        for (i, v) in r.values().iter().enumerate() {
            assert_eq!(*v, Cyclotomic::root(4, single.get(i, 0) as i64));
        }
    }

    #[test]
    fn row_sum_examples() {
        let c = frank2().row_sum::<i64>().unwrap();
        assert_eq!(c.values()[0].as_integer(), Some(2));
        assert!(c.values()[1].is_zero());

        let flat = PhaseArray::new(4, 3, 5, vec![0i64; 15]).unwrap();
        for v in flat.row_sum::<i64>().unwrap().values() {
            assert_eq!(v.as_integer(), Some(3));
        }

        let single = PhaseArray::new(4, 1, 3, [1i64, 2, 3]).unwrap();
        let c = single.row_sum::<i64>().unwrap();
        assert_eq!(c.values()[2], Cyclotomic::root(4, 3));
    }

    proptest! {
        #[test]
        fn flatten_unflatten_round_trip(
            order in 1u32..9,
            rows in 1usize..7,
            cols in 1usize..7,
            seed in proptest::collection::vec(0i64..100, 36),
        ) {
            let a = PhaseArray::new(order, rows, cols, seed[..rows * cols].iter().copied()).unwrap();
            prop_assert_eq!(PhaseArray::unflatten(&a.flatten(), rows, cols).unwrap(), a.clone());
            let s = a.flatten();
            prop_assert_eq!(PhaseArray::unflatten(&s, rows, cols).unwrap().flatten(), s);
        }
    }
}
