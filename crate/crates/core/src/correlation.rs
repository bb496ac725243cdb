//! Periodic correlation kernels.
//!
//! The exact kernels accumulate each term `s_i · conj(s_{i+τ})` as
//! `ω^{e_i - e_{i+τ}}` into a group-ring counter. The float kernels sum complex
//! exponentials directly and never decide a verdict.
//!
//! 2D profiles are indexed by (vertical shift `v`, horizontal shift `h`) and
//! flattened row-major as `v·C + h`.

use std::io::Write;

use num_complex::Complex;
use serde::Serialize;

use crate::cyclotomic::{CyclotomicInt, ZeroTester};
use crate::error::{Error, Result};
use crate::scalar::{root_of_unity, Coeff, Real};
use crate::seq::{PhaseArray, PhaseSequence, ProjectionSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileShape {
    Linear(usize),
    Planar { rows: usize, cols: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationProfile<I = i64> {
    shape: ProfileShape,
    values: Vec<CyclotomicInt<I>>,
}

impl<I: Coeff> CorrelationProfile<I> {
    pub fn shape(&self) -> ProfileShape {
        self.shape
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

    pub fn at(&self, shift: usize) -> &CyclotomicInt<I> {
        &self.values[shift % self.values.len()]
    }

    /// Value at vertical shift `v`, horizontal shift `h` (2D profiles).
    pub fn at_2d(&self, v: usize, h: usize) -> &CyclotomicInt<I> {
        match self.shape {
            ProfileShape::Planar { rows, cols } => &self.values[(v % rows) * cols + h % cols],
            ProfileShape::Linear(_) => panic!("at_2d on a 1D profile"),
        }
    }

    pub fn peak(&self) -> &CyclotomicInt<I> {
        &self.values[0]
    }

    /// First off-peak index whose value is nonzero.
    pub fn first_nonzero_off_peak(&self) -> Option<usize> {
        let mut zt = ZeroTester::new(self.values[0].order());
        (1..self.values.len()).find(|&k| !zt.is_zero(self.values[k].coeffs()))
    }

    /// Every off-peak entry is exactly zero.
    pub fn is_perfect(&self) -> bool {
        self.first_nonzero_off_peak().is_none()
    }

    /// The entry at a shift equals the conjugate of the entry at the negated
    /// shift, compared as group-ring elements.
    pub fn is_hermitian(&self) -> bool {
        let n = self.values.len();
        (0..n).all(|k| {
            let mirror = match self.shape {
                ProfileShape::Linear(p) => (p - k) % p,
                ProfileShape::Planar { rows, cols } => {
                    let (v, h) = (k / cols, k % cols);
                    ((rows - v) % rows) * cols + (cols - h) % cols
                }
            };
            self.values[k] == self.values[mirror].conj()
        })
    }

    /// CSV with the shift index (or `v,h`), the float value, and the exact
    /// zero flag.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut zt = ZeroTester::new(self.values[0].order());
        match self.shape {
            ProfileShape::Linear(_) => w.write_record(["shift", "re", "im", "exact_zero"])?,
            ProfileShape::Planar { .. } => w.write_record(["v", "h", "re", "im", "exact_zero"])?,
        }
        for (k, val) in self.values.iter().enumerate() {
            let z = val.to_complex::<f64>();
            let zero = zt.is_zero(val.coeffs());
            let mut rec = match self.shape {
                ProfileShape::Linear(_) => vec![k.to_string()],
                ProfileShape::Planar { cols, .. } => {
                    vec![(k / cols).to_string(), (k % cols).to_string()]
                }
            };
            rec.extend([z.re.to_string(), z.im.to_string(), zero.to_string()]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_same(a: &PhaseSequence, b: &PhaseSequence) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

fn cross_exps<I: Coeff>(order: u32, a: &[u32], b: &[u32]) -> Result<Vec<CyclotomicInt<I>>> {
    let len = a.len();
    (0..len)
        .map(|tau| {
            let mut acc = CyclotomicInt::zero(order);
            for i in 0..len {
                acc.add_root(a[i] as i64 - b[(i + tau) % len] as i64)?;
            }
            Ok(acc)
        })
        .collect()
}

/// `θ_s(τ) = Σ_i s_i conj(s_{i+τ})` for `τ ∈ [0, L)`.
pub fn autocorrelate<I: Coeff>(s: &PhaseSequence) -> Result<CorrelationProfile<I>> {
    Ok(CorrelationProfile {
        shape: ProfileShape::Linear(s.len()),
        values: cross_exps(s.order(), s.exponents(), s.exponents())?,
    })
}

/// `θ_{a,b}(τ) = Σ_i a_i conj(b_{i+τ})`.
pub fn crosscorrelate<I: Coeff>(
    a: &PhaseSequence,
    b: &PhaseSequence,
) -> Result<CorrelationProfile<I>> {
    check_same(a, b)?;
    Ok(CorrelationProfile {
        shape: ProfileShape::Linear(a.len()),
        values: cross_exps(a.order(), a.exponents(), b.exponents())?,
    })
}

/// `θ_S(v, h) = Σ_{i,j} S_{i,j} conj(S_{i+v, j+h})`, both indices cyclic.
pub fn autocorrelate_2d<I: Coeff>(a: &PhaseArray) -> Result<CorrelationProfile<I>> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut values = Vec::with_capacity(rows * cols);
    for v in 0..rows {
        for h in 0..cols {
            let mut acc = CyclotomicInt::zero(a.order());
            for i in 0..rows {
                for j in 0..cols {
                    acc.add_root(
                        a.get(i, j) as i64 - a.get((i + v) % rows, (j + h) % cols) as i64,
                    )?;
                }
            }
            values.push(acc);
        }
    }
    Ok(CorrelationProfile {
        shape: ProfileShape::Planar { rows, cols },
        values,
    })
}

/// Cross-correlation of columns `j0` and `j1` at vertical shift `tau`.
pub fn column_crosscorrelation<I: Coeff>(
    a: &PhaseArray,
    j0: usize,
    j1: usize,
    tau: usize,
) -> Result<CyclotomicInt<I>> {
    let rows = a.rows();
    let mut acc = CyclotomicInt::zero(a.order());
    for q in 0..rows {
        acc.add_root(a.get(q, j0) as i64 - a.get((q + tau) % rows, j1) as i64)?;
    }
    Ok(acc)
}

/// Periodic autocorrelation of a projection: `θ_r(τ) = Σ_i r_i conj(r_{i+τ})`.
pub fn autocorrelate_projection<I: Coeff>(
    r: &ProjectionSequence<I>,
) -> Result<CorrelationProfile<I>> {
    let len = r.len();
    if len == 0 {
        return Err(Error::Dimension("empty projection".into()));
    }
    let conj: Vec<_> = r.values().iter().map(CyclotomicInt::conj).collect();
    let mut values = Vec::with_capacity(len);
    for tau in 0..len {
        let mut acc = CyclotomicInt::zero(r.order());
        for i in 0..len {
            acc.add_assign(&r.values()[i].mul(&conj[(i + tau) % len])?)?;
        }
        values.push(acc);
    }
    Ok(CorrelationProfile {
        shape: ProfileShape::Linear(len),
        values,
    })
}

/// Evaluates both sides of the change-of-coordinates identity
///
/// `θ_s(q'C + r') = Σ_r θ_{S[r], S[(r+r') mod C]}(q' + ⌊(r+r')/C⌋)`
///
/// and compares them as group-ring elements. The identity holds for every
/// array, so `false` signals a kernel bug.
pub fn decomposition_check(a: &PhaseArray, qprime: i64, rprime: usize) -> Result<bool> {
    let (rows, cols) = (a.rows(), a.cols());
    if rprime >= cols {
        return Err(Error::InvalidArgument(format!(
            "r' = {rprime} not below C = {cols}"
        )));
    }
    let len = (rows * cols) as i64;
    let tau = (qprime * cols as i64 + rprime as i64).rem_euclid(len) as usize;
    let s = a.flatten();
    let mut lhs = CyclotomicInt::<i64>::zero(a.order());
    for i in 0..s.len() {
        lhs.add_root(s.exponents()[i] as i64 - s.exponents()[(i + tau) % s.len()] as i64)?;
    }

    let mut rhs = CyclotomicInt::<i64>::zero(a.order());
    for r in 0..cols {
        let carry = ((r + rprime) / cols) as i64;
        let shift = (qprime + carry).rem_euclid(rows as i64) as usize;
        rhs.add_assign(&column_crosscorrelation(a, r, (r + rprime) % cols, shift)?)?;
    }
    Ok(lhs == rhs)
}

/// Checks `θ_r(τ) = Σ_h θ_S(τ, h)` for the column-sum projection `r`.
pub fn projection_sum_check(a: &PhaseArray, tau: usize) -> Result<bool> {
    if tau >= a.rows() {
        return Err(Error::InvalidArgument(format!(
            "τ = {tau} not below R = {}",
            a.rows()
        )));
    }
    let r = a.column_sum::<i64>()?;
    let lhs = autocorrelate_projection(&r)?.at(tau).clone();
    let prof = autocorrelate_2d::<i64>(a)?;
    let mut rhs = CyclotomicInt::zero(a.order());
    for h in 0..a.cols() {
        rhs.add_assign(prof.at_2d(tau, h))?;
    }
    Ok(lhs == rhs)
}

/// The row-sum mirror: `θ_c(h) = Σ_v θ_S(v, h)`.
pub fn projection_sum_check_rows(a: &PhaseArray, h: usize) -> Result<bool> {
    if h >= a.cols() {
        return Err(Error::InvalidArgument(format!(
            "h = {h} not below C = {}",
            a.cols()
        )));
    }
    let c = a.row_sum::<i64>()?;
    let lhs = autocorrelate_projection(&c)?.at(h).clone();
    let prof = autocorrelate_2d::<i64>(a)?;
    let mut rhs = CyclotomicInt::zero(a.order());
    for v in 0..a.rows() {
        rhs.add_assign(prof.at_2d(v, h))?;
    }
    Ok(lhs == rhs)
}

fn root_table<F: Real>(order: u32) -> Vec<Complex<F>> {
    (0..order)
        .map(|e| root_of_unity(e as i64, order as u64))
        .collect()
}

fn cross_float<F: Real>(order: u32, a: &[u32], b: &[u32]) -> Vec<Complex<F>> {
    let table = root_table::<F>(order);
    let n = order as i64;
    let len = a.len();
    (0..len)
        .map(|tau| {
            (0..len).fold(Complex::new(F::zero(), F::zero()), |acc, i| {
                acc + table[(a[i] as i64 - b[(i + tau) % len] as i64).rem_euclid(n) as usize]
            })
        })
        .collect()
}

pub fn autocorrelate_float<F: Real>(s: &PhaseSequence) -> Vec<Complex<F>> {
    cross_float(s.order(), s.exponents(), s.exponents())
}

pub fn crosscorrelate_float<F: Real>(
    a: &PhaseSequence,
    b: &PhaseSequence,
) -> Result<Vec<Complex<F>>> {
    check_same(a, b)?;
    Ok(cross_float(a.order(), a.exponents(), b.exponents()))
}

pub fn autocorrelate_2d_float<F: Real>(a: &PhaseArray) -> Vec<Complex<F>> {
    let table = root_table::<F>(a.order());
    let n = a.order() as i64;
    let (rows, cols) = (a.rows(), a.cols());
    let mut out = Vec::with_capacity(rows * cols);
    for v in 0..rows {
        for h in 0..cols {
            let mut acc = Complex::new(F::zero(), F::zero());
            for i in 0..rows {
                for j in 0..cols {
                    let d = a.get(i, j) as i64 - a.get((i + v) % rows, (j + h) % cols) as i64;
                    acc = acc + table[d.rem_euclid(n) as usize];
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Tally of exact-versus-float zero verdicts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Concordance {
    pub checked: u64,
    pub disagreements: u64,
}

impl Concordance {
    /// Records one comparison; `scale` is the number of unimodular terms
    /// (or the coefficient mass) behind `float_value`.
    pub fn record<F: Real>(&mut self, exact_zero: bool, float_value: Complex<F>, scale: F) -> bool {
        let float_zero = float_value.norm() <= F::zero_tolerance() * scale;
        self.checked += 1;
        let agree = float_zero == exact_zero;
        if !agree {
            self.disagreements += 1;
        }
        agree
    }

    /// Compares every entry of an exact profile against an independently
    /// computed float profile.
    pub fn record_profile<I: Coeff, F: Real>(
        &mut self,
        exact: &CorrelationProfile<I>,
        float: &[Complex<F>],
        terms: usize,
    ) {
        let mut zt = ZeroTester::new(exact.values[0].order());
        for (e, &f) in exact.values.iter().zip(float) {
            self.record(zt.is_zero(e.coeffs()), f, F::from(terms).unwrap());
        }
    }

    pub fn merge(&mut self, other: &Concordance) {
        self.checked += other.checked;
        self.disagreements += other.disagreements;
    }
}
