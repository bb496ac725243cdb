//! Gaussian / fractional decomposition of column cross-correlations for
//! floored bi-quadratic arrays.
//!
//! With `p(i, j) = A(j) i² + B(j) i + C(j)` and `S_{i,j} = ω_K^{⌊p/n⌋}`, each
//! cross-correlation term splits via `⌊x⌋ = x - {x}` into
//!
//! ```text
//! exp(2πi/(nK) · (ΔA i² + ΔB i + ΔC)) × exp(-2πi/K · ({p(i,j1)/n} - {p(i,j2)/n}))
//! ```
//!
//! Fractional parts are taken exactly as `(p mod n) / n` on the canonical
//! representative of `p` in `[0, nK)`.

use std::io::Write;

use num_complex::Complex;
use serde::Serialize;

use crate::aop::AopChecker;
use crate::correlation::column_crosscorrelation;
use crate::cyclotomic::{CyclotomicInt, ZeroTester};
use crate::error::{Error, Result};
use crate::indexfn::{generate_array, FlooredIndex, IndexFunction, PolyIndex};
use crate::scalar::{root_of_unity, Real};
use crate::seq::PhaseArray;
use crate::Cyclotomic;

/// Column-wise coefficient tables of a floored bi-quadratic index function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiQuadraticSpec {
    n: u32,
    k: u32,
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
    rows: usize,
}

impl BiQuadraticSpec {
    pub fn new(n: u32, k: u32, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>, rows: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument("n and K must be positive".into()));
        }
        if rows == 0 || a.is_empty() {
            return Err(Error::Dimension(
                "spec needs at least one row and one column".into(),
            ));
        }
        if b.len() != a.len() || c.len() != a.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: if b.len() != a.len() { b.len() } else { c.len() },
            });
        }
        Ok(Self {
            n,
            k,
            a,
            b,
            c,
            rows,
        })
    }

    /// Tabulates `A(j), B(j), C(j)` for `j ∈ [0, cols)` from a floored index
    /// of x-degree at most 2.
    pub fn from_floored(f: &FlooredIndex, rows: usize, cols: usize) -> Result<Self> {
        let p = f.poly();
        if p.degrees().0 > 2 {
            return Err(Error::InvalidArgument(
                "x-degree above 2 is not bi-quadratic".into(),
            ));
        }
        let table = |deg: u32| {
            (0..cols as i64)
                .map(|j| p.x_coefficient_at(deg, j) as i64)
                .collect()
        };
        Self::new(
            f.divisor(),
            f.base_order(),
            table(2),
            table(1),
            table(0),
            rows,
        )
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    fn modulus(&self) -> u64 {
        self.n as u64 * self.k as u64
    }

    fn raw(&self, i: i64, j: usize) -> i128 {
        let i = i as i128;
        self.a[j] as i128 * i * i + self.b[j] as i128 * i + self.c[j] as i128
    }

    /// Canonical representative of `p(i, j)` in `[0, nK)`.
    pub fn representative(&self, i: i64, j: usize) -> u64 {
        self.raw(i, j).rem_euclid(self.modulus() as i128) as u64
    }

    /// `A(j) ≡ 0 (mod n)` on every tabulated column.
    pub fn is_collapse_constrained(&self) -> bool {
        self.a.iter().all(|a| a.rem_euclid(self.n as i64) == 0)
    }

    fn check_pair(&self, j1: usize, j2: usize) -> Result<()> {
        if j1 == j2 {
            return Err(Error::InvalidArgument(format!(
                "column pair ({j1}, {j2}) is not distinct"
            )));
        }
        if j1 >= self.cols() || j2 >= self.cols() {
            return Err(Error::InvalidArgument(format!(
                "column pair ({j1}, {j2}) outside [0, {})",
                self.cols()
            )));
        }
        Ok(())
    }
}

impl IndexFunction for BiQuadraticSpec {
    fn alphabet_order(&self) -> u32 {
        self.k
    }

    fn period(&self) -> u32 {
        self.n * self.k
    }

    /// Columns beyond the table wrap cyclically.
    fn phase(&self, i: i64, j: i64) -> u32 {
        let j = j.rem_euclid(self.cols() as i64) as usize;
        (self.representative(i, j) / self.n as u64) as u32
    }
}

impl BiQuadraticSpec {
    pub fn generate_array(&self) -> PhaseArray {
        generate_array(self, self.rows, self.cols()).expect("spec dimensions are positive")
    }
}

fn split<F: Real>(
    spec: &BiQuadraticSpec,
    gauss_num: i128,
    r1: u64,
    r2: u64,
) -> (Complex<F>, Complex<F>) {
    let m = spec.modulus();
    let n = spec.n as u64;
    let g = root_of_unity::<F>(gauss_num.rem_euclid(m as i128) as i64, m);
    // exp(-2πi/K · (f1 - f2)/n) = exp(-2πi (f1 - f2) / (nK))
    let frac = (r1 % n) as i64 - (r2 % n) as i64;
    let f = root_of_unity::<F>(-frac, m);
    (g, f)
}

/// The Gaussian and fractional factors of the row-`i` term for columns
/// `(j1, j2)` at alignment.
pub fn decompose_term<F: Real>(
    spec: &BiQuadraticSpec,
    i: i64,
    j1: usize,
    j2: usize,
) -> Result<(Complex<F>, Complex<F>)> {
    spec.check_pair(j1, j2)?;
    let ii = i as i128;
    let da = (spec.a[j1] - spec.a[j2]) as i128;
    let db = (spec.b[j1] - spec.b[j2]) as i128;
    let dc = (spec.c[j1] - spec.c[j2]) as i128;
    let gauss_num = da * ii * ii + db * ii + dc;
    Ok(split(
        spec,
        gauss_num,
        spec.representative(i, j1),
        spec.representative(i, j2),
    ))
}

/// Shifted variant: pairs row `i` of `j1` with row `i + tau` (cyclic in `R`)
/// of `j2`. At `tau = 0` it agrees with [`decompose_term`].
pub fn decompose_term_shifted<F: Real>(
    spec: &BiQuadraticSpec,
    i: i64,
    j1: usize,
    j2: usize,
    tau: usize,
) -> Result<(Complex<F>, Complex<F>)> {
    spec.check_pair(j1, j2)?;
    let i2 = ((i as i128 + tau as i128).rem_euclid(spec.rows as i128)) as i64;
    let gauss_num = spec.raw(i, j1) - spec.raw(i2, j2);
    Ok(split(
        spec,
        gauss_num,
        spec.representative(i, j1),
        spec.representative(i2, j2),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterTerm<F> {
    pub i: usize,
    pub gaussian: Complex<F>,
    pub fractional: Complex<F>,
    pub product: Complex<F>,
    pub partial: Complex<F>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterTrace<F> {
    pub j1: usize,
    pub j2: usize,
    pub shift: usize,
    pub terms: Vec<ScatterTerm<F>>,
    pub final_sum: Complex<F>,
    /// The exact kernel's value, embedded in `Z[ω_{nK}]`.
    pub exact_sum: Cyclotomic,
    /// `final_sum` is within tolerance of `exact_sum`.
    pub consistent: bool,
}

impl<F: Real + std::fmt::Display> ScatterTrace<F> {
    /// Columns: `i, gauss_re, gauss_im, frac_re, frac_im, prod_re, prod_im,
    /// partial_re, partial_im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "i",
            "gauss_re",
            "gauss_im",
            "frac_re",
            "frac_im",
            "prod_re",
            "prod_im",
            "partial_re",
            "partial_im",
        ])?;
        for t in &self.terms {
            w.write_record([
                t.i.to_string(),
                t.gaussian.re.to_string(),
                t.gaussian.im.to_string(),
                t.fractional.re.to_string(),
                t.fractional.im.to_string(),
                t.product.re.to_string(),
                t.product.im.to_string(),
                t.partial.re.to_string(),
                t.partial.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Embeds `x ∈ Z[ω_K]` into `Z[ω_{nK}]` via `ω_K = ω_{nK}^n`.
fn embed(x: &Cyclotomic, n: u32) -> Cyclotomic {
    let m = x.order() * n;
    let mut coeffs = vec![0i64; m as usize];
    for (e, &c) in x.coeffs().iter().enumerate() {
        coeffs[e * n as usize] = c;
    }
    CyclotomicInt::from_coeffs(m, coeffs).expect("sized to order")
}

pub fn trace_crosscorrelation<F: Real>(
    spec: &BiQuadraticSpec,
    j1: usize,
    j2: usize,
) -> Result<ScatterTrace<F>> {
    trace_crosscorrelation_shifted(spec, j1, j2, 0)
}

/// Full per-row trace of the decomposition with its partial-sum walk,
/// cross-validated against the exact column cross-correlation.
pub fn trace_crosscorrelation_shifted<F: Real>(
    spec: &BiQuadraticSpec,
    j1: usize,
    j2: usize,
    tau: usize,
) -> Result<ScatterTrace<F>> {
    spec.check_pair(j1, j2)?;
    let mut partial = Complex::new(F::zero(), F::zero());
    let mut terms = Vec::with_capacity(spec.rows);
    for i in 0..spec.rows {
        let (g, f) = if tau == 0 {
            decompose_term::<F>(spec, i as i64, j1, j2)?
        } else {
            decompose_term_shifted::<F>(spec, i as i64, j1, j2, tau)?
        };
        let product = g * f;
        partial = partial + product;
        terms.push(ScatterTerm {
            i,
            gaussian: g,
            fractional: f,
            product,
            partial,
        });
    }
    let array = spec.generate_array();
    let exact: Cyclotomic = column_crosscorrelation(&array, j1, j2, tau % spec.rows)?;
    let exact_sum = embed(&exact, spec.n);
    let diff = (partial - exact_sum.to_complex::<F>()).norm();
    let consistent = diff <= F::zero_tolerance() * F::from(spec.rows).unwrap();
    Ok(ScatterTrace {
        j1,
        j2,
        shift: tau,
        terms,
        final_sum: partial,
        exact_sum,
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseReport {
    /// `A(j) ≡ 0 (mod n)` for every column.
    pub collapsed: bool,
    /// When collapsed: every quadratic factor `exp(2πi ΔA i² / (nK))` (per
    /// column and per column pair) satisfies `g(i + K) = g(i)` on `[0, nK)`.
    pub period_k_verified: Option<bool>,
    pub max_deviation: f64,
    pub factors_checked: usize,
}

pub fn collapse_check(spec: &BiQuadraticSpec) -> CollapseReport {
    if !spec.is_collapse_constrained() {
        return CollapseReport {
            collapsed: false,
            period_k_verified: None,
            max_deviation: 0.0,
            factors_checked: 0,
        };
    }
    let m = spec.modulus();
    let k = spec.k as i64;
    let cols = spec.cols();
    let mut deltas: Vec<i64> = spec.a.clone();
    for j1 in 0..cols {
        for j2 in j1 + 1..cols {
            deltas.push(spec.a[j1] - spec.a[j2]);
        }
    }
    let mut max_dev = 0.0f64;
    for &da in &deltas {
        let g = |i: i64| {
            let num = (da as i128 * (i as i128) * (i as i128)).rem_euclid(m as i128) as i64;
            root_of_unity::<f64>(num, m)
        };
        for i in 0..m as i64 {
            max_dev = max_dev.max((g(i + k) - g(i)).norm());
        }
    }
    CollapseReport {
        collapsed: true,
        period_k_verified: Some(max_dev <= 1e-9),
        max_deviation: max_dev,
        factors_checked: deltas.len(),
    }
}

/// Exact Gaussian-only sum `Σ_i ω_{nK}^{ΔA i² + ΔB i + ΔC}` at alignment.
pub fn gaussian_sum(spec: &BiQuadraticSpec, j1: usize, j2: usize) -> Result<Cyclotomic> {
    spec.check_pair(j1, j2)?;
    let m = spec.modulus() as u32;
    let mut acc = Cyclotomic::zero(m);
    for i in 0..spec.rows as i64 {
        let ii = i as i128;
        let num = (spec.a[j1] - spec.a[j2]) as i128 * ii * ii
            + (spec.b[j1] - spec.b[j2]) as i128 * ii
            + (spec.c[j1] - spec.c[j2]) as i128;
        acc.add_root(num.rem_euclid(m as i128) as i64)?;
    }
    Ok(acc)
}

/// Empirical look at whether column orthogonality beyond `K` columns leans
/// on the fractional factor. Reported, never asserted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FractionalSurvey {
    pub n: u32,
    pub k: u32,
    pub rows: usize,
    pub polynomials: u64,
    /// `(polynomial, C)` candidates with `K < C ≤ nK` checked.
    pub candidates: u64,
    /// Candidates whose columns are mutually orthogonal at every shift.
    pub orthogonal_beyond_k: u64,
    /// Of those, how many have a column pair whose Gaussian-only sum is
    /// nonzero, i.e. the fractional factor is needed for cancellation.
    pub fractional_dependent: u64,
    /// Up to 16 coefficient vectors of orthogonal candidates without such a
    /// pair.
    pub independent_examples: Vec<(Vec<u32>, usize)>,
}

/// Exhausts bi-quadratic polynomials mod `nK` (degrees ≤ (2, 2)) with
/// `R = nK` rows and `K < C ≤ nK` columns.
pub fn fractional_dependence_survey(n: u32, k: u32, budget: u128) -> Result<FractionalSurvey> {
    let m = n * k;
    let space = PolyIndex::space_size(m, 2, 2);
    if space > budget {
        return Err(Error::OverBudget {
            count: space,
            budget,
        });
    }
    let rows = m as usize;
    let mut out = FractionalSurvey {
        n,
        k,
        rows,
        polynomials: space as u64,
        ..Default::default()
    };
    if (k as usize) >= rows {
        return Ok(out);
    }
    let mut checker = AopChecker::new(k);
    let mut zt = ZeroTester::new(m);
    for idx in 0..space as u64 {
        let p = PolyIndex::from_index(m, 2, 2, idx);
        let f = FlooredIndex::new(p, n, k)?;
        let full = generate_array(&f, rows, rows)?;
        for cols in k as usize + 1..=rows {
            out.candidates += 1;
            let exps = (0..rows)
                .flat_map(|i| full.row(i)[..cols].to_vec())
                .collect();
            let arr = PhaseArray::from_reduced(k, rows, cols, exps);
            if !checker.condition_1(&arr).holds {
                // a failing prefix fails for every wider C too
                out.candidates += (rows - cols) as u64;
                break;
            }
            out.orthogonal_beyond_k += 1;
            let spec = BiQuadraticSpec::from_floored(&f, rows, cols)?;
            let mut dependent = false;
            'pairs: for j1 in 0..cols {
                for j2 in j1 + 1..cols {
                    if !zt.is_zero(gaussian_sum(&spec, j1, j2)?.coeffs()) {
                        dependent = true;
                        break 'pairs;
                    }
                }
            }
            if dependent {
                out.fractional_dependent += 1;
            } else if out.independent_examples.len() < 16 {
                out.independent_examples
                    .push((f.poly().coeffs().to_vec(), cols));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexfn::generate_floored_array;

    fn spec(n: u32, k: u32, a: &[i64], b: &[i64], c: &[i64], rows: usize) -> BiQuadraticSpec {
        BiQuadraticSpec::new(n, k, a.to_vec(), b.to_vec(), c.to_vec(), rows).unwrap()
    }

    fn close(a: Complex<f64>, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn zero_deltas_give_unit_gaussian() {
        let s = spec(3, 2, &[1, 1], &[2, 2], &[5, 5], 6);
        for i in 0..6 {
            let (g, _) = decompose_term::<f64>(&s, i, 0, 1).unwrap();
            assert!(close(g, 1.0, 0.0));
        }
    }

    #[test]
    fn unit_divisor_has_trivial_fractional_factor() {
        let s = spec(1, 5, &[1, 3, 2], &[0, 4, 1], &[2, 2, 0], 5);
        for i in 0..5 {
            for (j1, j2) in [(0, 1), (2, 0)] {
                let (_, f) = decompose_term::<f64>(&s, i, j1, j2).unwrap();
                assert!(close(f, 1.0, 0.0));
            }
        }
    }

    #[test]
    fn hand_evaluated_term() {
        let s = spec(2, 2, &[2, 0], &[0, 0], &[0, 0], 4);
        let (g, f) = decompose_term::<f64>(&s, 1, 0, 1).unwrap();
        assert!(close(f, 1.0, 0.0));
        assert!(close(g, -1.0, 0.0));
    }

    #[test]
    fn rejects_identical_or_out_of_range_columns() {
        let s = spec(2, 2, &[2, 0], &[0, 0], &[0, 0], 4);
        assert!(decompose_term::<f64>(&s, 0, 1, 1).is_err());
        assert!(trace_crosscorrelation::<f64>(&s, 0, 0).is_err());
        assert!(trace_crosscorrelation::<f64>(&s, 0, 2).is_err());
        assert!(BiQuadraticSpec::new(2, 2, vec![1], vec![1, 2], vec![0], 4).is_err());
    }

    #[test]
    fn shifted_agrees_at_alignment() {
        let s = spec(3, 2, &[1, 4, 2], &[5, 0, 3], &[2, 1, 1], 6);
        for i in 0..6 {
            let a = decompose_term::<f64>(&s, i, 0, 2).unwrap();
            let b = decompose_term_shifted::<f64>(&s, i, 0, 2, 0).unwrap();
            assert!((a.0 * a.1 - b.0 * b.1).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_matches_exact_kernel() {
        let s = spec(2, 3, &[1, 4, 3], &[5, 0, 2], &[2, 1, 1], 6);
        for (j1, j2) in [(0, 1), (1, 2), (2, 0)] {
            for tau in 0..6 {
                let t = trace_crosscorrelation_shifted::<f64>(&s, j1, j2, tau).unwrap();
                assert!(t.consistent);
                assert_eq!(t.terms.len(), 6);
                assert!((t.terms[5].partial - t.final_sum).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn spec_reproduces_floored_array() {
        let p = PolyIndex::new(6, 2, 2, &[1, 2, 3, 4, 5, 0, 1, 1, 2]).unwrap();
        let f = FlooredIndex::new(p, 2, 3).unwrap();
        let s = BiQuadraticSpec::from_floored(&f, 6, 6).unwrap();
        assert_eq!(
            s.generate_array(),
            generate_floored_array(&f, 6, 6).unwrap()
        );
    }

    #[test]
    fn collapse_examples() {
        let s = spec(3, 4, &[3, 6, 9], &[1, 2, 3], &[0, 0, 5], 12);
        let r = collapse_check(&s);
        assert!(r.collapsed);
        assert_eq!(r.period_k_verified, Some(true));
        assert_eq!(r.factors_checked, 3 + 3);

        let s = spec(3, 4, &[3, 1], &[0, 0], &[0, 0], 12);
        assert!(!collapse_check(&s).collapsed);

        let s = spec(1, 3, &[1, 2], &[0, 1], &[0, 0], 3);
        assert!(collapse_check(&s).collapsed);
    }

    #[test]
    fn collapse_removes_quadratic_dependence_from_fractional_factor() {
        let constrained = spec(2, 3, &[2, 4, 0], &[1, 3, 2], &[0, 1, 5], 6);
        let linear_only = spec(2, 3, &[0, 0, 0], &[1, 3, 2], &[0, 1, 5], 6);
        for i in 0..6 {
            for (j1, j2) in [(0, 1), (0, 2), (1, 2)] {
                let (_, fa) = decompose_term::<f64>(&constrained, i, j1, j2).unwrap();
                let (_, fb) = decompose_term::<f64>(&linear_only, i, j1, j2).unwrap();
                assert!((fa - fb).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_columns() {
        let s = spec(2, 2, &[1, 0], &[0, 1], &[0, 0], 4);
        let t = trace_crosscorrelation::<f64>(&s, 0, 1).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "i,gauss_re,gauss_im,frac_re,frac_im,prod_re,prod_im,partial_re,partial_im"
        );
        assert_eq!(text.lines().count(), 5);
    }
}
