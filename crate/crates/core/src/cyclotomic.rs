//! Exact arithmetic in `Z[ω_n]`.
//!
//! Elements are kept in the group-ring form `Σ c_e ω^e` with one coefficient
//! per exponent `e ∈ [0, n)`. Accumulating a correlation term is then a single
//! counter increment; the reduction modulo `Φ_n` only happens in the zero test.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{root_of_unity, Coeff, Real};

/// The `n`-th cyclotomic polynomial, dense, low degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicPolynomial {
    order: u32,
    coefficients: Vec<i64>,
}

impl CyclotomicPolynomial {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

fn phi_table() -> &'static RwLock<HashMap<u32, Arc<CyclotomicPolynomial>>> {
    static TABLE: OnceLock<RwLock<HashMap<u32, Arc<CyclotomicPolynomial>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Returns `Φ_n`, memoized per order.
///
/// Computed as `(X^n - 1) / Π_{d | n, d < n} Φ_d(X)` by exact division.
pub fn cyclotomic_polynomial(order: u32) -> Arc<CyclotomicPolynomial> {
    assert!(order > 0, "cyclotomic polynomial of order 0");
    if let Some(p) = phi_table().read().unwrap().get(&order) {
        return Arc::clone(p);
    }

    // divisors first, outside the write lock
    let mut quotient: Vec<i128> = vec![0; order as usize + 1];
    quotient[0] = -1;
    quotient[order as usize] = 1;
    for d in (1..order).filter(|d| order.is_multiple_of(*d)) {
        let phi_d = cyclotomic_polynomial(d);
        quotient = exact_div_monic(&quotient, phi_d.coefficients());
    }
    let coefficients = quotient
        .into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient exceeds i64"))
        .collect();
    let computed = Arc::new(CyclotomicPolynomial {
        order,
        coefficients,
    });

    let mut table = phi_table().write().unwrap();
    Arc::clone(table.entry(order).or_insert(computed))
}

fn exact_div_monic(num: &[i128], den: &[i64]) -> Vec<i128> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i128; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        if c != 0 {
            for (t, &d) in den.iter().enumerate() {
                rem[k + t] -= c * d as i128;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn totient(mut n: u32) -> u32 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Reduces `Σ counts[e] X^e` modulo `Φ_n` and reports whether the remainder
/// vanishes. Holds a scratch buffer so hot loops do not allocate.
#[derive(Clone, Debug)]
pub struct ZeroTester {
    phi: Arc<CyclotomicPolynomial>,
    scratch: Vec<i128>,
}

impl ZeroTester {
    pub fn new(order: u32) -> Self {
        Self {
            phi: cyclotomic_polynomial(order),
            scratch: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u32 {
        self.phi.order
    }

    /// `counts` must have exactly `order` entries.
    pub fn is_zero<I: Coeff>(&mut self, counts: &[I]) -> bool {
        let n = self.phi.order as usize;
        debug_assert_eq!(counts.len(), n);
        if counts.iter().all(|c| c.is_zero()) {
            return true;
        }
        for (s, c) in self.scratch.iter_mut().zip(counts) {
            *s = c.to_i128().expect("coefficient fits in i128");
        }
        let phi = &self.phi.coefficients;
        let deg = phi.len() - 1;
        for top in (deg..n).rev() {
            let c = self.scratch[top];
            if c == 0 {
                continue;
            }
            let base = top - deg;
            for (t, &p) in phi.iter().enumerate() {
                let prod = c
                    .checked_mul(p as i128)
                    .expect("overflow in cyclotomic reduction");
                self.scratch[base + t] = self.scratch[base + t]
                    .checked_sub(prod)
                    .expect("overflow in cyclotomic reduction");
            }
        }
        self.scratch[..deg].iter().all(|&r| r == 0)
    }
}

/// Element of `Z[ω_n]` in group-ring form: `coeffs[e]` counts `ω_n^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclotomicInt<I = i64> {
    order: u32,
    coeffs: Vec<I>,
}

impl<I: Coeff> CyclotomicInt<I> {
    pub fn zero(order: u32) -> Self {
        assert!(order > 0, "order must be positive");
        Self {
            order,
            coeffs: vec![I::zero(); order as usize],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::root(order, 0)
    }

    /// The rational integer `k`.
    pub fn from_integer(order: u32, k: I) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = k;
        z
    }

    /// `ω_n^e`.
    pub fn root(order: u32, e: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[e.rem_euclid(order as i64) as usize] = I::one();
        z
    }

    pub fn from_coeffs(order: u32, coeffs: Vec<I>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        if coeffs.len() != order as usize {
            return Err(Error::LengthMismatch {
                left: coeffs.len(),
                right: order as usize,
            });
        }
        Ok(Self { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[I] {
        &self.coeffs
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a.checked_add(&b).ok_or(Error::Overflow("cyclotomic add")))
            .collect::<Result<_>>()?;
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a.checked_sub(&b).ok_or(Error::Overflow("cyclotomic sub")))
            .collect::<Result<_>>()?;
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_order(other)?;
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.checked_add(&b).ok_or(Error::Overflow("cyclotomic add"))?;
        }
        Ok(())
    }

    /// Adds one copy of `ω^e` in place.
    pub fn add_root(&mut self, e: i64) -> Result<()> {
        let idx = e.rem_euclid(self.order as i64) as usize;
        self.coeffs[idx] = self.coeffs[idx]
            .checked_add(&I::one())
            .ok_or(Error::Overflow("correlation accumulation"))?;
        Ok(())
    }

    /// Multiplication by `ω^e`: a cyclic rotation of the coefficients.
    pub fn mul_root(&self, e: i64) -> Self {
        let n = self.order as usize;
        let shift = e.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![I::zero(); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[(k + shift) % n] = c;
        }
        Self {
            order: self.order,
            coeffs,
        }
    }

    /// Complex conjugation maps `ω^e` to `ω^{-e}`.
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut coeffs = vec![I::zero(); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[(n - k) % n] = c;
        }
        Self {
            order: self.order,
            coeffs,
        }
    }

    /// Group-ring product (cyclic convolution of exponents).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order as usize;
        let mut coeffs = vec![I::zero(); n];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let slot = &mut coeffs[(a + b) % n];
                let prod = ca
                    .checked_mul(&cb)
                    .ok_or(Error::Overflow("cyclotomic mul"))?;
                *slot = slot
                    .checked_add(&prod)
                    .ok_or(Error::Overflow("cyclotomic mul"))?;
            }
        }
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    /// Exact zero test: divisibility of `Σ c_e X^e` by `Φ_n`.
    pub fn is_zero(&self) -> bool {
        ZeroTester::new(self.order).is_zero(&self.coeffs)
    }

    /// Value equality in `Z[ω_n]` (as opposed to representation equality).
    pub fn value_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Whether the element equals the rational integer `k` as a value.
    pub fn value_is(&self, k: I) -> bool {
        self.value_eq(&Self::from_integer(self.order, k))
            .expect("same order")
    }

    /// Sum of absolute coefficients; the scale used by float zero tests.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }

    /// The integer value when the element is a rational integer in
    /// group-ring form (only the `ω^0` slot is occupied).
    pub fn as_integer(&self) -> Option<I> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn to_complex<F: Real>(&self) -> Complex<F> {
        let n = self.order as u64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Complex::new(F::zero(), F::zero()), |acc, (e, c)| {
                acc + root_of_unity::<F>(e as i64, n) * F::from(*c).unwrap()
            })
    }

    /// Float magnitude test at the crate's relative tolerance.
    pub fn float_is_zero<F: Real>(&self) -> bool {
        let scale = F::from(self.abs_sum()).unwrap();
        self.to_complex::<F>().norm() <= F::zero_tolerance() * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Z = CyclotomicInt<i64>;

    fn z(order: u32, c: &[i64]) -> Z {
        Z::from_coeffs(order, c.to_vec()).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(
            z(4, &[1, 0, 0, 0]).add(&z(4, &[0, 1, 0, 0])).unwrap(),
            z(4, &[1, 1, 0, 0])
        );
        let x = z(5, &[3, -1, 0, 2, 7]);
        assert_eq!(x.add(&Z::zero(5)).unwrap(), x);
        assert_eq!(z(2, &[1, 1]).add(&z(2, &[-1, -1])).unwrap(), z(2, &[0, 0]));
    }

    #[test]
    fn add_rejects_order_mismatch() {
        assert!(matches!(
            z(2, &[1, 0]).add(&z(3, &[1, 0, 0])),
            Err(Error::OrderMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn mul_root_examples() {
        assert_eq!(z(4, &[1, 0, 0, 0]).mul_root(1), z(4, &[0, 1, 0, 0]));
        let a = z(6, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(a.mul_root(6), a);
        assert_eq!(z(3, &[0, 1, 0]).mul_root(2), z(3, &[1, 0, 0]));
        assert_eq!(a.mul_root(-1), a.mul_root(5));
    }

    #[test]
    fn zero_test_examples() {
        assert!(z(2, &[1, 1]).is_zero());
        assert!(z(4, &[1, 0, 1, 0]).is_zero());
        assert!(z(3, &[1, 1, 1]).is_zero());
        assert!(!z(3, &[1, 1, 0]).is_zero());
        assert!(!z(1, &[1]).is_zero());
        assert!(z(1, &[0]).is_zero());
        // 1 + ω^2 + ω^4 vanishes for n = 6 (orbit of ω_3)
        assert!(z(6, &[1, 0, 1, 0, 1, 0]).is_zero());
        assert!(!z(6, &[1, 0, 1, 0, 0, 0]).is_zero());
    }

    #[test]
    fn zero_examples_agree_with_numeric_oracle() {
        for (n, c) in [
            (4u32, vec![1i64, 0, 1, 0]),
            (3, vec![1, 1, 1]),
            (3, vec![1, 1, 0]),
        ] {
            let x = z(n, &c);
            let mut acc = (0.0f64, 0.0f64);
            for (e, &k) in c.iter().enumerate() {
                let t = std::f64::consts::TAU * e as f64 / n as f64;
                acc.0 += k as f64 * t.cos();
                acc.1 += k as f64 * t.sin();
            }
            let numeric_zero = acc.0.hypot(acc.1) < 1e-12;
            assert_eq!(x.is_zero(), numeric_zero, "n={n} c={c:?}");
        }
    }

    #[test]
    fn to_complex_examples() {
        let i = z(4, &[0, 1, 0, 0]).to_complex::<f64>();
        assert!((i.re).abs() < 1e-15 && (i.im - 1.0).abs() < 1e-15);
        assert!(z(2, &[1, 1]).to_complex::<f64>().norm() < 1e-12);
        let one = Z::one(8).to_complex::<f64>();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let f = z(4, &[0, 1, 0, 0]).to_complex::<f32>();
        assert!((f.im - 1.0).abs() < 1e-6);
    }

    #[test]
    fn known_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).coefficients(), &[-1, 1]);
        assert_eq!(cyclotomic_polynomial(2).coefficients(), &[1, 1]);
        assert_eq!(cyclotomic_polynomial(4).coefficients(), &[1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6).coefficients(), &[1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12).coefficients(), &[1, 0, -1, 0, 1]);
        // the first order with a coefficient outside {-1, 0, 1}
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.degree(), 48);
        assert_eq!(p105.coefficients()[7], -2);
    }

    #[test]
    fn phi_is_monic_with_totient_degree() {
        for n in 1..=200 {
            let p = cyclotomic_polynomial(n);
            assert_eq!(p.degree(), totient(n) as usize, "n={n}");
            assert_eq!(*p.coefficients().last().unwrap(), 1);
        }
    }

    #[test]
    fn product_of_phi_over_divisors_is_x_n_minus_one() {
        for n in 1..=64u32 {
            let mut prod = vec![1i128];
            for d in (1..=n).filter(|d| n % d == 0) {
                let phi = cyclotomic_polynomial(d);
                let mut next = vec![0i128; prod.len() + phi.degree()];
                for (a, &pa) in prod.iter().enumerate() {
                    for (b, &pb) in phi.coefficients().iter().enumerate() {
                        next[a + b] += pa * pb as i128;
                    }
                }
                prod = next;
            }
            let mut expect = vec![0i128; n as usize + 1];
            expect[0] = -1;
            expect[n as usize] = 1;
            assert_eq!(prod, expect, "n={n}");
        }
    }

    #[test]
    fn concurrent_memo_access() {
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || cyclotomic_polynomial(300 + t % 3).degree()))
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(cyclotomic_polynomial(300).degree(), 80);
    }

    #[test]
    fn narrow_coefficients_report_overflow() {
        let a = CyclotomicInt::<i8>::from_coeffs(2, vec![100, 0]).unwrap();
        assert!(matches!(a.add(&a), Err(Error::Overflow(_))));
        let mut b = CyclotomicInt::<i8>::from_coeffs(2, vec![127, 0]).unwrap();
        assert!(b.add_root(0).is_err());
    }

    #[test]
    fn conj_and_mul() {
        let w = Z::root(5, 2);
        assert_eq!(w.mul(&w.conj()).unwrap(), Z::one(5));
        // (1 + ω)(1 + ω^3) over n = 4
        let a = z(4, &[1, 1, 0, 0]);
        let b = z(4, &[1, 0, 0, 1]);
        assert_eq!(a.mul(&b).unwrap(), z(4, &[2, 1, 0, 1]));
    }

    #[test]
    fn totient_values() {
        let expect = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (n, &t) in (1..=12).zip(expect.iter()) {
            assert_eq!(totient(n), t);
        }
    }
}
