//! Array Orthogonality Property verification and perfection predicates.
//!
//! Condition 1: distinct columns are orthogonal at every cyclic shift.
//! Condition 2: column autocorrelations sum to zero at every off-peak shift.
//! Condition 1 is evaluated first; witnesses come from a lexicographic scan
//! so reports do not depend on evaluation order.

use num_complex::Complex;
use serde::Serialize;

use crate::correlation::{
    autocorrelate_2d, autocorrelate_projection, column_crosscorrelation, Concordance,
};
use crate::cyclotomic::{CyclotomicInt, ZeroTester};
use crate::error::Result;
use crate::scalar::{root_of_unity, Coeff};
use crate::seq::{PhaseArray, PhaseSequence, ProjectionSequence};
use crate::{Complex64, Cyclotomic, Profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AopCondition {
    #[serde(rename = "condition-1")]
    ColumnOrthogonality,
    #[serde(rename = "condition-2")]
    Complementarity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `θ_{S[j0],S[j1]}(shift) = value ≠ 0`.
    ColumnPair {
        j0: usize,
        j1: usize,
        shift: usize,
        value: Cyclotomic,
    },
    /// `Σ_j θ_{S[j]}(shift) = value ≠ 0`, or an off-peak autocorrelation.
    Shift { shift: usize, value: Cyclotomic },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AopVerdict {
    pub holds: bool,
    pub failing_condition: Option<AopCondition>,
    pub witness: Option<Witness>,
    pub divisor: usize,
}

impl AopVerdict {
    fn pass(divisor: usize) -> Self {
        Self {
            holds: true,
            failing_condition: None,
            witness: None,
            divisor,
        }
    }

    fn fail(divisor: usize, cond: AopCondition, witness: Witness) -> Self {
        Self {
            holds: false,
            failing_condition: Some(cond),
            witness: Some(witness),
            divisor,
        }
    }
}

/// Reusable exact checker. Keeps the zero tester, a counter buffer, and
/// optionally an exact-versus-float concordance tally.
#[derive(Clone, Debug)]
pub struct AopChecker {
    order: u32,
    zt: ZeroTester,
    counts: Vec<i64>,
    float: Option<(Vec<Complex64>, Concordance)>,
}

impl AopChecker {
    pub fn new(order: u32) -> Self {
        Self {
            order,
            zt: ZeroTester::new(order),
            counts: vec![0; order as usize],
            float: None,
        }
    }

    /// Also sums every correlation in floating point and tallies agreement
    /// with the exact verdict.
    pub fn with_concordance(mut self) -> Self {
        let table = (0..self.order)
            .map(|e| root_of_unity::<f64>(e as i64, self.order as u64))
            .collect();
        self.float = Some((table, Concordance::default()));
        self
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn concordance(&self) -> Option<Concordance> {
        self.float.as_ref().map(|(_, c)| *c)
    }

    #[inline]
    fn reset(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    /// Exact zero test on the current counts. `terms` is how many unimodular
    /// terms went into `float_sum`.
    fn settle(&mut self, terms: usize, float_sum: Complex64) -> bool {
        let exact = self.zt.is_zero(&self.counts);
        if let Some((_, conc)) = self.float.as_mut() {
            conc.record(exact, float_sum, terms as f64);
        }
        exact
    }

    fn value(&self) -> Cyclotomic {
        CyclotomicInt::from_coeffs(self.order, self.counts.clone()).expect("counts sized to order")
    }

    #[inline]
    fn push(&mut self, a: u32, b: u32, fsum: &mut Complex64) {
        let n = self.order;
        let d = if a >= b { a - b } else { a + n - b } as usize;
        self.counts[d] += 1;
        if let Some((table, _)) = &self.float {
            *fsum += table[d];
        }
    }

    pub fn condition_1(&mut self, a: &PhaseArray) -> AopVerdict {
        debug_assert_eq!(a.order(), self.order);
        let (rows, cols) = (a.rows(), a.cols());
        // θ_{b,a}(τ) is the conjugate of θ_{a,b}(-τ), so scanning j0 < j1 gives
        // the same verdict and the same first witness as scanning all j0 ≠ j1.
        for j0 in 0..cols {
            for j1 in j0 + 1..cols {
                for tau in 0..rows {
                    self.reset();
                    let mut fsum = Complex::new(0.0, 0.0);
                    for q in 0..rows {
                        self.push(a.get(q, j0), a.get((q + tau) % rows, j1), &mut fsum);
                    }
                    if !self.settle(rows, fsum) {
                        let value = self.value();
                        return AopVerdict::fail(
                            cols,
                            AopCondition::ColumnOrthogonality,
                            Witness::ColumnPair {
                                j0,
                                j1,
                                shift: tau,
                                value,
                            },
                        );
                    }
                }
            }
        }
        AopVerdict::pass(cols)
    }

    pub fn condition_2(&mut self, a: &PhaseArray) -> AopVerdict {
        debug_assert_eq!(a.order(), self.order);
        let (rows, cols) = (a.rows(), a.cols());
        for tau in 1..rows {
            self.reset();
            let mut fsum = Complex::new(0.0, 0.0);
            for j in 0..cols {
                for q in 0..rows {
                    self.push(a.get(q, j), a.get((q + tau) % rows, j), &mut fsum);
                }
            }
            if !self.settle(rows * cols, fsum) {
                let value = self.value();
                return AopVerdict::fail(
                    cols,
                    AopCondition::Complementarity,
                    Witness::Shift { shift: tau, value },
                );
            }
        }
        AopVerdict::pass(cols)
    }

    pub fn check(&mut self, a: &PhaseArray) -> AopVerdict {
        let v = self.condition_1(a);
        if !v.holds {
            return v;
        }
        self.condition_2(a)
    }

    /// First off-peak shift with nonzero autocorrelation, with its value.
    pub fn off_peak_witness(&mut self, exps: &[u32]) -> Option<(usize, Cyclotomic)> {
        let len = exps.len();
        for tau in 1..len {
            self.reset();
            let mut fsum = Complex::new(0.0, 0.0);
            for i in 0..len {
                self.push(exps[i], exps[(i + tau) % len], &mut fsum);
            }
            if !self.settle(len, fsum) {
                return Some((tau, self.value()));
            }
        }
        None
    }

    pub fn is_perfect(&mut self, exps: &[u32]) -> bool {
        self.off_peak_witness(exps).is_none()
    }
}

pub fn check_condition_1(a: &PhaseArray) -> AopVerdict {
    AopChecker::new(a.order()).condition_1(a)
}

pub fn check_condition_2(a: &PhaseArray) -> AopVerdict {
    AopChecker::new(a.order()).condition_2(a)
}

pub fn check_aop(a: &PhaseArray) -> AopVerdict {
    AopChecker::new(a.order()).check(a)
}

pub fn is_perfect_sequence(s: &PhaseSequence) -> bool {
    AopChecker::new(s.order()).is_perfect(s.exponents())
}

/// Perfection verdict for a sequence as a whole, with a witness shift.
pub fn sequence_witness(s: &PhaseSequence) -> Option<Witness> {
    AopChecker::new(s.order())
        .off_peak_witness(s.exponents())
        .map(|(shift, value)| Witness::Shift { shift, value })
}

/// Re-derives a witness through the general correlation kernels and checks
/// that it names a nonzero value equal to the one reported.
pub fn verify_witness(a: &PhaseArray, w: &Witness) -> Result<bool> {
    let recomputed: Cyclotomic = match *w {
        Witness::ColumnPair { j0, j1, shift, .. } => column_crosscorrelation(a, j0, j1, shift)?,
        Witness::Shift { shift, .. } => {
            let mut acc = Cyclotomic::zero(a.order());
            for j in 0..a.cols() {
                acc.add_assign(&column_crosscorrelation(a, j, j, shift)?)?;
            }
            acc
        }
    };
    let reported = match w {
        Witness::ColumnPair { value, .. } | Witness::Shift { value, .. } => value,
    };
    Ok(!recomputed.is_zero() && recomputed.value_eq(reported)?)
}

/// Outcome of testing a projection for perfection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionVerdict<I: Coeff = i64> {
    /// Every off-peak autocorrelation is zero.
    pub perfect: bool,
    /// The projection is identically zero (peak 0).
    pub degenerate: bool,
    pub peak: CyclotomicInt<I>,
    pub first_failure: Option<usize>,
}

pub fn classify_projection<I: Coeff>(r: &ProjectionSequence<I>) -> Result<ProjectionVerdict<I>> {
    let prof = autocorrelate_projection(r)?;
    let first_failure = prof.first_nonzero_off_peak();
    Ok(ProjectionVerdict {
        perfect: first_failure.is_none(),
        degenerate: r.values().iter().all(CyclotomicInt::is_zero),
        peak: prof.peak().clone(),
        first_failure,
    })
}

/// Perfection over cyclotomic-integer values. An all-zero projection counts
/// as perfect here; [`classify_projection`] flags it as degenerate.
pub fn is_perfect_projection<I: Coeff>(r: &ProjectionSequence<I>) -> Result<bool> {
    Ok(classify_projection(r)?.perfect)
}

/// AOP implies perfection of the flattened sequence. Returns the truth of
/// the implication.
pub fn theorem_mow_harness(a: &PhaseArray) -> bool {
    !check_aop(a).holds || is_perfect_sequence(&a.flatten())
}

/// If the 2D autocorrelation is perfect, both projections are perfect,
/// non-degenerate, and their peaks equal `θ_S(0,0) = RC`.
pub fn theorem_projection_harness(a: &PhaseArray) -> Result<bool> {
    let prof: Profile = autocorrelate_2d(a)?;
    if !prof.is_perfect() {
        return Ok(true);
    }
    let energy = Cyclotomic::from_integer(a.order(), (a.rows() * a.cols()) as i64);
    let peak2d = prof.peak();
    for axis in [
        crate::ProjectionAxis::ColumnSum,
        crate::ProjectionAxis::RowSum,
    ] {
        let v = classify_projection(&a.project::<i64>(axis)?)?;
        if !v.perfect || v.degenerate || !v.peak.value_eq(peak2d)? || !v.peak.value_eq(&energy)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{autocorrelate, crosscorrelate};

    fn arr(order: u32, rows: &[Vec<i64>]) -> PhaseArray {
        PhaseArray::from_rows(order, rows).unwrap()
    }

    fn frank2() -> PhaseArray {
        arr(2, &[vec![0, 0], vec![0, 1]])
    }

    #[test]
    fn condition_1_examples() {
        // oracle: every column cross-correlation through the general kernel
        let f = frank2();
        let c0 = PhaseSequence::new(2, f.column(0).iter().map(|&e| e as i64)).unwrap();
        let c1 = PhaseSequence::new(2, f.column(1).iter().map(|&e| e as i64)).unwrap();
        let p: Profile = crosscorrelate(&c0, &c1).unwrap();
        assert!(p.values().iter().all(CyclotomicInt::is_zero));
        assert!(check_condition_1(&f).holds);

        let dup = arr(2, &[vec![0, 0], vec![0, 0]]);
        let v = check_condition_1(&dup);
        assert!(!v.holds);
        assert_eq!(v.failing_condition, Some(AopCondition::ColumnOrthogonality));
        match v.witness.as_ref().unwrap() {
            Witness::ColumnPair {
                j0,
                j1,
                shift,
                value,
            } => {
                assert_eq!((*j0, *j1, *shift), (0, 1, 0));
                assert_eq!(value.as_integer(), Some(2));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(verify_witness(&dup, v.witness.as_ref().unwrap()).unwrap());

        let single = PhaseArray::new(3, 4, 1, [0i64, 1, 2, 2]).unwrap();
        assert!(check_condition_1(&single).holds);
    }

    #[test]
    fn condition_2_examples() {
        // θ_c0(1) + θ_c1(1) = 2 + (-2)
        let f = frank2();
        let c0: Profile = autocorrelate(&PhaseSequence::new(2, [0i64, 0]).unwrap()).unwrap();
        let c1: Profile = autocorrelate(&PhaseSequence::new(2, [0i64, 1]).unwrap()).unwrap();
        assert_eq!(c0.at(1).to_complex::<f64>().re, 2.0);
        assert_eq!(c1.at(1).to_complex::<f64>().re, -2.0);
        assert!(check_condition_2(&f).holds);

        let row = PhaseArray::new(4, 1, 3, [0i64, 1, 3]).unwrap();
        assert!(check_condition_2(&row).holds);

        let flat = arr(2, &[vec![0, 0], vec![0, 0]]);
        let v = check_condition_2(&flat);
        assert_eq!(v.failing_condition, Some(AopCondition::Complementarity));
        match v.witness.as_ref().unwrap() {
            Witness::Shift { shift, value } => {
                assert_eq!(*shift, 1);
                assert_eq!(value.as_integer(), Some(4));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(verify_witness(&flat, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn check_aop_combines_in_order() {
        assert!(check_aop(&frank2()).holds);
        let v = check_aop(&arr(2, &[vec![0, 0], vec![0, 0]]));
        assert_eq!(v.failing_condition, Some(AopCondition::ColumnOrthogonality));
        assert_eq!(v.divisor, 2);
        // columns orthogonal but not complementary: a single column fails only condition 2
        let v = check_aop(&PhaseArray::new(2, 2, 1, [0i64, 0]).unwrap());
        assert_eq!(v.failing_condition, Some(AopCondition::Complementarity));
        assert!(v.holds == v.failing_condition.is_none());
    }

    #[test]
    fn perfection_examples() {
        assert!(is_perfect_sequence(
            &PhaseSequence::new(2, [0i64, 0, 0, 1]).unwrap()
        ));
        let c = PhaseSequence::new(2, [0i64, 0]).unwrap();
        assert!(!is_perfect_sequence(&c));
        match sequence_witness(&c).unwrap() {
            Witness::Shift { shift, value } => {
                assert_eq!(shift, 1);
                assert_eq!(value.as_integer(), Some(2));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(is_perfect_sequence(&PhaseSequence::new(5, [3i64]).unwrap()));
    }

    #[test]
    fn projection_perfection_examples() {
        let r = frank2().column_sum::<i64>().unwrap();
        assert!(is_perfect_projection(&r).unwrap());
        let v = classify_projection(&r).unwrap();
        assert!(!v.degenerate);
        assert!(v.peak.value_is(4));

        let flat = PhaseArray::new(3, 3, 2, vec![0i64; 6]).unwrap();
        assert!(!is_perfect_projection(&flat.column_sum::<i64>().unwrap()).unwrap());

        let zeros = ProjectionSequence::new(2, vec![Cyclotomic::zero(2); 3]).unwrap();
        let v = classify_projection(&zeros).unwrap();
        assert!(v.perfect && v.degenerate);
        assert!(v.peak.is_zero());
    }

    #[test]
    fn harness_examples() {
        assert!(theorem_mow_harness(&frank2()));
        assert!(theorem_mow_harness(&arr(2, &[vec![0, 0], vec![0, 0]])));
        assert!(theorem_projection_harness(&frank2()).unwrap());
        assert!(
            theorem_projection_harness(&PhaseArray::new(3, 2, 2, vec![0i64; 4]).unwrap()).unwrap()
        );
        assert!(theorem_projection_harness(&PhaseArray::new(3, 1, 1, [2i64]).unwrap()).unwrap());
    }

    #[test]
    fn concordance_tracks_every_zero_test() {
        let mut ch = AopChecker::new(2).with_concordance();
        assert!(ch.check(&frank2()).holds);
        let c = ch.concordance().unwrap();
        // condition 1: one pair, two shifts; condition 2: one shift
        assert_eq!(c.checked, 3);
        assert_eq!(c.disagreements, 0);
    }

    #[test]
    fn global_phase_shift_leaves_verdicts_unchanged() {
        let a = arr(3, &[vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 1]]);
        for k in 0..3 {
            let b = a.shifted(k);
            assert_eq!(check_aop(&a), check_aop(&b));
        }
        let bad = arr(4, &[vec![0, 1], vec![3, 3]]);
        assert_eq!(check_aop(&bad), check_aop(&bad.shifted(3)));
    }
}
