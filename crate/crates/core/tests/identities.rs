use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perfseq::aop::{
    check_aop, theorem_mow_harness, theorem_projection_harness, verify_witness, AopChecker,
};
use perfseq::correlation::{
    autocorrelate, autocorrelate_2d, decomposition_check, projection_sum_check,
    projection_sum_check_rows,
};
use perfseq::cyclotomic::{CyclotomicInt, ZeroTester};
use perfseq::{Cyclotomic, PhaseArray, Profile};

fn array_strategy() -> impl Strategy<Value = PhaseArray> {
    (
        prop::sample::select(vec![2u32, 3, 4, 5, 8]),
        1usize..=6,
        1usize..=6,
    )
        .prop_flat_map(|(n, r, c)| {
            prop::collection::vec(0..n as i64, r * c)
                .prop_map(move |e| PhaseArray::new(n, r, c, e).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decomposition_identity_holds(a in array_strategy(), q in -3i64..10) {
        for rp in 0..a.cols() {
            prop_assert!(decomposition_check(&a, q, rp).unwrap());
        }
    }

    #[test]
    fn projection_identities_hold(a in array_strategy()) {
        for tau in 0..a.rows() {
            prop_assert!(projection_sum_check(&a, tau).unwrap());
        }
        for h in 0..a.cols() {
            prop_assert!(projection_sum_check_rows(&a, h).unwrap());
        }
    }

    #[test]
    fn profiles_are_hermitian(a in array_strategy()) {
        let p1: Profile = autocorrelate(&a.flatten()).unwrap();
        let p2: Profile = autocorrelate_2d(&a).unwrap();
        prop_assert!(p1.is_hermitian());
        prop_assert!(p2.is_hermitian());
        let energy = (a.rows() * a.cols()) as i64;
        prop_assert!(p1.peak().value_is(energy));
        prop_assert!(p2.peak().value_is(energy));
    }

    #[test]
    fn implications_never_falsified(a in array_strategy()) {
        prop_assert!(theorem_mow_harness(&a));
        prop_assert!(theorem_projection_harness(&a).unwrap());
    }

    #[test]
    fn aop_verdict_invariant_under_phase_shift(a in array_strategy(), k in 0i64..8) {
        let v0 = check_aop(&a);
        let v1 = check_aop(&a.shifted(k));
        prop_assert_eq!(v0.holds, v1.holds);
        prop_assert_eq!(v0.failing_condition, v1.failing_condition);
    }

    #[test]
    fn witnesses_reverify(a in array_strategy()) {
        let v = check_aop(&a);
        if let Some(w) = v.witness {
            prop_assert!(verify_witness(&a, &w).unwrap());
        } else {
            prop_assert!(v.holds);
        }
    }

    #[test]
    fn flatten_round_trip(a in array_strategy()) {
        let back = PhaseArray::unflatten(&a.flatten(), a.rows(), a.cols()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn frank_arrays_satisfy_both_harnesses() {
    for n in 2..=8u32 {
        let a = perfseq::construct::frank_array(n).unwrap();
        assert!(check_aop(&a).holds);
        assert!(theorem_projection_harness(&a).unwrap());
    }
}

/// `Σ_{t<p} ω_n^{e + t n / p}` vanishes for every prime `p | n`.
fn random_zero(rng: &mut impl Rng, n: u32) -> Cyclotomic {
    let primes: Vec<u32> = (2..=n)
        .filter(|&p| n.is_multiple_of(p) && (2..p).all(|d| p % d != 0))
        .collect();
    let mut acc = Cyclotomic::zero(n);
    for _ in 0..rng.gen_range(1..4) {
        let p = primes[rng.gen_range(0..primes.len())];
        let e = rng.gen_range(0..n as i64);
        let c = rng.gen_range(-4..=4i64);
        let mut coset = Cyclotomic::zero(n);
        for t in 0..p as i64 {
            coset.add_root(e + t * (n / p) as i64).unwrap();
        }
        let scaled = coset.mul(&Cyclotomic::from_integer(n, c)).unwrap();
        acc = acc.add(&scaled).unwrap();
    }
    acc
}

#[test]
fn exact_and_float_zero_tests_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut zeros = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=64u32);
        let x = if rng.gen_bool(0.5) {
            zeros += 1;
            let z = random_zero(&mut rng, n);
            assert!(z.is_zero(), "constructed zero not recognized: {z:?}");
            z
        } else {
            let coeffs = (0..n).map(|_| rng.gen_range(-3..=3i64)).collect();
            CyclotomicInt::from_coeffs(n, coeffs).unwrap()
        };
        assert_eq!(x.is_zero(), x.float_is_zero::<f64>(), "{x:?}");
    }
    assert!(zeros > 4000);
}

fn big_poly_divrem(num: &[BigInt], den: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() < den.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigInt::from(0); rem.len() - dd];
    for top in (dd..rem.len()).rev() {
        let c = &rem[top] / &lead;
        assert_eq!(&c * &lead, rem[top], "non-exact division");
        for (t, d) in den.iter().enumerate() {
            rem[top - dd + t] -= &c * d;
        }
        quot[top - dd] = c;
    }
    rem.truncate(dd);
    (quot, rem)
}

/// Φ_n by dividing `Xⁿ - 1` by every `Φ_d`, `d | n`, `d < n`.
fn big_cyclotomic(n: usize, memo: &mut Vec<Option<Vec<BigInt>>>) -> Vec<BigInt> {
    if let Some(p) = &memo[n] {
        return p.clone();
    }
    let mut num = vec![BigInt::from(0); n + 1];
    num[0] = BigInt::from(-1);
    num[n] = BigInt::from(1);
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = big_cyclotomic(d, memo);
            let (q, r) = big_poly_divrem(&num, &phi_d);
            assert!(r.iter().all(|c| *c == BigInt::from(0)));
            num = q;
        }
    }
    memo[n] = Some(num.clone());
    num
}

#[test]
fn coefficient_reduction_matches_bigint() {
    let mut memo = vec![None; 65];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 1..=64usize {
        let phi = big_cyclotomic(n, &mut memo);
        let ours = perfseq::cyclotomic::cyclotomic_polynomial(n as u32);
        let theirs: Vec<i64> = phi.iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(ours.coefficients(), &theirs[..], "Φ_{n}");

        let mut zt = ZeroTester::new(n as u32);
        for trial in 0..40 {
            let big = 1_000_000_000_000i64;
            let mut coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-big..=big)).collect();
            if trial % 2 == 0 {
                // multiply a random low-degree quotient by Φ_n into the
                // group ring, folding Xⁿ = 1
                let mut zero = vec![0i64; n];
                let q: Vec<i64> = (0..n - (phi.len() - 1))
                    .map(|_| rng.gen_range(-9..=9))
                    .collect();
                for (a, qa) in q.iter().enumerate() {
                    for (b, pb) in theirs.iter().enumerate() {
                        zero[(a + b) % n] += qa * pb;
                    }
                }
                coeffs = zero;
            }
            let big_coeffs: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
            let (_, rem) = big_poly_divrem(&big_coeffs, &phi);
            let oracle = rem.iter().all(|c| *c == BigInt::from(0));
            assert_eq!(zt.is_zero(&coeffs), oracle, "n = {n}, trial {trial}");
        }
    }
}

#[test]
fn checker_reuse_matches_fresh_checker() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut reused = AopChecker::new(4);
    for _ in 0..500 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let a = PhaseArray::new(4, r, c, (0..r * c).map(|_| rng.gen_range(0..4i64))).unwrap();
        assert_eq!(reused.check(&a), check_aop(&a));
    }
}
