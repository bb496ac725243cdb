//! Deterministic exhaustive enumeration over index-function and raw
//! alphabet spaces.
//!
//! The candidate space is split into fixed-size blocks in lexicographic
//! order. Block size does not depend on the worker count, workers take
//! blocks by static stride, and per-block results are merged in block order,
//! so a report is a pure function of its [`SearchSpec`].

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::aop::{check_aop, AopChecker, AopCondition};
use crate::correlation::Concordance;
use crate::error::{Error, Result};
use crate::indexfn::{generate_array, FlooredIndex, IndexFunction, PolyIndex};
use crate::quaternion::{first_off_peak_with, Convention, QuatUnit};
use crate::scatter::{collapse_check, BiQuadraticSpec};
use crate::seq::PhaseArray;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

const FN_BLOCK: u64 = 64;
const SEQ_BLOCK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Poly,
    Floored,
    RawPhase,
    RawQuaternion,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Poly => "poly",
            Family::Floored => "floored",
            Family::RawPhase => "raw-phase",
            Family::RawQuaternion => "raw-quaternion",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(Family::Poly),
            "floored" => Ok(Family::Floored),
            "raw-phase" => Ok(Family::RawPhase),
            "raw-quaternion" => Ok(Family::RawQuaternion),
            _ => Err(Error::InvalidArgument(format!(
                "unknown search family `{s}`"
            ))),
        }
    }
}

/// Coefficient subspaces a sweep may be restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    /// Floored family only: `A(j) ≡ 0 (mod n)`, where `A(j)` is the
    /// coefficient of `x²`.
    CollapseConstrained,
}

/// Residue filter `index mod count == index` on the primary enumeration
/// index, for splitting a sweep across runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: u64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub family: Family,
    /// Alphabet order (poly, raw-phase) or floor divisor (floored).
    pub n: u32,
    /// Floored family: target alphabet order.
    pub k: Option<u32>,
    pub deg_x: u32,
    pub deg_y: u32,
    pub min_r: usize,
    pub max_r: usize,
    pub min_c: usize,
    pub max_c: usize,
    /// Raw families: sequence length.
    pub length: usize,
    pub budget: u64,
    pub restriction: Option<Restriction>,
    /// Skip candidates equivalent under global phase shift (and exponent
    /// negation where it is a symmetry).
    pub symmetry: bool,
    pub shard: Option<Shard>,
    /// Tally exact-versus-float agreement for every correlation evaluated.
    pub concordance: bool,
    /// Seeds the selection of pruned candidates re-run through the full check.
    pub seed: u64,
    /// Keep at most this many hits in the report; counts stay exact.
    pub hit_limit: Option<usize>,
}

impl SearchSpec {
    fn base(family: Family, n: u32) -> Self {
        Self {
            family,
            n,
            k: None,
            deg_x: 0,
            deg_y: 0,
            min_r: 1,
            max_r: 0,
            min_c: 1,
            max_c: 0,
            length: 0,
            budget: DEFAULT_BUDGET,
            restriction: None,
            symmetry: false,
            shard: None,
            concordance: false,
            seed: 0,
            hit_limit: None,
        }
    }

    pub fn poly(
        n: u32,
        deg_x: u32,
        deg_y: u32,
        rows: (usize, usize),
        cols: (usize, usize),
    ) -> Self {
        Self {
            deg_x,
            deg_y,
            min_r: rows.0,
            max_r: rows.1,
            min_c: cols.0,
            max_c: cols.1,
            ..Self::base(Family::Poly, n)
        }
    }

    pub fn floored(
        n: u32,
        k: u32,
        deg_x: u32,
        deg_y: u32,
        rows: (usize, usize),
        cols: (usize, usize),
    ) -> Self {
        Self {
            family: Family::Floored,
            k: Some(k),
            ..Self::poly(n, deg_x, deg_y, rows, cols)
        }
    }

    pub fn raw_phase(n: u32, length: usize) -> Self {
        Self {
            length,
            ..Self::base(Family::RawPhase, n)
        }
    }

    pub fn raw_quaternion(length: usize) -> Self {
        Self {
            length,
            ..Self::base(Family::RawQuaternion, 8)
        }
    }

    fn modulus(&self) -> u32 {
        self.n * self.k.unwrap_or(1)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if self.min_r == 0 || self.min_c == 0 {
            return Err(Error::InvalidArgument("dimension ranges start at 1".into()));
        }
        match self.family {
            Family::Floored => match self.k {
                Some(0) | None => {
                    return Err(Error::InvalidArgument("floored search needs K ≥ 1".into()))
                }
                _ => {}
            },
            Family::RawPhase | Family::RawQuaternion if self.length == 0 => {
                return Err(Error::InvalidArgument("raw search needs length ≥ 1".into()))
            }
            _ => {}
        }
        if self.restriction.is_some() && self.family != Family::Floored {
            return Err(Error::InvalidArgument(
                "coefficient restriction applies to the floored family".into(),
            ));
        }
        if let Some(s) = self.shard {
            if s.count == 0 || s.index >= s.count {
                return Err(Error::InvalidArgument(format!(
                    "bad shard {}/{}",
                    s.index, s.count
                )));
            }
        }
        Ok(())
    }

    fn dims(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in self.min_r..=self.max_r {
            for c in self.min_c..=self.max_c {
                out.push((r, c));
            }
        }
        out
    }

    /// Index functions or raw sequences in the unrestricted space.
    pub fn space_size(&self) -> u128 {
        match self.family {
            Family::Poly | Family::Floored => {
                PolyIndex::space_size(self.modulus(), self.deg_x, self.deg_y)
            }
            Family::RawPhase => (self.n as u128)
                .checked_pow(self.length as u32)
                .unwrap_or(u128::MAX),
            Family::RawQuaternion => 8u128.checked_pow(self.length as u32).unwrap_or(u128::MAX),
        }
    }

    /// Candidates of the naive enumeration: index functions times
    /// dimension pairs, or raw sequences.
    pub fn candidate_count(&self) -> u128 {
        match self.family {
            Family::Poly | Family::Floored => {
                self.space_size().saturating_mul(self.dims().len() as u128)
            }
            _ => self.space_size(),
        }
    }

    /// `n²` for polynomial sweeps, `n²K²` for floored sweeps.
    pub fn length_bound(&self) -> Option<usize> {
        match self.family {
            Family::Poly | Family::Floored => Some((self.modulus() as usize).pow(2)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Candidate {
    Poly { coeffs: Vec<u32> },
    Floored { coeffs: Vec<u32> },
    Phase { exponents: Vec<u32> },
    Quaternion { symbols: Vec<QuatUnit> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlooredAnnotation {
    pub collapse_constrained: bool,
    /// Quadratic factors checked for period `K`; absent when not
    /// collapse-constrained or when `deg_x > 2`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub period_k_verified: Option<bool>,
    pub exceeds_k_squared: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub index: u64,
    pub candidate: Candidate,
    pub rows: usize,
    pub cols: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub floored: Option<FlooredAnnotation>,
    /// Raw-phase: divisors `C` of `L` whose `L/C × C` folding has AOP.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aop_divisors: Option<Vec<usize>>,
    /// Raw-quaternion: conventions under which the sequence is perfect.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conventions: Option<Vec<Convention>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub candidates: u64,
    pub skipped_by_symmetry: u64,
    pub skipped_by_restriction: u64,
    pub skipped_by_shard: u64,
    pub pruned: u64,
    pub spot_checks: u64,
    pub spot_check_mismatches: u64,
    pub condition_1_failures: u64,
    pub condition_2_failures: u64,
    pub imperfect: u64,
    pub hits: u64,
    pub bound_violations: u64,
    pub lemma_violations: u64,
    /// Raw-phase: AOP folding of a sequence that is not perfect.
    pub implication_violations: u64,
    pub hits_exceeding_k_squared: u64,
    pub hits_cols_exceeding_k: u64,
    pub perfect_right: u64,
    pub perfect_left: u64,
    pub perfect_both: u64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.candidates += o.candidates;
        self.skipped_by_symmetry += o.skipped_by_symmetry;
        self.skipped_by_restriction += o.skipped_by_restriction;
        self.skipped_by_shard += o.skipped_by_shard;
        self.pruned += o.pruned;
        self.spot_checks += o.spot_checks;
        self.spot_check_mismatches += o.spot_check_mismatches;
        self.condition_1_failures += o.condition_1_failures;
        self.condition_2_failures += o.condition_2_failures;
        self.imperfect += o.imperfect;
        self.hits += o.hits;
        self.bound_violations += o.bound_violations;
        self.lemma_violations += o.lemma_violations;
        self.implication_violations += o.implication_violations;
        self.hits_exceeding_k_squared += o.hits_exceeding_k_squared;
        self.hits_cols_exceeding_k += o.hits_cols_exceeding_k;
        self.perfect_right += o.perfect_right;
        self.perfect_left += o.perfect_left;
        self.perfect_both += o.perfect_both;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub tool_version: String,
    pub spec: SearchSpec,
    pub space_size: u128,
    pub total_candidates: u128,
    pub tally: Tally,
    /// Largest `R·C` among AOP hits (raw-phase: `L` of sequences with an AOP
    /// folding; raw-quaternion: `L` of perfect sequences).
    pub max_hit_length: usize,
    pub length_bound: Option<usize>,
    /// Hit count per `R·C`.
    pub hits_by_length: BTreeMap<usize, u64>,
    pub hits_truncated: bool,
    pub hits: Vec<Hit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub concordance: Option<ConcordanceTally>,
}

/// Serializable mirror of [`Concordance`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcordanceTally {
    pub checked: u64,
    pub disagreements: u64,
}

impl From<Concordance> for ConcordanceTally {
    fn from(c: Concordance) -> Self {
        Self {
            checked: c.checked,
            disagreements: c.disagreements,
        }
    }
}

impl SearchReport {
    /// Bound, lemma, prune or implication alarm.
    pub fn invariant_violated(&self) -> bool {
        let t = &self.tally;
        t.bound_violations > 0
            || t.lemma_violations > 0
            || t.spot_check_mismatches > 0
            || t.implication_violations > 0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    /// Re-runs every listed hit through the independent checks.
    pub fn reverify(&self) -> Result<bool> {
        let spec = &self.spec;
        for h in &self.hits {
            let ok = match &h.candidate {
                Candidate::Poly { coeffs } | Candidate::Floored { coeffs } => {
                    let p = PolyIndex::new(
                        spec.modulus(),
                        spec.deg_x,
                        spec.deg_y,
                        &coeffs.iter().map(|&c| c as i64).collect::<Vec<_>>(),
                    )?;
                    let arr = if spec.family == Family::Floored {
                        generate_array(
                            &FlooredIndex::new(p, spec.n, spec.k.unwrap_or(1))?,
                            h.rows,
                            h.cols,
                        )?
                    } else {
                        generate_array(&p, h.rows, h.cols)?
                    };
                    check_aop(&arr).holds
                }
                Candidate::Phase { exponents } => {
                    let mut checker = AopChecker::new(spec.n);
                    let divisors = aop_divisors(&mut checker, spec.n, exponents);
                    checker.is_perfect(exponents) && Some(&divisors) == h.aop_divisors.as_ref()
                }
                Candidate::Quaternion { symbols } => {
                    Some(&perfect_conventions(symbols)) == h.conventions.as_ref()
                        && !symbols.is_empty()
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub jobs: usize,
    /// Emit a progress line to standard error at this interval.
    pub progress: Option<Duration>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WorkerStats {
    pub worker: usize,
    pub blocks: u64,
    pub candidates: u64,
    pub seconds: f64,
}

/// Run accounting that varies with scheduling; kept out of the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunStats {
    pub jobs: usize,
    pub blocks: u64,
    pub wall_seconds: f64,
    pub workers: Vec<WorkerStats>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub report: SearchReport,
    pub stats: RunStats,
}

#[derive(Default)]
struct BlockResult {
    tally: Tally,
    by_length: BTreeMap<usize, u64>,
    max_hit_length: usize,
    hits: Vec<Hit>,
    concordance: Concordance,
}

impl BlockResult {
    fn hit(&mut self, h: Hit, length: usize, limit: Option<usize>) {
        self.tally.hits += 1;
        *self.by_length.entry(length).or_default() += 1;
        self.max_hit_length = self.max_hit_length.max(length);
        if limit.is_none_or(|l| self.hits.len() < l) {
            self.hits.push(h);
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn sampled(candidate: u64, seed: u64) -> bool {
    splitmix(candidate ^ splitmix(seed)).is_multiple_of(100)
}

fn digits(mut idx: u64, base: u64, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut().rev() {
        *d = (idx % base) as u32;
        idx /= base;
    }
    out
}

/// Lexicographically no greater than its negation mod `n`.
fn below_negation(v: &[u32], n: u32) -> bool {
    for &x in v {
        let neg = (n - x) % n;
        if x != neg {
            return x < neg;
        }
    }
    true
}

fn aop_divisors(checker: &mut AopChecker, n: u32, exps: &[u32]) -> Vec<usize> {
    let len = exps.len();
    (1..=len)
        .filter(|c| len.is_multiple_of(*c))
        .filter(|&c| {
            checker
                .check(&PhaseArray::from_reduced(n, len / c, c, exps.to_vec()))
                .holds
        })
        .collect()
}

fn perfect_conventions(units: &[QuatUnit]) -> Vec<Convention> {
    Convention::BOTH
        .into_iter()
        .filter(|&c| first_off_peak_with(units, c).is_none())
        .collect()
}

struct Ctx<'a> {
    spec: &'a SearchSpec,
    dims: Vec<(usize, usize)>,
    units: u64,
    block: u64,
}

fn make_checker(spec: &SearchSpec, order: u32) -> AopChecker {
    let c = AopChecker::new(order);
    if spec.concordance {
        c.with_concordance()
    } else {
        c
    }
}

fn run_block(ctx: &Ctx<'_>, b: u64) -> Result<BlockResult> {
    let spec = ctx.spec;
    let start = b * ctx.block;
    let end = (start + ctx.block).min(ctx.units);
    let mut out = BlockResult::default();
    let order = match spec.family {
        Family::Floored => spec.k.unwrap_or(1),
        _ => spec.n,
    };
    let mut checker = make_checker(spec, order);
    for idx in start..end {
        if let Some(s) = spec.shard {
            if idx % s.count != s.index {
                out.tally.skipped_by_shard += 1;
                continue;
            }
        }
        match spec.family {
            Family::Poly => {
                let p = PolyIndex::from_index(spec.n, spec.deg_x, spec.deg_y, idx);
                if spec.symmetry && !(p.coeffs()[0] == 0 && below_negation(p.coeffs(), spec.n)) {
                    out.tally.skipped_by_symmetry += 1;
                    continue;
                }
                let coeffs = p.coeffs().to_vec();
                eval_index_fn(
                    ctx,
                    &mut checker,
                    &mut out,
                    idx,
                    &p,
                    || Candidate::Poly {
                        coeffs: coeffs.clone(),
                    },
                    |_, _| None,
                )?;
            }
            Family::Floored => {
                let k = spec.k.unwrap_or(1);
                let p = PolyIndex::from_index(spec.modulus(), spec.deg_x, spec.deg_y, idx);
                if spec.symmetry && p.coeffs()[0] >= spec.n {
                    out.tally.skipped_by_symmetry += 1;
                    continue;
                }
                let f = FlooredIndex::new(p, spec.n, k)?;
                let collapsed = f.quadratic_collapses();
                if spec.restriction == Some(Restriction::CollapseConstrained) && !collapsed {
                    out.tally.skipped_by_restriction += 1;
                    continue;
                }
                let coeffs = f.poly().coeffs().to_vec();
                let annotate = |r: usize, c: usize| {
                    let period_k_verified = if collapsed && spec.deg_x <= 2 {
                        BiQuadraticSpec::from_floored(&f, r, c)
                            .ok()
                            .and_then(|s| collapse_check(&s).period_k_verified)
                    } else {
                        None
                    };
                    Some(FlooredAnnotation {
                        collapse_constrained: collapsed,
                        period_k_verified,
                        exceeds_k_squared: r * c > (k as usize).pow(2),
                    })
                };
                eval_index_fn(
                    ctx,
                    &mut checker,
                    &mut out,
                    idx,
                    &f,
                    || Candidate::Floored {
                        coeffs: coeffs.clone(),
                    },
                    annotate,
                )?;
            }
            Family::RawPhase => {
                let exps = digits(idx, spec.n as u64, spec.length);
                if spec.symmetry && !(exps[0] == 0 && below_negation(&exps, spec.n)) {
                    out.tally.skipped_by_symmetry += 1;
                    continue;
                }
                out.tally.candidates += 1;
                let perfect = checker.is_perfect(&exps);
                let divisors = aop_divisors(&mut checker, spec.n, &exps);
                if !divisors.is_empty() && !perfect {
                    out.tally.implication_violations += 1;
                }
                if perfect {
                    let len = if divisors.is_empty() { 0 } else { spec.length };
                    let h = Hit {
                        index: idx,
                        candidate: Candidate::Phase { exponents: exps },
                        rows: spec.length,
                        cols: 1,
                        floored: None,
                        aop_divisors: Some(divisors),
                        conventions: None,
                    };
                    out.hit(h, len, spec.hit_limit);
                } else {
                    out.tally.imperfect += 1;
                }
            }
            Family::RawQuaternion => {
                out.tally.candidates += 1;
                let units: Vec<QuatUnit> = digits(idx, 8, spec.length)
                    .into_iter()
                    .map(|d| QuatUnit::from_code(d as u8))
                    .collect();
                let conv = perfect_conventions(&units);
                let right = conv.contains(&Convention::Right);
                let left = conv.contains(&Convention::Left);
                out.tally.perfect_right += right as u64;
                out.tally.perfect_left += left as u64;
                out.tally.perfect_both += (right && left) as u64;
                if conv.is_empty() {
                    out.tally.imperfect += 1;
                    continue;
                }
                let h = Hit {
                    index: idx,
                    candidate: Candidate::Quaternion { symbols: units },
                    rows: spec.length,
                    cols: 1,
                    floored: None,
                    aop_divisors: None,
                    conventions: Some(conv),
                };
                out.hit(h, spec.length, spec.hit_limit);
            }
        }
    }
    if let Some(c) = checker.concordance() {
        out.concordance = c;
    }
    Ok(out)
}

fn eval_index_fn<F: IndexFunction>(
    ctx: &Ctx<'_>,
    checker: &mut AopChecker,
    out: &mut BlockResult,
    idx: u64,
    f: &F,
    candidate: impl Fn() -> Candidate,
    annotate: impl Fn(usize, usize) -> Option<FlooredAnnotation>,
) -> Result<()> {
    let spec = ctx.spec;
    let order = f.alphabet_order();
    let (mr, mc) = (spec.max_r, spec.max_c);
    let table = generate_array(f, mr, mc)?;
    let t = table.exponents();
    let period = f.period() as usize;
    let bound = spec.length_bound();
    let k = spec.k.unwrap_or(spec.n) as usize;
    for (d, &(r, c)) in ctx.dims.iter().enumerate() {
        out.tally.candidates += 1;
        let cand = idx * ctx.dims.len() as u64 + d as u64;
        let slice = || {
            let mut e = Vec::with_capacity(r * c);
            for i in 0..r {
                e.extend_from_slice(&t[i * mc..i * mc + c]);
            }
            PhaseArray::from_reduced(order, r, c, e)
        };
        if c > period {
            // columns 0 and P coincide, and a nonzero column is not
            // orthogonal to itself
            if (0..r).all(|i| t[i * mc] == t[i * mc + period]) {
                out.tally.pruned += 1;
                out.tally.condition_1_failures += 1;
                if sampled(cand, spec.seed) {
                    out.tally.spot_checks += 1;
                    let v = checker.check(&slice());
                    if v.holds || v.failing_condition != Some(AopCondition::ColumnOrthogonality) {
                        out.tally.spot_check_mismatches += 1;
                    }
                }
                continue;
            }
            out.tally.lemma_violations += 1;
        }
        let v = checker.check(&slice());
        match v.failing_condition {
            Some(AopCondition::ColumnOrthogonality) => out.tally.condition_1_failures += 1,
            Some(AopCondition::Complementarity) => out.tally.condition_2_failures += 1,
            None => {
                let len = r * c;
                if bound.is_some_and(|b| len > b) {
                    out.tally.bound_violations += 1;
                }
                if spec.family == Family::Floored {
                    out.tally.hits_exceeding_k_squared += (len > k * k) as u64;
                    out.tally.hits_cols_exceeding_k += (c > k) as u64;
                }
                let h = Hit {
                    index: idx,
                    candidate: candidate(),
                    rows: r,
                    cols: c,
                    floored: annotate(r, c),
                    aop_divisors: None,
                    conventions: None,
                };
                out.hit(h, len, spec.hit_limit);
            }
        }
    }
    Ok(())
}

type WorkerOutput = (Vec<(u64, BlockResult)>, WorkerStats);

/// Runs any family.
pub fn run(spec: &SearchSpec, opts: &RunOptions) -> Result<SearchOutcome> {
    spec.validate()?;
    let total = spec.candidate_count();
    if total > spec.budget as u128 {
        return Err(Error::OverBudget {
            count: total,
            budget: spec.budget as u128,
        });
    }
    let dims = spec.dims();
    let index_family = matches!(spec.family, Family::Poly | Family::Floored);
    let units = if index_family && dims.is_empty() {
        0
    } else {
        spec.space_size() as u64
    };
    let ctx = Ctx {
        spec,
        dims,
        units,
        block: if index_family { FN_BLOCK } else { SEQ_BLOCK },
    };
    let nblocks = units.div_ceil(ctx.block);
    let jobs = opts.jobs.max(1);
    let started = Instant::now();
    let done = AtomicU64::new(0);

    let per_worker: Vec<Result<WorkerOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let ctx = &ctx;
                let done = &done;
                s.spawn(move || {
                    let t0 = Instant::now();
                    let mut results = Vec::new();
                    let mut stats = WorkerStats {
                        worker: w,
                        blocks: 0,
                        candidates: 0,
                        seconds: 0.0,
                    };
                    let mut b = w as u64;
                    while b < nblocks {
                        let r = run_block(ctx, b)?;
                        stats.blocks += 1;
                        stats.candidates += r.tally.candidates;
                        results.push((b, r));
                        done.fetch_add(1, Ordering::Relaxed);
                        b += jobs as u64;
                    }
                    stats.seconds = t0.elapsed().as_secs_f64();
                    Ok((results, stats))
                })
            })
            .collect();
        if let Some(interval) = opts.progress {
            let mut last = Instant::now();
            while !handles.iter().all(|h| h.is_finished()) {
                std::thread::sleep(interval.min(Duration::from_millis(50)));
                if last.elapsed() >= interval {
                    last = Instant::now();
                    eprintln!(
                        "search {}: {}/{} blocks, {:.1}s",
                        spec.family,
                        done.load(Ordering::Relaxed),
                        nblocks,
                        started.elapsed().as_secs_f64()
                    );
                }
            }
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });

    let mut blocks: Vec<(u64, BlockResult)> = Vec::with_capacity(nblocks as usize);
    let mut workers = Vec::with_capacity(jobs);
    for r in per_worker {
        let (res, stats) = r?;
        blocks.extend(res);
        workers.push(stats);
    }
    blocks.sort_by_key(|(b, _)| *b);

    let mut tally = Tally::default();
    let mut by_length = BTreeMap::new();
    let mut max_hit_length = 0;
    let mut hits = Vec::new();
    let mut conc = Concordance::default();
    let mut truncated = false;
    for (_, r) in blocks {
        tally.merge(&r.tally);
        for (l, c) in r.by_length {
            *by_length.entry(l).or_insert(0) += c;
        }
        max_hit_length = max_hit_length.max(r.max_hit_length);
        conc.merge(&r.concordance);
        for h in r.hits {
            if spec.hit_limit.is_none_or(|l| hits.len() < l) {
                hits.push(h);
            } else {
                truncated = true;
            }
        }
    }
    if tally.hits > hits.len() as u64 {
        truncated = true;
    }

    let report = SearchReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        space_size: spec.space_size(),
        total_candidates: total,
        tally,
        max_hit_length,
        length_bound: spec.length_bound(),
        hits_by_length: by_length,
        hits_truncated: truncated,
        hits,
        concordance: spec.concordance.then(|| conc.into()),
    };
    let stats = RunStats {
        jobs,
        blocks: nblocks,
        wall_seconds: started.elapsed().as_secs_f64(),
        workers,
    };
    Ok(SearchOutcome { report, stats })
}

fn expect_family(spec: &SearchSpec, ok: &[Family]) -> Result<()> {
    if ok.contains(&spec.family) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "family {} not accepted here",
            spec.family
        )))
    }
}

pub fn enumerate_poly(spec: &SearchSpec, opts: &RunOptions) -> Result<SearchOutcome> {
    expect_family(spec, &[Family::Poly])?;
    run(spec, opts)
}

pub fn enumerate_floored(spec: &SearchSpec, opts: &RunOptions) -> Result<SearchOutcome> {
    expect_family(spec, &[Family::Floored])?;
    run(spec, opts)
}

pub fn enumerate_raw(spec: &SearchSpec, opts: &RunOptions) -> Result<SearchOutcome> {
    expect_family(spec, &[Family::RawPhase, Family::RawQuaternion])?;
    run(spec, opts)
}
