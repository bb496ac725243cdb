//! Bivariate polynomial index functions and their floored-rational form.
//!
//! A [`PolyIndex`] assigns cell `(i, j)` the exponent `p(i, j) mod m`.
//! A [`FlooredIndex`] wraps a polynomial with modulus `nK` and assigns
//! `⌊(p(i, j) mod nK) / n⌋`, an exponent over an alphabet of order `K`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::PhaseArray;

/// Anything that assigns a phase exponent to an array cell.
pub trait IndexFunction {
    /// Alphabet order of the generated exponents.
    fn alphabet_order(&self) -> u32;
    /// Period of the generated array along both axes.
    fn period(&self) -> u32;
    /// Exponent for cell `(i, j)`, in `[0, alphabet_order)`.
    fn phase(&self, i: i64, j: i64) -> u32;
}

/// `p(x, y) = Σ c_{a,b} x^a y^b` with coefficients reduced mod `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyIndex {
    modulus: u32,
    deg_x: u32,
    deg_y: u32,
    /// Dense, `coeffs[a * (deg_y + 1) + b]` multiplies `x^a y^b`.
    coeffs: Vec<u32>,
}

impl PolyIndex {
    /// `coeffs` is dense with layout `a * (deg_y + 1) + b`.
    pub fn new(modulus: u32, deg_x: u32, deg_y: u32, coeffs: &[i64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let want = ((deg_x + 1) * (deg_y + 1)) as usize;
        if coeffs.len() != want {
            return Err(Error::LengthMismatch {
                left: coeffs.len(),
                right: want,
            });
        }
        Ok(Self {
            modulus,
            deg_x,
            deg_y,
            coeffs: coeffs
                .iter()
                .map(|c| c.rem_euclid(modulus as i64) as u32)
                .collect(),
        })
    }

    /// Sparse constructor from `((a, b), c)` terms; degree caps are the
    /// largest exponents present.
    pub fn from_terms(modulus: u32, terms: &[((u32, u32), i64)]) -> Result<Self> {
        let deg_x = terms.iter().map(|t| t.0 .0).max().unwrap_or(0);
        let deg_y = terms.iter().map(|t| t.0 .1).max().unwrap_or(0);
        let mut dense = vec![0i64; ((deg_x + 1) * (deg_y + 1)) as usize];
        for &((a, b), c) in terms {
            dense[(a * (deg_y + 1) + b) as usize] += c;
        }
        Self::new(modulus, deg_x, deg_y, &dense)
    }

    /// The `index`-th polynomial in lexicographic order of the dense
    /// coefficient vector (first coefficient most significant).
    pub fn from_index(modulus: u32, deg_x: u32, deg_y: u32, mut index: u64) -> Self {
        let len = ((deg_x + 1) * (deg_y + 1)) as usize;
        let mut coeffs = vec![0u32; len];
        for slot in coeffs.iter_mut().rev() {
            *slot = (index % modulus as u64) as u32;
            index /= modulus as u64;
        }
        Self {
            modulus,
            deg_x,
            deg_y,
            coeffs,
        }
    }

    /// Number of distinct reduced polynomials under the given caps.
    pub fn space_size(modulus: u32, deg_x: u32, deg_y: u32) -> u128 {
        (modulus as u128).pow((deg_x + 1) * (deg_y + 1))
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.deg_x, self.deg_y)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, a: u32, b: u32) -> u32 {
        if a > self.deg_x || b > self.deg_y {
            return 0;
        }
        self.coeffs[(a * (self.deg_y + 1) + b) as usize]
    }

    /// `p(i, j) mod modulus`, Horner in both variables, reducing after
    /// every step. The inputs themselves are not pre-reduced.
    pub fn eval(&self, i: i64, j: i64) -> u32 {
        let m = self.modulus as i128;
        let (i, j) = (i as i128, j as i128);
        let stride = (self.deg_y + 1) as usize;
        let mut acc = 0i128;
        for a in (0..=self.deg_x as usize).rev() {
            let row = &self.coeffs[a * stride..(a + 1) * stride];
            let mut inner = 0i128;
            for &c in row.iter().rev() {
                inner = (inner * j + c as i128).rem_euclid(m);
            }
            acc = (acc * i + inner).rem_euclid(m);
        }
        acc as u32
    }

    /// `A(j) = Σ_b c_{a,b} j^b mod modulus`: the coefficient of `x^a` as a
    /// polynomial in `j`.
    pub fn x_coefficient_at(&self, a: u32, j: i64) -> u32 {
        if a > self.deg_x {
            return 0;
        }
        let m = self.modulus as u64;
        let ju = j.rem_euclid(m as i64) as u64;
        let stride = (self.deg_y + 1) as usize;
        let row = &self.coeffs[a as usize * stride..(a as usize + 1) * stride];
        row.iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * ju + c as u64) % m) as u32
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }
}

impl IndexFunction for PolyIndex {
    fn alphabet_order(&self) -> u32 {
        self.modulus
    }

    fn period(&self) -> u32 {
        self.modulus
    }

    fn phase(&self, i: i64, j: i64) -> u32 {
        self.eval(i, j)
    }
}

/// `S_{i,j} = ω_K^{⌊p(i,j)/n⌋}` with `p` taken in `[0, nK)` before the floor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlooredIndex {
    poly: PolyIndex,
    divisor: u32,
    base_order: u32,
}

impl FlooredIndex {
    pub fn new(poly: PolyIndex, divisor: u32, base_order: u32) -> Result<Self> {
        if divisor == 0 || base_order == 0 {
            return Err(Error::InvalidArgument("n and K must be positive".into()));
        }
        if poly.modulus != divisor * base_order {
            return Err(Error::InvalidArgument(format!(
                "floored index needs modulus nK = {}, got {}",
                divisor * base_order,
                poly.modulus
            )));
        }
        Ok(Self {
            poly,
            divisor,
            base_order,
        })
    }

    pub fn poly(&self) -> &PolyIndex {
        &self.poly
    }

    pub fn divisor(&self) -> u32 {
        self.divisor
    }

    pub fn base_order(&self) -> u32 {
        self.base_order
    }

    /// The canonical representative of `p(i, j)` in `[0, nK)`.
    pub fn representative(&self, i: i64, j: i64) -> u32 {
        self.poly.eval(i, j)
    }

    /// `A(j) ≡ 0 (mod n)` for every integer `j`. `A(j) mod n` has period `n`
    /// in `j`, so checking `j ∈ [0, n)` settles all `j`.
    pub fn quadratic_collapses(&self) -> bool {
        let n = self.divisor;
        (0..n as i64).all(|j| self.poly.x_coefficient_at(2, j).is_multiple_of(n))
    }
}

impl IndexFunction for FlooredIndex {
    fn alphabet_order(&self) -> u32 {
        self.base_order
    }

    fn period(&self) -> u32 {
        self.poly.modulus
    }

    fn phase(&self, i: i64, j: i64) -> u32 {
        self.poly.eval(i, j) / self.divisor
    }
}

pub fn generate_array<F: IndexFunction + ?Sized>(
    f: &F,
    rows: usize,
    cols: usize,
) -> Result<PhaseArray> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("{rows}x{cols} array")));
    }
    let mut exps = Vec::with_capacity(rows * cols);
    for i in 0..rows as i64 {
        for j in 0..cols as i64 {
            exps.push(f.phase(i, j));
        }
    }
    Ok(PhaseArray::from_reduced(
        f.alphabet_order(),
        rows,
        cols,
        exps,
    ))
}

/// `S_{i,j} = ω_n^{p(i,j)}` over the polynomial's modulus.
pub fn generate_poly_array(p: &PolyIndex, rows: usize, cols: usize) -> Result<PhaseArray> {
    generate_array(p, rows, cols)
}

/// `S_{i,j} = ω_K^{⌊p(i,j)/n⌋}`.
pub fn generate_floored_array(f: &FlooredIndex, rows: usize, cols: usize) -> Result<PhaseArray> {
    generate_array(f, rows, cols)
}

/// Samples `trials` random cells (including negative indices) and checks
/// that shifting either coordinate by the modulus leaves `p mod m` unchanged.
pub fn lemma_periodicity_check<R: Rng + ?Sized>(p: &PolyIndex, trials: usize, rng: &mut R) -> bool {
    let m = p.modulus as i64;
    (0..trials).all(|_| {
        let i = rng.gen_range(-1000..1000i64);
        let j = rng.gen_range(-1000..1000i64);
        let k = rng.gen_range(-3..4i64);
        let base = p.eval(i, j);
        p.eval(i + m, j) == base && p.eval(i, j + m) == base && p.eval(i + k * m, j - k * m) == base
    })
}

/// Checks `S_{i, j+P} = S_{i,j}` and `S_{i+P, j} = S_{i,j}` for all cells of
/// an `rows × cols` window, where `P` is the function's period.
pub fn periodicity_holds<F: IndexFunction + ?Sized>(f: &F, rows: usize, cols: usize) -> bool {
    let p = f.period() as i64;
    (0..rows as i64).all(|i| {
        (0..cols as i64).all(|j| {
            let s = f.phase(i, j);
            f.phase(i, j + p) == s && f.phase(i + p, j) == s
        })
    })
}

/// Builds columns `0` and `P` (the period) over `rows` rows and returns the
/// pair if they agree entrywise. This duplication is what caps the column
/// count at `P` for any orthogonal family.
pub fn column_duplication_witness<F: IndexFunction + ?Sized>(
    f: &F,
    rows: usize,
) -> Option<(usize, usize)> {
    let p = f.period() as i64;
    (0..rows as i64)
        .all(|i| f.phase(i, 0) == f.phase(i, p))
        .then_some((0, p as usize))
}
