//! Classical perfect constructions. Every constructor validates its output
//! with the exact predicates and refuses to return an invalid object.

use crate::aop::{check_aop, is_perfect_sequence};
use crate::error::{Error, Result};
use crate::indexfn::{generate_poly_array, PolyIndex};
use crate::seq::{PhaseArray, PhaseSequence};

/// Frank array: `n × n`, `S_{i,j} = ω_n^{ij}`. Flattened row-major it is
/// the Frank sequence of length `n²`.
pub fn frank_array(n: u32) -> Result<PhaseArray> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Frank order must be positive".into(),
        ));
    }
    let p = PolyIndex::from_terms(n, &[((1, 1), 1)])?;
    let a = generate_poly_array(&p, n as usize, n as usize)?;
    if !check_aop(&a).holds || !is_perfect_sequence(&a.flatten()) {
        return Err(Error::Validation(format!(
            "Frank array of order {n} failed self-validation"
        )));
    }
    Ok(a)
}

/// Chu sequence of length `len`: `ω_len^{k(k+1)/2}` for odd `len`,
/// `ω_{2len}^{k²}` for even `len`.
pub fn chu_sequence(len: u32) -> Result<PhaseSequence> {
    if len == 0 {
        return Err(Error::InvalidArgument("Chu length must be positive".into()));
    }
    let l = len as i64;
    let s = if len % 2 == 1 {
        PhaseSequence::new(len, (0..l).map(|k| (k * (k + 1) / 2) % l))?
    } else {
        PhaseSequence::new(2 * len, (0..l).map(|k| (k * k) % (2 * l)))?
    };
    if !is_perfect_sequence(&s) {
        return Err(Error::Validation(format!(
            "Chu sequence of length {len} failed self-validation"
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frank_small() {
        assert_eq!(frank_array(2).unwrap().exponents(), &[0, 0, 0, 1]);
        assert_eq!(frank_array(1).unwrap().exponents(), &[0]);
        let f4 = frank_array(4).unwrap();
        assert_eq!(f4.flatten().len(), 16);
        assert_eq!(f4.row(3), &[0, 3, 2, 1]);
        assert!(frank_array(0).is_err());
    }

    #[test]
    fn chu_lengths() {
        for len in 1..=24 {
            let s = chu_sequence(len).unwrap();
            assert_eq!(s.len(), len as usize);
        }
        assert_eq!(chu_sequence(3).unwrap().exponents(), &[0, 1, 0]);
        assert_eq!(chu_sequence(4).unwrap().exponents(), &[0, 1, 4, 1]);
    }
}
