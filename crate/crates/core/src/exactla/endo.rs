use crate::error::{Error, Result};
use crate::field::Field;

use super::{Matrix, Subspace};

/// Fitting decomposition of an endomorphism: `F^d = gim ⊕ gker`, where the
/// map is invertible on `gim` and nilpotent on `gker`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndoAnalysis<F: Field> {
    pub gim: Subspace<F>,
    pub gker: Subspace<F>,
    /// Least `N >= 1` with `im(E^N) = gim` (0 for the zero-dimensional space).
    pub stabilization_exponent: usize,
    /// `E` restricted to `gim`, in the canonical basis of `gim`.
    pub restricted: Matrix<F>,
    /// Inverse of `restricted`.
    pub restricted_inverse: Matrix<F>,
    /// Projection onto `gim` along `gker`.
    pub projector: Matrix<F>,
    /// Matrix products spent on powers of `E`.
    pub multiplications: usize,
}

impl<F: Field> EndoAnalysis<F> {
    pub fn dim(&self) -> usize {
        self.gim.ambient()
    }

    /// The `gim` component of `v` along `gker`.
    pub fn gim_component(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        self.projector.apply(v)
    }
}

/// Computes `gim` and `gker` of a square matrix.
///
/// Squares `E` until the rank stops dropping or the next square would pass
/// exponent `d`; in the latter case `E^d` is assembled from the binary
/// expansion of `d`. At most `⌊log₂ d⌋ + popcount(d) - 1` products are taken.
pub fn analyze_endo<F: Field>(e: &Matrix<F>) -> Result<EndoAnalysis<F>> {
    if !e.is_square() {
        return Err(Error::invalid(format!("endomorphism must be square, got {}x{}", e.rows(), e.cols())));
    }
    let f = e.field().clone();
    let d = e.rows();
    if d == 0 {
        let z = Matrix::zeros(&f, 0, 0);
        return Ok(EndoAnalysis {
            gim: Subspace::zero(&f, 0),
            gker: Subspace::zero(&f, 0),
            stabilization_exponent: 0,
            restricted: z.clone(),
            restricted_inverse: z.clone(),
            projector: z,
            multiplications: 0,
        });
    }

    let mut mults = 0;
    // powers[j] = E^(2^j)
    let mut powers = vec![e.clone()];
    let mut rank = e.rank();
    let mut stable: Option<Matrix<F>> = None;
    loop {
        let j = powers.len() - 1;
        if rank == 0 {
            stable = Some(powers[j].clone());
            break;
        }
        if (1usize << (j + 1)) > d {
            break;
        }
        let sq = powers[j].mul(&powers[j]);
        mults += 1;
        let r = sq.rank();
        if r == rank {
            stable = Some(powers[j].clone());
            break;
        }
        rank = r;
        powers.push(sq);
    }
    let stable = match stable {
        Some(p) => p,
        None => {
            let mut acc: Option<Matrix<F>> = None;
            for (j, p) in powers.iter().enumerate() {
                if d >> j & 1 == 1 {
                    acc = Some(match acc {
                        None => p.clone(),
                        Some(a) => {
                            mults += 1;
                            a.mul(p)
                        }
                    });
                }
            }
            acc.expect("d >= 1 has a set bit")
        }
    };

    let gim = stable.column_space();
    let gker = stable.kernel();
    if gim.dim() + gker.dim() != d || !gim.intersection(&gker).is_zero() {
        return Err(Error::internal("generalized image and kernel do not split the space"));
    }

    let restricted = gim
        .restrict(e, &gim)
        .ok_or_else(|| Error::internal("generalized image is not invariant"))?;
    let restricted_inverse = restricted
        .inverse()
        .ok_or_else(|| Error::internal("map is not invertible on its generalized image"))?;

    // E is nilpotent on gker; its index there is the least stabilizing power.
    let mut index = 0;
    let mut current: Vec<Vec<F::Elem>> = gker.vectors().to_vec();
    while current.iter().any(|v| v.iter().any(|x| !f.is_zero(x))) {
        current = current.iter().map(|v| e.apply(v)).collect();
        index += 1;
        if index > d {
            return Err(Error::internal("map is not nilpotent on its generalized kernel"));
        }
    }

    let split = gim.basis().hstack(&gker.basis());
    let split_inv = split
        .inverse()
        .ok_or_else(|| Error::internal("generalized image and kernel do not split the space"))?;
    let keep_gim = Matrix::from_fn(&f, d, d, |i, j| {
        if i == j && i < gim.dim() {
            f.one()
        } else {
            f.zero()
        }
    });
    let projector = split.mul(&keep_gim).mul(&split_inv);

    Ok(EndoAnalysis {
        gim,
        gker,
        stabilization_exponent: index.max(1),
        restricted,
        restricted_inverse,
        projector,
        multiplications: mults,
    })
}

/// Upper bound on the products `analyze_endo` may take for dimension `d`.
pub fn multiplication_bound(d: usize) -> usize {
    if d <= 1 {
        return 0;
    }
    let ceil_log = usize::BITS - (d - 1).leading_zeros();
    2 * ceil_log as usize + d.count_ones() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    #[test]
    fn identity_is_all_gim() {
        let f = Fp::new(2).unwrap();
        let a = analyze_endo(&Matrix::identity(&f, 3)).unwrap();
        assert_eq!(a.gim.dim(), 3);
        assert!(a.gker.is_zero());
        assert_eq!(a.stabilization_exponent, 1);
    }

    #[test]
    fn nilpotent_is_all_gker() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let a = analyze_endo(&m).unwrap();
        assert!(a.gim.is_zero());
        assert_eq!(a.gker.dim(), 3);
        assert_eq!(a.stabilization_exponent, 3);
    }

    #[test]
    fn mixed_block() {
        let f = Fp::new(2).unwrap();
        let m = Matrix::from_i64(&f, &[&[1, 0, 1], &[0, 0, 0], &[0, 1, 0]]);
        let a = analyze_endo(&m).unwrap();
        assert_eq!(a.gim.vectors(), &[vec![1, 0, 0]]);
        assert_eq!(a.gker.vectors(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(a.stabilization_exponent, 2);
        assert_eq!(a.restricted_inverse, Matrix::from_i64(&f, &[&[1]]));
        assert_eq!(a.gim_component(&[1, 1, 1]), vec![1, 0, 0]);
    }

    #[test]
    fn bound_values() {
        assert_eq!(multiplication_bound(1), 0);
        assert_eq!(multiplication_bound(2), 3);
        assert_eq!(multiplication_bound(30), 14);
    }
}
