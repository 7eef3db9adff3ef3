//! The Mayer–Vietoris blow-up of `G_n`: the total complex of the two-column
//! double complex `E_{0,q} = ⊕_ℓ C_q(U)`, `E_{1,q} = ⊕_ℓ C_q(V)` over
//! `ℓ ∈ Z_n`, with horizontal differential `θ_ℓ ↦ i(θ)_ℓ − j(θ)_{ℓ+1}`.
//!
//! The horizontal differential is injective on chains, so the total complex
//! is quasi-isomorphic to `C(G_n)` for every `n ≥ 1`.

use crate::complex::{homology, CellComplex, HomologyBasis};
use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::field::Field;
use crate::periodic::{QuotientComplex, WindowPair};

/// Total complex `T_k = E_{0,k} ⊕ E_{1,k-1}` of the blow-up.
#[derive(Clone, Debug)]
pub struct BlowUp<F: Field> {
    pub n: usize,
    pub total: CellComplex<F>,
    u_count: Vec<usize>,
    v_count: Vec<usize>,
    horizontal: Vec<Matrix<F>>,
    u_boundary: Vec<Matrix<F>>,
    v_boundary: Vec<Matrix<F>>,
}

fn block_diag<F: Field>(f: &F, m: &Matrix<F>, n: usize) -> Matrix<F> {
    let mut out = Matrix::zeros(f, m.rows() * n, m.cols() * n);
    for l in 0..n {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(l * m.rows() + r, l * m.cols() + c, m.get(r, c).clone());
            }
        }
    }
    out
}

/// Builds the blow-up of `G_n` from the window pair.
pub fn build_blowup<F: Field>(w: &WindowPair<F>, n: usize) -> Result<BlowUp<F>> {
    if n == 0 {
        return Err(Error::invalid("quotient index n must be at least 1"));
    }
    let f = w.u.field().clone();
    let top = w.u.degrees();
    let u_count: Vec<usize> = (0..top).map(|k| w.u.count(k)).collect();
    let v_count: Vec<usize> = (0..top).map(|k| w.v.count(k)).collect();
    let u_boundary: Vec<Matrix<F>> = (0..top).map(|k| block_diag(&f, &w.u.boundary(k), n)).collect();
    let v_boundary: Vec<Matrix<F>> = (0..top).map(|k| block_diag(&f, &w.v.boundary(k), n)).collect();
    // horizontal[q] : E_{1,q} → E_{0,q}
    let horizontal: Vec<Matrix<F>> = (0..top)
        .map(|q| {
            let (uc, vc) = (u_count[q], v_count[q]);
            let iq = &w.i.maps[q];
            let jq = &w.j.maps[q];
            let mut h = Matrix::zeros(&f, uc * n, vc * n);
            for l in 0..n {
                let next = (l + 1) % n;
                for col in 0..vc {
                    for row in 0..uc {
                        let (r_i, c) = (l * uc + row, l * vc + col);
                        let v = f.add(h.get(r_i, c), iq.get(row, col));
                        h.set(r_i, c, v);
                        let r_j = next * uc + row;
                        let v = f.sub(h.get(r_j, c), jq.get(row, col));
                        h.set(r_j, c, v);
                    }
                }
            }
            h
        })
        .collect();

    let tdeg = if top == 0 { 0 } else { top + 1 };
    let e0 = |k: usize| if k < top { u_count[k] * n } else { 0 };
    let e1 = |k: usize| if k >= 1 && k - 1 < top { v_count[k - 1] * n } else { 0 };
    let names = (0..tdeg)
        .map(|k| {
            let mut ids = Vec::with_capacity(e0(k) + e1(k));
            if k < top {
                for l in 0..n {
                    ids.extend(w.u.cell_ids(k).iter().map(|c| format!("U{l}:{c}")));
                }
            }
            if k >= 1 && k - 1 < top {
                for l in 0..n {
                    ids.extend(w.v.cell_ids(k - 1).iter().map(|c| format!("V{l}:{c}")));
                }
            }
            ids
        })
        .collect();
    let boundary = (0..tdeg)
        .map(|k| {
            let rows = if k == 0 { 0 } else { e0(k - 1) + e1(k - 1) };
            let mut d = Matrix::zeros(&f, rows, e0(k) + e1(k));
            if k == 0 {
                return d;
            }
            let (r0, c0) = (e0(k - 1), e0(k));
            if k < top {
                copy_block(&mut d, &u_boundary[k], 0, 0);
            }
            if e1(k) > 0 {
                copy_block(&mut d, &horizontal[k - 1], 0, c0);
                if k >= 2 {
                    copy_block(&mut d, &v_boundary[k - 1].neg(), r0, c0);
                }
            }
            d
        })
        .collect();
    let total = CellComplex::new(f, names, boundary, None)?;
    Ok(BlowUp { n, total, u_count, v_count, horizontal, u_boundary, v_boundary })
}

fn copy_block<F: Field>(dst: &mut Matrix<F>, src: &Matrix<F>, r0: usize, c0: usize) {
    for r in 0..src.rows() {
        for c in 0..src.cols() {
            dst.set(r0 + r, c0 + c, src.get(r, c).clone());
        }
    }
}

impl<F: Field> BlowUp<F> {
    /// Verifies `∂⁰∂⁰ = 0`, `∂¹∂¹ = 0` and `∂⁰∂¹ + ∂¹∂⁰ = 0`; returns the
    /// names of failed identities.
    pub fn check_identities(&self) -> Vec<String> {
        let mut failed = Vec::new();
        let top = self.u_count.len();
        for k in 2..top {
            if !self.u_boundary[k - 1].mul(&self.u_boundary[k]).is_zero() {
                failed.push(format!("d0d0 on E0 in degree {k}"));
            }
            if !self.v_boundary[k - 1].mul(&self.v_boundary[k]).is_zero() {
                failed.push(format!("d0d0 on E1 in degree {k}"));
            }
        }
        // two columns: ∂¹∘∂¹ factors through E_{2,*} = 0
        for q in 1..top {
            let lhs = self.u_boundary[q].mul(&self.horizontal[q]);
            let rhs = self.horizontal[q - 1].mul(&self.v_boundary[q]);
            if lhs != rhs {
                failed.push(format!("d0d1 + d1d0 in degree {q}"));
            }
        }
        failed
    }

    /// Total degrees stored.
    pub fn degrees(&self) -> usize {
        self.total.degrees()
    }

    fn e0(&self, k: usize) -> usize {
        self.u_count.get(k).map_or(0, |c| c * self.n)
    }
}

/// Homology of the total complex.
pub fn total_homology<F: Field>(b: &BlowUp<F>) -> HomologyBasis<F> {
    homology(&b.total)
}

/// Lifts a cycle of `G_n` to a total cycle: `(c, ℓ)` goes to copy `ℓ` of the
/// shift-0 cell `(c, 0)` of `U`, completed by the unique `E_1` part.
pub fn lift_cycle<F: Field>(
    b: &BlowUp<F>,
    w: &WindowPair<F>,
    g: &QuotientComplex<F>,
    k: usize,
    cycle: &[F::Elem],
) -> Result<Vec<F::Elem>> {
    let f = w.u.field().clone();
    if cycle.len() != g.complex.count(k) {
        return Err(Error::invalid("cycle has the wrong length"));
    }
    if k >= 1 && !g.complex.boundary(k).apply(cycle).iter().all(|x| f.is_zero(x)) {
        return Err(Error::NotACycle(format!("chain of degree {k} has nonzero boundary")));
    }
    let uc = w.u.count(k);
    let mut gamma0 = vec![f.zero(); b.e0(k)];
    for (pos, &(c, l)) in g.cells[k].iter().enumerate() {
        if f.is_zero(&cycle[pos]) {
            continue;
        }
        let row = w.u_cells[k].iter().position(|&key| key == (c, 0)).expect("shift-0 cell in U");
        let idx = l * uc + row;
        gamma0[idx] = f.add(&gamma0[idx], &cycle[pos]);
    }
    let mut total = gamma0.clone();
    if k >= 1 {
        let d = b.u_boundary[k].apply(&gamma0);
        let target: Vec<F::Elem> = d.iter().map(|x| f.neg(x)).collect();
        let gamma1 = b.horizontal[k - 1]
            .solve(&target)
            .ok_or_else(|| Error::internal("lift of a cycle has no horizontal completion"))?;
        total.extend(gamma1);
    }
    Ok(total)
}

/// Per-pair `V`-classes of a total cycle of degree `k`: the homology classes
/// in `H_{k-1}(V)` of its `E_1` components.
pub fn vtrace<F: Field>(
    b: &BlowUp<F>,
    hv: &HomologyBasis<F>,
    k: usize,
    total_cycle: &[F::Elem],
) -> Result<Vec<Vec<F::Elem>>> {
    if k == 0 {
        return Ok(vec![Vec::new(); b.n]);
    }
    let e0 = b.e0(k);
    let vc = b.v_count[k - 1];
    if total_cycle.len() != e0 + vc * b.n {
        return Err(Error::invalid("total chain has the wrong length"));
    }
    (0..b.n)
        .map(|l| {
            let part = &total_cycle[e0 + l * vc..e0 + (l + 1) * vc];
            hv.coordinates(k - 1, part)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::periodic::{build_quotient, build_window, BoundaryEntry, OrbitCell, PeriodicComplex};

    #[test]
    fn line_blowup_matches_quotient() {
        let f = Fp::new(2).unwrap();
        let p = PeriodicComplex::new(
            f,
            vec![OrbitCell { id: "a".into(), dim: 0 }, OrbitCell { id: "e".into(), dim: 1 }],
            vec![
                vec![],
                vec![
                    BoundaryEntry { face: 0, shift: 0, coeff: 1 },
                    BoundaryEntry { face: 0, shift: 1, coeff: 1 },
                ],
            ],
            None,
        )
        .unwrap();
        let w = build_window(&p).unwrap();
        for n in 1..4 {
            let b = build_blowup(&w, n).unwrap();
            assert!(b.check_identities().is_empty());
            let g = build_quotient(&p, n).unwrap();
            let hb = total_homology(&b).betti_numbers();
            let hg = homology(&g.complex).betti_numbers();
            assert_eq!(&hb[..2], &hg[..]);
            assert!(hb[2..].iter().all(|&x| x == 0));
        }
    }
}
