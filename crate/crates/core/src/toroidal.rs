//! Toroidal classes of the cyclic quotients `G_n`.
//!
//! A class of `H_k(G_n)` is non-toroidal when it comes from a finite piece of
//! the periodic complex; those classes form the subspace `I^n`, computed as
//! the image of strip homology. Toroidal classes are counted by the
//! generalized image of `M_V` one degree down, and explicit cycles are
//! recovered by chaining translation witnesses along a periodic orbit.

use crate::complex::{homology, HomologyBasis};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Subspace};
use crate::exec::Exec;
use crate::field::Field;
use crate::monodromy::{translation_witness, MonodromySet};
use crate::mvss::{build_blowup, lift_cycle, vtrace};
use crate::periodic::{build_quotient, build_strip, PeriodicComplex, QuotientComplex};

/// Iteration cap when searching for the period of a class under `M_V^n`.
pub const WINDING_LIMIT: usize = 4096;

/// `I^n` in one degree, in coordinates of the homology basis of `G_n`.
#[derive(Clone, Debug)]
pub struct StripImage<F: Field> {
    pub space: Subspace<F>,
    /// Strip length at which the image was read off.
    pub strip_length: usize,
    /// The image agreed with the one from a strip `n` shorter.
    pub stable: bool,
}

/// Strip length beyond which every finitely supported cycle of degree `k`
/// has all of its translates by `0..n` inside the strip.
///
/// Finitely supported `k`-cycles form the kernel of `∂_k` over `F[t, t⁻¹]`;
/// a minimal basis of that kernel has degrees bounded by the rank of `∂_k`,
/// which is at most the number of `(k-1)`-orbit cells.
pub fn strip_length_bound<F: Field>(p: &PeriodicComplex<F>, n: usize, k: usize) -> usize {
    let r = if k == 0 { 0 } else { p.orbit_cells(k - 1).len() };
    n + r + 1
}

/// Image of the strip cycles of a given length in `H_k(G_n)`.
pub fn strip_image_at<F: Field>(
    p: &PeriodicComplex<F>,
    g: &QuotientComplex<F>,
    hg: &HomologyBasis<F>,
    k: usize,
    length: usize,
) -> Result<Subspace<F>> {
    let f = p.field().clone();
    let betti = hg.betti(k);
    if betti == 0 || k >= p.degrees() {
        return Ok(Subspace::zero(&f, betti));
    }
    let strip = build_strip(p, length)?;
    let proj = &strip.projection(g).maps[k];
    let cycles = if k == 0 {
        Subspace::full(&f, strip.complex.count(0))
    } else {
        strip.complex.boundary(k).kernel()
    };
    let mut image = Subspace::zero(&f, betti);
    for z in cycles.vectors() {
        image.insert(hg.coordinates(k, &proj.apply(z))?);
        if image.is_full() {
            break;
        }
    }
    Ok(image)
}

/// `I^n ⊆ H_k(G_n)`: strip lengths are taken in steps of `n` until the image
/// is stable across two consecutive lengths and the length reaches
/// [`strip_length_bound`]. `max_length` caps the search; the result is then
/// flagged unstable if the bound was not reached.
pub fn nontoroidal_image<F: Field>(
    p: &PeriodicComplex<F>,
    g: &QuotientComplex<F>,
    hg: &HomologyBasis<F>,
    k: usize,
    max_length: Option<usize>,
) -> Result<StripImage<F>> {
    let n = g.n;
    let bound = strip_length_bound(p, n, k);
    let start = bound.div_ceil(n).saturating_sub(1).max(1) * n;
    let cap = max_length.unwrap_or(usize::MAX);
    let mut length = start.min(cap.max(n) / n * n).max(n);
    let mut previous = strip_image_at(p, g, hg, k, length)?;
    loop {
        let next_length = length + n;
        if next_length > cap {
            return Ok(StripImage { space: previous, strip_length: length, stable: false });
        }
        let next = strip_image_at(p, g, hg, k, next_length)?;
        if next == previous && next_length >= bound {
            return Ok(StripImage { space: next, strip_length: next_length, stable: true });
        }
        previous = next;
        length = next_length;
    }
}

/// Classification data for one degree of `G_n`.
#[derive(Clone, Debug)]
pub struct DegreeClassification<F: Field> {
    pub degree: usize,
    pub betti: usize,
    pub image: StripImage<F>,
    pub toroidal_dim: usize,
    /// `dim gim(M_V)` and `dim gim(M_U)` in degree `k - 1`.
    pub gim_dim_v: usize,
    pub gim_dim_u: usize,
    /// `toroidal_dim == gim_dim_v`.
    pub iso: bool,
    /// Per canonical basis class of `gim(M_V)` in degree `k - 1`, the least
    /// `m ≥ 1` with `M_V^{nm} θ = θ`, if found.
    pub winding: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct Classification<F: Field> {
    pub n: usize,
    pub quotient: QuotientComplex<F>,
    pub homology: HomologyBasis<F>,
    pub degrees: Vec<DegreeClassification<F>>,
}

impl<F: Field> Classification<F> {
    pub fn iso_everywhere(&self) -> bool {
        self.degrees.iter().all(|d| d.iso)
    }
}

/// Least `m ≥ 1` with `A^m x = x`, searching up to `limit`.
pub fn orbit_period<F: Field>(a: &Matrix<F>, x: &[F::Elem], limit: usize) -> Option<usize> {
    let mut y = a.apply(x);
    for m in 1..=limit {
        if y == x {
            return Some(m);
        }
        y = a.apply(&y);
    }
    None
}

/// Classifies `H_*(G_n)` into toroidal and non-toroidal parts.
pub fn classify<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    n: usize,
    max_length: Option<usize>,
) -> Result<Classification<F>> {
    classify_with(p, ms, n, max_length, Exec::default())
}

pub fn classify_with<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    n: usize,
    max_length: Option<usize>,
    exec: Exec,
) -> Result<Classification<F>> {
    let g = build_quotient(p, n)?;
    let hg = homology(&g.complex);
    let ks: Vec<usize> = (0..g.complex.degrees()).collect();
    let degrees = exec
        .map(&ks, |&k| -> Result<DegreeClassification<F>> {
            let image = nontoroidal_image(p, &g, &hg, k, max_length)?;
            let betti = hg.betti(k);
            let toroidal_dim = betti - image.space.dim();
            let (gim_dim_v, gim_dim_u, winding) = match k.checked_sub(1).and_then(|q| ms.degree(q)) {
                Some(d) => {
                    let fit = &d.fit_v;
                    let (step, _) = fit.restricted.pow(n as u64);
                    let r = fit.gim.dim();
                    let winding = (0..r)
                        .map(|t| {
                            let mut e = vec![p.field().zero(); r];
                            e[t] = p.field().one();
                            orbit_period(&step, &e, WINDING_LIMIT)
                        })
                        .collect();
                    (r, d.fit_u.gim.dim(), winding)
                }
                None => (0, 0, Vec::new()),
            };
            Ok(DegreeClassification {
                degree: k,
                betti,
                image,
                toroidal_dim,
                gim_dim_v,
                gim_dim_u,
                iso: toroidal_dim == gim_dim_v,
                winding,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification { n, quotient: g, homology: hg, degrees })
}

/// Smallest `n ≤ max_n` at which the toroidal dimension matches
/// `dim gim(M_V)` in every degree, with the per-`n` classifications.
pub fn smallest_iso_n<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    max_n: usize,
    exec: Exec,
) -> Result<(Option<usize>, Vec<Classification<F>>)> {
    let ns: Vec<usize> = (1..=max_n).collect();
    let all = exec
        .map(&ns, |&n| classify_with(p, ms, n, None, Exec::Sequential))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let first = all.iter().find(|c| c.iso_everywhere()).map(|c| c.n);
    Ok((first, all))
}

/// An explicit toroidal cycle built from a class of `gim(M_V)`.
#[derive(Clone, Debug)]
pub struct Recovery<F: Field> {
    /// Degree of the `V`-class; the recovered cycle has degree `q + 1`.
    pub q: usize,
    pub n_used: usize,
    /// Least `m` with `M_V^{n m} θ = θ`.
    pub period: usize,
    pub quotient: QuotientComplex<F>,
    pub chain: Vec<F::Elem>,
    /// Coordinates of the cycle in `H_{q+1}(G_n)`.
    pub class: Vec<F::Elem>,
}

/// Builds a toroidal `(q+1)`-cycle of `G_n` from `θ ∈ gim(M_V) ⊆ H_q(V)`.
///
/// If the cycle fails verification (nonzero boundary, or lying in `I^n`),
/// retries with `n' = n·m` for `m = 2, 3, 4` and reports the `n'` used.
pub fn recover<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    n: usize,
    q: usize,
    theta: &[F::Elem],
) -> Result<Recovery<F>> {
    let d = ms.degree(q).ok_or_else(|| Error::invalid(format!("no monodromy in degree {q}")))?;
    let f = p.field().clone();
    if theta.len() != d.m_v.cols() {
        return Err(Error::invalid("class has the wrong dimension"));
    }
    if theta.iter().all(|x| f.is_zero(x)) {
        return Err(Error::NotInGim("the zero class has no toroidal lift".into()));
    }
    if !d.fit_v.gim.contains(theta) {
        return Err(Error::NotInGim(format!("class is not in gim(M_V) in degree {q}")));
    }
    let mut last_err = None;
    for mult in 1..=4 {
        let n_try = n * mult;
        match recover_at(p, ms, n_try, q, theta) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::NotInGim(_) | Error::NoFinitePeriod(_))) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::internal("recovery failed")))
}

/// Like [`recover`] at exactly this `n`, without retrying larger multiples.
pub fn recover_at<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    n: usize,
    q: usize,
    theta: &[F::Elem],
) -> Result<Recovery<F>> {
    let f = p.field().clone();
    let d = ms.degree(q).expect("degree checked by caller");
    let (step, _) = d.m_v.pow(n as u64);
    let period = orbit_period(&step, theta, WINDING_LIMIT)
        .ok_or_else(|| Error::NoFinitePeriod(format!("orbit of the class under M_V^{n} does not close")))?;
    let w = &ms.window;
    let g = build_quotient(p, n)?;
    let k = q + 1;
    let mut chain = vec![f.zero(); g.complex.count(k)];
    let mut current = theta.to_vec();
    for shift in 0..n * period {
        let c = translation_witness(ms, q, &current)?;
        for (pos, x) in c.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            let (orbit, s) = w.u_cells[k][pos];
            let copy = (s + shift as i64).rem_euclid(n as i64) as usize;
            let at = g.position(k, orbit, copy).expect("cell present in quotient");
            chain[at] = f.add(&chain[at], x);
        }
        current = d.m_v.apply(&current);
    }
    if current != theta {
        return Err(Error::internal("orbit did not return to the starting class"));
    }
    let hg = homology(&g.complex);
    let class = hg.coordinates(k, &chain).map_err(|_| Error::internal("recovered chain is not a cycle"))?;
    let image = nontoroidal_image(p, &g, &hg, k, None)?;
    if image.space.contains(&class) {
        return Err(Error::internal(format!("recovered cycle is not toroidal at n = {n}")));
    }
    Ok(Recovery { q, n_used: n, period, quotient: g, chain, class })
}

/// Verdict on a single cycle of `G_n`.
#[derive(Clone, Debug)]
pub struct ToroidalVerdict<F: Field> {
    pub degree: usize,
    pub class: Vec<F::Elem>,
    pub toroidal: bool,
    /// `[θ_0] ∈ H_{k-1}(V)` traced through the blow-up.
    pub psi0: Vec<F::Elem>,
    /// Component of `ψ₀` in `gim(M_V)` along `gker(M_V)`.
    pub psi0_gim_component: Vec<F::Elem>,
    /// The `ψ₀` test (nonzero gim component) agrees with the strip test.
    pub psi0_agrees: bool,
}

/// Decides whether a cycle of `G_n` is toroidal, i.e. not in `I^n`, and
/// cross-checks against the blow-up trace.
pub fn is_toroidal<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &MonodromySet<F>,
    g: &QuotientComplex<F>,
    k: usize,
    cycle: &[F::Elem],
) -> Result<ToroidalVerdict<F>> {
    let f = p.field().clone();
    let hg = homology(&g.complex);
    if cycle.len() != g.complex.count(k) {
        return Err(Error::invalid(format!("cycle has {} entries, expected {}", cycle.len(), g.complex.count(k))));
    }
    let class = hg.coordinates(k, cycle)?;
    let image = nontoroidal_image(p, g, &hg, k, None)?;
    let toroidal = !image.space.contains(&class);
    let (psi0, psi0_gim_component) = match k.checked_sub(1).and_then(|q| ms.degree(q)) {
        Some(d) => {
            let b = build_blowup(&ms.window, g.n)?;
            let total = lift_cycle(&b, &ms.window, g, k, cycle)?;
            let theta = vtrace(&b, &ms.hv, k, &total)?;
            let psi0 = theta.into_iter().next().unwrap_or_default();
            let comp = d.fit_v.gim_component(&psi0);
            (psi0, comp)
        }
        None => (Vec::new(), Vec::new()),
    };
    let psi_nonzero = psi0_gim_component.iter().any(|x| !f.is_zero(x));
    Ok(ToroidalVerdict {
        degree: k,
        class,
        toroidal,
        psi0,
        psi0_gim_component,
        psi0_agrees: psi_nonzero == toroidal,
    })
}
