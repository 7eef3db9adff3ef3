//! Monodromy endomorphisms of the window pair.
//!
//! For each degree `q`, the two maps `i, j : H_q(V) → H_q(U)` determine a
//! relation "`i(y) = j(x)`" on `H_q(V)`. Fixing complements turns it into an
//! endomorphism `M_V` of `H_q(V)` (and `M_U` of `H_q(U)`); swapping the roles
//! of `i` and `j` gives the reversed endomorphisms `M̃_V`, `M̃_U`.
//!
//! The generalized images do depend on the complements once `ker i` or the
//! complement of `j⁻¹(im i)` is nontrivial; [`LiftPolicy::Stable`] picks them
//! so that lifted classes stay where the relation applies again, and
//! [`check_degree`] reports any remaining disagreement.

use std::cell::RefCell;

use serde::Serialize;

use crate::complex::{homology, HomologyBasis};
use crate::error::{Error, Result};
use crate::exactla::{analyze_endo, complement_within, ComplementPolicy, EndoAnalysis, Matrix, Subspace};
use crate::exec::Exec;
use crate::field::Field;
use crate::periodic::WindowPair;

/// How the complement of `ker(i)` used to lift `j`-values is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftPolicy {
    /// `complement_within(ker i, H(V))` under the complement policy.
    Plain,
    /// As `Plain`, but if that complement `C` breaks `M_U ∘ j = j ∘ M_V`
    /// (detected as `C ∩ (ker i + ker j) ⊄ ker j`), replace it by one that
    /// contains a complement of `ker i ∩ ker j` in `ker j`.
    Adapted,
    /// Filled from the innermost of the domains `W_0 ⊇ W_1 ⊇ …`, where
    /// `W_{k+1} = {x ∈ W_k : j(x) ∈ i(W_k)}`, outwards, so lifted values stay
    /// in the domain where the relation can be applied again. Falls back to
    /// containing a complement of `ker i ∩ ker j` in `ker j` when the plain
    /// fill breaks the relation.
    #[default]
    Stable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MonodromyOptions {
    pub complement: ComplementPolicy,
    pub lift: LiftPolicy,
}

/// The subspaces chosen while building one direction of the monodromy.
#[derive(Clone, Debug)]
pub struct Decomposition<F: Field> {
    /// `{x : b(x) ∈ im a}`.
    pub w: Subspace<F>,
    /// Complement of `w` in `H(V)`.
    pub jcal: Subspace<F>,
    /// Complement of `ker b` in `w`.
    pub p: Subspace<F>,
    pub ker_b: Subspace<F>,
    /// Complement of `ker a` used to lift.
    pub lift: Subspace<F>,
    /// `b(jcal)` extended by a complement of `im a + b(jcal)` in `H(U)`.
    pub jcal_u: Subspace<F>,
    /// Complement of `a(ker b)` in `im a`.
    pub p_u: Subspace<F>,
    /// Names of complements where the orthogonal candidate was rejected.
    pub degenerate: Vec<&'static str>,
    /// The lift complement differs from the plain complement of `ker a`.
    pub lift_adapted: bool,
}

/// Monodromy data in one degree.
#[derive(Clone, Debug)]
pub struct DegreeMonodromy<F: Field> {
    pub degree: usize,
    pub i: Matrix<F>,
    pub j: Matrix<F>,
    pub m_v: Matrix<F>,
    pub m_u: Matrix<F>,
    pub m_v_tilde: Matrix<F>,
    pub m_u_tilde: Matrix<F>,
    pub fit_v: EndoAnalysis<F>,
    pub fit_u: EndoAnalysis<F>,
    pub fit_v_tilde: EndoAnalysis<F>,
    pub fit_u_tilde: EndoAnalysis<F>,
    /// `j` restricted to `gim(M_V) → gim(M_U)`, in canonical gim bases.
    pub phi3: Option<Matrix<F>>,
    /// `i` restricted to `gim(M̃_V) → gim(M̃_U)`.
    pub phi4: Option<Matrix<F>>,
    pub forward: Decomposition<F>,
    pub reversed: Decomposition<F>,
}

/// A failed consistency check, reported instead of a silent wrong answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Incompatibility {
    pub degree: usize,
    pub check: String,
    pub detail: String,
}

impl Incompatibility {
    pub fn to_error(&self) -> Error {
        Error::Incompatible { degree: self.degree, check: self.check.clone(), detail: self.detail.clone() }
    }

    /// Whether the failure concerns only the `U`-side endomorphisms.
    pub fn u_side_only(&self) -> bool {
        self.check.starts_with("u_")
    }
}

/// Monodromy of a window pair in all degrees.
#[derive(Clone, Debug)]
pub struct MonodromySet<F: Field> {
    pub window: WindowPair<F>,
    pub hu: HomologyBasis<F>,
    pub hv: HomologyBasis<F>,
    pub degrees: Vec<DegreeMonodromy<F>>,
    pub diagnostics: Vec<Incompatibility>,
    pub options: MonodromyOptions,
}

impl<F: Field> MonodromySet<F> {
    pub fn degree(&self, q: usize) -> Option<&DegreeMonodromy<F>> {
        self.degrees.get(q)
    }

    /// `dim gim(M_V)` in degree `q` (0 outside range).
    pub fn gim_dim_v(&self, q: usize) -> usize {
        self.degrees.get(q).map_or(0, |d| d.fit_v.gim.dim())
    }

    pub fn gim_dim_u(&self, q: usize) -> usize {
        self.degrees.get(q).map_or(0, |d| d.fit_u.gim.dim())
    }

    /// Fails with the first diagnostic, if any.
    pub fn strict(&self) -> Result<()> {
        match self.diagnostics.first() {
            Some(d) => Err(d.to_error()),
            None => Ok(()),
        }
    }

    /// Whether the `V`-side data (which classification relies on) passed.
    pub fn v_side_ok(&self) -> bool {
        self.diagnostics.iter().all(Incompatibility::u_side_only)
    }
}

/// Builds the monodromy endomorphisms in every degree of the window pair.
pub fn build_monodromy<F: Field>(window: &WindowPair<F>, options: MonodromyOptions) -> Result<MonodromySet<F>> {
    build_monodromy_with(window, options, Exec::default())
}

pub fn build_monodromy_with<F: Field>(
    window: &WindowPair<F>,
    options: MonodromyOptions,
    exec: Exec,
) -> Result<MonodromySet<F>> {
    let hu = homology(&window.u);
    let hv = homology(&window.v);
    let i_maps = crate::complex::induced_map(&window.i, &hv, &hu)?;
    let j_maps = crate::complex::induced_map(&window.j, &hv, &hu)?;
    let degrees: Vec<usize> = (0..window.u.degrees().max(window.v.degrees())).collect();
    let results = exec.map(&degrees, |&q| {
        let f = hu.field();
        let i = i_maps.get(q).cloned().unwrap_or_else(|| Matrix::zeros(f, hu.betti(q), hv.betti(q)));
        let j = j_maps.get(q).cloned().unwrap_or_else(|| Matrix::zeros(f, hu.betti(q), hv.betti(q)));
        degree_monodromy(q, i, j, options)
    });
    let mut out = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::new();
    for r in results {
        let (d, diag) = r?;
        out.push(d);
        diagnostics.extend(diag);
    }
    Ok(MonodromySet { window: window.clone(), hu, hv, degrees: out, diagnostics, options })
}

/// Builds `(M_V, M_U)` for the relation `a(M_V x) = b(x)`.
///
/// Under [`LiftPolicy::Stable`], `seed` (the generalized image of the other
/// direction) is placed into both `P` and the lift complement when admissible,
/// so that the two directions are inverse to each other on it.
fn one_direction<F: Field>(
    a: &Matrix<F>,
    b: &Matrix<F>,
    options: MonodromyOptions,
    seed: &Subspace<F>,
) -> Result<(Matrix<F>, Matrix<F>, Decomposition<F>)> {
    let f = a.field().clone();
    let dv = a.cols();
    let du = a.rows();
    let policy = options.complement;
    let degenerate = RefCell::new(Vec::new());
    let complement = |inner: &Subspace<F>, outer: &Subspace<F>, name: &'static str| -> Result<Subspace<F>> {
        let c = complement_within(inner, outer, policy)?;
        if c.degenerate {
            degenerate.borrow_mut().push(name);
        }
        Ok(c.space)
    };

    let full_v = Subspace::full(&f, dv);
    let full_u = Subspace::full(&f, du);
    let ker_a = a.kernel();
    let ker_b = b.kernel();
    let im_a = a.column_space();
    let w = im_a.preimage(b);
    // W_0 = H(V) ⊇ W_1 = w ⊇ W_2 ⊇ …, W_{k+1} = {x ∈ W_k : b(x) ∈ a(W_k)}
    let mut levels = vec![full_v.clone()];
    loop {
        let last = levels.last().expect("nonempty");
        let next = last.image(a).preimage(b).intersection(last);
        if next == *last {
            break;
        }
        levels.push(next);
    }
    let stable = options.lift == LiftPolicy::Stable;
    let seed = if stable
        && w.contains_space(seed)
        && seed.intersection(&ker_b).is_zero()
        && seed.intersection(&ker_a).is_zero()
    {
        seed.clone()
    } else {
        Subspace::zero(&f, dv)
    };

    let p = if stable {
        let mut acc = ker_b.sum(&seed);
        let mut p = seed.clone();
        for level in levels.iter().rev() {
            let level = level.intersection(&w);
            let part = complement(&acc.intersection(&level), &level, "p_level")?;
            acc = acc.sum(&part);
            p = p.sum(&part);
        }
        p
    } else {
        complement(&ker_b, &w, "p")?
    };
    let mut lift_adapted = false;
    let lift = match options.lift {
        LiftPolicy::Plain | LiftPolicy::Adapted => {
            let plain = complement(&ker_a, &full_v, "lift")?;
            if options.lift == LiftPolicy::Adapted && !ker_b.contains_space(&plain.intersection(&ker_a.sum(&ker_b))) {
                let shared = ker_a.intersection(&ker_b);
                let d = complement(&shared, &ker_b, "lift_kernel_part")?;
                let rest = complement(&ker_a.sum(&d), &full_v, "lift_rest")?;
                lift_adapted = true;
                d.sum(&rest)
            } else {
                plain
            }
        }
        LiftPolicy::Stable => {
            let fill = |start: Subspace<F>| -> Result<(Subspace<F>, bool)> {
                let mut acc = ker_a.sum(&start);
                let mut lift = start;
                let mut degenerate = false;
                for level in levels.iter().rev() {
                    let c = complement_within(&acc.intersection(level), level, policy)?;
                    degenerate |= c.degenerate;
                    acc = acc.sum(&c.space);
                    lift = lift.sum(&c.space);
                }
                Ok((lift, degenerate))
            };
            let (mut lift, mut lift_degenerate) = fill(seed.clone())?;
            if !ker_b.contains_space(&lift.intersection(&ker_a.sum(&ker_b))) {
                let shared = ker_a.sum(&seed).intersection(&ker_b);
                let d = complement(&shared, &ker_b, "lift_kernel_part")?;
                (lift, lift_degenerate) = fill(seed.sum(&d))?;
            }
            if lift_degenerate {
                degenerate.borrow_mut().push("lift_level");
            }
            lift_adapted = lift != complement_within(&ker_a, &full_v, policy)?.space;
            lift
        }
    };

    let lift_basis = lift.basis();
    let lifter = a.mul(&lift_basis).solver();
    let lift_value = |target: &[F::Elem]| -> Result<Vec<F::Elem>> {
        let y = lifter
            .solve(target)
            .ok_or_else(|| Error::internal("value outside the image of the lifting map"))?;
        Ok(lift_basis.apply(&y))
    };

    let jcal = if stable {
        // lifted values leaving W go to the kernel first
        let mut values = Subspace::zero(&f, dv);
        for x in p.vectors() {
            values.insert(lift_value(&b.apply(x))?);
        }
        let outside = complement(&values.intersection(&w), &values, "jcal_values")?;
        outside.sum(&complement(&w.sum(&outside), &full_v, "jcal")?)
    } else {
        complement(&w, &full_v, "jcal")?
    };

    // M_V on the basis P ⊕ ker b ⊕ jcal
    let mut x_cols: Vec<Vec<F::Elem>> = Vec::with_capacity(dv);
    let mut y_cols: Vec<Vec<F::Elem>> = Vec::with_capacity(dv);
    for x in p.vectors() {
        y_cols.push(lift_value(&b.apply(x))?);
        x_cols.push(x.clone());
    }
    for x in ker_b.vectors().iter().chain(jcal.vectors()) {
        x_cols.push(x.clone());
        y_cols.push(vec![f.zero(); dv]);
    }
    let x_inv = Matrix::from_columns(&f, dv, &x_cols)
        .inverse()
        .ok_or_else(|| Error::internal("P, ker and J do not span H(V)"))?;
    let m_v = Matrix::from_columns(&f, dv, &y_cols).mul(&x_inv);

    // M_U on the basis P_U ⊕ a(ker b) ⊕ J_U
    let a_ker_b = ker_b.image(a);
    let b_jcal = jcal.image(b);
    let jcal_u = b_jcal.sum(&complement(&im_a.sum(&b_jcal), &full_u, "jcal_u")?);
    let p_u = complement(&a_ker_b, &im_a, "p_u")?;
    let mut z_cols: Vec<Vec<F::Elem>> = Vec::with_capacity(du);
    let mut v_cols: Vec<Vec<F::Elem>> = Vec::with_capacity(du);
    for z in p_u.vectors() {
        v_cols.push(b.apply(&lift_value(z)?));
        z_cols.push(z.clone());
    }
    for z in a_ker_b.vectors().iter().chain(jcal_u.vectors()) {
        z_cols.push(z.clone());
        v_cols.push(vec![f.zero(); du]);
    }
    let z_inv = Matrix::from_columns(&f, du, &z_cols)
        .inverse()
        .ok_or_else(|| Error::internal("P_U, a(ker b) and J_U do not span H(U)"))?;
    let m_u = Matrix::from_columns(&f, du, &v_cols).mul(&z_inv);

    let degenerate = degenerate.into_inner();
    let dec = Decomposition { w, jcal, p, ker_b, lift, jcal_u, p_u, degenerate, lift_adapted };
    Ok((m_v, m_u, dec))
}

fn degree_monodromy<F: Field>(
    q: usize,
    i: Matrix<F>,
    j: Matrix<F>,
    options: MonodromyOptions,
) -> Result<(DegreeMonodromy<F>, Vec<Incompatibility>)> {
    let (m_v, m_u, forward) = one_direction(&i, &j, options, &Subspace::zero(i.field(), i.cols()))?;
    let fit_v = analyze_endo(&m_v)?;
    let (m_v_tilde, m_u_tilde, reversed) = one_direction(&j, &i, options, &fit_v.gim)?;
    let fit_u = analyze_endo(&m_u)?;
    let fit_v_tilde = analyze_endo(&m_v_tilde)?;
    let fit_u_tilde = analyze_endo(&m_u_tilde)?;
    let phi3 = fit_v.gim.restrict(&j, &fit_u.gim);
    let phi4 = fit_v_tilde.gim.restrict(&i, &fit_u_tilde.gim);
    let d = DegreeMonodromy {
        degree: q,
        i,
        j,
        m_v,
        m_u,
        m_v_tilde,
        m_u_tilde,
        fit_v,
        fit_u,
        fit_v_tilde,
        fit_u_tilde,
        phi3,
        phi4,
        forward,
        reversed,
    };
    let diags = check_degree(&d);
    Ok((d, diags))
}

fn render<F: Field>(f: &F, v: &[F::Elem]) -> String {
    let parts: Vec<String> = v.iter().map(|x| f.format(x)).collect();
    format!("({})", parts.join(","))
}

/// Runs every consistency check for one degree.
pub fn check_degree<F: Field>(d: &DegreeMonodromy<F>) -> Vec<Incompatibility> {
    let f = d.i.field().clone();
    let q = d.degree;
    let mut out = Vec::new();
    let mut fail = |check: &str, detail: String| {
        out.push(Incompatibility { degree: q, check: check.into(), detail });
    };

    for (name, a, b, m, dec) in [("v", &d.i, &d.j, &d.m_v, &d.forward), ("v_tilde", &d.j, &d.i, &d.m_v_tilde, &d.reversed)] {
        let expected_kernel = dec.ker_b.sum(&dec.jcal);
        if m.kernel() != expected_kernel {
            fail(&format!("{name}_kernel"), "kernel is not ker ⊕ J".into());
        }
        for x in dec.p.vectors() {
            if a.apply(&m.apply(x)) != b.apply(x) {
                fail(&format!("{name}_graph"), format!("relation fails at {}", render(&f, x)));
            }
        }
    }
    if d.m_u.mul(&d.j) != d.j.mul(&d.m_v) {
        fail("u_intertwines_j", "M_U ∘ j differs from j ∘ M_V".into());
    }
    if d.m_u_tilde.mul(&d.i) != d.i.mul(&d.m_v_tilde) {
        fail("u_tilde_intertwines_i", "M̃_U ∘ i differs from i ∘ M̃_V".into());
    }

    if d.fit_v.gim != d.fit_v_tilde.gim {
        fail("v_gim_equal", format!("dim gim(M_V) = {}, dim gim(M̃_V) = {}", d.fit_v.gim.dim(), d.fit_v_tilde.gim.dim()));
    } else if d.fit_v.restricted_inverse != d.fit_v_tilde.restricted {
        fail("v_inverse", "M̃_V on gim is not the inverse of M_V".into());
    }
    if d.fit_u.gim != d.fit_u_tilde.gim {
        fail("u_gim_equal", format!("dim gim(M_U) = {}, dim gim(M̃_U) = {}", d.fit_u.gim.dim(), d.fit_u_tilde.gim.dim()));
    } else if d.fit_u.restricted_inverse != d.fit_u_tilde.restricted {
        fail("u_inverse", "M̃_U on gim is not the inverse of M_U".into());
    }

    for (name, phi, src, tgt) in [
        ("u_phi3", &d.phi3, &d.fit_v.gim, &d.fit_u.gim),
        ("u_phi4", &d.phi4, &d.fit_v_tilde.gim, &d.fit_u_tilde.gim),
    ] {
        match phi {
            None => fail(name, "map does not send gim(M_V) into gim(M_U)".into()),
            Some(m) if src.dim() != tgt.dim() || m.inverse().is_none() => fail(
                name,
                format!("restriction {}→{} is not bijective", src.dim(), tgt.dim()),
            ),
            _ => {}
        }
    }
    let im_i = d.i.column_space();
    if !im_i.contains_space(&d.fit_u.gim) {
        fail("u_gim_in_im_i", "gim(M_U) is not inside im(i)".into());
    }
    if !im_i.contains_space(&d.fit_v.gim.image(&d.j)) {
        fail("j_gim_in_im_i", "j(gim(M_V)) is not inside im(i)".into());
    }
    out
}

/// A chain `c ∈ C_{q+1}(U)` with `∂c = j(rep θ) − i(rep M_V θ)`.
///
/// Fails with `NotInGim` when `θ` is not in the subspace `{x : j(x) ∈ im i}`
/// on which the relation holds.
pub fn translation_witness<F: Field>(ms: &MonodromySet<F>, q: usize, theta: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let d = ms.degree(q).ok_or_else(|| Error::invalid(format!("no monodromy in degree {q}")))?;
    let f = d.i.field().clone();
    if theta.len() != d.m_v.cols() {
        return Err(Error::invalid("class has the wrong dimension"));
    }
    let next = d.m_v.apply(theta);
    if d.i.apply(&next) != d.j.apply(theta) {
        return Err(Error::NotInGim(format!("j(θ) ≠ i(M_V θ) for θ = {}", render(&f, theta))));
    }
    let w = &ms.window;
    let rep = ms.hv.representative(q, theta);
    let rep_next = ms.hv.representative(q, &next);
    let jq = w.j.maps.get(q).cloned().unwrap_or_else(|| Matrix::zeros(&f, w.u.count(q), w.v.count(q)));
    let iq = w.i.maps.get(q).cloned().unwrap_or_else(|| Matrix::zeros(&f, w.u.count(q), w.v.count(q)));
    let target: Vec<F::Elem> =
        jq.apply(&rep).iter().zip(iq.apply(&rep_next)).map(|(a, b)| f.sub(a, &b)).collect();
    let dq1 = w.u.boundary(q + 1);
    dq1.solve(&target)
        .ok_or_else(|| Error::internal(format!("difference of translates is not a boundary in degree {q}")))
}
