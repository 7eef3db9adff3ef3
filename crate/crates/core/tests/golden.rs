//! Fixed values on the shipped example complexes.

use std::path::PathBuf;

use perihom::exactla::Matrix;
use perihom::io::{ChainFile, ComplexFile};
use perihom::monodromy::{build_monodromy, MonodromyOptions, MonodromySet};
use perihom::periodic::{build_quotient, build_window, normalize, PeriodicComplex};
use perihom::persistence::{analyze_filtration, check_unimodality, toroidal_timeline, Side};
use perihom::toroidal::{classify, is_toroidal, recover};
use perihom::{Fp, Rationals};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> ComplexFile {
    ComplexFile::parse(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn f2(name: &str) -> PeriodicComplex<Fp> {
    load(name).build(&Fp::new(2).unwrap()).unwrap()
}

fn monodromy(p: &PeriodicComplex<Fp>) -> MonodromySet<Fp> {
    build_monodromy(&build_window(p).unwrap(), MonodromyOptions::default()).unwrap()
}

fn m(rows: &[&[i64]]) -> Matrix<Fp> {
    Matrix::from_i64(&Fp::new(2).unwrap(), rows)
}

#[test]
fn running_window_maps() {
    let ms = monodromy(&f2("running.json"));
    assert_eq!(ms.hu.betti(0), 2);
    assert_eq!(ms.hv.betti(0), 3);
    let d = ms.degree(0).unwrap();
    assert_eq!(d.i, m(&[&[1, 1, 0], &[0, 0, 1]]));
    assert_eq!(d.j, m(&[&[1, 0, 1], &[0, 1, 0]]));
    // the window is a forest, so nothing happens in degree 1
    assert_eq!(ms.hv.betti(1), 0);
}

#[test]
fn running_monodromy_matrices() {
    let ms = monodromy(&f2("running.json"));
    let d = ms.degree(0).unwrap();
    assert_eq!(d.m_u, m(&[&[1, 1], &[0, 0]]));
    assert_eq!(d.m_v, m(&[&[1, 0, 1], &[0, 0, 0], &[0, 1, 0]]));
    let both = m(&[&[1, 1, 1], &[0, 0, 0]]);
    assert_eq!(d.m_u.mul(&d.j), both);
    assert_eq!(d.j.mul(&d.m_v), both);
    assert!(ms.diagnostics.is_empty());
}

#[test]
fn running_generalized_images() {
    let ms = monodromy(&f2("running.json"));
    let d = ms.degree(0).unwrap();
    assert_eq!(d.fit_v.gim.dim(), 1);
    assert_eq!(d.fit_v.gker.dim(), 2);
    assert_eq!(d.fit_u.gim.dim(), 1);
    assert_eq!(d.fit_u.gker.dim(), 1);
    // (1,0,0) is the class M_V fixes. The sum (1,1,0) of the first two
    // classes is not in gim: M_V sends it to (1,0,1).
    assert_eq!(d.fit_v.gim.vectors(), &[vec![1, 0, 0]]);
    assert_eq!(d.m_v.apply(&[1, 1, 0]), vec![1, 0, 1]);
    assert_eq!(d.fit_v_tilde.gim, d.fit_v.gim);
}

#[test]
fn running_quotient_three() {
    let p = f2("running.json");
    let ms = monodromy(&p);
    let c = classify(&p, &ms, 3, None).unwrap();
    let k1 = &c.degrees[1];
    assert_eq!(k1.betti, 4);
    assert_eq!(k1.image.space.dim(), 3);
    assert_eq!(k1.toroidal_dim, 1);
    assert!(k1.iso);
    assert_eq!(k1.winding, vec![Some(1)]);

    let g = build_quotient(&p, 3).unwrap();
    let cycle = |name: &str| {
        let chain = ChainFile::parse(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        chain.to_vector(&p, &g).unwrap()
    };
    let red = is_toroidal(&p, &ms, &g, 1, &cycle("running_red_cycle.json")).unwrap();
    assert!(red.toroidal && red.psi0_agrees);
    let green = is_toroidal(&p, &ms, &g, 1, &cycle("running_green_cycle.json")).unwrap();
    assert!(!green.toroidal && green.psi0_agrees);
}

#[test]
fn running_recovery_at_one_and_three() {
    let p = f2("running.json");
    let ms = monodromy(&p);
    let theta = ms.degree(0).unwrap().fit_v.gim.vectors()[0].clone();
    for n in [1, 3] {
        let rec = recover(&p, &ms, n, 0, &theta).unwrap();
        assert_eq!(rec.n_used, n);
        assert_eq!(rec.period, 1);
        let v = is_toroidal(&p, &ms, &rec.quotient, 1, &rec.chain).unwrap();
        assert!(v.toroidal && v.psi0_agrees, "n = {n}");
    }
}

#[test]
fn running_over_q_matches_f2_dimensions() {
    let p = load("running_q.json").build(&Rationals).unwrap();
    let ms = build_monodromy(&build_window(&p).unwrap(), MonodromyOptions::default()).unwrap();
    assert!(ms.diagnostics.is_empty());
    assert_eq!(ms.gim_dim_v(0), 1);
    let c = classify(&p, &ms, 3, None).unwrap();
    assert_eq!(c.degrees[1].toroidal_dim, 1);
}

#[test]
fn periodic_line() {
    let p = f2("periodic_line.json");
    let ms = monodromy(&p);
    assert_eq!(ms.gim_dim_v(0), 1);
    for n in 1..=4 {
        let c = classify(&p, &ms, n, None).unwrap();
        assert_eq!(c.degrees[1].betti, 1);
        assert_eq!(c.degrees[1].toroidal_dim, 1, "n = {n}");
    }
}

#[test]
fn reversed_and_doubled_lines_normalize() {
    // two periods apart, the edge orbit is two disjoint lines: G_1 of the
    // coarsened complex has two independent loops
    for (name, factor, loops) in [("line_reversed.json", 1, 1), ("line_shift2.json", 2, 2)] {
        let p = f2(name);
        let norm = normalize(&p).unwrap();
        assert!(norm.complex.is_normalized(), "{name}");
        assert_eq!(norm.period_factor, factor, "{name}");
        let ms = monodromy(&norm.complex);
        let c = classify(&norm.complex, &ms, 1, None).unwrap();
        assert_eq!(c.degrees[1].toroidal_dim, loops, "{name}");
    }
}

#[test]
fn tube_two_cycle_from_degree_one_class() {
    for name in ["periodic_tube.json", "periodic_tube_q.json"] {
        let file = load(name);
        let (toroidal_2, recovered) = match file.field {
            perihom::FieldSpec::Rationals => tube_case(&file.build(&Rationals).unwrap()),
            _ => tube_case(&file.build(&Fp::new(2).unwrap()).unwrap()),
        };
        assert_eq!(toroidal_2, 1, "{name}");
        assert!(recovered, "{name}");
    }
}

fn tube_case<F: perihom::Field>(p: &PeriodicComplex<F>) -> (usize, bool) {
    let ms = build_monodromy(&build_window(p).unwrap(), MonodromyOptions::default()).unwrap();
    assert!(ms.diagnostics.is_empty());
    assert_eq!(ms.gim_dim_v(1), 1);
    let c = classify(p, &ms, 1, None).unwrap();
    let theta = ms.degree(1).unwrap().fit_v.gim.vectors()[0].clone();
    let rec = recover(p, &ms, 1, 1, &theta).unwrap();
    let v = is_toroidal(p, &ms, &rec.quotient, 2, &rec.chain).unwrap();
    (c.degrees[2].toroidal_dim, v.toroidal && v.psi0_agrees)
}

#[test]
fn filtration_matrices() {
    let p = f2("running_filtered.json");
    let fa = analyze_filtration(&p, MonodromyOptions::default()).unwrap();
    assert_eq!(fa.steps.len(), 7);
    let expected_mv = [
        m(&[&[0]]),
        m(&[&[0, 0], &[0, 0]]),
        m(&[&[0, 0], &[1, 0]]),
        m(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]),
        m(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]),
        m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
        m(&[&[1, 0, 1], &[0, 0, 0], &[0, 1, 0]]),
    ];
    for (k, want) in expected_mv.iter().enumerate() {
        assert_eq!(&fa.steps[k].monodromy.degree(0).unwrap().m_v, want, "M_V at step {}", k + 1);
    }
    let dims = [1, 2, 2, 3, 3, 3, 3];
    for k in 0..7 {
        for l in k..7 {
            let iota = fa.iota(Side::V, 0, k, l).unwrap();
            let want = match (k, l) {
                (a, b) if a == b => Matrix::identity(&Fp::new(2).unwrap(), dims[a]),
                (0, 1) | (0, 2) => m(&[&[1], &[0]]),
                (0, _) => m(&[&[1], &[0], &[0]]),
                (1 | 2, b) if b > 2 => m(&[&[1, 0], &[0, 1], &[0, 0]]),
                _ => Matrix::identity(&Fp::new(2).unwrap(), dims[k]),
            };
            assert_eq!(iota, &want, "iota {} {}", k + 1, l + 1);
        }
    }
}

#[test]
fn filtration_commutation_pairs() {
    let p = f2("running_filtered.json");
    let fa = analyze_filtration(&p, MonodromyOptions::default()).unwrap();
    let failing: Vec<(usize, usize)> =
        fa.commutation_log.iter().filter(|c| c.degree == 0).map(|c| (c.k + 1, c.l + 1)).collect();
    assert!(failing.contains(&(2, 3)));
    for k in 1..=7 {
        for l in k..=7 {
            let commutes = !failing.contains(&(k, l));
            let listed = k == l || (k, l) == (1, 2) || (k, l) == (3, 4);
            assert_eq!(commutes, listed, "({k},{l})");
        }
    }
    let iota23 = fa.iota(Side::V, 0, 1, 2).unwrap();
    assert!(iota23.mul(&fa.steps[1].monodromy.degree(0).unwrap().m_v).is_zero());
    assert!(!fa.steps[2].monodromy.degree(0).unwrap().m_v.mul(iota23).is_zero());
}

#[test]
fn filtration_unimodal_and_timeline() {
    let p = f2("running_filtered.json");
    let fa = analyze_filtration(&p, MonodromyOptions::default()).unwrap();
    for v in check_unimodality(&fa) {
        assert!(v.holds, "degree {}: {:?}", v.degree, v.violations);
    }
    let t = toroidal_timeline(&fa, 1).unwrap();
    // at n = 1 the triangle d1 + d2 + g already wraps once when g arrives
    let dims: Vec<usize> = t.per_step.iter().map(|(_, c)| c.degrees.get(1).map_or(0, |d| d.toroidal_dim)).collect();
    assert_eq!(dims, vec![0, 0, 0, 0, 0, 1, 1]);
}
