mod common;

use cartan_core::algebroid::*;
use cartan_core::bundles::*;
use cartan_core::connections::*;
use cartan_core::jet::*;
use cartan_core::random::*;

use common::*;
use proptest::prelude::*;

fn same_jet(chart: &cartan_core::symcore::Chart, a: &JetSection, b: &JetSection) -> bool {
    let d = a.sub(b);
    d.base.all_zero("base", chart).passed() && d.phi.iter().all(|row| row.all_zero("phi", chart).passed())
}

fn is_zero_correction(chart: &cartan_core::symcore::Chart, phi: &Correction) -> bool {
    phi.iter().all(|row| row.all_zero("phi", chart).passed())
}

#[test]
fn kappa_examples() {
    let c = r3();
    let trivial = build_poisson_algebroid(c.clone(), &bivector(&c, &["0"; 9])).unwrap();
    let mut r = rng(1, 0);
    let phi = random_jet(&mut r, &c, 3, 2).phi;
    assert!(is_zero_correction(&c, &kappa(&trivial, &random_section(&mut r, &c, 3, 2), &phi).unwrap()));

    let p = unit_box(&["x", "y"]);
    let t = Algebroid::tangent(p.clone());
    let phi = vec![sec(&p, &["0", "1"]), Section::zero(2)];
    assert!(is_zero_correction(&p, &kappa(&t, &sec(&p, &["1", "0"]), &phi).unwrap()));

    let so3 = so3_action();
    let phi = vec![Section::basis(3, 1), Section::zero(3), Section::zero(3)];
    let k = kappa(&so3, &Section::basis(3, 0), &phi).unwrap();
    assert_eq!(k, vec![Section::basis(3, 2), Section::zero(3), Section::zero(3)]);

    assert!(kappa(&so3, &Section::basis(3, 0), &vec![Section::zero(3); 2]).is_err());
}

#[test]
fn jet_bracket_examples() {
    let so3 = so3_action();
    let c = so3.chart_arc().clone();
    let mut r = rng(2, 0);
    let (x, y) = (random_section(&mut r, &c, 3, 2), random_section(&mut r, &c, 3, 2));
    let b = jet_bracket(&so3, &JetSection::prolong(x.clone(), 3), &JetSection::prolong(y.clone(), 3)).unwrap();
    assert_eq!(b.base, so3.bracket(&x, &y).unwrap());
    assert!(is_zero_correction(&c, &b.phi));

    let (p1, p2) = (random_jet(&mut r, &c, 3, 1).phi, random_jet(&mut r, &c, 3, 1).phi);
    let b = jet_bracket(&so3, &JetSection::vertical(p1.clone(), 3), &JetSection::vertical(p2.clone(), 3)).unwrap();
    assert!(b.base.is_literal_zero());
    assert!(same_jet(&c, &b, &JetSection::vertical(fibre_bracket(&so3, &p1, &p2).unwrap(), 3)));
}

#[test]
fn adjoint_examples() {
    let so3 = so3_action();
    let c = so3.chart_arc().clone();
    let mut r = rng(3, 0);
    let (x, y) = (random_section(&mut r, &c, 3, 2), random_section(&mut r, &c, 3, 2));
    assert_eq!(adjoint_action(&so3, &JetSection::prolong(x.clone(), 3), &y).unwrap(), so3.bracket(&x, &y).unwrap());

    let bundle = base_pool().into_iter().find(|(n, _)| *n == "so3_bundle_r2").unwrap().1;
    let bc = bundle.chart_arc().clone();
    let s = JetSection::vertical(random_jet(&mut r, &bc, 3, 1).phi, 3);
    assert!(adjoint_action(&bundle, &s, &random_section(&mut r, &bc, 3, 1)).unwrap().is_literal_zero());
}

#[test]
fn tangent_adjoint_is_faithful_and_flat() {
    // on TM, ad_{(X, phi)} V = [X, V] - phi(V); a vertical jet acts by -phi, so ad is injective
    let p = unit_box(&["x", "y"]);
    let t = Algebroid::tangent(p.clone());
    let mut r = rng(4, 0);
    let s = JetSection::vertical(random_jet(&mut r, &p, 2, 1).phi, 2);
    for i in 0..2 {
        let ad = adjoint_action(&t, &s, &Section::basis(2, i)).unwrap();
        assert_eq!(ad, -&s.phi[i]);
    }
}

#[test]
fn splitting_examples() {
    let so3 = so3_action();
    let flat = TMConnection::zero(Bundle::Algebroid, 3, 3);
    let x = sec(so3.chart(), &["2", "-1", "3"]);
    let s = splitting_from_connection(&so3, &flat, &x).unwrap();
    assert!(same_jet(so3.chart(), &s, &JetSection::prolong(x, 3)));

    let x = sec(so3.chart(), &["x1", "0", "0"]);
    let s = splitting_from_connection(&so3, &flat, &x).unwrap();
    assert_eq!(s.phi[0], sec(so3.chart(), &["-1", "0", "0"]).canon());
    assert!(s.phi[1].is_literal_zero() && s.phi[2].is_literal_zero());

    for a in 0..3 {
        for b in 0..3 {
            let curv = splitting_curvature_full(&so3, &flat, &Section::basis(3, a), &Section::basis(3, b)).unwrap();
            assert!(curv.base.is_literal_zero());
            assert!(is_zero_correction(so3.chart(), &curv.phi));
        }
    }
    assert!(splitting_from_connection(&so3, &TMConnection::zero(Bundle::Algebroid, 3, 2), &x).is_err());
}

#[test]
fn flat_non_cartan_splitting_is_curved() {
    // frame d_x, (1/x) d_y declared parallel: flat, torsion (1/x) X2 not parallel
    let c = chart(&["x", "y"], &[((1, 1), (2, 1)), ((-1, 1), (1, 1))]);
    let omega = matrix(&c, &[&["1", "0"], &["0", "x"]]);
    let d = cartan_core::cartan::Parallelism::new(c.clone(), LieAlgebra::abelian(2), omega).unwrap().connection();
    let t = Algebroid::tangent(c.clone());
    let conn = d.with_target(Bundle::Algebroid);
    assert!(is_flat_tm(&c, &conn).passed());
    let curv = splitting_curvature(&t, &conn, &Section::basis(2, 0), &Section::basis(2, 1)).unwrap();
    assert!(!is_zero_correction(&c, &curv));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn jet_bracket_is_antisymmetric_and_jacobi(seed in any::<u64>(), k in 0usize..7) {
        let (_, g) = base_pool().swap_remove(k);
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 10);
        let s: Vec<JetSection> = (0..3).map(|_| random_jet(&mut r, &c, g.rank(), 1)).collect();
        let br = |a: &JetSection, b: &JetSection| jet_bracket(&g, a, b).unwrap();
        prop_assert!(same_jet(&c, &br(&s[0], &s[1]), &JetSection::vertical(zero_correction(c.dim(), g.rank()), g.rank()).sub(&br(&s[1], &s[0]))));
        let j = br(&br(&s[0], &s[1]), &s[2]).add(&br(&br(&s[1], &s[2]), &s[0])).add(&br(&br(&s[2], &s[0]), &s[1]));
        prop_assert!(same_jet(&c, &j, &JetSection::vertical(zero_correction(c.dim(), g.rank()), g.rank())));
    }

    /// `[s1, f s2] = f [s1, s2] + (#s1 f) s2`, module multiplication taken in split form.
    #[test]
    fn jet_bracket_is_leibniz(seed in any::<u64>(), k in 0usize..7) {
        let (_, g) = base_pool().swap_remove(k);
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 11);
        let (s1, s2) = (random_jet(&mut r, &c, g.rank(), 1), random_jet(&mut r, &c, g.rank(), 1));
        let f = random_poly(&mut r, &c, 2, 3, 2);
        let lhs = jet_bracket(&g, &s1, &s2.scale(&f)).unwrap();
        let df = directional(&jet_anchor(&g, &s1).unwrap(), &f);
        let rhs = jet_bracket(&g, &s1, &s2).unwrap().scale(&f).add(&s2.scale(&df));
        prop_assert!(same_jet(&c, &lhs, &rhs));
    }

    /// ad is a representation of the jet algebroid on g.
    #[test]
    fn adjoint_is_flat(seed in any::<u64>(), k in 0usize..7) {
        let (_, g) = base_pool().swap_remove(k);
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 12);
        let (s1, s2) = (random_jet(&mut r, &c, g.rank(), 1), random_jet(&mut r, &c, g.rank(), 1));
        let y = random_section(&mut r, &c, g.rank(), 2);
        let ad = |s: &JetSection, y: &Section| adjoint_action(&g, s, y).unwrap();
        let lhs = ad(&jet_bracket(&g, &s1, &s2).unwrap(), &y);
        let rhs = &ad(&s1, &ad(&s2, &y)) - &ad(&s2, &ad(&s1, &y));
        prop_assert!((&lhs - &rhs).all_zero("ad", &c).passed());
    }

    /// `ad . s` is the induced representation on g, and `ad . J1# . s` the one on TM.
    #[test]
    fn splitting_diagram_commutes(seed in any::<u64>(), k in 0usize..20) {
        let inst = random_instance(seed % 4, k).unwrap();
        let g = &inst.g;
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 13);
        let x = random_section(&mut r, &c, g.rank(), 1);
        let y = random_section(&mut r, &c, g.rank(), 1);
        let v = random_section(&mut r, &c, c.dim(), 1);
        let s = splitting_from_connection(g, &inst.conn, &x).unwrap();
        prop_assert_eq!(&s.base, &x);
        prop_assert_eq!(jet_anchor(g, &s).unwrap(), g.anchor_apply(&x).unwrap());

        let on_g = induced_rep_on_g(g, &inst.conn).unwrap();
        let lhs = adjoint_action(g, &s, &y).unwrap();
        prop_assert!((&lhs - &cov_deriv_g(g, &on_g, &x, &y).unwrap()).all_zero("z3", &c).passed());

        let tangent = Algebroid::tangent(c.clone());
        let on_tm = induced_rep_on_tm(g, &inst.conn).unwrap();
        let lhs = adjoint_action(&tangent, &prolonged_anchor(g, &s).unwrap(), &v).unwrap();
        prop_assert!((&lhs - &cov_deriv_g(g, &on_tm, &x, &v).unwrap()).all_zero("z4", &c).passed());
    }

    #[test]
    fn splitting_curvature_has_zero_base(seed in any::<u64>(), k in 0usize..20) {
        let inst = random_instance(seed % 4, k).unwrap();
        let g = &inst.g;
        let mut r = rng(seed, 14);
        let x = random_section(&mut r, g.chart(), g.rank(), 1);
        let y = random_section(&mut r, g.chart(), g.rank(), 1);
        let curv = splitting_curvature_full(g, &inst.conn, &x, &y).unwrap();
        prop_assert!(curv.base.all_zero("base", g.chart()).passed());
    }
}

