mod common;

use cartan_core::algebroid::*;
use cartan_core::bundles::Section;
use cartan_core::error::Error;
use cartan_core::random::{base_pool, lie_poisson_so3, random_instances, rng, random_poly, unit_box};
use cartan_core::symcore::{canon, differentiate, Expr};
use common::*;
use proptest::prelude::*;

#[test]
fn lie_algebra_constants_are_checked() {
    assert!(LieAlgebra::so3().dim() == 3);
    // antisymmetry violated
    assert!(LieAlgebra::from_ints(&[vec![vec![0], vec![0]], vec![vec![1], vec![0]]]).is_err());
    // [e0,e1] = e1, [e0,e2] = e1, [e1,e2] = e0 fails Jacobi
    let bad = vec![
        vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 1, 0]],
        vec![vec![0, -1, 0], vec![0, 0, 0], vec![1, 0, 0]],
        vec![vec![0, -1, 0], vec![-1, 0, 0], vec![0, 0, 0]],
    ];
    assert!(matches!(LieAlgebra::from_ints(&bad), Err(Error::NotLieAlgebra(_))));
}

#[test]
fn bracket_examples() {
    let c = unit_box(&["x", "y"]);
    let t = Algebroid::tangent(c.clone());
    let b = t.bracket(&sec(&c, &["1", "0"]), &sec(&c, &["x", "0"])).unwrap();
    assert_eq!(b, sec(&c, &["1", "0"]));

    let abelian = build_action_algebroid(c.clone(), &LieAlgebra::abelian(2), &[sec(&c, &["1", "0"]), sec(&c, &["0", "1"])]).unwrap();
    assert!(abelian.bracket(&sec(&c, &["2", "3"]), &sec(&c, &["-1", "5"])).unwrap().is_literal_zero());
    assert_eq!(abelian.anchor()[0][0], Expr::one());
    assert!(abelian.anchor()[0][1].is_literal_zero());

    let so3 = so3_action();
    assert_eq!(so3.bracket(&Section::basis(3, 0), &Section::basis(3, 1)).unwrap(), Section::basis(3, 2));
}

#[test]
fn bracket_rejects_wrong_rank() {
    let so3 = so3_action();
    assert!(so3.bracket(&Section::basis(2, 0), &Section::basis(3, 1)).is_err());
    assert!(so3.anchor_apply(&Section::basis(2, 0)).is_err());
}

#[test]
fn anchor_examples() {
    let c = unit_box(&["x", "y"]);
    let t = Algebroid::tangent(c.clone());
    let v = sec(&c, &["x*y", "sin(x)"]);
    assert_eq!(t.anchor_apply(&v).unwrap(), v);
    assert!(so3_action().anchor_apply(&Section::zero(3)).unwrap().is_literal_zero());

    let r3 = r3();
    let dual = build_poisson_algebroid(r3.clone(), &lie_poisson_so3(&r3)).unwrap();
    let sharp = dual.anchor_apply(&Section::basis(3, 0)).unwrap();
    assert!((&sharp - &sec(&r3, &["0", "x3", "-x2"])).all_zero("sharp", &r3).passed());
}

#[test]
fn validate_examples() {
    assert!(Algebroid::tangent(unit_box(&["x", "y", "z"])).validate().passed());
    assert!(so3_action().validate().passed());

    let so3 = so3_action();
    let mut structure = so3.structure().to_vec();
    let c = so3.chart_arc().clone();
    structure[0][1][2] = ex(&c, "1 + x1");
    structure[1][0][2] = ex(&c, "-1 - x1");
    let bad = Algebroid::new(c, so3.anchor().to_vec(), structure).unwrap();
    let v = bad.validate();
    assert!(v.failed());
    let hom = v.find("anchor_hom").unwrap();
    assert!(hom.failed() && hom.witness.is_some());
}

#[test]
fn action_builder_rejects_non_actions() {
    let c = r3();
    let mut f = so3_fields(&c);
    f[0] = &Section::zero(3) - &f[0];
    match build_action_algebroid(c, &LieAlgebra::so3(), &f) {
        Err(Error::NotAction { witness, .. }) => assert!(witness.value.abs() > 0.0),
        other => panic!("expected rejection, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn poisson_builder_examples() {
    let c = r3();
    let zero = bivector(&c, &["0"; 9]);
    let g = build_poisson_algebroid(c.clone(), &zero).unwrap();
    assert!(g.anchor().iter().flatten().all(Expr::is_literal_zero));
    assert!(g.structure().iter().flatten().flatten().all(Expr::is_literal_zero));

    let dual = build_poisson_algebroid(c.clone(), &lie_poisson_so3(&c)).unwrap();
    assert!(dual.validate().passed());
    for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        assert_eq!(dual.c(a, b, k), &Expr::one());
        assert_eq!(dual.c(b, a, k), &Expr::int(-1));
    }

    let bad = bivector(&c, &["0", "x3", "x1", "-x3", "0", "0", "-x1", "0", "0"]);
    assert!(matches!(build_poisson_algebroid(c.clone(), &bad), Err(Error::NotPoisson { .. })));
    let asym = bivector(&c, &["0", "1", "0", "1", "0", "0", "0", "0", "0"]);
    assert!(matches!(build_poisson_algebroid(c, &asym), Err(Error::NotAntisymmetric(_))));
}

#[test]
fn poisson_anchor_convention() {
    // #dx^b = Pi^{bi} d_i, so <dx^a, #dx^b> = Pi^{ba}
    let c = r3();
    for pi in [lie_poisson_so3(&c), bivector(&c, &["0", "x1*x2 + x3", "0", "-x1*x2 - x3", "0", "0", "0", "0", "0"])] {
        let g = build_poisson_algebroid(c.clone(), &pi).unwrap();
        assert!(g.validate().passed());
        for a in 0..3 {
            for b in 0..3 {
                let sharp_b = g.anchor_apply(&Section::basis(3, b)).unwrap();
                assert!(agree(&c, &sharp_b[a], pi.get(&[b, a])), "pairing ({}, {})", a, b);
            }
        }
    }
}

#[test]
fn poisson_bracket_on_coordinate_forms() {
    // [dx^a, dx^b] = d Pi^{ab}
    let c = r3();
    let pi = lie_poisson_so3(&c);
    let g = build_poisson_algebroid(c.clone(), &pi).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let br = g.bracket(&Section::basis(3, a), &Section::basis(3, b)).unwrap();
            for k in 0..3 {
                assert_eq!(canon(&(&br[k] - differentiate(pi.get(&[a, b]), k))), Expr::zero());
            }
        }
    }
}

#[test]
fn foliation_builder_examples() {
    let c = r3();
    let flat = build_foliation_algebroid(c.clone(), &[sec(&c, &["1", "0", "0"]), sec(&c, &["0", "1", "0"])]).unwrap();
    assert!(flat.structure().iter().flatten().flatten().all(Expr::is_literal_zero));

    let twisted = build_foliation_algebroid(c.clone(), &[sec(&c, &["1", "0", "0"]), sec(&c, &["0", "x1", "1"])]);
    assert!(matches!(twisted, Err(Error::NotIntegrable { .. })));

    let g = build_foliation_algebroid(c.clone(), &[sec(&c, &["1", "0", "0"]), sec(&c, &["0", "1 + x1^2", "0"])]).unwrap();
    assert!(agree(&c, g.c(0, 1, 1), &ex(&c, "2*x1/(1 + x1^2)")));
    assert!(g.c(0, 1, 0).is_literal_zero() || agree(&c, g.c(0, 1, 0), &Expr::zero()));
    assert!(g.validate().passed());

    let degenerate = build_foliation_algebroid(c.clone(), &[sec(&c, &["1", "0", "0"]), sec(&c, &["2", "0", "0"])]);
    assert!(matches!(degenerate, Err(Error::DegenerateFrame { .. })));
}

#[test]
fn orbit_rank_examples() {
    let t = Algebroid::tangent(unit_box(&["x", "y"]));
    let rep = t.orbit_report().unwrap();
    assert!(rep.transitive && rep.regular);
    assert!(rep.ranks.iter().all(|&k| k == 2));

    let so3 = so3_action();
    assert_eq!(so3.orbit_rank(&[1.0, 0.0, 0.0]).unwrap(), 2);
    assert_eq!(so3.orbit_rank(&[0.0, 0.0, 0.0]).unwrap(), 0);
    assert!(!so3.orbit_report().unwrap().transitive);

    let c = r3();
    let zero = build_poisson_algebroid(c.clone(), &bivector(&c, &["0"; 9])).unwrap();
    assert!(zero.orbit_report().unwrap().ranks.iter().all(|&k| k == 0));
}

#[test]
fn pool_and_random_frames_are_algebroids() {
    for (name, g) in base_pool() {
        assert!(g.validate().passed(), "{}", name);
    }
    for inst in random_instances(5, 7).unwrap() {
        assert!(inst.g.validate().passed(), "{}", inst.label);
    }
}

#[test]
fn constructor_checks_shapes() {
    let c = unit_box(&["x"]);
    let anchor = vec![vec![Expr::one(), Expr::zero()]];
    assert!(Algebroid::new(c, anchor, vec![vec![vec![Expr::zero(); 2]; 2]; 1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    /// `[X, fY] = f[X,Y] + (#X f) Y` for arbitrary polynomial sections and functions.
    #[test]
    fn bracket_is_leibniz(seed in any::<u64>(), k in 0usize..7) {
        let (_, g) = base_pool().swap_remove(k);
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 3);
        let x = cartan_core::random::random_section(&mut r, &c, g.rank(), 2);
        let y = cartan_core::random::random_section(&mut r, &c, g.rank(), 2);
        let f = random_poly(&mut r, &c, 2, 3, 3);
        let lhs = g.bracket(&x, &y.scale(&f)).unwrap();
        let sharp = g.anchor_apply(&x).unwrap();
        let df = Expr::sum((0..c.dim()).map(|i| &sharp[i] * &differentiate(&f, i)));
        let rhs = &g.bracket(&x, &y).unwrap().scale(&f) + &y.scale(&df);
        prop_assert!((&lhs - &rhs).all_zero("leibniz", &c).passed());
    }

    /// The anchor is a bracket homomorphism on arbitrary sections.
    #[test]
    fn anchor_is_a_homomorphism(seed in any::<u64>(), k in 0usize..7) {
        let (_, g) = base_pool().swap_remove(k);
        let c = g.chart_arc().clone();
        let mut r = rng(seed, 4);
        let x = cartan_core::random::random_section(&mut r, &c, g.rank(), 2);
        let y = cartan_core::random::random_section(&mut r, &c, g.rank(), 2);
        let lhs = g.anchor_apply(&g.bracket(&x, &y).unwrap()).unwrap();
        let rhs = cartan_core::bundles::vf_bracket(&c, &g.anchor_apply(&x).unwrap(), &g.anchor_apply(&y).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).all_zero("hom", &c).passed());
    }
}
