mod common;

use cartan_core::algebroid::*;
use cartan_core::bundles::*;
use cartan_core::cartan::*;
use cartan_core::connections::*;
use cartan_core::error::Error;
use cartan_core::random::*;
use cartan_core::symcore::{canon, differentiate, parse_expr, Expr};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn affine() -> (Algebroid, TMConnection) {
    let c = chart(&["a", "b"], &[((1, 2), (2, 1)), ((-1, 1), (1, 1))]);
    let p = Parallelism::new(c.clone(), LieAlgebra::aff1(), matrix(&c, &[&["1/a", "0"], &["0", "1/a"]])).unwrap();
    (Algebroid::tangent(c), p.connection().with_target(Bundle::Algebroid))
}

fn symmetrized(base: &TMConnection) -> TMConnection {
    let n = base.dim();
    let gamma = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| canon(&(base.g(i, j, k) + base.g(j, i, k)))).collect()).collect())
        .collect();
    TMConnection::new(Bundle::Tangent, gamma).unwrap()
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

#[test]
fn poisson_examples() {
    let c = r3();
    let so3 = poisson_report(c.clone(), &lie_poisson_so3(&c), &TMConnection::zero(Bundle::Tangent, 3, 3)).unwrap();
    assert!(so3.verdict.passed(), "{:?}", so3.verdict);
    assert_eq!(so3.verdict.note.as_deref(), Some("locally_action_algebroid"));

    let r2 = unit_box(&["x", "y"]);
    let flat = TMConnection::zero(Bundle::Tangent, 2, 2);
    let sym = poisson_report(r2.clone(), &bivector(&r2, &["0", "1", "-1", "0"]), &flat).unwrap();
    assert!(sym.verdict.passed(), "{:?}", sym.verdict);

    let bent = poisson_report(r2.clone(), &bivector(&r2, &["0", "1+x^2", "-1-x^2", "0"]), &flat).unwrap();
    assert!(bent.verdict.find("torsion_free").unwrap().passed());
    let sx = bent.verdict.find("lemma_sx").unwrap();
    assert!(sx.failed() && sx.witness.is_some());
    assert!(!check_cartan(&bent.algebroid, &bent.connection).unwrap().passed());
    assert!(bent.verdict.find("lemma_consistency").unwrap().passed());
}

#[test]
fn poisson_rejects_torsion_and_bad_shapes() {
    let c = r3();
    let pi = lie_poisson_so3(&c);
    let mut gamma = vec![vec![vec![Expr::zero(); 3]; 3]; 3];
    gamma[0][1][2] = Expr::one();
    let twisted = TMConnection::new(Bundle::Tangent, gamma).unwrap();
    let rep = poisson_report(c.clone(), &pi, &twisted).unwrap();
    assert!(rep.verdict.find("torsion_free").unwrap().failed());
    assert!(matches!(poisson_report(c.clone(), &pi, &TMConnection::zero(Bundle::Tangent, 2, 2)), Err(Error::Shape(_))));
}

#[test]
fn cotangent_connection_is_minus_transpose() {
    let c = unit_box(&["x", "y"]);
    let conn = random_tm_connection(&mut rng(8, 0), &c, 2, 1);
    let cot = cotangent_connection(&conn).unwrap();
    for i in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(cot.g(i, a, b), &canon(&-conn.g(i, b, a)));
            }
        }
    }
}

#[test]
fn lemma_sx_matches_compat_on_torsion_free_connections() {
    let c = r3();
    let pi = lie_poisson_so3(&c);
    let mut r = rng(5, 0);
    for _ in 0..3 {
        let conn = symmetrized(&random_tm_connection(&mut r, &c, 3, 1));
        let sx = lemma_sx_tensor(c.clone(), &pi, &conn).unwrap();
        let rep = poisson_report(c.clone(), &pi, &conn).unwrap();
        let compat = compat_tensor(&rep.algebroid, &rep.connection).unwrap();
        assert!(compat.all_zero("c", &c).failed());
        assert!(sx.sub(&compat).unwrap().all_zero("sx", &c).passed());
        assert!(rep.verdict.find("lemma_consistency").unwrap().passed());
    }
}

#[test]
fn parallelism_examples() {
    let c = chart(&["x", "y"], &[((1, 1), (2, 1)), ((-1, 1), (1, 1))]);
    let abelian = LieAlgebra::abelian(2);

    let trivial = parallelism_report(&Parallelism::new(c.clone(), abelian.clone(), matrix(&c, &[&["1", "0"], &["0", "1"]])).unwrap()).unwrap();
    assert!(trivial.curvature.all_zero("o", &c).passed());
    assert_eq!(trivial.verdict.note.as_deref(), Some("maurer_cartan_holds"));
    assert!(trivial.verdict.passed());

    let bent = parallelism_report(&Parallelism::new(c.clone(), abelian, matrix(&c, &[&["1", "0"], &["0", "x"]])).unwrap()).unwrap();
    assert!(agree(&c, bent.curvature.get(&[1, 0, 1]), &ex(&c, "1")));
    assert!(bent.verdict.find("curvature_zero").unwrap().failed());
    assert!(bent.verdict.find("d_flat").unwrap().passed());
    assert!(bent.verdict.find("torsion_is_d_omega").unwrap().passed());

    let a = chart(&["a", "b"], &[((1, 2), (2, 1)), ((-1, 1), (1, 1))]);
    let aff = parallelism_report(&Parallelism::new(a.clone(), LieAlgebra::aff1(), matrix(&a, &[&["1/a", "0"], &["0", "1/a"]])).unwrap()).unwrap();
    assert!(aff.curvature.all_zero("o", &a).passed());
    let c3 = aff.verdict.find("theorem_c").unwrap();
    assert!(c3.passed());
    assert_eq!(c3.note.as_deref(), Some("locally_symmetric"));

    assert!(matches!(
        Parallelism::new(c.clone(), LieAlgebra::abelian(2), matrix(&c, &[&["1", "0"], &["0", "0"]])),
        Err(Error::SingularParallelism { .. })
    ));
}

#[test]
fn affine_connection_torsion() {
    let (g, left) = affine();
    // T(d_a, d_b) = nabla_a d_b - nabla_b d_a
    let t = left.g(0, 1, 1) - left.g(1, 0, 1);
    assert!(agree(g.chart(), &t, &ex(g.chart(), "-1/a")));
    assert!(agree(g.chart(), &(left.g(0, 1, 0) - left.g(1, 0, 0)), &Expr::zero()));
    assert!(check_cartan(&g, &left).unwrap().passed());
}

#[test]
fn invariant_calculus_on_random_instances() {
    for k in 0..7 {
        let inst = random_instance(11, k).unwrap();
        let g = &inst.g;
        let mut r = rng(11, 100 + k as u64);
        let flat = random_flat_rep(&mut r, g).unwrap();
        let scalar = scalar_rep(g);
        let th = random_one_form(&mut r, g, 1, 2);
        let d1 = exterior_derivative(g, &scalar, &th).unwrap();
        assert!(exterior_derivative(g, &scalar, &d1).unwrap().all_zero("dd", g.chart()).passed(), "{}", inst.label);
        assert!(d_theta_defect(g, &flat, &scalar, &th).unwrap().all_zero("id", g.chart()).passed(), "{}", inst.label);

        let thg = random_one_form(&mut r, g, g.rank(), 2);
        let d1 = exterior_derivative(g, &flat, &thg).unwrap();
        assert!(exterior_derivative(g, &flat, &d1).unwrap().all_zero("dd", g.chart()).passed(), "{}", inst.label);
        assert!(d_theta_defect(g, &flat, &flat, &thg).unwrap().all_zero("id", g.chart()).passed(), "{}", inst.label);
        assert!(tautological_checks(g, &flat).unwrap().passed(), "{}", inst.label);
    }
}

#[test]
fn d_theta_identity_holds_in_degree_two() {
    let inst = random_instance(12, 1).unwrap();
    let g = &inst.g;
    let mut r = rng(12, 7);
    let flat = random_flat_rep(&mut r, g).unwrap();
    let scalar = scalar_rep(g);
    let two = exterior_derivative(g, &scalar, &random_one_form(&mut r, g, 1, 2)).unwrap();
    assert!(d_theta_defect(g, &flat, &scalar, &two).unwrap().all_zero("id", g.chart()).passed());
}

#[test]
fn tautological_form_on_the_affine_group() {
    let (g, left) = affine();
    let nbar = induced_rep_on_g(&g, &left).unwrap();
    assert!(is_flat_g(&g, &nbar).unwrap().passed());
    let v = tautological_checks(&g, &nbar).unwrap();
    assert!(v.passed(), "{:?}", v);
    let d = exterior_derivative(&g, &nbar, &tautological_form(&g)).unwrap();
    assert!(d.all_zero("d", g.chart()).failed());
}

#[test]
fn invariant_calculus_rejects_bad_input() {
    let g = so3_action();
    let c = g.chart_arc().clone();
    let mut coeffs = vec![vec![vec![Expr::zero(); 3]; 3]; 3];
    coeffs[0][0][1] = ex(&c, "x1");
    let curved = GConnection::new(Bundle::Algebroid, coeffs).unwrap();
    assert!(is_flat_g(&g, &curved).unwrap().failed());
    let th = random_one_form(&mut rng(2, 0), &g, 3, 1);
    assert!(matches!(exterior_derivative(&g, &curved, &th), Err(Error::NotFlat(_))));
    let not_alt = TensorField::from_fn(vec![Slot::LOW_G, Slot::LOW_G, Slot::UP_G], vec![3, 3, 1], |i| if i[0] == 0 && i[1] == 1 { Expr::one() } else { Expr::zero() });
    assert!(matches!(exterior_derivative(&g, &scalar_rep(&g), &not_alt), Err(Error::NotAntisymmetric(_))));
    let three = TensorField::from_fn(vec![Slot::LOW_G; 3].into_iter().chain([Slot::UP_G]).collect(), vec![3, 3, 3, 1], |_| Expr::zero());
    assert!(matches!(exterior_derivative(&g, &scalar_rep(&g), &three), Err(Error::Degree(3))));
}

#[test]
fn duality_and_scorch_on_random_instances() {
    for k in 0..20 {
        let inst = random_instance(13, k).unwrap();
        let g = &inst.g;
        let mut r = rng(13, 200 + k as u64);
        let conn = random_g_connection(&mut r, g, Bundle::Algebroid, g.rank(), 1);
        let v = duality_battery(g, &conn).unwrap();
        assert!(v.passed(), "{}: {:?}", inst.label, v);
        let star = random_flat_rep(&mut r, g).unwrap();
        let s = scorch_check(g, &star).unwrap();
        assert!(s.passed(), "{}: {:?}", inst.label, s);
    }
}

#[test]
fn scorch_on_the_affine_group() {
    // nabla* flat with parallel torsion, so the left-invariant nabla is flat too
    let (g, left) = affine();
    let nabla = induced_rep_on_g(&g, &left).unwrap();
    let star = dual_connection(&g, &nabla).unwrap();
    let s = scorch_check(&g, &star).unwrap();
    assert!(s.passed());
    assert!(s.find("flat").unwrap().passed());
    assert!(s.find("torsion_parallel").unwrap().passed());
}

#[test]
fn scorch_with_curved_dual() {
    // flat nabla* on TM whose torsion is not parallel: nabla fails to be flat, consistently
    let c = chart(&["x", "y"], &[((1, 1), (2, 1)), ((-1, 1), (1, 1))]);
    let g = Algebroid::tangent(c.clone());
    let d = Parallelism::new(c.clone(), LieAlgebra::abelian(2), matrix(&c, &[&["1", "0"], &["0", "x"]])).unwrap().connection();
    let star = GConnection::new(Bundle::Algebroid, d.gamma().clone()).unwrap();
    let s = scorch_check(&g, &star).unwrap();
    assert!(s.passed());
    assert!(s.find("flat").unwrap().failed());
    assert!(s.find("torsion_parallel").unwrap().failed());
}

#[test]
fn holonomy_of_a_flat_connection_is_trivial() {
    let c = unit_box(&["x", "y"]);
    let r = holonomy_check(&c, &TMConnection::zero(Bundle::Tangent, 2, 2), &[0.1, 0.2], (0, 1), 0.05, &HolonomyOptions::default()).unwrap();
    assert!(r.relative_error < 1e-12);
    assert!((to_matrix(&r.holonomy) - DMatrix::identity(2, 2)).norm() < 1e-12);

    let (g, left) = affine();
    let r = holonomy_check(g.chart(), &left, &[1.0, 0.0], (0, 1), 0.05, &HolonomyOptions::default()).unwrap();
    assert!(r.defect_norm < 1e-10);
}

#[test]
fn holonomy_matches_sphere_curvature() {
    let s = sphere_chart();
    let lc = levi_civita(&s, &metric(&s, &["1", "0", "0", "sin(th)^2"])).unwrap();
    for p in [[1.2, 0.7], [0.8, 1.5], [2.0, 2.0]] {
        let fwd = holonomy_check(&s, &lc, &p, (0, 1), 0.01, &HolonomyOptions::default()).unwrap();
        assert!(fwd.relative_error <= 1e-2, "{:?}: {}", p, fwd.relative_error);
        let back = holonomy_check(&s, &lc, &p, (1, 0), 0.01, &HolonomyOptions::default()).unwrap();
        assert!(back.relative_error <= 1e-2);
        // the reversed loop is the other orientation of the same square
        let prod = to_matrix(&fwd.holonomy) * to_matrix(&back.holonomy);
        assert!((prod - DMatrix::identity(2, 2)).norm() < 1e-9, "{:?}", p);
    }
}

#[test]
fn holonomy_error_shrinks_with_the_loop() {
    let s = sphere_chart();
    let lc = levi_civita(&s, &metric(&s, &["1", "0", "0", "sin(th)^2"])).unwrap();
    let errs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| holonomy_check(&s, &lc, &[1.2, 0.7], (0, 1), h, &HolonomyOptions::default()).unwrap().relative_error)
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{:?}", errs);
    assert!(errs[0] / errs[2] > 2.5, "{:?}", errs);
}

#[test]
fn holonomy_rejects_loops_outside_the_chart() {
    let s = sphere_chart();
    let lc = levi_civita(&s, &metric(&s, &["1", "0", "0", "sin(th)^2"])).unwrap();
    assert!(matches!(holonomy_check(&s, &lc, &[2.495, 1.0], (0, 1), 0.01, &HolonomyOptions::default()), Err(Error::LoopOutsideBox)));
    assert!(holonomy_check(&s, &lc, &[1.0, 1.0], (0, 0), 0.01, &HolonomyOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    /// `omega = dF` for a triangular map `F`, so `Omega = 0` and the geometry is locally symmetric.
    #[test]
    fn flat_parallelisms_are_locally_symmetric(coef in proptest::collection::vec(-3i64..=3, 6)) {
        let c = chart(&["x", "y", "z"], &[((-1, 1), (1, 1)); 3]);
        let f = [
            format!("x + {}*y^2 + {}*y*z + {}*z", coef[0], coef[1], coef[2]),
            format!("y + {}*z^2 + {}*z", coef[3], coef[4]),
            format!("z + {}", coef[5]),
        ];
        let omega: Vec<Vec<Expr>> = f
            .iter()
            .map(|s| {
                let e = parse_expr(s, &c).unwrap();
                (0..3).map(|i| canon(&differentiate(&e, i))).collect()
            })
            .collect();
        let rep = parallelism_report(&Parallelism::new(c.clone(), LieAlgebra::abelian(3), omega).unwrap()).unwrap();
        prop_assert!(rep.curvature.all_zero("o", &c).passed());
        prop_assert!(rep.verdict.passed());
        prop_assert_eq!(rep.verdict.find("theorem_c").unwrap().note.as_deref(), Some("locally_symmetric"));
    }

    #[test]
    fn dual_is_an_involution(seed in any::<u64>(), k in 0usize..7) {
        let inst = random_instance(seed, k).unwrap();
        let g = &inst.g;
        let conn = random_g_connection(&mut rng(seed, 99), g, Bundle::Algebroid, g.rank(), 1);
        let back = dual_connection(g, &dual_connection(g, &conn).unwrap()).unwrap();
        prop_assert_eq!(back.coeffs(), conn.coeffs());
    }
}
