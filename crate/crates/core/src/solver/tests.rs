use super::*;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn cd(b: f64, c: f64, f: f64, eps: f64) -> SpProblem {
    SpProblem {
        kind: ProblemKind::ConvectionDiffusion,
        eps,
        gamma: b,
        b: coef(move |_| b),
        c: coef(move |_| c),
        f: coef(move |_| f),
        u0: 0.0,
        u1: 0.0,
        exact: None,
    }
}

fn rd(c: f64, f: f64, eps: f64, boundary: f64) -> SpProblem {
    SpProblem {
        kind: ProblemKind::ReactionDiffusion,
        eps,
        gamma: c.sqrt(),
        b: coef(|_| 0.0),
        c: coef(move |_| c),
        f: coef(move |_| f),
        u0: boundary,
        u1: boundary,
        exact: None,
    }
}

fn graded(n: usize) -> Mesh1D {
    Mesh1D::pinned((0..=n).map(|i| (i as f64 / n as f64).powi(2)).collect()).unwrap()
}

#[test]
fn zero_data_gives_zero_solution() {
    let m = graded(9);
    for scheme in [Scheme::Upwind, Scheme::ConservativeUpwind, Scheme::FemP1] {
        let s = solve(&cd(1.0, 0.5, 0.0, 1e-3), &m, scheme).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0), "{scheme}");
    }
    let s = solve(&rd(1.0, 0.0, 1e-3, 0.0), &m, Scheme::Central).unwrap();
    assert!(s.values.iter().all(|v| *v == 0.0));
}

#[test]
fn upwind_two_cells_by_hand() {
    // h = 1/2: row 4(u1 - 0) + 4(u1 - 0) + 2 u1 = 1 after the convection term
    // -(0 - u1)/h, so 10 u1 = 1
    let m = Mesh1D::uniform(2).unwrap();
    for conservative in [false, true] {
        let sys = assemble_upwind(&cd(1.0, 0.0, 1.0, 1.0), &m, conservative).unwrap();
        assert_eq!(sys.diag, vec![10.0]);
        let u = thomas_solve(&sys).unwrap();
        assert_relative_eq!(u[0], 0.1, max_relative = 1e-15);
    }
}

#[test]
fn central_two_cells_by_hand() {
    // -u'' + u = 2 + x(1 - x) has u = x(1 - x); the second difference is exact
    // for quadratics: 9 u1 = f(1/2) = 2.25
    let p = SpProblem { f: coef(|x| 2.0 + x * (1.0 - x)), ..rd(1.0, 0.0, 1.0, 0.0) };
    let s = solve(&p, &Mesh1D::uniform(2).unwrap(), Scheme::Central).unwrap();
    assert_relative_eq!(s.values[1], 0.25, max_relative = 1e-15);
}

#[test]
fn schemes_reproduce_constants() {
    let k = 3.25;
    for m in [graded(7), Mesh1D::uniform(10).unwrap()] {
        let p = rd(2.0, 2.0 * k, 1e-2, k);
        for scheme in [Scheme::Central, Scheme::FemP1] {
            let s = solve(&p, &m, scheme).unwrap();
            for v in &s.values {
                assert_relative_eq!(*v, k, max_relative = 1e-13);
            }
        }
        let p = SpProblem { u0: k, u1: k, ..cd(1.5, 2.0, 2.0 * k, 1e-3) };
        for scheme in [Scheme::Upwind, Scheme::ConservativeUpwind, Scheme::FemP1] {
            let s = solve(&p, &m, scheme).unwrap();
            for v in &s.values {
                assert_relative_eq!(*v, k, max_relative = 1e-13);
            }
        }
    }
}

#[test]
fn fem_matches_fine_reference() {
    let p = rd(1.0, 1.0, 1.0, 0.0);
    let coarse = solve(&p, &Mesh1D::uniform(32).unwrap(), Scheme::FemP1).unwrap();
    let fine = solve(&p, &Mesh1D::uniform(10240).unwrap(), Scheme::FemP1).unwrap();
    for (i, v) in coarse.values.iter().enumerate() {
        assert!((v - fine.values[320 * i]).abs() < 1e-4);
    }
}

#[test]
fn fem_reaction_matrix_is_symmetric() {
    let m = graded(12);
    let p = SpProblem { c: coef(|x| 1.0 + x * x), ..rd(1.0, 1.0, 1e-2, 0.0) };
    let sys = assemble_fem_p1(&p, &m).unwrap();
    for k in 1..sys.len() {
        assert_eq!(sys.sub[k], sys.sup[k - 1]);
    }
}

#[test]
fn m_matrix_signs() {
    for n in [4, 16, 64] {
        let m = graded(n);
        assert!(assemble_upwind(&cd(1.0, 1.0, 1.0, 1e-6), &m, false).unwrap().has_m_matrix_signs());
        assert!(assemble_upwind(&cd(1.0, 1.0, 1.0, 1e-6), &m, true).unwrap().has_m_matrix_signs());
        assert!(assemble_central(&rd(1.0, 1.0, 1e-6, 0.0), &m).unwrap().has_m_matrix_signs());
    }
}

#[test]
fn scheme_problem_mismatch() {
    let m = Mesh1D::uniform(4).unwrap();
    assert!(matches!(solve(&rd(1.0, 1.0, 0.1, 0.0), &m, Scheme::Upwind), Err(Error::SchemeMismatch { .. })));
    assert!(matches!(solve(&cd(1.0, 1.0, 1.0, 0.1), &m, Scheme::Central), Err(Error::SchemeMismatch { .. })));
}

#[test]
fn thomas_examples() {
    let id = Tridiagonal { sub: vec![0.0; 3], diag: vec![1.0; 3], sup: vec![0.0; 3], rhs: vec![1.0, -2.0, 3.5] };
    assert_eq!(thomas_solve(&id).unwrap(), id.rhs);
    // [[2,-1,0],[-1,2,-1],[0,-1,2]] has inverse (1/4)[[3,2,1],[2,4,2],[1,2,3]]
    let sys = Tridiagonal { sub: vec![0.0, -1.0, -1.0], diag: vec![2.0; 3], sup: vec![-1.0, -1.0, 0.0], rhs: vec![1.0, 0.0, 0.0] };
    let u = thomas_solve(&sys).unwrap();
    for (a, b) in u.iter().zip([0.75, 0.5, 0.25]) {
        assert_relative_eq!(*a, b, max_relative = 1e-15);
    }
    let bad = Tridiagonal { sub: vec![0.0, 1.0], diag: vec![1.0, 1.0], sup: vec![1.0, 0.0], rhs: vec![1.0, 1.0] };
    assert_eq!(thomas_solve(&bad), Err(Error::PivotBreakdown { row: 1 }));
}

#[test]
fn thomas_residual_random_dominant() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let n = 100;
    let mut sys = Tridiagonal::zeros(n);
    for k in 0..n {
        sys.sub[k] = if k > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
        sys.sup[k] = if k + 1 < n { rng.gen_range(-1.0..1.0) } else { 0.0 };
        sys.diag[k] = sys.sub[k].abs() + sys.sup[k].abs() + rng.gen_range(0.1..2.0);
        sys.rhs[k] = rng.gen_range(-10.0..10.0);
    }
    let u = thomas_solve(&sys).unwrap();
    let scale = sys.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(sys.residual_max(&u) <= 1e-10 * scale);
}

fn orders(kind: ProblemKind, scheme: Scheme) -> Vec<f64> {
    let p = manufactured_problem(kind, 1.0, 1.0).unwrap();
    let ex = p.exact().unwrap().clone();
    let e: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| error_max(&solve(&p, &Mesh1D::uniform(n).unwrap(), scheme).unwrap(), &ex))
        .collect();
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn smooth_problem_orders() {
    for r in orders(ProblemKind::ConvectionDiffusion, Scheme::Upwind) {
        assert!(r >= 0.9, "upwind {r}");
    }
    for r in orders(ProblemKind::ConvectionDiffusion, Scheme::ConservativeUpwind) {
        assert!(r >= 0.9, "conservative upwind {r}");
    }
    for r in orders(ProblemKind::ReactionDiffusion, Scheme::Central) {
        assert!(r >= 1.9, "central {r}");
    }
    for kind in [ProblemKind::ConvectionDiffusion, ProblemKind::ReactionDiffusion] {
        for r in orders(kind, Scheme::FemP1) {
            assert!(r >= 1.9, "fem {kind:?} {r}");
        }
    }
}

#[test]
fn smooth_upwind_smoke() {
    let p = manufactured_problem(ProblemKind::ConvectionDiffusion, 1.0, 1.0).unwrap();
    let s = solve(&p, &Mesh1D::uniform(1024).unwrap(), Scheme::Upwind).unwrap();
    assert!(error_max(&s, p.exact().unwrap()) <= 1e-2);
}

#[test]
fn errors_of_exact_nodal_values() {
    let p = manufactured_problem(ProblemKind::ConvectionDiffusion, 1e-2, 1.0).unwrap();
    let ex = p.exact().unwrap();
    let m = graded(20);
    let s = DiscreteSolution { values: m.nodes().iter().map(|x| (ex.u)(*x)).collect(), mesh: m, scheme: Scheme::FemP1 };
    assert_eq!(error_max(&s, ex), 0.0);
    let e = error_energy(&s, ex, p.diffusion());
    assert!(e.energy > 0.0);
    assert!(e.energy >= p.diffusion().sqrt() * e.h1_semi);
    assert!(e.energy >= e.l2);
}

#[test]
fn energy_error_two_cells_by_hand() {
    // u = x^2 interpolated on {0, 1/2, 1}: per cell |e|_1^2 = h^3/3, ||e||^2 = h^5/30
    let ex = Exact { u: coef(|x| x * x), du: coef(|x| 2.0 * x) };
    let m = Mesh1D::uniform(2).unwrap();
    let s = DiscreteSolution { values: vec![0.0, 0.25, 1.0], mesh: m, scheme: Scheme::FemP1 };
    let d = 0.3;
    let e = error_energy(&s, &ex, d);
    assert_relative_eq!(e.h1_semi, (1.0f64 / 12.0).sqrt(), max_relative = 1e-12);
    assert_relative_eq!(e.l2, (1.0f64 / 480.0).sqrt(), max_relative = 1e-12);
    assert_relative_eq!(e.energy, (d / 12.0 + 1.0 / 480.0).sqrt(), max_relative = 1e-12);
}

#[test]
fn solves_are_bit_identical() {
    let p = manufactured_problem(ProblemKind::ConvectionDiffusion, 1e-6, 1.0).unwrap();
    let m = crate::mesh::shishkin(1e-6, 1.0, 2.0, 128).unwrap();
    for scheme in [Scheme::Upwind, Scheme::ConservativeUpwind, Scheme::FemP1] {
        let a = solve(&p, &m, scheme).unwrap();
        let b = solve(&p, &m, scheme).unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn backward_differences() {
    let s = DiscreteSolution { values: vec![0.0, 0.5, 2.0], mesh: Mesh1D::new(vec![0.0, 0.25, 1.0]).unwrap(), scheme: Scheme::Upwind };
    assert_eq!(s.backward_differences(), vec![2.0, 2.0]);
    assert_eq!(s.interpolate(0.625), 1.25);
}

fn random_mesh() -> impl Strategy<Value = Mesh1D> {
    prop::collection::vec(1e-6f64..1.0, 2..40).prop_map(|w| {
        let total: f64 = w.iter().sum();
        let mut x = 0.0;
        let mut nodes = vec![0.0];
        for v in &w {
            x += v / total;
            nodes.push(x);
        }
        Mesh1D::pinned(nodes).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maximum_principle(
        mesh in random_mesh(),
        eps in 1e-8f64..1.0,
        b in 0.1f64..5.0,
        c in 0.0f64..5.0,
        fs in prop::collection::vec(0.0f64..10.0, 4),
        ul in 0.0f64..1.0,
        ur in 0.0f64..1.0,
    ) {
        let f = coef(move |x: f64| fs[0] + fs[1] * x + fs[2] * (fs[3] * x).sin().abs());
        let p = SpProblem { f: f.clone(), u0: ul, u1: ur, c: coef(move |x| c * (1.0 + x)), ..cd(b, 0.0, 0.0, eps) };
        for scheme in [Scheme::Upwind, Scheme::ConservativeUpwind] {
            let s = solve(&p, &mesh, scheme).unwrap();
            prop_assert!(s.values.iter().all(|v| *v >= 0.0));
        }
        let q = SpProblem { f, u0: ul, u1: ur, ..rd(c + 0.1, 0.0, eps, 0.0) };
        let s = solve(&q, &mesh, Scheme::Central).unwrap();
        prop_assert!(s.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn upwind_rows_are_m_matrices(mesh in random_mesh(), eps in 1e-8f64..1.0, b in 0.1f64..5.0) {
        let sys = assemble_upwind(&cd(b, 1.0, 1.0, eps), &mesh, false).unwrap();
        prop_assert!(sys.has_m_matrix_signs());
    }
}
