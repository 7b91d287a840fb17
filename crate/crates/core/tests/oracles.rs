//! Library results against independently written oracles: dense index loops,
//! finite differences, representation-theoretic closed forms.

mod common;

use einstab::catalog::{jensen_deformed_space_for, jensen_spec, resolve, JensenEmbedding};
use einstab::curvature::{curvature_pack, moved_curvature, scalar_first_variation};
use einstab::isotropy::invariant_sym_space;
use einstab::lichnerowicz::{casimir_sym, lich_general};
use einstab::lie_core::{build_classical, ClassicalFamily, ReductiveSpace};
use einstab::linalg::{self, cluster_sorted};
use nalgebra::DMatrix;

fn spaces() -> Vec<(&'static str, ReductiveSpace)> {
    vec![
        ("SU(3)/T", resolve("family:su:3:1").unwrap()),
        ("Sp(3)/Sp(1)^3", resolve("family:sp:3:1").unwrap()),
        ("su(3) Killing", resolve("killing:su:3").unwrap()),
        ("Jensen SO(6) t=0.3", resolve("jensen:so6:0.3").unwrap()),
    ]
}

/// Ricci from brackets (unimodular case):
/// `Ric(X,Y) = -1/2 Σ <[X,X_i]_p,[Y,X_i]_p> - 1/2 Kil(X,Y)
///             + 1/4 Σ <[X_i,X_j]_p,X><[X_i,X_j]_p,Y>`.
fn ricci_oracle(r: &ReductiveSpace) -> DMatrix<f64> {
    let d = r.p_dim();
    let mu = r.mu_p();
    let mut ric = -0.5 * r.killing_p();
    for x in 0..d {
        for y in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                for k in 0..d {
                    s -= 0.5 * mu.get(x, i, k) * mu.get(y, i, k);
                }
                for j in 0..d {
                    s += 0.25 * mu.get(i, j, x) * mu.get(i, j, y);
                }
            }
            ric[(x, y)] += s;
        }
    }
    ric
}

#[test]
fn ricci_matches_bracket_formula() {
    for (name, r) in spaces() {
        let pack = curvature_pack(&r).unwrap();
        let diff = linalg::max_abs(&(&pack.ricci - ricci_oracle(&r)));
        assert!(diff < 1e-12, "{name}: {diff:e}");
    }
}

#[test]
fn moment_map_pairs_with_theta() {
    for (name, r) in spaces() {
        let pack = curvature_pack(&r).unwrap();
        let d = r.p_dim();
        let mut rng = linalg::rng(11);
        let a = DMatrix::from_fn(d, d, |_, _| linalg::gaussian(&mut rng));
        let a = linalg::symmetric_part(&a);
        let lhs = common::frob(&pack.moment, &a);
        let rhs = 0.25 * common::theta_dense(&a, r.mu_p()).dot(r.mu_p());
        assert!((lhs - rhs).abs() < 1e-12, "{name}: {lhs} vs {rhs}");
    }
}

/// `<L A, B> = 1/2 <θ(A)μ, θ(B)μ> + tr(M (AB + BA))` with dense θ.
#[test]
fn lichnerowicz_matches_polarization() {
    for (name, r) in spaces() {
        let pack = curvature_pack(&r).unwrap();
        let sym = invariant_sym_space(&r);
        let l = lich_general(&r, &sym);
        let thetas: Vec<_> = sym.basis.iter().map(|b| common::theta_dense(b, r.mu_p())).collect();
        let mut worst: f64 = 0.0;
        for i in 0..sym.dim() {
            for j in 0..sym.dim() {
                let (a, b) = (&sym.basis[i], &sym.basis[j]);
                let expect = 0.5 * thetas[i].dot(&thetas[j]) + (&pack.moment * (a * b + b * a)).trace();
                worst = worst.max((l.matrix[(i, j)] - expect).abs());
            }
        }
        assert!(worst < 1e-12, "{name}: {worst:e}");
    }
}

#[test]
fn first_variation_matches_finite_difference() {
    let r = resolve("jensen:so6:0.3").unwrap();
    let sym = invariant_sym_space(&r);
    let mut rng = linalg::rng(5);
    let h = linalg::expm_sym(&(common::random_element(&sym, &mut rng) * 0.3));
    let a = common::random_element(&sym, &mut rng);
    let f = |t: f64| moved_curvature(&r, &(&h + &a * t)).unwrap().scalar;
    let e = 1e-3;
    let fd = (-f(2.0 * e) + 8.0 * f(e) - 8.0 * f(-e) + f(-2.0 * e)) / (12.0 * e);
    let exact = scalar_first_variation(&r, &h, &a).unwrap();
    assert!((fd - exact).abs() < 1e-8, "{fd} vs {exact}");
}

#[test]
fn exp_path_oracle_agrees_with_moved_curvature() {
    let r = resolve("family:sp:3:1").unwrap();
    let sym = invariant_sym_space(&r);
    let mut rng = linalg::rng(9);
    let a = common::random_element(&sym, &mut rng);
    let path = common::ExpPath::new(&r, &a);
    for t in [-0.4, 0.1, 0.7] {
        let lib = moved_curvature(&r, &linalg::expm_sym(&(&a * t))).unwrap().scalar;
        assert!((lib - path.scal(t)).abs() < 1e-11, "t = {t}");
    }
}

/// Highest-weight data for `so(2n+1)` in the orthonormal `e_i` basis.
fn b_casimir_ratio(lambda: &[f64]) -> f64 {
    let n = lambda.len();
    let delta: Vec<f64> = (0..n).map(|i| n as f64 - i as f64 - 0.5).collect();
    let pair = |l: &[f64]| l.iter().zip(&delta).map(|(a, d)| a * (a + 2.0 * d)).sum::<f64>();
    let mut theta = vec![0.0; n];
    theta[0] = 1.0;
    theta[1] = 1.0;
    pair(lambda) / pair(&theta)
}

/// Weyl dimension formula for `B_n`: roots `e_i ± e_j` and `e_i`.
fn b_dimension(lambda: &[f64]) -> f64 {
    let n = lambda.len();
    let delta: Vec<f64> = (0..n).map(|i| n as f64 - i as f64 - 0.5).collect();
    let ld: Vec<f64> = lambda.iter().zip(&delta).map(|(a, d)| a + d).collect();
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..n {
        num *= ld[i];
        den *= delta[i];
        for j in (i + 1)..n {
            num *= (ld[i] - ld[j]) * (ld[i] + ld[j]);
            den *= (delta[i] - delta[j]) * (delta[i] + delta[j]);
        }
    }
    num / den
}

#[test]
fn so7_casimir_spectrum_matches_highest_weights() {
    // sym(so(7)) = trivial + Λ³V + Sym²₀V + (2,2,0)
    let weights = [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0]];
    let mut expected: Vec<(f64, usize)> = weights
        .iter()
        .map(|w| (b_casimir_ratio(w), b_dimension(w).round() as usize))
        .collect();
    expected.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(expected.iter().map(|e| e.1).sum::<usize>(), 231);

    let l = build_classical(ClassicalFamily::So, 7).unwrap();
    let vals = casimir_sym(&l).unwrap().eigenvalues();
    let got: Vec<(f64, usize)> = cluster_sorted(&vals, 1e-8)
        .into_iter()
        .map(|c| (vals[c.start], c.len()))
        .collect();
    assert_eq!(got.len(), expected.len());
    for (g, e) in got.iter().zip(&expected) {
        assert!((g.0 - e.0).abs() < 1e-10, "{g:?} vs {e:?}");
        assert_eq!(g.1, e.1);
    }
    // the first positive eigenvalue is 6/5, below the Sym²₀V value 7/5
    assert!((got[1].0 - 1.2).abs() < 1e-10);
    assert!((got[2].0 - 1.4).abs() < 1e-10);
}

#[test]
fn su3_casimir_spectrum_frozen() {
    let l = build_classical(ClassicalFamily::Su, 3).unwrap();
    let vals = casimir_sym(&l).unwrap().eigenvalues();
    let got: Vec<(f64, usize)> = cluster_sorted(&vals, 1e-8)
        .into_iter()
        .map(|c| (vals[c.start], c.len()))
        .collect();
    let expected = [(0.0, 1), (1.0, 8), (8.0 / 3.0, 27)];
    for (g, e) in got.iter().zip(&expected) {
        assert!((g.0 - e.0).abs() < 1e-10 && g.1 == e.1, "{g:?} vs {e:?}");
    }
}

/// `Kil_so(m) = (m-2) tr`, `Kil_sp(m) = 2(m+1) tr`: ratio of the subgroup
/// Killing form to the ambient one restricted.
#[test]
fn jensen_killing_ratios_match_trace_forms() {
    let so = |m: f64| (m - 2.0) / (2.0 * m - 2.0);
    let sp = |m: f64| (m + 1.0) / (2.0 * m + 1.0);
    let cases = [
        (JensenEmbedding::So6, so(3.0), 9, 6, 2),
        (JensenEmbedding::So8, so(4.0), 16, 12, 4),
        (JensenEmbedding::Sp2, sp(1.0), 4, 6, 2),
    ];
    for (e, c, d, k, r) in cases {
        let s = jensen_spec(e).unwrap();
        assert!((s.c - c).abs() < 1e-12, "{e:?}: {} vs {c}", s.c);
        assert_eq!((s.d, s.k_dim, s.r), (d, k, r));
    }
}

#[test]
fn jensen_einstein_at_closed_form_parameter() {
    for e in JensenEmbedding::ALL {
        let r = jensen_deformed_space_for(e, None).unwrap();
        let pack = curvature_pack(&r).unwrap();
        assert!(pack.einstein_residual < 1e-12, "{e:?}: {}", pack.einstein_residual);
        let s = jensen_spec(e).unwrap();
        assert!((2.0 * pack.rho - s.two_rho).abs() < 1e-12);
    }
    // [jjj] vanishes at t = 1/2
    let r = jensen_deformed_space_for(JensenEmbedding::So6, Some(0.5)).unwrap();
    let dec = einstab::isotropy::isotropy_decomposition(&r).unwrap();
    let sc = einstab::lichnerowicz::structural_constants(&r, &dec);
    let a = (0..dec.r()).max_by_key(|&i| dec.dims[i]).unwrap();
    for j in (0..dec.r()).filter(|&j| j != a) {
        assert!(sc.get(j, j, j).abs() < 1e-12);
    }
}

#[test]
fn johnson_adjacency_by_brute_force() {
    for n in 3..=10 {
        let (adj, vertices) = einstab::catalog::johnson_adjacency(n);
        for (i, x) in vertices.iter().enumerate() {
            let degree: f64 = adj.row(i).sum();
            assert_eq!(degree as usize, if n == 3 { 2 } else { 2 * (n - 2) }, "vertex {x:?}");
        }
        let spectrum = einstab::catalog::johnson_graph_spectrum(n).unwrap();
        let total: usize = spectrum.iter().map(|s| s.1).sum();
        assert_eq!(total, n * (n - 1) / 2);
        // trace of Adj is zero, trace of Adj² is twice the edge count
        let t1: f64 = spectrum.iter().map(|&(v, m)| v * m as f64).sum();
        let t2: f64 = spectrum.iter().map(|&(v, m)| v * v * m as f64).sum();
        assert!(t1.abs() < 1e-12);
        assert!((t2 - adj.sum()).abs() < 1e-9);
    }
}

#[test]
fn gradient_flow_is_stationary_at_einstein_metric() {
    use einstab::stability::{gradient_flow, FlowDirection};
    for id in ["family:su:3:1", "jensen:so6"] {
        let r = resolve(id).unwrap();
        let d = r.p_dim();
        let traj = gradient_flow(&r, &DMatrix::identity(d, d), 100, 1e-2, FlowDirection::Ascent).unwrap();
        assert!(traj.max_displacement < 1e-8, "{id}: {:e}", traj.max_displacement);
        assert!(traj.max_det_error < 1e-10);
        assert_eq!(traj.points.len(), 101);
    }
}
