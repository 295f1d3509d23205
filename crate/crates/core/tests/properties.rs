use geomeas::eigen::{self, EigenSearchConfig, RealSymTensor, RESIDUAL_TOL};
use geomeas::geometric::{fixed_point_residual, symmetric_power};
use geomeas::hermitian::{min_eigenvalue, DensityMatrix};
use geomeas::mixed::{bound_from_transform, discrimination_capacity, gm_2q, uhlmann_fidelity};
use geomeas::num_complex::Complex64;
use geomeas::relax::{partial_transpose, ppt_upper_bound, PptSolverConfig};
use geomeas::rng;
use geomeas::schmidt::{reshape_for_cut, DEFAULT_RANK_TOL};
use geomeas::search::{inner_config, max_entangled_search, subspace_min_gm, SearchConfig};
use geomeas::{
    bipartite_bound, max_overlap, schmidt, seesaw, Bipartition, ComplexTensor, ProductState, PureState,
    SeeSawConfig, Shape,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn small_dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x6d65_6173),
        ..ProptestConfig::default()
    }
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix.
fn random_unitary(d: usize, seed: u64) -> Vec<Complex64> {
    let mut g = rng::stream(seed, 77);
    let m = DMatrix::from_vec(d, d, rng::gaussian_vector(&mut g, d * d));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for c in 0..d {
        let phase = r[(c, c)] / r[(c, c)].norm();
        for row in 0..d {
            out[row * d + c] = q[(row, c)] * phase;
        }
    }
    out
}

fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut g = rng::stream(seed, 78);
    let m = DMatrix::from_vec(d, d, (0..d * d).map(|_| rng::real_unit_vector(&mut g, 1)[0] * 0.0 + rng::complex_gaussian(&mut g).re).collect());
    m.qr().q()
}

/// `sum_k w_k v_k^(x m)` over real vectors.
fn real_rank_one_sum(m: usize, terms: &[(f64, Vec<f64>)]) -> ComplexTensor {
    let d = terms[0].1.len();
    let shape = Shape::uniform(m, d).unwrap();
    let data: Vec<f64> = (0..shape.total())
        .map(|flat| {
            let idx = shape.multi_index(flat);
            terms.iter().map(|(w, v)| w * idx.iter().map(|&i| v[i]).product::<f64>()).sum()
        })
        .collect();
    ComplexTensor::from_real(shape, &data).unwrap()
}

fn symmetrize3(psi: &PureState) -> PureState {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut acc = vec![Complex64::new(0.0, 0.0); psi.total()];
    for p in perms {
        let t = psi.tensor().permute_parties(&p).unwrap();
        acc.iter_mut().zip(t.data()).for_each(|(a, b)| *a += b);
    }
    PureState::new(psi.shape().clone(), acc).unwrap()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn states_are_normalized(dims in small_dims(), seed in any::<u64>()) {
        let psi = PureState::haar_random(Shape::new(dims.clone()).unwrap(), seed);
        prop_assert!((geomeas::tensor::norm(psi.amplitudes()) - 1.0).abs() <= 1e-12);
        let p = ProductState::random(&dims, seed, 1).to_state();
        prop_assert!((geomeas::tensor::norm(p.amplitudes()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn schmidt_reconstructs_and_truncation_overlap(dims in prop::collection::vec(2usize..=4, 2..=4), seed in any::<u64>()) {
        let shape = Shape::new(dims).unwrap();
        prop_assume!(shape.total() <= 256);
        let psi = PureState::haar_random(shape, seed);
        for cut in Bipartition::all(psi.parties()) {
            let s = schmidt(&psi, &cut, DEFAULT_RANK_TOL);
            let (m, _, _) = reshape_for_cut(&psi, &cut);
            let err: f64 = s.reconstruct().iter().zip(&m).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-9);
            // Overlap with the normalized rank-one truncation is s_1.
            let a = &s.left_vectors()[0];
            let b = &s.right_vectors()[0];
            let ov: Complex64 = m.iter().enumerate().map(|(k, z)| (a[k / b.len()] * b[k % b.len()]).conj() * z).sum();
            prop_assert!((ov.norm() - s.top()).abs() <= 1e-10);
        }
    }

    #[test]
    fn swapping_twice_is_identity(dims in prop::collection::vec(2usize..=3, 3..=4), seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        let psi = PureState::haar_random(Shape::new(dims).unwrap(), seed);
        let back = psi.swap_parties(a, b).unwrap().swap_parties(a, b).unwrap();
        prop_assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn regrouped_overlap_factorizes(seed in any::<u64>()) {
        let shape = Shape::new(vec![2, 3]).unwrap();
        let psi = PureState::haar_random(shape.clone(), seed);
        let phi = PureState::haar_random(shape, seed ^ 1);
        let a = ProductState::random(&[2, 3], seed, 2);
        let b = ProductState::random(&[2, 3], seed, 3);
        let joint = psi.tensor_product_regroup(&phi).unwrap();
        let ab: Vec<Vec<Complex64>> = a.locals().iter().zip(b.locals()).map(|(x, y)| {
            x.iter().flat_map(|u| y.iter().map(move |v| u * v)).collect()
        }).collect();
        let lhs = joint.overlap_product(&ProductState::new(ab).unwrap()).unwrap();
        let rhs = psi.overlap_product(&a).unwrap() * phi.overlap_product(&b).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn seesaw_sandwich_floor_and_range(dims in small_dims(), seed in any::<u64>()) {
        let psi = PureState::haar_random(Shape::new(dims).unwrap(), seed);
        let r = seesaw(&psi, &SeeSawConfig::default().with_restarts(10).with_seed(seed)).unwrap();
        prop_assert!(r.lambda <= bipartite_bound(&psi) + 1e-9);
        prop_assert!(r.lambda_sq >= 1.0 / psi.total() as f64 - 1e-9);
        prop_assert!(r.measure >= 0.0 && r.measure <= 1.0 - 1.0 / psi.total() as f64 + 1e-12);
        prop_assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }

    #[test]
    fn local_unitaries_leave_lambda(seed in any::<u64>()) {
        let psi = PureState::haar_random(Shape::new(vec![2, 2, 3]).unwrap(), seed);
        let mut rotated = psi.clone();
        for (k, d) in [2usize, 2, 3].iter().enumerate() {
            rotated = rotated.apply_local(k, &random_unitary(*d, seed.wrapping_add(k as u64))).unwrap();
        }
        let cfg = SeeSawConfig::default();
        let a = seesaw(&psi, &cfg).unwrap().lambda;
        let b = seesaw(&rotated, &cfg).unwrap().lambda;
        prop_assert!((a - b).abs() <= 1e-7, "{} vs {}", a, b);
    }

    #[test]
    fn symmetric_methods_agree(seed in any::<u64>()) {
        let psi = symmetrize3(&PureState::haar_random(Shape::uniform(3, 2).unwrap(), seed));
        let cfg = SeeSawConfig::default();
        let a = seesaw(&psi, &cfg).unwrap().lambda;
        let b = symmetric_power(&psi, &cfg).unwrap().lambda;
        prop_assert!((a - b).abs() <= 1e-7);
        let us = eigen::us_eigen_search(&psi, &EigenSearchConfig { starts: 20, ..Default::default() }).unwrap();
        prop_assert!((us[0].lambda - b).abs() <= 1e-7);
    }

    #[test]
    fn sandwich_chain_with_ppt(seed in any::<u64>()) {
        let psi = PureState::haar_random(Shape::uniform(3, 2).unwrap(), seed);
        let ss = seesaw(&psi, &SeeSawConfig::default()).unwrap().lambda_sq;
        let r = ppt_upper_bound(&psi, &PptSolverConfig::default()).unwrap();
        let bb = bipartite_bound(&psi).powi(2);
        prop_assert!(ss <= r.upper_bound + 1e-4);
        prop_assert!(r.upper_bound <= bb + 1e-4);
        prop_assert!(r.min_eigenvalue >= -1e-7 && r.trace_error <= 1e-9);
        prop_assert!(r.primal_residuals.iter().all(|p| p.1 >= -1e-7));
        let obj = &r.objective_trace[50.min(r.objective_trace.len())..];
        let inf = &r.infeasibility_trace[50.min(r.infeasibility_trace.len())..];
        let up = obj.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
        let down = inf.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        prop_assert!(up <= 1e-4 && down <= 1e-4, "objective drop {}, infeasibility rise {}", up, down);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn z_eigenvalues_are_orthogonally_invariant(seed in any::<u64>()) {
        let mut g = rng::stream(seed, 0);
        let d = 3;
        let terms: Vec<(f64, Vec<f64>)> = (0..3)
            .map(|_| (rng::complex_gaussian(&mut g).re, rng::real_unit_vector(&mut g, d)))
            .collect();
        // Nearly coplanar terms or tiny weights give non-isolated eigenpairs.
        let v = |k: usize, i: usize| terms[k].1[i];
        let det = v(0, 0) * (v(1, 1) * v(2, 2) - v(1, 2) * v(2, 1)) - v(0, 1) * (v(1, 0) * v(2, 2) - v(1, 2) * v(2, 0))
            + v(0, 2) * (v(1, 0) * v(2, 1) - v(1, 1) * v(2, 0));
        prop_assume!(det.abs() >= 0.2 && terms.iter().all(|t| t.0.abs() >= 0.1));
        let o = random_orthogonal(d, seed);
        let rotated: Vec<(f64, Vec<f64>)> = terms
            .iter()
            .map(|(w, v)| (*w, (0..d).map(|i| (0..d).map(|j| o[(i, j)] * v[j]).sum()).collect()))
            .collect();
        let cfg = EigenSearchConfig::default();
        let mut a: Vec<f64> = eigen::z_eigen_search(&real_rank_one_sum(4, &terms), &cfg).unwrap().iter().map(|p| p.lambda).collect();
        let mut b: Vec<f64> = eigen::z_eigen_search(&real_rank_one_sum(4, &rotated), &cfg).unwrap().iter().map(|p| p.lambda).collect();
        // Order-4 tensors: (lambda, x) and (lambda, -x) are merged, so the
        // value lists must match one to one.
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a.len(), b.len(), "{:?} vs {:?}", a, b);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn returned_pairs_reverify(seed in any::<u64>()) {
        let mut g = rng::stream(seed, 1);
        let terms: Vec<(f64, Vec<f64>)> = (0..2)
            .map(|_| (rng::complex_gaussian(&mut g).re, rng::real_unit_vector(&mut g, 2)))
            .collect();
        let tau = real_rank_one_sum(3, &terms);
        let t = RealSymTensor::new(&tau).unwrap();
        for p in eigen::z_eigen_search(&tau, &EigenSearchConfig { starts: 50, ..Default::default() }).unwrap() {
            let x: Vec<f64> = p.vector.iter().map(|z| z.re).collect();
            prop_assert!(eigen::z_residual(&t, p.lambda, &x) <= RESIDUAL_TOL);
        }
        let psi = PureState::haar_random(Shape::uniform(3, 2).unwrap(), seed);
        for st in eigen::singular_tuples(&psi, &EigenSearchConfig { starts: 10, ..Default::default() }).unwrap() {
            prop_assert!(fixed_point_residual(psi.tensor(), st.vectors.locals()) <= RESIDUAL_TOL);
        }
    }

    #[test]
    fn positive_forms_sample_positive(seed in any::<u64>()) {
        let mut g = rng::stream(seed, 2);
        let d = 3;
        let mut terms: Vec<(f64, Vec<f64>)> = (0..4)
            .map(|_| (0.1 + rng::complex_gaussian(&mut g).re.abs(), rng::real_unit_vector(&mut g, d)))
            .collect();
        // Adding the identity-like form |x|^4 keeps everything positive.
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            terms.push((1.0, e));
        }
        let tau = real_rank_one_sum(4, &terms);
        let pairs = eigen::z_eigen_search(&tau, &EigenSearchConfig::default()).unwrap();
        prop_assume!(pairs.iter().all(|p| p.lambda > 0.0));
        let t = RealSymTensor::new(&tau).unwrap();
        for _ in 0..10_000 {
            let x = rng::real_unit_vector(&mut g, d);
            prop_assert!(t.value(&x) > 0.0);
        }
    }

    #[test]
    fn odeco_results_are_sound(seed in any::<u64>(), n in 2usize..=3) {
        let mut g = rng::stream(seed, 3);
        let d = 2;
        let psi = if seed % 2 == 0 {
            // Orthogonally decomposable by construction.
            let o = random_orthogonal(d, seed);
            let terms: Vec<(f64, Vec<f64>)> = (0..d)
                .map(|k| (1.0 + k as f64, (0..d).map(|i| o[(i, k)]).collect()))
                .collect();
            PureState::from_tensor(real_rank_one_sum(n, &terms)).unwrap()
        } else {
            let terms: Vec<(f64, Vec<f64>)> = (0..3)
                .map(|_| (rng::complex_gaussian(&mut g).re, rng::real_unit_vector(&mut g, d)))
                .collect();
            PureState::from_tensor(real_rank_one_sum(n, &terms)).unwrap()
        };
        let r = eigen::odeco_check(&psi, &EigenSearchConfig { starts: 10, ..Default::default() }).unwrap();
        if r.is_odeco {
            prop_assert!(r.residual <= 1e-7 && r.orthogonality <= 1e-8);
        }
        if seed % 2 == 0 {
            prop_assert!(r.is_odeco, "{:?}", r);
        }
    }
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn two_qubit_closed_form_matches_measure(seed in any::<u64>()) {
        let psi = PureState::haar_random(Shape::uniform(2, 2).unwrap(), seed);
        let e = gm_2q(&DensityMatrix::pure(&psi)).unwrap();
        let direct = max_overlap(&psi, &SeeSawConfig::default()).unwrap().measure;
        prop_assert!((e - direct).abs() <= 1e-7);
    }

    #[test]
    fn fidelity_bounds_and_symmetry(seed in any::<u64>(), p in 0.0f64..1.0) {
        let shape = Shape::uniform(2, 2).unwrap();
        let a = DensityMatrix::pure(&PureState::haar_random(shape.clone(), seed));
        let b = DensityMatrix::pure(&PureState::haar_random(shape, seed ^ 7));
        let mix = DensityMatrix::mixture(&[(p, &a), (1.0 - p, &DensityMatrix::maximally_mixed(4))]).unwrap();
        let f1 = uhlmann_fidelity(&mix, &b).unwrap();
        let f2 = uhlmann_fidelity(&b, &mix).unwrap();
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!((f1 - f2).abs() <= 1e-10);
        prop_assert!(uhlmann_fidelity(&mix, &mix).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn partial_transpose_preserves_trace_and_spectrum_sum(seed in any::<u64>()) {
        let shape = Shape::new(vec![2, 3]).unwrap();
        let psi = PureState::haar_random(shape.clone(), seed);
        let rho = geomeas::hermitian::projector(psi.amplitudes());
        let pt = partial_transpose(&rho, &shape, &[0]).unwrap();
        prop_assert!((geomeas::hermitian::trace(&pt).re - 1.0).abs() <= 1e-12);
        prop_assert!(min_eigenvalue(&pt) >= -0.5 - 1e-12);
    }

    #[test]
    fn product_bases_saturate_capacity(seed in any::<u64>()) {
        // Rotate the computational basis by independent local unitaries.
        let shape = Shape::uniform(2, 2).unwrap();
        let basis: Vec<PureState> = (0..4)
            .map(|i| {
                let mut s = PureState::basis(shape.clone(), &shape.multi_index(i)).unwrap();
                for k in 0..2 {
                    s = s.apply_local(k, &random_unitary(2, seed.wrapping_add(k as u64))).unwrap();
                }
                s
            })
            .collect();
        let r = discrimination_capacity(&basis, &SeeSawConfig::default().with_restarts(5)).unwrap();
        prop_assert!((r.sum_inv - 4.0).abs() <= 1e-6 && r.feasible);
    }
}

#[test]
fn legendre_bound_is_monotone_in_w() {
    let grid = geomeas::mixed::default_lambda_grid();
    let transform: Vec<f64> = grid.iter().map(|l| ((l + 1.0) + (l * l + 1.0).sqrt()) / 2.0 - 1.0).collect();
    let mut last = 0.0;
    for i in 0..=40 {
        let w = i as f64 / 40.0;
        let b = bound_from_transform(w, &grid, transform.clone()).bound;
        assert!(b >= last - 1e-15);
        last = b;
    }
}

#[test]
fn search_trace_and_subspace_invariants() {
    let shape = Shape::uniform(3, 2).unwrap();
    let r = max_entangled_search(&shape, &SearchConfig { seed: 11, ..Default::default() }, &inner_config()).unwrap();
    assert!(r.trace.windows(2).all(|w| w[1] > w[0]));
    assert!(r.trace.iter().all(|&e| e <= 1.0 - 1.0 / 8.0));

    let zero = PureState::basis(shape.clone(), &[0, 0, 0]).unwrap();
    let other = PureState::haar_random(shape, 4);
    // Remove the |000> component of the second vector.
    let mut amps = other.amplitudes().to_vec();
    amps[0] = Complex64::new(0.0, 0.0);
    let other = PureState::new(other.shape().clone(), amps).unwrap();
    let (lo, _) = subspace_min_gm(&[zero, other], 10, 0, &SeeSawConfig::default().with_restarts(5)).unwrap();
    assert!(lo <= 1e-6);
}

#[cfg(feature = "parallel")]
#[test]
fn sampling_is_thread_count_independent() {
    let cfg = geomeas::sampling::sampling_config().with_restarts(3);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| geomeas::sampling::sample_lambda(4, 12, 5, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(
        a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}
