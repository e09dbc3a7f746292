//! Randomized invariants. Random objects are built from proptest-chosen seeds
//! through the library's own counter-based generator.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use qfi_noise::channels::{
    apply_channel, bures_fidelity, haar_unitary, ChannelSpec, CurvePoint, FidelityCurve, FidelityMethod,
};
use qfi_noise::commands::Rational;
use qfi_noise::hamiltonians::{embed_collective, BasisKind, HamiltonianEnsemble, LocalBasis, NoiseMode};
use qfi_noise::linalg::{exp_hermitian, hermitian_eig, partial_trace, tensor_product, ComplexMatrix};
use qfi_noise::mc::{sample_rng, SampleRng};
use qfi_noise::qfi::{mean_qfi, mean_qfi_pure_pair, qfi_general, qfi_general_matrix, qfi_pure, skew_information};
use qfi_noise::states::{haar_random_state, CorrelationTensor, DensityMatrix, PureState, StateId};

fn hermitian(dim: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    m.hermitian_part()
}

fn mixed(n: usize, d: usize, rank: usize, rng: &mut SampleRng) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(d.pow(n as u32));
    let weights = (0..rank).map(|_| rng.random::<f64>() + 0.01).collect::<Vec<_>>();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let psi = haar_random_state(n, d, rng).unwrap();
        m.add_scaled(&ComplexMatrix::outer(psi.amplitudes()), Complex64::new(w / total, 0.0));
    }
    DensityMatrix::new(n, d, m).unwrap()
}

fn register() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((1, 2)), Just((2, 2)), Just((3, 2)), Just((1, 3)), Just((2, 3))]
}

fn basis_for(d: usize, pick: u8) -> LocalBasis {
    match (d, pick % 2) {
        (2, _) => LocalBasis::pauli(),
        (_, 0) => LocalBasis::spin(d).unwrap(),
        _ => LocalBasis::gellmann(d).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(seed: u64, dim in 1usize..12) {
        let h = hermitian(dim, &mut sample_rng(seed, 0));
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn exponentials_and_haar_matrices_are_unitary(seed: u64, dim in 1usize..10, t in -5.0f64..5.0) {
        let mut rng = sample_rng(seed, 1);
        prop_assert!(exp_hermitian(&hermitian(dim, &mut rng), t).unwrap().is_unitary(1e-10));
        prop_assert!(haar_unitary(dim, &mut rng).is_unitary(1e-10));
    }

    #[test]
    fn partial_trace_undoes_tensor_product(seed: u64, da in 2usize..4, db in 2usize..4) {
        let mut rng = sample_rng(seed, 2);
        let a = mixed(1, da, 2, &mut rng);
        let b = mixed(1, db, 2, &mut rng);
        let ab = tensor_product(a.matrix(), b.matrix());
        prop_assert!(partial_trace(&ab, &[da, db], &[0]).unwrap().max_abs_diff(a.matrix()) < 1e-12);
        prop_assert!(partial_trace(&ab, &[da, db], &[1]).unwrap().max_abs_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn qfi_is_unitarily_invariant((n, d) in register(), rank in 1usize..4, seed: u64) {
        let mut rng = sample_rng(seed, 3);
        let rho = mixed(n, d, rank, &mut rng);
        let h = hermitian(rho.dim(), &mut rng);
        let u = haar_unitary(rho.dim(), &mut rng);
        let rotated = DensityMatrix::new(n, d, (&(&u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap();
        let lhs = qfi_general_matrix(&rotated, &h).unwrap();
        let rhs = qfi_general_matrix(&rho, &(&(&u.adjoint() * &h) * &u)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn qfi_is_bounded_by_variance_and_skew((n, d) in register(), rank in 1usize..4, seed: u64) {
        let mut rng = sample_rng(seed, 4);
        let rho = mixed(n, d, rank, &mut rng);
        let h = hermitian(rho.dim(), &mut rng);
        let f = qfi_general_matrix(&rho, &h).unwrap();
        let mean = rho.matrix().trace_product(&h).re;
        let var = rho.matrix().trace_product(&(&h * &h)).re - mean * mean;
        let skew = skew_information(&rho, &h).unwrap();
        prop_assert!(f >= -1e-10);
        prop_assert!(f <= 4.0 * var + 1e-8);
        prop_assert!(2.0 * skew <= f + 1e-8 && f <= 4.0 * skew + 1e-8);
    }

    #[test]
    fn rank_one_qfi_is_four_times_variance((n, d) in register(), pick: u8, seed: u64) {
        let mut rng = sample_rng(seed, 5);
        let psi = haar_random_state(n, d, &mut rng).unwrap();
        let ens = HamiltonianEnsemble::sphere(&basis_for(d, pick));
        let h = embed_collective(&ens.sample(&mut rng), ens.set(), n);
        let pure = qfi_pure(&psi, &h);
        prop_assert!((qfi_general(&psi.to_density(), &h).unwrap() - pure).abs() <= 1e-9 * pure.max(1.0));
    }

    #[test]
    fn mean_qfi_is_invariant_under_site_swaps(seed: u64, a in 0usize..4, b in 0usize..4) {
        let psi = haar_random_state(4, 2, &mut sample_rng(seed, 6)).unwrap();
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let (c0, n0) = mean_qfi_pure_pair(&psi, &ens);
        let (c1, n1) = mean_qfi_pure_pair(&psi.swap_sites(a, b), &ens);
        prop_assert!((c0 - c1).abs() < 1e-10 && (n0 - n1).abs() < 1e-10);
    }

    #[test]
    fn pure_and_mixed_mean_qfi_agree((n, d) in register(), pick: u8, seed: u64) {
        let psi = haar_random_state(n, d, &mut sample_rng(seed, 7)).unwrap();
        let ens = HamiltonianEnsemble::sphere(&basis_for(d, pick));
        let (col, nc) = mean_qfi_pure_pair(&psi, &ens);
        let rho = psi.to_density();
        prop_assert!((mean_qfi(&rho, &ens, NoiseMode::Collective).unwrap() - col).abs() < 1e-9);
        prop_assert!((mean_qfi(&rho, &ens, NoiseMode::Noncollective).unwrap() - nc).abs() < 1e-9);
    }

    #[test]
    fn channel_output_is_a_state(seed: u64, t in 0.0f64..3.0, mode in 0u8..3) {
        let mut rng = sample_rng(seed, 8);
        let rho = mixed(2, 2, 2, &mut rng);
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let spec = match mode {
            0 => ChannelSpec::hamiltonian(NoiseMode::Collective, ens, t, 40, seed),
            1 => ChannelSpec::hamiltonian(NoiseMode::Noncollective, ens, t, 40, seed),
            _ => ChannelSpec::twirl(40, seed),
        };
        let out = apply_channel(&rho, &spec).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().is_hermitian(1e-12));
        prop_assert!(out.matrix().is_psd(1e-10));
        prop_assert!(out.purity() <= rho.purity() + 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed: u64, ra in 1usize..4, rb in 1usize..4) {
        let mut rng = sample_rng(seed, 9);
        let a = mixed(2, 2, ra, &mut rng);
        let b = mixed(2, 2, rb, &mut rng);
        let ab = bures_fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - bures_fidelity(&b, &a).unwrap()).abs() < 1e-8);
        prop_assert!((bures_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn correlation_tensor_reconstructs_state(seed: u64, (n, d) in register(), pick: u8) {
        let rho = mixed(n, d, 2, &mut sample_rng(seed, 10));
        let basis = basis_for(d, pick);
        prop_assume!(basis.kind() != BasisKind::Spin);
        let tensor = CorrelationTensor::new(&rho, &basis).unwrap();
        prop_assert!(tensor.reconstruct().unwrap().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn sphere_samples_have_unit_norm(seed: u64, index: u64, pick: u8) {
        let ens = HamiltonianEnsemble::sphere(&basis_for(3, pick));
        let a = ens.sample(&mut sample_rng(seed, index));
        prop_assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collective_embedding_commutes_with_site_swaps(seed: u64, n in 2usize..4, a in 0usize..3, b in 0usize..3) {
        let (a, b) = (a % n, b % n);
        let ens = HamiltonianEnsemble::sphere(&LocalBasis::pauli());
        let h = embed_collective(&ens.sample(&mut sample_rng(seed, 11)), ens.set(), n).matrix;
        let dim = 1 << n;
        let mut p = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[k] = Complex64::new(1.0, 0.0);
            let swapped = PureState::new(n, 2, e).unwrap().swap_sites(a, b);
            for (i, z) in swapped.amplitudes().iter().enumerate() {
                p[(i, k)] = *z;
            }
        }
        prop_assert!((&(&p * &h) * &p.adjoint()).max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn state_ids_round_trip(n in 2usize..7, d in 2usize..4, seed: u64) {
        for id in [format!("ghz-{n}-{d}"), format!("dicke-{n}-1"), format!("haar-{n}-{d}-{seed}")] {
            prop_assert_eq!(id.parse::<StateId>().unwrap().to_string(), id);
        }
    }

    #[test]
    fn rationals_round_trip(num in -10_000i64..10_000, den in 1i64..1000) {
        let r: Rational = format!("{num}/{den}").parse().unwrap();
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
        prop_assert!((r.value() - num as f64 / den as f64).abs() < 1e-15);
    }

    #[test]
    fn curve_csv_round_trips(values in prop::collection::vec((0.0f64..10.0, 0.0f64..1.0, 0.0f64..1e-2, 0.0f64..1.0, any::<bool>()), 1..30)) {
        let mut t = 0.0;
        let points = values
            .into_iter()
            .map(|(dt, fidelity, fidelity_stderr, bound, valid_window)| {
                t += dt + 1e-3;
                CurvePoint { t, fidelity, fidelity_stderr, bound, valid_window }
            })
            .collect::<Vec<_>>();
        let curve = FidelityCurve {
            state: "ghz-4-2".into(),
            mode: NoiseMode::Collective,
            ensemble: "sphere".into(),
            basis: "pauli".into(),
            method: FidelityMethod::MonteCarlo,
            seed: 1,
            samples: 10,
            mean_qfi: 8.0,
            t_star: 1.0,
            points: points.clone(),
            warnings: vec![],
        };
        prop_assert_eq!(FidelityCurve::parse_csv(&curve.to_csv()).unwrap(), points);
    }
}
