use chanspoof::chanrep::{
    apply_channel, choi_to_kraus, diagonal_blocks, kraus_rank, kraus_to_choi, outcome_distribution, random_channel,
    random_density, validate_cptp,
};
use chanspoof::format::{Channel, ChannelFile};
use chanspoof::linalg::{self, c64, max_abs_diff};
use chanspoof::pauli::{analytic_reduce, pauli_type1, pauli_type2, type1_as_type2, PauliChannel};
use chanspoof::rankmin::{read_convergence_log, sinkhorn_minimize, write_convergence_log, MinimizerConfig};
use chanspoof::spoofing::{
    same_class, type1_apply, type2_family, type2_member, GaugeCore, Mode, OffDiagonalBlocks,
};
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), 1..=d * d, any::<u64>()))
}

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, len).prop_map(|v| {
        let total: f64 = v.iter().sum();
        v.into_iter().map(|x| x / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_states((d, rank, seed) in channel(), state_seed in any::<u64>()) {
        let k = random_channel(d, rank, seed).unwrap();
        let rho = random_density(d, state_seed).unwrap();
        let out = apply_channel(&k, &rho).unwrap();
        prop_assert!((linalg::trace(out.as_mat()).re - 1.0).abs() < 1e-12);
        let p = outcome_distribution(&k, &rho).unwrap();
        prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn type1_gauge_keeps_class((d, rank, seed) in channel()) {
        let j = kraus_to_choi(&random_channel(d, rank, seed).unwrap());
        let spoofed = type1_apply(&j, &GaugeCore::random(d, seed.wrapping_add(1))).unwrap();
        prop_assert!(validate_cptp(&spoofed, 1e-9).unwrap().valid);
        let report = same_class(&j, &spoofed, 1e-12).unwrap();
        prop_assert!(report.same_class);
        prop_assert!(report.max_distribution_deviation <= 1e-12);
    }

    #[test]
    fn shrunk_coherences_stay_in_family((d, rank, seed) in channel(), t in 0.0f64..=1.0) {
        let j = kraus_to_choi(&random_channel(d, rank, seed).unwrap());
        let family = type2_family(&j, Mode::Operational).unwrap();
        let full = OffDiagonalBlocks::from_choi(&j);
        let mut shrunk = OffDiagonalBlocks::zeros(d);
        for i in 0..d {
            for k in i + 1..d {
                let b = full.get(i, k);
                shrunk.set(i, k, faer::Mat::from_fn(d, d, |r, c| b[(r, c)] * t)).unwrap();
            }
        }
        let member = type2_member(&family, &shrunk, 1e-10).unwrap();
        prop_assert!(family.contains(&member, 1e-12));
        prop_assert!(same_class(&j, &member, 1e-12).unwrap().max_distribution_deviation <= 1e-12);
    }

    #[test]
    fn pauli_reduction_keeps_class(alphas in (1u32..=2).prop_flat_map(|n| simplex(4usize.pow(n)))) {
        let p = PauliChannel::new(alphas).unwrap();
        let reduced = analytic_reduce(&p);
        prop_assert!(reduced.support() <= p.dim());
        prop_assert!((reduced.alphas().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(same_class(&p.choi(), &reduced.choi(), 1e-12).unwrap().max_distribution_deviation <= 1e-12);
    }

    #[test]
    fn qubit_type1_is_a_type2_shift(alpha in simplex(4), beta in -1.0f64..=1.0) {
        let t1 = pauli_type1(&alpha, beta).unwrap();
        let (b, g) = type1_as_type2(&alpha, beta).unwrap();
        let t2 = pauli_type2(&alpha, b, g).unwrap();
        for (x, y) in t1.iter().zip(t2) {
            prop_assert!((x - y).abs() < 1e-14);
        }
        let gauge = GaugeCore::qubit(c64::new(beta, 0.0)).unwrap();
        let original = PauliChannel::new(alpha.clone()).unwrap().choi();
        let via_gauge = type1_apply(&original, &gauge).unwrap();
        let via_alphas = PauliChannel::new(t1.to_vec()).unwrap().choi();
        prop_assert!(max_abs_diff(via_gauge.as_mat(), via_alphas.as_mat()) < 1e-14);
    }

    #[test]
    fn channel_files_round_trip((d, rank, seed) in channel()) {
        let k = random_channel(d, rank, seed).unwrap();
        let text = ChannelFile::from_kraus(&k).to_json().unwrap();
        let back = ChannelFile::from_json(&text).unwrap().to_channel().unwrap();
        prop_assert_eq!(back, Channel::Kraus(k.clone()));
        let j = kraus_to_choi(&k);
        let back = ChannelFile::from_json(&ChannelFile::from_choi(&j).to_json().unwrap()).unwrap().to_channel().unwrap();
        prop_assert_eq!(back, Channel::Choi(j));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn minimizer_reaches_rank_d(d in 2usize..=3, seed in any::<u64>()) {
        let j = kraus_to_choi(&random_channel(d, d * d, seed).unwrap());
        let out = sinkhorn_minimize(&j, &MinimizerConfig::default()).unwrap();
        prop_assert!(out.converged);
        prop_assert_eq!(kraus_rank(&out.choi, 1e-10).unwrap(), d);
        for (a, b) in diagonal_blocks(&j).iter().zip(diagonal_blocks(&out.choi).iter()) {
            prop_assert!(max_abs_diff(a.as_ref(), b.as_ref()) <= 1e-12);
        }
        let k = choi_to_kraus(&out.choi, 1e-9).unwrap();
        prop_assert_eq!(k.len(), d);
        prop_assert!(k.trace_preservation_defect() < 1e-8);

        let mut log = Vec::new();
        write_convergence_log(&mut log, &out.trace, d, Mode::Operational).unwrap();
        let (dim, mode, records) = read_convergence_log(log.as_slice()).unwrap();
        prop_assert_eq!((dim, mode), (d, Mode::Operational));
        prop_assert_eq!(records, out.trace.records.clone());
    }
}
