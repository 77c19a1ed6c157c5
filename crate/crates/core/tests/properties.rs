use std::f64::consts::PI;

use proptest::prelude::*;

use deltasigma::decimation::codec::{decode, encode};
use deltasigma::decimation::{
    decimate, difference_identity_check, integer_block_sums, partial_sum, rate,
};
use deltasigma::experiment::least_squares;
use deltasigma::kernels::{continuous_partial_sum_oracle, h0_hat, lemma_constants_check};
use deltasigma::sigma_delta::{
    bits_from_bytes, bits_to_bytes, run_first_order, run_rth_order, state_identity_residual,
    QuantizerConfig,
};
use deltasigma::signal::random_signal;
use deltasigma::{DecimationParams, Error, PackedBitstream, SampleGrid};

fn bits(max_len: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(
        prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }),
        0..max_len,
    )
}

proptest! {
    #[test]
    fn samples_respect_budget(seed in any::<u64>(), atoms in 1usize..20, budget in 0.01f64..0.99,
                              lambda in 1.5f64..100.0) {
        let sig = random_signal(seed, atoms, budget, (-5.0, 5.0)).unwrap();
        prop_assert!((sig.l1_norm() - budget).abs() < 1e-12);
        let grid = SampleGrid::covering(lambda, -10.0, 10.0).unwrap();
        for x in sig.sample(&grid).unwrap() {
            prop_assert!(x.abs() <= budget + 1e-12);
        }
    }

    #[test]
    fn first_order_state_stays_in_unit_interval(
        samples in prop::collection::vec(-0.999f64..0.999, 1..2000),
        u0 in -0.999f64..0.999,
    ) {
        let run = run_first_order(&samples, u0).unwrap();
        prop_assert!(run.u_sup <= 1.0);
        let at_one = run.states.as_ref().unwrap().iter().filter(|u| u.abs() >= 1.0).count();
        prop_assert!(at_one <= run.sign_zero_events);
        prop_assert!(state_identity_residual(&samples, &run, &[u0]).unwrap() <= 1e-12);
    }

    #[test]
    fn greedy_order_two_satisfies_difference_equation(
        samples in prop::collection::vec(-0.5f64..0.5, 1..2000),
    ) {
        let cfg = QuantizerConfig::greedy(2);
        let run = run_rth_order(&samples, &cfg).unwrap();
        prop_assert!(state_identity_residual(&samples, &run, &cfg.u_init).unwrap() <= 1e-9);
        prop_assert!(run.bits.iter().all(|&q| q == 1 || q == -1));
    }

    #[test]
    fn order_one_rules_agree(samples in prop::collection::vec(-0.99f64..0.99, 1..500)) {
        let a = run_first_order(&samples, 0.0).unwrap();
        let b = run_rth_order(&samples, &QuantizerConfig::greedy(1)).unwrap();
        prop_assert_eq!(a.bits, b.bits);
    }

    #[test]
    fn raw_bit_bytes_round_trip(q in bits(300)) {
        prop_assert_eq!(bits_from_bytes(&bits_to_bytes(&q)).unwrap(), q);
    }

    #[test]
    fn decimated_values_odd_and_in_range(q in bits(600), rho in 1u32..8, r in 1u32..5,
                                         first in -500i64..500) {
        let params = DecimationParams::new(rho, r, 100.0).unwrap();
        prop_assume!(q.len() > (2 * rho * r) as usize);
        let s = decimate(&q, first, &params).unwrap();
        let full = params.full_scale();
        for &v in &s.values {
            prop_assert_eq!(v.rem_euclid(2), 1);
            prop_assert!(v.abs() <= full);
        }
        // kept indices are multiples of the block length
        prop_assert_eq!(s.index_offset.rem_euclid(i64::from(params.block_len())), 0);
    }

    #[test]
    fn integer_sums_match_scaled_averages(q in bits(300), rho in 1usize..6, r in 1usize..4) {
        prop_assume!(q.len() > 2 * rho * r);
        let ints = integer_block_sums(&q, rho, r).unwrap();
        let avg = partial_sum(&q.iter().map(|&b| f64::from(b)).collect::<Vec<_>>(), rho, r).unwrap();
        let scale = ((2 * rho + 1) as f64).powi(r as i32);
        prop_assert_eq!(ints.len(), avg.len());
        for (i, a) in ints.iter().zip(&avg) {
            prop_assert!((*i as f64 - a * scale).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn codec_round_trip_is_exact(q in bits(800), rho in 1u32..10, r in 1u32..5) {
        let params = DecimationParams::new(rho, r, 100.0).unwrap();
        prop_assume!(q.len() > (2 * rho * r) as usize);
        let s = decimate(&q, 0, &params).unwrap();
        let bs = encode(&s).unwrap();
        let width = u64::from(rate(&params).codeword_bits);
        prop_assert_eq!(bs.payload.len() as u64, (s.values.len() as u64 * width).div_ceil(8));
        let bytes = bs.to_bytes();
        let back = decode(&PackedBitstream::from_bytes(&bytes).unwrap()).unwrap();
        prop_assert_eq!(back.with_index_offset(s.index_offset), s);
    }

    #[test]
    fn truncated_file_never_decodes(q in bits(200), cut in 1usize..8) {
        let params = DecimationParams::new(2, 2, 100.0).unwrap();
        prop_assume!(q.len() > 8);
        let s = decimate(&q, 0, &params).unwrap();
        prop_assume!(!s.is_empty());
        let bytes = encode(&s).unwrap().to_bytes();
        let cut = cut.min(bytes.len() - 26);
        let res = PackedBitstream::from_bytes(&bytes[..bytes.len() - cut]).and_then(|b| decode(&b));
        prop_assert!(matches!(res, Err(Error::Corrupt(_))));
    }

    #[test]
    fn summation_by_parts(h in prop::collection::vec(-1.0f64..1.0, 60..200), rho in 1usize..6,
                          r in 1usize..5) {
        prop_assume!(h.len() > r * (2 * rho + 1));
        prop_assert!(difference_identity_check(&h, rho, r).unwrap() <= 1e-10);
    }

    #[test]
    fn discrete_and_continuous_partial_sums_agree(seed in any::<u64>(), rho in 1u32..4,
                                                  r in 1u32..4, lambda in 8.0f64..40.0) {
        let sig = random_signal(seed, 5, 0.9, (-2.0, 2.0)).unwrap();
        let grid = SampleGrid::new(lambda, -60, 60).unwrap();
        let s = partial_sum(&sig.sample(&grid).unwrap(), rho as usize, r as usize).unwrap();
        let shift = i64::from(rho * r);
        for (i, v) in s.iter().enumerate().step_by(7) {
            let n = grid.n_start + shift + i as i64;
            let oracle = continuous_partial_sum_oracle(&sig, n as f64 / lambda, rho, r, lambda);
            prop_assert!((v - oracle).abs() <= 1e-12, "n={} {} vs {}", n, v, oracle);
        }
    }

    #[test]
    fn rate_formulas(rho in 1u32..40, r in 1u32..5, extra in 0.5f64..50.0) {
        let k = f64::from(2 * rho + 1);
        let params = DecimationParams::new(rho, r, k * (1.0 + extra)).unwrap();
        let rt = rate(&params);
        let lp = params.lambda_prime();
        let alphabet = k.powi(r as i32) + 1.0;
        prop_assert!((rt.exact_bits_per_nyquist - lp * alphabet.log2()).abs() < 1e-9);
        prop_assert!(rt.exact_bits_per_nyquist <= rt.practical_bits_per_nyquist + 1e-12);
        prop_assert!(rt.practical_bits_per_nyquist < rt.exact_bits_per_nyquist + lp);
        prop_assert!(rt.exact_bits_per_nyquist <= rt.upper_bound + 1e-9);
    }

    #[test]
    fn h0_is_even_bounded_and_one_at_zero(lp in 1.1f64..20.0, k in 3.0f64..30.0,
                                          x in -1.0f64..1.0) {
        let lambda = k * lp;
        let w = x * lp * PI;
        prop_assert_eq!(h0_hat(w, lambda, lp), h0_hat(-w, lambda, lp));
        prop_assert!(h0_hat(w, lambda, lp).abs() <= PI / 2.0);
        prop_assert_eq!(h0_hat(0.0, lambda, lp), 1.0);
    }

    #[test]
    fn power_law_fits_are_exact(slope in -4.0f64..-0.1, c in 0.01f64..10.0) {
        let xs: Vec<f64> = [3.0f64, 7.0, 20.0, 55.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c.ln() + slope * x).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma_constants_hold(lp in 1.2f64..20.0, k in 3.0f64..40.0) {
        let c = lemma_constants_check(k * lp, lp, 4001).unwrap();
        prop_assert!(c.violations().is_empty(), "{:?}", c.violations());
        prop_assert!(c.finite_difference_gap < 1e-5, "fd gap {}", c.finite_difference_gap);
        // the analytic edge value bounds the grid maximum from above only
        // up to grid resolution
        prop_assert!(c.c1 <= c.c1_endpoint + 1e-9);
    }
}
