use catsim::config::{parse_scenario, to_manifest};
use proptest::prelude::*;

fn source(n: usize, g_mhz: f64, omega_mhz: f64, kappa_khz: f64, t_ns: f64, samples: usize) -> String {
    format!(
        "name = \"p\"\n[model]\nvariant = \"rwa\"\nframe = \"drive\"\nfock_cutoff = {n}\n\
         [params]\nomega_q_GHz = 5.0\nomega_r_GHz = 5.0\nomega_d_GHz = 5.0\ng_MHz = {g_mhz:?}\nOmega_MHz = {omega_mhz:?}\n\
         [decoherence]\nkappa_kHz = {kappa_khz:?}\n[time]\nt_end_ns = {t_ns:?}\nsamples = {samples}\n"
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manifest_round_trips(n in 4usize..80, g in 0.1f64..100.0, om in 1.0f64..3000.0, k in 0.0f64..5000.0, t in 0.1f64..500.0, samples in 2usize..500) {
        let s = parse_scenario(&source(n, g, om, k, t, samples)).unwrap();
        let back = parse_scenario(&to_manifest(&s)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line(key in "[a-z]{3,8}_zz") {
        let src = source(10, 20.0, 200.0, 0.0, 10.0, 5).replace("[time]\n", &format!("[time]\n{key} = 1\n"));
        let err = parse_scenario(&src).unwrap_err();
        prop_assert!(err.line > 0);
    }
}
