use proptest::prelude::*;

use gldpc::capacity::{capacity_ratio_sweep, ThresholdSource};
use gldpc::de::{fn_update, sc_de_run, CouplingProfile, DeLimits};
use gldpc::highrate::{poisson_tails, ScaledVariant};
use gldpc::miscorrection::{asymptotic_pq, miscorrection_table, ParityMode};
use gldpc::sim::{sample_coupled_graph, sample_uncoupled_graph, simulate_hdd};
use gldpc::{build_bch, build_field, weight_spectrum, SpectrumMethod, Word};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(nu in 2u32..=12, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = build_field(nu).unwrap();
        let mask = (1u32 << nu) - 1;
        let (a, b, c) = (a & mask, b & mask, c & mask);
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn bdd_corrects_up_to_t(
        nu in 5u32..=8,
        t in 1usize..=4,
        even in any::<bool>(),
        msg_seed in any::<u64>(),
        errs in prop::collection::vec(any::<prop::sample::Index>(), 0..=4),
    ) {
        let code = build_bch(nu, t, even).unwrap();
        let msg: Vec<bool> = (0..code.k()).map(|i| (msg_seed.rotate_left(i as u32 % 64) ^ i as u64) & 1 == 1).collect();
        let c = code.encode(&msg);
        prop_assert!(code.is_codeword(&c));
        let mut pos: Vec<usize> = errs.iter().map(|ix| ix.index(code.n())).collect();
        pos.sort_unstable();
        pos.dedup();
        pos.truncate(t);
        let r = c.xor(&Word::from_positions(code.n(), &pos));
        let out = code.bdd_decode(&r);
        prop_assert_eq!(out.output(&r), &c);
    }

    #[test]
    fn decoder_output_is_codeword_or_input(nu in 5u32..=7, t in 1usize..=3, bits in prop::collection::vec(any::<bool>(), 127)) {
        let code = build_bch(nu, t, false).unwrap();
        let r = Word::from_bits(&bits[..code.n()]);
        match code.bdd_decode(&r) {
            gldpc::DecodeOutcome::Corrected { codeword, flips } => {
                prop_assert!(code.is_codeword(&codeword));
                prop_assert_eq!(codeword.distance(&r), flips);
                prop_assert!(flips <= t);
            }
            gldpc::DecodeOutcome::Failure => {}
        }
    }

    #[test]
    fn poisson_tail_identities(lambda in 0.0f64..90.0, k in 0usize..25) {
        let a = poisson_tails(lambda, k);
        let b = poisson_tails(lambda, k + 1);
        let want = if k % 2 == 1 { a.phi } else { b.phi };
        prop_assert!((a.psi + a.varphi - want).abs() < 1e-12);
        prop_assert!(b.phi <= a.phi + 1e-15);
        for v in [a.phi, a.psi, a.varphi] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn scaled_update_monotone(lambda in 0.0f64..40.0, d in 0.0f64..5.0, rho in 0.0f64..20.0, t in 2usize..=8) {
        for v in [ScaledVariant::plain(t).unwrap(), ScaledVariant::even_subcode(t).unwrap(), ScaledVariant::no_miscorrection(t).unwrap()] {
            let y = v.update(lambda, rho);
            prop_assert!(y >= 0.0);
            prop_assert!(v.update(lambda, rho + d) >= y - 1e-12);
        }
        for v in [ScaledVariant::plain(t).unwrap(), ScaledVariant::no_miscorrection(t).unwrap()] {
            prop_assert!(v.update(lambda + d, rho) >= v.update(lambda, rho) - 1e-12);
        }
        let plain = ScaledVariant::plain(t).unwrap().update(lambda, rho);
        let even = ScaledVariant::even_subcode(t).unwrap().update(lambda, rho);
        let ideal = ScaledVariant::no_miscorrection(t).unwrap().update(lambda, rho);
        prop_assert!(ideal <= even + 1e-12 && even <= plain + 1e-12);
    }

    #[test]
    fn capacity_ratio_increases_with_nu(t in 2usize..=6) {
        let start = (8u32..).find(|&nu| 4 * nu as usize * t < (1usize << nu) - 1).unwrap();
        let r = capacity_ratio_sweep(t, start..=22, false, ThresholdSource::Ideal, &[]).unwrap();
        prop_assert!(r.windows(2).all(|w| w[1].ratio > w[0].ratio));
        prop_assert!(r.iter().all(|x| x.ratio < 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn update_is_probability_and_monotone(x in 0.0f64..=1.0, p in 0.0f64..=1.0, dp in 0.0f64..0.5, t in 1usize..=3) {
        let code = build_bch(5, t, false).unwrap();
        let spec = weight_spectrum(&code, SpectrumMethod::auto_for(&code)).unwrap();
        let tab = miscorrection_table::<f64>(code.n(), t, &spec).unwrap();
        let y = fn_update(x, p, &tab);
        prop_assert!((-1e-15..=1.0 + 1e-12).contains(&y));
        prop_assert!(fn_update(x, (p + dp).min(1.0), &tab) >= y - 1e-12);
        for i in 0..code.n() {
            prop_assert!(tab.p()[i] >= tab.q()[i] - 1e-12);
            if i < t {
                prop_assert_eq!(tab.p()[i], 0.0);
            }
            if i <= t {
                prop_assert_eq!(tab.q()[i], 0.0);
            }
        }
    }

    #[test]
    fn asymptotic_tables_stay_in_range(nu in 6u32..=12, t in 2usize..=5, even in any::<bool>()) {
        let n = (1usize << nu) - 1;
        let mode = if even { ParityMode::EvenSubcode } else { ParityMode::Plain };
        let tab = asymptotic_pq::<f64>(n, t, mode).unwrap();
        prop_assert!(tab.p().iter().chain(tab.q()).all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn coupled_de_is_monotone_in_p(p in 0.0f64..0.25, dp in 0.0f64..0.05) {
        let code = build_bch(5, 2, false).unwrap();
        let spec = weight_spectrum(&code, SpectrumMethod::ExactEnum).unwrap();
        let tab = miscorrection_table::<f64>(code.n(), 2, &spec).unwrap();
        let profile = CouplingProfile::new(12, 3).unwrap();
        let limits = DeLimits { max_iters: 40, eps_success: 0.0, eps_stall: 0.0, record_every: None };
        let a = sc_de_run(p, &tab, &profile, &limits);
        let b = sc_de_run(p + dp, &tab, &profile, &limits);
        for (x, y) in a.final_state.iter().zip(&b.final_state) {
            prop_assert!(*x <= *y + 1e-12);
        }
        // Symmetric boundaries give a symmetric profile.
        let l = a.final_state.len();
        for i in 0..l / 2 {
            prop_assert!((a.final_state[i] - a.final_state[l - 1 - i]).abs() <= 1e-12 * (1.0 + a.final_state[i]));
        }
    }

    #[test]
    fn graph_invariants(seed in any::<u64>(), m in 2usize..12, l in 2usize..6, w in 1usize..4) {
        let n = 15;
        let w = w.min(l);
        let m = if (m * n) % (2 * w) == 0 { m } else { 2 * w };
        let g = sample_coupled_graph(n, m, &CouplingProfile::new(l, w).unwrap(), seed).unwrap();
        prop_assert_eq!(g.bits(), l * m * n / 2);
        prop_assert_eq!(g.constraints(), (l + w - 1) * m);
        for bit in 0..g.bits() {
            let [a, b] = g.bit_neighbors(bit);
            prop_assert!(a.0 != b.0);
            for (c, s) in [a, b] {
                let d = g.constraint_position(c) as isize - g.bit_position(bit) as isize;
                prop_assert!((0..w as isize).contains(&d));
                prop_assert_eq!(g.socket_bit(c, s).unwrap().0, bit);
            }
        }
        let u = sample_uncoupled_graph(16, 8, seed).unwrap();
        prop_assert_eq!(u.bits(), 64);
    }

    #[test]
    fn simulation_is_seed_deterministic(gs in any::<u64>(), ns in any::<u64>(), p in 0.0f64..0.1) {
        let code = build_bch(4, 1, false).unwrap();
        let g = sample_uncoupled_graph(code.n(), 40, gs).unwrap();
        let a = simulate_hdd(&g, &code, p, 20, ns).unwrap();
        let b = simulate_hdd(&sample_uncoupled_graph(code.n(), 40, gs).unwrap(), &code, p, 20, ns).unwrap();
        prop_assert_eq!(a, b);
    }
}
