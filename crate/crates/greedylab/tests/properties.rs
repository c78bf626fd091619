use greedylab::basis::{greedy_projection, greedy_set, is_greedy_set, sigma, sigma_tilde, BasisModel, SigmaMode};
use greedylab::core::{SpVec, WeightSpec};
use greedylab::gallery::{dyadic_schedule, lorentz_1q, t_eta};
use greedylab::spaces::{dsum_part, kernels, SpaceSpec};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// Vectors on `1..=len` with a random support and coefficients in `[-2, 2]`.
fn vector(len: usize) -> impl Strategy<Value = SpVec<f64>> {
    prop::collection::vec(prop::option::weighted(0.7, -2.0f64..2.0), 1..=len).prop_map(|c| {
        SpVec::from_pairs(c.into_iter().enumerate().filter_map(|(i, a)| a.filter(|a| *a != 0.0).map(|a| (i + 1, a))))
            .expect("distinct indices")
    })
}

fn space(text: &str) -> SpaceSpec {
    SpaceSpec::parse(text).unwrap()
}

/// Spaces whose declared exponent rests on an exact argument.
const EXACT_EXPONENT: [&str; 8] = [
    "lp:0.5",
    "lp:1",
    "lp:2",
    "vp:0.5",
    "garling:p=0.5,w=pot:0.5",
    "sw:w=pot:0.5",
    "dsum(lp:1,lp:0.5)",
    "lorentz:p=1,q=1,w=pot:0.5",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn literal_round_trip(f in vector(16)) {
        prop_assert_eq!(SpVec::parse_literal(&f.to_literal()).unwrap(), f);
    }

    #[test]
    fn p_triangle_inequality(f in vector(10), g in vector(10), which in 0..EXACT_EXPONENT.len()) {
        let s = space(EXACT_EXPONENT[which]);
        let p = s.p_exponent();
        let lhs = s.nrm(&f.add(&g)).powf(p);
        let rhs = s.nrm(&f).powf(p) + s.nrm(&g).powf(p);
        prop_assert!(lhs <= rhs * (1.0 + TOL) + TOL, "{}: {} > {}", EXACT_EXPONENT[which], lhs, rhs);
    }

    #[test]
    fn lattice_monotonicity(f in vector(10), shrink in prop::collection::vec(0.0f64..=1.0, 10), which in 0..5usize) {
        let s = space(["lp:0.5", "lp:2", "garling:p=0.5,w=pot:0.5", "lorentz:p=1,q=2,w=pot:0.5", "dsum(lp:1,lp:2)"][which]);
        prop_assert!(s.is_lattice());
        let g = f.multiply(|n| shrink[n - 1]);
        prop_assert!(s.nrm(&g) <= s.nrm(&f) * (1.0 + TOL));
    }

    #[test]
    fn symmetric_norms_ignore_order_and_signs(f in vector(8), shift in 0usize..8, mask in any::<u8>()) {
        for text in ["lp:0.5", "lp:3", "lorentz:p=1,q=2,w=pot:0.5"] {
            let s = space(text);
            prop_assert!(s.is_symmetric());
            let g = SpVec::from_pairs(f.iter().map(|(n, a)| {
                let sign = if mask >> ((n - 1) % 8) & 1 == 1 { -1.0 } else { 1.0 };
                ((n - 1 + shift) % 8 + 1, sign * a)
            })).unwrap();
            let (a, b) = (s.nrm(&f), s.nrm(&g));
            prop_assert!((a - b).abs() <= TOL * a.max(1.0));
        }
    }

    #[test]
    fn greedy_chain_nests(f in vector(12), m in 0usize..12, k in 0usize..12) {
        let inner = greedy_projection(&greedy_projection(&f, k), m);
        prop_assert_eq!(inner, greedy_projection(&f, m.min(k)));
        let set = greedy_set(&f, m);
        prop_assert_eq!(set.len(), m.min(f.len()));
        prop_assert!(is_greedy_set(&f, &set));
    }

    #[test]
    fn best_approximation_ordering(f in vector(6), which in 0..3usize) {
        let model = BasisModel::parse(["sw:w=const:1", "vp:0.5", "lp:0.5"][which]).unwrap();
        let exact = SigmaMode::Exact;
        let mut prev_tilde = f64::INFINITY;
        for m in 0..=f.len() {
            let s = sigma(&model, &f, m, exact).unwrap().value;
            let t = sigma_tilde(&model, &f, m, exact).unwrap().value;
            let s_next = sigma(&model, &f, m + 1, exact).unwrap().value;
            prop_assert!(t + TOL >= s, "σ̃ < σ at m={m}");
            prop_assert!(s + TOL >= s_next);
            prop_assert!(t <= prev_tilde + TOL);
            prev_tilde = t;
        }
    }

    #[test]
    fn garling_dp_matches_brute_force(moduli in prop::collection::vec(0.0f64..3.0, 0..=10), p in 0.1f64..1.0, alpha in 0.1f64..=1.0) {
        let w = WeightSpec::potential(alpha).unwrap();
        let dp = kernels::garling(p, &moduli, |j| w.w(j));
        let brute = kernels::garling_brute(p, &moduli, |j| w.w(j));
        prop_assert!((dp - brute).abs() <= 1e-12 * brute.max(1.0));
    }

    #[test]
    fn composite_norms_are_maxima(f in vector(12)) {
        let d = space("dsum(lp:1,lp:2,lp:0.5)");
        let parts = [space("lp:1"), space("lp:2"), space("lp:0.5")];
        let want = (0..3).map(|i| parts[i].nrm(&dsum_part(&f, 3, i))).fold(0.0, f64::max);
        prop_assert_eq!(d.nrm(&f), want);
        let kt = space("kt(lorentz:p=1,q=2,w=pot:0.5 ; w=pot:0.5)");
        let inner = space("lorentz:p=1,q=2,w=pot:0.5").nrm(&f);
        let sw = space("sw:w=pot:0.5").nrm(&f);
        prop_assert_eq!(kt.nrm(&f), inner.max(sw));
    }

    #[test]
    fn block_averaging_contracts_for_q_two(f in vector(8)) {
        let s = lorentz_1q(2.0).unwrap();
        let t = t_eta(&f, &dyadic_schedule(8)).unwrap();
        prop_assert!(s.nrm(&t) <= s.nrm(&f) * (1.0 + TOL));
    }
}
