use icsep::dof::db_grid;
use icsep::*;
use proptest::prelude::*;

fn gain() -> impl Strategy<Value = f64> {
    (0.1f64..3.0, any::<bool>()).prop_map(|(g, neg)| if neg { -g } else { g })
}

fn matrix() -> impl Strategy<Value = [[f64; 3]; 3]> {
    proptest::array::uniform3(proptest::array::uniform3(gain()))
}

fn exact_gain() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=7, any::<bool>()).prop_map(|(n, d, neg)| Rational::new(if neg { -n } else { n }, d))
}

fn exact_matrix() -> impl Strategy<Value = [[Rational; 3]; 3]> {
    proptest::array::uniform3(proptest::array::uniform3(exact_gain()))
}

fn position() -> impl Strategy<Value = Position> {
    (0usize..3, 1usize..3).prop_map(|(r, off)| Position::new(r, (r + off) % 3).unwrap())
}

fn triples<T: Scalar>(ch: &SingleCarrierChannel<T>) -> Vec<(usize, usize, usize)> {
    ch.singularity_witnesses(Tolerance::Exact)
        .iter()
        .map(|w| (w.i, w.j, w.k))
        .collect()
}

proptest! {
    #[test]
    fn row_scaling_keeps_witnesses(h in exact_matrix(), pos in position(), row in 0usize..3, s in exact_gain()) {
        // Start from a singular channel so the witness set is not trivially empty.
        let ch = adversary_best_response(&ExactChannel::new(h).unwrap(), pos).unwrap();
        let mut scaled = *ch.rows();
        scaled[row] = scaled[row].map(|x| x * s);
        let scaled = ExactChannel::new(scaled).unwrap();
        prop_assert_eq!(triples(&ch), triples(&scaled));
    }

    #[test]
    fn permutation_maps_witnesses(h in exact_matrix(), pos in position(), perm_idx in 0usize..6) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = perms[perm_idx];
        let ch = adversary_best_response(&ExactChannel::new(h).unwrap(), pos).unwrap();
        let mut mapped: Vec<_> = triples(&ch).into_iter().map(|(i, j, k)| (perm[i], perm[j], perm[k])).collect();
        mapped.sort();
        prop_assert_eq!(mapped, triples(&ch.permute_users(perm)));
    }

    #[test]
    fn best_response_idempotent_and_singular(h in exact_matrix(), pos in position()) {
        let ch = ExactChannel::new(h).unwrap();
        let once = adversary_best_response(&ch, pos).unwrap();
        prop_assert_eq!(&adversary_best_response(&once, pos).unwrap(), &once);
        prop_assert!(once.singularity_witnesses(Tolerance::Exact).iter().any(|w| w.involves(pos)));
    }

    #[test]
    fn ia_rate_matches_closed_form(snr_db in -30.0f64..90.0) {
        let snr = db_to_linear(snr_db);
        let c: Parallel = make_counterexample();
        let (rate, scheme) = joint_tin_rate(&c, snr).unwrap();
        prop_assert_eq!(scheme, JointScheme::AlignedEqualPower);
        let expected = 1.5 * 0.5 * (1.0 + snr / 3.0).log2();
        prop_assert!((rate - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn rates_nonnegative_and_monotone(h1 in matrix(), h2 in matrix(), a_db in -20.0f64..60.0, step in 0.1f64..20.0) {
        let c = Parallel::new(vec![Channel::new(h1).unwrap(), Channel::new(h2).unwrap()]).unwrap();
        let (lo, hi) = (db_to_linear(a_db), db_to_linear(a_db + step));
        let (j_lo, _) = joint_tin_rate(&c, lo).unwrap();
        let (j_hi, _) = joint_tin_rate(&c, hi).unwrap();
        prop_assert!(j_lo >= 0.0 && j_hi >= j_lo - 1e-12);
        for user in 0..3 {
            let t_lo = tdma_rate(&c, user, lo).unwrap().sum_rate;
            let t_hi = tdma_rate(&c, user, hi).unwrap().sum_rate;
            prop_assert!(t_lo >= 0.0 && t_hi >= t_lo - 1e-12);
        }
    }

    #[test]
    fn carrier_swap_keeps_sum_rate(h1 in matrix(), h2 in matrix(), snr in 0.0f64..1e4, theta in proptest::array::uniform3(0.0f64..6.3), phi in proptest::array::uniform3(0.0f64..6.3)) {
        let c = Parallel::new(vec![Channel::new(h1).unwrap(), Channel::new(h2).unwrap()]).unwrap();
        let swapped = c.reorder(&[1, 0]).unwrap();
        let v = theta.map(|t| vec![t.cos(), t.sin()]);
        let u = phi.map(|t| vec![t.cos(), t.sin()]);
        let scheme = Scheme { v: v.clone(), u: u.clone(), p: [snr / 3.0; 3] };
        let flip = |x: &Vec<f64>| vec![x[1], x[0]];
        let scheme_sw = Scheme { v: v.each_ref().map(flip), u: u.each_ref().map(flip), p: [snr / 3.0; 3] };
        let a = tin_rate(&c, &scheme).unwrap().sum_rate;
        let b = tin_rate(&swapped, &scheme_sw).unwrap().sum_rate;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        let (ta, tb) = (best_tdma_rate(&c, snr).unwrap().1.sum_rate, best_tdma_rate(&swapped, snr).unwrap().1.sum_rate);
        prop_assert!((ta - tb).abs() <= 1e-9 * ta.max(1.0));
    }

    #[test]
    fn allocation_spends_budget(gains in proptest::collection::vec(0.01f64..20.0, 2..6), total in 0.01f64..200.0) {
        let fs: Vec<_> = gains.iter().map(|&g| move |p: f64| 0.5 * (1.0 + g * p).log2()).collect();
        let a = allocate_power(&fs, total).unwrap();
        prop_assert!(a.per_carrier.iter().all(|&p| p >= 0.0));
        prop_assert!((a.total() - total).abs() <= 1e-9 * total.max(1.0));
        let wf = water_fill(&gains, total).unwrap();
        let obj = |x: &[f64]| fs.iter().zip(x).map(|(f, &p)| f(p)).sum::<f64>();
        prop_assert!((obj(&a.per_carrier) - obj(&wf.per_carrier)).abs() <= 1e-8);
    }

    #[test]
    fn mac_eval_monotone_in_snr(a1 in -8.0f64..8.0, sigma in 0.05f64..1.95, frac in 0.0f64..1.0, h in 1.05f64..5.0, s1 in 0.0f64..1e3, ds in 0.0f64..1e3) {
        // rho in (-1, -sigma/2], the feasible slice.
        let rho_max = -sigma / 2.0;
        let rho = -0.999 + frac * (rho_max + 0.999);
        let p = Genie::new(a1, sigma, rho).unwrap();
        let lo = mac_bound_eval(h, s1, &p).unwrap();
        let hi = mac_bound_eval(h, s1 + ds, &p).unwrap();
        prop_assert!(lo >= -1e-15 && hi >= lo - 1e-12);
    }

    #[test]
    fn mac_eval_matches_cholesky(a1 in -8.0f64..8.0, sigma in 0.05f64..1.95, frac in 0.0f64..1.0, h in 1.05f64..5.0, snr in 0.0f64..1e4) {
        let rho_max = -sigma / 2.0;
        let rho = -0.999 + frac * (rho_max + 0.999);
        let p = Genie::new(a1, sigma, rho).unwrap();
        let direct = mac_bound_eval(h, snr, &p).unwrap();
        let via_chol = cholesky_mac(h, snr, a1, sigma, rho);
        let ratio_direct = (2.0 * direct).exp2();
        let ratio_chol = (2.0 * via_chol).exp2();
        prop_assert!((ratio_direct - ratio_chol).abs() <= 1e-10 * ratio_chol);
    }

    #[test]
    fn dof_bounded_perturbation(b in 0.0f64..3.0, d in 0.5f64..2.0, shape in 0usize..3) {
        let (lo, hi) = (40.0, 80.0);
        let base = move |s: f64| d * 0.5 * s.log2();
        let pert = move |s: f64| match shape {
            0 => b,
            1 => b * (s.ln()).sin(),
            _ => -b * (1.0 / (1.0 + s.log10())),
        };
        let clean = estimate_dof(base, lo, hi, 21).unwrap().slope;
        let noisy = estimate_dof(move |s| base(s) + pert(s), lo, hi, 21).unwrap().slope;
        let span = 0.5 * (db_to_linear(hi) / db_to_linear(lo)).log2();
        prop_assert!((noisy - clean).abs() <= 2.0 * b / span + 1e-12);
    }
}

/// `det(K_z + c H H^T) / det(K_z)` through Cholesky factors of both matrices.
fn cholesky_mac(h: f64, snr: f64, a1: f64, sigma: f64, rho: f64) -> f64 {
    let hm = [[1.0, h, h], [a1, 1.0 - h, 0.0]];
    let c = snr / 3.0;
    let k = [[1.0, rho * sigma], [rho * sigma, sigma * sigma]];
    let mut a = k;
    for r in 0..2 {
        for s in 0..2 {
            a[r][s] += c * (0..3).map(|t| hm[r][t] * hm[s][t]).sum::<f64>();
        }
    }
    let chol_logdet = |m: [[f64; 2]; 2]| {
        let l11 = m[0][0].sqrt();
        let l21 = m[1][0] / l11;
        let l22 = (m[1][1] - l21 * l21).sqrt();
        2.0 * (l11.log2() + l22.log2())
    };
    0.5 * (chol_logdet(a) - chol_logdet(k))
}

#[test]
fn single_carrier_bound_dominates_tin() {
    let c: Parallel = make_counterexample();
    for carrier in c.carriers() {
        let single = Parallel::single(carrier.clone()).unwrap();
        for snr_db in db_grid(-10.0, 60.0, 15) {
            let snr = db_to_linear(snr_db);
            for split in [[1.0 / 3.0; 3], [1.0, 0.0, 0.0], [0.0, 0.2, 0.8], [0.5, 0.5, 0.0]] {
                for signs in [[1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]] {
                    let scheme = Scheme {
                        v: signs.map(|s| vec![s]),
                        u: [vec![1.0], vec![1.0], vec![-1.0]],
                        p: split.map(|f| f * snr),
                    };
                    let tin = tin_rate(&single, &scheme).unwrap().sum_rate;
                    assert!(example1_bound(snr) >= tin - 1e-12, "snr {snr}: {tin}");
                }
            }
        }
    }
}

#[test]
fn separate_bound_matches_split_grid() {
    let c: Parallel = make_counterexample();
    for snr_db in [-10.0, 0.0, 7.0, 20.0, 33.0] {
        let snr = db_to_linear(snr_db);
        let n = 100_000;
        let oracle = (0..=n)
            .map(|k| {
                let p = snr * k as f64 / n as f64;
                0.5 * (example1_bound(p) + example1_bound(snr - p))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let v = separate_outerbound(&c, snr).unwrap();
        assert!((v - oracle).abs() <= 1e-6, "{snr_db} dB: {v} vs {oracle}");
    }
}

#[test]
fn separate_bound_slope_is_one() {
    let c: Parallel = make_counterexample();
    let e = estimate_dof_default(|s| separate_outerbound(&c, s).unwrap()).unwrap();
    assert!((e.slope - 1.0).abs() <= 0.05);
}

#[test]
fn sweep_parallel_matches_sequential() {
    let c: Parallel = make_counterexample();
    let grid = db_grid(-10.0, 70.0, 33);
    let par = sweep(&c, &grid).unwrap();
    let seq: Vec<_> = grid.iter().map(|&g| sweep(&c, &[g]).unwrap().remove(0)).collect();
    assert_eq!(par, seq);
}

#[test]
fn random_channels_do_not_fire() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let h = [(); 3].map(|_| [(); 3].map(|_| rng.gen_range(-3.0..3.0)));
        let ch = Channel::from_rows_unchecked(h);
        if ch.validate().is_ok() {
            assert!(ch.singularity_check(Tolerance::Relative(1e-9)).is_none());
        }
    }
}
