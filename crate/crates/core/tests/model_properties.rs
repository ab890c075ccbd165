use ecu_core::audit::{FnOracle, PreferenceOracle};
use ecu_core::model::{parametric_u, TabulatedFamily, UtilityCurve};
use ecu_core::{reference, EcuModel, Family, Lottery, OutcomeSpace, Preference};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{random_binary, space};

/// A lottery on `space` with mass exactly `pi` on prizes `<= d`, built from
/// integer weights so the mass is reproducible.
fn with_mass<R: Rng>(rng: &mut R, s: OutcomeSpace, d: f64, pi_twentieths: u32) -> Lottery {
    let (w, b) = (s.worst(), s.best());
    let low = pi_twentieths as f64 / 20.0;
    let mut pairs = Vec::new();
    if pi_twentieths > 0 {
        let split = rng.random_range(0.0..=1.0) * low;
        pairs.push((rng.random_range(w..=d), split));
        pairs.push((rng.random_range(w..=d), low - split));
    }
    if pi_twentieths < 20 {
        let high = 1.0 - low;
        let split = rng.random_range(0.0..=1.0) * high;
        let above = |rng: &mut R| {
            let x = rng.random_range(d..=b);
            if x > d { x } else { b }
        };
        pairs.push((above(rng), split));
        pairs.push((above(rng), high - split));
    }
    Lottery::new(pairs, s).unwrap()
}

#[test]
fn linearity_within_a_context() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = space(0.0, 100.0);
    for _ in 0..500 {
        let m = random_binary(&mut rng, s);
        let k = rng.random_range(0..=20);
        let p = with_mass(&mut rng, s, m.d, k);
        let q = with_mass(&mut rng, s, m.d, k);
        let alpha = rng.random_range(0.0..=1.0);
        let mix = Lottery::mix(&p, &q, alpha).unwrap();
        let want = alpha * m.evaluate(&p).unwrap() + (1.0 - alpha) * m.evaluate(&q).unwrap();
        let got = m.evaluate(&mix).unwrap();
        assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn binary_context_switch_is_inclusive_at_tau() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let s = space(0.0, 100.0);
    let u = UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 0.5 };
    let v = UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 2.0 };
    for tau_k in 1..20u32 {
        let m = EcuModel::binary(s, 37.5, tau_k as f64 / 20.0, u.clone(), v.clone()).unwrap();
        for k in 0..=20u32 {
            let p = with_mass(&mut rng, s, m.d, k);
            let curve = if k <= tau_k { &u } else { &v };
            let want: f64 = p.support().iter().map(|&(x, px)| px * curve.value(x, s).unwrap()).sum();
            assert_eq!(m.evaluate(&p).unwrap(), want, "tau {tau_k}/20, mass {k}/20");
        }
    }
}

#[test]
fn identical_contexts_reduce_to_expected_utility() {
    let s = space(0.0, 10.0);
    let prizes: Vec<f64> = (0..=10).map(f64::from).collect();
    let contexts: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
    let curve: Vec<f64> = prizes.iter().map(|x| (x / 10.0).sqrt()).collect();
    let values = contexts.iter().flat_map(|_| curve.iter().map(|&v| Some(v))).collect();
    let table = TabulatedFamily::new(contexts, prizes.clone(), values).unwrap();
    let model = EcuModel::new(s, 4.5, Family::Tabulated(table)).unwrap();
    let eu = FnOracle::new(s, |p: &Lottery| p.support().iter().map(|&(x, px)| px * (x / 10.0).sqrt()).sum());
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..2000 {
        let p = ecu_core::audit::sample_lottery(&mut rng, s, &prizes, 4, 100);
        let q = ecu_core::audit::sample_lottery(&mut rng, s, &prizes, 4, 100);
        let want = Preference::from_values(eu.value(&p), eu.value(&q), 1e-9);
        assert_eq!(model.prefer(&p, &q).unwrap(), want);
    }
}

/// `q` is `p` with every prize lowered by a random amount and some mass
/// moved to the worst prize, so `p` dominates `q`.
fn dominated<R: Rng>(rng: &mut R, p: &Lottery) -> Lottery {
    let w = p.space().worst();
    let shift = rng.random_range(0.0..=1.0);
    let mut pairs: Vec<(f64, f64)> = p
        .support()
        .iter()
        .map(|&(x, px)| (w + (x - w) * (1.0 - shift * rng.random_range(0.0..=1.0)), px))
        .collect();
    let moved = rng.random_range(0.0..=0.5);
    for pair in &mut pairs {
        pair.1 *= 1.0 - moved;
    }
    pairs.push((w, moved));
    Lottery::new(pairs, p.space()).unwrap()
}

#[test]
fn dominance_is_respected_by_models_meeting_both_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let pis: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut models: Vec<EcuModel> = reference::all_models().into_iter().map(|(_, m)| m).collect();
    models.push(EcuModel::parametric(space(0.0, 1.0), 0.35).unwrap());
    for _ in 0..20 {
        models.push(random_binary(&mut rng, space(0.0, 100.0)));
    }
    let mut checked = 0;
    for m in models.iter() {
        let xs: Vec<f64> = (0..=200).map(|i| m.space.worst() + (m.space.best() - m.space.worst()) * i as f64 / 200.0).collect();
        if !m.check_fosd_conditions(&pis, &xs).holds() {
            continue;
        }
        let prizes = &xs;
        for _ in 0..10_000 / models.len() + 1 {
            let p = ecu_core::audit::sample_lottery(&mut rng, m.space, prizes, 4, 100);
            let q = dominated(&mut rng, &p);
            assert!(p.dominates(&q));
            let (vp, vq) = (m.evaluate(&p).unwrap(), m.evaluate(&q).unwrap());
            assert!(vp >= vq - 1e-10, "{p} vs {q}: {vp} < {vq}");
            checked += 1;
        }
    }
    assert!(checked >= 10_000 * 20 / 25, "only {checked} triples checked");
}

proptest! {
    #[test]
    fn parametric_family_switches_curvature_at_one_half(pi in 0.0f64..=1.0, n in 10usize..60) {
        let s = space(0.0, 1.0);
        let u: Vec<f64> = (0..=n).map(|i| parametric_u(pi, i as f64 / n as f64, s)).collect();
        for w in u.windows(3) {
            let second = w[2] - 2.0 * w[1] + w[0];
            if pi < 0.5 {
                prop_assert!(second <= 1e-15);
            } else if pi > 0.5 {
                prop_assert!(second >= -1e-15);
            }
        }
    }
}
