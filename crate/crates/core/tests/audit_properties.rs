use ecu_core::audit::{
    affine_match, detect_betweenness_violation, phi_alpha, reconstruct_ecu, recover_dtilde, sample_lottery, AuditGrids,
    PreferenceOracle, BISECTION_MAX_ITER, WEIGHT_RESOLUTION,
};
use ecu_core::math::bisect_to_width;
use ecu_core::model::UtilityCurve;
use ecu_core::{EcuModel, Family, Lottery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{random_binary, space};

fn oracles(rng: &mut ChaCha8Rng) -> Vec<EcuModel> {
    let mut out: Vec<EcuModel> = (0..8).map(|_| random_binary(rng, space(0.0, 100.0))).collect();
    out.push(EcuModel::parametric(space(0.0, 100.0), 42.5).unwrap());
    out
}

#[test]
fn replacement_weights_exist() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let tol = 1e-9;
    for m in oracles(&mut rng) {
        let s = m.space;
        let (w, b) = (s.worst(), s.best());
        for _ in 0..200 {
            let x = rng.random_range(w..=b);
            let alpha = rng.random_range(0.0..1.0f64).max(1e-3);
            let y = if rng.random_bool(0.5) { w } else { b };
            let lhs = Lottery::new([(x, alpha), (y, 1.0 - alpha)], s).unwrap();
            let target = m.value(&lhs);
            let rhs = |g: f64| Lottery::new([(b, alpha * g), (w, alpha * (1.0 - g)), (y, 1.0 - alpha)], s).unwrap();
            let root = bisect_to_width(|g| m.value(&rhs(g)), target, 0.0, 1.0, tol, WEIGHT_RESOLUTION, BISECTION_MAX_ITER)
                .unwrap_or_else(|e| panic!("x {x} alpha {alpha} y {y}: {e}"));
            assert!((0.0..=1.0).contains(&root.x));
            assert!((m.value(&rhs(root.x)) - target).abs() <= tol, "x {x} alpha {alpha} y {y}");
        }
    }
}

#[test]
fn membership_is_a_grid_prefix_and_brackets_d() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for m in oracles(&mut rng) {
        let grids = AuditGrids::uniform(m.space, 1.0, 20, 1e-9);
        let dt = recover_dtilde(&m, &grids.x_grid, &grids.alpha_grid, grids.tol).unwrap();
        assert!(dt.lower <= m.d && m.d < dt.upper, "{dt:?} vs d = {}", m.d);
    }
}

#[test]
fn contextual_weights_are_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for m in oracles(&mut rng) {
        let (w, b) = (m.space.worst(), m.space.best());
        for _ in 0..200 {
            let x = rng.random_range(w..=b);
            let alpha = if x <= m.d { rng.random_range(0.01..=1.0) } else { rng.random_range(0.0..0.99) };
            let phi = phi_alpha(&m, x, alpha, m.d).unwrap();
            assert!((0.0..=1.0).contains(&phi), "{phi}");
        }
    }
}

#[test]
fn reconstruction_round_trip_on_small_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let s = space(0.0, 30.0);
    let prizes: Vec<f64> = (0..=30).map(f64::from).collect();
    let tol = 1e-9;
    for _ in 0..10 {
        let m = random_binary(&mut rng, s);
        let grids = AuditGrids::uniform(s, 1.0, 100, tol);
        let r = reconstruct_ecu(&m, &grids).unwrap();
        assert!((r.model.d - m.d).abs() <= 1.0, "{} vs {}", r.model.d, m.d);
        let mut compared = 0;
        while compared < 300 {
            let p = sample_lottery(&mut rng, s, &prizes, 4, 100);
            let q = sample_lottery(&mut rng, s, &prizes, 4, 100);
            let (vp, vq) = (m.value(&p), m.value(&q));
            let scale = m.u_best() - m.u_worst();
            if (vp - vq).abs() / scale <= 3.0 * tol {
                continue;
            }
            let (rp, rq) = (r.model.value(&p), r.model.value(&q));
            assert_eq!(vp > vq, rp > rq, "{p} vs {q}");
            compared += 1;
        }
        let again = reconstruct_ecu(&m, &grids).unwrap();
        let (Family::Tabulated(a), Family::Tabulated(b)) = (&r.model.family, &again.model.family) else { panic!() };
        assert_eq!(affine_match(a, b, tol).unwrap(), Some((1.0, 0.0)));
    }
}

#[test]
fn expected_utility_never_violates_betweenness() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let s = space(0.0, 100.0);
    let prizes: Vec<f64> = (0..=100).map(f64::from).collect();
    let alphas: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    for _ in 0..1000 {
        let exponent = rng.random_range(0.2..3.0);
        let eu = EcuModel::expected_utility(s, UtilityCurve::Power { low: 0.0, high: 1.0, exponent }).unwrap();
        let p = sample_lottery(&mut rng, s, &prizes, 4, 100);
        let q = sample_lottery(&mut rng, s, &prizes, 4, 100);
        assert!(detect_betweenness_violation(&eu, &p, &q, &alphas, 1e-9).is_empty());
    }
}
