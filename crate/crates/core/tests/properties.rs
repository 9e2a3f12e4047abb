mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use region_select::algebra::Modulus;
use region_select::diagram::{parse_diagram, DiagramShadow, Shade};
use region_select::engine::{new_session, GameSession, Hint, SessionSource};
use region_select::game::{build_game_matrix, Coloring, GameConfig, GameMatrix, PushPattern};
use region_select::structure::{alternating_signing, even_boundary_check, reduce_diagram};
use region_select::verify::varied_config;

use common::*;

fn knots() -> Vec<Arc<DiagramShadow>> {
    corpus().into_iter().map(|(_, s)| s).collect()
}

fn playable() -> Vec<Arc<DiagramShadow>> {
    knots().into_iter().filter(|s| s.vertex_count() > 0).collect()
}

fn game(shadow: &Arc<DiagramShadow>, k: Modulus) -> GameMatrix {
    build_game_matrix(shadow.clone(), GameConfig::new(k)).unwrap()
}

fn any_diagram() -> impl Strategy<Value = Arc<DiagramShadow>> {
    let all = knots();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn any_playable() -> impl Strategy<Value = Arc<DiagramShadow>> {
    let all = playable();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn raw_values(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinned_solution_clears_any_coloring(shadow in any_diagram(), k in 2u64..10, raw in raw_values(6)) {
        let gm = game(&shadow, Modulus::Finite(k));
        let c = Coloring::from_i64s(&raw[..shadow.vertex_count()]).reduced(gm.modulus());
        let p = gm.solve(&c).unwrap();
        let (ra, rb) = gm.pinned_pair();
        prop_assert!(gm.apply_pattern(&c, &p).unwrap().is_zero());
        prop_assert!(p[ra].is_zero() && p[rb].is_zero());
    }

    #[test]
    fn integer_solution_is_exact(shadow in any_diagram(), raw in raw_values(6)) {
        let gm = game(&shadow, Modulus::Infinite);
        let c = Coloring::from_i64s(&raw[..shadow.vertex_count()]);
        let p = gm.solve(&c).unwrap();
        let back = gm.matrix().mul_vec(&p.0).unwrap();
        prop_assert!(back.iter().zip(&c.0).all(|(x, y)| x + y == BigInt::zero()));
    }

    #[test]
    fn solver_recovers_a_pinned_pattern(shadow in any_diagram(), k in 2u64..8, raw in raw_values(8)) {
        let gm = game(&shadow, Modulus::Finite(k));
        let (ra, rb) = gm.pinned_pair();
        let mut p0 = PushPattern::from_i64s(&raw[..shadow.region_count()]).reduced(gm.modulus());
        p0.0[ra] = BigInt::zero();
        p0.0[rb] = BigInt::zero();
        let image = gm.image(&p0).unwrap();
        let c = Coloring(image.0.iter().map(|x| -x).collect()).reduced(gm.modulus());
        prop_assert_eq!(gm.solve(&c).unwrap(), p0);
    }

    #[test]
    fn prescribed_solutions_are_all_solutions(shadow in any_diagram(), k in 2u64..6, raw in raw_values(6), a in 0u64..6, b in 0u64..6) {
        let gm = game(&shadow, Modulus::Finite(k));
        let c = Coloring::from_i64s(&raw[..shadow.vertex_count()]).reduced(gm.modulus());
        let (ra, rb) = gm.pinned_pair();
        let p = gm.solve_prescribed(&c, (ra, BigInt::from(a)), (rb, BigInt::from(b))).unwrap();
        prop_assert!(gm.apply_pattern(&c, &p).unwrap().is_zero());
        prop_assert_eq!(&p[ra], &BigInt::from(a % k));
        prop_assert_eq!(&p[rb], &BigInt::from(b % k));
        if a == 0 && b == 0 {
            prop_assert_eq!(p, gm.solve(&c).unwrap());
        }
    }

    #[test]
    fn push_order_does_not_matter(shadow in any_diagram(), k in 2u64..8, p in raw_values(8), q in raw_values(8)) {
        let gm = game(&shadow, Modulus::Finite(k));
        let m = shadow.region_count();
        let (p, q) = (PushPattern::from_i64s(&p[..m]), PushPattern::from_i64s(&q[..m]));
        let c = Coloring::zeros(shadow.vertex_count());
        let pq = gm.apply_pattern(&gm.apply_pattern(&c, &p).unwrap(), &q).unwrap();
        let qp = gm.apply_pattern(&gm.apply_pattern(&c, &q).unwrap(), &p).unwrap();
        let sum = PushPattern(p.0.iter().zip(&q.0).map(|(x, y)| x + y).collect());
        prop_assert_eq!(&pq, &qp);
        prop_assert_eq!(pq, gm.apply_pattern(&c, &sum).unwrap());
    }

    #[test]
    fn varied_versions_keep_k_squared_null_patterns(shadow in any_diagram(), k in 2u64..7) {
        let gm = build_game_matrix(shadow.clone(), varied_config(&shadow, k)).unwrap();
        let kernel = gm.enumerate_null_patterns().unwrap();
        prop_assert_eq!(kernel.len() as u64, k * k);
        for p in &kernel {
            prop_assert!(gm.is_null_pattern(p).unwrap());
        }
    }

    #[test]
    fn relabelled_edges_give_the_same_shadow_structure(shadow in any_playable(), seed in any::<u64>()) {
        let labels = 2 * shadow.vertex_count() as u32;
        let mut perm: Vec<u32> = (1..=labels).collect();
        let mut state = seed;
        for i in (1..perm.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let relabelled: Vec<[u32; 4]> = shadow.crossings().iter().map(|c| c.map(|l| perm[l as usize - 1])).collect();
        let other = DiagramShadow::from_crossings("relabelled", relabelled, 0).unwrap();
        prop_assert_eq!(other.region_count(), shadow.region_count());
        let sizes = |s: &DiagramShadow| {
            let mut v: Vec<usize> = s.regions().iter().map(|r| r.edges.len()).collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(sizes(&other), sizes(&shadow));
        prop_assert_eq!(other.reducible_vertices().len(), shadow.reducible_vertices().len());
    }

    #[test]
    fn session_state_equation_holds(shadow in any_playable(), k in 2u64..6, seed in any::<u64>(), moves in prop::collection::vec((0usize..8, 0u8..4), 0..30)) {
        let mut s = new_session("p", shadow.clone(), GameConfig::new(Modulus::Finite(k)), SessionSource::Seed(seed)).unwrap();
        for (r, action) in moves {
            match action {
                0 | 1 => { let _ = s.push(r % shadow.region_count(), 1); }
                2 => { let _ = s.undo(); }
                _ => s.reset(),
            }
            let expected = s.game().apply_pattern(s.initial(), &s.net_pattern()).unwrap();
            prop_assert_eq!(s.current(), &expected);
            prop_assert_eq!(s.status() == region_select::engine::Status::Solved, s.current().is_zero());
        }
    }

    #[test]
    fn following_hints_solves_in_exactly_the_remaining_pushes(shadow in any_playable(), k in prop_oneof![Just(Modulus::Infinite), (2u64..6).prop_map(Modulus::Finite)], seed in any::<u64>()) {
        let mut s = new_session("h", shadow.clone(), GameConfig::new(k), SessionSource::Seed(seed)).unwrap();
        let total: BigInt = s.solution().unwrap().0.iter().map(|x| x.abs()).sum();
        let mut pushes = 0u64;
        loop {
            let before: BigInt = s.solution().unwrap().0.iter().map(|x| x.abs()).sum();
            match s.hint().unwrap() {
                Hint::Solved { .. } => break,
                Hint::Push { region, remaining } => {
                    prop_assert_ne!(remaining, 0);
                    s.push(region, remaining.signum()).unwrap();
                    let after: BigInt = s.solution().unwrap().0.iter().map(|x| x.abs()).sum();
                    prop_assert_eq!(before - after, BigInt::from(1));
                    pushes += 1;
                }
            }
        }
        prop_assert_eq!(BigInt::from(pushes), total);
        prop_assert!(s.current().is_zero());
    }

    #[test]
    fn session_json_round_trips(shadow in any_playable(), k in prop_oneof![Just(Modulus::Infinite), (2u64..6).prop_map(Modulus::Finite)], seed in any::<u64>(), pushes in prop::collection::vec(0usize..8, 0..10)) {
        let mut s = new_session("j", shadow.clone(), GameConfig::new(k), SessionSource::Seed(seed)).unwrap();
        for r in pushes {
            s.push(r % shadow.region_count(), 1).unwrap();
        }
        let text = serde_json::to_string(&s.state()).unwrap();
        let state = serde_json::from_str(&text).unwrap();
        let restored = GameSession::restore(&state, shadow.clone()).unwrap();
        prop_assert_eq!(restored.state(), s.state());
    }
}

#[test]
fn push_action_reaches_every_coloring() {
    for shadow in playable().iter().filter(|s| s.vertex_count() <= 4) {
        for k in 2..=4u64 {
            assert_eq!(reachable_without(shadow, k, &[]), k.pow(shadow.vertex_count() as u32), "{}", shadow.name());
        }
    }
}

#[test]
fn signing_exists_exactly_for_even_opposite_boundaries() {
    for shadow in knots() {
        let shading = shadow.checkerboard_shading().unwrap();
        for s in [shading.clone(), shading.complement()] {
            assert_eq!(shadow.shading_violations(&s), 0);
            for side in [Shade::Unshaded, Shade::Shaded] {
                assert_eq!(
                    alternating_signing(&shadow, &s, side).is_some(),
                    even_boundary_check(&shadow, &s, side),
                    "{} {side}",
                    shadow.name()
                );
            }
        }
    }
}

#[test]
fn reduction_keeps_irreducible_incidence() {
    for shadow in knots().iter().filter(|s| s.vertex_count() > 0) {
        let reduction = reduce_diagram(shadow).unwrap();
        for part in reduction.components.iter().filter(|p| !p.is_loop) {
            let sub = part.shadow.as_ref().unwrap();
            assert!(sub.is_reduced(), "{}", sub.name());
            for (local, &v) in part.vertices.iter().enumerate() {
                let mapped: Vec<usize> = sub.corner_regions(local).iter().map(|&r| part.region_map[r]).collect();
                assert_eq!(mapped, shadow.corner_regions(v), "{} vertex {v}", shadow.name());
            }
        }
    }
}

#[test]
fn diagram_files_round_trip() {
    for shadow in knots() {
        let again = parse_diagram(&shadow.to_json()).unwrap();
        assert_eq!(&again, shadow.as_ref());
    }
}
