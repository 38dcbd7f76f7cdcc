mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use staeb_core::{matching_revenue, validate_matching, Ebgt, Money, ReachTable, Strategy};

use common::desk_instance;

// Every deviation, improving or not, must move the potential by exactly the
// mover's utility, with the potential recomputed from scratch.
#[test]
fn utility_equals_potential_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for seed in 0..60 {
        let inst = desk_instance(seed);
        let game = Ebgt::new(&inst);
        let reach = ReachTable::build(&inst);
        let mut state = game.init_matching();
        assert_eq!(state.potential(), matching_revenue(state.matching(), &inst).unwrap());
        for _ in 0..100 {
            let w = rng.gen_range(0..inst.workers().len());
            let mut options: Vec<Strategy> = reach.tasks_of(w).iter().map(|&t| Strategy::Join(t)).collect();
            options.push(Strategy::Idle);
            let to = *options.choose(&mut rng).unwrap();
            let Some(plan) = game.plan_move(&state, w, to) else {
                continue;
            };
            let before = matching_revenue(state.matching(), &inst).unwrap();
            let utility = plan.utility;
            let delta = game.commit(&mut state, plan);
            let after = matching_revenue(state.matching(), &inst)
                .unwrap_or_else(|e| panic!("seed {seed}: move left infeasible state: {e}"));
            assert_eq!(delta, utility);
            assert_eq!(after - before, utility, "seed {seed}, worker {w}, {to:?}");
            assert_eq!(state.potential(), after);
            assert_eq!(state.strategy(w), to);
            checked += 1;
        }
        assert!(validate_matching(state.matching(), &inst).is_ok());
    }
    assert!(checked >= 1000, "only {checked} deviations evaluated");
}

#[test]
fn improving_moves_never_lower_potential() {
    for seed in 0..20 {
        let inst = desk_instance(seed);
        let game = Ebgt::new(&inst);
        let mut state = game.init_matching();
        let mut last = state.potential();
        for w in 0..inst.workers().len() {
            if let Some(plan) = game.best_response(&state, w) {
                assert!(plan.utility > Money::ZERO);
                game.commit(&mut state, plan);
                assert!(state.potential() > last);
                last = state.potential();
            }
        }
    }
}
