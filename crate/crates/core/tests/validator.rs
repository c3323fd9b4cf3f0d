mod support;

use foonplan::foon::{replay, TaskGraph};
use foonplan::motion::builtin_library;
use foonplan::validator::{apply_action, check_action, validate_plan, DiagnosisKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::sim::{corrupt, random_plan, random_world, Blockers};

fn pairs(mismatches: &[foonplan::validator::Mismatch]) -> Blockers {
    mismatches
        .iter()
        .map(|m| (m.subject.clone(), m.attribute.clone()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simulated_plans_validate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 6);
        let (steps, states) = random_plan(&world, &mut rng, 12);
        let library = builtin_library();
        let plan = validate_plan(&world.to_env(), &steps, &library).unwrap();
        for (engine, sim) in plan.trace.iter().zip(&states) {
            prop_assert_eq!(engine, &sim.to_env());
        }
    }

    #[test]
    fn corruption_is_caught_at_its_step(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 6);
        let (steps, states) = random_plan(&world, &mut rng, 12);
        prop_assume!(!steps.is_empty());
        let Some(c) = corrupt(&steps, &states, &mut rng) else { return Ok(()) };
        let failure = validate_plan(&world.to_env(), &c.steps, &builtin_library()).unwrap_err();
        prop_assert_eq!(failure.diagnosis.step_index, c.index);
        prop_assert_eq!(&failure.diagnosis.kind, &DiagnosisKind::Infeasible);
        prop_assert_eq!(pairs(&failure.diagnosis.mismatches), c.expected);
        prop_assert_eq!(failure.prefix.len(), c.index);
    }

    #[test]
    fn rejected_plans_keep_a_replayable_prefix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 6);
        let (steps, states) = random_plan(&world, &mut rng, 12);
        prop_assume!(!steps.is_empty());
        let Some(c) = corrupt(&steps, &states, &mut rng) else { return Ok(()) };
        let library = builtin_library();
        let failure = validate_plan(&world.to_env(), &c.steps, &library).unwrap_err();
        let again = validate_plan(&world.to_env(), &failure.prefix.steps, &library).unwrap();
        prop_assert_eq!(again.final_env(), &failure.env);
        prop_assert_eq!(again.final_env(), &states[c.index].to_env());
    }

    #[test]
    fn checking_never_mutates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 5);
        let env = world.to_env();
        let before = env.clone();
        let library = builtin_library();
        for step in world.all_steps().iter().step_by(7) {
            let unit = library.instantiate(step).unwrap();
            let verdict = check_action(&env, &unit);
            let expected = world.blockers(&step.motion, &step.args).unwrap();
            prop_assert_eq!(verdict.is_ok(), expected.is_empty(), "{}", step);
            if verdict.is_ok() {
                let next = apply_action(&env, &unit).unwrap();
                prop_assert!(next.audit().is_ok());
            }
            prop_assert_eq!(&env, &before);
        }
    }

    #[test]
    fn graphs_replay_to_the_final_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 6);
        let (steps, _) = random_plan(&world, &mut rng, 12);
        let env = world.to_env();
        let plan = validate_plan(&env, &steps, &builtin_library()).unwrap();
        let mut graph = TaskGraph::new();
        plan.extend_graph(&mut graph);
        let replayed = replay(&env, graph.chronological_units(), apply_action).unwrap();
        prop_assert_eq!(&replayed, plan.final_env());
    }
}
