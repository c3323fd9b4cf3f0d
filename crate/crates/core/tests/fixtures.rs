mod support;

use foonplan::io::{parse_plan_file, parse_srt};
use foonplan::motion::{builtin_library, load_library};
use foonplan::segmenter::{segment, ActionLexicon, SceneFlag, DEFAULT_THRESHOLD};
use foonplan::validator::{goal_satisfied, validate_plan};
use support::{all_recipes, read, recipe, RECIPES};

#[test]
fn golden_plans_reach_every_target() {
    let library = builtin_library();
    for r in all_recipes() {
        let mut env = r.env.clone();
        for target in &r.targets {
            let plan = validate_plan(&env, r.golden.plan(target.scene_id), &library)
                .unwrap_or_else(|f| panic!("{} scene {}: {:?}", r.name, target.scene_id, f.diagnosis));
            assert!(goal_satisfied(plan.final_env(), target), "{} scene {}", r.name, target.scene_id);
            env = plan.final_env().clone();
        }
    }
}

#[test]
fn text_plans_match_golden_books() {
    for r in all_recipes() {
        let text: Vec<_> = parse_plan_file(&read(&format!("{}/golden.plan", r.name)))
            .unwrap()
            .into_iter()
            .map(|n| n.step)
            .collect();
        let book: Vec<_> = r.targets.iter().flat_map(|t| r.golden.plan(t.scene_id).to_vec()).collect();
        assert_eq!(text, book, "{}", r.name);
    }
}

#[test]
fn bundled_motion_file_is_the_builtin_library() {
    assert_eq!(load_library(&read("motions.json")).unwrap(), builtin_library());
}

#[test]
fn bundled_lexicon_is_the_default() {
    let lexicon: ActionLexicon = serde_json::from_str(&read("lexicon.json")).unwrap();
    assert_eq!(lexicon, ActionLexicon::default());
    lexicon.check_against(&builtin_library()).unwrap();
}

#[test]
fn gyudon_subtitles_form_thirteen_scenes() {
    let cues = parse_srt(&read("gyudon/subtitles.srt")).unwrap();
    let scenes = segment(&cues, &ActionLexicon::default(), DEFAULT_THRESHOLD).unwrap();
    assert_eq!(scenes.len(), 13);
    assert_eq!(scenes[0].flag, SceneFlag::CandidateUnnecessary);
    assert_eq!(scenes[0].first_cue, 1);
    assert_eq!(scenes[0].last_cue, 3);
    assert_eq!(scenes.last().unwrap().flag, SceneFlag::CandidateUnnecessary);
    for scene in &scenes {
        assert_ne!(scene.motion.as_deref(), Some("Cut"), "{}", scene.text);
    }
}

#[test]
fn gyudon_layout() {
    use foonplan::foon::{Category, Location};
    let r = recipe("gyudon");
    assert_eq!(r.targets.len(), 8);
    for o in r.env.objects() {
        let expected = match o.category {
            Category::Tool | Category::Container => Location::RightStorage,
            Category::Ingredient => Location::LeftStorage,
            Category::Machine => Location::Workspace,
        };
        // the sauce sits with the ingredients, in its cup
        if o.name == "Soy sauce" || o.name == "Sauce cup" {
            continue;
        }
        assert_eq!(o.place, expected, "{}", o.name);
    }
    assert!(r
        .targets
        .iter()
        .any(|t| t.targets.iter().any(|n| n.name == "Onion" && n.status.as_ref().is_some_and(|s| s.iter().any(|t| t == "chopped")))));
}

#[test]
fn every_fixture_has_subtitles() {
    for name in RECIPES {
        assert!(!parse_srt(&read(&format!("{name}/subtitles.srt"))).unwrap().is_empty());
    }
}
