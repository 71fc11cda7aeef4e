#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{fixture_path, mini};
use mystery_cli::commands::{cmd_generate, cmd_validate, exit, victim_iri, GenerateArgs};
use mystery_core::game::GameDefinition;

fn britney(out: &Path, seed: u64) -> GenerateArgs {
    let mut args = GenerateArgs::new(
        "Britney Spears",
        fixture_path("britney.nt").to_str().unwrap(),
        seed,
        out.to_path_buf(),
    );
    args.gens = 100;
    args
}

fn codes(path: &Path) -> Vec<String> {
    cmd_validate(path).unwrap().into_iter().map(|v| v.code).collect()
}

#[test]
fn bare_names_become_resource_iris() {
    assert_eq!(victim_iri("Lise Meitner"), "http://dbpedia.org/resource/Lise_Meitner");
    assert_eq!(victim_iri("http://ex.org/x"), "http://ex.org/x");
}

#[test]
fn britney_fixture_reports_six_and_twenty_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("game.json");
    let mut args = britney(&out, 1);
    args.report = Some(dir.path().join("report.json"));
    let summary = cmd_generate(&args).unwrap();
    let f = summary.generation.fitness;
    assert_eq!((f.victim_links, f.inter_suspect_links), (6, 23));
    assert_eq!(summary.generation.paths.len(), 3);
    assert!(summary.generation.pool_size >= 4);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["generation"]["fitness"]["inter_suspect_links"], 23);
    assert_eq!(codes(&out), Vec::<String>::new());
}

#[test]
fn generation_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    cmd_generate(&britney(&a, 4)).unwrap();
    cmd_generate(&britney(&b, 4)).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn failures_map_to_documented_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("game.json");

    let mut lonely = britney(&out, 0);
    lonely.victim = "Bjork".into();
    assert_eq!(cmd_generate(&lonely).unwrap_err().code, exit::INFEASIBLE);

    let mut far = britney(&out, 0);
    far.max_edges = 1;
    far.victim = "Diana Ross".into();
    let err = cmd_generate(&far).unwrap_err();
    assert_eq!(err.code, exit::NO_PATH, "{err}");

    let mut missing = britney(&out, 0);
    missing.source = dir.path().join("absent.nt").display().to_string();
    assert_eq!(cmd_generate(&missing).unwrap_err().code, exit::IO);

    let mut bad = britney(&out, 0);
    bad.max_entities = 0;
    assert_eq!(cmd_generate(&bad).unwrap_err().code, exit::USAGE);

    assert_eq!(
        cmd_validate(&dir.path().join("absent.json")).unwrap_err().code,
        exit::IO
    );
    assert!(!out.exists());
}

#[test]
fn validate_names_the_broken_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");

    let mut def = mini();
    def.culprit = "npc-0".into();
    fs::write(&path, def.to_json()).unwrap();
    assert!(codes(&path).contains(&"culprit-not-in-suspects".to_string()));

    let mut def = mini();
    for s in &mut def.interrogation_scripts[0].statements {
        s.truthful = false;
    }
    fs::write(&path, def.to_json()).unwrap();
    assert!(codes(&path).contains(&"false-statement-count".to_string()));

    fs::write(&path, mini().to_json()).unwrap();
    assert!(codes(&path).is_empty());
    assert_eq!(GameDefinition::load(&path).unwrap(), mini());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mystery");
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, mini().to_json()).unwrap();
    let mut broken = mini();
    broken.culprit = "npc-0".into();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, broken.to_json()).unwrap();

    let run = |args: &[&str]| Command::new(bin).args(args).env("RUST_LOG", "off").output().unwrap();
    let ok = run(&["validate", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(exit::OK));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("PASS"));

    let fail = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(exit::INVALID));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("culprit-not-in-suspects"));

    let out = dir.path().join("gen.json");
    let lonely = run(&[
        "generate",
        "--victim",
        "Bjork",
        "--source",
        fixture_path("britney.nt").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(lonely.status.code(), Some(exit::INFEASIBLE));

    assert_eq!(run(&["generate"]).status.code(), Some(exit::USAGE));
    assert_eq!(
        run(&["serve", bad.to_str().unwrap()]).status.code(),
        Some(exit::INVALID)
    );
}
