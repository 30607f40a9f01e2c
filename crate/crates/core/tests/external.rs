use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::Command;

use flingo_core::ast::Signature;
use flingo_core::difftest::{run_external_solver, ExternalError, SOLVER_ENV};
use flingo_core::emitter::{emit_clingcon, EmitOptions};
use flingo_core::parser::parse_program;
use flingo_core::rewriter::translate;

/// A stand-in solver that checks its flags and prints the two models of
/// program (9) in clingcon's output format.
const FAKE: &str = r#"#!/bin/sh
cat > /dev/null
[ "$1" = "--min-int=-5" ] && [ "$2" = "--max-int=5" ] && [ "$3" = "0" ] || exit 1
echo "clingcon version 5.2.1"
echo "Solving..."
echo "Answer: 1"
echo ""
echo "Assignment:"
echo "x=0"
echo "Answer: 2"
echo "a def(x) __flingo_sus_head_1"
echo "Assignment:"
echo "x=1"
echo "SATISFIABLE"
exit 30
"#;

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn program_nine() -> String {
    let p = parse_program("{a}. &sum{x}=1 :- a.").unwrap();
    let (out, _) = translate(&p, &Signature::new(-5, 5).unwrap()).unwrap();
    emit_clingcon(&out, &EmitOptions::default()).unwrap()
}

// One test so that changes to the environment never race.
#[test]
fn external_solver_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let fake = script(dir.path(), "fake-clingcon", FAKE);
    let broken = script(dir.path(), "broken", "#!/bin/sh\necho oops >&2\nexit 1\n");
    let text = program_nine();

    std::env::remove_var(SOLVER_ENV);
    assert!(run_external_solver(&text, -5, 5).unwrap().is_none());

    std::env::set_var(SOLVER_ENV, &fake);
    let models = run_external_solver(&text, -5, 5).unwrap().unwrap();
    assert_eq!(models.len(), 2);

    std::env::set_var(SOLVER_ENV, &broken);
    match run_external_solver(&text, -5, 5) {
        Err(ExternalError::SolverCrash { stderr, .. }) => assert!(stderr.contains("oops")),
        other => panic!("{other:?}"),
    }
    std::env::remove_var(SOLVER_ENV);

    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/program9.lp");
    let run = |solver: Option<&Path>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_flingo"));
        cmd.args(["check", "--external"])
            .arg(&corpus)
            .env_remove(SOLVER_ENV);
        if let Some(s) = solver {
            cmd.env(SOLVER_ENV, s);
        }
        cmd.output().unwrap()
    };
    let o = run(Some(&fake));
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("external: match (2 models)"));
    let o = run(None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not set"));
    assert_eq!(run(Some(&broken)).status.code(), Some(1));
}
