use std::path::Path;
use std::process::Command;

use lcomplete_cli::{parse_json, run, CliError, Input, JobSpec, Report, Verdict};

fn lcomplete(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lcomplete")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn normalize_example() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"ring":{"base":"Z"},"generators":2,"relations":[[2,4],[6,8]]}"#);
    let (code, out, _) = lcomplete(&["normalize", &m]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.verdict, Verdict::Computed);
    assert_eq!(r.result["normal_form"]["invariant_factors"], serde_json::json!([2, 4]));
    assert_eq!(r.result["order"], "8");
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.json", "{\"ring\":{\"base\":\"Z\"},\n \"generators\":2,\n \"relations\":[[2,x]]}");
    let (code, out, err) = lcomplete(&["normalize", &m]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"ring":{"base":"Z"},"generators":1,"relations":[[2]],"extra":1}"#);
    let (code, _, err) = lcomplete(&["normalize", &m]);
    assert_eq!(code, 2);
    assert!(err.contains("extra"), "{err}");
    let g = write(dir.path(), "g.json", r#"{"p":2,"components":[{"from":1,"kind":"cyclic","exp":{"a":1,"b":0,"c":3}}]}"#);
    assert_eq!(lcomplete(&["idempotence", &g]).0, 2);
    let job = r#"{"command":"normalize","inputs":[],"options":{"seed":1,"colour":"red"}}"#;
    assert!(matches!(parse_json::<JobSpec>("job", job), Err(CliError::Parse { .. })));
}

#[test]
fn ill_defined_morphisms_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    // Z/2 -> Z/3, 1 |-> 1 does not respect the relation
    let f = write(
        dir.path(),
        "f.json",
        r#"{"source":{"ring":{"base":"Z"},"generators":1,"relations":[[2]]},
            "target":{"ring":{"base":"Z"},"generators":1,"relations":[[3]]},
            "matrix":[[1]]}"#,
    );
    let (code, _, err) = lcomplete(&["kernel", &f]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn kernel_and_cokernel_of_multiplication() {
    let dir = tempfile::tempdir().unwrap();
    // Z/12 --4--> Z/12
    let f = write(
        dir.path(),
        "f.json",
        r#"{"source":{"ring":{"base":"Z"},"generators":1,"relations":[[12]]},
            "target":{"ring":{"base":"Z"},"generators":1,"relations":[[12]]},
            "matrix":[[4]]}"#,
    );
    let (code, out, _) = lcomplete(&["kernel", &f]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.result["normal_form"]["invariant_factors"], serde_json::json!([4]));
    let (_, out, _) = lcomplete(&["cokernel", &f]);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.result["normal_form"]["invariant_factors"], serde_json::json!([4]));
}

#[test]
fn tensor_hom_l0_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"ring":{"base":"Z"},"generators":2,"relations":[[12,0]]}"#);
    let b = write(dir.path(), "b.json", r#"{"ring":{"base":"Z"},"generators":1,"relations":[[8]]}"#);
    let factors = |args: &[&str]| {
        let (code, out, err) = lcomplete(args);
        assert_eq!(code, 0, "{err}");
        let r: Report = serde_json::from_str(&out).unwrap();
        (r.result["normal_form"]["free_rank"].clone(), r.result["normal_form"]["invariant_factors"].clone())
    };
    // (Z/12 ⊕ Z) ⊗ Z/8 = Z/4 ⊕ Z/8
    assert_eq!(factors(&["tensor", &a, &b]), (0.into(), serde_json::json!([4, 8])));
    // Hom(Z/12 ⊕ Z, Z/8) = Z/4 ⊕ Z/8
    assert_eq!(factors(&["hom", &a, &b]), (0.into(), serde_json::json!([4, 8])));
    // L0 of Z/12 ⊕ Z for mod 2^2 is Z/4 ⊕ Z/4
    assert_eq!(factors(&["l0", &a, "--functor", "mod:2:2"]), (0.into(), serde_json::json!([4, 4])));
    // 2-adic completion of Z/12 ⊕ Z is Z/4 ⊕ Z_2
    assert_eq!(factors(&["complete", &a, "--p", "2"]), (1.into(), serde_json::json!([4])));
}

#[test]
fn complete_on_graded_modules_certifies_ml() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"p":3,"components":[{"from":1,"kind":"cyclic","exp":{"a":1,"b":0}}]}"#);
    let (code, out, _) = lcomplete(&["complete", &g, "--window", "5"]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(r.certificates.len(), 1);
}

#[test]
fn check_criterion_example() {
    let (code, out, _) = lcomplete(&["check-criterion", "--functor", "mod:2:2", "--exhaustive-order", "16", "--samples", "20"]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
    assert_eq!(r.result["non_monic"], 0);
}

#[test]
fn certify_noncomplete_example() {
    let (code, out, _) = lcomplete(&["certify-noncomplete", "--p", "2"]);
    assert_eq!(code, 0);
    let r: Report = serde_json::from_str(&out).unwrap();
    let kinds: Vec<String> = r.certificates.iter().map(|c| format!("{:?}", c.kind)).collect();
    assert_eq!(kinds, ["MLFailure", "MiddleExactnessFailure"]);
}

#[test]
fn tampered_reports_fail_verification_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json").display().to_string();
    assert_eq!(lcomplete(&["certify-noncomplete", "--p", "2", "--out", &out]).0, 0);
    assert_eq!(lcomplete(&["verify-report", &out]).0, 0);

    let mut r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // claim the preimage is the element x itself
    let x = r["certificates"][1]["witness"]["x"].clone();
    r["certificates"][1]["witness"]["preimage"] = x;
    let bad = write(dir.path(), "bad.json", &serde_json::to_string(&r).unwrap());
    let (code, stdout, _) = lcomplete(&["verify-report", &bad]);
    assert_eq!(code, 1);
    let v: Report = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v.verdict, Verdict::Fails);
}

#[test]
fn text_format_and_atomic_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested.txt");
    let (code, stdout, _) =
        lcomplete(&["certify-noncomplete", "--p", "3", "--format", "text", "--out", &out.display().to_string()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("lcomplete "));
    assert!(text.contains("verdict: holds"));
    // only the report itself is left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn jobs_roundtrip_and_reject_wrong_inputs() {
    let job: JobSpec = parse_json(
        "job",
        r#"{"command":"tensor","inputs":[
            {"type":"module","value":{"ring":{"base":"Z/p^N","p":2,"N":2},"generators":1}},
            {"type":"module","value":{"ring":{"base":"Z/p^N","p":2,"N":2},"generators":1,"relations":[[2]]}}],
            "options":{"seed":3}}"#,
    )
    .unwrap();
    let r = run(&job).unwrap();
    assert_eq!(r.result["normal_form"]["invariant_factors"], serde_json::json!([2]));
    let again: JobSpec = serde_json::from_str(&serde_json::to_string(&job).unwrap()).unwrap();
    assert_eq!(again, job);

    let mut wrong = job.clone();
    wrong.inputs.truncate(1);
    assert!(matches!(run(&wrong), Err(CliError::Usage(_))));
    let Input::Module(m) = &job.inputs[0] else { unreachable!() };
    wrong.inputs = vec![Input::Module(m.clone()), Input::Report(Box::new(r))];
    assert!(run(&wrong).is_err());
}

#[test]
fn report_schema_matches_emitted_reports() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/report.schema.json")).expect("schema parses");
    assert_eq!(schema["properties"]["schema_version"]["const"], lcomplete_cli::SCHEMA_VERSION);

    let (_, out, _) = lcomplete(&["certify-noncomplete", "--p", "2", "--window", "3"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mut required: Vec<&str> =
        schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let mut emitted: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    required.sort();
    emitted.sort();
    assert_eq!(required, emitted);

    let commands = schema["$defs"]["command"]["enum"].as_array().unwrap();
    for c in commands {
        let parsed: lcomplete_cli::Command = serde_json::from_value(c.clone()).expect("schema command exists");
        assert_eq!(parsed.name(), c.as_str().unwrap());
    }
    assert_eq!(commands.len(), 13);
}
