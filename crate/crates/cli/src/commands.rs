use lcomplete::fpmod::{self, complete_fg, completion_map, minimize};
use lcomplete::monoidal::MonoidalContext;
use lcomplete::reflection::{is_l0_complete, l0, l0_unit};
use lcomplete::towers::{
    completion_tower, idempotence_check_completion, l0_vs_completion_report, ml_certificate, verify_certificate,
    verify_report, Certificate, CertificateKind, CompletionReport, GradedModule, Verification,
};
use lcomplete::{FpModule, FpMorphism, Reflector};
use serde_json::{json, Value};

use crate::suites;
use crate::{run, CliError, CliResult, Command, Input, JobSpec, Options, Report, Verdict};

pub(crate) type Outcome = (Verdict, Value, Vec<Certificate>);

const DEFAULT_WINDOW: u64 = 10;

pub(crate) fn execute(job: &JobSpec) -> CliResult<Outcome> {
    let o = &job.options;
    let inputs = &job.inputs;
    match job.command {
        Command::Normalize => normalize(module(&inputs[0])),
        Command::Kernel => {
            let (k, inc) = fpmod::kernel(morphism(&inputs[0]));
            computed(json!({ "kernel": k, "normal_form": k.normal_form(), "inclusion": inc }))
        }
        Command::Cokernel => {
            let (c, proj) = fpmod::cokernel(morphism(&inputs[0]));
            computed(json!({ "cokernel": c, "normal_form": c.normal_form(), "projection": proj }))
        }
        Command::Tensor => tensor(o, module(&inputs[0]), module(&inputs[1])),
        Command::Hom => hom(o, module(&inputs[0]), module(&inputs[1])),
        Command::Complete => match &inputs[0] {
            Input::GradedModule(g) => complete_graded(o, g),
            other => complete_module(o, module(other)),
        },
        Command::L0 => l0_command(o, module(&inputs[0])),
        Command::CheckCriterion => {
            let s = suites::criterion_suite(&functor_or(o, "mod:2:2")?, order_or(o, 16), o.samples.unwrap_or(500), o.seed)?;
            verdict_of(s.holds(), &s)
        }
        Command::CheckMonoidal => {
            let s = suites::monoidal_suite(&functor_or(o, "mod:2:3")?, o.samples.unwrap_or(500), o.seed)?;
            verdict_of(s.holds(), &s)
        }
        Command::CheckAdjunction => {
            let s = suites::adjunction_suite(&functor_or(o, "mod:2:2")?, order_or(o, 16), o.samples.unwrap_or(300), o.seed)?;
            verdict_of(s.holds(), &s)
        }
        Command::CertifyNoncomplete => certify_noncomplete(o),
        Command::Idempotence => {
            let Input::GradedModule(g) = &inputs[0] else { unreachable!("validated") };
            let c = idempotence_check_completion(g, o.window.unwrap_or(DEFAULT_WINDOW))?;
            let v = verify_certificate(&c)?;
            let holds = c.kind == CertificateKind::IdempotenceHolds && v.ok;
            Ok((if holds { Verdict::Holds } else { Verdict::Fails }, json!({ "verification": v }), vec![c]))
        }
        Command::VerifyReport => {
            let Input::Report(r) = &inputs[0] else { unreachable!("validated") };
            verify_embedded(r)
        }
    }
}

fn module(input: &Input) -> &FpModule {
    match input {
        Input::Module(m) => m,
        _ => unreachable!("validated"),
    }
}

fn morphism(input: &Input) -> &FpMorphism {
    match input {
        Input::Morphism(f) => f,
        _ => unreachable!("validated"),
    }
}

fn computed(v: Value) -> CliResult<Outcome> {
    Ok((Verdict::Computed, v, Vec::new()))
}

fn verdict_of(holds: bool, summary: &impl serde::Serialize) -> CliResult<Outcome> {
    let v = serde_json::to_value(summary).expect("summaries serialize");
    Ok((if holds { Verdict::Holds } else { Verdict::Fails }, v, Vec::new()))
}

fn functor_or(o: &Options, default: &str) -> CliResult<Reflector> {
    Ok(match o.functor {
        Some(f) => f,
        None => default.parse()?,
    })
}

fn order_or(o: &Options, default: u64) -> u64 {
    o.exhaustive_order.unwrap_or(default)
}

fn require_p(o: &Options, what: &str) -> CliResult<u64> {
    o.p.or(o.functor.map(|f| f.prime()))
        .ok_or_else(|| CliError::Usage(format!("{what} needs --p or --functor")))
}

fn normalize(m: &FpModule) -> CliResult<Outcome> {
    let min = minimize(m);
    computed(json!({
        "normal_form": m.normal_form(),
        "order": m.order().map(|o| o.to_string()),
        "minimized": min.module,
    }))
}

/// Without `--functor` this is the tensor product of the base category.
fn tensor(o: &Options, x: &FpModule, y: &FpModule) -> CliResult<Outcome> {
    let t = match o.functor {
        Some(f) => MonoidalContext::new(f, x.ring().clone())?.tensor_d(x, y)?,
        None => fpmod::tensor(x, y)?,
    };
    computed(json!({ "tensor": t, "normal_form": t.normal_form() }))
}

fn hom(o: &Options, x: &FpModule, y: &FpModule) -> CliResult<Outcome> {
    let h = match o.functor {
        Some(f) => MonoidalContext::new(f, x.ring().clone())?.internal_hom_d(x, y)?,
        None => fpmod::hom_module(x, y)?,
    };
    computed(json!({ "hom": h.module, "normal_form": h.module.normal_form() }))
}

fn complete_module(o: &Options, m: &FpModule) -> CliResult<Outcome> {
    let p = require_p(o, "complete")?;
    let c = complete_fg(m, p)?;
    let map = completion_map(m, p)?;
    computed(json!({ "completion": c, "normal_form": c.normal_form(), "completion_map": map }))
}

/// For a graded module, completion is presented by its truncation tower;
/// the report certifies that the tower is Mittag-Leffler.
fn complete_graded(o: &Options, g: &GradedModule) -> CliResult<Outcome> {
    let window = o.window.unwrap_or(DEFAULT_WINDOW).max(2);
    let c = ml_certificate(&completion_tower(g), window)?;
    let v = verify_certificate(&c)?;
    let holds = c.kind == CertificateKind::MLStabilized && v.ok;
    let stages: Vec<Value> = (1..=window)
        .map(|k| {
            let t = g.truncate(k);
            json!({ "level": k, "module": t.to_string() })
        })
        .collect();
    Ok((if holds { Verdict::Holds } else { Verdict::Fails }, json!({ "stages": stages, "verification": v }), vec![c]))
}

fn l0_command(o: &Options, m: &FpModule) -> CliResult<Outcome> {
    let f = o.functor.ok_or_else(|| CliError::Usage("l0 needs --functor".into()))?;
    let lm = l0(&f, m)?;
    let unit = l0_unit(&f, m)?;
    computed(json!({
        "functor": f,
        "l0": lm,
        "normal_form": lm.normal_form(),
        "unit": unit,
        "input_is_complete": is_l0_complete(&f, m)?,
    }))
}

fn certify_noncomplete(o: &Options) -> CliResult<Outcome> {
    let p = require_p(o, "certify-noncomplete")?;
    let r = l0_vs_completion_report(p)?;
    let v = verify_report(&r)?;
    let result = json!({
        "p": r.p,
        "hom_transition": r.hom_transition,
        "conclusion": r.conclusion,
        "annotation": r.annotation,
        "verification": v,
    });
    let verdict = if v.ok { Verdict::Holds } else { Verdict::Fails };
    Ok((verdict, result, vec![r.ml_failure, r.middle_exactness]))
}

/// Rebuilds the two-certificate report from a `certify-noncomplete` result.
fn completion_report(r: &Report) -> CliResult<CompletionReport> {
    fn field<T: serde::de::DeserializeOwned>(r: &Report, k: &str) -> CliResult<T> {
        r.result
            .get(k)
            .and_then(|v| serde_json::from_value(v.clone()).ok())
            .ok_or_else(|| CliError::Usage(format!("certify-noncomplete report has no valid {k:?}")))
    }
    let [ml, me] = r.certificates.as_slice() else {
        return Err(CliError::Usage("certify-noncomplete report must carry two certificates".into()));
    };
    Ok(CompletionReport {
        p: field(r, "p")?,
        hom_transition: field(r, "hom_transition")?,
        ml_failure: ml.clone(),
        middle_exactness: me.clone(),
        conclusion: field(r, "conclusion")?,
        annotation: field(r, "annotation")?,
    })
}

/// Re-checks every embedded certificate with the independent verifier, then
/// re-runs the embedded job and compares the reports.
fn verify_embedded(r: &Report) -> CliResult<Outcome> {
    let mut certificate_checks: Vec<Verification> = Vec::new();
    for c in &r.certificates {
        certificate_checks.push(verify_certificate(c)?);
    }
    let report_check = match r.command {
        Command::CertifyNoncomplete => Some(verify_report(&completion_report(r)?)?),
        _ => None,
    };
    let rerun = run(&r.job)?;
    let verdict_reproduced = rerun.verdict == r.verdict;
    let identical = rerun == *r;
    let holds = certificate_checks.iter().all(|v| v.ok)
        && report_check.as_ref().is_none_or(|v| v.ok)
        && verdict_reproduced
        && identical;
    let result = json!({
        "verified_command": r.command,
        "certificates": certificate_checks,
        "report_check": report_check,
        "verdict_reproduced": verdict_reproduced,
        "rerun_identical": identical,
    });
    Ok((if holds { Verdict::Holds } else { Verdict::Fails }, result, Vec::new()))
}
