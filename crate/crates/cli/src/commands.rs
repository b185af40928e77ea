use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use conormal_core::conormal::{Conormal, ConormalError, StarVerdict};
use conormal_core::deform::{plane_extension_with_section, DeformError, DeformationState, FiberCheck, Presentation};
use conormal_core::varieties::{Constructor, VarietyError, VarietySpec};

use crate::{exit, CliError, Record, Report, Session};

fn is_degenerate(e: &CliError) -> bool {
    matches!(
        e,
        CliError::Variety(VarietyError::Degenerate(_))
            | CliError::Conormal(ConormalError::Degenerate(_))
            | CliError::Conormal(ConormalError::Variety(VarietyError::Degenerate(_)))
            | CliError::Deform(DeformError::Conormal(ConormalError::Degenerate(_)))
    )
}

/// Builds the instance and runs `steps` on its engine. Errors end up in the
/// record and map to exit code 1.
pub fn run_instance(
    session: &Session,
    spec: &VarietySpec,
    steps: impl FnOnce(&Session, &Conormal, &mut Record) -> Result<i32, CliError>,
) -> (Record, i32) {
    let start = Instant::now();
    let mut rec = Record::for_spec(spec);
    let result = session.build(spec).and_then(|x| {
        rec = Record::for_variety(&x);
        rec.time("build", start);
        let c = session.engine(x)?;
        steps(session, &c, &mut rec)
    });
    rec.time("total", start);
    match result {
        Ok(code) => (rec, code),
        Err(e) => {
            if is_degenerate(&e) {
                rec.flag("DEGENERATE");
            }
            rec.error = Some(e.to_string());
            (rec, exit::ERROR)
        }
    }
}

/// `h^1(I^2(k))` for `0 <= k <= k_max`, the wedge kernel and the verdict on (∗).
pub fn star_steps(c: &Conormal, k_max: u32, rec: &mut Record) -> Result<i32, CliError> {
    let t = Instant::now();
    for k in 0..=k_max {
        match c.h1_ideal_square(k) {
            Ok(h) => {
                rec.dim("h1_I2", Some(i64::from(k)), h.value);
                for &p in &h.primes {
                    rec.prime(p);
                }
                if h.primes.len() > 1 {
                    let ps: Vec<String> = h.primes.iter().map(u64::to_string).collect();
                    rec.verdict(&format!("confirmed_primes(k={k})"), ps.join(","));
                }
                if h.unlucky_prime {
                    rec.flag("UNLUCKY_PRIME");
                }
            }
            Err(ConormalError::Unstable { .. }) => rec.flag("UNSTABLE"),
            Err(e) => return Err(e.into()),
        }
    }
    rec.time("h1", t);
    let t = Instant::now();
    match c.gaussian_wedge_kernel() {
        Ok(kernel) => rec.dim("gaussian_wedge_kernel", Some(2), kernel.dim()),
        Err(ConormalError::Unstable { .. }) => rec.flag("UNSTABLE"),
        Err(e) => return Err(e.into()),
    }
    rec.time("gaussian", t);
    let star = c.star_check(k_max)?;
    let verdict = match star.verdict {
        StarVerdict::Holds => "HOLDS",
        StarVerdict::Fails => "FAILS",
        StarVerdict::Inconclusive => "INCONCLUSIVE",
    };
    rec.verdict("star", verdict);
    Ok(if star.verdict == StarVerdict::Inconclusive { exit::INCONCLUSIVE } else { exit::OK })
}

/// Wedge kernel, `h^1(I^2(2))` and, for canonical curves, the corank of `Φ_K`.
pub fn gaussian_steps(c: &Conormal, rec: &mut Record) -> Result<i32, CliError> {
    let t = Instant::now();
    let wedge = c.gaussian_wedge_kernel()?.dim();
    rec.dim("gaussian_wedge_kernel", Some(2), wedge);
    let h = c.h1_ideal_square(2)?;
    rec.dim("h1_I2", Some(2), h.value);
    if h.unlucky_prime {
        rec.flag("UNLUCKY_PRIME");
    }
    rec.verdict("kernel_equals_h1", if wedge == h.value { "EQUAL" } else { "DIFFERENT" });
    if c.variety().meta().canonical_curve {
        rec.dim("gaussian_corank", None, c.canonical_gaussian_corank()?);
    }
    rec.time("gaussian", t);
    Ok(exit::OK)
}

/// `T^2_k = h^1(I^2(1 - k))` for `-k_max <= k <= 0`, plus `T^1_{-1}` for
/// canonical curves.
pub fn t2_steps(c: &Conormal, k_max: u32, rec: &mut Record) -> Result<i32, CliError> {
    let t = Instant::now();
    let mut code = exit::OK;
    for k in -(k_max as i64)..=0 {
        match c.h1_ideal_square((1 - k) as u32) {
            Ok(h) => {
                rec.dim("T2", Some(k), h.value);
                if h.unlucky_prime {
                    rec.flag("UNLUCKY_PRIME");
                }
            }
            Err(ConormalError::Unstable { .. }) => {
                rec.flag("UNSTABLE");
                code = exit::INCONCLUSIVE;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if c.variety().meta().canonical_curve {
        rec.dim("T1", Some(-1), c.canonical_gaussian_corank()?);
    }
    rec.time("t2", t);
    Ok(code)
}

/// The lifting pipeline on every first-order basis vector.
pub fn extend_steps(session: &Session, c: &Conormal, rec: &mut Record) -> Result<i32, CliError> {
    let x = c.variety();
    if !x.meta().canonical_curve {
        return Err(CliError::Config(format!("{} is not a canonical curve", x.label())));
    }
    let t = Instant::now();
    let pres = Arc::new(Presentation::new(c)?);
    rec.dim("quadrics", None, pres.k());
    rec.dim("linear_syzygies", None, pres.ell());
    let fo = pres.first_order_space()?;
    rec.dim("trivial_first_order", None, fo.trivial.dim());
    rec.dim("first_order", None, fo.dim());
    rec.time("first_order", t);
    let t = Instant::now();
    let corank = c.canonical_gaussian_corank()?;
    rec.dim("gaussian_corank", None, corank);
    rec.time("gaussian", t);

    let t = Instant::now();
    let mut code = exit::OK;
    let mut vectors = Vec::new();
    let (mut all_terminated, mut all_flat, mut all_fibers) = (true, true, true);
    for (i, rep) in fo.representatives.iter().enumerate() {
        let first = DeformationState::first_order(pres.clone(), rep)?;
        match first.second_order_lift() {
            Ok(state) => {
                let status = state.status();
                all_terminated &= status.terminated;
                let flat = state.flatness_check(4)?;
                all_flat &= flat.pass;
                all_fibers &= flat.degrees.iter().all(|d| d.fiber != FiberCheck::Direct { matches: false });
                let generators: Vec<String> = if status.terminated {
                    state.extension_ideal()?.1.iter().map(|p| format!("{p:?}")).collect()
                } else {
                    Vec::new()
                };
                vectors.push(json!({
                    "index": i,
                    "status": status,
                    "flatness": flat,
                    "generators": generators,
                }));
            }
            Err(DeformError::NoLift) => {
                all_terminated = false;
                code = exit::NO_LIFT;
                vectors.push(json!({ "index": i, "status": "NO_LIFT" }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    rec.time("lift", t);
    rec.verdict("first_order_equals_corank", if fo.dim() == corank { "EQUAL" } else { "DIFFERENT" });
    rec.verdict("lift", if code == exit::NO_LIFT { "NO_LIFT" } else if all_terminated { "TERMINATED" } else { "NOT_TERMINATED" });
    rec.verdict("flatness", if all_flat && code == exit::OK { "PASS" } else { "FAIL" });
    rec.verdict("t0_fiber", if all_fibers { "EXACT" } else { "MISMATCH" });

    let mut details = json!({ "vectors": vectors });
    if let Constructor::PlaneCanonical { d } = x.spec().constructor {
        if d >= 7 {
            let t = Instant::now();
            let (_, _, section) = plane_extension_with_section(&session.field, d, x.spec().seed, session.cfg.retry_budget)?;
            for s in &section.degrees {
                rec.dim("surface_section_ideal", Some(i64::from(s.degree)), s.section_dim);
                rec.dim("curve_ideal", Some(i64::from(s.degree)), s.curve_dim);
            }
            rec.verdict("surface_section", if section.degrees.iter().all(|s| s.matches) { "MATCH" } else { "MISMATCH" });
            rec.verdict("surface_cone", if section.not_cone { "NOT_CONE" } else { "CONE" });
            details["surface"] = serde_json::to_value(&section)?;
            rec.time("surface", t);
        }
    }
    rec.details = Some(details);
    Ok(code)
}

pub fn cmd_star(session: &Session, spec: &VarietySpec, k_max: u32) -> Report {
    single("star", session, spec, |_, c, rec| star_steps(c, k_max, rec))
}

pub fn cmd_gaussian(session: &Session, spec: &VarietySpec) -> Report {
    single("gaussian", session, spec, |_, c, rec| gaussian_steps(c, rec))
}

pub fn cmd_t2(session: &Session, spec: &VarietySpec, k_max: u32) -> Report {
    single("t2", session, spec, |_, c, rec| t2_steps(c, k_max, rec))
}

pub fn cmd_extend(session: &Session, spec: &VarietySpec) -> Report {
    single("extend", session, spec, extend_steps)
}

fn single(
    command: &str,
    session: &Session,
    spec: &VarietySpec,
    steps: impl FnOnce(&Session, &Conormal, &mut Record) -> Result<i32, CliError>,
) -> Report {
    let mut report = Report::new(command, &session.cfg);
    let (rec, code) = run_instance(session, spec, steps);
    report.records.push(rec);
    report.exit_code = code;
    report
}

/// Runs a named suite. Exits 2 when any criterion fails and 1 when any
/// instance hit an internal error.
pub fn cmd_catalog(session: &Session, suite: &str) -> Result<Report, CliError> {
    let outcomes = crate::suites::run_suite(session, suite)?;
    let mut report = Report::new("catalog", &session.cfg);
    let errored = outcomes.iter().flat_map(|o| &o.records).any(|r| r.error.is_some());
    report.exit_code = if outcomes.iter().all(|o| o.pass) {
        exit::OK
    } else if errored {
        exit::ERROR
    } else {
        exit::INCONCLUSIVE
    };
    report.suite = Some(json!({ "name": suite, "criteria": outcomes }));
    report.records = outcomes.into_iter().flat_map(|o| o.records).collect();
    Ok(report)
}
