use std::collections::BTreeMap;

use mrec_core::expr::describe;
use mrec_core::folner::{
    averaged_correlation, brute_force_r, claim_admissibility, folner_ratio, folner_set, multiplicative_average,
    q_decompose, shift_partner, verify_character_shift, verify_qtrick, ClaimCharacters, FolnerElement,
    FolnerParams, QDecomposition, ShiftOutcome,
};
use mrec_core::multfunc::{Chord, MultFunction, UnitValue};
use mrec_core::multsys::{
    action_axioms_check, recurrence_measure, scan_recurrence, ArcSet, RatioSequence, RotationSystem,
};
use mrec_core::pretentious::{
    aperiodicity_profile, correlation, distance, log_average, log_average_bound, prime_character_sum,
    symmetric_grid, DistanceWindow, ProfileOptions,
};
use mrec_core::recurrence::{
    build_counterexample, build_pair_counterexample_with, criterion, density_estimate_for, fejer, pair_scan,
    scan_gaps, verify_certificate, CertificateCheck, CertificateRecord, CounterexampleCertificate, SCAN_BUDGET,
};
use mrec_core::{Error, Result};
use serde_json::{json, Value};

use crate::output::Output;
use crate::parse;
use crate::schema;
use crate::{Command, FolnerCommand, FolnerSetArgs, QtrickArgs, RecurCommand, SysCommand, SystemArgs};

/// Most rows `eval` will print.
const EVAL_ROWS: u64 = 1_000_000;

fn within_scan_budget(x: u64, what: &str) -> Result<()> {
    if x > SCAN_BUDGET {
        return Err(Error::Range {
            budget: "SCAN_BUDGET=10^8",
            detail: format!("{what} = {x}"),
        });
    }
    Ok(())
}

fn progression(text: &Option<String>) -> Result<Option<(u64, u64)>> {
    text.as_deref()
        .map(|t| parse::fixed::<u64, 2>(t, "progression L,r").map(|[l, r]| (l, r)))
        .transpose()
}

fn turn_text(v: UnitValue) -> Value {
    match v {
        UnitValue::Exact(t) => json!(t.to_string()),
        UnitValue::Zero => Value::Null,
        UnitValue::Float(_) => json!(v.angle()),
    }
}

fn chord_json(c: Chord) -> (Value, Value) {
    match c {
        Chord::Exact(_) => (json!(c.value()), json!(c.to_string())),
        Chord::Approx(x) => (json!(x), Value::Null),
    }
}

pub fn dispatch(command: Command) -> Result<Output> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Distance(a) => {
            let f = parse::function(&a.f)?;
            let g = parse::function(&a.g)?;
            let [lo, hi] = parse::fixed::<f64, 2>(&a.window, "window A,B")?;
            let d = distance(&f, &g, &DistanceWindow::new(lo, hi)?)?;
            Ok(Output::record(json!({
                "f": describe(&f), "g": describe(&g), "lower": lo, "upper": hi, "distance": d,
            })))
        }
        Command::Logavg(a) => {
            within_scan_budget(a.x, "X")?;
            let f = parse::function(&a.f)?;
            let avg = log_average(&f, a.x, progression(&a.progression)?)?;
            Ok(Output::record(json!({
                "f": describe(&f), "x": a.x, "progression": avg.progression,
                "re": avg.value.re, "im": avg.value.im, "abs": avg.value.norm(),
                "bound": log_average_bound(a.x),
            })))
        }
        Command::Correlate(a) => {
            within_scan_budget(a.x, "X")?;
            let f = parse::function(&a.f)?;
            let g = parse::function(&a.g)?;
            let [a1, b1, a2, b2] = parse::fixed::<i64, 4>(&a.abcd, "a1,b1,a2,b2")?;
            let z = correlation(&f, &g, a1, b1, a2, b2, a.x, progression(&a.progression)?)?;
            Ok(Output::record(json!({
                "f": describe(&f), "g": describe(&g), "abcd": [a1, b1, a2, b2], "x": a.x,
                "progression": progression(&a.progression)?, "re": z.re, "im": z.im, "abs": z.norm(),
            })))
        }
        Command::Profile(a) => profile(a),
        Command::Primesum(a) => primesum(a),
        Command::Folner(c) => folner(c),
        Command::Recur(c) => recur(c),
        Command::Sys(c) => sys(c),
    }
}

fn eval(a: crate::EvalArgs) -> Result<Output> {
    let f = parse::function(&a.f)?;
    let to = a.to.unwrap_or(a.from);
    if a.from == 0 || to < a.from {
        return Err(Error::InvalidInput(format!("invalid range [{}, {to}]", a.from)));
    }
    if to - a.from >= EVAL_ROWS {
        return Err(Error::Range {
            budget: "EVAL_ROWS=10^6",
            detail: format!("{} rows requested", to - a.from + 1),
        });
    }
    let mut out = Output::table(schema::EVAL);
    for n in a.from..=to {
        let v = f.eval(n)?;
        let z = v.to_complex();
        out.push(vec![json!(n), json!(z.re), json!(z.im), turn_text(v), json!(v.is_exact())]);
    }
    Ok(out)
}

fn profile(a: crate::ProfileArgs) -> Result<Output> {
    let f = parse::function(&a.f)?;
    let xs: Vec<u64> = parse::list(&a.x, "scales X")?;
    let options = ProfileOptions {
        imprimitive: a.imprimitive,
        refine: !a.no_refine,
    };
    let mut recs = Vec::new();
    for x in xs {
        let half_width = a.half_width.unwrap_or(a.b * x as f64);
        let grid = symmetric_grid(half_width, a.points);
        let p = aperiodicity_profile(&f, a.b, x, &grid, options)?;
        let rows = if a.rows {
            serde_json::to_value(&p.rows).expect("rows serialise")
        } else {
            Value::Null
        };
        recs.push(json!({
            "f": describe(&f), "b": a.b, "x": x, "points": a.points, "half_width": half_width,
            "resolution": p.resolution, "grid_infimum": p.grid_infimum, "refined": p.refined,
            "infimum": p.infimum, "rows": rows,
        }));
    }
    Ok(Output::Records(recs))
}

fn primesum(a: crate::PrimesumArgs) -> Result<Output> {
    let chi = parse::character(&a.chi)?;
    let values: Vec<f64> = match (&a.a, &a.log_spaced) {
        (Some(list), None) => parse::list(list, "values of a")?,
        (None, Some(text)) => {
            let [lo, hi, count] = parse::fixed::<f64, 3>(text, "lo,hi,count")?;
            if !(lo > 0.0 && hi >= lo && count >= 1.0 && count.fract() == 0.0) {
                return Err(Error::InvalidInput(format!("log-spaced '{text}' needs 0 < lo ≤ hi and a whole count")));
            }
            let k = count as usize;
            (0..k)
                .map(|i| if k == 1 { lo } else { lo * (hi / lo).powf(i as f64 / (k - 1) as f64) })
                .collect()
        }
        _ => return Err(Error::InvalidInput("give --a or --log-spaced".into())),
    };
    let mut out = Output::table(schema::PRIMESUM);
    for v in values {
        let z = prime_character_sum(&chi, v, a.y, a.x)?;
        out.push(vec![json!(v), json!(z.re), json!(z.im), json!(z.norm())]);
    }
    Ok(out)
}

fn params(a: &FolnerSetArgs) -> Result<FolnerParams> {
    let primes: Vec<u64> = parse::list(&a.primes, "primes")?;
    let [lo, hi] = parse::fixed::<u32, 2>(&a.window, "window lo,hi")?;
    FolnerParams::new(primes, lo, hi)
}

fn exponents(q: &FolnerElement) -> Value {
    json!(q.exponents())
}

/// The selected elements with their decompositions.
fn decompositions(a: &QtrickArgs) -> Result<(FolnerParams, Vec<(FolnerElement, QDecomposition)>)> {
    let p = params(&a.set)?;
    let [a1, b1, a2, b2] = parse::fixed::<i64, 4>(&a.abcd, "a1,b1,a2,b2")?;
    let mut set = folner_set(&p)?;
    if let Some(q) = &a.q {
        set.retain(|e| e.value().to_string() == q.trim());
        if set.is_empty() {
            return Err(Error::InvalidInput(format!("{q} is not in the set")));
        }
    }
    let decs = set
        .into_iter()
        .map(|e| {
            let d = q_decompose(&p, &e, a1, b1, a2, b2, a.mu, a.nu)?;
            Ok((e, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((p, decs))
}

fn folner(c: FolnerCommand) -> Result<Output> {
    match c {
        FolnerCommand::Gen(a) => {
            let mut out = Output::table(schema::FOLNER_GEN);
            for q in folner_set(&params(&a)?)? {
                out.push(vec![json!(q.value().to_string()), exponents(&q)]);
            }
            Ok(out)
        }
        FolnerCommand::Ratio(a) => {
            let p = params(&a)?;
            let w = p.width() as u64;
            let mut out = Output::table(schema::FOLNER_RATIO);
            for &prime in p.primes() {
                let r = folner_ratio(&p, prime)?;
                let expected = num_rational::Ratio::new(w - 1, w);
                out.push(vec![json!(prime), json!(r.to_string()), json!(expected.to_string()), json!(r == expected)]);
            }
            Ok(out)
        }
        FolnerCommand::Avg { f, set } => {
            let p = params(&set)?;
            let f = parse::function(&f)?;
            let avg = multiplicative_average(&f, &p)?;
            Ok(Output::record(json!({
                "f": describe(&f), "size": p.len(), "re": avg.average.re, "im": avg.average.im,
                "bounds": avg.bounds,
            })))
        }
        FolnerCommand::Decompose(a) => {
            let (_, decs) = decompositions(&a)?;
            let mut out = Output::table(schema::FOLNER_DECOMPOSE);
            for (q, d) in decs {
                out.push(vec![
                    json!(d.q.to_string()),
                    exponents(&q),
                    json!(d.a.to_string()),
                    json!(d.w.to_string()),
                    json!(d.u.to_string()),
                    json!(d.r_q.to_string()),
                    json!(d.crt_modulus.to_string()),
                    json!(d.l_q.to_string()),
                    json!(d.m_q.to_string()),
                    json!(d.swapped),
                ]);
            }
            Ok(out)
        }
        FolnerCommand::Verify { args, brute } => {
            let (_, decs) = decompositions(&args)?;
            let mut out = Output::table(schema::FOLNER_VERIFY);
            for (_, d) in decs {
                let (count, all_hold, failed) = match verify_qtrick(&d) {
                    Ok(r) => (json!(r.checks.len()), true, Value::Null),
                    Err(Error::CertificateFailure { identity, .. }) => (Value::Null, false, json!(identity)),
                    Err(e) => return Err(e),
                };
                let (brute_r, brute_equal) = if brute {
                    let r = brute_force_r(&d)?;
                    (json!(r), json!(d.r_q == r.into()))
                } else {
                    (Value::Null, Value::Null)
                };
                out.push(vec![json!(d.q.to_string()), json!(d.r_q.to_string()), count, json!(all_hold), failed, brute_r, brute_equal]);
            }
            Ok(out)
        }
        FolnerCommand::Claims { args, chars } => {
            let parts: Vec<&str> = chars.split(';').collect();
            let [f1, f2, g1, g2] = parts.as_slice() else {
                return Err(Error::InvalidInput(format!("--chars needs f1;f2;g1;g2, got '{chars}'")));
            };
            let chars = ClaimCharacters {
                f1: parse::character(f1)?,
                f2: parse::character(f2)?,
                g1: parse::character(g1)?,
                g2: parse::character(g2)?,
            };
            let (p, decs) = decompositions(&args)?;
            if let Some((_, d)) = decs.first() {
                if let Some(why) = claim_admissibility(d, &p, &chars) {
                    return Err(Error::Precondition(why));
                }
            }
            let mut out = Output::table(schema::FOLNER_CLAIMS);
            for (q, d) in &decs {
                for &prime in p.primes() {
                    if d.a1 as u64 % prime == 0 {
                        continue;
                    }
                    let partner = shift_partner(&p, q, prime)?;
                    let dec_qp = match &partner {
                        Some(qp) => q_decompose(&p, qp, d.a1, d.b1, d.a2, d.b2, d.mu, d.nu)?,
                        None => d.clone(),
                    };
                    let row = match verify_character_shift(&p, d, &dec_qp, prime, &chars)? {
                        ShiftOutcome::Exceptional { q, p } => {
                            vec![json!(q), json!(p), Value::Null, json!("exceptional"), Value::Null]
                        }
                        ShiftOutcome::Checked(r) => {
                            let failed: Vec<&str> = r.checks.iter().filter(|c| !c.holds).map(|c| c.identity).collect();
                            let outcome = if failed.is_empty() { "holds" } else { "fails" };
                            let failed = if failed.is_empty() { Value::Null } else { json!(failed.join("; ")) };
                            vec![json!(r.q), json!(r.p), json!(r.qp), json!(outcome), failed]
                        }
                    };
                    out.push(row);
                }
            }
            Ok(out)
        }
        FolnerCommand::Corr { args, f, g, x } => {
            let p = params(&args.set)?;
            let [a1, b1, a2, b2] = parse::fixed::<i64, 4>(&args.abcd, "a1,b1,a2,b2")?;
            within_scan_budget(x, "X")?;
            let f = parse::function(&f)?;
            let g = parse::function(&g)?;
            let z = averaged_correlation(&f, &g, a1, b1, a2, b2, &p, args.mu, args.nu, x)?;
            Ok(Output::record(json!({
                "f": describe(&f), "g": describe(&g), "abcd": [a1, b1, a2, b2], "x": x, "size": p.len(),
                "re": z.re, "im": z.im, "abs": z.norm(),
            })))
        }
    }
}

fn check_json(c: &CertificateCheck) -> Value {
    let (value, exact) = chord_json(c.minimum);
    json!({
        "from": c.from, "to": c.to, "minimum": exact.as_str().map_or(json!(c.minimum.to_string()), |s| json!(s)),
        "minimum_value": value, "argmin": c.argmin, "exact": c.exact,
    })
}

fn certificate_json(cert: &CounterexampleCertificate) -> Value {
    serde_json::to_value(cert.to_record()).expect("certificate serialises")
}

fn recur(c: RecurCommand) -> Result<Output> {
    match c {
        RecurCommand::Criterion { quad } => {
            let q = parse::quad(&quad)?;
            let r = criterion(q);
            Ok(Output::record(json!({
                "criterion": r.holds, "quad": q.to_string(), "normalized": r.normalized.to_string(),
            })))
        }
        RecurCommand::Scan { f, g, quad, n, from } => {
            let q = parse::quad(&quad)?;
            let f = parse::function(&f)?;
            let g = g.as_deref().map(parse::function).transpose()?.unwrap_or_else(|| f.clone());
            let trace = scan_gaps(&f, &g, &q, from, n)?;
            let mut out = Output::table(schema::RECUR_SCAN);
            for r in &trace.records {
                let (value, exact) = chord_json(r.gap);
                out.push(vec![json!(r.n), value, exact]);
            }
            let minimum = trace.minimum().map(|r| r.gap.value());
            eprintln!(
                "{}",
                json!({
                    "quad": q.to_string(), "from": trace.from, "to": trace.to, "minimum": minimum,
                    "zero_samples": trace.zero_samples, "first_zero": trace.first_zero,
                })
            );
            Ok(out)
        }
        RecurCommand::Density { f, eps, quad, x } => {
            let q = parse::quad(&quad)?;
            let f = parse::function(&f)?;
            let d = density_estimate_for(&f, eps, &q, x)?;
            Ok(Output::record(json!({
                "f": describe(&f), "eps": d.eps, "quad": d.quad.to_string(), "x": d.x, "estimate": d.estimate,
                "upper": d.upper, "lower": d.lower, "hits": d.hits,
            })))
        }
        RecurCommand::Counterexample { quad, verify } => {
            let cert = build_counterexample(parse::quad(&quad)?)?;
            let mut rec = certificate_json(&cert);
            if let Some(n) = verify {
                rec["check"] = check_json(&verify_certificate(&cert, n)?);
            }
            Ok(Output::record(rec))
        }
        RecurCommand::Verify { cert, quad, n, n0 } => {
            let mut certificate = match (cert, quad) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
                    let record: CertificateRecord = serde_json::from_str(line)
                        .map_err(|e| Error::Parse { offset: e.column().saturating_sub(1), message: e.to_string() })?;
                    CounterexampleCertificate::from_record(&record)?
                }
                (None, Some(q)) => build_counterexample(parse::quad(&q)?)?,
                _ => return Err(Error::InvalidInput("give --cert or --quad".into())),
            };
            if let Some(n0) = n0 {
                certificate = certificate.with_threshold(n0);
            }
            let check = verify_certificate(&certificate, n)?;
            let mut rec = check_json(&check);
            rec["certificate"] = certificate_json(&certificate);
            Ok(Output::record(rec))
        }
        RecurCommand::Fejer { eps, r, coefficients } => {
            let r = match r {
                Some(r) => r,
                None => fejer(eps, 1)?.minimal_r,
            };
            let approx = fejer(eps, r)?;
            let grid = approx.check_grid();
            Ok(Output::record(json!({
                "eps": approx.eps, "r": approx.r, "minimal_r": approx.minimal_r, "grid_error": approx.grid_error,
                "meets_bound": approx.meets_bound, "dominated": grid.dominated,
                "min_polynomial": grid.min_polynomial, "lower_bound_holds": grid.lower_bound_holds,
                "lower_bound_margin": grid.lower_bound_margin,
                "coefficients": if coefficients { json!(approx.coefficients) } else { Value::Null },
            })))
        }
        RecurCommand::Pair { theta1, theta2, n } => {
            let cert = build_pair_counterexample_with(parse::turn(&theta1)?, parse::turn(&theta2)?)?;
            let check = verify_certificate(&cert, n)?;
            let shift1 = pair_scan(&cert.f, cert.second(), 1, n)?;
            let min = shift1.minimum();
            Ok(Output::record(json!({
                "certificate": certificate_json(&cert), "check": check_json(&check),
                "shift1_minimum": min.map(|r| r.gap.value()), "shift1_argmin": min.map(|r| r.n), "n": n,
            })))
        }
    }
}

fn system(a: &SystemArgs) -> Result<(RotationSystem, Vec<MultFunction>)> {
    let fs = a.fs.iter().map(|t| parse::function(t)).collect::<Result<Vec<_>>>()?;
    Ok((RotationSystem::from_functions(fs.clone())?, fs))
}

fn arc_sets(texts: &[String]) -> Result<Vec<ArcSet>> {
    texts.iter().map(|t| parse::arc_set(t)).collect()
}

fn sys(c: SysCommand) -> Result<Output> {
    match c {
        SysCommand::Build(a) => {
            let (s, fs) = system(&a)?;
            let coords: Vec<BTreeMap<&str, Value>> = fs
                .iter()
                .map(|f| {
                    BTreeMap::from([
                        ("f", json!(describe(f))),
                        ("exact", json!(f.is_exact())),
                        ("finitely_generated", json!(f.is_finitely_generated())),
                    ])
                })
                .collect();
            Ok(Output::record(json!({ "dimension": s.dimension(), "coordinates": coords })))
        }
        SysCommand::Measure { sys, p, q, arcs } => {
            let (s, _) = system(&sys)?;
            let m = recurrence_measure(&s, p, q, &arc_sets(&arcs)?)?;
            Ok(Output::record(json!({
                "p": p, "q": q, "measure": m.to_string(), "measure_value": m.to_f64(),
            })))
        }
        SysCommand::Scan { sys, quad, arcs, from, to } => {
            let (s, _) = system(&sys)?;
            let scan = scan_recurrence(&s, &RatioSequence::Forms(parse::quad(&quad)?), &arc_sets(&arcs)?, from, to)?;
            let mut out = Output::table(schema::SYS_SCAN);
            for e in &scan.events {
                out.push(vec![json!(e.n), json!(e.p), json!(e.q), json!(e.measure.to_string())]);
            }
            eprintln!(
                "{}",
                json!({
                    "from": scan.from, "to": scan.to, "events": scan.count(), "largest_gap": scan.largest_gap,
                    "bridge_checked": scan.bridge_checked, "bridge_violations": scan.bridge_violations.len(),
                })
            );
            Ok(out)
        }
        SysCommand::Axioms { sys, trials, seed } => {
            let (s, _) = system(&sys)?;
            let report = action_axioms_check(&s, trials, seed)?;
            let mut rec = serde_json::to_value(&report).expect("report serialises");
            rec["passed"] = json!(report.passed());
            Ok(Output::record(rec))
        }
    }
}
