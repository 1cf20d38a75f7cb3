use crate::report::{frac, sidecar_path, solution_json, verdict_json};
use crate::{BipArgs, Ctx, DirectionArg, Format, ReduceArgs};
use anyhow::{anyhow, bail, Context, Result};
use contraction_kit::circuit::{build_interpolation_circuit, build_power_circuit, InterpolationRule};
use contraction_kit::cls::{
    parse_instance, parse_solution, print_instance, print_solution, solve_grid, Instance, Outcome, RejectReason,
};
use contraction_kit::converse::{parse_finite_map, synthesize as synth, SynthesisError};
use contraction_kit::iteration::{predict_global_budget, run_bip as bip_exact, steps_until};
use contraction_kit::metrics::{Distance, PointMap, SquaredEuclidean};
use contraction_kit::rational::parse_rational;
use contraction_kit::reduce::{
    map_banach_solution_to_cls_local, map_cls_local_solution_to_banach, reduce_banach_to_cls_local,
    reduce_cls_local_to_banach, HardnessOptions, ReductionArtifacts,
};
use contraction_kit::{parse_circuit, print_circuit, Point, Rational};
use num_traits::Zero;
use serde_json::{json, Value};
use std::path::Path;

fn rational(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| anyhow!("--{name}: {e}"))
}

fn load_instance(ctx: &mut Ctx, path: &Path) -> Result<Instance> {
    let text = ctx.report.read(path)?;
    parse_instance(&text).with_context(|| path.display().to_string())
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn eval(ctx: &mut Ctx, path: &Path, inputs: &[String]) -> Result<u8> {
    let text = ctx.report.read(path)?;
    let circuit = parse_circuit(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let values = inputs
        .iter()
        .flat_map(|s| s.split([',', ' ']).filter(|t| !t.is_empty()))
        .map(|t| parse_rational(t).map_err(|e| anyhow!("input {t:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    let out = circuit.evaluate(&values)?;
    let shown: Vec<String> = out.iter().map(|v| v.to_string()).collect();
    println!("{}", shown.join(" "));
    ctx.report.result = json!({
        "inputs": values.iter().map(frac).collect::<Vec<_>>(),
        "outputs": out.iter().map(frac).collect::<Vec<_>>(),
    });
    Ok(0)
}

pub fn build_power(ctx: &mut Ctx, c: &str, max_exp: u64) -> Result<u8> {
    let c = rational("c", c)?;
    let circuit = build_power_circuit(&c, max_exp)?;
    ctx.report.constant("c", &c);
    print!("{}", print_circuit(&circuit));
    Ok(0)
}

pub fn build_interpolation(ctx: &mut Ctx, c: &str, magnitude: &str, rule: InterpolationRule) -> Result<u8> {
    let c = rational("c", c)?;
    let magnitude = rational("magnitude", magnitude)?;
    let circuit = build_interpolation_circuit(&c, &magnitude, rule)?;
    ctx.report.constant("c", &c);
    ctx.report.constant("magnitude", &magnitude);
    print!("{}", print_circuit(&circuit));
    Ok(0)
}

pub fn verify(ctx: &mut Ctx, instance: &Path, solution: &Path) -> Result<u8> {
    let inst = load_instance(ctx, instance)?;
    let text = ctx.report.read(solution)?;
    let sol = parse_solution(&text).with_context(|| solution.display().to_string())?;
    let v = inst.verify(&sol);
    print!("{v}");
    ctx.report.result = verdict_json(&v, &sol);
    ctx.report.result["problem"] = inst.tag().into();
    Ok(match &v.outcome {
        Outcome::Accept => 0,
        // not a rejection of the witnesses: the claim is outside the problem
        Outcome::Reject(r @ (RejectReason::PromiseProblem | RejectReason::KindMismatch { .. })) => {
            eprintln!("error: {r}");
            2
        }
        Outcome::Reject(_) => 1,
    })
}

fn hardness_options(halve_eps: bool, rule: InterpolationRule) -> HardnessOptions {
    HardnessOptions { halve_eps, rule }
}

fn run_reduction(inst: &Instance, direction: DirectionArg, opts: HardnessOptions) -> Result<ReductionArtifacts> {
    Ok(match (direction, inst) {
        (DirectionArg::BanachToClsLocal, Instance::Banach(b)) => reduce_banach_to_cls_local(b)?,
        (DirectionArg::ClsLocalToBanach, Instance::ClsLocal(c)) => reduce_cls_local_to_banach(c, opts)?,
        (DirectionArg::BanachToClsLocal, other) => bail!("banach-to-cls-local needs a banach instance, got {}", other.tag()),
        (DirectionArg::ClsLocalToBanach, other) => bail!("cls-local-to-banach needs a cls-local instance, got {}", other.tag()),
    })
}

pub fn reduce(ctx: &mut Ctx, args: &ReduceArgs) -> Result<u8> {
    let inst = load_instance(ctx, &args.instance)?;
    let art = run_reduction(&inst, args.direction, hardness_options(args.halve_eps, args.rule.into()))?;
    let target = print_instance(&art.produced);
    std::fs::write(&args.out, &target).with_context(|| format!("cannot write {}", args.out.display()))?;
    let sidecar = json!({
        "provenance": art.provenance,
        "source": ctx.report.inputs[0],
        "target": { "path": args.out.display().to_string(), "sha256": crate::report::sha256_hex(target.as_bytes()) },
    });
    let side = sidecar_path(&args.out);
    std::fs::write(&side, serde_json::to_string_pretty(&sidecar)? + "\n")
        .with_context(|| format!("cannot write {}", side.display()))?;
    println!("{} -> {}", art.provenance.source_problem, art.provenance.target_problem);
    for (k, v) in &art.provenance.constants {
        println!("{k} = {v}");
        ctx.report.constants.insert(k.clone(), v.clone());
    }
    println!("wrote {} and {}", args.out.display(), side.display());
    ctx.report.result = sidecar;
    Ok(0)
}

pub fn solve(ctx: &mut Ctx, instance: &Path, out: Option<&Path>) -> Result<u8> {
    let inst = load_instance(ctx, instance)?;
    ctx.report.constants.insert("grid".into(), format!("1/{}", ctx.grid));
    match solve_grid(&inst, ctx.grid) {
        Some(sol) => {
            write_or_print(out, &print_solution(&sol))?;
            ctx.report.result = solution_json(&sol);
            Ok(0)
        }
        None => {
            eprintln!("no solution on the 1/{} grid", ctx.grid);
            ctx.report.result = Value::Null;
            Ok(1)
        }
    }
}

pub fn backmap(ctx: &mut Ctx, source: &Path, provenance: &Path, solution: &Path, out: Option<&Path>) -> Result<u8> {
    let inst = load_instance(ctx, source)?;
    let side: Value = serde_json::from_str(&ctx.report.read(provenance)?)
        .with_context(|| format!("{} is not a provenance sidecar", provenance.display()))?;
    let recorded = side["source"]["sha256"].as_str().unwrap_or_default();
    if recorded != ctx.report.inputs[0].sha256 {
        bail!("{} does not match the source recorded in {}", source.display(), provenance.display());
    }
    let p = &side["provenance"];
    let direction = match p["direction"].as_str() {
        Some("BANACH_TO_CLS_LOCAL") => DirectionArg::BanachToClsLocal,
        Some("CLS_LOCAL_TO_BANACH") => DirectionArg::ClsLocalToBanach,
        other => bail!("unknown reduction direction {other:?}"),
    };
    let halve = p["options"]["halve_eps"].as_str() == Some("true");
    let rule = match p["options"]["interpolation"].as_str() {
        Some("chord") => InterpolationRule::Chord,
        _ => InterpolationRule::Printed,
    };
    let art = run_reduction(&inst, direction, hardness_options(halve, rule))?;
    let sol = parse_solution(&ctx.report.read(solution)?).with_context(|| solution.display().to_string())?;
    let mapped = match (&inst, direction) {
        (Instance::Banach(b), DirectionArg::BanachToClsLocal) => map_cls_local_solution_to_banach(b, &sol),
        (Instance::ClsLocal(c), DirectionArg::ClsLocalToBanach) => map_banach_solution_to_cls_local(c, &art, &sol),
        _ => unreachable!("run_reduction checked the pairing"),
    };
    match mapped {
        Ok(back) => {
            let v = inst.verify(&back);
            write_or_print(out, &print_solution(&back))?;
            eprint!("{v}");
            ctx.report.result = verdict_json(&v, &back);
            Ok(if v.accepted() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{e}");
            eprint!("{}", e.trace());
            ctx.report.result = json!({ "error": e.to_string(), "replay": e.trace() });
            Ok(1)
        }
    }
}

pub fn synthesize(ctx: &mut Ctx, path: &Path, c: &str, eps: &str, out: Option<&Path>) -> Result<u8> {
    let text = ctx.report.read(path)?;
    let m = parse_finite_map(&text).with_context(|| path.display().to_string())?;
    let (c, eps) = (rational("c", c)?, rational("eps", eps)?);
    ctx.report.constant("c", &c);
    ctx.report.constant("eps", &eps);
    match synth(&m, &c, &eps) {
        Ok(s) => {
            let report = serde_json::to_value(s.report(&m))?;
            let body = json!({ "inputs": ctx.report.inputs, "synthesis": report });
            if let Some(p) = out {
                write_or_print(Some(p), &(serde_json::to_string_pretty(&body)? + "\n"))?;
            }
            println!("certificate: PASS ({} pairs)", s.certificate.pairs_checked);
            for (label, row) in m.labels().iter().zip(&s.d_c) {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("{label}: {}", cells.join(" "));
            }
            ctx.report.result = body;
            Ok(0)
        }
        Err(SynthesisError::Certificate { check, witness }) => {
            let names: Vec<&str> = witness.iter().map(|&i| m.labels()[i].as_str()).collect();
            println!("certificate: FAIL {check} at {names:?}");
            ctx.report.result = json!({ "failed_check": check, "witness": names });
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn print_budget(ctx: &mut Ctx, d0: &Rational, c: &Rational, eps: &Rational) -> Result<u64> {
    if d0.is_zero() {
        println!("predicted budget: 0 (d0 = 0)");
        ctx.report.result["predicted_steps"] = json!(0);
        return Ok(0);
    }
    let b = predict_global_budget(d0, c, eps)?;
    println!("predicted budget: {} (formula {:.6})", b.steps, b.predicted_steps);
    ctx.report.result["predicted_steps"] = json!(b.steps);
    ctx.report.result["predicted_raw"] = json!(b.predicted_steps);
    Ok(b.steps)
}

pub fn bip(ctx: &mut Ctx, args: &BipArgs) -> Result<u8> {
    let eps = rational("eps", &args.eps)?;
    ctx.report.constant("eps", &eps);
    if args.selfmap {
        return bip_selfmap(ctx, args, &eps);
    }
    let inst = load_instance(ctx, &args.input)?;
    let x0 = Point::parse(&args.x0).map_err(|e| anyhow!("--x0: {e}"))?;
    let (f, d, threshold, squared): (&dyn PointMap, &dyn Distance, Rational, bool) = match &inst {
        Instance::Banach(b) => (&b.f, &b.d, eps.clone(), false),
        Instance::ContractionMap(m) => (&m.f, &SquaredEuclidean, &eps * &eps, true),
        Instance::ClsLocal(_) => bail!("bip needs an instance with a distance (banach or contraction-map)"),
    };
    let trace = bip_exact(f, x0.clone(), d, &threshold, args.max_iters)?;
    match ctx.format {
        Format::Csv => print!("{}", trace.to_csv()),
        Format::Text => {
            for (t, r) in trace.residuals.iter().enumerate() {
                println!("{t}: {}  residual {r}", trace.points[t]);
            }
        }
    }
    if squared {
        eprintln!("residuals are squared euclidean distances, compared against eps^2");
    }
    println!("stop: {} at t = {}", trace.stop_reason, trace.stop_index());
    ctx.report.result = json!({
        "stop_reason": trace.stop_reason.to_string(),
        "stop_index": trace.stop_index(),
        "final_residual": frac(trace.final_residual()),
        "stop_point": trace.stop_point().0.iter().map(frac).collect::<Vec<_>>(),
    });
    if let Some(c) = &args.budget_c {
        let c = rational("budget-c", c)?;
        ctx.report.constant("budget_c", &c);
        print_budget(ctx, &d.distance(&x0, &f.apply(&x0)), &c, &eps)?;
    }
    Ok(if trace.stop_reason == contraction_kit::StopReason::ResidualBelowEps { 0 } else { 1 })
}

/// Finite self-map: synthesize `d_{c, ε/2}`, predict from `d₀ = d_c(x₀, f x₀)`
/// and count the steps until `d(x_t, x*) <= ε` in the base metric.
fn bip_selfmap(ctx: &mut Ctx, args: &BipArgs, eps: &Rational) -> Result<u8> {
    let text = ctx.report.read(&args.input)?;
    let m = parse_finite_map(&text).with_context(|| args.input.display().to_string())?;
    let start = m
        .labels()
        .iter()
        .position(|l| l == args.x0.trim())
        .ok_or_else(|| anyhow!("--x0: no point labelled {:?}", args.x0))?;
    let xs = m.fixed_point();
    let d = m.distance();
    let realized = steps_until(|&x: &usize| m.apply(x), &start, |&x| d[x][xs] <= *eps, args.max_iters)
        .ok_or_else(|| anyhow!("no convergence within {} steps", args.max_iters))?;
    let residual_stop = steps_until(|&x: &usize| m.apply(x), &start, |&x| d[x][m.apply(x)] <= *eps, args.max_iters);
    println!("steps until d(x_t, x*) <= eps: {realized}");
    if let Some(t) = residual_stop {
        println!("basic iterative procedure stops at t = {t}");
    }
    ctx.report.result = json!({ "realized_steps": realized, "bip_stop_index": residual_stop });
    let Some(c) = &args.budget_c else { return Ok(0) };
    let c = rational("budget-c", c)?;
    ctx.report.constant("budget_c", &c);
    let half = eps / Rational::from_integer(2.into());
    let s = synth(&m, &c, &half)?;
    let d0 = s.d_c[start][m.apply(start)].clone();
    ctx.report.constant("d0", &d0);
    let budget = print_budget(ctx, &d0, &c, eps)?;
    let ok = realized as u64 <= budget;
    println!("{}", if ok { "within budget" } else { "BUDGET EXCEEDED" });
    ctx.report.result["within_budget"] = ok.into();
    Ok(if ok { 0 } else { 1 })
}
