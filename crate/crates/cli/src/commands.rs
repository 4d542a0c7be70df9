use std::path::Path;
use std::sync::Arc;

use affmod::ffcount::{count_points, max_cells, singular_witness, uv_identity};
use affmod::flows::{check_lnd, exp_flow, lift_auto_g, lift_derivation, lift_intertwines, Derivation, HypersurfaceX, XPoint};
use affmod::modification::{gallery, modify, strict_transform, AffineTriple, Certification, GalleryParams};
use affmod::rectify::{normal_form, rectify_n1, rectify_pair, smoothness_check, verify_rectified, BinomialSurface, RectifyWord, Smoothness};
use affmod::scalar::{format_rational, parse_rational, Capprox, Field, Fp, Rational, Q};
use affmod::transitivity::{format_point, solve};
use affmod::{parse, parse_in, Error, Poly, PolyMap, VarContext};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::job::*;
use crate::Command;

pub enum Outcome {
    Ok(Value),
    VerifyFailed(Value),
    InputError(Value),
    Incomplete(String, Value),
}

/// Errors before or during execution, sorted into report categories.
enum Failure {
    Lib(Error),
    Job(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn job_err<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Job(msg.into()))
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string() });
    if let Error::Syntax { pos, .. } = e {
        v["position"] = json!(pos);
    }
    v
}

pub fn run(command: Command, job_path: &Path) -> Outcome {
    match execute(command, job_path) {
        Ok(out) => out,
        Err(Failure::Job(msg)) => Outcome::InputError(json!({ "kind": "Job", "message": msg })),
        Err(Failure::Lib(e)) if e.is_incomplete() => Outcome::Incomplete(e.kind().into(), error_json(&e)),
        Err(Failure::Lib(e @ Error::CertificationFailed(_))) => Outcome::VerifyFailed(json!({ "error": error_json(&e) })),
        Err(Failure::Lib(e)) => Outcome::InputError(error_json(&e)),
    }
}

enum FieldSpec {
    Q,
    Fq(Fp),
    Capprox(Capprox),
}

fn parse_field(s: &str) -> Res<FieldSpec> {
    let s = s.trim();
    if s == "Q" {
        return Ok(FieldSpec::Q);
    }
    if s == "Capprox" {
        return Ok(FieldSpec::Capprox(Capprox::default()));
    }
    let inner = |prefix: &str| s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
    if let Some(q) = inner("Fq(") {
        let q: u32 = q.trim().parse().map_err(|_| Failure::Job(format!("bad modulus in `{s}`")))?;
        return Ok(FieldSpec::Fq(Fp::new(q)?));
    }
    if let Some(eps) = inner("Capprox(") {
        let eps: f64 = eps.trim().parse().map_err(|_| Failure::Job(format!("bad tolerance in `{s}`")))?;
        return Ok(FieldSpec::Capprox(Capprox { eps }));
    }
    job_err(format!("unknown field `{s}`; expected Q, Fq(q) or Capprox"))
}

fn execute(command: Command, job_path: &Path) -> Res<Outcome> {
    let text = std::fs::read_to_string(job_path).map_err(|e| Failure::Job(format!("cannot read {}: {e}", job_path.display())))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| Failure::Job(format!("invalid JSON: {e}")))?;
    let obj = value.as_object_mut().ok_or_else(|| Failure::Job("job must be a JSON object".into()))?;
    let mut header_obj = serde_json::Map::new();
    for k in HEADER_KEYS {
        if let Some(v) = obj.remove(*k) {
            header_obj.insert((*k).into(), v);
        }
    }
    let header: Header = from_value(Value::Object(header_obj))?;
    if let Some(c) = &header.command {
        if c != command.name() {
            return job_err(format!("job is for `{c}`, not `{}`", command.name()));
        }
    }
    let field = parse_field(&header.field)?;
    let payload = value;
    let base_dir = job_path.parent().unwrap_or(Path::new("."));
    let ctx = || -> Res<Arc<VarContext>> {
        if header.vars.is_empty() {
            return job_err("`vars` must list the variables");
        }
        Ok(VarContext::new(header.vars.iter().map(String::as_str))?)
    };
    let needs_q = |name: &str| -> Res<()> {
        match field {
            FieldSpec::Q => Ok(()),
            _ => job_err(format!("`{name}` runs over Q only")),
        }
    };
    match command {
        Command::Modify => {
            needs_q("modify")?;
            run_modify(&ctx()?, from_value(payload)?)
        }
        Command::StrictTransform => {
            needs_q("strict-transform")?;
            run_strict(&ctx()?, from_value(payload)?)
        }
        Command::Lift => {
            needs_q("lift")?;
            run_lift(&ctx()?, from_value(payload)?)
        }
        Command::Flow => {
            let job: FlowJob = from_value(payload)?;
            match &field {
                FieldSpec::Q => run_flow(&ctx()?, &Q, job),
                FieldSpec::Fq(f) => run_flow(&ctx()?, f, job),
                FieldSpec::Capprox(f) => run_flow(&ctx()?, f, job),
            }
        }
        Command::Transitivity => {
            needs_q("transitivity")?;
            run_transitivity(&ctx()?, from_value(payload)?)
        }
        Command::Rectify => {
            needs_q("rectify")?;
            run_rectify(&ctx()?, from_value(payload)?)
        }
        Command::Count => {
            let job: CountJob = from_value(payload)?;
            let q = match (&field, job.q) {
                (FieldSpec::Fq(f), None) => f.modulus(),
                (FieldSpec::Fq(f), Some(q)) if q == f.modulus() => q,
                (FieldSpec::Q, Some(q)) => q,
                _ => return job_err("count needs a prime: field Fq(q) or a `q` entry"),
            };
            run_count(&ctx()?, q, job)
        }
        Command::Gallery => run_gallery(from_value(payload)?),
        Command::Verify => {
            needs_q("verify")?;
            run_verify(&ctx()?, base_dir, from_value(payload)?)
        }
    }
}

fn from_value<T: DeserializeOwned>(v: Value) -> Res<T> {
    serde_json::from_value(v).map_err(|e| Failure::Job(format!("job schema: {e}")))
}

fn polys_json<F: Field>(ps: &[Poly<F>]) -> Value {
    json!(ps.iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

fn parse_all(ctx: &Arc<VarContext>, items: &[String]) -> Res<Vec<Poly>> {
    Ok(items.iter().map(|s| parse(ctx, s)).collect::<Result<_, _>>()?)
}

fn certification(s: Option<&str>) -> Res<Certification> {
    Ok(match s.unwrap_or("auto") {
        "auto" => Certification::Auto,
        "gcd" => Certification::Gcd,
        "point" => Certification::PointCenter,
        "asserted" => Certification::Asserted,
        other => return job_err(format!("unknown certification `{other}`")),
    })
}

fn run_modify(ctx: &Arc<VarContext>, job: ModifyJob) -> Res<Outcome> {
    let relation = job.relation.as_deref().map(|r| parse(ctx, r)).transpose()?;
    let triple = AffineTriple::new(ctx, relation, parse(ctx, &job.f)?, parse_all(ctx, &job.center)?)?;
    let pres = modify(&triple, certification(job.certification.as_deref())?)?;
    let ok = pres.fractions_annihilate()?;
    let out = json!({
        "vars": pres.ctx.names(),
        "new_vars": pres.new_vars,
        "relation": pres.relation.as_ref().map(|r| r.to_string()),
        "equations": polys_json(&pres.equations),
        "exceptional": polys_json(&pres.exceptional_eqs),
        "certified_by": format!("{:?}", pres.certified_by),
        "fractions_annihilate": ok,
    });
    Ok(if ok { Outcome::Ok(out) } else { Outcome::VerifyFailed(out) })
}

fn run_strict(ctx: &Arc<VarContext>, job: StrictTransformJob) -> Res<Outcome> {
    let target = VarContext::new(job.target_vars.iter().map(String::as_str))?;
    let images = parse_all(&target, &job.images)?;
    let blowdown = PolyMap::new(ctx, &target, images)?;
    let exc = target.var_index(&job.exceptional)?;
    let (mu, g1) = strict_transform(&parse(ctx, &job.g)?, &blowdown, exc)?;
    Ok(Outcome::Ok(json!({ "multiplicity": mu, "strict_transform": g1.to_string() })))
}

fn run_lift(ctx: &Arc<VarContext>, job: LiftJob) -> Res<Outcome> {
    if let Some(auto) = &job.automorphism {
        let mu = PolyMap::endo(ctx, parse_all(ctx, auto)?)?;
        let lifted = lift_auto_g(&mu)?;
        return Ok(Outcome::Ok(json!({ "lifted_automorphism": polys_json(lifted.images()) })));
    }
    let (Some(f), Some(d)) = (&job.f, &job.derivation) else {
        return job_err("lift needs either `automorphism`, or `f`, `center` and `derivation`");
    };
    let relation = job.relation.as_deref().map(|r| parse(ctx, r)).transpose()?;
    let triple = AffineTriple::new(ctx, relation, parse(ctx, f)?, parse_all(ctx, &job.center)?)?;
    let pres = modify(&triple, Certification::Auto)?;
    let der = Derivation::new(ctx, parse_all(ctx, d)?)?;
    let lifted = lift_derivation(&pres, &der)?;
    let ok = lift_intertwines(&pres, &der, &lifted, &[])?;
    let out = json!({
        "vars": pres.ctx.names(),
        "equations": polys_json(&pres.equations),
        "lifted_derivation": polys_json(lifted.images()),
        "intertwines": ok,
    });
    Ok(if ok { Outcome::Ok(out) } else { Outcome::VerifyFailed(out) })
}

fn run_flow<F: Field>(ctx: &Arc<VarContext>, field: &F, job: FlowJob) -> Res<Outcome> {
    let images = job
        .derivation
        .iter()
        .map(|s| parse_in(ctx, field, s))
        .collect::<Result<Vec<_>, _>>()?;
    let d = Derivation::new(ctx, images)?;
    let cert = check_lnd(&d, job.max_iter.unwrap_or(64))?;
    let tname = job.time.unwrap_or_else(|| ctx.fresh_name(&["t", "s", "tau"], "t"));
    let (ext, t) = match ctx.index_of(&tname) {
        Some(_) => return job_err(format!("time `{tname}` clashes with a variable")),
        None => {
            let ext = ctx.extend([tname.clone()])?;
            let t = Poly::var_at(&ext, field, ctx.len());
            (ext, t)
        }
    };
    let flow = exp_flow(&d, &cert, &t)?;
    Ok(Outcome::Ok(json!({
        "field": field.describe(),
        "vars": ext.names(),
        "nilpotency_orders": cert.orders,
        "flow": polys_json(flow.images()),
    })))
}

fn parse_point(pt: &[String]) -> Res<Vec<Rational>> {
    Ok(pt.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?)
}

fn xpoints(x: &HypersurfaceX, pts: &[Vec<String>]) -> Res<Vec<XPoint>> {
    pts.iter()
        .map(|p| {
            if p.len() != x.k() + 2 {
                return job_err(format!("points need {} coordinates (x̄, u, v)", x.k() + 2));
            }
            Ok(XPoint::from_coords(&parse_point(p)?))
        })
        .collect()
}

fn run_transitivity(ctx: &Arc<VarContext>, job: TransitivityJob) -> Res<Outcome> {
    let x = HypersurfaceX::new(&parse(ctx, &job.p)?)?;
    let sources = xpoints(&x, &job.sources)?;
    let targets = xpoints(&x, &job.targets)?;
    let plan = solve(&x, &sources, &targets)?;
    let trace: Vec<Value> = plan
        .trace
        .iter()
        .map(|s| {
            json!({
                "stage": s.name,
                "word_end": s.word_end,
                "points": s.points.iter().map(format_point).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Outcome::Ok(json!({
        "vars": x.full().names(),
        "word": plan.word.to_string(),
        "trace": trace,
        "stats": { "word_length": plan.stats.word_length, "max_coeff_bits": plan.stats.max_coeff_bits },
        "verified": true,
    })))
}

fn run_rectify(ctx: &Arc<VarContext>, job: RectifyJob) -> Res<Outcome> {
    let g = parse(ctx, &job.g)?;
    match job.mode.as_deref().unwrap_or("n1") {
        "n1" => {
            let Some(p) = &job.p else {
                return job_err("rectify needs `p`");
            };
            let p = parse(ctx, p)?;
            let nf = normal_form(&p, &g)?;
            let word = rectify_n1(&p, &g)?;
            let inv = word.inverse()?;
            Ok(Outcome::Ok(json!({
                "vars": word.ctx.names(),
                "normal_form": {
                    "root": format_rational(&nf.root),
                    "h": nf.h.to_string(),
                    "c": format_rational(&nf.c),
                    "gamma": format_rational(&nf.gamma),
                },
                "word": word.to_string(),
                "plane_c": format_rational(&word.c),
                "inverse": polys_json(inv.images()),
                "verified": true,
            })))
        }
        "pair" => {
            let Some(f) = &job.f else {
                return job_err("pair mode needs `f`");
            };
            let hint = job.f1.as_deref().map(|s| parse(ctx, s)).transpose()?;
            let (alpha, p) = rectify_pair(&parse(ctx, f)?, &g, hint.as_ref())?;
            Ok(Outcome::Ok(json!({ "alpha": polys_json(alpha.images()), "p": p.to_string() })))
        }
        "smoothness" => {
            let Some(f) = &job.f else {
                return job_err("smoothness mode needs `f`");
            };
            let s = BinomialSurface::new(&parse(ctx, f)?, &g, job.n.unwrap_or(1))?;
            Ok(match smoothness_check(&s)? {
                Smoothness::Smooth => Outcome::Ok(json!({ "verdict": "smooth" })),
                Smoothness::SingularWitness { x, y, z, z_pow } => Outcome::Ok(json!({
                    "verdict": "singular",
                    "x": format_rational(&x),
                    "y": format_rational(&y),
                    "z": z.as_ref().map(format_rational),
                    "z_pow": format_rational(&z_pow),
                })),
                Smoothness::Undecided(reason) => Outcome::Incomplete("Undecided".into(), json!({ "reason": reason })),
            })
        }
        other => job_err(format!("unknown rectify mode `{other}`")),
    }
}

fn run_count(ctx: &Arc<VarContext>, q: u32, job: CountJob) -> Res<Outcome> {
    if let Some(p) = &job.p {
        let r = uv_identity(&parse(ctx, p)?, q)?;
        let out = json!({
            "q": r.q, "k": r.k, "N_X": r.n_x, "N_0": r.n_0, "predicted": r.predicted, "match": r.matches,
        });
        return Ok(if r.matches { Outcome::Ok(out) } else { Outcome::VerifyFailed(out) });
    }
    let eqs = parse_all(ctx, &job.equations)?;
    let n = count_points(&eqs, q)?;
    let witness = match job.witness_budget {
        Some(b) => singular_witness(&eqs, q, b.min(max_cells() as u64))?,
        None => None,
    };
    Ok(Outcome::Ok(json!({ "q": q, "count": n, "singular_witness": witness })))
}

fn run_gallery(job: GalleryJob) -> Res<Outcome> {
    let params = GalleryParams {
        ints: job.params,
        polys: job.polys,
    };
    let entry = gallery(&job.name, &params)?;
    let golden = entry.golden.as_ref().map(|g| {
        json!({
            "numerator": g.numerator,
            "denominator": g.denominator,
            "unit": format_rational(&g.unit),
            "matches": g.matches,
        })
    });
    let out = json!({
        "name": entry.name,
        "vars": entry.ctx.names(),
        "equations": polys_json(&entry.equations),
        "golden": golden,
    });
    Ok(match &entry.golden {
        Some(g) if !g.matches => Outcome::VerifyFailed(out),
        _ => Outcome::Ok(out),
    })
}

fn load_word(base_dir: &Path, job: &VerifyJob) -> Res<String> {
    match (&job.word, &job.word_file) {
        (Some(w), None) => Ok(w.clone()),
        (None, Some(path)) => {
            let full = base_dir.join(path);
            std::fs::read_to_string(&full).map_err(|e| Failure::Job(format!("cannot read {}: {e}", full.display())))
        }
        _ => job_err("give exactly one of `word` and `word_file`"),
    }
}

fn run_verify(ctx: &Arc<VarContext>, base_dir: &Path, job: VerifyJob) -> Res<Outcome> {
    let text = load_word(base_dir, &job)?;
    match job.kind.as_str() {
        "transitivity" => {
            let x = HypersurfaceX::new(&parse(ctx, &job.p)?)?;
            let sources = xpoints(&x, &job.sources)?;
            let targets = xpoints(&x, &job.targets)?;
            if sources.len() != targets.len() {
                return job_err("sources and targets differ in number");
            }
            let word = affmod::flows::AutoWord::parse_text(x.base(), &Q, &text)?;
            let mut on_variety = true;
            let mut images = Vec::with_capacity(sources.len());
            for s in &sources {
                let mut pt = s.clone();
                on_variety &= x.contains(&pt)?;
                for g in word.gens() {
                    pt = x.apply_generator(g, &pt)?;
                    on_variety &= x.contains(&pt)?;
                }
                images.push(pt);
            }
            let hits = images == targets;
            let preserves = x.verify_preserves(&word)?;
            let ok = hits && on_variety && preserves;
            let out = json!({
                "word_length": word.len(),
                "images": images.iter().map(format_point).collect::<Vec<_>>(),
                "maps_sources_to_targets": hits,
                "stays_on_variety": on_variety,
                "generators_preserve_X": preserves,
                "verified": ok,
            });
            Ok(if ok { Outcome::Ok(out) } else { Outcome::VerifyFailed(out) })
        }
        "rectify" => {
            let Some(g) = &job.g else {
                return job_err("rectify verification needs `g`");
            };
            let surface = BinomialSurface::from_equation(&parse(ctx, &job.p)?, &parse(ctx, g)?)?;
            let word = RectifyWord::parse_text(surface.ctx(), &text)?;
            let ok = verify_rectified(&surface, &word);
            let out = json!({ "steps": word.steps.len(), "plane_c": format_rational(&word.c), "verified": ok });
            Ok(if ok { Outcome::Ok(out) } else { Outcome::VerifyFailed(out) })
        }
        other => job_err(format!("unknown verification kind `{other}`")),
    }
}
