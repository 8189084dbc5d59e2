use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ncalc::algebra::{self, AlgebraSpec};
use ncalc::calculus::{diff_poly_k_tensor, FiniteDiff};
use ncalc::complexfield::{self, conj, ComplexFn, ComplexVerdict};
use ncalc::demos::{self, constant_variation, cubic_with_correction, two_leg_closed_form};
use ncalc::forms::{self, FormP, Verdict};
use ncalc::integration::{self, Path, PathIntegral};
use ncalc::parse::{parse_element, parse_expr, parse_poly, parse_tensor_poly};
use ncalc::quadrature::QuadStep;
use ncalc::series_ode::{self, SystemKind};
use ncalc::{sampling, Algebra64, Element64};

#[derive(Parser)]
#[command(name = "ncalc", version, about = "Calculus over finite-dimensional associative algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Builtin algebra: real, complex, hyperbolic, quaternion.
    #[arg(short = 'A', long, allow_hyphen_values = true, global = true, default_value = "quaternion")]
    algebra: String,
    /// Algebra spec JSON file; overrides --algebra.
    #[arg(long, allow_hyphen_values = true, global = true)]
    spec: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = demos::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Differentiate a polynomial symbolically and cross-check by finite differences.
    #[command(disable_help_flag = true)]
    Derive {
        #[arg(short = 'p', long, allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        point: String,
        #[arg(short = 'h', long, allow_hyphen_values = true)]
        direction: String,
        /// Order of the derivative.
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, action = clap::ArgAction::Help)]
        help: Option<bool>,
    },
    /// Integrate a 1-form along a piecewise-linear path.
    IntegratePath {
        /// Tensor polynomial such as "1⊗x^2 + x⊗x + x^2⊗1".
        #[arg(long, allow_hyphen_values = true)]
        form: Option<String>,
        /// Path JSON file: {"waypoints": [[...], ...], "closed": false}.
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
        /// Waypoints given inline, separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        waypoints: Option<String>,
        /// Require a closed path.
        #[arg(long = "loop")]
        is_loop: bool,
        #[arg(long, default_value_t = integration::DEFAULT_PANELS)]
        panels: usize,
        /// Two-path comparison for 3⊗x² (path-dependence) or the integrable cube form (integrable).
        #[arg(long, allow_hyphen_values = true, value_parser = ["path-dependence", "integrable"])]
        demo: Option<String>,
        #[arg(short = 'a', long, allow_hyphen_values = true, default_value = "i")]
        via: String,
        #[arg(short = 'x', long, allow_hyphen_values = true, default_value = "j")]
        to: String,
    },
    /// Power-series solutions: exp, sinh, cosh, sin, cos.
    Series {
        kind: String,
        #[arg(short = 'N', long, default_value_t = series_ode::DEFAULT_ORDER)]
        order: usize,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Differential forms: integrability check, d² residual, Poincaré operator.
    Forms {
        #[arg(value_parser = ["check", "d2", "poincare"])]
        action: String,
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, default_value_t = forms::DEFAULT_PROBES)]
        probes: usize,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Arguments for the Poincaré image of a p-form, p ≥ 2, separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        args: Option<String>,
    },
    /// Complex field: classification, derivative split and antiderivatives of a∘E + b∘I.
    Complex {
        #[arg(value_parser = ["classify", "decompose", "integrate"])]
        action: String,
        /// Function of x (or of the coordinates x0, x1) for classify and decompose.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 20)]
        probes: usize,
    },
    /// Run a named numerical check, or all of them.
    Demo {
        #[arg(default_value = "all")]
        name: String,
    },
}

struct Ctx {
    alg: Algebra64,
    format: Format,
    seed: u64,
}

fn load_algebra(g: &Global) -> Result<Algebra64> {
    Ok(match &g.spec {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading algebra spec {path}"))?;
            AlgebraSpec::from_json(&text)?
        }
        None => algebra::builtin(&g.algebra)?,
    })
}

fn el_json(e: &Element64) -> Value {
    json!({ "coords": e.coords(), "display": e.to_string() })
}

fn history_json(h: &[QuadStep]) -> Value {
    serde_json::to_value(h).expect("serializable")
}

fn emit(ctx: &Ctx, text: String, value: Value) {
    let out = match ctx.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn element_list(src: &str, alg: &Algebra64) -> Result<Vec<Element64>> {
    src.split(';').map(|s| Ok(parse_element(s.trim(), alg)?)).collect()
}

fn derive(ctx: &Ctx, poly: &str, point: &str, direction: &str, order: usize) -> Result<()> {
    let alg = &ctx.alg;
    let p = parse_poly(poly, alg)?;
    let x = parse_element(point, alg)?;
    let h = parse_element(direction, alg)?;
    if order == 0 {
        bail!(ncalc::Error::InvalidArgument("order must be at least 1".into()));
    }
    let tensor = diff_poly_k_tensor(&p, order);
    let value = tensor.apply_at(&x, &vec![h.clone(); order])?;
    let lower = diff_poly_k_tensor(&p, order - 1);
    let hs = vec![h.clone(); order - 1];
    let numeric = FiniteDiff::default().gateaux(
        |y| if order == 1 { p.eval(y).expect("same algebra") } else { lower.apply_at(y, &hs).expect("arity") },
        &x,
        &h,
    )?;
    let residual = value.dist(&numeric) / value.coord_norm().max(1.0);
    let text = format!(
        "polynomial: {p}\nd^{order}p/dx^{order} = {tensor}\nvalue at x = {x}, h = {h}: {value}\nfinite difference: {numeric}\nresidual: {residual:.3e}\n"
    );
    let v = json!({
        "polynomial": p.to_string(),
        "order": order,
        "tensor": tensor.to_string(),
        "point": el_json(&x),
        "direction": el_json(&h),
        "value": el_json(&value),
        "finite_difference": el_json(&numeric),
        "residual": residual,
    });
    emit(ctx, text, v);
    Ok(())
}

fn integral_json(r: &PathIntegral<f64>) -> Value {
    json!({ "value": el_json(&r.value), "panels": r.panels, "history": history_json(&r.history) })
}

fn integral_text(label: &str, r: &PathIntegral<f64>) -> String {
    let hist: Vec<String> = r.history.iter().map(|s| format!("{}:{:.2e}", s.panels, s.change)).collect();
    format!("{label}: {}\n  panels {}, history [{}]\n", r.value, r.panels, hist.join(", "))
}

#[allow(clippy::too_many_arguments)]
fn integrate_path(
    ctx: &Ctx,
    form: Option<&str>,
    path: Option<&str>,
    waypoints: Option<&str>,
    is_loop: bool,
    panels: usize,
    demo: Option<&str>,
    via: &str,
    to: &str,
) -> Result<()> {
    let alg = &ctx.alg;
    if let Some(demo) = demo {
        let src = match demo {
            "path-dependence" => "3⊗x^2",
            _ => "1⊗x^2 + x⊗x + x^2⊗1",
        };
        let g = FormP::from_tensor_poly(parse_tensor_poly(form.unwrap_or(src), alg)?);
        let a = parse_element(via, alg)?;
        let x = parse_element(to, alg)?;
        let o = Element64::zero(alg);
        let straight = integration::integrate_along_path(&g, &Path::linear(&o, &x)?, panels)?;
        let bent = integration::integrate_along_path(&g, &Path::polyline(vec![o, a.clone(), x.clone()])?, panels)?;
        let gap = &bent.value - &straight.value;
        let x3 = x.pow(3);
        let (closed_gap, label) = if demo == "path-dependence" {
            (&two_leg_closed_form(&a, &x) - &x3, "½x²a + ½xax − ax² + xa² − ½axa − ½a²x")
        } else {
            (Element64::zero(alg), "0")
        };
        let gap_residual = gap.dist(&closed_gap);
        let text = format!(
            "{}{}gap: {gap}\nclosed-form gap ({label}): {closed_gap}\ngap residual: {gap_residual:.3e}\nstraight value − x³: {:.3e}\n",
            integral_text("linear 0→x", &straight),
            integral_text("two-leg 0→a→x", &bent),
            straight.value.dist(&x3),
        );
        let v = json!({
            "demo": demo,
            "a": el_json(&a),
            "x": el_json(&x),
            "linear": integral_json(&straight),
            "two_leg": integral_json(&bent),
            "gap": el_json(&gap),
            "closed_form_gap": el_json(&closed_gap),
            "gap_residual": gap_residual,
        });
        emit(ctx, text, v);
        return Ok(());
    }
    let form = form.ok_or_else(|| ncalc::Error::InvalidArgument("--form is required".into()))?;
    let g = FormP::from_tensor_poly(parse_tensor_poly(form, alg)?);
    let path = match (path, waypoints) {
        (Some(file), None) => {
            let text = fs::read_to_string(file).with_context(|| format!("reading path {file}"))?;
            Path::from_json(alg, &text)?
        }
        (None, Some(w)) => Path::polyline(element_list(w, alg)?)?,
        _ => bail!(ncalc::Error::InvalidArgument("give exactly one of --path or --waypoints".into())),
    };
    if is_loop && !path.is_closed() {
        bail!(ncalc::Error::NotClosed);
    }
    let r = integration::integrate_along_path(&g, &path, panels)?;
    emit(ctx, integral_text("integral", &r), json!({ "form": form, "closed": path.is_closed(), "integral": integral_json(&r) }));
    Ok(())
}

fn series(ctx: &Ctx, kind: &str, order: usize, point: Option<&str>) -> Result<()> {
    let (system, component) = match kind {
        "exp" => (SystemKind::Exp, 0),
        "sinh" => (SystemKind::Hyperbolic, 0),
        "cosh" => (SystemKind::Hyperbolic, 1),
        "sin" => (SystemKind::Elliptic, 0),
        "cos" => (SystemKind::Elliptic, 1),
        other => bail!(ncalc::Error::InvalidArgument(format!("unknown series '{other}'; expected exp, sinh, cosh, sin or cos"))),
    };
    let sol = series_ode::solve_symmetric_system::<f64>(system, order)?;
    let s = &sol.components[component];
    let mut text = format!("{kind} coefficients (N = {order}): {s}\n");
    let mut v = json!({ "kind": kind, "order": order, "coefficients": s.coeffs });
    if let Some(p) = point {
        let x = parse_element(p, &ctx.alg)?;
        let value = series_ode::eval_series(s, &x)?;
        text += &format!("{kind}({x}) = {value}\n");
        v["point"] = el_json(&x);
        v["value"] = el_json(&value);
    }
    emit(ctx, text, v);
    Ok(())
}

fn verdict_json(v: &Verdict<f64>) -> Value {
    match v {
        Verdict::Certified { max_residual, probes } => json!({ "certified": true, "max_residual": max_residual, "probes": probes }),
        Verdict::Refuted { witness } => json!({
            "certified": false,
            "witness": {
                "x": el_json(&witness.x),
                "a1": el_json(&witness.a1),
                "a2": el_json(&witness.a2),
                "value": el_json(&witness.value),
                "residual": witness.residual,
            }
        }),
    }
}

fn forms_cmd(ctx: &Ctx, action: &str, form: &str, probes: usize, point: Option<&str>, args: Option<&str>) -> Result<()> {
    let alg = &ctx.alg;
    let mut tp = parse_tensor_poly(form, alg)?;
    if tp.degree() >= 2 {
        tp = tp.alternate()?;
    }
    let w = FormP::from_tensor_poly(tp);
    match action {
        "check" => {
            let v = forms::check_integrable(&w, probes, ctx.seed)?;
            let text = match &v {
                Verdict::Certified { max_residual, probes } => format!("certified: max |dω| = {max_residual:.3e} over {probes} probes\n"),
                Verdict::Refuted { witness } => format!(
                    "refuted: dω(x)∘(a1, a2) = {} (relative {:.3e})\n  x = {}\n  a1 = {}\n  a2 = {}\n",
                    witness.value, witness.residual, witness.x, witness.a1, witness.a2
                ),
            };
            emit(ctx, text, json!({ "form": form, "verdict": verdict_json(&v) }));
        }
        "d2" => {
            let r = forms::d_squared_residual(&w, probes, ctx.seed)?;
            emit(ctx, format!("max |d²ω| / Π|a| = {r:.3e} over {probes} probes\n"), json!({ "form": form, "d2_residual": r, "probes": probes }));
        }
        _ => {
            let x = parse_element(point.ok_or_else(|| ncalc::Error::InvalidArgument("poincare needs -x".into()))?, alg)?;
            let k = forms::poincare_k(&w)?;
            let rest = match args {
                Some(a) => element_list(a, alg)?,
                None => vec![],
            };
            let value = k.eval(&x, &rest)?;
            emit(
                ctx,
                format!("k(ω)({x}) ∘ ({} args) = {value}\n", rest.len()),
                json!({ "form": form, "degree": w.degree(), "point": el_json(&x), "value": el_json(&value) }),
            );
        }
    }
    Ok(())
}

fn complex_fn(src: &str, alg: &Algebra64) -> Result<ComplexFn<f64>> {
    let e = parse_expr(src, alg)?;
    let a = alg.clone();
    e.eval(alg, &Element64::zero(alg))?;
    Ok(std::sync::Arc::new(move |x| e.eval(&a, x).unwrap_or_else(|_| Element64::new(&a, vec![f64::NAN; 2]))))
}

fn complex_cmd(ctx: &Ctx, action: &str, f: Option<&str>, a: Option<&str>, b: Option<&str>, point: Option<&str>, probes: usize) -> Result<()> {
    let alg = &ctx.alg;
    let need = |o: Option<&str>, name: &str| o.map(str::to_string).ok_or_else(|| anyhow!(ncalc::Error::InvalidArgument(format!("--{name} is required"))));
    match action {
        "classify" => {
            let f = complex_fn(&need(f, "f")?, alg)?;
            let c = complexfield::classify(alg, |x| f(x), probes, ctx.seed)?;
            emit(ctx, format!("{c}\n"), json!({ "classification": c }));
        }
        "decompose" => {
            let f = complex_fn(&need(f, "f")?, alg)?;
            let z = parse_element(&need(point, "point")?, alg)?;
            let d = complexfield::decompose_derivative(|x| f(x), &z, FiniteDiff::default())?;
            emit(ctx, format!("df({z}) = {d}\n"), json!({ "point": el_json(&z), "a": el_json(&d.a), "b": el_json(&d.b) }));
        }
        _ => {
            let (af, bf) = (complex_fn(&need(a, "a")?, alg)?, complex_fn(&need(b, "b")?, alg)?);
            let verdict = complexfield::form_integrable_complex(&af, &bf, alg, probes, ctx.seed)?;
            if let ComplexVerdict::Refuted { z, residual } = &verdict {
                let text = format!("not integrable: residual {residual} at z = {z}\n");
                emit(ctx, text, json!({ "certified": false, "z": el_json(z), "residual": el_json(residual) }));
                bail!(ncalc::Error::NotCertified);
            }
            let f = complexfield::integrate_complex_form(alg, &af, &bf, probes, ctx.seed)?;
            let mut rng = sampling::rng(ctx.seed);
            let zs: Vec<Element64> = (0..probes.max(2)).map(|_| sampling::random_element(&mut rng, alg, 1.0)).collect();
            let eighth = constant_variation(|z| f.eval_function(z), |z| cubic_with_correction(z, 0.125), &zs)?;
            let quarter = constant_variation(|z| f.eval_function(z), |z| cubic_with_correction(z, 0.25), &zs)?;
            let mut text = format!(
                "certified; antiderivative f with f(0) = 0 via the Poincaré operator\n\
                 variation of f − (z³ − ⅛(z − z̄)³) over {n} probes: {eighth:.3e}\n\
                 variation of f − (z³ − ¼(z − z̄)³) over {n} probes: {quarter:.3e}\n",
                n = zs.len()
            );
            let mut v = json!({ "certified": true, "probes": zs.len(), "variation_eighth": eighth, "variation_quarter": quarter });
            if let Some(p) = point {
                let z = parse_element(p, alg)?;
                let value = f.eval_function(&z)?;
                text += &format!("f({z}) = {value}\nz³ − ¼(z − z̄)³ = {}\n", cubic_with_correction(&z, 0.25));
                v["point"] = el_json(&z);
                v["value"] = el_json(&value);
                v["conj"] = el_json(&conj(&z));
            }
            emit(ctx, text, v);
        }
    }
    Ok(())
}

fn demo(ctx: &Ctx, name: &str) -> Result<()> {
    let reports = if name == "all" { demos::run_all(ctx.seed)? } else { vec![demos::run(name, ctx.seed)?] };
    let text: String = reports.iter().map(|r| r.to_string()).collect();
    let v = serde_json::to_value(
        reports.iter().map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed(), "checks": r.checks })).collect::<Vec<_>>(),
    )?;
    emit(ctx, text, v);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx { alg: load_algebra(&cli.global)?, format: cli.global.format, seed: cli.global.seed };
    match cli.cmd {
        Command::Derive { poly, point, direction, order, .. } => derive(&ctx, &poly, &point, &direction, order),
        Command::IntegratePath { form, path, waypoints, is_loop, panels, demo, via, to } => integrate_path(
            &ctx,
            form.as_deref(),
            path.as_deref(),
            waypoints.as_deref(),
            is_loop,
            panels,
            demo.as_deref(),
            &via,
            &to,
        ),
        Command::Series { kind, order, point } => series(&ctx, &kind, order, point.as_deref()),
        Command::Forms { action, form, probes, point, args } => forms_cmd(&ctx, &action, &form, probes, point.as_deref(), args.as_deref()),
        Command::Complex { action, f, a, b, point, probes } => {
            complex_cmd(&ctx, &action, f.as_deref(), a.as_deref(), b.as_deref(), point.as_deref(), probes)
        }
        Command::Demo { name } => demo(&ctx, &name),
    }
}

/// 2 for malformed input, 3 for mathematical failures.
fn exit_code(e: &anyhow::Error) -> u8 {
    use ncalc::Error as E;
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::Parse(_)
                | E::MalformedSpec(_)
                | E::InvalidArgument(_)
                | E::UnknownBasisMap(_)
                | E::ArityMismatch { .. }
                | E::NotClosed
                | E::BadUnit(_)
                | E::AlgebraMismatch => 2,
                _ => 3,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
