use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use exotic_core::elemdiff::{parse_expr, VectorField};
use exotic_core::forest::{enumerate, Filter, Forest, ForestRecord};
use exotic_core::hopf::{bck_coproduct, cem_coaction, cem_decorated, cem_reduced, deshuffle, deshuffle_aroma_linear, phi_star};
use exotic_core::series::{
    convolve, delta_sigma, delta_sigma_inv, parse_q, q_to_f64, scale_step, Coproduct, ForestSeries, Functional,
    JsonSeries, Q,
};
use exotic_core::stochastic::{
    bea_modified_field, bea_recursion, check_invariant_order, check_weak_order, default_root, eli_normalize,
    exact_flow_character, ibp_normalize, ibp_step, integrate_invariant, modified_equation, modified_recursion,
    modified_vector_field, postprocessor_check, quadrature_terms, simulate, srk_character, IbpNormalForm,
    ModifiedField, OrderReport, SimConfig, SrkTableau,
};
use serde::Serialize;
use serde_json::json;

use crate::{Cli, Command, Format, MethodArgs, Output, TorusArgs};

pub fn execute(cli: &Cli) -> Result<Output> {
    let fmt = cli.format;
    let text = match &cli.command {
        Command::Enumerate { order, filter } => enumerate_cmd(fmt, *order, filter)?,
        Command::Sigma { forest } => {
            let f = parse_forest(forest)?;
            match fmt {
                Format::Json => json_line(&json!({ "forest": f.key(), "sigma": f.sigma() }))?,
                _ => format!("{}\n", f.sigma()),
            }
        }
        Command::Parse { forest } => parse_cmd(fmt, forest)?,
        Command::Coproduct { kind, forest, decorations } => coproduct_cmd(fmt, kind, forest, decorations.as_deref())?,
        Command::Compose { first, second, first_step, second_step, order } => {
            let a = character_for(first, None, *order)?;
            let b = character_for(second, None, *order)?;
            let a = scale_step(&a, &rational(first_step)?);
            let b = scale_step(&b, &rational(second_step)?);
            series_out(fmt, &delta_sigma(&convolve(Coproduct::Bck, &a, &b)?))?
        }
        Command::Substitute { field, method, order } => {
            let b = match field {
                Some(s) => delta_sigma_inv(&read_series(s)?.with_trunc(*order)),
                None => Functional::delta_bullet(*order),
            };
            let a = method_character(method, *order)?;
            series_out(fmt, &delta_sigma(&exotic_core::hopf::substitute(&b, &a)?))?
        }
        Command::ExactFlow { order } => series_out(fmt, &delta_sigma(&exact_flow_character(*order)?))?,
        Command::SrkCharacter { method, order } => series_out(fmt, &delta_sigma(&method_character(method, *order)?))?,
        Command::OrderConditions { kind, order, method, tableau } => {
            order_conditions_cmd(fmt, kind, *order, method.as_deref(), tableau.as_deref())?
        }
        Command::Ibp { forest, series, root, normalize, gradient } => {
            ibp_cmd(fmt, forest.as_deref(), series.as_deref(), *root, *normalize, *gradient)?
        }
        Command::Bea { method, order, recursion } => {
            let a = method_character(method, *order)?;
            let m = if *recursion { bea_recursion(&a, *order)? } else { bea_modified_field(&a, *order)? };
            modified_out(fmt, &m)?
        }
        Command::ModifiedEq { method, order, recursion } => {
            let a = method_character(method, *order)?;
            let m = if *recursion { modified_recursion(&a, *order)? } else { modified_equation(&a, *order)? };
            modified_out(fmt, &m)?
        }
        Command::PostprocessorCheck { method, post, order } => {
            let a = method_character(method, *order)?;
            let abar = character_for(post, None, *order)?;
            return Ok(report_out(fmt, &postprocessor_check(&a, &abar, *order)?));
        }
        Command::Quadrature { forest, series, torus, grid, per_term } => {
            quadrature_cmd(fmt, forest.as_deref(), series.as_deref(), torus, *grid, *per_term)?
        }
        Command::Simulate { method, torus, modified_order, h, steps, burn_in, trajectories, seed, grid } => {
            simulate_cmd(fmt, method, torus, *modified_order, h, *steps, *burn_in, *trajectories, *seed, *grid)?
        }
        Command::Verify { suite } => return crate::verify::run(suite),
    };
    Ok(Output { text, failed: false })
}

fn json_line<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn parse_forest(s: &str) -> Result<Forest> {
    Forest::parse(s).with_context(|| format!("invalid forest '{s}'"))
}

fn rational(s: &str) -> Result<Q> {
    parse_q(s.trim()).ok_or_else(|| anyhow!("invalid rational '{s}'"))
}

/// Inline "c*forest; forest; ..." or "@file.json" holding a serialized series.
pub fn read_series(s: &str) -> Result<ForestSeries> {
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let j: JsonSeries = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        return Ok(ForestSeries::from_json(&j)?);
    }
    let mut out = ForestSeries::zero();
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (c, f) = match term.split_once('*') {
            Some((c, f)) => (rational(c)?, f.trim()),
            None => (Q::from_integer(1.into()), term),
        };
        let f = if f == "{}" { Forest::empty() } else { parse_forest(f)? };
        out.add_term(f, c);
    }
    Ok(out)
}

fn character_for(name: &str, tableau: Option<&Path>, order: usize) -> Result<Functional> {
    if let Some(p) = tableau {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return Ok(srk_character(&SrkTableau::from_json(&text)?, order)?);
    }
    if name == "exact" {
        return Ok(exact_flow_character(order)?);
    }
    if let Some(t) = SrkTableau::named(name) {
        return Ok(srk_character(&t, order)?);
    }
    if Path::new(name).is_file() {
        return character_for(name, Some(Path::new(name)), order);
    }
    bail!("unknown method '{name}' (em, implicit-euler, lm, lm-post, exact or a tableau file)")
}

fn method_character(m: &MethodArgs, order: usize) -> Result<Functional> {
    character_for(&m.method, m.tableau.as_deref(), order)
}

fn tableau_for(m: &MethodArgs) -> Result<SrkTableau> {
    if let Some(p) = &m.tableau {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return Ok(SrkTableau::from_json(&text)?);
    }
    SrkTableau::named(&m.method).ok_or_else(|| anyhow!("unknown method '{}'", m.method))
}

fn series_out(fmt: Format, s: &ForestSeries) -> Result<String> {
    Ok(match fmt {
        Format::Text => format!("{s}\n"),
        Format::Latex => format!("{}\n", s.to_latex()),
        Format::Json => json_line(&s.to_json())?,
    })
}

fn enumerate_cmd(fmt: Format, order: usize, filter: &str) -> Result<String> {
    let filter = Filter::parse(filter).ok_or_else(|| anyhow!("unknown filter '{filter}'"))?;
    let forests = enumerate(order, filter)?;
    Ok(match fmt {
        Format::Json => json_line(&forests.iter().map(ForestRecord::from).collect::<Vec<_>>())?,
        Format::Latex => {
            let parts: Vec<String> = forests.iter().map(|f| format!("\\forest{{{}}}", f.key())).collect();
            format!("{}\n", parts.join(", "))
        }
        Format::Text => {
            let mut out = String::new();
            for f in &forests {
                writeln!(out, "{}\t{}\t{}", f.key(), f.order(), f.sigma())?;
            }
            writeln!(out, "# {} forests", forests.len())?;
            out
        }
    })
}

fn parse_cmd(fmt: Format, s: &str) -> Result<String> {
    let f = parse_forest(s)?;
    let g = f.grading();
    Ok(match fmt {
        Format::Json => json_line(&json!({ "forest": f.key(), "sigma": f.sigma(), "grading": g }))?,
        Format::Latex => format!("\\forest{{{}}}\n", f.key()),
        Format::Text => format!(
            "forest: {}\norder: {}\nroots: {}\nblack: {}\nlianas: {}\nstolons: {}\nedges: {}\nsigma: {}\n",
            f.key(),
            g.order,
            g.num_roots,
            g.num_black,
            g.num_lianas,
            g.num_stolons,
            g.num_edges,
            f.sigma()
        ),
    })
}

fn coproduct_cmd(fmt: Format, kind: &str, forest: &str, decorations: Option<&str>) -> Result<String> {
    if kind == "phi-star" {
        let s = phi_star(&parse_forest(forest)?);
        return Ok(match fmt {
            Format::Text => format!("{s}\n"),
            Format::Latex => format!("{}\n", s.to_latex()),
            Format::Json => json_line(&s.to_json())?,
        });
    }
    let f = parse_forest(forest)?;
    if let Some(d) = decorations {
        if kind != "cem" {
            bail!("--decorations applies to the cem coaction only");
        }
        let targets: Vec<char> = d
            .split(',')
            .map(|t| {
                let mut cs = t.trim().chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(anyhow!("decorations are single letters, got '{t}'")),
                }
            })
            .collect::<Result<_>>()?;
        let s = cem_decorated(&f, &targets);
        return Ok(match fmt {
            Format::Text => format!("{s}\n"),
            Format::Latex => format!("{}\n", s.to_latex()),
            Format::Json => json_line(&s.to_json())?,
        });
    }
    macro_rules! tensor {
        ($s:expr) => {{
            let s = $s;
            match fmt {
                Format::Text => format!("{s}\n"),
                Format::Latex => format!("{}\n", s.to_latex()),
                Format::Json => json_line(&s.to_json())?,
            }
        }};
    }
    Ok(match kind.parse::<Coproduct>()? {
        Coproduct::Bck => tensor!(bck_coproduct(&f)),
        Coproduct::Deshuffle => tensor!(deshuffle(&f)),
        Coproduct::DeshuffleAromaLinear => tensor!(deshuffle_aroma_linear(&f)),
        Coproduct::Cem => tensor!(cem_coaction(&f)),
        Coproduct::CemReduced => tensor!(cem_reduced(&f)),
    })
}

fn report_out(fmt: Format, r: &OrderReport) -> Output {
    let text = match fmt {
        Format::Json => serde_json::to_string_pretty(r).map(|s| s + "\n").unwrap_or_default(),
        _ => {
            let mut out = format!("order {}: {}\n", r.order, if r.holds { "holds" } else { "fails" });
            if r.sufficient_only && !r.holds {
                out.push_str("note: the normal form is only sufficient at this order\n");
            }
            for f in &r.failures {
                let _ = writeln!(out, "  [{}] {}: {} (expected {})", f.order, f.forest, f.value, f.expected);
            }
            out
        }
    };
    Output { text, failed: false }
}

fn order_conditions_cmd(
    fmt: Format,
    kind: &str,
    order: usize,
    method: Option<&str>,
    tableau: Option<&Path>,
) -> Result<String> {
    if method.is_none() && tableau.is_none() {
        if kind != "weak" {
            bail!("listing is available for weak conditions; pass --method to check invariant order");
        }
        return series_out(fmt, &delta_sigma(&exact_flow_character(order)?).filter(|f| f.order() > 0));
    }
    let a = character_for(method.unwrap_or(""), tableau, order)?;
    let r = match kind {
        "weak" => check_weak_order(&a, order)?,
        "invariant" => check_invariant_order(&a, order)?,
        _ => bail!("unknown condition kind '{kind}' (weak or invariant)"),
    };
    Ok(report_out(fmt, &r).text)
}

fn normal_form_out(fmt: Format, nf: &IbpNormalForm) -> Result<String> {
    Ok(match fmt {
        Format::Json => json_line(&json!({ "trees": nf.trees.to_json(), "residual": nf.residual.to_json() }))?,
        Format::Latex => format!("{}\n% residual: {}\n", nf.trees.to_latex(), nf.residual.to_latex()),
        Format::Text => format!("trees: {}\nresidual: {}\n", nf.trees, nf.residual),
    })
}

fn ibp_cmd(
    fmt: Format,
    forest: Option<&str>,
    series: Option<&str>,
    root: Option<usize>,
    normalize: bool,
    gradient: bool,
) -> Result<String> {
    let s = match (forest, series) {
        (Some(f), _) => ForestSeries::single(parse_forest(f)?, Q::from_integer(1.into())),
        (None, Some(s)) => read_series(s)?,
        (None, None) => bail!("pass --forest or --series"),
    };
    if gradient {
        return normal_form_out(fmt, &eli_normalize(&s)?);
    }
    if normalize {
        return normal_form_out(fmt, &ibp_normalize(&s)?);
    }
    let f = match (forest, s.len()) {
        (Some(_), 1) => s.keys().next().cloned().expect("one term"),
        _ => bail!("a single step needs --forest; use --normalize for series"),
    };
    let r = match root {
        Some(r) => r,
        None => default_root(&f).ok_or_else(|| anyhow!("{f} has no root to eliminate"))?,
    };
    series_out(fmt, &ibp_step(&f, r)?)
}

fn modified_out(fmt: Format, m: &ModifiedField) -> Result<String> {
    let b = delta_sigma(&m.b);
    Ok(match fmt {
        Format::Json => json_line(&json!({ "field": b.to_json(), "residual": m.residual.to_json() }))?,
        Format::Latex => format!("{}\n% residual: {}\n", b.to_latex(), m.residual.to_latex()),
        Format::Text => format!("field: {b}\nresidual: {}\n", m.residual),
    })
}

fn field_of(torus: &TorusArgs) -> Result<(VectorField, exotic_core::elemdiff::Expr, exotic_core::elemdiff::Expr)> {
    let v = parse_expr(&torus.potential).context("potential")?;
    let phi = parse_expr(&torus.phi).context("test function")?;
    let f = VectorField::gradient(&v, torus.dim)?;
    Ok((f, v, phi))
}

fn quadrature_cmd(
    fmt: Format,
    forest: Option<&str>,
    series: Option<&str>,
    torus: &TorusArgs,
    grid: usize,
    per_term: bool,
) -> Result<String> {
    let s = match (forest, series) {
        (Some(f), _) => ForestSeries::single(parse_forest(f)?, Q::from_integer(1.into())),
        (None, Some(s)) => read_series(s)?,
        (None, None) => bail!("pass --forest or --series"),
    };
    let (field, _, phi) = field_of(torus)?;
    let terms = quadrature_terms(&s, &field, &phi, grid)?;
    let total: f64 = terms.iter().map(|t| t.1).sum();
    Ok(match fmt {
        Format::Json => json_line(&json!({
            "value": total,
            "terms": terms.iter().map(|(f, v)| json!({ "forest": f.key(), "value": v })).collect::<Vec<_>>(),
        }))?,
        _ => {
            let mut out = format!("{total:.15e}\n");
            if per_term {
                for (f, v) in &terms {
                    writeln!(out, "  {}\t{v:.15e}", f.key())?;
                }
            }
            out
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    fmt: Format,
    method: &MethodArgs,
    torus: &TorusArgs,
    modified_order: Option<usize>,
    h: &str,
    steps: usize,
    burn_in: usize,
    trajectories: usize,
    seed: u64,
    grid: usize,
) -> Result<String> {
    let t = tableau_for(method)?;
    let hq = rational(h)?;
    let (field, v, phi) = field_of(torus)?;
    let used = match modified_order {
        Some(n) => {
            let m = modified_equation(&srk_character(&t, n)?, n)?;
            if !m.residual.is_zero() {
                bail!("modified field has a residual: {}", m.residual);
            }
            modified_vector_field(&m.b, &field, &hq)?
        }
        None => field.clone(),
    };
    let cfg = SimConfig { h: q_to_f64(&hq), steps, burn_in, trajectories, seed, x0: vec![0.0; torus.dim] };
    let r = simulate(&t, &used, &phi, &cfg)?;
    let exact = integrate_invariant(&phi, &v, torus.dim, grid)?;
    Ok(match fmt {
        Format::Json => json_line(&json!({
            "mean": r.mean,
            "std_error": r.std_error,
            "samples": r.samples,
            "exact": exact,
            "error": r.mean - exact,
        }))?,
        _ => format!(
            "mean: {:.6}\nstd_error: {:.6}\nsamples: {}\nexact: {exact:.6}\nerror: {:.6}\n",
            r.mean,
            r.std_error,
            r.samples,
            r.mean - exact
        ),
    })
}
