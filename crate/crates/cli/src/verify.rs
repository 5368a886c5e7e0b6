use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use clap::Parser;
use exotic_core::elemdiff::{
    eval_series_graded, eval_series_substituted, parse_expr, substituted_field, Expr, VectorField,
};
use exotic_core::forest::{enumerate, Deco, Filter, Forest};
use exotic_core::hopf::{bck_coproduct, cem_coaction, compose, gl_product, substitute, substitute_action};
use exotic_core::series::{
    character_extend, convolve, delta_sigma, q, qi, Coproduct, ForestSeries, Functional, Q,
};
use exotic_core::stochastic::{
    bea_modified_field, bea_recursion, check_invariant_order, exact_flow_character, ibp_step, modified_equation,
    modified_recursion, needs_ibp, postprocessor_check, quadrature_terms, srk_character, SrkTableau,
};

use crate::{Cli, Output};

type Check = (&'static str, fn() -> Result<(), String>);

pub fn run(suite: &str) -> Result<Output> {
    let checks: &[Check] = match suite {
        "hopf" => HOPF,
        "ibp" => IBP,
        "laws" => LAWS,
        "paper-tables" => return paper_tables(),
        _ => bail!("unknown suite '{suite}' (hopf, ibp, laws or paper-tables)"),
    };
    let mut text = String::new();
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => writeln!(text, "ok   {name}")?,
            Err(e) => {
                failed += 1;
                writeln!(text, "FAIL {name}: {e}")?;
            }
        }
    }
    writeln!(text, "{suite}: {} passed, {failed} failed", checks.len() - failed)?;
    Ok(Output { text, failed: failed > 0 })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all(n: usize) -> Vec<Forest> {
    enumerate(n, Filter::All).expect("enumeration within bounds")
}

fn sig(f: &Forest) -> Q {
    qi(f.sigma() as i64)
}

fn f(s: &str) -> Forest {
    Forest::parse(s).expect("valid forest literal")
}

/// Reproducible pseudo-random rationals in [−5, 5] with denominators 1..=4.
fn pseudo_rational(i: usize, salt: usize) -> Q {
    let x = (i * 7919 + salt * 104_729 + 13) % 97;
    q(x as i64 % 11 - 5, (x % 4) as i64 + 1)
}

fn pseudo_character(n: usize, salt: usize) -> Functional {
    let gens: BTreeMap<Forest, Q> = enumerate(n, Filter::Connected)
        .expect("enumeration within bounds")
        .into_iter()
        .filter(|g| !g.is_empty())
        .enumerate()
        .map(|(i, g)| (g, pseudo_rational(i, salt)))
        .collect();
    character_extend(&gens, n).expect("generators are connected")
}

const HOPF: &[Check] = &[
    ("bck coproduct dual to the Grossman-Larson product", || {
        for mu in all(3) {
            for ((p1, p2), c) in bck_coproduct(&mu).iter() {
                let lhs = gl_product(p1, p2).coeff(&mu) * sig(&mu);
                ensure(lhs == c * sig(p1) * sig(p2), || format!("{p1} ◇ {p2} vs {mu}"))?;
            }
        }
        Ok(())
    }),
    ("cem coaction dual to substitution", || {
        for mu in all(3) {
            for ((p, pi), c) in cem_coaction(&mu).iter() {
                let lhs = substitute_action(p, pi).coeff(&mu) * sig(&mu);
                ensure(lhs == c * qi(p.sigma() as i64) * sig(pi), || format!("{p} ▷ {pi} vs {mu}"))?;
            }
        }
        Ok(())
    }),
    ("bck coproduct coassociative", || {
        for mu in all(3) {
            let mut l: BTreeMap<(Forest, Forest, Forest), Q> = BTreeMap::new();
            let mut r = l.clone();
            for ((x, y), c) in bck_coproduct(&mu).iter() {
                for ((x1, x2), d) in bck_coproduct(x).iter() {
                    *l.entry((x1.clone(), x2.clone(), y.clone())).or_default() += c * d;
                }
                for ((y1, y2), d) in bck_coproduct(y).iter() {
                    *r.entry((x.clone(), y1.clone(), y2.clone())).or_default() += c * d;
                }
            }
            l.retain(|_, v| *v != Q::default());
            r.retain(|_, v| *v != Q::default());
            ensure(l == r, || format!("{mu}"))?;
        }
        Ok(())
    }),
    ("composition of characters is a character", || {
        let a = pseudo_character(3, 1);
        let c = convolve(Coproduct::Bck, &a, &pseudo_character(3, 2)).map_err(|e| e.to_string())?;
        ensure(c.is_character_up_to(3), || "product is not multiplicative".into())
    }),
    ("unit of the composition law", || {
        let a = pseudo_character(3, 3);
        let u = Functional::unit(3);
        let l = convolve(Coproduct::Bck, &u, &a).map_err(|e| e.to_string())?;
        let r = convolve(Coproduct::Bck, &a, &u).map_err(|e| e.to_string())?;
        for x in all(3) {
            ensure(l.eval(&x) == a.eval(&x) && r.eval(&x) == a.eval(&x), || format!("{x}"))?;
        }
        Ok(())
    }),
];

fn torus_pairs() -> Vec<(VectorField, Expr)> {
    [
        ("sin(x) + 1/4*cos(2*x)", "sin(x) + cos(2*x)"),
        ("cos(x) - 1/3*sin(2*x)", "cos(x) + 1/2*sin(3*x)"),
    ]
    .iter()
    .map(|(v, p)| {
        let v = parse_expr(v).expect("valid potential");
        (VectorField::gradient(&v, 1).expect("gradient"), parse_expr(p).expect("valid test function"))
    })
    .collect()
}

fn series(terms: &[(&str, Q)]) -> ForestSeries {
    ForestSeries::from_terms(terms.iter().map(|(s, c)| (f(s), c.clone())))
}

const IBP: &[Check] = &[
    ("liana root relations", || {
        let cases = [
            ("1,1", vec![("b", qi(-2))]),
            ("b[1],1", vec![("b[1,1]", qi(-1)), ("b[b]", qi(-2))]),
            ("b[1,b],1", vec![("b[1,1,b]", qi(-1)), ("b[1,b[1]]", qi(-1)), ("b[b,b]", qi(-2))]),
            ("b[1,2],1,2", vec![("b[1,2,2],1", qi(-1)), ("b[1,b],1", qi(-2))]),
        ];
        for (pi, expect) in cases {
            let pi = f(pi);
            let g = pi.graph();
            for r in g.roots().into_iter().filter(|&r| g.deco[r].is_liana()) {
                let got = ibp_step(&pi, r).map_err(|e| e.to_string())?;
                ensure(got == series(&expect), || format!("{pi} at {r}: {got}"))?;
            }
        }
        Ok(())
    }),
    ("steps preserve invariant integrals through order 3", || {
        let pairs = torus_pairs();
        for pi in all(3).into_iter().filter(needs_ibp) {
            for r in pi.graph().roots() {
                let mut s = ibp_step(&pi, r).map_err(|e| e.to_string())?;
                s.add_term(pi.clone(), -qi(1));
                for (field, phi) in &pairs {
                    let terms = quadrature_terms(&s, field, phi, 1024).map_err(|e| e.to_string())?;
                    let total: f64 = terms.iter().map(|t| t.1).sum();
                    let scale: f64 = terms.iter().map(|t| t.1.abs()).sum::<f64>().max(1e-300);
                    ensure(total.abs() / scale < 1e-9, || format!("{pi} at {r}: {:e}", total.abs() / scale))?;
                }
            }
        }
        Ok(())
    }),
    ("exact flow preserves the invariant measure through order 4", || {
        let e = exact_flow_character(4).map_err(|e| e.to_string())?;
        let r = check_invariant_order(&e, 4).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{} conditions fail", r.failures.len()))
    }),
    ("Euler-Maruyama has invariant order 1", || {
        let em = srk_character(&SrkTableau::euler_maruyama(), 2).map_err(|e| e.to_string())?;
        let ok = |p| check_invariant_order(&em, p).map(|r| r.holds).map_err(|e| e.to_string());
        ensure(ok(1)? && !ok(2)?, || "wrong invariant order".into())
    }),
    ("Leimkuhler-Matthews postprocessor condition holds at order 2 only", || {
        let lm = srk_character(&SrkTableau::leimkuhler_matthews(), 3).map_err(|e| e.to_string())?;
        let post = srk_character(&SrkTableau::leimkuhler_matthews_postprocessor(), 3).map_err(|e| e.to_string())?;
        let ok = |p| postprocessor_check(&lm, &post, p).map(|r| r.holds).map_err(|e| e.to_string());
        ensure(ok(2)? && !ok(3)?, || "wrong postprocessed order".into())
    }),
];

fn setup() -> (VectorField, Expr) {
    let v = parse_expr("sin(x1) + 1/4*cos(2*x2)").expect("valid potential");
    let phi = parse_expr("cos(x1)*sin(x2) + 1/2*sin(x1 - 2*x2)").expect("valid test function");
    (VectorField::gradient(&v, 2).expect("gradient"), phi)
}

const N: usize = 3;

const LAWS: &[Check] = &[
    ("composition law against nested differential operators", || {
        let (field, phi) = setup();
        let (a, b) = (pseudo_character(N, 5), pseudo_character(N, 6));
        let graded = |x: &Functional, psi: &[Expr]| eval_series_graded(&delta_sigma(x), &field, psi, N);
        let inner = graded(&b, std::slice::from_ref(&phi)).map_err(|e| e.to_string())?;
        let lhs = graded(&a, &inner).map_err(|e| e.to_string())?;
        let ab = compose(&a, &b).map_err(|e| e.to_string())?;
        let rhs = graded(&ab, std::slice::from_ref(&phi)).map_err(|e| e.to_string())?;
        for n in 0..=N {
            ensure(lhs[n].sub(&rhs[n]).is_zero(), || format!("order {n}"))?;
        }
        Ok(())
    }),
    ("substitution law against a modified vector field", || {
        let (field, phi) = setup();
        let mut b0 = Functional::linear(N);
        b0.set(Forest::bullet(), qi(1));
        for (i, t) in enumerate(N, Filter::Eat).expect("enumeration within bounds").into_iter().enumerate() {
            let g = t.graph();
            if t.order() >= 2 && g.deco[g.roots()[0]] == Deco::Black {
                b0.set(t, pseudo_rational(i, 7));
            }
        }
        let a = pseudo_character(N, 8);
        let pieces = substituted_field(&delta_sigma(&b0), &field, N).map_err(|e| e.to_string())?;
        let lhs = eval_series_substituted(&delta_sigma(&a), &pieces, &phi, N).map_err(|e| e.to_string())?;
        let ba = substitute(&b0, &a).map_err(|e| e.to_string())?;
        let rhs = eval_series_graded(&delta_sigma(&ba), &field, std::slice::from_ref(&phi), N)
            .map_err(|e| e.to_string())?;
        for n in 0..=N {
            ensure(lhs[n].sub(&rhs[n]).is_zero(), || format!("order {n}"))?;
        }
        Ok(())
    }),
    ("closed modified fields match their recursions", || {
        for t in [SrkTableau::euler_maruyama(), SrkTableau::leimkuhler_matthews()] {
            let a = srk_character(&t, 3).map_err(|e| e.to_string())?;
            let closed = bea_modified_field(&a, 3).map_err(|e| e.to_string())?;
            let rec = bea_recursion(&a, 3).map_err(|e| e.to_string())?;
            ensure(closed == rec, || "invariant-measure field".into())?;
            let closed = modified_equation(&a, 3).map_err(|e| e.to_string())?;
            let rec = modified_recursion(&a, 3).map_err(|e| e.to_string())?;
            ensure(closed == rec, || "modified equation".into())?;
        }
        Ok(())
    }),
];

/// Golden outputs: the first line is `# ` followed by a JSON array of CLI
/// arguments, the rest is the expected standard output.
pub const GOLDEN: &[(&str, &str)] = &[
    ("enumerate-eat-2", include_str!("../golden/enumerate-eat-2.txt")),
    ("enumerate-plain-trees-4", include_str!("../golden/enumerate-plain-trees-4.txt")),
    ("parse-aroma", include_str!("../golden/parse-aroma.txt")),
    ("parse-liana", include_str!("../golden/parse-liana.txt")),
    ("exact-flow-2", include_str!("../golden/exact-flow-2.txt")),
    ("bck-aroma", include_str!("../golden/bck-aroma.txt")),
    ("bck-liana", include_str!("../golden/bck-liana.txt")),
    ("cem-aroma", include_str!("../golden/cem-aroma.txt")),
    ("cem-liana", include_str!("../golden/cem-liana.txt")),
    ("cem-decorated-b", include_str!("../golden/cem-decorated-b.txt")),
    ("cem-decorated-bw", include_str!("../golden/cem-decorated-bw.txt")),
    ("cem-decorated-bbw", include_str!("../golden/cem-decorated-bbw.txt")),
    ("phi-star", include_str!("../golden/phi-star.txt")),
    ("srk-character-em-2", include_str!("../golden/srk-character-em-2.txt")),
    ("ibp-liana-1", include_str!("../golden/ibp-liana-1.txt")),
    ("ibp-liana-2", include_str!("../golden/ibp-liana-2.txt")),
    ("ibp-liana-3", include_str!("../golden/ibp-liana-3.txt")),
    ("ibp-liana-4", include_str!("../golden/ibp-liana-4.txt")),
    ("ibp-black-root", include_str!("../golden/ibp-black-root.txt")),
    ("bea-em-3", include_str!("../golden/bea-em-3.txt")),
    ("bea-em-3-json", include_str!("../golden/bea-em-3-json.txt")),
    ("modified-eq-em-3", include_str!("../golden/modified-eq-em-3.txt")),
    ("invariant-order-lm", include_str!("../golden/invariant-order-lm.txt")),
    ("postprocessor-lm", include_str!("../golden/postprocessor-lm.txt")),
    ("compose-half-steps", include_str!("../golden/compose-half-steps.txt")),
];

/// Goldens that record computed values where the printed tables differ.
const KNOWN_DEVIATIONS: &[(&str, &str)] = &[
    ("cem-aroma", "computed coaction has the extra term b . (b),b ⊗ b[1,b[1]] required by duality"),
    ("bea-em-3", "computed b[1,1,2,2] coefficient is 1/48 (printed 1/12); confirmed by quadrature"),
];

pub fn golden_args(body: &str) -> Result<(Vec<String>, &str)> {
    let (head, expected) = body.split_once('\n').unwrap_or((body, ""));
    let Some(json) = head.strip_prefix("# ") else { bail!("golden file lacks an argument header") };
    Ok((serde_json::from_str(json)?, expected))
}

pub fn run_args(args: &[String]) -> Result<Output> {
    let cli = Cli::try_parse_from(std::iter::once("exotic".to_string()).chain(args.iter().cloned()))?;
    crate::commands::execute(&cli)
}

fn paper_tables() -> Result<Output> {
    let mut text = String::new();
    let mut failed = 0;
    for (name, body) in GOLDEN {
        let (args, expected) = golden_args(body)?;
        let got = run_args(&args)?.text;
        if got == expected {
            writeln!(text, "ok   {name}")?;
        } else {
            failed += 1;
            writeln!(text, "FAIL {name}")?;
            for (e, g) in expected.lines().zip(got.lines()).filter(|(e, g)| e != g) {
                writeln!(text, "  expected: {e}\n  got:      {g}")?;
            }
            if expected.lines().count() != got.lines().count() {
                writeln!(text, "  line counts differ")?;
            }
        }
    }
    for (name, note) in KNOWN_DEVIATIONS {
        writeln!(text, "note {name}: {note}")?;
    }
    writeln!(text, "paper-tables: {} passed, {failed} failed", GOLDEN.len() - failed)?;
    Ok(Output { text, failed: failed > 0 })
}
