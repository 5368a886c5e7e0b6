use std::collections::BTreeMap;

use exotic_core::forest::{enumerate, Deco, Filter, Forest, Graph};
use exotic_core::hopf::deshuffle;
use exotic_core::series::{
    character_extend, convolve, delta_sigma, exp_conv, log_conv, qi, Coproduct, ForestSeries, Functional, Q,
};
use exotic_core::stochastic::{srk_character, SrkTableau};
use proptest::prelude::*;

fn all(n: usize) -> Vec<Forest> {
    enumerate(n, Filter::All).unwrap()
}

fn connected(n: usize) -> Vec<Forest> {
    enumerate(n, Filter::Connected).unwrap().into_iter().filter(|f| !f.is_empty()).collect()
}

/// Automorphism count by backtracking over vertex images.
fn brute_sigma(g: &Graph) -> u64 {
    let n = g.len();
    let part = g.partners();
    let same = |a: Deco, b: Deco| match (a, b) {
        (Deco::Liana(_), Deco::Liana(_)) => true,
        _ => a == b,
    };
    let links = |v: usize| [g.succ[v], g.stolon[v], part[v]];
    fn extend(
        v: usize,
        p: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize, &[Option<usize>]) -> bool,
    ) -> u64 {
        if v == p.len() {
            return 1;
        }
        let mut count = 0;
        for w in 0..p.len() {
            if used[w] || !ok(v, w, p) {
                continue;
            }
            p[v] = Some(w);
            used[w] = true;
            count += extend(v + 1, p, used, ok);
            used[w] = false;
            p[v] = None;
        }
        count
    }
    // v ↦ w is consistent when every link between v and an already mapped
    // vertex u (in either direction) is matched by the same link between w and p(u).
    let ok = |v: usize, w: usize, p: &[Option<usize>]| {
        if !same(g.deco[v], g.deco[w]) {
            return false;
        }
        let (lv, lw) = (links(v), links(w));
        for k in 0..3 {
            if lv[k].is_some() != lw[k].is_some() {
                return false;
            }
        }
        (0..=v).all(|u| {
            let pu = if u == v { w } else { p[u].unwrap() };
            let (lu, lpu) = (links(u), links(pu));
            (0..3).all(|k| (lv[k] == Some(u)) == (lw[k] == Some(pu)) && (lu[k] == Some(v)) == (lpu[k] == Some(w)))
        })
    };
    extend(0, &mut vec![None; n], &mut vec![false; n], &ok)
}

/// Same forest with vertices listed in the order `perm` and liana labels shifted.
fn relabel(g: &Graph, perm: &[usize], shift: u32) -> Graph {
    let n = g.len();
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut h = Graph::new();
    for &old in perm {
        let deco = match g.deco[old] {
            Deco::Liana(l) => Deco::Liana(l + shift),
            d => d,
        };
        h.add(deco, g.succ[old].map(|s| inv[s]));
    }
    for (old, s) in g.stolon.iter().enumerate() {
        if let Some(s) = s {
            h.stolon[inv[old]] = Some(inv[*s]);
        }
    }
    h
}

fn rand_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn rand_linear(trunc: usize) -> impl Strategy<Value = Functional> {
    let support = all(trunc);
    prop::collection::vec(rand_q(), support.len()).prop_map(move |vals| {
        let mut a = Functional::linear(trunc);
        for (f, v) in support.iter().zip(vals) {
            a.set(f.clone(), v);
        }
        a
    })
}

fn rand_character(trunc: usize) -> impl Strategy<Value = Functional> {
    let gens = connected(trunc);
    prop::collection::vec(rand_q(), gens.len()).prop_map(move |vals| {
        let m: BTreeMap<Forest, Q> = gens.iter().cloned().zip(vals).collect();
        character_extend(&m, trunc).unwrap()
    })
}

/// Infinitesimal character: supported on connected forests.
fn rand_infinitesimal(trunc: usize) -> impl Strategy<Value = Functional> {
    let gens = connected(trunc);
    prop::collection::vec(rand_q(), gens.len()).prop_map(move |vals| {
        let mut a = Functional::linear(trunc);
        for (f, v) in gens.iter().zip(vals) {
            a.set(f.clone(), v);
        }
        a
    })
}

fn concat(a: &ForestSeries, b: &ForestSeries, trunc: usize) -> ForestSeries {
    let mut out = ForestSeries::new(trunc);
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            if x.order() + y.order() <= trunc {
                out.add_term(x.mul(y), cx * cy);
            }
        }
    }
    out
}

fn assert_character(a: &Functional, trunc: usize) {
    let forests = all(trunc);
    for x in &forests {
        for y in &forests {
            if x.order() + y.order() <= trunc {
                assert_eq!(a.eval(&x.mul(y)), a.eval(x) * a.eval(y), "{x} · {y}");
            }
        }
    }
}

#[test]
fn render_parse_round_trip_exhaustive() {
    for f in all(4) {
        assert_eq!(Forest::parse(&f.to_string()).unwrap(), f);
    }
}

#[test]
fn sigma_matches_brute_force() {
    for f in all(3) {
        assert_eq!(f.sigma(), brute_sigma(f.graph()), "{f}");
    }
}

#[test]
fn sigma_of_square() {
    for f in connected(3) {
        assert_eq!(f.mul(&f).sigma(), 2 * f.sigma() * f.sigma(), "{f}");
        assert_eq!(brute_sigma(f.mul(&f).graph()), 2 * f.sigma() * f.sigma(), "{f}");
    }
}

#[test]
fn enumeration_is_stable() {
    assert_eq!(all(3), all(3));
    assert_eq!(enumerate(2, Filter::Eat).unwrap().len(), 7);
}

#[test]
fn characters_closed_under_composition() {
    let em = srk_character(&SrkTableau::euler_maruyama(), 3).unwrap();
    let c = convolve(Coproduct::Bck, &em, &em).unwrap();
    assert_character(&c, 3);
}

#[test]
fn deshuffle_dual_to_concatenation() {
    for mu in all(3) {
        for ((x, y), c) in deshuffle(&mu).iter() {
            let lhs = c * qi(x.sigma() as i64) * qi(y.sigma() as i64);
            let mut prod = ForestSeries::zero();
            prod.add_term(x.mul(y), Q::from_integer(1.into()));
            assert_eq!(prod.coeff(&mu) * qi(mu.sigma() as i64), lhs, "{x} · {y} vs {mu}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_under_relabeling(idx in 0usize..10_000, seed in any::<u64>(), shift in 0u32..5) {
        let forests = all(5);
        let f = &forests[idx % forests.len()];
        let g = f.graph();
        let mut perm: Vec<usize> = (0..g.len()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = Forest::from_graph(relabel(g, &perm, shift)).unwrap();
        prop_assert_eq!(&h, f);
        prop_assert_eq!(h.order(), f.order());
        prop_assert_eq!(Forest::parse(&f.to_string()).unwrap(), f.clone());
    }

    #[test]
    fn concatenation_dual_to_deshuffle_convolution(a in rand_linear(3), b in rand_linear(3)) {
        let lhs = concat(&delta_sigma(&a), &delta_sigma(&b), 3);
        let rhs = delta_sigma(&convolve(Coproduct::Deshuffle, &a, &b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn log_inverts_exp(a in rand_infinitesimal(3)) {
        let e = exp_conv(Coproduct::Bck, &a).unwrap();
        let back = log_conv(Coproduct::Bck, &e).unwrap();
        for f in all(3) {
            prop_assert_eq!(back.eval(&f), a.eval(&f), "{}", f);
        }
    }

    #[test]
    fn exp_deshuffle_gives_character(a in rand_infinitesimal(3)) {
        let e = exp_conv(Coproduct::Deshuffle, &a).unwrap();
        assert_character(&e, 3);
    }

    #[test]
    fn composition_with_unit(a in rand_character(3)) {
        let u = Functional::unit(3);
        let l = convolve(Coproduct::Bck, &u, &a).unwrap();
        let r = convolve(Coproduct::Bck, &a, &u).unwrap();
        for f in all(3) {
            prop_assert_eq!(l.eval(&f), a.eval(&f));
            prop_assert_eq!(r.eval(&f), a.eval(&f));
        }
    }

    #[test]
    fn srk_characters_are_characters(
        a in prop::collection::vec(rand_q(), 4),
        b in prop::collection::vec(rand_q(), 2),
        d in prop::collection::vec(rand_q(), 2),
        d0 in rand_q(),
    ) {
        let t = SrkTableau::new(vec![a[..2].to_vec(), a[2..].to_vec()], b, d, d0).unwrap();
        assert_character(&srk_character(&t, 3).unwrap(), 3);
    }
}
