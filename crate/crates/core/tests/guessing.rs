mod common;

use common::*;
use guesslab::constructions::{routing_solution, unit_witness};
use guesslab::digraph::params;
use guesslab::guessing::{
    exhaustive_max_fixed, guessing_number, h_loops, is_routing_solvable, is_solvable,
    loopfull_witness, max_fixed_nondecreasing, strict_guessing_number,
};
use guesslab::{named, CodingFunction, Digraph, Family, GuessKind, Limits, Method, TableFilter};
use rand::Rng;

fn lim() -> Limits {
    Limits::default()
}

fn family(f: Family) -> Digraph {
    named(f).unwrap().graph
}

fn pow(q: u32, e: usize) -> u64 {
    u64::from(q).pow(e as u32)
}

/// Maximum fixed-point count over every function reading only in-neighbours,
/// by enumerating all table combinations.
fn brute_guessing(g: &Digraph, q: u32, exact: bool) -> Option<u64> {
    let n = g.n();
    let support: Vec<Vec<usize>> = (0..n).map(|v| g.in_neighbours(v)).collect();
    let mut choices: Vec<Vec<Vec<u32>>> = Vec::new();
    for s in &support {
        let rows = pow(q, s.len());
        let tables: Vec<Vec<u32>> = (0..pow(q, rows as usize))
            .map(|i| state(i, rows as usize, q))
            .filter(|t| {
                let m = s.len().max(1);
                let mut sup = vec![Vec::new(); m];
                sup[0] = (0..s.len()).collect();
                let mut tabs = vec![vec![0]; m];
                tabs[0] = t.clone();
                let f = CodingFunction::new(m, q, sup, tabs).unwrap();
                !exact || f.essential_support(0).len() == s.len()
            })
            .collect();
        choices.push(tables);
    }
    if choices.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut best = 0;
    let mut pick = vec![0usize; n];
    loop {
        let tables = (0..n).map(|v| choices[v][pick[v]].clone()).collect();
        let f = CodingFunction::new(n, q, support.clone(), tables).unwrap();
        best = best.max(brute_fixed_count(&f));
        let mut v = 0;
        loop {
            if v == n {
                return Some(best);
            }
            pick[v] += 1;
            if pick[v] < choices[v].len() {
                break;
            }
            pick[v] = 0;
            v += 1;
        }
    }
}

fn tiny_corpus() -> Vec<Digraph> {
    let mut out: Vec<Digraph> = (0..=2).flat_map(|n| all_digraphs(n, true)).collect();
    out.extend(all_digraphs(3, false));
    out
}

#[test]
fn guessing_examples() {
    let k3 = family(Family::Complete { n: 3 });
    let r = guessing_number(&k3, 2, &lim()).unwrap();
    assert_eq!(
        (r.max_fixed, r.kind, r.method),
        (4, GuessKind::G, Method::ConflictGraph)
    );
    assert!((r.value() - 2.0).abs() < 1e-12);
    let t4 = family(Family::Transitive { n: 4 });
    assert_eq!(guessing_number(&t4, 3, &lim()).unwrap().max_fixed, 1);
    // The binary pentagon beats the routing bound q^c = 4.
    let c5 = family(Family::Cycle { n: 5 });
    assert_eq!(guessing_number(&c5, 2, &lim()).unwrap().max_fixed, 5);
    assert_eq!(brute_guessing(&c5, 2, false), Some(5));
    let big = Digraph::empty(13).unwrap();
    assert!(guessing_number(&big, 2, &lim())
        .unwrap_err()
        .is_resource_bound());
    assert!(guessing_number(&k3, 1, &lim()).is_err());
}

#[test]
fn strict_examples() {
    let one = digraph(1, &[(0, 0)]);
    assert_eq!(
        strict_guessing_number(&one, 2, &lim()).unwrap().max_fixed,
        2
    );
    let k2 = family(Family::Complete { n: 2 }).add_loops();
    let r = strict_guessing_number(&k2, 2, &lim()).unwrap();
    assert_eq!((r.max_fixed, r.method), (3, Method::IdsFormula));
    for n in 4..=5 {
        let star = family(Family::Star { n });
        for q in [2, 3] {
            assert_eq!(
                guessing_number(&star, q, &lim()).unwrap().max_fixed,
                u64::from(q)
            );
            let reduced = star.reduce_vertex(n - 1).unwrap().graph;
            assert_eq!(reduced, family(Family::Complete { n: n - 1 }).add_loops());
            let h = strict_guessing_number(&reduced, q, &lim()).unwrap();
            assert_eq!(h.max_fixed, pow(q, n - 1) - 1);
        }
    }
    let r = strict_guessing_number(&family(Family::Cycle { n: 4 }), 2, &lim()).unwrap();
    let w = r.witness.unwrap();
    assert_eq!(w.interaction_graph(), family(Family::Cycle { n: 4 }));
    assert_eq!(brute_fixed_count(&w), r.max_fixed);
}

#[test]
fn h_loops_examples() {
    assert_eq!(
        h_loops(&family(Family::Complete { n: 3 }), 2, &lim())
            .unwrap()
            .max_fixed,
        7
    );
    assert_eq!(
        h_loops(&family(Family::Transitive { n: 3 }), 2, &lim())
            .unwrap()
            .max_fixed,
        6
    );
    for q in [2, 3, 4] {
        for n in 0..=5 {
            let e = Digraph::empty(n).unwrap();
            assert_eq!(h_loops(&e, q, &lim()).unwrap().max_fixed, pow(q, n));
            let w = loopfull_witness(&e, q).unwrap();
            assert!(w.canonicalize() == CodingFunction::identity(n, q).unwrap().canonicalize());
        }
    }
    let w = loopfull_witness(&family(Family::Complete { n: 3 }), 2).unwrap();
    let fix = w.fixed_points(&lim()).unwrap();
    assert_eq!(fix.len(), 7);
    assert!(!fix.contains(&[0, 0, 0]));
    assert!(h_loops(&digraph(1, &[(0, 0)]), 2, &lim()).is_err());
}

#[test]
fn loopfull_witness_matches_formula() {
    let mut r = rng(31);
    for _ in 0..150 {
        let n = r.gen_range(1..=8);
        let q = r.gen_range(2..=4);
        let g = random_digraph(&mut r, n, 0.3, false);
        let w = loopfull_witness(&g, q).unwrap();
        let ids = brute_ids(&g);
        let formula: u64 = ids
            .iter()
            .enumerate()
            .map(|(k, &c)| pow(q - 1, k) * c)
            .sum();
        assert_eq!(brute_fixed_count(&w), formula);
        assert_eq!(h_loops(&g, q, &lim()).unwrap().max_fixed, formula);
        assert_eq!(w.interaction_graph(), g.add_loops());
    }
}

#[test]
fn solvability_examples() {
    let k3 = family(Family::Complete { n: 3 });
    assert!(is_solvable(&k3, 2, &lim()).unwrap());
    assert!(!is_routing_solvable(&k3, &lim()).unwrap());
    assert!(is_routing_solvable(&family(Family::Cycle { n: 4 }), &lim()).unwrap());
    assert!(!is_solvable(&family(Family::Cycle { n: 5 }), 2, &lim()).unwrap());
}

#[test]
fn conflict_graph_matches_function_enumeration() {
    for g in tiny_corpus() {
        let r = guessing_number(&g, 2, &lim()).unwrap();
        assert_eq!(Some(r.max_fixed), brute_guessing(&g, 2, false), "{g:?}");
        let w = r.witness.unwrap();
        assert_eq!(brute_fixed_count(&w), r.max_fixed);
        assert!(w.interaction_graph().is_subgraph_of(&g));
    }
    for g in all_digraphs(2, true)
        .into_iter()
        .filter(|g| (0..2).all(|v| g.in_degree(v) <= 1))
    {
        let r = guessing_number(&g, 3, &lim()).unwrap();
        assert_eq!(Some(r.max_fixed), brute_guessing(&g, 3, false), "{g:?}");
    }
}

#[test]
fn strict_matches_function_enumeration() {
    for g in tiny_corpus() {
        let h = strict_guessing_number(&g, 2, &lim()).unwrap();
        assert_eq!(Some(h.max_fixed), brute_guessing(&g, 2, true), "{g:?}");
        if let Some(w) = h.witness {
            assert_eq!(w.interaction_graph(), g);
            assert_eq!(brute_fixed_count(&w), h.max_fixed);
        }
    }
}

#[test]
fn sandwich() {
    for g in tiny_corpus() {
        let gq = guessing_number(&g, 2, &lim()).unwrap().max_fixed;
        let h = strict_guessing_number(&g, 2, &lim()).unwrap().max_fixed;
        assert!(gq >= h && h >= 1, "{g:?}");
    }
    for n in 1..=3 {
        for g in all_digraphs(n, true) {
            if (0..n).any(|v| g.in_degree(v) > 1) {
                continue;
            }
            let g3 = guessing_number(&g, 3, &lim()).unwrap().max_fixed;
            let h3 = strict_guessing_number(&g, 3, &lim()).unwrap().max_fixed;
            let g2 = guessing_number(&g, 2, &lim()).unwrap().max_fixed;
            assert!(g3 >= h3 && h3 >= g2, "{g:?}");
        }
    }
}

#[test]
fn unit_guessing_is_strict() {
    for g in tiny_corpus() {
        if guessing_number(&g, 2, &lim()).unwrap().max_fixed >= 2 {
            assert!(strict_guessing_number(&g, 2, &lim()).unwrap().max_fixed >= 2);
        }
    }
    let mut r = rng(32);
    let mut tested = 0;
    while tested < 200 {
        let n = r.gen_range(1..=6);
        let q = r.gen_range(2..=3);
        let loops = r.gen_bool(0.2);
        let g = random_digraph(&mut r, n, 0.3, loops);
        if g.is_acyclic() {
            assert!(unit_witness(&g, q).is_err());
            continue;
        }
        tested += 1;
        let w = unit_witness(&g, q).unwrap();
        assert_eq!(w.interaction_graph(), g);
        assert!(brute_fixed_count(&w) >= u64::from(q), "{g:?}");
    }
}

#[test]
fn reduction_never_lowers_guessing() {
    let mut r = rng(33);
    for _ in 0..200 {
        let (n, q) = if r.gen_bool(0.5) {
            (r.gen_range(1..=6), 2)
        } else {
            (r.gen_range(1..=4), 3)
        };
        let loops = r.gen_bool(0.3);
        let g = random_digraph(&mut r, n, 0.35, loops);
        let v = r.gen_range(0..n);
        let reduced = g.reduce_vertex(v).unwrap().graph;
        let before = guessing_number(&g, q, &lim()).unwrap().max_fixed;
        let after = guessing_number(&reduced, q, &lim()).unwrap().max_fixed;
        assert!(before <= after, "{g:?} v={v}");
    }
}

#[test]
fn loopfull_lower_bound() {
    let check = |g: &Digraph| {
        let n = g.n();
        for q in [2u32, 3, 5] {
            let h = h_loops(g, q, &lim()).unwrap().max_fixed;
            assert!(
                h >= pow(q - 1, n) + n as u64 * pow(q - 1, n.saturating_sub(1)),
                "{g:?} q={q}"
            );
        }
    };
    for n in 1..=4 {
        all_digraphs(n, false).iter().for_each(check);
    }
    let mut r = rng(34);
    for _ in 0..300 {
        let n = r.gen_range(5..=8);
        check(&random_digraph(&mut r, n, 0.4, false));
    }
}

#[test]
fn loopfull_formula_matches_strict_search() {
    for g in all_digraphs(3, false) {
        let looped = g.add_loops();
        let (count, witness) =
            exhaustive_max_fixed(&looped, 2, TableFilter::ExactSupport, &lim()).unwrap();
        assert_eq!(count, h_loops(&g, 2, &lim()).unwrap().max_fixed, "{g:?}");
        assert_eq!(witness.interaction_graph(), looped);
    }
}

#[test]
fn nondecreasing_functions_fall_short() {
    for (g, k) in [
        (family(Family::Complete { n: 3 }), 2),
        (family(Family::Cycle { n: 5 }), 3),
    ] {
        let (count, w) = max_fixed_nondecreasing(&g, 2, &lim()).unwrap();
        assert!(count < pow(2, k));
        assert!(w.is_nondecreasing());
        assert_eq!(brute_fixed_count(&w), count);
    }
}

#[test]
fn routing_witness_on_routing_solvable_graphs() {
    let mut corpus: Vec<Digraph> = (1..=4).flat_map(all_undirected).collect();
    let mut r = rng(35);
    corpus.extend((0..200).map(|_| {
        let n = r.gen_range(1..=7);
        random_digraph(&mut r, n, 0.3, true)
    }));
    for g in corpus {
        let p = params(&g).unwrap();
        assert_eq!(is_routing_solvable(&g, &lim()).unwrap(), p.c == p.k);
        if p.c != p.k {
            continue;
        }
        for q in [2, 3] {
            let f = routing_solution(&g, q, &lim())
                .unwrap()
                .to_coding_function()
                .unwrap();
            assert!(f.interaction_graph().is_subgraph_of(&g));
            assert!(f.is_nondecreasing());
            assert_eq!(brute_fixed_count(&f), pow(q, p.k), "{g:?}");
        }
    }
}
