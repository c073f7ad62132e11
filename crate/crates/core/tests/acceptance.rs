//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use backperm::audit::{check_backwards_uniform, equivalence_report, lower_bound_certificate, uniform_certificate, CERTIFICATE_TOLERANCE};
use backperm::audit::{adversarial_cost_function, efficiency_witness, maxwise_probability, minwise_probability};
use backperm::construct::{
    approximation_report, dk_distribution, lcm_check, lcm_family, lcm_upto, pebble, DkParams, PebbleOptions,
    PreconditionCheck,
};
use backperm::corpus::{random_distribution, random_minwise_mixture, standard_corpus};
use backperm::experiments::kkt::{light_edges, minimum_spanning_forest};
use backperm::experiments::quicksort::{
    comparison_upper_bound, expected_comparisons_closed_form, expected_comparisons_exhaustive, quicksort_comparisons,
};
use backperm::experiments::{kkt_single_batch, UniformSource, UniformSubsets, WeightedGraph};
use backperm::oracle::{brute_conditional_last, brute_expected_cost, brute_maxwise, brute_minwise};
use backperm::weightfn::{level_sum_bounds, shadow_bound_check, single_batch_audit, SubsetDistribution, WeightFunction};
use backperm::{
    build_transition_graph, graphs_equal, memoryless_distribution, uniform_transition_graph, Limits,
    PermutationDistribution, Rational, SubsetMask, TransitionGraph,
};

type Outcome = Result<String, String>;

/// Id, title, check and optional time budget in seconds.
type Criterion = (u32, &'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lim() -> Limits {
    Limits::default()
}

fn graph_of(d: &PermutationDistribution) -> Result<TransitionGraph, String> {
    build_transition_graph(d).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let expected = [2u64, 6, 12, 60, 60, 420, 840];
    for (n, &size) in (2..=8).zip(&expected) {
        let fam = lcm_family(n, &lim()).map_err(|e| e.to_string())?;
        ensure(fam.t() as u64 == size && lcm_upto(n as u64) == size.into(), || {
            format!("n={n}: size {} expected {size}", fam.t())
        })?;
        ensure(fam.is_pairwise_distinct(), || format!("n={n}: repeated members"))?;
        let d = PermutationDistribution::uniform_over(&fam).map_err(|e| e.to_string())?;
        let rep = equivalence_report(&d, &lim()).map_err(|e| e.to_string())?;
        ensure(rep.all_true(), || format!("n={n}: {:?}", rep.as_array()))?;
    }
    Ok("sizes 2,6,12,60,60,420,840; five trues for n = 2..8".into())
}

fn criterion_2() -> Outcome {
    for n in 1..=30 {
        let c = lcm_check(n).map_err(|e| e.to_string())?;
        ensure(c.equal, || format!("n={n}: {} != {}", c.a, c.b))?;
    }
    Ok("n = 1..30".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut all_true, mut all_false) = (0, 0);
    let mut cases = Vec::new();
    for _ in 0..200 {
        cases.push(random_distribution(5, 20, &mut rng));
    }
    for _ in 0..40 {
        let comps = rng.random_range(1..=3);
        cases.push(random_minwise_mixture(5, comps, &mut rng, &lim()).map_err(|e| e.to_string())?);
    }
    for (i, d) in cases.iter().enumerate() {
        let rep = equivalence_report(d, &lim()).map_err(|e| e.to_string())?;
        ensure(rep.all_agree(), || format!("case {i}: {:?}", rep.as_array()))?;
        if rep.all_true() {
            all_true += 1;
        } else {
            all_false += 1;
        }
    }
    Ok(format!("{} cases agree ({all_true} all true, {all_false} all false)", cases.len()))
}

fn approx_case(g: &TransitionGraph, t: u64, eps: Rational, check: PreconditionCheck) -> Result<String, String> {
    let opts = PebbleOptions { t, epsilon: eps.clone(), check };
    let out = pebble(g, &opts, &lim()).map_err(|e| e.to_string())?;
    ensure(!out.exact_clause, || format!("t={t} unexpectedly integral"))?;
    let back = graph_of(&PermutationDistribution::uniform_over(&out.family).map_err(|e| e.to_string())?)?;
    let rep = approximation_report(g, &back, &eps);
    ensure(rep.within, || format!("t={t}: {rep:?}"))?;
    Ok(format!("n={} t={t} node dev {} edge dev {}", g.n(), rep.node_deviation, rep.edge_deviation))
}

fn two_level_graph() -> TransitionGraph {
    let mut edges = BTreeMap::new();
    let full = SubsetMask::full(2).unwrap();
    edges.insert(full, vec![(1, Rational::new(1, 2)), (2, Rational::new(1, 2))]);
    edges.insert(full.without(1), vec![(2, Rational::one())]);
    edges.insert(full.without(2), vec![(1, Rational::one())]);
    TransitionGraph::from_edges(2, &edges).unwrap()
}

fn branching_graph() -> TransitionGraph {
    // From [4]: drop 4 w.p. 1/2, 3 or 2 w.p. 1/4; {1,2,3} drops uniformly;
    // every other node is deterministic.
    let n = 4;
    let full = SubsetMask::full(n).unwrap();
    let mut edges = BTreeMap::new();
    edges.insert(full, vec![(2, Rational::new(1, 4)), (3, Rational::new(1, 4)), (4, Rational::new(1, 2))]);
    let mut frontier = vec![full.without(2), full.without(3), full.without(4)];
    while let Some(s) = frontier.pop() {
        if s.is_empty() || edges.contains_key(&s) {
            continue;
        }
        let out: Vec<(usize, Rational)> = if s == full.without(4) {
            s.elements().map(|x| (x, Rational::new(1, 3))).collect()
        } else {
            vec![(s.elements().last().unwrap(), Rational::one())]
        };
        frontier.extend(out.iter().map(|(x, _)| s.without(*x)));
        edges.insert(s, out);
    }
    TransitionGraph::from_edges(n, &edges).unwrap()
}

fn criterion_4() -> Outcome {
    for n in 2..=8 {
        let g = uniform_transition_graph(n, &lim()).map_err(|e| e.to_string())?;
        let t = lcm_upto(n as u64).to_u64_digits()[0];
        let opts = PebbleOptions {
            t,
            epsilon: Rational::one(),
            check: PreconditionCheck::DistinctnessOnly,
        };
        let out = pebble(&g, &opts, &lim()).map_err(|e| e.to_string())?;
        let back = graph_of(&PermutationDistribution::uniform_over(&out.family).map_err(|e| e.to_string())?)?;
        ensure(out.exact_clause && graphs_equal(&back, &g).unwrap_or(false), || {
            format!("n={n}: graph not reproduced")
        })?;
    }
    let a = approx_case(&two_level_graph(), 129, Rational::new(1, 2), PreconditionCheck::LowerBoundOnly)?;
    let b = approx_case(&branching_graph(), 1537, Rational::new(1, 2), PreconditionCheck::LowerBoundOnly)?;
    let g8 = uniform_transition_graph(8, &lim()).map_err(|e| e.to_string())?;
    let c = approx_case(&g8, 36001, Rational::one(), PreconditionCheck::Full)?;
    Ok(format!("exact for n = 2..8; {a}; {b}; {c}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases: Vec<(String, PermutationDistribution)> = standard_corpus(8, &lim())
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|e| (e.name, e.dist))
        .collect();
    for i in 0..200 {
        let n = rng.random_range(2..=8);
        cases.push((format!("random-{i}"), random_distribution(n, 20, &mut rng)));
    }
    let mut with_q = 0;
    for (name, d) in &cases {
        let cert = lower_bound_certificate(d, &lim()).map_err(|e| e.to_string())?;
        ensure(cert.holds, || format!("{name}: {cert:?}"))?;
        if cert.q >= 1 {
            with_q += 1;
            ensure(cert.lhs >= cert.rhs - CERTIFICATE_TOLERANCE, || format!("{name}: lhs < rhs"))?;
        }
    }
    // Larger n only through the analytic uniform profile.
    for n in 1..=5000 {
        let cert = uniform_certificate(n).map_err(|e| e.to_string())?;
        ensure(cert.holds, || format!("uniform n={n}: {cert:?}"))?;
        if cert.q >= 1 {
            with_q += 1;
            ensure(cert.lhs >= cert.rhs - CERTIFICATE_TOLERANCE, || format!("uniform n={n}: lhs < rhs"))?;
        }
    }
    Ok(format!("{} explicit distributions, 5000 analytic profiles, {with_q} with q >= 1", cases.len()))
}

fn random_subset_distribution(n: usize, k: usize, rng: &mut ChaCha8Rng) -> SubsetDistribution {
    let size = rng.random_range(1..=20);
    let mut entries: BTreeMap<SubsetMask, u64> = BTreeMap::new();
    for _ in 0..size {
        let picked = rand::seq::index::sample(rng, n, k).into_iter().map(|i| i + 1);
        let s = SubsetMask::from_elements(n, picked).unwrap();
        *entries.entry(s).or_default() += rng.random_range(1..=20u64);
    }
    let total: u64 = entries.values().sum();
    let support = entries
        .into_iter()
        .map(|(s, w)| (s, Rational::from(w) / Rational::from(total)))
        .collect();
    SubsetDistribution::new(n, k, support).unwrap()
}

fn random_weight_function(rng: &mut ChaCha8Rng) -> WeightFunction {
    let n = rng.random_range(1..=10);
    let sets = rng.random_range(1..=40usize.min(1 << n));
    let mut entries = BTreeMap::new();
    for _ in 0..sets {
        let bits = rng.random_range(0..1u64 << n);
        let den = rng.random_range(1..=100i64);
        let num = rng.random_range(1..=den);
        entries.insert(SubsetMask::from_bits(n, bits).unwrap(), Rational::new(num, den));
    }
    WeightFunction::new(n, entries).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let d = random_subset_distribution(10, 5, &mut rng);
        let a = single_batch_audit(&d).map_err(|e| e.to_string())?;
        ensure(a.identity_holds, || format!("distribution {i}: {} != {}", a.ratio, a.predicted))?;
    }
    for i in 0..100 {
        let w = random_weight_function(&mut rng);
        let b = level_sum_bounds(&w, 1e-9);
        ensure(b.sum_within && b.entropy_within, || format!("weight function {i}: {b:?}"))?;
    }
    Ok("100 subset distributions, 100 weight functions".into())
}

fn criterion_7() -> Outcome {
    let pairs: Vec<SubsetMask> = (1..=5)
        .flat_map(|a| (a + 1..=5).map(move |b| SubsetMask::from_elements(5, [a, b]).unwrap()))
        .collect();
    let mut min_slack = f64::INFINITY;
    for choice in 1u32..1 << pairs.len() {
        let family: Vec<SubsetMask> = (0..pairs.len()).filter(|i| choice & (1 << i) != 0).map(|i| pairs[i]).collect();
        let b = shadow_bound_check(&family).map_err(|e| e.to_string())?;
        ensure(b.holds(1e-9), || format!("family {choice:#x}: {b:?}"))?;
        min_slack = min_slack.min(b.actual as f64 - b.bound);
    }
    Ok(format!("1023 families, min slack {min_slack:.3e}"))
}

fn within_last(d: &PermutationDistribution, x: SubsetMask, t: usize) -> Rational {
    d.support()
        .iter()
        .filter(|(p, _)| {
            let tail = &p.order()[p.n() - t..];
            x.elements().all(|e| tail.contains(&e))
        })
        .map(|(_, pr)| pr.clone())
        .sum()
}

fn criterion_8() -> Outcome {
    for (k, t) in [(1u32, 1usize), (1, 2), (2, 1)] {
        let params = DkParams::new(k, t).map_err(|e| e.to_string())?;
        let d = dk_distribution(params, &lim()).map_err(|e| e.to_string())?;
        let g = graph_of(&d)?;
        let prefix_floor = Rational::pow2_neg(2 * k * k * t as u32);
        for (s, w) in g.nodes() {
            ensure(*w >= prefix_floor, || format!("({k},{t}) prefix {s}: {w}"))?;
        }
        let full = g.full_set();
        for x in full.submasks() {
            if x.is_empty() || x.len() > t {
                continue;
            }
            let pr = within_last(&d, x, t);
            ensure(pr >= Rational::pow2_neg(2 * x.len() as u32 * k), || {
                format!("({k},{t}) last-{t} {x}: {pr}")
            })?;
        }
        if (k, t) == (2, 1) {
            let rep = check_backwards_uniform(&g, &Rational::from(4u64));
            ensure(rep.passed, || format!("(2,1) not backwards 4-uniform: {rep:?}"))?;
        }
    }
    Ok("(1,1), (1,2), (2,1)".into())
}

fn criterion_9() -> Outcome {
    let exhaustive6 = expected_comparisons_exhaustive(6, 8).map_err(|e| e.to_string())?;
    let closed6 = expected_comparisons_closed_form(6);
    ensure(exhaustive6 == closed6, || format!("S_6: {exhaustive6} vs {closed6}"))?;
    let exact = expected_comparisons_closed_form(8);
    let src = UniformSource::new(8).map_err(|e| e.to_string())?;
    let r = quicksort_comparisons(&src, 100_000, 9).map_err(|e| e.to_string())?;
    let dev = (r.mean - exact.to_f64()).abs();
    ensure(dev <= 3.0 * r.std_error, || {
        format!("mean {} vs exact {} (se {})", r.mean, exact.to_f64(), r.std_error)
    })?;
    let bound = comparison_upper_bound(8).to_f64();
    ensure(r.mean <= bound, || format!("mean {} above 2nH_n = {bound}", r.mean))?;
    Ok(format!(
        "S_6 oracle {exhaustive6}; n=8 exact {exact} = {:.4}, mean {:.4} ± {:.4}, 2nH_n = {bound:.4}",
        exact.to_f64(),
        r.mean,
        r.std_error
    ))
}

/// `e ∉ S` is `F`-light iff it belongs to the minimum spanning forest of `S ∪ {e}`.
fn light_iff_in_forest(g: &WeightedGraph) -> Result<(), String> {
    let m = g.m();
    let mst: Vec<usize> = minimum_spanning_forest(g, &(0..m).collect::<Vec<_>>());
    for subset in 0u32..1 << m {
        let sample: Vec<usize> = (0..m).filter(|e| subset & (1 << e) != 0).collect();
        let (_, light) = light_edges(g, &sample);
        for e in (0..m).filter(|e| subset & (1 << e) == 0) {
            let mut with_e = sample.clone();
            with_e.push(e);
            let in_forest = minimum_spanning_forest(g, &with_e).contains(&e);
            ensure(light.contains(&e) == in_forest, || format!("{}edge {e} sample {sample:?}", g.to_text()))?;
            if mst.contains(&e) {
                ensure(light.contains(&e), || format!("{}MST edge {e} is heavy", g.to_text()))?;
            }
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let mut summary = Vec::new();
    for n in [8usize, 16] {
        let g = WeightedGraph::complete_random(n, n as u64).map_err(|e| e.to_string())?;
        let r = kkt_single_batch(&g, &Rational::new(1, 2), &UniformSubsets, 1000, 10).map_err(|e| e.to_string())?;
        let bound = 2.0 * n as f64;
        ensure(r.mean < bound, || format!("K_{n}: mean {} >= {bound}", r.mean))?;
        summary.push(format!("K_{n} mean {:.3} < {bound}", r.mean));
    }
    // Every graph on at most 5 nodes: all edge sets, all weight orders
    // when there are at most 5 edges, otherwise 24 random orders.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut graphs = 0u64;
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for edge_set in 0u32..1 << pairs.len() {
            let chosen: Vec<(usize, usize)> =
                (0..pairs.len()).filter(|i| edge_set & (1 << i) != 0).map(|i| pairs[i]).collect();
            let m = chosen.len();
            let orders: Vec<Vec<usize>> = if m == 0 {
                vec![Vec::new()]
            } else if m <= 5 {
                backperm::all_permutations(m).into_iter().map(|p| p.into_order()).collect()
            } else {
                (0..24)
                    .map(|_| {
                        let mut o: Vec<usize> = (1..=m).collect();
                        o.shuffle(&mut rng);
                        o
                    })
                    .collect()
            };
            for order in orders {
                let edges = chosen
                    .iter()
                    .zip(&order)
                    .map(|(&(u, v), &w)| (u, v, Rational::from(w as u64)))
                    .collect();
                let g = WeightedGraph::new(n, edges).map_err(|e| e.to_string())?;
                light_iff_in_forest(&g)?;
                graphs += 1;
            }
        }
    }
    summary.push(format!("light iff in forest on {graphs} weighted graphs"));
    Ok(summary.join("; "))
}

fn criterion_11() -> Outcome {
    let corpus = standard_corpus(6, &lim()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut cases: Vec<(String, PermutationDistribution)> = corpus.into_iter().map(|e| (e.name, e.dist)).collect();
    for i in 0..30 {
        let n = rng.random_range(1..=6);
        cases.push((format!("random-{i}"), random_distribution(n, 20, &mut rng)));
    }
    let mut checks = 0u64;
    for (name, d) in &cases {
        let g = graph_of(d)?;
        let full = g.full_set();
        for y in full.submasks() {
            for x in y.elements() {
                let mw = minwise_probability(&g, y, x).map_err(|e| e.to_string())?;
                ensure(mw == brute_minwise(d, y, x).unwrap(), || format!("{name}: minwise {y} {x}"))?;
                let xw = maxwise_probability(&g, y, x).map_err(|e| e.to_string())?;
                ensure(xw == brute_maxwise(d, y, x).unwrap(), || format!("{name}: maxwise {y} {x}"))?;
                let cond = brute_conditional_last(d, y, x).unwrap();
                let expected = g.has_support(y).then(|| g.edge_weight(y, x));
                ensure(cond == expected, || format!("{name}: conditional {y} {x}"))?;
                checks += 3;
            }
        }
        let c = adversarial_cost_function(&g);
        let n_alpha = Rational::from(g.n()) * efficiency_witness(&g);
        ensure(brute_expected_cost(d, &c).unwrap() == n_alpha, || format!("{name}: efficiency under D"))?;
        let memoryless = memoryless_distribution(&g, &lim()).map_err(|e| e.to_string())?;
        ensure(brute_expected_cost(&memoryless, &c).unwrap() == n_alpha, || {
            format!("{name}: efficiency under the memoryless distribution")
        })?;
        checks += 2;
    }
    Ok(format!("{} distributions, {checks} exact comparisons", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "lcm family is exact minwise and backwards uniform", criterion_1, Some(60)),
        (2, "lcm identity", criterion_2, Some(1)),
        (3, "five-way equivalence", criterion_3, Some(60)),
        (4, "pebble exactness and approximation", criterion_4, None),
        (5, "entropy lower-bound certificate", criterion_5, None),
        (6, "single-batch identity and level-sum bounds", criterion_6, None),
        (7, "Kruskal-Katona shadow bound", criterion_7, Some(10)),
        (8, "D_k prefix and suffix bounds", criterion_8, None),
        (9, "quicksort comparisons", criterion_9, Some(60)),
        (10, "KKT single batch", criterion_10, Some(120)),
        (11, "oracle agreement", criterion_11, None),
    ];
    let mut failed = 0;
    for (id, title, run, budget) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(secs)) = (&outcome, budget) {
            if elapsed > Duration::from_secs(secs) {
                outcome = Err(format!("took {elapsed:.2?}, budget {secs} s"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {title} [{elapsed:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {title} [{elapsed:.2?}]: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
