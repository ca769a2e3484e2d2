mod common;

use lowsnr::formulation::{check_feasibility, CodingSemantics, Feasibility, Problem, VarKind};
use lowsnr::model::{butterfly, butterfly_nodes as bn, generate_instance, single_link, DemandPolicy, Hyperarc, NodeId};
use lowsnr::oracle::solve_exact;

/// Cheapest way to give each butterfly sink one unit along a single path,
/// by enumerating every pair of simple paths. With `shared`, an arc used by
/// both paths is paid once.
fn butterfly_by_paths(hyperarcs: &[Hyperarc], shared: bool) -> f64 {
    fn paths(hs: &[Hyperarc], at: NodeId, to: NodeId, seen: &mut Vec<NodeId>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if at == to {
            out.push(cur.clone());
            return;
        }
        for (k, h) in hs.iter().enumerate() {
            let next = h.receivers[0];
            if h.sender == at && !seen.contains(&next) {
                seen.push(next);
                cur.push(k);
                paths(hs, next, to, seen, cur, out);
                cur.pop();
                seen.pop();
            }
        }
    }
    let all = |t: u32| {
        let mut out = Vec::new();
        paths(hyperarcs, NodeId(bn::S), NodeId(t), &mut vec![NodeId(bn::S)], &mut Vec::new(), &mut out);
        out
    };
    let cost = |arcs: &[usize]| arcs.iter().map(|&k| 1.0 / hyperarcs[k].gamma).sum::<f64>();
    let mut best = f64::INFINITY;
    for p1 in all(bn::T1) {
        for p2 in all(bn::T2) {
            let c = if shared {
                let mut u: Vec<usize> = p1.iter().chain(&p2).copied().collect();
                u.sort();
                u.dedup();
                cost(&u)
            } else {
                cost(&p1) + cost(&p2)
            };
            best = best.min(c);
        }
    }
    best
}

#[test]
fn single_link_optimum_is_demand_times_path_loss() {
    for (d, r) in [(1.0, 0.3), (2.0, 0.1), (3.5, 0.05)] {
        let inst = single_link(d, r, 2.0).unwrap();
        let p = Problem::build(inst).unwrap();
        let sol = solve_exact(&p.program).unwrap();
        let expected = r * d * d;
        assert!(common::rel(sol.objective, expected) < 1e-6, "{} vs {expected}", sol.objective);
        let gamma = 1.0 / (d * d);
        let powers = p.program.powers(&sol.primal);
        assert!(common::rel(powers[0], r / gamma) < 1e-6);
    }
}

#[test]
fn oversized_single_link_demand_is_infeasible_and_named() {
    // capacity is gamma * budget = 0.25 * 2
    let p = Problem::build(single_link(2.0, 2.0 * 0.25 * 2.0, 2.0).unwrap()).unwrap();
    match check_feasibility(&p.program).unwrap() {
        Feasibility::Infeasible { sessions, violation } => {
            assert_eq!(sessions, vec![0]);
            assert!(violation > 0.0);
        }
        f => panic!("expected infeasible, got {f:?}"),
    }
}

#[test]
fn butterfly_coding_shares_the_bottleneck() {
    let (inst, hs) = butterfly().unwrap();
    let coded = Problem::from_hyperarcs(inst.clone(), hs.clone(), CodingSemantics::Max).unwrap();
    let routed = Problem::from_hyperarcs(inst, hs.clone(), CodingSemantics::Sum).unwrap();
    let a = solve_exact(&coded.program).unwrap();
    let b = solve_exact(&routed.program).unwrap();

    assert!((a.objective - butterfly_by_paths(&hs, true)).abs() < 1e-6, "{}", a.objective);
    assert!((b.objective - butterfly_by_paths(&hs, false)).abs() < 1e-6, "{}", b.objective);
    assert!(a.objective < b.objective - 1.0);

    // the c -> d hyperarc carries max(1, 1) = 1 when coded, 1 + 1 when routed
    let cd = hs.iter().position(|h| h.sender == NodeId(bn::C)).unwrap();
    let z = |p: &Problem, u: &[f64]| u[p.program.index.z(cd)];
    assert!((z(&coded, &a.primal) - 1.0).abs() < 1e-6);
    assert!((z(&routed, &b.primal) - 2.0).abs() < 1e-6);
}

#[test]
fn zero_sessions_cost_nothing() {
    let inst = single_link(1.0, 0.1, 1.0).unwrap().with_sessions(vec![]).unwrap();
    let p = Problem::build(inst).unwrap();
    let sol = solve_exact(&p.program).unwrap();
    assert!(sol.objective.abs() < 1e-9);
    assert!(check_feasibility(&p.program).unwrap().is_feasible());
}

#[test]
fn generated_instances_pass_phase_one() {
    for seed in 0..10 {
        for n in [3, 5, 7] {
            let inst = generate_instance(seed, n, 10.0, 1 + seed as usize % 3, DemandPolicy::default()).unwrap();
            let f = check_feasibility(&Problem::build(inst).unwrap().program).unwrap();
            assert!(f.is_feasible(), "seed {seed} n {n}: {f:?}");
        }
    }
}

#[test]
fn adding_sessions_never_lowers_the_optimum() {
    for seed in [3, 11, 29] {
        let inst = generate_instance(seed, 6, 10.0, 3, DemandPolicy::default()).unwrap();
        let mut last = 0.0;
        for k in 0..=inst.sessions().len() {
            let sub = inst.with_sessions(inst.sessions()[..k].to_vec()).unwrap();
            let obj = solve_exact(&Problem::build(sub).unwrap().program).unwrap().objective;
            assert!(obj >= last - 1e-7, "seed {seed}: {obj} < {last} after {k} sessions");
            last = obj;
        }
    }
}

#[test]
fn oracle_point_satisfies_every_row_family() {
    let p = common::small_problem(5);
    let sol = solve_exact(&p.program).unwrap();
    let r = p.program.residuals(&sol.primal);
    assert!(r.max() < 1e-7, "{r:?}");
    // power is only spent on hyperarcs that carry rate
    for h in 0..p.program.index.hyperarcs {
        let j = p.program.index.power(h);
        assert!(matches!(p.program.index.kind(j), VarKind::Power { .. }));
    }
}
