//! Acceptance gate: one test per criterion, each printing a single
//! PASS line (visible with `--nocapture`; the per-test ok/FAILED summary
//! carries the same verdict). All tolerances are pinned in-line.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use miilspss::cuts::{
    cut_lhs, enumerate_most_violated, separate_dp, separate_inspection, separate_windowed,
    FractionalPoint, LsjCut,
};
use miilspss::instance::{generate_instance, Family, Instance};
use miilspss::lp::{solve_lp, LpLimits, LpStatus};
use miilspss::model::{build_fl, build_std, lsj_row, preprocess_fl};
use miilspss::solver::{
    brute_force_opt, fix_y_optimal_x, fractional_point, solve_bc, solve_bnb, solve_mh,
    SolveConfig,
};
use miilspss::ufl::{brute_force_ufl, extract_ufl_solution, ufl_to_miilspss, UflInstance};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Criterion-1 corpus: 200 instances over NJ in {1,2}, NI in {1,2},
/// NT in {3,4,5}, all three families.
fn corpus() -> Vec<(Instance, Family)> {
    let mut out = Vec::new();
    for seed in 1..=6u64 {
        for nj in [1, 2] {
            for ni in [1, 2] {
                for nt in [3, 4, 5] {
                    for family in Family::ALL {
                        out.push((generate_instance(nj, ni, nt, family, seed), family));
                    }
                }
            }
        }
    }
    out.truncate(200);
    out
}

fn lp_value(model: &miilspss::model::ModelIr) -> f64 {
    let res = solve_lp(model, &[], &LpLimits::default()).expect("LP solve");
    assert_eq!(res.status, LpStatus::Optimal);
    res.objective
}

fn random_point(inst: &Instance, rng: &mut impl Rng) -> FractionalPoint {
    let (nj, ni, nt) = (
        inst.num_suppliers(),
        inst.num_items(),
        inst.num_periods(),
    );
    let max_d = inst.demands().iter().fold(1.0_f64, |a, &b| a.max(b));
    FractionalPoint {
        xbar: (0..ni * nj * nt)
            .map(|_| rng.random_range(0.0..max_d))
            .collect(),
        ybar: (0..nj * nt).map(|_| rng.random_range(0.0..=1.0)).collect(),
    }
}

#[test]
fn criterion_1_oracle_exactness() {
    let cfg = SolveConfig::default();
    for (inst, family) in corpus() {
        let (opt, _) = brute_force_opt(&inst);
        let runs = [
            ("STD", solve_bnb(&inst, &build_std(&inst), &cfg)),
            ("FL", solve_bnb(&inst, &build_fl(&inst), &cfg)),
            ("PFL", solve_bnb(&inst, &preprocess_fl(&inst).0, &cfg)),
            ("BC", solve_bc(&inst, &cfg)),
        ];
        for (name, run) in runs {
            let (report, plan) = run.expect(name);
            assert!(
                rel_close(report.ub, opt, 1e-6),
                "{name} on {family:?}: {} vs oracle {opt}",
                report.ub
            );
            assert!(rel_close(report.lb, opt, 1e-6), "{name} lb");
            assert!(inst.validate(&plan, 1e-6).is_ok());
        }
    }
    println!("criterion 1 (oracle exactness, 200 instances x 4 methods): PASS");
}

#[test]
fn criterion_2_cut_closure_matches_fl_bound() {
    let dims = [(2, 2, 6), (3, 2, 8), (2, 3, 9), (3, 3, 10)];
    let limits = LpLimits::default();
    let mut checked = 0;
    'outer: for seed in 1..=13u64 {
        for (k, &(nj, ni, nt)) in dims.iter().enumerate() {
            if checked == 50 {
                break 'outer;
            }
            let family = Family::ALL[(seed as usize + k) % 3];
            let inst = generate_instance(nj, ni, nt, family, seed);
            let fl_bound = lp_value(&build_fl(&inst));
            let mut model = build_std(&inst);
            let mut seen = std::collections::HashSet::new();
            let mut bound = 0.0;
            for round in 0.. {
                assert!(round < 500, "cut loop failed to converge");
                let res = solve_lp(&model, &[], &limits).unwrap();
                assert_eq!(res.status, LpStatus::Optimal);
                bound = res.objective;
                let pt = fractional_point(&inst, &model, &res.primal);
                let fresh: Vec<LsjCut> = (0..ni)
                    .map(|i| separate_dp(&inst, &pt, i))
                    .filter(|c| c.violation > 1e-6 && seen.insert(c.key()))
                    .collect();
                if fresh.is_empty() {
                    break;
                }
                for cut in &fresh {
                    model.push_row(lsj_row(&inst, &model, cut).unwrap());
                }
            }
            assert!(
                rel_close(bound, fl_bound, 1e-6),
                "({nj},{ni},{nt}) seed {seed}: closure {bound} vs FL {fl_bound}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
    println!("criterion 2 (separation closure equals FL bound, 50 instances): PASS");
}

#[test]
fn criterion_3_preprocessing_preserves_optimum() {
    let cfg = SolveConfig::default();
    let mut reduced_seen = std::collections::HashMap::new();
    for (inst, family) in corpus() {
        let (pfl, report) = preprocess_fl(&inst);
        let (fl_run, _) = solve_bnb(&inst, &build_fl(&inst), &cfg).unwrap();
        let (pfl_run, _) = solve_bnb(&inst, &pfl, &cfg).unwrap();
        assert!(
            rel_close(fl_run.ub, pfl_run.ub, 1e-6),
            "{family:?}: FL {} vs PFL {}",
            fl_run.ub,
            pfl_run.ub
        );
        if report.reduction_pct > 0.0 {
            *reduced_seen.entry(family.name()).or_insert(0) += 1;
        }
    }
    // N1 cannot trigger the elimination condition at NT <= 5 (transaction
    // costs exceed any reachable holding total); demonstrate it on a longer
    // horizon instead and verify safety there too.
    for family in Family::ALL {
        if reduced_seen.contains_key(family.name()) {
            continue;
        }
        let found = (1..=20u64).any(|seed| {
            let inst = generate_instance(2, 2, 30, family, seed);
            let (pfl, report) = preprocess_fl(&inst);
            if report.reduction_pct <= 0.0 {
                return false;
            }
            let (fl_run, _) = solve_bnb(&inst, &build_fl(&inst), &cfg).unwrap();
            let (pfl_run, _) = solve_bnb(&inst, &pfl, &cfg).unwrap();
            rel_close(fl_run.ub, pfl_run.ub, 1e-6)
        });
        assert!(found, "no reduction found for family {family:?}");
    }
    println!("criterion 3 (preprocessing optimum-preserving, reduction per family): PASS");
}

#[test]
fn criterion_4_separation_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dims = [(2, 2, 6), (3, 2, 9)];
    for trial in 0..500u64 {
        let (nj, ni, nt) = dims[trial as usize % 2];
        let family = Family::ALL[trial as usize % 3];
        let inst = generate_instance(nj, ni, nt, family, trial);
        let pt = random_point(&inst, &mut rng);
        for i in 0..ni {
            let dp = separate_dp(&inst, &pt, i);
            let best = (0..nt)
                .map(|l| separate_inspection(&inst, &pt, i, l).violation)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (dp.violation - best).abs() <= 1e-9,
                "trial {trial}: dp {} vs inspection {best}",
                dp.violation
            );
            for l in 0..nt {
                if nj * l > 12 {
                    continue;
                }
                let fast = separate_inspection(&inst, &pt, i, l);
                let oracle = enumerate_most_violated(&inst, &pt, i, l);
                assert!(
                    (fast.violation - oracle.violation).abs() <= 1e-9,
                    "trial {trial}, l {l}"
                );
            }
        }
    }
    println!("criterion 4 (DP = inspection = oracle on 500 points): PASS");
}

#[test]
fn criterion_5_cut_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut inst = generate_instance(2, 2, 5, Family::Original, 0);
    for trial in 0..10_000u64 {
        if trial % 20 == 0 {
            inst = generate_instance(2, 2, 5, Family::ALL[(trial / 20) as usize % 3], trial);
        }
        // Random feasible integral plan: random setups with period 0 open.
        let mut y: Vec<bool> = (0..10).map(|_| rng.random_bool(0.5)).collect();
        y[inst.yidx(0, 0)] = true;
        let plan = fix_y_optimal_x(&inst, &y).expect("period 0 open makes repair feasible");
        assert!(inst.validate(&plan, 1e-9).is_ok());
        // A cut separated at an unrelated random fractional point.
        let pt = random_point(&inst, &mut rng);
        let i = (trial % 2) as usize;
        let cut = if trial % 3 == 0 {
            let l: usize = rng.random_range(0..5);
            separate_windowed(&inst, &pt, i, l.saturating_sub(1), l)
        } else {
            separate_dp(&inst, &pt, i)
        };
        let plan_pt = FractionalPoint {
            xbar: plan.purchase.clone(),
            ybar: y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        };
        let rhs = inst.cumulative_demand(cut.item, 0, cut.l);
        assert!(
            cut_lhs(&inst, &plan_pt, &cut) >= rhs - 1e-9,
            "trial {trial}: cut violated by a feasible plan"
        );
    }
    println!("criterion 5 (cut validity on 10,000 plan/cut pairs): PASS");
}

#[test]
fn criterion_6_heuristic_containment() {
    let cfg = SolveConfig::heuristic();
    for (inst, family) in corpus() {
        let nt = inst.num_periods();
        let (fl_run, _) = solve_bnb(&inst, &build_fl(&inst), &cfg).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=nt {
            let (run, plan) = solve_mh(&inst, k, &cfg).unwrap();
            assert!(run.proven_optimal);
            assert!(
                run.ub <= prev + 1e-9,
                "{family:?} k {k}: {} > {prev}",
                run.ub
            );
            assert!(inst.validate(&plan, 1e-6).is_ok());
            prev = run.ub;
        }
        assert!(
            rel_close(prev, fl_run.ub, 1e-6),
            "MH(NT) {prev} vs FL {}",
            fl_run.ub
        );
    }
    println!("criterion 6 (MH containment and window monotonicity): PASS");
}

#[test]
fn criterion_7_ufl_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dims = [(1, 1), (2, 2), (3, 3), (2, 4), (4, 2), (3, 2), (2, 3), (1, 9), (9, 1)];
    for trial in 0..100 {
        let (nf, nc) = dims[trial % dims.len()];
        let open: Vec<f64> = (0..nf).map(|_| rng.random_range(1..50) as f64).collect();
        let serve: Vec<f64> = (0..nf * nc).map(|_| rng.random_range(1..30) as f64).collect();
        let u = UflInstance::new(nf, nc, open, serve).unwrap();
        let ufl_opt = brute_force_ufl(&u);
        let inst = ufl_to_miilspss(&u);
        let (opt, plan) = brute_force_opt(&inst);
        assert!(
            (opt - ufl_opt.cost).abs() <= 1e-9,
            "trial {trial}: lot-sizing {opt} vs UFL {}",
            ufl_opt.cost
        );
        let extracted = extract_ufl_solution(&u, &plan).expect("integral plan");
        assert!((extracted.cost - plan.cost).abs() <= 1e-9);
    }
    println!("criterion 7 (UFL reduction, 100 instances): PASS");
}

#[test]
fn criterion_8_mh_distributional_check() {
    let exact_cfg = SolveConfig::default();
    let heur_cfg = SolveConfig::heuristic();
    let mut gaps = Vec::new();
    for seed in 101..=115u64 {
        let inst = generate_instance(5, 5, 20, Family::Original, seed);
        let (pfl, _) = preprocess_fl(&inst);
        let (exact, _) = solve_bnb(&inst, &pfl, &exact_cfg).unwrap();
        assert!(exact.proven_optimal, "seed {seed} not proven optimal");
        let (mh, plan) = solve_mh(&inst, 10, &heur_cfg).unwrap();
        assert!(inst.validate(&plan, 1e-6).is_ok());
        assert!(mh.ub >= exact.ub - 1e-6 * exact.ub);
        gaps.push(100.0 * (mh.ub - exact.ub) / exact.ub);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    assert!(mean <= 0.5, "mean MH-10 gap {mean:.4}% exceeds 0.5%");
    println!("criterion 8 (MH-10 mean gap {mean:.4}% <= 0.5% on 15 fresh (5,5,20)): PASS");
}

#[test]
fn criterion_9_bound_ordering() {
    let cfg = SolveConfig::default();
    for (inst, family) in corpus() {
        let std_bound = lp_value(&build_std(&inst));
        let fl_bound = lp_value(&build_fl(&inst));
        let pfl_bound = lp_value(&preprocess_fl(&inst).0);
        let (bc, _) = solve_bc(&inst, &cfg).unwrap();
        let tol = 1e-6 * (1.0 + fl_bound.abs());
        assert!(
            std_bound <= bc.root_bound + tol,
            "{family:?}: LP(STD) {std_bound} > BC root {}",
            bc.root_bound
        );
        assert!(
            bc.root_bound <= fl_bound + tol,
            "{family:?}: BC root {} > LP(FL) {fl_bound}",
            bc.root_bound
        );
        assert!(
            rel_close(fl_bound, pfl_bound, 1e-6),
            "{family:?}: LP(FL) {fl_bound} vs LP(PFL) {pfl_bound}"
        );
    }
    println!("criterion 9 (bound chain LP(STD) <= BC root <= LP(FL) = LP(PFL)): PASS");
}
