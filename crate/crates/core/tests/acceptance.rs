//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transship_moo::evolve::{
    assign_fitness, dominates, nondominated, run_spea2, truncation_order, Individual, ObjectiveOrientation,
};
use transship_moo::experiment::{
    run_experiment, sample_landscape, ExperimentSpec, LandscapeDesign, ObjectiveKind, ObjectiveSubset, TransshipProblem,
};
use transship_moo::{
    brute_force_transshipment, estimate_decomposition, estimate_objectives, evaluate_scenario, sample_scenarios,
    solve_transshipment, BaseStock, Demand, Stock, System,
};

const LP_INSTANCES: usize = 1_000;
const LP_REL_TOL: f64 = 1e-9;
const LP_TIME_LIMIT: Duration = Duration::from_secs(10);
const LP_QUANTITY_MAX: f64 = 50.0;
const LP_PROFIT_MAX: f64 = 5.0;

const POOLING_CASES: usize = 1_000;

const DECOMPOSITION_TOL: f64 = 1e-9;

const NOISE_POOLS: usize = 200;
const NOISE_SMALL_N: usize = 1_000;
const NOISE_LARGE_N: usize = 4_000;
const NOISE_RATIO_TOL: f64 = 0.25;
const NOISE_TIME_LIMIT: Duration = Duration::from_secs(60);

const SYMMETRY_CASES: usize = 100;

const RANDOM_POPULATION: usize = 50;

const CF_FILL_HIGH: f64 = 0.88;
const CF_COST_LOW: f64 = 75.0;
const CF_MAX_FILL: f64 = 0.99;
const CF_COST_RATIO: f64 = 2.0;
const CF_TIME_LIMIT: Duration = Duration::from_secs(300);

const IDEAL_STOCK: f64 = 250.0;
const IDEAL_N: usize = 10_000;
const IDEAL_FILL: f64 = 0.999;
const IDEAL_LEAD: f64 = 1.0;

const S4_FILL_FLOOR: f64 = 0.95;

const LANDSCAPE_REL_TOL: f64 = 0.15;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table1() -> ExperimentSpec {
    ExperimentSpec::from_preset("table1").expect("table1 preset")
}

fn subset(text: &str) -> ObjectiveSubset {
    text.parse().expect("objective subset")
}

fn lp_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..LP_INSTANCES {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let surplus: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..LP_QUANTITY_MAX)).collect();
        let shortage: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..LP_QUANTITY_MAX)).collect();
        let profit = Array2::from_shape_fn((n, n), |_| rng.random_range(-LP_PROFIT_MAX..LP_PROFIT_MAX));
        let fast = solve_transshipment(&profit, &surplus, &shortage).map_err(|e| e.to_string())?;
        let slow = brute_force_transshipment(&profit, &surplus, &shortage).map_err(|e| e.to_string())?;
        let scale = slow.objective_value.abs().max(1.0);
        let rel = (fast.objective_value - slow.objective_value).abs() / scale;
        worst = worst.max(rel);
        ensure(rel <= LP_REL_TOL, || {
            format!(
                "case {case}: solver {} vs oracle {}",
                fast.objective_value, slow.objective_value
            )
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < LP_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{LP_INSTANCES} instances, worst relative error {worst:.1e}, {elapsed:.2?}"
    ))
}

fn complete_pooling() -> Result<String, String> {
    let spec = table1();
    let system = &spec.system;
    let profit = system.route_profit();
    ensure(profit[[0, 1]] > 0.0 && profit[[1, 0]] > 0.0, || {
        "routes not profitable".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut shipping = 0;
    for case in 0..POOLING_CASES {
        let stock = Stock::bounded(vec![rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)], 400.0)
            .map_err(|e| e.to_string())?;
        let demand =
            Demand::new(vec![rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)]).map_err(|e| e.to_string())?;
        let outcome = evaluate_scenario(system, &stock, &demand).map_err(|e| e.to_string())?;
        let surplus: f64 = (0..2).map(|i| (stock.0[i] - demand.0[i]).max(0.0)).sum();
        let shortage: f64 = (0..2).map(|i| (demand.0[i] - stock.0[i]).max(0.0)).sum();
        let shipped: f64 = outcome.plan.quantities.sum();
        if shipped > 0.0 {
            shipping += 1;
        }
        ensure(shipped == surplus.min(shortage), || {
            format!("case {case}: shipped {shipped}, surplus {surplus}, shortage {shortage}")
        })?;
    }
    Ok(format!("{POOLING_CASES} cases exact, {shipping} with shipments"))
}

fn newsvendor_decomposition() -> Result<String, String> {
    let spec = table1();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let pool = sample_scenarios(&spec.system, 500, seed).map_err(|e| e.to_string())?;
        let stock = BaseStock(vec![rng.random_range(0.0..400.0), rng.random_range(0.0..400.0)]);
        let est = estimate_objectives(&spec.system, &stock, &pool).map_err(|e| e.to_string())?;
        let (newsvendor, income) = estimate_decomposition(&spec.system, &stock, &pool).map_err(|e| e.to_string())?;
        let gap = (est.cost_mean - (newsvendor - income)).abs();
        worst = worst.max(gap);
        ensure(gap <= DECOMPOSITION_TOL, || format!("seed {seed}: gap {gap:e}"))?;
    }

    let loc = spec.system.locations[0].clone();
    let h_plus_p = loc.holding_cost + loc.shortage_cost;
    let tau = h_plus_p + 1.0;
    let pricey = System::new(
        vec![loc.clone(), loc],
        Array2::from_elem((2, 2), tau),
        spec.system.lead_time.clone(),
        None,
    )
    .map_err(|e| e.to_string())?;
    let pool = sample_scenarios(&pricey, 2_000, 3).map_err(|e| e.to_string())?;
    for levels in [[0.0, 200.0], [100.0, 100.0], [60.0, 140.0]] {
        let (_, income) =
            estimate_decomposition(&pricey, &BaseStock(levels.to_vec()), &pool).map_err(|e| e.to_string())?;
        ensure(income == 0.0, || {
            format!("income {income} at {levels:?} with tau {tau}")
        })?;
    }
    Ok(format!("worst gap {worst:.1e}; zero income with tau {tau} > h+p"))
}

fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn noise_scaling() -> Result<String, String> {
    let spec = table1();
    let stock = BaseStock(vec![100.0, 100.0]);
    let start = Instant::now();
    let spread = |n: usize, offset: u64| -> Result<f64, String> {
        let means = (0..NOISE_POOLS as u64)
            .map(|k| {
                let pool = sample_scenarios(&spec.system, n, offset + k).map_err(|e| e.to_string())?;
                estimate_objectives(&spec.system, &stock, &pool)
                    .map(|e| e.cost_mean)
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<f64>, String>>()?;
        Ok(std_dev(&means))
    };
    let small = spread(NOISE_SMALL_N, 10_000)?;
    let large = spread(NOISE_LARGE_N, 20_000)?;
    let elapsed = start.elapsed();
    let ratio = large / small;
    ensure((ratio - 0.5).abs() <= NOISE_RATIO_TOL * 0.5, || {
        format!("std {large:.4} at N={NOISE_LARGE_N} vs {small:.4} at N={NOISE_SMALL_N}, ratio {ratio:.3}")
    })?;
    ensure(elapsed < NOISE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("std ratio {ratio:.3} (target 0.5 +/- 25%), {elapsed:.2?}"))
}

fn symmetry() -> Result<String, String> {
    let spec = table1();
    let swapped_system = spec.system.permuted(&[1, 0]);
    ensure(swapped_system == spec.system, || {
        "table1 system is not symmetric".into()
    })?;
    let pool = sample_scenarios(&spec.system, 500, 99).map_err(|e| e.to_string())?;
    let swapped_pool = pool.permuted(&[1, 0]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..SYMMETRY_CASES {
        let a = rng.random_range(0.0..400.0);
        let b = rng.random_range(0.0..400.0);
        let lhs = estimate_objectives(&spec.system, &BaseStock(vec![a, b]), &pool).map_err(|e| e.to_string())?;
        let rhs =
            estimate_objectives(&spec.system, &BaseStock(vec![b, a]), &swapped_pool).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("case {case} at ({a}, {b}): {lhs:?} vs {rhs:?}"))?;
    }
    Ok(format!("{SYMMETRY_CASES} pairs identical"))
}

fn mutually_nondominated(points: &[Vec<f64>], orient: &ObjectiveOrientation) -> Result<bool, String> {
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            if i != j && dominates(a, b, orient).map_err(|e| e.to_string())? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn spea2_structure() -> Result<String, String> {
    let mut spec = table1();
    spec.objectives = subset("cost,fill");
    let orient = spec.objectives.orientation();

    let mut problem = TransshipProblem::new(&spec).map_err(|e| e.to_string())?;
    let first = run_spea2(&spec.spea, &mut problem).map_err(|e| e.to_string())?;
    let archive: Vec<Vec<f64>> = first.archive.iter().map(|i| i.objectives.clone()).collect();
    ensure(mutually_nondominated(&archive, &orient)?, || {
        "final archive has dominated members".into()
    })?;
    let front: Vec<Vec<f64>> = first.front.iter().map(|i| i.objectives.clone()).collect();
    ensure(mutually_nondominated(&front, &orient)?, || {
        "final front has dominated members".into()
    })?;
    for snap in &first.snapshots {
        ensure(snap.archive.len() <= spec.spea.archive_size, || {
            format!("generation {} archive holds {}", snap.generation, snap.archive.len())
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let two = ObjectiveOrientation::all_minimize(2);
    for trial in 0..20 {
        let mut pop: Vec<Individual<f64>> = (0..RANDOM_POPULATION)
            .map(|_| {
                // Integer-valued objectives force ties and duplicates.
                let objectives = if trial % 2 == 0 {
                    vec![rng.random_range(0..8) as f64, rng.random_range(0..8) as f64]
                } else {
                    vec![rng.random::<f64>(), rng.random::<f64>()]
                };
                Individual::new(BaseStock(vec![0.0]), objectives, ())
            })
            .collect();
        assign_fitness(&mut pop, &two, 7);
        let kept = nondominated(&pop, &two);
        for ind in &pop {
            let is_front = kept.iter().any(|k| k.objectives == ind.objectives);
            ensure(ind.is_nondominated() == is_front, || {
                format!(
                    "trial {trial}: {:?} fitness {} front {is_front}",
                    ind.objectives, ind.fitness
                )
            })?;
        }
    }

    let removed = truncation_order(&[vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]], 2);
    ensure(removed == vec![1], || {
        format!("collinear truncation removed {removed:?}")
    })?;

    let mut again = TransshipProblem::new(&spec).map_err(|e| e.to_string())?;
    let second = run_spea2(&spec.spea, &mut again).map_err(|e| e.to_string())?;
    ensure(first == second, || "reruns differ".into())?;
    let bits = |o: &transship_moo::evolve::SpeaOutcome<f64, _>| -> Vec<u64> {
        o.archive
            .iter()
            .flat_map(|i| i.objectives.iter().chain(&i.genome.0))
            .map(|v| v.to_bits())
            .collect()
    };
    ensure(bits(&first) == bits(&second), || "reruns differ bitwise".into())?;
    Ok(format!(
        "archive {} nondominated, {} generations within capacity, fitness rule on 20 populations",
        first.archive.len(),
        first.snapshots.len()
    ))
}

fn cost_fill_front() -> Result<String, String> {
    let mut spec = table1();
    spec.objectives = subset("cost,fill");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let result = pool.install(|| run_experiment(&spec)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let records = &result.front.records;
    ensure(!records.is_empty(), || "empty front".into())?;
    let (cost, fill) = (0, 1);
    let cheap_good = records
        .iter()
        .any(|r| r.values[fill] >= CF_FILL_HIGH && r.values[cost] <= CF_COST_LOW);
    ensure(cheap_good, || {
        format!("no point with fill >= {CF_FILL_HIGH} and cost <= {CF_COST_LOW}")
    })?;
    let min_cost = records.iter().map(|r| r.values[cost]).fold(f64::INFINITY, f64::min);
    let best_fill = records
        .iter()
        .max_by(|a, b| a.values[fill].total_cmp(&b.values[fill]))
        .expect("nonempty");
    ensure(best_fill.values[fill] >= CF_MAX_FILL, || {
        format!("max fill {}", best_fill.values[fill])
    })?;
    ensure(best_fill.values[cost] >= CF_COST_RATIO * min_cost, || {
        format!("max-fill cost {} vs min cost {min_cost}", best_fill.values[cost])
    })?;
    ensure(elapsed < CF_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} points, min cost {min_cost:.2}, max fill {:.4} at cost {:.2}, {elapsed:.2?} on one thread",
        records.len(),
        best_fill.values[fill],
        best_fill.values[cost]
    ))
}

fn fill_lead_ideal() -> Result<String, String> {
    let spec = table1();
    let pool = sample_scenarios(&spec.system, IDEAL_N, spec.scenario_seed).map_err(|e| e.to_string())?;
    let est = estimate_objectives(&spec.system, &BaseStock(vec![IDEAL_STOCK, IDEAL_STOCK]), &pool)
        .map_err(|e| e.to_string())?;
    ensure(est.fill_mean >= IDEAL_FILL, || format!("fill {}", est.fill_mean))?;
    ensure(est.lead_mean <= IDEAL_LEAD, || format!("lead {}", est.lead_mean))?;
    Ok(format!("fill {:.6}, lead {:.6}", est.fill_mean, est.lead_mean))
}

fn sensitivity() -> Result<String, String> {
    let run = |preset: &str, objectives: &str| -> Result<_, String> {
        let mut spec = ExperimentSpec::from_preset(preset).map_err(|e| e.to_string())?;
        spec.objectives = subset(objectives);
        run_experiment(&spec).map_err(|e| e.to_string())
    };
    let lead_width = |preset: &str| -> Result<f64, String> {
        let result = run(preset, "cost,lead")?;
        Ok(result.summary.extent(ObjectiveKind::Lead).expect("lead extent").width())
    };
    let s3 = lead_width("s3")?;
    let s4 = lead_width("s4")?;
    ensure(s3 > s4, || format!("lead extent s3 {s3} vs s4 {s4}"))?;
    let cf = run("s4", "cost,fill")?;
    let min_fill = cf.summary.extent(ObjectiveKind::Fill).expect("fill extent").min;
    ensure(min_fill >= S4_FILL_FLOOR, || {
        format!("s4 cost/fill front reaches fill {min_fill}")
    })?;
    Ok(format!("lead extent s3 {s3:.2} > s4 {s4:.2}; s4 fill >= {min_fill:.4}"))
}

fn landscape() -> Result<String, String> {
    let spec = table1();
    let rows = sample_landscape(&spec, LandscapeDesign::Grid { points_per_axis: 9 }).map_err(|e| e.to_string())?;
    let at = |a: f64, b: f64| {
        rows.iter()
            .find(|r| r.stock.0 == [a, b])
            .map(|r| r.estimate.cost_mean)
            .ok_or_else(|| format!("grid lacks ({a}, {b})"))
    };
    let rise = at(350.0, 350.0)? - at(300.0, 300.0)?;
    let expected: f64 = spec.system.locations.iter().map(|l| l.holding_cost * 50.0).sum();
    ensure((rise - expected).abs() <= LANDSCAPE_REL_TOL * expected, || {
        format!("cost rise {rise} vs {expected}")
    })?;
    Ok(format!("cost rise {rise:.4} vs linear {expected}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("LP oracle equivalence", lp_oracle),
        ("complete pooling", complete_pooling),
        ("newsvendor decomposition", newsvendor_decomposition),
        ("noise scaling", noise_scaling),
        ("symmetry", symmetry),
        ("SPEA2 structure", spea2_structure),
        ("cost/fill front", cost_fill_front),
        ("fill/lead ideal point", fill_lead_ideal),
        ("sensitivity ordering", sensitivity),
        ("landscape linear growth", landscape),
    ];
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (number, (name, check)) in criteria.iter().enumerate() {
        let number = number + 1;
        if !wanted.is_empty()
            && !wanted
                .iter()
                .any(|w| name.contains(w.as_str()) || *w == number.to_string())
        {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {number:>2} FAIL {name}: {detail}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
