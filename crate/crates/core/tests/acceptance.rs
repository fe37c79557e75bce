//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line on stderr
//! (bypassing the test harness capture) and then asserts its verdict.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vrpstw::encoding::{decode, is_permutation, random_chromosome, Chromosome};
use vrpstw::genetic::{obx, pmx, swap_mutation, uobx, GaConfig, GaState};
use vrpstw::harness::{self, instance_seed, run_one, run_seed, Campaign, GaOverrides, GenOverrides};
use vrpstw::instances::{generate, instance_from_str, instance_to_string, Distribution, GenParams};
use vrpstw::metrics::{build_reference, c_dist, d1, d2, spread_weights};
use vrpstw::model::{Instance, Objectives};
use vrpstw::molsd::{neighborhood_size, reversal_neighborhood, Molsd};
use vrpstw::pareto::{dominates, xi_counts, ArchiveEntry, Insertion};
use vrpstw::{Algorithm, InstanceSpec};

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {id:>2} {verdict} {name} ({:.1}s) {detail}\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn spec(s: &str) -> InstanceSpec {
    s.parse().unwrap()
}

fn instance(class: &str, seed: u64) -> Instance {
    let s = spec(class);
    let params = GenParams::for_distribution(s.alpha);
    generate(&s, &params, s.file_stem(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Brute-force dominance, written against the definition.
fn dominates_oracle(a: &Objectives, b: &Objectives) -> bool {
    let (a, b) = (a.values(), b.values());
    (0..4).all(|j| a[j] <= b[j]) && (0..4).any(|j| a[j] < b[j])
}

fn nondominated_oracle(vs: &[Objectives]) -> Vec<Objectives> {
    let mut out: Vec<Objectives> = Vec::new();
    for v in vs {
        if !vs.iter().any(|o| dominates_oracle(o, v)) && !out.contains(v) {
            out.push(*v);
        }
    }
    out
}

#[test]
fn criterion_01_xi_matches_pairwise_count() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    for trial in 0..1000 {
        let n = rng.random_range(1..=256);
        // Alternate coarse integer grids (many ties and repeats) with
        // continuous values.
        let coarse = trial % 2 == 0;
        let pop: Vec<Objectives> = (0..n)
            .map(|_| {
                Objectives(std::array::from_fn(|_| {
                    if coarse {
                        rng.random_range(0..4) as f64
                    } else {
                        rng.random_range(0.0..10.0)
                    }
                }))
            })
            .collect();
        let oracle: Vec<usize> = pop
            .iter()
            .map(|x| pop.iter().filter(|y| dominates_oracle(y, x)).count())
            .collect();
        if xi_counts(&pop) != oracle {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "xi counts equal the pairwise oracle",
        mismatches == 0 && elapsed < Duration::from_secs(10),
        elapsed,
        &format!("{mismatches} mismatching populations of 1000"),
    );
}

#[test]
fn criterion_02_operators_yield_permutations() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut invalid = 0;
    let mut clones_differ = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(5..=30);
        let a = random_chromosome(&mut rng, n);
        let b = random_chromosome(&mut rng, n);
        let crossovers = [pmx(&mut rng, &a, &b), obx(&mut rng, &a, &b), uobx(&mut rng, &a, &b)];
        for (c1, c2) in &crossovers {
            invalid += usize::from(!is_permutation(c1.genes())) + usize::from(!is_permutation(c2.genes()));
        }
        let m = swap_mutation(&mut rng, a.clone(), 1.0);
        invalid += usize::from(!is_permutation(m.genes()));
        let same = [pmx(&mut rng, &a, &a), obx(&mut rng, &a, &a), uobx(&mut rng, &a, &a)];
        clones_differ += same.iter().filter(|(c1, c2)| *c1 != a || *c2 != a).count();
    }
    let elapsed = start.elapsed();
    report(
        2,
        "crossover and mutation preserve permutations",
        invalid == 0 && clones_differ == 0 && elapsed < Duration::from_secs(30),
        elapsed,
        &format!("{invalid} invalid children, {clones_differ} identical-parent mismatches"),
    );
}

/// Route duration and load recomputed from coordinates.
fn route_ok(inst: &Instance, route: &[usize]) -> bool {
    let d = inst.depot();
    let pos = |id: usize| {
        if id == 0 {
            (d.x, d.y)
        } else {
            let c = &inst.customers()[id - 1];
            (c.x, c.y)
        }
    };
    let dist = |a: usize, b: usize| {
        let (p, q) = (pos(a), pos(b));
        (p.0 - q.0).hypot(p.1 - q.1)
    };
    let mut clock = d.horizon_start + dist(0, route[0]);
    let mut load = inst.customers()[route[0] - 1].demand;
    for w in route.windows(2) {
        clock = clock + inst.customers()[w[0] - 1].unload + dist(w[0], w[1]);
        load += inst.customers()[w[1] - 1].demand;
    }
    let last = *route.last().unwrap();
    let end = clock + inst.customers()[last - 1].unload + dist(last, 0);
    end <= d.horizon_end && load <= inst.capacity()
}

#[test]
fn criterion_03_decoder_partitions_feasibly() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut bad = 0;
    let mut routes_seen = 0;
    for _ in 0..1000 {
        let alpha = if rng.random::<bool>() { Distribution::Clustered } else { Distribution::Random };
        let s = InstanceSpec {
            alpha,
            beta: rng.random_range(1..=40),
            gamma: f64::from(rng.random_range(0..=20u32)) / 20.0,
            delta: f64::from(rng.random_range(0..=120u32)),
        };
        let mut params = GenParams::for_distribution(alpha);
        params.capacity = f64::from(rng.random_range(40..=200u32));
        let inst = generate(&s, &params, "c3", &mut rng).unwrap();
        let chromosome = random_chromosome(&mut rng, s.beta);
        let sol = decode(&inst, &chromosome).unwrap();
        let mut seen = vec![false; s.beta + 1];
        let mut partition = true;
        for &c in sol.routes.iter().flatten() {
            partition &= (1..=s.beta).contains(&c) && !std::mem::replace(&mut seen[c], true);
        }
        partition &= seen[1..].iter().all(|&x| x);
        let feasible = sol.routes.iter().all(|r| !r.is_empty() && route_ok(&inst, r));
        bad += usize::from(!(partition && feasible));
        routes_seen += sol.routes.len();
    }
    let elapsed = start.elapsed();
    report(
        3,
        "decoded routes partition the customers and respect duration and capacity",
        bad == 0 && elapsed < Duration::from_secs(30),
        elapsed,
        &format!("{bad} bad decodes of 1000, {routes_seen} routes checked"),
    );
}

#[test]
fn criterion_04_neighborhood_cardinality() {
    let start = Instant::now();
    let count = |n: usize| {
        let c = Chromosome::identity(n);
        let all: HashSet<Chromosome> = reversal_neighborhood(&c).collect();
        (reversal_neighborhood(&c).count(), all.len())
    };
    let (n20, d20) = count(20);
    let (n30, d30) = count(30);
    let ratio = n30 as f64 / n20 as f64;
    let pass = (n20, d20, n30, d30) == (190, 190, 435, 435)
        && neighborhood_size(20) == 190
        && neighborhood_size(30) == 435
        && format!("{ratio:.2}") == "2.29";
    report(
        4,
        "reversal neighborhood sizes",
        pass,
        start.elapsed(),
        &format!("N=20: {n20} ({d20} distinct), N=30: {n30} ({d30} distinct), ratio {ratio:.4}"),
    );
}

#[test]
fn criterion_05_metric_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut failures = Vec::new();
    let random_front = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Objectives> {
        (0..n)
            .map(|_| Objectives(std::array::from_fn(|_| rng.random_range(0..20) as f64)))
            .collect()
    };
    for _ in 0..1000 {
        let na = rng.random_range(1..30);
        let nr = rng.random_range(1..30);
        let a = random_front(&mut rng, na);
        let r = random_front(&mut rng, nr);
        let s = build_reference(&[&r]).unwrap();
        if d1(&s, &s).unwrap() != 0.0 || d2(&s, &s).unwrap() != 0.0 {
            failures.push("d(S,S) != 0");
        }
        if d1(&a, &r).unwrap() > d2(&a, &r).unwrap() {
            failures.push("d1 > d2");
        }
        let w = spread_weights(&r).unwrap();
        for x in &a {
            for y in &r {
                if dominates(x, y) && c_dist(x, y, &w) != 0.0 {
                    failures.push("c(x,y) != 0 under dominance");
                }
            }
        }
    }
    // Five-point fixtures against a self-contained double loop.
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a: Vec<Objectives> = (0..5)
            .map(|_| Objectives(std::array::from_fn(|_| rng.random_range(0.0..100.0))))
            .collect();
        let r: Vec<Objectives> = (0..5)
            .map(|_| Objectives(std::array::from_fn(|_| rng.random_range(0.0..100.0))))
            .collect();
        let mut w = [0.0; 4];
        for (j, wj) in w.iter_mut().enumerate() {
            let hi = r.iter().map(|v| v.0[j]).fold(f64::MIN, f64::max);
            let lo = r.iter().map(|v| v.0[j]).fold(f64::MAX, f64::min);
            *wj = if hi > lo { 1.0 / (hi - lo) } else { 0.0 };
        }
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        for y in &r {
            let mut best = f64::INFINITY;
            for x in &a {
                let mut c: f64 = 0.0;
                for j in 0..4 {
                    c = c.max(w[j] * (x.0[j] - y.0[j]));
                }
                best = best.min(c);
            }
            sum += best;
            max = max.max(best);
        }
        worst = worst
            .max((d1(&a, &r).unwrap() - sum / 5.0).abs())
            .max((d2(&a, &r).unwrap() - max).abs());
    }
    if worst > 1e-12 {
        failures.push("fixture deviation above 1e-12");
    }
    report(
        5,
        "metric identities and double-loop agreement",
        failures.is_empty(),
        start.elapsed(),
        &format!("{} violations, max fixture deviation {worst:e}", failures.len()),
    );
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let g = rest.remove(k);
            prefix.push(g);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(k, g);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

#[test]
fn criterion_06_exhaustive_small_instance() {
    let start = Instant::now();
    let inst = instance("R;7;1.00;30", 606);
    let perms = all_permutations(7);
    assert_eq!(perms.len(), 5040);
    let vectors: Vec<Objectives> = perms
        .iter()
        .map(|p| decode(&inst, &Chromosome::new(p.clone()).unwrap()).unwrap().objectives)
        .collect();
    let front = nondominated_oracle(&vectors);
    let n_front = front.len();

    // (a) Local optimality of the local-search archive.
    let mut not_local = 0;
    let mut members = 0;
    for seed in 0..5 {
        let mut m = Molsd::new(&inst, seed).unwrap();
        m.run_to_end().unwrap();
        let archive = m.archive();
        for e in archive.entries() {
            members += 1;
            for nb in reversal_neighborhood(&e.chromosome) {
                let sol = decode(&inst, &nb).unwrap();
                let mut probe = archive.clone();
                let dominated_member = dominates(&sol.objectives, e.objectives());
                let accepted = matches!(
                    probe.insert(ArchiveEntry::new(nb, sol)),
                    Insertion::Accepted { .. }
                );
                not_local += usize::from(dominated_member || accepted);
            }
        }
    }

    // (b) The GA recovers the whole front.
    let mut hits = 0;
    let mut outside = 0;
    for seed in 0..20 {
        let cfg = GaConfig {
            pop_size: 50,
            stagnation_limit: 1000,
            ..GaConfig::for_algorithm(Algorithm::UobxSwap, 6000 + seed).unwrap()
        };
        let mut ga = GaState::new(&inst, cfg).unwrap();
        ga.run_to_end().unwrap();
        let found = ga.archive().objectives();
        outside += found.iter().filter(|v| !front.contains(v)).count();
        if d1(&found, &front).unwrap() == 0.0 {
            hits += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        6,
        "exhaustive N=7 oracle",
        not_local == 0 && hits >= 16 && elapsed < Duration::from_secs(300),
        elapsed,
        &format!(
            "front {n_front} vectors; local search: {members} members, {not_local} improvable; \
             GA: d1 = 0 in {hits}/20 runs, {outside} archived vectors off the front"
        ),
    );
}

const C_FAMILY: [&str; 4] = ["C;20;1.00;60", "C;20;0.30;60", "C;20;1.00;240", "C;20;1.00;360"];
const R_FAMILY: [&str; 4] = ["R;20;1.00;10", "R;20;0.30;10", "R;20;1.00;30", "R;20;1.00;95"];

#[test]
fn criterion_07_trend_reproduction() {
    let start = Instant::now();
    let base_seed = 7;
    let overrides = GaOverrides::default();
    let mut records = Vec::new();
    for class in C_FAMILY.iter().chain(&R_FAMILY) {
        let s = spec(class);
        let params = GenParams::for_distribution(s.alpha);
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(base_seed, &s));
        let inst = generate(&s, &params, s.file_stem(), &mut rng).unwrap();
        for algo in Algorithm::ALL {
            for index in 0..10 {
                let seed = run_seed(base_seed, inst.name(), algo, index);
                records.push(run_one(&inst, algo, seed, &overrides));
            }
        }
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    let rows = harness::score_table(&records).unwrap();
    let winner = |class: &str| {
        let stem = spec(class).file_stem();
        rows.iter()
            .filter(|r| r.instance == stem && r.best_d1_flag)
            .map(|r| r.algorithm)
            .collect::<Vec<_>>()
    };
    let mut table = String::new();
    for r in &rows {
        table.push_str(&format!(
            "    {:<14} {:<9} d1 {:.4} d2 {:.4} evals {:>9.0}{}\n",
            r.instance,
            r.algorithm.name(),
            r.mean_d1.unwrap_or(f64::NAN),
            r.mean_d2.unwrap_or(f64::NAN),
            r.mean_evaluations.unwrap_or(f64::NAN),
            if r.best_d1_flag { " *" } else { "" }
        ));
    }
    let _ = std::io::stderr().write_all(table.as_bytes());
    let c_wins = C_FAMILY.iter().filter(|c| winner(c).contains(&Algorithm::Molsd)).count();
    let r_wins = R_FAMILY.iter().filter(|c| winner(c).contains(&Algorithm::UobxSwap)).count();
    let winners: Vec<String> = C_FAMILY
        .iter()
        .chain(&R_FAMILY)
        .map(|c| format!("{c}={}", winner(c).iter().map(|a| a.name()).collect::<Vec<_>>().join("/")))
        .collect();
    let elapsed = start.elapsed();
    let pass = failed == 0
        && 3 * c_wins >= 2 * C_FAMILY.len()
        && 3 * r_wins >= 2 * R_FAMILY.len()
        && elapsed < Duration::from_secs(1800);
    report(
        7,
        "trend reproduction",
        pass,
        elapsed,
        &format!(
            "MOLSD best on {c_wins}/4 C instances, UOBX^2EX best on {r_wins}/4 R instances; \
             winners {}",
            winners.join(" ")
        ),
    );
}

#[test]
fn criterion_08_local_search_throughput() {
    let mut evaluations = 0;
    let mut seconds = 0.0;
    for (k, class) in ["R;20;1.00;10", "C;20;1.00;60", "R;30;1.00;30"].iter().enumerate() {
        let inst = instance(class, 800 + k as u64);
        let start = Instant::now();
        let mut m = Molsd::new(&inst, k as u64).unwrap();
        m.run_to_end().unwrap();
        seconds += start.elapsed().as_secs_f64();
        evaluations += m.evaluations();
    }
    let rate = evaluations as f64 / seconds;
    report(
        8,
        "local search throughput",
        rate >= 1385.0,
        Duration::from_secs_f64(seconds),
        &format!("{evaluations} evaluations, {rate:.0} per second"),
    );
}

fn stripped_records(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let text = fs::read_to_string(e.path()).unwrap();
            let kept: String = text
                .lines()
                .filter(|l| !l.trim_start().starts_with("\"wall_time\""))
                .map(|l| format!("{l}\n"))
                .collect();
            (e.file_name().into_string().unwrap(), kept.into_bytes())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn criterion_09_runs_are_deterministic() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let specs = [spec("R;15;1.00;10"), spec("C;15;0.70;60")];
    let instances = harness::cmd_generate(&specs, 9, &GenOverrides::default(), &dir.path().join("inst")).unwrap();
    let campaign = |out: &str| Campaign {
        instances: instances.clone(),
        algorithms: Algorithm::ALL.to_vec(),
        runs: 3,
        base_seed: 99,
        out: dir.path().join(out),
        overrides: GaOverrides {
            pop_size: Some(60),
            p_mut: None,
            stagnation: Some(800),
        },
    };
    harness::cmd_run(&campaign("first")).unwrap();
    // Same campaign on a wider thread pool: scheduling must not matter.
    rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| harness::cmd_run(&campaign("second")))
        .unwrap();
    let a = stripped_records(&dir.path().join("first"));
    let b = stripped_records(&dir.path().join("second"));
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    report(
        9,
        "repeated campaigns give byte-identical records",
        a.len() == 30 && a.len() == b.len() && differing == 0,
        start.elapsed(),
        &format!("{} records, {differing} differ", a.len()),
    );
}

#[test]
fn criterion_10_round_trips() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut bad_instances = 0;
    let mut bad_specs = 0;
    let mut classes: Vec<&str> = vrpstw::instances::STUDY_CLASSES.to_vec();
    classes.shuffle(&mut rng);
    for k in 0..100 {
        let s = if k < 40 {
            spec(classes[k])
        } else {
            let alpha = if rng.random::<bool>() { Distribution::Clustered } else { Distribution::Random };
            InstanceSpec {
                alpha,
                beta: rng.random_range(1..=50),
                gamma: f64::from(rng.random_range(0..=100u32)) / 100.0,
                delta: f64::from(rng.random_range(0..=200u32)),
            }
        };
        let text = s.to_string();
        bad_specs += usize::from(spec(&text).to_string() != text || spec(&text) != s);
        let params = GenParams::for_distribution(s.alpha);
        let inst = generate(&s, &params, s.file_stem(), &mut rng).unwrap();
        let written = instance_to_string(&inst);
        let back = instance_from_str(&written).unwrap();
        bad_instances += usize::from(instance_to_string(&back) != written || back != inst);
    }
    report(
        10,
        "instance and class string round trips",
        bad_instances == 0 && bad_specs == 0,
        start.elapsed(),
        &format!("{bad_instances} instance and {bad_specs} class mismatches of 100"),
    );
}
