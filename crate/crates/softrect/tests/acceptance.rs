//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p softrect --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::cell::Cell;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use softrect::clws::{
    check_instance_concavity, solve_clws_fast, solve_clws_quadratic, solve_peri_sum,
};
use softrect::domain::{
    evaluate, peri_sum_of_partition, realize, swap_delta, Instance, ObjectiveKind,
    ObjectiveValue, Partition,
};
use softrect::exact::{
    aspect_intervals, brute_force, feasibility_decision, solve_aspect_binary_search,
    solve_aspect_exact_bb, solve_peri_max_bb, SearchStatus, SetPartitions,
    BINARY_SEARCH_GAP, DEFAULT_FEASIBILITY_TOLERANCE,
};
use softrect::instances::{
    generate, reduce_2partition_to_aspect, reduce_2partition_to_perimax, solve_2partition_dp,
    GeneratorConfig, InstanceClass, TwoPartitionInstance,
};
use softrect::mip::{
    build_aspect_decision_model, build_aspect_reform_model, build_peri_max_model, check_solution,
    emit_lp, encode_partition, LayerOrder, ModelKind, DEFAULT_CHECK_TOLERANCE,
};
use softrect::scalar::{rat, rat_int, rational_to_f64, Rational};

fn random_instance(rng: &mut ChaCha8Rng, class: InstanceClass, max_n: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    generate(&GeneratorConfig {
        class,
        n,
        seed: rng.random(),
    })
    .expect("generation succeeds")
}

/// Runs one criterion body and prints its pass/fail line; failures
/// still fail the test.
fn criterion<F>(id: u32, run: F)
where
    F: FnOnce() -> String + std::panic::UnwindSafe,
{
    match std::panic::catch_unwind(run) {
        Ok(detail) => println!("[criterion {id}] PASS - {detail}"),
        Err(cause) => {
            println!("[criterion {id}] FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

fn exact(value: &ObjectiveValue) -> &Rational {
    value.as_exact().expect("ratio objectives are rational")
}

fn exact_of(instance: &Instance, partition: &Partition, kind: ObjectiveKind) -> Rational {
    let layout = realize(instance, partition).expect("valid partition");
    exact(&evaluate(&layout, kind)).clone()
}

#[test]
fn acceptance_01_peri_sum_matches_brute_force() {
    criterion(1, || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut checked = 0;
        for class in InstanceClass::ALL {
            for _ in 0..500 {
                let inst = random_instance(&mut rng, class, 9);
                let (partition, value) = solve_peri_sum(&inst).unwrap();
                let (_, oracle) = brute_force(&inst, ObjectiveKind::PeriSum).unwrap();
                assert_eq!(
                    ObjectiveValue::Exact(value.clone()),
                    oracle,
                    "{:?}",
                    inst.name()
                );
                // The reported value is also the partition's true value.
                assert_eq!(exact_of(&inst, &partition, ObjectiveKind::PeriSum), value);
                checked += 1;
            }
        }
        format!("total-perimeter solver exact on {checked} instances (3 classes, n <= 9)")
    });
}

#[test]
fn acceptance_02_clws_fast_agrees_with_quadratic() {
    criterion(2, acceptance_02_body);
}

fn acceptance_02_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut cases = 0;
    let mut max_n = 0;
    while cases < 2000 {
        let n = match cases % 200 {
            0 if cases == 1800 => 2000,
            0 if cases >= 1000 => rng.random_range(1000..=2000),
            r if r < 160 => rng.random_range(1..=64),
            _ => rng.random_range(65..=512),
        };
        max_n = max_n.max(n);
        let synthetic = rng.random_bool(0.5);
        let (quad, fast, calls) = if synthetic {
            // s (j-i)^2 + u_i + v_j is concave for s >= 0, with full tie
            // plateaus at s = 0.
            let s = rng.random_range(0..=3i64) as i128;
            let u: Vec<i128> = (0..=n).map(|_| rng.random_range(-1000..=1000)).collect();
            let v: Vec<i128> = (0..=n).map(|_| rng.random_range(-1000..=1000)).collect();
            let w = |i: usize, j: usize| {
                let len = (j - i) as i128;
                s * len * len + u[i] + v[j]
            };
            let quad = solve_clws_quadratic(n, w).unwrap();
            let calls = Cell::new(0usize);
            let fast = solve_clws_fast(n, |i, j| {
                calls.set(calls.get() + 1);
                w(i, j)
            })
            .unwrap();
            (quad, fast, calls.get())
        } else {
            // The real weight function on scaled integers.
            let mut areas: Vec<i128> = (0..n).map(|_| rng.random_range(1..=200)).collect();
            areas.sort_unstable();
            let mut prefix = vec![0i128];
            for a in &areas {
                prefix.push(prefix.last().unwrap() + a);
            }
            let l1 = rng.random_range(1..=100i128);
            let w = |i: usize, j: usize| 2 * (l1 * l1 + (j - i) as i128 * (prefix[j] - prefix[i]));
            let quad = solve_clws_quadratic(n, w).unwrap();
            let calls = Cell::new(0usize);
            let fast = solve_clws_fast(n, |i, j| {
                calls.set(calls.get() + 1);
                w(i, j)
            })
            .unwrap();
            (quad, fast, calls.get())
        };
        assert_eq!(quad.1, fast.1, "values at n = {n}");
        assert_eq!(quad.0, fast.0, "breakpoints at n = {n}");
        // Documented bound: calls <= 2 n (log2 n + 4), i.e. c = 4 times
        // n log2 n once n >= 16.
        let bound = 2.0 * n as f64 * ((n as f64).log2().max(0.0) + 4.0);
        assert!(
            (calls as f64) <= bound,
            "n = {n}: {calls} weight calls exceed {bound}"
        );
        cases += 1;
    }
    format!("fast and quadratic solvers identical on {cases} concave instances (largest n = {max_n})")
}

#[test]
fn acceptance_03_peri_sum_scales_to_a_million() {
    criterion(3, acceptance_03_body);
}

fn acceptance_03_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let n = 1_000_000usize;
    let mut areas: Vec<i64> = (0..n).map(|_| rng.random_range(1..=200)).collect();
    areas.sort_unstable();
    let total: i64 = areas.iter().sum();
    let l1 = 1000i64;
    let inst = Instance::new(
        rat_int(l1),
        rat_int(total) / rat_int(l1),
        areas.iter().map(|&a| rat_int(a)).collect(),
    )
    .unwrap();

    let started = Instant::now();
    let (partition, value) = solve_peri_sum(&inst).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    // Consistency: the reported optimum is the partition's exact value.
    assert_eq!(peri_sum_of_partition(&inst, &partition).unwrap(), value);
    assert!(
        elapsed < 5.0,
        "solved n = 10^6 in {elapsed:.2}s, budget is 5s"
    );
    format!(
        "n = 10^6 sorted instance solved exactly in {elapsed:.2}s (< 5s), {} layers",
        partition.layer_count()
    )
}

#[test]
fn acceptance_04_swap_delta_matches_reevaluation() {
    criterion(4, acceptance_04_body);
}

fn acceptance_04_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut swaps = 0;
    while swaps < 10_000 {
        let inst = random_instance(&mut rng, InstanceClass::Uniform, 8);
        let n = inst.len();
        if n < 2 {
            continue;
        }
        // Random assignment with at least two layers.
        let layers = rng.random_range(2..=n);
        let mut codes: Vec<usize> = (0..n).map(|_| rng.random_range(0..layers)).collect();
        for k in 0..layers {
            if !codes.contains(&k) {
                let slot = rng.random_range(0..n);
                codes[slot] = k;
            }
        }
        let mut groups = vec![Vec::new(); layers];
        for (i, &k) in codes.iter().enumerate() {
            groups[k].push(i);
        }
        groups.retain(|g| !g.is_empty());
        if groups.len() < 2 {
            continue;
        }
        let partition = Partition::new(groups);
        let owner = partition.layer_of(n).unwrap();
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if owner[i] == owner[j] {
            continue;
        }

        let delta = swap_delta(&inst, &partition, i, j).unwrap();
        let mut swapped = partition.layers().to_vec();
        swapped[owner[i]].retain(|&r| r != i);
        swapped[owner[i]].push(j);
        swapped[owner[j]].retain(|&r| r != j);
        swapped[owner[j]].push(i);
        let swapped = Partition::new(swapped);
        let before = peri_sum_of_partition(&inst, &partition).unwrap();
        let after = peri_sum_of_partition(&inst, &swapped).unwrap();
        let diff = after - before;
        assert_eq!(diff, delta, "swap delta must match the re-evaluation");

        // Sign trichotomy on the independently re-evaluated difference:
        // with a_i > a_j, a bigger layer for i means the swap improves.
        let size_i = partition.layers()[owner[i]].len() as i64;
        let size_j = partition.layers()[owner[j]].len() as i64;
        let area_cmp = inst.areas()[j].cmp(&inst.areas()[i]);
        let expected = match (size_i - size_j).signum() {
            0 => std::cmp::Ordering::Equal,
            1 => area_cmp,
            _ => area_cmp.reverse(),
        };
        assert_eq!(diff.cmp(&rat_int(0)), expected, "sign trichotomy");
        swaps += 1;
    }
    format!("{swaps} random cross-layer swaps match the exchange formula exactly")
}

#[test]
fn acceptance_05_weight_function_is_strictly_concave() {
    criterion(5, || {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        for run in 0..100 {
            let class = InstanceClass::ALL[run % 3];
            let n = rng.random_range(4..=30);
            let inst = generate(&GeneratorConfig {
                class,
                n,
                seed: rng.random(),
            })
            .unwrap();
            let report = check_instance_concavity(&inst, 10_000, rng.random()).unwrap();
            assert!(
                report.passed(),
                "concavity violated on {:?} at {:?}",
                inst.name(),
                report.counterexample
            );
        }
        "strict quadrangle inequality held for 100 instances x 10^4 quadruples".to_string()
    });
}

#[test]
fn acceptance_06_exact_solvers_match_brute_force() {
    criterion(6, acceptance_06_body);
}

fn acceptance_06_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut checked = 0;
    for class in InstanceClass::ALL {
        for _ in 0..100 {
            let inst = random_instance(&mut rng, class, 9);

            let (_, oracle_pm) = brute_force(&inst, ObjectiveKind::PeriMax).unwrap();
            let (p, stats) = solve_peri_max_bb(&inst, None, None).unwrap();
            assert_eq!(stats.status, SearchStatus::Optimal);
            assert_eq!(
                exact_of(&inst, &p, ObjectiveKind::PeriMax),
                *exact(&oracle_pm),
                "largest perimeter on {:?}",
                inst.name()
            );

            let (_, oracle_ar) = brute_force(&inst, ObjectiveKind::AspectRatio).unwrap();
            let (p, stats) = solve_aspect_exact_bb(&inst, None).unwrap();
            assert_eq!(stats.status, SearchStatus::Optimal);
            assert_eq!(
                exact_of(&inst, &p, ObjectiveKind::AspectRatio),
                *exact(&oracle_ar),
                "aspect ratio on {:?}",
                inst.name()
            );

            let outcome = solve_aspect_binary_search(&inst, None).unwrap();
            let gap = &outcome.value - exact(&oracle_ar);
            assert!(gap >= rat_int(0), "never below the optimum");
            assert!(
                rational_to_f64(&gap) <= BINARY_SEARCH_GAP + 1e-9,
                "bisection gap {} on {:?}",
                rational_to_f64(&gap),
                inst.name()
            );
            checked += 1;
        }
    }
    format!("branch-and-bound exact and bisection within 0.01 on {checked} instances (n <= 9)")
}

#[test]
fn acceptance_07_hardness_reductions_agree_with_subset_sum() {
    criterion(7, acceptance_07_body);
}

fn acceptance_07_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut yes = 0;
    let mut no = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let values: Vec<u64> = (0..n).map(|_| rng.random_range(1..=12)).collect();
        let tp = TwoPartitionInstance::new(values.clone()).unwrap();
        let splittable = solve_2partition_dp(&tp).unwrap();

        // Largest-perimeter side, at threshold 4 c_max.
        let (inst, threshold) = reduce_2partition_to_perimax(&tp);
        let (p, stats) = solve_peri_max_bb(&inst, None, None).unwrap();
        assert_eq!(stats.status, SearchStatus::Optimal);
        let optimum = exact_of(&inst, &p, ObjectiveKind::PeriMax);
        assert_eq!(
            optimum <= threshold,
            splittable,
            "perimeter reduction on {values:?}"
        );

        // Aspect side, at threshold M.
        let (inst, m) = reduce_2partition_to_aspect(&tp);
        let intervals = aspect_intervals(&inst, rational_to_f64(&m)).unwrap();
        let feasible = feasibility_decision(&inst, &intervals, DEFAULT_FEASIBILITY_TOLERANCE)
            .unwrap()
            .is_feasible();
        assert_eq!(feasible, splittable, "aspect reduction on {values:?}");

        if splittable {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 0 && no > 0, "both answers must be exercised");
    format!("200 reduction round-trips agree with the subset-sum oracle ({yes} yes / {no} no)")
}

#[test]
fn acceptance_08_aspect_and_deviation_objectives_coincide() {
    criterion(8, acceptance_08_body);
}

fn acceptance_08_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, InstanceClass::MixedUniform, 8);
        let (p4, _) = brute_force(&inst, ObjectiveKind::AspectSurrogate).unwrap();
        let (_, best3) = brute_force(&inst, ObjectiveKind::AspectRatio).unwrap();
        assert_eq!(
            exact_of(&inst, &p4, ObjectiveKind::AspectRatio),
            *exact(&best3),
            "deviation minimizer must also minimize the aspect ratio on {:?}",
            inst.name()
        );
    }

    // Pairwise ordering equivalence, compared in squared rational form.
    let mut pairs = 0;
    while pairs < 100_000 {
        let l_i = rat(rng.random_range(1..=100), rng.random_range(1..=20));
        let h_i = rat(rng.random_range(1..=100), rng.random_range(1..=20));
        let l_j = rat(rng.random_range(1..=100), rng.random_range(1..=20));
        let h_j = rat(rng.random_range(1..=100), rng.random_range(1..=20));
        let aspect = |l: &Rational, h: &Rational| {
            let a = l / h;
            let b = h / l;
            a.max(b)
        };
        let dev_sq = |l: &Rational, h: &Rational| {
            let d = l - h;
            &d * &d / (l * h)
        };
        let aspect_order = aspect(&l_i, &h_i).cmp(&aspect(&l_j, &h_j));
        let dev_order = dev_sq(&l_i, &h_i).cmp(&dev_sq(&l_j, &h_j));
        assert_eq!(aspect_order, dev_order, "{l_i} x {h_i} vs {l_j} x {h_j}");
        pairs += 1;
    }
    "deviation and aspect objectives share minimizers (200 instances) and orderings (10^5 pairs)"
        .to_string()
}

#[test]
fn acceptance_09_mip_models_are_faithful() {
    criterion(9, acceptance_09_body);
}

fn acceptance_09_body() -> String {
    // Pinned structure at n = 3 with symmetry cuts.
    let micro = Instance::from_integers(2, 2, &[1, 1, 2])
        .unwrap()
        .with_name("micro");
    let model = build_peri_max_model(&micro, true).unwrap();
    assert_eq!(model.variables().len(), 22, "9 x + 9 w + 3 y + phi");
    assert_eq!(model.constraints().len(), 86);

    // Byte-deterministic emission that passes an independent LP-format
    // structural validation.
    let text = emit_lp(&model);
    assert_eq!(text, emit_lp(&build_peri_max_model(&micro, true).unwrap()));
    validate_lp(&text);
    validate_lp(&emit_lp(&build_aspect_reform_model(&micro).unwrap()));
    validate_lp(&emit_lp(&build_aspect_decision_model(&micro, 2.0).unwrap()));

    // Encoded known optima satisfy all three models.
    let (opt2, _) = brute_force(&micro, ObjectiveKind::PeriMax).unwrap();
    let (opt3, best3) = brute_force(&micro, ObjectiveKind::AspectRatio).unwrap();
    let phi3 = rational_to_f64(exact(&best3));
    for (kind, partition, model) in [
        (
            ModelKind::PeriMax,
            &opt2,
            build_peri_max_model(&micro, false).unwrap(),
        ),
        (
            ModelKind::AspectReform,
            &opt3,
            build_aspect_reform_model(&micro).unwrap(),
        ),
        (
            ModelKind::AspectDecision,
            &opt3,
            build_aspect_decision_model(&micro, phi3).unwrap(),
        ),
    ] {
        let enc = encode_partition(&micro, partition, kind, LayerOrder::Canonical).unwrap();
        let violations = check_solution(&model, &enc, DEFAULT_CHECK_TOLERANCE).unwrap();
        assert!(violations.is_empty(), "{kind}: {violations:?}");
    }

    // Round-trip soundness on random partitions of random instances.
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, InstanceClass::Uniform, 8);
        let n = inst.len();
        let mut codes: Vec<usize> = Vec::with_capacity(n);
        let mut used = 0usize;
        for _ in 0..n {
            let pick = rng.random_range(0..=used.min(n - 1));
            if pick == used {
                used += 1;
            }
            codes.push(pick);
        }
        let mut layers = vec![Vec::new(); used.max(1)];
        for (i, &k) in codes.iter().enumerate() {
            layers[k].push(i);
        }
        layers.retain(|l| !l.is_empty());
        let partition = Partition::new(layers);
        let phi3 = exact_of(&inst, &partition, ObjectiveKind::AspectRatio);

        let pm = build_peri_max_model(&inst, false).unwrap();
        let enc = encode_partition(&inst, &partition, ModelKind::PeriMax, LayerOrder::Canonical)
            .unwrap();
        assert!(check_solution(&pm, &enc, DEFAULT_CHECK_TOLERANCE).unwrap().is_empty());

        let re = build_aspect_reform_model(&inst).unwrap();
        let enc =
            encode_partition(&inst, &partition, ModelKind::AspectReform, LayerOrder::Canonical)
                .unwrap();
        assert!(check_solution(&re, &enc, DEFAULT_CHECK_TOLERANCE).unwrap().is_empty());

        let dm = build_aspect_decision_model(&inst, rational_to_f64(&phi3).max(1.0)).unwrap();
        let enc = encode_partition(
            &inst,
            &partition,
            ModelKind::AspectDecision,
            LayerOrder::Canonical,
        )
        .unwrap();
        assert!(check_solution(&dm, &enc, DEFAULT_CHECK_TOLERANCE).unwrap().is_empty());
    }

    // Decision-model satisfiability over encoded partitions matches the
    // interval feasibility procedure, probed at midpoints between
    // adjacent attainable aspect values.
    let mut agreements = 0;
    for _ in 0..25 {
        let inst = random_instance(&mut rng, InstanceClass::MixedNormal, 7);
        let mut values: Vec<Rational> = Vec::new();
        let mut iter = SetPartitions::new(inst.len());
        while iter.advance() {
            values.push(exact_of(
                &inst,
                &iter.to_partition(),
                ObjectiveKind::AspectRatio,
            ));
        }
        values.sort();
        values.dedup();
        let mut probes: Vec<f64> = Vec::new();
        let lowest = rational_to_f64(&values[0]);
        if lowest > 1.05 {
            probes.push((1.0 + lowest) / 2.0);
        }
        for pair in values.windows(2).take(3) {
            let lo = rational_to_f64(&pair[0]);
            let hi = rational_to_f64(&pair[1]);
            if hi - lo > 1e-4 {
                probes.push((lo + hi) / 2.0);
            }
        }
        probes.push(rational_to_f64(values.last().unwrap()) + 0.5);
        for phi in probes {
            let model = build_aspect_decision_model(&inst, phi).unwrap();
            let mut satisfiable = false;
            let mut iter = SetPartitions::new(inst.len());
            while iter.advance() {
                let enc = encode_partition(
                    &inst,
                    &iter.to_partition(),
                    ModelKind::AspectDecision,
                    LayerOrder::Canonical,
                )
                .unwrap();
                if check_solution(&model, &enc, DEFAULT_CHECK_TOLERANCE)
                    .unwrap()
                    .is_empty()
                {
                    satisfiable = true;
                    break;
                }
            }
            let feasible =
                feasibility_decision(&inst, &aspect_intervals(&inst, phi).unwrap(), 1e-9)
                    .unwrap()
                    .is_feasible();
            assert_eq!(
                satisfiable,
                feasible,
                "decision model vs intervals at phi = {phi} on {:?}",
                inst.name()
            );
            agreements += 1;
        }
    }
    format!("model structure pinned (22 vars / 86 rows), encodings feasible, emission deterministic and parseable, {agreements} decision probes agree")
}

/// Independent structural check of LP-format text: section order,
/// constraint grammar, and that every referenced variable is declared.
fn validate_lp(text: &str) {
    let mut sections = vec!["Minimize", "Subject To", "Bounds", "Binaries", "End"];
    sections.reverse();
    let mut current: Option<&str> = None;
    let mut declared: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut referenced: Vec<String> = Vec::new();

    let is_number = |tok: &str| tok.parse::<f64>().is_ok();
    let is_name = |tok: &str| {
        let mut chars = tok.chars();
        chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    };

    for line in text.lines() {
        if line.starts_with('\\') {
            continue;
        }
        if !line.starts_with(' ') {
            let header = line.trim_end();
            let expected = sections.pop().unwrap_or_else(|| panic!("unexpected section {header:?}"));
            assert_eq!(header, expected, "sections out of order");
            current = Some(expected);
            continue;
        }
        let body = line.trim();
        match current {
            Some("Minimize") | Some("Subject To") => {
                let body = match body.split_once(':') {
                    Some((label, rest)) => {
                        assert!(is_name(label.trim()), "bad row label {label:?}");
                        rest
                    }
                    None => body,
                };
                let mut tokens = body.split_whitespace().peekable();
                let mut expr_tokens = Vec::new();
                let mut sense = None;
                for tok in tokens.by_ref() {
                    if matches!(tok, "<=" | ">=" | "=") {
                        sense = Some(tok.to_string());
                        break;
                    }
                    expr_tokens.push(tok.to_string());
                }
                // Expression grammar: (sign [coef] name)*
                let mut at = 0;
                while at < expr_tokens.len() {
                    assert!(
                        expr_tokens[at] == "+" || expr_tokens[at] == "-",
                        "expected sign, got {:?}",
                        expr_tokens[at]
                    );
                    at += 1;
                    assert!(at < expr_tokens.len(), "dangling sign");
                    if is_number(&expr_tokens[at]) {
                        at += 1;
                    }
                    assert!(
                        at < expr_tokens.len() && is_name(&expr_tokens[at]),
                        "expected variable name"
                    );
                    referenced.push(expr_tokens[at].clone());
                    at += 1;
                }
                if current == Some("Subject To") {
                    let sense = sense.expect("constraint row needs a sense");
                    assert!(matches!(sense.as_str(), "<=" | ">=" | "="));
                    let rhs: Vec<&str> = tokens.collect();
                    assert_eq!(rhs.len(), 1, "exactly one right-hand side");
                    assert!(is_number(rhs[0]), "rhs must be numeric");
                } else {
                    assert!(sense.is_none(), "objective has no sense");
                }
            }
            Some("Bounds") => {
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let ok = match tokens.as_slice() {
                    [name, "free"] => is_name(name),
                    [name, "<=" | ">=", value] => is_name(name) && is_number(value),
                    [lo, "<=", name, "<=", hi] => {
                        is_number(lo) && is_name(name) && is_number(hi)
                    }
                    _ => false,
                };
                assert!(ok, "bad bounds line {body:?}");
                for tok in tokens {
                    if is_name(tok) && tok != "free" {
                        declared.insert(tok.to_string());
                    }
                }
            }
            Some("Binaries") => {
                assert!(is_name(body), "bad binary entry {body:?}");
                declared.insert(body.to_string());
            }
            other => panic!("content outside any section: {other:?}"),
        }
    }
    assert!(sections.is_empty(), "missing sections: {sections:?}");
    for name in referenced {
        assert!(declared.contains(&name), "undeclared variable {name}");
    }
}

#[test]
fn acceptance_10_cross_objective_ratio_ordering() {
    criterion(10, acceptance_10_body);
}

fn acceptance_10_body() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut sum_s1_over_s2 = 0.0; // phi2(s1*) / phi2(s2*)
    let mut sum_s3_over_s2 = 0.0; // phi2(s3*) / phi2(s2*)
    let mut sum_s1_over_s3 = 0.0; // phi3(s1*) / phi3(s3*)
    let mut sum_s2_over_s3 = 0.0; // phi3(s2*) / phi3(s3*)
    let count = 50;
    for run in 0..count {
        let class = InstanceClass::ALL[run % 3];
        let inst = random_instance(&mut rng, class, 9);
        let s1 = brute_force(&inst, ObjectiveKind::PeriSum).unwrap().0;
        let s2 = brute_force(&inst, ObjectiveKind::PeriMax).unwrap().0;
        let s3 = brute_force(&inst, ObjectiveKind::AspectRatio).unwrap().0;
        let table = softrect::report::cross_eval(&inst, &s1, &s2, &s3).unwrap();
        for row in &table {
            for cell in row {
                assert!(cell.ratio >= 1.0 - 1e-9, "optimality of the denominators");
            }
        }
        sum_s1_over_s2 += table[0][1].ratio;
        sum_s3_over_s2 += table[2][1].ratio;
        sum_s1_over_s3 += table[0][2].ratio;
        sum_s2_over_s3 += table[1][2].ratio;
    }
    let n = count as f64;
    let (a, b) = (sum_s1_over_s2 / n, sum_s3_over_s2 / n);
    let (c, d) = (sum_s1_over_s3 / n, sum_s2_over_s3 / n);
    assert!(
        (1.0..=1.5).contains(&a),
        "mean phi2(s1)/phi2(s2) should stay in the sanity band, got {a:.3}"
    );
    assert!(
        a < b,
        "the total-perimeter optimum should approximate the largest perimeter better than the aspect optimum does ({a:.3} vs {b:.3})"
    );
    assert!(
        c < d,
        "the total-perimeter optimum should approximate the aspect ratio better than the largest-perimeter optimum does ({c:.3} vs {d:.3})"
    );
    format!("mean ratio ordering holds: phi2 {a:.3} < {b:.3}, phi3 {c:.3} < {d:.3} ({count} instances)")
}

#[test]
fn acceptance_11_worked_micro_instance() {
    criterion(11, || {
        let inst = Instance::from_integers(2, 2, &[1, 1, 2]).unwrap();

        // Verify the pinned values against the brute-force oracle first.
        let (_, v1) = brute_force(&inst, ObjectiveKind::PeriSum).unwrap();
        let (_, v2) = brute_force(&inst, ObjectiveKind::PeriMax).unwrap();
        let (_, v3) = brute_force(&inst, ObjectiveKind::AspectRatio).unwrap();
        assert_eq!(*exact(&v1), rat_int(14));
        assert_eq!(*exact(&v2), rat(17, 3));
        assert_eq!(*exact(&v3), rat_int(2));

        // The solvers reproduce them.
        let (_, value) = solve_peri_sum(&inst).unwrap();
        assert_eq!(value, rat_int(14));
        let (p, _) = solve_peri_max_bb(&inst, None, None).unwrap();
        assert_eq!(exact_of(&inst, &p, ObjectiveKind::PeriMax), rat(17, 3));
        let outcome = solve_aspect_binary_search(&inst, None).unwrap();
        assert_eq!(outcome.value, rat_int(2));
        assert_eq!(outcome.trace.iterations.len(), 7);
        "micro instance: phi1 = 14, phi2 = 17/3, phi3 = 2, 7 bisection iterations".to_string()
    });
}
