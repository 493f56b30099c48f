//! Acceptance suite: one PASS/FAIL line per criterion, each held to its
//! time limit. Exits non-zero when any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::Service;
use evalbench_core::analysis::{anova_oneway, boosting_index, factorial_effects, pareto_ranking, EffectEstimate, Observation, SampleSet};
use evalbench_core::artefact::{load_bundle, Direction, KnowledgeBundle};
use evalbench_core::doe::{
    estimate_replicates, full_factorial, simulate_power_with, DesignSpec, Factor, Level, PowerQuery, SplitMix64,
};
use evalbench_core::engine::{analysis_payload, EngineError, ImplementationPayload, Project, ProjectStore, StepId, StepPayload};
use evalbench_core::par::Execution;
use evalbench_core::runner::{execute_plan, ExecutionOptions};
use evalbench_core::sample;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Rng(SplitMix64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(SplitMix64::new(seed))
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn int(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + (self.0.next_u64() % (hi_inclusive - lo + 1) as u64) as usize
    }

    fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

fn c1_catalogue() -> Outcome {
    let bundle = load_bundle(common::bundle_dir()).map_err(|e| e.to_string())?;
    let entries = bundle.lookup_metrics("communication data throughput").map_err(|e| e.to_string())?;
    let got: Vec<(String, Vec<String>)> =
        entries.iter().map(|e| (e.metric.name.clone(), e.benchmarks.iter().map(|b| b.name.clone()).collect())).collect();
    let want = vec![
        (
            "TCP/UDP/IP Transfer Speed".to_string(),
            vec!["iPerf", "Private tools TCPTest/UDPTest", "SPECweb 2005", "Upload/Download/Send large size data"]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>(),
        ),
        (
            "MPI Transfer Speed".to_string(),
            vec!["HPCC: b_eff", "Intel MPI Bench", "mpptest", "OMB-3.1 with MPI"].into_iter().map(String::from).collect(),
        ),
    ];
    ensure!(got == want, "catalogue mismatch: {got:?}");
    Ok("2 metrics x 4 benchmarks, exact".into())
}

/// Payloads of all ten steps from one complete in-process study.
fn reference_payloads(bundle: &KnowledgeBundle) -> Result<Vec<StepPayload>, String> {
    let (mut p, _) = Project::create(bundle, sample::PROBLEM, 1, "acceptance", None).map_err(|e| e.to_string())?;
    let mut payloads = sample::study_steps(bundle);
    for payload in &payloads {
        p.submit(bundle, payload.step(), 0, payload.clone(), "acceptance", None).map_err(|e| e.to_string())?;
    }
    let plan = full_factorial(p.design(0).expect("design submitted")).map_err(|e| e.to_string())?;
    let adapter = sample::fixture_adapter(0.0);
    let execution = execute_plan(&plan, &adapter, &ExecutionOptions { capture_environment: false, failure_budget: 0.2 })
        .map_err(|e| e.to_string())?;
    let implementation = StepPayload::ExperimentalImplementation(Box::new(ImplementationPayload { adapter, execution }));
    p.submit(bundle, StepId::ExperimentalImplementation, 0, implementation.clone(), "acceptance", None).map_err(|e| e.to_string())?;
    let analysis = analysis_payload(&p, 0, &sample::analysis_recipe()).map_err(|e| e.to_string())?;
    p.submit(bundle, StepId::ExperimentalAnalysis, 0, analysis.clone(), "acceptance", None).map_err(|e| e.to_string())?;
    p.submit(bundle, StepId::ConclusionDocumentation, 0, sample::conclusion(), "acceptance", None).map_err(|e| e.to_string())?;
    payloads.extend([implementation, analysis, sample::conclusion()]);
    Ok(payloads)
}

fn c2_gating(bundle: &KnowledgeBundle, payloads: &[StepPayload]) -> Outcome {
    let mut sequences: Vec<Vec<usize>> = Vec::new();
    for len in 1..=3u32 {
        for code in 0..10usize.pow(len) {
            sequences.push((0..len).map(|i| code / 10usize.pow(i) % 10).collect());
        }
    }
    let (accepted, gaps, repeats) = (&mut 0, &mut 0, &mut 0);
    for seq in &sequences {
        let (mut p, _) = Project::create(bundle, sample::PROBLEM, 1, "acceptance", None).map_err(|e| e.to_string())?;
        // Oracle: the accepted steps always form the prefix 1..=done.
        let mut done = 0usize;
        for &s in seq {
            let step = StepId::ALL[s];
            let before = p.events;
            let result = p.submit(bundle, step, p.expected_iteration(step), payloads[s].clone(), "acceptance", None);
            match (s.cmp(&done), result) {
                (std::cmp::Ordering::Equal, Ok(entries)) => {
                    ensure!(entries.len() == 1, "{seq:?}: {step} accepted without one journal entry");
                    done += 1;
                    *accepted += 1;
                }
                (std::cmp::Ordering::Equal, Err(e)) => return Err(format!("{seq:?}: {step} rejected: {e}")),
                (std::cmp::Ordering::Greater, Err(EngineError::Gating { missing, .. })) => {
                    ensure!(missing == StepId::ALL[done], "{seq:?}: {step} named {missing}, expected {}", StepId::ALL[done]);
                    ensure!(p.events == before, "{seq:?}: rejected {step} changed the project");
                    *gaps += 1;
                }
                (std::cmp::Ordering::Less, Err(_)) => {
                    ensure!(p.events == before, "{seq:?}: rejected repeat of {step} changed the project");
                    *repeats += 1;
                }
                (_, outcome) => return Err(format!("{seq:?}: {step} with {done} done gave {outcome:?}")),
            }
        }
    }
    Ok(format!("{} orders; {accepted} accepted, {gaps} gaps named, {repeats} repeats refused", sequences.len()))
}

fn c3_factorial() -> Outcome {
    let mut designs = 0usize;
    let mut shapes: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..4 {
        shapes = shapes.iter().flat_map(|s| (2..=5).map(move |l| [s.clone(), vec![l]].concat())).chain(shapes.clone()).collect();
    }
    shapes.retain(|s| !s.is_empty());
    shapes.sort();
    shapes.dedup();
    for levels in &shapes {
        for r in 1..=4u32 {
            let factors = levels
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let labels: Vec<String> = (0..n).map(|l| format!("v{l}")).collect();
                    Factor::design(format!("f{i}"), &labels.iter().map(String::as_str).collect::<Vec<_>>())
                })
                .collect();
            let seed = designs as u64 * 7919 + 3;
            let spec = DesignSpec { factors, blocking: None, replicates: r, seed, responses: vec![] };
            let plan = full_factorial(&spec).map_err(|e| e.to_string())?;
            let cells: usize = levels.iter().product();
            ensure!(plan.runs.len() == r as usize * cells, "{levels:?} r={r}: {} runs", plan.runs.len());
            let mut counts: BTreeMap<Vec<String>, u32> = BTreeMap::new();
            for run in &plan.runs {
                *counts.entry(run.combination.values().map(Level::to_string).collect()).or_default() += 1;
            }
            ensure!(counts.len() == cells && counts.values().all(|&c| c == r), "{levels:?} r={r}: multiplicities off");
            let again = full_factorial(&spec).map_err(|e| e.to_string())?;
            ensure!(
                serde_json::to_vec(&plan).unwrap() == serde_json::to_vec(&again).unwrap(),
                "{levels:?} r={r}: order not reproducible"
            );
            designs += 1;
        }
    }
    Ok(format!("{designs} designs (every shape up to 4 factors x 5 levels, r 1-4)"))
}

fn c4_anova() -> Outcome {
    let fixed = SampleSet {
        metric: None,
        unit: None,
        groups: [("a".to_string(), vec![1.0, 2.0, 3.0]), ("b".to_string(), vec![2.0, 3.0, 4.0])].into(),
    };
    let t = anova_oneway(&fixed).map_err(|e| e.to_string())?;
    ensure!((t.f - 1.5).abs() < 1e-12, "fixed case F = {}", t.f);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let mut rng = Rng::new(2024);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let k = rng.int(2, 6);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let shift = rng.range(-3.0, 3.0);
                (0..rng.int(2, 20)).map(|_| shift + rng.range(-10.0, 10.0)).collect()
            })
            .collect();
        let set = SampleSet {
            metric: None,
            unit: None,
            groups: groups.iter().enumerate().map(|(i, g)| (format!("g{i}"), g.clone())).collect(),
        };
        let t = anova_oneway(&set).map_err(|e| e.to_string())?;
        let all: Vec<f64> = groups.concat();
        let grand = all.iter().sum::<f64>() / all.len() as f64;
        let (mut ssb, mut ssw) = (0.0, 0.0);
        for g in &groups {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            ssb += g.len() as f64 * (m - grand).powi(2);
            ssw += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        }
        let sst: f64 = all.iter().map(|x| (x - grand).powi(2)).sum();
        let (dfb, dfw) = ((k - 1) as u64, (all.len() - k) as u64);
        let f = (ssb / dfb as f64) / (ssw / dfw as f64);
        ensure!(t.df_between == dfb && t.df_within == dfw, "case {case}: df");
        for (name, got, want) in [("SSB", t.ss_between, ssb), ("SSW", t.ss_within, ssw), ("SST", t.ss_total, sst), ("F", t.f, f)] {
            worst = worst.max(rel(got, want));
            ensure!(rel(got, want) <= 1e-9, "case {case}: {name} {got} vs {want}");
        }
        ensure!(rel(t.ss_between + t.ss_within, t.ss_total) <= 1e-9, "case {case}: SS identity");
    }
    Ok(format!("fixed F = 1.5; 200 random sets, worst relative error {worst:.1e}"))
}

fn cube_design(r: u32, seed: u64) -> DesignSpec {
    let factors = ["A", "B", "C"].iter().map(|n| Factor::design(*n, &["lo", "hi"])).collect();
    DesignSpec { factors, blocking: None, replicates: r, seed, responses: vec![] }
}

fn c5_effects() -> Outcome {
    let coef: BTreeMap<&str, f64> =
        [("A", 3.0), ("B", -1.75), ("C", 0.5), ("A:B", 1.25), ("A:C", 0.0), ("B:C", -0.4), ("A:B:C", 0.2)].into();
    let intercept = 20.0;
    let sign = |c: &BTreeMap<String, Level>, f: &str| if c[f].to_string() == "hi" { 1.0 } else { -1.0 };
    let truth = |c: &BTreeMap<String, Level>| -> f64 {
        intercept
            + coef
                .iter()
                .map(|(term, b)| b * term.split(':').map(|f| sign(c, f)).product::<f64>())
                .sum::<f64>()
    };
    let estimate = |spec: &DesignSpec, noise: &mut dyn FnMut() -> f64| -> Result<Vec<EffectEstimate>, String> {
        let plan = full_factorial(spec).map_err(|e| e.to_string())?;
        let values: Vec<f64> = plan.runs.iter().map(|r| truth(&r.combination) + noise()).collect();
        let obs: Vec<Observation<'_>> =
            plan.runs.iter().zip(&values).map(|(r, &value)| Observation { combination: &r.combination, value }).collect();
        factorial_effects(&spec.factors, &obs).map_err(|e| e.to_string())
    };
    for e in estimate(&cube_design(2, 1), &mut || 0.0)? {
        ensure!((e.effect - 2.0 * coef[e.term.as_str()]).abs() < 1e-9, "noiseless {}: {}", e.term, e.effect);
    }
    let (sigma, r) = (2.0, 3u32);
    let n = (8 * r) as f64;
    let bound = 3.0 * sigma / n.sqrt();
    let mut hits = 0;
    for trial in 0..100u64 {
        let mut rng = Rng::new(500 + trial);
        let effects = estimate(&cube_design(r, trial), &mut || sigma * rng.normal())?;
        // A coefficient is half its contrast effect.
        if effects.iter().all(|e| (e.effect / 2.0 - coef[e.term.as_str()]).abs() <= bound) {
            hits += 1;
        }
    }
    ensure!(hits >= 95, "only {hits}/100 trials within 3σ/√N");
    Ok(format!("noiseless exact; {hits}/100 noisy trials within 3σ/√N = {bound:.3}"))
}

fn c6_power() -> Outcome {
    let q = |means: Vec<f64>, n: usize| PowerQuery { levels: means.len(), per_group: n, means, sigma: 1.0, alpha: 0.05, trials: 20_000, seed: 11 };
    let both = |query: &PowerQuery| -> Result<f64, String> {
        let seq = simulate_power_with(query, Execution::Sequential).map_err(|e| e.to_string())?;
        let par = simulate_power_with(query, Execution::default()).map_err(|e| e.to_string())?;
        ensure!(seq == par, "sequential {seq} and default-mode {par} disagree");
        Ok(seq)
    };
    let null = both(&q(vec![5.0, 5.0, 5.0], 6))?;
    ensure!((null - 0.05).abs() <= 0.02, "null rejection {null}");
    let mut last = 0.0;
    for n in [2, 3, 5, 8, 12] {
        let p = both(&q(vec![0.0, 1.0], n))?;
        ensure!(p + 0.02 >= last, "power fell with n={n}: {p} < {last}");
        last = p;
    }
    last = 0.0;
    for d in [0.0, 0.3, 0.6, 1.0, 1.5, 2.0] {
        let p = both(&q(vec![0.0, d], 5))?;
        ensure!(p + 0.02 >= last, "power fell with effect {d}: {p} < {last}");
        last = p;
    }
    let base = q(vec![0.0, 3.0], 2);
    let est = estimate_replicates(&base, 0.9, 50).map_err(|e| e.to_string())?;
    let scan = (2..=50)
        .find(|&n| simulate_power_with(&PowerQuery { per_group: n, ..base.clone() }, Execution::Sequential).unwrap() >= 0.9)
        .ok_or("scan found no n")?;
    ensure!(est.per_group == scan, "estimate {} vs scan {scan}", est.per_group);
    Ok(format!("null {null:.4}; monotone in n and effect; minimal n = {scan}"))
}

fn c7_pareto() -> Outcome {
    let e = |t: &str, v: f64| EffectEstimate { term: t.into(), effect: v, share: 0.0 };
    let r = pareto_ranking(&[e("x", 0.5), e("y", -4.0), e("z", 1.0)]).map_err(|e| e.to_string())?;
    let cum: Vec<f64> = r.entries.iter().map(|e| e.cumulative_percent).collect();
    for (got, want) in cum.iter().zip([72.72, 90.90, 100.0]) {
        ensure!((got - want).abs() <= 0.01, "cumulative {cum:?}");
    }
    let mut rng = Rng::new(77);
    for _ in 0..200 {
        let effects: Vec<EffectEstimate> = (0..rng.int(1, 12)).map(|i| e(&format!("t{i}"), rng.range(-9.0, 9.0))).collect();
        let r = pareto_ranking(&effects).map_err(|e| e.to_string())?;
        ensure!(r.entries.windows(2).all(|w| w[0].cumulative_percent <= w[1].cumulative_percent), "non-monotone cumulative");
        ensure!(r.entries.last().map(|e| e.cumulative_percent) == Some(100.0), "does not end at 100");
    }
    Ok(format!("fixed case {:.2}/{:.2}/{:.2}; 200 random rankings monotone to 100", cum[0], cum[1], cum[2]))
}

fn c8_boosting() -> Outcome {
    let mut rng = Rng::new(31);
    for case in 0..100 {
        let metrics: Vec<String> = (0..rng.int(2, 5)).map(|m| format!("m{m}")).collect();
        let directions: BTreeMap<String, Direction> = metrics
            .iter()
            .map(|m| (m.clone(), if rng.unit() < 0.5 { Direction::HigherBetter } else { Direction::LowerBetter }))
            .collect();
        let table: BTreeMap<String, BTreeMap<String, f64>> = (0..rng.int(2, 6))
            .map(|a| (format!("a{a}"), metrics.iter().map(|m| (m.clone(), rng.range(0.5, 500.0))).collect()))
            .collect();
        let target = metrics[rng.int(0, metrics.len() - 1)].clone();
        let (scale, shift) = (rng.range(0.001, 1000.0), rng.range(-1000.0, 1000.0));
        let mut moved = table.clone();
        for row in moved.values_mut() {
            let v = row.get_mut(&target).expect("metric present");
            *v = scale * *v + shift;
        }
        let a = boosting_index(&table, &directions, None).map_err(|e| e.to_string())?;
        let b = boosting_index(&moved, &directions, None).map_err(|e| e.to_string())?;
        ensure!(a.ranking() == b.ranking(), "case {case}: ranking changed under rescaling of {target}");
    }
    Ok("100 instances, ranking unchanged".into())
}

fn expect(status: u16, body: &Value, want: u16, what: &str) -> Result<(), String> {
    if status == want {
        Ok(())
    } else {
        Err(format!("{what}: HTTP {status}: {body}"))
    }
}

fn walk_study(svc: &Service, seed: u64) -> Result<String, String> {
    let bundle = sample::cloud_bundle();
    let (s, body) = svc.post("/projects", &json!({ "problem": sample::PROBLEM, "seed": seed }));
    expect(s, &body, 201, "create project")?;
    let id = body["project"]["id"].as_str().ok_or("project id")?.to_string();
    for payload in sample::study_steps(&bundle) {
        let step = payload.step();
        let (s, body) = svc.post(&format!("/projects/{id}/steps/{}", step.slug()), &serde_json::to_value(&payload).unwrap());
        expect(s, &body, 200, step.slug())?;
    }
    Ok(id)
}

fn finish_study(svc: &Service, id: &str, adapter: &Value, recipe: &Value) -> Result<(), String> {
    let (s, body) = svc.post(&format!("/projects/{id}/execute?wait=true"), &json!({ "adapter": adapter }));
    expect(s, &body, 200, "execute")?;
    let (s, body) = svc.post(&format!("/projects/{id}/steps/experimental-analysis"), &json!({ "recipe": recipe }));
    expect(s, &body, 200, "analysis")?;
    let conclusion = serde_json::to_value(sample::conclusion()).unwrap();
    let (s, body) = svc.post(&format!("/projects/{id}/steps/conclusion-documentation"), &conclusion);
    expect(s, &body, 200, "conclusion")?;
    ensure!(body["concluded"] == json!(true), "project {id} not concluded");
    Ok(())
}

fn c9_replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let svc = Service::start(dir.path());
    let a = walk_study(&svc, 7)?;
    let adapter = serde_json::to_value(sample::fixture_adapter(0.0)).unwrap();
    let recipe = serde_json::to_value(sample::analysis_recipe()).unwrap();
    finish_study(&svc, &a, &adapter, &recipe)?;

    let (s, template) = svc.post("/templates", &json!({ "project": a, "feature": "scalability" }));
    expect(s, &template, 201, "make template")?;
    let tid = template["id"].as_str().ok_or("template id")?;
    let (s, made) = svc.post(&format!("/templates/{tid}/instantiate"), &json!({ "seed": 7 }));
    expect(s, &made, 201, "instantiate")?;
    ensure!(made["warnings"] == json!([]), "instantiation warnings {}", made["warnings"]);
    let b = made["project"]["id"].as_str().ok_or("instantiated id")?.to_string();
    finish_study(&svc, &b, &template["adapter"], &template["analysis_recipe"])?;

    let (s, cmp) = svc.get(&format!("/projects/{a}/compare/{b}"));
    expect(s, &cmp, 200, "compare")?;
    let overall = cmp["overall"].as_f64().ok_or("overall score")?;
    ensure!(overall == 1.0, "overall repeatability {overall}: {cmp}");
    for format in ["text", "markdown"] {
        let (sa, ra) = svc.get(&format!("/projects/{a}/report?format={format}&content_only=true"));
        let (sb, rb) = svc.get(&format!("/projects/{b}/report?format={format}&content_only=true"));
        ensure!(sa == 200 && sb == 200, "report status {sa}/{sb}");
        ensure!(ra == rb, "{format} reports differ");
    }
    Ok(format!("template {tid}; compare_runs overall = {overall}; content reports byte-identical"))
}

fn c10_durability() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let svc = Service::start(dir.path());
    let id = walk_study(&svc, 3)?;
    let adapter = serde_json::to_value(sample::fixture_adapter(0.15)).unwrap();
    let (s, body) = svc.post(&format!("/projects/{id}/execute"), &json!({ "adapter": adapter, "capture_environment": false }));
    expect(s, &body, 202, "start campaign")?;
    let deadline = Instant::now() + Duration::from_secs(8);
    let seen = loop {
        let (_, view) = svc.get(&format!("/projects/{id}"));
        let done = view["project"]["campaign"]["completed"].as_array().map_or(0, Vec::len);
        if done >= 4 {
            break done;
        }
        ensure!(Instant::now() < deadline, "campaign made no progress");
        std::thread::sleep(Duration::from_millis(20));
    };
    svc.kill();

    let store = ProjectStore::open(dir.path()).map_err(|e| e.to_string())?;
    let offline = store.load(&id).map_err(|e| e.to_string())?;
    let partial = offline.campaign.as_ref().map_or(0, |c| c.completed.len());
    ensure!(partial >= seen, "journal kept {partial} runs, service had reported {seen}");
    ensure!(!offline.is_concluded() && offline.implementation(0).is_none(), "campaign should be unfinished");

    let svc = Service::start(dir.path());
    let (s, view) = svc.get(&format!("/projects/{id}"));
    expect(s, &view, 200, "reload")?;
    ensure!(view["digest"] == json!(offline.digest()), "restarted digest {} != offline replay {}", view["digest"], offline.digest());
    let restored: Project = serde_json::from_value(view["project"].clone()).map_err(|e| e.to_string())?;
    ensure!(restored == offline, "restarted project differs from offline replay");

    let fast = serde_json::to_value(sample::fixture_adapter(0.0)).unwrap();
    let (s, body) = svc.post(&format!("/projects/{id}/execute?wait=true"), &json!({ "adapter": fast, "capture_environment": false }));
    expect(s, &body, 200, "rerun campaign")?;
    let after = store.load(&id).map_err(|e| e.to_string())?;
    ensure!(body["digest"] == json!(after.digest()), "post-rerun digest mismatch");
    Ok(format!("killed after {partial} journaled runs; restart digest equals offline replay"))
}

fn main() {
    let bundle = sample::cloud_bundle();
    let payloads = match reference_payloads(&bundle) {
        Ok(p) => p,
        Err(e) => {
            println!("setup FAIL: {e}");
            std::process::exit(1);
        }
    };
    let criteria: Vec<(u32, &str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "catalogue fidelity", 1, Box::new(c1_catalogue)),
        (2, "workflow gating", 1, Box::new(move || c2_gating(&bundle, &payloads))),
        (3, "factorial design", 5, Box::new(c3_factorial)),
        (4, "ANOVA oracle equivalence", 5, Box::new(c4_anova)),
        (5, "effect recovery", 10, Box::new(c5_effects)),
        (6, "power behaviour", 60, Box::new(c6_power)),
        (7, "Pareto ranking", 1, Box::new(c7_pareto)),
        (8, "boosting invariance", 1, Box::new(c8_boosting)),
        (9, "end-to-end replay", 30, Box::new(c9_replay)),
        (10, "journal durability", 10, Box::new(c10_durability)),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > *limit as f64 => Err(format!("{detail}; exceeded {limit} s limit")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS ({secs:.2} s, limit {limit} s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} {name}: FAIL ({secs:.2} s, limit {limit} s) {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
