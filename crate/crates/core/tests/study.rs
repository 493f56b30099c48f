use evalbench_core::artefact::{load_bundle, validate_bundle, KnowledgeBundle};
use evalbench_core::engine::{analysis_payload, compare_runs, EngineError, ProjectStore, StepId, StoreError, DEFAULT_TOLERANCE};
use evalbench_core::reporting::{answer_questions, generate_report, generate_template, instantiate_template, ReportFormat, ReportOptions};
use evalbench_core::runner::ExecutionOptions;
use evalbench_core::sample;

fn bundle_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bundles/cloud-services")
}

fn options() -> ExecutionOptions {
    ExecutionOptions { capture_environment: false, failure_budget: 0.2 }
}

fn run_study(store: &ProjectStore, bundle: &KnowledgeBundle) -> String {
    let project = store.create(bundle, sample::PROBLEM, 7, "tester", None).unwrap();
    let id = project.id.clone();
    for payload in sample::study_steps(bundle) {
        store.submit(bundle, &id, payload.step(), None, payload, "tester", None).unwrap();
    }
    store.run_campaign(bundle, &id, &sample::fixture_adapter(0.0), &options(), "tester", None).unwrap();
    let project = store.load(&id).unwrap();
    let analysis = analysis_payload(&project, 0, &sample::analysis_recipe()).unwrap();
    store.submit(bundle, &id, StepId::ExperimentalAnalysis, None, analysis, "tester", None).unwrap();
    store.submit(bundle, &id, StepId::ConclusionDocumentation, None, sample::conclusion(), "tester", None).unwrap();
    id
}

#[test]
fn sample_bundle_on_disk_matches_embedded_copy() {
    let loaded = load_bundle(bundle_dir()).unwrap();
    assert!(validate_bundle(&loaded).is_valid());
    assert_eq!(loaded, sample::cloud_bundle());
}

#[test]
fn throughput_lookup_lists_both_transfer_metrics() {
    let bundle = sample::cloud_bundle();
    let entries = bundle.lookup_metrics("Communication Data Throughput").unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e.metric.name.as_str()).collect();
    assert_eq!(names, [sample::TCP_METRIC, sample::MPI_METRIC]);
    assert!(entries.iter().all(|e| e.benchmarks.len() == 4));
    let tcp: Vec<&str> = entries[0].benchmarks.iter().map(|b| b.name.as_str()).collect();
    assert!(tcp.contains(&"iPerf"));
    let mpi: Vec<&str> = entries[1].benchmarks.iter().map(|b| b.name.as_str()).collect();
    assert!(mpi.contains(&"HPCC: b_eff"));
}

#[test]
fn problem_statement_mentions_reliability_and_variability() {
    let bundle = sample::cloud_bundle();
    let ids: Vec<String> = bundle.match_taxonomy_terms(sample::PROBLEM).into_iter().map(|m| m.element_id).collect();
    assert!(ids.contains(&"reliability".to_string()));
    assert!(ids.contains(&"variability".to_string()));
}

#[test]
fn workload_lookup_spans_three_roots() {
    let bundle = sample::cloud_bundle();
    let found = bundle.lookup_factors(&["scalability"], &["iPerf"], &[]).unwrap();
    let ids: Vec<&str> = found.workload.iter().map(|n| n.id.as_str()).collect();
    for root in ["workload-terminal", "workload-activity", "workload-object"] {
        assert!(ids.contains(&root), "{root} missing from {ids:?}");
    }
    assert!(found.resource.iter().any(|n| n.id == "cpu-cores"));
}

#[test]
fn scripted_study_concludes_and_answers_questions() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let bundle = sample::cloud_bundle();
    let id = run_study(&store, &bundle);
    let project = store.load(&id).unwrap();
    assert!(project.is_concluded());
    assert_eq!(project.digest(), store.snapshot(&id).unwrap().digest());

    let answers = answer_questions(&project).unwrap();
    assert_eq!(answers.len(), 3);
    assert!(answers.iter().all(|a| !a.evidence.is_empty()), "{answers:?}");

    let report = generate_report(&project, ReportFormat::Markdown, &ReportOptions::default()).unwrap();
    for step in StepId::ALL {
        assert!(report.contains(step.title()), "missing {step}");
    }
}

#[test]
fn two_identical_studies_agree_and_render_the_same_content() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let bundle = sample::cloud_bundle();
    let a = store.load(&run_study(&store, &bundle)).unwrap();
    let b = store.load(&run_study(&store, &bundle)).unwrap();
    let report = compare_runs(&a, &b, DEFAULT_TOLERANCE).unwrap();
    assert!(report.steps.iter().all(|s| s.score == 1.0), "{report:?}");
    let opts = ReportOptions { content_only: true };
    assert_eq!(
        generate_report(&a, ReportFormat::Text, &opts).unwrap(),
        generate_report(&b, ReportFormat::Text, &opts).unwrap()
    );
}

#[test]
fn gating_rejects_out_of_order_steps() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let bundle = sample::cloud_bundle();
    let project = store.create(&bundle, sample::PROBLEM, 1, "tester", None).unwrap();
    let steps = sample::study_steps(&bundle);
    let err = store.submit(&bundle, &project.id, StepId::FeatureIdentification, None, steps[1].clone(), "tester", None).unwrap_err();
    assert!(matches!(err, StoreError::Engine(EngineError::Gating { missing: StepId::RequirementRecognition, .. })), "{err}");
    assert_eq!(store.read_journal(&project.id).unwrap().len(), 1);
}

#[test]
fn template_round_trip_reproduces_steps_one_to_seven() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let bundle = sample::cloud_bundle();
    let source = store.load(&run_study(&store, &bundle)).unwrap();
    let template = generate_template(&source, "scalability").unwrap();
    let text = serde_json::to_string(&template).unwrap();
    let parsed = serde_json::from_str(&text).unwrap();
    let made = instantiate_template(&parsed, &bundle, None, "tester").unwrap();
    assert!(made.warnings.is_empty());
    for step in &StepId::ALL[..7] {
        assert_eq!(made.project.payload(*step, 0), source.payload(*step, 0), "{step}");
    }
}

#[test]
fn truncated_journal_tail_is_ignored_on_load() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let bundle = sample::cloud_bundle();
    let id = run_study(&store, &bundle);
    let before = store.load(&id).unwrap().digest();
    let path = store.project_dir(&id).join(evalbench_core::engine::JOURNAL_FILE);
    let mut f = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
    write!(f, "{{\"seq\":999,\"event\":{{\"ev").unwrap();
    drop(f);
    assert_eq!(store.load(&id).unwrap().digest(), before);
}
