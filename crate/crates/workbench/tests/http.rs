mod common;

use common::Service;
use evalbench_core::sample;
use serde_json::{json, Value};

fn new_project(svc: &Service) -> String {
    let (status, body) = svc.post("/projects", &json!({ "problem": sample::PROBLEM, "seed": 5 }));
    assert_eq!(status, 201, "{body}");
    body["project"]["id"].as_str().unwrap().to_string()
}

#[test]
fn metrics_lookup_returns_both_table_entries() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let (status, body) = svc.get("/bundle/metrics?feature=communication-data-throughput");
    assert_eq!(status, 200);
    let names: Vec<&str> = body.as_array().unwrap().iter().map(|e| e["metric"]["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["TCP/UDP/IP Transfer Speed", "MPI Transfer Speed"]);
    let (status, _) = svc.get("/bundle/metrics?feature=no-such-feature");
    assert_eq!(status, 404);
}

#[test]
fn unknown_paths_are_404() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    assert_eq!(svc.get("/unknown").0, 404);
    assert_eq!(svc.get("/projects/does-not-exist").0, 404);
    let id = new_project(&svc);
    assert_eq!(svc.get(&format!("/projects/{id}/steps/not-a-step")).0, 404);
}

#[test]
fn out_of_order_step_is_409_naming_the_missing_step() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let id = new_project(&svc);
    let (status, body) = svc.post(&format!("/projects/{id}/steps/feature-identification"), &json!({ "features": ["scalability"] }));
    assert_eq!(status, 409, "{body}");
    assert_eq!(body["error"]["kind"], "gating");
    assert_eq!(body["error"]["missing_step"], "requirement-recognition");
}

#[test]
fn contract_violation_is_422() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let id = new_project(&svc);
    let bad = json!({ "questions": [{ "id": "q1", "text": "How fast?", "elements": ["not-in-taxonomy"] }] });
    let (status, body) = svc.post(&format!("/projects/{id}/steps/requirement-recognition"), &bad);
    assert_eq!(status, 422, "{body}");
    let (status, _) = svc.post(&format!("/projects/{id}/steps/requirement-recognition"), &json!("not an object"));
    assert_eq!(status, 400);
}

#[test]
fn retried_mutations_apply_once() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let body = json!({ "problem": sample::PROBLEM });
    let (_, first) = svc.post_with_id("/projects", &body, "create-1");
    let (_, again) = svc.post_with_id("/projects", &body, "create-1");
    assert_eq!(first["project"]["id"], again["project"]["id"]);
    let id = first["project"]["id"].as_str().unwrap();
    let (_, list) = svc.get("/projects");
    assert_eq!(list.as_array().unwrap().len(), 1);

    let step = serde_json::to_value(&sample::study_steps(&sample::cloud_bundle())[0]).unwrap();
    let path = format!("/projects/{id}/steps/requirement-recognition");
    let (s1, v1) = svc.post_with_id(&path, &step, "step-1");
    let (s2, v2) = svc.post_with_id(&path, &step, "step-1");
    assert_eq!((s1, s2), (200, 200));
    assert_eq!(v1["digest"], v2["digest"]);
    let (s3, _) = svc.post(&path, &step);
    assert_eq!(s3, 409);
}

#[test]
fn untagged_payloads_take_their_type_from_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let id = new_project(&svc);
    let mut step: Value = serde_json::to_value(&sample::study_steps(&sample::cloud_bundle())[0]).unwrap();
    step.as_object_mut().unwrap().remove("type");
    let (status, body) = svc.post(&format!("/projects/{id}/steps/requirement-recognition"), &step);
    assert_eq!(status, 200, "{body}");
    let (status, record) = svc.get(&format!("/projects/{id}/steps/1"));
    assert_eq!(status, 200);
    assert_eq!(record["payload"]["type"], "requirement-recognition");
}

#[test]
fn analysis_views_and_stateless_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let svc = Service::start(dir.path());
    let id = new_project(&svc);
    for payload in sample::study_steps(&sample::cloud_bundle()) {
        let (s, b) = svc.post(&format!("/projects/{id}/steps/{}", payload.step().slug()), &serde_json::to_value(&payload).unwrap());
        assert_eq!(s, 200, "{b}");
    }
    let adapter = serde_json::to_value(sample::fixture_adapter(0.0)).unwrap();
    let (s, b) = svc.post(&format!("/projects/{id}/steps/experimental-implementation"), &json!({ "adapter": adapter, "capture_environment": false }));
    assert_eq!(s, 200, "{b}");
    assert_eq!(svc.get(&format!("/projects/{id}/analysis/pareto")).0, 404);
    let recipe = serde_json::to_value(sample::analysis_recipe()).unwrap();
    let (s, b) = svc.post(&format!("/projects/{id}/steps/experimental-analysis"), &json!({ "recipe": recipe }));
    assert_eq!(s, 200, "{b}");

    let (s, pareto) = svc.get(&format!("/projects/{id}/analysis/pareto?metric=MPI%20Transfer%20Speed"));
    assert_eq!(s, 200);
    let entries = pareto["view"][0]["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.last().unwrap()["cumulative_percent"], 100.0);
    let (s, charts) = svc.get(&format!("/projects/{id}/analysis/chart?kind=radar"));
    assert_eq!(s, 200);
    assert_eq!(charts["view"].as_array().unwrap().len(), 0);
    let (s, boost) = svc.get(&format!("/projects/{id}/analysis/boost"));
    assert_eq!(s, 200);
    assert_eq!(boost["view"]["radar"]["kind"], "radar");
    assert_eq!(svc.get(&format!("/projects/{id}/analysis/nonsense")).0, 404);

    let (s, table) = svc.post("/analysis/anova", &json!({ "groups": { "a": [1.0, 2.0, 3.0], "b": [2.0, 3.0, 4.0] } }));
    assert_eq!(s, 200);
    assert_eq!(table["f"], 1.5);
    let (s, chart) = svc.post("/analysis/chart?kind=pareto", &json!([{ "term": "A", "effect": 4.0, "share": 0.8 }, { "term": "B", "effect": 1.0, "share": 0.2 }]));
    assert_eq!(s, 200, "{chart}");
    assert_eq!(chart["kind"], "pareto");
}
