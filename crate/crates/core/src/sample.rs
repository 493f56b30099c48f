//! The bundled cloud-services sample and a scripted throughput study over it.
//!
//! The study walks steps one to seven with fixed payloads and measures a
//! deterministic fixture adapter, so repeated evaluations are comparable.

use std::collections::BTreeMap;

use crate::analysis::{AnalysisRecipe, BoostingRecipe, ChartKind};
use crate::artefact::{validate_bundle, Direction, KnowledgeBundle};
use crate::doe::{DesignSpec, Factor, FactorKind, FactorRole, Level};
use crate::engine::{
    BoostingMetric, CandidateMetric, ConclusionPayload, FactorListingPayload, ListingPayload, RequirementQuestion,
    SelectionPayload, StepPayload,
};
use crate::runner::{AdapterDef, ExtractionRule, Extractor};

const BUNDLE: &str = include_str!("../../../bundles/cloud-services/bundle.json");
const TAXONOMY: &str = include_str!("../../../bundles/cloud-services/taxonomy.json");
const CATALOGUE: &str = include_str!("../../../bundles/cloud-services/catalogue.json");
const FACTORS: &str = include_str!("../../../bundles/cloud-services/factors.json");
const BLUEPRINTS: &str = include_str!("../../../bundles/cloud-services/blueprints.json");

pub const THROUGHPUT_FEATURE: &str = "communication-data-throughput";
pub const TCP_METRIC: &str = "TCP/UDP/IP Transfer Speed";
pub const MPI_METRIC: &str = "MPI Transfer Speed";
pub const DESIGN_SEED: u64 = 20_160_301;

/// The cloud-services sample bundle compiled into the binary.
pub fn cloud_bundle() -> KnowledgeBundle {
    let meta: serde_json::Value = serde_json::from_str(BUNDLE).expect("embedded bundle.json");
    let bundle = KnowledgeBundle {
        schema_version: meta["schema_version"].as_u64().expect("schema_version") as u32,
        domain: meta["domain"].as_str().expect("domain").to_string(),
        version: meta["version"].as_str().expect("version").to_string(),
        taxonomy: serde_json::from_str(TAXONOMY).expect("embedded taxonomy.json"),
        catalogue: serde_json::from_str(CATALOGUE).expect("embedded catalogue.json"),
        factors: serde_json::from_str(FACTORS).expect("embedded factors.json"),
        blueprints: serde_json::from_str(BLUEPRINTS).expect("embedded blueprints.json"),
        templates: Vec::new(),
    };
    debug_assert!(validate_bundle(&bundle).is_valid());
    bundle
}

pub const PROBLEM: &str = "A modern software system is expected to deliver reliable performance under highly variable load intensities.";

pub fn requirement_questions() -> Vec<RequirementQuestion> {
    let q = |id: &str, text: &str, elements: &[&str]| RequirementQuestion {
        id: id.into(),
        text: text.into(),
        elements: elements.iter().map(|e| e.to_string()).collect(),
        status: Default::default(),
    };
    vec![
        q("q1", "How scalable is the software system when dealing with different amounts of workloads?", &["scalability", "variability"]),
        q("q2", "How fast does the software system scale with an increasing workload?", &["elasticity"]),
        q("q3", "How fast does the software system scale with a decreasing workload?", &["elasticity"]),
    ]
}

fn catalogue_candidates(bundle: &KnowledgeBundle) -> Vec<CandidateMetric> {
    bundle
        .lookup_metrics(THROUGHPUT_FEATURE)
        .expect("sample bundle lists throughput metrics")
        .into_iter()
        .map(|e| CandidateMetric {
            name: e.metric.name.clone(),
            unit: e.metric.unit.clone(),
            direction: e.metric.direction,
            benchmarks: e.benchmarks.iter().map(|b| b.name.clone()).collect(),
            reflects: vec![THROUGHPUT_FEATURE.into(), "scalability".into(), "elasticity".into()],
        })
        .collect()
}

fn factor(name: &str, kind: FactorKind, role: FactorRole, levels: &[f64]) -> Factor {
    Factor { name: name.into(), kind, levels: levels.iter().map(|&l| Level::Number(l)).collect(), role, node: Some(name.into()) }
}

/// The 2^3 design over CPU cores, message size and client count.
pub fn design(replicates: u32, seed: u64) -> DesignSpec {
    DesignSpec {
        factors: vec![
            factor("cpu-cores", FactorKind::Resource, FactorRole::Design, &[1.0, 4.0]),
            factor("message-size", FactorKind::Workload, FactorRole::Design, &[64.0, 1024.0]),
            factor("client-count", FactorKind::Workload, FactorRole::Design, &[1.0, 8.0]),
        ],
        blocking: None,
        replicates,
        seed,
        responses: vec![TCP_METRIC.into(), MPI_METRIC.into()],
    }
}

/// Payloads of steps one to seven, in order.
pub fn study_steps(bundle: &KnowledgeBundle) -> Vec<StepPayload> {
    let selected = vec![TCP_METRIC.to_string(), MPI_METRIC.to_string()];
    let metric_refs: Vec<&str> = selected.iter().map(String::as_str).collect();
    let factors = bundle.lookup_factors(&["scalability"], &["iPerf"], &metric_refs).expect("sample features resolve");
    vec![
        StepPayload::RequirementRecognition { questions: requirement_questions() },
        StepPayload::FeatureIdentification { features: vec!["scalability".into(), "elasticity".into()] },
        StepPayload::MetricsBenchmarksListing(ListingPayload { candidates: catalogue_candidates(bundle) }),
        StepPayload::MetricsBenchmarksSelection(SelectionPayload {
            metrics: selected.clone(),
            benchmarks: vec!["iPerf".into(), "HPCC: b_eff".into()],
            boosting: vec![BoostingMetric { name: "transfer-index".into(), components: selected.clone(), weights: None }],
        }),
        StepPayload::FactorsListing(FactorListingPayload {
            resource: factors.resource.iter().map(|n| n.id.clone()).collect(),
            workload: factors.workload.iter().map(|n| n.id.clone()).collect(),
            quality: factors.quality,
        }),
        StepPayload::FactorsSelection {
            factors: vec![
                factor("cpu-cores", FactorKind::Resource, FactorRole::Design, &[1.0, 2.0, 4.0]),
                factor("memory-size", FactorKind::Resource, FactorRole::HeldConstant, &[4.0]),
                factor("message-size", FactorKind::Workload, FactorRole::Design, &[64.0, 1024.0]),
                factor("client-count", FactorKind::Workload, FactorRole::Design, &[1.0, 8.0]),
            ],
        },
        StepPayload::ExperimentalDesign { design: design(2, DESIGN_SEED) },
    ]
}

/// Deterministic stand-in for a transfer benchmark. Output depends only on
/// the factor levels and the replicate index.
pub fn fixture_adapter(delay_secs: f64) -> AdapterDef {
    let pause = if delay_secs > 0.0 { format!("sleep {delay_secs}; ") } else { String::new() };
    AdapterDef {
        name: "transfer-fixture".into(),
        command: format!(
            "{pause}c={{factor:cpu-cores}}; m={{factor:message-size}}; n={{factor:client-count}}; r={{replicate}}; \
             echo \"tcp throughput: $(( 200 * c + m / 8 - 3 * n + 5 * r )) Mbit/s\"; \
             echo \"mpi bandwidth: $(( 90 * c + m / 32 + 2 * c * n + 3 * r )) MB/s\""
        ),
        timeout_secs: 30.0,
        rules: vec![
            ExtractionRule { metric: TCP_METRIC.into(), extract: Extractor::Pattern(r"tcp throughput: (\S+)".into()), unit: "Mbit/s".into() },
            ExtractionRule { metric: MPI_METRIC.into(), extract: Extractor::Pattern(r"mpi bandwidth: (\S+)".into()), unit: "MB/s".into() },
        ],
        version_command: Some("echo transfer-fixture 1.0".into()),
    }
}

pub fn analysis_recipe() -> AnalysisRecipe {
    let directions: BTreeMap<String, Direction> =
        [(TCP_METRIC.to_string(), Direction::HigherBetter), (MPI_METRIC.to_string(), Direction::HigherBetter)].into();
    AnalysisRecipe {
        metrics: Vec::new(),
        anova: true,
        effects: true,
        charts: vec![ChartKind::Column, ChartKind::Pareto],
        boosting: Some(BoostingRecipe { by: "cpu-cores".into(), directions, weights: None }),
    }
}

pub fn conclusion() -> StepPayload {
    StepPayload::ConclusionDocumentation(ConclusionPayload {
        findings: vec!["Transfer speed grows with the number of CPU cores; message size is the second strongest factor.".into()],
    })
}
