use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementKind, FactorKind, KnowledgeBundle, WORKLOAD_SUB_KINDS};
use crate::reporting::EvaluationTemplate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueCode {
    UnsupportedSchema,
    DuplicateId,
    DanglingReference,
    Cycle,
    MissingKeywords,
    BadKeyword,
    NotAFeature,
    DuplicateMetric,
    NoBenchmarks,
    InvalidSubKind,
    KindMismatch,
    TemplateDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: IssueCode,
    /// Id of the offending element (or metric / template name).
    pub element: String,
    /// File and list position, e.g. `taxonomy.json[3]`.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    fn push(&mut self, severity: Severity, code: IssueCode, element: &str, location: String, message: String) {
        self.issues.push(ValidationIssue { severity, code, element: element.to_string(), location, message });
    }

    fn error(&mut self, code: IssueCode, element: &str, location: String, message: String) {
        self.push(Severity::Error, code, element, location, message);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            let sev = match issue.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{sev}: {} [{}] {}", issue.location, issue.element, issue.message)?;
        }
        Ok(())
    }
}

fn normalized_keyword(k: &str) -> String {
    k.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Checks every bundle invariant. Pure: the same bundle always yields the
/// same report.
pub fn validate_bundle(bundle: &KnowledgeBundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    if bundle.schema_version != crate::SCHEMA_VERSION {
        report.error(
            IssueCode::UnsupportedSchema,
            &bundle.domain,
            "bundle.json".into(),
            format!("schema_version {} is not supported (expected {})", bundle.schema_version, crate::SCHEMA_VERSION),
        );
    }

    let mut seen: BTreeMap<&str, String> = BTreeMap::new();
    let ids = bundle
        .taxonomy
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), format!("taxonomy.json[{i}]")))
        .chain(bundle.factors.iter().enumerate().map(|(i, f)| (f.id.as_str(), format!("factors.json[{i}]"))))
        .chain(bundle.blueprints.iter().enumerate().map(|(i, b)| (b.id.as_str(), format!("blueprints.json[{i}]"))));
    for (id, location) in ids {
        if let Some(first) = seen.get(id) {
            report.error(IssueCode::DuplicateId, id, location, format!("id already defined at {first}"));
        } else {
            seen.insert(id, location);
        }
    }

    check_taxonomy(bundle, &mut report);
    check_catalogue(bundle, &mut report);
    check_factors(bundle, &mut report);
    check_blueprints(bundle, &mut report);
    check_templates(bundle, &mut report);
    report
}

fn check_taxonomy(bundle: &KnowledgeBundle, report: &mut ValidationReport) {
    let index: BTreeMap<&str, usize> = bundle.taxonomy.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    for (i, element) in bundle.taxonomy.iter().enumerate() {
        let loc = format!("taxonomy.json[{i}]");
        if let Some(parent) = &element.parent {
            if !index.contains_key(parent.as_str()) {
                report.error(IssueCode::DanglingReference, &element.id, loc.clone(), format!("parent `{parent}` does not exist"));
            }
        }
        if element.kind == ElementKind::PerformanceFeature && element.keywords.is_empty() {
            report.error(IssueCode::MissingKeywords, &element.id, loc.clone(), "performance feature has no keywords".into());
        }
        for keyword in &element.keywords {
            if keyword.trim().is_empty() || normalized_keyword(keyword) != *keyword {
                report.error(
                    IssueCode::BadKeyword,
                    &element.id,
                    loc.clone(),
                    format!("keyword `{keyword}` must be non-empty, lowercase and single-spaced"),
                );
            }
        }
        // walk the parent chain; revisiting the start means a cycle
        let mut steps = 0;
        let mut cursor = element.parent.as_deref();
        while let Some(p) = cursor {
            if p == element.id {
                report.error(IssueCode::Cycle, &element.id, loc.clone(), "parent chain loops back to this element".into());
                break;
            }
            steps += 1;
            if steps > bundle.taxonomy.len() {
                break;
            }
            cursor = index.get(p).and_then(|&j| bundle.taxonomy[j].parent.as_deref());
        }
    }
}

fn check_catalogue(bundle: &KnowledgeBundle, report: &mut ValidationReport) {
    let mut metrics: BTreeSet<(&str, &str)> = BTreeSet::new();
    for (i, entry) in bundle.catalogue.iter().enumerate() {
        let loc = format!("catalogue.json[{i}]");
        match bundle.element(&entry.feature_id) {
            None => report.error(
                IssueCode::DanglingReference,
                &entry.feature_id,
                loc.clone(),
                format!("feature `{}` does not exist", entry.feature_id),
            ),
            Some(e) if e.kind != ElementKind::PerformanceFeature => report.error(
                IssueCode::NotAFeature,
                &entry.feature_id,
                loc.clone(),
                format!("`{}` is not a performance feature", entry.feature_id),
            ),
            Some(_) => {}
        }
        if !metrics.insert((entry.feature_id.as_str(), entry.metric.name.as_str())) {
            report.error(
                IssueCode::DuplicateMetric,
                &entry.metric.name,
                loc.clone(),
                format!("metric listed twice for `{}`", entry.feature_id),
            );
        }
        if entry.benchmarks.is_empty() && !entry.metric_only {
            report.error(
                IssueCode::NoBenchmarks,
                &entry.metric.name,
                loc,
                "metric has no benchmarks and is not flagged metric_only".into(),
            );
        }
    }
}

fn check_factors(bundle: &KnowledgeBundle, report: &mut ValidationReport) {
    let index: BTreeMap<&str, usize> = bundle.factors.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();
    for (i, node) in bundle.factors.iter().enumerate() {
        let loc = format!("factors.json[{i}]");
        if let Some(sub) = &node.sub_kind {
            if node.kind != FactorKind::Workload {
                report.push(
                    Severity::Warning,
                    IssueCode::InvalidSubKind,
                    &node.id,
                    loc.clone(),
                    format!("sub-kind `{sub}` is ignored on non-workload nodes"),
                );
            } else if !WORKLOAD_SUB_KINDS.contains(&sub.as_str()) {
                report.error(
                    IssueCode::InvalidSubKind,
                    &node.id,
                    loc.clone(),
                    format!("workload sub-kind `{sub}` is not one of {}", WORKLOAD_SUB_KINDS.join(", ")),
                );
            }
        }
        for child in &node.children {
            match index.get(child.as_str()) {
                None => report.error(IssueCode::DanglingReference, &node.id, loc.clone(), format!("child `{child}` does not exist")),
                Some(&j) if bundle.factors[j].kind != node.kind => report.error(
                    IssueCode::KindMismatch,
                    &node.id,
                    loc.clone(),
                    format!("child `{child}` belongs to a different factor tree"),
                ),
                Some(_) => {}
            }
        }
    }
    // depth-first search for a path leading back to each node
    for (i, node) in bundle.factors.iter().enumerate() {
        let mut stack: Vec<&str> = node.children.iter().map(String::as_str).collect();
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        while let Some(id) = stack.pop() {
            if id == node.id {
                report.error(IssueCode::Cycle, &node.id, format!("factors.json[{i}]"), "factor tree contains a cycle through this node".into());
                break;
            }
            if visited.insert(id) {
                if let Some(&j) = index.get(id) {
                    stack.extend(bundle.factors[j].children.iter().map(String::as_str));
                }
            }
        }
    }
}

fn check_blueprints(bundle: &KnowledgeBundle, report: &mut ValidationReport) {
    for (i, bp) in bundle.blueprints.iter().enumerate() {
        let loc = format!("blueprints.json[{i}]");
        match bundle.element(&bp.capacity_slot) {
            None => report.error(IssueCode::DanglingReference, &bp.id, loc.clone(), format!("capacity `{}` does not exist", bp.capacity_slot)),
            Some(e) if !matches!(e.kind, ElementKind::PerformanceFeature | ElementKind::Capacity) => report.error(
                IssueCode::KindMismatch,
                &bp.id,
                loc.clone(),
                format!("capacity slot `{}` is not a feature or capacity", bp.capacity_slot),
            ),
            Some(_) => {}
        }
        for (slots, kind) in [(&bp.resource_slots, FactorKind::Resource), (&bp.workload_slots, FactorKind::Workload)] {
            for slot in slots {
                match bundle.factor(slot) {
                    None => report.error(IssueCode::DanglingReference, &bp.id, loc.clone(), format!("factor `{slot}` does not exist")),
                    Some(f) if f.kind != kind => report.error(
                        IssueCode::KindMismatch,
                        &bp.id,
                        loc.clone(),
                        format!("slot `{slot}` must reference a {kind:?} factor"),
                    ),
                    Some(_) => {}
                }
            }
        }
    }
}

fn check_templates(bundle: &KnowledgeBundle, report: &mut ValidationReport) {
    for template in &bundle.templates {
        let loc = format!("templates/{}.json", template.id);
        check_template(bundle, template, &loc, report);
    }
}

fn check_template(bundle: &KnowledgeBundle, template: &EvaluationTemplate, loc: &str, report: &mut ValidationReport) {
    let origin = &template.pre_experimental.bundle;
    if origin.domain != bundle.domain {
        report.error(
            IssueCode::TemplateDomain,
            &template.id,
            loc.to_string(),
            format!("template targets domain `{}`, bundle is `{}`", origin.domain, bundle.domain),
        );
    } else if origin.version != bundle.version {
        report.push(
            Severity::Warning,
            IssueCode::TemplateDomain,
            &template.id,
            loc.to_string(),
            format!("template was built against version `{}`", origin.version),
        );
    }
    if bundle.element(&template.feature_id).is_none() {
        report.error(
            IssueCode::DanglingReference,
            &template.id,
            loc.to_string(),
            format!("feature `{}` does not exist", template.feature_id),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artefact::{BenchmarkDescriptor, CatalogueEntry, Direction, FactorNode, Metric, TaxonomyElement};

    fn feature(id: &str) -> TaxonomyElement {
        TaxonomyElement {
            id: id.into(),
            kind: ElementKind::PerformanceFeature,
            name: id.into(),
            definition: String::new(),
            parent: None,
            keywords: vec![id.into()],
            source: None,
        }
    }

    fn workload(id: &str, sub: Option<&str>, children: &[&str]) -> FactorNode {
        FactorNode {
            id: id.into(),
            kind: FactorKind::Workload,
            name: id.into(),
            sub_kind: sub.map(str::to_string),
            children: children.iter().map(|c| c.to_string()).collect(),
            value_domain: None,
            applies_to: vec![],
            source: None,
        }
    }

    fn codes(report: &ValidationReport) -> Vec<IssueCode> {
        report.errors().map(|i| i.code).collect()
    }

    #[test]
    fn empty_bundle_is_valid() {
        assert!(validate_bundle(&KnowledgeBundle::empty("d", "1")).is_valid());
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let mut b = KnowledgeBundle::empty("d", "1");
        let mut e = feature("speed");
        e.parent = Some("speed".into());
        b.taxonomy.push(e);
        assert_eq!(codes(&validate_bundle(&b)), [IssueCode::Cycle]);
    }

    #[test]
    fn longer_cycle_and_duplicates() {
        let mut b = KnowledgeBundle::empty("d", "1");
        let mut x = feature("x");
        x.parent = Some("y".into());
        let mut y = feature("y");
        y.parent = Some("x".into());
        b.taxonomy.extend([x, y, feature("x")]);
        let c = codes(&validate_bundle(&b));
        assert!(c.contains(&IssueCode::DuplicateId));
        assert!(c.contains(&IssueCode::Cycle));
    }

    #[test]
    fn bad_workload_sub_kind() {
        let mut b = KnowledgeBundle::empty("d", "1");
        b.factors.push(workload("w", Some("network"), &[]));
        let report = validate_bundle(&b);
        assert_eq!(codes(&report), [IssueCode::InvalidSubKind]);
        assert!(report.issues[0].message.contains("network"));
    }

    #[test]
    fn factor_cycle() {
        let mut b = KnowledgeBundle::empty("d", "1");
        b.factors.push(workload("a", Some("terminal"), &["b"]));
        b.factors.push(workload("b", None, &["a"]));
        assert!(codes(&validate_bundle(&b)).contains(&IssueCode::Cycle));
    }

    #[test]
    fn catalogue_checks() {
        let mut b = KnowledgeBundle::empty("d", "1");
        b.taxonomy.push(feature("tput"));
        let entry = |f: &str, m: &str, benches: usize| CatalogueEntry {
            feature_id: f.into(),
            metric: Metric { name: m.into(), unit: "MB/s".into(), direction: Direction::HigherBetter },
            benchmarks: (0..benches).map(|i| BenchmarkDescriptor { name: format!("b{i}"), source: String::new() }).collect(),
            metric_only: false,
        };
        b.catalogue.push(entry("ghost", "m", 1));
        let report = validate_bundle(&b);
        assert_eq!(codes(&report), [IssueCode::DanglingReference]);
        assert_eq!(report.issues[0].element, "ghost");

        b.catalogue = vec![entry("tput", "m", 1), entry("tput", "m", 1), entry("tput", "n", 0)];
        assert_eq!(codes(&validate_bundle(&b)), [IssueCode::DuplicateMetric, IssueCode::NoBenchmarks]);
        b.catalogue[2].metric_only = true;
        b.catalogue.remove(1);
        assert!(validate_bundle(&b).is_valid());
    }

    #[test]
    fn keywords_required_and_normalised() {
        let mut b = KnowledgeBundle::empty("d", "1");
        let mut e = feature("f");
        e.keywords.clear();
        b.taxonomy.push(e);
        let mut g = feature("g");
        g.keywords = vec!["Upper Case".into()];
        b.taxonomy.push(g);
        assert_eq!(codes(&validate_bundle(&b)), [IssueCode::MissingKeywords, IssueCode::BadKeyword]);
    }
}
