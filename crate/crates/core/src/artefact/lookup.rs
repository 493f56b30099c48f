use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ArtefactError, CatalogueEntry, ElementKind, FactorKind, FactorNode, KnowledgeBundle, TaxonomyElement};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FactorCandidates {
    pub resource: Vec<FactorNode>,
    pub workload: Vec<FactorNode>,
    /// Quality factors are the selected metrics themselves.
    pub quality: Vec<String>,
}

/// One keyword hit. `start` and `end` are character offsets into the text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermMatch {
    pub element_id: String,
    pub keyword: String,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

fn slug(s: &str) -> String {
    s.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).collect::<Vec<_>>().join("-").to_lowercase()
}

fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

impl KnowledgeBundle {
    /// Finds a performance feature by id, by name (case-insensitive) or by
    /// the slug of either.
    pub fn resolve_feature(&self, key: &str) -> Result<&TaxonomyElement, ArtefactError> {
        let features = || self.taxonomy.iter().filter(|e| e.kind == ElementKind::PerformanceFeature);
        let wanted = slug(key);
        features()
            .find(|e| e.id == key)
            .or_else(|| features().find(|e| e.name.eq_ignore_ascii_case(key)))
            .or_else(|| features().find(|e| slug(&e.id) == wanted || slug(&e.name) == wanted))
            .ok_or_else(|| ArtefactError::UnknownFeature(key.to_string()))
    }

    /// Catalogue entries of one feature, in definition order.
    pub fn lookup_metrics(&self, feature: &str) -> Result<Vec<&CatalogueEntry>, ArtefactError> {
        let id = &self.resolve_feature(feature)?.id;
        Ok(self.catalogue.iter().filter(|c| &c.feature_id == id).collect())
    }

    /// Candidate factors for the given features, benchmarks and metrics.
    ///
    /// A node linked through `applies_to` brings its whole subtree. When no
    /// node of a kind carries links, the whole tree of that kind is returned
    /// for a non-empty query.
    pub fn lookup_factors(&self, features: &[&str], benchmarks: &[&str], metrics: &[&str]) -> Result<FactorCandidates, ArtefactError> {
        let feature_ids: Vec<&str> = features.iter().map(|f| self.resolve_feature(f).map(|e| e.id.as_str())).collect::<Result<_, _>>()?;
        Ok(FactorCandidates {
            resource: self.linked_factors(FactorKind::Resource, &feature_ids),
            workload: self.linked_factors(FactorKind::Workload, benchmarks),
            quality: metrics.iter().map(|m| m.to_string()).collect(),
        })
    }

    fn linked_factors(&self, kind: FactorKind, keys: &[&str]) -> Vec<FactorNode> {
        if keys.is_empty() {
            return Vec::new();
        }
        let of_kind = || self.factors.iter().filter(move |f| f.kind == kind);
        if of_kind().all(|f| f.applies_to.is_empty()) {
            return of_kind().cloned().collect();
        }
        let norm: BTreeSet<String> = keys.iter().map(|k| k.to_lowercase()).collect();
        let mut chosen: BTreeSet<&str> = BTreeSet::new();
        let mut stack: Vec<&str> = of_kind()
            .filter(|f| f.applies_to.iter().any(|a| norm.contains(&a.to_lowercase())))
            .map(|f| f.id.as_str())
            .collect();
        while let Some(id) = stack.pop() {
            if chosen.insert(id) {
                if let Some(node) = self.factor(id) {
                    stack.extend(node.children.iter().map(String::as_str));
                }
            }
        }
        of_kind().filter(|f| chosen.contains(f.id.as_str())).cloned().collect()
    }

    /// Case-insensitive whole-word keyword matches over all taxonomy
    /// elements. Longer matches win over shorter overlapping ones; the result
    /// is sorted by span start.
    pub fn match_taxonomy_terms(&self, text: &str) -> Vec<TermMatch> {
        let chars: Vec<char> = text.chars().collect();
        let folded: Vec<char> = chars.iter().map(|&c| fold(c)).collect();

        let mut candidates: Vec<(usize, usize, usize, usize)> = Vec::new(); // start, end, element, keyword
        for (ei, element) in self.taxonomy.iter().enumerate() {
            for (ki, keyword) in element.keywords.iter().enumerate() {
                let words: Vec<Vec<char>> = keyword.split_whitespace().map(|w| w.chars().map(fold).collect()).collect();
                if words.is_empty() {
                    continue;
                }
                for start in 0..folded.len() {
                    if let Some(end) = match_at(&folded, start, &words) {
                        candidates.push((start, end, ei, ki));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));

        let mut taken = vec![false; folded.len()];
        let mut accepted = Vec::new();
        for (start, end, ei, ki) in candidates {
            if taken[start..end].iter().any(|&t| t) {
                continue;
            }
            taken[start..end].iter_mut().for_each(|t| *t = true);
            accepted.push(TermMatch {
                element_id: self.taxonomy[ei].id.clone(),
                keyword: self.taxonomy[ei].keywords[ki].clone(),
                start,
                end,
                text: chars[start..end].iter().collect(),
            });
        }
        accepted.sort_by_key(|m| m.start);
        accepted
    }
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric()
}

fn match_at(text: &[char], start: usize, words: &[Vec<char>]) -> Option<usize> {
    if start > 0 && is_word(text[start - 1]) {
        return None;
    }
    let mut pos = start;
    for (i, word) in words.iter().enumerate() {
        if i > 0 {
            let gap = text[pos..].iter().take_while(|c| c.is_whitespace()).count();
            if gap == 0 {
                return None;
            }
            pos += gap;
        }
        if !text[pos..].starts_with(word) {
            return None;
        }
        pos += word.len();
    }
    if pos < text.len() && is_word(text[pos]) {
        return None;
    }
    Some(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artefact::{BenchmarkDescriptor, Direction, Metric};
    use proptest::prelude::*;

    fn element(id: &str, keywords: &[&str]) -> TaxonomyElement {
        TaxonomyElement {
            id: id.into(),
            kind: ElementKind::PerformanceFeature,
            name: id.replace('-', " "),
            definition: String::new(),
            parent: None,
            keywords: keywords.iter().map(|k| k.to_string()).collect(),
            source: None,
        }
    }

    fn node(id: &str, kind: FactorKind, children: &[&str], applies: &[&str]) -> FactorNode {
        FactorNode {
            id: id.into(),
            kind,
            name: id.into(),
            sub_kind: None,
            children: children.iter().map(|c| c.to_string()).collect(),
            value_domain: None,
            applies_to: applies.iter().map(|c| c.to_string()).collect(),
            source: None,
        }
    }

    fn bundle() -> KnowledgeBundle {
        let mut b = KnowledgeBundle::empty("d", "1");
        b.taxonomy = vec![
            element("data-throughput", &["throughput", "data throughput"]),
            element("reliability", &["reliable", "reliability"]),
            element("variability", &["variable", "variability"]),
        ];
        b.catalogue = vec![CatalogueEntry {
            feature_id: "data-throughput".into(),
            metric: Metric { name: "speed".into(), unit: "MB/s".into(), direction: Direction::HigherBetter },
            benchmarks: vec![BenchmarkDescriptor { name: "bench".into(), source: String::new() }],
            metric_only: false,
        }];
        b
    }

    #[test]
    fn resolve_by_id_name_or_slug() {
        let b = bundle();
        for key in ["data-throughput", "data throughput", "Data Throughput"] {
            assert_eq!(b.resolve_feature(key).unwrap().id, "data-throughput");
        }
        assert!(matches!(b.resolve_feature("latency"), Err(ArtefactError::UnknownFeature(_))));
    }

    #[test]
    fn metrics_lookup() {
        let b = bundle();
        assert_eq!(b.lookup_metrics("data-throughput").unwrap().len(), 1);
        assert!(b.lookup_metrics("reliability").unwrap().is_empty());
        assert!(b.lookup_metrics("nope").is_err());
    }

    #[test]
    fn factors_follow_links_and_subtrees() {
        let mut b = bundle();
        b.factors = vec![
            node("vm", FactorKind::Resource, &["vm-size"], &["data-throughput"]),
            node("vm-size", FactorKind::Resource, &[], &[]),
            node("disk", FactorKind::Resource, &[], &["reliability"]),
            node("terminal", FactorKind::Workload, &["clients"], &[]),
            node("clients", FactorKind::Workload, &[], &[]),
        ];
        let c = b.lookup_factors(&["data throughput"], &["bench"], &["speed"]).unwrap();
        let ids = |v: &[FactorNode]| v.iter().map(|n| n.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&c.resource), ["vm", "vm-size"]);
        assert_eq!(ids(&c.workload), ["terminal", "clients"]);
        assert_eq!(c.quality, ["speed"]);

        assert_eq!(b.lookup_factors(&[], &[], &[]).unwrap(), FactorCandidates::default());
        assert!(b.lookup_factors(&["ghost"], &[], &[]).is_err());
    }

    #[test]
    fn load_intensity_sentence() {
        let m = bundle().match_taxonomy_terms("reliable performance under highly variable load intensities");
        let ids: Vec<_> = m.iter().map(|t| t.element_id.as_str()).collect();
        assert_eq!(ids, ["reliability", "variability"]);
        assert_eq!((m[0].start, m[0].end), (0, 8));
        assert_eq!(m[1].text, "variable");
    }

    #[test]
    fn longest_match_wins_and_words_are_whole() {
        let m = bundle().match_taxonomy_terms("Data  Throughput and throughputs; THROUGHPUT.");
        let got: Vec<_> = m.iter().map(|t| (t.keyword.as_str(), t.text.as_str())).collect();
        assert_eq!(got, [("data throughput", "Data  Throughput"), ("throughput", "THROUGHPUT")]);
    }

    #[test]
    fn empty_text() {
        assert!(bundle().match_taxonomy_terms("").is_empty());
    }

    /// Naive scan: every whole-word occurrence of `word` in lowercase ASCII text.
    fn brute_force(text: &str, word: &str) -> Vec<usize> {
        let t = text.to_lowercase();
        (0..t.len())
            .filter(|&i| t[i..].starts_with(word))
            .filter(|&i| i == 0 || !t.as_bytes()[i - 1].is_ascii_alphanumeric())
            .filter(|&i| t.as_bytes().get(i + word.len()).is_none_or(|c| !c.is_ascii_alphanumeric()))
            .collect()
    }

    #[test]
    fn repeated_keyword_gives_two_spans() {
        let text = "variable input, variable output";
        let m = bundle().match_taxonomy_terms(text);
        assert_eq!(m.iter().map(|t| t.start).collect::<Vec<_>>(), brute_force(text, "variable"));
        assert!(m.iter().all(|t| t.element_id == "variability"));
    }

    proptest! {
        #[test]
        fn spans_never_overlap(words in prop::collection::vec(
            prop::sample::select(vec!["data", "Throughput", "reliable", "x", "variable", "VARIABILITY", "  ", ","]), 0..30)) {
            let text = words.join(" ");
            let matches = bundle().match_taxonomy_terms(&text);
            let chars: Vec<char> = text.chars().collect();
            for pair in matches.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
            for m in &matches {
                let span: String = chars[m.start..m.end].iter().collect();
                let norm = span.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
                prop_assert_eq!(norm, m.keyword.clone());
            }
            // single-word keywords agree with the naive scan when no
            // multi-word phrase could have absorbed them
            if !text.to_lowercase().contains("data") {
                let hits: Vec<usize> = matches.iter().filter(|m| m.keyword == "variable").map(|m| m.start).collect();
                prop_assert_eq!(hits, brute_force(&text, "variable"));
            }
        }
    }
}
