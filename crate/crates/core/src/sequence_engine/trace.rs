use std::collections::BTreeSet;
use std::fmt;

use crate::factdb::Resolver;

/// One derivation step: `step-id | rule | inputs | output | citation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub id: String,
    pub rule: String,
    pub inputs: Vec<String>,
    pub output: String,
    pub citation: String,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inputs = if self.inputs.is_empty() { "-".to_string() } else { self.inputs.join(", ") };
        write!(f, "{} | {} | {} | {} | {}", self.id, self.rule, inputs, self.output, self.citation)
    }
}

/// Steps in order. Each step cites the facts first used since the previous step.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub steps: Vec<Step>,
    prefix: String,
    seen: BTreeSet<String>,
}

impl Trace {
    pub fn new(prefix: &str) -> Self {
        Trace { steps: Vec::new(), prefix: prefix.to_string(), seen: BTreeSet::new() }
    }

    pub fn step(&mut self, rule: &str, inputs: &[String], output: &str, resolver: &Resolver) {
        let fresh: Vec<String> = resolver.cited().into_iter().filter(|c| !self.seen.contains(c)).collect();
        self.seen.extend(fresh.iter().cloned());
        let citation = if fresh.is_empty() { "-".to_string() } else { fresh.join(", ") };
        self.push(rule, inputs, output, &citation);
    }

    pub fn push(&mut self, rule: &str, inputs: &[String], output: &str, citation: &str) {
        let id = format!("{}{:02}", self.prefix, self.steps.len() + 1);
        self.steps.push(Step {
            id,
            rule: rule.to_string(),
            inputs: inputs.to_vec(),
            output: output.to_string(),
            citation: citation.to_string(),
        });
    }

    pub fn extend(&mut self, other: Trace) {
        for s in other.steps {
            self.push(&s.rule, &s.inputs, &s.output, &s.citation);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}
