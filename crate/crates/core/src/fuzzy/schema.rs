//! On-disk JSON format for fuzzy rule-base files.

use serde::{Deserialize, Serialize};

use super::{FuzzyError, FuzzyModel, FuzzyRule, LinguisticVariable, MembershipFunction, Term};

/// One rule-base document: `inputs[]`, `output`, `rules[]`, `resolution`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub inputs: Vec<VariableDef>,
    pub output: VariableDef,
    pub rules: Vec<RuleDef>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    1001
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDef {
    pub name: String,
    pub universe: [f64; 2],
    pub terms: Vec<TermDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDef {
    pub label: String,
    pub kind: MfKind,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MfKind {
    Triangular,
    Trapezoidal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDef {
    #[serde(rename = "if")]
    pub conditions: Vec<CondDef>,
    pub then: CondDef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondDef {
    pub var: String,
    pub term: String,
}

fn build_term(def: &TermDef) -> Result<Term, FuzzyError> {
    let mf = match (def.kind, def.params.as_slice()) {
        (MfKind::Triangular, &[a, b, c]) => MembershipFunction::Triangular { a, b, c },
        (MfKind::Trapezoidal, &[a, b, c, d]) => MembershipFunction::Trapezoidal { a, b, c, d },
        _ => {
            return Err(FuzzyError::Parse(format!(
                "term `{}`: {:?} takes {} params, got {}",
                def.label,
                def.kind,
                match def.kind {
                    MfKind::Triangular => 3,
                    MfKind::Trapezoidal => 4,
                },
                def.params.len()
            )))
        }
    };
    Ok(Term {
        label: def.label.clone(),
        mf,
    })
}

fn build_variable(def: &VariableDef) -> Result<LinguisticVariable, FuzzyError> {
    let terms = def.terms.iter().map(build_term).collect::<Result<_, _>>()?;
    Ok(LinguisticVariable::new(
        def.name.clone(),
        def.universe[0],
        def.universe[1],
        terms,
    ))
}

pub(super) fn parse(text: &str) -> Result<FuzzyModel, FuzzyError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| FuzzyError::Parse(e.to_string()))?;
    let inputs: Vec<LinguisticVariable> =
        file.inputs.iter().map(build_variable).collect::<Result<_, _>>()?;
    let output = build_variable(&file.output)?;

    let mut rules = Vec::with_capacity(file.rules.len());
    for def in &file.rules {
        let mut antecedents = Vec::with_capacity(def.conditions.len());
        for cond in &def.conditions {
            let var = inputs
                .iter()
                .position(|v| v.name == cond.var)
                .ok_or_else(|| FuzzyError::UnknownVariable(cond.var.clone()))?;
            let term = inputs[var]
                .term_index(&cond.term)
                .ok_or_else(|| FuzzyError::UnknownTerm {
                    var: cond.var.clone(),
                    term: cond.term.clone(),
                })?;
            antecedents.push((var, term));
        }
        if def.then.var != output.name {
            return Err(FuzzyError::UnknownVariable(def.then.var.clone()));
        }
        let consequent = output
            .term_index(&def.then.term)
            .ok_or_else(|| FuzzyError::UnknownTerm {
                var: def.then.var.clone(),
                term: def.then.term.clone(),
            })?;
        rules.push(FuzzyRule {
            antecedents,
            consequent,
        });
    }
    FuzzyModel::new(inputs, output, rules, file.resolution)
}
