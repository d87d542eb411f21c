//! Mamdani-style fuzzy inference: membership functions, linguistic variables,
//! rule bases loaded as data, min/max inference and centroid defuzzification.
//!
//! Models are immutable after construction; [`FuzzyModel::evaluate`] is a pure
//! function of the model and its crisp inputs.

mod schema;

pub use schema::ModelFile;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FuzzyError {
    /// The aggregated output set is identically zero: no rule fired.
    /// Callers are expected to fall back to their crisp policy.
    #[error("no rule fired for inputs {inputs:?}")]
    NoRuleFired { inputs: Vec<f64> },
    #[error("fuzzy model invalid: {0}")]
    Invalid(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown term `{term}` on variable `{var}`")]
    UnknownTerm { var: String, term: String },
    #[error("model expects {expected} inputs, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("malformed model file: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Membership functions
// ---------------------------------------------------------------------------

/// Piecewise-linear membership function over the owning variable's universe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    /// Degree of membership of `x`, in [0, 1]. Total function: 0 outside the
    /// support, exactly 1 on the peak/plateau, linear ramps in between.
    pub fn degree(&self, x: f64) -> f64 {
        match *self {
            MembershipFunction::Triangular { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x == b {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (c - x) / (c - b)
                }
            }
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                if x < a || x > d {
                    0.0
                } else if x >= b && x <= c {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            }
        }
    }

    /// Closed interval outside of which the degree is zero.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            MembershipFunction::Triangular { a, c, .. } => (a, c),
            MembershipFunction::Trapezoidal { a, d, .. } => (a, d),
        }
    }

    fn validate(&self) -> Result<(), FuzzyError> {
        let ok = match *self {
            MembershipFunction::Triangular { a, b, c } => {
                a.is_finite() && c.is_finite() && a <= b && b <= c
            }
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                a.is_finite() && d.is_finite() && a <= b && b <= c && c <= d
            }
        };
        if ok {
            Ok(())
        } else {
            Err(FuzzyError::Invalid(format!(
                "membership parameters out of order: {self:?}"
            )))
        }
    }

    /// Affine-remap every parameter from `(lo, hi)` onto `(lo2, hi2)`.
    pub(crate) fn rescaled(&self, lo: f64, hi: f64, lo2: f64, hi2: f64) -> Self {
        let map = |p: f64| lo2 + (p - lo) / (hi - lo) * (hi2 - lo2);
        match *self {
            MembershipFunction::Triangular { a, b, c } => MembershipFunction::Triangular {
                a: map(a),
                b: map(b),
                c: map(c),
            },
            MembershipFunction::Trapezoidal { a, b, c, d } => MembershipFunction::Trapezoidal {
                a: map(a),
                b: map(b),
                c: map(c),
                d: map(d),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Linguistic variables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub mf: MembershipFunction,
}

/// A named quantity over a closed real universe, partitioned into labeled
/// fuzzy terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinguisticVariable {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl LinguisticVariable {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, terms: Vec<Term>) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
            terms,
        }
    }

    /// Default Low/Medium/High triangular partition of `[lo, hi]`.
    pub fn three_terms(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        let mid = (lo + hi) / 2.0;
        Self::new(
            name,
            lo,
            hi,
            vec![
                Term {
                    label: "Low".into(),
                    mf: MembershipFunction::Triangular { a: lo, b: lo, c: mid },
                },
                Term {
                    label: "Medium".into(),
                    mf: MembershipFunction::Triangular { a: lo, b: mid, c: hi },
                },
                Term {
                    label: "High".into(),
                    mf: MembershipFunction::Triangular { a: mid, b: hi, c: hi },
                },
            ],
        )
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// One degree per term, in term order, evaluated after clamping `x` into
    /// the universe.
    pub fn fuzzify(&self, x: f64) -> Vec<f64> {
        let x = self.clamp(x);
        self.terms.iter().map(|t| t.mf.degree(x)).collect()
    }

    pub fn term_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    fn validate(&self) -> Result<(), FuzzyError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(FuzzyError::Invalid(format!(
                "variable `{}`: universe [{}, {}] is not a proper interval",
                self.name, self.lo, self.hi
            )));
        }
        if self.terms.is_empty() {
            return Err(FuzzyError::Invalid(format!(
                "variable `{}` has no terms",
                self.name
            )));
        }
        for t in &self.terms {
            t.mf.validate()?;
            let (a, b) = t.mf.support();
            if a < self.lo - 1e-9 || b > self.hi + 1e-9 {
                return Err(FuzzyError::Invalid(format!(
                    "variable `{}` term `{}`: support [{a}, {b}] outside universe [{}, {}]",
                    self.name, t.label, self.lo, self.hi
                )));
            }
        }
        for (i, t) in self.terms.iter().enumerate() {
            if self.terms[i + 1..].iter().any(|u| u.label == t.label) {
                return Err(FuzzyError::Invalid(format!(
                    "variable `{}`: duplicate term label `{}`",
                    self.name, t.label
                )));
            }
        }
        // Coverage: every point of the universe belongs to at least one term.
        const COVERAGE_SAMPLES: usize = 501;
        for i in 0..COVERAGE_SAMPLES {
            let x = self.lo + (self.hi - self.lo) * i as f64 / (COVERAGE_SAMPLES - 1) as f64;
            if self.terms.iter().all(|t| t.mf.degree(x) <= 0.0) {
                return Err(FuzzyError::Invalid(format!(
                    "variable `{}`: no term covers x = {x}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn rescale_universe(&mut self, lo2: f64, hi2: f64) {
        for t in &mut self.terms {
            t.mf = t.mf.rescaled(self.lo, self.hi, lo2, hi2);
        }
        self.lo = lo2;
        self.hi = hi2;
    }
}

// ---------------------------------------------------------------------------
// Rules and models
// ---------------------------------------------------------------------------

/// AND-joined antecedents over distinct input variables, one consequent term.
/// Indices are resolved against the owning model at load time.
#[derive(Debug, Clone)]
pub struct FuzzyRule {
    /// (input variable index, term index) pairs.
    pub antecedents: Vec<(usize, usize)>,
    /// Term index on the output variable.
    pub consequent: usize,
}

/// Activation of one rule: Mamdani AND, the minimum over antecedent degrees.
pub fn rule_activation(rule: &FuzzyRule, fuzzified: &[Vec<f64>]) -> f64 {
    rule.antecedents
        .iter()
        .map(|&(var, term)| fuzzified[var][term])
        .fold(1.0, f64::min)
}

/// Output fuzzy set sampled at evenly spaced points of the output universe.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSet {
    pub lo: f64,
    pub hi: f64,
    pub degrees: Vec<f64>,
}

impl AggregatedSet {
    pub fn abscissa(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.degrees.len() - 1) as f64
    }

    /// Centroid defuzzification: trapezoid-weighted mean of the sample
    /// abscissae by degree. Errors when no sample is positive.
    pub fn centroid(&self) -> Result<f64, FuzzyError> {
        let n = self.degrees.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &mu) in self.degrees.iter().enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            num += w * mu * self.abscissa(i);
            den += w * mu;
        }
        if den > 0.0 {
            Ok(num / den)
        } else {
            Err(FuzzyError::NoRuleFired { inputs: vec![] })
        }
    }
}

/// An immutable Mamdani model: input variables, one output variable, a rule
/// base, and the sample count used for defuzzification.
#[derive(Debug, Clone)]
pub struct FuzzyModel {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<FuzzyRule>,
    resolution: usize,
    /// Output-term membership pre-sampled on the defuzzification grid.
    consequent_samples: Vec<Vec<f64>>,
}

impl FuzzyModel {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: Vec<FuzzyRule>,
        resolution: usize,
    ) -> Result<Self, FuzzyError> {
        if resolution < 2 {
            return Err(FuzzyError::Invalid(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        if rules.is_empty() {
            return Err(FuzzyError::Invalid("rule base is empty".into()));
        }
        for v in &inputs {
            v.validate()?;
        }
        output.validate()?;
        for (ri, rule) in rules.iter().enumerate() {
            if rule.antecedents.is_empty() {
                return Err(FuzzyError::Invalid(format!("rule {ri} has no antecedents")));
            }
            let mut seen = vec![false; inputs.len()];
            for &(var, term) in &rule.antecedents {
                let v = inputs
                    .get(var)
                    .ok_or_else(|| FuzzyError::Invalid(format!("rule {ri}: bad variable index")))?;
                if term >= v.terms.len() {
                    return Err(FuzzyError::Invalid(format!("rule {ri}: bad term index")));
                }
                if seen[var] {
                    return Err(FuzzyError::Invalid(format!(
                        "rule {ri}: variable `{}` appears twice",
                        v.name
                    )));
                }
                seen[var] = true;
            }
            if rule.consequent >= output.terms.len() {
                return Err(FuzzyError::Invalid(format!(
                    "rule {ri}: bad consequent term index"
                )));
            }
        }
        let consequent_samples = sample_terms(&output, resolution);
        let model = Self {
            inputs,
            output,
            rules,
            resolution,
            consequent_samples,
        };
        model.check_completeness()?;
        Ok(model)
    }

    /// Parse and build a model from its JSON rule-base document.
    pub fn from_json(text: &str) -> Result<Self, FuzzyError> {
        schema::parse(text)
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn input_index(&self, name: &str) -> Result<usize, FuzzyError> {
        self.inputs
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| FuzzyError::UnknownVariable(name.into()))
    }

    /// Rebuild with a different defuzzification resolution.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self, FuzzyError> {
        Self::new(
            self.inputs.clone(),
            self.output.clone(),
            self.rules.clone(),
            resolution,
        )
    }

    /// Rescale the universe of the named input variable (membership shapes
    /// are remapped affinely). Used to bind distance universes to the loaded
    /// circulation graph.
    pub fn rescale_input(&mut self, name: &str, lo: f64, hi: f64) -> Result<(), FuzzyError> {
        let idx = self.input_index(name)?;
        self.inputs[idx].rescale_universe(lo, hi);
        Ok(())
    }

    /// Per-variable fuzzified degrees for a full crisp input vector.
    pub fn fuzzify_inputs(&self, inputs: &[f64]) -> Result<Vec<Vec<f64>>, FuzzyError> {
        if inputs.len() != self.inputs.len() {
            return Err(FuzzyError::InputArity {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        Ok(self
            .inputs
            .iter()
            .zip(inputs)
            .map(|(v, &x)| v.fuzzify(x))
            .collect())
    }

    /// Clip (min) implication per fired rule, pointwise max aggregation.
    pub fn infer(&self, inputs: &[f64]) -> Result<AggregatedSet, FuzzyError> {
        let fuzzified = self.fuzzify_inputs(inputs)?;
        let mut degrees = vec![0.0; self.resolution];
        for rule in &self.rules {
            let act = rule_activation(rule, &fuzzified);
            if act <= 0.0 {
                continue;
            }
            let samples = &self.consequent_samples[rule.consequent];
            for (d, &s) in degrees.iter_mut().zip(samples) {
                let clipped = act.min(s);
                if clipped > *d {
                    *d = clipped;
                }
            }
        }
        Ok(AggregatedSet {
            lo: self.output.lo,
            hi: self.output.hi,
            degrees,
        })
    }

    /// Full pipeline: fuzzify, activate, aggregate, defuzzify.
    pub fn evaluate(&self, inputs: &[f64]) -> Result<f64, FuzzyError> {
        self.infer(inputs)?.centroid().map_err(|_| FuzzyError::NoRuleFired {
            inputs: inputs.to_vec(),
        })
    }

    /// Convenience for callers holding name-keyed inputs; order-insensitive.
    pub fn evaluate_named(&self, inputs: &[(&str, f64)]) -> Result<f64, FuzzyError> {
        let mut crisp = vec![f64::NAN; self.inputs.len()];
        for &(name, x) in inputs {
            crisp[self.input_index(name)?] = x;
        }
        if let Some(i) = crisp.iter().position(|x| x.is_nan()) {
            return Err(FuzzyError::UnknownVariable(format!(
                "missing input `{}`",
                self.inputs[i].name
            )));
        }
        self.evaluate(&crisp)
    }

    /// Every point of a sampling grid over the input space must fire at least
    /// one rule, so no input combination can defuzzify to nothing.
    fn check_completeness(&self) -> Result<(), FuzzyError> {
        const GRID: usize = 9;
        let n = self.inputs.len();
        let mut idx = vec![0usize; n];
        loop {
            let point: Vec<f64> = self
                .inputs
                .iter()
                .zip(&idx)
                .map(|(v, &i)| v.lo + (v.hi - v.lo) * i as f64 / (GRID - 1) as f64)
                .collect();
            let fuzzified: Vec<Vec<f64>> = self
                .inputs
                .iter()
                .zip(&point)
                .map(|(v, &x)| v.fuzzify(x))
                .collect();
            if self
                .rules
                .iter()
                .all(|r| rule_activation(r, &fuzzified) <= 0.0)
            {
                return Err(FuzzyError::Invalid(format!(
                    "no rule fires at grid point {point:?}"
                )));
            }
            // advance the mixed-radix counter
            let mut k = 0;
            loop {
                if k == n {
                    return Ok(());
                }
                idx[k] += 1;
                if idx[k] < GRID {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

fn sample_terms(output: &LinguisticVariable, resolution: usize) -> Vec<Vec<f64>> {
    output
        .terms
        .iter()
        .map(|t| {
            (0..resolution)
                .map(|i| {
                    let x =
                        output.lo + (output.hi - output.lo) * i as f64 / (resolution - 1) as f64;
                    t.mf.degree(x)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: f64, b: f64, c: f64) -> MembershipFunction {
        MembershipFunction::Triangular { a, b, c }
    }

    fn trap(a: f64, b: f64, c: f64, d: f64) -> MembershipFunction {
        MembershipFunction::Trapezoidal { a, b, c, d }
    }

    #[test]
    fn triangular_degrees() {
        let mf = tri(0.0, 0.5, 1.0);
        assert_eq!(mf.degree(0.5), 1.0);
        assert_eq!(mf.degree(0.25), 0.5);
        assert_eq!(mf.degree(-0.1), 0.0);
        assert_eq!(mf.degree(1.1), 0.0);
        assert_eq!(mf.degree(0.0), 0.0);
        assert_eq!(mf.degree(1.0), 0.0);
    }

    #[test]
    fn triangular_vertical_edge() {
        // a == b: peak sits on the left edge of the support
        let mf = tri(0.0, 0.0, 0.5);
        assert_eq!(mf.degree(0.0), 1.0);
        assert_eq!(mf.degree(0.25), 0.5);
        assert_eq!(mf.degree(0.5), 0.0);
    }

    #[test]
    fn trapezoidal_degrees() {
        let mf = trap(0.0, 0.2, 0.8, 1.0);
        assert_eq!(mf.degree(0.9), 0.5);
        assert_eq!(mf.degree(0.5), 1.0);
        assert_eq!(mf.degree(0.2), 1.0);
        assert_eq!(mf.degree(0.1), 0.5);
    }

    #[test]
    fn fuzzify_three_term_variable() {
        let v = LinguisticVariable::three_terms("x", 0.0, 1.0);
        assert_eq!(v.fuzzify(0.5), vec![0.0, 1.0, 0.0]);
        assert_eq!(v.fuzzify(0.0), vec![1.0, 0.0, 0.0]);
        assert_eq!(v.fuzzify(0.75), vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn fuzzify_clamps_out_of_universe_inputs() {
        let v = LinguisticVariable::three_terms("x", 0.0, 1.0);
        assert_eq!(v.fuzzify(-3.0), v.fuzzify(0.0));
        assert_eq!(v.fuzzify(42.0), v.fuzzify(1.0));
    }

    #[test]
    fn rule_activation_is_min() {
        let rule = FuzzyRule {
            antecedents: vec![(0, 0), (1, 1)],
            consequent: 0,
        };
        let fuzzified = vec![vec![0.6, 0.0], vec![0.0, 0.3]];
        assert_eq!(rule_activation(&rule, &fuzzified), 0.3);

        let zeroed = vec![vec![0.0, 0.0], vec![0.0, 0.9]];
        assert_eq!(rule_activation(&rule, &zeroed), 0.0);

        let single = FuzzyRule {
            antecedents: vec![(0, 0)],
            consequent: 0,
        };
        assert_eq!(rule_activation(&single, &[vec![0.7]]), 0.7);
    }

    fn toy_model() -> FuzzyModel {
        let input = LinguisticVariable::three_terms("x", 0.0, 1.0);
        let output = LinguisticVariable::three_terms("y", 0.0, 1.0);
        let rules = vec![
            FuzzyRule { antecedents: vec![(0, 0)], consequent: 0 },
            FuzzyRule { antecedents: vec![(0, 1)], consequent: 1 },
            FuzzyRule { antecedents: vec![(0, 2)], consequent: 2 },
        ];
        FuzzyModel::new(vec![input], output, rules, 1001).unwrap()
    }

    #[test]
    fn infer_single_rule_full_activation_equals_sampled_term() {
        let m = toy_model();
        let agg = m.infer(&[0.5]).unwrap();
        let medium = tri(0.0, 0.5, 1.0);
        for (i, &d) in agg.degrees.iter().enumerate() {
            assert!((d - medium.degree(agg.abscissa(i))).abs() < 1e-12);
        }
    }

    #[test]
    fn infer_symmetric_activations_yield_symmetric_aggregate() {
        // x = 0.25 activates Low and Medium equally at 0.5; the Low/High pair
        // is exercised via direct construction instead.
        let input = LinguisticVariable::three_terms("x", 0.0, 1.0);
        let output = LinguisticVariable::new(
            "y",
            0.0,
            1.0,
            vec![
                Term { label: "Low".into(), mf: tri(0.0, 0.0, 1.0) },
                Term { label: "High".into(), mf: tri(0.0, 1.0, 1.0) },
            ],
        );
        let rules = vec![
            FuzzyRule { antecedents: vec![(0, 0)], consequent: 0 },
            FuzzyRule { antecedents: vec![(0, 2)], consequent: 1 },
            FuzzyRule { antecedents: vec![(0, 1)], consequent: 0 },
            FuzzyRule { antecedents: vec![(0, 1)], consequent: 1 },
        ];
        let m = FuzzyModel::new(vec![input], output, rules, 1001).unwrap();
        let agg = m.infer(&[0.5]).unwrap();
        let n = agg.degrees.len();
        for i in 0..n {
            assert!((agg.degrees[i] - agg.degrees[n - 1 - i]).abs() < 1e-12);
        }
        assert!((agg.centroid().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn centroid_of_unclipped_triangle_is_its_peak() {
        let out = LinguisticVariable::new(
            "y",
            0.0,
            1.0,
            vec![Term { label: "Mid".into(), mf: tri(0.0, 0.5, 1.0) }],
        );
        let agg = AggregatedSet {
            lo: 0.0,
            hi: 1.0,
            degrees: (0..1001)
                .map(|i| out.terms[0].mf.degree(i as f64 / 1000.0))
                .collect(),
        };
        assert!((agg.centroid().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn centroid_of_all_zero_aggregate_is_no_rule_fired() {
        let agg = AggregatedSet { lo: 0.0, hi: 1.0, degrees: vec![0.0; 11] };
        assert!(matches!(agg.centroid(), Err(FuzzyError::NoRuleFired { .. })));
    }

    #[test]
    fn evaluate_stays_within_output_universe() {
        let m = toy_model();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let y = m.evaluate(&[x]).unwrap();
            assert!((0.0..=1.0).contains(&y), "y = {y} at x = {x}");
        }
    }

    #[test]
    fn doubling_resolution_barely_moves_the_value() {
        let m = toy_model();
        let m2 = m.with_resolution(2001).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let a = m.evaluate(&[x]).unwrap();
            let b = m2.evaluate(&[x]).unwrap();
            assert!((a - b).abs() < 1e-3, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn incomplete_rule_base_is_rejected() {
        let input = LinguisticVariable::three_terms("x", 0.0, 1.0);
        let output = LinguisticVariable::three_terms("y", 0.0, 1.0);
        // Only the Low region is covered; High inputs fire nothing.
        let rules = vec![FuzzyRule { antecedents: vec![(0, 0)], consequent: 0 }];
        let err = FuzzyModel::new(vec![input], output, rules, 101).unwrap_err();
        assert!(matches!(err, FuzzyError::Invalid(_)));
    }

    #[test]
    fn gapped_coverage_is_rejected() {
        let v = LinguisticVariable::new(
            "x",
            0.0,
            1.0,
            vec![
                Term { label: "Low".into(), mf: tri(0.0, 0.0, 0.3) },
                Term { label: "High".into(), mf: tri(0.7, 1.0, 1.0) },
            ],
        );
        assert!(v.validate().is_err());
    }

    #[test]
    fn duplicate_term_labels_are_rejected() {
        let v = LinguisticVariable::new(
            "x",
            0.0,
            1.0,
            vec![
                Term { label: "Low".into(), mf: tri(0.0, 0.0, 1.0) },
                Term { label: "Low".into(), mf: tri(0.0, 1.0, 1.0) },
            ],
        );
        assert!(v.validate().is_err());
    }

    #[test]
    fn missing_named_input_is_an_error() {
        let m = toy_model();
        assert!(matches!(
            m.evaluate_named(&[("bogus", 0.5)]),
            Err(FuzzyError::UnknownVariable(_))
        ));
    }
}
