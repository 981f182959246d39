//! Mamdani fuzzy inference on the unit universe.
//!
//! All linguistic variables live on `[0,1]` with the three-term partition
//! Low = tri(0, 0, 0.5), Medium = tri(0, 0.5, 1), High = tri(0.5, 1, 1).
//! Inference is min-conjunction, max-aggregation of clipped consequents,
//! and centroid defuzzification by trapezoidal integration on a 1001-point
//! grid; the unit-universe result is then mapped affinely onto each output
//! parameter's range. The four concrete rule bases used by the search live
//! in [`tables`].

mod tables;

pub use tables::{build_fis1, build_fis2, build_fis3, build_fis4};

use crate::error::{Error, Result};

/// Resolution of the defuzzification grid over `[0,1]`.
pub const GRID_POINTS: usize = 1001;

/// A linguistic term of a three-term variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Low,
    Medium,
    High,
}

/// Antecedent predicate; `LowOrMedium` encodes "L or M" table cells and
/// `Any` encodes "Any" cells (always satisfied).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermPredicate {
    Low,
    Medium,
    High,
    LowOrMedium,
    Any,
}

impl TermPredicate {
    fn label(self) -> &'static str {
        match self {
            TermPredicate::Low => "L",
            TermPredicate::Medium => "M",
            TermPredicate::High => "H",
            TermPredicate::LowOrMedium => "L|M",
            TermPredicate::Any => "Any",
        }
    }
}

/// Triangular membership function with breakpoints `a <= b <= c` on `[0,1]`.
#[derive(Debug, Clone, Copy)]
pub struct MembershipFunction {
    a: f64,
    b: f64,
    c: f64,
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Self {
        assert!(a <= b && b <= c, "breakpoints must satisfy a <= b <= c");
        Self { a, b, c }
    }

    /// Membership degree at `x`. The peak is checked first so degenerate
    /// shoulders (`a == b` or `b == c`) still evaluate to 1 at the peak.
    pub fn membership(&self, x: f64) -> f64 {
        if x == self.b {
            return 1.0;
        }
        if x <= self.a || x >= self.c {
            return 0.0;
        }
        if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.c - x) / (self.c - self.b)
        }
    }

    /// Analytic centroid of the full (unclipped) triangle.
    pub fn analytic_centroid(&self) -> f64 {
        (self.a + self.b + self.c) / 3.0
    }
}

/// Per-term membership degrees produced by fuzzification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermDegrees {
    pub low: f64,
    pub medium: f64,
    pub high: f64,
}

impl TermDegrees {
    /// Degree to which this variable satisfies an antecedent predicate.
    pub fn satisfies(&self, predicate: TermPredicate) -> f64 {
        match predicate {
            TermPredicate::Low => self.low,
            TermPredicate::Medium => self.medium,
            TermPredicate::High => self.high,
            TermPredicate::LowOrMedium => self.low.max(self.medium),
            TermPredicate::Any => 1.0,
        }
    }
}

/// A named three-term variable on the unit universe.
#[derive(Debug, Clone)]
pub struct LinguisticVariable {
    pub name: String,
    pub low: MembershipFunction,
    pub medium: MembershipFunction,
    pub high: MembershipFunction,
}

impl LinguisticVariable {
    /// The standard symmetric full-cover partition used by every FIS here.
    pub fn standard(name: &str) -> Self {
        Self {
            name: name.to_string(),
            low: MembershipFunction::triangular(0.0, 0.0, 0.5),
            medium: MembershipFunction::triangular(0.0, 0.5, 1.0),
            high: MembershipFunction::triangular(0.5, 1.0, 1.0),
        }
    }

    pub fn term(&self, term: Term) -> &MembershipFunction {
        match term {
            Term::Low => &self.low,
            Term::Medium => &self.medium,
            Term::High => &self.high,
        }
    }

    /// Fuzzify a crisp value; inputs outside `[0,1]` are clamped first.
    pub fn fuzzify(&self, value: f64) -> TermDegrees {
        let x = value.clamp(0.0, 1.0);
        TermDegrees {
            low: self.low.membership(x),
            medium: self.medium.membership(x),
            high: self.high.membership(x),
        }
    }
}

/// One if-then rule: conjunction of antecedent predicates, one or more
/// term consequents.
#[derive(Debug, Clone)]
pub struct FuzzyRule {
    pub antecedents: Vec<(String, TermPredicate)>,
    pub consequents: Vec<(String, Term)>,
}

/// An output variable together with the parameter range its unit-universe
/// centroid is scaled onto.
#[derive(Debug, Clone)]
pub struct OutputVariable {
    pub variable: LinguisticVariable,
    pub min: f64,
    pub max: f64,
}

impl OutputVariable {
    pub fn scale(&self, unit: f64) -> f64 {
        self.min + unit * (self.max - self.min)
    }
}

/// A complete Mamdani rule base: input variables, scaled output variables,
/// and the rule table.
#[derive(Debug, Clone)]
pub struct RuleBase {
    pub name: String,
    pub inputs: Vec<LinguisticVariable>,
    pub outputs: Vec<OutputVariable>,
    pub rules: Vec<FuzzyRule>,
}

impl RuleBase {
    fn input(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs.iter().find(|v| v.name == name)
    }

    fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o.variable.name == name)
    }

    /// Fuzzified degrees for every input, in input declaration order.
    fn fuzzify_inputs(&self, crisp: &[(&str, f64)]) -> Result<Vec<TermDegrees>> {
        self.inputs
            .iter()
            .map(|var| {
                let value = crisp
                    .iter()
                    .find(|(name, _)| *name == var.name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| Error::UnknownVariable(var.name.clone()))?;
                Ok(var.fuzzify(value))
            })
            .collect()
    }

    /// Firing strength of one rule given fuzzified input degrees:
    /// min over antecedents of the predicate satisfaction.
    pub fn evaluate_rule(&self, rule: &FuzzyRule, degrees: &[TermDegrees]) -> Result<f64> {
        let mut strength = 1.0f64;
        for (name, predicate) in &rule.antecedents {
            let idx = self
                .inputs
                .iter()
                .position(|v| &v.name == name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            strength = strength.min(degrees[idx].satisfies(*predicate));
        }
        Ok(strength)
    }

    /// Run the full Mamdani pipeline and return each output's centroid on
    /// the unit universe (before range scaling), in output order.
    pub fn infer_unit(&self, crisp: &[(&str, f64)]) -> Result<Vec<f64>> {
        let degrees = self.fuzzify_inputs(crisp)?;
        let mut strengths = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            strengths.push(self.evaluate_rule(rule, &degrees)?);
        }

        // Per output: pointwise max over consequent MFs clipped at their
        // rules' firing strengths, then centroid by trapezoidal integration.
        let mut unit = Vec::with_capacity(self.outputs.len());
        for output in &self.outputs {
            let mut clips: Vec<(f64, &MembershipFunction)> = Vec::new();
            for (rule, &strength) in self.rules.iter().zip(&strengths) {
                if strength <= 0.0 {
                    continue;
                }
                for (name, term) in &rule.consequents {
                    if name == &output.variable.name {
                        clips.push((strength, output.variable.term(*term)));
                    }
                }
            }
            unit.push(centroid_of_clipped(&clips));
        }

        // Consequents naming no declared output are a construction bug.
        for rule in &self.rules {
            for (name, _) in &rule.consequents {
                if self.output_index(name).is_none() {
                    return Err(Error::UnknownVariable(name.clone()));
                }
            }
        }

        Ok(unit)
    }

    /// Crisp inference: unit centroids scaled onto each output's range.
    /// When no rule fires for an output, its value is the range midpoint.
    pub fn infer(&self, crisp: &[(&str, f64)]) -> Result<Vec<(String, f64)>> {
        let unit = self.infer_unit(crisp)?;
        Ok(self
            .outputs
            .iter()
            .zip(unit)
            .map(|(o, u)| (o.variable.name.clone(), o.scale(u)))
            .collect())
    }

    /// Human-readable rule listing, one rule per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} ({} rules)\n", self.name, self.rules.len()));
        for (i, rule) in self.rules.iter().enumerate() {
            let ants: Vec<String> = rule
                .antecedents
                .iter()
                .map(|(n, p)| format!("{n}={}", p.label()))
                .collect();
            let cons: Vec<String> = rule
                .consequents
                .iter()
                .map(|(n, t)| {
                    let label = match t {
                        Term::Low => "L",
                        Term::Medium => "M",
                        Term::High => "H",
                    };
                    format!("{n}={label}")
                })
                .collect();
            out.push_str(&format!(
                "{:2}: if {} then {}\n",
                i + 1,
                ants.join(" & "),
                cons.join(", ")
            ));
        }
        out
    }

    fn resolve_input(&self, name: &str) -> Result<()> {
        self.input(name)
            .map(|_| ())
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Validate that every rule's variable names resolve. Called by the
    /// table builders after construction.
    pub fn validate(&self) -> Result<()> {
        for rule in &self.rules {
            for (name, _) in &rule.antecedents {
                self.resolve_input(name)?;
            }
            for (name, _) in &rule.consequents {
                if self.output_index(name).is_none() {
                    return Err(Error::UnknownVariable(name.clone()));
                }
            }
            assert!(!rule.consequents.is_empty(), "rule without consequents");
        }
        Ok(())
    }
}

/// Centroid on `[0,1]` of the max-union of MFs clipped at given strengths.
/// An empty or zero-area union yields the universe midpoint 0.5.
fn centroid_of_clipped(clips: &[(f64, &MembershipFunction)]) -> f64 {
    if clips.is_empty() {
        return 0.5;
    }
    let n = GRID_POINTS;
    let h = 1.0 / (n - 1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let x = i as f64 * h;
        let mut y = 0.0f64;
        for &(strength, mf) in clips {
            y = y.max(strength.min(mf.membership(x)));
        }
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        num += w * x * y;
        den += w * y;
    }
    if den <= 1e-12 {
        0.5
    } else {
        num / den
    }
}

#[cfg(test)]
mod test_support {
    use super::*;

    /// Unit centroid of a single term fully fired, for oracle checks.
    pub fn full_term_centroid(term: Term) -> f64 {
        let var = LinguisticVariable::standard("x");
        centroid_of_clipped(&[(1.0, var.term(term))])
    }
}
